//! Finite groups by multiplication table, their unitary irreps, fusion
//! multiplicities and intertwiner spaces.

mod abelian;
mod reps;

pub use abelian::{abelian_group, abelian_invariants, h2_brute, schur_multiplier};
pub use reps::{
    fusion_table, intertwiner_basis, validate_irrep, FusionTable, IntertwinerBasis, Irrep,
    IrrepReport, RepData,
};

use std::collections::HashMap;
use std::collections::VecDeque;

use thiserror::Error;

use crate::cyclotomic::CycloError;
use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeds bound {0}")]
    TooLarge(usize),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("invalid multiplication table: {0}")]
    BadTable(String),
    #[error("irrep list is not exhaustive: sum of squared dimensions {got}, group order {order}")]
    NotExhaustive { got: usize, order: usize },
    #[error("irrep {label}: {msg}")]
    BadIrrep { label: String, msg: String },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

pub const DEFAULT_CLOSURE_BOUND: usize = 100_000;

/// A finite group stored as a full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<(String, usize)>,
    /// For each element a word in generator positions whose product is the element.
    words: Vec<Vec<usize>>,
}

/// A permutation of `0..degree`, `p[i]` the image of `i`.
pub type Perm = Vec<usize>;

/// Parses cycle notation such as `(1 2 3)(4 5)`; `()` is the identity.
pub fn parse_cycles(src: &str) -> Result<Vec<Vec<usize>>, GroupError> {
    let mut cycles = Vec::new();
    let mut rest = src.trim();
    while !rest.is_empty() {
        let inner_end = rest
            .find(')')
            .ok_or_else(|| GroupError::BadPermutation(src.into()))?;
        let inner = rest
            .strip_prefix('(')
            .map(|r| &r[..inner_end - 1])
            .ok_or_else(|| GroupError::BadPermutation(src.into()))?;
        let pts = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| GroupError::BadPermutation(src.into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !pts.is_empty() {
            cycles.push(pts);
        }
        rest = rest[inner_end + 1..].trim_start();
    }
    Ok(cycles)
}

pub fn cycles_to_perm(cycles: &[Vec<usize>], degree: usize) -> Result<Perm, GroupError> {
    let mut p: Perm = (0..degree).collect();
    let mut seen = vec![false; degree];
    for c in cycles {
        for (k, &a) in c.iter().enumerate() {
            if a >= degree || seen[a] {
                return Err(GroupError::BadPermutation(format!("{c:?}")));
            }
            seen[a] = true;
            p[a] = c[(k + 1) % c.len()];
        }
    }
    Ok(p)
}

impl FiniteGroup {
    /// Closure of the given permutations; product `g h` means apply `h`, then `g`.
    pub fn from_permutations(
        name: &str,
        gens: &[(String, Vec<Vec<usize>>)],
        bound: usize,
    ) -> Result<Self, GroupError> {
        let degree = gens
            .iter()
            .flat_map(|(_, c)| c.iter().flatten())
            .max()
            .map_or(1, |m| m + 1);
        let perms = gens
            .iter()
            .map(|(_, c)| cycles_to_perm(c, degree))
            .collect::<Result<Vec<_>, _>>()?;
        let id: Perm = (0..degree).collect();
        let mut elems: Vec<Perm> = vec![id.clone()];
        let mut index: HashMap<Perm, usize> = HashMap::from([(id, 0)]);
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (gi, g) in perms.iter().enumerate() {
                let prod: Perm = (0..degree).map(|p| elems[x][g[p]]).collect();
                if !index.contains_key(&prod) {
                    if elems.len() >= bound {
                        return Err(GroupError::TooLarge(bound));
                    }
                    let mut w = words[x].clone();
                    w.push(gi);
                    index.insert(prod.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(prod);
                    words.push(w);
                }
            }
        }
        let n = elems.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let prod: Perm = (0..degree).map(|p| elems[a][elems[b][p]]).collect();
                table[a * n + b] = index[&prod];
            }
        }
        let generators = gens
            .iter()
            .zip(&perms)
            .map(|((nm, _), p)| (nm.clone(), index[p]))
            .collect();
        Self::assemble(name, table, n, generators, Some(words))
    }

    /// Builds a group from a full multiplication table and named generator elements.
    pub fn from_table(
        name: &str,
        table: Vec<Vec<usize>>,
        generators: Vec<(String, usize)>,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        if table.iter().any(|r| r.len() != n) {
            return Err(GroupError::BadTable("table is not square".into()));
        }
        if table.iter().flatten().any(|&v| v >= n) {
            return Err(GroupError::BadTable("entry out of range".into()));
        }
        Self::assemble(name, table.concat(), n, generators, None)
    }

    fn assemble(
        name: &str,
        table: Vec<usize>,
        n: usize,
        generators: Vec<(String, usize)>,
        words: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, GroupError> {
        let m = |a: usize, b: usize| table[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| GroupError::BadTable("no identity".into()))?;
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or_else(|| GroupError::BadTable(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(GroupError::BadTable(format!(
                            "not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let words = match words {
            Some(w) => w,
            None => {
                let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
                words[identity] = Some(Vec::new());
                let mut queue = VecDeque::from([identity]);
                while let Some(x) = queue.pop_front() {
                    for (gi, (_, g)) in generators.iter().enumerate() {
                        let y = m(x, *g);
                        if words[y].is_none() {
                            let mut w = words[x].clone().expect("visited");
                            w.push(gi);
                            words[y] = Some(w);
                            queue.push_back(y);
                        }
                    }
                }
                words
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| {
                        GroupError::BadTable("generators do not generate the group".into())
                    })?
            }
        };
        Ok(FiniteGroup {
            name: name.to_string(),
            order: n,
            table,
            identity,
            inverse,
            generators,
            words,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn generators(&self) -> &[(String, usize)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.generators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| *g)
    }

    /// Word in generator positions evaluating to `g`.
    pub fn word(&self, g: usize) -> &[usize] {
        &self.words[g]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Evaluates a word given as a product of named generators, e.g. `["s", "u", "u"]`.
    pub fn eval_word(&self, names: &[&str]) -> Option<usize> {
        names.iter().try_fold(self.identity, |acc, n| {
            self.generator(n).map(|g| self.mul(acc, g))
        })
    }

    /// Rows of the multiplication table.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.order)
            .map(<[usize]>::to_vec)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(list: &[(&str, &str)]) -> Vec<(String, Vec<Vec<usize>>)> {
        list.iter()
            .map(|(n, c)| (n.to_string(), parse_cycles(c).unwrap()))
            .collect()
    }

    #[test]
    fn closure_examples() {
        let z2 = FiniteGroup::from_permutations("z2", &gens(&[("a", "(1 2)")]), 100).unwrap();
        assert_eq!(z2.order(), 2);
        let s3 =
            FiniteGroup::from_permutations("s3", &gens(&[("a", "(1 2)"), ("b", "(1 2 3)")]), 100)
                .unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let wall = FiniteGroup::from_permutations(
            "wall",
            &gens(&[
                ("s", "(1 3)(2 6)(5 7)"),
                ("t", "(1 5)(3 7)"),
                ("u", "(0 1 2 3 4 5 6 7)"),
            ]),
            1000,
        )
        .unwrap();
        assert_eq!(wall.order(), 32);
        let w = |n: &[&str]| wall.eval_word(n).unwrap();
        // s u s^-1 = u^3 and t u t^-1 = u^5
        assert_eq!(w(&["s", "u", "s"]), w(&["u", "u", "u"]));
        assert_eq!(w(&["t", "u", "t"]), w(&["u", "u", "u", "u", "u"]));
        assert_eq!(w(&["s", "t"]), w(&["t", "s"]));
        assert!(matches!(
            FiniteGroup::from_permutations("s4", &gens(&[("a", "(1 2)"), ("b", "(1 2 3 4)")]), 10),
            Err(GroupError::TooLarge(10))
        ));
    }

    #[test]
    fn words_evaluate_to_elements() {
        let s3 =
            FiniteGroup::from_permutations("s3", &gens(&[("a", "(1 2)"), ("b", "(1 2 3)")]), 100)
                .unwrap();
        for g in s3.elements() {
            let e = s3
                .word(g)
                .iter()
                .fold(s3.identity(), |acc, &i| s3.mul(acc, s3.generators()[i].1));
            assert_eq!(e, g);
        }
        let rebuilt =
            FiniteGroup::from_table("s3", s3.table_rows(), s3.generators().to_vec()).unwrap();
        assert_eq!(rebuilt.order(), 6);
        assert_eq!(rebuilt.identity(), s3.identity());
    }

    #[test]
    fn table_validation() {
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table("bad", bad, vec![("a".into(), 1)]).is_err());
        assert_eq!(parse_cycles("()").unwrap(), Vec::<Vec<usize>>::new());
        assert!(parse_cycles("(1 2").is_err());
        assert!(cycles_to_perm(&[vec![1, 1]], 3).is_err());
    }
}
