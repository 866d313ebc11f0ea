//! Skeletal fusion-category data: fusion rules plus F-symbols.
//!
//! For a tuple `(x, y, z, w)` the left trees of `Mor(w, x y z)` are indexed by
//! `(u, i, j)` with `i < N^{xy}_u`, `j < N^{uz}_w`, and the right trees by
//! `(v, k, l)` with `k < N^{yz}_v`, `l < N^{xv}_w`, both lexicographic in label
//! order then basis index. `F^{xyz}_w` expands left trees in right trees:
//! `L_row = sum_col F[row][col] R_col`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::cyclotomic::{CycloContext, CycloError, CycloNumber};
use crate::groups::{FiniteGroup, FusionTable, GroupError, RepData};
use crate::linalg::{solve_unique_many, ExactMatrix, LinalgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("left trees of ({0}) are not in the span of the right trees; intertwiner bases are inconsistent")]
    InconsistentBases(String),
    #[error("F-matrix for ({0}) has wrong shape or is singular")]
    BadFMatrix(String),
    #[error("missing F-matrix for ({0})")]
    MissingFMatrix(String),
    #[error("bicharacter: {0}")]
    Bicharacter(String),
    #[error("tau must satisfy tau^2 |A| = 1 with tau rational; got {0}")]
    TauMismatch(String),
    #[error("fusion rules: {0}")]
    FusionRules(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

pub type Quad = (usize, usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletalCategory {
    pub name: String,
    pub fusion: FusionTable,
    pub unit: usize,
    pub duals: Vec<usize>,
    ctx: &'static CycloContext,
    f: HashMap<Quad, ExactMatrix>,
}

impl SkeletalCategory {
    /// Validates shapes, invertibility and duals.
    pub fn new(
        name: &str,
        fusion: FusionTable,
        unit: usize,
        ctx: &'static CycloContext,
        f: HashMap<Quad, ExactMatrix>,
    ) -> Result<Self, FusionError> {
        let k = fusion.rank();
        if unit >= k {
            return Err(FusionError::FusionRules("unit out of range".into()));
        }
        for x in 0..k {
            for y in 0..k {
                if fusion.get(unit, x, y) != u32::from(x == y)
                    || fusion.get(x, unit, y) != u32::from(x == y)
                {
                    return Err(FusionError::FusionRules(format!(
                        "unit does not act trivially on {}",
                        fusion.labels[x]
                    )));
                }
            }
        }
        let mut duals = Vec::with_capacity(k);
        for x in 0..k {
            let d: Vec<usize> = (0..k).filter(|&y| fusion.get(x, y, unit) == 1).collect();
            if d.len() != 1 {
                return Err(FusionError::FusionRules(format!(
                    "{} has no unique dual",
                    fusion.labels[x]
                )));
            }
            duals.push(d[0]);
        }
        let cat = SkeletalCategory {
            name: name.to_string(),
            fusion,
            unit,
            duals,
            ctx,
            f,
        };
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    for w in 0..k {
                        let (nl, nr) = (
                            cat.left_basis((x, y, z, w)).len(),
                            cat.right_basis((x, y, z, w)).len(),
                        );
                        if nl != nr {
                            return Err(FusionError::FusionRules(format!(
                                "fusion rules are not associative at {}",
                                cat.quad_name((x, y, z, w))
                            )));
                        }
                        if nl == 0 {
                            continue;
                        }
                        let m = cat.f.get(&(x, y, z, w)).ok_or_else(|| {
                            FusionError::MissingFMatrix(cat.quad_name((x, y, z, w)))
                        })?;
                        if m.rows() != nl
                            || m.cols() != nl
                            || m.context().conductor() != ctx.conductor()
                            || !m.is_invertible()
                        {
                            return Err(FusionError::BadFMatrix(cat.quad_name((x, y, z, w))));
                        }
                    }
                }
            }
        }
        Ok(cat)
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn rank(&self) -> usize {
        self.fusion.rank()
    }

    pub fn labels(&self) -> &[String] {
        &self.fusion.labels
    }

    pub fn n(&self, x: usize, y: usize, z: usize) -> usize {
        self.fusion.get(x, y, z) as usize
    }

    pub fn quad_name(&self, (x, y, z, w): Quad) -> String {
        let l = &self.fusion.labels;
        format!("{},{},{};{}", l[x], l[y], l[z], l[w])
    }

    /// Left trees `(u, i, j)` of `Mor(w, (x y) z)`.
    pub fn left_basis(&self, (x, y, z, w): Quad) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.rank() {
            for i in 0..self.n(x, y, u) {
                for j in 0..self.n(u, z, w) {
                    out.push((u, i, j));
                }
            }
        }
        out
    }

    /// Right trees `(v, k, l)` of `Mor(w, x (y z))`.
    pub fn right_basis(&self, (x, y, z, w): Quad) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.rank() {
            for k in 0..self.n(y, z, v) {
                for l in 0..self.n(x, v, w) {
                    out.push((v, k, l));
                }
            }
        }
        out
    }

    pub fn left_index(&self, (x, y, z, w): Quad, (u, i, j): (usize, usize, usize)) -> usize {
        let before: usize = (0..u).map(|u2| self.n(x, y, u2) * self.n(u2, z, w)).sum();
        before + i * self.n(u, z, w) + j
    }

    pub fn right_index(&self, (x, y, z, w): Quad, (v, k, l): (usize, usize, usize)) -> usize {
        let before: usize = (0..v).map(|v2| self.n(y, z, v2) * self.n(x, v2, w)).sum();
        before + k * self.n(x, v, w) + l
    }

    pub fn f(&self, q: Quad) -> Option<&ExactMatrix> {
        self.f.get(&q)
    }

    /// All stored F-matrices in a deterministic order.
    pub fn f_matrices(&self) -> Vec<(Quad, &ExactMatrix)> {
        let mut v: Vec<(Quad, &ExactMatrix)> = self.f.iter().map(|(q, m)| (*q, m)).collect();
        v.sort_by_key(|(q, _)| *q);
        v
    }

    pub fn f_entry(
        &self,
        q: Quad,
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    ) -> CycloNumber {
        match self.f.get(&q) {
            Some(m) => m[(self.left_index(q, left), self.right_index(q, right))].clone(),
            None => CycloNumber::zero(self.ctx),
        }
    }

    /// Tuples with a unit argument whose F-matrix is not the identity.
    pub fn unit_violations(&self) -> Vec<Quad> {
        let mut out: Vec<Quad> = self
            .f
            .iter()
            .filter(|((x, y, z, _), m)| {
                (*x == self.unit || *y == self.unit || *z == self.unit) && !m.is_identity()
            })
            .map(|(q, _)| *q)
            .collect();
        out.sort();
        out
    }

    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, FusionError> {
        let f = self
            .f
            .iter()
            .map(|(q, m)| Ok((*q, m.embed(target)?)))
            .collect::<Result<HashMap<_, _>, LinalgError>>()?;
        Ok(SkeletalCategory {
            f,
            ctx: target,
            ..self.clone()
        })
    }

    /// Replaces one F-matrix; used to construct deliberate violations.
    pub fn with_f(&self, q: Quad, m: ExactMatrix) -> Self {
        let mut out = self.clone();
        out.f.insert(q, m);
        out
    }

    /// Exact pentagon check over all 5-tuples `(x, y, z, w; t)`.
    pub fn pentagon_check(&self) -> Vec<(usize, usize, usize, usize, usize)> {
        let k = self.rank();
        let mut out: Vec<_> = (0..k)
            .into_par_iter()
            .flat_map_iter(|x| {
                let mut bad = Vec::new();
                for y in 0..k {
                    for z in 0..k {
                        for w in 0..k {
                            for t in 0..k {
                                if !self.pentagon_holds(x, y, z, w, t) {
                                    bad.push((x, y, z, w, t));
                                }
                            }
                        }
                    }
                }
                bad
            })
            .collect();
        out.sort();
        out
    }

    fn channels(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        self.fusion
            .channels(a, b)
            .into_iter()
            .map(|(c, n)| (c, n as usize))
            .collect()
    }

    fn pentagon_holds(&self, x: usize, y: usize, z: usize, w: usize, t: usize) -> bool {
        type Key = (usize, usize, usize, usize, usize);
        let zero = CycloNumber::zero(self.ctx);
        for (a, na) in self.channels(x, y) {
            for i1 in 0..na {
                for (b, nb) in self.channels(a, z) {
                    let n3 = self.n(b, w, t);
                    for i2 in 0..nb {
                        for i3 in 0..n3 {
                            let mut lhs: HashMap<Key, CycloNumber> = HashMap::new();
                            for (c, nc) in self.channels(z, w) {
                                for j1 in 0..nc {
                                    for j2 in 0..self.n(a, c, t) {
                                        let c1 =
                                            self.f_entry((a, z, w, t), (b, i2, i3), (c, j1, j2));
                                        if c1.is_zero() {
                                            continue;
                                        }
                                        for (e, ne) in self.channels(y, c) {
                                            for k1 in 0..ne {
                                                for k2 in 0..self.n(x, e, t) {
                                                    let c2 = self.f_entry(
                                                        (x, y, c, t),
                                                        (a, i1, j2),
                                                        (e, k1, k2),
                                                    );
                                                    if !c2.is_zero() {
                                                        *lhs.entry((c, j1, e, k1, k2))
                                                            .or_insert_with(|| zero.clone()) +=
                                                            &(&c1 * &c2);
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                            let mut rhs: HashMap<Key, CycloNumber> = HashMap::new();
                            for (d, nd) in self.channels(y, z) {
                                for m1 in 0..nd {
                                    for m2 in 0..self.n(x, d, b) {
                                        let c3 =
                                            self.f_entry((x, y, z, b), (a, i1, i2), (d, m1, m2));
                                        if c3.is_zero() {
                                            continue;
                                        }
                                        for (e, ne) in self.channels(d, w) {
                                            for n1 in 0..ne {
                                                for n2 in 0..self.n(x, e, t) {
                                                    let c4 = self.f_entry(
                                                        (x, d, w, t),
                                                        (b, m2, i3),
                                                        (e, n1, n2),
                                                    );
                                                    if c4.is_zero() {
                                                        continue;
                                                    }
                                                    let c34 = &c3 * &c4;
                                                    for (c, nc) in self.channels(z, w) {
                                                        for j1 in 0..nc {
                                                            for k1 in 0..self.n(y, c, e) {
                                                                let c5 = self.f_entry(
                                                                    (y, z, w, e),
                                                                    (d, m1, n1),
                                                                    (c, j1, k1),
                                                                );
                                                                if !c5.is_zero() {
                                                                    *rhs.entry((c, j1, e, k1, n2)).or_insert_with(|| zero.clone()) += &(&c34 * &c5);
                                                                }
                                                            }
                                                        }
                                                    }
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                            lhs.retain(|_, v| !v.is_zero());
                            rhs.retain(|_, v| !v.is_zero());
                            if lhs != rhs {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// Left and right tree vectors of `Mor(w, x y z)` as concrete maps.
fn tree_vectors(data: &RepData, (x, y, z, w): Quad) -> (Vec<ExactMatrix>, Vec<ExactMatrix>) {
    let ctx = data.context();
    let dim = |a: usize| data.irreps[a].dim();
    let k = data.irreps.len();
    let mut left = Vec::new();
    for u in 0..k {
        let (Some(b1), Some(b2)) = (data.basis(x, y, u), data.basis(u, z, w)) else {
            continue;
        };
        for t1 in &b1.maps {
            let lifted = t1.kron(&ExactMatrix::identity(ctx, dim(z)));
            for t2 in &b2.maps {
                left.push(lifted.mul(t2));
            }
        }
    }
    let mut right = Vec::new();
    for v in 0..k {
        let (Some(b1), Some(b2)) = (data.basis(y, z, v), data.basis(x, v, w)) else {
            continue;
        };
        for s1 in &b1.maps {
            let lifted = ExactMatrix::identity(ctx, dim(x)).kron(s1);
            for s2 in &b2.maps {
                right.push(lifted.mul(s2));
            }
        }
    }
    (left, right)
}

/// Dual right-tree maps `T^{xv,+}_{w,l} (1_x (x) T^{yz,+}_{v,k})`.
fn right_duals(data: &RepData, (x, y, z, w): Quad) -> Vec<ExactMatrix> {
    let ctx = data.context();
    let mut out = Vec::new();
    for v in 0..data.irreps.len() {
        let (Some(b1), Some(b2)) = (data.basis(y, z, v), data.basis(x, v, w)) else {
            continue;
        };
        for s1 in &b1.duals {
            let lifted = ExactMatrix::identity(ctx, data.irreps[x].dim()).kron(s1);
            for s2 in &b2.duals {
                out.push(s2.mul(&lifted));
            }
        }
    }
    out
}

fn assemble_from_irreps(
    data: &RepData,
    block: impl Fn(Quad) -> Result<Option<ExactMatrix>, FusionError> + Sync,
) -> Result<SkeletalCategory, FusionError> {
    let k = data.irreps.len();
    let quads: Vec<Quad> = (0..k)
        .flat_map(|x| {
            (0..k).flat_map(move |y| (0..k).flat_map(move |z| (0..k).map(move |w| (x, y, z, w))))
        })
        .collect();
    let blocks = quads
        .par_iter()
        .map(|&q| Ok(block(q)?.map(|m| (q, m))))
        .collect::<Result<Vec<_>, FusionError>>()?;
    let f: HashMap<Quad, ExactMatrix> = blocks.into_iter().flatten().collect();
    SkeletalCategory::new(
        data.group.name(),
        data.fusion.clone(),
        data.unit,
        data.context(),
        f,
    )
}

/// F-symbols by expanding each left tree in the right trees through an exact linear solve.
///
/// A map out of an irreducible module is determined by the image of its first
/// basis vector, so only first columns enter the solve.
pub fn from_irreps(data: &RepData) -> Result<SkeletalCategory, FusionError> {
    let ctx = data.context();
    assemble_from_irreps(data, |q| {
        let (left, right) = tree_vectors(data, q);
        if left.is_empty() && right.is_empty() {
            return Ok(None);
        }
        let rows = right.first().or(left.first()).map_or(0, ExactMatrix::rows);
        let mut m = ExactMatrix::zeros(ctx, rows, right.len());
        for (c, r) in right.iter().enumerate() {
            for i in 0..rows {
                m[(i, c)] = r[(i, 0)].clone();
            }
        }
        let mut b = ExactMatrix::zeros(ctx, rows, left.len());
        for (c, l) in left.iter().enumerate() {
            for i in 0..rows {
                b[(i, c)] = l[(i, 0)].clone();
            }
        }
        let sol = solve_unique_many(&m, &b)
            .ok_or_else(|| FusionError::InconsistentBases(format!("{q:?}")))?;
        Ok(Some(sol.transpose()))
    })
}

/// F-symbols by contracting left trees with the dual right trees, `F[row][col] id = R_col^+ L_row`.
pub fn from_irreps_by_duals(data: &RepData) -> Result<SkeletalCategory, FusionError> {
    let ctx = data.context();
    assemble_from_irreps(data, |q| {
        let (left, _) = tree_vectors(data, q);
        let duals = right_duals(data, q);
        if left.is_empty() && duals.is_empty() {
            return Ok(None);
        }
        let mut m = ExactMatrix::zeros(ctx, left.len(), duals.len());
        for (r, l) in left.iter().enumerate() {
            for (c, d) in duals.iter().enumerate() {
                let p = d.mul(l);
                let s = p
                    .as_scalar()
                    .ok_or_else(|| FusionError::InconsistentBases(format!("{q:?}")))?;
                m[(r, c)] = s;
            }
        }
        Ok(Some(m))
    })
}

/// A symmetric nondegenerate bicharacter on a finite abelian group.
#[derive(Debug, Clone)]
pub struct Bicharacter {
    pub group: FiniteGroup,
    pub labels: Vec<String>,
    values: Vec<Vec<CycloNumber>>,
}

impl Bicharacter {
    pub fn new(
        group: FiniteGroup,
        labels: Vec<String>,
        values: Vec<Vec<CycloNumber>>,
    ) -> Result<Self, FusionError> {
        let n = group.order();
        let bad = |m: &str| Err(FusionError::Bicharacter(m.to_string()));
        if !group.is_abelian() {
            return bad("group is not abelian");
        }
        if labels.len() != n || values.len() != n || values.iter().any(|r| r.len() != n) {
            return bad("value table size differs from group order");
        }
        for a in 0..n {
            for b in 0..n {
                if values[a][b] != values[b][a] {
                    return bad("not symmetric");
                }
                for c in 0..n {
                    if values[a][group.mul(b, c)] != &values[a][b] * &values[a][c] {
                        return bad("not multiplicative");
                    }
                }
            }
        }
        for a in 0..n {
            if a != group.identity() && (0..n).all(|b| values[a][b].is_one()) {
                return bad("degenerate");
            }
        }
        Ok(Bicharacter {
            group,
            labels,
            values,
        })
    }

    pub fn value(&self, a: usize, b: usize) -> &CycloNumber {
        &self.values[a][b]
    }

    pub fn context(&self) -> &'static CycloContext {
        self.values[0][0].context()
    }
}

/// Tambara-Yamagami category on `A (+) {rho}` with the standard associators.
pub fn ty_category(
    name: &str,
    chi: &Bicharacter,
    tau: &BigRational,
) -> Result<SkeletalCategory, FusionError> {
    let g = &chi.group;
    let n = g.order();
    let tau_sq_order = tau * tau * BigRational::from_integer(n.into());
    if !tau_sq_order.is_one() {
        return Err(FusionError::TauMismatch(tau.to_string()));
    }
    let ctx = chi.context();
    let rho = n;
    let k = n + 1;
    let mut mult = vec![0u32; k * k * k];
    let mut set = |a: usize, b: usize, c: usize| mult[(a * k + b) * k + c] = 1;
    for a in 0..n {
        for b in 0..n {
            set(a, b, g.mul(a, b));
        }
        set(a, rho, rho);
        set(rho, a, rho);
        set(rho, rho, a);
    }
    let mut labels = chi.labels.clone();
    labels.push("rho".into());
    let fusion = FusionTable::new(labels, Vec::new(), mult);
    let one = || ExactMatrix::identity(ctx, 1);
    let scalar = |v: &CycloNumber| ExactMatrix::scalar(v.clone());
    let mut f = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                f.insert((a, b, c, g.mul(g.mul(a, b), c)), one());
            }
            f.insert((a, b, rho, rho), one());
            f.insert((rho, a, b, rho), one());
            f.insert((a, rho, b, rho), scalar(chi.value(a, b)));
            f.insert((a, rho, rho, b), one());
            f.insert((rho, rho, a, b), one());
            f.insert((rho, a, rho, b), scalar(chi.value(a, b)));
        }
    }
    let tau_c = CycloNumber::from_rational(ctx, tau);
    let mut big = ExactMatrix::zeros(ctx, n, n);
    for u in 0..n {
        for v in 0..n {
            big[(u, v)] = &tau_c * &chi.value(u, v).inverse()?;
        }
    }
    f.insert((rho, rho, rho, rho), big);
    let unit = g.identity();
    SkeletalCategory::new(name, fusion, unit, ctx, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ctx;
    use crate::groups::{abelian_group, parse_cycles, FiniteGroup, Irrep};

    fn k4_bichar() -> Bicharacter {
        let (g, _) = abelian_group("k4", &[2, 2]).unwrap();
        let c = ctx(2);
        // elements in mixed radix: 0 = e, 1 = t, 2 = s, 3 = st
        let labels = vec!["e".into(), "t".into(), "s".into(), "st".into()];
        let sign = |a: usize, b: usize| {
            let (a1, a0, b1, b0) = (a >> 1, a & 1, b >> 1, b & 1);
            if (a1 * b1 + a0 * b0) % 2 == 1 {
                -1
            } else {
                1
            }
        };
        let values = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| CycloNumber::from_int(c, sign(a, b)))
                    .collect()
            })
            .collect();
        Bicharacter::new(g, labels, values).unwrap()
    }

    #[test]
    fn ty_pentagon_and_units() {
        let cat = ty_category("ty", &k4_bichar(), &BigRational::new(1.into(), 2.into())).unwrap();
        assert!(cat.unit_violations().is_empty());
        assert!(cat.pentagon_check().is_empty());
        let rho = 4;
        let big = cat.f((rho, rho, rho, rho)).unwrap();
        assert!(big.mul(&big.adjoint()).is_identity());
        let mut broken = big.clone();
        broken[(1, 1)] = -&broken[(1, 1)];
        assert!(!cat
            .with_f((rho, rho, rho, rho), broken)
            .pentagon_check()
            .is_empty());
    }

    #[test]
    fn ty_rejects_bad_tau_and_degenerate_bicharacters() {
        let chi = k4_bichar();
        assert!(matches!(
            ty_category("ty", &chi, &BigRational::new(1.into(), 3.into())),
            Err(FusionError::TauMismatch(_))
        ));
        let (g, _) = abelian_group("k4", &[2, 2]).unwrap();
        let c = ctx(2);
        let trivial = vec![vec![CycloNumber::one(c); 4]; 4];
        let labels = vec!["e".into(), "t".into(), "s".into(), "st".into()];
        assert!(Bicharacter::new(g, labels, trivial).is_err());
    }

    #[test]
    fn s3_f_symbols_two_ways() {
        let g = FiniteGroup::from_permutations(
            "s3",
            &[
                ("a".into(), parse_cycles("(1 2)").unwrap()),
                ("b".into(), parse_cycles("(1 2 3)").unwrap()),
            ],
            100,
        )
        .unwrap();
        let k = ctx(3);
        let one = |v: i64| ExactMatrix::from_ints(k, &[&[v]]);
        let irreps = vec![
            Irrep::from_generators(&g, "triv", k, &[one(1), one(1)]).unwrap(),
            Irrep::from_generators(&g, "sign", k, &[one(-1), one(1)]).unwrap(),
            Irrep::from_generators(
                &g,
                "two",
                k,
                &[
                    ExactMatrix::parse(k, "0 c(3,2)\nc(3,1) 0").unwrap(),
                    ExactMatrix::parse(k, "c(3,2) 0\n0 c(3,1)").unwrap(),
                ],
            )
            .unwrap(),
        ];
        let data = RepData::new(g, irreps).unwrap();
        let a = from_irreps(&data).unwrap();
        let b = from_irreps_by_duals(&data).unwrap();
        assert_eq!(a, b);
        assert!(a.unit_violations().is_empty());
        assert!(a.pentagon_check().is_empty());
    }
}
