//! Shapes of the multiplicity channels.
//!
//! Channels that appear alone on both sides of a block equation with an
//! invertible `Phi` are transported into each other, `M_Q ~ Phi M_P Phi^{-1}`,
//! so each linked family is governed by its first member `M = J^{yz}_w`. For an
//! invertible object `c` with `c y = y` and `c w = w` the tuple `(c, y, z; w)`
//! gives `Phi_c M = psi(c) M Phi_c` with `psi(c) = J^{cw}_w / J^{cy}_y`, and the
//! scalar relations make `psi` a character of the stabilizer. Each character
//! is a candidate; it survives when the commutation constraints leave a
//! one-dimensional space spanned by an invertible matrix.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclotomic::{CycloContext, CycloNumber};
use crate::fusion::SkeletalCategory;
use crate::linalg::{rref_nullspace, ExactMatrix};

use super::structure::Channel;
use super::system::{ConstraintSystem, Factor};
use super::SolverError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateStatus {
    Alive,
    /// Only the zero matrix satisfies the commutation constraints.
    Empty,
    /// The solution line is spanned by a singular matrix.
    Singular,
    /// Solution space of this dimension; not resolved by branching.
    Unsupported(usize),
}

#[derive(Debug, Clone)]
pub struct Candidate {
    /// `psi(c)` as an exponent in `Q/Z`, aligned with the stabilizer.
    pub psi: Vec<BigRational>,
    pub status: CandidateStatus,
    /// Generator of the solution line, when alive.
    pub shape: Option<ExactMatrix>,
}

#[derive(Debug, Clone)]
pub struct Family {
    pub representative: usize,
    /// Member unknowns with `M_Q ~ T_Q M T_Q^{-1}`.
    pub transports: BTreeMap<usize, ExactMatrix>,
    pub stabilizer: Vec<usize>,
    pub candidates: Vec<Candidate>,
}

/// One choice of surviving candidate per family, with all multiplicity shapes.
#[derive(Debug, Clone)]
pub struct Branch {
    pub choice: Vec<usize>,
    pub shapes: HashMap<usize, ExactMatrix>,
}

/// Labels `x` with `x x* = 1`.
pub fn invertible_objects(cat: &SkeletalCategory) -> Vec<usize> {
    (0..cat.rank())
        .filter(|&x| {
            (0..cat.rank())
                .map(|z| cat.n(x, cat.duals[x], z))
                .sum::<usize>()
                == 1
        })
        .collect()
}

/// The unique simple constituent of `a b`, if there is exactly one of multiplicity one.
pub fn simple_product(cat: &SkeletalCategory, a: usize, b: usize) -> Option<usize> {
    let mut it = (0..cat.rank()).filter(|&z| cat.n(a, b, z) > 0);
    let z = it.next()?;
    (it.next().is_none() && cat.n(a, b, z) == 1).then_some(z)
}

/// All characters of the finite abelian group on `elems` as `Q/Z` exponent vectors.
pub fn characters(
    elems: &[usize],
    identity: usize,
    mul: impl Fn(usize, usize) -> usize,
) -> Result<Vec<Vec<BigRational>>, SolverError> {
    let pos = |g: usize| elems.iter().position(|&e| e == g);
    for &a in elems {
        for &b in elems {
            if mul(a, b) != mul(b, a) {
                return Err(SolverError::Unsupported(
                    "stabilizer of a multiplicity channel is not abelian".into(),
                ));
            }
            if pos(mul(a, b)).is_none() {
                return Err(SolverError::Unsupported("stabilizer is not closed".into()));
            }
        }
    }
    let order = |g: usize| {
        let mut x = g;
        let mut n = 1usize;
        while x != identity {
            x = mul(x, g);
            n += 1;
        }
        n
    };
    // greedy generating set
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![identity];
    for &g in elems {
        if span.contains(&g) {
            continue;
        }
        gens.push(g);
        let mut queue: VecDeque<usize> = span.iter().copied().collect();
        while let Some(h) = queue.pop_front() {
            for &s in &gens {
                let p = mul(h, s);
                if !span.contains(&p) {
                    span.push(p);
                    queue.push_back(p);
                }
            }
        }
    }
    let orders: Vec<usize> = gens.iter().map(|&g| order(g)).collect();
    let mut out = Vec::new();
    let total: usize = orders.iter().product();
    for mut code in 0..total {
        let mut vals = Vec::with_capacity(gens.len());
        for &o in &orders {
            vals.push(BigRational::new(
                ((code % o) as i64).into(),
                (o as i64).into(),
            ));
            code /= o;
        }
        if let Some(chi) = extend(elems, identity, &mul, &gens, &vals) {
            out.push(chi);
        }
    }
    Ok(out)
}

fn extend(
    elems: &[usize],
    identity: usize,
    mul: &impl Fn(usize, usize) -> usize,
    gens: &[usize],
    vals: &[BigRational],
) -> Option<Vec<BigRational>> {
    let mut value: HashMap<usize, BigRational> = HashMap::from([(identity, BigRational::zero())]);
    let mut queue = VecDeque::from([identity]);
    while let Some(h) = queue.pop_front() {
        for (g, v) in gens.iter().zip(vals) {
            let p = mul(h, *g);
            let pv = crate::linalg::frac(&(&value[&h] + v));
            match value.get(&p) {
                Some(old) if *old != pv => return None,
                Some(_) => {}
                None => {
                    value.insert(p, pv);
                    queue.push_back(p);
                }
            }
        }
    }
    elems.iter().map(|e| value.get(e).cloned()).collect()
}

/// Linked families of multiplicity channels with their transports.
fn families(
    sys: &ConstraintSystem,
    ctx: &'static CycloContext,
) -> Vec<(usize, BTreeMap<usize, ExactMatrix>)> {
    let mats = sys.matrix_unknowns();
    let single = |side: &[Factor; 2]| -> Option<usize> {
        let ms: Vec<usize> = side
            .iter()
            .filter_map(|f| match f {
                Factor::Unknown(i) if sys.unknowns[*i].size > 1 => Some(*i),
                _ => None,
            })
            .collect();
        (ms.len() == 1).then(|| ms[0])
    };
    let mut edges: HashMap<usize, Vec<(usize, ExactMatrix)>> = HashMap::new();
    for eq in &sys.matrix {
        let (Some(p), Some(q)) = (single(&eq.left), single(&eq.right)) else {
            continue;
        };
        if p == q || !eq.phi.is_square() {
            continue;
        }
        let Some(inv) = eq.phi.inverse() else {
            continue;
        };
        // M_q ~ phi M_p phi^{-1}
        edges.entry(p).or_default().push((q, eq.phi.clone()));
        edges.entry(q).or_default().push((p, inv));
    }
    let mut seen: HashSet<usize> = HashSet::new();
    let mut out = Vec::new();
    for &r in &mats {
        if seen.contains(&r) {
            continue;
        }
        let mut transports =
            BTreeMap::from([(r, ExactMatrix::identity(ctx, sys.unknowns[r].size))]);
        seen.insert(r);
        let mut queue = VecDeque::from([r]);
        while let Some(p) = queue.pop_front() {
            let tp = transports[&p].clone();
            for (q, phi) in edges.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(*q) {
                    transports.insert(*q, phi.mul(&tp));
                    queue.push_back(*q);
                }
            }
        }
        out.push((r, transports));
    }
    out
}

/// Families, their stabilizers and the status of every candidate character.
pub fn branch_families(
    cat: &SkeletalCategory,
    sys: &ConstraintSystem,
) -> Result<Vec<Family>, SolverError> {
    let inv = invertible_objects(cat);
    let ctx = cat.context();
    let mut out = Vec::new();
    for (rep, transports) in families(sys, ctx) {
        let (y, z, w) = sys.unknowns[rep].channel;
        let n = sys.unknowns[rep].size;
        let stabilizer: Vec<usize> = inv
            .iter()
            .copied()
            .filter(|&c| {
                simple_product(cat, c, y) == Some(y) && simple_product(cat, c, w) == Some(w)
            })
            .collect();
        let mut phis = Vec::new();
        for &c in &stabilizer {
            if c == cat.unit {
                phis.push(ExactMatrix::identity(ctx, n));
                continue;
            }
            let eq = sys
                .matrix
                .iter()
                .find(|e| e.quad == (c, y, z, w) && e.u == y && e.v == w)
                .ok_or_else(|| {
                    SolverError::Unsupported(format!(
                        "no self relation for {:?} under {c}",
                        (y, z, w)
                    ))
                })?;
            phis.push(eq.phi.clone());
        }
        let chars = characters(&stabilizer, cat.unit, |a, b| {
            simple_product(cat, a, b).unwrap_or(usize::MAX)
        })?;
        let candidates = chars
            .into_iter()
            .map(|psi| {
                let (status, shape) = solve_commutation(ctx, n, &phis, &psi)?;
                Ok(Candidate { psi, status, shape })
            })
            .collect::<Result<Vec<_>, SolverError>>()?;
        out.push(Family {
            representative: rep,
            transports,
            stabilizer,
            candidates,
        });
    }
    Ok(out)
}

/// Solves `Phi_c M = psi(c) M Phi_c` for all `c`.
fn solve_commutation(
    ctx: &'static CycloContext,
    n: usize,
    phis: &[ExactMatrix],
    psi: &[BigRational],
) -> Result<(CandidateStatus, Option<ExactMatrix>), SolverError> {
    let mut rows: Vec<Vec<CycloNumber>> = Vec::new();
    for (phi, q) in phis.iter().zip(psi) {
        let lam = CycloNumber::from_root_exponent(
            ctx,
            num_rational::Ratio::new(
                q.numer()
                    .try_into()
                    .map_err(|_| SolverError::Unsupported("character value".into()))?,
                q.denom()
                    .try_into()
                    .map_err(|_| SolverError::Unsupported("character value".into()))?,
            ),
        )
        .ok_or_else(|| {
            SolverError::Unsupported(format!("character value exp(2 pi i {q}) outside the field"))
        })?;
        for a in 0..n {
            for b in 0..n {
                let mut row = vec![CycloNumber::zero(ctx); n * n];
                for c in 0..n {
                    row[c * n + b] += &phi[(a, c)];
                    row[a * n + c] -= &(&lam * &phi[(c, b)]);
                }
                rows.push(row);
            }
        }
    }
    let m = ExactMatrix::from_rows(ctx, rows)?;
    let kernel = rref_nullspace(&m);
    match kernel.len() {
        0 => Ok((CandidateStatus::Empty, None)),
        1 => {
            let mut k = ExactMatrix::zeros(ctx, n, n);
            for a in 0..n {
                for b in 0..n {
                    k[(a, b)] = kernel[0][a * n + b].clone();
                }
            }
            if k.is_invertible() {
                Ok((CandidateStatus::Alive, Some(k)))
            } else {
                Ok((CandidateStatus::Singular, None))
            }
        }
        d => Ok((CandidateStatus::Unsupported(d), None)),
    }
}

/// All combinations of surviving candidates, with shapes transported to every member.
pub fn branches(families: &[Family]) -> Result<Vec<Branch>, SolverError> {
    for f in families {
        if let Some(c) = f
            .candidates
            .iter()
            .find(|c| matches!(c.status, CandidateStatus::Unsupported(_)))
        {
            let CandidateStatus::Unsupported(d) = c.status else {
                unreachable!()
            };
            return Err(SolverError::Unsupported(format!(
                "multiplicity channel family {} leaves a {d}-dimensional solution space",
                f.representative
            )));
        }
    }
    let alive: Vec<Vec<usize>> = families
        .iter()
        .map(|f| {
            (0..f.candidates.len())
                .filter(|&i| f.candidates[i].status == CandidateStatus::Alive)
                .collect()
        })
        .collect();
    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
    for a in &alive {
        choices = choices
            .into_iter()
            .flat_map(|c| a.iter().map(move |&i| [c.clone(), vec![i]].concat()))
            .collect();
    }
    Ok(choices
        .into_iter()
        .map(|choice| {
            let mut shapes = HashMap::new();
            for (f, &ci) in families.iter().zip(&choice) {
                let k = f.candidates[ci].shape.as_ref().expect("alive");
                for (q, t) in &f.transports {
                    let t_inv = t.inverse().expect("transport is invertible");
                    shapes.insert(*q, t.mul(k).mul(&t_inv));
                }
            }
            Branch { choice, shapes }
        })
        .collect())
}

/// Label of a channel for reports.
pub fn channel_name(cat: &SkeletalCategory, (x, y, z): Channel) -> String {
    let l = cat.labels();
    format!("{} {} -> {}", l[x], l[y], l[z])
}
