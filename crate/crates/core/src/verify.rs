//! Invariant 2-cocycles of a group algebra, `Omega = sum_{g,h} w(g,h) g (x) h`,
//! checked by dense expansion.
//!
//! `Delta(g) = g (x) g`, `eps(g) = 1`, `g^* = g^{-1}`. Fourier blocks of `Omega`
//! are `Omega^{(x,y)} = sum w(g,h) x(g) (x) y(h)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::cyclotomic::{make_context, CycloContext, CycloError, CycloNumber};
use crate::groups::{FiniteGroup, GroupError, Irrep, RepData};
use crate::linalg::{frac, qz_solve, ExactMatrix, IntMatrix, LinalgError};
use crate::solver::{Channel, SolverError, TensorStructure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("irreps are not exhaustive: sum of squared dimensions {0} != |G| = {1}")]
    NotExhaustive(usize, usize),
    #[error("block ({0}) is not an intertwiner")]
    NotInvariant(String),
    #[error("cocycle is not invertible: block ({0}) is singular")]
    Singular(String),
    #[error("zero scalar on irrep {0}")]
    ZeroScalar(usize),
    #[error("cocycle is over a group of order {0}, expected {1}")]
    GroupMismatch(usize, usize),
    #[error("non-torsion ratio {0}")]
    NonTorsion(String),
    #[error("tensor structure has no channel {0:?}")]
    MissingChannel(Channel),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCocycle {
    pub group: String,
    order: usize,
    ctx: &'static CycloContext,
    values: Vec<CycloNumber>,
}

impl GroupCocycle {
    pub fn new(
        group: &FiniteGroup,
        ctx: &'static CycloContext,
        values: Vec<CycloNumber>,
    ) -> Result<Self, VerifyError> {
        let n = group.order();
        if values.len() != n * n {
            return Err(VerifyError::GroupMismatch(values.len(), n * n));
        }
        let values = values
            .into_iter()
            .map(|v| v.embed(ctx))
            .collect::<Result<_, _>>()?;
        Ok(GroupCocycle {
            group: group.name().to_string(),
            order: n,
            ctx,
            values,
        })
    }

    /// `1 (x) 1`.
    pub fn one(group: &FiniteGroup, ctx: &'static CycloContext) -> Self {
        let n = group.order();
        let mut values = vec![CycloNumber::zero(ctx); n * n];
        let e = group.identity();
        values[e * n + e] = CycloNumber::one(ctx);
        GroupCocycle {
            group: group.name().to_string(),
            order: n,
            ctx,
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn get(&self, g: usize, h: usize) -> &CycloNumber {
        &self.values[g * self.order + h]
    }

    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, VerifyError> {
        let values = self
            .values
            .iter()
            .map(|v| v.embed(target))
            .collect::<Result<_, _>>()?;
        Ok(GroupCocycle {
            values,
            ctx: target,
            ..self.clone()
        })
    }

    /// Nonzero coefficients `(g, h, w(g,h))`.
    pub fn support(&self) -> Vec<(usize, usize, &CycloNumber)> {
        let n = self.order;
        (0..n * n)
            .filter(|&i| !self.values[i].is_zero())
            .map(|i| (i / n, i % n, &self.values[i]))
            .collect()
    }

    /// Product in `C[G] (x) C[G]`.
    pub fn product(&self, other: &Self, group: &FiniteGroup) -> Result<Self, VerifyError> {
        let (a, b) = common(self, other)?;
        let n = a.order;
        let sa = a.support();
        let sb = b.support();
        let mut values = vec![CycloNumber::zero(a.ctx); n * n];
        for &(g, h, x) in &sa {
            for &(g2, h2, y) in &sb {
                values[group.mul(g, g2) * n + group.mul(h, h2)] += &(x * y);
            }
        }
        Ok(GroupCocycle { values, ..a })
    }

    /// `Omega^* = sum conj(w(g,h)) g^{-1} (x) h^{-1}`.
    pub fn star(&self, group: &FiniteGroup) -> Self {
        let n = self.order;
        let mut values = vec![CycloNumber::zero(self.ctx); n * n];
        for (g, h, v) in self.support() {
            values[group.inv(g) * n + group.inv(h)] = v.conjugate();
        }
        GroupCocycle {
            values,
            ..self.clone()
        }
    }

    pub fn is_one(&self, group: &FiniteGroup) -> bool {
        *self == GroupCocycle::one(group, self.ctx)
    }
}

fn common(a: &GroupCocycle, b: &GroupCocycle) -> Result<(GroupCocycle, GroupCocycle), VerifyError> {
    if a.order != b.order {
        return Err(VerifyError::GroupMismatch(a.order, b.order));
    }
    if a.ctx == b.ctx {
        return Ok((a.clone(), b.clone()));
    }
    let ctx = make_context(num_integer::lcm(a.ctx.conductor(), b.ctx.conductor()))?;
    Ok((a.embed(ctx)?, b.embed(ctx)?))
}

fn irreps_in(data: &RepData, ctx: &'static CycloContext) -> Result<Vec<Irrep>, VerifyError> {
    let total: usize = data.irreps.iter().map(|r| r.dim() * r.dim()).sum();
    if total != data.group.order() {
        return Err(VerifyError::NotExhaustive(total, data.group.order()));
    }
    Ok(data
        .irreps
        .iter()
        .map(|r| r.embed(ctx))
        .collect::<Result<_, _>>()?)
}

fn lcm_ctx(
    data: &RepData,
    ctx: &'static CycloContext,
) -> Result<&'static CycloContext, VerifyError> {
    Ok(make_context(num_integer::lcm(
        data.context().conductor(),
        ctx.conductor(),
    ))?)
}

/// Inverse Fourier transform of blocks indexed by irrep pairs.
fn from_blocks(
    data: &RepData,
    irreps: &[Irrep],
    ctx: &'static CycloContext,
    blocks: &HashMap<(usize, usize), ExactMatrix>,
) -> GroupCocycle {
    let g = &data.group;
    let n = g.order();
    let n2 = CycloNumber::from_int(ctx, (n * n) as i64);
    let rows: Vec<Vec<CycloNumber>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut row = vec![CycloNumber::zero(ctx); n];
            for ((x, y), b) in blocks {
                let (dx, dy) = (irreps[*x].dim(), irreps[*y].dim());
                let xm = irreps[*x].matrix(g.inv(a));
                // q[d][c] = sum_{i,j} X[i][j] B[(j,d),(i,c)]
                let mut q = ExactMatrix::zeros(ctx, dy, dy);
                for i in 0..dx {
                    for j in 0..dx {
                        let xv = &xm[(i, j)];
                        if xv.is_zero() {
                            continue;
                        }
                        for d in 0..dy {
                            for c in 0..dy {
                                let bv = &b[(j * dy + d, i * dy + c)];
                                if !bv.is_zero() {
                                    q[(d, c)] += &(xv * bv);
                                }
                            }
                        }
                    }
                }
                if q.is_zero() {
                    continue;
                }
                let w = CycloNumber::from_int(ctx, (dx * dy) as i64);
                for (h, slot) in row.iter_mut().enumerate() {
                    let t = irreps[*y].matrix(g.inv(h)).mul(&q).trace();
                    if !t.is_zero() {
                        *slot += &(&t * &w);
                    }
                }
            }
            row.into_iter().map(|v| &v / &n2).collect()
        })
        .collect();
    GroupCocycle {
        group: g.name().to_string(),
        order: n,
        ctx,
        values: rows.concat(),
    }
}

/// `Omega^{(x,y)}` for every pair of irreps.
pub fn fourier_blocks(
    data: &RepData,
    omega: &GroupCocycle,
) -> Result<HashMap<(usize, usize), ExactMatrix>, VerifyError> {
    if omega.order != data.group.order() {
        return Err(VerifyError::GroupMismatch(omega.order, data.group.order()));
    }
    let ctx = lcm_ctx(data, omega.ctx)?;
    let omega = omega.embed(ctx)?;
    let irreps = irreps_in(data, ctx)?;
    let n = omega.order;
    let k = irreps.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).collect();
    Ok(pairs
        .into_par_iter()
        .map(|(x, y)| {
            let (dx, dy) = (irreps[x].dim(), irreps[y].dim());
            let mut acc = ExactMatrix::zeros(ctx, dx * dy, dx * dy);
            for g in 0..n {
                let mut yg = ExactMatrix::zeros(ctx, dy, dy);
                let mut any = false;
                for h in 0..n {
                    let w = omega.get(g, h);
                    if !w.is_zero() {
                        yg = yg.add(&irreps[y].matrix(h).scale(w));
                        any = true;
                    }
                }
                if any {
                    acc = acc.add(&irreps[x].matrix(g).kron(&yg));
                }
            }
            ((x, y), acc)
        })
        .collect())
}

/// `Omega^{(x,y)} = sum_{z,i,j} (J^{xy}_z)_{ij} S_i S_j^+`, transformed back to `C[G] (x) C[G]`.
pub fn assemble(data: &RepData, j: &TensorStructure) -> Result<GroupCocycle, VerifyError> {
    let ctx = lcm_ctx(data, j.context())?;
    let j = j.embed(ctx)?;
    let irreps = irreps_in(data, ctx)?;
    let k = irreps.len();
    let mut blocks = HashMap::new();
    for x in 0..k {
        for y in 0..k {
            let d = irreps[x].dim() * irreps[y].dim();
            let mut acc = ExactMatrix::zeros(ctx, d, d);
            for z in 0..k {
                let Some(b) = data.basis(x, y, z) else {
                    continue;
                };
                if b.is_empty() {
                    continue;
                }
                let m = j
                    .get((x, y, z))
                    .ok_or(VerifyError::MissingChannel((x, y, z)))?;
                for i in 0..b.len() {
                    let si = b.maps[i].embed(ctx)?;
                    for jj in 0..b.len() {
                        if !m[(i, jj)].is_zero() {
                            acc = acc.add(&si.mul(&b.duals[jj].embed(ctx)?).scale(&m[(i, jj)]));
                        }
                    }
                }
            }
            blocks.insert((x, y), acc);
        }
    }
    Ok(from_blocks(data, &irreps, ctx, &blocks))
}

/// Channel matrices of an invariant cocycle, `S_i^+ Omega^{(x,y)} S_k = J_ik id`.
pub fn decompose(
    data: &RepData,
    omega: &GroupCocycle,
) -> Result<BTreeMap<Channel, ExactMatrix>, VerifyError> {
    let blocks = fourier_blocks(data, omega)?;
    let ctx = lcm_ctx(data, omega.ctx)?;
    let k = data.irreps.len();
    let mut out = BTreeMap::new();
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                let Some(b) = data.basis(x, y, z) else {
                    continue;
                };
                if b.is_empty() {
                    continue;
                }
                let n = b.len();
                let mut m = ExactMatrix::zeros(ctx, n, n);
                for i in 0..n {
                    for kk in 0..n {
                        let p = b.duals[i]
                            .embed(ctx)?
                            .mul(&blocks[&(x, y)])
                            .mul(&b.maps[kk].embed(ctx)?);
                        m[(i, kk)] = p
                            .as_scalar()
                            .ok_or_else(|| VerifyError::NotInvariant(format!("{x},{y}")))?;
                    }
                }
                out.insert((x, y, z), m);
            }
        }
    }
    Ok(out)
}

/// A failed identity, with the coefficient where the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness(pub Vec<usize>);

fn first_mismatch(
    n: usize,
    lhs: &[CycloNumber],
    rhs: &[CycloNumber],
    arity: usize,
) -> Option<Witness> {
    let i = (0..lhs.len()).find(|&i| lhs[i] != rhs[i])?;
    let mut idx = Vec::with_capacity(arity);
    let mut r = i;
    for _ in 0..arity {
        idx.push(r % n);
        r /= n;
    }
    idx.reverse();
    Some(Witness(idx))
}

/// Coefficients of a product of two elements of `C[G]^{(x)3}` given as sparse lists.
fn triple_product(
    n: usize,
    ctx: &'static CycloContext,
    a: &[([usize; 3], CycloNumber)],
    b: &[([usize; 3], CycloNumber)],
    group: &FiniteGroup,
) -> Vec<CycloNumber> {
    let chunks: Vec<Vec<CycloNumber>> = a
        .par_chunks(a.len().div_ceil(rayon::current_num_threads()).max(1))
        .map(|chunk| {
            let mut out = vec![CycloNumber::zero(ctx); n * n * n];
            for (p, x) in chunk {
                for (q, y) in b {
                    let idx = (group.mul(p[0], q[0]) * n + group.mul(p[1], q[1])) * n
                        + group.mul(p[2], q[2]);
                    out[idx] += &(x * y);
                }
            }
            out
        })
        .collect();
    let mut out = vec![CycloNumber::zero(ctx); n * n * n];
    for c in chunks {
        for (o, v) in out.iter_mut().zip(c) {
            if !v.is_zero() {
                *o += &v;
            }
        }
    }
    out
}

fn lift(
    omega: &GroupCocycle,
    f: impl Fn(usize, usize) -> [usize; 3],
) -> Vec<([usize; 3], CycloNumber)> {
    omega
        .support()
        .into_iter()
        .map(|(g, h, v)| (f(g, h), v.clone()))
        .collect()
}

/// `(1 (x) Omega)(id (x) Delta)(Omega) = (Omega (x) 1)(Delta (x) id)(Omega)`.
pub fn check_left_cocycle(group: &FiniteGroup, omega: &GroupCocycle) -> Result<(), Witness> {
    let (n, e, ctx) = (omega.order, group.identity(), omega.ctx);
    let lhs = triple_product(
        n,
        ctx,
        &lift(omega, |g, h| [e, g, h]),
        &lift(omega, |g, h| [g, h, h]),
        group,
    );
    let rhs = triple_product(
        n,
        ctx,
        &lift(omega, |g, h| [g, h, e]),
        &lift(omega, |g, h| [g, g, h]),
        group,
    );
    first_mismatch(n, &lhs, &rhs, 3).map_or(Ok(()), Err)
}

/// `(Delta (x) id)(Omega)(Omega (x) 1) = (id (x) Delta)(Omega)(1 (x) Omega)`.
pub fn check_right_cocycle(group: &FiniteGroup, omega: &GroupCocycle) -> Result<(), Witness> {
    let (n, e, ctx) = (omega.order, group.identity(), omega.ctx);
    let lhs = triple_product(
        n,
        ctx,
        &lift(omega, |g, h| [g, g, h]),
        &lift(omega, |g, h| [g, h, e]),
        group,
    );
    let rhs = triple_product(
        n,
        ctx,
        &lift(omega, |g, h| [g, h, h]),
        &lift(omega, |g, h| [e, g, h]),
        group,
    );
    first_mismatch(n, &lhs, &rhs, 3).map_or(Ok(()), Err)
}

pub fn check_right_cocycle_via_star(
    group: &FiniteGroup,
    omega: &GroupCocycle,
) -> Result<(), Witness> {
    check_right_cocycle(group, &omega.star(group))
}

/// `(k (x) k) Omega = Omega (k (x) k)` for every `k`; the witness is `k`.
pub fn check_invariance(group: &FiniteGroup, omega: &GroupCocycle) -> Result<(), Witness> {
    let n = omega.order;
    for k in group.elements() {
        let ki = group.inv(k);
        for g in 0..n {
            for h in 0..n {
                let (cg, ch) = (
                    group.mul(group.mul(ki, g), k),
                    group.mul(group.mul(ki, h), k),
                );
                if omega.get(cg, ch) != omega.get(g, h) {
                    return Err(Witness(vec![k]));
                }
            }
        }
    }
    Ok(())
}

/// `(eps (x) id)(Omega) = 1 = (id (x) eps)(Omega)`; the witness is `[side, h]`.
pub fn check_counital(group: &FiniteGroup, omega: &GroupCocycle) -> Result<(), Witness> {
    let (n, e, ctx) = (omega.order, group.identity(), omega.ctx);
    for side in 0..2 {
        for h in 0..n {
            let mut s = CycloNumber::zero(ctx);
            for g in 0..n {
                s += if side == 0 {
                    omega.get(g, h)
                } else {
                    omega.get(h, g)
                };
            }
            let want = if h == e {
                CycloNumber::one(ctx)
            } else {
                CycloNumber::zero(ctx)
            };
            if s != want {
                return Err(Witness(vec![side, h]));
            }
        }
    }
    Ok(())
}

/// `Omega Omega^* = Omega^* Omega = 1 (x) 1`; the witness is `[order, g, h]`.
pub fn check_unitary(group: &FiniteGroup, omega: &GroupCocycle) -> Result<(), Witness> {
    let star = omega.star(group);
    let one = GroupCocycle::one(group, omega.ctx);
    for (i, p) in [omega.product(&star, group), star.product(omega, group)]
        .into_iter()
        .enumerate()
    {
        let p = p.expect("same group and field");
        if let Some(Witness(w)) = first_mismatch(omega.order, &p.values, &one.values, 2) {
            return Err(Witness([vec![i], w].concat()));
        }
    }
    Ok(())
}

pub const CHECKS: [&str; 5] = [
    "left cocycle",
    "right cocycle via star",
    "invariance",
    "counital",
    "unitary",
];

/// All five checks in the order of [`CHECKS`].
pub fn run_checks(
    group: &FiniteGroup,
    omega: &GroupCocycle,
) -> Vec<(&'static str, Result<(), Witness>)> {
    let checks: [fn(&FiniteGroup, &GroupCocycle) -> Result<(), Witness>; 5] = [
        check_left_cocycle,
        check_right_cocycle_via_star,
        check_invariance,
        check_counital,
        check_unitary,
    ];
    CHECKS
        .iter()
        .zip(checks)
        .map(|(name, f)| (*name, f(group, omega)))
        .collect()
}

/// Isotypic projection onto `z` inside `x (x) y`.
fn isotypic_projection(
    group: &FiniteGroup,
    irreps: &[Irrep],
    x: usize,
    y: usize,
    z: usize,
) -> ExactMatrix {
    let ctx = irreps[x].context();
    let d = irreps[x].dim() * irreps[y].dim();
    let mut p = ExactMatrix::zeros(ctx, d, d);
    for g in group.elements() {
        let c = irreps[z].character(g).conjugate();
        if !c.is_zero() {
            p = p.add(&irreps[x].matrix(g).kron(irreps[y].matrix(g)).scale(&c));
        }
    }
    let s = CycloNumber::from_ratio(ctx, irreps[z].dim() as i64, group.order() as i64);
    p.scale(&s)
}

/// `delta(h) = (h (x) h) Delta(h^{-1})` for the central element with scalar `c_x` on irrep `x`.
pub fn coboundary(data: &RepData, c: &[CycloNumber]) -> Result<GroupCocycle, VerifyError> {
    let ctx = c
        .iter()
        .fold(Ok(data.context()), |acc: Result<_, VerifyError>, v| {
            Ok(make_context(num_integer::lcm(
                acc?.conductor(),
                v.context().conductor(),
            ))?)
        })?;
    let c: Vec<CycloNumber> = c.iter().map(|v| v.embed(ctx)).collect::<Result<_, _>>()?;
    if let Some(i) = c.iter().position(CycloNumber::is_zero) {
        return Err(VerifyError::ZeroScalar(i));
    }
    let irreps = irreps_in(data, ctx)?;
    let k = irreps.len();
    let mut blocks = HashMap::new();
    for x in 0..k {
        for y in 0..k {
            let d = irreps[x].dim() * irreps[y].dim();
            let mut acc = ExactMatrix::zeros(ctx, d, d);
            for z in 0..k {
                if data.fusion.get(x, y, z) == 0 {
                    continue;
                }
                let s = &(&c[x] * &c[y]) / &c[z];
                acc = acc.add(&isotypic_projection(&data.group, &irreps, x, y, z).scale(&s));
            }
            blocks.insert((x, y), acc);
        }
    }
    Ok(from_blocks(data, &irreps, ctx, &blocks))
}

/// Per-irrep scalars `c` with `Omega_2 = delta(c) Omega_1`, if any.
pub fn cohomologous(
    data: &RepData,
    a: &GroupCocycle,
    b: &GroupCocycle,
) -> Result<Option<Vec<CycloNumber>>, VerifyError> {
    let (a, b) = common(a, b)?;
    let ctx = lcm_ctx(data, a.ctx)?;
    let (a, b) = (a.embed(ctx)?, b.embed(ctx)?);
    let irreps = irreps_in(data, ctx)?;
    let ba = fourier_blocks(data, &a)?;
    let bb = fourier_blocks(data, &b)?;
    let k = irreps.len();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut beta: Vec<BigRational> = Vec::new();
    for x in 0..k {
        for y in 0..k {
            let name = format!("{},{}", data.fusion.labels[x], data.fusion.labels[y]);
            let inv = ba[&(x, y)]
                .inverse()
                .ok_or_else(|| VerifyError::Singular(name.clone()))?;
            let r = bb[&(x, y)].mul(&inv);
            for z in 0..k {
                if data.fusion.get(x, y, z) == 0 {
                    continue;
                }
                let p = isotypic_projection(&data.group, &irreps, x, y, z);
                let rp = r.mul(&p);
                let pos = p
                    .entries()
                    .iter()
                    .position(|v| !v.is_zero())
                    .expect("nonzero projection");
                let rho = &rp.entries()[pos] / &p.entries()[pos];
                if rp != p.scale(&rho) {
                    return Ok(None);
                }
                let Some(q) = rho.root_of_unity_exponent() else {
                    return Err(VerifyError::NonTorsion(format!(
                        "{rho} on ({name}) -> {}",
                        data.fusion.labels[z]
                    )));
                };
                let mut row = vec![0i64; k];
                row[x] += 1;
                row[y] += 1;
                row[z] -= 1;
                rows.push(row);
                beta.push(BigRational::new(
                    BigInt::from(*q.numer()),
                    BigInt::from(*q.denom()),
                ));
            }
        }
    }
    let Some(e) = qz_solve(&IntMatrix::from_rows(&rows), &beta) else {
        return Ok(None);
    };
    let conductor = e.iter().fold(ctx.conductor(), |acc, q| {
        num_integer::lcm(acc, q.denom().to_u32().unwrap_or(1))
    });
    let wctx = make_context(conductor)?;
    let witness = e
        .iter()
        .map(|q| {
            let q = frac(q);
            let r = Ratio::new(
                q.numer().to_i64().unwrap_or(0),
                q.denom().to_i64().unwrap_or(1),
            );
            CycloNumber::from_root_exponent(wctx, r)
                .ok_or_else(|| VerifyError::NonTorsion(q.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // confirm directly in the group algebra
    if coboundary(data, &witness)?.product(&a, &data.group)? != b.embed(wctx)? {
        return Err(VerifyError::NotInvariant(
            "witness does not reproduce the second cocycle".into(),
        ));
    }
    Ok(Some(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::lookup;
    use crate::cyclotomic::ctx;
    use crate::fusion::from_irreps;
    use crate::groups::abelian_group;
    use crate::solver::structure::TensorStructure;

    fn z(n: u64) -> RepData {
        let (g, irreps) = abelian_group(&format!("z{n}"), &[n]).unwrap();
        RepData::new(g, irreps).unwrap()
    }

    fn half_sign(d: &RepData) -> GroupCocycle {
        // 1/2 (e e + e u + u e - u u)
        let c = ctx(2);
        let (e, u) = (d.group.identity(), 1 - d.group.identity());
        let mut v = vec![CycloNumber::zero(c); 4];
        let h = |p: i64| CycloNumber::from_ratio(c, p, 2);
        v[e * 2 + e] = h(1);
        v[e * 2 + u] = h(1);
        v[u * 2 + e] = h(1);
        v[u * 2 + u] = h(-1);
        GroupCocycle::new(&d.group, c, v).unwrap()
    }

    fn sign_structure(d: &RepData) -> TensorStructure {
        let cat = from_irreps(d).unwrap();
        let sgn = 1 - d.unit;
        let channels = TensorStructure::identity(&cat)
            .channels()
            .map(|(&ch, m)| {
                let v = if ch == (sgn, sgn, d.unit) {
                    m.scale(&CycloNumber::from_int(m.context(), -1))
                } else {
                    m.clone()
                };
                (ch, v)
            })
            .collect();
        TensorStructure::new(&cat, channels).unwrap()
    }

    #[test]
    fn identity_assembles_to_one() {
        for name in ["k4", "s3"] {
            let d = lookup(name).unwrap().load().unwrap();
            let d = d.rep_data().unwrap();
            let cat = from_irreps(d).unwrap();
            let om = assemble(d, &TensorStructure::identity(&cat)).unwrap();
            assert!(om.is_one(&d.group));
            assert!(run_checks(&d.group, &om).iter().all(|(_, r)| r.is_ok()));
        }
    }

    #[test]
    fn z2_sign_channel_by_hand() {
        let d = z(2);
        let om = assemble(&d, &sign_structure(&d)).unwrap();
        assert_eq!(om, half_sign(&d).embed(om.context()).unwrap());
        assert!(run_checks(&d.group, &om).iter().all(|(_, r)| r.is_ok()));
        // h = (1, -1) is the group element u, and delta(u) = 1 (x) 1
        let c = ctx(4);
        let mut h = vec![CycloNumber::one(c); 2];
        h[1 - d.unit] = CycloNumber::from_int(c, -1);
        assert!(coboundary(&d, &h).unwrap().is_one(&d.group));
        // the sign element needs c_u^2 = -1
        h[1 - d.unit] = CycloNumber::root(c, 1);
        assert_eq!(coboundary(&d, &h).unwrap(), om.embed(c).unwrap());
        let one = GroupCocycle::one(&d.group, c);
        let w = cohomologous(&d, &one, &om).unwrap().expect("coboundary");
        assert_eq!(
            coboundary(&d, &w).unwrap(),
            om.embed(w[0].context()).unwrap()
        );
    }

    #[test]
    fn z3_diagonal_generator_fails_the_cocycle_identities() {
        let d = z(3);
        let c = ctx(3);
        let g = d.group.generators()[0].1;
        let mut v = vec![CycloNumber::zero(c); 9];
        v[g * 3 + g] = CycloNumber::one(c);
        let om = GroupCocycle::new(&d.group, c, v).unwrap();
        assert!(check_left_cocycle(&d.group, &om).is_err());
        assert!(check_right_cocycle_via_star(&d.group, &om).is_err());
    }

    #[test]
    fn s3_transposition_is_not_invariant() {
        let input = lookup("s3").unwrap().load().unwrap();
        let d = input.rep_data().unwrap();
        let c = ctx(3);
        let t = (0..d.group.order())
            .find(|&g| g != d.group.identity() && d.group.element_order(g) == 2)
            .unwrap();
        let n = d.group.order();
        let mut v = vec![CycloNumber::zero(c); n * n];
        v[t * n + t] = CycloNumber::one(c);
        let om = GroupCocycle::new(&d.group, c, v).unwrap();
        assert!(check_invariance(&d.group, &om).is_err());
        assert!(check_invariance(&d.group, &GroupCocycle::one(&d.group, c)).is_ok());
    }

    #[test]
    fn coboundaries_are_invariant_cocycles_and_multiply() {
        let input = lookup("s3").unwrap().load().unwrap();
        let d = input.rep_data().unwrap();
        let c = ctx(6);
        let h1: Vec<CycloNumber> = vec![
            CycloNumber::one(c),
            CycloNumber::root(c, 1),
            CycloNumber::root(c, 2),
        ];
        let h2: Vec<CycloNumber> = vec![
            CycloNumber::one(c),
            CycloNumber::root(c, 3),
            CycloNumber::root(c, 5),
        ];
        let prod: Vec<CycloNumber> = h1.iter().zip(&h2).map(|(a, b)| a * b).collect();
        let (d1, d2) = (coboundary(d, &h1).unwrap(), coboundary(d, &h2).unwrap());
        for om in [&d1, &d2] {
            assert!(run_checks(&d.group, om).iter().all(|(_, r)| r.is_ok()));
        }
        assert_eq!(
            coboundary(d, &prod).unwrap(),
            d1.product(&d2, &d.group).unwrap()
        );
        let one = GroupCocycle::one(&d.group, c);
        assert!(cohomologous(d, &one, &d1).unwrap().is_some());
        assert!(cohomologous(d, &d1, &d1).unwrap().is_some());
    }

    #[test]
    fn counital_failure_is_reported() {
        let d = z(2);
        let c = ctx(2);
        let om = GroupCocycle::new(
            &d.group,
            c,
            vec![
                CycloNumber::from_int(c, 2),
                CycloNumber::zero(c),
                CycloNumber::zero(c),
                CycloNumber::zero(c),
            ],
        )
        .unwrap();
        assert!(check_counital(&d.group, &om).is_err());
        assert!(check_unitary(&d.group, &om).is_err());
    }
}
