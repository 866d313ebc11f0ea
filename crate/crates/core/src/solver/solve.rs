//! The monomial system of one branch and its gauge classes.
//!
//! Writing each unknown as `exp(2 pi i e_i)`, relations are `lambda . e = q`
//! in `Q/Z`. Gauge acts by `e -> e + Gamma c`; the gauge-invariant exponent
//! vectors form the lattice `I = ker Gamma^T`, which contains the relation
//! lattice `L`. Solutions modulo gauge form a torsor under `Hom(I/L, T)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::{make_context, CycloContext, CycloNumber};
use crate::fusion::SkeletalCategory;
use crate::linalg::{
    frac, integer_kernel, lattice_coordinates, qz_solve, smith_normal_form, ExactMatrix, IntMatrix,
    RelationLattice,
};

use super::branch::Branch;
use super::structure::TensorStructure;
use super::system::{ConstraintSystem, Factor};
use super::SolverError;

pub const MAX_CLASSES_PER_BRANCH: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchStatus {
    Solved,
    /// A block equation whose two sides are not proportional.
    NotProportional(String),
    /// The scalar relations have no solution.
    Inconsistent(String),
}

#[derive(Debug, Clone)]
pub struct BranchSolution {
    pub status: BranchStatus,
    pub relations: RelationLattice,
    /// Rows span the gauge-invariant exponent vectors.
    pub invariants: IntMatrix,
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    /// Exponent vectors of one solution per class.
    pub class_exponents: Vec<Vec<BigRational>>,
}

fn exp_of(x: &CycloNumber) -> Option<BigRational> {
    x.root_of_unity_exponent()
        .map(|r| BigRational::new((*r.numer()).into(), (*r.denom()).into()))
}

/// `A = lambda B` for a nonzero scalar `lambda`.
fn proportionality(a: &ExactMatrix, b: &ExactMatrix) -> Option<CycloNumber> {
    let pos = b.entries().iter().position(|e| !e.is_zero())?;
    let lambda = &a.entries()[pos] / &b.entries()[pos];
    (!lambda.is_zero() && *a == b.scale(&lambda)).then_some(lambda)
}

fn side_matrix(
    sys: &ConstraintSystem,
    branch: &Branch,
    ctx: &'static CycloContext,
    side: &[Factor; 2],
) -> ExactMatrix {
    let shape = |f: Factor| match f {
        Factor::Unknown(i) if sys.unknowns[i].size > 1 => branch.shapes[&i].clone(),
        _ => ExactMatrix::identity(ctx, 1),
    };
    shape(side[0]).kron(&shape(side[1]))
}

fn signed_exponents(left: &[Factor; 2], right: &[Factor; 2], n: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    for f in left {
        if let Factor::Unknown(i) = f {
            v[*i] += 1;
        }
    }
    for f in right {
        if let Factor::Unknown(i) = f {
            v[*i] -= 1;
        }
    }
    v
}

/// Gauge matrix transposed: one row per non-unit label, one column per unknown.
pub fn gauge_transpose(cat: &SkeletalCategory, sys: &ConstraintSystem) -> IntMatrix {
    let labels: Vec<usize> = (0..cat.rank()).filter(|&x| x != cat.unit).collect();
    let rows = labels
        .iter()
        .map(|&g| {
            sys.unknowns
                .iter()
                .map(|u| {
                    let (x, y, z) = u.channel;
                    i64::from(x == g) + i64::from(y == g) - i64::from(z == g)
                })
                .collect()
        })
        .collect::<Vec<Vec<i64>>>();
    if rows.is_empty() {
        IntMatrix::zeros(0, sys.unknowns.len())
    } else {
        IntMatrix::from_rows(&rows)
    }
}

/// Collects the scalar relations of a branch and enumerates its classes.
pub fn solve_branch(
    cat: &SkeletalCategory,
    sys: &ConstraintSystem,
    branch: &Branch,
    gauge_t: &IntMatrix,
) -> Result<BranchSolution, SolverError> {
    let n = sys.unknowns.len();
    let ctx = cat.context();
    let mut lat = RelationLattice::new(n);
    let invariants = integer_kernel(gauge_t);
    let dead = |status, lat| BranchSolution {
        status,
        relations: lat,
        invariants: invariants.clone(),
        free_rank: 0,
        torsion: Vec::new(),
        class_exponents: Vec::new(),
    };
    for rel in &sys.monomial {
        let mut v = vec![BigInt::zero(); n];
        for &(i, e) in &rel.exponents {
            v[i] += e;
        }
        if let Err(e) = lat.insert(&v, &BigRational::zero()) {
            return Ok(dead(
                BranchStatus::Inconsistent(format!(
                    "{} forces {}",
                    cat.quad_name(rel.quad),
                    e.residue
                )),
                lat,
            ));
        }
    }
    for eq in &sys.matrix {
        let kl = side_matrix(sys, branch, ctx, &eq.left);
        let kr = side_matrix(sys, branch, ctx, &eq.right);
        let a = eq.phi.mul(&kl);
        let b = kr.mul(&eq.phi);
        let Some(lambda) = proportionality(&a, &b) else {
            return Ok(dead(
                BranchStatus::NotProportional(cat.quad_name(eq.quad)),
                lat,
            ));
        };
        let q = exp_of(&lambda).ok_or_else(|| {
            SolverError::NonTorsion(format!("{} at {}", lambda, cat.quad_name(eq.quad)))
        })?;
        // mu lambda = nu, so mu / nu = lambda^{-1}
        let v = signed_exponents(&eq.left, &eq.right, n);
        if v.iter().all(Zero::is_zero) {
            if !q.is_zero() {
                return Ok(dead(
                    BranchStatus::Inconsistent(format!(
                        "{} forces {}",
                        cat.quad_name(eq.quad),
                        lambda
                    )),
                    lat,
                ));
            }
            continue;
        }
        if let Err(e) = lat.insert(&v, &-q) {
            return Ok(dead(
                BranchStatus::Inconsistent(format!(
                    "{} forces {}",
                    cat.quad_name(eq.quad),
                    e.residue
                )),
                lat,
            ));
        }
    }

    let relations = lat.relations();
    for (lambda, _) in &relations {
        if gauge_t.mul_vec(lambda).iter().any(|x| !x.is_zero()) {
            return Err(SolverError::Internal(
                "a relation is not gauge invariant".into(),
            ));
        }
    }
    let m = invariants.rows();
    let rel_matrix =
        IntMatrix::from_big_rows(n, relations.iter().map(|(r, _)| r.clone()).collect());
    let beta: Vec<BigRational> = relations.iter().map(|(_, q)| q.clone()).collect();
    let coords = if relations.is_empty() {
        IntMatrix::zeros(0, m)
    } else {
        lattice_coordinates(&invariants, &rel_matrix).ok_or_else(|| {
            SolverError::Internal("relation lattice escapes the invariant lattice".into())
        })?
    };
    let (torsion_axes, free_rank, v_mat) = if m == 0 {
        (Vec::new(), 0, IntMatrix::identity(0))
    } else if coords.rows() == 0 {
        (Vec::new(), m, IntMatrix::identity(m))
    } else {
        let snf = smith_normal_form(&coords);
        let diag = snf.diagonal();
        let rank = snf.rank();
        let axes: Vec<(usize, u64)> = diag
            .iter()
            .take(rank)
            .enumerate()
            .filter(|(_, d)| !d.is_one())
            .map(|(i, d)| {
                Ok((
                    i,
                    d.abs()
                        .to_u64()
                        .ok_or_else(|| SolverError::SizeGuard("invariant factor".into()))?,
                ))
            })
            .collect::<Result<_, SolverError>>()?;
        (axes, m - rank, snf.v)
    };
    let torsion: Vec<u64> = torsion_axes.iter().map(|&(_, d)| d).collect();
    let count: u64 = torsion.iter().product();
    if count > MAX_CLASSES_PER_BRANCH {
        return Err(SolverError::SizeGuard(format!(
            "{count} classes in one branch"
        )));
    }
    let particular = if relations.is_empty() {
        vec![BigRational::zero(); n]
    } else {
        qz_solve(&rel_matrix, &beta)
            .ok_or_else(|| SolverError::Internal("consistent lattice has no solution".into()))?
    };
    let base_inv: Vec<BigRational> = (0..m)
        .map(|j| dot(invariants.row(j), &particular))
        .collect();

    let mut class_exponents = Vec::new();
    let stacked_rows: Vec<Vec<BigInt>> = rel_matrix
        .row_vecs()
        .into_iter()
        .chain(invariants.row_vecs())
        .collect();
    let stacked = IntMatrix::from_big_rows(n, stacked_rows);
    for mut code in 0..count {
        let mut tp = vec![BigRational::zero(); m];
        for &(axis, d) in &torsion_axes {
            tp[axis] = BigRational::new(BigInt::from(code % d), BigInt::from(d));
            code /= d;
        }
        let mut rhs = beta.clone();
        for j in 0..m {
            let t: BigRational = (0..m)
                .map(|k| BigRational::from_integer(v_mat[(j, k)].clone()) * &tp[k])
                .fold(BigRational::zero(), |a, b| a + b);
            rhs.push(frac(&(&base_inv[j] + t)));
        }
        let e = if stacked.rows() == 0 {
            vec![BigRational::zero(); n]
        } else {
            qz_solve(&stacked, &rhs).ok_or_else(|| {
                SolverError::Internal("class representative is not solvable".into())
            })?
        };
        class_exponents.push(e);
    }
    Ok(BranchSolution {
        status: BranchStatus::Solved,
        relations: lat,
        invariants,
        free_rank,
        torsion,
        class_exponents,
    })
}

pub(crate) fn dot(a: &[BigInt], e: &[BigRational]) -> BigRational {
    frac(
        &a.iter()
            .zip(e)
            .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
            .fold(BigRational::zero(), |s, t| s + t),
    )
}

/// Builds the tensor structure with `J = exp(2 pi i e) K` on every channel.
pub fn assemble(
    cat: &SkeletalCategory,
    sys: &ConstraintSystem,
    branch: &Branch,
    exponents: &[BigRational],
    scale: &dyn Fn(usize) -> Option<BigRational>,
) -> Result<TensorStructure, SolverError> {
    let conductor = exponents.iter().fold(cat.context().conductor(), |acc, q| {
        num_integer::lcm(acc, q.denom().to_u32().unwrap_or(1))
    });
    let ctx = make_context(conductor)?;
    let mut out = TensorStructure::identity(cat).embed(ctx)?;
    let mut channels = std::collections::BTreeMap::new();
    for (c, m) in out.channels() {
        channels.insert(*c, m.clone());
    }
    for (i, u) in sys.unknowns.iter().enumerate() {
        let q = &exponents[i];
        let root = CycloNumber::from_root_exponent(
            ctx,
            num_rational::Ratio::new(
                q.numer().to_i64().unwrap_or(0),
                q.denom().to_i64().unwrap_or(1),
            ),
        )
        .ok_or_else(|| {
            SolverError::Internal(format!(
                "root exp(2 pi i {q}) outside conductor {conductor}"
            ))
        })?;
        let mut value = root;
        if let Some(s) = scale(i) {
            value = &value * &CycloNumber::from_rational(ctx, &s);
        }
        let m = if u.size > 1 {
            branch.shapes[&i].embed(ctx)?.scale(&value)
        } else {
            ExactMatrix::scalar(value)
        };
        channels.insert(u.channel, m);
    }
    out = TensorStructure::new(cat, channels)?;
    Ok(out)
}

/// Values of the gauge-invariant monomials of `j`, as `Q/Z` exponents, if `j`
/// lies in `branch`.
pub fn invariants_of(
    sys: &ConstraintSystem,
    branch: &Branch,
    invariants: &IntMatrix,
    j: &TensorStructure,
) -> Result<Option<Vec<BigRational>>, SolverError> {
    let ctx = j.context();
    let mut values = Vec::with_capacity(sys.unknowns.len());
    for (i, u) in sys.unknowns.iter().enumerate() {
        let m = j
            .get(u.channel)
            .ok_or_else(|| SolverError::Shape(format!("missing channel {:?}", u.channel)))?;
        if u.size > 1 {
            let k = branch.shapes[&i].embed(ctx)?;
            match proportionality(m, &k) {
                Some(v) => values.push(v),
                None => return Ok(None),
            }
        } else {
            values.push(m[(0, 0)].clone());
        }
    }
    let mut out = Vec::with_capacity(invariants.rows());
    for r in 0..invariants.rows() {
        let mut acc = CycloNumber::one(ctx);
        for (i, e) in invariants.row(r).iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let p = values[i].pow(
                e.abs()
                    .to_u64()
                    .ok_or_else(|| SolverError::SizeGuard("exponent".into()))?,
            );
            acc = if e.is_positive() {
                &acc * &p
            } else {
                &acc * &p.inverse()?
            };
        }
        let q = exp_of(&acc).ok_or_else(|| {
            SolverError::NonTorsion(format!("invariant monomial {r} evaluates to {acc}"))
        })?;
        out.push(q);
    }
    Ok(Some(out))
}
