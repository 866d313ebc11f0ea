//! Tensor structures on the identity functor of a skeletal category, and the
//! group of their classes up to gauge.

pub mod branch;
pub mod solve;
pub mod structure;
pub mod system;

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::cyclotomic::{make_context, CycloError, CycloNumber};
use crate::fusion::{FusionError, SkeletalCategory};
use crate::groups::{abelian_invariants, FiniteGroup, GroupError, RepData};
use crate::linalg::{AbelianGroupPresentation, ExactMatrix, LinalgError};

pub use branch::{Branch, Candidate, CandidateStatus, Family};
pub use solve::{BranchSolution, BranchStatus};
pub use structure::{Channel, TensorStructure};
pub use system::{build_constraints, ConstraintSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-torsion constant {0}")]
    NonTorsion(String),
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoeffMode {
    /// Unitary tensor structures, `S^1` coefficients.
    Unitary,
    /// All invertible tensor structures, `C^*` coefficients.
    Invertible,
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoeffMode::Unitary => "unitary",
            CoeffMode::Invertible => "invertible",
        })
    }
}

/// `S_i^dagger S_j = G_ij id` on every channel with a concrete basis.
pub type Gram = HashMap<Channel, ExactMatrix>;

pub fn gram_from_reps(data: &RepData) -> Result<Gram, SolverError> {
    let mut out = Gram::new();
    let k = data.irreps.len();
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
                let mut g = ExactMatrix::zeros(data.context(), n, n);
                for i in 0..n {
                    for j in 0..n {
                        let p = b.maps[i].adjoint().mul(&b.maps[j]);
                        g[(i, j)] = p.as_scalar().ok_or_else(|| {
                            SolverError::Internal("Gram block is not scalar".into())
                        })?;
                    }
                }
                out.insert((x, y, z), g);
            }
        }
    }
    Ok(out)
}

/// `K^dagger G K = c G`, returning `c`.
fn gram_factor(k: &ExactMatrix, g: &ExactMatrix) -> Option<BigRational> {
    let p = k.adjoint().mul(g).mul(k);
    let c = &p[(0, 0)] / &g[(0, 0)];
    let c = c.to_rational()?;
    (c.is_positive() && p == g.scale(&CycloNumber::from_rational(g.context(), &c))).then_some(c)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

#[derive(Debug, Clone)]
pub struct CohomologyClass {
    pub branch: usize,
    /// Gauge-invariant monomials as `Q/Z` exponents.
    pub invariants: Vec<BigRational>,
    pub representative: TensorStructure,
}

#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub classes: Vec<CohomologyClass>,
    /// `table[a][b]` is the class of `rep_a rep_b`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    /// Free rank of the continuous part, zero for a finite answer.
    pub free_rank: usize,
    pub presentation: AbelianGroupPresentation,
}

#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub branch: Branch,
    pub solution: Option<BranchSolution>,
    /// Reason the branch has no solution in the chosen mode.
    pub dead: Option<String>,
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Computation {
    pub name: String,
    pub mode: CoeffMode,
    pub conductor: u32,
    pub unknowns: usize,
    /// Channel of each unknown.
    pub channels: Vec<Channel>,
    pub monomial_relations: usize,
    pub block_equations: usize,
    pub families: Vec<Family>,
    pub branches: Vec<BranchOutcome>,
    pub group: CohomologyGroup,
    /// The category in the working field.
    pub category: SkeletalCategory,
    pub system: ConstraintSystem,
}

impl Computation {
    /// Index of the class containing `j`, if `j` lies in a computed branch.
    pub fn classify(&self, j: &TensorStructure) -> Result<Option<usize>, SolverError> {
        identify(&self.system, &self.branches, &self.group.classes, j)
    }
}

/// Conductor large enough for every character of the invertible objects.
fn working_conductor(cat: &SkeletalCategory) -> u32 {
    let inv = branch::invertible_objects(cat);
    let mut n = cat.context().conductor();
    for &a in &inv {
        let mut x = a;
        let mut o = 1u32;
        while x != cat.unit && o <= 1024 {
            match branch::simple_product(cat, x, a) {
                Some(p) => x = p,
                None => break,
            }
            o += 1;
        }
        n = num_integer::lcm(n, o);
    }
    if n % 2 == 1 {
        n *= 2;
    }
    n
}

pub fn compute(
    cat: &SkeletalCategory,
    gram: Option<&Gram>,
    mode: CoeffMode,
) -> Result<Computation, SolverError> {
    let ctx = make_context(working_conductor(cat))?;
    let cat = cat.embed(ctx)?;
    let gram: Option<Gram> = gram
        .map(|g| {
            g.iter()
                .map(|(c, m)| Ok((*c, m.embed(ctx)?)))
                .collect::<Result<_, SolverError>>()
        })
        .transpose()?;
    let sys = build_constraints(&cat);
    let families = branch::branch_families(&cat, &sys)?;
    let raw = branch::branches(&families)?;
    let gauge_t = solve::gauge_transpose(&cat, &sys);

    let mut outcomes = Vec::new();
    let mut classes: Vec<CohomologyClass> = Vec::new();
    for (bi, mut br) in raw.into_iter().enumerate() {
        // rescale shapes to be isometries for the Gram form
        let mut non_unitary = None;
        let mut keys: Vec<usize> = br.shapes.keys().copied().collect();
        keys.sort();
        for q in keys {
            let ch = sys.unknowns[q].channel;
            let g = gram
                .as_ref()
                .and_then(|g| g.get(&ch))
                .cloned()
                .unwrap_or_else(|| ExactMatrix::identity(ctx, sys.unknowns[q].size));
            let k = &br.shapes[&q];
            match gram_factor(k, &g) {
                Some(c) if c.is_one() => {}
                Some(c) => match rational_sqrt(&c) {
                    Some(s) => {
                        let r = CycloNumber::from_rational(ctx, &(BigRational::one() / s));
                        br.shapes.insert(q, k.scale(&r));
                    }
                    None => {
                        return Err(SolverError::Unsupported(format!(
                            "shape norm {c} on {} is not a square",
                            branch::channel_name(&cat, ch)
                        )))
                    }
                },
                None => non_unitary = Some(branch::channel_name(&cat, ch)),
            }
        }
        if let (CoeffMode::Unitary, Some(ch)) = (mode, &non_unitary) {
            outcomes.push(BranchOutcome {
                branch: br,
                solution: None,
                dead: Some(format!("shape on {ch} is not unitary")),
                classes: Vec::new(),
            });
            continue;
        }
        let sol = solve::solve_branch(&cat, &sys, &br, &gauge_t)?;
        let mut ids = Vec::new();
        if sol.status == BranchStatus::Solved {
            for e in &sol.class_exponents {
                let rep = solve::assemble(&cat, &sys, &br, e, &|_| None)?;
                if !rep.coherence_defects(&cat).is_empty() {
                    return Err(SolverError::Internal(format!(
                        "representative in branch {bi} is not coherent"
                    )));
                }
                let invariants = solve::invariants_of(&sys, &br, &sol.invariants, &rep)?
                    .ok_or_else(|| {
                        SolverError::Internal("representative leaves its branch".into())
                    })?;
                ids.push(classes.len());
                classes.push(CohomologyClass {
                    branch: outcomes.len(),
                    invariants,
                    representative: rep,
                });
            }
        }
        let dead = match &sol.status {
            BranchStatus::Solved => None,
            BranchStatus::NotProportional(q) => Some(format!("sides not proportional at {q}")),
            BranchStatus::Inconsistent(q) => Some(format!("inconsistent: {q}")),
        };
        outcomes.push(BranchOutcome {
            branch: br,
            solution: Some(sol),
            dead,
            classes: ids,
        });
    }
    let group = group_structure(&sys, &outcomes, classes)?;
    Ok(Computation {
        name: cat.name.clone(),
        mode,
        conductor: ctx.conductor(),
        unknowns: sys.unknowns.len(),
        channels: sys.unknowns.iter().map(|u| u.channel).collect(),
        monomial_relations: sys.monomial.len(),
        block_equations: sys.matrix.len(),
        families,
        branches: outcomes,
        group,
        category: cat,
        system: sys,
    })
}

/// Class of an arbitrary tensor structure among the computed classes.
pub fn identify(
    sys: &ConstraintSystem,
    outcomes: &[BranchOutcome],
    classes: &[CohomologyClass],
    j: &TensorStructure,
) -> Result<Option<usize>, SolverError> {
    for (bi, o) in outcomes.iter().enumerate() {
        let Some(sol) = &o.solution else { continue };
        if let Some(inv) = solve::invariants_of(sys, &o.branch, &sol.invariants, j)? {
            return Ok(classes
                .iter()
                .position(|c| c.branch == bi && c.invariants == inv));
        }
    }
    Ok(None)
}

fn group_structure(
    sys: &ConstraintSystem,
    outcomes: &[BranchOutcome],
    classes: Vec<CohomologyClass>,
) -> Result<CohomologyGroup, SolverError> {
    let free_rank = outcomes
        .iter()
        .filter_map(|o| {
            o.solution
                .as_ref()
                .filter(|s| s.status == BranchStatus::Solved)
        })
        .map(|s| s.free_rank)
        .max()
        .unwrap_or(0);
    let n = classes.len();
    if n == 0 {
        return Err(SolverError::Internal(
            "no classes; the identity structure was not found".into(),
        ));
    }
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            let p = classes[a]
                .representative
                .product(&classes[b].representative)?;
            table[a][b] = identify(sys, outcomes, &classes, &p)?.ok_or_else(|| {
                SolverError::Internal(format!("product of classes {a} and {b} is not classified"))
            })?;
        }
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        .ok_or_else(|| SolverError::Internal("class table has no identity".into()))?;
    let g = FiniteGroup::from_table(
        "H2",
        table.clone(),
        (0..n).map(|i| (format!("c{i}"), i)).collect(),
    )?;
    if !g.is_abelian() {
        return Err(SolverError::Internal("class table is not abelian".into()));
    }
    let factors = abelian_invariants(&g)?;
    let presentation = AbelianGroupPresentation::from_cyclic_factors(free_rank, &factors);
    Ok(CohomologyGroup {
        classes,
        table,
        identity,
        free_rank,
        presentation,
    })
}
