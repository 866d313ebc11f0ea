use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::{FiniteGroup, GroupError};
use crate::cyclotomic::{CycloContext, CycloNumber};
use crate::linalg::{dual_basis, rref_nullspace, ExactMatrix};

/// A unitary representation given by one matrix per group element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Irrep {
    pub label: String,
    dim: usize,
    ctx: &'static CycloContext,
    mats: Vec<ExactMatrix>,
}

impl Irrep {
    /// Extends generator matrices to all elements by word evaluation.
    pub fn from_generators(
        group: &FiniteGroup,
        label: &str,
        ctx: &'static CycloContext,
        gens: &[ExactMatrix],
    ) -> Result<Self, GroupError> {
        let bad = |msg: String| GroupError::BadIrrep {
            label: label.to_string(),
            msg,
        };
        if gens.len() != group.generators().len() {
            return Err(bad(format!(
                "expected {} generator matrices, got {}",
                group.generators().len(),
                gens.len()
            )));
        }
        let dim = gens.first().map_or(1, ExactMatrix::rows);
        for g in gens {
            if g.rows() != dim || g.cols() != dim {
                return Err(bad("generator matrices must be square of equal size".into()));
            }
            if g.context().conductor() != ctx.conductor() {
                return Err(bad("generator matrix in the wrong cyclotomic field".into()));
            }
        }
        let mats = group
            .elements()
            .map(|g| {
                group
                    .word(g)
                    .iter()
                    .fold(ExactMatrix::identity(ctx, dim), |acc, &i| acc.mul(&gens[i]))
            })
            .collect();
        Ok(Irrep {
            label: label.to_string(),
            dim,
            ctx,
            mats,
        })
    }

    /// One-dimensional representation from its values.
    pub fn from_values(label: &str, values: Vec<CycloNumber>) -> Self {
        let ctx = values[0].context();
        Irrep {
            label: label.to_string(),
            dim: 1,
            ctx,
            mats: values.into_iter().map(ExactMatrix::scalar).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn matrix(&self, g: usize) -> &ExactMatrix {
        &self.mats[g]
    }

    pub fn character(&self, g: usize) -> CycloNumber {
        self.mats[g].trace()
    }

    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, GroupError> {
        let mats = self
            .mats
            .iter()
            .map(|m| m.embed(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Irrep {
            label: self.label.clone(),
            dim: self.dim,
            ctx: target,
            mats,
        })
    }
}

/// Outcome of [`validate_irrep`]; violations are listed, not thrown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepReport {
    pub label: String,
    pub homomorphism_failures: Vec<(usize, usize)>,
    pub unitarity_failures: Vec<usize>,
    pub identity_ok: bool,
    /// `<chi, chi>`; equals 1 exactly for an irreducible representation.
    pub character_norm: CycloNumber,
}

impl IrrepReport {
    pub fn is_ok(&self) -> bool {
        self.homomorphism_failures.is_empty()
            && self.unitarity_failures.is_empty()
            && self.identity_ok
            && self.character_norm.is_one()
    }

    pub fn summary(&self) -> String {
        if self.is_ok() {
            return format!("{}: ok", self.label);
        }
        let mut parts = Vec::new();
        if !self.homomorphism_failures.is_empty() {
            parts.push(format!(
                "homomorphism fails on {} pairs",
                self.homomorphism_failures.len()
            ));
        }
        if !self.unitarity_failures.is_empty() {
            parts.push(format!(
                "not unitary at {} elements",
                self.unitarity_failures.len()
            ));
        }
        if !self.identity_ok {
            parts.push("R(e) is not the identity".into());
        }
        if !self.character_norm.is_one() {
            parts.push(format!("reducible, <chi,chi> = {}", self.character_norm));
        }
        format!("{}: {}", self.label, parts.join("; "))
    }
}

pub fn validate_irrep(group: &FiniteGroup, rep: &Irrep) -> IrrepReport {
    let mut homomorphism_failures = Vec::new();
    for g in group.elements() {
        for h in group.elements() {
            if rep.matrix(g).mul(rep.matrix(h)) != *rep.matrix(group.mul(g, h)) {
                homomorphism_failures.push((g, h));
            }
        }
    }
    let unitarity_failures = group
        .elements()
        .filter(|&g| rep.matrix(g).adjoint() != *rep.matrix(group.inv(g)))
        .collect();
    let identity_ok = rep.matrix(group.identity()).is_identity();
    let mut acc = CycloNumber::zero(rep.ctx);
    for g in group.elements() {
        let c = rep.character(g);
        acc += &(&c * &c.conjugate());
    }
    let character_norm = &acc / &CycloNumber::from_int(rep.ctx, group.order() as i64);
    IrrepReport {
        label: rep.label.clone(),
        homomorphism_failures,
        unitarity_failures,
        identity_ok,
        character_norm,
    }
}

/// Multiplicities `N^{xy}_z` indexed by irrep position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionTable {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    n: Vec<u32>,
}

impl FusionTable {
    pub fn new(labels: Vec<String>, dims: Vec<usize>, n: Vec<u32>) -> Self {
        let k = labels.len();
        assert_eq!(n.len(), k * k * k, "fusion tensor size");
        FusionTable { labels, dims, n }
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> u32 {
        let k = self.labels.len();
        self.n[(x * k + y) * k + z]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Nonzero channels `z` of `x (x) y` with their multiplicities.
    pub fn channels(&self, x: usize, y: usize) -> Vec<(usize, u32)> {
        (0..self.rank())
            .map(|z| (z, self.get(x, y, z)))
            .filter(|(_, n)| *n > 0)
            .collect()
    }
}

pub fn fusion_table(group: &FiniteGroup, irreps: &[Irrep]) -> Result<FusionTable, GroupError> {
    let got: usize = irreps.iter().map(|r| r.dim * r.dim).sum();
    if got != group.order() {
        return Err(GroupError::NotExhaustive {
            got,
            order: group.order(),
        });
    }
    let ctx = irreps[0].ctx;
    let chars: Vec<Vec<CycloNumber>> = irreps
        .iter()
        .map(|r| group.elements().map(|g| r.character(g)).collect())
        .collect();
    let conj: Vec<Vec<CycloNumber>> = chars
        .iter()
        .map(|c| c.iter().map(CycloNumber::conjugate).collect())
        .collect();
    let order = CycloNumber::from_int(ctx, group.order() as i64);
    let k = irreps.len();
    let mut n = Vec::with_capacity(k * k * k);
    for x in 0..k {
        for y in 0..k {
            let xy: Vec<CycloNumber> = (0..group.order())
                .map(|g| &chars[x][g] * &chars[y][g])
                .collect();
            for zc in &conj {
                let mut acc = CycloNumber::zero(ctx);
                for (a, b) in xy.iter().zip(zc) {
                    acc += &(a * b);
                }
                let v = (&acc / &order)
                    .to_rational()
                    .filter(|q| q.is_integer())
                    .and_then(|q| q.to_integer().to_u32());
                n.push(v.ok_or_else(|| GroupError::BadIrrep {
                    label: irreps[x].label.clone(),
                    msg: "character inner product is not a nonnegative integer".into(),
                })?);
            }
        }
    }
    Ok(FusionTable::new(
        irreps.iter().map(|r| r.label.clone()).collect(),
        irreps.iter().map(|r| r.dim).collect(),
        n,
    ))
}

/// Basis of `Mor(z, x (x) y)` as `(d_x d_y) x d_z` matrices together with its dual family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntertwinerBasis {
    pub maps: Vec<ExactMatrix>,
    pub duals: Vec<ExactMatrix>,
}

impl IntertwinerBasis {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// Null space of `T z(g) - (x(g) (x) y(g)) T` over generators, flattening `T` column-major.
pub fn intertwiner_basis(
    group: &FiniteGroup,
    x: &Irrep,
    y: &Irrep,
    z: &Irrep,
) -> Result<IntertwinerBasis, GroupError> {
    let ctx = x.ctx;
    let m = x.dim * y.dim;
    let dz = z.dim;
    let unknowns = m * dz;
    let gens: Vec<usize> = group.generators().iter().map(|(_, g)| *g).collect();
    let mut rows: Vec<Vec<CycloNumber>> = Vec::new();
    for &g in &gens {
        let k = x.matrix(g).kron(y.matrix(g));
        let zg = z.matrix(g);
        // entry (r, c) of T z(g) - K T
        for c in 0..dz {
            for r in 0..m {
                let mut row = vec![CycloNumber::zero(ctx); unknowns];
                for j in 0..dz {
                    let v = &zg[(j, c)];
                    if !v.is_zero() {
                        row[j * m + r] += v;
                    }
                }
                for i in 0..m {
                    let v = &k[(r, i)];
                    if !v.is_zero() {
                        row[c * m + i] -= v;
                    }
                }
                rows.push(row);
            }
        }
    }
    let maps: Vec<ExactMatrix> = if rows.is_empty() {
        Vec::new()
    } else {
        let sys = ExactMatrix::from_rows(ctx, rows)?;
        rref_nullspace(&sys)
            .into_iter()
            .map(|v| {
                let mut t = ExactMatrix::zeros(ctx, m, dz);
                for c in 0..dz {
                    for r in 0..m {
                        t[(r, c)] = v[c * m + r].clone();
                    }
                }
                t
            })
            .collect()
    };
    for t in &maps {
        for g in group.elements() {
            if t.mul(z.matrix(g)) != x.matrix(g).kron(y.matrix(g)).mul(t) {
                return Err(GroupError::BadIrrep {
                    label: z.label.clone(),
                    msg: format!(
                        "intertwiner fails at element {g}; generator matrices inconsistent"
                    ),
                });
            }
        }
    }
    let duals = dual_basis(&maps)?;
    Ok(IntertwinerBasis { maps, duals })
}

/// A group with an exhaustive list of irreps, their fusion rules and all intertwiner bases.
#[derive(Debug, Clone)]
pub struct RepData {
    pub group: FiniteGroup,
    pub irreps: Vec<Irrep>,
    pub fusion: FusionTable,
    pub unit: usize,
    bases: BTreeMap<(usize, usize, usize), IntertwinerBasis>,
}

impl RepData {
    pub fn new(group: FiniteGroup, irreps: Vec<Irrep>) -> Result<Self, GroupError> {
        for r in &irreps {
            let report = validate_irrep(&group, r);
            if !report.is_ok() {
                return Err(GroupError::BadIrrep {
                    label: r.label.clone(),
                    msg: report.summary(),
                });
            }
        }
        let ctx = irreps[0].ctx;
        if irreps.iter().any(|r| r.ctx.conductor() != ctx.conductor()) {
            return Err(GroupError::BadIrrep {
                label: irreps[0].label.clone(),
                msg: "irreps must share one cyclotomic field".into(),
            });
        }
        let fusion = fusion_table(&group, &irreps)?;
        for a in 0..irreps.len() {
            for b in 0..a {
                let same = group
                    .elements()
                    .all(|g| irreps[a].character(g) == irreps[b].character(g));
                if same {
                    return Err(GroupError::BadIrrep {
                        label: irreps[a].label.clone(),
                        msg: format!("equivalent to {}", irreps[b].label),
                    });
                }
            }
        }
        let unit = irreps
            .iter()
            .position(|r| r.dim == 1 && group.elements().all(|g| r.matrix(g).is_identity()))
            .ok_or_else(|| GroupError::BadIrrep {
                label: "unit".into(),
                msg: "no trivial representation".into(),
            })?;
        let k = irreps.len();
        let mut bases = BTreeMap::new();
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    if fusion.get(x, y, z) == 0 {
                        continue;
                    }
                    let b = intertwiner_basis(&group, &irreps[x], &irreps[y], &irreps[z])?;
                    if b.len() != fusion.get(x, y, z) as usize {
                        return Err(GroupError::BadIrrep {
                            label: irreps[z].label.clone(),
                            msg: "intertwiner dimension differs from character multiplicity".into(),
                        });
                    }
                    bases.insert((x, y, z), b);
                }
            }
        }
        Ok(RepData {
            group,
            irreps,
            fusion,
            unit,
            bases,
        })
    }

    pub fn context(&self) -> &'static CycloContext {
        self.irreps[0].ctx
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.fusion.index_of(label)
    }

    pub fn basis(&self, x: usize, y: usize, z: usize) -> Option<&IntertwinerBasis> {
        self.bases.get(&(x, y, z))
    }

    /// Dual object: the irrep whose character is the complex conjugate.
    pub fn dual(&self, x: usize) -> usize {
        (0..self.irreps.len())
            .find(|&y| {
                self.group
                    .elements()
                    .all(|g| self.irreps[y].character(g) == self.irreps[x].character(g).conjugate())
            })
            .expect("exhaustive irrep list contains every dual")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::ctx;
    use crate::groups::parse_cycles;

    fn s3() -> (FiniteGroup, Vec<Irrep>) {
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
        let triv = Irrep::from_generators(&g, "triv", k, &[one(1), one(1)]).unwrap();
        let sign = Irrep::from_generators(&g, "sign", k, &[one(-1), one(1)]).unwrap();
        let a = ExactMatrix::parse(k, "0 c(3,2)\nc(3,1) 0").unwrap();
        let b = ExactMatrix::parse(k, "c(3,2) 0\n0 c(3,1)").unwrap();
        let two = Irrep::from_generators(&g, "two", k, &[a, b]).unwrap();
        (g, vec![triv, sign, two])
    }

    #[test]
    fn s3_irreps_validate() {
        let (g, irreps) = s3();
        for r in &irreps {
            let rep = validate_irrep(&g, r);
            assert!(rep.is_ok(), "{}", rep.summary());
        }
        let ft = fusion_table(&g, &irreps).unwrap();
        assert_eq!(ft.get(2, 2, 0), 1);
        assert_eq!(ft.get(2, 2, 1), 1);
        assert_eq!(ft.get(2, 2, 2), 1);
        assert_eq!(ft.get(1, 2, 2), 1);
        assert!(matches!(
            fusion_table(&g, &irreps[..2]),
            Err(GroupError::NotExhaustive { .. })
        ));
    }

    #[test]
    fn reducible_and_broken_reps_are_reported() {
        let (g, irreps) = s3();
        let k = ctx(3);
        let sum_gens: Vec<ExactMatrix> = vec![
            ExactMatrix::from_ints(k, &[&[1, 0], &[0, -1]]),
            ExactMatrix::identity(k, 2),
        ];
        let sum = Irrep::from_generators(&g, "triv+sign", k, &sum_gens).unwrap();
        let rep = validate_irrep(&g, &sum);
        assert!(rep.homomorphism_failures.is_empty());
        assert_eq!(rep.character_norm, CycloNumber::from_int(k, 2));
        assert!(!rep.is_ok());
        let bad_gens = vec![
            ExactMatrix::from_ints(k, &[&[0, 1], &[-1, 0]]),
            irreps[2].matrix(g.generators()[1].1).clone(),
        ];
        let bad = Irrep::from_generators(&g, "bad", k, &bad_gens).unwrap();
        assert!(!validate_irrep(&g, &bad).homomorphism_failures.is_empty());
    }

    #[test]
    fn intertwiners_of_s3() {
        let (g, irreps) = s3();
        let data = RepData::new(g, irreps).unwrap();
        let b = data.basis(2, 2, 2).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.duals[0].mul(&b.maps[0]).is_identity());
        assert!(data.basis(1, 2, 0).is_none());
        assert_eq!(data.dual(2), 2);
        assert_eq!(data.unit, 0);
    }
}
