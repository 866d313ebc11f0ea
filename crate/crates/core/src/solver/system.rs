//! Coherence constraints of a tensor structure on the identity functor.
//!
//! For a tuple `(x, y, z; w)` the left trees of `Mor(w, x y z)` carry
//! `(+)_u J^{xy}_u (x) J^{uz}_w` and the right trees `(+)_v J^{yz}_v (x) J^{xv}_w`.
//! With `Phi = F^T` coherence reads `Phi L = R Phi`, which splits into one
//! equation per pair of blocks `(v, u)`:
//! `Phi_vu (J^{xy}_u (x) J^{uz}_w) = (J^{yz}_v (x) J^{xv}_w) Phi_vu`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::fusion::{Quad, SkeletalCategory};
use crate::linalg::ExactMatrix;

use super::structure::Channel;

/// One side factor of a block equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// A unit channel, fixed to `1`.
    Fixed,
    Unknown(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub channel: Channel,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEquation {
    pub quad: Quad,
    pub u: usize,
    pub v: usize,
    /// Rows are right trees through `v`, columns left trees through `u`.
    pub phi: ExactMatrix,
    /// `J^{xy}_u`, `J^{uz}_w`.
    pub left: [Factor; 2],
    /// `J^{yz}_v`, `J^{xv}_w`.
    pub right: [Factor; 2],
}

/// `prod_i m_i^{e_i} = 1`, from a block equation whose factors are all scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialRelation {
    pub exponents: Vec<(usize, i64)>,
    pub quad: Quad,
}

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub unknowns: Vec<Unknown>,
    pub index: HashMap<Channel, usize>,
    pub monomial: Vec<MonomialRelation>,
    /// Block equations involving at least one multiplicity channel.
    pub matrix: Vec<BlockEquation>,
}

impl ConstraintSystem {
    pub fn factor(&self, unit: usize, c: Channel) -> Factor {
        if c.0 == unit || c.1 == unit {
            Factor::Fixed
        } else {
            Factor::Unknown(self.index[&c])
        }
    }

    pub fn factor_size(&self, f: Factor) -> usize {
        match f {
            Factor::Fixed => 1,
            Factor::Unknown(i) => self.unknowns[i].size,
        }
    }

    pub fn matrix_unknowns(&self) -> Vec<usize> {
        (0..self.unknowns.len())
            .filter(|&i| self.unknowns[i].size > 1)
            .collect()
    }
}

/// Sparse exponent vector of `left / right`, dropping cancelled terms.
fn exponents(left: &[Factor; 2], right: &[Factor; 2]) -> Vec<(usize, i64)> {
    let mut e: Vec<(usize, i64)> = Vec::new();
    let mut add = |f: &Factor, s: i64| {
        if let Factor::Unknown(i) = f {
            match e.iter_mut().find(|(j, _)| j == i) {
                Some(t) => t.1 += s,
                None => e.push((*i, s)),
            }
        }
    };
    left.iter().for_each(|f| add(f, 1));
    right.iter().for_each(|f| add(f, -1));
    e.retain(|(_, v)| *v != 0);
    e.sort();
    e
}

/// All block equations of `cat`, with unit channels fixed to the identity.
pub fn build_constraints(cat: &SkeletalCategory) -> ConstraintSystem {
    let k = cat.rank();
    let unit = cat.unit;
    let mut unknowns = Vec::new();
    let mut index = HashMap::new();
    for x in 0..k {
        for y in 0..k {
            for z in 0..k {
                let n = cat.n(x, y, z);
                if n > 0 && x != unit && y != unit {
                    index.insert((x, y, z), unknowns.len());
                    unknowns.push(Unknown {
                        channel: (x, y, z),
                        size: n,
                    });
                }
            }
        }
    }
    let mut sys = ConstraintSystem {
        unknowns,
        index,
        monomial: Vec::new(),
        matrix: Vec::new(),
    };
    let quads: Vec<Quad> = (0..k)
        .flat_map(|x| {
            (0..k).flat_map(move |y| (0..k).flat_map(move |z| (0..k).map(move |w| (x, y, z, w))))
        })
        .filter(|&q| cat.f(q).is_some())
        .collect();
    let blocks: Vec<Vec<BlockEquation>> = quads
        .par_iter()
        .map(|&q| quad_blocks(cat, &sys, q))
        .collect();
    for eq in blocks.into_iter().flatten() {
        let scalar = eq
            .left
            .iter()
            .chain(&eq.right)
            .all(|&f| sys.factor_size(f) == 1);
        if scalar {
            let e = exponents(&eq.left, &eq.right);
            if !e.is_empty() {
                sys.monomial.push(MonomialRelation {
                    exponents: e,
                    quad: eq.quad,
                });
            }
        } else {
            sys.matrix.push(eq);
        }
    }
    sys
}

fn quad_blocks(cat: &SkeletalCategory, sys: &ConstraintSystem, q: Quad) -> Vec<BlockEquation> {
    let (x, y, z, w) = q;
    let k = cat.rank();
    let f = cat.f(q).expect("filtered");
    let mut left_blocks = Vec::new();
    let mut start = 0;
    for u in 0..k {
        let size = cat.n(x, y, u) * cat.n(u, z, w);
        if size > 0 {
            left_blocks.push((u, start, size));
        }
        start += size;
    }
    let mut right_blocks = Vec::new();
    start = 0;
    for v in 0..k {
        let size = cat.n(y, z, v) * cat.n(x, v, w);
        if size > 0 {
            right_blocks.push((v, start, size));
        }
        start += size;
    }
    let ctx = cat.context();
    let mut out = Vec::new();
    for &(u, ls, ln) in &left_blocks {
        for &(v, rs, rn) in &right_blocks {
            let mut phi = ExactMatrix::zeros(ctx, rn, ln);
            for i in 0..rn {
                for j in 0..ln {
                    phi[(i, j)] = f[(ls + j, rs + i)].clone();
                }
            }
            if phi.is_zero() {
                continue;
            }
            out.push(BlockEquation {
                quad: q,
                u,
                v,
                phi,
                left: [
                    sys.factor(cat.unit, (x, y, u)),
                    sys.factor(cat.unit, (u, z, w)),
                ],
                right: [
                    sys.factor(cat.unit, (y, z, v)),
                    sys.factor(cat.unit, (x, v, w)),
                ],
            });
        }
    }
    out
}
