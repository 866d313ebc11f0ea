use std::collections::BTreeMap;

use crate::cyclotomic::{CycloContext, CycloNumber};
use crate::fusion::{Quad, SkeletalCategory};
use crate::linalg::ExactMatrix;

use super::SolverError;

pub type Channel = (usize, usize, usize);

/// Invertible matrices `J^{xy}_z` on every fusion channel, acting on the
/// chosen basis of `Mor(z, x y)` by `J S_k = sum_i J[i][k] S_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorStructure {
    ctx: &'static CycloContext,
    channels: BTreeMap<Channel, ExactMatrix>,
}

impl TensorStructure {
    pub fn identity(cat: &SkeletalCategory) -> Self {
        let ctx = cat.context();
        let mut channels = BTreeMap::new();
        let k = cat.rank();
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    let n = cat.n(x, y, z);
                    if n > 0 {
                        channels.insert((x, y, z), ExactMatrix::identity(ctx, n));
                    }
                }
            }
        }
        TensorStructure { ctx, channels }
    }

    /// Checks that the channel set and sizes match the category.
    pub fn new(
        cat: &SkeletalCategory,
        channels: BTreeMap<Channel, ExactMatrix>,
    ) -> Result<Self, SolverError> {
        let shape = Self::identity(cat);
        if channels.len() != shape.channels.len() {
            return Err(SolverError::Shape(
                "channel set differs from the fusion rules".into(),
            ));
        }
        let ctx = channels
            .values()
            .next()
            .map_or(cat.context(), ExactMatrix::context);
        for (c, m) in &channels {
            let n = shape.channels.get(c).map(ExactMatrix::rows);
            if n != Some(m.rows()) || !m.is_square() || m.context() != ctx {
                return Err(SolverError::Shape(format!("channel {c:?}")));
            }
            if !m.is_invertible() {
                return Err(SolverError::Shape(format!("channel {c:?} is singular")));
            }
        }
        Ok(TensorStructure { ctx, channels })
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn get(&self, c: Channel) -> Option<&ExactMatrix> {
        self.channels.get(&c)
    }

    pub fn channels(&self) -> impl Iterator<Item = (&Channel, &ExactMatrix)> {
        self.channels.iter()
    }

    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, SolverError> {
        let channels = self
            .channels
            .iter()
            .map(|(c, m)| Ok((*c, m.embed(target)?)))
            .collect::<Result<_, SolverError>>()?;
        Ok(TensorStructure {
            ctx: target,
            channels,
        })
    }

    /// Channel-wise product, the composition `J_self J_other`.
    pub fn product(&self, other: &Self) -> Result<Self, SolverError> {
        let (a, b) = common(self, other)?;
        let channels = a
            .channels
            .iter()
            .map(|(c, m)| (*c, m.mul(&b.channels[c])))
            .collect();
        Ok(TensorStructure {
            ctx: a.ctx,
            channels,
        })
    }

    pub fn inverse(&self) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|(c, m)| (*c, m.inverse().expect("channels are invertible")))
            .collect();
        TensorStructure {
            ctx: self.ctx,
            channels,
        }
    }

    /// `J^{xy}_z -> c_x c_y c_z^{-1} J^{xy}_z`.
    pub fn gauge(&self, c: &[CycloNumber]) -> Result<Self, SolverError> {
        let inv = c
            .iter()
            .map(CycloNumber::inverse)
            .collect::<Result<Vec<_>, _>>()?;
        let channels = self
            .channels
            .iter()
            .map(|(&(x, y, z), m)| ((x, y, z), m.scale(&(&(&c[x] * &c[y]) * &inv[z]))))
            .collect();
        Ok(TensorStructure {
            ctx: self.ctx,
            channels,
        })
    }

    /// Unit channels that are not the identity.
    pub fn normalization_defects(&self, unit: usize) -> Vec<Channel> {
        self.channels
            .iter()
            .filter(|((x, y, _), m)| (*x == unit || *y == unit) && !m.is_identity())
            .map(|(c, _)| *c)
            .collect()
    }

    /// Tuples where `F^T (J (x) J)_left != (J (x) J)_right F^T`, computed on full matrices.
    pub fn coherence_defects(&self, cat: &SkeletalCategory) -> Vec<Quad> {
        let ctx = self.ctx;
        let Ok(cat) = cat.embed(ctx) else {
            return vec![(usize::MAX, 0, 0, 0)];
        };
        let k = cat.rank();
        let mut bad = Vec::new();
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    for w in 0..k {
                        let q = (x, y, z, w);
                        let Some(f) = cat.f(q) else { continue };
                        let mut left = Vec::new();
                        for u in 0..k {
                            if let (Some(a), Some(b)) = (self.get((x, y, u)), self.get((u, z, w))) {
                                left.push(a.kron(b));
                            }
                        }
                        let mut right = Vec::new();
                        for v in 0..k {
                            if let (Some(a), Some(b)) = (self.get((y, z, v)), self.get((x, v, w))) {
                                right.push(a.kron(b));
                            }
                        }
                        let l = ExactMatrix::direct_sum(ctx, &left);
                        let r = ExactMatrix::direct_sum(ctx, &right);
                        let phi = f.transpose();
                        if phi.mul(&l) != r.mul(&phi) {
                            bad.push(q);
                        }
                    }
                }
            }
        }
        bad
    }
}

fn common(
    a: &TensorStructure,
    b: &TensorStructure,
) -> Result<(TensorStructure, TensorStructure), SolverError> {
    if a.ctx == b.ctx {
        return Ok((a.clone(), b.clone()));
    }
    let n = num_integer::lcm(a.ctx.conductor(), b.ctx.conductor());
    let ctx = crate::cyclotomic::make_context(n)?;
    Ok((a.embed(ctx)?, b.embed(ctx)?))
}
