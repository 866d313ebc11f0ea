//! Abelian groups and two independent oracles for their Schur multipliers.

use num_bigint::BigInt;
use num_integer::Integer;

use super::{FiniteGroup, GroupError, Irrep};
use crate::cyclotomic::{make_context, CycloNumber};
use crate::linalg::{
    congruence_kernel, lattice_coordinates, quotient_group, AbelianGroupPresentation, IntMatrix,
};

/// `Z/n_1 x ... x Z/n_k` with generators `g0, g1, ...` and its characters.
///
/// Characters are labelled `chi` followed by the exponent vector, digits
/// separated by `_` when some factor exceeds 10.
pub fn abelian_group(name: &str, factors: &[u64]) -> Result<(FiniteGroup, Vec<Irrep>), GroupError> {
    let factors: Vec<usize> = factors.iter().map(|&f| f as usize).collect();
    let order: usize = factors.iter().product();
    let coords = |mut x: usize| -> Vec<usize> {
        let mut c = vec![0; factors.len()];
        for i in (0..factors.len()).rev() {
            c[i] = x % factors[i];
            x /= factors[i];
        }
        c
    };
    let index = |c: &[usize]| c.iter().zip(&factors).fold(0, |acc, (v, f)| acc * f + v);
    let table: Vec<Vec<usize>> = (0..order)
        .map(|a| {
            let ca = coords(a);
            (0..order)
                .map(|b| {
                    let s: Vec<usize> = coords(b)
                        .iter()
                        .zip(&ca)
                        .zip(&factors)
                        .map(|((x, y), f)| (x + y) % f)
                        .collect();
                    index(&s)
                })
                .collect()
        })
        .collect();
    let generators = (0..factors.len())
        .map(|i| {
            let mut c = vec![0; factors.len()];
            c[i] = 1 % factors[i];
            (format!("g{i}"), index(&c))
        })
        .collect();
    let group = FiniteGroup::from_table(name, table, generators)?;
    let conductor = factors.iter().fold(1usize, |acc, f| acc.lcm(f)) as u32;
    let ctx = make_context(conductor)?;
    let wide = factors.iter().any(|&f| f > 10);
    let irreps = (0..order)
        .map(|a| {
            let ca = coords(a);
            let label = if wide {
                format!(
                    "chi{}",
                    ca.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("_")
                )
            } else {
                format!(
                    "chi{}",
                    ca.iter().map(|v| v.to_string()).collect::<String>()
                )
            };
            let values = (0..order)
                .map(|b| {
                    let cb = coords(b);
                    let k: usize = (0..factors.len())
                        .map(|i| ca[i] * cb[i] * (conductor as usize / factors[i]))
                        .sum();
                    CycloNumber::root(ctx, k as i64)
                })
                .collect();
            Irrep::from_values(&label, values)
        })
        .collect();
    Ok((group, irreps))
}

/// Relations `e_a + e_b - e_{ab}` presenting a finite abelian group on its elements.
fn table_relations(group: &FiniteGroup) -> IntMatrix {
    let n = group.order();
    let mut rows = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in a..n {
            let mut r = vec![0i64; n];
            r[a] += 1;
            r[b] += 1;
            r[group.mul(a, b)] -= 1;
            rows.push(r);
        }
    }
    IntMatrix::from_rows(&rows)
}

/// Invariant factors of an abelian group given by its table.
pub fn abelian_invariants(group: &FiniteGroup) -> Result<Vec<u64>, GroupError> {
    if !group.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    Ok(quotient_group(&table_relations(group), group.order()).torsion)
}

/// `H^2(A, C^*) = (+)_{i<j} Z/gcd(n_i, n_j)` for `A = Z/n_1 x ... x Z/n_k`.
pub fn schur_multiplier(invariants: &[u64]) -> AbelianGroupPresentation {
    let mut factors = Vec::new();
    for i in 0..invariants.len() {
        for j in i + 1..invariants.len() {
            factors.push(invariants[i].gcd(&invariants[j]));
        }
    }
    AbelianGroupPresentation::from_cyclic_factors(0, &factors)
}

pub const H2_BRUTE_MAX_ORDER: usize = 16;

/// Normalized `(1/m)Z/Z`-valued 2-cocycles modulo coboundaries of `Q/Z`-valued cochains.
///
/// Cochains are scaled to integers mod `M = m exp(A)`, which is enough room for
/// every coboundary between two such cocycles. For `m` a multiple of `exp(A)`
/// every class of `H^2(A, Q/Z) = H^2(A, C^*)` has a bicharacter representative
/// with values in `(1/m)Z/Z`, so the result is the Schur multiplier.
pub fn h2_brute(group: &FiniteGroup, m: u64) -> Result<AbelianGroupPresentation, GroupError> {
    if !group.is_abelian() {
        return Err(GroupError::NotAbelian);
    }
    let n = group.order();
    if n > H2_BRUTE_MAX_ORDER {
        return Err(GroupError::SizeGuard(format!(
            "order {n} exceeds {H2_BRUTE_MAX_ORDER}"
        )));
    }
    let e = group
        .elements()
        .map(|g| group.element_order(g) as u64)
        .fold(1, |a, b| a.lcm(&b));
    if m == 0 || !m.is_multiple_of(e) {
        return Err(GroupError::SizeGuard(format!(
            "modulus {m} is not a multiple of the exponent {e}"
        )));
    }
    let id = group.identity();
    let nontriv: Vec<usize> = group.elements().filter(|&g| g != id).collect();
    let k = nontriv.len();
    if k == 0 {
        return Ok(AbelianGroupPresentation::trivial());
    }
    let pos = |g: usize| nontriv.iter().position(|&x| x == g);
    let pair = |a: usize, b: usize| -> Option<usize> { Some(pos(a)? * k + pos(b)?) };

    // (df)(a,b,c) = f(b,c) - f(ab,c) + f(a,bc) - f(a,b)
    let mut d2 = Vec::new();
    for &a in &nontriv {
        for &b in &nontriv {
            for &c in &nontriv {
                let mut r = vec![0i64; k * k];
                let mut add = |p: Option<usize>, s: i64| {
                    if let Some(p) = p {
                        r[p] += s;
                    }
                };
                add(pair(b, c), 1);
                add(pair(group.mul(a, b), c), -1);
                add(pair(a, group.mul(b, c)), 1);
                add(pair(a, b), -1);
                if r.iter().any(|&v| v != 0) {
                    d2.push(r);
                }
            }
        }
    }
    // (dg)(a,b) = g(a) + g(b) - g(ab)
    let mut d1 = Vec::new();
    for &a in &nontriv {
        for &b in &nontriv {
            let mut r = vec![0i64; k];
            r[pos(a).expect("nontrivial")] += 1;
            r[pos(b).expect("nontrivial")] += 1;
            if let Some(p) = pos(group.mul(a, b)) {
                r[p] -= 1;
            }
            d1.push(r);
        }
    }
    let d1 = IntMatrix::from_rows(&d1);
    let d2 = if d2.is_empty() {
        IntMatrix::zeros(0, k * k)
    } else {
        IntMatrix::from_rows(&d2)
    };
    let big_m = BigInt::from(m * e);
    let be = BigInt::from(e);

    let cocycles = congruence_kernel(&d2, &BigInt::from(m));
    let zlat = IntMatrix::from_big_rows(
        k * k,
        cocycles
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|x| x * &be).collect())
            .collect(),
    );
    let liftable = congruence_kernel(&d1, &be);
    let mut blat: Vec<Vec<BigInt>> = (0..liftable.rows())
        .map(|i| d1.mul_vec(liftable.row(i)))
        .collect();
    for i in 0..k * k {
        let mut r = vec![BigInt::from(0); k * k];
        r[i] = big_m.clone();
        blat.push(r);
    }
    let blat = IntMatrix::from_big_rows(k * k, blat);
    let coords = lattice_coordinates(&zlat, &blat).ok_or_else(|| {
        GroupError::SizeGuard("coboundary lattice escapes the cocycle lattice".into())
    })?;
    Ok(quotient_group(&coords, zlat.rows()))
}
