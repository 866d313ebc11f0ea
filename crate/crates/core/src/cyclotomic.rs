//! Exact arithmetic in the cyclotomic field Q(zeta_N).
//!
//! Elements are stored in the power basis `1, z, ..., z^(phi(N)-1)` reduced
//! modulo the N-th cyclotomic polynomial, with integer numerators over one
//! positive common denominator. The reduced form is canonical, so structural
//! equality is field equality.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("cyclotomic context mismatch: conductor {0} vs {1}")]
    ContextMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot embed conductor {from} into conductor {to}")]
    BadEmbedding { from: u32, to: u32 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Conductor together with the minimal polynomial of a primitive N-th root of unity.
#[derive(Debug)]
pub struct CycloContext {
    conductor: u32,
    /// Coefficients of Phi_N, lowest degree first; monic.
    phi: Vec<BigInt>,
    /// `x^(d + i) mod Phi_N` for `i in 0..d-1`, where d = deg Phi_N.
    high_powers: Vec<Vec<BigInt>>,
    /// `x^k mod Phi_N` for `k in 0..N`.
    roots: Vec<Vec<BigInt>>,
}

impl CycloContext {
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Euler totient of the conductor.
    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.phi
    }
}

impl PartialEq for CycloContext {
    fn eq(&self, other: &Self) -> bool {
        self.conductor == other.conductor
    }
}

impl Eq for CycloContext {}

impl Hash for CycloContext {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.conductor.hash(state);
    }
}

fn registry() -> &'static Mutex<HashMap<u32, &'static CycloContext>> {
    static REG: OnceLock<Mutex<HashMap<u32, &'static CycloContext>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Returns the (interned) context for conductor `n`.
pub fn make_context(n: u32) -> Result<&'static CycloContext, CycloError> {
    if n == 0 {
        return Err(CycloError::ZeroConductor);
    }
    let mut reg = registry().lock().expect("cyclotomic registry poisoned");
    if let Some(ctx) = reg.get(&n) {
        return Ok(ctx);
    }
    let ctx: &'static CycloContext = Box::leak(Box::new(build_context(n)));
    reg.insert(n, ctx);
    Ok(ctx)
}

/// Panicking shorthand for [`make_context`] with a literal conductor.
pub fn ctx(n: u32) -> &'static CycloContext {
    make_context(n).expect("conductor must be positive")
}

fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = exact_div_monic(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut q = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
        q[i] = c;
    }
    debug_assert!(
        rem.iter().all(|c| c.is_zero()),
        "inexact cyclotomic division"
    );
    q
}

fn build_context(n: u32) -> CycloContext {
    let phi = cyclotomic_poly(n);
    let d = phi.len() - 1;
    // Reduce x^k for k up to max(2d - 2, n - 1).
    let top = (2 * d).max(n as usize + 1);
    let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(top);
    let mut cur = vec![BigInt::zero(); d];
    cur[0] = BigInt::one();
    if d == 0 {
        unreachable!("cyclotomic polynomials have positive degree");
    }
    for _ in 0..top {
        powers.push(cur.clone());
        // multiply by x
        let carry = cur[d - 1].clone();
        for i in (1..d).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigInt::zero();
        if !carry.is_zero() {
            for i in 0..d {
                cur[i] -= &carry * &phi[i];
            }
        }
    }
    let high_powers = (0..d.saturating_sub(1))
        .map(|i| powers[d + i].clone())
        .collect();
    let roots = (0..n as usize).map(|k| powers[k].clone()).collect();
    CycloContext {
        conductor: n,
        phi,
        high_powers,
        roots,
    }
}

/// An exact element of Q(zeta_N).
#[derive(Clone)]
pub struct CycloNumber {
    ctx: &'static CycloContext,
    num: Vec<BigInt>,
    den: BigInt,
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.conductor == other.ctx.conductor && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycloNumber {}

impl Hash for CycloNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.conductor.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl CycloNumber {
    pub fn zero(ctx: &'static CycloContext) -> Self {
        CycloNumber {
            ctx,
            num: vec![BigInt::zero(); ctx.degree()],
            den: BigInt::one(),
        }
    }

    pub fn one(ctx: &'static CycloContext) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &'static CycloContext, v: i64) -> Self {
        let mut num = vec![BigInt::zero(); ctx.degree()];
        num[0] = BigInt::from(v);
        CycloNumber {
            ctx,
            num,
            den: BigInt::one(),
        }
    }

    pub fn from_rational(ctx: &'static CycloContext, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); ctx.degree()];
        num[0] = q.numer().clone();
        let mut out = CycloNumber {
            ctx,
            num,
            den: q.denom().clone(),
        };
        out.normalize();
        out
    }

    pub fn from_ratio(ctx: &'static CycloContext, p: i64, q: i64) -> Self {
        Self::from_rational(ctx, &BigRational::new(p.into(), q.into()))
    }

    /// Builds an element from rational power-basis coefficients (reducing if longer than phi(N)).
    pub fn from_coeffs(ctx: &'static CycloContext, coeffs: &[BigRational]) -> Self {
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut out = CycloNumber {
            ctx,
            num: reduce_poly(ctx, ints),
            den,
        };
        out.normalize();
        out
    }

    /// `zeta_N^k`, with k reduced modulo N.
    pub fn root(ctx: &'static CycloContext, k: i64) -> Self {
        let n = ctx.conductor as i64;
        let k = k.rem_euclid(n) as usize;
        CycloNumber {
            ctx,
            num: ctx.roots[k].clone(),
            den: BigInt::one(),
        }
    }

    pub fn context(&self) -> &'static CycloContext {
        self.ctx
    }

    pub fn conductor(&self) -> u32 {
        self.ctx.conductor
    }

    /// Rational power-basis coefficients.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<(), CycloError> {
        if self.ctx.conductor != other.ctx.conductor {
            Err(CycloError::ContextMismatch(
                self.ctx.conductor,
                other.ctx.conductor,
            ))
        } else {
            Ok(())
        }
    }

    pub fn arith(a: &Self, b: &Self, op: ArithOp) -> Result<Self, CycloError> {
        a.check_ctx(b)?;
        Ok(match op {
            ArithOp::Add => a.add_impl(b),
            ArithOp::Sub => a.sub_impl(b),
            ArithOp::Mul => a.mul_impl(b),
            ArithOp::Div => {
                let inv = b.inverse()?;
                a.mul_impl(&inv)
            }
        })
    }

    fn add_impl(&self, other: &Self) -> Self {
        let num = if self.den == other.den {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| a + b)
                .collect()
        } else {
            self.num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| a * &other.den + b * &self.den)
                .collect()
        };
        let den = if self.den == other.den {
            self.den.clone()
        } else {
            &self.den * &other.den
        };
        let mut out = CycloNumber {
            ctx: self.ctx,
            num,
            den,
        };
        out.normalize();
        out
    }

    fn sub_impl(&self, other: &Self) -> Self {
        self.add_impl(&other.neg_impl())
    }

    fn neg_impl(&self) -> Self {
        CycloNumber {
            ctx: self.ctx,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ctx);
        }
        let d = self.ctx.degree();
        if d == 1 {
            let mut out = CycloNumber {
                ctx: self.ctx,
                num: vec![&self.num[0] * &other.num[0]],
                den: &self.den * &other.den,
            };
            out.normalize();
            return out;
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut out = CycloNumber {
            ctx: self.ctx,
            num: reduce_poly(self.ctx, prod),
            den: &self.den * &other.den,
        };
        out.normalize();
        out
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Phi_N.
    pub fn inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        let a: Vec<BigRational> = self.coeffs();
        let phi: Vec<BigRational> = self
            .ctx
            .phi
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let s = poly_inverse_mod(&a, &phi);
        Ok(Self::from_coeffs(self.ctx, &s))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            base = base.mul_impl(&base);
            e >>= 1;
        }
        acc
    }

    /// Image under zeta -> zeta^j for j coprime to N.
    pub fn galois(&self, j: i64) -> Self {
        let mut acc = vec![BigInt::zero(); self.ctx.degree()];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (i as i64 * j).rem_euclid(self.ctx.conductor as i64) as usize;
            for (t, r) in self.ctx.roots[k].iter().enumerate() {
                if !r.is_zero() {
                    acc[t] += c * r;
                }
            }
        }
        let mut out = CycloNumber {
            ctx: self.ctx,
            num: acc,
            den: self.den.clone(),
        };
        out.normalize();
        out
    }

    /// Complex conjugation, zeta -> zeta^(N-1).
    pub fn conjugate(&self) -> Self {
        self.galois(-1)
    }

    /// Numeric embedding with zeta -> exp(2 pi i / N). Diagnostics only.
    pub fn to_float(&self) -> Complex64 {
        let n = self.ctx.conductor as f64;
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * i as f64 / n;
            acc += Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), angle);
        }
        acc / den
    }

    /// Re-expresses this element in a context whose conductor is a multiple of ours.
    pub fn embed(&self, target: &'static CycloContext) -> Result<Self, CycloError> {
        let (from, to) = (self.ctx.conductor, target.conductor);
        if to % from != 0 {
            return Err(CycloError::BadEmbedding { from, to });
        }
        if from == to {
            return Ok(self.clone());
        }
        let step = (to / from) as usize;
        let mut acc = vec![BigInt::zero(); target.degree()];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (i * step) % to as usize;
            for (t, r) in target.roots[k].iter().enumerate() {
                if !r.is_zero() {
                    acc[t] += c * r;
                }
            }
        }
        let mut out = CycloNumber {
            ctx: target,
            num: acc,
            den: self.den.clone(),
        };
        out.normalize();
        Ok(out)
    }

    /// If this is a root of unity, returns its argument as a fraction of a full turn in [0, 1).
    pub fn root_of_unity_exponent(&self) -> Option<Ratio<i64>> {
        if !self.den.is_one() {
            return None;
        }
        let n = self.ctx.conductor as i64;
        for k in 0..n {
            let r = &self.ctx.roots[k as usize];
            if &self.num == r {
                return Some(Ratio::new(k, n));
            }
            if self.num.iter().zip(r).all(|(a, b)| a == &-b) {
                let q = Ratio::new(2 * k + n, 2 * n);
                return Some(q - q.floor());
            }
        }
        None
    }

    /// `exp(2 pi i q)` if it lies in this field.
    pub fn from_root_exponent(ctx: &'static CycloContext, q: Ratio<i64>) -> Option<Self> {
        let q = q - q.floor();
        let (a, b) = (*q.numer(), *q.denom());
        let n = ctx.conductor as i64;
        if n % b == 0 {
            return Some(Self::root(ctx, a * (n / b)));
        }
        if n % 2 == 1 && (2 * n) % b == 0 {
            let e = a * (2 * n / b);
            return Some(if e % 2 == 0 {
                Self::root(ctx, e / 2)
            } else {
                -Self::root(ctx, (e + n) / 2)
            });
        }
        None
    }

    pub fn parse(ctx: &'static CycloContext, src: &str) -> Result<Self, CycloError> {
        let mut p = Parser {
            ctx,
            src: src.as_bytes(),
            pos: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(v)
    }
}

fn reduce_poly(ctx: &'static CycloContext, mut p: Vec<BigInt>) -> Vec<BigInt> {
    let d = ctx.degree();
    if p.len() <= d {
        p.resize(d, BigInt::zero());
        return p;
    }
    // Long division by the monic Phi_N for anything past the precomputed range.
    let extra = p.len() - d;
    if extra > ctx.high_powers.len() {
        for i in (d..p.len()).rev() {
            let c = std::mem::take(&mut p[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                p[i - d + j] -= &c * &ctx.phi[j];
            }
        }
        p.truncate(d);
        return p;
    }
    let mut out: Vec<BigInt> = p[..d].to_vec();
    for (i, c) in p[d..].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (t, r) in ctx.high_powers[i].iter().enumerate() {
            if !r.is_zero() {
                out[t] += c * r;
            }
        }
    }
    out
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (vec![BigRational::zero()], rem);
    }
    let mut q = vec![BigRational::zero(); rem.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[i + j] -= &c * bc;
        }
        q[i] = c;
    }
    rem.truncate(db.max(1));
    poly_trim(&mut rem);
    poly_trim(&mut q);
    (q, rem)
}

/// s with s*a = 1 mod m, for a coprime to m.
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 is a nonzero constant gcd
    let g = r0[0].clone();
    s0.iter().map(|c| c / &g).collect()
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                write!(f, "c({},{})", self.ctx.conductor, i)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl<'a> $tr<&'a CycloNumber> for &'a CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &'a CycloNumber) -> CycloNumber {
                if let Err(e) = self.check_ctx(rhs) {
                    panic!("{e}");
                }
                self.$imp(rhs)
            }
        }
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &'a CycloNumber) -> CycloNumber {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl<'a> Div<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn div(self, rhs: &'a CycloNumber) -> CycloNumber {
        CycloNumber::arith(self, rhs, ArithOp::Div).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Div<CycloNumber> for CycloNumber {
    type Output = CycloNumber;
    fn div(self, rhs: CycloNumber) -> CycloNumber {
        &self / &rhs
    }
}

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        self.neg_impl()
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        self.neg_impl()
    }
}

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&CycloNumber> for CycloNumber {
    fn mul_assign(&mut self, rhs: &CycloNumber) {
        *self = &*self * rhs;
    }
}

struct Parser<'a> {
    ctx: &'static CycloContext,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CycloError {
        CycloError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), CycloError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<CycloNumber, CycloError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<CycloNumber, CycloError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    acc = CycloNumber::arith(&acc, &d, ArithOp::Div).map_err(|_| {
                        CycloError::Parse {
                            pos: at,
                            msg: "division by zero".into(),
                        }
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<CycloNumber, CycloError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn integer(&mut self) -> Result<BigInt, CycloError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos])
            .map_err(|_| self.err("invalid utf-8"))?;
        s.parse::<BigInt>().map_err(|_| CycloError::Parse {
            pos: start,
            msg: "expected integer".into(),
        })
    }

    fn atom(&mut self) -> Result<CycloNumber, CycloError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b'c') => {
                self.pos += 1;
                self.expect(b'(')?;
                let at = self.pos;
                let m = self.integer()?;
                self.expect(b',')?;
                let k = self.integer()?;
                self.expect(b')')?;
                let m = m.to_u32().filter(|m| *m > 0).ok_or(CycloError::Parse {
                    pos: at,
                    msg: "root order must be a positive integer".into(),
                })?;
                let n = self.ctx.conductor;
                if !n.is_multiple_of(m) {
                    return Err(CycloError::Parse {
                        pos: at,
                        msg: format!("c({m},..) does not lie in the conductor-{n} field"),
                    });
                }
                let k = (k % BigInt::from(m))
                    .to_i64()
                    .expect("reduced exponent fits");
                Ok(CycloNumber::root(self.ctx, k * (n / m) as i64))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(CycloNumber::from_rational(
                    self.ctx,
                    &BigRational::from_integer(v),
                ))
            }
            _ => Err(self.err("expected number, c(N,k) or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(ctx(1).minimal_polynomial(), ints(&[-1, 1]).as_slice());
        assert_eq!(ctx(4).minimal_polynomial(), ints(&[1, 0, 1]).as_slice());
        assert_eq!(
            ctx(8).minimal_polynomial(),
            ints(&[1, 0, 0, 0, 1]).as_slice()
        );
        assert_eq!(ctx(6).minimal_polynomial(), ints(&[1, -1, 1]).as_slice());
        assert_eq!(ctx(12).degree(), 4);
        assert!(make_context(0).is_err());
    }

    #[test]
    fn phi_divides_x_n_minus_one() {
        for n in 1..=24u32 {
            let c = ctx(n);
            let mut p = vec![BigInt::zero(); n as usize + 1];
            p[0] = BigInt::from(-1);
            p[n as usize] = BigInt::one();
            // exact_div_monic asserts a zero remainder in debug builds
            let q = exact_div_monic(&p, c.minimal_polynomial());
            assert_eq!(q.len(), n as usize + 1 - c.degree());
            let totient = (1..=n).filter(|k| k.gcd(&n) == 1).count();
            assert_eq!(c.degree(), totient);
        }
    }

    #[test]
    fn roots() {
        let c8 = ctx(8);
        assert_eq!(CycloNumber::root(c8, 4), CycloNumber::from_int(c8, -1));
        assert!(CycloNumber::root(c8, 0).is_one());
        assert_eq!(CycloNumber::root(c8, 8), CycloNumber::one(c8));
        let i = CycloNumber::root(ctx(4), 1);
        assert_eq!(&i * &i, CycloNumber::from_int(ctx(4), -1));
        let z = CycloNumber::root(c8, 1);
        assert_eq!(z.pow(8), CycloNumber::one(c8));
    }

    #[test]
    fn arithmetic_examples() {
        let c4 = ctx(4);
        let i = CycloNumber::root(c4, 1);
        let one = CycloNumber::one(c4);
        assert_eq!((&one + &i) * (&one - &i), CycloNumber::from_int(c4, 2));
        let c8 = ctx(8);
        let z = CycloNumber::root(c8, 1);
        assert!((&z * &CycloNumber::root(c8, 7)).is_one());
        assert_eq!(&CycloNumber::one(c8) / &z, CycloNumber::root(c8, 7));
        assert_eq!(
            CycloNumber::arith(&one, &CycloNumber::zero(c4), ArithOp::Div),
            Err(CycloError::DivisionByZero)
        );
        assert!(matches!(
            CycloNumber::arith(&one, &CycloNumber::one(c8), ArithOp::Add),
            Err(CycloError::ContextMismatch(4, 8))
        ));
    }

    #[test]
    fn conjugation() {
        let c8 = ctx(8);
        assert_eq!(
            CycloNumber::root(c8, 1).conjugate(),
            CycloNumber::root(c8, 7)
        );
        let q = CycloNumber::from_ratio(c8, 3, 2);
        assert_eq!(q.conjugate(), q);
    }

    #[test]
    fn float_embedding() {
        let i = CycloNumber::root(ctx(4), 1).to_float();
        assert!((i.re).abs() < 1e-12 && (i.im - 1.0).abs() < 1e-12);
        let m = CycloNumber::from_int(ctx(4), -1).to_float();
        assert!((m.re + 1.0).abs() < 1e-12 && m.im.abs() < 1e-12);
        let c8 = ctx(8);
        let s = (CycloNumber::root(c8, 1) + CycloNumber::root(c8, 7)).to_float();
        let expected = 2.0 * (std::f64::consts::PI / 4.0).cos();
        assert!((s.re - expected).abs() < 1e-12 && s.im.abs() < 1e-12);
        assert!((s.re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn embedding_multiplies_exponents() {
        let i4 = CycloNumber::root(ctx(4), 1);
        assert_eq!(i4.embed(ctx(8)).unwrap(), CycloNumber::root(ctx(8), 2));
        let w3 = CycloNumber::root(ctx(3), 2);
        assert_eq!(w3.embed(ctx(12)).unwrap(), CycloNumber::root(ctx(12), 8));
        assert!(i4.embed(ctx(6)).is_err());
    }

    #[test]
    fn root_exponents() {
        let c8 = ctx(8);
        for k in 0..8 {
            let r = CycloNumber::root(c8, k);
            assert_eq!(r.root_of_unity_exponent(), Some(Ratio::new(k, 8)));
            assert_eq!(
                CycloNumber::from_root_exponent(c8, Ratio::new(k, 8)),
                Some(r)
            );
        }
        let c3 = ctx(3);
        // -1 and sixth roots of unity live in Q(zeta_3)
        let m = CycloNumber::from_root_exponent(c3, Ratio::new(1, 2)).unwrap();
        assert_eq!(m, CycloNumber::from_int(c3, -1));
        let s = CycloNumber::from_root_exponent(c3, Ratio::new(1, 6)).unwrap();
        assert_eq!(s.pow(6), CycloNumber::one(c3));
        assert_eq!(s.root_of_unity_exponent(), Some(Ratio::new(1, 6)));
        assert!(CycloNumber::from_root_exponent(c3, Ratio::new(1, 4)).is_none());
        assert!(CycloNumber::from_int(c8, 2)
            .root_of_unity_exponent()
            .is_none());
    }

    #[test]
    fn parse_and_print() {
        let c8 = ctx(8);
        let v = CycloNumber::parse(c8, "1/2*c(8,1) - 3*c(8,3) + (2 - c(4,1))*c(2,1)").unwrap();
        let expected = CycloNumber::from_ratio(c8, 1, 2) * CycloNumber::root(c8, 1)
            - CycloNumber::from_int(c8, 3) * CycloNumber::root(c8, 3)
            + (CycloNumber::from_int(c8, 2) - CycloNumber::root(c8, 2))
                * CycloNumber::from_int(c8, -1);
        assert_eq!(v, expected);
        let printed = v.to_string();
        assert_eq!(CycloNumber::parse(c8, &printed).unwrap(), v);
        assert_eq!(
            CycloNumber::parse(c8, "c(8,9)").unwrap().to_string(),
            "c(8,1)"
        );
        assert_eq!(CycloNumber::parse(c8, "-3/6").unwrap().to_string(), "-1/2");
        assert!(CycloNumber::parse(c8, "c(3,1)").is_err());
        assert!(CycloNumber::parse(c8, "1/0").is_err());
        assert!(CycloNumber::parse(c8, "1 +").is_err());
    }
}
