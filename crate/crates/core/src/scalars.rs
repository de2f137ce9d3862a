//! Exact arithmetic in cyclotomic fields.
//!
//! Every scalar in the engine is a `CycScalar`: an element of Q(zeta_N) in
//! the power basis 1, z, ..., z^(phi(N)-1) reduced modulo the N-th
//! cyclotomic polynomial. Elements of different conductors meet in the
//! compositum Q(zeta_lcm). Rational values are normalized down to
//! conductor 1, so the common case stays cheap.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rat {
    Rat::from(BigInt::from(p))
}

/// Euler totient for small arguments.
pub fn phi(n: u32) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result = result / p * (p - 1);
        }
        p += 1;
    }
    if m > 1 {
        result = result / m * (m - 1);
    }
    result as usize
}

pub fn divisors(n: u32) -> Vec<u32> {
    let mut d: Vec<u32> = (1..=n).filter(|k| n % k == 0).collect();
    d.sort_unstable();
    d
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

// --- dense polynomial helpers over the rationals (ascending coefficients) ---

fn poly_trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact division; panics if the remainder is nonzero (callers only divide
/// where divisibility is a theorem, e.g. building cyclotomic polynomials).
fn poly_div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().unwrap().clone();
    assert!(!lead.is_zero());
    if rem.len() < den.len() {
        for c in &rem {
            assert!(c.is_zero(), "non-exact polynomial division");
        }
        return vec![Rat::zero()];
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = &rem[i] / &lead;
        if !c.is_zero() {
            quot[i - dd] = c.clone();
            for (j, dj) in den.iter().enumerate() {
                let t = &c * dj;
                rem[i - dd + j] -= t;
            }
        }
    }
    for c in &rem {
        assert!(c.is_zero(), "non-exact polynomial division");
    }
    poly_trim(&mut quot);
    quot
}

fn poly_rem(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
    let mut rem: Vec<Rat> = num.to_vec();
    let dd = den.len() - 1;
    let lead = den.last().unwrap().clone();
    while rem.len() > dd && !(rem.len() == 1 && rem[0].is_zero()) {
        let i = rem.len() - 1;
        let c = &rem[i] / &lead;
        for (j, dj) in den.iter().enumerate() {
            let t = &c * dj;
            rem[i - dd + j] -= t;
        }
        poly_trim(&mut rem);
        if rem.len() <= dd {
            break;
        }
    }
    rem
}

/// Extended gcd over Q[x]: returns (g, u, v) with u*a + v*b = g.
fn poly_xgcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut s0 = vec![Rat::one()];
    let mut s1 = vec![Rat::zero()];
    let mut t0 = vec![Rat::zero()];
    let mut t1 = vec![Rat::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        // q = r0 div r1 with remainder
        let (q, r) = {
            let mut rem = r0.clone();
            let dd = r1.len() - 1;
            let lead = r1.last().unwrap().clone();
            let mut q = vec![Rat::zero(); rem.len().saturating_sub(dd).max(1)];
            while rem.len() > dd && !(rem.len() == 1 && rem[0].is_zero()) {
                let i = rem.len() - 1;
                if i < dd {
                    break;
                }
                let c = &rem[i] / &lead;
                q[i - dd] += &c;
                for (j, dj) in r1.iter().enumerate() {
                    let t = &c * dj;
                    rem[i - dd + j] -= t;
                }
                poly_trim(&mut rem);
            }
            poly_trim(&mut q);
            (q, rem)
        };
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    (r0, s0, t0)
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    poly_trim(&mut out);
    out
}

/// Cyclotomic polynomial Phi_n, ascending rational coefficients.
fn cyclotomic_poly(n: u32) -> Vec<Rat> {
    // x^n - 1 divided by the product of Phi_d over proper divisors d.
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    let mut den = vec![Rat::one()];
    for d in divisors(n) {
        if d < n {
            den = poly_mul(&den, &cyclotomic_cached(d));
        }
    }
    poly_div_exact(&num, &den)
}

struct FieldCtx {
    phi: usize,
    /// Coordinates of zeta^m in the power basis, for m in [0, bound).
    power_coords: Vec<Vec<Rat>>,
    minpoly: Vec<Rat>,
}

impl FieldCtx {
    fn new(n: u32) -> Self {
        let minpoly = cyclotomic_cached(n);
        let ph = minpoly.len() - 1;
        // Enough powers for products of reduced elements and for embeddings
        // from any subfield: max(2*phi - 1, n).
        let bound = (2 * ph).max(n as usize + 1);
        let mut power_coords: Vec<Vec<Rat>> = Vec::with_capacity(bound);
        for m in 0..bound {
            if m < ph {
                let mut v = vec![Rat::zero(); ph];
                v[m] = Rat::one();
                power_coords.push(v);
            } else {
                // zeta^m = zeta * zeta^(m-1); reduce the top term via the
                // minimal polynomial: zeta^phi = -(c_0 + ... + c_{phi-1} z^{phi-1}).
                let prev = &power_coords[m - 1];
                let mut v = vec![Rat::zero(); ph];
                for i in 0..ph - 1 {
                    v[i + 1] = prev[i].clone();
                }
                let top = prev[ph - 1].clone();
                if !top.is_zero() {
                    for i in 0..ph {
                        let t = &top * &minpoly[i];
                        v[i] -= t;
                    }
                }
                power_coords.push(v);
            }
        }
        FieldCtx {
            phi: ph,
            power_coords,
            minpoly,
        }
    }
}

static CYCLO_CACHE: Lazy<Mutex<HashMap<u32, Arc<Vec<Rat>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static CTX_CACHE: Lazy<Mutex<HashMap<u32, Arc<FieldCtx>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cyclotomic_cached(n: u32) -> Vec<Rat> {
    if let Some(p) = CYCLO_CACHE.lock().unwrap().get(&n) {
        return p.as_ref().clone();
    }
    let p = cyclotomic_poly(n);
    CYCLO_CACHE
        .lock()
        .unwrap()
        .insert(n, Arc::new(p.clone()));
    p
}

fn ctx(n: u32) -> Arc<FieldCtx> {
    if let Some(c) = CTX_CACHE.lock().unwrap().get(&n) {
        return c.clone();
    }
    let c = Arc::new(FieldCtx::new(n));
    CTX_CACHE.lock().unwrap().insert(n, c.clone());
    c
}

/// The deterministic square-root convention for roots of unity. All pin
/// lifts are reproducible for a fixed convention, and every multiplicity
/// report must be identical under both (tested).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtConvention {
    /// zeta_m^k maps to zeta_{2m}^k.
    Standard,
    /// zeta_m^k maps to -zeta_{2m}^k (the opposite lift everywhere).
    Negated,
}

#[derive(Clone, Debug, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// An element of Q(zeta_N), exact.
#[derive(Clone)]
pub struct CycScalar {
    order: u32,
    coeffs: Vec<Rat>,
}

impl CycScalar {
    pub fn zero() -> Self {
        CycScalar {
            order: 1,
            coeffs: vec![Rat::zero()],
        }
    }

    pub fn one() -> Self {
        CycScalar {
            order: 1,
            coeffs: vec![Rat::one()],
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        CycScalar {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rat(rat_int(k))
    }

    pub fn rational(p: i64, q: i64) -> Self {
        Self::from_rat(rat(p, q))
    }

    /// zeta_N^k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1, "conductor must be positive");
        let k = k.rem_euclid(n as i64) as usize;
        let c = ctx(n);
        let mut out = CycScalar {
            order: n,
            coeffs: c.power_coords[k].clone(),
        };
        out.normalize();
        out
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            self.reduced().try_rational()
        }
    }

    fn try_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Drop to conductor 1 when the element is visibly rational.
    fn normalize(&mut self) {
        if self.order > 1 && self.is_rational() {
            self.coeffs.truncate(1);
            self.order = 1;
        }
    }

    /// Rewrite in Q(zeta_m) for m a multiple of the current conductor.
    pub fn promote(&self, m: u32) -> Self {
        if m == self.order {
            return self.clone();
        }
        assert!(m % self.order == 0, "promotion target must be a multiple");
        let c = ctx(m);
        let step = (m / self.order) as usize;
        let mut coeffs = vec![Rat::zero(); c.phi];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = &c.power_coords[j * step];
            for i in 0..c.phi {
                if !row[i].is_zero() {
                    coeffs[i] += a * &row[i];
                }
            }
        }
        CycScalar { order: m, coeffs }
    }

    fn common(&self, other: &Self) -> (Self, Self, u32) {
        let m = lcm(self.order, other.order);
        (self.promote(m), other.promote(m), m)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let (a, b, m) = self.common(other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        let mut out = CycScalar { order: m, coeffs };
        out.normalize();
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        CycScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return CycScalar::zero();
        }
        if self.order == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.order == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let (a, b, m) = self.common(other);
        let c = ctx(m);
        let ph = c.phi;
        let mut conv = vec![Rat::zero(); 2 * ph - 1];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if !bj.is_zero() {
                    conv[i + j] += ai * bj;
                }
            }
        }
        let mut coeffs = vec![Rat::zero(); ph];
        for (m_idx, v) in conv.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if m_idx < ph {
                coeffs[m_idx] += v;
            } else {
                let row = &c.power_coords[m_idx];
                for i in 0..ph {
                    if !row[i].is_zero() {
                        coeffs[i] += v * &row[i];
                    }
                }
            }
        }
        let mut out = CycScalar { order: m, coeffs };
        out.normalize();
        out
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return CycScalar::zero();
        }
        CycScalar {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        if self.order == 1 {
            return Ok(CycScalar::from_rat(self.coeffs[0].recip()));
        }
        let c = ctx(self.order);
        let mut poly = self.coeffs.clone();
        poly_trim(&mut poly);
        let (g, u, _) = poly_xgcd(&poly, &c.minpoly);
        // g is a nonzero constant since Phi_N is irreducible.
        assert!(g.len() == 1 && !g[0].is_zero(), "gcd with minpoly not constant");
        let scale = g[0].recip();
        let mut coeffs = vec![Rat::zero(); c.phi];
        let red = poly_rem(&u, &c.minpoly);
        for (i, ci) in red.iter().enumerate() {
            coeffs[i] = ci * &scale;
        }
        let mut out = CycScalar {
            order: self.order,
            coeffs,
        };
        out.normalize();
        Ok(out)
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycScalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Complex conjugation: the automorphism zeta -> zeta^{-1}.
    pub fn conj(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order;
        let c = ctx(n);
        let mut coeffs = vec![Rat::zero(); c.phi];
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let m = ((n as usize) - j) % (n as usize);
            let row = &c.power_coords[m];
            for i in 0..c.phi {
                if !row[i].is_zero() {
                    coeffs[i] += a * &row[i];
                }
            }
        }
        let mut out = CycScalar { order: n, coeffs };
        out.normalize();
        out
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Minimal-conductor canonical form.
    pub fn reduced(&self) -> Self {
        if self.order == 1 {
            return self.clone();
        }
        let n = self.order;
        for d in divisors(n) {
            if d == n {
                break;
            }
            if let Some(r) = self.try_descend(d) {
                return r;
            }
        }
        self.clone()
    }

    fn try_descend(&self, d: u32) -> Option<Self> {
        let big = ctx(self.order);
        let small_phi = phi(d);
        // Columns: embeddings of the Q(zeta_d) power basis.
        let step = (self.order / d) as usize;
        let rows = big.phi;
        let mut aug: Vec<Vec<Rat>> = Vec::with_capacity(rows);
        for i in 0..rows {
            let mut row = Vec::with_capacity(small_phi + 1);
            for j in 0..small_phi {
                row.push(big.power_coords[j * step][i].clone());
            }
            row.push(self.coeffs[i].clone());
            aug.push(row);
        }
        // Solve by Gaussian elimination on the augmented matrix.
        let cols = small_phi;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..cols {
            let mut piv = None;
            for i in r..rows {
                if !aug[i][c].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(p) = piv else { continue };
            aug.swap(r, p);
            let inv = aug[r][c].recip();
            for j in c..=cols {
                aug[r][j] = &aug[r][j] * &inv;
            }
            for i in 0..rows {
                if i != r && !aug[i][c].is_zero() {
                    let f = aug[i][c].clone();
                    for j in c..=cols {
                        let t = &f * &aug[r][j];
                        aug[i][j] -= t;
                    }
                }
            }
            pivots.push((r, c));
            r += 1;
            if r == rows {
                break;
            }
        }
        // Consistent iff no row has zero coefficients but nonzero rhs.
        for i in r..rows {
            if !aug[i][cols].is_zero() {
                return None;
            }
        }
        let mut coeffs = vec![Rat::zero(); small_phi];
        for &(pr, pc) in &pivots {
            coeffs[pc] = aug[pr][cols].clone();
        }
        let mut out = CycScalar { order: d, coeffs };
        out.normalize();
        Some(out)
    }

    /// If self is a root of unity, return (m, k) with self = zeta_m^k,
    /// gcd(k, m) = 1 (m = 1, k = 0 for the identity).
    pub fn rou_order(&self) -> Option<(u32, u32)> {
        if self.is_zero() {
            return None;
        }
        let z = self.reduced();
        let n = z.order;
        let m_max = if n % 2 == 0 { n } else { 2 * n };
        if !z.pow(m_max as i64).ok()?.is_one() {
            return None;
        }
        let mut order = m_max;
        for d in divisors(m_max) {
            if z.pow(d as i64).ok()?.is_one() {
                order = d;
                break;
            }
        }
        if order == 1 {
            return Some((1, 0));
        }
        for k in 1..order {
            if gcd(k, order) == 1 && z == CycScalar::root_of_unity(order, k as i64) {
                return Some((order, k));
            }
        }
        None
    }

    /// Deterministic square root of a root of unity: zeta_m^k -> zeta_{2m}^k
    /// (negated under the opposite convention).
    pub fn sqrt_root_of_unity(&self, conv: SqrtConvention) -> Result<Self> {
        let (m, k) = self.rou_order().ok_or(Error::NotARootOfUnity)?;
        let r = CycScalar::root_of_unity(2 * m, k as i64);
        Ok(match conv {
            SqrtConvention::Standard => r,
            SqrtConvention::Negated => r.neg_ref(),
        })
    }

    /// Certified sign of a real cyclotomic number. Exact zero test first;
    /// otherwise rigorous rational interval evaluation of sum_j c_j cos(2 pi j / N)
    /// at escalating precision.
    pub fn certified_sign(&self) -> Result<Sign> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        if self.is_zero() {
            return Ok(Sign::Zero);
        }
        for level in 0..14u32 {
            let iv = self.eval_interval(level);
            if iv.lo.is_positive() {
                return Ok(Sign::Positive);
            }
            if iv.hi.is_negative() {
                return Ok(Sign::Negative);
            }
        }
        Err(Error::SignNotCertified)
    }

    fn eval_interval(&self, level: u32) -> RatInterval {
        let n = self.order;
        let pi = pi_interval(level);
        let mut acc = RatInterval::point(Rat::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // theta = 2*pi*j/n
            let frac = rat(2 * j as i64, n as i64);
            let theta = pi.scale(&frac);
            let cosv = cos_interval(&theta, level);
            acc = acc.add(&cosv.scale(c));
        }
        acc
    }
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = self.common(other);
        a.coeffs == b.coeffs
    }
}
impl Eq for CycScalar {}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.reduced();
        if z.is_rational() {
            return write!(f, "{}", z.coeffs[0]);
        }
        let mut first = true;
        for (j, c) in z.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            if j == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                write!(f, "z{}", z.order)?;
                if j > 1 {
                    write!(f, "^{}", j)?;
                }
            }
        }
        Ok(())
    }
}

impl Add for &CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        self.add_ref(rhs)
    }
}
impl Sub for &CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        self.sub_ref(rhs)
    }
}
impl Mul for &CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        self.mul_ref(rhs)
    }
}
impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        self.neg_ref()
    }
}

// --- scalar string grammar ---
//
//   scalar  := term (('+'|'-') term)*
//   term    := coef | coef '*' zpow | zpow | zpow '/' uint
//   coef    := ['-'] uint ['/' uint]
//   zpow    := 'z' uint ['^' uint]
//
// Examples: "3/2", "-1", "z3", "2*z8^3", "z3^2/2", "1 - z6".

pub fn parse_scalar(s: &str) -> Result<CycScalar> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    let bytes = s.as_bytes();
    let mut pos = 0usize;
    let mut acc = CycScalar::zero();
    let mut sign = Rat::one();
    if bytes[0] == b'-' {
        sign = -Rat::one();
        pos = 1;
    } else if bytes[0] == b'+' {
        pos = 1;
    }
    loop {
        let (term, next) = parse_term(&s, pos)?;
        acc = acc.add_ref(&term.scale(&sign));
        pos = next;
        if pos >= s.len() {
            break;
        }
        match bytes[pos] {
            b'+' => {
                sign = Rat::one();
                pos += 1;
            }
            b'-' => {
                sign = -Rat::one();
                pos += 1;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character '{}' in scalar \"{}\"",
                    bytes[pos] as char, s
                )))
            }
        }
    }
    Ok(acc)
}

fn parse_uint(s: &str, pos: usize) -> Result<(u64, usize)> {
    let bytes = s.as_bytes();
    let start = pos;
    let mut pos = pos;
    while pos < s.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == start {
        return Err(Error::Parse(format!("expected digits at {} in \"{}\"", start, s)));
    }
    let v = s[start..pos]
        .parse::<u64>()
        .map_err(|e| Error::Parse(e.to_string()))?;
    Ok((v, pos))
}

fn parse_zpow(s: &str, pos: usize) -> Result<(CycScalar, usize)> {
    let bytes = s.as_bytes();
    assert_eq!(bytes[pos], b'z');
    let (n, mut pos) = parse_uint(s, pos + 1)?;
    if n == 0 {
        return Err(Error::Parse("z0 is not a root of unity".into()));
    }
    let mut k = 1u64;
    if pos < s.len() && bytes[pos] == b'^' {
        let (e, p) = parse_uint(s, pos + 1)?;
        k = e;
        pos = p;
    }
    Ok((
        CycScalar::root_of_unity(n as u32, k as i64),
        pos,
    ))
}

fn parse_term(s: &str, pos: usize) -> Result<(CycScalar, usize)> {
    let bytes = s.as_bytes();
    if pos >= s.len() {
        return Err(Error::Parse("truncated scalar".into()));
    }
    if bytes[pos] == b'z' {
        let (z, mut pos) = parse_zpow(s, pos)?;
        // optional trailing divisor: "z3^2/2"
        if pos < s.len() && bytes[pos] == b'/' {
            let (d, p) = parse_uint(s, pos + 1)?;
            if d == 0 {
                return Err(Error::Parse("division by zero".into()));
            }
            pos = p;
            return Ok((z.scale(&rat(1, d as i64)), pos));
        }
        return Ok((z, pos));
    }
    // rational coefficient
    let (num, mut pos) = parse_uint(s, pos)?;
    let mut coef = Rat::from(BigInt::from(num));
    if pos < s.len() && bytes[pos] == b'/' {
        let (d, p) = parse_uint(s, pos + 1)?;
        if d == 0 {
            return Err(Error::Parse("division by zero".into()));
        }
        coef /= Rat::from(BigInt::from(d));
        pos = p;
    }
    if pos < s.len() && bytes[pos] == b'*' {
        if pos + 1 < s.len() && bytes[pos + 1] == b'z' {
            let (z, mut p) = parse_zpow(s, pos + 1)?;
            // optional divisor after the root: "2*z8^3/4"
            let mut val = z.scale(&coef);
            if p < s.len() && bytes[p] == b'/' {
                let (d, p2) = parse_uint(s, p + 1)?;
                if d == 0 {
                    return Err(Error::Parse("division by zero".into()));
                }
                val = val.scale(&rat(1, d as i64));
                p = p2;
            }
            return Ok((val, p));
        }
        return Err(Error::Parse("expected root of unity after '*'".into()));
    }
    Ok((CycScalar::from_rat(coef), pos))
}

// --- rigorous rational interval arithmetic for sign certification ---

#[derive(Clone, Debug)]
struct RatInterval {
    lo: Rat,
    hi: Rat,
}

impl RatInterval {
    fn point(r: Rat) -> Self {
        RatInterval { lo: r.clone(), hi: r }
    }

    fn add(&self, o: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn scale(&self, r: &Rat) -> Self {
        if r.is_negative() {
            RatInterval {
                lo: &self.hi * r,
                hi: &self.lo * r,
            }
        } else {
            RatInterval {
                lo: &self.lo * r,
                hi: &self.hi * r,
            }
        }
    }

    fn mid(&self) -> Rat {
        (&self.lo + &self.hi) / rat_int(2)
    }

    fn halfwidth(&self) -> Rat {
        (&self.hi - &self.lo) / rat_int(2)
    }
}

/// arctan(1/x) enclosure from the alternating series, `terms` full terms.
fn arctan_recip_interval(x: i64, terms: usize) -> RatInterval {
    let mut s = Rat::zero();
    let xe = rat(1, x);
    let x2 = rat(1, x * x);
    let mut p = xe;
    let mut last_partial = Rat::zero();
    for k in 0..terms {
        let term = &p / rat_int(2 * k as i64 + 1);
        last_partial = s.clone();
        if k % 2 == 0 {
            s += term;
        } else {
            s -= term;
        }
        p *= &x2;
    }
    // consecutive partial sums bracket the value
    if terms % 2 == 1 {
        RatInterval {
            lo: last_partial,
            hi: s,
        }
        .ordered()
    } else {
        RatInterval {
            lo: s,
            hi: last_partial,
        }
        .ordered()
    }
}

impl RatInterval {
    fn ordered(self) -> Self {
        if self.lo <= self.hi {
            self
        } else {
            RatInterval {
                lo: self.hi.clone(),
                hi: self.lo,
            }
        }
    }
}

/// Machin: pi = 16 arctan(1/5) - 4 arctan(1/239).
fn pi_interval(level: u32) -> RatInterval {
    let terms = 10 + 4 * level as usize;
    let a = arctan_recip_interval(5, terms);
    let b = arctan_recip_interval(239, terms);
    let sixteen_a = a.scale(&rat_int(16));
    let minus_four_b = b.scale(&rat_int(-4));
    sixteen_a.add(&minus_four_b)
}

/// cos over an interval: Taylor at the midpoint plus |cos'| <= 1 times the halfwidth.
fn cos_interval(theta: &RatInterval, level: u32) -> RatInterval {
    let m = theta.mid();
    let hw = theta.halfwidth();
    let m2 = &m * &m;
    let mut sum = Rat::one();
    let mut term = Rat::one();
    let mut k = 0i64;
    let extra = 6 + 2 * level as usize;
    let mut decreasing_since: Option<usize> = None;
    let mut steps = 0usize;
    let bound;
    loop {
        k += 1;
        steps += 1;
        // term_k = (-1)^k m^{2k} / (2k)!
        term = &term * &m2 / rat_int((2 * k - 1) * 2 * k);
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        let next_mag = &term * &m2 / rat_int((2 * k + 1) * (2 * k + 2));
        if decreasing_since.is_none() && next_mag <= term {
            decreasing_since = Some(steps);
        }
        if let Some(s0) = decreasing_since {
            if steps >= s0 + extra {
                bound = next_mag.abs();
                break;
            }
        }
        if steps > 300 {
            bound = next_mag.abs() + rat_int(1);
            break;
        }
    }
    let slack = &bound + &hw;
    RatInterval {
        lo: &sum - &slack,
        hi: &sum + &slack,
    }
}

/// Total order on reduced forms, used only for deterministic sorting of
/// reports (not a numeric order).
pub fn cmp_key(a: &CycScalar, b: &CycScalar) -> Ordering {
    let ar = a.reduced();
    let br = b.reduced();
    ar.order
        .cmp(&br.order)
        .then_with(|| ar.coeffs.cmp(&br.coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_of_unity_basics() {
        assert!(CycScalar::root_of_unity(1, 0).is_one());
        assert_eq!(CycScalar::root_of_unity(2, 1), CycScalar::from_int(-1));
        let i = CycScalar::root_of_unity(4, 1);
        assert_eq!(i.mul_ref(&i), CycScalar::from_int(-1));
        // result has multiplicative order N/gcd(N,k)
        let z = CycScalar::root_of_unity(12, 8);
        assert_eq!(z.rou_order().unwrap().0, 3);
    }

    #[test]
    fn field_ops_exact() {
        let a = CycScalar::root_of_unity(5, 2).add_ref(&CycScalar::rational(3, 7));
        let b = a.inv().unwrap();
        assert!(a.mul_ref(&b).is_one());
        let c = a.sub_ref(&a);
        assert!(c.is_zero());
    }

    #[test]
    fn compositum_equality() {
        // zeta_6^2 = zeta_3
        let a = CycScalar::root_of_unity(6, 2);
        let b = CycScalar::root_of_unity(3, 1);
        assert_eq!(a, b);
        // -zeta_3 = zeta_6^5
        let c = CycScalar::root_of_unity(3, 1).neg_ref();
        let d = CycScalar::root_of_unity(6, 5);
        assert_eq!(c, d);
    }

    #[test]
    fn sqrt_convention() {
        // 1 -> 1
        let one = CycScalar::one();
        assert!(one
            .sqrt_root_of_unity(SqrtConvention::Standard)
            .unwrap()
            .is_one());
        // -1 -> i
        let m1 = CycScalar::from_int(-1);
        assert_eq!(
            m1.sqrt_root_of_unity(SqrtConvention::Standard).unwrap(),
            CycScalar::root_of_unity(4, 1)
        );
        // zeta_3 -> zeta_6, square check by exact arithmetic
        let z3 = CycScalar::root_of_unity(3, 1);
        let s = z3.sqrt_root_of_unity(SqrtConvention::Standard).unwrap();
        assert_eq!(s, CycScalar::root_of_unity(6, 1));
        assert_eq!(s.mul_ref(&s), z3);
    }

    #[test]
    fn sqrt_squares_back_all_orders() {
        for m in 1..=24u32 {
            for k in 0..m {
                if super::gcd(k, m) != 1 && !(m == 1 && k == 0) {
                    continue;
                }
                let z = CycScalar::root_of_unity(m, k as i64);
                for conv in [SqrtConvention::Standard, SqrtConvention::Negated] {
                    let s = z.sqrt_root_of_unity(conv).unwrap();
                    assert_eq!(s.mul_ref(&s), z, "sqrt^2 != z for m={} k={}", m, k);
                }
            }
        }
    }

    #[test]
    fn certified_signs() {
        assert_eq!(CycScalar::zero().certified_sign().unwrap(), Sign::Zero);
        assert_eq!(
            CycScalar::rational(-1, 2).certified_sign().unwrap(),
            Sign::Negative
        );
        // 2 - zeta_3 - zeta_3^{-1} = 3
        let z = CycScalar::root_of_unity(3, 1);
        let v = CycScalar::from_int(2)
            .sub_ref(&z)
            .sub_ref(&z.conj());
        assert_eq!(v.as_rational().unwrap(), rat_int(3));
        assert_eq!(v.certified_sign().unwrap(), Sign::Positive);
        // an irrational real: zeta_5 + zeta_5^{-1} = 2 cos(72 deg) > 0
        let w = CycScalar::root_of_unity(5, 1);
        let r = w.add_ref(&w.conj());
        assert!(r.is_real());
        assert_eq!(r.certified_sign().unwrap(), Sign::Positive);
        // and zeta_5^2 + zeta_5^{-2} = 2 cos(144 deg) < 0
        let w2 = CycScalar::root_of_unity(5, 2);
        let r2 = w2.add_ref(&w2.conj());
        assert_eq!(r2.certified_sign().unwrap(), Sign::Negative);
        // non-real input rejected
        assert!(CycScalar::root_of_unity(4, 1).certified_sign().is_err());
    }

    #[test]
    fn reduction_to_minimal_conductor() {
        // an element of Q(zeta_12) that lies in Q(zeta_4)
        let z12 = CycScalar::root_of_unity(12, 3); // = i
        let r = z12.reduced();
        assert_eq!(r.order(), 4);
        assert_eq!(r, CycScalar::root_of_unity(4, 1));
        // rational disguised in conductor 8
        let z8 = CycScalar::root_of_unity(8, 1);
        let v = z8.pow(4).unwrap();
        assert_eq!(v.order(), 1);
        assert_eq!(v, CycScalar::from_int(-1));
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["3/2", "1/5", "-1", "z3", "2*z8^3", "z3^2/2", "1 - z6", "0"] {
            let v = parse_scalar(s).unwrap();
            let printed = format!("{}", v);
            let reparsed = parse_scalar(&printed).unwrap();
            assert_eq!(v, reparsed, "roundtrip failed for {}", s);
        }
        assert_eq!(parse_scalar("z3^2/2").unwrap(), {
            CycScalar::root_of_unity(3, 2).scale(&rat(1, 2))
        });
        assert!(parse_scalar("3//2").is_err());
        assert!(parse_scalar("q5").is_err());
    }

    #[test]
    fn conjugation_is_automorphism() {
        let a = CycScalar::root_of_unity(12, 5).add_ref(&CycScalar::rational(2, 3));
        let b = CycScalar::root_of_unity(12, 7).sub_ref(&CycScalar::from_int(1));
        assert_eq!(a.mul_ref(&b).conj(), a.conj().mul_ref(&b.conj()));
        assert_eq!(a.conj().conj(), a);
    }
}
