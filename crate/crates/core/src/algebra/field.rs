//! Exact coefficient fields: the rationals, prime fields F_p, and simple
//! extensions F_p[t]/(Φ).

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_PRIME: u64 = 1 << 31;

/// Name used when printing elements of an extension field.
pub const THETA: &str = "t";

/// Coefficient field of a frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
    /// F_p[t]/(modulus), modulus monic and irreducible, coefficients low to high.
    Extension {
        p: u64,
        modulus: Vec<u64>,
    },
}

/// A field element in canonical form. Which variant is valid depends on the field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u64),
    /// Coordinates in the basis 1, t, ..., t^(d-1).
    Ext(Vec<u64>),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(powmod(a, p - 2, p))
    }
}

/// Dense polynomials over F_p stored low to high, used for extension arithmetic.
pub(crate) mod dense {
    use super::{addmod, invmod, mulmod, submod};

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = addmod(out[i + j], mulmod(x, y, p), p);
            }
        }
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            *o = submod(x, y, p);
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo `m` (m nonzero).
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = invmod(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let k = r.len() - 1;
            let c = mulmod(r[k], lead_inv, p);
            let shift = k - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = submod(r[shift + i], mulmod(c, mi, p), p);
            }
            trim(&mut r);
        }
        r
    }

    pub fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        if r.len() <= dm {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - dm];
        let lead_inv = invmod(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let k = r.len() - 1;
            let c = mulmod(r[k], lead_inv, p);
            let shift = k - dm;
            q[shift] = c;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = submod(r[shift + i], mulmod(c, mi, p), p);
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Inverse of `a` modulo the irreducible `m`.
    pub fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        // extended Euclid tracking the coefficient of `a`
        let mut r0 = m.to_vec();
        let mut r1 = rem(a, m, p);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = invmod(r0[0], p)?;
        let out: Vec<u64> = s0.iter().map(|&x| mulmod(x, c, p)).collect();
        Some(rem(&out, m, p))
    }

    pub fn powmod_poly(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        result
    }

    /// Ben-Or irreducibility test for a monic polynomial of degree >= 1.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let d = m.len() - 1;
        let x = vec![0u64, 1];
        let mut xp = x.clone();
        for _ in 1..=d / 2 {
            xp = powmod_poly(&xp, p as u128, m, p);
            let g = gcd(m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    /// Simple extension F_p[t]/(modulus); `modulus` is given low to high and
    /// normalized to be monic.
    pub fn extension(p: u64, modulus: &[i64]) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut m: Vec<u64> = modulus
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        dense::trim(&mut m);
        let d = m.len().saturating_sub(1);
        if !(2..=8).contains(&d) {
            return Err(Error::ModulusDegree(d));
        }
        let lead = invmod(m[d], p).ok_or(Error::ReducibleModulus(p))?;
        for c in m.iter_mut() {
            *c = mulmod(*c, lead, p);
        }
        if !dense::is_irreducible(&m, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(FieldSpec::Extension { p, modulus: m })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
            FieldSpec::Extension { p, .. } => *p,
        }
    }

    /// Degree over the prime field (1 for Q and F_p).
    pub fn degree(&self) -> usize {
        match self {
            FieldSpec::Extension { modulus, .. } => modulus.len() - 1,
            _ => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, FieldSpec::Rationals)
    }

    /// Number of elements, `None` for Q.
    pub fn size(&self) -> Option<BigUint> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => Some(BigUint::from(*p)),
            FieldSpec::Extension { p, modulus } => {
                Some(num_traits::pow(BigUint::from(*p), modulus.len() - 1))
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::Prime(_) => Scalar::Residue(0),
            FieldSpec::Extension { modulus, .. } => Scalar::Ext(vec![0; modulus.len() - 1]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(n.clone())),
            FieldSpec::Prime(p) => Scalar::Residue(reduce_bigint(n, *p)),
            FieldSpec::Extension { p, modulus } => {
                let mut v = vec![0; modulus.len() - 1];
                v[0] = reduce_bigint(n, *p);
                Scalar::Ext(v)
            }
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rational(q.clone())),
            _ => {
                let num = self.from_bigint(q.numer());
                let den = self.from_bigint(q.denom());
                self.div(&num, &den)
                    .ok_or_else(|| Error::NotRepresentable(q.to_string()))
            }
        }
    }

    /// The generator t of an extension field.
    pub fn theta(&self) -> Option<Scalar> {
        match self {
            FieldSpec::Extension { modulus, .. } => {
                let mut v = vec![0; modulus.len() - 1];
                v[1] = 1;
                Some(Scalar::Ext(v))
            }
            _ => None,
        }
    }

    /// Element of an extension field from coordinates in the basis 1, t, t^2, ...
    pub fn from_coords(&self, coords: &[i64]) -> Scalar {
        match self {
            FieldSpec::Extension { p, modulus } => {
                let c: Vec<u64> = coords
                    .iter()
                    .map(|&x| x.rem_euclid(*p as i64) as u64)
                    .collect();
                Scalar::Ext(pad(dense::rem(&c, modulus, *p), modulus.len() - 1))
            }
            _ => self.from_i64(coords.first().copied().unwrap_or(0)),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue(x) => *x == 0,
            Scalar::Ext(v) => v.iter().all(|&x| x == 0),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(x + y)
            }
            (FieldSpec::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(addmod(*x, *y, *p))
            }
            (FieldSpec::Extension { p, .. }, Scalar::Ext(x), Scalar::Ext(y)) => {
                Scalar::Ext(x.iter().zip(y).map(|(&s, &t)| addmod(s, t, *p)).collect())
            }
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rational(x)) => Scalar::Rational(-x),
            (FieldSpec::Prime(p), Scalar::Residue(x)) => Scalar::Residue(submod(0, *x, *p)),
            (FieldSpec::Extension { p, .. }, Scalar::Ext(x)) => {
                Scalar::Ext(x.iter().map(|&s| submod(0, s, *p)).collect())
            }
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(x * y)
            }
            (FieldSpec::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(mulmod(*x, *y, *p))
            }
            (FieldSpec::Extension { p, modulus }, Scalar::Ext(x), Scalar::Ext(y)) => {
                let prod = dense::mul(x, y, *p);
                Scalar::Ext(pad(dense::rem(&prod, modulus, *p), modulus.len() - 1))
            }
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rational(x)) => Some(Scalar::Rational(x.recip())),
            (FieldSpec::Prime(p), Scalar::Residue(x)) => invmod(*x, *p).map(Scalar::Residue),
            (FieldSpec::Extension { p, modulus }, Scalar::Ext(x)) => {
                let mut v = x.clone();
                dense::trim(&mut v);
                dense::inv_mod(&v, modulus, *p).map(|r| Scalar::Ext(pad(r, modulus.len() - 1)))
            }
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        self.pow_big(a, &BigUint::from(e))
    }

    pub fn pow_big(&self, a: &Scalar, e: &BigUint) -> Scalar {
        let mut result = self.one();
        let mut base = a.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = self.mul(&result, &base);
            }
            if i + 1 < bits {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Unique p-th root in a finite field (inverse of Frobenius).
    pub fn pth_root(&self, a: &Scalar) -> Option<Scalar> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(_) => Some(a.clone()),
            FieldSpec::Extension { p, modulus } => {
                let d = modulus.len() - 1;
                let e = num_traits::pow(BigUint::from(*p), d - 1);
                Some(self.pow_big(a, &e))
            }
        }
    }

    /// Solve x^k = a for k = 1 or k a power of the characteristic.
    pub fn root_of_prime_power(&self, a: &Scalar, k: u64) -> Option<Scalar> {
        if k == 1 {
            return Some(a.clone());
        }
        let p = self.characteristic();
        if p == 0 {
            return None;
        }
        let mut k = k;
        let mut x = a.clone();
        while k > 1 {
            if !k.is_multiple_of(p) {
                return None;
            }
            x = self.pth_root(&x)?;
            k /= p;
        }
        Some(x)
    }

    /// Lift a scalar of `from` into this field (identity or F_p into an extension).
    pub fn embed(&self, from: &FieldSpec, a: &Scalar) -> Result<Scalar> {
        if from == self {
            return Ok(a.clone());
        }
        match (from, self, a) {
            (FieldSpec::Prime(p), FieldSpec::Extension { p: q, modulus }, Scalar::Residue(x))
                if p == q =>
            {
                let mut v = vec![0; modulus.len() - 1];
                v[0] = *x;
                Ok(Scalar::Ext(v))
            }
            _ => Err(Error::FrameMismatch(format!(
                "cannot embed {from} into {self}"
            ))),
        }
    }

    /// All elements when the field is finite and has at most `limit` elements.
    pub fn elements(&self, limit: u64) -> Option<Vec<Scalar>> {
        let size = self.size()?.to_u64()?;
        if size > limit {
            return None;
        }
        match self {
            FieldSpec::Prime(p) => Some((0..*p).map(Scalar::Residue).collect()),
            FieldSpec::Extension { p, modulus } => {
                let d = modulus.len() - 1;
                let mut out = Vec::with_capacity(size as usize);
                for mut idx in 0..size {
                    let mut v = vec![0u64; d];
                    for c in v.iter_mut() {
                        *c = idx % p;
                        idx /= p;
                    }
                    out.push(Scalar::Ext(v));
                }
                Some(out)
            }
            FieldSpec::Rationals => None,
        }
    }

    /// Element as an exact rational when it lies in the prime field of Q.
    pub fn as_rational(&self, a: &Scalar) -> Option<BigRational> {
        match a {
            Scalar::Rational(q) => Some(q.clone()),
            _ => None,
        }
    }

    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Rational(q) => q.to_string(),
            Scalar::Residue(x) => x.to_string(),
            Scalar::Ext(v) => {
                let mut parts = Vec::new();
                for (i, &c) in v.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let s = match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => THETA.to_string(),
                        (1, c) => format!("{c}*{THETA}"),
                        (i, 1) => format!("{THETA}^{i}"),
                        (i, c) => format!("{c}*{THETA}^{i}"),
                    };
                    parts.push(s);
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join("+")
                }
            }
        }
    }

    /// Whether the printed form needs parentheses when used as a product factor.
    pub fn is_compound(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Ext(v) => v.iter().filter(|&&c| c != 0).count() > 1,
            Scalar::Rational(q) => !q.is_integer(),
            Scalar::Residue(_) => false,
        }
    }

    /// True for elements whose printed form starts with a minus sign.
    pub fn is_negative_display(&self, a: &Scalar) -> bool {
        matches!(a, Scalar::Rational(q) if q.is_negative())
    }
}

fn pad(mut v: Vec<u64>, d: usize) -> Vec<u64> {
    v.resize(d, 0);
    v
}

fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let m = n.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits in u64")
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Extension { p, modulus } => {
                let mut terms = Vec::new();
                for (i, &c) in modulus.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let t = match (i, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => THETA.to_string(),
                        (1, c) => format!("{c}*{THETA}"),
                        (i, 1) => format!("{THETA}^{i}"),
                        (i, c) => format!("{c}*{THETA}^{i}"),
                    };
                    terms.push(t);
                }
                write!(f, "F_{p}[{}]", terms.join("+"))
            }
        }
    }
}

/// Rational number helpers shared across modules.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_integral(q: &BigRational) -> bool {
    q.denom().is_one()
}
