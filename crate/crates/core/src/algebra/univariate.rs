//! Dense univariate polynomials over a coefficient field, with factorization
//! over finite fields and rational-root extraction over ℚ.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{FieldSpec, Scalar};
use crate::error::{Error, Result};

/// Coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    field: FieldSpec,
    coeffs: Vec<Scalar>,
}

/// Result of factoring: monic irreducible factors with multiplicities, plus
/// over ℚ a leftover part without rational roots.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: Scalar,
    pub factors: Vec<(UPoly, u32)>,
    pub unfactored: Option<UPoly>,
}

impl UPoly {
    pub fn new(field: &FieldSpec, coeffs: Vec<Scalar>) -> Self {
        let mut p = UPoly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    pub fn zero(field: &FieldSpec) -> Self {
        UPoly::new(field, Vec::new())
    }

    pub fn constant(field: &FieldSpec, c: Scalar) -> Self {
        UPoly::new(field, vec![c])
    }

    pub fn x(field: &FieldSpec) -> Self {
        UPoly::new(field, vec![field.zero(), field.one()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with deg 0 = 0 for convenience; check `is_zero` first.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self
            .field
            .inv(&self.lead())
            .expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &Scalar) -> UPoly {
        UPoly::new(
            &self.field,
            self.coeffs.iter().map(|x| self.field.mul(x, c)).collect(),
        )
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            &self.field,
            (0..n)
                .map(|i| self.field.add(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            &self.field,
            (0..n)
                .map(|i| self.field.sub(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.field.add(&out[i + j], &self.field.mul(a, b));
            }
        }
        UPoly::new(&self.field, out)
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let f = &self.field;
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if r.len() <= dd {
            return (UPoly::zero(f), self.clone());
        }
        let inv = f.inv(&d.lead()).expect("nonzero leading coefficient");
        let mut q = vec![f.zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = f.mul(&r[k], &inv);
            if f.is_zero(&c) {
                continue;
            }
            q[k - dd] = c.clone();
            for (i, di) in d.coeffs.iter().enumerate() {
                let t = f.mul(&c, di);
                r[k - dd + i] = f.sub(&r[k - dd + i], &t);
            }
        }
        (UPoly::new(f, q), UPoly::new(f, r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UPoly {
        let f = &self.field;
        UPoly::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.add(&f.mul(&acc, x), c);
        }
        acc
    }

    /// self^e mod m.
    pub fn powmod(&self, e: &BigUint, m: &UPoly) -> UPoly {
        let mut result = UPoly::constant(&self.field, self.field.one()).rem(m);
        let mut base = self.rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(m);
            }
        }
        result
    }

    fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.field.is_one(&self.coeffs[0])
    }

    /// Inverse of Frobenius applied coefficientwise to a polynomial in x^p.
    fn pth_root(&self) -> UPoly {
        let p = self.field.characteristic() as usize;
        let coeffs = self
            .coeffs
            .iter()
            .step_by(p)
            .map(|c| self.field.pth_root(c).expect("finite field"))
            .collect();
        UPoly::new(&self.field, coeffs)
    }

    /// Square-free decomposition of a monic polynomial over a finite field or ℚ.
    pub fn squarefree(&self) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let mut c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c);
        let mut i = 1u32;
        while w.degree() > 0 {
            let y = w.gcd(&c);
            let z = w.div_exact(&y);
            if z.degree() > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y.clone();
            c = c.div_exact(&y);
        }
        if c.degree() > 0 && self.field.characteristic() != 0 {
            let p = self.field.characteristic() as u32;
            for (g, m) in c.pth_root().squarefree() {
                out.push((g, m * p));
            }
        }
        out
    }

    fn distinct_degree(&self) -> Vec<(UPoly, usize)> {
        let q = self.field.size().expect("finite field");
        let mut out = Vec::new();
        let mut rest = self.clone();
        let x = UPoly::x(&self.field);
        let mut h = x.rem(&rest);
        let mut i = 1;
        while rest.degree() >= 2 * i {
            h = h.powmod(&q, &rest);
            let g = rest.gcd(&h.sub(&x));
            if !g.is_one() {
                rest = rest.div_exact(&g);
                h = h.rem(&rest);
                out.push((g, i));
            }
            i += 1;
        }
        if rest.degree() > 0 {
            let d = rest.degree();
            out.push((rest, d));
        }
        out
    }

    fn random(field: &FieldSpec, deg: usize, rng: &mut ChaCha8Rng) -> UPoly {
        let mut coeffs: Vec<Scalar> = (0..deg).map(|_| random_scalar(field, rng)).collect();
        coeffs.push(field.one());
        UPoly::new(field, coeffs)
    }

    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<UPoly>) {
        let n = self.degree();
        if n == d {
            out.push(self.monic());
            return;
        }
        let field = &self.field;
        let q = field.size().expect("finite field");
        let p = field.characteristic();
        loop {
            let h = UPoly::random(field, n - 1, rng);
            let g = if p == 2 {
                // trace map h + h^2 + ... + h^(2^(k d - 1)), q = 2^k
                let k = field.degree() * d;
                let mut t = h.rem(self);
                let mut acc = t.clone();
                for _ in 1..k {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                self.gcd(&acc)
            } else {
                let e = (num_traits::pow(q.clone(), d) - BigUint::one()) / BigUint::from(2u32);
                let t = h.powmod(&e, self);
                self.gcd(&t.sub(&UPoly::constant(field, field.one())))
            };
            if g.degree() > 0 && g.degree() < n {
                g.equal_degree(d, rng, out);
                self.div_exact(&g).equal_degree(d, rng, out);
                return;
            }
        }
    }

    /// Factor into monic irreducibles. Over ℚ only linear factors are split off.
    pub fn factor(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let unit = self.lead();
        let mut factors = Vec::new();
        let mut unfactored: Option<UPoly> = None;
        match self.field {
            FieldSpec::Rationals => {
                for (g, m) in self.monic().squarefree() {
                    let (roots, rest) = rational_roots(&g)?;
                    for r in roots {
                        let lin =
                            UPoly::new(&self.field, vec![Scalar::Rational(-r), self.field.one()]);
                        factors.push((lin, m));
                    }
                    if rest.degree() > 0 {
                        let power = pow_poly(&rest, m);
                        unfactored = Some(match unfactored {
                            None => power,
                            Some(u) => u.mul(&power),
                        });
                    }
                }
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
                for (g, m) in self.monic().squarefree() {
                    for (part, d) in g.distinct_degree() {
                        let mut pieces = Vec::new();
                        part.equal_degree(d, &mut rng, &mut pieces);
                        for piece in pieces {
                            factors.push((piece, m));
                        }
                    }
                }
            }
        }
        factors.sort_by(|a, b| {
            a.0.degree()
                .cmp(&b.0.degree())
                .then_with(|| format!("{:?}", a.0.coeffs).cmp(&format!("{:?}", b.0.coeffs)))
        });
        Ok(Factorization {
            unit,
            factors,
            unfactored,
        })
    }

    /// Roots in the coefficient field with multiplicities.
    pub fn roots(&self) -> Result<Vec<(Scalar, u32)>> {
        let fac = self.factor()?;
        Ok(fac
            .factors
            .iter()
            .filter(|(g, _)| g.degree() == 1)
            .map(|(g, m)| (self.field.neg(&g.coeff(0)), *m))
            .collect())
    }
}

fn pow_poly(p: &UPoly, m: u32) -> UPoly {
    let mut out = UPoly::constant(p.field(), p.field().one());
    for _ in 0..m {
        out = out.mul(p);
    }
    out
}

fn random_scalar(field: &FieldSpec, rng: &mut ChaCha8Rng) -> Scalar {
    match field {
        FieldSpec::Prime(p) => Scalar::Residue(rng.gen_range(0..*p)),
        FieldSpec::Extension { p, modulus } => Scalar::Ext(
            (0..modulus.len() - 1)
                .map(|_| rng.gen_range(0..*p))
                .collect(),
        ),
        FieldSpec::Rationals => field.from_i64(rng.gen_range(-5..=5)),
    }
}

const ROOT_SEARCH_LIMIT: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    let small = n
        .to_u64()
        .filter(|&x| x <= ROOT_SEARCH_LIMIT)
        .ok_or_else(|| Error::ScaleExceeded(format!("rational root search on {n}")))?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Rational roots of a square-free monic polynomial over ℚ and the cofactor.
fn rational_roots(g: &UPoly) -> Result<(Vec<BigRational>, UPoly)> {
    let field = g.field().clone();
    let mut rest = g.clone();
    let mut roots = Vec::new();
    if field.is_zero(&rest.coeff(0)) {
        roots.push(BigRational::zero());
        rest = rest.div_exact(&UPoly::x(&field));
    }
    if rest.degree() == 0 {
        return Ok((roots, rest));
    }
    // clear denominators to an integer polynomial
    let mut lcm = BigInt::one();
    for c in rest.coeffs() {
        if let Scalar::Rational(q) = c {
            lcm = lcm.lcm(q.denom());
        }
    }
    let ints: Vec<BigInt> = rest
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Rational(q) => (q * BigRational::from_integer(lcm.clone())).to_integer(),
            _ => unreachable!("rational field"),
        })
        .collect();
    let a0 = ints[0].clone();
    let an = ints[ints.len() - 1].clone();
    let mut cands = Vec::new();
    for p in divisors(&a0)? {
        for q in divisors(&an)? {
            let r = BigRational::new(p.clone(), q);
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let s = Scalar::Rational(r.clone());
        if field.is_zero(&rest.eval(&s)) {
            roots.push(r.clone());
            let lin = UPoly::new(&field, vec![Scalar::Rational(-r), field.one()]);
            rest = rest.div_exact(&lin);
            if rest.degree() == 0 {
                break;
            }
        }
    }
    Ok((roots, rest))
}
