//! Hilbert functions of monomial quotients, iterated sums, Hilbert
//! polynomials and their binomial decomposition.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::is_integral;
use crate::error::{Error, Result};

pub const MAX_VARS: usize = 6;
pub const MAX_GEN_DEGREE: u32 = 20;
pub const MAX_ITERATE: u32 = 5;
/// Bound on the length of a(P) explored by the greedy decomposition.
pub const MAX_DECOMPOSITION_LENGTH: usize = 1_000_000;

/// Polynomial in T with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbertPolynomial {
    coeffs: Vec<BigRational>,
}

fn trim(mut c: Vec<BigRational>) -> Vec<BigRational> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

impl HilbertPolynomial {
    /// Checked constructor: the polynomial must be integer valued.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        let p = Self::raw(coeffs);
        let d = p.degree().unwrap_or(0);
        for n in 0..=d as i64 {
            if !is_integral(&p.eval_i64(n)) {
                return Err(Error::NotAHilbertPolynomial(format!(
                    "{p} is not integer valued at {n}"
                )));
            }
        }
        Ok(p)
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    fn raw(coeffs: Vec<BigRational>) -> Self {
        HilbertPolynomial {
            coeffs: trim(coeffs),
        }
    }

    pub fn zero() -> Self {
        Self::raw(Vec::new())
    }

    fn constant(c: BigRational) -> Self {
        Self::raw(vec![c])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, n: &BigInt) -> BigRational {
        let x = BigRational::from_integer(n.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    pub fn eval_i64(&self, n: i64) -> BigRational {
        self.eval(&BigInt::from(n))
    }

    fn add(&self, o: &Self) -> Self {
        let len = self.coeffs.len().max(o.coeffs.len());
        let c = (0..len)
            .map(|i| {
                let a = self
                    .coeffs
                    .get(i)
                    .cloned()
                    .unwrap_or_else(BigRational::zero);
                let b = o.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
                a + b
            })
            .collect();
        Self::raw(c)
    }

    fn neg(&self) -> Self {
        Self::raw(self.coeffs.iter().map(|c| -c).collect())
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn scale(&self, s: &BigRational) -> Self {
        Self::raw(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Product with (T + c).
    fn mul_linear(&self, c: &BigRational) -> Self {
        let mut out = vec![BigRational::zero(); self.coeffs.len() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i + 1] += a;
            out[i] += a * c;
        }
        Self::raw(out)
    }

    /// P(T + k).
    pub fn shift(&self, k: i64) -> Self {
        let k = BigRational::from_integer(k.into());
        // Horner in the shifted variable
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_linear(&k).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// The binomial polynomial C(T + c, a) = (T+c)(T+c-1)…(T+c-a+1)/a!.
    pub fn binomial(c: i64, a: u32) -> Self {
        let mut p = Self::constant(BigRational::one());
        for j in 0..a as i64 {
            p = p.mul_linear(&BigRational::from_integer((c - j).into()));
        }
        p.scale(&BigRational::new(BigInt::one(), factorial(a)))
    }

    /// Lagrange interpolation through (x_i, y_i).
    fn interpolate(points: &[(i64, BigRational)]) -> Self {
        let mut acc = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::constant(BigRational::one());
            let mut denom = BigRational::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    basis = basis.mul_linear(&BigRational::from_integer((-xj).into()));
                    denom *= BigRational::from_integer((xi - xj).into());
                }
            }
            acc = acc.add(&basis.scale(&(yi / denom)));
        }
        acc
    }
}

impl fmt::Display for HilbertPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            let mono = match i {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Nonincreasing family (a_1, …, a_s); the empty family stands for P = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ADecomposition(pub Vec<u32>);

impl fmt::Display for ADecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Explicit values H(0..=n0) and the polynomial agreeing with H beyond n0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertFunction {
    values: Vec<BigInt>,
    tail: HilbertPolynomial,
}

impl HilbertFunction {
    pub fn new(values: Vec<BigInt>, tail: HilbertPolynomial) -> Self {
        assert!(!values.is_empty());
        HilbertFunction { values, tail }
    }

    pub fn n0(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn tail(&self) -> &HilbertPolynomial {
        &self.tail
    }

    pub fn value(&self, n: usize) -> BigInt {
        match self.values.get(n) {
            Some(v) => v.clone(),
            None => self.tail.eval(&BigInt::from(n)).to_integer(),
        }
    }

    pub fn take(&self, count: usize) -> Vec<BigInt> {
        (0..count).map(|n| self.value(n)).collect()
    }
}

type Monomial = Vec<u32>;

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|g| (g.iter().sum::<u32>(), g.clone()));
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::new();
    for g in gens {
        if !out.iter().any(|h| divides(h, &g)) {
            out.push(g);
        }
    }
    out
}

fn poly_sub_shifted(a: &mut Vec<BigInt>, b: &[BigInt], shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, BigInt::zero());
    }
    for (i, c) in b.iter().enumerate() {
        a[i + shift] -= c;
    }
}

/// Numerator N(t) of the Hilbert series N(t)/(1-t)^d of k[X]/(gens).
fn series_numerator(gens: &[Monomial]) -> Vec<BigInt> {
    let gens = minimalize(gens.to_vec());
    if gens.is_empty() {
        return vec![BigInt::one()];
    }
    if gens.iter().any(|g| g.iter().all(|&x| x == 0)) {
        return Vec::new();
    }
    let disjoint = (0..gens.len()).all(|i| {
        (i + 1..gens.len()).all(|j| {
            gens[i]
                .iter()
                .zip(&gens[j])
                .all(|(x, y)| *x == 0 || *y == 0)
        })
    });
    if disjoint {
        let mut n = vec![BigInt::one()];
        for g in &gens {
            let d = g.iter().sum::<u32>() as usize;
            let prev = n.clone();
            poly_sub_shifted(&mut n, &prev, d);
        }
        return n;
    }
    // N(I + (m)) = N(I) - t^{deg m} N(I : m)
    let (last, rest) = gens.split_last().expect("nonempty");
    let mut n = series_numerator(rest);
    let colon: Vec<Monomial> = rest
        .iter()
        .map(|g| {
            g.iter()
                .zip(last)
                .map(|(x, y)| x.saturating_sub(*y))
                .collect()
        })
        .collect();
    let c = series_numerator(&colon);
    poly_sub_shifted(&mut n, &c, last.iter().sum::<u32>() as usize);
    n
}

fn binomial_int(n: i64, k: u32) -> BigInt {
    if n < 0 || (n as u64) < k as u64 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k as i64 {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// Hilbert function of k[X_1..X_nvars]/(monomials).
pub fn hf_monomial(generators: &[Monomial], nvars: usize) -> Result<HilbertFunction> {
    if nvars > MAX_VARS {
        return Err(Error::ScaleExceeded(format!(
            "{nvars} variables (limit {MAX_VARS})"
        )));
    }
    let mut max_deg = 0;
    for g in generators {
        if g.len() != nvars {
            return Err(Error::WrongDimension {
                expected: nvars,
                got: g.len(),
            });
        }
        let d: u32 = g.iter().sum();
        if d > MAX_GEN_DEGREE {
            return Err(Error::ScaleExceeded(format!(
                "generator of degree {d} (limit {MAX_GEN_DEGREE})"
            )));
        }
        max_deg = max_deg.max(d);
    }
    let num = series_numerator(generators);
    let n0 = (max_deg as usize + nvars).max(num.len());
    let values: Vec<BigInt> = (0..=n0 as i64)
        .map(|n| {
            if nvars == 0 {
                return num.get(n as usize).cloned().unwrap_or_default();
            }
            num.iter()
                .enumerate()
                .map(|(k, c)| c * binomial_int(n - k as i64 + nvars as i64 - 1, nvars as u32 - 1))
                .sum()
        })
        .collect();
    let tail = if nvars == 0 {
        HilbertPolynomial::zero()
    } else {
        num.iter()
            .enumerate()
            .fold(HilbertPolynomial::zero(), |acc, (k, c)| {
                let b = HilbertPolynomial::binomial(nvars as i64 - 1 - k as i64, nvars as u32 - 1);
                acc.add(&b.scale(&BigRational::from_integer(c.clone())))
            })
    };
    Ok(HilbertFunction::new(values, tail))
}

/// H^{(t)}: t-fold iterated partial sums.
pub fn iterate_sum(h: &HilbertFunction, t: u32) -> Result<HilbertFunction> {
    if t > MAX_ITERATE {
        return Err(Error::ScaleExceeded(format!(
            "iteration {t} (limit {MAX_ITERATE})"
        )));
    }
    let mut cur = h.clone();
    for _ in 0..t {
        let d = cur.tail.degree().map_or(0, |d| d + 1);
        let upto = cur.n0() + d + 1;
        let mut sums = Vec::with_capacity(upto + 1);
        let mut acc = BigInt::zero();
        for n in 0..=upto {
            acc += cur.value(n);
            sums.push(acc.clone());
        }
        let points: Vec<(i64, BigRational)> = (cur.n0()..=upto)
            .map(|n| (n as i64, BigRational::from_integer(sums[n].clone())))
            .collect();
        let tail = HilbertPolynomial::interpolate(&points);
        sums.truncate(cur.n0() + 1);
        cur = HilbertFunction::new(sums, tail);
    }
    Ok(cur)
}

/// Φ^{(t)}(n) = C(n+t-1, n), with Φ^{(0)} the indicator of n = 0.
pub fn phi(t: u32, n: u32) -> BigUint {
    if t == 0 {
        return if n == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    binomial_int(n as i64 + t as i64 - 1, n)
        .to_biguint()
        .expect("nonnegative")
}

/// Φ^{(t)} as a Hilbert function.
pub fn phi_function(t: u32) -> HilbertFunction {
    let base = HilbertFunction::new(vec![BigInt::one()], HilbertPolynomial::zero());
    iterate_sum(&base, t.min(MAX_ITERATE)).expect("t within range")
}

/// Greedy decomposition P = Σ C(T + a_i - i + 1, a_i).
pub fn decompose(p: &HilbertPolynomial) -> Result<ADecomposition> {
    let mut cur = p.clone();
    let mut out: Vec<u32> = Vec::new();
    let fail = |why: String| Error::NotAHilbertPolynomial(format!("{p}: {why}"));
    while !cur.is_zero() {
        let a = cur.degree().expect("nonzero") as u32;
        if out.last().is_some_and(|&prev| a > prev) {
            return Err(fail("degrees increase".into()));
        }
        if cur.coeffs.last().expect("nonzero").is_negative() {
            return Err(fail("negative leading coefficient".into()));
        }
        if a == 0 {
            let c = &cur.coeffs[0];
            if !is_integral(c) {
                return Err(fail("non-integral constant".into()));
            }
            let k: usize = c
                .to_integer()
                .try_into()
                .ok()
                .filter(|&k: &usize| out.len() + k <= MAX_DECOMPOSITION_LENGTH)
                .ok_or_else(|| fail("decomposition too long".into()))?;
            out.extend(std::iter::repeat_n(0, k));
            break;
        }
        if out.len() >= MAX_DECOMPOSITION_LENGTH {
            return Err(fail("decomposition too long".into()));
        }
        out.push(a);
        cur = cur.sub(&HilbertPolynomial::binomial(a as i64, a)).shift(1);
    }
    Ok(ADecomposition(out))
}

/// Σ C(T + a_i - i + 1, a_i).
pub fn recompose(a: &ADecomposition) -> Result<HilbertPolynomial> {
    if a.0.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotAHilbertPolynomial(format!(
            "{a} is not nonincreasing"
        )));
    }
    let zeros = a.0.iter().filter(|&&x| x == 0).count();
    let mut p = HilbertPolynomial::zero();
    for (i, &ai) in a.0.iter().enumerate().filter(|(_, &x)| x > 0) {
        p = p.add(&HilbertPolynomial::binomial(ai as i64 - i as i64, ai));
    }
    Ok(
        p.add(&HilbertPolynomial::constant(BigRational::from_integer(
            zeros.into(),
        ))),
    )
}

/// Order on Hilbert polynomials via lexicographic order on a(P).
pub fn compare(p: &HilbertPolynomial, q: &HilbertPolynomial) -> Result<Ordering> {
    Ok(decompose(p)?.cmp(&decompose(q)?))
}

/// Eventual pointwise comparison, evaluated at n.
pub fn compare_at(p: &HilbertPolynomial, q: &HilbertPolynomial, n: i64) -> Ordering {
    p.eval_i64(n).cmp(&q.eval_i64(n))
}

/// Parse a monomial list such as "x^2,x*y" over the given variable names.
pub fn parse_monomials(text: &str, vars: &[&str]) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let mut m = vec![0u32; vars.len()];
        if item != "1" {
            for factor in item.split('*').map(str::trim) {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (
                        n.trim(),
                        e.trim().parse::<u32>().map_err(|_| {
                            Error::BadParameters(format!("bad exponent in {factor}"))
                        })?,
                    ),
                    None => (factor, 1),
                };
                let idx = vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::BadParameters(format!("unknown variable {name}")))?;
                m[idx] += exp;
            }
        }
        out.push(m);
    }
    Ok(out)
}
