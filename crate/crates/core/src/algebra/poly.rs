//! Sparse polynomials in split variables (y | u) over an exact field.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::field::{FieldSpec, Scalar};
use crate::error::{Error, Result};

/// Exponent of a monomial y^B u^A.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentPair {
    pub b: Vec<u32>,
    pub a: Vec<u32>,
}

impl ExponentPair {
    pub fn new(b: Vec<u32>, a: Vec<u32>) -> Self {
        ExponentPair { b, a }
    }

    pub fn zero(r: usize, e: usize) -> Self {
        ExponentPair {
            b: vec![0; r],
            a: vec![0; e],
        }
    }

    pub fn deg_b(&self) -> u32 {
        self.b.iter().sum()
    }

    pub fn deg_a(&self) -> u32 {
        self.a.iter().sum()
    }

    pub fn total(&self) -> u32 {
        self.deg_b() + self.deg_a()
    }

    fn plus(&self, other: &ExponentPair) -> ExponentPair {
        ExponentPair {
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }
}

/// A variable of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Y(usize),
    U(usize),
}

/// Ordered parameter system (y_1..y_r | u_1..u_e) over a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub y: Vec<String>,
    pub u: Vec<String>,
    pub field: FieldSpec,
}

impl Frame {
    pub fn new(y: Vec<String>, u: Vec<String>, field: FieldSpec) -> Result<Arc<Frame>> {
        if y.is_empty() {
            return Err(Error::InvalidFrame("no y-variables".into()));
        }
        if u.is_empty() {
            return Err(Error::InvalidFrame("no u-variables".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in y.iter().chain(u.iter()) {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidFrame(format!("duplicate variable {name}")));
            }
        }
        Ok(Arc::new(Frame { y, u, field }))
    }

    /// Build a frame from string slices.
    pub fn with_names(y: &[&str], u: &[&str], field: FieldSpec) -> Result<Arc<Frame>> {
        Frame::new(
            y.iter().map(|s| s.to_string()).collect(),
            u.iter().map(|s| s.to_string()).collect(),
            field,
        )
    }

    pub fn r(&self) -> usize {
        self.y.len()
    }

    pub fn e(&self) -> usize {
        self.u.len()
    }

    pub fn nvars(&self) -> usize {
        self.r() + self.e()
    }

    pub fn var_name(&self, v: Var) -> &str {
        match v {
            Var::Y(i) => &self.y[i],
            Var::U(j) => &self.u[j],
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(i) = self.y.iter().position(|n| n == name) {
            return Some(Var::Y(i));
        }
        self.u.iter().position(|n| n == name).map(Var::U)
    }

    /// Index of a variable in the combined order y_1..y_r, u_1..u_e.
    pub fn flat_index(&self, v: Var) -> usize {
        match v {
            Var::Y(i) => i,
            Var::U(j) => self.r() + j,
        }
    }

    pub fn flat_var(&self, k: usize) -> Var {
        if k < self.r() {
            Var::Y(k)
        } else {
            Var::U(k - self.r())
        }
    }

    /// Same names over another field.
    pub fn with_field(&self, field: FieldSpec) -> Arc<Frame> {
        Arc::new(Frame {
            y: self.y.clone(),
            u: self.u.clone(),
            field,
        })
    }

    /// Same field, renamed variables.
    pub fn renamed(&self, y: Vec<String>, u: Vec<String>) -> Result<Arc<Frame>> {
        Frame::new(y, u, self.field.clone())
    }
}

/// Extended rational ℚ ∪ {∞}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(BigRational),
    Infinite,
}

impl Extended {
    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn from_int(n: i64) -> Self {
        Extended::Finite(BigRational::from_integer(BigInt::from(n)))
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => write!(f, "{q}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// Non-zero semi-positive linear form on ℚ^e.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    coeffs: Vec<BigRational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(Error::BadParameters(
                "linear form has a negative coefficient".into(),
            ));
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::BadParameters("linear form is zero".into()));
        }
        Ok(LinearForm { coeffs })
    }

    /// L_0(a) = a_1 + ... + a_e.
    pub fn l0(e: usize) -> Self {
        LinearForm {
            coeffs: vec![BigRational::one(); e],
        }
    }

    pub fn from_ints(c: &[i64]) -> Result<Self> {
        LinearForm::new(
            c.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_positive())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.first().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, v: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(v)
            .fold(BigRational::zero(), |acc, (c, x)| acc + c * x)
    }

    pub fn eval_int(&self, a: &[u32]) -> BigRational {
        self.coeffs
            .iter()
            .zip(a)
            .fold(BigRational::zero(), |acc, (c, &x)| {
                acc + c * BigRational::from_integer(x.into())
            })
    }
}

/// Which initial form to take.
#[derive(Clone, Debug)]
pub enum Selector {
    /// in_0: the pure-y part of degree n_(u)(f).
    Zero,
    /// in_L with respect to the valuation |B| + L(A).
    Form(LinearForm),
    /// in_v = in_0 + terms whose point A/(n-|B|) equals v.
    Vertex(Vec<BigRational>),
    /// in_0 + terms whose point lies on {L = level}.
    Face(LinearForm, BigRational),
}

/// Sparse polynomial in k[y, u].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    frame: Arc<Frame>,
    terms: BTreeMap<ExponentPair, Scalar>,
}

fn rat_u32(x: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl Polynomial {
    pub fn zero(frame: &Arc<Frame>) -> Self {
        Polynomial {
            frame: frame.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(frame: &Arc<Frame>, c: Scalar) -> Self {
        let mut p = Polynomial::zero(frame);
        p.add_term(ExponentPair::zero(frame.r(), frame.e()), c);
        p
    }

    pub fn one(frame: &Arc<Frame>) -> Self {
        Polynomial::constant(frame, frame.field.one())
    }

    pub fn from_i64(frame: &Arc<Frame>, n: i64) -> Self {
        Polynomial::constant(frame, frame.field.from_i64(n))
    }

    pub fn var(frame: &Arc<Frame>, v: Var) -> Self {
        let mut ep = ExponentPair::zero(frame.r(), frame.e());
        match v {
            Var::Y(i) => ep.b[i] = 1,
            Var::U(j) => ep.a[j] = 1,
        }
        Polynomial::monomial(frame, ep, frame.field.one())
    }

    pub fn y(frame: &Arc<Frame>, i: usize) -> Self {
        Polynomial::var(frame, Var::Y(i))
    }

    pub fn u(frame: &Arc<Frame>, j: usize) -> Self {
        Polynomial::var(frame, Var::U(j))
    }

    pub fn monomial(frame: &Arc<Frame>, ep: ExponentPair, c: Scalar) -> Self {
        let mut p = Polynomial::zero(frame);
        p.add_term(ep, c);
        p
    }

    /// Monomial u^A with coefficient one.
    pub fn u_monomial(frame: &Arc<Frame>, a: &[u32]) -> Self {
        let ep = ExponentPair::new(vec![0; frame.r()], a.to_vec());
        Polynomial::monomial(frame, ep, frame.field.one())
    }

    pub fn from_terms<I>(frame: &Arc<Frame>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentPair, Scalar)>,
    {
        let mut p = Polynomial::zero(frame);
        for (ep, c) in terms {
            if ep.b.len() != frame.r() || ep.a.len() != frame.e() {
                return Err(Error::FrameMismatch(
                    "exponent length differs from frame".into(),
                ));
            }
            p.add_term(ep, c);
        }
        Ok(p)
    }

    /// Add c·y^B u^A in place, dropping the term if it cancels.
    pub fn add_term(&mut self, ep: ExponentPair, c: Scalar) {
        let field = &self.frame.field;
        if field.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&ep) {
            Some(old) => {
                let s = field.add(old, &c);
                if field.is_zero(&s) {
                    self.terms.remove(&ep);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(ep, c);
            }
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn field(&self) -> &FieldSpec {
        &self.frame.field
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentPair, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_map(&self) -> &BTreeMap<ExponentPair, Scalar> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, ep: &ExponentPair) -> Scalar {
        self.terms
            .get(ep)
            .cloned()
            .unwrap_or_else(|| self.frame.field.zero())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|ep| ep.total() == 0)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&ExponentPair::zero(self.frame.r(), self.frame.e()))
    }

    pub fn is_unit(&self) -> bool {
        !self.frame.field.is_zero(&self.constant_term())
    }

    fn check_frame(&self, other: &Polynomial) {
        assert!(
            self.frame == other.frame,
            "polynomials live in different frames"
        );
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let field = &self.frame.field;
        if field.is_zero(c) {
            return Polynomial::zero(&self.frame);
        }
        Polynomial {
            frame: self.frame.clone(),
            terms: self
                .terms
                .iter()
                .map(|(ep, x)| (ep.clone(), field.mul(x, c)))
                .collect(),
        }
    }

    /// Multiply by y^B u^A.
    pub fn shift(&self, ep: &ExponentPair) -> Polynomial {
        Polynomial {
            frame: self.frame.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.plus(ep), x.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.frame);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// n_(u)(f): least |B| among terms with A = 0, or None (∞) if f ∈ ⟨u⟩.
    pub fn order_mod_u(&self) -> Option<u32> {
        self.terms
            .keys()
            .filter(|ep| ep.a.iter().all(|&x| x == 0))
            .map(|ep| ep.deg_b())
            .min()
    }

    /// v_m(f): least total degree, None for f = 0.
    pub fn multiplicity(&self) -> Option<u32> {
        self.terms.keys().map(|ep| ep.total()).min()
    }

    /// Total degree, None for f = 0.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|ep| ep.total()).max()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|ep| match v {
                Var::Y(i) => ep.b[i],
                Var::U(j) => ep.a[j],
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|ep| ep.total());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    /// Homogeneous component of total degree d.
    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        self.filter(|ep| ep.total() == d)
    }

    pub fn filter<F: Fn(&ExponentPair) -> bool>(&self, keep: F) -> Polynomial {
        Polynomial {
            frame: self.frame.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(ep, _)| keep(ep))
                .map(|(ep, c)| (ep.clone(), c.clone()))
                .collect(),
        }
    }

    /// v_L(f) = min |B| + L(A).
    pub fn valuation(&self, l: &LinearForm) -> Extended {
        self.terms
            .keys()
            .map(|ep| rat_u32(ep.deg_b()) + l.eval_int(&ep.a))
            .min()
            .map(Extended::Finite)
            .unwrap_or(Extended::Infinite)
    }

    /// The point A/(n - |B|) of a term, for |B| < n.
    pub fn term_point(ep: &ExponentPair, n: u32) -> Option<Vec<BigRational>> {
        let db = ep.deg_b();
        if db >= n {
            return None;
        }
        let den = rat_u32(n - db);
        Some(ep.a.iter().map(|&x| rat_u32(x) / &den).collect())
    }

    pub fn initial_form(&self, sel: &Selector) -> Result<Polynomial> {
        match sel {
            Selector::Form(l) => {
                let v = match self.valuation(l) {
                    Extended::Finite(v) => v,
                    Extended::Infinite => return Ok(self.clone()),
                };
                Ok(self.filter(|ep| rat_u32(ep.deg_b()) + l.eval_int(&ep.a) == v))
            }
            Selector::Zero => {
                let n = self.require_order()?;
                Ok(self.filter(|ep| ep.deg_a() == 0 && ep.deg_b() == n))
            }
            Selector::Vertex(v) => {
                if v.len() != self.frame.e() {
                    return Err(Error::WrongDimension {
                        expected: self.frame.e(),
                        got: v.len(),
                    });
                }
                let n = self.require_order()?;
                Ok(self.filter(|ep| {
                    if ep.deg_a() == 0 && ep.deg_b() == n {
                        return true;
                    }
                    let db = ep.deg_b();
                    if db >= n {
                        return false;
                    }
                    let w = rat_u32(n - db);
                    ep.a.iter().zip(v).all(|(&x, vi)| rat_u32(x) == vi * &w)
                }))
            }
            Selector::Face(l, level) => {
                if !l.is_positive() {
                    return Err(Error::UnboundedFace(format!("{:?}", l.coeffs())));
                }
                let n = self.require_order()?;
                Ok(self.filter(|ep| {
                    if ep.deg_a() == 0 && ep.deg_b() == n {
                        return true;
                    }
                    let db = ep.deg_b();
                    if db >= n {
                        return false;
                    }
                    l.eval_int(&ep.a) == level * rat_u32(n - db)
                }))
            }
        }
    }

    fn require_order(&self) -> Result<u32> {
        self.order_mod_u()
            .ok_or_else(|| Error::InvalidLabel(format!("{self} lies in the ideal of u")))
    }

    /// Evaluate the ring homomorphism y_i ↦ y_images[i], u_j ↦ u_images[j]
    /// into `target` (whose field must contain this field).
    pub fn compose(
        &self,
        target: &Arc<Frame>,
        y_images: &[Polynomial],
        u_images: &[Polynomial],
    ) -> Result<Polynomial> {
        if y_images.len() != self.frame.r() || u_images.len() != self.frame.e() {
            return Err(Error::FrameMismatch("wrong number of images".into()));
        }
        for img in y_images.iter().chain(u_images) {
            if img.frame != *target {
                return Err(Error::FrameMismatch(
                    "substitution image lives in another frame".into(),
                ));
            }
        }
        let mut cache: HashMap<(Var, u32), Polynomial> = HashMap::new();
        let mut power = |v: Var, k: u32| -> Polynomial {
            if let Some(p) = cache.get(&(v, k)) {
                return p.clone();
            }
            let base = match v {
                Var::Y(i) => &y_images[i],
                Var::U(j) => &u_images[j],
            };
            // build from the largest cached lower power
            let mut start = 0;
            for j in (1..k).rev() {
                if cache.contains_key(&(v, j)) {
                    start = j;
                    break;
                }
            }
            let mut acc = if start == 0 {
                Polynomial::one(target)
            } else {
                cache[&(v, start)].clone()
            };
            for j in start + 1..=k {
                acc = &acc * base;
                cache.insert((v, j), acc.clone());
            }
            acc
        };
        let mut out = Polynomial::zero(target);
        for (ep, c) in &self.terms {
            let c = target.field.embed(&self.frame.field, c)?;
            let mut t = Polynomial::constant(target, c);
            for (i, &k) in ep.b.iter().enumerate() {
                if k > 0 {
                    t = &t * &power(Var::Y(i), k);
                }
            }
            for (j, &k) in ep.a.iter().enumerate() {
                if k > 0 {
                    t = &t * &power(Var::U(j), k);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Replace one variable by `image` (same frame).
    pub fn substitute(&self, v: Var, image: &Polynomial) -> Result<Polynomial> {
        let frame = self.frame.clone();
        let mut ys: Vec<Polynomial> = (0..frame.r()).map(|i| Polynomial::y(&frame, i)).collect();
        let mut us: Vec<Polynomial> = (0..frame.e()).map(|j| Polynomial::u(&frame, j)).collect();
        match v {
            Var::Y(i) => ys[i] = image.clone(),
            Var::U(j) => us[j] = image.clone(),
        }
        self.compose(&frame, &ys, &us)
    }

    /// Simultaneous substitution of several variables (same frame).
    pub fn substitute_many(&self, map: &[(Var, Polynomial)]) -> Result<Polynomial> {
        let frame = self.frame.clone();
        let mut ys: Vec<Polynomial> = (0..frame.r()).map(|i| Polynomial::y(&frame, i)).collect();
        let mut us: Vec<Polynomial> = (0..frame.e()).map(|j| Polynomial::u(&frame, j)).collect();
        for (v, img) in map {
            match v {
                Var::Y(i) => ys[*i] = img.clone(),
                Var::U(j) => us[*j] = img.clone(),
            }
        }
        self.compose(&frame, &ys, &us)
    }

    /// Exact division by u^A; NonDivisible if some term is not a multiple.
    pub fn div_u_monomial(&self, a: &[u32]) -> Result<Polynomial> {
        let mut terms = BTreeMap::new();
        for (ep, c) in &self.terms {
            let mut na = ep.a.clone();
            for (x, &d) in na.iter_mut().zip(a) {
                if *x < d {
                    return Err(Error::NonDivisible(format!(
                        "term with u-exponent {:?} by u^{:?}",
                        ep.a, a
                    )));
                }
                *x -= d;
            }
            terms.insert(ExponentPair::new(ep.b.clone(), na), c.clone());
        }
        Ok(Polynomial {
            frame: self.frame.clone(),
            terms,
        })
    }

    /// Largest k with u_j^k dividing f (None for f = 0).
    pub fn u_divisibility(&self, j: usize) -> Option<u32> {
        self.terms.keys().map(|ep| ep.a[j]).min()
    }

    /// Move every term to a new exponent in `target`; `None` from the map
    /// signals an impossible exponent (e.g. negative) and raises NonDivisible.
    pub fn map_exponents<F>(&self, target: &Arc<Frame>, map: F) -> Result<Polynomial>
    where
        F: Fn(&ExponentPair) -> Option<ExponentPair>,
    {
        let mut out = Polynomial::zero(target);
        for (ep, c) in &self.terms {
            let ne = map(ep).ok_or_else(|| {
                Error::NonDivisible(format!(
                    "exponent (B={:?}, A={:?}) has no image",
                    ep.b, ep.a
                ))
            })?;
            let c = target.field.embed(&self.frame.field, c)?;
            out.add_term(ne, c);
        }
        Ok(out)
    }

    /// Reinterpret in a frame with the same shape (renamed variables or a larger field).
    pub fn embed_into(&self, target: &Arc<Frame>) -> Result<Polynomial> {
        if target.r() != self.frame.r() || target.e() != self.frame.e() {
            return Err(Error::FrameMismatch("frames have different shapes".into()));
        }
        self.map_exponents(target, |ep| Some(ep.clone()))
    }

    /// Formal partial derivative.
    pub fn derivative(&self, v: Var) -> Polynomial {
        let field = &self.frame.field;
        let mut out = Polynomial::zero(&self.frame);
        for (ep, c) in &self.terms {
            let k = match v {
                Var::Y(i) => ep.b[i],
                Var::U(j) => ep.a[j],
            };
            if k == 0 {
                continue;
            }
            let mut ne = ep.clone();
            match v {
                Var::Y(i) => ne.b[i] -= 1,
                Var::U(j) => ne.a[j] -= 1,
            }
            out.add_term(ne, field.mul(c, &field.from_i64(k as i64)));
        }
        out
    }

    /// Largest term in the exponent order.
    pub fn leading(&self) -> Option<(&ExponentPair, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn format_monomial(&self, ep: &ExponentPair) -> String {
        let mut parts = Vec::new();
        for (i, &k) in ep.b.iter().enumerate() {
            push_power(&mut parts, &self.frame.y[i], k);
        }
        for (j, &k) in ep.a.iter().enumerate() {
            push_power(&mut parts, &self.frame.u[j], k);
        }
        parts.join("*")
    }

    /// Terms in display order: higher y-degree first, then higher total degree.
    pub fn display_order(&self) -> Vec<(&ExponentPair, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(x, _), (y, _)| {
            y.deg_b()
                .cmp(&x.deg_b())
                .then(y.b.cmp(&x.b))
                .then(y.deg_a().cmp(&x.deg_a()))
                .then(y.a.cmp(&x.a))
        });
        v
    }
}

fn push_power(parts: &mut Vec<String>, name: &str, k: u32) {
    match k {
        0 => {}
        1 => parts.push(name.to_string()),
        k => parts.push(format!("{name}^{k}")),
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.frame.field;
        for (idx, (ep, c)) in self.display_order().into_iter().enumerate() {
            let negative = field.is_negative_display(c);
            let c_abs = if negative { field.neg(c) } else { c.clone() };
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = self.format_monomial(ep);
            let coeff = field.format(&c_abs);
            let wrapped = if field.is_compound(&c_abs) {
                format!("({coeff})")
            } else {
                coeff
            };
            if mono.is_empty() {
                write!(f, "{wrapped}")?;
            } else if field.is_one(&c_abs) {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{wrapped}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check_frame(rhs);
        let mut out = self.clone();
        for (ep, c) in &rhs.terms {
            out.add_term(ep.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let field = &self.frame.field;
        Polynomial {
            frame: self.frame.clone(),
            terms: self
                .terms
                .iter()
                .map(|(ep, c)| (ep.clone(), field.neg(c)))
                .collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check_frame(rhs);
        let field = &self.frame.field;
        let mut out = Polynomial::zero(&self.frame);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.plus(e2), field.mul(c1, c2));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::rat;

    fn frame_q(u: &[&str]) -> Arc<Frame> {
        Frame::with_names(&["y"], u, FieldSpec::Rationals).unwrap()
    }

    #[test]
    fn order_and_valuation() {
        let fr = frame_q(&["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let f = &y.pow(2) + &u1.pow(3);
        assert_eq!(f.order_mod_u(), Some(2));
        assert_eq!(f.valuation(&LinearForm::l0(2)), Extended::from_int(2));
        let g = &(&y * &u1) + &u2.pow(5);
        let l = LinearForm::new(vec![rat(1, 1), rat(1, 2)]).unwrap();
        assert_eq!(g.valuation(&l), Extended::from_int(2));
        assert_eq!(u1.order_mod_u(), None);
        assert_eq!(Polynomial::zero(&fr).valuation(&l), Extended::Infinite);
    }

    #[test]
    fn vertex_initial_form() {
        let fr = frame_q(&["u1"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let f = &(&y.pow(2) + &u1.pow(3)) + &(&y * &u1.pow(4));
        let in0 = f.initial_form(&Selector::Zero).unwrap();
        assert_eq!(in0, y.pow(2));
        let inv = f.initial_form(&Selector::Vertex(vec![rat(3, 2)])).unwrap();
        assert_eq!(inv, &y.pow(2) + &u1.pow(3));
    }

    #[test]
    fn frobenius_substitution() {
        let fr = Frame::with_names(&["y"], &["u1"], FieldSpec::prime(3).unwrap()).unwrap();
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let f = y.pow(3);
        let g = f.substitute(Var::Y(0), &(&y + &u1)).unwrap();
        assert_eq!(g, &y.pow(3) + &u1.pow(3));
    }

    #[test]
    fn division_by_u_monomial() {
        let fr = frame_q(&["u1", "u2"]);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let f = &(&u1 * &u2) + &u1.pow(2);
        assert_eq!(f.div_u_monomial(&[1, 0]).unwrap(), &u2 + &u1);
        assert!(matches!(
            f.div_u_monomial(&[0, 1]),
            Err(Error::NonDivisible(_))
        ));
    }

    #[test]
    fn display_puts_y_first() {
        let fr = frame_q(&["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let f = &(&u1.pow(3) - &y.pow(2).scale(&FieldSpec::Rationals.from_i64(2))) + &y;
        assert_eq!(f.to_string(), "-2*y^2 + y + u1^3");
    }
}
