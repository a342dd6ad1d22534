//! Normalization, solvability, dissolution and the vertex-preparation loop.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::linalg::{solve, Echelon};
use crate::algebra::{
    is_integral, ExponentPair, FieldSpec, LinearForm, Polynomial, Scalar, Selector, Var,
};
use crate::charpoly::{char_polyhedron, monomials_of_degree, Label};
use crate::error::{Error, Result};
use crate::polyhedron::{format_point, Face, Point};

/// Environment variable overriding the preparation step cap.
pub const STEP_CAP_ENV: &str = "CHARPOLY_STEP_CAP";

/// Limit on |k|^r for exhaustive solvability search.
const SOLVE_SEARCH_LIMIT: u64 = 100_000;

/// Minimal generators of E(φ_1..φ_m) up to a degree bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeadingExponents {
    pub generators: Vec<Vec<u32>>,
    pub bound: u32,
}

impl LeadingExponents {
    pub fn contains(&self, b: &[u32]) -> bool {
        self.generators
            .iter()
            .any(|g| g.iter().zip(b).all(|(x, y)| x <= y))
    }
}

fn y_part(f: &Polynomial) -> Vec<(Vec<u32>, Scalar)> {
    f.terms().map(|(ep, c)| (ep.b.clone(), c.clone())).collect()
}

/// Span of all Y-monomial multiples of `forms` in degree d, with monomials in
/// lex-descending column order so that pivots are lex-leading exponents.
struct YSlice {
    monomials: Vec<Vec<u32>>,
    echelon: Echelon,
    /// (generator index, multiplier exponent) for every inserted vector
    origin: Vec<(usize, Vec<u32>)>,
}

impl YSlice {
    fn build(field: &FieldSpec, r: usize, forms: &[Polynomial], d: u32) -> YSlice {
        let monomials = monomials_of_degree(r, d);
        let index: std::collections::HashMap<Vec<u32>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let mut echelon = Echelon::new(field, monomials.len());
        let mut origin = Vec::new();
        for (j, f) in forms.iter().enumerate() {
            let Some(df) = f.degree() else { continue };
            if df > d {
                continue;
            }
            for m in monomials_of_degree(r, d - df) {
                let mut v = vec![field.zero(); monomials.len()];
                for (b, c) in y_part(f) {
                    let key: Vec<u32> = b.iter().zip(&m).map(|(x, y)| x + y).collect();
                    v[index[&key]] = c;
                }
                echelon.insert(&v);
                origin.push((j, m));
            }
        }
        YSlice {
            monomials,
            echelon,
            origin,
        }
    }

    fn leading(&self) -> Vec<Vec<u32>> {
        self.echelon
            .pivots()
            .into_iter()
            .map(|p| self.monomials[p].clone())
            .collect()
    }
}

/// E(forms) for forms in k[Y], computed through degree `bound`.
pub fn leading_exponent_set(forms: &[Polynomial], bound: u32) -> LeadingExponents {
    let forms: Vec<Polynomial> = forms.iter().filter(|f| !f.is_zero()).cloned().collect();
    let mut gens: Vec<Vec<u32>> = Vec::new();
    if forms.is_empty() {
        return LeadingExponents {
            generators: gens,
            bound,
        };
    }
    let frame = forms[0].frame().clone();
    let min_deg = forms.iter().filter_map(|f| f.degree()).min().unwrap();
    for d in min_deg..=bound {
        let slice = YSlice::build(&frame.field, frame.r(), &forms, d);
        for lead in slice.leading() {
            let covered = gens
                .iter()
                .any(|g| g.iter().zip(&lead).all(|(x, y)| x <= y));
            if !covered {
                gens.push(lead);
            }
        }
    }
    gens.sort();
    LeadingExponents {
        generators: gens,
        bound,
    }
}

/// Cofactors c_j(Y) with Σ c_j φ_j = Y^B + (lex-smaller terms), if B ∈ E.
fn ideal_witness(forms: &[Polynomial], b: &[u32]) -> Option<Vec<(usize, Vec<u32>, Scalar)>> {
    let frame = forms.first()?.frame().clone();
    let field = &frame.field;
    let d: u32 = b.iter().sum();
    let slice = YSlice::build(field, frame.r(), forms, d);
    let col = slice.monomials.iter().position(|m| m.as_slice() == b)?;
    // the echelon row with this pivot, written as a combination of the forms
    if !slice.echelon.pivots().contains(&col) {
        return None;
    }
    let row = slice
        .echelon
        .basis()
        .into_iter()
        .find(|r| r.iter().position(|x| !field.is_zero(x)) == Some(col))?;
    let (_, combo) = slice.echelon.reduce(&row);
    let mut out = Vec::new();
    for (k, c) in combo.iter().enumerate() {
        if !field.is_zero(c) {
            let (j, m) = &slice.origin[k];
            out.push((*j, m.clone(), c.clone()));
        }
    }
    Some(out)
}

fn rat_u32(x: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Whether the term y^B u^A of a generator with order n lies at the point v.
fn term_at_point(ep: &ExponentPair, n: u32, v: &[BigRational]) -> bool {
    let db = ep.deg_b();
    if db >= n {
        return false;
    }
    let w = rat_u32(n - db);
    ep.a.iter().zip(v).all(|(&x, vi)| rat_u32(x) == vi * &w)
}

fn term_on_face(ep: &ExponentPair, n: u32, l: &LinearForm, level: &BigRational) -> bool {
    let db = ep.deg_b();
    db < n && l.eval_int(&ep.a) == level * rat_u32(n - db)
}

fn in0_forms(label: &Label) -> Result<Vec<Polynomial>> {
    label
        .generators()
        .iter()
        .map(|g| g.initial_form(&Selector::Zero))
        .collect()
}

fn max_deg_b(label: &Label) -> u32 {
    label
        .generators()
        .iter()
        .flat_map(|g| g.terms().map(|(ep, _)| ep.deg_b()))
        .max()
        .unwrap_or(0)
}

/// Check F_i ∉ ⟨F_1..F_{i-1}⟩ for the in_0 forms.
pub fn check_weakly_normalized(label: &Label) -> Result<()> {
    let forms = in0_forms(label)?;
    for i in 1..forms.len() {
        let d = forms[i].degree().unwrap_or(0);
        let slice = YSlice::build(&label.frame().field, label.r(), &forms[..i], d);
        let frame = label.frame();
        let monomial_index: std::collections::HashMap<Vec<u32>, usize> = slice
            .monomials
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        let mut v = vec![frame.field.zero(); slice.monomials.len()];
        for (b, c) in y_part(&forms[i]) {
            v[monomial_index[&b]] = c;
        }
        if slice.echelon.contains(&v) {
            return Err(Error::NotWeaklyNormalized(i));
        }
    }
    Ok(())
}

fn offending<P>(label: &Label, at: P) -> Result<Option<(usize, ExponentPair, Scalar)>>
where
    P: Fn(&ExponentPair, u32) -> bool,
{
    let forms = in0_forms(label)?;
    let bound = max_deg_b(label);
    for i in 1..label.generators().len() {
        let e = leading_exponent_set(&forms[..i], bound);
        if e.generators.is_empty() {
            continue;
        }
        let n = label.orders()[i];
        // largest offending B first
        let hit = label.generators()[i]
            .terms()
            .rev()
            .filter(|(ep, _)| at(ep, n) && e.contains(&ep.b))
            .max_by(|(x, _), (y, _)| x.b.cmp(&y.b).then(x.a.cmp(&y.a)));
        if let Some((ep, c)) = hit {
            return Ok(Some((i, ep.clone(), c.clone())));
        }
    }
    Ok(None)
}

/// No term of in_v(f_i)^+ has y-exponent in E(in_0(f_1)..in_0(f_{i-1})).
pub fn is_normalized_at(label: &Label, v: &[BigRational]) -> Result<bool> {
    Ok(offending(label, |ep, n| term_at_point(ep, n, v))?.is_none())
}

pub fn is_normalized_along(label: &Label, face: &Face) -> Result<bool> {
    Ok(offending(label, |ep, n| term_on_face(ep, n, &face.form, &face.level))?.is_none())
}

fn eliminate(label: &Label, i: usize, ep: &ExponentPair, c: &Scalar) -> Result<Label> {
    let forms = in0_forms(label)?;
    let frame = label.frame().clone();
    let field = &frame.field;
    let witness = ideal_witness(&forms[..i], &ep.b).ok_or_else(|| {
        Error::InvariantViolation(format!("no witness for leading exponent {:?}", ep.b))
    })?;
    let mut correction = Polynomial::zero(&frame);
    for (j, m, coef) in witness {
        let shift = ExponentPair::new(m, ep.a.clone());
        correction = &correction
            + &label.generators()[j]
                .shift(&shift)
                .scale(&field.mul(&coef, c));
    }
    let mut gens = label.generators().to_vec();
    gens[i] = &gens[i] - &correction;
    let out = label.with_generators(gens)?;
    if out.orders() != label.orders() {
        return Err(Error::InvariantViolation(
            "normalization changed the orders n_i".into(),
        ));
    }
    Ok(out)
}

fn normalize_where<P>(label: &Label, at: P, cap: usize) -> Result<Label>
where
    P: Fn(&ExponentPair, u32) -> bool + Copy,
{
    check_weakly_normalized(label)?;
    let mut cur = label.clone();
    for _ in 0..cap {
        match offending(&cur, at)? {
            None => return Ok(cur),
            Some((i, ep, c)) => cur = eliminate(&cur, i, &ep, &c)?,
        }
    }
    Err(Error::NonTermination {
        cap,
        detail: "normalization did not converge".into(),
    })
}

/// Eliminate y-exponents in E(F_1..F_{i-1}) from in_v(f_i)^+.
pub fn normalize_at(label: &Label, v: &[BigRational]) -> Result<Label> {
    normalize_where(label, |ep, n| term_at_point(ep, n, v), 10_000)
}

/// Eliminate offending terms on a bounded face.
pub fn normalize_along_face(label: &Label, face: &Face) -> Result<Label> {
    if !face.bounded || !face.form.is_positive() {
        return Err(Error::UnboundedFace(format!("{:?}", face.form.coeffs())));
    }
    normalize_where(
        label,
        |ep, n| term_on_face(ep, n, &face.form, &face.level),
        10_000,
    )
}

/// λ with in_v(f_i) = F_i(Y + λ U^v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub lambda: Vec<Scalar>,
    pub vertex: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solvability {
    Solvable(Solution),
    NotSolvable,
    Undecided(String),
}

fn integral_vertex(v: &[BigRational]) -> Option<Vec<u32>> {
    v.iter()
        .map(|x| {
            if is_integral(x) {
                x.to_integer().to_u32()
            } else {
                None
            }
        })
        .collect()
}

/// F(Y + λ U^v) for every in_0 form.
fn translated_forms(label: &Label, lambda: &[Scalar], v: &[u32]) -> Result<Vec<Polynomial>> {
    let frame = label.frame().clone();
    let uv = Polynomial::u_monomial(&frame, v);
    let map: Vec<(Var, Polynomial)> = (0..frame.r())
        .map(|i| (Var::Y(i), &Polynomial::y(&frame, i) + &uv.scale(&lambda[i])))
        .collect();
    in0_forms(label)?
        .iter()
        .map(|f| f.substitute_many(&map))
        .collect()
}

fn check_candidate(
    label: &Label,
    lambda: &[Scalar],
    v: &[u32],
    targets: &[Polynomial],
) -> Result<bool> {
    Ok(translated_forms(label, lambda, v)?.as_slice() == targets)
}

/// Whether in_v(f) = F(Y + λU^v) for some λ ∈ k^r.
pub fn solvable_at(label: &Label, v: &[BigRational]) -> Result<Solvability> {
    let delta = char_polyhedron(label);
    if !delta.is_vertex(v) {
        return Err(Error::NotAVertex(format_point(v)));
    }
    let Some(vi) = integral_vertex(v) else {
        return Ok(Solvability::NotSolvable);
    };
    let frame = label.frame().clone();
    let field = frame.field.clone();
    let r = frame.r();
    let targets: Vec<Polynomial> = label
        .generators()
        .iter()
        .map(|g| g.initial_form(&Selector::Vertex(v.to_vec())))
        .collect::<Result<_>>()?;
    let forms = in0_forms(label)?;
    let found = |lambda: Vec<Scalar>| -> Result<Solvability> {
        if lambda.iter().all(|c| field.is_zero(c)) {
            return Ok(Solvability::NotSolvable);
        }
        if check_candidate(label, &lambda, &vi, &targets)? {
            Ok(Solvability::Solvable(Solution {
                lambda,
                vertex: vi.clone(),
            }))
        } else {
            Ok(Solvability::NotSolvable)
        }
    };

    if r == 1 {
        // F_1 = γ Y^n; read c from the first nonvanishing binomial coefficient
        let f0 = &forms[0];
        let n = label.orders()[0];
        let gamma = f0.coeff(&ExponentPair::new(vec![n], vec![0; frame.e()]));
        let p = field.characteristic();
        let k0 = (1..=n)
            .find(|&k| {
                let b = binomial(BigInt::from(n), BigInt::from(k));
                p == 0 || (b % BigInt::from(p)) != BigInt::zero()
            })
            .expect("C(n,n) = 1");
        let a: Vec<u32> = vi.iter().map(|x| x * k0).collect();
        let coef = targets[0].coeff(&ExponentPair::new(vec![n - k0], a));
        let bin = field.from_bigint(&binomial(BigInt::from(n), BigInt::from(k0)));
        let rhs = field
            .div(&coef, &field.mul(&gamma, &bin))
            .ok_or(Error::DivisionByZero)?;
        return match field.root_of_prime_power(&rhs, k0 as u64) {
            Some(c) => found(vec![c]),
            None => Ok(Solvability::Undecided(format!(
                "cannot extract a {k0}-th root in {field}"
            ))),
        };
    }

    // exhaustive search over small finite fields
    if let Some(q) = field.size().and_then(|q| q.to_u64()) {
        if q.checked_pow(r as u32)
            .is_some_and(|t| t <= SOLVE_SEARCH_LIMIT)
        {
            let elems = field.elements(q).expect("finite field");
            let total = q.pow(r as u32);
            for idx in 1..total {
                let mut t = idx;
                let lambda: Vec<Scalar> = (0..r)
                    .map(|_| {
                        let e = elems[(t % q) as usize].clone();
                        t /= q;
                        e
                    })
                    .collect();
                if check_candidate(label, &lambda, &vi, &targets)? {
                    return Ok(Solvability::Solvable(Solution { lambda, vertex: vi }));
                }
            }
            return Ok(Solvability::NotSolvable);
        }
    }

    // linear part in λ: coefficient of U^v in in_v(f_i) equals Σ_j λ_j ∂F_i/∂Y_j
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, f) in forms.iter().enumerate() {
        let partials: Vec<Polynomial> = (0..r).map(|j| f.derivative(Var::Y(j))).collect();
        let mut keys: std::collections::BTreeSet<Vec<u32>> = std::collections::BTreeSet::new();
        for p in &partials {
            keys.extend(p.terms().map(|(ep, _)| ep.b.clone()));
        }
        let target_lin: Vec<(Vec<u32>, Scalar)> = targets[i]
            .terms()
            .filter(|(ep, _)| ep.a == vi)
            .map(|(ep, c)| (ep.b.clone(), c.clone()))
            .collect();
        keys.extend(target_lin.iter().map(|(b, _)| b.clone()));
        for key in keys {
            let ep = ExponentPair::new(key.clone(), vec![0; frame.e()]);
            rows.push(partials.iter().map(|p| p.coeff(&ep)).collect::<Vec<_>>());
            rhs.push(
                target_lin
                    .iter()
                    .find(|(b, _)| *b == key)
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(|| field.zero()),
            );
        }
    }
    match solve(&field, &rows, &rhs, r) {
        None => Ok(Solvability::NotSolvable),
        Some((x, kernel)) => {
            let outcome = found(x)?;
            if matches!(outcome, Solvability::NotSolvable) && !kernel.is_empty() {
                Ok(Solvability::Undecided(
                    "linear part does not determine λ".into(),
                ))
            } else {
                Ok(outcome)
            }
        }
    }
}

/// Substitute y = z - λU^v, so that the new parameter is z = y + λu^v.
pub fn dissolve_at(label: &Label, sol: &Solution) -> Result<Label> {
    let frame = label.frame().clone();
    let uv = Polynomial::u_monomial(&frame, &sol.vertex);
    let map: Vec<(Var, Polynomial)> = (0..frame.r())
        .map(|i| {
            (
                Var::Y(i),
                &Polynomial::y(&frame, i) - &uv.scale(&sol.lambda[i]),
            )
        })
        .collect();
    let out = label.transform(&frame, |p| p.substitute_many(&map))?;
    if out.orders() != label.orders() {
        return Err(Error::InvariantViolation(
            "dissolution changed the orders n_i".into(),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrepAction {
    Normalized,
    Dissolved(Vec<Scalar>),
    Prepared,
    Undecided(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrepStep {
    pub vertex: Point,
    pub action: PrepAction,
}

#[derive(Clone, Debug)]
pub struct PrepReport {
    /// actions in the order they were taken
    pub steps: Vec<PrepStep>,
    /// final status of every vertex with |v| ≤ M, in |v|-then-lex order
    pub vertices: Vec<PrepStep>,
    pub label: Label,
}

impl PrepReport {
    pub fn undecided(&self) -> Vec<&PrepStep> {
        self.vertices
            .iter()
            .filter(|s| matches!(s.action, PrepAction::Undecided(_)))
            .collect()
    }

    pub fn dissolutions(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.action, PrepAction::Dissolved(_)))
            .count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let field = self.label.frame().field.clone();
        let step = |s: &PrepStep| {
            let (action, lambda) = match &s.action {
                PrepAction::Normalized => ("normalized", None),
                PrepAction::Dissolved(l) => (
                    "dissolved",
                    Some(l.iter().map(|c| field.format(c)).collect::<Vec<_>>()),
                ),
                PrepAction::Prepared => ("already-prepared", None),
                PrepAction::Undecided(_) => ("undecided", None),
            };
            serde_json::json!({
                "vertex": s.vertex.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "action": action,
                "lambda": lambda,
            })
        };
        serde_json::json!({
            "steps": self.steps.iter().map(step).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(step).collect::<Vec<_>>(),
            "label": self.label.to_json(),
            "polyhedron": char_polyhedron(&self.label).to_json(),
        })
    }
}

/// |v| first, then lexicographic.
pub fn vertex_order(a: &Point, b: &Point) -> Ordering {
    let sa: BigRational = a.iter().sum();
    let sb: BigRational = b.iter().sum();
    sa.cmp(&sb).then_with(|| a.cmp(b))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

/// 10 · #((1/n!)ℤ ∩ [0, M])^e.
pub fn default_step_cap(label: &Label, m: &BigRational) -> usize {
    if let Some(cap) = std::env::var(STEP_CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
    {
        return cap;
    }
    let scaled = (m * BigRational::from_integer(factorial(label.max_order()))).floor();
    let per_axis = scaled.to_integer() + BigInt::from(1);
    let total = num_traits::pow(per_axis, label.e()) * BigInt::from(10);
    total.to_usize().unwrap_or(usize::MAX)
}

fn status_at(label: &Label, v: &Point) -> Result<Option<PrepAction>> {
    if !is_normalized_at(label, v)? {
        return Ok(Some(PrepAction::Normalized));
    }
    match solvable_at(label, v)? {
        Solvability::Solvable(s) => Ok(Some(PrepAction::Dissolved(s.lambda))),
        Solvability::NotSolvable => Ok(None),
        Solvability::Undecided(why) => Ok(Some(PrepAction::Undecided(why))),
    }
}

/// Prepare every vertex with |v| ≤ M.
pub fn prepare(label: &Label, m: &BigRational) -> Result<(Label, PrepReport)> {
    let cap = default_step_cap(label, m);
    prepare_with_cap(label, m, cap)
}

pub fn prepare_with_cap(label: &Label, m: &BigRational, cap: usize) -> Result<(Label, PrepReport)> {
    check_weakly_normalized(label)?;
    let mut cur = label.clone();
    let mut steps = Vec::new();
    let mut count = 0usize;
    loop {
        let delta = char_polyhedron(&cur);
        let mut verts: Vec<Point> = delta
            .vertices()
            .iter()
            .filter(|v| &v.iter().sum::<BigRational>() <= m)
            .cloned()
            .collect();
        verts.sort_by(vertex_order);
        let mut acted = false;
        for v in &verts {
            match status_at(&cur, v)? {
                None | Some(PrepAction::Undecided(_)) | Some(PrepAction::Prepared) => continue,
                Some(PrepAction::Normalized) => {
                    cur = normalize_at(&cur, v)?;
                    steps.push(PrepStep {
                        vertex: v.clone(),
                        action: PrepAction::Normalized,
                    });
                }
                Some(PrepAction::Dissolved(lambda)) => {
                    let sol = Solution {
                        lambda: lambda.clone(),
                        vertex: integral_vertex(v).expect("solvable vertices are integral"),
                    };
                    cur = dissolve_at(&cur, &sol)?;
                    steps.push(PrepStep {
                        vertex: v.clone(),
                        action: PrepAction::Dissolved(lambda),
                    });
                }
            }
            acted = true;
            break;
        }
        if !acted {
            let mut vertices = Vec::new();
            for v in verts {
                let action = match status_at(&cur, &v)? {
                    Some(PrepAction::Undecided(why)) => PrepAction::Undecided(why),
                    _ => PrepAction::Prepared,
                };
                vertices.push(PrepStep { vertex: v, action });
            }
            let report = PrepReport {
                steps,
                vertices,
                label: cur.clone(),
            };
            return Ok((cur, report));
        }
        count += 1;
        if count >= cap {
            return Err(Error::NonTermination {
                cap,
                detail: format!(
                    "still acting after {count} steps, Δ = {}",
                    char_polyhedron(&cur)
                ),
            });
        }
    }
}

/// Prepared at v: normalized and not solvable.
pub fn is_prepared_at(label: &Label, v: &[BigRational]) -> Result<bool> {
    Ok(status_at(label, &v.to_vec())?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Frame};
    use std::sync::Arc;

    fn frame(field: FieldSpec, y: &[&str], u: &[&str]) -> Arc<Frame> {
        Frame::with_names(y, u, field).unwrap()
    }

    #[test]
    fn leading_exponents_examples() {
        let fr = frame(FieldSpec::Rationals, &["y1", "y2"], &["u1"]);
        let y1 = Polynomial::y(&fr, 0);
        let y2 = Polynomial::y(&fr, 1);
        let e = leading_exponent_set(&[&y1 * &y2, y2.pow(3)], 4);
        assert_eq!(e.generators, vec![vec![0, 3], vec![1, 1]]);
        assert!(leading_exponent_set(&[], 3).generators.is_empty());
        let e = leading_exponent_set(&[y1.pow(2)], 4);
        assert_eq!(e.generators, vec![vec![2, 0]]);
    }

    #[test]
    fn normalization_removes_offending_term() {
        let fr = frame(FieldSpec::Rationals, &["y1", "y2"], &["u1"]);
        let y1 = Polynomial::y(&fr, 0);
        let y2 = Polynomial::y(&fr, 1);
        let u1 = Polynomial::u(&fr, 0);
        let f1 = y1.pow(2);
        let f2 = &(&y2.pow(3) + &(&y1.pow(2) * &u1)) + &(&y1.pow(2) * &u1.pow(2));
        let l = Label::new(&fr, vec![f1, f2], vec![]).unwrap();
        let v = vec![rat(1, 1)];
        assert!(!is_normalized_at(&l, &v).unwrap());
        let h = normalize_at(&l, &v).unwrap();
        assert!(is_normalized_at(&h, &v).unwrap());
        let h = normalize_at(&h, &[rat(2, 1)]).unwrap();
        assert_eq!(h.generators()[1], y2.pow(3));
    }

    #[test]
    fn complete_the_square() {
        let fr = frame(FieldSpec::Rationals, &["y"], &["u1"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let f = (&y + &u1).pow(2);
        let l = Label::single(f).unwrap();
        let v = vec![rat(1, 1)];
        match solvable_at(&l, &v).unwrap() {
            Solvability::Solvable(s) => {
                assert_eq!(s.lambda, vec![FieldSpec::Rationals.one()]);
                let d = dissolve_at(&l, &s).unwrap();
                assert!(char_polyhedron(&d).is_empty());
            }
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn prepare_cusp_plus_square() {
        let fr = frame(FieldSpec::Rationals, &["y"], &["u1"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let f = &(&y + &u1).pow(2) + &u1.pow(5);
        let (out, rep) = prepare(&Label::single(f).unwrap(), &rat(5, 1)).unwrap();
        assert_eq!(rep.dissolutions(), 1);
        assert_eq!(char_polyhedron(&out).vertices(), &[vec![rat(5, 2)]]);
        assert_eq!(rep.vertices.len(), 1);
        assert_eq!(rep.vertices[0].action, PrepAction::Prepared);
    }

    #[test]
    fn non_integral_vertex_is_not_solvable() {
        let fr = frame(FieldSpec::Rationals, &["y"], &["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let l = Label::single(&y.pow(2) + &u1.pow(3)).unwrap();
        assert_eq!(
            solvable_at(&l, &[rat(3, 2), rat(0, 1)]).unwrap(),
            Solvability::NotSolvable
        );
        assert!(matches!(
            solvable_at(&l, &[rat(1, 1), rat(0, 1)]),
            Err(Error::NotAVertex(_))
        ));
    }
}
