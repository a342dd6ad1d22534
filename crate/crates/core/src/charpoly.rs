//! Labels (f, y, u), their characteristic polyhedra, boundary polyhedra,
//! ν*-invariants, directrix and the δ-criteria.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::algebra::linalg::Echelon;
use crate::algebra::{
    ExponentPair, Extended, FieldSpec, Frame, LinearForm, Polynomial, Scalar, Selector,
};
use crate::error::{Error, Result};
use crate::polyhedron::{FSubset, Point};

/// Limit on the number of translation vectors tried by the char-p directrix search.
pub const DIRECTRIX_SEARCH_LIMIT: u64 = 100_000;

/// A boundary component given by a parameter l of multiplicity one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComponent {
    pub id: String,
    pub l: Polynomial,
    pub old: bool,
}

/// Generators f_1..f_N with cached orders n_i = n_(u)(f_i) and a boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    frame: Arc<Frame>,
    generators: Vec<Polynomial>,
    orders: Vec<u32>,
    boundary: Vec<BoundaryComponent>,
}

impl Label {
    pub fn new(
        frame: &Arc<Frame>,
        generators: Vec<Polynomial>,
        boundary: Vec<BoundaryComponent>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidLabel("no generators".into()));
        }
        let mut orders = Vec::with_capacity(generators.len());
        for g in &generators {
            if g.frame() != frame {
                return Err(Error::FrameMismatch(
                    "generator frame differs from label".into(),
                ));
            }
            if g.is_zero() {
                return Err(Error::InvalidLabel("zero generator".into()));
            }
            let n = g
                .order_mod_u()
                .ok_or_else(|| Error::InvalidLabel(format!("{g} lies in the ideal of u")))?;
            orders.push(n);
        }
        for b in &boundary {
            if b.l.frame() != frame {
                return Err(Error::FrameMismatch(format!("boundary {} frame", b.id)));
            }
            if b.l.multiplicity() != Some(1) {
                return Err(Error::InvalidLabel(format!(
                    "boundary {} does not have multiplicity one",
                    b.id
                )));
            }
        }
        Ok(Label {
            frame: frame.clone(),
            generators,
            orders,
            boundary,
        })
    }

    pub fn single(f: Polynomial) -> Result<Self> {
        let frame = f.frame().clone();
        Label::new(&frame, vec![f], Vec::new())
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn boundary(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn e(&self) -> usize {
        self.frame.e()
    }

    pub fn r(&self) -> usize {
        self.frame.r()
    }

    /// Replace the generators, keeping the boundary; orders are recomputed.
    pub fn with_generators(&self, generators: Vec<Polynomial>) -> Result<Label> {
        Label::new(&self.frame, generators, self.boundary.clone())
    }

    pub fn with_boundary(&self, boundary: Vec<BoundaryComponent>) -> Result<Label> {
        Label::new(&self.frame, self.generators.clone(), boundary)
    }

    /// Apply the same ring map to generators and boundary generators.
    pub fn transform<F>(&self, frame: &Arc<Frame>, map: F) -> Result<Label>
    where
        F: Fn(&Polynomial) -> Result<Polynomial>,
    {
        let gens = self
            .generators
            .iter()
            .map(&map)
            .collect::<Result<Vec<_>>>()?;
        let bnd = self
            .boundary
            .iter()
            .map(|b| {
                Ok(BoundaryComponent {
                    id: b.id.clone(),
                    l: map(&b.l)?,
                    old: b.old,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Label::new(frame, gens, bnd)
    }

    pub fn max_order(&self) -> u32 {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    /// True when the cached orders still equal n_(u) of the generators.
    pub fn orders_consistent(&self) -> bool {
        self.generators
            .iter()
            .zip(&self.orders)
            .all(|(g, &n)| g.order_mod_u() == Some(n))
    }

    /// Serialize generators and boundary as strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.frame.field.to_string(),
            "y": self.frame.y,
            "u": self.frame.u,
            "generators": self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "orders": self.orders,
            "boundary": self.boundary.iter().map(|b| serde_json::json!({
                "id": b.id,
                "l": b.l.to_string(),
                "old": b.old,
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(
            f,
            "(({}), ({}), ({}))",
            gens.join(", "),
            self.frame.y.join(","),
            self.frame.u.join(",")
        )
    }
}

fn term_points(f: &Polynomial, n: u32) -> Vec<Point> {
    f.terms()
        .filter_map(|(ep, _)| Polynomial::term_point(ep, n))
        .collect()
}

/// All points A/(n_i - |B|) of the label, before minimalization.
pub fn label_points(label: &Label) -> Vec<Point> {
    label
        .generators
        .iter()
        .zip(&label.orders)
        .flat_map(|(g, &n)| term_points(g, n))
        .collect()
}

/// Δ(f, y, u).
pub fn char_polyhedron(label: &Label) -> FSubset {
    FSubset::minimal(label.e(), &label_points(label)).expect("term points are nonnegative")
}

/// Δ(f, y, u_{≤s}): the u_j with j > s are treated as units of the
/// localization at ⟨y, u_{≤s}⟩, so orders are taken modulo ⟨u_{≤s}⟩.
pub fn char_polyhedron_partial(label: &Label, s: usize) -> Result<FSubset> {
    if s == 0 || s > label.e() {
        return Err(Error::BadIndex(s));
    }
    let mut pts = Vec::new();
    for g in &label.generators {
        let n = g
            .terms()
            .filter(|(ep, _)| ep.a[..s].iter().all(|&x| x == 0))
            .map(|(ep, _)| ep.deg_b())
            .min()
            .ok_or_else(|| Error::InvalidLabel(format!("{g} lies in the ideal of u_<=s")))?;
        let mut seen = BTreeSet::new();
        for (ep, _) in g.terms() {
            let db = ep.deg_b();
            if db >= n {
                continue;
            }
            // distinct (B, π_s A) give nonzero grouped coefficients
            if !seen.insert((ep.b.clone(), ep.a[..s].to_vec())) {
                continue;
            }
            let den = BigRational::from_integer((n - db).into());
            pts.push(
                ep.a[..s]
                    .iter()
                    .map(|&x| BigRational::from_integer(x.into()) / &den)
                    .collect(),
            );
        }
    }
    FSubset::minimal(s, &pts)
}

/// Points of the label lying in the essential boundary of Δ.
pub fn essential_points(label: &Label) -> Vec<Point> {
    let delta = char_polyhedron(label);
    let mut pts: Vec<Point> = label_points(label);
    pts.sort();
    pts.dedup();
    pts.into_iter()
        .filter(|p| delta.in_essential_boundary(p))
        .collect()
}

/// Δ^O: the polyhedron of f together with the old boundary generators.
pub fn boundary_polyhedron(label: &Label) -> Result<FSubset> {
    let mut pts = label_points(label);
    for b in label.boundary.iter().filter(|b| b.old) {
        let n =
            b.l.order_mod_u()
                .ok_or_else(|| Error::BoundaryInUIdeal(format!("{}: {}", b.id, b.l)))?;
        pts.extend(term_points(&b.l, n));
    }
    FSubset::minimal(label.e(), &pts)
}

/// δ(Δ(f,y,u)) with ∞ for the empty polyhedron.
pub fn delta(label: &Label) -> Extended {
    match char_polyhedron(label).delta() {
        Some(d) => Extended::Finite(d),
        None => Extended::Infinite,
    }
}

/// ν*: degrees of a minimal homogeneous generating system, finite part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NuStar(pub Vec<u32>);

impl fmt::Display for NuStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        parts.push("inf".into());
        write!(f, "({})", parts.join(","))
    }
}

fn flat_exponent(ep: &ExponentPair) -> Vec<u32> {
    ep.b.iter().chain(ep.a.iter()).copied().collect()
}

/// Exponent vectors of total degree d in n variables, lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = cur.len();
        if i + 1 == n {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// Coordinates of the degree-d slice spanned by multiples of `forms`.
pub(crate) struct DegreeSlice {
    pub index: HashMap<Vec<u32>, usize>,
    pub monomials: Vec<Vec<u32>>,
}

impl DegreeSlice {
    pub fn new(n: usize, d: u32) -> Self {
        let monomials = monomials_of_degree(n, d);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        DegreeSlice { index, monomials }
    }

    pub fn vector(&self, field: &FieldSpec, f: &Polynomial) -> Vec<Scalar> {
        let mut v = vec![field.zero(); self.monomials.len()];
        for (ep, c) in f.terms() {
            if let Some(&i) = self.index.get(&flat_exponent(ep)) {
                v[i] = c.clone();
            }
        }
        v
    }
}

fn multiply_flat(f: &Polynomial, m: &[u32]) -> Polynomial {
    let r = f.frame().r();
    let ep = ExponentPair::new(m[..r].to_vec(), m[r..].to_vec());
    f.shift(&ep)
}

/// ν* of the ideal generated by homogeneous forms (in all variables).
pub fn nu_star(forms: &[Polynomial]) -> Result<NuStar> {
    let mut forms: Vec<&Polynomial> = forms.iter().filter(|f| !f.is_zero()).collect();
    if forms.is_empty() {
        return Ok(NuStar(Vec::new()));
    }
    for f in &forms {
        if !f.is_homogeneous() {
            return Err(Error::InvalidLabel(format!("{f} is not homogeneous")));
        }
    }
    forms.sort_by_key(|f| f.degree().unwrap());
    let frame = forms[0].frame().clone();
    let n = frame.nvars();
    let mut chosen: Vec<&Polynomial> = Vec::new();
    let mut degrees = Vec::new();
    let mut i = 0;
    while i < forms.len() {
        let d = forms[i].degree().unwrap();
        let slice = DegreeSlice::new(n, d);
        let mut ech = Echelon::new(&frame.field, slice.monomials.len());
        for g in &chosen {
            let dg = g.degree().unwrap();
            for m in monomials_of_degree(n, d - dg) {
                ech.insert(&slice.vector(&frame.field, &multiply_flat(g, &m)));
            }
        }
        while i < forms.len() && forms[i].degree().unwrap() == d {
            if ech.insert(&slice.vector(&frame.field, forms[i])) {
                chosen.push(forms[i]);
                degrees.push(d);
            }
            i += 1;
        }
    }
    Ok(NuStar(degrees))
}

/// Linear subspace of the degree-one forms, in the basis of frame variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether this is exactly the span of Y_1..Y_r.
    pub fn is_y_span(&self, frame: &Frame, field: &FieldSpec) -> bool {
        self.dim() == frame.r()
            && self
                .basis
                .iter()
                .all(|v| v[frame.r()..].iter().all(|c| field.is_zero(c)))
    }

    pub fn format(&self, frame: &Frame, field: &FieldSpec) -> Vec<String> {
        self.basis
            .iter()
            .map(|v| {
                let mut parts = Vec::new();
                for (k, c) in v.iter().enumerate() {
                    if field.is_zero(c) {
                        continue;
                    }
                    let name = frame.var_name(frame.flat_var(k)).to_uppercase();
                    if field.is_one(c) {
                        parts.push(name);
                    } else {
                        parts.push(format!("{}*{}", field.format(c), name));
                    }
                }
                parts.join(" + ")
            })
            .collect()
    }
}

fn span_of(
    field: &FieldSpec,
    n: usize,
    vectors: impl IntoIterator<Item = Vec<Scalar>>,
) -> Subspace {
    let mut ech = Echelon::new(field, n);
    for v in vectors {
        ech.insert(&v);
    }
    Subspace { basis: ech.basis() }
}

fn linear_vector(f: &Polynomial) -> Vec<Scalar> {
    let frame = f.frame();
    let mut v = vec![frame.field.zero(); frame.nvars()];
    for (ep, c) in f.terms() {
        if let Some(k) = flat_exponent(ep).iter().position(|&x| x == 1) {
            v[k] = c.clone();
        }
    }
    v
}

/// Vectors w with F(X + λw) = F(X) identically in λ.
fn invariance_space(f: &Polynomial) -> Result<Vec<Vec<Scalar>>> {
    let frame = f.frame().clone();
    let field = frame.field.clone();
    let n = frame.nvars();
    let total = field
        .size()
        .and_then(|q| q.to_u64())
        .and_then(|q| q.checked_pow(n as u32))
        .filter(|&t| t <= DIRECTRIX_SEARCH_LIMIT)
        .ok_or_else(|| {
            Error::UnsupportedField(format!(
                "directrix search over {field} in {n} variables exceeds {DIRECTRIX_SEARCH_LIMIT} candidates"
            ))
        })?;
    let elements = field.elements(total).expect("finite field");
    let q = elements.len() as u64;
    // augmented frame with one extra parameter λ
    let mut us = frame.u.clone();
    us.push("__lambda".into());
    let aug = Frame::new(frame.y.clone(), us, field.clone())?;
    let lifted = f.map_exponents(&aug, |ep| {
        let mut a = ep.a.clone();
        a.push(0);
        Some(ExponentPair::new(ep.b.clone(), a))
    })?;
    let lambda = Polynomial::u(&aug, frame.e());
    let mut found = Vec::new();
    for idx in 1..total {
        let mut w = Vec::with_capacity(n);
        let mut t = idx;
        for _ in 0..n {
            w.push(elements[(t % q) as usize].clone());
            t /= q;
        }
        let ys: Vec<Polynomial> = (0..frame.r())
            .map(|i| &Polynomial::y(&aug, i) + &lambda.scale(&w[i]))
            .collect();
        let uu: Vec<Polynomial> = (0..=frame.e())
            .map(|j| {
                if j < frame.e() {
                    &Polynomial::u(&aug, j) + &lambda.scale(&w[frame.r() + j])
                } else {
                    lambda.clone()
                }
            })
            .collect();
        if lifted.compose(&aug, &ys, &uu)? == lifted {
            found.push(w);
        }
    }
    Ok(found)
}

/// Orthogonal complement of span(ws) in k^n.
fn complement(field: &FieldSpec, n: usize, ws: &[Vec<Scalar>]) -> Subspace {
    let w = span_of(field, n, ws.iter().cloned());
    if w.basis.is_empty() {
        return span_of(
            field,
            n,
            (0..n).map(|k| (0..n).map(|j| field.from_i64((j == k) as i64)).collect()),
        );
    }
    let b = w.basis.clone();
    let zeros = vec![field.zero(); b.len()];
    let (_, kernel) = crate::algebra::linalg::solve(field, &b, &zeros, n).expect("homogeneous");
    span_of(field, n, kernel)
}

/// Smallest subspace T of degree-one forms with F ∈ k[T].
pub fn directrix(f: &Polynomial) -> Result<Subspace> {
    if f.is_zero() || !f.is_homogeneous() {
        return Err(Error::InvalidLabel("directrix needs a nonzero form".into()));
    }
    let frame = f.frame().clone();
    let field = frame.field.clone();
    let n = frame.nvars();
    let d = f.degree().unwrap();
    if d == 0 {
        return Ok(Subspace { basis: Vec::new() });
    }
    if field.characteristic() == 0 {
        // span of all (d-1)-fold partial derivatives
        let mut layer = vec![f.clone()];
        for _ in 1..d {
            let slice_deg = layer[0].degree().unwrap_or(0).saturating_sub(1);
            let slice = DegreeSlice::new(n, slice_deg);
            let mut ech = Echelon::new(&field, slice.monomials.len());
            let mut next = Vec::new();
            for g in &layer {
                for k in 0..n {
                    let dg = g.derivative(frame.flat_var(k));
                    if !dg.is_zero() && ech.insert(&slice.vector(&field, &dg)) {
                        next.push(dg);
                    }
                }
            }
            layer = next;
        }
        return Ok(span_of(&field, n, layer.iter().map(linear_vector)));
    }
    let ws = invariance_space(f)?;
    Ok(complement(&field, n, &ws))
}

/// Sum of the directrices of the given forms.
pub fn directrix_of_forms(forms: &[Polynomial]) -> Result<Subspace> {
    let frame = forms
        .first()
        .ok_or_else(|| Error::InvalidLabel("no forms".into()))?
        .frame()
        .clone();
    let mut vecs = Vec::new();
    for f in forms {
        vecs.extend(directrix(f)?.basis);
    }
    Ok(span_of(&frame.field, frame.nvars(), vecs))
}

/// in_m(f_i): lowest-degree homogeneous parts.
pub fn initial_forms_m(label: &Label) -> Vec<Polynomial> {
    label
        .generators
        .iter()
        .map(|g| g.homogeneous_part(g.multiplicity().unwrap_or(0)))
        .collect()
}

/// Whether the directrix of the initial forms is exactly ⟨Y⟩.
pub fn check_strictly_admissible(label: &Label) -> Result<bool> {
    let t = directrix_of_forms(&initial_forms_m(label))?;
    Ok(t.is_y_span(label.frame(), &label.frame().field))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaCriteria {
    pub delta_ge_1: bool,
    pub delta_gt_1: bool,
    pub delta_eq_1: bool,
}

/// δ ≥ 1 ⇔ n_i = v_m(f_i); δ > 1 ⇔ additionally in_m(f_i) = in_0(f_i).
pub fn delta_criteria(label: &Label) -> Result<DeltaCriteria> {
    let mut ge = true;
    let mut gt = true;
    for (g, &n) in label.generators.iter().zip(&label.orders) {
        let vm = g.multiplicity().unwrap();
        if vm != n {
            ge = false;
            gt = false;
            continue;
        }
        let in_m = g.homogeneous_part(vm);
        let in_0 = g.initial_form(&Selector::Zero)?;
        if in_m != in_0 {
            gt = false;
        }
    }
    let d = delta(label);
    let one = Extended::Finite(BigRational::one());
    if (d >= one) != ge || (d > one) != gt {
        return Err(Error::InvariantViolation(format!(
            "δ = {d} disagrees with order criteria (ge={ge}, gt={gt})"
        )));
    }
    Ok(DeltaCriteria {
        delta_ge_1: ge,
        delta_gt_1: gt,
        delta_eq_1: ge && !gt,
    })
}

/// L-initial forms along a face, used when testing preparedness.
pub fn face_initials(
    label: &Label,
    l: &LinearForm,
    level: &BigRational,
) -> Result<Vec<Polynomial>> {
    label
        .generators
        .iter()
        .map(|g| g.initial_form(&Selector::Face(l.clone(), level.clone())))
        .collect()
}

/// v-initial forms of all generators.
pub fn vertex_initials(label: &Label, v: &[BigRational]) -> Result<Vec<Polynomial>> {
    label
        .generators
        .iter()
        .map(|g| g.initial_form(&Selector::Vertex(v.to_vec())))
        .collect()
}

/// Rename y_i to another name (used to present z = y + d as a new frame).
pub fn rename_y(label: &Label, names: Vec<String>) -> Result<Label> {
    let frame = label.frame.renamed(names, label.frame.u.clone())?;
    label.transform(&frame, |p| p.embed_into(&frame))
}

/// Convenience: single-variable lookup for tests and the CLI.
pub fn var(frame: &Arc<Frame>, name: &str) -> Option<Polynomial> {
    frame.lookup(name).map(|v| Polynomial::var(frame, v))
}
