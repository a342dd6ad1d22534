//! Chart transforms of labels under blow-ups of the closed point and of the
//! curve (y, u_1), with nearness classification.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::algebra::{ExponentPair, Extended, FieldSpec, Frame, Polynomial, Scalar, UPoly, Var};
use crate::charpoly::{char_polyhedron, BoundaryComponent, Label};
use crate::error::{Error, Result};

/// Id given to the exceptional component created by a chart.
pub const EXCEPTIONAL_PREFIX: &str = "E";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartSpec {
    /// origin of the chart u_1 ≠ 0, the point (1:0:…:0)
    PointU1,
    /// origin of the chart u_2 ≠ 0, the point (0:1)
    PointU2,
    /// the point u_2/u_1 = -φ, reached through ũ_2 = u_2 + φ u_1 (φ ∈ k[u_1])
    Translated(Polynomial),
    /// closed point of the exceptional line defined by an irreducible Φ(U_1, U_2)
    Nonrational(Polynomial),
    /// blow-up of the curve (y, u_1)
    CurveU1,
    /// blow-up of the curve (y, u_2)
    CurveU2,
}

impl ChartSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ChartSpec::PointU1 => "point-u1",
            ChartSpec::PointU2 => "point-u2",
            ChartSpec::Translated(_) => "point-translated",
            ChartSpec::Nonrational(_) => "point-nonrational",
            ChartSpec::CurveU1 => "curve-u1",
            ChartSpec::CurveU2 => "curve-u2",
        }
    }

    pub fn is_point(&self) -> bool {
        !matches!(self, ChartSpec::CurveU1 | ChartSpec::CurveU2)
    }

    /// Degree of the residue field extension of the chart's center point.
    pub fn residue_degree(&self) -> usize {
        match self {
            ChartSpec::Nonrational(phi) => phi.degree().unwrap_or(1) as usize,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ChartSpec::Translated(phi) => serde_json::json!({
                "kind": self.kind(), "phi": phi.to_string()
            }),
            ChartSpec::Nonrational(phi) => serde_json::json!({
                "kind": self.kind(), "Phi": phi.to_string()
            }),
            _ => serde_json::json!({ "kind": self.kind() }),
        }
    }
}

impl fmt::Display for ChartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartSpec::Translated(phi) => write!(f, "point-translated({phi})"),
            ChartSpec::Nonrational(phi) => write!(f, "point-nonrational({phi})"),
            other => write!(f, "{}", other.kind()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NearnessKind {
    NotNear,
    Near,
    VeryNear,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nearness {
    pub kind: NearnessKind,
    pub delta: Extended,
}

fn exceptional_id(label: &Label) -> String {
    let k = label
        .boundary()
        .iter()
        .filter(|b| b.id.starts_with(EXCEPTIONAL_PREFIX))
        .count();
    format!("{EXCEPTIONAL_PREFIX}{}", k + 1)
}

/// Strict transform of a boundary generator under an exponent map whose
/// a_j-shift is given by `order_along_center`; units drop out.
fn transform_boundary<F>(
    label: &Label,
    frame: &Arc<Frame>,
    exceptional_index: usize,
    map: F,
) -> Result<Vec<BoundaryComponent>>
where
    F: Fn(&Polynomial) -> Result<Polynomial>,
{
    let mut out = Vec::new();
    for b in label.boundary() {
        let l = map(&b.l)?;
        if l.is_unit() {
            continue;
        }
        out.push(BoundaryComponent {
            id: b.id.clone(),
            l,
            old: b.old,
        });
    }
    out.push(BoundaryComponent {
        id: exceptional_id(label),
        l: Polynomial::u(frame, exceptional_index),
        old: false,
    });
    Ok(out)
}

fn total_transform_point_u1(f: &Polynomial, frame: &Arc<Frame>, shift: u32) -> Result<Polynomial> {
    f.map_exponents(frame, |ep| {
        let s = ep.deg_a() + ep.deg_b();
        let a1 = s.checked_sub(shift)?;
        let mut a = ep.a.clone();
        a[0] = a1;
        Some(ExponentPair::new(ep.b.clone(), a))
    })
}

/// y = u_1 y', u_j = u_1 u_j' (j ≥ 2), divided by u_1^{n_i}.
fn point_u1(label: &Label, frame: &Arc<Frame>) -> Result<Label> {
    let gens = label
        .generators()
        .iter()
        .zip(label.orders())
        .map(|(g, &n)| total_transform_point_u1(g, frame, n))
        .collect::<Result<Vec<_>>>()?;
    let bnd = transform_boundary(label, frame, 0, |l| {
        let m = l.multiplicity().unwrap_or(0);
        total_transform_point_u1(l, frame, m)
    })?;
    Label::new(frame, gens, bnd)
}

fn total_transform_point_u2(f: &Polynomial, shift: u32) -> Result<Polynomial> {
    f.map_exponents(f.frame(), |ep| {
        let s = ep.deg_a() + ep.deg_b();
        let a2 = s.checked_sub(shift)?;
        let mut a = ep.a.clone();
        a[1] = a2;
        Some(ExponentPair::new(ep.b.clone(), a))
    })
}

fn point_u2(label: &Label) -> Result<Label> {
    if label.e() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: label.e(),
        });
    }
    let frame = label.frame().clone();
    let gens = label
        .generators()
        .iter()
        .zip(label.orders())
        .map(|(g, &n)| total_transform_point_u2(g, n))
        .collect::<Result<Vec<_>>>()?;
    let bnd = transform_boundary(label, &frame, 1, |l| {
        let m = l.multiplicity().unwrap_or(0);
        total_transform_point_u2(l, m)
    })?;
    Label::new(&frame, gens, bnd)
}

fn total_transform_curve(f: &Polynomial, j: usize, shift: u32) -> Result<Polynomial> {
    f.map_exponents(f.frame(), |ep| {
        let aj = (ep.a[j] + ep.deg_b()).checked_sub(shift)?;
        let mut a = ep.a.clone();
        a[j] = aj;
        Some(ExponentPair::new(ep.b.clone(), a))
    })
}

/// Order of f along the curve (y, u_j).
fn order_along_curve(f: &Polynomial, j: usize) -> u32 {
    f.terms()
        .map(|(ep, _)| ep.deg_b() + ep.a[j])
        .min()
        .unwrap_or(0)
}

/// Blow-up of (y, u_j): y = u_j y', divided by u_j^{n_i}.
pub fn curve_chart_along(label: &Label, j: usize) -> Result<Label> {
    if j >= label.e() {
        return Err(Error::BadIndex(j));
    }
    let frame = label.frame().clone();
    let gens = label
        .generators()
        .iter()
        .zip(label.orders())
        .map(|(g, &n)| total_transform_curve(g, j, n))
        .collect::<Result<Vec<_>>>()?;
    let bnd = transform_boundary(label, &frame, j, |l| {
        total_transform_curve(l, j, order_along_curve(l, j))
    })?;
    Label::new(&frame, gens, bnd)
}

/// Whether every generator has order at least n_i along (y, u_j).
pub fn curve_is_permissible(label: &Label, j: usize) -> bool {
    j < label.e()
        && label
            .generators()
            .iter()
            .zip(label.orders())
            .all(|(g, &n)| order_along_curve(g, j) >= n)
}

/// Blow-up of (y, u_1).
pub fn curve_chart(label: &Label) -> Result<Label> {
    curve_chart_along(label, 0)
}

/// u_2 ↦ u_2 - φ u_1 so that the symbol u_2 now denotes ũ_2 = u_2 + φ u_1.
pub fn translate(label: &Label, phi: &Polynomial) -> Result<Label> {
    if label.e() < 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: label.e(),
        });
    }
    let frame = label.frame().clone();
    if phi.frame() != &frame {
        return Err(Error::FrameMismatch("translation parameter frame".into()));
    }
    if phi
        .terms()
        .any(|(ep, _)| ep.deg_b() > 0 || ep.a[1..].iter().any(|&x| x > 0))
    {
        return Err(Error::BadParameters(format!(
            "translation φ = {phi} must lie in k[u1]"
        )));
    }
    let image = &Polynomial::u(&frame, 1) - &(phi * &Polynomial::u(&frame, 0));
    label.transform(&frame, |p| p.substitute(Var::U(1), &image))
}

/// Φ(1, t) as a univariate polynomial, checking homogeneity and U_1 ∤ Φ.
pub fn dehomogenize(phi: &Polynomial) -> Result<UPoly> {
    let field = phi.field().clone();
    let d = phi
        .degree()
        .ok_or_else(|| Error::BadParameters("Φ is zero".into()))?;
    if !phi.is_homogeneous() || phi.terms().any(|(ep, _)| ep.deg_b() > 0) {
        return Err(Error::BadParameters(format!(
            "Φ = {phi} must be a form in U1, U2"
        )));
    }
    if phi.frame().e() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: phi.frame().e(),
        });
    }
    let mut coeffs = vec![field.zero(); d as usize + 1];
    for (ep, c) in phi.terms() {
        coeffs[ep.a[1] as usize] = c.clone();
    }
    let g = UPoly::new(&field, coeffs);
    if g.degree() != d as usize {
        return Err(Error::BadParameters(format!("U1 divides Φ = {phi}")));
    }
    Ok(g)
}

/// Residue field k[θ]/Φ(1, θ) of the closed point Φ = 0 on the exceptional line.
pub fn residue_field(phi: &Polynomial) -> Result<FieldSpec> {
    let g = dehomogenize(phi)?.monic();
    if g.degree() < 2 {
        return Err(Error::BadParameters("Φ must have degree at least 2".into()));
    }
    let p = match phi.field() {
        FieldSpec::Prime(p) => *p,
        other => {
            return Err(Error::UnsupportedField(format!(
                "non-rational charts need a prime base field, got {other}"
            )))
        }
    };
    let modulus: Vec<i64> = g
        .coeffs()
        .iter()
        .map(|c| match c {
            Scalar::Residue(x) => *x as i64,
            _ => unreachable!("prime field"),
        })
        .collect();
    FieldSpec::extension(p, &modulus)
}

fn nonrational(label: &Label, phi: &Polynomial) -> Result<Label> {
    if label.e() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            got: label.e(),
        });
    }
    let ext = residue_field(phi)?;
    let theta = ext.theta().expect("extension field");
    let frame = label.frame().with_field(ext.clone());
    let lifted = label.transform(&frame, |p| p.embed_into(&frame))?;
    let blown = point_u1(&lifted, &frame)?;
    // the chart parameter u_2' = u_2/u_1 equals w + θ at the point
    let image = &Polynomial::u(&frame, 1) + &Polynomial::constant(&frame, theta);
    blown.transform(&frame, |p| p.substitute(Var::U(1), &image))
}

pub fn point_chart(label: &Label, chart: &ChartSpec) -> Result<Label> {
    match chart {
        ChartSpec::PointU1 => point_u1(label, label.frame()),
        ChartSpec::PointU2 => point_u2(label),
        ChartSpec::Translated(phi) => {
            let t = translate(label, phi)?;
            point_u1(&t, t.frame())
        }
        ChartSpec::Nonrational(phi) => nonrational(label, phi),
        ChartSpec::CurveU1 => curve_chart(label),
        ChartSpec::CurveU2 => curve_chart_along(label, 1),
    }
}

/// Apply any chart.
pub fn apply_chart(label: &Label, chart: &ChartSpec) -> Result<Label> {
    point_chart(label, chart)
}

/// Near iff δ' ≥ 1, very near iff δ' > 1.
pub fn classify_nearness(label_out: &Label) -> Nearness {
    let delta = match char_polyhedron(label_out).delta() {
        Some(d) => Extended::Finite(d),
        None => Extended::Infinite,
    };
    let one = Extended::Finite(BigRational::one());
    let kind = if delta > one {
        NearnessKind::VeryNear
    } else if delta == one {
        NearnessKind::Near
    } else {
        NearnessKind::NotNear
    };
    Nearness { kind, delta }
}

/// Nearness of a chart transform: the orders n_i must survive, then δ' decides.
pub fn nearness_of_transform(source: &Label, out: &Label) -> Nearness {
    let n = classify_nearness(out);
    if out.orders() == source.orders() {
        n
    } else {
        Nearness {
            kind: NearnessKind::NotNear,
            delta: n.delta,
        }
    }
}

/// Transform and classify; an undefined chart counts as not near.
pub fn chart_and_classify(label: &Label, chart: &ChartSpec) -> Result<(Option<Label>, Nearness)> {
    match point_chart(label, chart) {
        Ok(out) => {
            let n = nearness_of_transform(label, &out);
            Ok((Some(out), n))
        }
        Err(Error::NonDivisible(_)) | Err(Error::InvalidLabel(_)) => Ok((
            None,
            Nearness {
                kind: NearnessKind::NotNear,
                delta: Extended::Finite(BigRational::from_integer(0.into())),
            },
        )),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::polyhedron::AffineMap;

    fn frame(field: FieldSpec, u: &[&str]) -> Arc<Frame> {
        Frame::with_names(&["y"], u, field).unwrap()
    }

    #[test]
    fn cusp_point_chart() {
        let fr = frame(FieldSpec::Rationals, &["u1"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let l = Label::single(&y.pow(2) + &u1.pow(3)).unwrap();
        let out = point_chart(&l, &ChartSpec::PointU1).unwrap();
        assert_eq!(out.generators()[0], &y.pow(2) + &u1);
        assert_eq!(classify_nearness(&out).kind, NearnessKind::NotNear);
        let l = Label::single(&y.pow(2) + &u1.pow(4)).unwrap();
        let out = point_chart(&l, &ChartSpec::PointU1).unwrap();
        assert_eq!(classify_nearness(&out).kind, NearnessKind::Near);
        assert_eq!(out.boundary().len(), 1);
        assert!(!out.boundary()[0].old);
    }

    #[test]
    fn curve_chart_examples() {
        let fr = frame(FieldSpec::Rationals, &["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let l = Label::single(&y.pow(2) + &(&u1.pow(3) * &u2)).unwrap();
        let out = curve_chart(&l).unwrap();
        assert_eq!(out.generators()[0], &y.pow(2) + &(&u1 * &u2));
        assert_eq!(
            char_polyhedron(&out).vertices(),
            &[vec![rat(1, 2), rat(1, 2)]]
        );
        let bad = Label::single(&y.pow(2) + &(&u1 * &u2)).unwrap();
        assert!(matches!(curve_chart(&bad), Err(Error::NonDivisible(_))));
    }

    #[test]
    fn point_u1_polyhedron_law() {
        let fr = frame(FieldSpec::Rationals, &["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let f = &(&y.pow(3) + &(&y * &u1.pow(4))) + &(&u1.pow(2) * &u2.pow(5));
        let l = Label::single(f).unwrap();
        let out = point_chart(&l, &ChartSpec::PointU1).unwrap();
        let expect = char_polyhedron(&l)
            .map_and_rebuild(&AffineMap::point_u1(2))
            .unwrap();
        assert_eq!(char_polyhedron(&out), expect);
    }

    #[test]
    fn nonrational_chart_over_f3() {
        let fr = frame(FieldSpec::prime(3).unwrap(), &["u1", "u2"]);
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let phi = &u1.pow(2) + &u2.pow(2);
        let l = Label::single(&y.pow(2) + &phi.pow(2)).unwrap();
        let out = point_chart(&l, &ChartSpec::Nonrational(phi)).unwrap();
        assert_eq!(out.frame().field.degree(), 2);
        assert_eq!(
            char_polyhedron(&out).vertices(),
            &[vec![rat(1, 1), rat(1, 1)]]
        );
    }

    #[test]
    fn nonrational_needs_irreducible_form() {
        let fr = frame(FieldSpec::prime(5).unwrap(), &["u1", "u2"]);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        // U1^2 + U2^2 splits over F_5
        assert!(matches!(
            residue_field(&(&u1.pow(2) + &u2.pow(2))),
            Err(Error::ReducibleModulus(5))
        ));
        let q = frame(FieldSpec::Rationals, &["u1", "u2"]);
        let v1 = Polynomial::u(&q, 0);
        let v2 = Polynomial::u(&q, 1);
        assert!(matches!(
            residue_field(&(&v1.pow(2) + &v2.pow(2))),
            Err(Error::UnsupportedField(_))
        ));
    }
}
