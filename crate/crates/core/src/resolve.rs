//! Fundamental sequences and units, the resolution driver with its β^O and ζ
//! ledger, and the maximal-contact probe for y^p + y(u1u2)^N + u1^a u2^b (u1+u2)^{pA}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::algebra::{is_integral, FieldSpec, Frame, LinearForm, Polynomial, Scalar, UPoly, Var};
use crate::blowup::{
    curve_chart_along, curve_is_permissible, nearness_of_transform, point_chart, translate,
    ChartSpec, Nearness, NearnessKind,
};
use crate::charpoly::{boundary_polyhedron, char_polyhedron, face_initials, Label};
use crate::error::{Error, Result};
use crate::polyhedron::{FSubset, Invariants2};
use crate::preparation::{is_prepared_at, normalize_along_face, prepare};

pub const DEFAULT_MAX_UNITS: usize = 64;
/// Bound on curve charts inside one unit and on fundamental sequence length.
pub const MAX_CURVE_STEPS: u32 = 10_000;
/// Bound on the number of blow-ups explored by the probe.
pub const MAX_PROBE_STEPS: u32 = 64;

/// Invariants recorded at one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub delta: Option<BigRational>,
    pub vertices: Vec<Vec<BigRational>>,
    pub invariants: Option<Invariants2>,
    pub invariants_o: Option<Invariants2>,
    pub orders: Vec<u32>,
    pub field_degree: usize,
}

impl Snapshot {
    pub fn of(label: &Label) -> Self {
        let delta = char_polyhedron(label);
        let with_o = boundary_polyhedron(label).ok();
        let inv2 = |d: &FSubset| {
            if d.dim() == 2 && !d.is_empty() {
                d.invariants2().ok()
            } else {
                None
            }
        };
        Snapshot {
            delta: delta.delta(),
            invariants: inv2(&delta),
            invariants_o: with_o.as_ref().and_then(inv2),
            vertices: delta.vertices().to_vec(),
            orders: label.orders().to_vec(),
            field_degree: label.frame().field.degree(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "delta": self.delta.as_ref().map_or("inf".to_string(), |d| d.to_string()),
            "vertices": self.vertices.iter()
                .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "invariants": self.invariants,
            "invariants_o": self.invariants_o,
            "orders": self.orders,
            "field_degree": self.field_degree,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub chart: String,
    pub nearness: Option<NearnessKind>,
    pub snapshot: Snapshot,
    pub label: Option<Label>,
}

impl TraceStep {
    fn at(chart: impl Into<String>, label: &Label, nearness: Option<NearnessKind>) -> Self {
        TraceStep {
            chart: chart.into(),
            nearness,
            snapshot: Snapshot::of(label),
            label: Some(label.clone()),
        }
    }

    /// The stored snapshot agrees with a recomputation from the stored label.
    pub fn is_consistent(&self) -> bool {
        self.label
            .as_ref()
            .is_none_or(|l| Snapshot::of(l) == self.snapshot)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "chart": self.chart,
            "nearness": self.nearness,
            "snapshot": self.snapshot.to_json(),
            "generators": self.label.as_ref()
                .map(|l| l.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>()),
        })
    }
}

fn vertex_level(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |acc, x| acc + x)
}

/// Prepare at every vertex, repeating while new vertices appear further out.
pub fn prepare_totally(label: &Label) -> Result<Label> {
    let mut cur = label.clone();
    for _ in 0..8 {
        let d = char_polyhedron(&cur);
        let Some(m) = d.vertices().iter().map(|v| vertex_level(v)).max() else {
            return Ok(cur);
        };
        let (next, report) = prepare(&cur, &m)?;
        if let Some(step) = report.undecided().first() {
            return Err(Error::Inconclusive(format!(
                "solvability undecided at {:?}",
                step.vertex
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
            )));
        }
        let same = char_polyhedron(&next) == d;
        cur = next;
        if same {
            break;
        }
    }
    Ok(cur)
}

fn invariants_o(label: &Label) -> Option<Invariants2> {
    Snapshot::of(label).invariants_o
}

#[derive(Clone, Debug)]
pub struct FundamentalSequence {
    /// None when Δ is empty and no sequence terminates.
    pub m: Option<u32>,
    pub trace: Vec<TraceStep>,
}

/// Lengths along the generic points of the curves C_q: f/u1^{qn}, y/u1^q.
pub fn fundamental_sequence(label: &Label) -> Result<FundamentalSequence> {
    if label.boundary().iter().any(|b| b.old) {
        return Err(Error::BadParameters(
            "fundamental sequences need a label without old boundary".into(),
        ));
    }
    let delta = char_polyhedron(label);
    let mut trace = vec![TraceStep::at("start", label, None)];
    let Some(d0) = delta.delta() else {
        return Ok(FundamentalSequence { m: None, trace });
    };
    let (level, face) = delta.delta_face(&LinearForm::l0(label.e()))?;
    debug_assert_eq!(level, d0);
    for v in &face.vertices {
        if !is_prepared_at(label, v)? {
            return Err(Error::NotPrepared(format!(
                "δ-face vertex ({})",
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
    }
    let one = BigRational::one();
    if d0 <= one {
        return Ok(FundamentalSequence { m: Some(0), trace });
    }
    for q in 1..=MAX_CURVE_STEPS {
        let mut pts = Vec::new();
        for (g, &n) in label.generators().iter().zip(label.orders()) {
            for (ep, _) in g.terms() {
                let b = ep.deg_b();
                if b >= n {
                    continue;
                }
                let a = ep.deg_a() as i64 + q as i64 * (b as i64 - n as i64);
                if a < 0 {
                    return Err(Error::InvariantViolation(format!(
                        "f/u1^(qn) not integral at q = {q}"
                    )));
                }
                pts.push(vec![BigRational::new(a.into(), BigInt::from(n - b))]);
            }
        }
        let dq = FSubset::minimal(1, &pts)?;
        let delta_q = dq.delta().expect("nonempty");
        let near = if delta_q > one {
            NearnessKind::VeryNear
        } else if delta_q == one {
            NearnessKind::Near
        } else {
            NearnessKind::NotNear
        };
        trace.push(TraceStep {
            chart: format!("generic-curve({q})"),
            nearness: Some(near),
            snapshot: Snapshot {
                delta: Some(delta_q.clone()),
                vertices: dq.vertices().to_vec(),
                invariants: None,
                invariants_o: None,
                orders: label.orders().to_vec(),
                field_degree: label.frame().field.degree(),
            },
            label: None,
        });
        if delta_q <= one {
            return Ok(FundamentalSequence { m: Some(q), trace });
        }
    }
    Err(Error::NonTermination {
        cap: MAX_CURVE_STEPS as usize,
        detail: "fundamental sequence".into(),
    })
}

/// What the lemmas guarantee about β^O across a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaGuarantee {
    NonIncreasing,
    Strict,
    /// β' ≤ bound only.
    Bound(BigRational),
    Unknown,
}

#[derive(Clone, Debug)]
pub struct UnitRecord {
    pub chart: ChartSpec,
    pub initial: Label,
    /// Label after translation and preparation, on which the point chart acts.
    pub entry: Label,
    pub terminal: Label,
    pub m: u32,
    pub beta_o_before: Option<BigRational>,
    pub beta_o_after: Option<BigRational>,
    pub entry_invariants_o: Option<Invariants2>,
    pub exit_invariants_o: Option<Invariants2>,
    pub residue_degree: usize,
    pub nearness: Nearness,
    pub guarantee: BetaGuarantee,
    /// α^O < 1 and ε^O < 1 at the entry, checked when isolation is declared.
    pub isolation_consistent: Option<bool>,
    pub steps: Vec<TraceStep>,
}

impl UnitRecord {
    pub fn to_json(&self) -> serde_json::Value {
        let s = |q: &Option<BigRational>| q.as_ref().map(|x| x.to_string());
        json!({
            "chart": self.chart.to_json(),
            "m": self.m,
            "beta_o_before": s(&self.beta_o_before),
            "beta_o_after": s(&self.beta_o_after),
            "residue_degree": self.residue_degree,
            "nearness": self.nearness.kind,
            "isolation_consistent": self.isolation_consistent,
            "steps": self.steps.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
        })
    }
}

struct Entered {
    entry: Label,
    effective: ChartSpec,
    first: Label,
    nearness: Nearness,
}

fn enter_unit(label: &Label, chart: &ChartSpec) -> Result<Entered> {
    let (mut entry, effective) = match chart {
        ChartSpec::Translated(phi) => (translate(label, phi)?, ChartSpec::PointU1),
        ChartSpec::CurveU1 | ChartSpec::CurveU2 => {
            return Err(Error::BadParameters(
                "a unit starts with a point chart".into(),
            ))
        }
        other => (label.clone(), other.clone()),
    };
    entry = prepare_totally(&entry)?;
    if matches!(chart, ChartSpec::Nonrational(_)) {
        let delta = char_polyhedron(&entry);
        if !delta.is_empty() {
            let (_, face) = delta.delta_face(&LinearForm::l0(entry.e()))?;
            match normalize_along_face(&entry, &face) {
                Ok(n) => entry = prepare_totally(&n)?,
                Err(Error::UnboundedFace(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let first = point_chart(&entry, &effective)?;
    let first = prepare_totally(&first)?;
    let nearness = nearness_of_transform(&entry, &first);
    Ok(Entered {
        entry,
        effective,
        first,
        nearness,
    })
}

/// Point chart, then curve charts while the exceptional curve stays near.
pub fn run_unit(label: &Label, chart: &ChartSpec, isolated: bool) -> Result<UnitRecord> {
    let entered = enter_unit(label, chart)?;
    finish_unit(label, chart, entered, isolated)
}

fn finish_unit(
    initial: &Label,
    chart: &ChartSpec,
    entered: Entered,
    isolated: bool,
) -> Result<UnitRecord> {
    let Entered {
        entry,
        effective,
        first,
        nearness,
    } = entered;
    if nearness.kind == NearnessKind::NotNear {
        return Err(Error::BadParameters(format!(
            "{chart} does not lead to a near point"
        )));
    }
    let entry_inv = invariants_o(&entry);
    let mut steps = vec![TraceStep::at(
        chart.to_string(),
        &first,
        Some(nearness.kind),
    )];
    let along = usize::from(effective == ChartSpec::PointU2);
    let curve = if along == 0 {
        ChartSpec::CurveU1
    } else {
        ChartSpec::CurveU2
    };
    let mut cur = first;
    let mut curves = 0u32;
    if cur.e() == 2 {
        let one = BigRational::one();
        loop {
            let d = char_polyhedron(&cur);
            let Some(min) = d.vertices().iter().map(|v| v[along].clone()).min() else {
                break;
            };
            if min < one {
                break;
            }
            if curves >= MAX_CURVE_STEPS {
                return Err(Error::NonTermination {
                    cap: MAX_CURVE_STEPS as usize,
                    detail: "curve charts inside a unit".into(),
                });
            }
            let next = prepare_totally(&curve_chart_along(&cur, along)?)?;
            let n = nearness_of_transform(&cur, &next);
            cur = next;
            curves += 1;
            steps.push(TraceStep::at(curve.to_string(), &cur, Some(n.kind)));
            if n.kind == NearnessKind::NotNear {
                break;
            }
        }
    }
    let exit_inv = invariants_o(&cur);
    let beta_before = entry_inv.as_ref().map(|i| i.beta.clone());
    let beta_after = exit_inv.as_ref().map(|i| i.beta.clone());
    let residue_degree = chart.residue_degree();
    let guarantee = match (&effective, &entry_inv) {
        (_, None) => BetaGuarantee::Unknown,
        (ChartSpec::PointU1, _) => BetaGuarantee::NonIncreasing,
        (ChartSpec::PointU2, Some(inv)) => {
            if inv.alpha < BigRational::one() {
                BetaGuarantee::Strict
            } else {
                BetaGuarantee::Bound(&inv.beta + &inv.alpha - BigRational::one())
            }
        }
        (ChartSpec::Nonrational(_), _) if isolated => BetaGuarantee::Strict,
        _ => BetaGuarantee::Unknown,
    };
    if let (Some(b0), Some(b1)) = (&beta_before, &beta_after) {
        let ok = match &guarantee {
            BetaGuarantee::NonIncreasing => b1 <= b0,
            BetaGuarantee::Strict => b1 < b0,
            BetaGuarantee::Bound(bound) => b1 <= bound,
            BetaGuarantee::Unknown => true,
        };
        if !ok {
            return Err(Error::MonotonicityViolation(format!(
                "β^O went from {b0} to {b1} across {chart}"
            )));
        }
    }
    let isolation_consistent = if isolated {
        entry_inv
            .as_ref()
            .map(|i| i.alpha < BigRational::one() && i.epsilon < BigRational::one())
    } else {
        None
    };
    Ok(UnitRecord {
        chart: chart.clone(),
        initial: initial.clone(),
        entry,
        terminal: cur,
        m: 1 + curves,
        beta_o_before: beta_before,
        beta_o_after: beta_after,
        entry_invariants_o: entry_inv,
        exit_invariants_o: exit_inv,
        residue_degree,
        nearness,
        guarantee,
        isolation_consistent,
        steps,
    })
}

/// A point of the exceptional line read off the δ-face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub chart: ChartSpec,
    pub multiplicity: u32,
}

/// Dehomogenized residual P(1, t) and the power of U1 dividing P.
fn residual(p: &Polynomial) -> (UPoly, u32) {
    let field = p.field().clone();
    let d = p.degree().unwrap_or(0);
    let mut coeffs = vec![field.zero(); d as usize + 1];
    for (ep, c) in p.terms() {
        coeffs[ep.a[1] as usize] = c.clone();
    }
    let g = UPoly::new(&field, coeffs);
    let k = d - g.degree() as u32;
    (g, k)
}

fn homogenize(frame: &std::sync::Arc<Frame>, h: &UPoly) -> Polynomial {
    let d = h.degree() as u32;
    let mut out = Polynomial::zero(frame);
    for (j, c) in h.coeffs().iter().enumerate() {
        if !frame.field.is_zero(c) {
            let m = Polynomial::u_monomial(frame, &[d - j as u32, j as u32]);
            out = &out + &m.scale(c);
        }
    }
    out
}

fn push_candidate(out: &mut Vec<Candidate>, chart: ChartSpec, mult: u32) {
    match out.iter_mut().find(|c| c.chart == chart) {
        Some(c) => c.multiplicity = c.multiplicity.max(mult),
        None => out.push(Candidate {
            chart,
            multiplicity: mult,
        }),
    }
}

/// Candidates for near points: zeros of the δ-face residual forms on ℙ^1.
/// Also returns descriptions of factors that could not be turned into charts.
pub fn near_point_candidates(label: &Label) -> Result<(Vec<Candidate>, Vec<String>)> {
    if label.e() == 1 {
        return Ok((
            vec![Candidate {
                chart: ChartSpec::PointU1,
                multiplicity: 1,
            }],
            Vec::new(),
        ));
    }
    if label.e() != 2 {
        return Err(Error::BadParameters(format!(
            "the driver handles e ≤ 2, got e = {}",
            label.e()
        )));
    }
    let delta = char_polyhedron(label);
    let Some(d) = delta.delta() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let frame = label.frame().clone();
    let forms = face_initials(label, &LinearForm::l0(2), &d)?;
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for (form, &n) in forms.iter().zip(label.orders()) {
        let mut by_b: Vec<(Vec<u32>, Polynomial)> = Vec::new();
        for (ep, c) in form.terms() {
            if ep.deg_b() >= n {
                continue;
            }
            let mono = Polynomial::u_monomial(&frame, &ep.a).scale(c);
            match by_b.iter_mut().find(|(b, _)| *b == ep.b) {
                Some((_, p)) => *p = &*p + &mono,
                None => by_b.push((ep.b.clone(), mono)),
            }
        }
        for (_, p) in by_b {
            let (g, k) = residual(&p);
            if k > 0 {
                push_candidate(&mut out, ChartSpec::PointU2, k);
            }
            if g.degree() == 0 {
                continue;
            }
            let fac = g.factor()?;
            for (h, mult) in &fac.factors {
                if h.degree() == 1 {
                    let t = frame.field.neg(&h.monic().coeff(0));
                    let chart = if frame.field.is_zero(&t) {
                        ChartSpec::PointU1
                    } else {
                        ChartSpec::Translated(Polynomial::constant(&frame, frame.field.neg(&t)))
                    };
                    push_candidate(&mut out, chart, *mult);
                } else if matches!(frame.field, FieldSpec::Prime(_)) {
                    push_candidate(
                        &mut out,
                        ChartSpec::Nonrational(homogenize(&frame, &h.monic())),
                        *mult,
                    );
                } else {
                    skipped.push(format!("degree {} factor over {}", h.degree(), frame.field));
                }
            }
            if let Some(u) = &fac.unfactored {
                skipped.push(format!(
                    "unfactored part of degree {} over {}",
                    u.degree(),
                    frame.field
                ));
            }
        }
    }
    Ok((out, skipped))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// δ ≤ 1 at the current point: no near point survives.
    Resolved,
    /// No candidate on the exceptional line is near.
    NoNearPoint,
    EmptyPolyhedron,
    MaxUnits,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Resolved => "resolved",
            Outcome::NoNearPoint => "no-near-point",
            Outcome::EmptyPolyhedron => "empty-polyhedron",
            Outcome::MaxUnits => "max-units",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub unit: usize,
    pub chart: String,
    pub m: u32,
    pub beta_before: Option<BigRational>,
    pub beta_after: Option<BigRational>,
    pub guaranteed: bool,
    pub lattice_ok: bool,
    pub zeta_entry: Option<BigRational>,
    pub epsilon_entry: Option<BigRational>,
    pub zeta_exit: Option<BigRational>,
    pub epsilon_exit: Option<BigRational>,
    /// Whether the ζ transport identity applied (constant β^O, (1:·) chart).
    pub zeta_checked: bool,
}

impl LedgerEntry {
    pub fn beta_non_increasing(&self) -> bool {
        match (&self.beta_before, &self.beta_after) {
            (Some(b0), Some(b1)) => b1 <= b0,
            _ => true,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |q: &Option<BigRational>| q.as_ref().map(|x| x.to_string());
        json!({
            "unit": self.unit, "chart": self.chart, "m": self.m,
            "beta_before": s(&self.beta_before), "beta_after": s(&self.beta_after),
            "guaranteed": self.guaranteed, "lattice_ok": self.lattice_ok,
            "zeta_entry": s(&self.zeta_entry), "epsilon_entry": s(&self.epsilon_entry),
            "zeta_exit": s(&self.zeta_exit), "epsilon_exit": s(&self.epsilon_exit),
            "zeta_checked": self.zeta_checked,
        })
    }
}

#[derive(Clone, Debug)]
pub struct DriverOptions {
    pub max_units: usize,
    /// User-declared: no permissible curve through the points of the run.
    pub isolated: bool,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions {
            max_units: DEFAULT_MAX_UNITS,
            isolated: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DriverTrace {
    pub steps: Vec<TraceStep>,
    pub units: Vec<UnitRecord>,
    pub ledger: Vec<LedgerEntry>,
    pub outcome: Outcome,
    pub diagnostics: Vec<String>,
}

impl DriverTrace {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "outcome": self.outcome.as_str(),
            "steps": self.steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
            "units": self.units.iter().map(|u| json!({
                "chart": u.chart.to_json(), "m": u.m, "residue_degree": u.residue_degree,
            })).collect::<Vec<_>>(),
            "ledger": self.ledger.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "diagnostics": self.diagnostics,
        })
    }
}

fn lattice_ok(beta: &Option<BigRational>, n: u32) -> bool {
    let fact: BigInt = (1..=n.max(1)).fold(BigInt::one(), |acc, k| acc * k);
    beta.as_ref()
        .is_none_or(|b| is_integral(&(b * BigRational::from_integer(fact))))
}

fn ledger_entry(index: usize, unit: &UnitRecord, n_max: u32) -> Result<LedgerEntry> {
    let get = |i: &Option<Invariants2>, f: fn(&Invariants2) -> BigRational| i.as_ref().map(f);
    let zeta_entry = get(&unit.entry_invariants_o, |i| i.zeta.clone());
    let epsilon_entry = get(&unit.entry_invariants_o, |i| i.epsilon.clone());
    let zeta_exit = get(&unit.exit_invariants_o, |i| i.zeta.clone());
    let epsilon_exit = get(&unit.exit_invariants_o, |i| i.epsilon.clone());
    let lattice = lattice_ok(&unit.beta_o_before, n_max) && lattice_ok(&unit.beta_o_after, n_max);
    let constant_beta = unit.beta_o_before.is_some() && unit.beta_o_before == unit.beta_o_after;
    let rational_u1 = matches!(unit.chart, ChartSpec::PointU1 | ChartSpec::Translated(_));
    let zeta_checked = constant_beta && rational_u1 && zeta_entry.is_some() && zeta_exit.is_some();
    let entry = LedgerEntry {
        unit: index,
        chart: unit.chart.to_string(),
        m: unit.m,
        beta_before: unit.beta_o_before.clone(),
        beta_after: unit.beta_o_after.clone(),
        guaranteed: matches!(
            unit.guarantee,
            BetaGuarantee::NonIncreasing | BetaGuarantee::Strict
        ),
        lattice_ok: lattice,
        zeta_entry,
        epsilon_entry,
        zeta_exit,
        epsilon_exit,
        zeta_checked,
    };
    if !lattice {
        return Err(Error::LedgerViolation(format!(
            "β^O of unit {index} is not in (1/{n_max}!)ℤ"
        )));
    }
    if entry.guaranteed && !entry.beta_non_increasing() {
        return Err(Error::LedgerViolation(format!(
            "β^O increased across unit {index}"
        )));
    }
    if zeta_checked {
        let (z0, e0, z1, e1) = (
            entry.zeta_entry.as_ref().unwrap(),
            entry.epsilon_entry.as_ref().unwrap(),
            entry.zeta_exit.as_ref().unwrap(),
            entry.epsilon_exit.as_ref().unwrap(),
        );
        let expect = z0 + e0 - BigRational::from_integer(unit.m.into());
        if e0 != e1 || *z1 != expect {
            return Err(Error::LedgerViolation(format!(
                "ζ^O recurrence fails in unit {index}: {z1} ≠ {z0} + {e0} - {}",
                unit.m
            )));
        }
    }
    Ok(entry)
}

/// Chain of fundamental units until the point stops being near. A permissible
/// curve (y, u_j) through the point is blown up before any point.
pub fn resolve_driver(label: &Label, opts: &DriverOptions) -> Result<DriverTrace> {
    let mut cur = prepare_totally(label)?;
    let mut steps = vec![TraceStep::at("start", &cur, None)];
    let mut units: Vec<UnitRecord> = Vec::new();
    let mut ledger = Vec::new();
    let mut diagnostics = Vec::new();
    let one = BigRational::one();
    let outcome = loop {
        if units.len() >= opts.max_units {
            diagnostics.push(format!("stopped after {} units", opts.max_units));
            break Outcome::MaxUnits;
        }
        let delta = char_polyhedron(&cur);
        let Some(d) = delta.delta() else {
            diagnostics.push("Δ is empty: the y-variables cut out the locus".into());
            break Outcome::EmptyPolyhedron;
        };
        if d <= one {
            break Outcome::Resolved;
        }
        // a permissible curve through the point is blown up before any point
        if let Some(j) = (0..2)
            .filter(|_| cur.e() == 2)
            .find(|&j| curve_is_permissible(&cur, j))
        {
            let chart = if j == 0 {
                ChartSpec::CurveU1
            } else {
                ChartSpec::CurveU2
            };
            let next = prepare_totally(&curve_chart_along(&cur, j)?)?;
            diagnostics.push(format!(
                "blew up the curve (y, u{}) before unit {}",
                j + 1,
                units.len()
            ));
            steps.push(TraceStep::at(chart.to_string(), &next, None));
            cur = next;
            continue;
        }
        let (candidates, skipped) = near_point_candidates(&cur)?;
        let mut best: Option<(Candidate, Entered)> = None;
        let mut first_far: Option<(Candidate, Label)> = None;
        for c in candidates {
            let entered = match enter_unit(&cur, &c.chart) {
                Ok(e) => e,
                Err(Error::NonDivisible(_)) | Err(Error::InvalidLabel(_)) => continue,
                Err(e) => return Err(e),
            };
            if entered.nearness.kind == NearnessKind::NotNear {
                if first_far.is_none() {
                    first_far = Some((c, entered.first));
                }
                continue;
            }
            let better = match &best {
                None => true,
                Some((bc, be)) => {
                    (&entered.nearness.delta, c.multiplicity)
                        > (&be.nearness.delta, bc.multiplicity)
                }
            };
            if better {
                best = Some((c, entered));
            }
        }
        let Some((cand, entered)) = best else {
            if !skipped.is_empty() {
                return Err(Error::Inconclusive(format!(
                    "no near point among rational candidates; skipped {}",
                    skipped.join(", ")
                )));
            }
            if let Some((c, l)) = first_far {
                steps.push(TraceStep::at(
                    c.chart.to_string(),
                    &l,
                    Some(NearnessKind::NotNear),
                ));
            }
            break Outcome::NoNearPoint;
        };
        let unit = finish_unit(&cur, &cand.chart, entered, opts.isolated)?;
        if let Some(false) = unit.isolation_consistent {
            diagnostics.push(format!(
                "unit {}: isolation declared but α^O or ε^O ≥ 1",
                units.len()
            ));
        }
        let n_max = cur.max_order();
        ledger.push(ledger_entry(units.len(), &unit, n_max)?);
        steps.extend(unit.steps.iter().cloned());
        cur = unit.terminal.clone();
        units.push(unit);
        cur = prepare_totally(&cur)?;
    };
    Ok(DriverTrace {
        steps,
        units,
        ledger,
        outcome,
        diagnostics,
    })
}

/// Parameters (p, a, b, A, N) of the maximal-contact test hypersurface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeParams {
    pub p: u64,
    pub a: u32,
    pub b: u32,
    pub big_a: u32,
    pub n: u32,
}

impl ProbeParams {
    pub fn validate(&self) -> Result<FieldSpec> {
        let ProbeParams { p, a, b, big_a, n } = *self;
        let field =
            FieldSpec::prime(p).map_err(|_| Error::BadParameters(format!("{p} is not prime")))?;
        let ok = a > 0
            && b > 0
            && (a as u64) < p
            && (b as u64) < p
            && (a + b) as u64 == p
            && big_a as u64 > p
            && !(big_a as u64).is_multiple_of(p)
            && n as u64 >= p * p * big_a as u64;
        if !ok {
            return Err(Error::BadParameters(format!(
                "need 0<a,b<p, a+b=p, A>p, p∤A, N≥p²A; got p={p} a={a} b={b} A={big_a} N={n}"
            )));
        }
        Ok(field)
    }

    pub fn frame(&self) -> Result<std::sync::Arc<Frame>> {
        Frame::with_names(&["y"], &["u1", "u2"], self.validate()?)
    }

    /// y^p + y u1^N u2^N + u1^a u2^b (u1+u2)^{pA}.
    pub fn polynomial(&self) -> Result<Polynomial> {
        let fr = self.frame()?;
        let y = Polynomial::y(&fr, 0);
        let u1 = Polynomial::u(&fr, 0);
        let u2 = Polynomial::u(&fr, 1);
        let p = self.p as u32;
        let mixed = &y * &Polynomial::u_monomial(&fr, &[self.n, self.n]);
        let tail =
            &Polynomial::u_monomial(&fr, &[self.a, self.b]) * &(&u1 + &u2).pow(p * self.big_a);
        Ok(&(&y.pow(p) + &mixed) + &tail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeSequence {
    /// point (1:-1), then the points on the strict transform of {z = v = 0}
    I,
    /// successive origins of the u2-charts
    II,
    /// successive origins of the u1-charts
    III,
}

impl ProbeSequence {
    pub fn name(&self) -> &'static str {
        match self {
            ProbeSequence::I => "I",
            ProbeSequence::II => "II",
            ProbeSequence::III => "III",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub q: u32,
    pub delta_z: BigRational,
    pub delta_t: BigRational,
    pub sigma: BigRational,
    pub z_vertices: Vec<Vec<BigRational>>,
}

#[derive(Clone, Debug)]
pub struct ProbeCase {
    pub gamma: Polynomial,
    /// multiplicity of (u1+u2) in the degree A+1 part of γ, None for ∞
    pub c: Option<u32>,
    pub sequence: ProbeSequence,
    pub rows: Vec<ProbeRow>,
    pub first_violation: Option<u32>,
}

impl ProbeCase {
    pub fn certified(&self) -> bool {
        self.first_violation.is_some()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "gamma": self.gamma.to_string(),
            "C": self.c.map_or("inf".to_string(), |c| c.to_string()),
            "sequence": self.sequence.name(),
            "first_violation": self.first_violation,
            "certified": self.certified(),
            "rows": self.rows.iter().map(|r| json!({
                "q": r.q,
                "delta_z": r.delta_z.to_string(),
                "delta_t": r.delta_t.to_string(),
                "sigma": r.sigma.to_string(),
                "z_vertices": r.z_vertices.iter()
                    .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Multiplicity of (u1 + u2) in a binary form, None for the zero form.
fn multiplicity_of_sum(form: &Polynomial) -> Option<u32> {
    if form.is_zero() {
        return None;
    }
    let (g, _) = residual(form);
    // u1 + u2 ↦ 1 + t, a root at t = -1
    let field = form.field().clone();
    let root = field.neg(&field.one());
    let mut k = 0;
    let mut cur = g;
    let lin = UPoly::new(&field, vec![field.one(), field.one()]);
    while !cur.is_zero() && cur.degree() > 0 && field.is_zero(&cur.eval(&root)) {
        cur = cur.div_exact(&lin);
        k += 1;
    }
    Some(k)
}

/// The five candidate functions γ used for the built-in probe.
pub fn builtin_candidates(params: &ProbeParams) -> Result<Vec<Polynomial>> {
    let fr = params.frame()?;
    let u1 = Polynomial::u(&fr, 0);
    let u2 = Polynomial::u(&fr, 1);
    let s = (&u1 + &u2).pow(params.big_a);
    Ok(vec![
        Polynomial::zero(&fr),
        &s * &(&u1 + &u2),
        u1.pow(params.big_a + 1),
        &s * &u2,
        &s * &u1,
    ])
}

fn classify_gamma(
    params: &ProbeParams,
    gamma: &Polynomial,
) -> Result<(Option<u32>, ProbeSequence)> {
    let top = params.big_a + 1;
    for (ep, _) in gamma.terms() {
        if ep.deg_b() > 0 || ep.deg_a() < top {
            return Err(Error::BadParameters(format!(
                "γ must lie in (u1,u2)^{top} inside k[u1,u2]; found term of degree {}",
                ep.deg_a()
            )));
        }
    }
    let form = gamma.homogeneous_part(top);
    let c = multiplicity_of_sum(&form);
    if c != Some(params.big_a) {
        return Ok((c, ProbeSequence::I));
    }
    let c2 = gamma.coeff(&crate::algebra::ExponentPair::new(vec![0], vec![0, top]));
    let c1 = gamma.coeff(&crate::algebra::ExponentPair::new(vec![0], vec![top, 0]));
    let field = gamma.field();
    debug_assert!(!(field.is_zero(&c1) && field.is_zero(&c2)));
    Ok((
        c,
        if field.is_zero(&c2) {
            ProbeSequence::III
        } else {
            ProbeSequence::II
        },
    ))
}

fn delta_of(label: &Label) -> Result<BigRational> {
    char_polyhedron(label)
        .delta()
        .ok_or_else(|| Error::InvariantViolation("empty polyhedron on the z-side".into()))
}

/// Compare δ along one of the three sequences for y and for t = y + γ.
/// Rows run at least to q = p + 1 and stop once σ_q > 1 has been seen.
pub fn probe_case(params: &ProbeParams, gamma: &Polynomial) -> Result<ProbeCase> {
    let f = params.polynomial()?;
    let fr = f.frame().clone();
    if gamma.frame() != &fr {
        return Err(Error::FrameMismatch(
            "γ must use the frame y | u1, u2".into(),
        ));
    }
    let (c, sequence) = classify_gamma(params, gamma)?;
    let y_image = &Polynomial::y(&fr, 0) - gamma;
    let f_t = f.substitute(Var::Y(0), &y_image)?;
    let mut z = Label::single(f)?;
    let mut t = Label::single(f_t)?;
    let step = match sequence {
        ProbeSequence::I => {
            let one = ChartSpec::Translated(Polynomial::one(&fr));
            z = point_chart(&z, &one)?;
            t = point_chart(&t, &one)?;
            ChartSpec::PointU1
        }
        ProbeSequence::II => ChartSpec::PointU2,
        ProbeSequence::III => ChartSpec::PointU1,
    };
    let mut rows = Vec::new();
    let mut first_violation = None;
    let one = BigRational::one();
    for q in 0..=MAX_PROBE_STEPS {
        if q > 0 {
            z = point_chart(&z, &step)?;
            t = point_chart(&t, &step)?;
        }
        z = prepare_totally(&z)?;
        let delta_z = delta_of(&z)?;
        if delta_z <= one {
            break;
        }
        // the t-side Δ can empty out once y + γ has too high contact
        let Some(delta_t) = char_polyhedron(&t).delta() else {
            break;
        };
        let sigma = &delta_z - &delta_t;
        if sigma > one && first_violation.is_none() {
            first_violation = Some(q);
        }
        rows.push(ProbeRow {
            q,
            delta_z,
            delta_t,
            sigma,
            z_vertices: char_polyhedron(&z).vertices().to_vec(),
        });
        if first_violation.is_some() && q as u64 > params.p {
            break;
        }
    }
    Ok(ProbeCase {
        gamma: gamma.clone(),
        c,
        sequence,
        rows,
        first_violation,
    })
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub params: ProbeParams,
    pub cases: Vec<ProbeCase>,
}

impl ProbeReport {
    pub fn all_certified(&self) -> bool {
        self.cases.iter().all(|c| c.certified())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let p = &self.params;
        json!({
            "params": {"p": p.p, "a": p.a, "b": p.b, "A": p.big_a, "N": p.n},
            "cases": self.cases.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            "all_certified": self.all_certified(),
        })
    }
}

/// Run the probe for one candidate γ, or for the built-in family.
pub fn maximal_contact_probe(
    params: &ProbeParams,
    gamma: Option<&Polynomial>,
) -> Result<ProbeReport> {
    params.validate()?;
    let gammas = match gamma {
        Some(g) => vec![g.clone()],
        None => builtin_candidates(params)?,
    };
    let cases = gammas
        .iter()
        .map(|g| probe_case(params, g))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        params: *params,
        cases,
    })
}

/// Constant translation parameter for the point (1 : t).
pub fn translation_for(frame: &std::sync::Arc<Frame>, t: &Scalar) -> ChartSpec {
    if frame.field.is_zero(t) {
        ChartSpec::PointU1
    } else {
        ChartSpec::Translated(Polynomial::constant(frame, frame.field.neg(t)))
    }
}
