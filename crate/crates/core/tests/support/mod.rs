//! Seeded generators and the per-criterion checks shared by the suites and
//! the acceptance target.
#![allow(dead_code)]

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use charpoly::algebra::{rat, FieldSpec, Frame, Polynomial, Scalar, Selector};
use charpoly::blowup::{nearness_of_transform, point_chart, ChartSpec, NearnessKind};
use charpoly::charpoly::{
    boundary_polyhedron, char_polyhedron, char_polyhedron_partial, vertex_initials, Label,
};
use charpoly::hilbert::{
    compare, compare_at, decompose, hf_monomial, phi, phi_function, recompose, ADecomposition,
    HilbertPolynomial,
};
use charpoly::polyhedron::{AffineMap, FSubset};
use charpoly::preparation::{dissolve_at, normalize_at, prepare, solvable_at, Solvability};
use charpoly::resolve::{
    fundamental_sequence, maximal_contact_probe, prepare_totally, resolve_driver, run_unit,
    DriverOptions, DriverTrace, ProbeParams, ProbeSequence,
};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

pub fn random_field(rng: &mut ChaCha8Rng) -> FieldSpec {
    match rng.gen_range(0..5) {
        0 => FieldSpec::Rationals,
        1 => FieldSpec::prime(2).unwrap(),
        2 => FieldSpec::prime(3).unwrap(),
        3 => FieldSpec::prime(5).unwrap(),
        _ => FieldSpec::prime(7).unwrap(),
    }
}

pub fn random_coeff(rng: &mut ChaCha8Rng, field: &FieldSpec) -> Scalar {
    loop {
        let c = field.from_i64(rng.gen_range(-4..=4));
        if !field.is_zero(&c) {
            return c;
        }
    }
}

pub fn frame2(field: FieldSpec) -> Arc<Frame> {
    Frame::with_names(&["y"], &["u1", "u2"], field).unwrap()
}

/// y^n plus up to `nterms` random terms c·y^b·u1^a1·u2^a2 with b < n accepted by `keep`.
pub fn random_generator<F>(
    rng: &mut ChaCha8Rng,
    frame: &Arc<Frame>,
    n: u32,
    nterms: usize,
    max_exp: u32,
    keep: F,
) -> Polynomial
where
    F: Fn(u32, u32, u32) -> bool,
{
    let mut f = Polynomial::y(frame, 0).pow(n);
    let mut added = 0;
    for _ in 0..nterms * 200 {
        if added == nterms {
            break;
        }
        let b = rng.gen_range(0..n);
        let a1 = rng.gen_range(0..=max_exp);
        let a2 = rng.gen_range(0..=max_exp);
        if a1 + a2 == 0 || !keep(b, a1, a2) {
            continue;
        }
        let c = random_coeff(rng, &frame.field);
        let t = &Polynomial::y(frame, 0).pow(b) * &Polynomial::u_monomial(frame, &[a1, a2]);
        f = &f + &t.scale(&c);
        added += 1;
    }
    f
}

pub fn random_label<F>(rng: &mut ChaCha8Rng, nterms: usize, max_exp: u32, keep: F) -> Label
where
    F: Fn(u32, u32, u32) -> bool,
{
    let field = random_field(rng);
    let frame = frame2(field);
    let n = rng.gen_range(2..=3);
    let f = random_generator(rng, &frame, n, nterms, max_exp, keep);
    Label::single(f).unwrap()
}

fn point(v: &[BigRational]) -> String {
    format!(
        "({})",
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

fn vertices(d: &FSubset) -> Vec<String> {
    d.vertices().iter().map(|v| point(v)).collect()
}

pub fn max_contact_params() -> ProbeParams {
    ProbeParams {
        p: 3,
        a: 2,
        b: 1,
        big_a: 4,
        n: 36,
    }
}

pub fn max_contact_label() -> Label {
    Label::single(max_contact_params().polynomial().unwrap()).unwrap()
}

fn r(n: i64, d: i64) -> BigRational {
    rat(n, d)
}

fn delta_face(d: &FSubset) -> Vec<Vec<BigRational>> {
    let m = d.delta().unwrap();
    d.vertices()
        .iter()
        .filter(|v| v.iter().fold(BigRational::zero(), |a, x| a + x) == m)
        .cloned()
        .collect()
}

/// Criterion 1: the maximal-contact example, exact.
pub fn criterion_1() -> Check {
    let start = Instant::now();
    let params = max_contact_params();
    let l = max_contact_label();
    let fr = l.frame().clone();

    // a
    let d = char_polyhedron(&l);
    let want_a = vec![vec![r(2, 3), r(13, 3)], vec![r(14, 3), r(1, 3)]];
    ensure(d.vertices() == want_a.as_slice(), || {
        format!("1a: vertices {:?}", vertices(&d))
    })?;
    ensure(d.delta() == Some(r(5, 1)), || "1a: δ ≠ 5".into())?;

    // b
    let x1 = point_chart(&l, &ChartSpec::Translated(Polynomial::one(&fr))).map_err(err("1b"))?;
    let d1 = char_polyhedron(&x1);
    ensure(delta_face(&d1) == vec![vec![r(4, 1), r(4, 1)]], || {
        format!("1b: δ-face of the first chart {:?}", vertices(&d1))
    })?;
    ensure(d1.delta() == Some(r(8, 1)), || "1b: δ ≠ 8".into())?;
    let v44 = vec![r(4, 1), r(4, 1)];
    let sol = match solvable_at(&x1, &v44).map_err(err("1b"))? {
        Solvability::Solvable(s) => s,
        other => return Err(format!("1b: (4,4) not solvable: {other:?}")),
    };
    // z = y' + λu^v, so ε = λ and ε^3 must equal -1
    let field = &fr.field;
    let eps = &sol.lambda[0];
    ensure(field.pow(eps, 3) == field.from_i64(-1), || {
        format!("1b: ε = {} has ε^3 ≠ -1", field.format(eps))
    })?;
    let z = dissolve_at(&x1, &sol).map_err(err("1b"))?;
    let dz = char_polyhedron(&z);
    let want_b = vec![
        vec![r(4, 1), r(13, 3)],
        vec![r(74, 3), r(4, 3)],
        vec![r(35, 1), r(0, 1)],
    ];
    ensure(dz.vertices() == want_b.as_slice(), || {
        format!("1b: after dissolution {:?}", vertices(&dz))
    })?;
    ensure(delta_face(&dz) == vec![vec![r(4, 1), r(13, 3)]], || {
        "1b: δ-face".into()
    })?;
    ensure(dz.delta() == Some(r(25, 3)), || "1b: δ ≠ 25/3".into())?;
    let (prepared, _) = prepare(&x1, &r(9, 1)).map_err(err("1b"))?;
    ensure(char_polyhedron(&prepared) == dz, || {
        "1b: prepare(M = 9) disagrees with the single dissolution".into()
    })?;

    // c, d, e from the probe tables
    let report = maximal_contact_probe(&params, None).map_err(err("1c"))?;
    let seq_i = report
        .cases
        .iter()
        .find(|c| c.sequence == ProbeSequence::I && c.c == Some(5))
        .ok_or("1c: no Sequence I case with C ≠ A")?;
    for q in 1..=3u32 {
        let row = seq_i
            .rows
            .iter()
            .find(|r| r.q == q)
            .ok_or("1c: short table")?;
        let face = delta_face(&FSubset::minimal(2, &row.z_vertices).unwrap());
        let want = vec![vec![r(12 + 10 * q as i64, 3), r(13, 3)]];
        ensure(face == want, || format!("1c: q = {q} δ-face {face:?}"))?;
    }
    let seq_ii = report
        .cases
        .iter()
        .find(|c| c.sequence == ProbeSequence::II)
        .ok_or("1d: no Sequence II case")?;
    for q in 1..=3u32 {
        let row = seq_ii
            .rows
            .iter()
            .find(|r| r.q == q)
            .ok_or("1d: short table")?;
        let want = vec![vec![r(2, 3), r(13 - q as i64, 3)]];
        ensure(row.z_vertices == want, || {
            format!("1d: q = {q} vertices {:?}", row.z_vertices)
        })?;
        ensure(row.delta_z == r(15 - q as i64, 3), || {
            format!("1d: q = {q} δ")
        })?;
    }
    let p = params.p as i64;
    let one = BigRational::one();
    for case in &report.cases {
        let bound = |q: u32| -> BigRational {
            match case.sequence {
                ProbeSequence::I => r(q as i64 + 1, p),
                ProbeSequence::II => r(q as i64 * params.a as i64, p),
                ProbeSequence::III => r(q as i64 * params.b as i64, p),
            }
        };
        for row in &case.rows {
            ensure(row.sigma >= bound(row.q), || {
                format!(
                    "1e: σ_{} = {} below the bound for γ = {}",
                    row.q, row.sigma, case.gamma
                )
            })?;
        }
        ensure(case.certified(), || {
            format!("1e: γ = {} not certified", case.gamma)
        })?;
        if case.sequence != ProbeSequence::III {
            let s3 = case.rows.iter().find(|r| r.q == 3);
            if case.first_violation.unwrap_or(0) > 0 {
                ensure(s3.is_some_and(|r| r.sigma > one), || {
                    format!("1e: σ_3 ≤ 1 for γ = {}", case.gamma)
                })?;
            }
        }
    }
    let fs = fundamental_sequence(&l).map_err(err("1"))?;
    ensure(fs.m == Some(4), || {
        format!("1: fundamental length {:?}", fs.m)
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 5.0, || {
        format!("1: took {elapsed:?}")
    })?;
    Ok(format!("exact probe values, {:.2}s", elapsed.as_secs_f64()))
}

pub fn sum(v: &[BigRational]) -> BigRational {
    v.iter().fold(BigRational::zero(), |a, x| a + x)
}

/// One transform-law sample; `kind` is 0 point-u1, 1 point-u2, 2 curve-u1.
pub fn transform_law_case(seed: u64, kind: usize) -> Result<(), String> {
    let mut g = rng(seed);
    let nterms = g.gen_range(1..=4);
    // n ≤ 3, so |A| + b > 3 forces δ > 1 and a1 + b > 3 forces α > 1
    let label = match kind {
        0 | 1 => random_label(&mut g, nterms, 6, |b, a1, a2| a1 + a2 + b > 3),
        _ => random_label(&mut g, nterms, 6, |b, a1, _| a1 + b > 3),
    };
    let (chart, psi) = match kind {
        0 => (ChartSpec::PointU1, AffineMap::point_u1(2)),
        1 => (ChartSpec::PointU2, AffineMap::point_u2()),
        _ => (ChartSpec::CurveU1, AffineMap::curve_u1(2)),
    };
    let out = point_chart(&label, &chart).map_err(|e| format!("seed {seed}: {e}"))?;
    let din = char_polyhedron(&label);
    let dout = char_polyhedron(&out);
    let expect = din.map_and_rebuild(&psi).unwrap();
    ensure(dout == expect, || {
        format!("seed {seed} {chart}: Δ' = {dout}, Ψ(Δ) = {expect}")
    })?;
    ensure(out.orders() == label.orders(), || {
        format!("seed {seed}: orders changed")
    })?;
    if din.is_empty() {
        return Ok(());
    }
    let (i0, i1) = (din.invariants2().unwrap(), dout.invariants2().unwrap());
    let one = BigRational::one();
    let ok = match kind {
        0 => i1.beta == i0.gamma_minus && i1.beta <= i0.beta && i1.alpha == &i0.delta - &one,
        1 => i1.alpha == i0.alpha && i1.beta <= &(&i0.beta + &i0.alpha) - &one,
        _ => i1.beta == i0.beta && i1.alpha == &i0.alpha - &one,
    };
    ensure(ok, || {
        format!("seed {seed} {chart}: invariant identity fails")
    })
}

/// Criterion 2: polyhedron transform laws and invariant identities.
pub fn criterion_2() -> Check {
    for kind in 0..3 {
        for i in 0..200u64 {
            transform_law_case(1000 * kind as u64 + i, kind)?;
        }
    }
    Ok("600 labels, 3 charts".into())
}

/// A label solvable at an integral vertex v: (y + c u^v)^n plus terms above v.
pub fn solvable_case(seed: u64) -> Option<(Label, Vec<BigRational>, Scalar)> {
    let mut g = rng(seed);
    let field = random_field(&mut g);
    let frame = frame2(field.clone());
    let n = g.gen_range(2..=3u32);
    let v = loop {
        let v = [g.gen_range(0..=2u32), g.gen_range(0..=2u32)];
        if v[0] + v[1] > 0 {
            break v;
        }
    };
    let c = random_coeff(&mut g, &field);
    let base = (&Polynomial::y(&frame, 0) + &Polynomial::u_monomial(&frame, &v).scale(&c)).pow(n);
    let nterms = g.gen_range(1..=3);
    let extra = random_generator(&mut g, &frame, n, nterms, 6, |b, a1, a2| {
        // point strictly beyond v in some coordinate and never below it in both
        let w = n - b;
        !(a1 <= v[0] * w && a2 <= v[1] * w)
    });
    let extra = &extra - &Polynomial::y(&frame, 0).pow(n);
    let f = &base + &extra;
    let label = Label::single(f).ok()?;
    let vq = vec![
        BigRational::from_integer(v[0].into()),
        BigRational::from_integer(v[1].into()),
    ];
    if !char_polyhedron(&label).is_vertex(&vq) {
        return None;
    }
    Some((label, vq, c))
}

pub fn dissolution_case(seed: u64) -> Result<bool, String> {
    let Some((label, v, c)) = solvable_case(seed) else {
        return Ok(false);
    };
    let sol = match solvable_at(&label, &v).map_err(|e| format!("seed {seed}: {e}"))? {
        Solvability::Solvable(s) => s,
        other => return Err(format!("seed {seed}: expected solvable, got {other:?}")),
    };
    ensure(sol.lambda[0] == c, || format!("seed {seed}: λ ≠ c"))?;
    let out = dissolve_at(&label, &sol).map_err(|e| e.to_string())?;
    let (din, dout) = (char_polyhedron(&label), char_polyhedron(&out));
    ensure(!dout.contains(&v), || format!("seed {seed}: v survived"))?;
    ensure(dout.is_subset_of(&din), || format!("seed {seed}: Δ grew"))?;
    for w in din.vertices().iter().filter(|w| **w != v) {
        ensure(dout.is_vertex(w), || {
            format!("seed {seed}: vertex {} lost", point(w))
        })?;
        let a = vertex_initials(&label, w).map_err(|e| e.to_string())?;
        let b = vertex_initials(&out, w).map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("seed {seed}: initial at {} changed", point(w))
        })?;
    }
    Ok(true)
}

pub fn max_level(d: &FSubset) -> BigRational {
    d.vertices()
        .iter()
        .map(|v| sum(v))
        .max()
        .unwrap_or_else(BigRational::zero)
}

pub fn idempotence_case(seed: u64) -> Result<(), String> {
    let mut g = rng(seed);
    let nterms = g.gen_range(1..=4);
    let label = random_label(&mut g, nterms, 5, |_, _, _| true);
    let m = max_level(&char_polyhedron(&label));
    let (p1, rep) = prepare(&label, &m).map_err(|e| format!("seed {seed}: {e}"))?;
    if !rep.undecided().is_empty() {
        return Ok(());
    }
    ensure(
        char_polyhedron(&p1).is_subset_of(&char_polyhedron(&label)),
        || format!("seed {seed}: prepare enlarged Δ"),
    )?;
    let in0 = |l: &Label| l.generators()[0].initial_form(&Selector::Zero).unwrap();
    ensure(in0(&p1) == in0(&label), || {
        format!("seed {seed}: in_0 changed")
    })?;
    let (p2, _) = prepare(&p1, &m).map_err(|e| e.to_string())?;
    ensure(p1 == p2, || format!("seed {seed}: prepare not idempotent"))
}

/// Two generators y1^2 + …, y2^3 + Σ c·y1^2·u^w + …: normalization keeps in_0.
pub fn normalization_case(seed: u64) -> Result<bool, String> {
    let mut g = rng(seed);
    let field = random_field(&mut g);
    let frame = Frame::with_names(&["y1", "y2"], &["u1", "u2"], field.clone()).unwrap();
    let y1 = Polynomial::y(&frame, 0);
    let y2 = Polynomial::y(&frame, 1);
    let mut f1 = y1.pow(2);
    let mut f2 = y2.pow(3);
    for _ in 0..g.gen_range(1..=3) {
        let m = Polynomial::u_monomial(&frame, &[g.gen_range(0..=3), g.gen_range(0..=3)]);
        if m.degree() == Some(0) {
            continue;
        }
        let c = random_coeff(&mut g, &field);
        f2 = &f2 + &(&y1.pow(2) * &m).scale(&c);
    }
    for (f, y) in [(&mut f1, &y1), (&mut f2, &y2)] {
        for _ in 0..g.gen_range(1..=2) {
            let b = g.gen_range(0..=1u32);
            let a = [g.gen_range(0..=4u32), g.gen_range(0..=4u32)];
            if a[0] + a[1] + b < 2 {
                continue;
            }
            let c = random_coeff(&mut g, &field);
            *f = &*f + &(&y.pow(b) * &Polynomial::u_monomial(&frame, &a)).scale(&c);
        }
    }
    let label = match Label::new(&frame, vec![f1, f2], vec![]) {
        Ok(l) => l,
        Err(_) => return Ok(false),
    };
    let din = char_polyhedron(&label);
    let mut changed = false;
    for v in din.vertices() {
        let h = normalize_at(&label, v).map_err(|e| format!("seed {seed}: {e}"))?;
        let in0 = |l: &Label| -> Vec<Polynomial> {
            l.generators()
                .iter()
                .map(|f| f.initial_form(&Selector::Zero).unwrap())
                .collect()
        };
        ensure(in0(&h) == in0(&label), || {
            format!("seed {seed}: in_0 changed")
        })?;
        ensure(char_polyhedron(&h).is_subset_of(&din), || {
            format!("seed {seed}: Δ grew")
        })?;
        changed |= h != label;
    }
    Ok(changed)
}

/// Criterion 3: dissolution, idempotence, monotonicity, in_0 invariance.
pub fn criterion_3() -> Check {
    let mut solvable = 0;
    let mut seed = 0u64;
    while solvable < 100 {
        if dissolution_case(seed)? {
            solvable += 1;
        }
        seed += 1;
        if seed > 5000 {
            return Err(format!("only {solvable} solvable cases constructed"));
        }
    }
    for s in 0..100 {
        idempotence_case(10_000 + s)?;
    }
    let mut changed = 0;
    for s in 0..100 {
        if normalization_case(20_000 + s)? {
            changed += 1;
        }
    }
    ensure(changed > 0, || "no normalization changed anything".into())?;
    Ok(format!(
        "100 dissolutions, 100 idempotence runs, {changed}/100 normalizations non-trivial"
    ))
}

pub fn nearness_case(seed: u64) -> Result<Option<NearnessKind>, String> {
    let mut g = rng(seed);
    let nterms = g.gen_range(1..=4);
    let label = random_label(&mut g, nterms, 4, |b, a1, a2| a1 + a2 + b >= 2);
    let n = label.orders()[0];
    let label = prepare_totally(&label).map_err(|e| format!("seed {seed}: {e}"))?;
    let out = match point_chart(&label, &ChartSpec::PointU1) {
        Ok(o) => o,
        Err(charpoly::Error::NonDivisible(_)) => {
            // v_m(f) < n: the chart is undefined and the point is not near
            let vm = label.generators()[0].multiplicity().unwrap();
            ensure(vm < n, || format!("seed {seed}: NonDivisible with v_m = n"))?;
            return Ok(Some(NearnessKind::NotNear));
        }
        Err(e) => return Err(format!("seed {seed}: {e}")),
    };
    let out = prepare_totally(&out).map_err(|e| format!("seed {seed}: {e}"))?;
    let got = nearness_of_transform(&label, &out).kind;
    let f = &out.generators()[0];
    let vm = f.multiplicity().unwrap();
    let n_out = f.order_mod_u().unwrap();
    let direct = if vm != n || n_out != n {
        NearnessKind::NotNear
    } else {
        let in_m = f.homogeneous_part(vm);
        if in_m.terms().all(|(ep, _)| ep.deg_a() == 0) {
            NearnessKind::VeryNear
        } else {
            NearnessKind::Near
        }
    };
    ensure(got == direct, || {
        format!("seed {seed}: classify {got:?}, direct {direct:?}")
    })?;
    Ok(Some(got))
}

/// Criterion 4: nearness from δ' agrees with multiplicities.
pub fn criterion_4() -> Check {
    let mut counts = [0usize; 3];
    for s in 0..100 {
        if let Some(k) = nearness_case(30_000 + s)? {
            counts[k as usize] += 1;
        }
    }
    Ok(format!(
        "100 labels: {} not near, {} near, {} very near",
        counts[0], counts[1], counts[2]
    ))
}

/// Labels whose full driver runs form the ledger corpus.
pub fn driver_corpus() -> Vec<(String, Label, bool)> {
    let mut out = vec![("max-contact".to_string(), max_contact_label(), false)];
    let q = Frame::with_names(&["y"], &["u1"], FieldSpec::Rationals).unwrap();
    let y = Polynomial::y(&q, 0);
    let u = Polynomial::u(&q, 0);
    out.push((
        "cusp".into(),
        Label::single(&y.pow(2) + &u.pow(3)).unwrap(),
        false,
    ));
    out.push(("y^3".into(), Label::single(y.pow(3)).unwrap(), false));
    let f3 = frame2(FieldSpec::prime(3).unwrap());
    let y = Polynomial::y(&f3, 0);
    let u1 = Polynomial::u(&f3, 0);
    let u2 = Polynomial::u(&f3, 1);
    let phi = &u1.pow(2) + &u2.pow(2);
    out.push((
        "nonrational".into(),
        Label::single(&y.pow(2) + &phi.pow(2)).unwrap(),
        true,
    ));
    out.push((
        "point-u2".into(),
        Label::single(
            &(&y.pow(3) + &Polynomial::u_monomial(&f3, &[2, 6]))
                + &Polynomial::u_monomial(&f3, &[5, 4]),
        )
        .unwrap(),
        true,
    ));
    out.push((
        "nonrational-cubic".into(),
        Label::single(&y.pow(3) + &(&phi.pow(3) * &u1)).unwrap(),
        false,
    ));
    for s in 0..24u64 {
        let mut g = rng(40_000 + s);
        let nterms = g.gen_range(1..=3);
        let l = random_label(&mut g, nterms, 6, |b, a1, a2| a1 + a2 + b >= 3);
        out.push((format!("random-{s}"), l, false));
    }
    out
}

pub struct CorpusRun {
    pub name: String,
    pub label: Label,
    pub trace: DriverTrace,
}

/// Full runs of the corpus; inconclusive runs are reported and skipped.
pub fn run_corpus() -> Result<(Vec<CorpusRun>, Vec<String>), String> {
    let mut runs = Vec::new();
    let mut skipped = Vec::new();
    for (name, label, isolated) in driver_corpus() {
        let opts = DriverOptions {
            isolated,
            ..DriverOptions::default()
        };
        match resolve_driver(&label, &opts) {
            Ok(trace) => runs.push(CorpusRun { name, label, trace }),
            Err(e @ charpoly::Error::Inconclusive(_)) => skipped.push(format!("{name}: {e}")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok((runs, skipped))
}

/// Criterion 5: Δ(f,y,u1) = π_1(Δ(f,y,u)) on driver states where (P0) holds.
pub fn criterion_5() -> Check {
    let (runs, _) = run_corpus()?;
    let mut checked = 0;
    for run in &runs {
        for step in &run.trace.steps {
            let Some(l) = &step.label else { continue };
            if l.e() < 2 {
                continue;
            }
            // (P0): f ∈ (y, u1) with the order modulo u1 equal to n
            let p0 = l.generators().iter().zip(l.orders()).all(|(g, &n)| {
                g.terms()
                    .filter(|(ep, _)| ep.a[0] == 0)
                    .map(|(ep, _)| ep.deg_b())
                    .min()
                    == Some(n)
            });
            if !p0 {
                continue;
            }
            let partial = char_polyhedron_partial(l, 1).map_err(|e| e.to_string())?;
            let projected = char_polyhedron(l).project(1).map_err(|e| e.to_string())?;
            ensure(partial == projected, || {
                format!("{}: {} ≠ π_1 {}", run.name, partial, projected)
            })?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no driver state satisfied (P0)".into())?;
    Ok(format!("{checked} driver states"))
}

pub fn fundamental_case(seed: u64) -> Result<Option<(BigRational, u32)>, String> {
    let mut g = rng(seed);
    let nterms = g.gen_range(1..=4);
    let label = random_label(&mut g, nterms, 12, |b, a1, a2| a1 + a2 > 3 - b);
    let label = prepare_totally(&label).map_err(|e| format!("seed {seed}: {e}"))?;
    let Some(d) = char_polyhedron(&label).delta() else {
        return Ok(None);
    };
    if d <= BigRational::one() || d > r(10, 1) {
        return Ok(None);
    }
    let fs = fundamental_sequence(&label).map_err(|e| format!("seed {seed}: {e}"))?;
    let m = fs.m.ok_or_else(|| format!("seed {seed}: no length"))?;
    let mq = BigRational::from_integer(BigInt::from(m));
    ensure(mq < d && d <= &mq + BigRational::one(), || {
        format!("seed {seed}: m = {m}, δ = {d}")
    })?;
    for (q, step) in fs.trace.iter().enumerate().skip(1) {
        let dq = step.snapshot.delta.clone().unwrap();
        let want = &d - BigRational::from_integer(BigInt::from(q));
        ensure(dq == want, || format!("seed {seed}: δ_{q} = {dq}"))?;
        if (q as u32) < m {
            ensure(dq > BigRational::one(), || {
                format!("seed {seed}: δ_{q} ≤ 1 early")
            })?;
        }
    }
    Ok(Some((d, m)))
}

/// Criterion 6: m < δ ≤ m + 1.
pub fn criterion_6() -> Check {
    let mut found = 0;
    let mut seed = 50_000u64;
    while found < 50 {
        if fundamental_case(seed)?.is_some() {
            found += 1;
        }
        seed += 1;
        if seed > 55_000 {
            return Err(format!("only {found} labels with 1 < δ ≤ 10"));
        }
    }
    let fs = fundamental_sequence(&max_contact_label()).map_err(|e| e.to_string())?;
    ensure(fs.m == Some(4), || format!("max-contact m = {:?}", fs.m))?;
    Ok("50 labels, max-contact m = 4".into())
}

pub fn random_ideal(g: &mut ChaCha8Rng) -> (Vec<Vec<u32>>, usize) {
    let nvars = g.gen_range(1..=4);
    let ngens = g.gen_range(0..=4);
    let gens = (0..ngens)
        .map(|_| {
            let deg = g.gen_range(1..=8u32);
            let mut m = vec![0u32; nvars];
            for _ in 0..deg {
                m[g.gen_range(0..nvars)] += 1;
            }
            m
        })
        .collect();
    (gens, nvars)
}

pub fn random_hilbert_polynomial(g: &mut ChaCha8Rng) -> Result<HilbertPolynomial, String> {
    let (gens, nvars) = random_ideal(g);
    Ok(hf_monomial(&gens, nvars)
        .map_err(|e| e.to_string())?
        .tail()
        .clone())
}

pub fn hilbert_roundtrip_case(seed: u64) -> Result<(), String> {
    let mut g = rng(seed);
    let p = random_hilbert_polynomial(&mut g)?;
    let a = decompose(&p).map_err(|e| format!("seed {seed}: {e}"))?;
    let back = recompose(&a).map_err(|e| e.to_string())?;
    ensure(back == p, || {
        format!("seed {seed}: recompose({a}) = {back} ≠ {p}")
    })?;
    ensure(decompose(&back).map_err(|e| e.to_string())? == a, || {
        format!("seed {seed}: decompose ∘ recompose ≠ id")
    })?;
    let q = random_hilbert_polynomial(&mut g)?;
    let ord = compare(&p, &q).map_err(|e| e.to_string())?;
    ensure(ord == compare_at(&p, &q, 50), || {
        format!("seed {seed}: compare({p}, {q}) disagrees with n = 50")
    })
}

/// A random walk strictly descending in the lex order of decompositions;
/// returns its length.
pub fn descending_walk(seed: u64) -> Result<usize, String> {
    let mut g = rng(seed);
    let deg = g.gen_range(0..=3u32);
    let len = g.gen_range(1..=20usize);
    let mut a: Vec<u32> = vec![deg; 1];
    while a.len() < len {
        let last = *a.last().unwrap();
        a.push(g.gen_range(0..=last));
    }
    let mut cur = ADecomposition(a);
    let mut poly = recompose(&cur).map_err(|e| e.to_string())?;
    let bound = 1_000_000;
    for step in 0..bound {
        if cur.0.is_empty() {
            return Ok(step);
        }
        let i = g.gen_range(0..cur.0.len());
        let mut next: Vec<u32> = cur.0[..i].to_vec();
        if cur.0[i] > 0 {
            let v = g.gen_range(0..cur.0[i]);
            next.push(v);
            let extra = g.gen_range(0..=(20 - next.len().min(20)));
            for _ in 0..extra {
                let last = *next.last().unwrap();
                next.push(g.gen_range(0..=last));
            }
        }
        let next = ADecomposition(next);
        ensure(next < cur, || {
            format!("seed {seed}: walk step not descending")
        })?;
        let np = recompose(&next).map_err(|e| e.to_string())?;
        ensure(
            compare(&np, &poly).map_err(|e| e.to_string())? == std::cmp::Ordering::Less,
            || format!("seed {seed}: {np} not below {poly}"),
        )?;
        cur = next;
        poly = np;
    }
    Err(format!("seed {seed}: walk exceeded {bound} steps"))
}

/// Criterion 7: Hilbert polynomials, decompositions and their order.
pub fn criterion_7() -> Check {
    for s in 0..100 {
        hilbert_roundtrip_case(60_000 + s)?;
    }
    let dec = |c: &[i64]| decompose(&HilbertPolynomial::from_ints(c).unwrap()).unwrap();
    ensure(dec(&[1, 1]) == ADecomposition(vec![1]), || "a(T+1)".into())?;
    ensure(dec(&[2]) == ADecomposition(vec![0, 0]), || "a(2)".into())?;
    ensure(dec(&[1, 2]) == ADecomposition(vec![1, 1]), || {
        "a(2T+1)".into()
    })?;
    for t in 0..=4u32 {
        let h = phi_function(t);
        for n in 0..=20u32 {
            let want = binom(n + t.max(1) - 1, n, t);
            ensure(phi(t, n) == want, || format!("Φ^({t})({n})"))?;
            ensure(h.value(n as usize) == BigInt::from(want.clone()), || {
                format!("Φ^({t}) function at {n}")
            })?;
        }
    }
    let mut longest = 0;
    for s in 0..100 {
        longest = longest.max(descending_walk(70_000 + s)?);
    }
    Ok(format!(
        "100 round trips, 100 descending walks (longest {longest})"
    ))
}

/// C(n + t - 1, n), with Φ^(0) = (1, 0, 0, …).
fn binom(top: u32, n: u32, t: u32) -> num_bigint::BigUint {
    use num_bigint::BigUint;
    if t == 0 {
        return if n == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let mut acc = BigUint::one();
    for i in 0..n {
        acc = acc * BigUint::from(top - i) / BigUint::from(i + 1);
    }
    acc
}

/// The crafted unit over F_3 through the point U1^2 + U2^2 = 0.
pub fn nonrational_unit() -> Result<(BigRational, BigRational), String> {
    let f3 = frame2(FieldSpec::prime(3).unwrap());
    let y = Polynomial::y(&f3, 0);
    let phi = &Polynomial::u(&f3, 0).pow(2) + &Polynomial::u(&f3, 1).pow(2);
    let label = Label::single(&y.pow(2) + &phi.pow(2)).unwrap();
    let unit = run_unit(&label, &ChartSpec::Nonrational(phi), true).map_err(|e| e.to_string())?;
    ensure(unit.residue_degree == 2, || "residue degree".into())?;
    Ok((unit.beta_o_before.unwrap(), unit.beta_o_after.unwrap()))
}

/// Criterion 8: β^O ledger and ζ^O recurrence on the corpus.
pub fn criterion_8() -> Check {
    let (runs, skipped) = run_corpus()?;
    let mut units = 0;
    let mut zeta = 0;
    let mut drops = 0;
    for run in &runs {
        let n_max = run.label.max_order();
        let fact: BigInt = (1..=n_max.max(1)).fold(BigInt::one(), |a, k| a * k);
        for e in &run.trace.ledger {
            units += 1;
            ensure(e.beta_non_increasing(), || {
                format!("{}: β^O rose in unit {} ({})", run.name, e.unit, e.chart)
            })?;
            for b in [&e.beta_before, &e.beta_after].into_iter().flatten() {
                ensure(
                    (b * BigRational::from_integer(fact.clone())).is_integer(),
                    || format!("{}: β^O = {b} off the lattice", run.name),
                )?;
            }
            if e.beta_before != e.beta_after {
                drops += 1;
            }
            if e.zeta_checked {
                let (z0, e0, z1) = (
                    e.zeta_entry.as_ref().unwrap(),
                    e.epsilon_entry.as_ref().unwrap(),
                    e.zeta_exit.as_ref().unwrap(),
                );
                ensure(
                    *z1 == z0 + e0 - BigRational::from_integer(e.m.into()) && z1 < z0,
                    || format!("{}: ζ^O recurrence in unit {}", run.name, e.unit),
                )?;
                zeta += 1;
            }
        }
    }
    ensure(zeta > 0, || "no constant-β^O stretch in the corpus".into())?;
    let (b0, b1) = nonrational_unit()?;
    ensure(b1 < b0, || format!("non-rational unit: β^O {b0} → {b1}"))?;
    let note = if skipped.is_empty() {
        String::new()
    } else {
        format!(", {} inconclusive runs skipped", skipped.len())
    };
    Ok(format!(
        "{} runs, {units} units, {drops} β^O drops, {zeta} ζ^O checks, non-rational β^O {b0} → {b1}{note}",
        runs.len()
    ))
}

pub fn boundary_superset(label: &Label) -> bool {
    let o = boundary_polyhedron(label).unwrap();
    char_polyhedron(label).is_subset_of(&o)
}
