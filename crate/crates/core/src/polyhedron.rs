//! Rational F-subsets of ℝ^e_{≥0}: closed convex sets stable under adding the
//! positive orthant, kept as their list of extreme vertices.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{rat_int, LinearForm};
use crate::error::{Error, Result};
use crate::lp::{maximize, LpOutcome};

pub type Point = Vec<BigRational>;

/// conv(vertices) + ℝ^e_{≥0}; empty when there are no vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FSubset {
    dim: usize,
    vertices: Vec<Point>,
}

/// Face of an F-subset cut out by a linear form at its minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub form: LinearForm,
    pub level: BigRational,
    pub vertices: Vec<Point>,
    pub bounded: bool,
}

/// The invariants α, β, δ, γ±, ε, ζ of a two-dimensional F-subset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants2 {
    #[serde(serialize_with = "ser_rat")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub beta: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub delta: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_plus: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub gamma_minus: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub epsilon: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub zeta: BigRational,
    #[serde(serialize_with = "ser_point")]
    pub v: Point,
    #[serde(serialize_with = "ser_point")]
    pub w_plus: Point,
    #[serde(serialize_with = "ser_point")]
    pub w_minus: Point,
}

fn ser_rat<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_point<S: serde::Serializer>(p: &Point, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.len()))?;
    for x in p {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Affine map x ↦ M x + c on ℚ^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub matrix: Vec<Vec<BigRational>>,
    pub offset: Vec<BigRational>,
}

impl AffineMap {
    pub fn identity(e: usize) -> Self {
        let matrix = (0..e)
            .map(|i| (0..e).map(|j| rat_int((i == j) as i64)).collect())
            .collect();
        AffineMap {
            matrix,
            offset: vec![BigRational::zero(); e],
        }
    }

    /// (a_1, ..., a_e) ↦ (|a| - 1, a_2, ..., a_e).
    pub fn point_u1(e: usize) -> Self {
        let mut m = AffineMap::identity(e);
        m.matrix[0] = vec![BigRational::one(); e];
        m.offset[0] = rat_int(-1);
        m
    }

    /// (a_1, a_2) ↦ (a_1, a_1 + a_2 - 1).
    pub fn point_u2() -> Self {
        let mut m = AffineMap::identity(2);
        m.matrix[1] = vec![BigRational::one(); 2];
        m.offset[1] = rat_int(-1);
        m
    }

    /// (a_1, ..., a_e) ↦ (a_1 - 1, a_2, ..., a_e).
    pub fn curve_u1(e: usize) -> Self {
        let mut m = AffineMap::identity(e);
        m.offset[0] = rat_int(-1);
        m
    }

    /// (a_1, ..., a_e) ↦ (a_1 - k, a_2, ..., a_e).
    pub fn shift_first(e: usize, k: &BigRational) -> Self {
        let mut m = AffineMap::identity(e);
        m.offset[0] = -k.clone();
        m
    }

    pub fn apply(&self, x: &[BigRational]) -> Point {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, c)| {
                row.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (m, xi)| acc + m * xi)
            })
            .collect()
    }
}

fn dominated_by(p: &[BigRational], q: &[BigRational]) -> bool {
    // p ∈ q + ℝ^e_{≥0}
    p.iter().zip(q).all(|(a, b)| a >= b)
}

/// Pareto filter: keep points not dominated by another point.
fn pareto(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut out = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let dominated = pts
            .iter()
            .enumerate()
            .any(|(j, q)| i != j && dominated_by(p, q));
        if !dominated {
            out.push(p.clone());
        }
    }
    out
}

/// Lower convex chain of Pareto points in the plane, strict extreme points only.
fn lower_chain_2d(mut pts: Vec<Point>) -> Vec<Point> {
    // Pareto points sorted by first coordinate have strictly decreasing second one.
    pts.sort();
    let mut hull: Vec<Point> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // remove b unless it lies strictly below segment a-p
            let cross = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
            if cross.is_positive() {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

/// Whether x ∈ conv(gens) + ℝ^e_{≥0}.
fn in_hull_plus_orthant(gens: &[Point], x: &[BigRational]) -> bool {
    if gens.is_empty() {
        return false;
    }
    let e = x.len();
    let m = gens.len();
    // variables λ_1..λ_m, s_1..s_e; Σ λ_k g_k + s = x, Σ λ = 1
    let mut a = Vec::with_capacity(e + 1);
    for i in 0..e {
        let mut row: Vec<BigRational> = gens.iter().map(|g| g[i].clone()).collect();
        row.extend((0..e).map(|j| rat_int((i == j) as i64)));
        a.push(row);
    }
    let mut last = vec![BigRational::one(); m];
    last.extend((0..e).map(|_| BigRational::zero()));
    a.push(last);
    let mut b = x.to_vec();
    b.push(BigRational::one());
    let c = vec![BigRational::zero(); m + e];
    !matches!(maximize(&a, &b, &c), LpOutcome::Infeasible)
}

impl FSubset {
    pub fn empty(dim: usize) -> Self {
        FSubset {
            dim,
            vertices: Vec::new(),
        }
    }

    /// Smallest F-subset containing all points.
    pub fn minimal(dim: usize, points: &[Point]) -> Result<Self> {
        for p in points {
            if p.len() != dim {
                return Err(Error::WrongDimension {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| x.is_negative()) {
                return Err(Error::NegativeCoordinate(format_point(p)));
            }
        }
        let pts = pareto(points);
        let vertices = match dim {
            0 | 1 => pts,
            2 => lower_chain_2d(pts),
            _ => {
                let mut keep = pts;
                let mut i = 0;
                while i < keep.len() {
                    let others: Vec<Point> = keep
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, p)| p.clone())
                        .collect();
                    if in_hull_plus_orthant(&others, &keep[i]) {
                        keep.remove(i);
                    } else {
                        i += 1;
                    }
                }
                keep
            }
        };
        let mut vertices = vertices;
        vertices.sort();
        Ok(FSubset { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_vertex(&self, p: &[BigRational]) -> bool {
        self.vertices.iter().any(|v| v.as_slice() == p)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        if self.vertices.iter().any(|v| dominated_by(x, v)) {
            return true;
        }
        in_hull_plus_orthant(&self.vertices, x)
    }

    /// Whether x lies in the essential boundary: x ∈ Δ and no other point of
    /// Δ lies in x - ℝ^e_{≥0}.
    pub fn in_essential_boundary(&self, x: &[BigRational]) -> bool {
        if !self.contains(x) {
            return false;
        }
        let e = self.dim;
        let m = self.vertices.len();
        // maximize Σ t subject to Σ λ_k v_k + s + t = x, Σ λ = 1
        let mut a = Vec::with_capacity(e + 1);
        for i in 0..e {
            let mut row: Vec<BigRational> = self.vertices.iter().map(|g| g[i].clone()).collect();
            row.extend((0..e).map(|j| rat_int((i == j) as i64)));
            row.extend((0..e).map(|j| rat_int((i == j) as i64)));
            a.push(row);
        }
        let mut last = vec![BigRational::one(); m];
        last.extend((0..2 * e).map(|_| BigRational::zero()));
        a.push(last);
        let mut b = x.to_vec();
        b.push(BigRational::one());
        let mut c = vec![BigRational::zero(); m + e];
        c.extend((0..e).map(|_| BigRational::one()));
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => value.is_zero(),
            _ => false,
        }
    }

    /// Δ^+ = Δ minus its essential boundary.
    pub fn in_interior_part(&self, x: &[BigRational]) -> bool {
        self.contains(x) && !self.in_essential_boundary(x)
    }

    /// Δ ⊆ other.
    pub fn is_subset_of(&self, other: &FSubset) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    /// δ_L and the face where it is attained.
    pub fn delta_face(&self, l: &LinearForm) -> Result<(BigRational, Face)> {
        if l.dim() != self.dim {
            return Err(Error::WrongDimension {
                expected: self.dim,
                got: l.dim(),
            });
        }
        let level = self
            .vertices
            .iter()
            .map(|v| l.eval(v))
            .min()
            .ok_or(Error::EmptyPolyhedron)?;
        let vertices = self
            .vertices
            .iter()
            .filter(|v| l.eval(v) == level)
            .cloned()
            .collect();
        Ok((
            level.clone(),
            Face {
                form: l.clone(),
                level,
                vertices,
                bounded: l.is_positive(),
            },
        ))
    }

    /// δ(Δ) = δ_{L_0}(Δ), None for the empty set.
    pub fn delta(&self) -> Option<BigRational> {
        self.vertices
            .iter()
            .map(|v| v.iter().fold(BigRational::zero(), |acc, x| acc + x))
            .min()
    }

    pub fn invariants2(&self) -> Result<Invariants2> {
        if self.dim != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                got: self.dim,
            });
        }
        if self.is_empty() {
            return Err(Error::EmptyPolyhedron);
        }
        let vs = &self.vertices;
        let alpha = vs.iter().map(|v| v[0].clone()).min().unwrap();
        let beta = vs
            .iter()
            .filter(|v| v[0] == alpha)
            .map(|v| v[1].clone())
            .min()
            .unwrap();
        let delta = self.delta().unwrap();
        let on_face: Vec<&Point> = vs.iter().filter(|v| &v[0] + &v[1] == delta).collect();
        let gamma_plus = on_face.iter().map(|v| v[1].clone()).max().unwrap();
        let gamma_minus = on_face.iter().map(|v| v[1].clone()).min().unwrap();
        let epsilon = vs.iter().map(|v| v[1].clone()).min().unwrap();
        let zeta = vs
            .iter()
            .filter(|v| v[1] == epsilon)
            .map(|v| v[0].clone())
            .min()
            .unwrap();
        Ok(Invariants2 {
            v: vec![alpha.clone(), beta.clone()],
            w_plus: vec![&delta - &gamma_plus, gamma_plus.clone()],
            w_minus: vec![&delta - &gamma_minus, gamma_minus.clone()],
            alpha,
            beta,
            delta,
            gamma_plus,
            gamma_minus,
            epsilon,
            zeta,
        })
    }

    /// π_s: keep the first s coordinates.
    pub fn project(&self, s: usize) -> Result<FSubset> {
        if s == 0 || s > self.dim {
            return Err(Error::BadIndex(s));
        }
        let pts: Vec<Point> = self.vertices.iter().map(|v| v[..s].to_vec()).collect();
        FSubset::minimal(s, &pts)
    }

    pub fn map_and_rebuild(&self, psi: &AffineMap) -> Result<FSubset> {
        let pts: Vec<Point> = self.vertices.iter().map(|v| psi.apply(v)).collect();
        FSubset::minimal(psi.offset.len(), &pts)
    }

    /// Vertices as fraction strings, lex-sorted.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.vertices
                .iter()
                .map(|v| {
                    serde_json::Value::Array(
                        v.iter()
                            .map(|x| serde_json::Value::String(x.to_string()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

pub fn format_point(p: &[BigRational]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for FSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "<empty>");
        }
        let parts: Vec<String> = self.vertices.iter().map(|v| format_point(v)).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn pt(xs: &[(i64, i64)]) -> Point {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn dominated_points_are_dropped() {
        let d = FSubset::minimal(
            2,
            &[
                pt(&[(1, 1), (2, 1)]),
                pt(&[(2, 1), (1, 1)]),
                pt(&[(3, 1), (3, 1)]),
            ],
        )
        .unwrap();
        assert_eq!(
            d.vertices(),
            &[pt(&[(1, 1), (2, 1)]), pt(&[(2, 1), (1, 1)])]
        );
    }

    #[test]
    fn collinear_middle_point_is_not_extreme() {
        let d = FSubset::minimal(
            2,
            &[
                pt(&[(0, 1), (2, 1)]),
                pt(&[(1, 1), (1, 1)]),
                pt(&[(2, 1), (0, 1)]),
            ],
        )
        .unwrap();
        assert_eq!(d.vertices().len(), 2);
        assert!(d.in_essential_boundary(&pt(&[(1, 1), (1, 1)])));
        assert!(!d.in_essential_boundary(&pt(&[(2, 1), (1, 1)])));
    }

    #[test]
    fn three_dimensional_hull() {
        let pts = vec![
            pt(&[(2, 1), (0, 1), (0, 1)]),
            pt(&[(0, 1), (2, 1), (0, 1)]),
            pt(&[(0, 1), (0, 1), (2, 1)]),
            pt(&[(1, 1), (1, 1), (1, 1)]),
            pt(&[(1, 2), (1, 2), (1, 2)]),
        ];
        let d = FSubset::minimal(3, &pts).unwrap();
        assert_eq!(d.vertices().len(), 4);
        assert!(!d.is_vertex(&pt(&[(1, 1), (1, 1), (1, 1)])));
        assert!(d.contains(&pt(&[(1, 1), (1, 1), (0, 1)])));
        assert!(!d.contains(&pt(&[(1, 4), (1, 4), (1, 4)])));
    }

    #[test]
    fn invariants_of_two_vertex_polyhedron() {
        let d = FSubset::minimal(2, &[pt(&[(14, 3), (1, 3)]), pt(&[(2, 3), (13, 3)])]).unwrap();
        let inv = d.invariants2().unwrap();
        assert_eq!(inv.alpha, rat(2, 3));
        assert_eq!(inv.beta, rat(13, 3));
        assert_eq!(inv.delta, rat(5, 1));
        assert_eq!(inv.gamma_plus, rat(13, 3));
        assert_eq!(inv.gamma_minus, rat(1, 3));
        assert_eq!(inv.epsilon, rat(1, 3));
        assert_eq!(inv.zeta, rat(14, 3));
    }

    #[test]
    fn projection_and_maps() {
        let d = FSubset::minimal(
            2,
            &[
                pt(&[(4, 1), (13, 3)]),
                pt(&[(74, 3), (4, 3)]),
                pt(&[(35, 1), (0, 1)]),
            ],
        )
        .unwrap();
        assert_eq!(d.project(1).unwrap().vertices(), &[pt(&[(4, 1)])]);
        assert!(matches!(d.project(3), Err(Error::BadIndex(3))));
        let e = FSubset::minimal(2, &[pt(&[(14, 3), (1, 3)]), pt(&[(2, 3), (13, 3)])]).unwrap();
        let m = e.map_and_rebuild(&AffineMap::point_u1(2)).unwrap();
        assert_eq!(m.vertices(), &[pt(&[(4, 1), (1, 3)])]);
        let neg = FSubset::minimal(2, &[pt(&[(1, 2), (0, 1)])]).unwrap();
        assert!(matches!(
            neg.map_and_rebuild(&AffineMap::curve_u1(2)),
            Err(Error::NegativeCoordinate(_))
        ));
    }
}
