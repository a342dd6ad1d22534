//! Row reduction over a coefficient field.

use super::field::{FieldSpec, Scalar};

/// Incrementally built row-echelon basis. Each stored row remembers which
/// combination of inserted vectors produced it.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    width: usize,
    rows: Vec<Row>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    v: Vec<Scalar>,
    combo: Vec<Scalar>,
}

fn axpy(field: &FieldSpec, y: &mut Vec<Scalar>, a: &Scalar, x: &[Scalar]) {
    if y.len() < x.len() {
        y.resize(x.len(), field.zero());
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !field.is_zero(xi) {
            *yi = field.add(yi, &field.mul(a, xi));
        }
    }
}

impl Echelon {
    pub fn new(field: &FieldSpec, width: usize) -> Self {
        Echelon {
            field: field.clone(),
            width,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduce v against the basis; returns the remainder and the combination
    /// c of inserted vectors with v = remainder + Σ c_k inserted_k.
    pub fn reduce(&self, v: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let f = &self.field;
        let mut r = v.to_vec();
        let mut combo = vec![f.zero(); self.inserted];
        for row in &self.rows {
            let c = r[row.pivot].clone();
            if f.is_zero(&c) {
                continue;
            }
            let neg = f.neg(&c);
            axpy(f, &mut r, &neg, &row.v);
            axpy(f, &mut combo, &c, &row.combo);
        }
        (r, combo)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let (r, _) = self.reduce(v);
        r.iter().all(|x| self.field.is_zero(x))
    }

    /// Insert v; returns true if it was independent of the current span.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let f = self.field.clone();
        let idx = self.inserted;
        self.inserted += 1;
        let (mut r, combo) = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        // r = v - Σ combo_k inserted_k
        let mut own = vec![f.zero(); self.inserted];
        for (k, c) in combo.iter().enumerate() {
            own[k] = f.neg(c);
        }
        own[idx] = f.one();
        let inv = f.inv(&r[pivot]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for x in own.iter_mut() {
            *x = f.mul(x, &inv);
        }
        // keep fully reduced form
        for row in self.rows.iter_mut() {
            let c = row.v[pivot].clone();
            if !f.is_zero(&c) {
                let neg = f.neg(&c);
                axpy(&f, &mut row.v, &neg, &r);
                axpy(&f, &mut row.combo, &neg, &own);
            }
        }
        self.rows.push(Row {
            pivot,
            v: r,
            combo: own,
        });
        self.rows.sort_by_key(|row| row.pivot);
        true
    }

    /// Basis rows in reduced echelon form.
    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().map(|r| r.v.clone()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.pivot).collect()
    }
}

/// Solve M x = b. Returns a particular solution and a kernel basis.
pub fn solve(
    field: &FieldSpec,
    m: &[Vec<Scalar>],
    b: &[Scalar],
    ncols: usize,
) -> Option<(Vec<Scalar>, Vec<Vec<Scalar>>)> {
    // row reduce the augmented matrix
    let mut rows: Vec<Vec<Scalar>> = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut v = r.clone();
            v.resize(ncols, field.zero());
            v.push(bi.clone());
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !field.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inv(&rows[rank][c]).expect("nonzero pivot");
        for x in rows[rank].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let prow = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !field.is_zero(&row[c]) {
                let neg = field.neg(&row[c]);
                axpy(field, row, &neg, &prow);
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !field.is_zero(&r[ncols])) {
        return None;
    }
    let mut x = vec![field.zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][ncols].clone();
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut k = vec![field.zero(); ncols];
            k[fc] = field.one();
            for (i, &c) in pivots.iter().enumerate() {
                k[c] = field.neg(&rows[i][fc]);
            }
            k
        })
        .collect();
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(f: &FieldSpec, xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| f.from_i64(x)).collect()
    }

    #[test]
    fn echelon_tracks_combinations() {
        let f = FieldSpec::Rationals;
        let mut e = Echelon::new(&f, 3);
        assert!(e.insert(&v(&f, &[1, 1, 0])));
        assert!(e.insert(&v(&f, &[0, 1, 1])));
        assert!(!e.insert(&v(&f, &[1, 2, 1])));
        let target = v(&f, &[2, 5, 3]);
        let (r, c) = e.reduce(&target);
        assert!(r.iter().all(|x| f.is_zero(x)));
        // 2*(1,1,0) + 3*(0,1,1)
        assert_eq!(c[0], f.from_i64(2));
        assert_eq!(c[1], f.from_i64(3));
    }

    #[test]
    fn solve_with_kernel() {
        let f = FieldSpec::prime(5).unwrap();
        let m = vec![v(&f, &[1, 2, 0]), v(&f, &[0, 0, 1])];
        let (x, k) = solve(&f, &m, &v(&f, &[3, 4]), 3).unwrap();
        assert_eq!(x, v(&f, &[3, 0, 4]));
        assert_eq!(k, vec![v(&f, &[-2, 1, 0])]);
        assert!(solve(&f, &[v(&f, &[0, 0])], &v(&f, &[1]), 2).is_none());
    }
}
