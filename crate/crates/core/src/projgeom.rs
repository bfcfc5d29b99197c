//! Projective space PG(n,q): canonical subspace representation, span,
//! membership, point enumeration and the .pts file format.
//!
//! Points are normalized coordinate vectors (first nonzero coordinate 1).
//! The enumeration order is ascending on the integer key
//! `sum_i code(c_i) * q^i`, which is what fixes every PointIndex used by the
//! rest of the crate. Subspaces are kept in reduced row echelon form with
//! pivots leftmost, so equal subspaces compare equal.

use crate::exact::theta;
use crate::gf::Field;
use num_bigint::BigInt;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

pub type PointIndex = usize;

#[derive(Debug, Error)]
pub enum ProjError {
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("enumeration cap exceeded: space has {0} points, cap {1}")]
    CapExceeded(BigInt, u64),
    #[error("{file}:{line}: {msg}")]
    PtsFormat { file: String, line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A subspace of PG(n,q) held as an RREF basis. An empty basis is the empty
/// subspace (projective dimension -1); a single row is a point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    rows: Vec<Vec<u32>>,
}

impl Subspace {
    pub fn empty(n: usize) -> Subspace {
        Subspace { n, rows: Vec::new() }
    }

    pub fn from_rows(field: &Field, n: usize, rows: Vec<Vec<u32>>) -> Subspace {
        let rows = rref(field, rows);
        Subspace { n, rows }
    }

    pub fn point(field: &Field, coords: &[u32]) -> Subspace {
        let v = normalize(field, coords).expect("zero vector is not a point");
        Subspace { n: coords.len() - 1, rows: vec![v] }
    }

    /// Projective dimension; -1 for the empty subspace.
    pub fn dim(&self) -> i64 {
        self.rows.len() as i64 - 1
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn contains(&self, field: &Field, v: &[u32]) -> bool {
        let mut v = v.to_vec();
        for row in &self.rows {
            let pivot = row.iter().position(|&c| c != 0).unwrap();
            if v[pivot] != 0 {
                let c = v[pivot];
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi = field.sub(*vi, field.mul(c, *ri));
                }
            }
        }
        v.iter().all(|&c| c == 0)
    }

    pub fn contains_subspace(&self, field: &Field, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(field, r))
    }
}

/// Scale a vector so its first nonzero coordinate is 1; None for zero.
pub fn normalize(field: &Field, v: &[u32]) -> Option<Vec<u32>> {
    let lead = v.iter().find(|&&c| c != 0)?;
    let inv = field.inv(*lead).unwrap();
    Some(v.iter().map(|&c| field.mul(c, inv)).collect())
}

/// Reduced row echelon form, pivots leftmost, leading coefficients 1,
/// zero rows dropped.
pub fn rref(field: &Field, mut rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..width {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = field.inv(rows[rank][col]).unwrap();
        for c in rows[rank].iter_mut() {
            *c = field.mul(*c, inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..width {
                    let sub = field.mul(f, rows[rank][c]);
                    rows[r][c] = field.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

/// Canonical basis of {v : M v^T = 0} for the constraint rows `m`.
pub fn nullspace(field: &Field, n: usize, m: Vec<Vec<u32>>) -> Subspace {
    let width = n + 1;
    let m = rref(field, m);
    let pivots: Vec<usize> =
        m.iter().map(|r| r.iter().position(|&c| c != 0).unwrap()).collect();
    let mut basis = Vec::new();
    for free in 0..width {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u32; width];
        v[free] = 1;
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = field.neg(row[free]);
        }
        basis.push(v);
    }
    Subspace::from_rows(field, n, basis)
}

/// PG(n,q) with its fixed point enumeration and key -> index map.
#[derive(Debug, Clone)]
pub struct ProjGeometry {
    field: Arc<Field>,
    n: usize,
    points: Vec<Vec<u32>>,
    index: HashMap<u64, PointIndex>,
}

impl ProjGeometry {
    pub fn new(field: Arc<Field>, n: usize, max_points: u64) -> Result<ProjGeometry, ProjError> {
        let q = field.q();
        let count = theta(n as i64, q);
        if count > BigInt::from(max_points) {
            return Err(ProjError::CapExceeded(count, max_points));
        }
        let width = n + 1;
        let total = q.pow(width as u32);
        let mut points = Vec::new();
        let mut index = HashMap::new();
        for key in 1..total {
            let mut v = Vec::with_capacity(width);
            let mut rest = key;
            for _ in 0..width {
                v.push((rest % q) as u32);
                rest /= q;
            }
            // normalized representatives only
            if *v.iter().find(|&&c| c != 0).unwrap() != 1 {
                continue;
            }
            index.insert(key, points.len());
            points.push(v);
        }
        debug_assert_eq!(BigInt::from(points.len()), count);
        Ok(ProjGeometry { field, n, points, index })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<Field> {
        self.field.clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point_coords(&self, i: PointIndex) -> &[u32] {
        &self.points[i]
    }

    pub fn point_subspace(&self, i: PointIndex) -> Subspace {
        Subspace { n: self.n, rows: vec![self.points[i].clone()] }
    }

    fn key(&self, v: &[u32]) -> u64 {
        let q = self.field.q();
        v.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    /// Index of a (not necessarily normalized) nonzero vector.
    pub fn index_of(&self, v: &[u32]) -> Option<PointIndex> {
        let nv = normalize(&self.field, v)?;
        self.index.get(&self.key(&nv)).copied()
    }

    /// Canonical span of the given subspaces.
    pub fn span(&self, parts: &[&Subspace]) -> Result<Subspace, ProjError> {
        let mut rows = Vec::new();
        for s in parts {
            if s.ambient() != self.n {
                return Err(ProjError::AmbientMismatch(s.ambient(), self.n));
            }
            rows.extend(s.rows.iter().cloned());
        }
        Ok(Subspace::from_rows(&self.field, self.n, rows))
    }

    pub fn span_with_point(&self, s: &Subspace, p: PointIndex) -> Subspace {
        let mut rows = s.rows.clone();
        rows.push(self.points[p].clone());
        Subspace::from_rows(&self.field, self.n, rows)
    }

    /// All point indices lying in the subspace, ascending.
    pub fn points_in(&self, s: &Subspace) -> Vec<PointIndex> {
        let q = self.field.q();
        let d = s.rows.len();
        if d == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for combo in 1..q.pow(d as u32) {
            let mut coeffs = Vec::with_capacity(d);
            let mut rest = combo;
            for _ in 0..d {
                coeffs.push((rest % q) as u32);
                rest /= q;
            }
            // one representative per point: first nonzero coefficient 1
            if *coeffs.iter().find(|&&c| c != 0).unwrap() != 1 {
                continue;
            }
            let mut v = vec![0u32; self.n + 1];
            for (c, row) in coeffs.iter().zip(&s.rows) {
                if *c != 0 {
                    for (vi, ri) in v.iter_mut().zip(row) {
                        *vi = self.field.add(*vi, self.field.mul(*c, *ri));
                    }
                }
            }
            out.push(self.index[&self.key(&v)]);
        }
        out.sort_unstable();
        out
    }

    /// Write a point set in the .pts format.
    pub fn format_pts(&self, points: &[PointIndex]) -> String {
        let mut out = format!("n={} q={}\n", self.n, self.field.q());
        for &p in points {
            let coords: Vec<String> =
                self.points[p].iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "{}", coords.join(","));
        }
        out
    }

    /// Parse a .pts file body; the loader normalizes each point.
    pub fn parse_pts(&self, name: &str, body: &str) -> Result<Vec<PointIndex>, ProjError> {
        let err = |line: usize, msg: String| ProjError::PtsFormat {
            file: name.to_string(),
            line,
            msg,
        };
        let mut lines = body.lines().enumerate();
        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(1, "empty file".into()))?;
        let mut n = None;
        let mut q = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("q=") {
                q = v.parse::<u64>().ok();
            }
        }
        let (n, q) = match (n, q) {
            (Some(n), Some(q)) => (n, q),
            _ => return Err(err(hline + 1, format!("bad header {header:?}, expected `n=<n> q=<q>`"))),
        };
        if n != self.n || q != self.field.q() {
            return Err(err(
                hline + 1,
                format!("file is for PG({n},{q}), expected PG({},{})", self.n, self.field.q()),
            ));
        }
        let mut out = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let coords: Result<Vec<u32>, _> =
                line.split(',').map(|t| t.trim().parse::<u32>()).collect();
            let coords = coords.map_err(|e| err(i + 1, format!("bad coordinate: {e}")))?;
            if coords.len() != n + 1 {
                return Err(err(i + 1, format!("expected {} coordinates, got {}", n + 1, coords.len())));
            }
            if let Some(&c) = coords.iter().find(|&&c| c as u64 >= q) {
                return Err(err(i + 1, format!("coordinate {c} out of range for GF({q})")));
            }
            let idx = self
                .index_of(&coords)
                .ok_or_else(|| err(i + 1, "zero vector is not a point".into()))?;
            out.push(idx);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(p: u64, k: u32, n: usize) -> ProjGeometry {
        let f = Arc::new(Field::new(p, k).unwrap());
        ProjGeometry::new(f, n, 1_000_000).unwrap()
    }

    #[test]
    fn enumeration_order_pg12() {
        let g = geom(2, 1, 1);
        let pts: Vec<&[u32]> = (0..g.num_points()).map(|i| g.point_coords(i)).collect();
        assert_eq!(pts, vec![&[1, 0][..], &[0, 1], &[1, 1]]);
    }

    #[test]
    fn fano_plane() {
        let g = geom(2, 1, 2);
        assert_eq!(g.num_points(), 7);
    }

    #[test]
    fn pg53_count() {
        let g = geom(3, 1, 5);
        assert_eq!(g.num_points(), 364);
        assert_eq!(theta(5, 3), BigInt::from(364));
    }

    #[test]
    fn span_and_points_in() {
        let g = geom(2, 1, 2);
        let p = g.point_subspace(0);
        let sp = g.span(&[&p]).unwrap();
        assert_eq!(sp, p); // idempotent
        assert_eq!(g.span(&[&p, &p]).unwrap(), p);
        let quo = g.point_subspace(3);
        let line = g.span(&[&p, &quo]).unwrap();
        assert_eq!(line.dim(), 1);
        assert_eq!(g.points_in(&line).len(), 3);
        // monotone and commutative
        assert!(line.contains_subspace(g.field(), &p));
        assert_eq!(g.span(&[&quo, &p]).unwrap(), line);
    }

    #[test]
    fn points_in_matches_theta_on_samples() {
        let g = geom(2, 2, 4); // PG(4,4)
        // a plane through three points in general position
        let a = g.point_subspace(0);
        let b = g.point_subspace(g.num_points() / 2);
        let c = g.point_subspace(g.num_points() - 1);
        let s = g.span(&[&a, &b, &c]).unwrap();
        if s.dim() == 2 {
            assert_eq!(g.points_in(&s).len(), 21); // theta_2 over GF(4)
            // brute force membership agrees
            let brute = (0..g.num_points())
                .filter(|&i| s.contains(g.field(), g.point_coords(i)))
                .count();
            assert_eq!(brute, 21);
        } else {
            panic!("sample points were not in general position");
        }
    }

    #[test]
    fn normalization_scale_invariant() {
        let g = geom(3, 1, 3);
        for i in 0..g.num_points() {
            let coords = g.point_coords(i).to_vec();
            for s in 1..3u32 {
                let scaled: Vec<u32> = coords.iter().map(|&c| g.field().mul(c, s)).collect();
                assert_eq!(g.index_of(&scaled), Some(i));
            }
        }
    }

    #[test]
    fn nullspace_dimension() {
        let g = geom(2, 1, 3);
        let row = g.point_coords(0).to_vec();
        let ns = nullspace(g.field(), 3, vec![row.clone()]);
        assert_eq!(ns.dim(), 2);
        for p in g.points_in(&ns) {
            let dot = g
                .point_coords(p)
                .iter()
                .zip(&row)
                .fold(0u32, |acc, (&a, &b)| g.field().add(acc, g.field().mul(a, b)));
            assert_eq!(dot, 0);
        }
    }

    #[test]
    fn pts_round_trip() {
        let g = geom(3, 1, 3);
        let pts = vec![0usize, 5, 17];
        let body = g.format_pts(&pts);
        let back = g.parse_pts("test.pts", &body).unwrap();
        assert_eq!(back, pts);
        // loader normalizes
        let body2 = "n=3 q=3\n# comment\n2,0,0,0\n";
        assert_eq!(g.parse_pts("t", body2).unwrap(), vec![0]);
        let bad = "n=3 q=3\n1,2\n";
        let e = g.parse_pts("t", bad).unwrap_err();
        assert!(e.to_string().contains("t:2"), "{e}");
    }
}
