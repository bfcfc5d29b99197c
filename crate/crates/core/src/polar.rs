//! The polar spaces Q^-(2r+1,q), W(2r-1,q) and H(2r,q): canonical forms,
//! the polarity `perp`, point enumeration and generator enumeration.

use crate::config::Config;
use crate::exact::{half_power, theta};
use crate::gf::{factor_prime_power, Field};
use crate::projgeom::{nullspace, PointIndex, ProjGeometry, ProjError, Subspace};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::HashSet;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Q^-(2r+1,q), e = 2.
    Elliptic,
    /// W(2r-1,q), e = 1.
    Symplectic,
    /// H(2r,q), q square, e = 3/2.
    Hermitian,
}

impl SpaceKind {
    /// Twice the type parameter e, so it stays integral for the Hermitian case.
    pub fn e2(self) -> i64 {
        match self {
            SpaceKind::Elliptic => 4,
            SpaceKind::Symplectic => 2,
            SpaceKind::Hermitian => 3,
        }
    }

    /// e rendered as a fraction string.
    pub fn e_str(self) -> &'static str {
        match self {
            SpaceKind::Elliptic => "2",
            SpaceKind::Symplectic => "1",
            SpaceKind::Hermitian => "3/2",
        }
    }

    /// Ambient projective dimension n = 2r + 2e - 3.
    pub fn ambient_dim(self, r: u32) -> usize {
        (2 * r as i64 + self.e2() - 3) as usize
    }

    pub fn parse(s: &str) -> Option<SpaceKind> {
        match s {
            "Q-" | "q-" | "elliptic" => Some(SpaceKind::Elliptic),
            "W" | "w" | "symplectic" => Some(SpaceKind::Symplectic),
            "H" | "h" | "hermitian" => Some(SpaceKind::Hermitian),
            _ => None,
        }
    }

    pub fn name(self, r: u32, q: u64) -> String {
        match self {
            SpaceKind::Elliptic => format!("Q-({},{})", 2 * r + 1, q),
            SpaceKind::Symplectic => format!("W({},{})", 2 * r - 1, q),
            SpaceKind::Hermitian => format!("H({},{})", 2 * r, q),
        }
    }
}

#[derive(Debug, Error)]
pub enum PolarError {
    #[error("Hermitian polar spaces need a square field order, got {0}")]
    NotSquareOrder(u64),
    #[error("rank must be at least 1")]
    RankZero,
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error("generator count {0} exceeds cap {1}")]
    GeneratorCap(BigInt, u64),
    #[error("point count mismatch: enumerated {got}, formula gives {expected} (wrong form choice?)")]
    CountMismatch { expected: BigInt, got: usize },
    #[error("quadratic form evaluation is only defined for the elliptic kind")]
    WrongArity,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// A constructed polar space: ambient geometry, form data, polar point set.
#[derive(Debug, Clone)]
pub struct PolarSpace {
    kind: SpaceKind,
    r: u32,
    n: usize,
    geom: ProjGeometry,
    /// Gram matrix of the reflexive form driving `perp` (for the elliptic
    /// kind this is the associated bilinear form).
    gram: Vec<Vec<u32>>,
    /// Coefficients (a, b) of the trailing irreducible binary form of Q.
    elliptic_tail: Option<(u32, u32)>,
    points: Vec<PointIndex>,
    is_polar: Vec<bool>,
    gen_sets: OnceLock<Vec<Vec<PointIndex>>>,
}

impl PolarSpace {
    pub fn build(kind: SpaceKind, r: u32, field: Arc<Field>) -> Result<PolarSpace, PolarError> {
        PolarSpace::build_with(kind, r, field, &Config::default())
    }

    pub fn build_with(
        kind: SpaceKind,
        r: u32,
        field: Arc<Field>,
        cfg: &Config,
    ) -> Result<PolarSpace, PolarError> {
        if r == 0 {
            return Err(PolarError::RankZero);
        }
        if kind == SpaceKind::Hermitian && field.k() % 2 != 0 {
            return Err(PolarError::NotSquareOrder(field.q()));
        }
        let n = kind.ambient_dim(r);
        let geom = ProjGeometry::new(field, n, cfg.max_points)?;
        let field = geom.field_arc();

        let (gram, elliptic_tail) = match kind {
            SpaceKind::Symplectic => (symplectic_gram(&field, n), None),
            SpaceKind::Hermitian => (identity_gram(n), None),
            SpaceKind::Elliptic => {
                let (a, b) = irreducible_tail(&field);
                (elliptic_gram(&field, n, a, b), Some((a, b)))
            }
        };

        let mut ps = PolarSpace {
            kind,
            r,
            n,
            geom,
            gram,
            elliptic_tail,
            points: Vec::new(),
            is_polar: Vec::new(),
            gen_sets: OnceLock::new(),
        };
        ps.enumerate_polar_points();

        let expected = polar_point_count(kind, r, ps.field().q())?;
        if BigInt::from(ps.points.len()) != expected {
            return Err(PolarError::CountMismatch { expected, got: ps.points.len() });
        }
        Ok(ps)
    }

    fn enumerate_polar_points(&mut self) {
        let total = self.geom.num_points();
        let mut is_polar = vec![false; total];
        let mut points = Vec::new();
        for i in 0..total {
            let v = self.geom.point_coords(i);
            let singular = match self.kind {
                SpaceKind::Symplectic => true,
                SpaceKind::Elliptic => self.quad_value(v) == 0,
                SpaceKind::Hermitian => self.hermitian_value(v, v) == 0,
            };
            if singular {
                is_polar[i] = true;
                points.push(i);
            }
        }
        self.points = points;
        self.is_polar = is_polar;
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }
    pub fn rank(&self) -> u32 {
        self.r
    }
    pub fn ambient_dim(&self) -> usize {
        self.n
    }
    pub fn geometry(&self) -> &ProjGeometry {
        &self.geom
    }
    pub fn field(&self) -> &Field {
        self.geom.field()
    }
    pub fn name(&self) -> String {
        self.kind.name(self.r, self.field().q())
    }

    /// Polar point indices, ascending.
    pub fn points(&self) -> &[PointIndex] {
        &self.points
    }

    pub fn is_polar_point(&self, i: PointIndex) -> bool {
        self.is_polar[i]
    }

    /// Number of polar points in each generator, theta_{r-1}.
    pub fn points_per_generator(&self) -> BigInt {
        theta(self.r as i64 - 1, self.field().q())
    }

    /// Point-index lists of all generators, cached after first use.
    pub fn generator_point_sets(&self) -> &[Vec<PointIndex>] {
        self.gen_sets.get_or_init(|| {
            self.enumerate_generators()
                .iter()
                .map(|g| self.geom.points_in(g))
                .collect()
        })
    }

    /// q^{x2/2} as an exact rational.
    pub fn qpow2(&self, x2: i64) -> num_rational::BigRational {
        half_power(self.field().p(), self.field().k(), x2)
    }

    /// The quadratic form Q (elliptic spaces only; 0 is returned nowhere else).
    fn quad_value(&self, u: &[u32]) -> u32 {
        let f = self.field();
        let r = self.r as usize;
        let (a, b) = self.elliptic_tail.expect("elliptic only");
        let mut acc = 0u32;
        for i in 0..r {
            acc = f.add(acc, f.mul(u[2 * i], u[2 * i + 1]));
        }
        let (x, y) = (u[2 * r], u[2 * r + 1]);
        acc = f.add(acc, f.mul(x, x));
        acc = f.add(acc, f.mul(a, f.mul(x, y)));
        f.add(acc, f.mul(b, f.mul(y, y)))
    }

    fn hermitian_value(&self, u: &[u32], v: &[u32]) -> u32 {
        let f = self.field();
        let mut acc = 0u32;
        for (&ui, &vi) in u.iter().zip(v) {
            acc = f.add(acc, f.mul(ui, f.conj_unchecked(vi)));
        }
        acc
    }

    /// The reflexive form used by the polarity: the symplectic form, the
    /// bilinear form associated to Q, or the Hermitian form.
    pub fn form_bilinear(&self, u: &[u32], v: &[u32]) -> u32 {
        if self.kind == SpaceKind::Hermitian {
            return self.hermitian_value(u, v);
        }
        let f = self.field();
        let mut acc = 0u32;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            let mut row = 0u32;
            for (j, &vj) in v.iter().enumerate() {
                if vj != 0 {
                    row = f.add(row, f.mul(self.gram[i][j], vj));
                }
            }
            acc = f.add(acc, f.mul(ui, row));
        }
        acc
    }

    /// Spec-facing form evaluation: one argument evaluates Q (elliptic
    /// only), two arguments evaluate the reflexive form of the space.
    pub fn form_value(&self, u: &[u32], v: Option<&[u32]>) -> Result<u32, PolarError> {
        match v {
            Some(v) => Ok(self.form_bilinear(u, v)),
            None if self.kind == SpaceKind::Elliptic => Ok(self.quad_value(u)),
            None => Err(PolarError::WrongArity),
        }
    }

    pub fn points_perp(&self, a: PointIndex, b: PointIndex) -> bool {
        self.form_bilinear(self.geom.point_coords(a), self.geom.point_coords(b)) == 0
    }

    /// Tangent space: dim perp(s) = n - dim(s) - 1; an involution.
    pub fn perp(&self, s: &Subspace) -> Subspace {
        let f = self.field();
        let mut constraints = Vec::with_capacity(s.rows().len());
        for u in s.rows() {
            let row: Vec<u32> = if self.kind == SpaceKind::Hermitian {
                u.iter().map(|&c| f.conj_unchecked(c)).collect()
            } else {
                (0..=self.n)
                    .map(|j| {
                        let mut acc = 0u32;
                        for (i, &ui) in u.iter().enumerate() {
                            acc = f.add(acc, f.mul(ui, self.gram[i][j]));
                        }
                        acc
                    })
                    .collect()
            };
            constraints.push(row);
        }
        nullspace(f, self.n, constraints)
    }

    pub fn perp_of_point(&self, p: PointIndex) -> Subspace {
        self.perp(&self.geom.point_subspace(p))
    }

    /// True iff s lies entirely in the polar space and is self-orthogonal.
    pub fn is_totally_isotropic(&self, s: &Subspace) -> bool {
        for (i, u) in s.rows().iter().enumerate() {
            for v in &s.rows()[i..] {
                if self.form_bilinear(u, v) != 0 {
                    return false;
                }
            }
        }
        // closure over the full point set (catches the quadratic condition
        // in characteristic 2, where the bilinear form alone is blind)
        self.geom.points_in(s).iter().all(|&p| self.is_polar[p])
    }

    /// All generators, each exactly once, in deterministic order.
    ///
    /// Depth-first extension of totally isotropic chains: a chain
    /// c_1 < c_2 < ... is kept only when each c_{t+1} is the minimal new
    /// point of its own span, which makes the chain the canonical spanning
    /// chain of the generator it reaches.
    pub fn enumerate_generators(&self) -> Vec<Subspace> {
        self.enumerate_generators_with(&Config::default())
            .expect("default caps exceeded")
    }

    pub fn enumerate_generators_with(&self, cfg: &Config) -> Result<Vec<Subspace>, PolarError> {
        let count = generator_count(self.kind, self.r, self.field().q())?;
        if count > BigInt::from(cfg.max_generators) {
            return Err(PolarError::GeneratorCap(count, cfg.max_generators));
        }
        let f = self.field();
        let mut out = Vec::new();
        let width = self.n + 1;
        // span_vecs holds every vector of the current row space, zero first
        let mut span_vecs: Vec<Vec<u32>> = vec![vec![0u32; width]];
        let mut span_points: HashSet<PointIndex> = HashSet::new();
        let mut basis: Vec<PointIndex> = Vec::new();
        self.dfs_generators(
            f,
            &self.points.to_vec(),
            &mut basis,
            &mut span_vecs,
            &mut span_points,
            &mut out,
        );
        Ok(out)
    }

    fn dfs_generators(
        &self,
        f: &Field,
        candidates: &[PointIndex],
        basis: &mut Vec<PointIndex>,
        span_vecs: &mut Vec<Vec<u32>>,
        span_points: &mut HashSet<PointIndex>,
        out: &mut Vec<Subspace>,
    ) {
        if basis.len() == self.r as usize {
            let rows = basis.iter().map(|&p| self.geom.point_coords(p).to_vec()).collect();
            out.push(Subspace::from_rows(f, self.n, rows));
            return;
        }
        for (ci, &p) in candidates.iter().enumerate() {
            if span_points.contains(&p) {
                continue;
            }
            let pc = self.geom.point_coords(p);
            // canonical-minimum: p must be the smallest point its addition
            // brings into the span
            let mut new_points: Vec<PointIndex> = Vec::with_capacity(span_vecs.len());
            let mut canonical = true;
            for v in span_vecs.iter() {
                let w: Vec<u32> = v.iter().zip(pc).map(|(&a, &b)| f.add(a, b)).collect();
                let idx = self.geom.index_of(&w).unwrap();
                if idx < p {
                    canonical = false;
                    break;
                }
                new_points.push(idx);
            }
            if !canonical {
                continue;
            }
            // remaining candidates: after p in order, orthogonal to p
            let next: Vec<PointIndex> = candidates[ci + 1..]
                .iter()
                .copied()
                .filter(|&s| self.points_perp(p, s))
                .collect();

            let added_vecs: Vec<Vec<u32>> = (1..f.q() as u32)
                .flat_map(|c| {
                    let scaled: Vec<u32> = pc.iter().map(|&x| f.mul(c, x)).collect();
                    span_vecs
                        .iter()
                        .map(|v| {
                            v.iter().zip(&scaled).map(|(&a, &b)| f.add(a, b)).collect::<Vec<u32>>()
                        })
                        .collect::<Vec<_>>()
                })
                .collect();

            basis.push(p);
            for np in &new_points {
                span_points.insert(*np);
            }
            let old_len = span_vecs.len();
            span_vecs.extend(added_vecs);

            self.dfs_generators(f, &next, basis, span_vecs, span_points, out);

            span_vecs.truncate(old_len);
            for np in &new_points {
                span_points.remove(np);
            }
            basis.pop();
        }
    }
}

fn identity_gram(n: usize) -> Vec<Vec<u32>> {
    let mut g = vec![vec![0u32; n + 1]; n + 1];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 1;
    }
    g
}

/// f(x,y) = sum_i (x_{2i} y_{2i+1} - x_{2i+1} y_{2i}).
fn symplectic_gram(f: &Field, n: usize) -> Vec<Vec<u32>> {
    let mut g = vec![vec![0u32; n + 1]; n + 1];
    for i in 0..(n + 1) / 2 {
        g[2 * i][2 * i + 1] = 1;
        g[2 * i + 1][2 * i] = f.neg(1);
    }
    g
}

/// Gram matrix of the bilinear form associated to the elliptic Q.
fn elliptic_gram(f: &Field, n: usize, a: u32, b: u32) -> Vec<Vec<u32>> {
    let mut g = vec![vec![0u32; n + 1]; n + 1];
    let r_pairs = (n + 1) / 2 - 1;
    for i in 0..r_pairs {
        g[2 * i][2 * i + 1] = 1;
        g[2 * i + 1][2 * i] = 1;
    }
    let (x, y) = (n - 1, n);
    g[x][x] = f.add(1, 1);
    g[x][y] = a;
    g[y][x] = a;
    g[y][y] = f.add(b, b);
    g
}

/// Smallest (a, b) in lexicographic scan with z^2 + a z + b irreducible.
fn irreducible_tail(f: &Field) -> (u32, u32) {
    let q = f.q() as u32;
    for a in 0..q {
        for b in 0..q {
            let has_root = (0..q).any(|z| {
                let val = f.add(f.add(f.mul(z, z), f.mul(a, z)), b);
                val == 0
            });
            if !has_root {
                return (a, b);
            }
        }
    }
    unreachable!("an irreducible binary quadratic exists over every finite field")
}

/// theta_{r-1} * (q^{r+e-1} + 1), the polar point count, by exact arithmetic.
pub fn polar_point_count(kind: SpaceKind, r: u32, q: u64) -> Result<BigInt, PolarError> {
    let (p, k) = factor_prime_power(q).ok_or(PolarError::NotPrimePower(q))?;
    if kind == SpaceKind::Hermitian && k % 2 != 0 {
        return Err(PolarError::NotSquareOrder(q));
    }
    // exponent r+e-1, carried as twice its value
    let x2 = 2 * r as i64 + kind.e2() - 2;
    let qpow = half_power(p, k, x2);
    debug_assert!(qpow.is_integer());
    Ok(theta(r as i64 - 1, q) * (qpow.to_integer() + 1))
}

/// prod_{i=1..r} (q^{i+e-1} + 1): the standard generator count, used as a
/// cross-check oracle against enumeration.
pub fn generator_count(kind: SpaceKind, r: u32, q: u64) -> Result<BigInt, PolarError> {
    let (p, k) = factor_prime_power(q).ok_or(PolarError::NotPrimePower(q))?;
    if kind == SpaceKind::Hermitian && k % 2 != 0 {
        return Err(PolarError::NotSquareOrder(q));
    }
    let mut acc = BigInt::one();
    for i in 1..=r as i64 {
        let qpow = half_power(p, k, 2 * i + kind.e2() - 2);
        debug_assert!(qpow.is_integer());
        acc *= qpow.to_integer() + 1;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn space(kind: SpaceKind, r: u32, p: u64, k: u32) -> PolarSpace {
        let f = Arc::new(Field::new(p, k).unwrap());
        PolarSpace::build(kind, r, f).unwrap()
    }

    #[test]
    fn point_counts() {
        assert_eq!(space(SpaceKind::Symplectic, 2, 2, 1).points().len(), 15);
        assert_eq!(space(SpaceKind::Elliptic, 2, 3, 1).points().len(), 112);
        assert_eq!(space(SpaceKind::Hermitian, 2, 2, 2).points().len(), 165);
        assert_eq!(
            polar_point_count(SpaceKind::Hermitian, 3, 9).unwrap(),
            BigInt::from(91 * 2188)
        );
    }

    #[test]
    fn hermitian_needs_square_order() {
        let f = Arc::new(Field::new(3, 1).unwrap());
        assert!(matches!(
            PolarSpace::build(SpaceKind::Hermitian, 2, f),
            Err(PolarError::NotSquareOrder(3))
        ));
    }

    #[test]
    fn symplectic_form_is_alternating() {
        let ps = space(SpaceKind::Symplectic, 2, 3, 1);
        for i in 0..ps.geometry().num_points() {
            let v = ps.geometry().point_coords(i);
            assert_eq!(ps.form_bilinear(v, v), 0);
        }
    }

    #[test]
    fn elliptic_polarization_identity_char2() {
        let ps = space(SpaceKind::Elliptic, 2, 2, 1);
        let g = ps.geometry();
        for i in 0..g.num_points() {
            for j in 0..g.num_points() {
                let u = g.point_coords(i);
                let v = g.point_coords(j);
                let sum: Vec<u32> =
                    u.iter().zip(v).map(|(&a, &b)| ps.field().add(a, b)).collect();
                let qsum = if sum.iter().all(|&c| c == 0) { 0 } else { ps.quad_value(&sum) };
                let rhs = ps
                    .field()
                    .add(qsum, ps.field().add(ps.quad_value(u), ps.quad_value(v)));
                assert_eq!(ps.form_bilinear(u, v), rhs);
            }
        }
    }

    #[test]
    fn hermitian_sesquilinear_symmetry() {
        let ps = space(SpaceKind::Hermitian, 2, 2, 2);
        let g = ps.geometry();
        for (i, j) in [(0, 1), (3, 77), (100, 200), (11, 11)] {
            let h1 = ps.form_bilinear(g.point_coords(i), g.point_coords(j));
            let h2 = ps.form_bilinear(g.point_coords(j), g.point_coords(i));
            assert_eq!(ps.field().conjugate(h2).unwrap(), h1);
        }
    }

    #[test]
    fn quad_arity_errors() {
        let w = space(SpaceKind::Symplectic, 2, 2, 1);
        let v = w.geometry().point_coords(0).to_vec();
        assert!(matches!(w.form_value(&v, None), Err(PolarError::WrongArity)));
    }

    #[test]
    fn perp_properties() {
        let ps = space(SpaceKind::Symplectic, 2, 2, 1);
        let g = ps.geometry();
        // perp of a point is a plane containing it
        for p in 0..g.num_points() {
            let pp = ps.perp_of_point(p);
            assert_eq!(pp.dim(), 2);
            assert!(pp.contains(ps.field(), g.point_coords(p)));
            // involution
            assert_eq!(ps.perp(&pp), g.point_subspace(p));
        }
        // reflexivity
        for a in 0..g.num_points() {
            for b in 0..g.num_points() {
                assert_eq!(ps.points_perp(a, b), ps.points_perp(b, a));
            }
        }
        // perp of the whole space is empty
        let all: Vec<Subspace> = [0, 1, 3, 7].iter().map(|&i| g.point_subspace(i)).collect();
        let refs: Vec<&Subspace> = all.iter().collect();
        let full = g.span(&refs).unwrap();
        assert_eq!(full.dim(), 3);
        assert_eq!(ps.perp(&full).dim(), -1);
    }

    #[test]
    fn generator_counts_small() {
        assert_eq!(space(SpaceKind::Symplectic, 2, 2, 1).enumerate_generators().len(), 15);
        assert_eq!(space(SpaceKind::Elliptic, 2, 3, 1).enumerate_generators().len(), 280);
        assert_eq!(
            generator_count(SpaceKind::Elliptic, 2, 3).unwrap(),
            BigInt::from(280)
        );
    }

    #[test]
    fn generators_are_maximal_totally_isotropic() {
        let ps = space(SpaceKind::Elliptic, 2, 2, 1);
        let gens = ps.enumerate_generators();
        assert_eq!(gens.len(), 45);
        for gsub in &gens {
            assert_eq!(gsub.dim(), ps.rank() as i64 - 1);
            assert!(ps.is_totally_isotropic(gsub));
            let inside: HashSet<_> = ps.geometry().points_in(gsub).into_iter().collect();
            // no isotropic point outside extends the generator
            for &p in ps.points() {
                if inside.contains(&p) {
                    continue;
                }
                let extends = inside
                    .iter()
                    .all(|&s| ps.points_perp(p, s));
                assert!(!extends, "generator is not maximal");
            }
        }
    }

    #[test]
    fn elliptic_generator_perp_is_3space() {
        let ps = space(SpaceKind::Elliptic, 2, 3, 1);
        for gsub in ps.enumerate_generators() {
            let pp = ps.perp(&gsub);
            assert_eq!(pp.dim(), 3);
            assert!(pp.contains_subspace(ps.field(), &gsub));
        }
    }

    #[test]
    fn full_set_perp_profile_baseline() {
        // the whole point set is a theta_{r-1}-ovoid; its perp profile at
        // every ambient point matches the two-branch count
        let ps = space(SpaceKind::Elliptic, 2, 2, 1);
        let g = ps.geometry();
        let q = 2i64;
        let m = (q + 1) as usize; // theta_1
        let onperp_in = (m - 1) * ((q.pow(2) + 1) as usize) + 1;
        let onperp_out = m * ((q.pow(2) + 1) as usize);
        for p in 0..g.num_points() {
            let pp = ps.perp_of_point(p);
            let cnt = g
                .points_in(&pp)
                .iter()
                .filter(|&&s| ps.is_polar_point(s))
                .count();
            if ps.is_polar_point(p) {
                assert_eq!(cnt, onperp_in);
            } else {
                assert_eq!(cnt, onperp_out);
            }
        }
    }
}
