use std::sync::Arc;

use super::direction::{default_grid, dot, round_key, Direction, DirectionGrid, GridId};
use super::hull::convex_hull_2d;
use crate::{Error, Result};

/// Slack allowed in the sublinearity check of embedded support vectors.
pub const SUBLINEAR_TOL: f64 = 1e-9;

/// Closed interval `[lo, hi]` of the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidBody("interval endpoints must be finite".into()));
        }
        if lo > hi {
            return Err(Error::InvalidBody(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidBody("box must have dimension >= 1".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("box corners must be finite".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidBody("box has lo > hi in some coordinate".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }
}

/// Convex hull of a finite vertex list. The list need not be minimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<f64>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidBody("polytope needs at least one vertex".into()))?;
        if dim == 0 {
            return Err(Error::InvalidBody("polytope must have dimension >= 1".into()));
        }
        let mut flat = Vec::with_capacity(dim * vertices.len());
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            flat.extend_from_slice(v);
        }
        Self::from_flat(dim, flat)
    }

    fn from_flat(dim: usize, vertices: Vec<f64>) -> Result<Self> {
        if vertices.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("polytope vertices must be finite".into()));
        }
        Ok(Self { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.vertices.chunks_exact(self.dim)
    }
}

/// Solid axis-aligned ellipsoid `{x : sum_i ((x_i - c_i) / a_i)^2 <= 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: Vec<f64>,
    semi_axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidBody("ellipsoid must have dimension >= 1".into()));
        }
        if center.len() != semi_axes.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                found: semi_axes.len(),
            });
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidBody("ellipsoid center must be finite".into()));
        }
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidBody("ellipsoid semi-axes must be positive".into()));
        }
        Ok(Self { center, semi_axes })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }
}

/// Support-function values of some convex body, one per grid direction.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector {
    grid_id: GridId,
    values: Vec<f64>,
}

impl SupportVector {
    pub fn new(grid: &DirectionGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("support vector"));
        }
        Ok(Self {
            grid_id: grid.id(),
            values,
        })
    }

    pub fn grid_id(&self) -> GridId {
        self.grid_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max_i |self_i - other_i|`, the sup-norm distance in `C(S*)` restricted
    /// to the grid.
    pub fn sup_distance(&self, other: &SupportVector) -> Result<f64> {
        if self.grid_id != other.grid_id {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// A body known only through its support function on a direction grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedded {
    grid: Arc<DirectionGrid>,
    values: SupportVector,
}

impl Embedded {
    /// Validates `values` against the grid, including the sublinearity checks
    /// that are decidable on the grid.
    pub fn new(grid: Arc<DirectionGrid>, values: SupportVector) -> Result<Self> {
        if values.grid_id() != grid.id() {
            return Err(Error::GridMismatch);
        }
        check_sublinear(&grid, values.values())?;
        Ok(Self { grid, values })
    }

    /// For values that are exact support evaluations (or sums and nonnegative
    /// combinations of them), which are consistent by construction.
    pub(crate) fn from_exact(grid: Arc<DirectionGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        let values = SupportVector {
            grid_id: grid.id(),
            values,
        };
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<DirectionGrid> {
        &self.grid
    }

    pub fn support_vector(&self) -> &SupportVector {
        &self.values
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }
}

// For grid directions u, v with w = (u + v) / |u + v| also on the grid,
// s(w) <= (s(u) + s(v)) / |u + v|. Antipodal pairs give s(u) + s(-u) >= 0.
fn check_sublinear(grid: &DirectionGrid, values: &[f64]) -> Result<()> {
    let index = grid.rounded_index();
    let m = grid.len();
    let mut w = vec![0.0; grid.dim()];
    for i in 0..m {
        for j in (i + 1)..m {
            let (u, v) = (grid.direction(i), grid.direction(j));
            w.iter_mut().zip(u.iter().zip(v)).for_each(|(w, (a, b))| *w = a + b);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let rhs = values[i] + values[j];
            if norm < 1e-12 {
                if rhs < -SUBLINEAR_TOL {
                    return Err(Error::InvalidBody(format!(
                        "support values at antipodal directions {i}, {j} sum to {rhs} < 0"
                    )));
                }
                continue;
            }
            w.iter_mut().for_each(|x| *x /= norm);
            if let Some(&k) = index.get(&round_key(&w)) {
                if values[k] > rhs / norm + SUBLINEAR_TOL {
                    return Err(Error::InvalidBody(format!(
                        "support values violate sublinearity at directions {i}, {j} -> {k}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A nonempty compact convex subset of `R^d`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Interval(Interval),
    Box(AxisBox),
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
    Embedded(Embedded),
}

impl ConvexBody {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Interval::new(lo, hi).map(Self::Interval)
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        AxisBox::new(lo, hi).map(Self::Box)
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Polytope::new(vertices).map(Self::Polytope)
    }

    pub fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        Ellipsoid::new(center, semi_axes).map(Self::Ellipsoid)
    }

    pub fn embedded(grid: Arc<DirectionGrid>, values: Vec<f64>) -> Result<Self> {
        let values = SupportVector::new(&grid, values)?;
        Embedded::new(grid, values).map(Self::Embedded)
    }

    /// The singleton `{point}`.
    pub fn point(point: Vec<f64>) -> Result<Self> {
        Self::polytope(vec![point])
    }

    /// The singleton `{0}` in `R^dim`.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Interval(_) => 1,
            ConvexBody::Box(b) => b.lo.len(),
            ConvexBody::Polytope(p) => p.dim,
            ConvexBody::Ellipsoid(e) => e.center.len(),
            ConvexBody::Embedded(e) => e.grid.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexBody::Interval(_) => "interval",
            ConvexBody::Box(_) => "box",
            ConvexBody::Polytope(_) => "polytope",
            ConvexBody::Ellipsoid(_) => "ellipsoid",
            ConvexBody::Embedded(_) => "embedded",
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            })
        }
    }

    /// `s(u, A) = sup_{a in A} <u, a>`.
    ///
    /// Exact for every representation; an embedded body answers only for its
    /// own grid directions.
    pub fn support(&self, u: &Direction) -> Result<f64> {
        self.check_dim(u.dim())?;
        self.support_at(u.components())
    }

    /// Support function at a raw unit vector of the right dimension.
    pub(crate) fn support_at(&self, u: &[f64]) -> Result<f64> {
        Ok(match self {
            ConvexBody::Interval(iv) => (u[0] * iv.lo).max(u[0] * iv.hi),
            ConvexBody::Box(b) => u
                .iter()
                .zip(b.lo.iter().zip(&b.hi))
                .map(|(ui, (lo, hi))| (ui * lo).max(ui * hi))
                .sum(),
            ConvexBody::Polytope(p) => p.vertices().map(|v| dot(u, v)).fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::Ellipsoid(e) => {
                let spread = u
                    .iter()
                    .zip(&e.semi_axes)
                    .map(|(ui, a)| (ui * a) * (ui * a))
                    .sum::<f64>()
                    .sqrt();
                dot(u, &e.center) + spread
            }
            ConvexBody::Embedded(e) => {
                let i = e.grid.index_of(u).ok_or(Error::OffGrid)?;
                e.values()[i]
            }
        })
    }

    /// Support value at grid direction `i`; embedded bodies on the same grid
    /// answer by index without a direction search.
    pub(crate) fn support_on(&self, grid: &DirectionGrid, i: usize) -> Result<f64> {
        match self {
            ConvexBody::Embedded(e) if e.grid.id() == grid.id() => Ok(e.values()[i]),
            _ => self.support_at(grid.direction(i)),
        }
    }

    /// The embedding `A -> s(., A)` restricted to `grid`.
    pub fn embed(&self, grid: &DirectionGrid) -> Result<SupportVector> {
        self.check_dim(grid.dim())?;
        let values = (0..grid.len())
            .map(|i| self.support_on(grid, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(SupportVector {
            grid_id: grid.id(),
            values,
        })
    }

    /// `[lo, hi]` of a one-dimensional body, read off `s(-1, A)` and `s(+1, A)`.
    pub fn endpoints(&self) -> Result<(f64, f64)> {
        self.check_dim(1)?;
        Ok((-self.support_at(&[-1.0])?, self.support_at(&[1.0])?))
    }

    /// Minkowski sum `A + B`.
    ///
    /// Intervals, boxes and polytopes stay in their representation (polytope
    /// vertex sums are pruned to the hull in `d <= 2`). Any other combination
    /// is embedded by adding support values on `grid`, or on the grid of an
    /// embedded operand, or on [`default_grid`].
    pub fn minkowski_sum(&self, other: &ConvexBody, grid: Option<&Arc<DirectionGrid>>) -> Result<Self> {
        self.check_dim(other.dim())?;
        match (self, other) {
            (ConvexBody::Interval(a), ConvexBody::Interval(b)) => ConvexBody::interval(a.lo + b.lo, a.hi + b.hi),
            (ConvexBody::Box(a), ConvexBody::Box(b)) => ConvexBody::axis_box(
                a.lo.iter().zip(&b.lo).map(|(x, y)| x + y).collect(),
                a.hi.iter().zip(&b.hi).map(|(x, y)| x + y).collect(),
            ),
            (ConvexBody::Polytope(a), ConvexBody::Polytope(b)) => polytope_sum(a, b).map(ConvexBody::Polytope),
            _ => {
                let grid = match (grid, self, other) {
                    (Some(g), _, _) => Arc::clone(g),
                    (None, ConvexBody::Embedded(e), _) | (None, _, ConvexBody::Embedded(e)) => Arc::clone(&e.grid),
                    (None, _, _) => Arc::new(default_grid(self.dim())?),
                };
                if let (ConvexBody::Embedded(a), ConvexBody::Embedded(b)) = (self, other) {
                    if a.grid.id() != b.grid.id() {
                        return Err(Error::GridMismatch);
                    }
                }
                self.check_dim(grid.dim())?;
                let values = (0..grid.len())
                    .map(|i| Ok(self.support_on(&grid, i)? + other.support_on(&grid, i)?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ConvexBody::Embedded(Embedded::from_exact(grid, values)))
            }
        }
    }

    /// Scalar multiple `lambda A = {lambda a : a in A}`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonFinite("scalar multiplier"));
        }
        if lambda == 0.0 {
            return self.zero_like();
        }
        let mul = |v: &[f64]| v.iter().map(|x| lambda * x).collect::<Vec<_>>();
        Ok(match self {
            ConvexBody::Interval(iv) => {
                let (a, b) = (lambda * iv.lo, lambda * iv.hi);
                ConvexBody::Interval(Interval::new(a.min(b), a.max(b))?)
            }
            ConvexBody::Box(b) => {
                let (lo, hi) = (mul(&b.lo), mul(&b.hi));
                if lambda > 0.0 {
                    ConvexBody::axis_box(lo, hi)?
                } else {
                    ConvexBody::axis_box(hi, lo)?
                }
            }
            ConvexBody::Polytope(p) => ConvexBody::Polytope(Polytope::from_flat(p.dim, mul(&p.vertices))?),
            ConvexBody::Ellipsoid(e) => {
                ConvexBody::ellipsoid(mul(&e.center), e.semi_axes.iter().map(|a| lambda.abs() * a).collect())?
            }
            ConvexBody::Embedded(e) => {
                let values = if lambda > 0.0 {
                    mul(e.values())
                } else {
                    if !e.grid.is_antipodal_closed() {
                        return Err(Error::NotAntipodalClosed);
                    }
                    (0..e.grid.len())
                        .map(|i| {
                            let j = e.grid.antipode_index(i).expect("antipodal-closed");
                            lambda.abs() * e.values()[j]
                        })
                        .collect()
                };
                ConvexBody::Embedded(Embedded::from_exact(Arc::clone(&e.grid), values))
            }
        })
    }

    // {0} in the representation of `self` where that representation allows it.
    fn zero_like(&self) -> Result<Self> {
        let d = self.dim();
        Ok(match self {
            ConvexBody::Interval(_) => ConvexBody::interval(0.0, 0.0)?,
            ConvexBody::Box(_) => ConvexBody::axis_box(vec![0.0; d], vec![0.0; d])?,
            ConvexBody::Polytope(_) | ConvexBody::Ellipsoid(_) => ConvexBody::origin(d)?,
            ConvexBody::Embedded(e) => {
                ConvexBody::Embedded(Embedded::from_exact(Arc::clone(&e.grid), vec![0.0; e.grid.len()]))
            }
        })
    }

    /// `d_H(A, B) = sup_u |s(u, A) - s(u, B)|` with the sup taken over `grid`.
    ///
    /// In dimension 1 the grid is ignored and the result is exact. Otherwise
    /// it is a lower bound on the true distance that increases as the grid is
    /// refined.
    pub fn hausdorff_distance(&self, other: &ConvexBody, grid: &DirectionGrid) -> Result<f64> {
        self.check_dim(other.dim())?;
        if self.dim() == 1 {
            let plus = (self.support_at(&[1.0])? - other.support_at(&[1.0])?).abs();
            let minus = (self.support_at(&[-1.0])? - other.support_at(&[-1.0])?).abs();
            return Ok(plus.max(minus));
        }
        self.check_dim(grid.dim())?;
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut best = 0.0f64;
        for i in 0..grid.len() {
            let gap = (self.support_on(grid, i)? - other.support_on(grid, i)?).abs();
            best = best.max(gap);
        }
        Ok(best)
    }

    /// `||A||_K = d_H({0}, A) = sup_u |s(u, A)|`, over `grid` when `d >= 2`.
    pub fn norm_k(&self, grid: &DirectionGrid) -> Result<f64> {
        if self.dim() == 1 {
            let (lo, hi) = self.endpoints()?;
            return Ok(lo.abs().max(hi.abs()));
        }
        self.check_dim(grid.dim())?;
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        (0..grid.len()).try_fold(0.0f64, |acc, i| Ok(acc.max(self.support_on(grid, i)?.abs())))
    }
}

fn polytope_sum(a: &Polytope, b: &Polytope) -> Result<Polytope> {
    let d = a.dim;
    let mut sums = Vec::with_capacity(a.vertices.len() * b.vertex_count());
    for u in a.vertices() {
        for v in b.vertices() {
            sums.extend(u.iter().zip(v).map(|(x, y)| x + y));
        }
    }
    let pruned = match d {
        1 => {
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        }
        2 => {
            let points: Vec<[f64; 2]> = sums.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
            convex_hull_2d(&points).into_iter().flatten().collect()
        }
        _ => sums,
    };
    Polytope::from_flat(d, pruned)
}

#[cfg(test)]
mod tests {
    use super::super::direction::{make_direction_grid, GridScheme};
    use super::*;

    fn iv(lo: f64, hi: f64) -> ConvexBody {
        ConvexBody::interval(lo, hi).unwrap()
    }

    fn unit_square() -> ConvexBody {
        ConvexBody::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn interval_support_reads_endpoints() {
        let a = iv(2.0, 5.0);
        assert_eq!(a.support(&Direction::plus()).unwrap(), 5.0);
        assert_eq!(a.support(&Direction::minus()).unwrap(), -2.0);
        assert_eq!(a.endpoints().unwrap(), (2.0, 5.0));
    }

    #[test]
    fn origin_support_is_zero() {
        let o = ConvexBody::origin(2).unwrap();
        for u in make_direction_grid(2, 16, GridScheme::UniformAngles2d)
            .unwrap()
            .directions()
        {
            assert_eq!(o.support(&u).unwrap(), 0.0);
        }
    }

    #[test]
    fn ellipsoid_support_closed_form() {
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 3.0]).unwrap();
        let u = Direction::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(e.support(&u).unwrap(), 2.0);
        let v = Direction::new(vec![0.0, -1.0]).unwrap();
        assert_eq!(e.support(&v).unwrap(), 3.0);
    }

    #[test]
    fn ellipsoid_support_matches_boundary_sampling() {
        // brute force over 10^6 boundary points (2 cos t, 3 sin t)
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 3.0]).unwrap();
        let u = Direction::new(vec![1.0, 0.0]).unwrap();
        let n = 1_000_000;
        let brute = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                2.0 * t.cos()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((e.support(&u).unwrap() - brute).abs() < 1e-3);
    }

    #[test]
    fn support_rejects_dimension_mismatch() {
        let u = Direction::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(iv(0.0, 1.0).support(&u), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn embedded_off_grid_query_is_an_error() {
        let grid = Arc::new(make_direction_grid(2, 8, GridScheme::UniformAngles2d).unwrap());
        let e = ConvexBody::embedded(Arc::clone(&grid), vec![1.0; 8]).unwrap();
        let on = Direction::new(grid.direction(3).to_vec()).unwrap();
        assert_eq!(e.support(&on).unwrap(), 1.0);
        let off = Direction::normalized(vec![1.0, 0.1]).unwrap();
        assert_eq!(e.support(&off), Err(Error::OffGrid));
    }

    #[test]
    fn embedded_rejects_inconsistent_values() {
        let grid = Arc::new(make_direction_grid(2, 8, GridScheme::UniformAngles2d).unwrap());
        // s(u_1) far above what s(u_0) and s(u_2) allow
        let mut values = vec![1.0; 8];
        values[1] = 5.0;
        assert!(ConvexBody::embedded(Arc::clone(&grid), values).is_err());
        // an "interval" with lo > hi
        let g1 = Arc::new(DirectionGrid::exact_1d());
        assert!(ConvexBody::embedded(Arc::clone(&g1), vec![1.0, -2.0]).is_err());
        assert!(ConvexBody::embedded(g1, vec![2.0, -1.0]).is_ok());
        // the unit disk is consistent
        assert!(ConvexBody::embedded(grid, vec![1.0; 8]).is_ok());
    }

    #[test]
    fn interval_sum_adds_endpoints() {
        assert_eq!(iv(1.0, 2.0).minkowski_sum(&iv(3.0, 4.0), None).unwrap(), iv(4.0, 6.0));
    }

    #[test]
    fn sum_with_origin_is_identity() {
        let a = iv(-1.5, 2.0);
        assert_eq!(a.minkowski_sum(&iv(0.0, 0.0), None).unwrap(), a);
        let sq = unit_square();
        let sum = sq.minkowski_sum(&ConvexBody::origin(2).unwrap(), None).unwrap();
        let grid = make_direction_grid(2, 64, GridScheme::UniformAngles2d).unwrap();
        assert_eq!(sq.embed(&grid).unwrap(), sum.embed(&grid).unwrap());
    }

    #[test]
    fn square_plus_square_is_doubled_square() {
        // brute-force oracle: all pairwise vertex sums, then the extreme points
        let sq = unit_square();
        let ConvexBody::Polytope(sum) = sq.minkowski_sum(&sq, None).unwrap() else {
            panic!("polytope + polytope must stay a polytope");
        };
        let mut got: Vec<Vec<f64>> = sum.vertices().map(<[f64]>::to_vec).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            got,
            vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![2.0, 0.0], vec![2.0, 2.0]]
        );
    }

    #[test]
    fn mixed_sum_embeds_on_grid() {
        let grid = Arc::new(make_direction_grid(2, 32, GridScheme::UniformAngles2d).unwrap());
        let disk = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let sum = unit_square().minkowski_sum(&disk, Some(&grid)).unwrap();
        assert_eq!(sum.kind(), "embedded");
        for i in 0..grid.len() {
            let expected = unit_square().support_on(&grid, i).unwrap() + 1.0;
            assert!((sum.support_on(&grid, i).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn sums_of_embedded_bodies_need_a_common_grid() {
        let g1 = Arc::new(make_direction_grid(2, 8, GridScheme::UniformAngles2d).unwrap());
        let g2 = Arc::new(make_direction_grid(2, 16, GridScheme::UniformAngles2d).unwrap());
        let a = ConvexBody::embedded(g1, vec![1.0; 8]).unwrap();
        let b = ConvexBody::embedded(g2, vec![1.0; 16]).unwrap();
        assert_eq!(a.minkowski_sum(&b, None), Err(Error::GridMismatch));
    }

    #[test]
    fn scalar_multiples() {
        assert_eq!(iv(1.0, 3.0).scale(2.0).unwrap(), iv(2.0, 6.0));
        assert_eq!(iv(1.0, 3.0).scale(-1.0).unwrap(), iv(-3.0, -1.0));
        assert_eq!(iv(1.0, 3.0).scale(0.0).unwrap(), iv(0.0, 0.0));
        let e = ConvexBody::ellipsoid(vec![1.0, 1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(e.scale(0.0).unwrap(), ConvexBody::origin(2).unwrap());
        let b = ConvexBody::axis_box(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            b.scale(-2.0).unwrap(),
            ConvexBody::axis_box(vec![-2.0, -4.0], vec![0.0, -2.0]).unwrap()
        );
    }

    #[test]
    fn negative_scale_of_embedded_uses_antipodes() {
        let grid = Arc::new(make_direction_grid(2, 8, GridScheme::UniformAngles2d).unwrap());
        let sq = unit_square();
        let emb = ConvexBody::Embedded(Embedded::from_exact(
            Arc::clone(&grid),
            sq.embed(&grid).unwrap().into_values(),
        ));
        let via_embedded = emb.scale(-1.5).unwrap().embed(&grid).unwrap();
        let via_vertices = sq.scale(-1.5).unwrap().embed(&grid).unwrap();
        for (a, b) in via_embedded.values().iter().zip(via_vertices.values()) {
            assert!((a - b).abs() < 1e-12);
        }

        let u = Direction::new(vec![1.0, 0.0]).unwrap();
        let v = Direction::new(vec![0.0, 1.0]).unwrap();
        let open = Arc::new(DirectionGrid::from_directions(2, &[u, v], "open").unwrap());
        let e = ConvexBody::embedded(open, vec![1.0, 1.0]).unwrap();
        assert!(e.scale(2.0).is_ok());
        assert_eq!(e.scale(-1.0), Err(Error::NotAntipodalClosed));
    }

    #[test]
    fn hausdorff_examples_in_one_dimension() {
        let g = DirectionGrid::exact_1d();
        assert_eq!(iv(0.0, 1.0).hausdorff_distance(&iv(0.0, 3.0), &g).unwrap(), 2.0);
        assert_eq!(iv(0.0, 1.0).hausdorff_distance(&iv(0.0, 1.0), &g).unwrap(), 0.0);
        assert_eq!(iv(0.0, 0.0).hausdorff_distance(&iv(-2.0, 5.0), &g).unwrap(), 5.0);
        // the grid argument is ignored in one dimension
        let g2 = make_direction_grid(2, 8, GridScheme::UniformAngles2d).unwrap();
        assert_eq!(iv(0.0, 1.0).hausdorff_distance(&iv(0.0, 3.0), &g2).unwrap(), 2.0);
    }

    #[test]
    fn norm_examples() {
        let g = make_direction_grid(2, 4096, GridScheme::UniformAngles2d).unwrap();
        assert_eq!(iv(-2.0, 5.0).norm_k(&DirectionGrid::exact_1d()).unwrap(), 5.0);
        assert_eq!(ConvexBody::origin(2).unwrap().norm_k(&g).unwrap(), 0.0);
        let e = ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 3.0]).unwrap();
        // max of sqrt(4 u1^2 + 9 u2^2) over the grid; (0, 1) is a grid direction
        let brute = g
            .iter()
            .map(|u| (4.0 * u[0] * u[0] + 9.0 * u[1] * u[1]).sqrt())
            .fold(0.0, f64::max);
        assert!((e.norm_k(&g).unwrap() - 3.0).abs() < 1e-12);
        assert!((brute - 3.0).abs() < 1e-12);
        let zero = ConvexBody::origin(2).unwrap();
        assert_eq!(e.norm_k(&g).unwrap(), e.hausdorff_distance(&zero, &g).unwrap());
    }

    #[test]
    fn embed_examples() {
        let g1 = DirectionGrid::exact_1d();
        assert_eq!(iv(2.0, 5.0).embed(&g1).unwrap().values(), &[5.0, -2.0]);
        let g = make_direction_grid(3, 50, GridScheme::Fibonacci3d).unwrap();
        let zero = ConvexBody::origin(3).unwrap().embed(&g).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
        let ball = ConvexBody::ellipsoid(vec![0.0; 3], vec![1.0; 3]).unwrap();
        for x in ball.embed(&g).unwrap().values() {
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hausdorff_rejects_mismatched_grid() {
        let g = make_direction_grid(3, 10, GridScheme::Fibonacci3d).unwrap();
        assert!(unit_square().hausdorff_distance(&unit_square(), &g).is_err());
    }

    #[test]
    fn invalid_bodies_are_rejected() {
        assert!(ConvexBody::interval(2.0, 1.0).is_err());
        assert!(ConvexBody::interval(f64::NAN, 1.0).is_err());
        assert!(ConvexBody::axis_box(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(ConvexBody::polytope(vec![]).is_err());
        assert!(ConvexBody::polytope(vec![vec![0.0], vec![0.0, 1.0]]).is_err());
        assert!(ConvexBody::ellipsoid(vec![0.0], vec![0.0]).is_err());
    }
}
