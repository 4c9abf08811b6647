//! Points, weights, decay functions and cost functions shared by every
//! summary in the crate, plus exact evaluation of a weighted clustering cost.
//!
//! The metric is Euclidean `R^d`. A [`CostFunction`] turns the distance to
//! the nearest center into a per-point cost (`d`, `d^2`, or a Huber
//! M-estimator), and [`weighted_cost`] sums those costs with point weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Squared distance without the dimension check. Callers guarantee equal
    /// dimensions.
    #[inline]
    pub(crate) fn sq_dist_unchecked(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    #[inline]
    pub(crate) fn dist_unchecked(&self, other: &Point) -> f64 {
        self.sq_dist_unchecked(other).sqrt()
    }
}

impl From<Vec<f64>> for Point {
    /// Infallible conversion for literals; coordinates are not validated.
    fn from(coords: Vec<f64>) -> Self {
        Point { coords }
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(p: &Point, q: &Point) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(p.dist_unchecked(q))
}

/// A point carrying a nonnegative weight and its 1-based arrival index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub point: Point,
    pub weight: f64,
    pub arrival: u64,
}

impl WeightedPoint {
    pub fn new(point: Point, weight: f64, arrival: u64) -> Self {
        debug_assert!(weight >= 0.0);
        WeightedPoint {
            point,
            weight,
            arrival,
        }
    }

    /// Weight 1 at the given arrival index.
    pub fn unit(point: Point, arrival: u64) -> Self {
        WeightedPoint::new(point, 1.0, arrival)
    }
}

/// How the weight of an item falls off with its age.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecayFunction {
    /// The `a`-th most recent item has weight `a^(-s)`.
    Polynomial { s: f64 },
    /// Weights halve every `half_life` arrivals.
    Exponential { half_life: f64 },
}

impl DecayFunction {
    pub fn polynomial(s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::param(format!("decay exponent s must be >= 0, got {s}")));
        }
        Ok(DecayFunction::Polynomial { s })
    }

    pub fn exponential(half_life: f64) -> Result<Self> {
        if !(half_life.is_finite() && half_life > 0.0) {
            return Err(Error::param(format!("half-life must be > 0, got {half_life}")));
        }
        Ok(DecayFunction::Exponential { half_life })
    }
}

/// Weight of the item that arrived at `t`, observed at time `now`.
///
/// For [`DecayFunction::Polynomial`] this is the linear weight
/// `(now - t + 1)^(-s)`. For [`DecayFunction::Exponential`] it is the base-2
/// log of the fixed arrival weight `2^(t/h)`, i.e. `t / h`; only differences
/// of these values are meaningful and `now` serves solely as a bound check.
pub fn decay_weight(decay: DecayFunction, t: u64, now: u64) -> Result<f64> {
    if t > now {
        return Err(Error::FutureArrival { t, now });
    }
    if t == 0 {
        return Err(Error::param("arrival indices start at 1"));
    }
    Ok(match decay {
        DecayFunction::Polynomial { s } => ((now - t + 1) as f64).powf(-s),
        DecayFunction::Exponential { half_life } => t as f64 / half_life,
    })
}

/// Per-point cost applied to the distance from a point to its nearest center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CostFunction {
    /// `d`
    KMedian,
    /// `d^2`
    KMeans,
    /// Huber loss: `d^2 / 2` up to `threshold`, linear beyond.
    Huber { threshold: f64 },
}

impl CostFunction {
    /// Maps a distance to a cost. Nondecreasing with `rho(0) = 0`.
    #[inline]
    pub fn rho(&self, d: f64) -> f64 {
        match *self {
            CostFunction::KMedian => d,
            CostFunction::KMeans => d * d,
            CostFunction::Huber { threshold } => {
                if d <= threshold {
                    0.5 * d * d
                } else {
                    threshold * (d - 0.5 * threshold)
                }
            }
        }
    }

    /// Cost of `p` against `q`.
    #[inline]
    pub fn cost(&self, p: &Point, q: &Point) -> f64 {
        match self {
            CostFunction::KMeans => p.sq_dist_unchecked(q),
            _ => self.rho(p.dist_unchecked(q)),
        }
    }

    /// Constant `lambda` with `rho(d(x,z)) <= lambda * (rho(d(x,y)) + rho(d(y,z)))`.
    ///
    /// Huber is convex with `rho(2x) <= 4 rho(x)`, which gives 2.
    pub fn ati_constant(&self) -> f64 {
        match self {
            CostFunction::KMedian => 1.0,
            CostFunction::KMeans | CostFunction::Huber { .. } => 2.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CostFunction::KMedian => "k-median",
            CostFunction::KMeans => "k-means",
            CostFunction::Huber { .. } => "huber",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let CostFunction::Huber { threshold } = *self {
            if !(threshold.is_finite() && threshold > 0.0) {
                return Err(Error::param(format!("huber threshold must be > 0, got {threshold}")));
            }
        }
        Ok(())
    }
}

/// Index of the nearest center and the cost to it. `centers` must be nonempty.
#[inline]
pub(crate) fn nearest(cost: CostFunction, p: &Point, centers: &[Point]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let v = cost.cost(p, c);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

fn check_dims<'a>(dim: usize, pts: impl IntoIterator<Item = &'a Point>) -> Result<()> {
    for p in pts {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
    }
    Ok(())
}

/// `sum_p w(p) * min_c cost(p, c)` over already-materialized weights.
pub fn weighted_cost(points: &[WeightedPoint], cost: CostFunction, centers: &[Point]) -> Result<f64> {
    let Some(first) = centers.first() else {
        return Err(Error::Empty("center set"));
    };
    let dim = first.dim();
    check_dims(dim, centers)?;
    check_dims(dim, points.iter().map(|wp| &wp.point))?;
    Ok(points
        .iter()
        .map(|wp| wp.weight * nearest(cost, &wp.point, centers).1)
        .sum())
}

/// A weighted point set with a cost function and a number of centers.
#[derive(Clone, Debug)]
pub struct QuerySpace {
    pub points: Vec<WeightedPoint>,
    pub cost: CostFunction,
    pub k: usize,
}

impl QuerySpace {
    pub fn new(points: Vec<WeightedPoint>, cost: CostFunction, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        cost.validate()?;
        Ok(QuerySpace { points, cost, k })
    }

    /// Exact weighted cost of serving the point set from `centers`.
    pub fn decayed_cost(&self, centers: &[Point]) -> Result<f64> {
        weighted_cost(&self.points, self.cost, centers)
    }

    pub fn total_weight(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&p(&[0.0, 0.0]), &p(&[3.0, 4.0])).unwrap(), 5.0);
        let q = p(&[1.5, -2.0, 7.0]);
        assert_eq!(distance(&q, &q).unwrap(), 0.0);
        assert_eq!(distance(&p(&[1.0]), &p(&[4.0])).unwrap(), 3.0);
    }

    #[test]
    fn distance_rejects_dimension_mismatch() {
        let err = distance(&p(&[1.0]), &p(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn point_rejects_nan() {
        assert!(matches!(Point::new(vec![0.0, f64::NAN]), Err(Error::NonFinite)));
        assert!(matches!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite)));
    }

    #[test]
    fn decay_weight_examples() {
        let poly1 = DecayFunction::polynomial(1.0).unwrap();
        assert_eq!(decay_weight(poly1, 10, 10).unwrap(), 1.0);
        let poly2 = DecayFunction::polynomial(2.0).unwrap();
        assert_eq!(decay_weight(poly2, 9, 10).unwrap(), 0.25);
        let exp = DecayFunction::exponential(4.0).unwrap();
        assert_eq!(decay_weight(exp, 8, 8).unwrap(), 2.0);
        assert!(matches!(
            decay_weight(poly1, 11, 10),
            Err(Error::FutureArrival { t: 11, now: 10 })
        ));
    }

    #[test]
    fn decayed_cost_examples() {
        let single = QuerySpace::new(vec![WeightedPoint::unit(p(&[2.0, 2.0]), 1)], CostFunction::KMedian, 1).unwrap();
        assert_eq!(single.decayed_cost(&[p(&[2.0, 2.0])]).unwrap(), 0.0);

        let pts = vec![WeightedPoint::unit(p(&[0.0]), 1), WeightedPoint::unit(p(&[2.0]), 2)];
        let med = QuerySpace::new(pts.clone(), CostFunction::KMedian, 1).unwrap();
        assert_eq!(med.decayed_cost(&[p(&[0.0])]).unwrap(), 2.0);
        let means = QuerySpace::new(pts, CostFunction::KMeans, 1).unwrap();
        assert_eq!(means.decayed_cost(&[p(&[0.0])]).unwrap(), 4.0);
        assert!(matches!(means.decayed_cost(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn huber_is_quadratic_then_linear() {
        let h = CostFunction::Huber { threshold: 2.0 };
        assert_eq!(h.rho(0.0), 0.0);
        assert_eq!(h.rho(1.0), 0.5);
        assert_eq!(h.rho(2.0), 2.0);
        assert_eq!(h.rho(5.0), 8.0);
        assert!(CostFunction::Huber { threshold: -1.0 }.validate().is_err());
    }

    fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, d)
    }

    fn triple() -> impl Strategy<Value = (Point, Point, Point)> {
        (1usize..4).prop_flat_map(|d| (coords(d), coords(d), coords(d)))
            .prop_map(|(a, b, c)| (Point::from(a), Point::from(b), Point::from(c)))
    }

    proptest! {
        #[test]
        fn triangle_inequality_holds((x, y, z) in triple()) {
            let xz = distance(&x, &z).unwrap();
            let xy = distance(&x, &y).unwrap();
            let yz = distance(&y, &z).unwrap();
            prop_assert!(xz <= xy + yz + 1e-9 * (1.0 + xy + yz));
            prop_assert_eq!(xy, distance(&y, &x).unwrap());
        }

        #[test]
        fn approximate_triangle_inequality_per_cost((x, y, z) in triple(), thr in 0.1f64..50.0) {
            for cost in [CostFunction::KMedian, CostFunction::KMeans, CostFunction::Huber { threshold: thr }] {
                let lam = cost.ati_constant();
                let lhs = cost.cost(&x, &z);
                let rhs = lam * (cost.cost(&x, &y) + cost.cost(&y, &z));
                prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs), "{} violated: {} > {}", cost.name(), lhs, rhs);
            }
        }

        #[test]
        fn adding_centers_never_increases_cost(
            pts in prop::collection::vec((coords(2), 0.0f64..5.0), 1..30),
            centers in prop::collection::vec(coords(2), 1..5),
            extra in coords(2),
        ) {
            let wps: Vec<_> = pts.into_iter().enumerate()
                .map(|(i, (c, w))| WeightedPoint::new(Point::from(c), w, i as u64 + 1)).collect();
            let centers: Vec<Point> = centers.into_iter().map(Point::from).collect();
            let mut more = centers.clone();
            more.push(Point::from(extra));
            for cost in [CostFunction::KMedian, CostFunction::KMeans] {
                let a = weighted_cost(&wps, cost, &centers).unwrap();
                let b = weighted_cost(&wps, cost, &more).unwrap();
                prop_assert!(b <= a);
            }
        }

        #[test]
        fn cost_scales_linearly_with_weights(
            pts in prop::collection::vec((coords(2), 0.0f64..5.0), 1..30),
            centers in prop::collection::vec(coords(2), 1..4),
            scale in 0.01f64..100.0,
        ) {
            let wps: Vec<_> = pts.iter().enumerate()
                .map(|(i, (c, w))| WeightedPoint::new(Point::from(c.clone()), *w, i as u64 + 1)).collect();
            let scaled: Vec<_> = wps.iter().map(|wp| WeightedPoint { weight: wp.weight * scale, ..wp.clone() }).collect();
            let centers: Vec<Point> = centers.into_iter().map(Point::from).collect();
            let a = weighted_cost(&wps, CostFunction::KMedian, &centers).unwrap();
            let b = weighted_cost(&scaled, CostFunction::KMedian, &centers).unwrap();
            prop_assert!((b - scale * a).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}
