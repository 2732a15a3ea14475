//! Monte-Carlo volume estimation in the hyperboloid model of H³.
//!
//! Points live on the upper sheet `x0² − x1² − x2² − x3² = 1`. Regions are
//! membership predicates; a volume is estimated by sampling uniformly from an
//! enclosing ball and counting hits. Samples are drawn in fixed-size chunks,
//! each with its own ChaCha stream indexed by the chunk number, so a given
//! seed yields the same points however the chunks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::hypgeo::ball_volume_unchecked;

const SHEET_TOL: f64 = 1e-10;
const CHUNK: u64 = 1 << 14;

/// A point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint([f64; 4]);

/// Minkowski product `a0 b0 − a1 b1 − a2 b2 − a3 b3`.
fn mink(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

impl HPoint {
    pub fn new(coords: [f64; 4]) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite coordinates {coords:?}")));
        }
        let norm = mink(&coords, &coords);
        let scale = coords[0] * coords[0];
        if coords[0] < 1.0 - SHEET_TOL || (norm - 1.0).abs() > SHEET_TOL * scale.max(1.0) {
            return Err(Error::InvalidParams(format!(
                "{coords:?} is not on the upper sheet (Minkowski norm {norm})"
            )));
        }
        Ok(Self(coords))
    }

    pub fn origin() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    /// The point at distance `t` from the origin in the unit direction `dir`.
    /// `t` may be negative.
    pub fn from_polar(t: f64, dir: [f64; 3]) -> Self {
        let s = t.sinh();
        Self::renormalized([t.cosh(), s * dir[0], s * dir[1], s * dir[2]])
    }

    /// The point at signed distance `t` from the origin along the x₁ axis.
    pub fn on_axis(t: f64) -> Self {
        Self::from_polar(t, [1.0, 0.0, 0.0])
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }

    // Recompute x0 from the spatial part so roundoff never leaves the sheet.
    fn renormalized(c: [f64; 4]) -> Self {
        let s2 = c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
        Self([(1.0 + s2).sqrt(), c[1], c[2], c[3]])
    }

    /// `cosh` of the distance to `other`.
    fn cosh_dist(&self, other: &HPoint) -> f64 {
        mink(&self.0, &other.0).max(1.0)
    }

    /// Image of `self` under the boost carrying the origin to `center`.
    pub fn transported_to(&self, center: &HPoint) -> HPoint {
        let c = center.0;
        let p = self.0;
        let v = [c[1], c[2], c[3]];
        let vp = v[0] * p[1] + v[1] * p[2] + v[2] * p[3];
        let k = p[0] + vp / (1.0 + c[0]);
        HPoint::renormalized([
            c[0] * p[0] + vp,
            p[1] + v[0] * k,
            p[2] + v[1] * k,
            p[3] + v[2] * k,
        ])
    }
}

/// Hyperbolic distance, via `2 asinh(|p − q|/2)` for accuracy at short range.
pub fn hdist(p: &HPoint, q: &HPoint) -> f64 {
    let d = [
        p.0[0] - q.0[0],
        p.0[1] - q.0[1],
        p.0[2] - q.0[2],
        p.0[3] - q.0[3],
    ];
    let chord2 = (-mink(&d, &d)).max(0.0);
    2.0 * (0.5 * chord2.sqrt()).asinh()
}

/// Unit tangent at `from` pointing along the geodesic to `to`, together with
/// the distance between them.
fn unit_tangent(from: &HPoint, to: &HPoint) -> Option<([f64; 4], f64)> {
    let d = hdist(from, to);
    if d <= 0.0 {
        return None;
    }
    let c = d.cosh();
    let s = d.sinh();
    let mut t = [0.0; 4];
    for i in 0..4 {
        t[i] = (to.0[i] - c * from.0[i]) / s;
    }
    Some((t, d))
}

/// A set given by a membership test.
pub trait Region {
    fn contains(&self, p: &HPoint) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub struct Ball {
    pub center: HPoint,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: HPoint, radius: f64) -> Result<Self> {
        positive("radius", radius)?;
        Ok(Self { center, radius })
    }

    pub fn volume(&self) -> f64 {
        ball_volume_unchecked(self.radius)
    }
}

impl Region for Ball {
    fn contains(&self, p: &HPoint) -> bool {
        hdist(&self.center, p) <= self.radius
    }
}

/// Closed half-space `{p : ⟨p, n⟩ ≤ 0}` for a unit spacelike normal `n`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpace {
    normal: [f64; 4],
}

impl HalfSpace {
    /// Bounded by the plane perpendicular to the geodesic `from → toward` at
    /// signed distance `w` from `from`; `from` is excluded iff `w > 0`.
    pub fn beyond(from: &HPoint, toward: &HPoint, w: f64) -> Result<Self> {
        let (t, _) = unit_tangent(from, toward)
            .ok_or_else(|| Error::domain("HalfSpace::beyond", "degenerate axis"))?;
        let (c, s) = (w.cosh(), w.sinh());
        let mut n = [0.0; 4];
        for i in 0..4 {
            n[i] = s * from.0[i] + c * t[i];
        }
        Ok(Self { normal: n })
    }

    /// Signed `sinh` of the distance from the bounding plane, positive outside.
    pub fn signed_sinh_distance(&self, p: &HPoint) -> f64 {
        mink(&p.0, &self.normal)
    }
}

impl Region for HalfSpace {
    fn contains(&self, p: &HPoint) -> bool {
        self.signed_sinh_distance(p) <= 0.0
    }
}

/// Solid cap: a ball cut by a half-space.
#[derive(Debug, Clone, Copy)]
pub struct Cap {
    pub ball: Ball,
    pub half: HalfSpace,
}

impl Cap {
    /// Cap of the ball about `center` cut at signed distance `w` along the
    /// direction of `toward`; matches the convention of κ(r, w).
    pub fn new(center: HPoint, toward: &HPoint, r: f64, w: f64) -> Result<Self> {
        Ok(Self {
            ball: Ball::new(center, r)?,
            half: HalfSpace::beyond(&center, toward, w)?,
        })
    }
}

impl Region for Cap {
    fn contains(&self, p: &HPoint) -> bool {
        self.ball.contains(p) && self.half.contains(p)
    }
}

/// Intersection of two balls.
#[derive(Debug, Clone, Copy)]
pub struct Lens {
    pub first: Ball,
    pub second: Ball,
}

impl Region for Lens {
    fn contains(&self, p: &HPoint) -> bool {
        self.first.contains(p) && self.second.contains(p)
    }
}

/// Right circular cone with apex, axis direction, generator length and angle.
#[derive(Debug, Clone, Copy)]
pub struct Cone {
    apex: HPoint,
    axis_point: HPoint,
    cosh_axis: f64,
    sinh_axis: f64,
    cos_angle: f64,
    base_normal: [f64; 4],
}

impl Cone {
    pub fn new(apex: HPoint, toward: &HPoint, generator: f64, angle: f64) -> Result<Self> {
        positive("generator", generator)?;
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) {
            return Err(Error::domain("Cone::new", format!("angle {angle} outside [0, π/2]")));
        }
        let (t, d) =
            unit_tangent(&apex, toward).ok_or_else(|| Error::domain("Cone::new", "degenerate axis"))?;
        // foot of the perpendicular from a rim point: tanh h = tanh a·cos β
        let h = (generator.tanh() * angle.cos()).atanh();
        // tangent of the axis geodesic at distance h from the apex
        let (c, s) = (h.cosh(), h.sinh());
        let mut n = [0.0; 4];
        for i in 0..4 {
            n[i] = s * apex.0[i] + c * t[i];
        }
        Ok(Self {
            apex,
            axis_point: *toward,
            cosh_axis: d.cosh(),
            sinh_axis: d.sinh(),
            cos_angle: angle.cos(),
            base_normal: n,
        })
    }

    /// Angle at the apex between `p` and the axis, by the law of cosines.
    fn angle_cos(&self, p: &HPoint) -> Option<f64> {
        let cosh_up = self.apex.cosh_dist(p);
        let sinh_up = (cosh_up * cosh_up - 1.0).sqrt();
        if sinh_up <= 1e-300 {
            return None;
        }
        let cosh_pa = p.cosh_dist(&self.axis_point);
        Some((cosh_up * self.cosh_axis - cosh_pa) / (sinh_up * self.sinh_axis))
    }
}

impl Region for Cone {
    fn contains(&self, p: &HPoint) -> bool {
        match self.angle_cos(p) {
            None => true,
            Some(c) => c >= self.cos_angle && mink(&p.0, &self.base_normal) >= 0.0,
        }
    }
}

/// Convex hull of an apex `U` and the closed ball `ball(Q, r)`.
#[derive(Debug, Clone, Copy)]
pub struct IceCream {
    pub scoop: Ball,
    pub cone: Cone,
}

impl IceCream {
    pub fn new(apex: HPoint, scoop_center: HPoint, r: f64) -> Result<Self> {
        let d = hdist(&apex, &scoop_center);
        if d <= 0.0 {
            return Err(Error::domain("IceCream::new", "apex coincides with the scoop center"));
        }
        positive("r", r)?;
        if r >= d {
            return Err(Error::domain("IceCream::new", format!("scoop radius {r} reaches the apex at distance {d}")));
        }
        // right triangle apex, scoop center, tangency point
        let a = (d.cosh() / r.cosh()).acosh();
        let angle = (r.sinh() / d.sinh()).asin();
        Ok(Self {
            scoop: Ball::new(scoop_center, r)?,
            cone: Cone::new(apex, &scoop_center, a, angle)?,
        })
    }
}

impl Region for IceCream {
    fn contains(&self, p: &HPoint) -> bool {
        self.scoop.contains(p) || self.cone.contains(p)
    }
}

/// Both regions at once.
#[derive(Debug, Clone, Copy)]
pub struct Both<A, B>(pub A, pub B);

impl<A: Region, B: Region> Region for Both<A, B> {
    fn contains(&self, p: &HPoint) -> bool {
        self.0.contains(p) && self.1.contains(p)
    }
}

/// Inverse of the radial CDF `B(t)/B(R)` on `[0, R]`.
fn radial_quantile(u: f64, radius: f64) -> f64 {
    let target = u * ball_volume_unchecked(radius);
    let (mut lo, mut hi) = (0.0, radius);
    let mut t = radius * u.cbrt();
    for _ in 0..60 {
        let f = ball_volume_unchecked(t) - target;
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let deriv = 4.0 * std::f64::consts::PI * t.sinh().powi(2);
        let mut next = if deriv > 0.0 { t - f / deriv } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= 1e-15 * radius {
            return next;
        }
        t = next;
    }
    t
}

fn unit_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn sample_chunk(ball: &Ball, seed: u64, chunk: u64, len: u64, mut visit: impl FnMut(HPoint)) {
    let mut rng = chunk_rng(seed, chunk);
    for _ in 0..len {
        let t = radial_quantile(rng.random::<f64>(), ball.radius);
        let dir = unit_direction(&mut rng);
        visit(HPoint::from_polar(t, dir).transported_to(&ball.center));
    }
}

fn chunk_len(count: u64, chunk: u64) -> u64 {
    (count - chunk * CHUNK).min(CHUNK)
}

/// `count` i.i.d. points uniform (in volume) in the ball about `center`.
pub fn sample_ball(center: HPoint, radius: f64, count: u64, seed: u64) -> Result<impl Iterator<Item = HPoint>> {
    let ball = Ball::new(center, radius)?;
    let chunks = count.div_ceil(CHUNK);
    Ok((0..chunks).flat_map(move |c| {
        let mut pts = Vec::with_capacity(chunk_len(count, c) as usize);
        sample_chunk(&ball, seed, c, chunk_len(count, c), |p| pts.push(p));
        pts
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct McEstimate {
    #[serde(with = "crate::format::json_f64")]
    pub mean: f64,
    #[serde(with = "crate::format::json_f64")]
    pub standard_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean − value| ≤ k·standard_error`, with a roundoff floor for the
    /// degenerate all-hit and no-hit cases.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        let tol = (k * self.standard_error).max(1e-12 * value.abs().max(1.0));
        (self.mean - value).abs() <= tol
    }

    pub fn z_score(&self, value: f64) -> f64 {
        if self.standard_error > 0.0 {
            (self.mean - value) / self.standard_error
        } else if self.mean == value {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Hit-or-miss estimate of the volume of `region`, which must lie inside
/// `envelope`.
pub fn estimate_volume<R: Region + Sync>(region: &R, envelope: &Ball, count: u64, seed: u64) -> Result<McEstimate> {
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be at least 1".into()));
    }
    let chunks = count.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut h = 0u64;
            sample_chunk(envelope, seed, c, chunk_len(count, c), |p| {
                if region.contains(&p) {
                    h += 1;
                }
            });
            h
        })
        .sum();
    if hits == 0 {
        log::warn!("no sample out of {count} hit the region; reporting volume 0");
    }
    let vol = envelope.volume();
    let p = hits as f64 / count as f64;
    Ok(McEstimate {
        mean: vol * p,
        standard_error: vol * (p * (1.0 - p) / count as f64).sqrt(),
        samples: count,
        hits,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::{kappa, lens_volume, TriplePoint};

    #[test]
    fn estimate_json_round_trips() {
        let b = Ball::new(HPoint::origin(), 0.7).unwrap();
        let est = estimate_volume(&b, &Ball::new(HPoint::origin(), 1.0).unwrap(), 5_000, 4).unwrap();
        let text = serde_json::to_string(&est).unwrap();
        assert_eq!(serde_json::from_str::<McEstimate>(&text).unwrap(), est);
    }

    #[test]
    fn off_sheet_points_rejected() {
        assert!(HPoint::new([1.0, 0.1, 0.0, 0.0]).is_err());
        assert!(HPoint::new([-1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(HPoint::new([f64::NAN, 0.0, 0.0, 0.0]).is_err());
        let t = 0.7f64;
        assert!(HPoint::new([t.cosh(), 0.0, t.sinh(), 0.0]).is_ok());
    }

    #[test]
    fn axis_translation_distances() {
        let o = HPoint::origin();
        assert_eq!(hdist(&o, &o), 0.0);
        for &t in &[0.3, 1.7] {
            assert!((hdist(&o, &HPoint::on_axis(t)) - t).abs() < 1e-14);
            let a = HPoint::on_axis(0.4);
            let b = HPoint::on_axis(0.4 + t);
            assert!((hdist(&a, &b) - t).abs() < 1e-13);
        }
    }

    #[test]
    fn transport_is_an_isometry() {
        let c = HPoint::from_polar(1.1, [0.0, 0.6, 0.8]);
        let p = HPoint::from_polar(0.5, [1.0, 0.0, 0.0]);
        let q = HPoint::from_polar(0.9, [0.0, 0.0, 1.0]);
        let (pc, qc) = (p.transported_to(&c), q.transported_to(&c));
        assert!((hdist(&pc, &qc) - hdist(&p, &q)).abs() < 1e-12);
        assert!(hdist(&HPoint::origin().transported_to(&c), &c) < 1e-12);
        assert!(HPoint::new(pc.coords()).is_ok());
    }

    #[test]
    fn halfspace_signed_distance_convention() {
        let o = HPoint::origin();
        let x = HPoint::on_axis(1.0);
        let h = HalfSpace::beyond(&o, &x, 0.4).unwrap();
        assert!(!h.contains(&o));
        assert!(h.contains(&HPoint::on_axis(0.5)));
        assert!((h.signed_sinh_distance(&HPoint::on_axis(1.0)) + 0.6f64.sinh()).abs() < 1e-13);
        let h = HalfSpace::beyond(&o, &x, -0.4).unwrap();
        assert!(h.contains(&o));
        assert!(HalfSpace::beyond(&o, &o, 0.1).is_err());
    }

    #[test]
    fn cap_implies_ball() {
        let o = HPoint::origin();
        let cap = Cap::new(o, &HPoint::on_axis(1.0), 1.0, 0.3).unwrap();
        for p in sample_ball(o, 1.5, 2000, 3).unwrap() {
            if cap.contains(&p) {
                assert!(cap.ball.contains(&p));
            }
        }
    }

    #[test]
    fn icecream_apex_scoop_and_far_side() {
        let u = HPoint::origin();
        let q = HPoint::on_axis(1.05);
        let z = IceCream::new(u, q, 0.55).unwrap();
        assert!(z.contains(&u));
        assert!(z.contains(&q));
        assert!(!z.contains(&HPoint::on_axis(1.05 + 0.55 + 0.01)));
        assert!(IceCream::new(u, u, 0.5).is_err());
        assert!(IceCream::new(u, q, 1.2).is_err());
        // the whole scoop is inside
        for p in sample_ball(q, 0.55, 2000, 9).unwrap() {
            assert!(z.contains(&p));
        }
    }

    #[test]
    fn cone_contains_apex_and_axis_but_not_beyond_base() {
        let u = HPoint::origin();
        let axis = HPoint::on_axis(1.0);
        let cone = Cone::new(u, &axis, 1.0, 0.5).unwrap();
        let h = crate::hypgeo::psi(1.0, 0.5).unwrap();
        assert!(cone.contains(&u));
        assert!(cone.contains(&HPoint::on_axis(0.99 * h)));
        assert!(!cone.contains(&HPoint::on_axis(1.01 * h)));
        assert!(!cone.contains(&HPoint::on_axis(-0.1)));
    }

    #[test]
    fn sampler_is_deterministic() {
        let c = HPoint::from_polar(0.3, [0.0, 1.0, 0.0]);
        let a: Vec<_> = sample_ball(c, 1.0, 40_000, 42).unwrap().collect();
        let b: Vec<_> = sample_ball(c, 1.0, 40_000, 42).unwrap().collect();
        assert_eq!(a, b);
        let other: Vec<_> = sample_ball(c, 1.0, 10, 43).unwrap().collect();
        assert_ne!(a[..10], other[..]);
        assert!(a.iter().all(|p| hdist(&c, p) <= 1.0 + 1e-12));
    }

    #[test]
    fn radial_quantile_inverts_cdf() {
        for &r in &[0.01, 0.5, 2.5] {
            for i in 1..20 {
                let u = i as f64 / 20.0;
                let t = radial_quantile(u, r);
                let back = ball_volume_unchecked(t) / ball_volume_unchecked(r);
                assert!((back - u).abs() < 1e-12, "r {r} u {u}: {back}");
            }
        }
    }

    #[test]
    fn full_envelope_is_exact() {
        let ball = Ball::new(HPoint::origin(), 0.8).unwrap();
        let est = estimate_volume(&ball, &ball, 1000, 1).unwrap();
        assert_eq!(est.mean, ball.volume());
        assert_eq!(est.standard_error, 0.0);
        assert_eq!(est.hits, 1000);
    }

    #[test]
    fn zero_hits_report_zero() {
        let env = Ball::new(HPoint::origin(), 0.5).unwrap();
        let far = Ball::new(HPoint::on_axis(3.0), 0.1).unwrap();
        let est = estimate_volume(&far, &env, 500, 1).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.hits, 0);
        assert!(estimate_volume(&far, &env, 0, 1).is_err());
    }

    #[test]
    fn estimate_independent_of_thread_count() {
        let o = HPoint::origin();
        let cap = Cap::new(o, &HPoint::on_axis(1.0), 1.0, 0.5).unwrap();
        let env = cap.ball;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_volume(&cap, &env, 100_000, 5).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn small_cap_and_lens_estimates() {
        let o = HPoint::origin();
        let x = HPoint::on_axis(1.0);
        let cap = Cap::new(o, &x, 1.0, 0.5).unwrap();
        let est = estimate_volume(&cap, &cap.ball, 200_000, 11).unwrap();
        assert!(est.agrees_with(kappa(1.0, 0.5).unwrap(), 3.0), "{est:?}");

        let lens = Lens {
            first: Ball::new(o, 1.2).unwrap(),
            second: Ball::new(x, 0.7).unwrap(),
        };
        let est = estimate_volume(&lens, &lens.second, 200_000, 12).unwrap();
        let exact = lens_volume(TriplePoint::new(1.2, 0.7, 1.0).unwrap()).unwrap();
        assert!(est.agrees_with(exact, 3.0), "{est:?} vs {exact}");
    }
}
