//! Closed-form volumes in hyperbolic 3-space: balls, solid caps, lenses
//! (two-ball intersections), right circular cones and the clipped
//! "ice-cream cone" volume `phi`.
//!
//! All functions are pure and operate on `f64`. Domain-boundary tests such as
//! `eta >= 0` are exact comparisons on the computed value; callers that need
//! robustness against roundoff add their own slack.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};
use crate::special::acosh_clamped;

/// A point of `(0, ∞)³`. In applications `x` is a ball radius (ρ or r₁),
/// `y` a second radius (r or r₂) and `z` a center distance D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriplePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TriplePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        positive("x", x)?;
        positive("y", y)?;
        positive("z", z)?;
        Ok(Self { x, y, z })
    }

    /// Membership in 𝒱, the set where `eta >= 0`.
    pub fn in_v(&self) -> bool {
        eta(*self) >= 0.0
    }

    /// Membership in 𝒱₀: in 𝒱 and `y < z`.
    pub fn in_v0(&self) -> bool {
        self.in_v() && self.y < self.z
    }
}

/// Ball of radius `r` cut by a plane at signed distance `w` from its center.
/// Positive `w` means the kept half-space excludes the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub r: f64,
    pub w: f64,
}

impl CapSpec {
    pub fn new(r: f64, w: f64) -> Result<Self> {
        positive("r", r)?;
        finite("w", w)?;
        Ok(Self { r, w })
    }

    pub fn volume(&self) -> f64 {
        kappa_unchecked(self.r, self.w)
    }
}

/// Volume of a ball of radius `r`: `π(sinh 2r − 2r)`.
pub fn ball_volume(r: f64) -> Result<f64> {
    positive("r", r)?;
    Ok(ball_volume_unchecked(r))
}

pub(crate) fn ball_volume_unchecked(r: f64) -> f64 {
    // sinh 2r - 2r cancels badly for small r; switch to the series.
    if r < 1e-2 {
        let r2 = r * r;
        let x = 2.0 * r;
        let x3 = x * x * x;
        // x³/6 + x⁵/120 + x⁷/5040 + x⁹/362880
        let x2 = 4.0 * r2;
        PI * x3 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (1.0 / 5040.0 + x2 / 362_880.0)))
    } else {
        PI * ((2.0 * r).sinh() - 2.0 * r)
    }
}

/// Solid cap volume κ(r, w).
pub fn cap_volume(spec: CapSpec) -> Result<f64> {
    CapSpec::new(spec.r, spec.w).map(|s| s.volume())
}

/// κ(r, w) with argument validation; `w` may have either sign.
pub fn kappa(r: f64, w: f64) -> Result<f64> {
    cap_volume(CapSpec { r, w })
}

/// κ(r, w) = π(cosh²r·(tanh r − tanh w) − (r − w)) for |w| ≤ r, obtained by
/// integrating disk areas π(cosh²r·sech²u − 1) over Fermi slices u ∈ [w, r].
pub(crate) fn kappa_unchecked(r: f64, w: f64) -> f64 {
    if w >= r {
        return 0.0;
    }
    if w <= -r {
        return ball_volume_unchecked(r);
    }
    // tanh r − tanh w = sinh(r − w) / (cosh r · cosh w)
    let gap = r - w;
    let v = PI * (r.cosh() * gap.sinh() / w.cosh() - gap);
    v.max(0.0)
}

/// η(x, y, z) = [2 cosh x cosh y cosh z − (cosh²x + cosh²y + cosh²z) + 1] / sinh²z.
///
/// For a triangle P₁P₂E with |P₁E| = x, |P₂E| = y, |P₁P₂| = z, `sqrt(eta)` is
/// the sinh of the altitude from E. Always `eta <= sinh²x`.
pub fn eta(p: TriplePoint) -> f64 {
    let (cx, cy, cz) = (p.x.cosh(), p.y.cosh(), p.z.cosh());
    let sz = p.z.sinh();
    (2.0 * cx * cy * cz - (cx * cx + cy * cy + cz * cz) + 1.0) / (sz * sz)
}

/// σ(x, y, z) = arccosh(cosh x / sqrt(1 + η)), the distance from P₁ to the
/// foot of the altitude.
pub fn sigma(p: TriplePoint) -> Result<f64> {
    let h = eta(p);
    if !(h >= 0.0) {
        return Err(Error::domain("sigma", format!("eta = {h} < 0, point outside V")));
    }
    sigma_from_eta(p.x, h)
}

fn sigma_from_eta(x: f64, h: f64) -> Result<f64> {
    acosh_clamped("sigma", x.cosh() / (1.0 + h).sqrt())
}

/// Volume of the intersection of two balls of radii `x`, `y` whose centers
/// are `z` apart, as a sum of two caps glued along a disk.
///
/// σ locates the gluing plane. When the angle of the triangle at P₁ is
/// obtuse the plane lies behind P₁, so σ enters with a negative sign.
pub fn lens_volume(p: TriplePoint) -> Result<f64> {
    let s = sigma(p).map_err(|_| Error::domain("lens_volume", "point outside V"))?;
    let s = if p.y.cosh() > p.x.cosh() * p.z.cosh() { -s } else { s };
    Ok(kappa_unchecked(p.x, s) + kappa_unchecked(p.y, p.z - s))
}

/// ω(r, D) = arccosh(cosh D / cosh r): generator length of the cone from a
/// point at distance D tangent to a ball of radius r.
pub fn omega(r: f64, d: f64) -> Result<f64> {
    check_cone_pair("omega", r, d)?;
    acosh_clamped("omega", d.cosh() / r.cosh())
}

/// θ(r, D) = arcsin(sinh r / sinh D): half-angle of that tangent cone.
pub fn theta(r: f64, d: f64) -> Result<f64> {
    check_cone_pair("theta", r, d)?;
    Ok((r.sinh() / d.sinh()).asin())
}

fn check_cone_pair(func: &'static str, r: f64, d: f64) -> Result<()> {
    positive("r", r)?;
    positive("D", d)?;
    if r >= d {
        return Err(Error::domain(func, format!("requires r < D, got r = {r}, D = {d}")));
    }
    Ok(())
}

/// ψ(a, β) = arccosh(cosh a / sqrt(1 + sinh²a · sin²β)), the axis length of a
/// right circular cone with generator `a` and angle β. Evaluated as
/// artanh(tanh a · cos β), which is the same quantity without the
/// cancellation of arccosh near 1.
pub fn psi(a: f64, beta: f64) -> Result<f64> {
    positive("a", a)?;
    finite("beta", beta)?;
    let t = (a.tanh() * beta.cos()).abs();
    if t < 1.0 {
        return Ok(t.atanh());
    }
    // tanh a rounded to 1
    let sb = beta.sin();
    acosh_clamped("psi", a.cosh() / (1.0 + a.sinh().powi(2) * sb * sb).sqrt())
}

/// Volume of a right circular cone with generator `a` and angle β ∈ [0, π/2].
pub fn cone_volume(a: f64, beta: f64) -> Result<f64> {
    positive("a", a)?;
    finite("beta", beta)?;
    if !(0.0..=FRAC_PI_2).contains(&beta) {
        return Err(Error::domain("cone_volume", format!("angle {beta} outside [0, π/2]")));
    }
    let axis = psi(a, beta)?;
    Ok(cone_volume_with_axis(a, beta, axis))
}

pub(crate) fn cone_volume_with_axis(a: f64, beta: f64, axis: f64) -> f64 {
    let sector = 0.5 * ball_volume_unchecked(a) * (1.0 - beta.cos());
    (sector - kappa_unchecked(a, axis)).max(0.0)
}

/// φ(ρ, r, D): volume of the convex hull of {U} ∪ ball(Q, r) clipped to
/// ball(U, ρ), with dist(U, Q) = D.
pub fn phi(p: TriplePoint) -> Result<f64> {
    if !p.in_v0() {
        return Err(Error::domain("phi", format!("{p:?} outside V0")));
    }
    let (rho, r, d) = (p.x, p.y, p.z);
    let a = omega(r, d)?;
    let angle = theta(r, d)?;
    let axis = psi(a, angle)?;
    let lens = lens_volume(TriplePoint { x: rho, y: r, z: d })?;
    Ok(lens + cone_volume_with_axis(a, angle, axis) - kappa_unchecked(r, d - axis))
}
