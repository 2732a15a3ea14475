//! Oracles shared by the integration tests. Everything here is computed
//! independently of the closed forms under test: volumes come from Monte-Carlo
//! sampling or from direct quadrature of disk areas, and pointwise bounds are
//! evaluated straight from the geometric definitions.
#![allow(dead_code)]

use std::f64::consts::PI;

use hypercert_core::mc::{Ball, Both, Cap, Cone, IceCream, Lens};
use hypercert_core::{
    cone_volume, estimate_volume, eta, lens_volume, omega, psi, sigma, theta, CertifyParams, HPoint, McEstimate,
    TriplePoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LOG3: f64 = 1.098_612_288_668_109_8;
pub const MC_SAMPLES: u64 = 1_000_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// κ(r, w) by slicing the ball with planes at signed distance u from the
/// center: each slice is a hyperbolic disk of area π(cosh²r·sech²u − 1).
pub fn kappa_by_slices(r: f64, w: f64) -> f64 {
    let lo = w.max(-r);
    if lo >= r {
        return 0.0;
    }
    let c2 = r.cosh().powi(2);
    PI * simpson(|u| c2 / u.cosh().powi(2) - 1.0, lo, r, 4000)
}

fn axis_point(d: f64) -> HPoint {
    HPoint::on_axis(d)
}

pub fn mc_kappa(r: f64, w: f64, samples: u64, seed: u64) -> McEstimate {
    let u = HPoint::origin();
    let cap = Cap::new(u, &axis_point(1.0), r, w).unwrap();
    estimate_volume(&cap, &Ball::new(u, r).unwrap(), samples, seed).unwrap()
}

pub fn mc_lens(p: TriplePoint, samples: u64, seed: u64) -> McEstimate {
    let first = Ball::new(HPoint::origin(), p.x).unwrap();
    let second = Ball::new(axis_point(p.z), p.y).unwrap();
    estimate_volume(&Lens { first, second }, &first, samples, seed).unwrap()
}

pub fn mc_cone(a: f64, beta: f64, samples: u64, seed: u64) -> McEstimate {
    let u = HPoint::origin();
    let cone = Cone::new(u, &axis_point(1.0), a, beta).unwrap();
    estimate_volume(&cone, &Ball::new(u, a).unwrap(), samples, seed).unwrap()
}

/// Ice-cream cone with apex at the origin, scoop ball(Q, r) at distance D,
/// clipped to ball(U, ρ).
pub fn mc_phi(p: TriplePoint, samples: u64, seed: u64) -> McEstimate {
    let u = HPoint::origin();
    let z = IceCream::new(u, axis_point(p.z), p.y).unwrap();
    let clip = Ball::new(u, p.x).unwrap();
    let envelope = Ball::new(u, p.x.min(p.z + p.y)).unwrap();
    estimate_volume(&Both(z, clip), &envelope, samples, seed).unwrap()
}

pub fn random_kappa_args(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r: f64 = rng.random_range(0.3..1.5);
    let w = rng.random_range(-0.95..0.95) * r;
    (r, w)
}

/// Two balls that overlap without either containing the other.
pub fn random_lens_args(rng: &mut ChaCha8Rng) -> TriplePoint {
    let x: f64 = rng.random_range(0.4..1.5);
    let y: f64 = rng.random_range(0.3..1.2);
    let z = rng.random_range((x - y).abs() + 0.05..x + y - 0.05);
    TriplePoint::new(x, y, z).unwrap()
}

pub fn random_cone_args(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(0.4..1.5), rng.random_range(0.1..1.4))
}

/// A point of 𝒱₀ where the tangent cone fits inside the clipping ball.
pub fn random_phi_args(rng: &mut ChaCha8Rng) -> TriplePoint {
    loop {
        let r: f64 = rng.random_range(0.3..0.8);
        let d: f64 = r + rng.random_range(0.1..0.9);
        let gen = (d.cosh() / r.cosh()).acosh();
        let lo = (d - r).max(gen) + 0.05;
        let hi = d + r - 0.05;
        if lo >= hi {
            continue;
        }
        let p = TriplePoint::new(rng.random_range(lo..hi), r, d).unwrap();
        if p.in_v0() {
            return p;
        }
    }
}

/// Pointwise quantities along the one-parameter family ρ = R − D, r = ε/2.
pub struct Pointwise {
    pub h: f64,
    pub sigma: f64,
    pub psi: f64,
    pub wlens: f64,
    pub wcone: f64,
    pub phi: f64,
}

pub fn pointwise(params: &CertifyParams, d: f64) -> Pointwise {
    let r = params.epsilon / 2.0;
    let p = TriplePoint::new(params.r_big - d, r, d).unwrap();
    let (a, th) = (omega(r, d).unwrap(), theta(r, d).unwrap());
    let ps = psi(a, th).unwrap();
    let wlens = lens_volume(p).unwrap();
    let wcone = cone_volume(a, th).unwrap();
    let clip = hypercert_core::kappa(r, d - ps).unwrap();
    Pointwise {
        h: eta(p),
        sigma: sigma(p).unwrap(),
        psi: ps,
        wlens,
        wcone,
        phi: wlens + wcone - clip,
    }
}

/// Relative-plus-absolute roundoff allowance for comparing a bound with a
/// pointwise value computed along a different floating-point path.
pub fn ulp_slack(x: f64) -> f64 {
    1e-12 * (1.0 + x.abs())
}
