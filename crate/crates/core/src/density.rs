//! Böröczky packing-density functions for balls of radius `r` in
//! hyperbolic 3-space, built on the regular simplex with edge length `2r`.

use std::f64::consts::PI;

use crate::error::{positive, Result};
use crate::hypgeo::ball_volume_unchecked;
use crate::quadrature::{integrate, QuadratureConfig, QuadratureResult};
use crate::special::{arcsec, arcsech_from_complement, sech};

/// arcsec 3, the dihedral angle of a Euclidean regular tetrahedron.
fn arcsec3() -> f64 {
    (1.0f64 / 3.0).acos()
}

/// Dihedral angle β(r) = arcsec(sech 2r + 2) of the regular simplex with
/// edge `2r`. Decreases from arcsec 3 towards arcsec 2 as `r` grows.
pub fn dihedral_beta(r: f64) -> Result<f64> {
    positive("r", r)?;
    arcsec(sech(2.0 * r) + 2.0)
}

/// Volume τ(r) of the regular simplex with edge `2r`:
/// `3 ∫_{β(r)}^{arcsec 3} arcsech(sec t − 2) dt`.
///
/// The integrand vanishes like a square root at the upper limit, so the
/// integral is taken in `s` with `t = arcsec 3 − s²`, which makes it smooth.
pub fn simplex_volume_tau(r: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let beta = dihedral_beta(r)?;
    let top = arcsec3();
    let s_max = (top - beta).max(0.0).sqrt();
    let integrand = |s: f64| {
        let gap = s * s;
        let t = top - gap;
        // 1 − (sec t − 2) = (3 cos t − 1)/cos t and
        // 3 cos t − 1 = 6 sin((t + arcsec 3)/2) sin(gap/2)
        let complement = 6.0 * (0.5 * (t + top)).sin() * (0.5 * gap).sin() / t.cos();
        let v = arcsech_from_complement(complement.max(0.0)).unwrap_or(f64::NAN);
        2.0 * s * v
    };
    let mut res = integrate(integrand, 0.0, s_max, cfg)?;
    res.value *= 3.0;
    res.error *= 3.0;
    Ok(res)
}

/// Böröczky's density bound d₃(r) = (3β(r) − π)(sinh 2r − 2r)/τ(r).
pub fn packing_density(r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let beta = dihedral_beta(r)?;
    let tau = simplex_volume_tau(r, cfg)?;
    Ok((3.0 * beta - PI) * (ball_volume_unchecked(r) / PI) / tau.value)
}

/// b(r) = B(r)/d₃(r): effective volume claimed by each ball of a packing.
pub fn b_ratio(r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let d = packing_density(r, cfg)?;
    Ok(ball_volume_unchecked(r) / d)
}

/// Distance h₃(r) from the barycenter to a vertex of the regular simplex with
/// edge `2r`: `arccosh(sqrt(1 + 3 cosh 2r)/2)`, evaluated as
/// `arcsinh(sqrt(3/2)·sinh r)`.
pub fn circumradius_h3(r: f64) -> Result<f64> {
    positive("r", r)?;
    Ok((1.5f64.sqrt() * r.sinh()).asinh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureMethod;

    const LOG3: f64 = 1.098_612_288_668_109_8;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn beta_limits_and_value() {
        let b = dihedral_beta(LOG3 / 2.0).unwrap();
        assert!((b - (1.0f64 / 2.6).acos()).abs() < 1e-14);
        assert!((b - 1.176_005_207_095_135_1).abs() < 1e-13);
        assert!((dihedral_beta(1e-8).unwrap() - arcsec3()).abs() < 1e-12);
        assert!((dihedral_beta(20.0).unwrap() - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        assert!(dihedral_beta(0.0).is_err());
        assert!(dihedral_beta(f64::NAN).is_err());
    }

    #[test]
    fn beta_strictly_decreasing() {
        let mut prev = dihedral_beta(0.01).unwrap();
        for i in 2..300 {
            let b = dihedral_beta(0.01 * i as f64).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn tau_reference_value() {
        let t = simplex_volume_tau(LOG3 / 2.0, &cfg()).unwrap();
        // mpmath tanh-sinh quadrature of the untransformed integral
        assert!((t.value - 0.114_365_193_647_020_13).abs() < 1e-12);
        assert!(t.error <= 1e-10);
    }

    #[test]
    fn tau_vanishes_at_zero() {
        let tight = QuadratureConfig::with_tolerance(1e-22);
        let t = simplex_volume_tau(1e-3, &tight).unwrap().value;
        // Euclidean regular tetrahedron with edge 2e-3
        let euclid = (2e-3f64).powi(3) / (6.0 * 2f64.sqrt());
        assert!((t / euclid - 1.0).abs() < 1e-5);
    }

    #[test]
    fn tau_self_consistent_under_tolerance_halving() {
        for &r in &[0.2, 0.55, 1.3, 2.5] {
            let loose = QuadratureConfig::with_tolerance(1e-9);
            let tight = QuadratureConfig::with_tolerance(0.5e-9);
            let a = simplex_volume_tau(r, &loose).unwrap();
            let b = simplex_volume_tau(r, &tight).unwrap();
            assert!((a.value - b.value).abs() < 1e-9);
        }
    }

    #[test]
    fn fixed_order_agrees_with_adaptive() {
        let fixed = QuadratureConfig {
            method: QuadratureMethod::FixedOrder,
            abs_tol: 1e-10,
            max_subdivisions: 16,
        };
        let a = simplex_volume_tau(0.8, &fixed).unwrap().value;
        let b = simplex_volume_tau(0.8, &cfg()).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn density_and_b_at_half_log3() {
        let d = packing_density(LOG3 / 2.0, &cfg()).unwrap();
        let b = b_ratio(LOG3 / 2.0, &cfg()).unwrap();
        assert!((d - 0.793_087_475_024_035_3).abs() < 1e-10);
        assert!((b - 0.929_781_307_592_634_4).abs() < 1e-10);
        // consistent with the published λ₀ = 156/b = 167.781…
        assert!((156.0 / b - 167.781).abs() < 1e-3);
    }

    #[test]
    fn density_euclidean_limit() {
        let tight = QuadratureConfig::with_tolerance(1e-24);
        let d3 = packing_density(1e-3, &tight).unwrap();
        let d4 = packing_density(1e-4, &tight).unwrap();
        // d(r) = d0 + c·r² + …: one Richardson step
        let extrapolated = (100.0 * d4 - d3) / 99.0;
        let rogers = 2f64.sqrt() * (3.0 * arcsec3() - PI);
        assert!((extrapolated - rogers).abs() < 1e-8, "{extrapolated} vs {rogers}");
    }

    #[test]
    fn density_in_unit_interval_and_b_above_ball() {
        for i in 1..=30 {
            let r = 0.1 * i as f64;
            let d = packing_density(r, &cfg()).unwrap();
            assert!(d > 0.0 && d < 1.0, "d({r}) = {d}");
            assert!(b_ratio(r, &cfg()).unwrap() > ball_volume_unchecked(r));
        }
    }

    #[test]
    fn b_is_continuous() {
        let b0 = b_ratio(0.5, &cfg()).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let h = 10f64.powi(-k);
            let diff = (b_ratio(0.5 + h, &cfg()).unwrap() - b0).abs();
            assert!(diff < prev);
            prev = diff;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn quadrature_failure_propagates() {
        let starved = QuadratureConfig {
            max_subdivisions: 1,
            ..QuadratureConfig::with_tolerance(1e-30)
        };
        assert!(packing_density(0.5, &starved).is_err());
        assert!(b_ratio(0.5, &starved).is_err());
    }

    #[test]
    fn h3_limits_and_bound() {
        let r = 1e-6;
        assert!((circumradius_h3(r).unwrap() / r - 1.5f64.sqrt()).abs() < 1e-9);
        for i in 1..=300 {
            let r = 0.01 * i as f64;
            assert!(circumradius_h3(r).unwrap() < 2.0 * r);
        }
        let h = circumradius_h3(LOG3 / 2.0).unwrap();
        assert!(h <= LOG3);
        let closed = ((1.0 + 3.0 * LOG3.cosh()).sqrt() / 2.0).acosh();
        assert!((h - closed).abs() < 1e-13);
    }
}
