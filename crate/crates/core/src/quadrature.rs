//! Gauss–Kronrod (7/15) quadrature, adaptive or on a fixed panel count.
//!
//! The error estimate is the raw Gauss/Kronrod difference with no QUADPACK
//! rescaling, which over-estimates the error of the Kronrod result on smooth
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    /// Bisect the panel with the largest error until the total error is
    /// below tolerance.
    Adaptive,
    /// Split the range into `max_subdivisions` equal panels once.
    FixedOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: QuadratureMethod,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::Adaptive,
            abs_tol: 1e-10,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "quadrature tolerance must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParams("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]`. Non-convergence is an error, never a silently
/// inaccurate value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParams(format!("integration limits [{a}, {b}] not finite")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }

    let (value, error, subdivisions) = match cfg.method {
        QuadratureMethod::FixedOrder => {
            let n = cfg.max_subdivisions;
            let h = (b - a) / n as f64;
            let (mut v, mut e) = (0.0, 0.0);
            for i in 0..n {
                let lo = a + i as f64 * h;
                let hi = if i + 1 == n { b } else { lo + h };
                let p = gauss_kronrod(&f, lo, hi);
                v += p.value;
                e += p.error;
            }
            (v, e, n)
        }
        QuadratureMethod::Adaptive => {
            let mut heap = BinaryHeap::new();
            let first = gauss_kronrod(&f, a, b);
            let mut e = first.error;
            heap.push(first);
            while e > cfg.abs_tol && heap.len() < cfg.max_subdivisions {
                let worst = heap.pop().expect("heap is never empty");
                let mid = 0.5 * (worst.a + worst.b);
                let left = gauss_kronrod(&f, worst.a, mid);
                let right = gauss_kronrod(&f, mid, worst.b);
                e += left.error + right.error - worst.error;
                heap.push(left);
                heap.push(right);
            }
            // re-sum instead of trusting the running error total
            let v: f64 = heap.iter().map(|p| p.value).sum();
            let e: f64 = heap.iter().map(|p| p.error).sum();
            (v, e, heap.len())
        }
    };

    if !value.is_finite() {
        return Err(Error::Quadrature {
            error: f64::INFINITY,
            tolerance: cfg.abs_tol,
            subdivisions,
        });
    }
    if error > cfg.abs_tol {
        return Err(Error::Quadrature {
            error,
            tolerance: cfg.abs_tol,
            subdivisions,
        });
    }
    Ok(QuadratureResult {
        value,
        error,
        subdivisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, &QuadratureConfig::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn sqrt_endpoint_converges_adaptively() {
        let cfg = QuadratureConfig {
            max_subdivisions: 1000,
            ..QuadratureConfig::with_tolerance(1e-10)
        };
        let r = integrate(f64::sqrt, 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
        assert!(r.subdivisions > 1);
    }

    #[test]
    fn non_convergence_is_reported() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            ..QuadratureConfig::with_tolerance(1e-14)
        };
        match integrate(|x: f64| x.sqrt(), 0.0, 1.0, &cfg) {
            Err(Error::Quadrature { subdivisions, .. }) => assert_eq!(subdivisions, 3),
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }

    #[test]
    fn fixed_order_splits_evenly() {
        let cfg = QuadratureConfig {
            method: QuadratureMethod::FixedOrder,
            abs_tol: 1e-12,
            max_subdivisions: 8,
        };
        let r = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert_eq!(r.subdivisions, 8);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = QuadratureConfig::with_tolerance(0.0);
        assert!(integrate(f64::exp, 0.0, 1.0, &bad).is_err());
        let bad = QuadratureConfig {
            max_subdivisions: 0,
            ..QuadratureConfig::default()
        };
        assert!(integrate(f64::exp, 0.0, 1.0, &bad).is_err());
    }
}
