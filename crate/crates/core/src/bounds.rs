//! Rank and mod-p homology bounds built from a certified constant c.
//!
//! With b = b(ε/2) and N = ⌊(B(R) − b)/c⌋ the valence bound, the rank of
//! π₁ is at most `1 + (vol/b)·(N/2 − 1)`. The homology coefficients add the
//! reciprocal of a volume threshold that holds whenever the dimension is at
//! least 11.

use serde::{Deserialize, Serialize};

use crate::certify::{verify_published_partition, CertifyParams, PartitionCertificate, PUBLISHED_C};
use crate::density::b_ratio;
use crate::error::{positive, Error, RankCondition, Result};
use crate::hypgeo::ball_volume_unchecked;
use crate::quadrature::QuadratureConfig;

/// Every finite-volume orientable hyperbolic 3-manifold has volume above this
/// (the minimum is the Weeks manifold, 0.9427…).
pub const MIN_VOLUME: f64 = 0.94;
/// Closed manifolds with dim H₁(M; F_p) ≥ 4 have volume above this
/// (a published Dehn-surgery and homology volume bound).
pub const CLOSED_RANK4_VOLUME: f64 = 1.22;
/// Cusped manifolds with dim H₁(M; F_p) ≥ 3 have volume above this: two or
/// more cusps force volume ≥ 3.66, and the one-cusped census manifolds of
/// volume ≤ 2.848 all have dim ≤ 2.
pub const CUSPED_RANK3_VOLUME: f64 = 2.848;
/// Closed manifolds with dim H₁(M; F₂) ≥ 11 have volume above this
/// (a published mod-2 homology volume bound).
pub const CLOSED_F2_VOLUME: f64 = 3.77;
/// Dimensions at most 10 are covered by `MIN_VOLUME`: h ≤ 10 < 11·0.94.
pub const SMALL_RANK_FACTOR: f64 = 11.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankBoundReport {
    pub epsilon: f64,
    #[serde(rename = "R")]
    pub r_big: f64,
    pub c: f64,
    pub b_half_eps: f64,
    pub ball_r: f64,
    pub quotient: f64,
    pub valence_bound: u64,
    pub rank_coefficient: f64,
    pub quadrature_tolerance: f64,
}

impl RankBoundReport {
    /// Checks conditions (a)–(c) and computes the valence bound and the rank
    /// coefficient. `cert` must certify Φ > c for the same (ε, R).
    pub fn new(params: &CertifyParams, c: f64, cert: &PartitionCertificate, quad: &QuadratureConfig) -> Result<Self> {
        positive("c", c)?;
        let same = cert.params.epsilon == params.epsilon && cert.params.r_big == params.r_big;
        if !same {
            return Err(Error::RankPrecondition {
                condition: RankCondition::A,
                detail: format!(
                    "certificate is for ε = {}, R = {}, not ε = {}, R = {}",
                    cert.params.epsilon, cert.params.r_big, params.epsilon, params.r_big
                ),
            });
        }
        if !cert.proves(c) {
            return Err(Error::RankPrecondition {
                condition: RankCondition::A,
                detail: format!("certificate proves Φ ≥ {} which does not clear c = {c}", cert.certified_c),
            });
        }
        let ball_half = ball_volume_unchecked(params.half_eps());
        if !(ball_half > c) {
            return Err(Error::RankPrecondition {
                condition: RankCondition::B,
                detail: format!("B(ε/2) = {ball_half} is not above c = {c}"),
            });
        }
        let b_half = b_ratio(params.half_eps(), quad)?;
        let ball_r = ball_volume_unchecked(params.r_big);
        let quotient = (ball_r - b_half) / c;
        let gap = (quotient - quotient.round()).abs();
        if !(gap > 10.0 * params.slack) {
            return Err(Error::RankPrecondition {
                condition: RankCondition::C,
                detail: format!("(B(R) − b(ε/2))/c = {quotient} is within {gap} of an integer"),
            });
        }
        let valence = quotient.floor() as u64;
        Ok(Self {
            epsilon: params.epsilon,
            r_big: params.r_big,
            c,
            b_half_eps: b_half,
            ball_r,
            quotient,
            valence_bound: valence,
            rank_coefficient: (valence as f64 / 2.0 - 1.0) / b_half,
            quadrature_tolerance: quad.abs_tol,
        })
    }

    /// `1 + rank_coefficient · volume`.
    pub fn rank_bound(&self, volume: f64) -> Result<f64> {
        positive("volume", volume)?;
        Ok(1.0 + self.rank_coefficient * volume)
    }
}

/// Rank bound for a manifold of the given volume; refuses unless all three
/// conditions hold.
pub fn rank_bound(
    params: &CertifyParams,
    c: f64,
    volume: f64,
    cert: &PartitionCertificate,
    quad: &QuadratureConfig,
) -> Result<f64> {
    RankBoundReport::new(params, c, cert, quad)?.rank_bound(volume)
}

/// The report for ε = log 3, R = 2 log 3 + 0.15, c = 0.496, backed by the
/// published partition.
pub fn published_rank_report(quad: &QuadratureConfig) -> Result<RankBoundReport> {
    let cert = verify_published_partition()?;
    RankBoundReport::new(&CertifyParams::published(), PUBLISHED_C, &cert, quad)
}

/// The homology coefficients λ₀ … λ₁″.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Lambdas {
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda1_noncompact: f64,
    pub lambda1_compact_p2: f64,
}

impl Lambdas {
    pub fn from_report(report: &RankBoundReport) -> Self {
        let l0 = report.rank_coefficient;
        Self {
            lambda0: l0,
            lambda1: 1.0 / CLOSED_RANK4_VOLUME + l0,
            lambda1_noncompact: 1.0 / CUSPED_RANK3_VOLUME + l0,
            lambda1_compact_p2: 1.0 / CLOSED_F2_VOLUME + l0,
        }
    }

    pub fn compute(quad: &QuadratureConfig) -> Result<Self> {
        Ok(Self::from_report(&published_rank_report(quad)?))
    }
}

pub fn lambda0(quad: &QuadratureConfig) -> Result<f64> {
    Ok(Lambdas::compute(quad)?.lambda0)
}

pub fn lambda1(quad: &QuadratureConfig) -> Result<f64> {
    Ok(Lambdas::compute(quad)?.lambda1)
}

pub fn lambda1_noncompact(quad: &QuadratureConfig) -> Result<f64> {
    Ok(Lambdas::compute(quad)?.lambda1_noncompact)
}

pub fn lambda1_compact_p2(quad: &QuadratureConfig) -> Result<f64> {
    Ok(Lambdas::compute(quad)?.lambda1_compact_p2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HomologyBoundQuery {
    pub volume: f64,
    pub compact: bool,
    pub prime_is_two: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HomologyBound {
    pub coefficient: f64,
    pub bound: f64,
    /// 11·vol, which bounds the dimension whenever it is at most 10.
    pub small_rank_bound: f64,
}

/// Upper bound for dim H₁(M; F_p): λ₁″·vol for closed M and p = 2, λ₁′·vol for
/// cusped M, λ₁·vol otherwise.
pub fn homology_bound(q: &HomologyBoundQuery, lambdas: &Lambdas) -> Result<HomologyBound> {
    positive("volume", q.volume)?;
    let coefficient = match (q.compact, q.prime_is_two) {
        (true, true) => lambdas.lambda1_compact_p2,
        (false, _) => lambdas.lambda1_noncompact,
        (true, false) => lambdas.lambda1,
    };
    Ok(HomologyBound {
        coefficient,
        bound: coefficient * q.volume,
        small_rank_bound: SMALL_RANK_FACTOR * q.volume,
    })
}
