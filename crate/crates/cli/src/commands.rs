use hypercert_core::bounds::{homology_bound, published_rank_report, HomologyBoundQuery, Lambdas, RankBoundReport};
use hypercert_core::certify::{optimize_r, verify_partition, OptimizeReport, PUBLISHED_C};
use hypercert_core::format::json_f64;
use hypercert_core::mc::{Ball, Both, Cap, Cone, IceCream, Lens};
use hypercert_core::{
    ball_volume, certify_lower_bound, cone_volume, estimate_volume, kappa, lens_volume, omega, packing_density, phi,
    psi, simplex_volume_tau, theta, CertifyParams, Error, HPoint, McEstimate, PartitionCertificate, QuadratureConfig,
    RankCondition, TriplePoint,
};
use serde::Serialize;

use crate::args::{log3, Shape};
use crate::CliError;

pub enum Report {
    Certificate(PartitionCertificate),
    Constants(Constants),
    Optimize(OptimizeReport),
    Bound(BoundReport),
    McCheck(McCheck),
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Constants {
    #[serde(with = "json_f64")]
    pub epsilon: f64,
    #[serde(rename = "R", with = "json_f64")]
    pub r_big: f64,
    #[serde(with = "json_f64")]
    pub c: f64,
    #[serde(with = "json_f64")]
    pub ball_half_eps: f64,
    #[serde(with = "json_f64")]
    pub b_half_eps: f64,
    #[serde(with = "json_f64")]
    pub density_half_eps: f64,
    #[serde(with = "json_f64")]
    pub tau_half_eps: f64,
    #[serde(with = "json_f64")]
    pub tau_error_estimate: f64,
    #[serde(with = "json_f64")]
    pub quotient: f64,
    pub valence_bound: u64,
    #[serde(with = "json_f64")]
    pub lambda0: f64,
    #[serde(with = "json_f64")]
    pub lambda1: f64,
    #[serde(with = "json_f64")]
    pub lambda1_noncompact: f64,
    #[serde(with = "json_f64")]
    pub lambda1_compact_p2: f64,
    #[serde(with = "json_f64")]
    pub quadrature_tolerance: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    #[serde(with = "json_f64")]
    pub volume: f64,
    pub cusped: bool,
    pub prime: u64,
    #[serde(with = "json_f64")]
    pub epsilon: f64,
    #[serde(rename = "R", with = "json_f64")]
    pub r_big: f64,
    #[serde(with = "json_f64")]
    pub c: f64,
    pub valence_bound: u64,
    #[serde(with = "json_f64")]
    pub homology_coefficient: f64,
    #[serde(with = "json_f64")]
    pub homology_bound: f64,
    #[serde(with = "json_f64")]
    pub small_rank_bound: f64,
    #[serde(with = "json_f64")]
    pub rank_coefficient: f64,
    #[serde(with = "json_f64")]
    pub rank_bound: f64,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct McCheck {
    pub shape: String,
    #[serde(with = "hypercert_core::format::json_f64_vec")]
    pub params: Vec<f64>,
    #[serde(with = "json_f64")]
    pub closed_form: f64,
    pub estimate: McEstimate,
    #[serde(with = "json_f64")]
    pub z_score: f64,
    pub within_three_sigma: bool,
}

pub fn quadrature(tol: Option<f64>) -> Result<QuadratureConfig, CliError> {
    let cfg = tol.map(QuadratureConfig::with_tolerance).unwrap_or_default();
    cfg.validate()?;
    Ok(cfg)
}

pub fn constants(quad: &QuadratureConfig) -> Result<Report, CliError> {
    let r = log3() / 2.0;
    let report = published_rank_report(quad)?;
    let l = Lambdas::from_report(&report);
    let tau = simplex_volume_tau(r, quad)?;
    Ok(Report::Constants(Constants {
        epsilon: report.epsilon,
        r_big: report.r_big,
        c: report.c,
        ball_half_eps: ball_volume(r)?,
        b_half_eps: report.b_half_eps,
        density_half_eps: packing_density(r, quad)?,
        tau_half_eps: tau.value,
        tau_error_estimate: tau.error,
        quotient: report.quotient,
        valence_bound: report.valence_bound,
        lambda0: l.lambda0,
        lambda1: l.lambda1,
        lambda1_noncompact: l.lambda1_noncompact,
        lambda1_compact_p2: l.lambda1_compact_p2,
        quadrature_tolerance: quad.abs_tol,
    }))
}

pub fn verify_lemma(slack: f64) -> Result<Report, CliError> {
    let p = CertifyParams::published();
    let params = CertifyParams::with_slack(p.epsilon, p.r_big, slack)?;
    Ok(Report::Certificate(verify_partition(params, PUBLISHED_C)?))
}

pub fn certify(epsilon: f64, r_big: f64, c: f64, max_depth: u32, slack: f64) -> Result<Report, CliError> {
    let params = CertifyParams::with_slack(epsilon, r_big, slack)?;
    Ok(Report::Certificate(certify_lower_bound(&params, c, max_depth)?))
}

pub fn optimize(
    epsilon: f64,
    grid: &hypercert_core::GridSpec,
    max_depth: u32,
    quad: &QuadratureConfig,
) -> Result<Report, CliError> {
    let report = optimize_r(epsilon, grid, max_depth, quad)?;
    if report.best.is_none() {
        return Err(CliError::Check(format!(
            "no grid point could be certified ({} skipped)",
            report.skipped.len()
        )));
    }
    Ok(Report::Optimize(report))
}

pub struct BoundArgs {
    pub volume: f64,
    pub cusped: bool,
    pub prime: u64,
    pub custom: Option<(f64, f64, f64)>,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn bound(args: &BoundArgs, slack: f64, quad: &QuadratureConfig) -> Result<Report, CliError> {
    if !is_prime(args.prime) {
        return Err(CliError::Invalid(format!("--prime {} is not a prime", args.prime)));
    }
    let report = match args.custom {
        None => {
            let p = CertifyParams::published();
            let params = CertifyParams::with_slack(p.epsilon, p.r_big, slack)?;
            let cert = verify_partition(params, PUBLISHED_C)?;
            RankBoundReport::new(&params, PUBLISHED_C, &cert, quad)?
        }
        Some((epsilon, r_big, c)) => {
            let params = CertifyParams::with_slack(epsilon, r_big, slack)?;
            let cert = certify_lower_bound(&params, c, hypercert_core::certify::DEFAULT_MAX_DEPTH).map_err(|e| {
                match e {
                    Error::Uncertified { reason, .. } => Error::RankPrecondition {
                        condition: RankCondition::A,
                        detail: format!("no certificate for Φ > {c}: {reason}"),
                    },
                    other => other,
                }
            })?;
            RankBoundReport::new(&params, c, &cert, quad)?
        }
    };
    let lambdas = Lambdas::from_report(&report);
    let query = HomologyBoundQuery {
        volume: args.volume,
        compact: !args.cusped,
        prime_is_two: args.prime == 2,
    };
    let h = homology_bound(&query, &lambdas)?;
    Ok(Report::Bound(BoundReport {
        volume: args.volume,
        cusped: args.cusped,
        prime: args.prime,
        epsilon: report.epsilon,
        r_big: report.r_big,
        c: report.c,
        valence_bound: report.valence_bound,
        homology_coefficient: h.coefficient,
        homology_bound: h.bound,
        small_rank_bound: h.small_rank_bound,
        rank_coefficient: report.rank_coefficient,
        rank_bound: report.rank_bound(args.volume)?,
    }))
}

fn default_params(shape: Shape) -> Vec<f64> {
    match shape {
        Shape::Ball => vec![1.0],
        Shape::Cap => vec![1.0, 0.5],
        Shape::Lens => vec![1.2, 0.7, 1.0],
        Shape::Cone => vec![1.0, 0.5],
        Shape::Icecream => vec![0.55, 1.05],
        Shape::Phi => vec![1.3, 0.55, 1.05],
    }
}

fn shape_name(shape: Shape) -> &'static str {
    match shape {
        Shape::Ball => "ball",
        Shape::Cap => "cap",
        Shape::Lens => "lens",
        Shape::Cone => "cone",
        Shape::Icecream => "icecream",
        Shape::Phi => "phi",
    }
}

pub fn mc_check(shape: Shape, params: Option<&[f64]>, samples: u64, seed: u64) -> Result<Report, CliError> {
    let params = params.map(<[f64]>::to_vec).unwrap_or_else(|| default_params(shape));
    let arity = default_params(shape).len();
    if params.len() != arity {
        return Err(CliError::Invalid(format!(
            "shape {} takes {arity} parameters, got {}",
            shape_name(shape),
            params.len()
        )));
    }
    let u = HPoint::origin();
    let toward = HPoint::on_axis(1.0);
    let (exact, est) = match *params.as_slice() {
        [r] if shape == Shape::Ball => {
            // an off-center ball inside a larger envelope
            let region = Ball::new(HPoint::on_axis(0.25), r)?;
            let envelope = Ball::new(u, r + 0.5)?;
            (ball_volume(r)?, estimate_volume(&region, &envelope, samples, seed)?)
        }
        [r, w] if shape == Shape::Cap => {
            let region = Cap::new(u, &toward, r, w)?;
            (kappa(r, w)?, estimate_volume(&region, &Ball::new(u, r)?, samples, seed)?)
        }
        [x, y, z] if shape == Shape::Lens => {
            let first = Ball::new(u, x)?;
            let second = Ball::new(HPoint::on_axis(z), y)?;
            let exact = lens_volume(TriplePoint::new(x, y, z)?)?;
            (exact, estimate_volume(&Lens { first, second }, &first, samples, seed)?)
        }
        [a, beta] if shape == Shape::Cone => {
            let region = Cone::new(u, &toward, a, beta)?;
            (cone_volume(a, beta)?, estimate_volume(&region, &Ball::new(u, a)?, samples, seed)?)
        }
        [r, d] if shape == Shape::Icecream => {
            let region = IceCream::new(u, HPoint::on_axis(d), r)?;
            let (a, th) = (omega(r, d)?, theta(r, d)?);
            let exact = ball_volume(r)? + cone_volume(a, th)? - kappa(r, d - psi(a, th)?)?;
            (exact, estimate_volume(&region, &Ball::new(u, d + r)?, samples, seed)?)
        }
        [rho, r, d] if shape == Shape::Phi => {
            let exact = phi(TriplePoint::new(rho, r, d)?)?;
            let region = Both(IceCream::new(u, HPoint::on_axis(d), r)?, Ball::new(u, rho)?);
            (exact, estimate_volume(&region, &Ball::new(u, rho.min(d + r))?, samples, seed)?)
        }
        _ => unreachable!("arity checked above"),
    };
    Ok(Report::McCheck(McCheck {
        shape: shape_name(shape).into(),
        params,
        closed_form: exact,
        z_score: est.z_score(exact),
        within_three_sigma: est.agrees_with(exact, 3.0),
        estimate: est,
    }))
}
