//! Certified lower bounds for Φ(D) = φ(R − D, ε/2, D) on the interval
//! I = [R/2 − ε/4, ε].
//!
//! On a subinterval [D₋, D₊] every ingredient of Φ is a monotone function of
//! quantities that are themselves monotone in D, so substituting the
//! appropriate endpoint into each occurrence gives enclosures (H±, Σ±, Ψ±) and
//! one-sided bounds (W_lens⁻, W_cone⁻, Φ⁻). They are valid on "good"
//! subintervals, where three positivity margins hold. A certificate is a tiling
//! of I by good cells whose Φ⁻ all exceed a target constant.

use serde::{Deserialize, Serialize};

use crate::density::b_ratio;
use crate::error::{finite, positive, Error, Result};
use crate::format::{json_f64, json_f64x3};
use crate::hypgeo::{ball_volume_unchecked, kappa_unchecked, phi, TriplePoint};
use crate::quadrature::QuadratureConfig;
use crate::special::acosh_clamped;

/// Default allowance for binary64 roundoff in every certified comparison.
pub const DEFAULT_SLACK: f64 = 1e-9;
pub const DEFAULT_MAX_DEPTH: u32 = 40;
/// Target for the largest-certifiable-c bisection.
pub const C_SEARCH_TOL: f64 = 1e-5;

/// The published δᵢ: the partition points are D₀ = R/2 − ε/4, Dᵢ = ε − δᵢ
/// (i = 1..=46) and D₄₇ = ε.
pub const PUBLISHED_DELTAS: [&str; 46] = [
    "0.17", "0.14", "0.12", "0.10", "0.09", "0.08", "0.07", "0.06", "0.05", "0.045", "0.040", "0.035",
    "0.030", "0.025", "0.022", "0.020", "0.018", "0.016", "0.014", "0.012", "0.010", "0.0084", "0.007",
    "0.006", "0.005", "0.0042", "0.0035", "0.0030", "0.0025", "0.0022", "0.0019", "0.0016", "0.0013",
    "0.0011", "0.0009", "0.00075", "0.0006", "0.0005", "0.0004", "0.0003", "0.00025", "0.00020",
    "0.00015", "0.00010", "0.00005", "0.00002",
];

/// The constant the published partition certifies.
pub const PUBLISHED_C: f64 = 0.496;

/// Margulis parameter ε, valence radius R and the comparison slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyParams {
    pub epsilon: f64,
    #[serde(rename = "R")]
    pub r_big: f64,
    pub slack: f64,
}

impl CertifyParams {
    /// Requires `2ε < R < 5ε/2`.
    pub fn new(epsilon: f64, r_big: f64) -> Result<Self> {
        Self::with_slack(epsilon, r_big, DEFAULT_SLACK)
    }

    pub fn with_slack(epsilon: f64, r_big: f64, slack: f64) -> Result<Self> {
        positive("epsilon", epsilon)?;
        positive("R", r_big)?;
        finite("slack", slack)?;
        if slack < 0.0 {
            return Err(Error::InvalidParams(format!("slack must be non-negative, got {slack}")));
        }
        if !(2.0 * epsilon < r_big && r_big < 2.5 * epsilon) {
            return Err(Error::InvalidParams(format!(
                "need 2ε < R < 5ε/2, got ε = {epsilon}, R = {r_big}"
            )));
        }
        Ok(Self {
            epsilon,
            r_big,
            slack,
        })
    }

    /// ε = log 3, R = 2 log 3 + 0.15.
    pub fn published() -> Self {
        let eps = 3f64.ln();
        Self::new(eps, 2.0 * eps + 0.15).expect("published parameters are valid")
    }

    /// The interval I = [R/2 − ε/4, ε].
    pub fn domain(&self) -> (f64, f64) {
        (self.r_big / 2.0 - self.epsilon / 4.0, self.epsilon)
    }

    pub fn half_eps(&self) -> f64 {
        self.epsilon / 2.0
    }

    fn check_cell(&self, lo: f64, hi: f64) -> Result<()> {
        finite("D-", lo)?;
        finite("D+", hi)?;
        let (a, b) = self.domain();
        if !(a <= lo && lo < hi && hi <= b) {
            return Err(Error::InvalidParams(format!(
                "cell [{lo}, {hi}] is not a nondegenerate subinterval of [{a}, {b}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
}

impl BoundPair {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Endpoint quantities shared by all the bounds of one cell.
struct Ends {
    lo: f64,
    hi: f64,
    r: f64,
    cosh_half: f64,
    /// cosh(R − D₋), cosh(R − D₊)
    cosh_rest: (f64, f64),
    /// ω(ε/2, D₋), ω(ε/2, D₊)
    omega: (f64, f64),
    /// θ(ε/2, D₋), θ(ε/2, D₊)
    theta: (f64, f64),
}

impl Ends {
    fn new(p: &CertifyParams, lo: f64, hi: f64) -> Result<Self> {
        p.check_cell(lo, hi)?;
        let r = p.half_eps();
        let cosh_half = r.cosh();
        let om = |d: f64| acosh_clamped("omega", d.cosh() / cosh_half);
        let th = |d: f64| (r.sinh() / d.sinh()).asin();
        Ok(Self {
            lo,
            hi,
            r: p.r_big,
            cosh_half,
            cosh_rest: ((p.r_big - lo).cosh(), (p.r_big - hi).cosh()),
            omega: (om(lo)?, om(hi)?),
            theta: (th(lo), th(hi)),
        })
    }

    fn h_bounds(&self) -> BoundPair {
        let (cl, ch) = (self.lo.cosh(), self.hi.cosh());
        let (rl, rh) = self.cosh_rest;
        let c = self.cosh_half;
        let lower = (2.0 * rh * c * cl - (rl * rl + c * c + ch * ch) + 1.0) / self.hi.sinh().powi(2);
        let upper = (2.0 * rl * c * ch - (rh * rh + c * c + cl * cl) + 1.0) / self.lo.sinh().powi(2);
        BoundPair { lower, upper }
    }

    fn margins(&self, h: &BoundPair) -> [f64; 3] {
        let (om_lo, om_hi) = self.omega;
        [
            h.lower + 1.0,
            (self.r - self.hi).sinh().powi(2) - h.upper,
            om_lo.sinh() - om_hi.sinh() * self.theta.1.sin(),
        ]
    }

    fn sigma_bounds(&self, h: &BoundPair) -> Result<BoundPair> {
        let (rl, rh) = self.cosh_rest;
        Ok(BoundPair {
            lower: acosh_clamped("sigma_bounds", rh / (1.0 + h.upper).sqrt())?,
            upper: acosh_clamped("sigma_bounds", rl / (1.0 + h.lower).sqrt())?,
        })
    }

    fn psi_bounds(&self) -> Result<BoundPair> {
        let (om_lo, om_hi) = self.omega;
        let (th_lo, th_hi) = self.theta;
        let q = |om: f64, th: f64| (1.0 + (om.sinh() * th.sin()).powi(2)).sqrt();
        Ok(BoundPair {
            lower: acosh_clamped("psi_bounds", om_lo.cosh() / q(om_hi, th_hi))?,
            upper: acosh_clamped("psi_bounds", om_hi.cosh() / q(om_lo, th_lo))?,
        })
    }

    fn wlens_lower(&self, half_eps: f64, sigma: &BoundPair) -> f64 {
        kappa_unchecked(self.r - self.hi, sigma.upper) + kappa_unchecked(half_eps, self.hi - sigma.lower)
    }

    fn wcone_lower(&self, psi: &BoundPair) -> f64 {
        let (om_lo, om_hi) = self.omega;
        0.5 * ball_volume_unchecked(om_lo) * (1.0 - self.theta.0.cos()) - kappa_unchecked(om_hi, psi.lower)
    }
}

/// All bounds for one subinterval [D₋, D₊], whether or not it is good.
/// Quantities that are undefined on a non-good cell are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubintervalCertificate {
    #[serde(with = "json_f64")]
    pub d_lo: f64,
    #[serde(with = "json_f64")]
    pub d_hi: f64,
    #[serde(with = "json_f64")]
    pub h_lo: f64,
    #[serde(with = "json_f64")]
    pub h_hi: f64,
    #[serde(with = "json_f64")]
    pub sigma_lo: f64,
    #[serde(with = "json_f64")]
    pub sigma_hi: f64,
    #[serde(with = "json_f64")]
    pub psi_lo: f64,
    #[serde(with = "json_f64")]
    pub psi_hi: f64,
    #[serde(with = "json_f64")]
    pub wlens_lo: f64,
    #[serde(with = "json_f64")]
    pub wcone_lo: f64,
    #[serde(with = "json_f64")]
    pub phi_lo: f64,
    pub good: bool,
    /// H⁻ + 1, sinh²(R − D₊) − H⁺, sinh ω(ε/2, D₋) − sinh ω(ε/2, D₊)·sin θ(ε/2, D₊).
    #[serde(with = "json_f64x3")]
    pub margins: [f64; 3],
}

impl SubintervalCertificate {
    pub fn width(&self) -> f64 {
        self.d_hi - self.d_lo
    }
}

fn margins_ok(m: &[f64; 3], slack: f64) -> bool {
    m.iter().all(|&x| x - slack > 0.0)
}

/// (H⁻, H⁺) with H⁻ ≤ H(D) ≤ H⁺ on the cell, H(D) = η(R − D, ε/2, D).
pub fn h_bounds(params: &CertifyParams, lo: f64, hi: f64) -> Result<BoundPair> {
    Ok(Ends::new(params, lo, hi)?.h_bounds())
}

/// The three goodness margins of a cell.
pub fn goodness_margins(params: &CertifyParams, lo: f64, hi: f64) -> Result<[f64; 3]> {
    let e = Ends::new(params, lo, hi)?;
    Ok(e.margins(&e.h_bounds()))
}

/// (Σ⁻, Σ⁺) enclosing Σ(D) = σ(R − D, ε/2, D). Needs margins (1) and (2).
pub fn sigma_bounds(params: &CertifyParams, lo: f64, hi: f64) -> Result<BoundPair> {
    let e = Ends::new(params, lo, hi)?;
    let h = e.h_bounds();
    let m = e.margins(&h);
    if !(m[0] > 0.0 && m[1] > 0.0) {
        return Err(Error::domain("sigma_bounds", format!("goodness conditions (1)-(2) fail: {m:?}")));
    }
    e.sigma_bounds(&h)
}

/// (Ψ⁻, Ψ⁺) enclosing Ψ(D) = ψ(ω(ε/2, D), θ(ε/2, D)). Needs margin (3).
pub fn psi_bounds(params: &CertifyParams, lo: f64, hi: f64) -> Result<BoundPair> {
    let e = Ends::new(params, lo, hi)?;
    let m = e.margins(&e.h_bounds());
    if !(m[2] > 0.0) {
        return Err(Error::domain("psi_bounds", format!("goodness condition (3) fails: {}", m[2])));
    }
    e.psi_bounds()
}

/// W_lens⁻ ≤ V_lens(R − D, ε/2, D) on the cell.
pub fn wlens_lower(params: &CertifyParams, lo: f64, hi: f64) -> Result<f64> {
    let s = sigma_bounds(params, lo, hi)?;
    Ok(Ends::new(params, lo, hi)?.wlens_lower(params.half_eps(), &s))
}

/// W_cone⁻ ≤ V_cone(ω(ε/2, D), θ(ε/2, D)) on the cell.
pub fn wcone_lower(params: &CertifyParams, lo: f64, hi: f64) -> Result<f64> {
    let p = psi_bounds(params, lo, hi)?;
    Ok(Ends::new(params, lo, hi)?.wcone_lower(&p))
}

/// Evaluates every bound of the cell. Errors only when the cell is not a
/// subinterval of I; a cell that fails the goodness test comes back with
/// `good == false` and its margins.
pub fn phi_lower(params: &CertifyParams, lo: f64, hi: f64) -> Result<SubintervalCertificate> {
    let e = Ends::new(params, lo, hi)?;
    let h = e.h_bounds();
    let margins = e.margins(&h);
    let mut cert = SubintervalCertificate {
        d_lo: lo,
        d_hi: hi,
        h_lo: h.lower,
        h_hi: h.upper,
        sigma_lo: f64::NAN,
        sigma_hi: f64::NAN,
        psi_lo: f64::NAN,
        psi_hi: f64::NAN,
        wlens_lo: f64::NAN,
        wcone_lo: f64::NAN,
        phi_lo: f64::NAN,
        good: false,
        margins,
    };
    if margins[0] > 0.0 && margins[1] > 0.0 {
        if let Ok(s) = e.sigma_bounds(&h) {
            cert.sigma_lo = s.lower;
            cert.sigma_hi = s.upper;
            cert.wlens_lo = e.wlens_lower(params.half_eps(), &s);
        }
    }
    if margins[2] > 0.0 {
        if let Ok(p) = e.psi_bounds() {
            cert.psi_lo = p.lower;
            cert.psi_hi = p.upper;
            cert.wcone_lo = e.wcone_lower(&p);
        }
    }
    let half = params.half_eps();
    cert.phi_lo = cert.wlens_lo + cert.wcone_lo - kappa_unchecked(half, lo - cert.psi_hi);
    cert.good = margins_ok(&margins, params.slack) && cert.phi_lo.is_finite();
    Ok(cert)
}

/// Φ(D) = φ(R − D, ε/2, D). At the left end of the domain the point lies on
/// the boundary of 𝒱 and may be rejected after rounding.
pub fn phi_at(params: &CertifyParams, d: f64) -> Result<f64> {
    phi(TriplePoint::new(params.r_big - d, params.half_eps(), d)?)
}

/// A tiling of I by good cells; `certified_c` is the smallest Φ⁻.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "CertificateDoc", try_from = "CertificateDoc")]
pub struct PartitionCertificate {
    pub params: CertifyParams,
    pub cells: Vec<SubintervalCertificate>,
    pub certified_c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct CertificateDoc {
    #[serde(with = "json_f64")]
    epsilon: f64,
    #[serde(rename = "R", with = "json_f64")]
    r_big: f64,
    #[serde(with = "json_f64")]
    slack: f64,
    cells: Vec<SubintervalCertificate>,
    #[serde(with = "json_f64")]
    certified_c: f64,
    cell_count: usize,
}

impl From<PartitionCertificate> for CertificateDoc {
    fn from(c: PartitionCertificate) -> Self {
        Self {
            epsilon: c.params.epsilon,
            r_big: c.params.r_big,
            slack: c.params.slack,
            cell_count: c.cells.len(),
            cells: c.cells,
            certified_c: c.certified_c,
        }
    }
}

impl TryFrom<CertificateDoc> for PartitionCertificate {
    type Error = Error;

    fn try_from(d: CertificateDoc) -> Result<Self> {
        if d.cell_count != d.cells.len() {
            return Err(Error::InvalidParams(format!(
                "cellCount {} does not match {} cells",
                d.cell_count,
                d.cells.len()
            )));
        }
        let cert = Self {
            params: CertifyParams::with_slack(d.epsilon, d.r_big, d.slack)?,
            cells: d.cells,
            certified_c: d.certified_c,
        };
        cert.check_integrity()?;
        Ok(cert)
    }
}

impl PartitionCertificate {
    fn assemble(params: CertifyParams, cells: Vec<SubintervalCertificate>) -> Self {
        let certified_c = cells.iter().map(|c| c.phi_lo).fold(f64::INFINITY, f64::min);
        Self {
            params,
            cells,
            certified_c,
        }
    }

    /// Exact tiling of I, all cells good, `certified_c` equal to the minimum Φ⁻.
    pub fn check_integrity(&self) -> Result<()> {
        let (a, b) = self.params.domain();
        let first = self.cells.first().map(|c| c.d_lo);
        let last = self.cells.last().map(|c| c.d_hi);
        if first != Some(a) || last != Some(b) {
            return Err(Error::InvalidParams(format!(
                "cells span {first:?}..{last:?}, expected [{a}, {b}]"
            )));
        }
        for (i, w) in self.cells.windows(2).enumerate() {
            if w[0].d_hi != w[1].d_lo {
                return Err(Error::InvalidParams(format!("gap between cells {} and {}", i + 1, i + 2)));
            }
        }
        if let Some(i) = self.cells.iter().position(|c| !c.good) {
            return Err(Error::InvalidParams(format!("cell {} is not good", i + 1)));
        }
        let min = self.cells.iter().map(|c| c.phi_lo).fold(f64::INFINITY, f64::min);
        if min != self.certified_c {
            return Err(Error::InvalidParams(format!(
                "certifiedC {} differs from min phiLo {min}",
                self.certified_c
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// 1-based index of the cell with the smallest Φ⁻ (first on ties).
    pub fn argmin_phi(&self) -> usize {
        argmin(self.cells.iter().map(|c| c.phi_lo)) + 1
    }

    /// Smallest value of margin `k` (0, 1 or 2) and its 1-based cell index.
    pub fn min_margin(&self, k: usize) -> (f64, usize) {
        let i = argmin(self.cells.iter().map(|c| c.margins[k]));
        (self.cells[i].margins[k], i + 1)
    }

    /// True when Φ > c on I is proved with the slack allowance.
    pub fn proves(&self, c: f64) -> bool {
        self.check_integrity().is_ok() && self.certified_c - self.params.slack > c
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization cannot fail")
    }
}

fn argmin(it: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, v) in it.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// The 48 partition points of the published 47-cell partition.
pub fn published_partition_points(params: &CertifyParams) -> Vec<f64> {
    let (d0, eps) = params.domain();
    let mut pts = Vec::with_capacity(48);
    pts.push(d0);
    pts.extend(
        PUBLISHED_DELTAS
            .iter()
            .map(|s| eps - s.parse::<f64>().expect("published deltas are decimal literals")),
    );
    pts.push(eps);
    pts
}

/// Rebuilds the published partition at ε = log 3, R = 2 log 3 + 0.15 and
/// checks every cell is good with Φ⁻ > 0.496.
pub fn verify_published_partition() -> Result<PartitionCertificate> {
    verify_partition(CertifyParams::published(), PUBLISHED_C)
}

/// The published partition points checked under `params`; used to rerun the
/// published partition with a different slack.
pub fn verify_partition(params: CertifyParams, c: f64) -> Result<PartitionCertificate> {
    let pts = published_partition_points(&params);
    let mut cells = Vec::with_capacity(pts.len() - 1);
    for (i, w) in pts.windows(2).enumerate() {
        let cell = phi_lower(&params, w[0], w[1])?;
        let fail = |reason: String| Error::PartitionCell {
            index: i + 1,
            reason,
            cell: Box::new(cell),
        };
        if !cell.good {
            return Err(fail(format!("not good, margins {:?}", cell.margins)));
        }
        if !(cell.phi_lo - params.slack > c) {
            return Err(fail(format!("phiLo {} does not exceed {c}", cell.phi_lo)));
        }
        cells.push(cell);
    }
    Ok(PartitionCertificate::assemble(params, cells))
}

/// Adaptive bisection: splits every cell that is not good or whose Φ⁻ does not
/// clear `target_c` until the whole of I is certified. Fails with a witness
/// cell when the depth budget runs out or when Φ itself is at most `target_c`
/// somewhere (no refinement can then succeed).
pub fn certify_lower_bound(params: &CertifyParams, target_c: f64, max_depth: u32) -> Result<PartitionCertificate> {
    finite("targetC", target_c)?;
    let (a, b) = params.domain();
    let cells = refine(params, a, b, target_c, 0, max_depth)?;
    Ok(PartitionCertificate::assemble(*params, cells))
}

fn refine(
    params: &CertifyParams,
    lo: f64,
    hi: f64,
    target: f64,
    depth: u32,
    max_depth: u32,
) -> Result<Vec<SubintervalCertificate>> {
    let cell = phi_lower(params, lo, hi)?;
    if cell.good && cell.phi_lo - params.slack > target {
        return Ok(vec![cell]);
    }
    let mid = 0.5 * (lo + hi);
    let uncertified = |reason: String| Error::Uncertified {
        target,
        reason,
        witness: Box::new(cell),
    };
    let value = phi_at(params, mid)?;
    if value <= target {
        return Err(uncertified(format!("Φ({mid}) = {value} is not above the target")));
    }
    if depth >= max_depth || !(lo < mid && mid < hi) {
        return Err(uncertified(format!("depth limit {max_depth} reached")));
    }
    let (left, right) = rayon::join(
        || refine(params, lo, mid, target, depth + 1, max_depth),
        || refine(params, mid, hi, target, depth + 1, max_depth),
    );
    let mut cells = left?;
    cells.extend(right?);
    Ok(cells)
}

/// Largest c (to within `C_SEARCH_TOL`) for which `certify_lower_bound`
/// succeeds, with its certificate.
pub fn largest_certifiable_c(params: &CertifyParams, max_depth: u32) -> Result<(f64, PartitionCertificate)> {
    // min of Φ on a grid bounds every certifiable c from above
    let (a, b) = params.domain();
    let n = 256;
    let mut hi = f64::INFINITY;
    // midpoints only: at D = R/2 − ε/4 the two balls are tangent and η = 0
    // can round to a negative value
    for i in 0..n {
        let d = a + (b - a) * (i as f64 + 0.5) / n as f64;
        hi = hi.min(phi_at(params, d)?);
    }
    let mut lo = 0.0;
    let mut best = certify_lower_bound(params, lo, max_depth)?;
    while hi - lo > C_SEARCH_TOL {
        let mid = 0.5 * (lo + hi);
        match certify_lower_bound(params, mid, max_depth) {
            Ok(cert) => {
                lo = mid;
                best = cert;
            }
            Err(Error::Uncertified { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok((lo, best))
}

/// Candidate values of R: `points` evenly spaced values in `[r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn single(r: f64) -> Self {
        Self {
            r_min: r,
            r_max: r,
            points: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.r_min],
            n => (0..n)
                .map(|i| self.r_min + (self.r_max - self.r_min) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GridPoint {
    #[serde(rename = "R", with = "json_f64")]
    pub r_big: f64,
    /// The constant used in the valence bound: certified Φ⁻ minus slack.
    #[serde(with = "json_f64")]
    pub certified_c: f64,
    pub valence_bound: u64,
    pub cell_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizeReport {
    #[serde(with = "json_f64")]
    pub epsilon: f64,
    #[serde(with = "json_f64")]
    pub b_half_eps: f64,
    pub points: Vec<GridPoint>,
    pub skipped: Vec<SkippedPoint>,
    pub best: Option<GridPoint>,
}

/// A grid R for which no c could be certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    #[serde(rename = "R", with = "json_f64")]
    pub r_big: f64,
    pub reason: String,
}

/// ⌊(B(R) − b(ε/2))/c⌋.
pub fn valence_bound(r_big: f64, b_half_eps: f64, c: f64) -> u64 {
    ((ball_volume_unchecked(r_big) - b_half_eps) / c).floor().max(0.0) as u64
}

/// For every R on the grid find the largest certifiable c and the valence
/// bound it gives; report the R with the smallest bound (smaller R on ties).
pub fn optimize_r(epsilon: f64, grid: &GridSpec, max_depth: u32, quad: &QuadratureConfig) -> Result<OptimizeReport> {
    positive("epsilon", epsilon)?;
    let values = grid.values();
    if values.is_empty() {
        return Err(Error::InvalidParams("empty R grid".into()));
    }
    if let Some(r) = values.iter().find(|&&r| !(2.0 * epsilon < r && r < 2.5 * epsilon)) {
        return Err(Error::InvalidParams(format!(
            "grid value R = {r} outside (2ε, 5ε/2) = ({}, {})",
            2.0 * epsilon,
            2.5 * epsilon
        )));
    }
    let b_half = b_ratio(epsilon / 2.0, quad)?;
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for r in values {
        let outcome = CertifyParams::new(epsilon, r).and_then(|p| largest_certifiable_c(&p, max_depth).map(|x| (p, x)));
        match outcome {
            Ok((p, (_, cert))) => {
                let c = cert.certified_c - p.slack;
                points.push(GridPoint {
                    r_big: r,
                    certified_c: c,
                    valence_bound: valence_bound(r, b_half, c),
                    cell_count: cert.cell_count(),
                });
            }
            Err(e) => {
                log::warn!("skipping R = {r}: {e}");
                skipped.push(SkippedPoint { r_big: r, reason: e.to_string() });
            }
        }
    }
    let mut best: Option<GridPoint> = None;
    for p in &points {
        if best.as_ref().is_none_or(|b| p.valence_bound < b.valence_bound) {
            best = Some(p.clone());
        }
    }
    Ok(OptimizeReport {
        epsilon,
        b_half_eps: b_half,
        points,
        skipped,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(CertifyParams::new(1.0, 2.0).is_err());
        assert!(CertifyParams::new(1.0, 2.5).is_err());
        assert!(CertifyParams::new(1.0, 2.2).is_ok());
        assert!(CertifyParams::new(-1.0, 2.2).is_err());
        assert!(CertifyParams::with_slack(1.0, 2.2, -1.0).is_err());
        let p = CertifyParams::published();
        let (a, b) = p.domain();
        assert!((a - (0.75 * 3f64.ln() + 0.075)).abs() < 1e-15);
        assert_eq!(b, 3f64.ln());
    }

    #[test]
    fn cells_outside_domain_rejected() {
        let p = CertifyParams::published();
        let (a, b) = p.domain();
        assert!(h_bounds(&p, a - 0.01, b).is_err());
        assert!(h_bounds(&p, a, b + 0.01).is_err());
        assert!(h_bounds(&p, 1.0, 1.0).is_err());
        assert!(phi_lower(&p, 1.05, 1.0).is_err());
    }

    #[test]
    fn h_bounds_collapse_on_narrow_cells() {
        let p = CertifyParams::published();
        let d = 1.0;
        let h = crate::hypgeo::eta(TriplePoint::new(p.r_big - d, p.half_eps(), d).unwrap());
        let mut prev = f64::INFINITY;
        for k in 2..9 {
            let w = 10f64.powi(-k);
            let b = h_bounds(&p, d, d + w).unwrap();
            assert!(b.contains(h));
            assert!(b.width() < prev);
            prev = b.width();
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn sigma_width_shrinks() {
        let p = CertifyParams::published();
        let wide = sigma_bounds(&p, 1.0, 1.01).unwrap();
        let narrow = sigma_bounds(&p, 1.0, 1.0001).unwrap();
        assert!(narrow.width() < wide.width() / 50.0);
    }

    #[test]
    fn published_partition_shape() {
        let p = CertifyParams::published();
        let pts = published_partition_points(&p);
        assert_eq!(pts.len(), 48);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[1], 3f64.ln() - 0.17);
        assert_eq!(pts[46], 3f64.ln() - 0.00002);
    }

    #[test]
    fn published_partition_verifies() {
        let cert = verify_published_partition().unwrap();
        assert_eq!(cert.cell_count(), 47);
        assert!(cert.check_integrity().is_ok());
        assert_eq!(cert.argmin_phi(), 45);
        assert!((0.49603..0.49604).contains(&cert.certified_c));
        assert!(cert.proves(PUBLISHED_C));
    }

    #[test]
    fn verification_fails_loudly_for_unreachable_constant() {
        match verify_partition(CertifyParams::published(), 0.5) {
            Err(Error::PartitionCell { index, .. }) => assert!(index >= 1),
            other => panic!("expected a failing cell, got {other:?}"),
        }
    }

    #[test]
    fn non_good_cell_is_reported_not_thrown() {
        // a single cell spanning the whole interval is too coarse
        let p = CertifyParams::published();
        let (a, b) = p.domain();
        let cell = phi_lower(&p, a, b).unwrap();
        assert_eq!(cell.good, margins_ok(&cell.margins, p.slack) && cell.phi_lo.is_finite());
    }

    #[test]
    fn adaptive_certifies_published_target() {
        let p = CertifyParams::published();
        let cert = certify_lower_bound(&p, PUBLISHED_C, DEFAULT_MAX_DEPTH).unwrap();
        assert!(cert.check_integrity().is_ok());
        assert!(cert.certified_c - p.slack > PUBLISHED_C);
        assert!(cert.cell_count() > 1);
    }

    #[test]
    fn adaptive_fails_with_witness_above_ball_volume() {
        let p = CertifyParams::published();
        match certify_lower_bound(&p, 10.0, DEFAULT_MAX_DEPTH) {
            Err(Error::Uncertified { witness, target, .. }) => {
                assert_eq!(target, 10.0);
                assert!(witness.d_lo < witness.d_hi);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn depth_exhaustion_reports_worst_cell() {
        let p = CertifyParams::published();
        match certify_lower_bound(&p, PUBLISHED_C, 1) {
            Err(Error::Uncertified { reason, .. }) => assert!(reason.contains("depth")),
            other => panic!("expected depth failure, got {other:?}"),
        }
    }

    #[test]
    fn certificate_is_deterministic_across_thread_counts() {
        let p = CertifyParams::published();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| certify_lower_bound(&p, PUBLISHED_C, DEFAULT_MAX_DEPTH).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn json_schema_and_round_trip() {
        let cert = verify_published_partition().unwrap();
        let json = cert.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["epsilon", "R", "slack", "cells", "certifiedC", "cellCount"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["cellCount"], 47);
        let cell = &v["cells"][0];
        for key in [
            "dLo", "dHi", "hLo", "hHi", "sigmaLo", "sigmaHi", "psiLo", "psiHi", "wlensLo", "wconeLo", "phiLo",
            "good", "margins",
        ] {
            assert!(cell.get(key).is_some(), "missing cell field {key}");
        }
        assert!(json.contains("\"certifiedC\": 0.4960303734052"));
        let back: PartitionCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn tampered_certificate_rejected() {
        let cert = verify_published_partition().unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&cert.to_json()).unwrap();
        v["cellCount"] = 46.into();
        assert!(serde_json::from_value::<PartitionCertificate>(v).is_err());
    }

    #[test]
    fn single_point_grid_matches_direct_search() {
        let p = CertifyParams::published();
        let quad = QuadratureConfig::default();
        let report = optimize_r(p.epsilon, &GridSpec::single(p.r_big), DEFAULT_MAX_DEPTH, &quad).unwrap();
        let (_, cert) = largest_certifiable_c(&p, DEFAULT_MAX_DEPTH).unwrap();
        let best = report.best.unwrap();
        assert_eq!(best.certified_c, cert.certified_c - p.slack);
        assert_eq!(best.valence_bound, 314);
    }

    #[test]
    fn grid_outside_range_rejected() {
        let eps = 3f64.ln();
        let quad = QuadratureConfig::default();
        let grid = GridSpec {
            r_min: 2.0 * eps,
            r_max: 2.4 * eps,
            points: 3,
        };
        assert!(optimize_r(eps, &grid, 10, &quad).is_err());
    }
}
