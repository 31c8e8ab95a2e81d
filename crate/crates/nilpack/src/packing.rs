//! Geodesic ball packings over the prism tilings: optimal radius,
//! density, kissing numbers, the balanced parameter, volume-targeted
//! rows and parameter sweeps.
//!
//! Balls sit on the orbit of the origin (the vertex fibre midpoints of
//! the cells). Three constraints bound the radius: the base circumradius
//! d(O, A1) = x, half the screw step d(O, tau O)/2, and half the
//! distance to the nearest rotated neighbour d(O, (ab) O)/2. The screw
//! term grows like x^2 and the neighbour term like x, so small cells are
//! screw-limited and large cells neighbour-limited; the density peaks
//! where the two agree (the balanced parameter).

use rayon::prelude::*;

use crate::error::NilError;
use crate::geodesics::{ball_volume, distance};
use crate::nil::{NilIsometry, NilPoint};
use crate::tilings::PrismTiling;

/// Default absolute tolerance for the balance root; callers may override
/// (the CLI wires the NILPACK_TOL environment variable through).
pub const DEFAULT_BALANCE_TOL: f64 = 1e-9;

/// Relative tolerance on the matched cell volume in
/// [`match_table_row`].
pub const VOLUME_MATCH_REL_TOL: f64 = 1e-6;

/// Shell half-width used when counting touching balls at radius r:
/// orbit points with |d - 2r| below this count as touching.
pub fn kissing_shell_tol(r: f64) -> f64 {
    1e-4 * (1.0 + 2.0 * r)
}

/// The three radius constraints. `None` marks a term whose distance
/// exceeds the solver cap (and is therefore larger than pi after
/// halving, or 2*pi for the vertex term).
#[derive(Debug, Clone, Copy)]
pub struct RadiusTerms {
    /// d(O, A1) = x.
    pub vertex: Option<f64>,
    /// d(O, tau O) / 2.
    pub tau_half: Option<f64>,
    /// d(O, (ab) O) / 2.
    pub ab_half: Option<f64>,
}

impl RadiusTerms {
    /// The optimal packing radius: the smallest of the three terms.
    ///
    /// A capped term is known to exceed pi (half the solver cap), so the
    /// minimum is still certified whenever some computed term is <= pi;
    /// otherwise the radius itself is beyond what the solver can bound.
    pub fn r_opt(&self) -> Result<f64, NilError> {
        let known = [self.vertex, self.tau_half, self.ab_half];
        let min_known = known
            .iter()
            .flatten()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        let any_capped = known.iter().any(|t| t.is_none());
        if min_known.is_infinite() || (any_capped && min_known > std::f64::consts::PI) {
            return Err(NilError::BeyondCap);
        }
        Ok(min_known)
    }
}

/// Full packing data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackingResult {
    pub p: u32,
    pub q: u32,
    pub x: f64,
    pub r_opt: f64,
    pub prism_volume: f64,
    pub density: f64,
    pub kissing: u32,
}

/// The balanced tiling parameter and the packing it carries.
#[derive(Debug, Clone, Copy)]
pub struct BalancedSolution {
    pub x_star: f64,
    /// |d(O, (ab) O) - d(O, tau O)| at x_star.
    pub residual: f64,
    pub result: PackingResult,
}

/// One entry of a parameter sweep; per-point failures are recorded
/// inline rather than aborting the sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub x: f64,
    pub result: Result<PackingResult, NilError>,
}

fn dist_or_cap(target: NilPoint) -> Result<Option<f64>, NilError> {
    match distance(NilPoint::ORIGIN, target) {
        Ok(d) => Ok(Some(d.length)),
        Err(NilError::BeyondCap) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Computes the three radius constraints for a tiling.
pub fn radius_terms(tiling: &PrismTiling) -> Result<RadiusTerms, NilError> {
    let origin = NilPoint::ORIGIN;
    let vertex = dist_or_cap(tiling.base_vertices()[0])?;
    let tau_half = dist_or_cap(tiling.tau().apply(origin))?.map(|d| 0.5 * d);
    let ab = tiling.gen_a().then(tiling.gen_b()).apply(origin);
    let ab_half = dist_or_cap(ab)?.map(|d| 0.5 * d);
    Ok(RadiusTerms {
        vertex,
        tau_half,
        ab_half,
    })
}

/// Number of orbit balls touching the ball at the origin when all have
/// radius `r`: orbit points at distance 2r (within the shell tolerance).
///
/// The orbit is enumerated breadth-first and the depth increased until
/// the count stabilizes, so far-away word representatives of nearby
/// points cannot be missed.
pub fn kissing_number(tiling: &PrismTiling, r: f64) -> Result<u32, NilError> {
    Ok(touching_isometries(tiling, r)?.len() as u32)
}

/// Group elements carrying the origin onto the shell of touching balls,
/// enumerated with the same stabilizing depth search as [`kissing_number`].
pub(crate) fn touching_isometries(
    tiling: &PrismTiling,
    r: f64,
) -> Result<Vec<NilIsometry>, NilError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(NilError::domain(format!("kissing radius must be positive; got {r}")));
    }
    let tol = kissing_shell_tol(r);
    if 2.0 * r + tol >= crate::geodesics::MAX_SPHERE_RADIUS {
        return Err(NilError::BeyondCap);
    }
    let mut prev = collect_touching(tiling, r, 6)?;
    for depth in 7..=9 {
        let cur = collect_touching(tiling, r, depth)?;
        if cur.len() == prev.len() {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

fn collect_touching(
    tiling: &PrismTiling,
    r: f64,
    depth: u32,
) -> Result<Vec<NilIsometry>, NilError> {
    let tol = kissing_shell_tol(r);
    let shell = 2.0 * r;
    let mut touching = Vec::new();
    for (point, isometry, _) in tiling.orbit_raw(depth) {
        let lin = point.to_linearized();
        let planar = lin.a.hypot(lin.b);
        // cheap two-sided bounds: planar <= d <= sqrt(planar^2 + height^2)
        if planar > shell + tol {
            continue;
        }
        if planar.hypot(lin.c) < shell - tol {
            continue;
        }
        match distance(NilPoint::ORIGIN, point) {
            Ok(d) => {
                if (d.length - shell).abs() <= tol {
                    touching.push(isometry);
                }
            }
            Err(NilError::BeyondCap) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(touching)
}

/// Packing data for one tiling: optimal radius, cell volume, density and
/// kissing number.
pub fn packing_density(tiling: &PrismTiling) -> Result<PackingResult, NilError> {
    let r_opt = radius_terms(tiling)?.r_opt()?;
    let prism_volume = tiling.prism_volume();
    let density = ball_volume(r_opt)? / prism_volume;
    let kissing = kissing_number(tiling, r_opt)?;
    Ok(PackingResult {
        p: tiling.p(),
        q: tiling.q(),
        x: tiling.x(),
        r_opt,
        prism_volume,
        density,
        kissing,
    })
}

/// Sign of d_ab - d_tau at parameter x, when determinable. The screw
/// distance dominates for large x and the neighbour distance for small
/// x, so a capped term still fixes the sign as long as the other is
/// computable.
fn balance_sign(p: u32, q: u32, x: f64) -> Result<Option<f64>, NilError> {
    let t = PrismTiling::build(p, q, x)?;
    let terms = radius_terms(&t)?;
    match (terms.ab_half, terms.tau_half) {
        (Some(ab), Some(tau)) => Ok(Some(2.0 * (ab - tau))),
        (Some(_), None) => Ok(Some(-1.0)),
        (None, Some(_)) => Ok(Some(1.0)),
        (None, None) => Ok(None),
    }
}

/// Solves d(O, (ab) O) = d(O, tau O) for the tiling parameter and
/// returns the packing there. `tol` is the absolute tolerance on the
/// distance mismatch (default [`DEFAULT_BALANCE_TOL`]).
pub fn solve_balanced(p: u32, q: u32, tol: Option<f64>) -> Result<BalancedSolution, NilError> {
    let tol = tol.unwrap_or(DEFAULT_BALANCE_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NilError::domain(format!("tolerance must be positive; got {tol}")));
    }
    const LO: f64 = 0.05;
    const HI: f64 = 10.0;
    const SCAN: usize = 200;

    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=SCAN {
        let x = LO + (HI - LO) * i as f64 / SCAN as f64;
        if let Some(s) = balance_sign(p, q, x)? {
            if let Some((px, ps)) = prev {
                if ps > 0.0 && s <= 0.0 {
                    bracket = Some((px, x));
                    break;
                }
            }
            prev = Some((x, s));
        }
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| NilError::solver("no balance bracket in [0.05, 10]".to_string()))?;

    let mut mid = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        match balance_sign(p, q, mid)? {
            Some(s) => {
                residual = s.abs();
                if residual <= tol {
                    break;
                }
                if s > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => return Err(NilError::solver("balance sign lost inside bracket".to_string())),
        }
        if hi - lo <= 1e-14 * (1.0 + mid) {
            break;
        }
    }
    if residual > tol {
        return Err(NilError::solver(format!(
            "balance residual {residual:.3e} above tolerance {tol:.3e}"
        )));
    }
    let tiling = PrismTiling::build(p, q, mid)?;
    Ok(BalancedSolution {
        x_star: mid,
        residual,
        result: packing_density(&tiling)?,
    })
}

/// Finds the tiling whose cell volume matches `target_volume` (the cell
/// volume is strictly increasing in x) and returns its packing.
pub fn match_table_row(p: u32, q: u32, target_volume: f64) -> Result<PackingResult, NilError> {
    if !(target_volume.is_finite() && target_volume > 0.0) {
        return Err(NilError::domain(format!(
            "target volume must be positive; got {target_volume}"
        )));
    }
    let volume_at =
        |x: f64| -> Result<f64, NilError> { Ok(PrismTiling::build(p, q, x)?.prism_volume()) };

    let mut lo = 1e-3;
    if volume_at(lo)? > target_volume {
        return Err(NilError::domain(format!(
            "target volume {target_volume} below the smallest searched cell"
        )));
    }
    let mut hi = lo;
    loop {
        hi *= 1.5;
        if volume_at(hi)? >= target_volume {
            break;
        }
        if hi > 1e3 {
            return Err(NilError::solver("target volume unreachable"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = volume_at(mid)?;
        if ((v - target_volume) / target_volume).abs() <= VOLUME_MATCH_REL_TOL {
            lo = mid;
            hi = mid;
            break;
        }
        if v < target_volume {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid) {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    packing_density(&PrismTiling::build(p, q, x)?)
}

/// Evaluates the packing along an inclusive uniform grid of tiling
/// parameters. Geometric failures at single grid points (for example a
/// radius term beyond the solver cap) are recorded in the corresponding
/// entry instead of failing the sweep.
pub fn sweep(p: u32, q: u32, lo: f64, hi: f64, steps: usize) -> Result<Vec<SweepPoint>, NilError> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(NilError::domain(format!(
            "sweep range must satisfy 0 < lo <= hi; got {lo}..{hi}"
        )));
    }
    if steps < 2 {
        return Err(NilError::domain(format!("sweep needs at least 2 steps; got {steps}")));
    }
    // existence and argument errors should fail fast, not per point
    PrismTiling::build(p, q, lo)?;
    let grid: Vec<f64> = (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect();
    Ok(grid
        .into_par_iter()
        .map(|x| SweepPoint {
            x,
            result: PrismTiling::build(p, q, x).and_then(|t| packing_density(&t)),
        })
        .collect())
}
