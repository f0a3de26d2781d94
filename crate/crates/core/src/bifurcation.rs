//! One- and two-parameter bifurcation structure of the equilibrium set.
//!
//! The equilibrium condition can be solved for either parameter in closed
//! form:
//!
//! ```text
//! r(P)   = pi(P) - eps * pi'(P) (1-P)            (sweep in r)
//! eps(P) = (pi(P) - r) / (pi'(P) (1-P))          (sweep in eps, P < p_star)
//! ```
//!
//! so a one-parameter diagram is the rotated graph of the respective
//! expression, cut off at the parameter box. Sweeps emit both the
//! closed-form branch and an independent per-grid-value solver pass, and
//! refine equilibrium-count transitions into saddle-node events. The locus
//! of tangencies in the `(eps, r)` plane is available in closed form from
//! the linear system `{f = 0, f' = 0}`.

use rayon::prelude::*;

use crate::curve::PayoffCurve;
use crate::dynamics::{rhs_dp_unchecked, ModelParams};
use crate::error::Error;
use crate::solver::{find_all, SolverOptions, Stability};

/// Which model parameter a diagram sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    R,
    Eps,
}

impl Axis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Axis::R => "r",
            Axis::Eps => "eps",
        }
    }

    fn params(&self, fixed: f64, swept: f64) -> ModelParams {
        match self {
            Axis::R => ModelParams { r: swept, eps: fixed },
            Axis::Eps => ModelParams { r: fixed, eps: swept },
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Solver-located equilibrium at one swept parameter value.
#[derive(Clone, Copy, Debug)]
pub struct BranchPoint {
    pub param: f64,
    pub p: f64,
    pub classification: Stability,
}

/// Closed-form branch sample; `boundary` marks points clipped exactly at
/// the parameter-box edge.
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormPoint {
    pub param: f64,
    pub p: f64,
    pub classification: Stability,
    pub boundary: bool,
}

/// Parameter value at which a stable-unstable pair collides (or appears),
/// together with the collision location.
#[derive(Clone, Copy, Debug)]
pub struct SaddleNodeEvent {
    pub param: f64,
    pub p: f64,
}

/// A point of the two-parameter tangency locus.
#[derive(Clone, Copy, Debug)]
pub struct TangencyPoint {
    pub p: f64,
    pub eps: f64,
    pub r: f64,
    /// True when `eps` lies in [0, 1] and `r` in (0, 1).
    pub feasible: bool,
}

/// Tangency locus samples plus the number of grid points skipped for a
/// vanishing denominator.
#[derive(Clone, Debug)]
pub struct TangencyCurve {
    pub points: Vec<TangencyPoint>,
    pub skipped: usize,
}

/// Sample of the equilibrium surface in `(P, eps, r)` space.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceSample {
    pub p: f64,
    pub eps: f64,
    pub r: f64,
}

/// One-parameter bifurcation diagram: solver branch points, closed-form
/// branch samples and refined saddle-node events.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub axis: Axis,
    pub fixed_value: f64,
    pub points: Vec<BranchPoint>,
    pub closed_form: Vec<ClosedFormPoint>,
    pub events: Vec<SaddleNodeEvent>,
}

/// Tuning knobs for the sweeps.
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Closed-form branch resolution on (0, p_star).
    pub closed_form_samples: usize,
    /// Options for the per-grid-value solver pass.
    pub solver: SolverOptions,
    /// Bracket width to which an event parameter is refined.
    pub event_param_tol: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            closed_form_samples: 2000,
            solver: SolverOptions::default(),
            event_param_tol: 1e-8,
        }
    }
}

/// Uniform grid of `n` points strictly inside `(0, p_star)`.
pub fn default_p_grid(curve: &PayoffCurve, n: usize) -> Vec<f64> {
    let p_star = curve.p_star();
    (1..=n).map(|i| p_star * i as f64 / (n + 1) as f64).collect()
}

/// Closed-form swept parameter at `P`: `r(P)` for an r-sweep, `eps(P)` for
/// an eps-sweep (`None` when the eps denominator vanishes).
fn closed_form_param(curve: &PayoffCurve, axis: Axis, fixed: f64, p: f64) -> Option<f64> {
    match axis {
        Axis::R => Some(curve.pi(p) - fixed * curve.dpi(p) * (1.0 - p)),
        Axis::Eps => {
            let denom = curve.dpi(p) * (1.0 - p);
            if denom.abs() < 1e-12 {
                None
            } else {
                Some((curve.pi(p) - fixed) / denom)
            }
        }
    }
}

/// Bifurcation diagram in the relative risk `r` at fixed `eps`.
pub fn sweep_r(
    curve: &PayoffCurve,
    eps: f64,
    r_grid: &[f64],
    opts: &SweepOptions,
) -> Result<Diagram, Error> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid_parameter(
            "eps",
            format!("must lie in [0, 1], got {eps}"),
        ));
    }
    check_grid("r_grid", r_grid, 0.0, 1.0, true)?;
    sweep(curve, Axis::R, eps, r_grid, opts)
}

/// Bifurcation diagram in the deviating fraction `eps` at fixed `r`.
///
/// Requires `r > 0`: at `r = 0` every `P > p_star` is an equilibrium and
/// the diagram degenerates into a continuum.
pub fn sweep_eps(
    curve: &PayoffCurve,
    r: f64,
    eps_grid: &[f64],
    opts: &SweepOptions,
) -> Result<Diagram, Error> {
    if r == 0.0 {
        return Err(Error::ZeroRiskContinuum);
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::invalid_parameter(
            "r",
            format!("must lie in (0, 1), got {r}"),
        ));
    }
    check_grid("eps_grid", eps_grid, 0.0, 1.0, false)?;
    sweep(curve, Axis::Eps, r, eps_grid, opts)
}

fn check_grid(name: &'static str, grid: &[f64], lo: f64, hi: f64, open: bool) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::invalid_parameter(name, "grid is empty".to_string()));
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid_parameter(
                name,
                format!("grid must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
    }
    for &v in grid {
        let inside = if open { v > lo && v < hi } else { (lo..=hi).contains(&v) };
        if !inside {
            return Err(Error::invalid_parameter(
                name,
                format!(
                    "value {v} outside {}{lo}, {hi}{}",
                    if open { "(" } else { "[" },
                    if open { ")" } else { "]" }
                ),
            ));
        }
    }
    Ok(())
}

fn sweep(
    curve: &PayoffCurve,
    axis: Axis,
    fixed: f64,
    grid: &[f64],
    opts: &SweepOptions,
) -> Result<Diagram, Error> {
    // Solver pass, parallel over grid values; output order follows the grid.
    let sets: Vec<_> = grid
        .par_iter()
        .map(|&v| find_all(curve, axis.params(fixed, v), &opts.solver))
        .collect::<Result<_, _>>()?;

    let mut points = Vec::new();
    let mut grid_roots: Vec<(f64, Vec<f64>)> = Vec::with_capacity(grid.len());
    for (&v, set) in grid.iter().zip(sets.iter()) {
        let mut roots = Vec::with_capacity(set.equilibria.len());
        for e in &set.equilibria {
            points.push(BranchPoint {
                param: v,
                p: e.p,
                classification: e.classification,
            });
            roots.push(e.p);
        }
        grid_roots.push((v, roots));
    }

    // Closed-form branch on a P grid, clipped to the parameter box.
    let p_grid = default_p_grid(curve, opts.closed_form_samples);
    let mut closed_form = Vec::new();
    for &p in &p_grid {
        let Some(v) = closed_form_param(curve, axis, fixed, p) else {
            continue;
        };
        if !(0.0..=1.0).contains(&v) {
            continue;
        }
        let params = axis.params(fixed, v);
        let d = rhs_dp_unchecked(curve, params, p);
        closed_form.push(ClosedFormPoint {
            param: v,
            p,
            classification: classify_slope(d),
            boundary: v == 0.0 || v == 1.0,
        });
    }
    closed_form.sort_by(|a, b| {
        (a.param, a.p)
            .partial_cmp(&(b.param, b.p))
            .expect("closed-form samples are finite")
    });

    let events = detect_from_grid(curve, axis, fixed, &grid_roots, opts)?;

    Ok(Diagram {
        axis,
        fixed_value: fixed,
        points,
        closed_form,
        events,
    })
}

fn classify_slope(f_prime: f64) -> Stability {
    if f_prime < -crate::solver::DEGENERACY_TOL {
        Stability::Stable
    } else if f_prime > crate::solver::DEGENERACY_TOL {
        Stability::Unstable
    } else {
        Stability::Degenerate
    }
}

/// Samples the equilibrium surface `r = pi(P) - eps pi'(P)(1-P)` over a
/// `(P, eps)` grid, keeping samples with `P < p_star` and `r` strictly
/// inside (0, 1).
pub fn surface(
    curve: &PayoffCurve,
    p_grid: &[f64],
    eps_grid: &[f64],
) -> Result<Vec<SurfaceSample>, Error> {
    check_grid("p_grid", p_grid, 0.0, 1.0, true)?;
    check_grid("eps_grid", eps_grid, 0.0, 1.0, false)?;
    let rows: Vec<Vec<SurfaceSample>> = p_grid
        .par_iter()
        .map(|&p| {
            let mut row = Vec::new();
            if p < curve.p_star() {
                let pi = curve.pi(p);
                let d1 = curve.dpi(p);
                let q = 1.0 - p;
                // Same expression (and rounding) as the r-sweep closed form.
                for &eps in eps_grid {
                    let r = pi - eps * d1 * q;
                    if r > 0.0 && r < 1.0 {
                        row.push(SurfaceSample { p, eps, r });
                    }
                }
            }
            row
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Closed-form tangency locus: for each `P`, the unique `(eps, r)` at which
/// the equilibrium condition and its `P`-derivative vanish simultaneously.
///
/// Grid points where the shared denominator `pi''(P)(1-P) - pi'(P)` falls
/// below 1e-12 in magnitude are skipped and counted.
pub fn tangency_curve(curve: &PayoffCurve, p_grid: &[f64]) -> Result<TangencyCurve, Error> {
    for &p in p_grid {
        if !(p > 0.0 && p < curve.p_star()) {
            return Err(Error::invalid_parameter(
                "p_grid",
                format!("value {p} outside (0, p_star = {})", curve.p_star()),
            ));
        }
    }
    let mut points = Vec::with_capacity(p_grid.len());
    let mut skipped = 0usize;
    for &p in p_grid {
        let d1 = curve.dpi(p);
        let d2 = curve.d2pi(p);
        let denom = d2 * (1.0 - p) - d1;
        if denom.abs() < 1e-12 {
            skipped += 1;
            continue;
        }
        let eps = d1 / denom;
        let r = curve.pi(p) - d1 * d1 * (1.0 - p) / denom;
        let feasible = (0.0..=1.0).contains(&eps) && r > 0.0 && r < 1.0;
        points.push(TangencyPoint { p, eps, r, feasible });
    }
    Ok(TangencyCurve { points, skipped })
}

/// Refines equilibrium-count transitions of a swept diagram into
/// saddle-node events.
///
/// Each transition between adjacent grid values is bisected (re-solving at
/// the midpoint parameter) until the transition is bracketed to
/// `event_param_tol`; the event location is the midpoint of the colliding
/// pair on the richer side. A count change that is odd after refinement is
/// a diagnostic error.
pub fn detect_saddle_nodes(
    curve: &PayoffCurve,
    diagram: &Diagram,
    opts: &SweepOptions,
) -> Result<Vec<SaddleNodeEvent>, Error> {
    let mut grid_roots: Vec<(f64, Vec<f64>)> = Vec::new();
    for pt in &diagram.points {
        match grid_roots.last_mut() {
            Some((param, roots)) if *param == pt.param => roots.push(pt.p),
            _ => grid_roots.push((pt.param, vec![pt.p])),
        }
    }
    detect_from_grid(curve, diagram.axis, diagram.fixed_value, &grid_roots, opts)
}

fn detect_from_grid(
    curve: &PayoffCurve,
    axis: Axis,
    fixed: f64,
    grid_roots: &[(f64, Vec<f64>)],
    opts: &SweepOptions,
) -> Result<Vec<SaddleNodeEvent>, Error> {
    let mut events = Vec::new();
    for w in grid_roots.windows(2) {
        let (a, ref ra) = w[0];
        let (b, ref rb) = w[1];
        if ra.len() != rb.len() {
            refine_transition(curve, axis, fixed, a, ra, b, rb, opts, &mut events)?;
        }
    }
    events.sort_by(|x, y| {
        (x.param, x.p)
            .partial_cmp(&(y.param, y.p))
            .expect("event coordinates are finite")
    });
    Ok(events)
}

#[allow(clippy::too_many_arguments)]
fn refine_transition(
    curve: &PayoffCurve,
    axis: Axis,
    fixed: f64,
    a: f64,
    roots_a: &[f64],
    b: f64,
    roots_b: &[f64],
    opts: &SweepOptions,
    events: &mut Vec<SaddleNodeEvent>,
) -> Result<(), Error> {
    if roots_a.len() == roots_b.len() {
        return Ok(());
    }
    if b - a <= opts.event_param_tol {
        let delta = roots_a.len() as i64 - roots_b.len() as i64;
        if delta.rem_euclid(2) != 0 {
            return Err(Error::OddCountChange { delta, lo: a, hi: b });
        }
        let (richer, poorer) = if roots_a.len() > roots_b.len() {
            (roots_a, roots_b)
        } else {
            (roots_b, roots_a)
        };
        let param = 0.5 * (a + b);
        for pair in colliding_pairs(richer, poorer) {
            events.push(SaddleNodeEvent {
                param,
                p: 0.5 * (pair.0 + pair.1),
            });
        }
        return Ok(());
    }
    let m = 0.5 * (a + b);
    let set = find_all(curve, axis.params(fixed, m), &opts.solver)?;
    let roots_m: Vec<f64> = set.equilibria.iter().map(|e| e.p).collect();
    refine_transition(curve, axis, fixed, a, roots_a, m, &roots_m, opts, events)?;
    refine_transition(curve, axis, fixed, m, &roots_m, b, roots_b, opts, events)
}

/// Roots present on the richer side with no counterpart on the poorer side,
/// grouped into adjacent pairs.
fn colliding_pairs(richer: &[f64], poorer: &[f64]) -> Vec<(f64, f64)> {
    let mut used = vec![false; richer.len()];
    for &p in poorer {
        let mut best: Option<(usize, f64)> = None;
        for (i, &q) in richer.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = (p - q).abs();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            used[i] = true;
        }
    }
    let mut leftover: Vec<f64> = richer
        .iter()
        .zip(used.iter())
        .filter(|(_, &u)| !u)
        .map(|(&p, _)| p)
        .collect();
    leftover.sort_by(|x, y| x.partial_cmp(y).expect("roots are finite"));
    leftover
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0], c[1]))
        .collect()
}
