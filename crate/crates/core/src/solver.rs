//! Equilibrium location, stability classification and sensitivities.
//!
//! Equilibria are roots of `f(P) = -r - eps pi'(P)(1-P) + pi(P)` on
//! `[0, p_star]` (for `r > 0` the field equals `-r` beyond the cutoff, so
//! nothing lives there). [`find_all`] is the production path: a sign-change
//! scan with hybrid secant/bisection refinement plus a heuristic sweep for
//! near-tangent dips of `|f|`. [`oracle_scan`] is the slow independent
//! cross-check used by tests and acceptance runs.

use rayon::prelude::*;

use crate::curve::PayoffCurve;
use crate::dynamics::{rhs_dp_unchecked, rhs_unchecked, ModelParams};
use crate::error::Error;

/// Threshold on `|f'|` separating stable/unstable from degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Stability class of an equilibrium.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Degenerate,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single equilibrium with the field derivative used to classify it.
#[derive(Clone, Copy, Debug)]
pub struct Equilibrium {
    pub p: f64,
    pub f_prime: f64,
    pub classification: Stability,
}

/// A near-tangency that dipped below `sqrt(tol)` without crossing zero.
/// Not an equilibrium; reported for diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct DegenerateCandidate {
    pub p: f64,
    pub f: f64,
    pub f_prime: f64,
    pub bracket: (f64, f64),
}

/// All equilibria for one parameter setting, sorted ascending in `P`.
#[derive(Clone, Debug)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub degenerate_candidates: Vec<DegenerateCandidate>,
    pub params: ModelParams,
    pub curve_label: String,
}

impl EquilibriumSet {
    /// True when every member is classified stable or unstable.
    pub fn all_nondegenerate(&self) -> bool {
        self.equilibria
            .iter()
            .all(|e| e.classification != Stability::Degenerate)
    }
}

/// Tuning knobs for [`find_all`].
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Number of scan intervals on `[0, p_star]`.
    pub grid_n: usize,
    /// Root tolerance: refinement stops at `|f| <= tol` and bracket width
    /// `<= tol`.
    pub tol: f64,
    /// `|f'|` threshold for the degenerate classification.
    pub degeneracy_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        // The example curves' transition layers are ~0.1 wide; 2048 points
        // oversample them by two orders of magnitude.
        SolverOptions {
            grid_n: 2048,
            tol: 1e-12,
            degeneracy_tol: DEGENERACY_TOL,
        }
    }
}

/// Locates every equilibrium on `[0, p_star]` and classifies stability.
///
/// Scans `grid_n + 1` uniform points for sign changes, refines each bracket
/// to `|f| <= tol` and width `<= tol`, and separately inspects grid-local
/// minima of `|f|` below `sqrt(tol)` (possible tangencies). Returns at
/// least one equilibrium; an empty result is an internal error since the
/// boundary signs `f(0) > 0 > f(p_star)` force a crossing.
pub fn find_all(
    curve: &PayoffCurve,
    params: ModelParams,
    opts: &SolverOptions,
) -> Result<EquilibriumSet, Error> {
    if params.r == 0.0 {
        return Err(Error::ZeroRiskContinuum);
    }
    if !(params.r > 0.0 && params.r < 1.0) {
        return Err(Error::invalid_parameter(
            "r",
            format!("must lie in (0, 1), got {}", params.r),
        ));
    }
    if opts.grid_n < 64 {
        return Err(Error::invalid_parameter(
            "grid_n",
            format!("must be >= 64, got {}", opts.grid_n),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid_parameter(
            "tol",
            format!("must be positive, got {}", opts.tol),
        ));
    }

    let f = |p: f64| rhs_unchecked(curve, params, p);
    let fp = |p: f64| rhs_dp_unchecked(curve, params, p);
    let n = opts.grid_n;
    let p_star = curve.p_star();
    let xs: Vec<f64> = (0..=n).map(|i| p_star * i as f64 / n as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if fs[i] * fs[i + 1] < 0.0 {
            let root = refine_bracket(&f, xs[i], xs[i + 1], fs[i], fs[i + 1], opts.tol)?;
            roots.push(root);
        }
    }
    if fs[n] == 0.0 {
        roots.push(xs[n]);
    }

    // Tangency sweep: local |f| minima below sqrt(tol) without an adjacent
    // sign change. A genuine tangency has f' crossing zero there.
    let dip_tol = opts.tol.sqrt();
    let mut candidates: Vec<DegenerateCandidate> = Vec::new();
    for i in 1..n {
        let a = fs[i].abs();
        if a == 0.0 || a > dip_tol {
            continue;
        }
        if a >= fs[i - 1].abs() || a > fs[i + 1].abs() {
            continue;
        }
        if fs[i - 1] * fs[i] < 0.0 || fs[i] * fs[i + 1] < 0.0 {
            continue; // handled by the sign-change pass
        }
        let (lo, hi) = (xs[i - 1], xs[i + 1]);
        let (fpl, fph) = (fp(lo), fp(hi));
        if fpl * fph > 0.0 {
            // f' does not cross: refinement failure, report widest bracket.
            candidates.push(DegenerateCandidate {
                p: xs[i],
                f: fs[i],
                f_prime: fp(xs[i]),
                bracket: (lo, hi),
            });
            continue;
        }
        let pd = bisect_to_width(&fp, lo, hi, fpl, opts.tol);
        let fd = f(pd);
        if fd.abs() <= opts.tol {
            roots.push(pd);
        } else {
            candidates.push(DegenerateCandidate {
                p: pd,
                f: fd,
                f_prime: fp(pd),
                bracket: (lo, hi),
            });
        }
    }

    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10);

    let equilibria: Vec<Equilibrium> = roots
        .into_iter()
        .map(|p| {
            let d = fp(p);
            Equilibrium {
                p,
                f_prime: d,
                classification: classify(d, opts.degeneracy_tol),
            }
        })
        .collect();

    if equilibria.is_empty() {
        return Err(Error::NoEquilibrium);
    }

    Ok(EquilibriumSet {
        equilibria,
        degenerate_candidates: candidates,
        params,
        curve_label: curve.label().to_string(),
    })
}

fn classify(f_prime: f64, degeneracy_tol: f64) -> Stability {
    if f_prime < -degeneracy_tol {
        Stability::Stable
    } else if f_prime > degeneracy_tol {
        Stability::Unstable
    } else {
        Stability::Degenerate
    }
}

/// Hybrid secant/bisection refinement of a sign-change bracket.
///
/// Alternates a secant step (fast |f| reduction) with a bisection step
/// (guaranteed bracket collapse); stops when both `|f| <= tol` and the
/// bracket width is `<= tol`.
fn refine_bracket<F: Fn(f64) -> f64>(
    f: &F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64, Error> {
    debug_assert!(fa * fb < 0.0);
    let max_iters = 200;
    let mut best = if fa.abs() <= fb.abs() { a } else { b };
    let mut fbest = fa.abs().min(fb.abs());
    for iter in 0..max_iters {
        if fbest <= tol && (b - a) <= tol {
            return Ok(best);
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Bracket has collapsed to adjacent floats.
            return Ok(best);
        }
        let x = if iter % 2 == 0 && fb != fa {
            let s = a - fa * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        let fx = f(x);
        if fx.abs() < fbest {
            fbest = fx.abs();
            best = x;
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    Err(Error::RootRefinement {
        iterations: max_iters,
        lo: a,
        hi: b,
    })
}

fn bisect_to_width<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, width: f64) -> f64 {
    while b - a > width {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Brute-force root scan on the full unit interval.
///
/// Evaluates `f` at `n` dense points, bisects every sign-change cell to a
/// bracket width of 1e-12 and returns the roots in ascending order. Used
/// as an independent oracle in tests and acceptance runs only.
pub fn oracle_scan(curve: &PayoffCurve, params: ModelParams, n: usize) -> Result<Vec<f64>, Error> {
    if n < 100_000 {
        return Err(Error::invalid_parameter(
            "n",
            format!("oracle scan needs n >= 1e5, got {n}"),
        ));
    }
    let f = |p: f64| rhs_unchecked(curve, params, p);
    let step = 1.0 / (n - 1) as f64;
    let fs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| f(i as f64 * step))
        .collect();
    let mut roots = Vec::new();
    for i in 0..n - 1 {
        let (fa, fb) = (fs[i], fs[i + 1]);
        if fa == 0.0 {
            roots.push(i as f64 * step);
            continue;
        }
        if fa * fb < 0.0 {
            let root = bisect_to_width(&f, i as f64 * step, (i + 1) as f64 * step, fa, 1e-12);
            roots.push(root);
        }
    }
    if fs[n - 1] == 0.0 {
        roots.push(1.0);
    }
    Ok(roots)
}

/// Sensitivity of a non-degenerate equilibrium to the relative risk:
/// `dP0/dr = 1 / f'(P0)`. Non-positive at stable equilibria.
pub fn sensitivity_r(
    curve: &PayoffCurve,
    params: ModelParams,
    eq: &Equilibrium,
) -> Result<f64, Error> {
    let fp = rhs_dp_unchecked(curve, params, eq.p);
    guard_degenerate(eq.p, fp)?;
    Ok(1.0 / fp)
}

/// Sensitivity of a non-degenerate equilibrium to the deviating fraction:
/// `dP0/deps = pi'(P0)(1-P0) / f'(P0)`. Non-negative at stable equilibria.
pub fn sensitivity_eps(
    curve: &PayoffCurve,
    params: ModelParams,
    eq: &Equilibrium,
) -> Result<f64, Error> {
    let fp = rhs_dp_unchecked(curve, params, eq.p);
    guard_degenerate(eq.p, fp)?;
    Ok(curve.dpi(eq.p) * (1.0 - eq.p) / fp)
}

fn guard_degenerate(p: f64, fp: f64) -> Result<(), Error> {
    if fp.abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateEquilibrium {
            p,
            f_prime_abs: fp.abs(),
            tol: DEGENERACY_TOL,
        });
    }
    Ok(())
}

/// Enclosing interval `[pi^{-1}(r), p_star]` for the unique equilibrium of
/// a convex curve.
///
/// `pi^{-1}(r)` is computed by bisection on the strictly decreasing branch.
/// The printed second upper-bound term involving the inverse of `pi'` is
/// not representable for non-negative arguments (`pi' <= 0` everywhere), so
/// only the firm bounds are returned.
pub fn convex_bounds(curve: &PayoffCurve, params: ModelParams) -> Result<(f64, f64), Error> {
    let (min_d2, at) = curve.min_d2pi(2048);
    if min_d2 < -1e-12 {
        return Err(Error::NotConvex {
            label: curve.label().to_string(),
            min_d2,
            at,
        });
    }
    let r = params.r;
    let g = |p: f64| curve.pi(p) - r;
    // pi(0) = 1 > r and pi(p_star) = 0 < r bracket the preimage.
    let lo = bisect_to_width(&g, 0.0, curve.p_star(), g(0.0), 1e-14);
    Ok((lo, curve.p_star()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_convex_test, make_example1, make_example2};
    use crate::glue::GlueKernel;

    fn kernel() -> GlueKernel {
        GlueKernel::new().unwrap()
    }

    #[test]
    fn convex_has_unique_stable_equilibrium() {
        let c = make_convex_test(0.8, 3).unwrap();
        for (r, eps) in [(0.1, 0.0), (0.5, 0.5), (0.9, 1.0), (0.3, 0.2)] {
            let params = ModelParams::new(r, eps).unwrap();
            let set = find_all(&c, params, &SolverOptions::default()).unwrap();
            assert_eq!(set.equilibria.len(), 1, "r={r}, eps={eps}");
            assert_eq!(set.equilibria[0].classification, Stability::Stable);
        }
    }

    #[test]
    fn convex_closed_form_at_zero_eps() {
        // With eps = 0 the equilibrium solves pi(P) = r exactly.
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.5, 0.0).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        let expected = 0.8 * (1.0 - 0.5f64.powf(1.0 / 3.0));
        assert!((set.equilibria[0].p - expected).abs() < 1e-10);

        let oracle = oracle_scan(&c, params, 100_000).unwrap();
        assert_eq!(oracle.len(), 1);
        assert!((oracle[0] - expected).abs() < 1e-10);
    }

    #[test]
    fn solver_and_oracle_agree_on_example_curves() {
        let k = kernel();
        let opts = SolverOptions::default();
        for c in [make_example1(&k), make_example2(&k)] {
            for (r, eps) in [(0.2, 0.0), (0.35, 0.4), (0.6, 0.9)] {
                let params = ModelParams::new(r, eps).unwrap();
                let set = find_all(&c, params, &opts).unwrap();
                let oracle = oracle_scan(&c, params, 200_000).unwrap();
                assert_eq!(set.equilibria.len(), oracle.len(), "{} r={r} eps={eps}", c.label());
                for (e, o) in set.equilibria.iter().zip(oracle.iter()) {
                    assert!((e.p - o).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn no_equilibria_beyond_cutoff() {
        let k = kernel();
        let c = make_example2(&k);
        let params = ModelParams::new(0.909, 0.188).unwrap();
        let roots = oracle_scan(&c, params, 200_000).unwrap();
        assert!(!roots.is_empty());
        for root in roots {
            assert!(root <= c.p_star());
        }
    }

    #[test]
    fn zero_risk_is_a_continuum_error() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams { r: 0.0, eps: 0.5 };
        assert!(matches!(
            find_all(&c, params, &SolverOptions::default()),
            Err(Error::ZeroRiskContinuum)
        ));
    }

    #[test]
    fn rejects_small_grid_and_bad_tol() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.5, 0.5).unwrap();
        let mut opts = SolverOptions::default();
        opts.grid_n = 32;
        assert!(find_all(&c, params, &opts).is_err());
        let mut opts = SolverOptions::default();
        opts.tol = 0.0;
        assert!(find_all(&c, params, &opts).is_err());
        assert!(oracle_scan(&c, params, 1000).is_err());
    }

    #[test]
    fn sensitivities_reduce_and_sign_correctly() {
        let c = make_convex_test(0.8, 3).unwrap();

        // eps = 0 reduces dP0/dr to 1/pi'(P0).
        let params = ModelParams::new(0.5, 0.0).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        let eq = set.equilibria[0];
        let sr = sensitivity_r(&c, params, &eq).unwrap();
        assert!((sr - 1.0 / c.dpi(eq.p)).abs() < 1e-12);
        assert!(sr <= 0.0);

        let params = ModelParams::new(0.5, 0.6).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        let eq = set.equilibria[0];
        assert!(sensitivity_r(&c, params, &eq).unwrap() <= 0.0);
        assert!(sensitivity_eps(&c, params, &eq).unwrap() >= 0.0);
    }

    #[test]
    fn sensitivities_match_finite_differences_of_the_root() {
        let c = make_convex_test(0.8, 3).unwrap();
        let opts = SolverOptions::default();
        let params = ModelParams::new(0.4, 0.3).unwrap();
        let set = find_all(&c, params, &opts).unwrap();
        let eq = set.equilibria[0];
        let delta = 1e-5;

        let root_at = |r: f64, eps: f64| {
            let p = ModelParams::new(r, eps).unwrap();
            find_all(&c, p, &opts).unwrap().equilibria[0].p
        };
        let fd_r = (root_at(params.r + delta, params.eps) - root_at(params.r - delta, params.eps))
            / (2.0 * delta);
        let sr = sensitivity_r(&c, params, &eq).unwrap();
        assert!((sr - fd_r).abs() / fd_r.abs() < 1e-3, "{sr} vs {fd_r}");

        let fd_e = (root_at(params.r, params.eps + delta) - root_at(params.r, params.eps - delta))
            / (2.0 * delta);
        let se = sensitivity_eps(&c, params, &eq).unwrap();
        assert!((se - fd_e).abs() / fd_e.abs().max(1e-12) < 1e-3, "{se} vs {fd_e}");
    }

    #[test]
    fn degenerate_guard_fires() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.5, 0.5).unwrap();
        let eq = Equilibrium {
            p: 0.9, // beyond cutoff: f' = 0 there
            f_prime: 0.0,
            classification: Stability::Degenerate,
        };
        assert!(matches!(
            sensitivity_r(&c, params, &eq),
            Err(Error::DegenerateEquilibrium { .. })
        ));
        assert!(sensitivity_eps(&c, params, &eq).is_err());
    }

    #[test]
    fn convex_bounds_contain_the_equilibrium() {
        let c = make_convex_test(0.8, 3).unwrap();

        // eps = 0: the lower bound is the equilibrium itself.
        let params = ModelParams::new(0.5, 0.0).unwrap();
        let (lo, hi) = convex_bounds(&c, params).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        assert!((set.equilibria[0].p - lo).abs() < 1e-9);
        assert_eq!(hi, 0.8);

        // eps > 0 pushes the root strictly above the eps = 0 value.
        let params2 = ModelParams::new(0.5, 0.5).unwrap();
        let set2 = find_all(&c, params2, &SolverOptions::default()).unwrap();
        assert!(set2.equilibria[0].p > set.equilibria[0].p);
        assert!(set2.equilibria[0].p <= 0.8);
        let (lo2, hi2) = convex_bounds(&c, params2).unwrap();
        assert!(set2.equilibria[0].p >= lo2 && set2.equilibria[0].p <= hi2);

        // r -> 1 drives the lower bound to 0.
        let params3 = ModelParams::new(0.999, 0.3).unwrap();
        let (lo3, _) = convex_bounds(&c, params3).unwrap();
        assert!(lo3 < 0.01);
    }

    #[test]
    fn convex_bounds_reject_nonconvex_curves() {
        let k = kernel();
        let c = make_example1(&k);
        let params = ModelParams::new(0.5, 0.5).unwrap();
        assert!(matches!(
            convex_bounds(&c, params),
            Err(Error::NotConvex { .. })
        ));
    }
}
