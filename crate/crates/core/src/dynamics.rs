//! The strategy evolution equation and its trajectories.
//!
//! The state `P` is the focal vaccination probability; it evolves along the
//! payoff gradient of a rare deviator,
//!
//! ```text
//! dP/dt = f(P) = -r - eps * pi'(P) * (1 - P) + pi(P)
//! ```
//!
//! with `r` the relative risk and `eps` the deviating fraction. `f(0) > 0`
//! and `f(1) = -r < 0`, so [0, 1] is forward invariant and at least one
//! equilibrium exists.

use crate::curve::PayoffCurve;
use crate::error::Error;

/// Model parameters: relative risk `r` and deviating fraction `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub r: f64,
    pub eps: f64,
}

impl ModelParams {
    /// Validates `0 < r < 1` and `0 <= eps <= 1`.
    pub fn new(r: f64, eps: f64) -> Result<Self, Error> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid_parameter(
                "r",
                format!("relative risk must lie in (0, 1), got {r}"),
            ));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::invalid_parameter(
                "eps",
                format!("deviating fraction must lie in [0, 1], got {eps}"),
            ));
        }
        Ok(ModelParams { r, eps })
    }
}

/// Vector field `f(P) = -r - eps * pi'(P) * (1-P) + pi(P)`.
///
/// Beyond the cutoff (`P >= p_star`) both `pi` and `pi'` vanish, so the
/// field is constant and equal to `-r`.
pub fn rhs(curve: &PayoffCurve, params: ModelParams, p: f64) -> Result<f64, Error> {
    check_state(p)?;
    Ok(rhs_unchecked(curve, params, p))
}

/// Derivative of the field, `f'(P) = pi'(P)(1+eps) - eps (1-P) pi''(P)`.
pub fn rhs_dp(curve: &PayoffCurve, params: ModelParams, p: f64) -> Result<f64, Error> {
    check_state(p)?;
    Ok(rhs_dp_unchecked(curve, params, p))
}

#[inline]
pub(crate) fn rhs_unchecked(curve: &PayoffCurve, params: ModelParams, p: f64) -> f64 {
    -params.r - params.eps * curve.dpi(p) * (1.0 - p) + curve.pi(p)
}

#[inline]
pub(crate) fn rhs_dp_unchecked(curve: &PayoffCurve, params: ModelParams, p: f64) -> f64 {
    curve.dpi(p) * (1.0 + params.eps) - params.eps * (1.0 - p) * curve.d2pi(p)
}

fn check_state(p: f64) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError { value: p });
    }
    Ok(())
}

/// Time-sampled solution of the strategy equation.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub params: ModelParams,
    pub curve_label: String,
    /// Largest excursion outside [0, 1] that the guard clamp absorbed.
    /// Forward invariance keeps this at rounding level.
    pub max_clamp: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("trajectory is never empty")
    }
}

/// Integrates the strategy equation with classical fixed-step RK4.
///
/// States are clamped to [0, 1] purely as a numerical guard; the recorded
/// `max_clamp` lets callers verify the guard never meaningfully activated.
pub fn integrate(
    curve: &PayoffCurve,
    params: ModelParams,
    p0: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, Error> {
    check_state(p0)?;
    if !(t_end > 0.0) {
        return Err(Error::invalid_parameter(
            "t_end",
            format!("must be positive, got {t_end}"),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid_parameter(
            "dt",
            format!("must be positive, got {dt}"),
        ));
    }
    let n_steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    if n_steps > 50_000_000 {
        return Err(Error::invalid_parameter(
            "dt",
            format!("horizon/step ratio {n_steps} is unreasonably large"),
        ));
    }
    let f = |p: f64| rhs_unchecked(curve, params, p);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut p = p0;
    let mut max_clamp = 0.0f64;
    times.push(0.0);
    states.push(p);
    for i in 1..=n_steps {
        let k1 = f(p);
        let k2 = f(clamp01(p + 0.5 * dt * k1, &mut max_clamp));
        let k3 = f(clamp01(p + 0.5 * dt * k2, &mut max_clamp));
        let k4 = f(clamp01(p + dt * k3, &mut max_clamp));
        p = clamp01(
            p + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
            &mut max_clamp,
        );
        times.push(i as f64 * dt);
        states.push(p);
    }
    Ok(Trajectory {
        times,
        states,
        params,
        curve_label: curve.label().to_string(),
        max_clamp,
    })
}

#[inline]
fn clamp01(p: f64, max_clamp: &mut f64) -> f64 {
    if p < 0.0 {
        *max_clamp = max_clamp.max(-p);
        0.0
    } else if p > 1.0 {
        *max_clamp = max_clamp.max(p - 1.0);
        1.0
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{five_point_d1, make_convex_test, make_example1, make_example2};
    use crate::glue::GlueKernel;
    use crate::solver::{find_all, SolverOptions};

    fn kernel() -> GlueKernel {
        GlueKernel::new().unwrap()
    }

    #[test]
    fn constant_minus_r_beyond_cutoff() {
        let k = kernel();
        let params = ModelParams::new(0.3, 0.6).unwrap();
        for c in [make_example1(&k), make_example2(&k)] {
            for p in [c.p_star(), 0.9, 0.95, 1.0] {
                assert_eq!(rhs(&c, params, p).unwrap(), -params.r);
            }
        }
    }

    #[test]
    fn field_at_one_is_exactly_minus_r() {
        let k = kernel();
        let c = make_example2(&k);
        for &r in &[0.1, 0.5, 0.909] {
            let params = ModelParams::new(r, 0.4).unwrap();
            assert_eq!(rhs(&c, params, 1.0).unwrap(), -r);
        }
    }

    #[test]
    fn example2_field_at_zero() {
        // pi(0) = 1 and pi'(0) = -2, so f(0) = 1 - r + 2 eps.
        let c = make_example2(&kernel());
        let params = ModelParams::new(0.909, 0.188).unwrap();
        let v = rhs(&c, params, 0.0).unwrap();
        assert!((v - 0.467).abs() < 1e-15, "f(0) = {v}");
    }

    #[test]
    fn field_derivative_matches_finite_difference() {
        let k = kernel();
        let params = ModelParams::new(0.4, 0.7).unwrap();
        for c in [
            make_example1(&k),
            make_example2(&k),
            make_convex_test(0.8, 3).unwrap(),
        ] {
            for i in 1..100 {
                let p = i as f64 / 100.0;
                if c.kinks().iter().any(|kk| (p - kk).abs() < 2e-3) {
                    continue;
                }
                // Small step: near the transition edges the kernel's higher
                // derivatives grow fast and a coarser stencil truncates badly.
                let fd = five_point_d1(|x| rhs_unchecked(&c, params, x), p, 1e-5);
                let v = rhs_dp(&c, params, p).unwrap();
                let rel = (fd - v).abs() / v.abs().max(fd.abs()).max(1e-2);
                assert!(rel < 1e-6, "{} at p={p}: {v} vs {fd}", c.label());
            }
        }
    }

    #[test]
    fn field_derivative_nonpositive_for_convex_curve() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.5, 0.8).unwrap();
        for i in 1..200 {
            let p = 0.8 * i as f64 / 200.0;
            assert!(rhs_dp(&c, params, p).unwrap() <= 0.0);
        }
    }

    #[test]
    fn rejects_state_outside_unit_interval() {
        let c = make_example2(&kernel());
        let params = ModelParams::new(0.5, 0.5).unwrap();
        assert!(matches!(
            rhs(&c, params, -0.1),
            Err(Error::DomainError { .. })
        ));
        assert!(matches!(
            rhs(&c, params, 1.1),
            Err(Error::DomainError { .. })
        ));
        assert!(rhs_dp(&c, params, 1.5).is_err());
        assert!(integrate(&c, params, -0.2, 1.0, 0.1).is_err());
    }

    #[test]
    fn rejects_bad_step_and_horizon() {
        let c = make_example2(&kernel());
        let params = ModelParams::new(0.5, 0.5).unwrap();
        assert!(integrate(&c, params, 0.5, 0.0, 0.1).is_err());
        assert!(integrate(&c, params, 0.5, 1.0, 0.0).is_err());
        assert!(integrate(&c, params, 0.5, 1.0, -0.1).is_err());
    }

    #[test]
    fn equilibrium_start_stays_put() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.5, 0.25).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        let p0 = set.equilibria[0].p;
        let traj = integrate(&c, params, p0, 20.0, 1e-3).unwrap();
        let worst = traj
            .states
            .iter()
            .map(|s| (s - p0).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9, "drift {worst}");
    }

    #[test]
    fn linear_decay_above_cutoff() {
        let k = kernel();
        let c = make_example1(&k);
        let params = ModelParams::new(0.2, 0.3).unwrap();
        let traj = integrate(&c, params, 0.95, 2.0, 1e-3).unwrap();
        let mut worst = 0.0f64;
        for (t, s) in traj.times.iter().zip(traj.states.iter()) {
            let line = 0.95 - params.r * t;
            if line >= c.p_star() {
                worst = worst.max((s - line).abs());
            }
        }
        assert!(worst <= 1e-9, "deviation from line {worst}");
    }

    #[test]
    fn convex_trajectory_converges_monotonically() {
        let c = make_convex_test(0.8, 3).unwrap();
        let params = ModelParams::new(0.4, 0.6).unwrap();
        let set = find_all(&c, params, &SolverOptions::default()).unwrap();
        let target = set.equilibria[0].p;
        for p0 in [0.05, 0.3, 0.79, 0.99] {
            let traj = integrate(&c, params, p0, 60.0, 1e-3).unwrap();
            let mut prev = (p0 - target).abs();
            for &s in &traj.states {
                let d = (s - target).abs();
                assert!(d <= prev + 1e-12, "distance grew from {prev} to {d}");
                prev = d;
            }
            assert!(prev < 1e-6, "did not converge: final distance {prev}");
            assert!(traj.max_clamp <= 1e-12);
        }
    }
}
