//! Payoff curve construction and validation.
//!
//! A [`PayoffCurve`] is the probability `pi(p)` that an unvaccinated
//! individual is eventually infected at coverage `p`, together with its
//! first two derivatives and the cutoff `p_star` beyond which the curve is
//! identically zero. The constructors assemble the derivatives analytically
//! (product/chain rule over the base factor and the gluing switch), never by
//! differencing quadrature output.
//!
//! Every constructed curve satisfies the standing assumptions: smooth,
//! `0 <= pi <= 1`, non-increasing, `pi(0) = 1`, and `pi(p) = 0` exactly for
//! `p >= p_star`. [`validate`] re-checks all five on a grid and reports the
//! worst violation per assumption instead of failing hard.

use crate::error::Error;
use crate::glue::{bump, bump_d1, GlueKernel};

/// Transition interval of the cubic example curve: `[7/16, 9/16]`.
const CUBIC_LO: f64 = 7.0 / 16.0;
const CUBIC_HI: f64 = 9.0 / 16.0;

#[derive(Clone, Debug)]
enum CurveForm {
    /// Normalised rational base `(1 - 1/(r0(1-p))) / (1 - 1/r0)` glued to
    /// zero over `[lo, hi]`.
    RationalGlue {
        r0: f64,
        lo: f64,
        hi: f64,
        kernel: GlueKernel,
    },
    /// Cubic base `((1-2p)^3 + 2)/3` glued to zero over `[7/16, 9/16]`
    /// with switch argument `8(2p-1)`.
    CubicGlue { kernel: GlueKernel },
    /// Power law `scale * (1 - p/p_star)^exponent`, truncated at `p_star`.
    /// `scale` is 1 except for deliberately broken test fixtures.
    ConvexPower {
        p_star: f64,
        exponent: u32,
        scale: f64,
    },
}

/// Smooth infection-probability curve with analytic derivatives.
#[derive(Clone, Debug)]
pub struct PayoffCurve {
    label: String,
    p_star: f64,
    kinks: Vec<f64>,
    form: CurveForm,
}

impl PayoffCurve {
    /// Identifier used in serialized output.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Cutoff coverage above which `pi` is exactly zero.
    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    /// Points where the construction switches pieces (transition-interval
    /// endpoints). Finite-difference checks stay clear of these.
    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Infection probability at coverage `p`.
    pub fn pi(&self, p: f64) -> f64 {
        match &self.form {
            CurveForm::RationalGlue { r0, lo, hi, kernel } => {
                if p >= *hi {
                    return 0.0;
                }
                let base = rational_base(*r0, p);
                if p <= *lo {
                    base
                } else {
                    base * (1.0 - kernel.glue((p - lo) / (hi - lo)))
                }
            }
            CurveForm::CubicGlue { kernel } => {
                if p >= CUBIC_HI {
                    return 0.0;
                }
                let c = cubic_base(p);
                if p <= CUBIC_LO {
                    c
                } else {
                    c * (1.0 - kernel.primitive_cached(16.0 * p - 8.0) / kernel.h1())
                }
            }
            CurveForm::ConvexPower {
                p_star,
                exponent,
                scale,
            } => {
                if p >= *p_star {
                    0.0
                } else {
                    scale * (1.0 - p / p_star).powi(*exponent as i32)
                }
            }
        }
    }

    /// First derivative `pi'(p)`.
    pub fn dpi(&self, p: f64) -> f64 {
        match &self.form {
            CurveForm::RationalGlue { r0, lo, hi, kernel } => {
                if p >= *hi {
                    return 0.0;
                }
                let b1 = rational_base_d1(*r0, p);
                if p <= *lo {
                    b1
                } else {
                    let w = hi - lo;
                    let u = (p - lo) / w;
                    let gt = 1.0 - kernel.glue(u);
                    let gt1 = -kernel.glue_d1(u) / w;
                    b1 * gt + rational_base(*r0, p) * gt1
                }
            }
            CurveForm::CubicGlue { kernel } => {
                if p >= CUBIC_HI {
                    return 0.0;
                }
                let c1 = cubic_base_d1(p);
                if p <= CUBIC_LO {
                    c1
                } else {
                    let v = 16.0 * p - 8.0;
                    let gt = 1.0 - kernel.primitive_cached(v) / kernel.h1();
                    let gt1 = -16.0 * bump(v) / kernel.h1();
                    c1 * gt + cubic_base(p) * gt1
                }
            }
            CurveForm::ConvexPower {
                p_star,
                exponent,
                scale,
            } => {
                if p >= *p_star {
                    0.0
                } else {
                    let n = *exponent as f64;
                    -scale * n / p_star * (1.0 - p / p_star).powi(*exponent as i32 - 1)
                }
            }
        }
    }

    /// Second derivative `pi''(p)`.
    pub fn d2pi(&self, p: f64) -> f64 {
        match &self.form {
            CurveForm::RationalGlue { r0, lo, hi, kernel } => {
                if p >= *hi {
                    return 0.0;
                }
                let b2 = rational_base_d2(*r0, p);
                if p <= *lo {
                    b2
                } else {
                    let w = hi - lo;
                    let u = (p - lo) / w;
                    let gt = 1.0 - kernel.glue(u);
                    let gt1 = -kernel.glue_d1(u) / w;
                    let gt2 = -kernel.glue_d2(u) / (w * w);
                    b2 * gt + 2.0 * rational_base_d1(*r0, p) * gt1 + rational_base(*r0, p) * gt2
                }
            }
            CurveForm::CubicGlue { kernel } => {
                if p >= CUBIC_HI {
                    return 0.0;
                }
                let c2 = cubic_base_d2(p);
                if p <= CUBIC_LO {
                    c2
                } else {
                    let v = 16.0 * p - 8.0;
                    let gt = 1.0 - kernel.primitive_cached(v) / kernel.h1();
                    let gt1 = -16.0 * bump(v) / kernel.h1();
                    let gt2 = -256.0 * bump_d1(v) / kernel.h1();
                    c2 * gt + 2.0 * cubic_base_d1(p) * gt1 + cubic_base(p) * gt2
                }
            }
            CurveForm::ConvexPower {
                p_star,
                exponent,
                scale,
            } => {
                if p >= *p_star {
                    0.0
                } else {
                    let n = *exponent as f64;
                    scale * n * (n - 1.0) / (p_star * p_star)
                        * (1.0 - p / p_star).powi(*exponent as i32 - 2)
                }
            }
        }
    }

    /// Grid test for convexity: `d2pi >= -1e-12` at `grid_n + 1` uniform
    /// points on [0, 1].
    pub fn is_convex(&self, grid_n: usize) -> bool {
        self.min_d2pi(grid_n).0 >= -1e-12
    }

    /// Minimum of `d2pi` on a uniform grid, with its location.
    pub fn min_d2pi(&self, grid_n: usize) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut at = 0.0;
        for i in 0..=grid_n {
            let p = i as f64 / grid_n as f64;
            let v = self.d2pi(p);
            if v < min {
                min = v;
                at = p;
            }
        }
        (min, at)
    }
}

fn rational_base(r0: f64, p: f64) -> f64 {
    let c0 = 1.0 - 1.0 / r0;
    (1.0 - 1.0 / (r0 * (1.0 - p))) / c0
}

fn rational_base_d1(r0: f64, p: f64) -> f64 {
    let c0 = 1.0 - 1.0 / r0;
    let q = 1.0 - p;
    -1.0 / (r0 * q * q) / c0
}

fn rational_base_d2(r0: f64, p: f64) -> f64 {
    let c0 = 1.0 - 1.0 / r0;
    let q = 1.0 - p;
    -2.0 / (r0 * q * q * q) / c0
}

fn cubic_base(p: f64) -> f64 {
    let s = 1.0 - 2.0 * p;
    (s * s * s + 2.0) / 3.0
}

fn cubic_base_d1(p: f64) -> f64 {
    let s = 1.0 - 2.0 * p;
    -2.0 * s * s
}

fn cubic_base_d2(p: f64) -> f64 {
    8.0 * (1.0 - 2.0 * p)
}

/// Rational curve glued to zero over `[0.7, 0.8]` with `R0 = 5`.
///
/// The base factor is normalised so that `pi(0) = 1`; the switch argument
/// `10p - 7` realises the transition interval `[7/10, 4/5]` and the cutoff
/// `p_star = 4/5`.
pub fn make_example1(kernel: &GlueKernel) -> PayoffCurve {
    make_rational_glue_labeled(kernel, 5.0, 0.7, 0.8, "example1".to_string())
        .expect("example1 constants are valid")
}

/// Cubic curve `((1-2p)^3 + 2)/3` glued to zero over `[7/16, 9/16]`.
///
/// The switch argument is `8(2p-1)`, so the transition occupies exactly
/// `[7/16, 9/16]` and `p_star = 9/16`. `pi(0) = 1` and `pi'(0) = -2`.
pub fn make_example2(kernel: &GlueKernel) -> PayoffCurve {
    PayoffCurve {
        label: "example2".to_string(),
        p_star: CUBIC_HI,
        kinks: vec![CUBIC_LO, CUBIC_HI],
        form: CurveForm::CubicGlue {
            kernel: kernel.clone(),
        },
    }
}

/// Convex power-law curve `(1 - p/p_star)^exponent`, truncated at `p_star`.
pub fn make_convex_test(p_star: f64, exponent: u32) -> Result<PayoffCurve, Error> {
    make_convex_scaled(p_star, exponent, 1.0)
}

pub(crate) fn make_convex_scaled(p_star: f64, exponent: u32, scale: f64) -> Result<PayoffCurve, Error> {
    if !(p_star > 0.0 && p_star < 1.0) {
        return Err(Error::invalid_parameter(
            "p_star",
            format!("must lie in (0, 1), got {p_star}"),
        ));
    }
    if exponent < 2 {
        return Err(Error::invalid_parameter(
            "exponent",
            format!("must be >= 2, got {exponent}"),
        ));
    }
    Ok(PayoffCurve {
        label: format!("convex_test(p_star={p_star},exponent={exponent})"),
        p_star,
        kinks: vec![p_star],
        form: CurveForm::ConvexPower {
            p_star,
            exponent,
            scale,
        },
    })
}

/// General rational-base curve with a configurable reproductive ratio and
/// transition interval `[lo, hi]`; `hi` becomes the cutoff.
pub fn make_rational_glue(
    kernel: &GlueKernel,
    r0: f64,
    lo: f64,
    hi: f64,
) -> Result<PayoffCurve, Error> {
    let label = format!("rational_glue(r0={r0},lo={lo},hi={hi})");
    make_rational_glue_labeled(kernel, r0, lo, hi, label)
}

fn make_rational_glue_labeled(
    kernel: &GlueKernel,
    r0: f64,
    lo: f64,
    hi: f64,
    label: String,
) -> Result<PayoffCurve, Error> {
    if !(r0 > 1.0) {
        return Err(Error::invalid_parameter(
            "R0",
            format!("must be > 1, got {r0}"),
        ));
    }
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::invalid_parameter(
            "transition",
            format!("need 0 <= lo < hi <= 1, got lo={lo}, hi={hi}"),
        ));
    }
    // The base factor reaches zero at 1 - 1/r0; past that it is negative,
    // so the transition must finish no later.
    let base_zero = 1.0 - 1.0 / r0;
    if hi > base_zero + 1e-12 {
        return Err(Error::invalid_parameter(
            "transition_hi",
            format!("must be <= 1 - 1/R0 = {base_zero} (pi would go negative), got {hi}"),
        ));
    }
    Ok(PayoffCurve {
        label,
        p_star: hi,
        kinks: vec![lo, hi],
        form: CurveForm::RationalGlue {
            r0,
            lo,
            hi,
            kernel: kernel.clone(),
        },
    })
}

/// Curve family selector with optional per-family parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveFamily {
    Example1,
    Example2,
    ConvexTest,
    RationalGlue,
}

impl CurveFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CurveFamily::Example1 => "example1",
            CurveFamily::Example2 => "example2",
            CurveFamily::ConvexTest => "convex_test",
            CurveFamily::RationalGlue => "rational_glue",
        }
    }
}

/// Declarative description of a curve; [`CurveFamilySpec::build`] applies
/// per-family defaults and rejects parameters that do not belong to the
/// chosen family.
#[derive(Clone, Debug, Default)]
pub struct CurveFamilySpec {
    pub family: Option<CurveFamily>,
    pub r0: Option<f64>,
    pub transition_lo: Option<f64>,
    pub transition_hi: Option<f64>,
    pub p_star: Option<f64>,
    pub exponent: Option<u32>,
}

impl CurveFamilySpec {
    pub fn example1() -> Self {
        CurveFamilySpec {
            family: Some(CurveFamily::Example1),
            ..Default::default()
        }
    }

    pub fn example2() -> Self {
        CurveFamilySpec {
            family: Some(CurveFamily::Example2),
            ..Default::default()
        }
    }

    pub fn convex_test(p_star: f64, exponent: u32) -> Self {
        CurveFamilySpec {
            family: Some(CurveFamily::ConvexTest),
            p_star: Some(p_star),
            exponent: Some(exponent),
            ..Default::default()
        }
    }

    pub fn build(&self, kernel: &GlueKernel) -> Result<PayoffCurve, Error> {
        let family = self
            .family
            .ok_or_else(|| Error::CurveSpec("missing field `family`".to_string()))?;
        match family {
            CurveFamily::Example1 => {
                self.reject_fields(family, &[("transition_lo", self.transition_lo.is_some()),
                    ("transition_hi", self.transition_hi.is_some()),
                    ("p_star", self.p_star.is_some()),
                    ("exponent", self.exponent.is_some())])?;
                let r0 = self.r0.unwrap_or(5.0);
                let label = if r0 == 5.0 {
                    "example1".to_string()
                } else {
                    format!("example1(r0={r0})")
                };
                make_rational_glue_labeled(kernel, r0, 0.7, 0.8, label)
            }
            CurveFamily::Example2 => {
                self.reject_fields(family, &[("R0", self.r0.is_some()),
                    ("transition_lo", self.transition_lo.is_some()),
                    ("transition_hi", self.transition_hi.is_some()),
                    ("p_star", self.p_star.is_some()),
                    ("exponent", self.exponent.is_some())])?;
                Ok(make_example2(kernel))
            }
            CurveFamily::ConvexTest => {
                self.reject_fields(family, &[("R0", self.r0.is_some()),
                    ("transition_lo", self.transition_lo.is_some()),
                    ("transition_hi", self.transition_hi.is_some())])?;
                make_convex_test(self.p_star.unwrap_or(0.8), self.exponent.unwrap_or(3))
            }
            CurveFamily::RationalGlue => {
                self.reject_fields(family, &[("p_star", self.p_star.is_some()),
                    ("exponent", self.exponent.is_some())])?;
                make_rational_glue(
                    kernel,
                    self.r0.unwrap_or(5.0),
                    self.transition_lo.unwrap_or(0.7),
                    self.transition_hi.unwrap_or(0.8),
                )
            }
        }
    }

    fn reject_fields(&self, family: CurveFamily, fields: &[(&str, bool)]) -> Result<(), Error> {
        for (name, present) in fields {
            if *present {
                return Err(Error::CurveSpec(format!(
                    "field `{name}` is not applicable to family {}",
                    family.name()
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a single assumption check.
#[derive(Clone, Debug)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst violation magnitude observed (0 when clean).
    pub worst: f64,
    /// Grid location of the worst violation.
    pub at: f64,
}

/// Per-assumption validation results. Failures are reported, never thrown.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// Supplied derivatives agree with finite differences of `pi`.
    pub smoothness: AssumptionCheck,
    /// `0 <= pi <= 1` on the grid.
    pub range: AssumptionCheck,
    /// `dpi <= 1e-12` on the grid (plateaus where `pi` is constant are
    /// admitted, hence not strict negativity).
    pub monotonicity: AssumptionCheck,
    /// `pi(0) = 1`.
    pub normalization: AssumptionCheck,
    /// `pi(p) = 0` exactly for `p >= p_star`.
    pub cutoff: AssumptionCheck,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.iter().all(|c| c.passed)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AssumptionCheck> {
        [
            &self.smoothness,
            &self.range,
            &self.monotonicity,
            &self.normalization,
            &self.cutoff,
        ]
        .into_iter()
    }
}

/// Exclusion radius around transition endpoints for derivative checks.
const KINK_EXCLUSION: f64 = 1e-3;
/// Step for the five-point difference stencils.
const FD_STEP: f64 = 1e-4;
/// Relative tolerance for derivative agreement.
const SMOOTHNESS_RTOL: f64 = 1e-5;

/// Checks the five standing assumptions on a uniform grid of `grid_n + 1`
/// points and reports pass/fail with worst-case violation magnitudes.
pub fn validate(curve: &PayoffCurve, grid_n: usize) -> Result<ValidationReport, Error> {
    if grid_n < 16 {
        return Err(Error::invalid_parameter(
            "grid_n",
            format!("must be >= 16, got {grid_n}"),
        ));
    }
    let n = grid_n;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();

    // Assumption 1: smoothness, proxied by FD agreement of the supplied
    // derivatives away from the transition endpoints.
    let clear_of_kinks = |p: f64| {
        curve
            .kinks()
            .iter()
            .all(|k| (p - k).abs() >= KINK_EXCLUSION)
    };
    let checked: Vec<f64> = grid.iter().copied().filter(|&p| clear_of_kinks(p)).collect();
    let scale1 = checked
        .iter()
        .map(|&p| curve.dpi(p).abs())
        .fold(0.0, f64::max);
    let scale2 = checked
        .iter()
        .map(|&p| curve.d2pi(p).abs())
        .fold(0.0, f64::max);
    let floor1 = (1e-2 * scale1).max(1e-8);
    let floor2 = (1e-2 * scale2).max(1e-8);
    let mut smooth_worst = 0.0f64;
    let mut smooth_at = 0.0;
    for &p in &checked {
        let fd1 = five_point_d1(|x| curve.pi(x), p, FD_STEP);
        let v1 = curve.dpi(p);
        let rel1 = (fd1 - v1).abs() / v1.abs().max(fd1.abs()).max(floor1);
        let fd2 = five_point_d2(|x| curve.pi(x), p, FD_STEP);
        let v2 = curve.d2pi(p);
        let rel2 = (fd2 - v2).abs() / v2.abs().max(fd2.abs()).max(floor2);
        let rel = rel1.max(rel2);
        if rel > smooth_worst {
            smooth_worst = rel;
            smooth_at = p;
        }
    }
    let smoothness = AssumptionCheck {
        name: "smoothness",
        passed: smooth_worst <= SMOOTHNESS_RTOL,
        worst: smooth_worst,
        at: smooth_at,
    };

    // Assumption 2: range.
    let mut range_worst = 0.0f64;
    let mut range_at = 0.0;
    for &p in &grid {
        let v = curve.pi(p);
        let viol = (-v).max(v - 1.0).max(0.0);
        if viol > range_worst {
            range_worst = viol;
            range_at = p;
        }
    }
    let range = AssumptionCheck {
        name: "range",
        passed: range_worst <= 1e-12,
        worst: range_worst,
        at: range_at,
    };

    // Assumption 3: monotone non-increasing.
    let mut mono_worst = 0.0f64;
    let mut mono_at = 0.0;
    for &p in &grid {
        let v = curve.dpi(p).max(0.0);
        if v > mono_worst {
            mono_worst = v;
            mono_at = p;
        }
    }
    let monotonicity = AssumptionCheck {
        name: "monotonicity",
        passed: mono_worst <= 1e-12,
        worst: mono_worst,
        at: mono_at,
    };

    // Assumption 4: pi(0) = 1.
    let norm_err = (curve.pi(0.0) - 1.0).abs();
    let normalization = AssumptionCheck {
        name: "normalization",
        passed: norm_err <= 1e-12,
        worst: norm_err,
        at: 0.0,
    };

    // Assumption 5: identically zero beyond the cutoff, exactly.
    let mut cut_worst = 0.0f64;
    let mut cut_at = curve.p_star();
    for &p in &grid {
        if p >= curve.p_star() {
            let v = curve.pi(p).abs();
            if v > cut_worst {
                cut_worst = v;
                cut_at = p;
            }
        }
    }
    let cutoff = AssumptionCheck {
        name: "cutoff",
        passed: cut_worst == 0.0,
        worst: cut_worst,
        at: cut_at,
    };

    Ok(ValidationReport {
        smoothness,
        range,
        monotonicity,
        normalization,
        cutoff,
    })
}

/// Five-point central difference for the first derivative, O(h^4).
pub fn five_point_d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Five-point central difference for the second derivative, O(h^4).
pub fn five_point_d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel() -> GlueKernel {
        GlueKernel::new().unwrap()
    }

    #[test]
    fn example1_endpoint_values() {
        let c = make_example1(&kernel());
        assert_eq!(c.pi(0.0), 1.0);
        assert_eq!(c.pi(0.9), 0.0);
        assert_eq!(c.pi(0.8), 0.0);
        assert_eq!(c.p_star(), 0.8);
    }

    #[test]
    fn example1_transition_value() {
        // At p = 0.75 the switch is exactly 1/2 (midpoint symmetry), so
        // pi = base(0.75)/2, strictly below the unglued base.
        let k = kernel();
        let c = make_example1(&k);
        let base = rational_base(5.0, 0.75);
        let gt = 1.0 - k.glue(0.5);
        assert!((gt - 0.5).abs() < 1e-13);
        let v = c.pi(0.75);
        assert!((v - base * gt).abs() < 1e-15);
        assert!(v > 0.0 && v < base);
    }

    #[test]
    fn example2_endpoint_values() {
        let c = make_example2(&kernel());
        assert_eq!(c.pi(0.0), 1.0);
        assert_eq!(c.pi(0.6), 0.0);
        assert_eq!(c.p_star(), 9.0 / 16.0);
    }

    #[test]
    fn example2_slope_at_zero() {
        let c = make_example2(&kernel());
        assert_eq!(c.dpi(0.0), -2.0);
    }

    #[test]
    fn convex_test_values() {
        let c = make_convex_test(0.8, 3).unwrap();
        assert_eq!(c.pi(0.0), 1.0);
        assert_eq!(c.pi(0.8), 0.0);
        assert!((c.pi(0.4) - 0.125).abs() < 1e-15);
        assert!(c.is_convex(4096));
    }

    #[test]
    fn convex_test_rejects_bad_parameters() {
        assert!(make_convex_test(0.0, 3).is_err());
        assert!(make_convex_test(1.0, 3).is_err());
        assert!(make_convex_test(0.5, 1).is_err());
    }

    #[test]
    fn rational_glue_rejects_inconsistent_cutoff() {
        let k = kernel();
        assert!(make_rational_glue(&k, 2.0, 0.7, 0.8).is_err());
        assert!(make_rational_glue(&k, 5.0, 0.8, 0.7).is_err());
        assert!(make_rational_glue(&k, 0.5, 0.1, 0.2).is_err());
        assert!(make_rational_glue(&k, 10.0, 0.7, 0.8).is_ok());
    }

    #[test]
    fn derivative_consistency_on_grid() {
        let k = kernel();
        for c in [
            make_example1(&k),
            make_example2(&k),
            make_convex_test(0.8, 3).unwrap(),
            make_rational_glue(&k, 10.0, 0.5, 0.8).unwrap(),
        ] {
            let report = validate(&c, 1024).unwrap();
            assert!(
                report.all_passed(),
                "{}: {:?}",
                c.label(),
                report.iter().find(|a| !a.passed)
            );
        }
    }

    #[test]
    fn broken_normalization_fixture_fails_assumption_four() {
        let c = make_convex_scaled(0.8, 3, 0.9).unwrap();
        let report = validate(&c, 256).unwrap();
        assert!(!report.normalization.passed);
        assert!((report.normalization.worst - 0.1).abs() < 1e-15);
        assert!(report.range.passed);
        assert!(report.monotonicity.passed);
        assert!(report.cutoff.passed);
        assert!(!report.all_passed());
    }

    #[test]
    fn spec_build_applies_defaults_and_rejects_foreign_fields() {
        let k = kernel();
        let c = CurveFamilySpec::example1().build(&k).unwrap();
        assert_eq!(c.label(), "example1");

        let mut s = CurveFamilySpec::example1();
        s.r0 = Some(0.5);
        assert!(s.build(&k).is_err());

        let mut s = CurveFamilySpec::example2();
        s.exponent = Some(3);
        let err = s.build(&k).unwrap_err();
        assert!(err.to_string().contains("exponent"));

        let c = CurveFamilySpec::convex_test(0.8, 3).build(&k).unwrap();
        assert!((c.pi(0.4) - 0.125).abs() < 1e-15);
    }
}
