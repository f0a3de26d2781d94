//! Smooth bump kernel and the gluing switch built from its primitive.
//!
//! The kernel is the classic compactly supported C-infinity function
//! `exp(1/(t^2-1))` on (-1, 1). Integrating it gives a primitive `H`, and
//! normalising by `H(1)` gives a monotone switch `g(x) = H(2x-1)/H(1)` that
//! is exactly 0 for `x <= 0` and exactly 1 for `x >= 1`. The payoff curves
//! use reflected/rescaled copies of `g` to shut themselves off smoothly at
//! the herd-immunity cutoff.

use std::sync::Arc;

use crate::error::Error;

/// Default absolute tolerance for the adaptive quadrature.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-12;

/// Maximum subdivision depth of the adaptive Simpson rule.
pub const MAX_QUADRATURE_DEPTH: u32 = 60;

/// Reciprocal of the kernel's full integral, `1/H(1)`.
///
/// This is the normalisation constant of the gluing switch; the kernel
/// constructor is expected to reproduce it to 1e-9.
pub const RECIP_H1: f64 = 2.2522836206907613;

/// Number of uniform panels in the cached primitive table.
const TABLE_PANELS: usize = 4096;

/// Bump kernel: `exp(1/(t^2-1))` for |t| < 1, zero elsewhere.
///
/// Total and infinitely differentiable; the maximum value `exp(-1)` is
/// attained at t = 0.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 / (t * t - 1.0)).exp()
    } else {
        0.0
    }
}

/// First derivative of [`bump`]: `bump(t) * (-2t)/(t^2-1)^2`.
pub fn bump_d1(t: f64) -> f64 {
    if t.abs() < 1.0 {
        let q = t * t - 1.0;
        bump(t) * (-2.0 * t) / (q * q)
    } else {
        0.0
    }
}

/// Second derivative of [`bump`].
pub fn bump_d2(t: f64) -> f64 {
    if t.abs() < 1.0 {
        let q = t * t - 1.0;
        // bump = e^u with u = 1/q; bump'' = e^u (u'' + u'^2).
        let u1 = -2.0 * t / (q * q);
        let u2 = (6.0 * t * t + 2.0) / (q * q * q);
        bump(t) * (u2 + u1 * u1)
    } else {
        0.0
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
///
/// Errors when the tolerance cannot be met within `max_depth` levels of
/// subdivision.
pub(crate) fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Accept at `tol` rather than the textbook `15 tol`: the factor-15
    // proxy underestimates the true error in the kernel's flat tails.
    if delta.abs() <= tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureTolerance {
            tol,
            residual: delta.abs() / 15.0,
        });
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Dense prefix table of `H(x) = int_{-1}^{x} bump`, with the exact kernel
/// values as nodal derivatives so the interpolant is cubic Hermite.
#[derive(Debug)]
struct PrimitiveTable {
    step: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

impl PrimitiveTable {
    fn build() -> Self {
        let n = TABLE_PANELS;
        let step = 2.0 / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut derivs = Vec::with_capacity(n + 1);
        values.push(0.0);
        derivs.push(bump(-1.0));
        // Neumaier-compensated prefix sum keeps the cumulative rounding at
        // machine level over all panels.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for i in 0..n {
            let lo = -1.0 + i as f64 * step;
            let hi = lo + step;
            let c = 0.5 * (lo + hi);
            let h = 0.5 * (hi - lo);
            let mut panel = 0.0;
            for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
                panel += w * bump(c + h * x);
            }
            panel *= h;
            let t = sum + panel;
            comp += if sum.abs() >= panel.abs() {
                (sum - t) + panel
            } else {
                (panel - t) + sum
            };
            sum = t;
            values.push(sum + comp);
            derivs.push(bump(hi));
        }
        PrimitiveTable { step, values, derivs }
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return *self.values.last().unwrap();
        }
        let pos = (x + 1.0) / self.step;
        let idx = (pos.floor() as usize).min(self.values.len() - 2);
        let t0 = -1.0 + idx as f64 * self.step;
        let s = (x - t0) / self.step;
        let s2 = s * s;
        let s3 = s2 * s;
        let f0 = self.values[idx];
        let f1 = self.values[idx + 1];
        // Fritsch-Carlson limiting (nodal slopes capped at 3x the secant)
        // keeps the cubic monotone inside every panel. The cap only binds
        // in the underflow tails where the kernel spans orders of magnitude
        // per panel; interior accuracy is untouched.
        let cap = 3.0 * (f1 - f0);
        let d0 = (self.derivs[idx] * self.step).min(cap);
        let d1 = (self.derivs[idx + 1] * self.step).min(cap);
        f0 * (2.0 * s3 - 3.0 * s2 + 1.0) + f1 * (3.0 * s2 - 2.0 * s3) + d0 * (s3 - 2.0 * s2 + s)
            + d1 * (s3 - s2)
    }
}

/// Quadrature context for the gluing construction.
///
/// Holds the kernel's full integral `H(1)` (computed once by adaptive
/// Simpson) and a dense cached table of the primitive that backs the fast
/// evaluation path used by the payoff curves. The kernel is immutable after
/// construction and cheap to clone.
#[derive(Clone, Debug)]
pub struct GlueKernel {
    quadrature_abs_tol: f64,
    h1: f64,
    table: Arc<PrimitiveTable>,
}

impl GlueKernel {
    /// Builds a kernel with the default quadrature tolerance.
    pub fn new() -> Result<Self, Error> {
        Self::with_tolerance(DEFAULT_QUADRATURE_TOL)
    }

    /// Builds a kernel with a caller-chosen absolute quadrature tolerance.
    pub fn with_tolerance(tol: f64) -> Result<Self, Error> {
        if !(tol > 0.0) {
            return Err(Error::invalid_parameter(
                "quadrature_abs_tol",
                format!("must be positive, got {tol}"),
            ));
        }
        let h1 = adaptive_simpson(&bump, -1.0, 1.0, tol, MAX_QUADRATURE_DEPTH)?;
        let table = PrimitiveTable::build();
        let kernel = GlueKernel {
            quadrature_abs_tol: tol,
            h1,
            table: Arc::new(table),
        };
        debug_assert!((kernel.primitive_cached(1.0) - h1).abs() <= 1e-12);
        Ok(kernel)
    }

    /// The cached full integral `H(1)`.
    pub fn h1(&self) -> f64 {
        self.h1
    }

    /// Absolute tolerance used by [`GlueKernel::glue_primitive`].
    pub fn quadrature_abs_tol(&self) -> f64 {
        self.quadrature_abs_tol
    }

    /// Primitive `H(x) = int_{-1}^{x} bump(t) dt` by adaptive quadrature.
    ///
    /// This is the reference route; it re-integrates on every call and
    /// reports an error if the tolerance cannot be met.
    pub fn glue_primitive(&self, x: f64) -> Result<f64, Error> {
        if x <= -1.0 {
            return Ok(0.0);
        }
        if x >= 1.0 {
            return Ok(self.h1);
        }
        adaptive_simpson(&bump, -1.0, x, self.quadrature_abs_tol, MAX_QUADRATURE_DEPTH)
    }

    /// Primitive `H(x)` from the cached table (cubic Hermite between nodes).
    ///
    /// Agrees with [`GlueKernel::glue_primitive`] to better than 1e-12 and
    /// costs a table lookup instead of a quadrature; the curve evaluation
    /// hot path goes through here.
    pub fn primitive_cached(&self, x: f64) -> f64 {
        self.table.eval(x)
    }

    /// Gluing switch `g(x) = H(2x-1)/H(1)`: 0 for x <= 0, 1 for x >= 1,
    /// strictly increasing in between.
    pub fn glue(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            self.primitive_cached(2.0 * x - 1.0) / self.h1
        }
    }

    /// First derivative of the switch, `2 bump(2x-1)/H(1)`.
    pub fn glue_d1(&self, x: f64) -> f64 {
        2.0 * bump(2.0 * x - 1.0) / self.h1
    }

    /// Second derivative of the switch, `4 bump'(2x-1)/H(1)`.
    pub fn glue_d2(&self, x: f64) -> f64 {
        4.0 * bump_d1(2.0 * x - 1.0) / self.h1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        assert!((bump(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.0), 0.0);
        assert_eq!(bump(-2.0), 0.0);
        assert_eq!(bump(2.0), 0.0);
        assert!(bump(0.5) > 0.0 && bump(0.5) < (-1.0f64).exp());
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let h = 1e-6;
        for &t in &[-0.9, -0.5, -0.1, 0.0, 0.3, 0.7, 0.95] {
            let fd1 = (bump(t + h) - bump(t - h)) / (2.0 * h);
            assert!(
                (bump_d1(t) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()),
                "bump_d1 mismatch at t={t}: {} vs {}",
                bump_d1(t),
                fd1
            );
            let fd2 = (bump_d1(t + h) - bump_d1(t - h)) / (2.0 * h);
            assert!(
                (bump_d2(t) - fd2).abs() < 1e-5 * (1.0 + fd2.abs()),
                "bump_d2 mismatch at t={t}"
            );
        }
    }

    #[test]
    fn primitive_boundary_values() {
        let k = GlueKernel::new().unwrap();
        assert_eq!(k.glue_primitive(-1.0).unwrap(), 0.0);
        assert_eq!(k.glue_primitive(-3.0).unwrap(), 0.0);
        assert_eq!(k.glue_primitive(1.0).unwrap(), k.h1());
        assert_eq!(k.glue_primitive(5.0).unwrap(), k.h1());
    }

    #[test]
    fn h1_matches_normalisation_constant() {
        let k = GlueKernel::new().unwrap();
        assert!(
            (1.0 / k.h1() - RECIP_H1).abs() < 1e-9,
            "1/H(1) = {}",
            1.0 / k.h1()
        );
    }

    #[test]
    fn primitive_half_by_symmetry() {
        let k = GlueKernel::new().unwrap();
        let h0 = k.glue_primitive(0.0).unwrap();
        assert!((h0 - 0.5 * k.h1()).abs() < 1e-12);
        assert!((k.primitive_cached(0.0) - 0.5 * k.h1()).abs() < 1e-13);
    }

    #[test]
    fn cached_primitive_tracks_adaptive_route() {
        let k = GlueKernel::new().unwrap();
        let mut worst = 0.0f64;
        for i in 0..=400 {
            let x = -1.0 + 2.0 * i as f64 / 400.0;
            let a = k.glue_primitive(x).unwrap();
            let c = k.primitive_cached(x);
            worst = worst.max((a - c).abs());
        }
        assert!(worst <= 1e-12, "worst cached/adaptive gap {worst}");
    }

    #[test]
    fn glue_endpoint_and_midpoint_values() {
        let k = GlueKernel::new().unwrap();
        assert_eq!(k.glue(0.0), 0.0);
        assert_eq!(k.glue(-0.2), 0.0);
        assert_eq!(k.glue(1.0), 1.0);
        assert_eq!(k.glue(1.4), 1.0);
        assert!((k.glue(0.5) - 0.5).abs() < 1e-13);
    }

    #[test]
    fn glue_is_monotone() {
        let k = GlueKernel::new().unwrap();
        let mut prev = -1.0;
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            let g = k.glue(x);
            assert!(g >= prev, "glue not monotone at x={x}");
            prev = g;
        }
    }

    #[test]
    fn glue_derivative_matches_finite_difference() {
        let k = GlueKernel::new().unwrap();
        let h = 1e-6;
        for i in 1..40 {
            let x = i as f64 / 40.0;
            let fd = (k.glue(x + h) - k.glue(x - h)) / (2.0 * h);
            assert!((k.glue_d1(x) - fd).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn unreachable_tolerance_is_an_error() {
        // Depth exhaustion must surface as a quadrature error, not a panic.
        let err = adaptive_simpson(&bump, -1.0, 0.73, 1e-60, 8);
        assert!(matches!(err, Err(Error::QuadratureTolerance { .. })));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(GlueKernel::with_tolerance(0.0).is_err());
        assert!(GlueKernel::with_tolerance(-1e-9).is_err());
    }
}
