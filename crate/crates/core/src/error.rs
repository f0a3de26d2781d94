use thiserror::Error;

/// Errors reported by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The adaptive quadrature could not reach the requested tolerance
    /// within the subdivision budget.
    #[error("quadrature did not reach tolerance {tol:e} (residual estimate {residual:e})")]
    QuadratureTolerance { tol: f64, residual: f64 },

    /// A state value was evaluated outside the unit interval.
    #[error("state P = {value} lies outside [0, 1]")]
    DomainError { value: f64 },

    /// The curve specification is inconsistent.
    #[error("curve spec: {0}")]
    CurveSpec(String),

    /// `r = 0` makes every P above the cutoff an equilibrium, so no finite
    /// equilibrium list exists.
    #[error("relative risk r = 0: every P > p_star is an equilibrium (a continuum); no finite list exists")]
    ZeroRiskContinuum,

    /// The solver found no equilibrium, which contradicts existence for
    /// valid inputs and indicates an internal fault.
    #[error("no equilibrium found on [0, p_star] (existence guarantees at least one); internal error")]
    NoEquilibrium,

    /// A root refinement failed to converge.
    #[error("root refinement did not converge in {iterations} iterations (bracket [{lo}, {hi}])")]
    RootRefinement { iterations: usize, lo: f64, hi: f64 },

    /// Sensitivities are undefined at a degenerate equilibrium.
    #[error("equilibrium at P = {p} is degenerate (|f'| = {f_prime_abs:e} <= {tol:e})")]
    DegenerateEquilibrium { p: f64, f_prime_abs: f64, tol: f64 },

    /// An operation requiring convexity was called on a non-convex curve.
    #[error("curve `{label}` is not convex: min d2pi = {min_d2:e} at p = {at}")]
    NotConvex { label: String, min_d2: f64, at: f64 },

    /// The equilibrium count changed by an odd amount across a parameter
    /// step, so the event is not a clean saddle-node pair.
    #[error("equilibrium count changed by {delta} (odd) between params {lo} and {hi}; a root escaped the domain boundary or a tolerance failed")]
    OddCountChange { delta: i64, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid_parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
