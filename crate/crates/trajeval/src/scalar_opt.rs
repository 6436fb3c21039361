//! Derivative-free one-dimensional minimization by golden-section search.
//!
//! The search only evaluates the objective; no gradient or Hessian is
//! required. The bracket shrinks by the factor phi - 1 (about 0.618) per
//! iteration, so the minimizer of a unimodal function is located to within
//! the requested tolerance. Non-unimodal objectives are accepted without
//! detection and yield a local answer.

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Real};

/// Search bracket `[a, b]` with termination controls.
#[derive(Debug, Clone, Copy)]
pub struct ScalarInterval<T: Real> {
    pub a: T,
    pub b: T,
    pub tolerance: T,
    pub max_iters: usize,
}

impl<T: Real> ScalarInterval<T> {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;
    pub const DEFAULT_MAX_ITERS: usize = 200;

    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParams(format!(
                "interval requires a < b, got [{}, {}]",
                to_f64(a),
                to_f64(b)
            )));
        }
        Ok(Self {
            a,
            b,
            tolerance: real(Self::DEFAULT_TOLERANCE),
            max_iters: Self::DEFAULT_MAX_ITERS,
        })
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Result<Self> {
        if !(tolerance > T::zero()) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be positive".into()));
        }
        self.max_iters = max_iters;
        Ok(self)
    }
}

/// Outcome of a golden-section search.
#[derive(Debug, Clone, Copy)]
pub struct GoldenResult<T: Real> {
    pub x_min: T,
    pub f_min: T,
    pub iterations: usize,
    pub evaluations: usize,
    /// Final bracket width `b - a`.
    pub bracket_width: T,
    /// `false` when `max_iters` was hit before the bracket reached the
    /// tolerance.
    pub converged: bool,
}

/// Minimizes `f` over the interval by golden-section search.
///
/// Two interior probes are evaluated at setup; every iteration afterwards
/// costs exactly one new evaluation. Any non-finite objective value aborts
/// the search.
pub fn golden_section_minimize<T, F>(mut f: F, interval: &ScalarInterval<T>) -> Result<GoldenResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    // 2 - phi = (3 - sqrt 5) / 2: the interior-probe fraction whose
    // complement is the golden shrink factor phi - 1.
    let inv_rho: T = (real::<T>(3.0) - real::<T>(5.0).sqrt()) * real(0.5);

    let mut eval = |x: T| -> Result<T> {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { x: to_f64(x) });
        }
        Ok(v)
    };

    let mut a = interval.a;
    let mut b = interval.b;
    let mut x1 = a + inv_rho * (b - a);
    let mut x2 = b - inv_rho * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut evaluations = 2;
    let mut iterations = 0;

    while (b - a) > interval.tolerance && iterations < interval.max_iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + inv_rho * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - inv_rho * (b - a);
            f2 = eval(x2)?;
        }
        iterations += 1;
        evaluations += 1;
    }

    let (x_min, f_min) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    Ok(GoldenResult {
        x_min,
        f_min,
        iterations,
        evaluations,
        bracket_width: b - a,
        converged: (b - a) <= interval.tolerance,
    })
}
