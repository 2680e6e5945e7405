//! Integrals with inverse square-root singularities at both ends,
//! `∫_a^b h(x) / √((x−a)(b−x)) dx`.
//!
//! With `x = m + r·sin θ` the weight disappears and the integrand becomes smooth
//! and periodic, so the midpoint rule in θ (Gauss–Chebyshev nodes of the first
//! kind) converges geometrically. The node count is doubled until successive
//! estimates agree.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub values: Vec<T>,
    pub nodes: usize,
    /// Largest change between the last two refinements.
    pub change: T,
}

/// Gauss–Chebyshev rule with `n` nodes for a vector-valued `h`.
pub fn chebyshev_rule<T: Real>(
    a: T,
    b: T,
    n: usize,
    dim: usize,
    h: &impl Fn(T, &mut [T]),
) -> Vec<T> {
    let mid = (a + b) / T::lit(2.0);
    let half = (b - a) / T::lit(2.0);
    let nn = T::from_usize(n).unwrap();
    let mut acc = vec![T::zero(); dim];
    let mut buf = vec![T::zero(); dim];
    for k in 0..n {
        let theta = T::PI() * (T::from_usize(2 * k + 1).unwrap()) / (T::lit(2.0) * nn);
        // sin(π/2 − θ) keeps the nodes symmetric about the midpoint
        let x = mid + half * (T::FRAC_PI_2() - theta).sin();
        h(x, &mut buf);
        for (s, v) in acc.iter_mut().zip(&buf) {
            *s = *s + *v;
        }
    }
    acc.into_iter().map(|s| s * T::PI() / nn).collect()
}

/// Refines until every component satisfies `|I_2n − I_n| ≤ tol·max(1, |I_2n|)`.
pub fn integrate_sqrt_endpoints<T: Real>(
    a: T,
    b: T,
    dim: usize,
    tol: T,
    h: impl Fn(T, &mut [T]),
) -> Result<QuadratureResult<T>> {
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let mut n = MIN_NODES;
    let mut prev = chebyshev_rule(a, b, n, dim, &h);
    loop {
        n *= 2;
        let next = chebyshev_rule(a, b, n, dim, &h);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (*p - *q).abs() / q.abs().max(T::one()))
            .fold(T::zero(), T::max);
        if change <= tol {
            return Ok(QuadratureResult {
                values: next,
                nodes: n,
                change,
            });
        }
        if n >= MAX_NODES || !change.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
                change: change.to_f64_lossy(),
            });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weight_integral_is_pi() {
        let r = integrate_sqrt_endpoints(-2.0, 5.0, 1, 1e-14, |_, out: &mut [f64]| out[0] = 1.0).unwrap();
        assert!((r.values[0] - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn polynomial_moments() {
        // ∫_0^1 x^2 / √(x(1−x)) dx = 3π/8
        let r = integrate_sqrt_endpoints(0.0, 1.0, 2, 1e-14, |x, out: &mut [f64]| {
            out[0] = x * x;
            out[1] = x;
        })
        .unwrap();
        assert!((r.values[0] - 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-14);
        assert!((r.values[1] - std::f64::consts::PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn nearby_singularity_needs_more_nodes() {
        // 1/√(x+δ) has a branch point just outside [0, 1]
        let far = integrate_sqrt_endpoints(0.0, 1.0, 1, 1e-13, |x, out: &mut [f64]| out[0] = 1.0 / (x + 1.0).sqrt()).unwrap();
        let near = integrate_sqrt_endpoints(0.0, 1.0, 1, 1e-13, |x, out: &mut [f64]| out[0] = 1.0 / (x + 1e-4).sqrt()).unwrap();
        assert!(near.nodes > far.nodes);
    }

    #[test]
    fn single_precision_rule() {
        let r = integrate_sqrt_endpoints(0.0f32, 1.0, 1, 1e-6, |x, out: &mut [f32]| out[0] = x).unwrap();
        assert!((r.values[0] - std::f32::consts::FRAC_PI_2).abs() < 1e-5);
    }
}
