//! Root-of-unity fits and the per-identity verification record.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Nearest `order`-th root of unity to a ratio of the two sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOfUnityFit<T> {
    pub ratio: Complex<T>,
    pub order: u32,
    /// The fitted root is `exp(2πi·power/order)`.
    pub power: u32,
    pub nearest: Complex<T>,
    pub residual: T,
}

impl<T: Real> RootOfUnityFit<T> {
    pub fn fit(ratio: Complex<T>, order: u32) -> Self {
        assert!(order > 0);
        let (power, nearest, residual) = (0..order)
            .map(|k| {
                let w = root_of_unity::<T>(k, order);
                (k, w, (ratio - w).norm())
            })
            .fold(None, |best: Option<(u32, Complex<T>, T)>, cand| match best {
                Some(b) if b.2 <= cand.2 => Some(b),
                _ => Some(cand),
            })
            .unwrap();
        Self {
            ratio,
            order,
            power,
            nearest,
            residual: if residual.is_nan() { T::infinity() } else { residual },
        }
    }

    /// `||ratio| − 1|`, independent of the phase convention.
    pub fn modulus_defect(&self) -> T {
        (self.ratio.norm() - T::one()).abs()
    }

    /// Ratio with the fitted root divided out.
    pub fn aligned(&self) -> Complex<T> {
        self.ratio / self.nearest
    }
}

pub fn root_of_unity<T: Real>(k: u32, order: u32) -> Complex<T> {
    // exact values on the axes keep fits symmetric
    let num = (4 * k) % (4 * order);
    if num % order == 0 {
        return match num / order {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let angle = T::lit(2.0) * T::PI() * T::from_u32(k).unwrap() / T::from_u32(order).unwrap();
    Complex::new(angle.cos(), angle.sin())
}

/// A root-of-unity fit plus the spread of the component-wise ratios when the
/// two sides are vectors or matrices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityFit<T> {
    pub fit: RootOfUnityFit<T>,
    /// `max_k |lhs_k − r·rhs_k| / max_k |lhs_k|` for the least-squares ratio `r`;
    /// zero for scalar identities.
    pub spread: T,
}

impl<T: Real> IdentityFit<T> {
    pub fn scalar(lhs: Complex<T>, rhs: Complex<T>, order: u32) -> Self {
        Self {
            fit: RootOfUnityFit::fit(lhs / rhs, order),
            spread: T::zero(),
        }
    }

    /// Common ratio of two vectors (least squares) and its consistency.
    pub fn vectors(lhs: &[Complex<T>], rhs: &[Complex<T>], order: u32) -> Self {
        assert_eq!(lhs.len(), rhs.len());
        let num = lhs.iter().zip(rhs).fold(Complex::zero(), |s, (l, r)| s + r.conj() * l);
        let den = rhs.iter().fold(T::zero(), |s, r| s + r.norm_sqr());
        let ratio = num / den;
        let scale = lhs.iter().fold(T::zero(), |m, l| m.max(l.norm()));
        let dev = lhs
            .iter()
            .zip(rhs)
            .fold(T::zero(), |m, (l, r)| m.max((*l - ratio * r).norm()));
        let spread = if scale > T::zero() { dev / scale } else { T::infinity() };
        Self {
            fit: RootOfUnityFit::fit(ratio, order),
            spread: if spread.is_nan() { T::infinity() } else { spread },
        }
    }

    pub fn matrices(candidate: &CMatrix<T>, reference: &CMatrix<T>, order: u32) -> Self {
        Self::vectors(candidate.as_slice(), reference.as_slice(), order)
    }

    pub fn residual(&self) -> T {
        self.fit.residual
    }

    pub fn pass(&self, tol: T) -> bool {
        self.fit.residual < tol && self.spread < tol
    }
}

/// One verified identity, as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub indices: BTreeMap<String, Vec<usize>>,
    pub ratio: [f64; 2],
    pub nearest_root: [f64; 2],
    pub root_order: u32,
    pub root_power: u32,
    pub residual: f64,
    pub spread: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn from_fit<T: Real>(
        identity: &str,
        indices: &[(&str, Vec<usize>)],
        fit: &IdentityFit<T>,
        tol: T,
    ) -> Self {
        Self {
            identity: identity.to_string(),
            indices: indices.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            ratio: [fit.fit.ratio.re.to_f64_lossy(), fit.fit.ratio.im.to_f64_lossy()],
            nearest_root: [fit.fit.nearest.re.to_f64_lossy(), fit.fit.nearest.im.to_f64_lossy()],
            root_order: fit.fit.order,
            root_power: fit.fit.power,
            residual: fit.fit.residual.to_f64_lossy(),
            spread: fit.spread.to_f64_lossy(),
            pass: fit.pass(tol),
            note: None,
        }
    }

    /// Record for an identity checked by a plain relative residual (no phase freedom).
    pub fn from_residual(identity: &str, indices: &[(&str, Vec<usize>)], residual: f64, tol: f64) -> Self {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        Self {
            identity: identity.to_string(),
            indices: indices.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            ratio: [1.0, 0.0],
            nearest_root: [1.0, 0.0],
            root_order: 1,
            root_power: 0,
            residual,
            spread: 0.0,
            pass: residual < tol,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A failed record for an identity that could not be evaluated.
    pub fn failed(identity: &str, indices: &[(&str, Vec<usize>)], note: impl Into<String>) -> Self {
        Self {
            identity: identity.to_string(),
            indices: indices.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            ratio: [f64::NAN, f64::NAN],
            nearest_root: [f64::NAN, f64::NAN],
            root_order: 0,
            root_power: 0,
            residual: f64::INFINITY,
            spread: f64::INFINITY,
            pass: false,
            note: Some(note.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_picks_nearest_root() {
        let w = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4 * 3.0);
        let f = RootOfUnityFit::fit(w * 1.001, 8);
        assert_eq!(f.power, 3);
        assert!((f.residual - 0.001).abs() < 1e-12);
        for k in 0..8 {
            assert!(f.residual <= (f.ratio - root_of_unity::<f64>(k, 8)).norm());
        }
        assert_eq!(RootOfUnityFit::fit(Complex::new(-0.9, 0.1), 2).power, 1);
    }

    #[test]
    fn vector_fit_detects_inconsistent_components() {
        let l = [Complex::new(1.0, 0.0), Complex::new(2.0, 0.0)];
        let r = [Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0)];
        let f = IdentityFit::vectors(&l, &r, 8);
        assert!(f.spread > 0.5);
        let f = IdentityFit::vectors(&l, &l.map(|z| z * Complex::new(0.0, 1.0)), 8);
        assert!(f.spread < 1e-15 && f.fit.power == 6);
    }

    #[test]
    fn nan_ratio_never_passes() {
        let f = IdentityFit::scalar(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), 8);
        assert!(!f.pass(1e-8));
    }
}
