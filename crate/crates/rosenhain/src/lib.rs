//! Period matrices of real hyperelliptic curves, Riemann theta constants with
//! half-integer characteristics, and the theta-constant expressions for the
//! inverse period matrix (generalized Rosenhain formulae), together with
//! numerical checks of the Thomae, Riemann–Jacobi and Bolza identities.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`); the branch-point
//! combinatorics in [`curve`] also work over exact fields such as
//! `num_rational::Ratio<i64>`. The aliases at the crate root fix `f64`, which is
//! what the command-line tool uses.

pub mod characteristics;
pub mod curve;
pub mod error;
pub mod io;
pub mod linalg;
pub mod periods;
pub mod quadrature;
pub mod report;
pub mod rosenhain;
pub mod scalar;
pub mod theta;
pub mod thomae;
pub mod verify;

pub use characteristics::{Characteristic, IntCharacteristic, Parity};
pub use curve::{Partition, Polynomial};
pub use error::{Error, Result};
pub use num_complex::Complex;
pub use report::{IdentityFit, RootOfUnityFit, VerificationReport};
pub use scalar::{Field, Real};

pub type Complex64 = num_complex::Complex<f64>;
pub type HyperellipticCurve = curve::HyperellipticCurve<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type SiegelMatrix = theta::SiegelMatrix<f64>;
pub type ThetaTable = theta::ThetaTable<f64>;
pub type PeriodData = periods::PeriodData<f64>;
pub type CurveData = thomae::CurveData<f64>;

/// Tolerance ladder shared by the library and the CLI.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute bound on the omitted tail of every theta series.
    pub series: f64,
    /// Convergence target of the period quadrature.
    pub quadrature: f64,
    /// Residual below which an identity counts as verified.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            series: 1e-12,
            quadrature: 1e-12,
            identity: 1e-8,
        }
    }
}
