//! Riemann theta functions with characteristics,
//! `θ[ε](z; τ) = Σ_{m∈ℤ^g} exp{iπ nᵀτn + 2iπ (z + ε/2)ᵀ n}`, `n = m + ε′/2`.
//!
//! The lattice sum is truncated to the ellipsoid `‖n − c‖_Y ≤ ρ` of the
//! quadratic form `Y = Im τ`, centred at the saddle `c = −Y⁻¹ Im z`. Writing
//! `λ = λ_min(Y)` and `y = Im z`, the omitted tail obeys, for every `η ∈ (0,1)`,
//!
//! ```text
//! |tail| ≤ e^{π yᵀY⁻¹y} · e^{−π(1−η)ρ²} · (1 + 1/√(ηλ))^g
//! ```
//!
//! because `e^{−π‖w‖²_Y} ≤ e^{−π(1−η)ρ²} e^{−πηλ|w|²}` outside the ellipsoid and
//! a shifted one-dimensional Gaussian sum is at most `1 + √(π/a)`. For the
//! gradient at `z = 0` each term carries `2π|n_j| ≤ 2π‖n‖_Y/√λ`, which adds the
//! factor `2πρ/√λ` once `ρ² ≥ 1/(2π(1−η))`. The radius `R` reported by
//! [`truncation_radius`] is in units of `√λ`: the summed region is
//! `‖n − c‖_Y ≤ √λ·R`, which contains every point with `|n − c| ≤ R`.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::characteristics::{
    lifted_partition_characteristic, partition_characteristic, Characteristic, IntCharacteristic,
};
use crate::curve::Partition;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, spd_inverse, symmetric_eigenvalues, CMatrix};
use crate::scalar::Real;

pub const MAX_RADIUS: usize = 400;
pub const MAX_LATTICE_POINTS: usize = 4_000_000;
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiegelReport {
    pub symmetry_defect: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl SiegelReport {
    pub fn is_valid(&self, symmetry_tol: f64) -> bool {
        self.symmetry_defect < symmetry_tol && self.min_eigenvalue > 0.0
    }
}

/// Symmetry defect `max|τ − τᵀ|` and the extreme eigenvalues of `Im τ`.
pub fn validate_siegel<T: Real>(tau: &CMatrix<T>) -> SiegelReport {
    let g = tau.rows();
    let mut defect = T::zero();
    for i in 0..g {
        for j in 0..g {
            defect = defect.max((tau[(i, j)] - tau[(j, i)]).norm());
        }
    }
    let ev = symmetric_eigenvalues(&tau.im(), g);
    SiegelReport {
        symmetry_defect: defect.to_f64_lossy(),
        min_eigenvalue: ev.first().map_or(f64::NAN, |x| x.to_f64_lossy()),
        max_eigenvalue: ev.last().map_or(f64::NAN, |x| x.to_f64_lossy()),
    }
}

/// A point of the Siegel upper half-space with the data the series needs.
#[derive(Clone, Debug)]
pub struct SiegelMatrix<T> {
    tau: CMatrix<T>,
    chol: Vec<T>,
    y_inv: Vec<T>,
    min_eigenvalue: T,
}

impl<T: Real> SiegelMatrix<T> {
    pub fn new(tau: CMatrix<T>) -> Result<Self> {
        Self::with_symmetry_tol(tau, T::lit(SYMMETRY_TOL))
    }

    /// Validates and symmetrises `τ`.
    pub fn with_symmetry_tol(tau: CMatrix<T>, symmetry_tol: T) -> Result<Self> {
        if !tau.is_square() || tau.rows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "tau must be a non-empty square matrix, got {}x{}",
                tau.rows(),
                tau.cols()
            )));
        }
        if tau.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("tau has non-finite entries".into()));
        }
        let report = validate_siegel(&tau);
        let g = tau.rows();
        let sym = CMatrix::from_fn(g, g, |i, j| (tau[(i, j)] + tau[(j, i)]) / T::lit(2.0));
        let chol = cholesky(&sym.im(), g);
        match chol {
            Some(chol)
                if report.symmetry_defect < symmetry_tol.to_f64_lossy() && report.min_eigenvalue > 0.0 =>
            {
                let y_inv = spd_inverse(&chol, g);
                Ok(Self {
                    tau: sym,
                    chol,
                    y_inv,
                    min_eigenvalue: T::lit(report.min_eigenvalue),
                })
            }
            _ => Err(Error::NotSiegel {
                defect: report.symmetry_defect,
                min_eigenvalue: report.min_eigenvalue,
            }),
        }
    }

    pub fn genus(&self) -> usize {
        self.tau.rows()
    }

    pub fn tau(&self) -> &CMatrix<T> {
        &self.tau
    }

    pub fn min_eigenvalue(&self) -> T {
        self.min_eigenvalue
    }

    /// Upper-triangular `U` with `Y = UᵀU`, row-major.
    fn upper(&self) -> Vec<T> {
        let g = self.genus();
        let mut u = vec![T::zero(); g * g];
        for i in 0..g {
            for j in 0..g {
                u[i * g + j] = self.chol[j * g + i];
            }
        }
        u
    }
}

fn eta_grid<T: Real>() -> impl Iterator<Item = T> {
    (1..40).map(|k| T::from_usize(k).unwrap() / T::lit(40.0))
}

/// Tail bound for the ellipsoid radius `rho` (in the `Y`-norm).
fn tail_bound<T: Real>(g: usize, lambda: T, rho: T, log_prefactor: T, gradient: bool) -> T {
    let pi = T::PI();
    eta_grid::<T>()
        .map(|eta| {
            let one_minus = T::one() - eta;
            let base = (pi * (log_prefactor - one_minus * rho * rho)).exp()
                * (T::one() + T::one() / (eta * lambda).sqrt()).powi(g as i32);
            if !gradient {
                base
            } else if rho * rho * T::lit(2.0) * pi * one_minus >= T::one() {
                base * T::lit(2.0) * pi * rho / lambda.sqrt()
            } else {
                T::infinity()
            }
        })
        .fold(T::infinity(), T::min)
}

fn radius_for<T: Real>(g: usize, lambda: T, tol: T, log_prefactor: T, gradient: bool) -> Result<usize> {
    if !(lambda > T::zero()) {
        return Err(Error::NotSiegel {
            defect: 0.0,
            min_eigenvalue: lambda.to_f64_lossy(),
        });
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("series tolerance must be positive, got {tol}")));
    }
    let s = lambda.sqrt();
    (1..=MAX_RADIUS)
        .find(|&r| tail_bound(g, lambda, s * T::from_usize(r).unwrap(), log_prefactor, gradient) < tol)
        .ok_or(Error::ToleranceUnachievable {
            tol: tol.to_f64_lossy(),
            max_radius: MAX_RADIUS,
        })
}

/// Smallest `R` whose ellipsoid `‖n‖_Y ≤ √λ_min·R` leaves a theta-constant tail
/// below `tol`. Non-increasing in `tol`.
pub fn truncation_radius<T: Real>(tau: &SiegelMatrix<T>, tol: T) -> Result<usize> {
    radius_for(tau.genus(), tau.min_eigenvalue, tol, T::zero(), false)
}

/// Lattice points `n = m + shift` with `‖n − center‖_Y ≤ rho`, in a fixed order.
fn ellipsoid_points<T: Real>(
    u: &[T],
    g: usize,
    shift: &[T],
    center: &[T],
    rho: T,
) -> Result<Vec<Vec<T>>> {
    let mut out = Vec::new();
    let mut w = vec![T::zero(); g];
    let mut v = vec![T::zero(); g];
    fn recurse<T: Real>(
        level: usize,
        rem: T,
        u: &[T],
        g: usize,
        shift: &[T],
        center: &[T],
        w: &mut [T],
        v: &mut [T],
        out: &mut Vec<Vec<T>>,
    ) -> Result<()> {
        let i = level;
        let t = (i + 1..g).fold(T::zero(), |s, j| s + u[i * g + j] * w[j]);
        let uii = u[i * g + i];
        let half = rem.max(T::zero()).sqrt() / uii;
        let lo = (-t / uii - half + center[i] - shift[i]).ceil();
        let hi = (-t / uii + half + center[i] - shift[i]).floor();
        let mut m = lo;
        while m <= hi {
            v[i] = m + shift[i];
            w[i] = v[i] - center[i];
            let r = uii * w[i] + t;
            let next = rem - r * r;
            if next >= T::zero() {
                if i == 0 {
                    out.push(v.to_vec());
                    if out.len() > MAX_LATTICE_POINTS {
                        return Err(Error::ToleranceUnachievable {
                            tol: f64::NAN,
                            max_radius: MAX_RADIUS,
                        });
                    }
                } else {
                    recurse(i - 1, next, u, g, shift, center, w, v, out)?;
                }
            }
            m = m + T::one();
        }
        Ok(())
    }
    recurse(g - 1, rho * rho, u, g, shift, center, &mut w, &mut v, &mut out)?;
    Ok(out)
}

fn quad_form<T: Real>(tau: &CMatrix<T>, v: &[T]) -> Complex<T> {
    let g = v.len();
    let mut s = Complex::zero();
    for i in 0..g {
        for j in 0..g {
            s = s + tau[(i, j)] * (v[i] * v[j]);
        }
    }
    s
}

fn cis<T: Real>(z: Complex<T>) -> Complex<T> {
    // exp(iπ z)
    let w = Complex::new(-z.im, z.re) * T::PI();
    w.exp()
}

fn check_genus<T: Real>(c: &Characteristic, tau: &SiegelMatrix<T>) -> Result<()> {
    if c.genus() != tau.genus() {
        return Err(Error::GenusMismatch {
            expected: tau.genus(),
            found: c.genus(),
        });
    }
    Ok(())
}

fn half_vector<T: Real>(bits: &[u8]) -> Vec<T> {
    bits.iter().map(|&b| T::from_u8(b).unwrap() / T::lit(2.0)).collect()
}

/// `θ[c](z; τ)` with an absolute tail bound below `tol`.
pub fn theta<T: Real>(c: &Characteristic, z: &[Complex<T>], tau: &SiegelMatrix<T>, tol: T) -> Result<Complex<T>> {
    check_genus(c, tau)?;
    let g = tau.genus();
    if z.len() != g {
        return Err(Error::InvalidArgument(format!("z has length {}, expected {g}", z.len())));
    }
    let y: Vec<T> = z.iter().map(|w| w.im).collect();
    let center: Vec<T> = (0..g)
        .map(|i| -(0..g).fold(T::zero(), |s, j| s + tau.y_inv[i * g + j] * y[j]))
        .collect();
    let log_pref = (0..g).fold(T::zero(), |s, i| s - y[i] * center[i]);
    let r = radius_for(g, tau.min_eigenvalue, tol, log_pref, false)?;
    let rho = tau.min_eigenvalue.sqrt() * T::from_usize(r).unwrap();
    let shift = half_vector::<T>(&c.top());
    let eps = half_vector::<T>(&c.bottom());
    let pts = ellipsoid_points(&tau.upper(), g, &shift, &center, rho)?;
    let two = T::lit(2.0);
    let mut sum = Complex::zero();
    for v in &pts {
        let lin = (0..g).fold(Complex::zero(), |s, i| s + (z[i] + eps[i]) * v[i]);
        sum = sum + cis(quad_form(&tau.tau, v) + lin * two);
    }
    Ok(sum)
}

/// `θ[c](0; τ)`.
pub fn theta_constant<T: Real>(c: &Characteristic, tau: &SiegelMatrix<T>, tol: T) -> Result<Complex<T>> {
    let z = vec![Complex::zero(); tau.genus()];
    theta(c, &z, tau, tol)
}

/// Gradient of `θ[c](z; τ)` at `z = 0` by the differentiated series; `c` odd.
pub fn theta_gradient<T: Real>(c: &Characteristic, tau: &SiegelMatrix<T>, tol: T) -> Result<Vec<Complex<T>>> {
    check_genus(c, tau)?;
    if c.is_even() {
        return Err(Error::EvenCharacteristic(c.to_string()));
    }
    let g = tau.genus();
    let r = radius_for(g, tau.min_eigenvalue, tol, T::zero(), true)?;
    let rho = tau.min_eigenvalue.sqrt() * T::from_usize(r).unwrap();
    let shift = half_vector::<T>(&c.top());
    let eps = half_vector::<T>(&c.bottom());
    let pts = ellipsoid_points(&tau.upper(), g, &shift, &vec![T::zero(); g], rho)?;
    Ok(gradient_sum(&tau.tau, &pts, &eps))
}

fn gradient_sum<T: Real>(tau: &CMatrix<T>, pts: &[Vec<T>], eps: &[T]) -> Vec<Complex<T>> {
    let g = eps.len();
    let two_pi_i = Complex::new(T::zero(), T::lit(2.0) * T::PI());
    let mut grad = vec![Complex::zero(); g];
    for v in pts {
        let lin = (0..g).fold(T::zero(), |s, i| s + eps[i] * v[i]);
        let term = cis(quad_form(tau, v) + Complex::new(T::lit(2.0) * lin, T::zero()));
        for j in 0..g {
            grad[j] = grad[j] + two_pi_i * term * v[j];
        }
    }
    grad
}

/// Jacobi matrix with column `n` the gradient of `θ[ε(I₀∖{i_n})]`, `n` over sorted `I₀`.
pub fn jacobi_matrix<T: Real>(p: &Partition, tau: &SiegelMatrix<T>, tol: T) -> Result<CMatrix<T>> {
    let table = ThetaTable::new(tau, tol)?;
    table.jacobi_matrix(p)
}

/// All `4^g` theta constants and the gradients of the odd ones for one `τ`,
/// computed over a common lattice (sized for the gradient bound).
#[derive(Clone, Debug)]
pub struct ThetaTable<T> {
    tau: SiegelMatrix<T>,
    tol: T,
    radius: usize,
    constants: Vec<Complex<T>>,
    gradients: Vec<Option<Vec<Complex<T>>>>,
}

impl<T: Real> ThetaTable<T> {
    pub fn new(tau: &SiegelMatrix<T>, tol: T) -> Result<Self> {
        let g = tau.genus();
        if g > 6 {
            return Err(Error::InvalidArgument(format!("theta tables are limited to genus 6, got {g}")));
        }
        let radius = radius_for(g, tau.min_eigenvalue, tol, T::zero(), true)?;
        let rho = tau.min_eigenvalue.sqrt() * T::from_usize(radius).unwrap();
        let u = tau.upper();
        let n = 1u32 << g;
        let per_top: Vec<Result<Vec<(Complex<T>, Option<Vec<Complex<T>>>)>>> = (0..n)
            .into_par_iter()
            .map(|top| {
                let c0 = Characteristic::from_bits(g, top, 0);
                let shift = half_vector::<T>(&c0.top());
                let pts = ellipsoid_points(&u, g, &shift, &vec![T::zero(); g], rho)?;
                let bases: Vec<Complex<T>> = pts.iter().map(|v| cis(quad_form(&tau.tau, v))).collect();
                Ok((0..n)
                    .map(|bottom| {
                        let c = Characteristic::from_bits(g, top, bottom);
                        let eps = half_vector::<T>(&c.bottom());
                        let two_pi_i = Complex::new(T::zero(), T::lit(2.0) * T::PI());
                        let mut value = Complex::zero();
                        let mut grad = vec![Complex::zero(); g];
                        for (v, &b) in pts.iter().zip(&bases) {
                            let lin = (0..g).fold(T::zero(), |s, i| s + eps[i] * v[i]);
                            let term = b * cis(Complex::new(T::lit(2.0) * lin, T::zero()));
                            value = value + term;
                            if c.is_odd() {
                                for j in 0..g {
                                    grad[j] = grad[j] + two_pi_i * term * v[j];
                                }
                            }
                        }
                        (value, c.is_odd().then_some(grad))
                    })
                    .collect())
            })
            .collect();
        let mut constants = Vec::with_capacity((n * n) as usize);
        let mut gradients = Vec::with_capacity((n * n) as usize);
        for block in per_top {
            for (v, gr) in block? {
                constants.push(v);
                gradients.push(gr);
            }
        }
        Ok(Self {
            tau: tau.clone(),
            tol,
            radius,
            constants,
            gradients,
        })
    }

    pub fn genus(&self) -> usize {
        self.tau.genus()
    }

    pub fn tau(&self) -> &SiegelMatrix<T> {
        &self.tau
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    /// Radius used for the common lattice, in units of `√λ_min`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    fn slot(&self, c: &Characteristic) -> usize {
        ((c.top_bits() << self.genus()) | c.bottom_bits()) as usize
    }

    pub fn constant(&self, c: &Characteristic) -> Result<Complex<T>> {
        check_genus(c, &self.tau)?;
        Ok(self.constants[self.slot(c)])
    }

    pub fn gradient(&self, c: &Characteristic) -> Result<Vec<Complex<T>>> {
        check_genus(c, &self.tau)?;
        self.gradients[self.slot(c)]
            .clone()
            .ok_or_else(|| Error::EvenCharacteristic(c.to_string()))
    }

    /// Theta constant for an unreduced characteristic.
    pub fn lifted_constant(&self, c: &IntCharacteristic) -> Result<Complex<T>> {
        let (r, sign) = c.reduce();
        Ok(self.constant(&r)? * T::from_i8(sign).unwrap())
    }

    pub fn lifted_gradient(&self, c: &IntCharacteristic) -> Result<Vec<Complex<T>>> {
        let (r, sign) = c.reduce();
        let s = T::from_i8(sign).unwrap();
        Ok(self.gradient(&r)?.into_iter().map(|z| z * s).collect())
    }

    /// `θ[ε(S)](0)`.
    pub fn of_set(&self, set: &[usize]) -> Result<Complex<T>> {
        self.constant(&partition_characteristic(self.genus(), set)?)
    }

    /// Gradient of `θ[ε(S)]` at 0.
    pub fn gradient_of_set(&self, set: &[usize]) -> Result<Vec<Complex<T>>> {
        self.gradient(&partition_characteristic(self.genus(), set)?)
    }

    /// `θ` at the unreduced characteristic `Σ_{S}𝔄 − K∞`.
    pub fn lifted_of_set(&self, set: &[usize]) -> Result<Complex<T>> {
        self.lifted_constant(&lifted_partition_characteristic(self.genus(), set)?)
    }

    pub fn lifted_gradient_of_set(&self, set: &[usize]) -> Result<Vec<Complex<T>>> {
        self.lifted_gradient(&lifted_partition_characteristic(self.genus(), set)?)
    }

    /// Column `n` is the gradient of `θ[ε(I₁⁽ⁿ⁾)]`, `n` running over sorted `I₀`.
    pub fn jacobi_matrix(&self, p: &Partition) -> Result<CMatrix<T>> {
        self.jacobi_matrix_with(p, false)
    }

    /// As [`Self::jacobi_matrix`], with the unreduced characteristics when `lifted`.
    pub fn jacobi_matrix_with(&self, p: &Partition, lifted: bool) -> Result<CMatrix<T>> {
        if p.genus() != self.genus() {
            return Err(Error::GenusMismatch {
                expected: self.genus(),
                found: p.genus(),
            });
        }
        let mut cols = Vec::with_capacity(self.genus());
        for &n in p.i_set() {
            let i1 = p.i1(n)?;
            cols.push(if lifted {
                self.lifted_gradient_of_set(i1.i_set())?
            } else {
                self.gradient_of_set(i1.i_set())?
            });
        }
        Ok(CMatrix::from_columns(&cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau_i(g: usize, scale: f64) -> SiegelMatrix<f64> {
        SiegelMatrix::new(CMatrix::from_fn(g, g, |i, j| {
            if i == j {
                Complex::new(0.0, scale)
            } else {
                Complex::zero()
            }
        }))
        .unwrap()
    }

    fn ch(s: &str) -> Characteristic {
        s.parse().unwrap()
    }

    fn brute_genus1(eps_top: f64, eps_bot: f64, tau: Complex<f64>, z: Complex<f64>, n: i32) -> Complex<f64> {
        (-n..=n)
            .map(|m| {
                let v = m as f64 + eps_top / 2.0;
                let arg = tau * v * v + (z + eps_bot / 2.0) * v * 2.0;
                (Complex::new(0.0, std::f64::consts::PI) * arg).exp()
            })
            .sum()
    }

    #[test]
    fn genus_one_constant_matches_brute_force() {
        let t = tau_i(1, 1.0);
        let v = theta_constant(&ch("[0;0]"), &t, 1e-14).unwrap();
        let b = brute_genus1(0.0, 0.0, Complex::new(0.0, 1.0), Complex::zero(), 10);
        assert!((v - b).norm() < 1e-13);
    }

    #[test]
    fn odd_constant_vanishes() {
        let t = tau_i(2, 1.3);
        for c in Characteristic::all(2).into_iter().filter(|c| c.is_odd()) {
            assert!(theta_constant(&c, &t, 1e-12).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_tau_factorises() {
        let t1 = theta_constant(&ch("[0;0]"), &tau_i(1, 1.0), 1e-14).unwrap();
        let t2 = theta_constant(&ch("[00;00]"), &tau_i(2, 1.0), 1e-14).unwrap();
        assert!((t2 - t1 * t1).norm() < 1e-12);
    }

    #[test]
    fn gradient_of_even_is_error() {
        assert!(matches!(
            theta_gradient(&ch("[00;00]"), &tau_i(2, 1.0), 1e-12),
            Err(Error::EvenCharacteristic(_))
        ));
    }

    #[test]
    fn radius_examples() {
        let t = tau_i(1, 1.0);
        let r = truncation_radius(&t, 1e-13).unwrap();
        assert!(r <= 6);
        assert!(truncation_radius(&t, 1e-6).unwrap() <= r);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let tau = SiegelMatrix::new(CMatrix::from_rows(&[
            vec![Complex::new(0.2, 1.1), Complex::new(-0.3, 0.4)],
            vec![Complex::new(-0.3, 0.4), Complex::new(0.1, 0.9)],
        ]))
        .unwrap();
        let table = ThetaTable::new(&tau, 1e-13).unwrap();
        for c in Characteristic::all(2) {
            let direct = theta_constant(&c, &tau, 1e-13).unwrap();
            assert!((table.constant(&c).unwrap() - direct).norm() < 1e-12);
            if c.is_odd() {
                let gd = theta_gradient(&c, &tau, 1e-13).unwrap();
                let gt = table.gradient(&c).unwrap();
                for (a, b) in gd.iter().zip(&gt) {
                    assert!((a - b).norm() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn rejects_non_siegel() {
        let bad = CMatrix::from_rows(&[
            vec![Complex::new(0.0, 1.0), Complex::new(0.0, 2.0)],
            vec![Complex::new(0.0, 2.0), Complex::new(0.0, 1.0)],
        ]);
        assert!(matches!(SiegelMatrix::new(bad), Err(Error::NotSiegel { .. })));
        let asym = CMatrix::from_rows(&[
            vec![Complex::new(0.0, 1.0), Complex::new(0.1, 0.0)],
            vec![Complex::new(0.0, 0.0), Complex::new(0.0, 1.0)],
        ]);
        assert!(validate_siegel(&asym).symmetry_defect > 0.0);
        assert!(SiegelMatrix::new(asym).is_err());
        let rep = validate_siegel(tau_i(3, 1.0).tau());
        assert_eq!((rep.symmetry_defect, rep.min_eigenvalue), (0.0, 1.0));
    }
}
