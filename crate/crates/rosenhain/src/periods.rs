//! Period matrices `A = (∮_{a_k} du_i)`, `B = (∮_{b_k} du_i)` of
//! `du_i = x^{i−1}dx/y` and the Riemann matrix `τ = A⁻¹B`.
//!
//! Homology basis: `a_k` encircles the cut `[e_{2k−1}, e_{2k}]`; `b_k` encircles
//! `e_{2k}, …, e_{2g+1}`, completed on the lower sheet.
//! Every cycle reduces to a signed sum of elementary integrals
//! `I_s = ∫_{e_s}^{e_{s+1}} x^{i−1} dx / √|f(x)|` with phases in `{±1, ±i}`
//! (the branch of `y` on the upper sheet is fixed by continuation from
//! `x > e_{2g+1}`, where `y > 0`). The table below produces `Im τ ≻ 0`.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::curve::HyperellipticCurve;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::integrate_sqrt_endpoints;
use crate::scalar::Real;
use crate::theta::{validate_siegel, SiegelMatrix, SiegelReport};

/// Symmetry tolerance for `τ` produced by quadrature, raised to 100 ulp in
/// low precision.
pub const PERIOD_SYMMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    One,
    MinusOne,
    I,
    MinusI,
}

impl Phase {
    pub fn value<T: Real>(self) -> Complex<T> {
        match self {
            Phase::One => Complex::new(T::one(), T::zero()),
            Phase::MinusOne => Complex::new(-T::one(), T::zero()),
            Phase::I => Complex::new(T::zero(), T::one()),
            Phase::MinusI => Complex::new(T::zero(), -T::one()),
        }
    }
}

/// A cycle as a combination `2·Σ phase·I_s` of elementary segments `s`
/// (`s` is 1-based, segment `[e_s, e_{s+1}]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleChain {
    pub segments: Vec<(usize, Phase)>,
}

/// Chains of `a_1..a_g` and `b_1..b_g`.
pub fn cycle_incidence(g: usize) -> (Vec<CycleChain>, Vec<CycleChain>) {
    let a = (1..=g)
        .map(|k| CycleChain {
            segments: vec![(2 * k - 1, if (g + 1 - k) % 2 == 0 { Phase::One } else { Phase::MinusOne })],
        })
        .collect();
    let b = (1..=g)
        .map(|k| CycleChain {
            segments: (k..=g)
                .map(|m| (2 * m, if (g - m) % 2 == 0 { Phase::MinusI } else { Phase::I }))
                .collect(),
        })
        .collect();
    (a, b)
}

#[derive(Clone, Debug)]
pub struct PeriodData<T> {
    pub a_matrix: CMatrix<T>,
    pub b_matrix: CMatrix<T>,
    pub tau: SiegelMatrix<T>,
    pub siegel: SiegelReport,
    pub a_condition: T,
    /// Largest node count used by any segment.
    pub max_nodes: usize,
}

impl<T: Real> PeriodData<T> {
    pub fn genus(&self) -> usize {
        self.a_matrix.rows()
    }

    pub fn a_inverse(&self) -> CMatrix<T> {
        self.a_matrix.inverse().expect("A is invertible by construction")
    }

    pub fn det_a(&self) -> Complex<T> {
        self.a_matrix.determinant()
    }
}

/// Elementary integrals `I_s[i]`, `s = 1..2g`, `i = 0..g−1`.
pub fn segment_integrals<T: Real>(curve: &HyperellipticCurve<T>, quad_tol: T) -> Result<(Vec<Vec<T>>, usize)> {
    let g = curve.genus();
    let e = curve.branch_points().to_vec();
    let results: Vec<Result<(Vec<T>, usize)>> = (1..=2 * g)
        .into_par_iter()
        .map(|s| {
            let (a, b) = (e[s - 1], e[s]);
            let others: Vec<T> = e
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != s - 1 && k != s)
                .map(|(_, &x)| x)
                .collect();
            let r = integrate_sqrt_endpoints(a, b, g, quad_tol, |x, out: &mut [T]| {
                let w = others.iter().fold(T::one(), |p, &ek| p * (x - ek).abs()).sqrt().recip();
                let mut xp = w;
                for o in out.iter_mut() {
                    *o = xp;
                    xp = xp * x;
                }
            })?;
            Ok((r.values, r.nodes))
        })
        .collect();
    let mut out = Vec::with_capacity(2 * g);
    let mut max_nodes = 0;
    for r in results {
        let (v, n) = r?;
        max_nodes = max_nodes.max(n);
        out.push(v);
    }
    Ok((out, max_nodes))
}

fn assemble<T: Real>(g: usize, chains: &[CycleChain], seg: &[Vec<T>]) -> CMatrix<T> {
    let two = T::lit(2.0);
    CMatrix::from_fn(g, g, |i, k| {
        chains[k]
            .segments
            .iter()
            .fold(Complex::zero(), |acc, &(s, ph)| acc + ph.value::<T>() * (seg[s - 1][i] * two))
    })
}

pub fn compute_periods<T: Real>(curve: &HyperellipticCurve<T>, quad_tol: T) -> Result<PeriodData<T>> {
    if !(quad_tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {quad_tol}")));
    }
    let g = curve.genus();
    let (seg, max_nodes) = segment_integrals(curve, quad_tol)?;
    let (a_chains, b_chains) = cycle_incidence(g);
    let a = assemble(g, &a_chains, &seg);
    let b = assemble(g, &b_chains, &seg);
    let a_inv = a
        .inverse()
        .ok_or_else(|| Error::Singular("a-period matrix".into()))?;
    let tau = &a_inv * &b;
    let siegel = validate_siegel(&tau);
    let sym_tol = T::lit(PERIOD_SYMMETRY_TOL).max(T::epsilon() * T::lit(100.0));
    let tau = SiegelMatrix::with_symmetry_tol(tau, sym_tol)?;
    let a_condition = a.condition_number().unwrap_or(T::infinity());
    Ok(PeriodData {
        a_matrix: a,
        b_matrix: b,
        tau,
        siegel,
        a_condition,
        max_nodes,
    })
}
