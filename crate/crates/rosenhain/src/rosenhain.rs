//! The inverse period matrix from theta constants: the general formula
//! `A⁻¹ = Adj(J)·𝒟₁·𝒮ᵀ / (2π^g Θ_{I₀})`, its genus-2 and genus-3 theta-only
//! specializations, the Riemann–Jacobi determinant identity, the fifteen genus-2
//! derivative determinants, the genus-2 triple relation and branch-point
//! recovery from directional derivatives.
//!
//! Matrices follow the crate convention: `J` has the gradients of
//! `θ[ε(I₁⁽ⁿ⁾)]` as columns, so the formulae below use `Jᵀ` where the
//! classical statements write `J` with gradients as rows.

use num_complex::Complex;
use num_traits::Zero;

use crate::characteristics::{partition_characteristic, Characteristic};
use crate::curve::{HyperellipticCurve, Partition};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::report::IdentityFit;
use crate::scalar::{principal_pow, real_c, Real};
use crate::theta::ThetaTable;
use crate::thomae::{s_column, s_matrix, theta_i0_product, theta_i1_product, CurveData};

/// A theta-only candidate matrix and its fit against the quadrature matrix.
#[derive(Clone, Debug)]
pub struct Reconstruction<T> {
    pub matrix: CMatrix<T>,
    pub fit: IdentityFit<T>,
}

fn require_genus<T: Real>(table: &ThetaTable<T>, g: usize) -> Result<()> {
    if table.genus() != g {
        return Err(Error::GenusMismatch {
            expected: g,
            found: table.genus(),
        });
    }
    Ok(())
}

fn require_partition<T: Real>(table: &ThetaTable<T>, p: &Partition) -> Result<()> {
    require_genus(table, p.genus())?;
    if p.speciality() != 0 {
        return Err(Error::InvalidPartition("expected a speciality-0 partition".into()));
    }
    Ok(())
}

fn nonzero<T: Real>(z: Complex<T>, what: &str) -> Result<Complex<T>> {
    if z.norm() == T::zero() || !z.norm().is_finite() {
        return Err(Error::Vanishing(what.to_string()));
    }
    Ok(z)
}

fn pi_pow<T: Real>(g: usize) -> Complex<T> {
    real_c(T::PI().powi(g as i32))
}

// ---------------------------------------------------------------------------
// Riemann–Jacobi

/// `det J = ±π^g ∏_{n=0}^{g+1} θ[ε(T_n)]`, `T₀ = J₀`, `T_n = J₀ ∖ {j_n}`,
/// fitted to `±1`. With `lifted`, every theta uses the unreduced
/// characteristic `Σ𝔄 − K∞`, under which the sign is `+1`; the fit then has
/// order 1 so a wrong sign shows up as a residual of 2.
pub fn riemann_jacobi_check<T: Real>(table: &ThetaTable<T>, p: &Partition, lifted: bool) -> Result<IdentityFit<T>> {
    require_partition(table, p)?;
    let j = table.jacobi_matrix_with(p, lifted)?;
    let lhs = j.determinant();
    if lhs.norm() == T::zero() {
        return Err(Error::Singular("Jacobi matrix".into()));
    }
    let th = |s: &[usize]| if lifted { table.lifted_of_set(s) } else { table.of_set(s) };
    let rhs = p
        .t_sets()?
        .iter()
        .try_fold(pi_pow::<T>(table.genus()), |acc, t| Ok::<_, Error>(acc * th(t)?))?;
    let order = if lifted { 1 } else { 2 };
    Ok(IdentityFit::scalar(lhs, nonzero(rhs, "Riemann-Jacobi right-hand side")?, order))
}

// ---------------------------------------------------------------------------
// General genus

/// `𝒟₁ = diag(|χ_n|^{1/4})` over sorted `I₀`.
fn d1_diagonal<T: Real>(curve: &HyperellipticCurve<T>, p: &Partition) -> Result<Vec<Complex<T>>> {
    p.i_set()
        .iter()
        .map(|&n| Ok(real_c(curve.chi(p, n)?.abs().powf(T::lit(0.25)))))
        .collect()
}

/// Theta-side candidate for `A⁻¹`: `Adj(Jᵀ)·𝒟₁·𝒮ᵀ / (2π^g Θ_{I₀})`.
pub fn rosenhain_a_inverse<T: Real>(
    curve: &HyperellipticCurve<T>,
    table: &ThetaTable<T>,
    p: &Partition,
) -> Result<CMatrix<T>> {
    require_partition(table, p)?;
    let g = table.genus();
    let adj = table.jacobi_matrix(p)?.transpose().adjugate();
    let d1 = CMatrix::diagonal(&d1_diagonal(curve, p)?);
    let s = s_matrix(curve, p)?;
    let th = nonzero(theta_i0_product(table, p)?, "Theta_I0")?;
    let c = (real_c::<T>(T::lit(2.0)) * pi_pow::<T>(g) * th).inv();
    Ok((&(&adj * &d1) * &s.transpose()).scale(c))
}

/// Same matrix assembled column by column:
/// `U_m = Adj(Jᵀ)·(s_{g−m}(I₁⁽ⁿ⁾)·|χ_n|^{1/4})_n / (2π^g Θ_{I₀})`.
pub fn rosenhain_a_inverse_columns<T: Real>(
    curve: &HyperellipticCurve<T>,
    table: &ThetaTable<T>,
    p: &Partition,
) -> Result<CMatrix<T>> {
    require_partition(table, p)?;
    let g = table.genus();
    let adj = table.jacobi_matrix(p)?.transpose().adjugate();
    let d1 = d1_diagonal(curve, p)?;
    let s_cols: Vec<Vec<T>> = p
        .i_set()
        .iter()
        .map(|&n| s_column(curve, p.i1(n)?.i_set()))
        .collect::<Result<_>>()?;
    let th = nonzero(theta_i0_product(table, p)?, "Theta_I0")?;
    let c = (real_c::<T>(T::lit(2.0)) * pi_pow::<T>(g) * th).inv();
    let cols: Vec<Vec<Complex<T>>> = (0..g)
        .map(|m| {
            let v: Vec<Complex<T>> = (0..g).map(|n| d1[n] * s_cols[n][m]).collect();
            adj.mul_vec(&v).into_iter().map(|z| z * c).collect()
        })
        .collect();
    Ok(CMatrix::from_columns(&cols))
}

/// Theta-side candidate for `A`: `2/θ[ε(J₀)] · 𝒮⁻ᵀ · 𝒟₁⁻¹ · Jᵀ`.
pub fn rosenhain_a<T: Real>(curve: &HyperellipticCurve<T>, table: &ThetaTable<T>, p: &Partition) -> Result<CMatrix<T>> {
    require_partition(table, p)?;
    let jt = table.jacobi_matrix(p)?.transpose();
    let s_inv_t = s_matrix(curve, p)?
        .inverse()
        .ok_or_else(|| Error::Singular("symmetric-function matrix".into()))?
        .transpose();
    let d1_inv: Vec<Complex<T>> = d1_diagonal(curve, p)?.into_iter().map(|z| z.inv()).collect();
    let th = nonzero(table.of_set(p.j_set())?, "theta[eps(J0)]")?;
    let c = real_c::<T>(T::lit(2.0)) / th;
    Ok((&(&s_inv_t * &CMatrix::diagonal(&d1_inv)) * &jt).scale(c))
}

/// [`rosenhain_a_inverse`] fitted against the quadrature `A⁻¹` (one global eighth root).
pub fn a_inverse_general<T: Real>(data: &CurveData<T>, p: &Partition) -> Result<Reconstruction<T>> {
    let matrix = rosenhain_a_inverse(&data.curve, &data.thetas, p)?;
    let fit = IdentityFit::matrices(&matrix, &data.periods.a_inverse(), 8);
    Ok(Reconstruction { matrix, fit })
}

/// [`rosenhain_a`] fitted against the quadrature `A`.
pub fn a_direct_general<T: Real>(data: &CurveData<T>, p: &Partition) -> Result<Reconstruction<T>> {
    let matrix = rosenhain_a(&data.curve, &data.thetas, p)?;
    let fit = IdentityFit::matrices(&matrix, &data.periods.a_matrix, 8);
    Ok(Reconstruction { matrix, fit })
}

// ---------------------------------------------------------------------------
// Genus 2: derivative determinants

/// `D[δ₁; δ₂] = θ₁[δ₁]θ₂[δ₂] − θ₂[δ₁]θ₁[δ₂]`.
pub fn rosenhain_d<T: Real>(table: &ThetaTable<T>, d1: &Characteristic, d2: &Characteristic) -> Result<Complex<T>> {
    require_genus(table, 2)?;
    let a = table.gradient(d1)?;
    let b = table.gradient(d2)?;
    Ok(a[0] * b[1] - a[1] * b[0])
}

/// One derivative-determinant identity `D[δ₁; δ₂] = π² ∏ θ[rhs]`, with the
/// margin characteristic equal to the sum of the four right-hand ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppendixRow {
    pub d1: &'static str,
    pub d2: &'static str,
    pub rhs: [&'static str; 4],
    pub margin: &'static str,
}

impl AppendixRow {
    pub fn characteristics(&self) -> Result<(Characteristic, Characteristic, [Characteristic; 4], Characteristic)> {
        let rhs = [
            self.rhs[0].parse()?,
            self.rhs[1].parse()?,
            self.rhs[2].parse()?,
            self.rhs[3].parse()?,
        ];
        Ok((self.d1.parse()?, self.d2.parse()?, rhs, self.margin.parse()?))
    }

    /// The margin equals the mod-2 sum of the right-hand characteristics.
    pub fn margin_is_sum(&self) -> Result<bool> {
        let (_, _, rhs, margin) = self.characteristics()?;
        Ok(rhs.iter().skip(1).fold(rhs[0], |a, &b| a + b) == margin)
    }
}

const fn row(d1: &'static str, d2: &'static str, rhs: [&'static str; 4], margin: &'static str) -> AppendixRow {
    AppendixRow { d1, d2, rhs, margin }
}

/// The fifteen genus-2 derivative formulae with their sign-fixing order.
pub const APPENDIX_A: [AppendixRow; 15] = [
    row("[01;01]", "[11;01]", ["[00;10]", "[00;11]", "[11;11]", "[01;10]"], "[10;00]"),
    row("[11;10]", "[10;10]", ["[11;11]", "[00;01]", "[00;11]", "[10;01]"], "[01;00]"),
    row("[10;11]", "[01;11]", ["[01;10]", "[10;01]", "[00;10]", "[00;01]"], "[11;00]"),
    row("[01;11]", "[01;01]", ["[10;00]", "[10;01]", "[11;00]", "[11;11]"], "[00;10]"),
    row("[01;11]", "[11;01]", ["[00;00]", "[00;01]", "[11;11]", "[01;00]"], "[10;10]"),
    row("[10;11]", "[11;01]", ["[11;00]", "[00;11]", "[00;01]", "[10;00]"], "[01;10]"),
    row("[10;11]", "[01;01]", ["[01;00]", "[10;01]", "[00;00]", "[00;11]"], "[11;10]"),
    row("[10;10]", "[10;11]", ["[01;00]", "[01;10]", "[11;11]", "[11;00]"], "[00;01]"),
    row("[11;10]", "[01;11]", ["[00;11]", "[00;10]", "[11;00]", "[01;00]"], "[10;01]"),
    row("[11;10]", "[10;11]", ["[11;11]", "[00;00]", "[00;10]", "[10;00]"], "[01;01]"),
    row("[10;10]", "[01;11]", ["[01;10]", "[10;00]", "[00;11]", "[00;00]"], "[11;01]"),
    row("[11;10]", "[11;01]", ["[10;01]", "[10;00]", "[01;10]", "[01;00]"], "[00;11]"),
    row("[11;10]", "[01;01]", ["[00;01]", "[00;00]", "[11;00]", "[01;10]"], "[10;11]"),
    row("[10;10]", "[11;01]", ["[11;00]", "[00;10]", "[00;00]", "[10;01]"], "[01;11]"),
    row("[10;10]", "[01;01]", ["[01;00]", "[10;00]", "[00;01]", "[00;10]"], "[11;11]"),
];

/// Evaluates one row with its sign pinned: the fit has order 1, so the
/// residual is `|lhs/rhs − 1|`.
pub fn appendix_a_check<T: Real>(table: &ThetaTable<T>, row: &AppendixRow) -> Result<IdentityFit<T>> {
    require_genus(table, 2)?;
    let (d1, d2, rhs, _) = row.characteristics()?;
    let lhs = rosenhain_d(table, &d1, &d2)?;
    let r = rhs
        .iter()
        .try_fold(pi_pow::<T>(2), |acc, c| Ok::<_, Error>(acc * table.constant(c)?))?;
    Ok(IdentityFit::scalar(lhs, nonzero(r, "derivative formula right-hand side")?, 1))
}

pub fn appendix_a_suite<T: Real>(table: &ThetaTable<T>) -> Result<Vec<IdentityFit<T>>> {
    APPENDIX_A.iter().map(|r| appendix_a_check(table, r)).collect()
}

// ---------------------------------------------------------------------------
// Genus 2: theta products and the triple relation

fn check_label(x: usize, max: usize) -> Result<()> {
    if x == 0 || x > max {
        return Err(Error::IndexOutOfRange { index: x, max });
    }
    Ok(())
}

fn distinct(v: &[usize]) -> bool {
    v.iter().enumerate().all(|(k, x)| !v[..k].contains(x))
}

/// Characteristics `ε_{abx}` for the three `x ∉ {a, b, c}`; `6` stands for
/// the branch point at infinity.
pub fn pair_product_characteristics(a: usize, b: usize, c: usize) -> Result<Vec<Characteristic>> {
    for x in [a, b, c] {
        check_label(x, 6)?;
    }
    if !distinct(&[a, b, c]) {
        return Err(Error::InvalidArgument(format!("labels {a}, {b}, {c} must be distinct")));
    }
    (1..=6)
        .filter(|x| ![a, b, c].contains(x))
        .map(|x| partition_characteristic(2, &[a, b, x]))
        .collect()
}

/// `Θ_{{a,b}}` relative to the third label `c`: `∏_{x∉{a,b,c}} θ[ε_{abx}]`.
pub fn pair_product<T: Real>(table: &ThetaTable<T>, a: usize, b: usize, c: usize) -> Result<Complex<T>> {
    require_genus(table, 2)?;
    pair_product_characteristics(a, b, c)?
        .iter()
        .try_fold(real_c(T::one()), |acc, ch| Ok(acc * table.constant(ch)?))
}

fn single<T: Real>(table: &ThetaTable<T>, i: usize) -> Result<Vec<Complex<T>>> {
    // ε_6 = K∞
    if i == 6 {
        table.gradient_of_set(&[])
    } else {
        table.gradient_of_set(&[i])
    }
}

/// Which signed combination `σ_a·a + σ_b·b = c` holds, with
/// `a = θ_n[ε_i]Θ_{{j,k}}`, `b = θ_n[ε_j]Θ_{{i,k}}`, `c = θ_n[ε_k]Θ_{{i,j}}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripleRelation<T> {
    pub sign_a: i8,
    pub sign_b: i8,
    /// `max_n |σ_a a_n + σ_b b_n − c_n| / max_n |c_n|` for the best signs.
    pub residual: T,
}

impl<T: Real> TripleRelation<T> {
    pub fn describe(&self) -> String {
        let s = |x: i8| if x > 0 { "+" } else { "-" };
        format!("{}a {} b = c", if self.sign_a > 0 { "" } else { "-" }, s(self.sign_b))
    }
}

pub fn triple_relation_check<T: Real>(table: &ThetaTable<T>, i: usize, j: usize, k: usize) -> Result<TripleRelation<T>> {
    require_genus(table, 2)?;
    let (di, dj, dk) = (single(table, i)?, single(table, j)?, single(table, k)?);
    let tjk = pair_product(table, j, k, i)?;
    let a: Vec<Complex<T>> = di.iter().map(|&z| z * tjk).collect();
    let tik = pair_product(table, i, k, j)?;
    let tij = pair_product(table, i, j, k)?;
    let b: Vec<Complex<T>> = dj.iter().map(|&z| z * tik).collect();
    let c: Vec<Complex<T>> = dk.iter().map(|&z| z * tij).collect();
    let scale = c.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if scale == T::zero() {
        return Err(Error::Vanishing("triple relation right-hand side".into()));
    }
    let mut best: Option<TripleRelation<T>> = None;
    for (sa, sb) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
        let (fa, fb) = (T::from_i8(sa).unwrap(), T::from_i8(sb).unwrap());
        let dev = (0..2).fold(T::zero(), |m, n| m.max((a[n] * fa + b[n] * fb - c[n]).norm())) / scale;
        if best.as_ref().map_or(true, |b| dev < b.residual) {
            best = Some(TripleRelation {
                sign_a: sa,
                sign_b: sb,
                residual: dev,
            });
        }
    }
    Ok(best.unwrap())
}

fn genus2_labels(i: usize, j: usize) -> Result<()> {
    check_label(i, 5)?;
    check_label(j, 5)?;
    if i == j {
        return Err(Error::InvalidArgument("i and j must differ".into()));
    }
    Ok(())
}

/// Theta-only `A⁻¹` of a genus-2 curve normalized to `e_i = 0`, `e_j = 1`:
/// `1/(2π²Θ²_{{i,j}}) · [[−Θ_{{j,6}}θ₂[ε_i], Θ_{{i,j}}θ₂[K∞]], [Θ_{{j,6}}θ₁[ε_i], −Θ_{{i,j}}θ₁[K∞]]]`.
pub fn a_inverse_genus2<T: Real>(table: &ThetaTable<T>, i: usize, j: usize) -> Result<CMatrix<T>> {
    require_genus(table, 2)?;
    genus2_labels(i, j)?;
    let tij = nonzero(pair_product(table, i, j, 6)?, "Theta_ij")?;
    let tj6 = pair_product(table, j, 6, i)?;
    let di = table.gradient_of_set(&[i])?;
    let dk = table.gradient_of_set(&[])?;
    let c = (real_c::<T>(T::lit(2.0)) * pi_pow::<T>(2) * tij * tij).inv();
    Ok(CMatrix::from_rows(&[
        vec![-tj6 * di[1], tij * dk[1]],
        vec![tj6 * di[0], -tij * dk[0]],
    ])
    .scale(c))
}

/// Theta-only `A` of the same normalized curve:
/// `2Θ_{{i,j}}/(Θ_{{i,6}}Θ_{{j,6}}θ[ε_{ij}]) · [[Θ_{{i,j}}θ₁[K∞], Θ_{{i,j}}θ₂[K∞]], [Θ_{{j,6}}θ₁[ε_i], Θ_{{j,6}}θ₂[ε_i]]]`.
pub fn a_genus2<T: Real>(table: &ThetaTable<T>, i: usize, j: usize) -> Result<CMatrix<T>> {
    require_genus(table, 2)?;
    genus2_labels(i, j)?;
    let tij = pair_product(table, i, j, 6)?;
    let tj6 = pair_product(table, j, 6, i)?;
    let ti6 = pair_product(table, i, 6, j)?;
    let eij = table.of_set(&[i, j])?;
    let di = table.gradient_of_set(&[i])?;
    let dk = table.gradient_of_set(&[])?;
    let c = real_c::<T>(T::lit(2.0)) * tij / nonzero(ti6 * tj6 * eij, "Theta_i6 Theta_j6 theta[eps_ij]")?;
    Ok(CMatrix::from_rows(&[
        vec![tij * dk[0], tij * dk[1]],
        vec![tj6 * di[0], tj6 * di[1]],
    ])
    .scale(c))
}

/// Even characteristics entering [`a_genus2`] through its theta products.
pub fn a_genus2_even_characteristics(i: usize, j: usize) -> Result<Vec<Characteristic>> {
    genus2_labels(i, j)?;
    let mut out = pair_product_characteristics(i, j, 6)?;
    out.extend(pair_product_characteristics(j, 6, i)?);
    out.extend(pair_product_characteristics(i, 6, j)?);
    out.push(partition_characteristic(2, &[i, j])?);
    out.sort();
    out.dedup();
    Ok(out)
}

/// The classical constants of a curve normalized to `e₁ = 0`, `e₂ = 1`:
/// `P = Θ_{{2,6}}`, `Q = Θ_{{1,2}}` and `Θ_{{1,6}}` (third labels 1, 6, 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalConstants<T> {
    pub p: Complex<T>,
    pub q: Complex<T>,
    pub theta16: Complex<T>,
}

pub fn classical_constants<T: Real>(table: &ThetaTable<T>) -> Result<ClassicalConstants<T>> {
    Ok(ClassicalConstants {
        p: pair_product(table, 2, 6, 1)?,
        q: pair_product(table, 1, 2, 6)?,
        theta16: pair_product(table, 1, 6, 2)?,
    })
}

/// `a₁a₂a₃ = P⁴/Q⁴` and `(1−a₁)(1−a₂)(1−a₃) = Θ⁴_{{1,6}}/Q⁴` for
/// `e = (0, 1, a₁, a₂, a₃)`, both checked literally (no sign freedom).
pub fn classical_identities<T: Real>(
    curve: &HyperellipticCurve<T>,
    table: &ThetaTable<T>,
) -> Result<(IdentityFit<T>, IdentityFit<T>)> {
    require_genus(table, 2)?;
    if curve.genus() != 2 {
        return Err(Error::GenusMismatch {
            expected: 2,
            found: curve.genus(),
        });
    }
    let e = curve.branch_points();
    let eps = T::lit(1e-12);
    if e[0].abs() > eps || (e[1] - T::one()).abs() > eps {
        return Err(Error::InvalidArgument("curve must be normalized to e1 = 0, e2 = 1".into()));
    }
    let k = classical_constants(table)?;
    let q4 = nonzero(k.q, "Q")?.powu(4);
    let prod = real_c(e[2] * e[3] * e[4]);
    let prod1 = real_c((T::one() - e[2]) * (T::one() - e[3]) * (T::one() - e[4]));
    Ok((
        IdentityFit::scalar(prod, nonzero(k.p.powu(4) / q4, "P/Q")?, 1),
        IdentityFit::scalar(prod1, nonzero(k.theta16.powu(4) / q4, "Theta_16/Q")?, 1),
    ))
}

/// Normalizes a genus-2 curve to `e_i = 0`, `e_j = 1`, recomputes its periods and
/// fits [`a_inverse_genus2`] against the quadrature `A⁻¹`.
pub fn genus2_round_trip<T: Real>(
    curve: &HyperellipticCurve<T>,
    i: usize,
    j: usize,
    tol: &crate::Tolerances,
) -> Result<(CurveData<T>, Reconstruction<T>)> {
    let data = CurveData::compute(&curve.normalized(i, j)?, tol)?;
    let matrix = a_inverse_genus2(&data.thetas, i, j)?;
    let fit = IdentityFit::matrices(&matrix, &data.periods.a_inverse(), 8);
    Ok((data, Reconstruction { matrix, fit }))
}

// ---------------------------------------------------------------------------
// Genus 3

/// Factor of the first entry of `U₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum U2Factor {
    /// `e₃ + 1`, the value that matches the general formula.
    Corrected,
    /// `e₃ − 1`.
    Printed,
}

/// Theta-only columns `U₁, U₂, U₃` of `A⁻¹` for a genus-3 curve normalized to
/// `e₁ = 0`, `e₂ = 1`, with `e₃` supplied and `I₀ = {1, 2, 3}`.
pub fn a_inverse_genus3<T: Real>(table: &ThetaTable<T>, e3: T) -> Result<CMatrix<T>> {
    a_inverse_genus3_with(table, e3, U2Factor::Corrected)
}

pub fn a_inverse_genus3_with<T: Real>(table: &ThetaTable<T>, e3: T, u2: U2Factor) -> Result<CMatrix<T>> {
    require_genus(table, 3)?;
    if !(e3 > T::one()) || !e3.is_finite() {
        return Err(Error::InvalidArgument(format!("e3 must exceed e2 = 1, got {e3}")));
    }
    let p = Partition::m0(3, &[1, 2, 3])?;
    let adj = table.jacobi_matrix(&p)?.transpose().adjugate();
    let t123 = nonzero(theta_i0_product(table, &p)?, "Theta_123")?;
    let half = T::lit(0.5);
    let t23 = principal_pow(theta_i1_product(table, &p, 1)?, half);
    let t13 = principal_pow(theta_i1_product(table, &p, 2)?, half);
    let t12 = principal_pow(theta_i1_product(table, &p, 3)?, half);
    let q = |x: T| real_c(x.powf(T::lit(0.25)));
    let (r3, r31) = (q(e3), q(e3 - T::one()));
    let pre = (real_c::<T>(T::lit(2.0)) * pi_pow::<T>(3) * principal_pow(t123, T::lit(1.5))).inv();
    let first2 = match u2 {
        U2Factor::Corrected => e3 + T::one(),
        U2Factor::Printed => e3 - T::one(),
    };
    let v1 = vec![t23 * q(e3.powi(5)), Complex::zero(), Complex::zero()];
    let v2 = vec![-t23 * r3 * first2, -t13 * r31 * e3, -t12 * r3 * r31];
    let v3 = vec![t23 * r3, t13 * r31, t12 * r3 * r31];
    let cols: Vec<Vec<Complex<T>>> = [v1, v2, v3]
        .iter()
        .map(|v| adj.mul_vec(v).into_iter().map(|z| z * pre).collect())
        .collect();
    Ok(CMatrix::from_columns(&cols))
}

/// Per-column eighth-root fits of a candidate against a reference matrix.
pub fn column_fits<T: Real>(candidate: &CMatrix<T>, reference: &CMatrix<T>) -> Vec<IdentityFit<T>> {
    (0..candidate.cols())
        .map(|m| IdentityFit::vectors(&candidate.column(m), &reference.column(m), 8))
        .collect()
}

// ---------------------------------------------------------------------------
// Bolza

/// `∂_{U_m}θ = Σ_k (A⁻¹)_{km} ∂_kθ` for every column `U_m` of `A⁻¹`.
pub fn directional_derivatives<T: Real>(a_inv: &CMatrix<T>, gradient: &[Complex<T>]) -> Vec<Complex<T>> {
    a_inv.transpose().mul_vec(gradient)
}

/// Ratios `∂_{U_m}θ[ε(I₁)] / ∂_{U_n}θ[ε(I₁)]`, which equal `s_{g−m}(I₁)/s_{g−n}(I₁)`.
#[derive(Clone, Debug)]
pub struct BolzaRatios<T> {
    pub derivatives: Vec<Complex<T>>,
    /// `ratios[(m, n)]`, zero-based.
    pub ratios: CMatrix<T>,
}

/// Directional derivatives of `θ[ε(I₁⁽ʲ⁾)]` along the columns of `a_inv`.
pub fn bolza_recover<T: Real>(table: &ThetaTable<T>, p: &Partition, j: usize, a_inv: &CMatrix<T>) -> Result<BolzaRatios<T>> {
    require_partition(table, p)?;
    let g = table.genus();
    if a_inv.rows() != g || a_inv.cols() != g {
        return Err(Error::InvalidArgument(format!("A^-1 must be {g}x{g}")));
    }
    let grad = table.gradient_of_set(p.i1(j)?.i_set())?;
    let d = directional_derivatives(a_inv, &grad);
    if d.iter().all(|z| z.norm() == T::zero()) {
        return Err(Error::Vanishing("directional derivatives".into()));
    }
    let ratios = CMatrix::from_fn(g, g, |m, n| d[m] / d[n]);
    Ok(BolzaRatios { derivatives: d, ratios })
}

/// Genus 2: `e_i = −∂_{U₁}θ[ε_i] / ∂_{U₂}θ[ε_i]` for `i = 1, …, 5`.
pub fn recover_branch_points_genus2<T: Real>(table: &ThetaTable<T>, a_inv: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    require_genus(table, 2)?;
    (1..=5)
        .map(|i| {
            let d = directional_derivatives(a_inv, &table.gradient_of_set(&[i])?);
            Ok(-d[0] / nonzero(d[1], "derivative along U2")?)
        })
        .collect()
}

/// Genus 3 with `I₁ = {1, 2}`: `(e₁e₂, −e₁−e₂)` as `∂_{U₁}/∂_{U₃}` and `∂_{U₂}/∂_{U₃}`.
pub fn recover_pair_genus3<T: Real>(table: &ThetaTable<T>, a_inv: &CMatrix<T>) -> Result<(Complex<T>, Complex<T>)> {
    require_genus(table, 3)?;
    let d = directional_derivatives(a_inv, &table.gradient_of_set(&[1, 2])?);
    let d3 = nonzero(d[2], "derivative along U3")?;
    Ok((d[0] / d3, d[1] / d3))
}

/// Bolza residual for `I₁⁽ʲ⁾`: `max_m |∂_{U_m}/∂_{U_g} − s_{g−m}| / (1 + |s_{g−m}|)`.
pub fn bolza_residual<T: Real>(data: &CurveData<T>, p: &Partition, j: usize) -> Result<T> {
    let b = bolza_recover(&data.thetas, p, j, &data.periods.a_inverse())?;
    let s = s_column(&data.curve, p.i1(j)?.i_set())?;
    let g = data.genus();
    Ok((0..g).fold(T::zero(), |m, k| {
        m.max((b.ratios[(k, g - 1)] - real_c(s[k])).norm() / (T::one() + s[k].abs()))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Tolerances;

    fn data(e: Vec<f64>) -> CurveData<f64> {
        let g = (e.len() - 1) / 2;
        CurveData::compute(&HyperellipticCurve::new(g, e).unwrap(), &Tolerances::default()).unwrap()
    }

    #[test]
    fn appendix_rows_are_consistent() {
        for r in &APPENDIX_A {
            assert!(r.margin_is_sum().unwrap(), "{r:?}");
            let (d1, d2, rhs, _) = r.characteristics().unwrap();
            assert!(d1.is_odd() && d2.is_odd());
            assert!(rhs.iter().all(|c| c.is_even()));
        }
    }

    #[test]
    fn d_is_antisymmetric() {
        let d = data(vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        let a: Characteristic = "[01;01]".parse().unwrap();
        let b: Characteristic = "[11;01]".parse().unwrap();
        assert_eq!(rosenhain_d(&d.thetas, &a, &a).unwrap().norm(), 0.0);
        let x = rosenhain_d(&d.thetas, &a, &b).unwrap();
        let y = rosenhain_d(&d.thetas, &b, &a).unwrap();
        assert!((x + y).norm() < 1e-15);
    }

    #[test]
    fn column_route_matches_product() {
        let d = data(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let p = Partition::m0(3, &[2, 5, 6]).unwrap();
        let m = rosenhain_a_inverse(&d.curve, &d.thetas, &p).unwrap();
        let c = rosenhain_a_inverse_columns(&d.curve, &d.thetas, &p).unwrap();
        assert!(m.sub(&c).max_abs() < 1e-12 * m.max_abs());
    }

    #[test]
    fn theta_products_sum_to_third_label() {
        for (i, j, k) in [(1, 2, 6), (2, 6, 1), (3, 4, 5)] {
            let sum = pair_product_characteristics(i, j, k)
                .unwrap()
                .into_iter()
                .fold(Characteristic::zero(2), |a, b| a + b);
            let ek = partition_characteristic(2, if k == 6 { &[] } else { std::slice::from_ref(&k) }).unwrap();
            assert_eq!(sum, ek);
        }
    }

    #[test]
    fn a_genus2_uses_all_even_characteristics() {
        let evens = a_genus2_even_characteristics(1, 2).unwrap();
        assert_eq!(evens.len(), 10);
        assert!(evens.iter().all(|c| c.is_even()));
    }

    #[test]
    fn invalid_labels() {
        let d = data(vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(a_inverse_genus2(&d.thetas, 2, 2).is_err());
        assert!(a_inverse_genus2(&d.thetas, 1, 6).is_err());
        assert!(a_inverse_genus3(&d.thetas, 2.0).is_err());
    }
}
