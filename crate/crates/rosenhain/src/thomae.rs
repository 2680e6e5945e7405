//! Thomae's formulae for theta constants and derivative theta constants of
//! odd hyperelliptic curves, and the theta-only expression for `⁴√χ_n`.
//!
//! All fractional powers are principal; each identity is fitted against the
//! root-of-unity group left undetermined by the formula.

use num_complex::Complex;

use crate::curve::{symmetric_functions_alt, HyperellipticCurve, Partition};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::periods::{compute_periods, PeriodData};
use crate::report::IdentityFit;
use crate::scalar::{principal_pow, principal_root, real_c, Real};
use crate::theta::ThetaTable;
use crate::Tolerances;

/// A curve with its periods and all theta constants of its Riemann matrix.
#[derive(Clone, Debug)]
pub struct CurveData<T> {
    pub curve: HyperellipticCurve<T>,
    pub periods: PeriodData<T>,
    pub thetas: ThetaTable<T>,
}

impl<T: Real> CurveData<T> {
    pub fn compute(curve: &HyperellipticCurve<T>, tol: &Tolerances) -> Result<Self> {
        let periods = compute_periods(curve, T::lit(tol.quadrature))?;
        let thetas = ThetaTable::new(&periods.tau, T::lit(tol.series))?;
        Ok(Self {
            curve: curve.clone(),
            periods,
            thetas,
        })
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    fn e(&self, k: usize) -> Result<T> {
        self.curve.e(k)
    }
}

fn check_genus<T: Real>(data: &CurveData<T>, p: &Partition) -> Result<()> {
    if p.genus() != data.genus() {
        return Err(Error::GenusMismatch {
            expected: data.genus(),
            found: p.genus(),
        });
    }
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

fn pi_pow<T: Real>(g: usize) -> T {
    T::PI().powi(g as i32)
}

/// `Θ_{I₀} = ∏_{j∈J₀} θ[ε(J₀∖{j})]`.
pub fn theta_i0_product<T: Real>(table: &ThetaTable<T>, p: &Partition) -> Result<Complex<T>> {
    p.j_set().iter().try_fold(real_c(T::one()), |acc, &j| {
        let set: Vec<usize> = p.j_set().iter().copied().filter(|&k| k != j).collect();
        Ok(acc * table.of_set(&set)?)
    })
}

/// `Θ_{I₁} = ∏_{j∈J₀} θ[ε(I₁⁽ⁿ⁾ ∪ {j})]`.
pub fn theta_i1_product<T: Real>(table: &ThetaTable<T>, p: &Partition, n: usize) -> Result<Complex<T>> {
    let i1 = p.i1(n)?;
    p.j_set().iter().try_fold(real_c(T::one()), |acc, &j| {
        let mut set = i1.i_set().to_vec();
        set.push(j);
        Ok(acc * table.of_set(&set)?)
    })
}

/// `θ[ε(I₀)] = ε (det A / 2^g π^g)^{1/2} ∇(I₀)^{1/4}`, `ε⁸ = 1`.
pub fn first_thomae_check<T: Real>(data: &CurveData<T>, p: &Partition) -> Result<IdentityFit<T>> {
    check_genus(data, p)?;
    let g = data.genus();
    let lhs = data.thetas.of_set(p.i_set())?;
    let pref = data.periods.det_a() / (T::lit(2.0).powi(g as i32) * pi_pow::<T>(g));
    let rhs = principal_root(pref, 2) * principal_root(real_c(data.curve.nabla(p.i_set())?), 4);
    Ok(IdentityFit::scalar(lhs, nonzero(rhs, "Thomae right-hand side")?, 8))
}

fn validate_index(g: usize, k: usize) -> Result<()> {
    if k == 0 || k > 2 * g + 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: 2 * g + 1,
        });
    }
    Ok(())
}

/// `(e_l − e_m)/(e_k − e_m) = ε θ²[ε({k}∪S)] θ²[ε({k}∪T)] / (θ²[ε({l}∪S)] θ²[ε({l}∪T)])`,
/// `ε⁴ = 1`, where `m` is the one index outside `S ∪ T ∪ {k, l}`.
pub fn corollary1_check<T: Real>(
    data: &CurveData<T>,
    s: &[usize],
    t: &[usize],
    k: usize,
    l: usize,
) -> Result<IdentityFit<T>> {
    let g = data.genus();
    if s.len() != g - 1 || t.len() != g - 1 {
        return Err(Error::InvalidArgument(format!("S and T must have {} elements", g - 1)));
    }
    if k == l {
        return Err(Error::InvalidArgument("k and l must differ".into()));
    }
    let mut used: Vec<usize> = s.iter().chain(t).copied().collect();
    used.push(k);
    used.push(l);
    for &x in &used {
        validate_index(g, x)?;
    }
    let mut sorted = used.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != used.len() {
        return Err(Error::InvalidArgument("S, T, k and l must be pairwise disjoint".into()));
    }
    let m = (1..=2 * g + 1)
        .find(|x| !used.contains(x))
        .expect("exactly one index remains");
    let lhs = real_c((data.e(l)? - data.e(m)?) / (data.e(k)? - data.e(m)?));
    let th = |x: usize, set: &[usize]| -> Result<Complex<T>> {
        let mut v = set.to_vec();
        v.push(x);
        Ok(data.thetas.of_set(&v)?.powu(2))
    };
    let rhs = th(k, s)? * th(k, t)? / (th(l, s)? * th(l, t)?);
    Ok(IdentityFit::scalar(lhs, nonzero(rhs, "corollary 1 right-hand side")?, 4))
}

/// The `±θ⁴` identity for `k, n ∈ I₀` and `i, j ∈ J₀`:
/// `∏_{J₀}(e_k − e_x) / (∏_{I₀∖k}(e_k − e_x)(e_k − e_n)²)
///  = ± θ⁴[{i}∪S_k]θ⁴[{j}∪S_k]θ⁴[{n}∪T_ij] / (θ⁴[{i,j}∪S_kn]θ⁴[{i}∪T_ij]θ⁴[{j}∪T_ij])`
/// with `S_k = I₀∖{k}`, `S_kn = I₀∖{k,n}`, `T_ij = J₀∖{i,j}`.
pub fn corollary2_check<T: Real>(
    data: &CurveData<T>,
    p: &Partition,
    k: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<IdentityFit<T>> {
    check_genus(data, p)?;
    let (i0, j0) = (p.i_set(), p.j_set());
    if k == n || !i0.contains(&k) || !i0.contains(&n) {
        return Err(Error::InvalidArgument("k, n must be distinct members of I0".into()));
    }
    if i == j || !j0.contains(&i) || !j0.contains(&j) {
        return Err(Error::InvalidArgument("i, j must be distinct members of J0".into()));
    }
    let ek = data.e(k)?;
    let num = j0.iter().try_fold(T::one(), |a, &x| Ok::<_, Error>(a * (ek - data.e(x)?)))?;
    let den = i0
        .iter()
        .filter(|&&x| x != k)
        .try_fold(T::one(), |a, &x| Ok::<_, Error>(a * (ek - data.e(x)?)))?
        * (ek - data.e(n)?).powi(2);
    let lhs = real_c(num / den);
    let sk: Vec<usize> = i0.iter().copied().filter(|&x| x != k).collect();
    let skn: Vec<usize> = i0.iter().copied().filter(|&x| x != k && x != n).collect();
    let tij: Vec<usize> = j0.iter().copied().filter(|&x| x != i && x != j).collect();
    let th4 = |extra: &[usize], base: &[usize]| -> Result<Complex<T>> {
        let mut v = base.to_vec();
        v.extend_from_slice(extra);
        Ok(data.thetas.of_set(&v)?.powu(4))
    };
    let rhs = th4(&[i], &sk)? * th4(&[j], &sk)? * th4(&[n], &tij)?
        / (th4(&[i, j], &skn)? * th4(&[i], &tij)? * th4(&[j], &tij)?);
    Ok(IdentityFit::scalar(lhs, nonzero(rhs, "corollary 2 right-hand side")?, 2))
}

/// `s_{g−i}(I₁⁽ⁿ⁾)` for `i = 1..g`: the column of the symmetric-function matrix.
pub fn s_column<T: Real>(curve: &HyperellipticCurve<T>, i1: &[usize]) -> Result<Vec<T>> {
    let g = curve.genus();
    let vals: Vec<T> = i1.iter().map(|&k| curve.e(k)).collect::<Result<_>>()?;
    let s = symmetric_functions_alt(&vals);
    Ok((1..=g).map(|i| s.get(g - i).copied().unwrap_or_else(T::zero)).collect())
}

/// Matrix `𝒮` with column `n` equal to [`s_column`] of `I₁⁽ⁿ⁾`, `n` over sorted `I₀`.
pub fn s_matrix<T: Real>(curve: &HyperellipticCurve<T>, p: &Partition) -> Result<CMatrix<T>> {
    let cols = p
        .i_set()
        .iter()
        .map(|&n| Ok(s_column(curve, p.i1(n)?.i_set())?.into_iter().map(real_c).collect()))
        .collect::<Result<Vec<Vec<Complex<T>>>>>()?;
    Ok(CMatrix::from_columns(&cols))
}

fn second_prefactor<T: Real>(data: &CurveData<T>) -> Complex<T> {
    let g = data.genus();
    principal_root(
        data.periods.det_a() / (T::lit(2.0).powi(g as i32 + 2) * pi_pow::<T>(g)),
        2,
    )
}

/// `∇θ[ε(I₁⁽ⁿ⁾)](0) = ε (det A / 2^{g+2} π^g)^{1/2} ∇(I₁⁽ⁿ⁾)^{1/4} Aᵀ s`,
/// with `s_i = s_{g−i}(I₁⁽ⁿ⁾)` and `A_{ik} = ∮_{a_k} du_i`.
pub fn second_thomae_check<T: Real>(data: &CurveData<T>, p: &Partition, n: usize) -> Result<IdentityFit<T>> {
    check_genus(data, p)?;
    let i1 = p.i1(n)?;
    let lhs = data.thetas.gradient_of_set(i1.i_set())?;
    let s: Vec<Complex<T>> = s_column(&data.curve, i1.i_set())?.into_iter().map(real_c).collect();
    let at_s = data.periods.a_matrix.transpose().mul_vec(&s);
    let c = second_prefactor(data) * principal_root(real_c(data.curve.nabla(i1.i_set())?), 4);
    let rhs: Vec<Complex<T>> = at_s.into_iter().map(|z| z * c).collect();
    if rhs.iter().all(|z| z.norm() == T::zero()) {
        return Err(Error::Vanishing("second Thomae right-hand side".into()));
    }
    Ok(IdentityFit::vectors(&lhs, &rhs, 8))
}

/// Matrix form: `J = ε (det A / 2^{g+2} π^g)^{1/2} Aᵀ 𝒮 𝒟`, `𝒟 = diag ∇(I₁⁽ⁿ⁾)^{1/4}`,
/// where `J` has the gradients of `θ[ε(I₁⁽ⁿ⁾)]` as columns.
pub fn second_thomae_matrix_check<T: Real>(data: &CurveData<T>, p: &Partition) -> Result<IdentityFit<T>> {
    check_genus(data, p)?;
    let j = data.thetas.jacobi_matrix(p)?;
    let s = s_matrix(&data.curve, p)?;
    if s.determinant().norm() == T::zero() {
        return Err(Error::Singular("symmetric-function matrix".into()));
    }
    let d: Vec<Complex<T>> = p
        .i_set()
        .iter()
        .map(|&n| Ok(principal_root(real_c(data.curve.nabla(p.i1(n)?.i_set())?), 4)))
        .collect::<Result<_>>()?;
    let rhs = (&(&data.periods.a_matrix.transpose() * &s) * &CMatrix::diagonal(&d)).scale(second_prefactor(data));
    Ok(IdentityFit::matrices(&j, &rhs, 8))
}

/// `⁴√χ_n = ε (Θ_{I₁}/Θ_{I₀})^{1/(g−1)} · (∏_{i∈I₀, i≠n}(e_n − e_i))^{1/(2g−2)}`.
pub fn chi_fourth_root_theta<T: Real>(data: &CurveData<T>, p: &Partition, n: usize) -> Result<IdentityFit<T>> {
    check_genus(data, p)?;
    let g = data.genus();
    if g < 2 {
        return Err(Error::InvalidArgument("the theta expression for chi needs genus at least 2".into()));
    }
    let lhs = principal_root(real_c(data.curve.chi(p, n)?), 4);
    let rhs = chi_theta_side(&data.curve, &data.thetas, p, n)?;
    Ok(IdentityFit::scalar(lhs, nonzero(rhs, "theta expression for chi")?, 8))
}

/// Theta side of [`chi_fourth_root_theta`].
pub fn chi_theta_side<T: Real>(
    curve: &HyperellipticCurve<T>,
    table: &ThetaTable<T>,
    p: &Partition,
    n: usize,
) -> Result<Complex<T>> {
    let g = curve.genus();
    let t0 = nonzero(theta_i0_product(table, p)?, "Theta_I0")?;
    let t1 = theta_i1_product(table, p, n)?;
    let en = curve.e(n)?;
    let prod = p
        .i_set()
        .iter()
        .filter(|&&i| i != n)
        .try_fold(T::one(), |a, &i| Ok::<_, Error>(a * (en - curve.e(i)?)))?;
    let gm1 = T::from_usize(g - 1).unwrap();
    Ok(principal_pow(t1 / t0, T::one() / gm1) * principal_pow(real_c(prod), T::one() / (gm1 * T::lit(2.0))))
}

/// All `(I₀, n)` pairs of a genus, in lexicographic order.
pub fn partition_index_pairs(g: usize) -> Vec<(Partition, usize)> {
    Partition::all_m0(g)
        .into_iter()
        .flat_map(|p| p.i_set().to_vec().into_iter().map(move |n| (p.clone(), n)))
        .collect()
}
