//! Odd-model hyperelliptic curves `y² = (x−e₁)⋯(x−e_{2g+1})` with real, strictly
//! increasing branch points, and the branch-point combinatorics used by the
//! Thomae-type formulae.

use itertools::Itertools;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

/// Dense polynomial with coefficients stored from the highest degree down.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Field> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len().saturating_sub(1));
        let coeffs = if coeffs.is_empty() { vec![T::zero()] } else { coeffs[lead..].to_vec() };
        Self { coeffs }
    }

    /// Monic polynomial `∏(x − r)`.
    pub fn from_roots(roots: &[T]) -> Self {
        Self {
            coeffs: symmetric_functions_alt(roots),
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let d = self.degree();
        if d == 0 {
            return Self::new(vec![T::zero()]);
        }
        let coeffs = self.coeffs[..d]
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let power = d - k;
                (0..power).fold(T::zero(), |acc, _| acc + c.clone())
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

/// Coefficients `s₀ = 1, s₁ = −Σx, s₂ = Σx_px_q, …` of `∏(x − x_k)`, highest
/// degree first.
pub fn symmetric_functions_alt<T: Field>(values: &[T]) -> Vec<T> {
    let mut s = vec![T::one()];
    for v in values {
        let mut next = s.clone();
        next.push(T::zero());
        for j in 1..next.len() {
            next[j] = next[j].clone() - v.clone() * s[j - 1].clone();
        }
        s = next;
    }
    s
}

/// Index sets `(I_m, J_m)` partitioning `{1, …, 2g+1}`; `|I_m| = g − m`, `m ∈ {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    genus: usize,
    speciality: u8,
    i_set: Vec<usize>,
    j_set: Vec<usize>,
}

impl Partition {
    pub fn new(genus: usize, speciality: u8, i_set: &[usize]) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidPartition("genus must be positive".into()));
        }
        if speciality > 1 {
            return Err(Error::InvalidPartition(format!("speciality {speciality} not in {{0, 1}}")));
        }
        let want = genus - speciality as usize;
        let i: Vec<usize> = i_set.iter().copied().sorted().collect();
        if i.len() != want {
            return Err(Error::InvalidPartition(format!(
                "I_{speciality} must have {want} elements, got {}",
                i.len()
            )));
        }
        if i.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition(format!("repeated index in {i:?}")));
        }
        if let Some(&bad) = i.iter().find(|&&k| k == 0 || k > 2 * genus + 1) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                max: 2 * genus + 1,
            });
        }
        let j = (1..=2 * genus + 1).filter(|k| !i.contains(k)).collect();
        Ok(Self {
            genus,
            speciality,
            i_set: i,
            j_set: j,
        })
    }

    /// Non-special partition `I₀ ∪ J₀` with `|I₀| = g`.
    pub fn m0(genus: usize, i0: &[usize]) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidPartition("genus must be positive".into()));
        }
        if i0.len() != genus {
            return Err(Error::InvalidPartition(format!(
                "I_0 must have {genus} elements, got {}",
                i0.len()
            )));
        }
        Self::new(genus, 0, i0)
    }

    /// All `C(2g+1, g)` non-special partitions in lexicographic order of `I₀`.
    pub fn all_m0(genus: usize) -> Vec<Self> {
        (1..=2 * genus + 1)
            .combinations(genus)
            .map(|i| Self::m0(genus, &i).expect("valid by construction"))
            .collect()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn speciality(&self) -> u8 {
        self.speciality
    }

    pub fn i_set(&self) -> &[usize] {
        &self.i_set
    }

    pub fn j_set(&self) -> &[usize] {
        &self.j_set
    }

    fn require_m0(&self) -> Result<()> {
        if self.speciality != 0 {
            return Err(Error::InvalidPartition("operation needs a speciality-0 partition".into()));
        }
        Ok(())
    }

    fn require_in_i(&self, n: usize) -> Result<()> {
        if !self.i_set.contains(&n) {
            return Err(Error::InvalidPartition(format!("{n} is not in I = {:?}", self.i_set)));
        }
        Ok(())
    }

    /// `I₁⁽ⁿ⁾ = I₀ ∖ {n}`, `J₁⁽ⁿ⁾ = J₀ ∪ {n}`.
    pub fn i1(&self, n: usize) -> Result<Self> {
        self.require_m0()?;
        self.require_in_i(n)?;
        let i: Vec<usize> = self.i_set.iter().copied().filter(|&k| k != n).collect();
        Self::new(self.genus, 1, &i)
    }

    /// `T₀ = J₀` followed by `T_k = J₀ ∖ {j_k}` for `k = 1, …, g+1`.
    pub fn t_sets(&self) -> Result<Vec<Vec<usize>>> {
        self.require_m0()?;
        let mut out = vec![self.j_set.clone()];
        for &j in &self.j_set {
            out.push(self.j_set.iter().copied().filter(|&k| k != j).collect());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperellipticCurve<T> {
    genus: usize,
    branch_points: Vec<T>,
}

fn power_of_ten<T: Field>(exp: u32) -> T {
    let ten = (0..10).fold(T::zero(), |a, _| a + T::one());
    (0..exp).fold(T::one(), |a, _| a * ten.clone())
}

impl<T: Field> HyperellipticCurve<T> {
    /// Validates `2g+1` strictly increasing, well separated branch points.
    pub fn new(genus: usize, branch_points: Vec<T>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidCurve("genus must be at least 1".into()));
        }
        if branch_points.len() != 2 * genus + 1 {
            return Err(Error::InvalidCurve(format!(
                "genus {genus} needs {} finite branch points, got {}",
                2 * genus + 1,
                branch_points.len()
            )));
        }
        for (k, w) in branch_points.windows(2).enumerate() {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidCurve(format!(
                    "branch points must be strictly increasing: e_{} = {:?} is not below e_{} = {:?}",
                    k + 1,
                    w[0],
                    k + 2,
                    w[1]
                )));
            }
        }
        let span = branch_points[branch_points.len() - 1].clone() - branch_points[0].clone();
        let scale = power_of_ten::<T>(10);
        for (k, w) in branch_points.windows(2).enumerate() {
            if (w[1].clone() - w[0].clone()) * scale.clone() < span {
                return Err(Error::InvalidCurve(format!(
                    "e_{} and e_{} nearly coincide (gap below 1e-10 of the span)",
                    k + 1,
                    k + 2
                )));
            }
        }
        Ok(Self {
            genus,
            branch_points,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[T] {
        &self.branch_points
    }

    /// Branch point `e_k` with 1-based index.
    pub fn e(&self, k: usize) -> Result<T> {
        self.check_index(k)?;
        Ok(self.branch_points[k - 1].clone())
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > 2 * self.genus + 1 {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: 2 * self.genus + 1,
            });
        }
        Ok(())
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.genus != self.genus {
            return Err(Error::GenusMismatch {
                expected: self.genus,
                found: p.genus,
            });
        }
        Ok(())
    }

    pub fn f(&self) -> Polynomial<T> {
        Polynomial::from_roots(&self.branch_points)
    }

    fn values(&self, set: &[usize]) -> Result<Vec<T>> {
        set.iter().map(|&k| self.e(k)).collect()
    }

    /// `φ(x) = ∏_{I₀}(x − e_i)` and `ψ(x) = ∏_{J₀}(x − e_j)`.
    pub fn split_phi_psi(&self, p: &Partition) -> Result<(Polynomial<T>, Polynomial<T>)> {
        self.check_partition(p)?;
        p.require_m0()?;
        Ok((
            Polynomial::from_roots(&self.values(&p.i_set)?),
            Polynomial::from_roots(&self.values(&p.j_set)?),
        ))
    }

    /// `Δ(S) = ∏_{k<l}(e_l − e_k)` over the sorted set.
    pub fn vandermonde(&self, set: &[usize]) -> Result<T> {
        let sorted: Vec<usize> = set.iter().copied().sorted().dedup().collect();
        let vals = self.values(&sorted)?;
        let mut d = T::one();
        for l in 0..vals.len() {
            for k in 0..l {
                d = d * (vals[l].clone() - vals[k].clone());
            }
        }
        Ok(d)
    }

    /// `∇(S) = Δ(S)·Δ(complement of S in {1, …, 2g+1})`.
    pub fn nabla(&self, set: &[usize]) -> Result<T> {
        for &k in set {
            self.check_index(k)?;
        }
        let rest: Vec<usize> = (1..=2 * self.genus + 1).filter(|k| !set.contains(k)).collect();
        Ok(self.vandermonde(set)? * self.vandermonde(&rest)?)
    }

    /// `χ_n = ∏_{j∈J₀}(e_n − e_j) / ∏_{i∈I₀, i≠n}(e_n − e_i)`.
    pub fn chi(&self, p: &Partition, n: usize) -> Result<T> {
        self.check_partition(p)?;
        p.require_m0()?;
        p.require_in_i(n)?;
        let en = self.e(n)?;
        let num = p
            .j_set
            .iter()
            .try_fold(T::one(), |acc, &j| Ok::<_, Error>(acc * (en.clone() - self.e(j)?)))?;
        let den = p
            .i_set
            .iter()
            .filter(|&&i| i != n)
            .try_fold(T::one(), |acc, &i| Ok::<_, Error>(acc * (en.clone() - self.e(i)?)))?;
        Ok(num / den)
    }

    /// `χ_n = ψ(e_n)/φ′(e_n)` through polynomial evaluation.
    pub fn chi_via_polynomials(&self, p: &Partition, n: usize) -> Result<T> {
        let (phi, psi) = self.split_phi_psi(p)?;
        p.require_in_i(n)?;
        let en = self.e(n)?;
        Ok(psi.eval(&en) / phi.derivative().eval(&en))
    }

    /// Sign in `∇(I₀)·χ_n = sign·∇(I₁⁽ⁿ⁾)` for sorted Vandermonde products.
    pub fn chi_nabla_sign(&self, p: &Partition, n: usize) -> Result<i8> {
        p.require_m0()?;
        p.require_in_i(n)?;
        Ok(if n % 2 == 1 { 1 } else { -1 })
    }
}

impl<T: Real> HyperellipticCurve<T> {
    /// Affine change `x ↦ (x − e_i)/(e_j − e_i)` sending `e_i ↦ 0`, `e_j ↦ 1`;
    /// order is preserved because `i < j`.
    pub fn normalized(&self, i: usize, j: usize) -> Result<Self> {
        if i >= j {
            return Err(Error::InvalidArgument(format!("normalisation needs i < j, got ({i}, {j})")));
        }
        let ei = self.e(i)?;
        let ej = self.e(j)?;
        let scale = ej - ei;
        Self::new(
            self.genus,
            self.branch_points.iter().map(|&x| (x - ei) / scale).collect(),
        )
    }

    /// Converts an even model `y² = Σ λ_k x^k` (degree `2g+2`, coefficients from
    /// the highest degree down) with a known real root `r` to the odd model by
    /// `x = r + 1/t`. The leading constant of the transformed polynomial is
    /// dropped, which rescales the periods but leaves `τ` unchanged.
    pub fn from_even_model(coeffs: &[T], root: T) -> Result<Self> {
        if coeffs.len() < 4 || coeffs.len() % 2 == 0 {
            return Err(Error::InvalidCurve(format!(
                "even model needs 2g+3 coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs[0] == T::zero() {
            return Err(Error::InvalidCurve(
                "leading coefficient vanishes; the model already has a branch point at infinity".into(),
            ));
        }
        let genus = (coeffs.len() - 3) / 2;
        // Taylor coefficients b_k of F(r + u), lowest degree first.
        let mut work: Vec<T> = coeffs.to_vec();
        let mut taylor = Vec::with_capacity(coeffs.len());
        while !work.is_empty() {
            let mut acc = T::zero();
            let mut quotient = Vec::with_capacity(work.len().saturating_sub(1));
            for (idx, &c) in work.iter().enumerate() {
                acc = acc * root + c;
                if idx + 1 < work.len() {
                    quotient.push(acc);
                }
            }
            taylor.push(acc);
            work = quotient;
        }
        let magnitude = coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |s, (k, &c)| s + c.abs() * root.abs().powi((coeffs.len() - 1 - k) as i32));
        if taylor[0].abs() > T::lit(1e-10) * magnitude.max(T::one()) {
            return Err(Error::InvalidCurve(format!("{root} is not a root of the even model")));
        }
        // G(t) = Σ_{k≥1} b_k t^{2g+2-k}; highest degree first is b_1, b_2, ….
        let g_coeffs: Vec<T> = taylor[1..].to_vec();
        let roots = polynomial_roots(&g_coeffs)?;
        let scale = roots.iter().fold(T::one(), |m, z| m.max(z.norm()));
        let mut real = Vec::with_capacity(roots.len());
        for z in roots {
            if z.im.abs() > T::lit(1e-8) * scale {
                return Err(Error::InvalidCurve(
                    "even model has non-real branch points; only real configurations are supported".into(),
                ));
            }
            real.push(z.re);
        }
        real.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self::new(genus, real)
    }
}

/// All complex roots of a polynomial (highest degree first) by Aberth–Ehrlich
/// iteration.
fn polynomial_roots<T: Real>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let monic: Vec<Complex<T>> = coeffs.iter().map(|&c| Complex::new(c / lead, T::zero())).collect();
    let deriv: Vec<Complex<T>> = (0..n)
        .map(|k| monic[k] * T::from_usize(n - k).unwrap())
        .collect();
    let horner = |p: &[Complex<T>], z: Complex<T>| p.iter().fold(Complex::new(T::zero(), T::zero()), |a, &c| a * z + c);
    let bound = T::one()
        + monic[1..]
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm()));
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let angle = T::lit(2.0) * T::PI() * T::from_usize(k).unwrap() / T::from_usize(n).unwrap() + T::lit(0.4);
            Complex::from_polar(bound * T::lit(0.5), angle)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = T::zero();
        for k in 0..n {
            let p = horner(&monic, z[k]);
            let dp = horner(&deriv, z[k]);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let sum = (0..n)
                .filter(|&j| j != k)
                .fold(Complex::new(T::zero(), T::zero()), |s, j| s + (z[k] - z[j]).inv());
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * sum);
            z[k] = z[k] - step;
            moved = moved.max(step.norm() / z[k].norm().max(T::one()));
        }
        if moved < T::epsilon() * T::lit(16.0) {
            return Ok(z);
        }
    }
    Err(Error::InvalidCurve("root finding for the even model did not converge".into()))
}
