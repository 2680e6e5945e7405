//! Verification suites: every identity evaluated over all applicable
//! partitions and index choices, reported in a fixed order.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{HyperellipticCurve, Partition};
use crate::error::{Error, Result};
use crate::report::{IdentityFit, VerificationReport};
use crate::rosenhain::{
    a_direct_general, a_inverse_general, a_inverse_genus3, appendix_a_check, bolza_residual, classical_identities,
    column_fits, genus2_round_trip, recover_branch_points_genus2, recover_pair_genus3, riemann_jacobi_check,
    triple_relation_check, APPENDIX_A,
};
use crate::scalar::Real;
use crate::theta::ThetaTable;
use crate::thomae::{
    chi_fourth_root_theta, corollary1_check, corollary2_check, first_thomae_check, partition_index_pairs,
    second_thomae_check, second_thomae_matrix_check, CurveData,
};
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Thomae1,
    Thomae2,
    Corollaries,
    RiemannJacobi,
    Rosenhain2,
    Rosenhain3,
    AppendixA,
    Bolza,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = [
        "thomae1",
        "thomae2",
        "corollaries",
        "riemann-jacobi",
        "rosenhain2",
        "rosenhain3",
        "appendix-a",
        "bolza",
        "all",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    /// Suites run by `all` for a curve of genus `g`.
    pub fn for_genus(g: usize) -> Vec<Suite> {
        use Suite::*;
        match g {
            1 => vec![Thomae1, Thomae2, Corollaries, RiemannJacobi, Bolza],
            2 => vec![Thomae1, Thomae2, Corollaries, RiemannJacobi, Rosenhain2, AppendixA, Bolza],
            3 => vec![Thomae1, Thomae2, Corollaries, RiemannJacobi, Rosenhain3, Bolza],
            _ => vec![Thomae1, Thomae2, Corollaries, RiemannJacobi, Bolza],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use Suite::*;
        const ALL: [Suite; 9] = [
            Thomae1,
            Thomae2,
            Corollaries,
            RiemannJacobi,
            Rosenhain2,
            Rosenhain3,
            AppendixA,
            Bolza,
            All,
        ];
        ALL.into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}; expected one of {}", Self::NAMES.join(", "))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub reports: Vec<VerificationReport>,
}

impl SuiteResult {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.pass).count()
    }

    pub fn total(&self) -> usize {
        self.reports.len()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.total()
    }

    pub fn residual_max(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.residual.max(r.spread))
            .fold(0.0, |m, x| if x.is_nan() { f64::INFINITY } else { m.max(x) })
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {}/{} residual_max={:.3e}",
            self.suite,
            self.passed(),
            self.total(),
            self.residual_max()
        )
    }
}

type Indices = Vec<(&'static str, Vec<usize>)>;

fn record<T: Real>(name: &str, idx: &Indices, r: Result<IdentityFit<T>>, tol: f64) -> VerificationReport {
    match r {
        Ok(fit) => VerificationReport::from_fit(name, idx, &fit, T::lit(tol)),
        Err(e) => VerificationReport::failed(name, idx, e.to_string()),
    }
}

fn require_genus(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::GenusMismatch { expected, found });
    }
    Ok(())
}

pub fn thomae1<T: Real>(data: &CurveData<T>, tol: f64) -> Vec<VerificationReport> {
    Partition::all_m0(data.genus())
        .par_iter()
        .map(|p| {
            let idx = vec![("I0", p.i_set().to_vec())];
            record("thomae1", &idx, first_thomae_check(data, p), tol)
        })
        .collect()
}

pub fn thomae2<T: Real>(data: &CurveData<T>, tol: f64) -> Vec<VerificationReport> {
    let g = data.genus();
    let pairs = partition_index_pairs(g);
    let mut out: Vec<VerificationReport> = pairs
        .par_iter()
        .map(|(p, n)| {
            let idx = vec![("I0", p.i_set().to_vec()), ("n", vec![*n])];
            record("thomae2", &idx, second_thomae_check(data, p, *n), tol)
        })
        .collect();
    out.extend(Partition::all_m0(g).par_iter().map(|p| {
        let idx = vec![("I0", p.i_set().to_vec())];
        record("thomae2-matrix", &idx, second_thomae_matrix_check(data, p), tol)
    }).collect::<Vec<_>>());
    if g >= 2 {
        out.extend(pairs.par_iter().map(|(p, n)| {
            let idx = vec![("I0", p.i_set().to_vec()), ("n", vec![*n])];
            record("chi-fourth-root", &idx, chi_fourth_root_theta(data, p, *n), tol)
        }).collect::<Vec<_>>());
    }
    out
}

/// Index choices `(S, T, k, l)` with `S < T` lexicographically and `k < l`.
pub fn corollary1_choices(g: usize) -> Vec<(Vec<usize>, Vec<usize>, usize, usize)> {
    let all: Vec<usize> = (1..=2 * g + 1).collect();
    let mut out = Vec::new();
    for m in &all {
        let rest: Vec<usize> = all.iter().copied().filter(|x| x != m).collect();
        for kl in rest.iter().copied().combinations(2) {
            let st: Vec<usize> = rest.iter().copied().filter(|x| !kl.contains(x)).collect();
            for s in st.iter().copied().combinations(g - 1) {
                let t: Vec<usize> = st.iter().copied().filter(|x| !s.contains(x)).collect();
                if s <= t {
                    out.push((s, t, kl[0], kl[1]));
                }
            }
        }
    }
    out
}

pub fn corollaries<T: Real>(data: &CurveData<T>, tol: f64) -> Vec<VerificationReport> {
    let g = data.genus();
    let mut out: Vec<VerificationReport> = corollary1_choices(g)
        .par_iter()
        .map(|(s, t, k, l)| {
            let idx = vec![("S", s.clone()), ("T", t.clone()), ("k", vec![*k]), ("l", vec![*l])];
            record("corollary1", &idx, corollary1_check(data, s, t, *k, *l), tol)
        })
        .collect();
    let choices: Vec<(Partition, usize, usize, usize, usize)> = Partition::all_m0(g)
        .into_iter()
        .flat_map(|p| {
            let i0 = p.i_set().to_vec();
            let j0 = p.j_set().to_vec();
            i0.iter()
                .copied()
                .permutations(2)
                .flat_map(|kn| j0.iter().copied().combinations(2).map(move |ij| (kn[0], kn[1], ij[0], ij[1])))
                .map(|(k, n, i, j)| (p.clone(), k, n, i, j))
                .collect::<Vec<_>>()
        })
        .collect();
    out.extend(choices.par_iter().map(|(p, k, n, i, j)| {
        let idx = vec![("I0", p.i_set().to_vec()), ("k", vec![*k]), ("n", vec![*n]), ("i", vec![*i]), ("j", vec![*j])];
        record("corollary2", &idx, corollary2_check(data, p, *k, *n, *i, *j), tol)
    }).collect::<Vec<_>>());
    out
}

/// The sign-fitted identity plus the literal form with unreduced characteristics.
pub fn riemann_jacobi<T: Real>(table: &ThetaTable<T>, tol: f64) -> Vec<VerificationReport> {
    Partition::all_m0(table.genus())
        .par_iter()
        .flat_map_iter(|p| {
            let idx = vec![("I0", p.i_set().to_vec())];
            [
                record("riemann-jacobi", &idx, riemann_jacobi_check(table, p, false), tol),
                record("riemann-jacobi-lifted", &idx, riemann_jacobi_check(table, p, true), tol),
            ]
        })
        .collect()
}

pub fn appendix_a<T: Real>(table: &ThetaTable<T>, tol: f64) -> Result<Vec<VerificationReport>> {
    require_genus(table.genus(), 2)?;
    Ok(APPENDIX_A
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let idx = vec![("row", vec![k + 1])];
            let mut r = record("appendix-a", &idx, appendix_a_check(table, row), tol);
            if !row.margin_is_sum().unwrap_or(false) {
                r.pass = false;
                r = r.with_note("margin characteristic is not the sum of the right-hand side");
            }
            r
        })
        .collect())
}

pub fn triple_relations<T: Real>(table: &ThetaTable<T>, tol: f64) -> Result<Vec<VerificationReport>> {
    require_genus(table.genus(), 2)?;
    Ok((1..=6)
        .combinations(3)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|ijk| {
            let idx = vec![("ijk", ijk.clone())];
            match triple_relation_check(table, ijk[0], ijk[1], ijk[2]) {
                Ok(t) => VerificationReport::from_residual("triple-relation", &idx, t.residual.to_f64_lossy(), tol)
                    .with_note(t.describe()),
                Err(e) => VerificationReport::failed("triple-relation", &idx, e.to_string()),
            }
        })
        .collect())
}

fn general_reconstruction<T: Real>(data: &CurveData<T>, tol: f64) -> Vec<VerificationReport> {
    Partition::all_m0(data.genus())
        .par_iter()
        .flat_map_iter(|p| {
            let idx = vec![("I0", p.i_set().to_vec())];
            [
                record("a-inverse-general", &idx, a_inverse_general(data, p).map(|r| r.fit), tol),
                record("a-direct-general", &idx, a_direct_general(data, p).map(|r| r.fit), tol),
            ]
        })
        .collect()
}

/// Genus-2 reconstruction: general formula, theta-only round trips for every
/// normalization `(i, j)`, the classical identities and the triple relation.
pub fn rosenhain2<T: Real>(data: &CurveData<T>, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    require_genus(data.genus(), 2)?;
    let t = tol.identity;
    let mut out = general_reconstruction(data, t);
    out.extend(
        (1..=5)
            .combinations(2)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|ij| {
                let idx = vec![("ij", ij.clone())];
                record("a-inverse-genus2", &idx, genus2_round_trip(&data.curve, ij[0], ij[1], tol).map(|r| r.1.fit), t)
            })
            .collect::<Vec<_>>(),
    );
    let idx: Indices = vec![("ij", vec![1, 2])];
    match CurveData::compute(&data.curve.normalized(1, 2)?, tol)
        .and_then(|n| classical_identities(&n.curve, &n.thetas))
    {
        Ok((prod, extra)) => {
            out.push(VerificationReport::from_fit("classical-product", &idx, &prod, T::lit(t)));
            let signed = IdentityFit {
                fit: crate::RootOfUnityFit::fit(extra.fit.ratio, 2),
                spread: extra.spread,
            };
            out.push(
                VerificationReport::from_fit("classical-extra", &idx, &signed, T::lit(t))
                    .with_note("fitted up to sign"),
            );
        }
        Err(e) => out.push(VerificationReport::failed("classical-identities", &idx, e.to_string())),
    }
    out.extend(triple_relations(&data.thetas, t)?);
    Ok(out)
}

/// Genus-3 reconstruction: general formula on the given curve and the
/// column formulae on the curve normalized to `e₁ = 0`, `e₂ = 1` with `e3`
/// supplied by the caller.
pub fn rosenhain3<T: Real>(data: &CurveData<T>, e3: T, tol: &Tolerances) -> Result<Vec<VerificationReport>> {
    require_genus(data.genus(), 3)?;
    let t = tol.identity;
    let mut out = general_reconstruction(data, t);
    let normalized = CurveData::compute(&data.curve.normalized(1, 2)?, tol)?;
    match a_inverse_genus3(&normalized.thetas, e3) {
        Ok(m) => {
            for (k, fit) in column_fits(&m, &normalized.periods.a_inverse()).iter().enumerate() {
                out.push(VerificationReport::from_fit("a-inverse-genus3", &vec![("column", vec![k + 1])], fit, T::lit(t)));
            }
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

pub fn bolza<T: Real>(data: &CurveData<T>, tol: f64) -> Vec<VerificationReport> {
    let g = data.genus();
    let mut out: Vec<VerificationReport> = partition_index_pairs(g)
        .par_iter()
        .map(|(p, n)| {
            let idx = vec![("I0", p.i_set().to_vec()), ("n", vec![*n])];
            match bolza_residual(data, p, *n) {
                Ok(r) => VerificationReport::from_residual("bolza", &idx, r.to_f64_lossy(), tol),
                Err(e) => VerificationReport::failed("bolza", &idx, e.to_string()),
            }
        })
        .collect();
    let a_inv = data.periods.a_inverse();
    let e = data.curve.branch_points();
    let rel = |x: num_complex::Complex<T>, y: T| ((x - crate::scalar::real_c(y)).norm() / (T::one() + y.abs())).to_f64_lossy();
    if g == 2 {
        match recover_branch_points_genus2(&data.thetas, &a_inv) {
            Ok(rec) => {
                for (k, z) in rec.iter().enumerate() {
                    out.push(VerificationReport::from_residual("bolza-recover", &vec![("i", vec![k + 1])], rel(*z, e[k]), tol));
                }
            }
            Err(err) => out.push(VerificationReport::failed("bolza-recover", &vec![], err.to_string())),
        }
    }
    if g == 3 {
        match recover_pair_genus3(&data.thetas, &a_inv) {
            Ok((prod, sum)) => {
                let idx = vec![("I1", vec![1, 2])];
                out.push(VerificationReport::from_residual("bolza-e1e2", &idx, rel(prod, e[0] * e[1]), tol));
                out.push(VerificationReport::from_residual("bolza-sum", &idx, rel(sum, -(e[0] + e[1])), tol));
            }
            Err(err) => out.push(VerificationReport::failed("bolza-recover", &vec![], err.to_string())),
        }
    }
    out
}

/// `e₃` of the curve after normalizing `e₁ ↦ 0`, `e₂ ↦ 1`.
pub fn normalized_e3<T: Real>(curve: &HyperellipticCurve<T>) -> Result<T> {
    curve.normalized(1, 2)?.e(3)
}

/// Runs one suite (or all suites applicable to the genus) on a curve.
pub fn run_suite<T: Real>(
    suite: Suite,
    data: &CurveData<T>,
    e3: Option<T>,
    tol: &Tolerances,
) -> Result<Vec<SuiteResult>> {
    let suites = if suite == Suite::All {
        Suite::for_genus(data.genus())
    } else {
        vec![suite]
    };
    let t = tol.identity;
    let mut out = Vec::with_capacity(suites.len());
    for s in suites {
        let reports = match s {
            Suite::Thomae1 => thomae1(data, t),
            Suite::Thomae2 => thomae2(data, t),
            Suite::Corollaries => corollaries(data, t),
            Suite::RiemannJacobi => riemann_jacobi(&data.thetas, t),
            Suite::Rosenhain2 => rosenhain2(data, tol)?,
            Suite::Rosenhain3 => {
                let e3 = match (e3, suite) {
                    (Some(v), _) => v,
                    (None, Suite::All) => normalized_e3(&data.curve)?,
                    (None, _) => return Err(Error::InvalidArgument("rosenhain3 needs e3".into())),
                };
                rosenhain3(data, e3, tol)?
            }
            Suite::AppendixA => appendix_a(&data.thetas, t)?,
            Suite::Bolza => bolza(data, t),
            Suite::All => unreachable!(),
        };
        out.push(SuiteResult {
            suite: s.name().to_string(),
            reports,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for n in Suite::NAMES {
            assert_eq!(n.parse::<Suite>().unwrap().name(), n);
        }
        assert!("thomae3".parse::<Suite>().is_err());
    }

    #[test]
    fn corollary1_choice_counts() {
        // m, then {k < l}, then an unordered split of the rest into S, T
        assert_eq!(corollary1_choices(2).len(), 5 * 6);
        assert_eq!(corollary1_choices(3).len(), 7 * 15 * 3);
    }
}
