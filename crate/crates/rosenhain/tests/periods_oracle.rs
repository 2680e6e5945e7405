use std::f64::consts::FRAC_PI_2;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rosenhain::curve::HyperellipticCurve as Curve;
use rosenhain::periods::{compute_periods, segment_integrals};
use rosenhain::thomae::first_thomae_check;
use rosenhain::verify::corollary1_choices;
use rosenhain::{Characteristic, CurveData, HyperellipticCurve, Partition, ThetaTable, Tolerances};

/// Tanh-sinh rule for `∫_a^b x^p / √|∏(x − e_k)| dx`, with the two endpoint
/// distances computed from the substitution rather than by subtraction.
fn tanh_sinh(e: &[f64], s: usize, p: i32) -> f64 {
    let (a, b) = (e[s - 1], e[s]);
    let r = (b - a) / 2.0;
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    for k in -600i32..=600 {
        let t = f64::from(k) * h;
        let u = FRAC_PI_2 * t.sinh();
        let c = u.cosh();
        let (to_a, to_b) = (r * u.exp() / c, r * (-u).exp() / c);
        if to_a == 0.0 || to_b == 0.0 {
            continue;
        }
        let x = if t < 0.0 { a + to_a } else { b - to_b };
        let rest: f64 = e
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != s - 1 && j != s)
            .map(|(_, &ek)| (x - ek).abs())
            .product();
        let w = r * FRAC_PI_2 * t.cosh() / (c * c);
        sum += w * x.powi(p) / (to_a * to_b * rest).sqrt();
    }
    sum * h
}

fn random_curve(rng: &mut ChaCha8Rng, g: usize) -> HyperellipticCurve {
    let mut e = vec![rng.gen_range(-2.0..2.0)];
    for _ in 0..2 * g {
        let next = e[e.len() - 1] + rng.gen_range(0.3..2.5);
        e.push(next);
    }
    HyperellipticCurve::new(g, e).unwrap()
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    // quadratic convergence; 30 steps are far more than double precision needs
    for _ in 0..30 {
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    a
}

#[test]
fn segment_integrals_match_tanh_sinh() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in 1..=3 {
        for _ in 0..3 {
            let curve = random_curve(&mut rng, g);
            let (seg, _) = segment_integrals(&curve, 1e-12).unwrap();
            for s in 1..=2 * g {
                for p in 0..g {
                    let oracle = tanh_sinh(curve.branch_points(), s, p as i32);
                    let got = seg[s - 1][p];
                    assert!(
                        (got - oracle).abs() < 1e-11 * oracle.abs().max(1.0),
                        "g={g} segment {s} power {p}: {got} vs {oracle}"
                    );
                }
            }
        }
    }
}

#[test]
fn genus_one_tau_from_agm() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let curve = random_curve(&mut rng, 1);
        let e = curve.branch_points();
        let k = agm((e[2] - e[0]).sqrt(), (e[2] - e[1]).sqrt());
        let k_prime = agm((e[2] - e[0]).sqrt(), (e[1] - e[0]).sqrt());
        let tau = compute_periods(&curve, 1e-12).unwrap().tau.tau()[(0, 0)];
        assert!(tau.re.abs() < 1e-13, "{tau}");
        assert!((tau.im - k / k_prime).abs() < 1e-12 * tau.im, "{tau} vs {}", k / k_prime);
    }
}

#[test]
fn periods_are_siegel_and_stable_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for g in 1..=3 {
        for _ in 0..3 {
            let curve = random_curve(&mut rng, g);
            let coarse = compute_periods(&curve, 1e-10).unwrap();
            let fine = compute_periods(&curve, 5e-11).unwrap();
            assert!(coarse.siegel.symmetry_defect < 1e-8 && coarse.siegel.min_eigenvalue > 0.0);
            let diff = coarse.a_matrix.sub(&fine.a_matrix).max_abs();
            assert!(diff < 10.0 * 5e-11 * coarse.a_matrix.max_abs().max(1.0), "g={g}: {diff}");
        }
    }
}

#[test]
fn vanishing_pattern_of_theta_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for g in 2..=3 {
        let curve = random_curve(&mut rng, g);
        let periods = compute_periods(&curve, 1e-12).unwrap();
        let table = ThetaTable::new(&periods.tau, 1e-12).unwrap();
        for p in Partition::all_m0(g) {
            assert!(table.of_set(p.i_set()).unwrap().norm() > 1e-6, "{:?}", p.i_set());
        }
        for c in Characteristic::all(g).into_iter().filter(Characteristic::is_odd) {
            assert!(table.constant(&c).unwrap().norm() < 1e-12);
            let grad = table.gradient(&c).unwrap();
            assert!(grad.iter().any(|z| z.norm() > 1e-6), "{c}");
        }
    }
}

#[test]
fn thomae_root_is_invariant_under_rescaling() {
    let tol = Tolerances::default();
    let base = vec![0.0, 0.7, 1.9, 2.6, 4.0, 5.5, 6.1];
    let powers = |lambda: f64| -> Vec<u32> {
        let e: Vec<f64> = base.iter().map(|x| lambda * x).collect();
        let data = CurveData::compute(&HyperellipticCurve::new(3, e).unwrap(), &tol).unwrap();
        Partition::all_m0(3)
            .iter()
            .map(|p| {
                let fit = first_thomae_check(&data, p).unwrap();
                assert!(fit.pass(1e-8));
                fit.fit.power
            })
            .collect()
    };
    let reference = powers(1.0);
    for lambda in [0.3, 2.0, 7.5] {
        assert_eq!(powers(lambda), reference, "lambda={lambda}");
    }
}

type Q = Ratio<i128>;

/// Replaces each `θ⁴[ε(S)]` by `∇(S)`; the common Thomae factor cancels in
/// both corollaries, leaving exact identities up to sign.
#[test]
fn corollaries_are_exact_after_thomae_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for g in 2..=3 {
        for _ in 0..5 {
            let mut e = vec![Q::from_integer(rng.gen_range(-3..3))];
            for _ in 0..2 * g {
                let next = e[e.len() - 1] + Q::new(rng.gen_range(1..4), rng.gen_range(1..3));
                e.push(next);
            }
            let curve = Curve::new(g, e).unwrap();
            let nabla = |extra: &[usize], base: &[usize]| {
                let mut v = base.to_vec();
                v.extend_from_slice(extra);
                curve.nabla(&v).unwrap()
            };
            let ev = |k: usize| curve.e(k).unwrap();
            for (s, t, k, l) in corollary1_choices(g) {
                let m = (1..=2 * g + 1).find(|x| !s.contains(x) && !t.contains(x) && *x != k && *x != l).unwrap();
                let lhs = (ev(l) - ev(m)) / (ev(k) - ev(m));
                let rhs = nabla(&[k], &s) * nabla(&[k], &t) / (nabla(&[l], &s) * nabla(&[l], &t));
                let sq = lhs * lhs;
                assert!(sq == rhs || sq == -rhs, "S={s:?} T={t:?} k={k} l={l}");
            }
            for p in Partition::all_m0(g) {
                let (i0, j0) = (p.i_set(), p.j_set());
                for &k in i0 {
                    for &n in i0.iter().filter(|&&n| n != k) {
                        let num: Q = j0.iter().map(|&x| ev(k) - ev(x)).product();
                        let den: Q = i0.iter().filter(|&&x| x != k).map(|&x| ev(k) - ev(x)).product::<Q>()
                            * (ev(k) - ev(n))
                            * (ev(k) - ev(n));
                        let lhs = num / den;
                        let sk: Vec<usize> = i0.iter().copied().filter(|&x| x != k).collect();
                        let skn: Vec<usize> = sk.iter().copied().filter(|&x| x != n).collect();
                        for (a, &i) in j0.iter().enumerate() {
                            for &j in &j0[a + 1..] {
                                let tij: Vec<usize> = j0.iter().copied().filter(|&x| x != i && x != j).collect();
                                let rhs = nabla(&[i], &sk) * nabla(&[j], &sk) * nabla(&[n], &tij)
                                    / (nabla(&[i, j], &skn) * nabla(&[i], &tij) * nabla(&[j], &tij));
                                assert!(lhs == rhs || lhs == -rhs, "I0={i0:?} k={k} n={n} i={i} j={j}");
                            }
                        }
                    }
                }
            }
        }
    }
}
