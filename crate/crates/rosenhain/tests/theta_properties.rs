use std::f64::consts::PI;

use proptest::prelude::*;
use rosenhain::theta::{theta, theta_constant, theta_gradient, SiegelMatrix as Siegel};
use rosenhain::{CMatrix, Characteristic, Complex64, SiegelMatrix, ThetaTable};

const SERIES_TOL: f64 = 1e-13;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `τ = X + i(LLᵀ + 0.6·I)` from flat parameter vectors.
fn siegel(g: usize, x: &[f64], l: &[f64]) -> SiegelMatrix {
    let tau = CMatrix::from_fn(g, g, |i, j| {
        let (a, b) = (i.min(j), i.max(j));
        let re = x[a * g + b];
        let mut im = (0..g).map(|k| l[i * g + k] * l[j * g + k]).sum::<f64>();
        if i == j {
            im += 0.6;
        }
        c(re, im)
    });
    Siegel::new(tau).unwrap()
}

fn tau_strategy(g: usize) -> impl Strategy<Value = SiegelMatrix> {
    (
        prop::collection::vec(-0.5f64..0.5, g * g),
        prop::collection::vec(-0.4f64..0.4, g * g),
    )
        .prop_map(move |(x, l)| siegel(g, &x, &l))
}

fn z_strategy(g: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-0.7f64..0.7, -0.25f64..0.25), g).prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

fn char_strategy(g: usize) -> impl Strategy<Value = Characteristic> {
    (0u32..(1 << g), 0u32..(1 << g)).prop_map(move |(t, b)| Characteristic::from_bits(g, t, b))
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * (a.norm() + b.norm()) + 1e-11
}

fn genus_and_data() -> impl Strategy<Value = (SiegelMatrix, Characteristic, Vec<Complex64>)> {
    (1usize..=3).prop_flat_map(|g| (tau_strategy(g), char_strategy(g), z_strategy(g)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parity((tau, ch, z) in genus_and_data()) {
        let minus: Vec<Complex64> = z.iter().map(|w| -w).collect();
        let a = theta(&ch, &z, &tau, SERIES_TOL).unwrap();
        let b = theta(&ch, &minus, &tau, SERIES_TOL).unwrap();
        let sign = if ch.is_odd() { -1.0 } else { 1.0 };
        prop_assert!(close(b, a * sign, 1e-10), "{a} vs {b}");
    }

    #[test]
    fn quasi_periodicity(
        (tau, ch, z) in genus_and_data(),
        k in prop::collection::vec(-1i32..=1, 3),
        kp in prop::collection::vec(-1i32..=1, 3),
    ) {
        let g = tau.genus();
        let (k, kp) = (&k[..g], &kp[..g]);
        let t = tau.tau();
        let tau_kp: Vec<Complex64> = (0..g).map(|i| (0..g).map(|j| t[(i, j)] * f64::from(kp[j])).sum()).collect();
        let shifted: Vec<Complex64> = (0..g).map(|i| z[i] + f64::from(k[i]) + tau_kp[i]).collect();
        let (top, bottom) = (ch.top(), ch.bottom());
        let mut phase = c(0.0, 0.0);
        for i in 0..g {
            let kpi = f64::from(kp[i]);
            phase -= tau_kp[i] * kpi + z[i] * (2.0 * kpi);
            phase += f64::from(top[i]) * f64::from(k[i]) - f64::from(bottom[i]) * kpi;
        }
        let factor = (phase * c(0.0, PI)).exp();
        let lhs = theta(&ch, &shifted, &tau, SERIES_TOL).unwrap();
        let rhs = theta(&ch, &z, &tau, SERIES_TOL).unwrap() * factor;
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn gradient_matches_central_differences(tau in (1usize..=3).prop_flat_map(tau_strategy), pick in 0usize..64) {
        let g = tau.genus();
        let odd: Vec<Characteristic> = Characteristic::all(g).into_iter().filter(|x| x.is_odd()).collect();
        let ch = &odd[pick % odd.len()];
        let grad = theta_gradient(ch, &tau, SERIES_TOL).unwrap();
        let h = 1e-5;
        let scale = grad.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1e-3);
        for j in 0..g {
            let mut zp = vec![c(0.0, 0.0); g];
            let mut zm = zp.clone();
            zp[j] = c(h, 0.0);
            zm[j] = c(-h, 0.0);
            let fd = (theta(ch, &zp, &tau, SERIES_TOL).unwrap() - theta(ch, &zm, &tau, SERIES_TOL).unwrap()) / (2.0 * h);
            prop_assert!((fd - grad[j]).norm() < 1e-6 * scale, "component {j}: {fd} vs {}", grad[j]);
        }
    }

    #[test]
    fn tighter_tolerance_changes_little(tau in (1usize..=3).prop_flat_map(tau_strategy), ch in (0u32..8, 0u32..8)) {
        let g = tau.genus();
        let ch = Characteristic::from_bits(g, ch.0 % (1 << g), ch.1 % (1 << g));
        let a = theta_constant(&ch, &tau, 1e-10).unwrap();
        let b = theta_constant(&ch, &tau, 1e-14).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
    }
}

/// Direct double sum over the box `|n_i| ≤ 12`.
fn explicit_genus2(tau: &SiegelMatrix, ch: &Characteristic) -> (Complex64, [Complex64; 2]) {
    let t = tau.tau();
    let (top, bottom) = (ch.top(), ch.bottom());
    let mut value = c(0.0, 0.0);
    let mut grad = [c(0.0, 0.0); 2];
    for n1 in -12..=12 {
        for n2 in -12..=12 {
            let a = f64::from(n1) + f64::from(top[0]) / 2.0;
            let b = f64::from(n2) + f64::from(top[1]) / 2.0;
            let q = t[(0, 0)] * (a * a) + t[(0, 1)] * (2.0 * a * b) + t[(1, 1)] * (b * b)
                + f64::from(bottom[0]) * a
                + f64::from(bottom[1]) * b;
            let term = (q * c(0.0, PI)).exp();
            value += term;
            grad[0] += term * c(0.0, 2.0 * PI * a);
            grad[1] += term * c(0.0, 2.0 * PI * b);
        }
    }
    (value, grad)
}

#[test]
fn genus_two_explicit_expansion() {
    let tau = siegel(2, &[0.3, -0.2, 0.0, 0.1], &[0.5, 0.1, -0.2, 0.3]);
    let table = ThetaTable::new(&tau, SERIES_TOL).unwrap();
    for ch in Characteristic::all(2) {
        let (v, g) = explicit_genus2(&tau, &ch);
        assert!((table.constant(&ch).unwrap() - v).norm() < 1e-12, "{ch}");
        if ch.is_odd() {
            assert!(v.norm() < 1e-12);
            let grad = table.gradient(&ch).unwrap();
            for k in 0..2 {
                assert!((grad[k] - g[k]).norm() < 1e-11, "{ch} component {k}");
            }
        } else {
            assert!(v.norm() > 1e-3, "{ch} vanishes");
        }
    }
}

#[test]
fn lifted_characteristics_pick_up_signs() {
    let tau = siegel(2, &[0.1, 0.2, 0.0, -0.3], &[0.4, 0.0, 0.1, 0.3]);
    let table = ThetaTable::new(&tau, SERIES_TOL).unwrap();
    let lifted = rosenhain::IntCharacteristic {
        top: vec![1, 3],
        bottom: vec![3, 1],
    };
    // exponent 1·⌊3/2⌋ + 3·⌊1/2⌋ = 1
    let base = table.constant(&Characteristic::new(&[1, 1], &[1, 1]).unwrap()).unwrap();
    let got = table.lifted_constant(&lifted).unwrap();
    assert!(base.norm() > 1e-3);
    assert!((got + base).norm() < 1e-13);
    let t = tau.tau();
    let mut direct = c(0.0, 0.0);
    for n1 in -14..=14 {
        for n2 in -14..=14 {
            let a = f64::from(n1) + 0.5;
            let b = f64::from(n2) + 1.5;
            let q = t[(0, 0)] * (a * a) + t[(0, 1)] * (2.0 * a * b) + t[(1, 1)] * (b * b) + 3.0 * a + b;
            direct += (q * c(0.0, PI)).exp();
        }
    }
    assert!((got - direct).norm() < 1e-12);
}
