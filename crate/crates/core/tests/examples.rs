//! Worked examples per module, checked against closed forms or independent
//! brute-force evaluations written here.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use charmoments::calibration::Calibration;
use charmoments::charsum::{all_char_sums_fft, all_char_sums_naive, weighted_char_sums, WeightedIndicator};
use charmoments::euler::{
    cosine_sum, euler_expectation_main_term, mertens_product, prime_sum_exponent, single_prime_expectation_oracle,
    CosineBranch, EulerFactor, EulerProductSpec,
};
use charmoments::modarith::{parity, CharacterIndex, Parity, PrimeModulus};
use charmoments::moments::{char_moment, cross_moment, proxy_power_moment, rmf_moment_mc, shape_fit, Divisor};
use charmoments::proxy::{
    build_params, class_of, r_trunc_from_re, DeskProfile, LevelClass, ProfileSpec, ProxyEvaluator, ProxyParams,
};
use charmoments::rmf::{exact_moment_2k, smooth_rough_decompose, PrimeFilter, RmfSample};
use charmoments::source::ConstantSource;
use charmoments::theta::{even_orthogonality_check, g_lipschitz_probe, mellin_factor_check, theta_all, theta_moment};
use charmoments::verify::{
    check_bernoulli, check_lemma_evenmoment, check_orthogonality_correspondence, check_parseval, check_reflection,
    rough_count, EvenMomentInstance, PrimeCoefficient,
};
use charmoments::Error;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn trial_primes(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

fn desk(log_y: f64, js: Vec<u32>, k: f64) -> ProxyParams {
    build_params(log_y, k, 1.0, &ProfileSpec::Desk(DeskProfile::new(js))).unwrap()
}

// modarith

#[test]
fn discrete_log_mod_5_and_7() {
    let m = PrimeModulus::new(5).unwrap();
    assert_eq!(m.generator(), 2);
    let logs: Vec<u64> = (1..5).map(|n| m.dlog(n).unwrap()).collect();
    assert_eq!(logs, vec![0, 1, 3, 2]);
    let m7 = PrimeModulus::new(7).unwrap();
    assert_eq!(m7.generator(), 3);
    assert_eq!(m7.dlog(6), Some(3));
    assert_eq!(m7.dlog(1), Some(0));
    assert_eq!(m7.dlog(3), Some(1));
}

#[test]
fn composite_modulus_rejected() {
    assert!(matches!(PrimeModulus::new(9), Err(Error::NotPrime(9))));
}

#[test]
fn character_value_examples() {
    let m7 = PrimeModulus::new(7).unwrap();
    for a in 0..6 {
        assert_relative_eq!(m7.char_value(CharacterIndex(a), 1).re, 1.0, epsilon = 1e-15);
    }
    // residues mod 7 are {1, 2, 4}
    let legendre = CharacterIndex(3);
    for n in 1..7u64 {
        let want = if [1, 2, 4].contains(&n) { 1.0 } else { -1.0 };
        assert!((m7.char_value(legendre, n) - c(want)).norm() < 1e-12);
    }
    let m5 = PrimeModulus::new(5).unwrap();
    assert_eq!(m5.char_value(CharacterIndex(2), 10), c(0.0));
}

#[test]
fn parity_examples() {
    assert_eq!(parity(CharacterIndex(0)), Parity::Even);
    assert_eq!(parity(CharacterIndex(3)), Parity::Odd);
    assert_eq!(parity(CharacterIndex(2)), Parity::Even);
    let m7 = PrimeModulus::new(7).unwrap();
    for a in 0..6 {
        let at_minus_one = m7.char_value(CharacterIndex(a), 6).re;
        let want = if a % 2 == 0 { 1.0 } else { -1.0 };
        assert_relative_eq!(at_minus_one, want, epsilon = 1e-12);
        assert_eq!(m7.character(CharacterIndex(a)).parity(), parity(CharacterIndex(a)));
    }
}

// charsum

#[test]
fn prefix_sum_examples_both_methods() {
    let m5 = PrimeModulus::new(5).unwrap();
    let m7 = PrimeModulus::new(7).unwrap();
    for table in [
        all_char_sums_fft(&m5, 4.0).unwrap(),
        all_char_sums_naive(&m5, 4.0).unwrap(),
    ] {
        assert!((table.values[0] - c(4.0)).norm() < 1e-12);
        assert!(table.values[1..].iter().all(|v| v.norm() < 1e-12));
    }
    for table in [
        all_char_sums_fft(&m7, 1.0).unwrap(),
        all_char_sums_naive(&m7, 1.0).unwrap(),
    ] {
        assert!(table.values.iter().all(|v| (v - c(1.0)).norm() < 1e-12));
    }
    for table in [
        all_char_sums_fft(&m7, 3.0).unwrap(),
        all_char_sums_naive(&m7, 3.0).unwrap(),
    ] {
        assert!((table.values[3] - c(1.0)).norm() < 1e-12);
    }
}

#[test]
fn weighted_sum_examples() {
    let m = PrimeModulus::new(11).unwrap();
    let ones = weighted_char_sums(&m, &WeightedIndicator::new(vec![c(1.0); 10])).unwrap();
    assert!((ones[0] - c(10.0)).norm() < 1e-12);
    assert!(ones[1..].iter().all(|v| v.norm() < 1e-12));
    let mut delta = vec![c(0.0); 10];
    delta[0] = c(1.0);
    let d = weighted_char_sums(&m, &WeightedIndicator::new(delta)).unwrap();
    assert!(d.iter().all(|v| (v - c(1.0)).norm() < 1e-12));
    let pre = weighted_char_sums(&m, &WeightedIndicator::prefix(&m, 6.0)).unwrap();
    let fft = all_char_sums_fft(&m, 6.0).unwrap();
    assert!(pre.iter().zip(&fft.values).all(|(a, b)| (a - b).norm() < 1e-12));
}

// rmf

#[test]
fn sample_support_and_determinism() {
    let a = RmfSample::new(42, 10).unwrap();
    let b = RmfSample::new(42, 10).unwrap();
    assert_eq!(a.primes(), &[2, 3, 5, 7]);
    for p in [2, 3, 5, 7] {
        assert_eq!(a.at_prime(p), b.at_prime(p));
        assert!((a.at_prime(p).unwrap().norm() - 1.0).abs() < 1e-12);
    }
    assert!(a.at_prime(4).is_none());
    assert_ne!(a.at_prime(2), a.at_prime(3));
}

#[test]
fn f_at_and_partial_sums() {
    let s = RmfSample::new(3, 50).unwrap();
    let f = |n| s.f_at(n).unwrap();
    assert_eq!(f(1), c(1.0));
    assert!((f(12) - f(2) * f(2) * f(3)).norm() < 1e-12);
    assert!((1..=50).all(|n| (f(n).norm() - 1.0).abs() < 1e-10));
    assert!(matches!(s.f_at(51), Err(Error::OutOfRange { .. })));
    assert!((s.partial_sum(1.0).unwrap() - c(1.0)).norm() < 1e-15);
    assert!((s.partial_sum(2.0).unwrap() - (c(1.0) + f(2))).norm() < 1e-15);
}

#[test]
fn restricted_sums_by_hand() {
    let s = RmfSample::new(9, 20).unwrap();
    let f = |n| s.f_at(n).unwrap();
    let rough = s.restricted_sum(10.0, PrimeFilter::Rough(3)).unwrap();
    assert!((rough - (c(1.0) + f(5) + f(7))).norm() < 1e-12);
    let smooth = s.restricted_sum(10.0, PrimeFilter::Smooth(3)).unwrap();
    let want: Complex64 = [1, 2, 3, 4, 6, 8, 9].iter().map(|&n| f(n)).sum();
    assert!((smooth - want).norm() < 1e-12);
    let vacuous = s.restricted_sum(10.0, PrimeFilter::Smooth(10)).unwrap();
    assert!((vacuous - s.partial_sum(10.0).unwrap()).norm() < 1e-12);
}

#[test]
fn smooth_rough_split_examples() {
    let cases = [(12, 2, 4, 3), (1, 10, 1, 1), (30, 3, 6, 5)];
    for (n, y, a, b) in cases {
        let sp = smooth_rough_decompose(n, y).unwrap();
        assert_eq!((sp.smooth, sp.rough), (a, b), "n={n}, y={y}");
    }
}

#[test]
fn multiplicative_split_of_partial_sum() {
    let s = RmfSample::new(11, 400).unwrap();
    let (x, y) = (400.0, 5u64);
    let mut total = c(0.0);
    for b in 1..=400u64 {
        let sp = smooth_rough_decompose(b, y).unwrap();
        if sp.smooth == 1 {
            total += s.f_at(b).unwrap()
                * s.restricted_sum((x / b as f64).floor(), PrimeFilter::Smooth(y))
                    .unwrap();
        }
    }
    assert!((total - s.partial_sum(x).unwrap()).norm() <= 1e-9 * x);
}

#[test]
fn exact_moment_examples() {
    // brute-force quadruple enumeration
    let brute = |x: u64| {
        let mut n = 0u128;
        for a in 1..=x {
            for b in 1..=x {
                for cc in 1..=x {
                    for d in 1..=x {
                        n += (a * b == cc * d) as u128;
                    }
                }
            }
        }
        n
    };
    assert_eq!(exact_moment_2k(2.0, 2).unwrap(), 6);
    assert_eq!(exact_moment_2k(3.0, 2).unwrap(), 15);
    for x in [2u64, 3, 7, 12] {
        assert_eq!(exact_moment_2k(x as f64, 2).unwrap(), brute(x));
    }
    for x in [1.0, 7.5, 40.0] {
        assert_eq!(exact_moment_2k(x, 1).unwrap(), x.floor() as u128);
    }
    assert!(matches!(exact_moment_2k(1e5, 2), Err(Error::TooLarge(_))));
}

// euler

#[test]
fn main_term_collapses() {
    let base = EulerProductSpec {
        alpha: 0.7,
        beta: 0.7,
        sigma1: 0.1,
        sigma2: 0.1,
        t1: 2.0,
        t2: 2.0,
        z: 300.0,
        y: 3000.0,
    };
    let primes: Vec<u64> = trial_primes(3000).into_iter().filter(|&p| p >= 300).collect();
    let e = euler_expectation_main_term(&base).unwrap().exponent;
    let single: f64 = primes.iter().map(|&p| (1.4f64).powi(2) * (p as f64).powf(-1.2)).sum();
    assert_relative_eq!(e, single, max_relative = 1e-12);

    let beta0 = EulerProductSpec {
        alpha: 1.0,
        beta: 0.0,
        ..base
    };
    let e0 = euler_expectation_main_term(&beta0).unwrap().exponent;
    let want: f64 = primes.iter().map(|&p| (p as f64).powf(-1.2)).sum();
    assert_relative_eq!(e0, want, max_relative = 1e-12);
}

#[test]
fn main_term_up_to_100() {
    // y = 100 is below the hypothesis floor for alpha = beta = 1, so sum directly
    let spec = EulerProductSpec {
        alpha: 1.0,
        beta: 1.0,
        sigma1: 0.0,
        sigma2: 0.0,
        t1: 0.0,
        t2: 0.0,
        z: 2.0,
        y: 100.0,
    };
    let primes = trial_primes(100);
    assert_eq!(primes.len(), 25);
    let want: f64 = 4.0 * primes.iter().map(|&p| 1.0 / p as f64).sum::<f64>();
    assert_relative_eq!(prime_sum_exponent(&primes, &spec), want, max_relative = 1e-14);
    assert!(matches!(
        euler_expectation_main_term(&spec),
        Err(Error::HypothesisViolated(_))
    ));
}

#[test]
fn single_prime_oracle_examples() {
    let f = |alpha, sigma| EulerFactor { alpha, sigma, t: 0.0 };
    assert_relative_eq!(
        single_prime_expectation_oracle(2, &[f(1.0, 0.0)]).unwrap(),
        2.0,
        max_relative = 1e-10
    );
    assert_eq!(single_prime_expectation_oracle(7, &[f(0.0, 0.3)]).unwrap(), 1.0);
    for p in [2u64, 3, 5, 101] {
        for sigma in [0.0, 0.25, 1.0] {
            let want = 1.0 / (1.0 - (p as f64).powf(-1.0 - 2.0 * sigma));
            let got = single_prime_expectation_oracle(p, &[f(1.0, sigma)]).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-8);
        }
    }
}

#[test]
fn cosine_sum_examples() {
    let r = cosine_sum(0.0, 100.0).unwrap();
    let want: f64 = trial_primes(100).iter().map(|&p| 1.0 / p as f64).sum();
    assert_relative_eq!(r.value, want, max_relative = 1e-14);
    assert_eq!(r.branch, CosineBranch::Small);
    let mut prev = f64::NEG_INFINITY;
    for y in [10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
        let v = cosine_sum(0.0, y).unwrap();
        assert!(v.value >= prev);
        // Mertens: the gap to log log y stays bounded (it tends to 0.2615)
        assert!((v.value - y.ln().ln()).abs() < 1.0);
        prev = v.value;
    }
    assert!(cosine_sum(5.0, 1e6).unwrap().within_bound());
}

#[test]
fn mertens_product_examples() {
    assert_relative_eq!(mertens_product(2.0).unwrap(), 0.5, max_relative = 1e-15);
    assert_relative_eq!(mertens_product(10.0).unwrap(), 8.0 / 35.0, max_relative = 1e-14);
    let euler_gamma = 0.577_215_664_901_532_9_f64;
    let limit = (-euler_gamma).exp();
    let y = 1e6f64;
    assert!((mertens_product(y).unwrap() * y.ln() / limit - 1.0).abs() < 0.02);
}

// proxy

#[test]
fn paper_chain_at_e400() {
    let p = build_params(400.0 * 2e5, 2.0, 2e5, &ProfileSpec::Paper).unwrap();
    let logs: Vec<f64> = p.levels.iter().map(|l| l.log_upper).collect();
    assert_eq!(p.num_levels(), 3);
    for (got, want) in logs.iter().zip([1.0, 20.0, 400.0]) {
        assert_relative_eq!(*got, want, max_relative = 1e-12);
    }
    let ll = 400f64.ln();
    assert!(logs[0] >= 400.0 / (20.0 * ll * ll) && logs[0] <= 400.0 / (ll * ll));
    let js: Vec<u32> = p.levels.iter().map(|l| l.j).collect();
    assert!(js[1..].windows(2).all(|w| w[0] == w[1] + 1));
}

#[test]
fn desk_length_guard() {
    let spec = ProfileSpec::Desk(DeskProfile {
        js: vec![50, 50],
        ratio: 20.0,
        modulus: Some(101),
    });
    assert!(matches!(
        build_params(6.0, 2.0, 1.0, &spec),
        Err(Error::InfeasibleParams(_))
    ));
}

#[test]
fn dirichlet_polynomial_examples() {
    let p = desk(3f64.ln(), vec![1], 2.0);
    let ev = ProxyEvaluator::new(&p).unwrap();
    let d = ev.d_eval(&ConstantSource(c(1.0)), 1, 0).unwrap().value;
    let want = 2f64.powf(-0.5) + 0.25 + 3f64.powf(-0.5) + 1.0 / 6.0;
    assert!((d - c(want)).norm() < 1e-14);

    let q = PrimeModulus::new(101).unwrap();
    let big = desk(4.0, vec![1, 1], 2.0);
    let ev = ProxyEvaluator::new(&big).unwrap();
    for lv in &big.levels {
        let d0 = ev.d_eval(&q.character(CharacterIndex(0)), lv.m, 0).unwrap().value;
        assert!(d0.im.abs() < 1e-12 && d0.re <= lv.upper());
    }

    let empty = desk(1.9f64.ln(), vec![1], 2.0);
    let ev = ProxyEvaluator::new(&empty).unwrap();
    assert_eq!(ev.d_eval(&ConstantSource(c(1.0)), 1, 0).unwrap().value, c(0.0));
}

#[test]
fn truncated_exponential_examples() {
    let p = desk(5.0, vec![3], 3.0);
    let ev = ProxyEvaluator::new(&p).unwrap();
    let zero = ConstantSource(c(0.0));
    assert_eq!(ev.r_trunc_eval(&zero, 1, 0).unwrap(), 1.0);
    assert_eq!(r_trunc_from_re(1.0, 2.0, 1), 4.0);
    // all D = 0: one per shift
    assert_relative_eq!(
        ev.r_full_eval(&zero).unwrap(),
        (2 * (5.0f64 / 2.0).floor() as usize + 1) as f64
    );
    assert_eq!(ev.err_eval(&zero, 1, 0).unwrap(), 0.0);
    let one = ConstantSource(c(1.0));
    assert!(ev.err_eval(&one, 1, 0).unwrap() >= 0.0);
    let zero_class = ev.classify_dyadic(&zero, 0).unwrap();
    assert_relative_eq!(ev.u_eval(&zero, 1, 0, &zero_class).unwrap(), 1.0);
}

#[test]
fn single_shift_full_equals_level() {
    let p = desk(1.5, vec![2], 2.0);
    assert_eq!(p.num_shifts(), 1);
    let ev = ProxyEvaluator::new(&p).unwrap();
    let s = RmfSample::new(5, 10).unwrap();
    assert_relative_eq!(
        ev.r_full_eval(&s).unwrap(),
        ev.r_trunc_eval(&s, 1, 0).unwrap(),
        max_relative = 1e-14
    );
}

#[test]
fn exponential_with_unit_source() {
    let log_y = 30f64.ln();
    let p = desk(log_y, vec![2, 1], 2.0);
    let ev = ProxyEvaluator::new(&p).unwrap();
    let want: f64 = 2.0
        * trial_primes(30)
            .iter()
            .map(|&p| (p as f64).powf(-0.5) + 0.5 / p as f64)
            .sum::<f64>();
    assert_relative_eq!(
        ev.e_exp_log(&ConstantSource(c(1.0)), 0).unwrap(),
        want,
        max_relative = 1e-12
    );
}

#[test]
fn dyadic_classification_examples() {
    let (k, j) = (2.0, 3);
    let unit = j as f64 / (100.0 * k);
    assert_eq!(
        class_of(0.0, k, j),
        LevelClass {
            n: 0,
            w: 0.0,
            a: 2 * (200.0 * k * j as f64).ceil() as u32
        }
    );
    let one = class_of(1.5 * unit, k, j);
    assert_eq!(one.n, 1);
    assert_relative_eq!(one.w, unit);
    assert_eq!(class_of(unit, k, j).n, 0);
}

// moments

#[test]
fn character_moment_examples() {
    let m11 = PrimeModulus::new(11).unwrap();
    assert_relative_eq!(
        char_moment(&m11, 5.0, 1.0, true, Divisor::Phi).unwrap().value,
        2.5,
        max_relative = 1e-12
    );
    let m5 = PrimeModulus::new(5).unwrap();
    for k in [0.5, 1.0, 2.5] {
        assert!(char_moment(&m5, 4.0, k, true, Divisor::Phi).unwrap().value < 1e-20);
        assert_relative_eq!(
            char_moment(&m11, 1.0, k, true, Divisor::NonPrincipal).unwrap().value,
            1.0,
            max_relative = 1e-12
        );
    }
}

#[test]
fn holder_display_with_q_minus_2() {
    let m = PrimeModulus::new(101).unwrap();
    for x in [3.0, 10.0, 50.0] {
        let m2 = char_moment(&m, x, 1.0, true, Divisor::NonPrincipal).unwrap().value;
        for k in [2.0, 3.0, 4.5] {
            let m2k = char_moment(&m, x, k, true, Divisor::NonPrincipal).unwrap().value;
            assert!(m2k >= m2.powf(k) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn monte_carlo_moment_examples() {
    let a = rmf_moment_mc(100.0, 1.0, 10_000, 21).unwrap();
    assert!((a.value - 100.0).abs() <= 3.0 * a.stderr);
    let b = rmf_moment_mc(50.0, 2.0, 10_000, 22).unwrap();
    let exact = exact_moment_2k(50.0, 2).unwrap() as f64;
    assert!((b.value - exact).abs() <= 3.0 * b.stderr);
    let again = rmf_moment_mc(50.0, 2.0, 10_000, 22).unwrap();
    assert_eq!(b.value.to_bits(), again.value.to_bits());
}

#[test]
fn proxy_moments_with_constant_weight() {
    let m = PrimeModulus::new(101).unwrap();
    // no primes below 1.9, so every D vanishes and R = 1
    let p = build_params(1.9f64.ln(), 3.0, 1.0, &ProfileSpec::Desk(DeskProfile::new(vec![1]))).unwrap();
    let share = 99.0 / 100.0;
    assert_relative_eq!(proxy_power_moment(&m, &p).unwrap(), share, max_relative = 1e-12);
    let second = char_moment(&m, 7.0, 1.0, true, Divisor::Phi).unwrap().value;
    assert_relative_eq!(cross_moment(&m, 7.0, &p).unwrap(), second, max_relative = 1e-12);
}

#[test]
fn shape_fit_examples() {
    let xs: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6].to_vec();
    let planted: Vec<(f64, f64)> = xs.iter().map(|&x| (x, x.ln().powi(4))).collect();
    assert!((shape_fit(&planted).unwrap().exponent - 4.0).abs() < 1e-6);
    let flat: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 3.0)).collect();
    assert!(shape_fit(&flat).unwrap().exponent.abs() < 1e-9);
    assert!(matches!(shape_fit(&[(1e3, 1.0); 4]), Err(Error::Degenerate(_))));
}

// theta

#[test]
fn theta_symmetry_and_direct_sum() {
    let m = PrimeModulus::new(13).unwrap();
    let th = theta_all(&m).unwrap();
    assert!(th[0].value.im.abs() < 1e-14 && th[0].value.re > 0.0);
    for a in 1..12usize {
        assert!((th[12 - a].value - th[a].value.conj()).norm() < 1e-10);
    }
    // the quadratic character mod 13 is even (13 = 1 mod 4)
    let squares: Vec<u64> = (1..13u64).map(|n| n * n % 13).collect();
    let direct: f64 = (1..200u64)
        .filter(|n| n % 13 != 0)
        .map(|n| {
            let chi = if squares.contains(&(n % 13)) { 1.0 } else { -1.0 };
            chi * (-PI * (n * n) as f64 / 13.0).exp()
        })
        .sum();
    assert!((th[6].value - c(direct)).norm() < 1e-10);
}

#[test]
fn theta_zeroth_moment_counts() {
    for q in [11u64, 101] {
        let m = PrimeModulus::new(q).unwrap();
        let even = theta_moment(&m, 0.0, Parity::Even).unwrap().value;
        assert_relative_eq!(even, ((q - 3) / 2) as f64 / (q - 1) as f64, max_relative = 1e-14);
    }
}

#[test]
fn even_orthogonality_examples() {
    let m = PrimeModulus::new(7).unwrap();
    assert!((even_orthogonality_check(&m, 2, 5).unwrap() - 1.0).abs() < 1e-12);
    assert!(even_orthogonality_check(&m, 2, 3).unwrap().abs() < 1e-12);
    for n in 1..7 {
        assert!((even_orthogonality_check(&m, n, n).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lipschitz_probe_examples() {
    let s = RmfSample::new(4, 500).unwrap();
    let a = g_lipschitz_probe(&s, 101, 7, 2.0, 0.1, 0).unwrap();
    let b = g_lipschitz_probe(&s, 101, 7, 4.0, 0.1, 0).unwrap();
    assert_relative_eq!(b.rhs_scale, a.rhs_scale / 4.0, max_relative = 1e-12);
    let tiny = g_lipschitz_probe(&s, 101, 7, 2.0, 1e-9, 0).unwrap();
    assert!(tiny.lhs < 1e-6);
    assert!(g_lipschitz_probe(&s, 101, 7, 1.0, 2.0, 0).is_err());
}

#[test]
fn mellin_examples() {
    let one = ConstantSource(c(1.0));
    for s in [0.5, 1.0, 2.0, 3.0] {
        let r = mellin_factor_check(1, s, &one).unwrap();
        let gamma = statrs::function::gamma::gamma(s / 2.0) / (2.0 * PI.powf(s / 2.0));
        assert_relative_eq!(r.numeric.re, gamma, max_relative = 1e-9);
        assert_relative_eq!(r.closed_form.re, gamma, max_relative = 1e-12);
    }
    let sample = RmfSample::new(17, 3).unwrap();
    let r = mellin_factor_check(3, 1.0, &sample).unwrap();
    assert!(r.relative_error() <= 1e-6);
}

// verify

#[test]
fn orthogonality_correspondence_examples() {
    let m = PrimeModulus::new(31).unwrap();
    let r = check_orthogonality_correspondence(&m, &[c(1.0); 12]).unwrap();
    assert!(r.pass);
    assert_relative_eq!(r.lhs, 12.0, max_relative = 1e-12);
    assert!(matches!(
        check_orthogonality_correspondence(&m, &vec![c(1.0); 31]),
        Err(Error::LengthViolation { .. })
    ));
}

#[test]
fn bernoulli_examples() {
    let r = check_bernoulli(&[-0.5, -0.5]).unwrap();
    assert!(r.pass && (r.lhs - 0.25).abs() < 1e-15 && r.rhs.abs() < 1e-15);
    let r = check_bernoulli(&[0.0; 5]).unwrap();
    assert!(r.pass && r.lhs == 1.0 && r.rhs == 1.0);
    assert!(matches!(check_bernoulli(&[-1.5]), Err(Error::DomainError(_))));
}

#[test]
fn rough_count_examples() {
    assert_eq!(rough_count(10, 20, 3).unwrap(), 4);
    assert_eq!(rough_count(10, 57, 1).unwrap(), 47);
    assert_eq!(rough_count(0, 10, 20).unwrap(), 1);
    assert_eq!(rough_count(1, 10, 20).unwrap(), 0);
}

#[test]
fn reflection_examples() {
    let m = PrimeModulus::new(7).unwrap();
    let r = check_reflection(&m, 5.0).unwrap();
    assert!(r.pass);
    let t = all_char_sums_fft(&m, 5.0).unwrap();
    assert!(t.values[1..].iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    assert!((t.values[0].norm() - 5.0).abs() < 1e-12);
}

#[test]
fn parseval_closed_forms() {
    for sigma in [0.3, 0.5, 1.5] {
        let r = check_parseval(&[(1, c(1.0))], sigma, 1e-10).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.lhs, 1.0 / (2.0 * sigma), max_relative = 1e-12);
        let two = check_parseval(&[(1, c(1.0)), (2, c(1.0))], sigma, 1e-10).unwrap();
        let t = 2f64.powf(-2.0 * sigma);
        let want = (1.0 - t) / (2.0 * sigma) + 4.0 * t / (2.0 * sigma);
        assert!(two.pass);
        assert_relative_eq!(two.lhs, want, max_relative = 1e-12);
    }
}

#[test]
fn even_moment_lemma_small_cases() {
    let cal = Calibration::default();
    // j = 0 with c supported away from P: the expectation is sum |c_n|^2
    let inst = EvenMomentInstance {
        c: vec![(1, c(1.0)), (5, c(0.5)), (7, Complex64::new(0.0, 2.0))],
        a: vec![PrimeCoefficient {
            p: 2,
            a_p: c(1.0),
            a_p2: c(0.5),
        }],
        j: 0,
    };
    let r = check_lemma_evenmoment(&inst, None, &cal).unwrap();
    assert!(r.pass);
    // one prime, j = 1, c = delta_1: E |a_p f(p) + a_p2 f(p)^2|^2 = |a_p|^2 + |a_p2|^2
    let one = EvenMomentInstance {
        c: vec![(1, c(1.0))],
        a: vec![PrimeCoefficient {
            p: 3,
            a_p: c(1.0),
            a_p2: c(0.5),
        }],
        j: 1,
    };
    let r = check_lemma_evenmoment(&one, None, &cal).unwrap();
    assert!(r.pass);
    let too_big = EvenMomentInstance { j: 7, ..one };
    assert!(matches!(
        check_lemma_evenmoment(&too_big, None, &cal),
        Err(Error::TooLarge(_))
    ));
}
