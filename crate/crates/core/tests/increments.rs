//! Increments against independent oracles built from the series itself.

use phivar::{phi_variation, q_variation, Base, ScaledSum, Sign, Spec};

fn tent(b: u64, sign: Sign) -> Spec {
    Spec::critical(Base::Tent, b, sign).unwrap()
}

/// `b^n · f(k b^-n)` restricted to the terms that do not cancel at level `n`.
fn scaled_tent_value(b: u64, sign: Sign, n: u32, k: u64) -> i64 {
    (0..n)
        .map(|m| {
            let q = b.pow(n - m);
            let p = k % q;
            sign.pow(m) * p.min(q - p) as i64
        })
        .sum()
}

#[test]
fn tent_increments_match_integer_oracle() {
    for b in [2u64, 3, 4, 7] {
        for sign in [Sign::Plus, Sign::Minus] {
            let spec = tent(b, sign);
            for n in 1..=6 {
                for k in 0..b.pow(n) {
                    let rec = spec.increment_exact(n, k).unwrap();
                    let oracle = scaled_tent_value(b, sign, n, k + 1) - scaled_tent_value(b, sign, n, k);
                    let Some(ScaledSum::Int(s)) = rec.s else { panic!("tent sum must be an integer") };
                    assert_eq!(sign.pow(n) * s, oracle, "b={b} {sign} n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn increments_match_differences_of_f() {
    let specs = [
        tent(2, Sign::Plus),
        tent(3, Sign::Minus),
        Spec::critical(Base::trig(1.0, 0.0), 2, Sign::Plus).unwrap(),
        Spec::critical(Base::trig(2.0, -1.0), 3, Sign::Minus).unwrap(),
        Spec::general(Base::trig(0.0, 1.0), 2, Sign::Plus, 0.8).unwrap(),
        Spec::general(Base::Tent, 5, Sign::Minus, 0.1).unwrap(),
    ];
    for spec in &specs {
        for n in 1..=6 {
            let cells = spec.cells(n).unwrap();
            let h = 1.0 / cells as f64;
            for k in 0..cells {
                let t0 = k as f64 * h;
                let t1 = if k + 1 == cells { 1.0 } else { (k + 1) as f64 * h };
                let diff = spec.eval_f(t1, 1e-14).unwrap() - spec.eval_f(t0, 1e-14).unwrap();
                let inc = spec.increment_exact(n, k).unwrap().value;
                assert!((inc - diff).abs() < 1e-9, "{spec:?} n={n} k={k}: {inc} vs {diff}");
            }
        }
    }
}

#[test]
fn even_b_tent_sums_have_the_parity_of_n() {
    for b in [2u64, 4, 6] {
        let spec = tent(b, Sign::Minus);
        for n in 1..=6 {
            for rec in spec.increment_stream(n, 0, b.pow(n)).unwrap() {
                let Some(ScaledSum::Int(s)) = rec.s else { panic!() };
                assert_eq!(s.rem_euclid(2), i64::from(n % 2));
                assert!(s.unsigned_abs() <= u64::from(n));
            }
        }
    }
}

#[test]
fn first_variation_matches_brute_force_over_digit_strings() {
    let spec = tent(2, Sign::Plus);
    let n = 12;
    let paths: Vec<phivar::Path> = (0..1u32 << n)
        .map(|bits| {
            let digits = (0..n).map(|i| (bits >> i) & 1).collect();
            phivar::Path::from_digits(&spec, 0, 0, digits).unwrap()
        })
        .collect();
    let mean_abs = paths.iter().map(|p| p.z[n as usize].abs()).sum::<f64>() / paths.len() as f64;
    let v1 = q_variation(&spec, n, 1.0, 1.0).unwrap();
    assert!((mean_abs - v1).abs() < 1e-12, "{mean_abs} vs {v1}");
}

#[test]
fn f32_and_f64_agree_at_moderate_levels() {
    let s32 = phivar::Spec32::critical(phivar::Base32::Tent, 2, Sign::Plus).unwrap();
    let s64 = tent(2, Sign::Plus);
    for n in [4, 8, 12] {
        let a = phi_variation(&s32, n, 1.0f32).unwrap();
        let b = phi_variation(&s64, n, 1.0).unwrap();
        assert!((f64::from(a) - b).abs() < 1e-5 * b, "n={n}: {a} vs {b}");
    }
}
