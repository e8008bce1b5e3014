use edgecoh::models::ChainModel;
use edgecoh::szm::{
    detect_poles, expand_szm, expand_szm_exact, plateau_overlap, predict_resonance, resonance_order_oracle,
    residual_exponent, Ratio, Seed,
};
mod common;

use common::first_order;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn first_order_matches_hand_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 20 {
        let l1: f64 = rng.random_range(0.2..2.0);
        let l2: f64 = rng.random_range(0.2..2.0);
        let r = l1 / l2;
        if [1.0, 0.5].iter().any(|p| (r - p).abs() < 0.05) {
            continue;
        }
        let (g, g2) = (rng.random_range(0.01..0.3), rng.random_range(0.01..0.3));
        let m = ChainModel::zxz(12, l1, l2, g, g2);
        let (pz, px) = first_order(12, l1, l2, g, g2);
        // global sign +1 for both seeds
        assert_eq!(expand_szm_exact(&m, Seed::SigmaZ, 1).unwrap().orders[1], pz);
        assert_eq!(expand_szm_exact(&m, Seed::SigmaX, 1).unwrap().orders[1], px);
        checked += 1;
    }
}

#[test]
fn residual_cancels_order_by_order() {
    let m = ChainModel::zxz(12, 1.0, 0.6, 0.05, 0.05);
    for seed in [Seed::SigmaZ, Seed::SigmaX] {
        for n in 0..=2 {
            let k = residual_exponent(&m, seed, n, &[1.0, 0.5, 0.25, 0.125]).unwrap();
            assert!(k >= 2.0 * (n as f64 + 1.0) - 0.2, "{seed} n={n}: {k}");
        }
    }
}

fn ratios(poles: &[edgecoh::szm::PoleRecord], order: usize) -> Vec<Ratio> {
    let mut r: Vec<Ratio> = poles.iter().filter(|p| p.order == order).map(|p| p.ratio).collect();
    r.sort_by(|a, b| a.value().partial_cmp(&b.value()).unwrap());
    r
}

#[test]
fn pole_table() {
    let z = detect_poles(Seed::SigmaZ, 2, 4).unwrap();
    let x = detect_poles(Seed::SigmaX, 2, 4).unwrap();
    assert_eq!(ratios(&z, 1), vec![Ratio::new(1, 1)]);
    assert_eq!(ratios(&x, 1), vec![Ratio::new(1, 2), Ratio::new(1, 1)]);
    assert_eq!(ratios(&z, 2), vec![Ratio::new(1, 3), Ratio::new(2, 1)]);
    assert_eq!(ratios(&x, 2), vec![Ratio::new(1, 3), Ratio::new(3, 2)]);
}

#[test]
fn parity_rule_matches_oracle() {
    for p in 1..=7u64 {
        for qq in 1..=7u64 {
            if num_integer::gcd(p, qq) != 1 {
                continue;
            }
            let r = predict_resonance(p, qq).unwrap();
            let o = resonance_order_oracle(p, qq, 12).unwrap();
            assert_eq!(r.sigma_z_resonant, o.sigma_z.is_some(), "{p}/{qq}");
            assert_eq!(r.sigma_x_resonant, o.sigma_x.is_some(), "{p}/{qq}");
        }
    }
}

#[test]
fn overlap_through_second_order() {
    let m = ChainModel::zxz(10, 1.0, 0.6, 0.05, 0.05);
    let e = expand_szm(&m, Seed::SigmaZ, 2).unwrap();
    let psi = e.normalized(2).unwrap();
    let norm: f64 = (0..=2).map(|n| e.orders[n].norm_sqr()).sum();
    let o = plateau_overlap(&e.orders[0], &psi).unwrap();
    assert!((o - 1.0 / norm).abs() < 1e-12);
    assert!(o > 0.95 && o < 1.0);
}

#[test]
fn exact_orders_are_hermitian_and_local() {
    let m = ChainModel::zxz(16, 1.0, 0.625, 0.25, 0.125);
    for seed in [Seed::SigmaZ, Seed::SigmaX] {
        let e = expand_szm_exact(&m, seed, 3).unwrap();
        for (n, o) in e.orders.iter().enumerate() {
            assert!(o.is_hermitian());
            if seed == Seed::SigmaZ {
                let far = o.support().into_iter().max().unwrap_or(0);
                assert!(far <= 3 * n + 1, "order {n}: site {far}");
            }
        }
    }
}
