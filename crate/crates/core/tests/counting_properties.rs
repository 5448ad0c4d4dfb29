use num_bigint::BigUint;
use num_traits::ToPrimitive;

use giftex::counting::{
    brute_force_count, count_chains, count_trajectories, round_action_count, trajectory_count, MultisetState,
};
use giftex::engine::StealLimits;

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

#[test]
fn round_counts_satisfy_the_recurrence() {
    for k in 2..=40 {
        let expected = round_action_count(k - 1).unwrap() * (k - 1) + 1u32;
        assert_eq!(round_action_count(k).unwrap(), expected, "k={k}");
    }
}

#[test]
fn round_counts_grow_like_e_times_factorial() {
    for k in 10..=60 {
        let ratio = round_action_count(k).unwrap().to_f64().unwrap()
            / (factorial(k - 1).to_f64().unwrap() * std::f64::consts::E);
        assert!((0.99..1.01).contains(&ratio), "k={k}: {ratio}");
    }
}

#[test]
fn thirty_players_are_exact() {
    let t = trajectory_count(30).unwrap();
    let digits = t.to_string();
    assert!(digits.chars().all(|c| c.is_ascii_digit()));
    assert_eq!(count_trajectories(30, 0).unwrap(), t);
}

#[test]
fn dp_matches_closed_form_when_the_limit_never_binds() {
    for n in 1..=6 {
        for l in (n as u32).saturating_sub(1).max(1)..=6 {
            assert_eq!(count_trajectories(n, l).unwrap(), trajectory_count(n).unwrap(), "n={n} L={l}");
        }
    }
}

#[test]
fn counts_increase_with_the_lifetime_limit() {
    for n in 1..=6 {
        let counts: Vec<BigUint> = (1..=5).map(|l| count_trajectories(n, l).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "n={n}: {counts:?}");
    }
    // The cap binds from n = 3 on.
    assert!(count_trajectories(3, 1).unwrap() < trajectory_count(3).unwrap());
}

#[test]
fn small_lifetime_counts_match_enumeration() {
    for n in 1..=5 {
        for l in 1..=3 {
            assert_eq!(
                count_trajectories(n, l).unwrap(),
                brute_force_count(n, StealLimits::new(1, l)).unwrap(),
                "n={n} L={l}"
            );
        }
    }
}

#[test]
fn per_round_limit_does_not_change_counts() {
    for n in 1..=5 {
        let base = brute_force_count(n, StealLimits::new(0, 0)).unwrap();
        for r in 1..=3 {
            assert_eq!(brute_force_count(n, StealLimits::new(r, 0)).unwrap(), base);
        }
        assert_eq!(base, trajectory_count(n).unwrap());
    }
}

#[test]
fn chain_counts_sum_to_round_patterns() {
    for k in 1..=8 {
        let start = MultisetState::new(vec![0; k - 1]);
        let total: BigUint = count_chains(&start, 0).values().sum();
        assert_eq!(total + 1u32, round_action_count(k).unwrap());
    }
}
