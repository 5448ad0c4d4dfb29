//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use giftex::behavior::{Feature, FeatureSet};
use giftex::beliefs::{certainty_equivalent, posterior, Prior};
use giftex::counting::{brute_force_count, count_trajectories, round_action_count, trajectory_count};
use giftex::engine::StealLimits;
use giftex::harness::{
    enumerate_conditions, interaction, main_effect, run_condition, run_experiment, write_csv, ConditionSummary,
    ExperimentConfig, Metric, ModelKind,
};
use giftex::strategies::StrategyKind;

// Tolerances and budgets.
const BELIEF_TOL: f64 = 1e-9;
const MAGNITUDE_TOL: f64 = 0.15;
const SC_MIN_DROP: f64 = 0.15;
const CORRELATED_MIN_LIFT: f64 = 0.25;
const PROPERTY_GAMES_PER_CONDITION: u64 = 2_100;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, what: &str, detail: String) {
        println!("[{}] {id}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// First three significant figures of `x` as an integer, e.g. 3.344e13 -> 334.
fn three_sig(x: &BigUint) -> (u64, usize) {
    let digits = x.to_string();
    let lead: u64 = digits[..3].parse().unwrap();
    let rest: u64 = digits[3..4].parse().unwrap();
    (lead + u64::from(rest >= 5), digits.len() - 1)
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let expected_a = [1u64, 2, 5, 16, 65, 326, 1957, 13700];
    let a: Vec<BigUint> = (1..=8).map(|k| round_action_count(k).unwrap()).collect();
    let a_ok = a.iter().zip(expected_a).all(|(x, e)| *x == big(e));

    let published_t = [4u64, 60, 3840, 1_248_000, 2_440_488_000];
    let mut mismatches = Vec::new();
    for (n, &e) in (2..=6).zip(&published_t) {
        let t = trajectory_count(n).unwrap();
        if t != big(e) {
            mismatches.push(format!("T({n}) = {t}, table prints {e}"));
        }
    }
    for (n, lead, exp) in [(7, 331u64, 13usize), (8, 367, 18)] {
        let t = trajectory_count(n).unwrap();
        let (got, got_exp) = three_sig(&t);
        if (got, got_exp) != (lead, exp) {
            mismatches.push(format!("T({n}) = {t} ~ {}.{:02}e{got_exp}, table prints {}.{:02}e{exp}", got / 100, got % 100, lead / 100, lead % 100));
        }
    }
    let elapsed = start.elapsed();
    // Independent witness for n = 6: exhaustive enumeration through the engine.
    let witness = brute_force_count(6, StealLimits::standard()).unwrap();
    r.line(
        "criterion 1",
        a_ok && mismatches.is_empty() && elapsed < Duration::from_secs(1),
        "A(1..8) and T(2..8) equal the published values",
        format!(
            "A ok: {a_ok}; mismatches: [{}]; engine enumeration of n=6 gives {witness}; {:.0?}",
            mismatches.join("; "),
            elapsed
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=5 {
        if brute_force_count(n, StealLimits::new(1, 0)).unwrap() != trajectory_count(n).unwrap() {
            bad.push(format!("brute({n},(1,0))"));
        }
    }
    for n in 1..=8 {
        if count_trajectories(n, 0).unwrap() != trajectory_count(n).unwrap() {
            bad.push(format!("dp({n},unlimited)"));
        }
    }
    for n in 1..=4 {
        for l in 1..=3 {
            if count_trajectories(n, l).unwrap() != brute_force_count(n, StealLimits::new(1, l)).unwrap() {
                bad.push(format!("dp({n},{l})"));
            }
        }
    }
    let elapsed = start.elapsed();
    r.line(
        "criterion 2",
        bad.is_empty() && elapsed < Duration::from_secs(60),
        "brute force, closed form and lifetime DP agree",
        format!("mismatches: {bad:?}; {elapsed:.0?}"),
    );
}

fn criterion_3(r: &mut Report) {
    let mut bad = Vec::new();
    for n in 1..=5 {
        let counts: Vec<BigUint> =
            (0..=2).map(|per_round| brute_force_count(n, StealLimits::new(per_round, 0)).unwrap()).collect();
        if counts.windows(2).any(|w| w[0] != w[1]) {
            bad.push(format!("per-round variance at n={n}"));
        }
        // L = 0 is unlimited and sits at the top of the order.
        let by_limit: Vec<BigUint> = [1, 2, 3, 4, 0].iter().map(|&l| count_trajectories(n, l).unwrap()).collect();
        if by_limit.windows(2).any(|w| w[0] > w[1]) {
            bad.push(format!("lifetime order broken at n={n}"));
        }
    }
    r.line(
        "criterion 3",
        bad.is_empty(),
        "per-round-limit invariance and lifetime monotonicity of counts",
        format!("violations: {bad:?}"),
    );
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    let shapes: [(usize, StealLimits); 8] = [
        (29, StealLimits::new(1, 0)),
        (29, StealLimits::new(1, 3)),
        (29, StealLimits::new(0, 0)),
        (29, StealLimits::new(2, 2)),
        (12, StealLimits::new(1, 1)),
        (7, StealLimits::new(0, 2)),
        (3, StealLimits::new(1, 0)),
        (2, StealLimits::new(0, 0)),
    ];
    let conditions = enumerate_conditions();
    let jobs: Vec<(usize, u64)> = (0..conditions.len())
        .flat_map(|c| (0..PROPERTY_GAMES_PER_CONDITION).map(move |g| (c, g)))
        .collect();
    let violations: Vec<String> = jobs
        .par_iter()
        .flat_map_iter(|&(c, g)| {
            let condition = conditions[c];
            let (n, limits) = shapes[g as usize % shapes.len()];
            let config = ExperimentConfig { n_players: n, steal_limits: limits, base_seed: 4, ..Default::default() };
            giftex::audit::audited_game(&config, condition.model, condition.features, g)
                .expect("game runs")
                .into_iter()
                .map(move |v| format!("{} game {g}: {v}", condition.id()))
        })
        .collect();
    let elapsed = start.elapsed();
    r.line(
        "criterion 4",
        violations.is_empty() && elapsed < Duration::from_secs(120),
        "engine invariants over randomized games in all 48 conditions",
        format!(
            "{} games, {} violations{}; {elapsed:.1?}",
            jobs.len(),
            violations.len(),
            violations.first().map(|v| format!(", first: {v}")).unwrap_or_default()
        ),
    );
}

fn criterion_5(r: &mut Report) {
    let post = posterior(Prior::new(0.5, 0.25).unwrap(), 0.8, 0.3).unwrap();
    let mean = 0.5 + (0.25 / 0.34) * 0.3;
    let var = 0.25 * 0.09 / 0.34;
    let ce = certainty_equivalent(post.mean, post.variance, 0.5);
    let mut ok = (post.mean - mean).abs() < BELIEF_TOL
        && (post.variance - var).abs() < BELIEF_TOL
        && (ce - (mean - 0.25 * var)).abs() < BELIEF_TOL
        && (ce - 0.704044).abs() < 1e-6;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100_000 {
        let var0 = rng.random_range(1e-3..4.0);
        let sd = rng.random_range(1e-2..3.0);
        let risk = rng.random_range(0.0..5.0);
        let p = posterior(Prior::new(rng.random(), var0).unwrap(), rng.random(), sd).unwrap();
        ok &= p.variance < var0.min(sd * sd);
        ok &= certainty_equivalent(p.mean, p.variance, risk) <= p.mean;
    }
    r.line(
        "criterion 5",
        ok,
        "posterior and certainty-equivalent examples, variance shrinkage, CE <= mean",
        format!("mean {:.9}, var {:.9}, CE {:.9}", post.mean, post.variance, ce),
    );
}

fn desk_config() -> ExperimentConfig {
    ExperimentConfig { n_players: 29, games_per_condition: 1000, base_seed: 42, ..Default::default() }
}

fn desk_run() -> &'static (Vec<ConditionSummary>, Duration) {
    static RUN: OnceLock<(Vec<ConditionSummary>, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let summaries = run_experiment(&desk_config(), None).expect("experiment runs");
        (summaries, start.elapsed())
    })
}

fn find(s: &[ConditionSummary], model: ModelKind, features: FeatureSet) -> &ConditionSummary {
    s.iter().find(|c| c.model == model && c.features == features).unwrap()
}

fn criterion_6(r: &mut Report) {
    let (s, elapsed) = desk_run();
    let base = |m| find(s, m, FeatureSet::EMPTY).steals_per_game;
    let effect = |f, m| main_effect(s, f, m, Metric::StealsPerGame).unwrap();
    let models = ModelKind::ALL;

    let sc: Vec<f64> = models.iter().map(|&m| effect(Feature::SocialCosts, m) / base(m)).collect();
    r.line(
        "criterion 6a",
        sc.iter().all(|&x| x < -SC_MIN_DROP),
        "SC main effect on steals below -15% of BASE in every model",
        format!("relative effects ind/cor/neg {:+.3} {:+.3} {:+.3}", sc[0], sc[1], sc[2]),
    );

    let ad: Vec<f64> = models.iter().map(|&m| effect(Feature::AdaptiveDynamics, m) / base(m)).collect();
    r.line(
        "criterion 6b",
        ad.iter().all(|&x| x < 0.0),
        "AD main effect on steals negative in every model",
        format!("relative effects ind/cor/neg {:+.3} {:+.3} {:+.3}", ad[0], ad[1], ad[2]),
    );

    let bs_cor = effect(Feature::BiasedSelection, ModelKind::Correlated);
    let bs_ind = effect(Feature::BiasedSelection, ModelKind::Independent);
    r.line(
        "criterion 6c",
        bs_cor > 0.0 && bs_cor > bs_ind,
        "BS main effect positive under correlated and larger than under independent",
        format!("correlated {bs_cor:+.3}, independent {bs_ind:+.3}"),
    );

    let lift = base(ModelKind::Correlated) / base(ModelKind::Independent) - 1.0;
    r.line(
        "criterion 6d",
        lift > CORRELATED_MIN_LIFT,
        "BASE steals under correlated exceed independent by more than 25%",
        format!("{:.3} vs {:.3}, lift {lift:+.3}", base(ModelKind::Correlated), base(ModelKind::Independent)),
    );

    let seat1_worst = s
        .iter()
        .map(|c| (c.seat_means[0] - c.seat_means[1..].iter().copied().fold(f64::MIN, f64::max), c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap();
    let cor_base = find(s, ModelKind::Correlated, FeatureSet::EMPTY);
    let (seat2, seat29) = (cor_base.seat_means[1], cor_base.seat_means[28]);
    r.line(
        "criterion 6e",
        seat1_worst.0 >= 0.0 && seat2 < seat29,
        "seat 1 best in every condition; seat 2 below seat 29 in correlated BASE",
        format!(
            "smallest seat-1 margin {:.4} ({}); correlated BASE seats 1/2/29 {:.3}/{seat2:.3}/{seat29:.3}",
            seat1_worst.0,
            seat1_worst.1.condition_id,
            cor_base.seat_means[0]
        ),
    );

    let m = |k| cor_base.strategy_mean(k).unwrap();
    let coin = m(StrategyKind::CoinFlip);
    let open = m(StrategyKind::AlwaysOpen);
    let strong = [StrategyKind::AlwaysSteal, StrategyKind::MeanBased, StrategyKind::Threshold, StrategyKind::ExpectedValue];
    r.line(
        "criterion 6f",
        strong.iter().all(|&k| m(k) > coin) && coin > open,
        "correlated BASE strategy order: selective and always_steal > coin_flip > always_open",
        strong
            .iter()
            .chain(&[StrategyKind::CoinFlip, StrategyKind::AlwaysOpen])
            .map(|&k| format!("{k} {:.3}", m(k)))
            .collect::<Vec<_>>()
            .join(", "),
    );

    let scad = interaction(s, Feature::SocialCosts, Feature::AdaptiveDynamics, ModelKind::Correlated, Metric::StealsPerGame)
        .unwrap();
    r.line(
        "criterion 6g",
        scad > 0.0,
        "SC x AD interaction on steals positive under correlated",
        format!("{scad:+.3}"),
    );

    // Reference BASE rows (steals per game).
    let reference = [(ModelKind::Independent, 57.017), (ModelKind::Correlated, 87.572), (ModelKind::Negative, 61.371)];
    let rel: Vec<(ModelKind, f64)> = reference.iter().map(|&(m, y)| (m, base(m) / y - 1.0)).collect();
    r.line(
        "criterion 6 magnitudes",
        rel.iter().all(|(_, d)| d.abs() <= MAGNITUDE_TOL),
        "BASE steals within 15% of the reference rows",
        rel.iter()
            .zip(&reference)
            .map(|((m, d), (_, y))| format!("{m} {:.3} vs {y} ({d:+.3})", base(*m)))
            .collect::<Vec<_>>()
            .join(", "),
    );

    r.line(
        "criterion 6 runtime",
        *elapsed < Duration::from_secs(600),
        "48 conditions x 1000 games within 10 minutes",
        format!("{elapsed:.1?}"),
    );
}

fn criterion_7(r: &mut Report) {
    let base = enumerate_conditions()[0];
    let steals: Vec<f64> = [1, 3, 0]
        .iter()
        .map(|&l| {
            let config = ExperimentConfig { steal_limits: StealLimits::new(1, l), ..desk_config() };
            run_condition(&base, &config).unwrap().steals_per_game
        })
        .collect();
    r.line(
        "criterion 7",
        steals[0] <= steals[1] && steals[1] <= steals[2],
        "BASE/independent steals weakly increase with the lifetime limit",
        format!("lifetime 1: {:.3}, 3: {:.3}, unlimited: {:.3}", steals[0], steals[1], steals[2]),
    );
}

fn csv_bytes(s: &[ConditionSummary]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(s, &mut out).unwrap();
    out
}

fn criterion_8(r: &mut Report) {
    let reference = csv_bytes(&desk_run().0);
    let single = csv_bytes(&run_experiment(&desk_config(), Some(1)).unwrap());
    let three = csv_bytes(&run_experiment(&desk_config(), Some(3)).unwrap());
    r.line(
        "criterion 8",
        reference == single && reference == three,
        "identical CSV across repeated runs and thread counts",
        format!("{} bytes; 1 thread equal: {}; 3 threads equal: {}", reference.len(), reference == single, reference == three),
    );
}

fn main() {
    let mut report = Report { failures: Vec::new() };
    criterion_1(&mut report);
    criterion_2(&mut report);
    criterion_3(&mut report);
    criterion_4(&mut report);
    criterion_5(&mut report);
    criterion_6(&mut report);
    criterion_7(&mut report);
    criterion_8(&mut report);
    if report.failures.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: {} failing: {}", report.failures.len(), report.failures.join(", "));
        std::process::exit(1);
    }
}
