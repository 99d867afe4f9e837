//! Acceptance suite. Each test prints one `PASS`/`FAIL` line for its
//! criterion and then asserts on it.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zic_dmt::closed_form::{
    asymmetric_top, fcsit_asymmetric_sum, fcsit_femto_sum, fcsit_symmetric_sum,
    fcsit_symmetric_top, full_dmt, nocsit_threshold_antennas, nocsit_threshold_symmetric, DmtQuery,
};
use zic_dmt::curve::{compute_curve, GainSweep, RGrid};
use zic_dmt::lp::{solve_lp, ORACLE_MAX_VARS};
use zic_dmt::model::{AntennaConfig, Csit, MultiplexingGainPair, ScalingExponents};
use zic_dmt::montecarlo::{
    lower_from_upper, mutual_info_upper, simulate_outage, sum_bound_decomposition,
    ChannelRealization, McConfig, SnrPoint, DEFAULT_MIN_HITS,
};
use zic_dmt::ptp::ptp_dmt;
use zic_dmt::validate::{
    asymmetric_cases, femto_cases, iml_cases, lp_vs_oracle, presimplified_vs_simplified,
    symmetric_cases, ClosedFormCase, Status,
};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

/// Worst |LP - closed form| over the 0.1 grid of every case.
fn lp_vs_formula(cases: &[ClosedFormCase]) -> (f64, usize, String) {
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut at = String::new();
    for case in cases {
        for r_s in case.grid(0.1) {
            let lp = solve_lp(&case.program(r_s).unwrap()).unwrap();
            assert!(lp.is_optimal(), "{} r_s={r_s} not optimal", case.label);
            let cf = (case.formula)(r_s).unwrap();
            let err = (lp.optimal_value - cf).abs();
            checked += 1;
            if err > worst {
                worst = err;
                at = format!("{} r_s={r_s}", case.label);
            }
        }
    }
    (worst, checked, at)
}

fn closed_form_criterion(
    id: u32,
    name: &str,
    cases: Vec<ClosedFormCase>,
    budget: Option<Duration>,
) {
    let start = Instant::now();
    let (worst, checked, at) = lp_vs_formula(&cases);
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed < b);
    report(
        id,
        name,
        worst <= 1e-6 && in_time,
        format!("{checked} points, max error {worst:.2e} ({at}), {elapsed:.2?}"),
    );
}

#[test]
fn criterion_01_symmetric_closed_form() {
    closed_form_criterion(
        1,
        "LP vs symmetric closed form",
        symmetric_cases(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_02_femto_closed_form() {
    closed_form_criterion(
        2,
        "LP vs femto closed form",
        femto_cases(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_03_asymmetric_closed_form() {
    closed_form_criterion(
        3,
        "LP vs asymmetric closed form",
        asymmetric_cases(),
        Some(Duration::from_secs(10)),
    );
}

#[test]
fn criterion_04_iml_closed_form() {
    closed_form_criterion(4, "IML LP vs closed forms", iml_cases(), None);
}

#[test]
fn criterion_05_presimplified_equivalence() {
    let v = presimplified_vs_simplified(200, 2024).unwrap();
    report(
        5,
        "pre-simplified vs simplified program",
        v.status == Status::Pass && v.checked == 200,
        format!("{} instances, max error {:.2e}", v.checked, v.max_error),
    );
}

#[test]
fn criterion_06_grid_oracle() {
    let small = [
        symmetric_cases(),
        femto_cases(),
        asymmetric_cases(),
        iml_cases(),
    ]
    .into_iter()
    .flatten()
    .filter(|c| c.program(0.0).unwrap().num_vars() <= ORACLE_MAX_VARS)
    .count();
    let v = lp_vs_oracle(0.05, 0.1).unwrap();
    report(
        6,
        "grid oracle within lattice bound",
        v.status == Status::Pass && v.checked > 0,
        format!(
            "{small} instances, {} points, max gap {:.2e}",
            v.checked, v.max_error
        ),
    );
}

/// Largest |d_full - d_nocsit| on the `r1 = r2` grid.
fn csit_gap(cfg: AntennaConfig, alphas: ScalingExponents) -> f64 {
    let top = (cfg.q1() as f64 * alphas.alpha11).min(cfg.q2() as f64 * alphas.alpha22);
    let grid = RGrid {
        start: 0.0,
        stop: top,
        step: 0.05,
    };
    let curve = compute_curve(cfg, alphas, GainSweep::Symmetric(grid)).unwrap();
    curve
        .rows
        .iter()
        .map(|r| (r.d_full - r.d_nocsit).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_07_thresholds() {
    const TOL: f64 = 1e-6;
    let mut ok = true;
    let mut notes = Vec::new();

    let t1 = nocsit_threshold_symmetric(1).unwrap();
    let t2 = nocsit_threshold_symmetric(2).unwrap();
    ok &= (t1 - 1.5).abs() < 1e-12 && (t2 - 1.25).abs() < 1e-12;
    notes.push(format!("symmetric thresholds {t1}, {t2}"));
    let met = nocsit_threshold_antennas(3, 4, 3).unwrap();
    let unmet = nocsit_threshold_antennas(3, 3, 3).unwrap();
    ok &= met.met && !unmet.met;
    notes.push(format!(
        "(3,4,3) threshold {} met={}, (3,3,3) threshold {} met={}",
        met.threshold, met.met, unmet.threshold, unmet.met
    ));

    let unit = ScalingExponents::unit();
    let with_cross = |a: f64| ScalingExponents::new(1.0, a, 1.0).unwrap();
    let sym = |n| AntennaConfig::symmetric(n).unwrap();
    // (channel, exponents, threshold met)
    let curves = [
        (sym(1), with_cross(2.0), true),
        (sym(1), with_cross(1.2), false),
        (sym(2), with_cross(1.5), true),
        (sym(2), with_cross(1.0), false),
        (AntennaConfig::new(3, 4, 3, 3).unwrap(), unit, true),
        (sym(3), unit, false),
    ];
    for (cfg, a, expect_equal) in curves {
        let gap = csit_gap(cfg, a);
        let equal = gap <= TOL;
        ok &= equal == expect_equal;
        notes.push(format!("{cfg} a21={} gap {gap:.3}", a.alpha21));
    }
    report(7, "threshold reproduction", ok, notes.join("; "));
}

#[test]
fn criterion_08_composed_upper_bound() {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in 1..=2usize {
        let nf = n as f64;
        let steps = (nf / 0.25).round() as usize;
        for i in 0..=steps {
            for j in 0..=steps {
                let (r1, r2) = (i as f64 * 0.25, j as f64 * 0.25);
                let q = DmtQuery {
                    cfg: AntennaConfig::symmetric(n).unwrap(),
                    alphas: ScalingExponents::unit(),
                    gains: MultiplexingGainPair::new(r1, r2).unwrap(),
                    csit: Csit::Full,
                };
                let got = full_dmt(&q).unwrap().value;
                let sum = if r1 + r2 <= nf {
                    ptp_dmt(n, 3 * n, r1 + r2).unwrap()
                } else {
                    0.0
                };
                let want = ptp_dmt(n, n, r1)
                    .unwrap()
                    .min(ptp_dmt(n, n, r2).unwrap())
                    .min(sum);
                worst = worst.max((got - want).abs());
                checked += 1;
            }
        }
    }
    report(
        8,
        "composed DMT equals the upper bound",
        worst <= 1e-6,
        format!("{checked} grid points, max error {worst:.2e}"),
    );
}

#[test]
fn criterion_09_monte_carlo_slope() {
    let mc = McConfig {
        cfg: AntennaConfig::symmetric(1).unwrap(),
        alphas: ScalingExponents::unit(),
        gains: MultiplexingGainPair::symmetric(0.25).unwrap(),
        csit: Csit::Full,
        snr_grid_db: vec![15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
        samples_per_point: 2_000_000,
        seed: 7,
        min_hits: DEFAULT_MIN_HITS,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let start = Instant::now();
    let counts = pool.install(|| simulate_outage(&mc)).unwrap();
    let elapsed = start.elapsed();
    let detail;
    let pass = match counts.estimate(mc.min_hits) {
        Ok(est) => {
            let s = est.composed;
            detail = format!(
                "slope {:.4} +/- {:.4} vs 0.75 over {} points, {elapsed:.1?}",
                s.slope, s.half_width, s.points_used
            );
            (s.slope - 0.75).abs() <= 0.15 && elapsed < Duration::from_secs(300)
        }
        Err(e) => {
            detail = e.to_string();
            false
        }
    };
    report(9, "Monte-Carlo outage slope", pass, detail);
}

const DRAWS: usize = 1000;

fn random_realization(
    rng: &mut ChaCha8Rng,
) -> (ChannelRealization, zic_dmt::montecarlo::LinkGains) {
    let mut count = || rng.random_range(1..=3usize);
    let cfg = AntennaConfig::new(count(), count(), count(), count()).unwrap();
    let real = ChannelRealization::sample(&cfg, rng);
    let a = ScalingExponents::new(
        rng.random_range(0.25..2.5),
        rng.random_range(0.25..2.5),
        rng.random_range(0.25..2.5),
    )
    .unwrap();
    let snr = SnrPoint::new(rng.random_range(0.0..40.0)).unwrap();
    (real, snr.gains(&a))
}

fn bound_gap_violations(rng: &mut ChaCha8Rng) -> usize {
    let mut bad = 0;
    for _ in 0..DRAWS {
        let (real, g) = random_realization(rng);
        let up = mutual_info_upper(&real, &g).unwrap();
        let (n1, n2) = (real.h11.nrows() as f64, real.h22.nrows() as f64);
        let lo = lower_from_upper(&up, real.h11.nrows(), real.h22.nrows());
        let gaps = [
            (up.i_b1 - lo.i_l1, 2.0 * n1),
            (up.i_b2 - lo.i_l2, 2.0 * n2),
            (up.i_bs - lo.i_ls, 2.0 * (n1 + n2)),
        ];
        if gaps.iter().any(|(got, want)| (got - want).abs() > 1e-9) {
            bad += 1;
        }
    }
    bad
}

fn decomposition_violations(rng: &mut ChaCha8Rng) -> usize {
    let mut bad = 0;
    for _ in 0..DRAWS {
        let (real, g) = random_realization(rng);
        let direct = mutual_info_upper(&real, &g).unwrap().i_bs;
        let split = sum_bound_decomposition(&real, &g).unwrap();
        if (direct - split).abs() > 1e-6 * direct.abs().max(1.0) {
            bad += 1;
        }
    }
    bad
}

type Formula = Box<dyn Fn(f64) -> f64>;

/// Closed forms evaluated just left and right of their knees.
fn continuity_violations(rng: &mut ChaCha8Rng) -> usize {
    const EPS: f64 = 1e-11;
    let mut bad = 0;
    for _ in 0..DRAWS {
        let (f, knees, top): (Formula, Vec<f64>, f64) = match rng.random_range(0..3) {
            0 => {
                let n = rng.random_range(1..=3usize);
                let a = rng.random_range(0.5..2.5);
                let nf = n as f64;
                (
                    Box::new(move |r| fcsit_symmetric_sum(n, a, r).unwrap()),
                    vec![nf, nf * a],
                    fcsit_symmetric_top(n, a),
                )
            }
            1 => {
                let n = rng.random_range(1..=3usize);
                let a = rng.random_range(1.0..2.5);
                let nf = n as f64;
                (
                    Box::new(move |r| fcsit_femto_sum(n, a, r).unwrap()),
                    vec![nf, nf * a],
                    nf * a,
                )
            }
            _ => {
                let m = rng.random_range(1..=3usize);
                let n1 = rng.random_range(m..=4);
                let n2 = rng.random_range(m..=4);
                (
                    Box::new(move |r| fcsit_asymmetric_sum(m, n1, n2, r).unwrap()),
                    vec![m as f64],
                    asymmetric_top(m, n1),
                )
            }
        };
        for k in knees.into_iter().filter(|&k| k > EPS && k < top - EPS) {
            if (f(k - EPS) - f(k + EPS)).abs() > 1e-9 {
                bad += 1;
            }
        }
    }
    bad
}

fn dominance_violations(rng: &mut ChaCha8Rng) -> usize {
    let mut bad = 0;
    for _ in 0..DRAWS {
        let mut count = || rng.random_range(1..=2usize);
        let cfg = AntennaConfig::new(count(), count(), count(), count()).unwrap();
        let mut alpha = || rng.random_range(0.25..2.5);
        let a = ScalingExponents::new(alpha(), alpha(), alpha()).unwrap();
        let r1 = rng.random_range(0.0..=cfg.q1() as f64 * a.alpha11);
        let r2 = rng.random_range(0.0..=cfg.q2() as f64 * a.alpha22);
        let q = |csit| DmtQuery {
            cfg,
            alphas: a,
            gains: MultiplexingGainPair::new(r1, r2).unwrap(),
            csit,
        };
        let full = full_dmt(&q(Csit::Full)).unwrap().value;
        let none = full_dmt(&q(Csit::None)).unwrap().value;
        if full < none - 1e-9 {
            bad += 1;
        }
    }
    bad
}

/// Repeated curve evaluations and outage counts on several pool sizes.
fn determinism_violations(rng: &mut ChaCha8Rng) -> usize {
    let mut bad = 0;
    for _ in 0..DRAWS {
        let cfg = AntennaConfig::new(
            rng.random_range(1..=2),
            rng.random_range(1..=2),
            rng.random_range(1..=2),
            rng.random_range(1..=2),
        )
        .unwrap();
        let a = ScalingExponents::new(
            rng.random_range(0.25..2.5),
            rng.random_range(0.25..2.5),
            1.0,
        )
        .unwrap();
        let r = rng.random_range(0.0..=cfg.q1().min(cfg.q2()) as f64 * a.alpha11.min(1.0));
        let gains = GainSweep::Pairs(vec![MultiplexingGainPair::symmetric(r).unwrap()]);
        let first = compute_curve(cfg, a, gains.clone()).unwrap();
        let second = compute_curve(cfg, a, gains).unwrap();
        if first.to_csv() != second.to_csv() {
            bad += 1;
        }
    }
    let mc = McConfig {
        cfg: AntennaConfig::new(1, 2, 1, 1).unwrap(),
        alphas: ScalingExponents::unit(),
        gains: MultiplexingGainPair::new(0.3, 0.2).unwrap(),
        csit: Csit::None,
        snr_grid_db: vec![0.0, 10.0, 20.0],
        samples_per_point: 3 * (1 << 16) + 17,
        seed: 11,
        min_hits: DEFAULT_MIN_HITS,
    };
    let counts: Vec<_> = [1, 2, 4]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_outage(&mc)).unwrap()
        })
        .collect();
    if counts.windows(2).any(|w| w[0] != w[1]) {
        bad += 1;
    }
    bad
}

#[test]
fn criterion_10_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let suites = [
        ("bound gaps", bound_gap_violations(&mut rng)),
        (
            "sum-bound decomposition",
            decomposition_violations(&mut rng),
        ),
        ("branch continuity", continuity_violations(&mut rng)),
        ("CSIT dominance", dominance_violations(&mut rng)),
        ("determinism", determinism_violations(&mut rng)),
    ];
    let total: usize = suites.iter().map(|s| s.1).sum();
    let detail = suites
        .iter()
        .map(|(name, bad)| format!("{name} {bad}/{DRAWS}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        10,
        "property suites",
        total == 0,
        format!("violations: {detail}"),
    );
}
