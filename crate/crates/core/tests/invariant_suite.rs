//! Property suite for the Riemann solver and the scheme: invariant-region
//! bounds, conservative averaging, and per-fan admissibility, on random
//! corpora drawn from a fixed-seed generator.

use sphgrav_core::entropy::{self, EntropyPair};
use sphgrav_core::quad::SplitMix64;
use sphgrav_core::riemann::{self, cell_average, solve_boundary_riemann, solve_riemann};
use sphgrav_core::scheme::{self, InitialData, SchemeConfig};
use sphgrav_core::state::{RegionTheta, State};

fn random_state(rng: &mut SplitMix64) -> State {
    let vrho = rng.log_in_range(1e-4, 10.0);
    let u = rng.in_range(-5.0, 5.0);
    State::new(vrho, u * vrho)
}

fn ray_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn interior_fans_stay_in_the_data_region() {
    let mut rng = SplitMix64::new(0xfa);
    for _ in 0..1000 {
        let left = random_state(&mut rng);
        let right = random_state(&mut rng);
        let fan = solve_riemann(left, right).unwrap();
        let theta = RegionTheta::hull(&[left, right]).unwrap().expanded(1e-9);
        for xi in ray_grid(-8.0, 8.0, 64) {
            let s = fan.sample(xi).unwrap();
            assert!(s.vrho > 0.0, "no interior vacuum");
            assert!(
                s.in_region(theta).unwrap(),
                "sampled state {s:?} outside the data region {theta:?}"
            );
        }
    }
}

#[test]
fn wall_fans_respect_the_boundary_bounds() {
    let mut rng = SplitMix64::new(0xb0);
    for _ in 0..1000 {
        let plus = random_state(&mut rng);
        let inv = plus.riemann_invariants().unwrap();
        let fan = solve_boundary_riemann(plus).unwrap();
        let theta = RegionTheta::new(inv.w.max(-inv.z), inv.z.min(0.0)).expanded(1e-9);
        for xi in ray_grid(0.0, 8.0, 64) {
            let s = fan.sample(xi).unwrap();
            assert!(
                s.in_region(theta).unwrap(),
                "wall sample {s:?} outside {theta:?} for data {plus:?}"
            );
        }
        // The wall trace is exactly at rest.
        assert_eq!(fan.sample(0.0).unwrap().omega, 0.0);
    }
}

#[test]
fn sampling_is_self_similar_bit_for_bit() {
    let mut rng = SplitMix64::new(0x5e1f);
    for _ in 0..200 {
        let fan = solve_riemann(random_state(&mut rng), random_state(&mut rng)).unwrap();
        for _ in 0..16 {
            let dx = rng.in_range(-2.0, 2.0);
            let t = rng.in_range(0.01, 1.0);
            // Doubling both offsets leaves the ray bit-identical.
            let a = fan.sample(dx / t).unwrap();
            let b = fan.sample((2.0 * dx) / (2.0 * t)).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn averaging_preserves_the_invariant_region() {
    let mut rng = SplitMix64::new(0xa7e);
    let mut tested = 0;
    for _ in 0..2000 {
        let left = random_state(&mut rng);
        let right = random_state(&mut rng);
        let fan = solve_riemann(left, right).unwrap().at_origin(5.0, 0.0);
        let t = rng.in_range(0.01, 0.1);
        let (a, b) = (5.0 - rng.in_range(0.8, 1.5), 5.0 + rng.in_range(0.8, 1.5));
        let contained = fan
            .waves
            .iter()
            .all(|w| 5.0 + w.speed_lo * t > a && 5.0 + w.speed_hi * t < b);
        if !contained {
            continue;
        }
        tested += 1;
        let avg = cell_average(&fan, a, b, t).unwrap();
        let theta = RegionTheta::hull(&[left, right]).unwrap().expanded(1e-9);
        assert!(
            avg.in_region(theta).unwrap(),
            "average {avg:?} left the region {theta:?}"
        );
    }
    assert!(tested > 1500, "containment filter too aggressive: {tested}");
}

#[test]
fn shocks_dissipate_every_monitored_pair() {
    let mut rng = SplitMix64::new(0xd15);
    let pairs = entropy::standard_pairs();
    for _ in 0..1000 {
        let fan = solve_riemann(random_state(&mut rng), random_state(&mut rng)).unwrap();
        for w in fan.waves.iter().filter(|w| w.is_shock()) {
            let (r1, r2) = riemann::rh_residual(w.left, w.right, w.speed_lo).unwrap();
            assert!(r1.abs() <= 1e-8 && r2.abs() <= 1e-8);
            for pair in &pairs {
                let p =
                    riemann::entropy_production(w.left, w.right, w.speed_lo, |s| pair.evaluate(s))
                        .unwrap();
                assert!(
                    p >= -1e-10,
                    "pair {} produced {p} across {w:?}",
                    pair.label()
                );
            }
        }
    }
}

/// Spot-check 1% of the fans of a short bump run against the full fan
/// invariant suite.
#[test]
fn scheme_fans_pass_the_solver_invariants() {
    let l = 0.02;
    let (_, h) = scheme::mesh_params(l).unwrap();
    let mut config = SchemeConfig::new(
        3,
        l,
        40.5 * h,
        6.0,
        InitialData::GaussianBump {
            amplitude: 0.5,
            center: 3.0,
            width: 1.0,
            u0: 0.0,
        },
    );
    config.monitor.enabled = false;
    let traj = scheme::run(&config).unwrap();
    assert!(traj.n_steps() == 40);

    let mut rng = SplitMix64::new(0x51);
    for i in 0..traj.n_steps() {
        let fans = scheme::strip_fans(&traj.steps[i], &traj.config, i).unwrap();
        for sf in &fans {
            if rng.next_f64() > 0.01 {
                continue;
            }
            let fan = &sf.fan;
            assert!(fan.middle.vrho > 0.0);
            let theta = if fan.is_boundary {
                let inv = fan.right.riemann_invariants().unwrap();
                RegionTheta::new(inv.w.max(-inv.z), inv.z.min(0.0))
            } else {
                RegionTheta::hull(&[fan.left, fan.right]).unwrap()
            }
            .expanded(1e-9);
            assert!(fan.middle.in_region(theta).unwrap());
            let mut last_hi = f64::NEG_INFINITY;
            for w in &fan.waves {
                assert!(w.speed_lo >= last_hi);
                assert!(w.speed_lo <= w.speed_hi);
                last_hi = w.speed_hi;
                if w.is_shock() {
                    let (r1, r2) = riemann::rh_residual(w.left, w.right, w.speed_lo).unwrap();
                    assert!(r1.abs() <= 1e-8 && r2.abs() <= 1e-8);
                    let p = riemann::entropy_production(w.left, w.right, w.speed_lo, |s| {
                        Ok(entropy::mechanical_entropy(s))
                    })
                    .unwrap();
                    assert!(p >= -1e-10);
                }
            }
        }
    }
}

#[test]
fn runs_and_reports_are_bit_reproducible() {
    let l = 0.05;
    let (_, h) = scheme::mesh_params(l).unwrap();
    let mut config = SchemeConfig::new(
        3,
        l,
        20.5 * h,
        6.0,
        InitialData::GaussianBump {
            amplitude: 0.4,
            center: 2.2,
            width: 0.5,
            u0: 0.0,
        },
    );
    config.monitor.enabled = false;
    let t1 = scheme::run(&config).unwrap();
    let t2 = scheme::run(&config).unwrap();
    for (a, b) in t1.steps.iter().zip(&t2.steps) {
        assert_eq!(a.states(), b.states());
    }

    let pairs = [EntropyPair::Mechanical, EntropyPair::Weak { xi: 0.25 }];
    let bump = entropy::TestBump::standard(config.t_final);
    let r1 = entropy::evaluate_report(&t1, &pairs, &bump, 3.0 * l).unwrap();
    let r2 = entropy::evaluate_report(&t1, &pairs, &bump, 3.0 * l).unwrap();
    assert_eq!(r1.consistency_sum.to_bits(), r2.consistency_sum.to_bits());
    assert_eq!(r1.weak.mass.to_bits(), r2.weak.mass.to_bits());
    assert_eq!(r1.weak.momentum.to_bits(), r2.weak.momentum.to_bits());
    for (a, b) in r1.entropy_totals.iter().zip(&r2.entropy_totals) {
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
    assert_eq!(
        r1.boundary_trace_average.to_bits(),
        r2.boundary_trace_average.to_bits()
    );
}

/// Exercise the dimension-dependent paths (`x^(N-1)` weighting, unit-disc
/// mass factor, logarithmic wall-strip antiderivative) with a short planar
/// run.
#[test]
fn two_dimensional_run_smoke() {
    let l = 0.05;
    let (_, h) = scheme::mesh_params(l).unwrap();
    let config = SchemeConfig::new(
        2,
        l,
        30.5 * h,
        6.0,
        InitialData::GaussianBump {
            amplitude: 0.4,
            center: 3.0,
            width: 0.8,
            u0: 0.0,
        },
    );
    let traj = scheme::run(&config).unwrap();
    assert_eq!(traj.n_steps(), 30);
    let report = entropy::evaluate_report(
        &traj,
        &entropy::standard_pairs(),
        &entropy::TestBump::standard(config.t_final),
        2.0 * l,
    )
    .unwrap();
    assert!(report.bounds_pass);
    assert!(report.vrho_min >= config.floor());
    assert!(report.consistency_sum.is_finite() && report.consistency_sum >= 0.0);
    assert!(report.boundary_trace_average.is_finite());
    for (_, total) in &report.entropy_totals {
        assert!(*total >= -1e-8);
    }
}

#[test]
fn middle_state_velocity_matches_oracle_on_a_large_corpus() {
    // Independent oracle: bisection on the density itself (not its log)
    // with a freshly written curve evaluation.
    fn curve_u(anchor: State, vrho: f64, family: u8) -> f64 {
        let ua = anchor.omega / anchor.vrho;
        let sign = if family == 1 { -1.0 } else { 1.0 };
        if vrho <= anchor.vrho {
            ua + sign * (vrho / anchor.vrho).ln()
        } else {
            ua + sign * (vrho - anchor.vrho) / (vrho * anchor.vrho).sqrt()
        }
    }

    let mut rng = SplitMix64::new(0x07ac1e);
    for _ in 0..2000 {
        let left = random_state(&mut rng);
        let right = random_state(&mut rng);
        let fan = solve_riemann(left, right).unwrap();
        let diff = |vrho: f64| curve_u(left, vrho, 1) - curve_u(right, vrho, 2);
        let (mut lo, mut hi) = (1e-300, 1e30);
        assert!(diff(lo) > 0.0 && diff(hi) < 0.0);
        while hi - lo > 1e-14 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if diff(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u_oracle = curve_u(left, 0.5 * (lo + hi), 1);
        let u_m = fan.middle.omega / fan.middle.vrho;
        assert!(
            (u_m - u_oracle).abs() <= 1e-9,
            "solver u_m {u_m} vs oracle {u_oracle} for {left:?} | {right:?}"
        );
    }
}
