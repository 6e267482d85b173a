//! Subcommand implementations.

use std::path::PathBuf;
use std::time::Instant;

use sphgrav_core::entropy::{self, DiagnosticsReport, EntropyPair, TestBump};
use sphgrav_core::riemann::{self, WaveFamily, WaveFan, WaveKind};
use sphgrav_core::scheme::{self, CellArray, SchemeConfig, Trajectory};
use sphgrav_core::state::State;

use crate::config::{self, RunSettings};
use crate::output::{self, fmt_f64};
use crate::{CliError, Flags};

fn out_dir(flags: &Flags) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(flags.get("out-dir").unwrap_or("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn pairs_from(settings: &RunSettings) -> Vec<EntropyPair> {
    let mut pairs = vec![EntropyPair::Mechanical];
    pairs.extend(settings.xi_grid.iter().map(|&xi| EntropyPair::Weak { xi }));
    pairs
}

struct Completed {
    traj: Trajectory,
    report: DiagnosticsReport,
    bump: TestBump,
    wall_clock: f64,
}

fn execute(cfg: &SchemeConfig, settings: &RunSettings) -> Result<Completed, CliError> {
    let t0 = Instant::now();
    let traj = scheme::run(cfg)?;
    let bump = TestBump::for_domain(traj.steps[0].right_edge(), cfg.t_final);
    let pairs = pairs_from(settings);
    // The wall strip cannot be narrower than one odd boundary cell.
    let eps = settings.trace_eps.max(2.0 * cfg.l);
    let report = entropy::evaluate_report(&traj, &pairs, &bump, eps)?;
    Ok(Completed {
        traj,
        report,
        bump,
        wall_clock: t0.elapsed().as_secs_f64(),
    })
}

fn load_config(flags: &Flags) -> Result<(SchemeConfig, RunSettings), CliError> {
    let path = PathBuf::from(flags.require("config")?);
    let raw = config::load(&path)?;
    raw.resolve()
}

fn print_summary(done: &Completed) {
    let traj = &done.traj;
    let report = &done.report;
    println!(
        "run: {} steps of h = {:.6e} to t = {:.6}, {} cells at the end",
        traj.n_steps(),
        traj.h,
        traj.final_cells().time(),
        traj.final_cells().len()
    );
    println!(
        "bounds: pass = {} (alpha0 = {:.6}, C = {:.6}); density in [{:.6e}, {:.6e}]",
        report.bounds_pass, report.alpha0, report.monitor_c, report.vrho_min, report.vrho_max
    );
    println!(
        "mass: initial {:.12e}, final {:.12e}, cutoff injected {:.6e}",
        report.mass_initial, report.mass_final, report.cutoff_injected_total
    );
    println!(
        "consistency sum {:.6e}; weak residuals mass {:.6e}, momentum {:.6e}, entropy {:.6e}",
        report.consistency_sum, report.weak.mass, report.weak.momentum, report.weak.entropy
    );
    println!(
        "boundary trace average {:.6e} (eps = {}); max CFL ratio {:.4}",
        report.boundary_trace_average, report.boundary_trace_eps, report.max_cfl_ratio
    );
}

pub fn cmd_run(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    let (cfg, mut settings) = load_config(&flags)?;
    if let Some(times) = flags.get("snapshot-times") {
        settings.snapshot_times = config::parse_list(times)?;
    }
    let dir = out_dir(&flags)?;
    let done = execute(&cfg, &settings)?;

    let mut outputs = Vec::new();
    for (k, t) in settings.snapshot_times.iter().enumerate() {
        let name = format!("snapshot_{k:03}.csv");
        output::write_snapshot_csv(&dir.join(&name), done.traj.snapshot_at(*t), cfg.dim)?;
        outputs.push(name);
    }
    let final_name = "snapshot_final.csv".to_string();
    output::write_snapshot_csv(&dir.join(&final_name), done.traj.final_cells(), cfg.dim)?;
    outputs.push(final_name);

    output::write_json(
        &dir.join("diagnostics.json"),
        &output::diagnostics_json(&done.traj, &done.report, &done.bump),
    )?;
    outputs.push("diagnostics.json".to_string());
    outputs.push("manifest.json".to_string());
    output::write_json(
        &dir.join("manifest.json"),
        &output::manifest_json(&done.traj, &done.report, done.wall_clock, outputs),
    )?;

    print_summary(&done);
    Ok(())
}

pub fn cmd_diagnose(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    let (cfg, settings) = load_config(&flags)?;
    let dir = out_dir(&flags)?;
    let done = execute(&cfg, &settings)?;
    output::write_json(
        &dir.join("diagnostics.json"),
        &output::diagnostics_json(&done.traj, &done.report, &done.bump),
    )?;
    let outputs = vec!["diagnostics.json".to_string(), "manifest.json".to_string()];
    output::write_json(
        &dir.join("manifest.json"),
        &output::manifest_json(&done.traj, &done.report, done.wall_clock, outputs),
    )?;
    print_summary(&done);
    Ok(())
}

fn parse_state(s: &str) -> Result<State, CliError> {
    let (vrho, u) = s
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("expected RHO,U, got `{s}`")))?;
    let vrho = config::parse_number(vrho)?;
    let u = config::parse_number(u)?;
    if !(vrho > 0.0) || !vrho.is_finite() || !u.is_finite() {
        return Err(CliError::Config(format!(
            "state `{s}` needs a positive finite density and finite velocity"
        )));
    }
    Ok(State::new(vrho, u * vrho))
}

fn describe_state(s: State) -> String {
    format!(
        "vrho = {}, omega = {}, u = {}",
        fmt_f64(s.vrho),
        fmt_f64(s.omega),
        fmt_f64(s.omega / s.vrho)
    )
}

fn print_fan(fan: &WaveFan) {
    if fan.is_boundary {
        println!("wall:   reflecting, omega = 0 at x = 1");
    } else {
        println!("left:   {}", describe_state(fan.left));
    }
    println!("middle: {}", describe_state(fan.middle));
    println!("right:  {}", describe_state(fan.right));
    if fan.waves.is_empty() {
        println!("constant solution, no waves");
        return;
    }
    for w in &fan.waves {
        let family = match w.family {
            WaveFamily::One => 1,
            WaveFamily::Two => 2,
        };
        match w.kind {
            WaveKind::Shock => {
                println!("{family}-shock        speed {}", fmt_f64(w.speed_lo));
            }
            WaveKind::Rarefaction => println!(
                "{family}-rarefaction  speeds [{}, {}]",
                fmt_f64(w.speed_lo),
                fmt_f64(w.speed_hi)
            ),
        }
    }
    if fan.is_boundary {
        println!("wall trace: {}", describe_state(fan.middle));
    }
}

pub fn cmd_riemann(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["wall"])?;
    let right = parse_state(flags.require("right")?)?;
    let wall = flags.has("wall");
    let fan = if wall {
        riemann::solve_boundary_riemann(right)?
    } else {
        let left = parse_state(flags.require("left")?)?;
        riemann::solve_riemann(left, right)?
    };
    print_fan(&fan);

    if let Some(profile) = flags.get("profile") {
        let xi_min = match flags.get("xi-min") {
            Some(v) => config::parse_number(v)?,
            None => {
                if wall {
                    0.0
                } else {
                    -3.0
                }
            }
        };
        let xi_max = match flags.get("xi-max") {
            Some(v) => config::parse_number(v)?,
            None => 3.0,
        };
        let points = match flags.get("points") {
            Some(v) => config::parse_number(v)? as usize,
            None => 601,
        };
        if wall && xi_min < 0.0 {
            return Err(CliError::Config(
                "wall profiles need xi-min >= 0".to_string(),
            ));
        }
        if !(xi_max > xi_min) || points < 2 {
            return Err(CliError::Config("empty profile grid".to_string()));
        }
        let dir = out_dir(&flags)?;
        let path = dir.join(profile);
        let mut text = String::from("xi,vrho,omega,u,w,z\n");
        for k in 0..points {
            let xi = xi_min + (xi_max - xi_min) * k as f64 / (points - 1) as f64;
            let s = fan.sample(xi)?;
            let inv = s.riemann_invariants()?;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(xi),
                fmt_f64(s.vrho),
                fmt_f64(s.omega),
                fmt_f64(s.omega / s.vrho),
                fmt_f64(inv.w),
                fmt_f64(inv.z)
            ));
        }
        std::fs::write(&path, text)?;
        println!("profile written to {}", path.display());
    }
    Ok(())
}

/// Growth constant the run actually attained:
/// `max over steps of max(sup_w - alpha0, -inf_z - alpha0) / t`.
pub fn attained_growth_constant(report: &DiagnosticsReport) -> f64 {
    let mut c: f64 = 0.0;
    for k in 1..report.times.len() {
        let t = report.times[k];
        c = c.max((report.sup_w[k] - report.alpha0) / t);
        c = c.max((-report.inf_z[k] - report.alpha0) / t);
    }
    c
}

/// Conservative restriction of the fine tiling onto the coarse one, then the
/// L1 distance of the weighted density over the common extent.
pub fn l1_density_difference(fine: &CellArray, coarse: &CellArray) -> f64 {
    let common_hi = fine.right_edge().min(coarse.right_edge());
    let mut total = 0.0;
    let mut j = 0usize;
    for i in 0..coarse.len() {
        let (lo, hi) = coarse.bounds(i);
        if hi > common_hi {
            break;
        }
        let mut integral = 0.0;
        while j < fine.len() && fine.bounds(j).1 <= lo {
            j += 1;
        }
        let mut k = j;
        while k < fine.len() {
            let (flo, fhi) = fine.bounds(k);
            if flo >= hi {
                break;
            }
            let overlap = (fhi.min(hi) - flo.max(lo)).max(0.0);
            integral += overlap * fine.state(k).vrho;
            k += 1;
        }
        let fine_avg = integral / (hi - lo);
        total += (fine_avg - coarse.state(i).vrho).abs() * (hi - lo);
    }
    total
}

pub fn cmd_converge(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &[])?;
    let (base_cfg, settings) = load_config(&flags)?;
    let levels = config::parse_list(flags.require("levels")?)?;
    if levels.len() < 2 {
        return Err(CliError::Config("need at least two levels".to_string()));
    }
    for pair in levels.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(CliError::Config(
                "levels must be strictly decreasing".to_string(),
            ));
        }
    }
    let dir = out_dir(&flags)?;

    let mut runs = Vec::with_capacity(levels.len());
    for &l in &levels {
        let mut cfg = base_cfg.clone();
        cfg.l = l;
        runs.push(execute(&cfg, &settings)?);
    }

    // Pairwise L1 differences on the coarser grid of each pair. The final
    // times differ by at most the coarser step, which is part of the O(l)
    // comparison error.
    let mut diffs = vec![f64::NAN];
    for k in 1..runs.len() {
        diffs.push(l1_density_difference(
            runs[k].traj.final_cells(),
            runs[k - 1].traj.final_cells(),
        ));
    }

    println!(
        "l,h,n_steps,l1_diff_prev,r_mass,r_momentum,r_entropy,consistency_sum,c_attained,trace_avg"
    );
    let mut csv = String::from(
        "l,h,n_steps,l1_diff_prev,r_mass,r_momentum,r_entropy,consistency_sum,c_attained,trace_avg\n",
    );
    for (k, run) in runs.iter().enumerate() {
        let line = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(levels[k]),
            fmt_f64(run.traj.h),
            run.traj.n_steps(),
            fmt_f64(diffs[k]),
            fmt_f64(run.report.weak.mass),
            fmt_f64(run.report.weak.momentum),
            fmt_f64(run.report.weak.entropy),
            fmt_f64(run.report.consistency_sum),
            fmt_f64(attained_growth_constant(&run.report)),
            fmt_f64(run.report.boundary_trace_average),
        );
        println!("{line}");
        csv.push_str(&line);
        csv.push('\n');
    }
    std::fs::write(dir.join("convergence.csv"), csv)?;

    #[derive(serde::Serialize)]
    struct LevelJson {
        l: f64,
        h: f64,
        n_steps: usize,
        l1_diff_prev: Option<f64>,
        weak_mass: f64,
        weak_momentum: f64,
        weak_entropy: f64,
        consistency_sum: f64,
        c_attained: f64,
        trace_average: f64,
    }
    #[derive(serde::Serialize)]
    struct ConvergenceJson {
        schema: &'static str,
        slack: f64,
        monotone: bool,
        levels: Vec<LevelJson>,
    }

    let slack = settings.converge_slack;
    // Values at rounding scale are treated as converged noise.
    let leq = |a: f64, b: f64| a <= slack * b + 1e-12;
    let mut monotone = true;
    for k in 2..runs.len() {
        monotone &= leq(diffs[k], diffs[k - 1]);
    }
    for k in 1..runs.len() {
        monotone &= leq(
            runs[k].report.weak.mass.abs(),
            runs[k - 1].report.weak.mass.abs(),
        );
        monotone &= leq(
            runs[k].report.weak.momentum.abs(),
            runs[k - 1].report.weak.momentum.abs(),
        );
    }

    let json = ConvergenceJson {
        schema: "sphgrav.convergence/1",
        slack,
        monotone,
        levels: runs
            .iter()
            .enumerate()
            .map(|(k, run)| LevelJson {
                l: levels[k],
                h: run.traj.h,
                n_steps: run.traj.n_steps(),
                l1_diff_prev: if k == 0 { None } else { Some(diffs[k]) },
                weak_mass: run.report.weak.mass,
                weak_momentum: run.report.weak.momentum,
                weak_entropy: run.report.weak.entropy,
                consistency_sum: run.report.consistency_sum,
                c_attained: attained_growth_constant(&run.report),
                trace_average: run.report.boundary_trace_average,
            })
            .collect(),
    };
    output::write_json(&dir.join("convergence.json"), &json)?;

    if !monotone {
        return Err(CliError::Failed(
            "differences or residuals are not monotone within the configured slack".to_string(),
        ));
    }
    println!("convergence study passed (slack factor {slack})");
    Ok(())
}
