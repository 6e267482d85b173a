//! CSV and JSON emission. All floating-point output uses 17 significant
//! digits, which round-trips f64 exactly; identical runs produce identical
//! bytes (the manifest's wall-clock field is the one documented exception).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sphgrav_core::entropy::{DiagnosticsReport, TestBump};
use sphgrav_core::gravity;
use sphgrav_core::scheme::{CellArray, InitialData, SchemeConfig, Trajectory};

use crate::CliError;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Snapshot CSV, fixed column contract:
/// `x, rho, m, vrho, omega, w, z, phi_x`.
pub fn write_snapshot_csv(path: &Path, cells: &CellArray, dim: u32) -> Result<(), CliError> {
    let prefix = gravity::prefix_mass(cells);
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x,rho,m,vrho,omega,w,z,phi_x")?;
    for i in 0..cells.len() {
        let x = cells.center(i);
        let s = cells.state(i);
        let phys = s.to_physical(x, dim)?;
        let scale = prefix.at(x) / x_pow(x, dim - 1);
        let (w, z) = match s.riemann_invariants() {
            Ok(inv) => (inv.w, inv.z),
            Err(_) => (f64::NAN, f64::NAN),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(x),
            fmt_f64(phys.rho),
            fmt_f64(phys.m),
            fmt_f64(s.vrho),
            fmt_f64(s.omega),
            fmt_f64(w),
            fmt_f64(z),
            fmt_f64(-scale)
        )?;
    }
    out.flush()?;
    Ok(())
}

fn x_pow(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

#[derive(Serialize)]
pub struct InitialJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_rows: Option<usize>,
}

#[derive(Serialize)]
pub struct ConfigJson {
    pub n: u32,
    pub beta: f64,
    pub l: f64,
    pub t_final: f64,
    pub l_max: f64,
    pub initial: InitialJson,
    pub monitor_enabled: bool,
    pub monitor_c: Option<f64>,
    pub monitor_alpha0: Option<f64>,
    pub monitor_tol: f64,
    pub source_enabled: bool,
    pub cutoff_enabled: bool,
}

impl ConfigJson {
    pub fn from_config(c: &SchemeConfig) -> Self {
        let initial = match &c.initial {
            InitialData::Floor => InitialJson {
                kind: "floor",
                amplitude: None,
                center: None,
                width: None,
                u0: None,
                table_rows: None,
            },
            InitialData::GaussianBump {
                amplitude,
                center,
                width,
                u0,
            } => InitialJson {
                kind: "gaussian_bump",
                amplitude: Some(*amplitude),
                center: Some(*center),
                width: Some(*width),
                u0: Some(*u0),
                table_rows: None,
            },
            InitialData::Table { rows } => InitialJson {
                kind: "table",
                amplitude: None,
                center: None,
                width: None,
                u0: None,
                table_rows: Some(rows.len()),
            },
        };
        ConfigJson {
            n: c.dim,
            beta: c.beta,
            l: c.l,
            t_final: c.t_final,
            l_max: c.l_max,
            initial,
            monitor_enabled: c.monitor.enabled,
            monitor_c: c.monitor.c,
            monitor_alpha0: c.monitor.alpha0,
            monitor_tol: c.monitor.tol,
            source_enabled: c.source_enabled,
            cutoff_enabled: c.cutoff_enabled,
        }
    }
}

#[derive(Serialize)]
pub struct BumpJson {
    pub x_center: f64,
    pub x_radius: f64,
    pub t_center: f64,
    pub t_radius: f64,
}

impl From<&TestBump> for BumpJson {
    fn from(b: &TestBump) -> Self {
        BumpJson {
            x_center: b.x_center,
            x_radius: b.x_radius,
            t_center: b.t_center,
            t_radius: b.t_radius,
        }
    }
}

#[derive(Serialize)]
pub struct DiagnosticsJson {
    pub schema: &'static str,
    pub config: ConfigJson,
    pub h: f64,
    pub n_steps: usize,
    pub alpha0: f64,
    pub monitor_c: f64,
    pub bounds_pass: bool,
    pub sup_w_max: f64,
    pub inf_z_min: f64,
    pub vrho_min: f64,
    pub vrho_max: f64,
    pub density_floor: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub total_mass_initial: f64,
    pub cutoff_injected_total: f64,
    pub strip_mass_total: f64,
    pub edge_flux_mass_total: f64,
    pub wall_flux_mass_total: f64,
    pub max_cfl_ratio: f64,
    pub consistency_sum: f64,
    pub entropy_production: Vec<EntropyTotalJson>,
    pub weak_residuals: WeakJson,
    pub boundary_trace: TraceJson,
    pub series: SeriesJson,
}

#[derive(Serialize)]
pub struct EntropyTotalJson {
    pub pair: String,
    pub total: f64,
}

#[derive(Serialize)]
pub struct WeakJson {
    pub mass: f64,
    pub momentum: f64,
    pub entropy: f64,
    pub test_function: BumpJson,
}

#[derive(Serialize)]
pub struct TraceJson {
    pub eps: f64,
    pub time_average: f64,
}

#[derive(Serialize)]
pub struct SeriesJson {
    pub times: Vec<f64>,
    pub sup_w: Vec<f64>,
    pub inf_z: Vec<f64>,
    pub boundary_trace: Vec<f64>,
}

pub fn diagnostics_json(
    traj: &Trajectory,
    report: &DiagnosticsReport,
    bump: &TestBump,
) -> DiagnosticsJson {
    let sup_w_max = report
        .sup_w
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let inf_z_min = report.inf_z.iter().copied().fold(f64::INFINITY, f64::min);
    DiagnosticsJson {
        schema: "sphgrav.diagnostics/1",
        config: ConfigJson::from_config(&traj.config),
        h: traj.h,
        n_steps: traj.n_steps(),
        alpha0: report.alpha0,
        monitor_c: report.monitor_c,
        bounds_pass: report.bounds_pass,
        sup_w_max,
        inf_z_min,
        vrho_min: report.vrho_min,
        vrho_max: report.vrho_max,
        density_floor: traj.config.floor(),
        mass_initial: report.mass_initial,
        mass_final: report.mass_final,
        total_mass_initial: report.total_mass_initial,
        cutoff_injected_total: report.cutoff_injected_total,
        strip_mass_total: report.strip_mass_total,
        edge_flux_mass_total: report.edge_flux_mass_total,
        wall_flux_mass_total: report.wall_flux_mass_total,
        max_cfl_ratio: report.max_cfl_ratio,
        consistency_sum: report.consistency_sum,
        entropy_production: report
            .entropy_totals
            .iter()
            .map(|(pair, total)| EntropyTotalJson {
                pair: pair.clone(),
                total: *total,
            })
            .collect(),
        weak_residuals: WeakJson {
            mass: report.weak.mass,
            momentum: report.weak.momentum,
            entropy: report.weak.entropy,
            test_function: bump.into(),
        },
        boundary_trace: TraceJson {
            eps: report.boundary_trace_eps,
            time_average: report.boundary_trace_average,
        },
        series: SeriesJson {
            times: report.times.clone(),
            sup_w: report.sup_w.clone(),
            inf_z: report.inf_z.clone(),
            boundary_trace: report.boundary_trace_values.clone(),
        },
    }
}

#[derive(Serialize)]
pub struct ManifestJson {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: ConfigJson,
    pub derived: DerivedJson,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
    pub diagnostics_digest: DigestJson,
}

#[derive(Serialize)]
pub struct DerivedJson {
    pub h: f64,
    pub density_floor: f64,
    pub grid_intervals: usize,
    pub n_steps: usize,
    pub alpha0: f64,
    pub monitor_c: f64,
}

#[derive(Serialize)]
pub struct DigestJson {
    pub bounds_pass: bool,
    pub sup_w_max: f64,
    pub inf_z_min: f64,
    pub mass_final: f64,
    pub cutoff_injected_total: f64,
    pub consistency_sum: f64,
    pub entropy_total_mechanical: f64,
    pub weak_mass: f64,
    pub weak_momentum: f64,
    pub weak_entropy: f64,
    pub boundary_trace_average: f64,
}

pub fn manifest_json(
    traj: &Trajectory,
    report: &DiagnosticsReport,
    wall_clock_seconds: f64,
    outputs: Vec<String>,
) -> ManifestJson {
    let mechanical = report
        .entropy_totals
        .iter()
        .find(|(p, _)| p == "mechanical")
        .map(|(_, v)| *v)
        .unwrap_or(f64::NAN);
    ManifestJson {
        schema: "sphgrav.manifest/1",
        version: env!("CARGO_PKG_VERSION"),
        config: ConfigJson::from_config(&traj.config),
        derived: DerivedJson {
            h: traj.h,
            density_floor: traj.config.floor(),
            grid_intervals: traj.config.grid_intervals(),
            n_steps: traj.n_steps(),
            alpha0: traj.alpha0,
            monitor_c: traj.monitor_c,
        },
        wall_clock_seconds,
        outputs,
        diagnostics_digest: DigestJson {
            bounds_pass: report.bounds_pass,
            sup_w_max: report
                .sup_w
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            inf_z_min: report.inf_z.iter().copied().fold(f64::INFINITY, f64::min),
            mass_final: report.mass_final,
            cutoff_injected_total: report.cutoff_injected_total,
            consistency_sum: report.consistency_sum,
            entropy_total_mechanical: mechanical,
            weak_mass: report.weak.mass,
            weak_momentum: report.weak.momentum,
            weak_entropy: report.weak.entropy,
            boundary_trace_average: report.boundary_trace_average,
        },
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
