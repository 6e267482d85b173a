//! Staggered Lax-Friedrichs stepping with exact Riemann evolution.
//!
//! One step of size `h = l / (10 (1 + |ln l|))`:
//!
//! 1. solve the wall Riemann problem at `x = 1` and an interior Riemann
//!    problem at every interface of the current tiling (exact fans);
//! 2. average the evolved solution onto the staggered tiling of the opposite
//!    parity, using the divergence-theorem average (exact, conservative);
//! 3. add the fractional source `h * g` at the new cell averages, with the
//!    prefix mass taken from the pre-source averages;
//! 4. floor the density at `l^beta`.
//!
//! Even-parity tilings start with a `3l` boundary cell, odd-parity tilings
//! with a `2l` one; interfaces therefore alternate between odd and even grid
//! nodes `x_j = 1 + j l`, and no wave ever reaches an averaging edge under
//! the CFL bound `max |lambda| < l/h`. The truncation edge alternates with
//! the parity as well; the strip of width `l` that appears or disappears
//! there is filled with the far-field floor state `(l^beta, 0)` and tracked
//! in the step ledger.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gravity;
use crate::math;
use crate::riemann::{self, WaveFan};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Initial data `(rho0, m0)(x)` in physical variables.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// Identically zero density; the cut-off turns it into the floor state.
    Floor,
    /// `rho0 = amplitude exp(-((x - center)/width)^2) x^(1-N)`,
    /// `m0 = u0 rho0`. The `x^(1-N)` factor makes the weighted density an
    /// exact Gaussian.
    GaussianBump {
        amplitude: f64,
        center: f64,
        width: f64,
        u0: f64,
    },
    /// Piecewise-linear interpolation of `(x, rho, m)` rows sorted by `x`;
    /// constant extension outside the tabulated range.
    Table { rows: Vec<(f64, f64, f64)> },
}

impl InitialData {
    pub fn rho0(&self, x: f64, dim: u32) -> f64 {
        match self {
            InitialData::Floor => 0.0,
            InitialData::GaussianBump {
                amplitude,
                center,
                width,
                ..
            } => {
                let s = (x - center) / width;
                amplitude * math::exp(-s * s) / math::powi(x, dim - 1)
            }
            InitialData::Table { rows } => interp(rows, x).0,
        }
    }

    pub fn m0(&self, x: f64, dim: u32) -> f64 {
        match self {
            InitialData::Floor => 0.0,
            InitialData::GaussianBump { u0, .. } => u0 * self.rho0(x, dim),
            InitialData::Table { rows } => interp(rows, x).1,
        }
    }
}

fn interp(rows: &[(f64, f64, f64)], x: f64) -> (f64, f64) {
    match rows.iter().position(|r| r.0 >= x) {
        Some(0) => (rows[0].1, rows[0].2),
        None => {
            let last = &rows[rows.len() - 1];
            (last.1, last.2)
        }
        Some(k) => {
            let (x0, r0, m0) = rows[k - 1];
            let (x1, r1, m1) = rows[k];
            let f = (x - x0) / (x1 - x0);
            (r0 + f * (r1 - r0), m0 + f * (m1 - m0))
        }
    }
}

/// Runtime invariant-region monitor settings.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorConfig {
    pub enabled: bool,
    /// Growth constant; defaults to `N - 1 +` the initial weighted mass.
    pub c: Option<f64>,
    /// Initial invariant bound; defaults to the measured
    /// `max(sup w, -inf z)` of the initial cells.
    pub alpha0: Option<f64>,
    /// Allowed slack beyond `alpha0 + C t` before the run aborts.
    pub tol: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            c: None,
            alpha0: None,
            tol: 1e-9,
        }
    }
}

/// Everything a run needs. `h` is always derived from `l`, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Spatial dimension `N >= 2`.
    pub dim: u32,
    /// Cut-off exponent in `[3, 4]`; the density floor is `l^beta`.
    pub beta: f64,
    /// Mesh width in `(0, 1)`.
    pub l: f64,
    pub t_final: f64,
    /// Truncation radius; the tiling is snapped to an odd grid node near it.
    pub l_max: f64,
    pub initial: InitialData,
    pub monitor: MonitorConfig,
    /// Test hooks: the full scheme runs with both enabled.
    pub source_enabled: bool,
    pub cutoff_enabled: bool,
}

impl SchemeConfig {
    pub fn new(dim: u32, l: f64, t_final: f64, l_max: f64, initial: InitialData) -> Self {
        Self {
            dim,
            beta: 3.0,
            l,
            t_final,
            l_max,
            initial,
            monitor: MonitorConfig::default(),
            source_enabled: true,
            cutoff_enabled: true,
        }
    }

    /// Density floor `l^beta`.
    pub fn floor(&self) -> f64 {
        math::powf(self.l, self.beta)
    }

    /// Far-field ghost state `(l^beta, 0)`.
    pub fn ghost(&self) -> State {
        State::new(self.floor(), 0.0)
    }

    /// Number of grid intervals to the truncation edge (odd, so the
    /// even-parity tiling ends exactly on it).
    pub fn grid_intervals(&self) -> usize {
        let raw = libm::round((self.l_max - 1.0) / self.l) as i64;
        let j = if raw % 2 == 0 { raw + 1 } else { raw };
        j.max(5) as usize
    }

    pub fn validate(&self) -> Result<()> {
        use alloc::string::ToString;
        let err = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.dim < 2 {
            return err("dimension N must be >= 2");
        }
        if !(self.beta >= 3.0 && self.beta <= 4.0) {
            return err("beta must lie in [3, 4]");
        }
        if !(self.l > 0.0 && self.l < 1.0) {
            return Err(Error::InvalidMeshWidth { l: self.l });
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return err("final time must be finite and nonnegative");
        }
        if !(self.l_max > 1.0 + 5.0 * self.l) {
            return err("truncation radius must exceed 1 + 5 l");
        }
        if !(self.monitor.tol >= 0.0) {
            return err("monitor tolerance must be nonnegative");
        }
        if let InitialData::Table { rows } = &self.initial {
            if rows.is_empty() {
                return err("empty initial-data table");
            }
            for pair in rows.windows(2) {
                if !(pair[1].0 > pair[0].0) {
                    return err("initial-data table must be strictly increasing in x");
                }
            }
            for (x, rho, m) in rows {
                if !x.is_finite() || !rho.is_finite() || !m.is_finite() {
                    return err("non-finite entry in initial-data table");
                }
                if *rho < 0.0 {
                    return err("negative density in initial-data table");
                }
                if *rho == 0.0 && *m != 0.0 {
                    return err("momentum must vanish where the density vanishes");
                }
            }
        }
        Ok(())
    }
}

/// Space and time mesh widths `(l, h)` with `h = l / (10 (1 + |ln l|))`.
pub fn mesh_params(l: f64) -> Result<(f64, f64)> {
    if !(l > 0.0 && l < 1.0) {
        return Err(Error::InvalidMeshWidth { l });
    }
    Ok((l, l / (10.0 * (1.0 + math::abs(math::ln(l))))))
}

/// Floor the density at `l^beta`; the momentum is untouched. Idempotent.
pub fn apply_cutoff(s: State, l: f64, beta: f64) -> State {
    State::new(math::max(s.vrho, math::powf(l, beta)), s.omega)
}

/// The staggered spatial partition at one time level.
///
/// Geometry is implied by the parity: even tilings are
/// `[1, 1+3l], [1+3l, 1+5l], ...` and odd tilings `[1, 1+2l], [1+2l, 1+4l],
/// ...`, every edge on a grid node `x_j = 1 + j l`.
#[derive(Debug, Clone)]
pub struct CellArray {
    parity: Parity,
    time: f64,
    l: f64,
    states: Vec<State>,
}

impl CellArray {
    pub fn from_parts(parity: Parity, time: f64, l: f64, states: Vec<State>) -> Self {
        Self {
            parity,
            time,
            l,
            states,
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> State {
        self.states[i]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Grid node `x_j = 1 + j l`.
    pub fn node(l: f64, j: usize) -> f64 {
        1.0 + j as f64 * l
    }

    pub fn cell_bounds(parity: Parity, l: f64, i: usize) -> (f64, f64) {
        match parity {
            Parity::Even => {
                if i == 0 {
                    (Self::node(l, 0), Self::node(l, 3))
                } else {
                    (Self::node(l, 2 * i + 1), Self::node(l, 2 * i + 3))
                }
            }
            Parity::Odd => (Self::node(l, 2 * i), Self::node(l, 2 * i + 2)),
        }
    }

    pub fn bounds(&self, i: usize) -> (f64, f64) {
        Self::cell_bounds(self.parity, self.l, i)
    }

    pub fn width(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds(i);
        hi - lo
    }

    pub fn center(&self, i: usize) -> f64 {
        let (lo, hi) = self.bounds(i);
        0.5 * (lo + hi)
    }

    pub fn right_edge(&self) -> f64 {
        self.bounds(self.len() - 1).1
    }

    /// `integral of vrho` over the tiling.
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.state(i).vrho * self.width(i);
        }
        acc
    }

    /// Largest `|u| + 1` over the cells; `None` if any cell is at vacuum.
    pub fn max_abs_eigenvalue(&self) -> Option<f64> {
        let mut m = 0.0;
        for s in &self.states {
            if !(s.vrho > 0.0) {
                return None;
            }
            m = math::max(m, math::abs(s.omega / s.vrho) + 1.0);
        }
        Some(m)
    }

    /// `(sup w, inf z)` over the cells; needs positive densities.
    pub fn invariant_range(&self) -> Result<(f64, f64)> {
        let mut sup_w = f64::NEG_INFINITY;
        let mut inf_z = f64::INFINITY;
        for s in &self.states {
            let inv = s.riemann_invariants()?;
            sup_w = math::max(sup_w, inv.w);
            inf_z = math::min(inf_z, inv.z);
        }
        Ok((sup_w, inf_z))
    }
}

/// CFL predicate: every characteristic speed of the cell data is below
/// `l/h`. The run must abort, not warn, when this fails.
pub fn cfl_check(cells: &CellArray, l: f64, h: f64) -> bool {
    match cells.max_abs_eigenvalue() {
        Some(m) => m < l / h,
        None => false,
    }
}

/// Initial tiling: weighted data, far-field cut-off at `x >= 1/l`, floor at
/// `l^beta`, then 16-point Gauss-Legendre cell averages on the even tiling.
pub fn init_cells(config: &SchemeConfig) -> Result<CellArray> {
    use alloc::string::ToString;
    config.validate()?;
    let l = config.l;
    let floor = config.floor();
    let far = 1.0 / l;
    let j = config.grid_intervals();
    let n_cells = (j - 1) / 2;

    let mut states = Vec::with_capacity(n_cells);
    for i in 0..n_cells {
        let (lo, hi) = CellArray::cell_bounds(Parity::Even, l, i);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = (0.0, 0.0);
        let eval = |x: f64| -> Result<(f64, f64)> {
            if x >= far {
                return Ok((floor, 0.0));
            }
            let rho = config.initial.rho0(x, config.dim);
            let m = config.initial.m0(x, config.dim);
            if !rho.is_finite() || !m.is_finite() {
                return Err(Error::InvalidConfig("non-finite initial data".to_string()));
            }
            if rho < 0.0 {
                return Err(Error::InvalidConfig("negative initial density".to_string()));
            }
            if rho == 0.0 && m != 0.0 {
                return Err(Error::InvalidConfig(
                    "initial momentum must vanish where the density vanishes".to_string(),
                ));
            }
            let scale = math::powi(x, config.dim - 1);
            Ok((math::max(scale * rho, floor), scale * m))
        };
        for q in 0..8 {
            let (xm, xp) = (mid + half * GL16_X[q], mid - half * GL16_X[q]);
            let (am, bm) = eval(xm)?;
            let (ap, bp) = eval(xp)?;
            acc.0 += GL16_W[q] * (am + ap);
            acc.1 += GL16_W[q] * (bm + bp);
        }
        // Quadrature weights sum to 2, so the average is acc / 2; re-floor to
        // absorb the last-ulp quadrature error on constant floor regions.
        let s = State::new(math::max(0.5 * acc.0, floor), 0.5 * acc.1);
        states.push(s);
    }
    Ok(CellArray::from_parts(Parity::Even, 0.0, l, states))
}

const GL16_X: [f64; 8] = [
    -0.989_400_934_991_649_932_6,
    -0.944_575_023_073_232_576_1,
    -0.865_631_202_387_831_743_9,
    -0.755_404_408_355_003_033_9,
    -0.617_876_244_402_643_748_4,
    -0.458_016_777_657_227_386_3,
    -0.281_603_550_779_258_913_2,
    -0.095_012_509_837_637_440_2,
];
const GL16_W: [f64; 8] = [
    0.027_152_459_411_754_094_85,
    0.062_253_523_938_647_892_86,
    0.095_158_511_682_492_784_81,
    0.124_628_971_255_533_872_1,
    0.149_595_988_816_576_732_1,
    0.169_156_519_395_002_538_2,
    0.182_603_415_044_923_588_9,
    0.189_450_610_455_068_496_3,
];

/// One Riemann fan of a time strip together with its averaging box and the
/// index of the new cell the box belongs to.
#[derive(Debug, Clone)]
pub struct StripFan {
    pub fan: WaveFan,
    pub lo: f64,
    pub hi: f64,
    pub cell: usize,
}

/// All fans of the strip starting at `cells.time()`: the wall fan first,
/// then one fan per interface in ascending order. On even strips this
/// includes the fan at the truncation edge against the ghost state. The
/// boxes of the fans assigned to one new cell partition that cell.
pub fn strip_fans(
    cells: &CellArray,
    config: &SchemeConfig,
    step_index: usize,
) -> Result<Vec<StripFan>> {
    let l = cells.l();
    let (_, h) = mesh_params(l)?;
    let limit = l / h;
    let t0 = cells.time();
    let k = cells.len();
    let mut fans = Vec::with_capacity(k + 2);

    let guard = |fan: &WaveFan| -> Result<()> {
        if fan.max_abs_eigenvalue() < limit {
            Ok(())
        } else {
            Err(Error::CflViolation {
                step: step_index,
                max_speed: fan.max_abs_eigenvalue(),
                limit,
            })
        }
    };

    let wall = riemann::solve_boundary_riemann(cells.state(0))?.at_origin(1.0, t0);
    guard(&wall)?;
    match cells.parity() {
        Parity::Even => {
            fans.push(StripFan {
                fan: wall,
                lo: CellArray::node(l, 0),
                hi: CellArray::node(l, 2),
                cell: 0,
            });
            // Interfaces at odd nodes x_3, x_5, ..., then the truncation edge.
            for i in 0..k {
                let (left, right, node_index) = if i + 1 < k {
                    (cells.state(i), cells.state(i + 1), 2 * i + 3)
                } else {
                    (cells.state(i), config.ghost(), 2 * i + 3)
                };
                let node = CellArray::node(l, node_index);
                let fan = riemann::solve_riemann(left, right)?.at_origin(node, t0);
                guard(&fan)?;
                fans.push(StripFan {
                    fan,
                    lo: CellArray::node(l, node_index - 1),
                    hi: CellArray::node(l, node_index + 1),
                    cell: i + 1,
                });
            }
        }
        Parity::Odd => {
            fans.push(StripFan {
                fan: wall,
                lo: CellArray::node(l, 0),
                hi: CellArray::node(l, 1),
                cell: 0,
            });
            // Interfaces at even nodes x_2, x_4, ..., x_{J-1}; the interface
            // at the outer edge x_{J+1} cannot influence the new tiling.
            for i in 0..k - 1 {
                let node_index = 2 * i + 2;
                let node = CellArray::node(l, node_index);
                let fan =
                    riemann::solve_riemann(cells.state(i), cells.state(i + 1))?.at_origin(node, t0);
                guard(&fan)?;
                fans.push(StripFan {
                    fan,
                    lo: CellArray::node(l, node_index - 1),
                    hi: CellArray::node(l, node_index + 1),
                    cell: if i == 0 { 0 } else { i },
                });
            }
        }
    }
    Ok(fans)
}

/// Exact averages of the evolved strip solution on the new tiling, from the
/// fans' divergence-theorem averages over their boxes.
pub fn evolved_averages(cells: &CellArray, fans: &[StripFan], h: f64) -> Result<Vec<State>> {
    let l = cells.l();
    let new_parity = cells.parity().flip();
    let n_new = match cells.parity() {
        Parity::Even => cells.len() + 1,
        Parity::Odd => cells.len() - 1,
    };
    #[derive(Clone, Copy, PartialEq)]
    enum Boxes {
        Empty,
        Uniform(State),
        Mixed,
    }
    let mut integral = vec![(0.0, 0.0); n_new];
    let mut boxes = vec![Boxes::Empty; n_new];
    for sf in fans {
        let avg = riemann::cell_average(&sf.fan, sf.lo, sf.hi, h)?;
        let w = sf.hi - sf.lo;
        integral[sf.cell].0 += w * avg.vrho;
        integral[sf.cell].1 += w * avg.omega;
        boxes[sf.cell] = match boxes[sf.cell] {
            Boxes::Empty => Boxes::Uniform(avg),
            Boxes::Uniform(v) if v == avg => Boxes::Uniform(avg),
            _ => Boxes::Mixed,
        };
    }
    Ok((0..n_new)
        .map(|i| {
            // Cells covered by boxes of one common value take it bitwise;
            // constant regions then stay exactly constant through the step.
            if let Boxes::Uniform(v) = boxes[i] {
                return v;
            }
            let (lo, hi) = CellArray::cell_bounds(new_parity, l, i);
            State::new(integral[i].0 / (hi - lo), integral[i].1 / (hi - lo))
        })
        .collect())
}

/// Per-step bookkeeping, enough to audit conservation exactly.
#[derive(Debug, Clone)]
pub struct StepLedger {
    pub time_after: f64,
    /// Largest `|u| + 1` over all fan states of the strip.
    pub max_abs_speed: f64,
    /// `l/h`.
    pub cfl_limit: f64,
    /// Wall trace (the state at `x = 1`); its velocity is exactly zero.
    pub wall_trace: State,
    pub wall_flux: (f64, f64),
    /// State along the outer edge of the strip.
    pub right_edge_state: State,
    pub right_flux: (f64, f64),
    /// `+- l *` edge state: the tiling gains a ghost strip on even steps and
    /// sheds one on odd steps.
    pub strip_term: (f64, f64),
    /// Integral of the fractional source increment.
    pub source_total: (f64, f64),
    /// Mass injected by the density floor.
    pub cutoff_injected: f64,
    /// `integral of vrho` after the step.
    pub mass_after: f64,
    pub sup_w: f64,
    pub inf_z: f64,
}

/// One time step of size `h`. Returns the new staggered cell averages and
/// the step ledger.
pub fn step(
    cells: &CellArray,
    config: &SchemeConfig,
    step_index: usize,
) -> Result<(CellArray, StepLedger)> {
    let l = cells.l();
    let (_, h) = mesh_params(l)?;
    if !cfl_check(cells, l, h) {
        return Err(Error::CflViolation {
            step: step_index,
            max_speed: cells.max_abs_eigenvalue().unwrap_or(f64::INFINITY),
            limit: l / h,
        });
    }

    let fans = strip_fans(cells, config, step_index)?;
    let max_abs_speed = fans
        .iter()
        .map(|f| f.fan.max_abs_eigenvalue())
        .fold(0.0, math::max);

    let new_parity = cells.parity().flip();
    let mut states = evolved_averages(cells, &fans, h)?;

    // Ledger: wall and outer-edge fluxes of the strip, and the ghost strip
    // the tiling gained or shed.
    let wall_trace = fans[0].fan.sample(0.0)?;
    let wall_flux = wall_trace.flux()?;
    let (right_edge_state, strip_sign) = match cells.parity() {
        Parity::Even => (config.ghost(), 1.0),
        Parity::Odd => (cells.state(cells.len() - 1), -1.0),
    };
    let right_flux = right_edge_state.flux()?;
    let strip_term = (
        strip_sign * l * right_edge_state.vrho,
        strip_sign * l * right_edge_state.omega,
    );

    let time_after = cells.time() + h;
    let mut source_total = (0.0, 0.0);
    if config.source_enabled {
        let pre = CellArray::from_parts(new_parity, time_after, l, states.clone());
        let prefix = gravity::prefix_mass(&pre);
        for (i, s) in states.iter_mut().enumerate() {
            let x = pre.center(i);
            let (_, g2) = gravity::source_term(*s, x, prefix.at(x), config.dim)?;
            s.omega += h * g2;
            source_total.1 += pre.width(i) * h * g2;
        }
    }

    let mut cutoff_injected = 0.0;
    if config.cutoff_enabled {
        let floor = config.floor();
        for (i, s) in states.iter_mut().enumerate() {
            if s.vrho < floor {
                let (lo, hi) = CellArray::cell_bounds(new_parity, l, i);
                cutoff_injected += (hi - lo) * (floor - s.vrho);
                s.vrho = floor;
            }
        }
    }

    let new_cells = CellArray::from_parts(new_parity, time_after, l, states);
    let (sup_w, inf_z) = new_cells.invariant_range().unwrap_or((f64::NAN, f64::NAN));
    let ledger = StepLedger {
        time_after,
        max_abs_speed,
        cfl_limit: l / h,
        wall_trace,
        wall_flux,
        right_edge_state,
        right_flux,
        strip_term,
        source_total,
        cutoff_injected,
        mass_after: new_cells.mass(),
        sup_w,
        inf_z,
    };
    Ok((new_cells, ledger))
}

/// A completed run: the cell averages of every step (index 0 is the initial
/// tiling) plus the per-step ledgers. Sub-cell fan detail is recomputed on
/// demand from the stored averages; it is a pure function of them.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SchemeConfig,
    pub h: f64,
    pub alpha0: f64,
    pub monitor_c: f64,
    pub steps: Vec<CellArray>,
    pub ledgers: Vec<StepLedger>,
}

impl Trajectory {
    pub fn n_steps(&self) -> usize {
        self.ledgers.len()
    }

    pub fn final_cells(&self) -> &CellArray {
        &self.steps[self.steps.len() - 1]
    }

    /// First stored tiling with time `>= t` (the final one if `t` is past
    /// the end).
    pub fn snapshot_at(&self, t: f64) -> &CellArray {
        for s in &self.steps {
            if s.time() >= t - 1e-12 {
                return s;
            }
        }
        self.final_cells()
    }
}

/// Run the scheme until the last step time `<= t_final`, invoking the
/// observer after every step.
pub fn run_with(
    config: &SchemeConfig,
    mut observer: impl FnMut(usize, &CellArray, &StepLedger),
) -> Result<Trajectory> {
    let init = init_cells(config)?;
    let (_, h) = mesh_params(config.l)?;

    let (sup_w0, inf_z0) = init.invariant_range()?;
    let alpha0 = match config.monitor.alpha0 {
        Some(a) => a,
        None => math::max(sup_w0, -inf_z0),
    };
    let monitor_c = match config.monitor.c {
        Some(c) => c,
        None => (config.dim - 1) as f64 + init.mass(),
    };

    let n_steps = libm::floor(config.t_final / h + 1e-9) as usize;
    let mut steps = Vec::with_capacity(n_steps + 1);
    let mut ledgers = Vec::with_capacity(n_steps);
    steps.push(init);

    for i in 0..n_steps {
        let (next, ledger) = step(&steps[i], config, i)?;
        if config.monitor.enabled {
            let bound = alpha0 + monitor_c * next.time();
            if ledger.sup_w > bound + config.monitor.tol
                || ledger.inf_z < -bound - config.monitor.tol
                || ledger.sup_w.is_nan()
            {
                return Err(Error::MonitorViolation {
                    step: i,
                    time: next.time(),
                    sup_w: ledger.sup_w,
                    inf_z: ledger.inf_z,
                    bound,
                });
            }
        }
        observer(i, &next, &ledger);
        steps.push(next);
        ledgers.push(ledger);
    }

    Ok(Trajectory {
        config: config.clone(),
        h,
        alpha0,
        monitor_c,
        steps,
        ledgers,
    })
}

/// [`run_with`] without an observer.
pub fn run(config: &SchemeConfig) -> Result<Trajectory> {
    run_with(config, |_, _, _| {})
}
