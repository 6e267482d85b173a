//! The nonlocal geometric + self-gravity source.
//!
//! In weighted variables the momentum equation picks up
//! `g2 = (N-1)/x * vrho - vrho / x^(N-1) * integral(vrho, 1..x)`; the density
//! equation has no source, which is what keeps the fractional step exactly
//! mass-conservative. The integral is taken over the piecewise-constant
//! cell-average density.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::scheme::CellArray;
use crate::state::State;

/// Cumulative integral of the cell-average density from the wall:
/// `cumulative[k] = integral of vrho over [1, edges[k]]`.
///
/// Piecewise linear between edges; monotone nondecreasing for nonnegative
/// densities. Queries beyond the last edge extend by the final value.
#[derive(Debug, Clone)]
pub struct MassPrefix {
    edges: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MassPrefix {
    /// Prefix value at radius `x` by linear interpolation inside cells.
    pub fn at(&self, x: f64) -> f64 {
        let edges = &self.edges;
        if x <= edges[0] {
            return 0.0;
        }
        let last = edges.len() - 1;
        if x >= edges[last] {
            return self.cumulative[last];
        }
        // edges is sorted; find the cell containing x.
        let mut i = match edges.binary_search_by(|e| e.partial_cmp(&x).expect("finite edge")) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        if i >= last {
            i = last - 1;
        }
        let frac = (x - edges[i]) / (edges[i + 1] - edges[i]);
        self.cumulative[i] + frac * (self.cumulative[i + 1] - self.cumulative[i])
    }

    /// Integral over the whole tiling.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }
}

/// Exact cumulative integral of the piecewise-constant cell averages.
pub fn prefix_mass(cells: &CellArray) -> MassPrefix {
    let n = cells.len();
    let mut edges = Vec::with_capacity(n + 1);
    let mut cumulative = Vec::with_capacity(n + 1);
    edges.push(1.0);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let (lo, hi) = cells.bounds(i);
        debug_assert!((lo - edges[i]).abs() < 1e-12);
        acc += cells.state(i).vrho * (hi - lo);
        edges.push(hi);
        cumulative.push(acc);
    }
    MassPrefix { edges, cumulative }
}

/// Source increment `g(v) = (0, (N-1)/x vrho - vrho/x^(N-1) prefix)`.
/// The density component is identically zero.
pub fn source_term(s: State, x: f64, prefix_at_x: f64, dim: u32) -> Result<(f64, f64)> {
    if !(x >= 1.0) {
        return Err(Error::RadiusBelowWall { x });
    }
    let n1 = (dim - 1) as f64;
    let g2 = n1 / x * s.vrho - s.vrho / math::powi(x, dim - 1) * prefix_at_x;
    Ok((0.0, g2))
}

/// Gravitational acceleration `Phi_x = -prefix(x) / x^(N-1)`; zero at the
/// wall and nonpositive everywhere for nonnegative density.
pub fn potential_gradient(cells: &CellArray, x: f64, dim: u32) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::RadiusBelowWall { x });
    }
    let prefix = prefix_mass(cells);
    Ok(-prefix.at(x) / math::powi(x, dim - 1))
}

/// Volume of the unit ball in `R^N`: `pi^(N/2) / Gamma(N/2 + 1)`.
pub fn unit_ball_volume(dim: u32) -> f64 {
    let half = dim as f64 / 2.0;
    math::powf(core::f64::consts::PI, half) / math::tgamma(half + 1.0)
}

/// Conserved physical mass `omega_N * integral of vrho`.
pub fn total_mass(cells: &CellArray, dim: u32) -> f64 {
    let mut acc = 0.0;
    for i in 0..cells.len() {
        acc += cells.state(i).vrho * cells.width(i);
    }
    unit_ball_volume(dim) * acc
}
