//! Exact self-similar solutions of the isothermal Riemann problem and of the
//! reflecting-wall problem at `x = 1`, plus exact conservative interval
//! averaging of a wave fan.
//!
//! With `p = rho` the wave curves through a state have closed form. Through a
//! left state `(vrho_l, u_l)`:
//!
//! - 1-rarefaction (`vrho <= vrho_l`): `u = u_l - ln(vrho / vrho_l)`
//! - 1-shock (`vrho > vrho_l`): `u = u_l - (vrho - vrho_l)/sqrt(vrho vrho_l)`,
//!   speed `u_l - sqrt(vrho / vrho_l)`
//!
//! and mirrored through a right state for the 2-family. Both `u` curves are
//! strictly monotone in `vrho`, so the middle state is the unique
//! intersection; we bracket `ln(vrho_m)` and bisect, then polish with two
//! Newton steps.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveFamily {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// One elementary wave of a fan.
///
/// For a shock `speed_lo == speed_hi` is the propagation speed; for a
/// rarefaction the two are the characteristic speeds of its edges.
#[derive(Debug, Clone, Copy)]
pub struct Wave {
    pub family: WaveFamily,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Wave {
    pub fn is_shock(&self) -> bool {
        self.kind == WaveKind::Shock
    }

    /// Absolute density jump across the wave.
    pub fn density_jump(&self) -> f64 {
        math::abs(self.right.vrho - self.left.vrho)
    }
}

/// Self-similar solution of one (boundary) Riemann problem: at most two
/// waves separating three constant states.
///
/// For a wall fan (`is_boundary`), `left` holds the mirror state used in the
/// reflection construction; only rays `xi >= 0` are part of the solution, the
/// 1-wave lives entirely at `xi < 0` and is dropped, and the wall trace is the
/// middle state, whose velocity is exactly zero.
#[derive(Debug, Clone)]
pub struct WaveFan {
    pub left: State,
    pub middle: State,
    pub right: State,
    pub waves: Vec<Wave>,
    pub is_boundary: bool,
    /// Similarity center `(x0, t0)`.
    pub origin: (f64, f64),
}

/// Velocity on the 1-wave curve through `(vrho_l, u_l)` at density `vrho`.
fn curve1_u(vrho_l: f64, u_l: f64, vrho: f64) -> f64 {
    if vrho <= vrho_l {
        u_l - math::ln(vrho / vrho_l)
    } else {
        u_l - (vrho - vrho_l) / math::sqrt(vrho * vrho_l)
    }
}

/// Velocity on the 2-wave curve through `(vrho_r, u_r)` at density `vrho`.
fn curve2_u(vrho_r: f64, u_r: f64, vrho: f64) -> f64 {
    if vrho <= vrho_r {
        u_r + math::ln(vrho / vrho_r)
    } else {
        u_r + (vrho - vrho_r) / math::sqrt(vrho * vrho_r)
    }
}

/// `d(curve1_u)/dy` at `vrho = e^y`; always `<= -1`.
fn curve1_du_dy(vrho_l: f64, vrho: f64) -> f64 {
    if vrho <= vrho_l {
        -1.0
    } else {
        -(vrho + vrho_l) / (2.0 * math::sqrt(vrho * vrho_l))
    }
}

/// `d(curve2_u)/dy` at `vrho = e^y`; always `>= 1`.
fn curve2_du_dy(vrho_r: f64, vrho: f64) -> f64 {
    if vrho <= vrho_r {
        1.0
    } else {
        (vrho + vrho_r) / (2.0 * math::sqrt(vrho * vrho_r))
    }
}

const BRACKET_LO: f64 = -745.0;
const BRACKET_HI: f64 = 100.0;
const BISECT_WIDTH: f64 = 1e-13;

/// Exact two-wave fan for left/right data with positive densities.
pub fn solve_riemann(left: State, right: State) -> Result<WaveFan> {
    left.require_positive()?;
    right.require_positive()?;

    if left == right {
        return Ok(WaveFan {
            left,
            middle: left,
            right,
            waves: Vec::new(),
            is_boundary: false,
            origin: (0.0, 0.0),
        });
    }

    let u_l = left.omega / left.vrho;
    let u_r = right.omega / right.vrho;

    // G(y) = u on 1-curve minus u on 2-curve at vrho = e^y, strictly
    // decreasing with G' <= -2, so the bracketed root is unique.
    let g = |y: f64| {
        let vrho = math::exp(y);
        curve1_u(left.vrho, u_l, vrho) - curve2_u(right.vrho, u_r, vrho)
    };

    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    if !(g(lo) >= 0.0 && g(hi) <= 0.0) {
        return Err(Error::BracketFailure);
    }
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut y = 0.5 * (lo + hi);
    for _ in 0..2 {
        let vrho = math::exp(y);
        let dg = curve1_du_dy(left.vrho, vrho) - curve2_du_dy(right.vrho, vrho);
        let next = y - g(y) / dg;
        if next.is_finite() && (BRACKET_LO..=BRACKET_HI).contains(&next) {
            y = next;
        }
    }

    let vrho_m = math::exp(y);
    // Averaging the two curve values keeps u_m exactly zero for mirror data,
    // which is what pins the wall trace of the reflection construction.
    let u_m = 0.5 * (curve1_u(left.vrho, u_l, vrho_m) + curve2_u(right.vrho, u_r, vrho_m));
    let middle = State::new(vrho_m, vrho_m * u_m);

    let mut waves = Vec::with_capacity(2);
    if middle.vrho > left.vrho {
        let sigma = u_l - math::sqrt(middle.vrho / left.vrho);
        waves.push(Wave {
            family: WaveFamily::One,
            kind: WaveKind::Shock,
            left,
            right: middle,
            speed_lo: sigma,
            speed_hi: sigma,
        });
    } else if middle.vrho < left.vrho {
        waves.push(Wave {
            family: WaveFamily::One,
            kind: WaveKind::Rarefaction,
            left,
            right: middle,
            speed_lo: u_l - 1.0,
            speed_hi: u_m - 1.0,
        });
    }
    if middle.vrho > right.vrho {
        let sigma = u_r + math::sqrt(middle.vrho / right.vrho);
        waves.push(Wave {
            family: WaveFamily::Two,
            kind: WaveKind::Shock,
            left: middle,
            right,
            speed_lo: sigma,
            speed_hi: sigma,
        });
    } else if middle.vrho < right.vrho {
        waves.push(Wave {
            family: WaveFamily::Two,
            kind: WaveKind::Rarefaction,
            left: middle,
            right,
            speed_lo: u_m + 1.0,
            speed_hi: u_r + 1.0,
        });
    }

    Ok(WaveFan {
        left,
        middle,
        right,
        waves,
        is_boundary: false,
        origin: (0.0, 0.0),
    })
}

/// Reflecting-wall problem at `x = 1` with data `right` and wall condition
/// `omega = 0`, solved by mirror symmetry: the interior problem with left
/// state `(vrho, -omega)` restricted to rays `xi >= 0`.
pub fn solve_boundary_riemann(right: State) -> Result<WaveFan> {
    right.require_positive()?;
    let mirror = State::new(right.vrho, -right.omega);
    let fan = solve_riemann(mirror, right)?;
    // The 1-wave of a mirror-symmetric fan propagates strictly into xi < 0.
    let waves: Vec<Wave> = fan
        .waves
        .into_iter()
        .filter(|w| w.family == WaveFamily::Two)
        .collect();
    debug_assert!(waves.iter().all(|w| w.speed_lo > 0.0));
    Ok(WaveFan {
        left: mirror,
        middle: fan.middle,
        right,
        waves,
        is_boundary: true,
        origin: (1.0, 0.0),
    })
}

impl WaveFan {
    /// Rebase the similarity center.
    pub fn at_origin(mut self, x0: f64, t0: f64) -> Self {
        self.origin = (x0, t0);
        self
    }

    /// Constant fan at `state`.
    pub fn constant(state: State) -> Self {
        WaveFan {
            left: state,
            middle: state,
            right: state,
            waves: Vec::new(),
            is_boundary: false,
            origin: (0.0, 0.0),
        }
    }

    /// State on the similarity ray `xi = (x - x0)/(t - t0)`.
    ///
    /// Constant states outside waves; closed form inside rarefactions. A ray
    /// exactly on a shock returns the right limit. Wall fans reject `xi < 0`.
    pub fn sample(&self, xi: f64) -> Result<State> {
        if self.is_boundary && xi < 0.0 {
            return Err(Error::NegativeRay { xi });
        }
        let mut current = if self.is_boundary {
            self.middle
        } else {
            self.left
        };
        for wave in &self.waves {
            if xi < wave.speed_lo {
                return Ok(current);
            }
            match wave.kind {
                WaveKind::Shock => {
                    if xi == wave.speed_lo {
                        return Ok(wave.right);
                    }
                }
                WaveKind::Rarefaction => {
                    if xi <= wave.speed_hi {
                        return Ok(rarefaction_interior(wave, xi));
                    }
                }
            }
            current = wave.right;
        }
        Ok(current)
    }

    /// Largest `|u| + 1` over the fan's corner states; every wave speed is
    /// bounded by it.
    pub fn max_abs_eigenvalue(&self) -> f64 {
        let mut m = 0.0;
        for s in [self.left, self.middle, self.right] {
            m = math::max(m, math::abs(s.omega / s.vrho) + 1.0);
        }
        m
    }

    /// Ray positions where the fan is not smooth, in increasing order.
    fn breakpoints(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(4);
        for w in &self.waves {
            b.push(w.speed_lo);
            if w.speed_hi > w.speed_lo {
                b.push(w.speed_hi);
            }
        }
        b
    }

    /// Integral of `f(x, v(x, t))` over `[a, b]` at elapsed time `t > 0`,
    /// by 16-point Gauss-Legendre on each smooth piece. Exact for piecewise
    /// constant fans up to rounding.
    pub fn integrate_with(
        &self,
        a: f64,
        b: f64,
        t: f64,
        mut f: impl FnMut(f64, State) -> (f64, f64),
    ) -> Result<(f64, f64)> {
        if !(t > 0.0) || !(b > a) {
            return Err(Error::NonfiniteInput);
        }
        let x0 = self.origin.0;
        let mut cuts: Vec<f64> = Vec::with_capacity(6);
        cuts.push(a);
        for s in self.breakpoints() {
            let x = x0 + s * t;
            if x > a && x < b {
                cuts.push(x);
            }
        }
        cuts.push(b);
        cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite cuts"));
        let mut total = (0.0, 0.0);
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            let (mut p0, mut p1) = (0.0, 0.0);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for q in 0..8 {
                for x in [
                    mid + half * crate::quad::GL16_X[q],
                    mid - half * crate::quad::GL16_X[q],
                ] {
                    let s = self.sample((x - x0) / t)?;
                    let (a, b) = f(x, s);
                    p0 += crate::quad::GL16_W[q] * a;
                    p1 += crate::quad::GL16_W[q] * b;
                }
            }
            total.0 += half * p0;
            total.1 += half * p1;
        }
        Ok(total)
    }
}

fn rarefaction_interior(wave: &Wave, xi: f64) -> State {
    match wave.family {
        WaveFamily::One => {
            // w is constant across the wave; u = xi + 1 on the ray.
            let u_left = wave.left.omega / wave.left.vrho;
            let w = u_left + math::ln(wave.left.vrho);
            let u = xi + 1.0;
            let vrho = math::exp(w - u);
            State::new(vrho, vrho * u)
        }
        WaveFamily::Two => {
            let u_right = wave.right.omega / wave.right.vrho;
            let z = u_right - math::ln(wave.right.vrho);
            let u = xi - 1.0;
            let vrho = math::exp(u - z);
            State::new(vrho, vrho * u)
        }
    }
}

/// Average of the fan over `[a, b]` at elapsed time `t > 0`, computed
/// exactly from the divergence theorem: initial-data average minus the net
/// edge flux. Valid when no wave crosses the box edges; errors otherwise.
pub fn cell_average(fan: &WaveFan, a: f64, b: f64, t: f64) -> Result<State> {
    if !(b > a) || !(t > 0.0) {
        return Err(Error::NonfiniteInput);
    }
    let x0 = fan.origin.0;
    if fan.waves.is_empty() {
        // Constant on the relevant side(s) of the origin.
        if fan.is_boundary || x0 <= a {
            return Ok(fan.right);
        }
        if x0 >= b {
            return Ok(fan.left);
        }
        return Ok(fan.right); // left == right for interior constant fans
    }

    let inside = |s: f64| {
        let x = x0 + s * t;
        x > a && x < b
    };
    let all_inside = fan
        .waves
        .iter()
        .all(|w| inside(w.speed_lo) && inside(w.speed_hi));

    if all_inside && (fan.is_boundary && x0 == a || !fan.is_boundary && x0 >= a && x0 <= b) {
        let xi_a = (a - x0) / t;
        let xi_b = (b - x0) / t;
        let edge_a = fan.sample(xi_a)?;
        let edge_b = fan.sample(xi_b)?;
        let fa = edge_a.flux()?;
        let fb = edge_b.flux()?;
        let init = if fan.is_boundary {
            ((b - a) * fan.right.vrho, (b - a) * fan.right.omega)
        } else {
            (
                (x0 - a) * fan.left.vrho + (b - x0) * fan.right.vrho,
                (x0 - a) * fan.left.omega + (b - x0) * fan.right.omega,
            )
        };
        let inv_len = 1.0 / (b - a);
        return Ok(State::new(
            (init.0 - t * (fb.0 - fa.0)) * inv_len,
            (init.1 - t * (fb.1 - fa.1)) * inv_len,
        ));
    }

    // The box may instead sit entirely in one constant region.
    if x0 <= a && fan.waves.iter().all(|w| x0 + w.speed_hi * t <= a) {
        return Ok(fan.right);
    }
    if x0 >= b && fan.waves.iter().all(|w| x0 + w.speed_lo * t >= b) {
        return Ok(if fan.is_boundary {
            fan.middle
        } else {
            fan.left
        });
    }

    Err(Error::WaveLeavesBox)
}

/// Rankine-Hugoniot residual `sigma (v - v0) - (f(v) - f(v0))` with
/// `v0 = left`, `v = right`, componentwise.
pub fn rh_residual(left: State, right: State, sigma: f64) -> Result<(f64, f64)> {
    let fl = left.flux()?;
    let fr = right.flux()?;
    Ok((
        sigma * (right.vrho - left.vrho) - (fr.0 - fl.0),
        sigma * (right.omega - left.omega) - (fr.1 - fl.1),
    ))
}

/// Entropy production `sigma ([eta]) - [q]` of a jump from `left` to `right`
/// for the entropy pair computed by `eta_q`. Nonnegative across admissible
/// shocks for convex pairs.
pub fn entropy_production(
    left: State,
    right: State,
    sigma: f64,
    mut eta_q: impl FnMut(State) -> Result<(f64, f64)>,
) -> Result<f64> {
    left.require_positive()?;
    right.require_positive()?;
    let (eta_l, q_l) = eta_q(left)?;
    let (eta_r, q_r) = eta_q(right)?;
    Ok(sigma * (eta_r - eta_l) - (q_r - q_l))
}

/// Density jump strengths across the fan's shocks, in wave order.
pub fn jump_strengths(fan: &WaveFan) -> Vec<f64> {
    fan.waves
        .iter()
        .filter(|w| w.is_shock())
        .map(|w| w.density_jump())
        .collect()
}

/// Exact squared deviation from the mean, `integral of |g - mean(g)|^2`, for
/// a three-piece constant function with values `(g_l, g_m, g_r)` on segments
/// of lengths `(l1, l2, l3)`.
pub fn three_piece_variance(
    g_l: f64,
    g_m: f64,
    g_r: f64,
    l1: f64,
    l2: f64,
    l3: f64,
) -> Result<f64> {
    if !(l1 >= 0.0 && l2 >= 0.0 && l3 >= 0.0) {
        return Err(Error::NonfiniteInput);
    }
    let l = l1 + l2 + l3;
    if !(l > 0.0) {
        return Err(Error::EmptyInterval);
    }
    let (p1, p2, p3) = (l1 / l, l2 / l, l3 / l);
    Ok(l * (p1 * p3 * (g_r - g_l) * (g_r - g_l)
        + p2 * p3 * (g_r - g_m) * (g_r - g_m)
        + p1 * p2 * (g_m - g_l) * (g_m - g_l)))
}
