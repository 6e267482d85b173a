//! State variables for isothermal flow in spherical symmetry.
//!
//! Physical states carry density and radial momentum `(rho, m)`. The scheme
//! works in weighted variables `vrho = x^(N-1) rho`, `omega = x^(N-1) m`,
//! which absorb the geometric part of the divergence. With pressure `p = rho`
//! the sound speed is 1 and the Riemann invariants take the log form
//! `w = u + ln(vrho)`, `z = u - ln(vrho)` with `u = omega / vrho`.

use crate::error::{Error, Result};
use crate::math;

/// Density and radial momentum at a point, in physical variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalState {
    /// Mass density, `>= 0`.
    pub rho: f64,
    /// Radial momentum density (signed).
    pub m: f64,
}

/// Weighted state `(x^(N-1) rho, x^(N-1) m)` — the scheme's working variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// Weighted density, `>= 0`.
    pub vrho: f64,
    /// Weighted momentum (signed).
    pub omega: f64,
}

/// Riemann invariants of a state with positive density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    /// `u + ln(vrho)`, constant across 1-rarefactions.
    pub w: f64,
    /// `u - ln(vrho)`, constant across 2-rarefactions.
    pub z: f64,
}

/// Invariant region `{ w <= w_max, z >= z_min }` in state space.
///
/// Riemann solutions and interval averaging cannot leave such a region, which
/// is what makes it usable as a runtime monitor. Both bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTheta {
    pub w_max: f64,
    pub z_min: f64,
}

fn check_radius(x: f64) -> Result<()> {
    if !(x >= 1.0) {
        return Err(Error::RadiusBelowWall { x });
    }
    Ok(())
}

impl PhysicalState {
    pub fn new(rho: f64, m: f64) -> Self {
        Self { rho, m }
    }

    /// Weighted variables at radius `x >= 1` in dimension `dim >= 2`.
    pub fn to_weighted(self, x: f64, dim: u32) -> Result<State> {
        check_radius(x)?;
        let scale = math::powi(x, dim - 1);
        Ok(State::new(scale * self.rho, scale * self.m))
    }
}

impl State {
    pub fn new(vrho: f64, omega: f64) -> Self {
        Self { vrho, omega }
    }

    /// Physical variables at radius `x >= 1`. Exact inverse of
    /// [`PhysicalState::to_weighted`] at fixed `(x, dim)`.
    pub fn to_physical(self, x: f64, dim: u32) -> Result<PhysicalState> {
        check_radius(x)?;
        let scale = math::powi(x, dim - 1);
        Ok(PhysicalState::new(self.vrho / scale, self.omega / scale))
    }

    /// Velocity `u = omega / vrho`. Undefined at vacuum: querying it there is
    /// an error, not a silent zero.
    pub fn velocity(self) -> Result<f64> {
        self.require_positive()?;
        Ok(self.omega / self.vrho)
    }

    /// Riemann invariants `(w, z)`; needs `vrho > 0`.
    pub fn riemann_invariants(self) -> Result<Invariants> {
        self.require_positive()?;
        let u = self.omega / self.vrho;
        let log_vrho = math::ln(self.vrho);
        Ok(Invariants {
            w: u + log_vrho,
            z: u - log_vrho,
        })
    }

    /// Characteristic speeds `(u - 1, u + 1)`; needs `vrho > 0`.
    pub fn eigenvalues(self) -> Result<(f64, f64)> {
        let u = self.velocity()?;
        Ok((u - 1.0, u + 1.0))
    }

    /// Flux `(omega, omega^2 / vrho + vrho)` of the homogeneous system.
    pub fn flux(self) -> Result<(f64, f64)> {
        self.require_positive()?;
        Ok((self.omega, self.omega * self.omega / self.vrho + self.vrho))
    }

    /// Membership in `theta`; errors at vacuum (vacuum has no invariants).
    pub fn in_region(self, theta: RegionTheta) -> Result<bool> {
        let inv = self.riemann_invariants()?;
        Ok(inv.w <= theta.w_max && inv.z >= theta.z_min)
    }

    pub(crate) fn require_positive(self) -> Result<()> {
        if !(self.vrho > 0.0) {
            return Err(Error::NonpositiveDensity { vrho: self.vrho });
        }
        if !self.vrho.is_finite() || !self.omega.is_finite() {
            return Err(Error::NonfiniteInput);
        }
        Ok(())
    }
}

impl Invariants {
    /// The unique state with these invariants:
    /// `vrho = exp((w - z)/2)`, `omega = vrho (w + z)/2`.
    pub fn to_state(self) -> State {
        let vrho = math::exp(0.5 * (self.w - self.z));
        let omega = vrho * 0.5 * (self.w + self.z);
        State::new(vrho, omega)
    }
}

impl RegionTheta {
    pub fn new(w_max: f64, z_min: f64) -> Self {
        Self { w_max, z_min }
    }

    /// Smallest region containing every listed state.
    pub fn hull(states: &[State]) -> Result<Self> {
        let mut w_max = f64::NEG_INFINITY;
        let mut z_min = f64::INFINITY;
        for s in states {
            let inv = s.riemann_invariants()?;
            w_max = math::max(w_max, inv.w);
            z_min = math::min(z_min, inv.z);
        }
        Ok(Self { w_max, z_min })
    }

    /// The region enlarged by `tol` on both sides.
    pub fn expanded(self, tol: f64) -> Self {
        Self {
            w_max: self.w_max + tol,
            z_min: self.z_min - tol,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighting_at_the_wall_is_identity() {
        let p = PhysicalState::new(0.7, -0.2);
        let s = p.to_weighted(1.0, 3).unwrap();
        assert_eq!(s, State::new(0.7, -0.2));
        assert_eq!(s.to_physical(1.0, 3).unwrap(), p);
    }

    #[test]
    fn weighting_scales_by_radius_power() {
        let s = PhysicalState::new(2.0, 1.0).to_weighted(2.0, 3).unwrap();
        assert_eq!(s, State::new(8.0, 4.0));
        let back = State::new(8.0, 4.0).to_physical(2.0, 3).unwrap();
        assert_eq!(back, PhysicalState::new(2.0, 1.0));
    }

    #[test]
    fn weighting_rejects_radius_below_wall() {
        assert!(PhysicalState::new(1.0, 0.0).to_weighted(0.5, 3).is_err());
        assert!(State::new(1.0, 0.0).to_physical(0.99, 2).is_err());
    }

    #[test]
    fn weighted_round_trip_is_exact_to_machine_precision() {
        let mut rng = crate::quad::SplitMix64::new(0x5eed);
        for _ in 0..1000 {
            let p = PhysicalState::new(10.0 * rng.next_f64(), 4.0 * rng.next_f64() - 2.0);
            let x = 1.0 + 9.0 * rng.next_f64();
            for dim in [2u32, 3, 4] {
                let q = p.to_weighted(x, dim).unwrap().to_physical(x, dim).unwrap();
                assert!((q.rho - p.rho).abs() <= 1e-14 * (1.0 + p.rho.abs()));
                assert!((q.m - p.m).abs() <= 1e-14 * (1.0 + p.m.abs()));
            }
        }
    }

    #[test]
    fn invariants_of_reference_states() {
        let inv = State::new(1.0, 0.0).riemann_invariants().unwrap();
        assert_eq!((inv.w, inv.z), (0.0, 0.0));

        let e = core::f64::consts::E;
        let inv = State::new(e, e).riemann_invariants().unwrap();
        assert!((inv.w - 2.0).abs() < 1e-15);
        assert!(inv.z.abs() < 1e-15);
    }

    #[test]
    fn invariants_round_trip() {
        let mut rng = crate::quad::SplitMix64::new(42);
        for _ in 0..1000 {
            // vrho in [1e-6, 10], u in [-5, 5]
            let vrho =
                math::exp(math::ln(1e-6) + rng.next_f64() * (math::ln(10.0) - math::ln(1e-6)));
            let u = 10.0 * rng.next_f64() - 5.0;
            let s = State::new(vrho, u * vrho);
            let back = s.riemann_invariants().unwrap().to_state();
            assert!((back.vrho - s.vrho).abs() <= 1e-12 * s.vrho.abs());
            assert!((back.omega - s.omega).abs() <= 1e-12 * (1.0 + s.omega.abs()));
        }
    }

    #[test]
    fn invariants_reject_vacuum() {
        assert!(State::new(0.0, 0.0).riemann_invariants().is_err());
        assert!(State::new(-1.0, 0.0).eigenvalues().is_err());
    }

    #[test]
    fn from_invariants_reference_values() {
        let s = Invariants { w: 0.0, z: 0.0 }.to_state();
        assert_eq!(s, State::new(1.0, 0.0));

        let s = Invariants { w: 2.0, z: 0.0 }.to_state();
        let e = core::f64::consts::E;
        assert!((s.vrho - e).abs() < 1e-15);
        assert!((s.omega - e).abs() < 1e-15);

        // w = z forces vrho = 1, omega = w.
        let s = Invariants { w: 1.75, z: 1.75 }.to_state();
        assert_eq!(s, State::new(1.0, 1.75));
    }

    #[test]
    fn eigenvalue_gap_is_two() {
        let mut rng = crate::quad::SplitMix64::new(7);
        for _ in 0..200 {
            let s = State::new(rng.next_f64() + 1e-6, 10.0 * rng.next_f64() - 5.0);
            let (l1, l2) = s.eigenvalues().unwrap();
            // The unit sound speed makes the gap 2, up to one rounding of
            // u +- 1 on each side.
            assert!((l2 - l1 - 2.0).abs() <= 1e-15);
        }
        let (l1, l2) = State::new(1.0, 0.0).eigenvalues().unwrap();
        assert_eq!((l1, l2), (-1.0, 1.0));
        let (l1, l2) = State::new(1.0, 2.0).eigenvalues().unwrap();
        assert_eq!((l1, l2), (1.0, 3.0));
    }

    #[test]
    fn region_membership_is_inclusive_and_monotone() {
        let s = State::new(1.0, 0.0);
        assert!(s.in_region(RegionTheta::new(0.0, 0.0)).unwrap());

        let e = core::f64::consts::E;
        let fast = State::new(e, e); // w = 2
        assert!(!fast.in_region(RegionTheta::new(1.0, -1.0)).unwrap());

        let mut rng = crate::quad::SplitMix64::new(11);
        for _ in 0..500 {
            let s = State::new(rng.next_f64() + 1e-3, 4.0 * rng.next_f64() - 2.0);
            let theta = RegionTheta::hull(&[s]).unwrap();
            assert!(s.in_region(theta).unwrap());
            // Shrinking the region never admits an excluded state.
            let tighter = RegionTheta::new(theta.w_max - 0.1, theta.z_min + 0.1);
            let loose = s.in_region(theta).unwrap();
            let tight = s.in_region(tighter).unwrap();
            assert!(loose || !tight);
        }
    }
}
