//! Gibbs states of the reduced Hamiltonian.

use crate::error::{Error, Result};
use crate::model::{analytic_eigensystem, analytic_energies, ModelParams};
use crate::numerics::{c, Operator4, Vector, Vector4, ZERO};

/// Gibbs state at temperature `T` (`k_B = 1`).
#[derive(Clone, Copy, Debug)]
pub struct ThermalState {
    pub rho: Operator4,
    /// `ln Z`; kept in log form because `Z` overflows for `T` near zero.
    pub log_z: f64,
    pub temperature: f64,
    /// Boltzmann populations of `E_1..E_4`.
    pub populations: [f64; 4],
}

impl ThermalState {
    pub fn partition(&self) -> f64 {
        self.log_z.exp()
    }
}

/// `ln(exp(a) + exp(b))`
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln cosh x` without overflow.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln Z` from `Z = 2 e^{-J/4T} cosh(gamma_e B_z / T) + 2 e^{J/4T} cosh(sqrt(J_eff) / 2T)`.
pub fn log_partition_closed_form(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    let t = p.temperature;
    let d = p.derived();
    let ln2 = std::f64::consts::LN_2;
    let outer = ln2 - p.j / (4.0 * t) + ln_cosh(p.zeeman() / t);
    let inner = ln2 + p.j / (4.0 * t) + ln_cosh(d.sqrt_jeff / (2.0 * t));
    Ok(log_add_exp(outer, inner))
}

/// The same closed form evaluated literally; overflows for small `T`.
pub fn partition_closed_form(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    let t = p.temperature;
    let d = p.derived();
    Ok(2.0 * (-p.j / (4.0 * t)).exp() * (p.zeeman() / t).cosh()
        + 2.0 * (p.j / (4.0 * t)).exp() * (d.sqrt_jeff / (2.0 * t)).cosh())
}

/// Gibbs state assembled from the analytic spectrum.
///
/// The central block uses the closed-form projectors
/// `(1 -/+ K/w)/2`, `K/w = [[-dbzeff, J(1+i beta0)], [J(1-i beta0), dbzeff]] / sqrt(J_eff)`,
/// which equal `|psi_2><psi_2|` and `|psi_3><psi_3|`. Weights are shifted by
/// the lowest energy before exponentiating.
pub fn thermal_state(p: &ModelParams) -> Result<ThermalState> {
    p.validate_thermal()?;
    let t = p.temperature;
    let energies = analytic_energies(p);
    let lowest = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights = energies.map(|e| (-(e - lowest) / t).exp());
    let total: f64 = weights.iter().sum();
    let populations = weights.map(|w| w / total);
    let log_z = total.ln() - lowest / t;

    let d = p.derived();
    let s = d.sqrt_jeff;
    let [p1, p2, p3, p4] = populations;
    let mut rho = Operator4::zeros();
    rho.0[0][0] = c(p1, 0.0);
    rho.0[3][3] = c(p4, 0.0);
    if s > 0.0 {
        let z_ratio = d.dbzeff / s;
        let hop = c(p.j / s, p.j * p.beta0 / s);
        rho.0[1][1] = c(0.5 * (p2 * (1.0 + z_ratio) + p3 * (1.0 - z_ratio)), 0.0);
        rho.0[2][2] = c(0.5 * (p2 * (1.0 - z_ratio) + p3 * (1.0 + z_ratio)), 0.0);
        let off = hop * (0.5 * (p3 - p2));
        rho.0[1][2] = off;
        rho.0[2][1] = off.conj();
    } else {
        rho.0[1][1] = c(0.5 * (p2 + p3), 0.0);
        rho.0[2][2] = c(0.5 * (p2 + p3), 0.0);
    }
    Ok(ThermalState { rho, log_z, temperature: t, populations })
}

/// Closed-form thermal matrix for `beta0 = 0`, `B_z = 0`:
/// corners `1/Z_0`, central block
/// `e^{J/2T} [[cosh th + dbzeff sinh th / sqrt(J_eff), -J sinh th / sqrt(J_eff)], [.., cosh th - dbzeff sinh th / sqrt(J_eff)]] / Z_0`
/// with `Z_0 = 2 + 2 e^{J/2T} cosh th`, `th = sqrt(J_eff)/2T`.
pub fn thermal_state_no_dm(p: &ModelParams) -> Result<ThermalState> {
    p.validate_thermal()?;
    if p.beta0 != 0.0 {
        return Err(Error::OutOfDomain(format!("beta0 must be 0, got {}", p.beta0)));
    }
    if p.bz != 0.0 {
        return Err(Error::OutOfDomain(format!("Bz must be 0, got {}", p.bz)));
    }
    let t = p.temperature;
    let d = p.derived();
    let s = d.sqrt_jeff;
    let theta = s / (2.0 * t);
    let half_j = p.j / (2.0 * t);
    // everything scaled by exp(-shift)
    let shift = 0.0_f64.max(half_j + theta);
    let corner = (-shift).exp();
    let e_plus = (half_j + theta - shift).exp();
    let e_minus = (half_j - theta - shift).exp();
    let cosh_part = 0.5 * (e_plus + e_minus);
    let sinh_part = 0.5 * (e_plus - e_minus);
    let z0 = 2.0 * corner + 2.0 * cosh_part;

    let (z_ratio, j_ratio) = if s > 0.0 { (d.dbzeff / s, p.j / s) } else { (0.0, 0.0) };
    let mut rho = Operator4::zeros();
    rho.0[0][0] = c(corner / z0, 0.0);
    rho.0[3][3] = c(corner / z0, 0.0);
    rho.0[1][1] = c((cosh_part + z_ratio * sinh_part) / z0, 0.0);
    rho.0[2][2] = c((cosh_part - z_ratio * sinh_part) / z0, 0.0);
    let off = c(-j_ratio * sinh_part / z0, 0.0);
    rho.0[1][2] = off;
    rho.0[2][1] = off;

    let log_z = (z0.ln() + shift) - p.j / (4.0 * t);
    let energies = analytic_energies(p);
    let populations = energies.map(|e| (-e / t - log_z).exp());
    Ok(ThermalState { rho, log_z, temperature: t, populations })
}

/// Ground state at `T = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroundState {
    Unique {
        state: Vector4,
        energy: f64,
    },
    /// Every eigenvector within `1e-12` of the lowest level.
    Degenerate {
        states: Vec<Vector4>,
        energy: f64,
    },
}

impl GroundState {
    pub fn state(&self) -> Option<&Vector4> {
        match self {
            GroundState::Unique { state, .. } => Some(state),
            GroundState::Degenerate { .. } => None,
        }
    }
}

const DEGENERACY_GAP: f64 = 1e-12;

pub fn zero_temperature_state(p: &ModelParams) -> Result<GroundState> {
    let sys = analytic_eigensystem(p)?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| sys.energies[a].total_cmp(&sys.energies[b]));
    let energy = sys.energies[order[0]];
    let ground: Vec<Vector4> =
        order.iter().filter(|&&l| sys.energies[l] - energy <= DEGENERACY_GAP).map(|&l| sys.states[l]).collect();
    if ground.len() == 1 {
        Ok(GroundState::Unique { state: ground[0], energy })
    } else {
        Ok(GroundState::Degenerate { states: ground, energy })
    }
}

/// The central-block ground state written out explicitly:
/// `(sqrt(J_eff) + dbzeff) lambda (beta0 - i) / J(1+beta0^2) |10> + lambda i |01>`
/// with `lambda = sqrt((1 - dbzeff/sqrt(J_eff))/2)`. `None` when `J = 0`.
pub fn ground_state_closed_form(p: &ModelParams) -> Option<Vector4> {
    if p.j == 0.0 {
        return None;
    }
    let d = p.derived();
    let s = d.sqrt_jeff;
    let lambda = (0.5 * (1.0 - d.dbzeff / s)).sqrt();
    let amp10 = c(p.beta0, -1.0) * ((s + d.dbzeff) * lambda / (p.j * (1.0 + p.beta0 * p.beta0)));
    let amp01 = c(0.0, lambda);
    Some(Vector([ZERO, amp10, amp01, ZERO]))
}
