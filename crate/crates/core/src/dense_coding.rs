//! Optimal dense coding over the thermal channel.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::{c, density_spectrum, shannon_bits, Operator, Operator2, Operator4, C64, ONE, ZERO};
use crate::thermal::{thermal_state, ThermalState};

/// Phase applied to `|1>` by `U_01` and `U_11`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum EncodingPhase {
    /// Phase `pi`: the Pauli frame `{I, Z, X, XZ}`, mutually orthogonal.
    #[default]
    Orthogonal,
    /// Phase `pi/4` read off the encoding table at face value. Not orthogonal.
    Literal,
    Custom(f64),
}

impl EncodingPhase {
    pub fn angle(self) -> f64 {
        match self {
            EncodingPhase::Orthogonal => PI,
            EncodingPhase::Literal => PI / 4.0,
            EncodingPhase::Custom(phi) => phi,
        }
    }
}

/// `U_00, U_01, U_10, U_11` on spin 1, each used with probability 1/4.
/// Matrices are in the `|1>, |0>` order.
#[derive(Clone, Copy, Debug)]
pub struct EncodingSet {
    pub unitaries: [Operator2; 4],
    pub probabilities: [f64; 4],
}

impl EncodingSet {
    /// `max |tr(U_i^dagger U_j) - 2 delta_ij|`
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.unitaries.iter().enumerate() {
            for (j, b) in self.unitaries.iter().enumerate() {
                let expect = if i == j { 2.0 } else { 0.0 };
                worst = worst.max(((a.adjoint() * *b).trace() - c(expect, 0.0)).norm());
            }
        }
        worst
    }
}

pub fn encoding_unitaries() -> EncodingSet {
    encoding_unitaries_with(EncodingPhase::Orthogonal)
}

pub fn encoding_unitaries_with(phase: EncodingPhase) -> EncodingSet {
    let phi = phase.angle();
    let p = Operator([[C64::from_polar(1.0, phi), ZERO], [ZERO, ONE]]);
    let x = Operator([[ZERO, ONE], [ONE, ZERO]]);
    EncodingSet { unitaries: [Operator2::identity(), p, x, x * p], probabilities: [0.25; 4] }
}

/// `(1/4) sum_i (U_i x I) rho (U_i^dagger x I)` with the orthogonal frame.
pub fn average_signal_state(rho: &Operator4) -> Result<Operator4> {
    average_signal_state_with(rho, &encoding_unitaries())
}

pub fn average_signal_state_with(rho: &Operator4, set: &EncodingSet) -> Result<Operator4> {
    density_spectrum(rho)?;
    let id = Operator2::identity();
    let mut avg = Operator4::zeros();
    for (u, w) in set.unitaries.iter().zip(set.probabilities) {
        let big = u.kron(&id);
        avg = avg + (big * *rho * big.adjoint()).scale(c(w, 0.0));
    }
    Ok(avg)
}

/// Tolerance for the closed-form capacity guard.
pub const CAPACITY_MISMATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct CapacityReport {
    /// `2 - S(rho)` in bits.
    pub chi: f64,
    pub s_rho: f64,
    /// Entropy of the actual average signal state. Equals 2 only when that
    /// state is maximally mixed.
    pub s_avg: f64,
    /// `S(rho_avg) - S(rho)`.
    pub holevo: f64,
    /// Closed-form capacity (`B_z = 0` form when the field vanishes).
    pub chi_closed_form: f64,
    pub a: f64,
    pub b: f64,
    pub zeta: f64,
    pub delta: f64,
    pub log_z: f64,
    pub valid: bool,
}

pub fn capacity(p: &ModelParams) -> Result<CapacityReport> {
    let th = thermal_state(p)?;
    capacity_from_state(p, &th)
}

pub fn capacity_from_state(p: &ModelParams, th: &ThermalState) -> Result<CapacityReport> {
    let s_rho = shannon_bits(&density_spectrum(&th.rho)?);
    let chi = 2.0 - s_rho;
    let avg = average_signal_state(&th.rho)?;
    let s_avg = shannon_bits(&density_spectrum(&avg)?);

    let chi_closed_form = if p.bz == 0.0 { chi_no_field_closed_form(p)? } else { chi_closed_form(p)? };
    if !((chi - chi_closed_form).abs() <= CAPACITY_MISMATCH_TOL) {
        return Err(Error::CapacityMismatch { definitional: chi, closed_form: chi_closed_form });
    }
    let (a, b) = capacity_terms(p);
    let (zeta, delta) = zeta_delta(p);
    Ok(CapacityReport {
        chi,
        s_rho,
        s_avg,
        holevo: s_avg - s_rho,
        chi_closed_form,
        a,
        b,
        zeta,
        delta,
        log_z: th.log_z,
        valid: chi > 1.0,
    })
}

/// The `A` and `B` terms evaluated literally (may overflow to infinity).
pub fn capacity_terms(p: &ModelParams) -> (f64, f64) {
    let t = p.temperature;
    let s = p.derived().sqrt_jeff;
    let theta = s / (2.0 * t);
    let x = p.zeeman() / t;
    let a = (p.j / (4.0 * t)).exp() * (p.j * theta.cosh() + 2.0 * s * theta.sinh()) / (2.0 * t);
    let b = (-p.j / (4.0 * t)).exp() * (-p.j * x.cosh() + 4.0 * p.zeeman() * x.sinh()) / (2.0 * t);
    (a, b)
}

/// `zeta = 1 + e^{J/2T} cosh th`, `delta = -J + e^{J/2T} sqrt(J_eff) sinh th`, evaluated literally.
pub fn zeta_delta(p: &ModelParams) -> (f64, f64) {
    let t = p.temperature;
    let s = p.derived().sqrt_jeff;
    let theta = s / (2.0 * t);
    let e = (p.j / (2.0 * t)).exp();
    (1.0 + e * theta.cosh(), -p.j + e * s * theta.sinh())
}

/// `chi = (Z ln 4 + A + B - Z ln Z) / (Z ln 2)` for any `B_z`, with all
/// exponentials scaled by their common maximum.
pub fn chi_closed_form(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    let t = p.temperature;
    let s = p.derived().sqrt_jeff;
    let theta = s / (2.0 * t);
    let x = p.zeeman() / t;
    let q = p.j / (4.0 * t);
    let m = (q + theta).max(-q + x.abs());
    let (cosh_th, sinh_th) = scaled_cosh_sinh(q, theta, m);
    let (cosh_x, sinh_x) = scaled_cosh_sinh(-q, x, m);
    let z = 2.0 * cosh_x + 2.0 * cosh_th;
    let a = (p.j * cosh_th + 2.0 * s * sinh_th) / (2.0 * t);
    let b = (-p.j * cosh_x + 4.0 * p.zeeman() * sinh_x) / (2.0 * t);
    let log_z = z.ln() + m;
    Ok((2.0 * LN_2 - log_z + (a + b) / z) / LN_2)
}

/// The same formula with the `A` term as printed, `sinh[J_eff/2T]` in place
/// of `sinh[sqrt(J_eff)/2T]`. Kept to document that it does not match.
pub fn chi_closed_form_printed_a(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    let t = p.temperature;
    let d = p.derived();
    let (_, b) = capacity_terms(p);
    let a = (p.j / (4.0 * t)).exp()
        * (p.j * (d.sqrt_jeff / (2.0 * t)).cosh() + 2.0 * d.sqrt_jeff * (d.jeff / (2.0 * t)).sinh())
        / (2.0 * t);
    let z = crate::thermal::partition_closed_form(p)?;
    Ok((z * 4f64.ln() + a + b - z * z.ln()) / (z * LN_2))
}

/// `chi = (2J + 4T ln 4 - 4T ln(2 zeta) + 2 delta / zeta) / (4T ln 2)`, valid at `B_z = 0`.
pub fn chi_no_field_closed_form(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    if p.bz != 0.0 {
        return Err(Error::OutOfDomain(format!("requires Bz = 0, got {}", p.bz)));
    }
    let t = p.temperature;
    let s = p.derived().sqrt_jeff;
    let (zeta, delta, shift) = scaled_zeta_delta(p.j, s, t);
    let ln_zeta = zeta.ln() + shift;
    let ratio = delta / zeta;
    Ok((2.0 * p.j + 4.0 * t * 4f64.ln() - 4.0 * t * (LN_2 + ln_zeta) + 2.0 * ratio) / (4.0 * t * LN_2))
}

/// `chi > 1` via `e^{J/2T}(J cosh th + sqrt(J_eff) sinh th) > 2 zeta T ln zeta`.
pub fn validity(p: &ModelParams) -> Result<bool> {
    Ok(validity_margin(p)? > 0.0)
}

/// Left minus right side of the validity inequality, both divided by the
/// same positive scale.
pub fn validity_margin(p: &ModelParams) -> Result<f64> {
    p.validate_thermal()?;
    if p.bz != 0.0 {
        return Err(Error::OutOfDomain(format!("requires Bz = 0, got {}", p.bz)));
    }
    let t = p.temperature;
    let s = p.derived().sqrt_jeff;
    let (zeta, _, shift) = scaled_zeta_delta(p.j, s, t);
    let (cosh_th, sinh_th) = scaled_cosh_sinh(p.j / (2.0 * t), s / (2.0 * t), shift);
    let lhs = p.j * cosh_th + s * sinh_th;
    let rhs = 2.0 * zeta * t * (zeta.ln() + shift);
    Ok(lhs - rhs)
}

/// `(e^{base} cosh x, e^{base} sinh x) * e^{-shift}`
fn scaled_cosh_sinh(base: f64, x: f64, shift: f64) -> (f64, f64) {
    let up = (base + x - shift).exp();
    let down = (base - x - shift).exp();
    (0.5 * (up + down), 0.5 * (up - down))
}

/// `zeta` and `delta` times `e^{-shift}`, with the shift returned.
fn scaled_zeta_delta(j: f64, s: f64, t: f64) -> (f64, f64, f64) {
    let theta = s / (2.0 * t);
    let half_j = j / (2.0 * t);
    let shift = 0.0_f64.max(half_j + theta);
    let (cosh_th, sinh_th) = scaled_cosh_sinh(half_j, theta, shift);
    let one = (-shift).exp();
    (one + cosh_th, -j * one + s * sinh_th, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, von_neumann_entropy, Vector};

    #[test]
    fn frame_is_orthogonal_and_unitary() {
        let set = encoding_unitaries();
        assert!(set.orthogonality_defect() < 1e-15);
        for u in &set.unitaries {
            assert!(u.is_unitary(1e-15));
        }
        assert_eq!(set.unitaries[0], Operator2::identity());
    }

    #[test]
    fn literal_phase_is_not_orthogonal() {
        let set = encoding_unitaries_with(EncodingPhase::Literal);
        assert!(set.orthogonality_defect() > 0.1);
    }

    #[test]
    fn average_of_mixed_state_is_fixed() {
        let mixed = Operator4::identity().scale(c(0.25, 0.0));
        assert!(average_signal_state(&mixed).unwrap().max_abs_diff(&mixed) < 1e-16);
    }

    #[test]
    fn average_of_symmetric_thermal_state_is_mixed() {
        let p = ModelParams::new(1.0, 0.7).with_temperature(0.2);
        let th = thermal_state(&p).unwrap();
        let avg = average_signal_state(&th.rho).unwrap();
        assert!(avg.max_abs_diff(&Operator4::identity().scale(c(0.25, 0.0))) < 1e-15);
    }

    #[test]
    fn average_with_gradient_keeps_spin2_populations() {
        let p = ModelParams::new(1.0, 0.01).with_dbzeff(0.5).with_temperature(0.05);
        let th = thermal_state(&p).unwrap();
        let avg = average_signal_state(&th.rho).unwrap();
        let spin2_up = th.rho.0[0][0].re + th.rho.0[2][2].re;
        assert!((avg.0[0][0].re - spin2_up / 2.0).abs() < 1e-15);
        assert!((avg.0[0][0].re - 0.25).abs() > 0.1);
    }

    #[test]
    fn cold_heisenberg_capacity_is_two() {
        let p = ModelParams::new(1.0, 0.0).with_temperature(0.001);
        let r = capacity(&p).unwrap();
        assert!((r.chi - 2.0).abs() < 1e-3);
        assert!(r.valid);
    }

    #[test]
    fn hot_capacity_vanishes() {
        let p = ModelParams::new(1.0, 0.3).with_dbzeff(0.2).with_temperature(1e6);
        assert!(capacity(&p).unwrap().chi.abs() < 1e-9);
    }

    #[test]
    fn closed_forms_match_definition() {
        for (j, b0, dz, bz, t) in [
            (-1.0, 0.8, 0.5, 0.0, 0.05),
            (1.0, 0.01, 0.5, 0.0, 0.05),
            (0.7, 1.3, -0.2, 0.4, 0.3),
            (-2.0, 0.0, 1.5, 0.9, 0.01),
            (0.3, 0.2, 0.0, 0.1, 2.0),
        ] {
            let p = ModelParams::new(j, b0).with_dbzeff(dz).with_bz(bz).with_temperature(t);
            let th = thermal_state(&p).unwrap();
            let chi = 2.0 - von_neumann_entropy(&th.rho).unwrap();
            assert!((chi_closed_form(&p).unwrap() - chi).abs() < 1e-9, "{p:?}");
            if bz == 0.0 {
                assert!((chi_no_field_closed_form(&p).unwrap() - chi).abs() < 1e-9, "{p:?}");
            }
        }
    }

    #[test]
    fn printed_a_term_disagrees() {
        let p = ModelParams::new(1.0, 0.5).with_dbzeff(0.5).with_temperature(0.5);
        let good = chi_closed_form(&p).unwrap();
        let printed = chi_closed_form_printed_a(&p).unwrap();
        assert!((good - printed).abs() > 1e-3);
    }

    #[test]
    fn validity_matches_capacity() {
        let p = ModelParams::new(-1.0, 0.8).with_temperature(0.05);
        assert!(validity(&p).unwrap());
        let p = ModelParams::new(-1.0, 0.8).with_temperature(1e3);
        assert!(!validity(&p).unwrap());
    }

    #[test]
    fn validity_rejects_field() {
        let p = ModelParams::new(1.0, 0.0).with_bz(0.1).with_temperature(0.5);
        assert!(matches!(validity(&p), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn literal_phase_average_of_bell_state() {
        let psi = Vector([ZERO, c(1.0, 0.0), c(-1.0, 0.0), ZERO]).normalized();
        let rho = psi.outer(&psi);
        let set = encoding_unitaries_with(EncodingPhase::Literal);
        let avg = average_signal_state_with(&rho, &set).unwrap();
        assert!((avg.trace().re - 1.0).abs() < 1e-15);
        assert!(avg.max_abs_diff(&Operator4::identity().scale(c(0.25, 0.0))) > 0.01);
    }
}
