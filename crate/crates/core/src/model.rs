//! Two exchange-coupled electron spins with a z-axis DM term and a static
//! nuclear field.
//!
//! Units are natural (`k_B = hbar = 1`); `J`, `T` and `gamma_e * B` share the
//! same energy unit. In the laboratory the external field is of order
//! 100 mT while the nuclear fields are 1-5 mT, so the transverse nuclear
//! components only enter at second order against the large Zeeman gap.
//! [`build_reduced_hamiltonian`] drops them; [`build_full_hamiltonian`] keeps
//! them and is used to check that the truncation error scales as
//! `B_n^2 / B_z`.

use crate::error::{Error, Result};
use crate::numerics::{c, eig_hermitian, Operator, Operator2, Operator4, Vector, Vector4, C64, I, ONE, ZERO};

/// Physical inputs. `bz` is the mean field `B_ext + (B_1n + B_2n)/2` and
/// `dbz` the half difference `(B_1n - B_2n)/2`, both along z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Exchange constant; `J > 0` antiferromagnetic, `J < 0` ferromagnetic.
    pub j: f64,
    /// z component of the DM vector (dimensionless).
    pub beta0: f64,
    pub gamma_e: f64,
    pub bz: f64,
    pub dbz: f64,
    pub temperature: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { j: 1.0, beta0: 0.0, gamma_e: 1.0, bz: 0.0, dbz: 0.0, temperature: 1.0 }
    }
}

impl ModelParams {
    pub fn new(j: f64, beta0: f64) -> Self {
        ModelParams { j, beta0, ..Default::default() }
    }

    /// Set `dbz` so that `2 gamma_e dbz` equals `dbzeff`.
    pub fn with_dbzeff(mut self, dbzeff: f64) -> Self {
        self.dbz = dbzeff / (2.0 * self.gamma_e);
        self
    }

    pub fn with_bz(mut self, bz: f64) -> Self {
        self.bz = bz;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_gamma_e(mut self, gamma_e: f64) -> Self {
        self.gamma_e = gamma_e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("J", self.j),
            ("beta0", self.beta0),
            ("gamma_e", self.gamma_e),
            ("Bz", self.bz),
            ("dBz", self.dbz),
            ("T", self.temperature),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, reason: format!("{value} is not finite") });
            }
        }
        if !(self.gamma_e > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma_e",
                reason: format!("must be positive, got {}", self.gamma_e),
            });
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but also requires `T > 0`.
    pub fn validate_thermal(&self) -> Result<()> {
        self.validate()?;
        if !(self.temperature > 0.0) {
            return Err(Error::NonPositiveTemperature(self.temperature));
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedParams {
        let dbzeff = 2.0 * self.gamma_e * self.dbz;
        let coupling_sq = self.j * self.j * (1.0 + self.beta0 * self.beta0);
        let jeff = coupling_sq + dbzeff * dbzeff;
        DerivedParams { dbzeff, coupling_sq, jeff, sqrt_jeff: jeff.sqrt() }
    }

    /// `gamma_e * B_z`
    pub fn zeeman(&self) -> f64 {
        self.gamma_e * self.bz
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParams {
    /// `2 gamma_e dB_z`
    pub dbzeff: f64,
    /// `J^2 (1 + beta0^2)`
    pub coupling_sq: f64,
    /// `J^2 (1 + beta0^2) + dbzeff^2`
    pub jeff: f64,
    pub sqrt_jeff: f64,
}

/// Transverse field components; `theta = Bx + i By`, `dtheta = dBx + i dBy`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FullFieldParams {
    pub bx: f64,
    pub by: f64,
    pub dbx: f64,
    pub dby: f64,
}

impl FullFieldParams {
    pub fn theta(&self) -> C64 {
        c(self.bx, self.by)
    }

    pub fn dtheta(&self) -> C64 {
        c(self.dbx, self.dby)
    }
}

/// Isotropic exchange plus the z DM term:
/// `J/4 [[1,0,0,0],[0,-1,2(1+i b),0],[0,2(1-i b),-1,0],[0,0,0,1]]`.
fn exchange_matrix(p: &ModelParams) -> Operator4 {
    let q = p.j / 4.0;
    let hop = c(p.j / 2.0, p.j / 2.0 * p.beta0);
    Operator([
        [c(q, 0.0), ZERO, ZERO, ZERO],
        [ZERO, c(-q, 0.0), hop, ZERO],
        [ZERO, hop.conj(), c(-q, 0.0), ZERO],
        [ZERO, ZERO, ZERO, c(q, 0.0)],
    ])
}

/// The large-field Hamiltonian in the basis `|11>,|10>,|01>,|00>`.
pub fn build_reduced_hamiltonian(p: &ModelParams) -> Operator4 {
    let q = p.j / 4.0;
    let zb = p.gamma_e * p.bz;
    let zd = p.gamma_e * p.dbz;
    let hop = c(p.j / 2.0, p.j / 2.0 * p.beta0);
    Operator([
        [c(q - zb, 0.0), ZERO, ZERO, ZERO],
        [ZERO, c(-q - zd, 0.0), hop, ZERO],
        [ZERO, hop.conj(), c(-q + zd, 0.0), ZERO],
        [ZERO, ZERO, ZERO, c(q + zb, 0.0)],
    ])
}

/// `sigma . v` on one spin, basis `|1>, |0>`.
fn spin_dot(vx: f64, vy: f64, vz: f64) -> Operator2 {
    Operator([[c(vz, 0.0), c(vx, -vy)], [c(vx, vy), c(-vz, 0.0)]])
}

/// Exchange plus the complete Zeeman coupling
/// `-(gamma_e/2) [(B + dB).sigma_1 + (B - dB).sigma_2]`, whose diagonal
/// reproduces [`build_reduced_hamiltonian`] exactly.
pub fn build_full_hamiltonian(p: &ModelParams, f: &FullFieldParams) -> Operator4 {
    let g = -0.5 * p.gamma_e;
    let spin1 = spin_dot(f.bx + f.dbx, f.by + f.dby, p.bz + p.dbz).scale(c(g, 0.0));
    let spin2 = spin_dot(f.bx - f.dbx, f.by - f.dby, p.bz - p.dbz).scale(c(g, 0.0));
    let id = Operator2::identity();
    exchange_matrix(p) + spin1.kron(&id) + id.kron(&spin2)
}

/// Which route produced the central-block eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenBranch {
    Analytic,
    /// `J = 0`: the closed-form central-block vectors divide by `J`.
    Numeric,
}

/// Closed-form eigenpairs. Index `l` holds `E_{l+1}`, `psi_{l+1}`:
/// `psi_1 = |11>`, `psi_4 = |00>`, and `psi_2`, `psi_3` span the
/// `|10>, |01>` block with `E_2 = -J/4 - sqrt(J_eff)/2 <= E_3`.
#[derive(Clone, Copy, Debug)]
pub struct EigenSystem {
    pub energies: [f64; 4],
    pub states: [Vector4; 4],
    /// `-dbzeff + sqrt(J_eff)`
    pub eta_plus: f64,
    /// `-dbzeff - sqrt(J_eff)`
    pub eta_minus: f64,
    /// `1 + (sqrt(J_eff) + dbzeff)^2 / J^2(1+beta0^2)`
    pub xi_plus: f64,
    /// `1 + (sqrt(J_eff) - dbzeff)^2 / J^2(1+beta0^2)`
    pub xi_minus: f64,
    pub branch: EigenBranch,
}

/// Energies `E_1..E_4` in closed form.
pub fn analytic_energies(p: &ModelParams) -> [f64; 4] {
    let d = p.derived();
    let q = p.j / 4.0;
    let zb = p.zeeman();
    [q - zb, -q - d.sqrt_jeff / 2.0, -q + d.sqrt_jeff / 2.0, q + zb]
}

/// The eigenpairs of the reduced Hamiltonian.
///
/// The central-block vector for `E_2` has `|10>` coefficient
/// `eta_minus i / (J (i + beta0))` and norm `sqrt(xi_plus)`; the one for
/// `E_3` uses `eta_plus` and `xi_minus`. Both are returned normalized.
pub fn analytic_eigensystem(p: &ModelParams) -> Result<EigenSystem> {
    p.validate()?;
    let d = p.derived();
    let energies = analytic_energies(p);
    let s = d.sqrt_jeff;
    let dz = d.dbzeff;
    // eta_+ eta_- = -J^2(1+beta0^2); pick the cancellation-free form
    let (eta_plus, eta_minus) =
        if dz > 0.0 { (d.coupling_sq / (s + dz), -(s + dz)) } else { (s - dz, -d.coupling_sq / (s - dz)) };

    let (xi_plus, xi_minus) = if d.coupling_sq > 0.0 {
        (1.0 + (s + dz).powi(2) / d.coupling_sq, 1.0 + (s - dz).powi(2) / d.coupling_sq)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    let mut states = [Vector4::basis(0), Vector4::zeros(), Vector4::zeros(), Vector4::basis(3)];
    let branch = if p.j != 0.0 {
        let dm = c(p.j * p.beta0, p.j); // J (i + beta0)
        for (slot, eta) in [(1, eta_minus), (2, eta_plus)] {
            let coeff = I * eta / dm;
            let v = Vector([ZERO, coeff, ONE, ZERO]);
            states[slot] = v.normalized();
        }
        EigenBranch::Analytic
    } else {
        let h = build_reduced_hamiltonian(p);
        let block = Operator([[h.0[1][1], h.0[1][2]], [h.0[2][1], h.0[2][2]]]);
        let eig = eig_hermitian(&block)?;
        for (slot, v) in [(1, eig.vectors[0]), (2, eig.vectors[1])] {
            states[slot] = Vector([ZERO, v.0[0], v.0[1], ZERO]);
        }
        EigenBranch::Numeric
    };

    Ok(EigenSystem { energies, states, eta_plus, eta_minus, xi_plus, xi_minus, branch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eig_hermitian;

    fn sorted(mut e: [f64; 4]) -> [f64; 4] {
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn isotropic_heisenberg_matrix() {
        let h = build_reduced_hamiltonian(&ModelParams::new(1.0, 0.0));
        let expect = Operator([
            [c(0.25, 0.0), ZERO, ZERO, ZERO],
            [ZERO, c(-0.25, 0.0), c(0.5, 0.0), ZERO],
            [ZERO, c(0.5, 0.0), c(-0.25, 0.0), ZERO],
            [ZERO, ZERO, ZERO, c(0.25, 0.0)],
        ]);
        assert_eq!(h, expect);
    }

    #[test]
    fn decoupled_spins_are_diagonal() {
        let p = ModelParams::new(0.0, 0.7).with_bz(0.3).with_dbzeff(0.5);
        let h = build_reduced_hamiltonian(&p);
        assert_eq!(h.0[1][2], ZERO);
        assert_eq!(h, Operator4::from_real_diagonal([-0.3, -0.25, 0.25, 0.3]));
    }

    #[test]
    fn reduced_hamiltonian_is_traceless() {
        let p = ModelParams::new(-1.3, 0.4).with_bz(0.8).with_dbzeff(-0.2);
        assert!(build_reduced_hamiltonian(&p).trace().norm() < 1e-15);
    }

    #[test]
    fn full_hamiltonian_without_transverse_fields() {
        let p = ModelParams::new(0.7, 0.3).with_bz(0.4).with_dbzeff(0.9);
        let full = build_full_hamiltonian(&p, &FullFieldParams::default());
        assert!(full.max_abs_diff(&build_reduced_hamiltonian(&p)) < 1e-14);
        assert!(full.is_hermitian(1e-14));
    }

    #[test]
    fn pure_transverse_zeeman() {
        let p = ModelParams::new(0.0, 0.0);
        let f = FullFieldParams { bx: 0.3, by: -0.2, dbx: 0.1, dby: 0.05 };
        let h = build_full_hamiltonian(&p, &f);
        assert!(h.is_hermitian(1e-15));
        for i in 0..4 {
            assert_eq!(h.0[i][i], ZERO);
        }
        // one flip couples; double flips and the |10>,|01> pair do not
        assert_eq!(h.0[0][3], ZERO);
        assert_eq!(h.0[1][2], ZERO);
        let (theta, dtheta) = (f.theta(), f.dtheta());
        // <11|H|10>: flip spin 2
        assert!((h.0[0][1] - (theta - dtheta).conj() * -0.5).norm() < 1e-15);
        // <11|H|01>: flip spin 1
        assert!((h.0[0][2] - (theta + dtheta).conj() * -0.5).norm() < 1e-15);
        assert!((h.0[1][3] - (theta + dtheta).conj() * -0.5).norm() < 1e-15);
        assert!((h.0[2][3] - (theta - dtheta).conj() * -0.5).norm() < 1e-15);
    }

    #[test]
    fn heisenberg_singlet_triplet() {
        let sys = analytic_eigensystem(&ModelParams::new(1.0, 0.0)).unwrap();
        assert_eq!(sys.energies, [0.25, -0.75, 0.25, 0.25]);
        let singlet = Vector([ZERO, c(1.0, 0.0), c(-1.0, 0.0), ZERO]).normalized();
        assert!(sys.states[1].distance_up_to_phase(&singlet) < 1e-15);
    }

    #[test]
    fn eigensystem_matches_numeric_spectrum() {
        // J=1, beta0=0.3, dbzeff=0.4: sqrt(J_eff) = sqrt(1.25)
        let p = ModelParams::new(1.0, 0.3).with_dbzeff(0.4);
        let sys = analytic_eigensystem(&p).unwrap();
        assert!((p.derived().jeff - 1.25).abs() < 1e-15);
        assert!((sys.energies[1] - (-0.25 - 1.25_f64.sqrt() / 2.0)).abs() < 1e-15);
        let numeric = eig_hermitian(&build_reduced_hamiltonian(&p)).unwrap().values;
        for (a, b) in sorted(sys.energies).iter().zip(numeric.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let cases = [
            ModelParams::new(1.0, 0.01).with_dbzeff(0.5),
            ModelParams::new(-1.7, 1.2).with_dbzeff(-0.9).with_bz(0.3),
            ModelParams::new(0.05, 0.0).with_dbzeff(1.5),
            ModelParams::new(0.0, 0.4).with_dbzeff(0.5),
            ModelParams::new(0.0, 0.4).with_dbzeff(-0.5),
        ];
        for p in cases {
            let h = build_reduced_hamiltonian(&p);
            let sys = analytic_eigensystem(&p).unwrap();
            for (e, v) in sys.energies.iter().zip(sys.states.iter()) {
                assert!((v.norm() - 1.0).abs() < 1e-12);
                assert!(h.apply(v).max_abs_diff(&v.scale(c(*e, 0.0))) < 1e-10, "{p:?}");
            }
            for i in 0..4 {
                for k in (i + 1)..4 {
                    assert!(sys.states[i].inner(&sys.states[k]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_coupling_uses_numeric_branch() {
        let sys = analytic_eigensystem(&ModelParams::new(0.0, 0.0).with_dbzeff(0.6)).unwrap();
        assert_eq!(sys.branch, EigenBranch::Numeric);
        let sys = analytic_eigensystem(&ModelParams::new(0.5, 0.0).with_dbzeff(0.6)).unwrap();
        assert_eq!(sys.branch, EigenBranch::Analytic);
    }

    #[test]
    fn field_reversal_keeps_spectrum() {
        let p = ModelParams::new(0.8, 0.6).with_dbzeff(0.7).with_bz(0.2);
        let q = p.with_dbzeff(-0.7);
        let (a, b) = (analytic_eigensystem(&p).unwrap(), analytic_eigensystem(&q).unwrap());
        assert_eq!(a.energies, b.energies);
        assert!((a.eta_plus.abs() - b.eta_minus.abs()).abs() < 1e-12);
        assert!((a.eta_minus.abs() - b.eta_plus.abs()).abs() < 1e-12);
    }

    #[test]
    fn normalization_constants() {
        let p = ModelParams::new(1.3, 0.5).with_dbzeff(0.45);
        let sys = analytic_eigensystem(&p).unwrap();
        let k = p.derived().coupling_sq;
        assert!((sys.xi_plus - (1.0 + sys.eta_minus.powi(2) / k)).abs() < 1e-12);
        assert!((sys.xi_minus - (1.0 + sys.eta_plus.powi(2) / k)).abs() < 1e-12);
        assert!((sys.eta_plus * sys.eta_minus + k).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_gamma() {
        let p = ModelParams::new(1.0, 0.0).with_gamma_e(0.0);
        assert!(matches!(analytic_eigensystem(&p), Err(Error::InvalidParameter { name: "gamma_e", .. })));
    }
}
