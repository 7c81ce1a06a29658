//! Cross-checks of every closed form against the numeric oracle, plus a
//! list of places where the closed-form claims and the oracle disagree.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense_coding::{
    average_signal_state, capacity, chi_closed_form, chi_closed_form_printed_a, chi_no_field_closed_form, validity,
};
use crate::error::Result;
use crate::model::{analytic_eigensystem, analytic_energies, build_reduced_hamiltonian, ModelParams};
use crate::numerics::{c, eig_hermitian, gibbs_oracle, Operator4};
use crate::swap::{
    cnot_from_sqrt_swap, evolve, evolve_oracle, find_swap_times, purity_witness, random_product_states, verify_swap,
    Mapping, ProductState,
};
use crate::thermal::{log_partition_closed_form, thermal_state, thermal_state_no_dm};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    /// Closed-form statements that the oracle contradicts, with the measured numbers.
    pub discrepancies: Vec<String>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        writeln!(f)?;
        writeln!(f, "documented discrepancies:")?;
        for d in &self.discrepancies {
            writeln!(f, "  - {d}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        writeln!(f)?;
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let mut j = 0.0;
    while j == 0.0 {
        j = rng.gen_range(-2.0..2.0);
    }
    ModelParams::new(j, rng.gen_range(0.0..2.0))
        .with_dbzeff(2.0 * rng.gen_range(-1.0..1.0))
        .with_bz(rng.gen_range(-1.0..1.0))
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check { name, passed: worst <= tol, detail: format!("max error {worst:.3e} (tol {tol:.0e})") }
}

/// Run the suite. `seed` fixes every random draw.
pub fn run_selftest(seed: u64) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let numeric = eig_hermitian(&build_reduced_hamiltonian(&p))?.values;
        let mut analytic = analytic_energies(&p);
        analytic.sort_by(f64::total_cmp);
        for (a, b) in analytic.iter().zip(numeric) {
            worst = worst.max((a - b).abs());
        }
        let sys = analytic_eigensystem(&p)?;
        let h = build_reduced_hamiltonian(&p);
        for (e, v) in sys.energies.iter().zip(sys.states) {
            worst = worst.max(h.apply(&v).max_abs_diff(&v.scale(c(*e, 0.0))));
        }
    }
    checks.push(check("analytic eigensystem vs eigensolver", worst, 1e-9));

    let mut worst: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    for i in 0..300 {
        let t = if i % 10 == 0 { 0.01 } else { rng.gen_range(0.01..3.0) };
        let p = random_params(&mut rng).with_temperature(t);
        let th = thermal_state(&p)?;
        worst = worst.max(th.rho.max_abs_diff(&gibbs_oracle(&build_reduced_hamiltonian(&p), t)?));
        worst_z = worst_z.max((th.log_z - log_partition_closed_form(&p)?).abs() / th.log_z.abs().max(1.0));
    }
    checks.push(check("thermal state vs Gibbs oracle", worst, 1e-10));
    checks.push(check("log Z closed form", worst_z, 1e-12));

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = ModelParams::new(rng.gen_range(-2.0..2.0), 0.0)
            .with_dbzeff(rng.gen_range(-2.0..2.0))
            .with_temperature(rng.gen_range(0.01..2.0));
        worst = worst.max(thermal_state_no_dm(&p)?.rho.max_abs_diff(&thermal_state(&p)?.rho));
    }
    checks.push(check("thermal matrix without DM term", worst, 1e-10));

    let mut worst: f64 = 0.0;
    let mut disagreements = 0;
    for _ in 0..300 {
        let p = random_params(&mut rng).with_temperature(rng.gen_range(0.01..2.0));
        let r = capacity(&p)?;
        worst = worst.max((r.chi - chi_closed_form(&p)?).abs());
        let p0 = p.with_bz(0.0);
        let r0 = capacity(&p0)?;
        worst = worst.max((r0.chi - chi_no_field_closed_form(&p0)?).abs());
        if validity(&p0)? != (r0.chi > 1.0) {
            disagreements += 1;
        }
    }
    checks.push(check("closed-form capacity vs 2 - S(rho)", worst, 1e-9));
    checks.push(Check {
        name: "validity predicate vs chi > 1",
        passed: disagreements == 0,
        detail: format!("{disagreements} disagreements in 300 points"),
    });

    let mut worst: f64 = 0.0;
    let mut worst_witness: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let s0 = ProductState::random(&mut rng);
        let t = rng.gen_range(0.0..20.0);
        let a = evolve(&p, &s0, t)?.to_vector();
        let b = evolve_oracle(&p, &s0, t)?.to_vector();
        worst = worst.max(a.max_abs_diff(&b));
        let w = purity_witness(&p, &s0, t)?;
        let scale = w.value.norm().max(1e-3);
        worst_witness = worst_witness.max((w.value - w.closed_form).norm() / scale);
    }
    checks.push(check("closed-form evolution vs propagator", worst, 1e-10));
    checks.push(check("purity witness closed form", worst_witness, 1e-9));

    let beta = 8f64.sqrt();
    let p = ModelParams::new(1.0, beta);
    let sols = find_swap_times(&p, 4, 4, 1e-9)?;
    let hit = sols.iter().find(|s| s.k == 1 && s.n == 0 && (s.t - PI).abs() < 1e-12);
    let v = verify_swap(&p, PI, &random_product_states(seed ^ 0x5a5a, 32), 1e-8)?;
    checks.push(Check {
        name: "swap at t = pi for sqrt(1 + beta0^2) = 3",
        passed: hit.is_some() && v.is_swap(1e-8) && v.max_witness <= 1e-10,
        detail: format!(
            "solver hit {}, spread {:.3e}, witness {:.3e}, phases ({:.12}, {:.12})",
            hit.is_some(),
            v.phase_spread,
            v.max_witness,
            v.phase_spin1,
            v.phase_spin2
        ),
    });
    let blocked = find_swap_times(&p.with_dbzeff(0.5), 32, 32, 1e-9)?;
    checks.push(Check {
        name: "field gradient removes hop-type times",
        passed: blocked.iter().all(|s| !s.case_label.is_case2()),
        detail: format!("{} solutions, none hop-type", blocked.len()),
    });

    let gate = cnot_from_sqrt_swap()?;
    checks.push(check("sqrt(SWAP)^2 = SWAP", gate.sqrt_swap_square_error, 1e-12));

    Ok(SelftestReport { checks, discrepancies: discrepancies(&gate)? })
}

fn discrepancies(gate: &crate::swap::GateIdentityReport) -> Result<Vec<String>> {
    let mut out = Vec::new();

    out.push(format!(
        "the sqrt(SWAP) gate sequence gives controlled-Z, not CNOT: distance to CNOT {:.6}, to CZ {:.3e}; \
         Hadamards on spin 2 turn it into CNOT (distance {:.3e})",
        gate.deviation_from_cnot, gate.deviation_from_cz, gate.deviation_from_cnot_with_hadamards
    ));

    let p = ModelParams::new(1.0, 0.01).with_dbzeff(0.5).with_temperature(0.05);
    let th = thermal_state(&p)?;
    let avg = average_signal_state(&th.rho)?;
    let quarter = Operator4::identity().scale(c(0.25, 0.0));
    let report = capacity(&p)?;
    out.push(format!(
        "average signal state is I/4 only without field gradient or uniform field: at J=1, beta0=0.01, dBzeff=0.5, \
         T=0.05 its distance from I/4 is {:.6} and S(avg) = {:.6}, so 2 - S(rho) = {:.6} exceeds S(avg) - S(rho) = {:.6}",
        avg.max_abs_diff(&quarter),
        report.s_avg,
        report.chi,
        report.holevo
    ));

    let mut worst_gap = f64::INFINITY;
    let mut at = 0.0;
    for i in 0..=100 {
        let d = i as f64 / 100.0;
        let fm = capacity(&ModelParams::new(-1.0, 0.01).with_dbzeff(d).with_temperature(0.05))?.chi;
        let afm = capacity(&ModelParams::new(1.0, 0.01).with_dbzeff(d).with_temperature(0.05))?.chi;
        if fm - afm < worst_gap {
            worst_gap = fm - afm;
            at = d;
        }
    }
    out.push(format!(
        "ferromagnetic coupling does not beat antiferromagnetic at T=0.05, beta0=0.01: chi(J=-1) - chi(J=+1) reaches \
         {worst_gap:.6} at dBzeff={at}"
    ));

    let p = ModelParams::new(1.0, 8f64.sqrt());
    let sols = find_swap_times(&p, 4, 4, 1e-9)?;
    if let Some(s) = sols.iter().find(|s| s.k == 1 && s.n == 0 && s.mapping == Mapping::Swap) {
        out.push(format!(
            "swap phase at J=1, beta0=sqrt(8), t=pi: spin 1 carries {:.12}, spin 2 {:.12}; arccos(1/3) = {:.12}, \
             the odd-parity prediction {:.12} matches spin 2",
            s.phase_spin1,
            s.phase_spin2,
            (1.0f64 / 3.0).acos(),
            s.predicted_phase.unwrap_or(f64::NAN)
        ));
    }
    if let Some(s) = sols.iter().find(|s| s.k == 4 && s.n == 1) {
        out.push(format!(
            "hop-type time for (k=4, n=1) is {:.12}; the short-hand sqrt((k+n+1)(k+n)) 2pi/(J beta0) gives {:.12}",
            s.t,
            s.printed_time.unwrap_or(f64::NAN)
        ));
    }
    let p = ModelParams::new(1.0, 0.0);
    if let Some(s) = find_swap_times(&p, 2, 2, 1e-9)?.iter().find(|s| s.mapping == Mapping::Swap) {
        out.push(format!(
            "without DM term and gradient the Heisenberg exchange swaps at t = {:.12} (k={}, n={}), not only at t = 0",
            s.t, s.k, s.n
        ));
    }

    let p = ModelParams::new(1.0, 0.5).with_dbzeff(0.5).with_temperature(0.5);
    out.push(format!(
        "capacity with sinh[J_eff/2T] in the A term: {:.12} vs {:.12} from the entropy",
        chi_closed_form_printed_a(&p)?,
        capacity(&p)?.chi
    ));

    let s0 = random_product_states(1, 1)[0];
    let w = purity_witness(&ModelParams::new(0.8, 0.6).with_dbzeff(0.45), &s0, 2.1)?;
    out.push(format!(
        "witness auxiliary nu needs no factor i on its gradient term: |nu - nu_with_i| = {:.6e} at dBzeff=0.45",
        (w.nu - w.nu_printed).norm()
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = run_selftest(1).unwrap();
        assert!(r.all_passed(), "{r}");
        assert!(r.discrepancies.len() >= 5);
        assert!(r.to_string().contains("documented discrepancies"));
    }
}
