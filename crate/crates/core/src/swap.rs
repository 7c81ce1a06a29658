//! Free evolution of product states and the times at which it swaps the spins.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{analytic_energies, build_reduced_hamiltonian, ModelParams};
use crate::numerics::{
    c, eig_hermitian, expm_i, reduced_spin1_entries, schmidt_factor, wrap_angle, Operator2, Operator4, Schmidt, Vector,
    Vector2, Vector4, C64, I, ONE, ZERO,
};

const NORM_TOL: f64 = 1e-12;
/// Evolution is rejected if the norm moves further than this.
pub const NORM_DRIFT_TOL: f64 = 1e-8;

/// `(alpha1 |1> + beta1 |0>) (x) (alpha2 |1> + beta2 |0>)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductState {
    pub alpha1: C64,
    pub beta1: C64,
    pub alpha2: C64,
    pub beta2: C64,
}

impl ProductState {
    pub fn new(alpha1: C64, beta1: C64, alpha2: C64, beta2: C64) -> Result<Self> {
        for norm in [(alpha1.norm_sqr() + beta1.norm_sqr()).sqrt(), (alpha2.norm_sqr() + beta2.norm_sqr()).sqrt()] {
            if !((norm - 1.0).abs() <= NORM_TOL) {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(ProductState { alpha1, beta1, alpha2, beta2 })
    }

    /// Builds from spin vectors in the `|1>, |0>` order.
    pub fn from_spins(spin1: Vector2, spin2: Vector2) -> Result<Self> {
        Self::new(spin1.0[0], spin1.0[1], spin2.0[0], spin2.0[1])
    }

    /// `|11>`, `|10>`, `|01>` or `|00>` for index 0..4.
    pub fn basis(index: usize) -> Self {
        let up = |bit: bool| if bit { (ONE, ZERO) } else { (ZERO, ONE) };
        let (alpha1, beta1) = up(index < 2);
        let (alpha2, beta2) = up(index.is_multiple_of(2));
        ProductState { alpha1, beta1, alpha2, beta2 }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        let mut spin = || {
            let v = Vector([
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ]);
            v.normalized()
        };
        let s1 = spin();
        let s2 = spin();
        ProductState { alpha1: s1.0[0], beta1: s1.0[1], alpha2: s2.0[0], beta2: s2.0[1] }
    }

    pub fn spin1(&self) -> Vector2 {
        Vector([self.alpha1, self.beta1])
    }

    pub fn spin2(&self) -> Vector2 {
        Vector([self.alpha2, self.beta2])
    }

    pub fn to_vector(&self) -> Vector4 {
        self.spin1().kron(&self.spin2())
    }
}

/// `count` product states drawn from a seeded generator.
pub fn random_product_states(seed: u64, count: usize) -> Vec<ProductState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ProductState::random(&mut rng)).collect()
}

/// `a|11> + b|10> + c|01> + d|00>` at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolvedState {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    /// `b = e^{iJt/4}(P+ e^{i w t/2} + P- e^{-i w t/2})/2`, `w = sqrt(J_eff)`.
    pub p_plus: Option<C64>,
    pub p_minus: Option<C64>,
    /// `c = e^{iJt/4}(Q- e^{i w t/2} + Q+ e^{-i w t/2})/2`.
    pub q_plus: Option<C64>,
    pub q_minus: Option<C64>,
}

impl EvolvedState {
    pub fn to_vector(&self) -> Vector4 {
        Vector([self.a, self.b, self.c, self.d])
    }

    pub fn from_vector(v: &Vector4) -> Self {
        EvolvedState {
            a: v.0[0],
            b: v.0[1],
            c: v.0[2],
            d: v.0[3],
            p_plus: None,
            p_minus: None,
            q_plus: None,
            q_minus: None,
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }
}

/// Closed-form evolution under the reduced Hamiltonian. `J = 0` goes
/// through the spectral propagator instead.
pub fn evolve(p: &ModelParams, s0: &ProductState, t: f64) -> Result<EvolvedState> {
    p.validate()?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", reason: format!("must be finite, got {t}") });
    }
    let out = if p.j == 0.0 { evolve_oracle(p, s0, t)? } else { evolve_closed_form(p, s0, t) };
    let drift = (out.norm() - 1.0).abs();
    if !(drift <= NORM_DRIFT_TOL) {
        return Err(Error::NormDrift { drift });
    }
    Ok(out)
}

fn evolve_closed_form(p: &ModelParams, s0: &ProductState, t: f64) -> EvolvedState {
    let [e1, _, _, e4] = analytic_energies(p);
    let d = p.derived();
    let s = d.sqrt_jeff;
    let z = d.dbzeff / s;
    let hop = c(p.j, p.j * p.beta0) / s;
    let x0 = s0.alpha1 * s0.beta2;
    let y0 = s0.beta1 * s0.alpha2;

    let p_plus = x0 * (1.0 + z) - hop * y0;
    let p_minus = x0 * (1.0 - z) + hop * y0;
    let q_plus = y0 * (1.0 + z) + hop.conj() * x0;
    let q_minus = y0 * (1.0 - z) - hop.conj() * x0;

    let ahead = C64::from_polar(1.0, s * t / 2.0);
    let behind = ahead.conj();
    let common = C64::from_polar(0.5, p.j * t / 4.0);
    EvolvedState {
        a: s0.alpha1 * s0.alpha2 * C64::from_polar(1.0, -e1 * t),
        b: common * (p_plus * ahead + p_minus * behind),
        c: common * (q_minus * ahead + q_plus * behind),
        d: s0.beta1 * s0.beta2 * C64::from_polar(1.0, -e4 * t),
        p_plus: Some(p_plus),
        p_minus: Some(p_minus),
        q_plus: Some(q_plus),
        q_minus: Some(q_minus),
    }
}

/// `exp(-iHt) psi(0)` through the numeric eigendecomposition.
pub fn evolve_oracle(p: &ModelParams, s0: &ProductState, t: f64) -> Result<EvolvedState> {
    let u = expm_i(&build_reduced_hamiltonian(p), t)?;
    Ok(EvolvedState::from_vector(&u.apply(&s0.to_vector())))
}

/// Reduced state of spin 1 in the `|1>, |0>` order.
pub fn reduced_density_spin1(e: &EvolvedState) -> Operator2 {
    reduced_spin1_entries(&e.to_vector())
}

/// `a d - b c` and the closed-form pieces that reproduce it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityWitness {
    /// `a d - b c` from the evolved amplitudes.
    pub value: C64,
    /// `-e^{-iJt/2} (mu + i nu) / 2 J_eff`.
    pub closed_form: C64,
    pub mu: C64,
    pub nu: C64,
    /// `nu` with an extra factor `i` on its field-gradient term.
    pub nu_printed: C64,
    pub x: C64,
    pub y: C64,
}

impl PurityWitness {
    /// `det rho_1 = |a d - b c|^2`
    pub fn determinant(&self) -> f64 {
        self.value.norm_sqr()
    }
}

pub fn purity_witness(p: &ModelParams, s0: &ProductState, t: f64) -> Result<PurityWitness> {
    let e = evolve(p, s0, t)?;
    let value = e.a * e.d - e.b * e.c;

    let dd = p.derived();
    let s = dd.sqrt_jeff;
    let z = dd.dbzeff;
    let (cos, sin) = ((s * t).cos(), (s * t).sin());
    let rot = C64::from_polar(1.0, p.j * t);
    let (a1, b1, a2, b2) = (s0.alpha1, s0.beta1, s0.alpha2, s0.beta2);

    let x = rot * c(p.beta0, -1.0) * p.j * (I * z * (cos - 1.0) + s * sin);
    let y = -dd.coupling_sq + (rot - 1.0) * z * z + rot * dd.coupling_sq * cos;
    let mu = x * a2 * a2 * b1 * b1 + y * 2.0 * a1 * a2 * b1 * b2;
    let dm = rot * c(p.beta0, 1.0) * p.j;
    let nu = dm * (z * (cos - 1.0) + I * s * sin) * a1 * a1 * b2 * b2;
    let nu_printed = dm * (I * z * (cos - 1.0) + I * s * sin) * a1 * a1 * b2 * b2;

    let closed_form =
        if dd.jeff > 0.0 { -C64::from_polar(1.0, -p.j * t / 2.0) * (mu + I * nu) / (2.0 * dd.jeff) } else { value };
    Ok(PurityWitness { value, closed_form, mu, nu, nu_printed, x, y })
}

/// Which defining conditions produced a solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    Case1_1,
    Case1_2Even,
    Case1_2Odd,
    Case2_1,
    Case2_2Even,
    Case2_2Odd,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Case1_1 => "Case1.1",
            CaseLabel::Case1_2Even => "Case1.2-even",
            CaseLabel::Case1_2Odd => "Case1.2-odd",
            CaseLabel::Case2_1 => "Case2.1",
            CaseLabel::Case2_2Even => "Case2.2-even",
            CaseLabel::Case2_2Odd => "Case2.2-odd",
        }
    }

    /// Case 2 times make the central block an off-diagonal hop.
    pub fn is_case2(self) -> bool {
        matches!(self, CaseLabel::Case2_1 | CaseLabel::Case2_2Even | CaseLabel::Case2_2Odd)
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the evolution does to an arbitrary product state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mapping {
    /// Spin 1 ends in `(alpha2, e^{i phi1} beta2)`, spin 2 in `(alpha1, e^{i phi2} beta1)`.
    Swap,
    /// Spin 1 ends in `(alpha1, e^{i phi1} beta1)`, spin 2 in `(alpha2, e^{i phi2} beta2)`.
    Identity,
    Neither,
}

impl Mapping {
    pub fn as_str(self) -> &'static str {
        match self {
            Mapping::Swap => "swap",
            Mapping::Identity => "identity",
            Mapping::Neither => "neither",
        }
    }
}

/// Phases the propagator attaches at time `t`, measured on basis states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredPhases {
    pub mapping: Mapping,
    pub spin1: f64,
    pub spin2: f64,
    /// Largest deviation of the propagator from the identified map.
    pub defect: f64,
}

pub fn measure_phases(p: &ModelParams, t: f64, tol: f64) -> Result<MeasuredPhases> {
    let col = |i: usize| -> Result<Vector4> { Ok(evolve(p, &ProductState::basis(i), t)?.to_vector()) };
    let (c11, c10, c01, c00) = (col(0)?, col(1)?, col(2)?, col(3)?);
    let p11 = c11.0[0];
    // U restricted to the central block
    let stay10 = c10.0[1];
    let hop10 = c10.0[2];
    let hop01 = c01.0[1];
    let stay01 = c01.0[2];
    let leak = [c11.0[1], c11.0[2], c11.0[3], c10.0[0], c10.0[3], c01.0[0], c01.0[3], c00.0[0], c00.0[1], c00.0[2]]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let p00 = c00.0[3];

    let (mapping, ratio1, ratio2, off) = if hop10.norm() >= stay10.norm() {
        (Mapping::Swap, hop10 / p11, hop01 / p11, stay10.norm().max(stay01.norm()))
    } else {
        (Mapping::Identity, stay01 / p11, stay10 / p11, hop10.norm().max(hop01.norm()))
    };
    // product structure also fixes |00>: e^{i(phi1 + phi2)} = p00 / p11
    let closure = (ratio1 * ratio2 - p00 / p11).norm();
    let defect = leak.max(off).max(closure).max((ratio1.norm() - 1.0).abs()).max((ratio2.norm() - 1.0).abs());
    let mapping = if defect <= tol { mapping } else { Mapping::Neither };
    Ok(MeasuredPhases { mapping, spin1: ratio1.arg(), spin2: ratio2.arg(), defect })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapResiduals {
    /// `|sqrt(J_eff) t - m pi|` for the target multiple `m`.
    pub sqrt_jeff_condition: f64,
    /// `|J t - m pi|`
    pub j_condition: f64,
    /// `|dbzeff|` for Case 2 times, zero otherwise.
    pub field_gradient: f64,
}

impl SwapResiduals {
    pub fn max(&self) -> f64 {
        self.sqrt_jeff_condition.max(self.j_condition).max(self.field_gradient)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwapSolution {
    pub t: f64,
    pub k: i64,
    pub n: i64,
    pub case_label: CaseLabel,
    pub residuals: SwapResiduals,
    /// Measured on the evolution at `t`.
    pub mapping: Mapping,
    pub phase_spin1: f64,
    pub phase_spin2: f64,
    /// The spin-1 phase the closed-form case analysis predicts, if it gives one.
    pub predicted_phase: Option<f64>,
    /// Whether `phase_spin1` agrees with `predicted_phase` modulo `2 pi`.
    pub predicted_phase_matches: Option<bool>,
    /// The same phase compared against spin 2 instead.
    pub predicted_phase_matches_spin2: Option<bool>,
    /// Time from the short-hand formula quoted with the case, when one exists.
    pub printed_time: Option<f64>,
}

impl SwapSolution {
    /// `|printed_time - t|`
    pub fn printed_time_residual(&self) -> Option<f64> {
        self.printed_time.map(|tp| (tp - self.t).abs())
    }
}

pub const DEFAULT_SWAP_TOL: f64 = 1e-9;
pub const DEFAULT_K_MAX: i64 = 32;
pub const DEFAULT_N_MAX: i64 = 32;
/// Tolerance for comparing measured phases with the predicted ones.
pub const PHASE_MATCH_TOL: f64 = 1e-8;

/// Enumerate `(k, n)` with `0 <= k <= k_max`, `|n| <= n_max` whose time
/// satisfies both commensurability conditions within `tol`.
///
/// Case 1: `sqrt(J_eff) t = 2k pi`, `J t = 2n pi`.
/// Case 2: `sqrt(J_eff) t = (2k+1) pi`, `J t = (2n+1) pi`, `dbzeff = 0`.
/// `n` carries the sign of `J` so that `t >= 0`.
pub fn find_swap_times(p: &ModelParams, k_max: i64, n_max: i64, tol: f64) -> Result<Vec<SwapSolution>> {
    p.validate()?;
    if p.j == 0.0 {
        return Err(Error::OutOfDomain("J = 0 has no exchange dynamics".into()));
    }
    if k_max < 0 || n_max < 0 {
        return Err(Error::InvalidParameter { name: "k_max/n_max", reason: "must be non-negative".into() });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be positive, got {tol}") });
    }
    let d = p.derived();
    let s = d.sqrt_jeff;
    let mut out = Vec::new();
    for n in -n_max..=n_max {
        for k in 0..=k_max {
            // Case 1
            let t = 2.0 * n as f64 * PI / p.j;
            if t >= 0.0 {
                let res = SwapResiduals {
                    sqrt_jeff_condition: (s * t - 2.0 * k as f64 * PI).abs(),
                    j_condition: (p.j * t - 2.0 * n as f64 * PI).abs(),
                    field_gradient: 0.0,
                };
                if res.max() <= tol {
                    let label = if k == n.abs() {
                        CaseLabel::Case1_1
                    } else if (k + n).rem_euclid(2) == 0 {
                        CaseLabel::Case1_2Even
                    } else {
                        CaseLabel::Case1_2Odd
                    };
                    out.push(finish_solution(p, t, k, n, label, res, tol)?);
                }
            }
            // Case 2
            let m = 2 * n + 1;
            let t = m as f64 * PI / p.j;
            if t > 0.0 {
                let res = SwapResiduals {
                    sqrt_jeff_condition: (s * t - (2 * k + 1) as f64 * PI).abs(),
                    j_condition: (p.j * t - m as f64 * PI).abs(),
                    field_gradient: d.dbzeff.abs(),
                };
                if res.max() <= tol {
                    let label = if 2 * k + 1 == m.abs() {
                        CaseLabel::Case2_1
                    } else if (k + n).rem_euclid(2) == 0 {
                        CaseLabel::Case2_2Even
                    } else {
                        CaseLabel::Case2_2Odd
                    };
                    out.push(finish_solution(p, t, k, n, label, res, tol)?);
                }
            }
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.k.cmp(&b.k)).then(a.n.cmp(&b.n)));
    Ok(out)
}

fn finish_solution(
    p: &ModelParams,
    t: f64,
    k: i64,
    n: i64,
    case_label: CaseLabel,
    residuals: SwapResiduals,
    tol: f64,
) -> Result<SwapSolution> {
    let measured = measure_phases(p, t, tol.max(1e-9))?;
    let predicted_phase = predicted_spin1_phase(p, k, n, case_label);
    let agrees = |phase: f64| predicted_phase.map(|q| wrap_angle(phase - q).abs() <= PHASE_MATCH_TOL);
    Ok(SwapSolution {
        t,
        k,
        n,
        case_label,
        residuals,
        mapping: measured.mapping,
        phase_spin1: measured.spin1,
        phase_spin2: measured.spin2,
        predicted_phase,
        predicted_phase_matches: agrees(measured.spin1),
        predicted_phase_matches_spin2: agrees(measured.spin2),
        printed_time: printed_time(p, k, n, case_label),
    })
}

/// Spin-1 phase from the case analysis:
/// Case 1.1 and 1.2-even leave spin 1 unchanged, Case 1.2-odd gives `e^{-i pi}`,
/// Case 2.2 gives `arccos r` or `pi + arccos r` with `r = (2n+1)/(2k+1)`, the
/// choice depending on the parity of `k + n` and the sign of `J`.
pub fn predicted_spin1_phase(p: &ModelParams, k: i64, n: i64, label: CaseLabel) -> Option<f64> {
    match label {
        CaseLabel::Case1_1 | CaseLabel::Case1_2Even => Some(0.0),
        CaseLabel::Case1_2Odd => Some(-PI),
        CaseLabel::Case2_1 => None,
        CaseLabel::Case2_2Even | CaseLabel::Case2_2Odd => {
            let r = ((2 * n + 1) as f64).abs() / (2 * k + 1) as f64;
            let base = r.clamp(-1.0, 1.0).acos();
            let even = label == CaseLabel::Case2_2Even;
            let shifted = even != (p.j > 0.0);
            Some(if shifted { PI + base } else { base })
        }
    }
}

/// The closed-form times quoted with the cases:
/// Case 1.2 `2 pi sqrt((k^2 - n^2) / J_eff)`,
/// Case 2.2 `sqrt((k+n+1)(k+n)) 2 pi / (J beta0)`.
pub fn printed_time(p: &ModelParams, k: i64, n: i64, label: CaseLabel) -> Option<f64> {
    let (kf, nf) = (k as f64, n as f64);
    match label {
        CaseLabel::Case1_2Even | CaseLabel::Case1_2Odd => {
            Some(2.0 * PI * ((kf * kf - nf * nf) / p.derived().jeff).sqrt())
        }
        CaseLabel::Case2_2Even | CaseLabel::Case2_2Odd => {
            Some(((kf + nf + 1.0) * (kf + nf)).sqrt() * 2.0 * PI / (p.j * p.beta0))
        }
        _ => None,
    }
}

/// Case 2 time implied by the two conditions, `2 pi sqrt((k-n)(k+n+1)) / (|J| beta0)`.
pub fn case2_time(p: &ModelParams, k: i64, n: i64) -> f64 {
    let prod = ((k - n) * (k + n + 1)) as f64;
    2.0 * PI * prod.abs().sqrt() / (p.j.abs() * p.beta0)
}

/// Case 1.2 time implied by the two conditions, `2 pi sqrt((k^2 - n^2) / (J^2 beta0^2 + dbzeff^2))`.
pub fn case1_time(p: &ModelParams, k: i64, n: i64) -> f64 {
    let dm = p.j * p.beta0;
    let dz = p.derived().dbzeff;
    2.0 * PI * (((k * k - n * n) as f64) / (dm * dm + dz * dz)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwapVerification {
    /// `None` once any state fails to stay a product.
    pub mapping: Option<Mapping>,
    pub phase_spin1: f64,
    pub phase_spin2: f64,
    /// Largest pairwise difference of the per-state phases.
    pub phase_spread: f64,
    pub max_witness: f64,
    /// Largest distance between a recovered factor and its predicted form.
    pub max_factor_error: f64,
    pub states_checked: usize,
}

impl SwapVerification {
    pub fn is_swap(&self, tol: f64) -> bool {
        self.mapping == Some(Mapping::Swap) && self.phase_spread <= tol && self.max_factor_error <= tol
    }
}

/// Evolve each state to `t`, factor it, and extract the phases in
/// `spin1 ~ (alpha_x, e^{i phi1} beta_x)`, `spin2 ~ (alpha_y, e^{i phi2} beta_y)`
/// where `(x, y)` is `(2, 1)` for a swap and `(1, 2)` for the identity.
pub fn verify_swap(p: &ModelParams, t: f64, states: &[ProductState], tol: f64) -> Result<SwapVerification> {
    let mut per_state = Vec::with_capacity(states.len());
    let mut max_witness: f64 = 0.0;
    let mut invalid = false;
    for s0 in states {
        let psi = evolve(p, s0, t)?.to_vector();
        match schmidt_factor(&psi, tol) {
            Schmidt::NotProduct { residual } => {
                max_witness = max_witness.max(residual);
                invalid = true;
            }
            Schmidt::Product { spin1, spin2, residual, .. } => {
                max_witness = max_witness.max(residual);
                let swap = fit_phases(&spin1, &spin2, &s0.spin2(), &s0.spin1());
                let same = fit_phases(&spin1, &spin2, &s0.spin1(), &s0.spin2());
                per_state.push(if swap.2 <= same.2 { (Mapping::Swap, swap) } else { (Mapping::Identity, same) });
            }
        }
    }
    if invalid || per_state.is_empty() {
        return Ok(SwapVerification {
            mapping: None,
            phase_spin1: f64::NAN,
            phase_spin2: f64::NAN,
            phase_spread: f64::INFINITY,
            max_witness,
            max_factor_error: f64::INFINITY,
            states_checked: states.len(),
        });
    }
    let first = per_state[0];
    let consistent = per_state.iter().all(|(m, _)| *m == first.0);
    let mut spread: f64 = 0.0;
    let mut max_err: f64 = 0.0;
    for (i, (_, (a1, a2, e))) in per_state.iter().enumerate() {
        max_err = max_err.max(*e);
        for (_, (b1, b2, _)) in &per_state[i + 1..] {
            spread = spread.max(wrap_angle(a1 - b1).abs()).max(wrap_angle(a2 - b2).abs());
        }
    }
    let mapping = if consistent && max_err <= tol { first.0 } else { Mapping::Neither };
    Ok(SwapVerification {
        mapping: Some(mapping),
        phase_spin1: (first.1).0,
        phase_spin2: (first.1).1,
        phase_spread: spread,
        max_witness,
        max_factor_error: max_err,
        states_checked: states.len(),
    })
}

/// Phases `(phi1, phi2)` with `f1 ~ (t1[0], e^{i phi1} t1[1])`, `f2 ~ (t2[0], e^{i phi2} t2[1])`,
/// and the worst fit error after applying them.
fn fit_phases(f1: &Vector2, f2: &Vector2, t1: &Vector2, t2: &Vector2) -> (f64, f64, f64) {
    let fit = |f: &Vector2, target: &Vector2| -> (f64, f64) {
        let phi = (f.0[1] * f.0[0].conj() * (target.0[1] * target.0[0].conj()).conj()).arg();
        let model = Vector([target.0[0], target.0[1] * C64::from_polar(1.0, phi)]);
        (phi, f.distance_up_to_phase(&model))
    };
    let (phi1, e1) = fit(f1, t1);
    let (phi2, e2) = fit(f2, t2);
    (phi1, phi2, e1.max(e2))
}

/// Result of composing `e^{i pi/4 s1z} e^{-i pi/4 s2z} sqrt(SWAP) e^{i pi/2 s1z} sqrt(SWAP)`.
#[derive(Clone, Copy, Debug)]
pub struct GateIdentityReport {
    pub composed: Operator4,
    pub sqrt_swap: Operator4,
    /// `max |sqrt(SWAP)^2 - SWAP|`
    pub sqrt_swap_square_error: f64,
    /// Distance to CNOT (control spin 1) after removing the global phase.
    pub deviation_from_cnot: f64,
    /// Distance to the controlled-Z gate after removing the global phase.
    pub deviation_from_cz: f64,
    /// Distance after conjugating the target with Hadamards, which turns CZ into CNOT.
    pub deviation_from_cnot_with_hadamards: f64,
}

pub fn swap_gate() -> Operator4 {
    Operator4::from_fn(|i, j| {
        let image = match j {
            1 => 2,
            2 => 1,
            other => other,
        };
        if i == image {
            ONE
        } else {
            ZERO
        }
    })
}

/// CNOT with spin 1 as control, flipping spin 2 when spin 1 is `|1>`.
pub fn cnot_gate() -> Operator4 {
    let x = Operator2::from_fn(|i, j| if i != j { ONE } else { ZERO });
    let up = Operator2::from_real_diagonal([1.0, 0.0]);
    let down = Operator2::from_real_diagonal([0.0, 1.0]);
    up.kron(&x) + down.kron(&Operator2::identity())
}

/// Phase flip on `|11>`.
pub fn cz_gate() -> Operator4 {
    Operator4::from_real_diagonal([-1.0, 1.0, 1.0, 1.0])
}

/// Principal square root of SWAP from its spectral decomposition.
pub fn sqrt_swap() -> Result<Operator4> {
    let eig = eig_hermitian(&swap_gate())?;
    Ok(eig.map(|lambda| c(lambda, 0.0).sqrt()))
}

pub fn cnot_from_sqrt_swap() -> Result<GateIdentityReport> {
    let root = sqrt_swap()?;
    let z1 = [1.0, 1.0, -1.0, -1.0];
    let z2 = [1.0, -1.0, 1.0, -1.0];
    let rotation = |angles: [f64; 4], theta: f64| {
        Operator4::from_fn(|i, j| if i == j { C64::from_polar(1.0, theta * angles[i]) } else { ZERO })
    };
    let composed = rotation(z1, PI / 4.0) * rotation(z2, -PI / 4.0) * root * rotation(z1, PI / 2.0) * root;
    // Hadamard in the |1>, |0> order
    let h = crate::numerics::Operator([[-ONE, ONE], [ONE, ONE]]).scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let h2 = Operator2::identity().kron(&h);
    Ok(GateIdentityReport {
        composed,
        sqrt_swap: root,
        sqrt_swap_square_error: (root * root).max_abs_diff(&swap_gate()),
        deviation_from_cnot: composed.distance_up_to_phase(&cnot_gate()),
        deviation_from_cz: composed.distance_up_to_phase(&cz_gate()),
        deviation_from_cnot_with_hadamards: (h2 * composed * h2).distance_up_to_phase(&cnot_gate()),
    })
}
