//! Small dense complex linear algebra and the brute-force oracle.
//!
//! Every operator here lives in a fixed computational basis. For two spins
//! the order is `|11>, |10>, |01>, |00>` with `|1>` = spin up; a single
//! spin uses `|1>, |0>`. The analytic modules are tested against the
//! routines in this file, so nothing here depends on the model.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (relative to `max(1, ||M||_F)`), or after [`MAX_SWEEPS`].
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

const TRACE_TOL: f64 = 1e-9;
const NEG_EIG_REJECT: f64 = -1e-8;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const ZERO: C64 = c(0.0, 0.0);
pub const ONE: C64 = c(1.0, 0.0);
pub const I: C64 = c(0.0, 1.0);

/// An `N`-level ket.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<const N: usize>(pub [C64; N]);

pub type Vector2 = Vector<2>;
pub type Vector4 = Vector<4>;

/// A dense `N x N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator<const N: usize>(pub [[C64; N]; N]);

pub type Operator2 = Operator<2>;
pub type Operator4 = Operator<4>;

impl<const N: usize> Vector<N> {
    pub fn zeros() -> Self {
        Vector([ZERO; N])
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zeros();
        v.0[i] = ONE;
        v
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        self.scale(c(1.0 / self.norm(), 0.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Vector(self.0.map(|z| z * s))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = other.inner(self);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.max_abs_diff(&other.scale(phase))
    }

    /// Index of the first amplitude whose modulus exceeds `tol`.
    pub fn first_nonzero(&self, tol: f64) -> Option<usize> {
        self.0.iter().position(|z| z.norm() > tol)
    }

    /// Rotate the global phase so the first nonzero amplitude is real positive.
    pub fn phase_normalized(&self, tol: f64) -> Self {
        match self.first_nonzero(tol) {
            Some(i) => {
                let z = self.0[i];
                self.scale(z.conj() / z.norm())
            }
            None => *self,
        }
    }

    /// `|self><other|`
    pub fn outer(&self, other: &Self) -> Operator<N> {
        Operator::from_fn(|i, j| self.0[i] * other.0[j].conj())
    }
}

impl<const N: usize> Index<usize> for Vector<N> {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl<const N: usize> Operator<N> {
    pub fn zeros() -> Self {
        Operator([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diagonal(d: [f64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { c(d[i], 0.0) } else { ZERO })
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn apply(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = Vector::zeros();
        for i in 0..N {
            out.0[i] = (0..N).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |M_ij - conj(M_ji)|`
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in i..N {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Self::identity()) <= tol
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Max-norm distance after aligning the global phase of `other` to
    /// `self` (phase chosen from the Hilbert-Schmidt overlap).
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap = (other.adjoint() * *self).trace();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
        self.max_abs_diff(&other.scale(phase))
    }

    fn hermitian_part(&self) -> Self {
        Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i].conj()) * 0.5)
    }
}

impl Operator2 {
    pub fn kron(&self, other: &Operator2) -> Operator4 {
        Operator4::from_fn(|i, j| self.0[i / 2][j / 2] * other.0[i % 2][j % 2])
    }

    pub fn determinant(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl Vector2 {
    pub fn kron(&self, other: &Vector2) -> Vector4 {
        Vector([self.0[0] * other.0[0], self.0[0] * other.0[1], self.0[1] * other.0[0], self.0[1] * other.0[1]])
    }
}

impl<const N: usize> Index<(usize, usize)> for Operator<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Operator<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Operator<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for Operator<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Mul for Operator<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct Eigen<const N: usize> {
    /// Ascending.
    pub values: [f64; N],
    /// Orthonormal, `vectors[i]` belongs to `values[i]`; each is
    /// phase-normalized so its first nonzero amplitude is real positive.
    pub vectors: [Vector<N>; N],
    pub sweeps: usize,
}

impl<const N: usize> Eigen<N> {
    /// `sum_i f(lambda_i) |v_i><v_i|`
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Operator<N> {
        let mut out = Operator::zeros();
        for (lambda, v) in self.values.iter().zip(self.vectors.iter()) {
            let w = f(*lambda);
            for i in 0..N {
                for j in 0..N {
                    out.0[i][j] += w * v.0[i] * v.0[j].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_norm<const N: usize>(a: &Operator<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each pivot `(p, q)` is first made real by a diagonal phase and then
/// annihilated by a real Givens rotation. Diagonal updates use the
/// `a_pp - t|a_pq|`, `a_qq + t|a_pq|` form, so swapping `p` and `q`
/// produces bitwise the same pair of eigenvalues.
pub fn eig_hermitian<const N: usize>(m: &Operator<N>) -> Result<Eigen<N>> {
    let asym = m.max_asymmetry();
    if !(asym <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { max_asymmetry: asym });
    }
    let mut a = m.hermitian_part();
    for i in 0..N {
        a.0[i][i].im = 0.0;
    }
    let mut v = Operator::<N>::identity();
    let threshold = JACOBI_OFF_TOL * a.frobenius().max(1.0);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_norm(&a) > threshold {
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase_conj = apq.conj() / r;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // columns p, q of the rotation D*P
                let vqp = phase_conj * (-sn);
                let vqq = phase_conj * cs;

                for k in 0..N {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    let new_kp = akp * cs + akq * vqp;
                    let new_kq = akp * sn + akq * vqq;
                    a.0[k][p] = new_kp;
                    a.0[p][k] = new_kp.conj();
                    a.0[k][q] = new_kq;
                    a.0[q][k] = new_kq.conj();
                }
                a.0[p][p] = c(app - t * r, 0.0);
                a.0[q][q] = c(aqq + t * r, 0.0);
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;

                for k in 0..N {
                    let wkp = v.0[k][p];
                    let wkq = v.0[k][q];
                    v.0[k][p] = wkp * cs + wkq * vqp;
                    v.0[k][q] = wkp * sn + wkq * vqq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vector<N>)> = (0..N)
        .map(|j| {
            let col = Vector(std::array::from_fn(|i| v.0[i][j]));
            (a.0[j][j].re, col.phase_normalized(1e-12))
        })
        .collect();
    sort_eigenpairs(&mut pairs);

    Ok(Eigen { values: std::array::from_fn(|i| pairs[i].0), vectors: std::array::from_fn(|i| pairs[i].1), sweeps })
}

/// Ascending by eigenvalue; within a cluster of (numerically) equal
/// eigenvalues, by first-nonzero index and then lexicographically by the
/// phase-normalized amplitudes, largest first.
fn sort_eigenpairs<const N: usize>(pairs: &mut [(f64, Vector<N>)]) {
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let scale = pairs.iter().map(|p| p.0.abs()).fold(1.0, f64::max);
    let tie = 1e-12 * scale;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 - pairs[end - 1].0 <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| tie_key(&x.1).cmp_key(&tie_key(&y.1)));
        start = end;
    }
}

struct TieKey(usize, Vec<f64>);

impl TieKey {
    fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.0.cmp(&other.0).then_with(|| {
            for (a, b) in self.1.iter().zip(other.1.iter()) {
                match b.total_cmp(a) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

fn tie_key<const N: usize>(v: &Vector<N>) -> TieKey {
    let first = v.first_nonzero(1e-12).unwrap_or(N);
    TieKey(first, v.0.iter().flat_map(|z| [z.re, z.im]).collect())
}

/// `exp(-i M t)` via spectral decomposition.
pub fn expm_i<const N: usize>(m: &Operator<N>, t: f64) -> Result<Operator<N>> {
    let eig = eig_hermitian(m)?;
    Ok(eig.map(|lambda| C64::from_polar(1.0, -lambda * t)))
}

/// `exp(-M / T) / tr exp(-M / T)` via spectral decomposition, with the
/// exponents shifted by the smallest eigenvalue.
pub fn gibbs_oracle<const N: usize>(m: &Operator<N>, temperature: f64) -> Result<Operator<N>> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let eig = eig_hermitian(m)?;
    let lowest = eig.values[0];
    let weights = eig.values.map(|e| (-(e - lowest) / temperature).exp());
    let total: f64 = weights.iter().sum();
    let mut rho = Operator::zeros();
    for (w, v) in weights.iter().zip(eig.vectors.iter()) {
        rho = rho + v.outer(v).scale(c(w / total, 0.0));
    }
    Ok(rho)
}

/// Validate a density matrix and return its eigenvalues with the small
/// negative window clamped to zero.
pub fn density_spectrum<const N: usize>(rho: &Operator<N>) -> Result<[f64; N]> {
    let asym = rho.max_asymmetry();
    if !(asym <= HERMITIAN_TOL) {
        return Err(Error::InvalidDensity { reason: format!("not Hermitian (asymmetry {asym:.3e})") });
    }
    let tr = rho.trace();
    if !((tr - ONE).norm() <= TRACE_TOL) {
        return Err(Error::InvalidDensity { reason: format!("trace {} != 1", tr.re) });
    }
    let eig = eig_hermitian(rho)?;
    if eig.values[0] < NEG_EIG_REJECT {
        return Err(Error::InvalidDensity { reason: format!("negative eigenvalue {:.3e}", eig.values[0]) });
    }
    Ok(eig.values.map(|p| if p < 0.0 { 0.0 } else { p }))
}

/// `-sum p log2 p` over the eigenvalues of `rho`, in bits.
pub fn von_neumann_entropy<const N: usize>(rho: &Operator<N>) -> Result<f64> {
    let spectrum = density_spectrum(rho)?;
    Ok(shannon_bits(&spectrum))
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_bits(probabilities: &[f64]) -> f64 {
    let s: f64 = probabilities.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum();
    // -0.0 reads badly in reports
    if s == 0.0 {
        0.0
    } else {
        -s
    }
}

/// Reduced density matrix of spin 1 for a two-spin density matrix.
pub fn partial_trace_first(rho: &Operator4) -> Result<Operator2> {
    density_spectrum(rho)?;
    Ok(Operator2::from_fn(|r, col| (0..2).map(|s| rho.0[2 * r + s][2 * col + s]).sum()))
}

/// Reduced density matrix of spin 1 for `psi = a|11> + b|10> + c|01> + d|00>`:
/// `rho_11 = |a|^2+|b|^2`, `rho_00 = |c|^2+|d|^2`, `rho_10 = a c* + b d*`.
pub fn partial_trace_first_pure(psi: &Vector4) -> Result<Operator2> {
    let norm = psi.norm();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm });
    }
    Ok(reduced_spin1_entries(psi))
}

pub(crate) fn reduced_spin1_entries(psi: &Vector4) -> Operator2 {
    let [a, b, cc, d] = psi.0;
    let rho11 = a.norm_sqr() + b.norm_sqr();
    let rho00 = cc.norm_sqr() + d.norm_sqr();
    let rho10 = a * cc.conj() + b * d.conj();
    Operator([[c(rho11, 0.0), rho10], [rho10.conj(), c(rho00, 0.0)]])
}

/// Outcome of trying to write a two-spin pure state as a product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schmidt {
    Product {
        /// Unit vector, first nonzero amplitude real nonnegative.
        spin1: Vector2,
        /// Unit vector, first nonzero amplitude real nonnegative.
        spin2: Vector2,
        /// `psi ~= exp(i global_phase) spin1 (x) spin2`
        global_phase: f64,
        /// `|ad - bc|`
        residual: f64,
        reconstruction_error: f64,
    },
    NotProduct {
        residual: f64,
    },
}

/// Factor `psi` through its dominant singular pair when `|ad - bc| <= tol`.
pub fn schmidt_factor(psi: &Vector4, tol: f64) -> Schmidt {
    let [a, b, cc, d] = psi.0;
    let residual = (a * d - b * cc).norm();
    if residual > tol {
        return Schmidt::NotProduct { residual };
    }
    // coefficient matrix M[i][j], i = spin 1, j = spin 2
    let m = Operator([[a, b], [cc, d]]);
    let gram = m * m.adjoint();
    let u = match eig_hermitian(&gram) {
        Ok(eig) => eig.vectors[1],
        Err(_) => Vector2::basis(0),
    };
    let u = u.phase_normalized(1e-12);
    let raw_v = Vector([
        u.0[0].conj() * m.0[0][0] + u.0[1].conj() * m.0[1][0],
        u.0[0].conj() * m.0[0][1] + u.0[1].conj() * m.0[1][1],
    ]);
    let v_norm = raw_v.norm();
    let v_unit = if v_norm > 0.0 { raw_v.scale(c(1.0 / v_norm, 0.0)) } else { Vector2::basis(0) };
    let v = v_unit.phase_normalized(1e-12);
    // v_unit = exp(i phase) v
    let global = match v.first_nonzero(1e-12) {
        Some(i) => (v_unit.0[i] / v.0[i]).arg(),
        None => 0.0,
    };
    let rebuilt = u.kron(&v).scale(C64::from_polar(1.0, global));
    Schmidt::Product {
        spin1: u,
        spin2: v,
        global_phase: global,
        residual,
        reconstruction_error: rebuilt.max_abs_diff(psi),
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}
