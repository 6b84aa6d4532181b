//! Truncated Fock-space master-equation oracle.
//!
//! The joint state is a `2d × 2d` density matrix ordered qubit-major,
//! `|q⟩ ⊗ |n⟩ ↦ q·d + n`. The dynamics is
//!
//! ```text
//! ρ̇ = -i[H, ρ] + 2γ (b ρ b† - {b†b, ρ}/2),   H = η |0⟩⟨0| ⊗ (b† e^{-iφ} + b e^{iφ})
//! ```
//!
//! integrated either by the Trotter split `(D_dt U_dt)^N` or by a direct
//! fourth-order Runge-Kutta scheme at a ten times finer step. Only the
//! oscillator is acted on, so both propagators are applied block by block.

mod ops;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::coherent::{log_coherent_overlap, ComplexAmplitude};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PhiSchedule, QubitReadout};
use ops::{Block, DampingChannel, Quadrature, QuadratureExp};

/// Populations at or above this level in the top band fail the check.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

/// Number of RK4 sub-steps per Trotter step.
pub const RK4_REFINEMENT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationReport {
    pub dim_fock: usize,
    /// Summed population of the highest `⌈d/10⌉` Fock levels.
    pub top_band_population: f64,
    pub ok: bool,
}

impl fmt::Display for TruncationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "top-band population {:.3e} at d_F = {} (threshold {:.0e})",
            self.top_band_population, self.dim_fock, TRUNCATION_THRESHOLD
        )
    }
}

/// Smallest `d_F` satisfying `|α|² + 6|α| + 10 <= d_F`.
pub fn required_dim(alpha_max: f64) -> usize {
    let a = alpha_max.abs();
    (a * a + 6.0 * a + 10.0).ceil() as usize
}

fn check_dim(alpha: ComplexAmplitude, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::param("d_F", format!("must be >= 2, got {dim}")));
    }
    let need = required_dim(alpha.norm());
    if need > dim {
        return Err(Error::FockDimension { amplitude: alpha.norm(), required: need, available: dim });
    }
    Ok(())
}

/// A truncated coherent state with the norm lost to truncation.
#[derive(Debug, Clone)]
pub struct CoherentVector {
    pub vector: DVector<Complex64>,
    /// `1 - Σ_n |c_n|²` before renormalization.
    pub norm_defect: f64,
}

/// `e^{-|α|²/2} αⁿ / √(n!)` for `n < d`, renormalized.
pub fn coherent_state_vector(alpha: ComplexAmplitude, dim: usize) -> Result<CoherentVector> {
    check_dim(alpha, dim)?;
    let mut v = DVector::<Complex64>::zeros(dim);
    v[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        v[n] = v[n - 1] * alpha / (n as f64).sqrt();
    }
    let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    v /= Complex64::new(norm_sq.sqrt(), 0.0);
    Ok(CoherentVector { vector: v, norm_defect: 1.0 - norm_sq })
}

/// `H/ħ = η |0⟩⟨0| ⊗ (b† e^{-iφ} + b e^{iφ})` as a dense `2d × 2d` matrix.
pub fn build_hamiltonian(p: &ModelParams, phi: f64, dim: usize) -> Result<DMatrix<Complex64>> {
    if dim < 2 {
        return Err(Error::param("d_F", format!("must be >= 2, got {dim}")));
    }
    let mut h = DMatrix::zeros(2 * dim, 2 * dim);
    for n in 0..dim - 1 {
        let v = Complex64::from_polar(p.eta() * ((n + 1) as f64).sqrt(), -phi);
        h[(n + 1, n)] = v;
        h[(n, n + 1)] = v.conj();
    }
    Ok(h)
}

/// Integrator for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    TrotterSplit,
    DirectRk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_fock: usize,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(dim_fock: usize, data: DMatrix<Complex64>) -> Result<Self> {
        if dim_fock < 2 || data.nrows() != 2 * dim_fock || data.ncols() != 2 * dim_fock {
            return Err(Error::param("density matrix", format!("expected {0}x{0} for d_F = {dim_fock}", 2 * dim_fock)));
        }
        Ok(DensityMatrix { dim_fock, data })
    }

    /// `|ψ⟩⟨ψ|` for a joint vector of length `2d`.
    pub fn pure(dim_fock: usize, psi: &DVector<Complex64>) -> Result<Self> {
        Self::from_matrix(dim_fock, psi * psi.adjoint())
    }

    /// `|+⟩⟨+| ⊗ |α⟩⟨α|`.
    pub fn plus_coherent(alpha: ComplexAmplitude, dim_fock: usize) -> Result<Self> {
        Self::branches(alpha, alpha, dim_fock)
    }

    /// `|ψ⟩⟨ψ|` with `|ψ⟩ = (|0,λ0⟩ + |1,λ1⟩)/√2`.
    pub fn branches(lambda0: ComplexAmplitude, lambda1: ComplexAmplitude, dim_fock: usize) -> Result<Self> {
        let a = coherent_state_vector(lambda0, dim_fock)?.vector;
        let b = coherent_state_vector(lambda1, dim_fock)?.vector;
        let mut psi = DVector::zeros(2 * dim_fock);
        psi.rows_mut(0, dim_fock).copy_from(&a);
        psi.rows_mut(dim_fock, dim_fock).copy_from(&b);
        psi /= Complex64::new(2f64.sqrt(), 0.0);
        Self::pure(dim_fock, &psi)
    }

    pub fn dim_fock(&self) -> usize {
        self.dim_fock
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// `max |ρ - ρ†|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.data - self.data.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.data + self.data.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.data - &other.data).norm()
    }

    /// Oscillator block `⟨q|ρ|r⟩`.
    pub fn block(&self, q: usize, r: usize) -> DMatrix<Complex64> {
        let d = self.dim_fock;
        self.data.view((q * d, r * d), (d, d)).into_owned()
    }

    /// `Tr(ρ (1 ⊗ b))`.
    pub fn mean_annihilation(&self) -> Complex64 {
        let d = self.dim_fock;
        let mut acc = Complex64::new(0.0, 0.0);
        for q in 0..2 {
            for n in 0..d - 1 {
                acc += ((n + 1) as f64).sqrt() * self.data[(q * d + n + 1, q * d + n)];
            }
        }
        acc
    }

    pub fn truncation_report(&self) -> TruncationReport {
        let d = self.dim_fock;
        let band = d.div_ceil(10);
        let pop: f64 = (0..2).flat_map(|q| (d - band..d).map(move |n| q * d + n)).map(|i| self.data[(i, i)].re).sum();
        TruncationReport { dim_fock: d, top_band_population: pop, ok: pop < TRUNCATION_THRESHOLD }
    }

    fn into_blocks(self) -> [Block; 4] {
        [self.block(0, 0), self.block(0, 1), self.block(1, 0), self.block(1, 1)]
    }

    fn from_blocks(dim_fock: usize, blocks: &[Block; 4]) -> Self {
        let d = dim_fock;
        let mut data = DMatrix::zeros(2 * d, 2 * d);
        for (k, b) in blocks.iter().enumerate() {
            let (q, r) = (k / 2, k % 2);
            data.view_mut((q * d, r * d), (d, d)).copy_from(b);
        }
        DensityMatrix { dim_fock, data }
    }
}

/// `Tr_m ⟨0|ρ|1⟩`.
pub fn extract_qubit_coherence(rho: &DensityMatrix) -> ComplexAmplitude {
    let d = rho.dim_fock;
    (0..d).map(|n| rho.data[(n, d + n)]).sum()
}

/// `|±⟩` readout from the normalized coherence `2 Tr_m⟨0|ρ|1⟩`. The
/// returned `theta` is folded into `(-π, π]`.
pub fn readout(rho: &DensityMatrix) -> QubitReadout {
    QubitReadout::from_coherence(2.0 * extract_qubit_coherence(rho))
}

/// `dρ/dt` at drive phase `phi`. The result is a traceless Hermitian
/// matrix, not a state.
pub fn lindblad_rhs(rho: &DensityMatrix, p: &ModelParams, phi: f64) -> DMatrix<Complex64> {
    let d = rho.dim_fock;
    let blocks = rho.clone().into_blocks();
    let out = Generator::new(p.eta(), p.gamma(), phi, d).apply(&blocks);
    DensityMatrix::from_blocks(d, &out).data
}

/// Evolve `rho0` through `schedule`. The truncation band is checked on the
/// initial state and after every segment.
pub fn evolve(rho0: &DensityMatrix, schedule: &PhiSchedule, p: &ModelParams, method: Method) -> Result<DensityMatrix> {
    p.check_step()?;
    let d = rho0.dim_fock;
    check_truncation(rho0)?;
    let mut blocks = rho0.clone().into_blocks();
    for seg in schedule.segments() {
        let (n, h) = seg.substeps(p.dt());
        let eta = p.eta() * seg.drive;
        match method {
            Method::TrotterSplit => {
                let unitary = QuadratureExp::new(Quadrature::new(seg.phi, d), Complex64::new(0.0, -eta * h));
                let damping = (p.gamma() > 0.0).then(|| DampingChannel::new((-p.gamma() * h).exp(), d));
                for _ in 0..n {
                    trotter_step(&mut blocks, &unitary, damping.as_ref());
                }
            }
            Method::DirectRk4 => {
                let gen = Generator::new(eta, p.gamma(), seg.phi, d);
                let hh = h / RK4_REFINEMENT as f64;
                for _ in 0..n * RK4_REFINEMENT {
                    rk4_step(&mut blocks, &gen, hh);
                }
            }
        }
        let rho = DensityMatrix::from_blocks(d, &blocks);
        if rho.data.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        check_truncation(&rho)?;
    }
    Ok(DensityMatrix::from_blocks(d, &blocks))
}

fn check_truncation(rho: &DensityMatrix) -> Result<()> {
    let report = rho.truncation_report();
    if report.ok {
        Ok(())
    } else {
        Err(Error::Truncation(report))
    }
}

fn trotter_step(blocks: &mut [Block; 4], unitary: &QuadratureExp, damping: Option<&DampingChannel>) {
    // U = |0⟩⟨0| ⊗ V + |1⟩⟨1| ⊗ 1
    blocks[0] = unitary.right_adjoint(&unitary.left(&blocks[0]));
    blocks[1] = unitary.left(&blocks[1]);
    blocks[2] = unitary.right_adjoint(&blocks[2]);
    if let Some(ch) = damping {
        for b in blocks.iter_mut() {
            *b = ch.apply(b);
        }
    }
}

/// Block form of the Lindblad generator.
struct Generator {
    x: Quadrature,
    eta: f64,
    kappa: f64,
}

impl Generator {
    fn new(eta: f64, gamma: f64, phi: f64, dim: usize) -> Self {
        Generator { x: Quadrature::new(phi, dim), eta, kappa: 2.0 * gamma }
    }

    fn apply(&self, b: &[Block; 4]) -> [Block; 4] {
        let mi = Complex64::new(0.0, -self.eta);
        let pi = Complex64::new(0.0, self.eta);
        let mut out = [
            self.x.left(mi, &b[0]) + self.x.right(pi, &b[0]),
            self.x.left(mi, &b[1]),
            self.x.right(pi, &b[2]),
            Block::zeros(b[3].nrows(), b[3].ncols()),
        ];
        if self.kappa > 0.0 {
            for (o, src) in out.iter_mut().zip(b.iter()) {
                *o += ops::dissipator(self.kappa, src);
            }
        }
        out
    }
}

fn rk4_step(b: &mut [Block; 4], gen: &Generator, h: f64) {
    let axpy = |base: &[Block; 4], k: &[Block; 4], s: f64| -> [Block; 4] {
        let s = Complex64::new(s, 0.0);
        std::array::from_fn(|i| &base[i] + &k[i] * s)
    };
    let k1 = gen.apply(b);
    let k2 = gen.apply(&axpy(b, &k1, 0.5 * h));
    let k3 = gen.apply(&axpy(b, &k2, 0.5 * h));
    let k4 = gen.apply(&axpy(b, &k3, h));
    let w = Complex64::new(h / 6.0, 0.0);
    for i in 0..4 {
        b[i] += (&k1[i] + &k2[i] * Complex64::new(2.0, 0.0) + &k3[i] * Complex64::new(2.0, 0.0) + &k4[i]) * w;
    }
}

/// Damping of a coherent dyad:
/// `|λ1⟩⟨λ2| ↦ ⟨λ2|λ1⟩^{1-e^{-2γt}} |λ1 e^{-γt}⟩⟨λ2 e^{-γt}|` (a `d × d` matrix).
pub fn dissipative_dyadic(
    l1: ComplexAmplitude,
    l2: ComplexAmplitude,
    gamma: f64,
    t: f64,
    dim: usize,
) -> Result<DMatrix<Complex64>> {
    if !(gamma >= 0.0) || !(t >= 0.0) {
        return Err(Error::param("gamma, t", "must be >= 0"));
    }
    check_dim(l1, dim)?;
    check_dim(l2, dim)?;
    let s = (-gamma * t).exp();
    let weight = (-(-2.0 * gamma * t).exp_m1() * log_coherent_overlap(l1, l2)).exp();
    let a = coherent_state_vector(l1 * s, dim)?.vector;
    let b = coherent_state_vector(l2 * s, dim)?.vector;
    Ok(a * b.adjoint() * weight)
}

/// Evolve the dyad `|λ1⟩⟨λ2|` under pure damping by embedding it as the
/// coherence block of `(|0,λ1⟩ + |1,λ2⟩)/√2` and running [`evolve`] at `η = 0`.
pub fn evolve_dyad(
    l1: ComplexAmplitude,
    l2: ComplexAmplitude,
    gamma: f64,
    t: f64,
    dim: usize,
    dt: f64,
    method: Method,
) -> Result<DMatrix<Complex64>> {
    let rho = DensityMatrix::branches(l1, l2, dim)?;
    let p = ModelParams::new(0.0, gamma, dt)?;
    let out = evolve(&rho, &PhiSchedule::from_pairs(&[(t, 0.0)])?, &p, method)?;
    Ok(out.block(0, 1) * Complex64::new(2.0, 0.0))
}
