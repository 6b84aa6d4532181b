//! Structured kernels on `d × d` oscillator blocks (column-major).

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) type Block = DMatrix<Complex64>;

/// `X_φ = b† e^{-iφ} + b e^{iφ}`, stored by its sub-diagonal
/// `X[n+1][n] = √(n+1) e^{-iφ}`.
#[derive(Debug, Clone)]
pub(crate) struct Quadrature {
    lower: Vec<Complex64>,
}

impl Quadrature {
    pub fn new(phi: f64, dim: usize) -> Self {
        let rot = Complex64::from_polar(1.0, -phi);
        Quadrature { lower: (1..dim).map(|n| rot * (n as f64).sqrt()).collect() }
    }

    fn dim(&self) -> usize {
        self.lower.len() + 1
    }

    /// Upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        2.0 * ((self.dim() - 1) as f64).sqrt()
    }

    /// `scale · X · a`
    pub fn left(&self, scale: Complex64, a: &Block) -> Block {
        let d = self.dim();
        let mut out = Block::zeros(d, d);
        let src = a.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..d {
            let col = &src[j * d..(j + 1) * d];
            let o = &mut dst[j * d..(j + 1) * d];
            for i in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                if i >= 1 {
                    acc += self.lower[i - 1] * col[i - 1];
                }
                if i + 1 < d {
                    acc += self.lower[i].conj() * col[i + 1];
                }
                o[i] = scale * acc;
            }
        }
        out
    }

    /// `scale · a · X`
    pub fn right(&self, scale: Complex64, a: &Block) -> Block {
        let d = self.dim();
        let mut out = Block::zeros(d, d);
        let src = a.as_slice();
        let dst = out.as_mut_slice();
        for j in 0..d {
            let o = &mut dst[j * d..(j + 1) * d];
            if j >= 1 {
                let x = scale * self.lower[j - 1].conj();
                let col = &src[(j - 1) * d..j * d];
                for i in 0..d {
                    o[i] += x * col[i];
                }
            }
            if j + 1 < d {
                let x = scale * self.lower[j];
                let col = &src[(j + 1) * d..(j + 2) * d];
                for i in 0..d {
                    o[i] += x * col[i];
                }
            }
        }
        out
    }
}

/// Applies `V = exp(c X)` to blocks by a truncated Taylor series,
/// sub-stepped so that each factor has norm below 1/2.
#[derive(Debug, Clone)]
pub(crate) struct QuadratureExp {
    x: Quadrature,
    c: Complex64,
    repeats: usize,
    terms: usize,
}

impl QuadratureExp {
    pub fn new(x: Quadrature, c: Complex64) -> Self {
        let r = c.norm() * x.norm_bound();
        let repeats = (r / 0.5).ceil().max(1.0) as usize;
        let c = c / repeats as f64;
        let r = r / repeats as f64;
        let mut terms = 0;
        let mut bound = 1.0;
        while bound > 1e-18 && terms < 60 {
            terms += 1;
            bound *= r / terms as f64;
        }
        QuadratureExp { x, c, repeats, terms }
    }

    /// `V · a`
    pub fn left(&self, a: &Block) -> Block {
        let mut acc = a.clone();
        for _ in 0..self.repeats {
            let mut term = acc.clone();
            for k in 1..=self.terms {
                term = self.x.left(self.c / k as f64, &term);
                acc += &term;
            }
        }
        acc
    }

    /// `a · V†`
    pub fn right_adjoint(&self, a: &Block) -> Block {
        let c = self.c.conj();
        let mut acc = a.clone();
        for _ in 0..self.repeats {
            let mut term = acc.clone();
            for k in 1..=self.terms {
                term = self.x.right(c / k as f64, &term);
                acc += &term;
            }
        }
        acc
    }
}

/// Exact amplitude-damping channel on a truncated block:
/// `A'_{mn} = s^{m+n} Σ_k √(C(m+k,k) C(n+k,k)) p^k A_{m+k,n+k}`,
/// with amplitude factor `s` and `p = 1 - s²`.
#[derive(Debug, Clone)]
pub(crate) struct DampingChannel {
    dim: usize,
    kmax: usize,
    s_pow: Vec<f64>,
    /// `coeff[m * (kmax+1) + k] = √(C(m+k,k) p^k)`
    coeff: Vec<f64>,
}

impl DampingChannel {
    pub fn new(s: f64, dim: usize) -> Self {
        let p = 1.0 - s * s;
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..2 * dim).scan(0.0, |acc, n| {
                *acc += (n as f64).ln();
                Some(*acc)
            }))
            .collect();
        let ln_binom = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
        let kmax = if p <= 0.0 {
            0
        } else {
            let ln_p = p.ln();
            (1..dim)
                .find(|&k| (0..dim - k).all(|m| ln_binom(m + k, k) + k as f64 * ln_p < (1e-20f64).ln()))
                .unwrap_or(dim - 1)
        };
        let mut coeff = vec![0.0; dim * (kmax + 1)];
        for m in 0..dim {
            for k in 0..=kmax.min(dim - 1 - m) {
                let ln_c = ln_binom(m + k, k) + if k == 0 { 0.0 } else { k as f64 * p.ln() };
                coeff[m * (kmax + 1) + k] = (0.5 * ln_c).exp();
            }
        }
        let s_pow = (0..dim).map(|m| s.powi(m as i32)).collect();
        DampingChannel { dim, kmax, s_pow, coeff }
    }

    pub fn apply(&self, a: &Block) -> Block {
        let d = self.dim;
        let kw = self.kmax + 1;
        let src = a.as_slice();
        let mut out = Block::zeros(d, d);
        let dst = out.as_mut_slice();
        for n in 0..d {
            for m in 0..d {
                let kk = self.kmax.min(d - 1 - m.max(n));
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..=kk {
                    acc += src[(n + k) * d + m + k] * (self.coeff[m * kw + k] * self.coeff[n * kw + k]);
                }
                dst[n * d + m] = acc * (self.s_pow[m] * self.s_pow[n]);
            }
        }
        out
    }
}

/// `κ (b A b† - (n̂ A + A n̂)/2)` with `κ` the energy decay rate.
pub(crate) fn dissipator(kappa: f64, a: &Block) -> Block {
    let d = a.nrows();
    let src = a.as_slice();
    let mut out = Block::zeros(d, d);
    let dst = out.as_mut_slice();
    for n in 0..d {
        for m in 0..d {
            let mut v = -0.5 * (m + n) as f64 * src[n * d + m];
            if m + 1 < d && n + 1 < d {
                v += ((m + 1) as f64 * (n + 1) as f64).sqrt() * src[(n + 1) * d + m + 1];
            }
            dst[n * d + m] = kappa * v;
        }
    }
    out
}
