//! Coherent-state algebra shared by both engines.

use num_complex::Complex64;

/// A phase-space amplitude (coherent-state label, displacement, or
/// coherence factor). Dimensionless.
pub type ComplexAmplitude = Complex64;

/// Logarithm of `⟨l2|l1⟩` for normalized coherent states.
///
/// The exponent is an entire function of `(l1, conj(l2))`, so raising the
/// overlap to a real power is done by scaling this value, with no branch cut.
pub fn log_coherent_overlap(l1: ComplexAmplitude, l2: ComplexAmplitude) -> Complex64 {
    -0.5 * l1.norm_sqr() - 0.5 * l2.norm_sqr() + l2.conj() * l1
}

/// `⟨l2|l1⟩ = exp(-|l1|²/2 - |l2|²/2 + l2* l1)`.
pub fn coherent_overlap(l1: ComplexAmplitude, l2: ComplexAmplitude) -> ComplexAmplitude {
    log_coherent_overlap(l1, l2).exp()
}

/// Phase of the displacement composition rule `D(a)D(b) = exp(i Im(a b*)) D(a+b)`.
pub fn displacement_phase(a: ComplexAmplitude, b: ComplexAmplitude) -> f64 {
    (a * b.conj()).im
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn overlap_of_identical_states_is_one() {
        let l = c(0.7, -2.1);
        let o = coherent_overlap(l, l);
        assert_abs_diff_eq!(o.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn overlap_with_vacuum() {
        let o = coherent_overlap(c(1.0, 0.0), c(0.0, 0.0));
        assert_abs_diff_eq!(o.re, (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.re, 0.606531, epsilon = 1e-6);
        assert_eq!(o.im, 0.0);
    }

    #[test]
    fn overlap_magnitude_for_conjugate_pair() {
        let o = coherent_overlap(c(1.0, 1.0), c(1.0, -1.0));
        assert_abs_diff_eq!(o.norm(), (-2.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn displacement_phase_examples() {
        let a = c(0.3, 1.9);
        assert_eq!(displacement_phase(a, a), 0.0);
        assert_eq!(displacement_phase(c(0.0, 1.0), c(1.0, 0.0)), 1.0);
        assert_abs_diff_eq!(displacement_phase(c(2.0, 1.0), c(1.0, -1.0)), 3.0, epsilon = 1e-15);
    }
}
