//! Numerical toolkit for the one-dimensional thermal (Luttinger) Hamiltonian
//! `H_T = (1 + λx)(-d²/dx²) - λ d/dx`.
//!
//! Every closed-form object of the theory is implemented next to an
//! independent numerical route so the two can be cross-checked:
//!
//! * [`specfun`]: J₀, I₀, K₀ and the Kelvin pair ker/kei
//! * [`quadrature`]: adaptive Gauss–Kronrod, principal-value windows, Laplace integrals
//! * [`wavefunction`]: sampled states, inner products, Fourier transforms
//! * [`kernels`]: the 𝔹, 𝕌, ℤ, Green and Π_θ-resolvent kernels
//! * [`operators`]: I, L_θ, S_λ, the Möbius flow, V_θ(t), U_T(t), κ₀/κ₁, Hilbert transform
//! * [`spectral`]: spectral densities and integrated densities of states
//! * [`scattering`]: wave operators and the S-matrix of convolution potentials
//! * [`classical`]: closed-form and RK4 classical dynamics
//! * [`hankel`]: eigenfunctions of `T = -x d²/dx² - d/dx` and the Hankel-type transform

pub mod classical;
pub mod error;
pub mod hankel;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod scattering;
pub mod specfun;
pub mod spectral;
pub mod wavefunction;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Sign function with `sgn(0) = 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Heaviside step with `Θ(0) = 1/2`.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// The imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
