//! The q-deformed oscillator: model parameters, stationary-state
//! wavefunctions in both representations, and the energy spectrum.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polynomials::{self, hermite, MAX_DEGREE};
use crate::qseries::{ln_q_factorial, q_number, QBase};

/// Physical constants `m, ω, ħ` and the deformation step `h`.
///
/// Derived: `λ = mω/2ħ` and `q = exp(-λh²)`, with `q = 1` exactly when `h = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    m: f64,
    omega: f64,
    hbar: f64,
    h: f64,
    lambda: f64,
    q: QBase,
}

impl ModelParams {
    pub fn new(m: f64, omega: f64, hbar: f64, h: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("omega", omega), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::Domain(format!("h must be nonnegative and finite, got {h}")));
        }
        let lambda = m * omega / (2.0 * hbar);
        let q = if h == 0.0 { 1.0 } else { (-lambda * h * h).exp() };
        if q == 0.0 {
            return Err(Error::Domain(format!("q = exp(-λh²) underflows for h = {h}")));
        }
        Ok(ModelParams { m, omega, hbar, h, lambda, q: QBase::new(q)? })
    }

    /// Natural units `m = ω = ħ = 1`.
    pub fn natural(h: f64) -> Result<Self> {
        ModelParams::new(1.0, 1.0, 1.0, h)
    }

    /// Parameters from `q` instead of `h`, via `h = sqrt(-ln q / λ)`.
    pub fn from_q(m: f64, omega: f64, hbar: f64, q: f64) -> Result<Self> {
        let base = QBase::new(q)?;
        let lambda = m * omega / (2.0 * hbar);
        let h = if base.is_classical() { 0.0 } else { (-base.ln() / lambda).sqrt() };
        ModelParams::new(m, omega, hbar, h)
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn q(&self) -> QBase {
        self.q
    }

    pub fn is_classical(&self) -> bool {
        self.h == 0.0
    }

    /// Classical energy `p²/2m + mω²x²/2` in units of `ħω`.
    pub fn reduced_energy(&self, p: f64, x: f64) -> f64 {
        (p * p / (2.0 * self.m) + 0.5 * self.m * self.omega * self.omega * x * x)
            / (self.hbar * self.omega)
    }
}

/// Stationary state with photon number `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuantumState {
    n: usize,
}

impl QuantumState {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_DEGREE {
            return Err(Error::Domain(format!("photon number {n} exceeds {MAX_DEGREE}")));
        }
        Ok(QuantumState { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct EnergyLevel(f64);

impl EnergyLevel {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(-i)^n`
pub(crate) fn neg_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `c_n = (2λ/π)^{1/4} (-i)^n q^{n/2} (q;q)_n^{-1/2}`.
///
/// Undefined at `h = 0` for `n > 0`, where `(q;q)_n` vanishes.
pub fn norm_const(state: QuantumState, params: &ModelParams) -> Result<Complex64> {
    let n = state.n();
    if n == 0 {
        return Ok(Complex64::new((2.0 * params.lambda / PI).powf(0.25), 0.0));
    }
    if params.is_classical() {
        return Err(Error::Domain("c_n is singular at h = 0; use the oscillator forms".into()));
    }
    Ok(norm_const_unchecked(n, params))
}

fn norm_const_unchecked(n: usize, params: &ModelParams) -> Complex64 {
    let q = params.q;
    let ln_mag = 0.25 * (2.0 * params.lambda / PI).ln() + 0.5 * n as f64 * q.ln()
        - 0.5 * ln_q_factorial(n, q);
    neg_i_pow(n) * ln_mag.exp()
}

/// Position-space wavefunction `c_n H_n(-e^{-2iλhx} | q) e^{-λx²}`.
pub fn psi_x(state: QuantumState, x: f64, params: &ModelParams) -> Complex64 {
    if params.is_classical() {
        return Complex64::new(psi_x_ho(state, x, params), 0.0);
    }
    let lambda = params.lambda;
    let arg = -Complex64::from_polar(1.0, -2.0 * lambda * params.h * x);
    let rs = polynomials::rogers_szego_sum(state.n(), arg, params.q);
    norm_const_unchecked(state.n(), params) * rs * (-lambda * x * x).exp()
}

/// Momentum-space wavefunction
/// `c_n (q;q)_n / sqrt(2λħ) · S_n(q^{-1/2} e^{-hp/ħ}; q) · e^{-p²/4λħ²}`.
pub fn psi_p(state: QuantumState, p: f64, params: &ModelParams) -> Complex64 {
    if params.is_classical() {
        return psi_p_ho(state, p, params);
    }
    let n = state.n();
    let (lambda, hbar, q) = (params.lambda, params.hbar, params.q);
    // c_n (q;q)_n, assembled in logs
    let ln_mag = 0.25 * (2.0 * lambda / PI).ln() + 0.5 * n as f64 * q.ln()
        + 0.5 * ln_q_factorial(n, q)
        - 0.5 * (2.0 * lambda * hbar).ln();
    let arg = (-0.5 * q.ln() - params.h * p / hbar).exp();
    let sw = polynomials::stieltjes_wigert_sum(n, Complex64::new(arg, 0.0), q);
    neg_i_pow(n) * sw * (ln_mag - p * p / (4.0 * lambda * hbar * hbar)).exp()
}

fn ho_ln_norm(n: usize) -> f64 {
    // ln sqrt(2^n n!)
    0.5 * (n as f64 * 2f64.ln() + (1..=n).map(|k| (k as f64).ln()).sum::<f64>())
}

/// Oscillator eigenfunction `H_n(sqrt(2λ) x) e^{-λx²} / sqrt(2^n n! sqrt(π/2λ))`.
pub fn psi_x_ho(state: QuantumState, x: f64, params: &ModelParams) -> f64 {
    let n = state.n();
    let lambda = params.lambda;
    let norm = (-ho_ln_norm(n) - 0.25 * (PI / (2.0 * lambda)).ln()).exp();
    norm * hermite(n, (2.0 * lambda).sqrt() * x) * (-lambda * x * x).exp()
}

/// Oscillator eigenfunction in momentum space,
/// `(-i)^n H_n(p/sqrt(mωħ)) e^{-p²/2mωħ} / sqrt(2^n n! sqrt(π mωħ))`.
pub fn psi_p_ho(state: QuantumState, p: f64, params: &ModelParams) -> Complex64 {
    let n = state.n();
    let s = params.m * params.omega * params.hbar;
    let norm = (-ho_ln_norm(n) - 0.25 * (PI * s).ln()).exp();
    neg_i_pow(n) * norm * hermite(n, p / s.sqrt()) * (-p * p / (2.0 * s)).exp()
}

/// `E_{n,q} = ħω [n + 1/2]_q`.
pub fn energy(state: QuantumState, params: &ModelParams) -> EnergyLevel {
    EnergyLevel(params.hbar * params.omega * q_number(state.n() as f64 + 0.5, params.q))
}
