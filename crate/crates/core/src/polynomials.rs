//! Polynomial families behind the oscillator wavefunctions and the Wigner
//! function: Rogers-Szegő, Stieltjes-Wigert and Al-Salam-Chihara, plus the
//! classical Hermite and Laguerre polynomials they reduce to.
//!
//! The q-families are evaluated from their explicit sums in double-double
//! arithmetic. Near `q = 1` the sums cancel down to `O(h^n)`, and the
//! wavefunction normalisation multiplies that back up by `O(h^-n)`.

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::qseries::{self, LogComplex, QBase, SeriesSpec};

/// Largest degree accepted by every family.
pub const MAX_DEGREE: usize = 64;

fn check(n: usize, q: QBase) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Domain(format!("degree {n} exceeds {MAX_DEGREE}")));
    }
    if q.is_classical() {
        return Err(Error::Domain("q-polynomials need 0 < q < 1".into()));
    }
    Ok(())
}

/// `(q;q)_0 ..= (q;q)_n` in double-double.
pub(crate) fn q_factorials_dd(n: usize, q: QBase) -> Vec<Dd> {
    let qd = Dd::new(q.value());
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Dd::ONE;
    let mut qj = Dd::ONE;
    out.push(acc);
    for _ in 1..=n {
        qj *= qd;
        acc *= Dd::ONE - qj;
        out.push(acc);
    }
    out
}

/// Rogers-Szegő polynomial `H_n(x|q) = sum_k [n k]_q (x q^{-1/2})^k`.
pub fn rogers_szego(n: usize, x: Complex64, q: QBase) -> Result<Complex64> {
    check(n, q)?;
    Ok(rogers_szego_sum(n, x, q))
}

pub(crate) fn rogers_szego_sum(n: usize, x: Complex64, q: QBase) -> Complex64 {
    let binom = qseries::q_binomial_row_dd(n, q);
    let step = CDd::from(x).scale(Dd::ONE / Dd::new(q.value().sqrt()));
    let mut pow = CDd::ONE;
    let mut sum = CDd::ZERO;
    for b in binom {
        sum += pow.scale(b);
        pow *= step;
    }
    sum.to_c64()
}

/// Stieltjes-Wigert polynomial
/// `S_n(x;q) = sum_k q^{k^2} (-x)^k / ((q;q)_k (q;q)_{n-k})`.
pub fn stieltjes_wigert(n: usize, x: Complex64, q: QBase) -> Result<Complex64> {
    check(n, q)?;
    Ok(stieltjes_wigert_sum(n, x, q))
}

pub(crate) fn stieltjes_wigert_sum(n: usize, x: Complex64, q: QBase) -> Complex64 {
    let fact = q_factorials_dd(n, q);
    let qd = Dd::new(q.value());
    let neg_x = -CDd::from(x);
    let mut pow = CDd::ONE;
    // q^{k^2}, advanced by q^{2k+1}
    let mut qsq = Dd::ONE;
    let mut q_odd = qd;
    let q2 = qd * qd;
    let mut sum = CDd::ZERO;
    for k in 0..=n {
        let coeff = qsq / (fact[k] * fact[n - k]);
        sum += pow.scale(coeff);
        pow *= neg_x;
        qsq *= q_odd;
        q_odd *= q2;
    }
    sum.to_c64()
}

/// Arguments of an Al-Salam-Chihara polynomial `Q_n(cos θ; α, β | q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AscParams {
    theta: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub base: QBase,
}

impl AscParams {
    /// Parameters from `y = cos θ`, which must lie in `[-1, 1]`.
    pub fn new(y: f64, alpha: Complex64, beta: Complex64, base: QBase) -> Result<Self> {
        if !(-1.0..=1.0).contains(&y) {
            return Err(Error::Domain(format!("y = cos θ must lie in [-1, 1], got {y}")));
        }
        Ok(AscParams { theta: y.acos(), alpha, beta, base })
    }

    /// Parameters from the angle itself; avoids the `acos` round trip near `y = ±1`.
    pub fn from_angle(theta: f64, alpha: Complex64, beta: Complex64, base: QBase) -> Self {
        AscParams { theta, alpha, beta, base }
    }

    pub fn y(&self) -> f64 {
        self.theta.cos()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Al-Salam-Chihara polynomial
/// `Q_n = (αβ;q)_n / α^n · 3φ2(q^-n, α e^{iθ}, α e^{-iθ}; αβ, 0; q, q)`.
///
/// At `α = 0` the quotient is singular term by term, so the value is taken
/// from the three-term recurrence, which is regular there.
pub fn al_salam_chihara(n: usize, params: &AscParams) -> Result<Complex64> {
    Ok(al_salam_chihara_err(n, params)?.0)
}

/// [`al_salam_chihara`] with the log of an estimate of its rounding error.
pub(crate) fn al_salam_chihara_err(n: usize, params: &AscParams) -> Result<(Complex64, f64)> {
    let q = params.base;
    check(n, q)?;
    if n == 0 {
        return Ok((Complex64::new(1.0, 0.0), f64::NEG_INFINITY));
    }
    let alpha = params.alpha;
    if alpha.norm() == 0.0 {
        let v = al_salam_chihara_recurrence(n, params);
        return Ok((v, (v.norm() * n as f64 * f64::EPSILON).ln()));
    }
    let ab = alpha * params.beta;
    let e_it = Complex64::from_polar(1.0, params.theta);
    let q_neg_n = (-(n as f64) * q.ln()).exp();
    let spec = SeriesSpec::new(
        vec![Complex64::new(q_neg_n, 0.0), alpha * e_it, alpha / e_it],
        vec![ab, Complex64::new(0.0, 0.0)],
        q,
        Complex64::new(q.value(), 0.0),
    );
    let (phi, mass) = qseries::eval_phi_mass(&spec)?;
    let prefactor = qseries::q_pochhammer(ab, q, n.into())?;
    let ln_scale = prefactor.norm().ln() - n as f64 * alpha.norm().ln();
    let scaled = LogComplex::from_complex(phi)
        .mul(LogComplex::from_complex(prefactor))
        .mul_exp(-(n as f64) * alpha.ln());
    // the parameters arrive rounded to f64; factors 1 - c q^k near zero amplify that
    let mut sensitivity = 0.0;
    let mut qk = 1.0;
    for _ in 0..n {
        for c in [ab, alpha * e_it, alpha / e_it] {
            let f = (Complex64::new(1.0, 0.0) - c * qk).norm();
            sensitivity += (c.norm() * qk / f).min(f64::MAX);
        }
        qk *= q.value();
    }
    let err = mass * (qseries::DD_EPS + f64::EPSILON * sensitivity);
    Ok((scaled.to_complex(), ln_scale + err.ln()))
}

/// `2y Q_k = Q_{k+1} + (α+β) q^k Q_k + (1-q^k)(1-αβ q^{k-1}) Q_{k-1}`.
pub fn al_salam_chihara_recurrence(n: usize, params: &AscParams) -> Complex64 {
    let q = params.base.value();
    let y = Complex64::new(params.y(), 0.0);
    let (a, b) = (params.alpha, params.beta);
    let one = Complex64::new(1.0, 0.0);
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = one;
    let mut qk = 1.0;
    for k in 0..n {
        let back = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            (1.0 - qk) * (one - a * b * qk / q) * prev
        };
        let next = 2.0 * y * cur - (a + b) * qk * cur - back;
        prev = cur;
        cur = next;
        qk *= q;
    }
    cur
}

/// Physicists' Hermite polynomial.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
