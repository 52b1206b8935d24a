//! Wigner and Husimi distributions of the stationary states.
//!
//! Three closed forms of the Wigner function are provided: the double sum
//! (the reference form), the `3φ2` form and the Al-Salam-Chihara form. The
//! latter two carry `q^{-n(n-1)/2}`-sized prefactors and fall back to the
//! double sum when those leave the representable range or when their series
//! cancel beyond working precision. The double sum in turn hands over to the
//! `3φ2` form close to `q = 1`.
//!
//! All functions take `m, ω, ħ` from [`ModelParams`]; `h = 0` dispatches to
//! the ordinary oscillator expressions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::oscillator::{ModelParams, QuantumState};
use crate::polynomials::{self, laguerre, AscParams};
use crate::qseries::{
    eval_phi_log_mass, eval_phi_mass, ln_one_minus_exp, DD_EPS, ln_q_binomial, ln_q_factorial, q_binomial_row_dd,
    q_pochhammer_power, LogComplex, QBase, SeriesSpec,
};
use crate::quadrature;

/// Exponent magnitude beyond which the double sum switches to log-carried terms.
pub const FOLD_THRESHOLD: f64 = 500.0;
/// Allowed imaginary residue, relative to `max(1, |Re|)`.
pub const REALNESS_TOL: f64 = 1e-10;
/// Allowed negativity of the Husimi function.
pub const HUSIMI_NEGATIVITY_TOL: f64 = 1e-12;
/// Largest `n(n-1)/2 · ln(1/q)` for which the `3φ2` prefactor is used.
pub const MAX_PREFACTOR_EXPONENT: f64 = 700.0;
/// Largest estimated rounding error of a closed form, relative to the bound
/// `1/πħ`, before the better conditioned form is used in its place.
pub const CANCELLATION_TOL: f64 = 1e-12;
/// Largest photon number accepted by [`orthogonality_sum`].
pub const MAX_ORTHOGONALITY_N: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub p: f64,
    pub x: f64,
}

impl PhasePoint {
    pub fn new(p: f64, x: f64) -> Self {
        PhasePoint { p, x }
    }

    pub const ORIGIN: PhasePoint = PhasePoint { p: 0.0, x: 0.0 };
}

/// `a = hp/ħ + 2iλhx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformedArgument(Complex64);

impl DeformedArgument {
    pub fn new(point: PhasePoint, params: &ModelParams) -> Self {
        let h = params.h();
        DeformedArgument(Complex64::new(
            h * point.p / params.hbar(),
            2.0 * params.lambda() * h * point.x,
        ))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// Which expression evaluates the Wigner function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WignerForm {
    DoubleSum,
    Hyper3Phi2,
    AlSalamChihara,
    IntegralOracle,
}

impl WignerForm {
    pub const CLOSED: [WignerForm; 3] =
        [WignerForm::DoubleSum, WignerForm::Hyper3Phi2, WignerForm::AlSalamChihara];

    pub fn name(self) -> &'static str {
        match self {
            WignerForm::DoubleSum => "dsum",
            WignerForm::Hyper3Phi2 => "hyper",
            WignerForm::AlSalamChihara => "asc",
            WignerForm::IntegralOracle => "integral",
        }
    }
}

impl fmt::Display for WignerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WignerForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dsum" => Ok(WignerForm::DoubleSum),
            "hyper" => Ok(WignerForm::Hyper3Phi2),
            "asc" => Ok(WignerForm::AlSalamChihara),
            "integral" => Ok(WignerForm::IntegralOracle),
            other => Err(Error::Domain(format!("unknown Wigner form '{other}'"))),
        }
    }
}

/// Evaluate the Wigner function with the requested form.
pub fn wigner(
    form: WignerForm,
    state: QuantumState,
    point: PhasePoint,
    params: &ModelParams,
) -> Result<f64> {
    match form {
        WignerForm::DoubleSum => wigner_dsum(state, point, params),
        WignerForm::Hyper3Phi2 => wigner_3phi2(state, point, params),
        WignerForm::AlSalamChihara => wigner_asc(state, point, params),
        WignerForm::IntegralOracle => quadrature::wigner_oracle_x(state, point, params),
    }
}

fn realness(z: Complex64, form: &str) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Consistency(format!("{form} Wigner value is not finite: {z}")));
    }
    if z.im.abs() > REALNESS_TOL * z.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "{form} Wigner value has imaginary residue {:e} (real part {:e})",
            z.im, z.re
        )));
    }
    Ok(z.re)
}

fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Double-sum closed form
/// `(1/πħ) q^n/(q;q)_n e^{-2λx² - p²/2λħ²} Σ_{k,s} (-1)^{k+s} [n k][n s] q^{C(k+s,2)} e^{-k a* - s a}`.
///
/// Close to `q = 1` the sum cancels to `(q;q)_n`-sized residues; when the
/// estimated rounding error is too large the `3φ2` form is used instead.
pub fn wigner_dsum(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    if params.is_classical() {
        return Ok(wigner_ho(state, point, params));
    }
    realness(dsum_or_hyper(state, point, params).w, "double-sum")
}

/// The double sum, or the 3φ2 form where the double sum cancels and the 3φ2 form does better.
fn dsum_or_hyper(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Conditioned {
    let best = dsum_estimate(state, point, params, DsumPath::Auto);
    if best.err > cancellation_tol(params) {
        if let Some(h) = hyper_estimate(state, point, params).filter(|h| h.err < best.err) {
            log::debug!("double sum cancels at {point:?}; using the 3phi2 form");
            return h;
        }
    }
    best
}

/// A Wigner value with an estimate of its rounding error.
#[derive(Clone, Copy, Debug)]
struct Conditioned {
    w: Complex64,
    err: f64,
}

fn cancellation_tol(params: &ModelParams) -> f64 {
    CANCELLATION_TOL / (PI * params.hbar())
}

/// The better conditioned of a validation form and [`wigner_dsum`]'s choice.
fn settle(form: Option<Conditioned>, state: QuantumState, point: PhasePoint, params: &ModelParams) -> Conditioned {
    match form {
        Some(f) if f.err <= cancellation_tol(params) => f,
        Some(f) => {
            let d = dsum_or_hyper(state, point, params);
            if d.err < f.err {
                log::debug!("closed form cancels at {point:?}; using the double sum");
                d
            } else {
                f
            }
        }
        None => {
            log::info!("closed form not representable at {point:?}; using the double sum");
            dsum_or_hyper(state, point, params)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) enum DsumPath {
    Auto,
    Direct,
    Folded,
}

/// The raw complex accumulation of the double sum alone, after the realness check.
#[cfg(test)]
pub(crate) fn wigner_dsum_complex(
    state: QuantumState,
    point: PhasePoint,
    params: &ModelParams,
    path: DsumPath,
) -> Result<Complex64> {
    let w = dsum_estimate(state, point, params, path).w;
    realness(w, "double-sum")?;
    Ok(w)
}

fn dsum_estimate(state: QuantumState, point: PhasePoint, params: &ModelParams, path: DsumPath) -> Conditioned {
    let n = state.n();
    let q = params.q();
    let a = DeformedArgument::new(point, params).value();
    let lambda = params.lambda();
    let hbar = params.hbar();
    let envelope = -2.0 * lambda * point.x * point.x - point.p * point.p / (2.0 * lambda * hbar * hbar);
    let ln_pref = n as f64 * q.ln() - ln_q_factorial(n, q);

    let fold = 2.0 * n as f64 * a.re.abs() > FOLD_THRESHOLD
        || envelope < -FOLD_THRESHOLD
        || ln_pref.abs() > FOLD_THRESHOLD;
    let (raw, err) = match path {
        DsumPath::Direct => dsum_direct(n, q, a, envelope),
        DsumPath::Folded => dsum_folded(n, q, a, envelope, ln_pref),
        DsumPath::Auto if fold => dsum_folded(n, q, a, envelope, ln_pref),
        DsumPath::Auto => {
            let (v, err) = dsum_direct(n, q, a, envelope);
            if v.re.is_finite() && v.im.is_finite() {
                (v, err)
            } else {
                dsum_folded(n, q, a, envelope, ln_pref)
            }
        }
    };
    Conditioned { w: raw / (PI * hbar), err: err / (PI * hbar) }
}

fn dsum_direct(n: usize, q: QBase, a: Complex64, envelope: f64) -> (Complex64, f64) {
    let binom = q_binomial_row_dd(n, q);
    let qd = Dd::new(q.value());
    // q^{C(j,2)} for j = 0..=2n
    let mut tri = Vec::with_capacity(2 * n + 1);
    let (mut cur, mut qj) = (Dd::ONE, Dd::ONE);
    for _ in 0..=2 * n {
        tri.push(cur);
        cur *= qj;
        qj *= qd;
    }
    let e = CDd::from((-a).exp());
    let ec = e.conj();
    let mut e_pow = Vec::with_capacity(n + 1);
    let mut acc = CDd::ONE;
    for _ in 0..=n {
        e_pow.push(acc);
        acc *= e;
    }
    let e_abs = e_pow.iter().map(|v| v.norm()).collect::<Vec<f64>>();

    let mut total = CDd::ZERO;
    let mut mass = 0.0;
    let mut ec_k = CDd::ONE;
    for k in 0..=n {
        let mut row = CDd::ZERO;
        for s in 0..=n {
            let c = binom[s] * tri[k + s];
            let t = e_pow[s].scale(if s % 2 == 0 { c } else { -c });
            row += t;
            mass += (binom[k] * c).to_f64().abs() * e_abs[k] * e_abs[s];
        }
        let c = if k % 2 == 0 { binom[k] } else { -binom[k] };
        total += (ec_k * row).scale(c);
        ec_k *= ec;
    }
    let pref = qd.powi(n as u32) / polynomials::q_factorials_dd(n, q)[n];
    let scale = pref.to_f64() * envelope.exp();
    (total.to_c64() * scale, mass * scale.abs() * DD_EPS)
}

fn dsum_folded(n: usize, q: QBase, a: Complex64, envelope: f64, ln_pref: f64) -> (Complex64, f64) {
    let ln_binom: Vec<f64> = (0..=n).map(|k| ln_q_binomial(n, k, q).unwrap_or(0.0)).collect();
    let lnq = q.ln();
    let mut terms = Vec::with_capacity((n + 1) * (n + 1));
    let mut max_phase = 0.0f64;
    for k in 0..=n {
        for s in 0..=n {
            let j = (k + s) as f64;
            let log_mag = ln_binom[k] + ln_binom[s] + 0.5 * j * (j - 1.0) * lnq - j * a.re
                + envelope
                + ln_pref;
            let phase = PI * j + (k as f64 - s as f64) * a.im;
            max_phase = max_phase.max(phase.abs());
            terms.push(LogComplex::new(log_mag, phase));
        }
    }
    let mass: f64 = terms.iter().map(|t| t.log_magnitude.exp()).sum();
    // log magnitudes and phases carry f64 rounding
    let err = mass * 4.0 * f64::EPSILON * (1.0 + max_phase + terms.iter().fold(0.0f64, |m, t| m.max(t.log_magnitude.abs())));
    (LogComplex::sum(&terms).to_complex(), err)
}

/// `3φ2` closed form
/// `((-1)^n/πħ) q^{-n(n-1)/2} e^{-2H/ħω} 3φ2(q^-n, q^n e^-a, q^n e^-a*; q, 0; q, q)`.
///
/// Falls back to the double sum where the prefactor is not representable or
/// the series cancels beyond working precision, which happens for small `q`.
pub fn wigner_3phi2(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    if params.is_classical() {
        return Ok(wigner_ho(state, point, params));
    }
    let best = settle(hyper_estimate(state, point, params), state, point, params);
    realness(best.w, "3phi2")
}

fn hyper_estimate(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Option<Conditioned> {
    let n = state.n();
    let q = params.q();
    let lnq = q.ln();
    let c2 = (n * n.saturating_sub(1) / 2) as f64;
    if -c2 * lnq >= MAX_PREFACTOR_EXPONENT {
        return None;
    }
    let a = DeformedArgument::new(point, params).value();
    let shifted = (n as f64 * lnq - a).exp();
    let spec = SeriesSpec::new(
        vec![Complex64::new((-(n as f64) * lnq).exp(), 0.0), shifted, shifted.conj()],
        vec![Complex64::new(q.value(), 0.0), Complex64::new(0.0, 0.0)],
        q,
        Complex64::new(q.value(), 0.0),
    );
    let ln_pre = -c2 * lnq - 2.0 * params.reduced_energy(point.p, point.x);
    let (phi, ln_mass) = match eval_phi_mass(&spec) {
        Ok((v, mass)) if v.re.is_finite() && v.im.is_finite() && mass.is_finite() => {
            (LogComplex::from_complex(v), mass.ln())
        }
        _ => match eval_phi_log_mass(&spec) {
            Ok((v, ln_mass)) if v.log_magnitude.is_finite() || v.is_zero() => (v, ln_mass),
            _ => return None,
        },
    };
    let scale = sign(n) / (PI * params.hbar());
    let w = phi.mul_exp(Complex64::new(ln_pre, 0.0)).to_complex() * scale;
    let err = (ln_mass + ln_pre).exp() * DD_EPS * scale.abs();
    (w.re.is_finite() && w.im.is_finite()).then_some(Conditioned { w, err })
}

/// Al-Salam-Chihara closed form
/// `((-1)^n/πħ) q^{n(n+1)/2}/(q;q)_n e^{-nhp/ħ} e^{-2H/ħω} Q_n(cos 2λhx; q^n e^{-hp/ħ}, q^{1-n} e^{hp/ħ} | q)`.
///
/// Falls back to the double sum under the same conditions as [`wigner_3phi2`].
pub fn wigner_asc(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    if params.is_classical() {
        return Ok(wigner_ho(state, point, params));
    }
    let best = settle(asc_estimate(state, point, params), state, point, params);
    realness(best.w, "Al-Salam-Chihara")
}

fn asc_estimate(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Option<Conditioned> {
    let n = state.n();
    let q = params.q();
    let lnq = q.ln();
    let nf = n as f64;
    let hp = params.h() * point.p / params.hbar();
    let alpha = (nf * lnq - hp).exp();
    let beta = ((1.0 - nf) * lnq + hp).exp();
    let c2 = 0.5 * nf * (nf - 1.0);
    let representable = alpha.is_finite()
        && alpha > 0.0
        && beta.is_finite()
        && beta > 0.0
        && -c2 * lnq < MAX_PREFACTOR_EXPONENT;
    if !representable {
        return None;
    }
    let theta = 2.0 * params.lambda() * params.h() * point.x;
    let asc = AscParams::from_angle(theta, Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0), q);
    let (poly, ln_err) = match polynomials::al_salam_chihara_err(n, &asc) {
        Ok((v, e)) if v.re.is_finite() && v.im.is_finite() => (v, e),
        _ => return None,
    };
    let ln_pre = 0.5 * nf * (nf + 1.0) * lnq - ln_q_factorial(n, q) - nf * hp
        - 2.0 * params.reduced_energy(point.p, point.x);
    let scale = sign(n) / (PI * params.hbar());
    let w = LogComplex::from_complex(poly).mul_exp(Complex64::new(ln_pre, 0.0)).to_complex() * scale;
    let err = (ln_err + ln_pre).exp() * scale.abs();
    (w.re.is_finite() && w.im.is_finite()).then_some(Conditioned { w, err })
}

/// Oscillator Wigner function `((-1)^n/πħ) e^{-2H/ħω} L_n(4H/ħω)`.
pub fn wigner_ho(state: QuantumState, point: PhasePoint, params: &ModelParams) -> f64 {
    let e = params.reduced_energy(point.p, point.x);
    sign(state.n()) / (PI * params.hbar()) * (-2.0 * e).exp() * laguerre(state.n(), 4.0 * e)
}

/// Husimi function
/// `(1/2πħ) q^n (e^{-a/2};q)_n (e^{-a*/2};q)_n / (q;q)_n · e^{-H/ħω}`,
/// assembled from logarithms of the individual factors.
pub fn husimi(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    if params.is_classical() {
        return Ok(husimi_ho(state, point, params));
    }
    let n = state.n();
    let q = params.q();
    let lnq = q.ln();
    let half = 0.5 * DeformedArgument::new(point, params).value();
    let mut ln_left = Complex64::new(0.0, 0.0);
    let mut ln_right = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let shift = Complex64::new(j as f64 * lnq, 0.0);
        ln_left += ln_one_minus_exp(shift - half);
        ln_right += ln_one_minus_exp(shift - half.conj());
    }
    let total = ln_left + ln_right
        + (n as f64 * lnq - ln_q_factorial(n, q) - params.reduced_energy(point.p, point.x));
    let v = total.re.exp() * total.im.cos() / (2.0 * PI * params.hbar());
    if v < -HUSIMI_NEGATIVITY_TOL || v.is_nan() {
        return Err(Error::Consistency(format!("Husimi value {v:e} is negative at {point:?}")));
    }
    Ok(v.max(0.0))
}

/// Oscillator Husimi function `(H/ħω)^n e^{-H/ħω} / (2πħ n!)`.
pub fn husimi_ho(state: QuantumState, point: PhasePoint, params: &ModelParams) -> f64 {
    let n = state.n();
    let e = params.reduced_energy(point.p, point.x);
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    let powered = if n == 0 { 1.0 } else { (n as f64 * e.ln() - ln_fact).exp() };
    powered * (-e).exp() / (2.0 * PI * params.hbar())
}

/// Momentum shift `n m ω h` of the large-`h` Gaussians.
fn displacement(state: QuantumState, params: &ModelParams) -> f64 {
    state.n() as f64 * params.m() * params.omega() * params.h()
}

/// Displaced Gaussian approximating the Wigner function for large `h`.
pub fn wigner_largeh(state: QuantumState, point: PhasePoint, params: &ModelParams) -> f64 {
    let s = params.m() * params.hbar() * params.omega();
    let dp = point.p + displacement(state, params);
    let x_term = params.m() * params.omega() * point.x * point.x / params.hbar();
    (-dp * dp / s - x_term).exp() / (PI * params.hbar())
}

/// Displaced Gaussian approximating the Husimi function for large `h`.
pub fn husimi_largeh(state: QuantumState, point: PhasePoint, params: &ModelParams) -> f64 {
    let s = params.m() * params.hbar() * params.omega();
    let dp = point.p + displacement(state, params);
    let x_term = params.m() * params.omega() * point.x * point.x / params.hbar();
    (-0.5 * dp * dp / s - 0.5 * x_term).exp() / (2.0 * PI * params.hbar())
}

/// Mean position. The double-sum integrand is odd in `x`, so this is zero.
pub fn mean_position(_state: QuantumState, _params: &ModelParams) -> f64 {
    0.0
}

/// Mean momentum `-n m ω h`.
pub fn mean_momentum(state: QuantumState, params: &ModelParams) -> f64 {
    -displacement(state, params)
}

/// The double sum that the trace identity reduces to; equals `δ_{nm}`.
pub fn orthogonality_sum(n: usize, m: usize, q: QBase) -> Result<f64> {
    if n > MAX_ORTHOGONALITY_N || m > MAX_ORTHOGONALITY_N {
        return Err(Error::Domain(format!(
            "orthogonality sum needs n, m <= {MAX_ORTHOGONALITY_N}, got ({n}, {m})"
        )));
    }
    if q.is_classical() {
        return Err(Error::Domain("orthogonality sum needs q < 1".into()));
    }
    let lnq = q.ln();
    let half = |n: usize, m: usize| -> f64 {
        (0..=n)
            .map(|k| {
                (n as f64 * k as f64 * lnq).exp() * q_pochhammer_power(-(n as f64), q, k)
                    / q_pochhammer_power(1.0, q, k)
                    * q_pochhammer_power(-(k as f64), q, m)
            })
            .sum()
    };
    let pref = ((n + m) as f64 * lnq - ln_q_factorial(n, q) - ln_q_factorial(m, q)).exp();
    Ok(pref * half(n, m) * half(m, n))
}
