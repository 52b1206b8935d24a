//! Adaptive Gauss-Kronrod quadrature and the integral-definition oracles the
//! closed forms are checked against.
//!
//! Every oracle integrates wavefunctions or distributions over a finite box
//! sized from the known Gaussian envelopes, so the truncation error is far
//! below the reported quadrature error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::oscillator::{psi_p, psi_x, ModelParams, QuantumState};
use crate::phasespace::{self, PhasePoint};
use crate::polynomials::{rogers_szego, stieltjes_wigert};
use crate::qseries::QBase;

// 21-point Kronrod abscissae and weights, with the embedded 10-point Gauss weights.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Values an integrand may return.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationSpec {
    pub lower: f64,
    pub upper: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Equal pieces the interval is cut into before adaptation starts.
    pub initial_pieces: usize,
}

impl IntegrationSpec {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        IntegrationSpec {
            lower,
            upper,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 500,
            initial_pieces: 1,
        }
        .validated()
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self.validated()
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Result<Self> {
        self.max_subdivisions = n;
        self.validated()
    }

    pub fn with_initial_pieces(mut self, n: usize) -> Result<Self> {
        self.initial_pieces = n;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::Domain(format!(
                "integration bounds must satisfy lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Domain("integration tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 || self.initial_pieces == 0 {
            return Err(Error::Domain("subdivision counts must be positive".into()));
        }
        if self.initial_pieces > self.max_subdivisions {
            return Err(Error::Domain(format!(
                "{} initial pieces exceed the {} subdivision budget",
                self.initial_pieces, self.max_subdivisions
            )));
        }
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

struct Piece<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Piece<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<V> Eq for Piece<V> {}

impl<V> PartialOrd for Piece<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Piece<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<V, F>(f: &mut F, a: f64, b: f64) -> Result<Piece<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    let mut res_abs = WGK[10] * fc.magnitude();
    let mut left = [V::zero(); 10];
    let mut right = [V::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        left[j] = f1;
        right[j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((left[j] - mean).magnitude() + (right[j] - mean).magnitude());
    }
    let scale = half.abs();
    let mut err = ((kronrod - gauss) * half).magnitude();
    res_abs *= scale;
    res_asc *= scale;
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Piece { a, b, value: kronrod * half, error: err })
}

/// Adaptive 21-point Gauss-Kronrod integration of a fallible integrand.
/// Integrand errors propagate unchanged.
pub fn try_integrate_1d<V, F>(mut f: F, spec: &IntegrationSpec) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let spec = spec.validated()?;
    let width = (spec.upper - spec.lower) / spec.initial_pieces as f64;
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions + 1);
    for i in 0..spec.initial_pieces {
        let a = spec.lower + i as f64 * width;
        let b = if i + 1 == spec.initial_pieces { spec.upper } else { a + width };
        heap.push(gk21(&mut f, a, b)?);
    }
    let mut evaluations = 21 * spec.initial_pieces;
    let totals = |heap: &BinaryHeap<Piece<V>>| {
        heap.iter().fold((V::zero(), 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    while error > spec.abs_tol.max(spec.rel_tol * value.magnitude()) {
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::AccuracyNotReached {
                estimate: value.to_complex(),
                error,
                tolerance: spec.abs_tol.max(spec.rel_tol * value.magnitude()),
            });
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::AccuracyNotReached {
                estimate: value.to_complex(),
                error,
                tolerance: spec.abs_tol.max(spec.rel_tol * value.magnitude()),
            });
        }
        heap.push(gk21(&mut f, worst.a, mid)?);
        heap.push(gk21(&mut f, mid, worst.b)?);
        evaluations += 42;
        // re-sum rather than update incrementally, so rounding does not drift
        (value, error) = totals(&heap);
    }
    Ok(Estimate { value, error, evaluations })
}

/// Adaptive 21-point Gauss-Kronrod integration.
pub fn integrate_1d<V, F>(mut f: F, spec: &IntegrationSpec) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    try_integrate_1d(|t| Ok(f(t)), spec)
}

/// Nested 2-D integral `∫ dp ∫ dx f(p, x)`, inner `x`, outer `p`.
/// The reported error adds the worst inner error times the outer width.
pub fn integrate_2d<F>(
    f: F,
    outer: &IntegrationSpec,
    inner: &IntegrationSpec,
) -> Result<Estimate<f64>>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut worst_inner = 0.0f64;
    let mut inner_evals = 0usize;
    let est = try_integrate_1d(
        |p| {
            let e = try_integrate_1d(|x| f(p, x), inner)?;
            worst_inner = worst_inner.max(e.error);
            inner_evals += e.evaluations;
            Ok(e.value)
        },
        outer,
    )?;
    Ok(Estimate {
        value: est.value,
        error: est.error + worst_inner * (outer.upper - outer.lower),
        evaluations: inner_evals,
    })
}

fn oscillatory_pieces(frequency: f64, half_width: f64) -> usize {
    2 + (frequency.abs() * half_width / PI).ceil() as usize
}

fn oracle_spec(half_width: f64, pieces: usize) -> Result<IntegrationSpec> {
    IntegrationSpec::symmetric(half_width)?
        .with_tolerances(1e-10, 1e-11)?
        .with_max_subdivisions(400 + 4 * pieces)?
        .with_initial_pieces(pieces)
}

/// Wigner function from its position-space integral definition.
pub fn wigner_oracle_x(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    let hbar = params.hbar();
    let half = (180.0 / params.lambda()).sqrt();
    let spec = oracle_spec(half, oscillatory_pieces(point.p / hbar, half))?;
    let est = integrate_1d(
        |y| {
            let left = psi_x(state, point.x - 0.5 * y, params).conj();
            let right = psi_x(state, point.x + 0.5 * y, params);
            left * right * Complex64::from_polar(1.0, -point.p * y / hbar)
        },
        &spec,
    )?;
    Ok(est.value.re / (2.0 * PI * hbar))
}

/// Wigner function from its momentum-space integral definition.
pub fn wigner_oracle_p(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    let hbar = params.hbar();
    let lambda = params.lambda();
    let shift = state.n() as f64 * params.m() * params.omega() * params.h();
    let half = (360.0 * lambda * hbar * hbar).sqrt() + 4.0 * shift;
    let spec = oracle_spec(half, oscillatory_pieces(point.x / hbar, half))?;
    let est = integrate_1d(
        |k| {
            let left = psi_p(state, point.p - 0.5 * k, params).conj();
            let right = psi_p(state, point.p + 0.5 * k, params);
            left * right * Complex64::from_polar(1.0, point.x * k / hbar)
        },
        &spec,
    )?;
    Ok(est.value.re / (2.0 * PI * hbar))
}

/// Husimi function as the squared modulus of a Gaussian-windowed transform,
/// window width `Δx² = ħ/2mω`.
pub fn husimi_oracle(state: QuantumState, point: PhasePoint, params: &ModelParams) -> Result<f64> {
    let hbar = params.hbar();
    let dx2 = hbar / (2.0 * params.m() * params.omega());
    let half = (60.0 / params.lambda()).sqrt();
    let spec = oracle_spec(half, oscillatory_pieces(point.p / hbar, half))?;
    let est = integrate_1d(
        |y| {
            let window = -(point.x - y) * (point.x - y) / (4.0 * dx2);
            psi_x(state, y, params) * Complex64::new(window, -point.p * y / hbar).exp()
        },
        &spec,
    )?;
    Ok(est.value.norm_sqr() / ((2.0 * PI).powf(1.5) * hbar * dx2.sqrt()))
}

/// Gaussian smoothing of the Wigner function with `Δx² = ħ/2mω`, `Δp = ħ/2Δx`
/// and the printed `1/πħ` prefactor; equals the Husimi function.
pub fn smoothed_wigner_oracle(
    state: QuantumState,
    point: PhasePoint,
    params: &ModelParams,
) -> Result<f64> {
    let hbar = params.hbar();
    let dx = (hbar / (2.0 * params.m() * params.omega())).sqrt();
    let dp = hbar / (2.0 * dx);
    let outer = IntegrationSpec::symmetric(8.0 * dp)?
        .with_tolerances(1e-11, 1e-10)?
        .with_initial_pieces(4)?;
    let inner = IntegrationSpec::symmetric(8.0 * dx)?
        .with_tolerances(1e-12, 1e-11)?
        .with_initial_pieces(4)?;
    let est = integrate_2d(
        |pp, xx| {
            let w = phasespace::wigner_dsum(state, PhasePoint::new(point.p + pp, point.x + xx), params)?;
            Ok(w * (-pp * pp / (2.0 * dp * dp) - xx * xx / (2.0 * dx * dx)).exp())
        },
        &outer,
        &inner,
    )?;
    Ok(est.value / (PI * hbar))
}

/// `(1/√2πħ) ∫ ψ_n(x) e^{-ixp/ħ} dx`.
pub fn fourier_oracle(state: QuantumState, p: f64, params: &ModelParams) -> Result<Complex64> {
    let hbar = params.hbar();
    let half = (60.0 / params.lambda()).sqrt();
    let spec = oracle_spec(half, oscillatory_pieces(p / hbar, half))?;
    let est = integrate_1d(
        |x| psi_x(state, x, params) * Complex64::from_polar(1.0, -x * p / hbar),
        &spec,
    )?;
    Ok(est.value / (2.0 * PI * hbar).sqrt())
}

fn tilde_base(alpha: f64) -> Result<QBase> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    QBase::new((-2.0 * alpha * alpha).exp())
}

/// `(1/√π) ∫ H_n(-e^{-2iαy}|q̃) H_m(-e^{2iαy}|q̃) e^{-y²} dy` with `q̃ = e^{-2α²}`.
pub fn orthogonality_oracle_rs(n: usize, m: usize, alpha: f64) -> Result<f64> {
    let q = tilde_base(alpha)?;
    rogers_szego(n.max(m), Complex64::new(1.0, 0.0), q)?;
    let spec = oracle_spec(12.0, oscillatory_pieces(2.0 * alpha * (n + m) as f64, 12.0))?;
    let est = try_integrate_1d(
        |y| {
            let a = rogers_szego(n, -Complex64::from_polar(1.0, -2.0 * alpha * y), q)?;
            let b = rogers_szego(m, -Complex64::from_polar(1.0, 2.0 * alpha * y), q)?;
            Ok(a * b * (-y * y).exp())
        },
        &spec,
    )?;
    Ok(est.value.re / PI.sqrt())
}

/// `(1/√π) ∫ S_n(q̃^{-1/2} e^{-2αy}; q̃) S_m(q̃^{-1/2} e^{-2αy}; q̃) e^{-y²} dy`.
pub fn orthogonality_oracle_sw(n: usize, m: usize, alpha: f64) -> Result<f64> {
    let q = tilde_base(alpha)?;
    let half = 12.0 + 4.0 * alpha * (n + m) as f64;
    let spec = oracle_spec(half, 4)?;
    let scale = q.value().sqrt().recip();
    let est = try_integrate_1d(
        |y| {
            let arg = Complex64::new(scale * (-2.0 * alpha * y).exp(), 0.0);
            let a = stieltjes_wigert(n, arg, q)?;
            let b = stieltjes_wigert(m, arg, q)?;
            Ok((a * b).re * (-y * y).exp())
        },
        &spec,
    )?;
    Ok(est.value / PI.sqrt())
}

/// Phase-space averages computed by quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Moment {
    Position,
    Momentum,
    Norm,
    HusimiNorm,
    /// `∫∫ W_n W_m` against the given state `m`.
    Trace(usize),
}

/// Box half-widths `(p, x)` for the moment integrals.
pub fn moment_box(state: QuantumState, params: &ModelParams, husimi: bool) -> (f64, f64) {
    let lambda = params.lambda();
    let hbar = params.hbar();
    let widen = if husimi { 2.0 } else { 1.0 };
    let shift = state.n() as f64 * params.m() * params.omega() * params.h();
    ((80.0 * widen * lambda * hbar * hbar).sqrt() + shift, (40.0 * widen / lambda).sqrt())
}

/// 2-D quadrature of `f·W` (or of the Husimi function) over a box sized
/// from the Gaussian envelopes.
pub fn moment_oracle(state: QuantumState, params: &ModelParams, which: Moment) -> Result<Estimate<f64>> {
    let other = match which {
        Moment::Trace(m) => Some(QuantumState::new(m)?),
        _ => None,
    };
    let (mut p_half, x_half) = moment_box(state, params, which == Moment::HusimiNorm);
    let mut p_center = -0.5 * state.n() as f64 * params.m() * params.omega() * params.h();
    if let Some(o) = other {
        let (p2, _) = moment_box(o, params, false);
        p_half = p_half.max(p2);
        p_center = 0.0;
    }
    moment_oracle_in_box(state, params, which, (p_center, p_half), x_half)
}

/// As [`moment_oracle`] over an explicit box: `p ∈ center ± half`, `x ∈ ±x_half`.
pub fn moment_oracle_in_box(
    state: QuantumState,
    params: &ModelParams,
    which: Moment,
    (p_center, p_half): (f64, f64),
    x_half: f64,
) -> Result<Estimate<f64>> {
    let other = match which {
        Moment::Trace(m) => Some(QuantumState::new(m)?),
        _ => None,
    };
    let outer = IntegrationSpec::new(p_center - p_half, p_center + p_half)?
        .with_tolerances(1e-10, 1e-10)?
        .with_initial_pieces(8)?;
    let inner = IntegrationSpec::symmetric(x_half)?
        .with_tolerances(1e-12, 1e-11)?
        .with_initial_pieces(4)?;
    integrate_2d(
        |p, x| {
            let pt = PhasePoint::new(p, x);
            Ok(match which {
                Moment::Position => x * phasespace::wigner_dsum(state, pt, params)?,
                Moment::Momentum => p * phasespace::wigner_dsum(state, pt, params)?,
                Moment::Norm => phasespace::wigner_dsum(state, pt, params)?,
                Moment::HusimiNorm => phasespace::husimi(state, pt, params)?,
                Moment::Trace(_) => {
                    let o = other.expect("trace carries a state");
                    phasespace::wigner_dsum(state, pt, params)? * phasespace::wigner_dsum(o, pt, params)?
                }
            })
        },
        &outer,
        &inner,
    )
}
