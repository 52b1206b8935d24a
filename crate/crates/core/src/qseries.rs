//! q-shifted factorials, q-binomial coefficients, q-numbers and basic
//! hypergeometric series `rφs`.
//!
//! Terminating series are summed in double-double arithmetic. The series the
//! Wigner function reduces to cancel by up to fourteen decimal orders at
//! moderate `q`, so plain `f64` accumulation is not enough there. When a
//! numerator parameter is recognised as `q^-n`, its Pochhammer factors are
//! rebuilt from exact powers of `q` instead of from the rounded parameter.
//!
//! [`eval_phi_log`] carries each term as a [`LogComplex`] for regimes where
//! individual terms leave the `f64` exponent range.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};

/// Relative tolerance when matching a numerator parameter against `q^-n`.
pub const TERMINATION_TOL: f64 = 1e-12;
/// Largest `n` searched when detecting a terminating parameter.
pub const TERMINATION_MAX_N: usize = 512;
/// Truncation threshold for non-terminating series, relative to the partial sum.
pub const SERIES_EPS: f64 = 1e-16;
/// Consecutive sub-threshold terms required before truncating.
pub const SERIES_RUN: usize = 3;
/// Truncation threshold for infinite products.
pub const INFINITE_PRODUCT_EPS: f64 = 1e-17;
/// Largest `n` for which q-binomials come from the Pascal table.
pub const PASCAL_MAX_N: usize = 64;

const MAX_SERIES_TERMS: usize = 200_000;
const MAX_PRODUCT_FACTORS: usize = 50_000_000;

/// The base `q` of a q-series, restricted to `0 < q <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct QBase(f64);

impl QBase {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q <= 1.0 {
            Ok(QBase(q))
        } else {
            Err(Error::Domain(format!("q must lie in (0, 1], got {q}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0.ln()
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    fn require_deformed(self, what: &str) -> Result<()> {
        if self.is_classical() {
            Err(Error::Domain(format!("{what} requires q < 1")))
        } else {
            Ok(())
        }
    }
}

/// Number of factors in a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    Finite(usize),
    Infinite,
}

impl From<usize> for Length {
    fn from(n: usize) -> Self {
        Length::Finite(n)
    }
}

/// A complex number stored as `exp(log_magnitude) * exp(i * phase)`.
///
/// Zero is `log_magnitude = -inf`. The phase is kept in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

fn wrap_phase(phase: f64) -> f64 {
    if !phase.is_finite() {
        return 0.0;
    }
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: LogComplex = LogComplex { log_magnitude: 0.0, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return LogComplex::ZERO;
        }
        LogComplex { log_magnitude, phase: wrap_phase(phase) }
    }

    /// From a complex logarithm `ln z = ln|z| + i arg z`.
    pub fn from_ln(ln: Complex64) -> Self {
        LogComplex::new(ln.re, ln.im)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            LogComplex::ZERO
        } else {
            LogComplex::new(z.norm().ln(), z.im.atan2(z.re))
        }
    }

    pub fn is_zero(self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn mul(self, other: LogComplex) -> LogComplex {
        if self.is_zero() || other.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_magnitude + other.log_magnitude, self.phase + other.phase)
    }

    /// Multiply by `exp(w)` for complex `w`.
    pub fn mul_exp(self, w: Complex64) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.log_magnitude + w.re, self.phase + w.im)
    }

    /// Sum of terms, largest magnitude first, with compensated accumulation
    /// of the rescaled values.
    pub fn sum(terms: &[LogComplex]) -> LogComplex {
        let mut live: Vec<LogComplex> = terms.iter().copied().filter(|t| !t.is_zero()).collect();
        if live.is_empty() {
            return LogComplex::ZERO;
        }
        live.sort_by(|a, b| b.log_magnitude.total_cmp(&a.log_magnitude));
        let top = live[0].log_magnitude;
        let mut acc = CompensatedComplex::default();
        for t in &live {
            acc.add(Complex64::from_polar((t.log_magnitude - top).exp(), t.phase));
        }
        let s = LogComplex::from_complex(acc.value());
        if s.is_zero() {
            return s;
        }
        LogComplex::new(s.log_magnitude + top, s.phase)
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Component-wise [`CompensatedSum`] for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    let cos_m1 = -2.0 * half_sin * half_sin;
    Complex64::new(z.re.exp_m1() * z.im.cos() + cos_m1, z.re.exp() * z.im.sin())
}

/// Complex logarithm of `1 - exp(w)`, accurate both for `exp(w)` near 1 and
/// for `|exp(w)|` far outside the `f64` range.
pub fn ln_one_minus_exp(w: Complex64) -> Complex64 {
    if w.re == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    if w.re > 0.0 {
        // 1 - e^w = -e^w (1 - e^-w)
        let inner = -expm1_complex(-w);
        w + Complex64::new(0.0, PI) + inner.ln()
    } else {
        let v = -expm1_complex(w);
        if v.re == 0.0 && v.im == 0.0 {
            Complex64::new(f64::NEG_INFINITY, 0.0)
        } else {
            v.ln()
        }
    }
}

/// `1 - q^e` for real exponent `e`, exact zero at `e = 0`.
pub fn one_minus_q_power(e: f64, q: QBase) -> f64 {
    -(e * q.ln()).exp_m1()
}

/// `(a; q)_n = prod_{k<n} (1 - a q^k)`.
pub fn q_pochhammer(a: Complex64, q: QBase, n: Length) -> Result<Complex64> {
    let qv = q.value();
    match n {
        Length::Finite(n) => {
            let mut prod = Complex64::new(1.0, 0.0);
            let mut aq = a;
            for _ in 0..n {
                prod *= Complex64::new(1.0, 0.0) - aq;
                aq *= qv;
            }
            Ok(prod)
        }
        Length::Infinite => {
            q.require_deformed("an infinite q-product")?;
            let mut prod = Complex64::new(1.0, 0.0);
            let mut aq = a;
            for _ in 0..MAX_PRODUCT_FACTORS {
                if aq.norm() < INFINITE_PRODUCT_EPS {
                    return Ok(prod);
                }
                prod *= Complex64::new(1.0, 0.0) - aq;
                aq *= qv;
            }
            Err(Error::Convergence(format!(
                "infinite q-product with q = {qv} did not settle in {MAX_PRODUCT_FACTORS} factors"
            )))
        }
    }
}

/// `(a_1, ..., a_m; q)_n`.
pub fn q_pochhammer_multi(params: &[Complex64], q: QBase, n: Length) -> Result<Complex64> {
    if params.is_empty() {
        return Err(Error::Domain("q_pochhammer_multi needs at least one parameter".into()));
    }
    params
        .iter()
        .try_fold(Complex64::new(1.0, 0.0), |acc, &a| Ok(acc * q_pochhammer(a, q, n)?))
}

/// `(q^e; q)_n` for real `e`, each factor formed as `-expm1((e+j) ln q)` so
/// that factors with `e + j = 0` vanish exactly.
pub fn q_pochhammer_power(e: f64, q: QBase, n: usize) -> f64 {
    (0..n).map(|j| one_minus_q_power(e + j as f64, q)).product()
}

/// `ln (q; q)_n`, summing logs of `1 - q^j`.
pub fn ln_q_factorial(n: usize, q: QBase) -> f64 {
    if q.is_classical() {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    (1..=n).map(|j| one_minus_q_power(j as f64, q).ln()).sum()
}

/// Row `[n 0]_q ..= [n n]_q` of the q-Pascal triangle.
///
/// Built with `[n k] = [n-1 k-1] + q^k [n-1 k]`, which only adds positive
/// numbers.
pub fn q_binomial_row(n: usize, q: QBase) -> Vec<f64> {
    q_binomial_row_dd(n, q).into_iter().map(Dd::to_f64).collect()
}

pub(crate) fn q_binomial_row_dd(n: usize, q: QBase) -> Vec<Dd> {
    let qd = Dd::new(q.value());
    let mut row = vec![Dd::ONE];
    for m in 1..=n {
        let mut next = vec![Dd::ONE; m + 1];
        let mut qk = qd;
        for k in 1..m {
            next[k] = row[k - 1] + qk * row[k];
            qk *= qd;
        }
        row = next;
    }
    row
}

/// `ln [n k]_q` via log q-factorials; valid for any `n`.
pub fn ln_q_binomial(n: usize, k: usize, q: QBase) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("q-binomial needs k <= n, got n={n}, k={k}")));
    }
    if q.is_classical() {
        return Ok(ln_binomial(n, k));
    }
    Ok(ln_q_factorial(n, q) - ln_q_factorial(k, q) - ln_q_factorial(n - k, q))
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// The q-binomial coefficient `(q;q)_n / ((q;q)_k (q;q)_{n-k})`.
pub fn q_binomial(n: usize, k: usize, q: QBase) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("q-binomial needs k <= n, got n={n}, k={k}")));
    }
    if n <= PASCAL_MAX_N {
        Ok(q_binomial_row(n, q)[k])
    } else {
        Ok(ln_q_binomial(n, k, q)?.exp())
    }
}

/// The q-number `[a]_q = (1 - q^a)/(1 - q)`, equal to `a` at `q = 1`.
pub fn q_number(a: f64, q: QBase) -> f64 {
    if q.is_classical() {
        a
    } else {
        (a * q.ln()).exp_m1() / q.ln().exp_m1()
    }
}

/// Parameters of `rφs(a_1..a_r; b_1..b_s; q, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSpec {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
    pub base: QBase,
    pub argument: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Termination {
    /// Index into the numerator list of the parameter equal to `q^-n`.
    pub param: usize,
    pub n: usize,
}

impl SeriesSpec {
    pub fn new(
        numerator: Vec<Complex64>,
        denominator: Vec<Complex64>,
        base: QBase,
        argument: Complex64,
    ) -> Self {
        SeriesSpec { numerator, denominator, base, argument }
    }

    /// Convenience constructor for real parameters.
    pub fn real(numerator: &[f64], denominator: &[f64], q: QBase, z: f64) -> Self {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        SeriesSpec::new(c(numerator), c(denominator), q, Complex64::new(z, 0.0))
    }

    pub fn r(&self) -> usize {
        self.numerator.len()
    }

    pub fn s(&self) -> usize {
        self.denominator.len()
    }

    /// The numerator parameter equal to `q^-n` with the smallest `n`, if any.
    pub fn termination(&self) -> Option<Termination> {
        let q = self.base;
        if q.is_classical() {
            return None;
        }
        let lnq = q.ln();
        let mut best: Option<Termination> = None;
        for (i, a) in self.numerator.iter().enumerate() {
            if a.re <= 0.0 || a.im.abs() > TERMINATION_TOL * a.re {
                continue;
            }
            let nf = -a.re.ln() / lnq;
            let n = nf.round();
            if n < 0.0 || n > TERMINATION_MAX_N as f64 {
                continue;
            }
            let target = (-n * lnq).exp();
            if !target.is_finite() || (a - target).norm() > TERMINATION_TOL * target {
                continue;
            }
            let n = n as usize;
            if best.map_or(true, |b| n < b.n) {
                best = Some(Termination { param: i, n });
            }
        }
        best
    }

    fn extra_power(&self) -> i64 {
        1 + self.s() as i64 - self.r() as i64
    }

    fn check_convergence(&self) -> Result<Option<Termination>> {
        self.base.require_deformed("a basic hypergeometric series")?;
        let term = self.termination();
        if term.is_none() && self.argument.norm() != 0.0 {
            let e = self.extra_power();
            if e < 0 {
                return Err(Error::Convergence(format!(
                    "non-terminating {}φ{} with r > s+1 has zero radius of convergence",
                    self.r(),
                    self.s()
                )));
            }
            if e == 0 && self.argument.norm() >= 1.0 {
                return Err(Error::Convergence(format!(
                    "non-terminating {}φ{} needs |z| < 1, got |z| = {}",
                    self.r(),
                    self.s(),
                    self.argument.norm()
                )));
            }
        }
        Ok(term)
    }
}

fn is_pole(factor: Complex64, bqk: Complex64) -> bool {
    factor.norm() <= TERMINATION_TOL * bqk.norm().max(1.0)
}

/// Evaluate `rφs` including the `((-1)^k q^{k(k-1)/2})^{1+s-r}` factor.
///
/// Terminating series are summed over `n+1` terms in double-double
/// arithmetic. Non-terminating ones are truncated after [`SERIES_RUN`]
/// consecutive terms smaller than [`SERIES_EPS`] times the partial sum.
pub fn eval_phi(spec: &SeriesSpec) -> Result<Complex64> {
    Ok(eval_phi_mass(spec)?.0)
}

/// Working precision assumed for double-double accumulations, with headroom
/// for the rounding of the term ratios.
pub(crate) const DD_EPS: f64 = 1e-30;

/// [`eval_phi`] together with `Σ|t_k|`, the scale on which rounding error
/// in the partial sums accumulates.
pub(crate) fn eval_phi_mass(spec: &SeriesSpec) -> Result<(Complex64, f64)> {
    let term = spec.check_convergence()?;
    let q = Dd::new(spec.base.value());
    let e = spec.extra_power();
    let z = CDd::from(spec.argument);
    let nums: Vec<CDd> = spec.numerator.iter().map(|&a| CDd::from(a)).collect();
    let dens: Vec<CDd> = spec.denominator.iter().map(|&b| CDd::from(b)).collect();

    let last = term.map(|t| t.n);
    // q^{-n} for the terminating parameter, from exact powers of q
    let qinv_n = term.map(|t| Dd::ONE / q.powi(t.n as u32));

    let mut sum = CDd::ONE;
    let mut mass = 1.0;
    let mut t = CDd::ONE;
    let mut qk = Dd::ONE;
    let mut quiet = 0usize;
    let mut k = 0usize;
    loop {
        if let Some(n) = last {
            if k >= n {
                break;
            }
        }
        if k >= MAX_SERIES_TERMS {
            return Err(Error::Convergence(format!(
                "series did not settle within {MAX_SERIES_TERMS} terms"
            )));
        }
        // ratio t_{k+1} / t_k
        let mut ratio = z;
        for (i, a) in nums.iter().enumerate() {
            let f = match (term, qinv_n) {
                (Some(tm), Some(qn)) if tm.param == i => CDd::real(Dd::ONE - qn * qk),
                _ => CDd::ONE - a.scale(qk),
            };
            ratio = ratio * f;
        }
        let mut den = CDd::real(Dd::ONE - q * qk);
        for (j, b) in dens.iter().enumerate() {
            let bqk = b.scale(qk);
            let f = CDd::ONE - bqk;
            if is_pole(f.to_c64(), bqk.to_c64()) {
                return Err(Error::Pole { index: j, term: k + 1 });
            }
            den = den * f;
        }
        ratio = ratio / den;
        if e != 0 {
            let step = -qk;
            let f = if e > 0 { step.powi(e as u32) } else { step.recip().powi((-e) as u32) };
            ratio = ratio.scale(f);
        }
        t = t * ratio;
        sum += t;
        mass += t.norm();
        qk *= q;
        k += 1;

        if last.is_none() {
            if t.norm() < SERIES_EPS * sum.norm() {
                quiet += 1;
                if quiet >= SERIES_RUN {
                    break;
                }
            } else {
                quiet = 0;
            }
            if t.norm() == 0.0 && sum.norm() == 0.0 {
                break;
            }
        }
    }
    Ok((sum.to_c64(), mass))
}

/// Double-double complex mantissa times `2^exp`, renormalised after every
/// operation so that products of many large or small factors never leave
/// the representable range.
#[derive(Clone, Copy, Debug)]
struct Scaled {
    m: CDd,
    exp: i64,
}

impl Scaled {
    const ONE: Scaled = Scaled { m: CDd::ONE, exp: 0 };

    fn normalized(m: CDd, exp: i64) -> Self {
        let big = m.re.hi.abs().max(m.im.hi.abs());
        if big == 0.0 || !big.is_finite() {
            return Scaled { m, exp };
        }
        let e = big.log2().floor() as i32;
        Scaled { m: m.ldexp(-e), exp: exp + e as i64 }
    }

    fn from_cdd(m: CDd) -> Self {
        Self::normalized(m, 0)
    }

    fn is_zero(self) -> bool {
        self.m.re.hi == 0.0 && self.m.im.hi == 0.0
    }

    fn mul(self, o: Scaled) -> Self {
        Self::normalized(self.m * o.m, self.exp + o.exp)
    }

    fn div(self, o: Scaled) -> Self {
        Self::normalized(self.m / o.m, self.exp - o.exp)
    }

    fn neg(self) -> Self {
        Scaled { m: -self.m, exp: self.exp }
    }

    fn add(self, o: Scaled) -> Self {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let shift = small.exp - big.exp;
        if shift < -240 {
            return big;
        }
        Self::normalized(big.m + small.m.ldexp(shift as i32), big.exp)
    }

    fn log2_norm(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().log2() + self.exp as f64
        }
    }

    /// `1 - self`.
    fn one_minus(self) -> Self {
        if self.is_zero() || self.exp < -1000 {
            Scaled::ONE
        } else if self.exp > 1000 {
            self.neg()
        } else {
            Self::from_cdd(CDd::ONE - self.m.ldexp(self.exp as i32))
        }
    }

    fn to_log(self) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        let c = self.m.to_c64();
        LogComplex::new(c.norm().ln() + self.exp as f64 * std::f64::consts::LN_2, c.im.atan2(c.re))
    }
}

/// Same value as [`eval_phi`], returned as a [`LogComplex`] so that sums far
/// outside the `f64` range survive.
///
/// Terms and partial sums are carried as double-double mantissas with a
/// separate binary exponent.
pub fn eval_phi_log(spec: &SeriesSpec) -> Result<LogComplex> {
    Ok(eval_phi_log_mass(spec)?.0)
}

/// [`eval_phi_log`] together with `ln Σ|t_k|`.
pub(crate) fn eval_phi_log_mass(spec: &SeriesSpec) -> Result<(LogComplex, f64)> {
    let term = spec.check_convergence()?;
    if spec.argument.norm() == 0.0 {
        return Ok((LogComplex::ONE, 0.0));
    }
    let q = Scaled::from_cdd(CDd::real(Dd::new(spec.base.value())));
    let e = spec.extra_power();
    let z = Scaled::from_cdd(CDd::from(spec.argument));
    let nums: Vec<Scaled> = spec.numerator.iter().map(|&a| Scaled::from_cdd(CDd::from(a))).collect();
    let dens: Vec<Scaled> = spec.denominator.iter().map(|&b| Scaled::from_cdd(CDd::from(b))).collect();
    let last = term.map(|t| t.n);
    // q^{-n} for the terminating parameter, from exact powers of q
    let qinv_n = term.map(|t| (0..t.n).fold(Scaled::ONE, |acc, _| acc.div(q)));
    let tol_log2 = TERMINATION_TOL.log2();
    let eps_log2 = SERIES_EPS.log2();

    let mut sum = Scaled::ONE;
    let mut mass_log2 = 0.0f64;
    let mut t = Scaled::ONE;
    let mut qk = Scaled::ONE;
    let mut quiet = 0usize;
    let mut k = 0usize;
    loop {
        if let Some(n) = last {
            if k >= n {
                break;
            }
        }
        if k >= MAX_SERIES_TERMS {
            return Err(Error::Convergence(format!(
                "series did not settle within {MAX_SERIES_TERMS} terms"
            )));
        }
        let mut next = t.mul(z);
        for (i, a) in nums.iter().enumerate() {
            let aqk = match (term, qinv_n) {
                (Some(tm), Some(qn)) if tm.param == i => qn.mul(qk),
                _ => a.mul(qk),
            };
            next = next.mul(aqk.one_minus());
        }
        next = next.div(q.mul(qk).one_minus());
        for (j, b) in dens.iter().enumerate() {
            let bqk = b.mul(qk);
            let f = bqk.one_minus();
            if f.log2_norm() <= tol_log2 + bqk.log2_norm().max(0.0) {
                return Err(Error::Pole { index: j, term: k + 1 });
            }
            next = next.div(f);
        }
        for _ in 0..e.unsigned_abs() {
            next = if e > 0 { next.mul(qk.neg()) } else { next.div(qk.neg()) };
        }
        t = next;
        sum = sum.add(t);
        if !t.is_zero() {
            let (hi, lo) = if t.log2_norm() > mass_log2 { (t.log2_norm(), mass_log2) } else { (mass_log2, t.log2_norm()) };
            mass_log2 = hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2;
        }
        qk = qk.mul(q);
        k += 1;

        if t.is_zero() {
            // a numerator factor vanished: every later term is zero too
            break;
        }
        if last.is_none() {
            if t.log2_norm() < eps_log2 + sum.log2_norm() {
                quiet += 1;
                if quiet >= SERIES_RUN {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
    }
    Ok((sum.to_log(), mass_log2 * std::f64::consts::LN_2))
}
