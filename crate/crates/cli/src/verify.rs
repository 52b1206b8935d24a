//! Verification suites run by `qphase verify`. Each check compares a closed
//! form against an oracle or an exact identity and reports the deviation.

use std::f64::consts::PI;

use num_complex::Complex64;
use qphase::oscillator::{energy, psi_p, psi_x};
use qphase::phasespace::{
    husimi, husimi_ho, husimi_largeh, mean_momentum, mean_position, orthogonality_sum, wigner, wigner_dsum,
    wigner_ho,
};
use qphase::quadrature::{
    fourier_oracle, husimi_oracle, integrate_1d, moment_oracle, orthogonality_oracle_rs, orthogonality_oracle_sw,
    smoothed_wigner_oracle, wigner_oracle_p, wigner_oracle_x, IntegrationSpec, Moment,
};
use qphase::qseries::{eval_phi, q_pochhammer, q_pochhammer_power, Length, QBase, SeriesSpec};
use qphase::{ModelParams, PhasePoint, QuantumState, WignerForm};

pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check { name: name.into(), deviation, tolerance, note: None }
    }

    fn from_result(name: impl Into<String>, r: qphase::Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(d) => Check::new(name, d, tolerance),
            Err(e) => Check { name: name.into(), deviation: f64::INFINITY, tolerance, note: Some(e.to_string()) },
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }

    pub fn line(&self, suite: &str) -> String {
        let status = if self.passed() { "ok  " } else { "FAIL" };
        let mut s = format!(
            "{status} {suite}/{} deviation={:.3e} tolerance={:.1e}",
            self.name, self.deviation, self.tolerance
        );
        if let Some(n) = &self.note {
            s.push_str(&format!(" ({n})"));
        }
        s
    }
}

pub struct Suite {
    pub name: &'static str,
    /// Argument: scale applied to the wavefunction normalization (1 when healthy).
    pub run: fn(f64) -> Vec<Check>,
}

pub const SUITES: &[Suite] = &[
    Suite { name: "qseries", run: qseries_suite },
    Suite { name: "polynomials", run: polynomials_suite },
    Suite { name: "orthonormality", run: orthonormality_suite },
    Suite { name: "fourier", run: fourier_suite },
    Suite { name: "forms", run: forms_suite },
    Suite { name: "oracles", run: oracles_suite },
    Suite { name: "moments", run: moments_suite },
    Suite { name: "trace", run: trace_suite },
    Suite { name: "limits", run: limits_suite },
    Suite { name: "spectrum", run: spectrum_suite },
];

pub fn select(name: Option<&str>) -> Result<Vec<&'static Suite>, String> {
    match name {
        None => Ok(SUITES.iter().collect()),
        Some(n) => match SUITES.iter().find(|s| s.name == n) {
            Some(s) => Ok(vec![s]),
            None => {
                let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
                Err(format!("unknown suite '{n}'; available: {}", names.join(", ")))
            }
        },
    }
}

fn st(n: usize) -> QuantumState {
    QuantumState::new(n).expect("small photon numbers are valid")
}

fn nat(h: f64) -> ModelParams {
    ModelParams::natural(h).expect("valid natural-unit parameters")
}

fn qseries_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for (a, z, q) in [(0.3, 0.5, 0.4), (-1.2, -0.7, 0.8), (2.0, 0.2, 0.95)] {
        let q = QBase::new(q).unwrap();
        let (a, z) = (Complex64::new(a, 0.1), Complex64::new(z, -0.2));
        let r = eval_phi(&SeriesSpec::new(vec![a], vec![], q, z)).and_then(|s| {
            let prod = q_pochhammer(a * z, q, Length::Infinite)? / q_pochhammer(z, q, Length::Infinite)?;
            Ok((s - prod).norm() / prod.norm())
        });
        out.push(Check::from_result(format!("q-binomial-theorem q={}", q.value()), r, 1e-12));
    }
    let q = QBase::new(0.45).unwrap();
    let (b, c) = (Complex64::new(0.3, 0.2), Complex64::new(-0.7, 0.1));
    for n in [3usize, 8] {
        let top = Complex64::new((-(n as f64) * q.ln()).exp(), 0.0);
        let r = eval_phi(&SeriesSpec::new(vec![top, b], vec![c], q, Complex64::new(q.value(), 0.0))).and_then(|s| {
            let closed = q_pochhammer(c / b, q, n.into())? / q_pochhammer(c, q, n.into())? * b.powi(n as i32);
            Ok((s - closed).norm() / closed.norm())
        });
        out.push(Check::from_result(format!("q-chu-vandermonde n={n}"), r, 1e-11));
    }
    out
}

fn polynomials_suite(_: f64) -> Vec<Check> {
    let alpha = 0.5f64;
    let q = QBase::new((-2.0 * alpha * alpha).exp()).unwrap();
    let mut out = Vec::new();
    for n in 0..=3usize {
        for m in n..=3 {
            let (rs, sw) = if n == m {
                let poch = q_pochhammer_power(1.0, q, n);
                let qn = q.value().powi(n as i32);
                (poch / qn, 1.0 / (poch * qn))
            } else {
                (0.0, 0.0)
            };
            out.push(Check::from_result(
                format!("rogers-szego ({n},{m})"),
                orthogonality_oracle_rs(n, m, alpha).map(|v| (v - rs).abs()),
                1e-7,
            ));
            out.push(Check::from_result(
                format!("stieltjes-wigert ({n},{m})"),
                orthogonality_oracle_sw(n, m, alpha).map(|v| (v - sw).abs() / sw.max(1.0)),
                1e-7,
            ));
        }
    }
    out
}

fn overlap<F: Fn(f64) -> Complex64>(f: F, half: f64) -> qphase::Result<Complex64> {
    let spec = IntegrationSpec::symmetric(half)?.with_tolerances(1e-11, 1e-11)?.with_initial_pieces(8)?;
    Ok(integrate_1d(f, &spec)?.value)
}

fn orthonormality_suite(scale: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for h in [0.6, 1.0] {
        let params = nat(h);
        let lambda = params.lambda();
        for n in 0..=3usize {
            for k in 0..=n {
                let expect = if n == k { 1.0 } else { 0.0 };
                let x_half = (60.0 / lambda).sqrt();
                let p_half = (200.0 * lambda).sqrt() + 4.0 * n as f64 * h;
                let ox = overlap(
                    |x| scale * scale * psi_x(st(n), x, &params).conj() * psi_x(st(k), x, &params),
                    x_half,
                );
                let op = overlap(
                    |p| scale * scale * psi_p(st(n), p, &params).conj() * psi_p(st(k), p, &params),
                    p_half,
                );
                out.push(Check::from_result(format!("x h={h} ({n},{k})"), ox.map(|v| (v - expect).norm()), 1e-8));
                out.push(Check::from_result(format!("p h={h} ({n},{k})"), op.map(|v| (v - expect).norm()), 1e-8));
            }
        }
    }
    out
}

fn fourier_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for h in [0.0, 1.0] {
        let params = nat(h);
        for n in 0..=3usize {
            for p in [-2.0, 0.0, 1.5] {
                let r = fourier_oracle(st(n), p, &params).map(|v| (v - psi_p(st(n), p, &params)).norm());
                out.push(Check::from_result(format!("h={h} n={n} p={p}"), r, 1e-7));
            }
        }
    }
    out
}

fn forms_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let points = [(0.3, 0.2), (-1.1, 0.8), (-2.5, -1.4), (1.7, 2.2)];
    for h in [0.6, 1.0, 1.6, 2.3] {
        let params = nat(h);
        for n in 0..=4usize {
            let mut worst = Ok(0.0f64);
            for &(p, x) in &points {
                let pt = PhasePoint::new(p - n as f64 * h, x);
                let vals: qphase::Result<Vec<f64>> =
                    WignerForm::CLOSED.iter().map(|&f| wigner(f, st(n), pt, &params)).collect();
                worst = worst.and_then(|w| {
                    let v = vals?;
                    Ok(w.max((v[0] - v[1]).abs()).max((v[0] - v[2]).abs()))
                });
            }
            out.push(Check::from_result(format!("h={h} n={n}"), worst, 1e-9 / PI));
        }
    }
    out
}

fn oracles_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let cases = [
        (1usize, -1.0, 0.0, nat(1.0)),
        (2, 0.5, 0.5, nat(0.6)),
        (1, -0.6, 0.0, nat(0.6)),
        (3, -3.0, 0.4, ModelParams::new(1.7, 0.6, 0.8, 0.9).unwrap()),
    ];
    for (n, p, x, params) in cases {
        let pt = PhasePoint::new(p, x);
        let tag = format!("n={n} ({p},{x}) h={}", params.h());
        let w = wigner_dsum(st(n), pt, &params);
        let hu = husimi(st(n), pt, &params);
        let diff = |a: &qphase::Result<f64>, b: qphase::Result<f64>| -> qphase::Result<f64> {
            Ok((a.clone()? - b?).abs())
        };
        out.push(Check::from_result(format!("wigner-x {tag}"), diff(&w, wigner_oracle_x(st(n), pt, &params)), 1e-6));
        out.push(Check::from_result(format!("wigner-p {tag}"), diff(&w, wigner_oracle_p(st(n), pt, &params)), 1e-6));
        out.push(Check::from_result(format!("husimi {tag}"), diff(&hu, husimi_oracle(st(n), pt, &params)), 1e-6));
        out.push(Check::from_result(
            format!("smoothed-wigner {tag}"),
            diff(&hu, smoothed_wigner_oracle(st(n), pt, &params)),
            1e-6,
        ));
    }
    out
}

fn moments_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for h in [0.6, 1.0, 1.6] {
        let params = nat(h);
        for n in 0..=3usize {
            let p = moment_oracle(st(n), &params, Moment::Momentum)
                .map(|e| (e.value - mean_momentum(st(n), &params)).abs());
            let x = moment_oracle(st(n), &params, Moment::Position)
                .map(|e| (e.value - mean_position(st(n), &params)).abs());
            out.push(Check::from_result(format!("p_mean h={h} n={n}"), p, 1e-6));
            out.push(Check::from_result(format!("x_mean h={h} n={n}"), x, 1e-6));
        }
    }
    for n in [0usize, 2] {
        let norm = moment_oracle(st(n), &nat(1.0), Moment::Norm).map(|e| (e.value - 1.0).abs());
        out.push(Check::from_result(format!("norm n={n}"), norm, 1e-8));
        let hn = moment_oracle(st(n), &nat(1.0), Moment::HusimiNorm).map(|e| (e.value - 1.0).abs());
        out.push(Check::from_result(format!("husimi-norm n={n}"), hn, 1e-8));
    }
    out
}

fn trace_suite(_: f64) -> Vec<Check> {
    let params = nat(1.0);
    let q = params.q();
    let scale = 2.0 * PI * params.hbar();
    let mut out = Vec::new();
    for n in 0..=3usize {
        for m in n..=3 {
            let expect = if n == m { 1.0 } else { 0.0 };
            let quad = moment_oracle(st(n), &params, Moment::Trace(m)).map(|e| (scale * e.value - expect).abs());
            out.push(Check::from_result(format!("quadrature ({n},{m})"), quad, 1e-6));
            let sum = orthogonality_sum(n, m, q).map(|v| (v - expect).abs());
            out.push(Check::from_result(format!("double-sum ({n},{m})"), sum, 1e-10));
        }
    }
    out
}

fn limits_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let tiny = nat(1e-3);
    let classical = nat(0.0);
    for n in 0..=2usize {
        let mut worst = Ok(0.0f64);
        for &(p, x) in &[(1.0, 1.0), (-0.4, 0.3), (2.0, -1.5), (0.0, 0.0)] {
            let pt = PhasePoint::new(p, x);
            worst = worst.and_then(|w: f64| {
                let dw = (wigner_dsum(st(n), pt, &tiny)? - wigner_ho(st(n), pt, &classical)).abs();
                let dh = (husimi(st(n), pt, &tiny)? - husimi_ho(st(n), pt, &classical)).abs();
                Ok(w.max(dw).max(dh))
            });
        }
        out.push(Check::from_result(format!("small-h n={n}"), worst, 1e-2));
    }
    let big = nat(15.0);
    let mut worst = Ok(0.0f64);
    let mut peak = 0.0f64;
    for i in 0..=10 {
        for j in 0..=10 {
            let (dp, x) = (-1.0 + 0.2 * i as f64, -1.0 + 0.2 * j as f64);
            if dp.hypot(x) > 1.0 {
                continue;
            }
            let pt = PhasePoint::new(-15.0 + dp, x);
            worst = worst.and_then(|w: f64| {
                let v = husimi(st(1), pt, &big)?;
                peak = peak.max(v);
                Ok(w.max((v - husimi_largeh(st(1), pt, &big)).abs()))
            });
        }
    }
    out.push(Check::from_result("large-h husimi n=1", worst.map(|w| w / peak), 0.05));
    out
}

fn spectrum_suite(_: f64) -> Vec<Check> {
    let mut out = Vec::new();
    let classical = nat(0.0);
    let worst = (0..=10usize)
        .map(|n| (energy(st(n), &classical).value() - (n as f64 + 0.5)).abs())
        .fold(0.0, f64::max);
    out.push(Check::new("oscillator levels", worst, 1e-12));
    for h in [0.6, 1.0, 2.3] {
        let params = nat(h);
        let levels: Vec<f64> = (0..=10usize).map(|n| energy(st(n), &params).value()).collect();
        // violation of 0 < E_n < E_{n+1} < n + 3/2
        let mut violation = 0.0f64;
        for (n, w) in levels.windows(2).enumerate() {
            violation = violation.max(w[0] - w[1]).max(w[1] - (n as f64 + 1.5));
        }
        out.push(Check::new(format!("ordering h={h}"), violation.max(-levels[0]), 0.0));
    }
    out
}
