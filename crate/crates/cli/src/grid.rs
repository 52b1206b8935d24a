//! Uniform phase-space grids and their CSV/JSON encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use qphase::phasespace::{husimi, wigner, WignerForm};
use qphase::quadrature::husimi_oracle;
use qphase::{ModelParams, PhasePoint, QuantumState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Wigner,
    Husimi,
}

impl Distribution {
    pub fn name(self) -> &'static str {
        match self {
            Distribution::Wigner => "wigner",
            Distribution::Husimi => "husimi",
        }
    }
}

/// The `--form` flag before it is matched against a distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    Dsum,
    Hyper,
    Asc,
    Integral,
    All,
}

impl FormChoice {
    pub fn name(self) -> &'static str {
        match self {
            FormChoice::Dsum => "dsum",
            FormChoice::Hyper => "hyper",
            FormChoice::Asc => "asc",
            FormChoice::Integral => "integral",
            FormChoice::All => "all",
        }
    }

    /// The evaluators this choice expands to. The Husimi function has one
    /// closed form (selected by `dsum`) and the integral oracle.
    pub fn resolve(self, dist: Distribution) -> Result<Vec<Evaluator>, String> {
        match (dist, self) {
            (Distribution::Wigner, FormChoice::All) => {
                Ok(WignerForm::CLOSED.iter().map(|&f| Evaluator::Wigner(f)).collect())
            }
            (Distribution::Wigner, FormChoice::Dsum) => Ok(vec![Evaluator::Wigner(WignerForm::DoubleSum)]),
            (Distribution::Wigner, FormChoice::Hyper) => Ok(vec![Evaluator::Wigner(WignerForm::Hyper3Phi2)]),
            (Distribution::Wigner, FormChoice::Asc) => Ok(vec![Evaluator::Wigner(WignerForm::AlSalamChihara)]),
            (Distribution::Wigner, FormChoice::Integral) => {
                Ok(vec![Evaluator::Wigner(WignerForm::IntegralOracle)])
            }
            (Distribution::Husimi, FormChoice::Dsum) => Ok(vec![Evaluator::Husimi]),
            (Distribution::Husimi, FormChoice::Integral) => Ok(vec![Evaluator::HusimiOracle]),
            (Distribution::Husimi, FormChoice::All) => Ok(vec![Evaluator::Husimi, Evaluator::HusimiOracle]),
            (Distribution::Husimi, other) => Err(format!(
                "the husimi distribution has no '{}' form; use dsum, integral or all",
                other.name()
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluator {
    Wigner(WignerForm),
    Husimi,
    HusimiOracle,
}

impl Evaluator {
    pub fn name(self) -> &'static str {
        match self {
            Evaluator::Wigner(f) => f.name(),
            Evaluator::Husimi => "dsum",
            Evaluator::HusimiOracle => "integral",
        }
    }

    pub fn eval(self, state: QuantumState, point: PhasePoint, params: &ModelParams) -> qphase::Result<f64> {
        match self {
            Evaluator::Wigner(f) => wigner(f, state, point, params),
            Evaluator::Husimi => husimi(state, point, params),
            Evaluator::HusimiOracle => husimi_oracle(state, point, params),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub p_min: f64,
    pub p_max: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_p: usize,
    pub n_x: usize,
}

impl GridSpec {
    pub fn new(p_min: f64, p_max: f64, x_min: f64, x_max: f64, n_p: usize, n_x: usize) -> Result<Self, String> {
        for (name, lo, hi) in [("p", p_min, p_max), ("x", x_min, x_max)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(format!("{name} range must satisfy min < max, got [{lo}, {hi}]"));
            }
        }
        if n_p < 2 || n_x < 2 {
            return Err(format!("grids need at least 2 points per axis, got {n_p} x {n_x}"));
        }
        Ok(GridSpec { p_min, p_max, x_min, x_max, n_p, n_x })
    }

    pub fn p_axis(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.n_p)
    }

    pub fn x_axis(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.n_x)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub dist: Distribution,
    pub form: String,
    pub columns: Vec<String>,
    pub n: usize,
    pub m: f64,
    pub omega: f64,
    pub hbar: f64,
    pub h: f64,
    pub q: f64,
    pub lambda: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_p: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pairwise_deviation: Option<f64>,
}

/// Evaluated grid. `values[i][j]` is the first column at `(p[i], x[j])`;
/// further columns of `--form all` live in `forms`, keyed by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOutput {
    pub meta: Meta,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, Vec<Vec<f64>>>,
}

pub fn evaluate(
    spec: &GridSpec,
    dist: Distribution,
    evaluators: &[Evaluator],
    state: QuantumState,
    params: &ModelParams,
) -> qphase::Result<GridOutput> {
    let p = spec.p_axis();
    let x = spec.x_axis();
    // rows are computed in parallel and collected in order
    let rows: Vec<Vec<Vec<f64>>> = p
        .par_iter()
        .map(|&pv| {
            x.iter()
                .map(|&xv| {
                    evaluators
                        .iter()
                        .map(|e| e.eval(state, PhasePoint::new(pv, xv), params))
                        .collect::<qphase::Result<Vec<f64>>>()
                })
                .collect::<qphase::Result<Vec<_>>>()
        })
        .collect::<qphase::Result<Vec<_>>>()?;

    let column = |k: usize| -> Vec<Vec<f64>> {
        rows.iter().map(|row| row.iter().map(|cell| cell[k]).collect()).collect()
    };
    let max_dev = (evaluators.len() > 1).then(|| {
        rows.iter()
            .flatten()
            .map(|cell| {
                let mut worst = 0.0f64;
                for a in 0..cell.len() {
                    for b in a + 1..cell.len() {
                        worst = worst.max((cell[a] - cell[b]).abs());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    });

    let form = if evaluators.len() > 1 { "all".to_string() } else { evaluators[0].name().to_string() };
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        dist,
        form,
        columns: evaluators.iter().map(|e| e.name().to_string()).collect(),
        n: state.n(),
        m: params.m(),
        omega: params.omega(),
        hbar: params.hbar(),
        h: params.h(),
        q: params.q().value(),
        lambda: params.lambda(),
        p_min: spec.p_min,
        p_max: spec.p_max,
        n_p: spec.n_p,
        x_min: spec.x_min,
        x_max: spec.x_max,
        n_x: spec.n_x,
        max_pairwise_deviation: max_dev,
    };
    let forms = (1..evaluators.len()).map(|k| (evaluators[k].name().to_string(), column(k))).collect();
    Ok(GridOutput { meta, values: column(0), forms, p, x })
}

impl GridOutput {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    /// `# key=value` header lines, then `p,x,<columns>` rows with `x` varying fastest.
    pub fn to_csv(&self) -> String {
        let m = &self.meta;
        let mut s = String::new();
        let mut header = |k: &str, v: String| {
            let _ = writeln!(s, "# {k}={v}");
        };
        header("version", m.version.clone());
        header("dist", m.dist.name().to_string());
        header("form", m.form.clone());
        header("n", m.n.to_string());
        header("m", m.m.to_string());
        header("omega", m.omega.to_string());
        header("hbar", m.hbar.to_string());
        header("h", m.h.to_string());
        header("q", format!("{:.16e}", m.q));
        header("lambda", m.lambda.to_string());
        header("p_range", format!("{},{},{}", m.p_min, m.p_max, m.n_p));
        header("x_range", format!("{},{},{}", m.x_min, m.x_max, m.n_x));
        if let Some(d) = m.max_pairwise_deviation {
            header("max_pairwise_deviation", format!("{d:e}"));
        }

        if m.columns.len() == 1 {
            s.push_str("p,x,value\n");
        } else {
            let _ = writeln!(s, "p,x,{}", m.columns.join(","));
        }
        let extra: Vec<&Vec<Vec<f64>>> = m.columns[1..].iter().map(|c| &self.forms[c]).collect();
        for (i, &p) in self.p.iter().enumerate() {
            for (j, &x) in self.x.iter().enumerate() {
                let _ = write!(s, "{p},{x},{}", self.values[i][j]);
                for col in &extra {
                    let _ = write!(s, ",{}", col[i][j]);
                }
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_include_both_endpoints() {
        let g = GridSpec::new(-6.0, 6.0, -1.0, 0.3, 7, 3).unwrap();
        let p = g.p_axis();
        assert_eq!((p[0], p[6], p[3]), (-6.0, 6.0, 0.0));
        assert_eq!(g.x_axis(), vec![-1.0, -0.35, 0.3]);
        assert!(GridSpec::new(1.0, 1.0, 0.0, 1.0, 3, 3).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 1, 3).is_err());
    }

    #[test]
    fn husimi_forms() {
        assert!(FormChoice::Hyper.resolve(Distribution::Husimi).is_err());
        assert_eq!(FormChoice::All.resolve(Distribution::Wigner).unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let params = ModelParams::natural(0.6).unwrap();
        let spec = GridSpec::new(-2.0, 1.0, -1.0, 1.0, 4, 5).unwrap();
        let evals = FormChoice::All.resolve(Distribution::Wigner).unwrap();
        let out = evaluate(&spec, Distribution::Wigner, &evals, QuantumState::new(1).unwrap(), &params).unwrap();
        let back: GridOutput = serde_json::from_str(&out.to_json().unwrap()).unwrap();
        assert_eq!(back, out);
        assert!(out.meta.max_pairwise_deviation.unwrap() < 1e-12);
    }
}
