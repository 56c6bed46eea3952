//! Parameter sweeps over `(c, α, d, k, ε)` and their CSV / JSON encodings.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bern::AmpParams;
use crate::bounds::{bounds_report_with, Regime, DEFAULT_REGIME_DELTA};
use crate::error::{Error, Result};
use crate::solver::{exact_post, SolverConfig};

pub const CSV_HEADER: [&str; 12] = [
    "c",
    "alpha",
    "d",
    "k",
    "epsilon",
    "lower",
    "exact",
    "asymptote",
    "ppi",
    "gap",
    "regime",
    "solver_status",
];

/// Auto policy bounds for including the exact value.
pub const AUTO_EXACT_MAX_D: usize = 3;
pub const AUTO_EXACT_MAX_DK: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsScale {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub scale: EpsScale,
}

impl Default for EpsGrid {
    fn default() -> Self {
        EpsGrid {
            min: 0.01,
            max: 100.0,
            steps: 60,
            scale: EpsScale::Log,
        }
    }
}

impl EpsGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.min > 0.0) {
            return Err(Error::usage("eps_min", "must be finite and > 0"));
        }
        if !(self.max.is_finite() && self.max > self.min) {
            return Err(Error::usage("eps_max", "must be finite and > eps_min"));
        }
        if self.steps < 2 {
            return Err(Error::usage("eps_steps", "must be >= 2"));
        }
        Ok(())
    }

    /// Grid points, endpoints included exactly.
    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.steps - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    EpsScale::Linear => self.min + t * (self.max - self.min),
                    EpsScale::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsGrid {
    pub c: Vec<f64>,
    pub alpha: Vec<f64>,
    pub d: Vec<usize>,
    pub k: Vec<usize>,
}

impl ParamsGrid {
    pub fn len(&self) -> usize {
        self.c.len() * self.alpha.len() * self.d.len() * self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted, deduplicated copy; rows are emitted in this order.
    pub fn normalized(&self) -> ParamsGrid {
        fn floats(v: &[f64]) -> Vec<f64> {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        }
        fn ints(v: &[usize]) -> Vec<usize> {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        }
        ParamsGrid {
            c: floats(&self.c),
            alpha: floats(&self.alpha),
            d: ints(&self.d),
            k: ints(&self.k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactPolicy {
    Auto,
    Always,
    Never,
}

impl ExactPolicy {
    pub fn includes(self, d: usize, k: usize) -> bool {
        match self {
            ExactPolicy::Always => true,
            ExactPolicy::Never => false,
            ExactPolicy::Auto => d <= AUTO_EXACT_MAX_D && d * k <= AUTO_EXACT_MAX_DK,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub eps_grid: EpsGrid,
    pub params_grid: ParamsGrid,
    pub include_exact: ExactPolicy,
    pub solver: SolverConfig,
    pub regime_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    PaperK1,
    PaperMultiK,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Preset> {
        match s {
            "paper-k1" => Some(Preset::PaperK1),
            "paper-multik" => Some(Preset::PaperMultiK),
            _ => None,
        }
    }

    pub fn params_grid(self) -> ParamsGrid {
        match self {
            Preset::PaperK1 => ParamsGrid {
                c: vec![0.01, 0.1, 0.3],
                alpha: vec![5.0, 50.0],
                d: vec![1, 2, 3, 5, 15],
                k: vec![1],
            },
            Preset::PaperMultiK => ParamsGrid {
                c: vec![0.1],
                alpha: vec![50.0],
                d: vec![1, 3, 5],
                k: vec![1, 2, 4],
            },
        }
    }
}

impl SweepSpec {
    pub fn new(params_grid: ParamsGrid) -> Self {
        SweepSpec {
            eps_grid: EpsGrid::default(),
            params_grid,
            include_exact: ExactPolicy::Auto,
            solver: SolverConfig::default(),
            regime_delta: DEFAULT_REGIME_DELTA,
        }
    }

    pub fn preset(p: Preset) -> Self {
        SweepSpec::new(p.params_grid())
    }

    pub fn validate(&self) -> Result<()> {
        self.eps_grid.validate()?;
        self.solver.validate()?;
        if self.params_grid.is_empty() {
            return Err(Error::usage("params_grid", "every parameter list must be non-empty"));
        }
        if !(self.regime_delta.is_finite() && self.regime_delta > 0.0) {
            return Err(Error::usage("regime_delta", "must be finite and > 0"));
        }
        let g = &self.params_grid;
        for &c in &g.c {
            AmpParams::new(c, 2.0, 0.0, 1, 1)?.require_interior()?;
        }
        for &a in &g.alpha {
            AmpParams::new(0.1, a, 0.0, 1, 1)?;
        }
        for &d in &g.d {
            AmpParams::new(0.1, 2.0, 0.0, d, 1)?;
        }
        for &k in &g.k {
            AmpParams::new(0.1, 2.0, 0.0, 1, k)?;
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.params_grid.normalized().len() * self.eps_grid.steps
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    pub alpha: f64,
    pub d: usize,
    pub k: usize,
    pub epsilon: f64,
    pub lower: f64,
    pub exact: Option<f64>,
    pub asymptote: f64,
    pub ppi: f64,
    pub gap: f64,
    pub regime: String,
    pub solver_status: Option<String>,
}

fn compute_row(params: &AmpParams, spec: &SweepSpec) -> Result<SweepRow> {
    let (exact, status) = if spec.include_exact.includes(params.d(), params.k()) {
        match exact_post(params, &spec.solver) {
            Ok(r) => (Some(r.value), Some(r.status.as_str().to_string())),
            Err(Error::Capacity { guard, .. }) => (None, Some(format!("capacity:{guard}"))),
            Err(e) => (None, Some(format!("error:{e}"))),
        }
    } else {
        (None, None)
    };
    let b = bounds_report_with(params, exact, spec.regime_delta)?;
    Ok(SweepRow {
        c: params.c(),
        alpha: params.alpha().value(),
        d: params.d(),
        k: params.k(),
        epsilon: params.eps(),
        lower: b.lower_two_point,
        exact: b.exact,
        asymptote: b.upper_asymptote,
        ppi: b.upper_ppi,
        gap: b.gap_upper_lower,
        regime: b.regime_hint.as_str().to_string(),
        solver_status: status,
    })
}

/// All rows, ordered by `(c, α, d, k, ε)` whatever the pool schedule.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let g = spec.params_grid.normalized();
    let eps = spec.eps_grid.points();
    let mut tasks = Vec::with_capacity(spec.row_count());
    for &c in &g.c {
        for &a in &g.alpha {
            for &d in &g.d {
                for &k in &g.k {
                    for &e in &eps {
                        tasks.push(AmpParams::new(c, a, e, d, k)?);
                    }
                }
            }
        }
    }
    tasks.par_iter().map(|p| compute_row(p, spec)).collect()
}

/// Regime labels along each fixed-parameter run never step back.
pub fn regimes_ordered(rows: &[SweepRow]) -> bool {
    let rank = |s: &str| match Regime::parse(s) {
        Some(Regime::I) => Some(0),
        Some(Regime::II) => Some(1),
        Some(Regime::III) => Some(2),
        _ => None,
    };
    rows.windows(2).all(|w| {
        let same_run = w[0].c == w[1].c && w[0].alpha == w[1].alpha && w[0].d == w[1].d && w[0].k == w[1].k;
        if !same_run {
            return true;
        }
        match (rank(&w[0].regime), rank(&w[1].regime)) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        }
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn metadata(spec: &SweepSpec) -> Vec<String> {
    vec![
        format!("bernamp {}", env!("CARGO_PKG_VERSION")),
        format!("seed={}", spec.solver.seed),
        format!("config_sha256={}", spec.config_hash()),
    ]
}

pub fn write_csv<W: Write>(mut out: W, spec: &SweepSpec, rows: &[SweepRow]) -> std::io::Result<()> {
    for line in metadata(spec) {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            num(r.c),
            num(r.alpha),
            r.d.to_string(),
            r.k.to_string(),
            num(r.epsilon),
            num(r.lower),
            r.exact.map(num).unwrap_or_default(),
            num(r.asymptote),
            num(r.ppi),
            num(r.gap),
            r.regime.clone(),
            r.solver_status.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let bad = |e: String| Error::Unsupported(format!("malformed sweep CSV: {e}"));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let f = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
    let u = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}")));
    let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        rows.push(SweepRow {
            c: f(&rec[0])?,
            alpha: f(&rec[1])?,
            d: u(&rec[2])?,
            k: u(&rec[3])?,
            epsilon: f(&rec[4])?,
            lower: f(&rec[5])?,
            exact: opt(&rec[6]).map(|s| f(&s)).transpose()?,
            asymptote: f(&rec[7])?,
            ppi: f(&rec[8])?,
            gap: f(&rec[9])?,
            regime: rec[10].to_string(),
            solver_status: opt(&rec[11]),
        });
    }
    Ok(rows)
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    meta: JsonMeta,
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct JsonMeta {
    version: &'static str,
    seed: u64,
    config_sha256: String,
}

pub fn write_json<W: Write>(mut out: W, spec: &SweepSpec, rows: &[SweepRow]) -> std::io::Result<()> {
    let doc = JsonDoc {
        meta: JsonMeta {
            version: env!("CARGO_PKG_VERSION"),
            seed: spec.solver.seed,
            config_sha256: spec.config_hash(),
        },
        rows,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}
