//! The pointwise pipeline over seeded sample points of a catalog example or
//! a solved graph.

use std::fmt;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use assoc_core::g2::basis7;
use assoc_core::geom::{
    evaluate_point, AffinePatch, CovDerivOptions, EvalOptions, FrameGauge, ImmersionPatch,
    IsotypicBreakdown, PerturbedCone, Point3, PointEvaluation, SlCone, SphereCylinder, Verdict,
};
use assoc_core::hl::{graph_to_patch, GraphGrid};
use assoc_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Largest Dirac residual of a grid file accepted by `verify graph:FILE`.
pub const GRID_RESIDUAL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum Example {
    Plane,
    SlCone,
    PerturbedCone,
    SphereCylinder,
    Graph(PathBuf),
}

impl Example {
    pub const NAMES: [&'static str; 5] = [
        "plane",
        "sl-cone",
        "perturbed-cone",
        "sphere-cylinder",
        "graph:FILE",
    ];
}

impl FromStr for Example {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "plane" => Self::Plane,
            "sl-cone" => Self::SlCone,
            "perturbed-cone" => Self::PerturbedCone,
            "sphere-cylinder" => Self::SphereCylinder,
            _ => match s.strip_prefix("graph:") {
                Some(p) if !p.is_empty() => Self::Graph(PathBuf::from(p)),
                _ => {
                    return Err(CliError::Config(format!(
                        "unknown example {s:?} (expected one of {})",
                        Self::NAMES.join(", ")
                    )))
                }
            },
        })
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plane => f.write_str("plane"),
            Self::SlCone => f.write_str("sl-cone"),
            Self::PerturbedCone => f.write_str("perturbed-cone"),
            Self::SphereCylinder => f.write_str("sphere-cylinder"),
            Self::Graph(p) => write!(f, "graph:{}", p.display()),
        }
    }
}

pub struct LoadedExample {
    pub id: String,
    pub patch: Arc<dyn ImmersionPatch>,
    /// Preset thresholds for this example.
    pub tolerances: Tolerances,
    pub gauge: FrameGauge,
}

pub fn load_example(ex: &Example) -> CliResult<LoadedExample> {
    let (patch, tolerances): (Arc<dyn ImmersionPatch>, _) = match ex {
        Example::Plane => (
            Arc::new(AffinePatch::calibrated_plane()),
            Tolerances::default(),
        ),
        Example::SlCone => (Arc::new(SlCone::default()), Tolerances::curved()),
        Example::PerturbedCone => (Arc::new(PerturbedCone::default()), Tolerances::default()),
        Example::SphereCylinder => (Arc::new(SphereCylinder::default()), Tolerances::default()),
        Example::Graph(path) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            let (grid, _) = GraphGrid::read_from(BufReader::new(file))?;
            (
                Arc::new(graph_to_patch(&grid, GRID_RESIDUAL_LIMIT)?),
                Tolerances::solver_patch(),
            )
        }
    };
    let mut gauge = FrameGauge::default();
    if *ex == Example::SphereCylinder {
        // e4 is tangent to this patch
        gauge.seed_normal = basis7(5);
    }
    Ok(LoadedExample {
        id: ex.to_string(),
        patch,
        tolerances,
        gauge,
    })
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub skip_christoffel: bool,
    /// Record wall-clock times (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metrics {
    pub associativity_residual: f64,
    pub frame_failure: bool,
    pub epsilon_residual: f64,
    pub mean_curvature: f64,
    pub sff_norm: f64,
    pub traceless_norm: f64,
    pub symmetry_residual: f64,
    pub w15: f64,
    pub w13: f64,
    pub w13_relative: f64,
    pub breakdown: IsotypicBreakdown,
    pub nabla_norm: f64,
    pub non_harmonic_fraction: f64,
    pub codazzi_defect: f64,
}

impl From<&PointEvaluation> for Metrics {
    fn from(e: &PointEvaluation) -> Self {
        Self {
            associativity_residual: e.associativity_residual,
            frame_failure: e.frame_failure,
            epsilon_residual: e.epsilon_residual,
            mean_curvature: e.mean_curvature,
            sff_norm: e.sff_norm,
            traceless_norm: e.traceless_norm,
            symmetry_residual: e.symmetry_residual,
            w15: e.w15,
            w13: e.w13,
            w13_relative: e.w13_relative(),
            breakdown: e.breakdown,
            nabla_norm: e.breakdown.full_norm(),
            non_harmonic_fraction: e.breakdown.non_harmonic_fraction(),
            codazzi_defect: e.codazzi_defect,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub kind: &'static str,
    pub example: String,
    pub sample: usize,
    pub x: Point3,
    pub pass: bool,
    pub failures: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// Worst values over the evaluated samples.
#[derive(Clone, Debug, Serialize)]
pub struct Extremes {
    pub max_associativity_residual: f64,
    pub max_mean_curvature: f64,
    pub max_symmetry_residual: f64,
    pub max_w13_relative: f64,
    pub max_non_harmonic_fraction: f64,
    pub min_traceless_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub kind: &'static str,
    pub example: String,
    pub expected_associative: bool,
    pub samples: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub frame_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremes: Option<Extremes>,
    pub tolerances: Tolerances,
    pub skip_christoffel: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

pub struct VerifyReport {
    pub records: Vec<ReportRecord>,
    pub summary: Summary,
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn run_verify(ex: &LoadedExample, opts: &VerifyOptions) -> CliResult<VerifyReport> {
    if opts.samples == 0 {
        return Err(CliError::Config("sample count must be at least 1".into()));
    }
    opts.tolerances.validate()?;
    let start = Instant::now();
    let patch = ex.patch.as_ref();
    let inset = 2.0 * patch.stencil_radius() + 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<Point3> = (0..opts.samples)
        .map(|_| patch.domain().sample(&mut rng, inset))
        .collect();
    let eval_opts = EvalOptions {
        gauge: ex.gauge.clone(),
        frame_tolerance: opts.tolerances.frame,
        cov: CovDerivOptions {
            skip_christoffel: opts.skip_christoffel,
        },
    };

    let records: Vec<ReportRecord> = points
        .par_iter()
        .enumerate()
        .map(|(sample, &x)| {
            let t = Instant::now();
            let mut rec = ReportRecord {
                kind: "sample",
                example: ex.id.clone(),
                sample,
                x,
                pass: false,
                failures: Vec::new(),
                error: None,
                metrics: None,
                verdict: None,
                wall_time_ms: None,
            };
            match evaluate_point(patch, x, &eval_opts) {
                Ok(e) => {
                    let v = Verdict::new(&e, &opts.tolerances);
                    rec.pass = v.pass();
                    rec.failures = v.failures();
                    rec.metrics = Some(Metrics::from(&e));
                    rec.verdict = Some(v);
                }
                Err(err) => {
                    rec.failures = vec!["error"];
                    rec.error = Some(err.to_string());
                }
            }
            if opts.timing {
                rec.wall_time_ms = Some(elapsed_ms(t));
            }
            rec
        })
        .collect();

    let metrics: Vec<&Metrics> = records.iter().filter_map(|r| r.metrics.as_ref()).collect();
    let fold_max = |f: fn(&Metrics) -> f64| metrics.iter().map(|m| f(m)).fold(0.0, f64::max);
    let extremes = (!metrics.is_empty()).then(|| Extremes {
        max_associativity_residual: fold_max(|m| m.associativity_residual),
        max_mean_curvature: fold_max(|m| m.mean_curvature),
        max_symmetry_residual: fold_max(|m| m.symmetry_residual),
        max_w13_relative: fold_max(|m| m.w13_relative),
        max_non_harmonic_fraction: fold_max(|m| m.non_harmonic_fraction),
        min_traceless_norm: metrics
            .iter()
            .map(|m| m.traceless_norm)
            .fold(f64::INFINITY, f64::min),
    });
    let passed = records.iter().filter(|r| r.pass).count();
    let summary = Summary {
        kind: "summary",
        example: ex.id.clone(),
        expected_associative: patch.expected_associative(),
        samples: opts.samples,
        seed: opts.seed,
        passed,
        failed: records.len() - passed,
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        frame_failures: metrics.iter().filter(|m| m.frame_failure).count(),
        extremes,
        tolerances: opts.tolerances,
        skip_christoffel: opts.skip_christoffel,
        pass: passed == records.len(),
        wall_time_ms: opts.timing.then(|| elapsed_ms(start)),
    };
    Ok(VerifyReport { records, summary })
}

impl VerifyReport {
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut out, &self.summary)?;
        out.write_all(b"\n")
    }

    pub fn human_summary(&self) -> String {
        let s = &self.summary;
        let mut text = format!(
            "{}: {}/{} samples pass ({} errors, {} frame failures) -> {}",
            s.example,
            s.passed,
            s.samples,
            s.errors,
            s.frame_failures,
            if s.pass { "PASS" } else { "FAIL" }
        );
        if let Some(e) = &s.extremes {
            text.push_str(&format!(
                "\n  max assoc {:.2e}  max |H| {:.2e}  max sym {:.2e}  max w13/|II0| {:.2e}  max non-harmonic {:.2e}  min |II0| {:.3}",
                e.max_associativity_residual,
                e.max_mean_curvature,
                e.max_symmetry_residual,
                e.max_w13_relative,
                e.max_non_harmonic_fraction,
                e.min_traceless_norm
            ));
        }
        if let Some(r) = self.records.iter().find(|r| !r.pass) {
            text.push_str(&format!(
                "\n  first failing sample {} at {:?}: {}",
                r.sample,
                r.x,
                r.failures.join(", ")
            ));
            if let Some(err) = &r.error {
                text.push_str(&format!(" ({err})"));
            }
        }
        text
    }
}
