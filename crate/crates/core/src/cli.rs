//! Batch front-end: scene configs, command dispatch, artifact emission.
//!
//! Exit codes: `0` success, `1` invalid configuration (nothing written),
//! `2` partial failure (the manifest lists the failed cells).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::acceptance;
use crate::compacta::{sample, CurveGenerator, ProjectivePoint, SampledCompactum};
use crate::error::{Error, Result};
use crate::extremal::truncated_extremal;
use crate::families::{certify_exclusion, default_torus_probes, torus_exp_curve_probe, Family};
use crate::jensen::{duality_check, green_for_compactum, weak_inequality_check};
use crate::optimizer::SolverConfig;
use crate::poly::{HomogeneousPolynomial, C64, DEGREE_CAP};
use crate::rng;
use crate::scanner::{classify, scan, LadderEntry, ScanSpec, Thresholds};
use crate::spectrum::{super_multiplicativity_violations, GradedAlgebraOnK};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub generator: CurveGenerator,
    pub samples: usize,
    #[serde(default = "one")]
    pub orbit_size: usize,
}

fn one() -> usize {
    1
}

fn eight() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleName {
    ExpGraph,
    GapSeries,
    TorusExpCurve,
}

impl ExampleName {
    fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(Value::String(s.to_string())).ok()
    }

    fn as_str(&self) -> &'static str {
        match self {
            ExampleName::ExpGraph => "exp_graph",
            ExampleName::GapSeries => "gap_series",
            ExampleName::TorusExpCurve => "torus_exp_curve",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Ladders at affine points of the chart `Z_0 != 0`.
    Extremal { points: Vec<Vec<C64>>, degrees: Vec<usize> },
    Scan {
        line: crate::scanner::LineChart,
        grid: crate::scanner::GridSpec,
        degrees: Vec<usize>,
        #[serde(default)]
        thresholds: Thresholds,
    },
    /// Green problem and duality check at an affine pole (`K ⊂ P^1` only).
    Jensen {
        pole: C64,
        h: f64,
        #[serde(default = "eight")]
        d_max: usize,
        /// Random test sections for the weak Jensen inequality.
        #[serde(default)]
        sections: usize,
    },
    /// Polydisk / coefficient norm equivalence on random sections.
    Norms {
        count: usize,
        n_max: usize,
        d_max: usize,
        #[serde(default = "eight")]
        samples_per_degree: usize,
    },
    /// Homomorphism norms at homogeneous vectors `z`.
    Spectrum {
        points: Vec<Vec<C64>>,
        ladder: Vec<usize>,
        #[serde(default)]
        sections: usize,
    },
    Example {
        name: ExampleName,
        #[serde(default)]
        ladder: Option<Vec<usize>>,
        #[serde(default)]
        probes: Option<Vec<[C64; 2]>>,
    },
}

impl Task {
    pub fn command(&self) -> &'static str {
        match self {
            Task::Extremal { .. } => "extremal",
            Task::Scan { .. } => "scan",
            Task::Jensen { .. } => "jensen",
            Task::Norms { .. } => "norms",
            Task::Spectrum { .. } => "spectrum",
            Task::Example { .. } => "example",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub geometry: Geometry,
    #[serde(default)]
    pub solver: SolverConfig,
    pub task: Task,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub seed: u64,
}

fn check_ladder(degrees: &[usize]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::Config("degree ladder is empty".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("degree ladder must be strictly ascending".into()));
    }
    if degrees[0] == 0 || degrees[degrees.len() - 1] > DEGREE_CAP {
        return Err(Error::Config(format!("degrees must lie in 1..={DEGREE_CAP}")));
    }
    Ok(())
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// The scene run by `projhull example <name>` without a config file.
    pub fn builtin_example(name: &str) -> Option<Self> {
        let name = ExampleName::parse(name)?;
        let (generator, samples) = match name {
            ExampleName::ExpGraph => (CurveGenerator::exp_graph(0.5, 40), 256),
            ExampleName::GapSeries => (CurveGenerator::factorial_gap_series(0.5, 6), 256),
            ExampleName::TorusExpCurve => (CurveGenerator::TorusExpCurve {}, 128),
        };
        Some(SceneConfig {
            geometry: Geometry { generator, samples, orbit_size: 1 },
            solver: SolverConfig::default(),
            task: Task::Example { name, ladder: None, probes: None },
            output: OutputPaths::default(),
            seed: 0,
        })
    }

    /// Build the compactum and check every task parameter. Nothing is written
    /// unless this succeeds.
    pub fn prepare(&self) -> Result<SampledCompactum> {
        self.solver.validate()?;
        let k = sample(&self.geometry.generator, self.geometry.samples)
            .and_then(|k| k.with_orbit_size(self.geometry.orbit_size))
            .map_err(|e| Error::Config(format!("geometry: {e}")))?;
        let n = k.n();
        match &self.task {
            Task::Extremal { points, degrees } => {
                check_ladder(degrees)?;
                if points.is_empty() || points.iter().any(|p| p.len() != n) {
                    return Err(Error::Config(format!("extremal points must be nonempty affine {n}-vectors")));
                }
            }
            Task::Scan { line, grid, degrees, .. } => {
                check_ladder(degrees)?;
                line.validate(n).map_err(|e| Error::Config(format!("scan line: {e}")))?;
                grid.nodes().map_err(|e| Error::Config(format!("scan grid: {e}")))?;
            }
            Task::Jensen { h, d_max, .. } => {
                if n != 1 {
                    return Err(Error::Config("jensen task needs a compactum in P^1".into()));
                }
                if !(*h > 0.0 && *h <= 0.5) {
                    return Err(Error::Config("jensen grid step must lie in (0, 0.5]".into()));
                }
                check_ladder(&[*d_max])?;
            }
            Task::Norms { count, n_max, d_max, samples_per_degree } => {
                if *count == 0 || *n_max > 3 || *d_max == 0 || *d_max > 12 || *samples_per_degree == 0 {
                    return Err(Error::Config("norms: need count >= 1, n_max <= 3, 1 <= d_max <= 12".into()));
                }
            }
            Task::Spectrum { points, ladder, .. } => {
                check_ladder(ladder)?;
                if points.is_empty() || points.iter().any(|p| p.len() != n + 1 || p.iter().all(|c| c.norm() == 0.0)) {
                    return Err(Error::Config(format!("spectrum points must be nonzero {}-vectors", n + 1)));
                }
            }
            Task::Example { name, ladder, probes } => {
                let expected_torus = matches!(self.geometry.generator, CurveGenerator::TorusExpCurve {});
                let family = Family::from_generator(&self.geometry.generator);
                match name {
                    ExampleName::TorusExpCurve if !expected_torus => {
                        return Err(Error::Config("torus_exp_curve example needs the torus_exp_curve generator".into()))
                    }
                    ExampleName::ExpGraph if !matches!(family, Some(Family::Entire { .. })) => {
                        return Err(Error::Config("exp_graph example needs an entire_graph generator".into()))
                    }
                    ExampleName::GapSeries if !matches!(family, Some(Family::Gap { .. })) => {
                        return Err(Error::Config("gap_series example needs a gap_series_graph generator".into()))
                    }
                    _ => {}
                }
                if let Some(l) = ladder {
                    if l.len() < 2 || l.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Config("example ladder needs two or more ascending rungs".into()));
                    }
                }
                if probes.as_ref().is_some_and(|p| p.is_empty()) {
                    return Err(Error::Config("example probe list is empty".into()));
                }
            }
        }
        Ok(k)
    }

    /// sha256 of the canonical JSON, excluding where the output goes.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputPaths::default();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Artifacts produced in memory before anything touches the disk.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub statuses: Value,
    pub failures: usize,
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

fn status_of(bracketed: bool) -> &'static str {
    if bracketed {
        "bracketed"
    } else {
        "interpolation_regime"
    }
}

fn run_extremal(k: &SampledCompactum, cfg: &SolverConfig, points: &[Vec<C64>], degrees: &[usize]) -> Result<Outcome> {
    let n = k.n();
    let results: Vec<Result<Vec<crate::extremal::ExtremalResult>>> = points
        .par_iter()
        .map(|z| {
            let x = ProjectivePoint::from_affine(0, z)?;
            degrees.iter().map(|&d| truncated_extremal(k, &x, d, cfg)).collect()
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=n).map(|i| format!("re_z{i}")).collect();
    header.extend((1..=n).map(|i| format!("im_z{i}")));
    header.extend(["d", "lam_lo", "lam_hi", "status"].map(String::from));
    w.write_record(&header)?;
    let mut ladders = Vec::new();
    let mut failed = Vec::new();
    for (i, (z, res)) in points.iter().zip(&results).enumerate() {
        let coords: Vec<String> = z.iter().map(|c| c.re.to_string()).chain(z.iter().map(|c| c.im.to_string())).collect();
        match res {
            Ok(rs) => {
                let entries: Vec<LadderEntry> = rs
                    .iter()
                    .map(|r| LadderEntry { d: r.d, lam_lo: r.lam_lo, lam_hi: r.lam_hi, interpolation: !r.is_bracketed() })
                    .collect();
                for r in rs {
                    let mut row = coords.clone();
                    row.extend([r.d.to_string(), r.lam_lo.to_string(), r.lam_hi.to_string(), status_of(r.is_bracketed()).into()]);
                    w.write_record(&row)?;
                }
                let class = classify(&entries, &Thresholds::default());
                ladders.push(json!({"z": z, "ladder": entries, "classification": class, "error": null}));
            }
            Err(e) => {
                for &d in degrees {
                    let mut row = coords.clone();
                    row.extend([d.to_string(), "nan".into(), "nan".into(), "failed".into()]);
                    w.write_record(&row)?;
                }
                ladders.push(json!({"z": z, "ladder": [], "classification": null, "error": e.to_string()}));
                failed.push(json!({"point": i, "error": e.to_string()}));
            }
        }
    }
    let csv_bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let failures = failed.len();
    Ok(Outcome {
        artifacts: vec![
            ("extremal.csv".into(), csv_bytes),
            ("extremal.json".into(), json_bytes(&json!({"k_fingerprint": k.fingerprint(), "points": ladders}))?),
        ],
        statuses: json!({"points": points.len(), "failed": failed}),
        failures,
    })
}

fn run_scan(k: &SampledCompactum, cfg: &SolverConfig, spec: ScanSpec) -> Result<Outcome> {
    let field = scan(k, &spec, cfg)?;
    let mut csv_bytes = Vec::new();
    field.write_csv(&mut csv_bytes)?;
    let failed: Vec<Value> = field
        .failed_cells()
        .into_iter()
        .map(|i| json!({"cell": i, "error": field.cells[i].error}))
        .collect();
    let failures = failed.len();
    Ok(Outcome {
        artifacts: vec![("scan.csv".into(), csv_bytes), ("scan.json".into(), json_bytes(&field.sidecar())?)],
        statuses: json!({"cells": field.cells.len(), "failed": failed}),
        failures,
    })
}

fn run_jensen(k: &SampledCompactum, cfg: &SolverConfig, pole: C64, h: f64, d_max: usize, sections: usize, seed: u64) -> Result<Outcome> {
    let duality = duality_check(k, pole, d_max, h, cfg)?;
    let mut artifacts = Vec::new();
    let mut weak = Value::Null;
    if duality.enclosing {
        let problem = green_for_compactum(k, pole, h)?;
        let mut green = Vec::new();
        problem.write_csv(&mut green)?;
        artifacts.push(("green.csv".to_string(), green));
        if sections > 0 {
            let mut r = rng::stream(seed, "jensen-sections");
            let one = C64::new(1.0, 0.0);
            let mut polys = Vec::with_capacity(sections);
            for i in 0..sections {
                let p = rng::polynomial(&mut r, 1, 1 + i % d_max);
                let sup = problem
                    .k_nodes
                    .iter()
                    .map(|&j| p.fs_section_norm(&[one, problem.surface.position(j)]))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                polys.push(p.scaled(C64::new(1.0 / sup, 0.0)));
            }
            weak = serde_json::to_value(weak_inequality_check(&problem, &polys, 4.0 * h * h)?)?;
        }
    }
    let pass = duality.pass && weak.get("failures").and_then(Value::as_array).is_none_or(|f| f.is_empty());
    let report = json!({"duality": duality, "weak_inequality": weak, "pass": pass});
    artifacts.insert(0, ("jensen.json".into(), json_bytes(&report)?));
    Ok(Outcome { artifacts, statuses: json!({"pass": pass, "enclosing": duality.enclosing}), failures: 0 })
}

fn run_norms(count: usize, n_max: usize, d_max: usize, spd: usize, seed: u64) -> Result<Outcome> {
    let mut r = rng::stream(seed, "norms");
    let polys: Vec<HomogeneousPolynomial> =
        (0..count).map(|i| rng::polynomial(&mut r, i % (n_max + 1), 1 + (i / (n_max + 1)) % d_max)).collect();
    let rows = polys
        .par_iter()
        .map(|p| {
            let (n, d) = (p.n(), p.degree());
            let sup = p.polydisk_sup_lower(spd * d)?;
            let l1 = p.coeff_l1_norm();
            let constant = (((n + 1) * 4usize.pow(n as u32 + 1)) as f64).powi(d as i32);
            Ok((n, d, sup, l1, constant))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "n", "d", "polydisk_sup_lower", "coeff_l1", "constant", "lower_ok", "upper_ok"])?;
    let mut violations = 0;
    for (i, (n, d, sup, l1, constant)) in rows.iter().enumerate() {
        let lower = sup <= l1;
        let upper = *l1 <= constant * sup;
        violations += usize::from(!lower) + usize::from(!upper);
        w.write_record([
            i.to_string(),
            n.to_string(),
            d.to_string(),
            sup.to_string(),
            l1.to_string(),
            constant.to_string(),
            lower.to_string(),
            upper.to_string(),
        ])?;
    }
    let max_ratio = rows.iter().map(|r| r.3 / r.2).fold(0.0, f64::max);
    let summary = json!({"count": count, "violations": violations, "max_l1_over_sup": max_ratio});
    Ok(Outcome {
        artifacts: vec![
            ("norms.csv".into(), w.into_inner().map_err(|e| Error::Io(e.to_string()))?),
            ("norms.json".into(), json_bytes(&summary)?),
        ],
        statuses: json!({"violations": violations}),
        failures: 0,
    })
}

fn run_spectrum(k: &SampledCompactum, cfg: &SolverConfig, points: &[Vec<C64>], ladder: &[usize], sections: usize, seed: u64) -> Result<Outcome> {
    let alg = GradedAlgebraOnK::new(k.clone(), *cfg)?;
    let reports: Vec<Result<crate::spectrum::TripleNormReport>> =
        points.par_iter().map(|z| alg.triple_norm(z, ladder)).collect();
    let mut out = Vec::new();
    let mut failed = Vec::new();
    for (i, (z, r)) in points.iter().zip(&reports).enumerate() {
        match r {
            Ok(t) => {
                let flags = json!({
                    "growth": t.growth,
                    "strictly_increasing": t.strictly_increasing,
                    "super_multiplicativity_violations": super_multiplicativity_violations(&t.ladder),
                    "agrees_with_best_constant": t.comparison.as_ref().map(|c| c.agrees),
                });
                out.push(json!({
                    "z": z,
                    "ladder": t.ladder,
                    "triple_norm_evidence": {"lo": t.estimate_lo, "hi": t.estimate_hi, "best_constant": t.comparison},
                    "flags": flags,
                }));
            }
            Err(e) => {
                out.push(json!({"z": z, "error": e.to_string()}));
                failed.push(json!({"point": i, "error": e.to_string()}));
            }
        }
    }
    let mut gelfand = Value::Null;
    if sections > 0 {
        let hull = points
            .par_iter()
            .map(|z| alg.hull_sample(&ProjectivePoint::new(z)?, ladder))
            .collect::<Result<Vec<_>>>()?;
        let mut r = rng::stream(seed, "spectrum-sections");
        let polys: Vec<HomogeneousPolynomial> = (0..sections).map(|i| rng::polynomial(&mut r, k.n(), ladder[i % ladder.len()])).collect();
        gelfand = serde_json::to_value(alg.gelfand_norm_check(&polys, &hull)?)?;
    }
    let failures = failed.len();
    Ok(Outcome {
        artifacts: vec![("spectrum.json".into(), json_bytes(&json!({"reports": out, "gelfand": gelfand}))?)],
        statuses: json!({"points": points.len(), "failed": failed}),
        failures,
    })
}

fn run_example(
    k: &SampledCompactum,
    cfg: &SolverConfig,
    generator: &CurveGenerator,
    name: ExampleName,
    ladder: Option<&[usize]>,
    probes: Option<&[[C64; 2]]>,
) -> Result<Outcome> {
    if name == ExampleName::TorusExpCurve {
        let probes: Vec<(C64, C64)> = match probes {
            Some(p) => p.iter().map(|q| (q[0], q[1])).collect(),
            None => default_torus_probes(),
        };
        let report = torus_exp_curve_probe(k, &probes, ladder.unwrap_or(&[1, 2, 3, 4]), cfg)?;
        return Ok(Outcome {
            artifacts: vec![("torus.json".into(), json_bytes(&report)?)],
            statuses: json!({"probes": report.entries.len()}),
            failures: 0,
        });
    }
    let family = Family::from_generator(generator).ok_or_else(|| Error::Config("not a graph generator".into()))?;
    let (default_ladder, default_probes): (Vec<usize>, Vec<[C64; 2]>) = match name {
        ExampleName::ExpGraph => {
            let e = |z: C64| z.exp();
            let mut p = vec![
                [C64::new(0.0, 0.0), C64::new(2.0, 0.0)],
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.3, 0.0), 2.0 * e(C64::new(0.3, 0.0))],
            ];
            p.extend([C64::new(0.3, 0.0), C64::new(0.0, 0.2), C64::new(-0.25, 0.1)].map(|z| [z, family.value(z)]));
            (vec![1, 2, 5, 10, 20], p)
        }
        _ => {
            let half = C64::new(0.5, 0.0);
            let inner = C64::new(0.3, 0.0);
            (vec![2, 3, 4, 5], vec![[half, family.value(half) + 1.0], [inner, family.value(inner)]])
        }
    };
    let ladder = ladder.map(<[usize]>::to_vec).unwrap_or(default_ladder);
    let probes = probes.map(<[[C64; 2]]>::to_vec).unwrap_or(default_probes);
    let certs: Vec<Result<crate::families::ExclusionCertificate>> =
        probes.par_iter().map(|&x| certify_exclusion(k, x, &family, &ladder)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["re_z", "im_z", "re_w", "im_w", "family", "rung", "d", "abs_p_x", "sup_k", "c", "log_c", "log_c_analytic", "verdict"])?;
    let mut out = Vec::new();
    let mut failed = Vec::new();
    for (i, (x, c)) in probes.iter().zip(&certs).enumerate() {
        match c {
            Ok(cert) => {
                let verdict = serde_json::to_value(cert.verdict)?;
                let verdict = verdict.as_str().unwrap_or_default().to_string();
                for r in &cert.records {
                    w.write_record([
                        x[0].re.to_string(),
                        x[0].im.to_string(),
                        x[1].re.to_string(),
                        x[1].im.to_string(),
                        cert.family.clone(),
                        r.rung.to_string(),
                        r.d.to_string(),
                        r.abs_p_x.to_string(),
                        r.sup_k.to_string(),
                        r.c.to_string(),
                        r.log_c.to_string(),
                        r.log_c_analytic.to_string(),
                        verdict.clone(),
                    ])?;
                }
                out.push(serde_json::to_value(cert)?);
            }
            Err(e) => {
                out.push(json!({"x": x, "error": e.to_string()}));
                failed.push(json!({"probe": i, "error": e.to_string()}));
            }
        }
    }
    let failures = failed.len();
    Ok(Outcome {
        artifacts: vec![
            ("certificates.json".into(), json_bytes(&json!({"example": name.as_str(), "ladder": ladder, "certificates": out}))?),
            ("certificates.csv".into(), w.into_inner().map_err(|e| Error::Io(e.to_string()))?),
        ],
        statuses: json!({"probes": probes.len(), "failed": failed}),
        failures,
    })
}

/// Run a validated scene and return its artifacts.
pub fn execute(config: &SceneConfig, k: &SampledCompactum) -> Result<Outcome> {
    let cfg = &config.solver;
    match &config.task {
        Task::Extremal { points, degrees } => run_extremal(k, cfg, points, degrees),
        Task::Scan { line, grid, degrees, thresholds } => run_scan(
            k,
            cfg,
            ScanSpec { line: line.clone(), grid: grid.clone(), degrees: degrees.clone(), thresholds: *thresholds },
        ),
        Task::Jensen { pole, h, d_max, sections } => run_jensen(k, cfg, *pole, *h, *d_max, *sections, config.seed),
        Task::Norms { count, n_max, d_max, samples_per_degree } => {
            run_norms(*count, *n_max, *d_max, *samples_per_degree, config.seed)
        }
        Task::Spectrum { points, ladder, sections } => run_spectrum(k, cfg, points, ladder, *sections, config.seed),
        Task::Example { name, ladder, probes } => {
            run_example(k, cfg, &config.geometry.generator, *name, ladder.as_deref(), probes.as_deref())
        }
    }
}

/// Write artifacts and the manifest into `dir`.
pub fn write_outcome(dir: &Path, command: &str, config: &SceneConfig, outcome: &Outcome, wall_time_s: f64) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut list = Vec::new();
    for (name, bytes) in &outcome.artifacts {
        std::fs::write(dir.join(name), bytes)?;
        list.push(json!({"path": name, "sha256": hex::encode(Sha256::digest(bytes)), "bytes": bytes.len()}));
    }
    let manifest = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config.hash(),
        "seed": config.seed,
        "artifact_list": list,
        "statuses": outcome.statuses,
        "failures": outcome.failures,
        "wall_time_s": wall_time_s,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, json_bytes(&manifest)?)?;
    Ok(path)
}

#[derive(Debug, Parser)]
#[command(name = "projhull", version, about = "Projective extremal functions and hull evidence for sampled compacta")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scene configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized sweeps (overrides the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    Extremal,
    Scan,
    Jensen,
    Norms,
    Spectrum,
    /// Built-in example families: exp_graph, gap_series, torus_exp_curve.
    Example { name: String },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long)]
        list: bool,
    },
}

fn selftest(list: bool) -> i32 {
    if list {
        for c in acceptance::criteria() {
            println!("C{} {}  (PROJHULL_TOL_C{} = {:e}: {})", c.id, c.name, c.id, c.default_tolerance, c.tolerance_meaning);
        }
        return EXIT_OK;
    }
    let mut all = true;
    for c in acceptance::criteria() {
        let r = acceptance::run_criterion(&c);
        println!("{}", r.line());
        all &= r.passed;
    }
    if all {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn load_config(cli: &Cli, command: &str, example: Option<&str>) -> Result<SceneConfig> {
    let mut config = match (&cli.config, example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            SceneConfig::from_json(&text)?
        }
        (None, Some(name)) => {
            SceneConfig::builtin_example(name).ok_or_else(|| Error::Config(format!("unknown example {name:?}")))?
        }
        (None, None) => return Err(Error::Config(format!("`{command}` needs --config <path>"))),
    };
    if config.task.command() != command {
        return Err(Error::Config(format!("config task is `{}`, command is `{command}`", config.task.command())));
    }
    if let (Some(name), Task::Example { name: task_name, .. }) = (example, &config.task) {
        if task_name.as_str() != name {
            return Err(Error::Config(format!("config example is `{}`, command asks for `{name}`", task_name.as_str())));
        }
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.dir = Some(out.clone());
    }
    Ok(config)
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INVALID;
        }
        // a global pool may already exist (tests); the request is then advisory
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let (command, example) = match &cli.command {
        Command::Selftest { list } => return selftest(*list),
        Command::Extremal => ("extremal", None),
        Command::Scan => ("scan", None),
        Command::Jensen => ("jensen", None),
        Command::Norms => ("norms", None),
        Command::Spectrum => ("spectrum", None),
        Command::Example { name } => ("example", Some(name.as_str())),
    };
    let start = Instant::now();
    let prepared = load_config(&cli, command, example).and_then(|c| c.prepare().map(|k| (c, k)));
    let (config, k) = match prepared {
        Ok(v) => v,
        Err(e) => {
            eprintln!("invalid configuration: {e}");
            return EXIT_INVALID;
        }
    };
    let dir = config.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let outcome = match execute(&config, &k) {
        Ok(o) => o,
        Err(e) => Outcome {
            artifacts: Vec::new(),
            statuses: json!({"error": e.to_string()}),
            failures: 1,
        },
    };
    match write_outcome(&dir, command, &config, &outcome, start.elapsed().as_secs_f64()) {
        Ok(path) => {
            for (name, _) in &outcome.artifacts {
                println!("{}", dir.join(name).display());
            }
            println!("{}", path.display());
        }
        Err(e) => {
            eprintln!("failed to write artifacts: {e}");
            return EXIT_PARTIAL;
        }
    }
    if outcome.failures > 0 {
        eprintln!("{} failed cells; see the manifest", outcome.failures);
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}
