//! Command implementations behind the `curve-recon` binary.

pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use curve_recon::curve::{make_curve, CurveFamily, CurveModel};
use curve_recon::gadget::{self, VerifyReport};
use curve_recon::io::{curve_from_json, curve_to_json, read_points_csv, write_edges, write_points_csv};
use curve_recon::recon::{compatible_crust, graph_equal, nn_compatible, nn_crust_baseline, ReconGraph};
use curve_recon::sampling::{default_density, ground_truth_graph, greedy_sample_with, RhoReport, SampleSet, SamplingReport, Validator};
use curve_recon::{CompatParams, Error, Result};

use svg::{emit_svg, SvgOptions};

#[derive(Parser, Debug)]
#[command(name = "curve-recon", version, about = "Curve reconstruction from point samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Reconstruct a point CSV into an edge list.
    Reconstruct,
    /// Sample a curve greedily at the target epsilon.
    Generate,
    /// Measure eps* (and rho* for tagged samples) of a sample against a curve.
    Validate,
    /// Emit the tied-annuli point set with its four curves.
    Counterexample,
    /// Time the reconstruction algorithms on circle samples.
    Bench,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// compatible-crust for planar input, nn-compatible otherwise.
    Auto,
    NnCompatible,
    CompatibleCrust,
    NnCrust,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Circle,
    Ellipse,
    Concentric,
    GadgetLoop,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, value_enum, default_value_t = Algorithm::Auto)]
    pub algorithm: Algorithm,
    #[arg(long, global = true, default_value_t = 0.66)]
    pub epsilon: f64,
    /// Discretization step for validators; defaults to 1e-3 of the shortest component.
    #[arg(long, global = true)]
    pub density: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Input files; `validate` takes the sample CSV then the curve JSON.
    #[arg(long = "in", global = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 800.0)]
    pub svg_size: f64,
    #[arg(long, global = true, default_value_t = 1.5)]
    pub stroke: f64,
    /// Curve family for `generate` when no curve file is given.
    #[arg(long, global = true, value_enum, default_value_t = Family::Circle)]
    pub family: Family,
    /// Where `generate` writes the curve JSON; defaults to `--out` with a `.json` extension.
    #[arg(long, global = true)]
    pub curve_out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0.95)]
    pub safety: f64,
    /// Ring copies for `counterexample`.
    #[arg(long, global = true, default_value_t = gadget::K_STAR)]
    pub copies: usize,
    #[arg(long, global = true)]
    pub skip_verify: bool,
    /// Sample sizes for `bench`.
    #[arg(long, global = true, value_delimiter = ',', default_values_t = vec![2500usize, 5000, 10000, 20000])]
    pub sizes: Vec<usize>,
    #[arg(long, global = true, default_value_t = 5)]
    pub reps: usize,
}

/// Successful run; `flagged` maps to exit status 2.
#[derive(Debug, Default)]
pub struct Outcome {
    pub message: String,
    pub flagged: bool,
}

impl Common {
    fn svg_options(&self) -> SvgOptions {
        SvgOptions {
            size: self.svg_size,
            stroke: self.stroke,
        }
    }

    fn check(&self, cmd: Command) -> Result<()> {
        CompatParams::new(self.epsilon)?;
        if let Some(d) = self.density {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Unsupported(format!("density must be positive, got {d}")));
            }
        }
        let needed = match cmd {
            Command::Reconstruct => 1,
            Command::Validate => 2,
            _ => 0,
        };
        if self.inputs.len() < needed {
            return Err(Error::Unsupported(format!("{cmd:?} needs {needed} --in file(s)").to_lowercase()));
        }
        for p in &self.inputs {
            if !p.is_file() {
                return Err(Error::Io(format!("cannot read {}", p.display())));
            }
        }
        for p in [&self.out, &self.svg, &self.curve_out].into_iter().flatten() {
            let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if cmd != Command::Counterexample && !parent.is_dir() {
                return Err(Error::Io(format!("output directory {} does not exist", parent.display())));
            }
        }
        if cmd == Command::Bench && (self.sizes.iter().any(|&n| n < 3) || self.reps == 0) {
            return Err(Error::Unsupported("bench sizes must be >= 3 and reps >= 1".into()));
        }
        Ok(())
    }
}

/// Writes through a temporary file in the same directory, then renames, so
/// a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(format!("{}: {e}", path.display()))
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    cli.common.check(cli.command)?;
    match cli.command {
        Command::Reconstruct => reconstruct(&cli.common),
        Command::Generate => generate(&cli.common),
        Command::Validate => validate(&cli.common),
        Command::Counterexample => counterexample(&cli.common),
        Command::Bench => bench(&cli.common),
    }
}

pub fn reconstruct_with(sample: &SampleSet, algorithm: Algorithm, params: &CompatParams) -> Result<ReconGraph> {
    if sample.len() < 3 {
        return Err(Error::Unsupported(format!("need at least 3 points, got {}", sample.len())));
    }
    match algorithm {
        Algorithm::Auto if sample.dim() == 2 => compatible_crust(sample, params),
        Algorithm::Auto | Algorithm::NnCompatible => nn_compatible(sample, params),
        Algorithm::CompatibleCrust => compatible_crust(sample, params),
        Algorithm::NnCrust => nn_crust_baseline(sample),
    }
}

fn coords(sample: &SampleSet) -> Vec<Vec<f64>> {
    sample.points().iter().map(|p| p.coords().to_vec()).collect()
}

fn reconstruct(c: &Common) -> Result<Outcome> {
    let path = &c.inputs[0];
    let sample = read_points_csv(&read(path)?).map_err(|e| with_path(path, e))?;
    let params = CompatParams::new(c.epsilon)?;
    let g = reconstruct_with(&sample, c.algorithm, &params)?;
    let edges = write_edges(&g);
    let svg = match &c.svg {
        Some(_) => Some(emit_svg(&coords(&sample), g.edges(), None, c.svg_options())?),
        None => None,
    };
    match &c.out {
        Some(out) => write_atomic(out, &edges)?,
        None => print!("{edges}"),
    }
    if let (Some(p), Some(s)) = (&c.svg, svg) {
        write_atomic(p, &s)?;
    }
    let mut message = format!("vertices {} edges {}", g.n(), g.edges().len());
    if g.flagged() {
        message.push_str(&format!(
            "\nflagged: {} vertices without a compatible neighbor (first: {}); input is not a valid sample at epsilon {}",
            g.unmatched().len(),
            g.unmatched()[0],
            c.epsilon
        ));
    }
    Ok(Outcome {
        message,
        flagged: g.flagged(),
    })
}

fn family_curve(f: Family) -> Result<CurveModel> {
    match f {
        Family::Circle => make_curve(&CurveFamily::Circle { center: [0.0, 0.0], radius: 1.0 }),
        Family::Ellipse => make_curve(&CurveFamily::Ellipse { center: [0.0, 0.0], a: 2.0, b: 1.0 }),
        Family::Concentric => make_curve(&CurveFamily::Concentric { center: [0.0, 0.0], inner: 1.0, outer: 3.0 }),
        Family::GadgetLoop => gadget::gadget_loop(),
    }
}

/// A curve file holds either a family description or a full curve document.
fn load_curve(path: &Path) -> Result<CurveModel> {
    let text = read(path)?;
    if let Ok(f) = serde_json::from_str::<CurveFamily>(&text) {
        return make_curve(&f);
    }
    curve_from_json(&text).map_err(|e| with_path(path, e))
}

fn generate(c: &Common) -> Result<Outcome> {
    let curve = match c.inputs.first() {
        Some(p) => load_curve(p)?,
        None => family_curve(c.family)?,
    };
    if !curve.is_closed() {
        return Err(Error::Unsupported("sampling needs closed curves".into()));
    }
    let density = c.density.unwrap_or_else(|| default_density(&curve));
    let v = Validator::new(&curve, density)?;
    let sample = greedy_sample_with(&v, c.epsilon, c.seed, c.safety)?;
    let report = v.epsilon_star(&sample)?;
    let csv = write_points_csv(&sample);
    let json = curve_to_json(&curve)?;
    let svg = match &c.svg {
        Some(_) => {
            let g = ground_truth_graph(&curve, &sample)?;
            Some(emit_svg(&coords(&sample), g.edges(), Some(&curve), c.svg_options())?)
        }
        None => None,
    };
    match &c.out {
        Some(out) => {
            write_atomic(out, &csv)?;
            let curve_path = c.curve_out.clone().unwrap_or_else(|| out.with_extension("json"));
            write_atomic(&curve_path, &(json + "\n"))?;
        }
        None => print!("{csv}"),
    }
    if let (Some(p), Some(s)) = (&c.svg, svg) {
        write_atomic(p, &s)?;
    }
    Ok(Outcome {
        message: format!("points {} eps_star {:.6}", sample.len(), report.eps_star),
        flagged: false,
    })
}

#[derive(Serialize)]
struct ValidateReport {
    epsilon: f64,
    verdict: bool,
    eps_star: SamplingReport,
    rho_star: Option<RhoReport>,
}

fn validate(c: &Common) -> Result<Outcome> {
    let (sp, cp) = (&c.inputs[0], &c.inputs[1]);
    let sample = read_points_csv(&read(sp)?).map_err(|e| with_path(sp, e))?;
    let curve = load_curve(cp)?;
    let density = c.density.unwrap_or_else(|| default_density(&curve));
    let v = Validator::new(&curve, density)?;
    let eps_star = v.epsilon_star(&sample)?;
    let rho_star = match sample.tags() {
        Some(_) => Some(v.rho_star(&sample)?),
        None => None,
    };
    let verdict = eps_star.verdict(c.epsilon);
    let mut message = format!(
        "eps_star {:.6} at ({:.6}, {:.6}); {} a {}-sample",
        eps_star.eps_star,
        eps_star.witness[0],
        eps_star.witness[1],
        if verdict { "is" } else { "is not" },
        c.epsilon
    );
    if let Some(r) = &rho_star {
        message.push_str(&format!("\nrho_star {:.6}", r.rho_star));
    }
    let json = to_json(&ValidateReport {
        epsilon: c.epsilon,
        verdict,
        eps_star,
        rho_star,
    })?;
    match &c.out {
        Some(out) => write_atomic(out, &json)?,
        None => print!("{json}"),
    }
    Ok(Outcome {
        message,
        flagged: !verdict,
    })
}

#[derive(Serialize)]
struct CounterexampleReport {
    copies: usize,
    points: usize,
    components: Vec<usize>,
    /// `graphs_differ[i][j]`: ground-truth graphs of variants `i + 1` and `j + 1` differ.
    graphs_differ: Vec<Vec<bool>>,
    verification: Option<VerifyReport>,
}

fn counterexample(c: &Common) -> Result<Outcome> {
    let out = c
        .out
        .clone()
        .ok_or_else(|| Error::Unsupported("counterexample needs --out DIR".into()))?;
    let g = gadget::tied_annuli(c.copies)?;
    let shared = g.points();
    let mut files: Vec<(PathBuf, String)> = vec![(out.join("points.csv"), write_points_csv(&shared))];
    let mut graphs = Vec::new();
    let mut components = Vec::new();
    for v in 0..g.variant_count() {
        let var = g.variant(v)?;
        let gt = ground_truth_graph(&var.curve, &var.sample)?;
        components.push(gt.component_count());
        files.push((out.join(format!("curve_{}.json", v + 1)), curve_to_json(&var.curve)? + "\n"));
        files.push((out.join(format!("edges_{}.txt", v + 1)), write_edges(&gt)));
        if let Some(prefix) = &c.svg {
            let name = format!("{}_{}.svg", prefix.display(), v + 1);
            files.push((PathBuf::from(name), emit_svg(&coords(&shared), gt.edges(), None, c.svg_options())?));
        }
        graphs.push(gt);
    }
    let mut graphs_differ = vec![vec![false; graphs.len()]; graphs.len()];
    for i in 0..graphs.len() {
        for j in 0..graphs.len() {
            graphs_differ[i][j] = !graph_equal(&graphs[i], &graphs[j])?;
        }
    }
    let all_differ = (0..graphs.len()).all(|i| (0..graphs.len()).all(|j| i == j || graphs_differ[i][j]));
    let verification = if c.skip_verify {
        None
    } else {
        Some(gadget::verify_gadget(&g, gadget::EPS, c.density.unwrap_or(1e-3))?)
    };
    let passed = verification.as_ref().map_or(true, VerifyReport::passed);
    let mut message = format!(
        "copies {} points {} components {:?} pairwise graphs differ: {}",
        c.copies,
        shared.len(),
        components,
        all_differ
    );
    if let Some(r) = &verification {
        message.push_str(&format!(
            "\nverification: min margin {:.4e} max eps_star {:.6} {}",
            r.min_margin(),
            r.max_eps_star(),
            if r.passed() { "PASS" } else { "FAIL" }
        ));
    }
    let report = CounterexampleReport {
        copies: c.copies,
        points: shared.len(),
        components,
        graphs_differ,
        verification,
    };
    files.push((out.join("report.json"), to_json(&report)?));
    files.push((out.join("construction_log.json"), to_json(g.construction_log())?));
    fs::create_dir_all(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    for (p, s) in &files {
        write_atomic(p, s)?;
    }
    Ok(Outcome {
        message,
        flagged: !passed || !all_differ,
    })
}

/// `n` points on the unit circle at jittered, evenly spread angles.
pub fn circle_sample(n: usize, seed: u64) -> SampleSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let t = std::f64::consts::TAU * (j as f64 + rng.gen_range(-0.25..0.25)) / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    SampleSet::from_xy(&pts)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn bench(c: &Common) -> Result<Outcome> {
    let params = CompatParams::new(c.epsilon)?;
    let algos = match c.algorithm {
        Algorithm::Auto => vec![Algorithm::NnCompatible, Algorithm::CompatibleCrust, Algorithm::NnCrust],
        a => vec![a],
    };
    let mut csv = String::from("n,algorithm,seconds\n");
    for &n in &c.sizes {
        let sample = circle_sample(n, c.seed);
        for &a in &algos {
            let mut times = Vec::with_capacity(c.reps);
            // One untimed warm-up run.
            reconstruct_with(&sample, a, &params)?;
            for _ in 0..c.reps {
                let t = Instant::now();
                reconstruct_with(&sample, a, &params)?;
                times.push(t.elapsed().as_secs_f64());
            }
            let name = a.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            csv.push_str(&format!("{n},{name},{}\n", median(times)));
        }
    }
    match &c.out {
        Some(out) => write_atomic(out, &csv)?,
        None => print!("{csv}"),
    }
    Ok(Outcome {
        message: format!("{} sizes x {} algorithms, median of {}", c.sizes.len(), algos.len(), c.reps),
        flagged: false,
    })
}
