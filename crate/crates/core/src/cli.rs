//! Command-line front end.
//!
//! Exit status is 0 on success, 2 when a precondition or the usage is
//! violated and 1 on internal failures. Every error message starts with the
//! name of the error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::edge::{edge_mode_count, ribbon_spectrum, DEFAULT_K_GRID};
use crate::error::{Error, Result};
use crate::greens::{g0_from_model, heff_invariant, n3_invariant, DEFAULT_KGRID, DEFAULT_WQUAD};
use crate::invariants::{
    chern_number_2d, critical_points, gauss_degree, phase_diagram, second_chern_4d, winding_number_1d,
    winding_number_3d, z2_index_2d, z2_strong_3d, SEEDS_PER_AXIS,
};
use crate::io::{self, Format, Record};
use crate::ktable::{generate_periodic_table, is_even_entry, ko_torus, render_table, table_entry};
use crate::models::{build_model, d_vector_model, BlochModel, DVectorFamily, ModelSpec};
use crate::symmetry::{az_class, detect, preset_unitary, CartanLabel, SymmetryCandidate, SymmetryKind};

#[derive(Debug, Parser)]
#[command(name = "topoband", version, about = "Topological invariants of lattice models")]
struct Cli {
    /// Worker threads for grid evaluations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key=value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a bulk invariant.
    Invariant {
        #[command(subcommand)]
        kind: InvariantKind,
    },
    /// Look up the tenfold-way classification.
    Classify {
        #[command(subcommand)]
        kind: ClassifyKind,
    },
    /// Check symmetry candidates and report the Altland-Zirnbauer class.
    Symmetry {
        #[command(subcommand)]
        kind: SymmetryCmd,
    },
    /// Ribbon spectra and edge-mode counting.
    Edge {
        #[command(subcommand)]
        kind: EdgeKind,
    },
    /// Invariant on each interval between critical parameter values.
    PhaseDiagram(Opts),
    /// Gap-closing points of a d-vector family.
    CriticalPoints(Opts),
}

#[derive(Debug, Subcommand)]
enum InvariantKind {
    Chern(Opts),
    Chern2(Opts),
    Winding(Opts),
    Z2(Opts),
    #[command(name = "z2-3d")]
    Z23d(Opts),
    Gauss(Opts),
    N3(Opts),
    Heff(Opts),
}

#[derive(Debug, Subcommand)]
enum ClassifyKind {
    Entry(Opts),
    Torus(Opts),
    Table(Opts),
}

#[derive(Debug, Subcommand)]
enum SymmetryCmd {
    Check(Opts),
}

#[derive(Debug, Subcommand)]
enum EdgeKind {
    Spectrum(Opts),
    Count(Opts),
}

/// Flags shared by all subcommands. Each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
struct Opts {
    #[arg(long)]
    model: Option<String>,
    /// Full model spec, e.g. `model=qahe2d m=1`.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long = "n-occ")]
    n_occ: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Chiral unitary: preset name or inline row-major entries.
    #[arg(long)]
    chiral: Option<String>,
    /// Time-reversal unitary `U` with `Θ = U K`.
    #[arg(long)]
    tr: Option<String>,
    /// Particle-hole unitary `U` with `C = U K`.
    #[arg(long)]
    ph: Option<String>,
    #[arg(long)]
    wquad: Option<usize>,
    #[arg(long)]
    kgrid: Option<usize>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated parameter samples.
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<String>,
    /// Parameter range `lo,hi`.
    #[arg(long = "m-range", allow_hyphen_values = true)]
    m_range: Option<String>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Opts {
    fn merged(mut self, fallback: &Opts) -> Opts {
        merge_fields!(self, fallback; model, spec, m, t1, t2, eps, n_occ, grid, json, csv, chiral, tr, ph,
            wquad, kgrid, width, seeds, samples, m_range, label, dim);
        self
    }
}

#[derive(Debug, Parser)]
#[command(no_binary_name = true)]
struct ConfigFile {
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    opts: Opts,
}

fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    let mut tokens = Vec::new();
    let mut seen = BTreeSet::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected key=value", path.display(), no + 1)))?;
        let key = key.trim().replace('_', "-");
        if !seen.insert(key.clone()) {
            return Err(Error::Usage(format!("duplicate config key `{key}`")));
        }
        tokens.push(format!("--{key}={}", value.trim()));
    }
    ConfigFile::try_parse_from(tokens).map_err(|e| Error::Usage(format!("config {}: {}", path.display(), first_line(&e.to_string()))))
}

fn first_line(s: &str) -> String {
    s.lines().next().unwrap_or("").trim_start_matches("error: ").to_string()
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", Error::Usage(first_line(&e.to_string())));
            return 2;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            if e.is_precondition() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => Some(load_config(p)?),
        None => None,
    };
    let threads = cli.threads.or(config.as_ref().and_then(|c| c.threads));
    let fallback = config.map(|c| c.opts).unwrap_or_default();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Usage("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command, &fallback))
}

fn dispatch(command: Command, fallback: &Opts) -> Result<()> {
    let m = |o: Opts| o.merged(fallback);
    match command {
        Command::Invariant { kind } => match kind {
            InvariantKind::Chern(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                emit_tagged(&chern_number_2d(&model, positive(o.grid, 24, "grid")?)?, &model, &o)
            }
            InvariantKind::Chern2(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                emit_tagged(&second_chern_4d(&model, positive(o.grid, 12, "grid")?)?, &model, &o)
            }
            InvariantKind::Winding(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let s = candidate(&o.chiral, "pauli_z", SymmetryKind::Chiral, model.n_orb)?;
                let r = match model.dim {
                    1 => winding_number_1d(&model, &s, positive(o.grid, 100, "grid")?)?,
                    3 => winding_number_3d(&model, &s, positive(o.grid, 20, "grid")?)?,
                    d => {
                        return Err(Error::DimensionMismatch { expected: 1, got: d });
                    }
                };
                emit_tagged(&r, &model, &o)
            }
            InvariantKind::Z2(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let t = candidate(&o.tr, "kramers", SymmetryKind::TimeReversal, model.n_orb)?;
                emit_tagged(&z2_index_2d(&model, &t, positive(o.grid, 16, "grid")?)?, &model, &o)
            }
            InvariantKind::Z23d(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let t = candidate(&o.tr, "kramers", SymmetryKind::TimeReversal, model.n_orb)?;
                emit_tagged(&z2_strong_3d(&model, &t, positive(o.grid, 16, "grid")?)?, &model, &o)
            }
            InvariantKind::Gauss(o) => {
                let o = m(o);
                let spec = spec_from(&o)?;
                let model = d_vector_model(&spec)?;
                let r = gauss_degree(&model, positive(o.grid, 24, "grid")?)?;
                emit(&Tagged { result: &r, model: &spec.name, params: &spec.params }, &o, None)
            }
            InvariantKind::N3(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let g = g0_from_model(&model)?;
                let kgrid = positive(o.kgrid.or(o.grid), DEFAULT_KGRID, "kgrid")?;
                let wquad = positive(o.wquad, DEFAULT_WQUAD, "wquad")?;
                emit_tagged(&n3_invariant(&g, kgrid, wquad)?, &model, &o)
            }
            InvariantKind::Heff(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let g = g0_from_model(&model)?;
                let kgrid = positive(o.kgrid.or(o.grid), DEFAULT_KGRID, "kgrid")?;
                emit_tagged(&heff_invariant(&g, kgrid)?, &model, &o)
            }
        },
        Command::Classify { kind } => match kind {
            ClassifyKind::Entry(o) => {
                let o = m(o);
                let (label, d) = label_dim(&o)?;
                let r = json!({
                    "label": label.name(),
                    "dim": d,
                    "group": table_entry(label, d).to_string(),
                    "even": is_even_entry(label, d),
                });
                emit(&r, &o, None)
            }
            ClassifyKind::Torus(o) => {
                let o = m(o);
                let (label, d) = label_dim(&o)?;
                let t = ko_torus(label, d)?;
                let r = json!({
                    "label": label.name(),
                    "dim": d,
                    "band_and_weak": t.band_and_weak.to_string(),
                    "strong": t.strong.to_string(),
                });
                emit(&r, &o, None)
            }
            ClassifyKind::Table(o) => {
                let o = m(o);
                let rows = generate_periodic_table(o.dim.unwrap_or(8));
                let text = render_table(&rows);
                emit(&rows, &o, Some(text))
            }
        },
        Command::Symmetry {
            kind: SymmetryCmd::Check(o),
        } => {
            let o = m(o);
            let model = model_from(&o)?;
            let grid = positive(o.grid, crate::symmetry::DEFAULT_GRID, "grid")?;
            let mut found = Vec::new();
            for (flag, kind) in [
                (&o.tr, SymmetryKind::TimeReversal),
                (&o.ph, SymmetryKind::ParticleHole),
                (&o.chiral, SymmetryKind::Chiral),
            ] {
                if let Some(name) = flag {
                    let cand = SymmetryCandidate::new(kind, preset_unitary(name, model.n_orb)?)?;
                    found.push(detect(&model, cand, grid)?);
                }
            }
            let checks: Vec<_> = found
                .iter()
                .map(|d| {
                    json!({
                        "kind": d.candidate.kind.to_string(),
                        "holds": d.check.holds,
                        "square": d.check.square,
                        "max_violation": d.check.max_violation,
                    })
                })
                .collect();
            let class = az_class(&model, &found, grid)?;
            emit(&json!({ "checks": checks, "class": class }), &o, None)
        }
        Command::Edge { kind } => match kind {
            EdgeKind::Spectrum(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let s = ribbon_spectrum(&model, positive(o.width, 30, "width")?, positive(o.kgrid, DEFAULT_K_GRID, "kgrid")?)?;
                let text = s.csv()?;
                emit(&s, &o, Some(text))
            }
            EdgeKind::Count(o) => {
                let o = m(o);
                let model = model_from(&o)?;
                let c = edge_mode_count(&model, positive(o.width, 30, "width")?, positive(o.kgrid, DEFAULT_K_GRID, "kgrid")?)?;
                emit(&c, &o, None)
            }
        },
        Command::PhaseDiagram(o) => {
            let o = m(o);
            let family = family_from(&o)?;
            let samples = parse_list(o.samples.as_deref().ok_or_else(|| Error::Usage("--samples is required".into()))?)?;
            let d = phase_diagram(&family, &samples, positive(o.grid, 24, "grid")?, positive(o.seeds, SEEDS_PER_AXIS, "seeds")?)?;
            emit(&d, &o, None)
        }
        Command::CriticalPoints(o) => {
            let o = m(o);
            let family = family_from(&o)?;
            let range = parse_list(o.m_range.as_deref().unwrap_or("-3,3"))?;
            if range.len() != 2 || range[0] >= range[1] {
                return Err(Error::Usage("--m-range expects `lo,hi` with lo < hi".into()));
            }
            let pts = critical_points(&family, (range[0], range[1]), positive(o.seeds, SEEDS_PER_AXIS, "seeds")?);
            emit(&pts, &o, None)
        }
    }
}

fn positive(v: Option<usize>, default: usize, name: &str) -> Result<usize> {
    match v.unwrap_or(default) {
        0 => Err(Error::Usage(format!("--{name} must be positive"))),
        n => Ok(n),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
        })
        .collect()
}

fn spec_from(o: &Opts) -> Result<ModelSpec> {
    let mut spec = match (&o.spec, &o.model) {
        (Some(s), None) => s.parse::<ModelSpec>()?,
        (None, Some(name)) => ModelSpec::new(name),
        (Some(_), Some(_)) => return Err(Error::Usage("--spec and --model are exclusive".into())),
        (None, None) => return Err(Error::Usage("--model or --spec is required".into())),
    };
    for (key, value) in [("m", o.m), ("t1", o.t1), ("t2", o.t2), ("eps", o.eps)] {
        if let Some(v) = value {
            spec.params.insert(key.to_string(), v);
        }
    }
    if o.n_occ.is_some() {
        spec.n_occ = o.n_occ;
    }
    Ok(spec)
}

fn model_from(o: &Opts) -> Result<BlochModel> {
    build_model(&spec_from(o)?)
}

fn family_from(o: &Opts) -> Result<DVectorFamily> {
    let name = o
        .model
        .as_deref()
        .ok_or_else(|| Error::Usage("--model is required".into()))?;
    DVectorFamily::named(name)
}

fn candidate(flag: &Option<String>, default: &str, kind: SymmetryKind, n: usize) -> Result<SymmetryCandidate> {
    let name = flag.as_deref().unwrap_or(default);
    SymmetryCandidate::new(kind, preset_unitary(name, n)?)
}

fn label_dim(o: &Opts) -> Result<(CartanLabel, usize)> {
    let label = o
        .label
        .as_deref()
        .ok_or_else(|| Error::Usage("--label is required".into()))?
        .parse::<CartanLabel>()?;
    let d = o.dim.ok_or_else(|| Error::Usage("--dim is required".into()))?;
    Ok((label, d))
}

/// A result together with the model it was computed for.
#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    #[serde(flatten)]
    result: &'a T,
    model: &'a str,
    params: &'a BTreeMap<String, f64>,
}

impl<T: Record> Record for Tagged<'_, T> {
    fn csv(&self) -> Result<String> {
        self.result.csv()
    }
}

fn emit_tagged<T: Record>(result: &T, model: &BlochModel, o: &Opts) -> Result<()> {
    let tagged = Tagged {
        result,
        model: &model.name,
        params: &model.params,
    };
    emit(&tagged, o, None)
}

/// Writes the requested files; prints `text` (or the JSON form) to stdout
/// when no output file was requested.
fn emit<T: Record + Serialize + ?Sized>(value: &T, o: &Opts, text: Option<String>) -> Result<()> {
    let serialized = [(o.json.as_ref(), Format::Json), (o.csv.as_ref(), Format::Csv)]
        .into_iter()
        .filter_map(|(p, f)| p.map(|p| (p, f)))
        .map(|(p, f)| Ok((p, io::serialize(value, f)?)))
        .collect::<Result<Vec<_>>>()?;
    for (path, body) in &serialized {
        io::write_atomic(path, body)?;
    }
    if serialized.is_empty() {
        match text {
            Some(t) => print!("{t}"),
            None => print!("{}", io::to_json(value)?),
        }
    }
    Ok(())
}
