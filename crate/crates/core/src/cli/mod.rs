//! The `asylat` command line.
//!
//! ```text
//! asylat generate --config job.json --out lattice.json [--truth truth.json] [--seed S]
//! asylat label lattice.json --out labelling.json [--anchor X,Y] [--density-ratio R] [--index kd|grid-bucket]
//! asylat recover lattice.json labelling.json --out report.json [--degree D] [--jet-order J] [--origin per-slice|fixed] [--reference truth.json]
//! asylat verify labelling.json truth.json
//! asylat plot lattice.json [labelling.json] --out plot.svg [--slice I]
//! asylat export lattice.json [--labelling labelling.json] --out points.csv
//! ```
//!
//! Exit codes: 0 success, 1 verification found non-equivalent slices,
//! 2 input or schema error, 3 labelling failure, 4 recovery failure.

pub mod config;
pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::equivalence::Witness;
use crate::error::Error;
use crate::geometry::Point;
use crate::labelling::{label_sequence, LabellingConfig, SequenceConfig};
use crate::lattice::{AsymptoticLattice, LinearLabelling};
use crate::recovery::{fit_chart, rotation_number_in_basis, FitOptions, OriginMode, RecoveryReport, RotationEstimate};
use crate::spatial::IndexKind;
use crate::synth::{generate, GroundTruth};

use self::config::JobConfig;
use self::io::{read_json, write_json, write_points_csv, write_text, FileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_EQUIVALENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LABELLING: i32 = 3;
pub const EXIT_RECOVERY: i32 = 4;

/// Tolerance for matching labelled points against ground-truth points.
const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "asylat", version, about = "Asymptotic lattices: generate, label, recover, verify, plot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IndexArg {
    Kd,
    GridBucket,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OriginArg {
    PerSlice,
    Fixed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a lattice and its ground truth from a job config.
    Generate {
        #[arg(long)]
        config: PathBuf,
        /// Lattice file to write.
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth file; defaults to `<out stem>.truth.json`.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Override the noise seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Label every slice and correct the labels across slices.
    Label {
        lattice: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_point)]
        anchor: Option<Point>,
        #[arg(long)]
        density_ratio: Option<f64>,
        #[arg(long, value_enum, default_value = "kd")]
        index: IndexArg,
        #[arg(long)]
        max_rows: Option<u32>,
        #[arg(long)]
        max_cols: Option<u32>,
        #[arg(long)]
        coherence_tol: Option<f64>,
    },
    /// Fit the chart jet of a labelled lattice.
    Recover {
        lattice: PathBuf,
        labelling: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 1)]
        jet_order: usize,
        #[arg(long, value_enum, default_value = "per-slice")]
        origin: OriginArg,
        /// Ground truth whose basis the rotation numbers are also expressed in.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Compare a labelling with the ground truth, slice by slice.
    Verify { labelling: PathBuf, truth: PathBuf },
    /// Render one slice as SVG.
    Plot {
        lattice: PathBuf,
        labelling: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Slice index, coarsest first.
        #[arg(long, default_value_t = 0)]
        slice: usize,
    },
    /// Write the points (and labels) as CSV.
    Export {
        lattice: PathBuf,
        #[arg(long)]
        labelling: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    let p = Point::new(parse(x)?, parse(y)?);
    if !p.is_finite() {
        return Err(format!("'{s}' is not a finite point"));
    }
    Ok(p)
}

/// A failed command: message and exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: e.to_string(),
        }
    }
}

fn input(e: Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        msg: e.to_string(),
    }
}

fn labelling_failure(e: Error) -> Failure {
    let code = match e {
        Error::SequenceBreak { .. } | Error::InsufficientData(_) => EXIT_LABELLING,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        msg: e.to_string(),
    }
}

fn recovery_failure(e: Error) -> Failure {
    let code = match e {
        Error::Underdetermined { .. } | Error::InsufficientData(_) | Error::Pole { .. } => EXIT_RECOVERY,
        _ => EXIT_INPUT,
    };
    Failure {
        code,
        msg: e.to_string(),
    }
}

/// Run the command line with explicit arguments (the first is the program
/// name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Generate {
            config,
            out: path,
            truth,
            seed,
        } => cmd_generate(&config, &path, truth, seed, out),
        Command::Label {
            lattice,
            out: path,
            anchor,
            density_ratio,
            index,
            max_rows,
            max_cols,
            coherence_tol,
        } => {
            let cfg = LabellingConfig {
                anchor,
                max_rows,
                max_cols,
                neighbor_index: match index {
                    IndexArg::Kd => IndexKind::Kd,
                    IndexArg::GridBucket => IndexKind::GridBucket,
                },
                ..LabellingConfig::default()
            };
            let mut scfg = SequenceConfig::default();
            if let Some(r) = density_ratio {
                scfg.density_ratio = r;
            }
            if let Some(t) = coherence_tol {
                scfg.coherence_tol = t;
            }
            cmd_label(&lattice, &path, &cfg, &scfg, out)
        }
        Command::Recover {
            lattice,
            labelling,
            out: path,
            degree,
            jet_order,
            origin,
            reference,
        } => {
            let opts = FitOptions::new(
                degree,
                jet_order,
                match origin {
                    OriginArg::PerSlice => OriginMode::PerSlice,
                    OriginArg::Fixed => OriginMode::Fixed,
                },
            );
            cmd_recover(&lattice, &labelling, &path, &opts, reference.as_deref(), out)
        }
        Command::Verify { labelling, truth } => cmd_verify(&labelling, &truth, out),
        Command::Plot {
            lattice,
            labelling,
            out: path,
            slice,
        } => cmd_plot(&lattice, labelling.as_deref(), &path, slice, out),
        Command::Export {
            lattice,
            labelling,
            out: path,
        } => {
            let lat: AsymptoticLattice = read_json(&lattice)?;
            let lab: Option<LinearLabelling> = labelling.as_deref().map(read_json).transpose()?;
            if let Some(l) = &lab {
                l.check_against(&lat).map_err(input)?;
            }
            write_points_csv(&path, &lat, lab.as_ref())?;
            Ok(EXIT_OK)
        }
    }
}

fn default_truth_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.truth.json"))
}

fn cmd_generate(config: &Path, path: &Path, truth: Option<PathBuf>, seed: Option<u64>, out: &mut dyn Write) -> Result<i32, Failure> {
    let job: JobConfig = read_json(config)?;
    let chart = job.chart.build().map_err(input)?;
    let mut noise = job.noise.unwrap_or_else(crate::synth::NoiseModel::none);
    if let Some(s) = seed {
        noise = noise.with_seed(s);
    }
    let (lattice, gt) = generate(&chart, &job.region, &job.hbars, &noise).map_err(input)?;
    let truth = truth.unwrap_or_else(|| default_truth_path(path));
    write_json(path, &lattice)?;
    write_json(&truth, &gt)?;
    for s in gt.slices() {
        let _ = writeln!(out, "hbar {}: {} points, {} dropped", s.hbar, s.points.len(), s.dropped.len());
    }
    let _ = writeln!(out, "wrote {} and {}", path.display(), truth.display());
    Ok(EXIT_OK)
}

fn cmd_label(
    lattice: &Path,
    path: &Path,
    cfg: &LabellingConfig,
    scfg: &SequenceConfig,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let lat: AsymptoticLattice = read_json(lattice)?;
    let outcome = label_sequence(&lat, cfg, scfg).map_err(labelling_failure)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for (j, (map, stats)) in outcome.labelling.maps().iter().zip(&outcome.stats).enumerate() {
        let _ = write!(
            out,
            "hbar {}: {} labelled of {} in B0",
            map.hbar(),
            stats.labelled,
            stats.candidates
        );
        match j.checked_sub(1).map(|i| &outcome.links[i]) {
            Some(link) => {
                let _ = writeln!(
                    out,
                    ", witness M={} t={} (deviation {:.3e})",
                    link.witness.m, link.witness.t, link.deviation
                );
            }
            None => {
                let _ = writeln!(out);
            }
        }
    }
    write_json(path, &outcome.labelling)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct RecoverOutput<'a> {
    #[serde(flatten)]
    report: &'a RecoveryReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceBasis>,
}

/// Rotation numbers re-expressed in the basis of a ground-truth labelling.
#[derive(Serialize)]
struct ReferenceBasis {
    /// Witness taking ground-truth labels of the coarsest slice to the fitted labels.
    witness: Witness,
    rotation: Vec<RotationEstimate>,
}

fn cmd_recover(
    lattice: &Path,
    labelling: &Path,
    path: &Path,
    opts: &FitOptions,
    reference: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let lat: AsymptoticLattice = read_json(lattice)?;
    let lab: LinearLabelling = read_json(labelling)?;
    lab.check_against(&lat).map_err(input)?;
    let report = fit_chart(&lab, &lat, opts).map_err(recovery_failure)?;
    let reference = match reference {
        Some(p) => {
            let gt: GroundTruth = read_json(p)?;
            let eq = gt.verify_map(&lab.maps()[0], VERIFY_TOL).map_err(input)?;
            let witness = eq.witness.ok_or_else(|| Failure {
                code: EXIT_RECOVERY,
                msg: format!("coarsest slice is not equivalent to the reference labels in {}", p.display()),
            })?;
            let rotation = report
                .rotation
                .iter()
                .map(|r| rotation_number_in_basis(&report, r.point, witness.m))
                .filter_map(Result::ok)
                .collect();
            Some(ReferenceBasis { witness, rotation })
        }
        None => None,
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for r in &report.residuals {
        let _ = writeln!(out, "hbar {}: {} points, max residual {:.3e}, rms {:.3e}", r.hbar, r.points, r.max, r.rms);
    }
    write_json(
        path,
        &RecoverOutput {
            report: &report,
            reference,
        },
    )?;
    Ok(EXIT_OK)
}

fn cmd_verify(labelling: &Path, truth: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let lab: LinearLabelling = read_json(labelling)?;
    let gt: GroundTruth = read_json(truth)?;
    let mut all = true;
    for map in lab.maps() {
        let verdict = match gt.verify_map(map, VERIFY_TOL) {
            Ok(eq) => match (eq.witness, eq.reflected) {
                (Some(w), _) => format!("equivalent, witness M={} t={}", w.m, w.t),
                (None, Some(r)) => {
                    all = false;
                    format!("NOT equivalent (orientation-reversing match M={} t={})", r.m, r.t)
                }
                (None, None) => {
                    all = false;
                    "NOT equivalent".to_string()
                }
            },
            Err(Error::InvalidLabelMap(m)) => return Err(input(Error::InvalidLabelMap(m))),
            Err(e) => {
                all = false;
                format!("NOT equivalent ({e})")
            }
        };
        let _ = writeln!(out, "hbar {}: {} points, {verdict}", map.hbar(), map.len());
    }
    Ok(if all { EXIT_OK } else { EXIT_NOT_EQUIVALENT })
}

fn cmd_plot(lattice: &Path, labelling: Option<&Path>, path: &Path, slice: usize, out: &mut dyn Write) -> Result<i32, Failure> {
    let lat: AsymptoticLattice = read_json(lattice)?;
    let sample = lat.samples().get(slice).ok_or_else(|| Failure {
        code: EXIT_INPUT,
        msg: format!("slice {slice} out of range ({} slices)", lat.samples().len()),
    })?;
    let lab: Option<LinearLabelling> = labelling.map(read_json).transpose()?;
    let map = match &lab {
        Some(l) => Some(l.maps().iter().find(|m| m.hbar() == sample.hbar()).ok_or_else(|| Failure {
            code: EXIT_INPUT,
            msg: format!("labelling has no slice at hbar {}", sample.hbar()),
        })?),
        None => None,
    };
    write_text(path, &svg::render(lat.region(), sample, map))?;
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}
