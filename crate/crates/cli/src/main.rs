//! `maskprop` command-line driver.
//!
//! Exit codes: 0 success, 1 data or validation error, 2 usage error.

mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maskprop::compare::{compare, EvalScene};
use maskprop::eval::{compute_increment, compute_stats};
use maskprop::io::{read_config, read_labels, read_manifest, write_labels, FormatError};
use maskprop::synth::{generate_batch, write_batch, SceneSpec};
use maskprop::{enhance_scene, EnhancementConfig, Method, Scene};

#[derive(Parser)]
#[command(name = "maskprop", version = maskprop::VERSION, about = "Mask-guided pseudo-label densification for lidar point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gapp,
    Dp,
}

#[derive(Subcommand)]
enum Command {
    /// Densify the labels of one scene.
    Enhance {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        calib: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the method in the config.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Per-mask report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Name printed in the summary line; defaults to the directory that
        /// holds the points file.
        #[arg(long)]
        scene_id: Option<String>,
    },
    /// Score predicted labels against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        /// Labels before enhancement, for the increment of correct labels.
        #[arg(long)]
        before: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Comma-separated class names for the table.
        #[arg(long, value_delimiter = ',')]
        class_names: Vec<String>,
    },
    /// Write synthetic scenes and a manifest.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        n_scenes: usize,
        /// Seed of the first scene; defaults to the spec's `rng_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the seed labels with DP without MF, DP with MF and MF + GAPP.
    Compare {
        /// Manifest listing the scenes.
        #[arg(long)]
        scenes: PathBuf,
        /// Confirms that every scene lists a ground-truth file.
        #[arg(long)]
        gt_available: bool,
        #[arg(long)]
        json: bool,
        /// Shared thresholds for the three variants.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        class_names: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Data(e.to_string())
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Enhance {
            points,
            labels,
            masks,
            calib,
            out,
            config,
            method,
            report,
            scene_id,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(m) = method {
                cfg.method = match m {
                    MethodArg::Gapp => Method::Gapp,
                    MethodArg::Dp => Method::Dp,
                };
            }
            let scene = Scene::new(
                maskprop::io::read_points(&points)?,
                read_labels(&labels)?,
                maskprop::io::read_masks(&masks)?,
                maskprop::io::read_calibration(&calib)?,
            )
            .map_err(|e| data(format!("{}: {e}", labels.display())))?;
            let (enhanced, rep) = enhance_scene(&scene, &cfg).map_err(data)?;
            write_labels(&out, &enhanced)?;
            if let Some(path) = report {
                write_json(&path, &rep)?;
            }
            let id = scene_id.unwrap_or_else(|| default_scene_id(&points));
            println!(
                "{id}: labels {} -> {}, masks assigned {}, ignored {}",
                rep.labels_before, rep.labels_after, rep.masks_assigned, rep.masks_ignored
            );
            Ok(())
        }
        Command::Eval {
            pred,
            gt,
            before,
            json,
            class_names,
        } => {
            let pred_labels = read_labels(&pred)?;
            let gt_labels = read_labels(&gt)?;
            let stats = compute_stats(&pred_labels, &gt_labels)
                .map_err(|e| data(format!("{}: {e}", pred.display())))?;
            let increment = match before {
                None => None,
                Some(path) => {
                    let b = compute_stats(&read_labels(&path)?, &gt_labels)
                        .map_err(|e| data(format!("{}: {e}", path.display())))?;
                    Some(compute_increment(&b, &stats).map_err(data)?)
                }
            };
            let names = table::class_names(&class_names, stats.per_class.len());
            if json {
                println!("{}", table::eval_json(&names, &stats, increment));
            } else {
                print!("{}", table::eval_text(&names, &stats, increment));
            }
            Ok(())
        }
        Command::Synth {
            spec,
            out_dir,
            n_scenes,
            seed,
        } => {
            let text =
                std::fs::read(&spec).map_err(|e| data(format!("{}: {e}", spec.display())))?;
            let spec_doc: SceneSpec = serde_json::from_slice(&text)
                .map_err(|e| data(format!("{}: {e}", spec.display())))?;
            let first = seed.unwrap_or(spec_doc.rng_seed);
            let scenes = generate_batch(&spec_doc, n_scenes, first)
                .map_err(|e| data(format!("{}: {e}", spec.display())))?;
            let manifest = write_batch(&out_dir, &scenes)?;
            println!(
                "wrote {} scene(s) to {}",
                manifest.scenes.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Compare {
            scenes,
            gt_available,
            json,
            config,
            class_names,
        } => {
            if !gt_available {
                return Err(Failure::Usage(
                    "compare needs ground truth; pass --gt-available once every scene lists a `gt` file"
                        .into(),
                ));
            }
            let cfg = load_config(config.as_deref())?;
            let manifest = read_manifest(&scenes)?;
            let base = scenes.parent().unwrap_or(Path::new("."));
            let mut loaded = Vec::with_capacity(manifest.scenes.len());
            for entry in &manifest.scenes {
                if entry.gt.is_none() {
                    return Err(data(format!(
                        "{}: scene {} has no ground truth",
                        scenes.display(),
                        entry.scene_id
                    )));
                }
                let s = entry.load(base)?;
                loaded.push(EvalScene {
                    scene_id: s.scene_id,
                    scene: s.scene,
                    gt: s.gt.expect("checked above"),
                });
            }
            let comparison = with_thread_cap(|| compare(&loaded, &cfg))
                .map_err(data)?
                .map_err(data)?;
            let classes = comparison
                .rows
                .first()
                .map_or(0, |r| r.stats.per_class.len());
            let names = table::class_names(&class_names, classes);
            if json {
                println!("{}", table::compare_json(&names, &comparison));
            } else {
                print!("{}", table::compare_text(&names, &comparison));
            }
            Ok(())
        }
    }
}

fn default_scene_id(points: &Path) -> String {
    let dir = points.parent().and_then(Path::file_name);
    let name = dir.or_else(|| points.file_stem()).unwrap_or_default();
    name.to_string_lossy().into_owned()
}

fn load_config(path: Option<&Path>) -> Result<EnhancementConfig, Failure> {
    match path {
        None => Ok(EnhancementConfig::default()),
        Some(p) => Ok(read_config(p)?),
    }
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(data)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Runs `f` on a pool capped by `PLE_THREADS` when it is set.
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, String> {
    match std::env::var("PLE_THREADS") {
        Err(_) => Ok(f()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("PLE_THREADS={v:?} is not a positive integer"))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| e.to_string())?;
            Ok(pool.install(f))
        }
    }
}
