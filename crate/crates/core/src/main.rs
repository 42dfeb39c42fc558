use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use regcor::compositor::{oracle_composite, BlendMode};
use regcor::dataset::{load_triplet_dir, write_frame, write_mask, write_rgb8};
use regcor::harness::{
    aggregate, evaluate_dataset, load_sequence, render_preview, render_table, rows_from_csv,
    EvalOptions, FlickerReport, PreviewKind, RunConfig,
};
use regcor::maskops::{build_region_masks, ElementShape, Region};
use regcor::metrics::{
    ColorMode, ExecutableBackend, PerceptualBackend, SidecarBackend, PERCEPTUAL_SIDECAR,
};
use regcor::synth::{flicker_sequence, write_synthetic_dataset, SceneParams};
use regcor::taxonomy::{load_taxonomy, ClassTaxonomy};
use regcor::{dataset, Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "regcor",
    version,
    about = "Region-masked evaluation of corrected AR frames"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration ([masks], [metrics], [composite], [taxonomy]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Standalone taxonomy file; overrides the config's [taxonomy].
    #[arg(long, global = true)]
    taxonomy: Option<PathBuf>,

    /// Masked-SSIM inclusion threshold in (0, 1].
    #[arg(long, global = true)]
    tau: Option<f64>,

    #[arg(long, global = true)]
    window_sigma: Option<f64>,

    #[arg(long, global = true, value_enum)]
    color_mode: Option<ColorMode>,

    /// Buffer dilation radius in pixels.
    #[arg(long, global = true)]
    radius: Option<u32>,

    #[arg(long, global = true)]
    downsample_factor: Option<u32>,

    #[arg(long, global = true, value_enum)]
    element: Option<ElementShape>,

    #[arg(long, global = true, value_enum)]
    blend: Option<BlendMode>,

    /// Abort on the first failing sample (exit code 3).
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write critical, buffer and augmentation masks for one sample.
    Masks { sample_dir: PathBuf },
    /// Write the oracle composite for one sample.
    Composite {
        sample_dir: PathBuf,
        /// Also write real | aug | composite side by side.
        #[arg(long)]
        panel: bool,
    },
    /// Score every sample of a dataset and write report.json, report.csv, table.txt.
    Evaluate {
        dataset_root: PathBuf,
        /// Perceptual metric executable invoked as `<exe> <pathA> <pathB>`.
        #[arg(long, conflicts_with = "perceptual_json")]
        perceptual_exe: Option<PathBuf>,
        /// Precomputed distances keyed by `<sample_id>/<comparison>`. Defaults to
        /// `<dataset_root>/perceptual.json` when that file exists.
        #[arg(long)]
        perceptual_json: Option<PathBuf>,
    },
    /// Per-transition flicker over a sequence of `frame_NNNN` sample dirs.
    Flicker { sequence_dir: PathBuf },
    /// Render overlay, latent-mask or panel previews for one sample.
    Preview {
        sample_dir: PathBuf,
        #[arg(long, value_enum, default_value = "overlay")]
        kind: PreviewKind,
    },
    /// Recompute aggregates and the summary table from a report.csv.
    Report { report_csv: PathBuf },
    /// Generate a procedural dataset (or a buffer-flicker sequence).
    Synth {
        out_root: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 576)]
        width: usize,
        #[arg(long, default_value_t = 320)]
        height: usize,
        /// Write a sequence of this many frames instead of independent samples.
        #[arg(long)]
        sequence: Option<usize>,
    },
}

struct Settings {
    run: RunConfig,
    taxonomy: ClassTaxonomy,
}

fn settings(common: &CommonArgs) -> Result<Settings> {
    let mut run = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.tau {
        run.metrics.tau = v;
    }
    if let Some(v) = common.window_sigma {
        run.metrics.window_sigma = v;
    }
    if let Some(v) = common.color_mode {
        run.metrics.color_mode = v;
    }
    if let Some(v) = common.radius {
        run.masks.radius = v;
    }
    if let Some(v) = common.downsample_factor {
        run.masks.downsample_factor = v;
    }
    if let Some(v) = common.element {
        run.masks.element = v;
    }
    if let Some(v) = common.blend {
        run.composite.blend = v;
    }
    run.metrics.validate()?;
    if run.masks.radius == 0 || run.masks.downsample_factor == 0 {
        return Err(Error::Config(
            "radius and downsample factor must be >= 1".into(),
        ));
    }
    let taxonomy = match &common.taxonomy {
        Some(path) => load_taxonomy(path).map_err(|e| match e {
            Error::NotFound(p) => Error::Config(format!("taxonomy {} not found", p.display())),
            other => other,
        })?,
        None => run.taxonomy()?,
    };
    Ok(Settings { run, taxonomy })
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io {
            path: parent.to_path_buf(),
            source: e,
        })?;
    }
    std::fs::write(path, body).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(cli: Cli) -> Result<()> {
    let s = settings(&cli.common)?;
    let out = &cli.common.out;
    match cli.command {
        Command::Masks { sample_dir } => {
            let t = load_triplet_dir(&sample_dir)?;
            let masks = build_region_masks(&t.labels, &s.taxonomy, &s.run.masks)?;
            for (name, region) in [
                ("critical", Region::Critical),
                ("buffer", Region::Buffer),
                ("augmentation", Region::Augmentation),
            ] {
                write_mask(&out.join(format!("{name}.png")), masks.region(region))?;
                write_mask(
                    &out.join(format!("latent_{name}.png")),
                    masks.latent(region),
                )?;
            }
            for (name, img) in render_preview(&t, &masks, PreviewKind::Overlay) {
                write_rgb8(&out.join(name), &img)?;
            }
            println!(
                "critical {} px, buffer {} px, augmentation {} px, ignored {} px",
                masks.critical.count(),
                masks.buffer.count(),
                masks.augmentation.count(),
                masks.ignore.count()
            );
        }
        Command::Composite { sample_dir, panel } => {
            let t = load_triplet_dir(&sample_dir)?;
            let masks = build_region_masks(&t.labels, &s.taxonomy, &s.run.masks)?;
            let composite = oracle_composite(&t.real, &t.augmented, &masks, s.run.composite.blend)?;
            write_frame(&out.join("composite.png"), &composite)?;
            if panel {
                let img = regcor::harness::preview_panel(&[&t.real, &t.augmented, &composite]);
                write_rgb8(&out.join("panel.png"), &img)?;
            }
        }
        Command::Evaluate {
            dataset_root,
            perceptual_exe,
            perceptual_json,
        } => {
            let perceptual: Option<Arc<dyn PerceptualBackend>> =
                match (perceptual_exe, perceptual_json) {
                    (Some(exe), _) => Some(Arc::new(ExecutableBackend::new(exe))),
                    (None, Some(json)) => Some(Arc::new(SidecarBackend::load(&json)?)),
                    (None, None) => {
                        let sidecar = dataset_root.join(PERCEPTUAL_SIDECAR);
                        if sidecar.is_file() {
                            Some(Arc::new(SidecarBackend::load(&sidecar)?))
                        } else {
                            None
                        }
                    }
                };
            let options = EvalOptions {
                masks: s.run.masks,
                jobs: cli.common.jobs,
                strict: cli.common.strict,
                perceptual,
            };
            let report = evaluate_dataset(&dataset_root, &s.taxonomy, &s.run.metrics, &options)?;
            report.write_all(out)?;
            print!("{}", report.to_table());
            for f in &report.failures {
                eprintln!("failed {}: {}", f.sample_id, f.error);
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Flicker { sequence_dir } => {
            let seq = load_sequence(&sequence_dir, &s.taxonomy, &s.run.masks)?;
            let report = FlickerReport::compute(&seq);
            write_text(&out.join("flicker.csv"), &report.to_csv())?;
            let fmt = |v: Option<f64>| v.map_or("n/a".to_owned(), |x| format!("{x:.6}"));
            for (name, series) in [
                ("buffer", &report.buffer),
                ("critical", &report.critical),
                ("augmentation", &report.augmentation),
            ] {
                println!(
                    "{name:<13} mean {} max {}",
                    fmt(series.mean),
                    fmt(series.max)
                );
            }
        }
        Command::Preview { sample_dir, kind } => {
            let t = load_triplet_dir(&sample_dir)?;
            let masks = build_region_masks(&t.labels, &s.taxonomy, &s.run.masks)?;
            for (name, img) in render_preview(&t, &masks, kind) {
                write_rgb8(&out.join(name), &img)?;
            }
        }
        Command::Report { report_csv } => {
            let text = std::fs::read_to_string(&report_csv).map_err(|e| Error::Io {
                path: report_csv.clone(),
                source: e,
            })?;
            let rows = rows_from_csv(&text)?;
            let aggregates = aggregate(&rows);
            let table = render_table(&aggregates, 0);
            write_text(&out.join("table.txt"), &table)?;
            let json = serde_json::to_string_pretty(&aggregates)
                .map_err(|e| Error::Report(e.to_string()))?;
            write_text(&out.join("aggregates.json"), &(json + "\n"))?;
            print!("{table}");
        }
        Command::Synth {
            out_root,
            samples,
            seed,
            width,
            height,
            sequence,
        } => {
            let scene = SceneParams { width, height };
            match sequence {
                Some(frames) => {
                    for (t, triplet) in
                        flicker_sequence(seed, scene, &s.taxonomy, &s.run.masks, frames)?
                            .iter()
                            .enumerate()
                    {
                        dataset::write_triplet(&out_root.join(format!("frame_{t:04}")), triplet)?;
                    }
                }
                None => {
                    write_synthetic_dataset(
                        &out_root,
                        samples,
                        seed,
                        scene,
                        &s.taxonomy,
                        &s.run.masks,
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
