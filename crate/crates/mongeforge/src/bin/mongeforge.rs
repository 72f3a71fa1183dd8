use clap::{Parser, Subcommand};
use mongeforge::analyze::{classify, verify_scene, VerifyConfig};
use mongeforge::grid::{infer_structure, max_grid_residual, InferConfig};
use mongeforge::shell::{
    emit_scene, export, grid_from_csv, grid_to_csv, parse_scene, sample_grid, ExportConfig,
    ExportFormat,
};
use mongeforge::{exec::Mode, ShellError};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mongeforge",
    version,
    about = "exact piecewise solutions of the degenerate Monge-Ampere equation: build, verify, classify, export"
)]
struct Cli {
    /// suppress progress output
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scene from a builder document and write it out
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a scene: residual, gluing, rulings, gradient bounds
    Verify {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// residual tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Classify a verified scene or a sampled grid
    Classify {
        #[arg(long, conflicts_with = "grid")]
        scene: Option<PathBuf>,
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Sample a scene on a uniform grid and write x,y,u CSV
    Sample {
        #[arg(long)]
        scene: PathBuf,
        /// xmin,xmax,ymin,ymax
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        bbox: Vec<f64>,
        /// NX,NY
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export a scene as an OBJ mesh, SVG ruling figure, or CSV grid
    Export {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: PathBuf,
        /// xmin,xmax,ymin,ymax
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, 2.0, -2.0, 2.0])]
        bbox: Vec<f64>,
        /// NX,NY
        #[arg(long, value_delimiter = ',', default_values_t = [129usize, 129usize])]
        n: Vec<usize>,
        /// clip radius around singularities (OBJ)
        #[arg(long, default_value_t = 0.0)]
        clip: f64,
    },
}

fn exec_mode() -> Mode {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("MONGEFORGE_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            if k <= 1 {
                return Mode::Sequential;
            }
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
    Mode::default()
}

fn read(path: &PathBuf) -> Result<String, ShellError> {
    Ok(std::fs::read_to_string(path)?)
}

fn write_out(path: Option<&PathBuf>, content: &str) -> Result<(), ShellError> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn shell_exit(e: &ShellError) -> u8 {
    match e {
        ShellError::Parse(_) | ShellError::Io(_) => EXIT_PARSE,
        _ => EXIT_VALIDATION,
    }
}

fn check_dims(bbox: &[f64], n: &[usize]) -> Result<(), (u8, String)> {
    if bbox.len() != 4 {
        return Err((EXIT_PARSE, "--bbox takes xmin,xmax,ymin,ymax".into()));
    }
    if n.len() != 2 {
        return Err((EXIT_PARSE, "--n takes NX,NY".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, (u8, String)> {
    let mode = exec_mode();
    let fail = |e: ShellError| (shell_exit(&e), e.to_string());
    match cli.command {
        Command::Build { spec, out } => {
            let text = read(&spec).map_err(fail)?;
            let scene = parse_scene(&text).map_err(fail)?;
            write_out(out.as_ref(), &emit_scene(&scene)).map_err(fail)?;
            if !cli.quiet {
                eprintln!(
                    "built scene: {} pieces, {} interfaces, {} singularities",
                    scene.pieces.len(),
                    scene.interfaces.len(),
                    scene.singularities.len()
                );
            }
            Ok(0)
        }
        Command::Verify {
            scene,
            samples,
            seed,
            tol,
        } => {
            let text = read(&scene).map_err(fail)?;
            let scene = parse_scene(&text).map_err(fail)?;
            let cfg = VerifyConfig {
                samples,
                seed,
                tol_residual: tol,
                mode,
                ..VerifyConfig::default()
            };
            let report = verify_scene(&scene, &cfg);
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if report.pass { 0 } else { EXIT_VERIFICATION })
        }
        Command::Classify { scene, grid } => match (scene, grid) {
            (Some(path), None) => {
                let text = read(&path).map_err(fail)?;
                let scene = parse_scene(&text).map_err(fail)?;
                let cfg = VerifyConfig {
                    mode,
                    ..VerifyConfig::default()
                };
                let report = verify_scene(&scene, &cfg);
                match classify(&scene, &report) {
                    Ok(c) => {
                        println!("{}", serde_json::to_string_pretty(&c).unwrap());
                        Ok(0)
                    }
                    Err(e) => Err((EXIT_VERIFICATION, e.to_string())),
                }
            }
            (None, Some(path)) => {
                let text = read(&path).map_err(fail)?;
                let grid = grid_from_csv(&text).map_err(fail)?;
                let cfg = InferConfig {
                    mode,
                    ..InferConfig::default()
                };
                match infer_structure(&grid, &cfg) {
                    Ok(rep) => {
                        if !cli.quiet {
                            eprintln!("max grid residual {:.3e}", max_grid_residual(&grid, mode));
                        }
                        println!("{}", serde_json::to_string_pretty(&rep).unwrap());
                        Ok(0)
                    }
                    Err(e) => Err((EXIT_VERIFICATION, e.to_string())),
                }
            }
            _ => Err((EXIT_PARSE, "pass exactly one of --scene or --grid".into())),
        },
        Command::Sample {
            scene,
            bbox,
            n,
            out,
        } => {
            check_dims(&bbox, &n)?;
            let text = read(&scene).map_err(fail)?;
            let scene = parse_scene(&text).map_err(fail)?;
            let grid = sample_grid(
                &scene,
                (bbox[0], bbox[1], bbox[2], bbox[3]),
                n[0],
                n[1],
                mode,
            )
            .map_err(fail)?;
            write_out(Some(&out), &grid_to_csv(&grid)).map_err(fail)?;
            Ok(0)
        }
        Command::Export {
            scene,
            format,
            out,
            bbox,
            n,
            clip,
        } => {
            check_dims(&bbox, &n)?;
            let text = read(&scene).map_err(fail)?;
            let scene = parse_scene(&text).map_err(fail)?;
            let format: ExportFormat = format.parse().map_err(fail)?;
            let cfg = ExportConfig {
                format,
                bbox: (bbox[0], bbox[1], bbox[2], bbox[3]),
                nx: n[0],
                ny: n[1],
                clip,
                mode,
            };
            let body = export(&scene, &cfg).map_err(fail)?;
            write_out(Some(&out), &body).map_err(fail)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
