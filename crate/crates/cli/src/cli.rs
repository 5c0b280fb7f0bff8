//! Command-line interface.
//!
//! Exit codes: 0 on success, 2 when the CSV cannot be read or parsed, 64 for
//! usage errors (bad flags, unknown dimensions, impossible layouts) and 74
//! when output cannot be written.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gatherplot_core::json::to_canonical_string;
use gatherplot_core::model::{read_csv, Dataset};
use gatherplot_core::stats::dataset_stats;
use gatherplot_core::transitions::{keyframes, TransitionPlan};
use gatherplot_core::{gatherplot_matrix, render_matrix_svg, render_svg, Canvas, Layout, Theme};

use crate::request::{parse_easing, parse_mode, PlotRequest, RequestErrors};
use crate::service::{compute_layout, dataset_summary, port_from_env, serve};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "gatherplot", version, about = "Gatherplot layouts from CSV data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Print the inferred schema of a CSV file.
    Ingest { csv: PathBuf },
    /// Render one plot to SVG.
    Render {
        csv: PathBuf,
        #[command(flatten)]
        plot: PlotArgs,
        /// Write layout JSON instead of SVG.
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render the gatherplot matrix of several dimensions.
    Matrix {
        csv: PathBuf,
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<String>,
        #[arg(long)]
        color: Option<String>,
        #[arg(long, default_value = "absolute")]
        mode: String,
        #[arg(long, default_value_t = 320)]
        cell_width: u32,
        #[arg(long, default_value_t = 240)]
        cell_height: u32,
        #[arg(long = "bins")]
        bins: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Overlap and overplotting indices of the plain scatterplot mapping.
    Stats {
        csv: PathBuf,
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
        /// Mark size in data units.
        #[arg(short, long, default_value_t = 1.0)]
        s: f64,
    },
    /// Export animation frames between two plot requests.
    Keyframes {
        csv: PathBuf,
        /// Start plot as a query string, e.g. `x=origin&y=undefined`.
        #[arg(long)]
        from: String,
        /// End plot as a query string.
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 30.0)]
        fps: f64,
        #[arg(long, default_value_t = gatherplot_core::transitions::DEFAULT_DURATION_MS)]
        duration_ms: u64,
        #[arg(long, default_value = "cubic-in-out")]
        easing: String,
        /// Directory for `frame-NNNN.svg` files; without it the frames are
        /// printed as a JSON array of layouts.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
    },
    /// Run the HTTP JSON service.
    Serve {
        /// Defaults to $GATHERPLOT_PORT, then 8080.
        #[arg(long)]
        port: Option<u16>,
    },
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// X dimension, or `undefined`.
    #[arg(long)]
    x: Option<String>,
    /// Y dimension, or `undefined`.
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    x_transform: Option<String>,
    #[arg(long)]
    y_transform: Option<String>,
    #[arg(long)]
    x_alloc: Option<String>,
    #[arg(long)]
    y_alloc: Option<String>,
    #[arg(long)]
    x_order: Option<String>,
    #[arg(long)]
    y_order: Option<String>,
    /// `label:state`, repeatable.
    #[arg(long)]
    x_fold: Vec<String>,
    #[arg(long)]
    y_fold: Vec<String>,
    #[arg(long)]
    color: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long)]
    height: Option<String>,
    /// `dim=width[,origin]`, repeatable.
    #[arg(long)]
    bins: Vec<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    mark_size: Option<String>,
    #[arg(long)]
    jitter: Option<String>,
}

impl PlotArgs {
    fn to_request(&self) -> Result<PlotRequest, RequestErrors> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        let singles = [
            ("x", &self.x),
            ("y", &self.y),
            ("x_transform", &self.x_transform),
            ("y_transform", &self.y_transform),
            ("x_alloc", &self.x_alloc),
            ("y_alloc", &self.y_alloc),
            ("x_order", &self.x_order),
            ("y_order", &self.y_order),
            ("color", &self.color),
            ("mode", &self.mode),
            ("width", &self.width),
            ("height", &self.height),
            ("seed", &self.seed),
            ("mark_size", &self.mark_size),
            ("jitter", &self.jitter),
        ];
        for (k, v) in singles {
            if let Some(v) = v {
                pairs.push((k, v));
            }
        }
        pairs.extend(self.x_fold.iter().map(|v| ("x_fold", v.as_str())));
        pairs.extend(self.y_fold.iter().map(|v| ("y_fold", v.as_str())));
        pairs.extend(self.bins.iter().map(|v| ("bins", v.as_str())));
        PlotRequest::from_pairs(pairs)
    }
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<RequestErrors> for Failure {
    fn from(e: RequestErrors) -> Failure {
        let message =
            e.0.iter()
                .map(|fe| format!("--{}: {}", fe.field.replace('_', "-"), fe.message))
                .collect::<Vec<_>>()
                .join("\n");
        Failure::usage(message)
    }
}

fn load(path: &Path) -> Result<Dataset, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    read_csv(std::io::BufReader::new(file)).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let result = match output {
        Some(p) => fs::write(p, text),
        None => stdout.write_all(text.as_bytes()),
    };
    result.map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", output.map_or("stdout".into(), |p| p.display().to_string())),
    })
}

fn layout_for(dataset: &Dataset, req: &PlotRequest) -> Result<Layout, Failure> {
    compute_layout(dataset, req).map_err(Failure::from)
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    let theme = Theme::default();
    match command {
        Command::Ingest { csv } => {
            let ds = load(&csv)?;
            emit(None, &(to_canonical_string(&dataset_summary(None, &ds)) + "\n"), stdout)
        }
        Command::Render {
            csv,
            plot,
            json,
            output,
        } => {
            let req = plot.to_request()?;
            let ds = load(&csv)?;
            let layout = layout_for(&ds, &req)?;
            let text = if json {
                layout.to_json()
            } else {
                render_svg(&layout, &theme)
            };
            emit(output.as_deref(), &text, stdout)
        }
        Command::Matrix {
            csv,
            dims,
            color,
            mode,
            cell_width,
            cell_height,
            bins,
            output,
        } => {
            let mode = parse_mode(&mode).map_err(|m| Failure::usage(format!("--mode: {m}")))?;
            let mut pairs: Vec<(&str, &str)> = bins.iter().map(|b| ("bins", b.as_str())).collect();
            if let Some(c) = &color {
                pairs.push(("color", c));
            }
            let req = PlotRequest::from_pairs(pairs)?;
            let ds = load(&csv)?;
            let mut axes = Vec::with_capacity(dims.len());
            for d in &dims {
                let probe = PlotRequest {
                    x: crate::request::AxisRequest {
                        dimension: Some(d.clone()),
                        ..Default::default()
                    },
                    ..req.clone()
                };
                let (cfg, _) = probe.resolve(&ds).map_err(|e| {
                    Failure::from(RequestErrors(
                        e.0.into_iter()
                            .map(|mut fe| {
                                if fe.field == "x" {
                                    fe.field = "dims".into();
                                }
                                fe
                            })
                            .collect(),
                    ))
                })?;
                axes.push(cfg.x);
            }
            let (_, opts) = req.resolve(&ds)?;
            let grid = gatherplot_matrix(
                &ds,
                &axes,
                Canvas::new(cell_width, cell_height),
                mode,
                color.as_deref(),
                &opts,
            )
            .map_err(|e| Failure::usage(e.to_string()))?;
            let svg = render_matrix_svg(&grid, &theme).map_err(|e| Failure::usage(e.to_string()))?;
            emit(output.as_deref(), &svg, stdout)
        }
        Command::Stats { csv, x, y, s } => {
            let ds = load(&csv)?;
            let stats = dataset_stats(&ds, x.as_deref(), y.as_deref(), s).map_err(|e| Failure::usage(e.to_string()))?;
            let body = serde_json::to_value(stats).expect("stats serialize");
            emit(None, &(to_canonical_string(&body) + "\n"), stdout)
        }
        Command::Keyframes {
            csv,
            from,
            to,
            fps,
            duration_ms,
            easing,
            svg_dir,
        } => {
            let easing = parse_easing(&easing).map_err(|m| Failure::usage(format!("--easing: {m}")))?;
            let from = PlotRequest::from_query(&from).map_err(|e| prefixed("from", e))?;
            let to = PlotRequest::from_query(&to).map_err(|e| prefixed("to", e))?;
            let ds = load(&csv)?;
            let plan = TransitionPlan::new(layout_for(&ds, &from)?, layout_for(&ds, &to)?, duration_ms, easing)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let frames = keyframes(&plan, fps).map_err(|e| Failure::usage(e.to_string()))?;
            match svg_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Failure {
                        code: EXIT_IO,
                        message: format!("{}: {e}", dir.display()),
                    })?;
                    for (i, frame) in frames.iter().enumerate() {
                        let path = dir.join(format!("frame-{i:04}.svg"));
                        emit(Some(&path), &render_svg(frame, &theme), stdout)?;
                    }
                    Ok(())
                }
                None => {
                    let array = serde_json::Value::Array(frames.iter().map(Layout::to_json_value).collect());
                    emit(None, &(to_canonical_string(&array) + "\n"), stdout)
                }
            }
        }
        Command::Serve { port } => {
            let port = match port {
                Some(p) => p,
                None => port_from_env().map_err(Failure::usage)?,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure {
                code: EXIT_IO,
                message: e.to_string(),
            })?;
            runtime.block_on(serve(port)).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("port {port}: {e}"),
            })
        }
    }
}

fn prefixed(flag: &str, e: RequestErrors) -> Failure {
    let message =
        e.0.iter()
            .map(|fe| format!("--{flag}: {}: {}", fe.field, fe.message))
            .collect::<Vec<_>>()
            .join("\n");
    Failure::usage(message)
}
