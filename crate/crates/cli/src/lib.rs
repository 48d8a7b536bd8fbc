//! Argument handling and orchestration for the `nnanim` binary.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nnanim::pipeline::{compile_source, default_threads, Compiled, Quality};
use nnanim::spec::{FsImages, OutputFormat};
use nnanim::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SYNTAX: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_RENDER: i32 = 6;

/// Environment variable capping render threads.
pub const THREADS_VAR: &str = "NNANIM_THREADS";

#[derive(Parser, Debug)]
#[command(name = "nnanim", version, about = "Render neural network animations from a spec file")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a spec to SVG frames and/or a GIF.
    Render {
        /// Path to the spec file.
        spec: PathBuf,
        /// Output directory, created if missing.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Preset: l = 480x270@15, m = 960x540@30, h = 1920x1080@60.
        #[arg(long, value_parser = ["l", "m", "h"])]
        quality: Option<String>,
        #[arg(long)]
        fps: Option<u32>,
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        height: Option<u32>,
        /// Comma-separated subset of svg,gif.
        #[arg(long, value_parser = parse_formats)]
        format: Option<BTreeSet<OutputFormat>>,
        /// Replaces the seed of every dropout directive.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write scene.json and timeline.json.
        #[arg(long)]
        dump_debug: bool,
    },
}

fn parse_formats(s: &str) -> Result<BTreeSet<OutputFormat>, String> {
    OutputFormat::parse_list(s).ok_or_else(|| format!("`{s}` is not a comma-separated list of svg, gif"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub quality: Option<Quality>,
    pub fps: Option<u32>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub formats: Option<BTreeSet<OutputFormat>>,
    pub seed_override: Option<u64>,
    pub dump_debug: bool,
}

impl CliConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        CliConfig {
            input: input.into(),
            out_dir: out_dir.into(),
            quality: None,
            fps: None,
            width: None,
            height: None,
            formats: None,
            seed_override: None,
            dump_debug: false,
        }
    }

    /// fps, width and height after applying flags over the preset over the
    /// spec's own values.
    pub fn effective_size(&self, spec: (u32, u32, u32)) -> (u32, u32, u32) {
        let base = self.quality.map_or(spec, Quality::settings);
        (
            self.fps.unwrap_or(base.0),
            self.width.unwrap_or(base.1),
            self.height.unwrap_or(base.2),
        )
    }
}

/// Parses `argv` including the program name. Help and version requests come
/// back as errors too; their `exit_code()` is 0.
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let Args { command } = Args::try_parse_from(argv)?;
    let Command::Render { spec, out, quality, fps, width, height, format, seed, dump_debug } = command;
    Ok(CliConfig {
        input: spec,
        out_dir: out,
        quality: quality.as_deref().and_then(Quality::from_letter),
        fps,
        width,
        height,
        formats: format,
        seed_override: seed,
        dump_debug,
    })
}

/// Render threads: available parallelism, capped by `NNANIM_THREADS`.
pub fn thread_count(env_value: Option<&str>) -> Result<usize, String> {
    let avail = default_threads();
    match env_value {
        None => Ok(avail),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n.min(avail)),
            _ => Err(format!("{THREADS_VAR} must be a positive integer, got `{v}`")),
        },
    }
}

/// One line per written artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: PathBuf,
    pub frames: usize,
    pub duration_s: f64,
    pub bytes: u64,
}

impl std::fmt::Display for Artifact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}  frames={}  duration={:.3}s  bytes={}",
            self.path.display(),
            self.frames,
            self.duration_s,
            self.bytes
        )
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_SYNTAX,
        Error::Validation(_) => EXIT_VALIDATION,
        Error::Io { .. } => EXIT_IO,
        Error::Layout(_) | Error::Animation(_) | Error::Render(_) => EXIT_RENDER,
    }
}

/// Loads and compiles the spec with all CLI overrides applied.
pub fn compile(cfg: &CliConfig) -> Result<Compiled, Failure> {
    let text = fs::read_to_string(&cfg.input).map_err(|e| io_failure(&cfg.input, e))?;
    let base = cfg.input.parent().map(Path::to_path_buf).unwrap_or_default();
    compile_source(&text, &FsImages::new(base), |spec| {
        if let Some(seed) = cfg.seed_override {
            spec.override_seed(seed);
        }
        let r = &mut spec.render;
        (r.fps, r.width_px, r.height_px) = cfg.effective_size((r.fps, r.width_px, r.height_px));
        if let Some(f) = &cfg.formats {
            r.formats = f.clone();
        }
    })
    .map_err(|e| Failure { code: exit_code(&e), message: format!("{}: {e}", cfg.input.display()) })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn is_frame_file(name: &str) -> bool {
    name.strip_prefix("frame_")
        .and_then(|r| r.strip_suffix(".svg"))
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Renders every requested format into `cfg.out_dir`.
pub fn render(cfg: &CliConfig, threads: usize) -> Result<Vec<Artifact>, Failure> {
    let compiled = compile(cfg)?;
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let render_failure = |e: nnanim::render::RenderError| Failure { code: EXIT_RENDER, message: e.to_string() };
    let duration_s = compiled.timeline.duration_s;
    let mut artifacts = Vec::new();

    let formats = &compiled.net.spec.render.formats;
    if formats.contains(&OutputFormat::Svg) {
        let entries = fs::read_dir(dir).map_err(|e| io_failure(dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| io_failure(dir, e))?;
            if entry.file_name().to_str().is_some_and(is_frame_file) {
                fs::remove_file(entry.path()).map_err(|e| io_failure(&entry.path(), e))?;
            }
        }
        let svgs = compiled.svg_frames(threads).map_err(render_failure)?;
        let mut bytes = 0;
        for (k, svg) in svgs.iter().enumerate() {
            write_file(&dir.join(format!("frame_{k:06}.svg")), svg.as_bytes())?;
            bytes += svg.len() as u64;
        }
        artifacts.push(Artifact {
            path: dir.join("frame_%06d.svg"),
            frames: svgs.len(),
            duration_s,
            bytes,
        });
    }
    if formats.contains(&OutputFormat::Gif) {
        let gif = compiled.gif(threads).map_err(render_failure)?;
        let stem = cfg.input.file_stem().map_or("animation".into(), |s| s.to_string_lossy());
        let path = dir.join(format!("{stem}.gif"));
        write_file(&path, &gif.bytes)?;
        artifacts.push(Artifact { path, frames: gif.frames.len(), duration_s, bytes: gif.bytes.len() as u64 });
    }
    if cfg.dump_debug {
        let dumps = [
            ("scene.json", serde_json::to_vec_pretty(&compiled.scene)),
            ("timeline.json", serde_json::to_vec_pretty(&compiled.timeline)),
        ];
        for (name, json) in dumps {
            let json = json.map_err(|e| Failure { code: EXIT_RENDER, message: e.to_string() })?;
            let path = dir.join(name);
            write_file(&path, &json)?;
            artifacts.push(Artifact { path, frames: 0, duration_s, bytes: json.len() as u64 });
        }
    }
    Ok(artifacts)
}

/// Runs a parsed command, printing summaries to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let threads = match thread_count(std::env::var(THREADS_VAR).ok().as_deref()) {
        Ok(n) => n,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    match render(cfg, threads) {
        Ok(artifacts) => {
            for a in artifacts {
                let _ = writeln!(out, "{a}");
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Full entry point over raw arguments.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg, out, err),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            }
        }
    }
}
