use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use psc_core::compile::{compile_line, compile_loop, compile_stabilizer, compile_thooft, decompose, make_rotation, RotSign, ThooftPath};
use psc_core::decorated::{DecoratedGraph, FaceKind};
use psc_core::ghz::{ghz_experiment, GhzVariant};
use psc_core::graph::{GraphSpec, SurfaceGraph};
use psc_core::kasteleyn::{find_kasteleyn, kasteleyn_violations, Orientation};
use psc_core::pathspec::{parse_faces, parse_line, parse_loop};
use psc_core::protocol::{run_engine, BackendKind, Scenario};
use psc_core::render::{render_svg, Highlight, RenderSpec};
use psc_core::{Error, Result};

// stdout may be a closed pipe (`psc ... | head`); drop the output quietly
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "psc", version, about = "Plaquette surface code with mobile Ising anyons")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Line,
    Loop,
    Stabilizer,
    Thooft,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Engine,
    Oracle,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum GhzArg {
    Exchange12,
    Exchange13,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a graph file and print its counts.
    Verify {
        graph: PathBuf,
        /// Orientation dump (`arrow <from> <to>` lines) to check instead of solving for one.
        #[arg(long)]
        orientation: Option<PathBuf>,
        /// Write the orientation found to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Compile an operator to a Pauli string and the gates of its π/4 rotations.
    Compile {
        kind: Kind,
        graph: PathBuf,
        /// Qubit route (`0/W,1,2/E`), face label, or comma-separated face list.
        pathspec: String,
        /// Corner (`id/slot`) ending an odd 't Hooft line.
        #[arg(long)]
        anyon: Option<String>,
    },
    /// Execute a scenario and write its measurement record.
    Run {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "engine")]
        backend: BackendArg,
        #[arg(long, env = "PSC_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the gate list of every unitary applied.
        #[arg(long)]
        gates: Option<PathBuf>,
    },
    /// Draw a graph as SVG.
    Render {
        graph: PathBuf,
        /// File of `wilson <route>`, `loop <route>` or `thooft <faces>` lines.
        #[arg(long)]
        paths: Option<PathBuf>,
        /// Draw a Kasteleyn orientation.
        #[arg(long)]
        orientation: bool,
        #[arg(long)]
        svg: PathBuf,
    },
    /// Run the GHZ preparation and print the logical expectations.
    Ghz {
        #[arg(value_enum)]
        variant: GhzArg,
        #[arg(long, value_enum, default_value = "engine")]
        backend: BackendArg,
        #[arg(long, env = "PSC_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn backend(b: BackendArg) -> BackendKind {
    match b {
        BackendArg::Engine => BackendKind::Engine,
        BackendArg::Oracle => BackendKind::Oracle,
        BackendArg::Both => BackendKind::Both,
    }
}

fn load_graph(p: &Path) -> Result<SurfaceGraph> {
    SurfaceGraph::build(&GraphSpec::parse(&std::fs::read_to_string(p)?)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => out_raw!("{text}"),
    }
    Ok(())
}

fn verify(path: &Path, orientation: Option<&Path>, dump: Option<&Path>) -> Result<()> {
    let g = load_graph(path)?;
    let (nq, ns, ns_sigma) = (g.num_qubits(), g.num_stabilizers(), g.count_sigma());
    let balanced = g.check_euler_balance();
    out!("N_Q={nq} N_S={ns} N_σ={ns_sigma} logical={}", g.logical_qubits());
    out!("balance N_Q-N_S={} N_σ/2-1={} {}", nq as i64 - ns as i64, ns_sigma as i64 / 2 - 1, if balanced { "OK" } else { "FAIL" });
    if !balanced {
        return Err(Error::EulerViolation(nq as i64 - ns as i64 - (ns_sigma as i64 / 2 - 1)));
    }
    let dg = DecoratedGraph::new(&g);
    let o = match orientation {
        Some(p) => Orientation::from_text(&dg, &std::fs::read_to_string(p)?)?,
        None => find_kasteleyn(&dg),
    };
    let bad = kasteleyn_violations(&dg, &o);
    if let Some(&f) = bad.first() {
        let label = match dg.faces()[f].kind {
            FaceKind::Plaquette(pf) => g.face_label(pf),
            FaceKind::Diamond(q) => format!("diamond {}", g.qubit_id(q)),
        };
        return Err(Error::InvalidPath(format!("{} faces break the Kasteleyn condition, first {label}", bad.len())));
    }
    if let Some(p) = dump {
        std::fs::write(p, o.to_text(&dg))?;
    }
    out!("OK");
    Ok(())
}

fn compile(kind: Kind, path: &Path, spec: &str, anyon: Option<&str>) -> Result<()> {
    let g = load_graph(path)?;
    let dg = DecoratedGraph::new(&g);
    let p = match kind {
        Kind::Line => compile_line(&dg, &parse_line(&g, spec)?)?,
        Kind::Loop => compile_loop(&dg, &parse_loop(&g, spec)?)?,
        Kind::Stabilizer => compile_stabilizer(&dg, g.face_by_label(spec)?)?,
        Kind::Thooft => {
            let tp = ThooftPath::through(&g, &parse_faces(&g, spec)?)?;
            let c = anyon.map(|a| g.parse_corner(a)).transpose()?;
            compile_thooft(&dg, &tp, c)?
        }
    };
    out!("{}", p.to_text());
    if p.is_hermitian() {
        for sign in [RotSign::Plus, RotSign::Minus] {
            let d = decompose(&make_rotation(p.clone(), sign)?);
            out_raw!("U{sign}\n{}", d.to_text());
        }
    }
    Ok(())
}

fn run(scenario: &Path, b: BackendArg, seed: Option<u64>, out: Option<&Path>, gates: Option<&Path>) -> Result<()> {
    let sc = Scenario::load(scenario)?;
    let rec = psc_core::protocol::run(&sc, backend(b), seed)?;
    write_or_print(out, &(rec.to_json() + "\n"))?;
    let w = psc_core::protocol::max_stabilizer_weight(&sc)?;
    let _ = std::io::Write::write_fmt(&mut std::io::stderr(), format_args!("max stabilizer weight {w}\n"));
    if let Some(gp) = gates {
        let (_, m) = run_engine(&sc, seed.unwrap_or(sc.seed))?;
        let text: String = m.gate_export().iter().map(|g| format!("{g}\n")).collect();
        std::fs::write(gp, text)?;
    }
    Ok(())
}

fn render(graph: &Path, paths: Option<&Path>, orientation: bool, svg: &Path) -> Result<()> {
    let g = load_graph(graph)?;
    let dg = DecoratedGraph::new(&g);
    let mut spec = RenderSpec { orientation: orientation.then(|| find_kasteleyn(&dg)), ..Default::default() };
    if let Some(p) = paths {
        for (ln, line) in std::fs::read_to_string(p)?.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let hl = match kind {
                "wilson" => Highlight::Wilson(parse_line(&g, rest.trim())?),
                "loop" => Highlight::Wilson(parse_loop(&g, rest.trim())?),
                "thooft" => {
                    let faces = parse_faces(&g, rest.trim())?;
                    ThooftPath::through(&g, &faces)?;
                    Highlight::Thooft(faces)
                }
                _ => return Err(Error::Parse { line: ln + 1, msg: format!("unknown path kind {kind:?}") }),
            };
            spec.paths.push(hl);
        }
    }
    std::fs::write(svg, render_svg(&g, &spec))?;
    Ok(())
}

fn ghz(v: GhzArg, b: BackendArg, seed: u64) -> Result<()> {
    let variant = match v {
        GhzArg::Exchange12 => GhzVariant::Exchange12,
        GhzArg::Exchange13 => GhzVariant::Exchange13,
    };
    let rec = ghz_experiment(variant, backend(b), seed)?;
    out!("{}", serde_json::to_string_pretty(&rec).expect("records serialize"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            out!("ERR Usage {first}");
            return ExitCode::from(2);
        }
    };
    let res = match &cli.cmd {
        Cmd::Verify { graph, orientation, dump } => verify(graph, orientation.as_deref(), dump.as_deref()),
        Cmd::Compile { kind, graph, pathspec, anyon } => compile(*kind, graph, pathspec, anyon.as_deref()),
        Cmd::Run { scenario, backend, seed, out, gates } => run(scenario, *backend, *seed, out.as_deref(), gates.as_deref()),
        Cmd::Render { graph, paths, orientation, svg } => render(graph, paths.as_deref(), *orientation, svg),
        Cmd::Ghz { variant, backend, seed } => ghz(*variant, *backend, *seed),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            out!("ERR {} {}", e.code(), e);
            ExitCode::FAILURE
        }
    }
}
