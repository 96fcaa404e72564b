use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ban_opt::dynamics::{attractors, DEFAULT_MAX_N};
use ban_opt::network::{interaction_digraph, is_acyclic, recursive_wiring, validate_promise};
use ban_opt::outputs::output_functions;
use ban_opt::report::ReportJson;
use ban_opt::unfold::minimum_fvs;
use ban_opt::{optimize, Error, NetworkDef, NetworkFile, OptimizeOptions, Result};

#[derive(Parser)]
#[command(
    name = "ban-opt",
    version,
    about = "Shrink Boolean automata networks while keeping their attractors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print node and input counts, the promise check and the FVS size.
    Analyze {
        file: PathBuf,
        /// Write the signed interaction digraph in DOT format.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
    },
    /// Enumerate the attractors of a closed network.
    Attractors {
        file: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        #[command(flatten)]
        cap: Cap,
    },
    /// Print the output functions of an acyclic module.
    Outputs {
        file: PathBuf,
        /// Comma-separated node ids (default: every node).
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<String>,
    },
    /// Run the full optimization pipeline.
    Optimize {
        file: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        #[arg(long, value_name = "OUT")]
        dot_before: Option<PathBuf>,
        #[arg(long, value_name = "OUT")]
        dot_after: Option<PathBuf>,
        /// Compare the attractors of both networks by brute force.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        cap: Cap,
    },
}

#[derive(Args)]
struct Cap {
    /// Largest node count for attractor enumeration (overrides BAN_OPT_MAX_N).
    #[arg(long, value_name = "N")]
    max_n: Option<usize>,
}

impl Cap {
    fn resolve(&self) -> Result<usize> {
        if let Some(n) = self.max_n {
            return Ok(n);
        }
        match std::env::var("BAN_OPT_MAX_N") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Network(format!("BAN_OPT_MAX_N is not a number: `{v}`"))),
            Err(_) => Ok(DEFAULT_MAX_N),
        }
    }
}

/// The closed network described by a file: wires, if any, are applied.
fn closed_network(file: &NetworkFile) -> Result<NetworkDef> {
    if file.wiring.is_empty() {
        Ok(file.network.clone())
    } else {
        recursive_wiring(&file.network, &file.wiring)
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn analyze(path: &Path, dot: Option<&Path>) -> Result<()> {
    let file = NetworkFile::read(path)?;
    let net = &file.network;
    let violations = validate_promise(net)?;
    if !violations.is_empty() {
        println!(
            "nodes={} inputs={} promise=violated",
            net.len(),
            net.inputs().len()
        );
        return Err(Error::PromiseViolation(violations));
    }
    let g = interaction_digraph(net)?;
    let fvs = minimum_fvs(&g);
    println!(
        "nodes={} inputs={} promise=ok fvs={}",
        net.len(),
        net.inputs().len(),
        fvs.nodes.len()
    );
    println!("acyclic={}", is_acyclic(net)?);
    let approx = if fvs.optimal { "" } else { " (heuristic)" };
    println!("cut={}{approx}", fvs.nodes.join(","));
    if let Some(out) = dot {
        write(out, &g.to_dot(net.name()))?;
    }
    Ok(())
}

fn cmd_attractors(path: &Path, json: Option<&Path>, max_n: usize) -> Result<()> {
    let net = closed_network(&NetworkFile::read(path)?)?;
    let atts = attractors(&net, max_n)?;
    let report = ReportJson::attractors(&net, &atts).to_json();
    match json {
        Some(out) => {
            write(out, &report)?;
            for (i, a) in atts.iter().enumerate() {
                println!(
                    "{}: length {}: {}",
                    i + 1,
                    a.len(),
                    a.bitstrings(net.len()).join(" ")
                );
            }
        }
        None => print!("{report}"),
    }
    Ok(())
}

fn outputs(path: &Path, nodes: &[String]) -> Result<()> {
    let m = NetworkFile::read(path)?.network;
    let wanted: Vec<String> = if nodes.is_empty() {
        m.nodes().to_vec()
    } else {
        nodes.to_vec()
    };
    let outs = output_functions(&m, &wanted)?;
    for s in &wanted {
        println!("{s}: {}", outs[s]);
    }
    Ok(())
}

struct OptimizeArgs<'a> {
    json: Option<&'a Path>,
    dot_before: Option<&'a Path>,
    dot_after: Option<&'a Path>,
    verify: bool,
    max_n: usize,
}

fn cmd_optimize(path: &Path, args: OptimizeArgs<'_>) -> Result<()> {
    let f = closed_network(&NetworkFile::read(path)?)?;
    let opts = OptimizeOptions {
        max_n: args.max_n,
        verify: args.verify,
    };
    let report = optimize(&f, opts)?;
    if let Some(out) = args.dot_before {
        write(out, &interaction_digraph(&f)?.to_dot(f.name()))?;
    }
    if let Some(out) = args.dot_after {
        let opt = &report.optimized;
        write(out, &interaction_digraph(opt)?.to_dot(opt.name()))?;
    }
    if let Some(out) = args.json {
        write(out, &ReportJson::pipeline(&report).to_json())?;
    }
    println!(
        "{}: {} -> {} nodes (fvs {}, dynamics 2^{} smaller)",
        f.name(),
        report.before(),
        report.after(),
        report.cut.len(),
        report.reduction_exponent()
    );
    println!("T = {{{}}}", report.cut.join(", "));
    for s in &report.cut {
        println!("O_{s} = {}", report.outputs[s]);
    }
    for r in &report.rewrites {
        println!("rewrite: {r}");
    }
    match report.verified {
        Some(v) => println!("verified: {v}"),
        None if args.verify => println!("verified: skipped (above the state-space cap)"),
        None => {}
    }
    print!("{}", report.optimized);
    if report.verified == Some(false) {
        return Err(Error::HypothesisFailed(
            "attractors of the optimized network differ".into(),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { file, dot } => analyze(&file, dot.as_deref()),
        Command::Attractors { file, json, cap } => {
            cmd_attractors(&file, json.as_deref(), cap.resolve()?)
        }
        Command::Outputs { file, nodes } => outputs(&file, &nodes),
        Command::Optimize {
            file,
            json,
            dot_before,
            dot_after,
            verify,
            cap,
        } => cmd_optimize(
            &file,
            OptimizeArgs {
                json: json.as_deref(),
                dot_before: dot_before.as_deref(),
                dot_after: dot_after.as_deref(),
                verify,
                max_n: cap.resolve()?,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
