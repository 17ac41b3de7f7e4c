//! `bcolab`: command-line front end for the reduction lab.
//!
//! Exit codes: 0 pass/solved, 1 verified false or no solution, 2 parse error,
//! 3 violated precondition, 4 internal invariant breach.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bcol_core::bcoloring::{check_b_coloring, solve_bcol_brute_with_budget, Budget, ColoringError};
use bcol_core::circori::{gen_random_instance, gen_yes_instance, solve_circori_brute, CircOriError};
use bcol_core::decomposition::{gen_pd_graph, module_width, pd_to_linear_order, pd_width, validate_pd};
use bcol_core::harness::{run_roundtrip, Perturb, RoundtripParams};
use bcol_core::io;
use bcol_core::reduction::{
    build_instance, build_pd_for_h, extract_orientation, forward_witness, trivial_no_instance, ExtractError,
    ReductionError,
};
use bcol_core::{CircOriInstance, LinearOrder, Orientation, ReducedInstance};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bcolab", version, about = "Reduction lab: circulating orientation to b-coloring")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build (H, k) from a circori instance; writes <prefix>.bcol, .rolemap and .pd
    Reduce {
        input: PathBuf,
        /// Path decomposition of the source graph to lift to H
        #[arg(long)]
        pd: Option<PathBuf>,
        #[arg(short = 'o')]
        prefix: Option<PathBuf>,
        /// Emit a fixed NO instance instead of failing on odd vertex weight
        #[arg(long)]
        force_trivial_no: bool,
    },
    /// Generate, solve, reduce, color, audit and extract on seeded YES instances
    Roundtrip {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Largest vertex count
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Largest edge count
        #[arg(long, default_value_t = 14)]
        m: usize,
        /// Largest edge weight
        #[arg(long, default_value_t = 4)]
        wmax: u64,
        /// Largest number of superposed cycles
        #[arg(long, default_value_t = 3)]
        cycles: usize,
        /// Corrupt every forward witness (repeat-leaf, recolor-pad, swap-qz)
        #[arg(long)]
        perturb: Option<Perturb>,
        #[arg(long)]
        json: bool,
        /// Record per-stage wall-clock times (makes output nondeterministic)
        #[arg(long)]
        timings: bool,
    },
    /// Brute-force solvers
    Solve {
        kind: SolveKind,
        input: PathBuf,
        /// Largest vertex count the b-coloring search accepts
        #[arg(long)]
        budget: Option<usize>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Check a certificate
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Linear orders and module-width
    Order {
        #[command(subcommand)]
        what: Order,
    },
    /// Seeded instance generators
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Edge count (random) or width (pd)
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        wmax: u64,
        #[arg(long, default_value_t = 2)]
        cycles: usize,
        /// Edge probability inside a bag window (pd)
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(short = 'o')]
        prefix: Option<PathBuf>,
    },
    /// Forward witness: b-coloring of H from a circulating orientation
    Witness {
        bcol: PathBuf,
        rolemap: PathBuf,
        orientation: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Orientation of the source read off a b-coloring of H
    Extract {
        bcol: PathBuf,
        rolemap: PathBuf,
        coloring: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveKind {
    Circori,
    Bcol,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Yes,
    Random,
    Pd,
}

#[derive(Subcommand)]
enum Verify {
    /// Is the coloring a b-coloring of the bcol instance?
    Coloring { bcol: PathBuf, coloring: PathBuf },
    /// Is the decomposition valid for the graph (circori or bcol file)?
    Pd { graph: PathBuf, pd: PathBuf },
    /// Is the orientation circulating?
    Orientation { circori: PathBuf, orientation: PathBuf },
}

#[derive(Subcommand)]
enum Order {
    /// Leftmost-bag order of a path decomposition
    FromPd {
        graph: PathBuf,
        pd: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Module-width of a linear order
    ModuleWidth { graph: PathBuf, order: PathBuf },
}

struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Fail { code, msg: msg.into() }
    }
}

type CliResult = Result<u8, Fail>;

const FALSE: u8 = 1;
const PARSE: u8 = 2;
const PRECONDITION: u8 = 3;
const INTERNAL: u8 = 4;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::new(PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::new(INTERNAL, format!("{}: {e}", path.display())))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> Result<T, io::ParseError>) -> Result<T, Fail> {
    let text = read(path)?;
    f(&text).map_err(|e| Fail::new(PARSE, format!("{}: {e}", path.display())))
}

fn reduction_fail(e: ReductionError) -> Fail {
    let code = match e {
        ReductionError::Internal(_) => INTERNAL,
        ReductionError::RoleMapMismatch(_) => PARSE,
        _ => PRECONDITION,
    };
    Fail::new(code, e.to_string())
}

fn orientation_for(inst: &CircOriInstance, path: &Path) -> Result<Orientation, Fail> {
    let arcs = parse(path, io::parse_orientation)?;
    Orientation::new(inst.graph(), arcs).map_err(|e| Fail::new(PARSE, format!("{}: {e}", path.display())))
}

fn load_reduced(bcol: &Path, rolemap: &Path) -> Result<ReducedInstance, Fail> {
    let h = parse(bcol, io::parse_bcol)?;
    let roles = parse(rolemap, io::parse_rolemap)?;
    ReducedInstance::from_roles(&h.graph, h.k, &roles).map_err(reduction_fail)
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Reduce { input, pd, prefix, force_trivial_no } => reduce(&input, pd.as_deref(), prefix.as_deref(), force_trivial_no),
        Cmd::Roundtrip { seed, trials, n, m, wmax, cycles, perturb, json, timings } => {
            let params = RoundtripParams { seed, trials, n_max: n, m_max: m, wmax, cycles_max: cycles, perturb, timings };
            let report = run_roundtrip(&params);
            if json {
                let text = serde_json::to_string_pretty(&report).map_err(|e| Fail::new(INTERNAL, e.to_string()))?;
                println!("{text}");
            } else {
                print!("{}", report.summary_text());
            }
            Ok(if report.passed() { 0 } else { FALSE })
        }
        Cmd::Solve { kind: SolveKind::Circori, input, out, .. } => {
            let inst = parse(&input, io::parse_circori)?;
            match solve_circori_brute(&inst) {
                Ok(Some(o)) => emit(out.as_deref(), &io::write_orientation(o.arcs())).map(|_| 0),
                Ok(None) => {
                    println!("none");
                    Ok(FALSE)
                }
                Err(e @ CircOriError::EdgeCapExceeded { .. }) => Err(Fail::new(PRECONDITION, e.to_string())),
                Err(e) => Err(Fail::new(INTERNAL, e.to_string())),
            }
        }
        Cmd::Solve { kind: SolveKind::Bcol, input, budget, out } => {
            let inst = parse(&input, io::parse_bcol)?;
            let mut b = Budget::default();
            if let Some(max_n) = budget {
                b.max_n = max_n;
            }
            match solve_bcol_brute_with_budget(&inst, b) {
                Ok(Some(c)) => emit(out.as_deref(), &io::write_coloring(&c)).map(|_| 0),
                Ok(None) => {
                    println!("none");
                    Ok(FALSE)
                }
                Err(e @ ColoringError::BudgetExceeded { .. }) => Err(Fail::new(PRECONDITION, e.to_string())),
                Err(e) => Err(Fail::new(INTERNAL, e.to_string())),
            }
        }
        Cmd::Verify { what } => verify(what),
        Cmd::Order { what: Order::FromPd { graph, pd, out } } => {
            let g = parse(&graph, io::parse_any_graph)?;
            let pd = parse(&pd, io::parse_pd)?;
            let order = pd_to_linear_order(&g, &pd).map_err(|e| Fail::new(FALSE, e.to_string()))?;
            emit(out.as_deref(), &io::write_order(order.as_slice())).map(|_| 0)
        }
        Cmd::Order { what: Order::ModuleWidth { graph, order } } => {
            let g = parse(&graph, io::parse_any_graph)?;
            let seq = parse(&order, io::parse_order)?;
            let order = LinearOrder::new(&g, seq).map_err(|e| Fail::new(PARSE, e.to_string()))?;
            let w = module_width(&g, &order).map_err(|e| Fail::new(INTERNAL, e.to_string()))?;
            println!("{w}");
            Ok(0)
        }
        Cmd::Gen { kind, seed, n, m, wmax, cycles, density, prefix } => gen(kind, seed, n, m, wmax, cycles, density, prefix.as_deref()),
        Cmd::Witness { bcol, rolemap, orientation, out } => {
            let red = load_reduced(&bcol, &rolemap)?;
            let o = orientation_for(red.source(), &orientation)?;
            if !red.source().is_circulating(&o).unwrap_or(false) {
                return Err(Fail::new(PRECONDITION, "orientation is not circulating"));
            }
            let c = forward_witness(&red, &o).map_err(reduction_fail)?;
            emit(out.as_deref(), &io::write_coloring(&c)).map(|_| 0)
        }
        Cmd::Extract { bcol, rolemap, coloring, out } => {
            let red = load_reduced(&bcol, &rolemap)?;
            let c = parse(&coloring, io::parse_coloring)?;
            match extract_orientation(&red, &c) {
                Ok(o) => emit(out.as_deref(), &io::write_orientation(o.arcs())).map(|_| 0),
                Err(e @ ExtractError::BalanceViolation) => Err(Fail::new(INTERNAL, e.to_string())),
                Err(e) => Err(Fail::new(FALSE, e.to_string())),
            }
        }
    }
}

fn reduce(input: &Path, pd: Option<&Path>, prefix: Option<&Path>, force_trivial_no: bool) -> CliResult {
    let inst = parse(input, io::parse_circori)?;
    let pd_g = pd.map(|p| parse(p, io::parse_pd)).transpose()?;
    let red = match build_instance(&inst) {
        Ok(r) => r,
        Err(ReductionError::ParityInfeasible(v)) if force_trivial_no => {
            let no = trivial_no_instance();
            println!("vertex {v} has odd weight; emitting trivial NO instance");
            println!("k={}", no.k);
            println!("|V(H)|={}", no.graph.vertex_count());
            if let Some(p) = prefix {
                write(&with_ext(p, "bcol"), &io::write_bcol(&no))?;
            }
            return Ok(0);
        }
        Err(e) => return Err(reduction_fail(e)),
    };
    red.check_structure().map_err(|e| Fail::new(INTERNAL, e.to_string()))?;
    println!("k={}", red.k());
    println!("|V(H)|={}", red.h().vertex_count());
    let lifted = match &pd_g {
        Some(pd_g) => {
            let (pd_h, report) = build_pd_for_h(&red, pd_g).map_err(reduction_fail)?;
            println!("width(G)={}", report.source_width);
            println!("width(H)={}", report.target_width);
            Some(pd_h)
        }
        None => None,
    };
    if let Some(p) = prefix {
        write(&with_ext(p, "bcol"), &io::write_bcol(red.target()))?;
        write(&with_ext(p, "rolemap"), &io::write_rolemap(&red))?;
        if let Some(pd_h) = &lifted {
            write(&with_ext(p, "pd"), &io::write_pd(pd_h, red.h().vertex_count()))?;
        }
    }
    Ok(0)
}

fn verify(what: Verify) -> CliResult {
    match what {
        Verify::Coloring { bcol, coloring } => {
            let inst = parse(&bcol, io::parse_bcol)?;
            let c = parse(&coloring, io::parse_coloring)?;
            match check_b_coloring(&inst, &c) {
                Ok(()) => {
                    println!("ok: b-coloring with {} colors", inst.k);
                    Ok(0)
                }
                Err(d) => {
                    println!("not a b-coloring: {d}");
                    Ok(FALSE)
                }
            }
        }
        Verify::Pd { graph, pd } => {
            let g = parse(&graph, io::parse_any_graph)?;
            let pd = parse(&pd, io::parse_pd)?;
            match validate_pd(&g, &pd) {
                Ok(()) => {
                    println!("ok: width {}", pd_width(&pd).unwrap_or(0));
                    Ok(0)
                }
                Err(v) => {
                    println!("{v}");
                    Ok(FALSE)
                }
            }
        }
        Verify::Orientation { circori, orientation } => {
            let inst = parse(&circori, io::parse_circori)?;
            let o = orientation_for(&inst, &orientation)?;
            let bad: Vec<_> = inst
                .graph()
                .vertices()
                .filter(|&v| {
                    let (mut inw, mut outw) = (0, 0);
                    for a in o.arcs().filter(|a| a.edge().contains(v)) {
                        let w = inst.weight(a.edge()).unwrap();
                        if a.head == v {
                            inw += w;
                        } else {
                            outw += w;
                        }
                    }
                    inw != outw
                })
                .collect();
            if bad.is_empty() {
                println!("ok: circulating");
                Ok(0)
            } else {
                for v in bad {
                    println!("vertex {v}: in-weight differs from out-weight");
                }
                Ok(FALSE)
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    kind: GenKind,
    seed: u64,
    n: usize,
    m: Option<usize>,
    wmax: u64,
    cycles: usize,
    density: f64,
    prefix: Option<&Path>,
) -> CliResult {
    let pre = |e: String| Fail::new(PRECONDITION, e);
    let (circori, extra) = match kind {
        GenKind::Yes => {
            let (inst, o) = gen_yes_instance(seed, n, cycles, wmax).map_err(|e| pre(e.to_string()))?;
            (io::write_circori(&inst), Some(("orientation", io::write_orientation(o.arcs()))))
        }
        GenKind::Random => {
            let m = m.unwrap_or(n + n / 2);
            let inst = gen_random_instance(seed, n, m, wmax).map_err(|e| pre(e.to_string()))?;
            (io::write_circori(&inst), None)
        }
        GenKind::Pd => {
            let w = m.unwrap_or(2);
            let (g, pd) = gen_pd_graph(seed, n, w, density).map_err(|e| pre(e.to_string()))?;
            // Weight 2 on every edge keeps vertex weights even.
            let weights = g.edges().map(|e| (e, 2)).collect();
            let inst = CircOriInstance::new(g, weights).map_err(|e| Fail::new(INTERNAL, e.to_string()))?;
            (io::write_circori(&inst), Some(("pd", io::write_pd(&pd, n))))
        }
    };
    match prefix {
        Some(p) => {
            write(&with_ext(p, "circori"), &circori)?;
            if let Some((ext, text)) = extra {
                write(&with_ext(p, ext), &text)?;
            }
        }
        None => print!("{circori}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
