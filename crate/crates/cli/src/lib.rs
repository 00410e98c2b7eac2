//! Command-line front end: instance generation, solving, covering codes,
//! volume tables, base predictions, the hitting-probability chain and a
//! CSV benchmark harness.

use std::error::Error;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use skewsearch_core::analysis::{
    format_base, markov_simulate, reach_probability, solve_lambda, success_probability_identity,
    BaseReport,
};
use skewsearch_core::covercode::{
    build_code, verify_cover, write_code, CoverCheck, DEFAULT_BLOCK_CAP, DEFAULT_VERIFY_CAP,
};
use skewsearch_core::formula::{
    brute_force_solve_capped, format_witness, generate_random, parse_instance, serialize_instance,
    Assignment, Formula, RandomParams, Witness, DEFAULT_BRUTE_FORCE_CAP,
};
use skewsearch_core::search::{
    default_steps_multiplier, det_solve_jobs, det_solve_with_code, schoening_solve, substream,
    Outcome, SchoeningOptions, SolveResult,
};
use skewsearch_core::volume::{ratio, shell_counts, to_f64, upper_bound};
use skewsearch_core::ColorGraph;

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;

type Result<T> = std::result::Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Debug, Parser)]
#[command(
    name = "skewsearch",
    version,
    about = "Local search for (d,k)-CSP over color-graph distances"
)]
pub struct Cli {
    /// Suppress `c` comment lines.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Only keep constraints satisfied by a random hidden assignment.
        #[arg(long)]
        planted: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Solve an instance file.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Det)]
        method: Method,
        #[arg(long, default_value = "cycle")]
        graph: GraphArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        /// Walk length per repetition is this times n; default 3(d-1).
        #[arg(long = "steps-mult")]
        steps_mult: Option<u64>,
        #[arg(long = "block-cap", default_value_t = DEFAULT_BLOCK_CAP)]
        block_cap: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Cross-check the answer against exhaustive search.
        #[arg(long = "verify-oracle")]
        verify_oracle: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Build the covering code the deterministic solver would use.
    Code {
        #[arg(long, default_value = "cycle")]
        graph: GraphArg,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "block-cap", default_value_t = DEFAULT_BLOCK_CAP)]
        block_cap: u64,
        /// Check coverage exhaustively.
        #[arg(long)]
        verify: bool,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Shell counts and ball volume in the product graph.
    Volume {
        #[arg(long, default_value = "cycle")]
        graph: GraphArg,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        /// Ball radius; defaults to the full diameter.
        #[arg(long)]
        r: Option<usize>,
        /// Weight `p/q` for radius selection and the upper bound.
        #[arg(long)]
        x: Option<Fraction>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Per-variable running-time bases.
    Predict {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        /// Also report the base for this graph.
        #[arg(long)]
        graph: Option<GraphArg>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Hitting probabilities of the walk's distance chain.
    Markov {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        /// Starting distance.
        #[arg(long, default_value_t = 2)]
        j: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long = "max-steps", default_value_t = 10_000)]
        max_steps: u64,
        /// Length for the success-probability identity.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Run a seeded instance family through both graphs and methods.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        instances: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        planted: bool,
        /// Restrict to one method (det or schoening).
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Restrict to one graph.
        #[arg(long)]
        graph: Option<GraphArg>,
        #[arg(long, default_value_t = 10_000)]
        reps: u64,
        #[arg(long = "steps-mult")]
        steps_mult: Option<u64>,
        #[arg(long = "block-cap", default_value_t = DEFAULT_BLOCK_CAP)]
        block_cap: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Det,
    Schoening,
    Brute,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Det => "det",
            Method::Schoening => "schoening",
            Method::Brute => "brute",
        }
    }
}

/// `complete`, `cycle`, `hypercube` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphArg {
    Complete,
    Cycle,
    Hypercube,
    File(PathBuf),
}

impl FromStr for GraphArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "complete" => Ok(GraphArg::Complete),
            "cycle" => Ok(GraphArg::Cycle),
            "hypercube" => Ok(GraphArg::Hypercube),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(GraphArg::File(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown graph `{s}`; expected complete, cycle, hypercube or file:<path>"
                )),
            },
        }
    }
}

impl GraphArg {
    pub fn label(&self) -> String {
        match self {
            GraphArg::Complete => "complete".into(),
            GraphArg::Cycle => "cycle".into(),
            GraphArg::Hypercube => "hypercube".into(),
            GraphArg::File(p) => format!("file:{}", p.display()),
        }
    }

    pub fn build(&self, d: u32) -> Result<ColorGraph> {
        Ok(match self {
            GraphArg::Complete => ColorGraph::complete(d)?,
            GraphArg::Cycle => ColorGraph::directed_cycle(d)?,
            GraphArg::Hypercube => {
                if !d.is_power_of_two() || d < 2 {
                    return Err(format!("hypercube needs d to be a power of two, got {d}").into());
                }
                ColorGraph::hypercube(d.trailing_zeros())?
            }
            GraphArg::File(p) => {
                let g = ColorGraph::parse(&read(p)?)?;
                if g.num_colors() != d {
                    return Err(
                        format!("graph file has {} colors, expected {d}", g.num_colors()).into(),
                    );
                }
                g
            }
        })
    }
}

/// Nonnegative rational written `p/q` or `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("expected a fraction like 1/6, got `{s}`");
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        if den <= 0 || num < 0 {
            return Err(bad());
        }
        Ok(Fraction { num, den })
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

struct Output {
    text: String,
    quiet: bool,
}

impl Output {
    fn new(quiet: bool) -> Self {
        Self {
            text: String::new(),
            quiet,
        }
    }

    fn comment(&mut self, line: impl AsRef<str>) {
        if !self.quiet {
            self.text.push_str("c ");
            self.text.push_str(line.as_ref());
            self.text.push('\n');
        }
    }

    fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    fn seed(&mut self, seed: Option<u64>) -> u64 {
        let seed = seed.unwrap_or_else(rand::random);
        self.comment(format!("seed {seed}"));
        seed
    }

    fn finish(self, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
        match path {
            Some(p) => std::fs::write(p, self.text).map_err(|e| format!("{}: {e}", p.display()))?,
            None => out.write_all(self.text.as_bytes())?,
        }
        Ok(())
    }
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let mut o = Output::new(cli.quiet);
    match cli.command {
        Command::Gen {
            n,
            d,
            k,
            m,
            seed,
            planted,
            output,
        } => {
            let seed = o.seed(seed);
            let hidden = planted.then(|| Assignment::random(n, d, &mut substream(seed, 1)));
            let f = generate_random(RandomParams { n, d, k, m }, seed, hidden.as_ref())?;
            if let Some(h) = &hidden {
                o.comment(format!("planted {h}"));
            }
            o.text.push_str(&serialize_instance(&f));
            o.finish(output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            instance,
            method,
            graph,
            seed,
            reps,
            steps_mult,
            block_cap,
            jobs,
            verify_oracle,
            output,
        } => {
            let f = parse_instance(&read(&instance)?)
                .map_err(|e| format!("{}: {e}", instance.display()))?;
            let g = graph.build(f.num_colors())?;
            o.comment(format!(
                "method {} graph {} n {} d {} k {} m {}",
                method.name(),
                graph.label(),
                f.num_vars(),
                f.num_colors(),
                f.width(),
                f.len()
            ));
            let res = match method {
                Method::Det => det_solve_jobs(&f, &g, block_cap, jobs)?,
                Method::Schoening => {
                    let seed = o.seed(seed);
                    let opts = SchoeningOptions {
                        repetitions: reps,
                        steps_multiplier: steps_mult
                            .unwrap_or_else(|| default_steps_multiplier(f.num_colors())),
                        seed,
                        jobs,
                    };
                    schoening_solve(&f, &g, &opts)?
                }
                Method::Brute => SolveResult {
                    outcome: match brute_force_solve_capped(&f, DEFAULT_BRUTE_FORCE_CAP)? {
                        Some(a) => Outcome::Satisfiable(a),
                        None => Outcome::Unsatisfiable,
                    },
                    stats: Default::default(),
                },
            };
            let s = &res.stats;
            o.comment(format!(
                "nodes {} balls {} reps {} steps {} max-ball-nodes {}",
                s.nodes_visited, s.balls_searched, s.repetitions, s.steps, s.max_ball_nodes
            ));
            if let Outcome::Satisfiable(a) = &res.outcome {
                if !f.is_satisfied_by(a) {
                    return Err("internal error: witness does not satisfy the instance".into());
                }
            }
            if verify_oracle {
                check_oracle(&f, &res.outcome)?;
                o.comment("oracle agrees");
            }
            o.text.push_str(&format_witness(&res.outcome.to_witness()));
            o.finish(output.as_deref(), out)?;
            Ok(match res.outcome.to_witness() {
                Witness::Satisfiable(_) => EXIT_SAT,
                Witness::Unsatisfiable => EXIT_UNSAT,
                Witness::Unknown => EXIT_OK,
            })
        }
        Command::Code {
            graph,
            d,
            n,
            k,
            block_cap,
            verify,
            output,
        } => {
            let g = graph.build(d)?;
            let code = build_code(&g, n, k, block_cap)?;
            let mut summary = Output::new(cli.quiet);
            let blocks: Vec<String> = code.blocks().iter().map(usize::to_string).collect();
            summary.comment(format!("graph {} d {d} n {n} k {k}", graph.label()));
            summary.comment(format!("blocks {}", blocks.join(" ")));
            summary.comment(format!("radius {} codewords {}", code.radius(), code.len()));
            let bound = code.size_lower_bound()?;
            summary.comment(format!("size-lower-bound {}", format_base(to_f64(&bound))));
            if verify {
                match verify_cover(&code, DEFAULT_VERIFY_CAP)? {
                    CoverCheck::Covered => summary.comment("verified covered"),
                    CoverCheck::Uncovered(p) => {
                        return Err(format!("point {p} is not covered").into())
                    }
                }
            }
            // The code file is parseable on its own, so the summary goes
            // alongside it on stdout only when the code is written to a file.
            match output {
                Some(p) => {
                    std::fs::write(&p, write_code(&code))
                        .map_err(|e| format!("{}: {e}", p.display()))?;
                    summary.finish(None, out)?;
                }
                None => {
                    o.text = write_code(&code);
                    o.finish(None, out)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Volume {
            graph,
            d,
            n,
            r,
            x,
            output,
        } => {
            let g = graph.build(d)?;
            let profile = g.profile()?;
            let table = shell_counts(&profile, n);
            let r = r.unwrap_or(table.max_radius());
            let join = |v: Vec<String>| v.join(" ");
            o.line(format!(
                "profile {}",
                join(profile.counts().iter().map(u64::to_string).collect())
            ));
            o.line(format!(
                "shells {}",
                join((0..=r).map(|i| table.shell(i).to_string()).collect())
            ));
            o.line(format!("volume {}", table.ball_volume(r)));
            if let Some(x) = x {
                let x = ratio(x.num, x.den);
                o.line(format!("best-radius {}", table.select_radius(&x)?));
                if x <= ratio(1, 1) {
                    let ub = upper_bound(&profile, n, r, &x)?;
                    o.line(format!(
                        "upper-bound {} exact {ub}",
                        format_base(to_f64(&ub))
                    ));
                }
            }
            o.finish(output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Predict {
            d,
            k,
            graph,
            output,
        } => {
            let mut report = BaseReport::new(d, k)?;
            if let Some(graph) = graph {
                let p = graph.build(d)?.profile()?;
                report = report.with_graph(&graph.label(), &p)?;
            }
            o.text.push_str(&report.to_string());
            o.finish(output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Markov {
            d,
            k,
            j,
            trials,
            max_steps,
            n,
            seed,
            output,
        } => {
            let seed = o.seed(seed);
            let sol = solve_lambda(d, k)?;
            o.line(format!(
                "lambda {:.12} residual {:.3e}",
                sol.lambda, sol.residual
            ));
            if sol.degenerate {
                o.comment("no upward drift: every start reaches 0");
            }
            let exact = reach_probability(d, k, j as u32)?;
            o.line(format!("reach j {j} exact {exact:.6}"));
            let (lhs, rhs) = success_probability_identity(d, k, n)?;
            o.line(format!("identity n {n} sum {lhs:.12e} closed {rhs:.12e}"));
            let est = markov_simulate(d, k, j, max_steps, trials, seed)?;
            let gap = (est.frequency - exact).abs();
            o.line(format!(
                "simulated {:.6} stderr {:.6} hits {} trials {} gap {gap:.6}",
                est.frequency, est.std_error, est.hits, est.trials
            ));
            o.finish(output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            n,
            d,
            k,
            m,
            instances,
            seed,
            planted,
            method,
            graph,
            reps,
            steps_mult,
            block_cap,
            jobs,
            output,
        } => {
            let seed = seed.unwrap_or_else(rand::random);
            let config = BenchConfig {
                params: RandomParams { n, d, k, m },
                instances,
                seed,
                planted,
                methods: match method {
                    Some(Method::Brute) => return Err("bench runs det and schoening only".into()),
                    Some(m) => vec![m],
                    None => vec![Method::Det, Method::Schoening],
                },
                graphs: match graph {
                    Some(g) => vec![g],
                    None => vec![GraphArg::Complete, GraphArg::Cycle],
                },
                reps,
                steps_mult,
                block_cap,
                jobs,
            };
            let csv = bench(&config)?;
            match output {
                Some(p) => {
                    std::fs::write(&p, csv).map_err(|e| format!("{}: {e}", p.display()))?;
                    o.comment(format!("seed {seed}"));
                    o.finish(None, out)?;
                }
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Errors out if the answer contradicts exhaustive search.
fn check_oracle(f: &Formula, outcome: &Outcome) -> Result<()> {
    let truth = brute_force_solve_capped(f, DEFAULT_BRUTE_FORCE_CAP)
        .map_err(|e| format!("oracle unavailable: {e}"))?;
    match (outcome, truth) {
        (Outcome::Satisfiable(_), None) => {
            Err("oracle disagrees: instance is unsatisfiable".into())
        }
        (Outcome::Unsatisfiable, Some(w)) => {
            Err(format!("oracle disagrees: {w} satisfies the instance").into())
        }
        _ => Ok(()),
    }
}

/// One instance family run through a set of graphs and methods.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub params: RandomParams,
    pub instances: u64,
    pub seed: u64,
    pub planted: bool,
    pub methods: Vec<Method>,
    pub graphs: Vec<GraphArg>,
    pub reps: u64,
    pub steps_mult: Option<u64>,
    pub block_cap: u64,
    pub jobs: usize,
}

/// CSV with columns instance, method, graph, result, nodes, balls, reps,
/// millis. Instance `i` is generated from seed `seed + i`. For the walk,
/// `nodes` counts steps taken.
pub fn bench(c: &BenchConfig) -> Result<String> {
    let RandomParams { n, d, .. } = c.params;
    let graphs = c
        .graphs
        .iter()
        .map(|g| {
            let built = g.build(d)?;
            let code = if c.methods.contains(&Method::Det) {
                Some(build_code(&built, n, c.params.k, c.block_cap)?)
            } else {
                None
            };
            Ok((g.label(), built, code))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance", "method", "graph", "result", "nodes", "balls", "reps", "millis",
    ])?;
    for i in 0..c.instances {
        let inst_seed = c.seed.wrapping_add(i);
        let hidden = c
            .planted
            .then(|| Assignment::random(n, d, &mut substream(inst_seed, 1)));
        let f = generate_random(c.params, inst_seed, hidden.as_ref())?;
        for (label, g, code) in &graphs {
            for &method in &c.methods {
                let start = Instant::now();
                let res = match method {
                    Method::Det => {
                        det_solve_with_code(&f, code.as_ref().expect("built for det"), c.jobs)?
                    }
                    _ => schoening_solve(
                        &f,
                        g,
                        &SchoeningOptions {
                            repetitions: c.reps,
                            steps_multiplier: c
                                .steps_mult
                                .unwrap_or_else(|| default_steps_multiplier(d)),
                            seed: inst_seed,
                            jobs: c.jobs,
                        },
                    )?,
                };
                let millis = start.elapsed().as_secs_f64() * 1000.0;
                let nodes = match method {
                    Method::Det => res.stats.nodes_visited,
                    _ => res.stats.steps,
                };
                let result = match res.outcome {
                    Outcome::Satisfiable(_) => "SAT",
                    Outcome::Unsatisfiable => "UNSAT",
                    Outcome::NotFound => "UNKNOWN",
                };
                w.write_record([
                    format!("s{inst_seed}"),
                    method.name().to_string(),
                    label.clone(),
                    result.to_string(),
                    nodes.to_string(),
                    res.stats.balls_searched.to_string(),
                    res.stats.repetitions.to_string(),
                    format!("{millis:.3}"),
                ])?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    Ok(String::from_utf8(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("skewsearch").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn graph_arguments() {
        assert_eq!("cycle".parse::<GraphArg>().unwrap(), GraphArg::Cycle);
        assert_eq!(
            "file:g.txt".parse::<GraphArg>().unwrap(),
            GraphArg::File("g.txt".into())
        );
        assert!("file:".parse::<GraphArg>().is_err());
        assert!("torus".parse::<GraphArg>().is_err());
        assert!(GraphArg::Hypercube.build(6).is_err());
        assert_eq!(GraphArg::Hypercube.build(8).unwrap().out_degree(), 3);
    }

    #[test]
    fn fractions() {
        assert_eq!(
            "1/6".parse::<Fraction>().unwrap(),
            Fraction { num: 1, den: 6 }
        );
        assert_eq!(
            "2".parse::<Fraction>().unwrap(),
            Fraction { num: 2, den: 1 }
        );
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("-1/2".parse::<Fraction>().is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run_str(&["solve"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(!err.is_empty());
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn volume_output() {
        let (code, out, _) = run_str(&[
            "volume", "--graph", "cycle", "--d", "3", "--n", "2", "--r", "2",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("shells 1 2 3\n"));
        assert!(out.contains("volume 6\n"));
    }
}
