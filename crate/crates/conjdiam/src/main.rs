use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use conjdiam::error::Error;
use conjdiam::formula;
use conjdiam::group::{order_cap_from_env, Family, Group, GroupSpec};
use conjdiam::harness::{default_grid, report_to_csv, run_verification, VerifyConfig, DEFAULT_SEED};
use conjdiam::norm::{
    ball, conjugacy_classes, delta_n, delta_with, word_norms, Parallelism,
};
use conjdiam::parse::{parse_element, parse_set};

#[derive(Parser)]
#[command(
    name = "conjdiam",
    about = "Exact conjugacy diameters of finite p-groups with cyclic maximal subgroups",
    version
)]
struct Cli {
    /// Worker threads for the diameter search and verification
    /// (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFamily {
    #[value(alias = "d")]
    Dihedral,
    #[value(alias = "sd")]
    Semidihedral,
    #[value(alias = "q")]
    Quaternion,
    #[value(alias = "m")]
    Modular,
}

impl From<CliFamily> for Family {
    fn from(f: CliFamily) -> Family {
        match f {
            CliFamily::Dihedral => Family::Dihedral,
            CliFamily::Semidihedral => Family::Semidihedral,
            CliFamily::Quaternion => Family::Quaternion,
            CliFamily::Modular => Family::Modular,
        }
    }
}

#[derive(Args)]
struct GroupArgs {
    /// Group family.
    #[arg(long)]
    family: CliFamily,
    /// Presentation index n (rotation order for dihedral groups).
    #[arg(long)]
    n: u32,
    /// Prime p (modular groups only; the 2-group families fix p = 2).
    #[arg(long, default_value_t = 2)]
    p: u64,
}

impl GroupArgs {
    fn spec(&self) -> GroupSpec {
        GroupSpec { family: self.family.into(), n: self.n, p: self.p }
    }

    fn build(&self) -> Result<Group, Error> {
        Group::build_with_cap(self.spec(), order_cap_from_env())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print order, presentation data and predicted diameter.
    Info {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        json: bool,
    },
    /// List the conjugacy classes.
    Classes {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        json: bool,
    },
    /// Word norm of one element with respect to a set.
    Norm {
        #[command(flatten)]
        group: GroupArgs,
        /// Generating set, e.g. "b ; a".
        #[arg(long)]
        set: String,
        #[arg(long)]
        element: String,
    },
    /// Elements of the ball B_S(k).
    Ball {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        set: String,
        #[arg(long)]
        radius: u32,
    },
    /// Conjugacy diameter Δ(G), or Δ_n(G) with --max-set-size.
    Delta {
        #[command(flatten)]
        group: GroupArgs,
        /// Compute Δ_n over sets of at most this size instead of Δ.
        #[arg(long)]
        max_set_size: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification campaign over the default grid.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Report BFS and diameter-search throughput for one group.
    Bench {
        #[command(flatten)]
        group: GroupArgs,
        /// Repetitions per measurement.
        #[arg(long, default_value_t = 50)]
        iterations: u32,
    },
}

fn parallelism(threads: Option<usize>) -> Parallelism {
    match threads {
        Some(1) => Parallelism::Sequential,
        _ => Parallelism::default(),
    }
}

fn configure_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn format_set(g: &Group, set: &[conjdiam::Element]) -> String {
    let words: Vec<String> = set.iter().map(|&e| g.format_element(e)).collect();
    format!("{{{}}}", words.join(", "))
}

fn run(cli: Cli) -> Result<u8, Error> {
    configure_threads(cli.threads);
    let mode = parallelism(cli.threads);
    match cli.command {
        Command::Info { group, json } => {
            let g = group.build()?;
            let spec = *g.spec();
            let predicted = formula::predicted_delta(&spec)?;
            let classes = conjugacy_classes(&g);
            if json {
                let value = serde_json::json!({
                    "label": spec.label(),
                    "spec": spec,
                    "order": g.order(),
                    "ord_a": g.ord_a(),
                    "ord_b": g.ord_b(),
                    "action_exponent": g.action_exponent(),
                    "num_classes": classes.num_classes(),
                    "predicted_delta": predicted,
                });
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            } else {
                println!("group {}", spec.label());
                println!("order {}", g.order());
                println!("ord(a)={} ord_b={}", g.ord_a(), g.ord_b());
                println!("b^-1 a b = a^{}", g.action_exponent());
                println!("classes {}", classes.num_classes());
                println!("predicted delta {predicted}");
            }
        }
        Command::Classes { group, json } => {
            let g = group.build()?;
            let classes = conjugacy_classes(&g);
            let listed: Vec<Vec<String>> = (0..classes.num_classes())
                .map(|cid| {
                    classes
                        .class_members(cid)
                        .into_iter()
                        .map(|i| g.format_element(g.at(i)))
                        .collect()
                })
                .collect();
            if json {
                println!("{}", serde_json::to_string_pretty(&listed).unwrap());
            } else {
                for members in listed {
                    println!("{{{}}}", members.join(", "));
                }
            }
        }
        Command::Norm { group, set, element } => {
            let g = group.build()?;
            let s = parse_set(&set, &g)?;
            let e = parse_element(&element, &g)?;
            let profile = word_norms(&g, &s)?;
            match profile.norm(g.index(e)) {
                Some(v) => println!("{v}"),
                None => {
                    return Err(Error::NotFound(format!(
                        "{} is outside the normal closure of {}",
                        g.format_element(e),
                        format_set(&g, &s)
                    )))
                }
            }
        }
        Command::Ball { group, set, radius } => {
            let g = group.build()?;
            let s = parse_set(&set, &g)?;
            let b = ball(&g, &s, radius);
            println!("|B({radius})| = {}", b.len());
            let words: Vec<String> = b.iter().map(|&e| g.format_element(e)).collect();
            println!("{{{}}}", words.join(", "));
        }
        Command::Delta { group, max_set_size, json } => {
            let g = group.build()?;
            match max_set_size {
                Some(n) => {
                    let value = delta_n(&g, n)?;
                    if json {
                        println!("{}", serde_json::to_string_pretty(&value).unwrap());
                    } else {
                        println!(
                            "delta_{n}={} witness={}",
                            value.value,
                            format_set(&g, &value.witness)
                        );
                    }
                }
                None => {
                    let report = delta_with(&g, mode)?;
                    if json {
                        println!("{}", serde_json::to_string_pretty(&report).unwrap());
                    } else {
                        println!(
                            "delta={} predicted={} match={}",
                            report.delta.value,
                            report.predicted,
                            if report.matches { "yes" } else { "no" }
                        );
                        println!("witness={}", format_set(&g, &report.delta.witness));
                    }
                }
            }
        }
        Command::Verify { seed, json, csv } => {
            let config = VerifyConfig { seed, mode, order_cap: order_cap_from_env() };
            let report = run_verification(&default_grid(), &config)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else if csv {
                print!("{}", report_to_csv(&report));
            } else {
                for r in &report.records {
                    let suites_ok = r.suites.iter().all(|s| s.pass);
                    println!(
                        "{:<8} order {:>4}  delta={} predicted={} match={} delta2={} suites={}",
                        r.label,
                        r.order,
                        r.delta,
                        r.predicted,
                        if r.matches { "yes" } else { "no" },
                        r.delta2,
                        if suites_ok { "pass" } else { "FAIL" }
                    );
                }
                println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
            }
            if !report.pass {
                return Ok(1);
            }
        }
        Command::Bench { group, iterations } => {
            let g = group.build()?;
            let s = [g.gen_a(), g.gen_b()];
            let start = Instant::now();
            for _ in 0..iterations {
                std::hint::black_box(word_norms(&g, &s)?);
            }
            let bfs = start.elapsed();
            let visited = g.order() as f64 * iterations as f64;
            println!("bfs: {:.0} elements/s", visited / bfs.as_secs_f64());

            let start = Instant::now();
            let mut candidates = 0u64;
            for _ in 0..iterations {
                let report = delta_with(&g, mode)?;
                candidates += report.candidates;
                std::hint::black_box(report);
            }
            let search = start.elapsed();
            println!(
                "delta search: {:.0} candidates/s",
                candidates as f64 / search.as_secs_f64()
            );
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
