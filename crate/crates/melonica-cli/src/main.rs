//! `melonica` — exact colored-graph combinatorics from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 input/parse problem, 3 size guard,
//! 4 internal consistency (a verification suite or formula check failed).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use melonica::error::Error;
use melonica::series::{n1_integral_oracle, BigRational};
use melonica::verify::{run_suite, SuiteParams};
use melonica::{
    amplitude_exponent, cell_complex, degree, enumerate_bubbles, enumerate_closures,
    estimate_critical_point, free_energy_series, gaussian_expectation, is_manifold, jackets,
    melons_by_insertion, reduce, BubbleCatalog, ColoredGraph, ModelSpec,
};
use num::rational::Ratio;
use num::ToPrimitive;
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "melonica",
    version,
    about = "Exact combinatorics of closed edge-colored graphs: degrees, jackets, melons, topology and perturbative series"
)]
struct Cli {
    /// Worker threads for parallel enumeration (defaults to all cores).
    /// Output is independent of this setting.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write a run manifest (inputs with digests, version, seed, wall time)
    /// to this path on success
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate connected bubble classes with the given color count and size
    EnumerateBubbles {
        /// Number of colors of the bubbles
        #[arg(long = "D")]
        d: usize,
        /// Half the number of vertices
        #[arg(long)]
        p: usize,
        /// Also tag each entry with its class under color-permuting
        /// equivalence (reporting only; classes keep colors fixed)
        #[arg(long = "mod-colors")]
        mod_colors: bool,
        /// Write the catalog JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Close a multiset of catalog bubbles with every color-0 pairing
    EnumerateClosures {
        /// Catalog file produced by enumerate-bubbles
        #[arg(long)]
        bubbles: PathBuf,
        /// Comma-separated 0-based catalog indices, one per bubble copy
        #[arg(long)]
        ids: String,
        /// Keep connected closures only
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree, jacket genera, face count and large-N exponent of a graph
    Degree {
        /// Graph JSON file
        #[arg(long)]
        input: PathBuf,
        /// With `--report jackets`, include one record per jacket
        #[arg(long)]
        report: Option<String>,
    },
    /// Count melonic classes, or reduce a graph by dipole removal
    Melons {
        #[arg(long = "D")]
        d: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        /// Count melonic classes by both generators and report tree counts
        #[arg(long)]
        count: bool,
        /// Graph to reduce instead
        #[arg(long)]
        input: Option<PathBuf>,
        /// Run the dipole reduction on --input
        #[arg(long)]
        reduce: bool,
        /// Write the reduction trace JSON here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Ratio-test estimate of the critical point of the tree series
    Critical {
        #[arg(long = "D")]
        d: usize,
        #[arg(long = "max-p")]
        max_p: usize,
    },
    /// Cell counts, Euler characteristic and link genera of a 4-colored graph
    Topology {
        #[arg(long)]
        input: PathBuf,
    },
    /// Exact free-energy series of a model, order by order
    Series {
        /// Model JSON: {"D": 3, "couplings": [{"graph": {...}} | {"id": k}]},
        /// with an optional top-level "catalog" path for id references
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        order: usize,
        /// Evaluate coefficients at N = 1 (the only exact specialization)
        #[arg(long = "N")]
        n: Option<i64>,
        /// Write the CSV table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full per-class ledger as JSON
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Independent oracles: the N=1 integral series and Gaussian moments
    Oracle {
        /// Print the N=1 free-energy series of the quartic model
        #[arg(long)]
        n1: bool,
        #[arg(long)]
        order: Option<usize>,
        /// Gaussian expectation of the bubble in this graph file
        #[arg(long)]
        gaussian: Option<PathBuf>,
    },
    /// Run a named verification suite: degree-formula, theorem2, fixtures,
    /// melonic, topology, series, criticality, unitary, or all
    Verify {
        #[arg(long)]
        suite: String,
        /// Exhaustive size ceiling
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Randomized spot-check count
        #[arg(long)]
        samples: Option<usize>,
    },
}

struct RunLog {
    inputs: Vec<(String, String)>,
    seed: Option<u64>,
}

impl RunLog {
    fn new() -> Self {
        RunLog {
            inputs: Vec::new(),
            seed: None,
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let mut digest = String::new();
        for byte in hasher.finalize() {
            let _ = write!(digest, "{:02x}", byte);
        }
        self.inputs.push((path.display().to_string(), digest));
        Ok(text)
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e))),
        None => {
            println!("{}", content.trim_end());
            Ok(())
        }
    }
}

fn ratio_string(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn big_ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn run(command: &Command, log: &mut RunLog) -> Result<(), Error> {
    match command {
        Command::EnumerateBubbles {
            d,
            p,
            mod_colors,
            out,
        } => {
            let catalog = enumerate_bubbles(*d, *p)?;
            write_or_print(out, &catalog.to_json_opts(*mod_colors))
        }
        Command::EnumerateClosures {
            bubbles,
            ids,
            connected,
            out,
        } => {
            let text = log.read(bubbles)?;
            let graphs = BubbleCatalog::graphs_from_json(&text)?;
            let mut selection = Vec::new();
            for part in ids.split(',') {
                let idx: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad catalog id '{}'", part)))?;
                let graph = graphs
                    .get(idx)
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("catalog id {} out of range", idx)))?;
                selection.push(graph);
            }
            let catalog = enumerate_closures(&selection, *connected)?;
            write_or_print(out, &catalog.to_json())
        }
        Command::Degree { input, report } => {
            let g = ColoredGraph::decode(&log.read(input)?)?;
            let summary = degree(&g)?;
            let d = g.num_colors() - 1;
            let exponent = amplitude_exponent(&g, d)?;
            let mut doc = json!({
                "omega": summary.omega,
                "jacket_genera": summary.jacket_genera,
                "faces": summary.face_total,
                "exponent": exponent.to_string(),
            });
            if report.as_deref() == Some("jackets") {
                let detail: Vec<_> = jackets(&g)?
                    .into_iter()
                    .map(|j| {
                        json!({
                            "cycle": j.cycle,
                            "faces": j.face_count,
                            "genus": j.genus,
                        })
                    })
                    .collect();
                doc["jackets"] = json!(detail);
            }
            println!("{}", doc);
            Ok(())
        }
        Command::Melons {
            d,
            p,
            count,
            input,
            reduce: do_reduce,
            trace,
        } => {
            if *count {
                let d = d.ok_or_else(|| Error::Parse("--count needs --D".into()))?;
                let p = p.ok_or_else(|| Error::Parse("--count needs --p".into()))?;
                let by_filter = melonica::count_melons_exhaustive(d, p)?;
                let by_insertion = melons_by_insertion(d, p)?.len() as u64;
                if by_filter != by_insertion {
                    return Err(Error::CheckFailed(format!(
                        "melon generators disagree: degree filter {} vs insertion {}",
                        by_filter, by_insertion
                    )));
                }
                let trees = melonica::count_colored_trees(d, p);
                println!(
                    "{}",
                    json!({
                        "D": d,
                        "p": p,
                        "melon_classes": by_filter,
                        "insertion_classes": by_insertion,
                        "colored_trees": trees.to_string(),
                    })
                );
                Ok(())
            } else if *do_reduce {
                let input = input
                    .as_ref()
                    .ok_or_else(|| Error::Parse("--reduce needs --input".into()))?;
                let g = ColoredGraph::decode(&log.read(input)?)?;
                let result = reduce(&g)?;
                if let Some(path) = trace {
                    let doc = json!({
                        "is_melonic": result.is_melonic,
                        "steps": result.steps,
                        "terminal": serde_json::from_str::<serde_json::Value>(
                            &result.terminal.encode()
                        ).expect("graph encodes to valid JSON"),
                    });
                    std::fs::write(path, serde_json::to_string_pretty(&doc).expect("serializable"))
                        .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
                }
                println!(
                    "{}",
                    json!({
                        "is_melonic": result.is_melonic,
                        "removals": result.steps.len(),
                        "terminal_p": result.terminal.p(),
                    })
                );
                Ok(())
            } else {
                Err(Error::Parse(
                    "melons needs either --count (with --D, --p) or --reduce (with --input)".into(),
                ))
            }
        }
        Command::Critical { d, max_p } => {
            let est = estimate_critical_point(*d, *max_p)?;
            let estimate = est.estimate();
            println!(
                "{}",
                json!({
                    "D": d,
                    "max_p": max_p,
                    "lower": big_ratio_string(&est.lower),
                    "upper": big_ratio_string(&est.upper),
                    "estimate": big_ratio_string(&estimate),
                    "lower_float": est.lower.to_f64(),
                    "upper_float": est.upper.to_f64(),
                    "estimate_float": estimate.to_f64(),
                })
            );
            Ok(())
        }
        Command::Topology { input } => {
            let g = ColoredGraph::decode(&log.read(input)?)?;
            let cells = cell_complex(&g)?;
            let links = is_manifold(&g)?;
            println!(
                "{}",
                json!({
                    "chi": cells.chi,
                    "cells": [cells.c0, cells.c1, cells.c2, cells.c3],
                    "links": links.links,
                    "is_manifold": links.is_manifold,
                })
            );
            Ok(())
        }
        Command::Series {
            model,
            order,
            n,
            out,
            ledger,
        } => {
            let model_dir = model.parent().map(Path::to_path_buf).unwrap_or_default();
            let text = log.read(model)?;
            let spec = ModelSpec::from_json(&text, |rel| {
                let path = model_dir.join(rel);
                std::fs::read_to_string(&path)
                    .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
            })?;
            let table = free_energy_series(&spec, *order, true)?;
            if let Some(n) = n {
                if *n != 1 {
                    return Err(Error::Parse(
                        "only --N 1 is supported: other integer N make rational exponents \
                         irrational; use the symbolic CSV instead"
                            .into(),
                    ));
                }
                let rows: Vec<_> = table
                    .n1_coefficients()
                    .into_iter()
                    .map(|(order, value)| {
                        json!({"order": order, "coefficient": big_ratio_string(&value)})
                    })
                    .collect();
                println!("{}", json!(rows));
            } else {
                write_or_print(out, &table.to_csv())?;
            }
            if let Some(path) = ledger {
                let docs: Vec<_> = table
                    .blocks
                    .iter()
                    .flat_map(|block| {
                        block.ledger.iter().map(move |entry| {
                            json!({
                                "order": block.order,
                                "multi_degree": block.multi_degree,
                                "class": entry.class_key,
                                "multiplicity": entry.multiplicity,
                                "sign": entry.sign,
                                "exponent": ratio_string(&entry.exponent),
                                "aut_order": entry.aut_order,
                                "omega": entry.omega,
                            })
                        })
                    })
                    .collect();
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&docs).expect("serializable"),
                )
                .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
            }
            Ok(())
        }
        Command::Oracle {
            n1,
            order,
            gaussian,
        } => {
            if let Some(path) = gaussian {
                let g = ColoredGraph::decode(&log.read(path)?)?;
                let poly = gaussian_expectation(&g, g.num_colors())?;
                println!(
                    "{}",
                    json!({
                        "display": poly.to_string(),
                        "terms": poly.to_json_map(),
                    })
                );
                return Ok(());
            }
            if *n1 {
                let order = order.ok_or_else(|| Error::Parse("--n1 needs --order".into()))?;
                let quartic =
                    ColoredGraph::new(3, vec![vec![0, 1], vec![0, 1], vec![1, 0]])?;
                let model = ModelSpec::new(
                    3,
                    vec![melonica::Coupling {
                        bubble: quartic,
                        label: "quartic".into(),
                    }],
                )?;
                let values: Vec<String> = n1_integral_oracle(&model, order)?
                    .iter()
                    .map(big_ratio_string)
                    .collect();
                println!("{}", json!(values));
                return Ok(());
            }
            Err(Error::Parse(
                "oracle needs --n1 --order K or --gaussian bubble.json".into(),
            ))
        }
        Command::Verify {
            suite,
            p,
            seed,
            samples,
        } => {
            let mut params = SuiteParams::default();
            if let Some(p) = p {
                params.max_p = *p;
            }
            if let Some(seed) = seed {
                params.seed = *seed;
            }
            if let Some(samples) = samples {
                params.samples = *samples;
            }
            log.seed = Some(params.seed);
            let lines = run_suite(suite, params)?;
            for line in lines {
                println!("{}", line);
            }
            println!("verify {}: all checks passed", suite);
            Ok(())
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SizeLimitExceeded { .. } => 3,
        Error::FormulaMismatch { .. } | Error::CheckFailed(_) => 4,
        _ => 2,
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::EnumerateBubbles { .. } => "enumerate-bubbles",
        Command::EnumerateClosures { .. } => "enumerate-closures",
        Command::Degree { .. } => "degree",
        Command::Melons { .. } => "melons",
        Command::Critical { .. } => "critical",
        Command::Topology { .. } => "topology",
        Command::Series { .. } => "series",
        Command::Oracle { .. } => "oracle",
        Command::Verify { .. } => "verify",
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let start = Instant::now();
    let mut log = RunLog::new();
    match run(&cli.command, &mut log) {
        Ok(()) => {
            if let Some(path) = &cli.manifest {
                let manifest = json!({
                    "subcommand": subcommand_name(&cli.command),
                    "inputs": log
                        .inputs
                        .iter()
                        .map(|(p, d)| json!({"path": p, "sha256": d}))
                        .collect::<Vec<_>>(),
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": log.seed,
                    "wall_time_ms": start.elapsed().as_millis() as u64,
                });
                if let Err(e) = std::fs::write(
                    path,
                    serde_json::to_string_pretty(&manifest).expect("serializable"),
                ) {
                    eprintln!("error: could not write manifest: {}", e);
                    std::process::exit(2);
                }
            }
        }
        Err(err) => {
            eprintln!("error: {}", err);
            std::process::exit(exit_code(&err));
        }
    }
}
