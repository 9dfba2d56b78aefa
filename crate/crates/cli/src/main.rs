use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use nodal_clifford::constructions::{self, CorpusSpec, Family};
use nodal_clifford::graph::{bridge_forest, bridges, DualGraph, VertexId};
use nodal_clifford::harness;
use nodal_clifford::multidegree::{self, Multidegree};
use nodal_clifford::text;
use nodal_clifford::RationalCurveModel;

#[derive(Parser)]
#[command(
    name = "nodal-clifford",
    version,
    about = "Clifford-type bounds for line bundles on nodal curves"
)]
struct Cli {
    /// Seed for every random choice; equal seeds give identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, (semi)stability, bridges, leaf count and canonical multidegree.
    Analyze(GraphSource),
    /// List uniform multidegrees, or stable ones of a given total degree.
    Enumerate {
        #[command(flatten)]
        source: GraphSource,
        /// List stable multidegrees of this total degree instead.
        #[arg(long)]
        stable: Option<i64>,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Dimension of the space of global sections of a bundle file.
    H0 { bundle: PathBuf },
    /// The Dhar decomposition from a vertex.
    Dhar {
        #[command(flatten)]
        source: GraphSource,
        /// Multidegree as `<vertex>:<int> ...`, or a path to a multidegree file.
        #[arg(long)]
        multidegree: String,
        /// Starting vertex id.
        #[arg(long)]
        vertex: u32,
    },
    /// Print a bundle attaining the uniform Clifford bound.
    Extremal(GraphSource),
    /// Run a verification campaign and emit a JSON report.
    Verify {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, value_enum, default_value_t = Campaign::Clifford)]
        check: Campaign,
        /// Random gluings per multidegree (bundles per check for `lemmas`).
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write witness bundles for exceeding and sharp entries here.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Estimate the Clifford index over structured and sampled bundles.
    Index {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Campaign {
    Clifford,
    Generic,
    Lemmas,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Cycle,
    Theta,
    #[value(alias = "star_of_cycles")]
    StarOfCycles,
    Random,
}

/// A graph file or a named family.
#[derive(Args)]
struct GraphSource {
    /// Graph or bundle file.
    #[arg(conflicts_with = "family")]
    file: Option<PathBuf>,
    #[arg(long)]
    family: Option<FamilyName>,
    /// Cycle length for `cycle`.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Edge count for `theta`.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Leaves for `star-of-cycles`.
    #[arg(long, default_value_t = 3)]
    leaves: usize,
    /// Cycle length for `star-of-cycles`.
    #[arg(long, default_value_t = 2)]
    cycle_len: usize,
    /// Vertices for `random`.
    #[arg(long, default_value_t = 4)]
    vertices: usize,
    /// Edges for `random`.
    #[arg(long, default_value_t = 6)]
    edges: usize,
    /// Random distinct node coordinates instead of 0, 1, 2, ...
    #[arg(long)]
    random_coords: bool,
}

impl GraphSource {
    fn graph(&self, seed: u64) -> Result<DualGraph> {
        if let Some(path) = &self.file {
            let content = read(path)?;
            return text::parse_graph(&content).with_context(|| path.display().to_string());
        }
        let Some(name) = self.family else {
            bail!("give a graph file or --family");
        };
        let family = match name {
            FamilyName::Cycle => Family::Cycle { n: self.n },
            FamilyName::Theta => Family::Theta { k: self.k },
            FamilyName::StarOfCycles => Family::StarOfCycles {
                leaves: self.leaves,
                cycle_len: self.cycle_len,
            },
            FamilyName::Random => Family::Random {
                vertices: self.vertices,
                edges: self.edges,
            },
        };
        Ok(CorpusSpec::new(family, seed).graph()?)
    }

    fn model(&self, seed: u64) -> Result<Arc<RationalCurveModel>> {
        let g = self.graph(seed)?;
        let model = if self.random_coords {
            constructions::with_random_coords(&g, seed)?
        } else {
            RationalCurveModel::with_default_coords(g)?
        };
        Ok(Arc::new(model))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn ids(g: &DualGraph, set: &[usize]) -> String {
    let list: Vec<String> = set.iter().map(|&v| g.vertex_id(v).to_string()).collect();
    format!("{{{}}}", list.join(", "))
}

fn analyze(g: &DualGraph) {
    let bridge_ids: Vec<String> = bridges(g)
        .iter()
        .map(|&j| g.edge(j).id.to_string())
        .collect();
    println!("vertices {}", g.vertex_count());
    println!("edges {}", g.edge_count());
    println!("genus {}", g.genus());
    println!("connected {}", g.is_connected());
    println!("semistable {}", g.is_semistable());
    println!("stable {}", g.is_stable());
    println!("bridges {{{}}}", bridge_ids.join(", "));
    println!("leaves {}", bridge_forest(g).leaf_count());
    print!(
        "canonical {}",
        text::write_multidegree(g, &g.canonical_multidegree())
    );
}

fn parse_inline_multidegree(arg: &str, g: &DualGraph) -> Result<Multidegree> {
    let path = Path::new(arg);
    let content = if path.exists() {
        read(path)?
    } else {
        format!("multidegree {arg}")
    };
    Ok(text::parse_multidegree(&content, g)?)
}

fn emit(json: String, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
        }
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Analyze(source) => analyze(&source.graph(seed)?),
        Command::Enumerate {
            source,
            stable,
            count,
        } => {
            let g = source.graph(seed)?;
            let list: Box<dyn Iterator<Item = Multidegree>> = match stable {
                Some(total) => Box::new(multidegree::enumerate_stable(&g, total)?),
                None => Box::new(multidegree::enumerate_uniform(&g)),
            };
            if count {
                println!("{}", list.count());
            } else {
                for d in list {
                    print!("{}", text::write_multidegree(&g, &d));
                }
            }
        }
        Command::H0 { bundle } => {
            let b = text::parse_bundle(&read(&bundle)?)
                .with_context(|| bundle.display().to_string())?;
            println!("{}", b.h0());
        }
        Command::Dhar {
            source,
            multidegree,
            vertex,
        } => {
            let g = source.graph(seed)?;
            let d = parse_inline_multidegree(&multidegree, &g)?;
            let v = g
                .vertex_index(VertexId(vertex))
                .with_context(|| format!("unknown vertex {vertex}"))?;
            let chain = multidegree::dhar_chain(&g, &d, v);
            for (i, stage) in chain.iter().enumerate() {
                println!("H{i} {}", ids(&g, stage));
            }
            let last = chain.last().expect("nonempty chain");
            println!("whole {}", last.len() == g.vertex_count());
        }
        Command::Extremal(source) => {
            let m = source.model(seed)?;
            let b = constructions::extremal_bundle(&m)?;
            print!("{}", text::write_bundle(&b));
        }
        Command::Verify {
            source,
            check,
            samples,
            out,
            witness_dir,
        } => {
            let m = source.model(seed)?;
            let json = match check {
                Campaign::Lemmas => {
                    let config = harness::LemmaConfig {
                        random_bundles: samples,
                        ..Default::default()
                    };
                    let report = harness::verify_lemmas_with(&m, seed, config);
                    for c in &report.checks {
                        eprintln!(
                            "{:<28} cases {:>6} failures {}",
                            c.name, c.cases, c.failures
                        );
                    }
                    serde_json::to_string_pretty(&report)?
                }
                Campaign::Clifford | Campaign::Generic => {
                    let mut report = match check {
                        Campaign::Clifford => harness::verify_clifford(&m, samples, seed),
                        _ => harness::verify_generic(&m, samples, seed),
                    };
                    if let Some(dir) = &witness_dir {
                        fs::create_dir_all(dir)?;
                        let n = report.write_witnesses(dir, true)?;
                        eprintln!("wrote {n} witness files to {}", dir.display());
                    }
                    eprintln!(
                        "{} multidegrees, {} exceedances, {} sharp",
                        report.entries.len(),
                        report.exceedances,
                        report.sharp_count
                    );
                    serde_json::to_string_pretty(&report)?
                }
            };
            emit(json, out.as_deref())?;
        }
        Command::Index { source, samples } => {
            let m = source.model(seed)?;
            let estimate = harness::clifford_index_estimate(&m, samples, seed)?;
            match (estimate.value, &estimate.witness) {
                (Some(value), Some(witness)) => {
                    println!("index {value}");
                    print!("{}", text::write_bundle(witness));
                }
                _ => println!("index inf"),
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
