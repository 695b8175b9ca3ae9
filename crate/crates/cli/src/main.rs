use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use surftile::convert::{check_pair_conditions, check_vertexset, diagram_to_vertexset, vertexset_to_diagram};
use surftile::distinctlen::two_tile_distinct_family;
use surftile::enumerate::{count_table, enumerate, CountTable, EnumSpec};
use surftile::geomfilter::{build_angle_system, check_positive_solution, edge_classes};
use surftile::render::render_svg;
use surftile::topology::{classify_surface, connectivity};
use surftile::{Diagram, Error, Mode, Surface, VertexSet};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format schema 1)");

#[derive(Parser)]
#[command(name = "surftile", version = VERSION, about = "Tilings of closed surfaces by congruent polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    General,
    Orientable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Modes {
    /// General mode for non-orientable surfaces, every split for orientable ones.
    Default,
    /// General mode plus every split for orientable surfaces.
    All,
    General,
    Orientable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Vertexset,
    Diagram,
}

#[derive(Subcommand)]
enum Command {
    /// Write one JSON record per tiling.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        #[arg(long, value_enum, default_value = "general")]
        mode: ModeArg,
        /// Number of tiles agreeing with the surface orientation.
        #[arg(long)]
        split: Option<usize>,
        #[arg(long)]
        surface: Option<Surface>,
        /// Keep tilings whose angle equations have no positive solution.
        #[arg(long)]
        no_angle_filter: bool,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Give up after this many search nodes.
        #[arg(long)]
        node_budget: Option<u64>,
    },
    /// Count tilings by number of edge lengths, as CSV.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        surface: Surface,
        #[arg(long, value_enum, default_value = "default")]
        modes: Modes,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Convert between diagram and vertex-set JSON.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Check the validity conditions of a diagram or vertex set.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also decide whether the angle equations have a positive solution.
        #[arg(long)]
        angles: bool,
    },
    /// Name the surface of a diagram or vertex set.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// List the two-tile tilings with all edge lengths distinct, as CSV.
    DistinctLengths {
        #[arg(long)]
        n: usize,
    },
    /// Draw a diagram as an SVG chord schematic.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Domain(Error),
    Io(PathBuf, io::Error),
    Usage(String),
    /// A check ran and reported problems; the report is already printed.
    Failed,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type CliResult<T = ()> = Result<T, CliError>;

enum Input {
    Diagram(Diagram),
    VertexSet(VertexSet),
}

impl Input {
    fn read(path: &Path) -> CliResult<Input> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Io(path.into(), e))?;
            s
        } else {
            fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
        if value.get("pairs").is_some() {
            Ok(Input::Diagram(Diagram::from_json(&text)?))
        } else if value.get("vertices").is_some() {
            Ok(Input::VertexSet(VertexSet::from_json(&text)?))
        } else {
            Err(Error::Parse(format!("{} holds neither a diagram nor a vertex set", path.display())).into())
        }
    }

    fn into_diagram(self) -> CliResult<Diagram> {
        match self {
            Input::Diagram(d) => Ok(d),
            Input::VertexSet(v) => Ok(vertexset_to_diagram(&v)?),
        }
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| CliError::Io(p.into(), e)),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::Io("<stdout>".into(), e)),
    }
}

fn enumeration_mode(mode: ModeArg, f: usize, split: Option<usize>) -> CliResult<Mode> {
    match (mode, split) {
        (ModeArg::General, None) => Ok(Mode::General),
        (ModeArg::General, Some(_)) => Err(CliError::Usage("--split only applies to --mode orientable".into())),
        (ModeArg::Orientable, Some(s)) => Ok(Mode::orientable(f, s)?),
        (ModeArg::Orientable, None) => Err(CliError::Usage("--mode orientable needs --split".into())),
    }
}

fn table_modes(modes: Modes, f: usize, surface: Surface) -> Vec<Mode> {
    let splits = || (f.div_ceil(2)..=f).rev().map(|split| Mode::Orientable { split });
    match (modes, surface.orientable) {
        (Modes::Default, false) | (Modes::General, _) | (Modes::All, false) => vec![Mode::General],
        (Modes::Default, true) | (Modes::Orientable, _) => splits().collect(),
        (Modes::All, true) => std::iter::once(Mode::General).chain(splits()).collect(),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Enumerate {
            n,
            f,
            mode,
            split,
            surface,
            no_angle_filter,
            out,
            threads,
            node_budget,
        } => {
            let mut spec = EnumSpec::new(n, f, enumeration_mode(mode, f, split)?);
            spec.target = surface;
            spec.require_angle_feasible = !no_angle_filter;
            spec.threads = threads;
            spec.node_budget = node_budget;
            let (records, outcome) = match enumerate(&spec) {
                Ok(records) => (records, Ok(())),
                Err(Error::BudgetExceeded(partial)) => {
                    for c in &partial.completed {
                        eprintln!("completed subtree [{}]: {} records", c.prefix.join(" "), c.records);
                    }
                    eprintln!("{} subtrees not finished", partial.pending);
                    let records = partial.records.clone();
                    (records, Err(Error::BudgetExceeded(partial).into()))
                }
                Err(e) => return Err(e.into()),
            };
            let mut text = String::new();
            for r in &records {
                text.push_str(&r.to_json());
                text.push('\n');
            }
            write_output(out.as_deref(), &text)?;
            if out.is_some() {
                eprintln!("{} tilings", records.len());
            }
            outcome
        }
        Command::Table {
            n,
            f,
            surface,
            modes,
            threads,
        } => {
            let mut table = CountTable::new();
            for mode in table_modes(modes, f, surface) {
                let mut spec = EnumSpec::new(n, f, mode).target(surface);
                spec.threads = threads;
                table.merge(count_table(&spec)?);
            }
            write_output(None, &table.to_csv())
        }
        Command::Convert { input, to } => {
            let text = match (Input::read(&input)?, to) {
                (Input::Diagram(d), Target::Vertexset) => diagram_to_vertexset(&d).to_json(),
                (Input::VertexSet(v), Target::Diagram) => vertexset_to_diagram(&v)?.to_json(),
                (Input::Diagram(d), Target::Diagram) => d.to_json(),
                (Input::VertexSet(v), Target::Vertexset) => v.to_json(),
            };
            write_output(None, &(text + "\n"))
        }
        Command::Check { input, angles } => {
            let (vertices, mut report) = match Input::read(&input)? {
                Input::Diagram(d) => (diagram_to_vertexset(&d), check_pair_conditions(&d)),
                Input::VertexSet(v) => {
                    let report = check_vertexset(&v);
                    (v, report)
                }
            };
            let mut ok = report.passed();
            if ok {
                let d = vertexset_to_diagram(&vertices)?;
                if !connectivity(&d) {
                    report.push("connected", "the tiles do not form a single surface");
                    ok = false;
                }
            }
            println!("conditions: {report}");
            if angles {
                let verdict = check_positive_solution(&build_angle_system(&vertices));
                match verdict.witness_strings() {
                    Some(w) => {
                        println!("angles: feasible");
                        let parts: Vec<String> = w.iter().enumerate().map(|(i, x)| format!("[{i}]={x}")).collect();
                        println!("witness (units of 2pi): {}", parts.join(" "));
                    }
                    None => {
                        println!("angles: infeasible (no positive solution)");
                        ok = false;
                    }
                }
            }
            if ok {
                Ok(())
            } else {
                Err(CliError::Failed)
            }
        }
        Command::Classify { input } => {
            let d = Input::read(&input)?.into_diagram()?;
            let s = classify_surface(&d)?;
            let orientation = if s.orientable { "orientable" } else { "nonorientable" };
            println!(
                "{}, chi={}, {orientation}, edge_classes={}",
                s.name,
                s.chi,
                edge_classes(&d).count()
            );
            Ok(())
        }
        Command::DistinctLengths { n } => {
            let mut text = String::from("tau,indices,surface,chi\n");
            for m in two_tile_distinct_family(n)? {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    m.twisted.tau(),
                    m.twisted,
                    m.surface.name,
                    m.surface.chi
                ));
            }
            write_output(None, &text)
        }
        Command::Render { input, out } => {
            let d = Input::read(&input)?.into_diagram()?;
            write_output(out.as_deref(), &render_svg(&d))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed) => ExitCode::from(1),
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
