use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gentle_core::dsl::emit_quiver;
use gentle_core::generate::{generate_random_instance, InstanceClass};
use gentle_core::transforms::{reflect_obstructions, Completion};
use gentle_core::*;

/// Gentle quivers with relations: invariants, reflections, classification.
#[derive(Parser)]
#[command(name = "gentle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the gentle conditions
    Validate { file: PathBuf },
    /// Print the thread invariant and the sum identities
    Invariant {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide class membership and cluster tiltedness
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Reflect at a vertex
    Reflect {
        file: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Coreflect at a vertex
    Coreflect {
        file: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Complete isolated relations into triangles
    Complete {
        file: PathBuf,
        /// comma separated relations `A:B`
        #[arg(long)]
        rels: String,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Remove one arrow from every triangle
    Model {
        file: PathBuf,
        /// remove the outer arrow of each triangle instead of the smallest one
        #[arg(long)]
        standard: bool,
    },
    /// Rewrite into a cluster tilted quiver with the same invariant
    Normalize {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(short)]
        o: Option<PathBuf>,
    },
    /// Print the Gorenstein dimension
    Gorenstein { file: PathBuf },
    /// Decide derived equivalence within the two classes
    Equiv { file1: PathBuf, file2: PathBuf },
    /// Generate a random instance of a class
    Gen {
        #[arg(long)]
        class: InstanceClass,
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short)]
        o: Option<PathBuf>,
    },
}

/// Why a command stopped; maps onto the exit codes 1, 2 and 3.
enum Failure {
    Negative(String),
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_document(path: &Path) -> Result<QuiverDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_dsl(&text).map_err(|errs| {
        let lines: Vec<String> = errs
            .iter()
            .map(|e| format!("{}:{}: {}", path.display(), e.position, e.kind))
            .collect();
        Failure::Usage(lines.join("\n"))
    })
}

/// Parses and validates; a non-gentle quiver is a negative verdict.
fn read_gentle(path: &Path) -> Result<(QuiverDocument, GentleQuiver), Failure> {
    let doc = read_document(path)?;
    match validate_gentle(&doc.body) {
        Ok(g) => Ok((doc, g)),
        Err(v) => Err(Failure::Negative(violation_lines(&v))),
    }
}

fn violation_lines(v: &[GentlenessViolation]) -> String {
    let mut s = String::from("not gentle:");
    for x in v {
        s.push_str(&format!("\n  {x}"));
    }
    s
}

fn write_output(o: Option<&Path>, text: &str) -> Outcome {
    match o {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn vertex(name: &str) -> Result<VertexId, Failure> {
    VertexId::new(name).map_err(Failure::from)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file } => {
            let (doc, g) = read_gentle(&file)?;
            println!("{}: gentle, {} vertices, {} arrows", doc.name, g.num_vertices(), g.num_arrows());
            Ok(())
        }
        Command::Invariant { file, json } => {
            let (_, g) = read_gentle(&file)?;
            if json {
                let mut r = Report::of_gentle(&g)?;
                r.classification = None;
                print!("{}", emit_report(&r));
            } else {
                let f = aag_invariant(&g)?;
                let s = check_sum_identities(&g)?;
                println!("{f}");
                println!(
                    "sum p = {} (expected {}), sum q = {} (expected {}): {}",
                    s.p_sum,
                    s.expected_p,
                    s.q_sum,
                    s.expected_q,
                    if s.ok { "ok" } else { "FAILED" }
                );
            }
            Ok(())
        }
        Command::Classify { file, json } => {
            let (_, g) = read_gentle(&file)?;
            if json {
                print!("{}", emit_report(&Report::of_gentle(&g)?));
            } else {
                print_classification(&classify(&g)?);
            }
            Ok(())
        }
        Command::Reflect { file, at, o } => rewrite(&file, &at, o.as_deref(), false),
        Command::Coreflect { file, at, o } => rewrite(&file, &at, o.as_deref(), true),
        Command::Complete { file, rels, o } => {
            let (doc, g) = read_gentle(&file)?;
            let rels = parse_rels(&rels)?;
            match complete_relations(&g, &rels)? {
                Completion::Gentle { quiver, added } => {
                    for (r, a) in &added {
                        eprintln!("{r} completed by `{a}`");
                    }
                    write_output(o.as_deref(), &emit_quiver(&doc.name, quiver.presentation()))
                }
                Completion::NotGentle { witness_orbit } => {
                    let w: Vec<String> = witness_orbit.iter().map(ToString::to_string).collect();
                    Err(Failure::Negative(format!(
                        "completion is not gentle: the whole orbit {} would be completed",
                        w.join(", ")
                    )))
                }
            }
        }
        Command::Model { file, standard } => {
            let (doc, g) = read_gentle(&file)?;
            let m = if standard {
                standard_model(&g)
            } else {
                model_of(&g).map(|(m, _)| m)
            };
            match m {
                Ok(m) => write_output(None, &emit_quiver(&doc.name, m.presentation())),
                Err(Error::Precondition(msg)) => Err(Failure::Negative(msg)),
                Err(e) => Err(e.into()),
            }
        }
        Command::Normalize { file, json, o } => {
            let (doc, g) = read_gentle(&file)?;
            let c = classify(&g)?;
            let result = if c.class_a.is_some() {
                normalize_a(&g)
            } else if c.class_atilde.is_some() {
                normalize_a_tilde(&g)
            } else {
                return Err(Failure::Negative(format!(
                    "invariant {} lies in neither class",
                    aag_invariant(&g)?
                )));
            };
            let result = match result {
                Ok(r) => r,
                Err(Error::Precondition(msg)) => return Err(Failure::Negative(msg)),
                Err(e) => return Err(e.into()),
            };
            let text = emit_quiver(&doc.name, result.final_quiver.presentation());
            if json {
                if let Some(path) = &o {
                    write_output(Some(path), &text)?;
                }
                let r = Report::of_gentle(&result.final_quiver)?.with_trace(result.trace.steps);
                print!("{}", emit_report(&r));
                Ok(())
            } else {
                for step in &result.trace.steps {
                    eprintln!("{step}");
                }
                write_output(o.as_deref(), &text)
            }
        }
        Command::Gorenstein { file } => {
            let (_, g) = read_gentle(&file)?;
            println!("{}", gorenstein_dimension(&g)?);
            Ok(())
        }
        Command::Equiv { file1, file2 } => {
            let (_, g1) = read_gentle(&file1)?;
            let (_, g2) = read_gentle(&file2)?;
            match derived_equivalent(&g1, &g2)? {
                EquivalenceVerdict::EquivalentInClass => {
                    println!("derived equivalent");
                    Ok(())
                }
                EquivalenceVerdict::NotEquivalent => Err(Failure::Negative("not derived equivalent".into())),
                EquivalenceVerdict::InconclusiveEqualInvariant => Err(Failure::Negative(
                    "inconclusive: equal invariants, but outside both decidable classes".into(),
                )),
            }
        }
        Command::Gen {
            class,
            vertices,
            fraction,
            seed,
            o,
        } => match generate_random_instance(class, vertices, fraction, seed) {
            Ok(doc) => write_output(o.as_deref(), &emit(&doc)),
            Err(e @ Error::RejectionBudgetExhausted { .. }) => Err(Failure::Negative(e.to_string())),
            Err(e) => Err(e.into()),
        },
    }
}

fn rewrite(file: &Path, at: &str, o: Option<&Path>, co: bool) -> Outcome {
    let (doc, g) = read_gentle(file)?;
    let x = vertex(at)?;
    if !g.presentation().has_vertex(&x) {
        return Err(Failure::Usage(format!("unknown vertex `{x}`")));
    }
    let target = if co { g.opposite()? } else { g.clone() };
    let obstructions = reflect_obstructions(&target, &x)?;
    if !obstructions.is_empty() {
        let what = if co { "coreflect" } else { "reflect" };
        let list: Vec<String> = obstructions.iter().map(ToString::to_string).collect();
        return Err(Failure::Negative(format!("cannot {what} at `{x}`: {}", list.join("; "))));
    }
    let h = if co { coreflect(&g, &x)? } else { reflect(&g, &x)? };
    write_output(o, &emit_quiver(&doc.name, h.presentation()))
}

fn parse_rels(list: &str) -> Result<Vec<Relation>, Failure> {
    list.split(',')
        .map(|item| {
            let (a, b) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("expected A:B, got `{item}`")))?;
            Relation::new(a, b).map_err(Failure::from)
        })
        .collect()
}

fn print_classification(c: &Classification) {
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    println!("tree type: {}", yes_no(c.tree_type));
    println!("one cycle: {}", yes_no(c.one_cycle));
    if let Some(t) = c.type_atilde {
        println!("type Ã: {}", yes_no(t));
    }
    match (&c.class_a, &c.class_atilde) {
        (Some(a), _) => println!("class A: m = {}, p = {}", a.m, a.p),
        (_, Some(t)) => println!("class Ã: m1 = {}, m2 = {}, p = {}, q = {}", t.m1, t.m2, t.p, t.q),
        _ => println!("in neither class"),
    }
    match c.cluster_tilted {
        Some(ClusterType::TypeA) => println!("cluster tilted of type A"),
        Some(ClusterType::TypeAtilde) => println!("cluster tilted of type Ã"),
        None => println!("not cluster tilted"),
    }
    println!("Gorenstein dimension: {}", c.gorenstein);
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
