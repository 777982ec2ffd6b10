use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acsp_core::classify::{classify, Mode};
use acsp_core::engine::{count, MethodChoice};
use acsp_core::frontends::{
    circuit_from_str, compile_circuit, count_2sat, count_subtrees, parse_bits, parse_dimacs,
    CompileMode,
};
use acsp_core::gadgets::{
    catalog_build, catalog_names, gadget_from_str, pin_search_binary, rewrite_instance,
    substitute, verify_realization, GadgetParams, GadgetRealization, Rewrite,
};
use acsp_core::hypergraph::{join_forest, GyoPolicy, Hypergraph};
use acsp_core::json::{function_from_str, function_list_from_str, instance_from_str};
use acsp_core::{ComplexRat, Error, FuncTable};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

/// Exact counting, classification and gadget checks for acyclic Boolean
/// constraint problems with Gaussian-rational weights.
#[derive(Parser)]
#[command(name = "acsp", version)]
struct Cli {
    /// Write the JSON result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

// Parsed once per run; boxing the gadget arguments buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum Command {
    /// Run GYO on an instance's hypergraph.
    CheckAcyclic {
        file: PathBuf,
        /// Include the reduction trace.
        #[arg(long)]
        explain: bool,
    },
    /// Weighted count of an acyclic instance.
    Count {
        file: PathBuf,
        /// auto, brute, jointree or ed.
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        /// Include the GYO trace, join forest and table sizes.
        #[arg(long)]
        explain: bool,
    },
    /// Model count of an acyclic 2CNF formula in DIMACS form.
    #[command(name = "count-2sat")]
    Count2sat {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        #[arg(long)]
        explain: bool,
    },
    /// Complexity tier of a set of functions.
    Classify {
        file: PathBuf,
        /// with-xor or no-xor.
        #[arg(long, default_value = "with-xor")]
        mode: Mode,
    },
    /// Gadget catalog, verification and rewriting.
    Gadget {
        #[command(subcommand)]
        command: GadgetCommand,
    },
    /// Semi-unbounded circuits.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
}

#[derive(Args)]
struct GadgetSource {
    /// Catalog name (see `gadget list`).
    name: Option<String>,
    /// Read the gadget from a JSON file instead of the catalog.
    #[arg(long, conflicts_with = "name")]
    file: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<ComplexRat>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<ComplexRat>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<ComplexRat>,
}

#[derive(Subcommand)]
enum GadgetCommand {
    /// Catalog names and the parameters they read.
    List,
    /// Check the identity over all assignments and the acyclicity of the base.
    Verify {
        #[command(flatten)]
        source: GadgetSource,
        /// Include the realization itself.
        #[arg(long)]
        explain: bool,
    },
    /// Replace every occurrence of the gadget's target in an instance.
    Apply {
        #[command(flatten)]
        source: GadgetSource,
        /// Instance to rewrite.
        #[arg(long)]
        instance: PathBuf,
        /// Function to replace, as JSON; must equal the gadget's target.
        #[arg(long)]
        target: Option<String>,
        /// Skip the acyclicity checks.
        #[arg(long)]
        allow_cyclic: bool,
    },
    /// Pin all but two positions of a function to get a non-degenerate
    /// binary function.
    PinSearch { file: PathBuf },
}

#[derive(Subcommand)]
enum CircuitCommand {
    /// Number of accepting subtrees on an input.
    Count {
        file: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Compile to an instance whose scaled count is the subtree count.
    Compile {
        file: PathBuf,
        #[arg(long)]
        input: String,
        /// direct or strict.
        #[arg(long, default_value = "direct")]
        mode: CompileMode,
        /// Also count the compiled instance.
        #[arg(long)]
        explain: bool,
    },
}

/// Failure with its exit code.
enum Failure {
    Rejected(Value),
    Internal(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut d = json!({"kind": e.kind(), "message": e.to_string()});
        match &e {
            Error::NotAcyclic { trace } => d["trace"] = json!(trace),
            Error::RewriteNotAcyclic { before, after } => {
                d["trace_before"] = json!(before);
                d["trace_after"] = json!(after);
            }
            _ => {}
        }
        let d = json!({ "error": d });
        if e.is_internal() {
            Failure::Internal(d)
        } else {
            Failure::Rejected(d)
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::Rejected(json!({"error": {
            "kind": "io",
            "message": format!("{}: {e}", path.display()),
        }}))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, value, to_stdout) = match run(cli.command) {
        Ok(v) => (0, v, true),
        Err(Failure::Rejected(v)) => (2, v, false),
        Err(Failure::Internal(v)) => (1, v, false),
    };
    let text = serde_json::to_string_pretty(&value).expect("values serialize");
    if !to_stdout {
        eprintln!("{text}");
    } else if let Some(path) = cli.output {
        if let Err(e) = fs::write(&path, format!("{text}\n")) {
            eprintln!("{}", json!({"error": {"kind": "io", "message": format!("{}: {e}", path.display())}}));
            return ExitCode::from(2);
        }
    } else {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{text}");
    }
    ExitCode::from(code)
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::CheckAcyclic { file, explain } => {
            let inst = instance_from_str(&read(&file)?)?;
            let r = Hypergraph::from_instance(&inst).gyo(GyoPolicy::SmallestFirst);
            let mut v = json!({"acyclic": r.acyclic});
            if explain {
                v["trace"] = json!(r.trace);
                if !r.residue.is_empty() {
                    v["residue"] = json!(r.residue);
                }
            }
            Ok(v)
        }
        Command::Count {
            file,
            method,
            explain,
        } => {
            let inst = instance_from_str(&read(&file)?)?;
            let r = count(&inst, method)?;
            let mut v = json!({"count": r.count, "method": r.method});
            if explain {
                v["stats"] = json!(r.stats);
                let gyo = Hypergraph::from_instance(&inst).gyo(GyoPolicy::SmallestFirst);
                v["gyo"] = json!(gyo);
                if gyo.acyclic {
                    v["join_forest"] = json!(join_forest(&inst)?);
                }
            }
            Ok(v)
        }
        Command::Count2sat {
            file,
            method,
            explain,
        } => {
            let cnf = parse_dimacs(&read(&file)?)?;
            let r = count_2sat(&cnf, method)?;
            let mut v = json!({"count": r.count, "method": r.method});
            if explain {
                v["stats"] = json!(r.stats);
                v["instance"] = json!(cnf.to_instance());
            }
            Ok(v)
        }
        Command::Classify { file, mode } => {
            let fs = function_list_from_str(&read(&file)?)?;
            Ok(json!(classify(&fs, mode)))
        }
        Command::Gadget { command } => run_gadget(command),
        Command::Circuit { command } => run_circuit(command),
    }
}

fn load_gadget(s: &GadgetSource) -> Result<(GadgetRealization, bool), Failure> {
    if let Some(path) = &s.file {
        return Ok((gadget_from_str(&read(path)?)?, false));
    }
    let Some(name) = &s.name else {
        return Err(Failure::Rejected(json!({"error": {
            "kind": "usage",
            "message": "give a catalog name or --file",
        }})));
    };
    let params = GadgetParams {
        k: s.k,
        a: s.a.clone(),
        b: s.b.clone(),
        c: s.c.clone(),
    };
    Ok((catalog_build(name, &params)?, true))
}

fn run_gadget(cmd: GadgetCommand) -> Outcome {
    match cmd {
        GadgetCommand::List => Ok(json!(catalog_names()
            .iter()
            .map(|(n, p)| json!({"name": n, "params": p.split_whitespace().collect::<Vec<_>>()}))
            .collect::<Vec<_>>())),
        GadgetCommand::Verify { source, explain } => {
            let (r, from_catalog) = load_gadget(&source)?;
            let ver = verify_realization(&r)?;
            let mut v = json!(ver);
            v["ok"] = json!(ver.ok());
            if explain {
                v["realization"] = json!(r);
            }
            if ver.ok() {
                Ok(v)
            } else if from_catalog && !ver.identity_holds {
                Err(Failure::Internal(v))
            } else {
                Err(Failure::Rejected(v))
            }
        }
        GadgetCommand::Apply {
            source,
            instance,
            target,
            allow_cyclic,
        } => {
            let (r, _) = load_gadget(&source)?;
            let inst = instance_from_str(&read(&instance)?)?;
            let f: FuncTable = match target {
                Some(t) => function_from_str(&t)?,
                None => (*r.target).clone(),
            };
            let Rewrite {
                instance,
                scalar,
                occurrences,
            } = if allow_cyclic {
                substitute(&inst, &f, &r)?
            } else {
                rewrite_instance(&inst, &f, &r)?
            };
            Ok(json!({"scalar": scalar, "occurrences": occurrences, "instance": instance}))
        }
        GadgetCommand::PinSearch { file } => {
            let f = function_from_str(&read(&file)?)?;
            Ok(json!(pin_search_binary(&f)?))
        }
    }
}

fn run_circuit(cmd: CircuitCommand) -> Outcome {
    match cmd {
        CircuitCommand::Count { file, input } => {
            let c = circuit_from_str(&read(&file)?)?;
            let x = parse_bits(&input)?;
            Ok(json!({"count": count_subtrees(&c, &x)?.to_string()}))
        }
        CircuitCommand::Compile {
            file,
            input,
            mode,
            explain,
        } => {
            let c = circuit_from_str(&read(&file)?)?;
            let x = parse_bits(&input)?;
            let out = compile_circuit(&c, &x, mode)?;
            let mut v = json!({"mode": mode, "scalar": out.scalar, "instance": out.instance});
            if explain {
                let r = count(&out.instance, MethodChoice::JoinTree)?;
                v["count"] = json!(r.count);
                v["subtrees"] = json!(count_subtrees(&c, &x)?.to_string());
                v["stats"] = json!(r.stats);
            }
            Ok(v)
        }
    }
}
