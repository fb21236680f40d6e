//! Command-line surface: ingest biorder or multiplication-table files,
//! report class structure, factor and coordinatise words, build contact
//! automata, decide word equality, and generate the standard example
//! families.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ig::analysis::{Analysis, DEFAULT_TC_BOUND};
use ig::biorder::BiorderedSet;
use ig::contact::ContactAutomaton;
use ig::fountain;
use ig::gen;
use ig::io::{load_biorder, BiorderFile, CayleyFile};
use ig::rees::{coordinatize, ReesTriple};
use ig::solver::{decide_report, export_csp, Reason, Verdict};
use ig::subgroup::GroupBackend;

#[derive(Parser)]
#[command(name = "ig", version, about = "Word problem for free idempotent generated semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputFile {
    /// Biorder or Cayley-table JSON file.
    file: PathBuf,
    /// Coset bound for finiteness certification.
    #[arg(long, default_value_t = DEFAULT_TC_BOUND)]
    tc_bound: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check a biorder (or table) file and summarise it.
    Validate {
        #[command(flatten)]
        input: InputFile,
    },
    /// Per-class structure: grids, squares, maximal subgroups.
    Structure {
        #[command(flatten)]
        input: InputFile,
        /// Also print the spanning forest and square relations.
        #[arg(long)]
        relations: bool,
        /// Write incidence graphs as DOT files into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Minimal r-factorisation and D-fingerprint of a word.
    Fingerprint {
        #[command(flatten)]
        input: InputFile,
        /// Whitespace-separated element names.
        word: String,
    },
    /// Rees coordinates of a regular word.
    Coords {
        #[command(flatten)]
        input: InputFile,
        word: String,
    },
    /// Contact automaton of an ordered pair of D-classes.
    Contact {
        #[command(flatten)]
        input: InputFile,
        /// First class (e.g. `D1` or `1`).
        class1: String,
        class2: String,
        /// Write the automaton as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide equality of two words. Exit code: 0 equal, 1 not equal,
    /// 2 unsupported regime, 3 error.
    Decide {
        #[command(flatten)]
        input: InputFile,
        word1: String,
        word2: String,
        /// Print a JSON certificate of the decision.
        #[arg(long)]
        certificate: bool,
        /// Also export the constraint instance to this file.
        #[arg(long, value_name = "OUT")]
        export_csp: Option<PathBuf>,
    },
    /// Reduced form and tilde witnesses of a word.
    Fountain {
        #[command(flatten)]
        input: InputFile,
        word: String,
    },
    /// Export the constraint instance equivalent to one equality query.
    ExportCsp {
        #[command(flatten)]
        input: InputFile,
        word1: String,
        word2: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Generate an example family: tn N | ptn N | rectband M N | freepair |
    /// semilattice-chain K.
    Gen {
        kind: String,
        params: Vec<usize>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn main() {
    // exit quietly when stdout is closed early (e.g. piping into `head`)
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(3);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(3);
        }
    }
}

fn load(input: &InputFile) -> Result<Analysis> {
    let text = std::fs::read_to_string(&input.file)
        .with_context(|| format!("reading {}", input.file.display()))?;
    let set = load_biorder(&text)?;
    Ok(Analysis::with_bound(set, input.tc_bound))
}

fn parse_word(set: &BiorderedSet, text: &str) -> Result<Vec<usize>> {
    let w = set.parse_word(text)?;
    if w.is_empty() {
        bail!("empty word");
    }
    Ok(w)
}

fn class_id(an: &Analysis, name: &str) -> Result<usize> {
    let trimmed = name.strip_prefix('D').unwrap_or(name);
    let id: usize = trimmed
        .parse()
        .map_err(|_| anyhow!("bad class id `{name}`"))?;
    if id >= an.class_count() {
        bail!("class D{id} does not exist (there are {})", an.class_count());
    }
    Ok(id)
}

fn backend_summary(an: &Analysis, class: usize) -> String {
    let c = &an.classes[class];
    match &c.backend {
        GroupBackend::Free { basis } if basis.is_empty() => "trivial group".to_string(),
        GroupBackend::Free { basis } => {
            let names: Vec<String> = basis
                .iter()
                .map(|&cell| {
                    let (i, l) = c.grid().cells[cell];
                    format!("f({})", an.set.name(c.grid().cell(i, l).unwrap()))
                })
                .collect();
            format!("free group of rank {} on {}", basis.len(), names.join(", "))
        }
        GroupBackend::Finite(g) => format!("finite group of order {}", g.order),
        GroupBackend::Unknown => "unknown (coset bound exceeded)".to_string(),
    }
}

fn triple_display(an: &Analysis, t: &ReesTriple) -> String {
    let c = &an.classes[t.class];
    let value = match an.canon(t) {
        Ok(ct) => match ct.value {
            ig::subgroup::GroupValue::Free(w) => an.word_display(t.class, &w),
            ig::subgroup::GroupValue::Finite(e) => format!("g{e}"),
        },
        Err(_) => format!("{} (unreduced)", an.word_display(t.class, &t.word)),
    };
    let _ = c;
    format!("(D{}, i={}, {}, λ={})", t.class, t.row + 1, value, t.col + 1)
}

fn grid_dot(an: &Analysis, class: usize) -> String {
    let grid = an.classes[class].grid();
    let mut out = String::from("graph incidence {\n  rankdir=LR;\n");
    for i in 0..grid.row_count() {
        out.push_str(&format!("  r{i} [shape=box,label=\"R{}\"];\n", i + 1));
    }
    for l in 0..grid.col_count() {
        out.push_str(&format!("  c{l} [shape=ellipse,label=\"L{}\"];\n", l + 1));
    }
    for &(i, l) in &grid.cells {
        let name = an.set.name(grid.cell(i, l).unwrap());
        out.push_str(&format!("  r{i} -- c{l} [label=\"{name}\"];\n"));
    }
    out.push_str("}\n");
    out
}

fn contact_dot(an: &Analysis, a: &ContactAutomaton) -> String {
    let mut out = String::from("digraph contact {\n");
    for lam in 0..a.cols1 {
        for i in 0..a.rows2 {
            out.push_str(&format!(
                "  s{lam}_{i} [label=\"(λ{},i{})\"];\n",
                lam + 1,
                i + 1
            ));
        }
    }
    for t in &a.transitions {
        out.push_str(&format!(
            "  s{}_{} -> s{}_{} [label=\"{} | ({}, {})\"];\n",
            t.from.0,
            t.from.1,
            t.to.0,
            t.to.1,
            an.set.name(t.letter),
            an.word_display(a.class1, &t.label1),
            an.word_display(a.class2, &t.label2),
        ));
    }
    out.push_str("}\n");
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { input } => {
            let an = load(&input)?;
            println!(
                "ok: {} idempotents, {} D-classes{}",
                an.set.len(),
                an.class_count(),
                match an.green.identity {
                    Some(e) => format!(", identity {}", an.set.name(e)),
                    None => String::new(),
                }
            );
            Ok(0)
        }
        Command::Structure {
            input,
            relations,
            dot,
        } => {
            let an = load(&input)?;
            println!(
                "{} idempotents, {} regular D-classes",
                an.set.len(),
                an.class_count()
            );
            for d in 0..an.class_count() {
                let c = &an.classes[d];
                let grid = c.grid();
                println!(
                    "D{d}: {} elements on a {}x{} grid, {} idempotent cells, {} squares{}; {}",
                    an.green.dclasses[d].len(),
                    grid.row_count(),
                    grid.col_count(),
                    grid.cells.len(),
                    c.presentation.squares.len(),
                    if c.maximal { ", maximal" } else { "" },
                    backend_summary(&an, d)
                );
                if relations {
                    let forest: Vec<String> = grid
                        .cells
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| c.presentation.tree[*k])
                        .map(|(_, &(i, l))| {
                            format!("f({}) = 1", an.set.name(grid.cell(i, l).unwrap()))
                        })
                        .collect();
                    println!("  forest: {}", forest.join(", "));
                    for &(i, j, l, m) in &c.presentation.squares {
                        let name = |r: usize, cc: usize| {
                            format!("f({})", an.set.name(grid.cell(r, cc).unwrap()))
                        };
                        println!(
                            "  square: {}^-1 {} = {}^-1 {}",
                            name(i, l),
                            name(i, m),
                            name(j, l),
                            name(j, m)
                        );
                    }
                }
                if let Some(dir) = &dot {
                    std::fs::create_dir_all(dir)?;
                    write_file(&dir.join(format!("class{d}.dot")), &grid_dot(&an, d))?;
                }
            }
            Ok(0)
        }
        Command::Fingerprint { input, word } => {
            let an = load(&input)?;
            let w = parse_word(&an.set, &word)?;
            let ops = an.ops();
            let fp = ops.minimal_r_factorisation(&w);
            println!(
                "{} factor{}",
                fp.factor_count(),
                if fp.factor_count() == 1 { "" } else { "s" }
            );
            for k in 0..fp.factor_count() {
                let factor = fp.factor(&w, k);
                let end = fp.starts[k] + factor.len();
                println!(
                    "  factor {}: positions {}..{}, class D{}, `{}`",
                    k + 1,
                    fp.starts[k] + 1,
                    end,
                    fp.classes[k],
                    an.set.word_to_string(factor)
                );
            }
            println!(
                "fingerprint: {}",
                fp.classes
                    .iter()
                    .map(|c| format!("D{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            Ok(0)
        }
        Command::Coords { input, word } => {
            let an = load(&input)?;
            let w = parse_word(&an.set, &word)?;
            let ops = an.ops();
            let t = coordinatize(&ops, &an, &w)
                .map_err(|e| anyhow!("{e}: `{}`", an.set.word_to_string(&w)))?;
            println!("{}", triple_display(&an, &t));
            Ok(0)
        }
        Command::Contact {
            input,
            class1,
            class2,
            dot,
        } => {
            let an = load(&input)?;
            let d1 = class_id(&an, &class1)?;
            let d2 = class_id(&an, &class2)?;
            let a = an.contact(d1, d2);
            println!(
                "states: {} (columns of D{d1} x rows of D{d2}), transitions: {}",
                a.state_count(),
                a.transitions.len()
            );
            for t in &a.transitions {
                println!(
                    "  (λ{},i{}) --{}--> (λ{},i{})  label ({}, {})",
                    t.from.0 + 1,
                    t.from.1 + 1,
                    an.set.name(t.letter),
                    t.to.0 + 1,
                    t.to.1 + 1,
                    an.word_display(d1, &t.label1),
                    an.word_display(d2, &t.label2)
                );
            }
            if let Some(path) = dot {
                write_file(&path, &contact_dot(&an, &a))?;
            }
            Ok(0)
        }
        Command::Decide {
            input,
            word1,
            word2,
            certificate,
            export_csp: export_path,
        } => {
            let an = load(&input)?;
            let u = parse_word(&an.set, &word1)?;
            let v = parse_word(&an.set, &word2)?;
            let report = decide_report(&an, &u, &v)?;
            match &report.verdict {
                Verdict::Equal => println!("equal"),
                Verdict::NotEqual(reason) => println!("not equal ({})", reason_name(*reason)),
                Verdict::Unsupported(_) => {
                    println!("unsupported regime (constraint instance available)")
                }
            }
            if certificate {
                println!("{}", certificate_json(&an, &report));
            }
            if let Some(path) = export_path {
                match export_csp(&an, &u, &v) {
                    Ok(inst) => write_file(&path, &inst.to_json())?,
                    Err(e) => eprintln!("csp export skipped: {e}"),
                }
            }
            Ok(report.verdict.exit_code())
        }
        Command::Fountain { input, word } => {
            let an = load(&input)?;
            let w = parse_word(&an.set, &word)?;
            let ops = an.ops();
            let rf = fountain::reduced_form(&ops, &an, &w);
            let wit = fountain::tilde_witnesses(&ops, &an, &w);
            println!("reduced form: {}", an.set.word_to_string(&rf));
            println!(
                "tilde-R witness: {}  tilde-L witness: {}",
                an.set.name(wit.r),
                an.set.name(wit.l)
            );
            Ok(0)
        }
        Command::ExportCsp {
            input,
            word1,
            word2,
            out,
        } => {
            let an = load(&input)?;
            let u = parse_word(&an.set, &word1)?;
            let v = parse_word(&an.set, &word2)?;
            let inst = export_csp(&an, &u, &v)?;
            write_file(&out, &inst.to_json())?;
            println!(
                "wrote {} ({} factors, {} constraints)",
                out.display(),
                inst.fingerprint.len(),
                inst.constraints.len()
            );
            Ok(0)
        }
        Command::Gen { kind, params, out } => {
            let json = match (kind.as_str(), params.as_slice()) {
                ("tn", [n]) => {
                    serde_json::to_string(&CayleyFile::from(&gen::full_transformation_table(*n)?))?
                }
                ("ptn", [n]) => serde_json::to_string(&CayleyFile::from(
                    &gen::partial_transformation_table(*n)?,
                ))?,
                ("rectband", [m, n]) => {
                    serde_json::to_string(&CayleyFile::from(&gen::rect_band_table(*m, *n)?))?
                }
                ("freepair", []) => serde_json::to_string(&BiorderFile::from_set(&gen::free_pair()))?,
                ("semilattice-chain", [k]) => {
                    serde_json::to_string(&CayleyFile::from(&gen::semilattice_chain_table(*k)?))?
                }
                _ => bail!(
                    "unknown generator `{kind}` with {} parameter(s); expected tn N, ptn N, \
                     rectband M N, freepair, or semilattice-chain K",
                    params.len()
                ),
            };
            write_file(&out, &json)?;
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}

fn reason_name(r: Reason) -> &'static str {
    match r {
        Reason::Fingerprint => "fingerprint",
        Reason::Endpoints => "endpoints",
        Reason::Group => "group",
        Reason::Csp => "csp",
    }
}

fn certificate_json(an: &Analysis, report: &ig::solver::DecisionReport) -> String {
    let triples = |ts: &Option<Vec<ReesTriple>>| -> serde_json::Value {
        match ts {
            None => serde_json::Value::Null,
            Some(ts) => ts
                .iter()
                .map(|t| triple_display(an, t))
                .collect::<Vec<_>>()
                .into(),
        }
    };
    let verdict = match &report.verdict {
        Verdict::Equal => "equal".to_string(),
        Verdict::NotEqual(r) => format!("not-equal:{}", reason_name(*r)),
        Verdict::Unsupported(_) => "unsupported".to_string(),
    };
    let json = serde_json::json!({
        "verdict": verdict,
        "fingerprint": report.fingerprint.as_ref().map(|f| {
            f.iter().map(|c| format!("D{c}")).collect::<Vec<_>>()
        }),
        "left": triples(&report.left),
        "right": triples(&report.right),
        "assignment": report.assignment.as_ref().map(|a| {
            a.iter()
                .map(|(pos, val)| serde_json::json!({"factor": pos + 1, "value": format!("g{val}")}))
                .collect::<Vec<_>>()
        }),
        "conditions": report.conditions.as_ref().map(|cs| {
            cs.iter()
                .map(|c| {
                    serde_json::json!({
                        "automaton": format!("A(D{}, D{})", c.classes.0, c.classes.1),
                        "path_from": [c.from.0 + 1, c.from.1 + 1],
                        "path_to": [c.to.0 + 1, c.to.1 + 1],
                        "kind": c.kind,
                        "witness_path": c.witness_path.as_ref().map(|p| {
                            p.iter().map(|&e| an.set.name(e).to_string()).collect::<Vec<_>>()
                        }),
                    })
                })
                .collect::<Vec<_>>()
        }),
    });
    serde_json::to_string_pretty(&json).expect("serializable")
}
