//! `regstruct` command-line front end.
//!
//! Rules and characters are given either by a built-in name or by a path to
//! a file in the corresponding text format. Exit status is `0` on success,
//! `1` when a check fails or a computation errors, and `2` on usage and
//! parse errors.

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use regstruct::casebook::wick_check;
use regstruct::characters::{parse_character_file, MinusCharacter};
use regstruct::coproducts::{
    delta, delta_2, delta_hat_1, delta_minus, delta_minus_circ, delta_minus_r, delta_plus, rooted_degree, Delta2Part,
};
use regstruct::lincomb::{BasisElement, LinComb};
use regstruct::renorm::{m_from_character, m_from_r, r_from_character};
use regstruct::suites::{builtin_character, run_suite, SuiteCaps};
use regstruct::text::{parse_rooted, parse_tree};
use regstruct::{Error, MultiIndex, RuleTable};

#[derive(Parser)]
#[command(name = "regstruct", version, about = "Exact computations with decorated trees of regularity structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the trees conforming to a rule within the given caps.
    Basis {
        #[arg(long)]
        rule: String,
        /// Degree cap, a rational such as `3/2`.
        #[arg(long)]
        max_degree: String,
        #[arg(long)]
        max_edges: usize,
        /// Bound on node decorations: one integer for every component or a
        /// multi-index such as `[1,2]`.
        #[arg(long)]
        poly_cap: Option<String>,
    },
    /// Apply one of the coproducts to an expression.
    Coproduct {
        #[arg(long, value_enum)]
        map: Map,
        #[arg(long)]
        rule: String,
        /// Left-leg degree cap for `delta-hat-1` (default: the degree of the
        /// input).
        #[arg(long)]
        cap: Option<String>,
        /// Which finite projection of `delta-2` to print.
        #[arg(long, value_enum, default_value = "plus")]
        part: Part,
        #[arg(long, value_enum, default_value = "structured")]
        format: Format,
        expr: String,
    },
    /// Apply the renormalisation map of a character to an expression.
    Renorm {
        #[arg(long)]
        rule: String,
        /// `wick`, `kpz`, `gkpz`, `qua` or a character file.
        #[arg(long = "char")]
        character: String,
        #[arg(long, value_enum, default_value = "character")]
        via: Via,
        #[arg(long, value_enum, default_value = "structured")]
        format: Format,
        expr: String,
    },
    /// Run identity suites over a basis and print the report.
    Check {
        #[arg(long)]
        rule: String,
        /// `coassoc`, `factorisation`, `cointeraction`, `group`, `antipode`,
        /// `deltaM`, `admissible` or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        max_edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the Wick-renormalised power of the noise with a Hermite
    /// polynomial.
    Wick {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Map {
    Delta,
    DeltaPlus,
    DeltaMinus,
    DeltaMinusR,
    DeltaMinusCirc,
    #[value(name = "delta-hat-1")]
    DeltaHat1,
    #[value(name = "delta-2")]
    Delta2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Part {
    Plus,
    Minus,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    Character,
    Recursive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Latex,
    Structured,
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Compute(String),
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownType(_) | Error::Arity { .. } | Error::Rule(_) | Error::NonConforming(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn load_rule(spec: &str) -> Result<RuleTable, Failure> {
    if let Some(r) = RuleTable::builtin(spec) {
        return Ok(r);
    }
    let src = std::fs::read_to_string(spec)
        .map_err(|e| Failure::Usage(format!("`{spec}` is neither a built-in rule nor a readable file: {e}")))?;
    Ok(RuleTable::parse(&src)?)
}

/// The name suites use to pick their default character.
fn rule_name(spec: &str) -> String {
    if RuleTable::builtin(spec).is_some() {
        spec.to_string()
    } else {
        Path::new(spec).file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned())
    }
}

fn load_character(spec: &str, rule: &RuleTable) -> Result<MinusCharacter, Failure> {
    if let Some(c) = builtin_character(spec, rule) {
        return Ok(c);
    }
    let src = std::fs::read_to_string(spec)
        .map_err(|e| Failure::Usage(format!("`{spec}` is neither a built-in character nor a readable file: {e}")))?;
    Ok(MinusCharacter::new(parse_character_file(&src, rule)?))
}

fn parse_rational(s: &str) -> Result<Rational64, Failure> {
    s.trim().parse().map_err(|_| Failure::Usage(format!("`{s}` is not a rational number")))
}

fn parse_poly_cap(s: &str, dim: usize) -> Result<MultiIndex, Failure> {
    let bad = || Failure::Usage(format!("`{s}` is not a polynomial cap"));
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let v: Vec<u32> = inner.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if v.len() != dim + 1 {
            return Err(Failure::Usage(format!("polynomial cap needs {} entries", dim + 1)));
        }
        Ok(MultiIndex(v))
    } else {
        let n: u32 = s.parse().map_err(|_| bad())?;
        Ok(MultiIndex(vec![n; dim + 1]))
    }
}

fn render<K: BasisElement>(x: &LinComb<K>, format: Format) -> String {
    match format {
        Format::Text => format!("{}\n", x.text()),
        Format::Latex => format!("{}\n", x.latex()),
        Format::Structured => x.structured(),
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Basis { rule, max_degree, max_edges, poly_cap } => {
            let r = load_rule(&rule)?;
            let cap = parse_rational(&max_degree)?;
            let poly = match poly_cap {
                Some(p) => parse_poly_cap(&p, r.dim())?,
                None => MultiIndex::zero(r.dim()),
            };
            let basis = r.generate_basis(cap, max_edges, &poly, r.default_root);
            Ok(basis.iter().map(|t| format!("{}\t{}\n", r.degree(t), t.text())).collect())
        }
        Command::Coproduct { map, rule, cap, part, format, expr } => {
            let r = load_rule(&rule)?;
            if let Map::DeltaHat1 = map {
                let x = parse_rooted(&expr, &r)?;
                let cap = match cap {
                    Some(c) => parse_rational(&c)?,
                    None => rooted_degree(&r, &x),
                };
                return Ok(render(&delta_hat_1(&r, &x, cap), format));
            }
            let t = parse_tree(&expr, &r)?;
            Ok(match map {
                Map::Delta => render(&delta(&r, &t), format),
                Map::DeltaPlus => render(&delta_plus(&r, &t), format),
                Map::DeltaMinus => render(&delta_minus(&r, &t), format),
                Map::DeltaMinusR => render(&delta_minus_r(&r, &t), format),
                Map::DeltaMinusCirc => render(&delta_minus_circ(&r, &t), format),
                Map::Delta2 => {
                    let p = match part {
                        Part::Plus => Delta2Part::Plus,
                        Part::Minus => Delta2Part::Minus,
                    };
                    render(&delta_2(&r, &t, p), format)
                }
                Map::DeltaHat1 => unreachable!(),
            })
        }
        Command::Renorm { rule, character, via, format, expr } => {
            let r = load_rule(&rule)?;
            let ell = load_character(&character, &r)?;
            let t = parse_tree(&expr, &r)?;
            let m = match via {
                Via::Character => m_from_character(&r, &ell).apply(&t)?,
                Via::Recursive => m_from_r(&r, r_from_character(&r, &ell)).m(&t)?,
            };
            Ok(render(&m, format))
        }
        Command::Check { rule, suite, max_edges, seed } => {
            let r = load_rule(&rule)?;
            let caps = SuiteCaps::for_rule(&r, max_edges);
            let rep = run_suite(&suite, &rule_name(&rule), &r, &caps, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            println!("{rep}");
            if rep.all_passed() {
                Ok(String::new())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Wick { n } => {
            let kmax = n.div_ceil(2).max(5) as u32;
            let (_, image, h) = wick_check(n, kmax)?;
            println!("M-image: {image}");
            println!("H_{n}:     {h}");
            if image == h {
                Ok(String::new())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
