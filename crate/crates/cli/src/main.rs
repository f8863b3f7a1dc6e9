use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use fourgeo::bounds::{self, BoundOptions, BoundReport, GroupFamily, Target};
use fourgeo::export::{envelope_csv, envelope_text, envelopes_svg, FORMAT_VERSION};
use fourgeo::geography::{
    empirical_bounded, known_table, sequence_bounded, unbounded_directions, upper_envelope, End, EnvelopeFn, Interval, Move,
    Sequence, TableClass, Witness,
};
use fourgeo::manifold::{
    self, atom, derived_checks, odd_rank_construct, stipsicz_member, theorem1_construct, theorem2_trace, z3_construct,
    ConstructionTrace, Monodromy,
};
use fourgeo::parallel::Exec;
use fourgeo::presentation::{parse_presentation, simplify, Presentation};
use fourgeo::rational::{fmt_q, parse_q, Q};
use fourgeo::Error;

#[derive(Parser, Debug)]
#[command(name = "fourgeo", version, about = "Euler characteristic and signature bounds for symplectic 4-manifolds with a given fundamental group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Layered lower and upper bounds for a presentation or family spec.
    Bounds {
        /// `<x,y | [x,y]>` or a family spec such as `zn:6`, `cyclic:5`, `gpf:2,4,inf`.
        input: String,
        #[arg(long, default_value = "chi", value_parser = parse_target)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include bounds conditional on the BMY inequality.
        #[arg(long)]
        assume_bmy: bool,
        /// Add the chi <= k + l(g+r) bound, given as `k,l`.
        #[arg(long, value_name = "K,L")]
        corvague: Option<String>,
        /// Allow k < 6 or l < 12 in --corvague.
        #[arg(long)]
        hypothetical: bool,
    },
    /// Run a construction and print its trace.
    Construct {
        /// A presentation (fibered construction), or one of `twist:g`,
        /// `cyclic_monodromy:n`, `odd_rank:m`, `z3`, `stipsicz:k`, `atom:NAME`.
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Abelianization of a presentation.
    Abelianize {
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also print the Tietze-simplified presentation.
        #[arg(long)]
        simplify: bool,
    },
    /// Envelope functions b -> f(1,b), domains and unboundedness predicates.
    Geography {
        /// A known table; repeatable. Defaults to the three trivial-group tables.
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Witness for an upper envelope: an atom name or `label=chi,sigma`; repeatable.
        #[arg(long = "witness")]
        witnesses: Vec<String>,
        /// Print half-planes for moves: blow_up, cp2_sum, k3.
        #[arg(long = "move")]
        moves: Vec<String>,
        /// Registered sequence (`mk` or `stipsicz_ray`) to test at --a/--b.
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
        #[arg(long, default_value_t = 11)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Bound reports for a range of family parameters.
    Table {
        /// free, cyclic, zn or surface.
        family: String,
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long, default_value_t = 10)]
        to: u64,
        #[arg(long, default_value = "chi", value_parser = parse_target)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Disable the thread pool.
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn allow(format: Format, allowed: &[Format], verb: &str) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(usage(format!("--format {format:?} is not available for `{verb}`").to_lowercase()))
    }
}

fn versioned<T: Serialize>(v: &T) -> Json {
    let mut j = serde_json::to_value(v).expect("report types serialize");
    if let Json::Object(map) = &mut j {
        map.entry("format_version").or_insert(json!(FORMAT_VERSION));
    }
    j
}

fn pretty(j: &Json) -> String {
    let mut s = serde_json::to_string_pretty(j).expect("json values serialize");
    s.push('\n');
    s
}

fn looks_like_presentation(s: &str) -> bool {
    s.trim_start().starts_with('<')
}

fn cmd_bounds(
    input: &str,
    target: Target,
    format: Format,
    opts: BoundOptions,
    corvague: Option<&str>,
    hypothetical: bool,
) -> Result<String, Failure> {
    allow(format, &[Format::Text, Format::Json], "bounds")?;
    let (mut report, size) = if looks_like_presentation(input) {
        let p = parse_presentation(input)?;
        let size = (p.generator_count() as u64, p.relator_count() as u64);
        (bounds::layered_report(&p, target, opts)?, size)
    } else {
        let f: GroupFamily = input.parse()?;
        (bounds::family_report(&f, target, opts)?, f.standard_size())
    };
    if let Some(kl) = corvague {
        let (k, l) = kl.split_once(',').ok_or_else(|| usage("--corvague expects `k,l`"))?;
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| usage(format!("`{s}` is not a nonnegative integer")));
        report = bounds::with_corvague(report, num(k)?, num(l)?, size.0, size.1, hypothetical)?;
    }
    Ok(match format {
        Format::Json => pretty(&versioned(&report)),
        _ => report.to_string(),
    })
}

fn named_construction(input: &str) -> Result<Option<ConstructionTrace>, Failure> {
    let (head, arg) = input.split_once(':').unwrap_or((input, ""));
    let num = || arg.trim().parse::<u64>().map_err(|_| usage(format!("`{arg}` is not a nonnegative integer")));
    let trace = match head.trim().to_ascii_lowercase().as_str() {
        "twist" => {
            let g = num()? as usize;
            theorem2_trace(g, &Monodromy::dehn_twists(g))?
        }
        "cyclic_monodromy" => {
            let n = arg.trim().parse::<i64>().map_err(|_| usage(format!("`{arg}` is not an integer")))?;
            theorem2_trace(1, &Monodromy::cyclic(n))?
        }
        "odd_rank" => ConstructionTrace::from_class(input, odd_rank_construct(num()?)?),
        "z3" => ConstructionTrace::from_class(input, z3_construct()?),
        "stipsicz" => ConstructionTrace::from_class(input, stipsicz_member(num()?)?),
        "atom" => ConstructionTrace::from_class(input, atom(arg)?),
        _ => return Ok(None),
    };
    Ok(Some(trace))
}

fn cmd_construct(input: &str, format: Format) -> Result<String, Failure> {
    allow(format, &[Format::Text, Format::Json], "construct")?;
    let trace = if looks_like_presentation(input) {
        theorem1_construct(&parse_presentation(input)?)?
    } else {
        named_construction(input)?.ok_or_else(|| usage(format!("unknown construction `{input}`")))?
    };
    let checks = derived_checks(&trace.final_class);
    let failures: Vec<_> = checks.failures().into_iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    if !failures.is_empty() {
        return Err(Failure::Lib(Error::Invariant(failures.join("; "))));
    }
    Ok(match format {
        Format::Json => {
            let mut j = versioned(&trace);
            j["checks"] = serde_json::to_value(&checks).expect("checks serialize");
            pretty(&j)
        }
        _ => {
            let mut out = format!("construction: {}\n", trace.construction);
            for (i, s) in trace.steps.iter().enumerate() {
                let inv = match (s.chi, s.sigma) {
                    (Some(c), Some(g)) => format!("chi={c} sigma={g}"),
                    _ => "symbolic".to_string(),
                };
                out.push_str(&format!("{:>3}. {:<14} {}  {}\n", i + 1, s.operation, inv, s.pi1_effect));
            }
            out.push_str(&format!("final: {}\n", trace.final_class));
            if let Some(c) = &trace.pi1_check {
                out.push_str(&format!("pi1 check: expected {} obtained {} ({})\n", c.expected, c.obtained, if c.matches { "match" } else { "MISMATCH" }));
            }
            out
        }
    })
}

fn cmd_abelianize(input: &str, format: Format, simp: bool) -> Result<String, Failure> {
    allow(format, &[Format::Text, Format::Json], "abelianize")?;
    let p = parse_presentation(input)?;
    let ab = p.abelianize();
    let simplified: Option<Presentation> = simp.then(|| simplify(&p).0);
    Ok(match format {
        Format::Json => {
            let mut j = json!({
                "format_version": FORMAT_VERSION,
                "presentation": p.to_string(),
                "abelianization": ab,
                "text": ab.to_string(),
                "b1": ab.rank,
                "deficiency": p.deficiency(),
            });
            if let Some(s) = &simplified {
                j["simplified"] = json!(s.to_string());
            }
            pretty(&j)
        }
        _ => {
            let mut out = format!("{ab}\n");
            if let Some(s) = simplified {
                out.push_str(&format!("simplified: {s}\n"));
            }
            out
        }
    })
}

fn parse_witness(s: &str) -> Result<Witness, Failure> {
    if let Some((label, inv)) = s.split_once('=') {
        let (c, g) = inv.split_once(',').ok_or_else(|| usage(format!("witness `{s}` should be label=chi,sigma")))?;
        let n = |x: &str| x.trim().parse::<i64>().map_err(|_| usage(format!("`{x}` is not an integer")));
        return Ok(Witness::new(label.trim(), n(c)?, n(g)?));
    }
    Ok(Witness::from(&manifold::atom(s)?))
}

fn parse_move(s: &str) -> Result<Move, Failure> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "blow_up" | "blowup" => Ok(Move::blow_up()),
        "cp2_sum" | "cp2" => Ok(Move::cp2_sum()),
        "k3" | "k3_fiber_sum" => Ok(Move::k3_fiber_sum()),
        _ => Err(usage(format!("unknown move `{s}` (blow_up, cp2_sum, k3)"))),
    }
}

fn q_arg(name: &str, v: &Option<String>) -> Result<Option<Q>, Failure> {
    v.as_deref().map(|s| parse_q(s).map_err(|e| usage(format!("--{name}: {e}")))).transpose()
}

#[allow(clippy::too_many_arguments)]
fn cmd_geography(
    classes: &[String],
    witnesses: &[String],
    moves: &[String],
    sequence: Option<&str>,
    a: &Option<String>,
    b: &Option<String>,
    from: &Option<String>,
    to: &Option<String>,
    samples: usize,
    format: Format,
) -> Result<String, Failure> {
    if let Some(name) = sequence {
        allow(format, &[Format::Text, Format::Json], "geography --sequence")?;
        let seq: Sequence = name.parse()?;
        let (a, b) = match (q_arg("a", a)?, q_arg("b", b)?) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(usage("--sequence needs --a and --b")),
        };
        let bounded = sequence_bounded(seq, &a, &b);
        let probe = empirical_bounded(seq, &a, &b, 10_000);
        return Ok(match format {
            Format::Json => pretty(&json!({
                "format_version": FORMAT_VERSION,
                "sequence": seq,
                "a": fmt_q(&a),
                "b": fmt_q(&b),
                "bounded": bounded,
                "empirical_bounded": probe,
            })),
            _ => format!("{name} at (a,b) = ({}, {}): {}\n", fmt_q(&a), fmt_q(&b), if bounded { "bounded below" } else { "unbounded below" }),
        });
    }
    if !moves.is_empty() {
        allow(format, &[Format::Text, Format::Json], "geography --move")?;
        let ms = moves.iter().map(|m| parse_move(m)).collect::<Result<Vec<_>, _>>()?;
        let hs = unbounded_directions(&ms);
        return Ok(match format {
            Format::Json => {
                let items: Vec<Json> = hs.iter().map(|h| json!({"constraint": h.to_string(), "half_plane": h})).collect();
                pretty(&json!({"format_version": FORMAT_VERSION, "constraints": items}))
            }
            _ => hs.iter().map(|h| format!("{}: {h}\n", h.label)).collect(),
        });
    }

    let (from, to) = (q_arg("from", from)?, q_arg("to", to)?);
    let mut fns: Vec<(String, EnvelopeFn)> = Vec::new();
    if !witnesses.is_empty() {
        let ws = witnesses.iter().map(|w| parse_witness(w)).collect::<Result<Vec<_>, _>>()?;
        let iv = Interval {
            lo: from.clone().map_or(End::Infinite, End::Closed),
            hi: to.clone().map_or(End::Infinite, End::Closed),
        };
        let label = ws.iter().map(|w| w.label.as_str()).collect::<Vec<_>>().join(",");
        fns.push((format!("upper envelope of {{{label}}}"), upper_envelope(&ws, &iv)?));
    }
    let class_names: Vec<String> = if classes.is_empty() && witnesses.is_empty() {
        ["smooth_trivial", "symplectic_trivial", "minimal_trivial"].map(String::from).to_vec()
    } else {
        classes.to_vec()
    };
    for c in &class_names {
        let t: TableClass = c.parse()?;
        fns.push((t.to_string(), known_table(t)));
    }

    // sample range: explicit, else the common finite domain, else [-4, 2]
    let pick = |explicit: &Option<Q>, lo: bool| -> Q {
        explicit.clone().unwrap_or_else(|| {
            let ends: Vec<Q> = fns
                .iter()
                .filter_map(|(_, f)| if lo { f.domain.lo.value().cloned() } else { f.domain.hi.value().cloned() })
                .collect();
            let fallback = parse_q(if lo { "-4" } else { "2" }).expect("literal");
            match (fns.len(), ends.len()) {
                (1, 1) => ends[0].clone(),
                _ => fallback,
            }
        })
    };
    let (lo, hi) = (pick(&from, true), pick(&to, false));
    if lo > hi {
        return Err(usage("--from must not exceed --to"));
    }
    Ok(match format {
        Format::Text => fns.iter().map(|(t, f)| envelope_text(t, f)).collect::<Vec<_>>().join("\n"),
        Format::Json => {
            let items: Vec<Json> = fns.iter().map(|(t, f)| json!({"title": t, "function": f})).collect();
            pretty(&json!({"format_version": FORMAT_VERSION, "functions": items}))
        }
        Format::Csv => {
            if fns.len() != 1 {
                return Err(usage("csv output takes exactly one function (one --class or a witness set)"));
            }
            if samples == 0 {
                return Err(usage("--samples must be positive"));
            }
            envelope_csv(&fns[0].0, &fns[0].1, &lo, &hi, samples, Exec::Parallel)
        }
        Format::Svg => {
            let panels: Vec<(&str, &EnvelopeFn)> = fns.iter().map(|(t, f)| (t.as_str(), f)).collect();
            envelopes_svg(&panels, &lo, &hi)
        }
    })
}

fn cmd_table(family: &str, from: u64, to: u64, target: Target, format: Format, sequential: bool) -> Result<String, Failure> {
    allow(format, &[Format::Text, Format::Json, Format::Csv], "table")?;
    if from > to {
        return Err(usage("--from must not exceed --to"));
    }
    let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
    let reports = bounds::scan(family, from..=to, target, exec)?;
    let opt = |v: Option<i64>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
    let witness = |r: &BoundReport| r.upper_witnesses().first().map_or_else(|| "-".to_string(), |m| m.name());
    Ok(match format {
        Format::Json => {
            let rows: Vec<Json> = reports.iter().map(|r| serde_json::to_value(r).expect("serialize")).collect();
            pretty(&json!({"format_version": FORMAT_VERSION, "family": family, "target": target, "reports": rows}))
        }
        Format::Csv => {
            let mut out = format!("# format_version={FORMAT_VERSION}\nparam,group,target,lower,upper,exact,witness\n");
            for (n, r) in (from..=to).zip(&reports) {
                out.push_str(&format!("{n},{},{},{},{},{},{}\n", r.group, r.target, opt(r.lower), opt(r.upper), r.exact, witness(r)));
            }
            out
        }
        _ => {
            let rows: Vec<[String; 6]> = (from..=to)
                .zip(&reports)
                .map(|(n, r)| [n.to_string(), r.group.clone(), opt(r.lower), opt(r.upper), if r.exact { "yes".into() } else { "no".into() }, witness(r)])
                .collect();
            let head = ["n", "group", "lower", "upper", "exact", "witness"];
            let mut width = head.map(str::len);
            for r in &rows {
                for (i, c) in r.iter().enumerate() {
                    width[i] = width[i].max(c.len());
                }
            }
            let mut out = format!("{family} family, target {target}\n");
            let mut line = |cells: Vec<&str>| {
                let s: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<w$}", w = width[i])).collect();
                out.push_str(s.join("  ").trim_end());
                out.push('\n');
            };
            line(head.to_vec());
            for r in &rows {
                line(r.iter().map(String::as_str).collect());
            }
            out
        }
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Bounds { input, target, format, assume_bmy, corvague, hypothetical } => {
            cmd_bounds(&input, target, format, BoundOptions { assume_bmy }, corvague.as_deref(), hypothetical)
        }
        Command::Construct { input, format } => cmd_construct(&input, format),
        Command::Abelianize { input, format, simplify } => cmd_abelianize(&input, format, simplify),
        Command::Geography { classes, witnesses, moves, sequence, a, b, from, to, samples, format } => {
            cmd_geography(&classes, &witnesses, &moves, sequence.as_deref(), &a, &b, &from, &to, samples, format)
        }
        Command::Table { family, from, to, target, format, sequential } => cmd_table(&family, from, to, target, format, sequential),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) if e.is_internal() => {
            eprintln!("internal error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
