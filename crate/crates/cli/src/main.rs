//! Command line front end: parse a model bundle, run constructions and
//! searches, emit certificates, verify them.
//!
//! Exit codes: 0 found or verified, 1 proven negative, 2 inconclusive,
//! 3 input error.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use groupshift::constructions::{self, BlockMode};
use groupshift::coset::SubgroupEmbedding;
use groupshift::error::{Error, Result};
use groupshift::model::{self, Model, SubgroupDef};
use groupshift::report;
use groupshift::shift::{Alphabet, Limits, SftDescription};
use groupshift::solvers::{
    self, Certificate, CertificateBody, Provenance, TransferDirection, TransferOutcome,
};
use groupshift::{GroupContext, GroupElement};

const EXIT_FOUND: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "groupshift", version, about = "Shifts of finite type over finitely generated groups")]
struct Cli {
    /// Model file holding named groups, subgroups, sfts and homs.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Also write the JSON payload to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Node budget for backtracking searches. Takes precedence over the
    /// GROUPSHIFT_BUDGET environment variable.
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Cap on pattern and assignment enumerations.
    #[arg(long, global = true)]
    pattern_cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum Direction {
    ToOvergroup,
    ToSubgroup,
}

#[derive(Subcommand)]
enum Command {
    /// Pattern-set transformations; the result is printed as SFT JSON.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Searches producing certificates.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Recheck a certificate file against a named SFT.
    Verify {
        #[arg(long)]
        sft: String,
        /// Path to the certificate JSON.
        #[arg(long)]
        cert: PathBuf,
    },
    /// Parse and validate a model file.
    Validate { path: PathBuf },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Recode an SFT over a finite-index subgroup on block letters.
    HigherBlock {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        subgroup: String,
        /// Explicit coset representatives (JSON element list); default is
        /// the subgroup's transversal.
        #[arg(long)]
        t_prime: Option<String>,
        /// Raw block cells (JSON element list). Builds the overlap shift I
        /// alone, without the single-block shift J.
        #[arg(long, conflicts_with = "t_prime")]
        raw_t: Option<String>,
    },
    /// Product of two SFTs over one group, on the pair alphabet.
    Product {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Configurations fixed by every listed group element.
    Fix {
        #[arg(long)]
        group: String,
        /// Comma-separated alphabet letters.
        #[arg(long)]
        letters: String,
        /// Take the generators of this subgroup.
        #[arg(long)]
        subgroup: Option<String>,
        /// Explicit generators as a JSON element list.
        #[arg(long, conflicts_with = "subgroup")]
        elements: Option<String>,
    },
    /// The locked shift of a normal finite-index subgroup.
    Locked {
        #[arg(long)]
        subgroup: String,
    },
    /// Read an SFT over the abstract subgroup as an SFT over the ambient
    /// group.
    Induce {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        subgroup: String,
    },
    /// Pull an SFT over the target of a quotient map back to the source.
    Pullback {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        hom: String,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Search the ball of a radius for a legal labeling; exhaustion
    /// certifies emptiness.
    Ball {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        radius: usize,
    },
    /// Search finite quotients for a strongly periodic point.
    Periodic {
        #[arg(long)]
        sft: String,
        #[arg(long, default_value_t = 8)]
        max_index: usize,
        /// Named homs to search instead of the built-in quotient stream
        /// (required for free groups and Heisenberg).
        #[arg(long)]
        quotient: Vec<String>,
    },
    /// Exact emptiness and minimal period over the group Z.
    Z {
        #[arg(long)]
        sft: String,
    },
    /// Move the search across a finite-index subgroup.
    Transfer {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        subgroup: String,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long, default_value_t = 8)]
        max_index: usize,
    },
    /// Search an SFT over the target of a quotient map through its pullback.
    Extension {
        #[arg(long)]
        sft: String,
        #[arg(long)]
        hom: String,
        #[arg(long, default_value_t = 8)]
        max_index: usize,
    },
    /// Look for a legal ball labeling invariant under one element.
    Invariant {
        #[arg(long)]
        sft: String,
        /// The element, as JSON.
        #[arg(long)]
        element: String,
        #[arg(long)]
        radius: usize,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => emit(&cli, outcome),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::BudgetExhausted { .. } | Error::CapExceeded(_) => EXIT_INCONCLUSIVE,
                _ => EXIT_INPUT,
            };
            ExitCode::from(code)
        }
    }
}

/// Exit code, text report, JSON payload.
type Outcome = (u8, String, Value);

fn emit(cli: &Cli, outcome: Outcome) -> ExitCode {
    let (code, text, payload) = outcome;
    let rendered = serde_json::to_string_pretty(&payload).expect("JSON values serialize");
    let body = match cli.format {
        Format::Text => text,
        Format::Json => format!("{rendered}\n"),
    };
    {
        use std::io::Write as _;
        let mut stdout = std::io::stdout().lock();
        let res = stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush());
        if let Err(e) = res {
            // A closed pipe downstream is not our error.
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                eprintln!("error: cannot write to stdout: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
        }
    }
    if let Some(path) = &cli.out {
        if let Err(e) = fs::write(path, rendered + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    ExitCode::from(code)
}

fn make_limits(cli: &Cli) -> Result<Limits> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var("GROUPSHIFT_BUDGET") {
        limits.node_budget = v.trim().parse().map_err(|_| {
            Error::InvalidModel(format!("GROUPSHIFT_BUDGET must be an integer, got {v:?}"))
        })?;
    }
    if let Some(b) = cli.budget {
        limits.node_budget = b;
    }
    if let Some(c) = cli.pattern_cap {
        limits.pattern_cap = c;
    }
    Ok(limits)
}

fn load_model(cli: &Cli) -> Result<Model> {
    let path = cli
        .model
        .as_ref()
        .ok_or_else(|| Error::InvalidModel("this subcommand needs --model".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidModel(format!("cannot read {}: {e}", path.display())))?;
    model::parse_model(&text)
}

fn get_sft<'m>(m: &'m Model, name: &str) -> Result<&'m SftDescription> {
    m.sfts
        .get(name)
        .ok_or_else(|| Error::InvalidModel(format!("model has no sft {name:?}")))
}

fn get_group<'m>(m: &'m Model, name: &str) -> Result<&'m Arc<GroupContext>> {
    m.groups
        .get(name)
        .ok_or_else(|| Error::InvalidModel(format!("model has no group {name:?}")))
}

fn get_subgroup<'m>(m: &'m Model, name: &str) -> Result<&'m SubgroupDef> {
    m.subgroups
        .get(name)
        .ok_or_else(|| Error::InvalidModel(format!("model has no subgroup {name:?}")))
}

fn get_hom<'m>(m: &'m Model, name: &str) -> Result<&'m groupshift::hom::Homomorphism> {
    m.homs
        .get(name)
        .ok_or_else(|| Error::InvalidModel(format!("model has no hom {name:?}")))
}

fn parse_elements(ctx: &Arc<GroupContext>, text: &str) -> Result<Vec<GroupElement>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidModel(format!("bad element list: {e}")))?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidModel("element list must be a JSON array".into()))?;
    arr.iter().map(|x| model::element_from_json(ctx, x)).collect()
}

fn render_elems(ctx: &GroupContext, elems: &[GroupElement]) -> String {
    elems.iter().map(|g| ctx.render(g)).collect::<Vec<_>>().join(" ")
}

/// Self-distrust: a solve result only reaches stdout after an independent
/// recheck.
fn certified(sft: &SftDescription, cert: &Certificate, limits: &Limits) -> Result<()> {
    let report = solvers::verify_certificate(sft, cert, limits)?;
    if !report.ok {
        return Err(Error::CertificateRejected(format!(
            "internal: produced certificate failed verification: {}",
            report.detail
        )));
    }
    Ok(())
}

fn found(sft: &SftDescription, cert: &Certificate, limits: &Limits) -> Result<Outcome> {
    certified(sft, cert, limits)?;
    Ok((
        EXIT_FOUND,
        report::render_certificate_for(sft, cert)?,
        model::certificate_to_json(sft, cert),
    ))
}

fn inconclusive(reason: String) -> Outcome {
    (
        EXIT_INCONCLUSIVE,
        format!("INCONCLUSIVE ({reason})\n"),
        json!({"outcome": "inconclusive", "reason": reason}),
    )
}

fn run(cli: &Cli) -> Result<Outcome> {
    let limits = make_limits(cli)?;
    match &cli.command {
        Command::Construct(cmd) => run_construct(cli, cmd, &limits),
        Command::Solve(cmd) => run_solve(cli, cmd, &limits),
        Command::Verify { sft, cert } => {
            let m = load_model(cli)?;
            let s = get_sft(&m, sft)?;
            let text = fs::read_to_string(cert)
                .map_err(|e| Error::InvalidModel(format!("cannot read {}: {e}", cert.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidModel(format!("bad certificate JSON: {e}")))?;
            let c = model::certificate_from_json(s, &v)?;
            let report = solvers::verify_certificate(s, &c, &limits)?;
            let code = if report.ok { EXIT_FOUND } else { EXIT_NEGATIVE };
            let payload = json!({"ok": report.ok, "detail": report.detail});
            Ok((code, report::render_verify(&report), payload))
        }
        Command::Validate { path } => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidModel(format!("cannot read {}: {e}", path.display())))?;
            let m = model::parse_model(&text)?;
            let mut out = format!(
                "model ok: {} groups, {} subgroups, {} sfts, {} homs\n",
                m.groups.len(),
                m.subgroups.len(),
                m.sfts.len(),
                m.homs.len()
            );
            let mut digests = serde_json::Map::new();
            for (name, s) in &m.sfts {
                let _ = writeln!(out, "  sft {name}: digest {}", s.digest());
                digests.insert(name.clone(), Value::String(s.digest()));
            }
            let payload = json!({
                "ok": true,
                "groups": m.groups.len(),
                "subgroups": m.subgroups.len(),
                "sfts": m.sfts.len(),
                "homs": m.homs.len(),
                "sft_digests": digests,
            });
            Ok((EXIT_FOUND, out, payload))
        }
    }
}

fn embedding_of<'m>(m: &'m Model, name: &str) -> Result<&'m SubgroupEmbedding> {
    get_subgroup(m, name)?.embedding()
}

fn run_construct(cli: &Cli, cmd: &ConstructCmd, limits: &Limits) -> Result<Outcome> {
    let m = load_model(cli)?;
    let (sft, extra) = match cmd {
        ConstructCmd::HigherBlock { sft, subgroup, t_prime, raw_t } => {
            let source = get_sft(&m, sft)?;
            let emb = embedding_of(&m, subgroup)?;
            let mode = match (raw_t, t_prime) {
                (Some(t), None) => BlockMode::Raw { t_set: parse_elements(source.group(), t)? },
                (None, Some(t)) => {
                    BlockMode::Blocked { t_prime: Some(parse_elements(source.group(), t)?) }
                }
                (None, None) => BlockMode::Blocked { t_prime: None },
                (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
            };
            let sys = constructions::higher_block_sft(source, emb, mode, limits)?;
            let mut extra = format!(
                "block cells: {}\n",
                render_elems(source.group(), sys.t_set())
            );
            let _ = writeln!(
                extra,
                "overlap support in the subgroup: {}",
                render_elems(emb.sub(), sys.overlap_support())
            );
            (sys.result().clone(), extra)
        }
        ConstructCmd::Product { left, right } => {
            let l = get_sft(&m, left)?;
            let r = get_sft(&m, right)?;
            let sys = constructions::product_sft(l, r, limits)?;
            (sys.sft, String::new())
        }
        ConstructCmd::Fix { group, letters, subgroup, elements } => {
            let g = get_group(&m, group)?;
            let alphabet =
                Alphabet::new(letters.split(',').map(|s| s.trim().to_string()).collect())?;
            let gens = match (subgroup, elements) {
                (Some(name), None) => {
                    let table = get_subgroup(&m, name)?.table();
                    if !table.group().same_group(g) {
                        return Err(Error::GroupMismatch(format!(
                            "subgroup {name:?} lives over {}, not {}",
                            table.group().name(),
                            g.name()
                        )));
                    }
                    table.schreier_generators()?
                }
                (None, Some(e)) => parse_elements(g, e)?,
                _ => {
                    return Err(Error::InvalidModel(
                        "fix needs exactly one of --subgroup or --elements".into(),
                    ))
                }
            };
            (constructions::fix_sft(g, &alphabet, &gens, limits)?, String::new())
        }
        ConstructCmd::Locked { subgroup } => {
            let table = get_subgroup(&m, subgroup)?.table();
            (constructions::locked_sft(table)?, String::new())
        }
        ConstructCmd::Induce { sft, subgroup } => {
            let s = get_sft(&m, sft)?;
            let emb = embedding_of(&m, subgroup)?;
            (constructions::induce_sft(s, emb)?, String::new())
        }
        ConstructCmd::Pullback { sft, hom } => {
            let sbar = get_sft(&m, sft)?;
            let f = get_hom(&m, hom)?;
            let pull = constructions::pullback_sft(sbar, f, limits)?;
            let mut extra = String::new();
            for (w, g) in &pull.section {
                let _ = writeln!(
                    extra,
                    "section: {} <- {}",
                    f.target().render(w),
                    f.source().render(g)
                );
            }
            (pull.sft, extra)
        }
    };
    let text = format!("{}{extra}", report::render_sft(&sft));
    Ok((EXIT_FOUND, text, model::sft_to_json(&sft)))
}

fn run_solve(cli: &Cli, cmd: &SolveCmd, limits: &Limits) -> Result<Outcome> {
    let m = load_model(cli)?;
    match cmd {
        SolveCmd::Ball { sft, radius } => {
            let s = get_sft(&m, sft)?;
            let cert = solvers::ball_search(s, *radius, limits)?;
            certified(s, &cert, limits)?;
            let empty = matches!(cert.body, CertificateBody::EmptyAtRadius { .. });
            let mut text = String::new();
            if empty {
                let _ = writeln!(text, "EMPTY (certified at radius {radius})");
            }
            text.push_str(&report::render_certificate_for(s, &cert)?);
            let code = if empty { EXIT_NEGATIVE } else { EXIT_FOUND };
            Ok((code, text, model::certificate_to_json(s, &cert)))
        }
        SolveCmd::Periodic { sft, max_index, quotient } => {
            let s = get_sft(&m, sft)?;
            let homs = if quotient.is_empty() {
                None
            } else {
                let listed: Vec<_> = quotient
                    .iter()
                    .map(|name| get_hom(&m, name).cloned())
                    .collect::<Result<_>>()?;
                Some(listed)
            };
            match solvers::periodic_enumerate(s, *max_index, homs.as_deref(), limits) {
                Ok(Some(cert)) => found(s, &cert, limits),
                Ok(None) => Ok(inconclusive(format!(
                    "no strongly periodic point through quotients of index at most {max_index}"
                ))),
                Err(Error::BudgetExhausted { .. }) => {
                    Ok(inconclusive(format!("budget {} nodes", limits.node_budget)))
                }
                Err(e) => Err(e),
            }
        }
        SolveCmd::Z { sft } => {
            let s = get_sft(&m, sft)?;
            let analysis = solvers::z_analyze(s, limits)?;
            let mut text = if analysis.empty {
                "empty\n".to_string()
            } else {
                format!(
                    "nonempty, minimal period {}\n",
                    analysis.minimal_period.expect("nonempty analyses carry a period")
                )
            };
            text.push_str(&report::render_analysis(&analysis)?);
            let mut payload = json!({
                "empty": analysis.empty,
                "window": analysis.window,
                "vertices_total": analysis.vertices_total,
                "vertices_live": analysis.vertices_live,
                "minimal_period": analysis.minimal_period,
                "certificate": Value::Null,
            });
            let code = match &analysis.point {
                Some(point) => {
                    let config = point.clone().canonical()?;
                    let stabilizer_index = config.stabilizer().index;
                    let cert = Certificate {
                        sft_digest: s.digest(),
                        body: CertificateBody::PeriodicPoint { config, stabilizer_index },
                        provenance: Provenance::new("z-analyze")
                            .with("window", analysis.window)
                            .with(
                                "minimal_period",
                                analysis.minimal_period.unwrap_or_default(),
                            ),
                    };
                    certified(s, &cert, limits)?;
                    text.push_str(&report::render_certificate_for(s, &cert)?);
                    payload["certificate"] = model::certificate_to_json(s, &cert);
                    EXIT_FOUND
                }
                None => EXIT_NEGATIVE,
            };
            Ok((code, text, payload))
        }
        SolveCmd::Transfer { sft, subgroup, direction, max_index } => {
            let s = get_sft(&m, sft)?;
            let emb = embedding_of(&m, subgroup)?;
            let dir = match direction {
                Direction::ToOvergroup => TransferDirection::ToOvergroup,
                Direction::ToSubgroup => TransferDirection::ToSubgroup,
            };
            match solvers::transfer_commensurable(s, emb, dir, *max_index, limits)? {
                TransferOutcome::Found(cert) => found(s, &cert, limits),
                TransferOutcome::Inconclusive { reason } => Ok(inconclusive(reason)),
            }
        }
        SolveCmd::Extension { sft, hom, max_index } => {
            let sbar = get_sft(&m, sft)?;
            let f = get_hom(&m, hom)?;
            match solvers::extension_push(sbar, f, *max_index, limits)? {
                TransferOutcome::Found(cert) => found(sbar, &cert, limits),
                TransferOutcome::Inconclusive { reason } => Ok(inconclusive(reason)),
            }
        }
        SolveCmd::Invariant { sft, element, radius } => {
            let s = get_sft(&m, sft)?;
            let v: Value = serde_json::from_str(element)
                .map_err(|e| Error::InvalidModel(format!("bad element: {e}")))?;
            let g = model::element_from_json(s.group(), &v)?;
            match solvers::g_invariant_search(s, &g, *radius, limits) {
                Ok(Some(cert)) => found(s, &cert, limits),
                Ok(None) => {
                    let text = format!(
                        "no legal labeling of the radius-{radius} ball is invariant under {}\n",
                        s.group().render(&g)
                    );
                    let payload = json!({
                        "outcome": "none",
                        "radius": radius,
                        "element": model::element_to_json(s.group(), &g),
                    });
                    Ok((EXIT_NEGATIVE, text, payload))
                }
                Err(Error::BudgetExhausted { .. }) => {
                    Ok(inconclusive(format!("budget {} nodes", limits.node_budget)))
                }
                Err(e) => Err(e),
            }
        }
    }
}
