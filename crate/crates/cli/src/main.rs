//! `freecore` command-line front end.
//!
//! Exit status: 0 success, 1 an oracle cross-check failed, 2 invalid input,
//! 3 the inputs fall outside every supported structure result.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use freecore::algebra::{is_tracial, AlgebraSpec};
use freecore::amalg::{
    centralizer_structure, compression_formula, to_canonical, Branch, CompressionScenario,
    GammaChoice,
};
use freecore::discrete_core::{build_core, dual_action, CoreDecomposition};
use freecore::document::{algebra_to_json, parse_document, scenario_to_json, Document};
use freecore::exact::{set_prime_bound, Rational};
use freecore::fdim::{fdim, finite_free_product};
use freecore::freeprod::free_product;
use freecore::modular::{factor_type_of, point_spectrum_ratios, sd_invariant, t_set_of};
use freecore::oracles::sequential_composition;
use freecore::Error;

const PRIME_BOUND_VAR: &str = "FREECORE_PRIME_BOUND";

#[derive(Parser, Debug)]
#[command(
    name = "freecore",
    version,
    about = "Exact structure of free products with almost periodic states"
)]
struct Cli {
    /// Truncation height for enumerated group labels and tail blocks.
    #[arg(long, global = true, default_value_t = 3)]
    height: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// How `γ(i)` is picked among the shared atoms of an index.
    #[arg(long = "gamma-choice", global = true, default_value = "smallest", value_parser = parse_gamma_choice)]
    gamma_choice: GammaChoice,

    /// Cross-check the result against the independent oracles.
    #[arg(long, global = true)]
    oracle: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// Deterministic JSON.
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite-dimensional part, type and Sd-invariant of the free product.
    Compute { first: PathBuf, second: PathBuf },
    /// Discrete core as an amalgamated free product over ℓ^∞(Γ).
    Core { first: PathBuf, second: PathBuf },
    /// Centralizer of the free product state in canonical form.
    Centralizer { first: PathBuf, second: PathBuf },
    /// Sd-invariant with its group basis.
    Sd { first: PathBuf, second: PathBuf },
    /// Free dimension of an algebra, or the compression parameter of a scenario.
    Fdim { input: PathBuf },
    /// Run every oracle that applies to the given documents.
    OracleCheck {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn parse_gamma_choice(s: &str) -> Result<GammaChoice, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Invalid(Error),
    Oracle,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

/// One line of a text report; `anchor` names the structural result backing it.
struct Line {
    text: String,
    anchor: Option<String>,
}

#[derive(Default)]
struct Report {
    lines: Vec<Line>,
    result: Value,
    checks: Vec<Check>,
}

impl Report {
    fn claim(&mut self, anchor: &str, text: impl Into<String>) {
        self.lines.push(Line {
            text: text.into(),
            anchor: Some(anchor.to_string()),
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.lines.push(Line {
            text: text.into(),
            anchor: None,
        });
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn error_anchor(e: &Error) -> &'static str {
    match e {
        Error::NonPositiveRatio(_) => "positive-ratio",
        Error::PrimeTooLarge { .. } => "prime-factorization-bound",
        Error::InvalidSpec(_) => "algebra-validation",
        Error::Dim22Rejected => "standing-dimension-assumption",
        Error::UnsupportedStructure(_) => "supported-structures",
        Error::NotScalarSummand(_) => "scalar-central-summand",
        Error::TrivialGamma => "nontrivial-sd-invariant",
        Error::RatioOutsideGroup(_) => "group-membership",
        Error::SubgroupNotContained { .. } => "sd-subgroup-containment",
        Error::DisconnectedIndex(_) => "relative-commutant-connectivity",
        Error::InvalidScenario(_) => "compression-scenario-invariants",
        Error::HypothesesNotRecognized(_) => "structure-theorem-hypotheses",
        Error::Parse(_) => "input-schema",
    }
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialise")
}

fn read_document(path: &Path) -> Result<Document, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn read_algebra(path: &Path) -> Result<AlgebraSpec, Error> {
    match read_document(path)? {
        Document::Algebra(a) => Ok(a),
        Document::Scenario(_) => Err(Error::Parse(format!(
            "{}: expected an algebra description, found a scenario",
            path.display()
        ))),
    }
}

fn round_trip_check(report: &mut Report, path: &Path, doc: &Document) {
    let back = match doc {
        Document::Algebra(a) => parse_document(&algebra_to_json(a)),
        Document::Scenario(s) => parse_document(&scenario_to_json(s)),
    };
    report.check(
        format!("round-trip {}", path.display()),
        back.as_ref() == Ok(doc),
        "serialise then parse gives the same document",
    );
}

fn weights(ws: &[(freecore::amalg::StructureExpr, Rational)]) -> String {
    if ws.is_empty() {
        return "0".into();
    }
    ws.iter()
        .map(|(x, w)| format!("{x} ({w})"))
        .collect::<Vec<_>>()
        .join(" ⊕ ")
}

fn compute(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    oracle: bool,
    report: &mut Report,
) -> Result<(), Error> {
    let fp = free_product(a, b)?;
    report.claim(
        "finite-part-decomposition",
        format!(
            "M_d = {}; M_c has unit weight {}",
            weights(&fp.m_d),
            fp.m_c_unit_weight
        ),
    );
    report.claim(
        "diffuse-type-classification",
        format!("M_c is a factor of type {}", fp.m_c_type),
    );
    report.claim("sd-invariant", format!("Sd(M_c) = {}", fp.sd));
    report.claim("modular-period-set", format!("T(M_c) = {}", fp.t_set));
    report.claim(
        "trivial-central-sequences",
        format!("M_c' ∩ M_c^ω = ℂ: {}", fp.central_sequences_trivial),
    );
    for step in &fp.reduction_trace {
        report.note(format!("reduction: {step}"));
    }
    if oracle {
        let total: Rational = fp.m_d.iter().map(|(_, w)| w).sum::<Rational>() + &fp.m_c_unit_weight;
        report.check(
            "unit weight",
            total.is_one(),
            format!("Σ M_d + M_c = {total}"),
        );
        let expected = factor_type_of(&fp.sd);
        report.check(
            "type matches Sd",
            expected == fp.m_c_type,
            format!("Sd gives {expected}, reported {}", fp.m_c_type),
        );
    }
    report.result = to_json(&fp);
    Ok(())
}

fn core_report(c: &CoreDecomposition, report: &mut Report) -> Result<(), Error> {
    let gens: Vec<String> = c
        .labels
        .group
        .generator_values()
        .iter()
        .map(|v| v.to_string())
        .collect();
    report.claim(
        "core-label-algebra",
        format!(
            "Γ = {} generated by {{{}}}, {} labels up to height {}",
            c.labels.group,
            gens.join(", "),
            c.labels.labels.len(),
            c.labels.height
        ),
    );
    for l in &c.labels.labels {
        report.claim("core-trace-law", format!("Tr(e_{}) = {}", l.value, l.trace));
    }
    report.claim(
        "core-trace-law",
        format!("Σ_γ Tr(e_γ) diverges: {}", c.trace_sum_diverges),
    );
    for (side, comps) in [(1, &c.components.0), (2, &c.components.1)] {
        for comp in comps {
            report.claim(
                "core-crossed-components",
                format!("input {side}: {} ⋊ Γ̂ ≅ {}", comp.source, comp.expr()),
            );
        }
    }
    report.claim(
        "core-amalgamated-decomposition",
        format!("core ≅ {}", c.expression),
    );
    for (x, w) in &c.central_parts.md_copies {
        report.claim("core-central-decomposition", format!("{x} (weight {w})"));
    }
    report.claim(
        "core-central-decomposition",
        format!("core of M_c ≅ {}", c.central_parts.core_of_mc),
    );
    let mut actions = Vec::new();
    for g in c.labels.group.generators() {
        let d = dual_action(&c.labels, &g)?;
        let shown: Vec<String> = d
            .map
            .iter()
            .filter(|(x, _)| x.is_identity() || x.height() <= 1)
            .map(|(x, y)| format!("e_{x} ↦ e_{y}"))
            .collect();
        report.claim(
            "dual-action",
            format!(
                "θ_{}: {}; Tr ∘ θ = {} Tr",
                d.by,
                shown.join(", "),
                d.trace_scaling
            ),
        );
        actions.push(to_json(&d));
    }
    report.result = json!({ "core": to_json(c), "dual_action": actions });
    Ok(())
}

fn core_oracles(c: &CoreDecomposition, report: &mut Report) -> Result<(), Error> {
    let bad = c
        .labels
        .labels
        .iter()
        .filter(|l| !(&l.trace * &l.value).is_one())
        .count();
    report.check(
        "trace law",
        bad == 0,
        format!("{} labels, {bad} with Tr(e_γ)·γ ≠ 1", c.labels.labels.len()),
    );
    let gens = c.labels.group.generators();
    let mut violations = 0usize;
    for a in &gens {
        for b in &gens {
            let (ta, tb, tab) = (
                dual_action(&c.labels, a)?,
                dual_action(&c.labels, b)?,
                dual_action(&c.labels, &a.mul(b))?,
            );
            if tab.trace_scaling != &ta.trace_scaling * &tb.trace_scaling {
                violations += 1;
            }
            for ((_, bx), (_, abx)) in tb.map.iter().zip(&tab.map) {
                if &a.mul(bx) != abx {
                    violations += 1;
                }
            }
        }
    }
    report.check(
        "dual action composition",
        violations == 0,
        format!("{violations} violations over generator pairs"),
    );
    Ok(())
}

fn centralizer(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    height: u64,
    oracle: bool,
    report: &mut Report,
) -> Result<(), Error> {
    let rep = centralizer_structure(a, b, height)?;
    let anchor = rep.anchor();
    report.claim(anchor, format!("centralizer (M_c)^φ ≅ {}", rep.canonical));
    if rep.raw != rep.canonical {
        report.claim(anchor, format!("before normalisation: {}", rep.raw));
    }
    report.claim(
        anchor,
        format!("M_c is of type {} with Γ = {}", rep.m_c_type, rep.gamma),
    );
    if rep.branch != Branch::TracialFinite {
        report.claim(
            anchor,
            format!("discrete core is stably an {}", rep.core_class()),
        );
    }
    for f in &rep.flags {
        report.claim(&f.anchor, format!("{}: {}", f.name, f.holds));
    }
    for t in &rep.expansion {
        report.note(format!(
            "γ = {}: amplification {} of {}",
            t.label, t.amplification, t.expr
        ));
    }
    if let Some(l) = &rep.layering {
        report.note(format!(
            "γ* = {} from block {}, c = {}",
            l.gamma_star, l.block, l.c
        ));
        report.note(format!("increasing exponents m_k = {:?}", l.sequence));
        for p in &l.picks {
            report.note(format!(
                "m = {}: index {} with γ(i) = {}",
                p.m, p.index, p.gamma
            ));
        }
    }
    if oracle {
        let again = to_canonical(&rep.canonical)?;
        report.check(
            "canonical idempotent",
            again == rep.canonical,
            format!("{again}"),
        );
        if rep.branch == Branch::TracialFinite {
            let ffp = finite_free_product(a, b)?;
            let lhs = ffp.output_fdim();
            let rhs = ffp.fdim_inputs.0.add(&ffp.fdim_inputs.1);
            report.check("fdim additivity", lhs == rhs, format!("{lhs} vs {rhs}"));
        }
    }
    report.result = to_json(&rep);
    Ok(())
}

fn sd(
    a: &AlgebraSpec,
    b: &AlgebraSpec,
    height: u64,
    oracle: bool,
    report: &mut Report,
) -> Result<(), Error> {
    let g = sd_invariant(a, b)?;
    let primes: Vec<String> = g.primes().iter().map(u64::to_string).collect();
    report.claim("sd-invariant", format!("Sd = {g}"));
    report.claim(
        "sd-invariant",
        format!(
            "rank {} over primes [{}], basis {:?}",
            g.rank(),
            primes.join(", "),
            g.basis()
        ),
    );
    report.claim("modular-period-set", format!("T = {}", t_set_of(&g)));
    report.claim(
        "diffuse-type-classification",
        format!("type {}", factor_type_of(&g)),
    );
    if oracle {
        let mut outside = Vec::new();
        for spec in [a, b] {
            for r in point_spectrum_ratios(spec, height as usize)? {
                if !g.contains(&r)? {
                    outside.push(r.to_string());
                }
            }
        }
        report.check(
            "spectral ratios in Sd",
            outside.is_empty(),
            format!("outside: {outside:?}"),
        );
        if let Some(l) = g.cyclic_generator() {
            let back = freecore::exact::group_from_ratios(std::slice::from_ref(&l))?;
            report.check("cyclic generator", back == g, format!("{l}^ℤ"));
        }
    }
    report.result = json!({
        "group": to_json(&g),
        "generators": to_json(&g.generator_values()),
        "t_set": to_json(&t_set_of(&g)),
        "type": to_json(&factor_type_of(&g)),
    });
    Ok(())
}

fn scenario_oracle(
    sc: &CompressionScenario,
    choice: &GammaChoice,
    r: &Rational,
    report: &mut Report,
) -> Result<(), Error> {
    let or = sequential_composition(sc, choice)?;
    report.check(
        "sequential composition",
        &or.r == r,
        format!("formula {r}, composition {}", or.r),
    );
    Ok(())
}

fn fdim_command(
    path: &Path,
    choice: &GammaChoice,
    oracle: bool,
    report: &mut Report,
) -> Result<(), Error> {
    let doc = read_document(path)?;
    if oracle {
        round_trip_check(report, path, &doc);
    }
    match doc {
        Document::Algebra(a) => {
            let f = fdim(&a)?;
            report.claim("free-dimension", format!("fdim({}) = {f}", a.name));
            report.result = json!({ "fdim": to_json(&f) });
        }
        Document::Scenario(sc) => {
            let res = compression_formula(&sc, choice)?;
            report.claim("compression-formula", format!("r = {}", res.r));
            report.claim(
                "compression-formula",
                format!("compressed algebra ≅ {}", res.expr),
            );
            for (name, g) in &res.gammas {
                report.note(format!("γ({name}) = {g}"));
            }
            if oracle {
                scenario_oracle(&sc, choice, &res.r, report)?;
            }
            report.result = to_json(&res);
        }
    }
    Ok(())
}

fn oracle_check(
    paths: &[PathBuf],
    choice: &GammaChoice,
    height: u64,
    report: &mut Report,
) -> Result<(), Error> {
    let mut algebras = Vec::new();
    for p in paths {
        let doc = read_document(p)?;
        round_trip_check(report, p, &doc);
        match doc {
            Document::Scenario(sc) => {
                let res = compression_formula(&sc, choice)?;
                scenario_oracle(&sc, choice, &res.r, report)?;
            }
            Document::Algebra(a) => algebras.push(a),
        }
    }
    for pair in algebras.chunks(2) {
        let [a, b] = pair else {
            report.note(format!(
                "{} has no partner; only the round trip was checked",
                pair[0].name
            ));
            continue;
        };
        if is_tracial(a) && is_tracial(b) {
            let ffp = finite_free_product(a, b)?;
            let lhs = ffp.output_fdim();
            let rhs = ffp.fdim_inputs.0.add(&ffp.fdim_inputs.1);
            report.check(
                format!("fdim additivity {} ⋆ {}", a.name, b.name),
                lhs == rhs,
                format!("{lhs} vs {rhs}"),
            );
        } else {
            let c = build_core(a, b, height)?;
            core_oracles(&c, report)?;
        }
    }
    let checks: Vec<Value> = report.checks.iter().map(to_json).collect();
    report.result = json!({ "checks": checks });
    Ok(())
}

fn run(cli: &Cli, report: &mut Report) -> Result<(), Error> {
    if let Ok(v) = std::env::var(PRIME_BOUND_VAR) {
        let bound: u64 = v.trim().parse().ok().filter(|b| *b >= 2).ok_or_else(|| {
            Error::Parse(format!("{PRIME_BOUND_VAR}={v:?} is not an integer ≥ 2"))
        })?;
        set_prime_bound(bound);
    }
    let pair = |a: &PathBuf, b: &PathBuf| -> Result<(AlgebraSpec, AlgebraSpec), Error> {
        Ok((read_algebra(a)?, read_algebra(b)?))
    };
    match &cli.command {
        Command::Compute { first, second } => {
            let (a, b) = pair(first, second)?;
            compute(&a, &b, cli.oracle, report)
        }
        Command::Core { first, second } => {
            let (a, b) = pair(first, second)?;
            let c = build_core(&a, &b, cli.height)?;
            core_report(&c, report)?;
            if cli.oracle {
                core_oracles(&c, report)?;
            }
            Ok(())
        }
        Command::Centralizer { first, second } => {
            let (a, b) = pair(first, second)?;
            centralizer(&a, &b, cli.height, cli.oracle, report)
        }
        Command::Sd { first, second } => {
            let (a, b) = pair(first, second)?;
            sd(&a, &b, cli.height, cli.oracle, report)
        }
        Command::Fdim { input } => fdim_command(input, &cli.gamma_choice, cli.oracle, report),
        Command::OracleCheck { inputs } => {
            oracle_check(inputs, &cli.gamma_choice, cli.height, report)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Compute { .. } => "compute",
        Command::Core { .. } => "core",
        Command::Centralizer { .. } => "centralizer",
        Command::Sd { .. } => "sd",
        Command::Fdim { .. } => "fdim",
        Command::OracleCheck { .. } => "oracle-check",
    }
}

fn emit(cli: &Cli, report: &Report, failure: Option<&Failure>) {
    // a closed pipe (e.g. `| head`) is not an error of ours
    let mut out = std::io::stdout().lock();
    match cli.format {
        Format::Machine => {
            let mut doc = json!({
                "command": command_name(&cli.command),
                "height": cli.height,
                "gamma_choice": cli.gamma_choice.to_string(),
            });
            if let Some(Failure::Invalid(e)) = failure {
                doc["error"] = json!({
                    "message": e.to_string(),
                    "anchor": error_anchor(e),
                    "exit_code": e.exit_code(),
                });
            } else {
                doc["result"] = report.result.clone();
                if !report.checks.is_empty() {
                    doc["checks"] = report.checks.iter().map(to_json).collect();
                }
            }
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("json value")
            );
        }
        Format::Text => {
            if let Some(Failure::Invalid(e)) = failure {
                eprintln!("error [{}]: {e}", error_anchor(e));
                return;
            }
            for l in &report.lines {
                let _ = match &l.anchor {
                    Some(a) => writeln!(out, "{}  [{a}]", l.text),
                    None => writeln!(out, "  {}", l.text),
                };
            }
            for c in &report.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(out, "oracle {status}: {}: {}", c.name, c.detail);
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::default();
    let failure = match run(&cli, &mut report) {
        Err(e) => Some(Failure::from(e)),
        Ok(()) if report.checks.iter().any(|c| !c.pass) => Some(Failure::Oracle),
        Ok(()) => None,
    };
    emit(&cli, &report, failure.as_ref());
    ExitCode::from(exit_status(failure.as_ref()))
}

fn exit_status(failure: Option<&Failure>) -> u8 {
    match failure {
        None => 0,
        Some(Failure::Oracle) => 1,
        Some(Failure::Invalid(e)) => e.exit_code() as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_statuses() {
        assert_eq!(exit_status(None), 0);
        assert_eq!(exit_status(Some(&Failure::Oracle)), 1);
        assert_eq!(
            exit_status(Some(&Failure::Invalid(Error::Dim22Rejected))),
            2
        );
        assert_eq!(exit_status(Some(&Failure::Invalid(Error::TrivialGamma))), 3);
        let e = Error::HypothesesNotRecognized("x".into());
        assert_eq!(exit_status(Some(&Failure::Invalid(e))), 3);
    }

    #[test]
    fn every_error_has_an_anchor() {
        let e = Error::DisconnectedIndex(vec!["3".into()]);
        assert_eq!(error_anchor(&e), "relative-commutant-connectivity");
    }
}
