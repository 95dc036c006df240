//! Subcommand implementations: load an input, run the computation, and
//! assemble a report whose verdict becomes the process exit code.

use std::fs;

use clap::{Parser, Subcommand};

use crate::builtins;
use crate::lower::{self, Lowered};
use crate::parser;
use crate::report::{Report, Verdict};
use vertexkit::cdmod::{FgModule, Gen, ModElement, Submodule};
use vertexkit::cohom::{self, CoefficientModule};
use vertexkit::exact::{Rational, Window, EXACT};
use vertexkit::gcmat::{self, ConformalMatrix, GcError};
use vertexkit::lca::{AxiomFailure, ConformalAlgebra, SeriesOutcome, SeriesReport};
use vertexkit::va::{self, conformal_shadow, LocalityVerdict, VaError, VertexTable};

/// Exact computations for finite Lie conformal algebras and finite vertex
/// algebra tables.
#[derive(Parser, Debug)]
#[command(name = "vertexkit", version, about)]
pub struct Cli {
    /// Emit the machine-readable report form.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Laurent window size for order-limited computations.
    #[arg(long, global = true, default_value_t = 8)]
    pub window: i64,
    /// Degree bound for lambda/del ansatz computations.
    #[arg(long, global = true, default_value_t = 8)]
    pub lambda_degree: u32,
    /// Iteration budget for series, chains, and locality orders.
    #[arg(long, global = true, default_value_t = 12)]
    pub max_steps: usize,
    /// Treat a locality failure as the expected outcome and admit odd
    /// finitevertex tables.
    #[arg(long, global = true)]
    pub expect_locality_failure: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the defining identities of a conformal algebra (or of the
    /// conformal shadow of a vertex table).
    CheckAxioms { input: String },
    /// Iterate the derived series and report on solvability.
    DerivedSeries { input: String },
    /// Iterate the central series and report on nilpotency.
    CentralSeries { input: String },
    /// Compute the center on the bounded ansatz slice.
    Center { input: String },
    /// Print the adjoint matrix of a generator.
    Adjoint { input: String, gen: String },
    /// Check that the matrix action (or adjoint actions) are nilpotent.
    NilpotentAction { input: String, gen: Option<String> },
    /// Generalized weight decomposition of a conformal-linear map.
    Weights { input: String, gen: Option<String> },
    /// Second cohomology of a coefficient module, via both routes.
    H2 { input: String },
    /// Classify which coefficient summands carry an irreducible extension.
    ClassifyExt { input: String },
    /// Check the vacuum, creation, translation, and skew identities.
    VertexCheck { input: String },
    /// Find minimal locality orders for generator pairs.
    Locality { input: String, a: Option<String>, b: Option<String>, on: Option<String> },
    /// Check the generalized Wick identity on generator triples.
    Genwick { input: String, a: Option<String>, b: Option<String>, c: Option<String> },
    /// Print the visible n-th products of generator pairs.
    Products { input: String, a: Option<String>, b: Option<String> },
    /// Descending product chains and the nilpotency of the stable term.
    NilSeries { input: String },
    /// Verify that the candidate Virasoro field equation fails at a finite
    /// coefficient while its differential-equation control holds.
    Novir { central_charge: Option<String> },
    /// Build the two-generator example table and run its whole battery.
    ExampleFinitevertex { psi: Option<String> },
}

pub fn run(cli: &Cli) -> Result<Report, String> {
    match &cli.command {
        Command::CheckAxioms { input } => check_axioms(input, cli),
        Command::DerivedSeries { input } => series(input, cli, false),
        Command::CentralSeries { input } => series(input, cli, true),
        Command::Center { input } => center(input, cli),
        Command::Adjoint { input, gen } => adjoint(input, gen, cli),
        Command::NilpotentAction { input, gen } => nilpotent_action(input, gen, cli),
        Command::Weights { input, gen } => weights(input, gen, cli),
        Command::H2 { input } => h2(input, cli),
        Command::ClassifyExt { input } => classify_ext(input, cli),
        Command::VertexCheck { input } => vertex_check(input, cli),
        Command::Locality { input, a, b, on } => locality(input, a, b, on, cli),
        Command::Genwick { input, a, b, c } => genwick(input, a, b, c, cli),
        Command::Products { input, a, b } => products(input, a, b, cli),
        Command::NilSeries { input } => nil_series(input, cli),
        Command::Novir { central_charge } => novir(central_charge, cli),
        Command::ExampleFinitevertex { psi } => example_finitevertex(psi, cli),
    }
}

/// Resolve an input as a built-in name or a definition file; the second
/// component is the canonical printed definition used for the digest.
fn load(input: &str, cli: &Cli) -> Result<(Lowered, String), String> {
    if let Some((lowered, def)) = builtins::resolve(input, cli.expect_locality_failure)? {
        return Ok((lowered, def.to_string()));
    }
    let src = fs::read_to_string(input).map_err(|e| format!("cannot read `{}`: {}", input, e))?;
    let def = parser::parse_definition(&src).map_err(|e| format!("{}: {}", input, e))?;
    let lowered = lower::lower(&def).map_err(|e| format!("{}: {}", input, e))?;
    Ok((lowered, def.to_string()))
}

fn as_conformal(input: &str, cli: &Cli) -> Result<(ConformalAlgebra, String, bool), String> {
    let (lowered, canonical) = load(input, cli)?;
    match lowered {
        Lowered::Conformal(a) => Ok((a, canonical, false)),
        Lowered::Vertex(v) => {
            let shadow = conformal_shadow(&v)
                .map_err(|e| format!("cannot take the conformal shadow of `{}`: {}", input, e))?;
            Ok((shadow, canonical, true))
        }
        other => Err(format!(
            "`{}` is a {}, expected a conformal algebra or a vertex table",
            input,
            other.kind_word()
        )),
    }
}

fn as_vertex(input: &str, cli: &Cli) -> Result<(VertexTable, String), String> {
    let (lowered, canonical) = load(input, cli)?;
    match lowered {
        Lowered::Vertex(v) => Ok((v, canonical)),
        other => {
            Err(format!("`{}` is a {}, expected a vertex table", input, other.kind_word()))
        }
    }
}

fn as_coeff(input: &str, cli: &Cli) -> Result<(CoefficientModule, String), String> {
    let (lowered, canonical) = load(input, cli)?;
    match lowered {
        Lowered::Coeff(c) => Ok((c, canonical)),
        other => {
            Err(format!("`{}` is a {}, expected a coefficient module", input, other.kind_word()))
        }
    }
}

/// Fail dominates inconclusive dominates pass.
fn worsen(current: &mut Verdict, new: Verdict) {
    let rank = |v: Verdict| match v {
        Verdict::Pass => 0,
        Verdict::Inconclusive => 1,
        Verdict::Fail => 2,
    };
    if rank(new) > rank(*current) {
        *current = new;
    }
}

fn outcome_word(o: SeriesOutcome) -> String {
    match o {
        SeriesOutcome::ReachedZero { steps } => format!("reaches zero after {} steps", steps),
        SeriesOutcome::Stabilized { steps } => format!("stabilizes nonzero at step {}", steps),
        SeriesOutcome::Inconclusive { steps } => format!("inconclusive after {} steps", steps),
    }
}

fn fmt_bound(b: i64) -> String {
    if b >= EXACT / 2 {
        "inf".to_string()
    } else if b <= -EXACT / 2 {
        "-inf".to_string()
    } else {
        b.to_string()
    }
}

fn fmt_window(w: &Window) -> String {
    format!("z^[{}..{}]", fmt_bound(w.low[0]), fmt_bound(w.high[0]))
}

fn axiom_witness(alg: &ConformalAlgebra, f: &AxiomFailure) -> String {
    let m = alg.module();
    let names: Vec<&str> = f.gens.iter().map(|&g| m.gen_name(g)).collect();
    format!(
        "{} on ({}): lhs = {}, rhs = {}",
        f.axiom,
        names.join(", "),
        f.lhs.show(m),
        f.rhs.show(m)
    )
}

fn check_axioms(input: &str, cli: &Cli) -> Result<Report, String> {
    let (alg, canonical, shadow) = as_conformal(input, cli)?;
    let mut report = Report::new("check-axioms", input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    let m = alg.module();
    report.push("free-rank", m.free_rank());
    report.push("torsion-dim", m.torsion_dim());
    let failures = alg.check_axioms();
    report.push("identities", "sesquilinearity, skew-symmetry, jacobi");
    report.push("failures", failures.len());
    if let Some(f) = failures.first() {
        report.push("witness", axiom_witness(&alg, f));
        report.set_verdict(Verdict::Fail);
    }
    Ok(report)
}

fn push_series(report: &mut Report, m: &FgModule, sr: &SeriesReport, brackets: (&str, &str), word: &str) {
    for (k, t) in sr.terms.iter().enumerate() {
        report.push(&format!("term.{}", k), format!("rank {}: {}", t.rank(), t.show(m)));
    }
    let (open, close) = brackets;
    match sr.outcome {
        SeriesOutcome::ReachedZero { steps } => {
            report.push("status", format!("{}: the series reaches zero after {} steps", word, steps));
        }
        SeriesOutcome::Stabilized { steps } => {
            report.push(
                "status",
                format!(
                    "not {}: R^{}{}{} = R^{}{}{}",
                    word,
                    open,
                    steps,
                    close,
                    open,
                    steps - 1,
                    close
                ),
            );
        }
        SeriesOutcome::Inconclusive { steps } => {
            report.push("status", format!("inconclusive after {} steps; raise --max-steps", steps));
            report.set_verdict(Verdict::Inconclusive);
        }
    }
}

fn series(input: &str, cli: &Cli, central: bool) -> Result<Report, String> {
    let (alg, canonical, shadow) = as_conformal(input, cli)?;
    let name = if central { "central-series" } else { "derived-series" };
    let mut report = Report::new(name, input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    report.push("max-steps", cli.max_steps);
    let sr = if central {
        alg.central_series(cli.max_steps)
    } else {
        alg.derived_series(cli.max_steps)
    };
    let (brackets, word) =
        if central { (("[", "]"), "nilpotent") } else { (("(", ")"), "solvable") };
    push_series(&mut report, alg.module(), &sr, brackets, word);
    Ok(report)
}

fn center(input: &str, cli: &Cli) -> Result<Report, String> {
    let (alg, canonical, shadow) = as_conformal(input, cli)?;
    let mut report = Report::new("center", input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    let m = alg.module();
    let rep = alg.center_report(cli.lambda_degree);
    report.push("deg-bound", rep.deg_bound);
    report.push("rank", rep.center.rank());
    for (k, r) in rep.center.rows().iter().enumerate() {
        report.push(&format!("row.{}", k), r.show(m));
    }
    report.push("saturated", rep.saturated);
    if !rep.saturated {
        report.set_verdict(Verdict::Inconclusive);
    }
    Ok(report)
}

fn adjoint(input: &str, gen: &str, cli: &Cli) -> Result<Report, String> {
    let (alg, canonical, shadow) = as_conformal(input, cli)?;
    let mut report = Report::new("adjoint", input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    let m = alg.module();
    let g = m.gen_by_name(gen).map_err(|e| e.to_string())?;
    let adj = gcmat::adjoint_matrix(&alg, &ModElement::generator(m, g));
    report.push("generator", gen);
    for c in 0..m.free_rank() {
        report.push(
            &format!("column.{}", m.gen_name(Gen(c))),
            adj.col(c).show(m),
        );
    }
    report.push("max-del-degree", adj.max_del_degree());
    Ok(report)
}

/// The matrices a nilpotent-action or weights command operates on.
fn action_matrices(
    input: &str,
    gen: &Option<String>,
    cli: &Cli,
) -> Result<(FgModule, Vec<(String, ConformalMatrix)>, String, bool), String> {
    let (lowered, canonical) = load(input, cli)?;
    match lowered {
        Lowered::GcMap { module, matrix } => {
            Ok((module, vec![("map".to_string(), matrix)], canonical, false))
        }
        Lowered::Conformal(a) => {
            let (m, mats) = adjoints_of(&a, gen)?;
            Ok((m, mats, canonical, false))
        }
        Lowered::Vertex(v) => {
            let shadow = conformal_shadow(&v)
                .map_err(|e| format!("cannot take the conformal shadow of `{}`: {}", input, e))?;
            let (m, mats) = adjoints_of(&shadow, gen)?;
            Ok((m, mats, canonical, true))
        }
        other => Err(format!(
            "`{}` is a {}, expected a conformal-linear map, a conformal algebra, or a vertex table",
            input,
            other.kind_word()
        )),
    }
}

fn adjoints_of(
    a: &ConformalAlgebra,
    gen: &Option<String>,
) -> Result<(FgModule, Vec<(String, ConformalMatrix)>), String> {
    let m = a.module();
    let gens: Vec<Gen> = match gen {
        Some(name) => vec![m.gen_by_name(name).map_err(|e| e.to_string())?],
        None => (0..m.free_rank()).map(Gen).collect(),
    };
    let mats = gens
        .into_iter()
        .map(|g| {
            let label = format!("ad({})", m.gen_name(g));
            (label, gcmat::adjoint_matrix(a, &ModElement::generator(m, g)))
        })
        .collect();
    Ok((m.clone(), mats))
}

fn nilpotent_action(input: &str, gen: &Option<String>, cli: &Cli) -> Result<Report, String> {
    let (m, mats, canonical, shadow) = action_matrices(input, gen, cli)?;
    let mut report = Report::new("nilpotent-action", input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    report.push("max-steps", cli.max_steps);
    let mut verdict = Verdict::Pass;
    for (label, f) in &mats {
        let rep = gcmat::action_nilpotent(&m, f, cli.max_steps);
        report.push(&format!("action.{}", label), outcome_word(rep.outcome));
        match rep.outcome {
            SeriesOutcome::ReachedZero { .. } => {}
            SeriesOutcome::Stabilized { .. } => {
                let stable = rep.terms.last().expect("chain is never empty");
                report.push(
                    &format!("witness.{}", label),
                    format!("fixed image of rank {}: {}", stable.rank(), stable.show(&m)),
                );
                worsen(&mut verdict, Verdict::Fail);
            }
            SeriesOutcome::Inconclusive { .. } => worsen(&mut verdict, Verdict::Inconclusive),
        }
    }
    report.set_verdict(verdict);
    Ok(report)
}

fn weights(input: &str, gen: &Option<String>, cli: &Cli) -> Result<Report, String> {
    let (m, mut mats, canonical, shadow) = action_matrices(input, gen, cli)?;
    if mats.len() != 1 {
        return Err(format!(
            "`{}` has several generators; pass one name to decompose under its adjoint",
            input
        ));
    }
    let (label, f) = mats.remove(0);
    let mut report = Report::new("weights", input, &canonical);
    if shadow {
        report.push("shadow", "conformal shadow of the vertex table");
    }
    report.push("operator", label);
    report.push("deg-bound", cli.lambda_degree);
    let rep = match gcmat::fitting_decomposition(&m, &f, None, cli.lambda_degree, cli.max_steps) {
        Ok(rep) => rep,
        Err(GcError::BracketChainNotNilpotent) => {
            report.push("witness", GcError::BracketChainNotNilpotent.to_string());
            report.set_verdict(Verdict::Fail);
            return Ok(report);
        }
        Err(e) => return Err(e.to_string()),
    };
    report.push("precondition", outcome_word(rep.precondition));
    let mut verdict = Verdict::Pass;
    if matches!(rep.precondition, SeriesOutcome::Inconclusive { .. }) {
        worsen(&mut verdict, Verdict::Inconclusive);
    }
    let mut chains: Vec<&gcmat::WeightReport> = vec![&rep.zero_chain];
    chains.extend(rep.other_chains.iter());
    for (k, c) in chains.iter().enumerate() {
        let rank = c.submodule.as_ref().map(|s| s.rank().to_string());
        report.push(
            &format!("chain.{}", k),
            format!(
                "weight {}: slice dim {}, rank {}",
                c.weight,
                c.space.dim(),
                rank.as_deref().unwrap_or("not del-closed in bound"),
            ),
        );
        if !c.stabilized || !c.del_closed_in_bound {
            worsen(&mut verdict, Verdict::Inconclusive);
        }
    }
    report.push("pairwise-direct", rep.pairwise_direct);
    report.push("spans-slice", format!("{} ({} of {})", rep.spans_slice, rep.sum_dim, rep.slice_dim));
    if !rep.pairwise_direct {
        worsen(&mut verdict, Verdict::Fail);
    }
    if !rep.spans_slice {
        worsen(&mut verdict, Verdict::Inconclusive);
    }
    report.set_verdict(verdict);
    Ok(report)
}

fn h2(input: &str, cli: &Cli) -> Result<Report, String> {
    let (c, canonical) = as_coeff(input, cli)?;
    let rep = cohom::h2(&c, cli.lambda_degree).map_err(|e| e.to_string())?;
    let mut report = Report::new("h2", input, &canonical);
    report.push("module-dim", c.dim());
    report.push("deg-bound", rep.deg_bound);
    report.push("dim", rep.dimension);
    for (k, r) in rep.representatives.iter().enumerate() {
        report.push(&format!("representative.{}", k), r);
    }
    report.push("cocycle-dim", rep.cocycle_dim);
    report.push("coboundary-dim", rep.coboundary_dim);
    report.push("coboundaries-contained", rep.coboundaries_contained);
    report.push("structured.dim", rep.structured.h2_dim);
    let blocks: Vec<String> = rep.structured.block_sizes.iter().map(|b| b.to_string()).collect();
    report.push("structured.blocks", blocks.join(","));
    report.push("structured.invertible-dim", rep.structured.invertible_dim);
    report.push("routes-agree", rep.routes_agree);
    if !rep.routes_agree || !rep.coboundaries_contained {
        report.push("witness", "the flat and structured routes disagree");
        report.set_verdict(Verdict::Fail);
    }
    Ok(report)
}

fn classify_ext(input: &str, cli: &Cli) -> Result<Report, String> {
    let (c, canonical) = as_coeff(input, cli)?;
    let rep = cohom::classify_irreducible(&c, cli.lambda_degree).map_err(|e| e.to_string())?;
    let mut report = Report::new("classify-ext", input, &canonical);
    report.push("module-dim", c.dim());
    report.push("invertible-dim", rep.invertible_dim);
    let blocks: Vec<String> = rep.block_sizes.iter().map(|b| b.to_string()).collect();
    report.push("blocks", blocks.join(","));
    report.push("trivial-lines", rep.trivial_line_count);
    report.push("supports-irreducible", rep.whole_supports_irreducible);
    report.push("h2-matches-blocks", rep.h2_matches_block_count);
    let mut ok = rep.h2_matches_block_count;
    if let Some(cc) = &rep.cross_check {
        report.push("model-axioms", cc.axioms_pass);
        report.push("model-derived-is-whole", cc.derived_is_whole);
        ok = ok && cc.axioms_pass && cc.derived_is_whole;
    }
    if !ok {
        report.push("witness", "structural count and quotient dimension disagree");
        report.set_verdict(Verdict::Fail);
    }
    Ok(report)
}

fn vertex_axiom_word(a: va::VertexAxiom) -> &'static str {
    match a {
        va::VertexAxiom::Vacuum => "vacuum",
        va::VertexAxiom::Creation => "creation",
        va::VertexAxiom::Translation => "translation",
        va::VertexAxiom::Skew => "skew",
    }
}

fn vertex_check(input: &str, cli: &Cli) -> Result<Report, String> {
    let (v, canonical) = as_vertex(input, cli)?;
    let mut report = Report::new("vertex-check", input, &canonical);
    let m = v.module();
    report.push("generators", m.total_gens());
    match va::check_vertex_axioms(&v) {
        Ok(rep) => {
            report.push("identities-checked", rep.pairs_checked);
            report.push("failures", rep.failures.len());
            if let Some(f) = rep.failures.first() {
                report.push(
                    "witness",
                    format!(
                        "{} on ({}, {}) at z^{}: {}",
                        vertex_axiom_word(f.axiom),
                        f.left,
                        f.right,
                        f.z_order,
                        f.value.show(m)
                    ),
                );
                report.set_verdict(Verdict::Fail);
            }
        }
        Err(VaError::Window(e)) => {
            report.push("status", format!("window too small to decide: {}", e));
            report.set_verdict(Verdict::Inconclusive);
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(report)
}

fn named_elem(v: &VertexTable, name: &str) -> Result<ModElement, String> {
    v.gen_elem(name).map_err(|e| e.to_string())
}

fn free_gen_names(m: &FgModule) -> Vec<String> {
    (0..m.free_rank()).map(|g| m.gen_name(Gen(g)).to_string()).collect()
}

fn locality(
    input: &str,
    a: &Option<String>,
    b: &Option<String>,
    on: &Option<String>,
    cli: &Cli,
) -> Result<Report, String> {
    let (v, canonical) = as_vertex(input, cli)?;
    let m = v.module();
    let mut report = Report::new("locality", input, &canonical);
    let pairs: Vec<(String, String)> = match (a, b) {
        (Some(a), Some(b)) => vec![(a.clone(), b.clone())],
        (None, None) => {
            let names = free_gen_names(m);
            let mut out = Vec::new();
            for (i, x) in names.iter().enumerate() {
                for y in &names[i..] {
                    out.push((x.clone(), y.clone()));
                }
            }
            out
        }
        _ => return Err("locality takes either two generator names or none".to_string()),
    };
    let on_elem = match on {
        Some(name) => named_elem(&v, name)?,
        None => ModElement::generator(m, v.vacuum()),
    };
    let on_name = on.clone().unwrap_or_else(|| m.gen_name(v.vacuum()).to_string());
    report.push("applied-to", &on_name);
    let n_max = cli.max_steps as u32;
    report.push("n-max", n_max);
    if cli.expect_locality_failure {
        report.push("expectation", "a locality failure is the documented outcome");
    }
    let mut verdict = Verdict::Pass;
    let mut expected_failure_found = false;
    for (an, bn) in &pairs {
        let ae = named_elem(&v, an)?;
        let be = named_elem(&v, bn)?;
        let rep = match va::locality_check(&v, &ae, &be, &on_elem, n_max) {
            Ok(rep) => rep,
            Err(VaError::Window(e)) => {
                report.push(&format!("pair.{}.{}", an, bn), format!("window too small: {}", e));
                worsen(&mut verdict, Verdict::Inconclusive);
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let key = format!("pair.{}.{}", an, bn);
        match rep.verdict {
            LocalityVerdict::MinimalN { n } => {
                report.push(&key, format!("local of order {} on {}", n, fmt_window(&rep.window)));
            }
            LocalityVerdict::FailsThrough { n_max } => {
                report.push(&key, format!("no locality order through N = {}", n_max));
                if let Some(((i, j), c)) = &rep.witness {
                    report.push(
                        &format!("witness.{}.{}", an, bn),
                        format!("surviving coefficient at z^{} w^{}: {}", i, j, c.show(m)),
                    );
                }
                expected_failure_found = true;
                if !cli.expect_locality_failure {
                    worsen(&mut verdict, Verdict::Fail);
                }
            }
            LocalityVerdict::Inconclusive { at } => {
                report.push(&key, format!("window emptied at N = {}; raise --window", at));
                worsen(&mut verdict, Verdict::Inconclusive);
            }
        }
    }
    if cli.expect_locality_failure {
        if expected_failure_found {
            report.push("expected-failure", "found");
            verdict = Verdict::Pass;
        } else {
            report.push("expected-failure", "not found: every decided pair is local");
            worsen(&mut verdict, Verdict::Fail);
        }
    }
    report.set_verdict(verdict);
    Ok(report)
}

fn genwick(
    input: &str,
    a: &Option<String>,
    b: &Option<String>,
    c: &Option<String>,
    cli: &Cli,
) -> Result<Report, String> {
    let (v, canonical) = as_vertex(input, cli)?;
    let m = v.module();
    let mut report = Report::new("genwick", input, &canonical);
    let triples: Vec<(String, String, String)> = match (a, b, c) {
        (Some(a), Some(b), Some(c)) => vec![(a.clone(), b.clone(), c.clone())],
        (None, None, None) => {
            let names: Vec<String> = m.gens().map(|g| m.gen_name(g).to_string()).collect();
            let mut out = Vec::new();
            for x in &names {
                for y in &names {
                    for z in &names {
                        out.push((x.clone(), y.clone(), z.clone()));
                    }
                }
            }
            out
        }
        _ => return Err("genwick takes either three generator names or none".to_string()),
    };
    report.push("triples", triples.len());
    let mut verdict = Verdict::Pass;
    let mut failures = 0usize;
    for (an, bn, cn) in &triples {
        let ae = named_elem(&v, an)?;
        let be = named_elem(&v, bn)?;
        let ce = named_elem(&v, cn)?;
        let key = format!("triple.{}.{}.{}", an, bn, cn);
        match va::genwick_check(&v, &ae, &be, &ce) {
            Ok(rep) => {
                if rep.pass {
                    report.push(&key, format!("pass on {}", fmt_window(&rep.window)));
                } else {
                    let w = rep.witness.expect("failing checks carry a witness");
                    report.push(
                        &key,
                        format!(
                            "fail at z^{} lambda^{}: {}",
                            w.z_order,
                            w.lambda_power,
                            w.value.show(m)
                        ),
                    );
                    failures += 1;
                    worsen(&mut verdict, Verdict::Fail);
                }
            }
            Err(VaError::Window(e)) => {
                report.push(&key, format!("window too small: {}", e));
                worsen(&mut verdict, Verdict::Inconclusive);
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    report.push("failures", failures);
    report.set_verdict(verdict);
    Ok(report)
}

fn products(
    input: &str,
    a: &Option<String>,
    b: &Option<String>,
    cli: &Cli,
) -> Result<Report, String> {
    let (v, canonical) = as_vertex(input, cli)?;
    let m = v.module();
    let mut report = Report::new("products", input, &canonical);
    let pairs: Vec<(String, String)> = match (a, b) {
        (Some(a), Some(b)) => vec![(a.clone(), b.clone())],
        (None, None) => {
            let names = free_gen_names(m);
            let mut out = Vec::new();
            for x in &names {
                for y in &names {
                    out.push((x.clone(), y.clone()));
                }
            }
            out
        }
        _ => return Err("products takes either two generator names or none".to_string()),
    };
    for (an, bn) in &pairs {
        let ae = named_elem(&v, an)?;
        let be = named_elem(&v, bn)?;
        let s = va::apply_field(&v, &ae, &be).map_err(|e| e.to_string())?;
        report.push(&format!("window.{}.{}", an, bn), fmt_window(&s.window));
        for (&(k, _), coeff) in s.terms() {
            if coeff.is_zero() {
                continue;
            }
            report.push(&format!("{}_({}){}", an, -k - 1, bn), coeff.show(m));
        }
    }
    Ok(report)
}

fn nil_series(input: &str, cli: &Cli) -> Result<Report, String> {
    let (v, canonical) = as_vertex(input, cli)?;
    let m = v.module();
    let mut report = Report::new("nil-series", input, &canonical);
    report.push("max-steps", cli.max_steps);
    let mut verdict = Verdict::Pass;

    let bs = va::brackets_series(&v, cli.max_steps).map_err(|e| e.to_string())?;
    for (k, t) in bs.series.chain.iter().enumerate() {
        report.push(&format!("bracket-term.{}", k), format!("rank {}: {}", t.rank(), t.show(m)));
    }
    report.push("bracket-outcome", outcome_word(bs.series.outcome));
    if matches!(bs.series.outcome, SeriesOutcome::Inconclusive { .. }) {
        worsen(&mut verdict, Verdict::Inconclusive);
    }
    if let Some(nil) = &bs.stable_term_nil {
        report.push("stable-term-nil", outcome_word(nil.outcome));
        if matches!(nil.outcome, SeriesOutcome::Inconclusive { .. }) {
            worsen(&mut verdict, Verdict::Inconclusive);
        }
    }

    let gens: Vec<ModElement> = m
        .gens()
        .filter(|&g| g != v.vacuum())
        .map(|g| ModElement::generator(m, g))
        .collect();
    let ideal = Submodule::span(m, &gens);
    let nil = va::is_nil_ideal(&v, &ideal, cli.max_steps).map_err(|e| e.to_string())?;
    for (k, t) in nil.chain.iter().enumerate() {
        report.push(&format!("ideal-term.{}", k), format!("rank {}: {}", t.rank(), t.show(m)));
    }
    report.push("ideal-outcome", outcome_word(nil.outcome));
    report.push("window-conditional", nil.window_conditional || bs.series.window_conditional);
    if matches!(nil.outcome, SeriesOutcome::Inconclusive { .. }) {
        worsen(&mut verdict, Verdict::Inconclusive);
    }
    report.set_verdict(verdict);
    Ok(report)
}

fn parse_rational_arg(text: &str, what: &str) -> Result<Rational, String> {
    let expr = parser::parse_expression(text).map_err(|e| format!("{}: {}", what, e))?;
    builtins::arg_rational(&expr).map_err(|e| format!("{}: {}", what, e))
}

fn novir(central_charge: &Option<String>, cli: &Cli) -> Result<Report, String> {
    let c_text = central_charge.clone().unwrap_or_else(|| "0".to_string());
    let c = parse_rational_arg(&c_text, "central charge")?;
    let k = cli.window;
    let canonical = format!("novir c={} window={}", c, k);
    let mut report = Report::new("novir", &c_text, &canonical);
    report.push("central-charge", &c);
    report.push("order", k);
    let rep = match va::novir_verify(&c, k) {
        Ok(rep) => rep,
        Err(VaError::OrderTooSmall { got, need }) => {
            return Err(format!("--window {} is too small, need at least {}", got, need));
        }
        Err(e) => return Err(e.to_string()),
    };
    let mut verdict = Verdict::Pass;
    report.push(
        "singular-part",
        if rep.singular_ok { "verified: 2*z^-2 + del*z^-1" } else { "unexpected singular part" },
    );
    if !rep.singular_ok {
        worsen(&mut verdict, Verdict::Fail);
    }
    match rep.diffeq_zero_through {
        Some(n) => report.push("diffeq", format!("residual exactly zero through order {}", n)),
        None => {
            report.push("diffeq", "nonzero residual");
            worsen(&mut verdict, Verdict::Fail);
        }
    }
    match &rep.virl_witness {
        Some(w) => {
            report.push(
                "field-equation",
                format!(
                    "fails at z^{} lambda^{} with coefficient {}",
                    w.z_order, w.lambda_power, w.coefficient
                ),
            );
            report.push("status", "no finite candidate satisfies the field equation");
        }
        None => {
            report.push("field-equation", "no failing coefficient inside the window");
            report.push("status", "raise --window to reach a witness");
            worsen(&mut verdict, Verdict::Inconclusive);
        }
    }
    report.push("window", fmt_window(&rep.window));
    report.set_verdict(verdict);
    Ok(report)
}

fn example_finitevertex(psi: &Option<String>, cli: &Cli) -> Result<Report, String> {
    let psi_text = psi.clone().unwrap_or_else(|| "z^-2".to_string());
    let expr = parser::parse_expression(&psi_text).map_err(|e| format!("psi: {}", e))?;
    let psi_map = builtins::arg_psi(&expr).map_err(|e| format!("psi: {}", e))?;
    let v = va::make_finitevertex(&psi_map, cli.expect_locality_failure).map_err(|e| {
        format!("{} (pass --expect-locality-failure to work with an odd table)", e)
    })?;
    let canonical = builtins::definition_from_table("Example", &v).to_string();
    let mut report = Report::new("example-finitevertex", &psi_text, &canonical);
    let m = v.module();
    let mut verdict = Verdict::Pass;

    let axioms = va::check_vertex_axioms(&v).map_err(|e| e.to_string())?;
    report.push("axioms", if axioms.passed() { "pass" } else { "fail" });
    if let Some(f) = axioms.failures.first() {
        report.push(
            "axiom-witness",
            format!("{} on ({}, {})", vertex_axiom_word(f.axiom), f.left, f.right),
        );
        worsen(&mut verdict, Verdict::Fail);
    }

    let a = named_elem(&v, "a")?;
    let b = named_elem(&v, "b")?;
    let vac = ModElement::generator(m, v.vacuum());
    let loc = va::locality_check(&v, &a, &a, &vac, cli.max_steps as u32)
        .map_err(|e| e.to_string())?;
    match loc.verdict {
        LocalityVerdict::MinimalN { n } => {
            report.push("locality.a.a", format!("local of order {}", n));
            if cli.expect_locality_failure {
                report.push("locality-witness", format!("expected a failure but N = {}", n));
                worsen(&mut verdict, Verdict::Fail);
            }
        }
        LocalityVerdict::FailsThrough { n_max } => {
            report.push("locality.a.a", format!("no locality order through N = {}", n_max));
            if !cli.expect_locality_failure {
                worsen(&mut verdict, Verdict::Fail);
            }
        }
        LocalityVerdict::Inconclusive { at } => {
            report.push("locality.a.a", format!("window emptied at N = {}", at));
            worsen(&mut verdict, Verdict::Inconclusive);
        }
    }

    let s = va::apply_field(&v, &a, &a).map_err(|e| e.to_string())?;
    for (&(k, _), coeff) in s.terms() {
        if !coeff.is_zero() {
            report.push(&format!("a_({})a", -k - 1), coeff.show(m));
        }
    }

    let ideal = Submodule::span(m, &[a.clone(), b.clone()]);
    let nil = va::is_nil_ideal(&v, &ideal, cli.max_steps).map_err(|e| e.to_string())?;
    for (k, t) in nil.chain.iter().enumerate() {
        report.push(&format!("nil-term.{}", k), format!("rank {}: {}", t.rank(), t.show(m)));
    }
    report.push("nil-outcome", outcome_word(nil.outcome));
    if !matches!(nil.outcome, SeriesOutcome::ReachedZero { .. }) {
        worsen(&mut verdict, Verdict::Inconclusive);
    }

    let bs = va::brackets_series(&v, cli.max_steps).map_err(|e| e.to_string())?;
    let ranks: Vec<String> =
        bs.series.chain.iter().map(|t| t.rank().to_string()).collect();
    report.push("bracket-series-ranks", ranks.join(","));

    let sq = va::square_zero_ideal(&v, &b).map_err(|e| e.to_string())?;
    report.push("b-square-zero", sq.square_is_zero);
    report.push("b-ideal-certified", sq.ideal.closure_certified);
    report.push("b-ideal-abelian", sq.abelian);
    if !(sq.square_is_zero && sq.ideal.closure_certified && sq.abelian) {
        worsen(&mut verdict, Verdict::Fail);
    }

    let shadow = conformal_shadow(&v).map_err(|e| e.to_string())?;
    let derived = shadow.derived_series(cli.max_steps);
    let central = shadow.central_series(cli.max_steps);
    report.push("shadow-derived", outcome_word(derived.outcome));
    report.push("shadow-central", outcome_word(central.outcome));
    for (name, outcome) in [("derived", derived.outcome), ("central", central.outcome)] {
        match outcome {
            SeriesOutcome::ReachedZero { .. } => {}
            SeriesOutcome::Stabilized { .. } => {
                report.push(
                    &format!("shadow-{}-witness", name),
                    "the shadow series stabilizes nonzero",
                );
                worsen(&mut verdict, Verdict::Fail);
            }
            SeriesOutcome::Inconclusive { .. } => worsen(&mut verdict, Verdict::Inconclusive),
        }
    }
    report.set_verdict(verdict);
    Ok(report)
}
