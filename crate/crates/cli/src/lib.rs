//! Command-line front end: every subcommand parses its arguments, calls one
//! library operation and renders the result.

use std::path::Path;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use vopa::arith::{BigRational, RationalFunction};
use vopa::coeff::{Coeff, Symbolic};
use vopa::extension::{boundary_ope_data, boundary_ope_data_symbolic, extension_decomposition};
use vopa::ope::Engine;
use vopa::orbifold::{commutant_correction, coset_virasoro_in, decoupling_relation, u_field};
use vopa::paper_check::run_all;
use vopa::parse::{parse_rational_value, parse_reduced, symbolic_at, symbolic_to_rf};
use vopa::presentation::{builtin, AlgebraPresentation};
use vopa::solver::{
    all_triples, reconstruct_subregular, solve_unknowns, solved_w2_4, w2_4_stages, AssignmentReport, Triple,
};
use vopa::VopaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub status: Status,
    pub payload: String,
    /// 0 for pass, 1 for fail, 2 for usage and computational errors.
    pub exit_code: u8,
}

impl CommandResult {
    fn pass(payload: String) -> Self {
        CommandResult { status: Status::Pass, payload, exit_code: 0 }
    }

    fn fail(payload: String) -> Self {
        CommandResult { status: Status::Fail, payload, exit_code: 1 }
    }

    fn error(payload: String) -> Self {
        CommandResult { status: Status::Error, payload, exit_code: 2 }
    }

    fn verdict(ok: bool, payload: String) -> Self {
        if ok {
            Self::pass(payload)
        } else {
            Self::fail(payload)
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "vopa", version, about = "Exact OPE computations over Q(k)")]
struct Cli {
    /// A `.vopa` file or the name of a built-in algebra (heisenberg,
    /// virasoro, w2_4, r4_ansatz). Defaults to w2_4 with its W W table solved.
    #[arg(long, global = true, value_name = "FILE")]
    algebra: Option<String>,
    /// Specialize the parameter, e.g. `k=5/7`.
    #[arg(long, global = true, value_name = "k=Q")]
    eval: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Singular part of the OPE of two expressions, one line per pole.
    Ope { a: String, b: String },
    /// The n-th product `a_(n)b`; negative `n` gives normally ordered products.
    Nprod {
        a: String,
        b: String,
        #[arg(allow_hyphen_values = true)]
        n: i64,
    },
    /// Canonical form of an expression.
    NormalForm { expr: String },
    /// Jacobi identities of three generators.
    JacobiCheck {
        a: String,
        b: String,
        c: String,
        /// `auto` for the whole window, or `r,s` for one identity.
        #[arg(long, default_value = "auto")]
        range: String,
    },
    /// Solve the unknowns of a presentation from its Jacobi identities.
    JacobiSolve {
        /// `default`, or stages separated by `;`, each a comma-separated
        /// list of generator triples such as `J W W, T W W; W G+ G-`.
        #[arg(long, default_value = "default")]
        stages: String,
    },
    /// The decoupling relation of weight `n + 9`.
    Relations {
        #[arg(long)]
        n: u32,
    },
    /// Heisenberg coset fields.
    Coset(CosetArgs),
    /// Numerology of the simple current extension `A(n, r)`.
    Extension {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        r: i64,
    },
    /// Recompute the end-to-end results and compare them with their closed forms.
    PaperCheck {
        /// Use specialized levels instead of symbolic `k` where possible.
        #[arg(long)]
        fast: bool,
    },
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct CosetArgs {
    /// Print `U_{0,I}` plus its commutant correction.
    #[arg(long, value_name = "I")]
    correct: Option<u32>,
    /// Print the coset Virasoro field and its central charge (the default).
    #[arg(long)]
    virasoro: bool,
}

/// Parse and run one command line (without the program name).
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> CommandResult {
    let args = std::iter::once("vopa").chain(argv.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandResult::pass(e.to_string()),
                _ => {
                    let text = e.to_string();
                    let summary: Vec<&str> = text
                        .lines()
                        .map(str::trim)
                        .take_while(|l| !l.starts_with("Usage:"))
                        .filter(|l| !l.is_empty() && !l.starts_with("tip:") && !l.starts_with("For more information"))
                        .collect();
                    let summary = summary.join(" ");
                    let summary = summary.trim_start_matches("error: ");
                    CommandResult::error(format!("usage error: {summary} (try `vopa --help`)"))
                }
            };
        }
    };
    match execute(&cli) {
        Ok(r) => r,
        Err(e) => CommandResult::error(format!("error: {e}")),
    }
}

/// The loaded presentation and, if requested, the level to specialize at.
struct Context {
    presentation: AlgebraPresentation,
    eval: Option<BigRational>,
}

fn load_presentation(name: Option<&str>) -> Result<AlgebraPresentation, VopaError> {
    match name {
        None => Ok(solved_w2_4()?.clone()),
        Some(s) if Path::new(s).is_file() => AlgebraPresentation::load_file(Path::new(s)),
        Some(s) => {
            builtin(s).map_err(|_| VopaError::Io(format!("`{s}` is neither a readable file nor a built-in algebra")))
        }
    }
}

fn parse_eval(text: &str, param: &str) -> Result<BigRational, VopaError> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| VopaError::Presentation(format!("--eval expects {param}=Q, got `{text}`")))?;
    if name.trim() != param {
        return Err(VopaError::Presentation(format!("--eval names `{}`, but the parameter is `{param}`", name.trim())));
    }
    parse_rational_value(value.trim())
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, VopaError> {
        let presentation = load_presentation(cli.algebra.as_deref())?;
        let eval = cli.eval.as_deref().map(|t| parse_eval(t, &presentation.param)).transpose()?;
        Ok(Context { presentation, eval })
    }

    fn backend(&self) -> Result<Backend, VopaError> {
        let p = &self.presentation;
        Ok(match &self.eval {
            Some(k0) => {
                if p.has_unknowns() {
                    return Err(VopaError::Presentation(
                        "--eval needs a presentation without unknowns; run jacobi-solve first".into(),
                    ));
                }
                let k0 = k0.clone();
                Backend::Rational(p.engine_at(&k0)?, Box::new(move |c| symbolic_at(c, &k0)))
            }
            None if p.has_unknowns() => Backend::Symbolic(p.engine_symbolic()?, Box::new(|c| Ok(c.clone()))),
            None => Backend::Function(p.engine()?, Box::new(symbolic_to_rf)),
        })
    }
}

type Convert<C> = Box<dyn Fn(&Symbolic) -> Result<C, VopaError>>;

/// An engine over the coefficient type the command line asks for.
enum Backend {
    Symbolic(Engine<Symbolic>, Convert<Symbolic>),
    Function(Engine<RationalFunction>, Convert<RationalFunction>),
    Rational(Engine<BigRational>, Convert<BigRational>),
}

macro_rules! on_backend {
    ($backend:expr, |$engine:ident, $convert:ident| $body:expr) => {
        match $backend {
            Backend::Symbolic($engine, $convert) => $body,
            Backend::Function($engine, $convert) => $body,
            Backend::Rational($engine, $convert) => $body,
        }
    };
}

/// Like `on_backend`, for operations that need a field of scalars.
macro_rules! on_scalar_backend {
    ($backend:expr, |$engine:ident| $body:expr) => {
        match $backend {
            Backend::Symbolic(..) => {
                Err(VopaError::Presentation("the presentation has unknowns; run jacobi-solve first".into()))
            }
            Backend::Function($engine, _) => $body,
            Backend::Rational($engine, _) => $body,
        }
    };
}

fn execute(cli: &Cli) -> Result<CommandResult, VopaError> {
    if let Command::PaperCheck { fast } = cli.command {
        return Ok(paper_check(fast));
    }
    if let Command::Extension { n, r } = cli.command {
        return extension(n, r, cli.eval.as_deref());
    }
    let ctx = Context::new(cli)?;
    let param = ctx.presentation.param.clone();
    let gens = ctx.presentation.generators.clone();
    match &cli.command {
        Command::Ope { a, b } => on_backend!(&ctx.backend()?, |engine, convert| {
            let a = parse_reduced(a, engine, &param, convert)?;
            let b = parse_reduced(b, engine, &param, convert)?;
            let sing = engine.ope_singular(&a, &b);
            Ok(CommandResult::pass(if sing.is_empty() { "0".into() } else { sing.render(&gens, &param) }))
        }),
        Command::Nprod { a, b, n } => on_backend!(&ctx.backend()?, |engine, convert| {
            let a = parse_reduced(a, engine, &param, convert)?;
            let b = parse_reduced(b, engine, &param, convert)?;
            Ok(CommandResult::pass(engine.product(&a, &b, *n).render(&gens, &param)))
        }),
        Command::NormalForm { expr } => on_backend!(&ctx.backend()?, |engine, convert| {
            Ok(CommandResult::pass(parse_reduced(expr, engine, &param, convert)?.render(&gens, &param)))
        }),
        Command::JacobiCheck { a, b, c, range } => {
            let p = &ctx.presentation;
            let (a, b, c) = (p.gen(a)?, p.gen(b)?, p.gen(c)?);
            on_backend!(&ctx.backend()?, |engine, _convert| jacobi_check(engine, (a, b, c), range, &param))
        }
        Command::JacobiSolve { stages } => {
            if ctx.eval.is_some() {
                return Err(VopaError::Presentation("--eval does not apply to jacobi-solve".into()));
            }
            jacobi_solve(&ctx.presentation, stages)
        }
        Command::Relations { n } => on_backend!(&ctx.backend()?, |engine, _convert| {
            let r = decoupling_relation(engine, *n)?;
            let holds = r.reconstruction_holds(&gens)?;
            let text = format!(
                "{}\nreconstruction identity: {}",
                r.render(&gens, &param),
                if holds { "holds" } else { "FAILS" }
            );
            Ok(CommandResult::verdict(holds, text))
        }),
        Command::Coset(args) => on_scalar_backend!(&ctx.backend()?, |engine| {
            match args.correct {
                Some(i) => {
                    let u = u_field(&gens, 0, i)?;
                    let field = u.plus(&commutant_correction(engine, &u)?);
                    Ok(CommandResult::pass(field.render(&gens, &param)))
                }
                None => {
                    let (field, c) = coset_virasoro_in(engine)?;
                    Ok(CommandResult::pass(format!("T^C = {}\nc = {}", field.render(&gens, &param), c.render(&param))))
                }
            }
        }),
        Command::Extension { .. } | Command::PaperCheck { .. } => unreachable!("handled above"),
    }
}

fn jacobi_check<C: Coeff>(
    engine: &Engine<C>,
    (a, b, c): Triple,
    range: &str,
    param: &str,
) -> Result<CommandResult, VopaError> {
    let window = if range == "auto" {
        engine.jacobi_window(a, b, c)
    } else {
        let (r, s) = range
            .split_once(',')
            .and_then(|(r, s)| Some((r.trim().parse::<u32>().ok()?, s.trim().parse::<i64>().ok()?)))
            .ok_or_else(|| VopaError::Presentation(format!("--range expects `auto` or `r,s`, got `{range}`")))?;
        vec![(r, s)]
    };
    let gens = engine.generators();
    let g = |i| vopa::expr::Expression::<C>::generator(i);
    let mut bad = Vec::new();
    for &(r, s) in &window {
        let d = engine.jacobi_defect(&g(a), &g(b), &g(c), r, s);
        if !d.is_zero() {
            bad.push(format!("r={r}, s={s}: {}", d.render(gens, param)));
        }
    }
    let names = format!("{} {} {}", gens.get(a).name, gens.get(b).name, gens.get(c).name);
    Ok(if bad.is_empty() {
        CommandResult::pass(format!("PASS ({names}: {} identities hold)", window.len()))
    } else {
        CommandResult::fail(format!(
            "FAIL ({names}: {} of {} identities fail)\n{}",
            bad.len(),
            window.len(),
            bad.join("\n")
        ))
    })
}

fn parse_stages(p: &AlgebraPresentation, spec: &str) -> Result<Vec<Vec<Triple>>, VopaError> {
    spec.split(';')
        .map(|stage| {
            stage
                .split(',')
                .map(|t| {
                    let names: Vec<&str> = t.split_whitespace().collect();
                    match names.as_slice() {
                        [a, b, c] => Ok((p.gen(a)?, p.gen(b)?, p.gen(c)?)),
                        _ => {
                            Err(VopaError::Presentation(format!("expected three generator names, got `{}`", t.trim())))
                        }
                    }
                })
                .collect()
        })
        .collect()
}

fn render_report(p: &AlgebraPresentation, report: &AssignmentReport) -> String {
    let gens = &p.generators;
    let name = |(a, b, c): Triple| format!("{} {} {}", gens.get(a).name, gens.get(b).name, gens.get(c).name);
    let mut lines = Vec::new();
    for (i, s) in report.stages.iter().enumerate() {
        let triples: Vec<String> = s.triples.iter().map(|&t| name(t)).collect();
        lines.push(format!(
            "stage {}: [{}] {} nonzero defects, {} equations, {} unknowns, {} free ({:.2?})",
            i + 1,
            triples.join(", "),
            s.nonzero_defects,
            s.equations,
            s.unknowns.len(),
            s.free.len(),
            s.elapsed
        ));
    }
    for (u, v) in &report.solved {
        lines.push(format!("{u} = {}", v.render(&p.param)));
    }
    if !report.free.is_empty() {
        let free: Vec<String> = report.free.iter().map(|u| u.to_string()).collect();
        lines.push(format!("free: {}", free.join(", ")));
    }
    if let Some(o) = &report.obstruction {
        lines.push(format!("inconsistent at stage {}:", o.stage));
        for r in &o.rows {
            lines.push(format!("  ({}) r={}, s={}, coefficient of {}", name(r.triple), r.r, r.s, r.word));
        }
    }
    lines.join("\n")
}

fn jacobi_solve(p: &AlgebraPresentation, stages: &str) -> Result<CommandResult, VopaError> {
    if !p.has_unknowns() {
        return Ok(CommandResult::pass("no unknowns".into()));
    }
    if stages == "default" && p.name == "r4_ansatz" {
        let rec = reconstruct_subregular(p)?;
        let mut lines = vec!["Heisenberg and Virasoro identities:".to_string()];
        for (u, v) in &rec.coefficients {
            lines.push(format!("{u} = {}", v.render(&p.param)));
        }
        let free: Vec<String> = rec.undetermined.iter().map(|u| u.to_string()).collect();
        lines.push(format!("undetermined: {}", free.join(", ")));
        lines
            .push(format!("a5 = 0: {}", if rec.a5_zero_obstruction.is_some() { "inconsistent" } else { "consistent" }));
        lines.push("with a5 = k+2:".into());
        lines.push(render_report(&rec.normalized.presentation, &rec.normalized));
        if let Some(c) = &rec.ww_leading {
            lines.push(format!("W W leading coefficient = {c}"));
        }
        let ok = rec.normalized.is_consistent() && rec.normalized.free.is_empty();
        return Ok(CommandResult::verdict(ok, lines.join("\n")));
    }
    let plan = match stages {
        "default" if p.name == "w2_4" => w2_4_stages(p)?,
        "default" => vec![all_triples(&p.generators)],
        spec => parse_stages(p, spec)?,
    };
    let report = solve_unknowns(p, &plan)?;
    Ok(CommandResult::verdict(report.is_consistent(), render_report(p, &report)))
}

fn extension(n: i64, r: i64, eval: Option<&str>) -> Result<CommandResult, VopaError> {
    let data = extension_decomposition(n, r)?;
    let (pairing, heis) = match eval {
        Some(text) => boundary_ope_data(n, &RationalFunction::from_rational(parse_eval(text, "k")?))?,
        None => boundary_ope_data_symbolic(n)?,
    };
    Ok(CommandResult::pass(format!("{data}\npairingConstant = {pairing}\nheisLevel = {heis}")))
}

fn paper_check(fast: bool) -> CommandResult {
    let start = Instant::now();
    let results = run_all(fast);
    let passed = results.iter().filter(|r| r.passed).count();
    let ok = passed == results.len();
    let mut lines = vec![format!(
        "{} ({passed}/{} criteria{}, {:.2?})",
        if ok { "PASS" } else { "FAIL" },
        results.len(),
        if fast { ", fast" } else { "" },
        start.elapsed()
    )];
    lines.extend(results.iter().map(|r| r.line()));
    CommandResult::verdict(ok, lines.join("\n"))
}
