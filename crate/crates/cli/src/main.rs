//! `gpd` — exact holonomy and monodromy computations from the command
//! line.
//!
//! Every command prints one structured report (JSON by default, aligned
//! text with `--format text`) and exits 0 whenever a verdict was
//! computed — negative verdicts included. Nonzero exits are reserved for
//! input problems: unreadable files, JSON that does not parse, models or
//! payloads that fail validation. All rationals are exact `"p/q"`
//! strings, in input and output alike.
//!
//! Models flow through files or pipes: `gpd example pradines-1 | gpd hol
//! kernel --at 0`. Commands that read a payload (sections, words, window
//! elements) take it from stdin and need `--model FILE`.

mod payload;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gpd_core::{
    chart_map, chart_transition, germ_compose, hol_equal, in_j0, is_extendible, kernel_at,
    kernel_at_chart, lift_morphism, mon_equal, mon_extend, mon_reduce, normality_audit, run_suite,
    same_germ, star_projection_check, ChartComplexModel, GermClass, HolClass, Model,
    MonLocalData, Pregroupoid, QuotientBundleModel, Rat, Report, StarBase,
};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(
    name = "gpd",
    version,
    about = "Exact holonomy and monodromy computations on piecewise-linear models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print a built-in model as JSON (pipe it into the other commands).
    Example(ExampleArgs),
    /// Audit the five local-structure axioms of a model.
    CheckAxioms(ModelArgs),
    /// Section-word operations; the word JSON comes from stdin.
    #[command(subcommand)]
    Section(SectionCmd),
    /// Germ operations at a base point; words come from stdin.
    #[command(subcommand)]
    Germ(GermCmd),
    /// Holonomy operations: kernels, extendibility, charts, audits.
    #[command(subcommand)]
    Hol(HolCmd),
    /// Monodromy operations: word reduction, equality, extension, stars.
    #[command(subcommand)]
    Mono(MonoCmd),
    /// Run the frozen acceptance battery and print its table.
    PaperSuite(SuiteArgs),
}

#[derive(Args)]
struct ExampleArgs {
    /// pradines-1, pradines-2, or mobius.
    name: String,
    /// Smoothness class for bundle models: 0 (continuous) or 1
    /// (differentiable).
    #[arg(long)]
    smoothness: Option<u8>,
}

#[derive(Args)]
struct ModelArgs {
    /// Model JSON file ('-' for stdin; stdin is also the default).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Reinterpret a bundle model's smoothness class: 0 or 1.
    #[arg(long)]
    smoothness: Option<u8>,
}

impl ModelArgs {
    fn load(&self) -> Result<Model, String> {
        payload::load_model(self.model.as_ref(), self.smoothness)
    }

    fn load_for_payload(&self) -> Result<Model, String> {
        payload::load_model_file(self.model.as_ref(), self.smoothness)
    }
}

#[derive(Args)]
struct AtArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Base point, as an exact rational "p/q".
    #[arg(long, value_parser = payload::parse_rat)]
    at: Rat,
}

#[derive(Subcommand)]
enum SectionCmd {
    /// Decide whether each stdin entry is an admissible section.
    Admissible(ModelArgs),
    /// Decide the local-procedure property of the stdin word.
    Procedure(ProcedureArgs),
    /// Multiply the stdin array of words into one product word.
    Product(ModelArgs),
    /// Invert the stdin word.
    Inverse(ModelArgs),
    /// Evaluate the stdin word at a point.
    Eval(AtArgs),
}

#[derive(Args)]
struct ProcedureArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Base point "p/q"; omitted: audit the whole domain.
    #[arg(long, value_parser = payload::parse_rat)]
    at: Option<Rat>,
}

#[derive(Subcommand)]
enum GermCmd {
    /// Compare the germs of two stdin words at a point.
    Eq(AtArgs),
    /// Decide membership of the stdin word's germ in the identity ideal.
    #[command(name = "in-j0")]
    InJ0(AtArgs),
    /// Compose the germs of two stdin words.
    Compose(AtArgs),
}

#[derive(Subcommand)]
enum HolCmd {
    /// Classify the holonomy kernel over a base point.
    Kernel(KernelArgs),
    /// Decide whether the window structure extends to the whole groupoid.
    Extendible(ExtendibleArgs),
    /// Compare two stdin words as holonomy classes at a point.
    Equal(AtArgs),
    /// Apply a word's chart map to a window element (stdin {"f","w"}).
    Chart(ModelArgs),
    /// Carry a window element between two chart maps (stdin {"f","g","w"}).
    Transition(ModelArgs),
    /// Sample the identity-ideal closure laws.
    AuditNormality(AuditArgs),
    /// Lift a groupoid morphism through a window
    /// (stdin {"a","h","xi","window","embed"}).
    Lift,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Base point "p/q".
    #[arg(long, value_parser = payload::parse_rat)]
    at: Rat,
    /// Loop depth bound for chart-complex kernels.
    #[arg(long, default_value_t = 8)]
    depth: u32,
    /// Chart to anchor the kernel in (chart models; default: the first
    /// chart whose transversal contains the point).
    #[arg(long)]
    chart: Option<String>,
}

#[derive(Args)]
struct ExtendibleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Loop depth bound for chart-complex sites.
    #[arg(long, default_value_t = 8)]
    depth: u32,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of sampled instances.
    #[arg(long, default_value_t = 200)]
    samples: u32,
    /// RNG seed; verdicts are seed-independent, witnesses are not.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum MonoCmd {
    /// Reduce a stdin word over the model's window pregroupoid.
    Reduce(MonoModelArgs),
    /// Decide word-class equality (stdin {"first","second"}).
    Equal(MonoEqualArgs),
    /// Extend local data along the word groupoid.
    Extend(MonoExtendArgs),
    /// Audit the star projection over a base point.
    Star(MonoStarArgs),
}

#[derive(Args)]
struct MonoModelArgs {
    /// Model JSON file. Omitted: stdin carries a finite pregroupoid
    /// payload {"groupoid","carrier",...} instead.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Reinterpret a bundle model's smoothness class: 0 or 1.
    #[arg(long)]
    smoothness: Option<u8>,
}

#[derive(Args)]
struct MonoEqualArgs {
    #[command(flatten)]
    base: MonoModelArgs,
    /// Search depth for the word-class decision.
    #[arg(long, default_value_t = 16)]
    depth: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtensionData {
    /// Include the word groupoid into the ambient groupoid.
    Inclusion,
    /// Lift along the model's covering data.
    CoverLift,
}

#[derive(Args)]
struct MonoExtendArgs {
    #[command(flatten)]
    base: MonoModelArgs,
    /// Local data to extend (with --model).
    #[arg(long, value_enum, default_value_t = ExtensionData::Inclusion)]
    data: ExtensionData,
    /// Read a word from stdin and report its image under the extension.
    #[arg(long)]
    apply: bool,
}

#[derive(Args)]
struct MonoStarArgs {
    #[command(flatten)]
    base: MonoModelArgs,
    /// Base point "p/q" (with --model).
    #[arg(long, value_parser = payload::parse_rat)]
    at: Option<Rat>,
    /// Chart holding the base point (chart models; default: the first
    /// chart whose transversal contains it).
    #[arg(long)]
    chart: Option<String>,
    /// Word-length bound for the star sample.
    #[arg(long, default_value_t = 8)]
    depth: u32,
}

#[derive(Args)]
struct SuiteArgs {
    /// RNG seed; verdicts are seed-independent, witnesses are not.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command, format) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

fn run(command: Command, format: Format) -> Result<String, String> {
    match command {
        Command::Example(args) => example(&args),
        Command::CheckAxioms(args) => check_axioms(&args).map(|r| emit(r, format)),
        Command::Section(cmd) => section(cmd).map(|r| emit(r, format)),
        Command::Germ(cmd) => germ(cmd).map(|r| emit(r, format)),
        Command::Hol(cmd) => hol(cmd).map(|r| emit(r, format)),
        Command::Mono(cmd) => mono(cmd).map(|r| emit(r, format)),
        Command::PaperSuite(args) => {
            let outcome = run_suite(args.seed);
            Ok(match format {
                Format::Text => outcome.render_table(),
                Format::Json => outcome.to_report().to_json(),
            })
        }
    }
}

fn example(args: &ExampleArgs) -> Result<String, String> {
    let model = match args.name.as_str() {
        "pradines-1" => Model::QuotientBundle(QuotientBundleModel::pradines_1()),
        "pradines-2" => {
            let class = payload::smoothness_class(args.smoothness.unwrap_or(0))?;
            Model::QuotientBundle(QuotientBundleModel::pradines_2(class))
        }
        "mobius" => Model::ChartComplex(ChartComplexModel::mobius()),
        other => {
            return Err(format!(
                "unknown example {other:?}; available: pradines-1, pradines-2, mobius"
            ))
        }
    };
    if args.name != "pradines-2" {
        if let Some(flag) = args.smoothness {
            if flag != 0 {
                return Err(format!(
                    "{} is a fixed-smoothness example; --smoothness {flag} does not apply",
                    args.name
                ));
            }
        }
    }
    let text = serde_json::to_string_pretty(&model)
        .map_err(|e| format!("serializing the model: {e}"))?;
    Ok(format!("{text}\n"))
}

fn check_axioms(args: &ModelArgs) -> Result<Report, String> {
    let model = args.load()?;
    let audit = model.check_axioms();
    let mut report = Report::for_model("check-axioms", &model);
    for verdict in &audit.axioms {
        report = report.verdict(&verdict.axiom, verdict.holds);
        if let Some(witness) = &verdict.witness {
            report = report.witness(&verdict.axiom, witness);
        }
        if let Some(certificate) = &verdict.certificate {
            report = report.certificate(&verdict.axiom, certificate);
        }
    }
    Ok(report.verdict("all-hold", audit.all_hold()))
}

fn section(cmd: SectionCmd) -> Result<Report, String> {
    match cmd {
        SectionCmd::Admissible(args) => {
            let model = args.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let entries = payload::parse_entries(value)?;
            let mut report = Report::for_model("section admissible", &model);
            let mut all = true;
            for (i, entry) in entries.iter().enumerate() {
                let key = format!("entry {i}");
                match payload::build_section(&model, entry) {
                    Ok((section, _)) => {
                        report = report
                            .verdict(&key, true)
                            .certificate(&key, section.domain());
                    }
                    Err(issue) => {
                        all = false;
                        report = report.verdict(&key, false).witness(&key, issue);
                    }
                }
            }
            Ok(report.verdict("admissible", all))
        }
        SectionCmd::Procedure(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let word = payload::word_from_value(&model, value)?;
            let command = match &args.at {
                Some(at) => format!("section procedure --at {at}"),
                None => "section procedure".to_owned(),
            };
            let mut report = Report::for_model(&command, &model);
            let outcome = match &args.at {
                Some(at) => word.local_procedure_at(&model, at),
                None => word.local_procedure(&model),
            };
            report = match outcome {
                Ok(()) => report.verdict("procedure", true),
                Err(issue) => report.verdict("procedure", false).witness("issue", &issue),
            };
            Ok(report.certificate("domain", word.domain()))
        }
        SectionCmd::Product(args) => {
            let model = args.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let entries = payload::parse_entries(value)?;
            let report = Report::for_model("section product", &model);
            Ok(match payload::build_word(&model, &entries) {
                Ok(word) => report
                    .verdict("defined", true)
                    .certificate("product", &word),
                Err(issue) => report.verdict("defined", false).witness("issue", issue),
            })
        }
        SectionCmd::Inverse(args) => {
            let model = args.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let word = payload::word_from_value(&model, value)?;
            let inverse = word.inverse();
            Ok(Report::for_model("section inverse", &model)
                .verdict("defined", true)
                .certificate("inverse", &inverse))
        }
        SectionCmd::Eval(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let word = payload::word_from_value(&model, value)?;
            let report =
                Report::for_model(format!("section eval --at {}", args.at), &model);
            Ok(match word.eval(&args.at) {
                Ok(arrow) => report.verdict("defined", true).verdict("arrow", &arrow),
                Err(issue) => report
                    .verdict("defined", false)
                    .witness("issue", issue.to_string()),
            })
        }
    }
}

fn germ(cmd: GermCmd) -> Result<Report, String> {
    match cmd {
        GermCmd::Eq(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let (a, b) = payload::two_words(&model, value)?;
            let ga = GermClass::of(&model, &a, &args.at).map_err(|e| e.to_string())?;
            let gb = GermClass::of(&model, &b, &args.at).map_err(|e| e.to_string())?;
            Ok(Report::for_model(format!("germ eq --at {}", args.at), &model)
                .verdict("equal", same_germ(&ga, &gb)))
        }
        GermCmd::InJ0(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let word = payload::word_from_value(&model, value)?;
            let germ = GermClass::of(&model, &word, &args.at).map_err(|e| e.to_string())?;
            let verdict = in_j0(&model, &germ).map_err(|e| e.to_string())?;
            let report = Report::for_model(format!("germ in-j0 --at {}", args.at), &model)
                .verdict("in-j0", verdict.holds);
            Ok(if verdict.holds {
                report.certificate("evidence", &verdict.witness)
            } else {
                report.witness("evidence", &verdict.witness)
            })
        }
        GermCmd::Compose(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let (a, b) = payload::two_words(&model, value)?;
            let ga = GermClass::of(&model, &a, &args.at).map_err(|e| e.to_string())?;
            let gb = GermClass::of(&model, &b, &ga.target()).map_err(|e| e.to_string())?;
            let report =
                Report::for_model(format!("germ compose --at {}", args.at), &model);
            Ok(match germ_compose(&model, &ga, &gb) {
                Ok(composite) => report
                    .verdict("composable", true)
                    .certificate("germ", &composite),
                Err(issue) => report
                    .verdict("composable", false)
                    .witness("issue", issue.to_string()),
            })
        }
    }
}

fn hol(cmd: HolCmd) -> Result<Report, String> {
    match cmd {
        HolCmd::Kernel(args) => {
            let model = args.model.load()?;
            let descriptor = match &args.chart {
                Some(chart) => kernel_at_chart(&model, chart, &args.at, args.depth),
                None => kernel_at(&model, &args.at, args.depth),
            }
            .map_err(|e| e.to_string())?;
            Ok(
                Report::for_model(format!("hol kernel --at {}", args.at), &model)
                    .verdict("kernel", descriptor.kind.to_string())
                    .certificate("descriptor", &descriptor),
            )
        }
        HolCmd::Extendible(args) => {
            let model = args.model.load()?;
            let outcome = is_extendible(&model, args.depth).map_err(|e| e.to_string())?;
            let mut report = Report::for_model("hol extendible", &model)
                .verdict("extendible", outcome.extendible)
                .certificate("sites", &outcome.sites);
            if let Some(obstruction) = &outcome.obstruction {
                report = report.witness("obstruction", obstruction);
            }
            Ok(report)
        }
        HolCmd::Equal(args) => {
            let model = args.model.load_for_payload()?;
            let value = payload::parse_json(&payload::read_stdin()?)?;
            let (a, b) = payload::two_words(&model, value)?;
            let ca = HolClass::new(
                GermClass::of(&model, &a, &args.at).map_err(|e| e.to_string())?,
            );
            let cb = HolClass::new(
                GermClass::of(&model, &b, &args.at).map_err(|e| e.to_string())?,
            );
            let equal = hol_equal(&model, &ca, &cb).map_err(|e| e.to_string())?;
            Ok(Report::for_model(format!("hol equal --at {}", args.at), &model)
                .verdict("equal", equal))
        }
        HolCmd::Chart(args) => {
            let model = args.load_for_payload()?;
            let text = payload::read_stdin()?;
            let parsed: payload::ChartApplyPayload = serde_json::from_str(&text)
                .map_err(|e| format!("payload does not parse: {e}"))?;
            let f = payload::word_from_value(&model, parsed.f)?;
            let w = payload::welement_from_value(parsed.w)?;
            let report = Report::for_model("hol chart", &model);
            Ok(match chart_map(&model, &f, &w) {
                Ok(class) => report
                    .verdict("defined", true)
                    .verdict("base", class.base())
                    .certificate("class", &class),
                Err(issue) => report
                    .verdict("defined", false)
                    .witness("issue", issue.to_string()),
            })
        }
        HolCmd::Transition(args) => {
            let model = args.load_for_payload()?;
            let text = payload::read_stdin()?;
            let parsed: payload::TransitionPayload = serde_json::from_str(&text)
                .map_err(|e| format!("payload does not parse: {e}"))?;
            let f = payload::word_from_value(&model, parsed.f)?;
            let g = payload::word_from_value(&model, parsed.g)?;
            let w = payload::welement_from_value(parsed.w)?;
            let report = Report::for_model("hol transition", &model);
            Ok(match chart_transition(&model, &f, &g, &w) {
                Ok(image) => report.verdict("defined", true).verdict("image", &image),
                Err(issue) => report
                    .verdict("defined", false)
                    .witness("issue", issue.to_string()),
            })
        }
        HolCmd::AuditNormality(args) => {
            let model = args.model.load()?;
            let audit = normality_audit(&model, args.samples, args.seed)
                .map_err(|e| e.to_string())?;
            let mut report = Report::for_model("hol audit-normality", &model)
                .with_seed(args.seed)
                .verdict("stable", audit.failures.is_empty())
                .verdict("samples", audit.samples)
                .certificate("audit", &audit);
            if !audit.failures.is_empty() {
                report = report.witness("failures", &audit.failures);
            }
            Ok(report)
        }
        HolCmd::Lift => {
            let text = payload::read_stdin()?;
            let parsed: payload::LiftPayload = serde_json::from_str(&text)
                .map_err(|e| format!("payload does not parse: {e}"))?;
            let report = Report::new("hol lift");
            Ok(
                match lift_morphism(
                    &parsed.a,
                    &parsed.h,
                    &parsed.xi,
                    &parsed.window,
                    &parsed.embed,
                ) {
                    Ok(morphism) => report
                        .verdict("lifted", true)
                        .certificate("morphism", &morphism),
                    Err(issue) => report
                        .verdict("lifted", false)
                        .witness("issue", issue.to_string()),
                },
            )
        }
    }
}

/// A pregroupoid from `--model`, or from an inline finite payload.
enum MonoSource {
    Window(Pregroupoid, Model),
    Finite(Pregroupoid, Box<payload::FinitePayload>),
}

fn mono_source(args: &MonoModelArgs) -> Result<MonoSource, String> {
    match &args.model {
        Some(path) => {
            let model = payload::load_model_file(Some(path), args.smoothness)?;
            Ok(MonoSource::Window(
                Pregroupoid::window(model.clone()),
                model,
            ))
        }
        None => {
            let text = payload::read_stdin()?;
            let parsed: payload::FinitePayload = serde_json::from_str(&text)
                .map_err(|e| format!("payload does not parse: {e}"))?;
            let pre = Pregroupoid::finite(parsed.groupoid.clone(), parsed.carrier.clone())
                .map_err(|e| e.to_string())?;
            Ok(MonoSource::Finite(pre, Box::new(parsed)))
        }
    }
}

fn mono_report(command: &str, source: &MonoSource) -> Report {
    match source {
        MonoSource::Window(_, model) => Report::for_model(command, model),
        MonoSource::Finite(..) => Report::new(command),
    }
}

fn mono(cmd: MonoCmd) -> Result<Report, String> {
    match cmd {
        MonoCmd::Reduce(args) => {
            let source = mono_source(&args)?;
            let (pre, word) = match &source {
                MonoSource::Window(pre, _) => {
                    let value = payload::parse_json(&payload::read_stdin()?)?;
                    let word = payload::mono_word_from_value(pre, &value)?;
                    (pre, word)
                }
                MonoSource::Finite(pre, parsed) => {
                    let value = parsed
                        .word
                        .as_ref()
                        .ok_or_else(|| "payload needs a \"word\"".to_owned())?;
                    let word = payload::mono_word_from_value(pre, value)?;
                    (pre, word)
                }
            };
            let reduced = mon_reduce(pre, &word).map_err(|e| e.to_string())?;
            Ok(mono_report("mono reduce", &source)
                .verdict("input-letters", word.len())
                .verdict("reduced-letters", reduced.len())
                .certificate("reduced", &reduced))
        }
        MonoCmd::Equal(args) => {
            let source = mono_source(&args.base)?;
            let (pre, first, second) = match &source {
                MonoSource::Window(pre, _) => {
                    let text = payload::read_stdin()?;
                    let pair: payload::WordPairPayload = serde_json::from_str(&text)
                        .map_err(|e| format!("payload does not parse: {e}"))?;
                    let first = payload::mono_word_from_value(pre, &pair.first)?;
                    let second = payload::mono_word_from_value(pre, &pair.second)?;
                    (pre, first, second)
                }
                MonoSource::Finite(pre, parsed) => {
                    let first = parsed
                        .first
                        .as_ref()
                        .ok_or_else(|| "payload needs \"first\"".to_owned())?;
                    let second = parsed
                        .second
                        .as_ref()
                        .ok_or_else(|| "payload needs \"second\"".to_owned())?;
                    (
                        pre,
                        payload::mono_word_from_value(pre, first)?,
                        payload::mono_word_from_value(pre, second)?,
                    )
                }
            };
            let verdict = mon_equal(pre, &first, &second, args.depth).map_err(|e| e.to_string())?;
            Ok(mono_report("mono equal", &source)
                .verdict("equality", verdict)
                .verdict("depth", args.depth))
        }
        MonoCmd::Extend(args) => {
            let source = mono_source(&args.base)?;
            let (pre, data, word) = match &source {
                MonoSource::Window(pre, _) => {
                    let data = match args.data {
                        ExtensionData::Inclusion => MonLocalData::Inclusion,
                        ExtensionData::CoverLift => MonLocalData::CoverLift,
                    };
                    let word = if args.apply {
                        let value = payload::parse_json(&payload::read_stdin()?)?;
                        Some(payload::mono_word_from_value(pre, &value)?)
                    } else {
                        None
                    };
                    (pre, data, word)
                }
                MonoSource::Finite(pre, parsed) => {
                    let data = match (&parsed.target, &parsed.arrows) {
                        (Some(target), Some(arrows)) => MonLocalData::FiniteArrows {
                            target: target.clone(),
                            arrows: arrows.clone(),
                        },
                        (None, None) => MonLocalData::Inclusion,
                        _ => {
                            return Err(
                                "finite extension data needs both \"target\" and \"arrows\""
                                    .to_owned(),
                            )
                        }
                    };
                    let word = parsed
                        .word
                        .as_ref()
                        .map(|v| payload::mono_word_from_value(pre, v))
                        .transpose()?;
                    (pre, data, word)
                }
            };
            let report = mono_report("mono extend", &source);
            match mon_extend(pre, &data) {
                Ok(extension) => {
                    let mut report = report.verdict("extends", true);
                    if let Some(word) = word {
                        match extension.apply(pre, &word) {
                            Ok(image) => report = report.verdict("image", &image),
                            Err(issue) => {
                                report = report
                                    .verdict("image-defined", false)
                                    .witness("issue", issue.to_string())
                            }
                        }
                    }
                    Ok(report)
                }
                Err(issue) => Ok(report
                    .verdict("extends", false)
                    .witness("issue", issue.to_string())),
            }
        }
        MonoCmd::Star(args) => {
            let source = mono_source(&args.base)?;
            let (pre, base) = match &source {
                MonoSource::Window(pre, model) => {
                    let at = args
                        .at
                        .clone()
                        .ok_or_else(|| "--at is required with --model".to_owned())?;
                    let base = match model {
                        Model::QuotientBundle(_) => StarBase::Bundle { x: at },
                        Model::ChartComplex(complex) => {
                            let chart = match &args.chart {
                                Some(c) => c.clone(),
                                None => complex
                                    .charts()
                                    .iter()
                                    .find(|c| c.transversal.contains(&at))
                                    .map(|c| c.id.clone())
                                    .ok_or_else(|| {
                                        format!("no chart transversal contains {at}")
                                    })?,
                            };
                            StarBase::Chart { chart, x: at }
                        }
                    };
                    (pre, base)
                }
                MonoSource::Finite(pre, parsed) => {
                    let object = parsed
                        .object
                        .clone()
                        .ok_or_else(|| "payload needs an \"object\"".to_owned())?;
                    (pre, StarBase::Finite { object })
                }
            };
            let star = star_projection_check(pre, &base, args.depth).map_err(|e| e.to_string())?;
            Ok(mono_report("mono star", &source)
                .verdict("surjective", star.surjective)
                .verdict("identity-fiber-classes", star.identity_fiber_classes)
                .verdict("undecided-pairs", star.undecided_pairs)
                .verdict("bijective-on-sample", star.bijective_on_sample)
                .certificate("star", &star))
        }
    }
}
