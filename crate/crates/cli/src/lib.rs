//! The `ckah` command: equivalence checks and closure listings for
//! concurrent Kleene algebra terms under hypotheses.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ckah::ckao::{
    check_reification_conditions, contr_prime, infer_omega, letterize, obs_reification,
    reduced_obs_pack, reify, sampled_obs_pack, BoolTerm, Omega, ReificationSample,
    DEFAULT_OMEGA_CAP,
};
use ckah::closure::{
    close_alternating, close_naive, demo_bake, demo_print, parse_hypothesis_file, Budget,
    ClosureStatus, HypothesisSet,
};
use ckah::decide::{
    close_side, compare_sides, DecideOptions, Decision, Side, Verdict, DEFAULT_BOUND,
};
use ckah::dot::{export_dot, to_dot};
use ckah::oracle::down_closure_oracle;
use ckah::term::{parse_term, semantics_bounded, semantics_starfree, Term, UnrollBudget};
use ckah::{Error, Label, PomsetLanguage, SpPomset};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_EQUIVALENT: i32 = 0;
pub const EXIT_DIFFERENT: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;
pub const EXIT_CROSS_CHECK_FAILED: i32 = 4;

/// Members above this many leaves are skipped by the down-closure oracle.
const ORACLE_MAX_LEAVES: usize = 6;
/// At most this many members are compared against the oracle.
const ORACLE_MAX_MEMBERS: usize = 400;

#[derive(Parser, Debug)]
#[command(
    name = "ckah",
    version,
    about = "Decide equivalence of concurrent Kleene algebra terms under hypotheses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compare the closures of two terms.
    Check(CheckArgs),
    /// List the closure of a term, one pomset per line.
    Closure(ClosureArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    pub left: String,
    pub right: String,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also print the witness as a Graphviz graph.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ClosureArgs {
    pub term: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pack {
    /// No hypotheses.
    None,
    /// The exchange law.
    Exch,
    /// Observations: terms are reified and closed under exchange and atom contraction.
    Obs,
    /// Atom contraction only, after reification.
    ContrAtoms,
    /// The bakery example.
    DemoBake,
    /// The printer example.
    DemoPrint,
}

impl Pack {
    fn name(self) -> &'static str {
        match self {
            Pack::None => "none",
            Pack::Exch => "exch",
            Pack::Obs => "obs",
            Pack::ContrAtoms => "contr-atoms",
            Pack::DemoBake => "demo-bake",
            Pack::DemoPrint => "demo-print",
        }
    }

    fn reifies(self) -> bool {
        matches!(self, Pack::Obs | Pack::ContrAtoms)
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Hypothesis pack.
    #[arg(long, value_enum, default_value = "none")]
    pub hyp: Pack,
    /// Extra hypotheses, one `lhs <= rhs` or `lhs == rhs` per line.
    #[arg(long)]
    pub hyp_file: Option<PathBuf>,
    /// Primitive observations, comma separated; inferred from the terms when absent.
    #[arg(long, value_delimiter = ',')]
    pub omega: Option<Vec<String>>,
    /// Leaf bound for terms with a star.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    pub bound: usize,
    /// Write Graphviz files for the reported pomsets into this directory.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Recompute closures with the reference implementations and compare.
    #[arg(long)]
    pub cross_check: bool,
    /// Largest closure kept before giving up.
    #[arg(long, env = "CKAH_MAX_LANGUAGE", default_value_t = Budget::default().max_language_size)]
    pub max_language: usize,
    /// Worklist steps before giving up.
    #[arg(long, env = "CKAH_MAX_ITERATIONS", default_value_t = Budget::default().max_iterations)]
    pub max_iterations: usize,
    /// Largest number of primitive observations accepted.
    #[arg(long, env = "CKAH_OMEGA_CAP", default_value_t = DEFAULT_OMEGA_CAP)]
    pub omega_cap: usize,
}

/// What a command prints and how it exits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Report {
    fn input_error(stderr: String) -> Report {
        Report {
            stdout: String::new(),
            stderr,
            code: EXIT_INPUT_ERROR,
        }
    }
}

/// Parses the arguments (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match cli.command {
            Command::Check(a) => cmd_check(&a),
            Command::Closure(a) => cmd_closure(&a),
        },
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Report::input_error(text)
            } else {
                Report {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            }
        }
    }
}

/// The hypotheses and the terms they apply to, after reification.
struct Setup {
    hyps: HypothesisSet,
    omega: Option<Omega>,
    omega_inferred: bool,
    terms: Vec<Term>,
    warnings: Vec<String>,
}

fn parse_input(name: &str, text: &str) -> Result<Term, String> {
    parse_term(text).map_err(|e| describe_error(name, text, &e))
}

fn describe_error(name: &str, text: &str, e: &Error) -> String {
    match e {
        Error::Syntax { offset, .. } => {
            let caret = " ".repeat(text[..(*offset).min(text.len())].chars().count());
            format!("error: {name}: {e}\n  {text}\n  {caret}^\n")
        }
        _ => format!("error: {name}: {e}\n"),
    }
}

fn setup(common: &CommonArgs, inputs: &[(&str, &str)]) -> Result<Setup, String> {
    let mut warnings = Vec::new();
    if common.omega_cap > DEFAULT_OMEGA_CAP {
        warnings.push(format!(
            "warning: observation cap raised to {}; every observation may expand to 2^{} atoms",
            common.omega_cap, common.omega_cap
        ));
    }
    let mut parsed = Vec::new();
    for (name, text) in inputs {
        parsed.push(parse_input(name, text)?);
    }
    let file_hyps = match &common.hyp_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("error: {}: {e}\n", path.display()))?;
            parse_hypothesis_file(&text).map_err(|e| format!("error: {}: {e}\n", path.display()))?
        }
        None => HypothesisSet::new(),
    };
    let has_obs = parsed.iter().any(Term::has_obs);
    let (omega, omega_inferred) = match &common.omega {
        Some(names) => {
            let om = Omega::with_cap(names.iter().map(String::as_str), common.omega_cap)
                .map_err(|e| format!("error: --omega: {e}\n"))?;
            (Some(om), false)
        }
        None if has_obs || common.hyp.reifies() => {
            let om = infer_omega(&parsed, common.omega_cap).map_err(|e| format!("error: {e}\n"))?;
            (Some(om), true)
        }
        None => (None, false),
    };
    if has_obs && !common.hyp.reifies() {
        return Err(format!(
            "error: observations need `--hyp {}` or `--hyp {}`\n",
            Pack::Obs.name(),
            Pack::ContrAtoms.name()
        ));
    }
    let terms: Vec<Term> = match &omega {
        Some(om) if common.hyp.reifies() => parsed
            .iter()
            .zip(inputs)
            .map(|(t, (name, _))| reify(t, om).map_err(|e| format!("error: {name}: {e}\n")))
            .collect::<Result<_, _>>()?,
        _ => parsed,
    };
    let letters: Vec<Label> = terms
        .iter()
        .flat_map(Term::letters)
        .chain(
            file_hyps
                .hypotheses()
                .iter()
                .flat_map(|h| h.lhs().letters().into_iter().chain(h.rhs().letters())),
        )
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pack = match common.hyp {
        Pack::None => HypothesisSet::new(),
        Pack::Exch => HypothesisSet::exch(),
        Pack::Obs => reduced_obs_pack(omega.as_ref().expect("set for reifying packs")),
        Pack::ContrAtoms => contr_prime(omega.as_ref().expect("set for reifying packs")),
        Pack::DemoBake => demo_bake(&letters),
        Pack::DemoPrint => demo_print(&letters),
    };
    Ok(Setup {
        hyps: pack.union(&file_hyps),
        omega,
        omega_inferred,
        terms,
        warnings,
    })
}

fn options(common: &CommonArgs) -> DecideOptions {
    let budget = Budget {
        max_language_size: common.max_language,
        max_iterations: common.max_iterations,
        ..Budget::default()
    };
    DecideOptions {
        bound: common.bound,
        budget,
    }
}

fn header(command: &str, common: &CommonArgs, s: &Setup) -> String {
    let o = options(common);
    let omega = match &s.omega {
        Some(om) if s.omega_inferred => format!("{om} (inferred)"),
        Some(om) => om.to_string(),
        None => "-".into(),
    };
    let file = match &common.hyp_file {
        Some(p) => format!(" + {}", p.display()),
        None => String::new(),
    };
    format!(
        "# ckah {command}: hyp={}{file} omega={omega} bound={} max-language={} max-iterations={} max-leaves={}\n",
        common.hyp.name(),
        o.bound,
        o.budget.max_language_size,
        o.budget.max_iterations,
        o.budget.max_leaf_count
    )
}

fn status_text(s: ClosureStatus) -> String {
    match s {
        ClosureStatus::Complete => "complete".into(),
        ClosureStatus::Truncated(r) => format!("truncated ({r})"),
    }
}

fn write_dot(dir: &Path, name: &str, u: &SpPomset) -> Result<PathBuf, String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("error: {}: {e}\n", dir.display()))?;
    let path = dir.join(format!("{name}.dot"));
    export_dot(u, &path).map_err(|e| format!("error: {}: {e}\n", path.display()))?;
    Ok(path)
}

/// `check LEFT RIGHT`: exit 0 when equivalent (possibly up to the bound),
/// 1 when different, 2 when inconclusive and 3 on input errors.
pub fn cmd_check(args: &CheckArgs) -> Report {
    let c = &args.common;
    let s = match setup(c, &[("left", &args.left), ("right", &args.right)]) {
        Ok(s) => s,
        Err(e) => return Report::input_error(e),
    };
    let o = options(c);
    let mut out = header("check", c, &s);
    let mut err = s
        .warnings
        .iter()
        .map(|w| format!("{w}\n"))
        .collect::<String>();
    let sides: Result<Vec<Side>, Error> =
        s.terms.iter().map(|t| close_side(t, &s.hyps, &o)).collect();
    let mut sides = match sides {
        Ok(v) => v,
        Err(e) => return Report::input_error(format!("{err}error: {e}\n")),
    };
    let right = sides.pop().expect("two sides");
    let left = sides.pop().expect("two sides");
    let d = compare_sides(left, right, o.bound);
    let _ = writeln!(out, "left:  {}", args.left);
    let _ = writeln!(out, "right: {}", args.right);
    if c.hyp.reifies() {
        let _ = writeln!(out, "reified left:  {}", s.terms[0]);
        let _ = writeln!(out, "reified right: {}", s.terms[1]);
    }
    let _ = writeln!(
        out,
        "left closure:  {}, {}",
        count(d.left.closure.language.len()),
        status_text(d.left.closure.status)
    );
    let _ = writeln!(
        out,
        "right closure: {}, {}",
        count(d.right.closure.language.len()),
        status_text(d.right.closure.status)
    );
    let _ = writeln!(out, "verdict: {}", d.verdict);
    let _ = writeln!(out, "left <= right: {}", d.left_leq_right);
    let _ = writeln!(out, "right <= left: {}", d.right_leq_left);
    let mut code = match &d.verdict {
        Verdict::Equivalent | Verdict::EquivalentUpTo(_) => EXIT_EQUIVALENT,
        Verdict::Different { .. } => EXIT_DIFFERENT,
        Verdict::Inconclusive(_) => EXIT_INCONCLUSIVE,
    };
    match &d.verdict {
        Verdict::Different { witness, in_left } => {
            let side = if *in_left { "left" } else { "right" };
            let _ = writeln!(out, "witness: {witness} (only in the {side} closure)");
            if args.witness {
                out.push_str(&to_dot(witness));
            }
            if let Some(dir) = &c.dot {
                match write_dot(dir, "witness", witness) {
                    Ok(p) => {
                        let _ = writeln!(out, "dot: {}", p.display());
                    }
                    Err(e) => return Report::input_error(e),
                }
            }
        }
        Verdict::Inconclusive(reason) => {
            let _ = writeln!(out, "reason: {reason}");
        }
        _ => {}
    }
    if c.cross_check {
        let mut lines = Vec::new();
        let mut ok = cross_check_side("left", &s.terms[0], &s.hyps, &o, &d.left, &mut lines);
        ok &= cross_check_side("right", &s.terms[1], &s.hyps, &o, &d.right, &mut lines);
        ok &= cross_check_verdict(&d, &mut lines);
        if let (Some(om), true) = (&s.omega, c.hyp == Pack::Obs) {
            ok &= cross_check_reification(&args.left, &args.right, om, &o, &mut lines);
        }
        for l in lines {
            let _ = writeln!(out, "cross-check: {l}");
        }
        if !ok {
            err.push_str("error: cross-check failed\n");
            code = EXIT_CROSS_CHECK_FAILED;
        }
    }
    Report {
        stdout: out,
        stderr: err,
        code,
    }
}

/// `closure TERM`: exit 0 when the listing is complete, 2 when truncated.
pub fn cmd_closure(args: &ClosureArgs) -> Report {
    let c = &args.common;
    let s = match setup(c, &[("term", &args.term)]) {
        Ok(s) => s,
        Err(e) => return Report::input_error(e),
    };
    let o = options(c);
    let mut out = header("closure", c, &s);
    let mut err = s
        .warnings
        .iter()
        .map(|w| format!("{w}\n"))
        .collect::<String>();
    let side = match close_side(&s.terms[0], &s.hyps, &o) {
        Ok(side) => side,
        Err(e) => return Report::input_error(format!("{err}error: {e}\n")),
    };
    let _ = writeln!(out, "term: {}", args.term);
    if c.hyp.reifies() {
        let _ = writeln!(out, "reified: {}", s.terms[0]);
    }
    let _ = writeln!(
        out,
        "# {}, {}{}",
        count(side.closure.language.len()),
        status_text(side.closure.status),
        if side.total {
            String::new()
        } else {
            format!(", up to {} leaves", o.bound)
        }
    );
    for (i, u) in side.closure.language.iter().enumerate() {
        let _ = writeln!(out, "{u}");
        if let Some(dir) = &c.dot {
            if let Err(e) = write_dot(dir, &format!("closure-{i:04}"), u) {
                return Report::input_error(e);
            }
        }
    }
    let mut code = if side.closure.is_complete() {
        EXIT_EQUIVALENT
    } else {
        EXIT_INCONCLUSIVE
    };
    if c.cross_check {
        let mut lines = Vec::new();
        let ok = cross_check_side("term", &s.terms[0], &s.hyps, &o, &side, &mut lines);
        for l in lines {
            let _ = writeln!(out, "# cross-check: {l}");
        }
        if !ok {
            err.push_str("error: cross-check failed\n");
            code = EXIT_CROSS_CHECK_FAILED;
        }
    }
    Report {
        stdout: out,
        stderr: err,
        code,
    }
}

fn base_language(t: &Term, o: &DecideOptions) -> ckah::Result<PomsetLanguage> {
    if t.has_star() {
        semantics_bounded(t, UnrollBudget::new(o.bound))
    } else {
        semantics_starfree(t)
    }
}

fn verdict_line(ok: bool, what: String) -> String {
    format!("{} {what}", if ok { "ok" } else { "MISMATCH" })
}

/// Recomputes one closure by a second route and, under the exchange law,
/// compares down-closures with the brute-force oracle.
fn cross_check_side(
    name: &str,
    t: &Term,
    h: &HypothesisSet,
    o: &DecideOptions,
    side: &Side,
    lines: &mut Vec<String>,
) -> bool {
    if !side.closure.is_complete() {
        lines.push(format!(
            "skipped {name}: closure is {}",
            status_text(side.closure.status)
        ));
        return true;
    }
    let base = match base_language(t, o) {
        Ok(l) => l,
        Err(e) => {
            lines.push(format!("skipped {name}: {e}"));
            return true;
        }
    };
    let mut ok = true;
    let reference = if h.includes_exch() {
        close_alternating(&base, h, o.budget)
    } else {
        close_naive(&base, h, o.budget)
    };
    match reference {
        Ok(r) if r.is_complete() => {
            let same = r.language == side.closure.language;
            ok &= same;
            let route = if h.includes_exch() {
                "alternating closure"
            } else {
                "naive fixpoint"
            };
            lines.push(verdict_line(
                same,
                format!("{name}: {route} agrees ({})", count(r.language.len())),
            ));
        }
        Ok(r) => lines.push(format!(
            "skipped {name} reference closure: {}",
            status_text(r.status)
        )),
        Err(e) => lines.push(format!("skipped {name} reference closure: {e}")),
    }
    if h.includes_exch() {
        let lang = &side.closure.language;
        let mut checked = 0;
        let mut missing = None;
        for v in lang
            .iter()
            .filter(|v| v.size() <= ORACLE_MAX_LEAVES)
            .take(ORACLE_MAX_MEMBERS)
        {
            checked += 1;
            if let Some(u) = down_closure_oracle(v)
                .into_iter()
                .find(|u| !lang.contains(u))
            {
                missing = Some((u, v.clone()));
                break;
            }
        }
        let what = match &missing {
            None => format!("{name}: down-closed by oracle ({checked} members checked)"),
            Some((u, v)) => format!("{name}: `{u}` is below `{v}` but missing"),
        };
        ok &= missing.is_none();
        lines.push(verdict_line(missing.is_none(), what));
    }
    ok
}

fn cross_check_verdict(d: &Decision, lines: &mut Vec<String>) -> bool {
    if let Verdict::Different { witness, in_left } = &d.verdict {
        let (here, there) = if *in_left {
            (&d.left, &d.right)
        } else {
            (&d.right, &d.left)
        };
        let ok =
            here.closure.language.contains(witness) && !there.closure.language.contains(witness);
        lines.push(verdict_line(
            ok,
            format!("witness `{witness}` separates the closures"),
        ));
        return ok;
    }
    true
}

/// Checks the reification conditions for the observation reduction on a
/// finite instance of the observation hypotheses built from the inputs.
fn cross_check_reification(
    left: &str,
    right: &str,
    om: &Omega,
    o: &DecideOptions,
    lines: &mut Vec<String>,
) -> bool {
    if om.len() > 2 {
        lines.push(format!(
            "skipped reification conditions: |Ω| = {} > 2",
            om.len()
        ));
        return true;
    }
    let terms: Vec<Term> = [left, right]
        .iter()
        .filter_map(|t| parse_term(t).ok())
        .collect();
    let seeds: Vec<BoolTerm> = terms.iter().flat_map(Term::observations).collect();
    let h = match sampled_obs_pack(om, &seeds) {
        Ok(h) => h,
        Err(e) => {
            lines.push(format!("skipped reification conditions: {e}"));
            return true;
        }
    };
    let mut letters: BTreeSet<Label> = h
        .hypotheses()
        .iter()
        .flat_map(|x| x.lhs().letters().into_iter().chain(x.rhs().letters()))
        .collect();
    let samples: Vec<Term> = terms
        .iter()
        .filter(|t| !t.has_star())
        .map(letterize)
        .collect();
    letters.extend(samples.iter().flat_map(Term::letters));
    let r = match obs_reification(&letters, om) {
        Ok(r) => r,
        Err(e) => {
            lines.push(format!("skipped reification conditions: {e}"));
            return true;
        }
    };
    let gamma_languages = r
        .gamma()
        .iter()
        .map(|a| PomsetLanguage::singleton(SpPomset::Prim(a.clone())))
        .collect();
    let sample = ReificationSample {
        gamma_languages,
        terms: samples,
        budget: o.budget,
    };
    match check_reification_conditions(&r, &h, &reduced_obs_pack(om), &sample) {
        Ok(report) => {
            let failures: Vec<String> = report
                .failures()
                .map(|c| format!("[{}] {}", c.condition, c.subject))
                .collect();
            let ok = failures.is_empty();
            let what = if ok {
                format!(
                    "reification conditions hold on {} sampled checks",
                    report.checks.len()
                )
            } else {
                format!("reification conditions fail: {}", failures.join(", "))
            };
            lines.push(verdict_line(ok, what));
            ok
        }
        Err(e) => {
            lines.push(format!("skipped reification conditions: {e}"));
            true
        }
    }
}

fn count(n: usize) -> String {
    if n == 1 {
        "1 pomset".into()
    } else {
        format!("{n} pomsets")
    }
}
