//! `circperm`: recurrences for permanents and cycle statistics of circulant
//! digraphs.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use circperm::algebra::eval_recurrence;
use circperm::corpus::{replay, Corpus, Kind, DEFAULT_MAX_SIZE};
use circperm::derive::{derive, verify, Derivation, Options};
use circperm::extensions::{hamiltonian_derive, moments_derive, moments_ratio, moments_slope};
use circperm::num::{rat_to_f64, rat_to_string};
use circperm::oracle::{brute_hamiltonian, Budget};
use circperm::report::{self, strings, SCHEMA};
use circperm::spec::parse_weights;
use circperm::{parse_spec, CirculantSpec, Error, Rat};

const PARSE_EXIT: u8 = 3;
const MISMATCH_EXIT: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "circperm", version, about = "Exact recurrences for permanents of circulant matrices")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    out: Format,
    /// Worker threads for the parallel stages (0 = all cores).
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
    /// Oracle caps: a bare dimension, or `ryser=N,enum=N,jumps=N,states=N`.
    /// Applied on top of the CIRCPERM_BUDGET environment variable.
    #[arg(long, global = true)]
    budget_bits: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Jumps, e.g. `0,1,2` or `0,n,2n-1`.
    #[arg(long, allow_hyphen_values = true)]
    jumps: String,
    /// Matrix size as `pn+s`, e.g. `3n+1`; defaults to `n`.
    #[arg(long)]
    size: Option<String>,
    /// One weight per jump, e.g. `2,1,1/2`.
    #[arg(long)]
    weights: Option<String>,
}

impl SpecArgs {
    fn spec(&self) -> circperm::Result<CirculantSpec> {
        let spec = parse_spec(&self.jumps, self.size.as_deref())?;
        match &self.weights {
            Some(w) => spec.with_weights(parse_weights(w)?),
            None => Ok(spec),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Derive the recurrence for the permanent.
    Derive {
        #[command(flatten)]
        spec: SpecArgs,
        /// Print terms up to this n.
        #[arg(long)]
        n_max: Option<i64>,
        /// Include the transfer matrices, vectors and classifications.
        #[arg(long)]
        transfer: bool,
    },
    /// Compare the recurrence with Ryser and enumeration up to --n-max.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n_max: i64,
    },
    /// Recurrences for the cycle-count moments TC_0..TC_order.
    Moments {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1)]
        order: usize,
        /// Evaluate TC_1(n) / TC_0(n) at this n.
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        n_max: Option<i64>,
    },
    /// Recurrence for the number of Hamiltonian cycles.
    Hamiltonian {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also compare with brute force up to this n.
        #[arg(long)]
        n_max: Option<i64>,
    },
    /// Dominant root of the counting recurrence.
    Growth {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Exact T(n) for one n.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Regression corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand, Debug)]
enum CorpusAction {
    /// Re-derive every entry and check it against the oracles.
    Replay {
        /// Corpus file; the bundled corpus when omitted.
        #[arg(long)]
        corpus: Option<std::path::PathBuf>,
        /// Largest matrix size checked against the oracles.
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        n_max: i64,
    },
}

/// Rendered output and exit code of a completed command.
struct Output {
    json: Value,
    table: Vec<(String, String)>,
    code: u8,
}

impl Output {
    fn ok(json: Value, table: Vec<(String, String)>) -> Self {
        Output { json, table, code: 0 }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("report serializes") + "\n",
            Format::Table => report::table(&self.table),
        }
    }
}

fn row(k: &str, v: impl Into<String>) -> (String, String) {
    (k.to_string(), v.into())
}

fn budget(cli: &Cli) -> circperm::Result<Budget> {
    let base = Budget::from_env()?;
    match &cli.budget_bits {
        Some(text) => Budget::parse(text, base),
        None => Ok(base),
    }
}

/// `T(from..=to)`, where `to` is at least the last initial value.
fn terms(d: &Derivation, to: Option<i64>) -> circperm::Result<Vec<Rat>> {
    let rec = &d.recurrence;
    let last = rec.base + rec.order() as i64 - 1;
    let to = to.unwrap_or(last + 10).max(last);
    rec.terms(rec.base, (to - rec.base + 1) as usize)
}

fn cmd_derive(spec: &SpecArgs, n_max: Option<i64>, transfer: bool, budget: Budget) -> circperm::Result<Output> {
    let d = derive(&spec.spec()?, &Options { budget })?;
    let t = terms(&d, n_max)?;
    let json = report::derivation_json(&d, &t, None, transfer);
    let mut table = report::derivation_rows(&d);
    table.push(row("terms", format!("{} from n={}", t.iter().map(report::short).collect::<Vec<_>>().join(","), d.recurrence.base)));
    Ok(Output::ok(json, table))
}

fn cmd_verify(spec: &SpecArgs, n_max: i64, budget: Budget) -> circperm::Result<Output> {
    let d = derive(&spec.spec()?, &Options { budget })?;
    let checks = verify(&d, n_max, &budget)?;
    let t = terms(&d, Some(n_max))?;
    let mut json = report::derivation_json(&d, &t, Some(&checks), false);
    json["command"] = json!("verify");
    let mut table = report::derivation_rows(&d);
    let show = |x: &Option<Rat>| x.as_ref().map_or("-".to_string(), report::short);
    for c in &checks {
        table.push(row(
            &format!("n={}", c.n),
            format!(
                "{} recurrence {} ryser {} enumeration {}",
                if c.passed() { "pass" } else { "FAIL" },
                report::short(&c.recurrence),
                show(&c.ryser),
                show(&c.enumeration)
            ),
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    table.push(row("verified", format!("{} of {} sizes agree", checks.len() - failed, checks.len())));
    Ok(Output {
        json,
        table,
        code: if failed == 0 { 0 } else { MISMATCH_EXIT },
    })
}

fn cmd_moments(spec: &SpecArgs, order: usize, n: Option<i64>, n_max: Option<i64>, budget: Budget) -> circperm::Result<Output> {
    let s = spec.spec()?;
    if s.is_weighted() {
        return Err(Error::Unsupported("moments of weighted circulants".into()));
    }
    let a = moments_derive(&s, order, &budget)?;
    let mut table = vec![row("circulant", s.to_string()), row("pairing states", a.graph.states.len().to_string())];
    let mut moments = Vec::new();
    for (t, rec) in a.recurrences.iter().enumerate() {
        let last = rec.base + rec.order() as i64 - 1;
        let to = n_max.unwrap_or(last + 5).max(last);
        let values = rec.terms(rec.base, (to - rec.base + 1) as usize)?;
        let name = format!("TC{t}");
        table.push(row(&name, rec.equation(&name)));
        table.push(row(
            &format!("{name} initial values"),
            format!("{} for n={}..{last}", rec.initials.iter().map(report::short).collect::<Vec<_>>().join(","), rec.base),
        ));
        moments.push(json!({
            "moment": t.to_string(),
            "recurrence": report::recurrence_json(rec),
            "equation": rec.equation(&name),
            "terms": { "from": rec.base.to_string(), "values": strings(&values) },
        }));
    }
    let mut json = json!({
        "schema": SCHEMA,
        "command": "moments",
        "spec": report::spec_json(&s),
        "states": a.graph.states.len().to_string(),
        "moments": moments,
    });
    if order >= 1 {
        let at = n.unwrap_or(200);
        let ratio = moments_ratio(&a, at)?;
        let per_n = rat_to_f64(&ratio) / at as f64;
        let slope = rat_to_f64(&moments_slope(&a, at.max(a.n0()))?);
        json["ratio"] = json!({
            "n": at.to_string(),
            "tc1_over_tc0": rat_to_string(&ratio),
            "per_n": format!("{per_n:.9}"),
            "slope": format!("{slope:.9}"),
        });
        table.push(row(&format!("TC1/TC0 at n={at}"), format!("{per_n:.9} n")));
        table.push(row("TC1/TC0 slope", format!("{slope:.9}")));
    }
    Ok(Output::ok(json, table))
}

fn cmd_hamiltonian(spec: &SpecArgs, n_max: Option<i64>, budget: Budget) -> circperm::Result<Output> {
    let s = spec.spec()?;
    if s.is_weighted() {
        return Err(Error::Unsupported("Hamiltonian cycles of weighted circulants".into()));
    }
    let h = hamiltonian_derive(&s, &budget)?;
    let rec = &h.recurrence;
    let last = rec.base + rec.order() as i64 - 1;
    let mut table = vec![
        row("circulant", s.to_string()),
        row("pairing states", h.graph.states.len().to_string()),
        row("recurrence", rec.equation("H")),
        row(
            "initial values",
            format!("{} for n={}..{last}", rec.initials.iter().map(report::short).collect::<Vec<_>>().join(","), rec.base),
        ),
    ];
    let mut json = json!({
        "schema": SCHEMA,
        "command": "hamiltonian",
        "spec": report::spec_json(&s),
        "states": h.graph.states.len().to_string(),
        "recurrence": report::recurrence_json(rec),
        "equation": rec.equation("H"),
        "lattice_cycle_seen": h.graph.lattice_cycle_seen,
    });
    let mut code = 0;
    if let Some(n_max) = n_max {
        let mut checks = Vec::new();
        for n in rec.base..=n_max {
            let got = eval_recurrence(rec, n)?;
            let brute = Rat::from_integer(brute_hamiltonian(&s, n, &budget)?);
            let pass = got == brute;
            if !pass {
                code = MISMATCH_EXIT;
            }
            table.push(row(
                &format!("n={n}"),
                format!("{} recurrence {} brute force {}", if pass { "pass" } else { "FAIL" }, report::short(&got), report::short(&brute)),
            ));
            checks.push(json!({
                "n": n.to_string(),
                "recurrence": rat_to_string(&got),
                "brute_force": rat_to_string(&brute),
                "pass": pass,
            }));
        }
        json["verification"] = Value::Array(checks);
    }
    Ok(Output { json, table, code })
}

fn cmd_growth(spec: &SpecArgs, budget: Budget) -> circperm::Result<Output> {
    let d = derive(&spec.spec()?, &Options { budget })?;
    let g = &d.growth;
    let json = json!({
        "schema": SCHEMA,
        "command": "growth",
        "spec": report::spec_json(&d.spec),
        "recurrence": report::recurrence_json(&d.recurrence),
        "characteristic": report::polynomial_json(&d.recurrence.characteristic()),
        "growth": report::growth_json(g),
    });
    let table = vec![
        row("circulant", d.spec.to_string()),
        row("characteristic", d.recurrence.characteristic().to_string()),
        row("dominant root", format!("{:.9}", g.dominant_root)),
        row("error bound", format!("{:e}", g.error_bound)),
        row("multiplicity", g.multiplicity.to_string()),
        row("real", g.real.to_string()),
    ];
    Ok(Output::ok(json, table))
}

fn cmd_eval(spec: &SpecArgs, n: i64, budget: Budget) -> circperm::Result<Output> {
    let d = derive(&spec.spec()?, &Options { budget })?;
    let value = eval_recurrence(&d.recurrence, n)?;
    let text = rat_to_string(&value);
    let json = json!({
        "schema": SCHEMA,
        "command": "eval",
        "spec": report::spec_json(&d.spec),
        "recurrence": report::recurrence_json(&d.recurrence),
        "n": n.to_string(),
        "value": text,
    });
    let table = vec![
        row("circulant", d.spec.to_string()),
        row(&format!("T({n})"), report::short(&value)),
        row("digits", text.trim_start_matches('-').len().to_string()),
    ];
    Ok(Output::ok(json, table))
}

fn cmd_replay(path: Option<&std::path::Path>, max_size: i64, budget: Budget) -> circperm::Result<Output> {
    let corpus = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Syntax(format!("cannot read {}: {e}", p.display())))?;
            Corpus::from_json(&text)?
        }
        None => Corpus::bundled(),
    };
    let outcomes = replay(&corpus, max_size, &budget)?;
    let mut table = Vec::new();
    let mut entries = Vec::new();
    for o in &outcomes {
        let kind = match o.kind {
            Kind::Count => "count",
            Kind::Moment => "moment",
            Kind::Hamiltonian => "hamiltonian",
        };
        let range = match (o.checked.first(), o.checked.last()) {
            (Some(a), Some(b)) => format!("n={a}..{b}"),
            _ => "no n".to_string(),
        };
        table.push(row(
            &o.name,
            format!("{} {kind} {range}{}", if o.passed() { "pass" } else { "FAIL" }, o.failures.iter().map(|f| format!("; {f}")).collect::<String>()),
        ));
        entries.push(json!({
            "name": o.name,
            "kind": kind,
            "recurrence": report::recurrence_json(&o.derived),
            "checked": o.checked.iter().map(i64::to_string).collect::<Vec<_>>(),
            "failures": o.failures,
            "pass": o.passed(),
        }));
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    table.push(row("replayed", format!("{} of {} entries pass", outcomes.len() - failed, outcomes.len())));
    let json = json!({
        "schema": SCHEMA,
        "command": "corpus replay",
        "max_size": max_size.to_string(),
        "entries": entries,
    });
    Ok(Output {
        json,
        table,
        code: if failed == 0 { 0 } else { MISMATCH_EXIT },
    })
}

fn dispatch(cli: &Cli) -> circperm::Result<Output> {
    let budget = budget(cli)?;
    match &cli.command {
        Command::Derive { spec, n_max, transfer } => cmd_derive(spec, *n_max, *transfer, budget),
        Command::Verify { spec, n_max } => cmd_verify(spec, *n_max, budget),
        Command::Moments { spec, order, n, n_max } => cmd_moments(spec, *order, *n, *n_max, budget),
        Command::Hamiltonian { spec, n_max } => cmd_hamiltonian(spec, *n_max, budget),
        Command::Growth { spec } => cmd_growth(spec, budget),
        Command::Eval { spec, n } => cmd_eval(spec, *n, budget),
        Command::Corpus {
            action: CorpusAction::Replay { corpus, n_max },
        } => cmd_replay(corpus.as_deref(), *n_max, budget),
    }
}

/// Runs one invocation; returns stdout, stderr and the exit code.
fn execute<I, T>(args: I) -> (String, String, u8)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { PARSE_EXIT } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (text, String::new(), 0) } else { (String::new(), text, code) };
        }
    };
    match circperm::par::with_threads(cli.threads, || dispatch(&cli)) {
        Ok(out) => (out.render(cli.out), String::new(), out.code),
        Err(e) => {
            let code = e.exit_code() as u8;
            let message = match cli.out {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({
                        "schema": SCHEMA,
                        "error": e.to_string(),
                        "exit_code": code.to_string(),
                    }))
                    .expect("error serializes")
                        + "\n"
                }
                Format::Table => format!("error: {e}\n"),
            };
            match cli.out {
                Format::Json => (message, String::new(), code),
                Format::Table => (String::new(), message, code),
            }
        }
    }
}

fn main() -> ExitCode {
    let (out, err, code) = execute(std::env::args_os());
    print!("{out}");
    eprint!("{err}");
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (String, String, u8) {
        execute(std::iter::once("circperm").chain(args.iter().copied()))
    }

    fn run_json(args: &[&str]) -> (Value, u8) {
        let mut full = vec!["--out", "json"];
        full.extend_from_slice(args);
        let (out, err, code) = run(&full);
        let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
        (v, code)
    }

    fn texts(v: &Value) -> Vec<&str> {
        v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
    }

    #[test]
    fn derive_consecutive_jumps() {
        let (v, code) = run_json(&["derive", "--jumps", "0,1,2"]);
        assert_eq!(code, 0);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["recurrence"]["order"], "3");
        assert_eq!(texts(&v["recurrence"]["coeffs"]), ["2", "0", "-1"]);
        assert_eq!(texts(&v["terms"]["values"])[..4], ["6", "9", "13", "20"]);
        assert_eq!(v["growth"]["dominant_root"].as_str().unwrap()[..11], *"1.618033988");
    }

    #[test]
    fn derive_three_n_family() {
        let (v, code) = run_json(&["derive", "--jumps", "0,1n+0,2n-1", "--size", "3n"]);
        assert_eq!(code, 0);
        assert_eq!(texts(&v["recurrence"]["coeffs"]), ["5", "-5", "-5", "6"]);
    }

    #[test]
    fn derive_self_loop() {
        let (v, code) = run_json(&["derive", "--jumps", "0"]);
        assert_eq!(code, 0);
        assert_eq!(v["recurrence"]["order"], "1");
        assert_eq!(texts(&v["recurrence"]["coeffs"]), ["1"]);
        assert_eq!(texts(&v["recurrence"]["initials"]), ["1"]);
    }

    #[test]
    fn derive_transfer_dump() {
        let (v, _) = run_json(&["derive", "--jumps", "0,1,2", "--transfer"]);
        assert_eq!(texts(&v["transfer"]["beta"]).join(""), "1000010001100001");
        assert_eq!(texts(&v["transfer"]["t0"]).join(""), "1000021003200001");
        assert_eq!(v["annihilator"]["text"], "x^3 - 2x^2 + 1");
    }

    #[test]
    fn json_round_trip_gives_identical_recurrence() {
        let (v, _) = run_json(&["derive", "--jumps", "2,n+1,2n+2", "--size", "3n+1"]);
        let spec = report::spec_from_json(&v).unwrap();
        let rec = report::recurrence_from_json(&v).unwrap();
        let again = derive(&spec, &Options::default()).unwrap();
        assert_eq!(again.recurrence, rec);
        let (w, _) = run_json(&["derive", "--jumps", v["spec"]["jumps"].as_str().unwrap(), "--size", v["spec"]["size"].as_str().unwrap()]);
        assert_eq!(
            serde_json::to_string(&w["recurrence"]).unwrap(),
            serde_json::to_string(&v["recurrence"]).unwrap()
        );
    }

    #[test]
    fn weighted_round_trip() {
        let (v, _) = run_json(&["derive", "--jumps", "0,1,2", "--weights", "2,1/3,1"]);
        let spec = report::spec_from_json(&v).unwrap();
        assert!(spec.is_weighted());
        let again = derive(&spec, &Options::default()).unwrap();
        assert_eq!(again.recurrence, report::recurrence_from_json(&v).unwrap());
    }

    #[test]
    fn verify_passes() {
        let (v, code) = run_json(&["verify", "--jumps", "0,1,2", "--n-max", "14"]);
        assert_eq!(code, 0);
        let checks = v["verification"].as_array().unwrap();
        assert_eq!(checks.len(), 12);
        assert!(checks.iter().all(|c| c["pass"] == true && c["enumeration"].is_string()));
        let (_, _, code) = run(&["verify", "--jumps", "1,2,3", "--n-max", "12"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn verify_over_budget_exits_2() {
        let (out, err, code) = run(&["verify", "--jumps", "0,1,2", "--n-max", "30"]);
        assert_eq!(code, 2, "{out}{err}");
        assert!(err.contains("exceeds the oracle cap"));
        let (_, _, code) = run(&["--budget-bits", "10", "verify", "--jumps", "0,1,2", "--n-max", "12"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn parse_errors_exit_3() {
        assert_eq!(run(&["derive", "--jumps", "0,x"]).2, 3);
        assert_eq!(run(&["derive"]).2, 3);
        assert_eq!(run(&["frobnicate"]).2, 3);
        assert_eq!(run(&["derive", "--jumps", "0,1", "--weights", "1"]).2, 3);
        assert_eq!(run(&["--budget-bits", "ryser=x", "derive", "--jumps", "0,1"]).2, 3);
        let (out, _, code) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("derive"));
    }

    #[test]
    fn errors_in_json_mode_are_reports() {
        let (v, code) = run_json(&["derive", "--jumps", "0,n", "--size", "bogus"]);
        assert_eq!(code, 3);
        assert_eq!(v["schema"], 1);
        assert!(v["error"].is_string());
    }

    #[test]
    fn moments_report() {
        let (v, code) = run_json(&["moments", "--jumps", "-1,0,1", "--order", "1"]);
        assert_eq!(code, 0);
        let tc1 = &v["moments"][1];
        assert_eq!(texts(&tc1["recurrence"]["coeffs"]), ["3", "-1", "-3", "1", "1"]);
        assert_eq!(texts(&tc1["recurrence"]["initials"]), ["22", "42", "80", "149", "274"]);
        assert_eq!(v["ratio"]["per_n"].as_str().unwrap()[..6], *"0.7236");
    }

    #[test]
    fn hamiltonian_report() {
        let (v, code) = run_json(&["hamiltonian", "--jumps", "1,2", "--n-max", "12"]);
        assert_eq!(code, 0);
        assert!(v["verification"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    }

    #[test]
    fn growth_report() {
        let (out, _, code) = run(&["growth", "--jumps", "0,1,2"]);
        assert_eq!(code, 0);
        assert!(out.contains("1.618033989"), "{out}");
    }

    #[test]
    fn eval_matches_transfer_iteration() {
        let (v, code) = run_json(&["eval", "--jumps", "0,1,2", "--n", "100"]);
        assert_eq!(code, 0);
        let d = derive(&CirculantSpec::constant(&[0, 1, 2]).unwrap(), &Options::default()).unwrap();
        let seq = d.system.sequence(100);
        assert_eq!(v["value"].as_str().unwrap(), rat_to_string(seq.last().unwrap()));
        assert_eq!(v["value"].as_str().unwrap().len(), 21);
    }

    #[test]
    fn threads_flag_does_not_change_results() {
        let (a, _, _) = run(&["--out", "json", "--threads", "1", "eval", "--jumps", "0,1,3", "--n", "40"]);
        let (b, _, _) = run(&["--out", "json", "--threads", "3", "eval", "--jumps", "0,1,3", "--n", "40"]);
        assert_eq!(a, b);
    }

    #[test]
    fn table_output() {
        let (out, _, code) = run(&["derive", "--jumps", "0,1,2"]);
        assert_eq!(code, 0);
        assert!(out.contains("T(n) = 2T(n-1) - T(n-3)"));
        assert!(out.contains("6,9,13 for n=3..5"));
    }

    #[test]
    fn corpus_replay_small() {
        let (v, code) = run_json(&["corpus", "replay", "--n-max", "9"]);
        assert_eq!(code, 0, "{v}");
        assert!(v["entries"].as_array().unwrap().iter().all(|e| e["pass"] == true));
    }

    #[test]
    fn corpus_replay_reports_bad_pins() {
        let path = std::env::temp_dir().join(format!("circperm-corpus-{}.json", std::process::id()));
        std::fs::write(
            &path,
            r#"{"schema": 1, "entries": [{"name": "bad", "kind": "count", "jumps": "1,2",
                "recurrence": {"coeffs": ["1"], "base": "2", "initials": ["3"]}}]}"#,
        )
        .unwrap();
        let (_, _, code) = run(&["corpus", "replay", "--corpus", path.to_str().unwrap(), "--n-max", "6"]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 1);
    }
}
