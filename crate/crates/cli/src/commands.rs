use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use rankcone::classify::{
    abs_monotone_test, classify, continuity_limit_test, geometric_grid, lattice_grid, loewner_necessary_test,
    two_by_two_test, uniform_grid, ClassifyOptions, SampledFunction, SpotCheck, TestReport,
};
use rankcone::funcalg::{parse_literal, Function};
use rankcone::scalar::{int, parse_rational, rat};
use rankcone::sweep::{all_pass, run_sweep, SweepCheck, SweepConfig, CSV_COLUMNS, CSV_SCHEMA};
use rankcone::witness::{
    canned_with, embed_2x2, full_rank_search, multinomial_witness, special_rank2, vandermonde_rank1_witness,
    Canned, SearchConfig, WitnessBundle,
};
use rankcone::{ConeSpec, Error, ExactMatrix, Interval, PowerSum, Rational, Tolerances};

use crate::args::{BackendArg, Cli, Command, Common, Format, ProbeTest, WitnessKind};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Read(PathBuf, String),
    Write(PathBuf, String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            CliError::Write(p, e) => write!(f, "cannot write {}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(CliError::Usage(msg.into()))
}

pub fn run(cli: &Cli) -> Res<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Classify { witness_out } => cmd_classify(c, witness_out.as_deref()),
        Command::Witness { kind } => cmd_witness(c, kind),
        Command::Verify { file } => cmd_verify(c, file),
        Command::Sweep { check } => cmd_sweep(c, check),
        Command::Probe { test, grid, order } => cmd_probe(c, *test, grid.as_deref(), *order),
    }
}

fn tolerances(c: &Common) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(r) = c.tol_rank {
        t.rank_rtol = r;
    }
    if let Some(p) = c.tol_psd {
        t.psd_atol = p;
    }
    t
}

/// The run configuration, recorded verbatim in every report.
fn config(c: &Common, command: &str, extra: Value) -> Value {
    let mut v = serde_json::to_value(c).expect("flags serialize");
    let obj = v.as_object_mut().expect("object");
    obj.insert("command".into(), json!(command));
    if let Value::Object(m) = extra {
        obj.extend(m);
    }
    v
}

fn with_config(body: Value, config: Value) -> Value {
    let mut m = match body {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    m.insert("config".into(), config);
    Value::Object(m)
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Write(p.to_path_buf(), e.to_string())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Write(PathBuf::from("<stdout>"), e.to_string()))
                }
                _ => Ok(()),
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn json_only(c: &Common) -> Res<()> {
    if c.format == Some(Format::Csv) {
        return usage("csv output is only available for sweep");
    }
    Ok(())
}

fn load_function(c: &Common) -> Res<Function> {
    let Some(src) = c.function.as_deref() else {
        return usage("missing -f/--function");
    };
    let path = Path::new(src);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::Read(path.to_path_buf(), e.to_string()))?;
        return Ok(Function::from_json_str(&text)?);
    }
    Ok(parse_literal(src)?.into())
}

fn load_power_sum(c: &Common) -> Res<PowerSum> {
    match load_function(c)? {
        Function::Power(p) => Ok(p),
        Function::Piecewise(_) => usage("this command needs a power sum, not a piecewise function"),
    }
}

fn interval(c: &Common) -> Res<Interval> {
    match &c.interval {
        Some(s) => Ok(s.parse()?),
        None => Ok(Interval::nonneg()),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Res<T> {
    match v {
        Some(x) => Ok(x),
        None => usage(format!("missing {flag}")),
    }
}

fn spec(c: &Common) -> Res<ConeSpec> {
    let n = need(c.n, "-n")?;
    let k = need(c.k, "-k")?;
    Ok(ConeSpec::new(n, c.l.unwrap_or(1), k, interval(c)?, c.psd)?)
}

fn cmd_classify(c: &Common, witness_out: Option<&Path>) -> Res<u8> {
    json_only(c)?;
    let f = load_function(c)?;
    let spec = spec(c)?;
    let mut opts = ClassifyOptions { tol: tolerances(c), seed: c.seed, ..ClassifyOptions::default() };
    if let Some(t) = c.trials {
        opts.gram_trials = t;
    }
    let verdict = classify(&f, &spec, &opts)?;
    if let (Some(p), Some(w)) = (witness_out, &verdict.witness) {
        emit(Some(p), &w.to_json_string())?;
    }
    let cfg = config(c, "classify", json!({ "witness_out": witness_out }));
    emit(c.out.as_deref(), &pretty(&with_config(verdict.report(), cfg)))?;
    Ok(verdict.exit_code() as u8)
}

fn canned_from(name: &str, params: Option<&str>, c: &Common) -> Res<Canned> {
    let mut obj = Map::new();
    for (key, v) in [("n", c.n), ("l", c.l), ("k", c.k)] {
        if let Some(x) = v {
            obj.insert(key.into(), json!(x));
        }
    }
    if let Some(p) = params {
        match serde_json::from_str::<Value>(p) {
            Ok(Value::Object(m)) => obj.extend(m),
            Ok(_) => return usage("--params must be a JSON object"),
            Err(e) => return Err(Error::Parse(format!("--params: {e}")).into()),
        }
    }
    obj.insert("name".into(), json!(name.to_lowercase()));
    serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Parse(format!("canned {name}: {e}")).into())
}

fn rationals(s: &str) -> Res<Vec<Rational>> {
    Ok(s.split(',').map(|x| parse_rational(x.trim())).collect::<rankcone::Result<Vec<_>>>()?)
}

fn cmd_witness(c: &Common, kind: &WitnessKind) -> Res<u8> {
    json_only(c)?;
    let tol = tolerances(c);
    let iv = interval(c)?;
    let (bundle, extra) = match kind {
        WitnessKind::Canned { name, params } => {
            let canned = canned_from(name, params.as_deref(), c)?;
            let f = match c.function {
                Some(_) => Some(load_function(c)?),
                None => None,
            };
            let iv = c.interval.as_ref().map(|_| iv.clone());
            (canned_with(&canned, f, iv.as_ref(), &tol)?, json!({ "kind": "canned", "name": name, "params": params }))
        }
        WitnessKind::Vandermonde => {
            let f = load_power_sum(c)?;
            (vandermonde_rank1_witness(&f, need(c.n, "-n")?, &iv, &tol)?, json!({ "kind": "vandermonde" }))
        }
        WitnessKind::Multinomial => {
            let f = load_power_sum(c)?;
            let w = multinomial_witness(&f, need(c.l, "-l")?, need(c.n, "-n")?, &iv, &tol)?;
            (w, json!({ "kind": "multinomial" }))
        }
        WitnessKind::Special { a, u } => {
            let f = load_power_sum(c)?;
            let iv = c.interval.as_ref().map(|_| iv.clone());
            let w = special_rank2(&parse_rational(a)?, &rationals(u)?, &f, iv.as_ref(), &tol)?;
            (w, json!({ "kind": "special", "a": a, "u": u }))
        }
        WitnessKind::Embed { matrix } => {
            let v = rationals(matrix)?;
            if v.len() != 3 {
                return usage("--matrix takes a,b,c");
            }
            let b = ExactMatrix::from_rows(vec![vec![v[0].clone(), v[1].clone()], vec![v[1].clone(), v[2].clone()]])?;
            (embed_2x2(&b, need(c.n, "-n")?, &iv, &tol)?, json!({ "kind": "embed", "matrix": matrix }))
        }
        WitnessKind::Search { a, eps } => {
            let f = load_power_sum(c)?;
            let mut cfg = SearchConfig::new(f, parse_rational(a)?, need(c.n, "-n")?, parse_rational(eps)?, c.seed);
            if let Some(t) = c.trials {
                cfg.max_trials = t;
            }
            cfg.interval = iv.clone();
            cfg.tol = tol;
            let out = full_rank_search(&cfg)?;
            let extra = json!({ "kind": "search", "a": a, "eps": eps });
            match out.witness {
                Some(w) => (w, extra),
                None => {
                    let report = json!({
                        "found": false,
                        "trials": out.trials,
                        "max_rank": out.max_rank,
                        "eps": out.eps.to_string(),
                    });
                    emit(c.out.as_deref(), &pretty(&with_config(report, config(c, "witness", extra))))?;
                    return Ok(2);
                }
            }
        }
    };
    let verified = bundle.verify(&tol)?;
    eprintln!(
        "claimed rank {} ({:?}), verified rank {}",
        verified.claimed, verified.relation, verified.actual
    );
    let body = with_config(bundle.to_json(), config(c, "witness", extra));
    emit(c.out.as_deref(), &pretty(&body))?;
    Ok(0)
}

fn cmd_verify(c: &Common, file: &Path) -> Res<u8> {
    json_only(c)?;
    let text = fs::read_to_string(file).map_err(|e| CliError::Read(file.to_path_buf(), e.to_string()))?;
    let cfg = config(c, "verify", json!({ "file": file }));
    let (report, code) = match WitnessBundle::from_json_str(&text, &tolerances(c)) {
        Ok((w, v)) => (
            json!({
                "valid": true,
                "construction": w.construction.kind(),
                "claimed_rank": v.claimed,
                "verified_rank": v.actual,
                "relation": v.relation,
            }),
            0,
        ),
        Err(Error::Parse(e)) => return Err(Error::Parse(e).into()),
        Err(e) => (json!({ "valid": false, "error": e.to_string() }), 2),
    };
    emit(c.out.as_deref(), &pretty(&with_config(report, cfg)))?;
    Ok(code)
}

fn cmd_sweep(c: &Common, check: &str) -> Res<u8> {
    let check: SweepCheck = check.parse()?;
    let mut cfg = SweepConfig::new(check, c.trials.unwrap_or(100), c.seed);
    cfg.tol = tolerances(c);
    if let Some(n) = c.n {
        cfg.n = n;
    }
    if check.needs_spec() {
        cfg.function = Some(load_function(c)?);
        cfg.spec = Some(spec(c)?);
    }
    let rows = run_sweep(&cfg)?;
    let pass = all_pass(&rows);
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Write(PathBuf::from("<csv>"), e.to_string());
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for r in &rows {
                w.write_record([
                    CSV_SCHEMA.to_string(),
                    r.trial.to_string(),
                    r.seed.to_string(),
                    r.check.clone(),
                    r.pass.to_string(),
                    r.detail.clone(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Write(PathBuf::from("<csv>"), e.to_string()))?;
            String::from_utf8(bytes).expect("csv is utf-8").trim_end().to_string()
        }
        Format::Json => {
            let body = json!({ "schema": CSV_SCHEMA, "pass": pass, "rows": rows });
            pretty(&with_config(body, config(c, "sweep", json!({ "check": check.name() }))))
        }
    };
    emit(c.out.as_deref(), &text)?;
    Ok(if pass { 0 } else { 2 })
}

fn radius(iv: &Interval) -> Rational {
    iv.finite_radius().cloned().unwrap_or_else(|| int(1))
}

fn parse_grid(spec: &str) -> Res<Vec<Rational>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Lib(Error::Parse(format!("bad grid {spec:?}")));
    match parts.as_slice() {
        ["uniform", lo, hi, pts] => {
            Ok(uniform_grid(&parse_rational(lo)?, &parse_rational(hi)?, pts.parse().map_err(|_| bad())?))
        }
        ["lattice", step, m0, m1] => Ok(lattice_grid(
            &parse_rational(step)?,
            m0.parse().map_err(|_| bad())?,
            m1.parse().map_err(|_| bad())?,
        )),
        ["geometric", top, rho, pts] => {
            Ok(geometric_grid(&parse_rational(top)?, &parse_rational(rho)?, pts.parse().map_err(|_| bad())?))
        }
        _ => Err(bad()),
    }
}

fn default_grid(test: ProbeTest, iv: &Interval) -> Vec<Rational> {
    let r = radius(iv);
    match test {
        ProbeTest::AbsMonotone => uniform_grid(&int(0), &r, 64),
        ProbeTest::TwoByTwo => geometric_grid(&r, &rat(1, 2), 16),
        ProbeTest::Loewner | ProbeTest::Continuity => lattice_grid(&(r / int(64)), 1, 63),
    }
}

fn probe_with<T: rankcone::Scalar>(
    f: &Function,
    test: ProbeTest,
    xs: Vec<Rational>,
    iv: &Interval,
    order: u32,
    c: &Common,
    tol: &Tolerances,
) -> Res<TestReport> {
    let s = SampledFunction::<T>::sample(f, xs, None)?;
    Ok(match test {
        ProbeTest::AbsMonotone => abs_monotone_test(&s, order, tol)?,
        ProbeTest::TwoByTwo => two_by_two_test(&s, iv, tol),
        ProbeTest::Loewner => {
            let spot = SpotCheck { trials: c.trials.unwrap_or(200), seed: c.seed };
            loewner_necessary_test(&s, need(c.n, "-n")?, &spot, tol)?
        }
        ProbeTest::Continuity => unreachable!("continuity needs no samples"),
    })
}

fn cmd_probe(c: &Common, test: ProbeTest, grid: Option<&str>, order: u32) -> Res<u8> {
    json_only(c)?;
    let f = load_function(c)?;
    let tol = tolerances(c);
    let iv = interval(c)?;
    let report = if test == ProbeTest::Continuity {
        match &f {
            Function::Power(p) => continuity_limit_test(p),
            Function::Piecewise(_) => return usage("the continuity probe needs a power sum"),
        }
    } else {
        let xs = match grid {
            Some(g) => parse_grid(g)?,
            None => default_grid(test, &iv),
        };
        let exact = match c.backend {
            Some(BackendArg::Exact) => true,
            Some(BackendArg::Float) => false,
            None => f.exact_capable(),
        };
        if exact {
            probe_with::<Rational>(&f, test, xs, &iv, order, c, &tol)?
        } else {
            probe_with::<f64>(&f, test, xs, &iv, order, c, &tol)?
        }
    };
    let body = serde_json::to_value(&report).expect("reports serialize");
    let cfg = config(c, "probe", json!({ "test": test, "grid": grid, "order": order }));
    emit(c.out.as_deref(), &pretty(&with_config(body, cfg)))?;
    Ok(report.exit_code() as u8)
}
