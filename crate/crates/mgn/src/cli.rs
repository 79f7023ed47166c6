//! Command surface: argument parsing, dispatch, cache wiring, and
//! canonical report serialization.
//!
//! Every command produces a single JSON payload whose bytes depend
//! only on the inputs and tool version, never on cache temperature or
//! timing; rationals are always `"p/q"` strings. The status of a run
//! maps onto the process exit code: `ok` 0, `check-failed` 1 (a
//! mathematical identity did not hold), `invalid-input` 2,
//! `resource-limit` 3. A `--budget` in seconds races the computation
//! against a deadline on a worker thread.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use clap::{value_parser, Arg, Command};

use crate::cache::{CacheKind, CacheStore};
use crate::dhstruct::{dh_grid, dh_polynomial_from_values, dh_structure_report};
use crate::elsv::{
    check_lambda_g, extract_hodge_integrals, grid_partitions, interpolate_hurwitz_polynomial,
    lattice_keys, ElsvReport, HodgeIntegralTable,
};
use crate::error::{Error, Result};
use crate::hurwitz::HurwitzEngine;
use crate::partition::Partition;
use crate::rat::Rat;
use crate::residuals::{kp_residuals, witten_kdv_residual};
use crate::series::{Family, TruncatedSeries, TruncationSpec};
use crate::tft::{closed_partition_function, evaluate_cobordism, Cobordism, FrobeniusData};
use crate::virasoro::{commutator_residual, virasoro_apply, witten_tau, SecondSumRange};
use crate::witten::CorrelatorEngine;

/// Outcome class of a command, in bijection with the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    InvalidInput,
    ResourceLimit,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::InvalidInput => 2,
            Status::ResourceLimit => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::CheckFailed => "check-failed",
            Status::InvalidInput => "invalid-input",
            Status::ResourceLimit => "resource-limit",
        }
    }
}

/// Result of one command invocation. The payload is already in the
/// requested output format; timing is reported separately so payload
/// bytes stay deterministic.
#[derive(Debug)]
pub struct CommandResult {
    pub status: Status,
    pub payload: String,
    pub timing_ms: u64,
}

#[derive(Debug, Clone)]
enum Cmd {
    Correlator { g: u32, d: Vec<u32> },
    KdvCheck { n: u32, k: u32, d: u32, gmax: u32 },
    VirasoroCheck { nmax: i64 },
    HurwitzSingle { g: u32, alpha: Vec<u32> },
    HurwitzDouble { g: u32, d: u32, beta: Vec<u32> },
    ElsvFit { g: u32, n: usize, max_part: u32 },
    ElsvLambdaG { g: u32, n: usize },
    DhFit { g: u32, n: usize, max_d: u32 },
    KpCheck { input: PathBuf },
    TftEval { file: PathBuf, deltas: Vec<Rat> },
    TftClosed { g: u32, deltas: Vec<Rat> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
struct Globals {
    cache: Option<PathBuf>,
    format: Format,
    budget: Option<u64>,
}

/// Parses and runs one invocation. `argv` excludes the program name.
pub fn execute_command(argv: &[String]) -> CommandResult {
    let started = Instant::now();
    let (status, payload) = execute_inner(argv);
    CommandResult {
        status,
        payload,
        timing_ms: started.elapsed().as_millis() as u64,
    }
}

fn execute_inner(argv: &[String]) -> (Status, String) {
    let mut full = Vec::with_capacity(argv.len() + 1);
    full.push("mgn".to_string());
    full.extend(argv.iter().cloned());
    let matches = match build_command().try_get_matches_from(full) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                (Status::Ok, String::new())
            } else {
                (
                    Status::InvalidInput,
                    err_payload("unknown subcommand or malformed flags"),
                )
            };
        }
    };
    let (cmd, globals) = match parse_cmd(&matches) {
        Ok(x) => x,
        Err(e) => return (map_error(&e), err_payload(&e.to_string())),
    };
    let cache = globals.cache.clone();
    let (status, payload) = with_budget(globals.budget, move || run_cmd(cmd, cache));
    let payload = match globals.format {
        Format::Json => payload,
        Format::Csv => match to_csv(&payload) {
            Ok(csv) => csv,
            Err(e) => return (map_error(&e), err_payload(&e.to_string())),
        },
    };
    (status, payload)
}

fn with_budget<F>(budget: Option<u64>, f: F) -> (Status, String)
where
    F: FnOnce() -> (Status, String) + Send + 'static,
{
    match budget {
        None => f(),
        Some(secs) => {
            let (tx, rx) = mpsc::channel();
            thread::spawn(move || {
                let _ = tx.send(f());
            });
            match rx.recv_timeout(Duration::from_secs(secs)) {
                Ok(r) => r,
                Err(_) => (
                    Status::ResourceLimit,
                    err_payload(&format!("budget of {secs} s exceeded")),
                ),
            }
        }
    }
}

fn run_cmd(cmd: Cmd, cache: Option<PathBuf>) -> (Status, String) {
    match try_run(cmd, cache.as_deref()) {
        Ok(out) => out,
        Err(e) => (map_error(&e), err_payload(&e.to_string())),
    }
}

fn try_run(cmd: Cmd, cache: Option<&Path>) -> Result<(Status, String)> {
    let mut store = match cache {
        Some(p) => CacheStore::load(p)?,
        None => CacheStore::empty(),
    };
    let out = dispatch(cmd, &mut store)?;
    if let Some(p) = cache {
        store.save_if_dirty(p)?;
    }
    Ok(out)
}

fn dispatch(cmd: Cmd, store: &mut CacheStore) -> Result<(Status, String)> {
    match cmd {
        Cmd::Correlator { g, d } => correlator_cmd(g, &d, store),
        Cmd::KdvCheck { n, k, d, gmax } => kdv_cmd(n, k, d, gmax),
        Cmd::VirasoroCheck { nmax } => virasoro_cmd(nmax),
        Cmd::HurwitzSingle { g, alpha } => hurwitz_single_cmd(g, alpha, store),
        Cmd::HurwitzDouble { g, d, beta } => hurwitz_double_cmd(g, d, beta, store),
        Cmd::ElsvFit { g, n, max_part } => elsv_fit_cmd(g, n, Some(max_part), store),
        Cmd::ElsvLambdaG { g, n } => lambda_g_cmd(g, n, store),
        Cmd::DhFit { g, n, max_d } => dh_fit_cmd(g, n, max_d, store),
        Cmd::KpCheck { input } => kp_cmd(&input),
        Cmd::TftEval { file, deltas } => tft_eval_cmd(&file, deltas),
        Cmd::TftClosed { g, deltas } => tft_closed_cmd(g, deltas),
    }
}

fn map_error(e: &Error) -> Status {
    match e {
        Error::InvalidInput(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::DegenerateGrid(_)
        | Error::CacheIntegrity { .. } => Status::InvalidInput,
        Error::ResourceLimit(_) => Status::ResourceLimit,
        Error::ExactnessViolation(_)
        | Error::PolynomialityViolation(_)
        | Error::StructureViolation(_)
        | Error::Integrity(_)
        | Error::CheckFailed(_) => Status::CheckFailed,
    }
}

fn esc(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

fn err_payload(msg: &str) -> String {
    format!("{{\"error\":{}}}", esc(msg))
}

fn join_u32(xs: &[u32]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn status_of(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::CheckFailed
    }
}

fn correlator_cmd(g: u32, d: &[u32], store: &mut CacheStore) -> Result<(Status, String)> {
    let key = format!("g={g};d={}", join_u32(d));
    let v = match store.get(CacheKind::Correlator, &key) {
        Some(v) => v.to_string(),
        None => {
            let v = CorrelatorEngine::new().correlator(g, d)?.to_string();
            store.put(CacheKind::Correlator, key, v.clone());
            v
        }
    };
    Ok((
        Status::Ok,
        format!("{{\"g\":{g},\"d\":[{}],\"v\":\"{v}\"}}", join_u32(d)),
    ))
}

fn kdv_cmd(n: u32, k: u32, d: u32, gmax: u32) -> Result<(Status, String)> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "the KdV checker covers equations 1..3, not n = {n}"
        )));
    }
    let mut engine = CorrelatorEngine::new();
    let residual = witten_kdv_residual(&mut engine, n, k, d, gmax)?;
    let zero = residual.is_empty();
    Ok((
        status_of(zero),
        format!("{{\"n\":{n},\"K\":{k},\"D\":{d},\"gmax\":{gmax},\"zero\":{zero}}}"),
    ))
}

fn virasoro_cmd(nmax: i64) -> Result<(Status, String)> {
    if !(-1..=6).contains(&nmax) {
        return Err(Error::InvalidInput(format!(
            "nmax must lie in -1..=6, got {nmax}"
        )));
    }
    let mut engine = CorrelatorEngine::new();
    let tau = witten_tau(&mut engine, 5, 4, 0)?;
    // The commutator identity is an operator statement, so it is
    // checked on monomial basis vectors over a window wide enough for
    // two nested applications of L_3.
    let comm_spec = TruncationSpec::new(9, 6, -8, 8)?;
    let monos: Vec<Vec<u32>> = vec![
        vec![0; 10],
        {
            let mut e = vec![0; 10];
            e[0] = 1;
            e
        },
        {
            let mut e = vec![0; 10];
            e[2] = 1;
            e
        },
        {
            let mut e = vec![0; 10];
            e[0] = 1;
            e[1] = 1;
            e
        },
        {
            let mut e = vec![0; 10];
            e[1] = 2;
            e[3] = 1;
            e
        },
    ];
    let mut passing = [false; 2];
    let mut vanish_std = false;
    let mut comm_std = false;
    for (ri, range) in [SecondSumRange::Standard, SecondSumRange::FromOne]
        .into_iter()
        .enumerate()
    {
        let mut vanish = true;
        for n in -1..=nmax {
            vanish &= virasoro_apply(n, &tau, range)?.is_empty();
        }
        let mut comm = true;
        for e in &monos {
            let mut basis = TruncatedSeries::zero(Family::T, comm_spec);
            basis.add_term(0, e.clone(), Rat::one())?;
            for m in -1..=3i64 {
                for n in -1..m {
                    if m + n < -1 {
                        continue;
                    }
                    comm &= commutator_residual(m, n, &basis, range)?.is_empty();
                }
            }
        }
        if ri == 0 {
            vanish_std = vanish;
            comm_std = comm;
        }
        passing[ri] = vanish && comm;
    }
    let discrimination = passing[0] && !passing[1];
    let ok = vanish_std && comm_std && discrimination;
    Ok((
        status_of(ok),
        format!(
            "{{\"nmax\":{nmax},\"vanish\":{vanish_std},\"commutators\":{comm_std},\"discrimination\":{discrimination}}}"
        ),
    ))
}

fn hurwitz_single_cmd(
    g: u32,
    alpha: Vec<u32>,
    store: &mut CacheStore,
) -> Result<(Status, String)> {
    let alpha = Partition::new(alpha)?;
    let key = format!("single;g={g};alpha={}", join_u32(alpha.parts()));
    let v = match store.get(CacheKind::Hurwitz, &key) {
        Some(v) => v.to_string(),
        None => {
            let v = HurwitzEngine::new().single_hurwitz(g, &alpha)?.to_string();
            store.put(CacheKind::Hurwitz, key, v.clone());
            v
        }
    };
    Ok((Status::Ok, format!("{{\"H\":\"{v}\"}}")))
}

fn hurwitz_double_cmd(
    g: u32,
    d: u32,
    beta: Vec<u32>,
    store: &mut CacheStore,
) -> Result<(Status, String)> {
    let beta = Partition::new(beta)?;
    let v = cached_double_hurwitz(g, d, &beta, store, &mut HurwitzEngine::new())?;
    Ok((Status::Ok, format!("{{\"H\":\"{v}\"}}")))
}

fn cached_double_hurwitz(
    g: u32,
    d: u32,
    beta: &Partition,
    store: &mut CacheStore,
    engine: &mut HurwitzEngine,
) -> Result<Rat> {
    let key = format!("double;g={g};d={d};beta={}", join_u32(beta.parts()));
    match store.get(CacheKind::Dh, &key) {
        Some(v) => Rat::from_str(v),
        None => {
            let v = engine.double_hurwitz_one_part(g, d, beta)?;
            store.put(CacheKind::Dh, key, v.to_string());
            Ok(v)
        }
    }
}

fn hodge_cache_key(g: u32, n: usize, a: &[u32], k: u32) -> String {
    format!("g={g};n={n};a={};k={k}", join_u32(a))
}

/// Builds the Hodge table for `(g, n)`, serving it entirely from the
/// cache when every lattice entry is present. `max_part` fixes the
/// sample grid; without it the grid grows until the fit succeeds.
fn elsv_table(
    g: u32,
    n: usize,
    max_part: Option<u32>,
    store: &mut CacheStore,
) -> Result<HodgeIntegralTable> {
    let keys = lattice_keys(g, n)?;
    let mut cached = Vec::with_capacity(keys.len());
    for (a, k) in &keys {
        match store.get(CacheKind::Hodge, &hodge_cache_key(g, n, a, *k)) {
            Some(v) => cached.push(((a.clone(), *k), Rat::from_str(v)?)),
            None => {
                cached.clear();
                break;
            }
        }
    }
    if cached.len() == keys.len() && !keys.is_empty() {
        return HodgeIntegralTable::from_entries(g, n, cached);
    }
    let mut engine = HurwitzEngine::new();
    let poly = match max_part {
        Some(mp) => interpolate_hurwitz_polynomial(&mut engine, g, n, &grid_partitions(n, mp)?)?,
        None => {
            let needed = keys.len() + keys.len().div_ceil(5);
            let mut mp = 1u32;
            while grid_partitions(n, mp)?.len() < needed {
                mp += 1;
                if mp > 64 {
                    return Err(Error::ResourceLimit(format!(
                        "no sample grid of tractable part size for (g, n) = ({g}, {n})"
                    )));
                }
            }
            let mut attempts = 0;
            loop {
                match interpolate_hurwitz_polynomial(&mut engine, g, n, &grid_partitions(n, mp)?) {
                    Ok(p) => break p,
                    Err(Error::DegenerateGrid(_)) if attempts < 3 => {
                        attempts += 1;
                        mp += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    };
    let table = extract_hodge_integrals(&poly, g, n)?;
    for ((a, k), v) in table.iter() {
        store.put(CacheKind::Hodge, hodge_cache_key(g, n, a, *k), v.to_string());
    }
    Ok(table)
}

fn elsv_fit_cmd(
    g: u32,
    n: usize,
    max_part: Option<u32>,
    store: &mut CacheStore,
) -> Result<(Status, String)> {
    let table = elsv_table(g, n, max_part, store)?;
    let check = check_lambda_g(&table)?;
    let payload = ElsvReport::build(&table)?.to_json()?;
    Ok((status_of(check.all_match), payload))
}

fn lambda_g_cmd(g: u32, n: usize, store: &mut CacheStore) -> Result<(Status, String)> {
    let table = elsv_table(g, n, None, store)?;
    let check = check_lambda_g(&table)?;
    Ok((
        status_of(check.all_match),
        format!(
            "{{\"g\":{g},\"n\":{n},\"c_g\":\"{}\",\"cases\":{},\"all_match\":{}}}",
            check.c_g,
            check.entries.len(),
            check.all_match
        ),
    ))
}

fn dh_fit_poly(
    g: u32,
    n: usize,
    max_d: u32,
    store: &mut CacheStore,
    engine: &mut HurwitzEngine,
) -> Result<crate::dhstruct::DoubleHurwitzPolynomial> {
    let grid = dh_grid(n, max_d)?;
    let mut samples = Vec::with_capacity(grid.len());
    for beta in grid {
        let d = beta.size();
        let h = cached_double_hurwitz(g, d, &beta, store, engine)?;
        samples.push((beta, h));
    }
    dh_polynomial_from_values(g, n, &samples)
}

fn dh_fit_cmd(g: u32, n: usize, max_d: u32, store: &mut CacheStore) -> Result<(Status, String)> {
    let mut engine = HurwitzEngine::new();
    let poly = dh_fit_poly(g, n, max_d, store, &mut engine)?;
    // The string and dilaton identities relate the table to its
    // (n + 1)-point companion; skip them when that fit is out of reach
    // on the same sample budget.
    let companion = match dh_fit_poly(g, n + 1, max_d, store, &mut engine) {
        Ok(p) => Some(p),
        Err(Error::DegenerateGrid(_)) => None,
        Err(e) => return Err(e),
    };
    let report = dh_structure_report(&poly, companion.as_ref())?;
    let payload = report.to_json()?;
    Ok((status_of(report.checks_pass()), payload))
}

fn kp_cmd(input: &Path) -> Result<(Status, String)> {
    let text = std::fs::read_to_string(input)?;
    let f = TruncatedSeries::from_json(&text)?;
    let residuals = kp_residuals(&f)?;
    let zero: Vec<bool> = residuals.iter().map(TruncatedSeries::is_empty).collect();
    let all = zero.iter().all(|z| *z);
    let list = zero
        .iter()
        .map(|z| z.to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok((
        status_of(all),
        format!("{{\"zero\":[{list}],\"all_zero\":{all}}}"),
    ))
}

fn tft_eval_cmd(file: &Path, deltas: Vec<Rat>) -> Result<(Status, String)> {
    let cob = Cobordism::from_json(&std::fs::read_to_string(file)?)?;
    let frob = FrobeniusData::new(deltas)?;
    let map = evaluate_cobordism(&cob, &frob)?;
    let blocks = map
        .blocks()
        .iter()
        .map(|b| {
            let entries = (0..map.n)
                .map(|i| {
                    format!(
                        "{{\"e\":{},\"c\":\"{}\"}}",
                        b.entry(i).sqrt_exp,
                        b.entry(i).coeff
                    )
                })
                .collect::<Vec<_>>()
                .join(",");
            format!(
                "{{\"in\":[{}],\"out\":[{}],\"entries\":[{entries}]}}",
                b.in_slots
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                b.out_slots
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect::<Vec<_>>()
        .join(",");
    Ok((
        Status::Ok,
        format!(
            "{{\"n\":{},\"p\":{},\"q\":{},\"scalar\":\"{}\",\"blocks\":[{blocks}]}}",
            map.n, map.p, map.q, map.scalar
        ),
    ))
}

fn tft_closed_cmd(g: u32, deltas: Vec<Rat>) -> Result<(Status, String)> {
    let frob = FrobeniusData::new(deltas)?;
    let z = closed_partition_function(g, &frob)?;
    Ok((Status::Ok, format!("{{\"Z\":\"{z}\"}}")))
}

fn to_csv(json: &str) -> Result<String> {
    let v: serde_json::Value = serde_json::from_str(json)?;
    let mut rows = vec!["path,value".to_string()];
    flatten_json("", &v, &mut rows);
    Ok(rows.join("\n"))
}

fn flatten_json(path: &str, v: &serde_json::Value, rows: &mut Vec<String>) {
    use serde_json::Value;
    let child = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match v {
        Value::Object(m) => {
            for (k, val) in m {
                flatten_json(&child(k), val, rows);
            }
        }
        Value::Array(xs) => {
            for (i, val) in xs.iter().enumerate() {
                flatten_json(&child(&i.to_string()), val, rows);
            }
        }
        Value::Null => rows.push(format!("{path},")),
        Value::Bool(b) => rows.push(format!("{path},{b}")),
        Value::Number(n) => rows.push(format!("{path},{n}")),
        Value::String(s) => rows.push(format!("{path},{}", csv_escape(s))),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn build_command() -> Command {
    let list = |name: &'static str, help: &'static str| {
        Arg::new(name)
            .long(name)
            .value_name("LIST")
            .required(true)
            .help(help)
    };
    let g_arg = Arg::new("g")
        .long("g")
        .value_name("G")
        .value_parser(value_parser!(u32))
        .required(true)
        .help("genus");
    let n_arg = Arg::new("n")
        .long("n")
        .value_name("N")
        .value_parser(value_parser!(usize))
        .required(true)
        .help("number of marked points");
    Command::new("mgn")
        .about("Exact computations: intersection numbers, Hurwitz counts, Hodge integrals, 2d field theories")
        .version(crate::cache::TOOL_VERSION)
        .subcommand_required(true)
        .arg(
            Arg::new("cache")
                .long("cache")
                .value_name("PATH")
                .value_parser(value_parser!(PathBuf))
                .global(true)
                .help("JSON-lines result cache"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_parser(["json", "csv"])
                .default_value("json")
                .global(true)
                .help("payload format"),
        )
        .arg(
            Arg::new("budget")
                .long("budget")
                .value_name("SECONDS")
                .value_parser(value_parser!(u64))
                .global(true)
                .help("wall-clock limit"),
        )
        .subcommand(
            Command::new("correlator")
                .about("One intersection number <tau_{d_1} ... tau_{d_n}>_g")
                .arg(g_arg.clone())
                .arg(list("d", "comma-separated psi exponents")),
        )
        .subcommand(
            Command::new("kdv-check")
                .about("Residual of the n-th KdV equation on the truncated free energy")
                .arg(
                    Arg::new("n")
                        .long("n")
                        .value_name("N")
                        .value_parser(value_parser!(u32))
                        .required(true)
                        .help("equation index, 1..3"),
                )
                .arg(
                    Arg::new("K")
                        .long("K")
                        .value_name("K")
                        .value_parser(value_parser!(u32))
                        .default_value("6")
                        .help("highest variable index"),
                )
                .arg(
                    Arg::new("D")
                        .long("D")
                        .value_name("D")
                        .value_parser(value_parser!(u32))
                        .default_value("6")
                        .help("degree cutoff"),
                )
                .arg(
                    Arg::new("gmax")
                        .long("gmax")
                        .value_name("G")
                        .value_parser(value_parser!(u32))
                        .default_value("2")
                        .help("genus cutoff"),
                ),
        )
        .subcommand(
            Command::new("virasoro-check")
                .about("Vanishing, commutators, and the lower-bound discrimination of the constraint operators")
                .arg(
                    Arg::new("nmax")
                        .long("nmax")
                        .value_name("N")
                        .value_parser(value_parser!(i64))
                        .allow_negative_numbers(true)
                        .required(true)
                        .help("check L_n tau = 0 for n in -1..=nmax"),
                ),
        )
        .subcommand(
            Command::new("hurwitz")
                .about("Transposition-factorization counts")
                .subcommand_required(true)
                .subcommand(
                    Command::new("single")
                        .about("Single Hurwitz number H^g_alpha")
                        .arg(g_arg.clone())
                        .arg(list("alpha", "ramification profile over infinity")),
                )
                .subcommand(
                    Command::new("double")
                        .about("One-part double Hurwitz number H^g_((d), beta)")
                        .arg(g_arg.clone())
                        .arg(
                            Arg::new("d")
                                .long("d")
                                .value_name("D")
                                .value_parser(value_parser!(u32))
                                .required(true)
                                .help("sheet count; beta must partition it"),
                        )
                        .arg(list("beta", "profile over infinity")),
                ),
        )
        .subcommand(
            Command::new("elsv")
                .about("Hodge integrals via normalized Hurwitz polynomials")
                .subcommand_required(true)
                .subcommand(
                    Command::new("fit")
                        .about("Fit the banded polynomial and report the integral table")
                        .arg(g_arg.clone())
                        .arg(n_arg.clone())
                        .arg(
                            Arg::new("max-part")
                                .long("max-part")
                                .value_name("M")
                                .value_parser(value_parser!(u32))
                                .required(true)
                                .help("largest sample part"),
                        ),
                )
                .subcommand(
                    Command::new("lambda-g")
                        .about("Top-lambda proportionality with the genus constant c_g")
                        .arg(g_arg.clone())
                        .arg(n_arg.clone()),
                ),
        )
        .subcommand(
            Command::new("dh")
                .about("One-part double Hurwitz polynomial structure")
                .subcommand_required(true)
                .subcommand(
                    Command::new("fit")
                        .about("Fit the even-codegree polynomial and run the structure checks")
                        .arg(g_arg.clone())
                        .arg(n_arg.clone())
                        .arg(
                            Arg::new("max-d")
                                .long("max-d")
                                .value_name("M")
                                .value_parser(value_parser!(u32))
                                .required(true)
                                .help("largest sampled degree"),
                        ),
                ),
        )
        .subcommand(
            Command::new("kp-check")
                .about("Residuals of the first three KP equations on a stored series")
                .arg(
                    Arg::new("input")
                        .long("input")
                        .value_name("FILE")
                        .value_parser(value_parser!(PathBuf))
                        .required(true)
                        .help("JSON series in the p-family"),
                ),
        )
        .subcommand(
            Command::new("tft")
                .about("Semisimple two dimensional field theory evaluation")
                .subcommand_required(true)
                .subcommand(
                    Command::new("eval")
                        .about("Evaluate a cobordism file to its block-diagonal map")
                        .arg(
                            Arg::new("file")
                                .long("file")
                                .value_name("FILE")
                                .value_parser(value_parser!(PathBuf))
                                .required(true)
                                .help("cobordism JSON"),
                        )
                        .arg(list("deltas", "pairing values, nonzero rationals")),
                )
                .subcommand(
                    Command::new("closed")
                        .about("Partition function of the closed genus-g surface")
                        .arg(g_arg.clone())
                        .arg(list("deltas", "pairing values, nonzero rationals")),
                ),
        )
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidInput(format!("malformed integer list entry {t:?}")))
        })
        .collect()
}

fn parse_rat_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',').map(|t| Rat::from_str(t.trim())).collect()
}

fn parse_cmd(matches: &clap::ArgMatches) -> Result<(Cmd, Globals)> {
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let leaf = match sub.subcommand() {
        Some((_, inner)) => inner,
        None => sub,
    };
    let globals = Globals {
        cache: leaf.get_one::<PathBuf>("cache").cloned(),
        format: match leaf.get_one::<String>("format").map(String::as_str) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        },
        budget: leaf.get_one::<u64>("budget").copied(),
    };
    let req_u32 = |m: &clap::ArgMatches, id: &str| *m.get_one::<u32>(id).expect("required");
    let cmd = match (name, sub.subcommand()) {
        ("correlator", _) => Cmd::Correlator {
            g: req_u32(sub, "g"),
            d: parse_u32_list(sub.get_one::<String>("d").expect("required"))?,
        },
        ("kdv-check", _) => Cmd::KdvCheck {
            n: req_u32(sub, "n"),
            k: req_u32(sub, "K"),
            d: req_u32(sub, "D"),
            gmax: req_u32(sub, "gmax"),
        },
        ("virasoro-check", _) => Cmd::VirasoroCheck {
            nmax: *sub.get_one::<i64>("nmax").expect("required"),
        },
        ("hurwitz", Some(("single", m))) => Cmd::HurwitzSingle {
            g: req_u32(m, "g"),
            alpha: parse_u32_list(m.get_one::<String>("alpha").expect("required"))?,
        },
        ("hurwitz", Some(("double", m))) => Cmd::HurwitzDouble {
            g: req_u32(m, "g"),
            d: req_u32(m, "d"),
            beta: parse_u32_list(m.get_one::<String>("beta").expect("required"))?,
        },
        ("elsv", Some(("fit", m))) => Cmd::ElsvFit {
            g: req_u32(m, "g"),
            n: *m.get_one::<usize>("n").expect("required"),
            max_part: req_u32(m, "max-part"),
        },
        ("elsv", Some(("lambda-g", m))) => Cmd::ElsvLambdaG {
            g: req_u32(m, "g"),
            n: *m.get_one::<usize>("n").expect("required"),
        },
        ("dh", Some(("fit", m))) => Cmd::DhFit {
            g: req_u32(m, "g"),
            n: *m.get_one::<usize>("n").expect("required"),
            max_d: req_u32(m, "max-d"),
        },
        ("kp-check", _) => Cmd::KpCheck {
            input: sub.get_one::<PathBuf>("input").expect("required").clone(),
        },
        ("tft", Some(("eval", m))) => Cmd::TftEval {
            file: m.get_one::<PathBuf>("file").expect("required").clone(),
            deltas: parse_rat_list(m.get_one::<String>("deltas").expect("required"))?,
        },
        ("tft", Some(("closed", m))) => Cmd::TftClosed {
            g: req_u32(m, "g"),
            deltas: parse_rat_list(m.get_one::<String>("deltas").expect("required"))?,
        },
        _ => unreachable!("clap enforces the subcommand set"),
    };
    Ok((cmd, globals))
}
