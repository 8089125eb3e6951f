use std::process::ExitCode;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use twderham_core::acceptance::{self, Scale};
use twderham_core::constraints::ConstraintProblem;
use twderham_core::dwork::{format_valuation, frobenius_eigenvalue};
use twderham_core::families::FamilyProblem;
use twderham_core::integral::{GaussianProblem, PivotStrategy, DEFAULT_STEP_CAP};
use twderham_core::milnor::MilnorData;
use twderham_core::parse::{max_x_index, parse_ring_spec, spec_context, ExprContext};
use twderham_core::ratfunc::RatFuncField;
use twderham_core::{Error, PiAdicRing, Poly, Ring, RingSpec};

const SEED_ENV: &str = "TWDERHAM_SEED";

#[derive(Parser, Debug)]
#[command(name = "twderham", version, about = "Twisted de Rham computations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Random seed; for picard-fuchs, the polynomial g of the class [g dx].
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Abort with exit code 1 when the computation runs longer.
    #[arg(long, global = true)]
    time_budget_ms: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Perturbative integral of g against exp(x^T A x / 2 + lambda V).
    Integrate(IntegrateArgs),
    /// Milnor number and monomial basis of the Jacobian ring.
    Milnor(MilnorArgs),
    /// Coordinates of [g dx] in the Milnor basis, with an exactness witness.
    Reduce(ReduceArgs),
    /// Picard-Fuchs operator of a one-parameter family.
    PicardFuchs(FamilyArgs),
    /// Forms on a constraint locus mapped to the ambient complex.
    Delta(DeltaArgs),
    /// Frobenius eigenvalue on H^1 of d + pi df in one variable.
    Frobenius(FrobeniusArgs),
    /// Runs the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[arg(long, default_value = "ZZ")]
    ring: String,
    /// Number of variables (default: largest index used).
    #[arg(long)]
    n: Option<usize>,
    /// Symmetric matrix, e.g. "[2,1;1,1]".
    #[arg(long = "A", allow_hyphen_values = true)]
    a: String,
    #[arg(long = "V", default_value = "0", allow_hyphen_values = true)]
    v: String,
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    #[arg(long, default_value_t = 8)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Pivot::Left)]
    pivot: Pivot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pivot {
    Left,
    Right,
    Seeded,
}

#[derive(Args, Debug)]
struct MilnorArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, default_value = "QQ")]
    ring: String,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    #[arg(long, default_value = "QQ")]
    ring: String,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Polynomial in x1.. and lambda.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    /// Hypersurface equation.
    #[arg(long = "P", allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: String,
    /// Twist on the constraint locus.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    f: String,
    /// Use the codimension-m map with the --constraint equations.
    #[arg(long)]
    codim: bool,
    #[arg(long = "constraint", allow_hyphen_values = true)]
    constraints: Vec<String>,
    #[arg(long, default_value = "QQ")]
    ring: String,
}

#[derive(Args, Debug)]
struct FrobeniusArgs {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long = "N", default_value_t = 20)]
    n: u32,
    #[arg(long = "D", default_value_t = 60)]
    d: usize,
    /// Alternative to --p/--N/--D, e.g. "padic:p=5:N=20:D=60".
    #[arg(long)]
    ring: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    f: String,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Run a single criterion.
    #[arg(long)]
    only: Option<String>,
    /// Instance counts as stated in the criteria instead of reduced ones.
    #[arg(long)]
    full: bool,
}

/// An error tagged with the flag whose value caused it.
struct Failure {
    flag: Option<&'static str>,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { flag: None, error }
    }
}

trait AtFlag<T> {
    fn at(self, flag: &'static str) -> Result<T, Failure>;
}

impl<T> AtFlag<T> for Result<T, Error> {
    fn at(self, flag: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { flag: Some(flag), error })
    }
}

struct Report {
    json: Json,
    text: String,
    success: bool,
}

impl Report {
    fn ok(fields: Vec<(&str, Json)>) -> Self {
        let mut map = Map::new();
        let mut text = String::new();
        for (k, v) in fields {
            let shown = match &v {
                Json::String(s) => s.clone(),
                Json::Array(a) => a
                    .iter()
                    .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                    .collect::<Vec<_>>()
                    .join(", "),
                other => other.to_string(),
            };
            text.push_str(&format!("{k}: {shown}\n"));
            map.insert(k.to_string(), v);
        }
        Report {
            json: Json::Object(map),
            text,
            success: true,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            println!("{}", json!({"error": "UsageError", "message": e.kind().to_string()}));
            return ExitCode::from(2);
        }
    };
    let format = cli.format;
    let budget = cli.time_budget_ms;
    let (tx, rx) = mpsc::channel();
    thread::Builder::new()
        .stack_size(64 << 20)
        .spawn(move || {
            let _ = tx.send(dispatch(cli));
        })
        .expect("spawn worker");
    let outcome = match budget {
        Some(ms) => match rx.recv_timeout(Duration::from_millis(ms)) {
            Ok(r) => r,
            Err(_) => {
                let msg = format!("time budget of {ms} ms exceeded");
                emit_error(format, "TimeBudgetExceeded", &msg, None, None);
                // the worker cannot be cancelled; exit without joining it
                std::process::exit(1);
            }
        },
        None => rx.recv().expect("worker result"),
    };
    match outcome {
        Ok(report) => {
            match format {
                Format::Json => println!("{}", report.json),
                Format::Text => print!("{}", report.text),
            }
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            let pos = match &f.error {
                Error::Parse { line, column, .. } => Some((*line, *column)),
                _ => None,
            };
            emit_error(format, f.error.name(), &f.error.to_string(), f.flag, pos);
            ExitCode::from(if f.error.is_input_error() { 2 } else { 1 })
        }
    }
}

fn emit_error(format: Format, name: &str, message: &str, flag: Option<&str>, pos: Option<(usize, usize)>) {
    let mut map = Map::new();
    map.insert("error".into(), json!(name));
    map.insert("message".into(), json!(message));
    if let Some(fl) = flag {
        map.insert("flag".into(), json!(fl));
    }
    if let Some((l, c)) = pos {
        map.insert("line".into(), json!(l));
        map.insert("column".into(), json!(c));
    }
    let place = flag.map(|f| format!(" in {f}")).unwrap_or_default();
    eprintln!("error{place}: {name}: {message}");
    if format == Format::Json {
        println!("{}", Json::Object(map));
    }
}

fn rng_seed(cli_seed: &Option<String>) -> Result<u64, Failure> {
    let raw = cli_seed.clone().or_else(|| std::env::var(SEED_ENV).ok());
    match raw {
        None => Ok(acceptance::DEFAULT_SEED),
        Some(s) => s.trim().parse().map_err(|_| Failure {
            flag: Some("--seed"),
            error: Error::InvalidArgument(format!("seed must be an unsigned integer, got '{s}'")),
        }),
    }
}

fn var_count(inputs: &[(&'static str, &str)]) -> Result<usize, Failure> {
    let mut n = 0;
    for (flag, s) in inputs {
        n = n.max(max_x_index(&[s]).at(flag)?);
    }
    Ok(n.max(1))
}

fn strings(items: impl IntoIterator<Item = String>) -> Json {
    Json::Array(items.into_iter().map(Json::String).collect())
}

fn dispatch(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Integrate(a) => integrate(a, &cli.seed),
        Command::Milnor(a) => milnor(a),
        Command::Reduce(a) => reduce(a),
        Command::PicardFuchs(a) => picard_fuchs(a, &cli.seed),
        Command::Delta(a) => delta(a, &cli.seed),
        Command::Frobenius(a) => frobenius(a),
        Command::Selftest(a) => selftest(a, &cli.seed),
    }
}

fn integrate(a: IntegrateArgs, seed: &Option<String>) -> Result<Report, Failure> {
    let ring = parse_ring_spec(&a.ring).at("--ring")?.spec;
    let n = match a.n {
        Some(n) => n,
        None => var_count(&[("--V", &a.v), ("--g", &a.g)])?,
    };
    let matrix = ExprContext::new(&ring, 0).parse_matrix(&a.a).at("--A")?;
    if matrix.rows() != n {
        return Err(Error::DimensionMismatch(format!("A is {}x{} but n = {n}", matrix.rows(), matrix.cols()))).at("--A");
    }
    let v = spec_context(&ring, n).parse_poly(&a.v).at("--V")?;
    if a.order == 0 {
        return Err(Error::InvalidArgument("order must be >= 1".into())).at("--order");
    }
    let problem = GaussianProblem::new(matrix, &v, a.order).at("--ring")?;
    let series = problem.series_ring();
    let g = spec_context(&series, n).parse_poly(&a.g).at("--g")?;
    let pivot = match a.pivot {
        Pivot::Left => PivotStrategy::Leftmost,
        Pivot::Right => PivotStrategy::Rightmost,
        Pivot::Seeded => PivotStrategy::Seeded(rng_seed(seed)?),
    };
    let result = problem.integrate_with(&g, pivot, DEFAULT_STEP_CAP)?;
    let coeffs = result.coefficients().iter().map(|c| ring.format(c));
    Ok(Report::ok(vec![
        ("ring", json!(ring.to_string())),
        ("lambda_order", json!(a.order)),
        ("coefficients", strings(coeffs)),
    ]))
}

fn field_spec(src: &str) -> Result<RingSpec, Failure> {
    let ring = parse_ring_spec(src).at("--ring")?.spec;
    if !ring.is_field() {
        return Err(Error::NotAField(ring.to_string())).at("--ring");
    }
    Ok(ring)
}

fn milnor(a: MilnorArgs) -> Result<Report, Failure> {
    let ring = field_spec(&a.ring)?;
    let n = var_count(&[("--f", &a.f)])?;
    let f = spec_context(&ring, n).parse_poly(&a.f).at("--f")?;
    let data = MilnorData::new(&f)?;
    Ok(Report::ok(vec![
        ("mu", json!(data.mu())),
        ("basis", strings(data.basis_strings())),
    ]))
}

fn reduce(a: ReduceArgs) -> Result<Report, Failure> {
    let ring = field_spec(&a.ring)?;
    let n = var_count(&[("--f", &a.f), ("--g", &a.g)])?;
    let ctx = spec_context(&ring, n);
    let f = ctx.parse_poly(&a.f).at("--f")?;
    let g = ctx.parse_poly(&a.g).at("--g")?;
    let data = MilnorData::new(&f)?;
    let red = data.reduce(&g)?;
    let verified = data.verify_witness(&g, &red.coordinates, &red.witness);
    if !verified {
        return Err(Error::WitnessMismatch.into());
    }
    Ok(Report::ok(vec![
        ("basis", strings(data.basis_strings())),
        ("coordinates", strings(red.coordinates.iter().map(|c| ring.format(c)))),
        ("witness_available", json!(true)),
        ("witness", json!(red.witness.to_string())),
    ]))
}

fn picard_fuchs(a: FamilyArgs, seed: &Option<String>) -> Result<Report, Failure> {
    let k = RatFuncField::new("lambda");
    let g_src = seed.clone().unwrap_or_else(|| "1".into());
    let n = var_count(&[("--f", &a.f), ("--seed", &g_src)])?;
    let ctx = ExprContext::new(&k, n).with_param("lambda", k.param());
    let f = ctx.parse_poly(&a.f).at("--f")?;
    let g = ctx.parse_poly(&g_src).at("--seed")?;
    let sample_seed = rng_seed(&std::env::var(SEED_ENV).ok())?;
    let family = FamilyProblem::new(&f, sample_seed).at("--f")?;
    let op = family.picard_fuchs(&g)?;
    Ok(Report::ok(vec![
        ("mu", json!(family.mu())),
        ("order", json!(op.order())),
        ("coefficients", strings(op.coefficient_strings("lambda"))),
    ]))
}

fn delta(a: DeltaArgs, seed: &Option<String>) -> Result<Report, Failure> {
    let ring = parse_ring_spec(&a.ring).at("--ring")?.spec;
    let mut inputs: Vec<(&'static str, &str)> = vec![("--omega", &a.omega), ("--f", &a.f)];
    if let Some(p) = &a.p {
        inputs.push(("--P", p));
    }
    for c in &a.constraints {
        inputs.push(("--constraint", c));
    }
    let n = var_count(&inputs)?;
    let ctx = spec_context(&ring, n);
    let omega = ctx.parse_form(&a.omega).at("--omega")?;
    let f = ctx.parse_poly(&a.f).at("--f")?;
    let eqs: Vec<Poly<RingSpec>> = if a.codim {
        if a.p.is_some() {
            return Err(Error::InvalidArgument("use --constraint with --codim, not --P".into())).at("--P");
        }
        if a.constraints.is_empty() {
            return Err(Error::InvalidArgument("--codim needs at least one --constraint".into())).at("--constraint");
        }
        a.constraints
            .iter()
            .map(|c| ctx.parse_poly(c))
            .collect::<Result<_, _>>()
            .at("--constraint")?
    } else {
        let p = a
            .p
            .as_ref()
            .ok_or(Error::InvalidArgument("--P is required without --codim".into()))
            .at("--P")?;
        vec![ctx.parse_poly(p).at("--P")?]
    };
    let m = eqs.len();
    let problem = ConstraintProblem::new(&f, eqs).at("--constraint")?;
    let image = problem.codim_m_map(&omega)?;
    let mut fields = vec![
        ("output", json!(image.to_string())),
        ("degree_shift", json!(2 * m)),
    ];
    if m == 1 && ring.is_field() {
        let cert = problem.chain_certificate(&omega)?;
        fields.push(("chain_map_certified", json!(cert.passed())));
    }
    if ring == RingSpec::Rationals || ring == RingSpec::Integers {
        let reg = problem.regularity(rng_seed(seed)?)?;
        fields.push(("isomorphism_guaranteed", json!(reg.isomorphism_guaranteed())));
    }
    Ok(Report::ok(fields))
}

fn frobenius(a: FrobeniusArgs) -> Result<Report, Failure> {
    let (ring, cutoff) = match &a.ring {
        Some(s) => {
            let parsed = parse_ring_spec(s).at("--ring")?;
            match parsed.spec {
                RingSpec::PiAdic(r) => (r, parsed.cutoff.unwrap_or(a.d)),
                other => {
                    return Err(Error::InvalidRingSpec(format!("expected a padic ring, got {other}"))).at("--ring")
                }
            }
        }
        None => {
            let p = a
                .p
                .ok_or(Error::InvalidArgument("--p or --ring is required".into()))
                .at("--p")?;
            (PiAdicRing::new(p, a.n).at("--p")?, a.d)
        }
    };
    if cutoff == 0 {
        return Err(Error::InvalidArgument("D must be >= 1".into())).at("--D");
    }
    let q = RingSpec::Rationals;
    let n = var_count(&[("--f", &a.f)])?;
    let f = ExprContext::new(&q, n).parse_poly(&a.f).at("--f")?;
    let e = frobenius_eigenvalue(&ring, &f, cutoff)?;
    let p = ring.prime() as i64;
    let v = e.alpha.valuation(&ring);
    let digits: Vec<String> = e.digits.iter().map(u64::to_string).collect();
    Ok(Report::ok(vec![
        ("p", json!(p)),
        ("N", json!(ring.precision())),
        ("D", json!(cutoff)),
        ("alpha", json!(digits.join(" "))),
        ("valuation", json!(format_valuation(&e.valuation))),
        ("horizon", json!(e.horizon)),
        ("alpha_squared_mod", json!(e.alpha_squared_mod.to_string())),
        ("alpha_squared_digits", json!(e.alpha_squared_digits)),
        ("precision_ok", json!(e.horizon >= v + p - 1)),
    ]))
}

fn selftest(a: SelftestArgs, seed: &Option<String>) -> Result<Report, Failure> {
    let seed = rng_seed(seed)?;
    let scale = if a.full { Scale::Full } else { Scale::Reduced };
    let ids: Vec<&str> = match &a.only {
        Some(id) => {
            if !acceptance::criterion_ids().contains(&id.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "unknown criterion '{id}'; known: {}",
                    acceptance::criterion_ids().join(", ")
                )))
                .at("--only");
            }
            vec![id.as_str()]
        }
        None => acceptance::criterion_ids(),
    };
    let results: Vec<_> = ids
        .iter()
        .filter_map(|id| acceptance::run_criterion(id, scale, seed))
        .collect();
    let success = results.iter().all(|r| r.ok());
    let json = json!({
        "seed": seed.to_string(),
        "passed": success,
        "results": results.iter().map(|r| json!({
            "criterion": r.id,
            "index": r.index,
            "passed": r.ok(),
            "detail": r.detail,
        })).collect::<Vec<_>>(),
    });
    let text = results.iter().map(|r| format!("{r}\n")).collect();
    Ok(Report { json, text, success })
}
