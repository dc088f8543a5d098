//! Command-line front end: run point counts, verify engines against each
//! other and the brute-force oracle, sweep parameter grids, and dump the
//! internal Gauss-sum / gamma / weight-lattice tables.
//!
//! Exit codes: 0 success, 2 invalid input, 3 engine precondition violated,
//! 4 verification mismatch, 5 precision failure.

mod output;
mod runner;
mod spec;

use clap::{Args, Parser, Subcommand};
use diagdeform::charsum::{CharIndex, CharTable};
use diagdeform::counting::{projective_bound, DeformParams, EngineId};
use diagdeform::error::Error as CoreError;
use diagdeform::ffield::FieldCtx;
use diagdeform::hyperg::{evaluate_g, GParams};
use diagdeform::padic::PadicCtx;
use diagdeform::wlattice::{build_w_set, dwork_profile, partition_classes};
use output::{OutputFormat, Sink};
use runner::{applicable, run_engine, EngineDisposition};
use spec::{parse_ratio_list, LambdaSpec};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "diagdeform",
    version,
    about = "Point counts on diagonal hypersurfaces with monomial deformation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a single engine at one parameter point
    Count(RunConfig),
    /// Run every applicable engine and assert pairwise agreement
    Verify(RunConfig),
    /// Run engines over a grid of fields and lambdas
    Sweep(SweepConfig),
    /// Dump Gauss sums g(T^j) as CSV (j, re, im, |g|^2)
    GsumTable(TableConfig),
    /// Dump p-adic gamma values at the j/(q-1) lattice as CSV
    GammaTable(TableConfig),
    /// Dump W, its classes and (in the Dwork case) profiles as JSON
    Wset(WsetConfig),
    /// Evaluate the p-adic hypergeometric function for explicit parameters
    Gfun(GfunConfig),
}

/// Parameters shared by `count` and `verify`.
#[derive(Args, Debug, Clone, PartialEq)]
pub struct RunConfig {
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Number of variables; must equal the length of --h
    #[arg(long)]
    pub n: u32,
    /// Monomial exponents h_1,...,h_n (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub h: Vec<u32>,
    /// Lambda: "g^K", a coefficient list "c0,c1,..", or "all"
    #[arg(long)]
    pub lambda: String,
    /// Engine name (count only); see README for the list
    #[arg(long)]
    pub engine: Option<String>,
    /// Complex working precision in bits (env DIAGDEFORM_PREC_BITS)
    #[arg(long)]
    pub prec_bits: Option<u32>,
    /// Extra p-adic digits on top of the padded default
    #[arg(long, default_value_t = 0)]
    pub extra_digits: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write output here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also print p-adic context internals (valuation + digit strings)
    #[arg(long, default_value_t = false)]
    pub debug: bool,
}

impl RunConfig {
    /// Re-serialize into argv form; parse(to_args) is the identity.
    pub fn to_args(&self, subcommand: &str) -> Vec<String> {
        let mut v = vec![
            "diagdeform".into(),
            subcommand.into(),
            "--p".into(),
            self.p.to_string(),
            "--r".into(),
            self.r.to_string(),
            "--n".into(),
            self.n.to_string(),
            "--h".into(),
            self.h
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
            "--lambda".into(),
            self.lambda.clone(),
        ];
        if let Some(e) = &self.engine {
            v.extend(["--engine".into(), e.clone()]);
        }
        if let Some(b) = self.prec_bits {
            v.extend(["--prec-bits".into(), b.to_string()]);
        }
        v.extend(["--extra-digits".into(), self.extra_digits.to_string()]);
        v.extend(["--format".into(), self.format.to_string()]);
        if let Some(o) = &self.output {
            v.extend(["--output".into(), o.display().to_string()]);
        }
        if self.debug {
            v.push("--debug".into());
        }
        v
    }
}

#[derive(Args, Debug, Clone)]
struct SweepConfig {
    /// Prime powers to sweep, e.g. 5,7,9,13
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    #[arg(long)]
    n: u32,
    /// Exponent vector; defaults to all ones (the Dwork family)
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<u32>>,
    #[arg(long, default_value = "all")]
    lambda: String,
    #[arg(long)]
    prec_bits: Option<u32>,
    #[arg(long, default_value_t = 0)]
    extra_digits: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (env DIAGDEFORM_WORKERS; default 2)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct TableConfig {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long)]
    prec_bits: Option<u32>,
    /// p-adic digits for gamma-table (default: sized for counts in P^2)
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct WsetConfig {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    t: u32,
    /// Exponent vector for the class partition; defaults to all ones
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<u32>>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct GfunConfig {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Top-line parameters, e.g. 1/3,2/3
    #[arg(long)]
    a: String,
    /// Bottom-line parameters, e.g. 1,1
    #[arg(long)]
    b: String,
    /// Argument: "g^K" or a coefficient list
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Debug)]
pub enum AppError {
    Invalid(String),
    Core(CoreError),
    Mismatch(String),
    Io(std::io::Error),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Invalid(m) => write!(f, "invalid input: {m}"),
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Mismatch(m) => write!(f, "verification mismatch: {m}"),
            AppError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

fn exit_code(e: &AppError) -> i32 {
    match e {
        AppError::Invalid(_) | AppError::Io(_) => 2,
        AppError::Mismatch(_) => 4,
        AppError::Core(c) if c.is_precondition() => 3,
        AppError::Core(c) if c.is_precision() => 5,
        AppError::Core(_) => 2,
    }
}

pub type AppResult<T> = Result<T, AppError>;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own message; usage errors exit 2, --help exits 0
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Count(cfg) => cmd_count(&cfg),
        Command::Verify(cfg) => cmd_verify(&cfg),
        Command::Sweep(cfg) => cmd_sweep(&cfg),
        Command::GsumTable(cfg) => cmd_gsum_table(&cfg),
        Command::GammaTable(cfg) => cmd_gamma_table(&cfg),
        Command::Wset(cfg) => cmd_wset(&cfg),
        Command::Gfun(cfg) => cmd_gfun(&cfg),
    };
    match result {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn build_field(p: u64, r: u32) -> AppResult<FieldCtx> {
    Ok(FieldCtx::new(p, r)?)
}

fn resolve_prec(flag: Option<u32>) -> AppResult<u32> {
    let bits = flag
        .or_else(|| {
            std::env::var("DIAGDEFORM_PREC_BITS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(diagdeform::charsum::DEFAULT_PREC_BITS);
    if bits < diagdeform::charsum::MIN_PREC_BITS {
        return Err(AppError::Invalid(format!(
            "--prec-bits {bits} below the minimum {}",
            diagdeform::charsum::MIN_PREC_BITS
        )));
    }
    Ok(bits)
}

fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("DIAGDEFORM_WORKERS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(2)
    .max(1)
}

fn validated_params<'f>(
    field: &'f FieldCtx,
    n: u32,
    h: &[u32],
    lambda: diagdeform::ffield::FieldElement,
) -> AppResult<DeformParams<'f>> {
    if h.len() != n as usize {
        return Err(AppError::Invalid(format!(
            "--n {} does not match --h of length {}",
            n,
            h.len()
        )));
    }
    Ok(DeformParams::new(field, h.to_vec(), lambda)?)
}

fn cmd_count(cfg: &RunConfig) -> AppResult<()> {
    let engine_name = cfg
        .engine
        .as_deref()
        .ok_or_else(|| AppError::Invalid("count requires --engine".into()))?;
    let engine = EngineId::from_name(engine_name)
        .ok_or_else(|| AppError::Invalid(format!("unknown engine {engine_name}")))?;
    let spec: LambdaSpec = cfg.lambda.parse().map_err(AppError::Invalid)?;
    let field = build_field(cfg.p, cfg.r)?;
    let lambda = match spec {
        LambdaSpec::All => {
            return Err(AppError::Invalid(
                "count needs a single lambda, not \"all\"".into(),
            ))
        }
        other => other.resolve(&field).map_err(AppError::Invalid)?,
    };
    let dp = validated_params(&field, cfg.n, &cfg.h, lambda)?;
    let bits = resolve_prec(cfg.prec_bits)?;
    let ctx = if runner::needs_padic(engine) {
        Some(PadicCtx::new_with_extra(
            &field,
            projective_bound(field.q(), cfg.n),
            cfg.extra_digits,
        )?)
    } else {
        None
    };
    if let EngineDisposition::Skip(reason) = applicable(engine, &dp) {
        return Err(AppError::Core(CoreError::EnginePrecondition(reason)));
    }
    let report = run_engine(engine, &dp, bits, ctx.as_ref())?;
    let mut sink = Sink::open(cfg.output.as_deref())?;
    output::write_reports(
        &mut sink,
        cfg.format,
        &field,
        &dp,
        std::slice::from_ref(&report),
    )?;
    if cfg.debug {
        if let Some(ctx) = &ctx {
            let v = ctx.qq_from_i128(report.count as i128, ctx.base_digits());
            eprintln!(
                "debug: p = {}, r = {}, digits = {}, bound = {}, count digits = {}",
                ctx.p(),
                ctx.r(),
                ctx.base_digits(),
                ctx.bound(),
                ctx.digit_string(&v)
            );
        }
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig) -> AppResult<()> {
    let spec: LambdaSpec = cfg.lambda.parse().map_err(AppError::Invalid)?;
    let field = build_field(cfg.p, cfg.r)?;
    let lambdas = spec.resolve_all(&field).map_err(AppError::Invalid)?;
    let bits = resolve_prec(cfg.prec_bits)?;
    let ctx =
        PadicCtx::new_with_extra(&field, projective_bound(field.q(), cfg.n), cfg.extra_digits).ok();
    let mut failures = Vec::new();
    println!("verify p={} r={} n={} h={:?}", cfg.p, cfg.r, cfg.n, cfg.h);
    for lambda in lambdas {
        let dp = validated_params(&field, cfg.n, &cfg.h, lambda)?;
        let label = spec::lambda_label(&field, lambda);
        let mut proj: Vec<(EngineId, u64)> = Vec::new();
        let mut affine: Vec<(EngineId, u64)> = Vec::new();
        let mut cells = Vec::new();
        for &engine in EngineId::all() {
            match applicable(engine, &dp) {
                EngineDisposition::Skip(_) => cells.push(format!("{}=SKIP", engine.name())),
                EngineDisposition::Run => {
                    let rep = run_engine(engine, &dp, bits, ctx.as_ref())?;
                    cells.push(format!("{}={}", engine.name(), rep.count));
                    if engine.is_projective() {
                        proj.push((engine, rep.count));
                    } else {
                        affine.push((engine, rep.count));
                    }
                }
            }
        }
        let mut status = "PASS";
        for pool in [&proj, &affine] {
            if let Some(&(first_engine, first)) = pool.first() {
                for &(engine, count) in pool.iter() {
                    if count != first {
                        status = "FAIL";
                        failures.push(format!(
                            "lambda {label}: {} = {count} but {} = {first}",
                            engine.name(),
                            first_engine.name()
                        ));
                    }
                }
            }
        }
        println!("lambda {label}: {status} {}", cells.join(" "));
    }
    if failures.is_empty() {
        println!("verify: PASS");
        Ok(())
    } else {
        println!("verify: FAIL");
        Err(AppError::Mismatch(failures.join("; ")))
    }
}

fn cmd_sweep(cfg: &SweepConfig) -> AppResult<()> {
    if cfg.q.is_empty() {
        return Err(AppError::Invalid("sweep needs --q".into()));
    }
    let h = cfg.h.clone().unwrap_or_else(|| vec![1; cfg.n as usize]);
    if h.len() != cfg.n as usize {
        return Err(AppError::Invalid(format!(
            "--n {} does not match --h of length {}",
            cfg.n,
            h.len()
        )));
    }
    let bits = resolve_prec(cfg.prec_bits)?;
    let workers = resolve_workers(cfg.workers);
    let spec: LambdaSpec = cfg.lambda.parse().map_err(AppError::Invalid)?;

    // resolve every (field, lambda) task up front so output order is fixed
    struct Task {
        field: std::sync::Arc<FieldCtx>,
        ctx: Option<std::sync::Arc<PadicCtx>>,
        lambda_idx: u32,
    }
    let mut tasks = Vec::new();
    for &q in &cfg.q {
        let (p, r) = spec::factor_prime_power(q).map_err(AppError::Invalid)?;
        let field = std::sync::Arc::new(build_field(p, r)?);
        let ctx = PadicCtx::new_with_extra(&field, projective_bound(q, cfg.n), cfg.extra_digits)
            .ok()
            .map(std::sync::Arc::new);
        let lambdas = spec.resolve_all(&field).map_err(AppError::Invalid)?;
        for lambda in lambdas {
            tasks.push(Task {
                field: field.clone(),
                ctx: ctx.clone(),
                lambda_idx: lambda.index(),
            });
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AppError::Invalid(e.to_string()))?;
    let rows: Vec<AppResult<Vec<output::SweepRow>>> = pool.install(|| {
        use rayon::prelude::*;
        tasks
            .par_iter()
            .map(|task| {
                let field = task.field.as_ref();
                let lambda = diagdeform::ffield::FieldElement(task.lambda_idx);
                let dp = DeformParams::new(field, h.clone(), lambda)?;
                let mut out = Vec::new();
                for &engine in EngineId::all() {
                    match applicable(engine, &dp) {
                        EngineDisposition::Skip(_) => continue,
                        EngineDisposition::Run => {
                            let rep = run_engine(engine, &dp, bits, task.ctx.as_deref())?;
                            out.push(output::SweepRow::new(field, &dp, &rep));
                        }
                    }
                }
                Ok(out)
            })
            .collect()
    });

    let mut sink = Sink::open(cfg.output.as_deref())?;
    let mut flat = Vec::new();
    for r in rows {
        flat.extend(r?);
    }
    output::write_sweep(&mut sink, cfg.format, &flat)?;
    Ok(())
}

fn cmd_gsum_table(cfg: &TableConfig) -> AppResult<()> {
    let field = build_field(cfg.p, cfg.r)?;
    let bits = resolve_prec(cfg.prec_bits)?;
    let tab = CharTable::new(&field, bits);
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.line("j,re,im,gnorm2")?;
    for j in 0..field.q() - 1 {
        let g = tab.gauss_sum(CharIndex(j));
        let n2 = g.norm_sqr();
        sink.line(&format!(
            "{j},{},{},{}",
            g.re_string(30),
            g.im_string(30),
            n2.to_decimal_string(30)
        ))?;
    }
    Ok(())
}

fn cmd_gamma_table(cfg: &TableConfig) -> AppResult<()> {
    let field = build_field(cfg.p, cfg.r)?;
    if field.p() == 2 {
        return Err(AppError::Core(CoreError::EvenCharacteristic(2)));
    }
    let ctx = PadicCtx::new(&field, field.q() * field.q())?;
    let digits = cfg.digits.unwrap_or_else(|| ctx.base_digits());
    let q1 = (field.q() - 1) as i64;
    let p = field.p() as i64;
    let mut keys = Vec::new();
    for j in 0..q1 {
        let mut pa = 1i64;
        for _ in 0..field.r() {
            keys.push(((j * pa).rem_euclid(q1), q1));
            pa *= p;
        }
    }
    ctx.gamma_prepare(keys.iter().copied(), digits)?;
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.line("j,a,num,den,value,modulus")?;
    for j in 0..q1 {
        let mut pa = 1i64;
        for a in 0..field.r() {
            let num = (j * pa).rem_euclid(q1);
            let g = gcd_i64(num, q1);
            let v = ctx.gamma_p(num, q1, digits)?;
            sink.line(&format!(
                "{j},{a},{},{},{},{}^{digits}",
                num / g,
                q1 / g,
                ctx.digit_string(&v),
                field.p()
            ))?;
            pa *= p;
        }
    }
    Ok(())
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn cmd_wset(cfg: &WsetConfig) -> AppResult<()> {
    if cfg.n < 2 || cfg.t < 1 {
        return Err(AppError::Invalid("wset needs n >= 2 and t >= 1".into()));
    }
    let h = cfg.h.clone().unwrap_or_else(|| vec![1; cfg.n as usize]);
    if h.len() != cfg.n as usize {
        return Err(AppError::Invalid("--h length must equal --n".into()));
    }
    let d: u32 = h.iter().sum();
    if d % cfg.t != 0 {
        return Err(AppError::Invalid(format!(
            "t = {} must divide d = sum h_i = {d} (t = gcd(d, q-1) always does)",
            cfg.t
        )));
    }
    let wset = build_w_set(cfg.n, cfg.t);
    let dec = partition_classes(&wset, &h, cfg.t)?;
    let dwork = h.iter().all(|&x| x == 1) && cfg.n % cfg.t == 0;
    let profiles: Vec<output::ProfileDto> = if dwork {
        dec.classes
            .iter()
            .map(|c| {
                let w0 = c.zero_representative();
                let prof = dwork_profile(w0, cfg.n, cfg.t).expect("t divides n");
                output::ProfileDto::new(w0, &prof)
            })
            .collect()
    } else {
        Vec::new()
    };
    let doc = output::WsetDto::new(cfg.t, &wset, &dec, profiles);
    let mut sink = Sink::open(cfg.output.as_deref())?;
    sink.line(&serde_json::to_string_pretty(&doc).expect("serializable"))?;
    Ok(())
}

fn cmd_gfun(cfg: &GfunConfig) -> AppResult<()> {
    let field = build_field(cfg.p, cfg.r)?;
    if field.p() == 2 {
        return Err(AppError::Core(CoreError::EvenCharacteristic(2)));
    }
    let a = parse_ratio_list(&cfg.a).map_err(AppError::Invalid)?;
    let b = parse_ratio_list(&cfg.b).map_err(AppError::Invalid)?;
    if a.len() != b.len() {
        return Err(AppError::Invalid(
            "parameter lists must have equal length".into(),
        ));
    }
    let spec: LambdaSpec = cfg.lambda.parse().map_err(AppError::Invalid)?;
    let lambda = spec.resolve(&field).map_err(AppError::Invalid)?;
    let ctx = PadicCtx::new(&field, field.q() * field.q())?;
    let digits = cfg.digits.unwrap_or_else(|| ctx.base_digits());
    let params = GParams { a, b, lambda };
    let v = evaluate_g(&field, &ctx, &params, digits)?;
    if v.is_exact_zero() {
        println!("value = 0 (exact)");
    } else {
        println!(
            "valuation = {}, digits = {}, known mod {}^{}",
            v.valuation(),
            ctx.digit_string(&v),
            field.p(),
            v.abs_precision()
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_round_trips_through_argv() {
        let cfg = RunConfig {
            p: 7,
            r: 1,
            n: 3,
            h: vec![2, 1, 1],
            lambda: "g^2".into(),
            engine: Some("jacobi-ratio".into()),
            prec_bits: Some(256),
            extra_digits: 1,
            format: OutputFormat::Json,
            output: Some(PathBuf::from("/tmp/out.json")),
            debug: true,
        };
        let args = cfg.to_args("count");
        let parsed = Cli::try_parse_from(&args).expect("round trip parse");
        match parsed.command {
            Command::Count(c) => assert_eq!(c, cfg),
            other => panic!("wrong subcommand {other:?}"),
        }
    }

    #[test]
    fn exit_codes_map_error_kinds() {
        assert_eq!(exit_code(&AppError::Invalid("x".into())), 2);
        assert_eq!(
            exit_code(&AppError::Core(CoreError::EnginePrecondition("x".into()))),
            3
        );
        assert_eq!(exit_code(&AppError::Mismatch("x".into())), 4);
        assert_eq!(
            exit_code(&AppError::Core(CoreError::RoundingResidual {
                residual: 1.0,
                bits: 64
            })),
            5
        );
        assert_eq!(
            exit_code(&AppError::Core(CoreError::InsufficientPrecision {
                have: 1,
                need: 2
            })),
            5
        );
    }

    #[test]
    fn minimal_config_round_trips() {
        let cfg = RunConfig {
            p: 5,
            r: 2,
            n: 3,
            h: vec![1, 1, 1],
            lambda: "all".into(),
            engine: None,
            prec_bits: None,
            extra_digits: 0,
            format: OutputFormat::Csv,
            output: None,
            debug: false,
        };
        let args = cfg.to_args("verify");
        let parsed = Cli::try_parse_from(&args).expect("round trip parse");
        match parsed.command {
            Command::Verify(c) => assert_eq!(c, cfg),
            other => panic!("wrong subcommand {other:?}"),
        }
    }
}
