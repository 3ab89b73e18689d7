//! Argument parsing and subcommand dispatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use upslope_core::duality::{
    hodge_duality_check, idempotent_limit, residual_projector, split_and_factor, verify_adjunction,
    ClassicalBlock, EigenData,
};
use upslope_core::quatalg::{self, elements_of_norm, unit_group, SplittingMap};
use upslope_core::spectral::{
    certified_newton, char_series, check_sharp_bound, check_theorem_a, hodge_polygon, improved_bound_slopes,
    newton_polygon, progression_check, BlockWeights, PolygonData,
};
use upslope_core::upmat::{assemble, certified_truncation, example};
use upslope_core::weightact::{b_basis, generating_matrix, MonoidElt};
use upslope_core::{padic::DEFAULT_PREC, Mat2, Matrix, PadicContext, Q};

use crate::corpus::QuaternionJson;
use crate::scenario::{self, RunOptions};
use crate::wire::{self, ContextSpec, Lit, MatrixFile, PolygonJson, PsiSpec, RecipeFile, SeriesJson, WeightSpec};
use crate::{literal, InputError};

#[derive(Parser, Debug)]
#[command(name = "upslope", version, about = "Slopes of U_p on definite quaternion forms, in exact p-adic arithmetic")]
pub struct Cli {
    /// Absolute precision (digits mod p^prec) for every context.
    #[arg(long, global = true)]
    pub prec: Option<u32>,
    /// Seed for ChaCha8-generated data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Exit with 3 when a result could not be certified.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for independent checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hurwitz quaternions.
    #[command(subcommand)]
    Quat(QuatCmd),
    /// Truncated matrix of the weight action of one monoid element.
    Act(ActArgs),
    /// Assemble truncated U_p matrices and read off their slopes.
    #[command(subcommand)]
    Upmat(UpmatCmd),
    /// Characteristic series, polygons and slope bounds for a matrix.
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Pairing checks and Hecke eigenspace projectors.
    #[command(subcommand)]
    Duality(DualityCmd),
    /// Run a built-in scenario (example-5, fixtures-6x, synthetic-m4, empty) or a scenario file.
    Run { scenario: String },
}

#[derive(Subcommand, Debug)]
pub enum QuatCmd {
    Units,
    NormElements {
        #[arg(long)]
        n: u64,
    },
    /// The three elements of norm 3 giving `U_3` at level 9, with their split matrices.
    Deltas,
}

#[derive(Args, Debug)]
pub struct WeightArgs {
    /// `classical:K`, `disk:W0` (a cyclotomic literal) or `disk-seeded`.
    #[arg(long)]
    pub weight: String,
    /// Character as `cond:tame:wild`, or `trivial`.
    #[arg(long, default_value = "trivial")]
    pub psi: String,
}

impl WeightArgs {
    fn spec(&self) -> Result<WeightSpec, InputError> {
        let psi: PsiSpec = self.psi.parse()?;
        let (kind, arg) = self.weight.split_once(':').unwrap_or((&self.weight, ""));
        match kind {
            "classical" => {
                let k = arg.parse().map_err(|_| InputError::Usage(format!("bad weight {:?}", self.weight)))?;
                Ok(WeightSpec::Classical { k, psi })
            }
            "disk" => Ok(WeightSpec::Disk { w0: Lit::Str(arg.to_string()), psi }),
            "disk-seeded" => Ok(WeightSpec::DiskSeeded { psi }),
            _ => Err(InputError::Usage(format!("weight {:?} is not classical:K, disk:W0 or disk-seeded", self.weight))),
        }
    }
}

#[derive(Args, Debug)]
pub struct ActArgs {
    /// `a,b,c,d` as cyclotomic literals.
    #[arg(long)]
    pub gamma: String,
    #[command(flatten)]
    pub weight: WeightArgs,
    #[arg(long = "N")]
    pub n: usize,
    /// `up` rescales to the basis `p^n z^n`.
    #[arg(long)]
    pub rescale: Option<String>,
    /// Context as JSON; defaults to `{"p":3,"m":2}` at the global precision.
    #[arg(long)]
    pub context: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum UpmatCmd {
    /// Interleaved truncated matrix, as a matrix file.
    Assemble {
        #[arg(long)]
        recipe: String,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long = "N")]
        n: usize,
    },
    /// Certified slopes from the smallest sufficient truncation.
    Slopes {
        #[arg(long)]
        recipe: String,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long)]
        count: usize,
    },
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[arg(long)]
    pub matrix: String,
    /// Rows per block; makes polygons certified for the untruncated operator.
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum SpectralCmd {
    Charpoly(MatrixArgs),
    Newton(MatrixArgs),
    Hodge(MatrixArgs),
    #[command(name = "verify-A")]
    VerifyA(MatrixArgs),
    VerifySharp {
        #[command(flatten)]
        m: MatrixArgs,
        /// Classical Hodge slopes per twist, e.g. `0,1;1/2,1/2`.
        #[arg(long)]
        alphas: String,
    },
    Progression(MatrixArgs),
}

#[derive(Subcommand, Debug)]
pub enum DualityCmd {
    VerifyPairing {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        partner: Option<String>,
        #[arg(long)]
        central: Option<String>,
    },
    /// Split by residual idempotents built from Hecke matrices.
    Project {
        #[arg(long)]
        matrix: String,
        /// Comma-separated Hecke matrix files.
        #[arg(long, value_delimiter = ',')]
        hecke: Vec<String>,
        /// JSON list of `{"label", "data": [{"hecke", "keep", "reject"}]}`.
        #[arg(long)]
        eigen: PathBuf,
    },
}

pub struct Output {
    pub stdout: String,
    pub code: u8,
}

fn ok(v: Value) -> Output {
    Output { stdout: pretty(&v), code: 0 }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

fn status_code(pass: bool, certified: bool, strict: bool) -> u8 {
    match (pass, certified) {
        (false, _) => 1,
        (true, false) if strict => 3,
        _ => 0,
    }
}

/// A builtin fixture name (`m3`, `m4`) or a path to a matrix file.
fn load_matrix(arg: &str, prec: Option<u32>) -> Result<Matrix, InputError> {
    if let Some(f) = crate::corpus::matrix_file(arg) {
        return f.to_matrix(prec);
    }
    let f: MatrixFile = serde_json::from_str(&std::fs::read_to_string(arg)?)?;
    f.to_matrix(prec)
}

fn load_recipe(arg: &str, prec: Option<u32>) -> Result<(Arc<PadicContext>, upslope_core::upmat::UpRecipe), InputError> {
    if crate::corpus::recipe_file(arg).is_some() {
        return crate::corpus::recipe(arg, prec);
    }
    let f: RecipeFile = serde_json::from_str(&std::fs::read_to_string(arg)?)?;
    let spec = f.context.ok_or_else(|| InputError::Usage("recipe file needs a context".into()))?;
    let ctx = spec.with_prec(prec).build()?;
    let r = f.to_recipe(&ctx)?;
    Ok((ctx, r))
}

fn slopes_out(cli: &Cli, slopes: &[Q], extra: Value) -> Output {
    match cli.format {
        Format::Csv => Output { stdout: wire::slopes_csv(slopes), code: 0 },
        Format::Json => ok(extra),
    }
}

fn polygon_for(m: &Matrix, t: Option<usize>) -> Result<PolygonData, InputError> {
    let cs = char_series(m)?;
    Ok(match t {
        Some(t) if t > 0 && m.rows() % t == 0 => certified_newton(&cs, BlockWeights { t, blocks: m.rows() / t }),
        Some(t) => return Err(InputError::Usage(format!("size {} is not a multiple of t = {t}", m.rows()))),
        None => newton_polygon(&cs),
    })
}

fn parse_alphas(s: &str) -> Result<Vec<Vec<Q>>, InputError> {
    s.split(';').map(|tw| tw.split(',').map(wire::parse_q).collect()).collect()
}

#[derive(Deserialize)]
struct EigenSpec {
    label: String,
    data: Vec<EigenEntry>,
}

#[derive(Deserialize)]
struct EigenEntry {
    hecke: usize,
    keep: Lit,
    reject: Vec<Lit>,
}

pub fn execute(cli: &Cli) -> Result<Output, InputError> {
    let prec = cli.prec;
    match &cli.command {
        Command::Quat(q) => Ok(match q {
            QuatCmd::Units => ok(json!(unit_group().iter().map(QuaternionJson::of).collect::<Vec<_>>())),
            QuatCmd::NormElements { n } => {
                let els: Vec<_> = elements_of_norm(*n).iter().map(QuaternionJson::of).collect();
                ok(json!({ "n": n, "count": els.len(), "elements": els }))
            }
            QuatCmd::Deltas => {
                let ctx = example::context(prec.unwrap_or(DEFAULT_PREC))?;
                let sm = SplittingMap::hurwitz_at_three(&ctx)?;
                let rows: Vec<Value> = quatalg::delta_decomposition(&sm)?
                    .iter()
                    .map(|(q, m)| {
                        let split: Vec<Lit> = m.entries().iter().map(|x| Lit::of(x)).collect();
                        json!({ "quaternion": QuaternionJson::of(q), "split": split })
                    })
                    .collect();
                ok(json!({ "context": ContextSpec::of(&ctx), "nu": Lit::of(sm.nu()), "deltas": rows }))
            }
        }),
        Command::Act(a) => {
            let ctx = match &a.context {
                Some(js) => serde_json::from_str::<ContextSpec>(js)?.with_prec(prec).build()?,
                None => example::context(prec.unwrap_or(DEFAULT_PREC))?,
            };
            let parts: Vec<&str> = a.gamma.split(',').collect();
            let [x, y, z, w] = parts.as_slice() else {
                return Err(InputError::Usage("--gamma needs four comma-separated entries".into()));
            };
            let e = |s: &str| literal::parse(&ctx, s);
            let gamma = MonoidElt::new(Mat2::new(e(x)?, e(y)?, e(z)?, e(w)?))?;
            let kappa = a.weight.spec()?.build(&ctx, cli.seed.unwrap_or(0))?;
            let rescale = match a.rescale.as_deref() {
                None => None,
                Some("up") => Some(b_basis(&ctx)?),
                Some(o) => return Err(InputError::Usage(format!("unknown rescaling {o:?}"))),
            };
            let act = generating_matrix(&gamma, &kappa, a.n, rescale)?;
            let mut out = json!({ "standard": MatrixFile::of(&act.standard) });
            if let Some(r) = &act.rescaled {
                let known: Vec<Vec<u64>> = (0..a.n).map(|i| (0..a.n).map(|j| r.matrix.known_at(i, j)).collect()).collect();
                out["rescaled"] = json!({ "matrix": MatrixFile::of(&r.matrix.values), "known_digits": known });
            }
            Ok(ok(out))
        }
        Command::Upmat(u) => match u {
            UpmatCmd::Assemble { recipe, weight, n } => {
                let (ctx, r) = load_recipe(recipe, prec)?;
                let kappa = weight.spec()?.build(&ctx, cli.seed.unwrap_or(0))?;
                let m = assemble(&r, &kappa, *n)?;
                Ok(ok(json!(MatrixFile::of(&m.standard))))
            }
            UpmatCmd::Slopes { recipe, weight, count } => {
                let (ctx, r) = load_recipe(recipe, prec)?;
                let kappa = weight.spec()?.build(&ctx, cli.seed.unwrap_or(0))?;
                let (m, np) = certified_truncation(&r, &kappa, *count, 1)?;
                let mut s = np.certified_slopes();
                s.truncate(*count);
                Ok(slopes_out(cli, &s, json!({ "blocks": m.blocks, "slopes": wire::slopes_json(&s) })))
            }
        },
        Command::Spectral(s) => spectral(cli, s),
        Command::Duality(d) => duality(cli, d),
        Command::Run { scenario } => {
            let (sc, dir) = scenario::load(scenario)?;
            let opts = RunOptions { prec, seed: cli.seed, jobs: cli.jobs, timings: cli.timings, base_dir: dir };
            let report = scenario::run_scenario(&sc, &opts)?;
            let code = report.exit_code(cli.strict);
            Ok(Output { stdout: pretty(&serde_json::to_value(&report)?), code })
        }
    }
}

fn spectral(cli: &Cli, s: &SpectralCmd) -> Result<Output, InputError> {
    let prec = cli.prec;
    match s {
        SpectralCmd::Charpoly(a) => {
            let m = load_matrix(&a.matrix, prec)?;
            Ok(ok(json!(SeriesJson::of(&char_series(&m)?))))
        }
        SpectralCmd::Newton(a) => {
            let np = polygon_for(&load_matrix(&a.matrix, prec)?, a.t)?;
            Ok(slopes_out(cli, &np.certified_slopes(), json!(PolygonJson::of(&np))))
        }
        SpectralCmd::Hodge(a) => {
            let hp = hodge_polygon(&load_matrix(&a.matrix, prec)?)?;
            Ok(slopes_out(cli, &hp.slopes(), json!(PolygonJson::of(&hp))))
        }
        SpectralCmd::VerifyA(a) => {
            let m = load_matrix(&a.matrix, prec)?;
            let t = a.t.unwrap_or(1);
            if t == 0 || m.rows() % t != 0 {
                return Err(InputError::Usage(format!("size {} is not a multiple of t = {t}", m.rows())));
            }
            let rep = check_theorem_a(&char_series(&m)?, BlockWeights { t, blocks: m.rows() / t });
            let v = json!({ "holds": rep.holds, "checked": rep.checked, "uncertified": rep.uncertified });
            Ok(Output { stdout: pretty(&v), code: status_code(rep.holds, rep.uncertified == 0, cli.strict) })
        }
        SpectralCmd::VerifySharp { m: a, alphas } => {
            let m = load_matrix(&a.matrix, prec)?;
            let t = a.t.unwrap_or(1);
            let np = polygon_for(&m, Some(t))?;
            let alphas = parse_alphas(alphas)?;
            let improved = improved_bound_slopes(&alphas, np.certified.max(t))?;
            let rep = check_sharp_bound(&np, &improved, t, m.ctx().m() >= 4);
            let v = json!({
                "holds": rep.holds(),
                "touches": rep.touches.iter().map(|(k, ok)| json!([k * t, ok])).collect::<Vec<_>>(),
                "floor_violations": rep.floor_violations,
                "certified": rep.certified,
                "strict": rep.strict,
            });
            Ok(Output { stdout: pretty(&v), code: status_code(rep.holds(), rep.certified > 0, cli.strict) })
        }
        SpectralCmd::Progression(a) => {
            let m = load_matrix(&a.matrix, prec)?;
            let np = polygon_for(&m, a.t)?;
            let hp = hodge_polygon(&m)?;
            let p = progression_check(&np, &hp);
            Ok(ok(json!({
                "s0": p.s0,
                "s0_non_strict": p.s0_non_strict,
                "equalities": p.equalities,
                "leading": wire::slopes_json(&p.leading),
            })))
        }
    }
}

fn duality(cli: &Cli, d: &DualityCmd) -> Result<Output, InputError> {
    let prec = cli.prec;
    match d {
        DualityCmd::VerifyPairing { matrix, partner, central } => {
            let m = load_matrix(matrix, prec)?;
            let mut block = ClassicalBlock::self_conjugate("input", m);
            if let Some(p) = partner {
                block.partner = Some(load_matrix(p, prec)?);
            }
            if let Some(c) = central {
                block.central = Some(load_matrix(c, prec)?);
            }
            let adj = verify_adjunction(&block)?;
            let hodge = hodge_duality_check(&block)?;
            let v = json!({ "adjunction": adj, "hodge_duality": hodge });
            Ok(Output { stdout: pretty(&v), code: status_code(adj && hodge, true, cli.strict) })
        }
        DualityCmd::Project { matrix, hecke, eigen } => {
            let m = load_matrix(matrix, prec)?;
            let ctx = m.ctx().clone();
            let ops = hecke.iter().map(|h| load_matrix(h, prec)).collect::<Result<Vec<_>, _>>()?;
            let specs: Vec<EigenSpec> = serde_json::from_str(&std::fs::read_to_string(eigen)?)?;
            let mut projs = Vec::new();
            for s in &specs {
                let data = s
                    .data
                    .iter()
                    .map(|e| {
                        let op = ops
                            .get(e.hecke)
                            .ok_or_else(|| InputError::Usage(format!("no Hecke matrix {}", e.hecke)))?;
                        Ok(EigenData {
                            op: op.clone(),
                            keep: e.keep.to_elt(&ctx)?,
                            reject: e.reject.iter().map(|r| r.to_elt(&ctx)).collect::<Result<_, InputError>>()?,
                        })
                    })
                    .collect::<Result<Vec<_>, InputError>>()?;
                projs.push(idempotent_limit(&residual_projector(&s.label, &data)?.matrix)?);
            }
            let split = split_and_factor(&m, &projs)?;
            let blocks: Vec<Value> = specs
                .iter()
                .zip(&split.blocks)
                .zip(&split.series)
                .map(|((s, b), cs)| {
                    json!({
                        "label": s.label,
                        "rank": b.rows(),
                        "newton": PolygonJson::of(&newton_polygon(cs)),
                        "series": SeriesJson::of(cs),
                    })
                })
                .collect();
            Ok(ok(json!({ "blocks": blocks, "product_matches": true })))
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
