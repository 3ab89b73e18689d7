//! Scenarios: named lists of checks over recipes and matrices, run into a report.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use upslope_core::duality::{hodge_duality_check, verify_adjunction, ClassicalBlock};
use upslope_core::spectral::{
    char_series, check_sharp_bound, check_theorem_a, hodge_polygon, improved_bound_slopes,
    newton_polygon, progression_check,
};
use upslope_core::upmat::{
    assemble, certified_truncation, classical_twists, truncation_stability, verify_error_decomposition, UpRecipe,
};
use upslope_core::{synth, CycloElt, Error, Matrix, PadicContext, Q};

use crate::corpus;
use crate::wire::{self, MatrixFile, RecipeFile, WeightSpec};
use crate::InputError;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CheckSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: CheckKind,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum RecipeRef {
    Builtin { builtin: String },
    File { file: PathBuf },
    Inline(RecipeFile),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum MatrixRef {
    Builtin { builtin: String },
    File { file: PathBuf },
    Inline(MatrixFile),
}

fn one() -> usize {
    1
}

fn three() -> usize {
    3
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckKind {
    /// Certified Newton slopes of `U_p` truncated to `blocks` blocks.
    Slopes {
        recipe: RecipeRef,
        weight: WeightSpec,
        blocks: usize,
        count: usize,
        #[serde(default)]
        expect: Option<Vec<String>>,
    },
    /// The first `count` slopes agree at `N` and `N + 5` blocks.
    Stability {
        recipe: RecipeRef,
        weight: WeightSpec,
        count: usize,
        #[serde(default = "one")]
        start: usize,
    },
    /// Newton polygon above the quadratic polygon of row weights.
    QuadraticBound { recipe: RecipeRef, weight: WeightSpec, blocks: usize },
    /// Rescaled matrix minus its classical diagonal lies in the error space.
    ErrorShape { recipe: RecipeRef, weight: WeightSpec, blocks: usize },
    Polygons {
        matrix: MatrixRef,
        #[serde(default)]
        newton: Option<Vec<String>>,
        #[serde(default)]
        hodge: Option<Vec<String>>,
    },
    /// `conj(M)ᵀ · M = scalar · I`.
    Unitary { matrix: MatrixRef, scalar: i64 },
    /// Adjunction `Uᵀ U' = p Aᵀ` and Hodge duality; the partner defaults to `conj(M)`.
    Pairing {
        matrix: MatrixRef,
        #[serde(default)]
        partner: Option<MatrixRef>,
        #[serde(default)]
        central: Option<MatrixRef>,
    },
    /// Strict `s0`; `reference_s0` is a published value reported alongside.
    Progression {
        matrix: MatrixRef,
        #[serde(default)]
        s0: Option<usize>,
        #[serde(default)]
        reference_s0: Option<usize>,
    },
    /// Seeded `m = 4` recipes: the quadratic bound and the sharp bound.
    Synthetic {
        cases: usize,
        t: Vec<usize>,
        #[serde(default = "three")]
        check_blocks: usize,
    },
}

impl CheckKind {
    pub fn label(&self) -> &'static str {
        match self {
            CheckKind::Slopes { .. } => "slopes",
            CheckKind::Stability { .. } => "stability",
            CheckKind::QuadraticBound { .. } => "quadratic_bound",
            CheckKind::ErrorShape { .. } => "error_shape",
            CheckKind::Polygons { .. } => "polygons",
            CheckKind::Unitary { .. } => "unitary",
            CheckKind::Pairing { .. } => "pairing",
            CheckKind::Progression { .. } => "progression",
            CheckKind::Synthetic { .. } => "synthetic",
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    ReportOnly,
    Uncertified,
    Fail,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<Outcome>,
}

impl Report {
    /// 0 pass, 1 failed check, 3 uncertified result in strict mode.
    pub fn exit_code(&self, strict: bool) -> u8 {
        match self.status {
            Status::Fail => 1,
            Status::Uncertified if strict => 3,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides every context's precision.
    pub prec: Option<u32>,
    /// Overrides the scenario's seed.
    pub seed: Option<u64>,
    pub jobs: usize,
    pub timings: bool,
    /// Directory that relative file references resolve against.
    pub base_dir: Option<PathBuf>,
}

pub fn builtin(name: &str) -> Option<Scenario> {
    corpus::scenario_json(name).map(|s| serde_json::from_str(s).expect("shipped scenario parses"))
}

/// A built-in name or a path to a scenario file; returns the scenario and its directory.
pub fn load(name_or_path: &str) -> Result<(Scenario, Option<PathBuf>), InputError> {
    if let Some(s) = builtin(name_or_path) {
        return Ok((s, None));
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        let names: Vec<&str> = corpus::SCENARIOS.iter().map(|(n, _)| *n).collect();
        return Err(InputError::Usage(format!(
            "no scenario file {name_or_path:?} and no built-in of that name (built-ins: {})",
            names.join(", ")
        )));
    }
    let s = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    Ok((s, path.parent().map(Path::to_path_buf)))
}

struct Env<'a> {
    opts: &'a RunOptions,
    seed: u64,
}

impl Env<'_> {
    fn path(&self, p: &Path) -> PathBuf {
        match &self.opts.base_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn recipe(&self, r: &RecipeRef) -> Result<(Arc<PadicContext>, UpRecipe), InputError> {
        let file = match r {
            RecipeRef::Builtin { builtin } => return corpus::recipe(builtin, self.opts.prec),
            RecipeRef::File { file } => serde_json::from_str(&std::fs::read_to_string(self.path(file))?)?,
            RecipeRef::Inline(f) => f.clone(),
        };
        let spec = file.context.ok_or_else(|| InputError::Usage("recipe needs a context".into()))?;
        let ctx = spec.with_prec(self.opts.prec).build()?;
        let recipe = file.to_recipe(&ctx)?;
        Ok((ctx, recipe))
    }

    fn matrix(&self, m: &MatrixRef) -> Result<Matrix, InputError> {
        match m {
            MatrixRef::Builtin { builtin } => corpus::matrix(builtin, self.opts.prec),
            MatrixRef::File { file } => {
                let f: MatrixFile = serde_json::from_str(&std::fs::read_to_string(self.path(file))?)?;
                f.to_matrix(self.opts.prec)
            }
            MatrixRef::Inline(f) => f.to_matrix(self.opts.prec),
        }
    }

    fn matrix_in(&self, m: &MatrixRef, ctx: &Arc<PadicContext>) -> Result<Matrix, InputError> {
        let x = self.matrix(m)?;
        if **x.ctx() != **ctx {
            return Err(InputError::Core(Error::ContextMismatch));
        }
        Ok(x)
    }
}

fn parse_slopes(list: &[String]) -> Result<Vec<Q>, InputError> {
    list.iter().map(|s| wire::parse_q(s)).collect()
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn run_check(spec: &CheckSpec, env: &Env) -> Result<(Status, Value), InputError> {
    match &spec.kind {
        CheckKind::Slopes { recipe, weight, blocks, count, expect } => {
            let (ctx, r) = env.recipe(recipe)?;
            let kappa = weight.build(&ctx, env.seed)?;
            let np = assemble(&r, &kappa, *blocks)?.newton()?;
            let mut slopes = np.certified_slopes();
            slopes.truncate(*count);
            let status = match expect {
                _ if slopes.len() < *count => Status::Uncertified,
                Some(e) => verdict(parse_slopes(e)? == slopes),
                None => Status::ReportOnly,
            };
            let w0 = match kappa {
                upslope_core::WeightChar::DiskPoint { w0, .. } => Some(wire::Lit::of(&w0)),
                _ => None,
            };
            Ok((status, json!({ "slopes": wire::slopes_json(&slopes), "certified": np.certified, "w0": w0 })))
        }
        CheckKind::Stability { recipe, weight, count, start } => {
            let (ctx, r) = env.recipe(recipe)?;
            let kappa = weight.build(&ctx, env.seed)?;
            match truncation_stability(&r, &kappa, *count, *start) {
                Ok(st) => Ok((
                    Status::Pass,
                    json!({ "blocks": st.blocks, "compared_with": st.blocks + 5, "slopes": wire::slopes_json(&st.slopes) }),
                )),
                Err(Error::PrecisionExhausted(msg)) => Ok((Status::Uncertified, json!({ "reason": msg }))),
                Err(e) => Err(e.into()),
            }
        }
        CheckKind::QuadraticBound { recipe, weight, blocks } => {
            let (ctx, r) = env.recipe(recipe)?;
            let kappa = weight.build(&ctx, env.seed)?;
            let m = assemble(&r, &kappa, *blocks)?;
            let rep = check_theorem_a(&m.char_series()?, m.weights());
            let status = if !rep.holds {
                Status::Fail
            } else if rep.checked <= 1 {
                Status::Uncertified
            } else {
                Status::Pass
            };
            Ok((status, json!({ "checked": rep.checked, "uncertified": rep.uncertified, "t": r.t(), "blocks": blocks })))
        }
        CheckKind::ErrorShape { recipe, weight, blocks } => {
            let (ctx, r) = env.recipe(recipe)?;
            let kappa = weight.build(&ctx, env.seed)?;
            let m = assemble(&r, &kappa, *blocks)?;
            let rep = verify_error_decomposition(&m, &classical_twists(&r, kappa.psi())?)?;
            let status = if !rep.violations.is_empty() {
                Status::Fail
            } else if !rep.undecided.is_empty() {
                Status::Uncertified
            } else {
                Status::Pass
            };
            Ok((
                status,
                json!({ "violations": rep.violations, "undecided": rep.undecided, "strict": rep.strict }),
            ))
        }
        CheckKind::Polygons { matrix, newton, hodge } => {
            let m = env.matrix(matrix)?;
            let np = newton_polygon(&char_series(&m)?);
            let hp = hodge_polygon(&m)?;
            let mut status = Status::ReportOnly;
            if newton.is_some() || hodge.is_some() {
                let n_ok = newton.as_ref().map_or(Ok(true), |e| parse_slopes(e).map(|e| e == np.slopes()))?;
                let h_ok = hodge.as_ref().map_or(Ok(true), |e| parse_slopes(e).map(|e| e == hp.slopes()))?;
                status = verdict(n_ok && h_ok);
            }
            if np.certified < np.len() && status == Status::Pass {
                status = Status::Uncertified;
            }
            Ok((status, json!({ "newton": wire::PolygonJson::of(&np), "hodge": wire::PolygonJson::of(&hp) })))
        }
        CheckKind::Unitary { matrix, scalar } => {
            let m = env.matrix(matrix)?;
            let lhs = m.conj().transpose().mul(&m)?;
            let rhs = Matrix::identity(m.ctx(), m.rows()).scale(&CycloElt::from_i64(m.ctx(), *scalar));
            Ok((verdict(lhs == rhs), json!({ "size": m.rows(), "scalar": scalar })))
        }
        CheckKind::Pairing { matrix, partner, central } => {
            let m = env.matrix(matrix)?;
            let mut block = ClassicalBlock::self_conjugate(&spec.name, m.clone());
            if let Some(pm) = partner {
                let c = central.as_ref().map(|c| env.matrix_in(c, m.ctx())).transpose()?;
                block = block.with_partner(env.matrix_in(pm, m.ctx())?, c);
            } else if let Some(c) = central {
                block.central = Some(env.matrix_in(c, m.ctx())?);
            }
            let adj = verify_adjunction(&block)?;
            let hodge = hodge_duality_check(&block)?;
            Ok((verdict(adj && hodge), json!({ "adjunction": adj, "hodge_duality": hodge })))
        }
        CheckKind::Progression { matrix, s0, reference_s0 } => {
            let m = env.matrix(matrix)?;
            let np = newton_polygon(&char_series(&m)?);
            let hp = hodge_polygon(&m)?;
            let prog = progression_check(&np, &hp);
            let status = match s0 {
                Some(want) => verdict(*want == prog.s0),
                None => Status::ReportOnly,
            };
            let mut detail = json!({
                "s0": prog.s0,
                "s0_non_strict": prog.s0_non_strict,
                "equalities": prog.equalities,
                "leading": wire::slopes_json(&prog.leading),
            });
            if let Some(r) = reference_s0 {
                detail["reference_s0"] = json!(r);
                detail["matches_reference"] = json!(*r == prog.s0);
                if *r != prog.s0 && *r == prog.s0_non_strict {
                    detail["note"] = json!(format!(
                        "reference value holds only with equality allowed; NP({r}) = HP({}) + 1",
                        r - 1
                    ));
                }
            }
            Ok((status, detail))
        }
        CheckKind::Synthetic { cases, t, check_blocks } => run_synthetic(*cases, t, *check_blocks, env),
    }
}

fn run_synthetic(cases: usize, ts: &[usize], check_blocks: usize, env: &Env) -> Result<(Status, Value), InputError> {
    if ts.is_empty() {
        return Err(InputError::Usage("synthetic check needs at least one t".into()));
    }
    let ctx = synth::context(env.opts.prec.unwrap_or(upslope_core::padic::DEFAULT_PREC))?;
    let mut status = Status::Pass;
    let mut rows = Vec::new();
    for i in 0..cases {
        let t = ts[i % ts.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(env.seed.wrapping_add(i as u64));
        let case = synth::sample_case(&ctx, t, check_blocks, &mut rng)?;
        let need = 3 * t;
        let (m, np) = match certified_truncation(&case.recipe, &case.weight(), need, 2) {
            Ok(x) => x,
            Err(Error::PrecisionExhausted(msg)) => {
                status = status.max(Status::Uncertified);
                rows.push(json!({ "case": i, "t": t, "uncertified": msg }));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let a = check_theorem_a(&m.char_series()?, m.weights());
        let certified = np.certified_slopes();
        let improved = improved_bound_slopes(&case.alphas, certified.len().max(need))?;
        let sharp = check_sharp_bound(&np, &improved, t, ctx.m() >= 4);
        let touches_all = sharp.touches.len() >= 3;
        let ok = a.holds && sharp.holds() && touches_all;
        if !ok {
            status = Status::Fail;
        }
        let alphas: Vec<Vec<String>> = case.alphas.iter().map(|a| wire::slopes_json(a)).collect();
        rows.push(json!({
            "case": i,
            "t": t,
            "blocks": m.blocks,
            "w0": wire::Lit::of(&case.w0),
            "alphas": alphas,
            "slopes": wire::slopes_json(&certified),
            "quadratic_bound": a.holds,
            "touches": sharp.touches.iter().map(|(k, ok)| json!([k * t, ok])).collect::<Vec<_>>(),
            "floor_violations": sharp.floor_violations,
            "pass": ok,
        }));
    }
    Ok((status, json!({ "cases": rows })))
}

/// Runs the checks in order (`jobs > 1` spreads them over threads) and merges the outcomes in
/// scenario order. Errors in one check are input errors for the whole run.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Report, InputError> {
    let env = Env { opts, seed: opts.seed.unwrap_or(s.seed) };
    let mut names: Vec<&str> = s.checks.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(InputError::Usage(format!("duplicate check name {:?}", w[0])));
    }
    let run_one = |c: &CheckSpec| -> Result<Outcome, InputError> {
        let t0 = Instant::now();
        let (status, detail) = run_check(c, &env).map_err(|e| match e {
            InputError::Usage(m) => InputError::Usage(format!("check {:?}: {m}", c.name)),
            other => other,
        })?;
        Ok(Outcome {
            name: c.name.clone(),
            kind: c.kind.label().into(),
            status,
            detail,
            elapsed_ms: opts.timings.then(|| t0.elapsed().as_millis() as u64),
        })
    };
    let results: Vec<Result<Outcome, InputError>> = if opts.jobs > 1 && s.checks.len() > 1 {
        let chunk = s.checks.len().div_ceil(opts.jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = s
                .checks
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(run_one).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("check thread panicked")).collect()
        })
    } else {
        s.checks.iter().map(run_one).collect()
    };
    let checks = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let status = checks
        .iter()
        .map(|c| if c.status == Status::ReportOnly { Status::Pass } else { c.status })
        .max()
        .unwrap_or(Status::Pass);
    Ok(Report { scenario: s.name.clone(), seed: env.seed, status, checks })
}
