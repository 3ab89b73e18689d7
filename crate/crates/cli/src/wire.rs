//! JSON wire format for contexts, matrices, recipes, characters, weights and polygons.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use upslope_core::spectral::{CharSeries, PolygonData};
use upslope_core::upmat::{OpShape, RecipeEntry, UpRecipe};
use upslope_core::weightact::MonoidElt;
use upslope_core::{CycloElt, DirichletCharacter, Mat2, Matrix, PadicContext, WeightChar, Q};

use crate::literal;
use crate::InputError;

/// `{"p":3,"m":3,"prec":40,"cyclo_order":9}`; `cyclo_order` defaults to `p^{m-1}`.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContextSpec {
    pub p: u64,
    pub m: u32,
    pub prec: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclo_order: Option<u64>,
}

impl ContextSpec {
    pub fn of(ctx: &PadicContext) -> Self {
        let default = ctx.p().pow(ctx.m().saturating_sub(1));
        let order = ctx.cyclo_order();
        ContextSpec {
            p: ctx.p(),
            m: ctx.m(),
            prec: ctx.prec(),
            cyclo_order: (order != default).then_some(order),
        }
    }

    pub fn build(&self) -> Result<Arc<PadicContext>, InputError> {
        Ok(PadicContext::new(self.p, self.m, self.prec, self.cyclo_order)?)
    }

    pub fn with_prec(mut self, prec: Option<u32>) -> Self {
        if let Some(p) = prec {
            self.prec = p;
        }
        self
    }
}

/// An integer when the element is one, otherwise a cyclotomic literal.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum Lit {
    Int(i64),
    Str(String),
}

impl Lit {
    pub fn of(x: &CycloElt) -> Self {
        match literal::as_integer(x) {
            Some(n) => Lit::Int(n),
            None => Lit::Str(literal::format(x)),
        }
    }

    pub fn to_elt(&self, ctx: &Arc<PadicContext>) -> Result<CycloElt, InputError> {
        match self {
            Lit::Int(n) => Ok(CycloElt::from_i64(ctx, *n)),
            Lit::Str(s) => Ok(literal::parse(ctx, s)?),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub context: ContextSpec,
    pub rows: Vec<Vec<Lit>>,
}

impl MatrixFile {
    pub fn of(m: &Matrix) -> Self {
        let rows = (0..m.rows()).map(|i| m.row(i).iter().map(Lit::of).collect()).collect();
        MatrixFile { context: ContextSpec::of(m.ctx()), rows }
    }

    pub fn to_matrix(&self, prec: Option<u32>) -> Result<Matrix, InputError> {
        let ctx = self.context.with_prec(prec).build()?;
        self.to_matrix_in(&ctx)
    }

    pub fn to_matrix_in(&self, ctx: &Arc<PadicContext>) -> Result<Matrix, InputError> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_elt(ctx)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_rows(ctx, rows)?)
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeSpec {
    Up,
    Tl(u64),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    pub delta: [Lit; 4],
}

/// `{"t":1,"shape":"Up","entries":[{"i":0,"j":0,"delta":[a,b,c,d]},...]}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RecipeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextSpec>,
    pub t: usize,
    pub shape: ShapeSpec,
    pub entries: Vec<EntrySpec>,
}

impl RecipeFile {
    pub fn of(r: &UpRecipe) -> Self {
        let entries = r
            .entries()
            .iter()
            .map(|e| {
                let [a, b, c, d] = e.delta.mat().entries();
                EntrySpec { i: e.i, j: e.j, delta: [Lit::of(a), Lit::of(b), Lit::of(c), Lit::of(d)] }
            })
            .collect();
        let shape = match r.shape() {
            OpShape::Up => ShapeSpec::Up,
            OpShape::Tl(l) => ShapeSpec::Tl(l),
        };
        RecipeFile { context: Some(ContextSpec::of(r.ctx())), t: r.t(), shape, entries }
    }

    pub fn to_recipe(&self, ctx: &Arc<PadicContext>) -> Result<UpRecipe, InputError> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let [a, b, c, d] = &e.delta;
                let m = Mat2::new(a.to_elt(ctx)?, b.to_elt(ctx)?, c.to_elt(ctx)?, d.to_elt(ctx)?);
                Ok(RecipeEntry { i: e.i, j: e.j, delta: MonoidElt::new(m)? })
            })
            .collect::<Result<Vec<_>, InputError>>()?;
        let shape = match self.shape {
            ShapeSpec::Up => OpShape::Up,
            ShapeSpec::Tl(l) => OpShape::Tl(l),
        };
        Ok(UpRecipe::new(self.t, shape, entries)?)
    }
}

/// `{"cond":2,"tame":0,"wild":1}`, or on the command line `cond:tame:wild`.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct PsiSpec {
    pub cond: u32,
    pub tame: u64,
    pub wild: u64,
}

impl PsiSpec {
    pub fn build(&self, p: u64) -> Result<DirichletCharacter, InputError> {
        if self.cond == 0 {
            return Ok(DirichletCharacter::trivial(p));
        }
        Ok(DirichletCharacter::new(p, self.cond, self.tame, self.wild)?)
    }
}

impl std::str::FromStr for PsiSpec {
    type Err = InputError;

    fn from_str(s: &str) -> Result<Self, InputError> {
        if s == "trivial" {
            return Ok(PsiSpec::default());
        }
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || InputError::Usage(format!("character {s:?} is not cond:tame:wild"));
        let [c, t, w] = parts.as_slice() else { return Err(bad()) };
        Ok(PsiSpec {
            cond: c.parse().map_err(|_| bad())?,
            tame: t.parse().map_err(|_| bad())?,
            wild: w.parse().map_err(|_| bad())?,
        })
    }
}

/// A weight `x^k ψ` or `x ψ ⟨x⟩^{w0}`. `disk_seeded` draws `w0 = p·u` for a unit `u` from
/// the run's seed.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Classical {
        k: u32,
        #[serde(default)]
        psi: PsiSpec,
    },
    Disk {
        w0: Lit,
        #[serde(default)]
        psi: PsiSpec,
    },
    DiskSeeded {
        #[serde(default)]
        psi: PsiSpec,
    },
}

impl WeightSpec {
    pub fn build(&self, ctx: &Arc<PadicContext>, seed: u64) -> Result<WeightChar, InputError> {
        Ok(match self {
            WeightSpec::Classical { k, psi } => WeightChar::Classical { k: *k, psi: psi.build(ctx.p())? },
            WeightSpec::Disk { w0, psi } => WeightChar::DiskPoint { psi: psi.build(ctx.p())?, w0: w0.to_elt(ctx)? },
            WeightSpec::DiskSeeded { psi } => {
                WeightChar::DiskPoint { psi: psi.build(ctx.p())?, w0: seeded_w0(ctx, seed) }
            }
        })
    }
}

/// `p·u` with `u` a unit of `Z_p` drawn by ChaCha8 from `seed`.
pub fn seeded_w0(ctx: &Arc<PadicContext>, seed: u64) -> CycloElt {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let p = ctx.p();
    let u = loop {
        let r = rng.gen_range(0..ctx.modulus());
        if r % p != 0 {
            break r;
        }
    };
    CycloElt::from_residue(ctx, u).scale(p as i64)
}

/// `"num/den"`, or just `"num"` for integers.
pub fn q_str(x: &Q) -> String {
    x.to_string()
}

pub fn parse_q(s: &str) -> Result<Q, InputError> {
    s.trim().parse::<Q>().map_err(|_| InputError::Usage(format!("{s:?} is not a rational")))
}

pub fn slopes_json(slopes: &[Q]) -> Vec<String> {
    slopes.iter().map(q_str).collect()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PolygonJson {
    /// `[x, "num/den"]` pairs.
    pub vertices: Vec<(usize, String)>,
    pub slopes: Vec<String>,
    /// Abscissa up to which the polygon is proven.
    pub certified: usize,
}

impl PolygonJson {
    pub fn of(p: &PolygonData) -> Self {
        PolygonJson {
            vertices: p.vertices.iter().map(|(x, y)| (*x, q_str(y))).collect(),
            slopes: slopes_json(&p.slopes()),
            certified: p.certified,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SeriesJson {
    pub coefficients: Vec<Lit>,
    pub valuations: Vec<String>,
}

impl SeriesJson {
    pub fn of(cs: &CharSeries) -> Self {
        SeriesJson {
            coefficients: cs.coeffs.iter().map(Lit::of).collect(),
            valuations: cs.valuations().iter().map(ToString::to_string).collect(),
        }
    }
}

/// `index,slope` rows.
pub fn slopes_csv(slopes: &[Q]) -> String {
    let mut out = String::from("index,slope\n");
    for (i, s) in slopes.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, q_str(s)));
    }
    out
}
