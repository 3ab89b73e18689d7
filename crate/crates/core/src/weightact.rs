//! The weight-`κ` right action of `Σ₀(p^m)` on power series, as truncated matrices.
//!
//! For `γ = (a b; c d)` the generating series of `||_κ γ` is
//! `κ(cx+d) / (cx + d - axy - by) = Σ_j y^j · K(x) · ((ax+b)/(cx+d))^j` with
//! `K(x) = κ(cx+d)/(cx+d)`; entry `(i, j)` is the coefficient of `x^i y^j`, so
//! column `j` is the image of `z^j`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{Mat2, Matrix};
use crate::padic::{CycloElt, PadicContext, Valuation, WeightChar, Q};

/// Which Hecke operator a monoid element can contribute to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `v(a) = 1`.
    Up,
    /// `v(a) = 0`.
    Tl,
    /// Any other element of `Σ₀(p^m)`.
    Other,
}

/// An element `(a b; c d)` of `Σ₀(p^m)`: `p^m | c`, `p ∤ d`, `ad - bc ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidElt {
    mat: Mat2,
    shape: Shape,
}

impl MonoidElt {
    /// Checks membership in `Σ₀(p^m)` for the context's level `m`.
    pub fn new(mat: Mat2) -> Result<Self> {
        let ctx = mat.ctx().clone();
        let m = Q::from_integer(ctx.m() as i64);
        if !mat.c.valuation().at_least(m) {
            return Err(Error::Precondition(format!("p^{} does not divide c", ctx.m())));
        }
        if !mat.d.is_unit() {
            return Err(Error::Precondition("d must be a unit".into()));
        }
        if mat.det().is_zero() {
            return Err(Error::Precondition("determinant vanishes".into()));
        }
        let shape = match mat.a.valuation() {
            Valuation::Exact(v) if v == Q::from_integer(0) => Shape::Tl,
            Valuation::Exact(v) if v == Q::from_integer(1) => Shape::Up,
            _ => Shape::Other,
        };
        Ok(MonoidElt { mat, shape })
    }

    pub fn from_i64(ctx: &Arc<PadicContext>, entries: [i64; 4]) -> Result<Self> {
        Self::new(Mat2::from_i64(ctx, entries))
    }

    pub fn mat(&self) -> &Mat2 {
        &self.mat
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn ctx(&self) -> &Arc<PadicContext> {
        self.mat.ctx()
    }
}

/// A scalar `unit · π^s`, possibly with `s < 0`; used for diagonal rescalings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    pub unit: CycloElt,
    pub s: i64,
}

impl Scale {
    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Scale { unit: CycloElt::one(ctx), s: 0 }
    }

    pub fn pi(ctx: &Arc<PadicContext>) -> Self {
        Scale { unit: CycloElt::one(ctx), s: 1 }
    }

    /// `p = π^e · (p / π^e)`, with the unit factor known to full precision.
    pub fn p(ctx: &Arc<PadicContext>) -> Result<Self> {
        if ctx.cyclo_exp() == 0 {
            return Ok(Scale::pi(ctx));
        }
        let inv_eta = CycloElt::from_raw(ctx, ctx.inv_eta_coeffs().iter().copied().collect());
        Ok(Scale { unit: inv_eta.inverse()?, s: ctx.e() as i64 })
    }

    pub fn unit(unit: CycloElt) -> Result<Self> {
        if !unit.is_unit() {
            return Err(Error::NotUnit);
        }
        Ok(Scale { unit, s: 0 })
    }

    pub fn mul(&self, o: &Scale) -> Scale {
        Scale { unit: &self.unit * &o.unit, s: self.s + o.s }
    }

    pub fn inverse(&self) -> Result<Scale> {
        Ok(Scale { unit: self.unit.inverse()?, s: -self.s })
    }

    pub fn pow(&self, k: u64) -> Scale {
        Scale { unit: self.unit.pow(k), s: self.s * k as i64 }
    }

    pub fn valuation(&self) -> Q {
        Q::new(self.s, self.unit.ctx().e() as i64)
    }
}

/// A matrix whose entries are only known modulo per-entry powers of `π`, as happens
/// after exact division by powers of the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledMatrix {
    pub values: Matrix,
    /// Number of `π`-adic digits known for each entry, row-major.
    pub known: Vec<u64>,
}

impl ScaledMatrix {
    /// Entry `(i, j)` becomes `m_ij · row(i) · col(j)`.
    pub fn rescale(
        m: &Matrix,
        row: impl Fn(usize) -> Scale,
        col: impl Fn(usize) -> Scale,
    ) -> Result<Self> {
        let ctx = m.ctx().clone();
        let full = ctx.pi_prec();
        let rows: Vec<Scale> = (0..m.rows()).map(&row).collect();
        let cols: Vec<Scale> = (0..m.cols()).map(&col).collect();
        let mut values = Matrix::zeros(&ctx, m.rows(), m.cols());
        let mut known = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let sc = rows[i].mul(&cols[j]);
                let x = &m[(i, j)] * &sc.unit;
                let v = if sc.s >= 0 {
                    known.push(full);
                    x.mul_pi_pow(sc.s as u64)
                } else {
                    let k = sc.s.unsigned_abs();
                    known.push(full.saturating_sub(k));
                    x.div_pi_pow(k).map_err(|_| {
                        Error::Precondition(format!("entry ({i}, {j}) is not integral after rescaling"))
                    })?
                };
                values[(i, j)] = v;
            }
        }
        Ok(ScaledMatrix { values, known })
    }

    pub fn exact(values: Matrix) -> Self {
        let full = values.ctx().pi_prec();
        let known = vec![full; values.rows() * values.cols()];
        ScaledMatrix { values, known }
    }

    pub fn known_at(&self, i: usize, j: usize) -> u64 {
        self.known[i * self.values.cols() + j]
    }

    /// Valuation of entry `(i, j)`, capped by what is known.
    pub fn valuation(&self, i: usize, j: usize) -> Valuation {
        valuation_with_known(&self.values[(i, j)], self.known_at(i, j))
    }

    /// Valuation of `entry(i, j) - x`.
    pub fn valuation_minus(&self, i: usize, j: usize, x: &CycloElt) -> Valuation {
        valuation_with_known(&(&self.values[(i, j)] - x), self.known_at(i, j))
    }
}

/// Valuation of an element known modulo `π^known`.
pub fn valuation_with_known(x: &CycloElt, known: u64) -> Valuation {
    let e = x.ctx().e() as i64;
    match x.pi_valuation() {
        Some(v) if v < known => Valuation::Exact(Q::new(v as i64, e)),
        _ => Valuation::AtLeast(Q::new(known as i64, e)),
    }
}

/// `γ` acting with weight `κ`, truncated to `n × n`.
#[derive(Clone, Debug)]
pub struct ActionMatrix {
    pub gamma: MonoidElt,
    /// Entries in the basis `1, z, z², …`.
    pub standard: Matrix,
    /// Entries of `H(ux, vy)` when a rescaling was requested.
    pub rescaled: Option<Rescaled>,
}

#[derive(Clone, Debug)]
pub struct Rescaled {
    pub u: Scale,
    pub v: Scale,
    pub matrix: ScaledMatrix,
}

impl ActionMatrix {
    pub fn size(&self) -> usize {
        self.standard.rows()
    }
}

/// Coefficients of `a(x) · b(x)` below `x^n`.
fn poly_mul(a: &[CycloElt], b: &[CycloElt], n: usize) -> Vec<CycloElt> {
    let ctx = a[0].ctx();
    let mut out = vec![CycloElt::zero(ctx); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] += &(x * y);
            }
        }
    }
    out
}

/// Columns `K(x) · r(x)^j`, `j < n`, as polynomials truncated below `x^n`.
pub fn generating_matrix(
    gamma: &MonoidElt,
    kappa: &WeightChar,
    n: usize,
    rescale: Option<(Scale, Scale)>,
) -> Result<ActionMatrix> {
    if n == 0 {
        return Err(Error::Dimension("truncation size must be positive".into()));
    }
    let ctx = gamma.ctx().clone();
    let Mat2 { a, b, c, d } = gamma.mat().clone();
    let d_inv = d.inverse()?;
    let c_over_d = &c * &d_inv;
    let k_series = {
        let lead = kappa.kappa_eval(&d)?;
        kappa.kappa_series(&c_over_d, n)?.into_iter().map(|x| &x * &lead).collect::<Vec<_>>()
    };
    // 1/(cx+d) = d⁻¹ Σ (-c/d)^k x^k
    let mut geom = Vec::with_capacity(n);
    let minus = -&c_over_d;
    let mut acc = d_inv.clone();
    for _ in 0..n {
        geom.push(acc.clone());
        acc = &acc * &minus;
    }
    let mut num = vec![CycloElt::zero(&ctx); n];
    num[0] = b;
    if n > 1 {
        num[1] = a;
    }
    let r = poly_mul(&num, &geom, n);
    let mut standard = Matrix::zeros(&ctx, n, n);
    let mut col = k_series;
    for j in 0..n {
        for i in 0..n {
            standard[(i, j)] = col[i].clone();
        }
        if j + 1 < n {
            col = poly_mul(&col, &r, n);
        }
    }
    let rescaled = match rescale {
        None => None,
        Some((u, v)) => {
            let matrix = ScaledMatrix::rescale(&standard, |i| u.pow(i as u64), |j| v.pow(j as u64))?;
            Some(Rescaled { u, v, matrix })
        }
    };
    Ok(ActionMatrix { gamma: gamma.clone(), standard, rescaled })
}

/// The rescaling `(p⁻¹, p)` to the basis `1, pz, p²z², …`.
pub fn b_basis(ctx: &Arc<PadicContext>) -> Result<(Scale, Scale)> {
    let p = Scale::p(ctx)?;
    Ok((p.inverse()?, p))
}

/// Outcome of an entrywise valuation audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeReport {
    /// Every bound was certified to hold.
    pub holds: bool,
    /// False when the hypotheses of the bound are not met (`m < 4`); the audit is
    /// then informational.
    pub strict: bool,
    /// Entries that certainly violate their bound.
    pub violations: Vec<(usize, usize)>,
    /// Entries whose bound could not be decided at working precision.
    pub undecided: Vec<(usize, usize)>,
}

impl ShapeReport {
    pub fn passed(&self) -> bool {
        self.holds
    }
}

pub(crate) fn audit(
    entry: Valuation,
    bound: Q,
    at: (usize, usize),
    violations: &mut Vec<(usize, usize)>,
    undecided: &mut Vec<(usize, usize)>,
) {
    match entry {
        Valuation::Exact(v) if v < bound => violations.push(at),
        Valuation::AtLeast(v) if v < bound => undecided.push(at),
        _ => {}
    }
}

/// Audits an action matrix in the basis `1, pz, p²z², …` against the congruence
/// pattern: `(0,0)` is `κ(d)/d`; for `i = j > 0` the entry is `(a/d)^i κ(d)/d` up to
/// `p² a^i`; below the diagonal entries lie in `p^{i-j+2} a^j`, above in `p^{j-i} a^i`.
pub fn verify_congruence_shape(act: &ActionMatrix, kappa: &WeightChar) -> Result<ShapeReport> {
    let ctx = act.gamma.ctx().clone();
    let (u, v) = b_basis(&ctx)?;
    let scaled = match &act.rescaled {
        Some(r) if r.u == u && r.v == v => r.matrix.clone(),
        _ => ScaledMatrix::rescale(&act.standard, |i| u.pow(i as u64), |j| v.pow(j as u64))?,
    };
    let Mat2 { a, d, .. } = act.gamma.mat().clone();
    let va = match a.valuation() {
        Valuation::Exact(x) => x,
        Valuation::AtLeast(_) => return Err(Error::Precondition("a vanishes".into())),
    };
    let lead = kappa.kappa_eval(&d)?;
    let a_over_d = &a * &d.inverse()?;
    let n = act.size();
    let mut violations = Vec::new();
    let mut undecided = Vec::new();
    let mut diag = lead.clone();
    for i in 0..n {
        for j in 0..n {
            if i == 0 && j == 0 {
                // Exact identity: the difference must vanish at working precision.
                if scaled.valuation_minus(0, 0, &diag).is_exact() {
                    violations.push((0, 0));
                }
                continue;
            }
            let (val, bound) = if i == j {
                let bound = Q::from_integer(2) + va * Q::from_integer(i as i64);
                (scaled.valuation_minus(i, i, &diag), bound)
            } else if i > j {
                let bound = Q::from_integer((i - j + 2) as i64) + va * Q::from_integer(j as i64);
                (scaled.valuation(i, j), bound)
            } else {
                let bound = Q::from_integer((j - i) as i64) + va * Q::from_integer(i as i64);
                (scaled.valuation(i, j), bound)
            };
            audit(val, bound, (i, j), &mut violations, &mut undecided);
        }
        diag = &diag * &a_over_d;
    }
    Ok(ShapeReport {
        holds: violations.is_empty() && undecided.is_empty(),
        strict: ctx.m() >= 4,
        violations,
        undecided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::DirichletCharacter;

    fn binom(n: u64, k: u64) -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
    }

    #[test]
    fn identity_acts_trivially() {
        let ctx = PadicContext::new(3, 2, 40, None).unwrap();
        let g = MonoidElt::from_i64(&ctx, [1, 0, 0, 1]).unwrap();
        let kappa = WeightChar::DiskPoint {
            psi: DirichletCharacter::new(3, 2, 0, 1).unwrap(),
            w0: CycloElt::from_i64(&ctx, 5),
        };
        let m = generating_matrix(&g, &kappa, 6, None).unwrap();
        assert_eq!(m.standard, Matrix::identity(&ctx, 6));
        assert_eq!(g.shape(), Shape::Tl);
    }

    #[test]
    fn translation_gives_binomials() {
        let ctx = PadicContext::new(5, 1, 20, None).unwrap();
        let b = 7;
        let g = MonoidElt::from_i64(&ctx, [1, b, 0, 1]).unwrap();
        let kappa = WeightChar::Classical { k: 1, psi: DirichletCharacter::trivial(5) };
        let m = generating_matrix(&g, &kappa, 7, None).unwrap();
        for i in 0..7u64 {
            for j in 0..7u64 {
                let want = if j >= i { binom(j, i) * b.pow((j - i) as u32) } else { 0 };
                assert_eq!(m.standard[(i as usize, j as usize)], CycloElt::from_i64(&ctx, want));
            }
        }
    }

    #[test]
    fn truncations_are_coherent() {
        let ctx = PadicContext::new(3, 3, 30, None).unwrap();
        let g = MonoidElt::from_i64(&ctx, [3, 5, 27, 4]).unwrap();
        let kappa = WeightChar::DiskPoint {
            psi: DirichletCharacter::new(3, 3, 0, 1).unwrap(),
            w0: CycloElt::from_i64(&ctx, 2),
        };
        let small = generating_matrix(&g, &kappa, 5, None).unwrap().standard;
        let big = generating_matrix(&g, &kappa, 9, None).unwrap().standard;
        let idx: Vec<usize> = (0..5).collect();
        assert_eq!(big.submatrix(&idx, &idx), small);
        assert_eq!(g.shape(), Shape::Up);
    }

    #[test]
    fn classical_weight_preserves_polynomials() {
        let ctx = PadicContext::new(3, 2, 30, None).unwrap();
        let g = MonoidElt::from_i64(&ctx, [3, 2, 9, 4]).unwrap();
        let k = 4;
        let kappa = WeightChar::Classical { k, psi: DirichletCharacter::trivial(3) };
        let m = generating_matrix(&g, &kappa, 8, None).unwrap().standard;
        for j in 0..k as usize {
            for i in k as usize..8 {
                assert!(m[(i, j)].is_zero(), "({i}, {j})");
            }
        }
    }

    #[test]
    fn rejects_non_monoid_elements() {
        let ctx = PadicContext::new(3, 2, 20, None).unwrap();
        assert!(MonoidElt::from_i64(&ctx, [3, 1, 3, 1]).is_err());
        assert!(MonoidElt::from_i64(&ctx, [1, 1, 9, 3]).is_err());
        assert!(MonoidElt::from_i64(&ctx, [3, 1, 9, 3]).is_err());
    }

    #[test]
    fn b_basis_keeps_valuation_pattern() {
        let ctx = PadicContext::new(3, 4, 40, None).unwrap();
        let g = MonoidElt::from_i64(&ctx, [3, 0, 81, 1]).unwrap();
        let kappa = WeightChar::DiskPoint {
            psi: DirichletCharacter::trivial(3),
            w0: CycloElt::zero(&ctx),
        };
        let act = generating_matrix(&g, &kappa, 8, Some(b_basis(&ctx).unwrap())).unwrap();
        let report = verify_congruence_shape(&act, &kappa).unwrap();
        assert!(report.strict && report.passed(), "{report:?}");
        for i in 0..8 {
            assert_eq!(
                act.rescaled.as_ref().unwrap().matrix.valuation(i, i),
                Valuation::Exact(Q::from_integer(i as i64))
            );
        }
    }
}
