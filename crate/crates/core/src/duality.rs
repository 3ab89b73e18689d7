//! Weight-two pairing identities and residual splitting of operator matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{CycloElt, Q};
use crate::spectral::{char_series, elementary_divisors, CharSeries};

/// `U_p` on weight-two forms with character `ψ`, with the data needed for duality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalBlock {
    pub matrix: Matrix,
    pub label: String,
    /// The operator for `ψ⁻¹`.
    pub partner: Option<Matrix>,
    /// The central action `S_p`; identity when absent.
    pub central: Option<Matrix>,
}

impl ClassicalBlock {
    pub fn new(label: impl Into<String>, matrix: Matrix) -> Self {
        ClassicalBlock { matrix, label: label.into(), partner: None, central: None }
    }

    /// Partner given by complex conjugation of the entries, central action trivial.
    pub fn self_conjugate(label: impl Into<String>, matrix: Matrix) -> Self {
        let partner = matrix.conj();
        ClassicalBlock { matrix, label: label.into(), partner: Some(partner), central: None }
    }

    pub fn with_partner(mut self, partner: Matrix, central: Option<Matrix>) -> Self {
        self.partner = Some(partner);
        self.central = central;
        self
    }

    pub fn t(&self) -> usize {
        self.matrix.rows()
    }
}

/// `Σ φ_i φ'_i`.
pub fn pair(phi: &[CycloElt], phi2: &[CycloElt]) -> Result<CycloElt> {
    if phi.len() != phi2.len() {
        return Err(Error::Dimension(format!("pairing vectors of lengths {} and {}", phi.len(), phi2.len())));
    }
    let first = phi.first().ok_or_else(|| Error::Dimension("empty vectors".into()))?;
    Ok(phi.iter().zip(phi2).fold(CycloElt::zero(first.ctx()), |mut acc, (a, b)| {
        acc += &(a * b);
        acc
    }))
}

/// `Uᵀ · U' = p · Aᵀ`.
pub fn verify_adjunction(b: &ClassicalBlock) -> Result<bool> {
    let partner = b.partner.as_ref().ok_or_else(|| Error::Precondition("no partner matrix".into()))?;
    let ctx = b.matrix.ctx();
    let a = match &b.central {
        Some(a) => a.clone(),
        None => Matrix::identity(ctx, b.t()),
    };
    let lhs = b.matrix.transpose().mul(partner)?;
    Ok(lhs == a.transpose().scale(&CycloElt::from_i64(ctx, ctx.p() as i64)))
}

/// Hodge slopes of the block and its partner satisfy `α_i + α'_{t-1-i} = 1`, all in `[0, 1]`.
pub fn hodge_duality_check(b: &ClassicalBlock) -> Result<bool> {
    let partner = b.partner.as_ref().ok_or_else(|| Error::Precondition("no partner matrix".into()))?;
    let a = elementary_divisors(&b.matrix)?;
    let a2 = elementary_divisors(partner)?;
    let (zero, one) = (Q::from_integer(0), Q::from_integer(1));
    let in_range = a.iter().chain(&a2).all(|x| *x >= zero && *x <= one);
    let t = a.len();
    Ok(in_range && a2.len() == t && (0..t).all(|i| a[i] + a2[t - 1 - i] == one))
}

/// An approximate idempotent attached to a residual label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualProjector {
    pub label: String,
    pub matrix: Matrix,
}

/// Eigenvalue data at one auxiliary prime: the operator, the lifted eigenvalue to keep, and
/// the lifted eigenvalues to discard.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub op: Matrix,
    pub keep: CycloElt,
    pub reject: Vec<CycloElt>,
}

/// `Π (T - ã') / (ã - ã')` over all data; each difference `ã - ã'` must be a unit.
pub fn residual_projector(label: impl Into<String>, data: &[EigenData]) -> Result<ResidualProjector> {
    let first = data.first().ok_or_else(|| Error::Precondition("no eigenvalue data".into()))?;
    let ctx = first.op.ctx().clone();
    let n = first.op.rows();
    let mut p = Matrix::identity(&ctx, n);
    for d in data {
        if d.op.rows() != n || !d.op.is_square() {
            return Err(Error::Dimension("Hecke matrices of different sizes".into()));
        }
        for r in &d.reject {
            let diff = &d.keep - r;
            let inv = diff.inverse().map_err(|_| {
                Error::Precondition("kept and rejected eigenvalues agree modulo the uniformizer".into())
            })?;
            let shifted = d.op.sub(&Matrix::identity(&ctx, n).scale(r))?.scale(&inv);
            p = p.mul(&shifted)?;
        }
    }
    Ok(ResidualProjector { label: label.into(), matrix: p })
}

/// `lim Q^{p^n}`, the idempotent lifting `P mod π`.
pub fn idempotent_limit(p: &Matrix) -> Result<Matrix> {
    let ctx = p.ctx();
    if !p.is_square() {
        return Err(Error::Dimension("projector must be square".into()));
    }
    if !p.mul(p)?.sub(p)?.divisible_by_pi_pow(1) {
        return Err(Error::Precondition("not idempotent modulo the uniformizer".into()));
    }
    let bound = ctx.pi_prec() + 1;
    let mut q = p.clone();
    for _ in 0..bound {
        if q.mul(&q)? == q {
            return Ok(q);
        }
        q = q.pow(ctx.p())?;
    }
    Err(Error::NoConvergence(format!("no idempotent after {bound} steps")))
}

/// Restrictions of an operator to the images of a complete set of commuting idempotents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub idempotents: Vec<Matrix>,
    /// Matrix of the operator on each image, in the basis of pivot columns.
    pub blocks: Vec<Matrix>,
    pub series: Vec<CharSeries>,
}

impl Splitting {
    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(Matrix::rows).collect()
    }

    pub fn product(&self) -> Option<CharSeries> {
        let mut it = self.series.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, s| acc.mul(s)))
    }
}

/// Columns of `q` forming a basis of its image, by elimination with minimal-valuation pivots
/// (ties to the lowest index); pivots must be units.
fn image_basis(q: &Matrix) -> Result<Vec<usize>> {
    let mut a = q.clone();
    let n = a.rows();
    let mut used_rows = Vec::new();
    let mut picked = Vec::new();
    for j in 0..a.cols() {
        let pivot = (0..n)
            .filter(|i| !used_rows.contains(i))
            .filter_map(|i| a[(i, j)].pi_valuation().map(|v| (v, i)))
            .min();
        let Some((v, pi)) = pivot else { continue };
        if v > 0 {
            continue;
        }
        let inv = a[(pi, j)].inverse()?;
        for i in 0..n {
            if i == pi {
                continue;
            }
            let f = &a[(i, j)] * &inv;
            for k in j..a.cols() {
                let d = &f * &a[(pi, k)];
                a[(i, k)] -= &d;
            }
        }
        used_rows.push(pi);
        picked.push(j);
    }
    Ok(picked)
}

/// Splits `m` along commuting idempotents and checks the product formula for the
/// characteristic series.
pub fn split_and_factor(m: &Matrix, projs: &[Matrix]) -> Result<Splitting> {
    let ctx = m.ctx().clone();
    let n = m.rows();
    let mut sum = Matrix::zeros(&ctx, n, n);
    for (i, q) in projs.iter().enumerate() {
        if q.mul(q)? != *q {
            return Err(Error::Precondition(format!("projector {i} is not idempotent")));
        }
        if q.mul(m)? != m.mul(q)? {
            return Err(Error::Precondition(format!("projector {i} does not commute with the operator")));
        }
        for (j, q2) in projs.iter().enumerate().skip(i + 1) {
            if !q.mul(q2)?.is_zero() {
                return Err(Error::Precondition(format!("projectors {i} and {j} are not orthogonal")));
            }
        }
        sum = sum.add(q)?;
    }
    if sum != Matrix::identity(&ctx, n) {
        return Err(Error::Precondition("projectors do not sum to the identity".into()));
    }
    let mut blocks = Vec::new();
    let mut series = Vec::new();
    for q in projs {
        let cols = image_basis(q)?;
        let all: Vec<usize> = (0..n).collect();
        let c = q.submatrix(&all, &cols);
        // Rows on which the basis is invertible give coordinates on the image.
        let rows = image_basis(&c.transpose())?;
        let c_rows = c.submatrix(&rows, &(0..cols.len()).collect::<Vec<_>>());
        let mc = m.mul(&c)?;
        let block = c_rows.inverse()?.mul(&mc.submatrix(&rows, &(0..cols.len()).collect::<Vec<_>>()))?;
        series.push(char_series(&block)?);
        blocks.push(block);
    }
    let split = Splitting { idempotents: projs.to_vec(), blocks, series };
    if split.product().as_ref() != Some(&char_series(m)?) && n > 0 {
        return Err(Error::Precondition("characteristic series does not factor over the splitting".into()));
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;
    use alloc::sync::Arc;
    use alloc::vec;

    fn ints(ctx: &Arc<PadicContext>, rows: &[&[i64]]) -> Matrix {
        Matrix::from_fn(ctx, rows.len(), rows[0].len(), |i, j| CycloElt::from_i64(ctx, rows[i][j]))
    }

    #[test]
    fn pairing_of_basis_vectors() {
        let ctx = PadicContext::new(3, 1, 10, None).unwrap();
        let e0 = vec![CycloElt::one(&ctx), CycloElt::zero(&ctx)];
        let e1 = vec![CycloElt::zero(&ctx), CycloElt::one(&ctx)];
        assert!(pair(&e0, &e0).unwrap().is_one());
        assert!(pair(&e0, &e1).unwrap().is_zero());
        assert!(pair(&e0, &e1[..1]).is_err());
    }

    #[test]
    fn diagonal_adjunction() {
        let ctx = PadicContext::new(3, 1, 10, None).unwrap();
        let b = ClassicalBlock::new("diag", ints(&ctx, &[&[1, 0], &[0, 3]]))
            .with_partner(ints(&ctx, &[&[3, 0], &[0, 1]]), None);
        assert!(verify_adjunction(&b).unwrap());
        assert!(hodge_duality_check(&b).unwrap());
    }

    #[test]
    fn exact_idempotent_is_fixed() {
        let ctx = PadicContext::new(3, 1, 10, None).unwrap();
        let p = ints(&ctx, &[&[1, 0], &[0, 0]]);
        assert_eq!(idempotent_limit(&p).unwrap(), p);
    }

    #[test]
    fn perturbed_idempotent_converges() {
        let ctx = PadicContext::new(3, 2, 20, None).unwrap();
        let pi = CycloElt::uniformizer(&ctx);
        let p = ints(&ctx, &[&[1, 2], &[0, 0]]).add(&ints(&ctx, &[&[0, 1], &[1, 0]]).scale(&pi)).unwrap();
        let q = idempotent_limit(&p).unwrap();
        assert_eq!(q.mul(&q).unwrap(), q);
        assert!(q.sub(&p).unwrap().divisible_by_pi_pow(1));
        let non = ints(&ctx, &[&[2, 0], &[0, 0]]);
        assert!(idempotent_limit(&non).is_err());
    }

    #[test]
    fn coordinate_split_recovers_blocks() {
        let ctx = PadicContext::new(3, 1, 20, None).unwrap();
        let m = ints(&ctx, &[&[3, 1, 0], &[9, 2, 0], &[0, 0, 5]]);
        let q1 = ints(&ctx, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        let q2 = ints(&ctx, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]);
        let s = split_and_factor(&m, &[q1, q2]).unwrap();
        assert_eq!(s.blocks[0], ints(&ctx, &[&[3, 1], &[9, 2]]));
        assert_eq!(s.blocks[1], ints(&ctx, &[&[5]]));
    }

    #[test]
    fn residual_projector_rejects_congruent_eigenvalues() {
        let ctx = PadicContext::new(3, 1, 10, None).unwrap();
        let t = ints(&ctx, &[&[1, 0], &[0, 4]]);
        let data = [EigenData {
            op: t,
            keep: CycloElt::from_i64(&ctx, 1),
            reject: vec![CycloElt::from_i64(&ctx, 4)],
        }];
        assert!(residual_projector("x", &data).is_err());
    }
}
