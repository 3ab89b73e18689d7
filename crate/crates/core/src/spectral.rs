//! Characteristic series, Newton and Hodge polygons, and slope checkers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{CycloElt, Valuation, Q};

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Coefficients of `det(I - X·M) = 1 + c_1 X + … + c_n X^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSeries {
    pub coeffs: Vec<CycloElt>,
}

impl CharSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn valuations(&self) -> Vec<Valuation> {
        self.coeffs.iter().map(CycloElt::valuation).collect()
    }

    /// Product of two series, truncated to the sum of degrees.
    pub fn mul(&self, other: &CharSeries) -> CharSeries {
        let ctx = self.coeffs[0].ctx();
        let n = self.degree() + other.degree();
        let mut out = vec![CycloElt::zero(ctx); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        CharSeries { coeffs: out }
    }
}

/// Berkowitz's division-free recursion.
pub fn char_series(m: &Matrix) -> Result<CharSeries> {
    if !m.is_square() {
        return Err(Error::Dimension("characteristic series of a non-square matrix".into()));
    }
    let ctx = m.ctx().clone();
    let n = m.rows();
    let mut v = vec![CycloElt::one(&ctx)];
    for r in 0..n {
        // Leading (r+1)×(r+1) block: A_r, row R = m[r][..r], column S = m[..r][r].
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(CycloElt::one(&ctx));
        toeplitz.push(-&m[(r, r)]);
        let mut w: Vec<CycloElt> = (0..r).map(|i| m[(i, r)].clone()).collect();
        for _ in 0..r {
            let rw = (0..r).fold(CycloElt::zero(&ctx), |mut acc, i| {
                acc += &(&m[(r, i)] * &w[i]);
                acc
            });
            toeplitz.push(-&rw);
            w = (0..r)
                .map(|i| {
                    (0..r).fold(CycloElt::zero(&ctx), |mut acc, k| {
                        acc += &(&m[(i, k)] * &w[k]);
                        acc
                    })
                })
                .collect();
        }
        let mut next = vec![CycloElt::zero(&ctx); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (k, vk) in v.iter().enumerate().take(i + 1) {
                if let Some(t) = toeplitz.get(i - k) {
                    *slot += &(t * vk);
                }
            }
        }
        v = next;
    }
    Ok(CharSeries { coeffs: v })
}

/// A point of a valuation diagram: exact, or only bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Point {
    pub x: usize,
    pub y: Valuation,
}

/// A convex polygon from `(0, 0)`, with the prefix on which it is certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonData {
    pub vertices: Vec<(usize, Q)>,
    /// The polygon equals the true one on `[0, certified]`.
    pub certified: usize,
}

impl PolygonData {
    pub fn from_slopes(slopes: &[Q]) -> Self {
        let mut vertices = vec![(0, q(0))];
        let mut y = q(0);
        for (i, s) in slopes.iter().enumerate() {
            y += *s;
            if i + 1 == slopes.len() || slopes[i + 1] != *s {
                vertices.push((i + 1, y));
            }
        }
        PolygonData { vertices, certified: slopes.len() }
    }

    pub fn len(&self) -> usize {
        self.vertices.last().map_or(0, |v| v.0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value_at(&self, x: usize) -> Option<Q> {
        let w = self.vertices.windows(2).find(|w| w[0].0 <= x && x <= w[1].0)?;
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        Some(y0 + (y1 - y0) * q((x - x0) as i64) / q((x1 - x0) as i64))
    }

    /// Slopes with multiplicity, over the whole polygon.
    pub fn slopes(&self) -> Vec<Q> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let s = (w[1].1 - w[0].1) / q((w[1].0 - w[0].0) as i64);
            out.extend(core::iter::repeat(s).take(w[1].0 - w[0].0));
        }
        out
    }

    /// Slopes on the certified prefix.
    pub fn certified_slopes(&self) -> Vec<Q> {
        let mut s = self.slopes();
        s.truncate(self.certified);
        s
    }

    pub fn is_vertex(&self, x: usize) -> bool {
        self.vertices.iter().any(|v| v.0 == x)
    }
}

/// Lower convex hull of `points` (sorted by `x`, starting at `x = 0`), tracking how far the
/// hull is pinned down by exact points.
pub fn lower_hull(points: &[Point]) -> PolygonData {
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for p in points {
        let (x, y) = (p.x, p.y.bound());
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop (x2, y2) if it lies on or above the chord from (x1, y1) to (x, y).
            if (y2 - y1) * q((x - x1) as i64) >= (y - y1) * q((x2 - x1) as i64) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let on_hull = |p: &Point| -> bool {
        PolygonData { vertices: hull.clone(), certified: 0 }
            .value_at(p.x)
            .is_some_and(|h| h == p.y.bound())
    };
    // Certified up to the last exact point on the hull before any inexact point touches it.
    let mut certified = 0;
    for p in points {
        if !on_hull(p) {
            continue;
        }
        if p.y.is_exact() {
            certified = p.x;
        } else {
            break;
        }
    }
    PolygonData { vertices: hull, certified }
}

/// Newton polygon of a finite characteristic series.
pub fn newton_polygon(cs: &CharSeries) -> PolygonData {
    let pts: Vec<Point> = cs
        .valuations()
        .into_iter()
        .enumerate()
        .map(|(x, y)| Point { x, y })
        .collect();
    lower_hull(&pts)
}

/// Row weights of an operator whose `r`-th row (interleaved basis, `t` rows per block) is
/// divisible by `p^{⌊r/t⌋}`: the truncation to `N` blocks is controlled by these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockWeights {
    pub t: usize,
    /// Number of blocks kept in the truncation.
    pub blocks: usize,
}

impl BlockWeights {
    /// Sum of the `k` smallest row weights: the quadratic lower bound for `v(c_k)`.
    pub fn floor_sum(&self, k: usize) -> Q {
        let t = self.t;
        let (full, rest) = (k / t, k % t);
        q((t * full * full.saturating_sub(1) / 2 + rest * full) as i64)
    }

    /// Lower bound for `v(c_k(full) - c_k(truncated))`.
    pub fn truncation_error(&self, k: usize) -> Q {
        if k <= self.t * self.blocks {
            self.floor_sum(k.saturating_sub(1)) + q(self.blocks as i64)
        } else {
            self.floor_sum(k)
        }
    }
}

/// Newton polygon of the full operator, certified from a truncation with the given block
/// structure. Each `c_k` is exact only when its computed valuation is below the truncation
/// error; virtual points beyond the truncation are added until they cannot lower the hull.
pub fn certified_newton(cs: &CharSeries, w: BlockWeights) -> PolygonData {
    let prec = cs.coeffs[0].ctx().prec() as i64;
    let mut pts = Vec::new();
    for (k, v) in cs.valuations().into_iter().enumerate() {
        let err = w.truncation_error(k);
        let lower = w.floor_sum(k);
        let y = match v {
            Valuation::Exact(x) if k == 0 || x < err => Valuation::Exact(x),
            _ => Valuation::AtLeast(lower.max(err.min(q(prec)))),
        };
        pts.push(Point { x: k, y });
    }
    let mut k = pts.len();
    loop {
        let hull = lower_hull(&pts);
        let last = hull.slopes().last().copied().unwrap_or(q(0));
        let step = w.floor_sum(k) - w.floor_sum(k - 1);
        if k > w.t * w.blocks + 1 && step > last {
            return hull;
        }
        pts.push(Point { x: k, y: Valuation::AtLeast(w.floor_sum(k)) });
        k += 1;
    }
}

/// Elementary-divisor valuations by pivoting on a minimal-valuation entry.
pub fn elementary_divisors(m: &Matrix) -> Result<Vec<Q>> {
    let e = m.ctx().e() as i64;
    let mut a = m.clone();
    let mut rows: Vec<usize> = (0..m.rows()).collect();
    let mut cols: Vec<usize> = (0..m.cols()).collect();
    let mut out = Vec::new();
    while !rows.is_empty() && !cols.is_empty() {
        let mut best: Option<(u64, usize, usize)> = None;
        for &i in &rows {
            for &j in &cols {
                if let Some(v) = a[(i, j)].pi_valuation() {
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            return Err(Error::PrecisionExhausted(format!(
                "{}×{} block vanishes at working precision",
                rows.len(),
                cols.len()
            )));
        };
        let (_, unit) = a[(pi, pj)].split_unit().expect("nonzero pivot");
        let inv = unit.inverse()?;
        for &i in &rows {
            if i == pi || a[(i, pj)].is_zero() {
                continue;
            }
            let f = &a[(i, pj)].div_pi_pow(v)? * &inv;
            for &j in &cols {
                let d = &f * &a[(pi, j)];
                a[(i, j)] -= &d;
            }
        }
        out.push(Q::new(v as i64, e));
        rows.retain(|&i| i != pi);
        cols.retain(|&j| j != pj);
    }
    out.sort();
    Ok(out)
}

/// Hodge polygon from the Smith normal form.
pub fn hodge_polygon(m: &Matrix) -> Result<PolygonData> {
    Ok(PolygonData::from_slopes(&elementary_divisors(m)?))
}

fn det_small(m: &Matrix, rows: &[usize], cols: &[usize]) -> CycloElt {
    if rows.len() == 1 {
        return m[(rows[0], cols[0])].clone();
    }
    let mut acc = CycloElt::zero(m.ctx());
    let rest: Vec<usize> = rows[1..].to_vec();
    for (k, &c) in cols.iter().enumerate() {
        if m[(rows[0], c)].is_zero() {
            continue;
        }
        let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[(rows[0], c)] * &det_small(m, &rest, &sub);
        if k % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for last in (k - 1)..n {
        for mut s in subsets(last, k - 1) {
            s.push(last);
            out.push(s);
        }
    }
    out
}

/// Hodge polygon from its definition: the vertex at `k` is the least valuation of a `k×k`
/// minor. Exponential; meant for small matrices.
pub fn hodge_polygon_minors(m: &Matrix) -> Result<PolygonData> {
    let n = m.rows().min(m.cols());
    let mut ys = vec![q(0)];
    for k in 1..=n {
        let mut best: Option<Q> = None;
        for r in subsets(m.rows(), k) {
            for c in subsets(m.cols(), k) {
                if let Valuation::Exact(v) = det_small(m, &r, &c).valuation() {
                    best = Some(best.map_or(v, |b: Q| b.min(v)));
                }
            }
        }
        ys.push(best.ok_or_else(|| {
            Error::PrecisionExhausted(format!("all {k}×{k} minors vanish at working precision"))
        })?);
    }
    let slopes: Vec<Q> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(PolygonData::from_slopes(&slopes))
}

/// Pointwise comparison `NP ≥ HP` on every integer abscissa.
pub fn check_np_above_hp(m: &Matrix) -> Result<bool> {
    let np = newton_polygon(&char_series(m)?);
    let hp = hodge_polygon(m)?;
    Ok((0..=m.rows()).all(|x| match (np.value_at(x), hp.value_at(x)) {
        (Some(a), Some(b)) => a >= b,
        _ => true,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub holds: bool,
    /// Abscissas where the comparison was exact.
    pub checked: usize,
    /// Abscissas whose coefficient was not certified.
    pub uncertified: usize,
}

/// The Newton polygon lies above the polygon with vertices `(nt, t·n(n-1)/2)`.
///
/// Since that polygon is convex it suffices to compare every certified point `(k, v(c_k))`.
pub fn check_theorem_a(cs: &CharSeries, w: BlockWeights) -> BoundReport {
    let mut report = BoundReport { holds: true, checked: 0, uncertified: 0 };
    for (k, v) in cs.valuations().into_iter().enumerate() {
        match v {
            Valuation::Exact(x) if k == 0 || x < w.truncation_error(k) => {
                report.checked += 1;
                if x < w.floor_sum(k) {
                    report.holds = false;
                }
            }
            _ => report.uncertified += 1,
        }
    }
    report
}

/// Sorted union of `α + q·n + r` over `n ≥ 0`, twists `r < q`, and each `α` in `alpha[r]`,
/// truncated to `count` entries.
pub fn improved_bound_slopes(alpha: &[Vec<Q>], count: usize) -> Result<Vec<Q>> {
    let qq = alpha.len();
    if qq == 0 {
        return Err(Error::Precondition("no twist data".into()));
    }
    for a in alpha.iter().flatten() {
        if *a < q(0) || *a > q(1) {
            return Err(Error::Precondition(format!("slope {a} outside [0, 1]")));
        }
    }
    let mut out = Vec::new();
    let mut n = 0i64;
    // Entries from round n are ≥ q·n, so stop once the smallest new entry exceeds the count-th.
    loop {
        for (r, list) in alpha.iter().enumerate() {
            for a in list {
                out.push(*a + q(qq as i64 * n + r as i64));
            }
        }
        out.sort();
        if out.len() >= count && out[count - 1] <= q(qq as i64 * (n + 1)) {
            out.truncate(count);
            return Ok(out);
        }
        if count == 0 {
            return Ok(Vec::new());
        }
        n += 1;
    }
}

/// Sum of the `n` smallest entries of a sorted list.
pub fn lambda_n(sorted: &[Q], n: usize) -> Q {
    sorted.iter().take(n).fold(q(0), |a, b| a + b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpReport {
    /// `(k, NP(kt) == λ_{kt})` for each certified `k`.
    pub touches: Vec<(usize, bool)>,
    /// Slope indices violating `⌊n/t⌋ ≤ s_n ≤ ⌊n/t⌋ + 1`.
    pub floor_violations: Vec<usize>,
    /// Number of certified slopes examined.
    pub certified: usize,
    pub strict: bool,
}

impl SharpReport {
    pub fn holds(&self) -> bool {
        self.floor_violations.is_empty() && self.touches.iter().all(|t| t.1)
    }
}

/// Compares a certified Newton polygon with the improved lower bound.
pub fn check_sharp_bound(np: &PolygonData, improved: &[Q], t: usize, strict: bool) -> SharpReport {
    let slopes = np.certified_slopes();
    let mut touches = Vec::new();
    let mut k = 1;
    while k * t <= slopes.len() && k * t <= improved.len() {
        let ok = np.value_at(k * t) == Some(lambda_n(improved, k * t));
        touches.push((k, ok));
        k += 1;
    }
    let floor_violations = slopes
        .iter()
        .enumerate()
        .filter(|(n, s)| {
            let f = q((n / t) as i64);
            **s < f || **s > f + q(1)
        })
        .map(|(n, _)| n)
        .collect();
    SharpReport { touches, floor_violations, certified: slopes.len(), strict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    /// Largest vertex `s0` with `NP(s) < HP(s-1) + 1` for all `1 ≤ s ≤ s0`.
    pub s0: usize,
    /// The same with `≤`.
    pub s0_non_strict: usize,
    /// Abscissas where `NP(s) = HP(s-1) + 1` holds with equality.
    pub equalities: Vec<usize>,
    /// The first `s0` Newton slopes.
    pub leading: Vec<Q>,
}

impl Progression {
    /// For each leading slope `a`, the progression `a, a + q, a + 2q, …` of length `len`.
    pub fn predicted(&self, q_step: u64, len: usize) -> Vec<Vec<Q>> {
        self.leading
            .iter()
            .map(|a| (0..len).map(|n| *a + q((q_step as usize * n) as i64)).collect())
            .collect()
    }
}

pub fn progression_check(np: &PolygonData, hp: &PolygonData) -> Progression {
    let n = np.len().min(hp.len() + 1).min(np.certified);
    let scan = |strict: bool| {
        let mut s0 = 0;
        for s in 1..=n {
            let (a, b) = (np.value_at(s).unwrap(), hp.value_at(s - 1).unwrap() + q(1));
            if (strict && a >= b) || (!strict && a > b) {
                break;
            }
            if np.is_vertex(s) {
                s0 = s;
            }
        }
        s0
    };
    let equalities = (1..=n)
        .filter(|&s| np.value_at(s).unwrap() == hp.value_at(s - 1).unwrap() + q(1))
        .collect();
    let s0 = scan(true);
    let mut leading = np.slopes();
    leading.truncate(s0);
    Progression { s0, s0_non_strict: scan(false), equalities, leading }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDegrees {
    /// Number of slope-zero entries, against `ord(ψ)`.
    pub ordinary: (usize, usize),
    /// `(n, #slopes in (n, n+1], t + ord_{n+1} - ord_n)` for each fully certified interval.
    pub intervals: Vec<(usize, usize, usize)>,
}

impl ComponentDegrees {
    pub fn matches(&self) -> bool {
        self.ordinary.0 == self.ordinary.1 && self.intervals.iter().all(|&(_, a, b)| a == b)
    }
}

/// Slope histogram against the predicted degrees; `ord[r]` is the slope-zero multiplicity of
/// the twist `r` (twists are periodic in `n` with period `ord.len()`).
pub fn connected_component_degrees(certified_slopes: &[Q], t: usize, ord: &[usize]) -> ComponentDegrees {
    let period = ord.len().max(1);
    let o = |n: usize| ord.get(n % period).copied().unwrap_or(0);
    let zeros = certified_slopes.iter().filter(|s| **s == q(0)).count();
    let mut intervals = Vec::new();
    let top = certified_slopes.last().copied().unwrap_or(q(0));
    let mut n = 0usize;
    while q(n as i64 + 1) < top {
        let lo = q(n as i64);
        let hi = lo + q(1);
        let count = certified_slopes.iter().filter(|s| **s > lo && **s <= hi).count();
        let expected = (t + o(n + 1)).saturating_sub(o(n));
        intervals.push((n, count, expected));
        n += 1;
    }
    ComponentDegrees { ordinary: (zeros, o(0)), intervals }
}

/// Least common denominator of a slope list, for display.
pub fn common_denominator(slopes: &[Q]) -> i64 {
    slopes.iter().fold(1, |acc, s| acc.lcm(s.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;
    use alloc::sync::Arc;

    fn zp(p: u64, prec: u32) -> Arc<PadicContext> {
        PadicContext::new(p, 1, prec, None).unwrap()
    }

    fn int_matrix(ctx: &Arc<PadicContext>, rows: &[&[i64]]) -> Matrix {
        Matrix::from_fn(ctx, rows.len(), rows[0].len(), |i, j| CycloElt::from_i64(ctx, rows[i][j]))
    }

    fn qs(v: &[(i64, i64)]) -> Vec<Q> {
        v.iter().map(|&(a, b)| Q::new(a, b)).collect()
    }

    #[test]
    fn diagonal_char_series() {
        let ctx = zp(3, 20);
        let m = int_matrix(&ctx, &[&[3, 0], &[0, 9]]);
        let cs = char_series(&m).unwrap();
        let want = [1, -12, 27];
        for (c, w) in cs.coeffs.iter().zip(want) {
            assert_eq!(*c, CycloElt::from_i64(&ctx, w));
        }
    }

    #[test]
    fn cubic_char_series_matches_cofactors() {
        let ctx = zp(5, 20);
        let a = [[2i64, -1, 7], [3, 5, 0], [-4, 6, 1]];
        let m = int_matrix(&ctx, &[&a[0], &a[1], &a[2]]);
        let cs = char_series(&m).unwrap();
        let tr = a[0][0] + a[1][1] + a[2][2];
        let minors2 = (a[0][0] * a[1][1] - a[0][1] * a[1][0])
            + (a[0][0] * a[2][2] - a[0][2] * a[2][0])
            + (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        let want = [1, -tr, minors2, -det];
        for (c, w) in cs.coeffs.iter().zip(want) {
            assert_eq!(*c, CycloElt::from_i64(&ctx, w));
        }
    }

    #[test]
    fn hull_of_simple_points() {
        let pts: Vec<Point> = [0, 1, 3]
            .iter()
            .enumerate()
            .map(|(x, &y)| Point { x, y: Valuation::Exact(q(y)) })
            .collect();
        let h = lower_hull(&pts);
        assert_eq!(h.slopes(), vec![q(1), q(2)]);
        assert_eq!(h.certified, 2);
    }

    #[test]
    fn inexact_points_stop_certification() {
        let pts = vec![
            Point { x: 0, y: Valuation::Exact(q(0)) },
            Point { x: 1, y: Valuation::Exact(q(1)) },
            Point { x: 2, y: Valuation::AtLeast(q(2)) },
            Point { x: 3, y: Valuation::Exact(q(6)) },
        ];
        let h = lower_hull(&pts);
        assert_eq!(h.certified, 1);
    }

    #[test]
    fn hodge_of_diagonal() {
        let ctx = zp(3, 20);
        let m = int_matrix(&ctx, &[&[1, 0], &[0, 3]]);
        assert_eq!(hodge_polygon(&m).unwrap().slopes(), vec![q(0), q(1)]);
        assert_eq!(hodge_polygon_minors(&m).unwrap().slopes(), vec![q(0), q(1)]);
        assert!(check_np_above_hp(&m).unwrap());
    }

    #[test]
    fn hodge_routes_agree_on_a_dense_example() {
        let ctx = zp(3, 20);
        let m = int_matrix(&ctx, &[&[3, 6, 9], &[9, 1, 27], &[2, 4, 18]]);
        assert_eq!(hodge_polygon(&m).unwrap(), hodge_polygon_minors(&m).unwrap());
    }

    #[test]
    fn singular_matrix_exhausts_precision() {
        let ctx = zp(3, 10);
        let m = int_matrix(&ctx, &[&[1, 2], &[2, 4]]);
        assert!(matches!(hodge_polygon(&m), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn theorem_a_negative_control() {
        let ctx = zp(3, 20);
        // A unit in the second block row breaks p-divisibility of that row.
        let m = int_matrix(&ctx, &[&[1, 0], &[0, 1]]);
        let cs = char_series(&m).unwrap();
        let r = check_theorem_a(&cs, BlockWeights { t: 1, blocks: 2 });
        assert!(!r.holds);
    }

    #[test]
    fn improved_bound_from_hodge_slopes() {
        let hp = qs(&[(0, 1), (0, 1), (0, 1), (1, 2), (1, 2), (1, 2), (1, 1), (1, 1), (1, 1)]);
        let s = improved_bound_slopes(&[hp.clone()], 13).unwrap();
        let want = qs(&[
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 2),
            (1, 2),
            (1, 2),
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1),
            (1, 1),
            (3, 2),
        ]);
        assert_eq!(s, want);
        assert_eq!(lambda_n(&s, 9), Q::new(9, 2));
        let zeros = improved_bound_slopes(&[vec![q(0), q(0)]], 6).unwrap();
        assert_eq!(zeros, vec![q(0), q(0), q(1), q(1), q(2), q(2)]);
        assert!(improved_bound_slopes(&[vec![q(2)]], 3).is_err());
    }

    #[test]
    fn sharp_bound_negative_control() {
        let np = PolygonData::from_slopes(&qs(&[(5, 2), (3, 2), (5, 2)]));
        let np = PolygonData { certified: 3, ..np };
        let r = check_sharp_bound(&np, &qs(&[(1, 2), (3, 2), (5, 2)]), 1, false);
        assert!(!r.holds());
    }

    #[test]
    fn progression_on_printed_polygons() {
        let np3 = PolygonData::from_slopes(&qs(&[(1, 6), (1, 2), (5, 6)]));
        let hp3 = PolygonData::from_slopes(&qs(&[(0, 1), (1, 2), (1, 1)]));
        assert_eq!(progression_check(&np3, &hp3).s0, 2);
        let np4 = PolygonData::from_slopes(&(0..9).map(|i| Q::new(2 * i + 1, 18)).collect::<Vec<_>>());
        let hp4 = PolygonData::from_slopes(&qs(&[
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 2),
            (1, 2),
            (1, 2),
            (1, 1),
            (1, 1),
            (1, 1),
        ]));
        let p = progression_check(&np4, &hp4);
        assert_eq!((p.s0, p.s0_non_strict), (5, 6));
        assert_eq!(p.equalities.first(), Some(&6));
        let flat = PolygonData::from_slopes(&[q(0); 4]);
        assert_eq!(progression_check(&flat, &flat).s0, 4);
    }

    #[test]
    fn component_degrees() {
        let s: Vec<Q> = (0..6).map(|n| Q::new(2 * n + 1, 2)).collect();
        let d = connected_component_degrees(&s, 1, &[0]);
        assert!(d.matches());
        assert_eq!(d.intervals.len(), 5);
        let ordinary = [q(0), q(0), q(1), q(1), q(2), q(2)];
        assert!(connected_component_degrees(&ordinary, 2, &[2]).matches());
    }

    #[test]
    fn weights_floor_sum() {
        let w = BlockWeights { t: 2, blocks: 3 };
        let direct = |k: usize| (0..k).map(|r| r / 2).sum::<usize>() as i64;
        for k in 0..12 {
            assert_eq!(w.floor_sum(k), q(direct(k)));
        }
    }
}
