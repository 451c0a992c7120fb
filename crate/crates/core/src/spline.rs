//! Regression spline design matrices.
//!
//! Three bases are supported: truncated power (`ppolys`), natural cubic
//! (`ns`) and B-splines (`bs`). Column counts with an intercept are
//! `1 + d + m`, `m + 2` and `1 + d + m` respectively.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::regress::DesignMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Basis {
    /// Truncated power basis `{x^j} ∪ {(x - t_k)_+^d}`.
    #[default]
    TruncatedPower,
    /// Natural cubic spline, linear beyond the boundary knots.
    NaturalCubic,
    /// B-spline basis with clamped boundary knots.
    BSpline,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::TruncatedPower => "ppolys",
            Basis::NaturalCubic => "ns",
            Basis::BSpline => "bs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpec {
    pub basis: Basis,
    /// Polynomial degree; ignored (treated as 3) for the natural cubic basis.
    pub degree: usize,
    pub intercept: bool,
    pub boundary: (f64, f64),
}

impl SplineSpec {
    pub fn new(basis: Basis, degree: usize, intercept: bool, boundary: (f64, f64)) -> Result<Self> {
        if basis != Basis::NaturalCubic && degree < 1 {
            return Err(Error::InvalidConfig("spline degree must be >= 1".into()));
        }
        if !(boundary.0 < boundary.1) {
            return Err(Error::InvalidConfig("boundary must satisfy x_lo < x_hi".into()));
        }
        let degree = if basis == Basis::NaturalCubic { 3 } else { degree };
        Ok(Self { basis, degree, intercept, boundary })
    }

    /// Number of design columns for `m` interior knots.
    pub fn column_count(&self, m: usize) -> usize {
        let icpt = usize::from(self.intercept);
        match self.basis {
            Basis::TruncatedPower | Basis::BSpline => icpt + self.degree + m,
            Basis::NaturalCubic => icpt + 1 + m,
        }
    }

    /// Design matrix at the points `x` for the given interior knots.
    pub fn design(&self, x: &[f64], knots: &KnotSet) -> Result<DesignMatrix> {
        match self.basis {
            Basis::TruncatedPower => truncated_power_design(x, knots, self.degree, self.intercept),
            Basis::BSpline => bspline_design(x, knots, self.degree, self.intercept, self.boundary),
            Basis::NaturalCubic => natural_cubic_design(x, knots, self.intercept, self.boundary),
        }
    }
}

/// Strictly increasing interior knots, strictly inside a boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    interior: Vec<f64>,
}

impl KnotSet {
    pub fn new(interior: Vec<f64>, boundary: (f64, f64)) -> Result<Self> {
        if interior.iter().any(|t| !t.is_finite()) {
            return Err(Error::Infeasible("knots must be finite".into()));
        }
        if interior.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Infeasible("knots must be strictly increasing".into()));
        }
        if interior.iter().any(|&t| !(t > boundary.0 && t < boundary.1)) {
            return Err(Error::Infeasible("interior knot on or outside the boundary".into()));
        }
        Ok(Self { interior })
    }

    pub fn empty() -> Self {
        Self { interior: Vec::new() }
    }

    pub fn interior(&self) -> &[f64] {
        &self.interior
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }
}

fn ipow(b: f64, e: usize) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * b)
}

/// `[1] ∪ {x^j, j=1..d} ∪ {(x - t_k)_+^d, k=1..m}`.
pub fn truncated_power_design(x: &[f64], knots: &KnotSet, d: usize, intercept: bool) -> Result<DesignMatrix> {
    if x.is_empty() {
        return Err(Error::Infeasible("no design points".into()));
    }
    if d == 0 {
        return Err(Error::InvalidConfig("truncated power degree must be >= 1".into()));
    }
    let n = x.len();
    let cols = usize::from(intercept) + d + knots.len();
    let mut data = Vec::with_capacity(n * cols);
    if intercept {
        data.resize(n, 1.0);
    }
    for j in 1..=d {
        data.extend(x.iter().map(|&v| ipow(v, j)));
    }
    for &t in knots.interior() {
        data.extend(x.iter().map(|&v| if v > t { ipow(v - t, d) } else { 0.0 }));
    }
    DesignMatrix::from_col_major(n, cols, data)
}

/// Clamped knot vector: each boundary repeated `d + 1` times around the interior knots.
pub fn extended_knots(knots: &KnotSet, d: usize, boundary: (f64, f64)) -> Vec<f64> {
    let mut t = Vec::with_capacity(knots.len() + 2 * (d + 1));
    t.extend(core::iter::repeat_n(boundary.0, d + 1));
    t.extend_from_slice(knots.interior());
    t.extend(core::iter::repeat_n(boundary.1, d + 1));
    t
}

/// `B_{i,d}(x)` by the Cox-de Boor recursion; 0/0 terms count as zero.
///
/// The zeroth-degree indicator is `[t_i, t_{i+1})`, except that `x` equal to
/// the last knot is assigned to the last nonempty interval.
pub fn bspline_basis(x: f64, i: usize, d: usize, t: &[f64]) -> f64 {
    if i + d + 1 >= t.len() {
        return 0.0;
    }
    if d == 0 {
        let (a, b) = (t[i], t[i + 1]);
        if a <= x && x < b {
            return 1.0;
        }
        let last = t[t.len() - 1];
        let closes_right = a < b && x == b && b == last && t[i + 1..].iter().all(|&v| v == last);
        return if closes_right { 1.0 } else { 0.0 };
    }
    let left_den = t[i + d] - t[i];
    let right_den = t[i + d + 1] - t[i + 1];
    let left = if left_den == 0.0 { 0.0 } else { (x - t[i]) / left_den * bspline_basis(x, i, d - 1, t) };
    let right = if right_den == 0.0 {
        0.0
    } else {
        (t[i + d + 1] - x) / right_den * bspline_basis(x, i + 1, d - 1, t)
    };
    left + right
}

/// Knot span `s` with `t[s] <= x < t[s+1]` (closed at the right end), or `None`
/// outside `[t[d], t[len-d-1]]`.
fn find_span(x: f64, d: usize, t: &[f64]) -> Option<usize> {
    let nb = t.len() - d - 1;
    let (lo, hi) = (t[d], t[nb]);
    if !(x >= lo && x <= hi) {
        return None;
    }
    if x == hi {
        return (d..nb).rev().find(|&s| t[s] < t[s + 1]);
    }
    // Last s with t[s] <= x.
    let s = t.partition_point(|&v| v <= x) - 1;
    Some(s.min(nb - 1))
}

/// All `d + 1` possibly nonzero basis values at `x`, written into `out`
/// (length = number of basis functions).
fn eval_all_basis(x: f64, d: usize, t: &[f64], out: &mut [f64], left: &mut [f64], right: &mut [f64], n: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let Some(s) = find_span(x, d, t) else { return };
    n[0] = 1.0;
    for j in 1..=d {
        left[j] = x - t[s + 1 - j];
        right[j] = t[s + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            let den = right[r + 1] + left[j - r];
            let tmp = if den == 0.0 { 0.0 } else { n[r] / den };
            n[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        n[j] = saved;
    }
    for r in 0..=d {
        out[s - d + r] = n[r];
    }
}

/// B-spline design: `m + d` basis columns (the first basis function dropped)
/// plus an optional leading intercept column.
pub fn bspline_design(
    x: &[f64],
    knots: &KnotSet,
    d: usize,
    intercept: bool,
    boundary: (f64, f64),
) -> Result<DesignMatrix> {
    if x.is_empty() {
        return Err(Error::Infeasible("no design points".into()));
    }
    if d == 0 {
        return Err(Error::InvalidConfig("B-spline degree must be >= 1".into()));
    }
    if knots.interior().iter().any(|&k| !(k > boundary.0 && k < boundary.1)) {
        return Err(Error::Infeasible("interior knot on or outside the boundary".into()));
    }
    let t = extended_knots(knots, d, boundary);
    let nbasis = knots.len() + d + 1;
    let n = x.len();
    let icpt = usize::from(intercept);
    let cols = icpt + nbasis - 1;
    let mut data = vec![0.0; n * cols];
    if intercept {
        data[..n].iter_mut().for_each(|v| *v = 1.0);
    }
    let mut row = vec![0.0; nbasis];
    let (mut left, mut right, mut work) = (vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1]);
    for (i, &xi) in x.iter().enumerate() {
        eval_all_basis(xi, d, &t, &mut row, &mut left, &mut right, &mut work);
        for b in 1..nbasis {
            data[(icpt + b - 1) * n + i] = row[b];
        }
    }
    DesignMatrix::from_col_major(n, cols, data)
}

/// Natural cubic spline design with knots `lo < t_1 < ... < t_m < hi`.
///
/// Columns are `[1], x, N_k(x) = d_k(x) - d_{K-1}(x)` for `k = 1..m`, with all
/// knots `xi = (lo, t_1, ..., t_m, hi)`, `K = m + 2` and
/// `d_k(x) = ((x - xi_k)_+^3 - (x - xi_K)_+^3) / (xi_K - xi_k)`.
/// Every column is linear outside `[lo, hi]`, so second derivatives vanish
/// at both boundaries.
pub fn natural_cubic_design(x: &[f64], knots: &KnotSet, intercept: bool, boundary: (f64, f64)) -> Result<DesignMatrix> {
    if x.is_empty() {
        return Err(Error::Infeasible("no design points".into()));
    }
    if knots.is_empty() {
        return Err(Error::Infeasible("natural cubic splines need at least one interior knot".into()));
    }
    if knots.interior().iter().any(|&k| !(k > boundary.0 && k < boundary.1)) {
        return Err(Error::Infeasible("interior knot on or outside the boundary".into()));
    }
    let mut xi = Vec::with_capacity(knots.len() + 2);
    xi.push(boundary.0);
    xi.extend_from_slice(knots.interior());
    xi.push(boundary.1);
    let kk = xi.len() - 1;
    let cube = |v: f64| if v > 0.0 { v * v * v } else { 0.0 };
    let dk = |k: usize, v: f64| (cube(v - xi[k]) - cube(v - xi[kk])) / (xi[kk] - xi[k]);

    let n = x.len();
    let cols = usize::from(intercept) + 1 + knots.len();
    let mut data = Vec::with_capacity(n * cols);
    if intercept {
        data.resize(n, 1.0);
    }
    data.extend_from_slice(x);
    for k in 0..knots.len() {
        data.extend(x.iter().map(|&v| dk(k, v) - dk(kk - 1, v)));
    }
    DesignMatrix::from_col_major(n, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::least_squares;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn random_knots(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> KnotSet {
        let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(lo + 0.01..hi - 0.01)).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        KnotSet::new(v, (lo, hi)).unwrap()
    }

    #[test]
    fn truncated_power_columns() {
        let x = [0.0, 1.0, 2.0];
        let k = KnotSet::new(vec![1.0], (0.0, 2.0)).unwrap();
        let m = truncated_power_design(&x, &k, 3, true).unwrap();
        assert_eq!(m.cols(), 5);
        assert_eq!(m.column(4), &[0.0, 0.0, 1.0]);
        let none = truncated_power_design(&x, &KnotSet::empty(), 1, true).unwrap();
        assert_eq!(none.cols(), 2);
        assert_eq!(none.column(1), &x);
        let two = KnotSet::new(vec![0.5, 1.5], (0.0, 2.0)).unwrap();
        assert_eq!(truncated_power_design(&x, &two, 3, true).unwrap().cols(), 6);
        assert!(truncated_power_design(&[], &k, 3, true).is_err());
    }

    #[test]
    fn knot_set_validation() {
        assert!(KnotSet::new(vec![2.0, 1.0], (0.0, 3.0)).is_err());
        assert!(KnotSet::new(vec![1.0, 1.0], (0.0, 3.0)).is_err());
        assert!(KnotSet::new(vec![0.0], (0.0, 3.0)).is_err());
        assert!(KnotSet::new(vec![3.5], (0.0, 3.0)).is_err());
        assert!(KnotSet::new(vec![1.0, 2.0], (0.0, 3.0)).is_ok());
    }

    #[test]
    fn degree_zero_is_an_indicator() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(bspline_basis(1.5, 1, 0, &t), 1.0);
        assert_eq!(bspline_basis(2.0, 1, 0, &t), 0.0);
        assert_eq!(bspline_basis(0.5, 1, 0, &t), 0.0);
        // right closure at the last knot
        assert_eq!(bspline_basis(3.0, 2, 0, &t), 1.0);
    }

    #[test]
    fn linear_hat_function() {
        let t = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert!((bspline_basis(1.0, 0, 1, &t) - 1.0).abs() < 1e-15);
        assert!((bspline_basis(0.5, 0, 1, &t) - 0.5).abs() < 1e-15);
        assert!((bspline_basis(1.5, 0, 1, &t) - 0.5).abs() < 1e-15);
        assert_eq!(bspline_basis(2.5, 0, 1, &t), 0.0);
    }

    #[test]
    fn recursion_and_triangular_scheme_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            let knots = random_knots(&mut rng, 5, 0.0, 10.0);
            let t = extended_knots(&knots, d, (0.0, 10.0));
            let nb = knots.len() + d + 1;
            let mut row = vec![0.0; nb];
            let (mut l, mut r, mut w) = (vec![0.0; d + 1], vec![0.0; d + 1], vec![0.0; d + 1]);
            for x in uniform_points(0.0, 10.0, 101) {
                eval_all_basis(x, d, &t, &mut row, &mut l, &mut r, &mut w);
                for (i, v) in row.iter().enumerate() {
                    assert!((v - bspline_basis(x, i, d, &t)).abs() < 1e-13, "d={d} x={x} i={i}");
                }
            }
        }
    }

    #[test]
    fn local_support() {
        let knots = KnotSet::new(vec![2.0, 4.0, 6.0, 8.0], (0.0, 10.0)).unwrap();
        let d = 3;
        let t = extended_knots(&knots, d, (0.0, 10.0));
        for i in 0..knots.len() + d + 1 {
            for x in uniform_points(0.0, 10.0, 501) {
                let inside = x >= t[i] && (x < t[i + d + 1] || (x == 10.0 && t[i + d + 1] == 10.0));
                if !inside {
                    assert_eq!(bspline_basis(x, i, d, &t), 0.0);
                }
            }
        }
    }

    #[test]
    fn bspline_column_counts_and_cubic_equivalence() {
        let x = uniform_points(0.0, 5.0, 30);
        let y: Vec<f64> = x.iter().map(|v| libm::sin(*v) + 0.1 * v * v).collect();
        let bs = bspline_design(&x, &KnotSet::empty(), 3, true, (0.0, 5.0)).unwrap();
        assert_eq!(bs.cols(), 4);
        let tp = truncated_power_design(&x, &KnotSet::empty(), 3, true).unwrap();
        let a = least_squares(&bs, &y).unwrap().rss_or_deviance;
        let b = least_squares(&tp, &y).unwrap().rss_or_deviance;
        assert!((a - b).abs() < 1e-8);
        let k = KnotSet::new(vec![1.0, 2.5], (0.0, 5.0)).unwrap();
        assert_eq!(bspline_design(&x, &k, 3, true, (0.0, 5.0)).unwrap().cols(), 6);
        assert_eq!(bspline_design(&x, &k, 3, false, (0.0, 5.0)).unwrap().cols(), 5);
        assert!(bspline_design(&x, &k, 3, true, (1.0, 5.0)).is_err());
    }

    #[test]
    fn degree_one_bspline_reproduces_joinpoints() {
        let x: Vec<f64> = (1..=40).map(f64::from).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 2.0 + 0.5 * v - 1.5 * (v - 12.0).max(0.0) + 2.0 * (v - 27.0).max(0.0))
            .collect();
        let k = KnotSet::new(vec![12.0, 27.0], (1.0, 40.0)).unwrap();
        let m = bspline_design(&x, &k, 1, true, (1.0, 40.0)).unwrap();
        let fit = least_squares(&m, &y).unwrap();
        let scale: f64 = y.iter().map(|v| v * v).sum();
        assert!(fit.rss_or_deviance <= 1e-16 * scale, "rss {}", fit.rss_or_deviance);
    }

    #[test]
    fn bspline_design_has_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = uniform_points(0.0, 1.0, 200);
        let y: Vec<f64> = x.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        for _ in 0..20 {
            let d = rng.random_range(1..=3);
            let m = rng.random_range(0..6);
            let knots = random_knots(&mut rng, m, 0.0, 1.0);
            let design = bspline_design(&x, &knots, d, true, (0.0, 1.0)).unwrap();
            assert_eq!(design.cols(), knots.len() + d + 1);
            // Full rank: the QR solve succeeds at the rank tolerance.
            least_squares(&design, &y).unwrap();
        }
    }

    #[test]
    fn natural_cubic_counts_and_linear_reproduction() {
        let x = uniform_points(0.0, 10.0, 50);
        let b = (0.0, 10.0);
        let k1 = KnotSet::new(vec![5.0], b).unwrap();
        assert_eq!(natural_cubic_design(&x, &k1, true, b).unwrap().cols(), 3);
        assert!(matches!(natural_cubic_design(&x, &KnotSet::empty(), true, b), Err(Error::Infeasible(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.3 * v + rng.random_range(-0.5..0.5)).collect();
        let line = truncated_power_design(&x, &KnotSet::empty(), 1, true).unwrap();
        let line_rss = least_squares(&line, &y).unwrap().rss_or_deviance;
        let exact: Vec<f64> = x.iter().map(|v| 1.0 + 0.3 * v).collect();
        let k3 = KnotSet::new(vec![2.0, 4.5, 8.0], b).unwrap();
        let ns = natural_cubic_design(&x, &k3, true, b).unwrap();
        assert!(least_squares(&ns, &exact).unwrap().rss_or_deviance < 1e-8);
        assert!(least_squares(&ns, &y).unwrap().rss_or_deviance <= line_rss + 1e-8);
    }

    #[test]
    fn column_count_matches_design() {
        let x = uniform_points(0.0, 10.0, 40);
        for basis in [Basis::TruncatedPower, Basis::NaturalCubic, Basis::BSpline] {
            for m in 1..=6 {
                let spec = SplineSpec::new(basis, 3, true, (0.0, 10.0)).unwrap();
                let k = KnotSet::new((1..=m).map(|i| i as f64 * 10.0 / (m + 1) as f64).collect(), (0.0, 10.0)).unwrap();
                assert_eq!(spec.design(&x, &k).unwrap().cols(), spec.column_count(m));
            }
        }
    }

    #[test]
    fn spline_settings_validation() {
        assert!(SplineSpec::new(Basis::BSpline, 0, true, (0.0, 1.0)).is_err());
        assert!(SplineSpec::new(Basis::BSpline, 1, true, (1.0, 1.0)).is_err());
        assert_eq!(SplineSpec::new(Basis::NaturalCubic, 7, true, (0.0, 1.0)).unwrap().degree, 3);
    }
}
