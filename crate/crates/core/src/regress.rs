//! Dense least squares, IRLS for GLMs, and information criteria.
//!
//! Least squares goes through a Householder QR of the column-equilibrated
//! design; `X^T X` is never formed. A column whose reflected diagonal falls
//! below `RANK_TOL * max|R_jj|` makes the fit `RankDeficient`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative rank tolerance on the diagonal of the triangular factor.
pub const RANK_TOL: f64 = 1e-10;

/// Information-criterion value used when a Gaussian fit is exact (RSS = 0),
/// before the complexity penalty is added.
pub const PERFECT_FIT_FLOOR: f64 = -1e12;

/// IRLS relative deviance tolerance.
pub const IRLS_TOL: f64 = 1e-8;

/// IRLS iteration cap.
pub const IRLS_MAX_ITER: usize = 50;

const MAX_STEP_HALVINGS: usize = 30;

/// Dense `rows x cols` matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    /// Builds a matrix from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Infeasible("design matrix needs at least one row and one column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Infeasible("design matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for col in columns {
            if col.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: col.len() });
            }
            data.extend_from_slice(col);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        let mut cm = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                cm[j * rows + i] = data[i * cols + j];
            }
        }
        Self::from_col_major(rows, cols, cm)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    /// New matrix made of the listed columns, optionally led by a ones column.
    pub fn select_columns(&self, cols: &[usize], intercept: bool) -> Result<Self> {
        let width = cols.len() + usize::from(intercept);
        let mut data = Vec::with_capacity(self.rows * width);
        if intercept {
            data.resize(self.rows, 1.0);
        }
        for &c in cols {
            data.extend_from_slice(self.column(c));
        }
        Self::from_col_major(self.rows, width, data)
    }

    /// `X b`.
    pub fn mul_vec(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.column(j)) {
                *o += x * bj;
            }
        }
        out
    }

    /// `X^T v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| dot(self.column(j), v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IcKind {
    #[default]
    Bic,
    Aic,
    Aicc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GlmFamily {
    #[default]
    GaussianIdentity,
    BinomialLogit,
    PoissonLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    /// RSS for least squares, residual deviance for GLMs.
    pub rss_or_deviance: f64,
    pub free_params: usize,
    pub ic_value: Option<f64>,
    pub ic_kind: Option<IcKind>,
}

impl FitResult {
    /// Fills the information-criterion fields using `free_params` as `r`.
    pub fn with_ic(mut self, n: usize, kind: IcKind, family: GlmFamily) -> Result<Self> {
        self.ic_value = Some(info_criterion(n, self.rss_or_deviance, self.free_params, kind, family)?);
        self.ic_kind = Some(kind);
        Ok(self)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordinary least squares via Householder QR.
pub fn least_squares(x: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    let (n, r) = (x.rows, x.cols);
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    if n < r {
        return Err(Error::RankDeficient { rank: n, cols: r });
    }

    // Equilibrate columns to unit norm; keeps the rank test scale free.
    let mut a = x.data.clone();
    let mut scale = vec![0.0; r];
    for j in 0..r {
        let col = &mut a[j * n..(j + 1) * n];
        let norm = libm::sqrt(dot(col, col));
        if norm == 0.0 {
            return Err(Error::RankDeficient { rank: j, cols: r });
        }
        col.iter_mut().for_each(|v| *v /= norm);
        scale[j] = norm;
    }

    let mut qty = y.to_vec();
    let mut diag = vec![0.0; r];
    for k in 0..r {
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let vk = &mut head[k * n + k..(k + 1) * n];
        let norm = libm::sqrt(dot(vk, vk));
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if vk[0] > 0.0 { -norm } else { norm };
        vk[0] -= alpha;
        let vnorm2 = dot(vk, vk);
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for j in 0..(r - k - 1) {
            let col = &mut tail[j * n + k..(j + 1) * n];
            let s = 2.0 * dot(vk, col) / vnorm2;
            col.iter_mut().zip(vk.iter()).for_each(|(c, v)| *c -= s * v);
        }
        let yk = &mut qty[k..];
        let s = 2.0 * dot(vk, yk) / vnorm2;
        yk.iter_mut().zip(vk.iter()).for_each(|(c, v)| *c -= s * v);
    }

    let max_diag = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let tol = RANK_TOL * max_diag;
    let rank = diag.iter().filter(|d| d.abs() > tol).count();
    if rank < r || max_diag == 0.0 {
        return Err(Error::RankDeficient { rank, cols: r });
    }

    // Back substitution on R b = Q^T y, R stored in the upper triangle of `a`.
    let mut b = vec![0.0; r];
    for i in (0..r).rev() {
        let mut s = qty[i];
        for j in (i + 1)..r {
            s -= a[j * n + i] * b[j];
        }
        b[i] = s / diag[i];
    }
    for (bj, sj) in b.iter_mut().zip(&scale) {
        *bj /= sj;
    }
    let rss = qty[r..].iter().map(|v| v * v).sum();

    Ok(FitResult { coefficients: b, rss_or_deviance: rss, free_params: r, ic_value: None, ic_kind: None })
}

/// Inverse link, `dmu/deta`, variance and deviance for each family.
impl GlmFamily {
    fn check_response(self, y: &[f64]) -> Result<()> {
        match self {
            GlmFamily::GaussianIdentity => Ok(()),
            GlmFamily::BinomialLogit => {
                if y.iter().all(|v| (0.0..=1.0).contains(v)) {
                    Ok(())
                } else {
                    Err(Error::InvalidResponse("binomial response must lie in [0, 1]".into()))
                }
            }
            GlmFamily::PoissonLog => {
                if y.iter().all(|v| *v >= 0.0 && libm::floor(*v) == *v) {
                    Ok(())
                } else {
                    Err(Error::InvalidResponse("poisson response must be non-negative integers".into()))
                }
            }
        }
    }

    fn initial_mu(self, y: f64) -> f64 {
        match self {
            GlmFamily::GaussianIdentity => y,
            GlmFamily::BinomialLogit => (y + 0.5) / 2.0,
            GlmFamily::PoissonLog => y + 0.1,
        }
    }

    fn link(self, mu: f64) -> f64 {
        match self {
            GlmFamily::GaussianIdentity => mu,
            GlmFamily::BinomialLogit => libm::log(mu / (1.0 - mu)),
            GlmFamily::PoissonLog => libm::log(mu),
        }
    }

    /// Inverse link; returns `(mu, dmu/deta)`.
    fn inverse_link(self, eta: f64) -> (f64, f64) {
        const EPS: f64 = f64::EPSILON;
        match self {
            GlmFamily::GaussianIdentity => (eta, 1.0),
            GlmFamily::BinomialLogit => {
                let e = libm::exp(-eta.abs());
                let mu = if eta >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
                let mu = mu.clamp(EPS, 1.0 - EPS);
                let d = (e / ((1.0 + e) * (1.0 + e))).max(EPS);
                (mu, d)
            }
            GlmFamily::PoissonLog => {
                let mu = libm::exp(eta.min(700.0)).max(EPS);
                (mu, mu)
            }
        }
    }

    fn variance(self, mu: f64) -> f64 {
        match self {
            GlmFamily::GaussianIdentity => 1.0,
            GlmFamily::BinomialLogit => mu * (1.0 - mu),
            GlmFamily::PoissonLog => mu,
        }
    }

    /// Residual deviance of fitted means `mu` against `y`.
    pub fn deviance(self, y: &[f64], mu: &[f64]) -> f64 {
        fn ylogy(a: f64, b: f64) -> f64 {
            if a == 0.0 {
                0.0
            } else {
                a * libm::log(a / b)
            }
        }
        let terms = y.iter().zip(mu);
        match self {
            GlmFamily::GaussianIdentity => terms.map(|(y, m)| (y - m) * (y - m)).sum(),
            GlmFamily::BinomialLogit => {
                2.0 * terms.map(|(&y, &m)| ylogy(y, m) + ylogy(1.0 - y, 1.0 - m)).sum::<f64>()
            }
            GlmFamily::PoissonLog => 2.0 * terms.map(|(&y, &m)| ylogy(y, m) - (y - m)).sum::<f64>(),
        }
    }

    /// Fitted means for a linear predictor.
    pub fn mean(self, eta: f64) -> f64 {
        self.inverse_link(eta).0
    }
}

/// GLM fit by iteratively reweighted least squares.
///
/// Gaussian/identity short-circuits to [`least_squares`], so the deviance
/// equals the RSS bit for bit. Deviance increases trigger step halving.
pub fn glm_fit(x: &DesignMatrix, y: &[f64], family: GlmFamily) -> Result<FitResult> {
    if y.len() != x.rows {
        return Err(Error::DimensionMismatch { expected: x.rows, found: y.len() });
    }
    family.check_response(y)?;
    if family == GlmFamily::GaussianIdentity {
        return least_squares(x, y);
    }

    let n = x.rows;
    let mut mu: Vec<f64> = y.iter().map(|&v| family.initial_mu(v)).collect();
    let mut eta: Vec<f64> = mu.iter().map(|&m| family.link(m)).collect();
    let mut dev_old = family.deviance(y, &mu);
    let mut beta_old: Option<Vec<f64>> = None;

    for iter in 1..=IRLS_MAX_ITER {
        let mut wdata = Vec::with_capacity(n * x.cols);
        let mut sw = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let (_, d) = family.inverse_link(eta[i]);
            let w = d * d / family.variance(mu[i]);
            let s = libm::sqrt(w);
            sw.push(s);
            z.push(s * (eta[i] + (y[i] - mu[i]) / d));
        }
        for j in 0..x.cols {
            wdata.extend(x.column(j).iter().zip(&sw).map(|(v, s)| v * s));
        }
        let wx = DesignMatrix::from_col_major(n, x.cols, wdata)?;
        let mut beta = least_squares(&wx, &z)?.coefficients;

        let eval = |b: &[f64]| {
            let e = x.mul_vec(b);
            let m: Vec<f64> = e.iter().map(|&v| family.mean(v)).collect();
            let d = family.deviance(y, &m);
            (e, m, d)
        };
        let (mut e_new, mut m_new, mut dev_new) = eval(&beta);
        if let Some(prev) = &beta_old {
            let mut halvings = 0;
            while !(dev_new.is_finite() && dev_new <= dev_old) && halvings < MAX_STEP_HALVINGS {
                for (b, p) in beta.iter_mut().zip(prev) {
                    *b = 0.5 * (*b + p);
                }
                (e_new, m_new, dev_new) = eval(&beta);
                halvings += 1;
            }
        }
        if !dev_new.is_finite() {
            return Err(Error::NonConverged { iterations: iter });
        }
        let converged = (dev_new - dev_old).abs() / (dev_new.abs() + 0.1) < IRLS_TOL;
        eta = e_new;
        mu = m_new;
        dev_old = dev_new;
        if converged {
            return Ok(FitResult {
                coefficients: beta,
                rss_or_deviance: dev_new.max(0.0),
                free_params: x.cols,
                ic_value: None,
                ic_kind: None,
            });
        }
        beta_old = Some(beta);
    }
    Err(Error::NonConverged { iterations: IRLS_MAX_ITER })
}

/// `n ln(RSS/n) + penalty` for Gaussian fits, `deviance + penalty` otherwise.
///
/// Penalties: BIC `r ln n`, AIC `2r`, AICc `2r + 2r(r+1)/(n-r-1)`. An exact
/// Gaussian fit scores [`PERFECT_FIT_FLOOR`] plus the penalty.
pub fn info_criterion(n: usize, rss_or_deviance: f64, r: usize, kind: IcKind, family: GlmFamily) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("information criterion needs n >= 1".into()));
    }
    if !(rss_or_deviance >= 0.0) {
        return Err(Error::InvalidConfig("RSS or deviance must be non-negative".into()));
    }
    let nf = n as f64;
    let rf = r as f64;
    let penalty = match kind {
        IcKind::Bic => rf * libm::log(nf),
        IcKind::Aic => 2.0 * rf,
        IcKind::Aicc => {
            if n <= r + 1 {
                return Err(Error::Infeasible("AICc requires n - r - 1 > 0".into()));
            }
            2.0 * rf + 2.0 * rf * (rf + 1.0) / (nf - rf - 1.0)
        }
    };
    let fit = match family {
        GlmFamily::GaussianIdentity if rss_or_deviance == 0.0 => PERFECT_FIT_FLOOR,
        GlmFamily::GaussianIdentity => nf * libm::log(rss_or_deviance / nf),
        _ => rss_or_deviance,
    };
    Ok(fit + penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DesignMatrix {
        let data = (0..n * r).map(|_| rng.random_range(-1.0..1.0)).collect();
        DesignMatrix::from_col_major(n, r, data).unwrap()
    }

    /// Normal-equations oracle via Gauss-Jordan on X^T X.
    fn normal_equations(x: &DesignMatrix, y: &[f64]) -> Vec<f64> {
        let r = x.cols();
        let mut m = vec![vec![0.0; r + 1]; r];
        for i in 0..r {
            for j in 0..r {
                m[i][j] = dot(x.column(i), x.column(j));
            }
            m[i][r] = dot(x.column(i), y);
        }
        for k in 0..r {
            let p = (k..r).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
            m.swap(k, p);
            for i in 0..r {
                if i != k {
                    let f = m[i][k] / m[k][k];
                    for j in k..=r {
                        m[i][j] -= f * m[k][j];
                    }
                }
            }
        }
        (0..r).map(|i| m[i][r] / m[i][i]).collect()
    }

    #[test]
    fn intercept_only_is_the_mean() {
        let x = DesignMatrix::from_columns(&[vec![1.0; 3]]).unwrap();
        let fit = least_squares(&x, &[1.0, 2.0, 3.0]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-14);
        assert!((fit.rss_or_deviance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_interpolates() {
        let x = DesignMatrix::from_row_major(3, 3, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let y = [4.0, -1.0, 0.0];
        let fit = least_squares(&x, &y).unwrap();
        for (b, v) in fit.coefficients.iter().zip(&y) {
            assert!((b - v).abs() < 1e-14);
        }
        assert_eq!(fit.rss_or_deviance, 0.0);
    }

    #[test]
    fn matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let x = random_matrix(&mut rng, 20, 4);
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let fit = least_squares(&x, &y).unwrap();
        let oracle = normal_equations(&x, &y);
        for (a, b) in fit.coefficients.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn collinear_columns_are_rank_deficient() {
        let c = vec![1.0, 2.0, 3.0, 4.0];
        let x = DesignMatrix::from_columns(&[vec![1.0; 4], c.clone(), c.iter().map(|v| 2.0 * v).collect()]).unwrap();
        assert!(matches!(least_squares(&x, &[1.0, 0.0, 2.0, 1.0]), Err(Error::RankDeficient { .. })));
        let wide = DesignMatrix::from_columns(&[vec![1.0, 2.0], vec![3.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(least_squares(&wide, &[1.0, 2.0]), Err(Error::RankDeficient { .. })));
        let zero = DesignMatrix::from_columns(&[vec![1.0; 3], vec![0.0; 3]]).unwrap();
        assert!(matches!(least_squares(&zero, &[1.0, 2.0, 3.0]), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DesignMatrix::from_col_major(0, 1, vec![]).is_err());
        assert!(DesignMatrix::from_col_major(2, 1, vec![1.0, f64::NAN]).is_err());
        let x = DesignMatrix::from_columns(&[vec![1.0; 3]]).unwrap();
        assert!(matches!(least_squares(&x, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gaussian_glm_equals_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 30, 3);
        let y: Vec<f64> = (0..30).map(|_| rng.random_range(-2.0..2.0)).collect();
        assert_eq!(glm_fit(&x, &y, GlmFamily::GaussianIdentity).unwrap(), least_squares(&x, &y).unwrap());
    }

    #[test]
    fn binomial_intercept_is_logit_of_proportion() {
        let x = DesignMatrix::from_columns(&[vec![1.0; 10]]).unwrap();
        let y = [1., 1., 1., 1., 1., 1., 1., 0., 0., 0.];
        let fit = glm_fit(&x, &y, GlmFamily::BinomialLogit).unwrap();
        assert!((fit.coefficients[0] - libm::log(0.7 / 0.3)).abs() < 1e-6);
        assert!((fit.coefficients[0] - 0.8473).abs() < 1e-4);
    }

    #[test]
    fn poisson_intercept_is_log_mean() {
        let x = DesignMatrix::from_columns(&[vec![1.0; 6]]).unwrap();
        let y = [1., 3., 5., 2., 4., 3.];
        let fit = glm_fit(&x, &y, GlmFamily::PoissonLog).unwrap();
        assert!((fit.coefficients[0] - libm::log(3.0)).abs() < 1e-6);
    }

    #[test]
    fn glm_response_support_is_checked() {
        let x = DesignMatrix::from_columns(&[vec![1.0; 3]]).unwrap();
        assert!(glm_fit(&x, &[0.0, 2.0, 1.0], GlmFamily::BinomialLogit).is_err());
        assert!(glm_fit(&x, &[0.5, 2.0, 1.0], GlmFamily::PoissonLog).is_err());
    }

    #[test]
    fn separated_logistic_drives_deviance_to_zero() {
        let x = DesignMatrix::from_columns(&[vec![1.0; 6], vec![-3., -2., -1., 1., 2., 3.]]).unwrap();
        let y = [0., 0., 0., 1., 1., 1.];
        match glm_fit(&x, &y, GlmFamily::BinomialLogit) {
            Ok(fit) => {
                assert!(fit.rss_or_deviance < 1e-6 && fit.rss_or_deviance.is_finite());
                assert!(fit.coefficients[1] > 5.0);
            }
            Err(e) => assert!(matches!(e, Error::NonConverged { .. })),
        }
    }

    #[test]
    fn logistic_matches_known_fit() {
        // Overlapping classes: the MLE exists. Check the score equations X^T(y - mu) = 0.
        let xs = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5];
        let y = [0., 0., 1., 0., 1., 0., 1., 1., 0., 1.];
        let x = DesignMatrix::from_columns(&[vec![1.0; 10], xs.to_vec()]).unwrap();
        let fit = glm_fit(&x, &y, GlmFamily::BinomialLogit).unwrap();
        let mu: Vec<f64> = x.mul_vec(&fit.coefficients).iter().map(|&e| GlmFamily::BinomialLogit.mean(e)).collect();
        let resid: Vec<f64> = y.iter().zip(&mu).map(|(a, b)| a - b).collect();
        for g in x.tr_mul_vec(&resid) {
            assert!(g.abs() < 1e-6, "score {g}");
        }
        assert!((fit.rss_or_deviance - GlmFamily::BinomialLogit.deviance(&y, &mu)).abs() < 1e-12);
    }

    #[test]
    fn information_criteria_values() {
        let g = GlmFamily::GaussianIdentity;
        let bic = info_criterion(100, 100.0, 3, IcKind::Bic, g).unwrap();
        assert!((bic - 3.0 * libm::log(100.0)).abs() < 1e-12);
        assert!((bic - 13.815_510_557_964_274).abs() < 1e-12);
        assert_eq!(info_criterion(50, 50.0, 0, IcKind::Bic, g).unwrap(), 0.0);
        assert!((info_criterion(100, 100.0, 3, IcKind::Aic, g).unwrap() - 6.0).abs() < 1e-12);
        let aicc = info_criterion(100, 100.0, 3, IcKind::Aicc, g).unwrap();
        assert!((aicc - (6.0 + 24.0 / 96.0)).abs() < 1e-12);
        assert!(matches!(info_criterion(4, 1.0, 3, IcKind::Aicc, g), Err(Error::Infeasible(_))));
        let floor = info_criterion(100, 0.0, 3, IcKind::Bic, g).unwrap();
        assert_eq!(floor, PERFECT_FIT_FLOOR + 3.0 * libm::log(100.0));
        let glm = info_criterion(100, 42.0, 2, IcKind::Bic, GlmFamily::PoissonLog).unwrap();
        assert!((glm - (42.0 + 2.0 * libm::log(100.0))).abs() < 1e-12);
    }

    #[test]
    fn criteria_increase_with_r() {
        for kind in [IcKind::Bic, IcKind::Aic] {
            let mut prev = f64::NEG_INFINITY;
            for r in 1..20 {
                let v = info_criterion(100, 37.0, r, kind, GlmFamily::GaussianIdentity).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn residuals_are_orthogonal(seed in 0u64..10_000, n in 5usize..40, r in 1usize..5) {
            proptest::prop_assume!(n >= r);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_matrix(&mut rng, n, r);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let fit = least_squares(&x, &y).unwrap();
            let fitted = x.mul_vec(&fit.coefficients);
            let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
            let lhs = x.tr_mul_vec(&resid).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let rhs = x.tr_mul_vec(&y).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            proptest::prop_assert!(lhs <= 1e-8 * (1.0 + rhs));
            let direct: f64 = resid.iter().map(|v| v * v).sum();
            proptest::prop_assert!((direct - fit.rss_or_deviance).abs() <= 1e-9 * (1.0 + direct));
        }

        #[test]
        fn adding_a_column_never_increases_rss(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 25;
            let x = random_matrix(&mut rng, n, 4);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let small = x.select_columns(&[0, 1, 2], false).unwrap();
            let a = least_squares(&small, &y).unwrap().rss_or_deviance;
            let b = least_squares(&x, &y).unwrap().rss_or_deviance;
            proptest::prop_assert!(b <= a * (1.0 + 1e-12) + 1e-12);
        }
    }
}
