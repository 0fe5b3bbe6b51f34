//! Sampling primitives: Dirichlet, categorical over log-weights, and the
//! Gaussian / inverse-Wishart pair used for conjugate component updates.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Draw from Dir(alpha) by normalising independent Gamma(alpha_k, 1) draws.
///
/// With very small concentrations every Gamma draw can underflow to zero; the
/// mass then goes to a uniformly chosen index among the largest alphas.
pub fn sample_dirichlet<R: Rng + ?Sized>(alpha: &[f64], rng: &mut R) -> Vec<f64> {
    let mut draws: Vec<f64> = alpha
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive concentration").sample(rng))
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.iter_mut().for_each(|x| *x /= total);
        return draws;
    }
    let max = alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tops: Vec<usize> = (0..alpha.len()).filter(|&i| alpha[i] == max).collect();
    let pick = tops[rng.random_range(0..tops.len())];
    draws.iter_mut().enumerate().for_each(|(i, x)| *x = f64::from(u8::from(i == pick)));
    draws
}

/// Sample an index with probability proportional to `exp(log_w)`.
pub fn sample_log_categorical<R: Rng + ?Sized>(log_w: &[f64], rng: &mut R) -> usize {
    let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return rng.random_range(0..log_w.len());
    }
    let w: Vec<f64> = log_w.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &x) in w.iter().enumerate() {
        if u < x {
            return i;
        }
        u -= x;
    }
    // Rounding left u just past the last bucket.
    w.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

/// `ln(x)` floored so a zero probability yields a large negative number, not -inf.
pub fn ln_floor(x: f64) -> f64 {
    x.max(f64::MIN_POSITIVE).ln()
}

/// A multivariate Gaussian with its Cholesky factor cached for densities.
#[derive(Debug, Clone)]
pub struct Gaussian {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl Gaussian {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, String> {
        if mean.len() != cov.nrows() || !cov.is_square() {
            return Err(format!(
                "mean has {} entries but covariance is {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            ));
        }
        if cov.iter().any(|x| !x.is_finite()) {
            return Err("covariance has non-finite entries".into());
        }
        let chol = Cholesky::new(cov.clone()).ok_or("covariance is not positive-definite")?;
        Ok(Self { mean, cov, chol })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn cholesky_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn log_density(&self, x: &DVector<f64>) -> f64 {
        let l = self.chol.l_dirty();
        let diff = x - &self.mean;
        let y = l
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has a positive diagonal");
        let log_det: f64 = (0..self.dim()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
        -0.5 * (self.dim() as f64 * LN_2PI + log_det + y.norm_squared())
    }
}

/// Gaussian–inverse-Wishart parameters (mean, kappa, scale matrix, dof).
#[derive(Debug, Clone, PartialEq)]
pub struct GiwParams {
    pub mean: DVector<f64>,
    pub kappa: f64,
    pub psi: DMatrix<f64>,
    pub nu: f64,
}

impl GiwParams {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<(), String> {
        let d = self.dim();
        if d == 0 {
            return Err("zero-dimensional prior".into());
        }
        if self.psi.nrows() != d || self.psi.ncols() != d {
            return Err(format!("psi must be {d}x{d}"));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(format!("kappa0 must be positive, got {}", self.kappa));
        }
        if !(self.nu.is_finite() && self.nu > d as f64 - 1.0) {
            return Err(format!("nu0 must exceed dim - 1 = {}, got {}", d - 1, self.nu));
        }
        if self.psi.transpose() != self.psi || Cholesky::new(self.psi.clone()).is_none() {
            return Err("psi must be symmetric positive-definite".into());
        }
        Ok(())
    }

    /// Conjugate update with the observations `data`.
    pub fn posterior<'a>(&self, data: impl IntoIterator<Item = &'a DVector<f64>>) -> GiwParams {
        let data: Vec<&DVector<f64>> = data.into_iter().collect();
        if data.is_empty() {
            return self.clone();
        }
        let n = data.len() as f64;
        let d = self.dim();
        let mut xbar = DVector::zeros(d);
        for x in &data {
            xbar += *x;
        }
        xbar /= n;
        let mut scatter = DMatrix::zeros(d, d);
        for x in &data {
            let c = *x - &xbar;
            scatter.ger(1.0, &c, &c, 1.0);
        }
        let kappa = self.kappa + n;
        let dm = &xbar - &self.mean;
        let mut psi = &self.psi + scatter;
        psi.ger(self.kappa * n / kappa, &dm, &dm, 1.0);
        // Keep exact symmetry so the Cholesky factorisation is well-posed.
        psi = (&psi + psi.transpose()) * 0.5;
        GiwParams {
            mean: (&self.mean * self.kappa + xbar * n) / kappa,
            kappa,
            psi,
            nu: self.nu + n,
        }
    }

    /// Draw (mean, covariance): Σ ~ IW(psi, nu), then mean ~ N(mean, Σ / kappa).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Gaussian, String> {
        let cov = sample_inverse_wishart(&self.psi, self.nu, rng)?;
        let l = Cholesky::new(cov.clone())
            .ok_or("sampled covariance is not positive-definite")?
            .l();
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let mean = &self.mean + l * z / self.kappa.sqrt();
        Gaussian::new(mean, cov)
    }
}

/// Σ ~ IW(psi, nu) via the Bartlett decomposition.
///
/// With psi = L Lᵀ and Bartlett factor A (A Aᵀ ~ Wishart(I, nu)), the draw is
/// Σ = (L A⁻ᵀ)(L A⁻ᵀ)ᵀ, which needs only triangular solves.
pub fn sample_inverse_wishart<R: Rng + ?Sized>(
    psi: &DMatrix<f64>,
    nu: f64,
    rng: &mut R,
) -> Result<DMatrix<f64>, String> {
    let d = psi.nrows();
    if nu.is_nan() || nu <= d as f64 - 1.0 {
        return Err(format!("degrees of freedom {nu} must exceed {}", d as f64 - 1.0));
    }
    let l = Cholesky::new(psi.clone())
        .ok_or("scale matrix is not positive-definite")?
        .l();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new(nu - i as f64).map_err(|e| e.to_string())?;
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let a_inv = a
        .solve_lower_triangular(&DMatrix::identity(d, d))
        .ok_or("degenerate Bartlett factor")?;
    let m = l * a_inv.transpose();
    let sigma = &m * m.transpose();
    if sigma.iter().any(|x| !x.is_finite()) {
        return Err("inverse-Wishart draw overflowed".into());
    }
    Ok((&sigma + sigma.transpose()) * 0.5)
}
