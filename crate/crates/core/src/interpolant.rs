//! Kernel interpolation and regression: Gram assembly, the regularized
//! solve `(alpha I + K) Lambda = Y`, evaluation of the fitted function and
//! its derivatives, native-space diagnostics and the GPR variance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::cloud::{displacement_into, PointCloud};
use crate::error::{Error, Result};
use crate::kernels::{Jet, KernelSpec};

/// Relative jitter levels tried, in order, when the first Cholesky attempt
/// fails. Scaled by `tr(K) / m`.
pub const JITTER_LEVELS: [f64; 3] = [1e-14, 1e-12, 1e-10];

/// Diagnostics of a regularized solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    /// Absolute diagonal shift added on top of `alpha`.
    pub jitter_added: f64,
    pub cholesky_attempts: usize,
    /// `|(alpha I + K) Lambda - Y| / |Y|` for the requested (unjittered)
    /// system; absolute when `Y = 0`.
    pub residual_norm: f64,
}

/// A fitted interpolant or regressor `u(x) = sum_k lambda_k K(x - x_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    spec: KernelSpec,
    centers: PointCloud,
    coefficients: DVector<f64>,
    alpha: f64,
}

/// Cholesky factor of `(alpha + jitter) I + K(X, X)`.
pub struct Factorization {
    chol: Cholesky<f64, Dyn>,
    pub report_jitter: f64,
    pub attempts: usize,
}

impl Factorization {
    /// Factors `alpha I + gram`, escalating jitter on failure.
    pub fn new(gram: &DMatrix<f64>, alpha: f64) -> Result<Self> {
        let m = gram.nrows();
        let mean_diag = gram.trace() / m as f64;
        let shifts = std::iter::once(0.0).chain(JITTER_LEVELS.iter().map(|l| l * mean_diag));
        let mut attempts = 0;
        for jitter in shifts {
            attempts += 1;
            let mut a = gram.clone();
            for i in 0..m {
                a[(i, i)] += alpha + jitter;
            }
            if let Some(chol) = Cholesky::new(a) {
                return Ok(Factorization { chol, report_jitter: jitter, attempts });
            }
        }
        Err(Error::IllConditioned { attempts })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    pub fn solve_matrix_mut(&self, rhs: &mut DMatrix<f64>) {
        self.chol.solve_mut(rhs);
    }
}

/// Gram matrix `K(X, X)`; exactly symmetric by construction.
pub fn gram(spec: &KernelSpec, cloud: &PointCloud) -> DMatrix<f64> {
    let m = cloud.len();
    let k0 = spec.value_at_origin();
    let mut g = DMatrix::from_element(m, m, k0);
    let mut dx = vec![0.0; cloud.dim()];
    for j in 0..m {
        for k in (j + 1)..m {
            displacement_into(cloud.point(j), cloud.point(k), &mut dx);
            let v = spec.value(&dx);
            g[(j, k)] = v;
            g[(k, j)] = v;
        }
    }
    g
}

/// Cross-kernel matrix `K(points, centers)`, one row per point.
pub fn cross_gram(spec: &KernelSpec, points: &PointCloud, centers: &PointCloud) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(points.len(), centers.len());
    let mut dx = vec![0.0; centers.dim()];
    for (r, p) in points.iter().enumerate() {
        for (c, q) in centers.iter().enumerate() {
            displacement_into(p, q, &mut dx);
            out[(r, c)] = spec.value(&dx);
        }
    }
    out
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must be finite and nonnegative, got {alpha}")))
    }
}

/// Fits `u = K(., X) Lambda` with `(alpha I + K(X, X)) Lambda = Y`.
pub fn fit(spec: &KernelSpec, cloud: &PointCloud, values: &[f64], alpha: f64) -> Result<(Model, SolveReport)> {
    spec.validate()?;
    check_alpha(alpha)?;
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if values.len() != cloud.len() {
        return Err(Error::LengthMismatch { expected: cloud.len(), got: values.len() });
    }
    let k = gram(spec, cloud);
    let factor = Factorization::new(&k, alpha)?;
    let y = DVector::from_column_slice(values);
    let mut lambda = factor.solve(&y);

    // One step of iterative refinement against the factored system.
    let shift = alpha + factor.report_jitter;
    let r = &y - (&k * &lambda + &lambda * shift);
    lambda += factor.solve(&r);

    let requested = &k * &lambda + &lambda * alpha - &y;
    let y_norm = y.norm();
    let residual_norm = if y_norm > 0.0 { requested.norm() / y_norm } else { requested.norm() };

    let report = SolveReport { jitter_added: factor.report_jitter, cholesky_attempts: factor.attempts, residual_norm };
    let model = Model { spec: *spec, centers: cloud.clone(), coefficients: lambda, alpha };
    Ok((model, report))
}

impl Model {
    /// Assembles a model from explicit coefficients.
    pub fn from_parts(spec: KernelSpec, centers: PointCloud, coefficients: Vec<f64>, alpha: f64) -> Result<Self> {
        spec.validate()?;
        check_alpha(alpha)?;
        if coefficients.len() != centers.len() {
            return Err(Error::LengthMismatch { expected: centers.len(), got: coefficients.len() });
        }
        Ok(Model { spec, centers, coefficients: DVector::from_vec(coefficients), alpha })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn centers(&self) -> &PointCloud {
        &self.centers
    }

    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.centers.dim()
    }

    /// Same centers and kernel with coefficients replaced.
    pub fn with_coefficients(&self, coefficients: DVector<f64>) -> Result<Self> {
        if coefficients.len() != self.centers.len() {
            return Err(Error::LengthMismatch { expected: self.centers.len(), got: coefficients.len() });
        }
        Ok(Model { coefficients, ..self.clone() })
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate_jet(x, 0)?.value)
    }

    /// `u(x)` and its exact gradient and Hessian up to `order`.
    pub fn evaluate_jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        self.check_point(x)?;
        let mut jet = Jet::zeros(self.dim());
        let mut dx = vec![0.0; self.dim()];
        for (c, &lambda) in self.centers.iter().zip(self.coefficients.iter()) {
            displacement_into(x, c, &mut dx);
            self.spec.accumulate_jet(&dx, order, lambda, &mut jet)?;
        }
        Ok(jet)
    }

    pub fn evaluate_many(&self, points: &PointCloud) -> Result<Vec<f64>> {
        points.iter().map(|p| self.evaluate(p)).collect()
    }

    /// `|u|^2` in the native space: `Lambda^T K(X, X) Lambda`.
    pub fn rkhs_norm_sq(&self) -> f64 {
        let k = gram(&self.spec, &self.centers);
        let q = self.coefficients.dot(&(&k * &self.coefficients));
        q.max(0.0)
    }

    /// Regression objective `E_alpha(u) = (|u|^2 + |u(X) - Y|^2 / alpha) / 2`
    /// and the squared misfit `|u(X) - Y|^2`.
    pub fn objective(&self, cloud: &PointCloud, values: &[f64], alpha: f64) -> Result<(f64, f64)> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("objective needs alpha > 0, got {alpha}")));
        }
        if values.len() != cloud.len() {
            return Err(Error::LengthMismatch { expected: cloud.len(), got: values.len() });
        }
        let fitted = self.evaluate_many(cloud)?;
        let misfit: f64 = fitted.iter().zip(values).map(|(u, y)| (u - y) * (u - y)).sum();
        Ok((0.5 * (self.rkhs_norm_sq() + misfit / alpha), misfit))
    }
}

/// Posterior variance of the GP with covariance `K` and noise `sigma2`:
/// `K(x,x) + sigma2 - K(x,X) [sigma2 + K(X,X)]^{-1} K(X,x)`.
pub fn gpr_variance(spec: &KernelSpec, cloud: &PointCloud, x: &[f64], sigma2: f64) -> Result<f64> {
    GprPosterior::new(spec, cloud, sigma2)?.variance(x)
}

/// Factored GP posterior, for evaluating the variance at many points.
pub struct GprPosterior {
    spec: KernelSpec,
    cloud: PointCloud,
    sigma2: f64,
    factor: Option<Factorization>,
}

impl GprPosterior {
    pub fn new(spec: &KernelSpec, cloud: &PointCloud, sigma2: f64) -> Result<Self> {
        spec.validate()?;
        check_alpha(sigma2)?;
        let factor = if cloud.is_empty() { None } else { Some(Factorization::new(&gram(spec, cloud), sigma2)?) };
        Ok(GprPosterior { spec: *spec, cloud: cloud.clone(), sigma2, factor })
    }

    pub fn variance(&self, x: &[f64]) -> Result<f64> {
        let prior = self.spec.value_at_origin() + self.sigma2;
        let Some(factor) = &self.factor else { return Ok(prior) };
        if x.len() != self.cloud.dim() {
            return Err(Error::DimensionMismatch { expected: self.cloud.dim(), got: x.len() });
        }
        let mut dx = vec![0.0; x.len()];
        let kx = DVector::from_iterator(
            self.cloud.len(),
            self.cloud.iter().map(|c| {
                displacement_into(x, c, &mut dx);
                self.spec.value(&dx)
            }),
        );
        let v = prior - kx.dot(&factor.solve(&kx));
        if v < 0.0 && v > -1e-12 {
            Ok(0.0)
        } else {
            Ok(v)
        }
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    kernel: String,
    alpha: f64,
    dim: usize,
    centers: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
}

/// Serializes a model as a versioned JSON document. Floats are written in
/// shortest round-trip form, so [`deserialize`] restores them bit-exactly.
pub fn serialize(model: &Model) -> String {
    let file = ModelFile {
        version: MODEL_FORMAT_VERSION,
        kernel: model.spec.to_string(),
        alpha: model.alpha,
        dim: model.dim(),
        centers: model.centers.iter().map(|p| p.to_vec()).collect(),
        coefficients: model.coefficients.iter().copied().collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
}

pub fn deserialize(text: &str) -> Result<Model> {
    let bad = |msg: String| Error::MalformedModelFile(msg);
    let file: ModelFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if file.version != MODEL_FORMAT_VERSION {
        return Err(bad(format!("unsupported version {}", file.version)));
    }
    let spec: KernelSpec = file.kernel.parse().map_err(|e: Error| bad(e.to_string()))?;
    if file.dim == 0 {
        return Err(bad("dim must be positive".into()));
    }
    if let Some(p) = file.centers.iter().find(|p| p.len() != file.dim) {
        return Err(bad(format!("center of dimension {} in a model of dimension {}", p.len(), file.dim)));
    }
    let coords = file.centers.concat();
    let centers = PointCloud::new(file.dim, coords).map_err(|e| bad(e.to_string()))?;
    Model::from_parts(spec, centers, file.coefficients, file.alpha).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss() -> KernelSpec {
        KernelSpec::Gauss { length_scale: 1.0 }
    }

    fn random_cloud(rng: &mut ChaCha8Rng, m: usize, d: usize) -> PointCloud {
        let coords = (0..m * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        PointCloud::new(d, coords).unwrap()
    }

    #[test]
    fn gram_small_cases() {
        let one = PointCloud::from_points(&[[0.3]]).unwrap();
        assert_eq!(gram(&gauss(), &one), DMatrix::from_element(1, 1, 1.0));
        let two = PointCloud::from_points(&[[0.0], [1.0]]).unwrap();
        let g = gram(&gauss(), &two);
        let e = (-0.5f64).exp();
        assert_eq!(g[(0, 0)], 1.0);
        assert_eq!(g[(1, 1)], 1.0);
        assert!((g[(0, 1)] - e).abs() < 1e-16);
        assert_eq!(g[(0, 1)], g[(1, 0)]);
    }

    #[test]
    fn random_gram_is_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cloud = random_cloud(&mut rng, 20, 3);
        let g = gram(&KernelSpec::RegularizedLaplace { epsilon: 1.0 }, &cloud);
        assert!(g.clone().cholesky().is_some());
        assert_eq!(g, g.transpose());
    }

    #[test]
    fn fit_small_systems() {
        let one = PointCloud::from_points(&[[0.0]]).unwrap();
        let (m, r) = fit(&gauss(), &one, &[1.0], 0.0).unwrap();
        assert_eq!(m.coefficients()[0], 1.0);
        assert_eq!(r.jitter_added, 0.0);
        assert_eq!(r.cholesky_attempts, 1);
        let (m, _) = fit(&gauss(), &one, &[1.0], 1.0).unwrap();
        assert_eq!(m.coefficients()[0], 0.5);

        // Cramer's rule on [[1, e], [e, 1]] L = (1, 0).
        let two = PointCloud::from_points(&[[0.0], [1.0]]).unwrap();
        let (m, r) = fit(&gauss(), &two, &[1.0, 0.0], 0.0).unwrap();
        let e = (-0.5f64).exp();
        let det = 1.0 - e * e;
        assert!((m.coefficients()[0] - 1.0 / det).abs() < 1e-14);
        assert!((m.coefficients()[1] + e / det).abs() < 1e-14);
        assert!(r.residual_norm < 1e-10);
    }

    #[test]
    fn fit_rejects_bad_inputs() {
        let two = PointCloud::from_points(&[[0.0], [1.0]]).unwrap();
        assert!(matches!(fit(&gauss(), &two, &[1.0], 0.0), Err(Error::LengthMismatch { .. })));
        assert!(matches!(fit(&gauss(), &two, &[1.0, 1.0], -1.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn jitter_escalation_on_nearly_singular_gram() {
        // Gauss with a huge length scale makes every entry ~1.
        let spec = KernelSpec::Gauss { length_scale: 1e4 };
        let cloud = PointCloud::new(1, (0..30).map(|i| i as f64 * 1e-3).collect()).unwrap();
        match fit(&spec, &cloud, &vec![1.0; 30], 0.0) {
            Ok((_, r)) => {
                assert!(r.cholesky_attempts > 1);
                assert!(r.jitter_added > 0.0);
            }
            Err(e) => assert!(matches!(e, Error::IllConditioned { attempts: 4 })),
        }
    }

    #[test]
    fn interpolation_reproduces_data_and_decays() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cloud = random_cloud(&mut rng, 25, 2);
        let y: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (m, _) = fit(&KernelSpec::RegularizedLaplace { epsilon: 1.0 }, &cloud, &y, 0.0).unwrap();
        for (p, yv) in cloud.iter().zip(&y) {
            assert!((m.evaluate(p).unwrap() - yv).abs() < 1e-8);
        }

        let single = PointCloud::from_points(&[[0.0, 0.0]]).unwrap();
        let (m, _) = fit(&gauss(), &single, &[2.0], 0.0).unwrap();
        let far = m.evaluate(&[30.0, 0.0]).unwrap();
        assert!(far.abs() <= 1e-100 * 2.0);
    }

    #[test]
    fn model_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cloud = random_cloud(&mut rng, 15, 3);
        let y: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (m, _) = fit(&KernelSpec::RegularizedLaplace { epsilon: 0.5 }, &cloud, &y, 1e-3).unwrap();
        let x = [0.1, -0.2, 0.3];
        let jet = m.evaluate_jet(&x, 1).unwrap();
        let h = 1e-5;
        for i in 0..3 {
            let mut p = x;
            let mut q = x;
            p[i] += h;
            q[i] -= h;
            let fd = (m.evaluate(&p).unwrap() - m.evaluate(&q).unwrap()) / (2.0 * h);
            assert!((jet.gradient[i] - fd).abs() <= 1e-6 * fd.abs().max(1e-3), "{i}: {} vs {fd}", jet.gradient[i]);
        }
    }

    #[test]
    fn rkhs_norm_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cloud = random_cloud(&mut rng, 10, 2);
        let spec = KernelSpec::RegularizedLaplace { epsilon: 1.0 };
        let zero = Model::from_parts(spec, cloud.clone(), vec![0.0; 10], 0.0).unwrap();
        assert_eq!(zero.rkhs_norm_sq(), 0.0);

        let single =
            Model::from_parts(gauss(), PointCloud::from_points(&[[0.0, 0.0]]).unwrap(), vec![1.0], 0.0).unwrap();
        assert_eq!(single.rkhs_norm_sq(), 1.0);

        let lambda: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let model = Model::from_parts(spec, cloud.clone(), lambda.clone(), 0.0).unwrap();
        let mut naive = 0.0;
        for j in 0..10 {
            for k in 0..10 {
                let d: Vec<f64> = cloud.point(j).iter().zip(cloud.point(k)).map(|(a, b)| a - b).collect();
                naive += lambda[j] * lambda[k] * spec.value(&d);
            }
        }
        assert!((model.rkhs_norm_sq() - naive).abs() < 1e-12 * naive.abs().max(1.0));
    }

    #[test]
    fn objective_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = KernelSpec::RegularizedLaplace { epsilon: 1.0 };
        let cloud = random_cloud(&mut rng, 8, 2);
        let y: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();

        let (exact, _) = fit(&spec, &cloud, &y, 0.0).unwrap();
        let (_, misfit) = exact.objective(&cloud, &y, 0.3).unwrap();
        assert!(misfit <= 1e-16);

        let zero = Model::from_parts(spec, cloud.clone(), vec![0.0; 8], 0.0).unwrap();
        let (e, _) = zero.objective(&cloud, &y, 0.5).unwrap();
        let y2: f64 = y.iter().map(|v| v * v).sum();
        assert!((e - y2 / (2.0 * 0.5)).abs() < 1e-14);

        let alpha = 0.2;
        let (best, _) = fit(&spec, &cloud, &y, alpha).unwrap();
        let (e_best, _) = best.objective(&cloud, &y, alpha).unwrap();
        for _ in 0..100 {
            let scale = rng.random_range(1e-4..1e-1);
            let perturbed = best.coefficients().map(|c| c + scale * rng.random_range(-1.0..1.0));
            let other = best.with_coefficients(perturbed).unwrap();
            let (e, _) = other.objective(&cloud, &y, alpha).unwrap();
            assert!(e_best <= e + 1e-12);
        }
        assert!(zero.objective(&cloud, &y, 0.0).is_err());
    }

    #[test]
    fn gpr_variance_cases() {
        let spec = KernelSpec::RegularizedLaplace { epsilon: 1.0 };
        let empty = PointCloud::empty(2);
        let v = gpr_variance(&spec, &empty, &[0.3, 0.1], 0.25).unwrap();
        assert!((v - ((-1.0f64).exp() + 0.25)).abs() < 1e-16);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cloud = random_cloud(&mut rng, 3, 2);
        let v0 = gpr_variance(&spec, &cloud, cloud.point(1), 0.0).unwrap();
        assert!(v0.abs() < 1e-12);

        // Direct dense formula with an LU solve.
        let sigma2 = 0.1;
        let x = [0.2, -0.4];
        let mut a = gram(&spec, &cloud);
        for i in 0..3 {
            a[(i, i)] += sigma2;
        }
        let kx = DVector::from_iterator(3, cloud.iter().map(|c| spec.value(&[x[0] - c[0], x[1] - c[1]])));
        let sol = a.lu().solve(&kx).unwrap();
        let direct = spec.value(&[0.0, 0.0]) + sigma2 - kx.dot(&sol);
        let v = gpr_variance(&spec, &cloud, &x, sigma2).unwrap();
        assert!((v - direct).abs() < 1e-14);
    }

    #[test]
    fn model_file_round_trip_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cloud = random_cloud(&mut rng, 12, 3);
        let y: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (m, _) = fit(&KernelSpec::RegularizedLaplace { epsilon: 0.7 }, &cloud, &y, 1e-3).unwrap();
        let text = serialize(&m);
        let back = deserialize(&text).unwrap();
        assert_eq!(back, m);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert_eq!(m.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
        }

        let truncated = &text[..text.len() / 2];
        assert!(matches!(deserialize(truncated), Err(Error::MalformedModelFile(_))));

        let wrong_dim = text.replacen("\"dim\": 3", "\"dim\": 2", 1);
        assert!(matches!(deserialize(&wrong_dim), Err(Error::MalformedModelFile(_))));

        let wrong_version = text.replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(matches!(deserialize(&wrong_version), Err(Error::MalformedModelFile(_))));
    }
}
