//! Dense symmetric linear algebra: Cholesky, conjugate gradients, extreme
//! eigenpairs by power / inverse iteration and a cyclic Jacobi eigensolver
//! used as an oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Square matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Builds a matrix from row slices; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::Shape {
                    expected: n,
                    got: r.len(),
                });
            }
        }
        Ok(Self {
            n,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self - shift * I`
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] -= shift;
        }
        m
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Largest Gershgorin row bound `max_i sum_j |a_ij|`.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Anything that can be handed to the solvers: a plain matrix, or a grid
/// operator whose vectors live in the `h`-weighted inner product.
pub trait SymmetricOperator {
    fn matrix(&self) -> &DenseMatrix;

    /// Weight of the inner product `<v, w> = weight * sum v_i w_i` used to
    /// normalize eigenvectors.
    fn inner_weight(&self) -> f64 {
        1.0
    }
}

impl SymmetricOperator for DenseMatrix {
    fn matrix(&self) -> &DenseMatrix {
        self
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape { expected, got })
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // row-major lower triangle, full n*n storage for simple indexing
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let row_j = &l[j * n..j * n + j];
            let mut d = a.get(j, j) - dot(row_j, row_j);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / d;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s = b[i] - dot(&self.l[i * n..i * n + i], &y[..i]);
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i] * yk;
            }
            y[i] = s / self.l[i * n + i];
        }
        Ok(y)
    }
}

/// Solve `A u = b` by Cholesky factorization.
pub fn cholesky_solve<A: SymmetricOperator + ?Sized>(a: &A, b: &[f64]) -> Result<Vec<f64>> {
    Cholesky::factor(a.matrix())?.solve(b)
}

/// Outcome of a conjugate-gradient run. Non-convergence is reported here,
/// not as an error.
#[derive(Debug, Clone)]
pub struct CgReport {
    pub solution: Vec<f64>,
    /// final relative residual `‖b - A x‖ / ‖b‖`
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Conjugate gradients with a Jacobi (diagonal) preconditioner.
pub fn cg_solve<A: SymmetricOperator + ?Sized>(
    a: &A,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgReport> {
    let m = a.matrix();
    let n = m.dim();
    check_len(n, b.len())?;
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "cg tolerance must be positive, got {tol}"
        )));
    }
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(CgReport {
            solution: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let inv_diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = m.get(i, i);
            if d > 0.0 {
                1.0 / d
            } else {
                1.0
            }
        })
        .collect();

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut res = 1.0;
    for it in 0..max_iter {
        let ap = m.matvec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NotPositiveDefinite {
                pivot: it,
                value: pap,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r) / bnorm;
        if res <= tol {
            // recompute the true residual to guard against drift in r
            let true_r: Vec<f64> = m.matvec(&x).iter().zip(b).map(|(ax, b)| b - ax).collect();
            res = norm2(&true_r) / bnorm;
            if res <= tol {
                return Ok(CgReport {
                    solution: x,
                    residual: res,
                    iterations: it + 1,
                    converged: true,
                });
            }
            r = true_r;
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok(CgReport {
        solution: x,
        residual: res,
        iterations: max_iter,
        converged: false,
    })
}

/// Eigenpair with the vector normalized in the operator's inner product.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

impl EigenPair {
    /// `‖A v - λ v‖₂ / (|λ| ‖v‖₂)`
    pub fn relative_residual(&self, a: &DenseMatrix) -> f64 {
        let av = a.matvec(&self.vector);
        let r: Vec<f64> = av
            .iter()
            .zip(&self.vector)
            .map(|(x, v)| x - self.value * v)
            .collect();
        norm2(&r) / (self.value.abs() * norm2(&self.vector))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Largest,
    Smallest,
}

const EIG_MAX_ITER: usize = 500;
const START_SEED: u64 = 0x5eed_f00d;

fn rayleigh(a: &DenseMatrix, v: &[f64]) -> (f64, f64) {
    let av = a.matvec(v);
    let vv = dot(v, v);
    let lambda = dot(&av, v) / vv;
    let r: Vec<f64> = av.iter().zip(v).map(|(x, y)| x - lambda * y).collect();
    (lambda, norm2(&r) / (lambda.abs() * vv.sqrt()))
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let nrm = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nrm);
    v
}

fn start_vectors(n: usize) -> [Vec<f64>; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let random: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    [normalized(vec![1.0; n]), normalized(random)]
}

/// Inverse iteration with a fixed SPD factorization. Returns the Rayleigh
/// quotient with respect to `a`, the vector and the relative residual.
fn inverse_iteration(
    a: &DenseMatrix,
    factor: &Cholesky,
    start: Vec<f64>,
    tol: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    let mut v = start;
    let (mut lambda, mut res) = rayleigh(a, &v);
    for _ in 0..EIG_MAX_ITER {
        if res <= tol {
            break;
        }
        let w = factor.solve(&v)?;
        let nrm = norm2(&w);
        if !(nrm.is_finite() && nrm > 0.0) {
            break;
        }
        v = w.into_iter().map(|x| x / nrm).collect();
        (lambda, res) = rayleigh(a, &v);
    }
    Ok((lambda, v, res))
}

fn power_warm_start(a: &DenseMatrix, start: &[f64], steps: usize) -> f64 {
    let mut v = start.to_vec();
    let mut lambda = rayleigh(a, &v).0;
    for _ in 0..steps {
        let w = a.matvec(&v);
        let nrm = norm2(&w);
        if nrm == 0.0 {
            break;
        }
        v = w.into_iter().map(|x| x / nrm).collect();
        lambda = lambda.max(rayleigh(a, &v).0);
    }
    lambda
}

// Relative width (against the Gershgorin scale) to which the extreme
// eigenvalue is bracketed before the final inverse iteration.
const BRACKET_WIDTH: f64 = 1e-12;

/// Shift `σ` next to an extreme eigenvalue such that the shifted matrix
/// (`σI - A` for the largest, `A - σI` for the smallest) has a Cholesky
/// factor. Bisection between `inner` (a Rayleigh quotient, on the wrong side
/// of the eigenvalue) and `outer` (known to factor) keeps the factor of the
/// last admissible shift. Returns `(admissible shift, inner bound, factor)`.
fn certified_shift(
    a: &DenseMatrix,
    which: Extreme,
    inner: f64,
    outer: f64,
) -> Result<(f64, f64, Cholesky)> {
    let shifted = |sigma: f64| match which {
        Extreme::Largest => a.shifted(sigma).scaled(-1.0),
        Extreme::Smallest => a.shifted(sigma),
    };
    let scale = a.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut good = outer;
    let mut factor = Cholesky::factor(&shifted(good))?;
    let mut bad = inner;
    while (good - bad).abs() > BRACKET_WIDTH * scale {
        let mid = 0.5 * (good + bad);
        match Cholesky::factor(&shifted(mid)) {
            Ok(f) => {
                good = mid;
                factor = f;
            }
            Err(_) => bad = mid,
        }
    }
    Ok((good, bad, factor))
}

/// Extreme eigenpair of a symmetric positive definite operator.
///
/// A few power steps (largest) or the Rayleigh quotient of the start vector
/// (smallest) give an inner bound on the wanted eigenvalue; bisection with
/// Cholesky factorizations as the definiteness test then pins a shift just
/// outside the spectrum, and inverse iteration with that shift converges in
/// a handful of steps. Iteration stops on `‖Av - λv‖ ≤ tol |λ| ‖v‖`.
pub fn eig_extreme<A: SymmetricOperator + ?Sized>(
    op: &A,
    which: Extreme,
    tol: f64,
) -> Result<EigenPair> {
    let a = op.matrix();
    let n = a.dim();
    if n == 0 {
        return Err(Error::domain("empty matrix"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    let starts = start_vectors(n);
    let (_, inner, factor) = match which {
        Extreme::Largest => {
            let lower = power_warm_start(a, &starts[1], 20);
            let upper = a.gershgorin_bound() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            certified_shift(a, which, lower, upper)?
        }
        Extreme::Smallest => {
            // A itself must factor; that is the SPD precondition
            let upper = rayleigh(a, &starts[0]).0;
            certified_shift(a, which, upper, 0.0)?
        }
    };
    let slack = 1e-9 * a.gershgorin_bound();
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for start in starts {
        let (lambda, v, res) = inverse_iteration(a, &factor, start, tol)?;
        // a start vector with no component along the wanted eigenvector
        // converges to an interior eigenvalue instead
        let on_target = match which {
            Extreme::Largest => lambda >= inner - slack,
            Extreme::Smallest => lambda <= inner + slack,
        };
        if !on_target {
            continue;
        }
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((lambda, v, res));
        }
        if res <= tol {
            break;
        }
    }
    let (value, v, res) = best.ok_or(Error::NoConvergence {
        method: "extreme eigenpair iteration",
        iterations: EIG_MAX_ITER,
        residual: f64::INFINITY,
    })?;
    if res > tol {
        return Err(Error::NoConvergence {
            method: "extreme eigenpair iteration",
            iterations: EIG_MAX_ITER,
            residual: res,
        });
    }
    let w = op.inner_weight();
    let scale = 1.0 / (w * dot(&v, &v)).sqrt();
    Ok(EigenPair {
        value,
        vector: v.into_iter().map(|x| x * scale).collect(),
    })
}

/// Largest dimension accepted by [`eig_full_jacobi`].
pub const JACOBI_MAX_DIM: usize = 256;

/// Full spectrum by the cyclic Jacobi method, sorted ascending.
pub fn eig_full_jacobi<A: SymmetricOperator + ?Sized>(op: &A) -> Result<Vec<EigenPair>> {
    let src = op.matrix();
    let n = src.dim();
    if n > JACOBI_MAX_DIM {
        return Err(Error::domain(format!(
            "jacobi eigensolver is limited to n <= {JACOBI_MAX_DIM}, got {n}"
        )));
    }
    if !src.is_symmetric() {
        return Err(Error::domain(
            "jacobi eigensolver requires a symmetric matrix",
        ));
    }
    let mut a = src.clone();
    let mut v = DenseMatrix::identity(n);
    let fro = src.frobenius_norm();
    let max_sweeps = 100;
    let mut sweeps = 0;
    loop {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * fro || n < 2 {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence {
                method: "cyclic jacobi",
                iterations: sweeps,
                residual: off / fro,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let w = op.inner_weight();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| v.get(i, j)).collect();
            let scale = 1.0 / (w * dot(&col, &col)).sqrt();
            EigenPair {
                value: a.get(j, j),
                vector: col.into_iter().map(|x| x * scale).collect(),
            }
        })
        .collect();
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}
