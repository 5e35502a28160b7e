//! Uniform interior grids with zero exterior extension, quadrature weights
//! for the integral fractional Laplacian, and dense operator assembly.
//!
//! The fractional operator uses the symmetrized principal-value form
//!
//! ```text
//! (-Δ)^s u(x) = C_{1,s} ∫_0^∞ (2u(x) - u(x+r) - u(x-r)) r^{-1-2s} dr
//! ```
//!
//! The singular cell `r < h` is integrated against a local quadratic
//! interpolant, every other cell `((k-½)h, (k+½)h)` uses the value at the
//! nearest node and the tail beyond the last node telescopes in closed form.
//! All off-diagonal weights are positive, so the assembled matrix is a
//! symmetric Toeplitz M-matrix whose diagonal keeps the exterior mass.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix, SymmetricOperator};
use crate::specfun::frac_constant;

/// Uniform grid of `n` interior nodes on `(x_left, x_right)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_left: f64,
    x_right: f64,
    n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 3;

    pub fn new(x_left: f64, x_right: f64, n: usize) -> Result<Self> {
        if !(x_left.is_finite() && x_right.is_finite() && x_left < x_right) {
            return Err(Error::domain(format!(
                "interval must satisfy x_left < x_right, got ({x_left}, {x_right})"
            )));
        }
        if n < Self::MIN_NODES {
            return Err(Error::domain(format!(
                "grid needs at least {} interior nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { x_left, x_right, n })
    }

    /// `(-1, 1)` with `n` interior nodes.
    pub fn symmetric_unit(n: usize) -> Result<Self> {
        Self::new(-1.0, 1.0, n)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.x_right - self.x_left) / (self.n + 1) as f64
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.x_left + self.x_right)
    }

    /// Coordinate of interior node `i` (0-based, so node `i` sits at
    /// `x_left + (i+1) h`).
    pub fn node(&self, i: usize) -> f64 {
        self.x_left + (i + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction((0..self.n).map(|i| f(self.node(i))).collect())
    }

    /// Node coordinate mapped affinely onto `(-1, 1)`.
    pub fn reference_coordinate(&self, i: usize) -> f64 {
        2.0 * (self.node(i) - self.center()) / self.length()
    }
}

/// Nodal values on the interior nodes; values outside the domain are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self(self.0.iter().map(|v| v * t).collect())
    }

    /// `self + t * other`
    pub fn axpy(&self, t: f64, other: &GridFunction) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.axpy(-1.0, other)
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for GridFunction {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

fn check_len(grid: &Grid, v: &GridFunction) -> Result<()> {
    if v.len() == grid.n() {
        Ok(())
    } else {
        Err(Error::Shape {
            expected: grid.n(),
            got: v.len(),
        })
    }
}

/// Discrete `L²(Ω)` pairing `h Σ v_i w_i`.
pub fn inner_product_h(v: &GridFunction, w: &GridFunction, grid: &Grid) -> Result<f64> {
    check_len(grid, v)?;
    check_len(grid, w)?;
    Ok(grid.h() * dot(&v.0, &w.0))
}

pub fn norm_h(v: &GridFunction, grid: &Grid) -> Result<f64> {
    Ok(inner_product_h(v, v, grid)?.sqrt())
}

/// Quadrature weights of the fractional stencil.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilWeights {
    pub s: f64,
    pub h: f64,
    /// `w[k-1]` is the weight for node offset `k`, `k = 1..=K`.
    pub w: Vec<f64>,
    /// `Σ_{k>K} w_k` in closed form.
    pub tail: f64,
}

impl StencilWeights {
    /// Weight for offset `k >= 1`.
    pub fn weight(&self, k: usize) -> f64 {
        self.w[k - 1]
    }

    pub fn count(&self) -> usize {
        self.w.len()
    }

    /// `Σ_{k≥1} w_k`, finite part plus tail.
    pub fn total(&self) -> f64 {
        // summed from the small end for a reproducible rounding pattern
        self.w.iter().rev().sum::<f64>() + self.tail
    }
}

/// Weights `w_1..w_K` and the tail for order `s` on spacing `h`.
pub fn stencil_weights(s: f64, h: f64, count: usize) -> Result<StencilWeights> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!(
            "grid spacing must be positive, got {h}"
        )));
    }
    if count < 2 {
        return Err(Error::domain(format!(
            "stencil needs at least 2 weights, got {count}"
        )));
    }
    let c = frac_constant(1, s)?.value;
    let two_s = 2.0 * s;
    let scale = h.powf(-two_s);
    let cell = c / two_s * scale;
    // r^{-2s} evaluated at the half-integer cell edges (k ± ½)
    let edge = |k: usize| (k as f64 + 0.5).powf(-two_s);

    let mut w = Vec::with_capacity(count);
    let singular = c * scale / (2.0 - two_s);
    let near = cell * (1.0 - 1.5f64.powf(-two_s));
    w.push(singular + near);
    for k in 2..=count {
        w.push(cell * (edge(k - 1) - edge(k)));
    }
    Ok(StencilWeights {
        s,
        h,
        w,
        tail: cell * edge(count),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorKind {
    Fractional(f64),
    Classical,
}

impl OperatorKind {
    /// Differential order; the classical Laplacian has order one.
    pub fn order(&self) -> f64 {
        match *self {
            OperatorKind::Fractional(s) => s,
            OperatorKind::Classical => 1.0,
        }
    }
}

/// Discrete (fractional or classical) Laplacian on the interior nodes.
#[derive(Debug, Clone)]
pub struct Operator {
    kind: OperatorKind,
    matrix: DenseMatrix,
    grid: Grid,
}

impl Operator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn order(&self) -> f64 {
        self.kind.order()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, v: &GridFunction) -> Result<GridFunction> {
        check_len(&self.grid, v)?;
        Ok(GridFunction(self.matrix.matvec(&v.0)))
    }

    fn from_symbol(
        kind: OperatorKind,
        grid: Grid,
        diag: f64,
        offdiag: impl Fn(usize) -> f64,
    ) -> Self {
        let matrix = DenseMatrix::from_fn(grid.n(), |i, j| {
            if i == j {
                diag
            } else {
                -offdiag(i.abs_diff(j))
            }
        });
        Self { kind, matrix, grid }
    }
}

impl SymmetricOperator for Operator {
    fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    fn inner_weight(&self) -> f64 {
        self.grid.h()
    }
}

/// Dense symmetric Toeplitz matrix of the fractional Laplacian with zero
/// exterior data.
pub fn assemble_fractional(grid: &Grid, s: f64) -> Result<Operator> {
    let weights = stencil_weights(s, grid.h(), grid.n())?;
    let diag = 2.0 * weights.total();
    Ok(Operator::from_symbol(
        OperatorKind::Fractional(s),
        *grid,
        diag,
        |k| weights.weight(k),
    ))
}

/// Three-point `(-1, 2, -1) / h²` Laplacian.
pub fn assemble_classical(grid: &Grid) -> Operator {
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    Operator::from_symbol(OperatorKind::Classical, *grid, 2.0 * inv_h2, |k| {
        if k == 1 {
            inv_h2
        } else {
            0.0
        }
    })
}

/// Assemble at order `s`, treating `s == 1` as the classical operator.
pub fn assemble(grid: &Grid, s: f64) -> Result<Operator> {
    if s == 1.0 {
        Ok(assemble_classical(grid))
    } else {
        assemble_fractional(grid, s)
    }
}

/// `<A v, v>_h`.
pub fn quadratic_form(op: &Operator, v: &GridFunction) -> Result<f64> {
    let av = op.apply(v)?;
    inner_product_h(&av, v, &op.grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_extreme, Cholesky, Extreme};
    use std::f64::consts::PI;

    // independent oracle for the closed-form cell integrals
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
        let m = m + m % 2;
        let dx = (b - a) / m as f64;
        let mut acc = f(a) + f(b);
        for i in 1..m {
            let x = a + i as f64 * dx;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        acc * dx / 3.0
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::new(-1.0, 1.0, 3).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.nodes(), vec![-0.5, 0.0, 0.5]);
        assert!(Grid::new(1.0, -1.0, 5).is_err());
        assert!(Grid::new(-1.0, 1.0, 2).is_err());
        assert!(Grid::new(0.0, f64::NAN, 5).is_err());
    }

    #[test]
    fn weight_closed_forms() {
        let w = stencil_weights(0.5, 0.1, 10).unwrap();
        // (1/π) 10 (1/1.5 - 1/2.5)
        assert!((w.weight(2) - 0.848_826_363_156_775_4).abs() < 1e-12);
        // (1/π) 10 / 10.5
        assert!((w.tail - 0.303_152_272_555_991_2).abs() < 1e-12);
    }

    #[test]
    fn weights_match_cell_integrals() {
        for &s in &[0.2, 0.5, 0.8] {
            let h = 0.05;
            let w = stencil_weights(s, h, 6).unwrap();
            let c = frac_constant(1, s).unwrap().value;
            let kernel = |r: f64| r.powf(-1.0 - 2.0 * s);
            for k in 2..=6 {
                let lo = (k as f64 - 0.5) * h;
                let hi = (k as f64 + 0.5) * h;
                let q = c * simpson(kernel, lo, hi, 2000);
                assert!((w.weight(k) - q).abs() <= 1e-9 * q, "s={s} k={k}");
            }
            // singular cell: the quadratic interpolant gives r²/h² times the
            // second difference; r = h t^p with p(2-2s) >= 2 removes the singularity
            let p = 2.0 / (2.0 - 2.0 * s) + 1.0;
            let sing = c * simpson(
                |t: f64| p * h.powf(-2.0 * s) * t.powf(p * (2.0 - 2.0 * s) - 1.0),
                0.0,
                1.0,
                20_000,
            );
            let near = c * simpson(kernel, h, 1.5 * h, 2000);
            assert!(
                (w.weight(1) - sing - near).abs() <= 1e-4 * w.weight(1),
                "s={s}"
            );
            // tail as a long direct sum
            let direct: f64 = (7..200_000)
                .map(|k| {
                    c / (2.0 * s)
                        * h.powf(-2.0 * s)
                        * ((k as f64 - 0.5).powf(-2.0 * s) - (k as f64 + 0.5).powf(-2.0 * s))
                })
                .sum();
            let rest = c / (2.0 * s) * h.powf(-2.0 * s) * (199_999.5f64).powf(-2.0 * s);
            assert!((w.tail - direct - rest).abs() <= 1e-10 * w.tail);
        }
    }

    #[test]
    fn weights_positive_and_decreasing() {
        for &s in &[0.05, 0.3, 0.5, 0.9, 0.999] {
            let w = stencil_weights(s, 0.01, 200).unwrap();
            assert!(w.w.iter().all(|&x| x > 0.0));
            assert!(w.w.windows(2).skip(1).all(|p| p[1] < p[0]));
            assert!(w.tail > 0.0);
        }
    }

    #[test]
    fn weights_near_classical_limit() {
        for &h in &[0.1, 2.0 / 257.0, 1e-3] {
            let w = stencil_weights(0.999, h, 50).unwrap();
            assert!((w.weight(1) * h * h - 1.0).abs() <= 0.02, "h={h}");
            assert!(w.weight(2) * h * h <= 0.01);
        }
    }

    #[test]
    fn weight_domain_errors() {
        assert!(stencil_weights(0.0, 0.1, 4).is_err());
        assert!(stencil_weights(1.0, 0.1, 4).is_err());
        assert!(stencil_weights(0.5, 0.0, 4).is_err());
        assert!(stencil_weights(0.5, 0.1, 1).is_err());
    }

    #[test]
    fn fractional_operator_structure() {
        let g = Grid::symmetric_unit(4).unwrap();
        let op = assemble_fractional(&g, 0.5).unwrap();
        let m = op.matrix();
        assert!(m.is_symmetric());
        for i in 0..4 {
            let row: f64 = m.row(i).iter().sum();
            assert!(row > 0.0);
            for j in 0..4 {
                if i != j {
                    assert!(m.get(i, j) < 0.0);
                    assert_eq!(m.get(i, j), m.get(0, i.abs_diff(j)));
                }
            }
        }
    }

    #[test]
    fn fractional_close_to_classical_near_one() {
        let g = Grid::symmetric_unit(256).unwrap();
        let a = assemble_fractional(&g, 0.9999).unwrap();
        let c = assemble_classical(&g);
        let h2 = g.h() * g.h();
        let mut max = 0.0f64;
        for i in 0..256 {
            for j in 0..256 {
                max = max.max((a.matrix().get(i, j) - c.matrix().get(i, j)).abs() * h2);
            }
        }
        assert!(max <= 0.02, "max scaled deviation {max}");
    }

    #[test]
    fn classical_entries_and_spectrum() {
        let g = Grid::symmetric_unit(3).unwrap();
        let c = assemble_classical(&g);
        assert_eq!(c.matrix().get(1, 1), 8.0);
        assert_eq!(c.matrix().get(1, 0), -4.0);
        assert_eq!(c.matrix().get(0, 2), 0.0);

        let g = Grid::symmetric_unit(63).unwrap();
        let c = assemble_classical(&g);
        let top = eig_extreme(&c, Extreme::Largest, 1e-12).unwrap();
        let n = 63.0;
        let exact = 4.0 / (g.h() * g.h()) * (n * PI / (2.0 * (n + 1.0))).sin().powi(2);
        assert!((top.value - exact).abs() <= 1e-9 * exact);
    }

    #[test]
    fn classical_second_difference_of_quadratic() {
        let g = Grid::symmetric_unit(101).unwrap();
        let c = assemble_classical(&g);
        let v = g.sample(|x| 1.0 - x * x);
        let av = c.apply(&v).unwrap();
        assert!(av.iter().all(|x| (x - 2.0).abs() <= 1e-10));
    }

    #[test]
    fn inner_products() {
        let g = Grid::symmetric_unit(199).unwrap();
        let one = GridFunction::constant(199, 1.0);
        let ip = inner_product_h(&one, &one, &g).unwrap();
        assert!((ip - 2.0 * 199.0 / 200.0).abs() < 1e-12);

        let g4 = Grid::symmetric_unit(4).unwrap();
        let v = GridFunction(vec![1.0, -1.0, 1.0, -1.0]);
        let w = GridFunction(vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(inner_product_h(&v, &w, &g4).unwrap(), 0.0);

        let g = Grid::symmetric_unit(999).unwrap();
        // vanishes at the endpoints, so the rectangle rule is the trapezoid rule
        let v = g.sample(|x| (PI * x / 2.0).cos());
        assert!((inner_product_h(&v, &v, &g).unwrap() - 1.0).abs() < 1e-4);

        assert!(matches!(
            inner_product_h(&v, &one, &g),
            Err(Error::Shape {
                expected: 999,
                got: 199
            })
        ));
    }

    #[test]
    fn quadratic_forms() {
        let g = Grid::symmetric_unit(1024).unwrap();
        let c = assemble_classical(&g);
        let v = g.sample(|x| 1.0 - x * x);
        let e = quadratic_form(&c, &v).unwrap();
        assert!((e - 8.0 / 3.0).abs() <= 0.01 * 8.0 / 3.0);
        assert_eq!(quadratic_form(&c, &GridFunction::zeros(1024)).unwrap(), 0.0);

        let g = Grid::symmetric_unit(16).unwrap();
        let a = assemble_fractional(&g, 0.3).unwrap();
        let v = g.sample(|x| x.sin() - 0.2);
        assert!(quadratic_form(&a, &v).unwrap() > 0.0);
    }

    #[test]
    fn cholesky_succeeds_across_orders_and_sizes() {
        for &n in &[8, 64, 512] {
            let g = Grid::symmetric_unit(n).unwrap();
            for &s in &[0.1, 0.5, 0.9, 0.999] {
                let a = assemble_fractional(&g, s).unwrap();
                assert!(Cholesky::factor(a.matrix()).is_ok(), "n={n} s={s}");
            }
        }
    }
}
