use proptest::prelude::*;

use fraclap::control::{project_annulus, sign_normalize};
use fraclap::discretize::{assemble, norm_h, quadratic_form, Grid, GridFunction};
use fraclap::forward::{maximum_principle_check, poincare_constant, StateSolver};
use fraclap::linalg::{Cholesky, SymmetricOperator};
use fraclap::specfun::gamma;

fn order() -> impl Strategy<Value = f64> {
    prop_oneof![4 => 0.01f64..0.999, 1 => Just(1.0)]
}

fn grid_and_values(max_n: usize) -> impl Strategy<Value = (Grid, Vec<f64>)> {
    (3..=max_n, -2.0f64..0.0, 0.1f64..3.0).prop_flat_map(|(n, left, len)| {
        (
            Just(Grid::new(left, left + len, n).unwrap()),
            prop::collection::vec(-5.0f64..5.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn operator_is_symmetric_pd_m_matrix((grid, _) in grid_and_values(40), s in order()) {
        let op = assemble(&grid, s).unwrap();
        let a = op.matrix();
        prop_assert!(a.is_symmetric());
        prop_assert!(Cholesky::factor(a).is_ok());
        for i in 0..grid.n() {
            prop_assert!(a.get(i, i) > 0.0);
            let mut row = a.get(i, i);
            for j in (0..grid.n()).filter(|&j| j != i) {
                prop_assert!(a.get(i, j) <= 0.0);
                row += a.get(i, j);
            }
            prop_assert!(row >= 0.0);
        }
    }

    #[test]
    fn nonnegative_data_gives_nonnegative_state((grid, v) in grid_and_values(40), s in order()) {
        let op = assemble(&grid, s).unwrap();
        let f = GridFunction(v.iter().map(|x| x.abs()).collect());
        prop_assert!(maximum_principle_check(&op, &f).unwrap().holds());
    }

    #[test]
    fn state_is_linear((grid, v) in grid_and_values(40), s in order(), alpha in -3.0f64..3.0) {
        let op = assemble(&grid, s).unwrap();
        let solver = StateSolver::new(&op).unwrap();
        let f = GridFunction(v);
        let g = GridFunction((0..grid.n()).map(|i| (i as f64).cos()).collect());
        let lhs = solver.state(&f.scaled(alpha).axpy(1.0, &g)).unwrap();
        let rhs = solver.state(&f).unwrap().scaled(alpha).axpy(1.0, &solver.state(&g).unwrap());
        let scale = 1.0 + norm_h(&rhs, &grid).unwrap();
        prop_assert!(norm_h(&lhs.sub(&rhs), &grid).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn projection_clamps_and_is_idempotent((grid, v) in grid_and_values(64), a in 0.0f64..2.0, width in 0.0f64..2.0) {
        let b = a + width;
        let p = project_annulus(&GridFunction(v), &grid, a, b).unwrap().f;
        let norm = norm_h(&p, &grid).unwrap();
        prop_assert!(norm >= a * (1.0 - 1e-12) && norm <= b * (1.0 + 1e-12));
        let again = project_annulus(&p, &grid, a, b).unwrap().f;
        prop_assert!(norm_h(&again.sub(&p), &grid).unwrap() <= 1e-12 * (1.0 + norm));
    }

    #[test]
    fn poincare_inequality((grid, v) in grid_and_values(32), s in order()) {
        let op = assemble(&grid, s).unwrap();
        let c = poincare_constant(&op).unwrap();
        let u = GridFunction(v);
        let lhs = norm_h(&u, &grid).unwrap().powi(2);
        prop_assert!(lhs <= c * quadratic_form(&op, &u).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn sign_normalization_is_sign_invariant(v in prop::collection::vec(-5.0f64..5.0, 3..40)) {
        let f = GridFunction(v);
        prop_assert_eq!(sign_normalize(&f), sign_normalize(&f.scaled(-1.0)));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..50.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
    }
}
