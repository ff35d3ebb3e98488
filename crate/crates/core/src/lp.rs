//! Strict-feasibility linear programs on top of `minilp`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::linalg::Point;

/// Largest `t <= cap` such that `target = sum_j lambda_j g_j` with every
/// `lambda_j >= t` (and `sum_j lambda_j = 1` when `convex` is set).
/// `None` when no nonnegative combination exists at all.
///
/// A positive margin together with full rank of the generators certifies
/// that `target` lies in the interior of the cone (or convex hull).
pub fn positive_combination_margin(generators: &[Point], target: &Point, convex: bool, cap: f64) -> Option<f64> {
    let dim = target.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let t = lp.add_var(1.0, (0.0, cap));
    let lambdas: Vec<_> = generators.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for k in 0..dim {
        let terms: Vec<_> = lambdas.iter().zip(generators).map(|(&l, g)| (l, g[k])).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, target[k]);
    }
    if convex {
        let terms: Vec<_> = lambdas.iter().map(|&l| (l, 1.0)).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, 1.0);
    }
    for &l in &lambdas {
        lp.add_constraint(&[(l, 1.0), (t, -1.0)][..], ComparisonOp::Ge, 0.0);
    }
    lp.solve().ok().map(|s| s.objective())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point {
        Point::from_column_slice(v)
    }

    #[test]
    fn origin_inside_square_hull() {
        let gens = vec![p(&[1.0, 1.0]), p(&[-1.0, 1.0]), p(&[-1.0, -1.0]), p(&[1.0, -1.0])];
        let m = positive_combination_margin(&gens, &p(&[0.0, 0.0]), true, 1.0).unwrap();
        assert!((m - 0.25).abs() < 1e-9);
    }

    #[test]
    fn point_outside_hull_is_infeasible() {
        let gens = vec![p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[0.0, 0.0])];
        assert!(positive_combination_margin(&gens, &p(&[1.0, 1.0]), true, 1.0).is_none());
    }

    #[test]
    fn boundary_point_has_zero_margin() {
        let gens = vec![p(&[1.0, 0.0]), p(&[0.0, 1.0]), p(&[0.0, 0.0])];
        let m = positive_combination_margin(&gens, &p(&[0.5, 0.5]), true, 1.0).unwrap();
        assert!(m.abs() < 1e-12);
    }
}
