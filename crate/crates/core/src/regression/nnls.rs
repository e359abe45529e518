//! Non-negative least squares by the Lawson–Hanson active-set method.
//!
//! Minimizes ‖Ax − y‖² subject to x ≥ 0. Columns are passed explicitly; the
//! intercept (when a caller wants one unconstrained) is handled upstream by
//! centering, not here. The inner unconstrained solves use Householder QR,
//! which doubles as the rank detector: a collapsed pivot means the newest
//! passive column is linearly dependent on earlier ones, and the
//! later-indexed column of the dependency is dropped from the problem.

/// Tolerance for the KKT gradient test deciding whether a zero coordinate
/// would improve the fit.
const GRADIENT_TOL: f64 = 1e-10;

/// Relative pivot threshold declaring a column numerically dependent.
const PIVOT_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    /// One coefficient per input column, all ≥ 0 (dropped columns get 0).
    pub x: Vec<f64>,
    /// Columns removed because the passive set became rank-deficient,
    /// in drop order.
    pub dropped: Vec<usize>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residual y − Ax.
fn residual(columns: &[&[f64]], y: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = y.to_vec();
    for (j, column) in columns.iter().enumerate() {
        if x[j] != 0.0 {
            for (ri, &aij) in r.iter_mut().zip(*column) {
                *ri -= x[j] * aij;
            }
        }
    }
    r
}

/// Unconstrained least squares over the given columns via Householder QR.
///
/// Returns `Err(position)` when the pivot for `columns[position]` collapses,
/// i.e. that column is numerically dependent on the ones before it.
fn qr_least_squares(columns: &[&[f64]], y: &[f64]) -> Result<Vec<f64>, usize> {
    let m = y.len();
    let k = columns.len();
    debug_assert!(k <= m);
    let mut a: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
    let mut rhs = y.to_vec();
    let mut max_pivot = 0.0f64;

    for j in 0..k {
        let norm = (j..m).map(|i| a[j][i] * a[j][i]).sum::<f64>().sqrt();
        if norm == 0.0 || norm <= PIVOT_RTOL * max_pivot {
            return Err(j);
        }
        max_pivot = max_pivot.max(norm);

        let alpha = if a[j][j] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..m].to_vec();
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        if vtv > 0.0 {
            for col in a.iter_mut().skip(j + 1) {
                let f = 2.0 * dot(&v, &col[j..m]) / vtv;
                for (vi, entry) in v.iter().zip(&mut col[j..m]) {
                    *entry -= f * vi;
                }
            }
            let f = 2.0 * dot(&v, &rhs[j..m]) / vtv;
            for (vi, entry) in v.iter().zip(&mut rhs[j..m]) {
                *entry -= f * vi;
            }
        }
        a[j][j] = alpha;
    }

    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = rhs[i];
        for col in (i + 1)..k {
            s -= a[col][i] * z[col];
        }
        z[i] = s / a[i][i];
    }
    Ok(z)
}

/// Lawson–Hanson NNLS: returns the global minimizer of ‖Ax − y‖² over x ≥ 0.
///
/// Requires every column to have the same length as `y`. The output
/// satisfies the KKT conditions to [`GRADIENT_TOL`]; verify with
/// [`kkt_violation`].
pub fn nnls_solve(columns: &[&[f64]], y: &[f64]) -> NnlsSolution {
    let n = columns.len();
    for column in columns {
        assert_eq!(column.len(), y.len(), "column/response length mismatch");
    }
    let mut x = vec![0.0; n];
    let mut dropped: Vec<usize> = Vec::new();
    let mut passive: Vec<usize> = Vec::new(); // kept sorted ascending
    let mut in_passive = vec![false; n];
    let mut is_dropped = vec![false; n];

    // Lawson–Hanson terminates in finitely many steps; the cap is a
    // defensive bound against floating-point cycling.
    let max_outer = 100 * n.max(1) + 100;
    'outer: for _ in 0..max_outer {
        let r = residual(columns, y, &x);
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if in_passive[j] || is_dropped[j] {
                continue;
            }
            let w = dot(columns[j], &r);
            if w > GRADIENT_TOL && best.map_or(true, |(_, bw)| w > bw) {
                best = Some((j, w));
            }
        }
        let Some((entering, _)) = best else {
            break;
        };
        let position = passive.partition_point(|&j| j < entering);
        passive.insert(position, entering);
        in_passive[entering] = true;

        loop {
            if passive.is_empty() {
                continue 'outer;
            }
            let sub: Vec<&[f64]> = passive.iter().map(|&j| columns[j]).collect();
            match qr_least_squares(&sub, y) {
                Err(pos) => {
                    let col = passive.remove(pos);
                    in_passive[col] = false;
                    is_dropped[col] = true;
                    x[col] = 0.0;
                    dropped.push(col);
                }
                Ok(z) => {
                    if z.iter().all(|&v| v > 0.0) {
                        for (&j, &zj) in passive.iter().zip(&z) {
                            x[j] = zj;
                        }
                        continue 'outer;
                    }
                    // Move from x toward z until the first coordinate hits 0.
                    let mut alpha = f64::INFINITY;
                    let mut blocking = usize::MAX;
                    for (i, &j) in passive.iter().enumerate() {
                        if z[i] <= 0.0 {
                            let step = x[j] / (x[j] - z[i]);
                            if step < alpha {
                                alpha = step;
                                blocking = j;
                            }
                        }
                    }
                    for (i, &j) in passive.iter().enumerate() {
                        x[j] += alpha * (z[i] - x[j]);
                    }
                    x[blocking] = 0.0;
                    passive.retain(|&j| {
                        let keep = x[j] > 0.0;
                        if !keep {
                            x[j] = 0.0;
                            in_passive[j] = false;
                        }
                        keep
                    });
                }
            }
        }
    }

    NnlsSolution { x, dropped }
}

/// Maximum KKT violation of a candidate solution: for x_j > 0 the residual
/// must be orthogonal to column j (|aᵀr|), and for x_j = 0 the gradient must
/// not favor increasing it (max(aᵀr, 0)). Dropped columns are excluded.
pub fn kkt_violation(columns: &[&[f64]], y: &[f64], solution: &NnlsSolution) -> f64 {
    let r = residual(columns, y, &solution.x);
    let mut worst = 0.0f64;
    for (j, column) in columns.iter().enumerate() {
        if solution.dropped.contains(&j) {
            continue;
        }
        let g = dot(column, &r);
        let violation = if solution.x[j] > 0.0 { g.abs() } else { g.max(0.0) };
        worst = worst.max(violation);
    }
    worst
}

/// Sum of squared residuals of a coefficient vector.
pub fn sum_squared_residuals(columns: &[&[f64]], y: &[f64], x: &[f64]) -> f64 {
    residual(columns, y, x).iter().map(|r| r * r).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_single_column_fit() {
        let column = [1.0, 2.0];
        let solution = nnls_solve(&[&column], &[1.0, 2.0]);
        assert_relative_eq!(solution.x[0], 1.0, epsilon = 1e-12);
        assert!(solution.dropped.is_empty());
        assert!(sum_squared_residuals(&[&column], &[1.0, 2.0], &solution.x) < 1e-24);
    }

    #[test]
    fn anti_correlated_column_stays_at_zero() {
        // Centered version of y = (1,2,3) against x = (3,2,1): the gradient
        // at zero is negative, so the constraint binds.
        let column = [1.0, 0.0, -1.0];
        let y = [-1.0, 0.0, 1.0];
        let solution = nnls_solve(&[&column], &y);
        assert_eq!(solution.x, vec![0.0]);
        assert!(kkt_violation(&[&column], &y, &solution) <= 1e-8);
    }

    #[test]
    fn recovers_a_planted_nonnegative_combination() {
        let x1 = [1.0, 0.0, 2.0, 1.0, 3.0];
        let x2 = [0.0, 1.0, 1.0, 2.0, 1.0];
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 2.0 * a + 3.0 * b).collect();
        let solution = nnls_solve(&[&x1, &x2], &y);
        assert_relative_eq!(solution.x[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(solution.x[1], 3.0, epsilon = 1e-10);
        assert!(kkt_violation(&[&x1, &x2], &y, &solution) <= 1e-8);
    }

    #[test]
    fn duplicated_column_resolves_to_the_earlier_index() {
        // An exact duplicate never reaches the passive set: once the first
        // copy is fit, the residual is orthogonal to the second, so it stays
        // at zero and the KKT conditions hold without a rank repair.
        let x1 = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        let solution = nnls_solve(&[&x1, &x1], &y);
        assert_relative_eq!(solution.x[0], 2.0, epsilon = 1e-10);
        assert_eq!(solution.x[1], 0.0);
        assert!(solution.dropped.is_empty());
        assert!(kkt_violation(&[&x1, &x1], &y, &solution) <= 1e-8);
    }

    #[test]
    fn qr_reports_the_later_indexed_dependent_column() {
        let c0 = vec![1.0, 2.0, 3.0];
        let c1 = vec![0.0, 1.0, -1.0];
        let sum: Vec<f64> = c0.iter().zip(&c1).map(|(a, b)| a + b).collect();
        let y = [1.0, 1.0, 1.0];
        assert_eq!(qr_least_squares(&[&c0, &c0], &y), Err(1));
        assert_eq!(qr_least_squares(&[&c0, &c1, &sum], &y), Err(2));
        assert!(qr_least_squares(&[&c0, &c1], &y).is_ok());
    }

    #[test]
    fn near_collinear_entering_column_is_dropped() {
        // Engineered so the second column's gradient at the first column's
        // optimum is above the entry tolerance while its orthogonal
        // component is below the pivot tolerance: the solver admits it, the
        // QR pivot collapses, and the column is dropped.
        let c0 = [1.0, 0.0, 0.0];
        let c1 = [1.0 - 1e-8, -1e-11, 0.0];
        let y = [5.0, -300.0, 0.0];
        let solution = nnls_solve(&[&c0, &c1], &y);
        assert_eq!(solution.dropped, vec![1]);
        assert_relative_eq!(solution.x[0], 5.0, epsilon = 1e-10);
        assert_eq!(solution.x[1], 0.0);
        assert!(kkt_violation(&[&c0, &c1], &y, &solution) <= 1e-8);
    }

    /// Brute-force oracle: grid search over the box [0, hi]^k.
    fn grid_minimum_ssr(columns: &[&[f64]], y: &[f64], hi: f64, step: f64) -> f64 {
        let k = columns.len();
        let steps = (hi / step).round() as usize;
        let mut best = f64::INFINITY;
        let mut index = vec![0usize; k];
        loop {
            let x: Vec<f64> = index.iter().map(|&i| i as f64 * step).collect();
            let ssr = sum_squared_residuals(columns, y, &x);
            if ssr < best {
                best = ssr;
            }
            let mut carry = 0;
            loop {
                index[carry] += 1;
                if index[carry] <= steps {
                    break;
                }
                index[carry] = 0;
                carry += 1;
                if carry == k {
                    return best;
                }
            }
        }
    }

    #[test]
    fn random_two_column_instances_match_a_coarse_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let m = rng.random_range(3..=8);
            let cols: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
            let solution = nnls_solve(&refs, &y);
            let solver_ssr = sum_squared_residuals(&refs, &y, &solution.x);
            let oracle_ssr = grid_minimum_ssr(&refs, &y, 5.0, 0.05);
            assert!(
                solver_ssr <= oracle_ssr + 1e-9,
                "solver {solver_ssr} worse than grid {oracle_ssr}"
            );
            assert!(kkt_violation(&refs, &y, &solution) <= 1e-8);
        }
    }

    #[test]
    fn solution_is_always_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..50 {
            let m = rng.random_range(4..=10);
            let k = rng.random_range(1..=3);
            let cols: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let y: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
            let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
            let solution = nnls_solve(&refs, &y);
            assert!(solution.x.iter().all(|&v| v >= 0.0));
        }
    }
}
