//! Finite-difference verification utilities.

/// Central-difference gradient of `f` at `point` with step `h`.
pub fn numeric_gradient(f: impl Fn(&[f64]) -> f64, point: &[f64], h: f64) -> Vec<f64> {
    let mut work = point.to_vec();
    let mut out = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        work[i] = point[i] + h;
        let fp = f(&work);
        work[i] = point[i] - h;
        let fm = f(&work);
        work[i] = point[i];
        out.push((fp - fm) / (2.0 * h));
    }
    out
}

/// Maximum relative error between an analytic gradient and the
/// central-difference gradient of `f` at `point`. The denominator is
/// floored at 1 so near-zero components are compared absolutely.
pub fn grad_check(
    f: impl Fn(&[f64]) -> f64,
    analytic: &[f64],
    point: &[f64],
    h: f64,
) -> f64 {
    let numeric = numeric_gradient(f, point, h);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Central-difference Hessian of `f` at `point`.
pub fn numeric_hessian(f: impl Fn(&[f64]) -> f64, point: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = point.len();
    let mut work = point.to_vec();
    let mut eval = |di: usize, si: f64, dj: usize, sj: f64| {
        work[di] += si * h;
        work[dj] += sj * h;
        let v = f(&work);
        work[di] = point[di];
        work[dj] = point[dj];
        v
    };
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = (eval(i, 1.0, j, 1.0) - eval(i, 1.0, j, -1.0) - eval(i, -1.0, j, 1.0)
                + eval(i, -1.0, j, -1.0))
                / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Smallest eigenvalue of a small symmetric matrix via cyclic Jacobi
/// rotations.
pub fn min_symmetric_eigenvalue(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return matrix[0][0];
    }
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}
