//! Small dense symmetric solves for the least-squares trainer.

/// Cholesky factorization of a symmetric positive-definite matrix, in place.
/// Returns None on a non-positive pivot.
fn cholesky(a: &mut [Vec<f64>]) -> Option<()> {
    let n = a.len();
    for j in 0..n {
        let mut d = a[j][j];
        for k in 0..j {
            d -= a[j][k] * a[j][k];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        a[j][j] = d;
        for i in (j + 1)..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            a[i][j] = s / d;
        }
    }
    Some(())
}

fn solve_with_factor(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = l.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let t = y[k];
            y[i] -= l[i][k] * t;
        }
        y[i] /= l[i][i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = y[k];
            y[i] -= l[k][i] * t;
        }
        y[i] /= l[i][i];
    }
    y
}

/// Solve the SPD system M x = b by Cholesky. When M is singular (rank
/// deficient), retries with a vanishing ridge on the diagonal, which yields
/// the minimum-norm limit solution; the second return value flags that
/// path.
pub fn solve_spd(m: &[Vec<f64>], b: &[f64]) -> (Vec<f64>, bool) {
    let n = m.len();
    let mut work: Vec<Vec<f64>> = m.to_vec();
    if cholesky(&mut work).is_some() {
        return (solve_with_factor(&work, b), false);
    }
    let trace: f64 = (0..n).map(|i| m[i][i]).sum();
    let mut ridge = 1e-10 * (trace / n as f64).max(1.0);
    for _ in 0..40 {
        let mut work: Vec<Vec<f64>> = m.to_vec();
        for (i, row) in work.iter_mut().enumerate() {
            row[i] += ridge;
        }
        if cholesky(&mut work).is_some() {
            return (solve_with_factor(&work, b), true);
        }
        ridge *= 10.0;
    }
    (vec![0.0; n], true)
}
