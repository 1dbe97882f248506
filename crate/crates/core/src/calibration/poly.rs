//! Least-squares polynomial through the origin.

use crate::{Error, Result};

/// Degree of the characteristic fit.
pub const DEGREE: usize = 6;

/// Fit `y = a1 x + ... + a6 x^6` (no constant term) to the points, with `x`
/// rescaled from `[0, span]` to `[-1, 1]` for conditioning. Returns the
/// seven coefficients in the raw `x` monomial basis, `a0` included (always 0).
///
/// Pinning the constant keeps the zero-length sample, whose OGCD is zero by
/// definition, exactly on the curve.
pub fn fit_through_origin(xs: &[f64], ys: &[f64], span: f64) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if !(span > 0.0) {
        return Err(Error::Fit(format!("span must be positive, got {span}")));
    }
    let mut distinct: Vec<f64> = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < DEGREE + 1 {
        return Err(Error::Fit(format!(
            "need at least {} distinct lengths, got {}",
            DEGREE + 1,
            distinct.len()
        )));
    }

    // basis b_k(t) = t^k - (-1)^k vanishes at t = -1, i.e. x = 0
    let alpha = 2.0 / span;
    let mut gram = [[0.0; DEGREE]; DEGREE];
    let mut rhs = [0.0; DEGREE];
    for (&x, &y) in xs.iter().zip(ys) {
        let t = alpha * x - 1.0;
        let mut b = [0.0; DEGREE];
        let mut tk = 1.0;
        let mut sign = 1.0;
        for bk in &mut b {
            tk *= t;
            sign = -sign;
            *bk = tk - sign;
        }
        for i in 0..DEGREE {
            rhs[i] += b[i] * y;
            for j in 0..DEGREE {
                gram[i][j] += b[i] * b[j];
            }
        }
    }
    let c = solve(gram, rhs)?;

    // expand sum c_k ((alpha x - 1)^k - (-1)^k) into raw monomials
    let mut a = vec![0.0; DEGREE + 1];
    for (k1, ck) in c.iter().enumerate() {
        let k = k1 + 1;
        for (j, aj) in a.iter_mut().enumerate().take(k + 1).skip(1) {
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            *aj += ck * binomial(k, j) * alpha.powi(j as i32) * sign;
        }
    }
    Ok(a)
}

/// Horner evaluation of ascending coefficients.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Gaussian elimination with partial pivoting.
fn solve<const N: usize>(mut m: [[f64; N]; N], mut v: [f64; N]) -> Result<[f64; N]> {
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        if m[piv][col].abs() < 1e-300 {
            return Err(Error::Fit("singular normal equations".into()));
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - s) / m[row][row];
    }
    Ok(x)
}
