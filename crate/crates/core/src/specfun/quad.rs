//! Deterministic Gauss–Jacobi quadrature via Golub–Welsch.
//!
//! Nodes and weights come from the symmetric tridiagonal Jacobi matrix of
//! the three-term recurrence; the eigenproblem is solved with the classic
//! implicit-QL sweep (IMTQLX). Weights are returned normalized to sum to
//! one, which turns a rule for the weight function into an expectation rule
//! for the corresponding Beta density without needing its normalizing
//! constant.

use crate::error::{Error, Result};

/// Implicit QL with Wilkinson shifts for a symmetric tridiagonal matrix.
/// `d` holds the diagonal, `e` the subdiagonal in `e[0..n-1]`, and `z` a
/// vector rotated along (first components of the eigenvectors when seeded
/// with e_1). Eigenvalues come back sorted ascending in `d`.
fn imtqlx(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut j = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= eps * (d[m].abs() + d[m + 1].abs()) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if j >= 50 {
                return Err(Error::numeric(
                    "tridiagonal QL failed to converge".to_string(),
                ));
            }
            j += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                if f.abs() >= g.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // Selection sort, permuting z alongside.
    for i in 0..n {
        let mut k = i;
        for jj in i + 1..n {
            if d[jj] < d[k] {
                k = jj;
            }
        }
        if k != i {
            d.swap(i, k);
            z.swap(i, k);
        }
    }
    Ok(())
}

/// Gauss–Jacobi rule for the weight (1-x)^alf (1+x)^bet on (-1, 1).
/// Returns nodes ascending and weights normalized to unit sum.
pub fn gauss_jacobi(n: usize, alf: f64, bet: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::domain("quadrature order must be >= 1".to_string()));
    }
    if !(alf > -1.0 && bet > -1.0) {
        return Err(Error::domain(format!(
            "Jacobi exponents must exceed -1, got ({alf}, {bet})"
        )));
    }
    let ab = alf + bet;
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    d[0] = (bet - alf) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let den = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        d[k] = (bet * bet - alf * alf) / den;
    }
    for (i, ei) in e.iter_mut().take(n.saturating_sub(1)).enumerate() {
        let k = (i + 1) as f64;
        let num;
        let den;
        if i == 0 {
            num = 4.0 * (1.0 + alf) * (1.0 + bet);
            den = (ab + 2.0) * (ab + 2.0) * (ab + 3.0);
        } else {
            num = 4.0 * k * (k + alf) * (k + bet) * (k + ab);
            let t = 2.0 * k + ab;
            den = t * t * (t + 1.0) * (t - 1.0);
        }
        *ei = (num / den).sqrt();
    }
    let mut z = vec![0.0f64; n];
    z[0] = 1.0;
    imtqlx(&mut d, &mut e, &mut z)?;
    let mut w: Vec<f64> = z.iter().map(|zi| zi * zi).collect();
    let total: f64 = w.iter().sum();
    for wi in &mut w {
        *wi /= total;
    }
    Ok((d, w))
}

/// An expectation rule for X ~ Beta(a, b) on (0, 1):
/// E[f(X)] ≈ Σ weights[i] · f(nodes[i]), with Σ weights = 1.
///
/// Exact (to rounding) for polynomials f of degree <= 2n-1.
#[derive(Debug, Clone)]
pub struct BetaRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BetaRule {
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Build the n-point rule for Beta(a, b); t = (1+x)/2 maps the Jacobi rule
/// with exponents (b-1, a-1) onto the unit interval.
pub fn beta_rule(n: usize, a: f64, b: f64) -> Result<BetaRule> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!(
            "Beta parameters must be positive, got ({a}, {b})"
        )));
    }
    let (x, w) = gauss_jacobi(n, b - 1.0, a - 1.0)?;
    let nodes = x.iter().map(|&xi| 0.5 * (1.0 + xi)).collect();
    Ok(BetaRule { nodes, weights: w })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_five_point() {
        // alf = bet = 0 reduces to Gauss–Legendre; classic 5-point nodes.
        let (x, w) = gauss_jacobi(5, 0.0, 0.0).unwrap();
        let want_x = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        // Standard weights over total mass 2.
        let want_w = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        for i in 0..5 {
            assert!((x[i] - want_x[i]).abs() < 1e-13, "node {i}");
            assert!((w[i] - want_w[i] / 2.0).abs() < 1e-13, "weight {i}");
        }
    }

    #[test]
    fn beta_rule_reproduces_moments() {
        // E[X^m] = prod_{j<m} (a+j)/(a+b+j) for X ~ Beta(a,b).
        for &(a, b) in &[
            (0.5, 3.0),
            (1.0, 1.0),
            (2.7, 0.4),
            (0.65, 10_001.0),
            (1.5, 2.5),
        ] {
            let rule = beta_rule(64, a, b).unwrap();
            for m in 1..=8u32 {
                let mut want = 1.0;
                for j in 0..m {
                    want *= (a + j as f64) / (a + b + j as f64);
                }
                let got = rule.expect(|t| t.powi(m as i32));
                assert!(
                    ((got - want) / want).abs() < 1e-11,
                    "a={a} b={b} m={m}: got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn weights_are_positive_and_nodes_interior() {
        let rule = beta_rule(128, 0.3, 501.0).unwrap();
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            assert!(t > 0.0 && t < 1.0);
            assert!(w > 0.0);
        }
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(beta_rule(8, 0.0, 1.0).is_err());
    }
}
