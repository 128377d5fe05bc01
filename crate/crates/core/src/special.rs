//! Special functions and quadrature nodes.
//!
//! Associated Legendre functions use the Ferrers definition on (-1, 1),
//! seeded at P_mu^mu(x) = (-1)^mu (2mu - 1)!! (1 - x^2)^(mu/2) and raised in
//! degree by the three-term recurrence
//!
//! ```text
//!     (nu - mu + 1) P_{nu+1}^mu = (2nu + 1) x P_nu^mu - (nu + mu) P_{nu-1}^mu,
//! ```
//!
//! which is stable upward in degree at fixed order for |x| <= 1. An optional
//! seed scale rides the linear recurrence, so factorial prefactors can be
//! folded in without intermediate overflow.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Physicists' Hermite polynomial H_n(x).
pub fn hermite_h(n: usize, x: f64) -> f64 {
    let mut hm = 1.0; // H_0
    if n == 0 {
        return hm;
    }
    let mut h = 2.0 * x; // H_1
    for k in 1..n {
        let hn = 2.0 * x * h - 2.0 * k as f64 * hm;
        hm = h;
        h = hn;
    }
    h
}

/// scale * P_nu^mu(x) for integer degree nu >= order mu >= 0, |x| <= 1.
///
/// The scale multiplies the recurrence seed, so the product stays
/// representable even when `scale` and P_nu^mu separately overflow or
/// underflow f64.
pub fn assoc_legendre_scaled(nu: usize, mu: usize, x: f64, scale: f64) -> Result<f64> {
    if mu > nu {
        return Err(Error::invalid(format!("order {mu} exceeds degree {nu}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::invalid(format!("argument {x} outside [-1, 1]")));
    }
    // P_mu^mu with Condon-Shortley phase; the phase is irrelevant squared.
    let mut pmm = scale;
    if mu > 0 {
        let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
        let mut fact = 1.0;
        for _ in 0..mu {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
    }
    if nu == mu {
        return Ok(pmm);
    }
    let mut pm1 = pmm;
    let mut p = x * (2 * mu + 1) as f64 * pmm; // P_{mu+1}^mu
    for k in (mu + 1)..nu {
        let kf = k as f64;
        let muf = mu as f64;
        let pn = ((2.0 * kf + 1.0) * x * p - (kf + muf) * pm1) / (kf - muf + 1.0);
        pm1 = p;
        p = pn;
    }
    Ok(p)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on P_n from the Chebyshev-like initial guesses; exact
/// for polynomials through degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the degree recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Hermite nodes and weights for integrals against exp(-x^2).
///
/// Golub-Welsch: eigen-decomposition of the symmetric tridiagonal Jacobi
/// matrix with off-diagonals sqrt(k/2); weights are sqrt(pi) times the
/// squared first components of the eigenvectors.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        j[(k - 1, k)] = off;
        j[(k, k - 1)] = off;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (x, std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn hermite_low_orders() {
        for &x in &[-1.3, 0.0, 0.4, 2.7] {
            assert!((hermite_h(0, x) - 1.0).abs() < EPS);
            assert!((hermite_h(1, x) - 2.0 * x).abs() < EPS);
            assert!((hermite_h(2, x) - (4.0 * x * x - 2.0)).abs() < EPS);
            assert!((hermite_h(3, x) - (8.0 * x.powi(3) - 12.0 * x)).abs() < EPS);
        }
    }

    #[test]
    fn legendre_closed_forms() {
        for &x in &[-0.9, -0.2, 0.1, 0.5, 0.99] {
            let s = ((1.0 - x) * (1.0f64 + x)).sqrt();
            let p11 = assoc_legendre_scaled(1, 1, x, 1.0).unwrap();
            assert!((p11 - (-s)).abs() < EPS, "P_1^1({x})");
            let p21 = assoc_legendre_scaled(2, 1, x, 1.0).unwrap();
            assert!((p21 - (-3.0 * x * s)).abs() < EPS, "P_2^1({x})");
            let p22 = assoc_legendre_scaled(2, 2, x, 1.0).unwrap();
            assert!((p22 - 3.0 * (1.0 - x * x)).abs() < EPS, "P_2^2({x})");
            let p20 = assoc_legendre_scaled(2, 0, x, 1.0).unwrap();
            assert!((p20 - 0.5 * (3.0 * x * x - 1.0)).abs() < EPS, "P_2({x})");
        }
    }

    #[test]
    fn legendre_at_unit_argument() {
        for nu in 0..20 {
            let p = assoc_legendre_scaled(nu, 0, 1.0, 1.0).unwrap();
            assert!((p - 1.0).abs() < EPS, "P_{nu}(1) = {p}");
        }
        // Nonzero order vanishes at x = 1.
        assert_eq!(assoc_legendre_scaled(5, 2, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn legendre_seed_scaling_is_linear() {
        let a = assoc_legendre_scaled(7, 3, 0.3, 1.0).unwrap();
        let b = assoc_legendre_scaled(7, 3, 0.3, 1e-30).unwrap();
        assert!((b / 1e-30 - a).abs() < 1e-3 * a.abs());
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(8);
        // Degree-14 monomial: exact value 2/15.
        let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(14)).sum();
        assert!((q - 2.0 / 15.0).abs() < 1e-13, "GL8 x^14: {q}");
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(20);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
        let sp = std::f64::consts::PI.sqrt();
        assert!((m0 - sp).abs() < 1e-12, "GH mass {m0}");
        assert!((m2 - 0.5 * sp).abs() < 1e-12, "GH second moment {m2}");
        // Hermite orthogonality through the quadrature.
        let dot: f64 = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * hermite_h(3, *xi) * hermite_h(5, *xi))
            .sum();
        assert!(dot.abs() < 1e-8, "H3.H5 = {dot}");
    }
}
