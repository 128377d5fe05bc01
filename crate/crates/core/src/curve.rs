//! Cubic splines and arclength-parameterized planar curves.
//!
//! Natural cubic splines (zero second derivative at the ends) interpolate
//! sampled data exactly and are C2 in the interior. The planar curve wraps
//! two splines x(s), y(s) over a common arclength grid and provides the
//! moving frame: unit tangent, left normal, signed curvature, plus
//! nearest-point projection of an arbitrary plane point.

use crate::error::{Error, Result};

/// Natural cubic spline on a strictly increasing grid.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(t: &[f64], y: &[f64]) -> Result<Self> {
        let n = t.len();
        if n < 2 || y.len() != n {
            return Err(Error::invalid("spline needs at least two matching knots"));
        }
        for w in t.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invalid("spline grid must be strictly increasing"));
            }
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior tridiagonal system.
            let mut sub = vec![0.0; n - 2];
            let mut diag = vec![0.0; n - 2];
            let mut sup = vec![0.0; n - 2];
            let mut rhs = vec![0.0; n - 2];
            for i in 1..n - 1 {
                let h0 = t[i] - t[i - 1];
                let h1 = t[i + 1] - t[i];
                sub[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..n - 2 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 3] / diag[n - 3];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i - 1] - sup[i - 1] * m[i + 1]) / diag[i - 1];
            }
        }
        Ok(CubicSpline { t: t.to_vec(), y: y.to_vec(), m })
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.t.len();
        match self.t.binary_search_by(|a| a.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.t
    }
}

/// Planar curve x(s), y(s) over cumulative chord arclength.
#[derive(Clone, Debug)]
pub struct PlanarCurve {
    pub s: Vec<f64>,
    sx: CubicSpline,
    sy: CubicSpline,
}

impl PlanarCurve {
    /// Build from an ordered polyline; duplicate consecutive points are
    /// collapsed. Arclength is cumulative chord length.
    pub fn from_points(pts: &[[f64; 2]]) -> Result<Self> {
        let mut clean: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
        for p in pts {
            if clean.last().map_or(true, |q: &[f64; 2]| {
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
                d > 1e-12
            }) {
                clean.push(*p);
            }
        }
        if clean.len() < 2 {
            return Err(Error::invalid("curve needs at least two distinct points"));
        }
        let mut s = Vec::with_capacity(clean.len());
        s.push(0.0);
        for w in clean.windows(2) {
            let d = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
            s.push(s.last().unwrap() + d);
        }
        let xs: Vec<f64> = clean.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = clean.iter().map(|p| p[1]).collect();
        Ok(PlanarCurve {
            sx: CubicSpline::natural(&s, &xs)?,
            sy: CubicSpline::natural(&s, &ys)?,
            s,
        })
    }

    pub fn length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        [self.sx.eval(s), self.sy.eval(s)]
    }

    /// Unit tangent.
    pub fn tangent(&self, s: f64) -> [f64; 2] {
        let dx = self.sx.deriv(s);
        let dy = self.sy.deriv(s);
        let n = (dx * dx + dy * dy).sqrt();
        [dx / n, dy / n]
    }

    /// Left normal (tangent rotated +90 degrees).
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let t = self.tangent(s);
        [-t[1], t[0]]
    }

    /// Signed curvature; positive bends toward the left normal.
    pub fn curvature(&self, s: f64) -> f64 {
        let dx = self.sx.deriv(s);
        let dy = self.sy.deriv(s);
        let ddx = self.sx.deriv2(s);
        let ddy = self.sy.deriv2(s);
        let n2 = dx * dx + dy * dy;
        (dx * ddy - dy * ddx) / n2.powf(1.5)
    }

    /// Nearest point on the curve: returns (s, distance, signed offset along
    /// the left normal). Coarse scan over the knots, then Newton refinement
    /// of (r(s) - p) . r'(s) = 0.
    pub fn project(&self, p: [f64; 2]) -> (f64, f64, f64) {
        let mut best_s = self.s[0];
        let mut best_d2 = f64::INFINITY;
        for &sk in &self.s {
            let q = self.point(sk);
            let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if d2 < best_d2 {
                best_d2 = d2;
                best_s = sk;
            }
        }
        self.refine_projection(p, best_s)
    }

    /// Nearest-point refinement seeded at arclength `s0`, with no global
    /// scan: it stays on the branch closest to `s0` where distinct curve
    /// sections come near each other. Use for tracking a point that moves
    /// continuously along the curve.
    pub fn project_from(&self, p: [f64; 2], s0: f64) -> (f64, f64, f64) {
        self.refine_projection(p, s0.clamp(self.s[0], self.length()))
    }

    fn refine_projection(&self, p: [f64; 2], mut s: f64) -> (f64, f64, f64) {
        let (lo, hi) = (self.s[0], self.length());
        for _ in 0..40 {
            let q = self.point(s);
            let dx = self.sx.deriv(s);
            let dy = self.sy.deriv(s);
            let ddx = self.sx.deriv2(s);
            let ddy = self.sy.deriv2(s);
            let rx = q[0] - p[0];
            let ry = q[1] - p[1];
            let f = rx * dx + ry * dy;
            let fp = dx * dx + dy * dy + rx * ddx + ry * ddy;
            if fp.abs() < 1e-300 {
                break;
            }
            let step = f / fp;
            s = (s - step).clamp(lo, hi);
            if step.abs() < 1e-12 * hi.max(1.0) {
                break;
            }
        }
        let q = self.point(s);
        let d = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        let n = self.normal(s);
        let off = (p[0] - q[0]) * n[0] + (p[1] - q[1]) * n[1];
        (s, d, off)
    }

    /// Resample to `n` uniformly spaced arclength values.
    pub fn uniform_arclength(&self, n: usize) -> Vec<f64> {
        let l = self.length();
        (0..n).map(|i| l * i as f64 / (n - 1) as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_interpolates_knots() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = t.iter().map(|x| (x * 1.1).sin()).collect();
        let sp = CubicSpline::natural(&t, &y).unwrap();
        for (ti, yi) in t.iter().zip(&y) {
            assert!((sp.eval(*ti) - yi).abs() < 1e-13);
        }
    }

    #[test]
    fn spline_derivative_accuracy() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = t.iter().map(|x| (0.7 * x).cos()).collect();
        let sp = CubicSpline::natural(&t, &y).unwrap();
        for i in 20..180 {
            let x = t[i] + 0.02;
            let d = sp.deriv(x);
            let exact = -0.7 * (0.7 * x).sin();
            assert!((d - exact).abs() < 1e-5, "deriv at {x}: {d} vs {exact}");
        }
    }

    #[test]
    fn circle_frame() {
        let r = 2.0;
        let pts: Vec<[f64; 2]> = (0..=400)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 400.0;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let c = PlanarCurve::from_points(&pts).unwrap();
        // Half circle: length pi * r, curvature 1/r (left-turning).
        assert!((c.length() - std::f64::consts::PI * r).abs() < 1e-3);
        for frac in [0.25, 0.5, 0.75] {
            let s = frac * c.length();
            let k = c.curvature(s);
            assert!((k - 1.0 / r).abs() < 1e-4, "curvature {k} at {frac}");
            let t = c.tangent(s);
            assert!((t[0].powi(2) + t[1].powi(2) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_onto_straight_segment() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        let c = PlanarCurve::from_points(&pts).unwrap();
        let (s, d, off) = c.project([1.4, 0.7]);
        assert!((s - 1.4).abs() < 1e-9);
        assert!((d - 0.7).abs() < 1e-9);
        assert!((off - 0.7).abs() < 1e-9, "left-normal offset {off}");
        let (_, _, off2) = c.project([2.2, -0.3]);
        assert!((off2 + 0.3).abs() < 1e-9, "signed offset {off2}");
    }
}
