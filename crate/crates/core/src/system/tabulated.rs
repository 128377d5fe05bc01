//! Bicubic-spline interpolation of a tabulated surface.
//!
//! The grid is uniform in each direction; values are natural cubic splines
//! row by row in x1, then a column spline in x2 is built from the row
//! interpolants at the evaluation abscissa. The tensor construction
//! reproduces knot values exactly and is C2 across cell boundaries in both
//! directions, so gradients are continuous everywhere on the grid interior.

use crate::curve::CubicSpline;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TabulatedGrid {
    pub x1_grid: Vec<f64>,
    pub x2_grid: Vec<f64>,
    /// Row-major: values[j * nx + i] = V(x1_grid[i], x2_grid[j]).
    pub values: Vec<f64>,
    /// Transverse channel-floor position, if the author declares one.
    pub x2_center: Option<f64>,
    rows: Vec<CubicSpline>,
}

impl TabulatedGrid {
    pub fn new(
        x1_grid: Vec<f64>,
        x2_grid: Vec<f64>,
        values: Vec<f64>,
        x2_center: Option<f64>,
    ) -> Result<Self> {
        let (nx, ny) = (x1_grid.len(), x2_grid.len());
        if nx < 4 || ny < 4 {
            return Err(Error::invalid("tabulated grid needs at least 4x4 knots"));
        }
        if values.len() != nx * ny {
            return Err(Error::invalid(format!(
                "grid values length {} does not match {nx} x {ny}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite (NaN forbidden)"));
        }
        let mut rows = Vec::with_capacity(ny);
        for j in 0..ny {
            rows.push(CubicSpline::natural(&x1_grid, &values[j * nx..(j + 1) * nx])?);
        }
        Ok(TabulatedGrid { x1_grid, x2_grid, values, x2_center, rows })
    }

    pub fn validate(&self) -> Result<()> {
        // Construction already validated; kept for call symmetry.
        Ok(())
    }

    fn clamp(&self, x: [f64; 2]) -> [f64; 2] {
        [
            x[0].clamp(self.x1_grid[0], *self.x1_grid.last().unwrap()),
            x[1].clamp(self.x2_grid[0], *self.x2_grid.last().unwrap()),
        ]
    }

    /// Row interpolants and their x1-derivatives at fixed x1, splined in x2.
    fn column_splines(&self, x1: f64) -> (CubicSpline, CubicSpline, CubicSpline) {
        let ny = self.x2_grid.len();
        let mut f = Vec::with_capacity(ny);
        let mut fx = Vec::with_capacity(ny);
        let mut fxx = Vec::with_capacity(ny);
        for row in &self.rows {
            f.push(row.eval(x1));
            fx.push(row.deriv(x1));
            fxx.push(row.deriv2(x1));
        }
        (
            CubicSpline::natural(&self.x2_grid, &f).unwrap(),
            CubicSpline::natural(&self.x2_grid, &fx).unwrap(),
            CubicSpline::natural(&self.x2_grid, &fxx).unwrap(),
        )
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let x = self.clamp(x);
        let ny = self.x2_grid.len();
        let mut f = Vec::with_capacity(ny);
        for row in &self.rows {
            f.push(row.eval(x[0]));
        }
        CubicSpline::natural(&self.x2_grid, &f).unwrap().eval(x[1])
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let x = self.clamp(x);
        let (col_f, col_fx, _) = self.column_splines(x[0]);
        [col_fx.eval(x[1]), col_f.deriv(x[1])]
    }

    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let x = self.clamp(x);
        let (col_f, col_fx, col_fxx) = self.column_splines(x[0]);
        let v11 = col_fxx.eval(x[1]);
        let v12 = col_fx.deriv(x[1]);
        let v22 = col_f.deriv2(x[1]);
        [[v11, v12], [v12, v22]]
    }
}
