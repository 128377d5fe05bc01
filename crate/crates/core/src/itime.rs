//! Internal time along the extremal ray and the transverse frequency
//! profile.
//!
//! The quantum reduction replaces laboratory time by an internal clock read
//! off the image point's progress along the ray: with x1 the ray arclength
//! of the projected point and gamma0 the on-ray frame metric,
//!
//! ```text
//!     tau(s) = E_k^-1 integral_0^x1(s)  P(x1', 0) sqrt(gamma0(x1')) dx1'
//! ```
//!
//! tau runs forward while the trajectory advances toward the product
//! channel and backward while it retreats, so trapped trajectories fold the
//! clock; the fold points (extrema of tau) are what the resonance analysis
//! counts. The transverse vibration seen from the moving frame is a
//! parametric oscillator in tau whose frequency profile Omega^2(tau) is
//! assembled here from on-ray derivatives of the momentum P.

use crate::curve::CubicSpline;
use crate::error::{Error, Result};
use crate::geodesic::Trajectory;
use crate::ray::ExtremalRay;
use crate::special::gauss_legendre;
use crate::system::MomentumField;
use crate::units::HBAR;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// A fold of the internal clock: the projected coordinate reverses and the
/// one-sided slopes of tau(s) change sign across it.
#[derive(Clone, Copy, Debug)]
pub struct TauExtremum {
    /// Affine parameter of the trajectory sample at the fold.
    pub s: f64,
    pub kind: ExtremumKind,
    pub left_deriv: f64,
    pub right_deriv: f64,
}

/// Internal time evaluated on a trajectory's samples.
#[derive(Clone, Debug)]
pub struct InternalTimeSeries {
    /// Trajectory affine parameter per sample.
    pub s: Vec<f64>,
    pub tau: Vec<f64>,
    pub dtau_ds: Vec<f64>,
    /// Ray arclength of the projected point per sample.
    pub ray_s: Vec<f64>,
    pub extrema: Vec<TauExtremum>,
}

impl InternalTimeSeries {
    /// Monotone experienced time theta = integral |d tau|: the clock the
    /// oscillator actually advances by, folding or not.
    pub fn experienced(&self) -> Vec<f64> {
        let mut th = Vec::with_capacity(self.tau.len());
        let mut acc = 0.0;
        th.push(0.0);
        for w in self.tau.windows(2) {
            acc += (w[1] - w[0]).abs();
            th.push(acc);
        }
        th
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,tau,dtau_ds\n");
        for i in 0..self.s.len() {
            out.push_str(&format!("{},{},{}\n", self.s[i], self.tau[i], self.dtau_ds[i]));
        }
        out
    }

    pub fn extrema_to_json(&self) -> String {
        let items: Vec<serde_json::Value> = self
            .extrema
            .iter()
            .map(|e| {
                serde_json::json!({
                    "s": e.s,
                    "kind": match e.kind { ExtremumKind::Max => "max", ExtremumKind::Min => "min" },
                    "left_deriv": e.left_deriv,
                    "right_deriv": e.right_deriv,
                })
            })
            .collect();
        serde_json::Value::Array(items).to_string()
    }
}

/// Transverse oscillator frequency along the ray, parameterized by the
/// ray's own internal time.
#[derive(Clone, Debug)]
pub struct FrequencyProfile {
    /// Ray arclength per sample.
    pub s: Vec<f64>,
    pub tau: Vec<f64>,
    pub omega_sq: Vec<f64>,
    pub omega_in: f64,
    pub omega_out: f64,
}

#[derive(Clone, Debug)]
pub struct ItimeOptions {
    /// Negate the brace sum in Omega^2 (sensitivity variant; the default
    /// keeps the formula's literal overall sign).
    pub sign_flip: bool,
    /// Fraction of the ray arclength treated as each asymptotic tail.
    pub tail_frac: f64,
    /// Allowed relative spread of Omega^2 over a tail window.
    pub tail_rtol: f64,
    /// Spread floor: tails whose |mean| sits below this count as zero
    /// frequency rather than unsettled.
    pub tail_atol: f64,
    /// Reversal hysteresis as a fraction of ray length: the projected
    /// coordinate must back up this far before a fold is recorded.
    pub hysteresis_rel: f64,
}

impl Default for ItimeOptions {
    fn default() -> Self {
        ItimeOptions {
            sign_flip: false,
            tail_frac: 0.05,
            tail_rtol: 1e-2,
            tail_atol: 1e-10,
            hysteresis_rel: 1e-6,
        }
    }
}

/// Translational energy available at the standard launch point: E minus the
/// potential on the incoming channel floor at the launch abscissa.
pub fn incident_kinetic_energy(field: &MomentumField) -> f64 {
    let geom = field.surface().geometry();
    field.energy() - field.surface().value([geom.x1_launch, geom.x2_in_center])
}

/// Dimensionless transverse coordinate z = (hbar E_k)^(-1/2) p x2.
/// Requires p > 0 (classically allowed on-ray point) and E_k > 0.
pub fn z_coordinate(x2: f64, p: f64, e_k: f64) -> f64 {
    p * x2 / (HBAR * e_k).sqrt()
}

/// Moving-frame metric factors (gamma11, gamma22) at ray sample `i` and
/// normal offset `x2`. Both are squares of frame stretch factors; the error
/// reports the frame folding over itself (a stretch factor reaching zero),
/// which the squares alone would hide.
pub fn gamma_metric(
    ray: &ExtremalRay,
    field: &MomentumField,
    i: usize,
    x2: f64,
) -> Result<(f64, f64)> {
    let c = ray.curvature_data(field, i)?;
    let f1 = 1.0 + c.lambda * c.rho1_inv;
    let f2 = 1.0 + x2 * c.rho2_inv;
    if f1 <= 0.0 || f2 <= 0.0 {
        return Err(Error::Projection(format!(
            "moving frame breaks down at s = {} for offset {x2}: stretch factors ({f1}, {f2})",
            ray.samples()[i].s
        )));
    }
    Ok((f1 * f1, f2 * f2))
}

/// Cumulative internal-time clock along the ray: tau as a function of ray
/// arclength, built by per-segment Gauss-Legendre quadrature of
/// P sqrt(gamma0) / E_k.
struct RayClock {
    tau_of_s: CubicSpline,
}

impl RayClock {
    fn new(ray: &ExtremalRay, field: &MomentumField, e_k: f64) -> Result<RayClock> {
        if e_k <= 0.0 {
            return Err(Error::invalid(format!("kinetic energy scale {e_k} must be positive")));
        }
        let knots: Vec<f64> = ray.samples().iter().map(|sm| sm.s).collect();
        let (nodes, weights) = gauss_legendre(5);
        let mut tau = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        tau.push(0.0);
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut seg = 0.0;
            for (t, wt) in nodes.iter().zip(&weights) {
                seg += wt * clock_rate(ray, field, mid + half * t);
            }
            acc += half * seg;
            tau.push(acc / e_k);
        }
        Ok(RayClock { tau_of_s: CubicSpline::natural(&knots, &tau)? })
    }

    fn tau(&self, s: f64) -> f64 {
        self.tau_of_s.eval(s)
    }
}

/// Frame stretch factor 1 + lambda/rho1 is a semiclassical correction, valid
/// where lambda << rho1; toward a turning locus the raw value diverges (P in
/// the denominator of lambda and of rho1^-1), which would make tau
/// log-divergent at every fold. The factor is honored literally wherever
/// |lambda/rho1| <= 1/2 and clamped to this band beyond it, where its
/// derivation has already broken down.
const STRETCH_BAND: (f64, f64) = (0.5, 1.5);

/// P(x1, 0) sqrt(gamma0) at ray arclength s, from direct surface evaluation
/// at the curve point (not sample interpolation). Zero in classically
/// forbidden bands of the ray: the clock saturates there instead of
/// crossing, so tau past a barrier the energy cannot cross is a frozen
/// continuation (no allowed trajectory projects there).
fn clock_rate(ray: &ExtremalRay, field: &MomentumField, s: f64) -> f64 {
    let x = ray.curve().point(s);
    let p_sq = field.p0_sq_unchecked(x);
    if !(p_sq > 0.0) {
        return 0.0;
    }
    let p = p_sq.sqrt();
    let t = ray.curve().tangent(s);
    let g = field.surface().gradient(x);
    let p1 = -field.mu0() * (g[0] * t[0] + g[1] * t[1]) / p;
    // gamma0 = (1 + lambda/rho1)^2 with lambda/rho1 = hbar p,1 / p^2.
    let stretch = (1.0 + HBAR * p1 / p_sq).clamp(STRETCH_BAND.0, STRETCH_BAND.1);
    p * stretch
}

/// Whether the straight segment between two points stays inside the domain
/// and classically allowed, so the moving-frame chart connects them.
fn chart_connects(field: &MomentumField, a: [f64; 2], b: [f64; 2]) -> bool {
    let n = 24;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        if !field.surface().contains(x) || !(field.p0_sq_unchecked(x) > 0.0) {
            return false;
        }
    }
    true
}

/// Beyond this projection distance the normal-bundle chart reading is
/// meaningless regardless of connectivity (half the smaller domain extent).
const CHART_RANGE: f64 = 3.0;

/// Internal time of a trajectory with default options.
pub fn internal_time(
    field: &MomentumField,
    traj: &Trajectory,
    ray: &ExtremalRay,
    e_k: f64,
) -> Result<InternalTimeSeries> {
    internal_time_with(field, traj, ray, e_k, &ItimeOptions::default())
}

pub fn internal_time_with(
    field: &MomentumField,
    traj: &Trajectory,
    ray: &ExtremalRay,
    e_k: f64,
    opts: &ItimeOptions,
) -> Result<InternalTimeSeries> {
    let clock = RayClock::new(ray, field, e_k)?;
    let tube = ray.tube_radius();
    let n = traj.samples.len();
    let mut s_out = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut ray_s = Vec::with_capacity(n);
    let mut guess = None;
    for st in &traj.samples {
        let (mut rs, mut dist, _off) = match guess {
            None => ray.curve().project(st.x),
            Some(g) => ray.curve().project_from(st.x, g),
        };
        // Within the tube radius the chart is valid unconditionally; farther
        // out validity is checked pointwise (channel widths vary by several
        // fold along the ray, and product-side vibration legitimately
        // exceeds the narrowest section's half-width). A warm-started
        // projection can also latch onto the wrong branch while an orbit
        // loops through the junction region, so an invalid chart first
        // retries from a global scan.
        let mut ok =
            dist <= tube || (dist <= CHART_RANGE && chart_connects(field, ray.curve().point(rs), st.x));
        if !ok {
            let (grs, gdist, _) = ray.curve().project(st.x);
            if gdist < dist
                && (gdist <= tube
                    || (gdist <= CHART_RANGE
                        && chart_connects(field, ray.curve().point(grs), st.x)))
            {
                rs = grs;
                dist = gdist;
                ok = true;
            }
        }
        if !ok {
            return Err(Error::Projection(format!(
                "trajectory leaves the ray tube at s = {}: distance {dist:.4} from the ray \
                 (guaranteed radius {tube:.4}) crosses outside the frame chart",
                st.s
            )));
        }
        guess = Some(rs);
        // The chart ends with the ray: once the projection closes to within
        // a tube radius of either curve end the along-ray coordinate starts
        // clamping against the endpoint, so the series stops there.
        if !s_out.is_empty() && (rs > ray.length() - tube || rs < tube) {
            break;
        }
        s_out.push(st.s);
        ray_s.push(rs);
        tau.push(clock.tau(rs));
    }
    // Clock rate along the trajectory by differencing the series itself: the
    // chain rule through the frame Jacobian is exact only where the ray
    // curvature is resolved, and the junction of steepest-descent branches
    // concentrates curvature right where trapped orbits project.
    let n = s_out.len();
    let mut dtau_ds = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = if i == 0 {
            (0, 1.min(n - 1))
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let den = s_out[b] - s_out[a];
        dtau_ds.push(if den > 0.0 { (tau[b] - tau[a]) / den } else { 0.0 });
    }
    let extrema = find_extrema(&s_out, &tau, &ray_s, opts.hysteresis_rel * ray.length());
    Ok(InternalTimeSeries { s: s_out, tau, dtau_ds, ray_s, extrema })
}

/// Turning points of the projected coordinate with hysteresis `amp`: a
/// reversal must back away from the running extreme by more than `amp`
/// before it is recorded, which suppresses projection jitter.
fn find_extrema(s: &[f64], tau: &[f64], ray_s: &[f64], amp: f64) -> Vec<TauExtremum> {
    let n = ray_s.len();
    let mut out = Vec::new();
    if n < 3 {
        return out;
    }
    let mut dir = 0i8;
    let mut ext = 0usize;
    for i in 1..n {
        match dir {
            0 => {
                if (ray_s[i] - ray_s[0]).abs() > amp {
                    dir = if ray_s[i] > ray_s[0] { 1 } else { -1 };
                    ext = i;
                }
            }
            1 => {
                if ray_s[i] > ray_s[ext] {
                    ext = i;
                } else if ray_s[ext] - ray_s[i] > amp {
                    out.push(make_extremum(s, tau, ray_s, ext, ExtremumKind::Max, amp));
                    dir = -1;
                    ext = i;
                }
            }
            _ => {
                if ray_s[i] < ray_s[ext] {
                    ext = i;
                } else if ray_s[i] - ray_s[ext] > amp {
                    out.push(make_extremum(s, tau, ray_s, ext, ExtremumKind::Min, amp));
                    dir = 1;
                    ext = i;
                }
            }
        }
    }
    out
}

/// One-sided tau slopes across the fold, taken over the nearest samples
/// whose projected coordinate differs from the extreme by more than `amp`
/// so the slopes carry definite signs.
fn make_extremum(
    s: &[f64],
    tau: &[f64],
    ray_s: &[f64],
    j: usize,
    kind: ExtremumKind,
    amp: f64,
) -> TauExtremum {
    let jl = (0..j)
        .rev()
        .find(|&k| (ray_s[j] - ray_s[k]).abs() > amp)
        .unwrap_or(j.saturating_sub(1));
    let jr = (j + 1..ray_s.len())
        .find(|&k| (ray_s[k] - ray_s[j]).abs() > amp)
        .unwrap_or((j + 1).min(ray_s.len() - 1));
    TauExtremum {
        s: s[j],
        kind,
        left_deriv: (tau[j] - tau[jl]) / (s[j] - s[jl]),
        right_deriv: (tau[jr] - tau[j]) / (s[jr] - s[j]),
    }
}

/// Frequency profile along the ray with default options.
pub fn omega_profile(
    ray: &ExtremalRay,
    field: &MomentumField,
    e_k: f64,
) -> Result<FrequencyProfile> {
    omega_profile_with(ray, field, e_k, &ItimeOptions::default())
}

/// Omega^2(tau) = -(E_k/p)^2 { 1/rho2^2 + sum_k [ p_;kk / p + (p_;k / p)^2 ] }
/// with covariant derivatives taken in the moving-frame metric evaluated on
/// the ray. The overall sign is the formula's literal one unless
/// `opts.sign_flip` negates the brace sum.
pub fn omega_profile_with(
    ray: &ExtremalRay,
    field: &MomentumField,
    e_k: f64,
    opts: &ItimeOptions,
) -> Result<FrequencyProfile> {
    if e_k <= 0.0 {
        return Err(Error::invalid(format!("kinetic energy scale {e_k} must be positive")));
    }
    let mu0 = field.mu0();
    let energy = field.energy();
    let samples = ray.samples();
    let n = samples.len();
    // On-ray momentum derivatives in ray coordinates. ln(1 + lambda/rho1)
    // is differenced along s afterwards for the frame correction to p_;11.
    let mut p_all = Vec::with_capacity(n);
    let mut p1_all = Vec::with_capacity(n);
    let mut p2_all = Vec::with_capacity(n);
    let mut p11_all = Vec::with_capacity(n);
    let mut p22_all = Vec::with_capacity(n);
    let mut lng = Vec::with_capacity(n);
    for sm in samples {
        let p_sq = 2.0 * mu0 * (energy - sm.v);
        if p_sq <= 0.0 {
            return Err(Error::Forbidden(energy - sm.v, sm.x[0], sm.x[1]));
        }
        let p = p_sq.sqrt();
        let p1 = -mu0 * sm.vt / p;
        let p2 = -mu0 * sm.vn / p;
        // Hessian of p = sqrt(2 mu0 (E - V)) contracted with the frame:
        // H_p = -(mu0/p) H_V - (mu0^2/p^3) grad V (x) grad V.
        let t_hp_t = -mu0 * sm.vtt / p - mu0 * mu0 * sm.vt * sm.vt / (p * p_sq);
        let n_hp_n = -mu0 * sm.vnn / p - mu0 * mu0 * sm.vn * sm.vn / (p * p_sq);
        // Second derivative along the ray picks up the path curvature:
        // d^2/ds^2 p(r(s)) = t.H_p.t + kappa (n . grad p).
        let p11 = t_hp_t + sm.curvature * p2;
        let p22 = n_hp_n;
        let stretch = 1.0 + HBAR * p1 / p_sq;
        if stretch <= 0.0 {
            return Err(Error::Projection(format!(
                "on-ray frame stretch {stretch} non-positive at s = {}",
                sm.s
            )));
        }
        p_all.push(p);
        p1_all.push(p1);
        p2_all.push(p2);
        p11_all.push(p11);
        p22_all.push(p22);
        lng.push(stretch.ln());
    }
    let ds = samples[1].s - samples[0].s;
    let mut omega_sq = Vec::with_capacity(n);
    for i in 0..n {
        let (p, p1, p2) = (p_all[i], p1_all[i], p2_all[i]);
        // Frame Christoffel corrections on the ray: {1,11} = d/ds ln(1 +
        // lambda/rho1) and {2,22} = 1/rho2 = p,2 / p; the mixed symbols
        // vanish at x2 = 0.
        let g111 = if i == 0 {
            (lng[1] - lng[0]) / ds
        } else if i == n - 1 {
            (lng[n - 1] - lng[n - 2]) / ds
        } else {
            (lng[i + 1] - lng[i - 1]) / (2.0 * ds)
        };
        let pc11 = p11_all[i] - g111 * p1;
        let pc22 = p22_all[i] - (p2 / p) * p2;
        let rho2_inv = p2 / p;
        let braces = rho2_inv * rho2_inv
            + pc11 / p
            + (p1 / p) * (p1 / p)
            + pc22 / p
            + (p2 / p) * (p2 / p);
        let sign = if opts.sign_flip { 1.0 } else { -1.0 };
        omega_sq.push(sign * (e_k / p) * (e_k / p) * braces);
    }
    let clock = RayClock::new(ray, field, e_k)?;
    let s: Vec<f64> = samples.iter().map(|sm| sm.s).collect();
    let tau: Vec<f64> = s.iter().map(|&si| clock.tau(si)).collect();
    let m = ((n as f64 * opts.tail_frac) as usize).max(2);
    let omega_in = tail_frequency(&omega_sq[..m], "incoming", opts)?;
    let omega_out = tail_frequency(&omega_sq[n - m..], "outgoing", opts)?;
    Ok(FrequencyProfile { s, tau, omega_sq, omega_in, omega_out })
}

/// Average a tail window into an asymptotic frequency, requiring the window
/// to have settled.
fn tail_frequency(window: &[f64], which: &str, opts: &ItimeOptions) -> Result<f64> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let var = window.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / n;
    let spread = var.sqrt();
    if spread > opts.tail_rtol * mean.abs().max(opts.tail_atol / opts.tail_rtol) {
        return Err(Error::Asymptote(format!(
            "{which} tail has not settled: Omega^2 = {mean:.6e} with spread {spread:.2e}"
        )));
    }
    if mean < -opts.tail_atol {
        return Err(Error::Asymptote(format!(
            "{which} tail Omega^2 = {mean:.6e} is negative: no oscillatory asymptote"
        )));
    }
    Ok(mean.max(0.0).sqrt())
}
