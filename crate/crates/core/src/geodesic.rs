//! Trajectory integration on the energy-scaled metric, outcome
//! classification, and an independent fixed-step Newtonian cross-check.
//!
//! The metric g_ik = P0^2 delta_ik turns fixed-energy mechanics into
//! geodesic flow, but its affine form degenerates on the turning locus
//! P0 = 0, where the affine velocity diverges. The production integrator
//! therefore advances the regular Newtonian equations mu0 xdd = -grad V in
//! physical time and carries the affine parameter alongside through
//! ds = 2 (E - V) dt, which reproduces the geodesic exactly wherever both
//! exist. The direct affine-form integrator is kept for interior
//! cross-validation, and [`newton_oracle`] re-derives trajectories with a
//! velocity-Verlet scheme that shares no code with the adaptive integrator.

use crate::error::{Error, Result};
use crate::ode::{self, Direction, Event, Stop};
use crate::system::{GeometryKind, MomentumField, PairParams, PotentialSurface};

/// Point, affine velocity dx/ds, and affine parameter along a geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicState {
    pub x: [f64; 2],
    pub v: [f64; 2],
    pub s: f64,
}

impl GeodesicState {
    /// Standard scattering start: on the incoming channel axis at the launch
    /// abscissa, aimed at the interaction region, metric speed 1.
    /// `x2_offset` is measured from the channel floor.
    pub fn incoming(field: &MomentumField, x2_offset: f64) -> Result<GeodesicState> {
        let geom = field.surface().geometry();
        let x = [geom.x1_launch, geom.x2_in_center + x2_offset];
        let p0_sq = field.p0_sq(x)?;
        if p0_sq <= 0.0 {
            return Err(Error::Forbidden(p0_sq / (2.0 * field.mu0()), x[0], x[1]));
        }
        Ok(GeodesicState { x, v: [1.0 / p0_sq.sqrt(), 0.0], s: 0.0 })
    }

    /// Metric speed g_ij v^i v^j; 1 on a normalized geodesic.
    pub fn metric_speed(&self, field: &MomentumField) -> Result<f64> {
        let p0_sq = field.p0_sq(self.x)?;
        Ok(p0_sq * (self.v[0] * self.v[0] + self.v[1] * self.v[1]))
    }
}

/// Final channel assignment of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeLabel {
    /// Back out the incoming channel, target molecule intact.
    Reflect,
    /// Out the rearrangement channel: new molecule, light atom leaves.
    Rearrange,
    /// Enough internal energy in the surviving pair to break it too.
    Dissociate,
    /// Still in the interaction region when the budget ran out.
    Trapped,
}

impl OutcomeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutcomeLabel::Reflect => "reflect",
            OutcomeLabel::Rearrange => "rearrange",
            OutcomeLabel::Dissociate => "dissociate",
            OutcomeLabel::Trapped => "trapped",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Outcome {
    pub label: OutcomeLabel,
    /// Transverse coordinate of the exit channel at the final sample: the
    /// surviving bond length for reflect/rearrange, x2 otherwise.
    pub exit_channel_coordinate: f64,
    /// Dwell arclength in the interaction region exceeded the threshold
    /// before exit (long-lived intermediate complex).
    pub resonance_flag: bool,
}

/// Integration quality numbers recorded with every trajectory.
#[derive(Clone, Copy, Debug, Default)]
pub struct Diagnostics {
    /// max |T + V - E| over the samples.
    pub energy_drift: f64,
    /// max |g_ij v^i v^j - 1| over the samples.
    pub speed_drift: f64,
    /// Euclidean arclength spent inside the interaction disk.
    pub dwell_arc: f64,
    pub n_steps: usize,
    pub n_rejected: usize,
}

/// An integrated trajectory: geodesic samples, the physical time of each,
/// the outcome, and quality diagnostics.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    pub newton_time: Vec<f64>,
    pub outcome: Outcome,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// Position at affine parameter `s` by cubic Hermite interpolation
    /// between samples (clamped to the covered span).
    pub fn position_at_s(&self, s: f64) -> [f64; 2] {
        let n = self.samples.len();
        if n == 1 {
            return self.samples[0].x;
        }
        let sc = s.clamp(self.samples[0].s, self.samples[n - 1].s);
        let k = match self
            .samples
            .binary_search_by(|a| a.s.partial_cmp(&sc).unwrap())
        {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        ode::hermite(a.s, &a.x, &a.v, b.s, &b.x, &b.v, sc)
    }

    /// CSV export: s, t, x1, x2, v1, v2, V, P0sq. Affine velocities.
    pub fn to_csv(&self, field: &MomentumField) -> String {
        let mut out = String::from("s,t,x1,x2,v1,v2,V,P0sq\n");
        for (st, t) in self.samples.iter().zip(&self.newton_time) {
            let v_pot = field.surface().value(st.x);
            let p0_sq = field.p0_sq_unchecked(st.x);
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                st.s, t, st.x[0], st.x[1], st.v[0], st.v[1], v_pot, p0_sq
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    /// Affine-parameter budget; exceeding it classifies as trapped.
    pub s_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Dwell arclength that marks a resonant intermediate; when unset, a
    /// geometry-derived default of 3 interaction-disk diameters is used
    /// (the map pipeline passes the extremal-ray transit instead).
    pub dwell_threshold: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            s_max: 400.0,
            rtol: 1e-9,
            atol: 1e-12,
            dwell_threshold: None,
            max_steps: 50_000_000,
        }
    }
}

/// Conformal-metric Christoffel symbols at a point, from phi = ln P0.
/// Index convention: `c1_12` is the symbol with upper index 1 and lower
/// indices (1,2); the metric is symmetric so (2,1) entries coincide.
#[derive(Clone, Copy, Debug)]
pub struct Christoffel {
    pub c1_11: f64,
    pub c1_12: f64,
    pub c1_22: f64,
    pub c2_11: f64,
    pub c2_12: f64,
    pub c2_22: f64,
}

pub fn christoffel(field: &MomentumField, x: [f64; 2]) -> Result<Christoffel> {
    let phi = field.grad_log_p0(x)?;
    Ok(Christoffel {
        c1_11: phi[0],
        c1_12: phi[1],
        c1_22: -phi[0],
        c2_11: -phi[1],
        c2_12: phi[0],
        c2_22: phi[1],
    })
}

/// Interaction-disk membership for dwell accounting.
fn in_interaction_disk(surface: &PotentialSurface, x: [f64; 2]) -> bool {
    let geom = surface.geometry();
    let dx = x[0] - geom.x1_corner;
    let dy = x[1] - geom.x2_in_center;
    dx * dx + dy * dy <= geom.r_interaction * geom.r_interaction
}

/// Geometry-only fallback for the dwell threshold: three diameters of the
/// interaction disk.
pub fn default_dwell_threshold(surface: &PotentialSurface) -> f64 {
    6.0 * surface.geometry().r_interaction
}

/// Dwell threshold derived from the reaction path: three times its transit
/// arclength through the interaction disk.
pub fn dwell_threshold_from_ray(ray: &crate::ray::ExtremalRay, surface: &PotentialSurface) -> f64 {
    let mut arc = 0.0;
    let samples = ray.samples();
    for w in samples.windows(2) {
        if in_interaction_disk(surface, w[0].x) && in_interaction_disk(surface, w[1].x) {
            arc += w[1].s - w[0].s;
        }
    }
    3.0 * arc
}

/// Exit-detection function: crosses zero from below when the point leaves
/// the interaction region for an asymptotic channel.
fn exit_function(surface: &PotentialSurface, x: [f64; 2]) -> f64 {
    let geom = surface.geometry();
    match &geom.kind {
        GeometryKind::Bonds { r_far_ab, r_far_bc, .. } => {
            let (r_ab, r_bc) = surface.masses().bond_lengths(x);
            (r_ab - r_far_ab).max(r_bc - r_far_bc)
        }
        GeometryKind::Straight { .. } => (x[0] - geom.x1_corner).abs() - geom.r_asym,
    }
}

fn pair_morse(p: &PairParams, r: f64) -> f64 {
    let e = (-p.a * (r - p.r0)).exp();
    p.d * (e * e - 2.0 * e)
}

/// Label the final state of a terminated trajectory.
///
/// `exited` is false when the integration ran out of budget inside the
/// interaction region. Velocity is Newtonian (dx/dt). A pair that leaves
/// with positive total internal energy relative to its dissociation plateau
/// cannot stay bound, so such exits count as three-body breakup.
pub fn classify(
    surface: &PotentialSurface,
    x: [f64; 2],
    u: [f64; 2],
    exited: bool,
    dwell_arc: f64,
    dwell_threshold: f64,
) -> Outcome {
    let resonance_flag = dwell_arc > dwell_threshold;
    if !exited {
        return Outcome {
            label: OutcomeLabel::Trapped,
            exit_channel_coordinate: x[1],
            resonance_flag,
        };
    }
    let m = surface.masses();
    let geom = surface.geometry();
    let (label, coord) = match &geom.kind {
        GeometryKind::Bonds { r_far_ab, r_far_bc, ab_pair, bc_pair, .. } => {
            let (r_ab, r_bc) = m.bond_lengths(x);
            let (rd_ab, rd_bc) = m.bond_rates(u);
            let mu_ab = m.m_a * m.m_b / (m.m_a + m.m_b);
            let mu_bc = m.m_b * m.m_c / (m.m_b + m.m_c);
            let vib_bc = 0.5 * mu_bc * rd_bc * rd_bc + pair_morse(bc_pair, r_bc);
            let vib_ab = 0.5 * mu_ab * rd_ab * rd_ab + pair_morse(ab_pair, r_ab);
            if r_ab >= *r_far_ab && r_bc >= *r_far_bc {
                (OutcomeLabel::Dissociate, x[1])
            } else if r_ab >= *r_far_ab {
                if vib_bc < 0.0 {
                    (OutcomeLabel::Reflect, r_bc)
                } else {
                    (OutcomeLabel::Dissociate, r_bc)
                }
            } else if vib_ab < 0.0 {
                (OutcomeLabel::Rearrange, r_ab)
            } else {
                (OutcomeLabel::Dissociate, r_ab)
            }
        }
        GeometryKind::Straight { dissociation_energy } => {
            let mu0 = m.reduced_mass();
            let floor = surface.value([x[0], geom.x2_in_center]);
            let internal = 0.5 * mu0 * u[1] * u[1] + surface.value(x) - floor;
            let broke = dissociation_energy.map_or(false, |de| internal >= de);
            if broke {
                (OutcomeLabel::Dissociate, x[1])
            } else if x[0] < geom.x1_corner {
                (OutcomeLabel::Reflect, x[1])
            } else {
                (OutcomeLabel::Rearrange, x[1])
            }
        }
    };
    Outcome { label, exit_channel_coordinate: coord, resonance_flag }
}

/// Production integrator: Newtonian equations in physical time with the
/// affine parameter as a quadrature component, adaptive 5(4) pair, exit
/// events on the channel geometry.
///
/// The initial state must be classically allowed with metric speed 1 (see
/// [`GeodesicState::incoming`]).
pub fn integrate(
    field: &MomentumField,
    ic: &GeodesicState,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let surface = field.surface();
    if !surface.contains(ic.x) {
        return Err(Error::OutsideDomain(ic.x[0], ic.x[1]));
    }
    let speed = ic.metric_speed(field)?;
    if (speed - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "initial metric speed {speed} is not normalized to 1"
        )));
    }
    let energy = field.energy();
    let mu0 = field.mu0();
    let p0_sq0 = field.p0_sq(ic.x)?;
    // dx/dt = (dx/ds)(ds/dt), with ds/dt = P0^2 / mu0 = 2 (E - V).
    let u0 = [ic.v[0] * p0_sq0 / mu0, ic.v[1] * p0_sq0 / mu0];

    let rhs = |_t: f64, y: &[f64; 5], dy: &mut [f64; 5]| {
        let x = [y[0], y[1]];
        let g = surface.gradient(x);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -g[0] / mu0;
        dy[3] = -g[1] / mu0;
        dy[4] = 2.0 * (energy - surface.value(x));
    };
    let exit = Event {
        g: Box::new(|_t, y: &[f64; 5]| exit_function(surface, [y[0], y[1]])),
        direction: Direction::Rising,
        terminal: true,
    };
    let stop_s = Event {
        g: Box::new(|_t, y: &[f64; 5]| y[4] - opts.s_max),
        direction: Direction::Rising,
        terminal: true,
    };
    // Generous physical-time ceiling; the affine budget is the real limit.
    let t_end = opts.s_max / (2.0 * energy).max(1e-6) * 50.0 + 1.0;
    let ode_opts = ode::Options {
        rtol: opts.rtol,
        atol: opts.atol,
        h_initial: 1e-4,
        h_max: f64::INFINITY,
        max_steps: opts.max_steps,
    };
    let y0 = [ic.x[0], ic.x[1], u0[0], u0[1], ic.s];
    let sol = ode::integrate(&rhs, 0.0, y0, t_end, &ode_opts, &[exit, stop_s])?;
    let exited = sol.stop == Stop::Event(0);

    // Dwell arclength: resample each accepted interval finely enough that
    // the disk boundary is resolved to ~0.02 length units.
    let mut dwell_arc = 0.0;
    for k in 0..sol.t.len().saturating_sub(1) {
        let (ta, tb) = (sol.t[k], sol.t[k + 1]);
        let chord = {
            let (a, b) = (&sol.y[k], &sol.y[k + 1]);
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        };
        let pieces = (chord / 0.02).ceil().max(1.0) as usize;
        let mut prev = [sol.y[k][0], sol.y[k][1]];
        for j in 1..=pieces {
            let t = ta + (tb - ta) * j as f64 / pieces as f64;
            let yj = sol.sample(t);
            let cur = [yj[0], yj[1]];
            if in_interaction_disk(surface, prev) && in_interaction_disk(surface, cur) {
                dwell_arc +=
                    ((cur[0] - prev[0]).powi(2) + (cur[1] - prev[1]).powi(2)).sqrt();
            }
            prev = cur;
        }
    }

    let mut samples = Vec::with_capacity(sol.t.len());
    let mut energy_drift = 0.0f64;
    let mut speed_drift = 0.0f64;
    for y in &sol.y {
        let x = [y[0], y[1]];
        let u = [y[2], y[3]];
        let v_pot = surface.value(x);
        let e_here = 0.5 * mu0 * (u[0] * u[0] + u[1] * u[1]) + v_pot;
        energy_drift = energy_drift.max((e_here - energy).abs());
        let dsdt = 2.0 * (energy - v_pot);
        let v = if dsdt > 0.0 { [u[0] / dsdt, u[1] / dsdt] } else { [f64::NAN; 2] };
        if dsdt > 0.0 {
            let p0_sq = 2.0 * mu0 * (energy - v_pot);
            speed_drift =
                speed_drift.max((p0_sq * (v[0] * v[0] + v[1] * v[1]) - 1.0).abs());
        }
        samples.push(GeodesicState { x, v, s: y[4] });
    }

    let threshold = opts
        .dwell_threshold
        .unwrap_or_else(|| default_dwell_threshold(surface));
    let last = sol.last_y();
    let outcome = classify(surface, [last[0], last[1]], [last[2], last[3]], exited, dwell_arc, threshold);
    Ok(Trajectory {
        samples,
        newton_time: sol.t,
        outcome,
        diagnostics: Diagnostics {
            energy_drift,
            speed_drift,
            dwell_arc,
            n_steps: sol.n_steps,
            n_rejected: sol.n_rejected,
        },
    })
}

/// Direct affine-form integration of the geodesic equations, for interior
/// cross-validation. Valid only away from the turning locus: the run stops
/// with an error if P0^2 falls under `p0_sq_floor` (the affine velocity
/// diverges there and no step size is adequate).
pub fn integrate_affine(
    field: &MomentumField,
    ic: &GeodesicState,
    s_span: f64,
    rtol: f64,
    p0_sq_floor: f64,
) -> Result<Vec<GeodesicState>> {
    let speed = ic.metric_speed(field)?;
    if (speed - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "initial metric speed {speed} is not normalized to 1"
        )));
    }
    let rhs = |_s: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
        let x = [y[0], y[1]];
        match field.grad_log_p0(x) {
            Ok(phi) => {
                let (v1, v2) = (y[2], y[3]);
                dy[0] = v1;
                dy[1] = v2;
                // Conformal symbols contracted with v v.
                dy[2] = -(phi[0] * v1 * v1 + 2.0 * phi[1] * v1 * v2 - phi[0] * v2 * v2);
                dy[3] = -(-phi[1] * v1 * v1 + 2.0 * phi[0] * v1 * v2 + phi[1] * v2 * v2);
            }
            Err(_) => {
                *dy = [f64::NAN; 4];
            }
        }
    };
    let turning = Event {
        g: Box::new(|_s, y: &[f64; 4]| {
            p0_sq_floor - field.p0_sq_unchecked([y[0], y[1]])
        }),
        direction: Direction::Rising,
        terminal: true,
    };
    let opts = ode::Options { rtol, atol: 1e-12, ..ode::Options::default() };
    let y0 = [ic.x[0], ic.x[1], ic.v[0], ic.v[1]];
    let sol = ode::integrate(&rhs, ic.s, y0, ic.s + s_span, &opts, &[turning])?;
    if sol.stop == Stop::Event(0) {
        let last = sol.last_y();
        return Err(Error::Forbidden(
            field.p0_sq_unchecked([last[0], last[1]]) / (2.0 * field.mu0()),
            last[0],
            last[1],
        ));
    }
    Ok(sol
        .t
        .iter()
        .zip(&sol.y)
        .map(|(s, y)| GeodesicState { x: [y[0], y[1]], v: [y[2], y[3]], s: *s })
        .collect())
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Fixed Verlet step in physical time.
    pub dt: f64,
    pub t_max: f64,
    /// Store every k-th step (the first and last are always kept).
    pub sample_every: usize,
    pub dwell_threshold: Option<f64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { dt: 1e-4, t_max: 500.0, sample_every: 10, dwell_threshold: None }
    }
}

/// Independent verification path: velocity-Verlet at fixed step on the same
/// Newtonian equations, affine parameter by Simpson quadrature of
/// ds = 2 (E - V) dt. Takes a position and a Newtonian velocity whose
/// kinetic energy matches E - V to 1e-10.
pub fn newton_oracle(
    surface: &PotentialSurface,
    energy: f64,
    x0: [f64; 2],
    u0: [f64; 2],
    opts: &OracleOptions,
) -> Result<Trajectory> {
    if !surface.contains(x0) {
        return Err(Error::OutsideDomain(x0[0], x0[1]));
    }
    let mu0 = surface.masses().reduced_mass();
    let kin = 0.5 * mu0 * (u0[0] * u0[0] + u0[1] * u0[1]);
    let mismatch = (kin - (energy - surface.value(x0))).abs();
    if mismatch > 1e-10 * (1.0 + energy.abs()) {
        return Err(Error::invalid(format!(
            "kinetic energy off the energy shell by {mismatch}"
        )));
    }
    let accel = |x: [f64; 2]| {
        let g = surface.gradient(x);
        [-g[0] / mu0, -g[1] / mu0]
    };

    let dt = opts.dt;
    let n_max = (opts.t_max / dt).ceil() as usize;
    let mut x = x0;
    let mut u = u0;
    let mut a = accel(x);
    let mut s = 0.0;
    let mut t = 0.0;
    let mut dwell_arc = 0.0;
    let mut samples = vec![GeodesicState { x, v: affine_v(surface, energy, x, u), s }];
    let mut newton_time = vec![0.0];
    let mut energy_drift = 0.0f64;
    // The standard launch point sits exactly on the exit locus, so the
    // detector only arms once the point has been strictly inside.
    let mut armed = exit_function(surface, x) < 0.0;
    let mut exited = false;
    let mut n_steps = 0;

    for step in 0..n_max {
        let uh = [u[0] + 0.5 * dt * a[0], u[1] + 0.5 * dt * a[1]];
        let x_new = [x[0] + dt * uh[0], x[1] + dt * uh[1]];
        if !surface.contains(x_new) {
            return Err(Error::OutsideDomain(x_new[0], x_new[1]));
        }
        let x_mid = [x[0] + 0.5 * dt * uh[0], x[1] + 0.5 * dt * uh[1]];
        let a_new = accel(x_new);
        let u_new = [uh[0] + 0.5 * dt * a_new[0], uh[1] + 0.5 * dt * a_new[1]];

        let f0 = 2.0 * (energy - surface.value(x));
        let fm = 2.0 * (energy - surface.value(x_mid));
        let f1 = 2.0 * (energy - surface.value(x_new));
        let mut t_new = t + dt;
        let mut s_new = s + dt / 6.0 * (f0 + 4.0 * fm + f1);

        if in_interaction_disk(surface, x) && in_interaction_disk(surface, x_new) {
            dwell_arc += dt * (uh[0] * uh[0] + uh[1] * uh[1]).sqrt();
        }

        let (mut xf, mut uf) = (x_new, u_new);
        if !armed {
            armed = exit_function(surface, x_new) < 0.0;
        } else if exit_function(surface, x_new) >= 0.0 {
            // Bisect the crossing on the drift line of this step.
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let xm = [x[0] + mid * dt * uh[0], x[1] + mid * dt * uh[1]];
                if exit_function(surface, xm) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let frac = hi;
            xf = [x[0] + frac * dt * uh[0], x[1] + frac * dt * uh[1]];
            uf = [u[0] + frac * dt * a[0], u[1] + frac * dt * a[1]];
            t_new = t + frac * dt;
            s_new = s + frac * dt * 0.5 * (f0 + (2.0 * (energy - surface.value(xf))));
            exited = true;
        }

        x = xf;
        u = uf;
        a = if exited { a } else { a_new };
        t = t_new;
        s = s_new;
        n_steps = step + 1;

        let e_here = 0.5 * mu0 * (u[0] * u[0] + u[1] * u[1]) + surface.value(x);
        if step % 64 == 0 || exited {
            energy_drift = energy_drift.max((e_here - energy).abs());
        }
        if exited || step % opts.sample_every == 0 || step + 1 == n_max {
            samples.push(GeodesicState { x, v: affine_v(surface, energy, x, u), s });
            newton_time.push(t);
        }
        if exited {
            break;
        }
    }

    let threshold = opts
        .dwell_threshold
        .unwrap_or_else(|| default_dwell_threshold(surface));
    let outcome = classify(surface, x, u, exited, dwell_arc, threshold);
    Ok(Trajectory {
        samples,
        newton_time,
        outcome,
        diagnostics: Diagnostics {
            energy_drift,
            speed_drift: 0.0,
            dwell_arc,
            n_steps,
            n_rejected: 0,
        },
    })
}

fn affine_v(surface: &PotentialSurface, energy: f64, x: [f64; 2], u: [f64; 2]) -> [f64; 2] {
    let dsdt = 2.0 * (energy - surface.value(x));
    if dsdt > 0.0 {
        [u[0] / dsdt, u[1] / dsdt]
    } else {
        [f64::NAN; 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Domain, MassTriple, SurfaceModel, TabulatedGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn flat_surface() -> PotentialSurface {
        let n = 21;
        let knots: Vec<f64> = (0..n).map(|i| -10.0 + i as f64).collect();
        let grid =
            TabulatedGrid::new(knots.clone(), knots, vec![0.0; n * n], Some(0.0)).unwrap();
        PotentialSurface::new(
            MassTriple::new(1.0, 1.0, 1.0).unwrap(),
            SurfaceModel::Tabulated(grid),
            Domain::new([-10.0, 10.0], [-10.0, 10.0]).unwrap(),
            6.0,
        )
        .unwrap()
    }

    #[test]
    fn christoffel_vanishes_on_flat_surface() {
        let surf = flat_surface();
        let field = MomentumField::new(&surf, 1.5).unwrap();
        let c = christoffel(&field, [1.3, -2.0]).unwrap();
        for v in [c.c1_11, c.c1_12, c.c1_22, c.c2_11, c.c2_12, c.c2_22] {
            assert!(v.abs() < 1e-12, "flat-metric symbol {v}");
        }
    }

    #[test]
    fn christoffel_x1_only_potential_zeroes_cross_terms() {
        // V depending on x1 alone: phi_,2 = 0, so {1,12} and {2,11} vanish.
        let n = 41;
        let x1: Vec<f64> = (0..n).map(|i| -10.0 + 0.5 * i as f64).collect();
        let x2 = x1.clone();
        let mut v = Vec::with_capacity(n * n);
        for _j in 0..n {
            for i in 0..n {
                v.push(0.3 * (x1[i] * 0.4).tanh());
            }
        }
        let grid = TabulatedGrid::new(x1, x2, v, Some(0.0)).unwrap();
        let surf = PotentialSurface::new(
            MassTriple::new(1.0, 1.0, 1.0).unwrap(),
            SurfaceModel::Tabulated(grid),
            Domain::new([-10.0, 10.0], [-10.0, 10.0]).unwrap(),
            6.0,
        )
        .unwrap();
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let c = christoffel(&field, [0.7, 1.9]).unwrap();
        assert!(c.c1_12.abs() < 1e-10 && c.c2_11.abs() < 1e-10);
        assert!(c.c1_11.abs() > 1e-4, "longitudinal symbol should be finite");
    }

    #[test]
    fn christoffel_matches_metric_finite_differences() {
        // Oracle: brute-force Christoffel from centered differences of
        // g_ij = P0^2 delta_ij through the general formula.
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut tested = 0;
        while tested < 40 {
            let x = [rng.gen_range(-11.0..-1.0), rng.gen_range(0.4..6.0)];
            if field.p0_sq(x).map(|p| p > 0.5).unwrap_or(false) {
                let h = 1e-5;
                let g = |y: [f64; 2]| field.p0_sq_unchecked(y);
                let dg = [
                    (g([x[0] + h, x[1]]) - g([x[0] - h, x[1]])) / (2.0 * h),
                    (g([x[0], x[1] + h]) - g([x[0], x[1] - h])) / (2.0 * h),
                ];
                let p0_sq = g(x);
                // Gamma^k_ij = (d_i g delta_kj + d_j g delta_ki
                //               - d_k g delta_ij) / (2 g).
                let gamma = |k: usize, i: usize, j: usize| {
                    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    (dg[i] * delta(k, j) + dg[j] * delta(k, i) - dg[k] * delta(i, j))
                        / (2.0 * p0_sq)
                };
                let c = christoffel(&field, x).unwrap();
                let pairs = [
                    (c.c1_11, gamma(0, 0, 0)),
                    (c.c1_12, gamma(0, 0, 1)),
                    (c.c1_22, gamma(0, 1, 1)),
                    (c.c2_11, gamma(1, 0, 0)),
                    (c.c2_12, gamma(1, 0, 1)),
                    (c.c2_22, gamma(1, 1, 1)),
                ];
                for (have, want) in pairs {
                    assert!(
                        (have - want).abs() < 1e-6,
                        "symbol mismatch at {x:?}: {have} vs {want}"
                    );
                }
                tested += 1;
            }
        }
    }

    #[test]
    fn christoffel_rejects_forbidden_point() {
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 0.5).unwrap();
        // Near the repulsive wall V is far above 0.5 eV.
        assert!(matches!(
            christoffel(&field, [-2.0, 0.3]),
            Err(Error::Forbidden(..))
        ));
    }

    #[test]
    fn straight_line_on_flat_surface() {
        let surf = flat_surface();
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let p0 = field.p0_sq([0.0, 0.0]).unwrap().sqrt();
        let dir = [0.8, 0.6];
        let ic = GeodesicState {
            x: [-2.0, 0.5],
            v: [dir[0] / p0, dir[1] / p0],
            s: 0.0,
        };
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        // All samples on the line through x0 along dir.
        for st in &traj.samples {
            let d = [st.x[0] - ic.x[0], st.x[1] - ic.x[1]];
            let cross = d[0] * dir[1] - d[1] * dir[0];
            assert!(cross.abs() < 1e-7, "deviation {cross} from straight line");
        }
        assert_eq!(traj.outcome.label, OutcomeLabel::Rearrange);
    }

    #[test]
    fn separable_transverse_motion_is_harmonic() {
        let surf = PotentialSurface::demo_separable(0.5);
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let ic = GeodesicState::incoming(&field, 0.4).unwrap();
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.outcome.label, OutcomeLabel::Rearrange);
        let mu0 = field.mu0();
        let omega = (2.0 / mu0).sqrt();
        for (st, t) in traj.samples.iter().zip(&traj.newton_time) {
            let want = 0.4 * (omega * t).cos();
            assert!(
                (st.x[1] - want).abs() < 1e-6,
                "transverse motion off closed form at t={t}: {} vs {want}",
                st.x[1]
            );
        }
    }

    #[test]
    fn separable_below_barrier_reflects() {
        let surf = PotentialSurface::demo_separable(0.5);
        let field = MomentumField::new(&surf, 0.3).unwrap();
        let ic = GeodesicState::incoming(&field, 0.1).unwrap();
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        assert_eq!(traj.outcome.label, OutcomeLabel::Reflect);
        assert!(traj.diagnostics.energy_drift < 1e-8);
    }

    #[test]
    fn conservation_on_leps_scattering() {
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let ic = GeodesicState::incoming(&field, 0.15).unwrap();
        let opts = IntegrateOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let traj = integrate(&field, &ic, &opts).unwrap();
        assert!(traj.diagnostics.energy_drift < 2e-8, "energy drift {}", traj.diagnostics.energy_drift);
        assert!(traj.diagnostics.speed_drift < 1e-6, "metric speed drift {}", traj.diagnostics.speed_drift);
        let s = &traj.samples;
        assert!(s.windows(2).all(|w| w[1].s > w[0].s), "affine parameter not increasing");
        assert!(
            traj.newton_time.windows(2).all(|w| w[1] > w[0]),
            "physical time not increasing"
        );
    }

    #[test]
    fn oracle_keeps_energy_on_closed_transverse_orbit() {
        // Pure transverse oscillation in the harmonic channel; 100 periods.
        let surf = PotentialSurface::demo_separable(0.0);
        let mu0 = surf.masses().reduced_mass();
        let omega = (2.0 / mu0).sqrt();
        let x0 = [-8.0, 0.5];
        let energy = surf.value(x0);
        let opts = OracleOptions {
            dt: 1e-4,
            t_max: 100.0 * std::f64::consts::TAU / omega,
            sample_every: 1000,
            dwell_threshold: None,
        };
        let traj = newton_oracle(&surf, energy, x0, [0.0, 0.0], &opts).unwrap();
        assert!(
            traj.diagnostics.energy_drift < 1e-9,
            "Verlet energy drift {}",
            traj.diagnostics.energy_drift
        );
    }

    #[test]
    fn oracle_rejects_off_shell_velocity() {
        let surf = PotentialSurface::demo_leps();
        let err = newton_oracle(&surf, 2.0, [-10.0, 0.65], [1.0, 0.0], &OracleOptions::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    fn oracle_ic(field: &MomentumField, x2_offset: f64) -> ([f64; 2], [f64; 2]) {
        let surf = field.surface();
        let geom = surf.geometry();
        let x = [geom.x1_launch, geom.x2_in_center + x2_offset];
        let speed = (2.0 * (field.energy() - surf.value(x)) / field.mu0()).sqrt();
        (x, [speed, 0.0])
    }

    #[test]
    fn production_and_oracle_agree_pointwise() {
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 1.5).unwrap();
        let ic = GeodesicState::incoming(&field, 0.12).unwrap();
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        let (x0, u0) = oracle_ic(&field, 0.12);
        let oracle = newton_oracle(&surf, 1.5, x0, u0, &OracleOptions::default()).unwrap();
        assert_eq!(traj.outcome.label, oracle.outcome.label);
        let s_end = traj.last().s.min(oracle.last().s);
        for k in 0..=40 {
            let s = s_end * k as f64 / 40.0;
            let a = traj.position_at_s(s);
            let b = oracle.position_at_s(s);
            let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            assert!(d < 1e-5, "paths diverge by {d} at s={s}");
        }
    }

    #[test]
    fn affine_form_matches_production_in_interior() {
        // Start mid-channel aimed at the corner; compare over a short
        // interior span where the affine form is regular.
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let ic = GeodesicState::incoming(&field, 0.0).unwrap();
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        let span = 0.25 * traj.last().s;
        let direct = integrate_affine(&field, &ic, span, 1e-10, 1e-6).unwrap();
        let end = direct.last().unwrap();
        let prod = traj.position_at_s(end.s);
        let d = ((end.x[0] - prod[0]).powi(2) + (end.x[1] - prod[1]).powi(2)).sqrt();
        assert!(d < 1e-6, "affine and production forms diverge by {d}");
    }

    #[test]
    fn classify_trapped_when_budget_exhausted() {
        let surf = PotentialSurface::demo_leps();
        let out = classify(&surf, [-3.0, 0.8], [0.1, 0.1], false, 100.0, 20.0);
        assert_eq!(out.label, OutcomeLabel::Trapped);
        assert!(out.resonance_flag);
    }

    #[test]
    fn classify_reflect_vs_dissociate_by_internal_energy() {
        let surf = PotentialSurface::demo_leps();
        let m = surf.masses();
        // Far out the incoming channel, BC at rest at its minimum: bound.
        let x = m.mass_scaled(8.0, 0.95).unwrap();
        let out = classify(&surf, x, [-1.0, 0.0], true, 0.0, 20.0);
        assert_eq!(out.label, OutcomeLabel::Reflect);
        // Same place, huge BC vibrational velocity: broken.
        let out = classify(&surf, x, [-1.0, 8.0], true, 0.0, 20.0);
        assert_eq!(out.label, OutcomeLabel::Dissociate);
    }

    #[test]
    fn determinism_bitwise() {
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 1.3).unwrap();
        let ic = GeodesicState::incoming(&field, 0.1).unwrap();
        let a = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        let b = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (p, q) in a.samples.iter().zip(&b.samples) {
            assert!(p.x == q.x && p.v == q.v && p.s == q.s);
        }
    }

    #[test]
    fn time_reversal_returns_regular_trajectory() {
        let surf = PotentialSurface::demo_separable(0.5);
        let field = MomentumField::new(&surf, 2.0).unwrap();
        let ic = GeodesicState::incoming(&field, 0.3).unwrap();
        let traj = integrate(&field, &ic, &IntegrateOptions::default()).unwrap();
        let end = traj.last();
        let back = GeodesicState { x: end.x, v: [-end.v[0], -end.v[1]], s: 0.0 };
        let ret = integrate(&field, &back, &IntegrateOptions::default()).unwrap();
        let fin = ret.last();
        let d = ((fin.x[0] - ic.x[0]).powi(2) + (fin.x[1] - ic.x[1]).powi(2)).sqrt();
        assert!(d < 1e-4, "regular trajectory failed to return: {d}");
    }

    // Reversibility is lost for chaotic orbits: the tolerance that brings a
    // regular trajectory back to its start (previous test) is exceeded by
    // orders of magnitude here. The trapped initial condition comes from a
    // 96x128 scan of the resonant window; the offset is written as its exact
    // grid expression.
    #[test]
    fn time_reversal_fails_chaotic_trajectory() {
        let surf = PotentialSurface::demo_leps();
        let field = MomentumField::new(&surf, 1.1).unwrap();
        let off = 0.26 * 113.0 / 127.0 - 0.13;
        let ic = GeodesicState::incoming(&field, off).unwrap();
        let opts = IntegrateOptions { s_max: 300.0, ..Default::default() };
        let traj = integrate(&field, &ic, &opts).unwrap();
        assert_eq!(traj.outcome.label, OutcomeLabel::Trapped);
        let end = traj.last();
        // Renormalize: the forward run's metric-speed drift (within its own
        // 1e-6 contract) would otherwise fail the initial-state gate.
        let mut back = GeodesicState { x: end.x, v: [-end.v[0], -end.v[1]], s: 0.0 };
        let sp = back.metric_speed(&field).unwrap().sqrt();
        back.v = [back.v[0] / sp, back.v[1] / sp];
        let ret = integrate(&field, &back, &opts).unwrap();
        let fin = ret.last();
        let d = ((fin.x[0] - ic.x[0]).powi(2) + (fin.x[1] - ic.x[1]).powi(2)).sqrt();
        assert!(d > 1e-4, "chaotic trajectory unexpectedly retraced itself: {d}");
        assert!(d > 1.0, "reversal error should be macroscopic, got {d}");
    }
}
