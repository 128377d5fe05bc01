//! Saddle location and the extremal ray connecting the two channels.
//!
//! The ray is realized as the minimum-energy path: steepest descent from the
//! barrier saddle in mass-scaled coordinates, continued straight along the
//! channel asymptotes once the descent bottoms out. A branch may end either
//! by walking into the far channel region directly or by stalling in a basin
//! on a channel floor (a pre-barrier well or a pocket past the corner); in
//! the latter case the straight extension runs from the basin to the far
//! anchor of that channel. A stall away from any channel floor means the
//! saddle does not connect the channels and is an error. Per-point frame
//! data (tangent, normal, potential derivatives in frame directions) is
//! stored energy-independently; the momentum-derived curvature radii and de
//! Broglie length follow from it at any energy via
//! [`ExtremalRay::curvature_data`].

use crate::curve::PlanarCurve;
use crate::error::{Error, Result};
use crate::system::{GeometryKind, MomentumField, PotentialSurface};
use crate::units::HBAR;

/// Converged index-1 stationary point.
#[derive(Clone, Debug)]
pub struct SaddlePoint {
    pub x: [f64; 2],
    pub v: f64,
    pub hessian: [[f64; 2]; 2],
    /// Ascending; index 1 means eigenvalues[0] < 0 < eigenvalues[1].
    pub eigenvalues: [f64; 2],
    /// Unit eigenvector of the negative eigenvalue, canonically oriented
    /// (largest-magnitude component positive).
    pub unstable_dir: [f64; 2],
}

/// Eigen-decomposition of a symmetric 2x2 matrix, eigenvalues ascending.
fn sym_eigen_2x2(h: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, b, c) = (h[0][0], h[0][1], h[1][1]);
    let m = 0.5 * (a + c);
    let q = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let ev = [m - q, m + q];
    let vec_for = |lam: f64| -> [f64; 2] {
        // (H - lam) v = 0; pick the better-conditioned row.
        let r0 = [a - lam, b];
        let r1 = [b, c - lam];
        let (u, w) = if r0[0] * r0[0] + r0[1] * r0[1] >= r1[0] * r1[0] + r1[1] * r1[1] {
            (-r0[1], r0[0])
        } else {
            (-r1[1], r1[0])
        };
        let n = (u * u + w * w).sqrt();
        if n < 1e-300 {
            [1.0, 0.0]
        } else {
            [u / n, w / n]
        }
    };
    (ev, [vec_for(ev[0]), vec_for(ev[1])])
}

fn canonical_orientation(v: [f64; 2]) -> [f64; 2] {
    let flip = if v[0].abs() >= v[1].abs() { v[0] < 0.0 } else { v[1] < 0.0 };
    if flip {
        [-v[0], -v[1]]
    } else {
        v
    }
}

/// Newton search for a first-order saddle of V, starting from `guess`.
///
/// Iterates x <- x - H^-1 grad V with steps clamped to 0.5 and to the domain.
/// A converged point must have exactly one negative Hessian eigenvalue.
pub fn find_saddle(surface: &PotentialSurface, guess: [f64; 2]) -> Result<SaddlePoint> {
    if !surface.contains(guess) {
        return Err(Error::invalid("saddle guess outside the surface domain"));
    }
    let d = surface.domain();
    let mut x = guess;
    for _ in 0..100 {
        let g = surface.gradient(x);
        let h = surface.hessian(x);
        let gn = (g[0] * g[0] + g[1] * g[1]).sqrt();
        if gn < 1e-11 {
            let (ev, evec) = sym_eigen_2x2(h);
            if ev[0] < 0.0 && ev[1] > 0.0 {
                return Ok(SaddlePoint {
                    x,
                    v: surface.value(x),
                    hessian: h,
                    eigenvalues: ev,
                    unstable_dir: canonical_orientation(evec[0]),
                });
            }
            return Err(Error::SaddleSearch(format!(
                "stationary point at ({:.6}, {:.6}) has Hessian eigenvalues \
                 ({:+.3e}, {:+.3e}), not a first-order saddle",
                x[0], x[1], ev[0], ev[1]
            )));
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let hmax = h[0][0].abs().max(h[0][1].abs()).max(h[1][1].abs()).max(1e-30);
        if det.abs() < 1e-14 * hmax * hmax {
            return Err(Error::SaddleSearch(format!(
                "singular Hessian at ({:.6}, {:.6})",
                x[0], x[1]
            )));
        }
        let mut dx = [
            -(h[1][1] * g[0] - h[0][1] * g[1]) / det,
            -(-h[1][0] * g[0] + h[0][0] * g[1]) / det,
        ];
        let dn = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
        if dn > 0.5 {
            dx[0] *= 0.5 / dn;
            dx[1] *= 0.5 / dn;
        }
        x = [
            (x[0] + dx[0]).clamp(d.x1[0], d.x1[1]),
            (x[1] + dx[1]).clamp(d.x2[0], d.x2[1]),
        ];
    }
    Err(Error::SaddleSearch("no convergence after 100 iterations".into()))
}

/// Construction knobs for the descent and the sampling density.
#[derive(Clone, Debug)]
pub struct RayOptions {
    /// Arc step of the descent walk (also the raw polyline spacing).
    pub descent_step: f64,
    /// Offset of the descent seeds from the saddle along the unstable mode.
    pub seed_offset: f64,
    /// Number of uniform-arclength samples of the finished ray.
    pub n_samples: usize,
    pub max_steps: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            descent_step: 2e-3,
            seed_offset: 1e-4,
            n_samples: 8001,
            max_steps: 400_000,
        }
    }
}

/// Frame and potential data at one ray arclength sample.
///
/// All fields are independent of the collision energy: `vt`, `vn` are the
/// potential gradient along tangent and left normal, `vtt`, `vnn`, `vtn`
/// the Hessian in the same frame, `curvature` the signed curve curvature.
#[derive(Clone, Debug)]
pub struct RaySample {
    pub s: f64,
    pub x: [f64; 2],
    pub tangent: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
    pub v: f64,
    pub vt: f64,
    pub vn: f64,
    pub vtt: f64,
    pub vnn: f64,
    pub vtn: f64,
}

/// Momentum-derived quantities at a ray sample for some energy.
///
/// `rho1_inv` = (dP0/ds)/P0 along the tangent, `rho2_inv` the same along the
/// left normal (positive where P0 grows toward the left side), `lambda` the
/// local de Broglie length hbar/P0.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureData {
    pub rho1_inv: f64,
    pub rho2_inv: f64,
    pub lambda: f64,
}

/// The channel-connecting reaction path, arclength-parameterized.
///
/// `s` runs from the incoming-channel end (s = 0) through the saddle at
/// [`ExtremalRay::s_saddle`] to the rearrangement-channel end.
#[derive(Clone, Debug)]
pub struct ExtremalRay {
    curve: PlanarCurve,
    energy: f64,
    s_saddle: f64,
    tube_radius: f64,
    samples: Vec<RaySample>,
    raw_length: f64,
    branch_joins: [f64; 2],
}

#[derive(Debug)]
enum BranchEnd {
    Channel,
    Floor,
    DomainEdge,
    Stalled,
}

/// Which channel a descent branch ended in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ChannelSide {
    Incoming,
    Outgoing,
}

/// Arc-constrained downhill walk: each step moves to the minimum of V on the
/// circle of radius `descent_step` around the current point, searched within
/// a forward window of the previous direction.
///
/// This is the only scheme of the several tried that survives the whole
/// path. The surface is stiff (transverse curvature up to ~90x the
/// longitudinal one), so explicit descent integrators alias the direction
/// field and zigzag, and predictor-corrector walkers feed the correction
/// back into the tangent and limit-cycle around the corner. The constrained
/// minimum needs no tangent model at all: it is a smooth function of the
/// current point, it keeps every chord at exactly the arc step, V decreases
/// strictly until a basin bottom, and at the saddle seed (gradient ~ 0) it
/// degenerates gracefully to the most-negative-curvature direction.
fn descend(
    surface: &PotentialSurface,
    start: [f64; 2],
    dir0: [f64; 2],
    opts: &RayOptions,
) -> Result<(Vec<[f64; 2]>, BranchEnd)> {
    let dom = surface.domain();
    let h = opts.descent_step;
    // Half-width of the direction window per step; a valley turning faster
    // than this against a 2e-3 step is outside the model anyway.
    let window = std::f64::consts::FRAC_PI_3;
    let mut theta = dir0[1].atan2(dir0[0]);
    let mut p = start;
    let mut pts = vec![start];
    for _ in 0..opts.max_steps {
        if in_channel(surface, p) {
            return Ok((pts, BranchEnd::Channel));
        }
        let at = |th: f64| [p[0] + h * th.cos(), p[1] + h * th.sin()];
        let fval = |th: f64| surface.value(at(th));
        // d/dth and d2/dth2 of V along the circle.
        let derivs = |th: f64| {
            let (sin, cos) = th.sin_cos();
            let x = at(th);
            let g = surface.gradient(x);
            let hs = surface.hessian(x);
            let e = [cos, sin];
            let ep = [-sin, cos];
            let ge = g[0] * e[0] + g[1] * e[1];
            let gep = g[0] * ep[0] + g[1] * ep[1];
            let ephep = ep[0] * (hs[0][0] * ep[0] + hs[0][1] * ep[1])
                + ep[1] * (hs[1][0] * ep[0] + hs[1][1] * ep[1]);
            (h * gep, h * (h * ephep - ge))
        };
        let newton = |mut th: f64, lo: f64, hi: f64| -> Option<f64> {
            for _ in 0..30 {
                let (f1, f2) = derivs(th);
                if f2 <= 0.0 {
                    return None;
                }
                let step = (f1 / f2).clamp(-0.5, 0.5);
                th = (th - step).clamp(lo, hi);
                if step.abs() < 1e-13 {
                    return Some(th);
                }
            }
            None
        };
        let (lo, hi) = (theta - window, theta + window);
        let found = newton(theta, lo, hi).or_else(|| {
            // Coarse scan fallback for the rare spots where curvature along
            // the circle is not convex at the incoming angle.
            let n = 48;
            let mut best = (f64::INFINITY, theta);
            for k in 0..=n {
                let th = lo + (hi - lo) * k as f64 / n as f64;
                let v = fval(th);
                if v < best.0 {
                    best = (v, th);
                }
            }
            newton(best.1, lo, hi).or(Some(best.1))
        });
        let th = found.expect("scan fallback always yields an angle");
        let q = at(th);
        if !dom.contains(q) {
            return Ok((pts, BranchEnd::DomainEdge));
        }
        let rise = surface.value(q) - surface.value(p);
        if rise >= 0.0 {
            // No downhill direction left on the circle: a basin bottom (or a
            // flat) within one step.
            return Ok((pts, if rise > 1e-12 { BranchEnd::Stalled } else { BranchEnd::Floor }));
        }
        theta = th;
        pts.push(q);
        p = q;
    }
    Err(Error::Integration(
        "descent did not reach a channel within the step budget".into(),
    ))
}

fn in_channel(surface: &PotentialSurface, x: [f64; 2]) -> bool {
    let geom = surface.geometry();
    match &geom.kind {
        GeometryKind::Bonds { r_far_ab, r_far_bc, .. } => {
            let (r_ab, r_bc) = surface.masses().bond_lengths(x);
            r_ab >= *r_far_ab || r_bc >= *r_far_bc
        }
        GeometryKind::Straight { .. } => (x[0] - geom.x1_corner).abs() >= geom.r_asym,
    }
}

fn channel_side(surface: &PotentialSurface, x: [f64; 2]) -> ChannelSide {
    let geom = surface.geometry();
    match &geom.kind {
        GeometryKind::Bonds { .. } => {
            let m = surface.masses();
            let (r_ab, r_bc) = m.bond_lengths(x);
            // Compare mass-scaled distances down each channel.
            let (ab_r0, bc_r0) = bond_minima(surface);
            if m.alpha() * (r_ab - ab_r0) >= m.beta() * (r_bc - bc_r0) {
                ChannelSide::Incoming
            } else {
                ChannelSide::Outgoing
            }
        }
        GeometryKind::Straight { .. } => {
            if x[0] <= geom.x1_corner {
                ChannelSide::Incoming
            } else {
                ChannelSide::Outgoing
            }
        }
    }
}

fn bond_minima(surface: &PotentialSurface) -> (f64, f64) {
    match &surface.geometry().kind {
        GeometryKind::Bonds { ab_pair, bc_pair, .. } => (ab_pair.r0, bc_pair.r0),
        GeometryKind::Straight { .. } => (0.0, 0.0),
    }
}

/// Unit direction pointing outward along a channel axis.
fn channel_axis(surface: &PotentialSurface, side: ChannelSide) -> [f64; 2] {
    match &surface.geometry().kind {
        GeometryKind::Bonds { .. } => match side {
            // r_AB grows at fixed r_BC.
            ChannelSide::Incoming => [-1.0, 0.0],
            // r_BC grows at fixed r_AB.
            ChannelSide::Outgoing => {
                let m = surface.masses();
                let d = [-m.alpha() * m.c_ratio(), m.beta()];
                let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
                [d[0] / n, d[1] / n]
            }
        },
        GeometryKind::Straight { .. } => match side {
            ChannelSide::Incoming => [-1.0, 0.0],
            ChannelSide::Outgoing => [1.0, 0.0],
        },
    }
}

/// True once `x` is deep enough in the channel that the ray can stop.
fn extension_done(surface: &PotentialSurface, x: [f64; 2], side: ChannelSide) -> bool {
    let geom = surface.geometry();
    match &geom.kind {
        GeometryKind::Bonds { r_far_ab, r_far_bc, .. } => {
            let m = surface.masses();
            let (r_ab, r_bc) = m.bond_lengths(x);
            match side {
                ChannelSide::Incoming => {
                    x[0] <= geom.x1_launch - 0.75 && r_ab >= r_far_ab + 0.5 / m.alpha()
                }
                ChannelSide::Outgoing => r_bc >= r_far_bc + 0.5 / m.beta(),
            }
        }
        GeometryKind::Straight { .. } => (x[0] - geom.x1_corner).abs() >= geom.r_asym + 0.75,
    }
}

/// Walk from the branch tip in direction `dir` until the channel asymptote
/// criterion holds (or the domain ends).
fn extend_along(
    surface: &PotentialSurface,
    pts: &mut Vec<[f64; 2]>,
    dir: [f64; 2],
    side: ChannelSide,
    h: f64,
) {
    let d = surface.domain();
    let mut x = *pts.last().unwrap();
    loop {
        let next = [x[0] + h * dir[0], x[1] + h * dir[1]];
        if !d.contains(next) || extension_done(surface, x, side) {
            return;
        }
        pts.push(next);
        x = next;
    }
}

/// Far anchor of a channel: the point where the standard asymptote meets the
/// declared asymptotic radius. Incoming rays launch exactly here.
fn channel_anchor(surface: &PotentialSurface, side: ChannelSide) -> [f64; 2] {
    let geom = surface.geometry();
    match &geom.kind {
        GeometryKind::Bonds { r_far_bc, .. } => {
            let m = surface.masses();
            match side {
                ChannelSide::Incoming => [geom.x1_launch, geom.x2_in_center],
                ChannelSide::Outgoing => {
                    let (ab_r0, _) = bond_minima(surface);
                    [-m.alpha() * (ab_r0 + m.c_ratio() * r_far_bc), m.beta() * r_far_bc]
                }
            }
        }
        GeometryKind::Straight { .. } => match side {
            ChannelSide::Incoming => [geom.x1_corner - geom.r_asym, geom.x2_in_center],
            ChannelSide::Outgoing => [geom.x1_corner + geom.r_asym, geom.x2_in_center],
        },
    }
}

/// Transverse distance of a basin-bottom point from its channel floor line,
/// in bond-length units. Small values mean the basin sits on the channel
/// floor and the ray may continue straight from it.
fn channel_floor_offset(surface: &PotentialSurface, x: [f64; 2], side: ChannelSide) -> f64 {
    match &surface.geometry().kind {
        GeometryKind::Bonds { .. } => {
            let (r_ab, r_bc) = surface.masses().bond_lengths(x);
            let (ab_r0, bc_r0) = bond_minima(surface);
            match side {
                ChannelSide::Incoming => (r_bc - bc_r0).abs(),
                ChannelSide::Outgoing => (r_ab - ab_r0).abs(),
            }
        }
        GeometryKind::Straight { .. } => (x[1] - surface.geometry().x2_in_center).abs(),
    }
}

/// Descent branch finished with its extension, plus the point where the
/// descent itself ended (basin bottom or channel entry).
struct Branch {
    pts: Vec<[f64; 2]>,
    side: ChannelSide,
    descent_end: [f64; 2],
}

fn finish_branch(
    surface: &PotentialSurface,
    mut pts: Vec<[f64; 2]>,
    end: BranchEnd,
    opts: &RayOptions,
) -> Result<Branch> {
    let tip = *pts.last().unwrap();
    let side = channel_side(surface, tip);
    let join = match end {
        BranchEnd::Channel => {
            let axis = channel_axis(surface, side);
            extend_along(surface, &mut pts, axis, side, opts.descent_step);
            tip
        }
        BranchEnd::Stalled | BranchEnd::Floor => {
            let off = channel_floor_offset(surface, tip, side);
            if off > 0.5 {
                return Err(Error::SaddleSearch(format!(
                    "descent branch stalled in a basin at ({:.4}, {:.4}), {:.2} bond \
                     units off the channel floor; the saddle does not connect the \
                     channels",
                    tip[0], tip[1], off
                )));
            }
            let anchor = channel_anchor(surface, side);
            // The final steps curl around the basin bottom where the gradient
            // dies; cut the tail where the chord to the anchor leaves tangent
            // to the path so resampling sees no kink at the junction.
            let lo = pts.len().saturating_sub(400).max(1);
            let mut best = (f64::INFINITY, pts.len() - 1);
            for i in lo..pts.len() {
                let seg = [pts[i][0] - pts[i - 1][0], pts[i][1] - pts[i - 1][1]];
                let chord = [anchor[0] - pts[i][0], anchor[1] - pts[i][1]];
                if chord[0].hypot(chord[1]) < opts.descent_step {
                    continue;
                }
                let kink = (seg[0] * chord[1] - seg[1] * chord[0])
                    .atan2(seg[0] * chord[0] + seg[1] * chord[1])
                    .abs();
                if kink < best.0 {
                    best = (kink, i);
                }
            }
            pts.truncate(best.1 + 1);
            let cut = *pts.last().unwrap();
            let d = [anchor[0] - cut[0], anchor[1] - cut[1]];
            let n = (d[0] * d[0] + d[1] * d[1]).sqrt();
            if n < opts.descent_step {
                return Err(Error::SaddleSearch(
                    "descent branch stalled on top of the channel anchor".into(),
                ));
            }
            extend_along(surface, &mut pts, [d[0] / n, d[1] / n], side, opts.descent_step);
            cut
        }
        BranchEnd::DomainEdge => {
            if !in_channel(surface, tip) {
                return Err(Error::Integration(format!(
                    "descent left the domain at ({:.4}, {:.4}) before reaching a \
                     channel",
                    tip[0], tip[1]
                )));
            }
            let axis = channel_axis(surface, side);
            extend_along(surface, &mut pts, axis, side, opts.descent_step);
            tip
        }
    };
    Ok(Branch { pts, side, descent_end: join })
}

/// Half the narrowest allowed-region width probed along the ray normals.
fn probe_tube_radius(
    surface: &PotentialSurface,
    energy: f64,
    samples: &[RaySample],
) -> f64 {
    let mu0 = surface.masses().reduced_mass();
    let d_max = 6.0;
    let p0_sq = |x: [f64; 2]| -> f64 {
        if surface.contains(x) {
            2.0 * mu0 * (energy - surface.value(x))
        } else {
            -1.0
        }
    };
    // Bisect for the allowed-region edge along a normal direction.
    let edge = |x0: [f64; 2], n: [f64; 2]| -> f64 {
        let at = |t: f64| p0_sq([x0[0] + t * n[0], x0[1] + t * n[1]]);
        if at(d_max) > 0.0 {
            return d_max;
        }
        let (mut lo, mut hi) = (0.0, d_max);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let n = samples.len();
    let probe_count = 8.min(n / 2);
    let mut min_width = f64::INFINITY;
    for k in 0..probe_count {
        // Cover the asymptotic tenths at both ends.
        let frac = 0.1 * (k as f64 + 0.5) / probe_count as f64;
        for idx in [
            ((n - 1) as f64 * frac) as usize,
            ((n - 1) as f64 * (1.0 - frac)) as usize,
        ] {
            let sm = &samples[idx];
            if p0_sq(sm.x) <= 0.0 {
                continue;
            }
            let w = edge(sm.x, sm.normal) + edge(sm.x, [-sm.normal[0], -sm.normal[1]]);
            min_width = min_width.min(w);
        }
    }
    if min_width.is_finite() {
        0.5 * min_width
    } else {
        0.5 * d_max
    }
}

fn sample_curve(surface: &PotentialSurface, curve: &PlanarCurve, n: usize) -> Vec<RaySample> {
    curve
        .uniform_arclength(n)
        .into_iter()
        .map(|s| {
            let x = curve.point(s);
            let t = curve.tangent(s);
            let nm = curve.normal(s);
            let g = surface.gradient(x);
            let h = surface.hessian(x);
            let hdot = |a: [f64; 2], b: [f64; 2]| {
                a[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + a[1] * (h[1][0] * b[0] + h[1][1] * b[1])
            };
            RaySample {
                s,
                x,
                tangent: t,
                normal: nm,
                curvature: curve.curvature(s),
                v: surface.value(x),
                vt: g[0] * t[0] + g[1] * t[1],
                vn: g[0] * nm[0] + g[1] * nm[1],
                vtt: hdot(t, t),
                vnn: hdot(nm, nm),
                vtn: hdot(t, nm),
            }
        })
        .collect()
}

fn assemble(
    surface: &PotentialSurface,
    energy: f64,
    polyline: &[[f64; 2]],
    saddle_x: Option<[f64; 2]>,
    joins: [Option<[f64; 2]>; 2],
    n_samples: usize,
) -> Result<ExtremalRay> {
    let dense = PlanarCurve::from_points(polyline)?;
    let raw_length = dense.length();
    let resampled: Vec<[f64; 2]> = dense
        .uniform_arclength(n_samples)
        .into_iter()
        .map(|s| dense.point(s))
        .collect();
    let curve = PlanarCurve::from_points(&resampled)?;
    let samples = sample_curve(surface, &curve, n_samples);
    let s_saddle = match saddle_x {
        Some(x) => curve.project(x).0,
        None => 0.5 * curve.length(),
    };
    let branch_joins = [
        joins[0].map(|x| curve.project(x).0).unwrap_or(0.0),
        joins[1].map(|x| curve.project(x).0).unwrap_or(curve.length()),
    ];
    let tube_radius = probe_tube_radius(surface, energy, &samples);
    Ok(ExtremalRay {
        curve,
        energy,
        s_saddle,
        tube_radius,
        samples,
        raw_length,
        branch_joins,
    })
}

/// Minimum-energy path through `saddle`, oriented from the incoming channel
/// (s = 0) to the rearrangement channel, resampled at uniform arclength.
pub fn extremal_ray(
    surface: &PotentialSurface,
    energy: f64,
    saddle: &SaddlePoint,
) -> Result<ExtremalRay> {
    extremal_ray_with(surface, energy, saddle, &RayOptions::default())
}

pub fn extremal_ray_with(
    surface: &PotentialSurface,
    energy: f64,
    saddle: &SaddlePoint,
    opts: &RayOptions,
) -> Result<ExtremalRay> {
    let u = saddle.unstable_dir;
    let seed = |sign: f64| {
        [
            saddle.x[0] + sign * opts.seed_offset * u[0],
            saddle.x[1] + sign * opts.seed_offset * u[1],
        ]
    };
    let (plus, end_plus) = descend(surface, seed(1.0), u, opts)?;
    let (minus, end_minus) = descend(surface, seed(-1.0), [-u[0], -u[1]], opts)?;
    let branch_plus = finish_branch(surface, plus, end_plus, opts)?;
    let branch_minus = finish_branch(surface, minus, end_minus, opts)?;
    if branch_plus.side == branch_minus.side {
        return Err(Error::SaddleSearch(
            "both descent branches reached the same channel; saddle does not \
             separate the channels"
                .into(),
        ));
    }
    let (incoming, outgoing) = if branch_plus.side == ChannelSide::Incoming {
        (branch_plus, branch_minus)
    } else {
        (branch_minus, branch_plus)
    };
    let joins = [Some(incoming.descent_end), Some(outgoing.descent_end)];
    let mut polyline: Vec<[f64; 2]> = incoming.pts.into_iter().rev().collect();
    polyline.push(saddle.x);
    polyline.extend(outgoing.pts);
    assemble(surface, energy, &polyline, Some(saddle.x), joins, opts.n_samples)
}

impl ExtremalRay {
    /// Straight-line ray along the incoming channel axis, for separable or
    /// flat surfaces where no saddle exists (for example a zero barrier).
    pub fn straight(surface: &PotentialSurface, energy: f64, n_samples: usize) -> Result<Self> {
        let geom = surface.geometry();
        if !matches!(geom.kind, GeometryKind::Straight { .. }) {
            return Err(Error::invalid(
                "straight ray requires a straight-channel surface",
            ));
        }
        let d = surface.domain();
        let x2 = geom.x2_in_center;
        let margin = 1e-9 * (d.x1[1] - d.x1[0]);
        let h = (d.x1[1] - d.x1[0]) / 1024.0;
        let mut polyline = Vec::new();
        let mut x1 = d.x1[0] + margin;
        while x1 < d.x1[1] - margin {
            polyline.push([x1, x2]);
            x1 += h;
        }
        polyline.push([d.x1[1] - margin, x2]);
        assemble(surface, energy, &polyline, None, [None, None], n_samples)
    }

    pub fn curve(&self) -> &PlanarCurve {
        &self.curve
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn samples(&self) -> &[RaySample] {
        &self.samples
    }

    /// Arclength of the saddle on the resampled curve.
    pub fn s_saddle(&self) -> f64 {
        self.s_saddle
    }

    /// Nearest-point projection stays meaningful within this normal offset.
    pub fn tube_radius(&self) -> f64 {
        self.tube_radius
    }

    /// Arclengths where the descent segments hand over to the straight
    /// channel-asymptote extensions: `[0]` on the incoming side, `[1]` on the
    /// outgoing side. V is monotone in s on `[joins[0], s_saddle]` and
    /// `[s_saddle, joins[1]]`; the tails outside are the asymptote walks.
    pub fn branch_joins(&self) -> [f64; 2] {
        self.branch_joins
    }

    pub fn length(&self) -> f64 {
        self.curve.length()
    }

    /// Chord length of the raw descent polyline before resampling.
    pub fn raw_length(&self) -> f64 {
        self.raw_length
    }

    /// Curvature radii (inverse) and de Broglie length at sample `i` for the
    /// energy of `field`. Requires the point to be classically allowed.
    pub fn curvature_data(&self, field: &MomentumField, i: usize) -> Result<CurvatureData> {
        let sm = &self.samples[i];
        let p0_sq = 2.0 * field.mu0() * (field.energy() - sm.v);
        if p0_sq <= 0.0 {
            return Err(Error::Forbidden(field.energy() - sm.v, sm.x[0], sm.x[1]));
        }
        let mu0 = field.mu0();
        Ok(CurvatureData {
            rho1_inv: -mu0 * sm.vt / p0_sq,
            rho2_inv: -mu0 * sm.vn / p0_sq,
            lambda: HBAR / p0_sq.sqrt(),
        })
    }

    /// CSV dump at the construction energy. Classically forbidden samples
    /// render as NaN in the momentum-derived columns.
    pub fn to_csv(&self, field: &MomentumField) -> String {
        let mut out = String::from("s,x1,x2,V,P0,rho1_inv,rho2_inv,lambda\n");
        for (i, sm) in self.samples.iter().enumerate() {
            let p0_sq = 2.0 * field.mu0() * (field.energy() - sm.v);
            let (p0, c) = if p0_sq > 0.0 {
                let c = self.curvature_data(field, i).unwrap();
                (p0_sq.sqrt(), c)
            } else {
                (
                    f64::NAN,
                    CurvatureData { rho1_inv: f64::NAN, rho2_inv: f64::NAN, lambda: f64::NAN },
                )
            };
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                sm.s, sm.x[0], sm.x[1], sm.v, p0, c.rho1_inv, c.rho2_inv, c.lambda
            ));
        }
        out
    }
}
