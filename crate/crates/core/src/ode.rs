//! Adaptive explicit Runge-Kutta integration.
//!
//! Dormand-Prince 5(4): seven stages, first-same-as-last, embedded
//! fourth-order error estimate. Dense output between accepted steps is
//! cubic Hermite on the stored endpoint derivatives, which is enough for
//! event location and for resampling trajectories on uniform grids.
//!
//! Everything here is plain `f64` arithmetic with no internal parallelism,
//! so a run with fixed inputs reproduces bit-identically regardless of
//! thread count.

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-or-not first order system.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dydt: &mut [f64; N]);
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    fn rhs(&self, t: f64, y: &[f64; N], dydt: &mut [f64; N]) {
        self(t, y, dydt)
    }
}

/// Scalar event function g(t, y); a root of g along the solution stops or
/// marks the integration.
pub struct Event<'a, const N: usize> {
    pub g: Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>,
    pub direction: Direction,
    pub terminal: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Trigger on any sign change.
    Any,
    /// Trigger only when g goes from negative to positive.
    Rising,
    /// Trigger only when g goes from positive to negative.
    Falling,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rtol: 1e-9,
            atol: 1e-12,
            h_initial: 1e-4,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }
}

/// Why the integration stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Stop {
    /// Reached the requested end of the integration interval.
    EndOfSpan,
    /// A terminal event fired; payload is the event index.
    Event(usize),
}

/// Dense solution: accepted nodes plus endpoint derivatives.
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub stop: Stop,
    /// (event index, t, y) for every event that fired, terminal or not.
    pub events: Vec<(usize, f64, [f64; N])>,
    pub n_steps: usize,
    pub n_rejected: usize,
}

impl<const N: usize> Solution<N> {
    pub fn last_t(&self) -> f64 {
        *self.t.last().expect("solution has at least the initial node")
    }

    pub fn last_y(&self) -> [f64; N] {
        *self.y.last().expect("solution has at least the initial node")
    }

    /// Cubic Hermite interpolation at `t` (clamped to the covered span).
    pub fn sample(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 {
            return self.y[0];
        }
        let forward = self.t[n - 1] >= self.t[0];
        let tc = if forward {
            t.clamp(self.t[0], self.t[n - 1])
        } else {
            t.clamp(self.t[n - 1], self.t[0])
        };
        let k = match self
            .t
            .binary_search_by(|a| if forward { a.partial_cmp(&tc).unwrap() } else { tc.partial_cmp(a).unwrap() })
        {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        hermite(
            self.t[k],
            &self.y[k],
            &self.dy[k],
            self.t[k + 1],
            &self.y[k + 1],
            &self.dy[k + 1],
            tc,
        )
    }
}

/// Cubic Hermite on one interval.
pub fn hermite<const N: usize>(
    t0: f64,
    y0: &[f64; N],
    f0: &[f64; N],
    t1: f64,
    y1: &[f64; N],
    f1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    if h == 0.0 {
        return *y0;
    }
    let u = (t - t0) / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrate `sys` from (t0, y0) to t_end, honoring `events`.
pub fn integrate<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Options,
    events: &[Event<'_, N>],
) -> Result<Solution<N>> {
    let span = t_end - t0;
    if span == 0.0 {
        return Err(Error::invalid("integration span is empty"));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut f = [0.0; N];
    sys.rhs(t, &y, &mut f);
    for v in f.iter().chain(y.iter()) {
        if !v.is_finite() {
            return Err(Error::Integration("non-finite initial state or derivative".into()));
        }
    }

    let mut h = (opts.h_initial.abs().min(opts.h_max).min(span.abs())) * dir;
    let mut sol = Solution {
        t: vec![t],
        y: vec![y],
        dy: vec![f],
        stop: Stop::EndOfSpan,
        events: Vec::new(),
        n_steps: 0,
        n_rejected: 0,
    };
    let mut gval: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];
    let mut ytmp = [0.0; N];

    for _step in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok(sol);
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }

        // Stages (k1 = f via FSAL).
        for i in 0..N {
            ytmp[i] = y[i] + h * A21 * f[i];
        }
        sys.rhs(t + C2 * h, &ytmp, &mut k2);
        for i in 0..N {
            ytmp[i] = y[i] + h * (A31 * f[i] + A32 * k2[i]);
        }
        sys.rhs(t + C3 * h, &ytmp, &mut k3);
        for i in 0..N {
            ytmp[i] = y[i] + h * (A41 * f[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs(t + C4 * h, &ytmp, &mut k4);
        for i in 0..N {
            ytmp[i] = y[i] + h * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs(t + C5 * h, &ytmp, &mut k5);
        for i in 0..N {
            ytmp[i] =
                y[i] + h * (A61 * f[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs(t + h, &ytmp, &mut k6);
        let mut ynew = [0.0; N];
        for i in 0..N {
            ynew[i] =
                y[i] + h * (B1 * f[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        sys.rhs(t + h, &ynew, &mut k7);

        // Error norm against mixed tolerance.
        let mut err = 0.0f64;
        let mut finite = true;
        for i in 0..N {
            let e = h
                * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            let r = e / scale;
            err += r * r;
            finite &= e.is_finite() && ynew[i].is_finite();
        }
        err = (err / N as f64).sqrt();

        if !finite || err > 1.0 {
            sol.n_rejected += 1;
            let shrink = if finite { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= shrink;
            continue;
        }

        // Accepted.
        sol.n_steps += 1;
        let t_new = t + h;

        // Event check on this interval using the Hermite interpolant.
        let mut fired: Option<(usize, f64, [f64; N])> = None;
        for (ie, ev) in events.iter().enumerate() {
            let g0 = gval[ie];
            let g1 = (ev.g)(t_new, &ynew);
            let crossed = match ev.direction {
                Direction::Any => g0 * g1 < 0.0 || (g0 != 0.0 && g1 == 0.0),
                Direction::Rising => g0 < 0.0 && g1 >= 0.0,
                Direction::Falling => g0 > 0.0 && g1 <= 0.0,
            };
            if !crossed {
                gval[ie] = g1;
                continue;
            }
            // Bisection on the dense interpolant.
            let (mut ta, mut tb) = (t, t_new);
            let mut ga = g0;
            for _ in 0..80 {
                let tm = 0.5 * (ta + tb);
                let ym = hermite(t, &y, &f, t_new, &ynew, &k7, tm);
                let gm = (ev.g)(tm, &ym);
                if ga * gm <= 0.0 {
                    tb = tm;
                } else {
                    ta = tm;
                    ga = gm;
                }
                if (tb - ta).abs() <= 1e-13 * t_new.abs().max(1.0) {
                    break;
                }
            }
            let te = tb;
            let ye = hermite(t, &y, &f, t_new, &ynew, &k7, te);
            match &fired {
                Some((_, tf, _)) if (te - *tf) * dir >= 0.0 => {}
                _ => fired = Some((ie, te, ye)),
            }
            gval[ie] = g1;
        }

        if let Some((ie, te, ye)) = fired {
            sol.events.push((ie, te, ye));
            if events[ie].terminal {
                let mut fe = [0.0; N];
                sys.rhs(te, &ye, &mut fe);
                sol.t.push(te);
                sol.y.push(ye);
                sol.dy.push(fe);
                sol.stop = Stop::Event(ie);
                return Ok(sol);
            }
        }

        t = t_new;
        y = ynew;
        f = k7;
        sol.t.push(t);
        sol.y.push(y);
        sol.dy.push(f);

        let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * grow).clamp(-opts.h_max, opts.h_max);
        if h == 0.0 {
            return Err(Error::Integration("step size collapsed to zero".into()));
        }
    }
    Err(Error::Integration(format!(
        "step budget {} exhausted at t = {t}",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_sys(_t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
        dy[0] = y[0];
    }

    #[test]
    fn exponential_to_tolerance() {
        let sol = integrate(&exp_sys, 0.0, [1.0], 1.0, &Options::default(), &[]).unwrap();
        let err = (sol.last_y()[0] - 1.0f64.exp()).abs();
        assert!(err < 1e-8, "exp(1) error {err} too large");
    }

    #[test]
    fn harmonic_energy_conserved() {
        let sho = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let opts = Options { rtol: 1e-10, atol: 1e-13, ..Options::default() };
        let t_end = 100.0 * std::f64::consts::TAU;
        let sol = integrate(&sho, 0.0, [1.0, 0.0], t_end, &opts, &[]).unwrap();
        let [q, p] = sol.last_y();
        let drift = (0.5 * (q * q + p * p) - 0.5).abs();
        assert!(drift < 1e-8, "energy drift {drift} over 100 periods");
    }

    #[test]
    fn dense_output_matches_analytic() {
        let sho = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let sol = integrate(&sho, 0.0, [0.0, 1.0], 10.0, &Options::default(), &[]).unwrap();
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            let y = sol.sample(t);
            assert!((y[0] - t.sin()).abs() < 1e-6, "dense output off at t={t}");
        }
    }

    #[test]
    fn event_located_precisely() {
        let sho = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        // sin(t) crosses 0.5 rising at t = pi/6.
        let ev = Event {
            g: Box::new(|_t, y: &[f64; 2]| y[0] - 0.5),
            direction: Direction::Rising,
            terminal: true,
        };
        let sol = integrate(&sho, 0.0, [0.0, 1.0], 10.0, &Options::default(), &[ev]).unwrap();
        assert_eq!(sol.stop, Stop::Event(0));
        let te = sol.last_t();
        // Located on the dense-output interpolant, so accuracy is bounded by
        // the interpolant error over the step, not by the bisection.
        assert!(
            (te - std::f64::consts::FRAC_PI_6).abs() < 2e-7,
            "event time {te} vs pi/6"
        );
    }

    #[test]
    fn falling_direction_ignores_rising_crossing() {
        let lin = |_t: f64, _y: &[f64; 1], dy: &mut [f64; 1]| {
            dy[0] = 1.0;
        };
        let ev = Event {
            g: Box::new(|_t, y: &[f64; 1]| y[0]),
            direction: Direction::Falling,
            terminal: true,
        };
        let sol = integrate(&lin, 0.0, [-1.0], 1.0, &Options::default(), &[ev]).unwrap();
        assert_eq!(sol.stop, Stop::EndOfSpan);
    }

    #[test]
    fn backward_integration() {
        let sol = integrate(&exp_sys, 0.0, [1.0], -1.0, &Options::default(), &[]).unwrap();
        let err = (sol.last_y()[0] - (-1.0f64).exp()).abs();
        assert!(err < 1e-9, "exp(-1) error {err}");
        let mid = sol.sample(-0.5)[0];
        assert!((mid - (-0.5f64).exp()).abs() < 1e-7);
    }
}
