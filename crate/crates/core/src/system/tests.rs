use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

#[test]
fn reduced_mass_equal_masses() {
    let m = 3.7;
    let mu = reduced_mass(m, m, m).unwrap();
    assert!((mu - m / 3.0f64.sqrt()).abs() < 1e-12, "mu = {mu}");
}

#[test]
fn reduced_mass_li_f_h() {
    let mu = reduced_mass(6.941, 18.998, 1.008).unwrap();
    let hand = (6.941_f64 * 18.998 * 1.008 / (6.941 + 18.998 + 1.008)).sqrt();
    assert!((mu - hand).abs() < 1e-12);
    assert!((mu - 2.2218).abs() < 1e-3, "mu = {mu} not near 2.222");
}

#[test]
fn reduced_mass_rejects_nonpositive() {
    assert!(reduced_mass(0.0, 1.0, 1.0).is_err());
    assert!(reduced_mass(1.0, -2.0, 1.0).is_err());
}

#[test]
fn skew_angle_equal_masses_is_pi_over_3() {
    let m = MassTriple::new(5.0, 5.0, 5.0).unwrap();
    assert!((m.skew_angle() - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
}

#[test]
fn mass_scaling_preserves_kinetic_form() {
    // T = mu_A,BC Rdot^2 / 2 + mu_BC rdot^2 / 2 must equal
    // mu0 (x1dot^2 + x2dot^2) / 2 for any bond velocities.
    let m = MassTriple::new(6.941, 18.998, 1.008).unwrap();
    let (rd_ab, rd_bc) = (0.37, -1.21);
    let mu_abc = m.m_a * (m.m_b + m.m_c) / m.total();
    let mu_bc = m.m_b * m.m_c / (m.m_b + m.m_c);
    let rdot = rd_ab + m.c_ratio() * rd_bc;
    let t_jacobi = 0.5 * mu_abc * rdot * rdot + 0.5 * mu_bc * rd_bc * rd_bc;
    let v = [-m.alpha() * rdot, m.beta() * rd_bc];
    let t_scaled = 0.5 * m.reduced_mass() * (v[0] * v[0] + v[1] * v[1]);
    assert!((t_jacobi - t_scaled).abs() < 1e-12);
    // bond_rates inverts the velocity map.
    let (back_ab, back_bc) = m.bond_rates(v);
    assert!((back_ab - rd_ab).abs() < 1e-12);
    assert!((back_bc - rd_bc).abs() < 1e-12);
}

proptest! {
    #[test]
    fn mass_scaled_round_trip(
        ma in 0.5f64..40.0,
        mb in 0.5f64..40.0,
        mc in 0.5f64..40.0,
        r_ab in 0.3f64..8.0,
        r_bc in 0.3f64..8.0,
    ) {
        let m = MassTriple::new(ma, mb, mc).unwrap();
        let x = m.mass_scaled(r_ab, r_bc).unwrap();
        let (back_ab, back_bc) = m.bond_lengths(x);
        prop_assert!((back_ab - r_ab).abs() < 1e-10);
        prop_assert!((back_bc - r_bc).abs() < 1e-10);
    }
}

#[test]
fn momentum_field_basics() {
    let surf = PotentialSurface::demo_separable(1.0);
    let x = [-6.0, 0.5];
    let v = surf.value(x);
    let field = MomentumField::new(&surf, v).unwrap();
    // E = V there: boundary point, not classically allowed.
    assert!(field.p0_sq(x).unwrap().abs() < 1e-12);
    assert!(!field.classically_allowed(x).unwrap());
    let field2 = MomentumField::new(&surf, v + 0.5).unwrap();
    let p2 = field2.p0_sq(x).unwrap();
    let mu0 = surf.masses().reduced_mass();
    assert!((p2 - 2.0 * mu0 * 0.5).abs() < 1e-12);
    assert!(field2.classically_allowed(x).unwrap());
}

#[test]
fn momentum_field_rejects_outside_domain() {
    let surf = PotentialSurface::demo_separable(1.0);
    let field = MomentumField::new(&surf, 2.0).unwrap();
    match field.p0_sq([99.0, 0.0]) {
        Err(Error::OutsideDomain(..)) => {}
        other => panic!("expected OutsideDomain, got {other:?}"),
    }
}

fn check_derivatives(surf: &PotentialSurface, n_points: u64, seed: u64, tol: f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = surf.domain();
    let h = 1e-5;
    for _ in 0..n_points {
        let x = [
            rng.gen_range(d.x1[0] + 2.0 * h..d.x1[1] - 2.0 * h),
            rng.gen_range(d.x2[0] + 2.0 * h..d.x2[1] - 2.0 * h),
        ];
        let v = surf.value(x);
        let g = surf.gradient(x);
        let hess = surf.hessian(x);
        // Centered differences of f carry roundoff ~ eps |f| / h on top of
        // truncation, so grant that much slack where |f| is large.
        let noise_g = 1e-11 * v.abs();
        let gmag = g[0].abs().max(g[1].abs());
        let noise_h = 1e-11 * gmag;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (surf.value(xp) - surf.value(xm)) / (2.0 * h);
            let scale = g[i].abs().max(1.0);
            assert!(
                (fd - g[i]).abs() < tol * scale + noise_g,
                "gradient[{i}] at {x:?}: analytic {} vs fd {fd}",
                g[i]
            );
            let gp = surf.gradient(xp);
            let gm = surf.gradient(xm);
            for j in 0..2 {
                let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                let scale = hess[i][j].abs().max(1.0);
                assert!(
                    (fd2 - hess[i][j]).abs() < tol * 10.0 * scale + noise_h,
                    "hessian[{i}][{j}] at {x:?}: analytic {} vs fd {fd2}",
                    hess[i][j]
                );
            }
        }
    }
}

#[test]
fn leps_derivatives_match_finite_differences() {
    check_derivatives(&PotentialSurface::demo_leps(), 1000, 71, 1e-6);
}

#[test]
fn separable_derivatives_match_finite_differences() {
    check_derivatives(&PotentialSurface::demo_separable(1.1), 200, 72, 1e-6);
    check_derivatives(&PotentialSurface::demo_separable_morse(1.1, 2.0), 200, 73, 1e-6);
}

#[test]
fn leps_channel_floor_settles_to_zero() {
    // Incoming channel: V at the channel floor approaches 0 from below with
    // the exchanged pair's exponential tail.
    let surf = PotentialSurface::demo_leps();
    let geom = surf.geometry();
    let x2c = geom.x2_in_center;
    let v6 = surf.value([geom.x1_corner - 6.0, x2c]);
    let v8 = surf.value([geom.x1_corner - 8.0, x2c]);
    assert!(v8.abs() < 5e-3, "channel floor at launch distance: {v8}");
    assert!(v8.abs() < 0.3 * v6.abs(), "tail not decaying: {v6} -> {v8}");
}

#[test]
fn leps_reduces_to_diatomic_in_channel() {
    // Far in the incoming channel the transverse cut is the BC Morse curve
    // (plus the offset that zeroes the channel floor), up to the residual
    // tail of the other two pairs.
    let surf = PotentialSurface::demo_leps();
    let m = surf.masses();
    let params = match surf.model() {
        SurfaceModel::Leps(p) => *p,
        _ => unreachable!(),
    };
    let x1 = surf.geometry().x1_corner - 7.5;
    for r_bc in [0.7, 0.95, 1.3, 2.0] {
        let x = [x1, m.beta() * r_bc];
        let v = surf.value(x);
        let morse = params.bc.singlet(r_bc) + params.bc.d;
        assert!(
            (v - morse).abs() < 5e-3,
            "channel cut at r_bc = {r_bc}: {v} vs Morse {morse}"
        );
    }
}

#[test]
fn leps_has_barrier_between_channels() {
    let surf = PotentialSurface::demo_leps();
    let geom = surf.geometry();
    // Channel floors: incoming 0; outgoing exothermic (below zero).
    let v_in = surf.value([geom.x1_launch, geom.x2_in_center]);
    assert!(v_in.abs() < 1e-3);
    // Sample along the corner region: the max along the channel-floor path
    // must rise above both asymptotes.
    let mut vmax = f64::NEG_INFINITY;
    for i in 0..200 {
        let x1 = geom.x1_corner - 1.5 + 3.0 * i as f64 / 199.0;
        if x1 > surf.domain().x1[1] {
            break;
        }
        let mut vmin_col = f64::INFINITY;
        for j in 0..200 {
            let x2 = surf.domain().x2[0] + (surf.domain().x2[1] - surf.domain().x2[0]) * j as f64 / 199.0;
            vmin_col = vmin_col.min(surf.value([x1, x2]));
        }
        vmax = vmax.max(vmin_col);
    }
    assert!(vmax > 0.05, "no barrier found: max channel-floor V = {vmax}");
}

#[test]
fn tabulated_reproduces_knots_and_is_c1() {
    let x1: Vec<f64> = (0..30).map(|i| -3.0 + 0.2 * i as f64).collect();
    let x2: Vec<f64> = (0..25).map(|j| -2.0 + 0.2 * j as f64).collect();
    let f = |a: f64, b: f64| (0.8 * a).sin() * (0.5 * b).cos() + 0.1 * a * b;
    let mut vals = Vec::new();
    for b in &x2 {
        for a in &x1 {
            vals.push(f(*a, *b));
        }
    }
    let grid = TabulatedGrid::new(x1.clone(), x2.clone(), vals, None).unwrap();
    for (j, b) in x2.iter().enumerate() {
        for (i, a) in x1.iter().enumerate() {
            let v = grid.value([*a, *b]);
            assert!(
                (v - f(*a, *b)).abs() < 1e-12,
                "knot ({i}, {j}) not reproduced: {v}"
            );
        }
    }
    // Gradient continuity across random cell edges.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let i = rng.gen_range(2..x1.len() - 2);
        let b = rng.gen_range(x2[2]..x2[x2.len() - 3]);
        let eps = 1e-9;
        let gl = grid.gradient([x1[i] - eps, b]);
        let gr = grid.gradient([x1[i] + eps, b]);
        for k in 0..2 {
            assert!(
                (gl[k] - gr[k]).abs() < 1e-6,
                "gradient jump across edge x1 = {}: {} vs {}",
                x1[i],
                gl[k],
                gr[k]
            );
        }
    }
}

#[test]
fn tabulated_rejects_nan_and_bad_shape() {
    let x1: Vec<f64> = (0..5).map(|i| i as f64).collect();
    let x2: Vec<f64> = (0..5).map(|i| i as f64).collect();
    let mut vals = vec![0.0; 25];
    vals[7] = f64::NAN;
    assert!(TabulatedGrid::new(x1.clone(), x2.clone(), vals, None).is_err());
    assert!(TabulatedGrid::new(x1, x2, vec![0.0; 24], None).is_err());
}

#[test]
fn surface_json_round_trip() {
    let surf = PotentialSurface::demo_leps();
    let text = surface_to_json(&surf).unwrap();
    let back = surface_from_json(&text, "round-trip").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let x = [rng.gen_range(-13.0..-1.0), rng.gen_range(0.3..8.0)];
        assert!((surf.value(x) - back.value(x)).abs() < 1e-12);
    }
}

#[test]
fn surface_json_rejects_malformed() {
    let bad_kind = r#"{"schema_version":1,"kind":"quartic","masses":{"m_a":1,"m_b":1,"m_c":1},
        "domain":{"x1":[-1,1],"x2":[-1,1]},"asymptotic_radius":1,"params":{}}"#;
    match surface_from_json(bad_kind, "test") {
        Err(Error::Schema { .. }) => {}
        other => panic!("expected schema error, got {other:?}"),
    }
    let bad_version = r#"{"schema_version":9,"kind":"leps","masses":{"m_a":1,"m_b":1,"m_c":1},
        "domain":{"x1":[-1,1],"x2":[-1,1]},"asymptotic_radius":1,"params":{}}"#;
    assert!(matches!(surface_from_json(bad_version, "test"), Err(Error::Schema { .. })));
    let unknown_field = r#"{"schema_version":1,"kind":"leps","masses":{"m_a":1,"m_b":1,"m_c":1},
        "domain":{"x1":[-1,1],"x2":[-1,1]},"asymptotic_radius":1,"params":{},"extra":true}"#;
    assert!(matches!(surface_from_json(unknown_field, "test"), Err(Error::Schema { .. })));
}
