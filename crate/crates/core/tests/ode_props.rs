use vdp_core::ode::{integrate, Trajectory};
use vdp_core::{Params, State, SystemForm};

fn run(p: &Params, init: State, dt: f64, n: usize) -> Trajectory {
    integrate(SystemForm::ForcedStandard, p, init, dt, n).unwrap()
}

#[test]
fn harmonic_energy_is_conserved() {
    let traj = run(&Params::autonomous(0.0), State::new(0.0, 1.3, -0.4), 1e-3, 100_000);
    let e0 = 1.3f64 * 1.3 + 0.4 * 0.4;
    let worst = traj.samples.iter().map(|(x, y)| (x * x + y * y - e0).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "energy drift {worst:e}");
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let p = Params::forced(3.0, 5.0, 1.788).unwrap();
    let a = run(&p, State::new(0.0, 0.5, 0.0), 1e-3, 20_000);
    let b = run(&p, State::new(0.0, 0.5, 0.0), 1e-3, 20_000);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn unforced_system_is_autonomous() {
    let p = Params::autonomous(1.5);
    let a = run(&p, State::new(0.0, 0.2, 0.1), 1e-3, 10_000);
    let b = run(&p, State::new(17.0, 0.2, 0.1), 1e-3, 10_000);
    assert_eq!(a.samples, b.samples);
    assert_eq!(b.time(10_000), 17.0 + 10_000.0 * 1e-3);
}

#[test]
fn all_forms_agree_on_x() {
    let p = Params::forced(0.5, 0.7, 1.2).unwrap();
    let init = State::new(0.0, 0.8, 0.1);
    let standard = run(&p, init, 1e-3, 5000);
    for form in [SystemForm::LienardPlane, SystemForm::Transformed] {
        let (x0, y0) = match form {
            // Liénard plane: y = ẋ + a(x³/3 - x)
            SystemForm::LienardPlane => (0.8, 0.1 + 0.5 * (0.8f64.powi(3) / 3.0 - 0.8)),
            _ => vdp_core::ode::to_transformed(0.0, 0.8, 0.1, p.omega),
        };
        let other = integrate(form, &p, State::new(0.0, x0, y0), 1e-3, 5000).unwrap();
        let (t, (z1, z2)) = (other.time(5000), other.samples[5000]);
        let x = match form {
            SystemForm::LienardPlane => z1,
            _ => vdp_core::ode::from_transformed(t, z1, z2, p.omega).0,
        };
        assert!((x - standard.samples[5000].0).abs() < 1e-7, "{form:?}: {x} vs {}", standard.samples[5000].0);
    }
}
