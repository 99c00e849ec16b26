//! Averaged slow-flow of the weakly damped oscillator and the algebra of the
//! weakly forced response: amplitude cubic, locking test and determining
//! equations for T-periodic solutions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Averaged amplitude and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedState {
    pub r: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    First,
    Second,
}

/// Mean of `sin τ · f(r cos τ, -r sin τ)` over one period for
/// `f(x, ẋ) = (1 - x²)ẋ`.
pub fn f1_average(r: f64) -> f64 {
    r * r * r / 8.0 - r / 2.0
}

/// Right-hand side of the averaged amplitude equation `dr/dt = -a f₁(r)`.
pub fn averaged_rate(r: f64, a: f64) -> f64 {
    -a * f1_average(r)
}

/// Closed-form solution of the averaged amplitude equation,
/// `r(t) = 2e^{at/2} / √(e^{at} + 4/r₀² - 1)`.
pub fn averaged_amplitude(r0: f64, a: f64, t: f64) -> Result<f64> {
    if !(r0 >= 0.0) {
        return Err(Error::Domain(format!("initial amplitude r0 = {r0} must be >= 0")));
    }
    if r0 == 0.0 {
        return Ok(0.0);
    }
    // divided through by e^{at/2} so large at does not overflow
    let k = 4.0 / (r0 * r0) - 1.0;
    Ok(2.0 / (1.0 + k * (-a * t).exp()).sqrt())
}

/// Linear stability of an equilibrium of the averaged amplitude equation for `a > 0`.
pub fn equilibrium_stability(r_eq: f64) -> Result<Stability> {
    const TOL: f64 = 1e-12;
    if r_eq.abs() > TOL && (r_eq - 2.0).abs() > TOL {
        return Err(Error::NotEquilibrium(r_eq));
    }
    // d/dr [(r/2)(1 - r²/4)] = 1/2 - 3r²/8
    let slope = 0.5 - 3.0 * r_eq * r_eq / 8.0;
    Ok(if slope < 0.0 { Stability::Stable } else { Stability::Unstable })
}

/// Averaged amplitude and phase at time `t`. The second-order phase picks up
/// the frequency correction `-a²/16`.
pub fn averaged_state(order: Order, r0: f64, psi0: f64, a: f64, t: f64) -> Result<AveragedState> {
    let r = averaged_amplitude(r0, a, t)?;
    let psi = match order {
        Order::First => psi0,
        Order::Second => psi0 - a * a / 16.0 * t,
    };
    Ok(AveragedState { r, psi })
}

/// Approximate solution `x(t) = r(t) cos(t + ψ(t))`.
pub fn averaged_solution(order: Order, r0: f64, psi0: f64, a: f64, t: f64) -> Result<f64> {
    let s = averaged_state(order, r0, psi0, a, t)?;
    Ok(s.r * (t + s.psi).cos())
}

/// Result of checking Liénard's conditions for `f(x) = a(x² - 1)`, `g(x) = x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LienardReport {
    /// Unique positive root of `F(x) = ∫₀ˣ f`.
    pub gamma: f64,
    /// f even, g odd, g > 0 for x > 0, F has a unique positive root,
    /// F < 0 on (0, γ) and F > 0 increasing on (γ, ∞).
    pub conditions: [bool; 5],
}

impl LienardReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|&c| c)
    }
}

/// Checks Liénard's conditions on a sample grid. The damping scale `a > 0`
/// only rescales F, so the check uses `a = 1`.
pub fn lienard_check() -> LienardReport {
    let f = |x: f64| x * x - 1.0;
    let g = |x: f64| x;
    let big_f = |x: f64| x * x * x / 3.0 - x;
    let grid: Vec<f64> = (1..=4000).map(|i| i as f64 * 2.5e-3).collect();

    let f_even = grid.iter().all(|&x| f(x) == f(-x));
    let g_odd = grid.iter().all(|&x| g(-x) == -g(x));
    let g_pos = grid.iter().all(|&x| g(x) > 0.0);

    // F(x)/x = x²/3 - 1 is increasing on (0, ∞), so a sign change there is the only root
    let (mut lo, mut hi) = (1.0_f64, 3.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if big_f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let sign_changes = grid
        .windows(2)
        .filter(|w| (big_f(w[0]) < 0.0) != (big_f(w[1]) < 0.0))
        .count();
    let unique_root = sign_changes == 1;

    let below = grid.iter().filter(|&&x| x < gamma - 1e-9).all(|&x| big_f(x) < 0.0);
    let above: Vec<f64> = grid.iter().copied().filter(|&x| x > gamma + 1e-9).collect();
    let above_ok = above.iter().all(|&x| big_f(x) > 0.0)
        && above.windows(2).all(|w| big_f(w[1]) > big_f(w[0]));

    LienardReport { gamma, conditions: [f_even, g_odd, g_pos, unique_root, below && above_ok] }
}

/// Unique positive root of `r³ - 4r - 4b/(aω²) = 0`: the amplitude of the
/// entrained response.
pub fn amplitude_response(a: f64, b: f64, omega: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && omega > 0.0) {
        return Err(Error::Domain(format!("need a, b, omega > 0 (got {a}, {b}, {omega})")));
    }
    solve_amplitude_cubic(4.0 * b / (a * omega * omega))
}

/// Positive root of `r³ - 4r - c = 0` for `c >= 0` by Newton iteration
/// safeguarded with bisection.
pub fn solve_amplitude_cubic(c: f64) -> Result<f64> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("cubic constant {c} must be finite and >= 0")));
    }
    let p = |r: f64| r * r * r - 4.0 * r - c;
    let dp = |r: f64| 3.0 * r * r - 4.0;
    // p < 0 on (0, 2], p(2 + c) > 0
    let (mut lo, mut hi) = (2.0_f64, 2.0 + c);
    if c == 0.0 {
        return Ok(2.0);
    }
    let mut r = hi;
    const MAX_ITER: usize = 200;
    for _ in 0..MAX_ITER {
        let v = p(r);
        if v == 0.0 {
            return Ok(r);
        }
        if v < 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
        let mut next = r - v / dp(r);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r {
            return Ok(best_of(&p, next, r));
        }
        r = next;
    }
    let residual = p(r).abs();
    if residual <= 1e-12 * (1.0 + c) {
        return Ok(r);
    }
    Err(Error::ConvergenceFailure { iterations: MAX_ITER, residual })
}

fn best_of(p: &impl Fn(f64) -> f64, u: f64, v: f64) -> f64 {
    if p(u).abs() <= p(v).abs() {
        u
    } else {
        v
    }
}

/// `b²/(4(ω² - 1)²) >= 1`, true at zero detuning.
pub fn locking_predicate(_a: f64, b: f64, omega: f64) -> bool {
    let detune = omega * omega - 1.0;
    b * b >= 4.0 * detune * detune
}

/// Amplitude-response curve `r(σ)` at fixed `a`, `b`, with `ω² = 1 + bσ`.
/// Grid points with `ω² <= 0` are skipped.
pub fn amplitude_curve(a: f64, b: f64, sigmas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let w2 = 1.0 + b * sigma;
        if w2 <= 0.0 {
            continue;
        }
        out.push((sigma, amplitude_response(a, b, w2.sqrt())?));
    }
    Ok(out)
}

pub fn write_amplitude_csv<W: Write>(curve: &[(f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "sigma,r")?;
    for (s, r) in curve {
        writeln!(w, "{s},{r}")?;
    }
    Ok(())
}

/// A candidate `(a₁, a₂)` for the determining equations together with the
/// detuning it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminingPoint {
    pub a1: f64,
    pub a2: f64,
    pub sigma: f64,
}

impl DeterminingPoint {
    pub fn from_polar(r: f64, phi: f64, sigma: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { a1: r * c, a2: r * s, sigma }
    }

    pub fn r(&self) -> f64 {
        self.a1.hypot(self.a2)
    }

    pub fn phi(&self) -> f64 {
        self.a2.atan2(self.a1)
    }
}

/// Left-hand sides of the determining equations
/// `(σ/ω²)a₂ + (1 - |a|²/4)a₁ + (b/aω²)cos ϑ` and
/// `-(σ/ω²)a₁ + (1 - |a|²/4)a₂ + (b/aω²)sin ϑ`.
pub fn determining_residual(pt: &DeterminingPoint, a: f64, b: f64, omega: f64, theta: f64) -> (f64, f64) {
    let s = pt.sigma / (omega * omega);
    let c = b / (a * omega * omega);
    let q = 1.0 - (pt.a1 * pt.a1 + pt.a2 * pt.a2) / 4.0;
    (
        s * pt.a2 + q * pt.a1 + c * theta.cos(),
        -s * pt.a1 + q * pt.a2 + c * theta.sin(),
    )
}

fn determining_jacobian(pt: &DeterminingPoint, omega: f64) -> [[f64; 2]; 2] {
    let s = pt.sigma / (omega * omega);
    let q = 1.0 - (pt.a1 * pt.a1 + pt.a2 * pt.a2) / 4.0;
    let cross = pt.a1 * pt.a2 / 2.0;
    [
        [q - pt.a1 * pt.a1 / 2.0, s - cross],
        [-s - cross, q - pt.a2 * pt.a2 / 2.0],
    ]
}

fn solve2(m: [[f64; 2]; 2], rhs: (f64, f64)) -> Option<(f64, f64)> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(((m[1][1] * rhs.0 - m[0][1] * rhs.1) / det, (-m[1][0] * rhs.0 + m[0][0] * rhs.1) / det))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminingSolution {
    pub point: DeterminingPoint,
    /// Jacobian determinant at the root; nonzero certifies a simple root.
    pub jacobian_det: f64,
    pub iterations: usize,
}

fn detuning_for(b: f64, omega: f64) -> Result<f64> {
    if b > 0.0 {
        Ok((omega * omega - 1.0) / b)
    } else if omega == 1.0 {
        Ok(0.0)
    } else {
        Err(Error::Domain("b = 0 requires omega = 1 (sigma undefined)".into()))
    }
}

/// Non-negative roots of `ρ³/16 - ρ²/2 + (1 + s²)ρ - c²`, ascending.
fn squared_radius_roots(s: f64, c: f64) -> Vec<f64> {
    let k1 = 1.0 + s * s;
    let p = |x: f64| ((x / 16.0 - 0.5) * x + k1) * x - c * c;
    let mut cuts = vec![0.0];
    let disc = 1.0 - 0.75 * k1;
    if disc > 0.0 {
        let sq = disc.sqrt();
        cuts.extend([8.0 / 3.0 * (1.0 - sq), 8.0 / 3.0 * (1.0 + sq)]);
    }
    cuts.push(1.0 + 16.0 * k1.max(c * c).max(0.5));
    let mut roots: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (plo, phi) = (p(lo), p(hi));
        if plo == 0.0 {
            roots.push(lo);
            continue;
        }
        if plo * phi > 0.0 {
            continue;
        }
        let rising = plo < 0.0;
        while hi - lo > 4.0 * f64::EPSILON * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if (p(mid) < 0.0) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(if p(lo).abs() <= p(hi).abs() { lo } else { hi });
    }
    if p(*cuts.last().unwrap()) == 0.0 {
        roots.push(*cuts.last().unwrap());
    }
    roots.dedup_by(|u, v| (*u - *v).abs() <= 1e-12 * v.max(1.0));
    roots
}

/// Every solution of the determining equations. Eliminating the phase
/// leaves `|a|²((1 - |a|²/4)² + (σ/ω²)²) = (b/aω²)²`, a cubic in `|a|²` with up
/// to three positive roots; each fixes `(a₁, a₂)` uniquely except on the free
/// circle `b = 0`, where `direction` picks the point.
pub fn determining_roots(a: f64, b: f64, omega: f64, theta: f64, direction: f64) -> Result<Vec<DeterminingPoint>> {
    if a == 0.0 || !(omega > 0.0) || b < 0.0 {
        return Err(Error::Domain(format!("need a != 0, b >= 0, omega > 0 (got {a}, {b}, {omega})")));
    }
    let sigma = detuning_for(b, omega)?;
    let w2 = omega * omega;
    let (s, c) = (sigma / w2, b / (a * w2));
    let (st, ct) = theta.sin_cos();
    Ok(squared_radius_roots(s, c)
        .into_iter()
        .map(|rho| {
            let q = 1.0 - rho / 4.0;
            let den = q * q + s * s;
            if c > 0.0 && den > 0.0 {
                DeterminingPoint { a1: -c * (q * ct - s * st) / den, a2: -c * (s * ct + q * st) / den, sigma }
            } else {
                DeterminingPoint::from_polar(rho.sqrt(), direction, sigma)
            }
        })
        .collect())
}

/// The solution of the determining equations nearest `guess = (a₁, a₂)`,
/// polished by Newton iteration.
///
/// With `b = 0` the detuning is undefined; only `ω = 1` (σ taken as 0) is accepted.
pub fn solve_determining(
    a: f64,
    b: f64,
    omega: f64,
    theta: f64,
    guess: (f64, f64),
) -> Result<DeterminingSolution> {
    const TARGET: f64 = 1e-10;
    const MIN_DET: f64 = 1e-8;
    const POLISH: usize = 8;

    let direction = guess.1.atan2(guess.0);
    let dist = |p: &DeterminingPoint| (p.a1 - guess.0).hypot(p.a2 - guess.1);
    let mut pt = determining_roots(a, b, omega, theta, direction)?
        .into_iter()
        .min_by(|u, v| dist(u).total_cmp(&dist(v)))
        .ok_or(Error::ConvergenceFailure { iterations: 0, residual: f64::NAN })?;

    let size = |g: (f64, f64)| g.0.abs().max(g.1.abs());
    let mut g = determining_residual(&pt, a, b, omega, theta);
    let mut iterations = 0;
    while iterations < POLISH && size(g) > 0.0 {
        let Some((d1, d2)) = solve2(determining_jacobian(&pt, omega), g) else { break };
        let trial = DeterminingPoint { a1: pt.a1 - d1, a2: pt.a2 - d2, sigma: pt.sigma };
        let tg = determining_residual(&trial, a, b, omega, theta);
        if size(tg) >= size(g) {
            break;
        }
        pt = trial;
        g = tg;
        iterations += 1;
    }
    let residual = size(g);
    if residual > TARGET {
        return Err(Error::ConvergenceFailure { iterations, residual });
    }
    let j = determining_jacobian(&pt, omega);
    let jacobian_det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if jacobian_det.abs() < MIN_DET {
        return Err(Error::SingularJacobian(jacobian_det));
    }
    Ok(DeterminingSolution { point: pt, jacobian_det, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    /// Trapezoid rule on the periodic integrand: spectrally accurate.
    fn f1_quadrature(r: f64) -> f64 {
        let n = 4096;
        let h = TAU / n as f64;
        (0..n)
            .map(|k| {
                let tau = k as f64 * h;
                let (x, xdot) = (r * tau.cos(), -r * tau.sin());
                tau.sin() * (1.0 - x * x) * xdot
            })
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1_average(0.0), 0.0);
        assert_eq!(f1_average(2.0), 0.0);
        assert!((f1_average(1.0) - f1_quadrature(1.0)).abs() <= 1e-10);
    }

    #[test]
    fn amplitude_closed_form_edges() {
        for a in [0.01, 0.3, 4.0] {
            for t in [0.0, 1.0, 100.0] {
                assert_eq!(averaged_amplitude(2.0, a, t).unwrap(), 2.0);
            }
        }
        assert!((averaged_amplitude(1.0, 0.1, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(averaged_amplitude(0.0, 0.1, 5.0).unwrap(), 0.0);
        assert!(matches!(averaged_amplitude(-1.0, 0.1, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn amplitude_matches_rk4_of_averaged_equation() {
        let (r0, a, t_end) = (1.0, 0.1, 20.0);
        let n = 20_000;
        let h = t_end / n as f64;
        let f = |r: f64| (a * r / 2.0) * (1.0 - r * r / 4.0);
        let mut r = r0;
        for _ in 0..n {
            let k1 = f(r);
            let k2 = f(r + 0.5 * h * k1);
            let k3 = f(r + 0.5 * h * k2);
            let k4 = f(r + h * k3);
            r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((averaged_amplitude(r0, a, t_end).unwrap() - r).abs() < 1e-8);
    }

    #[test]
    fn stability_of_equilibria() {
        assert_eq!(equilibrium_stability(0.0).unwrap(), Stability::Unstable);
        assert_eq!(equilibrium_stability(2.0).unwrap(), Stability::Stable);
        assert!(matches!(equilibrium_stability(1.0), Err(Error::NotEquilibrium(_))));
    }

    #[test]
    fn averaged_solution_orders() {
        assert_eq!(averaged_solution(Order::First, 2.0, 0.0, 0.3, 0.0).unwrap(), 2.0);
        let a: f64 = 0.3;
        let t = 16.0 * PI / (a * a);
        let first = averaged_state(Order::First, 2.0, 0.0, a, t).unwrap();
        let second = averaged_state(Order::Second, 2.0, 0.0, a, t).unwrap();
        assert!(((first.psi - second.psi) - PI).abs() < 1e-6);
    }

    #[test]
    fn lienard_conditions() {
        let rep = lienard_check();
        assert!((rep.gamma - 3f64.sqrt()).abs() < 1e-12);
        assert!(rep.all_hold());
        let big_f = |x: f64| x * x * x / 3.0 - x;
        assert!(big_f(1.0) < 0.0 && big_f(2.0) > 0.0);
    }

    #[test]
    fn cubic_free_limit_and_bisection_oracle() {
        assert_eq!(solve_amplitude_cubic(0.0).unwrap(), 2.0);
        let tiny = amplitude_response(1.0, 1e-12, 1.0).unwrap();
        assert!((tiny - 2.0).abs() < 1e-11);

        let r = amplitude_response(1.0, 0.5, 1.0).unwrap();
        let p = |r: f64| r * r * r - 4.0 * r - 2.0;
        let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if p(mid) < 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert!((r - 0.5 * (lo + hi)).abs() < 1e-12);
        assert!(p(r).abs() <= 1e-12);
    }

    #[test]
    fn cubic_rejects_bad_domain() {
        assert!(amplitude_response(0.0, 1.0, 1.0).is_err());
        assert!(amplitude_response(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn locking_examples() {
        assert!(!locking_predicate(1.0, 2.0, 1.5));
        assert!(locking_predicate(1.0, 0.5, 1.1));
        assert!(locking_predicate(1.0, 1e-9, 1.0));
    }

    #[test]
    fn residual_substitution() {
        let (a, b, omega) = (2.0, 3.0, 1.5);
        let pt = DeterminingPoint { a1: 0.0, a2: 0.0, sigma: 0.7 };
        let (g1, g2) = determining_residual(&pt, a, b, omega, FRAC_PI_2);
        assert!(g1.abs() < 1e-16);
        assert!((g2 - b / (a * omega * omega)).abs() < 1e-15);

        let free = DeterminingPoint { a1: 2.0, a2: 0.0, sigma: 0.0 };
        assert_eq!(determining_residual(&free, 1.0, 0.0, 1.0, FRAC_PI_2), (0.0, 0.0));
    }

    #[test]
    fn free_limit_solution_has_radius_two() {
        let sol = solve_determining(1.0, 1e-6, 1.0, 0.0, (1.8, 0.3)).unwrap();
        assert!((sol.point.r() - 2.0).abs() < 1e-6);
        // at b = 0 exactly every point of the circle r = 2 is a root
        assert!(matches!(
            solve_determining(1.0, 0.0, 1.0, 0.0, (1.8, 0.3)),
            Err(Error::SingularJacobian(_))
        ));
    }

    #[test]
    fn roots_match_the_cubic_count() {
        // strong detuning, weak forcing: one small response only
        assert_eq!(determining_roots(1.0, 0.1, 2.0, 0.0, 0.0).unwrap().len(), 1);
        // near resonance the three-response region appears (σ small, c moderate)
        let many = determining_roots(1.0, 1.2, 1.0005, 0.4, 0.0).unwrap();
        for p in &many {
            let (g1, g2) = determining_residual(p, 1.0, 1.2, 1.0005, 0.4);
            assert!(g1.abs().max(g2.abs()) < 1e-10);
        }
        let roots = squared_radius_roots(0.1, 0.3);
        assert_eq!(roots.len(), 3, "{roots:?}");
    }

    #[test]
    fn polar_round_trip() {
        let pt = DeterminingPoint::from_polar(1.7, -2.1, 0.3);
        let back = DeterminingPoint::from_polar(pt.r(), pt.phi(), pt.sigma);
        assert!((back.a1 - pt.a1).abs() < 1e-12 && (back.a2 - pt.a2).abs() < 1e-12);
    }

    #[test]
    fn amplitude_csv() {
        let curve = amplitude_curve(1.0, 0.5, &[-4.0, 0.0, 1.0]).unwrap();
        // σ = -4 gives ω² = -1 and is skipped
        assert_eq!(curve.len(), 2);
        let mut buf = Vec::new();
        write_amplitude_csv(&curve, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("sigma,r\n0,"));
    }
}
