//! Acceptance suite. Prints one PASS/FAIL line per criterion, followed by the
//! individual checks.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use friedrichs::bound_states::{count_bound_states, solve_bound_states, BoundStateKind};
use friedrichs::dynamics::{long_time_limit, survival_probability};
use friedrichs::lattice::{self, LatticeOptions};
use friedrichs::markovian::{
    anti_pt_check, markovian_from_parts, markovian_survival, markovian_survival_expm, resonance_decomposition,
    waveguide_markovian, ResonanceKind,
};
use friedrichs::quadrature::adaptive_kronrod;
use friedrichs::spectral::{self_energy, self_energy_quadrature};
use friedrichs::waveguide::{
    build_waveguide_model, default_initial_state, waveguide_bound_state_count, WaveguideForms,
};
use friedrichs::{
    Complex64, ContinuumBand, DiscreteSpectrum, FriedrichsModel, InitialState, Model, Site, SpectralDensity,
    WaveguideParams,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn runtime(limit: Duration, start: Instant) -> Check {
    let took = start.elapsed();
    check("runtime", took < limit, format!("{took:.2?} (limit {limit:?})"))
}

/// Checks that cannot pass as stated. The l=1 chain on the waveguide decays
/// completely, but slowly: both the exact dynamics and the lattice give
/// p(50/λ) ≈ 0.27, and p first drops below 0.02 near t = 242/λ.
const KNOWN_FAILURES: &[(u32, &str)] = &[(4, "l=1 p(50) < 0.02")];

fn wg(n: usize, kappa: f64, xi: f64, site: Site) -> WaveguideParams {
    WaveguideParams::new(n, 1.0, kappa, xi, site).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_model(rng: &mut ChaCha8Rng) -> Model {
    let n = rng.gen_range(1..=4);
    let mut levels: Vec<f64> = Vec::new();
    while levels.len() < n {
        let e = rng.gen_range(-2.5..2.5);
        if levels.iter().all(|x: &f64| (x - e).abs() > 1e-2) {
            levels.push(e);
        }
    }
    levels.sort_by(f64::total_cmp);
    let couplings = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let zeros = if rng.gen_bool(0.3) {
        vec![rng.gen_range(-0.8..0.8)]
    } else {
        Vec::new()
    };
    let density = SpectralDensity::Jacobi {
        amplitude: rng.gen_range(0.05..0.6),
        s_low: rng.gen_range(0.3..2.0),
        s_up: rng.gen_range(0.3..2.0),
        zeros,
    };
    FriedrichsModel::new(
        DiscreteSpectrum::real(levels, couplings),
        ContinuumBand::new(-1.0, 1.0, density),
    )
    .validate()
    .unwrap()
}

fn random_initial(rng: &mut ChaCha8Rng, n: usize) -> InitialState<f64> {
    let c: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    InitialState::new(c.into_iter().map(|x| x / norm).collect()).unwrap()
}

fn criterion_1() -> Vec<Check> {
    let start = Instant::now();
    let (mut worst, mut worst_edge) = (0.0f64, 0.0f64);
    for site in [Site::Finite(1), Site::Finite(2), Site::Finite(3), Site::Infinite] {
        for kappa in [0.75, 4.0] {
            let params = wg(2, kappa, 0.5, site);
            let model = build_waveguide_model(&params).unwrap();
            let forms = WaveguideForms { params };
            for k in 0..10 {
                let d = 2.0 * kappa * 10f64.powf(-3.0 + 4.0 * k as f64 / 9.0);
                for e in [-(2.0 * kappa + d), 2.0 * kappa + d] {
                    let q = self_energy_quadrature(&model, e).unwrap();
                    worst = worst.max((q / forms.sigma_outside(e) - 1.0).abs());
                }
            }
            if let Site::Finite(l) = site {
                let expect = l as f64 / kappa;
                for (edge, sign) in [(-2.0 * kappa, -1.0), (2.0 * kappa, 1.0)] {
                    let q = self_energy_quadrature(&model, edge).unwrap();
                    let c = forms.sigma_outside(edge);
                    worst_edge = worst_edge.max((q - sign * expect).abs()).max((c - sign * expect).abs());
                }
            }
        }
    }
    vec![
        check("closed form vs quadrature", worst < 1e-8, format!("max relative error {worst:.2e}")),
        check("edge values ±l/κ", worst_edge < 1e-8, format!("max error {worst_edge:.2e}")),
        runtime(Duration::from_secs(5), start),
    ]
}

/// Sign changes of `det[E - ε - Σ(E) f f†]` on a grid that clusters at the
/// band edges.
fn det_sign_changes(model: &Model) -> usize {
    let n = model.n_levels();
    let det = |e: f64| {
        let s = self_energy(model, e).unwrap();
        let f = model.couplings();
        let m = DMatrix::from_fn(n, n, |r, c| {
            let v = -s * (f[r] * f[c].conj()).re;
            if r == c {
                v + e - model.levels()[r]
            } else {
                v
            }
        });
        m.determinant()
    };
    let (lo, up) = (model.band().omega_low, model.band().omega_up);
    let half = 50_000;
    let reach = 12.0;
    let mut changes = 0;
    for side in [-1.0, 1.0] {
        let edge = if side < 0.0 { lo } else { up };
        let mut prev = None;
        for k in 1..=half {
            let x = k as f64 / half as f64;
            let v = det(edge + side * reach * x * x).signum();
            if let Some(p) = prev {
                if p != v {
                    changes += 1;
                }
            }
            prev = Some(v);
        }
    }
    changes
}

fn criterion_2() -> Vec<Check> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for i in 0..50 {
        let model = random_model(&mut rng);
        let census = count_bound_states(&model).unwrap();
        let outside = census.m_below + census.m_above;
        let brute = det_sign_changes(&model);
        if outside != brute {
            mismatches.push(format!("model {i}: census {outside}, determinant {brute}"));
        }
    }
    vec![
        check(
            "census equals determinant sign changes",
            mismatches.is_empty(),
            if mismatches.is_empty() {
                "50/50 models".into()
            } else {
                mismatches.join("; ")
            },
        ),
        runtime(Duration::from_secs(30), start),
    ]
}

fn criterion_3() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sites = [Site::Finite(1), Site::Finite(2), Site::Finite(3), Site::Infinite];
    let mut mismatches = Vec::new();
    let mut maxima = Vec::new();
    for n in 1..=6 {
        for _ in 0..20 {
            let kappa = rng.gen_range(0.05..2.5);
            let xi = rng.gen_range(0.05..4.0);
            let site = sites[rng.gen_range(0..sites.len())];
            let p = wg(n, kappa, xi, site);
            let special = waveguide_bound_state_count(&p).unwrap();
            let generic = count_bound_states(&build_waveguide_model(&p).unwrap()).unwrap();
            let a = (special.m_below, special.m_above, special.m_bic);
            let b = (generic.m_below, generic.m_above, generic.m_bic);
            if a != b {
                mismatches.push(format!("N={n} κ={kappa:.3} ξ={xi:.3} l={site}: {a:?} vs {b:?}"));
            }
        }
        let mut best = (0, 0.0, 0.0, Site::Infinite);
        for i in 1..=120 {
            for j in 1..=80 {
                for site in sites {
                    let (kappa, xi) = (0.025 * i as f64, 0.1 * j as f64);
                    let c = waveguide_bound_state_count(&wg(n, kappa, xi, site)).unwrap();
                    let m = c.m_below + c.m_above;
                    if m > best.0 {
                        best = (m, kappa, xi, site);
                    }
                }
            }
        }
        // the generic census must reach the same maximum
        let (_, kappa, xi, site) = best;
        let g = count_bound_states(&build_waveguide_model(&wg(n, kappa, xi, site)).unwrap()).unwrap();
        maxima.push((n, best.0, g.m_below + g.m_above));
    }
    let bad_max: Vec<String> = maxima
        .iter()
        .filter(|(n, m, g)| {
            let expect = if n % 2 == 1 { n + 1 } else { *n };
            *m != expect || *g != expect
        })
        .map(|(n, m, g)| format!("N={n}: {m} (generic {g})"))
        .collect();
    vec![
        check(
            "specialized equals generic census",
            mismatches.is_empty(),
            if mismatches.is_empty() {
                "120/120 points".into()
            } else {
                mismatches.join("; ")
            },
        ),
        check(
            "maximum counts N+1 (odd) and N (even)",
            bad_max.is_empty(),
            if bad_max.is_empty() {
                format!("{:?}", maxima.iter().map(|m| m.1).collect::<Vec<_>>())
            } else {
                bad_max.join("; ")
            },
        ),
    ]
}

fn grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt).round() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_4() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();

    let p1 = wg(3, 0.75, 0.25, Site::Finite(1));
    let m1 = build_waveguide_model(&p1).unwrap();
    let c1 = default_initial_state(&p1).unwrap();
    let times = grid(50.0, 0.25);
    let analytic = survival_probability(&m1, &c1, &times).unwrap();
    let oracle = lattice::evolve(&p1, 3, 50.0, 0.25).unwrap();
    let d = max_abs_diff(&analytic.p, &oracle.p);
    out.push(check("l=1 analytic vs lattice", d < 1e-2, format!("max |Δp| {d:.2e}")));
    let end = *analytic.p.last().unwrap();
    out.push(check("l=1 p(50) < 0.02", end < 0.02, format!("p(50) = {end:.4}")));

    let p2 = wg(3, 0.75, 0.25, Site::Finite(2));
    let m2 = build_waveguide_model(&p2).unwrap();
    let c2 = default_initial_state(&p2).unwrap();
    let states = solve_bound_states(&m2).unwrap();
    let bic = states
        .iter()
        .any(|s| s.kind == BoundStateKind::InContinuum && s.energy.abs() < 1e-9);
    out.push(check("l=2 BIC at E=0", bic, format!("{} bound states", states.len())));
    let limit = long_time_limit(&m2, &c2, &states).unwrap();
    let late = grid(200.0, 0.5).into_iter().map(|t| t + 200.0).collect::<Vec<_>>();
    let analytic = survival_probability(&m2, &c2, &late).unwrap();
    let oracle = lattice::evolve(&p2, 3, 400.0, 0.5).unwrap();
    let oracle_late = &oracle.p[400..];
    let (a_mean, o_mean) = (mean(&analytic.p), mean(oracle_late));
    let (first, second) = (mean(&oracle_late[..200]), mean(&oracle_late[200..]));
    out.push(check(
        "l=2 saturation",
        (first - second).abs() < 1e-2 && second > 0.1,
        format!("oracle means {first:.4} on [200,300], {second:.4} on [300,400]"),
    ));
    out.push(check(
        "l=2 long-time mean vs C",
        (a_mean - limit.mean).abs() < 2e-2,
        format!("C = {:.4}, analytic mean {a_mean:.4}", limit.mean),
    ));
    out.push(check(
        "l=2 oracle average vs C",
        (o_mean - limit.mean).abs() < 2e-2,
        format!("oracle mean {o_mean:.4}"),
    ));

    let pi = wg(3, 0.75, 0.25, Site::Infinite);
    let mi = build_waveguide_model(&pi).unwrap();
    let states = solve_bound_states(&mi).unwrap();
    let mut outside: Vec<f64> = states
        .iter()
        .filter(|s| s.kind != BoundStateKind::InContinuum)
        .map(|s| s.energy)
        .collect();
    outside.sort_by(f64::total_cmp);
    out.push(check(
        "l=∞ two bound states outside the band",
        outside.len() == 2,
        format!("{outside:?}"),
    ));
    if outside.len() == 2 {
        let beat = outside[1] - outside[0];
        let dt = 0.25;
        let oracle = lattice::evolve(&pi, 3, 1100.0, dt).unwrap();
        let window = &oracle.p[400..4400];
        let avg = mean(window);
        let len = window.len();
        let mut buf: Vec<rustfft::num_complex::Complex<f64>> = window
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let hann = 0.5 - 0.5 * (2.0 * PI * i as f64 / (len - 1) as f64).cos();
                rustfft::num_complex::Complex::new((v - avg) * hann, 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(len).process(&mut buf);
        let peak = (1..len / 2)
            .max_by(|a, b| buf[*a].norm().total_cmp(&buf[*b].norm()))
            .unwrap();
        let bin = 2.0 * PI / (len as f64 * dt);
        let found = peak as f64 * bin;
        out.push(check(
            "l=∞ FFT peak at E2-E1",
            (found - beat).abs() <= bin,
            format!("peak {found:.4}, E2-E1 {beat:.4}, bin {bin:.4}"),
        ));
    }
    out.push(runtime(Duration::from_secs(120), start));
    out
}

fn criterion_5() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut worst = 0.0f64;
    let mut worst_pt = 0.0f64;
    for k in 0..=160 {
        let xi = 0.05 * k as f64;
        let h = waveguide_markovian(&wg(2, 4.0, xi, Site::Infinite)).unwrap();
        let sys = resonance_decomposition(&h);
        let a = xi * xi / 16.0;
        let root = Complex64::new(1.0 - a * a, 0.0).sqrt();
        let mut expect = [Complex64::new(0.0, -a) + root, Complex64::new(0.0, -a) - root];
        expect.sort_by(|x, y| y.im.partial_cmp(&x.im).unwrap().then(x.re.partial_cmp(&y.re).unwrap()));
        for (z, e) in sys.eigenvalues.iter().zip(&expect) {
            worst = worst.max((z - e).norm());
        }
        worst_pt = worst_pt.max(anti_pt_check(&h).residual / h.matrix.norm());
    }
    out.push(check("eigenvalue flow", worst < 1e-12, format!("max |Δz| {worst:.2e}")));

    let params = wg(2, 4.0, 4.0, Site::Infinite);
    let h = waveguide_markovian(&params).unwrap();
    let sys = resonance_decomposition(&h);
    let ep = sys.kind == ResonanceKind::Defective && sys.jordan_blocks.len() == 1;
    let (zd, ratio, self_product) = match sys.jordan_blocks.first() {
        Some(b) => {
            let v = &b.right_chain[0];
            (b.eigenvalue, v[0] / v[1], (v[0] * v[0] + v[1] * v[1]).norm() / v.norm_squared())
        }
        None => (Complex64::new(f64::NAN, f64::NAN), Complex64::new(f64::NAN, 0.0), f64::NAN),
    };
    out.push(check(
        "EP at ξ=4 with z = -iλ",
        ep && (zd - Complex64::new(0.0, -1.0)).norm() < 1e-12,
        format!("kind {:?}, z_d = {zd:.3e}", sys.kind),
    ));
    out.push(check(
        "self-orthogonal state ∝ (-i, 1)",
        (ratio - Complex64::new(0.0, -1.0)).norm() < 1e-8 && self_product < 1e-8,
        format!("ψ1/ψ2 = {ratio:.3e}, |ψᵀψ|/‖ψ‖² = {self_product:.1e}"),
    ));
    let c = default_initial_state(&params).unwrap();
    let times = grid(10.0, 0.05);
    let formula: Vec<f64> = times
        .iter()
        .map(|t| (2.0 * t * t + 2.0 * t + 1.0) * (-2.0 * t).exp())
        .collect();
    let closed = markovian_survival(&sys, &c, &times).unwrap();
    let d = max_abs_diff(&closed.p, &formula);
    out.push(check("EP closed-form decay", d < 1e-10, format!("max |Δp| {d:.2e}")));
    let oracle = lattice::evolve(&params, 2, 10.0, 0.05).unwrap();
    let d = max_abs_diff(&oracle.p, &formula);
    out.push(check("EP decay vs lattice", d < 5e-2, format!("max |Δp| {d:.2e}")));
    out.push(check(
        "anti-PT residual",
        worst_pt < 1e-14,
        format!("max ‖PH*P + H‖/‖H‖ {worst_pt:.1e}"),
    ));
    out.push(runtime(Duration::from_secs(60), start));
    out
}

/// `∫ |ψ(ω)|² dω` by Gauss–Kronrod in `θ`, `ω = mid - half cos θ`.
fn continuum_norm(model: &Model, state: &friedrichs::BoundState) -> f64 {
    let band = model.band();
    let (lo, up) = (band.omega_low, band.omega_up);
    let (mid, half) = ((lo + up) / 2.0, (up - lo) / 2.0);
    let f = |th: f64| {
        let w = mid - half * th.cos();
        state.continuum.amplitude(band, w).norm_sqr() * half * th.sin()
    };
    let mut cuts = vec![0.0, PI];
    if state.kind == BoundStateKind::InContinuum {
        cuts.insert(1, ((mid - state.energy) / half).acos());
    }
    cuts.windows(2)
        .map(|w| adaptive_kronrod(w[0], w[1], 1e-10, 1e-14, 20_000, f).unwrap().value)
        .sum()
}

fn criterion_6() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases: Vec<(Model, InitialState<f64>)> = (0..20)
        .map(|_| {
            let m = random_model(&mut rng);
            let c = random_initial(&mut rng, m.n_levels());
            (m, c)
        })
        .collect();
    for site in [Site::Finite(1), Site::Finite(2), Site::Infinite] {
        let p = wg(3, 0.75, 0.25, site);
        cases.push((build_waveguide_model(&p).unwrap(), default_initial_state(&p).unwrap()));
    }
    let (mut worst_norm, mut worst_p0, mut count) = (0.0f64, 0.0f64, 0);
    for (model, c) in &cases {
        for s in solve_bound_states(model).unwrap() {
            let total = s.discrete_weight() + continuum_norm(model, &s);
            worst_norm = worst_norm.max((total - 1.0).abs());
            count += 1;
        }
        let p0 = survival_probability(model, c, &[0.0]).unwrap().p[0];
        worst_p0 = worst_p0.max((p0 - 1.0).abs());
    }
    vec![
        check(
            "bound-state norms",
            worst_norm < 1e-6,
            format!("{count} states, max |norm - 1| {worst_norm:.2e}"),
        ),
        check(
            "sum rule p(0) = 1",
            worst_p0 < 1e-4,
            format!("{} models, max |p(0) - 1| {worst_p0:.2e}", cases.len()),
        ),
    ]
}

fn criterion_7() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let times = grid(9.8, 0.2);
    let mut worst = 0.0f64;
    let mut defective = 0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let levels = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let h = markovian_from_parts(levels, f, rng.gen_range(0.05..1.0)).unwrap();
        let c = random_initial(&mut rng, n);
        let sys = resonance_decomposition(&h);
        defective += usize::from(sys.kind == ResonanceKind::Defective);
        let a = markovian_survival(&sys, &c, &times).unwrap();
        let b = markovian_survival_expm(&h, &c, &times).unwrap();
        worst = worst.max(max_abs_diff(&a.p, &b.p));
    }
    // H = [[-1 - i, -i], [-i, 1 - i]] has an exact double eigenvalue -i
    let one = Complex64::new(1.0, 0.0);
    let h = markovian_from_parts(vec![-1.0, 1.0], vec![one, one], 1.0).unwrap();
    let sys = resonance_decomposition(&h);
    let c = InitialState::real(vec![0.0, 1.0]).unwrap();
    let a = markovian_survival(&sys, &c, &times).unwrap();
    let b = markovian_survival_expm(&h, &c, &times).unwrap();
    let jordan = max_abs_diff(&a.p, &b.p);
    vec![
        check(
            "closed form vs matrix exponential",
            worst < 1e-9 && defective == 0,
            format!("max |Δp| {worst:.2e} over 20 systems"),
        ),
        check(
            "Jordan-chain propagation",
            sys.kind == ResonanceKind::Defective && jordan < 1e-7,
            format!("kind {:?}, max |Δp| {jordan:.2e}", sys.kind),
        ),
    ]
}

fn criterion_8() -> Vec<Check> {
    let params = wg(3, 0.75, 0.25, Site::Finite(1));
    let t_max = 50.0;
    let run = |dt: Option<f64>, n_trunc: Option<usize>| {
        let defaults = LatticeOptions::default();
        let opts = LatticeOptions {
            dt,
            n_trunc,
            // coarse steps used for the convergence order drift by more
            norm_tol: if dt.is_some_and(|d| d > 0.02) { 1.0 } else { defaults.norm_tol },
            ..defaults
        };
        lattice::evolve_with(&params, 3, t_max, 0.5, &opts).unwrap()
    };
    let base = run(None, None);
    let halved = run(Some(base.dt / 2.0), None);
    let step = max_abs_diff(&base.series.p, &halved.series.p);
    let coarse = [0.2, 0.1, 0.05].map(|dt| run(Some(dt), None).series.p);
    let ratio = max_abs_diff(&coarse[0], &coarse[1]) / max_abs_diff(&coarse[1], &coarse[2]);
    let doubled = run(None, Some(2 * base.n_trunc));
    let trunc = max_abs_diff(&base.series.p, &doubled.series.p);
    vec![
        check(
            "norm drift",
            base.max_norm_drift < 1e-6,
            format!("{:.2e}", base.max_norm_drift),
        ),
        check("step halving", step < 1e-8, format!("max |Δp| {step:.2e}")),
        check(
            "fourth-order error ratio",
            (12.0..=20.0).contains(&ratio),
            format!("{ratio:.2}"),
        ),
        check(
            "truncation doubling",
            trunc < 1e-8,
            format!("{} → {} sites, max |Δp| {trunc:.2e}", base.n_trunc, 2 * base.n_trunc),
        ),
    ]
}

type Criterion = (u32, &'static str, fn() -> Vec<Check>);

// runs without the libtest harness so the report is always printed
fn main() {
    let criteria: [Criterion; 8] = [
        (1, "self-energy closed form vs quadrature", criterion_1),
        (2, "bound-state census vs determinant", criterion_2),
        (3, "specialized waveguide census", criterion_3),
        (4, "waveguide decay dynamics", criterion_4),
        (5, "Markovian two-atom suite", criterion_5),
        (6, "bound-state normalization", criterion_6),
        (7, "Markovian closed forms vs expm", criterion_7),
        (8, "lattice self-consistency", criterion_8),
    ];
    let mut unexpected = Vec::new();
    let mut report = String::new();
    for (id, title, run) in criteria {
        let checks = run();
        let pass = checks.iter().all(|c| c.pass);
        println!("criterion {id}: {} ({title})", if pass { "PASS" } else { "FAIL" });
        for c in &checks {
            let known = KNOWN_FAILURES.contains(&(id, c.name));
            let tag = match (c.pass, known) {
                (true, _) => "ok",
                (false, true) => "FAIL (known)",
                (false, false) => "FAIL",
            };
            println!("    {tag:<12} {}: {}", c.name, c.detail);
            if !c.pass && !known {
                unexpected.push(format!("criterion {id}: {} ({})", c.name, c.detail));
            }
        }
        report.push_str(&format!("{id}:{} ", if pass { "PASS" } else { "FAIL" }));
    }
    println!("summary: {report}");
    if !unexpected.is_empty() {
        eprintln!("unexpected failures:\n{}", unexpected.join("\n"));
        std::process::exit(1);
    }
}
