//! Acceptance criteria, one line each. Runs without the test harness so the
//! lines always show up in `cargo test` output.

use std::time::{Duration, Instant};

use conslaw::adjoint::{formal_adjoint, semi_conjugacy_solve, SolverConfig};
use conslaw::current::concomitant_flux;
use conslaw::dirac::algebra::check_discrete_algebra;
use conslaw::dirac::fock::{fock_report, FockSystem};
use conslaw::dirac::spinor::spinor_identities;
use conslaw::dirac::suite::random_momenta;
use conslaw::dirac::GammaRep;
use conslaw::linalg::{c, dagger, inverse, max_abs, r, Mat, C64, ZERO};
use conslaw::opcore::{parse_operator, MultiIndex, Operator};
use conslaw::operators;
use conslaw::reproduce::{bundled_scenario, reproduce, Overrides, HEAT_BUMP};
use conslaw::scenario::{run, RunReport};
use conslaw::spectral::heat_oracle::{heat_es_oracle, CompactProfile};
use conslaw::spectral::state::bump;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Small Gaussian-integer entries, so sums and products stay exact.
fn random_entry(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-3..=3) as f64, rng.gen_range(-3..=3) as f64)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| random_entry(rng))
}

/// 1+1 variables, order ≤ 3, up to five terms.
fn random_operator(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Operator {
    let count = rng.gen_range(1..=5);
    let terms: Vec<(MultiIndex, Mat)> = (0..count)
        .map(|_| {
            let t = rng.gen_range(0..=3u32);
            let x = rng.gen_range(0..=3 - t);
            (MultiIndex::new(vec![t, x]), random_matrix(rng, rows, cols))
        })
        .collect();
    Operator::from_terms(2, rows, cols, terms).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..200 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let l1 = random_operator(&mut rng, m, n);
        let l2 = random_operator(&mut rng, n, k);
        if formal_adjoint(&formal_adjoint(&l1)) != l1 {
            bad += 1;
        }
        let lhs = formal_adjoint(&l1.compose(&l2).unwrap());
        let rhs = formal_adjoint(&l2).compose(&formal_adjoint(&l1)).unwrap();
        if lhs != rhs {
            bad += 1;
        }
    }
    let took = start.elapsed();
    outcome(
        bad == 0 && took < Duration::from_secs(1),
        format!("200 random operators and pairs, {bad} mismatches, {took:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let expected = parse_operator("[[-1,0],[0,-1]] * Dt + [[-1,0],[0,-1]] * Dx^3 + [[0,0],[1,0]] * Dt*Dx").unwrap();
    let got = formal_adjoint(&operators::jordan_2x2());
    let entries_ok = got.entry(0, 1).is_zero()
        && got.entry(1, 0) == Operator::scalar(2, r(1.0), &[1, 1])
        && got.entry(0, 0) == got.entry(1, 1);
    outcome(got == expected && entries_ok, "L* = [[−D_t − D_x³, 0], [D_t D_x, −D_t − D_x³]]")
}

/// `Q = a e^{q·x}`, `P = b e^{p·x}` at `x = 0`: jets are `q^β a`, and `D_k`
/// of a bilinear term multiplies it by `conj(q_k) + p_k`.
fn spot_check(l: &Operator, rng: &mut ChaCha8Rng) -> f64 {
    let flux = concomitant_flux(l).unwrap();
    let m = l.shape().0;
    let rand_c = |rng: &mut ChaCha8Rng| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let q: Vec<C64> = (0..2).map(|_| rand_c(rng)).collect();
    let p: Vec<C64> = (0..2).map(|_| rand_c(rng)).collect();
    let a: Vec<C64> = (0..m).map(|_| rand_c(rng)).collect();
    let b: Vec<C64> = (0..m).map(|_| rand_c(rng)).collect();
    let pow = |k: &[C64], alpha: &MultiIndex| -> C64 {
        alpha.as_slice().iter().zip(k).map(|(&e, z)| z.powu(e)).product()
    };
    let qj = |i: usize, al: &MultiIndex| pow(&q, al) * a[i];
    let pj = |j: usize, al: &MultiIndex| pow(&p, al) * b[j];
    let div: C64 = flux
        .components
        .iter()
        .enumerate()
        .map(|(k, x)| (q[k].conj() + p[k]) * x.eval(&qj, &pj))
        .sum();
    // Q†L[P] − (L*Q)†P with L* = Σ(−1)^{|α|}(M^α)†D_α written out here
    let mut pi = ZERO;
    for (alpha, mat) in l.terms() {
        let sign = if alpha.order() % 2 == 0 { 1.0 } else { -1.0 };
        let lp = mat * Mat::from_column_slice(m, 1, &b) * pow(&p, alpha);
        let lq = dagger(mat) * Mat::from_column_slice(m, 1, &a) * pow(&q, alpha) * r(sign);
        for i in 0..m {
            pi += a[i].conj() * lp[(i, 0)] - lq[(i, 0)].conj() * b[i];
        }
    }
    (div - pi).norm() / pi.norm().max(div.norm()).max(1.0)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut symbolic_bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = rng.gen_range(1..=3);
        let l = random_operator(&mut rng, m, m);
        if !concomitant_flux(&l).unwrap().defect(&l).is_zero() {
            symbolic_bad += 1;
        }
        for _ in 0..4 {
            worst = worst.max(spot_check(&l, &mut rng));
        }
    }
    let took = start.elapsed();
    outcome(
        symbolic_bad == 0 && worst <= 1e-10 && took < Duration::from_secs(10),
        format!("50 operators: {symbolic_bad} nonzero defects, spot-check residual {worst:.1e}, {took:.2?}"),
    )
}

/// `S p_α(J) S⁻¹` for a real Jordan matrix `J` and real polynomials `p_α`.
fn commuting_family(seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=4);
    let mut j = Mat::zeros(m, m);
    let mut start = 0;
    while start < m {
        let size = rng.gen_range(1..=m - start);
        let lambda = r(rng.gen_range(-2..=2) as f64);
        for i in start..start + size {
            j[(i, i)] = lambda;
            if i + 1 < start + size {
                j[(i, i + 1)] = r(1.0);
            }
        }
        start += size;
    }
    let s = Mat::identity(m, m) + Mat::from_fn(m, m, |_, _| r(rng.gen_range(-0.4..0.4)));
    let s_inv = inverse(&s).unwrap();
    let alphas = [[1, 0], [0, 1], [0, 2], [1, 1], [0, 3]];
    let terms: Vec<(MultiIndex, Mat)> = alphas
        .iter()
        .map(|al| {
            let mut poly = Mat::zeros(m, m);
            let mut power = Mat::identity(m, m);
            for _ in 0..m {
                poly += &power * r(rng.gen_range(-1.0..1.0));
                power = &power * &j;
            }
            (MultiIndex::new(al.to_vec()), &s * poly * &s_inv)
        })
        .collect();
    Operator::from_terms(2, m, m, terms).unwrap()
}

fn criterion_4() -> Outcome {
    let rep = GammaRep::dirac();
    let cfg = SolverConfig::default();
    let dirac = semi_conjugacy_solve(&operators::dirac(1.0), &cfg).unwrap();
    let g0 = &rep.gamma[0];
    let prop = |a: &Mat| {
        let k = (g0 * a).trace() / r(4.0);
        max_abs(&(a - g0 * k)) / k.norm()
    };
    let dirac_res = prop(&dirac.a1).max(prop(&dirac.a2)).max(dirac.residual(&operators::dirac(1.0)));

    let ns = operators::navier_stokes(1.0);
    let id = Mat::identity(4, 4);
    let ns_pair = conslaw::adjoint::ConjugacyPair::new(id.clone(), id, vec![true; 4]);
    let ns_ok = ns_pair.verify(&ns, 1e-10, 1e8).is_ok();

    let mut found = 0;
    for seed in 0..100 {
        let l = commuting_family(seed);
        let cfg = SolverConfig {
            seed,
            ..Default::default()
        };
        if let Ok(p) = semi_conjugacy_solve(&l, &cfg) {
            if p.residual(&l) <= 1e-10 {
                found += 1;
            }
        }
    }
    outcome(
        dirac_res <= 1e-12 && ns_ok && found >= 99,
        format!("Dirac pair ∝ γ⁰ to {dirac_res:.1e}; NS identity pair accepted: {ns_ok}; commuting families {found}/100"),
    )
}

/// Spec tolerance for a conserved check in the bundled scenarios.
fn pinned_tolerance(scenario: &str, check: &str) -> f64 {
    match (scenario, check) {
        ("wave_energy", _) => 1e-10,
        ("kdvkdv_all", c) if c.starts_with("kdvkdv.V7") || c.starts_with("kdvkdv.V8") => 1e-8,
        ("kdvkdv_all", _) => 1e-10,
        ("heat_es", _) => 1e-8,
        ("dirac_charge", _) => 1e-10,
        ("dirac_kappa0", _) | ("dirac_cpt", _) => 1e-8,
        ("dirac_angular", _) => 1e-6,
        _ => panic!("no pinned tolerance for {scenario}"),
    }
}

fn timed_run(name: &str) -> (RunReport, Duration) {
    let start = Instant::now();
    let report = run(&bundled_scenario(name).unwrap()).unwrap();
    (report, start.elapsed())
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut count = 0;
    for name in [
        "wave_energy",
        "kdvkdv_all",
        "heat_es",
        "dirac_charge",
        "dirac_kappa0",
        "dirac_cpt",
        "dirac_angular",
    ] {
        let (report, took) = timed_run(name);
        slowest = slowest.max(took);
        if took > Duration::from_secs(60) {
            failures.push(format!("{name} took {took:.1?}"));
        }
        for c in report.checks.iter().filter(|c| !c.control) {
            count += 1;
            let tol = pinned_tolerance(name, &c.symmetry);
            if !(c.drift <= tol) {
                failures.push(format!("{name} {} drift {:.1e}", c.symmetry, c.drift));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} conserved quantities within their limits, slowest scenario {slowest:.1?}")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let (center, radius, s) = HEAT_BUMP;
    let f = move |x: f64| bump(&[x], &[center], radius);
    let profile = CompactProfile {
        f: &f,
        center,
        radius,
    };
    let oracle = heat_es_oracle(&profile, s, &[s / 4.0, s / 2.0]).unwrap();
    let agree = (oracle[0] - oracle[1]).abs() / oracle[1].abs();
    let (report, _) = timed_run("heat_es");
    let kappa = report
        .checks
        .iter()
        .find(|c| c.symmetry == "any.identity")
        .unwrap()
        .series
        .value(0);
    let torus = (kappa - r(oracle[1])).norm() / oracle[1].abs();
    outcome(
        agree <= 1e-6 && torus <= 1e-4,
        format!("E_s(s/4) vs E_s(s/2) {agree:.1e}; torus vs quadrature {torus:.1e} (E_s = {:.9})", oracle[1]),
    )
}

fn criterion_7() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["heat_es", "dirac_kappa0"] {
        let (report, _) = timed_run(name);
        for c in report.checks.iter().filter(|c| c.control) {
            ok &= c.drift >= 1e-2;
            lines.push(format!("{} drift {:.2e}", c.symmetry, c.drift));
        }
    }
    outcome(ok && lines.len() == 2, lines.join("; "))
}

fn criterion_8() -> Outcome {
    let rep = GammaRep::dirac();
    let mut cliff = 0.0f64;
    let mut conj = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            let ac = &rep.gamma[mu] * &rep.gamma[nu] + &rep.gamma[nu] * &rep.gamma[mu];
            let eta = if mu != nu { 0.0 } else if mu == 0 { 2.0 } else { -2.0 };
            cliff = cliff.max(max_abs(&(ac - Mat::identity(4, 4) * r(eta))));
        }
        let g0 = &rep.gamma[0];
        conj = conj.max(max_abs(&(dagger(&rep.gamma[mu]) - g0 * &rep.gamma[mu] * g0)));
    }
    let mut worst = 0.0f64;
    for (p, m) in random_momenta(100, 8) {
        let sp = spinor_identities(p, m);
        worst = sp.checks.iter().map(|c| c.residual).fold(worst, f64::max);
    }
    let alg = check_discrete_algebra(&rep).unwrap();
    let listed = alg.pairs.len() == 28 && alg.diagonal_constants.len() == 7 && alg.fitted_constant.is_finite();
    outcome(
        cliff == 0.0 && conj == 0.0 && worst <= 1e-12 && listed,
        format!(
            "Clifford {cliff}, conjugation {conj}, spinor identities over 100 (p, m) {worst:.1e}, \
             28 anticommutators listed, fitted c = {}",
            alg.fitted_constant
        ),
    )
}

fn criterion_9() -> Outcome {
    let sys = FockSystem::default_lattice();
    let f = fock_report(&sys).unwrap();
    let red = f.rederivation.as_ref().map_or(f64::INFINITY, |d| d.residual);
    let ok = f.modes == 8
        && f.dim == 256
        && f.anticommutation == 0.0
        && f.h_kappa0 < 1e-12
        && f.h_kappa45 < 1e-12
        && f.kappa0_ladder == 0.0
        && red < 1e-12;
    outcome(
        ok,
        format!(
            "{} modes / dim {}: anticommutators {}, [H,κ0] {:.1e}, [H,κ45] {:.1e}, ladder {}, re-derivation {:.1e}",
            f.modes, f.dim, f.anticommutation, f.h_kappa0, f.h_kappa45, f.kappa0_ladder, red
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut same = true;
    for name in ["dirac_cpt", "kdvkdv_all"] {
        let mut sc = bundled_scenario(name).unwrap();
        sc.seed = 42;
        let a = run(&sc).unwrap().summary_json();
        let b = run(&sc).unwrap().summary_json();
        same &= a == b;
    }
    let ov = Overrides {
        seed: Some(7),
        tolerance: None,
    };
    for name in ["jordan-2x2", "appendix"] {
        same &= reproduce(name, &ov).unwrap().summary_json() == reproduce(name, &ov).unwrap().summary_json();
    }
    outcome(same, "two scenarios and two reproductions, run twice with fixed seeds")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("adjoint algebra", criterion_1),
        ("worked 2×2 example", criterion_2),
        ("divergence identity", criterion_3),
        ("semi-conjugacy", criterion_4),
        ("conservation drift", criterion_5),
        ("heat E_s oracle", criterion_6),
        ("negative controls", criterion_7),
        ("Clifford / spinor suite", criterion_8),
        ("Fock suite", criterion_9),
        ("determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|a| a == &n.to_string()) {
            continue;
        }
        let o = f();
        println!("criterion {n:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
