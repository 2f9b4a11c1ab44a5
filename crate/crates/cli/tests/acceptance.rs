//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line
//! (visible with `--nocapture`) and asserts its pinned tolerance.

use std::time::Instant;

use lattice_trace_core::engine::{
    build_factor_matrix, circulant_trace, group_higher_order, naive_product_rule, trace_chain,
    trace_power, trace_power_insertion, trace_spectral, CouplingProblem, KernelFunction,
};
use lattice_trace_core::models::fourier::FourierTable;
use lattice_trace_core::models::rotor::{
    rotor_central2_partition, rotor_central_difference, rotor_f, rotor_f0, rotor_partition,
    rotor_ratio, rotor_spectra, rotor_susceptibility, rotor_susceptibility_literal,
    topological_q, Discretization, RotorObservable, RotorSpec,
};
use lattice_trace_core::models::u1::{u1_2d, wilson11, U1Spec2D, WilsonSpec};
use lattice_trace_core::models::u1_3d::{u1_3d_fourier_sum, u1_3d_nullspace};
use lattice_trace_core::oracles::{bessel_ratio_oracle, monte_carlo, monte_carlo_ratio};
use lattice_trace_core::rules::rectangle_rule;

fn reduced(beta: f64, l: u64, n: usize) -> f64 {
    u1_2d(&U1Spec2D::reduced(beta, l, n)).unwrap()
}

fn report(criterion: u32, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_reference_values() {
    let expected = [
        (0.1, 0.049937603987938919),
        (1.1, 0.4807027720204957),
        (2.1, 0.71353139292523667),
        (3.1, 0.8171145492914306),
        (4.1, 0.8672601961768063),
        (5.1, 0.89565158799076015),
        (6.1, 0.91388585167256601),
        (7.1, 0.92663266016615516),
        (8.1, 0.9360676059396539968),
        (9.1, 0.9433416321068225957),
    ];
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &(beta, want) in &expected {
        let got = reduced(beta, 200, 1024);
        worst = worst.max((got - want).abs() / want.abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst < 1e-14 && elapsed < 1.0;
    report(
        1,
        ok,
        &format!(
            "10 reference values at L=200, n=1024: worst rel diff {worst:.2e} (need <1e-14), \
             {elapsed:.3}s (need <1s)"
        ),
    );
}

#[test]
fn criterion_2_precision_vs_n() {
    // agreement at the binary64 representation limit (1 ulp of ~0.94)
    let ref8 = reduced(8.0, 200, 1024);
    let d8 = (reduced(8.0, 200, 32) - ref8).abs();
    let ref1 = reduced(1.0, 200, 1024);
    let d1 = (reduced(1.0, 200, 16) - ref1).abs();
    let tol = 2.3e-16;
    let ok = d8 <= tol && d1 <= tol;
    report(
        2,
        ok,
        &format!("beta=8 n=32 vs n=1024 diff {d8:.2e}, beta=1 n=16 diff {d1:.2e} (need <=2.3e-16)"),
    );
}

#[test]
fn criterion_3_exponential_convergence() {
    let floor = 2e-16;
    let mut ok = true;
    let mut detail = String::new();
    for &beta in &[1.0, 4.0, 8.0] {
        for &l in &[2u64, 20, 200] {
            let reference = reduced(beta, l, 1024);
            let errs: Vec<f64> = [8, 16, 32]
                .iter()
                .map(|&n| (reduced(beta, l, n) - reference).abs().max(floor))
                .collect();
            if !(errs[1] <= errs[0] && errs[2] <= errs[1]) {
                ok = false;
                detail = format!("beta={beta} L={l} errors not decreasing: {errs:?}");
            }
            if beta == 1.0 && errs[2] > errs[0] / 1e3 {
                ok = false;
                detail = format!("beta=1 L={l} drop n=8->32 below 3 decades: {errs:?}");
            }
        }
    }
    if ok {
        detail = "errors vs n=1024 decrease monotonically; beta=1 drops >=3 decades n=8->32".into();
    }
    report(3, ok, &detail);
}

#[test]
fn criterion_4_sweep_performance() {
    let bin = env!("CARGO_BIN_EXE_lattice-trace");
    let dir = std::env::temp_dir();
    let out1 = dir.join("lattice_trace_sweep_1.csv");
    let out2 = dir.join("lattice_trace_sweep_2.csv");
    let run = |out: &std::path::Path| {
        let status = std::process::Command::new(bin)
            .args([
                "sweep",
                "--beta",
                "0:0.1:10",
                "--L",
                "2,20,200",
                "--n",
                "32",
                "--method",
                "reduced",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    };
    let start = Instant::now();
    run(&out1);
    let elapsed = start.elapsed().as_secs_f64();
    run(&out2);
    let text1 = std::fs::read_to_string(&out1).unwrap();
    let text2 = std::fs::read_to_string(&out2).unwrap();
    let deterministic = text1 == text2;
    // beta=8.1, L=200 row against the reference value, 15 significant digits
    let want = 0.9360676059396539968;
    let mut found = false;
    let mut row_ok = false;
    for line in text1.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let beta: f64 = cols[0].parse().unwrap();
        let l: u64 = cols[1].parse().unwrap();
        if (beta - 8.1).abs() < 1e-9 && l == 200 {
            found = true;
            let v: f64 = cols[4].parse().unwrap();
            row_ok = (v - want).abs() / want < 1e-14;
        }
    }
    let rows = text1.lines().count();
    let ok = elapsed < 1.0 && deterministic && found && row_ok && rows == 304
        && text1.ends_with('\n');
    report(
        4,
        ok,
        &format!(
            "101x3 grid at n=32 in {elapsed:.3}s (need <1s), {rows} lines, deterministic={deterministic}, \
             beta=8.1 L=200 matches to 15 digits: {row_ok}"
        ),
    );
    let _ = std::fs::remove_file(out1);
    let _ = std::fs::remove_file(out2);
}

struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[(self.next_f64() * xs.len() as f64) as usize % xs.len()]
    }
}

#[test]
fn criterion_5_scenario_equivalence() {
    let mut rng = Lcg(0x5eed);
    let mut cases = 0;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let beta = 0.1 + 3.9 * rng.next_f64();
        let l = rng.pick(&[2u64, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]);
        let n = rng.pick(&[4usize, 8, 16]);
        let kernel = KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
        let kernel0 = KernelFunction::difference_1d(move |x: f64| rotor_f0(beta, x), true);
        let rule = rectangle_rule::<f64>(n).unwrap();
        let m = build_factor_matrix(&kernel, &rule.points);
        let m0 = build_factor_matrix(&kernel0, &rule.points);
        let (sf, sf0) = rotor_spectra(beta, n).unwrap();

        // denominator Z across A1/A2/A3/A5/A6 and the grouped (B) paths
        let chain = vec![m.clone(); l as usize];
        let z_a1 = trace_chain(&chain, &rule.weights).unwrap().value.real();
        let z_a2 = trace_power(&m, &rule.weights, l).unwrap().value.real();
        let z_a3 = trace_spectral(&m, &rule.weights, l).unwrap().value.real();
        let singles: Vec<_> = (0..l).map(|_| (&sf, 1u64)).collect();
        let z_a5 = circulant_trace(&singles).unwrap().value.real();
        let z_a6 = circulant_trace(&[(&sf, l)]).unwrap().value.real();
        let problem = CouplingProblem::first_order(l as usize, &kernel, None).unwrap();
        let aux = rectangle_rule::<f64>(8).unwrap();
        let grouped = group_higher_order(&problem, &rule, &aux).unwrap();
        let z_b = grouped.evaluate().unwrap().value.real();
        let z_b6 = grouped.evaluate_circulant(true).unwrap().value.real();

        // insertion ratio across A1/A4/A7 and the grouped circulant path
        let mut ins_chain = chain.clone();
        ins_chain[0] = m0.clone();
        let r_a1 = trace_chain(&ins_chain, &rule.weights).unwrap().value.real() / z_a1;
        let r_a4 = trace_power_insertion(&m0, &m, &rule.weights, l)
            .unwrap()
            .value
            .real()
            / z_a2;
        let r_a7 = circulant_trace(&[(&sf0, 1), (&sf, l - 1)])
            .unwrap()
            .value
            .real()
            / z_a6;
        let ins_problem =
            CouplingProblem::first_order(l as usize, &kernel, Some(&kernel0)).unwrap();
        let ins_grouped = group_higher_order(&ins_problem, &rule, &aux).unwrap();
        let r_b7 = ins_grouped.evaluate_circulant(true).unwrap().value.real() / z_b6;

        for z in [z_a2, z_a3, z_a5, z_a6, z_b, z_b6] {
            worst = worst.max((z - z_a1).abs() / z_a1.abs());
        }
        for r in [r_a4, r_a7, r_b7] {
            worst = worst.max((r - r_a1).abs() / r_a1.abs().max(1e-3));
        }
        cases += 1;
    }
    let ok = cases >= 200 && worst < 1e-10;
    report(
        5,
        ok,
        &format!("{cases} randomized cases, worst pairwise rel diff {worst:.2e} (need <1e-10)"),
    );
}

#[test]
fn criterion_6a_naive_vs_engine() {
    let mut worst = 0.0f64;
    for &(beta, l, n) in &[(0.7, 3u64, 6usize), (1.3, 3, 8), (0.9, 4, 6), (2.0, 4, 8)] {
        let kernel = KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
        let kernel0 = KernelFunction::difference_1d(move |x: f64| rotor_f0(beta, x), true);
        let rule = rectangle_rule::<f64>(n).unwrap();
        let num = naive_product_rule(
            &CouplingProblem::first_order(l as usize, &kernel, Some(&kernel0)).unwrap(),
            &rule,
        )
        .unwrap()
        .value;
        let den = naive_product_rule(
            &CouplingProblem::first_order(l as usize, &kernel, None).unwrap(),
            &rule,
        )
        .unwrap()
        .value;
        let naive = num.div(&den).real();
        let engine = rotor_ratio(&RotorSpec::plaquette(beta, l, n)).unwrap();
        worst = worst.max((naive - engine).abs() / engine.abs());
    }
    report(
        6,
        worst < 1e-12,
        &format!("(a) naive A0 vs engine, worst rel diff {worst:.2e} (need <1e-12)"),
    );
}

#[test]
fn criterion_6b_bessel_oracle() {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for &beta in &[0.25, 0.5, 1.0, 2.0] {
        for &l in &[2u64, 3, 10, 100, 1000] {
            let engine = rotor_ratio(&RotorSpec::plaquette(beta, l, 64)).unwrap();
            let oracle = bessel_ratio_oracle(beta, l, 60).unwrap();
            worst = worst.max((engine - oracle).abs() / oracle.abs());
            pairs += 1;
        }
    }
    report(
        6,
        pairs == 20 && worst < 1e-12,
        &format!("(b) Bessel oracle at {pairs} (beta, L) pairs, worst rel diff {worst:.2e} (need <1e-12)"),
    );
}

#[test]
fn criterion_6c_wilson_brute_force() {
    // full 8-dimensional enumeration of the 2x2 periodic gauge lattice on a
    // 12-point grid per link (12^8 ~ 4.3e8 configurations); the 8-point grid
    // of the nominal example is not converged to 1e-6 (error 1.9e-5)
    let beta = 0.5f64;
    let n = 12usize;
    let closed = wilson11(&WilsonSpec {
        beta,
        l: 2,
        r_a: 1,
        r_b: 1,
        l_max: 40,
    })
    .unwrap();
    let f: Vec<f64> = (0..n)
        .map(|k| (beta * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos()).exp())
        .collect();
    let idx = |x: i64| f[x.rem_euclid(n as i64) as usize];
    // loop factor xi_{i,j} = a_{i,j} + a_{i+1,j} + b_{i+1,j} + b_{i+1,j+1}
    //                      - a_{i+1,j+1} - a_{i,j+1} - b_{i,j+1} - b_{i,j},
    // indices mod 2
    let xi = |a: &[i64; 4], b: &[i64; 4], i: usize, j: usize| {
        let at = |i: usize, j: usize| a[(i % 2) + 2 * (j % 2)];
        let bt = |i: usize, j: usize| b[(i % 2) + 2 * (j % 2)];
        at(i, j) + at(i + 1, j) + bt(i + 1, j) + bt(i + 1, j + 1)
            - at(i + 1, j + 1)
            - at(i, j + 1)
            - bt(i, j + 1)
            - bt(i, j)
    };
    let mut total = 0.0f64;
    let rn = n as i64;
    let mut a = [0i64; 4];
    let mut b = [0i64; 4];
    for a0 in 0..rn {
        a[0] = a0;
        for a1 in 0..rn {
            a[1] = a1;
            for a2 in 0..rn {
                a[2] = a2;
                for a3 in 0..rn {
                    a[3] = a3;
                    for b0 in 0..rn {
                        b[0] = b0;
                        for b1 in 0..rn {
                            b[1] = b1;
                            for b2 in 0..rn {
                                b[2] = b2;
                                for b3 in 0..rn {
                                    b[3] = b3;
                                    let p = idx(xi(&a, &b, 0, 0))
                                        * idx(xi(&a, &b, 1, 0))
                                        * idx(xi(&a, &b, 0, 1))
                                        * idx(xi(&a, &b, 1, 1));
                                    total += p;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let brute = total / (n as f64).powi(8);
    let diff = (closed - brute).abs() / brute;
    report(
        6,
        diff < 1e-6,
        &format!("(c) wilson11 closed form {closed:.12} vs 8D brute force {brute:.12}, rel diff {diff:.2e} (need <1e-6)"),
    );
}

#[test]
fn criterion_6d_u1_3d_vs_mc() {
    let beta = 0.5f64;
    let l = 2usize;
    let cs = u1_3d_nullspace(l).unwrap();
    let table = FourierTable::from_bessel(beta, 24).unwrap();
    let fourier = u1_3d_fourier_sum(&cs, &table, 2).unwrap();

    // 24 link angles on the 2^3 periodic lattice, 24 plaquettes
    let site = |i: usize, j: usize, k: usize| (i % l) + l * ((j % l) + l * (k % l));
    let link = |d: usize, i: usize, j: usize, k: usize| d * l * l * l + site(i, j, k);
    let mut plaquettes: Vec<[usize; 4]> = Vec::new();
    for i in 0..l {
        for j in 0..l {
            for k in 0..l {
                // (x,y), (y,z), (z,x) oriented faces at each site
                plaquettes.push([
                    link(0, i, j, k),
                    link(1, i + 1, j, k),
                    link(0, i, j + 1, k),
                    link(1, i, j, k),
                ]);
                plaquettes.push([
                    link(1, i, j, k),
                    link(2, i, j + 1, k),
                    link(1, i, j, k + 1),
                    link(2, i, j, k),
                ]);
                plaquettes.push([
                    link(2, i, j, k),
                    link(0, i, j, k + 1),
                    link(2, i + 1, j, k),
                    link(0, i, j, k),
                ]);
            }
        }
    }
    let integrand = move |x: &[f64]| {
        let mut p = 1.0;
        for q in &plaquettes {
            p *= rotor_f(beta, x[q[0]] + x[q[1]] - x[q[2]] - x[q[3]]);
        }
        p
    };
    let est = monte_carlo(integrand, 24, 1_000_000, 0x3d).unwrap();
    let sigma = (fourier - est.mean).abs() / est.stderr;
    report(
        6,
        sigma < 3.0,
        &format!(
            "(d) 3D Fourier sum {fourier:.6} vs 24D MC {:.6}±{:.1e}: {sigma:.2} sigma (need <3)",
            est.mean, est.stderr
        ),
    );
}

#[test]
fn criterion_7_structural_identities() {
    // central2 even L: denominator equals the squared half-size value
    let z = rotor_central2_partition(1.3f64, 12, 32).unwrap();
    let half = rotor_partition(1.3f64, 6, 32).unwrap();
    let sq = half.mul(&half);
    let d_even = (z.div(&sq).real() - 1.0).abs();

    // central2 odd L: identical to the relabeled first-order problem
    let spec = RotorSpec {
        beta: 1.0,
        l: 7,
        n: 16,
        observable: RotorObservable::Plaquette,
        discretization: Discretization::Central2,
    };
    let odd_exact = rotor_central_difference(&spec, None).unwrap()
        == rotor_ratio(&RotorSpec::plaquette(1.0, 7, 16)).unwrap();

    // nested vs reduced 2D U(1)
    let mut worst = 0.0f64;
    for &l in &[2u64, 3] {
        let nested = u1_2d(&U1Spec2D::nested(1.0, l, 64, 64)).unwrap();
        let red = reduced(1.0, l, 64);
        worst = worst.max((nested - red).abs() / red.abs());
    }
    let ok = d_even < 1e-14 && odd_exact && worst < 1e-12;
    report(
        7,
        ok,
        &format!(
            "central2 even rel diff {d_even:.2e} (<1e-14), odd exact: {odd_exact}, \
             nested vs reduced worst {worst:.2e} (<1e-12)"
        ),
    );
}

/// Interleaved min-of-reps timing of two closures; alternating the
/// measurements makes the ratio robust against load from concurrently
/// running tests.
fn min_time_pair(mut a: impl FnMut(), mut b: impl FnMut(), reps: usize) -> (f64, f64) {
    let mut best_a = f64::INFINITY;
    let mut best_b = f64::INFINITY;
    for _ in 0..reps {
        let start = Instant::now();
        a();
        best_a = best_a.min(start.elapsed().as_secs_f64());
        let start = Instant::now();
        b();
        best_b = best_b.min(start.elapsed().as_secs_f64());
    }
    (best_a, best_b)
}

#[test]
fn criterion_8_cost_scaling() {
    let beta = 1.0f64;
    // A6/A7 at n=1024: near L-independence (only the power ladder grows)
    let (sf, sf0) = rotor_spectra(beta, 1024).unwrap();
    let (t6_small, t6_large) = min_time_pair(
        || drop(circulant_trace(&[(&sf, 1_000)]).unwrap()),
        || drop(circulant_trace(&[(&sf, 1_000_000)]).unwrap()),
        9,
    );
    let (t7_small, t7_large) = min_time_pair(
        || drop(circulant_trace(&[(&sf0, 1), (&sf, 999)]).unwrap()),
        || drop(circulant_trace(&[(&sf0, 1), (&sf, 999_999)]).unwrap()),
        9,
    );
    let r6 = t6_large / t6_small;
    let r7 = t7_large / t7_small;

    // A1 at n=128: linear in L within +-50%; n is chosen large enough that
    // the measured intervals dwarf scheduler noise from parallel tests
    let kernel = KernelFunction::difference_1d(move |x: f64| rotor_f(beta, x), true);
    let rule = rectangle_rule::<f64>(128).unwrap();
    let m = build_factor_matrix(&kernel, &rule.points);
    let chain16 = vec![m.clone(); 16];
    let chain128 = vec![m.clone(); 128];
    let (t1_16, t1_128) = min_time_pair(
        || drop(trace_chain(&chain16, &rule.weights).unwrap()),
        || drop(trace_chain(&chain128, &rule.weights).unwrap()),
        9,
    );
    let r1 = t1_128 / t1_16;

    let ok = r6 < 10.0 && r7 < 10.0 && (4.0..=12.0).contains(&r1);
    report(
        8,
        ok,
        &format!(
            "A6 ratio L=1e3->1e6: {r6:.2} (<10), A7: {r7:.2} (<10), \
             A1 ratio L=16->128: {r1:.2} (expect 8 within +-50%)"
        ),
    );
}

#[test]
fn criterion_9_susceptibility() {
    // beta = 0 limit
    let mut worst0 = 0.0f64;
    for &l in &[3u64, 10, 25] {
        let chi = rotor_susceptibility(&RotorSpec {
            beta: 0.0,
            l,
            n: 64,
            observable: RotorObservable::TopologicalSusceptibility,
            discretization: Discretization::Forward,
        })
        .unwrap();
        worst0 = worst0.max((chi - 1.0 / 12.0).abs());
    }

    // fast vs literal paths
    let mut worst_fl = 0.0f64;
    for &(beta, l) in &[(1.0f64, 10u64), (2.0, 10)] {
        let spec = RotorSpec {
            beta,
            l,
            n: 32,
            observable: RotorObservable::TopologicalSusceptibility,
            discretization: Discretization::Forward,
        };
        let fast = rotor_susceptibility(&spec).unwrap();
        let literal = rotor_susceptibility_literal(&spec).unwrap();
        worst_fl = worst_fl.max((fast - literal).abs() / literal.abs());
    }

    // MC agreement at beta in {1, 2}, L = 10
    let mut worst_sigma = 0.0f64;
    for &beta in &[1.0f64, 2.0] {
        let l = 10usize;
        let spec = RotorSpec {
            beta,
            l: l as u64,
            n: 256,
            observable: RotorObservable::TopologicalSusceptibility,
            discretization: Discretization::Forward,
        };
        let chi = rotor_susceptibility(&spec).unwrap();
        let num = move |x: &[f64]| {
            let mut q = 0.0;
            let mut p = 1.0;
            for i in 0..l {
                let d = x[(i + 1) % l] - x[i];
                q += topological_q(d - d.floor());
                p *= rotor_f(beta, d);
            }
            q * q * p
        };
        let den = move |x: &[f64]| {
            let mut p = 1.0;
            for i in 0..l {
                p *= rotor_f(beta, x[(i + 1) % l] - x[i]);
            }
            p
        };
        let est = monte_carlo_ratio(num, den, l, 1_000_000, 0x9b).unwrap();
        let mc_chi = est.mean / l as f64;
        let sigma = (chi - mc_chi).abs() / (est.stderr / l as f64);
        worst_sigma = worst_sigma.max(sigma);
    }

    let ok = worst0 < 1e-3 && worst_fl < 1e-10 && worst_sigma < 3.0;
    report(
        9,
        ok,
        &format!(
            "beta=0 worst |chi - 1/12| {worst0:.2e} (<1e-3), fast vs literal {worst_fl:.2e} \
             (<1e-10), MC worst {worst_sigma:.2} sigma (<3)"
        ),
    );
}
