//! Acceptance suite. Each test covers one numbered criterion, pins its
//! tolerance in code and prints a single PASS/FAIL line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pdisc::bounds::{
    average_l2_sq, check_pset_bound, initial_periodic_l2, inverse_table, pset_l2_bound,
};
use pdisc::discrepancy::{
    bernoulli_b2, periodic_l2, periodic_l2_fourier, periodic_l2_mc, periodic_l2_weighted,
    rms_shifted_l2_mc,
};
use pdisc::expsums::{exp_sum_p, verify_weil_exhaustive, weil_bound};
use pdisc::korobov::{gen_korobov_p, generate, primes_up_to, PSetFamily};
use pdisc::pointset::{shift_point_set, FreePointSet, PointSet, Points, WeightVector};

const SWEEP_PRIMES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];
const SWEEP_DIMS: [u32; 5] = [1, 2, 3, 4, 5];

/// The shared instance list for the shift-based criteria: p-sets with
/// p <= 7 and d <= 3, plus seeded random sets.
fn shift_check_instances() -> Vec<(String, Box<dyn Points>)> {
    let mut out: Vec<(String, Box<dyn Points>)> = Vec::new();
    for (family, p, d) in [
        (PSetFamily::P, 5, 2),
        (PSetFamily::P, 7, 3),
        (PSetFamily::Q, 3, 2),
        (PSetFamily::Q, 5, 3),
        (PSetFamily::Q, 7, 1),
        (PSetFamily::R, 3, 3),
        (PSetFamily::R, 5, 2),
        (PSetFamily::R, 7, 1),
    ] {
        out.push((
            format!("{family}(p={p},d={d})"),
            Box::new(generate(family, p, d).unwrap()),
        ));
    }
    out.push(("random(N=12,d=2)".into(), Box::new(random_set(12, 2, 4242))));
    out.push(("random(N=20,d=3)".into(), Box::new(random_set(20, 3, 4243))));
    out
}

fn random_set(n: usize, d: usize, seed: u64) -> FreePointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<f64> = (0..n * d).map(|_| rng.random()).collect();
    FreePointSet::new(d, coords).unwrap()
}

fn equally_spaced(n: usize) -> PointSet {
    let nums: Vec<i64> = (0..n as i64).collect();
    PointSet::from_numerators(1, n as u64, &nums).unwrap()
}

fn report(number: u32, name: &str, failures: &[String]) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {number} ({name}): {verdict}");
    assert!(
        failures.is_empty(),
        "criterion {number} failed on {} instances:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

/// Criterion 1: every p-set over p in {2..23}, d in {1..5} and all three
/// families stays under d·2^{-d/2}/√N, with 1e-12 slack.
#[test]
fn criterion_1_pset_bound_sweep() {
    let mut failures = Vec::new();
    for family in PSetFamily::ALL {
        for &p in &SWEEP_PRIMES {
            for &d in &SWEEP_DIMS {
                let r = check_pset_bound(family, p, d).unwrap();
                if !(r.pass && r.value <= r.bound + 1e-12) {
                    failures.push(format!(
                        "{family} p={p} d={d}: value {} > bound {}",
                        r.value, r.bound
                    ));
                }
            }
        }
    }
    report(1, "p-set bound sweep, 135 cells", &failures);
}

/// Criterion 2: golden closed forms. Equally spaced d=1 sets give
/// 1/(√6 N) within 1e-12 (checked against the Bernoulli-sum oracle and
/// the Fourier route); the empty set gives exactly 3^{-d/2}; single
/// points give 1/√6 within 1e-12.
#[test]
fn criterion_2_closed_form_golden_values() {
    let mut failures = Vec::new();

    for n in 1..=64usize {
        // independent oracle: the Bernoulli sum Σ_{j<N} B₂(j/N) collapses
        // to 1/(6N), so value² = (Σ_j B₂(j/N))/N
        let bern_sum: f64 = (0..n)
            .map(|j| bernoulli_b2(j as f64 / n as f64).unwrap())
            .sum();
        if (bern_sum - 1.0 / (6.0 * n as f64)).abs() > 1e-14 {
            failures.push(format!("Bernoulli-sum oracle broken at N={n}"));
        }
        let set = equally_spaced(n);
        let r = periodic_l2(&set).unwrap();
        let expect = 1.0 / (6.0f64.sqrt() * n as f64);
        if (r.value - expect).abs() > 1e-12 {
            failures.push(format!("N={n}: value {} vs {expect}", r.value));
        }
        // second oracle: truncated Fourier route brackets the value
        let f = periodic_l2_fourier(&set, &WeightVector::equal(n), 64).unwrap();
        let diff = r.value_squared - f.value_squared;
        if !(diff >= -1e-15 && diff <= f.tail_bound.unwrap()) {
            failures.push(format!("N={n}: Fourier bracket broken, diff={diff}"));
        }
    }

    for d in 1..=10usize {
        let set = PointSet::from_numerators(d, 1, &[]).unwrap();
        let r = periodic_l2_weighted(&set, &WeightVector::equal(0)).unwrap();
        if r.value.to_bits() != initial_periodic_l2(d as u32).to_bits() {
            failures.push(format!("empty set d={d}: {} not exact", r.value));
        }
    }

    for i in 0..=10 {
        let t = (i as f64 / 11.0).min(0.999);
        let set = FreePointSet::new(1, vec![t]).unwrap();
        let r = periodic_l2(&set).unwrap();
        if (r.value - 1.0 / 6.0f64.sqrt()).abs() > 1e-12 {
            failures.push(format!("single point at {t}: {}", r.value));
        }
    }

    report(2, "closed-form golden values", &failures);
}

/// Criterion 3: pair-sum, Fourier (K=64) and Monte Carlo (1e5 samples)
/// routes agree on 50 seeded random sets (N <= 30, d <= 3) and all three
/// p-set families with p <= 7, d <= 3.
#[test]
fn criterion_3_cross_route_agreement() {
    let mut failures = Vec::new();
    let mut instances: Vec<(String, Box<dyn Points>)> = Vec::new();
    for i in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let n = 1 + (rng.random::<u64>() % 30) as usize;
        let d = 1 + (rng.random::<u64>() % 3) as usize;
        let coords: Vec<f64> = (0..n * d).map(|_| rng.random()).collect();
        instances.push((
            format!("random#{i}(N={n},d={d})"),
            Box::new(FreePointSet::new(d, coords).unwrap()),
        ));
    }
    for family in PSetFamily::ALL {
        for p in [2u64, 3, 5, 7] {
            for d in 1..=3usize {
                instances.push((
                    format!("{family}(p={p},d={d})"),
                    Box::new(generate(family, p, d).unwrap()),
                ));
            }
        }
    }

    for (idx, (name, set)) in instances.iter().enumerate() {
        let w = WeightVector::equal(set.n_points());
        let b2 = periodic_l2_weighted(set.as_ref(), &w).unwrap().value_squared;
        let f = periodic_l2_fourier(set.as_ref(), &w, 64).unwrap();
        if (b2 - f.value_squared).abs() > f.tail_bound.unwrap() {
            failures.push(format!(
                "{name}: |b2² - fourier²| = {} > tail {}",
                (b2 - f.value_squared).abs(),
                f.tail_bound.unwrap()
            ));
        }
        let mc = periodic_l2_mc(set.as_ref(), &w, 100_000, 5000 + idx as u64).unwrap();
        let se = mc.std_error.unwrap();
        if (b2 - mc.value_squared).abs() > 4.0 * se {
            failures.push(format!(
                "{name}: |b2² - mc²| = {} > 4·se = {}",
                (b2 - mc.value_squared).abs(),
                4.0 * se
            ));
        }
    }
    report(3, "cross-route agreement, 86 instances", &failures);
}

/// Criterion 4: the mean over 1e4 uniform shifts of the exact plain L2²
/// matches the pair-sum periodic value² within 4 standard errors, on 10
/// instances.
#[test]
fn criterion_4_shift_identity_statistics() {
    let mut failures = Vec::new();
    for (idx, (name, set)) in shift_check_instances().iter().enumerate() {
        let w = WeightVector::equal(set.n_points());
        let periodic = periodic_l2_weighted(set.as_ref(), &w).unwrap().value_squared;
        let rms = rms_shifted_l2_mc(set.as_ref(), &w, 10_000, 7000 + idx as u64).unwrap();
        let se = rms.std_error.unwrap();
        if (rms.value_squared - periodic).abs() > 4.0 * se {
            failures.push(format!(
                "{name}: |shift mean - periodic²| = {} > 4·se = {}",
                (rms.value_squared - periodic).abs(),
                4.0 * se
            ));
        }
    }
    report(4, "shift identity statistics, 10 instances", &failures);
}

/// Criterion 5: shifting never moves the periodic L2 discrepancy by more
/// than 1e-12, over 10 seeded shifts per tested set.
#[test]
fn criterion_5_shift_invariance() {
    let mut failures = Vec::new();
    for (idx, (name, set)) in shift_check_instances().iter().enumerate() {
        let base = periodic_l2(set.as_ref()).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(8000 + idx as u64);
        for s in 0..10 {
            let delta: Vec<f64> = (0..set.dim()).map(|_| rng.random()).collect();
            let shifted = shift_point_set(set.as_ref(), &delta).unwrap();
            let moved = periodic_l2(&shifted).unwrap().value;
            if (moved - base).abs() > 1e-12 {
                failures.push(format!(
                    "{name} shift#{s}: |{moved} - {base}| = {}",
                    (moved - base).abs()
                ));
            }
        }
    }
    report(5, "shift invariance at 1e-12", &failures);
}

/// Criterion 6: exhaustive exponential-sum bound checks over eligible
/// h in [-p,p]^d: family P for p <= 31, Q for p <= 13, R for p <= 31,
/// all with d <= 4; zero violations, the R-family complex sum matches
/// p·(root count) to 1e-9 p², and the quadratic Gauss sum witness at
/// p=7, h=(1,1) has modulus √7.
///
/// KNOWN RED: the (d-1)√p and (d-1)p inequalities are false when p <= d,
/// because n^p ≡ n mod p collapses the phase polynomial. Hand-checkable
/// counterexamples inside the required range: family P at p=2, d=2,
/// h=(1,1) (every phase (n+n²)/2 is an integer, so the modulus is 2 > √2);
/// family Q at p=2, d=2, h=(0,1) (the mod-4 Gauss sum 2+2i has modulus
/// 2√2 > 2); family Q at p=3, d=3, h=(0,0,1) (modulus 3|1+2cos(2π/9)| ≈
/// 7.596 > 6). The evaluator is verified against these cases in the unit
/// tests; this criterion asserts the required "zero violations" anyway
/// and therefore fails on exactly those three cells. The R family bound
/// holds unconditionally (a nonzero polynomial of degree at most d-1 has
/// at most d-1 roots) and is fully green.
#[test]
fn criterion_6_exponential_sum_bounds() {
    let mut failures = Vec::new();
    let plans = [
        (PSetFamily::P, 31u64),
        (PSetFamily::Q, 13),
        (PSetFamily::R, 31),
    ];
    for (family, pmax) in plans {
        for p in primes_up_to(pmax) {
            for d in 1..=4usize {
                let s = verify_weil_exhaustive(family, p, d, p as i64).unwrap();
                if s.n_violations != 0 {
                    failures.push(format!(
                        "{family} p={p} d={d}: {} violations, worst excess {}",
                        s.n_violations, s.worst_excess
                    ));
                }
                if s.n_eligible + s.n_skipped != s.n_total {
                    failures.push(format!("{family} p={p} d={d}: coverage mismatch"));
                }
                if let Some(dev) = s.max_root_count_dev {
                    if dev > 1e-9 * (p * p) as f64 {
                        failures.push(format!(
                            "R p={p} d={d}: root-count deviation {dev}"
                        ));
                    }
                }
            }
        }
    }
    // equality witness: the quadratic Gauss sum meets (d-1)√p exactly
    let witness = exp_sum_p(7, &[1, 1]).unwrap();
    if (witness - 7.0f64.sqrt()).abs() > 1e-9 {
        failures.push(format!("Gauss sum witness: {witness} vs √7"));
    }
    if (witness - weil_bound(PSetFamily::P, 7, 2)).abs() > 1e-9 {
        failures.push("witness does not meet the bound with equality".into());
    }
    report(6, "exhaustive exponential-sum bounds", &failures);
}

/// Criterion 7: for (N,d) in {(8,1),(8,2),(16,3)}, the mean squared
/// periodic discrepancy of 400 seeded uniform random sets sits within 4
/// standard errors of (2^{-d} - 3^{-d})/N.
#[test]
fn criterion_7_random_average() {
    let mut failures = Vec::new();
    for (case, (n, d)) in [(8usize, 1usize), (8, 2), (16, 3)].iter().enumerate() {
        let mut values = Vec::with_capacity(400);
        for r in 0..400u64 {
            let set = random_set(*n, *d, 9000 + 1000 * case as u64 + r);
            values.push(periodic_l2(&set).unwrap().value_squared);
        }
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
        let se = (var / m).sqrt();
        let expect = average_l2_sq(*n as u64, *d as u32);
        if (mean - expect).abs() > 4.0 * se {
            failures.push(format!(
                "(N={n},d={d}): mean {mean} vs expectation {expect}, 4·se = {}",
                4.0 * se
            ));
        }
    }
    report(7, "random-set average discrepancy", &failures);
}

/// Criterion 8: the inverse-discrepancy table for d in {1..12} and
/// eps in {0.5, 0.25, 0.1} reproduces the hand-checked row, satisfies the
/// prime-gap property in every row, and wherever the witness prime is at
/// most 200 the P set actually reaches eps times the empty-set value.
#[test]
fn criterion_8_inverse_bound_table() {
    let mut failures = Vec::new();
    let ds: Vec<u32> = (1..=12).collect();
    let epss = [0.5, 0.25, 0.1];
    let rows = inverse_table(&ds, &epss).unwrap();
    assert_eq!(rows.len(), 36);

    for row in &rows {
        let expect_lower = {
            let mut v = 1.0;
            for _ in 0..row.d {
                v *= 1.5;
            }
            v / (1.0 + row.eps * row.eps)
        };
        if (row.lower_equal - expect_lower).abs() > 1e-12 * expect_lower {
            failures.push(format!("d={} eps={}: lower_equal {}", row.d, row.eps, row.lower_equal));
        }
        if !(row.m <= row.n_prime && row.n_prime < 2 * row.m && row.upper == 2 * row.m) {
            failures.push(format!(
                "d={} eps={}: prime gap broken (M={}, N'={}, upper={})",
                row.d, row.eps, row.m, row.n_prime, row.upper
            ));
        }
    }

    let hand = rows
        .iter()
        .find(|r| r.d == 2 && (r.eps - 0.5).abs() < 1e-12)
        .unwrap();
    if (hand.lower_equal - 1.8).abs() > 1e-13 || hand.upper != 72 {
        failures.push(format!(
            "hand-checked row: lower {} upper {}",
            hand.lower_equal, hand.upper
        ));
    }

    let mut achieved = 0;
    for row in &rows {
        if row.n_prime <= 200 {
            let set = gen_korobov_p(row.n_prime, row.d as usize).unwrap();
            let value = periodic_l2(&set).unwrap().value;
            let target = row.eps * initial_periodic_l2(row.d);
            if value > target {
                failures.push(format!(
                    "d={} eps={}: P(p={}) value {} above target {}",
                    row.d, row.eps, row.n_prime, value, target
                ));
            }
            achieved += 1;
        }
    }
    if achieved < 6 {
        failures.push(format!("only {achieved} witness rows with N' <= 200"));
    }

    report(8, "inverse-discrepancy table", &failures);
}

/// Criterion 9: equal-weight `periodic_l2_weighted` agrees with
/// `periodic_l2` to 1e-13 relative on every criterion-1 instance with
/// N <= 169.
#[test]
fn criterion_9_weighted_consistency() {
    let mut failures = Vec::new();
    for family in PSetFamily::ALL {
        for &p in &SWEEP_PRIMES {
            if family.n_points(p) > 169 {
                continue;
            }
            for &d in &SWEEP_DIMS {
                let set = generate(family, p, d as usize).unwrap();
                let eq = periodic_l2(&set).unwrap().value;
                let w = periodic_l2_weighted(&set, &WeightVector::equal(set.n_points()))
                    .unwrap()
                    .value;
                let rel = (eq - w).abs() / eq.max(f64::MIN_POSITIVE);
                if rel > 1e-13 {
                    failures.push(format!("{family} p={p} d={d}: relative gap {rel}"));
                }
            }
        }
    }
    report(9, "weighted/equal-weight consistency at 1e-13 relative", &failures);
}

/// Checks that `pset_l2_bound` and the sweeps use the same constant the
/// acceptance slack is defined against.
#[test]
fn bound_function_spot_values() {
    assert!((pset_l2_bound(2, 25) - 0.2).abs() < 1e-15);
    assert!((pset_l2_bound(1, 5) - 1.0 / 10.0f64.sqrt()).abs() < 1e-15);
}
