//! Exit criteria. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails.

use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dictatorlab::graph::{
    all_dictators, dictator_set, epsilon_of, max_independent_sets, maximal_independent_sets,
    perturb, IndependentSet, VertexSet,
};
use dictatorlab::grid::{BooleanFunction, GridFunction, GridShape, Point};
use dictatorlab::stability::{
    lambda, nearest_dictator_oracle, recover_independent_set, rounding_residual, TAIL_BOUND_SLACK,
};
use dictatorlab::tail::{bennett_h, bennett_tail, TailParams};
use dictatorlab::transform::{fast_forward, forward, inverse, level_weights};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_function(rng: &mut ChaCha8Rng, shape: GridShape) -> GridFunction {
    let scale = 10f64.powi(rng.random_range(-2..=2));
    let values = (0..shape.size())
        .map(|_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
        .collect();
    GridFunction::new(shape, values).unwrap()
}

/// Round trip, Parseval and fast-vs-naive agreement.
fn transform_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_rt, mut worst_parseval, mut worst_fast) = (0f64, 0f64, 0f64);
    for r in 3..=7 {
        for n in 1..=4 {
            let shape = GridShape::new(r, n).unwrap();
            for _ in 0..100 {
                let f = random_function(&mut rng, shape);
                let naive = forward(&f);
                let fast = fast_forward(&f);

                let back = inverse(&naive);
                let rt = back.sub(&f).unwrap().max_abs() / f.max_abs().max(1.0);
                worst_rt = worst_rt.max(rt);
                check(rt < 1e-10, || format!("round trip {rt:e} on r={r} n={n}"))?;

                let norm = f.norm_sq();
                let parseval = (norm - level_weights(&naive).total()).abs() / norm.max(1.0);
                worst_parseval = worst_parseval.max(parseval);
                check(parseval < 1e-9, || format!("Parseval {parseval:e} on r={r} n={n}"))?;

                let scale = naive.coeffs().iter().map(|z| z.norm()).fold(1.0, f64::max);
                let diff = naive
                    .coeffs()
                    .iter()
                    .zip(fast.coeffs())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
                    / scale;
                worst_fast = worst_fast.max(diff);
                check(diff < 1e-9, || format!("fast vs naive {diff:e} on r={r} n={n}"))?;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "round trip {worst_rt:.1e}, Parseval {worst_parseval:.1e}, fast/naive {worst_fast:.1e}, {elapsed:.1?}"
    ))
}

/// `1[x_i = j]` has `f̂(k·e_i) = ω^{−kj}/r` (so `1/r` for `j = 0`, modulus
/// `1/r` always) and nothing off the axis.
fn dictator_closed_form() -> Outcome {
    let mut cases = 0;
    for r in [3, 5] {
        for n in [2, 3] {
            let shape = GridShape::new(r, n).unwrap();
            for d in all_dictators(shape) {
                let (i, j) = (d.coord(), d.value());
                let f = GridFunction::indicator(shape, d.members()).unwrap();
                for spec in [forward(&f), fast_forward(&f)] {
                    for s in shape.points() {
                        let c = spec.coeff(&s).unwrap();
                        let on_axis = s.coords().iter().enumerate().all(|(m, &x)| m == i || x == 0);
                        let want = if on_axis {
                            let k = s.coords()[i];
                            let theta = -std::f64::consts::TAU * ((k * j) % r) as f64 / r as f64;
                            Complex64::new(theta.cos(), theta.sin()) / r as f64
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        check((c - want).norm() < 1e-12, || {
                            format!("r={r} n={n} dictator ({i},{j}) at {:?}: {c} vs {want}", s.coords())
                        })?;
                        if on_axis {
                            check((c.norm() - 1.0 / r as f64).abs() < 1e-12, || "modulus".into())?;
                            if j == 0 {
                                check((c - 1.0 / r as f64).norm() < 1e-12, || "j = 0 value".into())?;
                            }
                        }
                    }
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} dictators, naive and fast"))
}

/// Straight 9-point DFT of the indicator of {(0,0),(0,1)} on Z_3^2,
/// written independently of the library.
fn brute_force_worked_levels() -> [f64; 3] {
    let ones = [(0usize, 0usize), (0, 1)];
    let mut levels = [0.0; 3];
    for s1 in 0..3 {
        for s2 in 0..3 {
            let (mut re, mut im) = (0.0, 0.0);
            for &(t1, t2) in &ones {
                let angle = -2.0 * std::f64::consts::PI * (s1 * t1 + s2 * t2) as f64 / 3.0;
                re += angle.cos();
                im += angle.sin();
            }
            let mag = (re * re + im * im) / 81.0;
            levels[(s1 != 0) as usize + (s2 != 0) as usize] += mag;
        }
    }
    levels
}

fn worked_example() -> Outcome {
    let shape = GridShape::new(3, 2).unwrap();
    let pts = [Point::new(vec![0, 0]), Point::new(vec![0, 1])];
    let j = IndependentSet::new(VertexSet::from_points(shape, &pts).unwrap()).unwrap();

    let expected = [4.0 / 81.0, 10.0 / 81.0, 4.0 / 81.0];
    let oracle = brute_force_worked_levels();
    let f = GridFunction::indicator(shape, j.members()).unwrap();
    let levels = level_weights(&fast_forward(&f));
    for k in 0..3 {
        check((oracle[k] - expected[k]).abs() < 1e-12, || format!("oracle level {k}"))?;
        check((levels.level(k) - expected[k]).abs() < 1e-12, || {
            format!("level {k}: {} vs {}", levels.level(k), expected[k])
        })?;
    }

    let (dictator, report) = recover_independent_set(&j).map_err(|e| e.to_string())?;
    check(report.epsilon.ratio() == Ratio::new(1, 3), || "ε ≠ 1/3".into())?;
    check((report.tail_weight - 4.0 / 81.0).abs() < 1e-12, || "tail weight".into())?;
    check((report.tail_bound - 18.0 / 81.0).abs() < 1e-12, || "tail bound".into())?;
    check(report.tail_weight <= report.tail_bound, || "tail exceeds 2ε/r".into())?;
    check(report.recovery.i0 == 0, || format!("i0 = {}", report.recovery.i0))?;
    check((dictator.coord(), dictator.value()) == (0, 0), || "dictator".into())?;
    check(report.symdiff.ratio() == Ratio::new(1, 9), || "symdiff ≠ 1/9".into())?;
    Ok("levels [4,10,4]/81, ε=1/3, tail 4/81 ≤ 18/81, i0=0, dictator (0,0), symdiff 1/9".into())
}

fn uniqueness_oracle() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (r, n, want) in [(3, 2, 6), (4, 2, 8), (3, 3, 9)] {
        let shape = GridShape::new(r, n).unwrap();
        let found = max_independent_sets(shape, usize::MAX);
        check(!found.truncated, || "truncated".into())?;
        check(found.sets.len() == want, || {
            format!("K_{r}^{n}: {} sets, expected {want}", found.sets.len())
        })?;
        let mut dictators: Vec<Vec<usize>> =
            all_dictators(shape).iter().map(|d| d.members().to_vec()).collect();
        dictators.sort();
        let sets: Vec<Vec<usize>> = found.sets.iter().map(|s| s.members().to_vec()).collect();
        check(sets == dictators, || format!("K_{r}^{n}: non-dictator maximum set"))?;
        summary.push(format!("K_{r}^{n}={want}"));
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{} ({elapsed:.1?})", summary.join(", ")))
}

fn recovery_corpus() -> Outcome {
    let mut trials = 0;
    for r in [3usize, 4, 5] {
        for n in [2usize, 3] {
            let shape = GridShape::new(r, n).unwrap();
            let kmax = (r.pow(n as u32 - 1) as f64 * 0.2).ceil() as usize;
            for k in 0..=kmax {
                for seed in 0..50u64 {
                    let source = dictator_set(shape, seed as usize % n, (seed as usize / n) % r)
                        .unwrap();
                    let j = perturb(&source, k, seed).unwrap();
                    let (rec, report) = recover_independent_set(&j).map_err(|e| e.to_string())?;
                    let (oracle, _) = nearest_dictator_oracle(&j);
                    check(rec == source, || {
                        format!("r={r} n={n} k={k} seed={seed}: recovered {:?}", report.recovery.dictator)
                    })?;
                    check(oracle == source && report.oracle_agrees, || {
                        format!("r={r} n={n} k={k} seed={seed}: oracle disagrees")
                    })?;
                    check(
                        report.symdiff.ratio() == Ratio::new(k as u64, shape.size() as u64),
                        || format!("r={r} n={n} k={k} seed={seed}: symdiff"),
                    )?;
                    trials += 1;
                }
            }
        }
    }
    Ok(format!("{trials} trials, 100% recovered, oracle agrees"))
}

fn adfs_tail_bound() -> Outcome {
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut verify = |j: &IndependentSet| -> Result<(), String> {
        let shape = j.shape();
        let f = GridFunction::indicator(shape, j.members()).unwrap();
        let tail = level_weights(&fast_forward(&f)).above(1);
        let eps = epsilon_of(j);
        let bound = 2.0 * (*eps.numer() as f64 / *eps.denom() as f64) / shape.r() as f64;
        worst = worst.max(tail - bound);
        checked += 1;
        check(tail <= bound + TAIL_BOUND_SLACK, || {
            format!("{shape}: ‖f^>1‖² = {tail} > 2ε/r = {bound} for {:?}", j.members())
        })
    };
    for (r, n) in [(3, 2), (4, 2)] {
        let shape = GridShape::new(r, n).unwrap();
        for j in maximal_independent_sets(shape, usize::MAX).sets {
            verify(&j)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for r in [3usize, 4, 5] {
        for n in [2usize, 3] {
            let shape = GridShape::new(r, n).unwrap();
            for _ in 0..1000 {
                let d = dictator_set(shape, rng.random_range(0..n), rng.random_range(0..r)).unwrap();
                let k = rng.random_range(0..=d.len());
                verify(&perturb(&d, k, rng.random()).unwrap())?;
            }
        }
    }
    Ok(format!("{checked} sets, max(‖f^>1‖² − 2ε/r) = {worst:.2e}"))
}

fn rounding_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_ratio = 0f64;
    for trial in 0..1000 {
        let shape = GridShape::new(rng.random_range(3..=6), rng.random_range(1..=3)).unwrap();
        let ones: Vec<usize> = (0..shape.size()).filter(|_| rng.random_bool(0.3)).collect();
        let f = BooleanFunction::indicator(shape, &ones).unwrap();
        let spread = [0.1, 0.6, 2.0][trial % 3];
        let g = GridFunction::from_fn(shape, |_| {
            Complex64::new(
                0.5 + rng.random_range(-spread..spread),
                rng.random_range(-spread..spread),
            )
        })
        .unwrap();
        let lhs = rounding_residual(&f, &g).map_err(|e| e.to_string())?;
        let rhs = 4.0 * f.function().sub(&g).unwrap().norm_sq();
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        }
        check(lhs <= rhs, || format!("trial {trial}: {lhs} > {rhs}"))?;
    }
    Ok(format!("1000 pairs, max ‖f−g1‖²/(4‖f−g‖²) = {worst_ratio:.3}"))
}

fn constants() -> Outcome {
    let l = lambda();
    let expected = (1.0 - 0.5f64.sqrt() - 0.25) / (0.5f64.sqrt() + 0.25);
    check((l - expected).abs() < 1e-12, || "λ closed form".into())?;
    let l2 = l * l;
    check(l2 > 1e-3 && l2 < 2.1e-3, || format!("λ² = {l2}"))?;
    let h = bennett_h(std::f64::consts::E - 1.0).map_err(|e| e.to_string())?;
    check((h - 1.0).abs() < 1e-12, || format!("h(e−1) = {h}"))?;
    let tail = bennett_tail(&TailParams::new(1.0, 1.0, 1.0).map_err(|e| e.to_string())?);
    let want = (1.0 - 2.0 * std::f64::consts::LN_2).exp();
    check((tail - want).abs() < 1e-12, || format!("bennett_tail(1,1,1) = {tail}"))?;
    Ok(format!("λ² = {l2:.7}, h(e−1) = {h}, bennett_tail(1,1,1) = {tail:.6}"))
}

fn determinism() -> Outcome {
    let run = || {
        let out = Process::new(env!("CARGO_BIN_EXE_dictatorlab"))
            .args(["verify", "--r", "4", "--n", "3", "--corpus", "perturb", "--k", "3", "--seeds", "20", "--seed", "99"])
            .output()
            .expect("binary runs");
        check(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        Ok::<_, String>(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    check(first == second, || "outputs differ".into())?;
    check(first.split(|&b| b == b'\n').count() >= 22, || "missing rows".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 transform correctness", transform_correctness),
        ("2 dictator spectrum closed form", dictator_closed_form),
        ("3 worked example K_3^2", worked_example),
        ("4 maximum independent sets are dictators", uniqueness_oracle),
        ("5 recovery corpus", recovery_corpus),
        ("6 empirical tail bound 2ε/r", adfs_tail_bound),
        ("7 rounding inequality", rounding_inequality),
        ("8 constants", constants),
        ("9 determinism of verify", determinism),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                println!("FAIL  criterion {name}: {why}");
                failed.push(name);
            }
        }
    }
    println!("acceptance suite finished in {:.1?}", start.elapsed());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
