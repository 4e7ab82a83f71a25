//! Acceptance criteria. Run with `cargo test -p stabsketch-cli --test acceptance -- --nocapture`.

use std::path::{Path, PathBuf};
use std::process::Command;

use num_bigint::BigInt;
use num_rational::BigRational;
use stabsketch::clifford::{random_clifford, CliffordTableau};
use stabsketch::estimator::{estimate, pair_estimate_dense, pair_estimate_stabilizer};
use stabsketch::experiments::{fig1, mean_std, scaling_sweep};
use stabsketch::io::{decode_compressed, decode_observable, decode_state};
use stabsketch::moments::{ab_coefficients, design_trace_identities, first_moment_mc, second_moment_mc};
use stabsketch::sketch::{choose_k, make_sketch, sketch_rng, CompressedRepresentation};
use stabsketch::statevector::{
    expectation_dense, random_state, DenseObservable, Observable, StabilizerProjectorObservable,
};
use stabsketch::vsp::{build_reduction, random_matching_instance, run_protocol};

fn report(n: usize, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

#[test]
fn criterion_1_symmetric_subspace_histograms() {
    let r = fig1(1000, 12, &[7, 8, 9], 2024).unwrap();
    let want_bound = [0.1259, 0.0887, 0.0626];
    let reference = [0.0875, 0.0637, 0.0399];
    let mut pass = r.rank == 13 && (r.expectation - 1.0).abs() < 1e-10;
    let mut detail = String::new();
    for ((s, wb), rf) in r.series.iter().zip(want_bound).zip(reference) {
        let bound_ok = (s.bound_std * 1e4).round() == (wb * 1e4f64).round();
        let ratio = s.sample_std / s.bound_std;
        let ratio_ok = (0.5..=1.0).contains(&ratio);
        let ref_ok = ((s.sample_std - rf) / rf).abs() <= 0.25;
        let mean_ok = (s.sample_mean - 1.0).abs() <= 4.0 * s.sample_std / 1000f64.sqrt();
        pass &= bound_ok && ratio_ok && ref_ok && mean_ok;
        detail.push_str(&format!(
            "[k={} bound_std={:.4} (want {wb}) {} | std={:.4} exact={:.4} ratio={ratio:.3} {} ref {rf} {} | mean={:.4} {}] ",
            s.k,
            s.bound_std,
            ok(bound_ok),
            s.sample_std,
            exact_projector_std(12, s.k, 13.0),
            ok(ratio_ok),
            ok(ref_ok),
            s.sample_mean,
            ok(mean_ok),
        ));
    }
    report(1, pass, detail);
}

/// Exact `Var(F)` for a state inside the range of a projector `M`, from the
/// 2-design twirl `E[P A P] = alpha A + beta Tr(A) I`.
fn exact_projector_std(n: usize, k: usize, trace_m2: f64) -> f64 {
    let (pn, pk) = (2f64.powi(n as i32), 2f64.powi(k as i32));
    let beta = (pk * pn - pk * pk) / (pn * pn * pn - pn);
    let alpha = (pk * pk - beta * pn) / (pn * pn);
    let scale = (pn / pk).powi(4);
    let abs_sq = alpha * alpha + 2.0 * alpha * beta + beta * beta * trace_m2;
    let sq = (alpha + beta).powi(2);
    (scale * (abs_sq + sq) / 2.0 - 1.0).sqrt()
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISS"
    }
}

#[test]
fn criterion_2_reduction_exactness() {
    let mut rng = sketch_rng(2, 0);
    let mut worst_value = 0.0f64;
    let mut worst_proj = 0.0f64;
    let mut worst_herm = 0.0f64;
    for n in [4usize, 6, 8, 10] {
        for b in [false, true] {
            for _ in 0..200 {
                let inst = random_matching_instance(n, b, &mut rng).unwrap();
                let v = build_reduction(&inst).unwrap();
                let want = if b { 0.75 } else { 0.25 };
                worst_value = worst_value.max((v.truth - want).abs());
                worst_proj = worst_proj.max(v.pi.projector_deviation());
                worst_herm = worst_herm.max(v.pi.hermitian_deviation());
            }
        }
    }
    let pass = worst_value <= 1e-12 && worst_proj <= 1e-10 && worst_herm <= 1e-10;
    report(
        2,
        pass,
        format!("max |<psi|Pi|psi> - target| = {worst_value:.2e}, max |Pi^2 - Pi| = {worst_proj:.2e}, max |Pi^dag - Pi| = {worst_herm:.2e}"),
    );
}

#[test]
fn criterion_3_unbiased_and_chebyshev() {
    let n = 8;
    let rank = 2;
    let eps = 0.5;
    let k = choose_k(n, rank as u64, eps).unwrap();
    let mut rng = sketch_rng(3, 0);
    let psi = random_state(n, &mut rng).unwrap();
    let m = DenseObservable::random(n, rank, &mut rng).unwrap();
    let truth = expectation_dense(&psi, &Observable::Dense(m.clone())).unwrap();
    let samples: Vec<f64> = (0..10_000u64)
        .map(|t| {
            let mut r = sketch_rng(3, 1 + t);
            let sa = make_sketch(&psi, &random_clifford(n, &mut r).unwrap(), k, 24).unwrap();
            let sb = make_sketch(&psi, &random_clifford(n, &mut r).unwrap(), k, 24).unwrap();
            pair_estimate_dense(&sa, &sb, &m).unwrap()
        })
        .collect();
    let (mean, std) = mean_std(&samples);
    let se = std / (samples.len() as f64).sqrt();
    let fail_rate = samples.iter().filter(|f| (*f - truth).abs() >= eps).count() as f64 / samples.len() as f64;
    let pass = (mean - truth).abs() <= 4.0 * se && fail_rate <= 0.27;
    report(
        3,
        pass,
        format!("k={k} truth={truth:.5} mean={mean:.5} ({:.2} SE) Pr[|F-truth|>=eps]={fail_rate:.4}", (mean - truth).abs() / se),
    );
}

#[test]
fn criterion_4_moment_identities() {
    let first = first_moment_mc(3, 1, 100_000, 4).unwrap().max_dev_first.unwrap();
    let second = second_moment_mc(2, 1, 100_000, 4).unwrap().max_dev_second.unwrap();
    let pow2 = |e: usize| BigInt::from(1) << e;
    let mut ab_ok = true;
    for n in 1..=30 {
        for k in 0..=n {
            let ab = ab_coefficients(n, k).unwrap();
            let lhs1 = &ab.a * BigRational::from(pow2(2 * n)) + &ab.b * BigRational::from(pow2(n));
            let lhs2 = &ab.a * BigRational::from(pow2(n)) + &ab.b;
            ab_ok &= lhs1 == BigRational::from(pow2(2 * k)) && lhs2 == BigRational::new(pow2(2 * k), pow2(n));
        }
    }
    let traces_ok = (1..=6).all(|n| (0..=n).all(|k| design_trace_identities(n, k).unwrap().holds()));
    let pass = first <= 0.01 && second <= 0.02 && ab_ok && traces_ok;
    report(
        4,
        pass,
        format!("first-moment dev {first:.4}, second-moment dev {second:.4}, a/b identities {}, trace identities {}", ok(ab_ok), ok(traces_ok)),
    );
}

#[test]
fn criterion_5_fast_path_equivalence() {
    let mut worst = 0.0f64;
    for n in [4usize, 6, 8] {
        let mut rng = sketch_rng(5, n as u64);
        for t in 0..100 {
            let k = t % (n + 1);
            let psi = random_state(n, &mut rng).unwrap();
            let c = random_clifford(n, &mut rng).unwrap();
            let d = random_clifford(n, &mut rng).unwrap();
            let proj = StabilizerProjectorObservable::from_tableau(random_clifford(n, &mut rng).unwrap(), (t * 3) % (n + 1)).unwrap();
            let sa = make_sketch(&psi, &c, k, 24).unwrap();
            let sb = make_sketch(&psi, &d, k, 24).unwrap();
            let fast = pair_estimate_stabilizer(&sa, &sb, &proj).unwrap();
            let dense = pair_estimate_dense(&sa, &sb, &proj.to_dense().unwrap()).unwrap();
            worst = worst.max((fast - dense).abs());
        }
    }
    report(5, worst <= 1e-8, format!("max |fast - dense| = {worst:.2e} over 300 cases"));
}

#[test]
fn criterion_6_lossless_lever() {
    let n = 8;
    let mut rng = sketch_rng(6, 0);
    let mut worst = 0.0f64;
    for t in 0..50 {
        let psi = random_state(n, &mut rng).unwrap();
        let m = Observable::Dense(DenseObservable::random(n, 1 + t % 8, &mut rng).unwrap());
        let s = make_sketch(&psi, &CliffordTableau::identity(n), n, 53).unwrap();
        let d = CompressedRepresentation::from_parts(0.1, 0.25, t as u64, vec![s; 6]).unwrap();
        let e = estimate(&d, &m).unwrap().estimate;
        worst = worst.max((e - expectation_dense(&psi, &m).unwrap()).abs());
    }
    report(6, worst <= 1e-9, format!("max |E - <psi|M|psi>| = {worst:.2e} over 50 pairs"));
}

#[test]
fn criterion_7_size_scaling() {
    let r = scaling_sweep(8, 16, 0.25, 0.1, 7).unwrap();
    let rows: Vec<String> = r.rows.iter().map(|row| format!("n={} k={} bytes={}", row.n, row.k, row.bytes)).collect();
    let pass = (r.slope - 0.5).abs() <= 0.1;
    report(7, pass, format!("slope {:.3} (want 0.5 +- 0.1); {}", r.slope, rows.join(", ")));
}

#[test]
fn criterion_8_end_to_end_protocol() {
    let n = 10;
    let mut lines = Vec::new();
    let mut pass = true;
    for b in [false, true] {
        let mut successes = 0;
        for t in 0..100u64 {
            let mut rng = sketch_rng(8, 2 * t + u64::from(b));
            let v = build_reduction(&random_matching_instance(n, b, &mut rng).unwrap()).unwrap();
            if run_protocol(&v, 0.2, 0.1, 1000 + 2 * t + u64::from(b)).unwrap().bit == b {
                successes += 1;
            }
        }
        pass &= successes >= 85;
        lines.push(format!("b={}: {successes}/100", u8::from(b)));
    }
    report(8, pass, lines.join(", "));
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_stabsketch")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn dir_contents(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (PathBuf::from(p.file_name().unwrap()), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_9_determinism_and_golden_files() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let cli_fix = manifest.join("tests/fixtures");
    let core_fix = manifest.join("../core/tests/fixtures");
    let state = cli_fix.join("state.svec");
    let obs = cli_fix.join("obs.obsm");

    let run_all = |dir: &Path| -> Vec<(PathBuf, Vec<u8>)> {
        let d = dir.to_str().unwrap();
        let stsk = dir.join("s.stsk");
        let stsk = stsk.to_str().unwrap();
        let mut outputs = vec![
            cli(&["--seed", "9", "compress", "--in", state.to_str().unwrap(), "--epsilon", "0.3", "--p", "0.2", "--rank", "2", "--out", stsk]),
            cli(&["--seed", "9", "estimate", "--compressed", stsk, "--observable", obs.to_str().unwrap()]),
            cli(&["--seed", "9", "info", stsk]),
            cli(&["--seed", "9", "moments", "--n", "2", "--k", "1", "--samples", "2000"]),
            cli(&["--seed", "9", "vsp", "--n", "4", "--b", "1", "--trials", "3", "--export", &format!("{d}/inst.json")]),
            cli(&["--seed", "9", "fig1", "--out", &format!("{d}/fig1"), "--trials", "20", "--n", "5", "--k", "2,3"]),
            cli(&["--seed", "9", "savings", "--n", "50", "--k", "35", "--rank", "2^50"]),
            cli(&["--seed", "9", "sweep", "--epsilon", "0.5", "--p", "0.3", "--n-min", "3", "--n-max", "5", "--out", &format!("{d}/sweep.csv")]),
        ]
        .into_iter()
        .enumerate()
        .map(|(i, o)| (PathBuf::from(format!("stdout{i}")), o))
        .collect::<Vec<_>>();
        outputs.extend(dir_contents(dir));
        outputs.extend(dir_contents(&dir.join("fig1")));
        outputs
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_all(a.path());
    let second = run_all(b.path());
    // Output paths are echoed by compress; compare with the directory stripped.
    let strip = |v: Vec<(PathBuf, Vec<u8>)>, d: &Path| -> Vec<(PathBuf, Vec<u8>)> {
        let prefix = d.to_str().unwrap();
        v.into_iter()
            .map(|(p, bytes)| match p.to_str().unwrap().starts_with("stdout") {
                true => (p, String::from_utf8(bytes).unwrap().replace(prefix, "<dir>").into_bytes()),
                false => (p, bytes),
            })
            .collect()
    };
    let identical = strip(first.clone(), a.path()) == strip(second, b.path());

    let golden_ok = decode_state(&std::fs::read(core_fix.join("golden.svec")).unwrap()).is_ok()
        && decode_observable(&std::fs::read(core_fix.join("golden.obsm")).unwrap()).is_ok()
        && decode_compressed(&std::fs::read(core_fix.join("golden.stsk")).unwrap()).is_ok()
        && decode_state(&std::fs::read(&state).unwrap()).is_ok()
        && decode_observable(&std::fs::read(&obs).unwrap()).is_ok();
    report(
        9,
        identical && golden_ok,
        format!("{} outputs byte-identical on repeat: {}; golden fixtures decode: {}", first.len(), ok(identical), ok(golden_ok)),
    );
}
