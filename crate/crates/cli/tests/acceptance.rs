//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use holocomp_cli::COMMANDS;
use holocomp_core::analytic::{dirichlet_energy_integral, dirichlet_norm_coeff};
use holocomp_core::capacity::{capacity, KernelKind, KernelOperator, Rect, RectUnion, SolverConfig, TorusGrid};
use holocomp_core::carleson::{psi_admissibility, PsiConfig};
use holocomp_core::criteria::{
    kernel_ratio_sup, verify_change_of_variables, verify_separated_norm_expansion, KernelRatioQuery, TestIntegrand,
    IDENTITY_RESOLUTION,
};
use holocomp_core::nevanlinna::counting_function_detail;
use holocomp_core::report::Verdict;
use holocomp_core::{BidiscSymbol, Complex64, DiscSymbol, Resolution, TaylorGrid2D, WeightPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

#[path = "../../core/tests/support/capacity_oracle.rs"]
mod capacity_oracle;

type Check = Result<String, String>;

/// Name, runtime budget and check.
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures")
}

fn regression<T: for<'de> Deserialize<'de>>(prefix: &str) -> Result<Vec<(String, T)>, String> {
    let dir = docs().join("regression");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .map(|e| e.map(|e| e.path()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.file_name().is_some_and(|n| n.to_string_lossy().starts_with(prefix)));
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).map_err(|e| e.to_string())?;
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let v = serde_json::from_str(&text).map_err(|e| format!("{name}: {e}"))?;
            Ok((name, v))
        })
        .collect()
}

/// Runs a shipped fixture through the binary and returns the exit code.
fn cli(command: &str, out: &Path) -> Result<i32, String> {
    let config = docs().join(format!("{command}.json"));
    let o = Command::new(env!("CARGO_BIN_EXE_holocomp"))
        .args([command, "--config"])
        .arg(&config)
        .arg("--out")
        .arg(out)
        .env_remove("HOLOCOMP_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    o.status
        .code()
        .ok_or_else(|| format!("{command}: killed by a signal"))
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn report(dir: &Path) -> Result<Value, String> {
    serde_json::from_slice(&read(&dir.join("report.json"))?).map_err(|e| e.to_string())
}

/// No value more than twice its predecessor over the last three entries.
fn bounded_tail(profile: &[f64]) -> bool {
    let tail = &profile[profile.len().saturating_sub(3)..];
    tail.windows(2).all(|w| w[1] <= 2.0 * w[0])
}

fn norm_consistency() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let a = WeightPair::new(0.3, 0.45).map_err(|e| e.to_string())?;
    let family: Vec<TaylorGrid2D> = (0..50)
        .map(|_| {
            let (k, l) = (rng.random_range(0..=6), rng.random_range(0..=6));
            let coeffs: Vec<Complex64> = (0..(k + 1) * (l + 1))
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            TaylorGrid2D::from_fn(k, l, |i, j| coeffs[i * (l + 1) + j])
        })
        .collect();
    let mut worst = 0.0f64;
    for f in &family {
        // column-major plain summation with exp/log weights
        let mut naive = 0.0;
        for l in 0..=f.l_max() {
            for k in 0..=f.k_max() {
                let w = (2.0 * a.a1() * ((k + 1) as f64).ln() + 2.0 * a.a2() * ((l + 1) as f64).ln()).exp();
                naive += w * f.get(k, l).norm_sqr();
            }
        }
        worst = worst.max(rel(dirichlet_norm_coeff(f, a), naive));
    }
    ensure(worst < 1e-12, || format!("coefficient norm off by {worst:e} relative"))?;
    let band = |res: Resolution| -> Result<f64, String> {
        let ratios = family
            .iter()
            .map(|f| {
                let e = dirichlet_energy_integral(f, a, res, 1e-6).map_err(|e| e.to_string())?;
                Ok(dirichlet_norm_coeff(f, a) / e.value)
            })
            .collect::<Result<Vec<f64>, String>>()?;
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(hi / lo)
    };
    let res = Resolution::new(16, 32);
    let (b1, b2) = (band(res)?, band(res.doubled())?);
    let change = rel(b2, b1);
    ensure(change <= 0.1, || format!("band {b1:.4} -> {b2:.4} under doubling"))?;
    Ok(format!("oracle gap {worst:.1e}; band {b1:.4} -> {b2:.4} ({:.2}%)", 100.0 * change))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CovFixture {
    #[allow(dead_code)]
    command: String,
    phi1: DiscSymbol,
    phi2: DiscSymbol,
    a: WeightPair,
    g: TestIntegrand,
}

fn change_of_variables() -> Check {
    let all = regression::<CovFixture>("cov-")?;
    ensure(all.len() == 12, || format!("{} fixtures, expected 12", all.len()))?;
    let mut worst = 0.0f64;
    for (name, f) in &all {
        let r = verify_change_of_variables(&f.phi1, &f.phi2, f.a, &f.g, IDENTITY_RESOLUTION)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(r.gap < 1e-3, || format!("{name}: gap {:e}", r.gap))?;
        ensure(r.gap_halved(), || format!("{name}: gap {:e} -> {:e} did not halve", r.gap, r.gap_doubled))?;
        worst = worst.max(r.gap);
    }
    Ok(format!("12 fixtures, max gap {worst:.1e}, all halve under doubling"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergyFixture {
    #[allow(dead_code)]
    command: String,
    phi1: DiscSymbol,
    phi2: DiscSymbol,
    a: WeightPair,
    f: TaylorGrid2D,
}

fn norm_expansion() -> Check {
    let all = regression::<EnergyFixture>("energy-")?;
    ensure(all.len() == 6, || format!("{} fixtures, expected 6", all.len()))?;
    let mut worst = 0.0f64;
    for (name, f) in &all {
        let phi = BidiscSymbol::separated(f.phi1.clone(), f.phi2.clone());
        let r = verify_separated_norm_expansion(&phi, f.a, &f.f, IDENTITY_RESOLUTION, 1e-3)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(r.total.gap < 1e-3, || format!("{name}: total gap {:e}", r.total.gap))?;
        worst = worst.max(r.total.gap);
    }
    Ok(format!("6 fixtures, max total gap {worst:.1e}"))
}

fn random_disc_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.random_range(1e-3..0.999), rng.random_range(0.0..2.0 * PI)))
        .collect()
}

fn counting_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = random_disc_points(&mut rng, 500);
    let square = DiscSymbol::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).map_err(|e| e.to_string())?;
    for &z in &pts {
        let n = counting_function_detail(&square, 0.5, z).map_err(|e| e.to_string())?.value;
        ensure(n == 2.0, || format!("z^2 at {z}: N = {n}"))?;
    }
    let mut worst = 0.0f64;
    for a in [0.1, 0.25, 0.4, 0.5] {
        for &z in &pts {
            let n = counting_function_detail(&DiscSymbol::identity(), a, z).map_err(|e| e.to_string())?.value;
            let oracle = (1.0 / z.norm()).ln().powf(1.0 - 2.0 * a);
            worst = worst.max(rel(n, oracle));
        }
    }
    ensure(worst < 1e-10, || format!("identity off by {worst:e} relative"))?;
    for d in [2usize, 3, 4] {
        let zeros = random_disc_points(&mut rng, d).into_iter().map(|z| z * 0.9).collect();
        let b = DiscSymbol::blaschke(zeros, c(0.0, 1.0).exp()).map_err(|e| e.to_string())?;
        for &z in &pts {
            let n = counting_function_detail(&b, 0.25, z).map_err(|e| e.to_string())?.preimages;
            ensure(n == d, || format!("degree-{d} Blaschke at {z}: {n} preimages"))?;
        }
    }
    Ok(format!("z^2 gives N = 2 on 500 points; identity gap {worst:.1e}; Blaschke degrees 2, 3, 4 exact"))
}

fn kernel_ratio() -> Check {
    for beta in [0.0, 0.5, 1.0] {
        let r = kernel_ratio_sup(&DiscSymbol::identity(), &KernelRatioQuery::new(beta)).map_err(|e| e.to_string())?;
        ensure(r.sup == 1.0, || format!("identity sup {} at beta {beta}", r.sup))?;
    }
    let alpha = c(0.5, 0.0);
    let m = DiscSymbol::moebius(alpha).map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for beta in [0.0, 1.0] {
        let q = KernelRatioQuery::new(beta);
        let r = kernel_ratio_sup(&m, &q).map_err(|e| e.to_string())?;
        // the ratio factors as (1-|alpha|^2)^{1-2p} g(z1) g(z2), g = |1 - conj(alpha) z|^{2p-1}
        let p = 1.0 / (beta + 2.0);
        let g = q
            .grid
            .points()
            .iter()
            .map(|z| (1.0 - alpha.conj() * z).norm().powf(2.0 * p - 1.0))
            .fold(0.0, f64::max);
        let oracle = (1.0 - alpha.norm_sqr()).powf(1.0 - 2.0 * p) * g * g;
        let gap = rel(r.sup, oracle);
        ensure(gap < 0.01, || format!("Moebius beta {beta}: {} vs {oracle}", r.sup))?;
        gaps.push(gap);
    }
    let square = DiscSymbol::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).map_err(|e| e.to_string())?;
    let r = kernel_ratio_sup(&square, &KernelRatioQuery::new(0.0)).map_err(|e| e.to_string())?;
    ensure(!r.critical_points.is_empty(), || "z^2 flagged no critical points".into())?;
    ensure(r.sup.is_finite(), || format!("z^2 sup {}", r.sup))?;
    Ok(format!(
        "identity sup 1; Moebius gaps {:.1e}, {:.1e}; z^2 flags {} points, sup {:.4}",
        gaps[0],
        gaps[1],
        r.critical_points.len(),
        r.sup
    ))
}

fn psi() -> Check {
    let cfg = PsiConfig::default();
    let t = psi_admissibility(|t| t, cfg).map_err(|e| e.to_string())?;
    let root = psi_admissibility(f64::sqrt, cfg).map_err(|e| e.to_string())?;
    let one = psi_admissibility(|_| 1.0, cfg).map_err(|e| e.to_string())?;
    let (g1, g2) = (rel(t.value, 4.0 * PI * PI), rel(root.value, 8.0 * PI));
    ensure(t.verdict == Verdict::FiniteEvidence && g1 < 1e-3, || format!("psi = t: {:?} {}", t.verdict, t.value))?;
    ensure(root.verdict == Verdict::FiniteEvidence && g2 < 5e-3, || {
        format!("psi = sqrt t: {:?} {}", root.verdict, root.value)
    })?;
    ensure(one.admissible() == Some(false), || format!("psi = 1: {:?}", one.verdict))?;
    Ok(format!("t -> {:.6} ({g1:.1e}), sqrt t -> {:.6} ({g2:.1e}), 1 -> not admissible", t.value, root.value))
}

fn one_box(scratch: &Path) -> Check {
    let dir = scratch.join("one-box");
    let code = cli("one-box-check", &dir)?;
    let r = report(&dir)?;
    ensure(code == 0 && r["status"] == "finite-evidence", || format!("exit {code}, status {}", r["status"]))?;
    ensure(r["config"]["samples"] == 1_000_000, || "fixture is not at 10^6 samples".into())?;
    let profile: Vec<f64> = r["result"]["levels"]
        .as_array()
        .ok_or("no levels")?
        .iter()
        .filter(|l| l["resolved"] == true)
        .filter_map(|l| l["max_ratio"].as_f64())
        .collect();
    ensure(profile.len() >= 3, || format!("only {} resolved levels", profile.len()))?;
    ensure(bounded_tail(&profile), || format!("growth in {profile:?}"))?;
    let csv = String::from_utf8(read(&dir.join("grid.csv"))?).map_err(|e| e.to_string())?;
    let rows = csv.lines().count() - 1;
    let expected = r["result"]["rows"].as_array().map_or(0, Vec::len);
    ensure(rows > 0 && rows == expected, || format!("CSV has {rows} rows, report {expected}"))?;
    Ok(format!("resolved profile {profile:.4?}; CSV with {rows} rows"))
}

fn capacity_solver() -> Check {
    let cfg = SolverConfig::default();
    let op8 = KernelOperator::new(TorusGrid::new(8).map_err(|e| e.to_string())?, KernelKind::Bessel)
        .map_err(|e| e.to_string())?;
    let empty = capacity(&op8, &RectUnion(vec![]), cfg).map_err(|e| e.to_string())?.value;
    ensure(empty == 0.0, || format!("empty set capacity {empty}"))?;
    let mut worst = 0.0f64;
    let cases: [&[(usize, usize)]; 5] = [
        &[(3, 4)],
        &[(0, 0), (0, 1)],
        &[(2, 2), (5, 6)],
        &[(1, 1), (1, 2), (2, 1)],
        &[(0, 7), (4, 3), (7, 0)],
    ];
    for cells in cases {
        let flat: Vec<usize> = cells.iter().map(|&(i, j)| i * 8 + j).collect();
        let oracle = capacity_oracle::brute_force(8, &flat);
        let v = capacity(&op8, &capacity_oracle::cell_rects(8, cells), cfg).map_err(|e| e.to_string())?.value;
        worst = worst.max(rel(v, oracle));
    }
    ensure(worst < 0.02, || format!("QP oracle gap {worst:e}"))?;

    let op32 = KernelOperator::new(TorusGrid::new(32).map_err(|e| e.to_string())?, KernelKind::Bessel)
        .map_err(|e| e.to_string())?;
    let cap = |e: &RectUnion| capacity(&op32, e, cfg).map(|r| r.value).map_err(|e| e.to_string());
    let tol = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rect = |rng: &mut ChaCha8Rng| -> Result<Rect, String> {
        let a = [rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
        let s = [rng.random_range(0.3..2.0), rng.random_range(0.3..2.0)];
        Rect::new(a, [a[0] + s[0], a[1] + s[1]]).map_err(|e| e.to_string())
    };
    for _ in 0..10 {
        let outer = rect(&mut rng)?;
        let s = outer.sides();
        let inner = Rect::new(outer.a(), [outer.a()[0] + 0.6 * s[0], outer.a()[1] + 0.6 * s[1]])
            .map_err(|e| e.to_string())?;
        let (ci, co) = (cap(&RectUnion(vec![inner]))?, cap(&RectUnion(vec![outer]))?);
        ensure(ci <= co * (1.0 + tol), || format!("monotonicity: {ci} > {co}"))?;
        let (e1, e2) = (RectUnion(vec![rect(&mut rng)?]), RectUnion(vec![rect(&mut rng)?]));
        let (c1, c2, cu) = (cap(&e1)?, cap(&e2)?, cap(&e1.union(&e2))?);
        ensure(cu <= (c1 + c2) * (1.0 + 2.0 * tol), || format!("subadditivity: {cu} > {c1} + {c2}"))?;
    }

    let quarter = RectUnion(vec![Rect::new([0.0, 0.0], [PI / 2.0, PI / 2.0]).map_err(|e| e.to_string())?]);
    let trend = [32, 64, 128]
        .into_iter()
        .map(|m| {
            let op = KernelOperator::new(TorusGrid::new(m).map_err(|e| e.to_string())?, KernelKind::Bessel)
                .map_err(|e| e.to_string())?;
            capacity(&op, &quarter, cfg).map(|r| r.value).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<f64>, String>>()?;
    ensure(trend.windows(2).all(|w| w[1] >= 0.95 * w[0]), || format!("refinement trend {trend:?}"))?;
    Ok(format!("oracle gap {worst:.1e}; 10 nested and union pairs hold; M = 32, 64, 128 -> {trend:.4?}"))
}

fn capacity_condition(scratch: &Path) -> Check {
    let (a, b) = (scratch.join("cc-a"), scratch.join("cc-b"));
    for d in [&a, &b] {
        let code = cli("capacity-condition", d)?;
        ensure(code == 0, || format!("exit {code}"))?;
    }
    ensure(read(&a.join("report.json"))? == read(&b.join("report.json"))?, || "reruns differ".into())?;
    let r = report(&a)?;
    ensure(r["config"]["dyadic"].is_object(), || "fixture is not a dyadic family".into())?;
    ensure(r["status"] == "finite-evidence", || format!("status {}", r["status"]))?;
    let ratios: Vec<f64> = r["result"]["families"]
        .as_array()
        .ok_or("no families")?
        .iter()
        .filter_map(|f| f["ratio"].as_f64())
        .collect();
    ensure(ratios.len() >= 3 && bounded_tail(&ratios), || format!("ratios {ratios:?}"))?;
    Ok(format!("ratios {ratios:.4?}; identical bytes for seed {}", r["seed"]))
}

fn determinism(scratch: &Path) -> Check {
    for (command, _) in COMMANDS {
        let (a, b) = (scratch.join("det-a").join(command), scratch.join("det-b").join(command));
        for d in [&a, &b] {
            let code = cli(command, d)?;
            ensure(code != 1, || format!("{command}: run failed"))?;
        }
        ensure(read(&a.join("report.json"))? == read(&b.join("report.json"))?, || {
            format!("{command}: report.json differs")
        })?;
    }
    Ok(format!("{} fixtures rerun byte-identical", COMMANDS.len()))
}

fn main() {
    let scratch = tempfile::tempdir().expect("temporary directory");
    let s = scratch.path();
    let criteria: Vec<Criterion> = vec![
        ("norm consistency", Duration::from_secs(30), Box::new(norm_consistency)),
        ("change-of-variables identity", Duration::from_secs(120), Box::new(change_of_variables)),
        ("separated norm expansion", Duration::from_secs(120), Box::new(norm_expansion)),
        ("counting-function exactness", Duration::MAX, Box::new(counting_exactness)),
        ("kernel-ratio criterion", Duration::MAX, Box::new(kernel_ratio)),
        ("psi admissibility", Duration::from_secs(10), Box::new(psi)),
        ("one-box check", Duration::from_secs(180), Box::new(|| one_box(s))),
        ("capacity solver", Duration::from_secs(300), Box::new(capacity_solver)),
        ("capacity-condition sweep", Duration::from_secs(300), Box::new(|| capacity_condition(s))),
        ("end-to-end determinism", Duration::MAX, Box::new(|| determinism(s))),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = outcome.and_then(|d| {
            if took > *budget {
                Err(format!("{d}; over the {} s budget", budget.as_secs()))
            } else {
                Ok(d)
            }
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} ({:.1} s): {detail}", i + 1, took.as_secs_f64());
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
