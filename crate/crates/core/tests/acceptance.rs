//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rieszcap::equilibrium::{assemble_kernel, capacity, solve_equilibrium, SolverOptions};
use rieszcap::geometry::{mean_width, ConvexBody, PointCloud, SampleMode};
use rieszcap::potential::{
    capacitary_function, decay_probe, extension_laplacian_residual, fractional_laplacian_via_extension,
    gaussian_half_laplacian_spectral, harmonic_extension, riesz_potential, ExtensionField, PoissonExtension,
};
use rieszcap::verify::{
    capacity_continuity_check, check_brunn_minkowski, check_level_set_convexity, check_quasi_concavity,
    conjecture_sweep, envelope_check, isoperimetric_ratio, isoperimetric_search, Constraint, FnField,
};

type Outcome = Result<String, String>;

fn disk() -> ConvexBody {
    ConvexBody::unit_ball(2)
}

fn square() -> ConvexBody {
    ConvexBody::cuboid(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
}

fn triangle() -> ConvexBody {
    ConvexBody::regular_polygon(3, 1.0, 0.0).unwrap()
}

fn ellipse() -> ConvexBody {
    ConvexBody::ellipsoid(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap()
}

fn ensure(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn equilibrium_certificate() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, body) in [("disk", disk()), ("square", square()), ("triangle", triangle())] {
        let t = Instant::now();
        let r = capacity(&body, 1.0, 500).map_err(err)?;
        let secs = t.elapsed().as_secs_f64();
        ok &= r.kkt_residual <= 1e-7 && r.plateau_deviation <= 0.02 && secs <= 30.0;
        lines.push(format!("{name}: kkt={:.1e} plateau={:.1e} {secs:.2}s", r.kkt_residual, r.plateau_deviation));
    }
    ensure(ok, lines.join("; "))
}

fn slope(rs: &[f64], caps: &[f64]) -> f64 {
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = caps.iter().map(|c| c.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn scaling_law() -> Outcome {
    let rs = [0.5, 1.0, 2.0, 4.0];
    let cases = [
        (square(), 0.5, 500),
        (square(), 1.0, 500),
        (square(), 1.5, 500),
        (ConvexBody::unit_ball(3), 1.0, 1500),
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (body, alpha, n) in cases {
        let caps = rs
            .iter()
            .map(|&r| capacity(&body.scaled(r), alpha, n).map(|c| c.capacity))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let expected = body.dim() as f64 - alpha;
        let s = slope(&rs, &caps);
        ok &= (s - expected).abs() <= 0.01 * expected;
        lines.push(format!("N={} alpha={alpha}: slope={s:.6}", body.dim()));
    }
    ensure(ok, lines.join("; "))
}

/// Minimum of `mᵀAm` over the simplex grid `{m : m_i ∈ δℕ, Σm = 1}`.
fn grid_minimum(a: &[Vec<f64>], steps: usize) -> f64 {
    fn recurse(a: &[Vec<f64>], steps: usize, i: usize, left: usize, m: &mut Vec<f64>, partial: f64, best: &mut f64) {
        let n = a.len();
        let delta = 1.0 / steps as f64;
        let choices: Vec<usize> = if i + 1 == n { vec![left] } else { (0..=left).collect() };
        for k in choices {
            let mi = k as f64 * delta;
            let cross: f64 = (0..i).map(|j| a[i][j] * m[j]).sum();
            let e = partial + mi * mi * a[i][i] + 2.0 * mi * cross;
            m[i] = mi;
            if i + 1 == n {
                if e < *best {
                    *best = e;
                }
            } else {
                recurse(a, steps, i + 1, left - k, m, e, best);
            }
        }
        m[i] = 0.0;
    }
    let mut best = f64::INFINITY;
    let mut m = vec![0.0; a.len()];
    recurse(a, steps, 0, steps, &mut m, 0.0, &mut best);
    best
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let steps = 50;
    let delta = 1.0 / steps as f64;
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut sizes = Vec::new();
    for _ in 0..20 {
        // The exhaustive grid has C(50 + n − 1, n − 1) nodes, so n stays small.
        let n = rng.random_range(2..=7);
        let alpha = [0.5, 1.0, 1.5][rng.random_range(0..3)];
        let mut pts: Vec<Vec<f64>> = Vec::new();
        while pts.len() < n {
            let p = vec![rng.random::<f64>(), rng.random::<f64>()];
            if pts.iter().all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() > 0.1) {
                pts.push(p);
            }
        }
        let cloud = Arc::new(PointCloud::new(2, pts, vec![0.05; n], SampleMode::Interior).map_err(err)?);
        let k = assemble_kernel(&cloud, alpha).map_err(err)?;
        let (_, res) = solve_equilibrium(&k, cloud, &SolverOptions::default()).map_err(err)?;
        let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| k.entries()[(i, j)]).collect()).collect();
        let e_grid = grid_minimum(&a, steps);
        // Rounding the optimum to the grid moves it by d with Σd = 0 and |d|₁ ≤ nδ;
        // the first-order term vanishes on the support, so the gap is at most max|A|·(nδ)².
        let amax = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = amax * (n as f64 * delta).powi(2);
        let gap = e_grid - res.energy;
        ok &= gap >= -1e-12 * res.energy && gap <= bound;
        worst = worst.max(gap / bound);
        sizes.push(n);
    }
    ensure(ok, format!("20 clouds, n in {sizes:?}, worst gap/bound = {worst:.3}"))
}

fn brunn_minkowski() -> Outcome {
    let lambdas = [0.25, 0.5, 0.75];
    let pairs = [("square-disk", square(), disk()), ("disk-triangle", disk(), triangle()), ("square-ellipse", square(), ellipse())];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, k0, k1) in pairs {
        let coarse = check_brunn_minkowski(&k0, &k1, 1.0, &lambdas, 500, 1e-2).map_err(err)?;
        let fine = check_brunn_minkowski(&k0, &k1, 1.0, &lambdas, 1000, 1e-2).map_err(err)?;
        let mut min_def = f64::INFINITY;
        let mut drift = 0.0f64;
        for (a, b) in coarse.records.iter().zip(&fine.records) {
            min_def = min_def.min(a.measured).min(b.measured);
            let (ca, cb) = (a.values["capacity_lambda"], b.values["capacity_lambda"]);
            drift = drift.max((ca - cb).abs() / cb);
        }
        ok &= coarse.pass && fine.pass && drift <= 0.01;
        lines.push(format!("{name}: min rel deficit={min_def:.4} drift={drift:.4}"));
    }
    let same = check_brunn_minkowski(&square(), &square(), 1.0, &lambdas, 500, 1e-2).map_err(err)?;
    let worst_same = same
        .records
        .iter()
        .map(|r| r.values["relative_deficit_power"].abs().max(r.values["relative_deficit_min"].abs()))
        .fold(0.0, f64::max);
    ok &= worst_same <= 1e-6;
    lines.push(format!("identical: {worst_same:.1e}"));
    ensure(ok, lines.join("; "))
}

fn level_set_convexity() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, body) in [("square", square()), ("triangle", triangle())] {
        let f = capacitary_function(&body, 1000).map_err(err)?;
        let r = check_level_set_convexity(&f, 10_000, 11, 1e-3).map_err(err)?;
        ok &= r.pass;
        lines.push(format!("{name}: worst={:.1e}", r.records[0].measured));
    }
    let bumps = FnField {
        dim: 2,
        f: |x: &[f64]| (-((x[0] - 2.0).powi(2) + x[1] * x[1])).exp() + (-((x[0] + 2.0).powi(2) + x[1] * x[1])).exp(),
    };
    let control = check_quasi_concavity(&bumps, &[0.0, 0.0], 4.0, 10_000, 11, 1e-3).map_err(err)?;
    let violations = control.records[0].values["violations"];
    ok &= !control.pass && violations > 0.0;
    lines.push(format!("two-bump violations={violations}"));
    ensure(ok, lines.join("; "))
}

fn envelope() -> Outcome {
    let r = envelope_check(&square(), &disk(), 0.5, &[0.3, 0.5, 0.7], 1000, 2e-2, 500, 5).map_err(err)?;
    let dom = r.record("domination").ok_or("missing domination record")?;
    let failures: f64 = r.records.iter().filter(|x| x.case.starts_with("inclusion")).map(|x| x.measured).sum();
    ensure(r.pass, format!("domination gap={:.2e}, inclusion failures={failures}", dom.measured))
}

fn decay_normalization() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, body) in [("disk", disk()), ("square", square())] {
        let f = capacitary_function(&body, 500).map_err(err)?;
        let cap = f.capacity_result().ok_or("no capacity")?.capacity;
        let r = 50.0 * body.diameter();
        let (_, scaled) = decay_probe(&f, &[r]).map_err(err)?[0];
        let rel = (scaled - cap).abs() / cap;
        ok &= rel <= 0.02;
        lines.push(format!("{name}: rel={rel:.1e}"));
    }
    ensure(ok, lines.join("; "))
}

fn extension_identities() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let field = capacitary_function(&disk(), 500).map_err(err)?;
    let ext = ExtensionField::new(&field).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let worst_trace = (0..1000)
        .map(|_| {
            let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            (harmonic_extension(&ext, &x, 0.0) - riesz_potential(&field, &x)).abs()
        })
        .fold(0.0, f64::max);
    ok &= worst_trace <= 1e-14;
    lines.push(format!("(a) trace gap={worst_trace:.1e}"));

    let mut min_order = f64::INFINITY;
    for (x, t) in [([2.0, 0.0], 0.5), ([0.0, 0.5], 0.5), ([1.5, 1.5], 0.3)] {
        let r1 = extension_laplacian_residual(&ext, &x, t, 0.1).abs();
        let r2 = extension_laplacian_residual(&ext, &x, t, 0.05).abs();
        min_order = min_order.min((r1 / r2).log2());
    }
    ok &= min_order >= 1.9;
    lines.push(format!("(b) order={min_order:.3}"));

    let gaussian = PoissonExtension::new(2, |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp()).map_err(err)?;
    let value = fractional_laplacian_via_extension(&gaussian, &[0.0, 0.0], &[0.2, 0.1, 0.05, 0.025]).map_err(err)?.value;
    let spectral = gaussian_half_laplacian_spectral(512, 16.0);
    let rel = (value - spectral).abs() / spectral;
    ok &= rel <= 0.02;
    lines.push(format!("(c) rel={rel:.1e}"));

    let mut worst = 0.0f64;
    for k in 0..100 {
        let theta = 2.0 * PI * k as f64 / 100.0;
        let r = 1.25 + 1.75 * ((k * 37) % 100) as f64 / 100.0;
        let x = [r * theta.cos(), r * theta.sin()];
        let d = fractional_laplacian_via_extension(&ext, &x, &[0.2, 0.1, 0.05, 0.025]).map_err(err)?;
        worst = worst.max(d.value.abs() / harmonic_extension(&ext, &x, 0.0));
    }
    ok &= worst <= 1e-2;
    lines.push(format!("(d) exterior derivative={worst:.1e}"));
    ensure(ok, lines.join("; "))
}

fn continuity() -> Outcome {
    let r = capacity_continuity_check(&disk(), &[0.2, 0.1, 0.05, 0.025], 1.0, 500, 1e-2).map_err(err)?;
    let lim = r.record("extrapolated limit").ok_or("missing limit")?;
    ensure(r.pass, format!("limit error={:.1e}", lim.measured))
}

fn isoperimetric() -> Outcome {
    let family = vec![
        ("disk".to_string(), disk()),
        ("square".to_string(), square()),
        ("ellipse".to_string(), ellipse()),
        ("triangle".to_string(), triangle()),
    ];
    let m = mean_width(&disk(), 4096).map_err(err)?;
    let r = isoperimetric_search(&family, 1.0, Constraint::MeanWidth(m), &[500, 1000]).map_err(err)?;
    let rank = r.record("ball ranks first with margin").ok_or("missing ranking")?;
    let mut ok = r.pass;
    let mut worst = 0.0f64;
    for (_, body) in &family {
        let a = isoperimetric_ratio(body, 1.0, 500).map_err(err)?;
        let b = isoperimetric_ratio(&body.scaled(3.0), 1.0, 500).map_err(err)?;
        worst = worst.max((a - b).abs() / a);
    }
    ok &= worst <= 0.01;
    ensure(
        ok,
        format!("margin={:.4} vs 3x scatter={:.4}; ratio drift under 3K={worst:.1e}", rank.measured, rank.threshold),
    )
}

fn conjecture_sweeps() -> Outcome {
    let r = conjecture_sweep(&square(), &disk(), &[0.5, 1.5], &[0.25, 0.5, 0.75], 500, 1e-2).map_err(err)?;
    let min_def = r.records.iter().map(|x| x.measured).fold(f64::INFINITY, f64::min);
    ensure(r.pass && r.exploratory, format!("min rel deficit={min_def:.4}, exploratory={}", r.exploratory))
}

fn main() {
    // The whole suite must fit in fifteen minutes.
    let budget = 900.0;
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("equilibrium certificate", equilibrium_certificate),
        ("scaling law", scaling_law),
        ("small-instance oracle", oracle_equivalence),
        ("brunn-minkowski", brunn_minkowski),
        ("level-set convexity", level_set_convexity),
        ("envelope", envelope),
        ("decay normalization", decay_normalization),
        ("extension identities", extension_identities),
        ("continuity", continuity),
        ("isoperimetric ranking", isoperimetric),
        ("conjecture sweeps", conjecture_sweeps),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {:>2} {name}: PASS ({msg}) [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({msg}) [{secs:.1}s]", i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance suite: {} of 11 passed in {total:.1}s (budget {budget:.0}s)", 11 - failed);
    if failed > 0 || total > budget {
        std::process::exit(1);
    }
}
