use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use super::output::{format_float, write_atomic};
use super::{
    BmArgs, CapacityArgs, Cli, Command, ContinuityArgs, EnvelopeArgs, ExtensionArgs, FraclapArgs, IsoperimetricArgs,
    LevelsetArgs, Point, PotentialArgs, SolverChoice, TestFunction,
};
use crate::equilibrium::{equilibrium, SolverKind, SolverOptions, MAX_DENSE_POINTS};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::potential::{
    capacitary_function, decay_probe, extension_laplacian_residual, fractional_laplacian_via_extension,
    gaussian_half_laplacian_spectral, harmonic_extension, riesz_potential, ExtensionField, PoissonExtension,
    PotentialField,
};
use crate::verify::{
    capacity_continuity_check, check_brunn_minkowski, check_level_set_convexity, check_quasi_concavity,
    conjecture_sweep, envelope_check, isoperimetric_search, Constraint, FnField, Record, Relation, VerificationReport,
};

pub(super) fn execute(cli: &Cli) -> Result<VerificationReport> {
    let seed = cli.common.seed;
    match &cli.command {
        Command::Capacity(a) => capacity_cmd(a),
        Command::Potential(a) => potential_cmd(a),
        Command::Extension(a) => extension_cmd(a),
        Command::Levelset(a) => levelset_cmd(a, seed),
        Command::Bm(a) => bm_cmd(a),
        Command::Envelope(a) => envelope_cmd(a, seed),
        Command::Continuity(a) => continuity_cmd(a),
        Command::Isoperimetric(a) => isoperimetric_cmd(a),
        Command::Fraclap(a) => fraclap_cmd(a),
    }
}

/// Reads a body from a JSON file, or parses `spec` itself when it is inline JSON.
pub(crate) fn load_body(spec: &str) -> Result<ConvexBody> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).map_err(|e| Error::BodySpec(format!("{spec}: {e}")))?
    };
    ConvexBody::from_json(&text).map_err(|e| match e {
        Error::BodySpec(msg) => Error::BodySpec(format!("{}: {msg}", label(spec))),
        other => other,
    })
}

fn label(spec: &str) -> &str {
    if spec.trim_start().starts_with('{') {
        "inline body"
    } else {
        spec
    }
}

fn check_alpha(alpha: f64, dim: usize) -> Result<()> {
    if alpha > 0.0 && alpha < dim as f64 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, {dim}) for bodies in R^{dim}, got {alpha}")))
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if (4..=MAX_DENSE_POINTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("resolution must lie in [4, {MAX_DENSE_POINTS}], got {n}")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

fn check_points(points: &[Point], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.0.len() != dim) {
        Some(p) => Err(Error::InvalidArgument(format!("point {:?} does not have {dim} coordinates", p.0))),
        None => Ok(()),
    }
}

fn check_decreasing(name: &str, values: &[f64], allow_zero: bool) -> Result<()> {
    let bad_sign = values.iter().any(|v| !(*v > 0.0 || (allow_zero && *v == 0.0)) || !v.is_finite());
    if values.is_empty() || bad_sign || values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!("{name} must be a nonempty, positive, strictly decreasing list")));
    }
    Ok(())
}

fn point_label(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn same_dim(a: &ConvexBody, b: &ConvexBody) -> Result<()> {
    if a.dim() == b.dim() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("bodies live in R^{} and R^{}", a.dim(), b.dim())))
    }
}

fn capacity_cmd(a: &CapacityArgs) -> Result<VerificationReport> {
    let body = load_body(&a.body)?;
    check_alpha(a.alpha, body.dim())?;
    check_resolution(a.resolution)?;
    check_positive("tolerance", a.tolerance)?;
    if let Some(p) = a.plateau_tol {
        check_positive("plateau-tol", p)?;
    }
    let options = SolverOptions {
        kind: match a.solver {
            SolverChoice::ActiveSet => SolverKind::ActiveSet,
            SolverChoice::FrankWolfe => SolverKind::FrankWolfe,
        },
        tolerance: a.tolerance,
        max_iterations: a.max_iterations,
    };
    let eq = equilibrium(&body, a.alpha, a.resolution, &options)?;
    let r = &eq.result;
    let mut report = VerificationReport::new(
        "capacity",
        json!({"body": body, "alpha": a.alpha, "resolution": a.resolution, "solver": options}),
    );
    report.push(
        Record::check("kkt_residual", r.kkt_residual, Relation::AtMost, options.tolerance)
            .with("capacity", r.capacity)
            .with("energy", r.energy)
            .with("plateau_deviation", r.plateau_deviation)
            .with("points", r.points as f64)
            .with("iterations", r.iterations as f64),
    );
    if let Some(p) = a.plateau_tol {
        report.push(Record::check("plateau_deviation", r.plateau_deviation, Relation::AtMost, p));
    }
    if let Some(path) = &a.measure_out {
        write_measure(path, &eq.measure)?;
    }
    Ok(report)
}

fn write_measure(path: &Path, measure: &crate::equilibrium::DiscreteMeasure) -> Result<()> {
    let cloud = measure.cloud();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..cloud.dim()).map(|k| format!("x{k}")).collect();
    header.extend(["weight".to_string(), "mass".to_string()]);
    w.write_record(&header).map_err(std::io::Error::from)?;
    for ((p, wt), m) in cloud.points().iter().zip(cloud.weights()).zip(measure.masses()) {
        let mut row: Vec<String> = p.iter().map(|v| format_float(*v)).collect();
        row.push(format_float(*wt));
        row.push(format_float(*m));
        w.write_record(&row).map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    write_atomic(path, &bytes)
}

/// Potential normalized by the energy, so that it equals 1 on the support.
fn normalized_field(body: &ConvexBody, alpha: f64, resolution: usize) -> Result<PotentialField> {
    if alpha == 1.0 {
        return capacitary_function(body, resolution);
    }
    let eq = equilibrium(body, alpha, resolution, &SolverOptions::default())?;
    Ok(PotentialField::new(Arc::new(eq.measure), alpha, 1.0 / eq.result.energy)?.with_capacity_result(eq.result))
}

fn potential_cmd(a: &PotentialArgs) -> Result<VerificationReport> {
    let body = load_body(&a.body)?;
    check_alpha(a.alpha, body.dim())?;
    check_resolution(a.resolution)?;
    check_points(&a.points, body.dim())?;
    check_positive("tol", a.tol)?;
    let diameter = body.diameter();
    let mut radii: Vec<f64> = a.radii.iter().copied().chain(a.diameters.iter().map(|m| m * diameter)).collect();
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("decay radii must be positive"));
    }
    if !radii.is_empty() && a.alpha != 1.0 {
        return Err(Error::invalid("decay radii need alpha = 1"));
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if let Some(r) = radii.first() {
        if *r <= 2.0 * diameter {
            return Err(Error::InvalidArgument(format!(
                "decay radius {r} must exceed twice the body diameter {diameter}"
            )));
        }
    }
    let field = normalized_field(&body, a.alpha, a.resolution)?;
    let cap = field.capacity_result().map(|r| r.capacity).unwrap_or(f64::NAN);
    let mut report = VerificationReport::new(
        "potential",
        json!({"body": body, "alpha": a.alpha, "resolution": a.resolution, "points": a.points, "radii": radii, "tol": a.tol}),
    );
    for p in &a.points {
        report.push(
            Record::check(format!("value at {}", point_label(&p.0)), field.value(&p.0), Relation::AtLeast, 0.0)
                .with("potential", field.potential(&p.0)),
        );
    }
    if !radii.is_empty() {
        for (r, scaled) in decay_probe(&field, &radii)? {
            let rel = (scaled - cap).abs() / cap;
            report.push(
                Record::check(format!("decay r={r}"), rel, Relation::AtMost, a.tol)
                    .with("radius", r)
                    .with("scaled_value", scaled)
                    .with("capacity", cap),
            );
        }
    }
    Ok(report)
}

fn extension_cmd(a: &ExtensionArgs) -> Result<VerificationReport> {
    let body = load_body(&a.body)?;
    check_alpha(1.0, body.dim())?;
    check_resolution(a.resolution)?;
    check_points(&a.points, body.dim())?;
    if a.heights.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("heights must be nonnegative"));
    }
    if !a.fd_steps.is_empty() {
        check_decreasing("fd-steps", &a.fd_steps, false)?;
        if a.fd_steps.len() < 2 {
            return Err(Error::invalid("fd-steps needs at least two steps"));
        }
    }
    let field = capacitary_function(&body, a.resolution)?;
    let ext = ExtensionField::new(&field)?;
    let mut report = VerificationReport::new(
        "extension",
        json!({
            "body": body, "resolution": a.resolution, "points": a.points, "heights": a.heights,
            "fd_steps": a.fd_steps, "fd_order": a.fd_order, "tol": a.tol,
        }),
    );
    for p in &a.points {
        let x = &p.0;
        let gap = (harmonic_extension(&ext, x, 0.0) - riesz_potential(&field, x)).abs();
        let mut rec = Record::check(format!("trace at {}", point_label(x)), gap, Relation::AtMost, a.tol);
        for &t in &a.heights {
            rec = rec.with(&format!("U(t={t})"), harmonic_extension(&ext, x, t));
        }
        report.push(rec);
        if a.fd_steps.is_empty() {
            continue;
        }
        for &t in a.heights.iter().filter(|t| **t > 0.0) {
            let residuals: Vec<f64> =
                a.fd_steps.iter().map(|&h| extension_laplacian_residual(&ext, x, t, h).abs()).collect();
            let n = residuals.len();
            let order = (residuals[n - 2] / residuals[n - 1]).ln() / (a.fd_steps[n - 2] / a.fd_steps[n - 1]).ln();
            let mut rec = Record::check(
                format!("laplacian order at {} t={t}", point_label(x)),
                order,
                Relation::AtLeast,
                a.fd_order,
            );
            for (h, r) in a.fd_steps.iter().zip(&residuals) {
                rec = rec.with(&format!("residual(h={h})"), *r);
            }
            report.push(rec);
        }
    }
    Ok(report)
}

fn levelset_cmd(a: &LevelsetArgs, seed: u64) -> Result<VerificationReport> {
    check_resolution(a.resolution)?;
    if a.segments < 1000 {
        return Err(Error::InvalidArgument(format!("segments must be at least 1000, got {}", a.segments)));
    }
    check_positive("tol", a.tol)?;
    let mut report = match &a.body {
        Some(spec) => {
            let body = load_body(spec)?;
            check_alpha(1.0, body.dim())?;
            let field = capacitary_function(&body, a.resolution)?;
            let mut r = check_level_set_convexity(&field, a.segments, seed, a.tol)?;
            r.parameters["body"] = json!(body);
            r.parameters["resolution"] = json!(a.resolution);
            r
        }
        None => {
            let bumps = FnField {
                dim: 2,
                f: |x: &[f64]| {
                    (-((x[0] - 2.0).powi(2) + x[1] * x[1])).exp() + (-((x[0] + 2.0).powi(2) + x[1] * x[1])).exp()
                },
            };
            let mut r = check_quasi_concavity(&bumps, &[0.0, 0.0], 4.0, a.segments, seed, a.tol)?;
            r.harness = "levelset".into();
            r.parameters["function"] = json!("two_bump");
            r
        }
    };
    report.parameters["seed"] = json!(seed);
    Ok(report)
}

fn bm_cmd(a: &BmArgs) -> Result<VerificationReport> {
    let k0 = load_body(&a.k0)?;
    let k1 = load_body(&a.k1)?;
    same_dim(&k0, &k1)?;
    check_resolution(a.resolution)?;
    check_positive("tol", a.tol)?;
    if a.lambdas.is_empty() || a.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::invalid("lambdas must be a nonempty list in [0, 1]"));
    }
    match (&a.alphas, a.alpha) {
        (Some(alphas), _) => {
            for &alpha in alphas {
                check_alpha(alpha, k0.dim())?;
            }
            conjecture_sweep(&k0, &k1, alphas, &a.lambdas, a.resolution, a.tol)
        }
        (None, Some(alpha)) => {
            check_alpha(alpha, k0.dim())?;
            check_brunn_minkowski(&k0, &k1, alpha, &a.lambdas, a.resolution, a.tol)
        }
        (None, None) => Err(Error::invalid("either --alpha or --alphas is required")),
    }
}

fn envelope_cmd(a: &EnvelopeArgs, seed: u64) -> Result<VerificationReport> {
    let k0 = load_body(&a.k0)?;
    let k1 = load_body(&a.k1)?;
    same_dim(&k0, &k1)?;
    check_alpha(1.0, k0.dim())?;
    check_resolution(a.resolution)?;
    if !(a.lambda > 0.0 && a.lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1), got {}", a.lambda)));
    }
    if a.samples == 0 || a.levels.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::invalid("samples and levels must be positive"));
    }
    check_positive("tol", a.tol)?;
    envelope_check(&k0, &k1, a.lambda, &a.levels, a.samples, a.tol, a.resolution, seed)
}

fn continuity_cmd(a: &ContinuityArgs) -> Result<VerificationReport> {
    let body = load_body(&a.body)?;
    check_alpha(a.alpha, body.dim())?;
    check_resolution(a.resolution)?;
    check_decreasing("epsilons", &a.epsilons, true)?;
    if a.epsilons.len() < 2 {
        return Err(Error::invalid("epsilons needs at least two values"));
    }
    check_positive("tol", a.tol)?;
    capacity_continuity_check(&body, &a.epsilons, a.alpha, a.resolution, a.tol)
}

fn isoperimetric_cmd(a: &IsoperimetricArgs) -> Result<VerificationReport> {
    let mut family = Vec::with_capacity(a.bodies.len());
    for (i, entry) in a.bodies.iter().enumerate() {
        let (name, spec) = match entry.split_once('=') {
            Some((n, s)) if !entry.trim_start().starts_with('{') => (n.to_string(), s),
            _ => {
                let stem = if entry.trim_start().starts_with('{') {
                    None
                } else {
                    Path::new(entry).file_stem().map(|s| s.to_string_lossy().into_owned())
                };
                (stem.unwrap_or_else(|| format!("body{i}")), entry.as_str())
            }
        };
        family.push((name, load_body(spec)?));
    }
    let dim = family[0].1.dim();
    for (_, b) in &family {
        same_dim(&family[0].1, b)?;
    }
    check_alpha(a.alpha, dim)?;
    if a.resolutions.is_empty() {
        return Err(Error::invalid("resolutions must be nonempty"));
    }
    for &n in &a.resolutions {
        check_resolution(n)?;
    }
    let constraint = match (a.mean_width, a.perimeter) {
        (Some(c), None) => Constraint::MeanWidth(c),
        (None, Some(p)) => Constraint::Perimeter(p),
        _ => return Err(Error::invalid("give exactly one of --mean-width and --perimeter")),
    };
    let value = match constraint {
        Constraint::MeanWidth(c) | Constraint::Perimeter(c) => c,
    };
    check_positive("constraint value", value)?;
    if matches!(constraint, Constraint::Perimeter(_)) && dim != 2 {
        return Err(Error::UnsupportedDimension { dim, what: "perimeter constraint is planar" });
    }
    isoperimetric_search(&family, a.alpha, constraint, &a.resolutions)
}

fn fraclap_cmd(a: &FraclapArgs) -> Result<VerificationReport> {
    check_decreasing("steps", &a.steps, false)?;
    check_positive("tol", a.tol)?;
    match (&a.function, &a.body) {
        (Some(TestFunction::Gaussian), None) => {
            let origin = vec![0.0, 0.0];
            if a.points.iter().any(|p| p.0 != origin) {
                return Err(Error::invalid("the Gaussian oracle is available at the origin only"));
            }
            let gaussian = PoissonExtension::new(2, |x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp())?;
            let res = fractional_laplacian_via_extension(&gaussian, &origin, &a.steps)?;
            let spectral = gaussian_half_laplacian_spectral(512, 16.0);
            let rel = (res.value - spectral).abs() / spectral.abs();
            let mut report =
                VerificationReport::new("fraclap", json!({"function": "gaussian", "steps": a.steps, "tol": a.tol}));
            report.push(
                Record::check("gaussian at (0, 0)", rel, Relation::AtMost, a.tol)
                    .with("value", res.value)
                    .with("raw_limit", res.raw_limit)
                    .with("spectral", spectral)
                    .with("sign", res.calibration.sign),
            );
            Ok(report)
        }
        (None, Some(spec)) => {
            let body = load_body(spec)?;
            check_alpha(1.0, body.dim())?;
            check_resolution(a.resolution)?;
            if a.points.is_empty() {
                return Err(Error::invalid("at least one --point is required with --body"));
            }
            check_points(&a.points, body.dim())?;
            let field = capacitary_function(&body, a.resolution)?;
            let ext = ExtensionField::new(&field)?;
            let mut report = VerificationReport::new(
                "fraclap",
                json!({"body": body, "resolution": a.resolution, "points": a.points, "steps": a.steps, "tol": a.tol}),
            );
            for p in &a.points {
                let x = &p.0;
                let res = fractional_laplacian_via_extension(&ext, x, &a.steps)?;
                let base = harmonic_extension(&ext, x, 0.0);
                let rec = if field.in_body(x) {
                    Record::check(format!("inside at {}", point_label(x)), res.value, Relation::AtLeast, 0.0)
                } else {
                    let rel = res.value.abs() / base;
                    Record::check(format!("outside at {}", point_label(x)), rel, Relation::AtMost, a.tol)
                };
                report.push(rec.with("value", res.value).with("raw_limit", res.raw_limit).with("trace", base));
            }
            Ok(report)
        }
        _ => Err(Error::invalid("give exactly one of --function and --body")),
    }
}
