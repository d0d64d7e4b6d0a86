//! Command dispatch: every experiment reads an [`ExperimentConfig`], runs its
//! embedded checks and returns a manifest together with a human summary and
//! a JSON report. Artifacts go to the `out` key, the manifest to `manifest`.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::burgers::{burgers_stencil, slope_identities};
use crate::config::ExperimentConfig;
use crate::enumerate::{count_lht, count_lht_int, enumerate_lht, EnumerationSpec};
use crate::error::{Error, Result};
use crate::gff::{covariance_contour, covariance_green, CovarianceSpec};
use crate::limit::{density_at_s, double_root_point, frozen_boundary, moment_my, FrozenCurve};
use crate::manifest::{emit, write_atomic, Check, Csv, RunManifest};
use crate::mcmc::{sample_exact_batch, sample_mcmc, McmcOptions, MoveKind, SampleBatch};
use crate::measure::{build_transforms, BaseMeasure, TransformPack};
use crate::partition::{Partition, SkewShape};
use crate::paths::{paths_to_tableau, tableau_to_paths, PathConfig};
use crate::poly::rat;
use crate::schur::{branching_sides, gap, lht_poly_eval, schur_constant, schur_eval, schur_principal, sgf_moment, SgfProbe};
use crate::svg::{render_svg, Artifact};
use crate::tableau::LectureHallTableau;

pub const SAMPLES_SCHEMA: &str = "hallscope/samples/v1";
pub const FROZEN_SCHEMA: &str = "hallscope/frozen/v1";

/// Largest instance `enumerate` will materialise.
pub const ENUMERATION_LIMIT: u64 = 100_000;

/// Result of one run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub human: String,
    pub json: Value,
}

/// Runs the configured command, writes its artifacts and, when the
/// `manifest` key is set, the manifest.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let command = config.command()?.to_string();
    let mut manifest = RunManifest::new(&command, config.hash());
    let mut human = String::new();
    let json = match command.as_str() {
        "count" => count(config, &mut manifest, &mut human)?,
        "enumerate" => enumerate(config, &mut manifest, &mut human)?,
        "sample" => sample(config, &mut manifest, &mut human)?,
        "identity-check" => identity_check(config, &mut manifest, &mut human)?,
        "frozen" => frozen(config, &mut manifest, &mut human)?,
        "limit-shape" => limit_shape(config, &mut manifest, &mut human)?,
        "burgers" => burgers(config, &mut manifest, &mut human)?,
        "gff-cov" => gff_cov(config, &mut manifest, &mut human)?,
        "render" => render(config, &mut manifest, &mut human)?,
        other => return Err(Error::Argument(format!("unknown command {other:?}"))),
    };
    for c in &manifest.checks {
        let _ = writeln!(human, "check {}: {}", c.name, if c.passed { "pass" } else { "FAIL" });
    }
    if let Some(path) = config.get("manifest") {
        write_atomic(Path::new(path), manifest.to_json().as_bytes())?;
    }
    let json = json!({ "command": command, "result": json, "manifest": manifest });
    Ok(RunOutput { manifest, human, json })
}

fn spec_of(config: &ExperimentConfig) -> Result<EnumerationSpec> {
    let mut spec = EnumerationSpec::new(config.partition("lambda")?, config.u32_req("n")?, config.u32_req("t")?);
    if let Some(w) = config.rationals("weights")? {
        spec = spec.with_weights(w);
    }
    spec.check()?;
    Ok(spec)
}

fn pack_of(config: &ExperimentConfig, default: &str) -> Result<TransformPack> {
    let m = match config.get("measure") {
        Some(_) => config.measure()?,
        None => default.parse::<BaseMeasure>()?,
    };
    build_transforms(&m)
}

/// Writes `bytes` to the `out` path when one is configured.
fn emit_out(config: &ExperimentConfig, manifest: &mut RunManifest, bytes: &[u8]) -> Result<()> {
    if let Some(path) = config.get("out") {
        emit(manifest, path, bytes)?;
    }
    Ok(())
}

fn format_or<'a>(config: &'a ExperimentConfig, default: &'a str) -> &'a str {
    config.get("format").unwrap_or(default)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialises");
    s.push('\n');
    s
}

fn count(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let spec = spec_of(config)?;
    let value = count_lht(&spec)?;
    let lambda = spec.lambda.trimmed();
    if spec.weights.is_none() {
        let t = BigRational::from_integer(BigInt::from(spec.t));
        let closed = Pow::pow(&t, lambda.size() as u32) * schur_principal(&lambda, spec.n)?;
        manifest.push_check(Check::exact(
            "count-equals-principal-specialization",
            value == closed,
            format!("dp {value}, closed form {closed}"),
        ));
    } else if count_lht_int(&spec)? <= BigInt::from(ENUMERATION_LIMIT) {
        let w = spec.weights.clone().unwrap_or_default();
        let poly = lht_poly_eval(&SkewShape::straight(lambda.clone()), spec.n, &w)?;
        manifest.push_check(Check::exact(
            "weighted-count-equals-polynomial",
            value == poly,
            format!("dp {value}, polynomial {poly}"),
        ));
    }
    let _ = writeln!(human, "{value}");
    let out = json!({ "lambda": lambda.parts(), "n": spec.n, "t": spec.t, "count": value.to_string() });
    emit_out(config, manifest, pretty(&out).as_bytes())?;
    Ok(out)
}

fn enumerate(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let spec = spec_of(config)?;
    let expected = count_lht_int(&spec)?;
    let size = expected.to_u64().unwrap_or(u64::MAX);
    if size > ENUMERATION_LIMIT {
        return Err(Error::Capacity { what: "enumeration", size: size.min(usize::MAX as u64) as usize, limit: ENUMERATION_LIMIT as usize });
    }
    let all = enumerate_lht(&spec)?;
    manifest.push_check(Check::exact(
        "enumeration-matches-count",
        BigInt::from(all.len()) == expected,
        format!("{} listed, {expected} counted", all.len()),
    ));
    let mut invalid = 0usize;
    let mut broken = 0usize;
    for l in &all {
        if !l.validate()? {
            invalid += 1;
        }
        let back = tableau_to_paths(l).and_then(|p| paths_to_tableau(&p));
        if back.ok().as_ref() != Some(l) {
            broken += 1;
        }
    }
    manifest.push_check(Check::exact("all-tableaux-valid", invalid == 0, format!("{invalid} invalid")));
    manifest.push_check(Check::exact("bijection-round-trip", broken == 0, format!("{broken} failures")));
    let _ = writeln!(human, "{} tableaux", all.len());
    for l in all.iter().take(20) {
        let _ = writeln!(human, "  {:?}", l.rows());
    }
    if all.len() > 20 {
        let _ = writeln!(human, "  ...");
    }
    let out = json!({
        "count": all.len(),
        "tableaux": all.iter().map(LectureHallTableau::to_json).collect::<Vec<_>>(),
    });
    emit_out(config, manifest, pretty(&out).as_bytes())?;
    Ok(json!({ "count": all.len() }))
}

/// Draws the configured batch: exact by default, MCMC on request.
pub fn draw_batch(config: &ExperimentConfig) -> Result<SampleBatch> {
    let spec = spec_of(config)?;
    let samples = config.u64_or("samples", 1)? as usize;
    let seed = config.u64_or("seed", 0)?;
    match config.get("method").unwrap_or("exact") {
        "mcmc" => {
            let chains = config.u64_or("chains", 1)?.max(1) as usize;
            let opts = McmcOptions {
                kind: match config.get("moves").unwrap_or("heat-bath") {
                    "flip" => MoveKind::Flip,
                    _ => MoveKind::HeatBath,
                },
                chains,
                burn_in: 0,
                thin: config.u64_or("thin", 10)?.max(1),
                samples_per_chain: samples.div_ceil(chains),
            };
            let mut batch = sample_mcmc(&spec, config.u64_or("burn_in", 1000)?, seed, &opts)?;
            batch.samples.truncate(samples);
            Ok(batch)
        }
        _ => sample_exact_batch(&spec, samples, seed),
    }
}

fn sample(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let batch = draw_batch(config)?;
    let mut invalid = 0usize;
    for l in &batch.samples {
        if !l.validate()? {
            invalid += 1;
        }
    }
    manifest.push_check(Check::exact("samples-valid", invalid == 0, format!("{invalid} invalid of {}", batch.samples.len())));
    let _ = writeln!(human, "{} samples ({:?}), acceptance rate {:.3}", batch.samples.len(), batch.method, batch.diagnostics.acceptance_rate);
    for w in &batch.diagnostics.warnings {
        let _ = writeln!(human, "warning: {w}");
    }
    let out = samples_json(&batch);
    let bytes = match format_or(config, "json") {
        "svg" => {
            let first = batch.samples.first().ok_or_else(|| Error::Argument("no samples to render".into()))?;
            render_svg(Artifact::Paths(&tableau_to_paths(first)?))
        }
        _ => pretty(&out),
    };
    emit_out(config, manifest, bytes.as_bytes())?;
    Ok(json!({ "samples": batch.samples.len(), "diagnostics": batch.diagnostics }))
}

pub fn samples_json(batch: &SampleBatch) -> Value {
    json!({
        "schema": SAMPLES_SCHEMA,
        "seed": batch.seed,
        "method": batch.method,
        "diagnostics": batch.diagnostics,
        "samples": batch.samples.iter().map(LectureHallTableau::to_json).collect::<Vec<_>>(),
    })
}

/// Probe point `(1/2, 1/3, ..., 1/(n+1))`.
fn probe_point(n: u32) -> Vec<BigRational> {
    (0..n).map(|i| BigRational::new(BigInt::from(1), BigInt::from(i + 2))).collect()
}

/// Exact law of `λ^(κ)` under the configured weights, by enumeration.
fn level_law(spec: &EnumerationSpec, all: &[LectureHallTableau], kappa: u32) -> Result<Vec<(Partition, BigRational)>> {
    let mut law: std::collections::BTreeMap<Vec<u32>, BigRational> = Default::default();
    let mut total = BigRational::zero();
    for l in all {
        let w = l.floor()?.values().fold(BigRational::one(), |acc, &f| acc * spec.weight(f as u64));
        total += &w;
        *law.entry(l.level(kappa)?.parts().to_vec()).or_insert_with(BigRational::zero) += w;
    }
    law.into_iter().map(|(p, w)| Ok((Partition::new(p)?, w / &total))).collect()
}

fn identity_check(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let spec = spec_of(config)?;
    let which = config.get("which").unwrap_or("all");
    let weights: Vec<BigRational> = match &spec.weights {
        Some(w) => w.clone(),
        None => vec![BigRational::one(); spec.t as usize],
    };
    let b = probe_point(spec.n);
    let mut report = serde_json::Map::new();
    if matches!(which, "all" | "branching") {
        // distinct variables make the check sharper than all-ones
        let a: Vec<BigRational> = match &spec.weights {
            Some(w) => w.clone(),
            None => (1..=spec.t as i64).map(rat).collect(),
        };
        let (lhs, rhs) = branching_sides(&spec.lambda, &a, &b)?;
        manifest.push_check(Check::exact("branching", lhs == rhs, format!("{lhs} vs {rhs}")));
        let _ = writeln!(human, "branching: {lhs} = {rhs}");
        report.insert("branching".into(), json!({ "lhs": lhs.to_string(), "rhs": rhs.to_string() }));
    }
    if matches!(which, "all" | "level-sgf" | "moment") {
        if count_lht_int(&spec)? > BigInt::from(ENUMERATION_LIMIT) {
            return Err(Error::Capacity { what: "level law", size: usize::MAX, limit: ENUMERATION_LIMIT as usize });
        }
        let all = enumerate_lht(&spec)?;
        let kappas: Vec<u32> = match config.get("kappa") {
            Some(_) => vec![config.u32_req("kappa")?],
            None => (1..spec.t).collect(),
        };
        let full = weights.iter().fold(BigRational::zero(), |s, x| s + x);
        let lam = spec.lambda.padded(spec.n as usize)?;
        let shifted = |base: &BigRational| b.iter().map(|x| x + base).collect::<Vec<_>>();
        for kappa in kappas {
            if kappa >= spec.t {
                return Err(Error::Argument(format!("kappa = {kappa} must be below t = {}", spec.t)));
            }
            let law = level_law(&spec, &all, kappa)?;
            let base = weights[kappa as usize..].iter().fold(BigRational::zero(), |s, x| s + x);
            if matches!(which, "all" | "level-sgf") {
                let mut lhs = BigRational::zero();
                for (mu, p) in &law {
                    lhs += p * schur_eval(mu, &shifted(&base)) / schur_constant(mu, spec.n, &base)?;
                }
                let rhs = schur_eval(&lam, &shifted(&full)) / schur_constant(&lam, spec.n, &full)?;
                manifest.push_check(Check::exact(&format!("level-sgf-kappa-{kappa}"), lhs == rhs, format!("{lhs} vs {rhs}")));
                let _ = writeln!(human, "level sgf at kappa {kappa}: {lhs} = {rhs}");
            }
            if matches!(which, "all" | "moment") {
                let probe = SgfProbe::new(spec.n, base, law)?;
                for j in 0..=3 {
                    for m in 1..=2 {
                        let (op, direct) = sgf_moment(&probe, j, m)?;
                        let g = gap(&op, &direct);
                        manifest.push_check(Check::within(&format!("moment-kappa-{kappa}-j{j}-m{m}"), g, 1e-6));
                        let _ = writeln!(human, "moment kappa {kappa} j {j} m {m}: operator {op}, direct {direct}");
                        report.insert(format!("moment-{kappa}-{j}-{m}"), json!({ "operator": op.to_string(), "direct": direct.to_string() }));
                    }
                }
            }
        }
    }
    Ok(Value::Object(report))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn frozen(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let pack = pack_of(config, "staircase:p=3")?;
    let schedule = config.schedule()?;
    let tol = config.f64_or("tolerance", 1e-8)?;
    let zs = linspace(config.f64_or("z_min", 1.0)?, config.f64_or("z_max", 3.0)?, config.u64_or("grid", 201)? as usize);
    let curve = frozen_boundary(&pack, &schedule, &zs)?;
    let residual = curve.samples.iter().flatten().fold(0.0f64, |m, s| m.max(s.residual));
    manifest.push_check(Check::within("double-root-residual", residual, tol));
    if let BaseMeasure::Staircase { p } = pack.measure {
        // the closed form against the solver built on the numerical inverse
        let mut worst = 0.0f64;
        for &z in &zs {
            let (chi, s) = double_root_point(z, &pack)?;
            let (cchi, cs) = crate::limit::double_root_staircase(z, p)?;
            worst = worst.max((chi - cchi).abs()).max((s - cs).abs());
        }
        manifest.push_check(Check::within("general-solver-matches-closed-form", worst, tol));
        let _ = writeln!(human, "general solver vs closed form: max gap {worst:.3e}");
    }
    let gaps = curve.samples.iter().filter(|s| s.is_none()).count();
    let _ = writeln!(human, "{} samples, {gaps} gaps, max residual {residual:.3e}", curve.samples.len());
    let bytes = match format_or(config, "csv") {
        "svg" => render_svg(Artifact::Frozen(&curve)),
        "json" => pretty(&json!({ "schema": FROZEN_SCHEMA, "curve": curve })),
        _ => {
            let mut csv = Csv::new(&["z", "chi", "s", "y", "residual"]);
            for s in curve.samples.iter().flatten() {
                csv.row(&[s.z, s.chi, s.s, s.y, s.residual].map(|v| format!("{v:.12e}")));
            }
            csv.finish()
        }
    };
    emit_out(config, manifest, bytes.as_bytes())?;
    Ok(json!({ "samples": curve.samples.len(), "gaps": gaps, "max_residual": residual }))
}

fn limit_shape(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let pack = pack_of(config, "staircase:p=3")?;
    let s = config.f64_or("s", 0.5)?;
    let jmax = config.u32_or("j", 4)?;
    let tol = config.f64_or("tolerance", 1e-9)?;
    let mut moments = Vec::new();
    for j in 0..=jmax {
        let m = moment_my(j, s, &pack)?;
        manifest.push_check(Check::within(&format!("moment-{j}-contour-vs-residue"), m.gap(), tol));
        let _ = writeln!(human, "j = {j}: contour {:.12}, residue {:.12}", m.contour, m.residue);
        moments.push(m);
    }
    if let Some(m0) = moments.first() {
        manifest.push_check(Check::within("moment-0-is-one", (m0.residue - 1.0).abs(), 1e-12));
    }
    // density on a grid padded around the support; midpoint mass as a coarse check
    let grid = config.u64_or("grid", 2001)?.max(2) as usize;
    let (a, b) = (pack.measure.support_min() - 0.5, pack.measure.support_max() + 0.5);
    let h = (b - a) / grid as f64;
    let mut csv = Csv::new(&["chi", "density"]);
    let mut mass = 0.0;
    for k in 0..grid {
        let x = a + (k as f64 + 0.5) * h;
        let d = density_at_s(x, s, &pack)?;
        mass += d * h;
        csv.row(&[format!("{x:.12e}"), format!("{d:.12e}")]);
    }
    manifest.push_check(Check::within("density-mass", (mass - 1.0).abs(), 5e-3));
    let _ = writeln!(human, "density mass {mass:.6}");
    emit_out(config, manifest, csv.finish().as_bytes())?;
    Ok(json!({ "s": s, "moments": moments, "mass": mass }))
}

/// Residual below which a Burgers stencil counts as converged.
pub const BURGERS_TARGET: f64 = 1e-5;

fn burgers(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let pack = pack_of(config, "staircase:p=3")?;
    let schedule = config.schedule()?;
    let h = config.f64_or("step", 2e-3)?;
    let want = config.u64_or("grid", 12)? as usize;
    let (lo, hi) = (pack.measure.support_min(), pack.measure.support_max());
    let mut candidates = Vec::new();
    for y in linspace(0.1, 0.9, 9) {
        for chi in linspace(lo, hi, 41) {
            match burgers_stencil(chi, y, 2.0 * h, &schedule, &pack) {
                Ok(_) => candidates.push((chi, y)),
                Err(Error::Margin(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let stride = (candidates.len() / want.max(1)).max(1);
    let points: Vec<(f64, f64)> = candidates.iter().step_by(stride).take(want).copied().collect();
    let mut rows = Csv::new(&["chi", "y", "step", "residual_h", "residual_h2", "ratio", "linear", "arg_sum"]);
    let (mut worst_res, mut worst_ratio, mut worst_id) = (0.0f64, 0.0f64, 0.0f64);
    let mut report = Vec::new();
    for &(chi, y) in &points {
        // halve until the residual has converged below the target
        let mut coarse = burgers_stencil(chi, y, h, &schedule, &pack)?;
        let mut fine = burgers_stencil(chi, y, 0.5 * h, &schedule, &pack)?;
        while fine.residual >= BURGERS_TARGET && fine.step > h / 1024.0 {
            coarse = fine;
            fine = burgers_stencil(chi, y, 0.5 * coarse.step, &schedule, &pack)?;
        }
        let ratio = coarse.residual / fine.residual;
        let ids = slope_identities(chi, y, &schedule, &pack)?
            .ok_or_else(|| Error::Consistency(format!("({chi}, {y}) passed the margin test but is frozen")))?;
        worst_res = worst_res.max(fine.residual);
        worst_ratio = worst_ratio.max((ratio / 4.0 - 1.0).abs());
        worst_id = worst_id.max(ids.linear).max(ids.arg_sum);
        rows.row(&[chi, y, coarse.step, coarse.residual, fine.residual, ratio, ids.linear, ids.arg_sum].map(|v| format!("{v:.6e}")));
        let _ = writeln!(
            human,
            "({chi:.4}, {y:.2}): step {:.2e}, residual {:.3e} -> {:.3e}, ratio {ratio:.3}",
            coarse.step, coarse.residual, fine.residual
        );
        report.push(json!({ "chi": chi, "y": y, "step": coarse.step, "residual": [coarse.residual, fine.residual], "ratio": ratio }));
    }
    manifest.push_check(Check::exact("interior-points", points.len() >= 10, format!("{} liquid points", points.len())));
    manifest.push_check(Check::within("residual-at-fine-step", worst_res, BURGERS_TARGET));
    manifest.push_check(Check::within("second-order-ratio", worst_ratio, 0.3));
    manifest.push_check(Check::within("slope-identities", worst_id, 1e-9));
    emit_out(config, manifest, rows.finish().as_bytes())?;
    Ok(json!({ "step": h, "points": report }))
}

fn gff_cov(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let pack = pack_of(config, "staircase:p=2")?;
    let spec = CovarianceSpec::new(
        config.u32_or("k1", 1)?,
        config.u32_or("k2", 1)?,
        config.f64_or("s1", 0.5)?,
        config.f64_or("s2", 0.5)?,
    );
    spec.check()?;
    let tol = config.f64_or("tolerance", 1e-6)?;
    let contour = covariance_contour(&spec, &pack)?;
    let green = covariance_green(&spec, &pack)?;
    let g = (contour.value - green.value).abs();
    manifest.push_check(Check::within("contour-vs-green", g, tol));
    if spec.k1 == spec.k2 && spec.s1 == spec.s2 {
        manifest.push_check(Check::exact("variance-nonnegative", contour.value >= -tol, format!("{}", contour.value)));
    }
    let _ = writeln!(human, "contour {:.12}, green {:.12}, gap {g:.3e}", contour.value, green.value);
    let out = json!({ "spec": spec, "contour": contour, "green": green });
    emit_out(config, manifest, pretty(&out).as_bytes())?;
    Ok(out)
}

/// Reads a JSON artifact and draws it; the kind is taken from its schema.
fn render(config: &ExperimentConfig, manifest: &mut RunManifest, human: &mut String) -> Result<Value> {
    let input = config.get("input").ok_or_else(|| Error::Argument("render needs an input file".into()))?;
    let v: Value = serde_json::from_slice(&std::fs::read(input)?)?;
    let schema = v.get("schema").and_then(Value::as_str).unwrap_or_default().to_string();
    let paths = |v: &Value| -> Result<PathConfig> { tableau_to_paths(&LectureHallTableau::from_json(v)?) };
    let svg = match schema.as_str() {
        crate::tableau::TABLEAU_SCHEMA => render_svg(Artifact::Paths(&paths(&v)?)),
        crate::paths::PATHS_SCHEMA => render_svg(Artifact::Paths(&PathConfig::from_json(&v)?)),
        SAMPLES_SCHEMA => {
            let first = v["samples"].get(0).ok_or_else(|| Error::Argument("sample file is empty".into()))?;
            render_svg(Artifact::Paths(&paths(first)?))
        }
        FROZEN_SCHEMA => {
            let curve: FrozenCurve = serde_json::from_value(v["curve"].clone())?;
            render_svg(Artifact::Frozen(&curve))
        }
        other => return Err(Error::Argument(format!("cannot render schema {other:?}"))),
    };
    let _ = writeln!(human, "rendered {schema} ({} bytes)", svg.len());
    emit_out(config, manifest, svg.as_bytes())?;
    if config.get("out").is_none() {
        human.push_str(&svg);
    }
    Ok(json!({ "schema": schema, "bytes": svg.len() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn count_reports_81() {
        let out = run(&cfg("command = count\nlambda = 2,2\nn = 2\nt = 3\n")).unwrap();
        assert_eq!(out.human.lines().next(), Some("81"));
        assert!(out.manifest.all_passed);
        assert_eq!(out.json["result"]["count"], "81");
    }

    #[test]
    fn weighted_count_checked_against_polynomial() {
        let out = run(&cfg("command = count\nlambda = 2,1\nn = 2\nt = 2\nweights = 1,3/2\n")).unwrap();
        assert_eq!(out.manifest.checks[0].name, "weighted-count-equals-polynomial");
        assert!(out.manifest.all_passed);
    }

    #[test]
    fn identity_checks_pass_on_small_instance() {
        let out = run(&cfg("command = identity-check\nlambda = 2,1\nn = 2\nt = 2\n")).unwrap();
        assert!(out.manifest.all_passed, "{}", out.human);
        // branching, one level check and eight moment checks at kappa = 1
        assert_eq!(out.manifest.checks.len(), 10);
    }

    #[test]
    fn kappa_must_be_below_t() {
        let r = run(&cfg("command = identity-check\nlambda = 1\nn = 2\nt = 2\nkappa = 2\nwhich = moment\n"));
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let r = run(&cfg("command = enumerate\nlambda = 4,4,4\nn = 4\nt = 4\n"));
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }

    #[test]
    fn analytic_commands_pass_their_checks() {
        for text in [
            "command = frozen\ngrid = 41\n",
            "command = limit-shape\nmeasure = staircase:p=2\ns = 0.4\nj = 3\n",
            "command = burgers\n",
            "command = gff-cov\nk1 = 2\nk2 = 2\n",
        ] {
            let out = run(&cfg(text)).unwrap();
            assert!(out.manifest.all_passed, "{text}\n{}", out.human);
        }
    }

    #[test]
    fn manifest_is_reproducible_and_ignores_its_own_path() {
        let dir = tempfile::tempdir().unwrap();
        let base = format!(
            "command = sample\nlambda = 2,1\nn = 2\nt = 2\nsamples = 20\nseed = 3\nout = {}\n",
            dir.path().join("s.json").display()
        );
        let a = run(&cfg(&format!("{base}manifest = {}\n", dir.path().join("a.json").display()))).unwrap();
        let b = run(&cfg(&format!("{base}manifest = {}\n", dir.path().join("b.json").display()))).unwrap();
        let fa = std::fs::read(dir.path().join("a.json")).unwrap();
        assert_eq!(fa, std::fs::read(dir.path().join("b.json")).unwrap());
        assert_eq!(a.manifest, b.manifest);
        assert_eq!(a.manifest.artifacts.len(), 1);
    }

    #[test]
    fn render_rejects_unknown_schema() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        std::fs::write(&p, r#"{"schema": "other"}"#).unwrap();
        let r = run(&cfg(&format!("command = render\ninput = {}\n", p.display())));
        assert!(matches!(r, Err(Error::Argument(_))));
    }
}
