//! Batch command-line front end: `spectrum`, `bound`, `verify`, `converge`.
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error,
//! 3 solver failure.

pub mod config;
pub mod report;

use crate::bounds;
use crate::cli::config::{build_config, RawConfig, RunConfig};
use crate::cli::report::{fnum, spectrum_record, Report};
use crate::error::{DiracError, Result};
use crate::geometry::GeometryKind;
use crate::identity;
use crate::operators::radial::{assemble_radial, reduce_modes};
use crate::operators::{boundary, BoundaryCondition};
use crate::spectrum::{spectrum, SpectrumOptions};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "diracbound", version, about = "Dirac spectra and eigenvalue bounds on model geometries")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// k smallest-|lambda| Dirac eigenvalues of the configured bundle
    Spectrum(CommonArgs),
    /// evaluate an eigenvalue lower bound and its gap
    Bound(BoundArgs),
    /// run a verification suite and fail on violated thresholds
    Verify(VerifyArgs),
    /// refinement study of a configured quantity
    Converge(ConvergeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// configuration file (key = value with `[section]` headers)
    #[arg(long)]
    pub config: Option<String>,
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long, visible_alias = "L1")]
    pub l1: Option<f64>,
    #[arg(long, visible_alias = "L2")]
    pub l2: Option<f64>,
    /// spin structure bits, e.g. `1,1` (torus) or `1` (cylinder)
    #[arg(long)]
    pub spin: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub r_in: Option<f64>,
    #[arg(long)]
    pub r_out: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub circumference: Option<f64>,
    /// sphere dimension (2 or 3)
    #[arg(long)]
    pub n: Option<usize>,
    /// constant twist curvature B
    #[arg(long, allow_hyphen_values = true)]
    pub twist: Option<f64>,
    /// boundary condition: mit, local, aps, maps
    #[arg(long)]
    pub bc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// boundary condition sign (+1 or -1)
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    #[arg(short = 'k', long = "k")]
    pub k: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// instance count for the identity suite
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub out: Option<String>,
    /// json or csv
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// t1, thm2, aps, maps, vol
    #[arg(long)]
    pub theorem: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// identities, boundary, scaling, all
    #[arg(long)]
    pub suite: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long, default_value_t = 4)]
    pub refinements: usize,
    /// eigenvalue, bochner, boundary
    #[arg(long, default_value = "eigenvalue")]
    pub quantity: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl CommonArgs {
    fn to_raw(&self) -> Result<RawConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::parse_file(path)?,
            None => RawConfig::default(),
        };
        macro_rules! put {
            ($key:expr, $field:expr) => {
                if let Some(v) = &$field {
                    raw.set($key, v);
                }
            };
        }
        put!("geometry.kind", self.geometry);
        put!("geometry.l1", self.l1);
        put!("geometry.l2", self.l2);
        put!("geometry.spin", self.spin);
        put!("geometry.radius", self.radius);
        put!("geometry.r_in", self.r_in);
        put!("geometry.r_out", self.r_out);
        put!("geometry.length", self.length);
        put!("geometry.circumference", self.circumference);
        put!("geometry.n", self.n);
        put!("bundle.twist", self.twist);
        put!("bc.kind", self.bc);
        put!("bc.b", self.b);
        put!("bc.sign", self.sign);
        put!("solver.k", self.k);
        put!("solver.resolution", self.resolution);
        put!("solver.modes", self.modes);
        put!("solver.tol", self.tol);
        put!("solver.seed", self.seed);
        put!("solver.instances", self.instances);
        put!("solver.sigma", self.sigma);
        put!("solver.gamma", self.gamma);
        put!("output.path", self.out);
        put!("output.format", self.format);
        Ok(raw)
    }
}

/// Entry point used by the binary: returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.cmd {
        Command::Spectrum(args) => with_config(&args, cmd_spectrum),
        Command::Bound(args) => {
            let theorem = args.theorem.clone();
            with_config(&args.common, |cfg| cmd_bound(cfg, &theorem))
        }
        Command::Verify(args) => {
            let suite = args.suite.clone();
            with_config(&args.common, |cfg| cmd_verify(cfg, &suite))
        }
        Command::Converge(args) => {
            let quantity = args.quantity.clone();
            let refinements = args.refinements;
            with_config(&args.common, |cfg| cmd_converge(cfg, &quantity, refinements))
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("diracbound: {e}");
            exit_code_for(&e)
        }
    }
}

fn with_config<F: FnOnce(&RunConfig) -> Result<i32>>(args: &CommonArgs, f: F) -> Result<i32> {
    let raw = args.to_raw()?;
    let cfg = build_config(&raw)?;
    f(&cfg)
}

pub fn exit_code_for(e: &DiracError) -> i32 {
    match e {
        DiracError::Config(_)
        | DiracError::Parameter(_)
        | DiracError::Dimension(_)
        | DiracError::Shape(_)
        | DiracError::Capability(_)
        | DiracError::MissingArgument(_)
        | DiracError::NoBoundary
        | DiracError::Resolution { .. } => 2,
        DiracError::Convergence { .. }
        | DiracError::IncompleteSearch { .. }
        | DiracError::NotHermitian { .. }
        | DiracError::Io(_) => 3,
    }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<i32> {
    let opts = SpectrumOptions { k: cfg.k, max_modes: cfg.modes, ..Default::default() };
    let spec = spectrum(&cfg.bundle, cfg.bc.as_ref(), &opts)?;
    let mut rep = Report::new("spectrum", cfg.tol);
    for e in &spec.entries {
        rep.push(spectrum_record(e, spec.oracle));
    }
    rep.write(cfg)?;
    Ok(0)
}

pub struct BoundOutcome {
    pub report: bounds::BoundReport,
    pub lambda_min: num_complex::Complex64,
}

/// Evaluate a bound end to end: spectral left-hand side, closed-form or
/// Robin right-hand side with a Richardson tolerance, equality diagnostics
/// where an eigenvector is available.
pub fn evaluate_bound(cfg: &RunConfig, theorem: &str) -> Result<BoundOutcome> {
    let bundle = &cfg.bundle;
    let n = bundle.dim();
    let has_boundary = bundle.geometry.invariants().has_boundary;
    let bc = if has_boundary {
        Some(effective_bc(cfg, theorem)?)
    } else {
        None
    };
    let opts = SpectrumOptions { k: 1, max_modes: cfg.modes, ..Default::default() };
    let spec = spectrum(bundle, bc.as_ref(), &opts)?;
    let lam = spec
        .smallest_abs()
        .ok_or_else(|| DiracError::Convergence { best_residual: f64::NAN })?;
    let lhs = lam.norm_sqr();

    let b_value = match &bc {
        Some(BoundaryCondition::Aps { b }) => *b,
        Some(BoundaryCondition::ModifiedAps { b, .. }) => *b,
        _ => 0.0,
    };
    let (rhs, rhs_tol, hypotheses_ok) = match theorem {
        "t1" => {
            if n != 2 {
                return Err(DiracError::Dimension(n));
            }
            (bounds::bound_t1(bundle)?, 1e-12, true)
        }
        "thm2" => {
            let coarse = bounds::bound_thm2(bundle, cfg.resolution / 2)?;
            let fine = bounds::bound_thm2(bundle, cfg.resolution)?;
            (fine, (fine - coarse).abs() / 3.0 + 1e-12, true)
        }
        "aps" => {
            let coarse = bounds::bound_aps(bundle, b_value, cfg.resolution / 2)?;
            let fine = bounds::bound_aps(bundle, b_value, cfg.resolution)?;
            (fine, (fine - coarse).abs() / 3.0 + 1e-12, true)
        }
        "maps" => {
            let coarse = bounds::bound_maps(bundle, b_value, cfg.resolution / 2)?;
            let fine = bounds::bound_maps(bundle, b_value, cfg.resolution)?;
            (fine, (fine - coarse).abs() / 3.0 + 1e-12, true)
        }
        "vol" => {
            let gamma = match cfg.gamma {
                Some(g) => g,
                None => crate::eigensolve::robin::gamma_estimate(&bundle.geometry, cfg.resolution)?,
            };
            let vb = bounds::bound_volume(bundle, b_value, gamma)?;
            (vb.rhs, 1e-12, vb.hypotheses_ok)
        }
        other => return Err(DiracError::config(format!("unknown theorem `{other}`"))),
    };

    let lhs_tol = 1e-8 * (1.0 + lhs);
    let mut report = bounds::BoundReport::new(theorem, lhs, rhs, lhs_tol + rhs_tol);
    report.hypotheses_ok = hypotheses_ok;
    report.equality = equality_diagnostics(cfg, bc.as_ref(), lam)?;
    Ok(BoundOutcome { report, lambda_min: lam })
}

fn effective_bc(cfg: &RunConfig, theorem: &str) -> Result<BoundaryCondition> {
    if let Some(bc) = cfg.bc {
        return Ok(bc);
    }
    Ok(match theorem {
        "aps" | "vol" => BoundaryCondition::Aps { b: 0.0 },
        "maps" => BoundaryCondition::ModifiedAps { b: 0.0, sign: 1 },
        _ => BoundaryCondition::LocalChirality { sign: 1 },
    })
}

fn equality_diagnostics(
    cfg: &RunConfig,
    bc: Option<&BoundaryCondition>,
    lam: num_complex::Complex64,
) -> Result<Option<bounds::EqualityDiagnostics>> {
    let bundle = &cfg.bundle;
    match bundle.geometry.kind {
        GeometryKind::FlatTorus2 { l1, l2, spin } => {
            if bundle.torus_flux()? > 0 {
                // Landau kernel states live in the lower chirality
                let diag = bounds::equality_diagnostics_torus(
                    bundle,
                    [0.0, 0.0],
                    [num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(1.0, 0.0)],
                    lam.re,
                )?;
                return Ok(Some(diag));
            }
            let data = crate::operators::torus::TorusData { l1, l2, spin };
            // locate the smallest-|xi| mode and its eigenspinor
            let mut best = (f64::INFINITY, [0.0f64; 2]);
            for k1 in -3i64..=3 {
                for k2 in -3i64..=3 {
                    let xi = crate::operators::torus::mode_frequency(&data, (k1, k2));
                    let nrm = xi[0].hypot(xi[1]);
                    if nrm < best.0 {
                        best = (nrm, xi);
                    }
                }
            }
            let xi = best.1;
            let psi = if lam.norm() == 0.0 {
                [num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)]
            } else {
                // eigenspinor of the 2x2 symbol at eigenvalue lambda
                let off = num_complex::Complex64::new(-xi[0], xi[1]);
                [off, num_complex::Complex64::new(lam.re, lam.im)]
            };
            Ok(Some(bounds::equality_diagnostics_torus(bundle, xi, psi, lam.re)?))
        }
        GeometryKind::RoundSphere { .. } => {
            let modes = reduce_modes(bundle, None, &[0])?;
            let mut best: Option<bounds::EqualityDiagnostics> = None;
            let mut best_gap = f64::INFINITY;
            for mode in &modes {
                let rm = assemble_radial(mode, cfg.resolution)?;
                for eig in rm.eigenpairs(2)? {
                    let gap = (eig.lambda.abs() - lam.norm()).abs();
                    if gap < best_gap {
                        best_gap = gap;
                        best = Some(bounds::equality_diagnostics_mode(bundle, &eig));
                    }
                }
            }
            Ok(best)
        }
        _ => {
            let Some(bc) = bc else { return Ok(None) };
            if matches!(bc, BoundaryCondition::MitBag { .. }) {
                // complex spectrum: no symmetric eigenvector route; report the
                // geometric obstructions only
                let max_h = bundle
                    .geometry
                    .boundary_components()
                    .iter()
                    .map(|c| c.mean_curvature.abs())
                    .fold(0.0, f64::max);
                return Ok(Some(bounds::EqualityDiagnostics {
                    killing_residual: f64::NAN,
                    curvature_residual: 0.0,
                    mean_curvature_max: max_h,
                    kappa_relation: (bundle.kappa()
                        - (bundle.dim() as f64 - 1.0) * lam.norm_sqr() / bundle.dim() as f64)
                        .abs(),
                }));
            }
            let indices: Vec<i64> = (-3..=3).collect();
            let modes = reduce_modes(bundle, Some(bc), &indices)?;
            let mut best: Option<bounds::EqualityDiagnostics> = None;
            let mut best_gap = f64::INFINITY;
            for mode in &modes {
                if mode.is_overdetermined() || mode.has_condition_gap().is_some() {
                    if mode.has_condition_gap().is_some() && lam.norm() == 0.0 {
                        // explicit kernel: parallel section diagnostics
                        return Ok(Some(bounds::EqualityDiagnostics {
                            killing_residual: 0.0,
                            curvature_residual: 0.0,
                            mean_curvature_max: bundle
                                .geometry
                                .boundary_components()
                                .iter()
                                .map(|c| c.mean_curvature.abs())
                                .fold(0.0, f64::max),
                            kappa_relation: bundle.kappa().abs(),
                        }));
                    }
                    continue;
                }
                if mode.is_complex() {
                    continue;
                }
                let rm = assemble_radial(mode, cfg.resolution)?;
                for eig in rm.eigenpairs(2)? {
                    let gap = (eig.lambda.abs() - lam.norm()).abs();
                    if gap < best_gap {
                        best_gap = gap;
                        best = Some(bounds::equality_diagnostics_mode(bundle, &eig));
                    }
                }
            }
            Ok(best)
        }
    }
}

fn cmd_bound(cfg: &RunConfig, theorem: &str) -> Result<i32> {
    let outcome = evaluate_bound(cfg, theorem)?;
    let r = &outcome.report;
    let mut rep = Report::new("bound", r.tolerance);
    let equality = r.equality.as_ref().map(|d| {
        json!({
            "killing_residual": fnum(d.killing_residual),
            "curvature_residual": fnum(d.curvature_residual),
            "mean_curvature_max": fnum(d.mean_curvature_max),
            "kappa_relation": fnum(d.kappa_relation),
        })
    });
    rep.push(json!({
        "theorem": r.theorem,
        "lhs": fnum(r.lhs),
        "rhs": fnum(r.rhs),
        "gap": fnum(r.gap),
        "hypotheses_ok": r.hypotheses_ok,
        "lambda_re": fnum(outcome.lambda_min.re),
        "lambda_im": fnum(outcome.lambda_min.im),
        "equality": equality,
        "oracle": "shooting-ode/closed-form",
    }));
    rep.write(cfg)?;
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> Result<i32> {
    let mut failures: Vec<String> = Vec::new();
    let mut rep = Report::new("verify", cfg.tol);
    match suite {
        "identities" => verify_identities(cfg, &mut rep, &mut failures)?,
        "boundary" => verify_boundary(cfg, &mut rep, &mut failures)?,
        "scaling" => verify_scaling(cfg, &mut rep, &mut failures)?,
        "all" => {
            verify_identities(cfg, &mut rep, &mut failures)?;
            verify_boundary(cfg, &mut rep, &mut failures)?;
            verify_scaling(cfg, &mut rep, &mut failures)?;
        }
        other => return Err(DiracError::config(format!("unknown suite `{other}`"))),
    }
    rep.extra.insert("failures".into(), json!(failures));
    rep.write(cfg)?;
    if failures.is_empty() {
        Ok(0)
    } else {
        for f in &failures {
            eprintln!("verify: {f}");
        }
        Ok(1)
    }
}

fn verify_identities(cfg: &RunConfig, rep: &mut Report, failures: &mut Vec<String>) -> Result<()> {
    let bundle = torus_for_identities(cfg)?;
    let threshold = 1e-10;
    let instances = cfg.instances.min(200);
    for i in 0..instances {
        let reports = identity::identity_suite_instance(&bundle, cfg.seed + i as u64, 160)?;
        for r in reports {
            if r.relative_residual() > threshold {
                failures.push(format!(
                    "instance {i}: {} residual {:.3e} exceeds {threshold:.1e}",
                    r.identity,
                    r.relative_residual()
                ));
            }
            rep.push(json!({
                "check": r.identity,
                "instance": i,
                "residual": fnum(r.residual),
                "scale": fnum(r.scale),
                "oracle": "fourier-exact",
            }));
        }
    }
    // Bochner exactness across twists
    for flux_quanta in [0usize, 1, 2] {
        let b = 2.0 * std::f64::consts::PI * flux_quanta as f64;
        let tw = crate::bundle::DiracBundleSpec::twisted(bundle.geometry.clone(), b)?;
        let r = identity::check_bochner_torus(&tw, 16)?;
        if r.residual > 1e-12 {
            failures.push(format!("bochner twist {b}: residual {:.3e}", r.residual));
        }
        rep.push(json!({
            "check": "bochner",
            "twist": fnum(b),
            "residual": fnum(r.residual),
            "oracle": "landau-exact",
        }));
    }
    Ok(())
}

fn torus_for_identities(cfg: &RunConfig) -> Result<crate::bundle::DiracBundleSpec> {
    match cfg.bundle.geometry.kind {
        GeometryKind::FlatTorus2 { .. } => Ok(cfg.bundle.clone()),
        _ => Ok(crate::bundle::DiracBundleSpec::untwisted(crate::geometry::make_geometry(
            GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [0, 0] },
        )?)),
    }
}

fn verify_boundary(cfg: &RunConfig, rep: &mut Report, failures: &mut Vec<String>) -> Result<()> {
    let bundle = &cfg.bundle;
    if !bundle.geometry.invariants().has_boundary {
        return Err(DiracError::NoBoundary);
    }
    let bc = cfg.bc.unwrap_or(BoundaryCondition::LocalChirality { sign: 1 });
    // trace-identity refinement series on the ground discrete eigenmode
    let modes = reduce_modes(bundle, Some(&bc), &[0])?;
    for variant in ["b1", "b2"] {
        let mut series = Vec::new();
        for res in [64usize, 128, 256, 512] {
            let rm = assemble_radial(&modes[0], res)?;
            let eig = &rm.eigenpairs(1)?[0];
            let r = identity::check_boundary_trace(eig, variant)?;
            series.push(((res as f64).recip(), r.relative_residual()));
        }
        let order = crate::util::quad::fitted_order(&series);
        if order < 1.0 {
            failures.push(format!("{variant}: fitted order {order:.2} < 1.0"));
        }
        rep.push(json!({
            "check": variant,
            "fitted_order": fnum(order),
            "series": series.iter().map(|(h, e)| json!([fnum(*h), fnum(*e)])).collect::<Vec<_>>(),
            "oracle": "derived-refinement",
        }));
    }
    // (maps) dichotomy on random projected boundary sections
    let models = boundary::boundary_models(bundle)?;
    let mut rng = crate::util::rng::SplitMix64::new(cfg.seed);
    for b in [-1.0f64, 0.5] {
        let mbc = BoundaryCondition::ModifiedAps { b, sign: 1 };
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let raw = boundary::BoundarySection {
                model: models[0],
                modes: (-8..8).map(|m| (m, rng.complex_normal(), rng.complex_normal())).collect(),
            };
            let t = boundary::project_trace(&mbc, &raw);
            let pairing = t.dbar_pairing();
            let defect = if b <= 0.0 {
                pairing.abs() / t.norm_sq().max(1e-30)
            } else {
                ((pairing - b * t.norm_sq()) / t.norm_sq().max(1e-30)).max(0.0)
            };
            worst = worst.max(defect);
        }
        if worst > 1e-10 {
            failures.push(format!("maps pairing b={b}: defect {worst:.3e}"));
        }
        rep.push(json!({
            "check": "maps-pairing",
            "b": fnum(b),
            "worst_defect": fnum(worst),
            "oracle": "boundary-fourier-exact",
        }));
    }
    Ok(())
}

fn verify_scaling(cfg: &RunConfig, rep: &mut Report, failures: &mut Vec<String>) -> Result<()> {
    let sigma = cfg.sigma;
    // torus (exact) and the configured bundle when it differs
    let torus = torus_for_identities(cfg)?;
    let r = identity::check_scaling(&torus, None, sigma, 4)?;
    if r.residual > 1e-8 {
        failures.push(format!("torus scaling sigma={sigma}: deviation {:.3e}", r.residual));
    }
    rep.push(json!({
        "check": "scaling-torus",
        "sigma": fnum(sigma),
        "deviation": fnum(r.residual),
        "oracle": "fourier-exact",
    }));
    if cfg.bundle.geometry.invariants().has_boundary {
        let bc = cfg.bc.unwrap_or(BoundaryCondition::LocalChirality { sign: 1 });
        let r = identity::check_scaling(&cfg.bundle, Some(&bc), sigma, 3)?;
        if r.residual > 1e-8 {
            failures.push(format!("boundary scaling sigma={sigma}: deviation {:.3e}", r.residual));
        }
        rep.push(json!({
            "check": "scaling-boundary",
            "sigma": fnum(sigma),
            "deviation": fnum(r.residual),
            "oracle": "shooting-ode",
        }));
    }
    Ok(())
}

fn cmd_converge(cfg: &RunConfig, quantity: &str, refinements: usize) -> Result<i32> {
    if refinements < 3 {
        return Err(DiracError::config("converge requires at least 3 refinements"));
    }
    let mut rep = Report::new("converge", cfg.tol);
    let base_res = 64usize;
    let resolutions: Vec<usize> = (0..refinements).map(|i| base_res << i).collect();
    let mut series: Vec<(f64, f64)> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    match quantity {
        "eigenvalue" => {
            match cfg.bundle.geometry.kind {
                GeometryKind::FlatTorus2 { .. } => {
                    // exact discretization: the value is resolution-independent
                    let opts = SpectrumOptions { k: 1, ..Default::default() };
                    let lam = spectrum(&cfg.bundle, None, &opts)?.smallest_abs().unwrap();
                    for res in &resolutions {
                        series.push(((*res as f64).recip(), 0.0));
                        values.push(lam.norm());
                    }
                }
                _ => {
                    let bc = cfg
                        .bc
                        .unwrap_or(BoundaryCondition::LocalChirality { sign: 1 });
                    let reference = spectrum(
                        &cfg.bundle,
                        Some(&bc),
                        &SpectrumOptions { k: 1, ..Default::default() },
                    )?
                    .smallest_abs()
                    .unwrap();
                    let modes = reduce_modes(&cfg.bundle, Some(&bc), &mode_scan(cfg))?;
                    for res in &resolutions {
                        let mut best = f64::INFINITY;
                        for mode in &modes {
                            if mode.is_complex()
                                || mode.is_overdetermined()
                                || mode.has_condition_gap().is_some()
                            {
                                continue;
                            }
                            let rm = assemble_radial(mode, *res)?;
                            for eig in rm.eigenpairs(1)? {
                                if eig.lambda.abs() < best.abs() {
                                    best = eig.lambda.abs();
                                }
                            }
                        }
                        series.push(((*res as f64).recip(), (best - reference.norm()).abs()));
                        values.push(best);
                    }
                }
            }
        }
        "bochner" => {
            for res in &resolutions {
                let r = match cfg.bundle.geometry.kind {
                    GeometryKind::FlatTorus2 { .. } => {
                        identity::check_bochner_torus(&cfg.bundle, 16)?
                    }
                    GeometryKind::RoundSphere { .. } => {
                        identity::check_bochner_mode(&cfg.bundle, None, 0, *res)?
                    }
                    _ => identity::check_bochner_mode(
                        &cfg.bundle,
                        Some(&cfg.bc.unwrap_or(BoundaryCondition::LocalChirality { sign: 1 })),
                        0,
                        *res,
                    )?,
                };
                series.push(((*res as f64).recip(), r.residual));
                values.push(r.residual);
            }
        }
        "boundary" => {
            let bc = cfg.bc.unwrap_or(BoundaryCondition::LocalChirality { sign: 1 });
            let modes = reduce_modes(&cfg.bundle, Some(&bc), &[0])?;
            for res in &resolutions {
                let rm = assemble_radial(&modes[0], *res)?;
                let eig = &rm.eigenpairs(1)?[0];
                let r = identity::check_boundary_trace(eig, "b1")?;
                series.push(((*res as f64).recip(), r.relative_residual()));
                values.push(r.relative_residual());
            }
        }
        other => return Err(DiracError::config(format!("unknown quantity `{other}`"))),
    }
    let order = crate::util::quad::fitted_order(&series);
    for ((h, err), value) in series.iter().zip(values.iter()) {
        rep.push(json!({
            "h": fnum(*h),
            "value": fnum(*value),
            "residual": fnum(*err),
            "oracle": "derived-refinement",
        }));
    }
    rep.extra.insert("fitted_order".into(), fnum(order));
    rep.write(cfg)?;
    Ok(0)
}

fn mode_scan(cfg: &RunConfig) -> Vec<i64> {
    let m = cfg.modes.min(12) as i64;
    (-m..=m).collect()
}
