//! Spectrum routing: exact Fourier/Landau data on tori, per-mode shooting on
//! the boundary geometries and spheres, aggregated into the k smallest-|lambda|
//! eigenvalues with mode labels and multiplicities.

use crate::bundle::DiracBundleSpec;
use crate::error::{DiracError, Result};
use crate::geometry::GeometryKind;
use crate::operators::radial::{reduce_modes, RadialMode};
use crate::operators::{torus, BoundaryCondition, ModeKey};
use crate::eigensolve::shooting::{nonnormal_mode_roots, real_axis_roots, Rect, ShootingProblem};
use crate::eigensolve::SolveMethod;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub multiplicity: usize,
    pub mode: String,
    pub residual: f64,
    /// set on modes where the boundary projector imposes no condition and
    /// the reduced problem is not discrete; the reported value is the
    /// explicit kernel eigenvalue
    pub non_discrete: bool,
}

impl SpectrumEntry {
    pub fn lambda(&self) -> C64 {
        C64::new(self.lambda_re, self.lambda_im)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub method: SolveMethod,
    pub oracle: &'static str,
}

impl Spectrum {
    pub fn smallest_abs(&self) -> Option<C64> {
        self.entries.first().map(|e| e.lambda())
    }

    fn sort_truncate(&mut self, k: usize) {
        self.entries.sort_by(|a, b| crate::eigensolve::cmp_eigs(a.lambda(), b.lambda()));
        let mut total = 0usize;
        let mut keep = 0usize;
        for e in &self.entries {
            if total >= k {
                break;
            }
            total += e.multiplicity;
            keep += 1;
        }
        self.entries.truncate(keep.max(1).min(self.entries.len()));
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub k: usize,
    /// cap on the per-geometry mode scan (defaults chosen per geometry)
    pub max_modes: usize,
    /// RK4 base steps for the shooting determinants
    pub base_steps: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { k: 6, max_modes: 48, base_steps: 1200 }
    }
}

fn mode_name(key: &ModeKey) -> String {
    match key {
        ModeKey::Fourier { k1, k2 } => format!("fourier({k1},{k2})"),
        ModeKey::Tower { index } => format!("tower({index})"),
        ModeKey::Angular { m } => format!("angular({m})"),
        ModeKey::Axial { k } => format!("axial({k})"),
        ModeKey::Sphere { mu2 } => format!("sphere(mu={})", *mu2 as f64 / 2.0),
        ModeKey::Boundary { component, j } => format!("boundary({component},{j})"),
    }
}

pub fn spectrum(
    bundle: &DiracBundleSpec,
    bc: Option<&BoundaryCondition>,
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    if let Some(bc) = bc {
        bc.validate()?;
        if !bundle.geometry.invariants().has_boundary {
            return Err(DiracError::NoBoundary);
        }
    } else if bundle.geometry.invariants().has_boundary {
        return Err(DiracError::MissingArgument(
            "boundary geometry requires a boundary condition".into(),
        ));
    }
    match bundle.geometry.kind {
        GeometryKind::FlatTorus2 { l1, l2, spin } => torus_spectrum(bundle, l1, l2, spin, opts),
        GeometryKind::RoundSphere { n, radius } => sphere_spectrum(bundle, n, radius, opts),
        _ => shooting_spectrum(bundle, bc.unwrap(), opts),
    }
}

fn torus_spectrum(
    bundle: &DiracBundleSpec,
    l1: f64,
    l2: f64,
    spin: [u8; 2],
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    let q = bundle.torus_flux()?;
    let mut entries = Vec::new();
    if q == 0 {
        let data = torus::TorusData { l1, l2, spin };
        // scan a mode box large enough for the k smallest |xi|
        let reach = (opts.k as f64).sqrt() as i64 + 4;
        for k1 in -reach..=reach {
            for k2 in -reach..=reach {
                let xi = torus::mode_frequency(&data, (k1, k2));
                let norm = xi[0].hypot(xi[1]);
                for lam in [norm, -norm] {
                    if lam == 0.0 && norm == 0.0 {
                        continue;
                    }
                    entries.push(SpectrumEntry {
                        lambda_re: lam,
                        lambda_im: 0.0,
                        multiplicity: 1,
                        mode: mode_name(&ModeKey::Fourier { k1, k2 }),
                        residual: 0.0,
                        non_discrete: false,
                    });
                }
                if norm == 0.0 {
                    // kernel: both spinor components parallel
                    entries.push(SpectrumEntry {
                        lambda_re: 0.0,
                        lambda_im: 0.0,
                        multiplicity: 2,
                        mode: mode_name(&ModeKey::Fourier { k1, k2 }),
                        residual: 0.0,
                        non_discrete: false,
                    });
                }
            }
        }
    } else {
        let b = bundle.twist;
        entries.push(SpectrumEntry {
            lambda_re: 0.0,
            lambda_im: 0.0,
            multiplicity: q,
            mode: mode_name(&ModeKey::Tower { index: 0 }),
            residual: 0.0,
            non_discrete: false,
        });
        for m in 1..=(opts.k + 2) {
            let lam = (2.0 * b * m as f64).sqrt();
            for sign in [1.0, -1.0] {
                entries.push(SpectrumEntry {
                    lambda_re: sign * lam,
                    lambda_im: 0.0,
                    multiplicity: q,
                    mode: mode_name(&ModeKey::Tower { index: 0 }),
                    residual: 0.0,
                    non_discrete: false,
                });
            }
        }
    }
    let mut out = Spectrum { entries, method: SolveMethod::ExactBlocks, oracle: "fourier-exact" };
    out.sort_truncate(opts.k);
    Ok(out)
}

fn sphere_spectrum(
    bundle: &DiracBundleSpec,
    _n: usize,
    radius: f64,
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    let mut entries = Vec::new();
    // per-mode smallest |lambda| is (|mu| + 1/2)/radius, so k eigenvalues
    // need modes up to roughly k levels
    let levels = (opts.k + 2).min(opts.max_modes);
    for j in 0..levels as i64 {
        let modes = reduce_modes(bundle, None, &[j])?;
        for mode in modes {
            let mu_abs = mode.w.pole_coefficient().unwrap();
            let lam_max = (mu_abs + 0.5 + (opts.k + 1) as f64) / radius;
            let problem = ShootingProblem {
                mode: mode.clone(),
                region: Rect {
                    re_lo: -lam_max,
                    re_hi: lam_max,
                    im_lo: -0.5 / radius,
                    im_hi: 0.5 / radius,
                },
                base_steps: opts.base_steps,
            };
            let samples = (3.0 * lam_max * radius) as usize + 24;
            let roots = real_axis_roots(&problem, -lam_max, lam_max, samples)?;
            for r in roots {
                entries.push(SpectrumEntry {
                    lambda_re: r,
                    lambda_im: 0.0,
                    multiplicity: mode.multiplicity,
                    mode: mode_name(&mode.key),
                    residual: problem.determinant(C64::new(r, 0.0))?.0.norm(),
                    non_discrete: false,
                });
            }
        }
        if enough(&entries, opts.k, (j as f64 + 1.0) / radius) {
            break;
        }
    }
    let mut out = Spectrum { entries, method: SolveMethod::Shooting, oracle: "shooting-ode" };
    out.sort_truncate(opts.k);
    Ok(out)
}

fn enough(entries: &[SpectrumEntry], k: usize, frontier: f64) -> bool {
    let mut lams: Vec<f64> = Vec::new();
    for e in entries {
        for _ in 0..e.multiplicity {
            lams.push(e.lambda().norm());
        }
    }
    if lams.len() < k {
        return false;
    }
    lams.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lams[k - 1] < frontier
}

fn shooting_spectrum(
    bundle: &DiracBundleSpec,
    bc: &BoundaryCondition,
    opts: &SpectrumOptions,
) -> Result<Spectrum> {
    let len = match bundle.geometry.kind {
        GeometryKind::UnitDisk { radius } => radius,
        GeometryKind::Annulus { r_in, r_out } => r_out - r_in,
        GeometryKind::Cylinder { length, .. } => length,
        _ => unreachable!(),
    };
    let mut lam_cap = (opts.k as f64 + 3.0) * std::f64::consts::PI / (2.0 * len);
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for _round in 0..5 {
        entries.clear();
        let modes = candidate_modes(bundle, bc, lam_cap, opts.max_modes)?;
        let shot: Result<Vec<Vec<SpectrumEntry>>> = parallel_map(&modes, |mode| {
            mode_entries(mode, bc, lam_cap, opts.base_steps, len)
        });
        for group in shot? {
            entries.extend(group);
        }
        if enough(&entries, opts.k, 0.85 * lam_cap) {
            break;
        }
        lam_cap *= 1.6;
    }
    let mut out = Spectrum { entries, method: SolveMethod::Shooting, oracle: "shooting-ode" };
    out.sort_truncate(opts.k);
    Ok(out)
}

fn candidate_modes(
    bundle: &DiracBundleSpec,
    bc: &BoundaryCondition,
    lam_cap: f64,
    max_modes: usize,
) -> Result<Vec<RadialMode>> {
    let mut indices: Vec<i64> = Vec::new();
    match bundle.geometry.kind {
        GeometryKind::UnitDisk { radius } | GeometryKind::Annulus { r_out: radius, .. } => {
            // the smallest root in angular mode m sits above (|m+1/2|-1/2)/rho
            let reach = (lam_cap * radius + 1.5) as i64;
            for m in -reach..=reach {
                indices.push(m);
            }
        }
        GeometryKind::Cylinder { circumference, spin, .. } => {
            // per-mode lambda^2 >= zeta_k^2
            let mut k = 0i64;
            loop {
                let zeta = 2.0 * std::f64::consts::PI * (k as f64 + spin as f64 / 2.0)
                    / circumference;
                if zeta.abs() > lam_cap && k > 0 {
                    break;
                }
                indices.push(k);
                if k != -(k + if spin == 1 { 1 } else { 0 }) {
                    indices.push(-(k + if spin == 1 { 1 } else { 0 }));
                }
                k += 1;
                if indices.len() > 2 * max_modes {
                    break;
                }
            }
            indices.sort_unstable();
            indices.dedup();
        }
        _ => unreachable!(),
    }
    if indices.len() > 2 * max_modes + 1 {
        let keep = max_modes as i64;
        indices.retain(|m| m.abs() <= keep);
    }
    reduce_modes(bundle, Some(bc), &indices)
}

fn mode_entries(
    mode: &RadialMode,
    _bc: &BoundaryCondition,
    lam_cap: f64,
    base_steps: usize,
    len: f64,
) -> Result<Vec<SpectrumEntry>> {
    let mut out = Vec::new();
    if mode.is_overdetermined() {
        return Ok(out);
    }
    if mode.has_condition_gap().is_some() {
        // the projector imposes nothing: the reduced problem is not
        // discrete; report the explicit kernel eigenvalue, flagged
        out.push(SpectrumEntry {
            lambda_re: 0.0,
            lambda_im: 0.0,
            multiplicity: mode.multiplicity,
            mode: mode_name(&mode.key),
            residual: 0.0,
            non_discrete: true,
        });
        return Ok(out);
    }
    let im_h = 3.0 / len;
    let region = Rect { re_lo: -lam_cap, re_hi: lam_cap, im_lo: -im_h, im_hi: im_h };
    let problem = ShootingProblem { mode: mode.clone(), region, base_steps };
    if mode.is_complex() {
        let roots = nonnormal_mode_roots(&problem)?;
        for r in roots {
            let residual = problem.determinant(r)?.0.norm();
            out.push(SpectrumEntry {
                lambda_re: r.re,
                lambda_im: r.im,
                multiplicity: mode.multiplicity,
                mode: mode_name(&mode.key),
                residual,
                non_discrete: false,
            });
        }
    } else {
        let samples = (3.0 * lam_cap * len) as usize + 32;
        let roots = real_axis_roots(&problem, -lam_cap, lam_cap, samples)?;
        for r in roots {
            let residual = problem.determinant(C64::new(r, 0.0))?.0.norm();
            out.push(SpectrumEntry {
                lambda_re: r,
                lambda_im: 0.0,
                multiplicity: mode.multiplicity,
                mode: mode_name(&mode.key),
                residual,
                non_discrete: false,
            });
        }
    }
    Ok(out)
}

/// Map over items in parallel, capped by DIRACBOUND_THREADS (default: the
/// available parallelism). Results keep the input order.
pub fn parallel_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    let threads = std::env::var("DIRACBOUND_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|v| *v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
        .min(items.len().max(1));
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut results: Vec<Option<Result<U>>> = (0..items.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results_mutex = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let out = f(&items[i]);
                let mut guard = results_mutex.lock().unwrap();
                guard[i] = Some(out);
            });
        }
    });
    results.into_iter().map(|r| r.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_geometry;
    use std::f64::consts::PI;

    fn disk() -> DiracBundleSpec {
        DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 }).unwrap())
    }

    #[test]
    fn torus_antiperiodic_spectrum() {
        let t = DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [1, 1] }).unwrap(),
        );
        let s = spectrum(&t, None, &SpectrumOptions { k: 4, ..Default::default() }).unwrap();
        let expected = PI * 2f64.sqrt();
        assert!((s.smallest_abs().unwrap().norm() - expected).abs() < 1e-12);
    }

    #[test]
    fn disk_local_ground_state() {
        let bc = BoundaryCondition::LocalChirality { sign: 1 };
        let s = spectrum(&disk(), Some(&bc), &SpectrumOptions { k: 2, ..Default::default() })
            .unwrap();
        let lam = s.smallest_abs().unwrap();
        assert!(lam.im.abs() < 1e-10);
        assert!(lam.norm() * lam.norm() > 2.0, "lambda^2 = {}", lam.norm() * lam.norm());
        assert!(lam.norm() < 1.5);
    }

    #[test]
    fn aps_half_has_kernel() {
        let bc = BoundaryCondition::Aps { b: 0.5 };
        let s = spectrum(&disk(), Some(&bc), &SpectrumOptions { k: 2, ..Default::default() })
            .unwrap();
        let e = &s.entries[0];
        assert_eq!(e.lambda().norm(), 0.0);
        assert!(e.non_discrete);
    }

    #[test]
    fn bc_required_on_boundary_geometries() {
        assert!(spectrum(&disk(), None, &SpectrumOptions::default()).is_err());
    }
}
