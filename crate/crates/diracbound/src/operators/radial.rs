//! Per-angular-mode reduction of the Dirac operator on disk, annulus,
//! cylinder and spheres to the first-order pair
//!
//!   lambda u = v' + w v,      lambda v = -u' + w u
//!
//! in the measure-flattened real gauge (u, v here are the flattened fields).
//! The staggered discretization integrates the pair in the exact
//! integrating-factor variables P = u/Phi, G = Phi v with Phi = exp(int w),
//! which removes the regular-singular behaviour at poles and yields an
//! exactly symmetric tridiagonal matrix in interleaved ordering.

use super::{BoundaryCondition, MatrixRepr, ModeKey, OperatorMatrix, SymmetryFlag};
use crate::bundle::DiracBundleSpec;
use crate::error::{DiracError, Result};
use crate::geometry::GeometryKind;
use crate::util::linalg::{CMatrix, SymTridiag};
use crate::util::quad::gauss6;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Coefficient profile w(r) of the reduced pair.
#[derive(Clone, Copy, Debug)]
pub enum WProfile {
    /// w = c / r
    Pole { c: f64 },
    /// w = z
    Constant { z: f64 },
    /// w = c / (rho sin(t / rho)), t in (0, pi rho)
    Sphere { c: f64, rho: f64 },
}

impl WProfile {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            WProfile::Pole { c } => c / r,
            WProfile::Constant { z } => *z,
            WProfile::Sphere { c, rho } => c / (rho * (r / rho).sin()),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            WProfile::Pole { c } => -c / (r * r),
            WProfile::Constant { .. } => 0.0,
            WProfile::Sphere { c, rho } => {
                let u = r / rho;
                -c * u.cos() / (rho * rho * u.sin() * u.sin())
            }
        }
    }

    /// log of the integrating factor Phi = exp(int w), fixed gauge per profile.
    pub fn log_phi(&self, r: f64) -> f64 {
        match self {
            WProfile::Pole { c } => c * r.ln(),
            WProfile::Constant { z } => z * r,
            WProfile::Sphere { c, rho } => c * (r / (2.0 * rho)).tan().ln(),
        }
    }

    /// Pole strength at the left end of the domain, when singular there.
    pub fn pole_coefficient(&self) -> Option<f64> {
        match self {
            WProfile::Pole { c } => Some(*c),
            WProfile::Sphere { c, .. } => Some(*c),
            WProfile::Constant { .. } => None,
        }
    }

    /// Odd Taylor coefficients of w - c/r about r = 0: w = c/r + w1 r + w3 r^3 + ...
    pub fn laurent_tail(&self) -> [f64; 5] {
        match self {
            WProfile::Pole { .. } | WProfile::Constant { .. } => [0.0; 5],
            WProfile::Sphere { c, rho } => {
                let r2 = rho * rho;
                let r4 = r2 * r2;
                [
                    c / (6.0 * r2),
                    7.0 * c / (360.0 * r4),
                    31.0 * c / (15120.0 * r4 * r2),
                    127.0 * c / (604800.0 * r4 * r4),
                    73.0 * c / (3421440.0 * r4 * r4 * r2),
                ]
            }
        }
    }

    pub fn negate(&self) -> WProfile {
        match self {
            WProfile::Pole { c } => WProfile::Pole { c: -c },
            WProfile::Constant { z } => WProfile::Constant { z: -z },
            WProfile::Sphere { c, rho } => WProfile::Sphere { c: -c, rho: *rho },
        }
    }
}

/// Trace condition on the flattened pair at a domain end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceBc {
    /// u = 0 at the end (pins the integer-grid node)
    PinU,
    /// v = 0 at the end (natural: zero flux)
    Natural,
    /// v = g u with real g (enters the flux diagonally, keeps symmetry)
    Mixed(f64),
    /// v = g u with complex g (MIT bag; spectra via shooting only)
    MixedComplex(C64),
    /// boundary projector imposes nothing in this mode
    NoCondition,
    /// both components pinned: the mode carries no spectrum
    Overdetermined,
}

impl TraceBc {
    fn flip(self) -> TraceBc {
        match self {
            TraceBc::PinU => TraceBc::Natural,
            TraceBc::Natural => TraceBc::PinU,
            TraceBc::Mixed(g) => {
                if g == 0.0 {
                    TraceBc::PinU
                } else {
                    TraceBc::Mixed(-1.0 / g)
                }
            }
            TraceBc::MixedComplex(g) => {
                if g.norm() == 0.0 {
                    TraceBc::PinU
                } else {
                    TraceBc::MixedComplex(-1.0 / g)
                }
            }
            other => other,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndClosure {
    Pole,
    Bc(TraceBc),
}

/// One reduced 1D eigenvalue problem.
#[derive(Clone, Debug)]
pub struct RadialMode {
    pub key: ModeKey,
    pub r0: f64,
    pub r1: f64,
    pub w: WProfile,
    pub left: EndClosure,
    pub right: EndClosure,
    /// whether the normal-form transform (u,v,w) -> (v,-u,-w) was applied
    pub flipped: bool,
    pub multiplicity: usize,
    /// ambient dimension, for reconstruction weights
    pub n_dim: usize,
}

impl RadialMode {
    /// Measure flattening factor f^{(n-1)/2}(t) that relates the physical
    /// warped components to the flattened pair the schemes integrate.
    pub fn flatten_weight(&self, t: f64) -> f64 {
        let p = (self.n_dim as f64 - 1.0) / 2.0;
        match self.w {
            WProfile::Pole { .. } => t.powf(p),
            WProfile::Constant { .. } => 1.0,
            WProfile::Sphere { rho, .. } => (rho * (t / rho).sin()).powf(p),
        }
    }

    pub fn has_condition_gap(&self) -> Option<&'static str> {
        for end in [&self.left, &self.right] {
            if let EndClosure::Bc(TraceBc::NoCondition) = end {
                return Some("boundary projector imposes no condition in this mode");
            }
        }
        None
    }

    pub fn is_overdetermined(&self) -> bool {
        matches!(self.left, EndClosure::Bc(TraceBc::Overdetermined))
            || matches!(self.right, EndClosure::Bc(TraceBc::Overdetermined))
    }

    pub fn is_complex(&self) -> bool {
        for end in [&self.left, &self.right] {
            if let EndClosure::Bc(TraceBc::MixedComplex(_)) = end {
                return true;
            }
        }
        false
    }
}

/// Upper-trace eigenvalue of the boundary Dirac operator seen by angular
/// mode `m` at a circle of radius `rho` with normal orientation `o`.
pub fn disk_trace_mu(m: i64, rho: f64, o: f64) -> f64 {
    o * (m as f64 + 0.5) / rho
}

/// Per-mode trace condition induced by a boundary condition at a component
/// with normal orientation `o` (+1 outer, -1 inner) and upper-trace
/// boundary-Dirac eigenvalue `mu_up`.
pub fn trace_condition(bc: &BoundaryCondition, mu_up: f64, o: f64) -> TraceBc {
    match bc {
        BoundaryCondition::MitBag { sign } => {
            TraceBc::MixedComplex(C64::new(0.0, o * *sign as f64))
        }
        BoundaryCondition::LocalChirality { sign } => TraceBc::Mixed(-o * *sign as f64),
        BoundaryCondition::Aps { b } => {
            let kill_u = mu_up > *b;
            let kill_v = -mu_up > *b;
            match (kill_u, kill_v) {
                (true, true) => TraceBc::Overdetermined,
                (true, false) => TraceBc::PinU,
                (false, true) => TraceBc::Natural,
                (false, false) => TraceBc::NoCondition,
            }
        }
        BoundaryCondition::ModifiedAps { b, sign } => {
            let s = *sign as f64;
            let kill_up = mu_up > *b;
            let kill_low = -mu_up > *b;
            match (kill_up, kill_low) {
                (true, true) => TraceBc::Overdetermined,
                (true, false) => TraceBc::Mixed(-o * s),
                (false, true) => TraceBc::Mixed(o * s),
                (false, false) => TraceBc::NoCondition,
            }
        }
    }
}

fn normalize(mut mode: RadialMode) -> Result<RadialMode> {
    // bring the left pole (when present) to positive strength
    if matches!(mode.left, EndClosure::Pole) {
        let c = mode
            .w
            .pole_coefficient()
            .ok_or_else(|| DiracError::capability("pole closure without singular profile"))?;
        if c < 0.0 {
            mode.w = mode.w.negate();
            mode.flipped = !mode.flipped;
            mode.left = EndClosure::Pole;
            mode.right = match mode.right {
                EndClosure::Pole => EndClosure::Pole,
                EndClosure::Bc(t) => EndClosure::Bc(t.flip()),
            };
        }
        let c = mode.w.pole_coefficient().unwrap();
        if c <= 0.0 {
            return Err(DiracError::capability(format!(
                "mode with vanishing pole strength c = {c} is not reducible"
            )));
        }
        if c > 40.0 {
            return Err(DiracError::capability(format!(
                "pole strength c = {c} too large for the radial scheme"
            )));
        }
    }
    Ok(mode)
}

/// Reduced modes of the bundle under an optional boundary condition.
/// `indices` are angular mode labels whose meaning depends on the geometry:
/// integer m for disk/annulus, integer k for the cylinder, and for spheres
/// the label j >= 0 enumerates slice eigenvalues of modulus j+1/2 (n=2) or
/// j+1 (n=3), both signs.
pub fn reduce_modes(
    bundle: &DiracBundleSpec,
    bc: Option<&BoundaryCondition>,
    indices: &[i64],
) -> Result<Vec<RadialMode>> {
    if bundle.twist != 0.0 {
        return Err(DiracError::capability(
            "twists are supported on the torus only; radial geometries are untwisted",
        ));
    }
    let mut out = Vec::new();
    match bundle.geometry.kind {
        GeometryKind::UnitDisk { radius } => {
            let bc = bc_required(bc)?;
            for &m in indices {
                let c = m as f64 + 0.5;
                let tb = trace_condition(bc, disk_trace_mu(m, radius, 1.0), 1.0);
                out.push(normalize(RadialMode {
                    key: ModeKey::Angular { m },
                    r0: 0.0,
                    r1: radius,
                    w: WProfile::Pole { c },
                    left: EndClosure::Pole,
                    right: EndClosure::Bc(tb),
                    flipped: false,
                    multiplicity: 1,
                    n_dim: 2,
                })?);
            }
        }
        GeometryKind::Annulus { r_in, r_out } => {
            let bc = bc_required(bc)?;
            for &m in indices {
                let c = m as f64 + 0.5;
                let tb_in = trace_condition(bc, disk_trace_mu(m, r_in, -1.0), -1.0);
                let tb_out = trace_condition(bc, disk_trace_mu(m, r_out, 1.0), 1.0);
                out.push(RadialMode {
                    key: ModeKey::Angular { m },
                    r0: r_in,
                    r1: r_out,
                    w: WProfile::Pole { c },
                    left: EndClosure::Bc(tb_in),
                    right: EndClosure::Bc(tb_out),
                    flipped: false,
                    multiplicity: 1,
                    n_dim: 2,
                });
            }
        }
        GeometryKind::Cylinder { length, circumference, spin } => {
            let bc = bc_required(bc)?;
            for &k in indices {
                let zeta = 2.0 * PI * (k as f64 + spin as f64 / 2.0) / circumference;
                let tb_l = trace_condition(bc, -zeta, -1.0);
                let tb_r = trace_condition(bc, zeta, 1.0);
                out.push(RadialMode {
                    key: ModeKey::Axial { k },
                    r0: 0.0,
                    r1: length,
                    w: WProfile::Constant { z: zeta },
                    left: EndClosure::Bc(tb_l),
                    right: EndClosure::Bc(tb_r),
                    flipped: false,
                    multiplicity: 1,
                    n_dim: 2,
                });
            }
        }
        GeometryKind::RoundSphere { n, radius } => {
            if bc.is_some() {
                return Err(DiracError::NoBoundary);
            }
            for &j in indices {
                if j < 0 {
                    return Err(DiracError::parameter("sphere mode labels are j >= 0"));
                }
                // slice Dirac eigenvalues: +-(j + 1/2) for n = 2, +-(j + 1) for n = 3
                let (mu_abs2, mult) = match n {
                    2 => (2 * j + 1, 1usize),
                    3 => (2 * (j + 1), 2 * (j + 1) as usize),
                    _ => return Err(DiracError::Dimension(n)),
                };
                for sign in [-1i64, 1] {
                    let mu2 = sign * mu_abs2;
                    // normal form uses w = -mu / f
                    let c = -(mu2 as f64) / 2.0;
                    out.push(normalize(RadialMode {
                        key: ModeKey::Sphere { mu2 },
                        r0: 0.0,
                        r1: PI * radius,
                        w: WProfile::Sphere { c, rho: radius },
                        left: EndClosure::Pole,
                        right: EndClosure::Pole,
                        flipped: false,
                        multiplicity: mult,
                        n_dim: n,
                    })?);
                }
            }
        }
        GeometryKind::FlatTorus2 { .. } => {
            return Err(DiracError::capability("tori are handled by the Fourier assembly"))
        }
    }
    Ok(out)
}

fn bc_required<'a>(bc: Option<&'a BoundaryCondition>) -> Result<&'a BoundaryCondition> {
    bc.ok_or_else(|| {
        DiracError::MissingArgument("boundary geometry requires a boundary condition".into())
    })
}

/// Cell mass of Phi^2 stored as value * exp(log_scale).
#[derive(Clone, Copy, Debug)]
struct Mass {
    log_scale: f64,
    value: f64,
}

impl Mass {
    fn log(&self) -> f64 {
        self.log_scale + self.value.ln()
    }
}

fn cell_mass(w: &WProfile, a: f64, b: f64, pole_cell: bool) -> Mass {
    if pole_cell {
        // pole cell: factor the leading power out, integrate the smooth ratio
        let c = w.pole_coefficient().expect("pole cell requires singular profile");
        let p = 2.0 * c + 1.0;
        // m = (b^p / p) * int_0^1 g(b s^{1/p}) ds, g(t) = (Phi(t)/t^c)^2
        let g = |t: f64| -> f64 {
            if t == 0.0 {
                return (2.0 * (w.log_phi(1e-300) - c * (1e-300f64).ln())).exp();
            }
            (2.0 * (w.log_phi(t) - c * t.ln())).exp()
        };
        let integral = gauss6(0.0, 1.0, |s| g(b * s.powf(1.0 / p)));
        Mass { log_scale: p * b.ln() - p.ln(), value: integral }
    } else {
        let mid = 0.5 * (a + b);
        let ls = 2.0 * w.log_phi(mid);
        let value = gauss6(a, b, |t| (2.0 * w.log_phi(t) - ls).exp());
        Mass { log_scale: ls, value }
    }
}

/// Assembled per-mode matrix with the data needed to reconstruct fields.
#[derive(Clone, Debug)]
pub struct RadialMatrix {
    pub mode: RadialMode,
    pub resolution: usize,
    pub h: f64,
    /// symmetric interleaved tridiagonal (real trace conditions)
    pub tri: Option<SymTridiag>,
    /// dense complex matrix for MIT-type conditions
    pub dense: Option<CMatrix>,
    /// interleaved labels: true = P node index, false = G node index
    pin_left: bool,
    pin_right: bool,
    /// per-node reconstruction exponents
    log_phi_p: Vec<f64>,
    mass_logs: Vec<f64>,
}

impl RadialMatrix {
    pub fn size(&self) -> usize {
        self.tri.as_ref().map(|t| t.dim()).unwrap_or_else(|| self.dense.as_ref().unwrap().rows)
    }

    pub fn operator(&self) -> OperatorMatrix {
        if let Some(t) = &self.tri {
            OperatorMatrix {
                repr: MatrixRepr::Tridiag(t.clone()),
                symmetry: SymmetryFlag::Hermitian,
                bc: None,
                mode: Some(self.mode.key),
            }
        } else {
            OperatorMatrix {
                repr: MatrixRepr::Dense(self.dense.clone().unwrap()),
                symmetry: SymmetryFlag::General,
                bc: None,
                mode: Some(self.mode.key),
            }
        }
    }

    /// Eigenpairs of the symmetric path, reconstructed to flattened fields.
    pub fn eigenpairs(&self, k: usize) -> Result<Vec<ModeEigvec>> {
        let tri = self
            .tri
            .as_ref()
            .ok_or_else(|| DiracError::capability("complex trace condition: use the shooting solver"))?;
        let (vals, vecs) = tri.eig(true)?;
        let vecs = vecs.unwrap();
        let n = self.resolution;
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| {
            vals[a]
                .abs()
                .partial_cmp(&vals[b].abs())
                .unwrap()
                .then(vals[a].partial_cmp(&vals[b]).unwrap())
        });
        let mut out = Vec::new();
        for &idx in order.iter().take(k) {
            let z = &vecs[idx];
            // unpack interleaved coordinates
            let mut p = vec![0.0; n + 1];
            let mut g = vec![0.0; n + 1]; // g[1..=n]
            let mut pos = 0usize;
            for j in 0..=n {
                if j > 0 {
                    g[j] = z[pos];
                    pos += 1;
                }
                let pinned = (j == 0 && self.pin_left) || (j == n && self.pin_right);
                if !pinned {
                    p[j] = z[pos];
                    pos += 1;
                }
            }
            debug_assert_eq!(pos, z.len());
            // integer-grid component: Phi(y_j) P_j / sqrt(m_j)
            let mut on_integer = vec![0.0; n + 1];
            for j in 0..=n {
                if p[j] != 0.0 {
                    on_integer[j] = p[j] * (self.log_phi_p[j] - 0.5 * self.mass_logs[j]).exp();
                }
            }
            // half-grid component: G_j / sqrt(h)
            let mut on_half = vec![0.0; n];
            for j in 1..=n {
                on_half[j - 1] = g[j] / self.h.sqrt();
            }
            // interpolate the half-grid component to the integer grid in the
            // unflattened (smooth) variable: the flattened fields carry a
            // sqrt-type cusp at poles that ruins plain interpolation there
            let interp = |half: &[f64]| -> Vec<f64> {
                let smooth: Vec<f64> = half
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let x = self.mode.r0 + (j as f64 + 0.5) * self.h;
                        v / self.mode.flatten_weight(x)
                    })
                    .collect();
                let mut out = half_to_integer(&smooth, n);
                for (j, v) in out.iter_mut().enumerate() {
                    let y = self.mode.r0 + j as f64 * self.h;
                    *v *= self.mode.flatten_weight(y);
                }
                out
            };
            // undo the normal-form flip: solved pair is (u,v) unflipped, or
            // (v, -u) flipped; present both components on the integer grid
            let (u_hat, v_hat) = if self.mode.flipped {
                let u_orig: Vec<f64> = on_half.iter().map(|v| -v).collect();
                (interp(&u_orig), on_integer)
            } else {
                (on_integer, interp(&on_half))
            };
            out.push(ModeEigvec {
                lambda: vals[idx],
                mode: self.mode.clone(),
                h: self.h,
                u_hat,
                v_hat,
            });
        }
        Ok(out)
    }
}

/// interpolate half-node samples to the integer grid (2nd order)
fn half_to_integer(half: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if n == 0 {
        return out;
    }
    out[0] = 1.5 * half[0] - 0.5 * half[1.min(half.len() - 1)];
    for j in 1..n {
        out[j] = 0.5 * (half[j - 1] + half[j]);
    }
    out[n] = 1.5 * half[n - 1] - 0.5 * half[n.saturating_sub(2)];
    out
}

/// Eigenvector of a reduced mode: both flattened components sampled on the
/// integer grid r0 + j h, with the normal-form flip undone.
#[derive(Clone, Debug)]
pub struct ModeEigvec {
    pub lambda: f64,
    pub mode: RadialMode,
    pub h: f64,
    pub u_hat: Vec<f64>,
    pub v_hat: Vec<f64>,
}

impl ModeEigvec {
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.u_hat.len()).map(|j| self.mode.r0 + j as f64 * self.h).collect()
    }
}

pub fn assemble_radial(mode: &RadialMode, resolution: usize) -> Result<RadialMatrix> {
    if resolution < 8 {
        return Err(DiracError::Resolution { got: resolution, min: 8 });
    }
    if mode.has_condition_gap().is_some() {
        return Err(DiracError::capability(
            "boundary projector imposes no condition in this mode; the reduced problem is not discrete",
        ));
    }
    if mode.is_overdetermined() {
        return Err(DiracError::capability("mode is fully pinned and carries no spectrum"));
    }
    let n = resolution;
    let h = (mode.r1 - mode.r0) / n as f64;
    let yj = |j: usize| mode.r0 + j as f64 * h;
    let xj = |j: usize| mode.r0 + (j as f64 - 0.5) * h; // j = 1..=n

    // cell masses m_0..m_n
    let mut masses = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let a = if j == 0 { mode.r0 } else { xj(j) };
        let b = if j == n { mode.r1 } else { xj(j + 1) };
        let left_is_pole = j == 0 && matches!(mode.left, EndClosure::Pole) && mode.r0 == 0.0;
        masses.push(cell_mass(&mode.w, a, b, left_is_pole));
    }

    let pin_left = match mode.left {
        EndClosure::Pole => false,
        EndClosure::Bc(TraceBc::PinU) => true,
        EndClosure::Bc(_) => false,
    };
    let pin_right = match mode.right {
        EndClosure::Pole => true,
        EndClosure::Bc(TraceBc::PinU) => true,
        EndClosure::Bc(_) => false,
    };

    // interleaved ordering: P0, G1, P1, G2, ..., Gn, Pn with pinned P dropped
    let size = (2 * n + 1) - usize::from(pin_left) - usize::from(pin_right);

    // off-diagonal entries in interleaved order
    let mut diag = vec![0.0; size];
    let mut off = vec![0.0; size.saturating_sub(1)];
    let mut complex_corner: Option<(usize, C64)> = None;

    // positions in the kept vector
    let mut pos_of_p = vec![usize::MAX; n + 1];
    let mut pos_of_g = vec![usize::MAX; n + 1];
    {
        let mut pos = 0usize;
        for j in 0..=n {
            if j > 0 {
                pos_of_g[j] = pos;
                pos += 1;
            }
            let pinned = (j == 0 && pin_left) || (j == n && pin_right);
            if !pinned {
                pos_of_p[j] = pos;
                pos += 1;
            }
        }
        debug_assert_eq!(pos, size);
    }

    // couplings S[P_{j-1}, G_j] = +Phi(x_j)/sqrt(h m_{j-1}),
    //           S[G_j, P_j]     = -Phi(x_j)/sqrt(h m_j)
    for j in 1..=n {
        let lphi = mode.w.log_phi(xj(j));
        if pos_of_p[j - 1] != usize::MAX {
            let e = (lphi - 0.5 * masses[j - 1].log()).exp() / h.sqrt();
            let (a, b) = (pos_of_p[j - 1], pos_of_g[j]);
            debug_assert_eq!(b, a + 1);
            off[a] = e;
        }
        if pos_of_p[j] != usize::MAX {
            let e = -(lphi - 0.5 * masses[j].log()).exp() / h.sqrt();
            let (a, b) = (pos_of_g[j], pos_of_p[j]);
            debug_assert_eq!(b, a + 1);
            off[a] = e;
        }
    }

    // mixed trace conditions enter diagonally through the end fluxes
    if let EndClosure::Bc(tb) = mode.left {
        match tb {
            TraceBc::Mixed(g0) => {
                let val = -g0 * (2.0 * mode.w.log_phi(mode.r0) - masses[0].log()).exp();
                diag[pos_of_p[0]] = val;
            }
            TraceBc::MixedComplex(g0) => {
                let val = -g0 * (2.0 * mode.w.log_phi(mode.r0) - masses[0].log()).exp();
                complex_corner = Some((pos_of_p[0], val));
            }
            _ => {}
        }
    }
    if let EndClosure::Bc(tb) = mode.right {
        match tb {
            TraceBc::Mixed(g1) => {
                let val = g1 * (2.0 * mode.w.log_phi(mode.r1) - masses[n].log()).exp();
                diag[pos_of_p[n]] = val;
            }
            TraceBc::MixedComplex(g1) => {
                let val = g1 * (2.0 * mode.w.log_phi(mode.r1) - masses[n].log()).exp();
                complex_corner = Some((pos_of_p[n], val));
            }
            _ => {}
        }
    }

    let log_phi_p: Vec<f64> = (0..=n)
        .map(|j| if j == 0 && mode.r0 == 0.0 { f64::NEG_INFINITY } else { mode.w.log_phi(yj(j)) })
        .collect();
    // at an interior left pole node y_0 = 0, P_0 is finite but Phi(0) = 0 for
    // c > 0 except u_hat(0) = 0 anyway; encode exp(-inf) = 0 naturally

    let mass_logs: Vec<f64> = masses.iter().map(|m| m.log()).collect();

    if let Some((pos, val)) = complex_corner {
        // dense complex matrix: symmetric part plus the complex corner
        let mut m = CMatrix::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = C64::new(diag[i], 0.0);
            if i + 1 < size {
                m[(i, i + 1)] = C64::new(off[i], 0.0);
                m[(i + 1, i)] = C64::new(off[i], 0.0);
            }
        }
        m[(pos, pos)] = val;
        Ok(RadialMatrix {
            mode: mode.clone(),
            resolution: n,
            h,
            tri: None,
            dense: Some(m),
            pin_left,
            pin_right,
            log_phi_p,

            mass_logs,
        })
    } else {
        Ok(RadialMatrix {
            mode: mode.clone(),
            resolution: n,
            h,
            tri: Some(SymTridiag { d: diag, e: off }),
            dense: None,
            pin_left,
            pin_right,
            log_phi_p,

            mass_logs,
        })
    }
}

/// Independent second-order action of the per-mode connection Laplacian on a
/// vector in the symmetric interleaved coordinates, for interior rows.
/// Used by the Bochner checks: res = ||(S^2 - (this + kappa)) z|| on smooth z.
pub fn connection_action(
    rm: &RadialMatrix,
    z: &[f64],
    kappa: f64,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let n = rm.resolution;
    let h = rm.h;
    let mode = &rm.mode;
    // unpack to u_hat at integer nodes and v_hat at half nodes
    let mut p = vec![0.0; n + 1];
    let mut g = vec![0.0; n + 1];
    {
        let mut pos = 0usize;
        for j in 0..=n {
            if j > 0 {
                g[j] = z[pos];
                pos += 1;
            }
            let pinned = (j == 0 && rm.pin_left) || (j == n && rm.pin_right);
            if !pinned {
                p[j] = z[pos];
                pos += 1;
            }
        }
    }
    let u_hat: Vec<f64> = (0..=n)
        .map(|j| {
            if p[j] == 0.0 {
                0.0
            } else {
                p[j] * (rm.log_phi_p[j] - 0.5 * rm.mass_logs[j]).exp()
            }
        })
        .collect();
    let v_hat: Vec<f64> = (1..=n).map(|j| g[j] / h.sqrt()).collect();

    let yj = |j: usize| mode.r0 + j as f64 * h;
    let xj = |j: usize| mode.r0 + (j as f64 - 0.5) * h;

    // -f'' + (w^2 +- w') f - kappa f by plain 3-point differences. Rows are
    // restricted to a fixed interior band: near regular-singular endpoints
    // the flattened fields carry fractional powers that the plain stencil
    // cannot resolve, while the integrating-factor scheme handles them
    // exactly, so an entry comparison there would not converge.
    let len = mode.r1 - mode.r0;
    let band = |t: f64| t >= mode.r0 + 0.15 * len && t <= mode.r1 - 0.15 * len;
    let mut out = vec![0.0; z.len()];
    let mut interior = Vec::new();
    for j in 2..n.saturating_sub(1) {
        if rm.log_phi_p[j] == f64::NEG_INFINITY || !band(yj(j)) {
            continue;
        }
        let r = yj(j);
        let q = {
            let w = mode.w.value(r);
            let wp = mode.w.derivative(r);
            w * w + wp - kappa
        };
        let val = (-u_hat[j + 1] + 2.0 * u_hat[j] - u_hat[j - 1]) / (h * h) + q * u_hat[j];
        // back to symmetric coordinates
        if pos_of(rm, j, true) != usize::MAX {
            let pos = pos_of(rm, j, true);
            out[pos] = val / (rm.log_phi_p[j] - 0.5 * rm.mass_logs[j]).exp();
            interior.push(pos);
        }
    }
    for j in 2..n.saturating_sub(1) {
        let r = xj(j);
        if !band(r) {
            continue;
        }
        let q = {
            let w = mode.w.value(r);
            let wp = mode.w.derivative(r);
            w * w - wp - kappa
        };
        let val =
            (-v_hat[j] + 2.0 * v_hat[j - 1] - v_hat[j - 2]) / (h * h) + q * v_hat[j - 1];
        let pos = pos_of(rm, j, false);
        out[pos] = val * h.sqrt();
        interior.push(pos);
    }
    Ok((out, interior))
}

fn pos_of(rm: &RadialMatrix, j: usize, is_p: bool) -> usize {
    let n = rm.resolution;
    let mut pos = 0usize;
    for jj in 0..=n {
        if jj > 0 {
            if !is_p && jj == j {
                return pos;
            }
            pos += 1;
        }
        let pinned = (jj == 0 && rm.pin_left) || (jj == n && rm.pin_right);
        if !pinned {
            if is_p && jj == j {
                return pos;
            }
            pos += 1;
        } else if is_p && jj == j {
            return usize::MAX;
        }
    }
    usize::MAX
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_geometry;

    fn disk_bundle() -> DiracBundleSpec {
        DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::UnitDisk { radius: 1.0 }).unwrap(),
        )
    }

    #[test]
    fn disk_mode_reduction_shapes() {
        let bc = BoundaryCondition::LocalChirality { sign: 1 };
        let modes = reduce_modes(&disk_bundle(), Some(&bc), &[0, 1, -1, -2]).unwrap();
        assert_eq!(modes.len(), 4);
        // m >= 0 unflipped, m <= -1 flipped to positive pole strength
        assert!(!modes[0].flipped);
        assert!(modes[2].flipped);
        for m in &modes {
            assert!(m.w.pole_coefficient().unwrap() > 0.0);
        }
    }

    #[test]
    fn local_condition_eigen_first_mode() {
        // mode m = 0, local(+): smallest positive root of J0 + J1 = 0
        // (shooting/Bessel oracle; see special::bessel_j)
        let target = {
            // bisection on J0(x) + J1(x)
            let f = |x: f64| crate::special::bessel_j(0, x) + crate::special::bessel_j(1, x);
            let (mut a, mut b) = (2.5f64, 3.5f64);
            assert!(f(a) * f(b) < 0.0);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if f(a) * f(m) <= 0.0 {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        };
        let bc = BoundaryCondition::LocalChirality { sign: 1 };
        let modes = reduce_modes(&disk_bundle(), Some(&bc), &[0]).unwrap();
        let mut errs = Vec::new();
        for res in [64usize, 128, 256] {
            let rm = assemble_radial(&modes[0], res).unwrap();
            let eigs = rm.eigenpairs(6).unwrap();
            // smallest positive eigenvalue
            let lam = eigs
                .iter()
                .map(|e| e.lambda)
                .filter(|l| *l > 0.0)
                .fold(f64::INFINITY, f64::min);
            errs.push(((res as f64).recip(), (lam - target).abs()));
        }
        let order = crate::util::quad::fitted_order(&errs);
        assert!(order > 1.8, "observed order {order}, errors {errs:?}");
        assert!(errs[2].1 < 1e-3);
    }

    #[test]
    fn sphere_mode_ground_state() {
        // unit S^2: smallest |lambda| = 1
        let s2 = DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::RoundSphere { n: 2, radius: 1.0 }).unwrap(),
        );
        let modes = reduce_modes(&s2, None, &[0]).unwrap();
        assert_eq!(modes.len(), 2);
        for mode in &modes {
            let rm = assemble_radial(mode, 128).unwrap();
            let eigs = rm.eigenpairs(2).unwrap();
            assert!(
                (eigs[0].lambda.abs() - 1.0).abs() < 2e-4,
                "mode {:?}: lambda {}",
                mode.key,
                eigs[0].lambda
            );
        }
    }

    #[test]
    fn aps_overdetermined_and_gap_modes() {
        let bc = BoundaryCondition::Aps { b: -1.0 };
        let modes = reduce_modes(&disk_bundle(), Some(&bc), &[0]).unwrap();
        // mode 0 has |mu| = 1/2 < |b|: both trace components killed
        assert!(modes[0].is_overdetermined());
        let bc = BoundaryCondition::Aps { b: 0.5 };
        let modes = reduce_modes(&disk_bundle(), Some(&bc), &[0]).unwrap();
        assert!(modes[0].has_condition_gap().is_some());
    }

    #[test]
    fn mit_produces_complex_matrix() {
        let bc = BoundaryCondition::MitBag { sign: 1 };
        let modes = reduce_modes(&disk_bundle(), Some(&bc), &[0]).unwrap();
        let rm = assemble_radial(&modes[0], 32).unwrap();
        assert!(rm.tri.is_none());
        assert!(rm.dense.is_some());
        assert!(rm.eigenpairs(1).is_err());
    }
}
