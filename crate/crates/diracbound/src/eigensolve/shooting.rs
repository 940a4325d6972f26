//! ODE shooting for the reduced per-mode problems: Frobenius series at
//! regular-singular poles, fixed-step RK4 with Richardson extrapolation and
//! the variational system for the lambda-derivative, boundary matching
//! determinants, and complex root location by argument-principle counting
//! followed by Newton polishing.

use crate::error::{DiracError, Result};
use crate::operators::radial::{EndClosure, RadialMode, TraceBc};
use num_complex::Complex64 as C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Copy, Debug)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn center(&self) -> C64 {
        c(0.5 * (self.re_lo + self.re_hi), 0.5 * (self.im_lo + self.im_hi))
    }
    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_lo - slack
            && z.re <= self.re_hi + slack
            && z.im >= self.im_lo - slack
            && z.im <= self.im_hi + slack
    }
    fn max_abs(&self) -> f64 {
        let c1 = self.re_lo.abs().max(self.re_hi.abs());
        let c2 = self.im_lo.abs().max(self.im_hi.abs());
        c1.hypot(c2)
    }
}

#[derive(Clone, Debug)]
pub struct ShootingProblem {
    pub mode: RadialMode,
    pub region: Rect,
    /// base RK4 step count (doubled internally for Richardson)
    pub base_steps: usize,
}

/// state (u, v, du/dl, dv/dl)
type State = [C64; 4];

fn rhs(mode: &RadialMode, r: f64, lambda: C64, y: &State) -> State {
    let w = mode.w.value(r);
    [
        y[0] * w - y[1] * lambda,
        y[0] * lambda - y[1] * w,
        y[2] * w - y[3] * lambda - y[1],
        y[2] * lambda - y[3] * w + y[0],
    ]
}

fn rk4_segment(mode: &RadialMode, lambda: C64, a: f64, b: f64, steps: usize, y: &mut State) {
    let h = (b - a) / steps as f64;
    let mut r = a;
    for _ in 0..steps {
        let k1 = rhs(mode, r, lambda, y);
        let y2 = advance(y, &k1, 0.5 * h);
        let k2 = rhs(mode, r + 0.5 * h, lambda, &y2);
        let y3 = advance(y, &k2, 0.5 * h);
        let k3 = rhs(mode, r + 0.5 * h, lambda, &y3);
        let y4 = advance(y, &k3, h);
        let k4 = rhs(mode, r + h, lambda, &y4);
        for i in 0..4 {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        r += h;
    }
}

fn advance(y: &State, k: &State, h: f64) -> State {
    [y[0] + k[0] * h, y[1] + k[1] * h, y[2] + k[2] * h, y[3] + k[3] * h]
}

/// Frobenius data at a pole of strength c > 0:
/// u = t^c sum a_j t^j, v = t^{c+1} sum b_j t^j (a_0 = 1), evaluated without
/// the overall t^c factor, together with the lambda-derivatives.
fn frobenius_init(mode: &RadialMode, lambda: C64, t0: f64) -> State {
    let cc = mode.w.pole_coefficient().expect("pole requires singular profile");
    let tail = mode.w.laurent_tail(); // w1, w3, w5, w7, w9
    let order = 48usize;
    let mut a = vec![c(0.0, 0.0); order + 2];
    let mut b = vec![c(0.0, 0.0); order + 2];
    let mut da = vec![c(0.0, 0.0); order + 2];
    let mut db = vec![c(0.0, 0.0); order + 2];
    a[0] = c(1.0, 0.0);
    let w_at = |i: usize| -> f64 {
        match i {
            1 => tail[0],
            3 => tail[1],
            5 => tail[2],
            7 => tail[3],
            9 => tail[4],
            _ => 0.0,
        }
    };
    for j in 0..=order {
        // b_j = [lambda a_j - sum w_i b_{j-1-i}] / (2c + 1 + j)
        let mut acc = lambda * a[j];
        let mut dacc = a[j] + lambda * da[j];
        let mut i = 1usize;
        while i <= 9 && i + 1 <= j {
            let wi = w_at(i);
            if wi != 0.0 {
                acc -= b[j - 1 - i] * wi;
                dacc -= db[j - 1 - i] * wi;
            }
            i += 2;
        }
        let den = 2.0 * cc + 1.0 + j as f64;
        b[j] = acc / den;
        db[j] = dacc / den;
        // a_{j+1} = [sum w_i a_{j-i} - lambda b_{j-1}] / (j + 1)
        let mut acc = c(0.0, 0.0);
        let mut dacc = c(0.0, 0.0);
        let mut i = 1usize;
        while i <= 9 && i <= j {
            let wi = w_at(i);
            if wi != 0.0 {
                acc += a[j - i] * wi;
                dacc += da[j - i] * wi;
            }
            i += 2;
        }
        if j >= 1 {
            acc -= lambda * b[j - 1];
            dacc -= b[j - 1] + lambda * db[j - 1];
        }
        let den = (j + 1) as f64;
        a[j + 1] = acc / den;
        da[j + 1] = dacc / den;
    }
    // evaluate at t0 by Horner
    let eval = |coef: &[C64]| -> C64 {
        let mut acc = c(0.0, 0.0);
        for j in (0..=order).rev() {
            acc = acc * t0 + coef[j];
        }
        acc
    };
    [eval(&a), eval(&b) * t0, eval(&da), eval(&db) * t0]
}

fn left_boundary_init(tb: &TraceBc) -> Result<State> {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    Ok(match tb {
        TraceBc::PinU => [zero, one, zero, zero],
        TraceBc::Natural => [one, zero, zero, zero],
        TraceBc::Mixed(g) => [one, c(*g, 0.0), zero, zero],
        TraceBc::MixedComplex(g) => [one, *g, zero, zero],
        TraceBc::NoCondition | TraceBc::Overdetermined => {
            return Err(DiracError::capability(
                "mode has no shooting determinant (projector gap or full pinning)",
            ))
        }
    })
}

fn right_eval(tb: &TraceBc, y: &State) -> Result<(C64, C64)> {
    Ok(match tb {
        TraceBc::PinU => (y[0], y[2]),
        TraceBc::Natural => (y[1], y[3]),
        TraceBc::Mixed(g) => (y[1] - y[0] * *g, y[3] - y[2] * *g),
        TraceBc::MixedComplex(g) => (y[1] - y[0] * *g, y[3] - y[2] * *g),
        TraceBc::NoCondition | TraceBc::Overdetermined => {
            return Err(DiracError::capability(
                "mode has no shooting determinant (projector gap or full pinning)",
            ))
        }
    })
}

impl ShootingProblem {
    pub fn new(mode: RadialMode, region: Rect) -> Self {
        ShootingProblem { mode, region, base_steps: 1200 }
    }

    fn steps_for(&self, lambda_abs: f64) -> usize {
        let len = self.mode.r1 - self.mode.r0;
        let wb = match self.mode.left {
            EndClosure::Pole => 6.0,
            _ => self
                .mode
                .w
                .value(self.mode.r0.max(1e-9))
                .abs()
                .max(self.mode.w.value(self.mode.r1).abs()),
        };
        let need = (10.0 * (lambda_abs + wb + 2.0) * len) as usize;
        self.base_steps.max(need).min(60_000)
    }

    fn shoot_once(&self, lambda: C64, steps: usize) -> Result<(C64, C64)> {
        let mode = &self.mode;
        let len = mode.r1 - mode.r0;
        let two_pole = matches!(mode.right, EndClosure::Pole);
        // keep the series hand-off inside the region where the truncated
        // cotangent tail is far below the target accuracy
        let t_break = |lam: f64| -> f64 { (0.15 * len).min(2.5 / (1.0 + lam)).max(1e-4 * len) };

        match (&mode.left, two_pole) {
            (EndClosure::Pole, false) => {
                let tb = t_break(lambda.norm());
                let mut y = frobenius_init(mode, lambda, tb);
                rk4_segment(mode, lambda, mode.r0 + tb, mode.r1, steps, &mut y);
                let EndClosure::Bc(rbc) = &mode.right else { unreachable!() };
                right_eval(rbc, &y)
            }
            (EndClosure::Pole, true) => {
                // two-sided shooting to the midpoint; the mirrored system in
                // psi = r1 - r swaps the components and keeps the profile
                let tb = t_break(lambda.norm());
                let mid = 0.5 * len;
                let mut yl = frobenius_init(mode, lambda, tb);
                rk4_segment(mode, lambda, tb, mid, steps, &mut yl);
                let mut yr = frobenius_init(mode, lambda, tb);
                rk4_segment(mode, lambda, tb, mid, steps, &mut yr);
                // right side solution in original variables: (u, v) = (yr[1], yr[0])
                let f = yl[0] * yr[0] - yr[1] * yl[1];
                let df = yl[2] * yr[0] + yl[0] * yr[2] - yr[3] * yl[1] - yr[1] * yl[3];
                Ok((f, df))
            }
            (EndClosure::Bc(lbc), false) => {
                let mut y = left_boundary_init(lbc)?;
                rk4_segment(mode, lambda, mode.r0, mode.r1, steps, &mut y);
                let EndClosure::Bc(rbc) = &mode.right else { unreachable!() };
                right_eval(rbc, &y)
            }
            (EndClosure::Bc(_), true) => Err(DiracError::capability(
                "left boundary with right pole is not in the catalog",
            )),
        }
    }

    /// Matching determinant and its lambda-derivative, Richardson
    /// extrapolated over a step doubling. The step count is set by the
    /// region's largest |lambda| so the determinant varies smoothly along
    /// contours.
    pub fn determinant(&self, lambda: C64) -> Result<(C64, C64)> {
        let steps = self.steps_for(self.region.max_abs().max(lambda.norm()));
        let (f1, _) = self.shoot_once(lambda, steps / 2)?;
        let (f2, df2) = self.shoot_once(lambda, steps)?;
        Ok(((f2 * 16.0 - f1) / 15.0, df2))
    }

    /// Finite-difference Cauchy-Riemann defect of the determinant at a
    /// sample point, normalized by the local derivative scale.
    pub fn cauchy_riemann_defect(&self, lambda: C64, h: f64) -> Result<f64> {
        let f = |z: C64| -> Result<C64> { Ok(self.determinant(z)?.0) };
        let dx = (f(lambda + c(h, 0.0))? - f(lambda - c(h, 0.0))?) / (2.0 * h);
        let dy = (f(lambda + c(0.0, h))? - f(lambda - c(0.0, h))?) / (2.0 * h);
        let defect = (dx - dy / c(0.0, 1.0)).norm();
        Ok(defect / dx.norm().max(dy.norm()).max(1e-300))
    }
}

/// Winding number of the determinant along the rectangle boundary, with
/// adaptive refinement until consecutive phase jumps are small. Returns the
/// winding count and a magnitude scale of |f| along the contour.
fn winding_number(problem: &ShootingProblem, rect: &Rect) -> Result<(i64, f64)> {
    let corners = [
        c(rect.re_lo, rect.im_lo),
        c(rect.re_hi, rect.im_lo),
        c(rect.re_hi, rect.im_hi),
        c(rect.re_lo, rect.im_hi),
        c(rect.re_lo, rect.im_lo),
    ];
    let mut total = 0.0f64;
    let mut scale = 0.0f64;
    let mut min_abs = f64::INFINITY;
    let len = problem.mode.r1 - problem.mode.r0;
    for e in 0..4 {
        let (za, zb) = (corners[e], corners[e + 1]);
        // the determinant has exponential type ~ len, so seed the edge with
        // enough samples that no 2 pi phase wrap can alias away
        let seeds = ((zb - za).norm() * len * 2.0).ceil().max(8.0) as usize;
        let mut pts: Vec<f64> = (0..=seeds).map(|i| i as f64 / seeds as f64).collect();
        let mut vals: Vec<C64> = Vec::new();
        for t in &pts {
            vals.push(problem.determinant(za + (zb - za) * *t)?.0);
        }
        let mut i = 0usize;
        let mut guard = 0usize;
        while i + 1 < pts.len() {
            let dphi = phase_jump(vals[i], vals[i + 1]);
            if dphi.abs() > 0.9 && pts[i + 1] - pts[i] > 1e-6 {
                guard += 1;
                if guard > 4000 {
                    return Err(DiracError::IncompleteSearch { expected: 0, found: 0 });
                }
                let tm = 0.5 * (pts[i] + pts[i + 1]);
                let fm = problem.determinant(za + (zb - za) * tm)?.0;
                pts.insert(i + 1, tm);
                vals.insert(i + 1, fm);
            } else {
                total += dphi;
                scale = scale.max(vals[i].norm());
                min_abs = min_abs.min(vals[i].norm());
                i += 1;
            }
        }
        scale = scale.max(vals.last().unwrap().norm());
        min_abs = min_abs.min(vals.last().unwrap().norm());
    }
    if min_abs < 1e-12 * scale.max(1e-300) {
        // a root sits (numerically) on the contour; caller jitters the box
        return Err(DiracError::IncompleteSearch { expected: 0, found: 0 });
    }
    let w = total / (2.0 * std::f64::consts::PI);
    if (w - w.round()).abs() > 1e-3 {
        return Err(DiracError::IncompleteSearch { expected: 0, found: 0 });
    }
    Ok((w.round() as i64, scale))
}

fn phase_jump(a: C64, b: C64) -> f64 {
    let ratio = b / a;
    ratio.im.atan2(ratio.re)
}

fn newton_polish(problem: &ShootingProblem, start: C64, scale: f64) -> Option<C64> {
    let mut z = start;
    for _ in 0..80 {
        let Ok((f, df)) = problem.determinant(z) else { return None };
        if df.norm() < 1e-300 {
            return None;
        }
        let step = f / df;
        z -= step;
        if step.norm() < 1e-13 * (1.0 + z.norm()) {
            let Ok((fz, _)) = problem.determinant(z) else { return None };
            if fz.norm() <= 1e-10 * scale.max(1e-300) {
                return Some(z);
            }
            return None;
        }
    }
    None
}

/// All determinant roots inside the problem's region, by recursive
/// argument-principle subdivision and Newton polishing. The number of
/// located roots is certified against the total contour count.
pub fn nonnormal_mode_roots(problem: &ShootingProblem) -> Result<Vec<C64>> {
    let mut rect = problem.region;
    let mut jitter = 0usize;
    let (expected, _) = loop {
        match winding_number(problem, &rect) {
            Ok(v) => break v,
            Err(_) if jitter < 6 => {
                jitter += 1;
                let d = 3e-4 * jitter as f64 * (1.0 + rect.max_abs());
                rect = Rect {
                    re_lo: rect.re_lo - d,
                    re_hi: rect.re_hi + d * 0.7,
                    im_lo: rect.im_lo - d * 0.9,
                    im_hi: rect.im_hi + d * 1.1,
                };
            }
            Err(e) => return Err(e),
        }
    };
    let mut roots = collect_roots(problem, &rect, 0)?;
    dedupe(&mut roots);
    if roots.len() != expected as usize {
        return Err(DiracError::IncompleteSearch { expected: expected as usize, found: roots.len() });
    }
    Ok(roots)
}

fn collect_roots(problem: &ShootingProblem, rect: &Rect, depth: usize) -> Result<Vec<C64>> {
    if depth > 48 {
        return Err(DiracError::IncompleteSearch { expected: 1, found: 0 });
    }
    let (count, scale) = match winding_number(problem, rect) {
        Ok(v) => v,
        Err(_) => {
            // a root sits near the contour: jitter the box once at this level
            let d = 1e-4 * (1.0 + rect.max_abs());
            let r2 = Rect {
                re_lo: rect.re_lo - d,
                re_hi: rect.re_hi + 0.7 * d,
                im_lo: rect.im_lo - 1.3 * d,
                im_hi: rect.im_hi + d,
            };
            winding_number(problem, &r2)?
        }
    };
    if count == 0 {
        return Ok(Vec::new());
    }
    let size = (rect.re_hi - rect.re_lo).max(rect.im_hi - rect.im_lo);
    if count >= 1 {
        let starts = [
            rect.center(),
            rect.center() + c(0.21 * (rect.re_hi - rect.re_lo), 0.13 * (rect.im_hi - rect.im_lo)),
            rect.center() - c(0.17 * (rect.re_hi - rect.re_lo), 0.23 * (rect.im_hi - rect.im_lo)),
        ];
        if count == 1 || size < 1e-8 {
            for s in starts {
                if let Some(root) = newton_polish(problem, s, scale) {
                    if rect.contains(root, 1e-6 * (1.0 + root.norm())) {
                        // count > 1 at tiny size is a genuinely multiple root;
                        // duplicate entries keep the census consistent
                        return Ok(vec![root; count as usize]);
                    }
                }
            }
            if size < 1e-8 {
                return Err(DiracError::IncompleteSearch { expected: count as usize, found: 0 });
            }
        }
    }
    // split the longer side at an irrational-ish ratio to avoid roots on cuts
    let t = 0.5136;
    let (ra, rb) = if rect.re_hi - rect.re_lo >= rect.im_hi - rect.im_lo {
        let cut = rect.re_lo + t * (rect.re_hi - rect.re_lo);
        (Rect { re_hi: cut, ..*rect }, Rect { re_lo: cut, ..*rect })
    } else {
        let cut = rect.im_lo + t * (rect.im_hi - rect.im_lo);
        (Rect { im_hi: cut, ..*rect }, Rect { im_lo: cut, ..*rect })
    };
    let mut found = collect_roots(problem, &ra, depth + 1)?;
    found.extend(collect_roots(problem, &rb, depth + 1)?);
    Ok(found)
}

fn dedupe(roots: &mut Vec<C64>) {
    let mut out: Vec<C64> = Vec::new();
    for r in roots.iter() {
        if !out.iter().any(|o| (o - r).norm() < 1e-7 * (1.0 + r.norm())) {
            out.push(*r);
        }
    }
    *roots = out;
}

/// Real-axis roots in [lo, hi]: bracket by sign changes of the (real)
/// determinant, then Newton. Used as the fast path for real-spectrum
/// boundary conditions; the rectangle count certifies completeness.
pub fn real_axis_roots(problem: &ShootingProblem, lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    let mut xs = Vec::with_capacity(samples + 1);
    let mut fs = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        let f = problem.determinant(c(x, 0.0))?.0;
        xs.push(x);
        fs.push(f.re);
    }
    let scale = fs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut roots = Vec::new();
    for i in 0..samples {
        if fs[i] == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if fs[i] * fs[i + 1] < 0.0 {
            let polished = newton_polish(problem, c(0.5 * (xs[i] + xs[i + 1]), 0.0), scale)
                // Newton may wander to a neighbouring root; keep the bracket
                .filter(|r| r.re >= xs[i] - 1e-9 && r.re <= xs[i + 1] + 1e-9);
            if let Some(root) = polished {
                roots.push(root.re);
            } else {
                // fall back to bisection
                let (mut a, mut b) = (xs[i], xs[i + 1]);
                let mut fa = fs[i];
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    let fm = problem.determinant(c(m, 0.0))?.0.re;
                    if fa * fm <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                        fa = fm;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + a.abs()));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::DiracBundleSpec;
    use crate::geometry::{make_geometry, GeometryKind};
    use crate::operators::radial::reduce_modes;
    use crate::operators::BoundaryCondition;
    use crate::special::bessel_j;

    fn disk_problem(bc: BoundaryCondition, m: i64, rect: Rect) -> ShootingProblem {
        let bundle = DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::UnitDisk { radius: 1.0 }).unwrap(),
        );
        let modes = reduce_modes(&bundle, Some(&bc), &[m]).unwrap();
        ShootingProblem::new(modes[0].clone(), rect)
    }

    #[test]
    fn determinant_matches_bessel_oracle() {
        // local(-) mode 0: det proportional to J0(lambda) - J1(lambda)
        let p = disk_problem(
            BoundaryCondition::LocalChirality { sign: -1 },
            0,
            Rect { re_lo: 0.2, re_hi: 4.0, im_lo: -0.5, im_hi: 0.5 },
        );
        // compare determinant zeros against the Bessel zero of J0 - J1
        let roots = real_axis_roots(&p, 0.2, 4.0, 60).unwrap();
        let f = |x: f64| bessel_j(0, x) - bessel_j(1, x);
        let (mut a, mut b) = (1.2f64, 1.7f64);
        assert!(f(a) * f(b) < 0.0);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let bessel_root = 0.5 * (a + b);
        assert!(
            roots.iter().any(|r| (r - bessel_root).abs() < 1e-9),
            "roots {roots:?} vs bessel {bessel_root}"
        );
    }

    #[test]
    fn mit_roots_are_complex_and_counted() {
        let p = disk_problem(
            BoundaryCondition::MitBag { sign: 1 },
            0,
            Rect { re_lo: 0.05, re_hi: 4.5, im_lo: -2.0, im_hi: 2.0 },
        );
        let roots = nonnormal_mode_roots(&p).unwrap();
        assert!(!roots.is_empty());
        for r in &roots {
            assert!(r.im.abs() > 1e-6, "MIT root {r} unexpectedly real");
            let (f, _) = p.determinant(*r).unwrap();
            assert!(f.norm() < 1e-9);
        }
    }

    #[test]
    fn holomorphy_of_determinant() {
        let p = disk_problem(
            BoundaryCondition::MitBag { sign: 1 },
            1,
            Rect { re_lo: 0.1, re_hi: 4.0, im_lo: -1.5, im_hi: 1.5 },
        );
        for z in [c(1.0, 0.3), c(2.5, -0.4)] {
            let defect = p.cauchy_riemann_defect(z, 1e-5).unwrap();
            assert!(defect < 1e-6, "CR defect {defect} at {z}");
        }
    }

    #[test]
    fn sphere_two_sided_shooting_hits_exact_spectrum() {
        let s2 = DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::RoundSphere { n: 2, radius: 1.0 }).unwrap(),
        );
        let modes = reduce_modes(&s2, None, &[0]).unwrap();
        for mode in modes {
            let p = ShootingProblem::new(
                mode,
                Rect { re_lo: -3.6, re_hi: 3.6, im_lo: -0.4, im_hi: 0.4 },
            );
            let roots = real_axis_roots(&p, -3.6, 3.6, 120).unwrap();
            assert!(!roots.is_empty());
            for r in &roots {
                let nearest = r.abs().round();
                assert!(
                    (r.abs() - nearest).abs() < 1e-8,
                    "sphere root {r} not near integer"
                );
            }
            assert!(roots.iter().any(|r| (r.abs() - 1.0).abs() < 1e-8));
        }
    }
}
