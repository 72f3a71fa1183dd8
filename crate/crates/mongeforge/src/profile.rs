//! Profile algebra for the one-dimensional reductions.
//!
//! A conical piece is `u = u0 + rho * alpha(theta)` with
//! `alpha'' + alpha = kappa` on an angular interval; a cylindrical piece is
//! `u = alpha(x) + v0 * y` with `alpha'' = kappa`. The density `kappa` is the
//! transverse curvature of the piece. Both initial value problems are solved
//! in closed form (variation of parameters), so evaluation, moments and the
//! gluing solver are quadrature-free.

use crate::error::ProfileError;
use crate::plane::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Resonance window for the conical ODE: a term `cos/sin(omega theta)` with
/// `omega = 1` has a secular particular solution.
const RESONANT_EPS: f64 = 1e-12;

/// One trigonometric term `a cos(omega s) + b sin(omega s)`, `omega >= 0`.
///
/// Frequencies are arbitrary nonnegative reals so that endpoint-vanishing
/// bases `sin(j pi (s - a) / (b - a))` exist on intervals of any width;
/// periodic profiles additionally require integer frequencies.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct TrigTerm {
    #[serde(rename = "k")]
    pub omega: f64,
    #[serde(rename = "a", default)]
    pub cos: f64,
    #[serde(rename = "b", default)]
    pub sin: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigSeries {
    pub terms: Vec<TrigTerm>,
}

impl TrigSeries {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigSeries { terms }
    }

    pub fn constant(c: f64) -> Self {
        TrigSeries {
            terms: vec![TrigTerm {
                omega: 0.0,
                cos: c,
                sin: 0.0,
            }],
        }
    }

    pub fn single(omega: f64, cos: f64, sin: f64) -> Self {
        TrigSeries {
            terms: vec![TrigTerm { omega, cos, sin }],
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.cos * (t.omega * s).cos() + t.sin * (t.omega * s).sin())
            .sum()
    }

    pub fn deriv(&self, s: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.omega * (-t.cos * (t.omega * s).sin() + t.sin * (t.omega * s).cos()))
            .sum()
    }

    pub fn coeff_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.cos.abs() + t.sin.abs()).sum()
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.coeff_norm() <= eps
    }

    /// Linear combination of several series.
    pub fn combine(series: &[TrigSeries], coeffs: &[f64]) -> TrigSeries {
        let mut terms: Vec<TrigTerm> = Vec::new();
        for (s, &c) in series.iter().zip(coeffs) {
            for t in &s.terms {
                terms.push(TrigTerm {
                    omega: t.omega,
                    cos: c * t.cos,
                    sin: c * t.sin,
                });
            }
        }
        terms.sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
        let mut merged: Vec<TrigTerm> = Vec::new();
        for t in terms {
            match merged.last_mut() {
                Some(m) if (m.omega - t.omega).abs() < 1e-14 => {
                    m.cos += t.cos;
                    m.sin += t.sin;
                }
                _ => merged.push(t),
            }
        }
        TrigSeries { terms: merged }
    }

    /// Particular solution `P` of `P'' + P = term` and its derivative at `s`.
    fn particular(&self, s: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for t in &self.terms {
            let (c, sn) = ((t.omega * s).cos(), (t.omega * s).sin());
            if (t.omega - 1.0).abs() <= RESONANT_EPS {
                // resonance: P = (s/2)(a sin s - b cos s)
                let q = t.cos * sn - t.sin * c;
                let dq = t.cos * c + t.sin * sn;
                p += 0.5 * s * q;
                dp += 0.5 * q + 0.5 * s * dq;
            } else {
                let d = 1.0 - t.omega * t.omega;
                p += (t.cos * c + t.sin * sn) / d;
                dp += t.omega * (-t.cos * sn + t.sin * c) / d;
            }
        }
        (p, dp)
    }

    /// Projections onto the first harmonic over a full period:
    /// `(int kappa cos, int kappa sin)` over `[0, 2pi]`, in closed form.
    pub fn first_harmonic_integrals(&self) -> (f64, f64) {
        let mut ic = 0.0;
        let mut is = 0.0;
        for t in &self.terms {
            let w = t.omega;
            if (w - 1.0).abs() <= RESONANT_EPS {
                ic += std::f64::consts::PI * t.cos;
                is += std::f64::consts::PI * t.sin;
            } else {
                let d = 1.0 - w * w;
                let s2 = (TAU * w).sin();
                let c2 = (TAU * w).cos();
                let i_cc = -w * s2 / d;
                let i_sc = -w * (1.0 - c2) / d;
                let i_cs = (1.0 - c2) / d;
                let i_ss = -s2 / d;
                ic += t.cos * i_cc + t.sin * i_sc;
                is += t.cos * i_cs + t.sin * i_ss;
            }
        }
        (ic, is)
    }
}

/// Polynomial density `kappa(x) = sum c_j x^j`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolySeries {
    pub coeffs: Vec<f64>,
}

impl PolySeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolySeries { coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// First antiderivative with zero constant.
    pub fn anti1(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * x + c / (j as f64 + 1.0);
        }
        acc * x
    }

    /// Second antiderivative with zero constants.
    pub fn anti2(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * x + c / ((j as f64 + 1.0) * (j as f64 + 2.0));
        }
        acc * x * x
    }

    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.coeff_norm() <= eps
    }

    pub fn combine(series: &[PolySeries], coeffs: &[f64]) -> PolySeries {
        let deg = series.iter().map(|s| s.coeffs.len()).max().unwrap_or(0);
        let mut out = vec![0.0; deg];
        for (s, &c) in series.iter().zip(coeffs) {
            for (j, v) in s.coeffs.iter().enumerate() {
                out[j] += c * v;
            }
        }
        PolySeries { coeffs: out }
    }
}

/// Affine map `p -> g . p + c`.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct AffineData {
    pub g: Vec2,
    pub c: f64,
}

impl AffineData {
    pub fn new(gx: f64, gy: f64, c: f64) -> Self {
        AffineData {
            g: Vec2::new(gx, gy),
            c,
        }
    }
    pub fn eval(&self, p: crate::plane::Point2) -> f64 {
        self.g.dot(p.to_vec()) + self.c
    }
}

/// Boundary profile of an affine function seen from a vertex: for
/// `u = g . p + c`, the angular profile is `alpha(theta) = g . e_rho(theta)`.
/// Returns `(alpha, alpha')` at `theta`.
pub fn harmonic_profile(aff: &AffineData, theta: f64) -> (f64, f64) {
    let e_rho = Vec2::new(theta.cos(), theta.sin());
    (aff.g.dot(e_rho), aff.g.dot(e_rho.perp()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConeSpan {
    /// Profile defined on `[theta_b, theta_f]`.
    UpTo(f64),
    /// 2pi-periodic profile (full cone).
    Periodic,
}

/// Conical profile: initial data at `theta_b` plus the density `kappa`;
/// `alpha` solves `alpha'' + alpha = kappa`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeProfile {
    pub theta_b: f64,
    pub span: ConeSpan,
    pub alpha_b: f64,
    pub dalpha_b: f64,
    pub kappa: TrigSeries,
}

impl ConeProfile {
    pub fn theta_f(&self) -> f64 {
        match self.span {
            ConeSpan::UpTo(t) => t,
            ConeSpan::Periodic => self.theta_b + TAU,
        }
    }

    /// `(alpha, alpha', alpha'')` at `theta` (absolute angle, expected within
    /// the span up to a small tolerance; periodic profiles accept any angle).
    pub fn eval(&self, theta: f64) -> (f64, f64, f64) {
        let d = theta - self.theta_b;
        let (cd, sd) = (d.cos(), d.sin());
        let (pb, dpb) = self.kappa.particular(self.theta_b);
        let (p, dp) = self.kappa.particular(theta);
        let a = self.alpha_b * cd + self.dalpha_b * sd + p - pb * cd - dpb * sd;
        let da = -self.alpha_b * sd + self.dalpha_b * cd + dp + pb * sd - dpb * cd;
        let dda = self.kappa.eval(theta) - a;
        (a, da, dda)
    }

    /// Transverse curvature density at `theta`.
    pub fn kappa_at(&self, theta: f64) -> f64 {
        self.kappa.eval(theta)
    }
}

/// Cylindrical profile anchored at `x_b`; `alpha'' = kappa`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylProfile {
    pub x_b: f64,
    pub alpha_b: f64,
    pub dalpha_b: f64,
    pub kappa: PolySeries,
}

impl CylProfile {
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let d = x - self.x_b;
        let p = self.kappa.anti2(x);
        let p1 = self.kappa.anti1(x);
        let pb = self.kappa.anti2(self.x_b);
        let pb1 = self.kappa.anti1(self.x_b);
        let a = self.alpha_b + self.dalpha_b * d + p - pb - pb1 * d;
        let da = self.dalpha_b + p1 - pb1;
        (a, da, self.kappa.eval(x))
    }

    pub fn kappa_at(&self, x: f64) -> f64 {
        self.kappa.eval(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Cone,
    Cyl,
}

/// Moment defect of a density over `[a, b]`: the deviation of the solution of
/// the homogeneous-initial-value problem from zero data at `b`:
///
/// * cone: `( int sin(b-s) kappa ds, int cos(b-s) kappa ds )`
/// * cylinder: `( int (b-s) kappa ds, int kappa ds )`
///
/// A profile glues two affine neighbors C^2 exactly when its density moments
/// match the prescribed target.
pub fn moment_defect_cone(kappa: &TrigSeries, a: f64, b: f64) -> (f64, f64) {
    let d = b - a;
    let (pa, dpa) = kappa.particular(a);
    let (pb, dpb) = kappa.particular(b);
    let m_val = pb - pa * d.cos() - dpa * d.sin();
    let m_der = dpb + pa * d.sin() - dpa * d.cos();
    (m_val, m_der)
}

pub fn moment_defect_cyl(kappa: &PolySeries, a: f64, b: f64) -> (f64, f64) {
    let m_val = kappa.anti2(b) - kappa.anti2(a) - kappa.anti1(a) * (b - a);
    let m_der = kappa.anti1(b) - kappa.anti1(a);
    (m_val, m_der)
}

/// Default endpoint-vanishing basis on `[a, b]`: `sin(j pi (s-a)/(b-a))`,
/// `j = 1..=5`, expanded as absolute-frequency terms.
pub fn default_cone_basis(a: f64, b: f64) -> Vec<TrigSeries> {
    let len = b - a;
    (1..=5)
        .map(|j| {
            let w = j as f64 * std::f64::consts::PI / len;
            // sin(w(s-a)) = cos(wa) sin(ws) - sin(wa) cos(ws)
            TrigSeries::single(w, -(w * a).sin(), (w * a).cos())
        })
        .collect()
}

/// Default endpoint-vanishing polynomial basis on `[a, b]`:
/// `(x-a)(b-x) x^m`, `m = 0..=2`.
pub fn default_cyl_basis(a: f64, b: f64) -> Vec<PolySeries> {
    (0..=2)
        .map(|m| {
            // (x-a)(b-x) = -x^2 + (a+b)x - ab
            let base = [-(a * b), a + b, -1.0];
            let mut coeffs = vec![0.0; m + 3];
            for (j, c) in base.iter().enumerate() {
                coeffs[j + m] = *c;
            }
            PolySeries { coeffs }
        })
        .collect()
}

/// Moment rows for a basis, optionally extended with endpoint-value rows.
fn moment_rows_cone(basis: &[TrigSeries], a: f64, b: f64, endpoint_zero: bool) -> Vec<Vec<f64>> {
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    let mut r3 = Vec::new();
    let mut r4 = Vec::new();
    for k in basis {
        let (mv, md) = moment_defect_cone(k, a, b);
        r1.push(mv);
        r2.push(md);
        if endpoint_zero {
            r3.push(k.eval(a));
            r4.push(k.eval(b));
        }
    }
    let mut rows = vec![r1, r2];
    if endpoint_zero {
        rows.push(r3);
        rows.push(r4);
    }
    rows
}

fn moment_rows_cyl(basis: &[PolySeries], a: f64, b: f64, endpoint_zero: bool) -> Vec<Vec<f64>> {
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    let mut r3 = Vec::new();
    let mut r4 = Vec::new();
    for k in basis {
        let (mv, md) = moment_defect_cyl(k, a, b);
        r1.push(mv);
        r2.push(md);
        if endpoint_zero {
            r3.push(k.eval(a));
            r4.push(k.eval(b));
        }
    }
    let mut rows = vec![r1, r2];
    if endpoint_zero {
        rows.push(r3);
        rows.push(r4);
    }
    rows
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solves the small linear system `rows . c = target` for basis coefficients.
/// With a zero target returns a deterministic unit-norm nontrivial null
/// vector (first significant component positive); otherwise the least-norm
/// solution. Residuals above `1e-12` (scaled) report infeasibility.
#[allow(clippy::needless_range_loop)]
fn solve_rows(rows: &[Vec<f64>], target: &[f64]) -> Result<Vec<f64>, ProfileError> {
    let n = rows[0].len();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    // Orthonormal basis of the row space.
    let mut onb: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        let mut w = r.clone();
        for q in &onb {
            let c = dot(&w, q);
            axpy(&mut w, -c, q);
        }
        let nw = dot(&w, &w).sqrt();
        if nw > 1e-10 * scale {
            for v in &mut w {
                *v /= nw;
            }
            onb.push(w);
        }
    }
    let t_norm = target.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if t_norm <= 1e-13 * scale.max(1.0) {
        // homogeneous: pick the coordinate direction farthest from the row
        // space and project it out
        let mut best: Option<(f64, Vec<f64>)> = None;
        for j in 0..n {
            let mut w = vec![0.0; n];
            w[j] = 1.0;
            for q in &onb {
                let c = dot(&w, q);
                axpy(&mut w, -c, q);
            }
            let nw = dot(&w, &w).sqrt();
            if best.as_ref().is_none_or(|(bn, _)| nw > *bn + 1e-15) {
                best = Some((nw, w));
            }
        }
        let (nw, mut w) = best.unwrap();
        if nw <= 1e-9 {
            return Err(ProfileError::TrivialOnly);
        }
        for v in &mut w {
            *v /= nw;
        }
        if let Some(first) = w.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                for v in &mut w {
                    *v = -*v;
                }
            }
        }
        return Ok(w);
    }
    // Least-norm solution: c = sum x_i q_i with rows . c = target.
    let r = onb.len();
    if r == 0 {
        return Err(ProfileError::Infeasible(t_norm));
    }
    // A[k][i] = rows[k] . q_i ; solve least squares via normal equations.
    let k = rows.len();
    let mut a = vec![vec![0.0; r]; k];
    for (ki, row) in rows.iter().enumerate() {
        for (i, q) in onb.iter().enumerate() {
            a[ki][i] = dot(row, q);
        }
    }
    let mut ata = vec![vec![0.0; r]; r];
    let mut atb = vec![0.0; r];
    for i in 0..r {
        for j in 0..r {
            ata[i][j] = (0..k).map(|m| a[m][i] * a[m][j]).sum();
        }
        atb[i] = (0..k).map(|m| a[m][i] * target[m]).sum();
    }
    // Gaussian elimination with partial pivoting on the r x r system.
    let mut m = ata;
    let mut rhs = atb;
    for col in 0..r {
        let piv = (col..r)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        if d.abs() < 1e-14 * scale * scale {
            return Err(ProfileError::Infeasible(t_norm));
        }
        for i in (col + 1)..r {
            let f = m[i][col] / d;
            for j in col..r {
                m[i][j] -= f * m[col][j];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; r];
    for i in (0..r).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..r {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    let mut c = vec![0.0; n];
    for (xi, q) in x.iter().zip(&onb) {
        axpy(&mut c, *xi, q);
    }
    // verify
    let mut resid = 0.0f64;
    for (row, t) in rows.iter().zip(target) {
        resid = resid.max((dot(row, &c) - t).abs());
    }
    if resid > 1e-12 * (1.0 + t_norm.max(scale)) {
        return Err(ProfileError::Infeasible(resid));
    }
    Ok(c)
}

/// Solves for basis coefficients of a conical density whose moment defect
/// over `[a, b]` equals `target`; with `endpoint_zero` the density is also
/// constrained to vanish at both endpoints.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // !(b > a) also rejects NaN spans
pub fn solve_kappa_cone(
    basis: &[TrigSeries],
    a: f64,
    b: f64,
    target: (f64, f64),
    endpoint_zero: bool,
) -> Result<Vec<f64>, ProfileError> {
    if basis.is_empty() {
        return Err(ProfileError::Invalid("empty basis".into()));
    }
    if !(b > a) || b - a > TAU + 1e-12 {
        return Err(ProfileError::Invalid(format!(
            "bad interval [{a}, {b}] for a conical density"
        )));
    }
    let rows = moment_rows_cone(basis, a, b, endpoint_zero);
    let mut t = vec![target.0, target.1];
    if endpoint_zero {
        t.push(0.0);
        t.push(0.0);
    }
    solve_rows(&rows, &t)
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // !(b > a) also rejects NaN spans
pub fn solve_kappa_cyl(
    basis: &[PolySeries],
    a: f64,
    b: f64,
    target: (f64, f64),
    endpoint_zero: bool,
) -> Result<Vec<f64>, ProfileError> {
    if basis.is_empty() {
        return Err(ProfileError::Invalid("empty basis".into()));
    }
    if !(b > a) {
        return Err(ProfileError::Invalid(format!("bad interval [{a}, {b}]")));
    }
    let rows = moment_rows_cyl(basis, a, b, endpoint_zero);
    let mut t = vec![target.0, target.1];
    if endpoint_zero {
        t.push(0.0);
        t.push(0.0);
    }
    solve_rows(&rows, &t)
}

/// 2pi-periodic solution of `alpha'' + alpha = kappa`, with the free first
/// harmonic gauged to zero. Requires integer frequencies and a density with
/// no first-harmonic component (Fredholm alternative).
pub fn periodic_profile(kappa: &TrigSeries) -> Result<ConeProfile, ProfileError> {
    for t in &kappa.terms {
        if (t.omega - t.omega.round()).abs() > 1e-9 || t.omega < -1e-12 {
            return Err(ProfileError::Unsolvable(format!(
                "non-integer frequency {} in a periodic density",
                t.omega
            )));
        }
    }
    let (ic, is) = kappa.first_harmonic_integrals();
    if ic.abs() > 1e-12 || is.abs() > 1e-12 {
        return Err(ProfileError::Unsolvable(format!(
            "density has a first-harmonic component (projections {ic:.3e}, {is:.3e})"
        )));
    }
    let mut a0 = 0.0;
    let mut da0 = 0.0;
    for t in &kappa.terms {
        let k = t.omega.round();
        if (k - 1.0).abs() < 0.5 {
            continue; // zero coefficients, gauge
        }
        let d = 1.0 - k * k;
        a0 += t.cos / d;
        da0 += k * t.sin / d;
    }
    Ok(ConeProfile {
        theta_b: 0.0,
        span: ConeSpan::Periodic,
        alpha_b: a0,
        dalpha_b: da0,
        kappa: kappa.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Adaptive Simpson quadrature oracle.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
        fn s<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let l = s(f, a, m);
            let r = s(f, m, b);
            if depth == 0 || (l + r - whole).abs() < 15.0 * eps {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, m, l, eps / 2.0, depth - 1) + rec(f, m, b, r, eps / 2.0, depth - 1)
            }
        }
        rec(f, a, b, s(f, a, b), eps, 30)
    }

    #[test]
    fn cone_moments_match_quadrature() {
        let cases = vec![
            (TrigSeries::constant(1.0), 0.0, FRAC_PI_2),
            (TrigSeries::single(3.0, 1.0, 0.0), -FRAC_PI_2, FRAC_PI_2),
            (TrigSeries::single(1.0, 0.7, -0.3), 0.2, 0.2 + PI),
            (TrigSeries::single(2.5, -1.1, 0.4), 0.5, 2.9),
            (
                TrigSeries::new(vec![
                    TrigTerm {
                        omega: 0.0,
                        cos: 0.5,
                        sin: 0.0,
                    },
                    TrigTerm {
                        omega: 1.0,
                        cos: -0.2,
                        sin: 0.9,
                    },
                    TrigTerm {
                        omega: 4.3,
                        cos: 1.3,
                        sin: -0.8,
                    },
                ]),
                -1.0,
                1.7,
            ),
        ];
        for (kappa, a, b) in cases {
            let (mv, md) = moment_defect_cone(&kappa, a, b);
            let qv = simpson(&|s| (b - s).sin() * kappa.eval(s), a, b, 1e-13);
            let qd = simpson(&|s| (b - s).cos() * kappa.eval(s), a, b, 1e-13);
            assert!((mv - qv).abs() < 1e-10, "m_val {mv} vs {qv}");
            assert!((md - qd).abs() < 1e-10, "m_der {md} vs {qd}");
        }
    }

    #[test]
    fn constant_density_quarter_moments() {
        let (mv, md) = moment_defect_cone(&TrigSeries::constant(1.0), 0.0, FRAC_PI_2);
        assert!((mv - 1.0).abs() < 1e-14);
        assert!((md - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cyl_moments_match_quadrature() {
        let kappa = PolySeries::new(vec![0.3, -1.2, 0.0, 2.0]);
        let (a, b) = (-0.7, 1.9);
        let (mv, md) = moment_defect_cyl(&kappa, a, b);
        let qv = simpson(&|s| (b - s) * kappa.eval(s), a, b, 1e-13);
        let qd = simpson(&|s| kappa.eval(s), a, b, 1e-13);
        assert!((mv - qv).abs() < 1e-10);
        assert!((md - qd).abs() < 1e-10);
    }

    #[test]
    fn cone_profile_solves_the_ode() {
        let profiles = vec![
            ConeProfile {
                theta_b: -FRAC_PI_2,
                span: ConeSpan::UpTo(FRAC_PI_2),
                alpha_b: 0.0,
                dalpha_b: 0.0,
                kappa: TrigSeries::single(3.0, 1.0, 0.0),
            },
            ConeProfile {
                theta_b: 0.3,
                span: ConeSpan::UpTo(0.3 + PI),
                alpha_b: 1.2,
                dalpha_b: -0.4,
                kappa: TrigSeries::new(vec![
                    TrigTerm {
                        omega: 1.0,
                        cos: 0.6,
                        sin: -0.1,
                    },
                    TrigTerm {
                        omega: 2.7,
                        cos: -0.9,
                        sin: 0.2,
                    },
                ]),
            },
        ];
        for pr in profiles {
            // endpoint data
            let (a0, da0, _) = pr.eval(pr.theta_b);
            assert!((a0 - pr.alpha_b).abs() < 1e-13);
            assert!((da0 - pr.dalpha_b).abs() < 1e-13);
            // ODE residual and FD consistency on a sweep
            let h = 1e-5;
            for i in 0..50 {
                let t = pr.theta_b + (pr.theta_f() - pr.theta_b) * (i as f64 + 0.5) / 50.0;
                let (a, da, dda) = pr.eval(t);
                assert!((dda + a - pr.kappa.eval(t)).abs() < 1e-12);
                let (ap, _, _) = pr.eval(t + h);
                let (am, _, _) = pr.eval(t - h);
                assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-7);
                assert!(((ap - 2.0 * a + am) / (h * h) - dda).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn half_cone_profile_closed_form() {
        // kappa = cos 3theta, zero data at -pi/2: alpha = -cos^3(theta)/2.
        let pr = ConeProfile {
            theta_b: -FRAC_PI_2,
            span: ConeSpan::UpTo(FRAC_PI_2),
            alpha_b: 0.0,
            dalpha_b: 0.0,
            kappa: TrigSeries::single(3.0, 1.0, 0.0),
        };
        let (a, _, _) = pr.eval(PI / 4.0);
        assert!(
            (a - (-(2.0f64).sqrt() / 8.0)).abs() < 1e-14,
            "alpha(pi/4) = {a}"
        );
        for i in 0..100 {
            let t = -FRAC_PI_2 + PI * i as f64 / 99.0;
            let (a, _, _) = pr.eval(t);
            assert!((a + t.cos().powi(3) / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn cyl_profile_eval() {
        let pr = CylProfile {
            x_b: 0.5,
            alpha_b: 2.0,
            dalpha_b: -1.0,
            kappa: PolySeries::new(vec![1.0, 2.0]),
        };
        let (a0, da0, _) = pr.eval(0.5);
        assert!((a0 - 2.0).abs() < 1e-14 && (da0 + 1.0).abs() < 1e-14);
        let h = 1e-5;
        for i in 0..20 {
            let x = -1.0 + 0.2 * i as f64;
            let (a, da, dda) = pr.eval(x);
            assert!((dda - pr.kappa.eval(x)).abs() < 1e-12);
            let (ap, _, _) = pr.eval(x + h);
            let (am, _, _) = pr.eval(x - h);
            assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-7);
            let _ = a;
        }
    }

    #[test]
    fn solver_homogeneous_picks_unit_null_vector() {
        // cos(3 theta) alone already has zero moments over [-pi/2, pi/2]
        let basis = vec![TrigSeries::single(3.0, 1.0, 0.0)];
        let c = solve_kappa_cone(&basis, -FRAC_PI_2, FRAC_PI_2, (0.0, 0.0), true).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solver_rejects_constant_on_half_turn() {
        let basis = vec![TrigSeries::constant(1.0)];
        match solve_kappa_cone(&basis, 0.0, PI, (0.0, 0.0), false) {
            Err(ProfileError::TrivialOnly) => {}
            other => panic!("expected TrivialOnly, got {other:?}"),
        }
    }

    #[test]
    fn solver_default_basis_homogeneous_and_targeted() {
        for &(a, b) in &[(0.0, PI), (-0.3, 1.1), (0.2, 0.2 + 1.9)] {
            let basis = default_cone_basis(a, b);
            for k in &basis {
                assert!(k.eval(a).abs() < 1e-12 && k.eval(b).abs() < 1e-12);
            }
            let c = solve_kappa_cone(&basis, a, b, (0.0, 0.0), true).unwrap();
            let kappa = TrigSeries::combine(&basis, &c);
            let (mv, md) = moment_defect_cone(&kappa, a, b);
            assert!(mv.abs() < 1e-12 && md.abs() < 1e-12);
            let norm: f64 = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);

            let target = (0.37, -0.81);
            let c = solve_kappa_cone(&basis, a, b, target, true).unwrap();
            let kappa = TrigSeries::combine(&basis, &c);
            let (mv, md) = moment_defect_cone(&kappa, a, b);
            assert!((mv - target.0).abs() < 1e-11 && (md - target.1).abs() < 1e-11);
            assert!(kappa.eval(a).abs() < 1e-11 && kappa.eval(b).abs() < 1e-11);
        }
    }

    #[test]
    fn periodic_profile_examples() {
        // distance cone: kappa = 1 -> alpha = 1
        let pr = periodic_profile(&TrigSeries::constant(1.0)).unwrap();
        for i in 0..16 {
            let t = TAU * i as f64 / 16.0;
            let (a, da, _) = pr.eval(t);
            assert!((a - 1.0).abs() < 1e-14 && da.abs() < 1e-14);
        }
        // kappa = 1 + cos(2 theta)/2 -> alpha = 1 - cos(2 theta)/6
        let pr = periodic_profile(&TrigSeries::new(vec![
            TrigTerm {
                omega: 0.0,
                cos: 1.0,
                sin: 0.0,
            },
            TrigTerm {
                omega: 2.0,
                cos: 0.5,
                sin: 0.0,
            },
        ]))
        .unwrap();
        for i in 0..32 {
            let t = TAU * i as f64 / 32.0;
            let (a, _, _) = pr.eval(t);
            assert!((a - (1.0 - (2.0 * t).cos() / 6.0)).abs() < 1e-13);
        }
        // periodicity
        let (a0, da0, _) = pr.eval(0.4);
        let (a1, da1, _) = pr.eval(0.4 + TAU);
        assert!((a0 - a1).abs() < 1e-12 && (da0 - da1).abs() < 1e-12);
    }

    #[test]
    fn periodic_profile_fredholm_obstruction() {
        match periodic_profile(&TrigSeries::single(1.0, 1.0, 0.0)) {
            Err(ProfileError::Unsolvable(_)) => {}
            other => panic!("expected Unsolvable, got {other:?}"),
        }
    }

    #[test]
    fn first_harmonic_integrals_match_quadrature() {
        let series = vec![
            TrigSeries::constant(1.3),
            TrigSeries::single(1.0, 0.4, -0.2),
            TrigSeries::single(2.0, -0.7, 0.5),
            TrigSeries::single(3.7, 0.9, 0.1),
        ];
        for k in series {
            let (ic, is) = k.first_harmonic_integrals();
            let qc = simpson(&|s| k.eval(s) * s.cos(), 0.0, TAU, 1e-13);
            let qs = simpson(&|s| k.eval(s) * s.sin(), 0.0, TAU, 1e-13);
            assert!((ic - qc).abs() < 1e-9, "cos proj {ic} vs {qc}");
            assert!((is - qs).abs() < 1e-9, "sin proj {is} vs {qs}");
        }
    }

    #[test]
    fn harmonic_profile_matches_affine_restriction() {
        let aff = AffineData::new(0.7, -1.1, 0.4);
        for i in 0..16 {
            let t = TAU * i as f64 / 16.0;
            let (a, da) = harmonic_profile(&aff, t);
            // harmonic profiles solve the homogeneous ODE
            let h = 1e-5;
            let (ap, _) = harmonic_profile(&aff, t + h);
            let (am, _) = harmonic_profile(&aff, t - h);
            assert!(((ap - am) / (2.0 * h) - da).abs() < 1e-8);
            assert!(((ap - 2.0 * a + am) / (h * h) + a).abs() < 1e-4);
        }
    }
}
