use std::f64::consts::PI;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::jetcalc::{Jet2, Scalar};
use crate::sampling;

/// `₂F₁(−n, b; c; z)` as its finite sum.
pub fn hyp2f1_terminating<S: Scalar>(n: u32, b: f64, c: f64, z: S) -> Result<S> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(
            "hyp2f1",
            format!("pole: c = {c} is a non-positive integer"),
        ));
    }
    let mut term = S::constant(1.0);
    let mut sum = S::constant(1.0);
    for k in 0..n {
        let kf = f64::from(k);
        let ratio = (kf - f64::from(n)) * (b + kf) / ((c + kf) * (kf + 1.0));
        term = term * z.clone() * ratio;
        sum = sum + term.clone();
    }
    Ok(sum)
}

/// Complex spherical harmonic `Y_l^m(θ, φ)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    let am = m.unsigned_abs();
    if am > l {
        return Err(Error::Argument(format!("|m| = {am} exceeds l = {l}")));
    }
    let x = theta.cos();
    // P_m^m, then upward in l.
    let mut pmm = 1.0;
    let s = (1.0 - x * x).max(0.0).sqrt();
    for k in 0..am {
        pmm *= -(2.0 * f64::from(k) + 1.0) * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut prev = pmm;
        let mut cur = x * (2.0 * f64::from(am) + 1.0) * pmm;
        for ll in am + 2..=l {
            let llf = f64::from(ll);
            let amf = f64::from(am);
            let next = ((2.0 * llf - 1.0) * x * cur - (llf + amf - 1.0) * prev) / (llf - amf);
            prev = cur;
            cur = next;
        }
        cur
    };
    let ratio: f64 = (l - am + 1..=l + am).map(|k| 1.0 / f64::from(k)).product();
    let norm = ((2.0 * f64::from(l) + 1.0) / (4.0 * PI) * ratio).sqrt();
    let y = Complex64::from_polar(norm * plm, f64::from(am as i32) * phi);
    Ok(if m < 0 {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * sign
    } else {
        y
    })
}

/// Physical constants and the `(n, l, m_z)` state of an AdS particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdsParams {
    pub omega: f64,
    pub c: f64,
    pub mass: f64,
    pub hbar: f64,
    pub xi: f64,
    pub n: u32,
    pub l: u32,
    pub mz: i32,
}

impl Default for AdsParams {
    fn default() -> Self {
        AdsParams {
            omega: 0.8,
            c: 1.0,
            mass: 0.0,
            hbar: 1.0,
            xi: 0.0,
            n: 0,
            l: 0,
            mz: 0,
        }
    }
}

impl AdsParams {
    pub fn with_state(self, n: u32, l: u32, mz: i32) -> Self {
        AdsParams { n, l, mz, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega", self.omega), ("c", self.c), ("hbar", self.hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.mass >= 0.0) || !self.xi.is_finite() {
            return Err(Error::Validation(
                "mass must be non-negative and ξ finite".into(),
            ));
        }
        if self.mz.unsigned_abs() > self.l {
            return Err(Error::Validation(format!(
                "|m_z| = {} exceeds l = {}",
                self.mz, self.l
            )));
        }
        let disc = self.discriminant();
        if disc < 0.0 {
            return Err(Error::Validation(format!(
                "9 + 4m²c²/(ħ²ω²) − 48ξ = {disc} is negative"
            )));
        }
        Ok(())
    }

    fn discriminant(&self) -> f64 {
        let mc = self.mass * self.c / (self.hbar * self.omega);
        9.0 + 4.0 * mc * mc - 48.0 * self.xi
    }

    /// `E/(ħω) = 3/2 + 2n + l + ½√(9 + 4m²c²/(ħ²ω²) − 48ξ)`.
    pub fn lambda(&self) -> Result<f64> {
        self.validate()?;
        Ok(1.5 + 2.0 * f64::from(self.n) + f64::from(self.l) + 0.5 * self.discriminant().sqrt())
    }

    pub fn energy(&self) -> Result<f64> {
        Ok(self.lambda()? * self.hbar * self.omega)
    }

    fn w(&self) -> f64 {
        let r = self.omega / self.c;
        r * r
    }
}

/// Which transcription of the wave operator and wavefunction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxReading {
    /// The display as printed.
    Printed,
    /// With the `r²` factor in the first-derivative coefficient and the
    /// phase `−λ·asin(ωq a0 / √(c² + ω²q²r²))`.
    Consistent,
}

impl BoxReading {
    pub fn name(self) -> &'static str {
        match self {
            BoxReading::Printed => "printed",
            BoxReading::Consistent => "consistent",
        }
    }
}

/// `q = √(1 + (ω²/4c²)(r² − a0²))`.
fn q_factor<S: Scalar>(p: &AdsParams, a0: &S, r: &S) -> Result<S> {
    let d = r.clone() * r.clone() - a0.clone() * a0.clone();
    let q2 = d * (p.w() / 4.0) + 1.0;
    if !(q2.value() > 0.0) {
        return Err(Error::domain(
            "ads chart",
            format!("q² = {} not positive", q2.value()),
        ));
    }
    q2.try_sqrt()
}

/// Radial amplitude and phase `(A, B)` of the state, `ψ = A e^{iB} Y_l^m`.
pub fn ads_radial<S: Scalar>(p: &AdsParams, reading: BoxReading, a0: &S, r: &S) -> Result<(S, S)> {
    let lambda = p.lambda()?;
    let w = p.w();
    let q = q_factor(p, a0, r)?;
    let qr = q.clone() * r.clone();
    let u = qr.clone() * qr.clone() * w;
    let pre = (u.clone() + 1.0).try_powf(-lambda / 2.0)?;
    let l = p.l;
    let b = f64::from(p.n) + f64::from(l) + 1.5 - lambda;
    let series = hyp2f1_terminating(p.n, b, f64::from(l) + 1.5, -u)?;
    let amp = pre * qr.try_powi(l as i32)? * series;
    let wq = q * p.omega;
    let (scale, c_sq) = match reading {
        BoxReading::Printed => (-2.0 * p.c * lambda, 4.0 * p.c * p.c),
        BoxReading::Consistent => (-lambda, p.c * p.c),
    };
    let den = (wq.clone() * wq.clone() * (r.clone() * r.clone()) + c_sq).try_sqrt()?;
    let arg = (wq * a0.clone()).try_div(den)?;
    Ok((amp, arg.try_asin()? * scale))
}

/// Full wavefunction at `(a0, a⃗)`.
pub fn ads_wavefunction(
    p: &AdsParams,
    reading: BoxReading,
    a0: f64,
    a: [f64; 3],
) -> Result<Complex64> {
    let r = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let (theta, phi) = if r == 0.0 {
        (0.0, 0.0)
    } else {
        ((a[2] / r).clamp(-1.0, 1.0).acos(), a[1].atan2(a[0]))
    };
    let (amp, phase) = ads_radial(p, reading, &a0, &r)?;
    Ok(Complex64::from_polar(amp, phase) * spherical_harmonic(p.l, p.mz, theta, phi)?)
}

/// `□ψ/ψ` at one point together with the size of the largest term, for
/// judging constancy when the eigenvalue is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxValue {
    pub ratio: Complex64,
    pub scale: f64,
}

/// Applies the wave operator to `A e^{iB} Y_l^m` at `(a0, r)`. The radial
/// state is given as a jet function returning `(A, B)`; the angular part
/// contributes `l(l+1)/(q²r²)`.
pub fn ads_box_apply(
    p: &AdsParams,
    reading: BoxReading,
    state: impl Fn(&Jet2, &Jet2) -> Result<(Jet2, Jet2)>,
    l: u32,
    a0: f64,
    r: f64,
    cross_sign: f64,
) -> Result<BoxValue> {
    if !(r > 0.0) {
        return Err(Error::domain("ads box", "r must be positive"));
    }
    let vars = Jet2::vars(&[a0, r]);
    let (amp, phase) = state(&vars[0], &vars[1])?;
    let a = amp.value();
    if a == 0.0 {
        return Err(Error::domain("ads box", "ψ vanishes at the sample point"));
    }
    let i = Complex64::i();
    // ∂ψ/ψ and ∂²ψ/ψ from the polar form.
    let d1 = |x: usize| Complex64::new(amp.grad(x) / a, phase.grad(x));
    let d2 = |x: usize, y: usize| {
        Complex64::new(
            amp.hess(x, y) / a - phase.grad(x) * phase.grad(y),
            phase.hess(x, y),
        ) + i * (amp.grad(x) * phase.grad(y) + amp.grad(y) * phase.grad(x)) / a
    };
    let w = p.w();
    let d = r * r - a0 * a0;
    let q2 = 1.0 + w * d / 4.0;
    if !(q2 > 0.0) {
        return Err(Error::domain(
            "ads chart",
            format!("q² = {q2} not positive"),
        ));
    }
    let k8 = w * (8.0 + w * d);
    let k40 = w * (40.0 + 7.0 * w * d);
    let c_r = match reading {
        BoxReading::Printed => -(32.0 + k40) / r,
        BoxReading::Consistent => -(32.0 + r * r * k40) / r,
    };
    let terms = [
        d2(0, 0) * (16.0 - a0 * a0 * k8),
        d1(0) * (-a0 * k40),
        d2(1, 1) * -(16.0 + r * r * k8),
        d1(1) * c_r,
        d2(0, 1) * (cross_sign * 2.0 * a0 * r * k8),
    ];
    let pre = 1.0 / (16.0 * q2);
    let angular = f64::from(l * (l + 1)) / (q2 * r * r);
    let mut ratio = Complex64::new(angular, 0.0);
    let mut scale = angular;
    for t in terms {
        ratio += t * pre;
        scale = scale.max((t * pre).norm());
    }
    Ok(BoxValue { ratio, scale })
}

/// Constancy of `□ψ/ψ` for one state and one cross-term sign.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStats {
    pub cross_sign: f64,
    pub mean: Complex64,
    /// Mean of `|x − mean|²`.
    pub variance: f64,
    /// `variance / |mean|`.
    pub relative_variance: f64,
    /// `max |x − mean|` over the largest operator term seen.
    pub spread: f64,
    pub samples: usize,
}

/// Per-state result across both cross-term signs.
#[derive(Debug, Clone, PartialEq)]
pub struct StateReport {
    pub n: u32,
    pub l: u32,
    pub mz: i32,
    pub lambda: f64,
    pub by_sign: Vec<EigenStats>,
}

impl StateReport {
    /// Signs under which the state is an eigenfunction to `tol` spread.
    pub fn consistent_signs(&self, tol: f64) -> Vec<f64> {
        self.by_sign
            .iter()
            .filter(|s| s.spread < tol)
            .map(|s| s.cross_sign)
            .collect()
    }

    pub fn stats(&self, sign: f64) -> Option<&EigenStats> {
        self.by_sign.iter().find(|s| s.cross_sign == sign)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub reading: BoxReading,
    pub seed: u64,
    pub states: Vec<StateReport>,
}

impl EigenReport {
    /// The cross sign that makes every state an eigenfunction, if exactly
    /// one does.
    pub fn selected_sign(&self, tol: f64) -> Option<f64> {
        let ok: Vec<f64> = [-1.0, 1.0]
            .into_iter()
            .filter(|s| {
                self.states
                    .iter()
                    .all(|st| st.consistent_signs(tol).contains(s))
            })
            .collect();
        match ok.as_slice() {
            [s] if !self.states.is_empty() => Some(*s),
            _ => None,
        }
    }
}

/// Default spread tolerance for calling `□ψ/ψ` constant.
pub const EIGEN_SPREAD_TOL: f64 = 1e-9;

/// Samples `a0 ∈ [−0.4, 0.4]`, `r ∈ [0.2, 0.7]`.
pub fn ads_sample_points(samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = sampling::rng(seed);
    (0..samples)
        .map(|_| {
            (
                sampling::uniform(&mut rng, -0.4, 0.4),
                sampling::uniform(&mut rng, 0.2, 0.7),
            )
        })
        .collect()
}

/// Mean and variance of `□ψ/ψ` over seeded interior points for every state
/// and both cross-term signs. Points where `ψ` vanishes are skipped.
pub fn ads_eigen_consistency(
    p: &AdsParams,
    reading: BoxReading,
    states: &[(u32, u32, i32)],
    samples: usize,
    seed: u64,
) -> Result<EigenReport> {
    let points = ads_sample_points(samples, seed);
    let mut out = Vec::with_capacity(states.len());
    for &(n, l, mz) in states {
        let sp = p.with_state(n, l, mz);
        let lambda = sp.lambda()?;
        let mut by_sign = Vec::new();
        for sign in [-1.0, 1.0] {
            let mut vals = Vec::with_capacity(points.len());
            let mut scale = 0.0f64;
            for &(a0, r) in &points {
                let state = |x: &Jet2, y: &Jet2| ads_radial(&sp, reading, x, y);
                match ads_box_apply(&sp, reading, state, l, a0, r, sign) {
                    Ok(v) => {
                        vals.push(v.ratio);
                        scale = scale.max(v.scale);
                    }
                    Err(Error::Domain { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            by_sign.push(summarize(sign, &vals, scale));
        }
        out.push(StateReport {
            n,
            l,
            mz,
            lambda,
            by_sign,
        });
    }
    Ok(EigenReport {
        reading,
        seed,
        states: out,
    })
}

fn summarize(sign: f64, vals: &[Complex64], scale: f64) -> EigenStats {
    let k = vals.len().max(1) as f64;
    let mean = vals.iter().sum::<Complex64>() / k;
    let variance = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / k;
    let dev = vals.iter().fold(0.0f64, |m, v| m.max((v - mean).norm()));
    let spread = if scale > 0.0 { dev / scale } else { dev };
    EigenStats {
        cross_sign: sign,
        mean,
        variance,
        relative_variance: if mean.norm() > 0.0 {
            variance / mean.norm()
        } else if variance == 0.0 {
            0.0
        } else {
            f64::INFINITY
        },
        spread,
        samples: vals.len(),
    }
}

/// Parses `n,l,m;n,l,m;...`.
pub fn parse_states(text: &str) -> Result<Vec<(u32, u32, i32)>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            let bad = || Error::Argument(format!("state `{s}` is not n,l,m"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let n = parts[0].parse().map_err(|_| bad())?;
            let l = parts[1].parse().map_err(|_| bad())?;
            let m: i32 = parts[2].parse().map_err(|_| bad())?;
            if m.unsigned_abs() > l {
                return Err(Error::Argument(format!("state `{s}` has |m| > l")));
            }
            Ok((n, l, m))
        })
        .collect()
}
