use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Second-order truncated Taylor expansion in `n` active variables.
///
/// The Hessian is stored as a packed lower triangle, so symmetry holds by
/// construction. A jet with empty gradient and Hessian is a constant and
/// combines with jets of any width.
#[derive(Clone, PartialEq, Default)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

fn width_mismatch(a: usize, b: usize) -> ! {
    panic!("jets over different variable counts combined ({a} vs {b})")
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    /// Seed variable `index` of `point`.
    pub fn var(point: &[f64], index: usize) -> Result<Self> {
        let n = point.len();
        if index >= n {
            return Err(Error::Argument(format!(
                "jet variable index {index} out of range for {n} variables"
            )));
        }
        let mut grad = vec![0.0; n];
        grad[index] = 1.0;
        Ok(Jet2 {
            value: point[index],
            grad,
            hess: vec![0.0; n * (n + 1) / 2],
        })
    }

    /// All variables of `point`, seeded in order.
    pub fn vars(point: &[f64]) -> Vec<Self> {
        (0..point.len())
            .map(|i| Jet2::var(point, i).expect("index in range"))
            .collect()
    }

    /// Seeds `point` as variables `offset..offset + point.len()` of an
    /// `nvars`-wide jet space.
    pub fn vars_at(point: &[f64], offset: usize, nvars: usize) -> Vec<Self> {
        assert!(offset + point.len() <= nvars);
        point
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut grad = vec![0.0; nvars];
                grad[offset + k] = 1.0;
                Jet2 {
                    value: v,
                    grad,
                    hess: vec![0.0; nvars * (nvars + 1) / 2],
                }
            })
            .collect()
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Number of active variables; 0 for constants.
    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn is_constant(&self) -> bool {
        self.grad.is_empty()
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        if self.hess.is_empty() {
            0.0
        } else {
            self.hess[packed(i, j)]
        }
    }

    pub fn gradient(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.grad(i)).collect()
    }

    pub fn hessian(&self, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| self.hess(i, j)).collect())
            .collect()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    pub fn chain(&self, f: f64, d1: f64, d2: f64) -> Self {
        let n = self.nvars();
        let grad = self.grad.iter().map(|g| d1 * g).collect();
        let mut hess = Vec::with_capacity(self.hess.len());
        for i in 0..n {
            let gi = self.grad[i];
            for j in 0..=i {
                hess.push(d1 * self.hess[packed(i, j)] + d2 * gi * self.grad[j]);
            }
        }
        Jet2 {
            value: f,
            grad,
            hess,
        }
    }

    /// `a * self + b * other`.
    pub fn axpy(&self, a: f64, other: &Jet2, b: f64) -> Self {
        let n = match (self.nvars(), other.nvars()) {
            (0, m) | (m, 0) => m,
            (p, q) if p == q => p,
            (p, q) => width_mismatch(p, q),
        };
        let pick = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let grad = (0..n)
            .map(|k| a * pick(&self.grad, k) + b * pick(&other.grad, k))
            .collect();
        let m = n * (n + 1) / 2;
        let hess = (0..m)
            .map(|k| a * pick(&self.hess, k) + b * pick(&other.hess, k))
            .collect();
        Jet2 {
            value: a * self.value + b * other.value,
            grad,
            hess,
        }
    }

    fn product(&self, other: &Jet2) -> Self {
        if self.is_constant() {
            return other.scale(self.value);
        }
        if other.is_constant() {
            return self.scale(other.value);
        }
        let n = self.nvars();
        if other.nvars() != n {
            width_mismatch(n, other.nvars());
        }
        let (a, b) = (self.value, other.value);
        let grad = (0..n)
            .map(|k| a * other.grad[k] + b * self.grad[k])
            .collect();
        let mut hess = Vec::with_capacity(self.hess.len());
        for i in 0..n {
            let (ai, bi) = (self.grad[i], other.grad[i]);
            for j in 0..=i {
                let k = hess.len();
                hess.push(
                    a * other.hess[k] + b * self.hess[k] + ai * other.grad[j] + bi * self.grad[j],
                );
            }
        }
        Jet2 {
            value: a * b,
            grad,
            hess,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet2 {
            value: self.value * s,
            grad: self.grad.iter().map(|g| g * s).collect(),
            hess: self.hess.iter().map(|h| h * s).collect(),
        }
    }

    pub fn recip(&self) -> Result<Self> {
        let x = self.value;
        if x == 0.0 {
            return Err(Error::domain("division", "divide by zero"));
        }
        Ok(self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Result<Self> {
        let c = self.value.cos();
        if c == 0.0 {
            return Err(Error::domain("tan", "argument at a pole"));
        }
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        Ok(self.chain(t, sec2, 2.0 * t * sec2))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(&self) -> Result<Self> {
        let x = self.value;
        if !(x > 0.0) {
            return Err(Error::domain(
                "sqrt",
                format!("argument {x} outside the open domain (0, inf)"),
            ));
        }
        let s = x.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * x)))
    }

    pub fn asin(&self) -> Result<Self> {
        let x = self.value;
        if !(x.abs() < 1.0) {
            return Err(Error::domain(
                "asin",
                format!("argument {x} outside the open domain (-1, 1)"),
            ));
        }
        let r = 1.0 / (1.0 - x * x).sqrt();
        Ok(self.chain(x.asin(), r, x * r * r * r))
    }

    pub fn ln(&self) -> Result<Self> {
        let x = self.value;
        if !(x > 0.0) {
            return Err(Error::domain("ln", format!("argument {x} not positive")));
        }
        Ok(self.chain(x.ln(), 1.0 / x, -1.0 / (x * x)))
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        let x = self.value;
        if n < 0 && x == 0.0 {
            return Err(Error::domain("power", "zero raised to a negative power"));
        }
        let nf = n as f64;
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * x.powi(n - 2)
        };
        let d1 = if n == 0 { 0.0 } else { nf * x.powi(n - 1) };
        Ok(self.chain(x.powi(n), d1, d2))
    }

    /// Real power of a positive base.
    pub fn powf(&self, e: f64) -> Result<Self> {
        let x = self.value;
        if !(x > 0.0) {
            return Err(Error::domain(
                "power",
                format!("real power of non-positive base {x}"),
            ));
        }
        let v = x.powf(e);
        Ok(self.chain(v, e * v / x, e * (e - 1.0) * v / (x * x)))
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet2({}; grad {:?})", self.value, self.grad)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.axpy(1.0, &rhs, 1.0)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.axpy(1.0, &rhs, -1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.product(&rhs)
    }
}

impl<'a> Mul<&'a Jet2> for &'a Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.product(rhs)
    }
}

impl<'a> Add<&'a Jet2> for &'a Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.axpy(1.0, rhs, 1.0)
    }
}

impl<'a> Sub<&'a Jet2> for &'a Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.axpy(1.0, rhs, -1.0)
    }
}

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: &Jet2) {
        if rhs.is_constant() {
            self.value += rhs.value;
        } else if self.nvars() == rhs.nvars() {
            self.value += rhs.value;
            for (a, b) in self.grad.iter_mut().zip(&rhs.grad) {
                *a += b;
            }
            for (a, b) in self.hess.iter_mut().zip(&rhs.hess) {
                *a += b;
            }
        } else {
            *self = self.axpy(1.0, rhs, 1.0);
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_unit_gradient() {
        let j = Jet2::var(&[1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(j.gradient(3), vec![0.0, 0.0, 1.0]);
        assert_eq!(j.hess(2, 2), 0.0);
        assert!(Jet2::var(&[1.0], 1).is_err());
    }

    #[test]
    fn square_and_sqrt() {
        let x = Jet2::var(&[3.0], 0).unwrap();
        let sq = &x * &x;
        assert_eq!((sq.value(), sq.grad(0), sq.hess(0, 0)), (9.0, 6.0, 2.0));
        let r = Jet2::var(&[4.0], 0).unwrap().sqrt().unwrap();
        assert_eq!(r.value(), 2.0);
        assert!((r.grad(0) - 0.25).abs() < 1e-15);
        assert!((r.hess(0, 0) + 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_operation() {
        let x = Jet2::var(&[-1.0], 0).unwrap();
        match x.sqrt() {
            Err(Error::Domain { op, .. }) => assert_eq!(op, "sqrt"),
            other => panic!("unexpected {other:?}"),
        }
        let one = Jet2::constant(1.0);
        assert!(matches!(one.asin(), Err(Error::Domain { op: "asin", .. })));
        assert!(matches!(
            Jet2::constant(0.0).recip(),
            Err(Error::Domain { op: "division", .. })
        ));
    }

    #[test]
    fn constants_mix_with_any_width() {
        let v = Jet2::vars(&[1.0, 2.0]);
        let c = Jet2::constant(3.0);
        let s = v[0].clone() * c.clone() + v[1].clone() - c;
        assert_eq!(s.value(), 2.0);
        assert_eq!(s.gradient(2), vec![3.0, 1.0]);
    }

    #[test]
    fn mixed_second_derivative() {
        let v = Jet2::vars(&[0.5, -1.5]);
        let p = (&v[0] * &v[1]).sin();
        // d²/dx dy sin(xy) = cos(xy) - xy sin(xy)
        let xy = -0.75f64;
        assert!((p.hess(0, 1) - (xy.cos() - xy * xy.sin())).abs() < 1e-14);
    }
}
