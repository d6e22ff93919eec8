//! Truncated Taylor jets: the differentiation backbone of the engine.
//!
//! Every derivative the structure equations need (up to third order in the
//! chart variables, up to third order in the ambient coordinates) is computed
//! by arithmetic on these jets, never by finite differences. A jet's degree
//! tracks the order to which its coefficients are exact: differentiating
//! drops the degree by one, and arithmetic requires matching degrees, which
//! keeps the bookkeeping honest.
//!
//! - [`Jet2`]: polynomial in the two chart variables, degree <= 3. Carrier of
//!   all surface data.
//! - [`Jet1`]: univariate jet in the warped-product coordinate `t`, degree 3.
//!   Warp functions evaluate to these.
//! - [`Jet3`]: polynomial in the three ambient coordinates, degree <= 3. Used
//!   to Taylor-expand the ambient metric and connection around a point.

use crate::error::{Error, Result};

pub const MAX_DEG: usize = 3;

/// Elementary function tags accepted by [`Jet2::lift`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Log,
    Pow(f64),
    Sqrt,
    Recip,
}

// Triangular layout for two variables: block of total degree d starts at
// d(d+1)/2 and is ordered by increasing j, so (i,j) lives at tri(i+j) + j.
const TRI: [usize; 5] = [0, 1, 3, 6, 10];

#[inline]
fn idx2(i: usize, j: usize) -> usize {
    TRI[i + j] + j
}

/// Number of coefficients of a bivariate jet of the given degree.
#[inline]
pub fn coeff_count2(deg: usize) -> usize {
    (deg + 1) * (deg + 2) / 2
}

/// Truncated bivariate Taylor polynomial; coefficient of u^i v^j at `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    deg: u8,
    c: [f64; 10],
}

impl Jet2 {
    pub fn constant(value: f64, deg: usize) -> Self {
        assert!(deg <= MAX_DEG, "jet degree {deg} out of range");
        let mut c = [0.0; 10];
        c[0] = value;
        Jet2 { deg: deg as u8, c }
    }

    /// Jet of the first chart variable around the basepoint `value`.
    pub fn var_u(value: f64, deg: usize) -> Self {
        let mut j = Self::constant(value, deg);
        if deg >= 1 {
            j.c[idx2(1, 0)] = 1.0;
        }
        j
    }

    /// Jet of the second chart variable around the basepoint `value`.
    pub fn var_v(value: f64, deg: usize) -> Self {
        let mut j = Self::constant(value, deg);
        if deg >= 1 {
            j.c[idx2(0, 1)] = 1.0;
        }
        j
    }

    pub fn deg(&self) -> usize {
        self.deg as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Raw Taylor coefficient of u^i v^j.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.deg(), "index ({i},{j}) beyond degree");
        self.c[idx2(i, j)]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(i + j <= self.deg(), "index ({i},{j}) beyond degree");
        self.c[idx2(i, j)] = value;
    }

    /// Exact mixed partial d^i/du^i d^j/dv^j at the basepoint: i! j! times
    /// the Taylor coefficient.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= self.deg(), "index ({i},{j}) beyond degree");
        self.c[idx2(i, j)] * FACT[i] * FACT[j]
    }

    /// Restriction to a lower degree.
    pub fn truncate(&self, deg: usize) -> Jet2 {
        assert!(deg <= self.deg());
        let mut out = Jet2::constant(0.0, deg);
        out.c[..coeff_count2(deg)].copy_from_slice(&self.c[..coeff_count2(deg)]);
        out
    }

    /// Derivative in u; the result is exact one order lower.
    pub fn d_du(&self) -> Jet2 {
        assert!(self.deg() >= 1, "cannot differentiate a degree-0 jet");
        let nd = self.deg() - 1;
        let mut out = Jet2::constant(0.0, nd);
        for d in 0..=nd {
            for j in 0..=d {
                let i = d - j;
                out.c[idx2(i, j)] = (i + 1) as f64 * self.c[idx2(i + 1, j)];
            }
        }
        out
    }

    /// Derivative in v; the result is exact one order lower.
    pub fn d_dv(&self) -> Jet2 {
        assert!(self.deg() >= 1, "cannot differentiate a degree-0 jet");
        let nd = self.deg() - 1;
        let mut out = Jet2::constant(0.0, nd);
        for d in 0..=nd {
            for j in 0..=d {
                let i = d - j;
                out.c[idx2(i, j)] = (j + 1) as f64 * self.c[idx2(i, j + 1)];
            }
        }
        out
    }

    /// Composition with an elementary function, via the univariate Taylor
    /// coefficients of `f` at the jet's value.
    pub fn lift(f: Elementary, a: &Jet2) -> Result<Jet2> {
        let g = univariate_coeffs(f, a.value())?;
        Ok(a.compose_univariate(&g))
    }

    /// Horner evaluation of `sum_k g[k] (self - value)^k`, truncated.
    fn compose_univariate(&self, g: &[f64; 4]) -> Jet2 {
        let deg = self.deg();
        let mut hat = *self;
        hat.c[0] = 0.0;
        let mut acc = Jet2::constant(g[deg], deg);
        for k in (0..deg).rev() {
            acc = acc * hat + Jet2::constant(g[k], deg);
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.c[..coeff_count2(self.deg())].iter().all(|x| x.is_finite())
    }

    pub fn sqrt(&self) -> Result<Jet2> {
        Jet2::lift(Elementary::Sqrt, self)
    }

    pub fn recip(&self) -> Result<Jet2> {
        Jet2::lift(Elementary::Recip, self)
    }
}

const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

/// Taylor coefficients f(x), f'(x), f''(x)/2!, f'''(x)/3! of the elementary
/// functions, by recurrence on the derivative values.
fn univariate_coeffs(f: Elementary, x: f64) -> Result<[f64; 4]> {
    use Elementary::*;
    let g = match f {
        Sin => {
            let (s, c) = x.sin_cos();
            [s, c, -s / 2.0, -c / 6.0]
        }
        Cos => {
            let (s, c) = x.sin_cos();
            [c, -s, -c / 2.0, s / 6.0]
        }
        Sinh => {
            let (s, c) = (x.sinh(), x.cosh());
            [s, c, s / 2.0, c / 6.0]
        }
        Cosh => {
            let (s, c) = (x.sinh(), x.cosh());
            [c, s, c / 2.0, s / 6.0]
        }
        Exp => {
            let e = x.exp();
            [e, e, e / 2.0, e / 6.0]
        }
        Log => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("log of non-positive value {x}")));
            }
            let r = 1.0 / x;
            [x.ln(), r, -r * r / 2.0, r * r * r / 3.0]
        }
        Pow(p) => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("pow base {x} not positive")));
            }
            let f0 = x.powf(p);
            let f1 = p * x.powf(p - 1.0);
            let f2 = p * (p - 1.0) * x.powf(p - 2.0);
            let f3 = p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0);
            [f0, f1, f2 / 2.0, f3 / 6.0]
        }
        Sqrt => {
            if x <= 0.0 {
                return Err(Error::Domain(format!("sqrt of non-positive value {x}")));
            }
            let s = x.sqrt();
            [s, 0.5 / s, -1.0 / (8.0 * x * s), 1.0 / (16.0 * x * x * s)]
        }
        Recip => {
            if x == 0.0 {
                return Err(Error::Domain("recip at 0".into()));
            }
            let r = 1.0 / x;
            [r, -r * r, r * r * r, -r * r * r * r]
        }
    };
    Ok(g)
}

impl std::ops::Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let mut out = self;
        for k in 0..coeff_count2(self.deg()) {
            out.c[k] += rhs.c[k];
        }
        out
    }
}

impl std::ops::Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let mut out = self;
        for k in 0..coeff_count2(self.deg()) {
            out.c[k] -= rhs.c[k];
        }
        out
    }
}

impl std::ops::Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        let mut out = self;
        for k in 0..coeff_count2(self.deg()) {
            out.c[k] = -out.c[k];
        }
        out
    }
}

impl std::ops::Mul for Jet2 {
    type Output = Jet2;
    /// Truncated Cauchy product at the common degree.
    fn mul(self, rhs: Jet2) -> Jet2 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let deg = self.deg();
        let mut out = Jet2::constant(0.0, deg);
        for da in 0..=deg {
            for ja in 0..=da {
                let a = self.c[TRI[da] + ja];
                if a == 0.0 {
                    continue;
                }
                let ia = da - ja;
                for db in 0..=deg - da {
                    for jb in 0..=db {
                        let b = rhs.c[TRI[db] + jb];
                        if b == 0.0 {
                            continue;
                        }
                        let ib = db - jb;
                        out.c[idx2(ia + ib, ja + jb)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, s: f64) -> Jet2 {
        let mut out = self;
        for k in 0..coeff_count2(self.deg()) {
            out.c[k] *= s;
        }
        out
    }
}

impl std::ops::Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, s: f64) -> Jet2 {
        let mut out = self;
        out.c[0] += s;
        out
    }
}

/// Univariate degree-3 jet in `t`: value, a', a''/2, a'''/6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    c: [f64; 4],
}

impl Jet1 {
    pub fn constant(value: f64) -> Self {
        Jet1 { c: [value, 0.0, 0.0, 0.0] }
    }

    /// Jet of the coordinate itself around `value`.
    pub fn var(value: f64) -> Self {
        Jet1 { c: [value, 1.0, 0.0, 0.0] }
    }

    pub fn from_coeffs(c: [f64; 4]) -> Self {
        Jet1 { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c[k]
    }

    pub fn coeffs(&self) -> [f64; 4] {
        self.c
    }

    /// k-th derivative value at the basepoint.
    pub fn deriv(&self, k: usize) -> f64 {
        self.c[k] * FACT[k]
    }

    pub fn lift(f: Elementary, a: &Jet1) -> Result<Jet1> {
        let g = univariate_coeffs(f, a.value())?;
        let mut hat = *a;
        hat.c[0] = 0.0;
        let mut acc = Jet1::constant(g[3]);
        for k in (0..3).rev() {
            acc = acc * hat + Jet1::constant(g[k]);
        }
        Ok(acc)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        for k in 0..4 {
            out.c[k] += rhs.c[k];
        }
        out
    }
}

impl std::ops::Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        for k in 0..4 {
            out.c[k] -= rhs.c[k];
        }
        out
    }
}

impl std::ops::Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 { c: [-self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }
}

impl std::ops::Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut c = [0.0; 4];
        for i in 0..4 {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..4 - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Jet1 { c }
    }
}

impl std::ops::Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, s: f64) -> Jet1 {
        Jet1 { c: [self.c[0] * s, self.c[1] * s, self.c[2] * s, self.c[3] * s] }
    }
}

// Trivariate multi-indices in graded order, degree <= 3.
const N3: usize = 20;
const MI3: [(usize, usize, usize); N3] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (2, 0, 0),
    (1, 1, 0),
    (1, 0, 1),
    (0, 2, 0),
    (0, 1, 1),
    (0, 0, 2),
    (3, 0, 0),
    (2, 1, 0),
    (2, 0, 1),
    (1, 2, 0),
    (1, 1, 1),
    (1, 0, 2),
    (0, 3, 0),
    (0, 2, 1),
    (0, 1, 2),
    (0, 0, 3),
];

fn idx3(i: usize, j: usize, k: usize) -> usize {
    // Small table; linear scan is fine and keeps one source of truth.
    MI3.iter().position(|&m| m == (i, j, k)).expect("index beyond degree 3")
}

/// Number of coefficients of a trivariate jet of the given degree.
pub fn coeff_count3(deg: usize) -> usize {
    [1, 4, 10, 20][deg]
}

/// Truncated trivariate Taylor polynomial in the ambient coordinates.
/// Internal support type for expanding metric and connection around a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    deg: u8,
    c: [f64; N3],
}

impl Jet3 {
    pub fn constant(value: f64, deg: usize) -> Self {
        assert!(deg <= MAX_DEG);
        let mut c = [0.0; N3];
        c[0] = value;
        Jet3 { deg: deg as u8, c }
    }

    /// Jet of ambient coordinate `axis` (0, 1 or 2) around `value`.
    pub fn var(axis: usize, value: f64, deg: usize) -> Self {
        let mut j = Self::constant(value, deg);
        if deg >= 1 {
            j.c[1 + axis] = 1.0;
        }
        j
    }

    pub fn deg(&self) -> usize {
        self.deg as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(i + j + k <= self.deg());
        self.c[idx3(i, j, k)]
    }

    pub fn truncate(&self, deg: usize) -> Jet3 {
        assert!(deg <= self.deg());
        let mut out = Jet3::constant(0.0, deg);
        out.c[..coeff_count3(deg)].copy_from_slice(&self.c[..coeff_count3(deg)]);
        out
    }

    /// Derivative along `axis`; exact one order lower.
    pub fn d(&self, axis: usize) -> Jet3 {
        assert!(self.deg() >= 1);
        let nd = self.deg() - 1;
        let mut out = Jet3::constant(0.0, nd);
        for (pos, &(i, j, k)) in MI3.iter().enumerate().take(coeff_count3(nd)) {
            let src = match axis {
                0 => (i + 1, j, k),
                1 => (i, j + 1, k),
                _ => (i, j, k + 1),
            };
            let mult = match axis {
                0 => i + 1,
                1 => j + 1,
                _ => k + 1,
            };
            out.c[pos] = mult as f64 * self.c[idx3(src.0, src.1, src.2)];
        }
        out
    }

    pub fn lift(f: Elementary, a: &Jet3) -> Result<Jet3> {
        let g = univariate_coeffs(f, a.value())?;
        let deg = a.deg();
        let mut hat = *a;
        hat.c[0] = 0.0;
        let mut acc = Jet3::constant(g[deg.min(3)], deg);
        for k in (0..deg).rev() {
            acc = acc * hat + Jet3::constant(g[k], deg);
        }
        Ok(acc)
    }

    pub fn recip(&self) -> Result<Jet3> {
        Jet3::lift(Elementary::Recip, self)
    }

    /// Substitute the bivariate jets `s` (which must have zero value) for the
    /// three displacement variables: the Taylor expansion of this jet's
    /// function along a surface.
    pub fn compose2(&self, s: &[Jet2; 3]) -> Jet2 {
        let deg = s[0].deg();
        debug_assert!(s.iter().all(|x| x.value() == 0.0));
        // Powers of the displacement jets up to the needed order.
        let one = Jet2::constant(1.0, deg);
        let mut pw = [[one; 4]; 3];
        for a in 0..3 {
            for p in 1..=self.deg() {
                pw[a][p] = pw[a][p - 1] * s[a];
            }
        }
        let mut out = Jet2::constant(0.0, deg);
        for (pos, &(i, j, k)) in MI3.iter().enumerate().take(coeff_count3(self.deg())) {
            let c = self.c[pos];
            if c == 0.0 {
                continue;
            }
            out = out + pw[0][i] * pw[1][j] * pw[2][k] * c;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c[..coeff_count3(self.deg())].iter().all(|x| x.is_finite())
    }
}

impl std::ops::Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let mut out = self;
        for k in 0..coeff_count3(self.deg()) {
            out.c[k] += rhs.c[k];
        }
        out
    }
}

impl std::ops::Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let mut out = self;
        for k in 0..coeff_count3(self.deg()) {
            out.c[k] -= rhs.c[k];
        }
        out
    }
}

impl std::ops::Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        let mut out = self;
        for k in 0..coeff_count3(self.deg()) {
            out.c[k] = -out.c[k];
        }
        out
    }
}

impl std::ops::Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        assert_eq!(self.deg, rhs.deg, "jet degree mismatch");
        let deg = self.deg();
        let mut out = Jet3::constant(0.0, deg);
        for (pa, &(ia, ja, ka)) in MI3.iter().enumerate().take(coeff_count3(deg)) {
            let a = self.c[pa];
            if a == 0.0 {
                continue;
            }
            let da = ia + ja + ka;
            for (pb, &(ib, jb, kb)) in MI3.iter().enumerate().take(coeff_count3(deg)) {
                if da + ib + jb + kb > deg {
                    continue;
                }
                let b = rhs.c[pb];
                if b == 0.0 {
                    continue;
                }
                out.c[idx3(ia + ib, ja + jb, ka + kb)] += a * b;
            }
        }
        out
    }
}

impl std::ops::Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, s: f64) -> Jet3 {
        let mut out = self;
        for k in 0..coeff_count3(self.deg()) {
            out.c[k] *= s;
        }
        out
    }
}

impl std::ops::Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, s: f64) -> Jet3 {
        let mut out = self;
        out.c[0] += s;
        out
    }
}

/// Composes a univariate Taylor expansion (coefficients `g`, e.g. a warp
/// function at a basepoint) with a bivariate jet whose value is the
/// basepoint.
pub fn compose_univariate2(g: &[f64; 4], a: &Jet2) -> Jet2 {
    let deg = a.deg();
    let mut hat = *a;
    hat.set_coeff(0, 0, 0.0);
    let mut acc = Jet2::constant(g[deg], deg);
    for k in (0..deg).rev() {
        acc = acc * hat + Jet2::constant(g[k], deg);
    }
    acc
}

/// Same composition into a trivariate jet.
pub fn compose_univariate3(g: &[f64; 4], a: &Jet3) -> Jet3 {
    let deg = a.deg();
    let mut hat = *a;
    hat.c[0] = 0.0;
    let mut acc = Jet3::constant(g[deg], deg);
    for k in (0..deg).rev() {
        acc = acc * hat + Jet3::constant(g[k], deg);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var_uv() -> (Jet2, Jet2) {
        (Jet2::var_u(0.0, 3), Jet2::var_v(0.0, 3))
    }

    #[test]
    fn product_of_binomials() {
        let (u, v) = var_uv();
        let p = (u + 1.0) * (v + 1.0);
        assert_eq!(p.coeff(0, 0), 1.0);
        assert_eq!(p.coeff(1, 0), 1.0);
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 1.0);
        assert_eq!(p.coeff(2, 0), 0.0);
        assert_eq!(p.coeff(2, 1), 0.0);
        assert_eq!(p.coeff(0, 3), 0.0);
    }

    #[test]
    fn mul_by_unit_is_identity() {
        let (u, v) = var_uv();
        let a = u * u * 3.0 + v * 1.5 + u * v * 0.25 + 2.0;
        let one = Jet2::constant(1.0, 3);
        assert_eq!(a * one, a);
    }

    #[test]
    fn cube_of_sum_truncated() {
        let (u, v) = var_uv();
        let s = u + v;
        let c = s * s * s;
        assert_eq!(c.coeff(3, 0), 1.0);
        assert_eq!(c.coeff(2, 1), 3.0);
        assert_eq!(c.coeff(1, 2), 3.0);
        assert_eq!(c.coeff(0, 3), 1.0);
        assert_eq!(c.coeff(0, 0), 0.0);
        assert_eq!(c.coeff(1, 1), 0.0);
    }

    #[test]
    fn sin_of_variable_is_its_series() {
        let u = Jet2::var_u(0.0, 3);
        let s = Jet2::lift(Elementary::Sin, &u).unwrap();
        assert!((s.coeff(1, 0) - 1.0).abs() < 1e-15);
        assert!((s.coeff(3, 0) + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(s.coeff(0, 0), 0.0);
        assert_eq!(s.coeff(2, 0), 0.0);
    }

    #[test]
    fn exp_of_constant_is_constant() {
        let c = Jet2::constant(1.25, 3);
        let e = Jet2::lift(Elementary::Exp, &c).unwrap();
        assert!((e.value() - 1.25f64.exp()).abs() < 1e-15);
        for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)] {
            assert_eq!(e.coeff(i, j), 0.0);
        }
    }

    #[test]
    fn recip_geometric_series() {
        let u = Jet2::var_u(0.0, 2);
        let r = Jet2::lift(Elementary::Recip, &(u + 1.0)).unwrap();
        assert!((r.coeff(0, 0) - 1.0).abs() < 1e-15);
        assert!((r.coeff(1, 0) + 1.0).abs() < 1e-15);
        assert!((r.coeff(2, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_of_monomial() {
        let (u, v) = var_uv();
        let m = u * u * v;
        assert_eq!(m.partial(2, 1), 2.0);
        assert_eq!(m.partial(0, 0), m.value());
    }

    #[test]
    fn third_partial_of_sin() {
        let u = Jet2::var_u(0.0, 3);
        let s = Jet2::lift(Elementary::Sin, &u).unwrap();
        assert!((s.partial(3, 0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let z = Jet2::constant(0.0, 3);
        assert!(Jet2::lift(Elementary::Recip, &z).is_err());
        assert!(Jet2::lift(Elementary::Log, &z).is_err());
        assert!(Jet2::lift(Elementary::Sqrt, &Jet2::constant(-1.0, 3)).is_err());
    }

    #[test]
    #[should_panic(expected = "degree mismatch")]
    fn degree_mismatch_panics() {
        let a = Jet2::constant(1.0, 3);
        let b = Jet2::constant(1.0, 2);
        let _ = a * b;
    }

    #[test]
    fn derivative_drops_degree() {
        let u = Jet2::var_u(0.7, 3);
        let v = Jet2::var_v(-0.3, 3);
        let p = u * u * v;
        let pu = p.d_du();
        assert_eq!(pu.deg(), 2);
        // d/du (u^2 v) = 2uv at the basepoint.
        assert!((pu.value() - 2.0 * 0.7 * -0.3).abs() < 1e-15);
    }

    #[test]
    fn analytic_partials_match_closed_form() {
        // F(u, v) = exp(u) sin(v) + 1 / (1 + u^2 + v^2) around (0.4, -0.2).
        let (u0, v0) = (0.4, -0.2);
        let u = Jet2::var_u(u0, 3);
        let v = Jet2::var_v(v0, 3);
        let f = Jet2::lift(Elementary::Exp, &u).unwrap()
            * Jet2::lift(Elementary::Sin, &v).unwrap()
            + Jet2::lift(Elementary::Recip, &(u * u + v * v + 1.0)).unwrap();
        let q = 1.0 + u0 * u0 + v0 * v0;
        let f_u = u0.exp() * v0.sin() - 2.0 * u0 / (q * q);
        let f_v = u0.exp() * v0.cos() - 2.0 * v0 / (q * q);
        let f_uu = u0.exp() * v0.sin() - 2.0 / (q * q) + 8.0 * u0 * u0 / (q * q * q);
        let f_uv = u0.exp() * v0.cos() + 8.0 * u0 * v0 / (q * q * q);
        assert!((f.partial(1, 0) - f_u).abs() < 1e-10);
        assert!((f.partial(0, 1) - f_v).abs() < 1e-10);
        assert!((f.partial(2, 0) - f_uu).abs() < 1e-10);
        assert!((f.partial(1, 1) - f_uv).abs() < 1e-10);
    }

    #[test]
    fn chain_rule_cos_squared() {
        // Lifting cos then squaring equals lifting the composite
        // u -> cos(u)^2 = (1 + cos(2u)) / 2.
        let u = Jet2::var_u(0.35, 3);
        let c = Jet2::lift(Elementary::Cos, &u).unwrap();
        let direct = c * c;
        let composite = (Jet2::lift(Elementary::Cos, &(u * 2.0)).unwrap() + 1.0) * 0.5;
        for d in 0..=3 {
            for j in 0..=d {
                let i = d - j;
                assert!(
                    (direct.coeff(i, j) - composite.coeff(i, j)).abs() < 1e-12,
                    "coeff ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn jet1_warp_derivatives() {
        let t = Jet1::var(0.6);
        let a = Jet1::lift(Elementary::Cosh, &t).unwrap();
        assert!((a.deriv(0) - 0.6f64.cosh()).abs() < 1e-15);
        assert!((a.deriv(1) - 0.6f64.sinh()).abs() < 1e-15);
        assert!((a.deriv(2) - 0.6f64.cosh()).abs() < 1e-14);
        assert!((a.deriv(3) - 0.6f64.sinh()).abs() < 1e-14);
    }

    #[test]
    fn jet3_metric_style_composition() {
        // G(x, y, t) = x^2 y + t^3 expanded at (0.5, -1.0, 0.25), composed
        // with a surface chart, matches direct evaluation.
        let p = [0.5, -1.0, 0.25];
        let x = Jet3::var(0, p[0], 3);
        let y = Jet3::var(1, p[1], 3);
        let t = Jet3::var(2, p[2], 3);
        let g = x * x * y + t * t * t;

        // chart: x = p0 + u, y = p1 + u v, t = p2 + v^2
        let u = Jet2::var_u(0.0, 3);
        let v = Jet2::var_v(0.0, 3);
        let s = [u, u * v, v * v];
        let composed = g.compose2(&s);

        let direct = {
            let x = u + p[0];
            let y = u * v + p[1];
            let t = v * v + p[2];
            x * x * y + t * t * t
        };
        for d in 0..=3 {
            for j in 0..=d {
                let i = d - j;
                assert!(
                    (composed.coeff(i, j) - direct.coeff(i, j)).abs() < 1e-13,
                    "coeff ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn jet3_derivative_and_inverse() {
        let x = Jet3::var(0, 0.3, 3);
        let f = Jet3::lift(Elementary::Exp, &x).unwrap();
        let fx = f.d(0);
        assert!((fx.value() - 0.3f64.exp()).abs() < 1e-14);
        let r = f.recip().unwrap();
        let prod = f.truncate(3) * r;
        assert!((prod.value() - 1.0).abs() < 1e-14);
        assert!(prod.coeff(1, 0, 0).abs() < 1e-14);
        assert!(prod.coeff(2, 0, 0).abs() < 1e-14);
    }
}
