//! The two ambient-space families.
//!
//! - `E(kappa, tau)`: simply connected homogeneous 3-manifold with
//!   4-dimensional isometry group, in the chart `(x, y, t)` with metric
//!   `lambda^2 (dx^2 + dy^2) + (tau lambda (y dx - x dy) + dt)^2`,
//!   `lambda = 1 / (1 + kappa (x^2 + y^2) / 4)`. The vertical Killing field
//!   is the third coordinate field.
//! - Warped products `I x_a M^2_k(c)`: chart `(t, x, y)` with metric
//!   `eps dt^2 + a(t)^2 g_o`, where `g_o` is the conformal model of the
//!   2-dimensional space form of curvature `c` and index `k`. The
//!   distinguished field is the first coordinate field.
//!
//! Metric and Levi-Civita connection are evaluated as trivariate jets, so
//! their Taylor expansions around any chart point are exact and can be
//! composed with surface parametrizations.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{compose_univariate3, Elementary, Jet1, Jet3};
use crate::linalg::{mat3_inv, Mat3, Vec3};

/// Point in the model chart of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub coords: [f64; 3],
}

impl AmbientPoint {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        AmbientPoint { coords: [a, b, c] }
    }
}

/// `E(kappa, tau)` with base curvature `kappa` and bundle curvature `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousSpace {
    kappa: f64,
    tau: f64,
}

impl HomogeneousSpace {
    /// Requires `kappa != 4 tau^2`, exactly, on the given floats.
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        if kappa == 4.0 * tau * tau {
            return Err(Error::InvalidSpace(format!(
                "kappa = 4 tau^2 = {kappa} is a space form, not an E(kappa, tau) space"
            )));
        }
        if !kappa.is_finite() || !tau.is_finite() {
            return Err(Error::InvalidSpace("non-finite parameters".into()));
        }
        Ok(HomogeneousSpace { kappa, tau })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Warp function `a(t)`, evaluated as an exact univariate jet.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpFn {
    /// a(t) = c
    Const(f64),
    /// a(t) = cosh(c1 t + c2) / c1
    Cosh(f64, f64),
    /// a(t) = sinh(c1 t + c2) / c1
    Sinh(f64, f64),
    /// a(t) = sin(c1 t + c2) / c1
    Sin(f64, f64),
    /// a(t) = m t + b
    Linear(f64, f64),
    /// a(t) = exp(r t)
    Exp(f64),
    /// a(t) = sum_i coeffs[i] t^i
    Poly(Vec<f64>),
    /// Arbitrary expression in `t` over the engine grammar.
    Custom(Expr),
}

impl WarpFn {
    /// Value and derivatives at `t`, exact.
    pub fn jet(&self, t: f64) -> Jet1 {
        let tj = Jet1::var(t);
        match self {
            WarpFn::Const(c) => Jet1::constant(*c),
            WarpFn::Cosh(c1, c2) => {
                Jet1::lift(Elementary::Cosh, &(tj * *c1 + Jet1::constant(*c2))).unwrap()
                    * (1.0 / c1)
            }
            WarpFn::Sinh(c1, c2) => {
                Jet1::lift(Elementary::Sinh, &(tj * *c1 + Jet1::constant(*c2))).unwrap()
                    * (1.0 / c1)
            }
            WarpFn::Sin(c1, c2) => {
                Jet1::lift(Elementary::Sin, &(tj * *c1 + Jet1::constant(*c2))).unwrap()
                    * (1.0 / c1)
            }
            WarpFn::Linear(m, b) => tj * *m + Jet1::constant(*b),
            WarpFn::Exp(r) => Jet1::lift(Elementary::Exp, &(tj * *r)).unwrap(),
            WarpFn::Poly(coeffs) => {
                let mut acc = Jet1::constant(0.0);
                for &c in coeffs.iter().rev() {
                    acc = acc * tj + Jet1::constant(c);
                }
                acc
            }
            WarpFn::Custom(e) => e.eval1(tj),
        }
    }

    pub fn parse(s: &str) -> Result<WarpFn> {
        let (name, inner) = match s.find('[') {
            Some(i) => {
                if !s.ends_with(']') {
                    return Err(Error::Parse(format!("warp {s:?}: missing closing bracket")));
                }
                (&s[..i], &s[i + 1..s.len() - 1])
            }
            None => (s, ""),
        };
        let nums = || -> Result<Vec<f64>> {
            inner
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("warp parameter {p:?} is not a number")))
                })
                .collect()
        };
        match name {
            "const" => {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(Error::Parse("const warp takes one parameter".into()));
                }
                Ok(WarpFn::Const(v[0]))
            }
            "cosh" | "sinh" | "sin" => {
                let v = nums()?;
                if v.len() != 2 || v[0] == 0.0 {
                    return Err(Error::Parse(format!(
                        "{name} warp takes parameters [c1,c2] with c1 != 0"
                    )));
                }
                Ok(match name {
                    "cosh" => WarpFn::Cosh(v[0], v[1]),
                    "sinh" => WarpFn::Sinh(v[0], v[1]),
                    _ => WarpFn::Sin(v[0], v[1]),
                })
            }
            "linear" => {
                let v = nums()?;
                if v.len() != 2 {
                    return Err(Error::Parse("linear warp takes parameters [m,b]".into()));
                }
                Ok(WarpFn::Linear(v[0], v[1]))
            }
            "exp" => {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(Error::Parse("exp warp takes one parameter".into()));
                }
                Ok(WarpFn::Exp(v[0]))
            }
            "poly" => {
                let v = nums()?;
                if v.is_empty() || v.len() > 4 {
                    return Err(Error::Parse("poly warp takes 1 to 4 coefficients".into()));
                }
                Ok(WarpFn::Poly(v))
            }
            "custom" => Ok(WarpFn::Custom(Expr::parse(inner, &["t"])?)),
            _ => Err(Error::Parse(format!("unknown warp function {name:?}"))),
        }
    }
}

impl std::fmt::Display for WarpFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WarpFn::Const(c) => write!(f, "const[{c}]"),
            WarpFn::Cosh(a, b) => write!(f, "cosh[{a},{b}]"),
            WarpFn::Sinh(a, b) => write!(f, "sinh[{a},{b}]"),
            WarpFn::Sin(a, b) => write!(f, "sin[{a},{b}]"),
            WarpFn::Linear(a, b) => write!(f, "linear[{a},{b}]"),
            WarpFn::Exp(r) => write!(f, "exp[{r}]"),
            WarpFn::Poly(v) => {
                write!(f, "poly[")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
            WarpFn::Custom(e) => write!(f, "custom[{}]", e.source()),
        }
    }
}

/// Warped product `eps dt^2 + a(t)^2 g_o` over `M^2_k(c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedProduct {
    eps: i32,
    eps0: i32,
    c: i32,
    k: u32,
    warp: WarpFn,
    interval: (f64, f64),
}

impl WarpedProduct {
    pub fn new(
        eps: i32,
        eps0: i32,
        c: i32,
        k: u32,
        warp: WarpFn,
        interval: (f64, f64),
    ) -> Result<Self> {
        if eps.abs() != 1 || eps0.abs() != 1 {
            return Err(Error::InvalidSpace("eps and eps0 must be +1 or -1".into()));
        }
        let ok = (c == eps0 && c.abs() == 1) || (c == 0 && eps0 == 1);
        if !ok {
            return Err(Error::InvalidSpace(format!(
                "(c, eps0) = ({c}, {eps0}) violates: either c = eps0 = +-1 or c = 0, eps0 = 1"
            )));
        }
        if k > 1 {
            return Err(Error::InvalidSpace("fiber index k must be 0 or 1".into()));
        }
        let interval_ok = interval.0.is_finite() && interval.1.is_finite() && interval.0 < interval.1;
        if !interval_ok {
            return Err(Error::InvalidSpace(format!(
                "invalid interval [{}, {}]",
                interval.0, interval.1
            )));
        }
        let w = WarpedProduct { eps, eps0, c, k, warp, interval };
        // a > 0 across I, checked on a fine sample.
        for i in 0..=128 {
            let t = interval.0 + (interval.1 - interval.0) * i as f64 / 128.0;
            let a = w.warp.jet(t);
            if !a.is_finite() || a.value() <= 0.0 {
                return Err(Error::InvalidSpace(format!(
                    "warp function not positive at t = {t} (a = {})",
                    a.value()
                )));
            }
        }
        Ok(w)
    }

    pub fn eps(&self) -> f64 {
        self.eps as f64
    }

    pub fn eps0(&self) -> f64 {
        self.eps0 as f64
    }

    pub fn curvature(&self) -> f64 {
        self.c as f64
    }

    pub fn fiber_index(&self) -> u32 {
        self.k
    }

    /// Sign of the second fiber direction: +1 for Riemannian fibers, -1 for
    /// index-1 fibers.
    pub fn eps1(&self) -> f64 {
        if self.k == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn warp(&self) -> &WarpFn {
        &self.warp
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Residual of the space-form warping ODE `a'' a - (a')^2 + eps eps0`.
    pub fn spaceform_residual(&self, t: f64) -> f64 {
        let a = self.warp.jet(t);
        a.deriv(2) * a.deriv(0) - a.deriv(1) * a.deriv(1) + self.eps() * self.eps0()
    }

    /// True when the warping ODE residual vanishes across the whole interval,
    /// which makes the warped product an open subset of a space form: those
    /// are excluded from classification.
    pub fn is_spaceform(&self) -> bool {
        let (lo, hi) = self.interval;
        (0..=100).all(|i| {
            let t = lo + (hi - lo) * i as f64 / 100.0;
            let a = self.warp.jet(t);
            let scale = 1.0 + a.deriv(0).abs() * a.deriv(2).abs() + a.deriv(1) * a.deriv(1);
            self.spaceform_residual(t).abs() <= 1e-10 * scale
        })
    }
}

/// Variant record over the two families.
#[derive(Debug, Clone, PartialEq)]
pub enum AmbientSpace {
    Homogeneous(HomogeneousSpace),
    Warped(WarpedProduct),
}

impl AmbientSpace {
    pub fn homogeneous(kappa: f64, tau: f64) -> Result<Self> {
        Ok(AmbientSpace::Homogeneous(HomogeneousSpace::new(kappa, tau)?))
    }

    /// Which chart coordinate carries the distinguished direction.
    pub fn vertical_index(&self) -> usize {
        match self {
            AmbientSpace::Homogeneous(_) => 2,
            AmbientSpace::Warped(_) => 0,
        }
    }

    /// The coordinate field `d/dt` in the model chart.
    pub fn vertical_field(&self, _p: &AmbientPoint) -> Vec3 {
        let mut v = [0.0; 3];
        v[self.vertical_index()] = 1.0;
        v
    }

    pub fn chart_check(&self, p: &AmbientPoint) -> Result<()> {
        match self {
            AmbientSpace::Homogeneous(h) => {
                let q = p.coords[0] * p.coords[0] + p.coords[1] * p.coords[1];
                let denom = 1.0 + h.kappa * q / 4.0;
                if denom <= 1e-12 {
                    return Err(Error::Domain(format!(
                        "point ({}, {}, {}) outside the E(kappa, tau) chart (1 + kappa q / 4 = {denom})",
                        p.coords[0], p.coords[1], p.coords[2]
                    )));
                }
                Ok(())
            }
            AmbientSpace::Warped(w) => {
                let t = p.coords[0];
                let (lo, hi) = w.interval;
                if !(lo <= t && t <= hi) {
                    return Err(Error::Domain(format!(
                        "t = {t} outside the interval [{lo}, {hi}]"
                    )));
                }
                let q = p.coords[1] * p.coords[1] + w.eps1() * p.coords[2] * p.coords[2];
                let denom = 1.0 + w.curvature() * q / 4.0;
                if denom <= 1e-12 {
                    return Err(Error::Domain(format!(
                        "fiber point ({}, {}) outside the conformal chart",
                        p.coords[1], p.coords[2]
                    )));
                }
                Ok(())
            }
        }
    }

    /// Taylor expansion of the metric around `p`, exact to third order in the
    /// chart displacements.
    pub fn metric_taylor(&self, p: &AmbientPoint) -> Result<[[Jet3; 3]; 3]> {
        self.chart_check(p)?;
        let zero = Jet3::constant(0.0, 3);
        let mut g = [[zero; 3]; 3];
        match self {
            AmbientSpace::Homogeneous(h) => {
                let (kappa, tau) = (h.kappa, h.tau);
                let x = Jet3::var(0, p.coords[0], 3);
                let y = Jet3::var(1, p.coords[1], 3);
                let lam = ((x * x + y * y) * (kappa / 4.0) + 1.0).recip()?;
                let l2 = lam * lam;
                let t2 = tau * tau;
                g[0][0] = l2 * (y * y * t2 + 1.0);
                g[0][1] = -(l2 * x * y) * t2;
                g[0][2] = lam * y * tau;
                g[1][1] = l2 * (x * x * t2 + 1.0);
                g[1][2] = -(lam * x) * tau;
                g[2][2] = Jet3::constant(1.0, 3);
            }
            AmbientSpace::Warped(w) => {
                let t = Jet3::var(0, p.coords[0], 3);
                let x = Jet3::var(1, p.coords[1], 3);
                let y = Jet3::var(2, p.coords[2], 3);
                let a = compose_univariate3(&w.warp.jet(p.coords[0]).coeffs(), &t);
                let eps1 = w.eps1();
                let rho = ((x * x + y * y * eps1) * (w.curvature() / 4.0) + 1.0).recip()?;
                let f2 = (a * a) * (rho * rho);
                g[0][0] = Jet3::constant(w.eps(), 3);
                g[1][1] = f2;
                g[2][2] = f2 * eps1;
            }
        }
        for i in 0..3 {
            for j in 0..i {
                g[i][j] = g[j][i];
            }
        }
        for row in &g {
            for entry in row {
                if !entry.is_finite() {
                    return Err(Error::Internal("non-finite metric jet".into()));
                }
            }
        }
        Ok(g)
    }

    /// Metric components at a point.
    pub fn metric_at(&self, p: &AmbientPoint) -> Result<Mat3> {
        let g = self.metric_taylor(p)?;
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = g[i][j].value();
            }
        }
        Ok(out)
    }

    /// Taylor expansion of the Christoffel symbols around `p`, exact to
    /// second order. Indexed `[k][i][j]` for Gamma^k_ij.
    pub fn christoffel_taylor(&self, p: &AmbientPoint) -> Result<[[[Jet3; 3]; 3]; 3]> {
        let g = self.metric_taylor(p)?;
        let ginv_full = mat3_inv(&g);
        let mut ginv = [[Jet3::constant(0.0, 2); 3]; 3];
        let mut dg = [[[Jet3::constant(0.0, 2); 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                ginv[i][j] = ginv_full[i][j].truncate(2);
                for l in 0..3 {
                    dg[l][i][j] = g[i][j].d(l);
                }
            }
        }
        let zero = Jet3::constant(0.0, 2);
        let mut gamma = [[[zero; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..=i {
                    let mut s = zero;
                    for l in 0..3 {
                        s = s + ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                    let half = s * 0.5;
                    gamma[k][i][j] = half;
                    gamma[k][j][i] = half;
                }
            }
        }
        Ok(gamma)
    }

    /// Christoffel symbol values `Gamma^k_ij` at a point.
    pub fn christoffels_at(&self, p: &AmbientPoint) -> Result<[[[f64; 3]; 3]; 3]> {
        let gamma = self.christoffel_taylor(p)?;
        let mut out = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let v = gamma[k][i][j].value();
                    if !v.is_finite() {
                        return Err(Error::Internal("non-finite Christoffel symbol".into()));
                    }
                    out[k][i][j] = v;
                }
            }
        }
        Ok(out)
    }

    /// Parses `E(kappa,tau)` or `W(eps,eps0,c,k,a=<warp>,I=[lo,hi])`.
    pub fn parse(s: &str) -> Result<AmbientSpace> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("E(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("E descriptor needs two parameters: {s:?}")));
            }
            let kappa = parse_num(parts[0])?;
            let tau = parse_num(parts[1])?;
            return AmbientSpace::homogeneous(kappa, tau);
        }
        if let Some(body) = s.strip_prefix("W(").and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(body);
            if parts.len() != 6 {
                return Err(Error::Parse(format!(
                    "W descriptor needs (eps,eps0,c,k,a=...,I=[lo,hi]): {s:?}"
                )));
            }
            let eps = parse_int(&parts[0])?;
            let eps0 = parse_int(&parts[1])?;
            let c = parse_int(&parts[2])?;
            let k = parse_int(&parts[3])?;
            if k < 0 {
                return Err(Error::Parse("fiber index k must be 0 or 1".into()));
            }
            let warp_str = parts[4]
                .trim()
                .strip_prefix("a=")
                .ok_or_else(|| Error::Parse(format!("expected a=<warp>, got {:?}", parts[4])))?;
            let warp = WarpFn::parse(warp_str)?;
            let ival_str = parts[5]
                .trim()
                .strip_prefix("I=[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("expected I=[lo,hi], got {:?}", parts[5])))?;
            let bounds: Vec<&str> = ival_str.split(',').collect();
            if bounds.len() != 2 {
                return Err(Error::Parse("interval needs two bounds".into()));
            }
            let lo = parse_num(bounds[0])?;
            let hi = parse_num(bounds[1])?;
            return Ok(AmbientSpace::Warped(WarpedProduct::new(
                eps,
                eps0,
                c,
                k as u32,
                warp,
                (lo, hi),
            )?));
        }
        Err(Error::Parse(format!("unrecognized space descriptor {s:?}")))
    }
}

impl std::fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AmbientSpace::Homogeneous(h) => write!(f, "E({},{})", h.kappa, h.tau),
            AmbientSpace::Warped(w) => write!(
                f,
                "W({},{},{},{},a={},I=[{},{}])",
                w.eps, w.eps0, w.c, w.k, w.warp, w.interval.0, w.interval.1
            ),
        }
    }
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{s:?} is not a number")))
}

fn parse_int(s: &str) -> Result<i32> {
    s.trim()
        .parse::<i32>()
        .map_err(|_| Error::Parse(format!("{s:?} is not an integer")))
}

/// Splits on commas outside brackets and parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' | '(' => {
                depth += 1;
                cur.push(ch);
            }
            ']' | ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    parts
}
