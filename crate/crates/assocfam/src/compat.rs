//! Structure-equation residuals.
//!
//! For data `(K, A, T, f)` extracted from an immersion (or rotated by a
//! family law) the four compatibility equations of the relevant fundamental
//! theorem are evaluated pointwise as residuals and aggregated over a grid.
//! Residuals are computed in the coordinate frame with directions normalized
//! in `g`; norms are taken with `g`.
//!
//! In the warped equations the curvature combination is evaluated with the
//! fiber curvature `c` (the combinations `(a')^2/a^2 - eps c/a^2` and
//! `a''/a - (a')^2/a^2 + eps c/a^2`), which agrees with the sign bookkeeping
//! `eps0` on every admissible pair except flat fibers, where `c = 0` is the
//! value that makes flat product cases exactly compatible.

use serde::Serialize;

use crate::ambient::{AmbientSpace, WarpedProduct};
use crate::error::Error;
use crate::linalg::{g_dot, g_norm, mat2_inv, Mat2, Vec2};
use crate::surface::{extract_grid, GridSpec, Immersion, PointExtraction, SurfaceData};

pub use crate::surface::Rect;

/// Everything a residual evaluation needs at one point; either straight from
/// extraction or built from rotated fields.
#[derive(Debug, Clone)]
pub struct FieldPoint {
    pub g: Mat2,
    pub ginv: Mat2,
    pub jmat: Mat2,
    pub k: f64,
    pub eps3: f64,
    pub a: Mat2,
    pub t: Vec2,
    pub f: f64,
    pub nabla_a: [[[f64; 2]; 2]; 2],
    pub nabla_t: [[f64; 2]; 2],
    pub df: Vec2,
    /// Height coordinate and its chart differential (warped only; enables
    /// the gradient diagnostic on unrotated data).
    pub pi: f64,
    pub dpi: Option<Vec2>,
}

impl FieldPoint {
    pub fn from_data(d: &SurfaceData, pi: f64, dpi: Option<Vec2>) -> Self {
        FieldPoint {
            g: d.g,
            ginv: mat2_inv(&d.g),
            jmat: d.jmat,
            k: d.k,
            eps3: d.eps3,
            a: d.a,
            t: d.t,
            f: d.f,
            nabla_a: d.nabla_a,
            nabla_t: d.nabla_t,
            df: d.df,
            pi,
            dpi,
        }
    }

    pub fn from_extraction(e: &PointExtraction) -> Self {
        let dpi = [e.pi_jet.d_du().value(), e.pi_jet.d_dv().value()];
        Self::from_data(&e.data, e.pi_jet.value(), Some(dpi))
    }
}

/// One row of residual values named after its structure equation.
#[derive(Debug, Clone)]
pub struct ResidualSet {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
}

pub const HOMOGENEOUS_EQUATIONS: [&str; 4] = ["gauss", "codazzi", "nabla_T", "X_f"];
pub const WARPED_EQUATIONS: [&str; 5] = ["gauss", "codazzi", "nabla_T", "X_f", "grad_pi"];

fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn normalized_frame(fp: &FieldPoint) -> [Vec2; 2] {
    [
        [1.0 / fp.g[0][0].sqrt(), 0.0],
        [0.0, 1.0 / fp.g[1][1].sqrt()],
    ]
}

fn nabla_a_apply(fp: &FieldPoint, x: &Vec2, y: &Vec2) -> Vec2 {
    // ((nabla_X A) Y)^j
    let mut out = [0.0; 2];
    for j in 0..2 {
        let mut s = 0.0;
        for i in 0..2 {
            for k in 0..2 {
                s += x[i] * fp.nabla_a[i][j][k] * y[k];
            }
        }
        out[j] = s;
    }
    out
}

fn nabla_t_apply(fp: &FieldPoint, x: &Vec2) -> Vec2 {
    [
        x[0] * fp.nabla_t[0][0] + x[1] * fp.nabla_t[1][0],
        x[0] * fp.nabla_t[0][1] + x[1] * fp.nabla_t[1][1],
    ]
}

/// Residuals of the four homogeneous structure equations.
pub fn residual_rows_homogeneous(fp: &FieldPoint, kappa: f64, tau: f64) -> [f64; 4] {
    let coef = kappa - 4.0 * tau * tau;
    let tn2 = g_dot(&fp.g, &fp.t, &fp.t);
    let det_a = fp.a[0][0] * fp.a[1][1] - fp.a[0][1] * fp.a[1][0];
    let r_gauss = (fp.k - det_a - tau * tau - coef * (1.0 - tn2)).abs();

    let [xu, xv] = normalized_frame(fp);
    // Codazzi on the normalized pair (antisymmetry makes one pair enough).
    let lhs = {
        let a = nabla_a_apply(fp, &xu, &xv);
        let b = nabla_a_apply(fp, &xv, &xu);
        [a[0] - b[0], a[1] - b[1]]
    };
    let yt = g_dot(&fp.g, &xv, &fp.t);
    let xt = g_dot(&fp.g, &xu, &fp.t);
    let rhs = [
        coef * fp.f * (yt * xu[0] - xt * xv[0]),
        coef * fp.f * (yt * xu[1] - xt * xv[1]),
    ];
    let r_codazzi = g_norm(&fp.g, &[lhs[0] - rhs[0], lhs[1] - rhs[1]]);

    let mut r_t: f64 = 0.0;
    let mut r_f: f64 = 0.0;
    for x in [&xu, &xv] {
        let nt = nabla_t_apply(fp, x);
        let ax = mat_vec(&fp.a, x);
        let jx = mat_vec(&fp.jmat, x);
        let want = [fp.f * (ax[0] - tau * jx[0]), fp.f * (ax[1] - tau * jx[1])];
        r_t = r_t.max(g_norm(&fp.g, &[nt[0] - want[0], nt[1] - want[1]]));
        let xf = x[0] * fp.df[0] + x[1] * fp.df[1];
        r_f = r_f.max(
            (xf + g_dot(&fp.g, &ax, &fp.t) - tau * g_dot(&fp.g, &jx, &fp.t)).abs(),
        );
    }
    [r_gauss, r_codazzi, r_t, r_f]
}

/// Residuals of the four warped structure equations plus the gradient
/// diagnostic `|T - eps grad(pi)|` when the differential of the height
/// function is available.
pub fn residual_rows_warped(fp: &FieldPoint, w: &WarpedProduct) -> Vec<f64> {
    let a = w.warp().jet(fp.pi);
    let (av, a1, a2) = (a.deriv(0), a.deriv(1), a.deriv(2));
    let eps = w.eps();
    let c = w.curvature();
    let lam = a1 / av;
    let coef = a2 / av - (a1 * a1) / (av * av) + eps * c / (av * av);
    let eps3 = fp.eps3;

    let tn2 = g_dot(&fp.g, &fp.t, &fp.t);
    let det_a = fp.a[0][0] * fp.a[1][1] - fp.a[0][1] * fp.a[1][0];
    let r_gauss = (fp.k - eps3 * det_a + eps * ((a1 * a1) / (av * av) - eps * c / (av * av))
        + coef * tn2)
        .abs();

    let [xu, xv] = normalized_frame(fp);
    let lhs = {
        let p = nabla_a_apply(fp, &xu, &xv);
        let q = nabla_a_apply(fp, &xv, &xu);
        [p[0] - q[0], p[1] - q[1]]
    };
    let yt = g_dot(&fp.g, &xv, &fp.t);
    let xt = g_dot(&fp.g, &xu, &fp.t);
    let rhs = [
        eps3 * coef * fp.f * (yt * xu[0] - xt * xv[0]),
        eps3 * coef * fp.f * (yt * xu[1] - xt * xv[1]),
    ];
    let r_codazzi = g_norm(&fp.g, &[lhs[0] - rhs[0], lhs[1] - rhs[1]]);

    let mut r_t: f64 = 0.0;
    let mut r_f: f64 = 0.0;
    for x in [&xu, &xv] {
        let nt = nabla_t_apply(fp, x);
        let ax = mat_vec(&fp.a, x);
        let xtq = g_dot(&fp.g, x, &fp.t);
        let want = [
            fp.f * ax[0] + lam * (x[0] - eps * xtq * fp.t[0]),
            fp.f * ax[1] + lam * (x[1] - eps * xtq * fp.t[1]),
        ];
        r_t = r_t.max(g_norm(&fp.g, &[nt[0] - want[0], nt[1] - want[1]]));
        let xf = x[0] * fp.df[0] + x[1] * fp.df[1];
        r_f = r_f.max((xf + eps3 * g_dot(&fp.g, &ax, &fp.t) + eps * lam * fp.f * xtq).abs());
    }

    let mut rows = vec![r_gauss, r_codazzi, r_t, r_f];
    if let Some(dpi) = fp.dpi {
        let grad = mat_vec(&fp.ginv, &dpi);
        let diff = [fp.t[0] - eps * grad[0], fp.t[1] - eps * grad[1]];
        rows.push(g_norm(&fp.g, &diff));
    }
    rows
}

/// Residuals for one point of either family.
pub fn residual_rows(space: &AmbientSpace, fp: &FieldPoint) -> Vec<f64> {
    match space {
        AmbientSpace::Homogeneous(h) => {
            residual_rows_homogeneous(fp, h.kappa(), h.tau()).to_vec()
        }
        AmbientSpace::Warped(w) => residual_rows_warped(fp, w),
    }
}

/// The four homogeneous residuals for extracted data.
pub fn residual_homogeneous(d: &SurfaceData, kappa: f64, tau: f64) -> ResidualSet {
    let fp = FieldPoint::from_data(d, 0.0, None);
    ResidualSet {
        names: HOMOGENEOUS_EQUATIONS.to_vec(),
        values: residual_rows_homogeneous(&fp, kappa, tau).to_vec(),
    }
}

/// The four warped residuals for extracted data at height `pi`.
pub fn residual_warped(d: &SurfaceData, w: &WarpedProduct, pi: f64) -> ResidualSet {
    let fp = FieldPoint::from_data(d, pi, None);
    ResidualSet {
        names: WARPED_EQUATIONS[..4].to_vec(),
        values: residual_rows_warped(&fp, w),
    }
}

/// Grid descriptor recorded in reports.
#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub nu: usize,
    pub nv: usize,
    pub margin: f64,
    pub domain_u: (f64, f64),
    pub domain_v: (f64, f64),
}

/// Per-equation aggregate over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct EquationStat {
    pub name: String,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub argmax: (f64, f64),
}

/// Aggregated residuals over a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub kind: String,
    pub surface: String,
    pub space: String,
    pub grid: GridReport,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    pub pass: bool,
    pub equations: Vec<EquationStat>,
    pub errors: Vec<String>,
}

/// Kahan compensated accumulator; grid means are reproducible bit-for-bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub(crate) struct StatAccumulator {
    names: Vec<&'static str>,
    max: Vec<f64>,
    argmax: Vec<(f64, f64)>,
    sums: Vec<KahanSum>,
    count: usize,
}

impl StatAccumulator {
    pub fn new(names: Vec<&'static str>) -> Self {
        let n = names.len();
        StatAccumulator {
            names,
            max: vec![-1.0; n],
            argmax: vec![(0.0, 0.0); n],
            sums: vec![KahanSum::default(); n],
            count: 0,
        }
    }

    pub fn push(&mut self, q: (f64, f64), rows: &[f64]) {
        assert_eq!(rows.len(), self.names.len());
        for (i, &r) in rows.iter().enumerate() {
            let r = r.abs();
            if r > self.max[i] {
                self.max[i] = r;
                self.argmax[i] = q;
            }
            self.sums[i].add(r);
        }
        self.count += 1;
    }

    pub fn finish(self) -> Vec<EquationStat> {
        let n = self.count.max(1) as f64;
        self.names
            .iter()
            .zip(self.max)
            .zip(self.argmax)
            .zip(self.sums)
            .map(|(((name, max_abs), argmax), sum)| EquationStat {
                name: name.to_string(),
                max_abs: max_abs.max(0.0),
                mean_abs: sum.value() / n,
                argmax,
            })
            .collect()
    }
}

pub(crate) fn grid_report_for(imm: &Immersion, grid: &GridSpec) -> GridReport {
    let r = imm.chart_domain();
    GridReport {
        nu: grid.nu,
        nv: grid.nv,
        margin: grid.margin,
        domain_u: r.u,
        domain_v: r.v,
    }
}

/// Evaluates the structure-equation suite over a grid.
pub fn residual_grid(imm: &Immersion, grid: &GridSpec, tol: f64) -> ResidualReport {
    let names: Vec<&'static str> = match imm.space() {
        AmbientSpace::Homogeneous(_) => HOMOGENEOUS_EQUATIONS.to_vec(),
        AmbientSpace::Warped(_) => WARPED_EQUATIONS.to_vec(),
    };
    let mut acc = StatAccumulator::new(names);
    let mut errors = Vec::new();
    for ((u, v), res) in extract_grid(imm, grid) {
        match res {
            Ok(e) => {
                let fp = FieldPoint::from_extraction(&e);
                acc.push((u, v), &residual_rows(imm.space(), &fp));
            }
            Err(err) => errors.push(format!("({u}, {v}): {err}")),
        }
    }
    let equations = acc.finish();
    let pass = errors.is_empty() && equations.iter().all(|e| e.max_abs <= tol);
    ResidualReport {
        kind: "residual_report".to_string(),
        surface: imm.name().to_string(),
        space: imm.space().to_string(),
        grid: grid_report_for(imm, grid),
        tolerance: tol,
        theta: None,
        law: None,
        pass,
        equations,
        errors,
    }
}

/// Extraction failure formatted as a report (used when a whole grid fails).
pub fn failed_report(imm: &Immersion, grid: &GridSpec, tol: f64, err: &Error) -> ResidualReport {
    ResidualReport {
        kind: "residual_report".to_string(),
        surface: imm.name().to_string(),
        space: imm.space().to_string(),
        grid: grid_report_for(imm, grid),
        tolerance: tol,
        theta: None,
        law: None,
        pass: false,
        equations: Vec::new(),
        errors: vec![err.to_string()],
    }
}
