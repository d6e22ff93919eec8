//! Generalized associate families: rotate the data `(A, T, f)` by a family
//! law, verify the rotated data against the structure equations, and evaluate
//! the derived obstruction identities.
//!
//! A family law consists of four scalar functions of the family parameter:
//! `A_theta = F1 e^{-2J theta} (A - H 1) + F2 H 1` and
//! `T_theta = lambda T + mu J T`, with `F1(0) = F2(0) = 1`, `lambda(0) = 1`,
//! `mu(0) = 0`. The canonical law is `F1 = F2 = 1`,
//! `lambda = cos 2 theta`, `mu = -sin 2 theta`, i.e.
//! `T_theta = e^{-2 J theta} T`.

use std::collections::BTreeMap;

use crate::ambient::{AmbientSpace, WarpedProduct};
use crate::compat::{
    grid_report_for, residual_rows, FieldPoint, ResidualReport, StatAccumulator,
    HOMOGENEOUS_EQUATIONS, WARPED_EQUATIONS,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet2;
use crate::linalg::{g_dot, g_norm, mat2_inv, Mat2, Vec2};
use crate::surface::{
    covariant_op_derivative, extract_grid, GridSpec, Immersion, PointExtraction, SurfaceData,
};

/// The four scalar functions of the family parameter.
#[derive(Debug, Clone)]
pub struct FamilyLaw {
    kind: LawKind,
}

#[derive(Debug, Clone)]
enum LawKind {
    Canonical,
    Custom(Box<CustomLaw>),
}

#[derive(Debug, Clone)]
struct CustomLaw {
    f1: Expr,
    f2: Expr,
    lam: Expr,
    mu: Expr,
}

impl FamilyLaw {
    /// `F1 = F2 = 1`, `T_theta = e^{-2J theta} T`.
    pub fn canonical() -> Self {
        FamilyLaw { kind: LawKind::Canonical }
    }

    /// Builds a custom law from expressions in `theta` and validates the
    /// initial conditions.
    pub fn custom(f1: &str, f2: &str, lam: &str, mu: &str) -> Result<Self> {
        let law = FamilyLaw {
            kind: LawKind::Custom(Box::new(CustomLaw {
                f1: Expr::parse(f1, &["theta"])?,
                f2: Expr::parse(f2, &["theta"])?,
                lam: Expr::parse(lam, &["theta"])?,
                mu: Expr::parse(mu, &["theta"])?,
            })),
        };
        let (f1v, f2v, lamv, muv) = law.values(0.0);
        if (f1v - 1.0).abs() > 1e-12
            || (f2v - 1.0).abs() > 1e-12
            || (lamv - 1.0).abs() > 1e-12
            || muv.abs() > 1e-12
        {
            return Err(Error::InvalidLaw(format!(
                "initial conditions violated: F1(0)={f1v}, F2(0)={f2v}, lambda(0)={lamv}, mu(0)={muv}"
            )));
        }
        Ok(law)
    }

    /// Parses `canonical` or `custom(F1=<expr>,F2=<expr>,lam=<expr>,mu=<expr>)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "canonical" {
            return Ok(Self::canonical());
        }
        if let Some(body) = s.strip_prefix("custom(").and_then(|r| r.strip_suffix(')')) {
            let mut f1 = None;
            let mut f2 = None;
            let mut lam = None;
            let mut mu = None;
            for part in split_law_args(body) {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("law component {part:?} needs key=expr")))?;
                match key.trim() {
                    "F1" => f1 = Some(value.to_string()),
                    "F2" => f2 = Some(value.to_string()),
                    "lam" => lam = Some(value.to_string()),
                    "mu" => mu = Some(value.to_string()),
                    other => {
                        return Err(Error::Parse(format!("unknown law component {other:?}")));
                    }
                }
            }
            let missing = || Error::Parse("custom law needs F1, F2, lam, mu".into());
            return Self::custom(
                &f1.ok_or_else(missing)?,
                &f2.ok_or_else(missing)?,
                &lam.ok_or_else(missing)?,
                &mu.ok_or_else(missing)?,
            );
        }
        Err(Error::Parse(format!("unrecognized family law {s:?}")))
    }

    /// `(F1, F2, lambda, mu)` at the family parameter.
    pub fn values(&self, theta: f64) -> (f64, f64, f64, f64) {
        match &self.kind {
            LawKind::Canonical => (1.0, 1.0, (2.0 * theta).cos(), -(2.0 * theta).sin()),
            LawKind::Custom(c) => (
                c.f1.eval1(theta),
                c.f2.eval1(theta),
                c.lam.eval1(theta),
                c.mu.eval1(theta),
            ),
        }
    }
}

impl std::fmt::Display for FamilyLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            LawKind::Canonical => write!(f, "canonical"),
            LawKind::Custom(c) => write!(
                f,
                "custom(F1={},F2={},lam={},mu={})",
                c.f1.source(),
                c.f2.source(),
                c.lam.source(),
                c.mu.source()
            ),
        }
    }
}

fn split_law_args(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => {
                depth += 1;
                cur.push(ch);
            }
            ')' | ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => parts.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    parts.push(cur);
    parts
}

/// Rotated data at one point and parameter value.
#[derive(Debug, Clone)]
pub struct RotatedData {
    pub theta: f64,
    pub a_theta: Mat2,
    pub t_theta: Vec2,
    pub f_theta: f64,
    pub h_theta: f64,
}

/// Which norm constraint governs `f_theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FThetaMode {
    Homogeneous,
    Warped { eps: f64, eps3: f64 },
}

/// `A_theta = F1 e^{-2J theta} (A - H 1) + F2 H 1`.
pub fn rotate_shape(a: &Mat2, h: f64, jmat: &Mat2, theta: f64, law: &FamilyLaw) -> Mat2 {
    let (f1, f2, _, _) = law.values(theta);
    let c = (2.0 * theta).cos();
    let s = (2.0 * theta).sin();
    // e^{-2J theta} = cos(2 theta) 1 - sin(2 theta) J
    let rot = [
        [c - s * jmat[0][0], -s * jmat[0][1]],
        [-s * jmat[1][0], c - s * jmat[1][1]],
    ];
    let aa = [[a[0][0] - h, a[0][1]], [a[1][0], a[1][1] - h]];
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut v = 0.0;
            for k in 0..2 {
                v += rot[i][k] * aa[k][j];
            }
            out[i][j] = f1 * v + if i == j { f2 * h } else { 0.0 };
        }
    }
    out
}

/// `T_theta = lambda T + mu J T`.
pub fn rotate_structure_field(t: &Vec2, jmat: &Mat2, theta: f64, law: &FamilyLaw) -> Vec2 {
    let (_, _, lam, mu) = law.values(theta);
    [
        lam * t[0] + mu * (jmat[0][0] * t[0] + jmat[0][1] * t[1]),
        lam * t[1] + mu * (jmat[1][0] * t[0] + jmat[1][1] * t[1]),
    ]
}

/// Solves the `f_theta` constraint. `branch` picks the square-root sign; the
/// engine passes the sign of `f` so the family is continuous at `theta = 0`.
pub fn solve_f_theta(
    f: f64,
    theta: f64,
    law: &FamilyLaw,
    mode: FThetaMode,
    branch: f64,
) -> Result<f64> {
    let (_, _, lam, mu) = law.values(theta);
    let s = lam * lam + mu * mu;
    let ee = match mode {
        FThetaMode::Homogeneous => 1.0,
        FThetaMode::Warped { eps, eps3 } => eps * eps3,
    };
    // eps3 f_theta^2 = eps - s (eps - eps3 f^2)  <=>  f_theta^2 = s f^2 + (1 - s) eps eps3
    let rad = s * f * f + (1.0 - s) * ee;
    if rad < 0.0 {
        return Err(Error::NoRealSolution(rad));
    }
    Ok(branch.signum() * rad.sqrt())
}

/// Rotates plain extracted data; the `f_theta` branch follows the sign of `f`.
pub fn rotate_data(
    d: &SurfaceData,
    mode: FThetaMode,
    law: &FamilyLaw,
    theta: f64,
) -> Result<RotatedData> {
    let (_, f2, _, _) = law.values(theta);
    let branch = if d.f < 0.0 { -1.0 } else { 1.0 };
    Ok(RotatedData {
        theta,
        a_theta: rotate_shape(&d.a, d.h, &d.jmat, theta, law),
        t_theta: rotate_structure_field(&d.t, &d.jmat, theta, law),
        f_theta: solve_f_theta(d.f, theta, law, mode, branch)?,
        h_theta: f2 * d.h,
    })
}

fn jmat_vec(j: &[[Jet2; 2]; 2], t: &[Jet2; 2]) -> [Jet2; 2] {
    [j[0][0] * t[0] + j[0][1] * t[1], j[1][0] * t[0] + j[1][1] * t[1]]
}

/// Builds the rotated fields as jets over the chart (so their covariant
/// derivatives are exact) and packages point values for the residual kernels.
pub fn rotated_field_point(
    e: &PointExtraction,
    space: &AmbientSpace,
    law: &FamilyLaw,
    theta: f64,
) -> Result<FieldPoint> {
    if theta == 0.0 {
        // The identity member: bit-for-bit the base data.
        let mut fp = FieldPoint::from_extraction(e);
        fp.dpi = None;
        return Ok(fp);
    }
    let (f1, f2, lam, mu) = law.values(theta);
    let c2t = (2.0 * theta).cos();
    let s2t = (2.0 * theta).sin();

    // A_theta as a degree-1 jet field.
    let j1 = [
        [e.j_jet[0][0].truncate(1), e.j_jet[0][1].truncate(1)],
        [e.j_jet[1][0].truncate(1), e.j_jet[1][1].truncate(1)],
    ];
    let mut rot = [[Jet2::constant(0.0, 1); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let diag = if i == j { c2t } else { 0.0 };
            rot[i][j] = Jet2::constant(diag, 1) - j1[i][j] * s2t;
        }
    }
    let aa = [
        [e.a_jet[0][0] - e.h_jet, e.a_jet[0][1]],
        [e.a_jet[1][0], e.a_jet[1][1] - e.h_jet],
    ];
    let mut a_theta = [[Jet2::constant(0.0, 1); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut v = rot[i][0] * aa[0][j] + rot[i][1] * aa[1][j];
            v = v * f1;
            if i == j {
                v = v + e.h_jet * f2;
            }
            a_theta[i][j] = v;
        }
    }

    // T_theta as a degree-2 jet field.
    let jt = jmat_vec(&e.j_jet, &e.t_jet);
    let t_theta = [e.t_jet[0] * lam + jt[0] * mu, e.t_jet[1] * lam + jt[1] * mu];

    // f_theta as a degree-2 jet field.
    let s = lam * lam + mu * mu;
    let ee = match space {
        AmbientSpace::Homogeneous(_) => 1.0,
        AmbientSpace::Warped(w) => w.eps() * e.data.eps3,
    };
    let f_theta = if (s - 1.0).abs() <= 1e-12 {
        // |z_theta| = 1 keeps f_theta = f; avoids sqrt at f = 0.
        e.f_jet
    } else {
        let rad = e.f_jet * e.f_jet * s + Jet2::constant((1.0 - s) * ee, 2);
        if rad.value() <= 0.0 {
            return Err(Error::NoRealSolution(rad.value()));
        }
        let root = rad.sqrt()?;
        if e.data.f < 0.0 {
            -root
        } else {
            root
        }
    };

    // Point values and covariant derivatives of the rotated fields.
    let a_val = [
        [a_theta[0][0].value(), a_theta[0][1].value()],
        [a_theta[1][0].value(), a_theta[1][1].value()],
    ];
    let da = [
        [
            [a_theta[0][0].d_du().value(), a_theta[0][1].d_du().value()],
            [a_theta[1][0].d_du().value(), a_theta[1][1].d_du().value()],
        ],
        [
            [a_theta[0][0].d_dv().value(), a_theta[0][1].d_dv().value()],
            [a_theta[1][0].d_dv().value(), a_theta[1][1].d_dv().value()],
        ],
    ];
    let nabla_a = covariant_op_derivative(&da, &a_val, &e.gamma);
    let t_val = [t_theta[0].value(), t_theta[1].value()];
    let dt = [
        [t_theta[0].d_du().value(), t_theta[1].d_du().value()],
        [t_theta[0].d_dv().value(), t_theta[1].d_dv().value()],
    ];
    let mut nabla_t = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = dt[i][j];
            for l in 0..2 {
                acc += e.gamma[j][i][l] * t_val[l];
            }
            nabla_t[i][j] = acc;
        }
    }
    Ok(FieldPoint {
        g: e.data.g,
        ginv: e.ginv,
        jmat: e.data.jmat,
        k: e.data.k,
        eps3: e.data.eps3,
        a: a_val,
        t: t_val,
        f: f_theta.value(),
        nabla_a,
        nabla_t,
        df: [f_theta.d_du().value(), f_theta.d_dv().value()],
        pi: e.pi_jet.value(),
        dpi: None,
    })
}

/// Verifies the family members at the given parameter values: for each
/// `theta` the rotated data is evaluated against the structure equations over
/// the grid. The base member must pass first. For warped products the warp
/// profile is held at the base height function (exact for products).
pub fn verify_family(
    imm: &Immersion,
    law: &FamilyLaw,
    thetas: &[f64],
    grid: &GridSpec,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let extracted = extract_grid(imm, grid);
    let mut base_acc = StatAccumulator::new(base_names(imm.space()));
    let mut base_errors = Vec::new();
    for ((u, v), res) in &extracted {
        match res {
            Ok(e) => {
                let fp = FieldPoint::from_extraction(e);
                base_acc.push((*u, *v), &residual_rows(imm.space(), &fp));
            }
            Err(err) => base_errors.push(format!("({u}, {v}): {err}")),
        }
    }
    let base_eqs = base_acc.finish();
    let base_pass = base_errors.is_empty() && base_eqs.iter().all(|e| e.max_abs <= tol);
    if !base_pass {
        let worst = base_eqs
            .iter()
            .map(|e| format!("{}={:.3e}", e.name, e.max_abs))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::CaseViolation(format!(
            "base suite failed before family sweep: {worst}{}",
            if base_errors.is_empty() {
                String::new()
            } else {
                format!("; {} extraction errors", base_errors.len())
            }
        )));
    }

    let mut reports = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        // Rotated members carry no height differential, so warped sweeps
        // report the four structure-equation rows away from theta = 0.
        let names = if theta == 0.0 {
            base_names(imm.space())
        } else {
            WARPED_EQUATIONS[..4].to_vec()
        };
        let mut acc = StatAccumulator::new(names);
        let mut errors = Vec::new();
        for ((u, v), res) in &extracted {
            match res {
                Ok(e) => {
                    let fp = if theta == 0.0 {
                        FieldPoint::from_extraction(e)
                    } else {
                        match rotated_field_point(e, imm.space(), law, theta) {
                            Ok(fp) => fp,
                            Err(err) => {
                                errors.push(format!("({u}, {v}): {err}"));
                                continue;
                            }
                        }
                    };
                    acc.push((*u, *v), &residual_rows(imm.space(), &fp));
                }
                Err(err) => errors.push(format!("({u}, {v}): {err}")),
            }
        }
        let equations = acc.finish();
        let pass = errors.is_empty() && equations.iter().all(|e| e.max_abs <= tol);
        reports.push(ResidualReport {
            kind: "residual_report".to_string(),
            surface: imm.name().to_string(),
            space: imm.space().to_string(),
            grid: grid_report_for(imm, grid),
            tolerance: tol,
            theta: Some(theta),
            law: Some(law.to_string()),
            pass,
            equations,
            errors,
        });
    }
    Ok(reports)
}

fn base_names(space: &AmbientSpace) -> Vec<&'static str> {
    match space {
        AmbientSpace::Homogeneous(_) => HOMOGENEOUS_EQUATIONS.to_vec(),
        AmbientSpace::Warped(_) => WARPED_EQUATIONS.to_vec(),
    }
}

fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Case tolerance guarding the `f != 0` / `T != 0` assumptions.
pub const CASE_TOL: f64 = 1e-6;

/// Evaluates the derived obstruction identities of the homogeneous case at a
/// point; requires `f != 0`.
pub fn obstruction_homogeneous(
    d: &SurfaceData,
    kappa: f64,
    tau: f64,
    law: &FamilyLaw,
    theta: f64,
) -> Result<BTreeMap<String, f64>> {
    if d.f.abs() <= CASE_TOL {
        return Err(Error::CaseViolation(format!(
            "obstruction identities assume f != 0 (f = {})",
            d.f
        )));
    }
    let (f1, f2, lam, mu) = law.values(theta);
    let c2t = (2.0 * theta).cos();
    let s2t = (2.0 * theta).sin();
    let s = lam * lam + mu * mu;
    let coef = kappa - 4.0 * tau * tau;
    let branch = if d.f < 0.0 { -1.0 } else { 1.0 };
    let f_theta = solve_f_theta(d.f, theta, law, FThetaMode::Homogeneous, branch)?;
    let ginv = mat2_inv(&d.g);
    let mut out = BTreeMap::new();

    // (detA - detA_theta) = coef (1 - s)(1 - f^2)
    let det_a = d.a[0][0] * d.a[1][1] - d.a[0][1] * d.a[1][0];
    let a_theta = rotate_shape(&d.a, d.h, &d.jmat, theta, law);
    let det_at = a_theta[0][0] * a_theta[1][1] - a_theta[0][1] * a_theta[1][0];
    out.insert(
        "gauss_new".to_string(),
        ((det_a - det_at) - coef * (1.0 - s) * (1.0 - d.f * d.f)).abs(),
    );

    // f (delta A_theta - 2 grad H_theta) = f_theta (lam + mu J)(delta A - 2 grad H).
    // With parallel J: delta A_theta - 2 grad H_theta = F1 e^{-2J theta} delta A^a - F2 grad H.
    let grad_h = mat_vec(&ginv, &d.dh);
    let rot = |v: &Vec2| -> Vec2 {
        let jv = mat_vec(&d.jmat, v);
        [c2t * v[0] - s2t * jv[0], c2t * v[1] - s2t * jv[1]]
    };
    let zmul = |v: &Vec2, re: f64, im: f64| -> Vec2 {
        let jv = mat_vec(&d.jmat, v);
        [re * v[0] + im * jv[0], re * v[1] + im * jv[1]]
    };
    let rot_daa = rot(&d.delta_aa);
    let lhs_cod = [
        d.f * (f1 * rot_daa[0] - f2 * grad_h[0]),
        d.f * (f1 * rot_daa[1] - f2 * grad_h[1]),
    ];
    let daa_minus_gh = [d.delta_aa[0] - grad_h[0], d.delta_aa[1] - grad_h[1]];
    let rhs_cod = zmul(&daa_minus_gh, lam, mu);
    out.insert(
        "codazzi_new".to_string(),
        g_norm(
            &d.g,
            &[
                lhs_cod[0] - f_theta * rhs_cod[0],
                lhs_cod[1] - f_theta * rhs_cod[1],
            ],
        ),
    );

    // (lam + mu J) nabla_X T = f_theta (F1 e^{-2J theta}(A - H) X + F2 H X - tau J X)
    let mut t_new: f64 = 0.0;
    for idx in 0..2 {
        let xhat = if idx == 0 {
            [1.0 / d.g[0][0].sqrt(), 0.0]
        } else {
            [0.0, 1.0 / d.g[1][1].sqrt()]
        };
        let nt = [
            xhat[0] * d.nabla_t[0][0] + xhat[1] * d.nabla_t[1][0],
            xhat[0] * d.nabla_t[0][1] + xhat[1] * d.nabla_t[1][1],
        ];
        let lhs = zmul(&nt, lam, mu);
        let aax = [
            d.aa[0][0] * xhat[0] + d.aa[0][1] * xhat[1],
            d.aa[1][0] * xhat[0] + d.aa[1][1] * xhat[1],
        ];
        let rot_aax = rot(&aax);
        let jx = mat_vec(&d.jmat, &xhat);
        let rhs = [
            f_theta * (f1 * rot_aax[0] + f2 * d.h * xhat[0] - tau * jx[0]),
            f_theta * (f1 * rot_aax[1] + f2 * d.h * xhat[1] - tau * jx[1]),
        ];
        t_new = t_new.max(g_norm(&d.g, &[lhs[0] - rhs[0], lhs[1] - rhs[1]]));
    }
    out.insert("T_new".to_string(), t_new);

    // V = A T + J A J T and B V with B = f (lam + mu J) - f_theta F1 e^{-2J theta}.
    let at = mat_vec(&d.a, &d.t);
    let jt = mat_vec(&d.jmat, &d.t);
    let ajt = mat_vec(&d.a, &jt);
    let jajt = mat_vec(&d.jmat, &ajt);
    let v_vec = [at[0] + jajt[0], at[1] + jajt[1]];
    out.insert("V_norm".to_string(), g_norm(&d.g, &v_vec));
    let bv = [
        d.f * (lam * v_vec[0] + mu * mat_vec(&d.jmat, &v_vec)[0])
            - f_theta * f1 * rot(&v_vec)[0],
        d.f * (lam * v_vec[1] + mu * mat_vec(&d.jmat, &v_vec)[1])
            - f_theta * f1 * rot(&v_vec)[1],
    ];
    out.insert("BV_norm".to_string(), g_norm(&d.g, &bv));

    // relationHandtau: both scalars must vanish for a family to exist.
    out.insert(
        "relationHandtau_1".to_string(),
        ((f2 - f1 * c2t) * d.h + f1 * s2t * tau).abs(),
    );
    out.insert(
        "relationHandtau_2".to_string(),
        (f1 * s2t * d.h + (f1 * c2t - 1.0) * tau).abs(),
    );

    // Forced values of (lambda, mu) when V != 0.
    let lam_dev = (lam - (f_theta / d.f) * f1 * c2t).abs();
    let mu_dev = (mu + (f_theta / d.f) * f1 * s2t).abs();
    out.insert("lambdamu_dev".to_string(), lam_dev.max(mu_dev));

    // Display form of the modified Gauss identity (diagnostic only; carries
    // F1 to first power on the f^2 term as printed, while the warped
    // analogue carries F1^2: see the schema notes).
    let gauss3 = (1.0 - f1 * f1) * (d.k - tau * tau) - (f2 * f2 - f1 * f1) * d.h * d.h
        - coef * (1.0 - s + (s - f1) * d.f * d.f);
    out.insert("gauss3".to_string(), gauss3.abs());

    Ok(out)
}

/// Evaluates the derived obstruction identities of the warped case at a
/// point; requires `f != 0` and a non-umbilical point (`W != 0`), else routes
/// the caller with `CaseViolation` / `UmbilicalPoint`.
pub fn obstruction_warped(
    d: &SurfaceData,
    w: &WarpedProduct,
    pi: f64,
    law: &FamilyLaw,
    theta: f64,
) -> Result<BTreeMap<String, f64>> {
    if d.f.abs() <= CASE_TOL {
        return Err(Error::CaseViolation(format!(
            "obstruction identities assume f != 0 (f = {})",
            d.f
        )));
    }
    let a_jet = w.warp().jet(pi);
    let (av, a1, a2) = (a_jet.deriv(0), a_jet.deriv(1), a_jet.deriv(2));
    let lam_w = a1 / av;
    let eps = w.eps();
    let eps3 = d.eps3;
    let c = w.curvature();
    let coef = a2 / av - (a1 * a1) / (av * av) + eps * c / (av * av);

    let (f1, f2, lam, mu) = law.values(theta);
    let c2t = (2.0 * theta).cos();
    let s2t = (2.0 * theta).sin();
    let s = lam * lam + mu * mu;
    let branch = if d.f < 0.0 { -1.0 } else { 1.0 };
    let f_theta = solve_f_theta(d.f, theta, law, FThetaMode::Warped { eps, eps3 }, branch)?;
    let ginv = mat2_inv(&d.g);
    let tn2 = g_dot(&d.g, &d.t, &d.t);
    let anorm = crate::linalg::g_op_norm(&d.g, &ginv, &d.a);

    // W = J A T - A J T; umbilical points route to the umbilical branch.
    let at = mat_vec(&d.a, &d.t);
    let jat = mat_vec(&d.jmat, &at);
    let jt = mat_vec(&d.jmat, &d.t);
    let ajt = mat_vec(&d.a, &jt);
    let w_vec = [jat[0] - ajt[0], jat[1] - ajt[1]];
    let w_norm = g_norm(&d.g, &w_vec);
    if w_norm < 1e-9 * (1.0 + anorm) {
        return Err(Error::UmbilicalPoint(w_norm));
    }
    if tn2.sqrt() <= CASE_TOL {
        return Err(Error::CaseViolation(format!(
            "obstruction identities assume T != 0 (|T| = {})",
            tn2.sqrt()
        )));
    }

    let mut out = BTreeMap::new();
    out.insert("W_norm".to_string(), w_norm);

    // Modified Gauss identity.
    let gauss = (1.0 - f1 * f1) * (d.k + eps * a2 / av) + eps3 * (f2 * f2 - f1 * f1) * d.h * d.h
        - coef * (eps * (1.0 - s) + (s - f1 * f1) * eps3 * d.f * d.f);
    out.insert("gauss_wp3".to_string(), gauss.abs());

    // Modified Codazzi identity.
    let grad_h = mat_vec(&ginv, &d.dh);
    let rot = |v: &Vec2| -> Vec2 {
        let jv = mat_vec(&d.jmat, v);
        [c2t * v[0] - s2t * jv[0], c2t * v[1] - s2t * jv[1]]
    };
    let zmul = |v: &Vec2, re: f64, im: f64| -> Vec2 {
        let jv = mat_vec(&d.jmat, v);
        [re * v[0] + im * jv[0], re * v[1] + im * jv[1]]
    };
    let rot_daa = rot(&d.delta_aa);
    let daa_minus_gh = [d.delta_aa[0] - grad_h[0], d.delta_aa[1] - grad_h[1]];
    let rhs = zmul(&daa_minus_gh, lam, mu);
    let cod = [
        f1 * rot_daa[0] - f2 * grad_h[0] - (f_theta / d.f) * rhs[0],
        f1 * rot_daa[1] - f2 * grad_h[1] - (f_theta / d.f) * rhs[1],
    ];
    out.insert("codazzi_wp3".to_string(), g_norm(&d.g, &cod));

    // Modified T identity.
    let t_theta = rotate_structure_field(&d.t, &d.jmat, theta, law);
    let mut t_res: f64 = 0.0;
    for idx in 0..2 {
        let xhat = if idx == 0 {
            [1.0 / d.g[0][0].sqrt(), 0.0]
        } else {
            [0.0, 1.0 / d.g[1][1].sqrt()]
        };
        let ax = mat_vec(&d.a, &xhat);
        let bax = {
            let z = zmul(&ax, lam, mu);
            let r = rot(&ax);
            [d.f * z[0] - f_theta * f1 * r[0], d.f * z[1] - f_theta * f1 * r[1]]
        };
        let hx = {
            let r = rot(&xhat);
            [
                f_theta * (f2 * xhat[0] - f1 * r[0]) * d.h,
                f_theta * (f2 * xhat[1] - f1 * r[1]) * d.h,
            ]
        };
        let xtt = g_dot(&d.g, &xhat, &t_theta);
        let xt = g_dot(&d.g, &xhat, &d.t);
        let p1 = [xhat[0] - eps * xtt * t_theta[0], xhat[1] - eps * xtt * t_theta[1]];
        let p2v = [xhat[0] - eps * xt * d.t[0], xhat[1] - eps * xt * d.t[1]];
        let p2 = zmul(&p2v, lam, mu);
        let warp_term = [lam_w * (p1[0] - p2[0]), lam_w * (p1[1] - p2[1])];
        let r = [
            bax[0] - hx[0] - warp_term[0],
            bax[1] - hx[1] - warp_term[1],
        ];
        t_res = t_res.max(g_norm(&d.g, &r));
    }
    out.insert("T_wp3".to_string(), t_res);

    // Scalar consequences.
    out.insert(
        "eqforH1".to_string(),
        (mu * (lam_w * (2.0 - eps * tn2) + 2.0 * d.f * d.h)).abs(),
    );
    out.insert(
        "eqforH2".to_string(),
        (2.0 * (d.f * lam - f_theta * f2) * d.h
            - lam_w * ((1.0 - lam) * (2.0 - eps * tn2) + eps * (1.0 - s) * tn2))
            .abs(),
    );
    out.insert(
        "eqF_2wp".to_string(),
        (f2 * f_theta * (2.0 - eps * tn2) - d.f * (2.0 - eps * s * tn2)).abs(),
    );

    // (alpha 1 + beta J) W = J T and the cubic coefficients.
    let jw = mat_vec(&d.jmat, &w_vec);
    let det = w_vec[0] * jw[1] - jw[0] * w_vec[1];
    let alpha = (jt[0] * jw[1] - jw[0] * jt[1]) / det;
    let beta = (w_vec[0] * jt[1] - jt[0] * w_vec[1]) / det;

    // Complex frame (E1, J E1).
    let e1 = [1.0 / d.g[0][0].sqrt(), 0.0];
    let e2 = mat_vec(&d.jmat, &e1);
    let to_c = |v: &Vec2| -> (f64, f64) { (g_dot(&d.g, v, &e1), g_dot(&d.g, v, &e2)) };
    let cmul = |a: (f64, f64), b: (f64, f64)| -> (f64, f64) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    };
    let cscale = |a: (f64, f64), s: f64| (a.0 * s, a.1 * s);
    let cadd = |a: (f64, f64), b: (f64, f64)| (a.0 + b.0, a.1 + b.1);
    let cabs = |a: (f64, f64)| (a.0 * a.0 + a.1 * a.1).sqrt();

    let daa_c = to_c(&d.delta_aa);
    let gh_c = to_c(&grad_h);
    let diff_c = (daa_c.0 - gh_c.0, daa_c.1 - gh_c.1);
    let ab = (alpha, beta);
    let ab_daa = cmul(ab, daa_c);
    let f2v = d.f * d.f;
    let denom = 2.0 - eps * tn2;
    let c0 = cscale(gh_c, 2.0 * f2v / denom);
    let c1 = cadd(
        cadd(cscale(diff_c, eps * eps3), cscale(ab_daa, lam_w * d.f * eps * tn2)),
        cscale(daa_c, -f2v),
    );
    let c2 = cscale(gh_c, -eps * f2v * tn2 / denom);
    let c3 = cscale(ab_daa, -lam_w * d.f * eps * tn2);
    let c4 = cscale(diff_c, -eps3 * tn2);
    out.insert("c0".to_string(), cabs(c0));
    out.insert("c1".to_string(), cabs(c1));
    out.insert("c2".to_string(), cabs(c2));
    out.insert("c3".to_string(), cabs(c3));
    out.insert("c4".to_string(), cabs(c4));
    // d2 coefficient of the factored cubic: must vanish for a smooth family.
    out.insert("polynomial_d2".to_string(), cabs(c3));

    Ok(out)
}
