//! Surface extraction: everything the structure equations need, from an
//! analytic parametrization into an ambient chart.
//!
//! The extractor evaluates the parametrization on degree-3 jets in the chart
//! variables, composes it with the exact ambient Taylor data, and produces
//! per-point jets of the induced metric, rotation `J`, normal, shape operator
//! `A`, structure field `T` and normal component `f`. Intrinsic covariant
//! derivatives are read off those jets with the intrinsic Christoffel symbols
//! of the induced metric. No finite differences anywhere.
//!
//! Conventions (all verified by the compatibility suites):
//! - `A X = -(nabla_X nu)^tan`, so the unit sphere in Euclidean space with
//!   outward normal has `A = -1` and `H = -1`;
//! - with orientation `+1`, `nu` makes `(d chi_u, d chi_v, nu)` positively
//!   oriented in the chart and `J` is the g-rotation with `J du ~ +dv`;
//!   flipping the orientation flips `nu`, `J`, `A`, `f` together and fixes
//!   `g`, `T`, `K`.

use std::sync::Arc;

use serde::Serialize;

use crate::ambient::{AmbientPoint, AmbientSpace};
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::{mat2_inv, Mat2, Vec2, Vec3};

pub type ChartMap = Arc<dyn Fn(Jet2, Jet2) -> [Jet2; 3] + Send + Sync>;

/// Open rectangle in the surface chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Rect {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Rect { u: (u0, u1), v: (v0, v1) }
    }
}

/// Uniform sampling grid, shrunk away from the chart boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub nu: usize,
    pub nv: usize,
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nu: 21, nv: 21, margin: 0.05 }
    }
}

impl GridSpec {
    pub fn new(nu: usize, nv: usize, margin: f64) -> Self {
        GridSpec { nu, nv, margin }
    }

    /// Grid points in a fixed row-major order (u varies fastest).
    pub fn points(&self, rect: &Rect) -> Vec<(f64, f64)> {
        let span_u = rect.u.1 - rect.u.0;
        let span_v = rect.v.1 - rect.v.0;
        let u_lo = rect.u.0 + self.margin * span_u;
        let v_lo = rect.v.0 + self.margin * span_v;
        let du = span_u * (1.0 - 2.0 * self.margin);
        let dv = span_v * (1.0 - 2.0 * self.margin);
        let mut pts = Vec::with_capacity(self.nu * self.nv);
        for iv in 0..self.nv {
            let v = if self.nv == 1 { v_lo + dv / 2.0 } else { v_lo + dv * iv as f64 / (self.nv - 1) as f64 };
            for iu in 0..self.nu {
                let u = if self.nu == 1 { u_lo + du / 2.0 } else { u_lo + du * iu as f64 / (self.nu - 1) as f64 };
                pts.push((u, v));
            }
        }
        pts
    }
}

/// An analytic parametrized surface in an ambient chart.
#[derive(Clone)]
pub struct Immersion {
    space: AmbientSpace,
    chart_domain: Rect,
    map: ChartMap,
    orientation: f64,
    name: String,
}

impl Immersion {
    /// Builds an immersion and fixes the default orientation so that the
    /// normal component `f` is non-negative at the first default-grid point
    /// (right-handed frame rule when `f` vanishes there).
    pub fn new(space: AmbientSpace, chart_domain: Rect, map: ChartMap) -> Result<Self> {
        let mut imm = Immersion {
            space,
            chart_domain,
            map,
            orientation: 1.0,
            name: String::new(),
        };
        let (u0, v0) = GridSpec::default().points(&chart_domain)[0];
        let probe = extract_point(&imm, u0, v0)?;
        if probe.data.f < -1e-9 {
            imm.orientation = -1.0;
        }
        Ok(imm)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Negates the orientation: `(nu, f, A, J)` flip, `(g, T, K)` stay.
    pub fn flipped(&self) -> Self {
        let mut imm = self.clone();
        imm.orientation = -imm.orientation;
        imm
    }

    /// Same parametrization on a different chart rectangle. No probing: the
    /// orientation stays as constructed.
    pub fn with_domain(&self, chart_domain: Rect) -> Self {
        let mut imm = self.clone();
        imm.chart_domain = chart_domain;
        imm
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn chart_domain(&self) -> &Rect {
        &self.chart_domain
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn map(&self) -> &ChartMap {
        &self.map
    }

    /// Composes with the chart diffeomorphism `(u, v) -> (u + shear v, v)`.
    /// Used by the reparametrization-invariance checks. The u-range shrinks
    /// so the sheared rectangle stays inside the original one.
    pub fn sheared(&self, shear: f64) -> Self {
        let inner = Arc::clone(&self.map);
        let map: ChartMap = Arc::new(move |u: Jet2, v: Jet2| inner(u + v * shear, v));
        let r = self.chart_domain;
        let sv = (shear * r.v.0, shear * r.v.1);
        let u0 = r.u.0 - sv.0.min(sv.1);
        let u1 = r.u.1 - sv.0.max(sv.1);
        let mut imm = self.clone();
        imm.map = map;
        imm.chart_domain = Rect::new(u0, u1, r.v.0, r.v.1);
        imm
    }
}

/// Complete per-point geometric payload, plain values.
///
/// Serializes with this exact field order at 17 significant digits; the JSON
/// golden tests pin the layout.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceData {
    pub g: Mat2,
    pub jmat: Mat2,
    pub nu: Vec3,
    pub eps3: f64,
    pub a: Mat2,
    pub t: Vec2,
    pub f: f64,
    pub h: f64,
    pub k: f64,
    pub aa: Mat2,
    pub nabla_a: [[[f64; 2]; 2]; 2],
    pub nabla_t: [[f64; 2]; 2],
    pub df: Vec2,
    pub dh: Vec2,
    pub delta_aa: Vec2,
}

/// Per-point jets retained for the associate-family machinery, which needs
/// to differentiate rotated fields.
#[derive(Debug, Clone)]
pub struct PointExtraction {
    pub q: (f64, f64),
    pub data: SurfaceData,
    /// Induced metric, exact to second order.
    pub g_jet: [[Jet2; 2]; 2],
    /// Oriented g-rotation, exact to second order.
    pub j_jet: [[Jet2; 2]; 2],
    /// Shape operator, exact to first order.
    pub a_jet: [[Jet2; 2]; 2],
    /// Structure field, exact to second order.
    pub t_jet: [Jet2; 2],
    /// Normal component of the vertical field, exact to second order.
    pub f_jet: Jet2,
    /// Mean curvature, exact to first order.
    pub h_jet: Jet2,
    /// Intrinsic Christoffel values of the induced metric.
    pub gamma: [[[f64; 2]; 2]; 2],
    pub ginv: Mat2,
    /// Height coordinate of the parametrization (warped: pi = t o chi).
    pub pi_jet: Jet2,
}

fn trunc_m3(m: &[[Jet2; 3]; 3], deg: usize) -> [[Jet2; 3]; 3] {
    let mut out = [[Jet2::constant(0.0, deg); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].truncate(deg);
        }
    }
    out
}

fn trunc_v3(v: &[Jet2; 3], deg: usize) -> [Jet2; 3] {
    [v[0].truncate(deg), v[1].truncate(deg), v[2].truncate(deg)]
}

fn dot3(gm: &[[Jet2; 3]; 3], a: &[Jet2; 3], b: &[Jet2; 3]) -> Jet2 {
    let mut s = gm[0][0] * a[0] * b[0];
    for i in 0..3 {
        for j in 0..3 {
            if i == 0 && j == 0 {
                continue;
            }
            s = s + gm[i][j] * a[i] * b[j];
        }
    }
    s
}

/// Full extraction at one chart point.
pub fn extract_point(imm: &Immersion, u: f64, v: f64) -> Result<PointExtraction> {
    let deg = 3;
    let uj = Jet2::var_u(u, deg);
    let vj = Jet2::var_v(v, deg);
    let chi = (imm.map)(uj, vj);
    for c in &chi {
        if !c.is_finite() {
            return Err(Error::Internal(format!(
                "parametrization produced non-finite jets at ({u}, {v})"
            )));
        }
    }
    let p0 = AmbientPoint::new(chi[0].value(), chi[1].value(), chi[2].value());

    // Ambient Taylor data composed along the surface.
    let g_amb = imm.space.metric_taylor(&p0)?;
    let gamma_amb = imm.space.christoffel_taylor(&p0)?;
    let mut shift = chi;
    for s in &mut shift {
        s.set_coeff(0, 0, 0.0);
    }
    let shift2 = trunc_v3(&shift, 2);
    let mut gm = [[Jet2::constant(0.0, 3); 3]; 3]; // metric along chi, deg 3
    let mut gam = [[[Jet2::constant(0.0, 2); 3]; 3]; 3]; // Christoffels along chi, deg 2
    for i in 0..3 {
        for j in 0..3 {
            gm[i][j] = g_amb[i][j].compose2(&shift);
            for k in 0..3 {
                gam[k][i][j] = gamma_amb[k][i][j].compose2(&shift2);
            }
        }
    }

    // Tangent jets, exact to second order.
    let du = [chi[0].d_du(), chi[1].d_du(), chi[2].d_du()];
    let dv = [chi[0].d_dv(), chi[1].d_dv(), chi[2].d_dv()];

    // Conormal: w_b = eps_{bcd} du^c dv^d; rank check.
    let w = [
        du[1] * dv[2] - du[2] * dv[1],
        du[2] * dv[0] - du[0] * dv[2],
        du[0] * dv[1] - du[1] * dv[0],
    ];
    let wn2 = w[0].value() * w[0].value() + w[1].value() * w[1].value() + w[2].value() * w[2].value();
    let scale2: f64 = du.iter().chain(dv.iter()).map(|x| x.value() * x.value()).sum();
    if wn2 <= 1e-24 * (1.0 + scale2 * scale2) {
        return Err(Error::DegenerateImmersion(u, v));
    }

    // Induced metric, deg 2 exact.
    let gm2 = trunc_m3(&gm, 2);
    let g_jet = {
        let mut g = [[Jet2::constant(0.0, 2); 2]; 2];
        let tang = [&du, &dv];
        for i in 0..2 {
            for j in 0..2 {
                g[i][j] = dot3(&gm2, tang[i], tang[j]);
            }
        }
        g
    };
    let gval = [[g_jet[0][0].value(), g_jet[0][1].value()], [g_jet[1][0].value(), g_jet[1][1].value()]];
    let detg = gval[0][0] * gval[1][1] - gval[0][1] * gval[1][0];
    if !(gval[0][0] > 0.0 && detg > 0.0) {
        return Err(Error::Signature(u, v));
    }

    // Unit normal with sign and orientation.
    let ginv_amb = crate::linalg::mat3_inv(&gm);
    let ginv_amb2 = trunc_m3(&ginv_amb, 2);
    let mut nu_hat = [Jet2::constant(0.0, 2); 3];
    for a in 0..3 {
        nu_hat[a] = ginv_amb2[a][0] * w[0] + ginv_amb2[a][1] * w[1] + ginv_amb2[a][2] * w[2];
    }
    let n2 = dot3(&gm2, &nu_hat, &nu_hat);
    let n2val = n2.value();
    if n2val.abs() <= 1e-12 * (1.0 + wn2) {
        return Err(Error::LightlikeNormal(u, v));
    }
    let eps3 = n2val.signum();
    // nu = orientation * eps3 * nu_hat / sqrt(eps3 n2): with orientation +1
    // the triple (du, dv, nu) is positively oriented in the chart.
    let inv_norm = (n2 * eps3).sqrt()?.recip()?;
    let factor = inv_norm * (imm.orientation * eps3);
    let nu_jet = [nu_hat[0] * factor, nu_hat[1] * factor, nu_hat[2] * factor];

    // Oriented g-rotation J, deg 2 exact.
    let detg_jet = g_jet[0][0] * g_jet[1][1] - g_jet[0][1] * g_jet[1][0];
    let inv_sqrt_det = detg_jet.sqrt()?.recip()?;
    let o = imm.orientation;
    let j_jet = [
        [-(g_jet[0][1] * inv_sqrt_det) * o, -(g_jet[1][1] * inv_sqrt_det) * o],
        [g_jet[0][0] * inv_sqrt_det * o, g_jet[0][1] * inv_sqrt_det * o],
    ];

    // Structure field and normal component of the vertical direction.
    let vt = imm.space.vertical_index();
    let ginv_jet = mat2_inv(&g_jet);
    let tang = [&du, &dv];
    let mut rhs = [Jet2::constant(0.0, 2); 2];
    for (i, dx) in tang.iter().enumerate() {
        rhs[i] = gm2[vt][0] * dx[0] + gm2[vt][1] * dx[1] + gm2[vt][2] * dx[2];
    }
    let t_jet = [
        ginv_jet[0][0] * rhs[0] + ginv_jet[0][1] * rhs[1],
        ginv_jet[1][0] * rhs[0] + ginv_jet[1][1] * rhs[1],
    ];
    let f_jet = (gm2[vt][0] * nu_jet[0] + gm2[vt][1] * nu_jet[1] + gm2[vt][2] * nu_jet[2]) * eps3;

    // Shape operator A X = -(nabla_X nu)^tan, deg 1 exact.
    let gm1 = trunc_m3(&gm, 1);
    let ginv1 = [
        [ginv_jet[0][0].truncate(1), ginv_jet[0][1].truncate(1)],
        [ginv_jet[1][0].truncate(1), ginv_jet[1][1].truncate(1)],
    ];
    let nu1 = trunc_v3(&nu_jet, 1);
    let du1 = trunc_v3(&du, 1);
    let dv1 = trunc_v3(&dv, 1);
    let dnu = [
        [nu_jet[0].d_du(), nu_jet[1].d_du(), nu_jet[2].d_du()],
        [nu_jet[0].d_dv(), nu_jet[1].d_dv(), nu_jet[2].d_dv()],
    ];
    let tang1 = [&du1, &dv1];
    let mut a_jet = [[Jet2::constant(0.0, 1); 2]; 2];
    for i in 0..2 {
        // covariant derivative of nu along tangent direction i
        let mut dnu_cov = [Jet2::constant(0.0, 1); 3];
        for aamb in 0..3 {
            let mut s = dnu[i][aamb];
            for b in 0..3 {
                for c in 0..3 {
                    s = s + gam[aamb][b][c].truncate(1) * tang1[i][b] * nu1[c];
                }
            }
            dnu_cov[aamb] = s;
        }
        for j in 0..2 {
            // A^j_i = -ginv[j][k] <dnu_cov, dchi_k>
            let mut s = Jet2::constant(0.0, 1);
            for k in 0..2 {
                s = s + ginv1[j][k] * dot3(&gm1, &dnu_cov, tang1[k]);
            }
            a_jet[j][i] = -s;
        }
    }
    let h_jet = (a_jet[0][0] + a_jet[1][1]) * 0.5;

    // Gauss curvature by the Brioschi formula from the exact metric jets.
    let k = brioschi(&g_jet);

    // Intrinsic Christoffels of g at the point.
    let dg = [
        [
            [g_jet[0][0].d_du().value(), g_jet[0][1].d_du().value()],
            [g_jet[1][0].d_du().value(), g_jet[1][1].d_du().value()],
        ],
        [
            [g_jet[0][0].d_dv().value(), g_jet[0][1].d_dv().value()],
            [g_jet[1][0].d_dv().value(), g_jet[1][1].d_dv().value()],
        ],
    ];
    let ginv_val = [
        [ginv_jet[0][0].value(), ginv_jet[0][1].value()],
        [ginv_jet[1][0].value(), ginv_jet[1][1].value()],
    ];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for kk in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for l in 0..2 {
                    s += ginv_val[kk][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gamma[kk][i][j] = 0.5 * s;
            }
        }
    }

    // Covariant derivatives (point values).
    let a_val = [[a_jet[0][0].value(), a_jet[0][1].value()], [a_jet[1][0].value(), a_jet[1][1].value()]];
    let da = [
        [[a_jet[0][0].d_du().value(), a_jet[0][1].d_du().value()], [a_jet[1][0].d_du().value(), a_jet[1][1].d_du().value()]],
        [[a_jet[0][0].d_dv().value(), a_jet[0][1].d_dv().value()], [a_jet[1][0].d_dv().value(), a_jet[1][1].d_dv().value()]],
    ];
    let nabla_a = covariant_op_derivative(&da, &a_val, &gamma);
    let t_val = [t_jet[0].value(), t_jet[1].value()];
    let dt = [
        [t_jet[0].d_du().value(), t_jet[1].d_du().value()],
        [t_jet[0].d_dv().value(), t_jet[1].d_dv().value()],
    ];
    let mut nabla_t = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = dt[i][j];
            for l in 0..2 {
                s += gamma[j][i][l] * t_val[l];
            }
            nabla_t[i][j] = s;
        }
    }
    let df = [f_jet.d_du().value(), f_jet.d_dv().value()];
    let dh = [h_jet.d_du().value(), h_jet.d_dv().value()];
    let hval = h_jet.value();
    // delta(A^a)^j = g^{ik} (nabla_i A^a)^j_k with A^a = A - H 1.
    let mut delta_aa = [0.0; 2];
    for j in 0..2 {
        let mut s = 0.0;
        for i in 0..2 {
            for kk in 0..2 {
                let naa = nabla_a[i][j][kk] - if j == kk { dh[i] } else { 0.0 };
                s += ginv_val[i][kk] * naa;
            }
        }
        delta_aa[j] = s;
    }

    let jval = [[j_jet[0][0].value(), j_jet[0][1].value()], [j_jet[1][0].value(), j_jet[1][1].value()]];
    let nuval = [nu_jet[0].value(), nu_jet[1].value(), nu_jet[2].value()];
    let aa = [
        [a_val[0][0] - hval, a_val[0][1]],
        [a_val[1][0], a_val[1][1] - hval],
    ];
    let data = SurfaceData {
        g: gval,
        jmat: jval,
        nu: nuval,
        eps3,
        a: a_val,
        t: t_val,
        f: f_jet.value(),
        h: hval,
        k,
        aa,
        nabla_a,
        nabla_t,
        df,
        dh,
        delta_aa,
    };
    if !data.f.is_finite() || !data.k.is_finite() || !hval.is_finite() {
        return Err(Error::Internal(format!("non-finite extraction at ({u}, {v})")));
    }

    Ok(PointExtraction {
        q: (u, v),
        data,
        g_jet,
        j_jet,
        a_jet,
        t_jet,
        f_jet,
        h_jet,
        gamma,
        ginv: ginv_val,
        pi_jet: chi[vt],
    })
}

/// `(nabla_i Op)^j_k = d_i Op^j_k + gamma^j_il Op^l_k - gamma^l_ik Op^j_l`.
pub fn covariant_op_derivative(
    d_op: &[[[f64; 2]; 2]; 2],
    op: &Mat2,
    gamma: &[[[f64; 2]; 2]; 2],
) -> [[[f64; 2]; 2]; 2] {
    let mut out = [[[0.0; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut s = d_op[i][j][k];
                for l in 0..2 {
                    s += gamma[j][i][l] * op[l][k] - gamma[l][i][k] * op[j][l];
                }
                out[i][j][k] = s;
            }
        }
    }
    out
}

/// Brioschi formula for the Gauss curvature from the metric jets (which are
/// exact to second order).
fn brioschi(g: &[[Jet2; 2]; 2]) -> f64 {
    let e = g[0][0];
    let f = g[0][1];
    let gg = g[1][1];
    let (ev, fv, gv) = (e.value(), f.value(), gg.value());
    let e_u = e.partial(1, 0);
    let e_v = e.partial(0, 1);
    let e_vv = e.partial(0, 2);
    let f_u = f.partial(1, 0);
    let f_v = f.partial(0, 1);
    let f_uv = f.partial(1, 1);
    let g_u = gg.partial(1, 0);
    let g_v = gg.partial(0, 1);
    let g_uu = gg.partial(2, 0);
    let m1 = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, ev, fv],
        [0.5 * g_v, fv, gv],
    ];
    let m2 = [
        [0.0, 0.5 * e_v, 0.5 * g_u],
        [0.5 * e_v, ev, fv],
        [0.5 * g_u, fv, gv],
    ];
    let det = ev * gv - fv * fv;
    (crate::linalg::mat3_det(&m1) - crate::linalg::mat3_det(&m2)) / (det * det)
}

/// First fundamental form at a chart point.
pub fn first_fundamental(imm: &Immersion, u: f64, v: f64) -> Result<Mat2> {
    Ok(extract_point(imm, u, v)?.data.g)
}

/// Unit normal and its causal character.
pub fn normal_and_sign(imm: &Immersion, u: f64, v: f64) -> Result<(Vec3, f64)> {
    let e = extract_point(imm, u, v)?;
    Ok((e.data.nu, e.data.eps3))
}

/// Shape operator in the coordinate frame.
pub fn shape_operator(imm: &Immersion, u: f64, v: f64) -> Result<Mat2> {
    Ok(extract_point(imm, u, v)?.data.a)
}

/// Tangent part `T` and normal part `f` of the vertical field.
pub fn structure_projection(imm: &Immersion, u: f64, v: f64) -> Result<(Vec2, f64)> {
    let e = extract_point(imm, u, v)?;
    Ok((e.data.t, e.data.f))
}

/// Intrinsic Gauss curvature.
pub fn gauss_curvature(imm: &Immersion, u: f64, v: f64) -> Result<f64> {
    Ok(extract_point(imm, u, v)?.data.k)
}

/// Splits a shape operator into trace and rotation-commuting/anticommuting
/// parts: `H = tr(A)/2`, `A^c = H 1`, `A^a = A - H 1`.
pub fn split_shape(a: &Mat2) -> (f64, Mat2, Mat2) {
    let h = 0.5 * (a[0][0] + a[1][1]);
    let ac = [[h, 0.0], [0.0, h]];
    let aa = [[a[0][0] - h, a[0][1]], [a[1][0], a[1][1] - h]];
    (h, ac, aa)
}

/// All intrinsic covariant derivatives at a point.
pub fn covariant_data(
    imm: &Immersion,
    u: f64,
    v: f64,
) -> Result<([[[f64; 2]; 2]; 2], [[f64; 2]; 2], Vec2, Vec2, Vec2)> {
    let e = extract_point(imm, u, v)?;
    Ok((e.data.nabla_a, e.data.nabla_t, e.data.df, e.data.dh, e.data.delta_aa))
}

/// Extracts every grid point, keeping per-point failures.
pub fn extract_grid(imm: &Immersion, grid: &GridSpec) -> Vec<((f64, f64), Result<PointExtraction>)> {
    let pts = grid.points(&imm.chart_domain);
    let threads = crate::thread_limit().min(pts.len().max(1));
    if threads <= 1 {
        return pts
            .into_iter()
            .map(|(u, v)| ((u, v), extract_point(imm, u, v)))
            .collect();
    }
    let mut out: Vec<Option<((f64, f64), Result<PointExtraction>)>> = vec![None; pts.len()];
    let chunk = pts.len().div_ceil(threads);
    std::thread::scope(|s| {
        for (slot_chunk, pt_chunk) in out.chunks_mut(chunk).zip(pts.chunks(chunk)) {
            s.spawn(move || {
                for (slot, &(u, v)) in slot_chunk.iter_mut().zip(pt_chunk) {
                    *slot = Some(((u, v), extract_point(imm, u, v)));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("chunk filled")).collect()
}

/// Extracts every grid point, failing on the first error.
pub fn extract_grid_strict(imm: &Immersion, grid: &GridSpec) -> Result<Vec<PointExtraction>> {
    extract_grid(imm, grid)
        .into_iter()
        .map(|(_, r)| r)
        .collect()
}
