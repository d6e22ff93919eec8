//! Existence classification for generalized associate families.
//!
//! The verdict rests only on the decidable hypotheses of the case theorems:
//! the exact parameter `tau`, minimality (`max |H|`), total umbilicity
//! (`max |A - H 1|`), constancy of the warp function along the surface, and
//! the case tag of the structure field. The derived obstruction identities
//! are evaluated as diagnostics and the strongest violated one is recorded
//! with a `NotExists` verdict.

use serde::Serialize;

use crate::ambient::AmbientSpace;
use crate::compat::{residual_rows, FieldPoint};
use crate::error::{Error, Result};
use crate::family::{obstruction_warped, FamilyLaw};
use crate::linalg::{g_dot, g_op_norm};
use crate::surface::{extract_grid, GridSpec, Immersion, PointExtraction};

/// Existence outcome per the case theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    ExistsMinimalProduct,
    ExistsTotallyUmbilical,
    ExistsVerticalCylinderProduct,
    NotExists,
    SpaceFormExcluded,
    Undetermined,
}

/// Structure-field case of a point or a whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    #[serde(rename = "T_equals_dt")]
    TEqualsDt,
    #[serde(rename = "T_zero")]
    TZero,
    #[serde(rename = "generic")]
    Generic,
    #[serde(rename = "mixed")]
    Mixed,
}

/// Verdict for one case region of a mixed surface.
#[derive(Debug, Clone, Serialize)]
pub struct SubVerdict {
    pub case: CaseTag,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
}

/// The classifier's decision with its triggering obstruction.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub kind: String,
    pub surface: String,
    pub space: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction_magnitude: Option<f64>,
    pub case: CaseTag,
    pub max_abs_h: f64,
    pub max_umbilicity_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_warp_rate: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subverdicts: Vec<SubVerdict>,
}

/// Tolerances for the case split and the theorem hypotheses.
#[derive(Debug, Clone, Copy)]
pub struct ClassifyTolerances {
    /// Residual tolerance for the precondition suite.
    pub suite: f64,
    /// `|f|` / `|T|` threshold of the case split.
    pub case: f64,
    /// Threshold on `|H|`, the umbilicity defect and the warp rate.
    pub class: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        ClassifyTolerances { suite: 1e-8, case: 1e-6, class: 1e-7 }
    }
}

/// Tags each point and aggregates: the unique tag when uniform, else mixed.
pub fn case_split(points: &[PointExtraction], tol_case: f64) -> (Vec<CaseTag>, CaseTag) {
    let tags: Vec<CaseTag> = points
        .iter()
        .map(|e| {
            let d = &e.data;
            if d.f.abs() <= tol_case {
                CaseTag::TEqualsDt
            } else if g_dot(&d.g, &d.t, &d.t).sqrt() <= tol_case {
                CaseTag::TZero
            } else {
                CaseTag::Generic
            }
        })
        .collect();
    let aggregate = match tags.first() {
        None => CaseTag::Mixed,
        Some(&first) => {
            if tags.iter().all(|&t| t == first) {
                first
            } else {
                CaseTag::Mixed
            }
        }
    };
    (tags, aggregate)
}

struct RegionStats {
    max_h: f64,
    max_umb: f64,
    max_warp_rate: f64,
    /// Index of the point with the largest umbilicity defect.
    worst_umb_idx: usize,
}

fn region_stats(space: &AmbientSpace, pts: &[&PointExtraction]) -> RegionStats {
    let mut st = RegionStats { max_h: 0.0, max_umb: 0.0, max_warp_rate: 0.0, worst_umb_idx: 0 };
    for (i, e) in pts.iter().enumerate() {
        let d = &e.data;
        st.max_h = st.max_h.max(d.h.abs());
        let umb = g_op_norm(&d.g, &e.ginv, &d.aa);
        if umb > st.max_umb {
            st.max_umb = umb;
            st.worst_umb_idx = i;
        }
        if let AmbientSpace::Warped(w) = space {
            let a = w.warp().jet(e.pi_jet.value());
            st.max_warp_rate = st.max_warp_rate.max((a.deriv(1) / a.deriv(0)).abs());
        }
    }
    st
}

fn decide_region(
    space: &AmbientSpace,
    pts: &[&PointExtraction],
    tag: CaseTag,
    tols: &ClassifyTolerances,
) -> (Outcome, Option<(String, f64)>) {
    let st = region_stats(space, pts);
    let probe_theta = std::f64::consts::FRAC_PI_4;
    match space {
        AmbientSpace::Homogeneous(h) => {
            let tau = h.tau();
            match tag {
                CaseTag::TEqualsDt => {
                    // Vertical cylinder: a family exists iff tau = 0 and the
                    // base is a geodesic (H = 0).
                    if tau == 0.0 && st.max_h <= tols.class {
                        (Outcome::ExistsVerticalCylinderProduct, None)
                    } else {
                        let mag = st.max_h.max(tau.abs());
                        (Outcome::NotExists, Some(("relationHandtau".into(), mag)))
                    }
                }
                CaseTag::TZero => {
                    // Slice: with a passing suite this forces A = 0, tau = 0.
                    if tau == 0.0 {
                        (Outcome::ExistsTotallyUmbilical, None)
                    } else {
                        (Outcome::NotExists, Some(("eqforThomo".into(), tau.abs())))
                    }
                }
                _ => {
                    if tau != 0.0 {
                        (Outcome::NotExists, Some(("relationHandtau".into(), tau.abs())))
                    } else if st.max_h <= tols.class {
                        (Outcome::ExistsMinimalProduct, None)
                    } else if st.max_umb <= tols.class {
                        (Outcome::ExistsTotallyUmbilical, None)
                    } else {
                        // relationHandtau at the probe angle forces H = 0.
                        (Outcome::NotExists, Some(("relationHandtau".into(), st.max_h)))
                    }
                }
            }
        }
        AmbientSpace::Warped(w) => match tag {
            CaseTag::TEqualsDt => {
                if st.max_warp_rate <= tols.class && st.max_h <= tols.class {
                    (Outcome::ExistsVerticalCylinderProduct, None)
                } else if st.max_warp_rate > tols.class {
                    (Outcome::NotExists, Some(("warp_nonconstant".into(), st.max_warp_rate)))
                } else {
                    (Outcome::NotExists, Some(("cylinder_geodesic".into(), st.max_h)))
                }
            }
            CaseTag::TZero => (Outcome::ExistsTotallyUmbilical, None),
            _ => {
                if st.max_warp_rate <= tols.class && st.max_h <= tols.class {
                    (Outcome::ExistsMinimalProduct, None)
                } else if st.max_umb <= tols.class {
                    (Outcome::ExistsTotallyUmbilical, None)
                } else {
                    // Evaluate the derived obstructions at the least
                    // umbilical point and record the strongest violation.
                    let e = pts[st.worst_umb_idx];
                    let law = FamilyLaw::canonical();
                    let named = obstruction_warped(
                        &e.data,
                        w,
                        e.pi_jet.value(),
                        &law,
                        probe_theta,
                    );
                    let fallback = ("eqforH1".to_string(), st.max_h.max(st.max_warp_rate));
                    let pick = match named {
                        Ok(map) => ["eqforH1", "eqforH2", "eqF_2wp", "polynomial_d2"]
                            .iter()
                            .filter_map(|k| map.get(*k).map(|v| (k.to_string(), *v)))
                            .max_by(|a, b| a.1.total_cmp(&b.1))
                            .unwrap_or(fallback),
                        Err(_) => fallback,
                    };
                    (Outcome::NotExists, Some(pick))
                }
            }
        },
    }
}

/// Classifies the surface per the case theorems.
///
/// Preconditions: the structure-equation suite must pass at `tols.suite`,
/// and warped products that solve the space-form ODE short-circuit to
/// [`Outcome::SpaceFormExcluded`].
pub fn classify(imm: &Immersion, grid: &GridSpec, tols: &ClassifyTolerances) -> Result<Verdict> {
    let mut points = Vec::new();
    for ((u, v), res) in extract_grid(imm, grid) {
        match res {
            Ok(e) => points.push(e),
            Err(err) => {
                return Err(Error::CaseViolation(format!(
                    "extraction failed at ({u}, {v}): {err}"
                )));
            }
        }
    }
    // Precondition: the immersion satisfies its own structure equations.
    let mut worst: (f64, &str) = (0.0, "");
    for e in &points {
        let fp = FieldPoint::from_extraction(e);
        let rows = residual_rows(imm.space(), &fp);
        for (value, name) in rows.iter().zip(match imm.space() {
            AmbientSpace::Homogeneous(_) => crate::compat::HOMOGENEOUS_EQUATIONS.iter(),
            AmbientSpace::Warped(_) => crate::compat::WARPED_EQUATIONS.iter(),
        }) {
            if *value > worst.0 {
                worst = (*value, name);
            }
        }
    }
    if worst.0 > tols.suite {
        return Err(Error::CaseViolation(format!(
            "base residual suite fails: {} = {:.3e} > {:.1e}",
            worst.1, worst.0, tols.suite
        )));
    }

    let (tags, aggregate) = case_split(&points, tols.case);
    let st_all = region_stats(imm.space(), &points.iter().collect::<Vec<_>>());
    let max_warp_rate = match imm.space() {
        AmbientSpace::Warped(_) => Some(st_all.max_warp_rate),
        AmbientSpace::Homogeneous(_) => None,
    };
    let base = Verdict {
        kind: "verdict".to_string(),
        surface: imm.name().to_string(),
        space: imm.space().to_string(),
        outcome: Outcome::Undetermined,
        obstruction: None,
        obstruction_magnitude: None,
        case: aggregate,
        max_abs_h: st_all.max_h,
        max_umbilicity_defect: st_all.max_umb,
        max_warp_rate,
        subverdicts: Vec::new(),
    };

    // Space forms are excluded from the classification theorems.
    if let AmbientSpace::Warped(w) = imm.space() {
        if w.is_spaceform() {
            return Ok(Verdict { outcome: Outcome::SpaceFormExcluded, ..base });
        }
    }

    if aggregate == CaseTag::Mixed {
        // Decide each region separately; the case analysis does not mix.
        let mut subverdicts = Vec::new();
        for tag in [CaseTag::TEqualsDt, CaseTag::TZero, CaseTag::Generic] {
            let region: Vec<&PointExtraction> = points
                .iter()
                .zip(&tags)
                .filter(|(_, t)| **t == tag)
                .map(|(p, _)| p)
                .collect();
            if region.is_empty() {
                continue;
            }
            let (outcome, obstruction) = decide_region(imm.space(), &region, tag, tols);
            subverdicts.push(SubVerdict {
                case: tag,
                outcome,
                obstruction: obstruction.map(|(n, _)| n),
            });
        }
        return Ok(Verdict {
            outcome: Outcome::Undetermined,
            subverdicts,
            ..base
        });
    }

    let all: Vec<&PointExtraction> = points.iter().collect();
    let (outcome, obstruction) = decide_region(imm.space(), &all, aggregate, tols);
    let (obstruction, obstruction_magnitude) = match obstruction {
        Some((n, m)) => (Some(n), Some(m)),
        None => (None, None),
    };
    Ok(Verdict {
        outcome,
        obstruction,
        obstruction_magnitude,
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{WarpFn, WarpedProduct};
    use crate::jet::Jet2;
    use crate::surface::{ChartMap, Rect};
    use std::sync::Arc;

    fn imm_from(space: AmbientSpace, rect: Rect, map: ChartMap) -> Immersion {
        Immersion::new(space, rect, map).unwrap()
    }

    fn grid() -> GridSpec {
        GridSpec::new(9, 9, 0.05)
    }

    #[test]
    fn nil_vertical_plane_not_exists() {
        let sp = AmbientSpace::homogeneous(0.0, 0.5).unwrap();
        let map: ChartMap = Arc::new(|u, v| [u, Jet2::constant(0.0, u.deg()), v]);
        let imm = imm_from(sp, Rect::new(-1.0, 1.0, -1.0, 1.0), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TEqualsDt);
        assert_eq!(v.outcome, Outcome::NotExists);
        assert_eq!(v.obstruction.as_deref(), Some("relationHandtau"));
        assert!(v.obstruction_magnitude.unwrap() >= 0.5);
    }

    #[test]
    fn h2r_geodesic_cylinder_exists() {
        let sp = AmbientSpace::homogeneous(-1.0, 0.0).unwrap();
        let map: ChartMap = Arc::new(|u, v| [u, Jet2::constant(0.0, u.deg()), v]);
        let imm = imm_from(sp, Rect::new(-0.9, 0.9, -0.9, 0.9), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TEqualsDt);
        assert_eq!(v.outcome, Outcome::ExistsVerticalCylinderProduct);
    }

    #[test]
    fn h2r_circle_cylinder_not_exists() {
        // Non-geodesic base: H != 0.
        let sp = AmbientSpace::homogeneous(-1.0, 0.0).unwrap();
        let map: ChartMap = Arc::new(|u, v| {
            let cu = Jet2::lift(crate::jet::Elementary::Cos, &u).unwrap();
            let su = Jet2::lift(crate::jet::Elementary::Sin, &u).unwrap();
            [cu * 0.8, su * 0.8, v]
        });
        let imm = imm_from(sp, Rect::new(0.0, 6.0, -1.0, 1.0), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TEqualsDt);
        assert_eq!(v.outcome, Outcome::NotExists);
        assert!(v.max_abs_h > 0.1);
    }

    #[test]
    fn sphere_slice_totally_umbilical() {
        let sp = AmbientSpace::homogeneous(1.0, 0.0).unwrap();
        let map: ChartMap = Arc::new(|u, v| [u, v, Jet2::constant(0.0, u.deg())]);
        let imm = imm_from(sp, Rect::new(-0.7, 0.7, -0.7, 0.7), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TZero);
        assert_eq!(v.outcome, Outcome::ExistsTotallyUmbilical);
    }

    #[test]
    fn tilted_plane_product_not_exists() {
        let sp = AmbientSpace::homogeneous(-1.0, 0.0).unwrap();
        let map: ChartMap = Arc::new(|u, v| [u, v, u * 0.4]);
        let imm = imm_from(sp, Rect::new(-0.5, 0.5, -0.5, 0.5), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::Generic);
        assert_eq!(v.outcome, Outcome::NotExists);
        assert_eq!(v.obstruction.as_deref(), Some("relationHandtau"));
        assert!(v.max_abs_h > 1e-3);
        assert!(v.max_umbilicity_defect > 1e-3);
    }

    #[test]
    fn warped_slice_totally_umbilical_when_not_spaceform() {
        // (0.25, 0.75) x_{1 + t^2} R^2: the ODE residual 3 - 2 t^2 stays away
        // from zero on the interval.
        let w = WarpedProduct::new(1, 1, 0, 0, WarpFn::Poly(vec![1.0, 0.0, 1.0]), (0.25, 0.75))
            .unwrap();
        assert!(!w.is_spaceform());
        let sp = AmbientSpace::Warped(w);
        let map: ChartMap = Arc::new(|u, v| [Jet2::constant(0.5, u.deg()), u, v]);
        let imm = imm_from(sp, Rect::new(-0.6, 0.6, -0.6, 0.6), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TZero);
        assert_eq!(v.outcome, Outcome::ExistsTotallyUmbilical);
    }

    #[test]
    fn spaceform_excluded_before_classification() {
        // de Sitter: -R x_cosh S^2.
        let w = WarpedProduct::new(-1, 1, 1, 0, WarpFn::Cosh(1.0, 0.0), (-2.0, 2.0)).unwrap();
        let sp = AmbientSpace::Warped(w);
        let map: ChartMap = Arc::new(|u, v| [Jet2::constant(0.0, u.deg()), u, v]);
        let imm = imm_from(sp, Rect::new(-0.6, 0.6, -0.6, 0.6), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.outcome, Outcome::SpaceFormExcluded);
    }

    #[test]
    fn warped_cylinder_constant_warp_exists() {
        let w = WarpedProduct::new(1, 1, 0, 0, WarpFn::Const(1.0), (-2.0, 2.0)).unwrap();
        let sp = AmbientSpace::Warped(w);
        // Vertical cylinder over the geodesic y = 0 of the flat fiber.
        let map: ChartMap = Arc::new(|u, v| [v, u, Jet2::constant(0.0, u.deg())]);
        let imm = imm_from(sp, Rect::new(-1.0, 1.0, -1.0, 1.0), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TEqualsDt);
        assert_eq!(v.outcome, Outcome::ExistsVerticalCylinderProduct);
    }

    #[test]
    fn warped_cylinder_growing_warp_not_exists() {
        let w = WarpedProduct::new(1, 1, 1, 0, WarpFn::Poly(vec![2.0, 0.0, 1.0]), (-1.0, 1.0))
            .unwrap();
        assert!(!w.is_spaceform());
        let sp = AmbientSpace::Warped(w);
        let map: ChartMap = Arc::new(|u, v| [v, u, Jet2::constant(0.0, u.deg())]);
        let imm = imm_from(sp, Rect::new(-0.8, 0.8, -0.8, 0.8), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::TEqualsDt);
        assert_eq!(v.outcome, Outcome::NotExists);
        assert_eq!(v.obstruction.as_deref(), Some("warp_nonconstant"));
    }

    #[test]
    fn warped_generic_nonminimal_not_exists() {
        let w = WarpedProduct::new(1, 1, 1, 0, WarpFn::Poly(vec![2.0, 0.0, 1.0]), (-1.0, 1.0))
            .unwrap();
        let sp = AmbientSpace::Warped(w);
        let map: ChartMap = Arc::new(|u, v| [u * 0.3 + v * 0.1, u, v]);
        let imm = imm_from(sp, Rect::new(-0.6, 0.6, -0.6, 0.6), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::Generic);
        assert_eq!(v.outcome, Outcome::NotExists);
        assert!(v.obstruction.is_some());
        assert!(v.obstruction_magnitude.unwrap() > 1e-3);
    }

    #[test]
    fn euclidean_plane_graph_minimal_product() {
        // Flat plane graph in the product model: minimal, generic T.
        let w = WarpedProduct::new(1, 1, 0, 0, WarpFn::Const(1.0), (-3.0, 3.0)).unwrap();
        let sp = AmbientSpace::Warped(w);
        let map: ChartMap = Arc::new(|u, v| [u * 0.4, u, v]);
        let imm = imm_from(sp, Rect::new(-0.7, 0.7, -0.7, 0.7), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        assert_eq!(v.case, CaseTag::Generic);
        assert_eq!(v.outcome, Outcome::ExistsMinimalProduct);
    }

    #[test]
    fn verdict_serializes_with_spec_keys() {
        let sp = AmbientSpace::homogeneous(0.0, 0.5).unwrap();
        let map: ChartMap = Arc::new(|u, v| [u, Jet2::constant(0.0, u.deg()), v]);
        let imm = imm_from(sp, Rect::new(-1.0, 1.0, -1.0, 1.0), map);
        let v = classify(&imm, &grid(), &ClassifyTolerances::default()).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"outcome\":\"NotExists\""));
        assert!(json.contains("\"obstruction\":\"relationHandtau\""));
        assert!(json.contains("\"case\":\"T_equals_dt\""));
    }
}
