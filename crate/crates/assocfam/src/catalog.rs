//! Built-in parametrized surfaces exercising every case of the
//! classification, each with a documented expected verdict.
//!
//! Entry names and parameter schemas are part of the CLI contract; see
//! `docs/catalog.md`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ambient::AmbientSpace;
use crate::classify::{CaseTag, Outcome};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Elementary, Jet2};
use crate::surface::{ChartMap, Immersion, Rect};

/// Parameter schema of a catalog entry.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub description: &'static str,
}

/// Summary of one catalog surface.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub default_space: &'static str,
    pub params: Vec<ParamSpec>,
    pub expected_case: CaseTag,
    pub expected_verdict: Outcome,
}

/// The catalog, in a fixed order.
pub fn list_catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "slice-product",
            summary: "t0-slice of a product or warped product; totally umbilical",
            default_space: "E(1,0)",
            params: vec![ParamSpec {
                name: "t0",
                default: "0",
                description: "height of the slice",
            }],
            expected_case: CaseTag::TZero,
            expected_verdict: Outcome::ExistsTotallyUmbilical,
        },
        CatalogEntry {
            name: "vertical-cylinder",
            summary: "preimage of a base curve under the fibration of E(kappa, tau)",
            default_space: "E(-1,0)",
            params: vec![
                ParamSpec {
                    name: "base",
                    default: "geodesic",
                    description: "base curve: geodesic | circle",
                },
                ParamSpec {
                    name: "radius",
                    default: "0.7",
                    description: "circle radius in the conformal chart (base=circle)",
                },
            ],
            expected_case: CaseTag::TEqualsDt,
            expected_verdict: Outcome::ExistsVerticalCylinderProduct,
        },
        CatalogEntry {
            name: "warped-cylinder",
            summary: "curve x I in a warped product",
            default_space: "W(1,1,0,0,a=const[1],I=[-2,2])",
            params: vec![
                ParamSpec {
                    name: "base",
                    default: "geodesic",
                    description: "base curve: geodesic | circle",
                },
                ParamSpec {
                    name: "radius",
                    default: "0.7",
                    description: "circle radius in the fiber chart (base=circle)",
                },
            ],
            expected_case: CaseTag::TEqualsDt,
            expected_verdict: Outcome::ExistsVerticalCylinderProduct,
        },
        CatalogEntry {
            name: "helicoid-product",
            summary: "helicoidal minimal surface in S^2 x R or H^2 x R, ruled by \
                      horizontal geodesics through a vertical axis",
            default_space: "E(-1,0)",
            params: vec![
                ParamSpec { name: "pitch", default: "1", description: "vertical speed" },
                ParamSpec { name: "omega", default: "1", description: "angular speed" },
            ],
            expected_case: CaseTag::Generic,
            expected_verdict: Outcome::ExistsMinimalProduct,
        },
        CatalogEntry {
            name: "nil3-vertical-plane",
            summary: "vertical plane over a geodesic in the Heisenberg group; minimal \
                      with tau != 0",
            default_space: "E(0,0.5)",
            params: vec![ParamSpec {
                name: "tau",
                default: "0.5",
                description: "bundle curvature (nonzero)",
            }],
            expected_case: CaseTag::TEqualsDt,
            expected_verdict: Outcome::NotExists,
        },
        CatalogEntry {
            name: "tilted-plane-product",
            summary: "non-minimal, non-umbilical graph t = m x in H^2 x R",
            default_space: "E(-1,0)",
            params: vec![ParamSpec {
                name: "slope",
                default: "0.4",
                description: "tilt of the graph",
            }],
            expected_case: CaseTag::Generic,
            expected_verdict: Outcome::NotExists,
        },
        CatalogEntry {
            name: "graph",
            summary: "user-supplied graph t = phi(u, v) over a fiber chart",
            default_space: "E(1,0)",
            params: vec![ParamSpec {
                name: "phi",
                default: "0",
                description: "height expression in u and v",
            }],
            expected_case: CaseTag::TZero,
            expected_verdict: Outcome::ExistsTotallyUmbilical,
        },
    ]
}

struct Params<'a> {
    entry: &'static str,
    map: &'a BTreeMap<String, String>,
}

impl<'a> Params<'a> {
    fn new(entry: &'static str, map: &'a BTreeMap<String, String>, mut allowed: Vec<&'static str>) -> Result<Self> {
        allowed.extend_from_slice(&["space", "u_min", "u_max", "v_min", "v_max"]);
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::ParamOutOfRange(format!(
                    "unknown parameter {key:?} for catalog entry {entry:?}"
                )));
            }
        }
        Ok(Params { entry, map })
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.map.get(key) {
            None => Ok(default),
            Some(s) => s.parse::<f64>().map_err(|_| {
                Error::ParamOutOfRange(format!(
                    "{}: parameter {key}={s:?} is not a number",
                    self.entry
                ))
            }),
        }
    }

    fn str(&self, key: &str, default: &str) -> String {
        self.map.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    fn space(&self, default: &str) -> Result<AmbientSpace> {
        AmbientSpace::parse(&self.str("space", default))
    }

    fn domain(&self, default: Rect) -> Result<Rect> {
        Ok(Rect::new(
            self.f64("u_min", default.u.0)?,
            self.f64("u_max", default.u.1)?,
            self.f64("v_min", default.v.0)?,
            self.f64("v_max", default.v.1)?,
        ))
    }
}

/// Radial coordinate of the unit-speed geodesic through the origin of the
/// conformal chart of curvature `c`.
fn geodesic_radius(c: f64, u: Jet2) -> Result<Jet2> {
    if c == 0.0 {
        return Ok(u);
    }
    let s = c.abs().sqrt();
    let half = u * (s / 2.0);
    if c > 0.0 {
        // 2/s tan(s u / 2)
        let sin = Jet2::lift(Elementary::Sin, &half)?;
        let cos = Jet2::lift(Elementary::Cos, &half)?;
        Ok(sin * cos.recip()? * (2.0 / s))
    } else {
        // 2/s tanh(s u / 2)
        let sinh = Jet2::lift(Elementary::Sinh, &half)?;
        let cosh = Jet2::lift(Elementary::Cosh, &half)?;
        Ok(sinh * cosh.recip()? * (2.0 / s))
    }
}

fn require_homogeneous(entry: &str, space: &AmbientSpace) -> Result<(f64, f64)> {
    match space {
        AmbientSpace::Homogeneous(h) => Ok((h.kappa(), h.tau())),
        AmbientSpace::Warped(_) => Err(Error::ParamOutOfRange(format!(
            "{entry} requires a homogeneous space E(kappa, tau)"
        ))),
    }
}

fn fiber_curvature(entry: &str, space: &AmbientSpace) -> Result<f64> {
    match space {
        AmbientSpace::Warped(w) => Ok(w.curvature()),
        AmbientSpace::Homogeneous(_) => Err(Error::ParamOutOfRange(format!(
            "{entry} requires a warped product space"
        ))),
    }
}

/// Builds a catalog surface. Parameters outside the documented ranges and
/// unknown keys are rejected.
pub fn make_surface(name: &str, params: &BTreeMap<String, String>) -> Result<Immersion> {
    match name {
        "slice-product" => {
            let p = Params::new("slice-product", params, vec!["t0"])?;
            let space = p.space("E(1,0)")?;
            let t0 = p.f64("t0", 0.0)?;
            let vt = space.vertical_index();
            let rect = p.domain(Rect::new(-0.7, 0.7, -0.7, 0.7))?;
            let map: ChartMap = Arc::new(move |u, v| {
                let c = Jet2::constant(t0, u.deg());
                if vt == 2 {
                    [u, v, c]
                } else {
                    [c, u, v]
                }
            });
            Immersion::new(space, rect, map).map(|i| i.with_name("slice-product"))
        }
        "vertical-cylinder" => {
            let p = Params::new("vertical-cylinder", params, vec!["base", "radius"])?;
            let space = p.space("E(-1,0)")?;
            require_homogeneous("vertical-cylinder", &space)?;
            let base = p.str("base", "geodesic");
            match base.as_str() {
                "geodesic" => {
                    let rect = p.domain(Rect::new(-1.2, 1.2, -1.0, 1.0))?;
                    let map: ChartMap =
                        Arc::new(|u, v| [u, Jet2::constant(0.0, u.deg()), v]);
                    Immersion::new(space, rect, map).map(|i| i.with_name("vertical-cylinder"))
                }
                "circle" => {
                    let r = p.f64("radius", 0.7)?;
                    if !(r > 0.0 && r < 1.9) {
                        return Err(Error::ParamOutOfRange(format!(
                            "vertical-cylinder: radius {r} outside (0, 1.9)"
                        )));
                    }
                    let rect = p.domain(Rect::new(0.0, std::f64::consts::TAU, -1.0, 1.0))?;
                    let map: ChartMap = Arc::new(move |u, v| {
                        let cu = Jet2::lift(Elementary::Cos, &u).unwrap();
                        let su = Jet2::lift(Elementary::Sin, &u).unwrap();
                        [cu * r, su * r, v]
                    });
                    Immersion::new(space, rect, map).map(|i| i.with_name("vertical-cylinder"))
                }
                other => Err(Error::ParamOutOfRange(format!(
                    "vertical-cylinder: base {other:?} is not geodesic | circle"
                ))),
            }
        }
        "warped-cylinder" => {
            let p = Params::new("warped-cylinder", params, vec!["base", "radius"])?;
            let space = p.space("W(1,1,0,0,a=const[1],I=[-2,2])")?;
            fiber_curvature("warped-cylinder", &space)?;
            let ival = match &space {
                AmbientSpace::Warped(w) => w.interval(),
                _ => unreachable!(),
            };
            let vspan = ival.1 - ival.0;
            let vrect = (ival.0 + 0.1 * vspan, ival.1 - 0.1 * vspan);
            let base = p.str("base", "geodesic");
            match base.as_str() {
                "geodesic" => {
                    let rect = p.domain(Rect::new(-1.0, 1.0, vrect.0, vrect.1))?;
                    let map: ChartMap =
                        Arc::new(|u, v| [v, u, Jet2::constant(0.0, u.deg())]);
                    Immersion::new(space, rect, map).map(|i| i.with_name("warped-cylinder"))
                }
                "circle" => {
                    let r = p.f64("radius", 0.7)?;
                    if !(r > 0.0 && r < 1.9) {
                        return Err(Error::ParamOutOfRange(format!(
                            "warped-cylinder: radius {r} outside (0, 1.9)"
                        )));
                    }
                    let rect =
                        p.domain(Rect::new(0.0, std::f64::consts::TAU, vrect.0, vrect.1))?;
                    let map: ChartMap = Arc::new(move |u, v| {
                        let cu = Jet2::lift(Elementary::Cos, &u).unwrap();
                        let su = Jet2::lift(Elementary::Sin, &u).unwrap();
                        [v, cu * r, su * r]
                    });
                    Immersion::new(space, rect, map).map(|i| i.with_name("warped-cylinder"))
                }
                other => Err(Error::ParamOutOfRange(format!(
                    "warped-cylinder: base {other:?} is not geodesic | circle"
                ))),
            }
        }
        "helicoid-product" => {
            let p = Params::new("helicoid-product", params, vec!["pitch", "omega"])?;
            let space = p.space("E(-1,0)")?;
            let (kappa, tau) = require_homogeneous("helicoid-product", &space)?;
            if tau != 0.0 {
                return Err(Error::ParamOutOfRange(
                    "helicoid-product requires a product space E(kappa, 0)".into(),
                ));
            }
            let pitch = p.f64("pitch", 1.0)?;
            let omega = p.f64("omega", 1.0)?;
            if pitch == 0.0 || pitch.abs() > 4.0 || omega == 0.0 || omega.abs() > 4.0 {
                return Err(Error::ParamOutOfRange(
                    "helicoid-product: pitch and omega must be nonzero with magnitude <= 4"
                        .into(),
                ));
            }
            let rect = p.domain(Rect::new(0.1, 1.1, 0.0, 1.0))?;
            let map: ChartMap = Arc::new(move |u, v| {
                let r = geodesic_radius(kappa, u).unwrap();
                let phase = v * omega;
                let c = Jet2::lift(Elementary::Cos, &phase).unwrap();
                let s = Jet2::lift(Elementary::Sin, &phase).unwrap();
                [r * c, r * s, v * pitch]
            });
            Immersion::new(space, rect, map).map(|i| i.with_name("helicoid-product"))
        }
        "nil3-vertical-plane" => {
            let p = Params::new("nil3-vertical-plane", params, vec!["tau"])?;
            // The space must be a Heisenberg group E(0, tau): either give tau
            // directly or a space descriptor with kappa = 0.
            let space = match p.map.get("space") {
                None => {
                    let tau = p.f64("tau", 0.5)?;
                    if tau == 0.0 || tau.abs() > 4.0 {
                        return Err(Error::ParamOutOfRange(
                            "nil3-vertical-plane: tau must be nonzero with |tau| <= 4".into(),
                        ));
                    }
                    AmbientSpace::homogeneous(0.0, tau)?
                }
                Some(s) => {
                    if p.map.contains_key("tau") {
                        return Err(Error::ParamOutOfRange(
                            "nil3-vertical-plane: give either space or tau, not both".into(),
                        ));
                    }
                    let space = AmbientSpace::parse(s)?;
                    match &space {
                        AmbientSpace::Homogeneous(h) if h.kappa() == 0.0 && h.tau() != 0.0 => {}
                        _ => {
                            return Err(Error::ParamOutOfRange(format!(
                                "nil3-vertical-plane requires a Heisenberg space E(0, tau != 0), got {s}"
                            )));
                        }
                    }
                    space
                }
            };
            let rect = p.domain(Rect::new(-1.0, 1.0, -1.0, 1.0))?;
            let map: ChartMap = Arc::new(|u, v| [u, Jet2::constant(0.0, u.deg()), v]);
            Immersion::new(space, rect, map).map(|i| i.with_name("nil3-vertical-plane"))
        }
        "tilted-plane-product" => {
            let p = Params::new("tilted-plane-product", params, vec!["slope"])?;
            let space = p.space("E(-1,0)")?;
            let (_, tau) = require_homogeneous("tilted-plane-product", &space)?;
            if tau != 0.0 {
                return Err(Error::ParamOutOfRange(
                    "tilted-plane-product requires a product space E(kappa, 0)".into(),
                ));
            }
            let m = p.f64("slope", 0.4)?;
            if !(m.abs() >= 1e-3 && m.abs() <= 2.0) {
                return Err(Error::ParamOutOfRange(format!(
                    "tilted-plane-product: slope {m} outside [1e-3, 2]"
                )));
            }
            let rect = p.domain(Rect::new(-0.5, 0.5, -0.5, 0.5))?;
            let map: ChartMap = Arc::new(move |u, v| [u, v, u * m]);
            Immersion::new(space, rect, map).map(|i| i.with_name("tilted-plane-product"))
        }
        "graph" => {
            let p = Params::new("graph", params, vec!["phi"])?;
            let space = p.space("E(1,0)")?;
            let phi = Expr::parse(&p.str("phi", "0"), &["u", "v"])?;
            let vt = space.vertical_index();
            let rect = p.domain(Rect::new(-0.5, 0.5, -0.5, 0.5))?;
            let map: ChartMap = Arc::new(move |u, v| {
                let h = phi.eval(&[u, v]);
                if vt == 2 {
                    [u, v, h]
                } else {
                    [h, u, v]
                }
            });
            Immersion::new(space, rect, map).map(|i| i.with_name("graph"))
        }
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

/// Convenience: build an entry with `space` and `param` overrides coming from
/// flat CLI-style key=value pairs.
pub fn make_surface_with(
    name: &str,
    space: Option<&str>,
    kv: &[(String, String)],
) -> Result<Immersion> {
    let mut params = BTreeMap::new();
    for (k, v) in kv {
        params.insert(k.clone(), v.clone());
    }
    if let Some(s) = space {
        params.insert("space".to_string(), s.to_string());
    }
    make_surface(name, &params)
}
