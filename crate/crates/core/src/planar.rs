//! Hyperbolic densities, pseudo-hyperbolic and hyperbolic distances, and
//! conformal charts for the planar model domains.
//!
//! Densities are stored in the curvature `-1` normalization (`hyp`, equal
//! to `2/(1-|z|^2)` on the disk). The Kobayashi normalization is exactly
//! half of it and is what the Finsler and distance routines report when
//! asked for [`Normalization::Kob`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexVector, C64};
use crate::maps::{Expr, HoloMap};
use crate::space::Space;

/// Which of the two standard normalizations a density or distance uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Curvature `-1`: `2/(1-|z|^2)` on the disk.
    Hyp,
    /// Kobayashi: half of `Hyp`, unit speed for the extremal disk at the origin.
    Kob,
}

impl Normalization {
    /// Factor converting a Kobayashi-normalized quantity into this one.
    pub fn from_kob(self) -> f64 {
        match self {
            Normalization::Hyp => 2.0,
            Normalization::Kob => 1.0,
        }
    }
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyp" => Ok(Normalization::Hyp),
            "kob" => Ok(Normalization::Kob),
            other => Err(Error::InvalidDomain(format!("unknown normalization `{other}`"))),
        }
    }
}

/// Model planar domains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanarDomain {
    Disk,
    /// `Re z > 0`.
    HalfPlane,
    /// `a < Re z < b`; `b = None` means `b = +inf`.
    Strip { a: f64, b: Option<f64> },
    /// `0 < |z| < 1`.
    PuncturedDisk,
}

impl PlanarDomain {
    pub fn strip(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || b.is_nan() || a >= b {
            return Err(Error::InvalidDomain(format!("strip requires a < b, got ({a}, {b})")));
        }
        Ok(PlanarDomain::Strip {
            a,
            b: b.is_finite().then_some(b),
        })
    }

    /// The standard strip `|Re w| < 1`.
    pub fn strip0() -> Self {
        PlanarDomain::Strip { a: -1.0, b: Some(1.0) }
    }

    pub fn is_simply_connected(&self) -> bool {
        !matches!(self, PlanarDomain::PuncturedDisk)
    }

    /// Positive exactly on the domain.
    pub fn margin(&self, z: Complex64) -> f64 {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return f64::NEG_INFINITY;
        }
        match *self {
            PlanarDomain::Disk => 1.0 - z.norm(),
            PlanarDomain::HalfPlane => z.re,
            PlanarDomain::Strip { a, b: Some(b) } => (z.re - a).min(b - z.re),
            PlanarDomain::Strip { a, b: None } => z.re - a,
            PlanarDomain::PuncturedDisk => {
                let r = z.norm();
                r.min(1.0 - r)
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.margin(z) > 0.0
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!(
                "{} not in {self}",
                crate::geometry::format_complex(z)
            )))
        }
    }

    fn require_simply_connected(&self) -> Result<()> {
        if self.is_simply_connected() {
            Ok(())
        } else {
            Err(Error::NotSimplyConnected(self.to_string()))
        }
    }
}

impl fmt::Display for PlanarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanarDomain::Disk => write!(f, "disk"),
            PlanarDomain::HalfPlane => write!(f, "halfplane"),
            PlanarDomain::Strip { a, b: Some(b) } => write!(f, "strip:{a}:{b}"),
            PlanarDomain::Strip { a, b: None } => write!(f, "strip:{a}:inf"),
            PlanarDomain::PuncturedDisk => write!(f, "punctured"),
        }
    }
}

impl FromStr for PlanarDomain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDomain(format!("cannot parse planar domain `{s}`"));
        match s {
            "disk" => Ok(PlanarDomain::Disk),
            "halfplane" => Ok(PlanarDomain::HalfPlane),
            "punctured" => Ok(PlanarDomain::PuncturedDisk),
            _ => {
                let rest = s.strip_prefix("strip:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                let b: f64 = match b.trim() {
                    "inf" | "+inf" | "infinity" => f64::INFINITY,
                    other => other.parse().map_err(|_| bad())?,
                };
                PlanarDomain::strip(a, b)
            }
        }
    }
}

/// Density at a point in both normalizations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub at: Complex64,
    pub hyp: f64,
    pub kob: f64,
}

impl DensityValue {
    fn from_hyp(at: Complex64, hyp: f64) -> Self {
        Self { at, hyp, kob: hyp / 2.0 }
    }

    pub fn get(&self, norm: Normalization) -> f64 {
        match norm {
            Normalization::Hyp => self.hyp,
            Normalization::Kob => self.kob,
        }
    }
}

/// Hyperbolic density of `dom` at `z`.
pub fn density(dom: &PlanarDomain, z: Complex64) -> Result<DensityValue> {
    dom.check(z)?;
    let hyp = match *dom {
        PlanarDomain::Disk => 2.0 / (1.0 - z.norm_sqr()),
        PlanarDomain::HalfPlane => 1.0 / z.re,
        PlanarDomain::Strip { a, b: Some(b) } => {
            // affine reduction to |Re w| < 1
            let scale = 2.0 / (b - a);
            let u = (2.0 * z.re - a - b) / (b - a);
            scale * FRAC_PI_2 / (FRAC_PI_2 * u).cos()
        }
        PlanarDomain::Strip { a, b: None } => 1.0 / (z.re - a),
        PlanarDomain::PuncturedDisk => {
            let r = z.norm();
            -1.0 / (r * r.ln())
        }
    };
    Ok(DensityValue::from_hyp(z, hyp))
}

/// `(delta, 1 - delta^2)` on the disk, the second without cancellation.
fn disk_pseudo(z1: Complex64, z2: Complex64) -> (f64, f64) {
    let den = (C64::new(1.0, 0.0) - z1.conj() * z2).norm();
    let gap = |z: Complex64| (1.0 - z.norm()) * (1.0 + z.norm());
    let delta = (z2 - z1).norm() / den;
    (delta, gap(z1) * gap(z2) / (den * den))
}

/// Same on the right half-plane, with `delta = |(z2 - z1) / (z2 + conj(z1))|`.
fn half_plane_pseudo(z1: Complex64, z2: Complex64) -> (f64, f64) {
    let den = (z2 + z1.conj()).norm();
    ((z2 - z1).norm() / den, 4.0 * z1.re * z2.re / (den * den))
}

fn pseudo_parts(dom: &PlanarDomain, z1: Complex64, z2: Complex64) -> Result<(f64, f64)> {
    dom.require_simply_connected()?;
    dom.check(z1)?;
    dom.check(z2)?;
    if z1 == z2 {
        return Ok((0.0, 1.0));
    }
    Ok(match *dom {
        PlanarDomain::Disk => disk_pseudo(z1, z2),
        PlanarDomain::HalfPlane => half_plane_pseudo(z1, z2),
        PlanarDomain::Strip { a, b: None } => {
            let shift = C64::new(a, 0.0);
            half_plane_pseudo(z1 - shift, z2 - shift)
        }
        PlanarDomain::Strip { .. } => {
            let chart = chart_to_disk(dom)?;
            let w1 = chart.eval(&ComplexVector::scalar(z1))?[0];
            let w2 = chart.eval(&ComplexVector::scalar(z2))?[0];
            disk_pseudo(w1, w2)
        }
        PlanarDomain::PuncturedDisk => unreachable!("rejected above"),
    })
}

/// Pseudo-hyperbolic distance on a simply connected model domain.
pub fn pseudo_hyperbolic(dom: &PlanarDomain, z1: Complex64, z2: Complex64) -> Result<f64> {
    Ok(pseudo_parts(dom, z1, z2)?.0.min(1.0 - f64::EPSILON))
}

/// `artanh delta` given `delta` and an accurate `1 - delta^2`.
pub(crate) fn artanh_from_parts(delta: f64, one_minus_sq: f64) -> f64 {
    if delta < 0.5 {
        return delta.atanh();
    }
    // artanh d = ln((1 + d) / sqrt(1 - d^2))
    ((1.0 + delta) / one_minus_sq.sqrt()).ln()
}

/// Hyperbolic distance from the pseudo-hyperbolic one:
/// `ln((1+d)/(1-d))` for `Hyp`, `artanh d` for `Kob`.
pub fn hyp_distance(dom: &PlanarDomain, z1: Complex64, z2: Complex64, norm: Normalization) -> Result<f64> {
    let (delta, rest) = pseudo_parts(dom, z1, z2)?;
    Ok(norm.from_kob() * artanh_from_parts(delta, rest))
}

fn scalar_map(expr: Expr, source: PlanarDomain, target: PlanarDomain) -> HoloMap {
    HoloMap::new(expr, Space::Planar(source), Space::Planar(target))
}

/// Affine map `w -> (2w - a - b)/(b - a)` taking `S(a,b)` onto `S(-1,1)`.
fn strip_normalizer(a: f64, b: f64) -> Expr {
    let s = 2.0 / (b - a);
    Expr::scalar_affine(C64::new(s, 0.0), C64::new(-(a + b) / (b - a), 0.0))
}

/// Conformal bijection of a simply connected model domain onto the disk.
pub fn chart_to_disk(dom: &PlanarDomain) -> Result<HoloMap> {
    dom.require_simply_connected()?;
    let expr = match *dom {
        PlanarDomain::Disk => Expr::Identity { dim: 1 },
        PlanarDomain::HalfPlane => Expr::CayleyInverse,
        PlanarDomain::Strip { a, b: None } => Expr::CayleyInverse.after(Expr::scalar_affine(
            C64::new(1.0, 0.0),
            C64::new(-a, 0.0),
        )),
        PlanarDomain::Strip { a, b: Some(b) } => {
            // tan(pi w / 4) takes |Re w| < 1 onto the disk
            Expr::Tan
                .after(Expr::scalar_affine(C64::new(FRAC_PI_4, 0.0), C64::new(0.0, 0.0)))
                .after(strip_normalizer(a, b))
        }
        PlanarDomain::PuncturedDisk => unreachable!("rejected above"),
    };
    Ok(scalar_map(expr, *dom, PlanarDomain::Disk))
}

/// Inverse of [`chart_to_disk`]: a conformal bijection of the disk onto `dom`.
pub fn chart_from_disk(dom: &PlanarDomain) -> Result<HoloMap> {
    dom.require_simply_connected()?;
    let expr = match *dom {
        PlanarDomain::Disk => Expr::Identity { dim: 1 },
        PlanarDomain::HalfPlane => Expr::Cayley,
        PlanarDomain::Strip { a, b: None } => {
            Expr::scalar_affine(C64::new(1.0, 0.0), C64::new(a, 0.0)).after(Expr::Cayley)
        }
        PlanarDomain::Strip { a, b: Some(b) } => {
            // (4/pi) arctan takes the disk onto |Re w| < 1, then rescale
            let half = (b - a) / 2.0;
            Expr::scalar_affine(C64::new(half, 0.0), C64::new((a + b) / 2.0, 0.0))
                .after(Expr::scalar_affine(C64::new(4.0 / PI, 0.0), C64::new(0.0, 0.0)))
                .after(Expr::Arctan)
        }
        PlanarDomain::PuncturedDisk => unreachable!("rejected above"),
    };
    Ok(scalar_map(expr, PlanarDomain::Disk, *dom))
}

/// `2/(1-|z|^2) - Hyp_G(F(z)) |F'(z)|` for a holomorphic `F` from the disk into `dom`.
///
/// Nonnegative for every such `F`; zero for conformal charts and coverings.
pub fn ahlfors_schwarz_slack(f: &HoloMap, dom: &PlanarDomain, z: Complex64) -> Result<f64> {
    PlanarDomain::Disk.check(z)?;
    let (value, jac) = f.eval_jacobian(&ComplexVector::scalar(z))?;
    let rho = density(dom, value[0])?.hyp;
    Ok(2.0 / (1.0 - z.norm_sqr()) - rho * jac[(0, 0)].norm())
}

/// `Hyp_{S_0}(x) - (pi/2)/(1-x^2)`, nonnegative on `(-1, 1)`.
pub fn strip_lower_bound_slack(x: f64) -> Result<f64> {
    let rho = density(&PlanarDomain::strip0(), C64::new(x, 0.0))?.hyp;
    Ok(rho - FRAC_PI_2 / (1.0 - x * x))
}
