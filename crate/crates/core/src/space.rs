//! Region descriptors shared by maps, the verifier and the path oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ball::{self, BallPoint};
use crate::error::{Error, Result};
use crate::geometry::ComplexVector;
use crate::planar::{self, Normalization, PlanarDomain};
use crate::product::{self, ProductDomain, ProductNormalization};

/// A region of `C^n` on which maps are declared and metrics are measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", content = "of", rename_all = "snake_case")]
pub enum Space {
    /// All of `C^n`; carries no invariant metric.
    Whole(usize),
    Ball(usize),
    Polydisk(usize),
    Planar(PlanarDomain),
    Product(ProductDomain),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Whole(n) | Space::Ball(n) | Space::Polydisk(n) => *n,
            Space::Planar(_) => 1,
            Space::Product(p) => p.factors.len(),
        }
    }

    pub fn contains(&self, z: &ComplexVector) -> bool {
        z.dim() == self.dim() && z.is_finite() && self.margin(z) > 0.0
    }

    /// Positive inside, comparable to the distance from the boundary.
    pub fn margin(&self, z: &ComplexVector) -> f64 {
        match self {
            Space::Whole(_) => f64::INFINITY,
            Space::Ball(_) => 1.0 - z.norm(),
            Space::Polydisk(_) => z.0.iter().map(|w| 1.0 - w.norm()).fold(f64::INFINITY, f64::min),
            Space::Planar(d) => d.margin(z[0]),
            Space::Product(p) => p
                .factors
                .iter()
                .zip(&z.0)
                .map(|(d, w)| d.margin(*w))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn check(&self, z: &ComplexVector) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: z.dim(),
            });
        }
        if !self.contains(z) {
            return Err(Error::OutsideDomain(format!("{z} not in {self}")));
        }
        Ok(())
    }

    /// Kobayashi-Finsler norm of `v` at `p`.
    pub fn finsler(&self, p: &ComplexVector, v: &ComplexVector) -> Result<f64> {
        match self {
            Space::Whole(_) => Err(Error::InvalidDomain("C^n carries no Kobayashi metric".into())),
            Space::Ball(_) => Ok(ball::kob_norm_ball(&BallPoint::new(p.clone())?, v)?.value),
            Space::Polydisk(_) => Ok(product::finsler_polydisk_n(p, v)?.value),
            Space::Planar(d) => {
                self.check(p)?;
                Ok(planar::density(d, p[0])?.kob * v[0].norm())
            }
            Space::Product(dom) => {
                Ok(product::finsler_product(dom, p, v, ProductNormalization::Kobayashi)?.value)
            }
        }
    }

    /// Closed-form Kobayashi distance, when one is available.
    pub fn closed_form_distance(&self, z: &ComplexVector, w: &ComplexVector) -> Option<Result<f64>> {
        match self {
            Space::Whole(_) => None,
            Space::Ball(_) => Some(
                BallPoint::new(z.clone())
                    .and_then(|a| Ok((a, BallPoint::new(w.clone())?)))
                    .and_then(|(a, b)| ball::kob_dist_ball(&a, &b, Normalization::Kob)),
            ),
            Space::Polydisk(_) => Some(product::kob_dist_polydisk(z, w, Normalization::Kob)),
            Space::Planar(PlanarDomain::PuncturedDisk) => None,
            Space::Planar(d) => Some(planar::hyp_distance(d, z[0], w[0], Normalization::Kob)),
            Space::Product(p) => {
                if p.factors.iter().any(|d| !d.is_simply_connected()) {
                    None
                } else {
                    Some(product::kob_dist_product(p, z, w, Normalization::Kob))
                }
            }
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Whole(n) => write!(f, "C^{n}"),
            Space::Ball(n) => write!(f, "ball:{n}"),
            Space::Polydisk(n) => write!(f, "polydisk:{n}"),
            Space::Planar(d) => write!(f, "{d}"),
            Space::Product(p) => {
                let parts: Vec<String> = p.factors.iter().map(ToString::to_string).collect();
                write!(f, "product:{}", parts.join(","))
            }
        }
    }
}

/// `disk`, `halfplane`, `strip:A:B`, `punctured`, `ball:N`, `polydisk:N`, `product:D1,D2,...`.
impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let dim = |n: &str| -> Result<usize> {
            match n.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Error::InvalidDomain(format!("bad dimension in `{s}`"))),
            }
        };
        if let Some(n) = s.strip_prefix("ball:") {
            return Ok(Space::Ball(dim(n)?));
        }
        if let Some(n) = s.strip_prefix("polydisk:") {
            return Ok(Space::Polydisk(dim(n)?));
        }
        if let Some(rest) = s.strip_prefix("product:") {
            let factors = rest.split(',').map(str::parse).collect::<Result<Vec<PlanarDomain>>>()?;
            return Ok(Space::Product(ProductDomain::new(factors)?));
        }
        Ok(Space::Planar(s.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_display_round_trip() {
        for s in ["disk", "strip:-2:3", "strip:1:inf", "punctured", "ball:3", "polydisk:2", "product:strip:-1:1,halfplane"] {
            let space: Space = s.parse().unwrap();
            assert_eq!(space.to_string(), s);
        }
        for bad in ["ball:0", "ball:x", "product:", "cube", "strip:3:1"] {
            assert!(bad.parse::<Space>().is_err(), "{bad}");
        }
    }
}
