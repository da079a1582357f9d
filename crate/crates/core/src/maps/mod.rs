//! Holomorphic maps as composition trees of primitive blocks, evaluated
//! together with their exact complex Jacobians.
//!
//! Every block knows its own derivative; [`Expr::Compose`] applies the chain
//! rule and [`Expr::Tuple`] stacks rows, so the Jacobian of any tree is
//! exact up to floating-point rounding. Trees serialize to JSON as
//! `{"block": name, ...parameters, ...children}`.

mod family;
mod harmonic;
mod quasi;

pub use family::{
    random_point, random_unit, sample_family, sample_member, sample_rng, sharp_growth, FamilyKind, FamilyMember, MemberMap,
    MemberRole,
};
pub use harmonic::{HarmonicMap, HarmonicPart};
pub use quasi::{halton, quasi_points};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CMatrix, ComplexVector, C64};
use crate::space::Space;

/// A node of a holomorphic composition tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "block", rename_all = "snake_case")]
pub enum Expr {
    Identity { dim: usize },
    Constant { dim_in: usize, value: Vec<Complex64> },
    /// `z -> A z + b`, with `A` given row by row.
    Affine { matrix: Vec<Vec<Complex64>>, offset: Vec<Complex64> },
    /// `z -> z_index`.
    Project { index: usize },
    /// `z -> e^{i rotation} (z - center) / (1 - conj(center) z)`.
    DiskMobius { center: Complex64, rotation: f64 },
    /// The involution `phi_a` of the unit ball.
    BallMobius { center: Vec<Complex64> },
    /// `e^{i rotation} prod_k (z - a_k)/(1 - conj(a_k) z)`.
    Blaschke { zeros: Vec<Complex64>, rotation: f64 },
    Tan,
    Arctan,
    Exp,
    /// Principal branch; the non-positive real axis is rejected.
    Log,
    Power { k: u32 },
    /// `(1 + z)/(1 - z)`: disk onto the right half-plane.
    Cayley,
    /// `(w - 1)/(w + 1)`: right half-plane onto the disk.
    CayleyInverse,
    /// `z -> <z, c> = sum z_k conj(c_k)`.
    InnerWith { c: Vec<Complex64> },
    Tuple { parts: Vec<Expr> },
    Compose { outer: Box<Expr>, inner: Box<Expr> },
    /// Pointwise product of scalar maps.
    Mul { factors: Vec<Expr> },
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn scalar_input(z: &ComplexVector) -> Result<C64> {
    if z.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: z.dim(),
        });
    }
    Ok(z[0])
}

fn finite(w: C64, what: &str) -> Result<C64> {
    if w.re.is_finite() && w.im.is_finite() {
        Ok(w)
    } else {
        Err(Error::Singular(what.to_string()))
    }
}

fn scalar_out(value: C64, deriv: C64) -> (ComplexVector, CMatrix) {
    (ComplexVector::scalar(value), CMatrix::from_element(1, 1, deriv))
}

impl Expr {
    /// `self o inner`.
    pub fn after(self, inner: Expr) -> Expr {
        Expr::Compose {
            outer: Box::new(self),
            inner: Box::new(inner),
        }
    }

    /// `w -> scale * w + shift` on `C`.
    pub fn scalar_affine(scale: C64, shift: C64) -> Expr {
        Expr::Affine {
            matrix: vec![vec![scale]],
            offset: vec![shift],
        }
    }

    /// Linear map `z -> A z` from a row-major matrix.
    pub fn linear(matrix: &CMatrix) -> Expr {
        Expr::Affine {
            matrix: (0..matrix.nrows()).map(|r| matrix.row(r).iter().copied().collect()).collect(),
            offset: vec![C64::new(0.0, 0.0); matrix.nrows()],
        }
    }

    /// The map `(4/pi) arctan`, taking the disk onto `|Re w| < 1`.
    pub fn strip_from_disk() -> Expr {
        Expr::scalar_affine(C64::new(4.0 / std::f64::consts::PI, 0.0), C64::new(0.0, 0.0)).after(Expr::Arctan)
    }

    /// Block name used in serialized trees.
    pub fn block_name(&self) -> &'static str {
        match self {
            Expr::Identity { .. } => "identity",
            Expr::Constant { .. } => "constant",
            Expr::Affine { .. } => "affine",
            Expr::Project { .. } => "project",
            Expr::DiskMobius { .. } => "disk_mobius",
            Expr::BallMobius { .. } => "ball_mobius",
            Expr::Blaschke { .. } => "blaschke",
            Expr::Tan => "tan",
            Expr::Arctan => "arctan",
            Expr::Exp => "exp",
            Expr::Log => "log",
            Expr::Power { .. } => "power",
            Expr::Cayley => "cayley",
            Expr::CayleyInverse => "cayley_inverse",
            Expr::InnerWith { .. } => "inner_with",
            Expr::Tuple { .. } => "tuple",
            Expr::Compose { .. } => "compose",
            Expr::Mul { .. } => "mul",
        }
    }

    /// Value and exact Jacobian at `z`.
    pub fn eval_jacobian(&self, z: &ComplexVector) -> Result<(ComplexVector, CMatrix)> {
        let n = z.dim();
        match self {
            Expr::Identity { dim } => {
                if *dim != n {
                    return Err(Error::DimensionMismatch { expected: *dim, got: n });
                }
                Ok((z.clone(), CMatrix::identity(n, n)))
            }
            Expr::Constant { dim_in, value } => {
                if *dim_in != n {
                    return Err(Error::DimensionMismatch { expected: *dim_in, got: n });
                }
                Ok((ComplexVector(value.clone()), CMatrix::zeros(value.len(), n)))
            }
            Expr::Affine { matrix, offset } => {
                let rows = matrix.len();
                if offset.len() != rows {
                    return Err(Error::DimensionMismatch { expected: rows, got: offset.len() });
                }
                if let Some(bad) = matrix.iter().find(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch { expected: bad.len(), got: n });
                }
                let a = CMatrix::from_fn(rows, n, |r, c| matrix[r][c]);
                let value = &(&a * z) + &ComplexVector(offset.clone());
                Ok((value, a))
            }
            Expr::Project { index } => {
                if *index >= n {
                    return Err(Error::DimensionMismatch { expected: index + 1, got: n });
                }
                let mut j = CMatrix::zeros(1, n);
                j[(0, *index)] = one();
                Ok((ComplexVector::scalar(z[*index]), j))
            }
            Expr::DiskMobius { center, rotation } => {
                let w = scalar_input(z)?;
                let rot = C64::from_polar(1.0, *rotation);
                let den = one() - center.conj() * w;
                let value = finite(rot * (w - center) / den, "disk mobius pole")?;
                let deriv = rot * (1.0 - center.norm_sqr()) / (den * den);
                Ok(scalar_out(value, deriv))
            }
            Expr::BallMobius { center } => {
                let a = crate::ball::BallPoint::new(ComplexVector(center.clone()))?;
                let value = crate::ball::mobius_apply(&a, z)?;
                let jac = crate::ball::mobius_derivative(&a, z)?;
                Ok((value, jac))
            }
            Expr::Blaschke { zeros, rotation } => {
                let w = scalar_input(z)?;
                let mut value = C64::from_polar(1.0, *rotation);
                let mut deriv = C64::new(0.0, 0.0);
                for a in zeros {
                    let den = one() - a.conj() * w;
                    let t = (w - a) / den;
                    let dt = (1.0 - a.norm_sqr()) / (den * den);
                    deriv = deriv * t + value * dt;
                    value *= t;
                }
                Ok(scalar_out(finite(value, "blaschke pole")?, deriv))
            }
            Expr::Tan => {
                let w = scalar_input(z)?;
                let t = finite(w.tan(), "tan pole")?;
                Ok(scalar_out(t, one() + t * t))
            }
            Expr::Arctan => {
                let w = scalar_input(z)?;
                let den = one() + w * w;
                if den.norm() == 0.0 {
                    return Err(Error::Singular("arctan at +-i".into()));
                }
                Ok(scalar_out(finite(w.atan(), "arctan")?, one() / den))
            }
            Expr::Exp => {
                let e = finite(scalar_input(z)?.exp(), "exp overflow")?;
                Ok(scalar_out(e, e))
            }
            Expr::Log => {
                let w = scalar_input(z)?;
                if w.im == 0.0 && w.re <= 0.0 {
                    return Err(Error::BranchCut(format!("log of non-positive real {}", w.re)));
                }
                Ok(scalar_out(w.ln(), one() / w))
            }
            Expr::Power { k } => {
                let w = scalar_input(z)?;
                let value = w.powu(*k);
                let deriv = if *k == 0 {
                    C64::new(0.0, 0.0)
                } else {
                    w.powu(k - 1) * (*k as f64)
                };
                Ok(scalar_out(value, deriv))
            }
            Expr::Cayley => {
                let w = scalar_input(z)?;
                let den = one() - w;
                let value = finite((one() + w) / den, "cayley pole at 1")?;
                Ok(scalar_out(value, 2.0 / (den * den)))
            }
            Expr::CayleyInverse => {
                let w = scalar_input(z)?;
                let den = w + one();
                let value = finite((w - one()) / den, "inverse cayley pole at -1")?;
                Ok(scalar_out(value, 2.0 / (den * den)))
            }
            Expr::InnerWith { c } => {
                if c.len() != n {
                    return Err(Error::DimensionMismatch { expected: c.len(), got: n });
                }
                let value: C64 = z.0.iter().zip(c).map(|(a, b)| a * b.conj()).sum();
                let j = CMatrix::from_fn(1, n, |_, k| c[k].conj());
                Ok((ComplexVector::scalar(value), j))
            }
            Expr::Tuple { parts } => {
                let mut values = Vec::new();
                let mut rows: Vec<CMatrix> = Vec::with_capacity(parts.len());
                for p in parts {
                    let (v, j) = p.eval_jacobian(z)?;
                    values.extend(v.0);
                    rows.push(j);
                }
                let m = values.len();
                let mut jac = CMatrix::zeros(m, n);
                let mut r0 = 0;
                for j in rows {
                    jac.view_mut((r0, 0), (j.nrows(), n)).copy_from(&j);
                    r0 += j.nrows();
                }
                Ok((ComplexVector(values), jac))
            }
            Expr::Compose { outer, inner } => {
                let (mid, j_inner) = inner.eval_jacobian(z)?;
                let (value, j_outer) = outer.eval_jacobian(&mid)?;
                Ok((value, j_outer * j_inner))
            }
            Expr::Mul { factors } => {
                let mut value = one();
                let mut jac = CMatrix::zeros(1, n);
                for f in factors {
                    let (v, j) = f.eval_jacobian(z)?;
                    let v = scalar_input(&v)?;
                    jac = jac * v + j * value;
                    value *= v;
                }
                Ok((ComplexVector::scalar(value), jac))
            }
        }
    }
}

/// A holomorphic map with declared source and target regions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloMap {
    pub expr: Expr,
    pub source: Space,
    pub target: Space,
}

impl HoloMap {
    pub fn new(expr: Expr, source: Space, target: Space) -> Self {
        Self { expr, source, target }
    }

    pub fn identity(space: Space) -> Self {
        Self::new(Expr::Identity { dim: space.dim() }, space.clone(), space)
    }

    /// Evaluates at a point of the source region.
    pub fn eval(&self, z: &ComplexVector) -> Result<ComplexVector> {
        Ok(self.eval_jacobian(z)?.0)
    }

    /// Exact complex Jacobian at a point of the source region.
    pub fn deriv(&self, z: &ComplexVector) -> Result<CMatrix> {
        Ok(self.eval_jacobian(z)?.1)
    }

    pub fn eval_jacobian(&self, z: &ComplexVector) -> Result<(ComplexVector, CMatrix)> {
        self.source.check(z)?;
        self.expr.eval_jacobian(z)
    }

    /// `self o inner`, declared on `inner`'s source.
    pub fn after(&self, inner: &HoloMap) -> HoloMap {
        HoloMap::new(
            self.expr.clone().after(inner.expr.clone()),
            inner.source.clone(),
            self.target.clone(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("maps serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fd_jacobian;
    use crate::planar::PlanarDomain;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disk() -> Space {
        Space::Planar(PlanarDomain::Disk)
    }

    fn on_disk(e: Expr) -> HoloMap {
        HoloMap::new(e, disk(), Space::Whole(1))
    }

    #[test]
    fn strip_chart_inverse_at_origin() {
        let f = on_disk(Expr::strip_from_disk());
        let (v, j) = f.eval_jacobian(&ComplexVector::scalar(c(0.0, 0.0))).unwrap();
        assert_eq!(v[0], c(0.0, 0.0));
        assert!((j[(0, 0)] - c(4.0 / PI, 0.0)).norm() < 1e-15);
        let f0 = Expr::Tan.after(Expr::scalar_affine(c(PI / 4.0, 0.0), c(0.0, 0.0)));
        let (v, j) = f0.eval_jacobian(&ComplexVector::scalar(c(0.0, 0.0))).unwrap();
        assert_eq!(v[0], c(0.0, 0.0));
        assert!((j[(0, 0)] - c(PI / 4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn blaschke_factor_derivative_at_its_zero() {
        let z1 = c(0.4, -0.3);
        let t = on_disk(Expr::Blaschke { zeros: vec![z1], rotation: 0.0 });
        let (v, j) = t.eval_jacobian(&ComplexVector::scalar(z1)).unwrap();
        assert!(v[0].norm() < 1e-16);
        assert!((j[(0, 0)] - c(1.0 / (1.0 - z1.norm_sqr()), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn ball_mobius_composed_with_itself_is_identity() {
        let a = vec![c(0.3, 0.1), c(-0.2, 0.4)];
        let phi = HoloMap::new(Expr::BallMobius { center: a.clone() }, Space::Ball(2), Space::Ball(2));
        let twice = phi.after(&phi);
        for z in [[0.1, 0.0, 0.2, -0.3], [-0.5, 0.5, 0.1, 0.0], [0.0; 4]] {
            let z = ComplexVector::from_real(&z);
            assert!((&twice.eval(&z).unwrap() - &z).norm() < 1e-10);
            let j = twice.deriv(&z).unwrap();
            assert!((j - CMatrix::identity(2, 2)).norm() < 1e-10);
        }
    }

    #[test]
    fn errors_for_bad_inputs() {
        let log = HoloMap::new(Expr::Log, Space::Whole(1), Space::Whole(1));
        assert!(matches!(log.eval(&ComplexVector::scalar(c(-1.0, 0.0))), Err(Error::BranchCut(_))));
        assert!(matches!(log.eval(&ComplexVector::scalar(c(0.0, 0.0))), Err(Error::BranchCut(_))));
        let m = on_disk(Expr::Tan);
        assert!(matches!(m.eval(&ComplexVector::scalar(c(1.0, 0.0))), Err(Error::OutsideDomain(_))));
        let cay = HoloMap::new(Expr::Cayley, Space::Whole(1), Space::Whole(1));
        assert!(matches!(cay.eval(&ComplexVector::scalar(c(1.0, 0.0))), Err(Error::Singular(_))));
        let tan = HoloMap::new(Expr::Tan, Space::Whole(2), Space::Whole(1));
        assert!(matches!(tan.eval(&ComplexVector::zeros(2)), Err(Error::DimensionMismatch { .. })));
    }

    fn sample_tree() -> HoloMap {
        // (z1, z2) -> ( exp(-(1+z1)/(1-z1)) * <z, c>,  tan(pi/4 (4/pi) arctan(z1 z2)),  B(z2)^2 )
        let c1 = vec![c(0.3, 0.2), c(-0.1, 0.5)];
        let e1 = Expr::Mul {
            factors: vec![
                Expr::Exp
                    .after(Expr::scalar_affine(c(-1.0, 0.0), c(0.0, 0.0)))
                    .after(Expr::Cayley)
                    .after(Expr::Project { index: 0 }),
                Expr::InnerWith { c: c1 },
            ],
        };
        let e2 = Expr::Tan
            .after(Expr::scalar_affine(c(PI / 4.0, 0.0), c(0.0, 0.0)))
            .after(Expr::strip_from_disk())
            .after(Expr::Mul { factors: vec![Expr::Project { index: 0 }, Expr::Project { index: 1 }] });
        let e3 = Expr::Power { k: 2 }
            .after(Expr::Blaschke { zeros: vec![c(0.2, 0.1), c(-0.5, 0.3)], rotation: 0.7 })
            .after(Expr::Project { index: 1 });
        let e4 = Expr::Log.after(Expr::Cayley).after(Expr::DiskMobius { center: c(0.1, -0.6), rotation: 2.0 }).after(Expr::Project { index: 0 });
        let e5 = Expr::Affine {
            matrix: vec![vec![c(1.0, 1.0), c(0.0, -2.0)]],
            offset: vec![c(0.5, 0.0)],
        };
        HoloMap::new(Expr::Tuple { parts: vec![e1, e2, e3, e4, e5] }, Space::Ball(2), Space::Whole(5))
    }

    #[test]
    fn json_round_trip_preserves_tree() {
        let f = sample_tree();
        let back = HoloMap::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(v["expr"]["block"], "tuple");
        assert_eq!(v["expr"]["parts"][1]["block"], "compose");
    }

    proptest! {
        #[test]
        fn exact_jacobian_matches_central_differences(
            x in prop::collection::vec(-1.0f64..1.0, 4),
        ) {
            let z = ComplexVector::from_real(&x);
            prop_assume!(z.norm() < 0.95);
            let f = sample_tree();
            let exact = f.deriv(&z).unwrap();
            let fd = fd_jacobian(&f, &z, None).unwrap();
            prop_assert!((exact - fd).norm() < 1e-6);
        }

        #[test]
        fn chain_rule_is_structural(x in -0.9f64..0.9, y in -0.4f64..0.4) {
            let z = ComplexVector::scalar(c(x, y));
            let g = Expr::Blaschke { zeros: vec![c(0.3, 0.3)], rotation: 0.1 };
            let f = Expr::strip_from_disk();
            let (gz, jg) = g.eval_jacobian(&z).unwrap();
            let (_, jf) = f.eval_jacobian(&gz).unwrap();
            let (_, jfg) = f.clone().after(g).eval_jacobian(&z).unwrap();
            prop_assert_eq!(jfg, jf * jg);
        }
    }
}
