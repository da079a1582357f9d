use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{operator_norm, CMatrix, ComplexVector, C64};
use crate::maps::HoloMap;

/// How a harmonic map is read off its analytic companion `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "part", rename_all = "snake_case")]
pub enum HarmonicPart {
    /// `Re F`, componentwise; real valued (pluriharmonic when the source is a ball).
    RealPart,
    /// `Re F + i scale Im F`.
    RealPlusScaledImag { scale: f64 },
    /// `Re F(z) + i scale Im z`, for scalar sources.
    RealPlusScaledInputImag { scale: f64 },
}

/// A harmonic (or pluriharmonic) map given through an analytic map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicMap {
    pub analytic: HoloMap,
    pub part: HarmonicPart,
}

impl HarmonicMap {
    pub fn real_part(analytic: HoloMap) -> Self {
        Self {
            analytic,
            part: HarmonicPart::RealPart,
        }
    }

    pub fn new(analytic: HoloMap, part: HarmonicPart) -> Self {
        Self { analytic, part }
    }

    fn check_part(&self, z: &ComplexVector, fz: &ComplexVector) -> Result<()> {
        match self.part {
            HarmonicPart::RealPart => Ok(()),
            HarmonicPart::RealPlusScaledImag { .. } if fz.dim() == 1 => Ok(()),
            HarmonicPart::RealPlusScaledInputImag { .. } if fz.dim() == 1 && z.dim() == 1 => Ok(()),
            _ => Err(Error::DimensionMismatch {
                expected: 1,
                got: fz.dim().max(z.dim()),
            }),
        }
    }

    /// Value at `z`; real-part maps return vectors with zero imaginary parts.
    pub fn eval(&self, z: &ComplexVector) -> Result<ComplexVector> {
        let fz = self.analytic.eval(z)?;
        self.check_part(z, &fz)?;
        Ok(match self.part {
            HarmonicPart::RealPart => fz.re(),
            HarmonicPart::RealPlusScaledImag { scale } => ComplexVector::scalar(C64::new(fz[0].re, scale * fz[0].im)),
            HarmonicPart::RealPlusScaledInputImag { scale } => {
                ComplexVector::scalar(C64::new(fz[0].re, scale * z[0].im))
            }
        })
    }

    /// Real values of a real-part map.
    pub fn real_values(&self, z: &ComplexVector) -> Result<Vec<f64>> {
        match self.part {
            HarmonicPart::RealPart => Ok(self.analytic.eval(z)?.0.iter().map(|w| w.re).collect()),
            _ => Err(Error::InvalidDomain("map is complex valued".into())),
        }
    }

    /// Jacobian with respect to the real coordinates `(x_1, y_1, ..., x_n, y_n)`.
    ///
    /// Rows are the real output components: one per entry for real-part
    /// maps, `(Re, Im)` otherwise.
    pub fn real_jacobian(&self, z: &ComplexVector) -> Result<DMatrix<f64>> {
        let (fz, j) = self.analytic.eval_jacobian(z)?;
        self.check_part(z, &fz)?;
        let n = z.dim();
        // d/dx_k F = J_k, d/dy_k F = i J_k
        let re_row = |r: usize| DMatrix::from_fn(1, 2 * n, |_, c| if c % 2 == 0 { j[(r, c / 2)].re } else { -j[(r, c / 2)].im });
        let im_row = |r: usize| DMatrix::from_fn(1, 2 * n, |_, c| if c % 2 == 0 { j[(r, c / 2)].im } else { j[(r, c / 2)].re });
        Ok(match self.part {
            HarmonicPart::RealPart => {
                let mut out = DMatrix::zeros(fz.dim(), 2 * n);
                for r in 0..fz.dim() {
                    out.set_row(r, &re_row(r).row(0));
                }
                out
            }
            HarmonicPart::RealPlusScaledImag { scale } => {
                let mut out = DMatrix::zeros(2, 2 * n);
                out.set_row(0, &re_row(0).row(0));
                out.set_row(1, &(im_row(0) * scale).row(0));
                out
            }
            HarmonicPart::RealPlusScaledInputImag { scale } => {
                let mut out = DMatrix::zeros(2, 2);
                out.set_row(0, &re_row(0).row(0));
                out[(1, 1)] = scale;
                out
            }
        })
    }

    /// Largest stretch of the real differential; for `Re F` this is `|F'|`.
    pub fn gradient_norm(&self, z: &ComplexVector) -> Result<f64> {
        let j = self.real_jacobian(z)?;
        let jc = CMatrix::from_fn(j.nrows(), j.ncols(), |r, c| C64::new(j[(r, c)], 0.0));
        Ok(operator_norm(&jc)?.value)
    }

    /// Real differential applied to the tangent vector `h`.
    pub fn differential(&self, z: &ComplexVector, h: &ComplexVector) -> Result<Vec<f64>> {
        let j = self.real_jacobian(z)?;
        if 2 * h.dim() != j.ncols() {
            return Err(Error::DimensionMismatch {
                expected: j.ncols() / 2,
                got: h.dim(),
            });
        }
        let x = nalgebra::DVector::from_vec(h.to_real());
        Ok((j * x).iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fd_jacobian;
    use crate::maps::Expr;
    use crate::planar::{chart_from_disk, PlanarDomain};
    use crate::space::Space;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sharp() -> HoloMap {
        chart_from_disk(&PlanarDomain::strip0()).unwrap()
    }

    #[test]
    fn gradient_of_real_part_of_identity() {
        let f = HarmonicMap::real_part(HoloMap::identity(Space::Planar(PlanarDomain::Disk)));
        let z = ComplexVector::scalar(c(0.3, -0.2));
        let j = f.real_jacobian(&z).unwrap();
        assert_eq!(j.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0]);
        assert!((f.gradient_norm(&z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_map_gradient_at_origin() {
        let h = HarmonicMap::real_part(sharp());
        let g = h.gradient_norm(&ComplexVector::scalar(c(0.0, 0.0))).unwrap();
        assert!((g - 4.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn real_part_gradient_equals_modulus_of_derivative() {
        let f = sharp().after(&HoloMap::new(
            Expr::Blaschke {
                zeros: vec![c(0.2, 0.5), c(-0.4, 0.0)],
                rotation: 1.1,
            },
            Space::Planar(PlanarDomain::Disk),
            Space::Planar(PlanarDomain::Disk),
        ));
        let h = HarmonicMap::real_part(f.clone());
        for z in [c(0.1, 0.2), c(-0.7, 0.1), c(0.0, -0.95)] {
            let z = ComplexVector::scalar(z);
            let d = f.deriv(&z).unwrap()[(0, 0)].norm();
            assert!((h.gradient_norm(&z).unwrap() - d).abs() < 1e-12);
        }
    }

    #[test]
    fn ga_distortion_grows_linearly() {
        // L_{g_a}(0) = |a| 4/pi once |a| >= 1
        for a in [1.0, 2.0, 10.0, -50.0, 1e3] {
            let g = HarmonicMap::new(sharp(), HarmonicPart::RealPlusScaledImag { scale: a });
            let l = g.gradient_norm(&ComplexVector::scalar(c(0.0, 0.0))).unwrap();
            assert!((l - f64::abs(a) * 4.0 / PI).abs() < 1e-9 * f64::abs(a));
        }
    }

    #[test]
    fn fa_derivative_at_origin_is_at_least_scale() {
        for a in [0.5, 3.0, -7.0] {
            let f = HarmonicMap::new(sharp(), HarmonicPart::RealPlusScaledInputImag { scale: a });
            let z0 = ComplexVector::scalar(c(0.0, 0.0));
            assert_eq!(f.eval(&z0).unwrap()[0], c(0.0, 0.0));
            assert!(f.gradient_norm(&z0).unwrap() >= f64::abs(a) - 1e-12);
            // stays in the strip
            let w = f.eval(&ComplexVector::scalar(c(0.9, 0.4))).unwrap()[0];
            assert!(w.re.abs() < 1.0);
        }
    }

    #[test]
    fn real_jacobian_matches_finite_differences() {
        let analytic = HoloMap::new(
            Expr::Tuple {
                parts: vec![
                    Expr::strip_from_disk().after(Expr::InnerWith {
                        c: vec![c(0.6, 0.0), c(0.0, 0.8)],
                    }),
                    Expr::strip_from_disk().after(Expr::Mul {
                        factors: vec![Expr::Project { index: 0 }, Expr::Project { index: 1 }],
                    }),
                ],
            },
            Space::Ball(2),
            Space::Whole(2),
        );
        let h = HarmonicMap::real_part(analytic.clone());
        let z = ComplexVector::new(vec![c(0.3, -0.1), c(0.2, 0.5)]);
        let j = h.real_jacobian(&z).unwrap();
        let step = 1e-6;
        for k in 0..4 {
            let mut xp = z.to_real();
            let mut xm = z.to_real();
            xp[k] += step;
            xm[k] -= step;
            let fp = h.real_values(&ComplexVector::from_real(&xp)).unwrap();
            let fm = h.real_values(&ComplexVector::from_real(&xm)).unwrap();
            for r in 0..2 {
                assert!((j[(r, k)] - (fp[r] - fm[r]) / (2.0 * step)).abs() < 1e-6);
            }
        }
        let cj = fd_jacobian(&analytic, &z, None).unwrap();
        assert!((cj[(0, 1)].re - j[(0, 2)]).abs() < 1e-6);
    }
}
