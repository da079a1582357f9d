//! Kobayashi norms and distances on the polydisk and on products of planar
//! hyperbolic domains.

use serde::{Deserialize, Serialize};

use crate::ball::FinslerValue;
use crate::error::{Error, Result};
use crate::geometry::ComplexVector;
use crate::planar::{density, hyp_distance, Normalization, PlanarDomain};

/// `D_1 x ... x D_n` for planar model domains `D_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductDomain {
    pub factors: Vec<PlanarDomain>,
}

impl ProductDomain {
    pub fn new(factors: Vec<PlanarDomain>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDomain("product needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn square(d: PlanarDomain) -> Self {
        Self { factors: vec![d, d] }
    }

    pub fn contains(&self, z: &ComplexVector) -> bool {
        z.dim() == self.factors.len() && self.factors.iter().zip(&z.0).all(|(d, w)| d.contains(*w))
    }

    fn check(&self, z: &ComplexVector) -> Result<()> {
        if z.dim() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                got: z.dim(),
            });
        }
        if !self.contains(z) {
            return Err(Error::OutsideDomain(format!("{z} not in product domain")));
        }
        Ok(())
    }
}

/// Which density enters the product Finsler formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductNormalization {
    /// `max_k k_{D_k}(c_k) |u_k|` with `k = Hyp/2`; agrees with the extremal-disk definition.
    Kobayashi,
    /// `max_k Hyp_{D_k}(c_k) |u_k|`, exactly twice the Kobayashi value.
    LiteralHyp,
}

fn check_disk_point(z: &ComplexVector) -> Result<()> {
    if let Some(w) = z.0.iter().find(|w| !PlanarDomain::Disk.contains(**w)) {
        return Err(Error::OutsideDomain(format!(
            "coordinate {} outside the unit disk",
            crate::geometry::format_complex(*w)
        )));
    }
    Ok(())
}

fn check_same_dim(z: &ComplexVector, w: &ComplexVector) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: z.dim(),
            got: w.dim(),
        });
    }
    Ok(())
}

/// `max_k Kob_U(z_k, w_k)` on the polydisk `U^n`.
pub fn kob_dist_polydisk(z: &ComplexVector, w: &ComplexVector, norm: Normalization) -> Result<f64> {
    check_same_dim(z, w)?;
    check_disk_point(z)?;
    check_disk_point(w)?;
    z.0.iter().zip(&w.0).try_fold(0.0f64, |acc, (a, b)| {
        Ok(acc.max(hyp_distance(&PlanarDomain::Disk, *a, *b, norm)?))
    })
}

/// Kobayashi-Finsler norm on `U^n`: `max_k |u_k| / (1 - |p_k|^2)`.
pub fn finsler_polydisk_n(p: &ComplexVector, u: &ComplexVector) -> Result<FinslerValue> {
    check_same_dim(p, u)?;
    check_disk_point(p)?;
    let value = p
        .0
        .iter()
        .zip(&u.0)
        .map(|(c, v)| v.norm() / (1.0 - c.norm_sqr()))
        .fold(0.0, f64::max);
    Ok(FinslerValue::kob(p, u, value))
}

/// Kobayashi-Finsler norm on the bidisk at `p = (c, d)`:
/// `max(cos(alpha)/s_c^2, sin(alpha)/s_d^2) |u|` with `cos(alpha) = |u_1|/|u|`.
pub fn finsler_polydisk(p: &ComplexVector, u: &ComplexVector) -> Result<FinslerValue> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    finsler_polydisk_n(p, u)
}

/// Euclidean norm of `d(phi_c, phi_d)_p u`, i.e. `sqrt(|u_1|^2/s_c^4 + |u_2|^2/s_d^4)`.
///
/// This bounds but does not equal the Finsler value.
pub fn polydisk_image_norm(p: &ComplexVector, u: &ComplexVector) -> Result<f64> {
    check_same_dim(p, u)?;
    check_disk_point(p)?;
    Ok(p
        .0
        .iter()
        .zip(&u.0)
        .map(|(c, v)| {
            let s2 = 1.0 - c.norm_sqr();
            v.norm_sqr() / (s2 * s2)
        })
        .sum::<f64>()
        .sqrt())
}

/// Finsler norm on a product of simply connected planar domains.
pub fn finsler_product(
    omega: &ProductDomain,
    p: &ComplexVector,
    u: &ComplexVector,
    variant: ProductNormalization,
) -> Result<FinslerValue> {
    if let Some(d) = omega.factors.iter().find(|d| !d.is_simply_connected()) {
        return Err(Error::NotSimplyConnected(d.to_string()));
    }
    omega.check(p)?;
    check_same_dim(p, u)?;
    let mut value = 0.0f64;
    for ((dom, c), v) in omega.factors.iter().zip(&p.0).zip(&u.0) {
        let rho = density(dom, *c)?;
        let k = match variant {
            ProductNormalization::Kobayashi => rho.kob,
            ProductNormalization::LiteralHyp => rho.hyp,
        };
        value = value.max(k * v.norm());
    }
    let mut out = FinslerValue::kob(p, u, value);
    if variant == ProductNormalization::LiteralHyp {
        out.normalization = Normalization::Hyp;
    }
    Ok(out)
}

/// Product distance `max_k d_{D_k}(z_k, w_k)`.
pub fn kob_dist_product(omega: &ProductDomain, z: &ComplexVector, w: &ComplexVector, norm: Normalization) -> Result<f64> {
    omega.check(z)?;
    omega.check(w)?;
    omega
        .factors
        .iter()
        .zip(z.0.iter().zip(&w.0))
        .try_fold(0.0f64, |acc, (d, (a, b))| Ok(acc.max(hyp_distance(d, *a, *b, norm)?)))
}

/// Distances `(k(Re p, Re q), k(p, q))` in a product of strips; the first never exceeds the second.
pub fn real_projection_contract(omega: &ProductDomain, p: &ComplexVector, q: &ComplexVector) -> Result<(f64, f64)> {
    if let Some(d) = omega.factors.iter().find(|d| !matches!(d, PlanarDomain::Strip { .. })) {
        return Err(Error::InvalidDomain(format!("real projection needs strip factors, got {d}")));
    }
    let real = kob_dist_product(omega, &p.re(), &q.re(), Normalization::Kob)?;
    let full = kob_dist_product(omega, p, q, Normalization::Kob)?;
    Ok((real, full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::C64;
    use crate::maps::{Expr, HoloMap};
    use crate::planar::chart_from_disk;
    use crate::space::Space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disk_point(rng: &mut ChaCha8Rng, max_r: f64) -> C64 {
        C64::from_polar(max_r * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
    }

    #[test]
    fn polydisk_distance_examples() {
        let z = ComplexVector::new(vec![c(0.1, 0.2), c(-0.3, 0.0)]);
        assert_eq!(kob_dist_polydisk(&z, &z, Normalization::Kob).unwrap(), 0.0);
        let o = ComplexVector::zeros(2);
        let w = ComplexVector::real(&[0.5, 0.3]);
        let d = kob_dist_polydisk(&o, &w, Normalization::Kob).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-15);
        let swapped = ComplexVector::real(&[0.3, 0.5]);
        assert_eq!(kob_dist_polydisk(&o, &swapped, Normalization::Kob).unwrap(), d);
        assert!(kob_dist_polydisk(&o, &ComplexVector::real(&[1.0, 0.0]), Normalization::Kob).is_err());
    }

    #[test]
    fn polydisk_finsler_examples() {
        let o = ComplexVector::zeros(2);
        let v = finsler_polydisk(&o, &ComplexVector::real(&[1.0, 0.0])).unwrap();
        assert_eq!(v.value, 1.0);
        let u = ComplexVector::new(vec![c(0.6, 0.3), c(0.2, -0.4)]);
        let v = finsler_polydisk(&o, &u).unwrap();
        assert!((v.value - u[0].norm()).abs() < 1e-15);
        let p = ComplexVector::real(&[0.6, 0.8]);
        let v = finsler_polydisk(&p, &ComplexVector::real(&[1.0, 1.0])).unwrap();
        assert!((v.value - 1.0 / 0.36).abs() < 1e-12);
        assert_eq!(finsler_polydisk(&p, &ComplexVector::zeros(2)).unwrap().value, 0.0);
    }

    #[test]
    fn polydisk_finsler_matches_extremal_disk() {
        // zeta -> (phi(c, zeta nu_1), phi(d, zeta nu_2)) with |nu_k| <= 1 passes
        // through p with velocity (s_c^2 nu_1, s_d^2 nu_2).
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let p = ComplexVector::new(vec![disk_point(&mut rng, 0.95), disk_point(&mut rng, 0.95)]);
            let u = ComplexVector::new(vec![disk_point(&mut rng, 1.0), disk_point(&mut rng, 1.0)]);
            let k = finsler_polydisk(&p, &u).unwrap().value;
            let s2: Vec<f64> = p.0.iter().map(|c| 1.0 - c.norm_sqr()).collect();
            let nu: Vec<C64> = (0..2).map(|j| u[j] / (k * s2[j])).collect();
            assert!(nu.iter().all(|n| n.norm() <= 1.0 + 1e-12));
            let parts = (0..2)
                .map(|j| {
                    Expr::DiskMobius { center: -p[j], rotation: 0.0 }
                        .after(Expr::scalar_affine(nu[j], c(0.0, 0.0)))
                })
                .collect();
            let disk = HoloMap::new(Expr::Tuple { parts }, Space::Planar(PlanarDomain::Disk), Space::Polydisk(2));
            let (at0, jac) = disk.eval_jacobian(&ComplexVector::zeros(1)).unwrap();
            assert!((&at0 - &p).norm() < 1e-12);
            // velocity times k recovers u
            for j in 0..2 {
                assert!((jac[(j, 0)] * k - u[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn polydisk_finsler_is_monotone_in_radius() {
        let u = ComplexVector::new(vec![c(0.4, 0.1), c(-0.2, 0.5)]);
        let mut last = 0.0;
        for i in 0..50 {
            let r = i as f64 / 51.0;
            let p = ComplexVector::new(vec![C64::from_polar(r, 0.3), C64::from_polar(r * 0.7, 1.1)]);
            let v = finsler_polydisk(&p, &u).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn image_norm_matches_jacobian_of_coordinate_automorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let p = ComplexVector::new(vec![disk_point(&mut rng, 0.95), disk_point(&mut rng, 0.95)]);
            let u = ComplexVector::new(vec![disk_point(&mut rng, 1.0), disk_point(&mut rng, 1.0)]);
            let parts = (0..2)
                .map(|j| Expr::DiskMobius { center: p[j], rotation: 0.0 }.after(Expr::Project { index: j }))
                .collect();
            let t = HoloMap::new(Expr::Tuple { parts }, Space::Polydisk(2), Space::Polydisk(2));
            let (_, jac) = t.eval_jacobian(&p).unwrap();
            let exact = (&jac * &u).norm();
            assert!((exact - polydisk_image_norm(&p, &u).unwrap()).abs() < 1e-9 * exact.max(1.0));
        }
    }

    #[test]
    fn product_finsler_examples() {
        let u2 = ProductDomain::square(PlanarDomain::Disk);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let p = ComplexVector::new(vec![disk_point(&mut rng, 0.9), disk_point(&mut rng, 0.9)]);
            let u = ComplexVector::new(vec![disk_point(&mut rng, 2.0), disk_point(&mut rng, 2.0)]);
            let a = finsler_product(&u2, &p, &u, ProductNormalization::Kobayashi).unwrap().value;
            let b = finsler_polydisk(&p, &u).unwrap().value;
            assert!((a - b).abs() < 1e-12 * b.max(1.0));
            let lit = finsler_product(&u2, &p, &u, ProductNormalization::LiteralHyp).unwrap().value;
            assert!((lit - 2.0 * a).abs() < 1e-12 * a.max(1.0));
            let s = c(-1.5, 0.7);
            let scaled = finsler_product(&u2, &p, &u.scale(s), ProductNormalization::Kobayashi).unwrap().value;
            assert!((scaled - s.norm() * a).abs() < 1e-12 * scaled.max(1.0));
        }

        let pi2 = ProductDomain::square(PlanarDomain::HalfPlane);
        let v = finsler_product(&pi2, &ComplexVector::real(&[1.0, 1.0]), &ComplexVector::real(&[1.0, 0.0]), ProductNormalization::Kobayashi).unwrap();
        assert!((v.value - 0.5).abs() < 1e-15);

        let bad = ProductDomain::new(vec![PlanarDomain::Disk, PlanarDomain::PuncturedDisk]).unwrap();
        assert!(matches!(
            finsler_product(&bad, &ComplexVector::real(&[0.1, 0.5]), &ComplexVector::real(&[1.0, 0.0]), ProductNormalization::Kobayashi),
            Err(Error::NotSimplyConnected(_))
        ));
        assert!(ProductDomain::new(vec![]).is_err());
    }

    #[test]
    fn half_plane_square_finsler_transports_to_bidisk() {
        // Cayley charts carry Pi^2 isometrically onto U^2
        let pi2 = ProductDomain::square(PlanarDomain::HalfPlane);
        let inv = chart_from_disk(&PlanarDomain::HalfPlane).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let w = [disk_point(&mut rng, 0.9), disk_point(&mut rng, 0.9)];
            let v = ComplexVector::new(vec![disk_point(&mut rng, 1.0), disk_point(&mut rng, 1.0)]);
            let mut p = vec![];
            let mut u = vec![];
            for j in 0..2 {
                let (x, jac) = inv.eval_jacobian(&ComplexVector::scalar(w[j])).unwrap();
                p.push(x[0]);
                u.push(jac[(0, 0)] * v[j]);
            }
            let lhs = finsler_product(&pi2, &ComplexVector(p), &ComplexVector(u), ProductNormalization::Kobayashi).unwrap().value;
            let rhs = finsler_polydisk(&ComplexVector(w.to_vec()), &v).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0));
        }
    }

    #[test]
    fn real_projection_contracts() {
        let s2 = ProductDomain::square(PlanarDomain::strip0());
        let p = ComplexVector::new(vec![c(0.3, 1.0), c(-0.2, -0.5)]);
        assert_eq!(real_projection_contract(&s2, &p, &p).unwrap(), (0.0, 0.0));
        let q = ComplexVector::new(vec![c(-0.7, 1.0), c(0.6, -0.5)]);
        let (re, full) = real_projection_contract(&s2, &p, &q).unwrap();
        assert!((re - full).abs() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..1000 {
            let pt = |rng: &mut ChaCha8Rng| {
                ComplexVector::new(
                    (0..2).map(|_| c(rng.random_range(-0.999..0.999), rng.random_range(-3.0..3.0))).collect(),
                )
            };
            let (p, q) = (pt(&mut rng), pt(&mut rng));
            let (re, full) = real_projection_contract(&s2, &p, &q).unwrap();
            assert!(re <= full + 1e-9);
        }
        let bad = ProductDomain::square(PlanarDomain::Disk);
        assert!(real_projection_contract(&bad, &p, &p).is_err());
    }

    #[test]
    fn strip_density_depends_on_real_part_only() {
        let s = PlanarDomain::strip(-0.5, 2.0).unwrap();
        for y in [-10.0, -1.0, 0.0, 0.3, 7.0] {
            let a = density(&s, c(1.2, y)).unwrap().hyp;
            let b = density(&s, c(1.2, 0.0)).unwrap().hyp;
            assert_eq!(a, b);
        }
    }
}
