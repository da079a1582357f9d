//! Unit ball `B_n`: involutive automorphisms, their distortion factor, the
//! Kobayashi-Finsler norm and distance, and ordinary/invariant gradients.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{decompose_along, hermitian_inner, CMatrix, ComplexVector, C64};
use crate::maps::HoloMap;
use crate::planar::Normalization;

/// A point strictly inside the unit ball, with `s = sqrt(1 - |p|^2)` cached.
#[derive(Clone, Debug, PartialEq)]
pub struct BallPoint {
    p: ComplexVector,
    s: f64,
}

impl BallPoint {
    pub fn new(p: ComplexVector) -> Result<Self> {
        let r2 = p.norm_sqr();
        if !p.is_finite() || r2 >= 1.0 {
            return Err(Error::OutsideDomain(format!("{p} not in the unit ball")));
        }
        Ok(Self { s: (1.0 - r2).sqrt(), p })
    }

    pub fn origin(n: usize) -> Self {
        Self {
            p: ComplexVector::zeros(n),
            s: 1.0,
        }
    }

    pub fn point(&self) -> &ComplexVector {
        &self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }
}

/// The automorphism `phi_a` exchanging `a` and `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusBall {
    pub center: BallPoint,
}

impl MobiusBall {
    pub fn new(center: BallPoint) -> Self {
        Self { center }
    }

    pub fn apply(&self, z: &ComplexVector) -> Result<ComplexVector> {
        mobius_apply(&self.center, z)
    }

    pub fn derivative(&self, z: &ComplexVector) -> Result<CMatrix> {
        mobius_derivative(&self.center, z)
    }
}

/// A Kobayashi-Finsler norm evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinslerValue {
    pub base: ComplexVector,
    pub dir: ComplexVector,
    pub value: f64,
    pub normalization: Normalization,
}

impl FinslerValue {
    pub(crate) fn kob(base: &ComplexVector, dir: &ComplexVector, value: f64) -> Self {
        Self {
            base: base.clone(),
            dir: dir.clone(),
            value,
            normalization: Normalization::Kob,
        }
    }

    /// Reciprocal `L = 1/k`: the largest derivative of a holomorphic disk in direction `dir`.
    pub fn extremal_stretch(&self) -> f64 {
        1.0 / self.value
    }
}

fn check_ball(a: &BallPoint, z: &ComplexVector) -> Result<()> {
    if z.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: z.dim(),
        });
    }
    if !z.is_finite() || z.norm_sqr() >= 1.0 {
        return Err(Error::OutsideDomain(format!("{z} not in the unit ball")));
    }
    Ok(())
}

/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z,a>)`, with `phi_0 = -id`.
pub fn mobius_apply(a: &BallPoint, z: &ComplexVector) -> Result<ComplexVector> {
    check_ball(a, z)?;
    let aa = a.p.norm_sqr();
    if aa == 0.0 {
        return Ok(-z);
    }
    let za = hermitian_inner(z, &a.p)?;
    let pz = a.p.scale(za / aa);
    let qz = z - &pz;
    let num = &(&a.p - &pz) - &qz.scale_real(a.s);
    Ok(num.scale(1.0 / (C64::new(1.0, 0.0) - za)))
}

/// Exact Jacobian of `phi_a` at `z`.
pub fn mobius_derivative(a: &BallPoint, z: &ComplexVector) -> Result<CMatrix> {
    check_ball(a, z)?;
    let n = a.dim();
    let aa = a.p.norm_sqr();
    if aa == 0.0 {
        return Ok(-CMatrix::identity(n, n));
    }
    let av = a.p.to_column();
    // P = a a^* / |a|^2, Q = I - P
    let proj = &av * av.adjoint() / C64::new(aa, 0.0);
    let d_num = -&proj - (CMatrix::identity(n, n) - &proj) * C64::new(a.s, 0.0);
    let za = hermitian_inner(z, &a.p)?;
    let denom = C64::new(1.0, 0.0) - za;
    let num = &proj * z.to_column();
    let num = &av - &num - (z.to_column() - num) * C64::new(a.s, 0.0);
    // d/dz_c (N_r / d) = dN_rc / d + N_r conj(a_c) / d^2
    Ok(d_num / denom + num * av.adjoint() / (denom * denom))
}

/// Euclidean stretch of `d phi_p` in the direction `u`.
pub fn distortion_m(p: &BallPoint, u: &ComplexVector) -> Result<f64> {
    if u.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: u.dim(),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroTangent);
    }
    if p.p.is_zero() {
        return Ok(1.0);
    }
    let alpha = decompose_along(u, &p.p)?.alpha;
    let s2 = p.s * p.s;
    let (c, s) = (alpha.cos(), alpha.sin());
    Ok((c * c / (s2 * s2) + s * s / s2).sqrt())
}

/// Kobayashi-Finsler norm `M(p,u) |u|` on the ball.
pub fn kob_norm_ball(p: &BallPoint, u: &ComplexVector) -> Result<FinslerValue> {
    if u.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: u.dim(),
        });
    }
    let value = if u.is_zero() {
        0.0
    } else {
        distortion_m(p, u)? * u.norm()
    };
    Ok(FinslerValue::kob(&p.p, u, value))
}

/// Kobayashi distance on the ball, `artanh |phi_a(b)|` in Kobayashi normalization.
pub fn kob_dist_ball(a: &BallPoint, b: &BallPoint, norm: Normalization) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let r = mobius_apply(a, &b.p)?.norm().min(1.0 - f64::EPSILON);
    // 1 - |phi_a(b)|^2 = s_a^2 s_b^2 / |1 - <b,a>|^2
    let den = (C64::new(1.0, 0.0) - hermitian_inner(&b.p, &a.p)?).norm();
    let rest = (a.s * b.s / den).powi(2);
    Ok(norm.from_kob() * crate::planar::artanh_from_parts(r, rest))
}

/// `Df(z) = (D_1 f(z), ..., D_n f(z))` for a scalar holomorphic `f` on the ball.
pub fn gradient_d(f: &HoloMap, z: &BallPoint) -> Result<ComplexVector> {
    let (value, jac) = f.eval_jacobian(&z.p)?;
    if value.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: value.dim(),
        });
    }
    Ok(ComplexVector(jac.row(0).iter().copied().collect()))
}

/// Invariant gradient `D(f o phi_z)(0) = Df(z) (d phi_z)_0`.
pub fn invariant_gradient(f: &HoloMap, z: &BallPoint) -> Result<ComplexVector> {
    let df = gradient_d(f, z)?;
    let dphi = mobius_derivative(z, &ComplexVector::zeros(z.dim()))?;
    let row = DMatrix::from_row_slice(1, df.dim(), df.entries()) * dphi;
    Ok(ComplexVector(row.iter().copied().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fd_jacobian, operator_norm};
    use crate::maps::Expr;
    use crate::space::Space;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> ComplexVector {
        loop {
            let v = ComplexVector((0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
            if v.norm() < 1.0 {
                return v.scale_real(max_r);
            }
        }
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
        ComplexVector((0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
    }

    fn bp(v: &[f64]) -> BallPoint {
        BallPoint::new(ComplexVector::real(v)).unwrap()
    }

    #[test]
    fn ball_point_rejects_boundary() {
        assert!(BallPoint::new(ComplexVector::real(&[0.6, 0.8])).is_err());
        assert_eq!(BallPoint::origin(3).s(), 1.0);
        assert!((bp(&[0.6, 0.0]).s() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn mobius_swaps_center_and_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3 {
            let a = BallPoint::new(random_ball(&mut rng, n, 0.95)).unwrap();
            assert!(mobius_apply(&a, a.point()).unwrap().norm() < 1e-15);
            let at0 = mobius_apply(&a, &ComplexVector::zeros(n)).unwrap();
            assert!((&at0 - a.point()).norm() < 1e-15);
        }
        let z = ComplexVector::real(&[0.1, -0.3]);
        assert_eq!(mobius_apply(&BallPoint::origin(2), &z).unwrap(), -&z);
    }

    #[test]
    fn mobius_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for i in 0..1000 {
            let n = 1 + i % 3;
            let a = BallPoint::new(random_ball(&mut rng, n, 0.999)).unwrap();
            let z = random_ball(&mut rng, n, 0.999);
            let back = mobius_apply(&a, &mobius_apply(&a, &z).unwrap()).unwrap();
            assert!((&back - &z).norm() < 1e-10, "a = {}, z = {z}", a.point());
        }
    }

    #[test]
    fn mobius_rejects_outside() {
        let a = bp(&[0.2, 0.0]);
        assert!(mobius_apply(&a, &ComplexVector::real(&[1.0, 0.0])).is_err());
        assert!(mobius_apply(&a, &ComplexVector::real(&[0.0])).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for i in 0..300 {
            let n = 1 + i % 3;
            let a = BallPoint::new(random_ball(&mut rng, n, 0.9)).unwrap();
            let z = random_ball(&mut rng, n, 0.9);
            let map = HoloMap::new(
                Expr::BallMobius { center: a.point().0.clone() },
                Space::Ball(n),
                Space::Ball(n),
            );
            let exact = mobius_derivative(&a, &z).unwrap();
            let fd = fd_jacobian(&map, &z, None).unwrap();
            assert!((exact - fd).norm() < 1e-6);
        }
    }

    #[test]
    fn derivative_at_center_stretches_by_s() {
        let a = bp(&[0.6, 0.0]);
        let j = mobius_derivative(&a, a.point()).unwrap();
        let along = &j * &ComplexVector::real(&[1.0, 0.0]);
        let across = &j * &ComplexVector::real(&[0.0, 1.0]);
        assert!((along.norm() - 1.0 / 0.64).abs() < 1e-12);
        assert!((across.norm() - 1.0 / 0.8).abs() < 1e-12);
        let at_zero = mobius_derivative(&BallPoint::origin(2), &ComplexVector::real(&[0.3, 0.1])).unwrap();
        assert_eq!(at_zero, -CMatrix::identity(2, 2));
    }

    #[test]
    fn distortion_examples() {
        let u = ComplexVector::real(&[0.3, -0.7]);
        assert_eq!(distortion_m(&BallPoint::origin(2), &u).unwrap(), 1.0);
        let p = bp(&[0.6, 0.0]);
        let m = distortion_m(&p, &ComplexVector::real(&[1.0, 0.0])).unwrap();
        assert!((m - 1.5625).abs() < 1e-12);
        let m = distortion_m(&p, &ComplexVector::real(&[0.0, 1.0])).unwrap();
        assert!((m - 1.25).abs() < 1e-12);
        assert_eq!(distortion_m(&p, &ComplexVector::zeros(2)), Err(Error::ZeroTangent));
    }

    #[test]
    fn distortion_is_the_stretch_of_the_automorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for i in 0..500 {
            let n = 1 + i % 3;
            let p = BallPoint::new(random_ball(&mut rng, n, 0.95)).unwrap();
            let u = random_vec(&mut rng, n);
            let m = distortion_m(&p, &u).unwrap();
            let exact = (&mobius_derivative(&p, p.point()).unwrap() * &u).norm() / u.norm();
            assert!((m - exact).abs() < 1e-9 * m);
            assert!(1.0 / p.s() <= m * (1.0 + 1e-12));
            assert!(m <= (1.0 + 1e-12) / (p.s() * p.s()));
        }
    }

    #[test]
    fn kob_norm_examples() {
        let v = kob_norm_ball(&BallPoint::origin(2), &ComplexVector::real(&[0.6, 0.8])).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
        assert_eq!(v.normalization, Normalization::Kob);
        let v = kob_norm_ball(&bp(&[0.6, 0.0]), &ComplexVector::zeros(2)).unwrap();
        assert_eq!(v.value, 0.0);
        let v = kob_norm_ball(&bp(&[0.6, 0.0]), &ComplexVector::real(&[1.0, 0.0])).unwrap();
        assert!((v.value - 1.5625).abs() < 1e-12);
    }

    #[test]
    fn kob_norm_is_absolutely_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let p = BallPoint::new(random_ball(&mut rng, 2, 0.9)).unwrap();
            let u = random_vec(&mut rng, 2);
            let c = C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lhs = kob_norm_ball(&p, &u.scale(c)).unwrap().value;
            let rhs = c.norm() * kob_norm_ball(&p, &u).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn kob_distance_examples() {
        let a = bp(&[0.1, 0.2]);
        assert_eq!(kob_dist_ball(&a, &a, Normalization::Kob).unwrap(), 0.0);
        let d = kob_dist_ball(&BallPoint::origin(2), &bp(&[0.5, 0.0]), Normalization::Kob).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-15);
        let d2 = kob_dist_ball(&BallPoint::origin(2), &bp(&[0.5, 0.0]), Normalization::Hyp).unwrap();
        assert!((d2 - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn kob_distance_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for i in 0..1000 {
            let n = 1 + i % 3;
            let a = BallPoint::new(random_ball(&mut rng, n, 0.99)).unwrap();
            let b = BallPoint::new(random_ball(&mut rng, n, 0.99)).unwrap();
            let ab = kob_dist_ball(&a, &b, Normalization::Kob).unwrap();
            let ba = kob_dist_ball(&b, &a, Normalization::Kob).unwrap();
            assert!((ab - ba).abs() < 1e-10);
        }
    }

    fn linear(c: &[C64]) -> HoloMap {
        let n = c.len();
        HoloMap::new(
            Expr::Affine { matrix: vec![c.to_vec()], offset: vec![C64::new(0.0, 0.0)] },
            Space::Ball(n),
            Space::Whole(1),
        )
    }

    #[test]
    fn gradient_examples() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let z = bp(&[0.3, -0.2, 0.1]);
        let g = gradient_d(&linear(&[one, zero, zero]), &z).unwrap();
        assert_eq!(g, ComplexVector::real(&[1.0, 0.0, 0.0]));
        let c = [C64::new(0.2, 0.1), C64::new(-0.5, 0.0), C64::new(0.0, 0.3)];
        assert_eq!(gradient_d(&linear(&c), &z).unwrap(), ComplexVector(c.to_vec()));

        let id = HoloMap::new(Expr::Identity { dim: 3 }, Space::Ball(3), Space::Ball(3));
        assert!(gradient_d(&id, &z).is_err());
        let (_, j) = id.eval_jacobian(z.point()).unwrap();
        assert!((j.norm() - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invariant_gradient_at_origin_is_minus_gradient() {
        let c = [C64::new(0.2, 0.1), C64::new(-0.5, 0.4)];
        let f = linear(&c);
        let o = BallPoint::origin(2);
        let dt = invariant_gradient(&f, &o).unwrap();
        assert_eq!(dt, -&gradient_d(&f, &o).unwrap());
    }

    #[test]
    fn invariant_gradient_matches_fd_of_recentered_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z = BallPoint::new(random_ball(&mut rng, 2, 0.9)).unwrap();
            let c: Vec<C64> = (0..2).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let f = linear(&c);
            let recentered = f.after(&HoloMap::new(
                Expr::BallMobius { center: z.point().0.clone() },
                Space::Ball(2),
                Space::Ball(2),
            ));
            let fd = fd_jacobian(&recentered, &ComplexVector::zeros(2), None).unwrap();
            let exact = invariant_gradient(&f, &z).unwrap();
            let diff: f64 = (0..2).map(|k| (fd[(0, k)] - exact[k]).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-6);

            let s = z.s();
            let g = gradient_d(&f, &z).unwrap().norm();
            assert!(s * s * g <= exact.norm() + 1e-12);
            assert!(exact.norm() <= s * g + 1e-12);
        }
    }

    #[test]
    fn linear_coordinate_invariant_gradient() {
        // f = z_1 at (r, 0): d phi_z(0) scales the z_1 direction by s^2
        let r = 0.6;
        let z = bp(&[r, 0.0]);
        let f = linear(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let dt = invariant_gradient(&f, &z).unwrap();
        assert!((dt.norm() - (1.0 - r * r)).abs() < 1e-14);
        let on = operator_norm(&mobius_derivative(&z, &ComplexVector::zeros(2)).unwrap()).unwrap();
        assert!((on.value - z.s()).abs() < 1e-10);
    }
}
