use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::oracle::path_oracle;
use super::report::{Check, SampleOutcome};
use crate::ball::{self, BallPoint};
use crate::error::{Error, Result};
use crate::geometry::{operator_norm, CMatrix, ComplexVector, C64};
use crate::maps::{
    random_point, random_unit, sample_member, sample_rng, sharp_growth, FamilyKind, FamilyMember, HarmonicMap, HoloMap,
    MemberRole,
};
use crate::planar::{self, Normalization, PlanarDomain};
use crate::product::{self, ProductDomain, ProductNormalization};
use crate::space::Space;
use crate::tolerances::SAMPLING_MARGIN;

/// Registered inequality suites, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuiteId {
    SchwarzPickDisk,
    KvStrip,
    KvDisk,
    KavuDistance,
    HarAngle,
    ReGrowth,
    BallSchwarz0,
    BallDistortion,
    BallKalaj,
    KobContraction,
    KobTangent,
    BallToProduct,
    Pluriharmonic,
    InvariantGradient,
    DyakBloch,
    Dyakonov,
    Ahlfors,
}

impl SuiteId {
    pub const ALL: [SuiteId; 17] = [
        SuiteId::SchwarzPickDisk,
        SuiteId::KvStrip,
        SuiteId::KvDisk,
        SuiteId::KavuDistance,
        SuiteId::HarAngle,
        SuiteId::ReGrowth,
        SuiteId::BallSchwarz0,
        SuiteId::BallDistortion,
        SuiteId::BallKalaj,
        SuiteId::KobContraction,
        SuiteId::KobTangent,
        SuiteId::BallToProduct,
        SuiteId::Pluriharmonic,
        SuiteId::InvariantGradient,
        SuiteId::DyakBloch,
        SuiteId::Dyakonov,
        SuiteId::Ahlfors,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::SchwarzPickDisk => "schwarz-pick-disk",
            SuiteId::KvStrip => "kv-strip",
            SuiteId::KvDisk => "kv-disk",
            SuiteId::KavuDistance => "kavu-distance",
            SuiteId::HarAngle => "har-angle",
            SuiteId::ReGrowth => "re-growth",
            SuiteId::BallSchwarz0 => "ball-schwarz-0",
            SuiteId::BallDistortion => "ball-distortion",
            SuiteId::BallKalaj => "ball-kalaj",
            SuiteId::KobContraction => "kob-contraction",
            SuiteId::KobTangent => "kob-tangent",
            SuiteId::BallToProduct => "ball-to-product",
            SuiteId::Pluriharmonic => "pluriharmonic",
            SuiteId::InvariantGradient => "invariant-gradient",
            SuiteId::DyakBloch => "dyak-bloch",
            SuiteId::Dyakonov => "dyakonov",
            SuiteId::Ahlfors => "ahlfors",
        }
    }

    /// One-line statement of what the suite checks.
    pub fn statement(self) -> &'static str {
        match self {
            SuiteId::SchwarzPickDisk => "(1-|z|^2)|f'(z)| <= 1-|f(z)|^2 and delta(fz,fw) <= delta(z,w) for disk self-maps",
            SuiteId::KvStrip => "(1-|z|^2)|grad u| <= (4/pi) cos(pi u/2) for harmonic u: D -> (-1,1)",
            SuiteId::KvDisk => "(1-|z|^2)|grad u| <= (4/pi)(1-u^2) for harmonic u: D -> (-1,1)",
            SuiteId::KavuDistance => "Hyp_D(u z1, u z2) <= (4/pi) Hyp_G(z1,z2) for harmonic u: G -> (-1,1)",
            SuiteId::HarAngle => "|du(h)| Hyp_S(f z) <= Hyp_D(z) for complex harmonic f: D -> S(a,b)",
            SuiteId::ReGrowth => "|u(z)| <= (4/pi) arctan|z| for harmonic u: D -> (-1,1), u(0) = 0",
            SuiteId::BallSchwarz0 => "|f(z)| <= |z| for f: B_n -> B_m with f(0) = 0",
            SuiteId::BallDistortion => "M(f a, f'(a)u)|f'(a)u| <= M(a,u)|u| for f: B_n -> B_m",
            SuiteId::BallKalaj => "(1-|a|^2)|f'(a)| <= sqrt(1-|f(a)|^2) for f: B_n -> B_m",
            SuiteId::KobContraction => "Kob(fz,fw) <= Kob(z,w) for holomorphic maps between model domains",
            SuiteId::KobTangent => "k(fz, f'(z)u) <= k(z,u) for holomorphic maps between model domains",
            SuiteId::BallToProduct => "k_Omega(f a, f'(a)u) <= M(a,u)|u| for f: B_2 -> Omega",
            SuiteId::Pluriharmonic => "Kob_{S0^2}(Re F z, Re F w) <= Kob_B2(z,w)",
            SuiteId::InvariantGradient => "s^2|Df(z)| <= |D~f(z)| <= s|Df(z)|",
            SuiteId::DyakBloch => "k_G(f a)|f'(a)u| <= M(a,u)|u|, k_G(fz)|f'(z)| <= 1/s^2, k_G(fz)|D~f(z)| <= 1",
            SuiteId::Dyakonov => "(1-|a|^2)|f'(a)| <= 2|b| ln(1/|b|) for f: B_n -> punctured disk",
            SuiteId::Ahlfors => "Hyp_G(fz)|f'(z)|(1-|z|^2) <= 2 for f: D -> G",
        }
    }

    /// Families the suite draws from, cycled by sample index.
    pub fn families(self) -> Vec<FamilyKind> {
        let s0 = PlanarDomain::strip0();
        let s23 = PlanarDomain::Strip { a: -2.0, b: Some(3.0) };
        let ray1 = PlanarDomain::Strip { a: 1.0, b: None };
        let ray0 = PlanarDomain::Strip { a: 0.0, b: None };
        let half = PlanarDomain::HalfPlane;
        let disk = PlanarDomain::Disk;
        let ball_pairs = |pairs: &[(usize, usize)]| {
            pairs.iter().map(|&(n, m)| FamilyKind::BallToBall { n, m }).collect::<Vec<_>>()
        };
        let product = |a: PlanarDomain, b: PlanarDomain| FamilyKind::Ball2ToProduct {
            target: ProductDomain { factors: vec![a, b] },
        };
        match self {
            SuiteId::SchwarzPickDisk => vec![FamilyKind::DiskToDisk],
            SuiteId::KvStrip | SuiteId::KvDisk | SuiteId::ReGrowth => vec![FamilyKind::HarmonicDiskToInterval],
            SuiteId::KavuDistance => [disk, half, s23, ray1]
                .into_iter()
                .map(|source| FamilyKind::HarmonicPlanarToInterval { source })
                .collect(),
            SuiteId::HarAngle => [s0, s23, ray0, ray1]
                .into_iter()
                .map(|target| FamilyKind::HarmonicDiskToStrip { target })
                .collect(),
            SuiteId::BallSchwarz0 | SuiteId::BallDistortion => ball_pairs(&[(2, 2), (2, 1), (3, 2), (2, 3), (3, 3)]),
            SuiteId::BallKalaj => ball_pairs(&[(2, 1), (3, 1), (2, 2), (2, 3)]),
            SuiteId::KobContraction | SuiteId::KobTangent => {
                let mut kinds = vec![FamilyKind::DiskToDisk];
                kinds.extend([half, s23, ray1].map(|target| FamilyKind::DiskToPlanar { target }));
                kinds.extend(ball_pairs(&[(2, 2), (2, 1), (3, 2)]));
                kinds.push(FamilyKind::BallToPlanar { n: 2, target: s0 });
                kinds.push(FamilyKind::BallToPlanar { n: 3, target: half });
                kinds.push(product(disk, disk));
                kinds.push(product(s0, half));
                kinds.push(FamilyKind::PolydiskToPolydisk { n: 2 });
                kinds.push(FamilyKind::PolydiskToPolydisk { n: 3 });
                kinds
            }
            SuiteId::BallToProduct => vec![
                product(disk, disk),
                product(half, half),
                product(s0, s0),
                product(s23, half),
                product(ray1, disk),
            ],
            SuiteId::Pluriharmonic => vec![FamilyKind::PluriharmonicBall2ToIntervalSq],
            SuiteId::InvariantGradient => vec![
                FamilyKind::BallToBall { n: 2, m: 1 },
                FamilyKind::BallToBall { n: 3, m: 1 },
                FamilyKind::BallToPlanar { n: 2, target: s0 },
                FamilyKind::BallToPlanar { n: 3, target: half },
            ],
            SuiteId::DyakBloch => {
                let mut kinds = Vec::new();
                for n in [2, 3] {
                    kinds.extend([disk, half, s0, s23, ray1].map(|target| FamilyKind::BallToPlanar { n, target }));
                    kinds.push(FamilyKind::BallToPuncturedDisk { n });
                }
                kinds
            }
            SuiteId::Dyakonov => vec![
                FamilyKind::BallToPuncturedDisk { n: 2 },
                FamilyKind::BallToPuncturedDisk { n: 3 },
            ],
            SuiteId::Ahlfors => [disk, half, s0, s23, ray1, PlanarDomain::PuncturedDisk]
                .into_iter()
                .map(|target| FamilyKind::DiskToPlanar { target })
                .collect(),
        }
    }

    /// Family and member index used by sample `index`.
    pub fn member_slot(self, index: u64) -> (FamilyKind, u64) {
        if self == SuiteId::KavuDistance && index % PUNCTURED_EVERY == 0 {
            let source = PlanarDomain::PuncturedDisk;
            return (FamilyKind::HarmonicPlanarToInterval { source }, index / PUNCTURED_EVERY);
        }
        let kinds = self.families();
        let k = kinds.len() as u64;
        (kinds[(index % k) as usize].clone(), index / k)
    }

    /// Evaluates sample `index` under `seed`.
    pub fn sample(self, seed: u64, index: u64) -> Result<SampleOutcome> {
        let (kind, member_index) = self.member_slot(index);
        let member = sample_member(&kind, seed, member_index);
        let mut rng = sample_rng(seed, 2 * index + 1);
        let (inputs, checks) = self.run(&member, index, &mut rng).map_err(|e| Error::Suite {
            suite: self.as_str().to_string(),
            index: index as usize,
            source: Box::new(e),
        })?;
        Ok(SampleOutcome {
            index,
            family: kind.to_string(),
            member: member_index,
            role: member.role,
            inputs,
            checks,
        })
    }

    fn run(self, member: &FamilyMember, index: u64, rng: &mut ChaCha8Rng) -> Result<(Vec<String>, Vec<Check>)> {
        let source = member.map.source().clone();
        let sharp = member.role == MemberRole::Sharp;
        let mut inputs = Vec::new();
        let draw = |rng: &mut ChaCha8Rng, inputs: &mut Vec<String>| {
            let z = point(&source, rng);
            inputs.push(z.to_string());
            z
        };
        let record = |v: ComplexVector, inputs: &mut Vec<String>| {
            inputs.push(v.to_string());
            v
        };
        let checks = match self {
            SuiteId::SchwarzPickDisk => {
                let z = draw(rng, &mut inputs);
                let w = draw(rng, &mut inputs);
                schwarz_pick(holo(member)?, &z, &w)?
            }
            SuiteId::KvStrip => {
                let z = if sharp { record(real_disk_point(rng), &mut inputs) } else { draw(rng, &mut inputs) };
                vec![kv_strip(harmonic(member)?, &z)?]
            }
            SuiteId::KvDisk => {
                let z = if index % 3 == 0 {
                    record(ComplexVector::zeros(1), &mut inputs)
                } else {
                    draw(rng, &mut inputs)
                };
                vec![kv_disk(harmonic(member)?, &z)?]
            }
            SuiteId::KavuDistance => {
                let z1 = draw(rng, &mut inputs);
                let z2 = draw(rng, &mut inputs);
                vec![kavu_distance(harmonic(member)?, &z1, &z2)?]
            }
            SuiteId::HarAngle => {
                let z1 = draw(rng, &mut inputs);
                let z2 = draw(rng, &mut inputs);
                let h = record(random_unit(rng, 1), &mut inputs);
                har_angle(harmonic(member)?, &z1, &z2, &h)?
            }
            SuiteId::ReGrowth => {
                let z = if sharp { record(real_disk_point(rng), &mut inputs) } else { draw(rng, &mut inputs) };
                vec![re_growth(harmonic(member)?, &z)?]
            }
            SuiteId::BallSchwarz0 => {
                let a = draw(rng, &mut inputs);
                let b = draw(rng, &mut inputs);
                ball_schwarz_origin(holo(member)?, &a, &b)?
            }
            SuiteId::BallDistortion => {
                let a = draw(rng, &mut inputs);
                let u = record(random_unit(rng, a.dim()), &mut inputs);
                vec![ball_distortion(holo(member)?, &a, &u)?]
            }
            SuiteId::BallKalaj => {
                let a = if index % 10 == 0 {
                    record(ComplexVector::zeros(source.dim()), &mut inputs)
                } else {
                    draw(rng, &mut inputs)
                };
                vec![ball_kalaj(holo(member)?, &a)?]
            }
            SuiteId::KobContraction => {
                let z = draw(rng, &mut inputs);
                let w = draw(rng, &mut inputs);
                vec![kob_contraction(holo(member)?, &z, &w)?]
            }
            SuiteId::KobTangent => {
                let z = draw(rng, &mut inputs);
                let u = record(random_unit(rng, z.dim()), &mut inputs);
                vec![kob_tangent(holo(member)?, &z, &u)?]
            }
            SuiteId::BallToProduct => {
                let (a, u) = if index % 10 == 0 {
                    (ComplexVector::zeros(2), ComplexVector::basis(2, (index / 10 % 2) as usize))
                } else {
                    let a = point(&source, rng);
                    (a, random_unit(rng, 2))
                };
                let a = record(a, &mut inputs);
                let u = record(u, &mut inputs);
                vec![ball_to_product(holo(member)?, &a, &u)?]
            }
            SuiteId::Pluriharmonic => {
                // along a coordinate axis through the origin the coordinate charts are extremal
                let (z, w) = if index % 10 == 0 {
                    let x = rng.random_range(-0.99..0.99);
                    (ComplexVector::zeros(2), ComplexVector::real(&[x, 0.0]))
                } else {
                    (point(&source, rng), point(&source, rng))
                };
                let z = record(z, &mut inputs);
                let w = record(w, &mut inputs);
                vec![pluriharmonic(harmonic(member)?, &z, &w)?]
            }
            SuiteId::InvariantGradient => {
                let a = draw(rng, &mut inputs);
                invariant_gradient_sandwich(holo(member)?, &a)?
            }
            SuiteId::DyakBloch => {
                let a = if index % 5 == 0 {
                    record(ComplexVector::zeros(source.dim()), &mut inputs)
                } else {
                    draw(rng, &mut inputs)
                };
                let u = record(random_unit(rng, a.dim()), &mut inputs);
                dyak_bloch(holo(member)?, &a, &u)?
            }
            SuiteId::Dyakonov => {
                let a = draw(rng, &mut inputs);
                vec![dyakonov(holo(member)?, &a)?]
            }
            SuiteId::Ahlfors => {
                let z = draw(rng, &mut inputs);
                vec![ahlfors(holo(member)?, &z)?]
            }
        };
        Ok((inputs, checks))
    }
}

/// Every hundredth kavu-distance sample uses the punctured disk, whose distance comes from the oracle.
const PUNCTURED_EVERY: u64 = 100;

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

fn point(space: &Space, rng: &mut ChaCha8Rng) -> ComplexVector {
    random_point(space, rng, SAMPLING_MARGIN)
}

fn real_disk_point(rng: &mut ChaCha8Rng) -> ComplexVector {
    let r = 1.0 - SAMPLING_MARGIN;
    ComplexVector::real(&[rng.random_range(-r..r)])
}

fn holo(member: &FamilyMember) -> Result<&HoloMap> {
    member
        .map
        .holo()
        .ok_or_else(|| Error::InvalidDomain(format!("{} is not holomorphic", member.kind)))
}

fn harmonic(member: &FamilyMember) -> Result<&HarmonicMap> {
    member
        .map
        .harmonic()
        .ok_or_else(|| Error::InvalidDomain(format!("{} is not harmonic", member.kind)))
}

fn planar_target(space: &Space) -> Result<PlanarDomain> {
    match space {
        Space::Planar(d) => Ok(*d),
        other => Err(Error::InvalidDomain(format!("expected a planar domain, got {other}"))),
    }
}

fn one_minus_sq(z: &ComplexVector) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

fn apply(j: &CMatrix, u: &ComplexVector) -> ComplexVector {
    ComplexVector::from_column(&(j * u.to_column()))
}

/// Finsler comparison `image <= source` as the ratio `image / source <= 1`.
///
/// Norms reach `1e3` at the sampling margin, where the image norm is only
/// known to about `1e-10` relative, so the slack is measured on the ratio.
fn finsler_ratio(image: f64, source: f64) -> Check {
    Check::new("finsler", image / source, 1.0)
}

/// Derivative and pseudo-hyperbolic contraction for a disk self-map.
pub fn schwarz_pick(f: &HoloMap, z: &ComplexVector, w: &ComplexVector) -> Result<Vec<Check>> {
    let (fz, j) = f.eval_jacobian(z)?;
    let fw = f.eval(w)?;
    let disk = PlanarDomain::Disk;
    Ok(vec![
        Check::new("derivative", one_minus_sq(z) * j[(0, 0)].norm(), one_minus_sq(&fz)),
        Check::new(
            "pseudo_hyperbolic",
            planar::pseudo_hyperbolic(&disk, fz[0], fw[0])?,
            planar::pseudo_hyperbolic(&disk, z[0], w[0])?,
        ),
    ])
}

fn real_value_and_gradient(u: &HarmonicMap, z: &ComplexVector) -> Result<(f64, f64)> {
    Ok((u.real_values(z)?[0], u.gradient_norm(z)?))
}

/// Gradient bound for harmonic maps into `(-1,1)`, strip form.
pub fn kv_strip(u: &HarmonicMap, z: &ComplexVector) -> Result<Check> {
    let (v, g) = real_value_and_gradient(u, z)?;
    Ok(Check::new("gradient", one_minus_sq(z) * g, 4.0 / PI * (PI * v / 2.0).cos()))
}

/// Gradient bound for harmonic maps into `(-1,1)`, disk form.
pub fn kv_disk(u: &HarmonicMap, z: &ComplexVector) -> Result<Check> {
    let (v, g) = real_value_and_gradient(u, z)?;
    Ok(Check::new("gradient", one_minus_sq(z) * g, 4.0 / PI * (1.0 - v * v)))
}

/// Hyperbolic distance of `G` in `Hyp` normalization; the punctured disk goes through the oracle.
fn source_hyp_distance(source: &Space, z1: &ComplexVector, z2: &ComplexVector) -> Result<f64> {
    let kob = match source.closed_form_distance(z1, z2) {
        Some(d) => d?,
        None => path_oracle(source, z1, z2)?.length,
    };
    Ok(Normalization::Hyp.from_kob() * kob)
}

/// `Hyp_D(u z1, u z2) <= (4/pi) Hyp_G(z1, z2)` for real harmonic `u: G -> (-1,1)`.
pub fn kavu_distance(u: &HarmonicMap, z1: &ComplexVector, z2: &ComplexVector) -> Result<Check> {
    let v1 = u.real_values(z1)?[0];
    let v2 = u.real_values(z2)?[0];
    let lhs = planar::hyp_distance(&PlanarDomain::Disk, C64::new(v1, 0.0), C64::new(v2, 0.0), Normalization::Hyp)?;
    let rhs = 4.0 / PI * source_hyp_distance(&u.analytic.source, z1, z2)?;
    Ok(Check::new("distance", lhs, rhs))
}

/// Angle form, real-part form and real-part distance contraction for complex harmonic maps into a strip.
pub fn har_angle(f: &HarmonicMap, z1: &ComplexVector, z2: &ComplexVector, h: &ComplexVector) -> Result<Vec<Check>> {
    let strip = planar_target(&f.analytic.target)?;
    let fz = f.eval(z1)?[0];
    // the strip density only sees the real part
    let rho = planar::density(&strip, C64::new(fz.re, 0.0))?.hyp;
    let du = f.differential(z1, h)?[0];
    let j = f.real_jacobian(z1)?;
    let grad = j[(0, 0)].hypot(j[(0, 1)]);
    let w = one_minus_sq(z1);
    let u2 = f.eval(z2)?[0].re;
    Ok(vec![
        Check::new("angle", du.abs() * rho * w, 2.0),
        Check::new("real_part", grad * rho * w, 2.0),
        Check::new(
            "real_distance",
            planar::hyp_distance(&strip, C64::new(fz.re, 0.0), C64::new(u2, 0.0), Normalization::Hyp)?,
            planar::hyp_distance(&PlanarDomain::Disk, z1[0], z2[0], Normalization::Hyp)?,
        ),
    ])
}

/// `|u(z)| <= (4/pi) arctan |z|` when `u(0) = 0`.
pub fn re_growth(u: &HarmonicMap, z: &ComplexVector) -> Result<Check> {
    let v = u.real_values(z)?[0];
    Ok(Check::new("growth", v.abs(), sharp_growth(z.norm())))
}

/// Schwarz lemma for `phi_{f(0)} o f`, and its invariant two-point form.
pub fn ball_schwarz_origin(f: &HoloMap, a: &ComplexVector, b: &ComplexVector) -> Result<Vec<Check>> {
    let n = a.dim();
    let center = BallPoint::new(f.eval(&ComplexVector::zeros(n))?)?;
    let fa = f.eval(a)?;
    let fb = f.eval(b)?;
    let recentered = ball::mobius_apply(&center, &fa)?;
    let image = ball::mobius_apply(&BallPoint::new(fa)?, &fb)?;
    let pre = ball::mobius_apply(&BallPoint::new(a.clone())?, b)?;
    Ok(vec![
        Check::new("origin", recentered.norm(), a.norm()),
        Check::new("pseudo_hyperbolic", image.norm(), pre.norm()),
    ])
}

/// `M(f a, u_*)|u_*| <= M(a,u)|u|` with `u_* = f'(a) u`.
pub fn ball_distortion(f: &HoloMap, a: &ComplexVector, u: &ComplexVector) -> Result<Check> {
    let (fa, j) = f.eval_jacobian(a)?;
    let lhs = ball::kob_norm_ball(&BallPoint::new(fa)?, &apply(&j, u))?.value;
    let rhs = ball::kob_norm_ball(&BallPoint::new(a.clone())?, u)?.value;
    Ok(finsler_ratio(lhs, rhs))
}

/// `(1-|a|^2) |f'(a)| <= sqrt(1-|f(a)|^2)` with the operator norm.
pub fn ball_kalaj(f: &HoloMap, a: &ComplexVector) -> Result<Check> {
    let (fa, j) = f.eval_jacobian(a)?;
    let norm = operator_norm(&j)?.value;
    Ok(Check::new("derivative", one_minus_sq(a) * norm, one_minus_sq(&fa).sqrt()))
}

fn closed_form(space: &Space, z: &ComplexVector, w: &ComplexVector) -> Result<f64> {
    space
        .closed_form_distance(z, w)
        .unwrap_or_else(|| Err(Error::InvalidDomain(format!("no closed-form distance on {space}"))))
}

/// `Kob(fz, fw) <= Kob(z, w)` through closed-form distances.
pub fn kob_contraction(f: &HoloMap, z: &ComplexVector, w: &ComplexVector) -> Result<Check> {
    let lhs = closed_form(&f.target, &f.eval(z)?, &f.eval(w)?)?;
    Ok(Check::new("distance", lhs, closed_form(&f.source, z, w)?))
}

/// `k(fz, f'(z)u) <= k(z, u)`.
pub fn kob_tangent(f: &HoloMap, z: &ComplexVector, u: &ComplexVector) -> Result<Check> {
    let (fz, j) = f.eval_jacobian(z)?;
    let lhs = f.target.finsler(&fz, &apply(&j, u))?;
    Ok(finsler_ratio(lhs, f.source.finsler(z, u)?))
}

/// Product Finsler norm of the image against the ball norm.
pub fn ball_to_product(f: &HoloMap, a: &ComplexVector, u: &ComplexVector) -> Result<Check> {
    let omega = match &f.target {
        Space::Product(p) => p,
        other => return Err(Error::InvalidDomain(format!("expected a product target, got {other}"))),
    };
    let (fa, j) = f.eval_jacobian(a)?;
    let lhs = product::finsler_product(omega, &fa, &apply(&j, u), ProductNormalization::Kobayashi)?.value;
    let rhs = ball::kob_norm_ball(&BallPoint::new(a.clone())?, u)?.value;
    Ok(finsler_ratio(lhs, rhs))
}

/// `Kob_{S0^2}(Re F z, Re F w) <= Kob_B2(z, w)`.
pub fn pluriharmonic(u: &HarmonicMap, z: &ComplexVector, w: &ComplexVector) -> Result<Check> {
    let omega = ProductDomain::square(PlanarDomain::strip0());
    let uz = ComplexVector::real(&u.real_values(z)?);
    let uw = ComplexVector::real(&u.real_values(w)?);
    let lhs = product::kob_dist_product(&omega, &uz, &uw, Normalization::Kob)?;
    let rhs = ball::kob_dist_ball(&BallPoint::new(z.clone())?, &BallPoint::new(w.clone())?, Normalization::Kob)?;
    Ok(Check::new("distance", lhs, rhs))
}

/// `s^2 |Df| <= |D~f| <= s |Df|` for scalar `f` on the ball.
pub fn invariant_gradient_sandwich(f: &HoloMap, a: &ComplexVector) -> Result<Vec<Check>> {
    let p = BallPoint::new(a.clone())?;
    let df = ball::gradient_d(f, &p)?.norm();
    let dt = ball::invariant_gradient(f, &p)?.norm();
    let s = p.s();
    Ok(vec![Check::new("lower", s * s * df, dt), Check::new("upper", dt, s * df)])
}

/// Ball-to-planar bounds in Kobayashi normalization: tangent form, (i) and (ii).
pub fn dyak_bloch(f: &HoloMap, a: &ComplexVector, u: &ComplexVector) -> Result<Vec<Check>> {
    let target = planar_target(&f.target)?;
    let p = BallPoint::new(a.clone())?;
    let (fa, j) = f.eval_jacobian(a)?;
    let k = planar::density(&target, fa[0])?.kob;
    let du = apply(&j, u)[0].norm();
    let df = ball::gradient_d(f, &p)?.norm();
    let dt = ball::invariant_gradient(f, &p)?.norm();
    let s2 = p.s() * p.s();
    Ok(vec![
        Check {
            label: "tangent".into(),
            ..finsler_ratio(k * du, ball::kob_norm_ball(&p, u)?.value)
        },
        Check::new("derivative", k * df * s2, 1.0),
        Check::new("invariant_gradient", k * dt, 1.0),
    ])
}

/// `(1-|a|^2)|f'(a)| <= 2|b| ln(1/|b|)` for maps into the punctured disk.
pub fn dyakonov(f: &HoloMap, a: &ComplexVector) -> Result<Check> {
    let (fa, j) = f.eval_jacobian(a)?;
    let r = fa[0].norm();
    Ok(Check::new("derivative", one_minus_sq(a) * operator_norm(&j)?.value, -2.0 * r * r.ln()))
}

/// `Hyp_G(fz)|f'(z)|(1-|z|^2) <= 2` for `f` from the disk into `G`.
pub fn ahlfors(f: &HoloMap, z: &ComplexVector) -> Result<Check> {
    let target = planar_target(&f.target)?;
    let (fz, j) = f.eval_jacobian(z)?;
    let rho = planar::density(&target, fz[0])?.hyp;
    Ok(Check::new("density", rho * j[(0, 0)].norm() * one_minus_sq(z), 2.0))
}
