use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{operator_norm, CMatrix, ComplexVector, C64};
use crate::maps::{Expr, HarmonicMap, HarmonicPart, HoloMap};
use crate::planar::{chart_from_disk, chart_to_disk, PlanarDomain};
use crate::product::ProductDomain;
use crate::space::Space;

/// Families of maps the verifier draws from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyKind {
    DiskToDisk,
    /// Holomorphic maps of the disk into `S_0 = {|Re w| < 1}`.
    DiskToStrip,
    DiskToPlanar { target: PlanarDomain },
    BallToBall { n: usize, m: usize },
    BallToPlanar { n: usize, target: PlanarDomain },
    BallToPuncturedDisk { n: usize },
    Ball2ToProduct { target: ProductDomain },
    PolydiskToPolydisk { n: usize },
    /// `Re F` for analytic `F` from the disk into `S_0` with `Re F(0) = 0`.
    HarmonicDiskToInterval,
    /// Complex harmonic maps of the disk into a strip `S(a,b)`.
    HarmonicDiskToStrip { target: PlanarDomain },
    /// Real harmonic maps of a planar domain into `(-1,1)`.
    HarmonicPlanarToInterval { source: PlanarDomain },
    /// `Re (F_1, F_2)` from `B_2` into `(-1,1)^2`.
    PluriharmonicBall2ToIntervalSq,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::DiskToDisk => write!(f, "disk-to-disk"),
            FamilyKind::DiskToStrip => write!(f, "disk-to-strip"),
            FamilyKind::DiskToPlanar { target } => write!(f, "disk-to-{target}"),
            FamilyKind::BallToBall { n, m } => write!(f, "ball{n}-to-ball{m}"),
            FamilyKind::BallToPlanar { n, target } => write!(f, "ball{n}-to-{target}"),
            FamilyKind::BallToPuncturedDisk { n } => write!(f, "ball{n}-to-punctured"),
            FamilyKind::Ball2ToProduct { target } => write!(f, "ball2-to-{}", Space::Product(target.clone())),
            FamilyKind::PolydiskToPolydisk { n } => write!(f, "polydisk{n}-to-polydisk{n}"),
            FamilyKind::HarmonicDiskToInterval => write!(f, "harmonic-disk-to-interval"),
            FamilyKind::HarmonicDiskToStrip { target } => write!(f, "harmonic-disk-to-{target}"),
            FamilyKind::HarmonicPlanarToInterval { source } => write!(f, "harmonic-{source}-to-interval"),
            FamilyKind::PluriharmonicBall2ToIntervalSq => write!(f, "pluriharmonic-ball2-to-interval2"),
        }
    }
}

/// Why a member is in its family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberRole {
    /// Biholomorphism onto the target, or an isometric embedding.
    Chart,
    Automorphism,
    Contraction,
    /// Automorphism-like member with parameters at boundary margin `1e-3`.
    Stress,
    Constant,
    /// The extremal map of a sharp inequality.
    Sharp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MemberMap {
    Holo(HoloMap),
    Harmonic(HarmonicMap),
}

impl MemberMap {
    pub fn source(&self) -> &Space {
        match self {
            MemberMap::Holo(f) => &f.source,
            MemberMap::Harmonic(h) => &h.analytic.source,
        }
    }

    pub fn target(&self) -> &Space {
        match self {
            MemberMap::Holo(f) => &f.target,
            MemberMap::Harmonic(h) => &h.analytic.target,
        }
    }

    pub fn holo(&self) -> Option<&HoloMap> {
        match self {
            MemberMap::Holo(f) => Some(f),
            MemberMap::Harmonic(_) => None,
        }
    }

    pub fn harmonic(&self) -> Option<&HarmonicMap> {
        match self {
            MemberMap::Holo(_) => None,
            MemberMap::Harmonic(h) => Some(h),
        }
    }

    pub fn eval(&self, z: &ComplexVector) -> Result<ComplexVector> {
        match self {
            MemberMap::Holo(f) => f.eval(z),
            MemberMap::Harmonic(h) => h.eval(z),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub kind: FamilyKind,
    pub index: u64,
    pub role: MemberRole,
    pub map: MemberMap,
}

/// Generator for stream `stream` under `seed`; members use even streams.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const STRESS_RADIUS: f64 = 1.0 - 1e-3;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..TAU)
}

fn disk_point(rng: &mut ChaCha8Rng, max_r: f64) -> C64 {
    C64::from_polar(max_r * rng.random::<f64>().sqrt(), angle(rng))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    ComplexVector((0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    loop {
        let v = gaussian_vector(rng, n);
        let r = v.norm();
        if r > 1e-6 {
            return v.scale_real(1.0 / r);
        }
    }
}

/// Point of `B_n` with `|z| <= max_r`, uniform in volume.
pub(crate) fn ball_point(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> ComplexVector {
    let r = max_r * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
    unit_vector(rng, n).scale_real(r)
}

fn mobius(rng: &mut ChaCha8Rng, max_r: f64) -> Expr {
    Expr::DiskMobius {
        center: disk_point(rng, max_r),
        rotation: angle(rng),
    }
}

fn stress_mobius(rng: &mut ChaCha8Rng) -> Expr {
    Expr::DiskMobius {
        center: C64::from_polar(STRESS_RADIUS, angle(rng)),
        rotation: angle(rng),
    }
}

fn blaschke(rng: &mut ChaCha8Rng) -> Expr {
    let k = rng.random_range(1..=3);
    Expr::Blaschke {
        zeros: (0..k).map(|_| disk_point(rng, 0.9)).collect(),
        rotation: angle(rng),
    }
}

fn squeeze(rng: &mut ChaCha8Rng) -> Expr {
    let r = rng.random_range(0.2..0.95);
    let inner = mobius(rng, 0.7);
    mobius(rng, 0.7).after(Expr::scalar_affine(c(r, 0.0), c(0.0, 0.0))).after(inner)
}

fn power(rng: &mut ChaCha8Rng) -> Expr {
    let k = rng.random_range(2..=4);
    let inner = mobius(rng, 0.8);
    mobius(rng, 0.8).after(Expr::Power { k }).after(inner)
}

/// Holomorphic self-map of the disk for slot `slot % 8`.
fn disk_self_map(slot: u64, rng: &mut ChaCha8Rng) -> (Expr, MemberRole) {
    match slot % 8 {
        0 => (Expr::Identity { dim: 1 }, MemberRole::Chart),
        1 => (mobius(rng, 0.9), MemberRole::Automorphism),
        2 => (blaschke(rng), MemberRole::Contraction),
        3 => (stress_mobius(rng), MemberRole::Stress),
        4 => (squeeze(rng), MemberRole::Contraction),
        5 => (power(rng), MemberRole::Contraction),
        6 => (
            Expr::Constant {
                dim_in: 1,
                value: vec![disk_point(rng, 0.9)],
            },
            MemberRole::Constant,
        ),
        _ => {
            let inner = squeeze(rng);
            (blaschke(rng).after(inner), MemberRole::Contraction)
        }
    }
}

fn inner_with(c: &ComplexVector) -> Expr {
    Expr::InnerWith { c: c.0.clone() }
}

/// Holomorphic map `B_n -> D` for slot `slot % 8`.
fn ball_to_disk(slot: u64, n: usize, rng: &mut ChaCha8Rng) -> (Expr, MemberRole) {
    match slot % 8 {
        0 => (inner_with(&unit_vector(rng, n)), MemberRole::Chart),
        1 => {
            let a = ball_point(rng, n, 0.9);
            let line = inner_with(&unit_vector(rng, n)).after(Expr::BallMobius { center: a.0 });
            (mobius(rng, 0.9).after(line), MemberRole::Chart)
        }
        2 => {
            let c = unit_vector(rng, n).scale_real(rng.random_range(0.3..1.0));
            (blaschke(rng).after(inner_with(&c)), MemberRole::Contraction)
        }
        3 => {
            let a = ball_point(rng, n, 0.9);
            let line = inner_with(&unit_vector(rng, n)).after(Expr::BallMobius { center: a.0 });
            (stress_mobius(rng).after(line), MemberRole::Stress)
        }
        4 => {
            let prod = Expr::Mul {
                factors: vec![inner_with(&unit_vector(rng, n)), inner_with(&unit_vector(rng, n))],
            };
            (squeeze(rng).after(prod), MemberRole::Contraction)
        }
        5 => (power(rng).after(inner_with(&unit_vector(rng, n))), MemberRole::Contraction),
        6 => (
            Expr::Constant {
                dim_in: n,
                value: vec![disk_point(rng, 0.9)],
            },
            MemberRole::Constant,
        ),
        _ => {
            // |2 z_j z_k| <= |z_j|^2 + |z_k|^2 < 1
            let (j, k) = if n == 1 { (0, 0) } else { (0, 1) };
            let prod = Expr::scalar_affine(c(if n == 1 { 1.0 } else { 2.0 }, 0.0), c(0.0, 0.0)).after(Expr::Mul {
                factors: vec![Expr::Project { index: j }, Expr::Project { index: k }],
            });
            (blaschke(rng).after(prod), MemberRole::Contraction)
        }
    }
}

/// `m x n` matrix with orthonormal columns (`m >= n`) or rows (`m < n`).
fn partial_isometry(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMatrix {
    let g = |rng: &mut ChaCha8Rng, r: usize, k: usize| {
        CMatrix::from_fn(r, k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    };
    if m >= n {
        g(rng, m, n).qr().q()
    } else {
        g(rng, n, m).qr().q().adjoint()
    }
}

/// `m x n` matrix of operator norm `r`.
fn scaled_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, r: f64) -> CMatrix {
    loop {
        let a = CMatrix::from_fn(m, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        let norm = operator_norm(&a).map(|o| o.value).unwrap_or(0.0);
        if norm > 1e-6 {
            return a * c(r / norm, 0.0);
        }
    }
}

fn ball_mobius(center: ComplexVector) -> Expr {
    Expr::BallMobius { center: center.0 }
}

/// Holomorphic map `B_n -> B_m` for slot `slot % 8`.
fn ball_to_ball(slot: u64, n: usize, m: usize, rng: &mut ChaCha8Rng) -> (Expr, MemberRole) {
    match slot % 8 {
        0 => {
            if n == m {
                (Expr::Identity { dim: n }, MemberRole::Chart)
            } else {
                (Expr::linear(&partial_isometry(rng, m, n)), MemberRole::Chart)
            }
        }
        1 | 3 => {
            let a = ball_point(rng, n, 0.9);
            let u = partial_isometry(rng, m, n);
            let b = if slot % 8 == 3 {
                unit_vector(rng, m).scale_real(STRESS_RADIUS)
            } else {
                ball_point(rng, m, 0.9)
            };
            let role = match (slot % 8, n == m) {
                (3, _) => MemberRole::Stress,
                (_, true) => MemberRole::Automorphism,
                _ => MemberRole::Chart,
            };
            (ball_mobius(b).after(Expr::linear(&u)).after(ball_mobius(a)), role)
        }
        2 | 7 => {
            let a = ball_point(rng, n, 0.8);
            let r = if slot % 8 == 7 { 1.0 } else { rng.random_range(0.3..1.0) };
            let l = scaled_matrix(rng, m, n, r);
            let b = ball_point(rng, m, 0.8);
            (ball_mobius(b).after(Expr::linear(&l)).after(ball_mobius(a)), MemberRole::Contraction)
        }
        4 => {
            // z -> L (z h(z)) with |h| < 1
            let (h, _) = ball_to_disk(2 + 2 * rng.random_range(0..2u64), n, rng);
            let scaled = Expr::Tuple {
                parts: (0..n)
                    .map(|k| Expr::Mul {
                        factors: vec![Expr::Project { index: k }, h.clone()],
                    })
                    .collect(),
            };
            let l = scaled_matrix(rng, m, n, 1.0);
            let b = ball_point(rng, m, 0.5);
            (ball_mobius(b).after(Expr::linear(&l)).after(scaled), MemberRole::Contraction)
        }
        5 => {
            // each coordinate a disk-valued map, scaled by 1/sqrt(m)
            let parts = (0..m)
                .map(|_| {
                    let slot = [0u64, 1, 2, 4, 5][rng.random_range(0..5)];
                    let (g, _) = ball_to_disk(slot, n, rng);
                    Expr::scalar_affine(c(1.0 / (m as f64).sqrt(), 0.0), c(0.0, 0.0)).after(g)
                })
                .collect();
            (Expr::Tuple { parts }, MemberRole::Contraction)
        }
        _ => (
            Expr::Constant {
                dim_in: n,
                value: ball_point(rng, m, 0.9).0,
            },
            MemberRole::Constant,
        ),
    }
}

/// Coordinate of a polydisk self-map.
fn polydisk_component(kind: u64, n: usize, rng: &mut ChaCha8Rng) -> Expr {
    let j = rng.random_range(0..n);
    let k = rng.random_range(0..n);
    match kind % 4 {
        0 => blaschke(rng).after(Expr::Project { index: j }),
        1 => squeeze(rng).after(Expr::Mul {
            factors: vec![Expr::Project { index: j }, Expr::Project { index: k }],
        }),
        2 => {
            let mut row = vec![c(0.0, 0.0); n];
            row[j] += c(0.5, 0.0);
            row[k] += C64::from_polar(0.5, angle(rng));
            power(rng).after(Expr::Affine {
                matrix: vec![row],
                offset: vec![c(0.0, 0.0)],
            })
        }
        _ => mobius(rng, 0.9).after(Expr::Project { index: j }),
    }
}

fn polydisk_self_map(slot: u64, n: usize, rng: &mut ChaCha8Rng) -> (Expr, MemberRole) {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    match slot % 8 {
        0 => (Expr::Identity { dim: n }, MemberRole::Chart),
        1 | 3 => {
            let parts = perm
                .iter()
                .map(|&j| {
                    let m = if slot % 8 == 3 { stress_mobius(rng) } else { mobius(rng, 0.9) };
                    m.after(Expr::Project { index: j })
                })
                .collect();
            let role = if slot % 8 == 3 { MemberRole::Stress } else { MemberRole::Automorphism };
            (Expr::Tuple { parts }, role)
        }
        6 => (
            Expr::Constant {
                dim_in: n,
                value: (0..n).map(|_| disk_point(rng, 0.9)).collect(),
            },
            MemberRole::Constant,
        ),
        s => {
            let parts = (0..n)
                .map(|_| {
                    let kind = if s == 7 { rng.random_range(0..4) } else { s - 2 };
                    polydisk_component(kind, n, rng)
                })
                .collect();
            (Expr::Tuple { parts }, MemberRole::Contraction)
        }
    }
}

/// Biholomorphism of the disk onto a simply connected `target`, followed
/// by `inner`.
///
/// For the punctured disk the chart slot uses the covering
/// `w -> exp(-c (1+w)/(1-w) + i theta)` with `c <= 0.3`, so that no source
/// point at margin `1e-3` underflows to `0`; every other slot first squeezes
/// the disk to radius at most `0.95`, and is then a strict contraction.
fn disk_onto(target: &PlanarDomain, slot: u64, inner: (Expr, MemberRole), rng: &mut ChaCha8Rng) -> (Expr, MemberRole) {
    let (g, role) = inner;
    match target {
        PlanarDomain::PuncturedDisk => {
            let (scale, squeeze, role) = if slot == 0 {
                (rng.random_range(0.05..0.3), 1.0, role)
            } else {
                let role = match role {
                    MemberRole::Constant => role,
                    _ => MemberRole::Contraction,
                };
                (rng.random_range(0.1..0.7), rng.random_range(0.5..0.95), role)
            };
            let cover = Expr::Exp
                .after(Expr::scalar_affine(c(-scale, 0.0), c(0.0, angle(rng))))
                .after(Expr::Cayley);
            let g = if squeeze < 1.0 {
                Expr::scalar_affine(c(squeeze, 0.0), c(0.0, 0.0)).after(g)
            } else {
                g
            };
            (cover.after(g), role)
        }
        other => (chart_from_disk(other).expect("simply connected").expr.after(g), role),
    }
}

fn sharp_chart() -> Expr {
    chart_from_disk(&PlanarDomain::strip0()).expect("strip chart").expr
}

/// `phi_{g(0)} o g`, so that the result fixes the origin.
fn centered(g: Expr) -> Expr {
    let g0 = g
        .eval_jacobian(&ComplexVector::scalar(c(0.0, 0.0)))
        .map(|(v, _)| v[0])
        .unwrap_or(c(0.0, 0.0));
    Expr::DiskMobius { center: g0, rotation: 0.0 }.after(g)
}

fn disk() -> Space {
    Space::Planar(PlanarDomain::Disk)
}

fn holo(expr: Expr, source: Space, target: Space) -> MemberMap {
    MemberMap::Holo(HoloMap::new(expr, source, target))
}

/// The `index`-th member of a family under `seed`.
pub fn sample_member(kind: &FamilyKind, seed: u64, index: u64) -> FamilyMember {
    let mut rng = sample_rng(seed, 2 * index);
    let rng = &mut rng;
    let slot = index % 8;
    let (role, map) = match kind {
        FamilyKind::DiskToDisk => {
            let (g, role) = disk_self_map(slot, rng);
            (role, holo(g, disk(), disk()))
        }
        FamilyKind::DiskToStrip => {
            let (g, role) = disk_self_map(slot, rng);
            let role = if slot == 0 { MemberRole::Sharp } else { role };
            let target = PlanarDomain::strip0();
            (role, holo(sharp_chart().after(g), disk(), Space::Planar(target)))
        }
        FamilyKind::DiskToPlanar { target } => {
            let (f, role) = disk_onto(target, slot, disk_self_map(slot, rng), rng);
            (role, holo(f, disk(), Space::Planar(*target)))
        }
        FamilyKind::BallToBall { n, m } => {
            let (g, role) = ball_to_ball(slot, *n, *m, rng);
            (role, holo(g, Space::Ball(*n), Space::Ball(*m)))
        }
        FamilyKind::BallToPlanar { n, target } => {
            let (f, role) = disk_onto(target, slot, ball_to_disk(slot, *n, rng), rng);
            (role, holo(f, Space::Ball(*n), Space::Planar(*target)))
        }
        FamilyKind::BallToPuncturedDisk { n } => {
            let (f, role) = disk_onto(&PlanarDomain::PuncturedDisk, slot, ball_to_disk(slot, *n, rng), rng);
            (role, holo(f, Space::Ball(*n), Space::Planar(PlanarDomain::PuncturedDisk)))
        }
        FamilyKind::Ball2ToProduct { target } => {
            let mut role = MemberRole::Contraction;
            let parts = target
                .factors
                .iter()
                .enumerate()
                .map(|(k, d)| {
                    let inner = if slot == 0 {
                        (Expr::Project { index: k }, MemberRole::Chart)
                    } else {
                        ball_to_disk(slot, 2, rng)
                    };
                    let (f, r) = disk_onto(d, slot, inner, rng);
                    role = r;
                    f
                })
                .collect();
            (role, holo(Expr::Tuple { parts }, Space::Ball(2), Space::Product(target.clone())))
        }
        FamilyKind::PolydiskToPolydisk { n } => {
            let (g, role) = polydisk_self_map(slot, *n, rng);
            (role, holo(g, Space::Polydisk(*n), Space::Polydisk(*n)))
        }
        FamilyKind::HarmonicDiskToInterval => {
            let (g, role) = disk_self_map(slot, rng);
            let s = if slot == 0 { 0.0 } else { rng.random_range(-0.9..0.9) };
            // DiskMobius{center: -i s} sends 0 to i s, which the chart sends to the imaginary axis
            let lift = Expr::DiskMobius {
                center: c(0.0, -s),
                rotation: 0.0,
            };
            let f = sharp_chart().after(lift).after(centered(g));
            let role = if slot == 0 { MemberRole::Sharp } else { role };
            let analytic = HoloMap::new(f, disk(), Space::Planar(PlanarDomain::strip0()));
            (role, MemberMap::Harmonic(HarmonicMap::real_part(analytic)))
        }
        FamilyKind::HarmonicDiskToStrip { target } => {
            let (f, role) = disk_onto(target, slot, disk_self_map(slot, rng), rng);
            let scale = if slot == 0 { 4.0 } else { rng.random_range(-5.0..5.0) };
            let part = if slot % 2 == 0 {
                HarmonicPart::RealPlusScaledImag { scale }
            } else {
                HarmonicPart::RealPlusScaledInputImag { scale }
            };
            let role = if slot == 0 { MemberRole::Sharp } else { role };
            let analytic = HoloMap::new(f, disk(), Space::Planar(*target));
            (role, MemberMap::Harmonic(HarmonicMap::new(analytic, part)))
        }
        FamilyKind::HarmonicPlanarToInterval { source } => {
            let (g, role) = disk_self_map(slot, rng);
            let mut f = sharp_chart().after(g);
            if source.is_simply_connected() {
                f = f.after(chart_to_disk(source).expect("simply connected").expr);
            }
            let analytic = HoloMap::new(f, Space::Planar(*source), Space::Planar(PlanarDomain::strip0()));
            (role, MemberMap::Harmonic(HarmonicMap::real_part(analytic)))
        }
        FamilyKind::PluriharmonicBall2ToIntervalSq => {
            let mut role = MemberRole::Contraction;
            let parts = (0..2)
                .map(|k| {
                    let (g, r) = if slot == 0 {
                        (Expr::Project { index: k }, MemberRole::Chart)
                    } else {
                        ball_to_disk(slot, 2, rng)
                    };
                    role = r;
                    sharp_chart().after(g)
                })
                .collect();
            let target = Space::Product(ProductDomain::square(PlanarDomain::strip0()));
            let analytic = HoloMap::new(Expr::Tuple { parts }, Space::Ball(2), target);
            (role, MemberMap::Harmonic(HarmonicMap::real_part(analytic)))
        }
    };
    FamilyMember {
        kind: kind.clone(),
        index,
        role,
        map,
    }
}

/// `count` members of `kind`, deterministic in `seed`.
pub fn sample_family(kind: &FamilyKind, seed: u64, count: usize) -> Vec<FamilyMember> {
    (0..count as u64).map(|i| sample_member(kind, seed, i)).collect()
}

/// Random point of `space` at boundary margin at least `margin`.
///
/// One draw in ten lands in the shell of width `margin` next to that bound.
pub fn random_point(space: &Space, rng: &mut ChaCha8Rng, margin: f64) -> ComplexVector {
    let shell = rng.random::<f64>() < 0.1;
    let radius = |rng: &mut ChaCha8Rng, n: usize| {
        if shell {
            1.0 - margin * (1.0 + rng.random::<f64>())
        } else {
            (1.0 - margin) * rng.random::<f64>().powf(1.0 / (2 * n) as f64)
        }
    };
    match space {
        Space::Whole(n) => gaussian_vector(rng, *n),
        Space::Ball(n) => {
            let r = radius(rng, *n);
            unit_vector(rng, *n).scale_real(r)
        }
        Space::Polydisk(n) => ComplexVector((0..*n).map(|_| C64::from_polar(radius(rng, 1), angle(rng))).collect()),
        Space::Planar(d) => ComplexVector::scalar(planar_point(d, rng, margin)),
        Space::Product(p) => ComplexVector(p.factors.iter().map(|d| planar_point(d, rng, margin)).collect()),
    }
}

fn planar_point(d: &PlanarDomain, rng: &mut ChaCha8Rng, margin: f64) -> C64 {
    match d {
        PlanarDomain::Disk => C64::from_polar((1.0 - margin) * rng.random::<f64>().sqrt(), angle(rng)),
        PlanarDomain::PuncturedDisk => C64::from_polar(rng.random_range(margin..1.0 - margin), angle(rng)),
        other => {
            let chart = chart_from_disk(other).expect("simply connected");
            loop {
                let w = C64::from_polar(0.995 * rng.random::<f64>().sqrt(), angle(rng));
                if let Ok(z) = chart.eval(&ComplexVector::scalar(w)) {
                    if other.margin(z[0]) >= margin {
                        return z[0];
                    }
                }
            }
        }
    }
}

/// Unit tangent vector of dimension `n`, uniform on the sphere.
pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    unit_vector(rng, n)
}

/// `(4/pi) arctan r`, the sharp bound for the real part.
pub fn sharp_growth(r: f64) -> f64 {
    4.0 / PI * r.atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::quasi_points;

    fn kinds() -> Vec<FamilyKind> {
        let strip = PlanarDomain::strip(-2.0, 3.0).unwrap();
        let ray = PlanarDomain::Strip { a: 1.0, b: None };
        vec![
            FamilyKind::DiskToDisk,
            FamilyKind::DiskToStrip,
            FamilyKind::DiskToPlanar { target: PlanarDomain::HalfPlane },
            FamilyKind::DiskToPlanar { target: PlanarDomain::PuncturedDisk },
            FamilyKind::DiskToPlanar { target: ray },
            FamilyKind::BallToBall { n: 2, m: 2 },
            FamilyKind::BallToBall { n: 2, m: 1 },
            FamilyKind::BallToBall { n: 3, m: 2 },
            FamilyKind::BallToBall { n: 2, m: 3 },
            FamilyKind::BallToPlanar { n: 2, target: strip },
            FamilyKind::BallToPlanar { n: 3, target: PlanarDomain::HalfPlane },
            FamilyKind::BallToPuncturedDisk { n: 2 },
            FamilyKind::Ball2ToProduct {
                target: ProductDomain::new(vec![strip, PlanarDomain::HalfPlane]).unwrap(),
            },
            FamilyKind::PolydiskToPolydisk { n: 2 },
            FamilyKind::PolydiskToPolydisk { n: 3 },
            FamilyKind::HarmonicDiskToInterval,
            FamilyKind::HarmonicDiskToStrip { target: strip },
            FamilyKind::HarmonicDiskToStrip { target: ray },
            FamilyKind::HarmonicPlanarToInterval { source: PlanarDomain::HalfPlane },
            FamilyKind::HarmonicPlanarToInterval { source: PlanarDomain::PuncturedDisk },
            FamilyKind::PluriharmonicBall2ToIntervalSq,
        ]
    }

    #[test]
    fn deterministic_members() {
        for k in kinds() {
            assert_eq!(sample_family(&k, 9, 8), sample_family(&k, 9, 8));
            assert_eq!(sample_member(&k, 9, 5), sample_family(&k, 9, 8)[5]);
        }
        assert_ne!(sample_member(&FamilyKind::DiskToDisk, 1, 1), sample_member(&FamilyKind::DiskToDisk, 2, 1));
    }

    #[test]
    fn disk_family_has_identity_and_mobius() {
        for seed in [0, 42, 12345] {
            let fam = sample_family(&FamilyKind::DiskToDisk, seed, 2);
            assert_eq!(fam[0].map.holo().unwrap().expr, Expr::Identity { dim: 1 });
            assert!(matches!(fam[1].map.holo().unwrap().expr, Expr::DiskMobius { .. }));
        }
    }

    #[test]
    fn harmonic_interval_family_contains_sharp_map() {
        let m = sample_member(&FamilyKind::HarmonicDiskToInterval, 3, 0);
        assert_eq!(m.role, MemberRole::Sharp);
        let h = m.map.harmonic().unwrap();
        for r in [0.1, 0.5, 0.9] {
            let v = h.real_values(&ComplexVector::real(&[r])).unwrap()[0];
            assert!((v - sharp_growth(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn range_containment() {
        for k in kinds() {
            for member in sample_family(&k, 42, 16) {
                let source = member.map.source();
                for z in quasi_points(source, 10_000, 1e-3) {
                    let w = member.map.eval(&z).unwrap_or_else(|e| panic!("{k} #{}: {e}", member.index));
                    assert!(member.map.target().contains(&w), "{k} #{} sends {z} to {w}", member.index);
                }
            }
        }
    }

    #[test]
    fn interval_family_fixes_real_part_at_origin() {
        for m in sample_family(&FamilyKind::HarmonicDiskToInterval, 5, 32) {
            let v = m.map.harmonic().unwrap().real_values(&ComplexVector::zeros(1)).unwrap()[0];
            assert!(v.abs() < 1e-12, "#{}: {v}", m.index);
        }
    }

    #[test]
    fn subordination_bound_for_centered_strip_maps() {
        let s0 = PlanarDomain::strip0();
        let to_disk = chart_to_disk(&s0).unwrap().expr;
        let zero = ComplexVector::zeros(1);
        for m in sample_family(&FamilyKind::DiskToStrip, 17, 64) {
            let f = m.map.holo().unwrap();
            let w0 = to_disk.eval_jacobian(&f.eval(&zero).unwrap()).unwrap().0[0];
            let centered = sharp_chart()
                .after(Expr::DiskMobius { center: w0, rotation: 0.0 })
                .after(to_disk.clone())
                .after(f.expr.clone());
            let (v, j) = centered.eval_jacobian(&zero).unwrap();
            assert!(v[0].norm() < 1e-12);
            assert!(j[(0, 0)].norm() <= 4.0 / PI + 1e-10, "#{}", m.index);
        }
    }

    #[test]
    fn random_points_keep_margin() {
        let mut rng = sample_rng(1, 1);
        for space in [Space::Ball(3), Space::Polydisk(2), Space::Planar(PlanarDomain::HalfPlane), Space::Planar(PlanarDomain::PuncturedDisk)] {
            for _ in 0..2000 {
                let z = random_point(&space, &mut rng, 1e-3);
                assert!(space.margin(&z) >= 1e-3 - 1e-12, "{space}: {z}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for k in kinds() {
            let m = sample_member(&k, 4, 4);
            let back: FamilyMember = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(back, m);
        }
    }
}
