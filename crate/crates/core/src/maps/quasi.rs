use std::f64::consts::TAU;

use crate::geometry::{ComplexVector, C64};
use crate::planar::{chart_from_disk, PlanarDomain};
use crate::space::Space;

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

fn halton_point(index: u64, dims: usize) -> Vec<f64> {
    (0..dims).map(|d| halton(index, PRIMES[d])).collect()
}

fn disk_from_unit_square(u: f64, v: f64, radius: f64) -> C64 {
    C64::from_polar(radius * u.sqrt(), TAU * v)
}

fn planar_from_square(d: &PlanarDomain, u: f64, v: f64, margin: f64) -> Option<C64> {
    match d {
        PlanarDomain::Disk => Some(disk_from_unit_square(u, v, 1.0 - margin)),
        PlanarDomain::PuncturedDisk => Some(C64::from_polar(margin + (1.0 - 2.0 * margin) * u.sqrt(), TAU * v)),
        other => {
            let w = disk_from_unit_square(u, v, 1.0 - margin);
            let z = chart_from_disk(other).ok()?.eval(&ComplexVector::scalar(w)).ok()?[0];
            (other.margin(z) >= margin).then_some(z)
        }
    }
}

/// `count` low-discrepancy points of `space`, each at boundary margin at least `margin`.
pub fn quasi_points(space: &Space, count: usize, margin: f64) -> Vec<ComplexVector> {
    let n = space.dim();
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let h = halton_point(index, 2 * n);
        index += 1;
        let candidate = match space {
            Space::Whole(_) => Some(ComplexVector::from_real(&h.iter().map(|x| 4.0 * x - 2.0).collect::<Vec<_>>())),
            Space::Ball(_) => {
                let z = ComplexVector::from_real(&h.iter().map(|x| 2.0 * x - 1.0).collect::<Vec<_>>());
                (z.norm() <= 1.0 - margin).then_some(z)
            }
            Space::Polydisk(_) => Some(ComplexVector::new(
                h.chunks(2).map(|p| disk_from_unit_square(p[0], p[1], 1.0 - margin)).collect(),
            )),
            Space::Planar(d) => planar_from_square(d, h[0], h[1], margin).map(ComplexVector::scalar),
            Space::Product(p) => p
                .factors
                .iter()
                .zip(h.chunks(2))
                .map(|(d, uv)| planar_from_square(d, uv[0], uv[1], margin))
                .collect::<Option<Vec<_>>>()
                .map(ComplexVector::new),
        };
        if let Some(z) = candidate {
            if space.contains(&z) {
                out.push(z);
            }
        }
    }
    out
}
