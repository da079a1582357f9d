//! Integrated Kobayashi distance by direct minimization over polylines.
//!
//! The length of a polyline is integrated segment by segment with 3-point
//! Gauss-Legendre panels, at least `PANEL_BUDGET` of them over the whole
//! polyline. Coordinate descent minimizes the discrete energy, the sum of
//! squared segment lengths, rather than the length itself: the length is
//! flat under sliding nodes along the path, which stalls the descent, while
//! energy minimizers are polylines with equal segments whose length is
//! minimal as well. The descent is cyclic
//! over the real coordinates of the interior nodes. Each coordinate keeps
//! its own step, doubled after a successful move and halved after a failed
//! one; the sweep stops once every step is below `1e-8`. The solve starts on
//! a coarse polyline and doubles the segment count with the previous
//! solution as warm start, up to the requested count.
//!
//! Segments are always split at their metric midpoint, so nodes crowd
//! toward points near the boundary and each segment carries about the same
//! length; a Euclidean split leaves segments next to such points whose
//! density varies too much for the quadrature, and the optimizer then
//! exploits the underestimate. The reported length is integrated
//! adaptively, so it is the length of an admissible polyline up to
//! `REPORT_TOLERANCE`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ComplexVector, C64};
use crate::planar::{density, PlanarDomain};
use crate::space::Space;

/// Smallest coordinate step before a sweep is considered converged.
pub const STEP_TOLERANCE: f64 = 1e-8;
/// The descent also ends once `STALL_WINDOW` sweeps together lower the
/// energy length by less than `STALL_TOLERANCE` relative.
pub const STALL_TOLERANCE: f64 = 1e-7;
pub const STALL_WINDOW: usize = 10;
pub const DEFAULT_SEGMENTS: usize = 256;
pub const DEFAULT_MAX_ITERS: usize = 500;
const COARSE_SEGMENTS: usize = 8;
/// Relative tolerance of the adaptive quadrature behind reported lengths.
const REPORT_TOLERANCE: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;
/// Quadrature panels per polyline during optimization, so that coarse
/// levels resolve the integrand as well as the finest one.
const PANEL_BUDGET: usize = 64;
/// Largest complex dimension the oracle accepts.
pub const MAX_DIM: usize = 8;

const GL_NODES: [f64; 3] = [0.112_701_665_379_258_3, 0.5, 0.887_298_334_620_741_7];
const GL_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathProblem {
    pub space: Space,
    pub from: ComplexVector,
    pub to: ComplexVector,
    pub segments: usize,
    pub max_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Kobayashi length of the optimized polyline.
    pub length: f64,
    pub converged: bool,
    /// Sweeps spent at the finest level.
    pub sweeps: usize,
    pub segments: usize,
    pub nodes: Vec<ComplexVector>,
}

impl PathProblem {
    pub fn new(space: Space, from: ComplexVector, to: ComplexVector) -> Result<Self> {
        if matches!(space, Space::Whole(_)) {
            return Err(Error::InvalidDomain("C^n carries no Kobayashi metric".into()));
        }
        if space.dim() > MAX_DIM {
            return Err(Error::InvalidDomain(format!("path oracle supports dimension <= {MAX_DIM}")));
        }
        space.check(&from)?;
        space.check(&to)?;
        Ok(Self {
            space,
            from,
            to,
            segments: DEFAULT_SEGMENTS,
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    pub fn with_segments(mut self, segments: usize) -> Result<Self> {
        if segments < 2 {
            return Err(Error::InvalidDomain(format!("need at least 2 segments, got {segments}")));
        }
        self.segments = segments;
        Ok(self)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Coarse-to-fine solve at `self.segments`.
    pub fn solve(&self) -> Result<OracleResult> {
        let mut level = self.segments;
        while level / 2 >= COARSE_SEGMENTS.max(2) && level % 2 == 0 {
            level /= 2;
        }
        let mut solver = Solver::new(self, self.initial_nodes(level));
        let mut result = solver.run(self.max_iters);
        while level < self.segments {
            level *= 2;
            solver = Solver::new(self, subdivide(&solver.metric, &solver.x, self.space.dim()));
            result = solver.run(self.max_iters);
        }
        Ok(result)
    }

    /// Doubles the segment count of `warm` and re-optimizes from it.
    pub fn refine(&self, warm: &OracleResult) -> Result<OracleResult> {
        let x: Vec<f64> = warm.nodes.iter().flat_map(|z| z.to_real()).collect();
        let mut solver = Solver::new(self, subdivide(&Metric::of(&self.space), &x, self.space.dim()));
        Ok(solver.run(self.max_iters))
    }

    /// Straight segment split into pieces of equal length, or a logarithmic
    /// spiral on the punctured disk.
    fn initial_nodes(&self, segments: usize) -> Vec<f64> {
        let d = 2 * self.space.dim();
        let mut x = Vec::with_capacity((segments + 1) * d);
        if matches!(self.space, Space::Planar(PlanarDomain::PuncturedDisk)) {
            let (a, b) = (self.from[0], self.to[0]);
            let mut delta = b.ln() - a.ln();
            if delta.im > std::f64::consts::PI {
                delta.im -= std::f64::consts::TAU;
            } else if delta.im <= -std::f64::consts::PI {
                delta.im += std::f64::consts::TAU;
            }
            for i in 0..=segments {
                let t = i as f64 / segments as f64;
                x.extend(ComplexVector::scalar((a.ln() + delta * t).exp()).to_real());
            }
        } else {
            let metric = Metric::of(&self.space);
            let a = self.from.to_real();
            let v: Vec<f64> = self.to.to_real().iter().zip(&a).map(|(b, a)| b - a).collect();
            x.extend_from_slice(&a);
            for t in split_params(&metric, &a, &v, segments) {
                x.extend(a.iter().zip(&v).map(|(a, v)| a + t * v));
            }
            x.extend(self.to.to_real());
        }
        // endpoints exactly as given
        let last = x.len() - d;
        x[..d].copy_from_slice(&self.from.to_real());
        x[last..].copy_from_slice(&self.to.to_real());
        x
    }
}

/// Splits every segment at its metric midpoint; the polyline itself is unchanged.
fn subdivide(metric: &Metric, x: &[f64], n: usize) -> Vec<f64> {
    let d = 2 * n;
    let nodes = x.len() / d;
    let mut out = Vec::with_capacity((2 * nodes - 1) * d);
    for i in 0..nodes {
        let a = &x[i * d..(i + 1) * d];
        out.extend_from_slice(a);
        if i + 1 < nodes {
            let v: Vec<f64> = x[(i + 1) * d..(i + 2) * d].iter().zip(a).map(|(b, a)| b - a).collect();
            let t = split_params(metric, a, &v, 2)[0];
            out.extend(a.iter().zip(&v).map(|(a, v)| a + t * v));
        }
    }
    out
}

/// Interior parameters `t_1 < ... < t_{parts-1}` cutting the segment
/// `a + t v`, `t in [0, 1]`, into pieces of equal length.
fn split_params(metric: &Metric, a: &[f64], v: &[f64], parts: usize) -> Vec<f64> {
    let total = integrate(metric, a, v, 0.0, 1.0);
    let mut out = Vec::with_capacity(parts.saturating_sub(1));
    let (mut lo_t, mut lo_len) = (0.0, 0.0);
    for k in 1..parts {
        let target = total * k as f64 / parts as f64;
        if !target.is_finite() || total <= 0.0 {
            out.push(k as f64 / parts as f64);
            continue;
        }
        let (mut lo, mut hi) = (lo_t, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if lo_len + integrate(metric, a, v, lo_t, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        lo_len += integrate(metric, a, v, lo_t, t);
        lo_t = t;
        out.push(t);
    }
    out
}

/// Gauss-Legendre length of `a + t v` over `[t0, t1]`.
fn gauss(metric: &Metric, a: &[f64], v: &[f64], t0: f64, t1: f64) -> f64 {
    let mut p = [0.0f64; 2 * MAX_DIM];
    let d = a.len();
    let mut total = 0.0;
    for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let s = t0 + t * (t1 - t0);
        for k in 0..d {
            p[k] = a[k] + s * v[k];
        }
        total += w * metric.norm(&p[..d], v);
    }
    total * (t1 - t0)
}

/// Adaptive Gauss-Legendre length of `a + t v` over `[t0, t1]`.
fn integrate(metric: &Metric, a: &[f64], v: &[f64], t0: f64, t1: f64) -> f64 {
    fn rec(metric: &Metric, a: &[f64], v: &[f64], t0: f64, t1: f64, whole: f64, depth: u32) -> f64 {
        let mid = 0.5 * (t0 + t1);
        let left = gauss(metric, a, v, t0, mid);
        let right = gauss(metric, a, v, mid, t1);
        let both = left + right;
        if !both.is_finite() || depth == 0 || (both - whole).abs() <= REPORT_TOLERANCE * both {
            return both;
        }
        rec(metric, a, v, t0, mid, left, depth - 1) + rec(metric, a, v, mid, t1, right, depth - 1)
    }
    if t1 <= t0 {
        return 0.0;
    }
    rec(metric, a, v, t0, t1, gauss(metric, a, v, t0, t1), MAX_DEPTH)
}

/// Kobayashi-Finsler norm on real coordinates.
#[derive(Clone, Debug)]
enum Metric {
    Ball,
    Factors(Vec<PlanarDomain>),
}

impl Metric {
    fn of(space: &Space) -> Self {
        match space {
            Space::Ball(_) | Space::Whole(_) => Metric::Ball,
            Space::Polydisk(n) => Metric::Factors(vec![PlanarDomain::Disk; *n]),
            Space::Planar(d) => Metric::Factors(vec![*d]),
            Space::Product(p) => Metric::Factors(p.factors.clone()),
        }
    }

    fn norm(&self, p: &[f64], v: &[f64]) -> f64 {
        self.combine(p, v, f64::max, |m| m)
    }

    /// The norm the descent minimizes: on products the factor norms are
    /// combined in `l^2` instead of `l^inf`. Its geodesics are products of
    /// factor geodesics traversed at proportional speeds, which are also
    /// shortest for the max norm, and it has no kinks where factors tie.
    fn smooth_norm(&self, p: &[f64], v: &[f64]) -> f64 {
        self.combine(p, v, |acc, x| acc + x * x, f64::sqrt)
    }

    fn combine(&self, p: &[f64], v: &[f64], fold: impl Fn(f64, f64) -> f64, finish: impl Fn(f64) -> f64) -> f64 {
        match self {
            Metric::Ball => {
                // k^2 = |v|^2 / s^2 + |<v,p>|^2 / s^4
                let mut pp = 0.0;
                let mut vv = 0.0;
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..p.len() / 2 {
                    let (a, b) = (p[2 * k], p[2 * k + 1]);
                    let (x, y) = (v[2 * k], v[2 * k + 1]);
                    pp += a * a + b * b;
                    vv += x * x + y * y;
                    re += x * a + y * b;
                    im += y * a - x * b;
                }
                let s2 = 1.0 - pp;
                if !(s2 > 0.0) {
                    return f64::INFINITY;
                }
                (vv / s2 + (re * re + im * im) / (s2 * s2)).sqrt()
            }
            Metric::Factors(doms) => {
                let mut acc = 0.0f64;
                for (k, d) in doms.iter().enumerate() {
                    let z = C64::new(p[2 * k], p[2 * k + 1]);
                    let rho = match density(d, z) {
                        Ok(r) => r.kob,
                        Err(_) => return f64::INFINITY,
                    };
                    acc = fold(acc, rho * v[2 * k].hypot(v[2 * k + 1]));
                }
                finish(acc)
            }
        }
    }
}

struct Solver<'a> {
    problem: &'a PathProblem,
    metric: Metric,
    dim: usize,
    x: Vec<f64>,
    seg: Vec<f64>,
    step: Vec<f64>,
    /// Gauss-Legendre panels per segment.
    panels: usize,
}

impl<'a> Solver<'a> {
    fn new(problem: &'a PathProblem, x: Vec<f64>) -> Self {
        let dim = 2 * problem.space.dim();
        let nodes = x.len() / dim;
        let segments = nodes - 1;
        // each node starts with a step a quarter of its shorter neighbouring segment
        let seg_len = |i: usize| -> f64 {
            (0..dim).map(|k| (x[(i + 1) * dim + k] - x[i * dim + k]).powi(2)).sum::<f64>().sqrt()
        };
        let mut step = Vec::with_capacity(x.len());
        for node in 0..nodes {
            let near = match (node.checked_sub(1), node < segments) {
                (Some(p), true) => seg_len(p).min(seg_len(node)),
                (Some(p), false) => seg_len(p),
                (None, _) if segments > 0 => seg_len(0),
                _ => 0.0,
            };
            step.extend(std::iter::repeat_n(0.25 * near.max(1e-12), dim));
        }
        let mut s = Self {
            problem,
            metric: Metric::of(&problem.space),
            dim,
            seg: vec![0.0; segments],
            step,
            panels: (PANEL_BUDGET / segments.max(1)).max(1),
            x,
        };
        for i in 0..segments {
            s.seg[i] = s.segment_cost(i, None);
        }
        s
    }

    /// Gauss-Legendre length of segment `i`, optionally with one coordinate replaced.
    fn segment_cost(&self, i: usize, replace: Option<(usize, f64)>) -> f64 {
        let d = self.dim;
        let get = |idx: usize| match replace {
            Some((j, val)) if j == idx => val,
            _ => self.x[idx],
        };
        let mut v = [0.0f64; 2 * MAX_DIM];
        let mut p = [0.0f64; 2 * MAX_DIM];
        for k in 0..d {
            v[k] = get((i + 1) * d + k) - get(i * d + k);
        }
        let mut total = 0.0;
        for panel in 0..self.panels {
            for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let s = (panel as f64 + t) / self.panels as f64;
                for k in 0..d {
                    p[k] = get(i * d + k) + s * v[k];
                }
                let k = self.metric.smooth_norm(&p[..d], &v[..d]);
                if !k.is_finite() {
                    return f64::INFINITY;
                }
                total += w * k;
            }
        }
        total / self.panels as f64
    }

    /// `sqrt(segments * sum seg^2)`: bounds the length from above, with
    /// equality once every segment has the same length.
    fn energy_length(&self) -> f64 {
        (self.seg.len() as f64 * self.seg.iter().map(|s| s * s).sum::<f64>()).sqrt()
    }

    /// Length of the current polyline, integrated adaptively.
    fn accurate_length(&self) -> f64 {
        let d = self.dim;
        (0..self.seg.len())
            .map(|i| {
                let a = &self.x[i * d..(i + 1) * d];
                let v: Vec<f64> = self.x[(i + 1) * d..(i + 2) * d].iter().zip(a).map(|(b, a)| b - a).collect();
                integrate(&self.metric, a, &v, 0.0, 1.0)
            })
            .sum()
    }

    fn run(&mut self, max_iters: usize) -> OracleResult {
        let d = self.dim;
        let nodes = self.x.len() / d;
        let mut sweeps = 0;
        let mut converged = false;
        let mut history = vec![self.energy_length()];
        while sweeps < max_iters {
            sweeps += 1;
            for node in 1..nodes - 1 {
                for k in 0..d {
                    let j = node * d + k;
                    let current = self.seg[node - 1].powi(2) + self.seg[node].powi(2);
                    let h = self.step[j];
                    let mut moved = false;
                    for cand in [self.x[j] + h, self.x[j] - h] {
                        let a = self.segment_cost(node - 1, Some((j, cand)));
                        if !a.is_finite() {
                            continue;
                        }
                        let b = self.segment_cost(node, Some((j, cand)));
                        if a * a + b * b < current {
                            self.x[j] = cand;
                            self.seg[node - 1] = a;
                            self.seg[node] = b;
                            moved = true;
                            break;
                        }
                    }
                    self.step[j] = if moved { h * 2.0 } else { h * 0.5 };
                }
            }
            let max_step = self.step.iter().cloned().fold(0.0f64, f64::max);
            history.push(self.energy_length());
            let stalled = history.len() > STALL_WINDOW
                && history[history.len() - 1 - STALL_WINDOW] - history[history.len() - 1]
                    < STALL_TOLERANCE * history[history.len() - 1];
            if max_step < STEP_TOLERANCE || stalled || nodes <= 2 {
                converged = true;
                break;
            }
        }
        let nodes_out = self
            .x
            .chunks(d)
            .map(ComplexVector::from_real)
            .collect::<Vec<_>>();
        debug_assert!(nodes_out.iter().all(|z| self.problem.space.contains(z)));
        OracleResult {
            length: self.accurate_length(),
            converged,
            sweeps,
            segments: nodes - 1,
            nodes: nodes_out,
        }
    }
}

/// Kobayashi distance estimate by path minimization at default settings.
pub fn path_oracle(space: &Space, from: &ComplexVector, to: &ComplexVector) -> Result<OracleResult> {
    PathProblem::new(space.clone(), from.clone(), to.clone())?.solve()
}
