//! Complex linear algebra on `C^n`: Hermitian structure, projection onto
//! complex lines, operator norms and finite-difference Jacobians.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::HoloMap;
use crate::tolerances;

pub type C64 = Complex64;

/// Complex matrix acting on column vectors of `C^n`.
pub type CMatrix = DMatrix<Complex64>;

/// A point of `C^n` or a tangent direction at such a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![C64::new(0.0, 0.0); n])
    }

    pub fn scalar(z: Complex64) -> Self {
        Self(vec![z])
    }

    /// Builds a vector from real parts only.
    pub fn real(parts: &[f64]) -> Self {
        Self(parts.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` of `C^n`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Euclidean norm `sqrt(<z,z>)`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    /// Componentwise real part, as a vector with zero imaginary parts.
    pub fn re(&self) -> Self {
        Self(self.0.iter().map(|z| C64::new(z.re, 0.0)).collect())
    }

    pub fn to_column(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn from_column(v: &DVector<Complex64>) -> Self {
        Self(v.iter().copied().collect())
    }

    /// Interleaved real coordinates `(re_1, im_1, re_2, im_2, ...)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Self(xs.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector add");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector sub");
        ComplexVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &ComplexVector {
    type Output = ComplexVector;
    fn neg(self) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| -z).collect())
    }
}

impl Mul<&ComplexVector> for &CMatrix {
    type Output = ComplexVector;
    fn mul(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector::from_column(&(self * rhs.to_column()))
    }
}

impl fmt::Display for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| format_complex(*z)).collect();
        write!(f, "({})", parts.join("; "))
    }
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidDomain(format!("malformed complex number `{s}`"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let z = match s.split_once(',') {
        Some((re, im)) => C64::new(num(re)?, num(im)?),
        None => C64::new(num(s)?, 0.0),
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(s.to_string()))
    }
}

/// Semicolon-separated entries, optionally wrapped in parentheses, as printed by `Display`.
impl FromStr for ComplexVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        if t.trim().is_empty() {
            return Err(Error::InvalidDomain("empty vector".into()));
        }
        Ok(ComplexVector(t.split(';').map(parse_complex).collect::<Result<_>>()?))
    }
}

pub(crate) fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{},{}", z.re, z.im)
    }
}

/// A direction attached to a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: ComplexVector,
    pub dir: ComplexVector,
}

impl TangentVector {
    pub fn new(base: ComplexVector, dir: ComplexVector) -> Result<Self> {
        base.check_dim(&dir)?;
        Ok(Self { base, dir })
    }
}

/// Splitting of a vector into its component along a complex line and the
/// orthogonal remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleDecomposition {
    pub parallel: ComplexVector,
    pub orthogonal: ComplexVector,
    /// Angle in `[0, pi/2]` between the vector and the complex line.
    pub alpha: f64,
}

/// `<z, w> = sum z_k conj(w_k)`.
pub fn hermitian_inner(z: &ComplexVector, w: &ComplexVector) -> Result<Complex64> {
    z.check_dim(w)?;
    Ok(z.0.iter().zip(&w.0).map(|(a, b)| a * b.conj()).sum())
}

/// Decomposes `u` along the complex line `[p]` spanned by `p`.
pub fn decompose_along(u: &ComplexVector, p: &ComplexVector) -> Result<AngleDecomposition> {
    u.check_dim(p)?;
    let pp = p.norm_sqr();
    if pp == 0.0 {
        return Err(Error::UndefinedComplexLine);
    }
    let coeff = hermitian_inner(u, p)? / pp;
    let parallel = p.scale(coeff);
    let orthogonal = u - &parallel;
    let alpha = orthogonal.norm().atan2(parallel.norm());
    Ok(AngleDecomposition {
        parallel,
        orthogonal,
        alpha,
    })
}

/// Largest singular value together with a unit vector attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorNorm {
    pub value: f64,
    pub direction: ComplexVector,
    pub iterations: usize,
}

/// Euclidean operator norm of `j` by power iteration on `j* j`.
pub fn operator_norm(j: &CMatrix) -> Result<OperatorNorm> {
    if j.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let n = j.ncols();
    if n == 0 || j.nrows() == 0 {
        return Ok(OperatorNorm {
            value: 0.0,
            direction: ComplexVector::zeros(n),
            iterations: 0,
        });
    }
    let gram = j.adjoint() * j;
    // Start from the heaviest column of the Gram matrix: it cannot be
    // orthogonal to the top right-singular space unless the matrix is zero.
    let start = (0..n)
        .map(|k| gram.column(k).into_owned())
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("n > 0");
    let start_norm = start.norm();
    if start_norm == 0.0 {
        return Ok(OperatorNorm {
            value: 0.0,
            direction: ComplexVector::basis(n, 0),
            iterations: 0,
        });
    }
    let mut v = start / C64::new(start_norm, 0.0);
    let mut value = (j * &v).norm();
    let mut iterations = 0;
    while iterations < tolerances::POWER_ITERATION_MAX {
        iterations += 1;
        let w = &gram * &v;
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        v = w / C64::new(wn, 0.0);
        let next = (j * &v).norm();
        let done = (next - value).abs() <= tolerances::POWER_ITERATION * next.max(f64::MIN_POSITIVE);
        value = next;
        if done {
            break;
        }
    }
    Ok(OperatorNorm {
        value,
        direction: ComplexVector::from_column(&v),
        iterations,
    })
}

/// Default central-difference step at `a`.
pub fn default_fd_step(a: &ComplexVector) -> f64 {
    1e-6 * a.norm().max(1.0)
}

/// Central-difference Jacobian of a holomorphic map, differentiating along
/// the real coordinate directions.
pub fn fd_jacobian(f: &HoloMap, a: &ComplexVector, h: Option<f64>) -> Result<CMatrix> {
    let h = h.unwrap_or_else(|| default_fd_step(a));
    let n = a.dim();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let step = ComplexVector::basis(n, k).scale_real(h);
        let fwd = f.eval(&(a + &step))?;
        let bwd = f.eval(&(a - &step))?;
        columns.push((&fwd - &bwd).scale_real(0.5 / h));
    }
    let m = columns.first().map_or(0, ComplexVector::dim);
    Ok(CMatrix::from_fn(m, n, |r, c| columns[c][r]))
}
