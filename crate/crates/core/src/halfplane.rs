//! Upper half-plane geometry: points, real and integral 2x2 matrices, the
//! point-pair invariant `u`, the phase `mu` and the Bergman test function.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A point `x + iy` of the upper half-plane.
///
/// Points parsed from decimal literals or built from rationals remember their
/// exact coordinates, which lets the counting code decide `u <= delta`
/// without rounding.
#[derive(Clone, Debug)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    exact: Option<(BigRational, BigRational)>,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return domain("point coordinates must be finite");
        }
        if y <= 0.0 {
            return domain(format!("imaginary part must be positive, got {y}"));
        }
        Ok(Point { x, y, exact: None })
    }

    pub fn i() -> Self {
        Point::from_rational(BigRational::zero(), BigRational::one()).unwrap()
    }

    pub fn from_rational(x: BigRational, y: BigRational) -> Result<Self> {
        if !y.is_positive() {
            return domain("imaginary part must be positive");
        }
        let (xf, yf) = (ratio_to_f64(&x), ratio_to_f64(&y));
        Ok(Point { x: xf, y: yf, exact: Some((x, y)) })
    }

    pub fn exact(&self) -> Option<(&BigRational, &BigRational)> {
        self.exact.as_ref().map(|(x, y)| (x, y))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    /// Moebius action of an integral matrix of determinant one.
    pub fn act(&self, g: &Mat2Z) -> Result<Point> {
        if g.det() != 1 {
            return domain("act expects a determinant one matrix");
        }
        if let Some((x, y)) = &self.exact {
            let (a, b, c, d) = (big(g.a), big(g.b), big(g.c), big(g.d));
            let cxd = &c * x + &d;
            let cy = &c * y;
            let den = &cxd * &cxd + &cy * &cy;
            let ax = (&a * x + &b) * &cxd + &a * &c * y * y;
            return Point::from_rational(ax / &den, y / den);
        }
        let z = self.to_complex();
        let w = (z * g.a as f64 + g.b as f64) / (z * g.c as f64 + g.d as f64);
        Point::new(w.re, w.im)
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.x == other.x && self.y == other.y,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x == 0.0 {
            write!(f, "{}i", self.y)
        } else {
            write!(f, "{}+{}i", self.x, self.y)
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Accepts `i`, `2i`, `-0.3+0.9i`, `5+i`, `0.5+10i`, `1e-3+2i`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = t
            .strip_suffix('i')
            .ok_or_else(|| Error::Domain(format!("complex literal must end in 'i': {s:?}")))?;
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let x = parse_decimal(re)?;
        let y = parse_decimal(im)?;
        Point::from_rational(x, y)
    }
}

/// Exact value of a decimal literal such as `-0.25` or `1.5e-3`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Domain(format!("not a decimal number: {s:?}"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Exact rational carrying the shortest decimal that round-trips to `v`.
pub fn f64_to_decimal_ratio(v: f64) -> BigRational {
    parse_decimal(&format!("{v:e}")).expect("finite float formats as a decimal")
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Real 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2R {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2R {
    pub const IDENTITY: Mat2R = Mat2R { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2R { a, b, c, d }
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2R::new(a, 0.0, 0.0, d)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn transpose(&self) -> Self {
        Mat2R::new(self.a, self.c, self.b, self.d)
    }

    /// Main involution `x -> Tr(x) - x`, i.e. the adjugate.
    pub fn iota(&self) -> Self {
        Mat2R::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2R::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return domain("matrix is not invertible");
        }
        Ok(self.iota().scale(1.0 / det))
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    /// Moebius action on the upper half-plane (positive determinant only).
    pub fn act(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }
}

impl std::ops::Mul for Mat2R {
    type Output = Mat2R;
    fn mul(self, o: Mat2R) -> Mat2R {
        Mat2R::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Integral 2x2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2Z {
    pub const IDENTITY: Mat2Z = Mat2Z { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2Z { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(&self) -> Self {
        Mat2Z::new(self.a, self.c, self.b, self.d)
    }

    pub fn iota(&self) -> Self {
        Mat2Z::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn to_real(&self) -> Mat2R {
        Mat2R::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }
}

impl std::ops::Mul for Mat2Z {
    type Output = Mat2Z;
    fn mul(self, o: Mat2Z) -> Mat2Z {
        Mat2Z::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Modular weight, at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Weight(u32);

impl TryFrom<u32> for Weight {
    type Error = Error;
    fn try_from(m: u32) -> Result<Self> {
        Weight::new(m)
    }
}

impl From<Weight> for u32 {
    fn from(m: Weight) -> u32 {
        m.0
    }
}

impl Weight {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return domain(format!("weight must be at least 2, got {m}"));
        }
        Ok(Weight(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Iwasawa representative `g_z = [[sqrt y, x/sqrt y], [0, 1/sqrt y]]`.
pub fn point_matrix(z: &Point) -> Mat2R {
    let s = z.y.sqrt();
    Mat2R::new(s, z.x / s, 0.0, 1.0 / s)
}

/// Rotation `k_theta = [[cos, sin], [-sin, cos]]`.
pub fn k_theta(theta: f64) -> Mat2R {
    let (s, c) = theta.sin_cos();
    Mat2R::new(c, s, -s, c)
}

/// `(Tr(g g^T) - 2|det g|) / (4|det g|)`.
pub fn u_invariant(g: &Mat2R) -> Result<f64> {
    let det = g.det().abs();
    if det == 0.0 {
        return domain("u is undefined for singular matrices");
    }
    Ok(((g.frobenius_sq() - 2.0 * det) / (4.0 * det)).max(0.0))
}

/// `2i sqrt(det g) / ((b - c) + i(a + d))`, zero when `det g <= 0`.
pub fn mu(g: &Mat2R) -> Complex64 {
    mu_flagged(g).0
}

/// Like [`mu`], also reporting whether `g` was singular.
pub fn mu_flagged(g: &Mat2R) -> (Complex64, bool) {
    let det = g.det();
    if det <= 0.0 {
        return (Complex64::new(0.0, 0.0), det == 0.0);
    }
    let num = Complex64::new(0.0, 2.0 * det.sqrt());
    (num / Complex64::new(g.b - g.c, g.a + g.d), false)
}

/// `M(x) = exp(-2 pi Nr x) Nr(x)^(m/2-1) mu(x)^m`, zero when `Nr x <= 0`.
///
/// Evaluated in log-space so large weights neither overflow nor underflow early.
pub fn bergman_test_function(x: &Mat2R, m: Weight) -> Complex64 {
    let nr = x.det();
    if nr <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = m.get() as f64;
    let mu = mu(x);
    let log_abs = -2.0 * std::f64::consts::PI * nr + (m / 2.0 - 1.0) * nr.ln() + m * mu.norm().ln();
    Complex64::from_polar(log_abs.exp(), m * mu.arg())
}

/// Result of fundamental-domain reduction.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub point: Point,
    pub gamma: Mat2Z,
    pub height: f64,
}

/// Shift-then-invert reduction into `|Re z| <= 1/2, |z| >= 1`.
///
/// `gamma` satisfies `gamma . z = point`, and `height = Im point` is the
/// maximal imaginary part over the orbit.
pub fn reduce_to_fundamental(z: &Point) -> Reduction {
    let s = Mat2Z::new(0, -1, 1, 0);
    let mut gamma = Mat2Z::IDENTITY;
    let mut w = z.to_complex();
    for _ in 0..10_000 {
        let n = if w.re.abs() > 0.5 { w.re.round() } else { 0.0 };
        if n != 0.0 {
            let t = Mat2Z::new(1, -(n as i64), 0, 1);
            gamma = t * gamma;
            w.re -= n;
        }
        if w.norm_sqr() < 1.0 - 1e-14 {
            gamma = s * gamma;
            w = -w.inv();
        } else {
            break;
        }
    }
    let point = z.act(&gamma).expect("gamma has determinant one");
    let height = point.y;
    Reduction { point, gamma, height }
}

/// Conjugation frame `xi -> g^-1 xi g` with exact `u` where the frame is rational.
#[derive(Clone, Debug)]
pub struct Frame {
    g: Mat2R,
    g_inv: Mat2R,
    exact: Option<ExactFrame>,
}

#[derive(Clone, Debug)]
enum ExactFrame {
    Point { x: BigRational, y: BigRational },
    Matrix { g: [BigRational; 4], g_inv: [BigRational; 4] },
}

impl Frame {
    pub fn from_point(z: &Point) -> Self {
        let g = point_matrix(z);
        Frame {
            g,
            g_inv: g.inverse().expect("Iwasawa representative is invertible"),
            exact: z.exact().map(|(x, y)| ExactFrame::Point { x: x.clone(), y: y.clone() }),
        }
    }

    /// Frame for an arbitrary determinant one matrix; `u` is then decided in floating point.
    pub fn from_matrix(g: Mat2R) -> Result<Self> {
        if !g.is_finite() || (g.det() - 1.0).abs() > 1e-12 {
            return domain("frame matrix must have determinant 1");
        }
        Ok(Frame { g, g_inv: g.inverse()?, exact: None })
    }

    /// Frame for a rational determinant one matrix.
    pub fn from_rational_matrix(entries: [BigRational; 4]) -> Result<Self> {
        let [a, b, c, d] = &entries;
        if a * d - b * c != BigRational::one() {
            return domain("frame matrix must have determinant 1");
        }
        let g = Mat2R::new(ratio_to_f64(a), ratio_to_f64(b), ratio_to_f64(c), ratio_to_f64(d));
        let g_inv = [d.clone(), -b.clone(), -c.clone(), a.clone()];
        Ok(Frame { g, g_inv: g.inverse()?, exact: Some(ExactFrame::Matrix { g: entries, g_inv }) })
    }

    pub fn matrix(&self) -> Mat2R {
        self.g
    }

    pub fn inverse_matrix(&self) -> Mat2R {
        self.g_inv
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The frame for the transposed matrix `g^T`.
    pub fn transpose(&self) -> Frame {
        let exact = match &self.exact {
            None => None,
            // g_z^T has irrational entries; fall back to floats.
            Some(ExactFrame::Point { .. }) => None,
            Some(ExactFrame::Matrix { g, g_inv }) => Some(ExactFrame::Matrix {
                g: [g[0].clone(), g[2].clone(), g[1].clone(), g[3].clone()],
                g_inv: [g_inv[0].clone(), g_inv[2].clone(), g_inv[1].clone(), g_inv[3].clone()],
            }),
        };
        Frame { g: self.g.transpose(), g_inv: self.g_inv.transpose(), exact }
    }

    pub fn conjugate(&self, xi: &Mat2Z) -> Mat2R {
        self.g_inv * xi.to_real() * self.g
    }

    /// `||g^-1 xi g||_F^2` in floating point.
    pub fn frobenius_sq(&self, xi: &Mat2Z) -> f64 {
        self.conjugate(xi).frobenius_sq()
    }

    /// Exact `||g^-1 xi g||_F^2` when the frame is rational.
    pub fn frobenius_sq_exact(&self, xi: &Mat2Z) -> Option<BigRational> {
        match self.exact.as_ref()? {
            ExactFrame::Point { x, y } => {
                let (a, b, c, d) = (big(xi.a), big(xi.b), big(xi.c), big(xi.d));
                let a1 = &a - x * &c;
                let d1 = &d + x * &c;
                let b1 = (&b + x * (&a - &d) - x * x * &c) / y;
                let c1 = &c * y;
                Some(&a1 * &a1 + &d1 * &d1 + &b1 * &b1 + &c1 * &c1)
            }
            ExactFrame::Matrix { g, g_inv } => {
                let xs = [big(xi.a), big(xi.b), big(xi.c), big(xi.d)];
                let m = mul_exact(&mul_exact(g_inv, &xs), g);
                Some(m.iter().map(|e| e * e).sum())
            }
        }
    }

    /// `u(g^-1 xi g)`.
    pub fn u(&self, xi: &Mat2Z) -> Result<f64> {
        u_invariant(&self.conjugate(xi))
    }

    /// Decide `u(g^-1 xi g) <= delta` for `det xi = n > 0`.
    ///
    /// Near the boundary a rational frame settles the comparison exactly
    /// against the decimal value of `delta`; otherwise a relative slack of
    /// `1e-12` is applied.
    pub fn u_within(&self, xi: &Mat2Z, n: i64, delta: f64) -> bool {
        let f = self.frobenius_sq(xi);
        let limit = n as f64 * (4.0 * delta + 2.0);
        let gap = f - limit;
        let window = 1e-9 * limit.max(1.0);
        if gap.abs() > window {
            return gap < 0.0;
        }
        if let Some(exact) = self.frobenius_sq_exact(xi) {
            let d = f64_to_decimal_ratio(delta);
            let lim = big(n) * (d * BigRational::from_integer(4.into()) + BigRational::from_integer(2.into()));
            return exact <= lim;
        }
        let u = (f - 2.0 * n as f64) / (4.0 * n as f64);
        u <= delta * (1.0 + 1e-12) + 1e-13
    }
}

fn mul_exact(x: &[BigRational; 4], y: &[BigRational; 4]) -> [BigRational; 4] {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}
