//! Real-analytic scalar functions on an interval and their canonical
//! holomorphic extensions.
//!
//! A function is either a closed-form expression tree (evaluated at complex
//! argument, which *is* the holomorphic extension) or a Taylor series on a
//! disc. Taylor data can appear as a leaf inside a tree, so all arithmetic,
//! differentiation and extension work uniformly on both representations.

use crate::error::{Error, Result};
use crate::mat2::ONE_C;
use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

pub mod series;
mod parser;

pub use parser::parse_expr;
use series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl UnOp {
    fn name(self) -> &'static str {
        match self {
            UnOp::Exp => "exp",
            UnOp::Ln => "ln",
            UnOp::Sqrt => "sqrt",
            UnOp::Sin => "sin",
            UnOp::Cos => "cos",
            UnOp::Sinh => "sinh",
            UnOp::Cosh => "cosh",
        }
    }

    fn apply(self, w: Complex64) -> Complex64 {
        match self {
            UnOp::Exp => w.exp(),
            UnOp::Ln => w.ln(),
            UnOp::Sqrt => w.sqrt(),
            UnOp::Sin => w.sin(),
            UnOp::Cos => w.cos(),
            UnOp::Sinh => w.sinh(),
            UnOp::Cosh => w.cosh(),
        }
    }

    /// Principal-branch operations are undefined on the cut (-inf, 0].
    fn has_cut(self) -> bool {
        matches!(self, UnOp::Ln | UnOp::Sqrt)
    }
}

/// Taylor representation: coefficients around a real center, with an
/// estimated radius of validity.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub center: f64,
    pub coeffs: Vec<Complex64>,
    pub radius: f64,
}

#[derive(Debug)]
pub enum Expr {
    Const(Complex64),
    Z,
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Powi(Arc<Expr>, i32),
    Un(UnOp, Arc<Expr>),
    Series(TaylorSeries),
}

/// A real-analytic function on an interval together with its canonical
/// holomorphic extension (evaluate the same expression at complex argument).
#[derive(Clone)]
pub struct AnalyticFn(Arc<Expr>);

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFn({self})")
    }
}

fn fmt_complex(c: Complex64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        write!(f, "{}", c.re)
    } else if c.re == 0.0 {
        if c.im == 1.0 {
            write!(f, "i")
        } else if c.im == -1.0 {
            write!(f, "-i")
        } else {
            write!(f, "{}*i", c.im)
        }
    } else {
        write!(f, "({}{}{}*i)", c.re, if c.im < 0.0 { "" } else { "+" }, c.im)
    }
}

fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>, parent_prec: u8) -> fmt::Result {
    // precedence: 0 add, 1 mul, 2 pow/unary-minus, 3 atom
    let prec = match e {
        Expr::Add(..) | Expr::Sub(..) => 0,
        Expr::Mul(..) | Expr::Div(..) => 1,
        Expr::Neg(_) | Expr::Powi(..) => 2,
        _ => 3,
    };
    let need = prec < parent_prec;
    if need {
        write!(f, "(")?;
    }
    match e {
        Expr::Const(c) => fmt_complex(*c, f)?,
        Expr::Z => write!(f, "z")?,
        Expr::Add(a, b) => {
            fmt_expr(a, f, 0)?;
            write!(f, " + ")?;
            fmt_expr(b, f, 1)?;
        }
        Expr::Sub(a, b) => {
            fmt_expr(a, f, 0)?;
            write!(f, " - ")?;
            fmt_expr(b, f, 1)?;
        }
        Expr::Mul(a, b) => {
            fmt_expr(a, f, 1)?;
            write!(f, "*")?;
            fmt_expr(b, f, 2)?;
        }
        Expr::Div(a, b) => {
            fmt_expr(a, f, 1)?;
            write!(f, "/")?;
            fmt_expr(b, f, 2)?;
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            fmt_expr(a, f, 2)?;
        }
        Expr::Powi(a, p) => {
            fmt_expr(a, f, 3)?;
            write!(f, "^{p}")?;
        }
        Expr::Un(op, a) => {
            write!(f, "{}(", op.name())?;
            fmt_expr(a, f, 0)?;
            write!(f, ")")?;
        }
        Expr::Series(t) => {
            write!(f, "taylor(center={}, n={})", t.center, t.coeffs.len())?;
        }
    }
    if need {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(&self.0, f, 0)
    }
}

impl AnalyticFn {
    pub fn constant(c: Complex64) -> Self {
        AnalyticFn(Arc::new(Expr::Const(c)))
    }

    pub fn constant_re(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    pub fn one() -> Self {
        Self::constant(ONE_C)
    }

    pub fn var() -> Self {
        AnalyticFn(Arc::new(Expr::Z))
    }

    pub fn taylor(center: f64, coeffs: Vec<Complex64>, radius: f64) -> Self {
        AnalyticFn(Arc::new(Expr::Series(TaylorSeries {
            center,
            coeffs,
            radius,
        })))
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_expr(text)
    }

    pub fn as_const(&self) -> Option<Complex64> {
        match &*self.0 {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&*self.0, Expr::Const(c) if *c == ZERO)
    }

    // --- smart constructors with constant folding -------------------------

    fn add_e(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (&*a, &*b) {
            (Expr::Const(x), Expr::Const(y)) => Arc::new(Expr::Const(x + y)),
            (Expr::Const(x), _) if *x == ZERO => b,
            (_, Expr::Const(y)) if *y == ZERO => a,
            _ => Arc::new(Expr::Add(a, b)),
        }
    }

    fn sub_e(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (&*a, &*b) {
            (Expr::Const(x), Expr::Const(y)) => Arc::new(Expr::Const(x - y)),
            (_, Expr::Const(y)) if *y == ZERO => a,
            (Expr::Const(x), _) if *x == ZERO => Self::neg_e(b),
            _ => Arc::new(Expr::Sub(a, b)),
        }
    }

    fn mul_e(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (&*a, &*b) {
            (Expr::Const(x), Expr::Const(y)) => Arc::new(Expr::Const(x * y)),
            (Expr::Const(x), _) if *x == ZERO => a,
            (_, Expr::Const(y)) if *y == ZERO => b,
            (Expr::Const(x), _) if *x == ONE_C => b,
            (_, Expr::Const(y)) if *y == ONE_C => a,
            _ => Arc::new(Expr::Mul(a, b)),
        }
    }

    fn div_e(a: Arc<Expr>, b: Arc<Expr>) -> Arc<Expr> {
        match (&*a, &*b) {
            (Expr::Const(x), Expr::Const(y)) if *y != ZERO => Arc::new(Expr::Const(x / y)),
            (Expr::Const(x), _) if *x == ZERO => a,
            (_, Expr::Const(y)) if *y == ONE_C => a,
            _ => Arc::new(Expr::Div(a, b)),
        }
    }

    fn neg_e(a: Arc<Expr>) -> Arc<Expr> {
        match &*a {
            Expr::Const(x) => Arc::new(Expr::Const(-x)),
            Expr::Neg(inner) => inner.clone(),
            _ => Arc::new(Expr::Neg(a)),
        }
    }

    pub fn powi(&self, p: i32) -> Self {
        let e = match (&*self.0, p) {
            (_, 0) => Arc::new(Expr::Const(ONE_C)),
            (_, 1) => self.0.clone(),
            (Expr::Const(c), _) => Arc::new(Expr::Const(c.powi(p))),
            _ => Arc::new(Expr::Powi(self.0.clone(), p)),
        };
        AnalyticFn(e)
    }

    pub fn unary(&self, op: UnOp) -> Self {
        let e = match &*self.0 {
            Expr::Const(c) if !(op.has_cut() && c.re <= 0.0 && c.im == 0.0) => {
                Arc::new(Expr::Const(op.apply(*c)))
            }
            _ => Arc::new(Expr::Un(op, self.0.clone())),
        };
        AnalyticFn(e)
    }

    pub fn exp(&self) -> Self {
        self.unary(UnOp::Exp)
    }
    pub fn ln(&self) -> Self {
        self.unary(UnOp::Ln)
    }
    pub fn sqrt(&self) -> Self {
        self.unary(UnOp::Sqrt)
    }
    pub fn sin(&self) -> Self {
        self.unary(UnOp::Sin)
    }
    pub fn cos(&self) -> Self {
        self.unary(UnOp::Cos)
    }
    pub fn sinh(&self) -> Self {
        self.unary(UnOp::Sinh)
    }
    pub fn cosh(&self) -> Self {
        self.unary(UnOp::Cosh)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        AnalyticFn(Self::mul_e(Arc::new(Expr::Const(c)), self.0.clone()))
    }

    // --- evaluation --------------------------------------------------------

    /// Value of the canonical holomorphic extension at `z`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        eval_expr(&self.0, z)
    }

    /// Evaluation restricted to the real axis.
    pub fn eval_real(&self, x: f64) -> Result<Complex64> {
        self.eval(Complex64::new(x, 0.0))
    }

    // --- calculus ------------------------------------------------------------

    /// Exact derivative (tree rules; Taylor leaves shift coefficients).
    pub fn differentiate(&self) -> Self {
        AnalyticFn(diff_expr(&self.0))
    }

    /// Taylor coefficients at `center` by series arithmetic over the tree.
    pub fn taylor_of(&self, center: f64, n_terms: usize) -> Result<Self> {
        let n = n_terms.max(1);
        let s = series_of(&self.0, center, n)?;
        let radius = self.radius_estimate(center);
        Ok(AnalyticFn::taylor(center, s.c, radius))
    }

    /// Distance from `center` to the nearest declared singularity
    /// (infinite when none is declared or computable).
    pub fn radius_estimate(&self, center: f64) -> f64 {
        radius_expr(&self.0, center)
    }

    /// Holomorphic extension of `x -> conj(f(x))`: conjugate every constant
    /// and Taylor coefficient. Valid because the interval is real.
    pub fn conj_extension(&self) -> Self {
        AnalyticFn(conj_expr(&self.0))
    }

    /// If `f` is numerically constant on `n` probe points of `[a, b]`,
    /// return the (exact) value at `x0`.
    pub fn probe_const(&self, a: f64, b: f64, x0: f64, n: usize, tol: f64) -> Option<Complex64> {
        let v0 = self.eval_real(x0).ok()?;
        let mut spread = 0.0f64;
        let mut scale = v0.norm();
        for i in 0..n {
            let x = a + (b - a) * (i as f64 + 0.5) / n as f64;
            let v = self.eval_real(x).ok()?;
            spread = spread.max((v - v0).norm());
            scale = scale.max(v.norm());
        }
        if spread <= tol * (1.0 + scale) {
            Some(v0)
        } else {
            None
        }
    }

    /// Replace by the exact constant when probing says so; otherwise keep.
    pub fn const_folded(&self, a: f64, b: f64, x0: f64) -> Self {
        if self.as_const().is_some() {
            return self.clone();
        }
        match self.probe_const(a, b, x0, 17, 1e-11) {
            Some(c) => AnalyticFn::constant(c),
            None => self.clone(),
        }
    }
}

fn eval_expr(e: &Expr, z: Complex64) -> Result<Complex64> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Z => z,
        Expr::Add(a, b) => eval_expr(a, z)? + eval_expr(b, z)?,
        Expr::Sub(a, b) => eval_expr(a, z)? - eval_expr(b, z)?,
        Expr::Mul(a, b) => eval_expr(a, z)? * eval_expr(b, z)?,
        Expr::Div(a, b) => {
            let num = eval_expr(a, z)?;
            let den = eval_expr(b, z)?;
            if den.norm() < 1e-280 {
                return Err(Error::OutOfDomain {
                    z,
                    what: "division by zero".into(),
                });
            }
            num / den
        }
        Expr::Neg(a) => -eval_expr(a, z)?,
        Expr::Powi(a, p) => {
            let base = eval_expr(a, z)?;
            if *p < 0 && base.norm() < 1e-280 {
                return Err(Error::OutOfDomain {
                    z,
                    what: "negative power of zero".into(),
                });
            }
            base.powi(*p)
        }
        Expr::Un(op, a) => {
            let w = eval_expr(a, z)?;
            if op.has_cut() && w.re <= 0.0 && w.im.abs() <= 1e-14 * (1.0 + w.re.abs()) {
                return Err(Error::OutOfDomain {
                    z,
                    what: format!("{} evaluated on its branch cut", op.name()),
                });
            }
            op.apply(w)
        }
        Expr::Series(t) => {
            let d = z - Complex64::new(t.center, 0.0);
            if d.norm() >= t.radius {
                return Err(Error::OutOfDomain {
                    z,
                    what: format!(
                        "outside Taylor disc (center {}, radius {})",
                        t.center, t.radius
                    ),
                });
            }
            let mut acc = ZERO;
            for c in t.coeffs.iter().rev() {
                acc = acc * d + c;
            }
            acc
        }
    })
}

fn diff_expr(e: &Expr) -> Arc<Expr> {
    type A = AnalyticFn;
    match e {
        Expr::Const(_) => Arc::new(Expr::Const(ZERO)),
        Expr::Z => Arc::new(Expr::Const(ONE_C)),
        Expr::Add(a, b) => A::add_e(diff_expr(a), diff_expr(b)),
        Expr::Sub(a, b) => A::sub_e(diff_expr(a), diff_expr(b)),
        Expr::Mul(a, b) => A::add_e(
            A::mul_e(diff_expr(a), b.clone()),
            A::mul_e(a.clone(), diff_expr(b)),
        ),
        Expr::Div(a, b) => {
            // (a'b - ab') / b^2
            let num = A::sub_e(
                A::mul_e(diff_expr(a), b.clone()),
                A::mul_e(a.clone(), diff_expr(b)),
            );
            A::div_e(num, Arc::new(Expr::Powi(b.clone(), 2)))
        }
        Expr::Neg(a) => A::neg_e(diff_expr(a)),
        Expr::Powi(a, p) => {
            // p a^{p-1} a'
            let pw = if *p == 2 {
                a.clone()
            } else {
                Arc::new(Expr::Powi(a.clone(), p - 1))
            };
            A::mul_e(
                A::mul_e(Arc::new(Expr::Const(Complex64::new(*p as f64, 0.0))), pw),
                diff_expr(a),
            )
        }
        Expr::Un(op, a) => {
            let da = diff_expr(a);
            let outer: Arc<Expr> = match op {
                UnOp::Exp => Arc::new(Expr::Un(UnOp::Exp, a.clone())),
                UnOp::Ln => return A::div_e(da, a.clone()),
                UnOp::Sqrt => {
                    // 1/(2 sqrt a)
                    return A::div_e(
                        da,
                        A::mul_e(
                            Arc::new(Expr::Const(Complex64::new(2.0, 0.0))),
                            Arc::new(Expr::Un(UnOp::Sqrt, a.clone())),
                        ),
                    );
                }
                UnOp::Sin => Arc::new(Expr::Un(UnOp::Cos, a.clone())),
                UnOp::Cos => A::neg_e(Arc::new(Expr::Un(UnOp::Sin, a.clone()))),
                UnOp::Sinh => Arc::new(Expr::Un(UnOp::Cosh, a.clone())),
                UnOp::Cosh => Arc::new(Expr::Un(UnOp::Sinh, a.clone())),
            };
            A::mul_e(outer, da)
        }
        Expr::Series(t) => {
            let coeffs = t
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect();
            Arc::new(Expr::Series(TaylorSeries {
                center: t.center,
                coeffs,
                radius: t.radius,
            }))
        }
    }
}

fn conj_expr(e: &Expr) -> Arc<Expr> {
    match e {
        Expr::Const(c) => Arc::new(Expr::Const(c.conj())),
        Expr::Z => Arc::new(Expr::Z),
        Expr::Add(a, b) => Arc::new(Expr::Add(conj_expr(a), conj_expr(b))),
        Expr::Sub(a, b) => Arc::new(Expr::Sub(conj_expr(a), conj_expr(b))),
        Expr::Mul(a, b) => Arc::new(Expr::Mul(conj_expr(a), conj_expr(b))),
        Expr::Div(a, b) => Arc::new(Expr::Div(conj_expr(a), conj_expr(b))),
        Expr::Neg(a) => Arc::new(Expr::Neg(conj_expr(a))),
        Expr::Powi(a, p) => Arc::new(Expr::Powi(conj_expr(a), *p)),
        Expr::Un(op, a) => Arc::new(Expr::Un(*op, conj_expr(a))),
        Expr::Series(t) => Arc::new(Expr::Series(TaylorSeries {
            center: t.center,
            coeffs: t.coeffs.iter().map(|c| c.conj()).collect(),
            radius: t.radius,
        })),
    }
}

/// Nearest declared singularity distance. Only singular points directly
/// readable from the tree are used: poles/branch points of affine arguments
/// and Taylor disc edges. The result is an estimate, never a guarantee.
fn radius_expr(e: &Expr, center: f64) -> f64 {
    match e {
        Expr::Const(_) | Expr::Z => f64::INFINITY,
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            radius_expr(a, center).min(radius_expr(b, center))
        }
        Expr::Div(a, b) => {
            let mut r = radius_expr(a, center).min(radius_expr(b, center));
            if let Some(root) = affine_root(b) {
                r = r.min((root - Complex64::new(center, 0.0)).norm());
            }
            r
        }
        Expr::Neg(a) => radius_expr(a, center),
        Expr::Powi(a, p) => {
            let mut r = radius_expr(a, center);
            if *p < 0 {
                if let Some(root) = affine_root(a) {
                    r = r.min((root - Complex64::new(center, 0.0)).norm());
                }
            }
            r
        }
        Expr::Un(op, a) => {
            let mut r = radius_expr(a, center);
            if op.has_cut() {
                if let Some(root) = affine_root(a) {
                    r = r.min((root - Complex64::new(center, 0.0)).norm());
                }
            }
            r
        }
        Expr::Series(t) => {
            let d = (center - t.center).abs();
            (t.radius - d).max(0.0)
        }
    }
}

/// Root of an affine expression `a z + b`, if the node is one.
fn affine_root(e: &Expr) -> Option<Complex64> {
    // Recognizes Z, Const*Z, Z+Const, Const*Z+Const and the sub/neg variants.
    fn affine(e: &Expr) -> Option<(Complex64, Complex64)> {
        match e {
            Expr::Z => Some((ONE_C, ZERO)),
            Expr::Const(c) => Some((ZERO, *c)),
            Expr::Add(a, b) => {
                let (a1, a0) = affine(a)?;
                let (b1, b0) = affine(b)?;
                Some((a1 + b1, a0 + b0))
            }
            Expr::Sub(a, b) => {
                let (a1, a0) = affine(a)?;
                let (b1, b0) = affine(b)?;
                Some((a1 - b1, a0 - b0))
            }
            Expr::Neg(a) => {
                let (a1, a0) = affine(a)?;
                Some((-a1, -a0))
            }
            Expr::Mul(a, b) => match (&**a, affine(b)) {
                (Expr::Const(c), Some((b1, b0))) => Some((c * b1, c * b0)),
                _ => match (affine(a), &**b) {
                    (Some((a1, a0)), Expr::Const(c)) => Some((a1 * c, a0 * c)),
                    _ => None,
                },
            },
            _ => None,
        }
    }
    let (slope, offset) = affine(e)?;
    if slope.norm() < 1e-300 {
        None
    } else {
        Some(-offset / slope)
    }
}

fn series_of(e: &Expr, center: f64, n: usize) -> Result<Series> {
    Ok(match e {
        Expr::Const(c) => Series::constant(*c, n),
        Expr::Z => {
            let mut s = Series::constant(Complex64::new(center, 0.0), n);
            if n > 1 {
                s.c[1] = ONE_C;
            }
            s
        }
        Expr::Add(a, b) => series_of(a, center, n)?.add(&series_of(b, center, n)?),
        Expr::Sub(a, b) => series_of(a, center, n)?.sub(&series_of(b, center, n)?),
        Expr::Mul(a, b) => series_of(a, center, n)?.mul(&series_of(b, center, n)?),
        Expr::Div(a, b) => {
            let den = series_of(b, center, n)?;
            if den.c[0].norm() < 1e-280 {
                return Err(Error::SingularCenter { x: center });
            }
            series_of(a, center, n)?.div(&den)
        }
        Expr::Neg(a) => series_of(a, center, n)?.neg(),
        Expr::Powi(a, p) => {
            let base = series_of(a, center, n)?;
            if *p < 0 && base.c[0].norm() < 1e-280 {
                return Err(Error::SingularCenter { x: center });
            }
            base.powi(*p)
        }
        Expr::Un(op, a) => {
            let inner = series_of(a, center, n)?;
            let w0 = inner.c[0];
            if op.has_cut() && w0.re <= 0.0 && w0.im.abs() <= 1e-14 * (1.0 + w0.re.abs()) {
                return Err(Error::SingularCenter { x: center });
            }
            match op {
                UnOp::Exp => inner.exp(),
                UnOp::Ln => inner.ln(),
                UnOp::Sqrt => inner.sqrt(),
                UnOp::Sin => inner.sin(),
                UnOp::Cos => inner.cos(),
                UnOp::Sinh => inner.sinh(),
                UnOp::Cosh => inner.cosh(),
            }
        }
        Expr::Series(t) => {
            if (center - t.center).abs() >= t.radius {
                return Err(Error::SingularCenter { x: center });
            }
            Series::recenter(&t.coeffs, t.center, center, n)
        }
    })
}

// Arithmetic operators build new trees.
macro_rules! impl_bin_op {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait for &AnalyticFn {
            type Output = AnalyticFn;
            fn $method(self, rhs: &AnalyticFn) -> AnalyticFn {
                AnalyticFn(AnalyticFn::$ctor(self.0.clone(), rhs.0.clone()))
            }
        }
        impl std::ops::$trait for AnalyticFn {
            type Output = AnalyticFn;
            fn $method(self, rhs: AnalyticFn) -> AnalyticFn {
                AnalyticFn(AnalyticFn::$ctor(self.0, rhs.0))
            }
        }
    };
}

impl_bin_op!(Add, add, add_e);
impl_bin_op!(Sub, sub, sub_e);
impl_bin_op!(Mul, mul, mul_e);
impl_bin_op!(Div, div, div_e);

impl std::ops::Neg for &AnalyticFn {
    type Output = AnalyticFn;
    fn neg(self) -> AnalyticFn {
        AnalyticFn(AnalyticFn::neg_e(self.0.clone()))
    }
}

impl std::ops::Neg for AnalyticFn {
    type Output = AnalyticFn;
    fn neg(self) -> AnalyticFn {
        AnalyticFn(AnalyticFn::neg_e(self.0))
    }
}

/// Three analytic components in the basis (e1, e2, e3) of su(2) = E^3.
#[derive(Debug, Clone)]
pub struct AnalyticVec3 {
    pub c: [AnalyticFn; 3],
}

impl AnalyticVec3 {
    pub fn new(c: [AnalyticFn; 3]) -> Self {
        AnalyticVec3 { c }
    }

    pub fn constant(v: [f64; 3]) -> Self {
        AnalyticVec3 {
            c: [
                AnalyticFn::constant_re(v[0]),
                AnalyticFn::constant_re(v[1]),
                AnalyticFn::constant_re(v[2]),
            ],
        }
    }

    pub fn parse(exprs: &[String; 3]) -> Result<Self> {
        Ok(AnalyticVec3 {
            c: [
                AnalyticFn::parse(&exprs[0])?,
                AnalyticFn::parse(&exprs[1])?,
                AnalyticFn::parse(&exprs[2])?,
            ],
        })
    }

    pub fn eval(&self, z: Complex64) -> Result<[Complex64; 3]> {
        Ok([self.c[0].eval(z)?, self.c[1].eval(z)?, self.c[2].eval(z)?])
    }

    pub fn eval_real(&self, x: f64) -> Result<[f64; 3]> {
        let v = self.eval(Complex64::new(x, 0.0))?;
        Ok([v[0].re, v[1].re, v[2].re])
    }

    pub fn differentiate(&self) -> Self {
        AnalyticVec3 {
            c: [
                self.c[0].differentiate(),
                self.c[1].differentiate(),
                self.c[2].differentiate(),
            ],
        }
    }

    pub fn dot(&self, other: &AnalyticVec3) -> AnalyticFn {
        &(&(&self.c[0] * &other.c[0]) + &(&self.c[1] * &other.c[1])) + &(&self.c[2] * &other.c[2])
    }

    pub fn cross(&self, other: &AnalyticVec3) -> AnalyticVec3 {
        let a = &self.c;
        let b = &other.c;
        AnalyticVec3 {
            c: [
                &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
                &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
                &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
            ],
        }
    }

    pub fn norm_sq(&self) -> AnalyticFn {
        self.dot(self)
    }

    pub fn scale(&self, f: &AnalyticFn) -> AnalyticVec3 {
        AnalyticVec3 {
            c: [f * &self.c[0], f * &self.c[1], f * &self.c[2]],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_restriction_to_reals() {
        let f = AnalyticFn::parse("sin(2*z)").unwrap();
        let x = 0.37;
        let v = f.eval_real(x).unwrap();
        assert!((v.re - (2.0 * x).sin()).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn eval_square_at_i() {
        let f = AnalyticFn::parse("z^2").unwrap();
        let v = f.eval(cx(0.0, 1.0)).unwrap();
        assert!((v - cx(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn extension_of_x_squared_at_iy() {
        // theta0 = x^2 extends to z^2; at z = iy the value is -y^2.
        let f = AnalyticFn::parse("z^2").unwrap();
        let y = 0.8;
        let v = f.eval(cx(0.0, y)).unwrap();
        assert!((v.re + y * y).abs() < 1e-15);
        assert!(v.im.abs() < 1e-15);
        // cross-check against the Taylor representation
        let t = f.taylor_of(0.0, 8).unwrap();
        let w = t.eval(cx(0.0, y)).unwrap();
        assert!((w - v).norm() < 1e-13);
    }

    #[test]
    fn differentiate_constant() {
        let f = AnalyticFn::constant_re(4.2).differentiate();
        assert_eq!(f.as_const(), Some(cx(0.0, 0.0)));
    }

    #[test]
    fn differentiate_linear_theta() {
        // theta0 = 2x has derivative 2
        let f = AnalyticFn::parse("2*z").unwrap().differentiate();
        assert_eq!(f.as_const(), Some(cx(2.0, 0.0)));
    }

    #[test]
    fn differentiate_sin_squared_family() {
        // theta0 = (pi/8) sin^2 x, derivative (pi/8) 2 sin cos = (pi/4) sin cos
        let f = AnalyticFn::parse("0.39269908169872414*sin(z)^2").unwrap();
        let df = f.differentiate();
        let x = 0.61;
        let expect = std::f64::consts::PI / 8.0 * 2.0 * x.sin() * x.cos();
        let got = df.eval_real(x).unwrap();
        assert!((got.re - expect).abs() < 1e-14);
    }

    #[test]
    fn taylor_of_exp() {
        let f = AnalyticFn::parse("exp(z)").unwrap();
        let t = f.taylor_of(0.0, 5).unwrap();
        match &*t.0 {
            Expr::Series(s) => {
                let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
                for (k, e) in expect.iter().enumerate() {
                    assert!((s.coeffs[k].re - e).abs() < 1e-15, "term {k}");
                    assert!(s.coeffs[k].im.abs() < 1e-15);
                }
            }
            _ => panic!("expected series"),
        }
    }

    #[test]
    fn taylor_of_sin_2z() {
        let f = AnalyticFn::parse("sin(2*z)").unwrap();
        let t = f.taylor_of(0.0, 4).unwrap();
        match &*t.0 {
            Expr::Series(s) => {
                let expect = [0.0, 2.0, 0.0, -4.0 / 3.0];
                for (k, e) in expect.iter().enumerate() {
                    assert!((s.coeffs[k].re - e).abs() < 1e-14, "term {k}");
                }
            }
            _ => panic!("expected series"),
        }
    }

    #[test]
    fn taylor_radius_of_reciprocal() {
        let f = AnalyticFn::parse("1/z").unwrap();
        let t = f.taylor_of(1.0, 6).unwrap();
        match &*t.0 {
            Expr::Series(s) => assert!((s.radius - 1.0).abs() < 1e-12),
            _ => panic!("expected series"),
        }
    }

    #[test]
    fn taylor_rejects_singular_center() {
        let f = AnalyticFn::parse("1/z").unwrap();
        assert!(matches!(
            f.taylor_of(0.0, 4),
            Err(Error::SingularCenter { .. })
        ));
    }

    #[test]
    fn out_of_domain_on_cut() {
        let f = AnalyticFn::parse("ln(z)").unwrap();
        assert!(matches!(
            f.eval(cx(-0.5, 0.0)),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(f.eval(cx(0.5, 0.0)).is_ok());
    }

    #[test]
    fn taylor_eval_outside_radius_errors() {
        let f = AnalyticFn::parse("1/z").unwrap().taylor_of(1.0, 12).unwrap();
        assert!(matches!(
            f.eval(cx(2.5, 0.0)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn derivative_matches_finite_differences_order() {
        let f = AnalyticFn::parse("exp(sin(2*z))*cos(z)").unwrap();
        let df = f.differentiate();
        let x = 0.3;
        let exact = df.eval_real(x).unwrap().re;
        let mut errs = Vec::new();
        for h in [1e-3, 1e-4] {
            let fd = (f.eval_real(x + h).unwrap().re - f.eval_real(x - h).unwrap().re) / (2.0 * h);
            errs.push((fd - exact).abs());
        }
        // observed order >= 1.9
        let order = (errs[0] / errs[1].max(1e-300)).log10();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn tree_and_taylor_agree_on_disc() {
        let f = AnalyticFn::parse("exp(z)*sin(2*z) + cosh(z)").unwrap();
        let t = f.taylor_of(0.2, 40).unwrap();
        for (re, im) in [(0.3, 0.2), (0.1, -0.4), (0.55, 0.1)] {
            let z = cx(re, im);
            let a = f.eval(z).unwrap();
            let b = t.eval(z).unwrap();
            assert!((a - b).norm() < 1e-10, "at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn conj_extension_of_complex_coefficient() {
        let f = AnalyticFn::parse("i*sin(z)").unwrap();
        let g = f.conj_extension();
        let x = 0.7;
        let v = g.eval_real(x).unwrap();
        let expect = cx(0.0, -x.sin());
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn probe_const_detects_trig_identity() {
        let f = AnalyticFn::parse("sin(z)^2 + cos(z)^2").unwrap();
        let c = f.const_folded(-1.0, 1.0, 0.0);
        assert_eq!(c.as_const(), Some(cx(1.0, 0.0)));
    }

    #[test]
    fn display_roundtrip() {
        let src = "0.5*sin(2*z)^2 - 1/(z + 3)";
        let f = AnalyticFn::parse(src).unwrap();
        let printed = format!("{f}");
        let g = AnalyticFn::parse(&printed).unwrap();
        for x in [-0.3, 0.1, 0.9] {
            let a = f.eval_real(x).unwrap();
            let b = g.eval_real(x).unwrap();
            assert!((a - b).norm() < 1e-14, "printed form: {printed}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_schwarz_reflection(xc in -0.5f64..0.5, yc in 1e-3f64..0.5) {
            // real-on-J data: real constants only
            let f = AnalyticFn::parse("exp(0.3*z)*sin(2*z) + cos(z)^2").unwrap();
            let z = cx(xc, yc);
            let a = f.eval(z.conj()).unwrap();
            let b = f.eval(z).unwrap().conj();
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn prop_derivative_consistency(x in -0.7f64..0.7) {
            let f = AnalyticFn::parse("sinh(z)*cos(2*z)").unwrap();
            let df = f.differentiate();
            let h = 1e-4;
            let fd = (f.eval_real(x + h).unwrap() - f.eval_real(x - h).unwrap()) / (2.0 * h);
            let exact = df.eval_real(x).unwrap();
            prop_assert!((fd - exact).norm() < 1e-6);
        }
    }
}
