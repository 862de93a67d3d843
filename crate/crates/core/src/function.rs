//! Test functions `Φ` with optional analytic derivatives.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Growth class of a test function on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    Bounded,
    Polynomial(u32),
    /// `|Φ(z)| <= C e^(c z)`; the kernel rate must exceed `c`.
    ExpRate(f64),
}

/// A named real function on `[0, ∞)`.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    eval: RealFn,
    d1: Option<RealFn>,
    d2: Option<RealFn>,
    poly_degree: Option<u32>,
    growth: Growth,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("has_d1", &self.d1.is_some())
            .field("has_d2", &self.d2.is_some())
            .field("poly_degree", &self.poly_degree)
            .field("growth", &self.growth)
            .finish()
    }
}

impl TestFunction {
    /// An arbitrary function with no derivative information; growth is assumed
    /// polynomial-bounded by the caller.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), eval: Arc::new(f), d1: None, d2: None, poly_degree: None, growth: Growth::Bounded }
    }

    pub fn with_growth(mut self, growth: Growth) -> Self {
        self.growth = growth;
        self
    }

    pub fn with_poly_degree(mut self, degree: u32) -> Self {
        self.poly_degree = Some(degree);
        self.growth = Growth::Polynomial(degree);
        self
    }

    /// Attaches analytic first and second derivatives after checking them
    /// against central differences on `probe`.
    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        probe: &[f64],
    ) -> Result<Self> {
        let d1: RealFn = Arc::new(d1);
        let d2: RealFn = Arc::new(d2);
        for &x in probe {
            let h = 1e-4 * (1.0 + math::abs(x));
            let fd1 = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
            let fd2 = (d1(x + h) - d1(x - h)) / (2.0 * h);
            let scale1 = 1.0 + math::abs(d1(x));
            let scale2 = 1.0 + math::abs(d2(x));
            if math::abs(fd1 - d1(x)) > 1e-6 * scale1 {
                return Err(Error::InvalidParameter { name: "first derivative", value: x });
            }
            if math::abs(fd2 - d2(x)) > 1e-6 * scale2 {
                return Err(Error::InvalidParameter { name: "second derivative", value: x });
            }
        }
        self.d1 = Some(d1);
        self.d2 = Some(d2);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn d1(&self, x: f64) -> Option<f64> {
        self.d1.as_ref().map(|d| d(x))
    }

    pub fn d2(&self, x: f64) -> Option<f64> {
        self.d2.as_ref().map(|d| d(x))
    }

    pub fn poly_degree(&self) -> Option<u32> {
        self.poly_degree
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    /// Whether `sup |Φ|` may be infinite on `[0, ∞)`.
    pub fn is_unbounded(&self) -> bool {
        !matches!(self.growth, Growth::Bounded | Growth::Polynomial(0))
    }

    /// `Φ(x) = x e^(-5x)`.
    pub fn xexp5() -> Self {
        Self::new("xexp5", |x| x * math::exp(-5.0 * x))
            .with_derivatives(
                |x| (1.0 - 5.0 * x) * math::exp(-5.0 * x),
                |x| (25.0 * x - 10.0) * math::exp(-5.0 * x),
                &PROBE,
            )
            .expect("analytic derivatives of x e^-5x")
    }

    /// `Φ(x) = x³ - 2x² + 3`.
    pub fn cubic() -> Self {
        Self::polynomial(&[3.0, 0.0, -2.0, 1.0]).renamed("cubic")
    }

    /// `ϱ_j(z) = z^j`.
    pub fn monomial(j: u32) -> Self {
        let mut c = alloc::vec![0.0; j as usize + 1];
        c[j as usize] = 1.0;
        let mut name = String::from("monomial:");
        name.push_str(&j.to_string());
        Self::polynomial(&c).renamed(name)
    }

    /// `(z - x)^j`, the integrand of the `j`-th central moment at `x`.
    pub fn central_monomial(x: f64, j: u32) -> Self {
        // binomial expansion, lowest power first
        let mut c = alloc::vec![0.0; j as usize + 1];
        let mut binom = 1.0;
        for i in 0..=j {
            c[i as usize] = binom * math::powi(-x, j - i);
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
        let mut name = String::from("central:");
        name.push_str(&j.to_string());
        Self::new(name, move |z| math::powi(z - x, j)).with_poly_degree(j).with_poly_meta(c)
    }

    /// `√x`, in `Lip_1(1/2)` on `[0, ∞)`.
    pub fn sqrt() -> Self {
        Self::new("sqrt", math::sqrt).with_growth(Growth::Polynomial(1))
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(&[c]).renamed("constant")
    }

    /// `Σ cᵢ xⁱ` (coefficients lowest power first) with exact derivatives.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        let mut c: Vec<f64> = coeffs.to_vec();
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        let degree = (c.len() - 1) as u32;
        let d1c = derivative(&c);
        let d2c = derivative(&d1c);
        let mut name = String::from("poly:");
        for (i, v) in c.iter().enumerate() {
            if i > 0 {
                name.push(',');
            }
            name.push_str(&alloc::format!("{v}"));
        }
        let (c0, c1, c2) = (c.clone(), d1c, d2c);
        let mut f = Self::new(name, move |x| horner(&c0, x)).with_poly_degree(degree);
        f.d1 = Some(Arc::new(move |x| horner(&c1, x)));
        f.d2 = Some(Arc::new(move |x| horner(&c2, x)));
        f
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn with_poly_meta(mut self, coeffs: Vec<f64>) -> Self {
        let d1c = derivative(&coeffs);
        let d2c = derivative(&d1c);
        self.d1 = Some(Arc::new(move |x| horner(&d1c, x)));
        self.d2 = Some(Arc::new(move |x| horner(&d2c, x)));
        self
    }

    /// Pointwise linear combination `aΦ + bΨ`.
    pub fn combine(a: f64, f: &TestFunction, b: f64, g: &TestFunction) -> Self {
        let (f, g) = (f.clone(), g.clone());
        let mut name = String::from(f.name());
        name.push('+');
        name.push_str(g.name());
        let degree = match (f.poly_degree, g.poly_degree) {
            (Some(p), Some(q)) => Some(p.max(q)),
            _ => None,
        };
        let growth = match (f.growth, g.growth) {
            (Growth::ExpRate(c), Growth::ExpRate(d)) => Growth::ExpRate(c.max(d)),
            (Growth::ExpRate(c), _) | (_, Growth::ExpRate(c)) => Growth::ExpRate(c),
            (Growth::Polynomial(p), Growth::Polynomial(q)) => Growth::Polynomial(p.max(q)),
            (Growth::Polynomial(p), Growth::Bounded) | (Growth::Bounded, Growth::Polynomial(p)) => {
                Growth::Polynomial(p)
            }
            (Growth::Bounded, Growth::Bounded) => Growth::Bounded,
        };
        let mut out = Self::new(name, move |x| a * f.eval(x) + b * g.eval(x)).with_growth(growth);
        out.poly_degree = degree;
        out
    }
}

const PROBE: [f64; 9] = [0.05, 0.2, 0.5, 0.9, 1.0, 1.5, 2.0, 3.0, 5.0];

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return alloc::vec![0.0];
    }
    c.iter().enumerate().skip(1).map(|(i, &v)| i as f64 * v).collect()
}
