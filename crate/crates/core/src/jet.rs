//! Fourth-order Taylor jets.
//!
//! A [`Jet4`] carries a value and its first four derivatives at one point.
//! Derivatives are stored raw (not divided by factorials), so `d2` is f″ and
//! `d4` is f⁗ exactly as they appear in the rule and error formulas.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Value and raw derivatives of orders 1 through 4 at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet4 {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

// Binomial rows C(k, j) for k <= 4.
const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

impl Jet4 {
    pub const fn new(d0: f64, d1: f64, d2: f64, d3: f64, d4: f64) -> Self {
        Jet4 { d0, d1, d2, d3, d4 }
    }

    pub const fn constant(c: f64) -> Self {
        Jet4::new(c, 0.0, 0.0, 0.0, 0.0)
    }

    /// Seed jet of the independent variable at `x0`.
    pub fn variable(x0: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidInput(format!(
                "jet seed point must be finite, got {x0}"
            )));
        }
        Ok(Jet4::new(x0, 1.0, 0.0, 0.0, 0.0))
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.d0, self.d1, self.d2, self.d3, self.d4]
    }

    pub fn from_array(d: [f64; 5]) -> Self {
        Jet4::new(d[0], d[1], d[2], d[3], d[4])
    }

    /// Raw derivative of order `k` (0 is the value).
    pub fn derivative(&self, k: usize) -> f64 {
        self.to_array()[k]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Quotient `self / rhs`, solved order by order from `self = q * rhs`.
    pub fn checked_div(self, rhs: Jet4) -> Result<Jet4> {
        let u = self.to_array();
        let v = rhs.to_array();
        if v[0] == 0.0 {
            return Err(Error::Pole { at: v[0] });
        }
        let mut q = [0.0; 5];
        q[0] = u[0] / v[0];
        for k in 1..5 {
            let mut acc = u[k];
            for j in 0..k {
                acc -= BINOM[k][j] * q[j] * v[k - j];
            }
            q[k] = acc / v[0];
        }
        Ok(Jet4::from_array(q))
    }

    /// `self^n` by square-and-multiply. Negative exponents divide into one.
    pub fn powi(self, n: i64) -> Result<Jet4> {
        let pos = pow_by_squaring(self, n.unsigned_abs(), Jet4::constant(1.0), |x, y| x * y);
        if n < 0 {
            Jet4::constant(1.0).checked_div(pos)
        } else {
            Ok(pos)
        }
    }

    /// Jet of `g ∘ self` given raw derivatives `g0..g4` of `g` at `self.d0`
    /// (Faà di Bruno up to fourth order).
    pub fn compose(self, g: [f64; 5]) -> Jet4 {
        let [_, u1, u2, u3, u4] = self.to_array();
        let [g0, g1, g2, g3, g4] = g;
        let u1s = u1 * u1;
        Jet4 {
            d0: g0,
            d1: g1 * u1,
            d2: g2 * u1s + g1 * u2,
            d3: g3 * u1s * u1 + 3.0 * g2 * u1 * u2 + g1 * u3,
            d4: g4 * u1s * u1s
                + 6.0 * g3 * u1s * u2
                + g2 * (3.0 * u2 * u2 + 4.0 * u1 * u3)
                + g1 * u4,
        }
    }

    pub fn apply(self, func: Elementary) -> Result<Jet4> {
        Ok(self.compose(func.derivatives(self.d0)?))
    }
}

/// Square-and-multiply shared by the real and jet evaluators so both follow
/// the same sequence of roundings.
pub(crate) fn pow_by_squaring<T: Copy>(base: T, mut n: u64, one: T, mul: impl Fn(T, T) -> T) -> T {
    let mut acc: Option<T> = None;
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = Some(match acc {
                Some(a) => mul(a, sq),
                None => sq,
            });
        }
        n >>= 1;
        if n > 0 {
            sq = mul(sq, sq);
        }
    }
    acc.unwrap_or(one)
}

impl Add for Jet4 {
    type Output = Jet4;
    fn add(self, r: Jet4) -> Jet4 {
        Jet4::new(self.d0 + r.d0, self.d1 + r.d1, self.d2 + r.d2, self.d3 + r.d3, self.d4 + r.d4)
    }
}

impl Sub for Jet4 {
    type Output = Jet4;
    fn sub(self, r: Jet4) -> Jet4 {
        Jet4::new(self.d0 - r.d0, self.d1 - r.d1, self.d2 - r.d2, self.d3 - r.d3, self.d4 - r.d4)
    }
}

impl Neg for Jet4 {
    type Output = Jet4;
    fn neg(self) -> Jet4 {
        Jet4::new(-self.d0, -self.d1, -self.d2, -self.d3, -self.d4)
    }
}

impl Mul for Jet4 {
    type Output = Jet4;
    /// Leibniz rule with binomial weights. Terms `j` and `k − j` are paired
    /// so the product is bitwise commutative.
    fn mul(self, r: Jet4) -> Jet4 {
        let f = self.to_array();
        let g = r.to_array();
        let mut h = [0.0; 5];
        for (k, hk) in h.iter_mut().enumerate() {
            let mut acc = if k == 0 { 0.0 } else { f[0] * g[k] + f[k] * g[0] };
            for j in 1..k.div_ceil(2) {
                acc += BINOM[k][j] * (f[j] * g[k - j] + f[k - j] * g[j]);
            }
            if k % 2 == 0 {
                let half = k / 2;
                acc += BINOM[k][half] * (f[half] * g[half]);
            }
            *hk = acc;
        }
        Jet4::from_array(h)
    }
}

impl fmt::Display for Jet4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {}, {})", self.d0, self.d1, self.d2, self.d3, self.d4)
    }
}

/// Elementary functions understood by the jet and expression evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
    Sinh,
    Cosh,
}

/// `|cos x|` below this is treated as a pole of `tan`.
const TAN_POLE_TOL: f64 = 1e-12;

impl Elementary {
    pub const ALL: [Elementary; 9] = [
        Elementary::Sin,
        Elementary::Cos,
        Elementary::Tan,
        Elementary::Exp,
        Elementary::Log,
        Elementary::Sqrt,
        Elementary::Atan,
        Elementary::Sinh,
        Elementary::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sqrt => "sqrt",
            Elementary::Atan => "atan",
            Elementary::Sinh => "sinh",
            Elementary::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Elementary> {
        Elementary::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Whether `x` lies in the domain where the function and its first four
    /// derivatives are finite.
    pub fn check_domain(self, x: f64) -> Result<()> {
        let ok = match self {
            Elementary::Log | Elementary::Sqrt => x > 0.0,
            Elementary::Tan => x.cos().abs() >= TAN_POLE_TOL,
            _ => true,
        };
        if ok && !x.is_nan() {
            Ok(())
        } else {
            Err(Error::Domain { func: self.name(), value: x })
        }
    }

    pub fn eval(self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self {
            Elementary::Sin => x.sin(),
            Elementary::Cos => x.cos(),
            Elementary::Tan => x.tan(),
            Elementary::Exp => x.exp(),
            Elementary::Log => x.ln(),
            Elementary::Sqrt => x.sqrt(),
            Elementary::Atan => x.atan(),
            Elementary::Sinh => x.sinh(),
            Elementary::Cosh => x.cosh(),
        })
    }

    /// Raw derivatives of orders 0..=4 at `x`.
    pub fn derivatives(self, x: f64) -> Result<[f64; 5]> {
        let v = self.eval(x)?;
        Ok(match self {
            Elementary::Sin => {
                let c = x.cos();
                [v, c, -v, -c, v]
            }
            Elementary::Cos => {
                let s = x.sin();
                [v, -s, -v, s, v]
            }
            Elementary::Tan => {
                let t2 = v * v;
                let sec2 = 1.0 + t2;
                [
                    v,
                    sec2,
                    2.0 * v * sec2,
                    2.0 * sec2 * (1.0 + 3.0 * t2),
                    8.0 * v * sec2 * (2.0 + 3.0 * t2),
                ]
            }
            Elementary::Exp => [v; 5],
            Elementary::Log => {
                let r = 1.0 / x;
                let r2 = r * r;
                [v, r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]
            }
            Elementary::Sqrt => {
                // d^k sqrt(x) = c_k * sqrt(x) / x^k
                let r = 1.0 / x;
                [v, 0.5 * v * r, -0.25 * v * r * r, 0.375 * v * r * r * r, -0.9375 * v * r * r * r * r]
            }
            Elementary::Atan => {
                let x2 = x * x;
                let q = 1.0 / (1.0 + x2);
                let q2 = q * q;
                [
                    v,
                    q,
                    -2.0 * x * q2,
                    (6.0 * x2 - 2.0) * q2 * q,
                    24.0 * x * (1.0 - x2) * q2 * q2,
                ]
            }
            Elementary::Sinh => {
                let c = x.cosh();
                [v, c, v, c, v]
            }
            Elementary::Cosh => {
                let s = x.sinh();
                [v, s, v, s, v]
            }
        })
    }
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
