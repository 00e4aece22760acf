//! Second-order forward-mode differentiation over [`Expr`].

use nalgebra::{DMatrix, DVector};

use super::expr::Expr;
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// Working representation: the Hessian is kept as its upper triangle so the
/// assembled matrix is symmetric bit for bit.
#[derive(Clone, Debug)]
struct RawJet {
    v: f64,
    g: Vec<f64>,
    h: Vec<f64>,
}

fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl RawJet {
    fn constant(v: f64, n: usize) -> RawJet {
        RawJet {
            v,
            g: vec![0.0; n],
            h: vec![0.0; tri_len(n)],
        }
    }

    fn variable(v: f64, slot: usize, n: usize) -> RawJet {
        let mut j = RawJet::constant(v, n);
        j.g[slot] = 1.0;
        j
    }

    fn n(&self) -> usize {
        self.g.len()
    }

    /// Upper triangle of `a bᵀ + b aᵀ`.
    fn outer_sym(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut out = Vec::with_capacity(tri_len(n));
        for i in 0..n {
            for j in i..n {
                out.push(a[i] * b[j] + a[j] * b[i]);
            }
        }
        out
    }

    fn add(&self, o: &RawJet) -> RawJet {
        RawJet {
            v: self.v + o.v,
            g: self.g.iter().zip(&o.g).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
        }
    }

    fn neg(&self) -> RawJet {
        RawJet {
            v: -self.v,
            g: self.g.iter().map(|a| -a).collect(),
            h: self.h.iter().map(|a| -a).collect(),
        }
    }

    fn mul(&self, o: &RawJet) -> RawJet {
        let cross = RawJet::outer_sym(&self.g, &o.g);
        RawJet {
            v: self.v * o.v,
            g: self
                .g
                .iter()
                .zip(&o.g)
                .map(|(a, b)| a * o.v + self.v * b)
                .collect(),
            h: self
                .h
                .iter()
                .zip(&o.h)
                .zip(&cross)
                .map(|((ha, hb), c)| ha * o.v + self.v * hb + c)
                .collect(),
        }
    }

    /// Chain rule for a scalar function with derivatives `d1`, `d2` at `self.v`.
    fn chain(&self, value: f64, d1: f64, d2: f64) -> RawJet {
        let n = self.n();
        let mut h = Vec::with_capacity(tri_len(n));
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                h.push(d1 * self.h[idx] + d2 * self.g[i] * self.g[j]);
                idx += 1;
            }
        }
        RawJet {
            v: value,
            g: self.g.iter().map(|a| d1 * a).collect(),
            h,
        }
    }
}

fn finite(j: RawJet, what: &str) -> Result<RawJet> {
    if j.v.is_finite() && j.g.iter().all(|v| v.is_finite()) && j.h.iter().all(|v| v.is_finite()) {
        Ok(j)
    } else {
        Err(Error::NonFinite(format!("{what} produced a non-finite value")))
    }
}

fn eval_raw(e: &Expr, x: &[f64], n: usize) -> Result<RawJet> {
    let out = match e {
        Expr::Const(c) => RawJet::constant(*c, n),
        Expr::Var(j) => RawJet::variable(x[*j], *j, n),
        Expr::Neg(a) => eval_raw(a, x, n)?.neg(),
        Expr::Add(a, b) => eval_raw(a, x, n)?.add(&eval_raw(b, x, n)?),
        Expr::Sub(a, b) => eval_raw(a, x, n)?.add(&eval_raw(b, x, n)?.neg()),
        Expr::Mul(a, b) => eval_raw(a, x, n)?.mul(&eval_raw(b, x, n)?),
        Expr::Div(a, b) => {
            let d = eval_raw(b, x, n)?;
            if d.v == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            let r = 1.0 / d.v;
            eval_raw(a, x, n)?.mul(&d.chain(r, -r * r, 2.0 * r * r * r))
        }
        Expr::Pow(a, p) => {
            let u = eval_raw(a, x, n)?;
            let p = *p;
            if p == 0 {
                RawJet::constant(1.0, n)
            } else {
                if p < 0 && u.v == 0.0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                let pf = p as f64;
                let d1 = pf * u.v.powi(p - 1);
                let d2 = if p == 1 { 0.0 } else { pf * (pf - 1.0) * u.v.powi(p - 2) };
                u.chain(u.v.powi(p), d1, d2)
            }
        }
        Expr::Sqrt(a) => {
            let u = eval_raw(a, x, n)?;
            if u.v <= 0.0 || u.v.is_nan() {
                return Err(Error::Domain(format!("sqrt of nonpositive value {}", u.v)));
            }
            let s = u.v.sqrt();
            u.chain(s, 0.5 / s, -0.25 / (s * u.v))
        }
        Expr::Exp(a) => {
            let u = eval_raw(a, x, n)?;
            let ev = u.v.exp();
            u.chain(ev, ev, ev)
        }
    };
    finite(out, "evaluation")
}

impl Expr {
    /// Value, gradient and Hessian at `x`, differentiating with respect to
    /// all `x.len()` coordinates.
    pub fn jet2(&self, x: &[f64]) -> Result<Jet2> {
        if self.arity() > x.len() {
            return Err(Error::Dimension {
                expected: self.arity(),
                found: x.len(),
            });
        }
        let n = x.len();
        let raw = eval_raw(self, x, n)?;
        let mut hessian = DMatrix::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                hessian[(i, j)] = raw.h[idx];
                hessian[(j, i)] = raw.h[idx];
                idx += 1;
            }
        }
        Ok(Jet2 {
            value: raw.v,
            gradient: DVector::from_vec(raw.g),
            hessian,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::expr::parse;
    use super::*;

    #[test]
    fn quadratic_jet() {
        let j = parse("x1^2 + x2^2").unwrap().jet2(&[1.0, 2.0]).unwrap();
        assert_eq!(j.value, 5.0);
        assert_eq!(j.gradient.as_slice(), &[2.0, 4.0]);
        assert_eq!(j.hessian, DMatrix::identity(2, 2) * 2.0);
    }

    #[test]
    fn f2_summand_at_origin() {
        let j = parse("-3*x1 + 0.5*sqrt(x1^2+1)").unwrap().jet2(&[0.0]).unwrap();
        assert_eq!(j.gradient[0], -3.0);
        assert_eq!(j.hessian[(0, 0)], 0.5);
    }

    #[test]
    fn mixed_partials() {
        // f = x1 x2^2 + exp(x1 x2)
        let e = parse("x1*x2^2 + exp(x1*x2)").unwrap();
        let (a, b) = (0.3, -0.7);
        let j = e.jet2(&[a, b]).unwrap();
        let ex = (a * b).exp();
        assert!((j.gradient[0] - (b * b + b * ex)).abs() < 1e-14);
        assert!((j.gradient[1] - (2.0 * a * b + a * ex)).abs() < 1e-14);
        assert!((j.hessian[(0, 0)] - b * b * ex).abs() < 1e-14);
        assert!((j.hessian[(0, 1)] - (2.0 * b + ex + a * b * ex)).abs() < 1e-14);
        assert!((j.hessian[(1, 1)] - (2.0 * a + a * a * ex)).abs() < 1e-14);
        assert_eq!(j.hessian[(0, 1)], j.hessian[(1, 0)]);
    }

    #[test]
    fn division_and_negative_powers() {
        let e = parse("1/x1 + x1^-2").unwrap();
        let x = 1.5f64;
        let j = e.jet2(&[x]).unwrap();
        assert!((j.gradient[0] - (-1.0 / (x * x) - 2.0 / x.powi(3))).abs() < 1e-14);
        assert!((j.hessian[(0, 0)] - (2.0 / x.powi(3) + 6.0 / x.powi(4))).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(parse("sqrt(x1)").unwrap().jet2(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(parse("sqrt(x1)").unwrap().jet2(&[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(parse("1/x1").unwrap().jet2(&[0.0]), Err(Error::Domain(_))));
        assert!(matches!(parse("exp(x1)").unwrap().jet2(&[1000.0]), Err(Error::NonFinite(_))));
        assert!(matches!(parse("x2").unwrap().jet2(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn even_function_has_zero_gradient_at_origin() {
        let j = parse("x1^2 + x2^4 + sqrt(x1^2 + x2^2 + 1)").unwrap().jet2(&[0.0, 0.0]).unwrap();
        assert_eq!(j.gradient.as_slice(), &[0.0, 0.0]);
        let j = parse("x1^2 + 3*x2 + x2^2").unwrap().jet2(&[0.0, 0.0]).unwrap();
        assert_eq!(j.gradient.as_slice(), &[0.0, 3.0]);
    }
}
