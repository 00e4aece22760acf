//! Textual form of Grassmann elements.
//!
//! Elements print as sums of `coeff*g*g*...` terms. Slots `1..=k` are named
//! `zeta1..zetak` (or `xi1..xik`), slots `k+1..=2k` are `zbar1..zbark` (or
//! `eta1..etak`). The parser accepts either naming, `ztop` for the top
//! monomial, `i` for the imaginary unit, decimal literals, parentheses,
//! `+ - * /` and implicit multiplication by juxtaposition. Division is only
//! allowed by nonzero scalars.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::blade::Blade;
use super::coeff::{complex, format_coeff, imag_unit, parse_decimal, Coeff};
use super::element::GrassmannElement;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Naming {
    /// `zeta_r`, `zbar_r`
    #[default]
    Zeta,
    /// `xi_r`, `eta_r`
    XiEta,
}

impl Naming {
    fn slot_name(self, k: usize, slot: usize) -> String {
        let (hol, anti) = match self {
            Naming::Zeta => ("zeta", "zbar"),
            Naming::XiEta => ("xi", "eta"),
        };
        if slot <= k {
            format!("{hol}{slot}")
        } else {
            format!("{anti}{}", slot - k)
        }
    }
}

impl GrassmannElement {
    pub fn to_text(&self, naming: Naming) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (blade, c)) in self.terms().enumerate() {
            let negative_real = c.im.is_zero() && c.re.is_negative();
            let shown = if negative_real { -c.clone() } else { c.clone() };
            if idx == 0 {
                if negative_real {
                    out.push('-');
                }
            } else {
                out.push_str(if negative_real { " - " } else { " + " });
            }
            let gens: Vec<String> = blade
                .slots()
                .into_iter()
                .map(|s| naming.slot_name(self.pairs(), s))
                .collect();
            if gens.is_empty() {
                out.push_str(&format_coeff(&shown));
            } else {
                if !shown.is_one() {
                    out.push_str(&format_coeff(&shown));
                    out.push('*');
                }
                out.push_str(&gens.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(Naming::Zeta))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(Error::Syntax {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    k: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }

    fn expr(&mut self) -> Result<GrassmannElement> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.try_add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.try_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GrassmannElement> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.multiply(&self.factor()?)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let d = self.factor()?;
                    let inv = scalar_inverse(&d).ok_or(Error::Syntax {
                        column: col,
                        message: "division by a non-scalar or zero".into(),
                    })?;
                    acc = acc.scale(&inv);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.multiply(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<GrassmannElement> {
        let col = self.col();
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(Error::Syntax {
                column: col,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Minus => Ok(-self.factor()?),
            Tok::Num(s) => {
                let r = parse_decimal(&s).ok_or(Error::Syntax {
                    column: col,
                    message: format!("malformed number `{s}`"),
                })?;
                GrassmannElement::scalar(self.k, complex(r, Zero::zero()))
            }
            Tok::Ident(name) => self.ident(&name, col),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        column: self.col(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            other => Err(Error::Syntax {
                column: col,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn ident(&self, name: &str, col: usize) -> Result<GrassmannElement> {
        match name {
            "i" => return GrassmannElement::scalar(self.k, imag_unit()),
            "ztop" => return Ok(GrassmannElement::monomial(Coeff::one(), Blade::top(self.k)?)),
            _ => {}
        }
        let split = name.find(|c: char| c.is_ascii_digit());
        let unknown = || Error::UnknownIdentifier {
            name: name.to_string(),
            column: col,
        };
        let (stem, digits) = match split {
            Some(p) => (&name[..p], &name[p..]),
            None => return Err(unknown()),
        };
        let idx: usize = digits.parse().map_err(|_| unknown())?;
        let offset = match stem {
            "zeta" | "xi" => 0,
            "zbar" | "eta" => self.k,
            _ => return Err(unknown()),
        };
        if idx == 0 || idx > self.k {
            return Err(unknown());
        }
        GrassmannElement::generator(self.k, offset + idx)
    }
}

fn scalar_inverse(d: &GrassmannElement) -> Option<Coeff> {
    let unit = Blade::unit(d.pairs()).ok()?;
    if d.len() != 1 {
        return None;
    }
    let c = d.coefficient(&unit);
    if c.is_zero() {
        return None;
    }
    Some(c.inv())
}

/// Parses an element over `k` generator pairs.
pub fn parse_element(text: &str, k: usize) -> Result<GrassmannElement> {
    Blade::unit(k)?;
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        k,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Syntax {
            column: p.col(),
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::coeff::{rational, real};
    use super::*;

    #[test]
    fn parse_berezin_inputs() {
        let f = parse_element("5*ztop + 3*zeta1", 1).unwrap();
        assert_eq!(f.berezin_top(), real(5));
        let f = parse_element("(zeta1)*(i*zbar1)", 1).unwrap();
        assert_eq!(f.berezin_top(), imag_unit());
    }

    #[test]
    fn juxtaposition_and_aliases() {
        let a = parse_element("xi1 eta1", 1).unwrap();
        let b = parse_element("zeta1zbar1", 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, parse_element("ztop", 1).unwrap());
        assert_eq!(
            parse_element("zbar1 zeta1", 1).unwrap(),
            -parse_element("ztop", 1).unwrap()
        );
    }

    #[test]
    fn division_and_decimals() {
        let a = parse_element("0.5*zeta2 + 3/4", 2).unwrap();
        let b = GrassmannElement::from_terms(
            2,
            [
                (Blade::new(2, &[2]).unwrap(), complex(rational(1, 2), rational(0, 1))),
                (Blade::unit(2).unwrap(), complex(rational(3, 4), rational(0, 1))),
            ],
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(parse_element("1/zeta1", 1).is_err());
        assert!(parse_element("1/0", 1).is_err());
    }

    #[test]
    fn errors_carry_columns() {
        assert!(matches!(
            parse_element("zeta1 +", 1),
            Err(Error::Syntax { column: 8, .. })
        ));
        assert!(matches!(
            parse_element("zeta3", 2),
            Err(Error::UnknownIdentifier { column: 1, .. })
        ));
        assert!(matches!(
            parse_element("foo1", 2),
            Err(Error::UnknownIdentifier { .. })
        ));
        assert!(matches!(parse_element("(zeta1", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_element("zeta1 $", 2), Err(Error::Syntax { column: 7, .. })));
    }

    #[test]
    fn printing() {
        let f = parse_element("-zeta1 + (2-i)*zbar1 zeta2 - 3/2", 2).unwrap();
        assert_eq!(f.to_text(Naming::Zeta), "-3/2 - zeta1 + (-2+i)*zeta2*zbar1");
        assert_eq!(f.to_text(Naming::XiEta), "-3/2 - xi1 + (-2+i)*xi2*eta1");
        assert_eq!(GrassmannElement::zero(1).unwrap().to_string(), "0");
        let g = parse_element("i*zeta1", 1).unwrap();
        assert_eq!(g.to_string(), "i*zeta1");
    }
}
