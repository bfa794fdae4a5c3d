//! Polynomial expressions in the chart coordinates.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := ('-' | '+') unary | primary
//! primary := number | variable | '(' expr ')'
//! variable:= 'x' k | 'y' k | 'z'        (1 <= k <= n)
//! ```
//!
//! The expanded polynomial must have total degree at most two.

use thiserror::Error;

use crate::field::VectorFieldExpr;
use crate::poly::Poly;

pub const MAX_DEGREE: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    /// `position` is a zero-based character offset into the input.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("expression `{text}` has degree {degree}, at most {max} is allowed")]
    Degree {
        text: String,
        degree: usize,
        max: usize,
    },
}

/// Parses `text` as a polynomial on the chart of dimension `2n+1`.
pub fn parse_expression(text: &str, n: usize) -> Result<Poly, ExprError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        n,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error(format!("unexpected `{}`", parser.chars[parser.pos])));
    }
    if poly.degree() > MAX_DEGREE {
        return Err(ExprError::Degree {
            text: text.to_string(),
            degree: poly.degree(),
            max: MAX_DEGREE,
        });
    }
    Ok(poly)
}

/// Parses one expression per component into a vector field.
pub fn parse_field(
    name: &str,
    components: &[String],
    n: usize,
) -> Result<VectorFieldExpr, ExprError> {
    let dim = 2 * n + 1;
    if components.len() != dim {
        return Err(ExprError::Parse {
            position: 0,
            message: format!(
                "field `{name}` has {} components, expected {dim}",
                components.len()
            ),
        });
    }
    let polys = components
        .iter()
        .map(|c| parse_expression(c, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorFieldExpr::new(name, polys).expect("components were degree-checked"))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ExprError> {
        let mut acc = self.unary()?;
        while let Some('*') = self.peek() {
            self.pos += 1;
            acc = acc * self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ExprError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Poly, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error("expected `)`")),
                }
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('x' | 'y' | 'z') => self.variable(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Poly, ExprError> {
        let start = self.pos;
        let mut end = start;
        let digits = |c: char| c.is_ascii_digit() || c == '.';
        while end < self.chars.len() && digits(self.chars[end]) {
            end += 1;
        }
        if end < self.chars.len() && matches!(self.chars[end], 'e' | 'E') {
            let mut k = end + 1;
            if k < self.chars.len() && matches!(self.chars[k], '+' | '-') {
                k += 1;
            }
            if k < self.chars.len() && self.chars[k].is_ascii_digit() {
                end = k;
                while end < self.chars.len() && self.chars[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text: String = self.chars[start..end].iter().collect();
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("malformed number `{text}`")))?;
        self.pos = end;
        Ok(Poly::constant(self.dim(), value))
    }

    fn variable(&mut self) -> Result<Poly, ExprError> {
        let start = self.pos;
        let head = self.chars[self.pos];
        self.pos += 1;
        if head == 'z' {
            return Ok(Poly::var(self.dim(), 2 * self.n));
        }
        let digits_start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[digits_start..self.pos].iter().collect();
        let k: usize = match digits.parse() {
            Ok(k) if (1..=self.n).contains(&k) => k,
            _ => {
                self.pos = start;
                return Err(self.error(format!(
                    "unknown variable `{head}{digits}` (expected {head}1..{head}{})",
                    self.n
                )));
            }
        };
        let index = if head == 'x' { k - 1 } else { self.n + k - 1 };
        Ok(Poly::var(self.dim(), index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperplane_differential() {
        let f = parse_expression("x1 - y3", 3).unwrap();
        let df: Vec<f64> = f.gradient().iter().map(|g| g.eval(&[0.0; 7])).collect();
        assert_eq!(df, vec![1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn cubic_is_rejected() {
        assert!(matches!(
            parse_expression("x1*x1*x1", 3),
            Err(ExprError::Degree { degree: 3, .. })
        ));
    }

    #[test]
    fn canonical_normalization() {
        let f = parse_expression("2*(x3 - y1) + 0.5*z*0", 3).unwrap();
        assert_eq!(f.to_string(), "2*x3 - 2*y1");
    }

    #[test]
    fn precedence_and_unary_minus() {
        let f = parse_expression("-x1 + 2*y2*z - -3", 2).unwrap();
        assert_eq!(f.eval(&[1.0, 0.0, 0.0, 2.0, 0.5]), -1.0 + 2.0 + 3.0);
        let g = parse_expression("1.5e-1*(x1+1)*(x1-1)", 2).unwrap();
        assert!((g.eval(&[2.0, 0.0, 0.0, 0.0, 0.0]) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expression("x1 + * y2", 3) {
            Err(ExprError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        match parse_expression("x1 + x4", 3) {
            Err(ExprError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        match parse_expression("(x1", 3) {
            Err(ExprError::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_expression("x1 y2", 3).is_err());
        assert!(parse_expression("", 3).is_err());
    }
}
