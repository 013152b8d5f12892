//! Named test functions selectable from configs and the C API.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Const(f64),
    Identity,
    Square,
    Sin,
    /// `|s - c|`
    AbsDev(f64),
    Sqrt,
    /// `e^{-s}`
    ExpDecay,
}

impl TestFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            TestFunction::Const(c) => c,
            TestFunction::Identity => s,
            TestFunction::Square => s * s,
            TestFunction::Sin => s.sin(),
            TestFunction::AbsDev(c) => (s - c).abs(),
            TestFunction::Sqrt => s.max(0.0).sqrt(),
            TestFunction::ExpDecay => (-s).exp(),
        }
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + Sync + Copy + '_ {
        move |s| self.eval(s)
    }

    /// Affine in `s`, so every second difference vanishes.
    pub fn is_affine(&self) -> bool {
        matches!(self, TestFunction::Const(_) | TestFunction::Identity)
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Const(c) => write!(f, "const({c})"),
            TestFunction::Identity => write!(f, "identity"),
            TestFunction::Square => write!(f, "square"),
            TestFunction::Sin => write!(f, "sin"),
            TestFunction::AbsDev(c) => write!(f, "absdev({c})"),
            TestFunction::Sqrt => write!(f, "sqrt"),
            TestFunction::ExpDecay => write!(f, "expdecay"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::InvalidParameter(format!("unbalanced parentheses in `{s}`")))?;
                let v: f64 = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("`{inner}` is not a number in `{s}`")))?;
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!("argument of `{s}` is not finite")));
                }
                (s[..open].trim(), Some(v))
            }
            None => (s, None),
        };
        match (name, arg) {
            ("const", c) => Ok(TestFunction::Const(c.unwrap_or(1.0))),
            ("identity", None) => Ok(TestFunction::Identity),
            ("square", None) => Ok(TestFunction::Square),
            ("sin", None) => Ok(TestFunction::Sin),
            ("absdev", c) => Ok(TestFunction::AbsDev(c.unwrap_or(0.5))),
            ("sqrt", None) => Ok(TestFunction::Sqrt),
            ("expdecay", None) => Ok(TestFunction::ExpDecay),
            _ => Err(Error::InvalidParameter(format!(
                "unknown function `{s}` (expected const(c), identity, square, sin, absdev(c), sqrt, expdecay)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for f in [
            TestFunction::Const(2.5),
            TestFunction::Identity,
            TestFunction::Square,
            TestFunction::Sin,
            TestFunction::AbsDev(0.25),
            TestFunction::Sqrt,
            TestFunction::ExpDecay,
        ] {
            assert_eq!(f.to_string().parse::<TestFunction>().unwrap(), f);
        }
        assert_eq!("const".parse::<TestFunction>().unwrap(), TestFunction::Const(1.0));
        assert_eq!(" absdev( 0.5 ) ".parse::<TestFunction>().unwrap(), TestFunction::AbsDev(0.5));
        assert!("cube".parse::<TestFunction>().is_err());
        assert!("absdev(x)".parse::<TestFunction>().is_err());
        assert!("sin(2)".parse::<TestFunction>().is_err());
    }

    #[test]
    fn values() {
        assert_eq!(TestFunction::AbsDev(0.5).eval(0.2), 0.3);
        assert_eq!(TestFunction::Square.eval(3.0), 9.0);
        assert_eq!(TestFunction::Sqrt.eval(0.25), 0.5);
    }
}
