//! Numeric parameter expressions such as `pi/8`, `2pi/3` or `cos(pi/9)`.

use std::f64::consts::PI;

pub fn eval(src: &str) -> Result<f64, String> {
    let mut p = Parser { s: src.as_bytes(), i: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(format!("unexpected '{}' in '{src}'", &src[p.i..]));
    }
    if !v.is_finite() {
        return Err(format!("'{src}' is not finite"));
    }
    Ok(v)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let r = self.term()?;
            v = if c == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.factor()?;
        loop {
            match self.peek() {
                Some(c @ (b'*' | b'/')) => {
                    self.i += 1;
                    let r = self.factor()?;
                    v = if c == b'*' { v * r } else { v / r };
                }
                // implicit product: 2pi, 3(1+x)
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => v *= self.factor()?,
                _ => return Ok(v),
            }
        }
    }

    fn factor(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.factor()?)
            }
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                self.close()?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b".eE".contains(&self.s[self.i])) {
                    // keep exponent signs attached: 1e-6
                    if b"eE".contains(&self.s[self.i]) && matches!(self.s.get(self.i + 1), Some(b'-' | b'+')) {
                        self.i += 1;
                    }
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                text.parse().map_err(|_| format!("bad number '{text}'"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                if name == "pi" {
                    return Ok(PI);
                }
                let f: fn(f64) -> f64 = match name {
                    "sqrt" => f64::sqrt,
                    "cos" => f64::cos,
                    "sin" => f64::sin,
                    "tan" => f64::tan,
                    _ => return Err(format!("unknown name '{name}'")),
                };
                if self.peek() != Some(b'(') {
                    return Err(format!("{name} needs parentheses"));
                }
                self.i += 1;
                let v = self.expr()?;
                self.close()?;
                Ok(f(v))
            }
            Some(c) => Err(format!("unexpected '{}'", c as char)),
            None => Err("empty expression".into()),
        }
    }

    fn close(&mut self) -> Result<(), String> {
        if self.peek() == Some(b')') {
            self.i += 1;
            Ok(())
        } else {
            Err("missing ')'".into())
        }
    }
}
