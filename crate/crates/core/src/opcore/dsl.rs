//! Text form of operators.
//!
//! ```text
//! operator := [ "vars" INT ":" ] ( sum | "0" "[" INT "x" INT "]" )
//! sum      := term ( "+" term )*
//! term     := matrix [ "*" monomial ]
//! matrix   := "[" row ( "," row )* "]"
//! row      := "[" entry ( "," entry )* "]"
//! entry    := part ( ("+" | "-") part )*        e.g. 1, -2.5, 3i, -i, 1-0.5i
//! part     := ["-"] ( NUMBER ["i"] | "i" )
//! monomial := deriv ( "*" deriv )*
//! deriv    := ( "Dt" | "Dx" | "Dy" | "Dz" | "D" INT ) [ "^" INT ]
//! ```
//!
//! `Dt` is slot 0 (`D0`), `Dx`/`Dy`/`Dz` are slots 1–3. Without a `vars`
//! header the variable count is the highest slot used plus one. Whitespace
//! and newlines are free. The printer always writes the header and uses the
//! shortest round-trip float form, so `parse(print(L)) == L` exactly.

use std::fmt::Write as _;

use super::{MultiIndex, Operator};
use crate::error::{Error, Result};
use crate::linalg::{Mat, C64};

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(ch) = self.peek_raw() {
            if ch.is_whitespace() {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, ch: char) -> bool {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.eat(ch) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{ch}`")))
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(word) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek_raw(), Some(ch) if ch.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    /// Unsigned decimal float, optionally with an exponent.
    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut p = self.pos;
        while p < bytes.len() && (bytes[p].is_ascii_digit() || bytes[p] == b'.') {
            p += 1;
        }
        if p == start {
            return Err(self.error("expected a number"));
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            let digits = q;
            while q < bytes.len() && bytes[q].is_ascii_digit() {
                q += 1;
            }
            if q > digits {
                p = q;
            }
        }
        let text = &self.src[start..p];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(format!("malformed number `{text}`")))?;
        self.pos = p;
        Ok(value)
    }

    fn entry(&mut self) -> Result<C64> {
        // Components accumulate separately so the sign of a zero survives.
        let mut re: Option<f64> = None;
        let mut im: Option<f64> = None;
        let mut first = true;
        loop {
            let sign = if self.eat('-') {
                -1.0
            } else if first || self.eat('+') {
                1.0
            } else {
                break;
            };
            let imaginary;
            let value = if self.peek() == Some('i') {
                self.pos += 1;
                imaginary = true;
                1.0
            } else {
                let v = self.number()?;
                imaginary = self.peek_raw() == Some('i');
                if imaginary {
                    self.pos += 1;
                }
                v
            };
            let slot = if imaginary { &mut im } else { &mut re };
            *slot = Some(slot.map_or(sign * value, |acc| acc + sign * value));
            first = false;
            if !matches!(self.peek(), Some('+') | Some('-')) {
                break;
            }
        }
        Ok(C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))
    }

    fn matrix(&mut self) -> Result<Mat> {
        self.expect('[')?;
        let mut rows: Vec<Vec<C64>> = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = vec![self.entry()?];
            while self.eat(',') {
                row.push(self.entry()?);
            }
            self.expect(']')?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(self.error("ragged matrix rows"));
                }
            }
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        let nc = rows[0].len();
        Ok(Mat::from_fn(rows.len(), nc, |i, j| rows[i][j]))
    }

    fn deriv(&mut self) -> Result<(usize, u32)> {
        self.skip_ws();
        if !self.eat('D') {
            return Err(self.error("expected a derivative `D…`"));
        }
        let slot = match self.peek_raw() {
            Some('t') => {
                self.pos += 1;
                0
            }
            Some('x') => {
                self.pos += 1;
                1
            }
            Some('y') => {
                self.pos += 1;
                2
            }
            Some('z') => {
                self.pos += 1;
                3
            }
            Some(ch) if ch.is_ascii_digit() => self.integer()? as usize,
            _ => return Err(self.error("unknown derivative variable")),
        };
        let power = if self.eat('^') { self.integer()? } else { 1 };
        Ok((slot, power))
    }
}

/// Parses the operator text form.
pub fn parse_operator(src: &str) -> Result<Operator> {
    let mut sc = Scanner::new(src);
    let declared = if sc.eat_word("vars") {
        let n = sc.integer()? as usize;
        sc.expect(':')?;
        if n == 0 {
            return Err(sc.error("need at least one variable"));
        }
        Some(n)
    } else {
        None
    };

    let zero_form = {
        let save = sc.pos;
        let is_zero = sc.eat('0') && sc.peek() == Some('[');
        if !is_zero {
            sc.pos = save;
        }
        is_zero
    };
    if zero_form {
        sc.expect('[')?;
        let rows = sc.integer()? as usize;
        sc.expect('x')?;
        let cols = sc.integer()? as usize;
        sc.expect(']')?;
        if sc.peek().is_some() {
            return Err(sc.error("trailing input"));
        }
        return Ok(Operator::zero(declared.unwrap_or(1), rows, cols));
    }

    let mut raw: Vec<(Vec<(usize, u32)>, Mat)> = Vec::new();
    loop {
        let m = sc.matrix()?;
        let mut derivs = Vec::new();
        if sc.eat('*') {
            derivs.push(sc.deriv()?);
            while sc.eat('*') {
                derivs.push(sc.deriv()?);
            }
        }
        if let Some((_, first)) = raw.first() {
            if first.shape() != m.shape() {
                return Err(sc.error(format!(
                    "matrix shape {:?} differs from {:?}",
                    m.shape(),
                    first.shape()
                )));
            }
        }
        raw.push((derivs, m));
        match sc.peek() {
            Some('+') => {
                sc.pos += 1;
            }
            None => break,
            Some(_) => return Err(sc.error("expected `+` or end of input")),
        }
    }

    let max_slot = raw
        .iter()
        .flat_map(|(d, _)| d.iter().map(|(s, _)| *s))
        .max();
    let nvars = match (declared, max_slot) {
        (Some(n), Some(s)) if s >= n => {
            return Err(sc.error(format!("derivative slot {s} exceeds vars {n}")))
        }
        (Some(n), _) => n,
        (None, Some(s)) => s + 1,
        (None, None) => 1,
    };
    let (rows, cols) = raw[0].1.shape();
    let terms = raw.into_iter().map(|(derivs, m)| {
        let mut e = vec![0u32; nvars];
        for (slot, p) in derivs {
            e[slot] += p;
        }
        (MultiIndex::new(e), m)
    });
    Operator::from_terms(nvars, rows, cols, terms)
}

fn write_entry(out: &mut String, z: C64) {
    // −0 prints as 0
    let z = C64::new(z.re + 0.0, z.im + 0.0);
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => write!(out, "{}", z.re).unwrap(),
        (true, false) => write!(out, "{}i", z.im).unwrap(),
        (false, false) => {
            if z.im.is_sign_negative() {
                write!(out, "{}-{}i", z.re, -z.im).unwrap()
            } else {
                write!(out, "{}+{}i", z.re, z.im).unwrap()
            }
        }
    }
}

fn slot_name(slot: usize, nvars: usize) -> String {
    if nvars <= 4 {
        ["Dt", "Dx", "Dy", "Dz"][slot].to_string()
    } else {
        format!("D{slot}")
    }
}

/// `[[a,b],[c,d]]` with entries written as the parser reads them.
pub fn matrix_text(m: &crate::linalg::Mat) -> String {
    let mut out = String::from("[");
    for i in 0..m.nrows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            write_entry(&mut out, m[(i, j)]);
        }
        out.push(']');
    }
    out.push(']');
    out
}

/// Prints the operator in the text form accepted by [`parse_operator`].
pub fn to_dsl(op: &Operator) -> String {
    let mut out = format!("vars {}: ", op.nvars());
    if op.is_zero() {
        let (r, c) = op.shape();
        write!(out, "0[{r}x{c}]").unwrap();
        return out;
    }
    for (t, (alpha, m)) in op.terms().enumerate() {
        if t > 0 {
            out.push_str(" + ");
        }
        out.push_str(&matrix_text(m));
        let derivs: Vec<String> = alpha
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(s, &e)| {
                let name = slot_name(s, op.nvars());
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if !derivs.is_empty() {
            out.push_str(" * ");
            out.push_str(&derivs.join("*"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_mat};
    use proptest::prelude::*;

    #[test]
    fn parses_documented_example() {
        let op = parse_operator("[[1,0],[0,1]] * Dt + [[0,1],[0,0]] * Dt*Dx^1").unwrap();
        assert_eq!(op.nvars(), 2);
        assert_eq!(op.num_terms(), 2);
        let dtdx = op.coefficient(&MultiIndex::new(vec![1, 1])).unwrap();
        assert_eq!(dtdx, &real_mat(&[&[0.0, 1.0], &[0.0, 0.0]]));
    }

    #[test]
    fn complex_entries() {
        let op = parse_operator("vars 1: [[1-0.5i, i],[-i, 2.5e-3]]").unwrap();
        let m = op.coefficient(&MultiIndex::zero(1)).unwrap();
        assert_eq!(m[(0, 0)], c(1.0, -0.5));
        assert_eq!(m[(0, 1)], c(0.0, 1.0));
        assert_eq!(m[(1, 0)], c(0.0, -1.0));
        assert_eq!(m[(1, 1)], c(2.5e-3, 0.0));
    }

    #[test]
    fn zero_operator_round_trips() {
        let z = Operator::zero(3, 2, 4);
        assert_eq!(parse_operator(&to_dsl(&z)).unwrap(), z);
    }

    #[test]
    fn error_reports_line_and_column() {
        let err = parse_operator("[[1,0],\n [0,1]] * Dq").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_mixed_shapes_rejected() {
        assert!(parse_operator("[[1,0],[1]]").is_err());
        assert!(parse_operator("[[1]] * Dt + [[1,0],[0,1]]").is_err());
        assert!(parse_operator("vars 1: [[1]] * Dx").is_err());
    }

    fn arb_entry() -> impl Strategy<Value = C64> {
        prop_oneof![
            Just(c(0.0, 0.0)),
            (-5i32..5).prop_map(|k| c(k as f64, 0.0)),
            (any::<f64>(), any::<f64>())
                .prop_filter("finite", |(a, b)| a.is_finite() && b.is_finite())
                .prop_map(|(a, b)| c(a, b)),
        ]
    }

    fn arb_operator() -> impl Strategy<Value = Operator> {
        (1usize..4, 1usize..3, 1usize..3).prop_flat_map(|(nvars, rows, cols)| {
            prop::collection::vec(
                (
                    prop::collection::vec(0u32..3, nvars),
                    prop::collection::vec(arb_entry(), rows * cols),
                ),
                0..4,
            )
            .prop_map(move |terms| {
                Operator::from_terms(
                    nvars,
                    rows,
                    cols,
                    terms.into_iter().map(|(e, v)| {
                        (MultiIndex::new(e), Mat::from_row_slice(rows, cols, &v))
                    }),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip_is_exact(op in arb_operator()) {
            let text = to_dsl(&op);
            let back = parse_operator(&text).unwrap();
            prop_assert_eq!(back, op);
        }
    }
}
