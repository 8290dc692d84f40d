//! Text format for grid fields.
//!
//! ```text
//! # csvortex field v1
//! sizes 64 64
//! lengths 6.283185307179586 6.283185307179586
//! eps 0.1
//! form regular
//! components u1 u2
//! component u1
//! <n2 lines of n1 values, row j = y index>
//! component u2
//! ...
//! ```
//!
//! Values are written with the shortest representation that parses back to
//! the same `f64` (including `inf`, `-inf`, `NaN`), so a round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::grid::Field;
use crate::error::{Error, Result};

const MAGIC: &str = "# csvortex field v1";

/// Whether stored values are full solutions or background-subtracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Full,
    Regular,
}

impl Form {
    pub fn tag(self) -> &'static str {
        match self {
            Form::Full => "full",
            Form::Regular => "regular",
        }
    }

    pub fn parse(s: &str) -> Option<Form> {
        match s {
            "full" => Some(Form::Full),
            "regular" => Some(Form::Regular),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub sizes: [usize; 2],
    pub lengths: [f64; 2],
    pub eps: f64,
    pub form: Form,
    pub components: Vec<(String, Field)>,
}

impl FieldFile {
    pub fn to_text(&self) -> String {
        let [n1, n2] = self.sizes;
        let mut s = String::with_capacity(self.components.len() * n1 * n2 * 22 + 256);
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "sizes {n1} {n2}");
        let _ = writeln!(s, "lengths {:?} {:?}", self.lengths[0], self.lengths[1]);
        let _ = writeln!(s, "eps {:?}", self.eps);
        let _ = writeln!(s, "form {}", self.form.tag());
        let tags: Vec<&str> = self.components.iter().map(|(t, _)| t.as_str()).collect();
        let _ = writeln!(s, "components {}", tags.join(" "));
        for (tag, field) in &self.components {
            let _ = writeln!(s, "component {tag}");
            for row in field.as_slice().chunks(n1) {
                for (i, v) in row.iter().enumerate() {
                    if i > 0 {
                        s.push(' ');
                    }
                    let _ = write!(s, "{v:?}");
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn parse(text: &str, origin: &str) -> Result<FieldFile> {
        let mut cur = Cursor { lines: text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).collect(), pos: 0, origin };
        let (no, magic) = cur.next("header")?;
        if magic.join(" ") != MAGIC {
            return Err(cur.err(no, "missing field file header".into()));
        }
        let (no, w) = cur.keyed("sizes", 2)?;
        let sizes = [cur.num(no, w[0])?, cur.num(no, w[1])?];
        let (no, w) = cur.keyed("lengths", 2)?;
        let lengths = [cur.num(no, w[0])?, cur.num(no, w[1])?];
        let (no, w) = cur.keyed("eps", 1)?;
        let eps = cur.num(no, w[0])?;
        let (no, w) = cur.keyed("form", 1)?;
        let form = Form::parse(w[0]).ok_or_else(|| cur.err(no, format!("unknown form `{}`", w[0])))?;
        let (_, tags) = cur.keyed("components", 0)?;
        let mut components = Vec::with_capacity(tags.len());
        for tag in tags {
            let (no, w) = cur.keyed("component", 1)?;
            if w[0] != tag {
                return Err(cur.err(no, format!("expected component `{tag}`, found `{}`", w[0])));
            }
            let mut values = Vec::with_capacity(sizes[0] * sizes[1]);
            for _ in 0..sizes[1] {
                let (no, row) = cur.next("field row")?;
                if row.len() != sizes[0] {
                    return Err(cur.err(no, format!("row has {} values, expected {}", row.len(), sizes[0])));
                }
                for w in row {
                    values.push(cur.num(no, w)?);
                }
            }
            components.push((tag.to_string(), Field(values)));
        }
        if let Some(&(no, _)) = cur.lines.get(cur.pos) {
            return Err(cur.err(no, "trailing data after last component".into()));
        }
        Ok(FieldFile { sizes, lengths, eps, form, components })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<FieldFile> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }
}

struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    origin: &'a str,
}

impl<'a> Cursor<'a> {
    fn err(&self, line: usize, msg: String) -> Error {
        Error::Parse { path: self.origin.to_string(), line: line + 1, msg }
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.lines.last().map_or(0, |l| l.0);
        let &(no, l) =
            self.lines.get(self.pos).ok_or_else(|| self.err(last, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok((no, l.split_whitespace().collect()))
    }

    fn keyed(&mut self, key: &str, count: usize) -> Result<(usize, Vec<&'a str>)> {
        let (no, words) = self.next(key)?;
        if words.first() != Some(&key) || (count > 0 && words.len() != count + 1) {
            return Err(self.err(no, format!("expected `{key}` line")));
        }
        Ok((no, words[1..].to_vec()))
    }

    fn num<T: std::str::FromStr>(&self, line: usize, w: &str) -> Result<T> {
        w.parse().map_err(|_| self.err(line, format!("bad number `{w}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FieldFile {
        let a: Vec<f64> = (0..16 * 18).map(|k| (k as f64 * 0.37).sin() / 3.0).collect();
        let mut b: Vec<f64> = (0..16 * 18).map(|k| -(k as f64).sqrt() * 1e-300).collect();
        b[5] = f64::NEG_INFINITY;
        FieldFile {
            sizes: [16, 18],
            lengths: [1.0, std::f64::consts::PI],
            eps: 0.05,
            form: Form::Full,
            components: vec![("u1".into(), Field(a)), ("u2".into(), Field(b))],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let f = sample();
        let back = FieldFile::parse(&f.to_text(), "mem").unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let text = sample().to_text();
        let cut: String = text.lines().take(12).collect::<Vec<_>>().join("\n");
        assert!(FieldFile::parse(&cut, "mem").is_err());
    }

    #[test]
    fn short_row_reports_line() {
        let text = sample().to_text().replacen("component u1\n", "component u1\n1.0 2.0\n", 1);
        let e = FieldFile::parse(&text, "f.txt").unwrap_err().to_string();
        assert!(e.starts_with("f.txt:8:"), "{e}");
    }
}
