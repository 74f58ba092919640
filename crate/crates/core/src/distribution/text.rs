//! Plain-text form of discrete distributions:
//!
//! ```text
//! # discrete-dist v1
//! -1,0.5
//! 1,0.5
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::DiscreteDist;

pub const HEADER: &str = "# discrete-dist v1";

impl DiscreteDist {
    pub fn to_text(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for (x, w) in self.atoms() {
            writeln!(out, "{x},{w}").expect("writing to a String");
        }
        out
    }

    /// Parses the text form. Blank lines are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            Some((i, _)) => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected header `{HEADER}`"),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "empty input".into(),
                })
            }
        }
        let mut atoms = Vec::new();
        for (i, line) in lines {
            let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
            let (x, w) = line
                .trim()
                .split_once(',')
                .ok_or_else(|| parse_err("expected `point,weight`".into()))?;
            let x: f64 = x
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad point `{x}`: {e}")))?;
            let w: f64 = w
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad weight `{w}`: {e}")))?;
            atoms.push((x, w));
        }
        DiscreteDist::new(atoms)
    }
}
