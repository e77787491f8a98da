//! Line-oriented text format shared by profile and run-config files.
//!
//! ```text
//! # comment
//! dim = 2
//! R0 = 3
//! piece 0 1 constant 2
//! piece 1 2 powlin 1 3 0.5
//! [run]
//! tau = 0.001
//! ```
//!
//! `poly` coefficients are in powers of `t - t_lo`.

use std::fmt::Write as _;

use super::{Piece, PieceKind, RadiusProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    KeyValue {
        section: Option<String>,
        key: String,
        value: String,
        line: usize,
    },
    Piece { piece: Piece, line: usize },
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("not a number: {tok:?}")))
}

/// Splits text into key/value and piece directives.
pub fn parse_directives(text: &str) -> Result<Vec<Directive>> {
    let mut out = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            if !content.ends_with(']') || content.len() < 3 {
                return Err(parse_err(line, format!("malformed section header {content:?}")));
            }
            section = Some(content[1..content.len() - 1].trim().to_string());
            continue;
        }
        let mut toks = content.split_whitespace();
        if toks.next() == Some("piece") {
            let toks: Vec<&str> = toks.collect();
            out.push(Directive::Piece {
                piece: parse_piece(&toks, line)?,
                line,
            });
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got {content:?}")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_err(line, "empty key"));
        }
        out.push(Directive::KeyValue {
            section: section.clone(),
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(out)
}

fn parse_piece(toks: &[&str], line: usize) -> Result<Piece> {
    if toks.len() < 3 {
        return Err(parse_err(line, "piece needs `<t_lo> <t_hi> <kind> ...`"));
    }
    let lo = number(toks[0], line)?;
    let hi = number(toks[1], line)?;
    let args = toks[3..]
        .iter()
        .map(|t| number(t, line))
        .collect::<Result<Vec<f64>>>()?;
    let arity = |n: usize| -> Result<()> {
        if args.len() != n {
            return Err(parse_err(line, format!("`{}` takes {n} parameters, got {}", toks[2], args.len())));
        }
        Ok(())
    };
    let kind = match toks[2] {
        "constant" => {
            arity(1)?;
            PieceKind::Constant(args[0])
        }
        "powlin" => {
            arity(3)?;
            PieceKind::PowerOfLinear {
                scale: args[0],
                apex: args[1],
                exponent: args[2],
            }
        }
        "offpow" => {
            arity(4)?;
            PieceKind::OffsetMinusPower {
                offset: args[0],
                coeff: args[1],
                origin: args[2],
                exponent: args[3],
            }
        }
        "poly" => {
            if args.is_empty() {
                return Err(parse_err(line, "`poly` needs at least one coefficient"));
            }
            PieceKind::Polynomial(args)
        }
        "sampled" => {
            if args.len() < 2 {
                return Err(parse_err(line, "`sampled` needs at least two values"));
            }
            return Ok(Piece::sampled(lo, hi, args));
        }
        other => return Err(parse_err(line, format!("unknown piece kind {other:?}"))),
    };
    Ok(Piece::new(lo, hi, kind))
}

/// A parsed profile file: dimension plus the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileFile {
    pub dim: usize,
    pub profile: RadiusProfile,
}

impl ProfileFile {
    /// Builds a profile from the unsectioned directives of an already parsed file.
    pub fn from_directives(directives: &[Directive]) -> Result<Self> {
        let mut dim = None;
        let mut r0 = None;
        let mut pieces = Vec::new();
        let mut last_line = 0;
        for d in directives {
            match d {
                Directive::KeyValue {
                    section: None,
                    key,
                    value,
                    line,
                } => {
                    last_line = *line;
                    match key.as_str() {
                        "dim" => {
                            dim = Some(
                                value
                                    .parse::<usize>()
                                    .map_err(|_| parse_err(*line, format!("bad dimension {value:?}")))?,
                            )
                        }
                        "R0" => r0 = Some(number(value, *line)?),
                        other => return Err(parse_err(*line, format!("unknown profile key {other:?}"))),
                    }
                }
                Directive::KeyValue { .. } => {}
                Directive::Piece { piece, line } => {
                    last_line = *line;
                    let expected = pieces.last().map_or(0.0, |p: &Piece| p.hi);
                    if piece.lo != expected {
                        let what = if piece.lo > expected { "gap" } else { "overlap" };
                        return Err(parse_err(
                            *line,
                            format!("{what}: piece starts at {} but previous coverage ends at {expected}", piece.lo),
                        ));
                    }
                    pieces.push(piece.clone());
                }
            }
        }
        let dim = dim.ok_or_else(|| parse_err(last_line, "missing `dim`"))?;
        if dim < 2 {
            return Err(parse_err(last_line, format!("dimension must be at least 2, got {dim}")));
        }
        let r0 = r0.ok_or_else(|| parse_err(last_line, "missing `R0`"))?;
        let profile = RadiusProfile::new(pieces, r0).map_err(|e| parse_err(last_line, e.to_string()))?;
        Ok(ProfileFile { dim, profile })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "R0 = {}", self.profile.enclosing_radius());
        for p in self.profile.pieces() {
            write_piece(&mut s, p);
        }
        s
    }
}

fn write_piece(s: &mut String, p: &Piece) {
    let join = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    match &p.kind {
        PieceKind::Constant(v) => {
            let _ = writeln!(s, "piece {} {} constant {}", p.lo, p.hi, v);
        }
        PieceKind::PowerOfLinear { scale, apex, exponent } => {
            let _ = writeln!(s, "piece {} {} powlin {} {} {}", p.lo, p.hi, scale, apex, exponent);
        }
        PieceKind::OffsetMinusPower {
            offset,
            coeff,
            origin,
            exponent,
        } => {
            let _ = writeln!(s, "piece {} {} offpow {} {} {} {}", p.lo, p.hi, offset, coeff, origin, exponent);
        }
        PieceKind::Polynomial(c) => {
            let _ = writeln!(s, "piece {} {} poly {}", p.lo, p.hi, join(c));
        }
        PieceKind::Sampled { step, values } => {
            let n = values.len() - 1;
            let reach = p.lo + *step * n as f64;
            let uniform = Piece::sampled(p.lo, p.hi, values.clone());
            if reach == p.hi && uniform.value_at(p.hi) == p.end_value() {
                let _ = writeln!(s, "piece {} {} sampled {}", p.lo, p.hi, join(values));
            } else {
                // Truncated grid: the full cells, then the partial last cell.
                let full = (((p.hi - p.lo) / step).floor() as usize).min(n);
                let split = p.lo + *step * full as f64;
                if full >= 1 && split < p.hi {
                    let _ = writeln!(s, "piece {} {} sampled {}", p.lo, split, join(&values[..=full]));
                    let _ = writeln!(s, "piece {} {} sampled {} {}", split, p.hi, values[full], p.end_value());
                } else {
                    let _ = writeln!(s, "piece {} {} sampled {} {}", p.lo, p.hi, p.start_value(), p.end_value());
                }
            }
        }
    }
}

/// Parses a complete profile file.
pub fn parse_profile(text: &str) -> Result<ProfileFile> {
    ProfileFile::from_directives(&parse_directives(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_piece_kind() {
        let text = "\
# mixed profile
dim = 3
R0 = 10
piece 0 1 constant 5
piece 1 2 poly 4 -0.5 -0.1
piece 2 3 offpow 3.4 1 2 0.5
piece 3 4 sampled 2.4 2 1.5
piece 4 5 powlin 1 5.5 1
";
        let f = parse_profile(text).unwrap();
        assert_eq!(f.dim, 3);
        assert_eq!(f.profile.pieces().len(), 5);
        assert_eq!(f.profile.support_length(), 5.0);
        assert!((f.profile.eval(1.5).unwrap() - (4.0 - 0.25 - 0.025)).abs() < 1e-15);
        let again = parse_profile(&f.to_text()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn rejects_gaps_overlaps_and_garbage() {
        let gap = "dim = 2\nR0 = 5\npiece 0 1 constant 2\npiece 1.5 2 constant 1\n";
        assert!(matches!(parse_profile(gap), Err(Error::Parse { line: 4, .. })));
        let overlap = "dim = 2\nR0 = 5\npiece 0 1 constant 2\npiece 0.5 2 constant 1\n";
        assert!(parse_profile(overlap).is_err());
        assert!(parse_profile("dim = 2\nR0 = 5\npiece 0 1 wiggle 2\n").is_err());
        assert!(parse_profile("dim = 2\nR0 = 5\npiece 0 1 constant\n").is_err());
        assert!(parse_profile("R0 = 5\npiece 0 1 constant 1\n").is_err());
        assert!(parse_profile("dim = 1\nR0 = 5\n").is_err());
        assert!(parse_profile("dim = 2\nR0 = 5\nnonsense\n").is_err());
        assert!(parse_profile("dim = 2\nR0 = 5\npiece 1 2 constant 1\n").is_err());
    }

    #[test]
    fn truncated_sampled_pieces_round_trip() {
        let p = RadiusProfile::new(vec![Piece::sampled(0.0, 1.0, vec![3.0, 2.5, 2.0, 1.0, 0.5])], 4.0).unwrap();
        let t = p.truncate(0.6);
        let file = ProfileFile { dim: 2, profile: t.clone() };
        let back = parse_profile(&file.to_text()).unwrap().profile;
        for k in 0..=60 {
            let x = k as f64 / 100.0;
            assert!((back.eval(x).unwrap() - t.eval(x).unwrap()).abs() < 1e-14);
        }
    }
}
