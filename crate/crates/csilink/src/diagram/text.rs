//! Line-oriented text format for diagrams and diagram sums.
//!
//! ```text
//! m=2 parity=odd flavor=braid
//! ext 1: v1_1 v1_2
//! ext 2: v2_1
//! int: u1
//! edge v1_1 -> u1
//! edge[2] a -> b        (label form, even parity only)
//! ```
//!
//! Vertex identifiers are arbitrary tokens; they are resolved by their
//! position in the `ext`/`int` lists.  Serialization always emits the
//! canonical names `v<segment>_<position>` and `u<label>`, so
//! `parse(serialize(d)) == d` exactly.

use super::{Diagram, Edge, Flavor, Parity, Vertex};
use crate::diagram::sum::DiagramSum;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::HashMap;
use std::fmt::Write as _;

pub(crate) fn serialize_diagram(d: &Diagram) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "m={} parity={} flavor={}",
        d.m(),
        d.parity(),
        d.flavor()
    )
    .unwrap();
    for (i, &c) in d.ext_counts().iter().enumerate() {
        let names: Vec<String> = (1..=c).map(|p| format!("v{}_{}", i + 1, p)).collect();
        if names.is_empty() {
            writeln!(out, "ext {}:", i + 1).unwrap();
        } else {
            writeln!(out, "ext {}: {}", i + 1, names.join(" ")).unwrap();
        }
    }
    let internal: Vec<String> = (1..=d.internal_count()).map(|l| format!("u{l}")).collect();
    if internal.is_empty() {
        writeln!(out, "int:").unwrap();
    } else {
        writeln!(out, "int: {}", internal.join(" ")).unwrap();
    }
    for e in d.edges() {
        let name = |v: Vertex| match v {
            Vertex::Ext { segment, position } => format!("v{segment}_{position}"),
            Vertex::Int { label } => format!("u{label}"),
        };
        match e.label {
            Some(l) => writeln!(out, "edge[{l}] {} -> {}", name(e.tail), name(e.head)).unwrap(),
            None => writeln!(out, "edge {} -> {}", name(e.tail), name(e.head)).unwrap(),
        }
    }
    out
}

struct Parser<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        let lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Parser { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let l = self.peek();
        if l.is_some() {
            self.pos += 1;
        }
        l
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<(usize, Parity, Flavor)> {
    let mut m = None;
    let mut parity = None;
    let mut flavor = None;
    for tok in text.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key=value, got `{tok}`")))?;
        match key {
            "m" => {
                m = Some(
                    val.parse::<usize>()
                        .map_err(|_| err(line, format!("bad m `{val}`")))?,
                )
            }
            "parity" => {
                parity = Some(match val {
                    "even" => Parity::Even,
                    "odd" => Parity::Odd,
                    _ => return Err(err(line, format!("bad parity `{val}`"))),
                })
            }
            "flavor" => {
                flavor = Some(match val {
                    "link" => Flavor::Link,
                    "braid" => Flavor::Braid,
                    _ => return Err(err(line, format!("bad flavor `{val}`"))),
                })
            }
            _ => return Err(err(line, format!("unknown header key `{key}`"))),
        }
    }
    match (m, parity, flavor) {
        (Some(m), Some(p), Some(f)) => Ok((m, p, f)),
        _ => Err(err(line, "header needs m=, parity=, flavor=")),
    }
}

fn parse_one(p: &mut Parser<'_>) -> Result<Diagram> {
    let (hline, header) = p
        .next()
        .ok_or_else(|| err(0, "empty input, expected diagram header"))?;
    let (m, parity, flavor) = parse_header(hline, header)?;

    let mut names: HashMap<String, Vertex> = HashMap::new();
    let mut ext_counts = vec![0usize; m];
    let mut seen_ext = vec![false; m];
    while let Some((line, text)) = p.peek() {
        let Some(rest) = text.strip_prefix("ext ") else {
            break;
        };
        p.next();
        let (seg_s, list) = rest
            .split_once(':')
            .ok_or_else(|| err(line, "expected `ext <seg>: ...`"))?;
        let segment: usize = seg_s
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad segment `{seg_s}`")))?;
        if segment == 0 || segment > m {
            return Err(err(line, format!("segment {segment} out of range 1..={m}")));
        }
        if seen_ext[segment - 1] {
            return Err(err(line, format!("duplicate ext line for segment {segment}")));
        }
        seen_ext[segment - 1] = true;
        for (k, tok) in list.split_whitespace().enumerate() {
            let v = Vertex::Ext {
                segment,
                position: k + 1,
            };
            if names.insert(tok.to_string(), v).is_some() {
                return Err(err(line, format!("duplicate vertex name `{tok}`")));
            }
            ext_counts[segment - 1] = k + 1;
        }
    }

    let mut internal_count = 0usize;
    if let Some((line, text)) = p.peek() {
        if let Some(list) = text.strip_prefix("int:") {
            p.next();
            for (k, tok) in list.split_whitespace().enumerate() {
                let v = Vertex::Int { label: k + 1 };
                if names.insert(tok.to_string(), v).is_some() {
                    return Err(err(line, format!("duplicate vertex name `{tok}`")));
                }
                internal_count = k + 1;
            }
        }
    }

    let mut edges = Vec::new();
    while let Some((line, text)) = p.peek() {
        let Some(rest) = text.strip_prefix("edge") else {
            break;
        };
        p.next();
        let (label, rest) = if let Some(r) = rest.strip_prefix('[') {
            let (num, tail) = r
                .split_once(']')
                .ok_or_else(|| err(line, "unterminated edge label"))?;
            let l: usize = num
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad edge label `{num}`")))?;
            (Some(l), tail)
        } else {
            (None, rest)
        };
        let (t, h) = rest
            .split_once("->")
            .ok_or_else(|| err(line, "expected `<tail> -> <head>`"))?;
        let resolve = |tok: &str| -> Result<Vertex> {
            names
                .get(tok.trim())
                .copied()
                .ok_or_else(|| err(line, format!("unknown vertex `{}`", tok.trim())))
        };
        edges.push(Edge {
            tail: resolve(t)?,
            head: resolve(h)?,
            label,
        });
    }

    Diagram::new(m, parity, flavor, ext_counts, internal_count, edges)
}

/// Parse a single diagram from its text form.
pub fn parse_diagram(input: &str) -> Result<Diagram> {
    let mut p = Parser::new(input);
    let d = parse_one(&mut p)?;
    if let Some((line, text)) = p.peek() {
        return Err(err(line, format!("trailing content `{text}`")));
    }
    Ok(d)
}

fn parse_rational(line: usize, s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| err(line, format!("bad rational `{s}`")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| err(line, format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(err(line, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

/// Parse a diagram sum: records of `coeff <rational>` followed by a diagram
/// block, separated by anything (blank lines are stripped).
pub fn parse_diagram_sum(input: &str) -> Result<DiagramSum> {
    let mut p = Parser::new(input);
    let mut sum = DiagramSum::new();
    while let Some((line, text)) = p.peek() {
        let Some(c) = text.strip_prefix("coeff") else {
            return Err(err(line, format!("expected `coeff <rational>`, got `{text}`")));
        };
        p.next();
        let coeff = parse_rational(line, c)?;
        let d = parse_one(&mut p)?;
        sum.add(coeff, d);
    }
    Ok(sum)
}

pub(crate) fn serialize_sum(s: &DiagramSum) -> String {
    let mut out = String::new();
    for (d, c) in s.terms() {
        writeln!(out, "coeff {c}").unwrap();
        out.push_str(&serialize_diagram(d));
        out.push('\n');
    }
    out
}
