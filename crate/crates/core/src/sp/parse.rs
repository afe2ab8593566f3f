//! The textual SP-expression front end:
//!
//! ```text
//! expr := "arc" "(" id ")" | "S" "(" expr ("," expr)+ ")" | "P" "(" expr ("," expr)+ ")"
//! ```
//!
//! Whitespace is insignificant. Arc ids are numbered in order of first
//! appearance.

use std::collections::HashMap;

use super::{NodeId, NodeKind, SpError, SpTree, SpTreeBuilder};

/// How n-ary compositions are binarized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fold {
    /// `S(a,b,c)` becomes `S(S(a,b),c)`.
    #[default]
    Left,
    /// `S(a,b,c)` becomes `S(a,S(b,c))`.
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSp {
    pub tree: SpTree,
    /// External id of each arc, indexed by arc id.
    pub arc_names: Vec<String>,
}

pub fn parse_sp_expression(text: &str) -> Result<ParsedSp, SpError> {
    parse_sp_expression_with(text, Fold::Left)
}

pub fn parse_sp_expression_with(text: &str, fold: Fold) -> Result<ParsedSp, SpError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        builder: SpTreeBuilder::new(),
        names: Vec::new(),
        index: HashMap::new(),
        fold,
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(SpError::Syntax {
            pos: p.pos,
            expected: "end of input",
        });
    }
    Ok(ParsedSp {
        tree: p.builder.finish(root),
        arc_names: p.names,
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    builder: SpTreeBuilder,
    names: Vec<String>,
    index: HashMap<String, usize>,
    fold: Fold,
}

fn is_id_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.' | b':')
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8, expected: &'static str) -> Result<(), SpError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(SpError::Syntax {
                pos: self.pos,
                expected,
            })
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_id_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        // only ASCII bytes were consumed
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn expr(&mut self) -> Result<NodeId, SpError> {
        self.skip_ws();
        let start = self.pos;
        match self.word() {
            "arc" => {
                self.expect(b'(', "'('")?;
                self.skip_ws();
                let id_pos = self.pos;
                let name = self.word().to_string();
                if name.is_empty() {
                    return Err(SpError::Syntax {
                        pos: id_pos,
                        expected: "arc id",
                    });
                }
                self.expect(b')', "')'")?;
                if self.index.contains_key(&name) {
                    return Err(SpError::DuplicateArc(name));
                }
                let arc = self.names.len();
                self.index.insert(name.clone(), arc);
                self.names.push(name);
                Ok(self.builder.leaf(arc))
            }
            w @ ("S" | "P") => {
                let series = w == "S";
                self.expect(b'(', "'('")?;
                let mut parts = vec![self.expr()?];
                loop {
                    self.skip_ws();
                    match self.src.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            parts.push(self.expr()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(SpError::Syntax {
                                pos: self.pos,
                                expected: "',' or ')'",
                            })
                        }
                    }
                }
                if parts.len() < 2 {
                    return Err(SpError::UnaryComposition { pos: start });
                }
                Ok(self.fold(parts, series))
            }
            _ => Err(SpError::Syntax {
                pos: start,
                expected: "'arc', 'S' or 'P'",
            }),
        }
    }

    fn fold(&mut self, parts: Vec<NodeId>, series: bool) -> NodeId {
        let join = |b: &mut SpTreeBuilder, l, r| {
            if series {
                b.series(l, r)
            } else {
                b.parallel(l, r)
            }
        };
        match self.fold {
            Fold::Left => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, n| join(&mut self.builder, acc, n))
            }
            Fold::Right => {
                let mut it = parts.into_iter().rev();
                let last = it.next().unwrap();
                it.fold(last, |acc, n| join(&mut self.builder, n, acc))
            }
        }
    }
}

/// Renders a tree back into an SP expression. Left-nested chains of one
/// composition kind are written n-ary, so parsing the output with
/// [`Fold::Left`] reproduces the tree exactly.
pub fn render_sp_expression(tree: &SpTree, names: &[impl AsRef<str>]) -> String {
    fn chain(tree: &SpTree, id: NodeId, series: bool, out: &mut Vec<NodeId>) {
        match tree.node(id).kind {
            NodeKind::Series(l, r) if series => {
                chain(tree, l, series, out);
                out.push(r);
            }
            NodeKind::Parallel(l, r) if !series => {
                chain(tree, l, series, out);
                out.push(r);
            }
            _ => out.push(id),
        }
    }
    fn go(tree: &SpTree, id: NodeId, names: &[impl AsRef<str>], out: &mut String) {
        match tree.node(id).kind {
            NodeKind::Primitive(a) => {
                out.push_str("arc(");
                out.push_str(names[a].as_ref());
                out.push(')');
            }
            NodeKind::Series(l, r) | NodeKind::Parallel(l, r) => {
                let series = matches!(tree.node(id).kind, NodeKind::Series(..));
                let mut parts = Vec::new();
                chain(tree, l, series, &mut parts);
                parts.push(r);
                out.push_str(if series { "S(" } else { "P(" });
                for (i, &p) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    go(tree, p, names, out);
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    go(tree, tree.root(), names, &mut out);
    out
}
