//! Group terms as letters, reduced to free-group normal form.

use std::fmt;

use crate::error::{Error, Result};
use crate::pomset::Label;
use crate::term::Term;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupTerm {
    Unit,
    Gen(String),
    Compose(Box<GroupTerm>, Box<GroupTerm>),
    Inverse(Box<GroupTerm>),
}

impl GroupTerm {
    pub fn gen(name: &str) -> GroupTerm {
        GroupTerm::Gen(name.to_string())
    }

    pub fn compose(g: GroupTerm, h: GroupTerm) -> GroupTerm {
        GroupTerm::Compose(Box::new(g), Box::new(h))
    }

    pub fn inverse(g: GroupTerm) -> GroupTerm {
        GroupTerm::Inverse(Box::new(g))
    }

    /// Parses the label syntax: `u`, generators, `g∘h` and `~g`.
    pub fn parse(text: &str) -> Result<GroupTerm> {
        let chars: Vec<char> = text.chars().collect();
        let mut pos = 0;
        let g = parse_compose(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(syntax(pos, "unexpected trailing input in group term"));
        }
        Ok(g)
    }

    pub fn label(&self) -> Label {
        Label::new(self.to_string()).expect("group terms print non-empty")
    }

    /// The reduced word as `(generator, inverted)` pairs.
    pub fn reduced_word(&self) -> Vec<(String, bool)> {
        let mut flat = Vec::new();
        self.flatten(false, &mut flat);
        let mut stack: Vec<(String, bool)> = Vec::new();
        for (g, inv) in flat {
            match stack.last() {
                Some((top, top_inv)) if *top == g && *top_inv != inv => {
                    stack.pop();
                }
                _ => stack.push((g, inv)),
            }
        }
        stack
    }

    // Pushes inverses to the generators: the inverse of g∘h is ~h∘~g.
    fn flatten(&self, inverted: bool, out: &mut Vec<(String, bool)>) {
        match self {
            GroupTerm::Unit => {}
            GroupTerm::Gen(a) => out.push((a.clone(), inverted)),
            GroupTerm::Compose(g, h) => {
                if inverted {
                    h.flatten(true, out);
                    g.flatten(true, out);
                } else {
                    g.flatten(false, out);
                    h.flatten(false, out);
                }
            }
            GroupTerm::Inverse(g) => g.flatten(!inverted, out),
        }
    }
}

fn syntax(offset: usize, message: &str) -> Error {
    Error::Syntax {
        offset,
        message: message.to_string(),
    }
}

fn parse_compose(s: &[char], pos: &mut usize) -> Result<GroupTerm> {
    let mut g = parse_factor(s, pos)?;
    while *pos < s.len() && s[*pos] == '∘' {
        *pos += 1;
        g = GroupTerm::compose(g, parse_factor(s, pos)?);
    }
    Ok(g)
}

fn parse_factor(s: &[char], pos: &mut usize) -> Result<GroupTerm> {
    match s.get(*pos) {
        Some('~') => {
            *pos += 1;
            Ok(GroupTerm::inverse(parse_factor(s, pos)?))
        }
        Some('(') => {
            *pos += 1;
            let g = parse_compose(s, pos)?;
            if s.get(*pos) != Some(&')') {
                return Err(syntax(*pos, "expected `)` in group term"));
            }
            *pos += 1;
            Ok(g)
        }
        Some(c) if c.is_ascii_alphanumeric() || *c == '_' => {
            let start = *pos;
            while *pos < s.len() && (s[*pos].is_ascii_alphanumeric() || s[*pos] == '_') {
                *pos += 1;
            }
            let name: String = s[start..*pos].iter().collect();
            Ok(if name == "u" {
                GroupTerm::Unit
            } else {
                GroupTerm::Gen(name)
            })
        }
        _ => Err(syntax(*pos, "expected a group term")),
    }
}

impl fmt::Display for GroupTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTerm::Unit => f.write_str("u"),
            GroupTerm::Gen(a) => f.write_str(a),
            GroupTerm::Compose(g, h) => {
                write!(f, "{g}∘")?;
                match **h {
                    GroupTerm::Compose(..) => write!(f, "({h})"),
                    _ => write!(f, "{h}"),
                }
            }
            GroupTerm::Inverse(g) => match **g {
                GroupTerm::Compose(..) => write!(f, "~({g})"),
                _ => write!(f, "~{g}"),
            },
        }
    }
}

impl fmt::Debug for GroupTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The unique reduced group term equivalent to `g`.
pub fn group_reduce(g: &GroupTerm) -> GroupTerm {
    g.reduced_word()
        .into_iter()
        .map(|(a, inv)| {
            if inv {
                GroupTerm::inverse(GroupTerm::Gen(a))
            } else {
                GroupTerm::Gen(a)
            }
        })
        .reduce(GroupTerm::compose)
        .unwrap_or(GroupTerm::Unit)
}

/// Replaces every letter of `e`, read as a group term, by its reduced form.
pub fn group_reify(e: &Term) -> Result<Term> {
    let mut err = None;
    let out = e.map_leaves(&mut |t| match t {
        Term::Act(l) => match GroupTerm::parse(l.as_str()) {
            Ok(g) => Term::Act(group_reduce(&g).label()),
            Err(x) => {
                err.get_or_insert(x);
                t.clone()
            }
        },
        other => other.clone(),
    });
    match err {
        Some(x) => Err(x),
        None => Ok(out),
    }
}
