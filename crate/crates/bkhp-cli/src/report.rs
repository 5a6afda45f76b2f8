//! Report trees and their two renderings. Every leaf is an exact integer,
//! boolean or string; rationals are strings `a/b`.

use num_rational::BigRational;
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Int(i64),
    Bool(bool),
    Str(String),
    Map(Vec<(String, Node)>),
    List(Vec<Node>),
}

impl Node {
    pub fn map() -> Self {
        Node::Map(Vec::new())
    }
    pub fn str(s: impl Into<String>) -> Self {
        Node::Str(s.into())
    }
    pub fn rational(q: &BigRational) -> Self {
        if q.is_integer() {
            Node::Str(q.numer().to_string())
        } else {
            Node::Str(format!("{}/{}", q.numer(), q.denom()))
        }
    }
    pub fn ints(xs: &[i64]) -> Self {
        Node::List(xs.iter().map(|x| Node::Int(*x)).collect())
    }
    /// Appends a key; keys keep insertion order.
    pub fn with(mut self, k: &str, v: Node) -> Self {
        self.push(k, v);
        self
    }
    pub fn push(&mut self, k: &str, v: Node) {
        match self {
            Node::Map(m) => m.push((k.to_string(), v)),
            _ => panic!("push on a non-map node"),
        }
    }
    pub fn get(&self, k: &str) -> Option<&Node> {
        match self {
            Node::Map(m) => m.iter().find(|(kk, _)| kk == k).map(|(_, v)| v),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Node::Int(i) => Value::from(*i),
            Node::Bool(b) => Value::from(*b),
            Node::Str(s) => Value::from(s.clone()),
            Node::List(xs) => Value::Array(xs.iter().map(Node::to_json).collect()),
            Node::Map(m) => {
                let mut o = Map::new();
                for (k, v) in m {
                    o.insert(k.clone(), v.to_json());
                }
                Value::Object(o)
            }
        }
    }

    fn scalar(&self) -> Option<String> {
        match self {
            Node::Int(i) => Some(i.to_string()),
            Node::Bool(b) => Some(b.to_string()),
            Node::Str(s) => Some(s.clone()),
            Node::List(xs)
                if !xs.is_empty()
                    && xs.iter().all(|x| match x {
                        Node::Int(_) | Node::Bool(_) => true,
                        Node::Str(s) => is_numeric(s),
                        _ => false,
                    }) =>
            {
                Some(format!(
                    "({})",
                    xs.iter()
                        .filter_map(Node::scalar)
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            }
            _ => None,
        }
    }

    fn write_text(&self, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            Node::Map(m) => {
                for (k, v) in m {
                    match v.scalar() {
                        Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                        None if is_empty(v) => out.push_str(&format!("{pad}{k}: (none)\n")),
                        None => {
                            out.push_str(&format!("{pad}{k}:\n"));
                            v.write_text(indent + 1, out);
                        }
                    }
                }
            }
            Node::List(xs) => {
                for x in xs {
                    match x.scalar() {
                        Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                        None => {
                            out.push_str(&format!("{pad}-\n"));
                            x.write_text(indent + 1, out);
                        }
                    }
                }
            }
            leaf => out.push_str(&format!("{pad}{}\n", leaf.scalar().unwrap_or_default())),
        }
    }
}

/// Exact numbers and coefficient certificates such as `-5/3 + O(p^12)`.
fn is_numeric(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || c == '-')
        && s.chars()
            .all(|c| c.is_ascii_digit() || " +-*/^()Opi".contains(c))
}

fn is_empty(n: &Node) -> bool {
    matches!(n, Node::Map(m) if m.is_empty()) || matches!(n, Node::List(x) if x.is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

pub const REPORT_VERSION: i64 = 1;

/// A report: header fields followed by the body sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub body: Node,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            body: Node::map(),
        }
    }
    pub fn tree(&self) -> Node {
        let mut root = Node::map()
            .with("bkhp-report", Node::Int(REPORT_VERSION))
            .with("command", Node::str(&self.command));
        if let Node::Map(m) = &self.body {
            for (k, v) in m {
                root.push(k, v.clone());
            }
        }
        root
    }
    pub fn emit(&self, f: Format) -> String {
        match f {
            Format::Text => {
                let mut s = String::new();
                self.tree().write_text(0, &mut s);
                s
            }
            Format::Structured => {
                let mut s =
                    serde_json::to_string_pretty(&self.tree().to_json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}
