//! The `.veq` spec-file format: syntax tree, parser and printer.
//!
//! The format is line oriented. Each non-blank line holds one declaration and
//! `#` starts a comment that runs to the end of the line.
//!
//! ```text
//! object A
//! varrow f : A -> B
//! vcomp g . f = h
//! proarrow J : A -|> B
//! cell c : [J K] / (f, g) => L
//! cell eta : [@A] / (id_A, id_A) => J
//! paste c (c1 c2) = d
//! whisker eta f = d
//! instance bool_matrix { U = 1 ; V = 2 }
//! instance tropical_matrix(2) declared { U = 1 ; V = 2 }
//! matrix J = [1 0 ; 0 1]
//! fragment { objects: |A| |B| ; arrows: |f| ; proarrows: |J| ; morita: |A| ~ |A| |A| !~ |B| }
//! ```

mod parse;

use std::fmt;

pub use parse::{parse_spec, ParseError};

/// A parsed spec file: its declarations in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecFile {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Object(String),
    VArrow {
        name: String,
        dom: String,
        cod: String,
    },
    /// `g . f = h`.
    VComp {
        g: String,
        f: String,
        h: String,
    },
    Proarrow {
        name: String,
        src: String,
        tgt: String,
    },
    Cell {
        name: String,
        domain: PathExpr,
        left: String,
        right: String,
        codomain: String,
    },
    Paste {
        outer: String,
        inners: Vec<String>,
        result: String,
    },
    /// Precomposition of a nullary cell with a vertical arrow.
    Whisker {
        cell: String,
        arrow: String,
        result: String,
    },
    Instance(InstanceDecl),
    Matrix {
        name: String,
        /// Quantale literals, row by row.
        rows: Vec<Vec<String>>,
    },
    Fragment(FragmentDecl),
}

/// A domain path: a list of proarrows, or the empty path at an object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathExpr {
    Empty(String),
    Arrows(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    BoolMatrix,
    TropicalMatrix { cap: u8 },
}

/// A thin matrix instance over named finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub kind: InstanceKind,
    /// Only the matrices given by `matrix` lines, rather than all of them.
    pub declared: bool,
    pub sets: Vec<(String, usize)>,
}

/// The part of the equipment of enriched categories to materialise: the
/// representatives of the listed base data.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FragmentDecl {
    pub objects: Vec<String>,
    pub arrows: Vec<String>,
    pub proarrows: Vec<String>,
    pub morita: Vec<MoritaDecl>,
}

/// `|A| ~ |B|` claims a horizontal equivalence, `|A| !~ |B|` denies one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoritaDecl {
    pub a: String,
    pub b: String,
    pub equivalent: bool,
}

impl SpecFile {
    pub fn instance(&self) -> Option<&InstanceDecl> {
        self.decls.iter().find_map(|d| match d {
            Decl::Instance(i) => Some(i),
            _ => None,
        })
    }

    pub fn fragment(&self) -> Option<&FragmentDecl> {
        self.decls.iter().find_map(|d| match d {
            Decl::Fragment(f) => Some(f),
            _ => None,
        })
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceKind::BoolMatrix => f.write_str("bool_matrix"),
            InstanceKind::TropicalMatrix { cap } => write!(f, "tropical_matrix({cap})"),
        }
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathExpr::Empty(a) => write!(f, "[@{a}]"),
            PathExpr::Arrows(js) => write!(f, "[{}]", js.join(" ")),
        }
    }
}

fn bars(names: &[String]) -> String {
    names.iter().map(|n| format!("|{n}|")).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for FragmentDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sections = Vec::new();
        if !self.objects.is_empty() {
            sections.push(format!("objects: {}", bars(&self.objects)));
        }
        if !self.arrows.is_empty() {
            sections.push(format!("arrows: {}", bars(&self.arrows)));
        }
        if !self.proarrows.is_empty() {
            sections.push(format!("proarrows: {}", bars(&self.proarrows)));
        }
        if !self.morita.is_empty() {
            let pairs: Vec<String> = self
                .morita
                .iter()
                .map(|m| format!("|{}| {} |{}|", m.a, if m.equivalent { "~" } else { "!~" }, m.b))
                .collect();
            sections.push(format!("morita: {}", pairs.join(" ")));
        }
        if sections.is_empty() {
            f.write_str("fragment { }")
        } else {
            write!(f, "fragment {{ {} }}", sections.join(" ; "))
        }
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Object(a) => write!(f, "object {a}"),
            Decl::VArrow { name, dom, cod } => write!(f, "varrow {name} : {dom} -> {cod}"),
            Decl::VComp { g, f: f1, h } => write!(f, "vcomp {g} . {f1} = {h}"),
            Decl::Proarrow { name, src, tgt } => write!(f, "proarrow {name} : {src} -|> {tgt}"),
            Decl::Cell {
                name,
                domain,
                left,
                right,
                codomain,
            } => write!(f, "cell {name} : {domain} / ({left}, {right}) => {codomain}"),
            Decl::Paste { outer, inners, result } => {
                write!(f, "paste {outer} ({}) = {result}", inners.join(" "))
            }
            Decl::Whisker { cell, arrow, result } => write!(f, "whisker {cell} {arrow} = {result}"),
            Decl::Instance(i) => {
                let sets: Vec<String> = i.sets.iter().map(|(s, n)| format!("{s} = {n}")).collect();
                let declared = if i.declared { " declared" } else { "" };
                write!(f, "instance {}{declared} {{ {} }}", i.kind, sets.join(" ; "))
            }
            Decl::Matrix { name, rows } => {
                let rows: Vec<String> = rows.iter().map(|r| r.join(" ")).collect();
                write!(f, "matrix {name} = [{}]", rows.join(" ; "))
            }
            Decl::Fragment(fr) => fr.fmt(f),
        }
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
