use thiserror::Error;

use super::{Decl, FragmentDecl, InstanceDecl, InstanceKind, MoritaDecl, PathExpr, SpecFile};

/// A syntax error with its 1-based position and the tokens that would have
/// been accepted there.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

const KEYWORDS: [&str; 10] = [
    "object", "varrow", "vcomp", "proarrow", "cell", "paste", "whisker", "instance", "matrix", "fragment",
];

// Longest first, so that `-|>` wins over `-` and `=>` over `=`.
const SYMBOLS: [&str; 19] = [
    "-|>", "->", "=>", "!~", ":", ".", "=", "[", "]", "(", ")", ",", "/", "{", "}", ";", "@", "|", "~",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(&'static str),
}

impl Tok {
    fn show(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Sym(s) => format!("`{s}`"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            toks.push((Tok::Word(chars[start..i].iter().collect()), start + 1));
            continue;
        }
        for s in SYMBOLS {
            let n = s.chars().count();
            if i + n <= chars.len() && chars[i..i + n].iter().copied().eq(s.chars()) {
                toks.push((Tok::Sym(s), i + 1));
                i += n;
                continue 'outer;
            }
        }
        return Err(ParseError {
            line,
            column: i + 1,
            expected: vec!["a name or a symbol".into()],
            found: format!("`{c}`"),
        });
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end: usize,
}

impl Cursor {
    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .toks
                .get(self.pos)
                .map_or_else(|| "end of line".to_string(), |t| t.0.show()),
        }
    }

    fn peek_sym(&self, s: &str) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Sym(t), _)) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.peek_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{s}`")]))
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), _)) => Some(w),
            _ => None,
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek_word() {
            Some(w) => {
                let w = w.to_string();
                self.pos += 1;
                Ok(w)
            }
            None => Err(self.error(&[what])),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        let at = self.pos;
        let w = self.word(what)?;
        w.parse().map_err(|_| {
            self.pos = at;
            self.error(&[what])
        })
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.error(&["end of line"]))
        }
    }

    /// Names until `stop`, which is consumed.
    fn words_until(&mut self, stop: &str, what: &str) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        while !self.eat_sym(stop) {
            match self.peek_word() {
                Some(_) => out.push(self.word(what)?),
                None => return Err(self.error(&[what, &format!("`{stop}`")])),
            }
        }
        Ok(out)
    }

    fn barred(&mut self) -> Result<String, ParseError> {
        self.sym("|")?;
        let w = self.word("a name")?;
        self.sym("|")?;
        Ok(w)
    }
}

/// Parse a spec file. Blank and comment-only lines are skipped.
pub fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let mut decls = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = lex(raw, line)?;
        if toks.is_empty() {
            continue;
        }
        let mut c = Cursor {
            toks,
            pos: 0,
            line,
            end: raw.chars().count() + 1,
        };
        decls.push(decl(&mut c)?);
        c.end()?;
    }
    Ok(SpecFile { decls })
}

fn decl(c: &mut Cursor) -> Result<Decl, ParseError> {
    let keyword = match c.peek_word() {
        Some(w) if KEYWORDS.contains(&w) => w.to_string(),
        _ => {
            let expected: Vec<String> = KEYWORDS.iter().map(|k| format!("`{k}`")).collect();
            let refs: Vec<&str> = expected.iter().map(String::as_str).collect();
            return Err(c.error(&refs));
        }
    };
    c.pos += 1;
    match keyword.as_str() {
        "object" => Ok(Decl::Object(c.word("an object name")?)),
        "varrow" => {
            let name = c.word("an arrow name")?;
            c.sym(":")?;
            let dom = c.word("an object name")?;
            c.sym("->")?;
            let cod = c.word("an object name")?;
            Ok(Decl::VArrow { name, dom, cod })
        }
        "vcomp" => {
            let g = c.word("an arrow name")?;
            c.sym(".")?;
            let f = c.word("an arrow name")?;
            c.sym("=")?;
            let h = c.word("an arrow name")?;
            Ok(Decl::VComp { g, f, h })
        }
        "proarrow" => {
            let name = c.word("a proarrow name")?;
            c.sym(":")?;
            let src = c.word("an object name")?;
            c.sym("-|>")?;
            let tgt = c.word("an object name")?;
            Ok(Decl::Proarrow { name, src, tgt })
        }
        "cell" => {
            let name = c.word("a cell name")?;
            c.sym(":")?;
            c.sym("[")?;
            let domain = if c.eat_sym("@") {
                let a = c.word("an object name")?;
                c.sym("]")?;
                PathExpr::Empty(a)
            } else {
                PathExpr::Arrows(c.words_until("]", "a proarrow name")?)
            };
            c.sym("/")?;
            c.sym("(")?;
            let left = c.word("an arrow name")?;
            c.sym(",")?;
            let right = c.word("an arrow name")?;
            c.sym(")")?;
            c.sym("=>")?;
            let codomain = c.word("a proarrow name")?;
            Ok(Decl::Cell {
                name,
                domain,
                left,
                right,
                codomain,
            })
        }
        "paste" => {
            let outer = c.word("a cell name")?;
            c.sym("(")?;
            let inners = c.words_until(")", "a cell name")?;
            c.sym("=")?;
            let result = c.word("a cell name")?;
            Ok(Decl::Paste { outer, inners, result })
        }
        "whisker" => {
            let cell = c.word("a cell name")?;
            let arrow = c.word("an arrow name")?;
            c.sym("=")?;
            let result = c.word("a cell name")?;
            Ok(Decl::Whisker { cell, arrow, result })
        }
        "instance" => instance(c),
        "matrix" => {
            let name = c.word("a proarrow name")?;
            c.sym("=")?;
            c.sym("[")?;
            Ok(Decl::Matrix { name, rows: rows(c)? })
        }
        _ => fragment(c),
    }
}

fn instance(c: &mut Cursor) -> Result<Decl, ParseError> {
    let kind = match c.peek_word() {
        Some("bool_matrix") => {
            c.pos += 1;
            InstanceKind::BoolMatrix
        }
        Some("tropical_matrix") => {
            c.pos += 1;
            c.sym("(")?;
            let cap = c.number("a tropical cap between 1 and 255")?;
            c.sym(")")?;
            InstanceKind::TropicalMatrix { cap }
        }
        _ => return Err(c.error(&["`bool_matrix`", "`tropical_matrix`"])),
    };
    let declared = c.peek_word() == Some("declared");
    if declared {
        c.pos += 1;
    }
    c.sym("{")?;
    let mut sets = Vec::new();
    if !c.eat_sym("}") {
        loop {
            let s = c.word("a set name")?;
            c.sym("=")?;
            sets.push((s, c.number("a set size")?));
            if c.eat_sym("}") {
                break;
            }
            if !c.eat_sym(";") {
                return Err(c.error(&["`;`", "`}`"]));
            }
        }
    }
    Ok(Decl::Instance(InstanceDecl { kind, declared, sets }))
}

/// Rows after the opening bracket, through the closing one. Every row must
/// have the length of the first.
fn rows(c: &mut Cursor) -> Result<Vec<Vec<String>>, ParseError> {
    if c.eat_sym("]") {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    loop {
        let start = c.column();
        let mut row = Vec::new();
        while let Some(w) = c.peek_word() {
            row.push(w.to_string());
            c.pos += 1;
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ParseError {
                    line: c.line,
                    column: start,
                    expected: vec![format!("a row of {} entries", first.len())],
                    found: format!("a row of {} entries", row.len()),
                });
            }
        } else if row.is_empty() {
            return Err(c.error(&["a matrix entry", "`]`"]));
        }
        rows.push(row);
        if c.eat_sym("]") {
            return Ok(rows);
        }
        if !c.eat_sym(";") {
            return Err(c.error(&["a matrix entry", "`;`", "`]`"]));
        }
    }
}

fn fragment(c: &mut Cursor) -> Result<Decl, ParseError> {
    const SECTIONS: [&str; 4] = ["`objects`", "`arrows`", "`proarrows`", "`morita`"];
    c.sym("{")?;
    let mut fr = FragmentDecl::default();
    let mut seen: Vec<String> = Vec::new();
    if c.eat_sym("}") {
        return Ok(Decl::Fragment(fr));
    }
    loop {
        let section = match c.peek_word() {
            Some(w @ ("objects" | "arrows" | "proarrows" | "morita")) => w.to_string(),
            _ => return Err(c.error(&SECTIONS)),
        };
        if seen.contains(&section) {
            return Err(c.error(&[&format!("a section other than `{section}`")]));
        }
        c.pos += 1;
        c.sym(":")?;
        while c.peek_sym("|") {
            let a = c.barred()?;
            match section.as_str() {
                "objects" => fr.objects.push(a),
                "arrows" => fr.arrows.push(a),
                "proarrows" => fr.proarrows.push(a),
                _ => {
                    let equivalent = if c.eat_sym("~") {
                        true
                    } else if c.eat_sym("!~") {
                        false
                    } else {
                        return Err(c.error(&["`~`", "`!~`"]));
                    };
                    let b = c.barred()?;
                    fr.morita.push(MoritaDecl { a, b, equivalent });
                }
            }
        }
        seen.push(section);
        if c.eat_sym("}") {
            return Ok(Decl::Fragment(fr));
        }
        if !c.eat_sym(";") {
            return Err(c.error(&["`|`", "`;`", "`}`"]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_declaration_form() {
        let text = "\
# a comment
object A   # trailing
varrow f : A -> B
vcomp g . f = h
proarrow J : A -|> B
cell c : [J K] / (f, g) => L
cell eta : [@A] / (id_A, id_A) => J
paste c (c1 c2) = d
whisker eta f = d
instance tropical_matrix(2) declared { U = 1 ; V = 2 }
matrix J = [1 0 ; 0 1]
fragment { objects: |A| |B| ; proarrows: |J| ; morita: |A| ~ |A| |A| !~ |B| }
";
        let spec = parse_spec(text).unwrap();
        assert_eq!(spec.decls.len(), 11);
        assert_eq!(
            spec.decls[5],
            Decl::Cell {
                name: "eta".into(),
                domain: PathExpr::Empty("A".into()),
                left: "id_A".into(),
                right: "id_A".into(),
                codomain: "J".into(),
            }
        );
        let fr = spec.fragment().unwrap();
        assert_eq!(fr.objects, ["A", "B"]);
        assert!(!fr.morita[1].equivalent);
        assert_eq!(parse_spec(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn ragged_matrix_is_reported_at_the_row() {
        let err = parse_spec("object A\nmatrix J = [1 0 ; 1]").unwrap_err();
        assert_eq!((err.line, err.column), (2, 19));
        assert_eq!(err.expected, ["a row of 2 entries"]);
    }

    #[test]
    fn errors_name_the_expected_tokens() {
        let err = parse_spec("proarrow J : A -> B").unwrap_err();
        assert_eq!((err.line, err.column), (1, 16));
        assert_eq!(err.expected, ["`-|>`"]);
        assert_eq!(err.found, "`->`");
        let err = parse_spec("objects A").unwrap_err();
        assert_eq!(err.column, 1);
        assert!(err.expected.contains(&"`object`".to_string()));
        let err = parse_spec("object A B").unwrap_err();
        assert_eq!(err.expected, ["end of line"]);
        let err = parse_spec("object $").unwrap_err();
        assert_eq!(err.column, 8);
    }

    #[test]
    fn repeated_fragment_section_is_rejected() {
        assert!(parse_spec("fragment { objects: |A| ; objects: |B| }").is_err());
        assert_eq!(
            parse_spec("fragment { }").unwrap().fragment(),
            Some(&FragmentDecl::default())
        );
    }
}
