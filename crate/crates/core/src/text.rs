//! The text format for signatures, structures and pregeometries.
//!
//! ```text
//! # comment
//! signature s3 { R: arity 3 weight 1 }
//! structure S2 over s3 { points a b c; R (a,b,c) (a,c,b) (b,a,c); }
//! pregeometry P { points a b; rank {}=0 {a}=1 {b}=1 {a,b}=2 }
//! ```
//!
//! The full grammar is in `docs/grammar.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pregeom::Pregeometry;
use crate::signature::{Signature, Symbol};
use crate::structure::{Point, RelStructure, Subset};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '\'')
}

fn lex(input: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in input.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                i += 1;
            } else if "{}(),;:=".contains(c) {
                out.push(Token { tok: Tok::Punct(c), line, col });
                i += 1;
            } else if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push(Token { tok: Tok::Word(chars[start..i].iter().collect()), line, col });
            } else {
                return Err(Error::Parse { line, col, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

/// Named objects read from input files, plus session settings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Workspace {
    pub signatures: BTreeMap<String, Signature>,
    /// Each structure with the name of its signature.
    pub structures: BTreeMap<String, (String, RelStructure)>,
    pub pregeometries: BTreeMap<String, Pregeometry>,
}

impl Workspace {
    pub fn structure(&self, name: &str) -> Result<&RelStructure> {
        self.structures
            .get(name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownName { kind: "structure", name: name.to_string() })
    }

    pub fn pregeometry(&self, name: &str) -> Result<&Pregeometry> {
        self.pregeometries
            .get(name)
            .ok_or_else(|| Error::UnknownName { kind: "pregeometry", name: name.to_string() })
    }

    pub fn signature(&self, name: &str) -> Result<&Signature> {
        self.signatures.get(name).ok_or_else(|| Error::UnknownName { kind: "signature", name: name.to_string() })
    }

    /// Merge another workspace; names must stay unique per kind.
    pub fn merge(&mut self, other: Workspace) -> Result<()> {
        fn join<V>(into: &mut BTreeMap<String, V>, from: BTreeMap<String, V>, kind: &'static str) -> Result<()> {
            for (k, v) in from {
                if into.contains_key(&k) {
                    return Err(Error::Parse { line: 0, col: 0, msg: format!("duplicate {kind} `{k}`") });
                }
                into.insert(k, v);
            }
            Ok(())
        }
        join(&mut self.signatures, other.signatures, "signature")?;
        join(&mut self.structures, other.structures, "structure")?;
        join(&mut self.pregeometries, other.pregeometries, "pregeometry")
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    cap: usize,
}

impl Parser {
    fn err<T>(&self, at: Option<&Token>, msg: impl Into<String>) -> Result<T> {
        let (line, col) = at.map(|t| (t.line, t.col)).unwrap_or(self.end);
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Token> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err(None, "unexpected end of input"),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(p), .. }) if *p == c)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Word(x), .. }) if x == w)
    }

    fn punct(&mut self, c: char) -> Result<()> {
        let t = self.next()?;
        if t.tok != Tok::Punct(c) {
            return self.err(Some(&t), format!("expected `{c}`"));
        }
        Ok(())
    }

    fn word(&mut self) -> Result<(String, Token)> {
        let t = self.next()?;
        match &t.tok {
            Tok::Word(w) => Ok((w.clone(), t.clone())),
            Tok::Punct(c) => self.err(Some(&t), format!("expected a name, found `{c}`")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let (w, t) = self.word()?;
        if w != kw {
            return self.err(Some(&t), format!("expected `{kw}`, found `{w}`"));
        }
        Ok(())
    }

    fn number(&mut self) -> Result<u32> {
        let (w, t) = self.word()?;
        w.parse().or_else(|_| self.err(Some(&t), format!("expected a number, found `{w}`")))
    }

    fn skip_separators(&mut self) {
        while self.is_punct(';') || self.is_punct(',') {
            self.pos += 1;
        }
    }

    fn signature(&mut self) -> Result<(String, Signature, Token)> {
        let (name, at) = self.word()?;
        let open = if self.is_word("open") {
            self.pos += 1;
            true
        } else {
            false
        };
        self.punct('{')?;
        let mut symbols = Vec::new();
        loop {
            self.skip_separators();
            if self.is_punct('}') {
                self.pos += 1;
                break;
            }
            let (sym, st) = self.word()?;
            self.punct(':')?;
            self.keyword("arity")?;
            let arity = self.number()?;
            self.keyword("weight")?;
            let weight = self.number()?;
            if symbols.iter().any(|s: &Symbol| s.name == sym) {
                return self.err(Some(&st), format!("duplicate symbol `{sym}`"));
            }
            symbols.push(Symbol::new(sym, arity as usize, weight));
        }
        let sig = Signature::new(symbols, open).or_else(|e| self.err(Some(&at), e.to_string()))?;
        Ok((name, sig, at))
    }

    fn points(&mut self) -> Result<Vec<(String, Token)>> {
        self.keyword("points")?;
        let mut pts = Vec::new();
        while let Some(Token { tok: Tok::Word(_), .. }) = self.peek() {
            pts.push(self.word()?);
        }
        let mut seen = std::collections::BTreeSet::new();
        for (p, t) in &pts {
            if !seen.insert(p.clone()) {
                return self.err(Some(t), format!("point `{p}` declared twice"));
            }
        }
        Ok(pts)
    }

    fn structure(&mut self, ws: &Workspace) -> Result<(String, String, RelStructure)> {
        let (name, at) = self.word()?;
        self.keyword("over")?;
        let (sig_name, st) = self.word()?;
        let sig = match ws.signatures.get(&sig_name) {
            Some(s) => s.clone(),
            None => return self.err(Some(&st), format!("unknown signature `{sig_name}`")),
        };
        self.punct('{')?;
        let pts = self.points()?;
        let declared: std::collections::BTreeSet<&str> = pts.iter().map(|(p, _)| p.as_str()).collect();
        let mut tuples: Vec<(String, Vec<Point>)> = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        loop {
            self.skip_separators();
            if self.is_punct('}') {
                self.pos += 1;
                break;
            }
            let (sym, symt) = self.word()?;
            let Some(symbol) = sig.symbol(&sym) else {
                return self.err(Some(&symt), format!("unknown symbol `{sym}` in signature `{sig_name}`"));
            };
            while self.is_punct('(') {
                let open = self.next()?;
                let mut t = Vec::new();
                loop {
                    let (p, pt) = self.word()?;
                    if !declared.contains(p.as_str()) {
                        return self.err(Some(&pt), format!("point `{p}` is not declared"));
                    }
                    t.push(Point::from(p));
                    if self.is_punct(',') {
                        self.pos += 1;
                    } else {
                        self.punct(')')?;
                        break;
                    }
                }
                if t.len() != symbol.arity {
                    return self.err(
                        Some(&open),
                        format!("arity mismatch: `{sym}` has arity {}, tuple has {} entries", symbol.arity, t.len()),
                    );
                }
                if !seen.insert((sym.clone(), t.clone())) {
                    return self.err(Some(&open), format!("duplicate tuple for `{sym}`"));
                }
                tuples.push((sym.clone(), t));
            }
        }
        let m = RelStructure::new(sig, pts.into_iter().map(|(p, _)| p), tuples)
            .or_else(|e| self.err(Some(&at), e.to_string()))?;
        Ok((name, sig_name, m))
    }

    fn subset_literal(&mut self, ground: &[(String, Token)]) -> Result<Subset> {
        let open = self.next()?;
        if open.tok != Tok::Punct('{') {
            return self.err(Some(&open), "expected `{`");
        }
        let mut s = Subset::EMPTY;
        if self.is_punct('}') {
            self.pos += 1;
            return Ok(s);
        }
        loop {
            let (p, pt) = self.word()?;
            match ground.iter().position(|(g, _)| *g == p) {
                Some(i) => s = s.with(i),
                None => return self.err(Some(&pt), format!("point `{p}` is not declared")),
            }
            if self.is_punct(',') {
                self.pos += 1;
            } else {
                self.punct('}')?;
                return Ok(s);
            }
        }
    }

    fn pregeometry(&mut self) -> Result<(String, Pregeometry)> {
        let (name, at) = self.word()?;
        self.punct('{')?;
        let ground = self.points()?;
        if ground.len() > self.cap {
            return Err(Error::size(format!("pregeometry `{name}`"), ground.len(), self.cap));
        }
        self.skip_separators();
        self.keyword("rank")?;
        let mut table: Vec<Option<u32>> = vec![None; 1 << ground.len()];
        while self.is_punct('{') {
            let t = self.peek().cloned();
            let s = self.subset_literal(&ground)?;
            self.punct('=')?;
            let r = self.number()?;
            if table[s.0 as usize].replace(r).is_some() {
                return self.err(t.as_ref(), "rank given twice for the same subset");
            }
        }
        self.skip_separators();
        self.punct('}')?;
        let Some(table) = table.into_iter().collect::<Option<Vec<u32>>>() else {
            return self.err(Some(&at), "rank table must list every subset");
        };
        let points = ground.into_iter().map(|(p, _)| Point::from(p)).collect();
        let pg = Pregeometry::new(points, table, self.cap).or_else(|e| self.err(Some(&at), e.to_string()))?;
        Ok((name, pg))
    }
}

/// Parse a whole input into a workspace. `cap` bounds pregeometry ground sets.
pub fn parse(input: &str, cap: usize) -> Result<Workspace> {
    parse_into(Workspace::default(), input, cap)
}

/// Parse more input on top of an existing workspace; its signatures are in scope.
pub fn parse_into(mut ws: Workspace, input: &str, cap: usize) -> Result<Workspace> {
    let toks = lex(input)?;
    let end = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end, cap };
    while let Some(t) = p.peek().cloned() {
        let (kw, _) = p.word()?;
        match kw.as_str() {
            "signature" => {
                let (name, sig, at) = p.signature()?;
                if ws.signatures.insert(name.clone(), sig).is_some() {
                    return p.err(Some(&at), format!("duplicate signature `{name}`"));
                }
            }
            "structure" => {
                let at = p.peek().cloned();
                let (name, sig, m) = p.structure(&ws)?;
                if ws.structures.insert(name.clone(), (sig, m)).is_some() {
                    return p.err(at.as_ref(), format!("duplicate structure `{name}`"));
                }
            }
            "pregeometry" => {
                let at = p.peek().cloned();
                let (name, pg) = p.pregeometry()?;
                if ws.pregeometries.insert(name.clone(), pg).is_some() {
                    return p.err(at.as_ref(), format!("duplicate pregeometry `{name}`"));
                }
            }
            other => return p.err(Some(&t), format!("expected `signature`, `structure` or `pregeometry`, found `{other}`")),
        }
    }
    Ok(ws)
}

pub fn render_signature(name: &str, sig: &Signature) -> String {
    let mut out = format!("signature {name}{} {{\n", if sig.is_open() { " open" } else { "" });
    for s in sig.symbols() {
        let _ = writeln!(out, "  {}: arity {} weight {}", s.name, s.arity, s.weight);
    }
    out.push_str("}\n");
    out
}

fn body(m: &RelStructure, sep: &str) -> Vec<String> {
    let pts: Vec<&str> = m.universe().iter().map(Point::as_str).collect();
    let mut lines = vec![if pts.is_empty() { "points;".to_string() } else { format!("points {};", pts.join(" ")) }];
    for (name, tuples) in m.relations() {
        let ts: Vec<String> = tuples.iter().map(|t| m.format_tuple(t)).collect();
        lines.push(format!("{name}{sep}{};", ts.join(" ")));
    }
    lines
}

pub fn render_structure(name: &str, sig_name: &str, m: &RelStructure) -> String {
    let mut out = format!("structure {name} over {sig_name} {{\n");
    for l in body(m, " ") {
        let _ = writeln!(out, "  {l}");
    }
    out.push_str("}\n");
    out
}

/// One-line rendering `{ points a b; R (a,a,b); }` for reports.
pub fn inline_structure(m: &RelStructure) -> String {
    format!("{{ {} }}", body(m, " ").join(" "))
}

pub fn render_subset(names: &[&str]) -> String {
    format!("{{{}}}", names.join(","))
}

pub fn render_pregeometry(name: &str, p: &Pregeometry) -> String {
    let pts: Vec<&str> = p.ground().iter().map(Point::as_str).collect();
    let mut out = format!("pregeometry {name} {{\n  points {};\n  rank", pts.join(" "));
    for m in 0..1u64 << p.len() {
        let s = Subset(m);
        let _ = write!(out, " {}={}", render_subset(&p.subset_names(s)), p.rank(s));
    }
    out.push_str("\n}\n");
    out
}

/// Serialize a workspace; [`parse`] reads it back unchanged.
pub fn render_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (name, sig) in &ws.signatures {
        out.push_str(&render_signature(name, sig));
    }
    for (name, (sig, m)) in &ws.structures {
        out.push_str(&render_structure(name, sig, m));
    }
    for (name, p) in &ws.pregeometries {
        out.push_str(&render_pregeometry(name, p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::*;

    const EXAMPLE: &str = "
        # the running example
        signature s3 { R: arity 3 weight 1 }
        structure S2 over s3 { points a b c; R (a,b,c) (a,c,b) (b,a,c); }
        pregeometry P { points a b; rank {}=0 {a}=1 {b}=1 {a,b}=2 }
    ";

    #[test]
    fn parses_example() {
        let ws = parse(EXAMPLE, 20).unwrap();
        assert_eq!(ws.structure("S2").unwrap(), &s2());
        assert_eq!(ws.pregeometry("P").unwrap(), &Pregeometry::free(pts(&["a", "b"]), 20).unwrap());
        assert_eq!(ws.signature("s3").unwrap(), &Signature::uniform(3));
    }

    #[test]
    fn round_trip() {
        let mut ws = parse(EXAMPLE, 20).unwrap();
        ws.signatures.insert("w".into(), Signature::new(vec![Symbol::new("T", 2, 3)], true).unwrap());
        ws.structures.insert(
            "X".into(),
            (
                "w".into(),
                RelStructure::new(
                    ws.signatures["w"].clone(),
                    ["1a.2", "b'", "c-d"],
                    [("T", pts(&["1a.2", "b'"])), ("R4", pts(&["c-d", "c-d", "b'", "1a.2"]))],
                )
                .unwrap(),
            ),
        );
        ws.structures.insert("E".into(), ("s3".into(), RelStructure::empty(Signature::uniform(3))));
        let text = render_workspace(&ws);
        assert_eq!(parse(&text, 20).unwrap(), ws);
    }

    fn parse_err(src: &str) -> (usize, usize, String) {
        match parse(src, 20) {
            Err(Error::Parse { line, col, msg }) => (line, col, msg),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_locations() {
        let (line, col, msg) = parse_err("signature s3 { R: arity 3 weight 1 }\nstructure S over s3 { points a b; R (a,b); }");
        assert_eq!((line, col), (2, 37));
        assert!(msg.contains("arity mismatch"), "{msg}");
        let (_, _, msg) = parse_err("structure S over nope { points a; }");
        assert!(msg.contains("unknown signature"));
        let (_, _, msg) = parse_err("signature s { R: arity 1 weight 1 }\nstructure S over s { points a; R (b); }");
        assert!(msg.contains("not declared"));
        let (_, _, msg) = parse_err("signature s { R: arity 1 weight 1 }\nsignature s { }");
        assert!(msg.contains("duplicate signature"));
        let (line, col, _) = parse_err("signature s { R arity 1 }");
        assert_eq!((line, col), (1, 17));
        let (_, _, msg) = parse_err("pregeometry P { points a; rank {}=0 }");
        assert!(msg.contains("every subset"));
        let (_, _, msg) = parse_err("pregeometry P { points a; rank {}=0 {a}=2 }");
        assert!(msg.contains("matroid"));
        let (_, _, msg) = parse_err("signature s { R: arity 1 weight 1 } $");
        assert!(msg.contains("unexpected character"));
    }
}
