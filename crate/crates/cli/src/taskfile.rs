//! Task-file parsing. See `docs/taskfile.ebnf` for the grammar.

use std::collections::BTreeMap;
use std::fmt;

use mcalg::algebra::{FpAlgebra, RingMap};
use mcalg::{AlgebraError, CoeffRing};

use crate::ops;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    Ident(String),
    List(Vec<Value>),
}

impl Value {
    pub fn describe(&self) -> &'static str {
        match self {
            Value::Str(_) => "a string",
            Value::Int(_) => "an integer",
            Value::Ident(_) => "a name",
            Value::List(_) => "a list",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Arg {
    pub value: Value,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub op: String,
    pub args: BTreeMap<String, Arg>,
    pub line: usize,
}

/// Settings from `set` lines; unset entries fall back to command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    pub degree_bound: Option<u32>,
    pub exponent_cap: Option<u32>,
    pub prime: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct IdealDecl {
    pub ring: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct TaskFile {
    pub rings: BTreeMap<String, FpAlgebra>,
    pub maps: BTreeMap<String, RingMap>,
    pub ideals: BTreeMap<String, IdealDecl>,
    pub settings: Settings,
    pub tasks: Vec<Task>,
}

struct Cursor<'a> {
    line: usize,
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, src: &'a str) -> Cursor<'a> {
        Cursor {
            line,
            chars: src.chars().collect(),
            pos: 0,
            _src: src,
        }
    }

    fn err<T>(&self, column: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.chars[self.pos..].iter().take(n).copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of line".to_string(), |c| format!("`{c}`"));
            self.err(self.col(), format!("expected `{s}`, found {found}"))
        }
    }

    fn ident(&mut self) -> PResult<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.chars[start].is_ascii_digit() {
            self.pos = start;
            return self.err(start + 1, "expected a name");
        }
        Ok((self.chars[start..self.pos].iter().collect(), start + 1))
    }

    /// Text up to (not including) one of `stops` at bracket depth zero.
    fn until(&mut self, stops: &[char]) -> PResult<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0i32;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if depth == 0 && stops.contains(&c) {
                break;
            }
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => {
                    depth -= 1;
                    if depth < 0 {
                        return self.err(self.col(), format!("unbalanced `{c}`"));
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
        if depth != 0 {
            return self.err(start + 1, "unbalanced brackets");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        Ok((text.trim_end().to_string(), start + 1))
    }

    /// Comma-separated raw items closed by `close`; the opener is consumed.
    fn raw_list(&mut self, close: char) -> PResult<Vec<(String, usize)>> {
        let mut out = Vec::new();
        if self.eat(&close.to_string()) {
            return Ok(out);
        }
        loop {
            let (item, col) = self.until(&[',', close])?;
            if item.is_empty() {
                return self.err(col, "empty list item");
            }
            out.push((item, col));
            if self.eat(",") {
                continue;
            }
            self.expect(&close.to_string())?;
            return Ok(out);
        }
    }

    fn value(&mut self) -> PResult<Value> {
        let col = self.col();
        match self.peek() {
            Some('"') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos] != '"' {
                    self.pos += 1;
                }
                if self.pos == self.chars.len() {
                    return self.err(col, "unterminated string");
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                self.pos += 1;
                Ok(Value::Str(s))
            }
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.eat("]") {
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    if self.eat(",") {
                        continue;
                    }
                    self.expect("]")?;
                    return Ok(Value::List(items));
                }
            }
            Some(c) if c.is_ascii_digit() || c == '-' => {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                s.parse()
                    .map(Value::Int)
                    .or_else(|_| self.err(col, format!("bad integer `{s}`")))
            }
            Some(_) => Ok(Value::Ident(self.ident()?.0)),
            None => self.err(col, "expected a value"),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_str = !in_str,
            '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn algebra_error(line: usize, column: usize, e: AlgebraError) -> ParseError {
    let (column, message) = match e {
        AlgebraError::Parse { column: c, message } => (column + c.saturating_sub(1), message),
        other => (column, other.to_string()),
    };
    ParseError {
        line,
        column,
        message,
    }
}

impl TaskFile {
    pub fn parse(src: &str) -> PResult<TaskFile> {
        let mut file = TaskFile::default();
        let mut names: BTreeMap<String, usize> = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line_no = i + 1;
            let mut c = Cursor::new(line_no, strip_comment(raw));
            if c.at_end() {
                continue;
            }
            let (kw, kw_col) = c.ident()?;
            match kw.as_str() {
                "ring" | "map" | "ideal" | "task" => {
                    let (name, col) = c.ident()?;
                    if let Some(prev) = names.get(&name) {
                        return c.err(col, format!("`{name}` is already declared on line {prev}"));
                    }
                    names.insert(name.clone(), line_no);
                    match kw.as_str() {
                        "ring" => {
                            let r = file.ring_decl(&mut c)?;
                            file.rings.insert(name, r);
                        }
                        "map" => {
                            let m = file.map_decl(&mut c)?;
                            file.maps.insert(name, m);
                        }
                        "ideal" => {
                            let d = file.ideal_decl(&mut c)?;
                            file.ideals.insert(name, d);
                        }
                        _ => {
                            let t = file.task_decl(&mut c, name, line_no)?;
                            file.tasks.push(t);
                        }
                    }
                }
                "set" => file.set_decl(&mut c)?,
                other => return c.err(kw_col, format!("unknown declaration `{other}`")),
            }
            if !c.at_end() {
                return c.err(c.col(), "unexpected trailing text");
            }
        }
        Ok(file)
    }

    fn ring_decl(&self, c: &mut Cursor) -> PResult<FpAlgebra> {
        c.expect("=")?;
        let (base_text, base_col) = c.until(&['['])?;
        let base: CoeffRing = base_text
            .parse()
            .map_err(|e| algebra_error(c.line, base_col, e))?;
        c.expect("[")?;
        let vars = c.raw_list(']')?;
        for (v, col) in &vars {
            if !v.chars().all(|ch| ch.is_alphanumeric() || ch == '_')
                || v.starts_with(|ch: char| ch.is_ascii_digit())
            {
                return c.err(*col, format!("bad variable name `{v}`"));
            }
        }
        let names: Vec<String> = vars.iter().map(|(v, _)| v.clone()).collect();
        let mut rels = Vec::new();
        if c.eat("/") {
            c.expect("(")?;
            for (r, col) in c.raw_list(')')? {
                rels.push(
                    mcalg::Polynomial::parse(base, &names, &r)
                        .map_err(|e| algebra_error(c.line, col, e))?,
                );
            }
        }
        FpAlgebra::new(base, names, rels).map_err(|e| algebra_error(c.line, base_col, e))
    }

    fn ring_ref(&self, c: &Cursor, name: &str, col: usize) -> PResult<&FpAlgebra> {
        self.rings
            .get(name)
            .map_or_else(|| c.err(col, format!("unknown ring `{name}`")), Ok)
    }

    fn map_decl(&self, c: &mut Cursor) -> PResult<RingMap> {
        c.expect(":")?;
        let (src, scol) = c.ident()?;
        c.expect("->")?;
        let (tgt, tcol) = c.ident()?;
        let s = self.ring_ref(c, &src, scol)?.clone();
        let t = self.ring_ref(c, &tgt, tcol)?.clone();
        c.expect("=")?;
        let open = c.col();
        c.expect("[")?;
        let mut images = Vec::new();
        for (img, col) in c.raw_list(']')? {
            images.push(t.element(&img).map_err(|e| algebra_error(c.line, col, e))?);
        }
        RingMap::new(s, t, images).map_err(|e| algebra_error(c.line, open, e))
    }

    fn ideal_decl(&self, c: &mut Cursor) -> PResult<IdealDecl> {
        c.expect(":")?;
        let (ring, rcol) = c.ident()?;
        let r = self.ring_ref(c, &ring, rcol)?;
        c.expect("=")?;
        c.expect("[")?;
        let mut generators = Vec::new();
        for (g, col) in c.raw_list(']')? {
            r.element(&g).map_err(|e| algebra_error(c.line, col, e))?;
            generators.push(g);
        }
        Ok(IdealDecl { ring, generators })
    }

    fn set_decl(&mut self, c: &mut Cursor) -> PResult<()> {
        let (key, kcol) = c.ident()?;
        c.expect("=")?;
        let vcol = c.col();
        let Value::Int(v) = c.value()? else {
            return c.err(vcol, "expected an integer");
        };
        let positive = |v: i64| -> PResult<u64> {
            if v <= 0 {
                c.err(vcol, format!("`{key}` must be positive"))
            } else {
                Ok(v as u64)
            }
        };
        match key.as_str() {
            "degree_bound" => self.settings.degree_bound = Some(positive(v)? as u32),
            "exponent_cap" => self.settings.exponent_cap = Some(positive(v)? as u32),
            "prime" => {
                let p = positive(v)?;
                if !mcalg::coeff::is_prime(p) {
                    return c.err(vcol, format!("{p} is not a prime"));
                }
                self.settings.prime = Some(p)
            }
            other => return c.err(kcol, format!("unknown setting `{other}`")),
        }
        Ok(())
    }

    fn task_decl(&self, c: &mut Cursor, name: String, line: usize) -> PResult<Task> {
        c.expect("=")?;
        let (op, op_col) = c.ident()?;
        let Some(sig) = ops::signature(&op) else {
            return c.err(op_col, format!("unknown operation `{op}`"));
        };
        c.expect("(")?;
        let mut args = BTreeMap::new();
        if !c.eat(")") {
            loop {
                let (key, kcol) = c.ident()?;
                c.expect("=")?;
                let column = c.col();
                let value = c.value()?;
                if args.insert(key.clone(), Arg { value, column }).is_some() {
                    return c.err(kcol, format!("argument `{key}` given twice"));
                }
                if c.eat(",") {
                    continue;
                }
                c.expect(")")?;
                break;
            }
        }
        let task = Task {
            name,
            op,
            args,
            line,
        };
        ops::check_args(sig, &task, self).map_err(|(column, message)| ParseError {
            line,
            column,
            message,
        })?;
        Ok(task)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declarations_and_tasks() {
        let f = TaskFile::parse(
            "# nodal cubic\nring R = GF(5)[x, y] / (y^2 - x^3 - x^2)\nring S = GF(5)[t]\n\
             map nu : R -> S = [t^2 - 1, t^3 - t]\nset degree_bound = 4\n\
             task c = conductor(map = nu)  # trailing comment\n",
        )
        .unwrap();
        assert_eq!(f.rings.len(), 2);
        assert_eq!(f.maps["nu"].images().len(), 2);
        assert_eq!(f.settings.degree_bound, Some(4));
        assert_eq!(f.tasks[0].op, "conductor");
    }

    #[test]
    fn errors_carry_positions() {
        let e = TaskFile::parse("ring R = QQ[x]\ntask t = frobnicate(ring = R)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
        let e = TaskFile::parse("ring R = QQ[x] / (x^^2)").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.column >= 19, "{e}");
        let e = TaskFile::parse("map f : A -> B = [x]").unwrap_err();
        assert_eq!(e.column, 9);
        let e =
            TaskFile::parse("ring R = QQ[x]\ntask t = groebner_basis(ring = Q, gens = [\"x\"])")
                .unwrap_err();
        assert!(e.message.contains("unknown ring"), "{e}");
    }

    #[test]
    fn duplicate_names_rejected() {
        let e = TaskFile::parse("ring R = QQ[x]\nring R = QQ[y]").unwrap_err();
        assert!(e.message.contains("already declared"));
    }
}
