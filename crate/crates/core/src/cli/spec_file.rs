//! Model files: one `key = value` per line, `#` starts a comment, lists in brackets.
//!
//! ```text
//! model = dicke
//! epsilons = [0.8, 1.3]
//! spins = [0.5, 0.5]
//! G = 0.2
//! hbar_omega = 1.0
//! N = 2
//! ```

use std::fmt::Write as _;

use crate::algebra::{GaudinKind, LevelSet};
use crate::error::{Error, Result};
use crate::rg_core::{DickeSpec, Model, ModelSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Word(String),
    List(Vec<f64>),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Number(x) => x.to_string(),
            Value::Word(w) => w.clone(),
            Value::List(v) => format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
        }
    }
}

/// Parsed `key = value` entries in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpecDocument {
    entries: Vec<(String, Value, usize)>,
}

fn at(line: usize, col: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidSpec(format!("line {line}, column {col}: {msg}"))
}

fn parse_number(text: &str, line: usize, col: usize) -> Result<f64> {
    let x: f64 = text
        .trim()
        .parse()
        .map_err(|_| at(line, col, format!("expected a number, found '{}'", text.trim())))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(at(line, col, "numbers must be finite"))
    }
}

/// Parses one value; `col` is the 1-based column where `text` starts.
pub fn parse_value(text: &str, line: usize, col: usize) -> Result<Value> {
    let lead = text.len() - text.trim_start().len();
    let col = col + lead;
    let t = text.trim();
    if t.is_empty() {
        return Err(at(line, col, "missing value"));
    }
    if let Some(rest) = t.strip_prefix('[') {
        let inner = rest
            .strip_suffix(']')
            .ok_or_else(|| at(line, col + t.len() - 1, "unterminated list"))?;
        if inner.trim().is_empty() {
            return Ok(Value::List(Vec::new()));
        }
        let mut out = Vec::new();
        let mut offset = col + 1;
        for item in inner.split(',') {
            out.push(parse_number(item, line, offset + item.len() - item.trim_start().len())?);
            offset += item.len() + 1;
        }
        return Ok(Value::List(out));
    }
    if t.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
        return parse_number(t, line, col).map(Value::Number);
    }
    if t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Ok(Value::Word(t.to_string()));
    }
    Err(at(line, col, format!("cannot read value '{t}'")))
}

impl SpecDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = SpecDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let eq = content.find('=').ok_or_else(|| {
                at(
                    line,
                    content.len() - content.trim_start().len() + 1,
                    "expected 'key = value'",
                )
            })?;
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(at(line, 1, "missing key"));
            }
            if doc.get(key).is_some() {
                return Err(at(line, 1, format!("duplicate key '{key}'")));
            }
            let value = parse_value(&content[eq + 1..], line, eq + 2)?;
            doc.entries.push((key.to_string(), value, line));
        }
        Ok(doc)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|e| e.0 == key).map(|e| &e.1)
    }

    /// Replaces or appends an entry.
    pub fn set(&mut self, key: &str, value: Value) {
        match self.entries.iter_mut().find(|e| e.0 == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value, 0)),
        }
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("override '{assignment}' is not key=value")))?;
        let value = parse_value(value, 0, key.len() + 2)
            .map_err(|e| Error::InvalidSpec(format!("override '{assignment}': {e}")))?;
        self.set(key.trim(), value);
        Ok(())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.iter().find(|e| e.0 == key).map_or(0, |e| e.2)
    }

    fn invalid(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        match self.line_of(key) {
            0 => Error::InvalidSpec(format!("{key}: {msg}")),
            l => Error::InvalidSpec(format!("line {l}: {key}: {msg}")),
        }
    }

    fn require(&self, key: &str) -> Result<&Value> {
        self.get(key)
            .ok_or_else(|| Error::InvalidSpec(format!("missing key '{key}'")))
    }

    fn number(&self, key: &str) -> Result<f64> {
        match self.require(key)? {
            Value::Number(x) => Ok(*x),
            _ => Err(self.invalid(key, "expected a number")),
        }
    }

    fn count(&self, key: &str) -> Result<usize> {
        let x = self.number(key)?;
        if x.fract() != 0.0 || x < 0.0 || x > u32::MAX as f64 {
            return Err(self.invalid(key, "expected a non-negative integer"));
        }
        Ok(x as usize)
    }

    fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.require(key)? {
            Value::List(v) => Ok(v.clone()),
            Value::Number(x) => Ok(vec![*x]),
            _ => Err(self.invalid(key, "expected a list of numbers")),
        }
    }

    fn word(&self, key: &str) -> Result<&str> {
        match self.require(key)? {
            Value::Word(w) => Ok(w),
            _ => Err(self.invalid(key, "expected a word")),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, _, _) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(self.invalid(key, format!("unknown key (expected one of {})", allowed.join(", "))));
            }
        }
        Ok(())
    }

    /// Validated model and optional degeneracy of the deformed copy.
    pub fn to_spec(&self) -> Result<SpecFile> {
        let n = self.count("N")?;
        if n < 1 {
            return Err(self.invalid("N", "N must be at least 1"));
        }
        match self.word("model")? {
            "rg" => {
                self.check_keys(&["model", "kind", "etas", "degeneracies", "spins", "g", "N"])?;
                let kind_name = self.word("kind")?;
                let kind = GaudinKind::from_name(kind_name)
                    .ok_or_else(|| self.invalid("kind", format!("unknown kind '{kind_name}'")))?;
                let etas = self.list("etas")?;
                let levels = match (self.get("degeneracies"), self.get("spins")) {
                    (Some(_), Some(_)) => return Err(self.invalid("spins", "give either degeneracies or spins")),
                    (Some(_), None) => {
                        let d = self.list("degeneracies")?;
                        if d.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
                            return Err(self.invalid("degeneracies", "expected positive integers"));
                        }
                        LevelSet::from_degeneracies(etas, d.iter().map(|&x| x as u32).collect())?
                    }
                    (None, Some(_)) => LevelSet::new(etas, self.list("spins")?)?,
                    (None, None) => return Err(Error::InvalidSpec("missing key 'degeneracies'".into())),
                };
                Ok(SpecFile {
                    model: Model::Rg(ModelSpec::new(levels, kind, n, self.number("g")?)?),
                    omega0: None,
                })
            }
            "dicke" => {
                self.check_keys(&["model", "epsilons", "spins", "G", "hbar_omega", "N", "omega0"])?;
                let spec = DickeSpec::new(
                    self.list("epsilons")?,
                    self.list("spins")?,
                    self.number("G")?,
                    self.number("hbar_omega")?,
                    n,
                )?;
                let omega0 = match self.get("omega0") {
                    Some(_) => Some(self.count("omega0")? as u32),
                    None => None,
                };
                Ok(SpecFile {
                    model: Model::Dicke(spec),
                    omega0,
                })
            }
            other => Err(self.invalid("model", format!("unknown model '{other}' (expected rg or dicke)"))),
        }
    }
}

/// Contents of a model file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub model: Model,
    pub omega0: Option<u32>,
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    SpecDocument::parse(text)?.to_spec()
}

/// Canonical text of a model file; `parse_spec(&emit_spec(s)) == s`.
pub fn emit_spec(spec: &SpecFile) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: Value| writeln!(out, "{k} = {}", v.render()).unwrap();
    let list = |v: &[f64]| Value::List(v.to_vec());
    match &spec.model {
        Model::Rg(m) => {
            line("model", Value::Word("rg".into()));
            line("kind", Value::Word(m.kind.name().into()));
            line("etas", list(m.levels.etas()));
            line(
                "degeneracies",
                Value::List(m.levels.degeneracies().iter().map(|&d| d as f64).collect()),
            );
            line("g", Value::Number(m.coupling_g));
            line("N", Value::Number(m.n_excitations as f64));
        }
        Model::Dicke(d) => {
            line("model", Value::Word("dicke".into()));
            line("epsilons", list(&d.epsilons));
            line("spins", list(&d.spins));
            line("G", Value::Number(d.coupling_g));
            line("hbar_omega", Value::Number(d.hbar_omega));
            line("N", Value::Number(d.n_excitations as f64));
            if let Some(o) = spec.omega0 {
                line("omega0", Value::Number(o as f64));
            }
        }
    }
    out
}
