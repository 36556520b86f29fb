//! Output rendering (plain, CSV, JSON) and the expansion file schema.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use rootsum_core::analysis::ResidualRow;
use rootsum_core::exact::Rat;
use rootsum_core::hp::HpReal;
use rootsum_core::series::{Expansion, ExpansionTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Plain,
    Csv,
    Json,
}

/// A single output value.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(String),
    Real(HpReal),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn int(v: impl ToString) -> Self {
        Cell::Int(v.to_string())
    }

    pub fn text(v: impl Into<String>) -> Self {
        Cell::Text(v.into())
    }

    /// Digits only, as written to CSV and JSON.
    pub fn raw(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Real(v) if v.is_exact() => exact_decimal(v),
            Cell::Real(v) => v.to_string(),
            Cell::Float(f) => format_float(*f),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    /// Human-readable, with error bounds spelled out.
    pub fn plain(&self) -> String {
        match self {
            Cell::Real(v) if v.is_exact() => exact_decimal(v),
            Cell::Real(v) => format!("{v} ± {:.1e}", v.error_bound_f64()),
            Cell::Empty => "-".into(),
            other => other.raw(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Int(_) | Cell::Real(_) => {
                let raw = self.raw();
                Number::from_str(&raw).map(Value::Number).unwrap_or(Value::String(raw))
            }
            Cell::Float(f) => Number::from_str(&format_float(*f))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Exact values drop trailing zeros, so an exact zero prints as `0`.
fn exact_decimal(v: &HpReal) -> String {
    let s = v.to_string();
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn format_float(f: f64) -> String {
    let mag = f.abs();
    if f.is_finite() && f != 0.0 && !(1e-4..1e15).contains(&mag) {
        format!("{f:e}")
    } else {
        f.to_string()
    }
}

/// Ordered key/value output.
#[derive(Debug, Clone, Default)]
pub struct Record {
    pub fields: Vec<(String, Cell)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: Cell) -> Self {
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn push(&mut self, key: &str, value: Cell) {
        self.fields.push((key.to_string(), value));
    }

    fn json(&self) -> Map<String, Value> {
        self.fields.iter().map(|(k, v)| (k.clone(), v.json())).collect()
    }
}

/// Rows with a fixed column set, followed by summary fields.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Record,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub enum Output {
    Record(Record),
    Table(Table),
    /// Pre-built JSON document, printed as-is in every format.
    Document(Value),
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: impl Iterator<Item = String>) -> String {
    cells.map(|c| csv_escape(&c)).collect::<Vec<_>>().join(",")
}

/// Renders an output; the result always ends in a newline.
pub fn render(out: &Output, format: OutputFormat) -> String {
    let mut s = String::new();
    match (out, format) {
        (Output::Document(v), _) => {
            s = serde_json::to_string_pretty(v).expect("JSON values serialize");
            s.push('\n');
        }
        (Output::Record(r), OutputFormat::Plain) => {
            if let [(_, only)] = r.fields.as_slice() {
                let _ = writeln!(s, "{}", only.plain());
            } else {
                for (k, v) in &r.fields {
                    let _ = writeln!(s, "{k}: {}", v.plain());
                }
            }
        }
        (Output::Record(r), OutputFormat::Csv) => {
            let _ = writeln!(s, "{}", csv_line(r.fields.iter().map(|(k, _)| k.clone())));
            let _ = writeln!(s, "{}", csv_line(r.fields.iter().map(|(_, v)| v.raw())));
        }
        (Output::Record(r), OutputFormat::Json) => {
            s = serde_json::to_string_pretty(&Value::Object(r.json())).expect("JSON values serialize");
            s.push('\n');
        }
        (Output::Table(t), OutputFormat::Plain) => {
            let _ = writeln!(s, "{}", t.columns.join("\t"));
            for row in &t.rows {
                let _ = writeln!(s, "{}", row.iter().map(Cell::plain).collect::<Vec<_>>().join("\t"));
            }
            for (k, v) in &t.summary.fields {
                let _ = writeln!(s, "{k}: {}", v.plain());
            }
        }
        (Output::Table(t), OutputFormat::Csv) => {
            let _ = writeln!(s, "{}", csv_line(t.columns.iter().cloned()));
            for row in &t.rows {
                let _ = writeln!(s, "{}", csv_line(row.iter().map(Cell::raw)));
            }
        }
        (Output::Table(t), OutputFormat::Json) => {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        t.columns
                            .iter()
                            .cloned()
                            .zip(row.iter().map(Cell::json))
                            .collect(),
                    )
                })
                .collect();
            let mut obj = Map::new();
            obj.insert("rows".into(), Value::Array(rows));
            obj.extend(t.summary.json());
            s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
            s.push('\n');
        }
    }
    s
}

/// Columns of the residual CSV.
pub const RESIDUAL_COLUMNS: [&str; 6] = ["n", "reference", "predicted", "residual", "slope", "flag"];

pub fn residual_table(rows: &[ResidualRow]) -> Table {
    let mut t = Table::new(&RESIDUAL_COLUMNS);
    for r in rows {
        t.rows.push(vec![
            Cell::int(&r.n),
            Cell::Real(r.reference.clone()),
            Cell::Real(r.predicted.clone()),
            Cell::Real(r.residual.clone()),
            r.local_slope.map(Cell::Float).unwrap_or(Cell::Empty),
            Cell::text(if r.precision_limited { "precision-limited" } else { "ok" }),
        ]);
    }
    t
}

/// One term of the expansion file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub num: Number,
    pub den: Number,
    pub exp_num: Number,
    pub exp_den: Number,
}

/// `{"m", "p", "terms": [...], "zeta_arg_num": -1, "zeta_arg_den": m}`.
/// `terms` lists every non-constant term by decreasing exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub m: u32,
    pub p: u32,
    pub terms: Vec<TermJson>,
    pub zeta_arg_num: i64,
    pub zeta_arg_den: u32,
}

fn big_number(v: &BigInt) -> Number {
    Number::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

fn number_big(n: &Number) -> Result<BigInt, String> {
    BigInt::from_str(&n.to_string()).map_err(|_| format!("{n} is not an integer"))
}

impl From<&Expansion> for ExpansionJson {
    fn from(e: &Expansion) -> Self {
        let terms = e
            .terms()
            .map(|t| TermJson {
                num: big_number(t.coeff.numer()),
                den: big_number(t.coeff.denom()),
                exp_num: big_number(t.exponent.numer()),
                exp_den: big_number(t.exponent.denom()),
            })
            .collect();
        ExpansionJson {
            m: e.m,
            p: e.p,
            terms,
            zeta_arg_num: -1,
            zeta_arg_den: e.m,
        }
    }
}

impl TryFrom<&ExpansionJson> for Expansion {
    type Error = String;

    fn try_from(j: &ExpansionJson) -> Result<Self, String> {
        if j.zeta_arg_num != -1 || j.zeta_arg_den != j.m {
            return Err("zeta argument must be -1/m".into());
        }
        if j.terms.len() != 2 + j.p as usize {
            return Err(format!("expected {} terms, found {}", 2 + j.p, j.terms.len()));
        }
        let mut terms = j
            .terms
            .iter()
            .map(|t| {
                let den = number_big(&t.den)?;
                let exp_den = number_big(&t.exp_den)?;
                if den == BigInt::from(0) || exp_den == BigInt::from(0) {
                    return Err("zero denominator".to_string());
                }
                Ok(ExpansionTerm {
                    coeff: Rat::new(number_big(&t.num)?, den),
                    exponent: Rat::new(number_big(&t.exp_num)?, exp_den),
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        let correction_terms = terms.split_off(2);
        Ok(Expansion {
            m: j.m,
            p: j.p,
            leading_terms: terms,
            zeta_arg: Rat::new(BigInt::from(-1), BigInt::from(j.m)),
            correction_terms,
        })
    }
}

pub fn expansion_to_json(e: &Expansion) -> String {
    serde_json::to_string(&ExpansionJson::from(e)).expect("expansion serializes")
}

pub fn expansion_from_json(s: &str) -> Result<Expansion, String> {
    let j: ExpansionJson = serde_json::from_str(s).map_err(|e| e.to_string())?;
    Expansion::try_from(&j)
}
