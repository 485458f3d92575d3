use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::spec::RunSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// Reported but never decides the outcome.
    #[serde(rename = "WARN")]
    Warn,
}

/// Direction of the comparison between `measured` and `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// PASS iff `measured ≤ tolerance`.
    Max,
    /// PASS iff `measured ≥ tolerance`.
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or property the check exercises.
    pub anchor: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckRecord {
    pub fn max(name: &str, anchor: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(name, anchor, measured, tolerance, Bound::Max)
    }

    pub fn min(name: &str, anchor: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(name, anchor, measured, tolerance, Bound::Min)
    }

    fn new(name: &str, anchor: &str, measured: f64, tolerance: f64, bound: Bound) -> Self {
        let ok = match bound {
            Bound::Max => measured <= tolerance,
            Bound::Min => measured >= tolerance,
        };
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
            bound,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn warn(mut self) -> Self {
        self.status = Status::Warn;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub build: String,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            build: env!("CSGRAV_BUILD").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub spec: RunSpec,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    /// Command-specific measurements.
    pub data: serde_json::Value,
    pub environment: Environment,
}

impl Report {
    pub fn new(spec: RunSpec, checks: Vec<CheckRecord>, data: serde_json::Value) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        };
        Self {
            spec,
            status,
            checks,
            data,
            environment: Environment::current(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// `x` with 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON whose floats carry 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Iteration history in CSV form.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct History {
    pub objective: Vec<f64>,
    pub step: Vec<f64>,
    pub action_pg: Vec<f64>,
    pub action_cs: Vec<f64>,
}

pub const CSV_HEADER: &str = "iter,objective,step,action_pg,action_cs";

impl History {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for i in 0..self.objective.len() {
            let row = [
                self.objective[i],
                self.step[i],
                self.action_pg[i],
                self.action_cs[i],
            ];
            out.push_str(&i.to_string());
            for v in row {
                out.push(',');
                out.push_str(&format_f64(v));
            }
            out.push('\n');
        }
        out
    }
}
