//! System definition files.
//!
//! Parsing runs in two stages: the text is read as untyped JSON, then the
//! `kind` field selects a strict typed schema. Every failure carries a JSON
//! pointer to the offending location.

use std::fmt;

use lyapcert_core::corpus;
use lyapcert_core::hopfield::{compile, Activation, HopfieldNetwork};
use lyapcert_core::system::{build_system, BallRadius, JacobianMode, SystemDef, DEFAULT_FD_REL_STEP};
use lyapcert_core::{Error as CoreError, SquareMatrix};
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const KINDS: [&str; 3] = ["expressions", "hopfield", "builtin"];

/// `number | "unbounded"`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusField(pub BallRadius);

impl<'de> Deserialize<'de> for RadiusField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RadiusField;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or \"unbounded\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RadiusField, E> {
                if v.is_finite() && v > 0.0 {
                    Ok(RadiusField(BallRadius::Finite(v)))
                } else {
                    Err(E::custom(format!("ball radius must be positive, got {v}")))
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RadiusField, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RadiusField, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<RadiusField, E> {
                if v == "unbounded" {
                    Ok(RadiusField(BallRadius::Unbounded))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JacobianField {
    #[default]
    Dual,
    FiniteDifference,
}

/// Per-file analysis settings; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOverrides {
    pub quad_tol: Option<f64>,
    pub margin: Option<f64>,
    pub horizon: Option<f64>,
    pub seed: Option<u64>,
    pub polar_radii: Option<usize>,
    pub polar_directions: Option<usize>,
    pub halton_points: Option<usize>,
    pub krasovskii_p: Option<Vec<Vec<f64>>>,
    pub trajectories: Option<usize>,
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpressionsFile {
    #[allow(dead_code)]
    kind: String,
    n: usize,
    components: Vec<String>,
    ball_radius: RadiusField,
    #[serde(default)]
    jacobian_mode: JacobianField,
    fd_step: Option<f64>,
    label: Option<String>,
    analysis: Option<AnalysisOverrides>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ActivationKind {
    Tanh,
    Linear,
    Expression,
}

/// Flat form so that type errors inside an activation keep their full path.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActivationField {
    kind: ActivationKind,
    gain: Option<f64>,
    source: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct HopfieldFile {
    #[allow(dead_code)]
    kind: String,
    n: usize,
    a: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    theta: Vec<f64>,
    activations: Vec<ActivationField>,
    coupling: Option<Vec<Vec<f64>>>,
    inputs: Option<Vec<f64>>,
    x_star: Option<Vec<f64>>,
    ball_radius: Option<RadiusField>,
    label: Option<String>,
    analysis: Option<AnalysisOverrides>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinFile {
    #[allow(dead_code)]
    kind: String,
    name: String,
    ball_radius: Option<RadiusField>,
    analysis: Option<AnalysisOverrides>,
}

/// A validated, compiled system file.
#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub kind: &'static str,
    pub system: SystemDef,
    pub network: Option<HopfieldNetwork>,
    pub analysis: AnalysisOverrides,
    /// The file as given, echoed into reports.
    pub document: Value,
}

pub fn escape_pointer_token(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn path_to_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape_pointer_token(key))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

fn typed<T: DeserializeOwned>(value: &Value) -> CliResult<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut pointer = path_to_pointer(e.path());
        let message = e.into_inner().to_string();
        if let Some(field) = message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
            pointer.push('/');
            pointer.push_str(&escape_pointer_token(field));
        }
        CliError::input(pointer, message)
    })
}

/// JSON pointer of the innermost container member open at byte `offset`.
pub fn pointer_at_offset(text: &str, offset: usize) -> String {
    enum Frame {
        Object { key: Option<String>, want_key: bool },
        Array { index: usize },
    }
    let mut stack: Vec<Frame> = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if i >= offset {
            break;
        }
        match c {
            '{' => stack.push(Frame::Object { key: None, want_key: true }),
            '[' => stack.push(Frame::Array { index: 0 }),
            '}' | ']' => {
                stack.pop();
            }
            ',' => match stack.last_mut() {
                Some(Frame::Object { key, want_key }) => {
                    *key = None;
                    *want_key = true;
                }
                Some(Frame::Array { index }) => *index += 1,
                None => {}
            },
            ':' => {
                if let Some(Frame::Object { want_key, .. }) = stack.last_mut() {
                    *want_key = false;
                }
            }
            '"' => {
                let mut s = String::new();
                let mut escaped = false;
                for (_, c) in chars.by_ref() {
                    if escaped {
                        s.push(c);
                        escaped = false;
                    } else if c == '\\' {
                        escaped = true;
                    } else if c == '"' {
                        break;
                    } else {
                        s.push(c);
                    }
                }
                if let Some(Frame::Object { key, want_key: true }) = stack.last_mut() {
                    *key = Some(s);
                }
            }
            _ => {}
        }
    }
    let mut out = String::new();
    for f in &stack {
        match f {
            Frame::Object { key: Some(k), .. } => out.push_str(&format!("/{}", escape_pointer_token(k))),
            Frame::Object { key: None, .. } => {}
            Frame::Array { index } => out.push_str(&format!("/{index}")),
        }
    }
    out
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut off = 0;
    for (k, l) in text.split_inclusive('\n').enumerate() {
        if k + 1 == line {
            return off + column.saturating_sub(1).min(l.len());
        }
        off += l.len();
    }
    text.len()
}

pub fn parse_document(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| {
        let pointer = pointer_at_offset(text, byte_offset(text, e.line(), e.column()));
        CliError::input(pointer, format!("malformed JSON: {e}"))
    })
}

fn check_len(pointer: &str, found: usize, n: usize) -> CliResult<()> {
    if found != n {
        return Err(CliError::input(pointer, format!("expected {n} entries, found {found}")));
    }
    Ok(())
}

fn square(pointer: &str, rows: &[Vec<f64>], n: usize) -> CliResult<SquareMatrix> {
    check_len(pointer, rows.len(), n)?;
    for (i, r) in rows.iter().enumerate() {
        check_len(&format!("{pointer}/{i}"), r.len(), n)?;
    }
    SquareMatrix::from_rows(rows).map_err(|e| CliError::input(pointer, e.to_string()))
}

fn finite_all(pointer: &str, values: &[f64]) -> CliResult<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(CliError::input(format!("{pointer}/{i}"), "value must be finite"));
    }
    Ok(())
}

fn check_overrides(a: &AnalysisOverrides, n: usize) -> CliResult<()> {
    let positive = |name: &str, v: Option<f64>| -> CliResult<()> {
        match v {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                Err(CliError::input(format!("/analysis/{name}"), format!("must be positive, got {v}")))
            }
            _ => Ok(()),
        }
    };
    positive("quad_tol", a.quad_tol)?;
    positive("horizon", a.horizon)?;
    positive("t_end", a.t_end)?;
    if let Some(m) = a.margin {
        if !(m.is_finite() && m >= 0.0) {
            return Err(CliError::input("/analysis/margin", format!("must be non-negative, got {m}")));
        }
    }
    if a.polar_radii == Some(0) && a.halton_points == Some(0) {
        return Err(CliError::input("/analysis", "sampling plan would be empty"));
    }
    if a.polar_directions == Some(0) {
        return Err(CliError::input("/analysis/polar_directions", "must be at least 1"));
    }
    if a.trajectories == Some(0) {
        return Err(CliError::input("/analysis/trajectories", "must be at least 1"));
    }
    if let Some(p) = &a.krasovskii_p {
        let m = square("/analysis/krasovskii_p", p, n)?;
        finite_all("/analysis/krasovskii_p", m.as_slice())?;
    }
    Ok(())
}

fn core_error(pointer: &str, e: CoreError) -> CliError {
    let pointer = match &e {
        CoreError::Parse { component, .. } | CoreError::VariableOutOfRange { component, .. } => {
            format!("{pointer}/{}", component - 1)
        }
        _ => pointer.to_string(),
    };
    CliError::input(pointer, e.to_string())
}

fn load_expressions(doc: &Value) -> CliResult<(SystemDef, AnalysisOverrides)> {
    let f: ExpressionsFile = typed(doc)?;
    if f.n == 0 {
        return Err(CliError::input("/n", "dimension must be at least 1"));
    }
    check_len("/components", f.components.len(), f.n)?;
    let mode = match f.jacobian_mode {
        JacobianField::Dual => {
            if f.fd_step.is_some() {
                return Err(CliError::input("/fd_step", "only valid with jacobian_mode \"finite_difference\""));
            }
            JacobianMode::Exact
        }
        JacobianField::FiniteDifference => {
            let step = f.fd_step.unwrap_or(DEFAULT_FD_REL_STEP);
            if !(step.is_finite() && step > 0.0) {
                return Err(CliError::input("/fd_step", format!("must be positive, got {step}")));
            }
            JacobianMode::FiniteDifference { rel_step: step }
        }
    };
    let analysis = f.analysis.unwrap_or_default();
    check_overrides(&analysis, f.n)?;
    let sys = build_system(f.n, &f.components, f.ball_radius.0, mode).map_err(|e| core_error("/components", e))?;
    let sys = match f.label {
        Some(l) => sys.with_label(l),
        None => sys,
    };
    Ok((sys, analysis))
}

fn load_hopfield(doc: &Value) -> CliResult<(SystemDef, HopfieldNetwork, AnalysisOverrides)> {
    let f: HopfieldFile = typed(doc)?;
    let n = f.n;
    if n == 0 {
        return Err(CliError::input("/n", "dimension must be at least 1"));
    }
    check_len("/a", f.a.len(), n)?;
    finite_all("/a", &f.a)?;
    if let Some(i) = f.a.iter().position(|a| *a <= 0.0) {
        return Err(CliError::input(format!("/a/{i}"), "decay rates must be positive"));
    }
    let w = square("/W", &f.w, n)?;
    finite_all("/W", w.as_slice())?;
    check_len("/theta", f.theta.len(), n)?;
    finite_all("/theta", &f.theta)?;
    check_len("/activations", f.activations.len(), n)?;
    let mut acts = Vec::with_capacity(n);
    for (i, a) in f.activations.iter().enumerate() {
        let p = format!("/activations/{i}");
        let unexpected = |field: &str| CliError::input(format!("{p}/{field}"), "not valid for this activation kind");
        acts.push(match (a.kind, a.gain, &a.source) {
            (ActivationKind::Tanh, Some(gain), None) => {
                if !(gain.is_finite() && gain > 0.0) {
                    return Err(CliError::input(format!("{p}/gain"), format!("gain must be positive, got {gain}")));
                }
                Activation::Tanh { gain }
            }
            (ActivationKind::Tanh, None, _) => {
                return Err(CliError::input(format!("{p}/gain"), "missing field `gain`"))
            }
            (ActivationKind::Linear, None, None) => Activation::Linear,
            (ActivationKind::Expression, None, Some(source)) => Activation::parse_expression(source)
                .map_err(|e| CliError::input(format!("{p}/source"), e.to_string()))?,
            (ActivationKind::Expression, None, None) => {
                return Err(CliError::input(format!("{p}/source"), "missing field `source`"))
            }
            (_, _, Some(_)) => return Err(unexpected("source")),
            (_, Some(_), _) => return Err(unexpected("gain")),
        });
    }
    let mut net = HopfieldNetwork::new(f.a.clone(), w, f.theta.clone(), acts).map_err(|e| core_error("", e))?;
    if let Some(c) = &f.coupling {
        let c = square("/coupling", c, n)?;
        finite_all("/coupling", c.as_slice())?;
        net = net.with_coupling(c).map_err(|e| core_error("/coupling", e))?;
    }
    if let Some(inputs) = &f.inputs {
        check_len("/inputs", inputs.len(), n)?;
        finite_all("/inputs", inputs)?;
        net = net.with_inputs(inputs.clone()).map_err(|e| core_error("/inputs", e))?;
    }
    if let Some(x) = &f.x_star {
        check_len("/x_star", x.len(), n)?;
        finite_all("/x_star", x)?;
        net = net.with_equilibrium(x.clone()).map_err(|e| core_error("/x_star", e))?;
    }
    let analysis = f.analysis.unwrap_or_default();
    check_overrides(&analysis, n)?;
    let ball = f.ball_radius.map_or(BallRadius::Unbounded, |r| r.0);
    let pointer = match (&f.inputs, &f.x_star) {
        (Some(i), _) if i.iter().any(|v| *v != 0.0) => "/inputs",
        (_, Some(_)) => "/x_star",
        _ => "",
    };
    let sys = compile(&net, ball).map_err(|e| core_error(pointer, e))?;
    let sys = match f.label {
        Some(l) => sys.with_label(l),
        None => sys,
    };
    Ok((sys, net, analysis))
}

fn load_builtin(doc: &Value) -> CliResult<(SystemDef, Option<HopfieldNetwork>, AnalysisOverrides)> {
    let f: BuiltinFile = typed(doc)?;
    let sys = corpus::builtin(&f.name).ok_or_else(|| {
        CliError::input("/name", format!("unknown builtin {:?}; expected one of {:?}", f.name, corpus::BUILTIN_NAMES))
    })?;
    let sys = match f.ball_radius {
        Some(r) => sys.with_ball(r.0),
        None => sys,
    };
    let net = (f.name == "hopfield-2").then(corpus::hopfield_2_network);
    let analysis = f.analysis.unwrap_or_default();
    check_overrides(&analysis, sys.dim())?;
    Ok((sys, net, analysis))
}

/// Validates and compiles a parsed document.
pub fn load_value(document: Value) -> CliResult<LoadedSystem> {
    let obj = document.as_object().ok_or_else(|| CliError::input("", "system file must be a JSON object"))?;
    let kind = match obj.get("kind") {
        None => return Err(CliError::input("/kind", format!("missing field; expected one of {KINDS:?}"))),
        Some(Value::String(k)) => k.as_str(),
        Some(other) => return Err(CliError::input("/kind", format!("expected a string, found {other}"))),
    };
    let (kind, system, network, analysis) = match kind {
        "expressions" => {
            let (s, a) = load_expressions(&document)?;
            ("expressions", s, None, a)
        }
        "hopfield" => {
            let (s, n, a) = load_hopfield(&document)?;
            ("hopfield", s, Some(n), a)
        }
        "builtin" => {
            let (s, n, a) = load_builtin(&document)?;
            ("builtin", s, n, a)
        }
        other => return Err(CliError::input("/kind", format!("unknown kind {other:?}; expected one of {KINDS:?}"))),
    };
    Ok(LoadedSystem { kind, system, network, analysis, document })
}

pub fn load_str(text: &str) -> CliResult<LoadedSystem> {
    load_value(parse_document(text)?)
}

/// Reads a file; `builtin:<name>` is accepted as a shorthand for a builtin document.
pub fn load_path(path: &str) -> CliResult<LoadedSystem> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return load_value(serde_json::json!({ "kind": "builtin", "name": name }));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {path}"), e))?;
    load_str(&text)
}
