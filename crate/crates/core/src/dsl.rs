//! The `.cq` circuit language.
//!
//! ```text
//! # comment
//! init omega=6.283185307e9 varphi=0 alpha=0 beta=0
//! H
//! RPHI 0.7853981633974483
//! X
//! ```
//!
//! One statement per line. `init` must come first and appear once; gate
//! lines follow. Floats are plain decimal or scientific notation. Angles are
//! reduced into `[0, 2π)` when parsed.

use std::fmt;

use crate::gate::{apply_pipeline, GateOp};
use crate::netlist::{
    build_hadamard_netlist, build_rphi_netlist, build_x_netlist, perturb_resistors, simulate_netlist, DividerDesign,
    Netlist, NetlistError,
};
use crate::signal::wrap_phase;
use crate::state::{ChannelQuad, ChannelQuadWave, CqubitParams};

/// Shortest text that parses back to exactly `x`.
pub fn format_float(x: f64) -> String {
    let plain = format!("{x}");
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A located parse message. Lines and columns are 1-based; columns count
/// characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {level}: {}", self.line, self.column, self.message)
    }
}

/// Source location of a statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// A parsed program: the initial cqubit and the gates applied to it in
/// order.
///
/// Equality compares `init` and `gates` only; spans are diagnostics
/// metadata.
#[derive(Debug, Clone)]
pub struct Program {
    pub init: CqubitParams,
    pub gates: Vec<GateOp>,
    pub init_span: Span,
    pub gate_spans: Vec<Span>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.init == other.init && self.gates == other.gates
    }
}

impl Program {
    pub fn new(init: CqubitParams, gates: Vec<GateOp>) -> Self {
        let gate_spans = vec![Span::default(); gates.len()];
        Self {
            init,
            gates,
            init_span: Span::default(),
            gate_spans,
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &line[b..byte],
                    column: c,
                });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &line[b..],
            column: c,
        });
    }
    tokens
}

fn parse_float(tok: &str) -> Option<f64> {
    // f64::from_str also takes inf/nan spellings; only digits, signs, '.'
    // and exponents are part of the grammar
    let allowed = |c: char| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E');
    if tok.is_empty() || !tok.chars().all(allowed) {
        return None;
    }
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

const INIT_KEYS: [&str; 4] = ["omega", "varphi", "alpha", "beta"];

fn parse_init(tokens: &[Token<'_>], line: usize, diags: &mut Vec<ParseDiagnostic>) -> Option<CqubitParams> {
    let mut values: [Option<f64>; 4] = [None; 4];
    let mut ok = true;
    for tok in &tokens[1..] {
        let Some((key, value)) = tok.text.split_once('=') else {
            diags.push(ParseDiagnostic::error(
                line,
                tok.column,
                format!("expected key=value, found `{}`", tok.text),
            ));
            ok = false;
            continue;
        };
        let Some(slot) = INIT_KEYS.iter().position(|k| *k == key) else {
            diags.push(ParseDiagnostic::error(
                line,
                tok.column,
                format!("unknown init key `{key}`"),
            ));
            ok = false;
            continue;
        };
        if values[slot].is_some() {
            diags.push(ParseDiagnostic::error(
                line,
                tok.column,
                format!("duplicate init key `{key}`"),
            ));
            ok = false;
            continue;
        }
        let value_column = tok.column + key.chars().count() + 1;
        match parse_float(value) {
            Some(v) => values[slot] = Some(v),
            None => {
                diags.push(ParseDiagnostic::error(
                    line,
                    value_column,
                    format!("`{key}` needs a finite number, found `{value}`"),
                ));
                ok = false;
            }
        }
    }
    for (key, value) in INIT_KEYS.iter().zip(values) {
        if value.is_none() && ok {
            diags.push(ParseDiagnostic::error(
                line,
                tokens[0].column,
                format!("init is missing `{key}`"),
            ));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    let [omega, varphi, alpha, beta] = values.map(|v| v.expect("checked above"));
    match CqubitParams::new(omega, varphi, alpha, beta) {
        Ok(p) => Some(p),
        Err(e) => {
            diags.push(ParseDiagnostic::error(line, tokens[0].column, e.to_string()));
            None
        }
    }
}

fn parse_gate(tokens: &[Token<'_>], line: usize, diags: &mut Vec<ParseDiagnostic>) -> Option<GateOp> {
    let head = &tokens[0];
    let (gate, arity) = match head.text {
        "H" => (Some(GateOp::Hadamard), 0),
        "X" => (Some(GateOp::PauliX), 0),
        "RPHI" => (None, 1),
        other => {
            diags.push(ParseDiagnostic::error(
                line,
                head.column,
                format!("unknown gate `{other}`"),
            ));
            return None;
        }
    };
    let args = &tokens[1..];
    if args.len() > arity {
        diags.push(ParseDiagnostic::error(
            line,
            args[arity].column,
            format!("unexpected argument `{}` to {}", args[arity].text, head.text),
        ));
        return None;
    }
    if let Some(g) = gate {
        return Some(g);
    }
    let Some(arg) = args.first() else {
        let end = head.column + head.text.chars().count();
        diags.push(ParseDiagnostic::error(
            line,
            end,
            "RPHI needs a phase argument in radians",
        ));
        return None;
    };
    match parse_float(arg.text) {
        Some(phi) => Some(GateOp::RPhi(wrap_phase(phi))),
        None => {
            diags.push(ParseDiagnostic::error(
                line,
                arg.column,
                format!("RPHI phase must be a finite number, found `{}`", arg.text),
            ));
            None
        }
    }
}

/// Parse program text. On failure every problem found is reported.
pub fn parse(text: &str) -> Result<Program, Vec<ParseDiagnostic>> {
    let mut diags = Vec::new();
    let mut init: Option<(CqubitParams, Span)> = None;
    let mut init_seen = false;
    let mut gate_seen = false;
    let mut gates = Vec::new();
    let mut gate_spans = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let code = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let tokens = tokenize(code);
        let Some(head) = tokens.first() else {
            continue;
        };
        let span = Span {
            line: line_no,
            column: head.column,
        };
        if head.text == "init" {
            if init_seen {
                diags.push(ParseDiagnostic::error(line_no, head.column, "duplicate init statement"));
                continue;
            }
            init_seen = true;
            if gate_seen {
                diags.push(ParseDiagnostic::error(
                    line_no,
                    head.column,
                    "init must be the first statement",
                ));
            }
            if let Some(p) = parse_init(&tokens, line_no, &mut diags) {
                init = Some((p, span));
            }
            continue;
        }
        if !init_seen && !gate_seen {
            diags.push(ParseDiagnostic::error(
                line_no,
                head.column,
                "gate before init; the first statement must be `init`",
            ));
        }
        gate_seen = true;
        if let Some(g) = parse_gate(&tokens, line_no, &mut diags) {
            gates.push(g);
            gate_spans.push(span);
        }
    }

    if !init_seen {
        diags.push(ParseDiagnostic::error(1, 1, "missing init statement"));
    }
    match init {
        Some((init, init_span)) if diags.is_empty() => Ok(Program {
            init,
            gates,
            init_span,
            gate_spans,
        }),
        _ => {
            if diags.is_empty() {
                diags.push(ParseDiagnostic::error(1, 1, "missing init statement"));
            }
            Err(diags)
        }
    }
}

/// Parse raw bytes; invalid UTF-8 is reported as a diagnostic.
pub fn parse_bytes(bytes: &[u8]) -> Result<Program, Vec<ParseDiagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let prefix = &bytes[..e.valid_up_to()];
            let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = prefix.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&prefix[line_start..]).chars().count() + 1;
            Err(vec![ParseDiagnostic::error(line, column, "input is not valid UTF-8")])
        }
    }
}

/// Canonical text for `p`, LF-terminated.
pub fn format(p: &Program) -> String {
    let mut out = format!(
        "init omega={} varphi={} alpha={} beta={}\n",
        format_float(p.init.omega()),
        format_float(p.init.varphi()),
        format_float(p.init.alpha()),
        format_float(p.init.beta()),
    );
    for g in &p.gates {
        match g {
            GateOp::Hadamard => out.push_str("H\n"),
            GateOp::PauliX => out.push_str("X\n"),
            GateOp::RPhi(phi) => {
                out.push_str("RPHI ");
                out.push_str(&format_float(*phi));
                out.push('\n');
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Ideal,
    Netlist,
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(Backend::Ideal),
            "netlist" => Ok(Backend::Netlist),
            other => Err(format!("unknown backend `{other}` (expected ideal or netlist)")),
        }
    }
}

/// Options for the netlist backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetlistOptions {
    pub design: DividerDesign,
    /// Resistor tolerance in percent; zero keeps nominal values.
    pub resistor_tol_pct: f64,
    pub seed: u64,
}

impl NetlistOptions {
    pub fn exact(r1: f64) -> Result<Self, NetlistError> {
        Ok(Self {
            design: DividerDesign::exact(r1)?,
            resistor_tol_pct: 0.0,
            seed: 0,
        })
    }
}

/// A program lowered onto one backend.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledPipeline {
    Ideal(Vec<GateOp>),
    Netlist(Vec<Netlist>),
}

impl CompiledPipeline {
    pub fn apply(&self, q: &ChannelQuad) -> ChannelQuad {
        match self {
            CompiledPipeline::Ideal(gates) => apply_pipeline(q, gates),
            CompiledPipeline::Netlist(stages) => stages.iter().fold(*q, |acc, n| n.eval(&acc)),
        }
    }

    pub fn run(&self, input: &ChannelQuadWave) -> ChannelQuadWave {
        match self {
            CompiledPipeline::Ideal(gates) => input.map(|q| apply_pipeline(&q, gates)),
            CompiledPipeline::Netlist(stages) => {
                stages.iter().fold(input.clone(), |wave, n| simulate_netlist(n, &wave))
            }
        }
    }

    pub fn stage_count(&self) -> usize {
        match self {
            CompiledPipeline::Ideal(gates) => gates.len(),
            CompiledPipeline::Netlist(stages) => stages.len(),
        }
    }
}

fn gate_netlist(g: GateOp, design: &DividerDesign) -> Netlist {
    match g {
        GateOp::Hadamard => build_hadamard_netlist(design),
        GateOp::PauliX => build_x_netlist(),
        GateOp::RPhi(phi) => build_rphi_netlist(phi, design),
    }
}

/// Lower `p` onto `backend`. With a nonzero tolerance, stage `i` of the
/// netlist backend is perturbed with seed `seed + i`.
pub fn compile(p: &Program, backend: Backend, options: &NetlistOptions) -> Result<CompiledPipeline, NetlistError> {
    match backend {
        Backend::Ideal => Ok(CompiledPipeline::Ideal(p.gates.clone())),
        Backend::Netlist => p
            .gates
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let nominal = gate_netlist(g, &options.design);
                perturb_resistors(&nominal, options.resistor_tol_pct, options.seed.wrapping_add(i as u64))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CompiledPipeline::Netlist),
    }
}
