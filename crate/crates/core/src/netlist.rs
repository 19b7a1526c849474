//! Ideal analog block netlists for the three gates.
//!
//! A [`Netlist`] is a DAG of linear blocks (adders, subtractors, resistive
//! dividers, inverters and plain wires) from the four input channels to the
//! four output channels. Op-amps are ideal: followers and summers have exact
//! gains and dividers are unloaded, so a divider contributes `r2 / (r1 + r2)`.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::signal::exact_cos_sin;
use crate::state::{ChannelQuad, ChannelQuadWave};

/// Series resistor of the stock 1/√2 divider (Ω).
pub const STOCK_R1: f64 = 10e3;
/// Shunt resistor of the stock 1/√2 divider (Ω), four significant digits.
pub const STOCK_R2: f64 = 24.14e3;
/// Significant digits used when rounding stock shunts.
pub const STOCK_DIGITS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistError {
    #[error("resistance must be positive and finite, got {0} ohm")]
    NonPositiveResistance(f64),
    #[error("divider target {0} is outside (0, 1)")]
    TargetOutOfRange(f64),
    #[error("significant digits must be at least 1")]
    InvalidDigits,
    #[error("resistor tolerance must lie in [0, 100) percent, got {0}")]
    InvalidTolerance(f64),
    #[error("net {0} is driven more than once")]
    MultiplyDriven(NetId),
    #[error("net {0} is read but never driven")]
    Undriven(NetId),
    #[error("netlist wiring contains a cycle")]
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetId(pub usize);

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockKind {
    Adder {
        a: NetId,
        b: NetId,
    },
    /// Computes `a − b`.
    Subtractor {
        a: NetId,
        b: NetId,
    },
    Divider {
        r1: f64,
        r2: f64,
        input: NetId,
    },
    Inverter {
        input: NetId,
    },
    Wire {
        input: NetId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogBlock {
    pub kind: BlockKind,
    pub output: NetId,
}

impl AnalogBlock {
    pub fn new(kind: BlockKind, output: NetId) -> Self {
        Self { kind, output }
    }

    pub fn inputs(&self) -> Vec<NetId> {
        match self.kind {
            BlockKind::Adder { a, b } | BlockKind::Subtractor { a, b } => vec![a, b],
            BlockKind::Divider { input, .. } | BlockKind::Inverter { input } | BlockKind::Wire { input } => {
                vec![input]
            }
        }
    }

    /// Anything but a wire.
    pub fn is_arithmetic(&self) -> bool {
        !matches!(self.kind, BlockKind::Wire { .. })
    }

    fn eval(&self, nets: &[f64]) -> f64 {
        match self.kind {
            BlockKind::Adder { a, b } => nets[a.0] + nets[b.0],
            BlockKind::Subtractor { a, b } => nets[a.0] - nets[b.0],
            BlockKind::Divider { r1, r2, input } => nets[input.0] * divider_gain(r1, r2),
            BlockKind::Inverter { input } => -nets[input.0],
            BlockKind::Wire { input } => nets[input.0],
        }
    }
}

impl fmt::Display for AnalogBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BlockKind::Adder { a, b } => write!(f, "{} = add({a}, {b})", self.output),
            BlockKind::Subtractor { a, b } => write!(f, "{} = sub({a}, {b})", self.output),
            BlockKind::Divider { r1, r2, input } => {
                write!(f, "{} = div({input}; r1={r1}, r2={r2})", self.output)
            }
            BlockKind::Inverter { input } => write!(f, "{} = inv({input})", self.output),
            BlockKind::Wire { input } => write!(f, "{} = wire({input})", self.output),
        }
    }
}

fn divider_gain(r1: f64, r2: f64) -> f64 {
    r2 / (r1 + r2)
}

fn check_resistance(r: f64) -> Result<(), NetlistError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(NetlistError::NonPositiveResistance(r))
    }
}

/// Gain `r2 / (r1 + r2)` of an unloaded resistive divider.
pub fn divider_ratio(r1: f64, r2: f64) -> Result<f64, NetlistError> {
    check_resistance(r1)?;
    check_resistance(r2)?;
    Ok(divider_gain(r1, r2))
}

/// Shunt resistor giving gain `target` with series resistor `r1`.
pub fn design_divider(target: f64, r1: f64) -> Result<f64, NetlistError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(NetlistError::TargetOutOfRange(target));
    }
    check_resistance(r1)?;
    Ok(r1 * target / (1.0 - target))
}

/// Round `x` to `digits` significant digits.
fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let exponent = x.abs().log10().floor() as i32 - digits as i32 + 1;
    let scale = 10f64.powi(exponent.abs());
    if exponent >= 0 {
        (x / scale).round() * scale
    } else {
        (x * scale).round() / scale
    }
}

/// How the builders size their dividers.
///
/// The series resistor is fixed; the shunt resistor is designed for the
/// target gain and optionally rounded to a number of significant digits, as
/// a part list would quote it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DividerDesign {
    r1: f64,
    significant_digits: Option<u32>,
}

impl DividerDesign {
    pub fn exact(r1: f64) -> Result<Self, NetlistError> {
        check_resistance(r1)?;
        Ok(Self {
            r1,
            significant_digits: None,
        })
    }

    pub fn rounded(r1: f64, digits: u32) -> Result<Self, NetlistError> {
        check_resistance(r1)?;
        if digits == 0 {
            return Err(NetlistError::InvalidDigits);
        }
        Ok(Self {
            r1,
            significant_digits: Some(digits),
        })
    }

    /// 10 kΩ series resistors with shunts quoted to four digits (24.14 kΩ
    /// for the 1/√2 gain).
    pub fn stock() -> Self {
        Self {
            r1: STOCK_R1,
            significant_digits: Some(STOCK_DIGITS),
        }
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn significant_digits(&self) -> Option<u32> {
        self.significant_digits
    }

    /// `(r1, r2)` for a divider of gain `target`.
    pub fn resistors(&self, target: f64) -> Result<(f64, f64), NetlistError> {
        let r2 = design_divider(target, self.r1)?;
        let r2 = match self.significant_digits {
            Some(d) => round_significant(r2, d),
            None => r2,
        };
        check_resistance(r2)?;
        Ok((self.r1, r2))
    }
}

/// Validated block DAG with four input and four output nets.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    inputs: [NetId; 4],
    outputs: [NetId; 4],
    blocks: Vec<AnalogBlock>,
    order: Vec<usize>,
    net_count: usize,
}

impl Netlist {
    /// Validate wiring: resistors positive, each net driven exactly once,
    /// every read net driven, no cycles.
    pub fn new(inputs: [NetId; 4], outputs: [NetId; 4], blocks: Vec<AnalogBlock>) -> Result<Self, NetlistError> {
        for block in &blocks {
            if let BlockKind::Divider { r1, r2, .. } = block.kind {
                check_resistance(r1)?;
                check_resistance(r2)?;
            }
        }

        // None marks a primary input, Some(i) block i
        let mut driver: HashMap<NetId, Option<usize>> = HashMap::new();
        for &net in &inputs {
            if driver.insert(net, None).is_some() {
                return Err(NetlistError::MultiplyDriven(net));
            }
        }
        for (i, block) in blocks.iter().enumerate() {
            if driver.insert(block.output, Some(i)).is_some() {
                return Err(NetlistError::MultiplyDriven(block.output));
            }
        }
        for net in blocks.iter().flat_map(|b| b.inputs()).chain(outputs) {
            if !driver.contains_key(&net) {
                return Err(NetlistError::Undriven(net));
            }
        }

        // Kahn's algorithm over block-to-block dependencies
        let mut pending = vec![0usize; blocks.len()];
        let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
        for (i, block) in blocks.iter().enumerate() {
            for net in block.inputs() {
                if let Some(Some(src)) = driver.get(&net) {
                    pending[i] += 1;
                    dependents[*src].push(i);
                }
            }
        }
        let mut ready: Vec<usize> = (0..blocks.len()).filter(|&i| pending[i] == 0).rev().collect();
        let mut order = Vec::with_capacity(blocks.len());
        while let Some(i) = ready.pop() {
            order.push(i);
            for &d in dependents[i].iter().rev() {
                pending[d] -= 1;
                if pending[d] == 0 {
                    ready.push(d);
                }
            }
        }
        if order.len() != blocks.len() {
            return Err(NetlistError::Cycle);
        }

        let net_count = driver.keys().map(|n| n.0 + 1).max().unwrap_or(0);
        Ok(Self {
            inputs,
            outputs,
            blocks,
            order,
            net_count,
        })
    }

    /// Four plain wires.
    pub fn identity() -> Self {
        let mut b = NetlistBuilder::new();
        let [a, c, d, e] = b.inputs();
        let outs = [b.wire(a), b.wire(c), b.wire(d), b.wire(e)];
        b.finish(outs)
    }

    pub fn inputs(&self) -> [NetId; 4] {
        self.inputs
    }

    pub fn outputs(&self) -> [NetId; 4] {
        self.outputs
    }

    pub fn blocks(&self) -> &[AnalogBlock] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn arithmetic_block_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_arithmetic()).count()
    }

    pub fn count_where(&self, pred: impl Fn(&BlockKind) -> bool) -> usize {
        self.blocks.iter().filter(|b| pred(&b.kind)).count()
    }

    /// Evaluate the four outputs for one input sample.
    pub fn eval(&self, q: &ChannelQuad) -> ChannelQuad {
        let mut nets = vec![0.0; self.net_count];
        for (net, v) in self.inputs.iter().zip(q.to_array()) {
            nets[net.0] = v;
        }
        for &i in &self.order {
            let block = &self.blocks[i];
            nets[block.output.0] = block.eval(&nets);
        }
        ChannelQuad::from_array(self.outputs.map(|n| nets[n.0]))
    }

    fn map_dividers(&self, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut out = self.clone();
        for block in &mut out.blocks {
            if let BlockKind::Divider { r1, r2, .. } = &mut block.kind {
                (*r1, *r2) = f(*r1, *r2);
            }
        }
        out
    }
}

impl fmt::Display for Netlist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["c0_re", "c0_im", "c1_re", "c1_im"];
        for (name, net) in names.iter().zip(self.inputs) {
            writeln!(f, "in  {name} -> {net}")?;
        }
        for &i in &self.order {
            writeln!(f, "    {}", self.blocks[i])?;
        }
        for (name, net) in names.iter().zip(self.outputs) {
            writeln!(f, "out {name} <- {net}")?;
        }
        Ok(())
    }
}

/// Incremental netlist construction with fresh nets per block.
///
/// Inputs occupy nets 0..4.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    blocks: Vec<AnalogBlock>,
    next: usize,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self {
            blocks: Vec::new(),
            next: 4,
        }
    }

    pub fn inputs(&self) -> [NetId; 4] {
        [NetId(0), NetId(1), NetId(2), NetId(3)]
    }

    pub fn add(&mut self, kind: BlockKind) -> NetId {
        let out = NetId(self.next);
        self.next += 1;
        self.blocks.push(AnalogBlock::new(kind, out));
        out
    }

    pub fn adder(&mut self, a: NetId, b: NetId) -> NetId {
        self.add(BlockKind::Adder { a, b })
    }

    pub fn subtractor(&mut self, a: NetId, b: NetId) -> NetId {
        self.add(BlockKind::Subtractor { a, b })
    }

    pub fn divider(&mut self, r1: f64, r2: f64, input: NetId) -> NetId {
        self.add(BlockKind::Divider { r1, r2, input })
    }

    pub fn inverter(&mut self, input: NetId) -> NetId {
        self.add(BlockKind::Inverter { input })
    }

    pub fn wire(&mut self, input: NetId) -> NetId {
        self.add(BlockKind::Wire { input })
    }

    /// Multiply by a signed coefficient; `None` when the coefficient is zero
    /// and the branch can be dropped.
    fn scale(&mut self, design: &DividerDesign, k: f64, input: NetId) -> Option<NetId> {
        let magnitude = k.abs();
        if magnitude == 0.0 {
            return None;
        }
        let scaled = if magnitude == 1.0 {
            input
        } else {
            let (r1, r2) = design
                .resistors(magnitude)
                .expect("coefficient magnitude lies in (0, 1)");
            self.divider(r1, r2, input)
        };
        Some(if k < 0.0 { self.inverter(scaled) } else { scaled })
    }

    pub fn finish(self, outputs: [NetId; 4]) -> Netlist {
        let inputs = self.inputs();
        Netlist::new(inputs, outputs, self.blocks).expect("builder only produces valid wiring")
    }
}

/// Hadamard: two adders and two subtractors, then four 1/√2 dividers.
pub fn build_hadamard_netlist(design: &DividerDesign) -> Netlist {
    let (r1, r2) = design.resistors(FRAC_1_SQRT_2).expect("1/sqrt(2) lies in (0, 1)");
    let mut b = NetlistBuilder::new();
    let [c0_re, c0_im, c1_re, c1_im] = b.inputs();
    let sum_re = b.adder(c0_re, c1_re);
    let sum_im = b.adder(c0_im, c1_im);
    let diff_re = b.subtractor(c0_re, c1_re);
    let diff_im = b.subtractor(c0_im, c1_im);
    let outs = [
        b.divider(r1, r2, sum_re),
        b.divider(r1, r2, sum_im),
        b.divider(r1, r2, diff_re),
        b.divider(r1, r2, diff_im),
    ];
    b.finish(outs)
}

/// Pauli-X: the |0⟩ and |1⟩ channel pairs cross over.
pub fn build_x_netlist() -> Netlist {
    let mut b = NetlistBuilder::new();
    let [c0_re, c0_im, c1_re, c1_im] = b.inputs();
    let outs = [b.wire(c1_re), b.wire(c1_im), b.wire(c0_re), b.wire(c0_im)];
    b.finish(outs)
}

/// Conditional phase shift: dividers for `cos φ` and `sin φ` on the |1⟩
/// pair, then a subtractor (real part) and an adder (imaginary part).
///
/// Negative coefficients get an inverter after the divider, unit
/// coefficients skip the divider and zero coefficients drop the branch.
pub fn build_rphi_netlist(phi_gate: f64, design: &DividerDesign) -> Netlist {
    let (cos_phi, sin_phi) = exact_cos_sin(phi_gate);
    let mut b = NetlistBuilder::new();
    let [c0_re, c0_im, c1_re, c1_im] = b.inputs();

    let re_cos = b.scale(design, cos_phi, c1_re);
    let im_sin = b.scale(design, sin_phi, c1_im);
    let im_cos = b.scale(design, cos_phi, c1_im);
    let re_sin = b.scale(design, sin_phi, c1_re);

    // cos φ·re − sin φ·im
    let out_re = match (re_cos, im_sin) {
        (Some(x), Some(y)) => b.subtractor(x, y),
        (Some(x), None) => b.wire(x),
        (None, Some(y)) => b.inverter(y),
        (None, None) => unreachable!("cos and sin cannot both vanish"),
    };
    // cos φ·im + sin φ·re
    let out_im = match (im_cos, re_sin) {
        (Some(x), Some(y)) => b.adder(x, y),
        (Some(x), None) => b.wire(x),
        (None, Some(y)) => b.wire(y),
        (None, None) => unreachable!("cos and sin cannot both vanish"),
    };
    let outs = [b.wire(c0_re), b.wire(c0_im), out_re, out_im];
    b.finish(outs)
}

/// Evaluate `n` at every sample of `input`; the grid is preserved.
pub fn simulate_netlist(n: &Netlist, input: &ChannelQuadWave) -> ChannelQuadWave {
    input.map(|q| n.eval(&q))
}

/// Scale every resistor by an independent uniform factor in
/// `[1 − tol/100, 1 + tol/100]`, drawn deterministically from `seed`.
pub fn perturb_resistors(n: &Netlist, tol_pct: f64, seed: u64) -> Result<Netlist, NetlistError> {
    if !(tol_pct.is_finite() && (0.0..100.0).contains(&tol_pct)) {
        return Err(NetlistError::InvalidTolerance(tol_pct));
    }
    if tol_pct == 0.0 {
        return Ok(n.clone());
    }
    let spread = tol_pct / 100.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // draw the unit deviate first so one seed gives proportional shifts
    // across tolerances
    let mut factor = move || 1.0 + spread * rng.random_range(-1.0..=1.0);
    Ok(n.map_dividers(|r1, r2| (r1 * factor(), r2 * factor())))
}
