//! Gate-level circuit representation: wires, FA/HA/NOT/CONST gates, bit-exact
//! evaluation, cost reporting and fragment composition.
//!
//! Wires are dense indices. Wires `0..p` are the primary inputs; every gate
//! output allocates the next free wire, so the gate list is topologically
//! ordered by construction. Signal inversions live on [`Signal`] flags rather
//! than explicit inverter gates: complementation is free relabeling in this
//! design style, and an exporter materializes real inverters only when a
//! target format needs them (see [`CostReport::not_count`]).

use serde::{Deserialize, Serialize};

use crate::modmath::{D1Value, Modulus};
use crate::{Error, Result};

pub type WireId = usize;

/// A reference to a wire, with an optional logical inversion and the residue
/// weight class `k` (meaning weight `|2^k|` under the context modulus).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signal {
    pub wire: WireId,
    #[serde(rename = "inv")]
    pub inverted: bool,
    pub class: u32,
}

impl Signal {
    pub fn new(wire: WireId, class: u32) -> Self {
        Signal { wire, inverted: false, class }
    }

    /// The same wire read through an inversion.
    pub fn invert(self) -> Self {
        Signal { inverted: !self.inverted, ..self }
    }

    /// The same wire relabeled with a different weight class.
    pub fn with_class(self, class: u32) -> Self {
        Signal { class, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Fa,
    Ha,
    Not,
    Const0,
    Const1,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Fa => 3,
            GateKind::Ha => 2,
            GateKind::Not => 1,
            GateKind::Const0 | GateKind::Const1 => 0,
        }
    }

    fn has_carry(&self) -> bool {
        matches!(self, GateKind::Fa | GateKind::Ha)
    }
}

/// One gate: FA (sum = parity, carry = majority), HA (sum = xor,
/// carry = and), NOT, or a constant driver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    #[serde(rename = "in")]
    pub inputs: Vec<Signal>,
    pub sum: WireId,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub carry: Option<WireId>,
}

/// A typed output of a netlist.
///
/// `Plain` carries a list of weighted signals plus a constant correction a
/// downstream consumer still owes; complete generators fold all corrections
/// into gates and emit `correction = 0`. `D1` carries the zero flag wire and
/// the n magnitude wires of a diminished-1 result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OutputPort {
    Plain {
        modulus: Modulus,
        signals: Vec<Signal>,
        correction: u64,
    },
    D1 {
        modulus: Modulus,
        xz: Signal,
        magnitude: Vec<Signal>,
    },
}

impl OutputPort {
    pub fn modulus(&self) -> Modulus {
        match self {
            OutputPort::Plain { modulus, .. } | OutputPort::D1 { modulus, .. } => *modulus,
        }
    }

    fn signals(&self) -> Vec<Signal> {
        match self {
            OutputPort::Plain { signals, .. } => signals.clone(),
            OutputPort::D1 { xz, magnitude, .. } => {
                let mut v = vec![*xz];
                v.extend_from_slice(magnitude);
                v
            }
        }
    }
}

/// The evaluated value of one output port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PortValue {
    Plain {
        bits: Vec<bool>,
        /// `sum of 2^class` over the set bits, before any correction.
        weighted_sum: u64,
        /// `|weighted_sum + correction|` under the port modulus.
        residue: u64,
    },
    D1 {
        value: D1Value,
        /// `(1 - zero) + magnitude`, the decoded residue.
        decoded: u64,
    },
}

/// Gate counts and logic depth of a netlist. FA and HA count one level each,
/// inverters count zero. `not_count` is the number of distinct wires read
/// through an inversion flag plus any explicit NOT gates, i.e. the inverters
/// an exporter materializes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub fa_count: usize,
    pub ha_count: usize,
    pub not_count: usize,
    pub depth: usize,
}

/// An immutable, topologically ordered gate-level circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Netlist {
    name: String,
    family: Option<String>,
    p: usize,
    n: u32,
    modulus: Modulus,
    input_classes: Vec<u32>,
    gates: Vec<Gate>,
    outputs: Vec<OutputPort>,
    wire_count: usize,
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The generator family slug, when the netlist came from a builder.
    pub fn family(&self) -> Option<&str> {
        self.family.as_deref()
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    /// The correction still owed by this artifact, summed over output ports
    /// (zero for complete generators, the pending ledger for fragments).
    pub fn pending_correction(&self) -> u64 {
        self.outputs
            .iter()
            .map(|o| match o {
                OutputPort::Plain { correction, .. } => *correction,
                OutputPort::D1 { .. } => 0,
            })
            .sum()
    }

    pub fn input_width(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Weight classes the composition machinery expects on each open input.
    pub fn input_classes(&self) -> &[u32] {
        &self.input_classes
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[OutputPort] {
        &self.outputs
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    /// Reassembles a netlist from serialized parts, revalidating everything.
    pub fn from_parts(
        name: String,
        family: Option<String>,
        p: usize,
        modulus: Modulus,
        input_classes: Vec<u32>,
        gates: Vec<Gate>,
        outputs: Vec<OutputPort>,
    ) -> Result<Netlist> {
        let wire_count = p + gates
            .iter()
            .map(|g| 1 + g.carry.is_some() as usize)
            .sum::<usize>();
        let nl = Netlist {
            name,
            family,
            p,
            n: modulus.n(),
            modulus,
            input_classes,
            gates,
            outputs,
            wire_count,
        };
        nl.validate()?;
        Ok(nl)
    }

    /// Checks the structural invariants: arities, topological order, and
    /// output wires driven by an existing input, gate or constant.
    pub fn validate(&self) -> Result<()> {
        if self.input_classes.len() != self.p {
            return Err(Error::InvalidNetlist(format!(
                "{} input classes declared for {} inputs",
                self.input_classes.len(),
                self.p
            )));
        }
        let mut next_wire = self.p;
        for (i, gate) in self.gates.iter().enumerate() {
            if gate.inputs.len() != gate.kind.arity() {
                return Err(Error::InvalidNetlist(format!(
                    "gate {i} ({:?}) has {} inputs",
                    gate.kind,
                    gate.inputs.len()
                )));
            }
            for s in &gate.inputs {
                if s.wire >= next_wire {
                    return Err(Error::InvalidNetlist(format!(
                        "gate {i} reads wire {} before it is driven",
                        s.wire
                    )));
                }
            }
            if gate.sum != next_wire {
                return Err(Error::InvalidNetlist(format!(
                    "gate {i} drives wire {} out of order (expected {next_wire})",
                    gate.sum
                )));
            }
            next_wire += 1;
            match (gate.kind.has_carry(), gate.carry) {
                (true, Some(c)) => {
                    if c != next_wire {
                        return Err(Error::InvalidNetlist(format!(
                            "gate {i} carry wire {c} out of order (expected {next_wire})"
                        )));
                    }
                    next_wire += 1;
                }
                (true, None) => {
                    return Err(Error::InvalidNetlist(format!("gate {i} is missing a carry wire")))
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidNetlist(format!(
                        "gate {i} ({:?}) cannot drive a carry",
                        gate.kind
                    )))
                }
                (false, None) => {}
            }
        }
        if next_wire != self.wire_count {
            return Err(Error::InvalidNetlist(format!(
                "wire count {} does not match {} driven wires",
                self.wire_count, next_wire
            )));
        }
        for port in &self.outputs {
            for s in port.signals() {
                if s.wire >= self.wire_count {
                    return Err(Error::InvalidNetlist(format!(
                        "output reads undriven wire {}",
                        s.wire
                    )));
                }
                if s.class > 63 {
                    return Err(Error::InvalidNetlist(format!(
                        "output weight class {} exceeds the evaluable range",
                        s.class
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates the netlist on `p` input bits with one forward pass.
    pub fn evaluate(&self, inputs: &[bool]) -> Result<Vec<PortValue>> {
        let mut sim = Simulator::new(self);
        sim.run(inputs)?;
        Ok(sim.port_values())
    }

    /// Evaluates on an integer input (bit `i` of `x` drives input `i`).
    pub fn evaluate_value(&self, x: u128) -> Result<Vec<PortValue>> {
        let bits: Vec<bool> = (0..self.p).map(|i| (x >> i) & 1 == 1).collect();
        self.evaluate(&bits)
    }

    /// Exact gate counts and the longest input-to-output path.
    pub fn cost(&self) -> CostReport {
        let mut report = CostReport::default();
        let mut depth = vec![0usize; self.wire_count];
        let mut inverted_wires = std::collections::BTreeSet::new();
        for gate in &self.gates {
            let level = match gate.kind {
                GateKind::Fa => {
                    report.fa_count += 1;
                    1
                }
                GateKind::Ha => {
                    report.ha_count += 1;
                    1
                }
                GateKind::Not => {
                    report.not_count += 1;
                    0
                }
                GateKind::Const0 | GateKind::Const1 => 0,
            };
            let mut in_depth = 0;
            for s in &gate.inputs {
                if s.inverted {
                    inverted_wires.insert(s.wire);
                }
                in_depth = in_depth.max(depth[s.wire]);
            }
            depth[gate.sum] = in_depth + level;
            if let Some(c) = gate.carry {
                depth[c] = in_depth + level;
            }
        }
        for port in &self.outputs {
            for s in port.signals() {
                if s.inverted {
                    inverted_wires.insert(s.wire);
                }
                report.depth = report.depth.max(depth[s.wire]);
            }
        }
        report.not_count += inverted_wires.len();
        report
    }
}

/// A single-netlist simulator with a reusable wire buffer, for sweeps that
/// evaluate millions of input vectors.
pub struct Simulator<'a> {
    nl: &'a Netlist,
    wires: Vec<bool>,
}

impl<'a> Simulator<'a> {
    pub fn new(nl: &'a Netlist) -> Self {
        Simulator { nl, wires: vec![false; nl.wire_count] }
    }

    fn read(&self, s: &Signal) -> bool {
        self.wires[s.wire] ^ s.inverted
    }

    /// One forward pass in topological order.
    pub fn run(&mut self, inputs: &[bool]) -> Result<()> {
        if inputs.len() != self.nl.p {
            return Err(Error::WidthMismatch { expected: self.nl.p, got: inputs.len() });
        }
        self.wires[..self.nl.p].copy_from_slice(inputs);
        for gate in &self.nl.gates {
            match gate.kind {
                GateKind::Fa => {
                    let a = self.read(&gate.inputs[0]);
                    let b = self.read(&gate.inputs[1]);
                    let c = self.read(&gate.inputs[2]);
                    self.wires[gate.sum] = a ^ b ^ c;
                    self.wires[gate.carry.unwrap()] = (a & b) | (a & c) | (b & c);
                }
                GateKind::Ha => {
                    let a = self.read(&gate.inputs[0]);
                    let b = self.read(&gate.inputs[1]);
                    self.wires[gate.sum] = a ^ b;
                    self.wires[gate.carry.unwrap()] = a & b;
                }
                GateKind::Not => {
                    self.wires[gate.sum] = !self.read(&gate.inputs[0]);
                }
                GateKind::Const0 => self.wires[gate.sum] = false,
                GateKind::Const1 => self.wires[gate.sum] = true,
            }
        }
        Ok(())
    }

    pub fn run_value(&mut self, x: u128) -> Result<()> {
        let bits: Vec<bool> = (0..self.nl.p).map(|i| (x >> i) & 1 == 1).collect();
        self.run(&bits)
    }

    /// Values of all output ports after [`run`](Self::run).
    pub fn port_values(&self) -> Vec<PortValue> {
        self.nl
            .outputs
            .iter()
            .map(|port| match port {
                OutputPort::Plain { modulus, signals, correction } => {
                    let bits: Vec<bool> = signals.iter().map(|s| self.read(s)).collect();
                    let weighted_sum: u64 = signals
                        .iter()
                        .zip(&bits)
                        .filter(|(_, &b)| b)
                        .map(|(s, _)| 1u64 << s.class)
                        .sum();
                    let residue = (weighted_sum + correction) % modulus.value();
                    PortValue::Plain { bits, weighted_sum, residue }
                }
                OutputPort::D1 { xz, magnitude, .. } => {
                    let zero = self.read(xz);
                    let mag: u64 = magnitude
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| self.read(s))
                        .map(|(i, _)| 1u64 << i)
                        .sum();
                    let value = D1Value { zero, magnitude: mag };
                    let decoded = (1 - zero as u64) + mag;
                    PortValue::D1 { value, decoded }
                }
            })
            .collect()
    }
}

/// Incrementally builds a [`Netlist`]. Wires `0..p` are the primary inputs;
/// gate outputs take the next free wires, so the emitted order is already
/// topological.
pub struct NetlistBuilder {
    name: String,
    p: usize,
    n: u32,
    modulus: Modulus,
    input_classes: Vec<u32>,
    gates: Vec<Gate>,
    next_wire: usize,
    const0: Option<Signal>,
    const1: Option<Signal>,
}

impl NetlistBuilder {
    /// A builder with `p` inputs whose weight classes default to `i mod width`
    /// (the pool class each raw input bit lands in).
    pub fn new(name: impl Into<String>, modulus: Modulus, p: usize) -> Self {
        let width = modulus.width();
        let input_classes = (0..p).map(|i| (i as u32) % width).collect();
        NetlistBuilder {
            name: name.into(),
            p,
            n: modulus.n(),
            modulus,
            input_classes,
            gates: Vec::new(),
            next_wire: p,
            const0: None,
            const1: None,
        }
    }

    /// Overrides the declared input weight classes (fragments meant for
    /// composition declare the positional classes they expect to be fed).
    pub fn set_input_classes(&mut self, classes: Vec<u32>) {
        assert_eq!(classes.len(), self.p);
        self.input_classes = classes;
    }

    pub fn input(&self, i: usize) -> Signal {
        assert!(i < self.p, "input {i} out of range");
        Signal::new(i, self.input_classes[i])
    }

    fn alloc(&mut self) -> WireId {
        let w = self.next_wire;
        self.next_wire += 1;
        w
    }

    /// Full adder over three signals; the sum keeps `class`, the carry gets
    /// `class + 1` (callers wrap and possibly invert it at the period edge).
    pub fn fa(&mut self, a: Signal, b: Signal, c: Signal, class: u32) -> (Signal, Signal) {
        let sum = self.alloc();
        let carry = self.alloc();
        self.gates.push(Gate { kind: GateKind::Fa, inputs: vec![a, b, c], sum, carry: Some(carry) });
        (Signal::new(sum, class), Signal::new(carry, class + 1))
    }

    /// Half adder over two signals.
    pub fn ha(&mut self, a: Signal, b: Signal, class: u32) -> (Signal, Signal) {
        let sum = self.alloc();
        let carry = self.alloc();
        self.gates.push(Gate { kind: GateKind::Ha, inputs: vec![a, b], sum, carry: Some(carry) });
        (Signal::new(sum, class), Signal::new(carry, class + 1))
    }

    /// Explicit inverter gate. Most inversions should use [`Signal::invert`];
    /// this exists for netlists that must carry materialized inverters.
    pub fn not(&mut self, a: Signal, class: u32) -> Signal {
        let sum = self.alloc();
        self.gates.push(Gate { kind: GateKind::Not, inputs: vec![a], sum, carry: None });
        Signal::new(sum, class)
    }

    /// Constant 0 signal (one shared CONST0 gate per netlist).
    pub fn const0(&mut self, class: u32) -> Signal {
        if let Some(s) = self.const0 {
            return s.with_class(class);
        }
        let sum = self.alloc();
        self.gates.push(Gate { kind: GateKind::Const0, inputs: vec![], sum, carry: None });
        let s = Signal::new(sum, class);
        self.const0 = Some(s);
        s
    }

    /// Constant 1 signal (one shared CONST1 gate per netlist).
    pub fn const1(&mut self, class: u32) -> Signal {
        if let Some(s) = self.const1 {
            return s.with_class(class);
        }
        let sum = self.alloc();
        self.gates.push(Gate { kind: GateKind::Const1, inputs: vec![], sum, carry: None });
        let s = Signal::new(sum, class);
        self.const1 = Some(s);
        s
    }

    /// A constant bit as a signal.
    pub fn const_bit(&mut self, bit: bool, class: u32) -> Signal {
        if bit {
            self.const1(class)
        } else {
            self.const0(class)
        }
    }

    /// `a AND b` realized as the carry of a half adder (the sum dangles).
    pub fn and2(&mut self, a: Signal, b: Signal) -> Signal {
        let (_, carry) = self.ha(a, b, 0);
        carry.with_class(0)
    }

    pub fn finish(self, outputs: Vec<OutputPort>) -> Result<Netlist> {
        let nl = Netlist {
            name: self.name,
            family: None,
            p: self.p,
            n: self.n,
            modulus: self.modulus,
            input_classes: self.input_classes,
            gates: self.gates,
            outputs,
            wire_count: self.next_wire,
        };
        nl.validate()?;
        Ok(nl)
    }
}

/// Connects every open input of `back` to an output signal of `front`,
/// producing a single acyclic netlist with additive gate counts.
///
/// `wiring[i]` is the front signal that drives back input `i`; its weight
/// class must equal the class `back` declares for that input. Every wiring
/// signal must be exposed by one of `front`'s output ports.
pub fn compose(front: &Netlist, back: &Netlist, wiring: &[Signal]) -> Result<Netlist> {
    if wiring.len() < back.p {
        return Err(Error::DanglingInput { index: wiring.len() });
    }
    if wiring.len() > back.p {
        return Err(Error::InvalidNetlist(format!(
            "wiring maps {} signals onto {} open inputs",
            wiring.len(),
            back.p
        )));
    }
    let exposed: Vec<Signal> = front.outputs.iter().flat_map(|p| p.signals()).collect();
    for (i, s) in wiring.iter().enumerate() {
        if s.class != back.input_classes[i] {
            return Err(Error::ClassMismatch {
                index: i,
                expected: back.input_classes[i],
                got: s.class,
            });
        }
        if !exposed.iter().any(|e| e.wire == s.wire) {
            return Err(Error::InvalidNetlist(format!(
                "wiring signal for input {i} (wire {}) is not a front output",
                s.wire
            )));
        }
    }

    let offset = front.wire_count;
    let map_signal = |s: &Signal| -> Signal {
        if s.wire < back.p {
            let mapped = wiring[s.wire];
            Signal {
                wire: mapped.wire,
                inverted: mapped.inverted ^ s.inverted,
                class: s.class,
            }
        } else {
            Signal { wire: s.wire - back.p + offset, ..*s }
        }
    };
    let map_wire = |w: WireId| w - back.p + offset;

    let mut gates = front.gates.clone();
    for gate in &back.gates {
        gates.push(Gate {
            kind: gate.kind,
            inputs: gate.inputs.iter().map(map_signal).collect(),
            sum: map_wire(gate.sum),
            carry: gate.carry.map(map_wire),
        });
    }
    let outputs = back
        .outputs
        .iter()
        .map(|port| match port {
            OutputPort::Plain { modulus, signals, correction } => OutputPort::Plain {
                modulus: *modulus,
                signals: signals.iter().map(map_signal).collect(),
                correction: *correction,
            },
            OutputPort::D1 { modulus, xz, magnitude } => OutputPort::D1 {
                modulus: *modulus,
                xz: map_signal(xz),
                magnitude: magnitude.iter().map(map_signal).collect(),
            },
        })
        .collect();

    let nl = Netlist {
        name: back.name.clone(),
        family: back.family.clone(),
        p: front.p,
        n: back.n,
        modulus: back.modulus,
        input_classes: front.input_classes.clone(),
        gates,
        outputs,
        wire_count: offset + (back.wire_count - back.p),
    };
    nl.validate()?;
    Ok(nl)
}

/// A pass-through netlist exposing its `p` inputs as one plain output port
/// with the given classes. Useful as an identity `front` for composition.
pub fn identity_netlist(modulus: Modulus, classes: &[u32]) -> Result<Netlist> {
    let mut b = NetlistBuilder::new("identity", modulus, classes.len());
    b.set_input_classes(classes.to_vec());
    let signals: Vec<Signal> = (0..classes.len()).map(|i| b.input(i)).collect();
    b.finish(vec![OutputPort::Plain { modulus, signals, correction: 0 }])
}
