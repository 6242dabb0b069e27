//! Netlist serializers: a JSON form that round-trips exactly, and a flat
//! structural HDL text that instantiates FA/HA/INV primitives.

use serde::{Deserialize, Serialize};

use crate::modmath::Modulus;
use crate::netlist::{Gate, GateKind, Netlist, OutputPort, Signal, WireId};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct JsonMeta {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    family: Option<String>,
    p: usize,
    n: u32,
    /// Correction the artifact still owes (zero for complete generators).
    cor: u64,
    modulus: Modulus,
    input_classes: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct JsonGate {
    id: WireId,
    kind: GateKind,
    #[serde(rename = "in")]
    inputs: Vec<Signal>,
    out: Vec<WireId>,
}

#[derive(Serialize, Deserialize)]
struct JsonNetlist {
    meta: JsonMeta,
    inputs: Vec<WireId>,
    gates: Vec<JsonGate>,
    outputs: Vec<OutputPort>,
}

/// Serializes a netlist as JSON. The output is a pure function of the
/// netlist, so identical builds yield byte-identical text.
pub fn export_json(nl: &Netlist) -> String {
    let doc = JsonNetlist {
        meta: JsonMeta {
            name: nl.name().to_string(),
            family: nl.family().map(str::to_string),
            p: nl.input_width(),
            n: nl.n(),
            cor: nl.pending_correction(),
            modulus: nl.modulus(),
            input_classes: nl.input_classes().to_vec(),
        },
        inputs: (0..nl.input_width()).collect(),
        gates: nl
            .gates()
            .iter()
            .map(|g| JsonGate {
                id: g.sum,
                kind: g.kind,
                inputs: g.inputs.clone(),
                out: match g.carry {
                    Some(c) => vec![g.sum, c],
                    None => vec![g.sum],
                },
            })
            .collect(),
        outputs: nl.outputs().to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("netlists serialize infallibly");
    text.push('\n');
    text
}

/// Rebuilds a netlist from its JSON form, revalidating every invariant.
pub fn import_json(text: &str) -> Result<Netlist> {
    let doc: JsonNetlist =
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    let gates: Vec<Gate> = doc
        .gates
        .into_iter()
        .map(|g| Gate {
            kind: g.kind,
            inputs: g.inputs,
            sum: g.out.first().copied().unwrap_or(g.id),
            carry: g.out.get(1).copied(),
        })
        .collect();
    Netlist::from_parts(
        doc.meta.name,
        doc.meta.family,
        doc.meta.p,
        doc.meta.modulus,
        doc.meta.input_classes,
        gates,
        doc.outputs,
    )
}

fn sanitize(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if out.chars().next().map(|c| c.is_ascii_digit()).unwrap_or(true) {
        out.insert(0, 'm');
    }
    out
}

fn hdl_operand(s: &Signal, p: usize, inverter_of: &std::collections::BTreeMap<WireId, String>) -> String {
    if s.inverted {
        inverter_of
            .get(&s.wire)
            .cloned()
            .expect("an inverter is materialized for every inverted read")
    } else if s.wire < p {
        format!("x[{}]", s.wire)
    } else {
        format!("w{}", s.wire)
    }
}

/// Emits a flat structural HDL module for the netlist, instantiating `FA`,
/// `HA` and `INV` primitives (their definitions are appended after the
/// module). Inversion flags are materialized as one `INV` instance per
/// distinct inverted wire. Port order: the input vector `x[p-1:0]`, then per
/// output port either `r[..]` or `{x_z, mag[n-1:0]}`.
pub fn export_hdl(nl: &Netlist) -> String {
    let p = nl.input_width();
    let mut ports: Vec<String> = vec![format!("  input  wire [{}:0] x", p - 1)];
    let mut plain_idx = 0usize;
    let multiple_plain = nl
        .outputs()
        .iter()
        .filter(|o| matches!(o, OutputPort::Plain { .. }))
        .count()
        > 1;
    let mut port_names: Vec<(String, Option<String>)> = Vec::new(); // (vector name, xz name)
    for port in nl.outputs() {
        match port {
            OutputPort::Plain { signals, .. } => {
                let name = if multiple_plain { format!("r{plain_idx}") } else { "r".into() };
                plain_idx += 1;
                ports.push(format!("  output wire [{}:0] {name}", signals.len() - 1));
                port_names.push((name, None));
            }
            OutputPort::D1 { magnitude, .. } => {
                ports.push("  output wire x_z".into());
                ports.push(format!("  output wire [{}:0] mag", magnitude.len() - 1));
                port_names.push(("mag".into(), Some("x_z".into())));
            }
        }
    }

    let mut body = String::new();

    // one inverter per distinct inverted wire; the nets are declared up
    // front so every textual reference follows its declaration, and the
    // instances come after the gates that drive their inputs
    let mut inverted: std::collections::BTreeSet<WireId> = std::collections::BTreeSet::new();
    for gate in nl.gates() {
        inverted.extend(gate.inputs.iter().filter(|s| s.inverted).map(|s| s.wire));
    }
    for port in nl.outputs() {
        let signals: Vec<Signal> = match port {
            OutputPort::Plain { signals, .. } => signals.clone(),
            OutputPort::D1 { xz, magnitude, .. } => {
                let mut v = vec![*xz];
                v.extend_from_slice(magnitude);
                v
            }
        };
        inverted.extend(signals.iter().filter(|s| s.inverted).map(|s| s.wire));
    }
    let mut inverter_of = std::collections::BTreeMap::new();
    for w in &inverted {
        let name = format!("w{w}_n");
        body.push_str(&format!("  wire {name};\n"));
        inverter_of.insert(*w, name);
    }

    for (i, gate) in nl.gates().iter().enumerate() {
        match gate.kind {
            GateKind::Fa => {
                let (a, b, c) = (
                    hdl_operand(&gate.inputs[0], p, &inverter_of),
                    hdl_operand(&gate.inputs[1], p, &inverter_of),
                    hdl_operand(&gate.inputs[2], p, &inverter_of),
                );
                let (s, co) = (gate.sum, gate.carry.unwrap());
                body.push_str(&format!(
                    "  wire w{s}, w{co};\n  FA fa{i} (.a({a}), .b({b}), .ci({c}), .s(w{s}), .co(w{co}));\n"
                ));
            }
            GateKind::Ha => {
                let (a, b) = (
                    hdl_operand(&gate.inputs[0], p, &inverter_of),
                    hdl_operand(&gate.inputs[1], p, &inverter_of),
                );
                let (s, co) = (gate.sum, gate.carry.unwrap());
                body.push_str(&format!(
                    "  wire w{s}, w{co};\n  HA ha{i} (.a({a}), .b({b}), .s(w{s}), .co(w{co}));\n"
                ));
            }
            GateKind::Not => {
                let a = hdl_operand(&gate.inputs[0], p, &inverter_of);
                let s = gate.sum;
                body.push_str(&format!("  wire w{s};\n  INV not{i} (.a({a}), .y(w{s}));\n"));
            }
            GateKind::Const0 => {
                body.push_str(&format!("  wire w{} = 1'b0;\n", gate.sum));
            }
            GateKind::Const1 => {
                body.push_str(&format!("  wire w{} = 1'b1;\n", gate.sum));
            }
        }
    }

    for (i, w) in inverted.iter().enumerate() {
        let src = if *w < p { format!("x[{w}]") } else { format!("w{w}") };
        body.push_str(&format!("  INV inv{i} (.a({src}), .y(w{w}_n));\n"));
    }

    // output assignments
    let mut port_iter = port_names.iter();
    for port in nl.outputs() {
        let (vec_name, xz_name) = port_iter.next().unwrap();
        match port {
            OutputPort::Plain { signals, .. } => {
                for (j, s) in signals.iter().enumerate() {
                    body.push_str(&format!(
                        "  assign {vec_name}[{j}] = {};\n",
                        hdl_operand(s, p, &inverter_of)
                    ));
                }
            }
            OutputPort::D1 { xz, magnitude, .. } => {
                body.push_str(&format!(
                    "  assign {} = {};\n",
                    xz_name.as_ref().unwrap(),
                    hdl_operand(xz, p, &inverter_of)
                ));
                for (j, s) in magnitude.iter().enumerate() {
                    body.push_str(&format!(
                        "  assign {vec_name}[{j}] = {};\n",
                        hdl_operand(s, p, &inverter_of)
                    ));
                }
            }
        }
    }

    format!(
        "module {} (\n{}\n);\n{}endmodule\n\n{}",
        sanitize(nl.name()),
        ports.join(",\n"),
        body,
        PRIMITIVES
    )
}

const PRIMITIVES: &str = "\
module FA (input wire a, input wire b, input wire ci, output wire s, output wire co);
  assign s = a ^ b ^ ci;
  assign co = (a & b) | (a & ci) | (b & ci);
endmodule

module HA (input wire a, input wire b, output wire s, output wire co);
  assign s = a ^ b;
  assign co = a & b;
endmodule

module INV (input wire a, output wire y);
  assign y = ~a;
endmodule
";
