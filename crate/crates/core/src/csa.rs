//! Carry-save reduction: weighted bit pools, the correction ledger for
//! complemented signals, stage scheduling with (inverted) end-around carry,
//! and the shorthand stage tables.
//!
//! Input bits are grouped by the periodicity of `|2^k|` into one pool class
//! per weight. A reduction stage packs as many full adders per class as the
//! entering bit count allows; carries produced in class `k` enter class
//! `k + 1` at the next stage, and carries leaving the top class wrap around
//! to class 0 — taken as-is when `2^width = 1` holds, or inverted (with a
//! `-1` charged to the ledger) when `2^width = -1`. A half adder is packed in
//! a class only when the entering count is `2 mod 3` and a lookahead shows it
//! strictly reduces the number of stages needed to reach the target; a half
//! adder never removes a bit from the pool, it only moves one to the next
//! class, so this is purely a rebalancing device.

use serde::{Deserialize, Serialize};

use crate::modmath::{pow2_mod, Modulus};
use crate::netlist::{NetlistBuilder, OutputPort, Signal};
use crate::{Error, Result};

/// How carries leaving the top weight class are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EacPolicy {
    /// Wrap to class 0 unchanged (`2^width = 1`).
    Plain,
    /// Wrap to class 0 inverted and charge `-1` to the ledger
    /// (`2^width = -1`).
    Inverted,
    /// No wrap allowed; a carry out of the top class is an error.
    None,
}

/// Running sum, modulo `m`, of the corrections owed for every complemented
/// signal: inverting a signal of weight `2^k` relabels `-2^k` as `2^k` and
/// charges `|-2^k|_m` here. The total must be added before the final residue
/// is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrectionLedger {
    modulus: Modulus,
    accumulated: u64,
}

impl CorrectionLedger {
    pub fn new(modulus: Modulus) -> Self {
        CorrectionLedger { modulus, accumulated: 0 }
    }

    /// Charge for one inverted signal of weight class `k`.
    pub fn charge_inverted(&mut self, class: u32) {
        let m = self.modulus.value();
        let w = (1u64 << class) % m;
        self.accumulated = (self.accumulated + (m - w)) % m;
    }

    /// The correction constant owed so far, in `[0, m)`.
    pub fn total(&self) -> u64 {
        self.accumulated
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }
}

/// One block of a width-`w` partition of the input: bit indices, with `None`
/// for zero-padding positions in the top block.
pub type Block = Vec<Option<usize>>;

/// Splits `p` input bit positions into `ceil(p/w)` blocks of width `w`,
/// least significant block first, padding the top block with zeros.
pub fn partition_blocks(p: usize, w: usize) -> Vec<Block> {
    assert!(p >= 1 && w >= 1);
    let r = p.div_ceil(w);
    (0..r)
        .map(|j| {
            (0..w)
                .map(|i| {
                    let idx = j * w + i;
                    if idx < p {
                        Some(idx)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect()
}

/// Signals awaiting reduction, one FIFO queue per weight class.
#[derive(Clone, Debug)]
pub struct BitPool {
    modulus: Modulus,
    classes: Vec<Vec<Signal>>,
}

impl BitPool {
    pub fn new(modulus: Modulus) -> Self {
        let width = modulus.width() as usize;
        BitPool { modulus, classes: vec![Vec::new(); width] }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn width(&self) -> usize {
        self.classes.len()
    }

    /// Queue a signal into the class recorded on it.
    pub fn push(&mut self, s: Signal) {
        let class = s.class as usize;
        assert!(class < self.classes.len(), "class {class} out of range");
        self.classes[class].push(s);
    }

    pub fn counts(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    pub fn class(&self, k: usize) -> &[Signal] {
        &self.classes[k]
    }

    /// All remaining signals, class 0 first.
    pub fn drain_signals(&self) -> Vec<Signal> {
        self.classes.iter().flatten().copied().collect()
    }

    /// The two leftover operand vectors after a reduction to two bits per
    /// class: element `k` of each vector is the first (second) remaining bit
    /// of class `k`, `None` where the class holds fewer bits.
    pub fn operand_pair(&self) -> (Vec<Option<Signal>>, Vec<Option<Signal>>) {
        let first = self.classes.iter().map(|c| c.first().copied()).collect();
        let second = self.classes.iter().map(|c| c.get(1).copied()).collect();
        (first, second)
    }
}

/// Pools the `p` primary input bits of `builder` by the periodicity of
/// `|2^i|_m`. Bits whose period is odd (only mod `2^n + 1`) enter inverted
/// and the ledger absorbs the correction for each live bit; zero-padding
/// positions are dropped outright, so they neither occupy adder inputs nor
/// charge the ledger.
pub fn build_pool(p: usize, m: Modulus) -> (BitPool, CorrectionLedger) {
    let mut pool = BitPool::new(m);
    let mut ledger = CorrectionLedger::new(m);
    for i in 0..p {
        let w = pow2_mod(i as u32, m);
        let mut s = Signal::new(i, w.class);
        if w.negated {
            s = s.invert();
            ledger.charge_inverted(w.class);
        }
        pool.push(s);
    }
    (pool, ledger)
}

/// Per-stage, per-class adder allocation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdderAlloc {
    pub fa: usize,
    pub ha: usize,
}

/// One scheduled stage: the allocation per class and the bit counts entering
/// the next stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRow {
    pub allocs: Vec<AdderAlloc>,
    pub after: Vec<usize>,
}

/// The shorthand description of a CSA tree: entering bit counts per weight
/// class, alternating with the adders that consume them, stage by stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ShorthandTable {
    pub width: usize,
    pub initial: Vec<usize>,
    pub stages: Vec<StageRow>,
}

impl ShorthandTable {
    pub fn empty() -> Self {
        ShorthandTable::default()
    }

    pub fn total_fa(&self) -> usize {
        self.stages.iter().flat_map(|s| &s.allocs).map(|a| a.fa).sum()
    }

    pub fn total_ha(&self) -> usize {
        self.stages.iter().flat_map(|s| &s.allocs).map(|a| a.ha).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }
}

/// Simulates the bit-count evolution of one stage under a fixed allocation.
fn next_counts(counts: &[usize], allocs: &[AdderAlloc]) -> Vec<usize> {
    let w = counts.len();
    (0..w)
        .map(|k| {
            let pred = (k + w - 1) % w;
            counts[k] - 2 * allocs[k].fa - allocs[k].ha + allocs[pred].fa + allocs[pred].ha
        })
        .collect()
}

fn fa_only_allocs(counts: &[usize]) -> Vec<AdderAlloc> {
    counts.iter().map(|&c| AdderAlloc { fa: c / 3, ha: 0 }).collect()
}

/// Number of FA-only stages needed to bring every class down to `target`.
fn stages_to_target_fa_only(counts: &[usize], target: usize, cap: usize) -> usize {
    let mut counts = counts.to_vec();
    let mut stages = 0;
    while counts.iter().any(|&c| c > target) {
        if stages >= cap {
            return cap;
        }
        counts = next_counts(&counts, &fa_only_allocs(&counts));
        stages += 1;
    }
    stages
}

/// Chooses the adder allocation for one stage: every class packs the maximal
/// number of full adders; then, scanning from the top class down, a half
/// adder is committed wherever the entering count is `2 mod 3` and the
/// lookahead says the total stage count strictly drops.
fn schedule_stage(counts: &[usize], target: usize) -> Vec<AdderAlloc> {
    let cap = 4 * (counts.iter().sum::<usize>() + counts.len()) + 8;
    let mut allocs = fa_only_allocs(counts);
    let mut best = 1 + stages_to_target_fa_only(&next_counts(counts, &allocs), target, cap);
    for k in (0..counts.len()).rev() {
        if counts[k] % 3 != 2 {
            continue;
        }
        allocs[k].ha = 1;
        let with_ha = 1 + stages_to_target_fa_only(&next_counts(counts, &allocs), target, cap);
        if with_ha < best {
            best = with_ha;
        } else {
            allocs[k].ha = 0;
        }
    }
    allocs
}

/// Reduces the pool until every class holds at most `target` bits, emitting
/// FA/HA gates into `builder` stage by stage. Carries wrap per `eac`;
/// inverted wrapped carries charge the ledger. Returns the shorthand table.
pub fn reduce(
    pool: &mut BitPool,
    builder: &mut NetlistBuilder,
    ledger: &mut CorrectionLedger,
    target: usize,
    eac: EacPolicy,
) -> Result<ShorthandTable> {
    if target < 2 {
        return Err(Error::ImpossibleTarget(target));
    }
    let width = pool.width();
    let mut table = ShorthandTable { width, initial: pool.counts(), stages: Vec::new() };
    if table.initial.iter().all(|&c| c <= target) {
        table.initial.clear(); // nothing to do: empty table, header only
        return Ok(table);
    }

    let stage_cap = 4 * (table.initial.iter().sum::<usize>() + width) + 8;
    while pool.counts().iter().any(|&c| c > target) {
        if table.stages.len() >= stage_cap {
            return Err(Error::InvalidNetlist(
                "carry-save reduction did not converge".into(),
            ));
        }
        let counts = pool.counts();
        let allocs = schedule_stage(&counts, target);

        // consume this stage's bits class by class; carries land in the
        // next stage's queues only
        let mut arriving: Vec<Vec<Signal>> = vec![Vec::new(); width];
        for k in 0..width {
            let queue = std::mem::take(&mut pool.classes[k]);
            let alloc = allocs[k];
            let consumed = 3 * alloc.fa + 2 * alloc.ha;
            debug_assert!(consumed <= queue.len());
            let mut sums = Vec::new();
            let mut it = queue.iter().copied();
            for _ in 0..alloc.fa {
                let (a, b, c) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
                let (s, carry) = builder.fa(a, b, c, k as u32);
                sums.push(s);
                arriving[(k + 1) % width].push(wrap_carry(carry, k, width, eac, ledger)?);
            }
            for _ in 0..alloc.ha {
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                let (s, carry) = builder.ha(a, b, k as u32);
                sums.push(s);
                arriving[(k + 1) % width].push(wrap_carry(carry, k, width, eac, ledger)?);
            }
            // leftovers keep their queue position ahead of fresh sums
            let mut new_queue: Vec<Signal> = it.collect();
            new_queue.extend(sums);
            pool.classes[k] = new_queue;
        }
        for (k, carries) in arriving.into_iter().enumerate() {
            pool.classes[k].extend(carries);
        }
        table.stages.push(StageRow { allocs, after: pool.counts() });
    }
    Ok(table)
}

fn wrap_carry(
    carry: Signal,
    class: usize,
    width: usize,
    eac: EacPolicy,
    ledger: &mut CorrectionLedger,
) -> Result<Signal> {
    if class + 1 < width {
        return Ok(carry);
    }
    match eac {
        EacPolicy::Plain => Ok(carry.with_class(0)),
        EacPolicy::Inverted => {
            ledger.charge_inverted(0);
            Ok(carry.with_class(0).invert())
        }
        EacPolicy::None => Err(Error::CarryOverflow),
    }
}

/// Builds a standalone reduction fragment: `p` inputs pooled for `m`, reduced
/// to `target` bits per class, exposed as one plain output port whose
/// correction is the accumulated ledger. Evaluating the port therefore yields
/// `|X|_m` directly, which is what the value-preservation tests check.
pub fn reduction_fragment(
    p: usize,
    m: Modulus,
    target: usize,
    eac: EacPolicy,
) -> Result<(crate::netlist::Netlist, ShorthandTable, CorrectionLedger)> {
    let mut builder = NetlistBuilder::new(format!("reduce_p{p}_{m}"), m, p);
    let (mut pool, mut ledger) = build_pool(p, m);
    let table = reduce(&mut pool, &mut builder, &mut ledger, target, eac)?;
    let port = OutputPort::Plain {
        modulus: m,
        signals: pool.drain_signals(),
        correction: ledger.total(),
    };
    let nl = builder.finish(vec![port])?;
    Ok((nl, table, ledger))
}

/// Renders a table in the shorthand notation: a header of class names
/// `G{w-1} .. G0`, then alternating count rows and adder-allocation rows
/// labeled with their stage number.
pub fn render_shorthand(table: &ShorthandTable) -> String {
    let width = table.width;
    let header: Vec<String> = (0..width).rev().map(|k| format!("G{k}")).collect();

    let alloc_cell = |a: &AdderAlloc| -> String {
        let mut parts = Vec::new();
        match a.fa {
            0 => {}
            1 => parts.push("FA".to_string()),
            k => parts.push(format!("{k} FAs")),
        }
        match a.ha {
            0 => {}
            1 => parts.push("HA".to_string()),
            k => parts.push(format!("{k} HAs")),
        }
        parts.join(" ")
    };

    // rows as cells, top class leftmost
    let mut rows: Vec<(Vec<String>, String)> = Vec::new();
    let count_row = |counts: &[usize]| -> Vec<String> {
        counts.iter().rev().map(|c| c.to_string()).collect()
    };
    if !table.is_empty() {
        rows.push((count_row(&table.initial), String::new()));
        for (i, stage) in table.stages.iter().enumerate() {
            let cells: Vec<String> = stage.allocs.iter().rev().map(alloc_cell).collect();
            rows.push((cells, format!("CSA Stage {}", i + 1)));
            rows.push((count_row(&stage.after), String::new()));
        }
    }

    let cell_width = rows
        .iter()
        .flat_map(|(cells, _)| cells.iter().map(String::len))
        .chain(header.iter().map(String::len))
        .max()
        .unwrap_or(1)
        + 3;

    let mut out = String::new();
    let mut write_row = |cells: &[String], label: &str| {
        let mut line = String::new();
        for cell in cells {
            line.push_str(&format!("{cell:<cell_width$}"));
        }
        line.push_str(label);
        out.push_str(line.trim_end());
        out.push('\n');
    };
    write_row(&header, "");
    for (cells, label) in &rows {
        write_row(cells, label);
    }
    out
}
