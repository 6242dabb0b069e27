//! Builders for the residue generator families.
//!
//! Two classic designs reduce pooled input bits with an end-around-carry CSA
//! tree and finish with a modular adder: mod `2^n - 1` with a plain wrap, and
//! mod `2^n + 1` with inverted wraps plus a per-width correction constant.
//!
//! The universal generator mod `2^n + 1` instead reduces the input as `2n`-bit
//! blocks mod `2^{2n} - 1` (no inversions anywhere, so no correction for any
//! `p`), splits the two leftover vectors into halves, and feeds a fixed
//! 4-operand core: two rows of the CSA stage from [`csa_stage_ferm`] followed
//! by [`final_adder_ferm_d1`], whose output is the diminished-1 form of
//! `|X|_{2^n+1}` directly. The bi-residue generator shares that front-end
//! with a mod `2^n - 1` tail, saving `p - 4n` full adders over two standalone
//! circuits.

use serde::{Deserialize, Serialize};

use crate::csa::{build_pool, reduce, EacPolicy, ShorthandTable};
use crate::modmath::Modulus;
use crate::netlist::{
    compose, CostReport, Netlist, NetlistBuilder, OutputPort, Signal,
};
use crate::{Error, Result};

/// The four generator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ClassicMersenne,
    ClassicFermat,
    UniversalD1,
    BiResidue,
}

impl Family {
    pub fn slug(&self) -> &'static str {
        match self {
            Family::ClassicMersenne => "classic-mersenne",
            Family::ClassicFermat => "classic-fermat",
            Family::UniversalD1 => "universal-d1",
            Family::BiResidue => "bi-residue",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic-mersenne" => Ok(Family::ClassicMersenne),
            "classic-fermat" => Ok(Family::ClassicFermat),
            "universal-d1" => Ok(Family::UniversalD1),
            "bi-residue" => Ok(Family::BiResidue),
            other => Err(Error::InvalidParams(format!(
                "unknown family '{other}' (expected classic-mersenne, classic-fermat, universal-d1 or bi-residue)"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// Parameters of one generator instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub p: usize,
    pub n: u32,
}

impl GeneratorSpec {
    pub fn new(family: Family, p: usize, n: u32) -> Result<Self> {
        if !(1..=1 << 16).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "input width p={p} outside supported range 1..=65536"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParams(format!("modulus parameter n={n} must be at least 2")));
        }
        if n > 16 {
            return Err(Error::InvalidParams(format!("modulus parameter n={n} above supported 16")));
        }
        Ok(GeneratorSpec { family, p, n })
    }
}

/// A shorthand table with a label saying which part of the circuit it covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTable {
    pub label: String,
    pub table: ShorthandTable,
}

/// Structured record of how a generator was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildReport {
    pub family: Family,
    pub p: usize,
    pub n: u32,
    /// Effective number of 2n-bit front-end blocks (universal/bi-residue).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<usize>,
    /// Zero bits padded onto the top block(s); they are dropped from pools.
    pub padded_zero_bits: usize,
    /// The accumulated correction constant of the build path.
    pub cor: u64,
    /// Full adders shared by the two residue paths (bi-residue only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shared_fa_count: Option<usize>,
    pub tables: Vec<LabeledTable>,
    pub cost: CostReport,
}

/// A built netlist together with its build report.
#[derive(Clone, Debug)]
pub struct Generated {
    pub netlist: Netlist,
    pub report: BuildReport,
}

/// Builds the generator described by `spec`.
pub fn build(spec: &GeneratorSpec) -> Result<Generated> {
    match spec.family {
        Family::ClassicMersenne => build_classic_mersenne(spec.p, spec.n),
        Family::ClassicFermat => build_classic_fermat(spec.p, spec.n),
        Family::UniversalD1 => build_universal_d1(spec.p, spec.n),
        Family::BiResidue => build_bi_residue(spec.p, spec.n),
    }
}

/// The two n-bit halves of each leftover front-end vector:
/// `D_C = (c_high || c_low)`, `D_S = (s_high || s_low)`.
#[derive(Clone, Debug)]
pub struct SplitVectors {
    pub c_high: Vec<Signal>,
    pub c_low: Vec<Signal>,
    pub s_high: Vec<Signal>,
    pub s_low: Vec<Signal>,
}

impl SplitVectors {
    /// Splits two 2n-bit vectors by position. High-half signals are relabeled
    /// to classes `0..n`; their weight interpretation (`+2^k` mod `2^n - 1`,
    /// `-2^k` mod `2^n + 1`) is chosen by the consumer.
    pub fn split(d_c: &[Signal], d_s: &[Signal], n: u32) -> Self {
        let n = n as usize;
        assert_eq!(d_c.len(), 2 * n);
        assert_eq!(d_s.len(), 2 * n);
        let relabel = |s: &Signal, j: usize| s.with_class(j as u32);
        SplitVectors {
            c_low: d_c[..n].iter().enumerate().map(|(j, s)| relabel(s, j)).collect(),
            c_high: d_c[n..].iter().enumerate().map(|(j, s)| relabel(s, j)).collect(),
            s_low: d_s[..n].iter().enumerate().map(|(j, s)| relabel(s, j)).collect(),
            s_high: d_s[n..].iter().enumerate().map(|(j, s)| relabel(s, j)).collect(),
        }
    }
}

/// One CSA row mod `2^n + 1`: n full adders over three n-bit operands. The
/// carry vector is rotated left with the wrapped top carry inverted, so that
/// `|x + y + z| = |c_rot + s - 1|` holds for all inputs.
pub fn csa_stage_ferm(
    b: &mut NetlistBuilder,
    x: &[Signal],
    y: &[Signal],
    z: &[Signal],
) -> Result<(Vec<Signal>, Vec<Signal>)> {
    let n = x.len();
    if y.len() != n || z.len() != n {
        return Err(Error::WidthMismatch { expected: n, got: y.len().max(z.len()) });
    }
    let mut sums = Vec::with_capacity(n);
    let mut carries = Vec::with_capacity(n);
    for j in 0..n {
        let (s, c) = b.fa(x[j], y[j], z[j], j as u32);
        sums.push(s);
        carries.push(c);
    }
    let mut c_rot = Vec::with_capacity(n);
    c_rot.push(carries[n - 1].with_class(0).invert());
    for j in 1..n {
        c_rot.push(carries[j - 1].with_class(j as u32));
    }
    Ok((c_rot, sums))
}

/// One CSA row mod `2^n - 1`: as above but the wrapped carry stays plain,
/// so `|x + y + z| = |c_rot + s|`.
pub fn csa_stage_mers(
    b: &mut NetlistBuilder,
    x: &[Signal],
    y: &[Signal],
    z: &[Signal],
) -> Result<(Vec<Signal>, Vec<Signal>)> {
    let n = x.len();
    if y.len() != n || z.len() != n {
        return Err(Error::WidthMismatch { expected: n, got: y.len().max(z.len()) });
    }
    let mut sums = Vec::with_capacity(n);
    let mut carries = Vec::with_capacity(n);
    for j in 0..n {
        let (s, c) = b.fa(x[j], y[j], z[j], j as u32);
        sums.push(s);
        carries.push(c);
    }
    let mut c_rot = Vec::with_capacity(n);
    c_rot.push(carries[n - 1].with_class(0));
    for j in 1..n {
        c_rot.push(carries[j - 1].with_class(j as u32));
    }
    Ok((c_rot, sums))
}

/// Ripple carry-propagate adder over two n-bit operands with an optional
/// constant carry-in. Returns the n sum bits and the carry out.
fn ripple_cpa(
    b: &mut NetlistBuilder,
    x: &[Signal],
    y: &[Signal],
    carry_in: bool,
) -> (Vec<Signal>, Signal) {
    let n = x.len();
    debug_assert_eq!(y.len(), n);
    let mut sums = Vec::with_capacity(n);
    let mut carry: Option<Signal> = if carry_in { Some(b.const1(0)) } else { None };
    for j in 0..n {
        let (s, c) = match carry {
            Some(cin) => b.fa(x[j], y[j], cin.with_class(j as u32), j as u32),
            None => b.ha(x[j], y[j], j as u32),
        };
        sums.push(s);
        carry = Some(c);
    }
    (sums, carry.unwrap())
}

/// Increment chain adding a single bit at position 0: returns the n sum bits
/// and the chain's carry out of the top position.
fn increment_chain(b: &mut NetlistBuilder, x: &[Signal], inc: Signal) -> (Vec<Signal>, Signal) {
    let mut out = Vec::with_capacity(x.len());
    let mut carry = inc.with_class(0);
    for (j, &bit) in x.iter().enumerate() {
        let (s, c) = b.ha(bit, carry.with_class(j as u32), j as u32);
        out.push(s);
        carry = c;
    }
    (out, carry)
}

/// Final adder mod `2^n + 1` with diminished-1 output: returns the canonical
/// D1 encoding of `|a + b + 2|_{2^n+1}`.
///
/// The hardwired `+2` is the net constant of the universal architecture's
/// derivation (two block complements contribute `+4`, the two CSA rows `-1`
/// each). The realization is a generic ripple: `t = s + !c_out` satisfies
/// `t = |a + b + 1|` exactly in `[0, 2^n]`, which is the D1 magnitude of
/// `|a + b + 2|` with the chain's carry out as the zero flag — no separate
/// zero detector is needed.
pub fn final_adder_ferm_d1(
    b: &mut NetlistBuilder,
    a1: &[Signal],
    a2: &[Signal],
) -> Result<(Signal, Vec<Signal>)> {
    if a1.len() != a2.len() {
        return Err(Error::WidthMismatch { expected: a1.len(), got: a2.len() });
    }
    let (s, c_out) = ripple_cpa(b, a1, a2, false);
    let (mag, xz) = increment_chain(b, &s, c_out.invert());
    Ok((xz.with_class(a1.len() as u32), mag))
}

/// Final adder mod `2^n + 1` with normal (n+1)-bit output, computing
/// `|u + v + cor|`. One CSA row folds in the constant, then the ripple of
/// [`final_adder_ferm_d1`] produces the exact residue in `[0, 2^n]`.
fn final_adder_ferm_plain(
    b: &mut NetlistBuilder,
    u: &[Signal],
    v: &[Signal],
    cor: u64,
    m: Modulus,
) -> Result<Vec<Signal>> {
    let n = u.len();
    // the chain below adds u + v + A + cin + 2, so solve A + cin = |cor - 2|
    let needed = (cor + m.value() - 2) % m.value();
    let (a_const, carry_in) = if needed == (1u64 << n) {
        ((1u64 << n) - 1, true)
    } else {
        (needed, false)
    };
    let a_vec: Vec<Signal> =
        (0..n).map(|j| b.const_bit((a_const >> j) & 1 == 1, j as u32)).collect();
    let (c_rot, s) = csa_stage_ferm(b, u, v, &a_vec)?;
    let (s2, c_out) = ripple_cpa(b, &c_rot, &s, carry_in);
    let (low, top) = increment_chain(b, &s2, c_out.invert());
    let mut out = low;
    out.push(top.with_class(n as u32));
    Ok(out)
}

/// Final adder mod `2^n - 1` with plain end-around carry; the representative
/// `2^n - 1` of the zero class is detected and cleared so the output is
/// always the canonical residue.
fn final_adder_mers(b: &mut NetlistBuilder, u: &[Signal], v: &[Signal]) -> Vec<Signal> {
    let n = u.len();
    let (s, c_out) = ripple_cpa(b, u, v, false);
    // end-around: r = s + c_out never overflows n bits
    let (r, _) = increment_chain(b, &s, c_out);
    // canonicalize: all-ones means zero
    let mut all_ones = r[0];
    for &bit in &r[1..] {
        all_ones = b.and2(all_ones, bit);
    }
    (0..n).map(|j| b.and2(r[j], all_ones.invert()).with_class(j as u32)).collect()
}

/// Materializes the two leftover operand vectors of a reduced pool, padding
/// missing positions with constant zeros.
fn operand_vectors(
    b: &mut NetlistBuilder,
    pool: &crate::csa::BitPool,
) -> (Vec<Signal>, Vec<Signal>) {
    let (first, second) = pool.operand_pair();
    let fill = |b: &mut NetlistBuilder, v: Vec<Option<Signal>>| -> Vec<Signal> {
        v.into_iter()
            .enumerate()
            .map(|(k, s)| s.unwrap_or_else(|| b.const0(k as u32)))
            .collect()
    };
    (fill(b, first), fill(b, second))
}

/// Classic generator mod `2^n - 1`: pooled bits, plain-EAC reduction to two
/// operands, final adder with end-around carry.
pub fn build_classic_mersenne(p: usize, n: u32) -> Result<Generated> {
    let spec = GeneratorSpec::new(Family::ClassicMersenne, p, n)?;
    let m = Modulus::mersenne(n)?;
    let mut b = NetlistBuilder::new(format!("classic_mersenne_n{n}_p{p}"), m, p);
    let (mut pool, mut ledger) = build_pool(p, m);
    let table = reduce(&mut pool, &mut b, &mut ledger, 2, EacPolicy::Plain)?;
    let (u, v) = operand_vectors(&mut b, &pool);
    let out = final_adder_mers(&mut b, &u, &v);
    debug_assert_eq!(ledger.total(), 0);
    let netlist = b
        .finish(vec![OutputPort::Plain { modulus: m, signals: out, correction: 0 }])?
        .with_family(spec.family.slug());
    let cost = netlist.cost();
    Ok(Generated {
        netlist,
        report: BuildReport {
            family: spec.family,
            p,
            n,
            q: None,
            padded_zero_bits: p.div_ceil(n as usize) * n as usize - p,
            cor: ledger.total(),
            shared_fa_count: None,
            tables: vec![LabeledTable { label: "csa".into(), table }],
            cost,
        },
    })
}

/// Classic generator mod `2^n + 1` with normal output: odd blocks enter
/// complemented, the reduction wraps carries inverted, and the accumulated
/// correction is folded into the final adder as a constant operand.
pub fn build_classic_fermat(p: usize, n: u32) -> Result<Generated> {
    let spec = GeneratorSpec::new(Family::ClassicFermat, p, n)?;
    let m = Modulus::fermat(n)?;
    let mut b = NetlistBuilder::new(format!("classic_fermat_n{n}_p{p}"), m, p);
    let (mut pool, mut ledger) = build_pool(p, m);
    let table = reduce(&mut pool, &mut b, &mut ledger, 2, EacPolicy::Inverted)?;
    let cor = ledger.total();
    let (u, v) = operand_vectors(&mut b, &pool);
    let out = final_adder_ferm_plain(&mut b, &u, &v, cor, m)?;
    let netlist = b
        .finish(vec![OutputPort::Plain { modulus: m, signals: out, correction: 0 }])?
        .with_family(spec.family.slug());
    let cost = netlist.cost();
    Ok(Generated {
        netlist,
        report: BuildReport {
            family: spec.family,
            p,
            n,
            q: None,
            padded_zero_bits: p.div_ceil(n as usize) * n as usize - p,
            cor,
            shared_fa_count: None,
            tables: vec![LabeledTable { label: "csa".into(), table }],
            cost,
        },
    })
}

/// The shared front end: a plain-EAC CSA tree mod `2^{2n} - 1` reducing the
/// `p` input bits (grouped as 2n-bit blocks) to the vector pair `(D_C, D_S)`,
/// exposed as two plain output ports. Contains no inverted signals, so its
/// ledger is identically zero for every `p`.
pub fn build_front_end(p: usize, n: u32) -> Result<(Netlist, ShorthandTable)> {
    let dm = Modulus::double_mersenne(n)?;
    let mut b = NetlistBuilder::new(format!("front_end_n{n}_p{p}"), dm, p);
    let (mut pool, mut ledger) = build_pool(p, dm);
    let table = reduce(&mut pool, &mut b, &mut ledger, 2, EacPolicy::Plain)?;
    assert_eq!(ledger.total(), 0, "front end must not owe corrections");
    let (d_c, d_s) = operand_vectors(&mut b, &pool);
    let netlist = b.finish(vec![
        OutputPort::Plain { modulus: dm, signals: d_c, correction: 0 },
        OutputPort::Plain { modulus: dm, signals: d_s, correction: 0 },
    ])?;
    Ok((netlist, table))
}

/// The fixed 4-operand core mod `2^n + 1`: takes `D_C || D_S` (4n open
/// inputs, weight classes `0..2n` twice), splits halves, runs the two CSA
/// rows of the derivation chain and the final D1 adder.
pub fn build_d1_core(n: u32) -> Result<Netlist> {
    let ferm = Modulus::fermat(n)?;
    let nn = n as usize;
    let mut b = NetlistBuilder::new(format!("universal_d1_core_n{n}"), ferm, 4 * nn);
    let classes: Vec<u32> = (0..2 * n).chain(0..2 * n).collect();
    b.set_input_classes(classes);
    let d_c: Vec<Signal> = (0..2 * nn).map(|i| b.input(i)).collect();
    let d_s: Vec<Signal> = (2 * nn..4 * nn).map(|i| b.input(i)).collect();
    let (xz, mag) = d1_core_into(&mut b, &d_c, &d_s, n)?;
    b.finish(vec![OutputPort::D1 { modulus: ferm, xz, magnitude: mag }])
}

/// Emits the D1 core over already-built `D_C`, `D_S` vectors: the high halves
/// enter complemented (weight `2^{n+k} = -2^k`), first row over
/// `(D_CL, !D_CH, D_SL)`, second row over its outputs and `!D_SH`, then the
/// final adder whose hardwired +2 settles the two complement corrections.
fn d1_core_into(
    b: &mut NetlistBuilder,
    d_c: &[Signal],
    d_s: &[Signal],
    n: u32,
) -> Result<(Signal, Vec<Signal>)> {
    let sv = SplitVectors::split(d_c, d_s, n);
    let c_high_neg: Vec<Signal> = sv.c_high.iter().map(|s| s.invert()).collect();
    let s_high_neg: Vec<Signal> = sv.s_high.iter().map(|s| s.invert()).collect();
    let (c1, s1) = csa_stage_ferm(b, &sv.c_low, &c_high_neg, &sv.s_low)?;
    let (c2, s2) = csa_stage_ferm(b, &c1, &s1, &s_high_neg)?;
    final_adder_ferm_d1(b, &c2, &s2)
}

/// Universal residue generator mod `2^n + 1` with diminished-1 output,
/// assembled by composing the shared front end with the 4-operand core.
/// Works for any `p >= 1`; for `p <= 4n` the front end is empty and the
/// circuit degenerates to the bare core.
pub fn build_universal_d1(p: usize, n: u32) -> Result<Generated> {
    let spec = GeneratorSpec::new(Family::UniversalD1, p, n)?;
    let (front, table) = build_front_end(p, n)?;
    let core = build_d1_core(n)?;
    let wiring = front_wiring(&front);
    let netlist = compose(&front, &core, &wiring)?
        .renamed(format!("universal_d1_n{n}_p{p}"))
        .with_family(Family::UniversalD1.slug());
    let cost = netlist.cost();
    let (q, padded) = effective_blocks(p, n);
    Ok(Generated {
        netlist,
        report: BuildReport {
            family: spec.family,
            p,
            n,
            q: Some(q),
            padded_zero_bits: padded,
            cor: 0, // the front end is inversion-free; asserted when built
            shared_fa_count: None,
            tables: vec![LabeledTable { label: "front-end".into(), table }],
            cost,
        },
    })
}

/// Bi-residue generator for the conjugate pair: one shared front end feeding
/// both the D1 core and a mod `2^n - 1` tail over the same four half-vectors.
/// Output port 0 is the plain mod `2^n - 1` residue, port 1 the D1 result.
pub fn build_bi_residue(p: usize, n: u32) -> Result<Generated> {
    let spec = GeneratorSpec::new(Family::BiResidue, p, n)?;
    let (front, table) = build_front_end(p, n)?;
    let core = build_bi_core(n)?;
    let wiring = front_wiring(&front);
    let shared_fa = front.cost().fa_count;
    let netlist = compose(&front, &core, &wiring)?
        .renamed(format!("bi_residue_n{n}_p{p}"))
        .with_family(Family::BiResidue.slug());
    let cost = netlist.cost();
    let (q, padded) = effective_blocks(p, n);
    Ok(Generated {
        netlist,
        report: BuildReport {
            family: spec.family,
            p,
            n,
            q: Some(q),
            padded_zero_bits: padded,
            cor: 0,
            shared_fa_count: Some(shared_fa),
            tables: vec![LabeledTable { label: "front-end".into(), table }],
            cost,
        },
    })
}

/// The fixed dual tail: D1 core plus the mod `2^n - 1` path
/// `|D_CH + D_CL + D_SH + D_SL|` as a 4-operand plain-EAC CSA and final
/// adder, over the same 4n open inputs.
pub fn build_bi_core(n: u32) -> Result<Netlist> {
    let dm = Modulus::double_mersenne(n)?;
    let mers = Modulus::mersenne(n)?;
    let ferm = Modulus::fermat(n)?;
    let nn = n as usize;
    let mut b = NetlistBuilder::new(format!("bi_residue_core_n{n}"), dm, 4 * nn);
    let d_c: Vec<Signal> = (0..2 * nn).map(|i| b.input(i)).collect();
    let d_s: Vec<Signal> = (2 * nn..4 * nn).map(|i| b.input(i)).collect();

    // mod 2^n - 1 tail: high halves keep their plain weight 2^k
    let sv = SplitVectors::split(&d_c, &d_s, n);
    let (c1, s1) = csa_stage_mers(&mut b, &sv.c_high, &sv.c_low, &sv.s_high)?;
    let (c2, s2) = csa_stage_mers(&mut b, &c1, &s1, &sv.s_low)?;
    let mers_out = final_adder_mers(&mut b, &c2, &s2);

    let (xz, mag) = d1_core_into(&mut b, &d_c, &d_s, n)?;

    b.finish(vec![
        OutputPort::Plain { modulus: mers, signals: mers_out, correction: 0 },
        OutputPort::D1 { modulus: ferm, xz, magnitude: mag },
    ])
}

fn front_wiring(front: &Netlist) -> Vec<Signal> {
    front
        .outputs()
        .iter()
        .flat_map(|port| match port {
            OutputPort::Plain { signals, .. } => signals.clone(),
            OutputPort::D1 { .. } => unreachable!("front end exposes plain ports"),
        })
        .collect()
}

/// Effective front-end block count (at least the 4 needed by the core) and
/// the number of padded zero bits.
fn effective_blocks(p: usize, n: u32) -> (usize, usize) {
    let w = 2 * n as usize;
    let q = p.div_ceil(w).max(4);
    (q, q * w - p)
}
