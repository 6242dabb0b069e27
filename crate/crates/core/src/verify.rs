//! Equivalence and property harness: exhaustive and seeded random sweeps of
//! generator netlists against the arithmetic oracle, exhaustive contract
//! checks for the two adder-block identities, and golden-file comparison for
//! the shorthand tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csa::render_shorthand;
use crate::generators::{self, Family, GeneratorSpec};
use crate::modmath::{d1_encode, oracle_residue, Modulus};
use crate::netlist::{Netlist, NetlistBuilder, OutputPort, PortValue, Signal, Simulator};
use crate::{Error, Result};

/// Default cap on exhaustive sweeps, overridable per plan.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1 << 22;

/// How a sweep chooses its input vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SweepMode {
    /// Every input in `[0, 2^p)`; only allowed within the budget.
    Exhaustive,
    /// `samples` draws from a splitmix64 stream seeded with `seed`,
    /// masked uniformly onto `[0, 2^p)`.
    Random { samples: u64, seed: u64 },
}

/// A sweep of one generator build against the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub family: Family,
    pub p: usize,
    pub n: u32,
    #[serde(flatten)]
    pub mode: SweepMode,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_EXHAUSTIVE_BUDGET
}

impl SweepPlan {
    pub fn exhaustive(family: Family, p: usize, n: u32) -> Self {
        SweepPlan { family, p, n, mode: SweepMode::Exhaustive, budget: DEFAULT_EXHAUSTIVE_BUDGET }
    }

    pub fn random(family: Family, p: usize, n: u32, samples: u64, seed: u64) -> Self {
        SweepPlan {
            family,
            p,
            n,
            mode: SweepMode::Random { samples, seed },
            budget: DEFAULT_EXHAUSTIVE_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// A failing input, kept re-checkable in isolation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub input: u128,
    pub port: usize,
    pub expected: String,
    pub actual: String,
}

/// Outcome of a sweep or a contract check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub evaluated: u64,
    /// Identity of the sampling algorithm for random sweeps.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    fn pass(evaluated: u64) -> Self {
        Verdict { passed: true, evaluated, algorithm: None, counterexample: None }
    }

    fn fail(evaluated: u64, cx: Counterexample) -> Self {
        Verdict { passed: false, evaluated, algorithm: None, counterexample: Some(cx) }
    }
}

/// splitmix64; the fixed, documented generator behind random sweeps.
#[derive(Clone, Copy, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// A uniform draw from `[0, 2^bits)`.
    pub fn next_bits(&mut self, bits: usize) -> u128 {
        debug_assert!(bits <= 127);
        let raw = ((self.next_u64() as u128) << 64) | self.next_u64() as u128;
        raw & ((1u128 << bits) - 1)
    }
}

/// Runs the planned sweep: builds the generator deterministically and
/// compares every planned input against the oracle.
pub fn run_sweep(plan: &SweepPlan) -> Result<Verdict> {
    let spec = GeneratorSpec::new(plan.family, plan.p, plan.n)?;
    let generated = generators::build(&spec)?;
    sweep_netlist(&generated.netlist, plan.mode, plan.budget)
}

/// Sweeps an arbitrary netlist against the oracle implied by its output
/// ports: plain ports must reproduce `|X|_m` (bit-exactly when they carry no
/// pending correction), D1 ports the canonical encoding of `|X|_m`.
pub fn sweep_netlist(nl: &Netlist, mode: SweepMode, budget: u64) -> Result<Verdict> {
    let p = nl.input_width();
    if p > 127 {
        return Err(Error::InvalidParams(format!("sweeps support at most 127 input bits, got {p}")));
    }
    let mut sim = Simulator::new(nl);
    let mut bits = vec![false; p];
    let check = |sim: &mut Simulator, bits: &mut [bool], x: u128| -> Option<Counterexample> {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = (x >> i) & 1 == 1;
        }
        sim.run(bits).expect("input buffer sized for the netlist");
        compare_ports(nl, bits, &sim.port_values(), x)
    };

    match mode {
        SweepMode::Exhaustive => {
            if p as u32 >= 64 || (1u64 << p) > budget {
                return Err(Error::BudgetExceeded { p, budget });
            }
            let total = 1u128 << p;
            let mut x = 0u128;
            while x < total {
                if let Some(cx) = check(&mut sim, &mut bits, x) {
                    debug_assert!(recheck(nl, &cx));
                    return Ok(Verdict::fail(x as u64 + 1, cx));
                }
                x += 1;
            }
            Ok(Verdict::pass(total as u64))
        }
        SweepMode::Random { samples, seed } => {
            let mut rng = SplitMix64(seed);
            for i in 0..samples {
                let x = rng.next_bits(p);
                if let Some(cx) = check(&mut sim, &mut bits, x) {
                    debug_assert!(recheck(nl, &cx));
                    let mut v = Verdict::fail(i + 1, cx);
                    v.algorithm = Some("splitmix64".into());
                    return Ok(v);
                }
            }
            let mut v = Verdict::pass(samples);
            v.algorithm = Some("splitmix64".into());
            Ok(v)
        }
    }
}

/// Compares evaluated port values against the oracle for one input. A plain
/// port that owes no correction and holds one signal per weight class is a
/// finished residue and must match bit-exactly (this also rejects the
/// non-canonical all-ones representative mod `2^n - 1`); other plain ports
/// are reduction fragments checked modulo `m`.
fn compare_ports(
    nl: &Netlist,
    bits: &[bool],
    values: &[PortValue],
    x: u128,
) -> Option<Counterexample> {
    for (idx, (port, value)) in nl.outputs().iter().zip(values).enumerate() {
        let m = port.modulus();
        let expect = oracle_residue(bits, m);
        let ok = match (port, value) {
            (
                OutputPort::Plain { correction, signals, .. },
                PortValue::Plain { weighted_sum, residue, .. },
            ) => {
                let canonical_form = *correction == 0
                    && signals
                        .iter()
                        .map(|s| s.class)
                        .collect::<std::collections::BTreeSet<_>>()
                        .len()
                        == signals.len();
                if canonical_form {
                    *weighted_sum == expect
                } else {
                    *residue == expect
                }
            }
            (OutputPort::D1 { .. }, PortValue::D1 { value, .. }) => {
                d1_encode(expect, m.n()).map(|e| e == *value).unwrap_or(false)
            }
            _ => false,
        };
        if !ok {
            return Some(Counterexample {
                input: x,
                port: idx,
                expected: format!("|X|_{m} = {expect}"),
                actual: describe(value),
            });
        }
    }
    None
}

/// Re-evaluates a counterexample in isolation; a reported failure must fail
/// again on a fresh simulator.
pub fn recheck(nl: &Netlist, cx: &Counterexample) -> bool {
    let p = nl.input_width();
    let bits: Vec<bool> = (0..p).map(|i| (cx.input >> i) & 1 == 1).collect();
    match nl.evaluate(&bits) {
        Ok(values) => compare_ports(nl, &bits, &values, cx.input)
            .map(|again| again.input == cx.input)
            .unwrap_or(false),
        Err(_) => false,
    }
}

fn describe(value: &PortValue) -> String {
    match value {
        PortValue::Plain { weighted_sum, residue, .. } => {
            format!("weighted sum {weighted_sum}, residue {residue}")
        }
        PortValue::D1 { value, decoded } => {
            format!("d1 (zero={}, magnitude={}), decoded {decoded}", value.zero as u8, value.magnitude)
        }
    }
}

/// Exhaustive check of the CSA-row identity `|x+y+z| = |c_rot + s - 1|`
/// mod `2^n + 1` over all 2^{3n} operand triples.
pub fn check_property1(n: u32) -> Result<Verdict> {
    if n > 6 {
        return Err(Error::InvalidParams("property check supports n <= 6".into()));
    }
    let m = Modulus::fermat(n)?;
    let nn = n as usize;
    let mut b = NetlistBuilder::new("property1", m, 3 * nn);
    let vec_at = |b: &NetlistBuilder, base: usize| -> Vec<Signal> {
        (0..nn).map(|j| b.input(base + j).with_class(j as u32)).collect()
    };
    let (x, y, z) = (vec_at(&b, 0), vec_at(&b, nn), vec_at(&b, 2 * nn));
    let (c_rot, s) = generators::csa_stage_ferm(&mut b, &x, &y, &z)?;
    let mut signals = c_rot;
    signals.extend(s);
    let correction = m.value() - 1; // the row owes -1
    let nl = b.finish(vec![OutputPort::Plain { modulus: m, signals, correction }])?;

    let mask = (1u128 << nn) - 1;
    for input in 0u128..(1 << (3 * nn)) {
        let (xv, yv, zv) = (input & mask, (input >> nn) & mask, (input >> (2 * nn)) & mask);
        let expect = ((xv + yv + zv) % m.value() as u128) as u64;
        let got = match &nl.evaluate_value(input).unwrap()[0] {
            PortValue::Plain { residue, .. } => *residue,
            _ => unreachable!(),
        };
        if got != expect {
            return Ok(Verdict::fail(
                input as u64 + 1,
                Counterexample {
                    input,
                    port: 0,
                    expected: format!("|x+y+z|_{m} = {expect}"),
                    actual: format!("{got}"),
                },
            ));
        }
    }
    Ok(Verdict::pass(1 << (3 * nn)))
}

/// Exhaustive check of the final D1 adder contract, `d1(|a + b + 2|)`,
/// over all 2^{2n} operand pairs.
pub fn check_property2(n: u32) -> Result<Verdict> {
    if n > 6 {
        return Err(Error::InvalidParams("property check supports n <= 6".into()));
    }
    let m = Modulus::fermat(n)?;
    let nn = n as usize;
    let mut b = NetlistBuilder::new("property2", m, 2 * nn);
    let a1: Vec<Signal> = (0..nn).map(|j| b.input(j).with_class(j as u32)).collect();
    let a2: Vec<Signal> = (0..nn).map(|j| b.input(nn + j).with_class(j as u32)).collect();
    let (xz, mag) = generators::final_adder_ferm_d1(&mut b, &a1, &a2)?;
    let nl = b.finish(vec![OutputPort::D1 { modulus: m, xz, magnitude: mag }])?;

    let mask = (1u64 << nn) - 1;
    for input in 0u128..(1 << (2 * nn)) {
        let (av, bv) = (input as u64 & mask, (input as u64 >> nn) & mask);
        let expect = d1_encode((av + bv + 2) % m.value(), n)?;
        let got = match &nl.evaluate_value(input).unwrap()[0] {
            PortValue::D1 { value, .. } => *value,
            _ => unreachable!(),
        };
        if got != expect {
            return Ok(Verdict::fail(
                input as u64 + 1,
                Counterexample {
                    input,
                    port: 0,
                    expected: format!("d1(|{av}+{bv}+2|_{m})"),
                    actual: format!("(zero={}, magnitude={})", got.zero as u8, got.magnitude),
                },
            ));
        }
    }
    Ok(Verdict::pass(1 << (2 * nn)))
}

/// Byte-compares the rendered shorthand tables of the three mod-9 reference
/// builds against committed golden files, and their correction constants
/// against the published values.
pub fn check_goldens(golden_dir: &Path) -> Result<Verdict> {
    let cases = [(16usize, 8u64, "fermat_mod9_p16.txt"), (17, 6, "fermat_mod9_p17.txt"), (18, 2, "fermat_mod9_p18.txt")];
    let mut evaluated = 0;
    for (p, cor, file) in cases {
        let path = golden_dir.join(file);
        if !path.exists() {
            return Err(Error::MissingGolden(path));
        }
        let golden = std::fs::read_to_string(&path)?;
        let built = generators::build_classic_fermat(p, 3)?;
        let rendered = render_shorthand(&built.report.tables[0].table);
        evaluated += 1;
        if rendered != golden {
            return Ok(Verdict::fail(
                evaluated,
                Counterexample {
                    input: p as u128,
                    port: 0,
                    expected: golden,
                    actual: rendered,
                },
            ));
        }
        if built.report.cor != cor {
            return Ok(Verdict::fail(
                evaluated,
                Counterexample {
                    input: p as u128,
                    port: 0,
                    expected: format!("COR({p}, 9) = {cor}"),
                    actual: format!("{}", built.report.cor),
                },
            ));
        }
    }
    Ok(Verdict::pass(evaluated))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_is_reproducible() {
        let mut a = SplitMix64(42);
        let mut b = SplitMix64(42);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = SplitMix64(43);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn next_bits_masks_to_range() {
        let mut rng = SplitMix64(7);
        for _ in 0..100 {
            assert!(rng.next_bits(13) < (1 << 13));
        }
    }

    #[test]
    fn exhaustive_universal_d1_n2_p8() {
        let plan = SweepPlan::exhaustive(Family::UniversalD1, 8, 2);
        let v = run_sweep(&plan).unwrap();
        assert!(v.passed);
        assert_eq!(v.evaluated, 256);
    }

    #[test]
    fn random_sweep_deterministic() {
        let plan = SweepPlan::random(Family::BiResidue, 20, 2, 500, 42);
        let a = run_sweep(&plan).unwrap();
        let b = run_sweep(&plan).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        assert_eq!(a.algorithm.as_deref(), Some("splitmix64"));
    }

    #[test]
    fn budget_enforced() {
        let plan = SweepPlan::exhaustive(Family::UniversalD1, 24, 3).with_budget(1 << 10);
        assert!(matches!(run_sweep(&plan), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn properties_small() {
        for n in [2u32, 3] {
            let v = check_property1(n).unwrap();
            assert!(v.passed);
            assert_eq!(v.evaluated, 1 << (3 * n));
            let v = check_property2(n).unwrap();
            assert!(v.passed);
            assert_eq!(v.evaluated, 1 << (2 * n));
        }
    }

    #[test]
    fn missing_golden_reported() {
        let err = check_goldens(Path::new("/nonexistent-goldens"));
        assert!(matches!(err, Err(Error::MissingGolden(_))));
    }

    #[test]
    fn sweep_plan_serde_round_trip() {
        for plan in [
            SweepPlan::exhaustive(Family::UniversalD1, 16, 2),
            SweepPlan::random(Family::BiResidue, 32, 3, 1_000_000, 42).with_budget(1 << 20),
        ] {
            let text = serde_json::to_string(&plan).unwrap();
            let back: SweepPlan = serde_json::from_str(&text).unwrap();
            assert_eq!(back, plan, "{text}");
        }
    }
}
