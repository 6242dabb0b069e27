//! Cross-module integration checks: composition against the oracle, fault
//! injection through the serialized form, and randomized build/sweep
//! properties.

use proptest::prelude::*;

use resgen_core::export::{export_json, import_json};
use resgen_core::generators::{
    build_bi_residue, build_classic_fermat, build_classic_mersenne, build_d1_core,
    build_front_end, build_universal_d1,
};
use resgen_core::modmath::{d1_encode, oracle_residue_value, Modulus};
use resgen_core::netlist::{compose, OutputPort, PortValue, Signal};
use resgen_core::verify::{recheck, run_sweep, sweep_netlist, SweepMode, SweepPlan};
use resgen_core::Family;

/// Composing the front end with the 4-operand core by hand gives a full
/// generator that matches the oracle on every input.
#[test]
fn composed_front_end_and_core_match_oracle() {
    let (front, _) = build_front_end(16, 2).unwrap();
    let core = build_d1_core(2).unwrap();
    let wiring: Vec<Signal> = front
        .outputs()
        .iter()
        .flat_map(|port| match port {
            OutputPort::Plain { signals, .. } => signals.clone(),
            _ => unreachable!(),
        })
        .collect();
    let nl = compose(&front, &core, &wiring).unwrap();
    let m = Modulus::fermat(2).unwrap();
    for x in 0u128..(1 << 16) {
        let expect = d1_encode(oracle_residue_value(x, 16, m), 2).unwrap();
        match &nl.evaluate_value(x).unwrap()[0] {
            PortValue::D1 { value, .. } => assert_eq!(*value, expect, "x={x}"),
            _ => unreachable!(),
        }
    }
}

/// A netlist corrupted through its JSON form (one FA input rewired to the
/// wrong weight class) must fail the sweep with a re-checkable witness.
#[test]
fn fault_injection_yields_checkable_counterexample() {
    let g = build_universal_d1(8, 2).unwrap();
    let text = export_json(&g.netlist);
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let wire = doc["gates"][0]["in"][0]["wire"].as_u64().unwrap();
    doc["gates"][0]["in"][0]["wire"] = serde_json::json!(wire + 2);
    let corrupted = import_json(&doc.to_string()).unwrap();

    let verdict = sweep_netlist(&corrupted, SweepMode::Exhaustive, 1 << 22).unwrap();
    assert!(!verdict.passed);
    let cx = verdict.counterexample.expect("failing sweep carries a witness");
    assert!(recheck(&corrupted, &cx), "counterexample must re-fail in isolation");
    assert!(!recheck(&g.netlist, &cx), "the original netlist is not fooled");
}

/// The three mod-9 reference builds differ only in the stage-1 FA/HA
/// substitution and the folded correction constant.
#[test]
fn fermat_mod9_family_differs_only_in_stage1_and_constant() {
    let builds: Vec<_> = [16usize, 17, 18]
        .iter()
        .map(|&p| build_classic_fermat(p, 3).unwrap())
        .collect();
    let tables: Vec<_> = builds.iter().map(|g| &g.report.tables[0].table).collect();
    for t in &tables {
        assert_eq!(t.stages.len(), 3);
        assert_eq!(t.stages[0].after, vec![4, 4, 4]);
    }
    for s in 1..3 {
        assert_eq!(tables[0].stages[s].allocs, tables[1].stages[s].allocs);
        assert_eq!(tables[1].stages[s].allocs, tables[2].stages[s].allocs);
    }
    let cors: Vec<u64> = builds.iter().map(|g| g.report.cor).collect();
    assert_eq!(cors, vec![8, 6, 2]);
    // same total consumption at stage 1, just FAs traded for FA+HA pairs
    let stage1_bits: Vec<usize> = tables
        .iter()
        .map(|t| t.stages[0].allocs.iter().map(|a| 3 * a.fa + 2 * a.ha).sum())
        .collect();
    assert_eq!(stage1_bits, vec![16, 17, 18]);
}

/// Whole-circuit sanity for mixed widths around the 4n boundary.
#[test]
fn universal_d1_odd_widths_match_oracle() {
    for n in [2u32, 3] {
        let m = Modulus::fermat(n).unwrap();
        for p in [1usize, 3, 5, 7, 4 * n as usize - 1, 4 * n as usize + 1, 6 * n as usize + 1] {
            let g = build_universal_d1(p, n).unwrap();
            for x in 0u128..(1u128 << p.min(12)) {
                let expect = d1_encode(oracle_residue_value(x, p, m), n).unwrap();
                match &g.netlist.evaluate_value(x).unwrap()[0] {
                    PortValue::D1 { value, .. } => assert_eq!(*value, expect, "n={n} p={p} x={x}"),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Bi-residue netlists evaluated at scale: randomized sweep over both ports.
#[test]
fn bi_residue_n4_random_sweep() {
    let v = run_sweep(&SweepPlan::random(Family::BiResidue, 40, 4, 20_000, 7)).unwrap();
    assert!(v.passed, "{:?}", v.counterexample);
}

/// The universal generator past the exhaustive range: a million seeded
/// samples at p = 24.
#[test]
fn universal_d1_n3_p24_million_samples() {
    let v = run_sweep(&SweepPlan::random(Family::UniversalD1, 24, 3, 1_000_000, 42)).unwrap();
    assert!(v.passed, "{:?}", v.counterexample);
    assert_eq!(v.evaluated, 1_000_000);
}

/// Both bi-residue ports, exhaustively, at a width small enough to enumerate.
#[test]
fn bi_residue_n2_p16_exhaustive() {
    let v = run_sweep(&SweepPlan::exhaustive(Family::BiResidue, 16, 2)).unwrap();
    assert!(v.passed, "{:?}", v.counterexample);
    assert_eq!(v.evaluated, 1 << 16);
}

/// The effective block count never drops below the four the core consumes.
#[test]
fn block_counts_reported() {
    for (p, n, q, padded) in [(8usize, 2u32, 4, 8), (16, 2, 4, 0), (24, 3, 4, 0), (32, 3, 6, 4)] {
        let g = build_universal_d1(p, n).unwrap();
        assert_eq!(g.report.q, Some(q), "p={p} n={n}");
        assert_eq!(g.report.padded_zero_bits, padded, "p={p} n={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Any build of any family agrees with the oracle on sampled inputs.
    #[test]
    fn every_family_matches_oracle(
        family_idx in 0usize..4,
        n in 2u32..=4,
        p in 1usize..=40,
        seed in any::<u64>(),
    ) {
        let family = [
            Family::ClassicMersenne,
            Family::ClassicFermat,
            Family::UniversalD1,
            Family::BiResidue,
        ][family_idx];
        let v = run_sweep(&SweepPlan::random(family, p, n, 64, seed)).unwrap();
        prop_assert!(v.passed, "{:?}", v.counterexample);
    }

    /// Serialization round-trip preserves evaluation exactly.
    #[test]
    fn json_round_trip_preserves_evaluation(
        n in 2u32..=3,
        p in 1usize..=20,
        xs in proptest::collection::vec(any::<u64>(), 8),
    ) {
        let g = build_classic_mersenne(p, n).unwrap();
        let back = import_json(&export_json(&g.netlist)).unwrap();
        for x in xs {
            let x = (x as u128) & ((1u128 << p) - 1);
            prop_assert_eq!(g.netlist.evaluate_value(x).unwrap(), back.evaluate_value(x).unwrap());
        }
    }

    /// The shared front end never owes a correction and the bi-residue build
    /// reports its exact FA count.
    #[test]
    fn shared_front_end_properties(n in 2u32..=4, q in 2usize..=8) {
        let p = q * 2 * n as usize;
        let g = build_bi_residue(p, n).unwrap();
        prop_assert_eq!(g.report.cor, 0);
        prop_assert_eq!(g.report.shared_fa_count, Some(p - 4 * n as usize));
    }
}
