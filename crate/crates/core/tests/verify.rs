use std::sync::Arc;

use proptest::prelude::*;
use qdesign::catalog::{design_report, family_candidate, list_entries, load_entry, CatalogEntry, Construction};
use qdesign::graph::LabeledGraph;
use qdesign::verify::{
    check_evenly_distributed, develop, expand_initial_blocks, verify_design, verify_family, InitialBlocks,
};

fn family_entries() -> Vec<CatalogEntry> {
    list_entries()
        .unwrap()
        .iter()
        .map(|id| load_entry(id).unwrap())
        .filter(|e| matches!(e.construction, Construction::Family { .. } | Construction::InitialBlocks { .. }))
        .collect()
}

#[test]
fn develop_agrees_with_family_check() {
    let entries = family_entries();
    assert_eq!(entries.len(), 7);
    for e in entries {
        let (c, relative) = family_candidate(&e).unwrap();
        if c.modulus > 8191 {
            continue;
        }
        let fam = verify_family(&c).verdict;
        if relative.is_some() {
            // pairs inside spread classes come from the cycle systems
            let r = design_report(&e, false).unwrap();
            assert!(r.materialized);
            assert_eq!(fam, r.verdict, "{}", e.id);
            continue;
        }
        let d = develop(&c, false).unwrap();
        assert!(d.base.is_none(), "{}", e.id);
        let dv = verify_design(&d);
        assert_eq!(fam, dv.verdict, "{}", e.id);
        if dv.verdict.is_pass() {
            let n = c.modulus as u64;
            assert_eq!(dv.total_coverage, c.lambda as u64 * n * (n - 1) / 2, "{}", e.id);
        }
    }
}

/// Initial blocks of the Q_3* entry before the multiplier is applied.
fn q3star_initial() -> InitialBlocks {
    let e = load_entry("q3star-7-q2").unwrap();
    let (full, _) = family_candidate(&e).unwrap();
    let Construction::InitialBlocks { blocks, multiplier, .. } = &e.construction else { panic!() };
    let g = full.blocks[0].graph.clone();
    let blocks = blocks.iter().map(|l| LabeledGraph::new(g.clone(), l.clone(), e.modulus).unwrap()).collect();
    InitialBlocks { family: qdesign::verify::FamilyCandidate { blocks, ..full }, multiplier: *multiplier }
}

#[test]
fn multiplier_soundness() {
    let ib = q3star_initial();
    assert!(check_evenly_distributed(&ib).unwrap().verdict.is_pass());
    assert!(verify_family(&expand_initial_blocks(&ib)).verdict.is_pass());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn perturbed_block_is_caught(slot in 0usize..7, shift in 1u32..127) {
        let mut ib = q3star_initial();
        let b = &ib.family.blocks[0];
        let mut labels = b.labels.clone();
        labels[slot] = (labels[slot] + shift) % b.modulus;
        let g = Arc::clone(&b.graph);
        let Ok(nb) = LabeledGraph::new(g, labels, b.modulus) else { return Ok(()) };
        ib.family.blocks[0] = nb;
        let even = check_evenly_distributed(&ib).unwrap().verdict.is_pass();
        let fam = verify_family(&expand_initial_blocks(&ib)).verdict.is_pass();
        prop_assert!(!(even && fam));
    }
}
