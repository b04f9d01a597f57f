//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are always printed; the process fails if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use qdesign::admissible::{admissible_graph_table, q_bracket_gcd, steiner_family_sizes};
use qdesign::catalog::{self, design_report, family_candidate, load_entry, Construction};
use qdesign::graph::LabeledGraph;
use qdesign::search::{run_spec, SearchSpec, Status, Witness};
use qdesign::verify::{
    check_evenly_distributed, develop, paley_circulant_labeling, quadratic_residues, verify_design,
    verify_family, verify_graceful_labeling, walecki_hcs, InitialBlocks,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CATALOG_LIMIT: Duration = Duration::from_secs(60);
const STEINER_LIMIT: Duration = Duration::from_secs(120);
const NEGATIVE_LIMIT: Duration = Duration::from_secs(10);
const Q3STAR_LIMIT: Duration = Duration::from_secs(60);
const NESTED_LIMIT: Duration = Duration::from_secs(5);
const RNG_SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn pg2(v: u32) -> String {
    let modulus = match v {
        7 => "[0, 0, null, null, null, null, null, 0]",
        _ => unreachable!(),
    };
    format!(r#"{{"p": 2, "e": 1, "v": {v}, "modulus": {modulus}}}"#)
}

fn spec(json: &str) -> SearchSpec {
    serde_json::from_str(json).expect("spec")
}

fn initial_blocks(id: &str) -> InitialBlocks {
    let e = load_entry(id).unwrap();
    let (full, _) = family_candidate(&e).unwrap();
    let Construction::InitialBlocks { blocks, multiplier, .. } = &e.construction else { panic!("{id}") };
    let g = full.blocks[0].graph.clone();
    let blocks = blocks.iter().map(|l| LabeledGraph::new(g.clone(), l.clone(), e.modulus).unwrap()).collect();
    InitialBlocks { family: qdesign::verify::FamilyCandidate { blocks, ..full }, multiplier: *multiplier }
}

fn catalog_regression() -> Outcome {
    let t = Instant::now();
    let ids = catalog::list_entries().map_err(|e| e.to_string())?;
    let mut expected_fail = 0;
    for id in &ids {
        let c = catalog::verify_entry(id).map_err(|e| e.to_string())?;
        check(c.confirmed, format!("{id} not confirmed"))?;
        if !c.expected.is_pass() {
            expected_fail += 1;
        }
    }
    let elapsed = t.elapsed();
    check(expected_fail == 3, format!("{expected_fail} expected-fail entries"))?;

    let (q3, _) = family_candidate(&load_entry("q3star-7-q2").unwrap()).unwrap();
    let cert = verify_family(&q3);
    check(cert.verdict.is_pass() && q3.blocks.len() == 7 && q3.lambda == 1, "Q3* family")?;

    let (c7, _) = family_candidate(&load_entry("cycle-7-C3-q2").unwrap()).unwrap();
    let cov = verify_family(&c7).coverage;
    check((1..127).all(|x| cov.get(x) == 1), "C3 family does not partition Z_127 minus 0")?;

    let (c6, _) = family_candidate(&load_entry("cycle-6-C3-q2-relative").unwrap()).unwrap();
    let cov = verify_family(&c6).coverage;
    check((1..63).all(|x| cov.get(x) == u32::from(x % 9 != 0)), "relative family does not partition Z_63 minus 9Z_63")?;

    let oc = check_evenly_distributed(&initial_blocks("path-5-P3-q3")).map_err(|e| e.to_string())?;
    check(oc.verdict.is_pass() && oc.hits.len() == 24 && oc.hits.iter().all(|h| h.1 == 1), "path orbit coverage")?;

    for id in ["singer-C7-15", "singer-C15-31", "singer-C31-63", "singer-C63-127-seed"] {
        let c = catalog::verify_entry(id).unwrap();
        check(c.verdict.is_pass() && c.lambda == 1, format!("{id} labeling"))?;
    }
    check(elapsed < CATALOG_LIMIT, format!("catalog took {elapsed:?}"))?;
    Ok(format!("{} entries confirmed ({expected_fail} expected-fail) in {:.2}s", ids.len(), elapsed.as_secs_f64()))
}

fn steiner_end_to_end() -> Outcome {
    let t = Instant::now();
    let e = load_entry("steiner-13-3-1-q2").unwrap();
    let Construction::InitialBlocks { blocks, .. } = &e.construction else { return Err("not initial blocks".into()) };
    check(blocks.len() == 15, "15 initial blocks")?;
    let (f, _) = family_candidate(&e).unwrap();
    check(f.blocks.len() == 195, format!("{} expanded blocks", f.blocks.len()))?;
    let cert = verify_family(&f);
    check(cert.verdict.is_pass() && (1..8191).all(|x| cert.coverage.get(x) == 1), "difference family")?;
    check(cert.coverage.total() == 195 * 42, "8190 differences")?;
    let d = develop(&f, true).map_err(|e| e.to_string())?;
    let dv = verify_design(&d);
    let elapsed = t.elapsed();
    check(dv.verdict.is_pass() && dv.pair_violation_count == 0, "pair coverage")?;
    check(dv.blocks == 195 * 8191, format!("{} blocks", dv.blocks))?;
    check(dv.total_coverage == 8191 * 8190 / 2, format!("coverage {}", dv.total_coverage))?;
    // the CLI path must agree
    let r = design_report(&e, true).map_err(|e| e.to_string())?;
    check(r.verdict.is_pass() && r.materialized && r.blocks == dv.blocks, "design_report")?;
    check(elapsed < STEINER_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!(
        "195 blocks x 8191 translates = {} blocks, all 33542145 pairs covered once, {:.2}s",
        dv.blocks,
        elapsed.as_secs_f64()
    ))
}

fn size_tables() -> Outcome {
    let big = |s: &str| s.parse::<BigUint>().unwrap();
    // (v, k, q, |F|, |I|) as printed
    let rows: &[(u32, u32, u64, &str, Option<&str>)] = &[
        (13, 3, 2, "195", Some("15")),
        (15, 3, 2, "780", Some("260")),
        (19, 3, 2, "12483", Some("657")),
        (21, 3, 2, "49932", Some("16644")),
        (13, 3, 3, "5110", None),
        (19, 3, 3, "3725197", Some("196063")),
        (25, 3, 3, "2715668620", None),
        (16, 4, 2, "312", None),
        (25, 4, 2, "159783", None),
        (28, 4, 2, "1278264", Some("319566")),
        (13, 4, 3, "511", None),
        (16, 4, 3, "13797", None),
        (25, 4, 3, "271566862", None),
        (28, 4, 3, "7332305274", None),
        (7, 3, 2, "3", None),
        (7, 3, 3, "7", Some("1")),
        (7, 3, 4, "13", None),
        (7, 3, 5, "21", Some("3")),
        (7, 3, 7, "43", None),
        (7, 3, 9, "73", None),
        (7, 3, 11, "111", None),
        (7, 3, 13, "157", None),
        (7, 3, 16, "241", None),
        (7, 3, 17, "273", Some("39")),
        (7, 3, 19, "343", Some("49")),
    ];
    for &(v, k, q, f, i) in rows {
        let s = steiner_family_sizes(v, k, q).map_err(|e| e.to_string())?;
        check(s.family_size == big(f), format!("|F| for ({v},{k},{q}) = {}", s.family_size))?;
        check(s.initial_size == i.map(big), format!("|I| for ({v},{k},{q}) = {:?}", s.initial_size))?;
    }
    // printed cells that disagree with the counts: |I| = |F| / k for
    // (21,3,3), and [v-1]_q / ([k]_q [k-1]_q) for v = 1 (mod k(k-1))
    let s = steiner_family_sizes(21, 3, 3).unwrap();
    check(s.family_size == big("33526773"), "(21,3,3) |F|")?;
    check(s.initial_size == Some(big("33526773") / 3u32), "(21,3,3) |I|")?;
    let b = |n: u32| (BigUint::from(3u32).pow(n) - 1u32) / 2u32;
    let s = steiner_family_sizes(37, 4, 3).unwrap();
    check(s.family_size == b(36) / (b(4) * b(3)), "(37,4,3) |F|")?;
    check(s.initial_size == Some(&s.family_size / 37u32), "(37,4,3) |I|")?;
    Ok(format!(
        "{} printed cells exact; (21,3,3) |I| = 11175591 (printed 111755591), (37,4,3) |F| = {} (printed >10^15)",
        rows.len(),
        s.family_size
    ))
}

fn admissibility_table() -> Outcome {
    let rows = admissible_graph_table(7, 2, 1);
    let got: Vec<(u64, Vec<u64>, Vec<u64>)> = rows.into_iter().map(|r| (r.order, r.sizes, r.regular)).collect();
    let want = vec![
        (7, vec![7, 9, 21], vec![7, 21]),
        (15, vec![21, 63], vec![]),
        (31, vec![63, 127, 381], vec![]),
        (63, vec![63, 127, 381, 889, 1143], vec![63]),
    ];
    check(got == want, format!("{got:?}"))?;
    Ok("rows 7, 15, 31, 63 and regular sizes {7, 21, 63} match".into())
}

/// Every bijection of D onto the vertices of C_3 + C_4, checked directly.
fn brute_force_c3_c4(d: &[u32], n: u32) -> usize {
    let edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3)];
    let mut perm: Vec<u32> = d.to_vec();
    let mut found = 0;
    permute(&mut perm, 0, &mut |p| {
        let mut seen = vec![0u32; n as usize];
        for &(a, b) in &edges {
            let (x, y) = (p[a], p[b]);
            seen[((x + n - y) % n) as usize] += 1;
            seen[((y + n - x) % n) as usize] += 1;
        }
        if seen[1..].iter().all(|&c| c == 1) {
            found += 1;
        }
    });
    found
}

fn permute(v: &mut Vec<u32>, i: usize, f: &mut dyn FnMut(&[u32])) {
    if i == v.len() {
        f(v);
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permute(v, i + 1, f);
        v.swap(i, j);
    }
}

fn negative_result() -> Outcome {
    let t = Instant::now();
    let s = spec(
        r#"{"modulus": 15, "target": {"kind": "graceful_labeling", "set": [0, 1, 2, 4, 5, 8, 10], "lambda": 1,
            "graph": {"family": {"kind": "union", "parts": [{"kind": "cycle", "k": 3}, {"kind": "cycle", "k": 4}]}}}}"#,
    );
    let r = run_spec(&s, 1).map_err(|e| e.to_string())?;
    let search_time = t.elapsed();
    check(r.status == Status::Exhausted, format!("{:?}", r.status))?;
    let t = Instant::now();
    let hits = brute_force_c3_c4(&[0, 1, 2, 4, 5, 8, 10], 15);
    let brute_time = t.elapsed();
    check(hits == 0, format!("brute force found {hits}"))?;
    check(search_time < NEGATIVE_LIMIT && brute_time < NEGATIVE_LIMIT, "too slow")?;
    Ok(format!(
        "search exhausted after {} nodes ({:.3}s); 5040 bijections, none graceful ({:.3}s)",
        r.nodes_explored,
        search_time.as_secs_f64(),
        brute_time.as_secs_f64()
    ))
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    // (a)
    let mut pairs = 0;
    for q in [2u64, 3, 4, 5, 7, 9] {
        for m in 1..=30 {
            for n in 1..=30 {
                check(q_bracket_gcd(m, n, q).holds(), format!("gcd identity m={m} n={n} q={q}"))?;
                pairs += 1;
            }
        }
    }
    // (b) and (c)
    let mut families = 0;
    for id in catalog::list_entries().unwrap() {
        let e = load_entry(&id).unwrap();
        if !matches!(e.construction, Construction::Family { .. } | Construction::InitialBlocks { .. }) {
            continue;
        }
        families += 1;
        let (c, relative) = family_candidate(&e).unwrap();
        let base = verify_family(&c).verdict;
        if c.modulus <= 8191 {
            let design = match relative {
                Some(_) => design_report(&e, false).map_err(|e| e.to_string())?.verdict,
                None => verify_design(&develop(&c, false).map_err(|e| e.to_string())?).verdict,
            };
            check(design == base, format!("{id}: develop disagrees with family check"))?;
        }
        for _ in 0..10 {
            let t = rng.gen_range(1..c.modulus);
            check(verify_family(&c.translate(t)).verdict == base, format!("{id}: translate by {t}"))?;
        }
    }
    // (d)
    for u in (3..=99u32).step_by(2) {
        let cycles = walecki_hcs(u).map_err(|e| e.to_string())?;
        let mut seen = BTreeSet::new();
        for c in &cycles {
            check(c.len() == u as usize && c.iter().collect::<BTreeSet<_>>().len() == u as usize, "not Hamiltonian")?;
            for i in 0..c.len() {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                check(seen.insert((a.min(b), a.max(b))), format!("u={u}: repeated edge"))?;
            }
        }
        check(seen.len() as u32 == u * (u - 1) / 2, format!("u={u}: edges missing"))?;
    }
    // (e)
    let mut labelings = 0;
    for p in [7u32, 11, 19, 23, 31] {
        let choices: Vec<u32> = (1..=(p - 1) / 4).collect();
        for _ in 0..5 {
            let size = rng.gen_range(1..=choices.len());
            let mut s: Vec<u32> = choices.choose_multiple(&mut rng, size).copied().collect();
            s.sort_unstable();
            let b = paley_circulant_labeling(p, &s).map_err(|e| e.to_string())?;
            let v = verify_graceful_labeling(&quadratic_residues(p), &b, s.len() as u32);
            check(v.verdict.is_pass(), format!("Paley p={p} S={s:?}"))?;
            labelings += 1;
        }
    }
    Ok(format!(
        "gcd identity {pairs} cases; {families} families x 10 translates; Walecki u = 3..99; {labelings} Paley labelings"
    ))
}

fn search_rediscovery() -> Outcome {
    let t = Instant::now();
    let s = spec(&format!(
        r#"{{"field": {}, "target": {{"kind": "subspace_block", "graph": {{"family": {{"kind": "q3_star"}}}}, "lambda": 1}},
            "symmetry": {{"multiplier": 2}}}}"#,
        pg2(7)
    ));
    let r = run_spec(&s, 1).map_err(|e| e.to_string())?;
    let q3_time = t.elapsed();
    let w = r.witness.as_ref().ok_or("no Q3* witness")?;
    let entry = catalog::entry_from_search("rediscovered-q3star", &s, w).map_err(|e| e.to_string())?;
    let cert = catalog::verify_loaded(&entry).map_err(|e| e.to_string())?;
    check(cert.confirmed && cert.verdict.is_pass(), "Q3* witness not certified")?;
    check(q3_time < Q3STAR_LIMIT, format!("Q3* took {q3_time:?}"))?;

    let t = Instant::now();
    let s = spec(
        r#"{"modulus": 31, "target": {"kind": "nested_set", "set": [1, 3, 5, 6, 7, 11, 17, 18, 20, 21, 24, 25, 26, 27, 29],
            "k": 6, "lambda": 1}}"#,
    );
    let r = run_spec(&s, 1).map_err(|e| e.to_string())?;
    let nested_time = t.elapsed();
    let Some(Witness::Set(inner)) = &r.witness else { return Err("no nested set".into()) };
    let mut seen = [0u32; 31];
    for &a in inner {
        for &b in inner {
            seen[((a + 31 - b) % 31) as usize] += 1;
        }
    }
    check(seen[1..].iter().all(|&c| c == 1), "not a (31,6,1) difference set")?;
    check(nested_time < NESTED_LIMIT, format!("nested took {nested_time:?}"))?;
    Ok(format!(
        "Q3* block certified in {:.3}s; (31,6,1) set {inner:?} inside D in {:.3}s",
        q3_time.as_secs_f64(),
        nested_time.as_secs_f64()
    ))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = qdesign_cli::run(std::iter::once("qdesign").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let specs = [
        ("q3star", format!(
            r#"{{"field": {}, "target": {{"kind": "subspace_block", "graph": {{"family": {{"kind": "q3_star"}}}}, "lambda": 1}},
                "symmetry": {{"multiplier": 2}}}}"#,
            pg2(7)
        )),
        ("c3-family", format!(
            r#"{{"field": {}, "target": {{"kind": "family", "graph": {{"family": {{"kind": "cycle", "k": 3}}}}, "lambda": 1}}}}"#,
            pg2(7)
        )),
        ("c7-family", format!(
            r#"{{"field": {}, "target": {{"kind": "family", "graph": {{"family": {{"kind": "cycle", "k": 7}}}}, "lambda": 1}}}}"#,
            pg2(7)
        )),
        ("c7-graceful", r#"{"modulus": 15, "target": {"kind": "graceful_labeling", "set": [0, 1, 2, 4, 5, 8, 10],
            "lambda": 1, "graph": {"family": {"kind": "cycle", "k": 7}}}}"#.to_string()),
        ("c3c4", r#"{"modulus": 15, "target": {"kind": "graceful_labeling", "set": [0, 1, 2, 4, 5, 8, 10], "lambda": 1,
            "graph": {"family": {"kind": "union", "parts": [{"kind": "cycle", "k": 3}, {"kind": "cycle", "k": 4}]}}}}"#.to_string()),
    ];
    for (name, text) in &specs {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let path = path.to_str().unwrap();
        let mut outputs = Vec::new();
        for jobs in ["1", "2", "8"] {
            outputs.push(cli(&["search", "--input", path, "--emit-certificate", "--jobs", jobs]));
        }
        check(outputs.iter().all(|o| o == &outputs[0]), format!("{name}: outputs differ across --jobs"))?;
        check(outputs[0].0 <= 1, format!("{name}: exit {}", outputs[0].0))?;
    }
    Ok(format!("{} specs byte-identical for --jobs 1, 2, 8", specs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("catalog regression", catalog_regression),
        ("2-(13,3,1)_2 end to end", steiner_end_to_end),
        ("size tables", size_tables),
        ("admissibility table v=7 q=2", admissibility_table),
        ("C3+C4 on D_15 negative result", negative_result),
        ("property suites", property_suites),
        ("search rediscovery", search_rediscovery),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {}. {name}: {reason}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
