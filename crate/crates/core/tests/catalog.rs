use qdesign::catalog::*;
use qdesign::verify::Verdict;

#[test]
fn roster_has_every_entry() {
    let ids = list_entries().unwrap();
    assert_eq!(ids.len(), 26);
    let fails: usize = ids
        .iter()
        .map(|id| load_entry(id).unwrap())
        .filter(|e| e.expected.values().any(|v| *v == Verdict::Fail))
        .count();
    assert_eq!(fails, 3);
}

#[test]
fn every_entry_reverifies_to_its_expected_verdict() {
    for id in list_entries().unwrap() {
        let t = std::time::Instant::now();
        let c = verify_entry(&id).unwrap();
        eprintln!("{id}: {:?} {:?}", c.checks.iter().map(|c| (&c.name, c.verdict)).collect::<Vec<_>>(), t.elapsed());
        assert!(c.confirmed, "{id}: {:#?}", c.checks);
    }
}

#[test]
fn records_round_trip_byte_for_byte() {
    for id in list_entries().unwrap() {
        let raw = raw_entry(&id).unwrap();
        assert_eq!(serialize_entry(&load_entry(&id).unwrap()), raw, "{id}");
    }
}

#[test]
fn unknown_and_corrupt_entries() {
    assert!(matches!(load_entry("no-such-entry"), Err(CatalogError::UnknownId(_))));
    let raw = raw_entry("singer-C7-15").unwrap();
    let broken = raw.replace("\"modulus\": 15", "\"modulus\": \"fifteen\"");
    assert!(matches!(parse_entry("singer-C7-15", &broken), Err(CatalogError::CorruptEntry { .. })));
    assert!(matches!(parse_entry("other-id", &raw), Err(CatalogError::CorruptEntry { .. })));
}
