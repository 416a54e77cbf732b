use hierarchylab_core::hierarchy::reference::*;

#[test]
fn every_entry_matches_or_is_a_refuted_erratum() {
    let t = ReferenceTables::build().unwrap();
    let out = compare_all(&t).unwrap();
    assert!(out.len() >= 100);
    let mut mismatches = Vec::new();
    for o in &out {
        if !o.matches {
            assert!(o.erratum_confirmed, "unexplained mismatch: {:?}", o.entry);
            mismatches.push((o.entry.family, o.entry.kind, o.entry.n));
        }
    }
    assert_eq!(mismatches.len(), ERRATA.len());
    for x in ERRATA {
        assert!(mismatches.contains(&(x.family, x.kind, x.n)), "erratum not observed: {x:?}");
    }
}

#[test]
fn refutations_accept_the_generated_values() {
    let t = ReferenceTables::build().unwrap();
    for x in ERRATA {
        let entry = ENTRIES.iter().find(|e| e.family == x.family && e.kind == x.kind && e.n == x.n).unwrap();
        let generated = t.generated(entry).unwrap().scale_int(entry.scale);
        assert!(refute(x).unwrap(), "{x:?}");
        assert!(!refute_candidate(x, &generated).unwrap(), "{x:?} rejects the generated value");
    }
}
