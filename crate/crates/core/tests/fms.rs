mod common;

use std::path::Path;

use common::{explore, violations};
use des_core::control::{check_controllability, check_nonconflicting, closed_loop, supcon, SupervisorSet};
use des_core::espec::{compile, equivalent, minimize, parse, Expr};
use des_core::fms::{
    build, build_supervisor, build_supervisor_with, build_total, build_total_with, event_info, machine_language,
    spec_text, CatalogEntry, FmsCatalog, Machine, Partition, EVENTS,
};
use des_core::Automaton;

#[test]
fn machine_counts() {
    let states = [2, 2, 2, 2, 2, 2, 2, 3];
    let events = [2, 2, 2, 14, 4, 2, 2, 6];
    for (i, m) in Machine::ALL.into_iter().enumerate() {
        let a = build(m);
        assert_eq!((a.num_states(), a.num_events()), (states[i], events[i]), "{m}");
        assert!(a.is_trim(), "{m}");
        assert_eq!(a.marked_states().count(), 1, "{m}");
    }
    let s1 = build_supervisor(1);
    let s2 = build_supervisor(2);
    assert_eq!((s1.num_states(), s1.num_events()), (14, 13));
    assert_eq!((s2.num_states(), s2.num_events()), (11, 10));
}

#[test]
fn machines_match_their_expressions() {
    let al = Partition::Sec28.alphabet();
    for m in Machine::ALL {
        let a = build(m);
        let gen = compile(&parse(&machine_language(m)).unwrap(), &al).unwrap();
        // generated language: every state marked
        let all_marked = Automaton::from_json(&{
            let mut f = des_core::AutomatonFile::from(&a);
            f.marked = f.states.clone();
            serde_json::to_string(&f).unwrap()
        })
        .unwrap();
        assert!(equivalent(&gen, &all_marked).equivalent, "{m}");
        let inner = match parse(&machine_language(m)).unwrap() {
            Expr::PrefClose(x) => *x,
            other => panic!("{other}"),
        };
        assert!(equivalent(&compile(&inner, &al).unwrap(), &a).equivalent, "{m}");
    }
}

#[test]
fn plant_is_384_state_shuffle() {
    let g = build_total();
    assert_eq!(g.alphabet().len(), 34);
    assert_eq!(g.num_states(), 384);
    // independent count by exploring the machine configurations directly
    let ex = explore(&build(Machine::C1), &[], usize::MAX);
    assert_eq!(ex.configs.len(), 2);
    let machines: Vec<Automaton> = Machine::ALL.iter().map(|&m| build(m)).collect();
    let refs: Vec<&Automaton> = machines.iter().collect();
    let plant_of_parts = des_core::compose::parallel(&refs[..1], "|").unwrap();
    let ex = explore(&plant_of_parts, &refs[1..], usize::MAX);
    assert_eq!(ex.configs.len(), 384);
    assert_eq!(ex.marked.iter().filter(|&&m| m).count(), 1);
    assert_eq!(build_total_with(Partition::Sec2).num_states(), 384);
}

#[test]
fn specs_compile_to_the_supervisors() {
    let al = Partition::Sec28.alphabet();
    for (c, sup, states) in [(1, build_supervisor(1), 13), (2, build_supervisor(2), 10)] {
        let x = parse(spec_text(c)).unwrap();
        let k = compile(&x, &al).unwrap();
        let r = equivalent(&k, &sup);
        assert!(r.equivalent, "K{c}: {:?}", r.witness);
        assert_eq!(k.num_states(), states);
        assert_eq!(minimize(&sup).num_states(), states);
        assert_eq!(common::class_count(&sup), states);
        assert_eq!(common::equivalent_pair(&minimize(&sup)), None);
    }
    // 14 event occurrences in the first spec, 11 in the second
    let leaves = |x: &Expr| x.symbols().len();
    assert_eq!(leaves(&parse(spec_text(1)).unwrap()), 14);
    assert_eq!(leaves(&parse(spec_text(2)).unwrap()), 11);
}

#[test]
fn supervisors_merge_the_expected_states() {
    // qS1_10/qS1_14 and qS2_7/qS2_11 accept the same futures; the earlier name survives
    let s1 = build_supervisor(1);
    let kept: Vec<String> = (1..=13).map(|i| format!("qS1_{i}")).collect();
    assert_eq!(minimize(&s1).states(), kept);
    let s2 = build_supervisor(2);
    let kept: Vec<String> = (1..=10).map(|i| format!("qS2_{i}")).collect();
    assert_eq!(minimize(&s2).states(), kept);
    assert!(s1.is_trim() && s2.is_trim());
}

#[test]
fn controllable_under_default_partition() {
    let g = build_total();
    for c in [1, 2] {
        let r = check_controllability(&g, &build_supervisor(c)).unwrap();
        assert!(r.controllable, "S{c}: {:?}", r.counterexample);
        assert!(violations(&g, &build_supervisor(c), 2).is_empty());
    }
}

#[test]
fn not_controllable_under_per_machine_partition() {
    let g = build_total_with(Partition::Sec2);
    for c in [1, 2] {
        let sup = build_supervisor_with(c, Partition::Sec2);
        let r = check_controllability(&g, &sup).unwrap();
        assert!(!r.controllable);
        let cx = r.counterexample.unwrap();
        let shortest = violations(&g, &sup, 1);
        let (s, e) = &shortest[0];
        assert_eq!(cx.string.len(), s.len());
        assert_eq!(cx.event.as_str(), *e);
        // conveyor 3 loads while both supervisors wait for their own conveyor
        assert!(cx.string.is_empty());
        assert_eq!(cx.event.as_str(), "C3.load");
    }
}

#[test]
fn closed_loop_initial_enabled_set() {
    let g = build_total();
    let sups = SupervisorSet::new(vec![build_supervisor(1), build_supervisor(2)]);
    let cl = closed_loop(&g, &sups).unwrap();
    let active: Vec<&str> = cl.active_ids(cl.initial().unwrap()).map(|e| cl.alphabet().event(e).as_str()).collect();
    assert_eq!(active, ["C1.load", "C2.load", "R.pick5", "R.pick6", "R.pick7"]);
}

#[test]
fn conflict_verdicts_agree() {
    let g = build_total();
    let s1 = build_supervisor(1);
    let s2 = build_supervisor(2);
    let both = check_nonconflicting(&g, &SupervisorSet::new(vec![s1.clone(), s2.clone()])).unwrap();
    let ex = explore(&g, &[&s1, &s2], usize::MAX);
    assert!(ex.complete);
    assert_eq!(both.states, ex.configs.len());
    assert_eq!(both.nonblocking, ex.nonblocking());

    let one = check_nonconflicting(&g, &SupervisorSet::new(vec![s1.clone()])).unwrap();
    let cl = closed_loop(&g, &SupervisorSet::new(vec![s1])).unwrap();
    assert_eq!(one.nonblocking, cl.is_nonblocking());
    assert_eq!(one.nonblocking, cl.trim().num_states() == cl.num_states());
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("DES_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

#[test]
fn supcon_golden() {
    let mut summary = String::new();
    for p in Partition::ALL {
        let g = build_total_with(p);
        for c in [1, 2] {
            let sup = build_supervisor_with(c, p);
            let s = supcon(&g, &sup).unwrap();
            let pk = closed_loop(&g, &SupervisorSet::new(vec![sup.clone()])).unwrap();
            assert!(s.is_empty() || s.is_trim());
            assert!(s.is_sublanguage(&pk).holds);
            assert!(check_controllability(&g, &s).unwrap().controllable);
            summary.push_str(&format!(
                "{} S{c}: states={} transitions={} marked={} minimized={}\n",
                p.name(),
                s.num_states(),
                s.num_transitions(),
                s.marked_states().count(),
                minimize(&s).num_states()
            ));
            if p == Partition::Sec2 {
                golden(&format!("supcon_G_S{c}_sec2.json"), &s.to_json());
            }
        }
    }
    golden("supcon_summary.txt", &summary);
}

#[test]
fn catalog_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cat = FmsCatalog::new();
    let written = cat.emit(dir.path()).unwrap();
    assert_eq!(written.len(), 8 + 2 + 2 + 2 + 1);
    let al = Partition::Sec28.alphabet();
    let mut checked = 0;
    for (key, entry) in cat.entries() {
        match entry {
            CatalogEntry::Automaton(a) => {
                let back = Automaton::load(&dir.path().join(format!("{key}.json"))).unwrap();
                assert!(equivalent(&back, a).equivalent, "{key}");
                assert_eq!(&back, a, "{key}");
            }
            CatalogEntry::Spec(text) => {
                let body = std::fs::read_to_string(dir.path().join(format!("{key}.expr"))).unwrap();
                let reloaded = compile(&parse(&body).unwrap(), &al).unwrap();
                assert_eq!(reloaded, compile(&parse(text).unwrap(), &al).unwrap(), "{key}");
            }
        }
        checked += 1;
    }
    assert_eq!(checked, 14);
    let tsv = std::fs::read_to_string(dir.path().join("events.tsv")).unwrap();
    let rows: Vec<&str> = tsv.lines().collect();
    assert_eq!(rows.len(), 35);
    assert_eq!(rows[0], "id\tsymbol\tdescription\tcontrollable_sec28\tcontrollable_sec2");
    assert!(rows.contains(&"C1.load\te_{C,1,1}\tproduct loaded onto conveyor C1\ttrue\tfalse"));
}

#[test]
fn event_table() {
    assert_eq!(EVENTS.len(), 34);
    assert_eq!(event_info("A.done1").unwrap().symbol, "e_{A,5}");
    assert_eq!(event_info("R.place4").unwrap().symbol, "e_{R,11}");
    assert!(event_info("R.place8").is_none());
    let g = build_total();
    let ids: Vec<&str> = g.alphabet().events().iter().map(|e| e.as_str()).collect();
    let table: Vec<&str> = EVENTS.iter().map(|e| e.id).collect();
    assert_eq!(ids, table);
}
