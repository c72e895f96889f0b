use monofind::exact::{lis_length, verify_witness};
use monofind::generators::{generate, Certificate, CertifiedInstance, InstanceSpec, Style};
use monofind::io::{load_sequence, save_sequence};
use monofind::tester::{find_monotone, query_budget, AlgorithmConstants, TrialRng};
use monofind::{IndexInterval, SequenceView, ValueRange};

#[test]
fn generated_files_round_trip_through_the_tester() {
    let dir = tempfile::tempdir().unwrap();
    let consts = AlgorithmConstants::default();
    for style in Style::ALL {
        let spec = InstanceSpec { style, n: 3000, k: 3, eps: 0.2, seed: 21 };
        let inst = generate(&spec).unwrap();
        let path = dir.path().join(format!("{style}.f64"));
        save_sequence(&path, &inst.values).unwrap();
        let values = load_sequence(&path).unwrap();
        assert_eq!(values, inst.values);

        let cert_json = serde_json::to_string(&inst).unwrap();
        let mut back: CertifiedInstance = serde_json::from_str(&cert_json).unwrap();
        back.values = values.clone();
        back.check().unwrap();
        assert_eq!(matches!(back.certificate, Certificate::FreeProof(_)), style.is_free());

        let view = SequenceView::new(&values).unwrap();
        let mut found = 0;
        for seed in 0..20 {
            let out = find_monotone(&view, 3, 0.2, 0.1, &consts, &mut TrialRng::seeded(seed)).unwrap();
            assert!(out.queries as f64 <= query_budget(&consts, 3, 0.2, 0.1, values.len()));
            if let Some(w) = out.witness {
                assert!(verify_witness(&values, &w, IndexInterval::full(3000).unwrap(), &ValueRange::full()));
                found += 1;
            }
        }
        if style.is_free() {
            assert!(lis_length(&values) < 3);
            assert_eq!(found, 0);
        } else {
            assert!(found >= 17, "{style}: {found} / 20");
        }
    }
}

#[test]
fn config_file_changes_behaviour() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "exact_scan_below = 5000\n").unwrap();
    let consts = AlgorithmConstants::load(&path).unwrap();
    let inst = generate(&InstanceSpec { style: Style::Blocks, n: 4000, k: 4, eps: 0.05, seed: 0 }).unwrap();
    let view = SequenceView::new(&inst.values).unwrap();
    let out = find_monotone(&view, 4, 0.05, 0.1, &consts, &mut TrialRng::seeded(0)).unwrap();
    // the whole sequence is read and solved exactly
    assert_eq!(out.queries, 4000);
    assert!(out.found);
}
