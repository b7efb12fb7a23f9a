use tdcf_core::error::Error;
use tdcf_core::synthetic::{sample_scores, GaussianScoreModel};
use tdcf_core::trial_data::{parse_score_file, parse_scores, ScoreKind};

#[test]
fn sampled_sets_survive_a_file_round_trip() {
    let model = GaussianScoreModel {
        mu_tar: 2.0,
        mu_non: -1.5,
        mu_spoof: 0.7,
        sigma_tar: 1.1,
        sigma_non: 0.9,
        sigma_spoof: 2.3,
        n_tar: 300,
        n_non: 500,
        n_spoof: 200,
        seed: 99,
    };
    let dir = tempfile::tempdir().unwrap();
    for kind in [ScoreKind::Asv, ScoreKind::Cm] {
        let set = sample_scores(&model, kind).unwrap();
        let path = dir.path().join(format!("{kind}.tsv"));
        set.write_file(&path).unwrap();
        let back = parse_score_file(&path, kind).unwrap();
        assert_eq!(back.len(), set.len());
        for (a, b) in set.records().iter().zip(back.records()) {
            assert_eq!(a.trial_id, b.trial_id);
            assert_eq!(a.label, b.label);
            assert_eq!(a.score.to_bits(), b.score.to_bits());
        }
    }
}

#[test]
fn missing_file_reports_the_path() {
    let err = parse_score_file("/nonexistent/scores.tsv", ScoreKind::Asv).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/scores.tsv"));
}

#[test]
fn errors_carry_line_numbers() {
    let err = parse_scores("a\t1.0\ttarget\nb\tnope\tnontarget\n", ScoreKind::Asv).unwrap_err();
    assert!(err.to_string().contains('2'), "{err}");
    let err = parse_scores("a\t1.0\tbonafide\n", ScoreKind::Asv).unwrap_err();
    assert!(matches!(err, Error::UnknownLabel { .. }));
}
