use std::path::PathBuf;

use regrobust::automata::{check_determinism, Dra};
use regrobust::bench::{build_sampler, generate, generate_bounded, ground_truth, BenchmarkId, SamplerError};
use regrobust::learn::{score, validate_consistency, SampleSet};
use regrobust::rational::ints;
use regrobust::Rational;

fn benchmarks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

/// Shipped automaton files equal the in-code fixtures. Set
/// `REGROBUST_BLESS=1` to rewrite them.
#[test]
fn shipped_fixture_files_match_code() {
    let bless = std::env::var_os("REGROBUST_BLESS").is_some();
    for id in BenchmarkId::ALL {
        let path = benchmarks_dir().join(format!("{}.json", id.file_stem()));
        let dra = ground_truth(id);
        if bless {
            std::fs::write(&path, dra.to_json() + "\n").unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(Dra::from_json(&text).unwrap(), dra, "{id}");
    }
}

#[test]
fn fixtures_agree_with_labelled_vectors() {
    for id in BenchmarkId::ALL {
        let path = benchmarks_dir().join(format!("{}.vectors.jsonl", id.file_stem()));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let set = SampleSet::from_jsonl(&text).unwrap();
        assert!(set.len() >= 10, "{id}");
        let dra = ground_truth(id);
        for (seq, label) in set.iter() {
            assert_eq!(dra.accepts(seq).unwrap(), label, "{id} on {seq:?}");
        }
    }
}

#[test]
fn fixtures_are_deterministic() {
    for id in BenchmarkId::ALL {
        assert_eq!(check_determinism(&ground_truth(id)), vec![], "{id}");
    }
}

#[test]
fn table_examples() {
    let s1 = ground_truth(BenchmarkId::S1);
    assert!(s1.accepts(&ints(&[1, 2, 3])).unwrap());
    assert!(!s1.accepts(&ints(&[2, 1])).unwrap());
    let l1 = ground_truth(BenchmarkId::L1);
    assert!(l1.accepts(&ints(&[2, 2, 2])).unwrap());
    assert!(!l1.accepts(&ints(&[2, 3])).unwrap());
    let s9 = ground_truth(BenchmarkId::S9);
    assert!(s9.accepts(&ints(&[0, -1, 5, 3, 7, 9, 6, 8])).unwrap());
    assert!(!s9.accepts(&ints(&[0, -1, 5, 3, 7, 9, 6, 3])).unwrap());
}

#[test]
fn ids_parse_and_print() {
    for id in BenchmarkId::ALL {
        assert_eq!(id.to_string().parse::<BenchmarkId>().unwrap(), id);
        assert_eq!(id.file_stem().parse::<BenchmarkId>().unwrap(), id);
    }
    assert!("S12".parse::<BenchmarkId>().is_err());
}

#[test]
fn labels_match_ground_truth_on_every_draw() {
    for id in BenchmarkId::ALL {
        let mut sampler = build_sampler(id, 0.5, 20, 11).unwrap();
        let dra = ground_truth(id);
        for _ in 0..600 {
            let (seq, label) = sampler.draw();
            assert!(!seq.is_empty() && seq.len() <= 20);
            assert_eq!(dra.accepts(&seq).unwrap(), label, "{id}");
        }
    }
}

#[test]
fn ten_thousand_draws_are_labelled_soundly() {
    let dra = ground_truth(BenchmarkId::S9);
    let mut sampler = build_sampler(BenchmarkId::S9, 0.3, 30, 5).unwrap();
    for _ in 0..10_000 {
        let (seq, label) = sampler.draw();
        assert_eq!(dra.accepts(&seq).unwrap(), label);
    }
}

#[test]
fn noiseless_walks_on_monotone_languages_are_positive() {
    for id in [BenchmarkId::S1, BenchmarkId::S2, BenchmarkId::S3, BenchmarkId::S4, BenchmarkId::L4] {
        let mut sampler = build_sampler(id, 0.0, 15, 3).unwrap();
        for _ in 0..200 {
            assert!(sampler.draw().1, "{id}");
        }
    }
}

#[test]
fn l1_sampler_produces_both_classes() {
    let mut sampler = build_sampler(BenchmarkId::L1, 0.5, 10, 1).unwrap();
    let labels: Vec<bool> = (0..100).map(|_| sampler.draw().1).collect();
    assert!(labels.contains(&true) && labels.contains(&false));
}

#[test]
fn generate_is_balanced_sound_and_seed_deterministic() {
    let mut a = build_sampler(BenchmarkId::S2, 0.5, 50, 42).unwrap();
    let mut b = build_sampler(BenchmarkId::S2, 0.5, 50, 42).unwrap();
    let da = generate(&mut a, 100, 100).unwrap();
    let db = generate(&mut b, 100, 100).unwrap();
    assert_eq!(da.to_jsonl(), db.to_jsonl());
    assert_eq!((da.count(true), da.count(false)), (100, 100));
    let dra = ground_truth(BenchmarkId::S2);
    assert!(validate_consistency(&dra, &da));
    assert_eq!(score(&dra, &da).unwrap(), Rational::one());
    assert!(da.iter().all(|(s, _)| !s.is_empty() && s.len() <= 50));
}

#[test]
fn seed_quota_of_369_for_every_language() {
    // Per-step noise makes long positives rare; 0.2 keeps S7 and S8 reachable.
    for id in BenchmarkId::ALL {
        let mut s = build_sampler(id, 0.2, 50, 1).unwrap();
        let d = generate(&mut s, 369, 369).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(d.len(), 738);
    }
}

#[test]
fn empty_quota_gives_empty_dataset() {
    let mut s = build_sampler(BenchmarkId::S1, 0.5, 5, 0).unwrap();
    assert!(generate(&mut s, 0, 0).unwrap().is_empty());
}

#[test]
fn unreachable_quota_is_reported() {
    // Without noise every walk on S1 is positive.
    let mut s = build_sampler(BenchmarkId::S1, 0.0, 5, 0).unwrap();
    assert!(matches!(generate_bounded(&mut s, 1, 1, 500), Err(SamplerError::QuotaUnreachable { .. })));
}

#[test]
fn sample_set_jsonl_round_trip_and_errors() {
    let text = "{\"seq\":[\"1/2\",\"3/1\"],\"label\":1}\n\n{\"seq\":[\"-2/1\"],\"label\":0}\n";
    let s = SampleSet::from_jsonl(text).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.to_jsonl(), text.replace("\n\n", "\n"));
    assert!(SampleSet::from_jsonl("{\"seq\":[\"1/1\"],\"label\":2}").is_err());
    assert!(SampleSet::from_jsonl("{\"seq\":[],\"label\":1}").is_err());
    assert!(SampleSet::from_jsonl("{\"seq\":[\"1/1\"],\"label\":1}\n{\"seq\":[\"1/1\"],\"label\":0}").is_err());
    assert!(score(&ground_truth(BenchmarkId::S1), &SampleSet::new()).is_err());
}
