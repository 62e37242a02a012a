use std::io::{BufRead, BufReader, Cursor, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regrobust::automata::ops::{complement, universal};
use regrobust::bench::{build_sampler, ground_truth, BenchmarkId};
use regrobust::certify::*;
use regrobust::learn::{SearchConfig, SearchSpace};
use regrobust::metric::{build_metric, MetricKind};
use regrobust::rational::{ints, Rational};

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn params(delta: &str, metric: MetricKind) -> CertificationParams {
    CertificationParams::standard(r(delta), metric).unwrap()
}

/// Strictly decreasing integer prefixes whose last step is `-1/100`
/// (accepted by S2) or `+1/100` (rejected), so a hundredth moves the label.
fn fragile_source(seed: u64) -> impl SequenceSource {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FnSource(move || {
        let len = rng.random_range(1..=5);
        let mut seq = vec![Rational::from_integer(rng.random_range(0..20))];
        for _ in 1..len {
            let step = rng.random_range(1..4);
            seq.push(seq.last().unwrap() - &Rational::from_integer(step));
        }
        let tweak = if rng.random_bool(0.5) { "-1/100" } else { "1/100" };
        seq.push(seq.last().unwrap() + &r(tweak));
        Some(seq)
    })
}

#[test]
fn sample_size_pinned_values() {
    assert_eq!(sample_size(&r("0.05"), &r("0.05")).unwrap(), 600);
    assert_eq!(sample_size(&r("0.01"), &r("0.1")).unwrap(), 231);
    let inv_e = Rational::from_f64((-1f64).exp()).unwrap();
    let inv_sqrt2 = Rational::from_f64(0.5f64.sqrt()).unwrap();
    assert_eq!(sample_size(&inv_e, &inv_sqrt2).unwrap(), 1);
    assert!(sample_size(&r("0"), &r("0.1")).is_err());
    assert!(sample_size(&r("0.1"), &r("1")).is_err());
}

proptest! {
    #[test]
    fn sample_size_agrees_with_float_away_from_integers(e in 1u32..999, g in 1u32..999) {
        let (eps, gamma) = (e as f64 / 1000.0, g as f64 / 1000.0);
        let x = (1.0 / eps).ln() / (2.0 * gamma * gamma);
        prop_assume!((x - x.round()).abs() > 1e-6);
        let n = sample_size(&Rational::new(e as i64, 1000), &Rational::new(g as i64, 1000)).unwrap();
        prop_assert_eq!(n, x.ceil() as u64);
    }
}

#[test]
fn d_max_values() {
    assert_eq!(d_max(600, &r("0.95")), 30);
    assert_eq!(d_max(600, &r("1")), 0);
    assert_eq!(d_max(0, &r("0.95")), 0);
    assert_eq!(d_max(231, &r("0.9")), 23);
}

#[test]
fn accept_bounds_values() {
    let b = accept_bounds(600, 300, 0, 0.05, (0.025, 0.025));
    let independent = 1.0 - 0.05f64.powf(1.0 / 600.0);
    assert!((b.lambda_ub - independent).abs() < 1e-9);
    assert!(((b.lambda_ub - independent) / independent).abs() < 1e-12);
    assert!((b.lambda_ub - 0.004981).abs() < 1e-6);
    let theta = 1.0 - 0.025f64.powf(1.0 / 300.0);
    assert!(((b.theta_plus_ub.unwrap() - theta) / theta).abs() < 1e-12);
    assert_eq!(b.theta_minus_ub, None);
    let one = accept_bounds(600, 10, 10, 1.0, (1.0, 1.0));
    assert_eq!(one.lambda_ub, 0.0);
    assert_eq!(one.theta_plus_ub, Some(0.0));
}

#[test]
fn params_validation() {
    assert!(CertificationParams::new(r("0.95"), r("0.05"), r("0.06"), r("1"), MetricKind::Hamming).is_err());
    assert!(CertificationParams::new(r("0.9"), r("0.05"), r("0.05"), r("0"), MetricKind::Hamming).is_err());
    let p = params("1", MetricKind::Hamming);
    assert_eq!(p.sample_size(), 600);
    assert_eq!(p.d_max(), 30);
    assert_eq!(p.eta_split, (r("1/40"), r("1/40")));
}

#[test]
fn stability_on_the_motivating_example() {
    let dra = ground_truth(BenchmarkId::S9);
    let v = ints(&[0, -1, 5, 3, 7, 9, 6, 8]);
    let metric = build_metric(&MetricKind::LastLetter);
    let at5 = stability_check(&dra, &v, &metric, &r("5")).unwrap();
    assert!(at5.stable && at5.flip_witness.is_none());
    let at6 = stability_check(&dra, &v, &metric, &r("6")).unwrap();
    assert!(!at6.stable);
    let w = at6.flip_witness.unwrap();
    assert!(w.last().unwrap() <= &Rational::from_integer(3));
    assert_ne!(dra.accepts(&w).unwrap(), dra.accepts(&v).unwrap());
    let all = universal();
    for d in ["1", "100"] {
        assert!(stability_check(&all, &v, &metric, &r(d)).unwrap().stable);
    }
}

#[test]
fn self_oracle_accepts_and_transcript_rechecks() {
    let dra = ground_truth(BenchmarkId::S2);
    let mut oracle = OracleHandle::from_dra(dra.clone());
    let mut sampler = build_sampler(BenchmarkId::S2, 0.2, 8, 3).unwrap();
    let p = params("1", MetricKind::LastLetter);
    let res = run_certification(&mut oracle, &dra, &mut sampler, &p).unwrap();
    let Outcome::Accept { n, m_plus, m_minus, agreement_lb, .. } = res.outcome else {
        panic!("expected accept, got {:?}", res.to_json());
    };
    assert_eq!(n, 600);
    assert_eq!(m_plus + m_minus, 600);
    assert_eq!(res.disagreements, 0);
    assert_eq!(agreement_lb, r("0.9"));
    let metric = build_metric(&p.metric);
    for w in &res.certified {
        assert!(stability_check(&dra, w, &metric, &p.delta).unwrap().stable);
    }
}

#[test]
fn certification_is_deterministic() {
    let run = |dedup: bool| {
        let dra = ground_truth(BenchmarkId::S1);
        let mut oracle = OracleHandle::from_dra(ground_truth(BenchmarkId::S3));
        let mut sampler = build_sampler(BenchmarkId::S1, 0.3, 6, 11).unwrap();
        let mut p = params("1/2", MetricKind::Hamming);
        p.stability_dedup = dedup;
        run_certification(&mut oracle, &dra, &mut sampler, &p).unwrap().to_json().to_string()
    };
    assert_eq!(run(false), run(false));
    assert_eq!(run(true), run(true));
}

#[test]
fn opposite_oracle_refines_with_d_max_plus_one() {
    let dra = ground_truth(BenchmarkId::S2);
    let mut oracle = OracleHandle::from_dra(complement(&dra));
    let mut sampler = build_sampler(BenchmarkId::S2, 0.2, 8, 5).unwrap();
    let res = run_certification(&mut oracle, &dra, &mut sampler, &params("1", MetricKind::LastLetter)).unwrap();
    match res.outcome {
        Outcome::Refine { counterexamples } => {
            assert_eq!(counterexamples.len(), 31);
            for (seq, label) in counterexamples {
                assert_ne!(dra.accepts(&seq).unwrap(), label);
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fragile_oracle_is_non_robust() {
    let dra = ground_truth(BenchmarkId::S2);
    let mut oracle = OracleHandle::from_dra(dra.clone());
    let mut source = fragile_source(1);
    let p = params("1", MetricKind::LastLetter);
    let res = run_certification(&mut oracle, &dra, &mut source, &p).unwrap();
    let Outcome::NonRobust { w, cex, distance } = res.outcome else {
        panic!("{:?}", res.to_json());
    };
    assert!(distance < r("1"));
    let metric = build_metric(&p.metric);
    assert!(verify_non_robust(&mut oracle, &w, &cex, &metric, &p.delta).unwrap());
    assert_eq!(res.drawn, 1);
}

#[test]
fn hoeffding_rejects_a_poor_surrogate() {
    let dra = universal();
    let p = params("1", MetricKind::Hamming);
    let mut accepted = 0;
    for run in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(run);
        let mut oracle = OracleHandle::new(FnOracle(move |_: &[Rational]| !rng.random_bool(0.15)));
        let mut src_rng = ChaCha8Rng::seed_from_u64(10_000 + run);
        let mut source = FnSource(move || {
            let len = src_rng.random_range(1..=4);
            Some((0..len).map(|_| Rational::new(src_rng.random_range(-1000..1000), 7)).collect())
        });
        let res = run_certification(&mut oracle, &dra, &mut source, &p).unwrap();
        if matches!(res.outcome, Outcome::Accept { .. }) {
            accepted += 1;
        }
    }
    assert!(accepted as f64 / 200.0 <= 0.08, "{accepted} accepts");
}

#[test]
fn sampler_exhaustion_is_reported() {
    let dra = universal();
    let mut oracle = OracleHandle::from_dra(dra.clone());
    let mut left = 3;
    let mut source = FnSource(move || {
        left -= 1;
        (left >= 0).then(|| ints(&[1]))
    });
    let err = run_certification(&mut oracle, &dra, &mut source, &params("1", MetricKind::Hamming)).unwrap_err();
    assert!(matches!(err, CertifyError::SamplerExhausted { drawn: 3 }));
}

fn local_search(states: usize) -> Learner {
    Learner::LocalSearch {
        space: SearchSpace::new(states, 1, vec![]).unwrap(),
        config: SearchConfig { max_iterations: 20_000, restarts: 3, seed: 9, ..Default::default() },
    }
}

#[test]
fn extraction_accepts_s2() {
    let mut oracle = OracleHandle::from_dra(ground_truth(BenchmarkId::S2));
    let mut sampler = build_sampler(BenchmarkId::S2, 0.2, 8, 21).unwrap();
    let budget = Budget { max_rounds: 6, ..Default::default() };
    let out = extraction_loop(&local_search(2), &mut oracle, &mut sampler, &params("1", MetricKind::LastLetter), &budget)
        .unwrap();
    assert_eq!(out.result.outcome.name(), "accept", "{}", out.result.to_json());
    assert!(out.refinements <= 5);
}

#[test]
fn extraction_stops_on_fragile_oracle() {
    let mut oracle = OracleHandle::from_dra(ground_truth(BenchmarkId::S2));
    let mut source = fragile_source(2);
    let p = params("1", MetricKind::LastLetter);
    let out = extraction_loop(&local_search(2), &mut oracle, &mut source, &p, &Budget::default()).unwrap();
    let Outcome::NonRobust { w, cex, .. } = &out.result.outcome else {
        panic!("{}", out.result.to_json());
    };
    let metric = build_metric(&p.metric);
    assert!(verify_non_robust(&mut oracle, w, cex, &metric, &p.delta).unwrap());
}

#[test]
fn zero_budget_stops_immediately() {
    let mut oracle = OracleHandle::from_dra(ground_truth(BenchmarkId::S2));
    let mut sampler = build_sampler(BenchmarkId::S2, 0.2, 8, 21).unwrap();
    let budget = Budget { max_rounds: 0, ..Default::default() };
    let err = extraction_loop(&local_search(2), &mut oracle, &mut sampler, &params("1", MetricKind::LastLetter), &budget)
        .unwrap_err();
    assert!(matches!(err, ExtractError::BudgetExhausted { rounds: 0, last: None }));
    assert_eq!(oracle.queries(), 0);
}

#[test]
fn oracle_handle_caches() {
    let mut calls = 0u32;
    let mut oracle = OracleHandle::new(FnOracle(move |_: &[Rational]| {
        calls += 1;
        calls % 2 == 1
    }));
    let a = oracle.label(&ints(&[1, 2])).unwrap();
    assert_eq!(oracle.label(&ints(&[1, 2])).unwrap(), a);
    oracle.label(&ints(&[3])).unwrap();
    assert_eq!(oracle.queries(), 2);
}

fn serve_lines(lines: &[&str]) -> Vec<serde_json::Value> {
    let mut input = lines.join("\n");
    input.push('\n');
    let mut out = Vec::new();
    let mut oracle = DraOracle(ground_truth(BenchmarkId::S1));
    serve(&mut oracle, Cursor::new(input), &mut out).unwrap();
    out.lines().map(|l| serde_json::from_str(&l.unwrap()).unwrap()).collect()
}

#[test]
fn protocol_handshake_and_queries() {
    let replies = serve_lines(&[
        r#"{"protocol":"regrobust-oracle/1"}"#,
        r#"{"id":7,"seq":["1/1","2","5/2"]}"#,
        r#"{"id":8,"seq":["3","1"]}"#,
    ]);
    assert_eq!(replies[0], serde_json::json!({"protocol": "regrobust-oracle/1"}));
    assert_eq!(replies[1], serde_json::json!({"id": 7, "label": 1}));
    assert_eq!(replies[2], serde_json::json!({"id": 8, "label": 0}));
}

#[test]
fn protocol_errors_keep_serving() {
    let replies = serve_lines(&[
        r#"{"id":1,"seq":["1"]}"#,
        r#"{"protocol":"other/2"}"#,
        r#"{"protocol":"regrobust-oracle/1"}"#,
        "not json",
        r#"{"id":2,"seq":["x"]}"#,
        r#"{"id":3}"#,
        r#"{"id":4,"seq":[]}"#,
    ]);
    assert_eq!(replies.len(), 7);
    assert_eq!(replies[0]["id"], 1);
    assert!(replies[0]["error"].is_string());
    assert!(replies[1]["error"].is_string());
    assert!(replies[3]["error"].is_string());
    assert_eq!(replies[4]["id"], 2);
    assert!(replies[4]["error"].is_string());
    assert_eq!(replies[5]["id"], 3);
    assert_eq!(replies[6], serde_json::json!({"id": 4, "label": 1}));
}

proptest! {
    #[test]
    fn protocol_fuzz_never_breaks_the_server(junk in proptest::collection::vec(".{0,40}", 0..8), id in 0u64..1_000_000) {
        let mut lines = vec![r#"{"protocol":"regrobust-oracle/1"}"#.to_string()];
        lines.extend(junk.into_iter().map(|j| j.replace('\n', " ")));
        lines.push(format!(r#"{{"id":{id},"seq":["1","2"]}}"#));
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let replies = serve_lines(&refs);
        let last = replies.last().unwrap();
        prop_assert_eq!(&last["id"], &serde_json::json!(id));
        prop_assert_eq!(&last["label"], &serde_json::json!(1));
    }
}

#[test]
fn tcp_round_trip_matches_in_process() {
    let dra = ground_truth(BenchmarkId::S9);
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let served = dra.clone();
    thread::spawn(move || serve_tcp(&served, listener));
    let mut remote = OracleHandle::new(LineOracle::open(&format!("tcp:{addr}"), DEFAULT_TIMEOUT).unwrap());
    let mut sampler = build_sampler(BenchmarkId::S9, 0.3, 8, 4).unwrap();
    for _ in 0..200 {
        let (seq, label) = sampler.draw();
        assert_eq!(remote.label(&seq).unwrap(), label);
    }
}

fn fake_server(reply: impl Fn(&str) -> Option<String> + Send + 'static) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut out = stream.try_clone().unwrap();
        for line in BufReader::new(stream).lines() {
            let line = line.unwrap();
            if let Some(r) = reply(&line) {
                writeln!(out, "{r}").unwrap();
            }
        }
    });
    format!("tcp:{addr}")
}

#[test]
fn client_rejects_bad_servers() {
    let wrong_id = fake_server(|l| {
        Some(if l.contains("protocol") { l.to_string() } else { r#"{"id":99,"label":1}"#.into() })
    });
    let mut o = LineOracle::open(&wrong_id, DEFAULT_TIMEOUT).unwrap();
    assert!(matches!(o.query(&ints(&[1])), Err(OracleError::Protocol(_))));

    let bad_label = fake_server(|l| Some(if l.contains("protocol") { l.to_string() } else { r#"{"id":0,"label":2}"#.into() }));
    let mut o = LineOracle::open(&bad_label, DEFAULT_TIMEOUT).unwrap();
    assert!(matches!(o.query(&ints(&[1])), Err(OracleError::Protocol(_))));

    let silent = fake_server(|l| l.contains("protocol").then(|| l.to_string()));
    let mut o = LineOracle::open(&silent, Duration::from_millis(200)).unwrap();
    assert!(matches!(o.query(&ints(&[1])), Err(OracleError::Timeout(_))));

    let wrong_protocol = fake_server(|_| Some(r#"{"protocol":"other/9"}"#.into()));
    assert!(matches!(LineOracle::open(&wrong_protocol, DEFAULT_TIMEOUT), Err(OracleError::Protocol(_))));

    assert!(matches!(
        LineOracle::open("/nonexistent/oracle-binary", DEFAULT_TIMEOUT),
        Err(OracleError::Unavailable(_))
    ));
}
