mod common;

use common::roaming;
use proptest::prelude::*;
use tvc::geometry::Point;
use tvc::model::presets::{document, LocalPlacement, Model};
use tvc::model::{state_probabilities, OnOffPolicy};
use tvc::simulator::{generate_trace, NodeMobility, NodeTrack, RunSpec, Sample, Trace, TraceMeta};
use tvc::stats::{
    contact_report, contacts, empirical_hitting_time, empirical_node_degree, first_meeting, ingest_contacts_csv, ingest_csv,
    reappearance_curve, visiting_preference, Ecdf, ReappearanceEstimator,
};
use tvc::Error;

/// Nodes given as per-sample (x, y, on) lists on a common grid.
fn trace(dt: f64, nodes: Vec<Vec<(f64, f64, bool)>>) -> Trace {
    let len = nodes[0].len();
    Trace {
        meta: TraceMeta { seed: None, duration: dt * (len - 1) as f64, dt, profile_digest: None },
        nodes: nodes
            .into_iter()
            .enumerate()
            .map(|(i, s)| NodeTrack {
                id: format!("n{i}"),
                samples: s.into_iter().enumerate().map(|(k, (x, y, on))| Sample { t: k as f64 * dt, x, y, on }).collect(),
                ..Default::default()
            })
            .collect(),
    }
}

fn still(x: f64, y: f64, len: usize) -> Vec<(f64, f64, bool)> {
    vec![(x, y, true); len]
}

#[test]
fn ingest_errors() {
    match ingest_csv("".as_bytes()).unwrap_err() {
        Error::Parse { line, message } => assert_eq!((line, message.as_str()), (1, "missing header")),
        other => panic!("{other}"),
    }
    let shuffled = "t,node,x,y,on\n0,a,1,1,1\n2,a,1,1,1\n1,a,1,1,1\n";
    match ingest_csv(shuffled.as_bytes()).unwrap_err() {
        Error::NonMonotoneTime { line, node } => assert_eq!((line, node.as_str()), (4, "a")),
        other => panic!("{other}"),
    }
    assert!(matches!(ingest_csv("t,x\n".as_bytes()).unwrap_err(), Error::Parse { line: 1, .. }));
    assert!(matches!(ingest_csv("t,node,x,y,on\n0,a,1,oops,1\n".as_bytes()).unwrap_err(), Error::Parse { line: 2, .. }));
    assert!(matches!(ingest_csv("t,node,x,y,on\n0,a,1,1,2\n".as_bytes()).unwrap_err(), Error::Parse { line: 2, .. }));
}

#[test]
fn ingest_interleaved_nodes() {
    let t = ingest_csv("t,node,x,y,on\n0,a,1,1,1\n0,b,2,2,0\n0.5,a,1.5,1,1\n0.5,b,2,2,1\n".as_bytes()).unwrap();
    assert_eq!(t.node_count(), 2);
    assert_eq!(t.dt(), 0.5);
    assert_eq!(t.nodes[1].samples[0], Sample { t: 0.0, x: 2.0, y: 2.0, on: false });
}

#[test]
fn static_pair_in_range_is_one_long_contact() {
    let tr = trace(1.0, vec![still(0.0, 0.0, 100), still(9.0, 0.0, 100)]);
    let r = contacts(&tr, 10.0).unwrap();
    assert_eq!(r.events.len(), 1);
    assert_eq!((r.events[0].start, r.events[0].end), (0.0, 100.0));
    assert!(r.inter_meetings.is_empty());
    assert_eq!(empirical_node_degree(&tr, 10.0).unwrap(), vec![1.0, 1.0]);
}

#[test]
fn contact_threshold_is_closed() {
    let tr = trace(1.0, vec![still(0.0, 0.0, 5), still(10.0, 0.0, 5)]);
    assert_eq!(contacts(&tr, 10.0).unwrap().events.len(), 1);
    assert_eq!(contacts(&tr, 9.999).unwrap().events.len(), 0);
}

#[test]
fn periodic_encounters() {
    // in range for 10 s out of every 100 s
    let moving: Vec<(f64, f64, bool)> = (0..1000).map(|k| if k % 100 < 10 { (5.0, 0.0, true) } else { (500.0, 0.0, true) }).collect();
    let tr = trace(1.0, vec![still(0.0, 0.0, 1000), moving]);
    let r = contacts(&tr, 10.0).unwrap();
    assert_eq!(r.events.len(), 10);
    assert!(r.durations.values.iter().all(|d| *d == 10.0));
    assert_eq!(r.inter_meetings.values, vec![90.0]);
    assert_eq!(r.inter_meetings.cdf, vec![1.0]);
    for w in r.events.windows(2) {
        assert_eq!(w[1].start - w[0].end, 90.0);
    }
}

#[test]
fn contacts_need_both_nodes_on() {
    let off: Vec<(f64, f64, bool)> = (0..10).map(|k| (1.0, 0.0, k < 3)).collect();
    let tr = trace(1.0, vec![still(0.0, 0.0, 10), off]);
    let r = contacts(&tr, 10.0).unwrap();
    assert_eq!((r.events[0].start, r.events[0].end), (0.0, 3.0));
    let deg = empirical_node_degree(&tr, 10.0).unwrap();
    assert_eq!(deg, vec![0.3, 1.0]);
}

#[test]
fn contact_log_ingestion() {
    let log = "a,b,start_s,end_s\nx,y,0,10\nx,y,50,55\ny,x,100,130\nx,z,5,6\n";
    let events = ingest_contacts_csv(log.as_bytes()).unwrap();
    let r = contact_report(events);
    assert_eq!(r.events.len(), 4);
    assert_eq!(r.inter_meetings.values, vec![40.0, 45.0]);
    assert!(matches!(ingest_contacts_csv("".as_bytes()).unwrap_err(), Error::Parse { line: 1, .. }));
    assert!(ingest_contacts_csv("a,b,start_s,end_s\nx,y,5,5\n".as_bytes()).is_err());
}

#[test]
fn contact_bookkeeping_on_generated_traces() {
    let profiles = Model::table(2).unwrap().two_group(3).instantiate(0).unwrap();
    let run = RunSpec::new(31, 20_000.0, 1.0, profiles).unwrap();
    let tr = generate_trace(&run).unwrap();
    let r = contacts(&tr, 30.0).unwrap();
    let span = tr.dt() * tr.len() as f64;
    for (i, a) in tr.nodes.iter().enumerate() {
        for b in &tr.nodes[i + 1..] {
            let pair: Vec<_> = r.events.iter().filter(|e| e.a == a.id && e.b == b.id).collect();
            if pair.is_empty() {
                continue;
            }
            for w in pair.windows(2) {
                assert!(w[0].end < w[1].start);
            }
            let busy: f64 = pair.iter().map(|e| e.duration()).sum();
            let gaps: f64 = pair.windows(2).map(|w| w[1].start - w[0].end).sum();
            let slack = pair[0].start + (span - pair.last().unwrap().end);
            assert!((busy + gaps + slack - span).abs() < 1e-6);
        }
    }

    // relabelling nodes permutes the per-node results only
    let mut shuffled = tr.clone();
    shuffled.nodes.reverse();
    let mut d1 = empirical_node_degree(&tr, 30.0).unwrap();
    let d2 = empirical_node_degree(&shuffled, 30.0).unwrap();
    d1.reverse();
    assert_eq!(d1, d2);
    assert_eq!(contacts(&shuffled, 30.0).unwrap().events.len(), r.events.len());
}

#[test]
fn degree_is_stable_under_finer_sampling() {
    let profiles = Model::table(1).unwrap().two_group(10).instantiate(0).unwrap();
    let coarse = generate_trace(&RunSpec::new(3, 30_000.0, 1.0, profiles.clone()).unwrap()).unwrap();
    let fine = generate_trace(&RunSpec::new(3, 30_000.0, 0.5, profiles).unwrap()).unwrap();
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let a = mean(empirical_node_degree(&coarse, 20.0).unwrap());
    let b = mean(empirical_node_degree(&fine, 20.0).unwrap());
    assert!((a - b).abs() / a < 0.01, "{a} vs {b}");
}

#[test]
fn visiting_preference_examples() {
    let mut samples = Vec::new();
    samples.extend(std::iter::repeat_n((50.0, 50.0, true), 60));
    samples.extend(std::iter::repeat_n((150.0, 50.0, true), 30));
    samples.extend(std::iter::repeat_n((250.0, 50.0, true), 10));
    let off = vec![(0.0, 0.0, false); 100];
    let pref = visiting_preference(&trace(1.0, vec![samples, off]), 100.0).unwrap();
    assert_eq!(pref.nodes[0].fractions, vec![0.6, 0.3, 0.1]);
    assert!(pref.nodes[1].empty && pref.nodes[1].fractions.is_empty());
    assert_eq!(pref.mean, vec![0.6, 0.3, 0.1]);
    assert_eq!(pref.to_csv(), "rank,fraction\n1,0.6\n2,0.3\n3,0.1\n");
}

#[test]
fn top_cell_share_follows_the_occupancy() {
    let m = Model::table(1).unwrap();
    let t = m.template("w", Some(4), LocalPlacement::Corner(Point::new(500.0, 500.0)), OnOffPolicy::AlwaysOn);
    let profiles = document(vec![t]).instantiate(0).unwrap();
    let p = &profiles[0];
    // local share plus the roaming and transit time that lands in the same cell
    let cycle = p.cycle_duration();
    let predicted: f64 = (0..p.schedule.len())
        .map(|t| {
            let sp = state_probabilities(p, t);
            p.schedule[t].duration / cycle * (sp.p_state(0) + (sp.p_state(1) + sp.p_tr) * 0.01)
        })
        .sum();
    let run = RunSpec::new(17, 30.0 * cycle, 1.0, profiles).unwrap();
    let pref = visiting_preference(&generate_trace(&run).unwrap(), 100.0).unwrap();
    let top = pref.mean[0];
    assert!((top - predicted).abs() / predicted <= 0.10, "{top} vs {predicted}");
    for n in &pref.nodes {
        assert!((n.fractions.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(n.fractions.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn reappearance_examples() {
    let tr = trace(10.0, vec![still(5.0, 5.0, 50)]);
    let c = reappearance_curve(&tr, 100.0, &[10.0, 100.0, 250.0], ReappearanceEstimator::Conditional).unwrap();
    assert!(c.points.iter().all(|p| p.probability == 1.0));

    // daily samples alternating between two cells
    let day = 86_400.0;
    let alt: Vec<(f64, f64, bool)> = (0..30).map(|k| if k % 2 == 0 { (50.0, 50.0, true) } else { (150.0, 50.0, true) }).collect();
    let tr = trace(day, vec![alt]);
    let c = reappearance_curve(&tr, 100.0, &[day, 2.0 * day, 3.0 * day, 4.0 * day], ReappearanceEstimator::Conditional).unwrap();
    let probs: Vec<f64> = c.points.iter().map(|p| p.probability).collect();
    assert_eq!(probs, vec![0.0, 1.0, 0.0, 1.0]);
    assert_eq!(c.to_csv().lines().nth(2), Some("48,1"));

    assert!(reappearance_curve(&tr, 100.0, &[40.0 * day], ReappearanceEstimator::Joint).is_err());
}

#[test]
fn joint_estimator_counts_off_pairs() {
    let s: Vec<(f64, f64, bool)> = (0..10).map(|k| (5.0, 5.0, k % 2 == 0)).collect();
    let tr = trace(1.0, vec![s]);
    let cond = reappearance_curve(&tr, 100.0, &[2.0], ReappearanceEstimator::Conditional).unwrap();
    let joint = reappearance_curve(&tr, 100.0, &[2.0], ReappearanceEstimator::Joint).unwrap();
    assert_eq!(cond.points[0].probability, 1.0);
    assert_eq!(joint.points[0].probability, 0.5);
}

#[test]
fn ecdf_basics() {
    let e = Ecdf::new(&[3.0, 1.0, 2.0, 2.0]);
    assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    assert_eq!(e.cdf, vec![0.25, 0.75, 1.0]);
    assert_eq!(e.eval(0.5), 0.0);
    assert_eq!(e.eval(2.0), 0.75);
    assert_eq!(e.eval(10.0), 1.0);
    assert!(e.to_csv().starts_with("value,cdf\n"));
}

proptest! {
    #[test]
    fn ecdf_is_a_distribution_function(xs in proptest::collection::vec(-1e3f64..1e3, 1..200), probe in -2e3f64..2e3) {
        let e = Ecdf::new(&xs);
        prop_assert!(e.cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(*e.cdf.last().unwrap(), 1.0);
        // right-continuous: the value at a sample includes it
        let below = xs.iter().filter(|x| **x <= probe).count() as f64 / xs.len() as f64;
        prop_assert_eq!(e.eval(probe), below);
    }
}

#[test]
fn roaming_hitting_time_by_simulation() {
    let p = roaming("r", 500.0, 0.0, (10.0, 10.0));
    let mc = empirical_hitting_time(&p, 10.0, 4000, 2, 1e7).unwrap();
    assert_eq!(mc.timeouts, 0);
    assert!((mc.mean - 5000.0).abs() <= 3.0 * mc.stderr + 0.02 * 5000.0, "{} ± {}", mc.mean, mc.stderr);
}

#[test]
fn huge_range_hits_immediately() {
    let p = Model::table(3).unwrap().single().instantiate(0).unwrap().remove(0);
    let mc = empirical_hitting_time(&p, 1500.0, 100, 1, 1e7).unwrap();
    assert_eq!(mc.mean, 0.0);
}

#[test]
fn timeouts_are_counted_and_excluded() {
    let p = roaming("r", 500.0, 0.0, (10.0, 10.0));
    let mc = empirical_hitting_time(&p, 1.0, 50, 1, 5.0).unwrap();
    assert!(mc.timeouts > 40);
    assert_eq!(mc.iterations + mc.timeouts, 50);
    assert!(mc.samples.iter().all(|s| *s <= 5.0));
}

#[test]
fn identical_paths_meet_at_once() {
    let p = Model::table(1).unwrap().single().instantiate(0).unwrap().remove(0);
    let a = NodeMobility::new(&p, 4, 0);
    assert_eq!(first_meeting(a.clone(), a, 10.0, 1e6), Some(0.0));
}
