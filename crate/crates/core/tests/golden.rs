//! Pinned outputs of the replica streams. A change here means results
//! published with an earlier build can no longer be reproduced.

use polyurn::simulate::{run, run_replica, Schedule, SimConfig};
use polyurn::Hypergraph;

fn config() -> SimConfig {
    SimConfig {
        schedule: Schedule::Points { steps: vec![] },
        ..SimConfig::new(8, 42, 3, 1000)
    }
}

#[test]
fn cube_terminal_balls_are_pinned() {
    let results = run(&Hypergraph::cube(), &config()).unwrap();
    let balls: Vec<&[u64]> = results.iter().map(|r| r.terminal_balls.as_slice()).collect();
    assert_eq!(
        balls,
        [
            &[520, 1063, 531, 975, 1410, 39, 1254, 216][..],
            &[1297, 683, 562, 217, 454, 790, 819, 1186][..],
            &[1003, 577, 1233, 362, 336, 1005, 100, 1392][..],
        ]
    );
}

#[test]
fn replicas_do_not_depend_on_each_other() {
    let h = Hypergraph::cube();
    let all = run(&h, &config()).unwrap();
    let alone = run_replica(&h, &config(), 2).unwrap();
    assert_eq!(alone, all[2]);
    let more = run(&h, &SimConfig { replicas: 5, ..config() }).unwrap();
    assert_eq!(&more[..3], &all[..]);
}
