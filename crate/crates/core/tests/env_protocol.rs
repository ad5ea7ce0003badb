use std::io::{BufRead, BufReader, Cursor, Write};
use std::thread;

use cg_lab::engine::{cg_solve, cg_solve_with, CgConfig};
use cg_lab::env::{serve, EnvConfig, EpisodeSession, Reply};
use cg_lab::instances::{generate, Category, GenConfig, ProblemKind};
use cg_lab::selection::{ExternalPolicy, Strategy};
use cg_lab::state::StateSnapshot;
use cg_lab::Error;
use serde_json::{json, Value};

fn send(session: &mut EpisodeSession, msg: Value) -> Reply {
    session.handle_line(&msg.to_string()).0
}

/// Plays one episode with the greedy action and returns the rewards.
fn greedy_episode(session: &mut EpisodeSession, reset: Value) -> (Vec<f64>, Reply) {
    let mut reply = send(session, reset);
    assert!(reply.ok, "{reply:?}");
    let mut rewards = Vec::new();
    while reply.done == Some(false) {
        let state = reply.state.clone().flatten().unwrap();
        let k = state.meta.k.min(state.candidates.len());
        reply = send(session, json!({"cmd": "step", "action": (0..k).collect::<Vec<_>>()}));
        assert!(reply.ok, "{reply:?}");
        rewards.push(reply.reward.unwrap());
    }
    (rewards, reply)
}

#[test]
fn zero_weights_return_minus_steps() {
    let mut session = EpisodeSession::new(EnvConfig::default());
    for seed in 0..5 {
        let reset = json!({"cmd": "reset", "problem": "csp", "category": "easy", "seed": seed,
                           "reward": {"alpha": 0.0, "beta": 0.0}});
        let (rewards, last) = greedy_episode(&mut session, reset);
        let info = last.info.unwrap();
        assert_eq!(rewards.len(), info.steps);
        assert_eq!(info.steps + 1, info.iteration);
        assert!(!info.cap);
        assert_eq!(rewards.iter().sum::<f64>(), -(info.steps as f64));

        let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, seed)).unwrap();
        let run = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0).unwrap();
        assert_eq!(run.iterations, info.iteration);
        assert!((run.final_objective - info.obj).abs() < 1e-12);
    }
}

#[test]
fn default_reward_tracks_objective_drop() {
    let mut session = EpisodeSession::new(EnvConfig::default());
    let reset = json!({"cmd": "reset", "problem": "gcp", "category": "easy", "seed": 1});
    let first = send(&mut session, reset.clone());
    let obj0 = first.info.as_ref().unwrap().obj;
    let (rewards, last) = greedy_episode(&mut session, reset);
    let obj_final = last.info.unwrap().obj;
    let steps = rewards.len() as f64;
    // Σ rewards = -steps + α (obj0 - obj_T) / obj0 + diversity terms
    let base = -steps + 300.0 * (obj0 - obj_final) / obj0;
    let extra = rewards.iter().sum::<f64>() - base;
    assert!(extra >= -1e-9 && extra <= 0.02 * 10.0 * steps + 1e-9, "{extra}");
}

#[test]
fn same_actions_give_same_transcripts() {
    let transcript = || {
        let mut session = EpisodeSession::new(EnvConfig::default());
        let reset = json!({"cmd": "reset", "problem": "gcp", "category": "easy", "seed": 3});
        let mut lines = vec![serde_json::to_string(&send(&mut session, reset.clone())).unwrap()];
        let (_, _) = greedy_episode(&mut session, reset);
        let mut reply = send(&mut session, json!({"cmd": "reset", "problem": "gcp", "category": "easy", "seed": 3}));
        while reply.done == Some(false) {
            // index 0 plus the last k-1 candidates
            let n = reply.state.clone().flatten().unwrap().candidates.len();
            let k = 5.min(n);
            let action: Vec<usize> = std::iter::once(0).chain(n + 1 - k..n).collect();
            reply = send(&mut session, json!({"cmd": "step", "action": action}));
            lines.push(serde_json::to_string(&reply).unwrap());
        }
        lines
    };
    assert_eq!(transcript(), transcript());
}

#[test]
fn invalid_actions_are_rejected_with_reasons() {
    let mut session = EpisodeSession::new(EnvConfig::default());
    let reply = send(&mut session, json!({"cmd": "reset", "problem": "csp", "category": "easy", "seed": 0}));
    assert_eq!(reply.done, Some(false));
    for (action, reason) in [
        (json!([0, 1, 2]), "expected 5"),
        (json!([0, 1, 2, 3, 99]), "outside pool"),
        (json!([0, 1, 1, 2, 3]), "repeats"),
        (json!([1, 2, 3, 4, 5]), "forced index 0"),
    ] {
        let r = send(&mut session, json!({"cmd": "step", "action": action}));
        assert!(!r.ok);
        assert!(r.error.as_ref().unwrap().contains(reason), "{r:?}");
    }
    let r = send(&mut session, json!({"cmd": "step", "action": [0, 1, 2, 3, 4]}));
    assert!(r.ok);
}

#[test]
fn bad_reset_payloads_are_errors() {
    let mut session = EpisodeSession::new(EnvConfig::default());
    let r = send(&mut session, json!({"cmd": "reset", "problem": "tsp"}));
    assert!(!r.ok);
    let r = send(&mut session, json!({"cmd": "reset", "reward": {"alpha": -1.0}}));
    assert!(!r.ok && r.error.unwrap().contains("nonnegative"));
    let r = send(&mut session, json!({"cmd": "reset", "instance": {"kind": "gcp", "nodes": 2, "edges": [[0, 0]], "seed": 0}}));
    assert!(!r.ok);
}

#[test]
fn serve_answers_every_line() {
    let input = [
        json!({"cmd": "reset", "instance": {"kind": "csp", "roll_length": 10, "orders": [[3, 2], [5, 1]], "seed": 0}}).to_string(),
        "garbage".to_string(),
        String::new(),
        json!({"cmd": "close"}).to_string(),
        json!({"cmd": "reset"}).to_string(),
    ]
    .join("\n");
    let mut out = Vec::new();
    serve(Cursor::new(input), &mut out, EnvConfig::default()).unwrap();
    let replies: Vec<Value> = out.lines().map(|l| serde_json::from_str(&l.unwrap()).unwrap()).collect();
    assert_eq!(replies.len(), 3);
    assert_eq!(replies[0]["ok"], true);
    assert_eq!(replies[0]["done"], true);
    assert_eq!(replies[0]["state"], Value::Null);
    assert_eq!(replies[0]["info"]["steps"], 0);
    assert_eq!(replies[1]["ok"], false);
    assert_eq!(replies[2], json!({"ok": true}));
}

#[test]
fn external_policy_over_pipes_matches_greedy() {
    let (policy_in, mut engine_out) = std::io::pipe().unwrap();
    let (engine_in, mut policy_out) = std::io::pipe().unwrap();
    let mock = thread::spawn(move || {
        let mut served = 0;
        for line in BufReader::new(policy_in).lines() {
            let req: Value = serde_json::from_str(&line.unwrap()).unwrap();
            assert_eq!(req["cmd"], "select");
            let state: StateSnapshot = serde_json::from_value(req["state"].clone()).unwrap();
            let k = req["k"].as_u64().unwrap() as usize;
            let action: Vec<usize> = (0..k.min(state.candidates.len())).collect();
            writeln!(policy_out, "{}", json!({"action": action})).unwrap();
            served += 1;
        }
        served
    });
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 5)).unwrap();
    let mut policy = ExternalPolicy::new(BufReader::new(engine_in), &mut engine_out);
    let run = cg_solve_with(&inst, &mut policy, &CgConfig::default(), 0).unwrap();
    drop(policy);
    drop(engine_out);
    let served = mock.join().unwrap();
    let greedy = cg_solve(&inst, &Strategy::GreedyMulti, &CgConfig::default(), 0).unwrap();
    assert_eq!(run.strategy, "external");
    assert_eq!(run.iterations, greedy.iterations);
    assert_eq!(served, run.iterations - 1);
}

#[test]
fn external_policy_errors_abort_the_run() {
    let inst = generate(&GenConfig::category(ProblemKind::Csp, Category::Easy, 5)).unwrap();
    for reply in ["{\"action\":[0,0,1,2,3]}\n", "not json\n", "{\"action\":[0,1]}\n", ""] {
        let mut sink = Vec::new();
        let mut policy = ExternalPolicy::new(Cursor::new(reply.as_bytes()), &mut sink);
        let err = cg_solve_with(&inst, &mut policy, &CgConfig::default(), 0).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)), "{err}");
    }
}
