//! Plays one environment episode in-process with a random valid policy,
//! speaking the same JSON lines `cg-lab serve-env` does.

use cg_lab::env::{EnvConfig, EpisodeSession};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn main() {
    let mut session = EpisodeSession::new(EnvConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let reset = json!({"cmd": "reset", "problem": "csp", "category": "easy", "seed": 11});
    let (mut reply, _) = session.handle_line(&reset.to_string());
    let mut ret = 0.0;
    while reply.done == Some(false) {
        let state = reply.state.clone().flatten().expect("live episode has a state");
        let n = state.candidates.len();
        let k = state.meta.k.min(n);
        let mut action = vec![0];
        action.extend(sample(&mut rng, n - 1, k - 1).into_iter().map(|i| i + 1));
        action.sort_unstable();
        let (r, _) = session.handle_line(&json!({"cmd": "step", "action": action}).to_string());
        reply = r;
        let info = reply.info.as_ref().unwrap();
        let reward = reply.reward.unwrap();
        ret += reward;
        println!("step {:>3} action {action:?} reward {reward:>8.3} obj {:.4}", info.steps, info.obj);
    }
    let info = reply.info.unwrap();
    println!("done after {} steps ({} master solves), return {ret:.3}", info.steps, info.iteration);
    let (bye, _) = session.handle_line(r#"{"cmd":"close"}"#);
    println!("{}", serde_json::to_string(&bye).unwrap());
}
