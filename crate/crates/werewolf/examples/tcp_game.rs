//! A full game over TCP.
//!
//! The server listens on a local port and seats five connections in
//! arrival order; each client thread runs a template-only policy through
//! the newline-delimited JSON protocol. The game loop is the same one
//! in-process tournaments use.
//!
//! ```bash
//! cargo run --example tcp_game
//! ```

use std::net::{TcpListener, TcpStream};
use std::sync::Arc;

use werewolf::agents::PolicyAgent;
use werewolf::game::AgentId;
use werewolf::protocol::tcp::{accept_agents, run_client};
use werewolf::protocol::{run_game, Agent, GameConfig};
use werewolf::rules::RuleConfig;
use werewolf::utterance::UtteranceEngine;

fn main() {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind a local port");
    let addr = listener.local_addr().unwrap();
    println!("Server listening on {addr}");

    let seed = 17u64;
    let utterances = Arc::new(UtteranceEngine::builtin());
    // Connect in seat order (the server seats connections as they
    // arrive), then let each client thread play its policy.
    let clients: Vec<std::thread::JoinHandle<()>> = AgentId::all()
        .into_iter()
        .map(|id| {
            let stream = TcpStream::connect(addr).expect("connect");
            let utterances = Arc::clone(&utterances);
            std::thread::spawn(move || {
                let mut policy = PolicyAgent::template_only(
                    id,
                    seed ^ id.index() as u64,
                    utterances.clone(),
                    utterances.personas().plain().clone(),
                    RuleConfig::default(),
                );
                run_client(stream, &mut policy).expect("client io");
            })
        })
        .collect();

    let handles = accept_agents(&listener, 5_000).expect("five connections");
    let mut agents: Vec<Box<dyn Agent>> = handles
        .into_iter()
        .map(|h| Box::new(h) as Box<dyn Agent>)
        .collect();
    let outcome = run_game(seed, None, &mut agents, &GameConfig::default()).expect("game runs");

    for client in clients {
        client.join().expect("client thread");
    }

    println!("Winner: {} after {} day(s)", outcome.winner, outcome.days);
    println!("Talk entries logged: {}", outcome.log.talks().len());
}
