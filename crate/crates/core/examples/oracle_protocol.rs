//! Serve an automaton over TCP with the line protocol and query it as a
//! remote classifier. The same client also drives any process that speaks
//! the protocol on stdin/stdout, for example `regrobust oracle --benchmark S9`.
//!
//! `cargo run --example oracle_protocol`

use std::net::TcpListener;
use std::thread;

use regrobust::bench::{ground_truth, BenchmarkId};
use regrobust::certify::{serve_tcp, LineOracle, OracleHandle, DEFAULT_TIMEOUT, PROTOCOL};
use regrobust::rational::ints;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let dra = ground_truth(BenchmarkId::S9);
    thread::spawn(move || serve_tcp(&dra, listener));

    println!("speaking {PROTOCOL} with {addr}");
    let mut remote = OracleHandle::new(LineOracle::open(&format!("tcp:{addr}"), DEFAULT_TIMEOUT)?);
    for seq in [ints(&[0, -1, 5, 3, 7, 9, 6, 8]), ints(&[0, -1, 5, 3, 7, 9, 6, 2]), ints(&[0, -1, 5, 3, 7, 9, 6, 8])] {
        println!("{seq:?} -> {}", remote.label(&seq)?);
    }
    println!("queries sent: {}", remote.queries());
    Ok(())
}
