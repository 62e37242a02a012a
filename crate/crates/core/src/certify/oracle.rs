//! Membership oracles and the `regrobust-oracle/1` line protocol.
//!
//! Every message is one JSON object per line. The client opens with
//! `{"protocol":"regrobust-oracle/1"}` and the server echoes it. Requests
//! are `{"id":N,"seq":["n/d",…]}` and answers `{"id":N,"label":0|1}`. A
//! server that cannot answer a line replies `{"id":N|null,"error":"…"}` and
//! keeps serving.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::automata::dra::{Dra, RunError};
use crate::rational::Rational;

pub const PROTOCOL: &str = "regrobust-oracle/1";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle unavailable: {0}")]
    Unavailable(String),
    #[error("oracle i/o: {0}")]
    Io(#[from] io::Error),
    #[error("oracle protocol violation: {0}")]
    Protocol(String),
    #[error("oracle reported an error: {0}")]
    Remote(String),
    #[error("no answer from the oracle within {0:?}")]
    Timeout(Duration),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// A binary classifier over rational sequences.
pub trait Oracle: Send {
    fn query(&mut self, seq: &[Rational]) -> Result<bool, OracleError>;
}

impl<O: Oracle + ?Sized> Oracle for Box<O> {
    fn query(&mut self, seq: &[Rational]) -> Result<bool, OracleError> {
        (**self).query(seq)
    }
}

/// An automaton used as the classifier.
#[derive(Clone, Debug)]
pub struct DraOracle(pub Dra);

impl Oracle for DraOracle {
    fn query(&mut self, seq: &[Rational]) -> Result<bool, OracleError> {
        Ok(self.0.accepts(seq)?)
    }
}

/// A closure used as the classifier.
pub struct FnOracle<F>(pub F);

impl<F: FnMut(&[Rational]) -> bool + Send> Oracle for FnOracle<F> {
    fn query(&mut self, seq: &[Rational]) -> Result<bool, OracleError> {
        Ok((self.0)(seq))
    }
}

/// Caches labels so repeated queries stay consistent and counts the
/// queries that reached the underlying oracle.
pub struct OracleHandle {
    inner: Box<dyn Oracle>,
    cache: HashMap<Vec<Rational>, bool>,
    queries: u64,
}

impl OracleHandle {
    pub fn new(oracle: impl Oracle + 'static) -> Self {
        OracleHandle {
            inner: Box::new(oracle),
            cache: HashMap::new(),
            queries: 0,
        }
    }

    pub fn from_dra(dra: Dra) -> Self {
        Self::new(DraOracle(dra))
    }

    pub fn label(&mut self, seq: &[Rational]) -> Result<bool, OracleError> {
        if let Some(&l) = self.cache.get(seq) {
            return Ok(l);
        }
        let l = self.inner.query(seq)?;
        self.queries += 1;
        self.cache.insert(seq.to_vec(), l);
        Ok(l)
    }

    /// Distinct sequences sent to the underlying oracle.
    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl std::fmt::Debug for OracleHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleHandle")
            .field("queries", &self.queries)
            .field("cached", &self.cache.len())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct Handshake {
    protocol: String,
}

#[derive(Serialize, Deserialize)]
struct Request {
    id: u64,
    seq: Vec<Rational>,
}

/// Client side of the protocol over any pair of byte streams.
pub struct LineOracle {
    writer: Box<dyn Write + Send>,
    lines: Receiver<io::Result<String>>,
    timeout: Duration,
    next_id: u64,
    child: Option<Child>,
}

impl LineOracle {
    /// Performs the handshake over `reader`/`writer`.
    pub fn connect(
        reader: impl Read + Send + 'static,
        writer: impl Write + Send + 'static,
        timeout: Duration,
    ) -> Result<Self, OracleError> {
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut o = LineOracle {
            writer: Box::new(writer),
            lines: rx,
            timeout,
            next_id: 0,
            child: None,
        };
        o.send(&Handshake {
            protocol: PROTOCOL.into(),
        })?;
        let reply: Value = o.receive()?;
        match reply.get("protocol").and_then(Value::as_str) {
            Some(PROTOCOL) => Ok(o),
            Some(other) => Err(OracleError::Protocol(format!(
                "server speaks `{other}`, expected `{PROTOCOL}`"
            ))),
            None => Err(OracleError::Protocol(format!("bad handshake reply: {reply}"))),
        }
    }

    /// Spawns `command` (whitespace separated) and talks over its stdio.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self, OracleError> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| OracleError::Unavailable("empty oracle command".into()))?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| OracleError::Unavailable(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        match Self::connect(stdout, stdin, timeout) {
            Ok(mut o) => {
                o.child = Some(child);
                Ok(o)
            }
            Err(e) => {
                let _ = child.kill();
                let _ = child.wait();
                Err(e)
            }
        }
    }

    /// Connects to `host:port`.
    pub fn tcp(addr: &str, timeout: Duration) -> Result<Self, OracleError> {
        let stream = TcpStream::connect(addr)
            .map_err(|e| OracleError::Unavailable(format!("{addr}: {e}")))?;
        let reader = stream.try_clone()?;
        Self::connect(reader, stream, timeout)
    }

    /// `tcp:HOST:PORT` connects over TCP; anything else is a command line.
    pub fn open(endpoint: &str, timeout: Duration) -> Result<Self, OracleError> {
        match endpoint.strip_prefix("tcp:") {
            Some(addr) => Self::tcp(addr, timeout),
            None => Self::spawn(endpoint, timeout),
        }
    }

    fn send<T: Serialize>(&mut self, msg: &T) -> Result<(), OracleError> {
        let mut line = serde_json::to_string(msg).expect("serializable");
        line.push('\n');
        self.writer.write_all(line.as_bytes())?;
        self.writer.flush()?;
        Ok(())
    }

    fn receive(&mut self) -> Result<Value, OracleError> {
        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(line) => line?,
            Err(RecvTimeoutError::Timeout) => return Err(OracleError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                return Err(OracleError::Unavailable("connection closed".into()))
            }
        };
        serde_json::from_str(&line)
            .map_err(|e| OracleError::Protocol(format!("unparsable line `{line}`: {e}")))
    }
}

impl Oracle for LineOracle {
    fn query(&mut self, seq: &[Rational]) -> Result<bool, OracleError> {
        let id = self.next_id;
        self.next_id += 1;
        self.send(&Request {
            id,
            seq: seq.to_vec(),
        })?;
        let reply = self.receive()?;
        if reply.get("id").and_then(Value::as_u64) != Some(id) {
            return Err(OracleError::Protocol(format!(
                "expected an answer to request {id}, got {reply}"
            )));
        }
        if let Some(e) = reply.get("error") {
            return Err(OracleError::Remote(e.to_string()));
        }
        match reply.get("label").and_then(Value::as_u64) {
            Some(0) => Ok(false),
            Some(1) => Ok(true),
            _ => Err(OracleError::Protocol(format!("label must be 0 or 1: {reply}"))),
        }
    }
}

impl Drop for LineOracle {
    fn drop(&mut self) {
        if let Some(child) = self.child.as_mut() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Counters kept by [`serve`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ServeStats {
    pub answered: u64,
    pub errors: u64,
}

fn error_line(id: Option<u64>, message: &str) -> String {
    serde_json::json!({ "id": id, "error": message }).to_string()
}

/// Answers one line. `greeted` tracks whether the handshake has happened.
fn answer(oracle: &mut dyn Oracle, line: &str, greeted: &mut bool) -> (String, bool) {
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return (error_line(None, &format!("malformed JSON: {e}")), false),
    };
    if let Some(p) = value.get("protocol") {
        if p.as_str() == Some(PROTOCOL) {
            *greeted = true;
            return (serde_json::json!({ "protocol": PROTOCOL }).to_string(), true);
        }
        return (error_line(None, &format!("unsupported protocol {p}")), false);
    }
    let id = value.get("id").and_then(Value::as_u64);
    if !*greeted {
        return (error_line(id, "handshake required"), false);
    }
    let req: Request = match serde_json::from_value(value) {
        Ok(r) => r,
        Err(e) => return (error_line(id, &format!("bad request: {e}")), false),
    };
    match oracle.query(&req.seq) {
        Ok(l) => (
            serde_json::json!({ "id": req.id, "label": u8::from(l) }).to_string(),
            true,
        ),
        Err(e) => (error_line(Some(req.id), &e.to_string()), false),
    }
}

/// Serves `oracle` until `input` ends. Malformed lines get an error reply.
pub fn serve(oracle: &mut dyn Oracle, input: impl BufRead, mut output: impl Write) -> io::Result<ServeStats> {
    let mut stats = ServeStats::default();
    let mut greeted = false;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (reply, ok) = answer(oracle, &line, &mut greeted);
        if ok {
            stats.answered += 1;
        } else {
            stats.errors += 1;
        }
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(stats)
}

/// Accepts connections forever, one thread per connection, each with its
/// own copy of the automaton.
pub fn serve_tcp(dra: &Dra, listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let mut oracle = DraOracle(dra.clone());
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(r) => BufReader::new(r),
                Err(_) => return,
            };
            let _ = serve(&mut oracle, reader, stream);
        });
    }
    Ok(())
}
