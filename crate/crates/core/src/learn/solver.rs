//! A line-oriented SMT-LIB v2 solver process and a reader for the
//! s-expressions it answers with.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Instant;

use crate::rational::Rational;

/// Default solver invocation; overridden by `REGROBUST_SOLVER`.
pub const DEFAULT_SOLVER: &str = "z3 -in -smt2";

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("empty solver command")]
    EmptyCommand,
    #[error("cannot start solver `{command}`: {source}")]
    Spawn { command: String, source: std::io::Error },
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver exited unexpectedly")]
    Closed,
    #[error("solver deadline passed")]
    Timeout,
    #[error("solver reported: {0}")]
    Reported(String),
    #[error("unreadable solver output: {0}")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCommand {
    pub fn parse(text: &str) -> Result<Self, SolverError> {
        let mut parts = text.split_whitespace().map(str::to_string);
        let program = parts.next().ok_or(SolverError::EmptyCommand)?;
        Ok(SolverCommand { program, args: parts.collect() })
    }

    /// `REGROBUST_SOLVER` if set, else [`DEFAULT_SOLVER`].
    pub fn from_env() -> Result<Self, SolverError> {
        match std::env::var("REGROBUST_SOLVER") {
            Ok(s) if !s.trim().is_empty() => Self::parse(&s),
            _ => Self::parse(DEFAULT_SOLVER),
        }
    }
}

impl std::fmt::Display for SolverCommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.program)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

pub struct SolverProcess {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckSat {
    Sat,
    Unsat,
    Unknown,
}

impl SolverProcess {
    pub fn spawn(cmd: &SolverCommand) -> Result<Self, SolverError> {
        let mut child = Command::new(&cmd.program)
            .args(&cmd.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SolverError::Spawn { command: cmd.to_string(), source })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(SolverProcess { child, stdin, lines: rx })
    }

    pub fn send(&mut self, text: &str) -> Result<(), SolverError> {
        self.stdin.write_all(text.as_bytes())?;
        self.stdin.write_all(b"\n")?;
        self.stdin.flush()?;
        Ok(())
    }

    /// Reads one complete s-expression or atom.
    pub fn read(&mut self, deadline: Instant) -> Result<Sexp, SolverError> {
        let mut buf = String::new();
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    buf.push_str(&line);
                    buf.push('\n');
                    if balanced(&buf) && !buf.trim().is_empty() {
                        return Sexp::parse(&buf);
                    }
                }
                Err(RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(SolverError::Timeout);
                }
                Err(RecvTimeoutError::Disconnected) => return Err(SolverError::Closed),
            }
        }
    }

    pub fn check_sat(&mut self, deadline: Instant) -> Result<CheckSat, SolverError> {
        self.send("(check-sat)")?;
        match self.read(deadline)? {
            Sexp::Atom(a) if a == "sat" => Ok(CheckSat::Sat),
            Sexp::Atom(a) if a == "unsat" => Ok(CheckSat::Unsat),
            Sexp::Atom(a) if a == "unknown" => Ok(CheckSat::Unknown),
            other => Err(SolverError::Reported(other.to_string())),
        }
    }

    /// Values of the named constants, in the order requested.
    pub fn get_values(&mut self, names: &[String], deadline: Instant) -> Result<Vec<(String, Sexp)>, SolverError> {
        if names.is_empty() {
            return Ok(Vec::new());
        }
        self.send(&format!("(get-value ({}))", names.join(" ")))?;
        let reply = self.read(deadline)?;
        let Sexp::List(items) = reply else { return Err(SolverError::Reported(reply.to_string())) };
        if items.first().is_some_and(|x| *x == Sexp::Atom("error".into())) {
            return Err(SolverError::Reported(Sexp::List(items).to_string()));
        }
        items
            .into_iter()
            .map(|it| match it {
                Sexp::List(mut pair) if pair.len() == 2 => {
                    let v = pair.pop().expect("two items");
                    match pair.pop().expect("two items") {
                        Sexp::Atom(n) => Ok((n, v)),
                        other => Err(SolverError::Syntax(other.to_string())),
                    }
                }
                other => Err(SolverError::Syntax(other.to_string())),
            })
            .collect()
    }
}

impl Drop for SolverProcess {
    fn drop(&mut self) {
        let _ = self.send("(exit)");
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i64;
    let mut in_str = false;
    for ch in s.chars() {
        match ch {
            '"' => in_str = !in_str,
            '(' if !in_str => depth += 1,
            ')' if !in_str => depth -= 1,
            _ => {}
        }
    }
    depth <= 0 && !in_str
}

/// Atoms keep their text so numerals stay exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn parse(text: &str) -> Result<Sexp, SolverError> {
        let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
        let mut chars = text.chars().peekable();
        while let Some(&ch) = chars.peek() {
            match ch {
                '(' => {
                    chars.next();
                    stack.push(Vec::new());
                }
                ')' => {
                    chars.next();
                    let done = stack.pop().ok_or_else(|| SolverError::Syntax(text.into()))?;
                    stack.last_mut().ok_or_else(|| SolverError::Syntax(text.into()))?.push(Sexp::List(done));
                }
                c if c.is_whitespace() => {
                    chars.next();
                }
                '"' => {
                    let mut s = String::from('"');
                    chars.next();
                    for c in chars.by_ref() {
                        s.push(c);
                        if c == '"' {
                            break;
                        }
                    }
                    stack.last_mut().expect("root").push(Sexp::Atom(s));
                }
                _ => {
                    let mut s = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || c == '(' || c == ')' {
                            break;
                        }
                        s.push(c);
                        chars.next();
                    }
                    stack.last_mut().expect("root").push(Sexp::Atom(s));
                }
            }
        }
        if stack.len() != 1 {
            return Err(SolverError::Syntax(text.into()));
        }
        let mut top = stack.pop().expect("root");
        if top.len() != 1 {
            return Err(SolverError::Syntax(text.into()));
        }
        Ok(top.pop().expect("one item"))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Sexp::Atom(a) if a == "true" => Some(true),
            Sexp::Atom(a) if a == "false" => Some(false),
            _ => None,
        }
    }

    /// Evaluates a real-valued term built from numerals, `-`, `+`, `*` and `/`.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(items) => {
                let (Sexp::Atom(op), args) = items.split_first()? else { return None };
                let vals: Option<Vec<Rational>> = args.iter().map(Sexp::as_rational).collect();
                let vals = vals?;
                match (op.as_str(), vals.as_slice()) {
                    ("-", [x]) => Some(-x),
                    ("-", [x, rest @ ..]) => Some(rest.iter().fold(x.clone(), |acc, y| &acc - y)),
                    ("+", _) => Some(vals.iter().cloned().sum()),
                    ("*", [x, rest @ ..]) => Some(rest.iter().fold(x.clone(), |acc, y| &acc * y)),
                    ("/", [x, y]) if !y.is_zero() => Some(x * &y.recip()),
                    _ => None,
                }
            }
        }
    }
}

impl std::fmt::Display for Sexp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A rational as an SMT-LIB real term.
pub fn real_literal(r: &Rational) -> String {
    let mag = |n: String| format!("{n}.0");
    let num = r.numer();
    let den = r.denom();
    let abs = if num < 0.into() { -num.clone() } else { num.clone() };
    let body = if den == 1.into() { mag(abs.to_string()) } else { format!("(/ {} {})", mag(abs.to_string()), mag(den.to_string())) };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}
