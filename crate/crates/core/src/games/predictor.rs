//! Models that turn feature rows into real-valued predictions.

use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PREDICTOR_TIMEOUT: Duration = Duration::from_secs(60);

/// Batch prediction. Output order and length match `rows`.
pub trait Predictor: Send {
    fn predict(&mut self, rows: &[Vec<f64>]) -> Result<Vec<f64>>;
}

/// `w · x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPredictor {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Predictor for LinearPredictor {
    fn predict(&mut self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter()
            .map(|r| {
                if r.len() != self.weights.len() {
                    return Err(Error::Predictor(format!(
                        "row has {} features, model expects {}",
                        r.len(),
                        self.weights.len()
                    )));
                }
                Ok(self.bias + r.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>())
            })
            .collect()
    }
}

/// Adapts a per-row closure.
pub struct FnPredictor<F>(pub F);

impl<F: FnMut(&[f64]) -> f64 + Send> Predictor for FnPredictor<F> {
    fn predict(&mut self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        Ok(rows.iter().map(|r| (self.0)(r)).collect())
    }
}

#[derive(Serialize)]
struct Request<'a> {
    rows: &'a [Vec<f64>],
}

#[derive(Deserialize)]
struct Response {
    preds: Vec<f64>,
}

/// Subprocess speaking newline-delimited JSON on stdin/stdout.
///
/// Each batch is one request line `{"rows": [[...], ...]}` answered by one
/// line `{"preds": [...]}`. Anything the process writes to stderr is kept
/// for error messages.
pub struct ExternalPredictor {
    command: String,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    stderr: Arc<Mutex<String>>,
    timeout: Duration,
    responses: u64,
}

impl ExternalPredictor {
    /// `argv[0]` is the program, the rest its arguments.
    pub fn spawn<S: AsRef<str>>(argv: &[S]) -> Result<Self> {
        let (prog, args) = argv
            .split_first()
            .ok_or_else(|| Error::invalid("empty predictor command"))?;
        let command = argv.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        let mut child = Command::new(prog.as_ref())
            .args(args.iter().map(AsRef::as_ref))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Predictor(format!("cannot start `{command}`: {e}")))?;

        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });

        let stderr = Arc::new(Mutex::new(String::new()));
        let mut err_pipe = child.stderr.take().expect("stderr is piped");
        let sink = Arc::clone(&stderr);
        thread::spawn(move || {
            let mut buf = String::new();
            let _ = err_pipe.read_to_string(&mut buf);
            sink.lock().unwrap().push_str(&buf);
        });

        Ok(ExternalPredictor {
            command,
            stdin: child.stdin.take(),
            child,
            lines,
            stderr,
            timeout: DEFAULT_PREDICTOR_TIMEOUT,
            responses: 0,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    fn failure(&mut self, what: String) -> Error {
        let _ = self.child.kill();
        let status = self.child.wait().map(|s| s.to_string()).unwrap_or_default();
        // Give the stderr reader a moment to drain after the process exits.
        thread::sleep(Duration::from_millis(20));
        let stderr = self.stderr.lock().unwrap().trim().to_string();
        let mut msg = format!("`{}`: {what}", self.command);
        if !status.is_empty() {
            msg.push_str(&format!(" ({status})"));
        }
        if !stderr.is_empty() {
            msg.push_str(&format!("; stderr: {stderr}"));
        }
        Error::Predictor(msg)
    }
}

impl Predictor for ExternalPredictor {
    fn predict(&mut self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut line = serde_json::to_string(&Request { rows })?;
        line.push('\n');
        let sent = match self.stdin.as_mut() {
            Some(stdin) => stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()),
            None => Err(std::io::ErrorKind::BrokenPipe.into()),
        };
        if let Err(e) = sent {
            return Err(self.failure(format!("writing request failed: {e}")));
        }
        let reply = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(reply)) => reply,
            Ok(Err(e)) => return Err(self.failure(format!("reading response failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(self.failure(format!("no response within {:?}", self.timeout)))
            }
            Err(RecvTimeoutError::Disconnected) => return Err(self.failure("process closed its output".into())),
        };
        self.responses += 1;
        let n = self.responses;
        let parsed: Response = serde_json::from_str(&reply)
            .map_err(|e| Error::Predictor(format!("`{}`: response line {n}: {e}", self.command)))?;
        if parsed.preds.len() != rows.len() {
            return Err(Error::Predictor(format!(
                "`{}`: response line {n}: {} predictions for {} rows",
                self.command,
                parsed.preds.len(),
                rows.len()
            )));
        }
        Ok(parsed.preds)
    }
}

impl Drop for ExternalPredictor {
    fn drop(&mut self) {
        // Closing stdin lets a well-behaved predictor exit on its own.
        drop(self.stdin.take());
        if !matches!(self.child.try_wait(), Ok(Some(_))) {
            let _ = self.child.kill();
            let _ = self.child.wait();
        }
    }
}
