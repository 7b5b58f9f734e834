//! On-disk persistence: `log.jsonl` holds one [`LogEntry`] per line and is
//! only ever appended to; `snapshot.json` is rewritten every
//! `snapshot_every` events so that recovery can skip validating old events.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{ReviewError, Result};
use crate::state::{LogEntry, ReviewState, Snapshot};

pub const LOG_FILE: &str = "log.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    log: File,
    snapshot_every: u64,
}

impl Store {
    /// Opens (creating if needed) the store in `dir` and recovers the state
    /// by replaying the log over `base`. A torn final line left by a crash
    /// is cut off; any other unreadable line is an error.
    pub fn open(dir: &Path, base: &ReviewState, snapshot_every: u64) -> Result<(Store, ReviewState)> {
        fs::create_dir_all(dir).map_err(|e| ReviewError::io(dir, e))?;
        let path = dir.join(LOG_FILE);
        let mut log = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(&path)
            .map_err(|e| ReviewError::io(&path, e))?;
        let (entries, good_len) = read_log(&path, &log)?;
        let file_len = log.metadata().map_err(|e| ReviewError::io(&path, e))?.len();
        if good_len < file_len {
            log::warn!("{}: dropping {} bytes of a partially written entry", path.display(), file_len - good_len);
            log.set_len(good_len).map_err(|e| ReviewError::io(&path, e))?;
            log.seek(SeekFrom::End(0)).map_err(|e| ReviewError::io(&path, e))?;
        }
        let state = match load_snapshot(dir)? {
            Some(snap) if snap.version as usize <= entries.len() && snap.version > 0 => {
                let rest = entries[snap.version as usize..].to_vec();
                let mut head = entries;
                head.truncate(snap.version as usize);
                let mut state = base.restore(head, snap);
                replay_onto(&mut state, &rest, &path)?;
                state
            }
            _ => {
                let mut state = base.rebased();
                replay_onto(&mut state, &entries, &path)?;
                state
            }
        };
        let store = Store {
            dir: dir.to_path_buf(),
            log,
            snapshot_every: snapshot_every.max(1),
        };
        Ok((store, state))
    }

    /// Durably appends the newest entry of `state`, and takes a snapshot when
    /// the version reaches a multiple of `snapshot_every`.
    pub fn record(&mut self, state: &ReviewState) -> Result<()> {
        let Some(entry) = state.log().last() else { return Ok(()) };
        let path = self.dir.join(LOG_FILE);
        let mut line = serde_json::to_vec(entry).map_err(|e| ReviewError::io(&path, e))?;
        line.push(b'\n');
        self.log.write_all(&line).map_err(|e| ReviewError::io(&path, e))?;
        self.log.sync_data().map_err(|e| ReviewError::io(&path, e))?;
        if state.version() % self.snapshot_every == 0 {
            self.write_snapshot(state)?;
        }
        Ok(())
    }

    pub fn write_snapshot(&self, state: &ReviewState) -> Result<()> {
        let path = self.dir.join(SNAPSHOT_FILE);
        let tmp = self.dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        let body = serde_json::to_vec(&state.snapshot()).map_err(|e| ReviewError::io(&tmp, e))?;
        let mut file = File::create(&tmp).map_err(|e| ReviewError::io(&tmp, e))?;
        file.write_all(&body).and_then(|_| file.sync_all()).map_err(|e| ReviewError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| ReviewError::io(&path, e))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Parsed entries plus the byte length of the well-formed prefix.
fn read_log(path: &Path, file: &File) -> Result<(Vec<LogEntry>, u64)> {
    let mut reader = BufReader::new(file);
    reader.seek(SeekFrom::Start(0)).map_err(|e| ReviewError::io(path, e))?;
    let mut entries = Vec::new();
    let mut good = 0u64;
    let mut buf = String::new();
    for line_no in 1.. {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(|e| ReviewError::io(path, e))?;
        if n == 0 {
            break;
        }
        let complete = buf.ends_with('\n');
        if buf.trim().is_empty() {
            good += n as u64;
            continue;
        }
        match serde_json::from_str::<LogEntry>(buf.trim_end()) {
            Ok(entry) if complete => {
                entries.push(entry);
                good += n as u64;
            }
            // torn write: only the unterminated last line may be dropped
            _ if !complete => break,
            Ok(_) => unreachable!(),
            Err(e) => {
                return Err(ReviewError::CorruptLog {
                    path: path.to_path_buf(),
                    line: line_no,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok((entries, good))
}

fn load_snapshot(dir: &Path) -> Result<Option<Snapshot>> {
    let path = dir.join(SNAPSHOT_FILE);
    match fs::read(&path) {
        Ok(bytes) => match serde_json::from_slice(&bytes) {
            Ok(snap) => Ok(Some(snap)),
            Err(e) => {
                log::warn!("{}: ignoring unreadable snapshot: {e}", path.display());
                Ok(None)
            }
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(ReviewError::io(&path, e)),
    }
}

fn replay_onto(state: &mut ReviewState, entries: &[LogEntry], path: &Path) -> Result<()> {
    for entry in entries {
        let line = entry.version as usize;
        if entry.version != state.version() + 1 {
            return Err(ReviewError::CorruptLog {
                path: path.to_path_buf(),
                line,
                message: format!("expected version {}, found {}", state.version() + 1, entry.version),
            });
        }
        state.apply(entry.event.clone()).map_err(|e| ReviewError::CorruptLog {
            path: path.to_path_buf(),
            line,
            message: format!("entry does not apply: {e}"),
        })?;
    }
    Ok(())
}
