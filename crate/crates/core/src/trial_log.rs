//! CSV trial logs.
//!
//! ```text
//! trial,a_setting,b_setting,a_outcome,b_outcome
//! 0,2,1,+1,-1
//! ```
//!
//! Trials are numbered from 0, settings are `1` or `2`, outcomes `+1` or `-1`.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::lhv::{Outcome, TrialRecord};

pub const HEADER: &str = "trial,a_setting,b_setting,a_outcome,b_outcome";

pub fn write_trial_log<W: Write>(mut w: W, trials: &[TrialRecord]) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for t in trials {
        writeln!(
            w,
            "{},{},{},{},{}",
            t.trial, t.a_setting, t.b_setting, t.a_outcome, t.b_outcome
        )?;
    }
    w.flush()
}

pub fn read_trial_log<R: BufRead>(r: R) -> Result<Vec<TrialRecord>> {
    let mut lines = r.lines().enumerate();
    let bad = |line: usize, reason: &str| Error::TrialLog {
        line: line + 1,
        reason: reason.to_string(),
    };
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == HEADER => {}
        _ => return Err(bad(0, "missing or wrong header")),
    }
    let mut out = Vec::new();
    for (n, line) in lines {
        let line = line.map_err(|e| bad(n, &e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 5 {
            return Err(bad(n, "expected 5 fields"));
        }
        let trial = fields[0].parse().map_err(|_| bad(n, "bad trial index"))?;
        let setting = |s: &str| match s {
            "1" => Ok(1u8),
            "2" => Ok(2u8),
            _ => Err(bad(n, "setting must be 1 or 2")),
        };
        let outcome = |s: &str| {
            s.parse::<i64>()
                .ok()
                .and_then(Outcome::from_value)
                .ok_or_else(|| bad(n, "outcome must be +1 or -1"))
        };
        out.push(TrialRecord {
            trial,
            a_setting: setting(fields[1])?,
            b_setting: setting(fields[2])?,
            a_outcome: outcome(fields[3])?,
            b_outcome: outcome(fields[4])?,
        });
    }
    Ok(out)
}
