//! Shared binary-search driver over sorted guess values.

use crate::error::Result;

/// How a driver walks the space of guesses for the optimum value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchStrategy {
    /// Probe the finite set of guesses at which probe behavior can change.
    Discrete,
    /// Probe a geometric grid with the given resolution factor.
    Continuous { eps: f64 },
}

#[derive(Debug)]
pub(crate) struct ProbeRecord<R> {
    pub gamma: f64,
    pub feasible: bool,
    pub result: R,
}

pub(crate) struct SearchOutcome<R> {
    pub records: Vec<ProbeRecord<R>>,
    /// A guess aborted while a strictly smaller (for `largest`) or larger
    /// (for `smallest`) one succeeded: the presumed monotonicity of the
    /// abort condition does not hold on this instance.
    pub non_monotone: bool,
}

/// Binary search over ascending `guesses` for the largest feasible one,
/// under the assumption that feasibility is downward closed. Every evaluated
/// probe is recorded so the caller can keep the best result actually seen,
/// which keeps the driver safe even if the assumption fails.
pub(crate) fn search_largest_feasible<R>(
    guesses: &[f64],
    mut probe: impl FnMut(f64) -> Result<(bool, R)>,
) -> Result<SearchOutcome<R>> {
    let mut records: Vec<ProbeRecord<R>> = Vec::new();
    if guesses.is_empty() {
        return Ok(SearchOutcome {
            records,
            non_monotone: false,
        });
    }
    let mut eval = |g: f64, records: &mut Vec<ProbeRecord<R>>| -> Result<bool> {
        let (feasible, result) = probe(g)?;
        records.push(ProbeRecord {
            gamma: g,
            feasible,
            result,
        });
        Ok(feasible)
    };

    let last = guesses.len() - 1;
    if eval(guesses[last], &mut records)? || last == 0 {
        return Ok(finish(records, false));
    }
    let lo_feasible = eval(guesses[0], &mut records)?;
    if !lo_feasible {
        // No feasible anchor; nothing to bracket.
        return Ok(finish(records, false));
    }
    let (mut lo, mut hi) = (0usize, last);
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if eval(guesses[mid], &mut records)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(finish(records, false))
}

/// Mirror image: smallest feasible guess, feasibility upward closed.
pub(crate) fn search_smallest_feasible<R>(
    guesses: &[f64],
    mut probe: impl FnMut(f64) -> Result<(bool, R)>,
) -> Result<SearchOutcome<R>> {
    let mut records: Vec<ProbeRecord<R>> = Vec::new();
    if guesses.is_empty() {
        return Ok(SearchOutcome {
            records,
            non_monotone: false,
        });
    }
    let mut eval = |g: f64, records: &mut Vec<ProbeRecord<R>>| -> Result<bool> {
        let (feasible, result) = probe(g)?;
        records.push(ProbeRecord {
            gamma: g,
            feasible,
            result,
        });
        Ok(feasible)
    };

    let last = guesses.len() - 1;
    if eval(guesses[0], &mut records)? || last == 0 {
        return Ok(finish(records, true));
    }
    if !eval(guesses[last], &mut records)? {
        return Ok(finish(records, true));
    }
    let (mut lo, mut hi) = (0usize, last);
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if eval(guesses[mid], &mut records)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(finish(records, true))
}

fn finish<R>(mut records: Vec<ProbeRecord<R>>, upward: bool) -> SearchOutcome<R> {
    records.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    let mut non_monotone = false;
    for w in records.windows(2) {
        let broken = if upward {
            w[0].feasible && !w[1].feasible
        } else {
            !w[0].feasible && w[1].feasible
        };
        if broken {
            non_monotone = true;
        }
    }
    SearchOutcome {
        records,
        non_monotone,
    }
}

/// Deduplicated ascending guess list; exact comparison after sorting.
pub(crate) fn sorted_guesses(mut values: Vec<f64>) -> Vec<f64> {
    values.retain(|v| v.is_finite() && *v >= 0.0);
    values.sort_by(f64::total_cmp);
    values.dedup();
    values
}

/// Geometric grid `lo * (1+eps)^i` covering `[lo, hi]`, endpoints included.
pub(crate) fn geometric_grid(lo: f64, hi: f64, eps: f64) -> Vec<f64> {
    assert!(eps > 0.0, "resolution factor must be positive");
    if lo <= 0.0 || hi <= 0.0 || lo >= hi {
        return vec![lo.max(0.0), hi.max(0.0)];
    }
    let mut out = Vec::new();
    let mut g = lo;
    while g < hi {
        out.push(g);
        g *= 1.0 + eps;
    }
    out.push(hi);
    out
}
