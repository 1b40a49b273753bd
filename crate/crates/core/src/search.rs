//! Enumeration of decimation patterns up to cyclic rotation, and the search
//! for the pattern with the smallest optimal error norm.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::BaseSpec;
use crate::error::{Error, Result};
use crate::pattern::DecimationPattern;
use crate::synthesis::{build_plant, hinf_synthesize, SynthesisOptions};

/// One canonical representative (smallest rotation) per cyclic class of
/// length-`m` patterns with `n` ones, in lexicographic order.
pub fn enumerate_classes(m: usize, n: usize) -> Result<Vec<DecimationPattern>> {
    if n < 1 || n > m || m > 63 {
        return Err(Error::InvalidCounts { m, n });
    }
    let mut classes = BTreeSet::new();
    for_each_combination(m, n, |bits| {
        let p = DecimationPattern::from_bits(bits).expect("n >= 1 ones");
        classes.insert(p.canonical());
    });
    Ok(classes.into_iter().collect())
}

/// Calls `f` with every 0/1 word of length `m` with exactly `n` ones.
fn for_each_combination(m: usize, n: usize, mut f: impl FnMut(&[u8])) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut bits = vec![0u8; m];
    loop {
        bits.iter_mut().for_each(|b| *b = 0);
        for &i in &idx {
            bits[i] = 1;
        }
        f(&bits);
        // advance to the next n-subset of 0..m in lexicographic order
        let Some(pos) = (0..n).rev().find(|&i| idx[i] < m - n + i) else { return };
        idx[pos] += 1;
        for j in pos + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    pub canonical: DecimationPattern,
    pub rotations: Vec<DecimationPattern>,
    /// Optimal norm `J`; `None` when the synthesis for this class failed.
    #[serde(rename = "J")]
    pub j: Option<f64>,
    pub gamma: Option<f64>,
    pub consecutive_zero_run: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Synthesizes the optimal filter for every class and ranks the classes by
/// `J`, breaking ties by the zero run and then the canonical form. Classes
/// whose synthesis failed are listed last with their error.
pub fn search(
    m: usize,
    n: usize,
    base: &BaseSpec,
    opts: &SynthesisOptions,
    workers: Option<usize>,
) -> Result<Vec<PatternReport>> {
    let classes = enumerate_classes(m, n)?;
    evaluate_classes(classes, base, opts, workers)
}

/// Like [`search`] but over several retained counts for the same segment length.
pub fn search_counts(
    m: usize,
    counts: &[usize],
    base: &BaseSpec,
    opts: &SynthesisOptions,
    workers: Option<usize>,
) -> Result<Vec<PatternReport>> {
    let mut classes = Vec::new();
    for &n in counts {
        classes.extend(enumerate_classes(m, n)?);
    }
    evaluate_classes(classes, base, opts, workers)
}

fn evaluate_classes(
    classes: Vec<DecimationPattern>,
    base: &BaseSpec,
    opts: &SynthesisOptions,
    workers: Option<usize>,
) -> Result<Vec<PatternReport>> {
    let run = || -> Vec<PatternReport> { classes.par_iter().map(|p| evaluate(p, base, opts)).collect() };
    let mut reports = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidSpec(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };
    reports.sort_by(|a, b| {
        let ja = a.j.unwrap_or(f64::INFINITY);
        let jb = b.j.unwrap_or(f64::INFINITY);
        ja.total_cmp(&jb)
            .then(a.consecutive_zero_run.cmp(&b.consecutive_zero_run))
            .then_with(|| a.canonical.cmp(&b.canonical))
    });
    Ok(reports)
}

fn evaluate(p: &DecimationPattern, base: &BaseSpec, opts: &SynthesisOptions) -> PatternReport {
    let outcome = base
        .for_pattern(p.clone())
        .and_then(|spec| build_plant(&spec))
        .and_then(|plant| hinf_synthesize(&plant, opts).map_err(Error::from));
    let (j, gamma, error) = match outcome {
        Ok(res) => (Some(res.j), Some(res.gamma), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    PatternReport {
        canonical: p.clone(),
        rotations: p.rotations(),
        j,
        gamma,
        consecutive_zero_run: p.max_zero_run(),
        error,
    }
}

/// Plain-text table of reports.
pub fn format_table(reports: &[PatternReport]) -> String {
    let width = reports.iter().map(|r| r.canonical.len()).max().unwrap_or(7).max(7);
    let mut s = format!("{:<width$}  {:>9}  {:>9}  {:>10}\n", "pattern", "rotations", "zero_run", "J");
    for r in reports {
        let j = match (r.j, &r.error) {
            (Some(j), _) => format!("{j:.4}"),
            (None, Some(e)) => format!("failed: {e}"),
            (None, None) => "-".into(),
        };
        s.push_str(&format!(
            "{:<width$}  {:>9}  {:>9}  {:>10}\n",
            r.canonical.to_string(),
            r.rotations.len(),
            r.consecutive_zero_run,
            j
        ));
    }
    s
}

pub fn to_csv(reports: &[PatternReport]) -> String {
    let mut s = String::from("pattern,rotations,consecutive_zero_run,J,gamma\n");
    for r in reports {
        let f = |v: Option<f64>| v.map(crate::io::fmt_f64).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.canonical,
            r.rotations.len(),
            r.consecutive_zero_run,
            f(r.j),
            f(r.gamma)
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> DecimationPattern {
        s.parse().unwrap()
    }

    #[test]
    fn class_examples() {
        assert_eq!(enumerate_classes(4, 2).unwrap(), vec![p("0011"), p("0101")]);
        assert_eq!(enumerate_classes(3, 2).unwrap(), vec![p("011")]);
        assert_eq!(enumerate_classes(7, 4).unwrap().len(), 5);
        assert_eq!(enumerate_classes(1, 1).unwrap(), vec![p("1")]);
        assert!(matches!(enumerate_classes(3, 0), Err(Error::InvalidCounts { .. })));
        assert!(matches!(enumerate_classes(3, 4), Err(Error::InvalidCounts { .. })));
    }

    #[test]
    fn combinations_are_complete() {
        let mut count = 0;
        let mut seen = BTreeSet::new();
        for_each_combination(6, 3, |b| {
            count += 1;
            assert_eq!(b.iter().filter(|&&v| v == 1).count(), 3);
            seen.insert(b.to_vec());
        });
        assert_eq!(count, 20);
        assert_eq!(seen.len(), 20);
    }

    #[test]
    fn table_marks_failures() {
        let r = PatternReport {
            canonical: p("011"),
            rotations: p("011").rotations(),
            j: None,
            gamma: None,
            consecutive_zero_run: 1,
            error: Some("boom".into()),
        };
        assert!(format_table(std::slice::from_ref(&r)).contains("failed: boom"));
        assert!(to_csv(&[r]).contains("011,3,1,,"));
    }
}
