//! MacKay alist reader and writer.
//!
//! ```text
//! N M
//! max_var_degree max_chk_degree
//! <N variable degrees>
//! <M check degrees>
//! <N lines: 1-indexed check neighbours of each variable, 0-padded>
//! <M lines: 1-indexed variable neighbours of each check, 0-padded>
//! ```
//!
//! Blank lines are skipped. Zero entries in neighbour lines are padding.

use std::fmt::Write as _;

use super::{CodeError, TannerGraph};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), CodeError> {
        loop {
            let Some((idx, line)) = self.inner.next() else {
                return Err(CodeError::Parse {
                    line: self.last + 1,
                    msg: format!("unexpected end of input, expected {what}"),
                });
            };
            self.last = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| CodeError::Parse {
                        line: idx + 1,
                        msg: format!("expected a non-negative integer in {what}, found {tok:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok((idx + 1, nums));
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> CodeError {
    CodeError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses an alist description into a [`TannerGraph`].
pub fn load_alist(text: &str) -> Result<TannerGraph, CodeError> {
    let mut lines = Lines::new(text);

    let (line, header) = lines.next_numbers("header \"N M\"")?;
    let [n, m] = header[..] else {
        return Err(parse_err(line, "header must contain exactly N and M"));
    };
    if n == 0 || m == 0 {
        return Err(parse_err(line, "N and M must be positive"));
    }

    let (line, maxes) = lines.next_numbers("maximum degrees")?;
    let [max_var, max_chk] = maxes[..] else {
        return Err(parse_err(line, "expected two maximum degrees"));
    };

    let (line, var_deg) = lines.next_numbers("variable degrees")?;
    if var_deg.len() != n {
        return Err(parse_err(line, format!("expected {n} variable degrees, found {}", var_deg.len())));
    }
    if var_deg.iter().any(|&d| d > max_var) {
        return Err(parse_err(line, format!("variable degree exceeds declared maximum {max_var}")));
    }
    let (line, chk_deg) = lines.next_numbers("check degrees")?;
    if chk_deg.len() != m {
        return Err(parse_err(line, format!("expected {m} check degrees, found {}", chk_deg.len())));
    }
    if chk_deg.iter().any(|&d| d > max_chk) {
        return Err(parse_err(line, format!("check degree exceeds declared maximum {max_chk}")));
    }

    let mut read_lists = |count: usize, degrees: &[usize], bound: usize, kind: &str| {
        let mut lists = Vec::with_capacity(count);
        for (i, &deg) in degrees.iter().enumerate() {
            let (line, entries) = lines.next_numbers(&format!("neighbour list of {kind} {}", i + 1))?;
            let list: Vec<usize> = entries.into_iter().filter(|&x| x != 0).collect();
            if list.len() != deg {
                return Err(parse_err(
                    line,
                    format!("{kind} {} declares degree {deg} but lists {} neighbours", i + 1, list.len()),
                ));
            }
            if let Some(&bad) = list.iter().find(|&&x| x > bound) {
                return Err(parse_err(line, format!("index {bad} out of range 1..={bound}")));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(parse_err(line, format!("parallel edge in {kind} {}", i + 1)));
            }
            lists.push(list.into_iter().map(|x| x - 1).collect::<Vec<_>>());
        }
        Ok::<_, CodeError>(lists)
    };

    let var_adj = read_lists(n, &var_deg, m, "variable")?;
    let chk_adj = read_lists(m, &chk_deg, n, "check")?;
    let last = lines.last;

    TannerGraph::from_adjacency(var_adj, chk_adj).map_err(|e| match e {
        CodeError::InvalidGraph(msg) => parse_err(last, format!("inconsistent neighbour lists: {msg}")),
        other => other,
    })
}

/// Serializes `graph` in alist form, zero-padding short neighbour lists.
pub fn write_alist(graph: &TannerGraph) -> String {
    let var_deg: Vec<usize> = (0..graph.n()).map(|v| graph.var_degree(v)).collect();
    let chk_deg: Vec<usize> = (0..graph.m()).map(|c| graph.chk_degree(c)).collect();
    let max_var = var_deg.iter().copied().max().unwrap_or(0);
    let max_chk = chk_deg.iter().copied().max().unwrap_or(0);

    let join = |xs: &mut dyn Iterator<Item = usize>| {
        xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", graph.n(), graph.m());
    let _ = writeln!(out, "{max_var} {max_chk}");
    let _ = writeln!(out, "{}", join(&mut var_deg.iter().copied()));
    let _ = writeln!(out, "{}", join(&mut chk_deg.iter().copied()));
    for v in 0..graph.n() {
        let nb = graph.var_neighbors(v);
        let padded = nb.iter().map(|&c| c + 1).chain(std::iter::repeat_n(0, max_var - nb.len()));
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    for c in 0..graph.m() {
        let nb = graph.chk_neighbors(c);
        let padded = nb.iter().map(|&v| v + 1).chain(std::iter::repeat_n(0, max_chk - nb.len()));
        let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";

    #[test]
    fn two_by_three() {
        let g = load_alist(SMALL).unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        let var: Vec<usize> = (0..3).map(|v| g.var_degree(v)).collect();
        let chk: Vec<usize> = (0..2).map(|c| g.chk_degree(c)).collect();
        assert_eq!(var, vec![1, 2, 1]);
        assert_eq!(chk, vec![2, 2]);
        assert_eq!(g.chk_neighbors(1), &[1, 2]);
    }

    #[test]
    fn zero_padding_ignored() {
        let padded = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        assert_eq!(load_alist(padded).unwrap(), load_alist(SMALL).unwrap());
    }

    #[test]
    fn empty_input() {
        assert!(matches!(load_alist(""), Err(CodeError::Parse { line: 1, .. })));
    }

    #[test]
    fn out_of_range_index() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 4\n";
        match load_alist(bad) {
            Err(CodeError::Parse { line, msg }) => {
                assert_eq!(line, 9);
                assert!(msg.contains("out of range"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_mismatch() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1 2\n1 2\n2\n1 2\n2 3\n";
        assert!(matches!(load_alist(bad), Err(CodeError::Parse { line: 5, .. })));
    }

    #[test]
    fn parallel_edge() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 1\n2\n1 2\n2 3\n";
        assert!(matches!(load_alist(bad), Err(CodeError::Parse { line: 6, .. })));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(load_alist("3\n"), Err(CodeError::Parse { line: 1, .. })));
        assert!(matches!(load_alist("3 x\n"), Err(CodeError::Parse { line: 1, .. })));
    }

    #[test]
    fn sides_disagree() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 3\n2 3\n";
        match load_alist(bad) {
            Err(CodeError::Parse { msg, .. }) => assert!(msg.contains("inconsistent"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn writes_and_rereads() {
        let g = load_alist(SMALL).unwrap();
        let text = write_alist(&g);
        assert_eq!(load_alist(&text).unwrap(), g);
    }
}
