//! Random irregular graphs from an edge-perspective degree distribution.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CodeError, DegreeDistribution, TannerGraph};

const PARALLEL_FIX_ATTEMPTS: usize = 10_000;
const CYCLE_PASSES: usize = 30;
const CYCLE_TRIES_PER_EDGE: usize = 20;

/// Largest-remainder apportionment of `total` units proportionally to `weights`.
fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    // stable: ties resolved by lower degree
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Node counts per degree for both sides, `(var_counts, chk_counts)` indexed by degree.
pub(crate) fn node_counts(
    dist: &DegreeDistribution,
    n: usize,
) -> Result<(Vec<usize>, Vec<usize>), CodeError> {
    let var_w: Vec<f64> = (0..=dist.max_var_degree())
        .map(|i| if i == 0 { 0.0 } else { dist.lambda(i) / i as f64 })
        .collect();
    let var_counts = largest_remainder(&var_w, n);
    let edges: usize = var_counts.iter().enumerate().map(|(d, c)| d * c).sum();

    let chk_w: Vec<f64> = (0..=dist.max_chk_degree())
        .map(|j| if j == 0 { 0.0 } else { dist.rho(j) / j as f64 })
        .collect();
    let targets: Vec<f64> = chk_w.iter().map(|w| w * edges as f64).collect();
    let m = targets.iter().sum::<f64>().round().max(1.0) as usize;
    let mut chk_counts = largest_remainder(&chk_w, m);

    // repair the socket total with the smallest count deviation
    let support: Vec<usize> = (1..chk_w.len()).filter(|&j| chk_w[j] > 0.0).collect();
    let deviation = |c: &[usize]| -> f64 { c.iter().zip(&targets).map(|(&a, &t)| (a as f64 - t).abs()).sum() };
    for _ in 0..(4 * n + 16) {
        let sockets: usize = chk_counts.iter().enumerate().map(|(d, c)| d * c).sum();
        if sockets == edges {
            return Ok((var_counts, chk_counts));
        }
        let gap = edges as i64 - sockets as i64;
        let mut best: Option<(f64, i64, Vec<usize>)> = None;
        let mut consider = |cand: Vec<usize>, delta: i64| {
            if delta == 0 || delta.signum() != gap.signum() || delta.abs() > gap.abs() {
                return;
            }
            let score = deviation(&cand);
            if best.as_ref().is_none_or(|(s, d, _)| score < *s || (score == *s && delta.abs() > d.abs())) {
                best = Some((score, delta, cand));
            }
        };
        for &a in &support {
            if chk_counts[a] > 0 {
                for &b in &support {
                    if a != b {
                        let mut cand = chk_counts.clone();
                        cand[a] -= 1;
                        cand[b] += 1;
                        consider(cand, b as i64 - a as i64);
                    }
                }
                let mut cand = chk_counts.clone();
                cand[a] -= 1;
                consider(cand, -(a as i64));
            }
            let mut cand = chk_counts.clone();
            cand[a] += 1;
            consider(cand, a as i64);
        }
        match best {
            Some((_, _, cand)) => chk_counts = cand,
            None => break,
        }
    }
    Err(CodeError::Construction(format!(
        "no check degree sequence realizes {edges} edges for n = {n}"
    )))
}

fn cycles_through(v: usize, c: usize, var_adj: &[Vec<usize>], chk_adj: &[Vec<usize>]) -> usize {
    chk_adj[c]
        .iter()
        .filter(|&&u| u != v)
        .map(|&u| var_adj[u].iter().filter(|x| var_adj[v].contains(x)).count() - 1)
        .sum()
}

fn replace(list: &mut [usize], from: usize, to: usize) {
    if let Some(x) = list.iter_mut().find(|x| **x == from) {
        *x = to;
    }
}

/// Samples a graph with `n` variable nodes from `dist` with the configuration
/// model. Parallel edges are rejected; length-4 cycles are removed by edge
/// swaps on a best-effort basis. Deterministic for a fixed `seed`.
pub fn sample_irregular(
    dist: &DegreeDistribution,
    n: usize,
    seed: u64,
) -> Result<TannerGraph, CodeError> {
    dist.ensure_min_degree_two()?;
    if n == 0 {
        return Err(CodeError::Construction("n must be positive".into()));
    }
    let (var_counts, chk_counts) = node_counts(dist, n)?;
    let m: usize = chk_counts.iter().sum();

    let mut var_sockets = Vec::new();
    let mut v = 0;
    for (d, &count) in var_counts.iter().enumerate() {
        for _ in 0..count {
            var_sockets.extend(std::iter::repeat_n(v, d));
            v += 1;
        }
    }
    let mut chk_sockets = Vec::new();
    let mut c = 0;
    for (d, &count) in chk_counts.iter().enumerate() {
        for _ in 0..count {
            chk_sockets.extend(std::iter::repeat_n(c, d));
            c += 1;
        }
    }
    let max_chk_deg = chk_counts.iter().rposition(|&x| x > 0).unwrap_or(0);
    if max_chk_deg > n {
        return Err(CodeError::Construction(format!(
            "check degree {max_chk_deg} exceeds n = {n}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    chk_sockets.shuffle(&mut rng);

    // resolve parallel edges by swapping check endpoints
    let mut present: HashSet<(usize, usize)> = HashSet::new();
    let mut dups = Vec::new();
    for k in 0..var_sockets.len() {
        if !present.insert((var_sockets[k], chk_sockets[k])) {
            dups.push(k);
        }
    }
    let mut pending: HashSet<usize> = dups.iter().copied().collect();
    for k in dups {
        let mut fixed = false;
        for _ in 0..PARALLEL_FIX_ATTEMPTS {
            let r = rng.random_range(0..var_sockets.len());
            if r == k || pending.contains(&r) {
                continue;
            }
            let (vk, ck, vr, cr) = (var_sockets[k], chk_sockets[k], var_sockets[r], chk_sockets[r]);
            if present.contains(&(vk, cr)) || present.contains(&(vr, ck)) || vk == vr || ck == cr {
                continue;
            }
            // slot k still duplicates an existing edge, so (vk, ck) stays in the set
            present.remove(&(vr, cr));
            present.insert((vk, cr));
            present.insert((vr, ck));
            chk_sockets.swap(k, r);
            pending.remove(&k);
            fixed = true;
            break;
        }
        if !fixed {
            return Err(CodeError::Construction("could not remove parallel edges".into()));
        }
    }

    let mut var_adj = vec![Vec::new(); n];
    let mut chk_adj = vec![Vec::new(); m];
    for (&v, &c) in var_sockets.iter().zip(&chk_sockets) {
        var_adj[v].push(c);
        chk_adj[c].push(v);
    }

    let initial = four_cycle_edges(&var_adj, &chk_adj).len();
    let mut remaining = initial;
    for _ in 0..CYCLE_PASSES {
        let bad = four_cycle_edges(&var_adj, &chk_adj);
        remaining = bad.len();
        if bad.is_empty() {
            break;
        }
        for (v, c) in bad {
            if !var_adj[v].contains(&c) || cycles_through(v, c, &var_adj, &chk_adj) == 0 {
                continue;
            }
            for _ in 0..CYCLE_TRIES_PER_EDGE {
                let w = rng.random_range(0..n);
                let d = var_adj[w][rng.random_range(0..var_adj[w].len())];
                if w == v || d == c || var_adj[v].contains(&d) || var_adj[w].contains(&c) {
                    continue;
                }
                let before = cycles_through(v, c, &var_adj, &chk_adj) + cycles_through(w, d, &var_adj, &chk_adj);
                replace(&mut var_adj[v], c, d);
                replace(&mut var_adj[w], d, c);
                replace(&mut chk_adj[c], v, w);
                replace(&mut chk_adj[d], w, v);
                let after = cycles_through(v, d, &var_adj, &chk_adj) + cycles_through(w, c, &var_adj, &chk_adj);
                if after < before {
                    break;
                }
                replace(&mut var_adj[v], d, c);
                replace(&mut var_adj[w], c, d);
                replace(&mut chk_adj[c], w, v);
                replace(&mut chk_adj[d], v, w);
            }
        }
    }
    if remaining > 0 {
        remaining = four_cycle_edges(&var_adj, &chk_adj).len();
    }
    log::debug!("sample_irregular: {initial} edges on 4-cycles before swaps, {remaining} after");

    var_adj.iter_mut().for_each(|a| a.sort_unstable());
    chk_adj.iter_mut().for_each(|a| a.sort_unstable());
    TannerGraph::from_adjacency(var_adj, chk_adj)
}

// (variable, check) edges lying on at least one length-4 cycle, in deterministic order
fn four_cycle_edges(var_adj: &[Vec<usize>], chk_adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (v, checks) in var_adj.iter().enumerate() {
        for &c in checks {
            if cycles_through(v, c, var_adj, chk_adj) > 0 {
                out.push((v, c));
            }
        }
    }
    out
}
