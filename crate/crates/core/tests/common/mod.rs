//! Test-only reference code: a direct transcription of the clustering loop
//! and brute-force metric oracles. Shares nothing with the library beyond
//! plain numbers.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

/// Reference Fuzzy ART category: weight, vigilance, id.
#[derive(Debug, Clone)]
pub struct RefCluster {
    pub id: u64,
    pub w: Vec<f64>,
    pub rho: f64,
}

pub struct RefParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho0: f64,
    pub tau: f64,
    pub t_max: usize,
}

pub struct RefOutcome {
    pub labels: Vec<u64>,
    pub iterations: usize,
    pub converged: bool,
    pub clusters: Vec<RefCluster>,
}

fn l1(v: &[f64]) -> f64 {
    v.iter().sum()
}

fn and_l1(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += if a[i] < b[i] { a[i] } else { b[i] };
    }
    s
}

/// One presentation: repeatedly pick the best non-excluded cluster (lowest
/// index on ties) until one passes its own vigilance; otherwise create.
fn present(clusters: &mut Vec<RefCluster>, next_id: &mut u64, x: &[f64], p: &RefParams) -> u64 {
    let mut excluded = vec![false; clusters.len()];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (j, c) in clusters.iter().enumerate() {
            if excluded[j] {
                continue;
            }
            let t = and_l1(x, &c.w) / (p.alpha + l1(&c.w));
            if best.is_none_or(|(_, bt)| t > bt) {
                best = Some((j, t));
            }
        }
        match best {
            Some((j, _)) => {
                let m = and_l1(x, &clusters[j].w) / l1(x);
                if m >= clusters[j].rho {
                    let w = &clusters[j].w;
                    let new: Vec<f64> = (0..w.len())
                        .map(|i| p.beta * x[i].min(w[i]) + (1.0 - p.beta) * w[i])
                        .collect();
                    clusters[j].w = new;
                    return clusters[j].id;
                }
                excluded[j] = true;
            }
            None => {
                let id = *next_id;
                *next_id += 1;
                clusters.push(RefCluster {
                    id,
                    w: x.to_vec(),
                    rho: p.rho0,
                });
                return id;
            }
        }
    }
}

/// Reference loop; `refine = false` gives the plain repeated-pass baseline.
pub fn reference_run(data: &[Vec<f64>], p: &RefParams, refine: bool) -> RefOutcome {
    let mut clusters = Vec::new();
    let mut next_id = 0;
    let mut prev: Vec<u64> = data.iter().map(|x| present(&mut clusters, &mut next_id, x, p)).collect();
    let mut t = 1;
    if p.t_max == 1 {
        return RefOutcome { labels: prev, iterations: 1, converged: false, clusters };
    }
    loop {
        t += 1;
        let cur: Vec<u64> = data.iter().map(|x| present(&mut clusters, &mut next_id, x, p)).collect();
        if cur == prev {
            return RefOutcome { labels: cur, iterations: t, converged: true, clusters };
        }
        if t == p.t_max {
            return RefOutcome { labels: cur, iterations: t, converged: false, clusters };
        }
        if refine {
            let mut before: HashMap<u64, usize> = HashMap::new();
            let mut now: HashMap<u64, usize> = HashMap::new();
            for id in &prev {
                *before.entry(*id).or_default() += 1;
            }
            for id in &cur {
                *now.entry(*id).or_default() += 1;
            }
            clusters.retain(|c| now.get(&c.id).copied().unwrap_or(0) >= before.get(&c.id).copied().unwrap_or(0));
            for c in clusters.iter_mut() {
                c.rho *= 1.0 - p.tau;
            }
        }
        prev = cur;
    }
}

/// `(x, 1 - x)`.
pub fn code(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.extend(x.iter().map(|a| 1.0 - a));
    v
}

/// ARI by counting agreements over every unordered sample pair.
pub fn ari_pairs(u: &[usize], v: &[usize]) -> f64 {
    let n = u.len();
    let (mut a, mut b, mut c, mut d) = (0.0f64, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            match (u[i] == u[j], v[i] == v[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    if den == 0.0 {
        return 1.0;
    }
    2.0 * (a * d - b * c) / den
}

/// NMI (arithmetic mean) by summing over samples directly.
pub fn nmi_sum(u: &[usize], v: &[usize]) -> f64 {
    let n = u.len() as f64;
    let mut pu: HashMap<usize, f64> = HashMap::new();
    let mut pv: HashMap<usize, f64> = HashMap::new();
    let mut puv: HashMap<(usize, usize), f64> = HashMap::new();
    for i in 0..u.len() {
        *pu.entry(u[i]).or_default() += 1.0 / n;
        *pv.entry(v[i]).or_default() += 1.0 / n;
        *puv.entry((u[i], v[i])).or_default() += 1.0 / n;
    }
    let h = |m: &HashMap<usize, f64>| -> f64 { m.values().map(|p| -p * p.ln()).sum() };
    let (hu, hv) = (h(&pu), h(&pv));
    if hu.abs() < 1e-15 && hv.abs() < 1e-15 {
        return 1.0;
    }
    if hu.abs() < 1e-15 || hv.abs() < 1e-15 {
        return 0.0;
    }
    let mut mi = 0.0;
    for ((a, b), p) in &puv {
        mi += p * (p / (pu[a] * pv[b])).ln();
    }
    mi / ((hu + hv) / 2.0)
}

/// All partitions of `n` items into at most `k` blocks, as restricted
/// growth strings.
pub fn partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, k: usize, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=blocks.min(k - 1) {
            prefix.push(b);
            grow(prefix, n, k, blocks.max(b + 1), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, k, 0, &mut out);
    out
}

pub fn data_dir() -> PathBuf {
    std::env::var_os("IRART_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}
