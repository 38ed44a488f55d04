//! Reference implementations that share no code with the library's search.

#![allow(dead_code)]

use nirvana_core::factorize::multiset_distance;

/// Every `k`-subset of `0..n`, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Exhaustive feasibility test for `spectrum = A ⊕ B` with `|A| = p`, `|B| = q`.
///
/// Shift so that `min B = 0`; then `min A = min spectrum`, every `a_i` is itself
/// a spectrum value and every `min A + b_j` is too. So it suffices to try every
/// choice of `p − 1` further values for `A` and `q − 1` values for `B + min A`
/// from the sorted spectrum.
pub fn oracle_sumset(
    spectrum: &[f64],
    p: usize,
    q: usize,
    tol: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut s = spectrum.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s[0];
    let rest = &s[1..];
    for ia in subsets(rest.len(), p - 1) {
        let mut a = vec![m];
        a.extend(ia.iter().map(|&i| rest[i]));
        for ib in subsets(rest.len(), q - 1) {
            let mut b = vec![0.0];
            b.extend(ib.iter().map(|&i| rest[i] - m));
            let sums: Vec<f64> = a
                .iter()
                .flat_map(|x| b.iter().map(move |y| x + y))
                .collect();
            if multiset_distance(&sums, &s) <= tol {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
