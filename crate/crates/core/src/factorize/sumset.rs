//! Additive decomposition of a spectrum: find multisets `A` (size `p`) and
//! `B` (size `q`) whose full pairwise sums `{a_i + b_j}` reproduce the target
//! multiset, degeneracies included.
//!
//! The search is exhaustive branch-and-prune. Both factors are grown in
//! ascending order, so the smallest sum not yet explained must be either
//! `a_new + min(B)` or `min(A) + b_new`; each choice removes a whole row or
//! column of sums from the remaining multiset and is abandoned as soon as one
//! of those sums is missing.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-factor eigenvalue multisets. Every factor after the first has minimum 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDecomposition {
    pub factors: Vec<Vec<f64>>,
    /// Largest deviation between the re-expanded sums and the target, both sorted.
    pub residual: f64,
}

impl SpectrumDecomposition {
    /// All sums `Σ_α E^{(α)}_{i_α}`, row-major over the factors (last fastest).
    pub fn expand(&self) -> Vec<f64> {
        self.factors.iter().fold(vec![0.0], |acc, f| {
            acc.iter()
                .flat_map(|&x| f.iter().map(move |&y| x + y))
                .collect()
        })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }
}

/// Bottleneck distance between two equal-size multisets of reals.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn sorted_spectrum(spectrum: &[f64]) -> Result<Vec<f64>> {
    if spectrum.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "spectrum contains non-finite values".into(),
        ));
    }
    let mut s = spectrum.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Removes the element nearest to `target` if it lies within `tol`.
fn take_near(remaining: &mut Vec<f64>, target: f64, tol: f64) -> bool {
    let pos = remaining.partition_point(|&x| x < target);
    let best = [pos.checked_sub(1), Some(pos)]
        .into_iter()
        .flatten()
        .filter(|&i| i < remaining.len())
        .min_by(|&i, &j| {
            (remaining[i] - target)
                .abs()
                .total_cmp(&(remaining[j] - target).abs())
        });
    match best {
        Some(i) if (remaining[i] - target).abs() <= tol => {
            remaining.remove(i);
            true
        }
        _ => false,
    }
}

struct Search<'a, F> {
    p: usize,
    q: usize,
    tol: f64,
    visit: &'a mut F,
}

impl<F: FnMut(&[f64], &[f64]) -> ControlFlow<()>> Search<'_, F> {
    fn run(&mut self, remaining: Vec<f64>, a: &mut Vec<f64>, b: &mut Vec<f64>) -> ControlFlow<()> {
        let Some(&smallest) = remaining.first() else {
            return (self.visit)(a, b);
        };
        // New element of the second factor first: with the gauge min(B) = 0
        // this lists the coarser spacing in the first factor, e.g. {0,1,2,3} -> ({0,2},{0,1}).
        if b.len() < self.q {
            let nb = smallest - a[0];
            let mut rest = remaining.clone();
            if a.iter().all(|&ai| take_near(&mut rest, ai + nb, self.tol)) {
                b.push(nb);
                self.run(rest, a, b)?;
                b.pop();
            }
        }
        if a.len() < self.p {
            let na = smallest - b[0];
            let mut rest = remaining;
            if b.iter().all(|&bj| take_near(&mut rest, na + bj, self.tol)) {
                a.push(na);
                self.run(rest, a, b)?;
                a.pop();
            }
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit(A, B)` for every bipartite decomposition the search finds, in
/// search order, until `visit` breaks.
pub fn for_each_sumset<F>(
    spectrum: &[f64],
    p: usize,
    q: usize,
    tol: f64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[f64], &[f64]) -> ControlFlow<()>,
{
    if p == 0 || q == 0 || spectrum.len() != p * q {
        return Err(Error::SpectrumSize {
            len: spectrum.len(),
            expected: p * q,
        });
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be nonnegative, got {tol}"
        )));
    }
    let mut remaining = sorted_spectrum(spectrum)?;
    let anchor = remaining.remove(0);
    let mut search = Search {
        p,
        q,
        tol,
        visit: &mut visit,
    };
    let _ = search.run(remaining, &mut vec![anchor], &mut vec![0.0]);
    Ok(())
}

/// First decomposition of `spectrum` into `p`- and `q`-element multisets whose
/// sums match within `tol`, or `None` when the exhaustive search finds none.
pub fn sumset_decompose(
    spectrum: &[f64],
    p: usize,
    q: usize,
    tol: f64,
) -> Result<Option<SpectrumDecomposition>> {
    let mut found = None;
    for_each_sumset(spectrum, p, q, tol, |a, b| {
        let candidate = SpectrumDecomposition {
            factors: vec![a.to_vec(), b.to_vec()],
            residual: 0.0,
        };
        let residual = multiset_distance(&candidate.expand(), spectrum);
        if residual <= tol {
            found = Some(SpectrumDecomposition {
                residual,
                ..candidate
            });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found)
}

/// Decomposition over several factors by repeated bipartition: peel off the
/// first factor, then decompose the remainder, backtracking over every
/// bipartite solution.
pub fn sumset_decompose_multi(
    spectrum: &[f64],
    dims: &[usize],
    tol: f64,
) -> Result<Option<SpectrumDecomposition>> {
    let expected: usize = dims.iter().product();
    if dims.is_empty() || spectrum.len() != expected {
        return Err(Error::SpectrumSize {
            len: spectrum.len(),
            expected,
        });
    }
    let Some(factors) = multi_inner(spectrum, dims, tol)? else {
        return Ok(None);
    };
    let candidate = SpectrumDecomposition {
        factors,
        residual: 0.0,
    };
    let residual = multiset_distance(&candidate.expand(), spectrum);
    Ok((residual <= tol).then_some(SpectrumDecomposition {
        residual,
        ..candidate
    }))
}

fn multi_inner(spectrum: &[f64], dims: &[usize], tol: f64) -> Result<Option<Vec<Vec<f64>>>> {
    if let [_] = dims {
        return Ok(Some(vec![sorted_spectrum(spectrum)?]));
    }
    let rest: usize = dims[1..].iter().product();
    let mut out = None;
    let mut failure = None;
    for_each_sumset(spectrum, dims[0], rest, tol, |a, b| {
        match multi_inner(b, &dims[1..], tol) {
            Ok(Some(mut tail)) => {
                let mut factors = vec![a.to_vec()];
                factors.append(&mut tail);
                let trial = SpectrumDecomposition {
                    factors,
                    residual: 0.0,
                };
                if multiset_distance(&trial.expand(), spectrum) <= tol {
                    out = Some(trial.factors);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            }
            Ok(None) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
