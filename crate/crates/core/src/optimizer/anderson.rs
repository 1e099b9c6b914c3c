//! Type-II Anderson acceleration of a fixed-point iteration `s <- F(s)`.

use std::collections::VecDeque;

use crate::error::Result;
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};

/// Relative Tikhonov weight of the least-squares problem.
const REGULARISATION: f64 = 1e-10;

pub(crate) struct Anderson {
    memory: usize,
    ds: VecDeque<Vec<f64>>,
    dg: VecDeque<Vec<f64>>,
    last: Option<(Vec<f64>, Vec<f64>)>,
}

impl Anderson {
    pub(crate) fn new(memory: usize) -> Self {
        Self { memory, ds: VecDeque::new(), dg: VecDeque::new(), last: None }
    }

    pub(crate) fn reset(&mut self) {
        self.ds.clear();
        self.dg.clear();
        self.last = None;
    }

    /// Next iterate from the current point `s` and its image `f = F(s)`:
    /// `f - (dS + dG) gamma`, with `gamma` minimising `|g - dG gamma|`.
    pub(crate) fn extrapolate(&mut self, s: &[f64], f: &[f64]) -> Result<Vec<f64>> {
        let g: Vec<f64> = f.iter().zip(s).map(|(a, b)| a - b).collect();
        if let Some((ls, lg)) = self.last.take() {
            self.ds.push_back(s.iter().zip(&ls).map(|(a, b)| a - b).collect());
            self.dg.push_back(g.iter().zip(&lg).map(|(a, b)| a - b).collect());
            if self.ds.len() > self.memory {
                self.ds.pop_front();
                self.dg.pop_front();
            }
        }
        self.last = Some((s.to_vec(), g.clone()));
        let m = self.dg.len();
        if m == 0 {
            return Ok(f.to_vec());
        }

        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut gram = ComplexMatrix::from_fn(m, m, |i, j| C64::new(dot(&self.dg[i], &self.dg[j]), 0.0));
        let shift = REGULARISATION * (0..m).map(|i| gram[(i, i)].re).sum::<f64>();
        for i in 0..m {
            gram[(i, i)] += C64::new(shift, 0.0);
        }
        let eig = hermitian_eig(&gram)?;
        let cutoff = 1e-14 * eig.max_eigenvalue();
        let inv = eig.map_eigenvalues(|l| C64::new(if l > cutoff { 1.0 / l } else { 0.0 }, 0.0));
        let rhs: Vec<f64> = self.dg.iter().map(|d| dot(d, &g)).collect();
        let gamma: Vec<f64> = (0..m).map(|i| (0..m).map(|j| inv[(i, j)].re * rhs[j]).sum()).collect();

        let mut next = f.to_vec();
        for (k, gk) in gamma.iter().enumerate() {
            for ((x, a), b) in next.iter_mut().zip(&self.ds[k]).zip(&self.dg[k]) {
                *x -= gk * (a + b);
            }
        }
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_linear_fixed_point_in_few_steps() {
        // F(s) = M s + b with a slow contraction; plain iteration needs ~1e3 steps
        let m = [[0.99, 0.0], [0.0, 0.5]];
        let b = [1.0, 1.0];
        let map = |s: &[f64]| vec![m[0][0] * s[0] + b[0], m[1][1] * s[1] + b[1]];
        let mut acc = Anderson::new(5);
        let mut s = vec![0.0, 0.0];
        for _ in 0..6 {
            let f = map(&s);
            s = acc.extrapolate(&s, &f).unwrap();
        }
        assert!((s[0] - 100.0).abs() < 1e-6 && (s[1] - 2.0).abs() < 1e-9, "{s:?}");
    }
}
