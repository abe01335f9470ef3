use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Stationary distribution of an irreducible row-stochastic matrix.
///
/// Solves `pi (P - I) = 0` with one balance equation replaced by the
/// normalisation `sum(pi) = 1`, then polishes with iterative refinement.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    if n == 0 || p.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("transition matrix must be square and non-empty".into()));
    }
    if !is_irreducible(p) {
        return Err(Error::ReducibleChain);
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }

    // rows of `a` are the balance equations (P^T - I), last replaced by ones
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;

    let lu = a.clone().lu();
    let mut x = lu.solve(&b).ok_or(Error::ReducibleChain)?;
    for _ in 0..3 {
        let r = &b - &a * &x;
        if r.amax() < 1e-15 {
            break;
        }
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
    }

    let mut pi: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    if pi.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::ReducibleChain);
    }
    Ok(pi)
}

/// Strong connectivity of the support graph.
fn is_irreducible(p: &[Vec<f64>]) -> bool {
    let n = p.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { p[i][j] } else { p[j][i] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}
