//! Smoothed minimization of sums of Euclidean norms of affine maps:
//! `F(z) = sum_t || A_t z + c_t ||`. Each norm is smoothed to
//! `sqrt(||.||^2 + eps^2)` and `eps` is driven towards zero in stages, so
//! the (convex, piecewise-smooth) objective is minimized by plain
//! adaptive-step gradient descent on tiny problems.

/// One norm term `|| A z + c ||`; each row is a dense coefficient vector
/// over `z` plus a constant.
#[derive(Clone, Debug)]
pub struct NormTerm {
    pub rows: Vec<(Vec<f64>, f64)>,
}

impl NormTerm {
    fn values(&self, z: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|(coef, cst)| coef.iter().zip(z).map(|(a, x)| a * x).sum::<f64>() + cst)
            .collect()
    }
}

/// Exact (unsmoothed) objective value at `z`.
pub fn objective(terms: &[NormTerm], z: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| t.values(z).iter().map(|v| v * v).sum::<f64>().sqrt())
        .sum()
}

fn smoothed_value_grad(terms: &[NormTerm], z: &[f64], eps: f64) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = vec![0.0; z.len()];
    for t in terms {
        let vals = t.values(z);
        let norm = (vals.iter().map(|v| v * v).sum::<f64>() + eps * eps).sqrt();
        value += norm;
        if norm > 0.0 {
            for ((coef, _), v) in t.rows.iter().zip(&vals) {
                let w = v / norm;
                for (g, a) in grad.iter_mut().zip(coef) {
                    *g += w * a;
                }
            }
        }
    }
    (value, grad)
}

/// Minimizes the objective starting from `init`. `tol` controls both the
/// final smoothing level and the stopping threshold. The second return
/// value reports whether the final stage converged within its iteration
/// budget.
pub fn minimize(
    terms: &[NormTerm],
    init: Vec<f64>,
    tol: f64,
    iters_per_stage: usize,
) -> (Vec<f64>, bool) {
    let mut z = init;
    if z.is_empty() {
        return (z, true);
    }
    let scale = 1.0
        + terms
            .iter()
            .flat_map(|t| t.rows.iter())
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max);
    let floor = (tol * 1e-3).max(1e-14);
    let mut eps = scale * 1e-2;
    let converged = loop {
        let done = descend(terms, &mut z, eps, iters_per_stage);
        if eps <= floor {
            break done;
        }
        eps = (eps * 0.1).max(floor);
    };
    (z, converged)
}

/// Returns true when the stage terminated on the gradient/step criterion
/// rather than exhausting `max_iters`.
fn descend(terms: &[NormTerm], z: &mut Vec<f64>, eps: f64, max_iters: usize) -> bool {
    let (mut value, mut grad) = smoothed_value_grad(terms, z, eps);
    let mut step = eps;
    for _ in 0..max_iters {
        let gnorm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm * step < 1e-17 * (1.0 + value.abs()) {
            return true;
        }
        let cand: Vec<f64> = z.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
        let (cand_value, cand_grad) = smoothed_value_grad(terms, &cand, eps);
        if cand_value < value {
            *z = cand;
            value = cand_value;
            grad = cand_grad;
            step *= 1.3;
        } else {
            step *= 0.4;
            if step < 1e-18 {
                return true;
            }
        }
    }
    false
}
