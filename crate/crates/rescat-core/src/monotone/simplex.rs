//! Solvers over simplex-parameterized free-state families σ(w) = Σ w_k E_k.
//!
//! Two engines cover every finite-extreme family:
//!
//! - a damped-Newton log-barrier solver for the eigenvalue feasibility
//!   problem max_{w ∈ Δ} λ_min(M(w)), with M affine in w; this decides the
//!   inner step of the max-relative-entropy bisection to ~1e-10;
//! - mirror descent (exponentiated gradient) for the smooth convex entropic
//!   objectives, with a certified simplex duality gap as the stopping
//!   criterion.

use crate::opt::solve_linear;
use crate::qmat::{eigh, ComplexMatrix};

/// Result of maximizing λ_min(M(w)) over the simplex.
#[derive(Debug, Clone)]
pub struct EigFeasibility {
    /// Best achieved λ_min.
    pub value: f64,
    /// Maximizing weights.
    pub weights: Vec<f64>,
    pub iterations: usize,
}

/// Maximize λ_min(base + Σ w_k A_k) over the probability simplex by interior
/// path-following. The A_k must be Hermitian.
pub fn max_min_eigenvalue(base: &ComplexMatrix, ops: &[ComplexMatrix]) -> EigFeasibility {
    let k = ops.len();
    assert!(k >= 1);
    let n = base.rows;
    if k == 1 {
        let m = base.add(&ops[0]);
        let value = eigh(&m, 1e-7).map(|e| e.min_value()).unwrap_or(f64::NEG_INFINITY);
        return EigFeasibility {
            value,
            weights: vec![1.0],
            iterations: 0,
        };
    }

    // Variables: x = (w_1..w_{k-1}, t); w_k = 1 - Σ w_j.
    // Maximize t + μ [log det(M(w) - tI) + Σ_j log w_j].
    let m_of = |w: &[f64]| -> ComplexMatrix {
        let mut m = base.clone();
        for (wk, a) in w.iter().zip(ops.iter()) {
            m = m.add(&a.scale_re(*wk));
        }
        m
    };
    let full_w = |x: &[f64]| -> Vec<f64> {
        let mut w: Vec<f64> = x[..k - 1].to_vec();
        let last = 1.0 - w.iter().sum::<f64>();
        w.push(last);
        w
    };

    let mut x = vec![1.0 / k as f64; k - 1];
    let w0 = full_w(&x);
    let m0 = m_of(&w0);
    let lam0 = eigh(&m0, 1e-7).map(|e| e.min_value()).unwrap_or(0.0);
    let scale = m0.max_abs().max(1.0);
    x.push(lam0 - 0.5 * scale.max(1.0)); // t strictly below λ_min

    let mut iterations = 0usize;
    let mut mu = 0.1 * scale;
    while mu > 1e-13 * scale {
        for _ in 0..40 {
            iterations += 1;
            let w = full_w(&x);
            let t = x[k - 1];
            let m = m_of(&w);
            let mut shifted = m.clone();
            for i in 0..n {
                let v = shifted.get(i, i);
                shifted.set(i, i, v - num_complex::Complex::new(t, 0.0));
            }
            let eig = match eigh(&shifted, 1e-6) {
                Ok(e) => e,
                Err(_) => break,
            };
            if eig.min_value() <= 0.0 {
                // out of the domain; should not happen with damped steps
                break;
            }
            let a_inv = eig.apply_fn(|l| 1.0 / l);
            let a_inv2 = eig.apply_fn(|l| 1.0 / (l * l));

            // D_j = A_j - A_k (eliminating w_k)
            let diffs: Vec<ComplexMatrix> =
                (0..k - 1).map(|j| ops[j].sub(&ops[k - 1])).collect();

            let wk_last = w[k - 1];
            let mut grad = vec![0.0f64; k];
            let mut hess = vec![vec![0.0f64; k]; k];
            for j in 0..k - 1 {
                grad[j] = mu
                    * (a_inv.matmul(&diffs[j]).trace().re + 1.0 / w[j] - 1.0 / wk_last);
            }
            grad[k - 1] = 1.0 - mu * a_inv.trace().re;

            for j in 0..k - 1 {
                for l in j..k - 1 {
                    let tr = a_inv
                        .matmul(&diffs[l])
                        .matmul(&a_inv)
                        .matmul(&diffs[j])
                        .trace()
                        .re;
                    let mut h = -mu * tr - mu / (wk_last * wk_last);
                    if j == l {
                        h -= mu / (w[j] * w[j]);
                    }
                    hess[j][l] = h;
                    hess[l][j] = h;
                }
                let cross = mu * a_inv2.matmul(&diffs[j]).trace().re;
                hess[j][k - 1] = cross;
                hess[k - 1][j] = cross;
            }
            hess[k - 1][k - 1] = -mu * a_inv2.trace().re;

            // Newton step: solve H d = -g (H negative definite for concave obj)
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = match solve_linear(&hess, &rhs) {
                Some(s) => s,
                None => break,
            };

            // damped line search staying inside the domain
            let mut alpha = 1.0f64;
            let mut accepted = false;
            for _ in 0..60 {
                let mut cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
                let wc = full_w(&cand);
                if wc.iter().all(|&wi| wi > 1e-14) {
                    let mc = m_of(&wc);
                    let tc = cand[k - 1];
                    let mut sc = mc.clone();
                    for i in 0..n {
                        let v = sc.get(i, i);
                        sc.set(i, i, v - num_complex::Complex::new(tc, 0.0));
                    }
                    if let Ok(e) = eigh(&sc, 1e-6) {
                        if e.min_value() > 0.0 {
                            x = std::mem::take(&mut cand);
                            accepted = true;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            let g_norm: f64 = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if g_norm < 1e-11 * (1.0 + scale) {
                break;
            }
        }
        mu *= 0.2;
    }

    let w = full_w(&x);
    let m = m_of(&w);
    let value = eigh(&m, 1e-7).map(|e| e.min_value()).unwrap_or(f64::NEG_INFINITY);
    EigFeasibility {
        value,
        weights: w,
        iterations,
    }
}

/// Result of a mirror-descent run on the simplex.
#[derive(Debug, Clone)]
pub struct MirrorDescent {
    pub weights: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Certified simplex duality gap ⟨g, w⟩ − min_k g_k at the last iterate.
    pub gap: f64,
}

/// Minimize a convex objective over the simplex by exponentiated-gradient
/// mirror descent. `oracle(w)` returns (value, gradient). The gap
/// ⟨g, w⟩ − min_k g_k upper-bounds f(w) − f* and is the stopping criterion.
pub fn mirror_descent<F>(k: usize, max_iters: usize, gap_tol: f64, mut oracle: F) -> MirrorDescent
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    assert!(k >= 1);
    let mut w = vec![1.0 / k as f64; k];
    if k == 1 {
        let (value, _) = oracle(&w);
        return MirrorDescent {
            weights: w,
            value,
            iterations: 1,
            gap: 0.0,
        };
    }
    let mut best_w = w.clone();
    let (mut best_value, _) = oracle(&w);
    let mut gap = f64::INFINITY;
    let mut iterations = 0usize;
    let mut step = 1.0f64;
    let mut prev_value = best_value;
    for t in 0..max_iters {
        iterations = t + 1;
        let (value, grad) = oracle(&w);
        if value < best_value {
            best_value = value;
            best_w = w.clone();
        }
        let inner: f64 = grad.iter().zip(w.iter()).map(|(g, wi)| g * wi).sum();
        let min_g = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        gap = inner - min_g;
        if gap.abs() <= gap_tol {
            break;
        }
        // adaptive step: shrink when the objective stalls
        if value > prev_value + 1e-15 {
            step *= 0.7;
        }
        prev_value = value;
        let g_scale = grad.iter().map(|g| g.abs()).fold(0.0f64, f64::max).max(1e-12);
        let eta = step / g_scale;
        let mut z = 0.0;
        for (wi, gi) in w.iter_mut().zip(grad.iter()) {
            *wi *= (-eta * gi).exp();
            *wi = wi.max(1e-300);
            z += *wi;
        }
        for wi in w.iter_mut() {
            *wi /= z;
        }
    }
    let (final_value, final_grad) = oracle(&w);
    if final_value < best_value {
        best_value = final_value;
        best_w = w;
        let inner: f64 = final_grad.iter().zip(best_w.iter()).map(|(g, wi)| g * wi).sum();
        let min_g = final_grad.iter().cloned().fold(f64::INFINITY, f64::min);
        gap = inner - min_g;
    }
    MirrorDescent {
        weights: best_w,
        value: best_value,
        iterations,
        gap,
    }
}

/// Assemble σ(w) = Σ w_k E_k.
pub fn mix(extremes: &[ComplexMatrix], w: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(extremes[0].rows, extremes[0].cols);
    for (wk, e) in w.iter().zip(extremes.iter()) {
        if *wk != 0.0 {
            m = m.add(&e.scale_re(*wk));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::Complex64;

    #[test]
    fn barrier_solver_on_diagonal_problem() {
        // maximize min(w1 - 0.3, w2 - 0.5): optimum at w = (0.4, 0.6), value 0.1
        let base = ComplexMatrix::from_diag(&[-0.3, -0.5]);
        let ops = vec![
            ComplexMatrix::from_diag(&[1.0, 0.0]),
            ComplexMatrix::from_diag(&[0.0, 1.0]),
        ];
        let sol = max_min_eigenvalue(&base, &ops);
        assert!((sol.value - 0.1).abs() < 1e-8, "value {}", sol.value);
        assert!((sol.weights[0] - 0.4).abs() < 1e-6);
    }

    #[test]
    fn barrier_solver_with_coherent_target() {
        // feasibility of r·diag(w) ⪰ ρ for ρ = |+⟩⟨+| at r = 2:
        // max λ_min(2 diag(w) − ρ): by symmetry w = (1/2, 1/2):
        // matrix = [[0.5, -0.5], [-0.5, 0.5]], λ_min = 0.
        let mut rho = ComplexMatrix::from_diag(&[0.5, 0.5]);
        rho.set(0, 1, Complex64::new(0.5, 0.0));
        rho.set(1, 0, Complex64::new(0.5, 0.0));
        let base = rho.scale_re(-1.0);
        let ops = vec![
            ComplexMatrix::from_diag(&[2.0, 0.0]),
            ComplexMatrix::from_diag(&[0.0, 2.0]),
        ];
        let sol = max_min_eigenvalue(&base, &ops);
        assert!(sol.value.abs() < 1e-8, "value {}", sol.value);
    }

    #[test]
    fn mirror_descent_quadratic() {
        // minimize Σ (w_k - c_k)² with c inside the simplex
        let c = [0.2, 0.3, 0.5];
        let sol = mirror_descent(3, 20000, 1e-12, |w| {
            let value: f64 = w.iter().zip(c.iter()).map(|(wi, ci)| (wi - ci).powi(2)).sum();
            let grad: Vec<f64> = w.iter().zip(c.iter()).map(|(wi, ci)| 2.0 * (wi - ci)).collect();
            (value, grad)
        });
        assert!(sol.value < 1e-10, "value {}", sol.value);
        for (wi, ci) in sol.weights.iter().zip(c.iter()) {
            assert!((wi - ci).abs() < 1e-4);
        }
    }

    #[test]
    fn mirror_descent_linear_hits_vertex() {
        let sol = mirror_descent(3, 5000, 1e-10, |w| {
            let g = vec![1.0, 0.5, 2.0];
            let value: f64 = w.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
            (value, g)
        });
        assert!((sol.value - 0.5).abs() < 1e-6);
        assert!((sol.weights[1] - 1.0).abs() < 1e-4);
    }
}
