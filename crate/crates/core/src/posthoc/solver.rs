//! Small dense eigenvalue optimization over a family of symmetric matrices
//! `F(c) = Σ c_k F_k`.
//!
//! * [`maximize_lambda_min`]: `max λ_min(F(c))` over `‖c‖ ≤ 1` by a log-det
//!   barrier method, followed by a sphere search when the ball optimum is not
//!   clearly positive.
//! * [`minimize_weighted_trace`]: `min wᵀc` subject to `F(c) ⪰ I`, barrier path
//!   following from a strictly feasible start.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{SolverOptions, Tolerances};
use crate::error::{Error, Result};
use crate::matrix::{cholesky, cholesky_inverse, dot, norm, sym_eig, RealMatrix};

/// Newton steps allowed for one centering problem.
const CENTERING_STEPS: usize = 80;
const ARMIJO: f64 = 0.25;
/// Directions sampled before the sphere search chooses its starts.
const SPHERE_SAMPLES: usize = 256;

fn combine(family: &[RealMatrix], c: &[f64]) -> RealMatrix {
    let mut out = RealMatrix::zeros(family[0].dim());
    for (ck, f) in c.iter().zip(family) {
        if *ck != 0.0 {
            out.axpy(*ck, f);
        }
    }
    out
}

fn lambda_min_of(family: &[RealMatrix], c: &[f64]) -> f64 {
    sym_eig(&combine(family, c), f64::INFINITY)
        .expect("symmetric combination")
        .min()
}

/// `log det(S)` when `S` is positive definite.
fn log_det(s: &RealMatrix) -> Option<(f64, RealMatrix)> {
    let l = cholesky(s)?;
    let ld = (0..s.dim()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    Some((ld, l))
}

/// Solves the Newton system, adding a small ridge if the Hessian is not
/// numerically positive definite.
fn newton_direction(hess: &RealMatrix, grad: &[f64]) -> Option<Vec<f64>> {
    let mut h = hess.clone();
    let scale = (0..h.dim()).map(|i| h[(i, i)].abs()).fold(1e-300, f64::max);
    let mut ridge = 0.0;
    for _ in 0..8 {
        if let Some(l) = cholesky(&h) {
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            return Some(crate::matrix::cholesky_solve(&l, &neg));
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
        for i in 0..h.dim() {
            h[(i, i)] = hess[(i, i)] + ridge;
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct LambdaMinOutcome {
    /// Best `λ_min(F(c))` found on the unit sphere; `-∞` for an empty family.
    pub value: f64,
    /// Unit-norm coefficients attaining `value` (empty for an empty family).
    pub coefficients: Vec<f64>,
    /// Optimal value over the unit ball from the barrier phase.
    pub ball_value: f64,
    pub newton_steps: usize,
}

/// Maximizes `λ_min(Σ c_k F_k)` over the unit sphere.
///
/// The barrier phase solves `max t` s.t. `F(c) − tI ⪰ 0`, `‖c‖² ≤ 1`, a convex
/// problem whose optimum equals the sphere maximum whenever that maximum is
/// positive. When the ball optimum does not exceed `feas_tol` the sphere
/// maximum is sought by a seeded supergradient and smoothed ascent search.
pub fn maximize_lambda_min(
    family: &[RealMatrix],
    tol: &Tolerances,
    opts: &SolverOptions,
) -> Result<LambdaMinOutcome> {
    let k = family.len();
    if k == 0 {
        return Ok(LambdaMinOutcome {
            value: f64::NEG_INFINITY,
            coefficients: Vec::new(),
            ball_value: 0.0,
            newton_steps: 0,
        });
    }
    if k == 1 {
        let plus = lambda_min_of(family, &[1.0]);
        let minus = lambda_min_of(family, &[-1.0]);
        let (value, c) = if plus >= minus { (plus, 1.0) } else { (minus, -1.0) };
        return Ok(LambdaMinOutcome {
            value,
            coefficients: vec![c],
            ball_value: value.max(0.0),
            newton_steps: 0,
        });
    }

    let (c_ball, t_ball, steps) = barrier_max_lambda_min(family, tol, opts)?;
    let nc = norm(&c_ball);
    if t_ball > tol.feas_tol && nc > 0.0 {
        let unit: Vec<f64> = c_ball.iter().map(|x| x / nc).collect();
        let value = lambda_min_of(family, &unit);
        let polished = smoothed_ascent(family, unit.clone(), value);
        let (value, coefficients) = if polished.0 > value { polished } else { (value, unit) };
        return Ok(LambdaMinOutcome {
            value,
            coefficients,
            ball_value: t_ball,
            newton_steps: steps,
        });
    }

    let hint = (nc > 0.0).then(|| c_ball.iter().map(|x| x / nc).collect::<Vec<_>>());
    let (value, coefficients) = sphere_search(family, hint, opts);
    Ok(LambdaMinOutcome {
        value,
        coefficients,
        ball_value: t_ball,
        newton_steps: steps,
    })
}

/// Barrier method for `max t` s.t. `F(c) − tI ⪰ 0`, `‖c‖² ≤ 1`.
fn barrier_max_lambda_min(
    family: &[RealMatrix],
    tol: &Tolerances,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, f64, usize)> {
    let k = family.len();
    let n = family[0].dim();
    let nu = (n + 1) as f64;
    let identity = RealMatrix::identity(n);

    // z = (c, t)
    let mut z = vec![0.0; k + 1];
    z[k] = -1.0;
    let mut tau = 1.0;
    let mut steps = 0;

    let phi = |z: &[f64], tau: f64| -> Option<f64> {
        let r = dot(&z[..k], &z[..k]);
        if r >= 1.0 {
            return None;
        }
        let mut s = combine(family, &z[..k]);
        s.axpy(-z[k], &identity);
        let (ld, _) = log_det(&s)?;
        Some(-tau * z[k] - ld - (1.0 - r).ln())
    };

    loop {
        for _ in 0..CENTERING_STEPS {
            let r = dot(&z[..k], &z[..k]);
            let mut s = combine(family, &z[..k]);
            s.axpy(-z[k], &identity);
            let (_, l) = log_det(&s).expect("iterate stays strictly feasible");
            let y = cholesky_inverse(&l);
            let yf: Vec<RealMatrix> = family.iter().map(|f| &y * f).collect();
            let y2 = &y * &y;

            let mut grad = vec![0.0; k + 1];
            let mut hess = RealMatrix::zeros(k + 1);
            let q = 1.0 - r;
            for a in 0..k {
                grad[a] = -yf[a].trace() + 2.0 * z[a] / q;
                for b in a..k {
                    let v = trace_product(&yf[a], &yf[b])
                        + if a == b { 2.0 / q } else { 0.0 }
                        + 4.0 * z[a] * z[b] / (q * q);
                    hess[(a, b)] = v;
                    hess[(b, a)] = v;
                }
                let v = -trace_product(&y2, &family[a]);
                hess[(a, k)] = v;
                hess[(k, a)] = v;
            }
            grad[k] = -tau + y.trace();
            hess[(k, k)] = trace_product(&y, &y);

            let Some(dz) = newton_direction(&hess, &grad) else {
                return Err(Error::SolverStall {
                    iterations: steps,
                    detail: "singular Newton system in the lambda_min barrier".into(),
                });
            };
            let slope = dot(&grad, &dz);
            if -slope / 2.0 <= 1e-10 {
                break;
            }
            steps += 1;
            if steps > opts.max_newton_steps {
                return Err(Error::SolverStall {
                    iterations: steps,
                    detail: "lambda_min barrier did not converge".into(),
                });
            }
            let f0 = phi(&z, tau).expect("current iterate is feasible");
            let mut step = 1.0;
            loop {
                let trial: Vec<f64> = z.iter().zip(&dz).map(|(a, b)| a + step * b).collect();
                if let Some(f) = phi(&trial, tau) {
                    if f <= f0 + ARMIJO * step * slope {
                        z = trial;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            if step < 1e-14 {
                break;
            }
        }
        if nu / tau < tol.sdp_tol {
            break;
        }
        tau *= 10.0;
    }
    let t = z[k];
    z.truncate(k);
    Ok((z, t, steps))
}

/// `Tr[A B]` without forming the product.
fn trace_product(a: &RealMatrix, b: &RealMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

fn normalize(mut c: Vec<f64>) -> Vec<f64> {
    let n = norm(&c);
    if n > 0.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
    c
}

/// Supergradient `(v_minᵀ F_k v_min)_k` and value of `λ_min` at `c`.
fn supergradient(family: &[RealMatrix], c: &[f64]) -> (f64, Vec<f64>) {
    let eig = sym_eig(&combine(family, c), f64::INFINITY).expect("symmetric combination");
    let v = eig.eigenvector(eig.values.len() - 1);
    let g = family.iter().map(|f| dot(&v, &f.mul_vec(&v))).collect();
    (eig.min(), g)
}

/// Seeded multi-start search for the sphere maximum of `λ_min(F(c))`.
fn sphere_search(family: &[RealMatrix], hint: Option<Vec<f64>>, opts: &SolverOptions) -> (f64, Vec<f64>) {
    let k = family.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sampled: Vec<(f64, Vec<f64>)> = (0..SPHERE_SAMPLES.max(opts.restarts))
        .map(|_| {
            let c = normalize((0..k).map(|_| StandardNormal.sample(&mut rng)).collect());
            (lambda_min_of(family, &c), c)
        })
        .collect();
    sampled.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut starts: Vec<Vec<f64>> = sampled.into_iter().take(opts.restarts).map(|p| p.1).collect();
    if let Some(h) = hint {
        starts.insert(0, h);
    }

    let mut results: Vec<(f64, Vec<f64>)> = starts
        .into_iter()
        .map(|start| {
            let mut c = start;
            let (mut best, _) = supergradient(family, &c);
            let mut best_c = c.clone();
            for it in 0..opts.max_iterations {
                let (val, g) = supergradient(family, &c);
                if val > best {
                    best = val;
                    best_c = c.clone();
                }
                let radial = dot(&g, &c);
                let tangent: Vec<f64> = g.iter().zip(&c).map(|(gi, ci)| gi - radial * ci).collect();
                let tn = norm(&tangent);
                if tn < 1e-14 {
                    break;
                }
                let step = 0.5 / ((it + 1) as f64).sqrt();
                c = normalize(c.iter().zip(&tangent).map(|(ci, ti)| ci + step * ti / tn).collect());
            }
            (best, best_c)
        })
        .collect();
    results.sort_by(|a, b| b.0.total_cmp(&a.0));
    results.truncate(3);
    results
        .into_iter()
        .map(|(v, c)| {
            let p = smoothed_ascent(family, c.clone(), v);
            if p.0 > v { p } else { (v, c) }
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one start")
}

/// Riemannian gradient ascent on the sphere for the soft-min
/// `λ_min − μ log Σ exp(−(λ_i − λ_min)/μ)`, with `μ` decreasing to 1e-10.
/// Returns the best exact `λ_min` seen.
fn smoothed_ascent(family: &[RealMatrix], mut c: Vec<f64>, start_value: f64) -> (f64, Vec<f64>) {
    let mut best = (start_value, c.clone());
    let soft = |c: &[f64], mu: f64| -> (f64, f64, Vec<f64>) {
        let eig = sym_eig(&combine(family, c), f64::INFINITY).expect("symmetric combination");
        let lmin = eig.min();
        let weights: Vec<f64> = eig.values.iter().map(|l| (-(l - lmin) / mu).exp()).collect();
        let z: f64 = weights.iter().sum();
        let mut g = vec![0.0; family.len()];
        for (i, w) in weights.iter().enumerate() {
            if *w < 1e-18 {
                continue;
            }
            let v = eig.eigenvector(i);
            for (gk, f) in g.iter_mut().zip(family) {
                *gk += w / z * dot(&v, &f.mul_vec(&v));
            }
        }
        (lmin - mu * z.ln(), lmin, g)
    };
    let mut mu = 1e-2;
    while mu >= 1e-10 {
        let mut step = 0.1;
        for _ in 0..60 {
            let (f, lmin, g) = soft(&c, mu);
            if lmin > best.0 {
                best = (lmin, c.clone());
            }
            let radial = dot(&g, &c);
            let tangent: Vec<f64> = g.iter().zip(&c).map(|(gi, ci)| gi - radial * ci).collect();
            let tn2 = dot(&tangent, &tangent);
            if tn2 < 1e-24 {
                break;
            }
            let mut accepted = false;
            while step > 1e-14 {
                let trial = normalize(c.iter().zip(&tangent).map(|(ci, ti)| ci + step * ti).collect());
                let (ft, lt, _) = soft(&trial, mu);
                if ft >= f + 1e-4 * step * tn2 {
                    c = trial;
                    if lt > best.0 {
                        best = (lt, c.clone());
                    }
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        mu *= 0.1;
    }
    best
}

/// Minimizes `Σ w_k c_k` subject to `Σ c_k F_k ⪰ I`, starting from `start`
/// where `Σ start_k F_k − I` must be positive definite. Stops at duality gap
/// `n / τ < gap`.
pub fn minimize_weighted_trace(
    family: &[RealMatrix],
    weights: &[f64],
    start: Vec<f64>,
    gap: f64,
    opts: &SolverOptions,
) -> Result<(f64, Vec<f64>)> {
    let k = family.len();
    let n = family[0].dim();
    let identity = RealMatrix::identity(n);
    let slack = |c: &[f64]| {
        let mut s = combine(family, c);
        s.axpy(-1.0, &identity);
        s
    };
    let phi = |c: &[f64], tau: f64| -> Option<f64> {
        let (ld, _) = log_det(&slack(c))?;
        Some(tau * dot(weights, c) - ld)
    };
    if phi(&start, 1.0).is_none() {
        return Err(Error::BadParams("trace minimization needs a strictly feasible start".into()));
    }

    let mut c = start;
    let mut tau = n as f64 / dot(weights, &c).abs().max(1.0);
    let mut steps = 0;
    loop {
        for _ in 0..CENTERING_STEPS {
            let (_, l) = log_det(&slack(&c)).expect("iterate stays strictly feasible");
            let y = cholesky_inverse(&l);
            let yf: Vec<RealMatrix> = family.iter().map(|f| &y * f).collect();
            let mut grad = vec![0.0; k];
            let mut hess = RealMatrix::zeros(k);
            for a in 0..k {
                grad[a] = tau * weights[a] - yf[a].trace();
                for b in a..k {
                    let v = trace_product(&yf[a], &yf[b]);
                    hess[(a, b)] = v;
                    hess[(b, a)] = v;
                }
            }
            let Some(dc) = newton_direction(&hess, &grad) else {
                return Err(Error::SolverStall {
                    iterations: steps,
                    detail: "singular Newton system in the trace barrier".into(),
                });
            };
            let slope = dot(&grad, &dc);
            if -slope / 2.0 <= 1e-10 {
                break;
            }
            steps += 1;
            if steps > opts.max_newton_steps {
                return Err(Error::SolverStall {
                    iterations: steps,
                    detail: "trace barrier did not converge".into(),
                });
            }
            let f0 = phi(&c, tau).expect("current iterate is feasible");
            let mut step = 1.0;
            loop {
                let trial: Vec<f64> = c.iter().zip(&dc).map(|(a, b)| a + step * b).collect();
                if let Some(f) = phi(&trial, tau) {
                    if f <= f0 + ARMIJO * step * slope {
                        c = trial;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            if step < 1e-14 {
                break;
            }
        }
        if n as f64 / tau < gap {
            break;
        }
        tau *= 10.0;
    }
    Ok((dot(weights, &c), c))
}
