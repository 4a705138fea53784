use super::linalg::{solve2_real, Mat2};

/// Outcome of a two-variable minimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum2 {
    pub point: [f64; 2],
    pub value: f64,
    pub gradient: [f64; 2],
    pub iterations: usize,
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Quasi-Newton minimization with an Armijo backtracking line search,
/// followed by Newton steps on a finite-difference Hessian of the analytic
/// gradient. `objective` returns `None` outside its domain.
///
/// Stops once `gradient_norm(point, gradient) ≤ tolerance`.
pub fn minimize2<F, G>(
    objective: F,
    start: [f64; 2],
    tolerance: f64,
    max_iterations: usize,
    gradient_norm: G,
) -> Option<Minimum2>
where
    F: Fn([f64; 2]) -> Option<(f64, [f64; 2])>,
    G: Fn([f64; 2], [f64; 2]) -> f64,
{
    let mut x = start;
    let (mut f, mut g) = objective(x)?;
    let mut h: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut iterations = 0;
    while iterations < max_iterations {
        if gradient_norm(x, g) <= tolerance {
            break;
        }
        iterations += 1;
        let mut d = [-(h[0][0] * g[0] + h[0][1] * g[1]), -(h[1][0] * g[0] + h[1][1] * g[1])];
        let mut slope = d[0] * g[0] + d[1] * g[1];
        if slope >= 0.0 {
            h = [[1.0, 0.0], [0.0, 1.0]];
            d = [-g[0], -g[1]];
            slope = -(g[0] * g[0] + g[1] * g[1]);
        }
        // cap the step so a bad curvature estimate cannot leave the domain
        let dn = norm(d);
        if dn > 1.0 {
            d = [d[0] / dn, d[1] / dn];
            slope /= dn;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [x[0] + step * d[0], x[1] + step * d[1]];
            if let Some((ft, gt)) = objective(trial) {
                if ft <= f + 1e-4 * step * slope {
                    accepted = Some((trial, ft, gt));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gn)) = accepted else {
            break;
        };
        let s = [xn[0] - x[0], xn[1] - x[1]];
        let y = [gn[0] - g[0], gn[1] - g[1]];
        let sy = s[0] * y[0] + s[1] * y[1];
        if sy > 1e-14 * norm(s) * norm(y) {
            // BFGS update of the inverse Hessian
            let hy = [h[0][0] * y[0] + h[0][1] * y[1], h[1][0] * y[0] + h[1][1] * y[1]];
            let yhy = y[0] * hy[0] + y[1] * hy[1];
            let rho = 1.0 / sy;
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let stalled = (f - fnew).abs() <= 1e-16 * f.abs() && norm(s) <= 1e-14 * (1.0 + norm(x));
        x = xn;
        f = fnew;
        g = gn;
        if stalled {
            break;
        }
    }
    // Newton polish
    for _ in 0..8 {
        if gradient_norm(x, g) <= 0.01 * tolerance {
            break;
        }
        let Some(hess) = fd_hessian(&objective, x) else { break };
        let Some(step) = solve2_real(hess, [-g[0], -g[1]]) else { break };
        let trial = [x[0] + step[0], x[1] + step[1]];
        let Some((ft, gt)) = objective(trial) else { break };
        if gradient_norm(trial, gt) >= gradient_norm(x, g) {
            break;
        }
        x = trial;
        f = ft;
        g = gt;
        iterations += 1;
    }
    Some(Minimum2 {
        point: x,
        value: f,
        gradient: g,
        iterations,
    })
}

fn fd_hessian<F>(objective: &F, x: [f64; 2]) -> Option<Mat2>
where
    F: Fn([f64; 2]) -> Option<(f64, [f64; 2])>,
{
    let mut hess = [[0.0; 2]; 2];
    for j in 0..2 {
        let h = 1e-5 * (1.0 + x[j].abs());
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let (_, gp) = objective(xp)?;
        let (_, gm) = objective(xm)?;
        for i in 0..2 {
            hess[i][j] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let off = 0.5 * (hess[0][1] + hess[1][0]);
    hess[0][1] = off;
    hess[1][0] = off;
    Some(hess)
}

/// Minimizes a smooth convex function of one variable given its derivative,
/// by safeguarded Newton on the derivative. Returns `(argmin, second
/// derivative at argmin)`.
pub fn minimize1<D>(derivative: D, start: f64, scale: f64, tolerance: f64) -> Option<(f64, f64)>
where
    D: Fn(f64) -> Option<f64>,
{
    let fd2 = |t: f64| -> Option<f64> {
        let h = 1e-5 * scale.max(t.abs() * 1e-3);
        Some((derivative(t + h)? - derivative(t - h)?) / (2.0 * h))
    };
    // bracket the sign change of the derivative
    let d0 = derivative(start)?;
    if d0 == 0.0 {
        return Some((start, fd2(start)?));
    }
    let dir = if d0 > 0.0 { -1.0 } else { 1.0 };
    let (mut lo, mut hi) = (start, start);
    let mut step = scale;
    let mut found = false;
    for _ in 0..200 {
        let t = start + dir * step;
        let d = derivative(t)?;
        if d.signum() != d0.signum() {
            if dir > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            found = true;
            break;
        }
        if dir > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        step *= 2.0;
    }
    if !found {
        return None;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let d = derivative(t)?;
        if d.abs() <= tolerance {
            break;
        }
        if d > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let curvature = fd2(t)?;
        let newton = t - d / curvature;
        t = if curvature > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    Some((t, fd2(t)?))
}
