//! Derivative-free minimization with Powell's conjugate-direction method.
//!
//! Each sweep line-minimizes along every direction of the current set,
//! then applies Powell's replacement heuristic: when the extrapolated
//! point test passes, the direction of largest decrease is discarded in
//! favor of the net sweep displacement. Line minimization brackets the
//! minimum by golden-ratio expansion and polishes it with Brent's
//! parabolic/golden-section search.

use crate::error::Error;
use crate::Result;

/// Knobs for [`powell_minimize`] and for model training built on top of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Sweep convergence: stop when 2|df| <= tol * (|f_old| + |f_new|) + 1e-12.
    pub relative_tolerance: f64,
    /// Maximum number of sweeps.
    pub max_iterations: usize,
    /// Brent tolerance for each 1-D minimization.
    pub line_search_tolerance: f64,
    /// Seed for callers that randomize starting parameters.
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            relative_tolerance: 1e-6,
            max_iterations: 1000,
            line_search_tolerance: 1e-6,
            seed: 0,
        }
    }
}

/// Outcome of a Powell run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowellResult {
    pub x: Vec<f64>,
    pub f: f64,
    /// Completed sweeps.
    pub iterations: usize,
    /// Cost after the start point and after each sweep; non-increasing.
    pub trace: Vec<f64>,
}

const SWEEP_TINY: f64 = 1e-12;

/// Minimize `f` from `x0` using conjugate-direction sweeps.
///
/// The initial direction set is the coordinate basis. Returns an error if
/// the objective ever evaluates to a non-finite value.
pub fn powell_minimize<F>(
    mut f: F,
    x0: &[f64],
    settings: &OptimizerSettings,
) -> Result<PowellResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut eval = |x: &[f64]| -> Result<f64> {
        let value = f(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteCost {
                context: format!("objective returned {value} at x = {x:?}"),
            });
        }
        Ok(value)
    };

    let mut x = x0.to_vec();
    let mut fx = eval(&x)?;
    let mut trace = vec![fx];
    let mut iterations = 0;

    if n == 0 {
        return Ok(PowellResult {
            x,
            f: fx,
            iterations,
            trace,
        });
    }

    let mut directions: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            d
        })
        .collect();

    for sweep in 1..=settings.max_iterations {
        let f_start = fx;
        let x_start = x.clone();
        let mut biggest_drop = 0.0;
        let mut biggest_index = 0;

        for (i, direction) in directions.iter_mut().enumerate() {
            let f_before = fx;
            fx = line_minimize(&mut eval, &mut x, direction, fx, settings.line_search_tolerance)?;
            let drop = f_before - fx;
            if drop > biggest_drop {
                biggest_drop = drop;
                biggest_index = i;
            }
        }

        iterations = sweep;
        trace.push(fx);

        if 2.0 * (f_start - fx) <= settings.relative_tolerance * (f_start.abs() + fx.abs()) + SWEEP_TINY
        {
            break;
        }

        // Powell's extrapolated-point test for direction replacement.
        let x_extrapolated: Vec<f64> = x
            .iter()
            .zip(&x_start)
            .map(|(xi, si)| 2.0 * xi - si)
            .collect();
        let mut sweep_direction: Vec<f64> =
            x.iter().zip(&x_start).map(|(xi, si)| xi - si).collect();
        if sweep_direction.iter().all(|d| d.abs() < 1e-300) {
            continue;
        }
        let f_extrapolated = eval(&x_extrapolated)?;
        if f_extrapolated < f_start {
            let df = f_start - fx;
            let t = 2.0 * (f_start - 2.0 * fx + f_extrapolated) * (df - biggest_drop).powi(2)
                - biggest_drop * (f_start - f_extrapolated).powi(2);
            if t < 0.0 {
                fx = line_minimize(
                    &mut eval,
                    &mut x,
                    &mut sweep_direction,
                    fx,
                    settings.line_search_tolerance,
                )?;
                directions[biggest_index] = directions[n - 1].clone();
                directions[n - 1] = sweep_direction;
            }
        }
    }

    Ok(PowellResult {
        x,
        f: fx,
        iterations,
        trace,
    })
}

/// Minimize along one direction: move `point` to the 1-D minimum and
/// rescale `direction` by the step taken. Never returns a value worse
/// than `f_current`.
fn line_minimize<E>(
    eval: &mut E,
    point: &mut [f64],
    direction: &mut Vec<f64>,
    f_current: f64,
    tol: f64,
) -> Result<f64>
where
    E: FnMut(&[f64]) -> Result<f64>,
{
    let scale_sqr: f64 = direction.iter().map(|d| d * d).sum();
    if scale_sqr < 1e-300 {
        return Ok(f_current);
    }

    let mut probe = vec![0.0; point.len()];
    let mut g = |t: f64| -> Result<f64> {
        for ((p, base), d) in probe.iter_mut().zip(point.iter()).zip(direction.iter()) {
            *p = base + t * d;
        }
        eval(&probe)
    };

    let (a, b, c, fb) = bracket(&mut g, f_current)?;
    let (t_min, f_min) = brent(&mut g, a, b, c, fb, tol)?;

    // keep the strictly better of the Brent point and the start
    if f_min <= f_current {
        for (p, d) in point.iter_mut().zip(direction.iter()) {
            *p += t_min * d;
        }
        for d in direction.iter_mut() {
            *d *= t_min;
        }
        Ok(f_min)
    } else {
        Ok(f_current)
    }
}

const GOLD: f64 = 1.618034;
const GLIMIT: f64 = 100.0;
const BRACKET_TINY: f64 = 1e-20;

/// Golden-ratio bracketing from t = 0 with unit initial step. Returns
/// (a, b, c, f(b)) with f(b) <= min(f(a), f(c)) and f(b) <= f(0).
fn bracket<G>(g: &mut G, f_at_zero: f64) -> Result<(f64, f64, f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut ax = 0.0;
    let mut bx = 1.0;
    let mut fa = f_at_zero;
    let mut fb = g(bx)?;
    if fb > fa {
        std::mem::swap(&mut ax, &mut bx);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut cx = bx + GOLD * (bx - ax);
    let mut fc = g(cx)?;
    while fb > fc {
        let r = (bx - ax) * (fb - fc);
        let q = (bx - cx) * (fb - fa);
        let denom = 2.0 * (q - r).abs().max(BRACKET_TINY) * (q - r).signum_or_one();
        let mut u = bx - ((bx - cx) * q - (bx - ax) * r) / denom;
        let ulim = bx + GLIMIT * (cx - bx);
        let mut fu;
        if (bx - u) * (u - cx) > 0.0 {
            fu = g(u)?;
            if fu < fc {
                return Ok((bx, u, cx, fu));
            } else if fu > fb {
                return Ok((ax, bx, u, fb));
            }
            u = cx + GOLD * (cx - bx);
            fu = g(u)?;
        } else if (cx - u) * (u - ulim) > 0.0 {
            fu = g(u)?;
            if fu < fc {
                bx = cx;
                cx = u;
                u = cx + GOLD * (cx - bx);
                fb = fc;
                fc = fu;
                fu = g(u)?;
            }
        } else if (u - ulim) * (ulim - cx) >= 0.0 {
            u = ulim;
            fu = g(u)?;
        } else {
            u = cx + GOLD * (cx - bx);
            fu = g(u)?;
        }
        ax = bx;
        bx = cx;
        cx = u;
        fa = fb;
        fb = fc;
        fc = fu;
    }
    Ok((ax, bx, cx, fb))
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

const CGOLD: f64 = 0.381_966_0;
const ZEPS: f64 = 1e-10;
const BRENT_MAX_ITER: usize = 100;

/// Brent's 1-D minimization inside the bracket (a, b, c) where f(b) is
/// already known to be the smallest of the three.
fn brent<G>(g: &mut G, ax: f64, bx: f64, cx: f64, fbx: f64, tol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut a = ax.min(cx);
    let mut b = ax.max(cx);
    let mut x = bx;
    let mut w = bx;
    let mut v = bx;
    let mut fx = fbx;
    let mut fw = fbx;
    let mut fv = fbx;
    let mut d = 0.0f64;
    let mut e = 0.0f64;

    for _ in 0..BRENT_MAX_ITER {
        let mid = 0.5 * (a + b);
        let tol1 = tol * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, fx));
        }
        let mut use_golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid > x { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x >= mid { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1 * d.signum_or_one()
        };
        let fu = g(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_quadratic_recovers_minimum() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2);
        let result = powell_minimize(f, &[0.0, 0.0], &OptimizerSettings::default()).unwrap();
        assert!((result.x[0] - 3.0).abs() < 1e-4, "x0 = {}", result.x[0]);
        assert!((result.x[1] + 1.0).abs() < 1e-4, "x1 = {}", result.x[1]);
        assert!(result.f < 1e-8);
    }

    #[test]
    fn ten_dimensional_sphere() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let x0 = vec![1.0; 10];
        let result = powell_minimize(f, &x0, &OptimizerSettings::default()).unwrap();
        assert!(result.f < 1e-8, "f = {}", result.f);
    }

    #[test]
    fn rosenbrock_2d() {
        let f = |x: &[f64]| {
            let a = 1.0 - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + 100.0 * b * b
        };
        let settings = OptimizerSettings {
            max_iterations: 500,
            ..OptimizerSettings::default()
        };
        let result = powell_minimize(f, &[-1.2, 1.0], &settings).unwrap();
        assert!(result.f < 1e-4, "f = {} after {} sweeps", result.f, result.iterations);
        assert!(result.iterations <= 500);
    }

    #[test]
    fn zero_sweep_budget_returns_start() {
        let f = |x: &[f64]| x[0] * x[0] + 7.0;
        let settings = OptimizerSettings {
            max_iterations: 0,
            ..OptimizerSettings::default()
        };
        let result = powell_minimize(f, &[2.0], &settings).unwrap();
        assert_eq!(result.x, vec![2.0]);
        assert_eq!(result.f, 11.0);
        assert_eq!(result.iterations, 0);
        assert_eq!(result.trace, vec![11.0]);
    }

    #[test]
    fn trace_is_non_increasing() {
        let f = |x: &[f64]| {
            (x[0] - 0.3).powi(2) * (1.1 + (5.0 * x[0]).sin()) + (x[1] * x[1] - 1.0).powi(2)
        };
        let result = powell_minimize(f, &[2.0, 2.0], &OptimizerSettings::default()).unwrap();
        for pair in result.trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "trace increased: {pair:?}");
        }
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let f = |x: &[f64]| {
            if x[0] > 0.5 {
                f64::NAN
            } else {
                x[0] * x[0]
            }
        };
        let result = powell_minimize(f, &[0.4], &OptimizerSettings::default());
        assert!(matches!(result, Err(Error::NonFiniteCost { .. })));
    }
}
