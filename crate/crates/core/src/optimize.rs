//! Derivative-free maximization inside a box.

/// Result of a bounded search.
#[derive(Debug, Clone)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub xtol: f64,
    pub ftol: f64,
    /// Initial simplex edge as a fraction of each box width.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_evals: 4000, xtol: 1e-12, ftol: 1e-15, initial_step: 0.05 }
    }
}

fn clamp(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(l, h);
    }
}

/// Maximizes `f` over the box `[lo, hi]` starting from `x0`.
///
/// Trial points are projected back into the box before evaluation.
pub fn nelder_mead_max(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    opts: NelderMeadOptions,
) -> Optimum {
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        -f(x)
    };
    if n == 0 {
        let v = eval(&[]);
        return Optimum { x: vec![], value: -v, evaluations: 1 };
    }

    let mut start = x0.to_vec();
    clamp(&mut start, lo, hi);
    let mut simplex: Vec<Vec<f64>> = vec![start.clone()];
    for i in 0..n {
        let mut p = start.clone();
        let width = (hi[i] - lo[i]).max(0.0);
        let step = opts.initial_step * if width > 0.0 { width } else { 1.0 };
        p[i] = if p[i] + step <= hi[i] { p[i] + step } else { p[i] - step };
        clamp(&mut p, lo, hi);
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while evals.get() < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.abs() <= opts.ftol && size <= opts.xtol.max(1e-300) {
            break;
        }
        if size <= opts.xtol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (cv, pv) in centroid.iter_mut().zip(p) {
                *cv += pv / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect();
            clamp(&mut p, lo, hi);
            p
        };

        let xr = along(-alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(-gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let x = along(-rho);
                let v = eval(&x);
                (x, v)
            } else {
                let x = along(rho);
                let v = eval(&x);
                (x, v)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    let mut p: Vec<f64> =
                        simplex[i].iter().zip(&best).map(|(v, b)| b + sigma * (v - b)).collect();
                    clamp(&mut p, lo, hi);
                    values[i] = eval(&p);
                    simplex[i] = p;
                }
            }
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Optimum { x: simplex[best].clone(), value: -values[best], evaluations: evals.get() }
}

/// Grid scan of `per_axis` points per axis, then Nelder-Mead from the
/// `restarts` best grid cells. Axes with `lo == hi` are held fixed.
pub fn grid_then_refine(
    f: &impl Fn(&[f64]) -> f64,
    lo: &[f64],
    hi: &[f64],
    per_axis: usize,
    restarts: usize,
    opts: NelderMeadOptions,
) -> Optimum {
    let n = lo.len();
    let per_axis = per_axis.max(2);
    let axis_points = |i: usize| -> usize { if hi[i] > lo[i] { per_axis } else { 1 } };
    let total: usize = (0..n).map(axis_points).product();

    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total.max(1) {
        let x: Vec<f64> = (0..n)
            .map(|i| {
                let k = axis_points(i);
                if k == 1 {
                    lo[i]
                } else {
                    lo[i] + (hi[i] - lo[i]) * idx[i] as f64 / (k - 1) as f64
                }
            })
            .collect();
        let v = f(&x);
        scored.push((if v.is_nan() { f64::NEG_INFINITY } else { v }, x));
        for i in 0..n {
            idx[i] += 1;
            if idx[i] < axis_points(i) {
                break;
            }
            idx[i] = 0;
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut evals = scored.len();
    let mut best = Optimum { x: scored[0].1.clone(), value: scored[0].0, evaluations: 0 };
    for (_, start) in scored.iter().take(restarts.max(1)) {
        let opt = nelder_mead_max(f, start, lo, hi, opts);
        evals += opt.evaluations;
        if opt.value > best.value {
            best = opt;
        }
    }
    best.evaluations = evals;
    best
}
