//! Derivative-free simplex minimization.

use crate::scalar::Real;

/// Stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions<T> {
    /// Edge length of the initial simplex.
    pub initial_step: T,
    /// Stop once every vertex lies within this distance (max norm) of the best one.
    pub diameter_tol: T,
    pub max_evals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with the standard reflection, expansion,
/// contraction and shrink moves.
pub fn minimize<T: Real, F: FnMut(&[T]) -> T>(mut f: F, x0: &[T], opts: &NelderMeadOptions<T>) -> NelderMeadResult<T> {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::max_value().unwrap_or_else(T::one)
        }
    };

    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = &simplex[0].0;
        let diameter = simplex[1..].iter().fold(T::zero(), |m, (x, _)| {
            x.iter().zip(best).fold(m, |m, (a, b)| m.max((*a - *b).abs()))
        });
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![T::zero(); dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += *v;
            }
        }
        let inv = T::one() / T::count(dim);
        centroid.iter_mut().for_each(|c| *c *= inv);
        let along = |t: T, worst: &[T]| -> Vec<T> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };

        let (worst, f_worst) = simplex[dim].clone();
        let f_best = simplex[0].1;
        let f_second = simplex[dim - 1].1;
        let xr = along(T::one(), &worst);
        let fr = eval(&xr, &mut evals);
        if fr < f_best {
            let xe = along(two, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second {
            simplex[dim] = (xr, fr);
            continue;
        }
        let outside = fr < f_worst;
        let xc = along(if outside { half } else { -half }, &worst);
        let fc = eval(&xc, &mut evals);
        if (outside && fc <= fr) || (!outside && fc < f_worst) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, a) in x.iter_mut().zip(&anchor) {
                *xi = *a + half * (*xi - *a);
            }
            *v = eval(x, &mut evals);
        }
    }

    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        evals,
        converged,
    }
}
