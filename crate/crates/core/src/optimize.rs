//! Derivative-free maximization on boxes: golden-section line searches and
//! cyclic coordinate ascent.

use crate::scalar::{int, lit, Scalar};

/// Settings for [`coordinate_ascent`].
#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    /// Stop when a full sweep improves the objective by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Coarse samples per coordinate before the golden-section refinement.
    pub coarse: usize,
    /// Relative bracket width at which a line search stops.
    pub line_tol: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            coarse: 8,
            line_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Returns the best point seen, including the end points.
pub fn golden_section_max<T: Scalar, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, rel_tol: f64) -> (T, T) {
    let inv_phi: T = lit((5.0_f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (lo, hi);
    let tol = (hi - lo).abs() * lit(rel_tol);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// One-dimensional maximization: coarse scan, then golden section on the
/// bracket around the best sample.
pub fn line_max<T: Scalar, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, coarse: usize, rel_tol: f64) -> (T, T) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let k = coarse.max(2);
    let step = (hi - lo) / int(k);
    let mut best = (lo, f(lo));
    let mut best_i = 0;
    for i in 1..=k {
        let x = if i == k { hi } else { lo + step * int(i) };
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
            best_i = i;
        }
    }
    let a = lo + step * int(best_i.saturating_sub(1));
    let b = if best_i + 1 >= k { hi } else { lo + step * int(best_i + 1) };
    let refined = golden_section_max(&mut f, a, b, rel_tol * k as f64);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

/// Cyclic coordinate ascent of `f` over the box `bounds`, starting at `x0`
/// (clamped into the box). Never accepts a move that lowers the objective.
pub fn coordinate_ascent<T: Scalar, F: FnMut(&[T]) -> T>(
    mut f: F,
    x0: &[T],
    bounds: &[(T, T)],
    opts: AscentOptions,
) -> AscentResult<T> {
    assert_eq!(x0.len(), bounds.len());
    let mut x: Vec<T> = x0
        .iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| v.max(lo).min(hi))
        .collect();
    let mut value = f(&x);
    let tol: T = lit(opts.tol);
    for iter in 1..=opts.max_iter {
        let before = value;
        for i in 0..x.len() {
            let (lo, hi) = bounds[i];
            if hi <= lo {
                continue;
            }
            let mut probe = x.clone();
            let (xi, fi) = line_max(
                |t| {
                    probe[i] = t;
                    f(&probe)
                },
                lo,
                hi,
                opts.coarse,
                opts.line_tol,
            );
            if fi > value {
                x[i] = xi;
                value = fi;
            }
        }
        if value - before < tol {
            return AscentResult {
                x,
                value,
                iterations: iter,
                converged: true,
            };
        }
    }
    AscentResult {
        x,
        value,
        iterations: opts.max_iter,
        converged: false,
    }
}
