//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes (and the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panels.
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Integrate `f` over `[a, b]`, starting from panels no wider than
/// `max_initial_width`, and bisecting the worst panel until the summed
/// error estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    max_initial_width: f64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    if b <= a {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let width = max_initial_width.min(b - a).max((b - a) / opts.max_panels as f64);
    let initial = ((b - a) / width).ceil().max(1.0) as usize;
    let step = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(2 * initial);
    for p in 0..initial {
        let lo = a + step * p as f64;
        let hi = if p + 1 == initial { b } else { lo + step };
        heap.push(gauss_kronrod(&f, lo, hi));
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                panels: heap.len(),
            });
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("nonempty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 15 is exact to degree 22
        let r = integrate(|x| x.powi(9) - 3.0 * x * x, 0.0, 2.0, 10.0, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1024.0 / 10.0 - 8.0, epsilon = 1e-12);
    }

    #[test]
    fn oscillatory_integrand() {
        let t = 400.0;
        let r = integrate(|x| (t * x).sin().powi(2), 0.0, 1.0, PI / t, &QuadratureOptions::default()).unwrap();
        let exact = 0.5 - (2.0 * t).sin() / (4.0 * t);
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-11);
    }

    #[test]
    fn log_singularity_near_cutoff() {
        let r = integrate(|x| 1.0 / x, 1e-6, 0.5, 0.5, &QuadratureOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, (0.5f64 / 1e-6).ln(), epsilon = 1e-8);
    }

    #[test]
    fn reports_failure_when_panel_budget_is_exhausted() {
        let opts = QuadratureOptions {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_panels: 4,
        };
        assert!(integrate(|x| x.abs().sqrt(), -1.0, 1.0, 2.0, &opts).is_err());
    }
}
