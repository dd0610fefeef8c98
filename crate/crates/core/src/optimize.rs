//! Derivative-free one-dimensional minimization.

/// Outcome of a bracketed 1-D minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Final bracket.
    pub lo: f64,
    pub hi: f64,
    /// The final bracket still touches one of the initial endpoints, so the
    /// minimizer may lie outside the search interval.
    pub at_edge: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Minimum {
    assert!(lo < hi, "golden_section needs lo < hi");
    let (lo0, hi0) = (lo, hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Minimum {
        x,
        value,
        evaluations,
        lo: a,
        hi: b,
        at_edge: a == lo0 || b == hi0,
    }
}

/// Evaluates `f` on `count` evenly spaced points of `[lo, hi]` and returns the best.
pub fn grid_scan(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, count: usize) -> (f64, f64) {
    assert!(count >= 2);
    (0..count)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
            (x, f(x))
        })
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}
