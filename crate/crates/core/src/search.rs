//! Bracketing golden-section search for the maximum of a unimodal function.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` on `[lo, hi]` until the bracket is narrower than `width`.
///
/// The returned point is the best of the final bracket's interior probes and
/// its endpoints, so a maximum sitting on the boundary is also found.
pub fn golden_max<F>(f: F, lo: f64, hi: f64, width: f64) -> Maximum
where
    F: Fn(f64) -> f64,
{
    assert!(lo <= hi, "empty bracket [{lo}, {hi}]");
    assert!(width > 0.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evaluations = 2;
    while b - a > width {
        if fc >= fd {
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
        // 0.618^400 is far below any representable relative width
        if evaluations > 400 {
            break;
        }
    }
    let mut best = if fc >= fd {
        Maximum { argmax: c, value: fc, evaluations }
    } else {
        Maximum { argmax: d, value: fd, evaluations }
    };
    for x in [lo, hi] {
        let v = f(x);
        best.evaluations += 1;
        if v > best.value {
            best.argmax = x;
            best.value = v;
        }
    }
    best
}
