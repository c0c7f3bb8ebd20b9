/// Principal branch `W0` of the Lambert function, `w e^w = x`, for
/// `x >= -1/e`. Returns NaN below the branch point.
///
/// Halley steps from a branch-aware initial guess, stopped once the update
/// is below `1e-12` relative.
pub fn lambert_w0(x: f64) -> f64 {
    const BRANCH: f64 = -1.0 / std::f64::consts::E;
    if x.is_nan() || x < BRANCH {
        return f64::NAN;
    }
    if x == BRANCH {
        return -1.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut w = if x < -0.25 {
        -1.0 + (2.0 * (1.0 + std::f64::consts::E * x)).sqrt()
    } else if x < 3.0 {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..64 {
        let e = w.exp();
        let r = w * e - x;
        let d1 = e * (w + 1.0);
        if d1 == 0.0 {
            break;
        }
        let step = r / (d1 - (w + 2.0) * r / (2.0 * (w + 1.0)));
        w -= step;
        if step.abs() <= 1e-12 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}
