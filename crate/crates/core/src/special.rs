//! Stable evaluation of the small handful of scalar functions the geometry
//! needs: `t / sinh t`, `t coth t`, `t cot t`, and the chart coefficients
//! `F`, `G`. Direct evaluation of each of these loses all digits near zero,
//! so every function switches to a truncated Taylor series below a cutoff
//! chosen so both branches agree to better than `1e-13` relative.

/// `t / sinh t`, even, positive, decreasing on `[0, oo)`.
pub fn t_over_sinh(t: f64) -> f64 {
    let t = t.abs();
    if t < 1e-2 {
        let s = t * t;
        1.0 - s / 6.0 + 7.0 * s * s / 360.0 - 31.0 * s * s * s / 15120.0
    } else {
        t / t.sinh()
    }
}

/// `t coth t`, even, `>= 1`.
pub fn t_coth(t: f64) -> f64 {
    let t = t.abs();
    if t < 1e-2 {
        let s = t * t;
        1.0 + s / 3.0 - s * s / 45.0 + 2.0 * s * s * s / 945.0
    } else {
        t / t.tanh()
    }
}

/// `sqrt(s)/sinh(sqrt(s))` as an analytic function of `s = t^2 >= 0`.
pub fn sqrt_over_sinh(s: f64) -> f64 {
    t_over_sinh(s.max(0.0).sqrt())
}

/// `sqrt(s) coth(sqrt(s))` as an analytic function of `s = t^2 >= 0`.
pub fn sqrt_coth(s: f64) -> f64 {
    t_coth(s.max(0.0).sqrt())
}

/// Derivative of `sqrt_coth` in `s`; used for the confluent case of the
/// divided difference when the two eigenvalue planes nearly coincide.
pub fn sqrt_coth_deriv(s: f64) -> f64 {
    if s < 1e-4 {
        1.0 / 3.0 - 2.0 * s / 45.0 + 6.0 * s * s / 945.0
    } else {
        let t = s.sqrt();
        let coth = 1.0 / t.tanh();
        // d/ds [t coth t] with t = sqrt(s): (coth t + t (1 - coth^2 t)) / (2 t)
        (coth + t * (1.0 - coth * coth)) / (2.0 * t)
    }
}

/// `t cot t`, the chart coefficient `G` as a function of `t = |u| < pi`.
pub fn t_cot(t: f64) -> f64 {
    let t = t.abs();
    if t < 1e-2 {
        let s = t * t;
        1.0 - s / 3.0 - s * s / 45.0 - 2.0 * s * s * s / 945.0
    } else {
        t / t.tan()
    }
}

/// `F(t) = 1/t^2 - cot(t)/t` for `t = |u| < pi`, with `F(0) = 1/3`.
///
/// The two terms agree to four digits near zero, so the subtraction is done
/// by series below `t = 0.15`.
pub fn chart_f(t: f64) -> f64 {
    let t = t.abs();
    if t < 0.15 {
        let s = t * t;
        1.0 / 3.0 + s / 45.0 + 2.0 * s * s / 945.0 + s * s * s / 4725.0
            + 2.0 * s * s * s * s / 93555.0
    } else {
        1.0 / (t * t) - 1.0 / (t.tan() * t)
    }
}

/// `theta / sin(theta)` with `theta = arccos(c)`; the prefactor of the
/// canonical-coordinate solution, stable as `c -> 1`.
pub fn theta_over_sin(theta: f64) -> f64 {
    if theta.abs() < 1e-4 {
        let s = theta * theta;
        1.0 + s / 6.0 + 7.0 * s * s / 360.0
    } else {
        theta / theta.sin()
    }
}

/// `sin t / t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let s = t * t;
        1.0 - s / 6.0 + s * s / 120.0
    } else {
        t.sin() / t
    }
}
