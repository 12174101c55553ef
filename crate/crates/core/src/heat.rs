//! Heat kernel on the step-two tangent groups via the Beals-Gaveau-Greiner
//! integral, and the first heat invariants of both structures.
//!
//! For a skew `J_{tau/2}` with eigenvalue pairs `+- i theta_m`, the volume
//! element is `W(tau) = prod_m theta_m / sinh theta_m` and the action's real
//! part applies `theta coth theta` spectrally on each invariant plane. With
//! the eigenvalue halving, `theta_1 = |tau|` and `theta_2 = |delta| |tau|`
//! at a base point with `delta = |x|^2 - |y|^2`; the on-diagonal kernel at
//! `t = 1` then reproduces the first heat invariant, which is asserted in
//! the tests rather than assumed.

use crate::quad::{self, QuadError, QuadratureConfig};
use crate::special;
use crate::sphere::SpherePoint;
use crate::tangent::{group_multiply, j_matrix, GroupElement, TangentGroupSpec};
use crate::{Vec3, Vec4};

/// A heat-kernel evaluation request on the tangent group of `spec`.
#[derive(Debug, Clone)]
pub struct HeatKernelQuery {
    pub spec: TangentGroupSpec,
    pub t: f64,
    pub source: GroupElement,
    pub target: GroupElement,
}

const TWO_PI_POW5: f64 = 9792.629762733309; // (2 pi)^5

fn thetas(spec: &TangentGroupSpec, tau_norm: f64) -> (f64, f64) {
    let x2 = spec.base_point.x_norm_sq();
    let y2 = spec.base_point.y_norm_sq();
    // eigenvalues of J_{tau/2} are +- i (x2 +- y2) |tau|
    ((x2 + y2) * tau_norm, (x2 - y2).abs() * tau_norm)
}

/// `W(tau) = prod_m theta_m / sinh theta_m` for the two eigenvalue planes of
/// `J_{tau/2}`; depends on `tau` only through its norm.
pub fn volume_element_w(spec: &TangentGroupSpec, tau: &Vec3) -> f64 {
    let (t1, t2) = thetas(spec, tau.norm());
    special::t_over_sinh(t1) * special::t_over_sinh(t2)
}

/// The action split into its real part `<f(J_{tau/2}) a, a> / 2` (with `f`
/// acting spectrally as `theta coth theta`) and the oscillation `<tau, b>`.
pub fn action_phi(spec: &TangentGroupSpec, tau: &Vec3, a: &Vec4, b: &Vec3) -> (f64, f64) {
    let osc = tau.dot(b);
    let an2 = a.norm_squared();
    if an2 == 0.0 {
        return (0.0, osc);
    }
    let (t1, t2) = thetas(spec, tau.norm());
    let (s1, s2) = (t1 * t1, t2 * t2);
    // f(J) = alpha Id + beta J^2 interpolating h(s) = sqrt(s) coth sqrt(s)
    // on the two eigenvalues -s of J^2.
    let h1 = special::sqrt_coth(s1);
    let beta = if (s1 - s2).abs() > 1e-9 * s1.max(1.0) {
        (special::sqrt_coth(s2) - h1) / (s1 - s2)
    } else {
        -special::sqrt_coth_deriv(0.5 * (s1 + s2))
    };
    let alpha = h1 + beta * s1;
    let j = j_matrix(spec, &(tau / 2.0));
    let ja = j * a;
    // a^T J^2 a = -|J a|^2 for skew J
    let real = 0.5 * (alpha * an2 - beta * ja.norm_squared());
    (real, osc)
}

/// Evaluates the heat kernel
/// `K_t(source, target) = (2 pi t)^{-5} g^{-1} int exp(-phi/t) W(tau) dtau`
/// with the group displacement `source^{-1} * target`. The imaginary part of
/// the integrand cancels by the `tau -> -tau` symmetry, leaving the cosine.
///
/// Rotation-invariant integrands (zero horizontal displacement, or a base
/// point with `delta^2 = 1` where the spectral function is scalar) reduce to
/// a single radial integral with the azimuthal average of the oscillation
/// folded in as `sinc`; otherwise a tensorized sphere x radial rule is used.
pub fn bgg_heat_kernel(query: &HeatKernelQuery, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    let spec = &query.spec;
    let t = query.t;
    let disp = group_multiply(spec, &query.source.inverse(), &query.target);
    let prefactor = 1.0 / ((std::f64::consts::TAU * t).powi(5) * spec.haar_density);

    let radial_ok = disp.a.norm() < 1e-13 || (1.0 - spec.delta().powi(2)).abs() < 1e-12;
    let integral = if radial_ok {
        let bnorm = disp.b.norm();
        quad::radial_r3(
            |r| {
                let tau = Vec3::new(r, 0.0, 0.0);
                let (re, _) = action_phi(spec, &tau, &disp.a, &Vec3::zeros());
                (-re / t).exp() * volume_element_w(spec, &tau) * special::sinc(r * bnorm / t)
            },
            cfg,
        )?
    } else {
        quad::sphere_radial_r3(
            |dir, r| {
                let tau = Vec3::new(dir[0] * r, dir[1] * r, dir[2] * r);
                let (re, osc) = action_phi(spec, &tau, &disp.a, &disp.b);
                (-re / t).exp() * (osc / t).cos() * volume_element_w(spec, &tau)
            },
            cfg,
        )?
    };
    Ok(prefactor * integral)
}

/// `int_0^R r^2 (r / sinh r) (d r / sinh(d r)) dr`, the radial core shared
/// by every first-heat-invariant formula; even in `d` and smooth at `d = 0`.
fn radial_core(d: f64, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    quad::integrate(
        |r| r * r * special::t_over_sinh(r) * special::t_over_sinh(d * r),
        0.0,
        cfg.truncation_radius,
        cfg.abs_tol,
        cfg.rel_tol,
    )
}

/// First heat invariant of the trivializable structure as a function of
/// `delta = |x|^2 - |y|^2` alone.
pub fn c0_t_from_delta(delta: f64, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    // g(z) = [8 (1 + delta^2)]^{-3/2}
    let g = (8.0 * (1.0 + delta * delta)).powf(-1.5);
    let core = radial_core(delta, cfg)?;
    Ok(4.0 * std::f64::consts::PI * core / (TWO_PI_POW5 * g))
}

/// First heat invariant `c_0^T(z)` of the trivializable structure with the
/// Popp measure.
pub fn c0_t(z: &SpherePoint, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    c0_t_from_delta(z.delta(), cfg)
}

/// First heat invariant of the trivializable structure with the standard
/// measure: the same integral against the constant density `16^{-3/2}`.
pub fn c0_t_standard_measure(z: &SpherePoint, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    let core = radial_core(z.delta(), cfg)?;
    Ok(4.0 * std::f64::consts::PI * core * 64.0 / TWO_PI_POW5)
}

/// First heat invariant of the quaternionic Hopf structure: the constant
/// `16^{3/2} (2 pi)^{-5} int (|tau| / sinh |tau|)^2 dtau = 4/15`.
pub fn c0_q(cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    let core = radial_core(1.0, cfg)?;
    Ok(4.0 * std::f64::consts::PI * core * 64.0 / TWO_PI_POW5)
}

/// Monte-Carlo estimate of the integrated gap `c_0^T - c_0^Q`
/// (the sphere integral of the pointwise non-negative defect), with its
/// standard error. The integrand depends on the point only through
/// `delta^2`, so the inner integral is tabulated on Chebyshev nodes in
/// `delta^2` once and interpolated.
pub fn c0_gap(cfg: &QuadratureConfig, n_points: usize, seed: u64) -> Result<(f64, f64), QuadError> {
    assert!(n_points >= 1);
    let base = radial_core(1.0, cfg)?;
    // Chebyshev fit of w |-> radial_core(sqrt(w)) - base on [0, 1]
    let n_nodes = 33;
    let mut node_vals = Vec::with_capacity(n_nodes);
    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let x = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n_nodes) as f64).cos();
        let w = 0.5 * (x + 1.0);
        nodes.push(w);
        node_vals.push(radial_core(w.sqrt(), cfg)? - base);
    }
    let interp = |w: f64| -> f64 {
        // barycentric interpolation on Chebyshev nodes of the first kind
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n_nodes {
            let d = w - nodes[i];
            if d.abs() < 1e-14 {
                return node_vals[i];
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let wi = sign * ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n_nodes) as f64).sin();
            num += wi / d * node_vals[i];
            den += wi / d;
        }
        num / den
    };

    let mut rng = crate::sample::seeded_rng(seed);
    let scale = 4.0 * std::f64::consts::PI * crate::VOL_S7 / TWO_PI_POW5;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_points {
        let z = SpherePoint::random(&mut rng);
        let v = scale * interp(z.delta().powi(2));
        sum += v;
        sum_sq += v * v;
    }
    let n = n_points as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let se = (var / n).sqrt();
    Ok((mean, se))
}

/// Pointwise gap integrand core: non-negative, zero exactly when
/// `delta^2 = 1`.
pub fn gap_core(delta: f64, cfg: &QuadratureConfig) -> Result<f64, QuadError> {
    Ok(radial_core(delta, cfg)? - radial_core(1.0, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_canonical_system;
    use crate::sample;
    use crate::tangent::j_spectrum;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn spec_at(z: &SpherePoint) -> TangentGroupSpec {
        TangentGroupSpec::trivializable_at(&build_canonical_system(), z)
    }

    #[test]
    fn w_special_values() {
        let np = SpherePoint::north_pole();
        let spec = spec_at(&np);
        assert_eq!(volume_element_w(&spec, &Vec3::zeros()), 1.0);
        let r: f64 = 1.7;
        let w = volume_element_w(&spec, &Vec3::new(0.0, r, 0.0));
        assert!((w - (r / r.sinh()).powi(2)).abs() < 1e-14);
        let mut rng = sample::seeded_rng(41);
        let z = SpherePoint::random(&mut rng);
        let spec = spec_at(&z);
        let d = z.delta().abs();
        let w = volume_element_w(&spec, &Vec3::new(r, 0.0, 0.0));
        assert!((w - (r / r.sinh()) * (d * r / (d * r).sinh())).abs() < 1e-14);
    }

    #[test]
    fn w_matches_numeric_j_spectrum_and_rotations() {
        let mut rng = sample::seeded_rng(42);
        for _ in 0..20 {
            let z = SpherePoint::random(&mut rng);
            let spec = spec_at(&z);
            let tau = Vec3::new(
                sample::standard_normal(&mut rng),
                sample::standard_normal(&mut rng),
                sample::standard_normal(&mut rng),
            );
            // W from the numerically computed spectrum of J_{tau/2}: the
            // product of t/sinh(t) over the two non-negative imaginary parts
            let ev = j_spectrum(&spec, &(tau / 2.0));
            let pos: Vec<f64> = ev.iter().map(|e| e.im).filter(|v| *v >= -1e-12).collect();
            assert_eq!(pos.len(), 2);
            let w_num = special::t_over_sinh(pos[0].abs()) * special::t_over_sinh(pos[1].abs());
            let w = volume_element_w(&spec, &tau);
            assert!((w - w_num).abs() < 1e-10, "{w} vs {w_num}");
            // rotation invariance
            let q = sample::random_rotation8(&mut rng);
            let r3 = crate::Mat3::from_fn(|i, j| q[(i, j)]);
            let qr = r3.qr();
            let rot = qr.q();
            let w_rot = volume_element_w(&spec, &(rot * tau));
            assert!((w - w_rot).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_special_values() {
        let np = SpherePoint::north_pole();
        let spec = spec_at(&np);
        let (re, osc) = action_phi(&spec, &Vec3::new(0.3, -0.2, 1.0), &Vec4::zeros(), &Vec3::zeros());
        assert_eq!((re, osc), (0.0, 0.0));
        let a = Vec4::new(1.0, -2.0, 0.5, 0.0);
        let (re, osc) = action_phi(&spec, &Vec3::zeros(), &a, &Vec3::new(1.0, 2.0, 3.0));
        assert!((re - 0.5 * a.norm_squared()).abs() < 1e-12);
        assert_eq!(osc, 0.0);
        let r: f64 = 0.7;
        let e1 = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let (re, _) = action_phi(&spec, &Vec3::new(r, 0.0, 0.0), &e1, &Vec3::zeros());
        assert!((re - 0.5 * r / r.tanh()).abs() < 1e-13);
    }

    #[test]
    fn phi_matrix_function_against_eigen_route() {
        // f(J) a against explicit eigendecomposition of the 4x4 skew matrix
        let mut rng = sample::seeded_rng(43);
        for _ in 0..20 {
            let z = SpherePoint::random(&mut rng);
            let spec = spec_at(&z);
            let tau = Vec3::new(
                sample::standard_normal(&mut rng),
                sample::standard_normal(&mut rng),
                sample::standard_normal(&mut rng),
            );
            let a = Vec4::from_fn(|_, _| sample::standard_normal(&mut rng));
            let (re, _) = action_phi(&spec, &tau, &a, &Vec3::zeros());
            // eigen route: J^2 is symmetric, f acts as sqrt(-mu) coth(...)
            let j = j_matrix(&spec, &(tau / 2.0));
            let j2 = j * j;
            let se = nalgebra::SymmetricEigen::new(j2);
            let mut fj = crate::Mat4::zeros();
            for (i, mu) in se.eigenvalues.iter().enumerate() {
                let s = (-mu).max(0.0);
                let v = se.eigenvectors.column(i);
                fj += special::sqrt_coth(s) * v * v.transpose();
            }
            let re2 = 0.5 * a.dot(&(fj * a));
            assert!((re - re2).abs() < 1e-10, "{re} vs {re2}");
        }
    }

    #[test]
    fn c0_closed_form_values() {
        let c = cfg();
        let v = c0_t(&SpherePoint::north_pole(), &c).unwrap();
        assert!((v - 4.0 / 15.0).abs() < 1e-9, "{v}");
        let v = c0_t(&SpherePoint::with_x_norm_sq(0.5), &c).unwrap();
        assert!((v - std::f64::consts::SQRT_2 / 4.0).abs() < 1e-9, "{v}");
        // x = 0 gives the same value as the north pole (delta^2 = 1)
        let v = c0_t(&SpherePoint::with_x_norm_sq(0.0), &c).unwrap();
        assert!((v - 4.0 / 15.0).abs() < 1e-9);
        let q = c0_q(&c).unwrap();
        assert!((q - 4.0 / 15.0).abs() < 1e-9);
        assert!((q - c0_t(&SpherePoint::north_pole(), &c).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn c0_series_oracle() {
        // Independent oracle: with 1/sinh r = 2 sum e^{-(2n+1) r} and
        // 1/sinh(dr) likewise, the radial core is
        // 96 d sum_{m,n} [(2m+1) + (2n+1) d]^{-5}.
        let c = cfg();
        for d in [0.3, 0.7] {
            let mut series = 0.0;
            let m_max = 3000usize;
            for m in 0..m_max {
                for n in 0..m_max {
                    series += ((2 * m + 1) as f64 + (2 * n + 1) as f64 * d).powi(-5);
                }
            }
            series *= 96.0 * d;
            let quad_v = super::radial_core(d, &c).unwrap();
            assert!((series - quad_v).abs() < 1e-8, "d={d}: {series} vs {quad_v}");
        }
    }

    #[test]
    fn c0_truncation_independence() {
        let short = QuadratureConfig { truncation_radius: 40.0, ..cfg() };
        let a = c0_q(&short).unwrap();
        let b = c0_q(&cfg()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn c0_depends_only_on_delta_squared() {
        let mut rng = sample::seeded_rng(44);
        let c = cfg();
        for _ in 0..10 {
            let z = SpherePoint::random(&mut rng);
            // another point with the same block norms
            let x = sample::unit_vector::<4>(&mut rng) * z.x_norm_sq().sqrt();
            let y = sample::unit_vector::<4>(&mut rng) * z.y_norm_sq().sqrt();
            let mut coords = crate::Vec8::zeros();
            for i in 0..4 {
                coords[i] = x[i];
                coords[i + 4] = y[i];
            }
            let z2 = SpherePoint::new(coords).unwrap();
            let a = c0_t(&z, &c).unwrap();
            let b = c0_t(&z2, &c).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn standard_measure_relation() {
        let mut rng = sample::seeded_rng(45);
        let c = cfg();
        for _ in 0..10 {
            let z = SpherePoint::random(&mut rng);
            let lhs = c0_t_standard_measure(&z, &c).unwrap();
            let rhs = c0_t(&z, &c).unwrap() * crate::sr::popp_density_t(&z) * 64.0;
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn bgg_on_diagonal_equals_c0_and_scales() {
        let c = cfg();
        let mut rng = sample::seeded_rng(46);
        for _ in 0..5 {
            let z = SpherePoint::random(&mut rng);
            let spec = spec_at(&z);
            let q = HeatKernelQuery {
                spec: spec.clone(),
                t: 1.0,
                source: GroupElement::identity(),
                target: GroupElement::identity(),
            };
            let k1 = bgg_heat_kernel(&q, &c).unwrap();
            let c0 = c0_t(&z, &c).unwrap();
            assert!((k1 - c0).abs() < 1e-7, "{k1} vs {c0}");
            for t in [0.5, 2.0] {
                let qt = HeatKernelQuery { t, ..q.clone() };
                let kt = bgg_heat_kernel(&qt, &c).unwrap();
                assert!((kt - k1 * t.powi(-5)).abs() < 1e-9 * kt.abs(), "t={t}");
            }
        }
    }

    #[test]
    fn bgg_oscillation_damps() {
        let c = cfg();
        let z = SpherePoint::north_pole();
        let spec = spec_at(&z);
        let base = HeatKernelQuery {
            spec: spec.clone(),
            t: 0.1,
            source: GroupElement::identity(),
            target: GroupElement::identity(),
        };
        let k0 = bgg_heat_kernel(&base, &c).unwrap();
        let shifted = HeatKernelQuery {
            target: GroupElement::new(Vec4::zeros(), Vec3::new(10.0, 0.0, 0.0)),
            ..base
        };
        let kb = bgg_heat_kernel(&shifted, &c).unwrap();
        assert!(kb.abs() < k0, "{kb} vs {k0}");
    }

    #[test]
    fn bgg_tensor_rule_agrees_with_radial() {
        let c = QuadratureConfig { spherical_order: 12, ..cfg() };
        let mut rng = sample::seeded_rng(47);
        let z = SpherePoint::random(&mut rng);
        let spec = spec_at(&z);
        // a = 0 displacement: radial path
        let q = HeatKernelQuery {
            spec: spec.clone(),
            t: 1.0,
            source: GroupElement::identity(),
            target: GroupElement::new(Vec4::zeros(), Vec3::new(0.4, -0.1, 0.2)),
        };
        let radial = bgg_heat_kernel(&q, &c).unwrap();
        // force the tensor path with a tiny horizontal displacement
        let q2 = HeatKernelQuery {
            target: GroupElement::new(Vec4::new(1e-9, 0.0, 0.0, 0.0), Vec3::new(0.4, -0.1, 0.2)),
            ..q
        };
        let tensor = bgg_heat_kernel(&q2, &c).unwrap();
        assert!((radial - tensor).abs() < 1e-6, "{radial} vs {tensor}");
    }

    #[test]
    fn gap_positive() {
        let c = cfg();
        assert!(gap_core(1.0, &c).unwrap().abs() < 1e-10);
        assert!(gap_core(0.5, &c).unwrap() > 0.0);
        let (est, se) = c0_gap(&c, 20_000, 7).unwrap();
        assert!(est > 3.0 * se, "estimate {est} se {se}");
    }
}
