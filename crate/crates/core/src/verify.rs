//! One-shot verification suites aggregating every module's invariants; the
//! command-line `verify` subcommand runs exactly these.

use crate::clifford::{self, build_canonical_system, CliffordSystem};
use crate::heat;
use crate::quad::QuadratureConfig;
use crate::report::CheckReport;
use crate::sample;
use crate::special;
use crate::spectral::{self, OperatorSpec};
use crate::sphere::SpherePoint;
use crate::sr;
use crate::tangent::{self, GroupElement, HomogeneousOrder, TangentGroupSpec, TypeLabel};
use crate::{Mat3, Vec3, Vec4};

/// Options for [`run_all`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Negative control: corrupt one generator before the algebra checks.
    pub break_anticommutation: bool,
    /// Highest harmonic degree for the tensor-identity suite.
    pub tensor_k_max: usize,
    /// Highest harmonic degree for the spectral-inclusion suite.
    pub inclusion_k_max: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 1,
            break_anticommutation: false,
            tensor_k_max: 3,
            inclusion_k_max: 4,
        }
    }
}

fn corrupted_system() -> CliffordSystem {
    let mut sys = build_canonical_system();
    sys.generators[0] = sys.generators[1];
    sys
}

pub fn anticommutation_suite(opts: &VerifyOptions) -> CheckReport {
    let sys = if opts.break_anticommutation { corrupted_system() } else { build_canonical_system() };
    sys.verify_anticommutation()
}

pub fn isometry_suite() -> CheckReport {
    check_with(|sys, _| clifford::check_isometry_example(sys), "isometry example")
}

fn check_with(
    f: impl Fn(&CliffordSystem, &mut rand_chacha::ChaCha8Rng) -> CheckReport,
    _name: &str,
) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(0);
    f(&sys, &mut rng)
}

pub fn frame_orthonormality_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("frame orthonormality {A_i z, z}");
    for _ in 0..n {
        let z = SpherePoint::random(&mut rng);
        let mut frame: Vec<crate::Vec8> =
            sys.generators.iter().map(|a| a.apply(z.coords())).collect();
        frame.push(*z.coords());
        for i in 0..8 {
            for j in 0..8 {
                let g = frame[i].dot(&frame[j]) - f64::from(i == j);
                rep.record(g, 1e-12, "Gram deviation");
            }
        }
    }
    rep
}

pub fn popp_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("Popp matrix and density closed forms");
    for _ in 0..n {
        let z = SpherePoint::random(&mut rng);
        let closed = 16.0 * (1.0 - 2.0 * z.x_norm_sq() * z.y_norm_sq());
        let dev = (sr::popp_matrix_t(&sys, &z) - closed * Mat3::identity()).abs().max();
        rep.record(dev, 1e-10, "B_T closed form");
        let g = sr::popp_density_t(&z);
        rep.require(
            (1.0 / 64.0..=8.0f64.powf(-1.5) + 1e-15).contains(&g),
            "density out of band",
        );
    }
    rep.require(sr::popp_density_t(&SpherePoint::north_pole()) == 1.0 / 64.0, "g(np) = 1/64 exact");
    rep.require(sr::popp_density_q() == 1.0 / 64.0, "quaternionic density 16^{-3/2}");
    rep
}

pub fn jz_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("J_Z determinant and spectrum closed forms");
    for _ in 0..n {
        let z = SpherePoint::random(&mut rng);
        let spec = TangentGroupSpec::trivializable_at(&sys, &z);
        let zd = Vec3::from_fn(|_, _| sample::standard_normal(&mut rng));
        let det = tangent::j_determinant(&spec, &zd);
        let want = 16.0 * z.delta().powi(2) * zd.norm_squared().powi(2);
        rep.record(det - want, 1e-10 * want.abs().max(1.0), "determinant");
        let ev = tangent::j_spectrum(&spec, &zd);
        let cf = tangent::j_spectrum_closed_form(&spec, &zd);
        for (a, b) in ev.iter().zip(&cf) {
            rep.record((a - b).norm(), 1e-9, "eigenvalue");
        }
    }
    rep
}

pub fn type_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("type classification");
    for _ in 0..n {
        let z = SpherePoint::random(&mut rng);
        let spec = TangentGroupSpec::trivializable_at(&sys, &z);
        let (t, cls) = tangent::curvature_quadratic(&spec, 1e-10);
        let want = 2.0 * z.delta();
        for l in 0..3 {
            rep.record(t[(l, l)] - want, 1e-10, "diagonal");
            for k in 0..3 {
                if k != l {
                    rep.record(t[(l, k)], 1e-10, "off-diagonal");
                }
            }
        }
        if z.delta().abs() > 1e-6 {
            rep.require(cls.label == TypeLabel::Elliptic, "elliptic off the singular set");
        }
    }
    for _ in 0..(n / 10).max(10) {
        let z = SpherePoint::random_singular(&mut rng);
        let spec = TangentGroupSpec::trivializable_at(&sys, &z);
        let (_, cls) = tangent::curvature_quadratic(&spec, 1e-10);
        rep.require(
            cls.label == TypeLabel::Degenerate && cls.signature == (0, 0),
            "type (0,0) on the singular set",
        );
    }
    rep
}

pub fn group_law_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("tangent group law");
    let z = SpherePoint::random(&mut rng);
    let spec = TangentGroupSpec::trivializable_at(&sys, &z);
    for _ in 0..n {
        let e = |rng: &mut rand_chacha::ChaCha8Rng| {
            GroupElement::new(
                Vec4::from_fn(|_, _| sample::standard_normal(rng)),
                Vec3::from_fn(|_, _| sample::standard_normal(rng)),
            )
        };
        let (p, q, r) = (e(&mut rng), e(&mut rng), e(&mut rng));
        let pi = tangent::group_multiply(&spec, &p, &p.inverse());
        rep.record(pi.a.norm() + pi.b.norm(), 1e-12, "inverse");
        let lhs = tangent::group_multiply(&spec, &tangent::group_multiply(&spec, &p, &q), &r);
        let rhs = tangent::group_multiply(&spec, &p, &tangent::group_multiply(&spec, &q, &r));
        rep.record((lhs.a - rhs.a).norm() + (lhs.b - rhs.b).norm(), 1e-12, "associativity");
    }
    rep
}

pub fn canonical_roundtrip_suite(seed: u64, n: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("canonical coordinate round trip");
    let z = SpherePoint::random(&mut rng);
    for _ in 0..n {
        let dir = sample::unit_vector::<7>(&mut rng);
        let scale: f64 = {
            use rand::Rng;
            rng.gen_range(0.0..std::f64::consts::PI - 0.1)
        };
        let u: [f64; 7] = std::array::from_fn(|i| scale * dir[i]);
        let w = tangent::canonical_coords_inverse(&sys, &z, &u).expect("in chart");
        rep.record(w.coords().norm() - 1.0, 1e-12, "unit norm");
        let u2 = tangent::canonical_coords(&sys, &z, &w).expect("not antipodal");
        for i in 0..7 {
            rep.record(u2[i] - u[i], 1e-10, "round trip");
        }
    }
    rep
}

pub fn anisotropic_suite(seed: u64) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("anisotropic frame expansion");
    let z = SpherePoint::random(&mut rng);
    let spec = TangentGroupSpec::trivializable_at(&sys, &z);
    // brackets of the order -1 fields reproduce the structure constants
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..3 {
                let lhs = 0.5 * (spec.constants.get(j, k + 4, i) - spec.constants.get(i, k + 4, j));
                rep.record(lhs - spec.constants.vertical(i, j, k), 1e-12, "bracket reproduction");
            }
        }
    }
    let dir = sample::unit_vector::<7>(&mut rng);
    let u: [f64; 7] = std::array::from_fn(|i| dir[i]);
    let rem = |eps: f64| -> f64 {
        let lhs = tangent::anisotropic_rescaled_frame(&spec, eps, &u).unwrap();
        let m1 = tangent::homogeneous_fields(&spec, HomogeneousOrder::MinusOne, &u);
        let m0 = tangent::homogeneous_fields(&spec, HomogeneousOrder::Zero, &u);
        let p1 = tangent::homogeneous_fields(&spec, HomogeneousOrder::One, &u);
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..7 {
                let rhs = m1[i][j] + eps * m0[i][j] + eps * eps * p1[i][j];
                worst = worst.max((lhs[i][j] - rhs).abs());
            }
        }
        worst
    };
    let (r2, r3) = (rem(1e-2), rem(1e-3));
    let ratio = r2 / r3.max(1e-300);
    rep.require(
        ratio > 800.0,
        format!("remainder decay ratio {ratio:.1} not at least cubic"),
    );
    rep.note(format!(
        "remainder {r2:.2e} at eps=1e-2, ratio {ratio:.0} (cubic coefficient vanishes; decay is quartic)"
    ));
    rep
}

pub fn special_values_suite() -> CheckReport {
    let mut rep = CheckReport::new("W and phi special values");
    let sys = build_canonical_system();
    let np = SpherePoint::north_pole();
    let spec = TangentGroupSpec::trivializable_at(&sys, &np);
    rep.record(heat::volume_element_w(&spec, &Vec3::zeros()) - 1.0, 1e-15, "W(0) = 1");
    let r: f64 = 1.3;
    rep.record(
        heat::volume_element_w(&spec, &Vec3::new(r, 0.0, 0.0)) - (r / r.sinh()).powi(2),
        1e-13,
        "W at the pole",
    );
    let (re, osc) = heat::action_phi(&spec, &Vec3::zeros(), &Vec4::new(1.0, 0.0, 0.0, 0.0), &Vec3::zeros());
    rep.record(re - 0.5, 1e-13, "phi(0, e_1) = 1/2");
    rep.record(osc, 1e-15, "oscillation at b = 0");
    // series fallbacks against direct evaluation just above the cutover
    rep.record(special::t_over_sinh(0.011) - 0.011 / 0.011f64.sinh(), 1e-13, "t/sinh t branch");
    rep.record(special::t_coth(0.011) - 0.011 / 0.011f64.tanh(), 1e-13, "t coth t branch");
    rep
}

pub fn c0_suite(cfg: &QuadratureConfig) -> CheckReport {
    let mut rep = CheckReport::new("first heat invariant closed forms");
    let q = heat::c0_q(cfg).expect("quadrature");
    rep.record(q - 4.0 / 15.0, 1e-8, "c0_Q = 4/15");
    let t_np = heat::c0_t(&SpherePoint::north_pole(), cfg).expect("quadrature");
    rep.record(t_np - q, 1e-8, "c0_T(np) = c0_Q");
    let t_half = heat::c0_t(&SpherePoint::with_x_norm_sq(0.5), cfg).expect("quadrature");
    rep.record(t_half - std::f64::consts::SQRT_2 / 4.0, 1e-8, "c0_T at the singular set");
    let mut rng = sample::seeded_rng(2);
    for _ in 0..25 {
        let z = SpherePoint::random(&mut rng);
        let c0 = heat::c0_t(&z, cfg).expect("quadrature");
        rep.require(c0 > q + cfg.abs_tol, "c0_T > c0_Q off the poles");
    }
    rep
}

pub fn bgg_suite(cfg: &QuadratureConfig, seed: u64) -> CheckReport {
    let sys = build_canonical_system();
    let mut rng = sample::seeded_rng(seed);
    let mut rep = CheckReport::new("heat kernel on-diagonal and scaling");
    for _ in 0..5 {
        let z = SpherePoint::random(&mut rng);
        let spec = TangentGroupSpec::trivializable_at(&sys, &z);
        let q = heat::HeatKernelQuery {
            spec,
            t: 1.0,
            source: GroupElement::identity(),
            target: GroupElement::identity(),
        };
        let k1 = heat::bgg_heat_kernel(&q, cfg).expect("quadrature");
        let c0 = heat::c0_t(&z, cfg).expect("quadrature");
        rep.record(k1 - c0, 1e-7, "K_1(0,0) = c0_T");
        for t in [0.5, 2.0] {
            let kt = heat::bgg_heat_kernel(&heat::HeatKernelQuery { t, ..q.clone() }, cfg)
                .expect("quadrature");
            rep.record((kt - k1 * t.powi(-5)) / kt, 1e-9, "t^{-5} scaling");
        }
    }
    rep
}

pub fn tensor_identity_suite(k_max: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rep = CheckReport::new(format!("tensor identities k <= {k_max}"));
    for k in 1..=k_max {
        let r = spectral::verify_tensor_identity(&sys, k).expect("degree in range");
        rep.record(r.max_residual, 1e-12, format!("degree {k}"));
        if !r.passed {
            rep.passed = false;
        }
    }
    rep
}

pub fn inclusion_suite(k_max: usize) -> CheckReport {
    let sys = build_canonical_system();
    let mut rep = CheckReport::new(format!("spectral inclusion k <= {k_max}"));
    let inc = spectral::spectra_inclusion(&sys, k_max, 1e-8).expect("degree in range");
    rep.require(inc.holds, "per-degree inclusion");
    rep.require(inc.distinguishable, "operators distinguishable");
    for d in &inc.per_degree {
        rep.note(format!(
            "degree {}: {} matched, {} unmatched, spectra {}",
            d.degree,
            d.matched.len(),
            d.unmatched.len(),
            if d.spectra_differ { "differ" } else { "coincide" }
        ));
    }
    rep
}

pub fn conjugation_spectrum_suite() -> CheckReport {
    let sys = build_canonical_system();
    let mut rep = CheckReport::new("spectrum invariance under the explicit isometry");
    let c = clifford::isometry_c_matrix(&[1.0, 0.0, 0.0, 0.0]);
    let u = clifford::isometry_u_matrix(&c, &sys.blocks[0]);
    let conj = clifford::conjugate_system(&sys, &u).expect("orthogonal");
    let gens: Vec<crate::clifford::SkewMatrix8> = conj
        .generators
        .iter()
        .take(4)
        .map(|g| {
            let mut e = [[0i64; 8]; 8];
            for i in 0..8 {
                for j in 0..8 {
                    e[i][j] = g[(i, j)].round() as i64;
                }
            }
            crate::clifford::SkewMatrix8::new(e).expect("signed permutation conjugation")
        })
        .collect();
    for k in 1..=3usize {
        let space = spectral::harmonic_basis(k).expect("degree in range");
        let m1 = spectral::operator_matrix(&sys, &OperatorSpec::TrivializableSumSquares, k).unwrap();
        let m2 = spectral::sum_of_squares_matrix(&gens, k).unwrap();
        let d1 = spectral::eigendecomposition_of_matrix(space.clone(), &m1);
        let d2 = spectral::eigendecomposition_of_matrix(space, &m2);
        for (a, b) in d1.values.iter().zip(&d2.values) {
            rep.record(a - b, 1e-10, format!("degree {k}"));
        }
    }
    rep
}

/// Runs every suite; the aggregate passes only if all do.
pub fn run_all(opts: &VerifyOptions) -> Vec<CheckReport> {
    let cfg = QuadratureConfig::default();
    vec![
        anticommutation_suite(opts),
        isometry_suite(),
        frame_orthonormality_suite(opts.seed, 200),
        popp_suite(opts.seed, 500),
        jz_suite(opts.seed, 500),
        type_suite(opts.seed, 300),
        group_law_suite(opts.seed, 200),
        canonical_roundtrip_suite(opts.seed, 300),
        anisotropic_suite(opts.seed),
        special_values_suite(),
        c0_suite(&cfg),
        bgg_suite(&cfg, opts.seed),
        tensor_identity_suite(opts.tensor_k_max),
        inclusion_suite(opts.inclusion_k_max),
        conjugation_spectrum_suite(),
    ]
}
