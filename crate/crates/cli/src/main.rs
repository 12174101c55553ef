//! Command-line surface for the 7-sphere subriemannian laboratory.
//!
//! Every command is deterministic given its flags and seed; outputs are CSV
//! or JSON with '.' decimals, stable across runs. Exit codes: 0 success,
//! 1 verification failure, 2 usage or configuration error.

use clap::{Parser, Subcommand, ValueEnum};
use s7sr::clifford::build_canonical_system;
use s7sr::heat;
use s7sr::quad::QuadratureConfig;
use s7sr::spectral::{self, OperatorSpec};
use s7sr::sphere::SpherePoint;
use s7sr::tangent::{self, GroupElement, TangentGroupSpec};
use s7sr::verify::{self, VerifyOptions};
use s7sr::{Vec3, Vec4};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "s7sr", version, about = "Subriemannian structures on the 7-sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Structure {
    T,
    Q,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Negative control: corrupt a generator so the algebra checks fail.
        #[arg(long, default_value_t = false)]
        break_anticommutation: bool,
        /// Highest degree for the tensor-identity suite.
        #[arg(long, default_value_t = 3)]
        tensor_kmax: usize,
        /// Highest degree for the spectral-inclusion suite.
        #[arg(long, default_value_t = 4)]
        inclusion_kmax: usize,
    },
    /// First heat invariant over a grid of |x|^2; CSV "x_norm_sq,delta,c0".
    C0Scan {
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Clustered sublaplacian spectrum on degree-k harmonics as JSON.
    Spectrum {
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Popp matrix and densities at a point.
    Popp {
        /// 8 comma-separated reals (renormalized).
        #[arg(long)]
        point: String,
    },
    /// The map J_Z at a point: matrix, determinant, eigenvalues.
    Jz {
        #[arg(long)]
        point: String,
        /// 3 comma-separated reals.
        #[arg(long)]
        z: String,
    },
    /// Type classification along the |x|^2 grid.
    Type {
        #[arg(long, default_value_t = 11)]
        grid: usize,
    },
    /// Per-degree spectral inclusion report as JSON.
    Inclusion {
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Heat kernel on the tangent group at a point.
    Heat {
        #[arg(long)]
        point: String,
        #[arg(long)]
        t: f64,
        /// Horizontal displacement, 4 comma-separated reals.
        #[arg(long, default_value = "0,0,0,0")]
        a: String,
        /// Vertical displacement, 3 comma-separated reals.
        #[arg(long, default_value = "0,0,0")]
        b: String,
    },
}

fn parse_reals<const N: usize>(s: &str, what: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("{what}: expected {N} comma-separated reals, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse::<f64>().map_err(|e| format!("{what}: {e}"))?;
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<SpherePoint, String> {
    let c: [f64; 8] = parse_reals(s, "--point")?;
    SpherePoint::from_array(c).map_err(|e| e.to_string())
}

/// Round to 12 significant digits so numeric output is stable.
fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mag = v.abs().log10().floor();
    let scale = 10f64.powi(11 - mag as i32);
    (v * scale).round() / scale
}

fn json_num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig(v))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

fn write_out(path: &Option<std::path::PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_verify(
    seed: u64,
    break_anticommutation: bool,
    tensor_kmax: usize,
    inclusion_kmax: usize,
) -> Result<ExitCode, String> {
    if tensor_kmax > 5 || inclusion_kmax > 5 {
        return Err("degree limits above 5 are not supported".into());
    }
    let opts = VerifyOptions {
        seed,
        break_anticommutation,
        tensor_k_max: tensor_kmax,
        inclusion_k_max: inclusion_kmax,
    };
    let reports = verify::run_all(&opts);
    let mut all_passed = true;
    for r in &reports {
        println!("{r}");
        all_passed &= r.passed;
    }
    println!("{}", if all_passed { "verify: all suites passed" } else { "verify: FAILURES present" });
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_c0_scan(
    samples: usize,
    structure: Structure,
    output: &Option<std::path::PathBuf>,
) -> Result<ExitCode, String> {
    if samples < 1 {
        return Err("--samples must be at least 1".into());
    }
    let cfg = QuadratureConfig::default();
    let mut s = String::from("x_norm_sq,delta,c0\n");
    let q_const = heat::c0_q(&cfg).map_err(|e| e.to_string())?;
    for i in 0..samples {
        let x2 = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
        let delta = 2.0 * x2 - 1.0;
        let c0 = match structure {
            Structure::T => heat::c0_t_from_delta(delta, &cfg).map_err(|e| e.to_string())?,
            Structure::Q => q_const,
        };
        s.push_str(&format!("{},{},{}\n", round_sig(x2), round_sig(delta), round_sig(c0)));
    }
    write_out(output, &s)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(
    structure: Structure,
    degree: usize,
    output: &Option<std::path::PathBuf>,
) -> Result<ExitCode, String> {
    let sys = build_canonical_system();
    let op = match structure {
        Structure::T => OperatorSpec::TrivializableSumSquares,
        Structure::Q => OperatorSpec::QuaternionicSublaplacian,
    };
    let rep = spectral::spectrum(&sys, &op, degree, spectral::DEFAULT_CLUSTER_TOL)
        .map_err(|e| e.to_string())?;
    let eig: Vec<serde_json::Value> = rep
        .eigenvalues
        .iter()
        .map(|&(v, m)| serde_json::json!({"value": json_num(v), "multiplicity": m}))
        .collect();
    let obj = serde_json::json!({
        "operator": match structure { Structure::T => "T", Structure::Q => "Q" },
        "degree": rep.degree,
        "dimension": rep.dimension,
        "eigenvalues": eig,
    });
    write_out(output, &format!("{}\n", serde_json::to_string_pretty(&obj).unwrap()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_popp(point: &str) -> Result<ExitCode, String> {
    let z = parse_point(point)?;
    let sys = build_canonical_system();
    let m = s7sr::sr::popp_matrix_t(&sys, &z);
    let rows: Vec<Vec<serde_json::Value>> =
        (0..3).map(|i| (0..3).map(|j| json_num(m[(i, j)])).collect()).collect();
    let obj = serde_json::json!({
        "point": (0..8).map(|i| json_num(z.coords()[i])).collect::<Vec<_>>(),
        "x_norm_sq": json_num(z.x_norm_sq()),
        "matrix_b_t": rows,
        "density_t": json_num(s7sr::sr::popp_density_t(&z)),
        "density_q": json_num(s7sr::sr::popp_density_q()),
    });
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_jz(point: &str, zdir: &str) -> Result<ExitCode, String> {
    let z = parse_point(point)?;
    let dir: [f64; 3] = parse_reals(zdir, "--z")?;
    let sys = build_canonical_system();
    let spec = TangentGroupSpec::trivializable_at(&sys, &z);
    let zv = Vec3::new(dir[0], dir[1], dir[2]);
    let m = tangent::j_matrix(&spec, &zv);
    let rows: Vec<Vec<serde_json::Value>> =
        (0..4).map(|i| (0..4).map(|j| json_num(m[(i, j)])).collect()).collect();
    let det = tangent::j_determinant(&spec, &zv);
    let det_closed = 16.0 * z.delta().powi(2) * zv.norm_squared().powi(2);
    let ev = tangent::j_spectrum(&spec, &zv);
    let obj = serde_json::json!({
        "matrix": rows,
        "determinant": json_num(det),
        "determinant_closed_form": json_num(det_closed),
        "eigenvalues_imag": ev.iter().map(|e| json_num(e.im)).collect::<Vec<_>>(),
        "nonsingular": tangent::is_nonsingular(&z),
    });
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn cmd_type(grid: usize) -> Result<ExitCode, String> {
    if grid < 2 {
        return Err("--grid must be at least 2".into());
    }
    let sys = build_canonical_system();
    println!("x_norm_sq,delta,label,eig1,eig2,eig3");
    for i in 0..grid {
        let x2 = i as f64 / (grid - 1) as f64;
        let z = SpherePoint::with_x_norm_sq(x2);
        let spec = TangentGroupSpec::trivializable_at(&sys, &z);
        let (_, cls) = tangent::curvature_quadratic(&spec, 1e-10);
        println!(
            "{},{},{:?},{},{},{}",
            round_sig(x2),
            round_sig(z.delta()),
            cls.label,
            round_sig(cls.eigenvalues[0]),
            round_sig(cls.eigenvalues[1]),
            round_sig(cls.eigenvalues[2])
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_inclusion(max_degree: usize) -> Result<ExitCode, String> {
    let sys = build_canonical_system();
    let rep = spectral::spectra_inclusion(&sys, max_degree, 1e-8).map_err(|e| e.to_string())?;
    let degrees: Vec<serde_json::Value> = rep
        .per_degree
        .iter()
        .map(|d| {
            serde_json::json!({
                "degree": d.degree,
                "matched": d.matched.iter().map(|&(vq, mq, vt, mt)| serde_json::json!({
                    "q_value": json_num(vq), "q_multiplicity": mq,
                    "t_value": json_num(vt), "t_multiplicity": mt,
                })).collect::<Vec<_>>(),
                "unmatched": d.unmatched.iter().map(|u| serde_json::json!({
                    "value": json_num(u.value),
                    "multiplicity": u.multiplicity,
                    "eigenspace_vanishes_at_np": u.eigenspace_vanishes_at_np,
                })).collect::<Vec<_>>(),
                "spectra_differ": d.spectra_differ,
            })
        })
        .collect();
    let obj = serde_json::json!({
        "max_degree": max_degree,
        "tolerance": rep.tol,
        "inclusion_holds": rep.holds,
        "distinguishable": rep.distinguishable,
        "per_degree": degrees,
    });
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
    Ok(if rep.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_heat(point: &str, t: f64, a: &str, b: &str) -> Result<ExitCode, String> {
    if t <= 0.0 {
        return Err("--t must be positive".into());
    }
    let z = parse_point(point)?;
    let av: [f64; 4] = parse_reals(a, "--a")?;
    let bv: [f64; 3] = parse_reals(b, "--b")?;
    let sys = build_canonical_system();
    let spec = TangentGroupSpec::trivializable_at(&sys, &z);
    let query = heat::HeatKernelQuery {
        spec,
        t,
        source: GroupElement::identity(),
        target: GroupElement::new(Vec4::from_row_slice(&av), Vec3::from_row_slice(&bv)),
    };
    let cfg = QuadratureConfig::default();
    let k = heat::bgg_heat_kernel(&query, &cfg).map_err(|e| e.to_string())?;
    let obj = serde_json::json!({
        "t": json_num(t),
        "delta": json_num(z.delta()),
        "kernel": json_num(k),
        "c0_t": json_num(heat::c0_t(&z, &cfg).map_err(|e| e.to_string())?),
    });
    println!("{}", serde_json::to_string_pretty(&obj).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { seed, break_anticommutation, tensor_kmax, inclusion_kmax } => {
            cmd_verify(*seed, *break_anticommutation, *tensor_kmax, *inclusion_kmax)
        }
        Command::C0Scan { samples, structure, output } => cmd_c0_scan(*samples, *structure, output),
        Command::Spectrum { structure, degree, output } => cmd_spectrum(*structure, *degree, output),
        Command::Popp { point } => cmd_popp(point),
        Command::Jz { point, z } => cmd_jz(point, z),
        Command::Type { grid } => cmd_type(*grid),
        Command::Inclusion { max_degree } => cmd_inclusion(*max_degree),
        Command::Heat { point, t, a, b } => cmd_heat(point, *t, a, b),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            ExitCode::from(2)
        }
    }
}
