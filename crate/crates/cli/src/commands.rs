//! Implementations behind the CLI subcommands. Everything here is a pure
//! function of the run configuration and the input files; outputs are
//! written atomically (temp file + rename) and carry no timestamps, so
//! identical invocations produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};

use dklattice::assembly::{self, OperatorKind, OperatorMatrix};
use dklattice::calculus::{self, DiracSign};
use dklattice::dirac_kahler::{
    cauchy_march, duffin_decompose, duffin_residual, recompose, residual_csv, window_residuals,
};
use dklattice::forms::{Form, InhomogeneousForm};
use dklattice::io;
use dklattice::{Complex64, Domain, Error, Scalar};

use crate::config::RunConfig;
use crate::report::SuiteReport;
use crate::suites::{run_suite, Suite};

/// Exit codes: 0 pass, 1 property failure, 2 usage or guard error.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.out_dir.join(name)
}

/// Map guard-style library errors to the usage exit code.
pub fn error_exit_code(err: &anyhow::Error) -> i32 {
    if let Some(e) = err.downcast_ref::<Error>() {
        match e {
            Error::SizeGuard { .. }
            | Error::MassNotInvertible
            | Error::UnknownOperator(_)
            | Error::TimeExtent { .. }
            | Error::InitialDataSupport
            | Error::FormFile(_)
            | Error::EmptyDomain => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    } else {
        EXIT_USAGE
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn cmd_verify(suite: Suite, cfg: &RunConfig) -> anyhow::Result<i32> {
    let report = run_suite(suite, cfg)?;
    persist_report(&report, cfg)?;
    print!("{}", report.summary());
    println!(
        "config: extents {:?}, boundary {:?}, scalar {}, seed {}, tol-identity {:e}, tol-eigen {:e}, spectral lattice {:?} periodic",
        cfg.extents,
        cfg.boundary,
        cfg.scalar.name(),
        cfg.seed,
        cfg.tol_identity,
        cfg.tol_eigen,
        cfg.spectral_domain().map(|d| d.extents()).unwrap_or([0; 4])
    );
    Ok(if report.pass() { EXIT_OK } else { EXIT_FAIL })
}

pub fn persist_report(report: &SuiteReport, cfg: &RunConfig) -> anyhow::Result<()> {
    let csv = report.to_csv();
    write_atomic(
        &out_path(cfg, &format!("verify_{}.csv", report.suite)),
        csv.as_bytes(),
    )?;
    if let Some(ce) = &report.counterexample {
        let path = out_path(cfg, &format!("counterexample_{}.json", report.suite));
        write_atomic(&path, ce.json.as_bytes())?;
        eprintln!(
            "counterexample for `{}` written to {}",
            ce.check,
            path.display()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// apply
// ---------------------------------------------------------------------------

fn apply_homogeneous<S: Scalar>(op: &str, form: &Form<S>) -> anyhow::Result<Form<S>> {
    Ok(match op {
        "coboundary" | "d" => {
            if form.degree() == 4 {
                eprintln!("warning: top degree — the coboundary of a 4-form is zero");
            }
            calculus::coboundary(form)
        }
        "codifferential" | "delta" => calculus::codifferential(form),
        "codifferential_star" | "delta_star" => {
            let (out, truncated) = calculus::codifferential_via_star(form);
            if truncated {
                eprintln!("warning: star-route support truncated at the padded boundary");
            }
            out
        }
        "star" => calculus::star(form),
        "star_inverse" => {
            let (out, truncated) = calculus::star_inverse(form);
            if truncated {
                eprintln!("warning: support truncated at the padded boundary");
            }
            out
        }
        "laplacian" => calculus::laplacian(form),
        other => return Err(Error::UnknownOperator(other.into()).into()),
    })
}

fn apply_typed<S: Scalar>(op: &str, input: &Path, output: &Path) -> anyhow::Result<()> {
    match op {
        "dirac_plus" | "dirac_minus" => {
            let w: InhomogeneousForm<S> = io::load_inhomogeneous(input)?;
            let sign = if op == "dirac_plus" {
                DiracSign::Plus
            } else {
                DiracSign::Minus
            };
            let out = calculus::dirac(&w, sign);
            let mut buf = Vec::new();
            io::write_inhomogeneous(&out, &mut buf)?;
            write_atomic(output, &buf)
        }
        _ => {
            let form: Form<S> = io::load_form(input)?;
            let out = apply_homogeneous(op, &form)?;
            let mut buf = Vec::new();
            io::write_form(&out, &mut buf)?;
            write_atomic(output, &buf)
        }
    }
}

pub fn cmd_apply(op: &str, input: &Path, output: &Path) -> anyhow::Result<i32> {
    let (tag, _) = io::peek_scalar_tag(input)?;
    match tag.as_str() {
        "integer" => apply_typed::<i64>(op, input, output)?,
        "real" => apply_typed::<f64>(op, input, output)?,
        "complex" | "exact" => apply_typed::<Complex64>(op, input, output)?,
        other => bail!("unknown scalar tag `{other}` in {}", input.display()),
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// assemble / spectrum / kernel
// ---------------------------------------------------------------------------

/// Parse an operator tag with optional mass parameters.
pub fn parse_operator_f64(
    op: &str,
    mass: Complex64,
    mass2: Complex64,
) -> anyhow::Result<OperatorKind<f64>> {
    if mass.im != 0.0 || mass2.im != 0.0 {
        bail!("this command assembles real matrices; imaginary masses are not supported here");
    }
    Ok(match op {
        "dirac_plus" => OperatorKind::DiracPlus,
        "dirac_minus" => OperatorKind::DiracMinus,
        "dk" => OperatorKind::Dk(mass.re),
        "two_mass" => OperatorKind::TwoMass(mass.re, mass2.re),
        _ => {
            if let Some(rest) = op.strip_prefix("duffin_") {
                let r: u8 = rest
                    .parse()
                    .map_err(|_| Error::UnknownOperator(op.into()))?;
                if r > 3 {
                    return Err(Error::UnknownOperator(op.into()).into());
                }
                OperatorKind::Duffin(r, mass.re)
            } else if let Some((name, deg)) = op.rsplit_once('_') {
                let r: u8 = deg.parse().map_err(|_| Error::UnknownOperator(op.into()))?;
                if r > 4 {
                    return Err(Error::UnknownOperator(op.into()).into());
                }
                match name {
                    "coboundary" => OperatorKind::Coboundary(r),
                    "codifferential" => OperatorKind::Codifferential(r),
                    "star" => OperatorKind::Star(r),
                    "laplacian" => OperatorKind::Laplacian(r),
                    _ => return Err(Error::UnknownOperator(op.into()).into()),
                }
            } else {
                return Err(Error::UnknownOperator(op.into()).into());
            }
        }
    })
}

fn parse_operator_complex(
    op: &str,
    mass: Complex64,
    mass2: Complex64,
) -> anyhow::Result<OperatorKind<Complex64>> {
    Ok(match op {
        "dirac_plus" => OperatorKind::DiracPlus,
        "dirac_minus" => OperatorKind::DiracMinus,
        "dk" => OperatorKind::Dk(mass),
        "two_mass" => OperatorKind::TwoMass(mass, mass2),
        _ => {
            // mass-free tags share the real parser
            match parse_operator_f64(op, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))? {
                OperatorKind::Coboundary(r) => OperatorKind::Coboundary(r),
                OperatorKind::Codifferential(r) => OperatorKind::Codifferential(r),
                OperatorKind::Star(r) => OperatorKind::Star(r),
                OperatorKind::Laplacian(r) => OperatorKind::Laplacian(r),
                OperatorKind::Duffin(r, _) => OperatorKind::Duffin(r, mass),
                _ => unreachable!("mass tags handled above"),
            }
        }
    })
}

pub fn cmd_assemble(
    op: &str,
    mass: Complex64,
    mass2: Complex64,
    cfg: &RunConfig,
) -> anyhow::Result<i32> {
    let domain = cfg.domain()?;
    let complex_mass = mass.im != 0.0 || mass2.im != 0.0;
    let (mtx_bytes, index, tag) = if complex_mass {
        let kind = parse_operator_complex(op, mass, mass2)?;
        let mx = assembly::assemble::<Complex64>(&kind, domain);
        let mut buf = Vec::new();
        assembly::write_matrix_market(&mx, &mut buf)?;
        (buf, assembly::index_json(&mx)?, mx.tag().to_string())
    } else {
        let kind = parse_operator_f64(op, mass, mass2)?;
        let mx = assembly::assemble::<f64>(&kind, domain);
        let mut buf = Vec::new();
        assembly::write_matrix_market(&mx, &mut buf)?;
        (buf, assembly::index_json(&mx)?, mx.tag().to_string())
    };
    write_atomic(&out_path(cfg, &format!("{tag}.mtx")), &mtx_bytes)?;
    write_atomic(
        &out_path(cfg, &format!("{tag}.index.json")),
        index.as_bytes(),
    )?;
    println!(
        "wrote {tag}.mtx and {tag}.index.json to {}",
        cfg.out_dir.display()
    );
    Ok(EXIT_OK)
}

/// Refuse to assemble anything the dense solvers would reject anyway.
fn guard_dense(kind: &OperatorKind<f64>, domain: &dklattice::Domain) -> anyhow::Result<()> {
    let cols = kind.col_space().len(domain);
    if cols > assembly::DENSE_SIZE_GUARD {
        return Err(Error::SizeGuard {
            cols,
            limit: assembly::DENSE_SIZE_GUARD,
        }
        .into());
    }
    Ok(())
}

pub fn cmd_spectrum(
    op: &str,
    count: usize,
    mass: Complex64,
    mass2: Complex64,
    cfg: &RunConfig,
) -> anyhow::Result<i32> {
    let domain = cfg.domain()?;
    let kind = parse_operator_f64(op, mass, mass2)?;
    guard_dense(&kind, &domain)?;
    let mx = assembly::assemble::<f64>(&kind, domain);
    let pairs = assembly::eigenpairs(&mx, count, cfg.tol_eigen * 1e-2)?;
    let mut csv = String::from("index,re,im,residual\n");
    for (i, (lambda, v)) in pairs.iter().enumerate() {
        let residual = eigen_residual(&mx, *lambda, v);
        csv.push_str(&format!(
            "{},{:e},{:e},{:e}\n",
            i, lambda.re, lambda.im, residual
        ));
    }
    let path = out_path(cfg, &format!("spectrum_{}.csv", kind.tag()));
    write_atomic(&path, csv.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn eigen_residual(mx: &OperatorMatrix<f64>, lambda: Complex64, v: &[Complex64]) -> f64 {
    let mut image = vec![Complex64::new(0.0, 0.0); mx.rows()];
    for &(r, c, val) in mx.entries() {
        image[r as usize] += v[c as usize] * val;
    }
    image
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn cmd_kernel(
    op: &str,
    mass: Complex64,
    mass2: Complex64,
    tol: f64,
    cfg: &RunConfig,
) -> anyhow::Result<i32> {
    let domain = cfg.domain()?;
    let kind = parse_operator_f64(op, mass, mass2)?;
    guard_dense(&kind, &domain)?;
    let mx = assembly::assemble::<f64>(&kind, domain);
    let null = assembly::kernel(&mx, tol)?;
    let mut csv = String::from("index,image_norm\n");
    for (i, v) in null.iter().enumerate() {
        let image = mx.mul_vec(v);
        let norm: f64 = image.iter().map(|x| x * x).sum::<f64>().sqrt();
        csv.push_str(&format!("{i},{norm:e}\n"));
        if let Some(space) = mx.col_space() {
            let bytes = kernel_vector_json(space, domain, v)?;
            write_atomic(
                &out_path(cfg, &format!("kernel_{}_{}.json", kind.tag(), i)),
                &bytes,
            )?;
        }
    }
    let path = out_path(cfg, &format!("kernel_{}.csv", kind.tag()));
    write_atomic(&path, csv.as_bytes())?;
    println!(
        "kernel dimension {} for {}; wrote {}",
        null.len(),
        kind.tag(),
        path.display()
    );
    Ok(EXIT_OK)
}

fn kernel_vector_json(
    space: assembly::BasisSpace,
    domain: Domain,
    v: &[f64],
) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match space {
        assembly::BasisSpace::Homogeneous(degree) => {
            let form = assembly::vec_to_form(degree, domain, v);
            io::write_form(&form, &mut buf)?;
        }
        assembly::BasisSpace::Inhomogeneous => {
            let w = assembly::vec_to_inhom(domain, v);
            io::write_inhomogeneous(&w, &mut buf)?;
        }
        assembly::BasisSpace::Pair(r) => {
            let p = assembly::vec_to_pair(r, domain, v);
            io::write_inhomogeneous(&p.to_inhomogeneous(), &mut buf)?;
        }
    }
    Ok(buf)
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

fn decompose_typed<S: Scalar>(
    input: &Path,
    mass: S,
    cfg: &RunConfig,
) -> anyhow::Result<(String, bool)> {
    let w: InhomogeneousForm<S> = io::load_inhomogeneous(input)?;
    let pairs = duffin_decompose(&w, &mass)?;
    let names = ["pair_01", "pair_12", "pair_23", "pair_34"];
    let mut csv = String::from("pair,rank,low_residual,high_residual\n");
    for (p, name) in pairs.iter().zip(names) {
        let mut buf = Vec::new();
        io::write_inhomogeneous(&p.to_inhomogeneous(), &mut buf)?;
        write_atomic(&out_path(cfg, &format!("{name}.json")), &buf)?;
        let res = duffin_residual(p, &mass);
        csv.push_str(&format!(
            "{},{},{:e},{:e}\n",
            name,
            p.rank(),
            res.low().norm(),
            res.high().norm()
        ));
    }
    let resum_defect = (&recompose(&pairs) - &w).norm();
    csv.push_str(&format!("resum,,{:e},\n", resum_defect));
    Ok((csv, resum_defect == 0.0))
}

pub fn cmd_decompose(input: &Path, mass: Complex64, cfg: &RunConfig) -> anyhow::Result<i32> {
    if mass.re == 0.0 && mass.im == 0.0 {
        return Err(Error::MassNotInvertible)
            .context("the decomposition divides by the mass; m = 0 is rejected");
    }
    let (tag, _) = io::peek_scalar_tag(input)?;
    let (csv, _) = match tag.as_str() {
        "integer" => {
            if mass.im != 0.0 || mass.re.fract() != 0.0 {
                bail!("integer-mode input needs an integer mass");
            }
            decompose_typed::<i64>(input, mass.re as i64, cfg)?
        }
        "real" => {
            if mass.im != 0.0 {
                bail!("real-mode input needs a real mass");
            }
            decompose_typed::<f64>(input, mass.re, cfg)?
        }
        "complex" | "exact" => decompose_typed::<Complex64>(input, mass, cfg)?,
        other => bail!("unknown scalar tag `{other}`"),
    };
    let path = out_path(cfg, "duffin_residuals.csv");
    write_atomic(&path, csv.as_bytes())?;
    println!("wrote pair files and {}", path.display());
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// march
// ---------------------------------------------------------------------------

fn march_typed<S: Scalar>(
    input: &Path,
    mass: S,
    steps: usize,
    cfg: &RunConfig,
) -> anyhow::Result<()> {
    let init: InhomogeneousForm<S> = io::load_inhomogeneous(input)?;
    let domain = init.domain();
    let field = cauchy_march(&init, &mass, steps, domain)?;
    let mut buf = Vec::new();
    io::write_inhomogeneous(&field, &mut buf)?;
    write_atomic(&out_path(cfg, "marched_field.json"), &buf)?;
    let rows = window_residuals(&field, &mass, (1, steps as i64));
    write_atomic(
        &out_path(cfg, "march_residuals.csv"),
        residual_csv(&rows).as_bytes(),
    )?;
    let max = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    println!(
        "marched {} steps; max slab residual {:e}; wrote marched_field.json and march_residuals.csv",
        steps, max
    );
    Ok(())
}

pub fn cmd_march(
    input: &Path,
    mass: Complex64,
    steps: usize,
    cfg: &RunConfig,
) -> anyhow::Result<i32> {
    let (tag, _) = io::peek_scalar_tag(input)?;
    match tag.as_str() {
        "integer" => {
            if mass.im != 0.0 || mass.re.fract() != 0.0 {
                bail!("integer-mode input needs an integer mass");
            }
            march_typed::<i64>(input, mass.re as i64, steps, cfg)?
        }
        "real" => {
            if mass.im != 0.0 {
                bail!("real-mode input needs a real mass");
            }
            march_typed::<f64>(input, mass.re, steps, cfg)?
        }
        "complex" | "exact" => march_typed::<Complex64>(input, mass, steps, cfg)?,
        other => bail!("unknown scalar tag `{other}`"),
    }
    Ok(EXIT_OK)
}

pub fn ensure_out_dir(cfg: &RunConfig) -> anyhow::Result<()> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        anyhow!(
            "cannot create output directory {}: {e}",
            cfg.out_dir.display()
        )
    })
}
