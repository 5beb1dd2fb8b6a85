//! The verification suites behind `dklattice verify`: each runs a family of
//! identity and spectral checks against the configured lattice and returns a
//! per-check report. Exact checks demand bit-equality (integer or rational
//! arithmetic); tolerance checks state the bound they used.

use dklattice::assembly::{self, BasisSpace, OperatorKind, OperatorMatrix};
use dklattice::calculus::{
    self, coboundary, codifferential, codifferential_via_star, cup, dirac, inner_product,
    inner_product_inhomogeneous, inner_product_signature, laplacian, star, star_inverse, DiracSign,
};
use dklattice::chains::{self, boundary, domain_chain, pair};
use dklattice::dirac_kahler::{
    cauchy_march, dk_residual, dk_residual_components, duffin_decompose, duffin_implies_kg_check,
    duffin_residual, klein_gordon_residual, klein_gordon_residual_inhomogeneous, recompose,
    window_residuals, DuffinPair,
};
use dklattice::forms::{Form, InhomogeneousForm, SampleCoeff, ValueSet};
use dklattice::io;
use dklattice::lattice::{BoundaryMode, DirectionSet, Domain, MultiIndex};
use dklattice::massless::{
    self, em_system_residual, gauge_transform, harmonic_basis, massless_shift_law_defect,
    notoph_system_residual, two_mass_residual, GaugeKind,
};
use dklattice::scalar::exactify;
use dklattice::{Complex64, ExactComplex, Scalar};

use crate::config::{RunConfig, ScalarMode};
use crate::report::SuiteReport;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Suite {
    Calculus,
    Duality,
    Adjointness,
    Dirac,
    Duffin,
    Gauge,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "calculus" => Ok(Suite::Calculus),
            "duality" => Ok(Suite::Duality),
            "adjointness" => Ok(Suite::Adjointness),
            "dirac" => Ok(Suite::Dirac),
            "duffin" => Ok(Suite::Duffin),
            "gauge" => Ok(Suite::Gauge),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite `{other}`")),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Calculus => "calculus",
            Suite::Duality => "duality",
            Suite::Adjointness => "adjointness",
            Suite::Dirac => "dirac",
            Suite::Duffin => "duffin",
            Suite::Gauge => "gauge",
            Suite::All => "all",
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    match suite {
        Suite::Calculus => calculus_suite(cfg),
        Suite::Duality => duality_suite(cfg),
        Suite::Adjointness => adjointness_suite(cfg),
        Suite::Dirac => dirac_suite(cfg),
        Suite::Duffin => duffin_suite(cfg),
        Suite::Gauge => gauge_suite(cfg),
        Suite::All => {
            let mut report = SuiteReport::new("all");
            for s in [
                Suite::Calculus,
                Suite::Duality,
                Suite::Adjointness,
                Suite::Dirac,
                Suite::Duffin,
                Suite::Gauge,
            ] {
                report.merge(run_suite(s, cfg)?);
            }
            Ok(report)
        }
    }
}

fn form_json<S: Scalar>(f: &Form<S>) -> String {
    let mut buf = Vec::new();
    io::write_form(f, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf8")
}

fn inhom_json<S: Scalar>(w: &InhomogeneousForm<S>) -> String {
    let mut buf = Vec::new();
    io::write_inhomogeneous(w, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf8")
}

/// Mode-aware identity check: exact in integer mode, within
/// `tol * (scale + 1)` otherwise.
fn identity_check(
    report: &mut SuiteReport,
    mode: ScalarMode,
    tol: f64,
    name: &str,
    defect: f64,
    scale: f64,
) -> bool {
    match mode {
        ScalarMode::Integer => report.exact(format!("{name} [integer]"), defect),
        _ => report.bounded(
            format!("{name} [{}]", mode.name()),
            defect,
            tol * (scale + 1.0),
        ),
    }
}

// ---------------------------------------------------------------------------
// calculus
// ---------------------------------------------------------------------------

fn calculus_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    match cfg.scalar {
        ScalarMode::Integer => calculus_generic::<i64>(cfg),
        ScalarMode::Real => calculus_generic::<f64>(cfg),
        ScalarMode::Complex => calculus_generic::<Complex64>(cfg),
    }
}

/// Star reference table frozen by hand: metric sign of each class (the star
/// maps a class to its complement at the `τ_J`-shifted site with this sign).
fn star_sign_reference() -> Vec<(Vec<usize>, i64)> {
    vec![
        (vec![], 1),
        (vec![0], -1),
        (vec![1], -1),
        (vec![2], 1),
        (vec![3], -1),
        (vec![0, 1], -1),
        (vec![0, 2], 1),
        (vec![0, 3], -1),
        (vec![1, 2], 1),
        (vec![1, 3], -1),
        (vec![2, 3], 1),
        (vec![0, 1, 2], -1),
        (vec![0, 1, 3], 1),
        (vec![0, 2, 3], -1),
        (vec![1, 2, 3], -1),
        (vec![0, 1, 2, 3], -1),
    ]
}

fn calculus_generic<S: Scalar + SampleCoeff>(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("calculus");
    let domain = cfg.domain()?;
    let mode = cfg.scalar;
    let tol = cfg.tol_identity;
    let set = match mode {
        ScalarMode::Integer => ValueSet::SmallIntegers,
        _ => ValueSet::UniformReals,
    };

    // d∘d = 0 and δ∘δ = 0, 200 seeded forms per degree
    for degree in 0..=2u8 {
        let mut worst = 0.0f64;
        let mut bad: Option<Form<S>> = None;
        for i in 0..200u64 {
            let w: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(i + degree as u64 * 1000),
                set,
            );
            let defect = coboundary(&coboundary(&w)).norm();
            if defect > worst {
                worst = defect;
                bad = Some(w);
            }
        }
        if !identity_check(
            &mut report,
            mode,
            tol,
            &format!("d_squared_zero_degree_{degree}"),
            worst,
            1.0,
        ) {
            if let Some(w) = bad {
                report.attach_counterexample("d_squared_zero", form_json(&w));
            }
        }
    }
    for degree in 2..=4u8 {
        let mut worst = 0.0f64;
        for i in 0..200u64 {
            let w: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(i + degree as u64 * 2000),
                set,
            );
            worst = worst.max(codifferential(&codifferential(&w)).norm());
        }
        identity_check(
            &mut report,
            mode,
            tol,
            &format!("delta_squared_zero_degree_{degree}"),
            worst,
            1.0,
        );
    }

    // Leibniz rule, 100 random pairs over all degree combinations <= 3
    let combos = [
        (0u8, 0u8),
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 0),
        (1, 1),
        (1, 2),
        (2, 0),
        (2, 1),
        (3, 0),
    ];
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    let mut bad: Option<(Form<S>, Form<S>)> = None;
    for (n, &(p, q)) in combos.iter().enumerate() {
        for i in 0..10u64 {
            let f: Form<S> =
                Form::random(p, domain, cfg.stream_seed(3000 + n as u64 * 10 + i), set);
            let g: Form<S> =
                Form::random(q, domain, cfg.stream_seed(4000 + n as u64 * 10 + i), set);
            let lhs = coboundary(&cup(&f, &g)?);
            let df_g = cup(&coboundary(&f), &g)?;
            let f_dg = cup(&f, &coboundary(&g))?;
            let rhs = if p % 2 == 0 {
                &df_g + &f_dg
            } else {
                &df_g - &f_dg
            };
            let defect = (&lhs - &rhs).norm();
            scale = scale.max(lhs.norm());
            if defect > worst {
                worst = defect;
                bad = Some((f, g));
            }
        }
    }
    if !identity_check(
        &mut report,
        mode,
        tol,
        "leibniz_rule_100_pairs",
        worst,
        scale,
    ) {
        if let Some((f, _)) = bad {
            report.attach_counterexample("leibniz_rule", form_json(&f));
        }
    }

    // star conformance against the frozen reference table
    let site = MultiIndex::new(2.min(domain.extent(0) as i64), 1, 1, 1);
    let mut table_defect = 0.0f64;
    for (dirs_vec, sign) in star_sign_reference() {
        let dirs = DirectionSet::from_dirs(&dirs_vec)?;
        let s: Form<S> = Form::basis(dirs.len() as u8, dirs, site, domain)?;
        let starred = star(&s);
        let mut expected: Form<S> = Form::zero(4 - dirs.len() as u8, domain);
        expected.set_coeff(
            dirs.complement(),
            domain.canonical(site.shifted_by_set(dirs, 1)),
            S::from_i64(sign),
        );
        table_defect = table_defect.max((&starred - &expected).norm());
    }
    report.exact("star_reference_table_16_classes", table_defect);

    // defining relation s ∪ *s = Q(k0) e, exhaustively over classes
    let mut defining_defect = 0.0f64;
    for degree in 0..=4u8 {
        for &dirs in DirectionSet::by_degree(degree as usize) {
            let s: Form<S> = Form::basis(degree, dirs, site, domain)?;
            let product = cup(&s, &star(&s))?;
            let mut expected: Form<S> = Form::zero(4, domain);
            let q = if dirs.is_timelike() { -1 } else { 1 };
            expected.set_coeff(DirectionSet::FULL, site, S::from_i64(q));
            defining_defect = defining_defect.max((&product - &expected).norm());
        }
    }
    report.exact("star_defining_relation_all_classes", defining_defect);

    // double star: (-1)^{r+1} times the forward-translated copy
    let mut double_defect = 0.0f64;
    for degree in 0..=4u8 {
        let w: Form<S> = Form::random(degree, domain, cfg.stream_seed(5000 + degree as u64), set);
        let ss = star(&star(&w));
        let sign = if (degree + 1) % 2 == 0 { 1 } else { -1 };
        for &dirs in w.sets() {
            for k in domain.interior_sites() {
                let translated = domain.canonical(MultiIndex::new(
                    k.get(0) + 1,
                    k.get(1) + 1,
                    k.get(2) + 1,
                    k.get(3) + 1,
                ));
                let got = ss.coeff(dirs, translated);
                let want = if sign > 0 {
                    w.coeff(dirs, k)
                } else {
                    -w.coeff(dirs, k)
                };
                double_defect = double_defect.max((got - want).abs_sq().sqrt());
            }
        }
    }
    report.exact("double_star_translation_law", double_defect);

    // star_inverse really inverts
    let mut inverse_defect = 0.0f64;
    for degree in 0..=4u8 {
        let w: Form<S> = Form::random(degree, domain, cfg.stream_seed(5500 + degree as u64), set);
        let (back, _) = star_inverse(&star(&w));
        inverse_defect = inverse_defect.max((&back - &w).norm());
    }
    report.exact("star_inverse_left_inverse", inverse_defect);

    // codifferential: explicit formulas versus the star route (both routes
    // add the same floating values in the same order, so this is exact in
    // every scalar mode)
    let mut cross_defect = 0.0f64;
    let mut cross_bad: Option<Form<S>> = None;
    for degree in 1..=4u8 {
        for i in 0..25u64 {
            let w: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(6000 + degree as u64 * 100 + i),
                set,
            );
            let direct = codifferential(&w);
            let (via, truncated) = codifferential_via_star(&w);
            let defect = (&direct - &via).norm() + if truncated { 1.0 } else { 0.0 };
            if defect > cross_defect {
                cross_defect = defect;
                cross_bad = Some(w);
            }
        }
    }
    if !report.exact("codifferential_explicit_vs_star_route", cross_defect) {
        if let Some(w) = cross_bad {
            report.attach_counterexample("codifferential_cross_check", form_json(&w));
        }
    }

    // inner product: cup/star route versus the signature sums
    let mut ip_defect = 0.0f64;
    let mut ip_scale = 0.0f64;
    for degree in 0..=4u8 {
        for i in 0..10u64 {
            let f: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(7000 + degree as u64 * 10 + i),
                set,
            );
            let g: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(7100 + degree as u64 * 10 + i),
                set,
            );
            let a = inner_product(&f, &g)?;
            let b = inner_product_signature(&f, &g)?;
            ip_defect = ip_defect.max((a.clone() - b).abs_sq().sqrt());
            ip_scale = ip_scale.max(a.abs_sq().sqrt());
        }
    }
    identity_check(
        &mut report,
        mode,
        tol,
        "inner_product_cup_star_vs_signature",
        ip_defect,
        ip_scale,
    );

    // signature reproduction on single-component forms (exact in all modes)
    let mut sig_defect = 0.0f64;
    for degree in 0..=4u8 {
        for &dirs in DirectionSet::by_degree(degree as usize) {
            let mut f: Form<S> = Form::zero(degree, domain);
            let c = S::from_i64(3);
            f.set_coeff(dirs, site, c.clone());
            let got = inner_product(&f, &f)?;
            let want = S::from_i64(9 * calculus::gram_sign(dirs));
            sig_defect = sig_defect.max((got - want).abs_sq().sqrt());
        }
    }
    report.exact("signature_single_component_forms", sig_defect);

    // frozen Laplacian stencil on the scalar indicator (computed once from
    // the first-order compositions): -4 center, -1 time neighbors, +1 space
    let center = MultiIndex::new(
        (domain.extent(0) as i64 + 1) / 2,
        (domain.extent(1) as i64 + 1) / 2,
        (domain.extent(2) as i64 + 1) / 2,
        (domain.extent(3) as i64 + 1) / 2,
    );
    let indicator: Form<S> = Form::basis(0, DirectionSet::EMPTY, center, domain)?;
    let lap = laplacian(&indicator);
    let mut stencil_defect = 0.0f64;
    let mut expected: Form<S> = Form::zero(0, domain);
    // accumulate rather than overwrite: on tiny periodic extents the two
    // neighbors along an axis wrap onto the same site
    expected.add_coeff(DirectionSet::EMPTY, center, S::from_i64(-4));
    for (axis, sign) in [(0usize, -1i64), (1, 1), (2, 1), (3, 1)] {
        expected.add_coeff(
            DirectionSet::EMPTY,
            domain.canonical(center.shifted(axis, 1)),
            S::from_i64(sign),
        );
        expected.add_coeff(
            DirectionSet::EMPTY,
            domain.canonical(center.shifted(axis, -1)),
            S::from_i64(sign),
        );
    }
    stencil_defect = stencil_defect.max((&lap - &expected).norm());
    report.exact("laplacian_scalar_stencil", stencil_defect);

    // Laplacian equals the squared Dirac operator, partwise
    let w: InhomogeneousForm<S> = InhomogeneousForm::random(domain, cfg.stream_seed(8000), set);
    let squared = dirac(&dirac(&w, DiracSign::Minus), DiracSign::Minus);
    let lap_w = calculus::laplacian_inhomogeneous(&w);
    identity_check(
        &mut report,
        mode,
        tol,
        "laplacian_is_squared_dirac",
        (&squared - &lap_w).norm(),
        lap_w.norm(),
    );

    Ok(report)
}

// ---------------------------------------------------------------------------
// duality
// ---------------------------------------------------------------------------

fn duality_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("duality");
    let domain = cfg.domain()?;

    // boundary squares to zero on every basis chain
    let mid = MultiIndex::new(2, 2, 2, 2);
    let mut dd_defect = 0.0f64;
    for degree in 1..=4usize {
        for &dirs in DirectionSet::by_degree(degree) {
            let bb = boundary(&boundary(&chains::Chain::basis(dirs, mid)));
            if !bb.is_zero() {
                dd_defect += 1.0;
            }
        }
    }
    report.exact("boundary_squared_zero_all_classes", dd_defect);

    // duality <∂a, ω> = <a, dω> over every interior basis chain, random
    // integer forms (exact)
    let mut duality_defect = 0.0f64;
    let mut bad: Option<Form<i64>> = None;
    for degree in 1..=4u8 {
        for i in 0..4u64 {
            let w: Form<i64> = Form::random(
                degree - 1,
                domain,
                cfg.stream_seed(9000 + degree as u64 * 10 + i),
                ValueSet::SmallIntegers,
            );
            let dw = coboundary(&w);
            for &dirs in DirectionSet::by_degree(degree as usize) {
                for site in domain.interior_sites() {
                    let a = chains::Chain::basis(dirs, site);
                    let lhs = pair(&boundary(&a), &w);
                    let rhs = pair(&a, &dw);
                    let defect = ((lhs - rhs) as f64).abs();
                    if defect > duality_defect {
                        duality_defect = defect;
                        bad = Some(w.clone());
                    }
                }
            }
        }
    }
    if !report.exact("duality_boundary_vs_coboundary", duality_defect) {
        if let Some(w) = bad {
            report.attach_counterexample("duality", form_json(&w));
        }
    }

    // the domain chain's boundary carries only extreme-index faces
    let bv = boundary(&domain_chain(&domain));
    let mut face_defect = 0.0f64;
    for (dirs, site, _) in bv.terms() {
        let missing = dirs.complement().iter().next().unwrap();
        let c = site.get(missing);
        if c != 1 && c != domain.extent(missing) as i64 + 1 {
            face_defect += 1.0;
        }
    }
    report.exact("domain_boundary_extreme_faces_only", face_defect);

    Ok(report)
}

// ---------------------------------------------------------------------------
// adjointness
// ---------------------------------------------------------------------------

fn adjointness_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = match cfg.scalar {
        ScalarMode::Integer => adjointness_generic::<i64>(cfg)?,
        ScalarMode::Real => adjointness_generic::<f64>(cfg)?,
        ScalarMode::Complex => adjointness_generic::<Complex64>(cfg)?,
    };

    // matrix-level forms, exact in integer arithmetic on both boundary modes
    for mode in [cfg.boundary, BoundaryMode::Periodic] {
        let domain = Domain::new(
            if mode == BoundaryMode::Periodic {
                [2, 2, 2, 2]
            } else {
                cfg.extents
            },
            mode,
        )?;
        let label = match mode {
            BoundaryMode::ZeroPadded => "zero",
            BoundaryMode::Periodic => "periodic",
        };
        let mut defect = 0.0f64;
        for r in 0..=3u8 {
            let d = assembly::assemble::<i64>(&OperatorKind::Coboundary(r), domain);
            let delta = assembly::assemble::<i64>(&OperatorKind::Codifferential(r + 1), domain);
            let g_hi = assembly::gram_matrix::<i64>(BasisSpace::Homogeneous(r + 1), domain);
            let g_lo = assembly::gram_matrix::<i64>(BasisSpace::Homogeneous(r), domain);
            let lhs = d.transpose().matmul(&g_hi)?;
            let rhs = g_lo.matmul(&delta)?;
            defect = defect.max(lhs.sub(&rhs)?.max_abs_entry());
        }
        report.exact(
            format!("matrix_adjointness_dT_G_eq_G_codiff [{label}]"),
            defect,
        );

        let g = assembly::gram_matrix::<i64>(BasisSpace::Inhomogeneous, domain);
        let dp = assembly::assemble::<i64>(&OperatorKind::DiracPlus, domain);
        let dm = assembly::assemble::<i64>(&OperatorKind::DiracMinus, domain);
        let sym = dp.transpose().matmul(&g)?.sub(&g.matmul(&dp)?)?;
        report.exact(
            format!("matrix_dirac_plus_gram_symmetric [{label}]"),
            sym.max_abs_entry(),
        );
        let anti = dm
            .transpose()
            .matmul(&g)?
            .sub(&g.matmul(&dm)?.scaled(&-1))?;
        report.exact(
            format!("matrix_dirac_minus_gram_antisymmetric [{label}]"),
            anti.max_abs_entry(),
        );
    }
    Ok(report)
}

fn adjointness_generic<S: Scalar + SampleCoeff>(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("adjointness");
    let domain = cfg.domain()?;
    let mode = cfg.scalar;
    let set = match mode {
        ScalarMode::Integer => ValueSet::SmallIntegers,
        _ => ValueSet::UniformReals,
    };

    // (d f, g) = (f, δ g), interior-supported random forms; the bound is
    // tol * (|lhs| + |rhs| + 1)
    for degree in 0..=3u8 {
        let mut worst = 0.0f64;
        let mut bad: Option<Form<S>> = None;
        for i in 0..50u64 {
            let f: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(10_000 + degree as u64 * 100 + i),
                set,
            );
            let g: Form<S> = Form::random(
                degree + 1,
                domain,
                cfg.stream_seed(11_000 + degree as u64 * 100 + i),
                set,
            );
            let lhs = inner_product(&coboundary(&f), &g)?;
            let rhs = inner_product(&f, &codifferential(&g))?;
            let scale = lhs.abs_sq().sqrt() + rhs.abs_sq().sqrt();
            let defect = (lhs - rhs).abs_sq().sqrt();
            let measure = match mode {
                ScalarMode::Integer => defect,
                _ => defect / (cfg.tol_identity * (scale + 1.0)),
            };
            if measure > worst {
                worst = measure;
                bad = Some(f.clone());
            }
        }
        let ok = match mode {
            ScalarMode::Integer => report.exact(
                format!("adjointness_d_delta_degree_{degree} [integer]"),
                worst,
            ),
            _ => report.bounded(
                format!("adjointness_d_delta_degree_{degree} [{}]", mode.name()),
                worst,
                1.0,
            ),
        };
        if !ok {
            if let Some(f) = bad {
                report.attach_counterexample("adjointness", form_json(&f));
            }
        }
    }

    // Laplacian self-adjointness
    let mut lap_worst = 0.0f64;
    for degree in 0..=4u8 {
        for i in 0..20u64 {
            let f: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(12_000 + degree as u64 * 100 + i),
                set,
            );
            let g: Form<S> = Form::random(
                degree,
                domain,
                cfg.stream_seed(13_000 + degree as u64 * 100 + i),
                set,
            );
            let lhs = inner_product(&laplacian(&f), &g)?;
            let rhs = inner_product(&f, &laplacian(&g))?;
            let scale = lhs.abs_sq().sqrt() + rhs.abs_sq().sqrt();
            let defect = (lhs - rhs).abs_sq().sqrt();
            lap_worst = lap_worst.max(match mode {
                ScalarMode::Integer => defect,
                _ => defect / (cfg.tol_identity * (scale + 1.0)),
            });
        }
    }
    match mode {
        ScalarMode::Integer => report.exact("laplacian_self_adjoint [integer]", lap_worst),
        _ => report.bounded(
            format!("laplacian_self_adjoint [{}]", mode.name()),
            lap_worst,
            1.0,
        ),
    };

    // Dirac operators: + self-adjoint, - anti-self-adjoint
    let mut plus_worst = 0.0f64;
    let mut minus_worst = 0.0f64;
    for i in 0..20u64 {
        let a: InhomogeneousForm<S> =
            InhomogeneousForm::random(domain, cfg.stream_seed(14_000 + i), set);
        let b: InhomogeneousForm<S> =
            InhomogeneousForm::random(domain, cfg.stream_seed(15_000 + i), set);
        let pl = inner_product_inhomogeneous(&dirac(&a, DiracSign::Plus), &b)?;
        let pr = inner_product_inhomogeneous(&a, &dirac(&b, DiracSign::Plus))?;
        let ml = inner_product_inhomogeneous(&dirac(&a, DiracSign::Minus), &b)?;
        let mr = inner_product_inhomogeneous(&a, &dirac(&b, DiracSign::Minus))?;
        let scale_p = pl.abs_sq().sqrt() + pr.abs_sq().sqrt();
        let scale_m = ml.abs_sq().sqrt() + mr.abs_sq().sqrt();
        let dp = (pl - pr).abs_sq().sqrt();
        let dm = (ml + mr).abs_sq().sqrt();
        match mode {
            ScalarMode::Integer => {
                plus_worst = plus_worst.max(dp);
                minus_worst = minus_worst.max(dm);
            }
            _ => {
                plus_worst = plus_worst.max(dp / (cfg.tol_identity * (scale_p + 1.0)));
                minus_worst = minus_worst.max(dm / (cfg.tol_identity * (scale_m + 1.0)));
            }
        }
    }
    match mode {
        ScalarMode::Integer => {
            report.exact("dirac_plus_self_adjoint [integer]", plus_worst);
            report.exact("dirac_minus_anti_self_adjoint [integer]", minus_worst);
        }
        _ => {
            report.bounded(
                format!("dirac_plus_self_adjoint [{}]", mode.name()),
                plus_worst,
                1.0,
            );
            report.bounded(
                format!("dirac_minus_anti_self_adjoint [{}]", mode.name()),
                minus_worst,
                1.0,
            );
        }
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// dirac
// ---------------------------------------------------------------------------

fn dirac_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("dirac");
    let domain = cfg.domain()?;

    // the sixteen printed difference equations reproduce the operator
    // residual exactly; 100 random integer inhomogeneous forms
    let mut worst = 0.0f64;
    let mut bad: Option<InhomogeneousForm<i64>> = None;
    for i in 0..100u64 {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(16_000 + i), ValueSet::SmallIntegers);
        let mass = (i as i64 % 5) - 2;
        let defect = (&dk_residual_components(&w, &mass) - &dk_residual(&w, &mass)).norm();
        if defect > worst {
            worst = defect;
            bad = Some(w);
        }
    }
    if !report.exact("component_equations_match_operator_route", worst) {
        if let Some(w) = bad {
            report.attach_counterexample("component_equations", inhom_json(&w));
        }
    }

    // squaring identity binding the Dirac and Klein-Gordon residuals
    let mut sq_defect = 0.0f64;
    for i in 0..20u64 {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(17_000 + i), ValueSet::SmallIntegers);
        let mass = 2i64;
        let r = dk_residual(&w, &mass);
        let lhs =
            &dirac(&dirac(&w, DiracSign::Minus), DiracSign::Minus) - &w.scaled(&(mass * mass));
        let rhs = &dirac(&r, DiracSign::Minus) + &r.scaled(&mass);
        sq_defect = sq_defect.max((&lhs - &rhs).norm());
    }
    report.exact("squaring_identity_dirac_vs_kg", sq_defect);

    // spectral pipeline: eigenvectors of the assembled operator solve the
    // equation at their eigenvalue
    let spectral = cfg.spectral_domain()?;
    let dm = assembly::assemble::<f64>(&OperatorKind::DiracMinus, spectral);
    let pairs = assembly::eigenpairs(&dm, 5, cfg.tol_eigen * 1e-2)?;
    report.status("eigenpairs_found_5", pairs.len() == 5);
    for (n, (lambda, vector)) in pairs.iter().enumerate() {
        let w = assembly::vec_to_inhom(spectral, vector);
        let residual = dk_residual(&w, lambda).norm();
        report.bounded(
            format!("dk_residual_of_eigenvector_{n}"),
            residual,
            cfg.tol_eigen * w.norm(),
        );
        let kg = klein_gordon_residual_inhomogeneous(&w, &(lambda * lambda)).norm();
        report.bounded(
            format!("kg_residual_of_eigenvector_{n}"),
            kg,
            cfg.tol_eigen * w.norm(),
        );
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// duffin
// ---------------------------------------------------------------------------

fn lift_inhom(w: &InhomogeneousForm<Complex64>) -> InhomogeneousForm<ExactComplex> {
    w.map_scalars(|z| exactify(*z).expect("finite coefficients"))
}

fn duffin_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("duffin");
    let domain = cfg.domain()?;

    // recomposition identity in exact arithmetic, random inputs
    let mut recompose_defect = 0.0f64;
    for i in 0..20u64 {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(18_000 + i), ValueSet::SmallIntegers);
        let mass = if i % 2 == 0 { 1i64 } else { -1 };
        let pairs = duffin_decompose(&w, &mass)?;
        if recompose(&pairs) != w {
            recompose_defect += 1.0;
        }
    }
    for i in 0..10u64 {
        let w: InhomogeneousForm<ExactComplex> =
            InhomogeneousForm::random(domain, cfg.stream_seed(19_000 + i), ValueSet::SmallIntegers);
        let mass = ExactComplex::from_re_im(1.5, -0.25).unwrap();
        let pairs = duffin_decompose(&w, &mass)?;
        if recompose(&pairs) != w {
            recompose_defect += 1.0;
        }
    }
    report.exact("duffin_recomposition_exact", recompose_defect);

    // rejection of the zero mass
    let w0: InhomogeneousForm<f64> =
        InhomogeneousForm::random(domain, cfg.stream_seed(20_000), ValueSet::UniformReals);
    report.status(
        "decompose_rejects_zero_mass",
        duffin_decompose(&w0, &0.0).is_err(),
    );

    // eigen-based pipeline on the spectral lattice: lift the eigenvector and
    // the eigenvalue into exact rational-complex arithmetic
    let spectral = cfg.spectral_domain()?;
    let dm = assembly::assemble::<f64>(&OperatorKind::DiracMinus, spectral);
    let all = assembly::eigenpairs(&dm, 10, cfg.tol_eigen * 1e-2)?;
    let nonzero: Vec<_> = all
        .into_iter()
        .filter(|(l, _)| l.norm() > 1e-6)
        .take(5)
        .collect();
    report.status("five_nonzero_eigenvalues", nonzero.len() == 5);

    for (n, (lambda, vector)) in nonzero.iter().enumerate() {
        let w_c = assembly::vec_to_inhom(spectral, vector);
        let w = lift_inhom(&w_c);
        let mass = exactify(*lambda).expect("finite eigenvalue");
        let scale = w.norm();
        let pairs = duffin_decompose(&w, &mass)?;

        // bitwise-exact recomposition in exact arithmetic
        let resum_exact = recompose(&pairs) == w;
        report.status(
            format!("eigen_{n}_recomposition_bitwise_exact"),
            resum_exact,
        );

        for p in &pairs {
            let res = duffin_residual(p, &mass);
            report.bounded(
                format!("eigen_{n}_duffin_residual_rank_{}", p.rank()),
                res.norm(),
                cfg.tol_eigen * scale,
            );
            // Klein-Gordon residual of every part
            let msq = mass.clone() * mass.clone();
            let kg_low = klein_gordon_residual(p.low(), &msq).norm();
            let kg_high = klein_gordon_residual(p.high(), &msq).norm();
            report.bounded(
                format!("eigen_{n}_kg_rank_{}", p.rank()),
                kg_low.max(kg_high),
                cfg.tol_eigen * scale,
            );
        }
    }

    // residual propagation: the exact identity and the norm bound
    if let Some((lambda, vector)) = nonzero.first() {
        let w = lift_inhom(&assembly::vec_to_inhom(spectral, vector));
        let mass = exactify(*lambda).unwrap();
        let pairs = duffin_decompose(&w, &mass)?;
        let prop = duffin_implies_kg_check(&pairs[1], &mass)?;
        report.exact("kg_propagation_identity_exact", prop.identity_defect);
        report.status("kg_propagation_bound_holds", prop.pass);
    }
    // perturbed pair: the bound still controls the Klein-Gordon residual
    let low: Form<f64> = Form::random(1, spectral, cfg.stream_seed(21_000), ValueSet::UniformReals);
    let high: Form<f64> =
        Form::random(2, spectral, cfg.stream_seed(21_001), ValueSet::UniformReals);
    let perturbed = DuffinPair::new(low, high)?;
    let prop = duffin_implies_kg_check(&perturbed, &1.25)?;
    report.status("kg_propagation_bound_perturbed_pair", prop.pass);

    // uniqueness surrogate: the stacked map (four Duffin systems plus the
    // sum-to-input constraint) has trivial kernel on the test lattice.
    // Labeled a surrogate because it certifies a zero defect dimension on
    // this lattice rather than proving uniqueness in general.
    if let Some((lambda, _)) = nonzero.first() {
        let (sigma_min, sigma_max) = uniqueness_extremes(spectral, *lambda)?;
        report.bounded(
            "duffin_uniqueness_surrogate_defect_dimension_zero",
            sigma_max * 1e-9,
            sigma_min.max(f64::MIN_POSITIVE),
        );
    }

    Ok(report)
}

/// Build the stacked operator [block-diag duffin systems; pair-sum map] and
/// return its extreme singular values (via the real embedding, since the
/// mass is complex).
fn uniqueness_extremes(domain: Domain, lambda: Complex64) -> anyhow::Result<(f64, f64)> {
    let sites = domain.interior_site_count();
    let pair_len = |r: usize| {
        (DirectionSet::by_degree(r).len() + DirectionSet::by_degree(r + 1).len()) * sites
    };
    let cols: usize = (0..4).map(pair_len).sum();
    let inhom_len = 16 * sites;
    let duffin_rows: usize = cols;
    let rows = duffin_rows + inhom_len;

    let mut entries: Vec<(u32, u32, Complex64)> = Vec::new();
    let mut col_offset = 0usize;
    let mut row_offset = 0usize;
    for r in 0..4u8 {
        let block = assembly::assemble::<Complex64>(&OperatorKind::Duffin(r, lambda), domain);
        for &(i, j, v) in block.entries() {
            entries.push((
                (i as usize + row_offset) as u32,
                (j as usize + col_offset) as u32,
                v,
            ));
        }
        // the sum map: pair coordinates add into the inhomogeneous vector
        let pair_space = BasisSpace::Pair(r);
        for j in 0..pair_space.len(&domain) {
            let (degree, dirs, site) = pair_space.label(&domain, j);
            let big = BasisSpace::Inhomogeneous
                .index(&domain, degree, dirs, site)
                .expect("degree in range");
            entries.push((
                (duffin_rows + big) as u32,
                (j + col_offset) as u32,
                Complex64::new(1.0, 0.0),
            ));
        }
        col_offset += pair_len(r as usize);
        row_offset += pair_len(r as usize);
    }
    let stack = OperatorMatrix::from_entries(rows, cols, entries, None, None, domain, "uniqueness");
    let dense = assembly::complex_real_embedding(&stack);
    let svd = dense.svd(false, false);
    Ok((svd.singular_values.min(), svd.singular_values.max()))
}

// ---------------------------------------------------------------------------
// gauge
// ---------------------------------------------------------------------------

fn gauge_suite(cfg: &RunConfig) -> anyhow::Result<SuiteReport> {
    let mut report = SuiteReport::new("gauge");
    let domain = cfg.domain()?;

    // exact shift law for arbitrary gauge forms, integer arithmetic
    let mut law_defect = 0.0f64;
    let mut bad: Option<InhomogeneousForm<i64>> = None;
    for i in 0..10u64 {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(22_000 + i), ValueSet::SmallIntegers);
        let phi: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(23_000 + i), ValueSet::SmallIntegers);
        let defect = massless_shift_law_defect(&w, &phi)?;
        if defect > law_defect {
            law_defect = defect;
            bad = Some(phi);
        }
    }
    if !report.exact("massless_shift_law_exact", law_defect) {
        if let Some(phi) = bad {
            report.attach_counterexample("massless_shift_law", inhom_json(&phi));
        }
    }

    // two-mass specializations, exact componentwise
    let mut spec_defect = 0.0f64;
    for i in 0..10u64 {
        let w: InhomogeneousForm<i64> =
            InhomogeneousForm::random(domain, cfg.stream_seed(24_000 + i), ValueSet::SmallIntegers);
        let m = (i as i64 % 3) + 1;
        spec_defect =
            spec_defect.max((&two_mass_residual(&w, &m, &m) - &dk_residual(&w, &m)).norm());
        spec_defect =
            spec_defect.max((&two_mass_residual(&w, &m, &0) - &em_system_residual(&w, &m)).norm());
        spec_defect = spec_defect
            .max((&two_mass_residual(&w, &0, &m) - &notoph_system_residual(&w, &m)).norm());
    }
    report.exact("two_mass_specializations_exact", spec_defect);

    // kernel-based invariance checks on the spectral lattice
    let spectral = cfg.spectral_domain()?;
    let kernel_tol = 1e-10;
    let harmonic = harmonic_basis(spectral, false, kernel_tol)?;
    // these tests must fail rather than pass vacuously
    if !report.status("laplacian_kernel_nonempty", !harmonic.is_empty()) {
        return Ok(report);
    }

    let w: InhomogeneousForm<f64> =
        InhomogeneousForm::random(spectral, cfg.stream_seed(25_000), ValueSet::UniformReals);
    for (n, phi) in harmonic.iter().take(3).enumerate() {
        let shifted = gauge_transform(&w, phi, GaugeKind::Full)?;
        let zero = 0.0f64;
        let change = (&dk_residual(&shifted, &zero) - &dk_residual(&w, &zero)).norm();
        report.bounded(
            format!("massless_dk_invariance_kernel_phi_{n}"),
            change,
            cfg.tol_eigen * phi.norm().max(1.0),
        );
    }

    // wave-equation invariance with degreewise-harmonic gauge forms
    let degreewise = harmonic_basis(spectral, true, kernel_tol)?;
    if !report.status("degreewise_kernel_nonempty", !degreewise.is_empty()) {
        return Ok(report);
    }
    let wave = massless::wave_invariance_check(&w, &degreewise[0], cfg.tol_eigen)?;
    for line in &wave.lines {
        report.bounded(format!("wave_{}", line.name), line.norm_after, line.bound);
    }

    // electromagnetic limit: harmonic scalar and volume gauge forms
    let phi0 = degreewise.iter().find(|p| p.part(0).norm() > 1e-6);
    let phi4 = degreewise.iter().find(|p| p.part(4).norm() > 1e-6);
    if report.status(
        "harmonic_0_and_4_forms_found",
        phi0.is_some() && phi4.is_some(),
    ) {
        let em = massless::em_limit_gauge_check(
            &w,
            &phi0.unwrap().part(0).clone(),
            &phi4.unwrap().part(4).clone(),
            1.3,
            cfg.tol_eigen,
        )?;
        for line in &em.lines {
            report.bounded(format!("em_{}", line.name), line.norm_after, line.bound);
        }
    }

    // notoph limit: harmonic 1- and 3-forms
    let phi1 = degreewise.iter().find(|p| p.part(1).norm() > 1e-6);
    let phi3 = degreewise.iter().find(|p| p.part(3).norm() > 1e-6);
    if report.status(
        "harmonic_1_and_3_forms_found",
        phi1.is_some() && phi3.is_some(),
    ) {
        let notoph = massless::notoph_gauge_check(
            &w,
            &phi1.unwrap().part(1).clone(),
            &phi3.unwrap().part(3).clone(),
            0.8,
            cfg.tol_eigen,
        )?;
        for line in &notoph.lines {
            report.bounded(format!("notoph_{}", line.name), line.norm_after, line.bound);
        }
    }

    // two-mass kernel solutions satisfy the Klein-Gordon relation: pick a
    // Dirac eigenvalue whose square is real, use (m1, m2) = (λ², 1)
    let dm = assembly::assemble::<f64>(&OperatorKind::DiracMinus, spectral);
    let eigs = assembly::eigenpairs(&dm, 12, cfg.tol_eigen * 1e-2)?;
    let lambda = eigs
        .iter()
        .map(|(l, _)| *l)
        .find(|l| l.norm() > 1e-6 && (l * l).im.abs() <= 1e-9 * (l * l).norm());
    if report.status("real_squared_eigenvalue_found", lambda.is_some()) {
        let m1 = (lambda.unwrap() * lambda.unwrap()).re;
        let m2 = 1.0f64;
        let tm = assembly::assemble::<f64>(&OperatorKind::TwoMass(m1, m2), spectral);
        let null = assembly::kernel(&tm, kernel_tol)?;
        if report.status("two_mass_kernel_nonempty", !null.is_empty()) {
            for (n, v) in null.iter().take(4).enumerate() {
                let omega = assembly::vec_to_inhom(spectral, v);
                let kg = klein_gordon_residual_inhomogeneous(&omega, &(m1 * m2)).norm();
                report.bounded(
                    format!("two_mass_kernel_kg_relation_{n}"),
                    kg,
                    cfg.tol_eigen * omega.norm().max(1.0),
                );
            }
        }
    }

    Ok(report)
}

// ---------------------------------------------------------------------------
// marching (used by the acceptance suite; exposed for reuse)
// ---------------------------------------------------------------------------

/// Seeded Cauchy data on the required slices.
pub fn random_initial_data(domain: Domain, seed: u64) -> InhomogeneousForm<f64> {
    let mut init = InhomogeneousForm::zero(domain);
    let mut counter = 0u64;
    for degree in 0..=4usize {
        for &dirs in DirectionSet::by_degree(degree) {
            let t = if dirs.is_timelike() { 0 } else { 1 };
            for site in domain.slice_sites(t) {
                // cheap deterministic stream decoupled from site order details
                counter += 1;
                let x = splitmix(seed.wrapping_add(counter));
                init.set_coeff(dirs, site, x);
            }
        }
    }
    init
}

fn splitmix(mut z: u64) -> f64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z as f64 / u64::MAX as f64) * 2.0 - 1.0
}

/// Run the marching solver and report the worst slab residual and the worst
/// double-interior Klein-Gordon residual, normalized by the field scale.
pub fn march_and_check(
    domain: Domain,
    seed: u64,
    mass: f64,
    steps: usize,
) -> anyhow::Result<(InhomogeneousForm<f64>, f64, f64)> {
    let init = random_initial_data(domain, seed);
    let field = cauchy_march(&init, &mass, steps, domain)?;
    let rows = window_residuals(&field, &mass, (1, steps as i64));
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);

    // Klein-Gordon on the double interior: one stencil radius inside the
    // satisfied window on every axis
    let kg = klein_gordon_residual_inhomogeneous(&field, &(mass * mass));
    let mut kg_max = 0.0f64;
    let n = domain.extents();
    for r in 0..5usize {
        for &dirs in DirectionSet::by_degree(r) {
            for site in domain.interior_sites() {
                let t_ok = site.get(0) >= 2 && site.get(0) <= steps as i64 - 1;
                let s_ok = (1..4).all(|a| {
                    domain.mode() == BoundaryMode::Periodic
                        || (site.get(a) >= 2 && site.get(a) <= n[a] as i64 - 1)
                });
                if t_ok && s_ok {
                    kg_max = kg_max.max(kg.coeff(dirs, site).abs());
                }
            }
        }
    }
    Ok((field, max_residual, kg_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [
            Suite::Calculus,
            Suite::Duality,
            Suite::Adjointness,
            Suite::Dirac,
            Suite::Duffin,
            Suite::Gauge,
            Suite::All,
        ] {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("bogus").is_err());
    }

    #[test]
    fn star_reference_table_is_complete() {
        let table = star_sign_reference();
        assert_eq!(table.len(), 16);
        for (dirs, sign) in &table {
            assert!(sign.abs() == 1);
            assert!(dirs.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
