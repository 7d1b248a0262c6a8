//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use co1as::co1::*;
use co1as::connection::{sectional_curvature, torsion_at};
use co1as::decomp::*;
use co1as::geometry::adapted_frame;
use co1as::registry::*;
use co1as::report::{reserialize, PointReport};
use co1as::Result;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn example(name: ExampleName, n: usize) -> Result<BuiltExample> {
    build_example(name, n, &ExampleParams::default())
}

fn horosphere_residuals() -> Result<Outcome> {
    let ex = example(ExampleName::Horospheres, 3)?;
    let pts = ex.sample_points(50, 1)?;
    let analytic = verify_co1(&ex.setup, &pts, 1e-6)?;
    let params = ExampleParams { analytic: false, ..Default::default() };
    let fd = build_example(ExampleName::Horospheres, 3, &params)?;
    let numeric = verify_co1(&fd.setup, &pts, 1e-4)?;
    outcome(
        analytic.pass && numeric.pass,
        format!(
            "50 points, worst analytic {:.2e} (< 1e-6), worst difference-only {:.2e} (< 1e-4)",
            analytic.worst.max(),
            numeric.worst.max()
        ),
    )
}

fn hyperplane_structure() -> Result<Outcome> {
    let ex = example(ExampleName::ParallelHyperplanes, 3)?;
    let mut worst = 0.0_f64;
    let mut empty = true;
    for p in ex.sample_points(50, 2)? {
        let s = structure_at(&ex.setup, &p)?;
        worst = worst.max(s.norm());
        empty &= classify(&s, CLASSIFY_TOL)?.present().is_empty();
    }
    outcome(worst < 1e-10 && empty, format!("max |S| = {worst:.2e} (< 1e-10), classification empty: {empty}"))
}

fn horosphere_classification() -> Result<Outcome> {
    let ex = example(ExampleName::Horospheres, 3)?;
    let (mut ids_ok, mut lambda_err, mut t_norm) = (true, 0.0_f64, 0.0_f64);
    for p in ex.sample_points(20, 3)? {
        let report = classify(&structure_at(&ex.setup, &p)?, CLASSIFY_TOL)?;
        ids_ok &= report.present_ids() == [SubmoduleId::II1, SubmoduleId::Z1];
        for id in [SubmoduleId::II1, SubmoduleId::Z1] {
            let lambda = report.component(id).and_then(|c| c.param.as_ref()).and_then(|p| p.scalar()).unwrap_or(f64::NAN);
            lambda_err = lambda_err.max((lambda + 1.0).abs());
        }
        t_norm = t_norm.max(report.block_norm(SubmoduleId::T));
    }
    outcome(
        ids_ok && lambda_err <= 1e-6 && t_norm < 1e-8,
        format!("ids exactly {{II1, Z1}}: {ids_ok}, max |λ + 1| = {lambda_err:.2e}, T-block norm {t_norm:.2e}"),
    )
}

fn linear_type() -> Result<Outcome> {
    let ex = example(ExampleName::LinearTypeHyperbolic, 3)?;
    let (mut ids_ok, mut normal_err, mut leaf_err) = (true, 0.0_f64, 0.0_f64);
    for p in ex.sample_points(20, 4)? {
        let report = classify(&structure_at(&ex.setup, &p)?, CLASSIFY_TOL)?;
        ids_ok &= report.present_ids() == [SubmoduleId::II1];
        let t = normal_torsion_at(&ex.setup, &p)?;
        for c in 0..4 {
            for b in 1..4 {
                let expected = if b == c { -1.0 } else { 0.0 };
                normal_err = normal_err.max((t[(c, b)] - expected).abs());
            }
        }
        let frame = adapted_frame(ex.setup.metric(), ex.setup.xi(), &p)?;
        let g = ex.setup.metric().at(&p)?;
        let theta = frame.coframe(&g);
        let full = torsion_at(ex.setup.connection(), &p)?.to_frame(
            &[co1as::Variance::Up, co1as::Variance::Down, co1as::Variance::Down],
            &frame.matrix(),
            &theta,
        );
        for i in 1..4 {
            for j in 1..4 {
                leaf_err = leaf_err.max(full[[0, i, j]].abs());
            }
        }
    }
    outcome(
        ids_ok && normal_err <= 1e-8 && leaf_err <= 1e-8,
        format!("ids exactly {{II1}}: {ids_ok}, |T̃(ξ,Y) + Y| = {normal_err:.2e}, |g(T̃(X,Y),ξ)| = {leaf_err:.2e}"),
    )
}

fn spheres() -> Result<Outcome> {
    let ex = example(ExampleName::ConcentricSpheres, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut radial_err = 0.0_f64;
    for _ in 0..50 {
        let r = rng.gen_range(0.51..4.0);
        let p = [r, rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9)];
        let s = structure_at(&ex.setup, &p)?;
        for i in 1..=2 {
            for k in 1..=2 {
                let expected = if i == k { 1.0 / r } else { 0.0 };
                // g(S_{e_i} ξ, e_k)
                radial_err = radial_err.max((s.get(i, 0, k) - expected).abs());
            }
        }
    }
    let killing = ex.killing.as_ref().expect("sphere Killing data");
    let basis = Slot::basis(killing.len());
    let mut canonical_err = 0.0_f64;
    let mut torsion = 0.0_f64;
    let mut combos = 0;
    for i in 0..10 {
        let t = -0.45 + 3.45 * i as f64 / 9.0;
        for x in &basis {
            for y in &basis {
                for z in &basis {
                    let a = canonical_structure_at(&ex.setup, killing, t, *x, *y, *z)?;
                    let b = direct_structure_value(&ex.setup, killing, t, *x, *y, *z)?;
                    canonical_err = canonical_err.max((a - b).abs());
                    combos += 1;
                }
            }
        }
        torsion = torsion.max(normal_torsion_at(&ex.setup, &killing.geodesic(t))?.amax());
    }
    outcome(
        radial_err <= 1e-6 && canonical_err <= 1e-5 && torsion <= 1e-6 && combos == 270,
        format!(
            "|S_Bξ − B/r| = {radial_err:.2e}, canonical vs direct {canonical_err:.2e} over {} slot triples x 10 times, |T̃(ξ,·)| = {torsion:.2e}",
            combos / 10
        ),
    )
}

fn shape_operator() -> Result<Outcome> {
    let ex = example(ExampleName::ConcentricSpheres, 2)?;
    let killing = ex.killing.as_ref().expect("sphere Killing data");
    let r0 = killing.base_point()[0];
    let ts: Vec<f64> = (0..10).map(|i| -0.45 + 3.45 * i as f64 / 9.0).collect();
    let mut worst = 0.0_f64;
    for s in shape_operator_along_geodesic(&ex.setup, killing, &ts)? {
        for e in &s.eigenvalues {
            worst = worst.max((e - 1.0 / (r0 + s.t)).abs());
        }
    }
    outcome(worst <= 1e-5, format!("max |eigenvalue − 1/(r0+t)| = {worst:.2e} at 10 samples"))
}

fn decomposition() -> Result<Outcome> {
    let ids: Vec<SubmoduleId> = SubmoduleId::FINE.into_iter().chain(SubmoduleId::COARSE).collect();
    let (mut idem, mut orth, mut comp, mut equiv) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for n in 2..=6 {
        let rotations: Vec<_> = (0..10).map(|k| common::random_rotation(n, 1000 + k)).collect();
        for seed in 0..100 {
            let s = random_structure(n, seed)?;
            let fine: Vec<_> = SubmoduleId::FINE.iter().map(|&id| project(&s, id)).collect::<Result<_>>()?;
            for i in 0..fine.len() {
                for j in i + 1..fine.len() {
                    orth = orth.max(fine[i].dot(&fine[j]).abs());
                }
            }
            let sum = fine.iter().fold(AlgebraicStructure::zeros(n)?, |acc, p| acc.add(p));
            comp = comp.max(sum.sub(&s).max_abs());
            for &id in &ids {
                let p = project(&s, id)?;
                idem = idem.max(project(&p, id)?.sub(&p).max_abs());
                for q in &rotations {
                    let lhs = project(&s.rotate(q)?, id)?;
                    equiv = equiv.max(lhs.sub(&p.rotate(q)?).max_abs());
                }
            }
        }
    }
    outcome(
        idem <= 1e-12 && orth <= 1e-10 && comp <= 1e-12 && equiv <= 1e-10,
        format!("idempotence {idem:.1e}, orthogonality {orth:.1e}, completeness {comp:.1e}, equivariance {equiv:.1e}"),
    )
}

fn dimensions() -> Result<Outcome> {
    let mut mismatches = Vec::new();
    for n in 2..=6 {
        let table = submodule_dims(n)?;
        if common::membership_basis(n).ncols() != table.total {
            mismatches.push(format!("total@{n}"));
        }
        for id in SubmoduleId::FINE.into_iter().chain(SubmoduleId::COARSE) {
            if common::basis(n, id).ncols() != table.get(id) {
                mismatches.push(format!("{id}@{n}"));
            }
        }
    }
    let total3 = submodule_dims(3)?.total;
    outcome(
        mismatches.is_empty() && total3 == 30,
        format!("n = 2..6 against rank enumeration, mismatches {mismatches:?}, total at n = 3: {total3}"),
    )
}

fn hyperbolic_curvature() -> Result<Outcome> {
    let ex = example(ExampleName::Horospheres, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts = ex.sample_points(50, 10)?;
    let mut worst = 0.0_f64;
    for p in &pts {
        let u = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let v = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        worst = worst.max((sectional_curvature(ex.setup.metric(), p, &u, &v)? + 1.0).abs());
    }
    outcome(worst <= 1e-6, format!("max |K + 1| = {worst:.2e} over 50 random 2-planes"))
}

fn determinism() -> Result<Outcome> {
    let args = ["co1as", "verify", "horospheres", "--n", "3", "--points", "20", "--seed", "7", "--format", "json"];
    let once = || {
        let mut out = Vec::new();
        let code = co1as::cli::run(args, &mut out, &mut Vec::new());
        (code, String::from_utf8(out).expect("utf-8 report"))
    };
    let (c1, a) = once();
    let (c2, b) = once();
    let round_trip = reserialize::<PointReport>(&a)? == a;
    outcome(
        c1 == 0 && c2 == 0 && a == b && round_trip,
        format!("{} bytes, identical: {}, parse/re-serialize identical: {round_trip}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("horosphere residuals", horosphere_residuals),
        ("hyperplane structure vanishes", hyperplane_structure),
        ("horosphere classification", horosphere_classification),
        ("linear-type structure", linear_type),
        ("sphere structure and canonical path", spheres),
        ("sphere shape operator", shape_operator),
        ("decomposition invariants", decomposition),
        ("dimension table", dimensions),
        ("hyperbolic sectional curvature", hyperbolic_curvature),
        ("deterministic JSON", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "AC{:<2} {:<38} {}  {detail} [{:.2}s]",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed in {:.2}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
