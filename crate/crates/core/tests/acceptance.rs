//! Acceptance suite: one PASS/FAIL line per criterion. All comparisons are
//! exact except the floating eigenvalue oracle in criterion 6, which must
//! match the exact sign pattern (eigenvalues within 1e-8 of zero count as
//! zero).

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use kleinsig::cli;
use kleinsig::cover::py_linking;
use kleinsig::diagram::{
    component_selflinking, diagram_vertex_connected_sum, load_diagram, sublink_diagram,
    validate_diagram, weak_euler_numbers, GraphDiagram, LinkDiagram,
};
use kleinsig::exactlinalg::{congruence_signature, inertia, int, rat, Rational, SymMatrix};
use kleinsig::kleingraph::{is_three_hamiltonian, load_graph, vertex_connected_sum, Color, ColorPair, KleinGraph};
use kleinsig::movie::{accumulate_foam_data, compose_movies, load_movie, Frame, Move};
use kleinsig::pipeline::{run_paths, InputPaths, PipelineOutput};
use kleinsig::signature::{link_signature, sublink_signatures};
use kleinsig::solver::{
    build_relation_system, check_consistency, connected_sum_report, solve_invariants, Inputs, InvariantReport,
    Quantity, Relation, Status,
};

type Check = Result<(), String>;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn fixture_set(name: &str) -> InputPaths {
    InputPaths {
        diagram: Some(fixture(&format!("diagrams/{name}.kd"))),
        movie: Some(fixture(&format!("movies/{name}.km"))),
        lift: Some(fixture(&format!("lifts/{name}.kl"))),
        relations: Some(fixture(&format!("relations/{name}.kr"))),
    }
}

fn diagram(name: &str) -> GraphDiagram {
    load_diagram(&std::fs::read_to_string(fixture(&format!("diagrams/{name}.kd"))).unwrap()).unwrap()
}

fn q(s: &str) -> Quantity {
    s.parse().unwrap()
}

fn expect(cond: bool, what: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn expect_value(r: &InvariantReport, name: &str, want: Rational) -> Check {
    match r.get(q(name)) {
        Some(v) if *v == want => Ok(()),
        other => Err(format!("{name} = {other:?}, expected {want}")),
    }
}

fn pipeline(name: &str) -> Result<PipelineOutput, String> {
    run_paths(&fixture_set(name), &[], true).map_err(|e| e.to_string())
}

fn cli_exit(name: &str) -> u8 {
    let s = |p: PathBuf| p.display().to_string();
    let paths = fixture_set(name);
    cli::run([
        "kleinsig".to_string(),
        "invariants".into(),
        "--diagram".into(),
        s(paths.diagram.unwrap()),
        "--movie".into(),
        s(paths.movie.unwrap()),
        "--lift".into(),
        s(paths.lift.unwrap()),
        "--relations".into(),
        s(paths.relations.unwrap()),
    ])
    .code
}

fn kinoshita_end_to_end() -> Check {
    let out = pipeline("kinoshita")?;
    let r = &out.report;
    expect(r.is_solved(), format!("status {:?}", r.status))?;
    expect_value(r, "sigma", int(0))?;
    expect_value(r, "sigma_tilde", int(24))?;
    for p in ["delta_ab", "delta_bc", "delta_ca"] {
        expect_value(r, p, int(8))?;
    }
    expect(out.verdict.pass, "consistency check failed")?;
    let code = cli_exit("kinoshita");
    expect(code == 0, format!("cli exit {code}"))
}

fn kinoshita_intermediates() -> Check {
    let out = pipeline("kinoshita")?;
    let weak = out.weak.as_ref().ok_or("no weak Euler data")?;
    expect(*weak.get(ColorPair::AB) == int(-4), format!("e_ab = {}", weak.get(ColorPair::AB)))?;
    expect(*weak.get(ColorPair::BC) == int(0), "e_bc != 0")?;
    expect(*weak.get(ColorPair::CA) == int(0), "e_ca != 0")?;
    let foam = out.foam.as_ref().ok_or("no foam data")?;
    expect(foam.closed_for(Color::C) == [int(2)], format!("clasp sphere {:?}", foam.closed_for(Color::C)))?;
    let c = out.strong.iter().find(|s| s.color == Color::C).ok_or("no strong Euler for c")?;
    expect(c.boundary_lk == int(-18), format!("l_c = {}", c.boundary_lk))?;
    expect(c.value == int(20), format!("e~_c = {}", c.value))?;
    let r = &out.report;
    expect_value(r, "e_tilde_a", int(12))?;
    expect_value(r, "e_tilde_b", int(12))?;
    for x in ["xi_a", "xi_b", "xi_c"] {
        expect_value(r, x, int(8))?;
    }
    Ok(())
}

fn trefoil_theta() -> Check {
    let out = pipeline("trefoil_theta")?;
    let r = &out.report;
    expect(r.is_solved(), format!("status {:?}", r.status))?;
    expect_value(r, "delta_ab", rat(4, 3))?;
    expect_value(r, "delta_ca", rat(4, 3))?;
    expect_value(r, "delta_bc", int(4))?;
    expect_value(r, "sigma", int(-2))?;
    expect_value(r, "sigma_tilde", rat(14, 3))?;
    expect_value(r, "xi_a", rat(2, 3))?;
    let v = check_consistency(r);
    for rel in [Relation::DeltaDifference, Relation::DeltaSum] {
        let res = v.residuals.iter().find(|(x, _)| *x == rel).ok_or("missing residual")?;
        expect(res.1 == int(0), format!("residual {} in {rel}", res.1))?;
    }
    let delta = r.get(q("delta")).cloned().unwrap_or_default();
    expect(rat(14, 3) - int(-2) - delta == int(0), "14/3 - (-2) - delta != 0")?;
    expect(v.pass, "consistency check failed")
}

fn signature_of(name: &str) -> i64 {
    link_signature(&LinkDiagram::from_diagram(diagram(name)).unwrap())
}

fn signature_calibration() -> Check {
    let unknot = signature_of("unknot");
    expect(unknot == 0, format!("unknot {unknot}"))?;
    let k = signature_of("mirror_10_124");
    expect(k == 8, format!("mirror 10_124 {k}"))?;
    let t = signature_of("trefoil");
    let tm = link_signature(&LinkDiagram::from_diagram(diagram("trefoil").mirror()).unwrap());
    expect(t.abs() == 2 && tm == -t, format!("trefoil {t}, mirror {tm}"))?;
    let seifert_t = common::seifert_signature(2, &[1, 1, 1]);
    let seifert_8 = common::seifert_signature(3, &[1, -2, 1, -2]);
    expect(t == seifert_t, format!("trefoil: goeritz {t}, seifert {seifert_t}"))?;
    let f8 = signature_of("figure_eight");
    expect(f8 == seifert_8, format!("figure-eight: goeritz {f8}, seifert {seifert_8}"))
}

fn random_rational(rng: &mut StdRng, nonzero: bool) -> Rational {
    loop {
        let p = rng.gen_range(-30..=30);
        if !nonzero || p != 0 {
            return rat(p, rng.gen_range(1..=7));
        }
    }
}

fn py_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut done = 0;
    while done < 1000 {
        let n = rng.gen_range(1..=4);
        let mut rows = vec![vec![int(0); n]; n];
        for i in 0..n {
            rows[i][i] = random_rational(&mut rng, true);
            for j in i + 1..n {
                let x = int(rng.gen_range(-3..=3));
                rows[i][j] = x.clone();
                rows[j][i] = x;
            }
        }
        let g = SymMatrix::new(rows).unwrap();
        if g.determinant() == int(0) {
            continue;
        }
        let v: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let w: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let lk0 = random_rational(&mut rng, false);
        let py = |a: &[Rational], b: &[Rational]| py_linking(a, b, &lk0, &g).unwrap();
        expect(py(&v, &w) == py(&w, &v), "symmetry")?;
        let zero = vec![int(0); n];
        expect(py(&zero, &w) == lk0 && py(&zero, &zero) == lk0, "zero vector")?;
        let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
        expect(py(&neg, &neg) == py(&v, &v), "sign squaring")?;
        let c = random_rational(&mut rng, true);
        let one = py_linking(&[int(1)], &[int(1)], &int(0), &SymMatrix::diagonal(&[c.clone()])).unwrap();
        expect(one == -c.recip(), format!("1x1 closed form for {c}"))?;
        done += 1;
    }
    Ok(())
}

fn congruence_corpus() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for case in 0..500 {
        let n = rng.gen_range(1..=8);
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = rng.gen_range(-4..=4);
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        let a = SymMatrix::from_integers(&m).unwrap();
        let mut p: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect();
        for _ in 0..rng.gen_range(0..12) {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                p.swap(i, (i + 1) % n);
            } else {
                let c = int(rng.gen_range(-2..=2));
                let row = p[j].clone();
                for (x, y) in p[i].iter_mut().zip(row) {
                    *x += y * c.clone();
                }
            }
        }
        let b = a.congruent(&p).unwrap();
        expect(congruence_signature(&a) == congruence_signature(&b), format!("case {case}: congruence changed signature"))?;
        let e = SymmetricEigen::new(DMatrix::from_fn(n, n, |i, j| m[i][j] as f64));
        let pos = e.eigenvalues.iter().filter(|&&x| x > 1e-8).count();
        let neg = e.eigenvalues.iter().filter(|&&x| x < -1e-8).count();
        let i = inertia(&a);
        expect((i.positive, i.negative) == (pos, neg), format!("case {case}: float oracle disagrees"))?;
    }
    Ok(())
}

fn graph_layer() -> Check {
    let names = ["theta", "tetrahedron", "pentagon", "utility"];
    let mut graphs: Vec<KleinGraph> = Vec::new();
    for n in names {
        let text = std::fs::read_to_string(fixture(&format!("graphs/{n}.kg"))).unwrap();
        let g = load_graph(&text).map_err(|e| format!("{n}: {e}"))?;
        expect(is_three_hamiltonian(&g), format!("{n} is not 3-Hamiltonian"))?;
        graphs.push(g);
    }
    for (i, g1) in graphs.iter().enumerate() {
        for (j, g2) in graphs.iter().enumerate() {
            for v1 in g1.vertices().iter().take(2) {
                let s = vertex_connected_sum(g1, v1, g2, &g2.vertices()[0]).map_err(|e| e.to_string())?;
                expect(is_three_hamiltonian(&s), format!("{} # {} at {v1}", names[i], names[j]))?;
            }
        }
    }

    // Theta # Kinoshita, measured on the summed diagram.
    let theta = diagram("theta");
    let kin = diagram("kinoshita");
    let sum = diagram_vertex_connected_sum(&theta, "u", &kin, "u").map_err(|e| e.to_string())?;
    expect(validate_diagram(&sum).is_valid(), "summed diagram is invalid")?;
    expect(sublink_signatures(&sum) == sublink_signatures(&kin), "sub-link signatures changed")?;
    expect(weak_euler_numbers(&sum) == weak_euler_numbers(&kin), "boxes' weak Euler numbers changed")?;

    let kin_out = pipeline("kinoshita")?;
    let mut theta_inputs = Inputs::default();
    for x in Quantity::ALL.iter().filter(|x| x.is_measurable()) {
        theta_inputs.knowns.push((*x, int(0)));
    }
    let theta_report = solve_invariants(&build_relation_system(&theta_inputs).unwrap());
    let mut summed = connected_sum_report(&theta_report, &kin_out.report);
    let sig = sublink_signatures(&sum);
    let weak = weak_euler_numbers(&sum);
    for p in ColorPair::ALL {
        summed.set(Quantity::Sigma(p), int(sig.get(p)));
        summed.set(Quantity::Euler(p), weak.get(p).clone());
    }
    let report = solve_invariants(&build_relation_system(&summed).unwrap());
    expect(report.status == Status::Solved, "sum report not solved")?;
    expect(report.values == kin_out.report.values, "theta # Kinoshita differs from Kinoshita")
}

fn selflinking(d: &GraphDiagram) -> Vec<Vec<Rational>> {
    ColorPair::ALL
        .iter()
        .map(|&p| {
            let mut v = component_selflinking(&sublink_diagram(d, p));
            v.sort();
            v
        })
        .collect()
}

fn movie_layer() -> Check {
    let m = load_movie(&fixture("movies/kinoshita.km")).map_err(|e| e.to_string())?;
    let s = accumulate_foam_data(&m).map_err(|e| e.to_string())?;

    let mut f = Frame::new(m.initial.clone());
    let mut compensated = 0;
    for (step, mv) in m.moves.iter().enumerate() {
        let before = selflinking(&f.diagram);
        kleinsig::movie::apply(&mut f, mv).map_err(|e| format!("step {}: {e}", step + 1))?;
        if matches!(mv, Move::R1Add { .. } | Move::R1Remove { .. } | Move::Rv1Add { .. } | Move::Rv1Remove { .. }) {
            compensated += 1;
            expect(selflinking(&f.diagram) == before, format!("step {}: selflinking changed", step + 1))?;
        }
    }
    expect(compensated >= 2, "movie has no R1/Rv1 moves")?;

    let mirror = accumulate_foam_data(&m.mirrored()).map_err(|e| e.to_string())?;
    expect(mirror.weak == s.weak.neg(), "mirror does not negate weak Euler data")?;
    for c in Color::ALL {
        let neg: Vec<Rational> = s.closed_for(c).iter().map(|x| -x.clone()).collect();
        expect(mirror.closed_for(c) == neg.as_slice(), format!("mirror does not negate closed data of {c}"))?;
    }

    let reflected = m.reversed().map_err(|e| e.to_string())?;
    let double = compose_movies(&m, &reflected).map_err(|e| e.to_string())?;
    let d = accumulate_foam_data(&double).map_err(|e| e.to_string())?;
    for p in ColorPair::ALL {
        expect(*d.weak.get(p) == int(0), format!("composite e_{p} = {}", d.weak.get(p)))?;
    }
    for c in Color::ALL {
        let total: Rational = d.closed_for(c).iter().cloned().sum();
        expect(total == int(0), format!("composite closed data of {c} sums to {total}"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("Kinoshita end-to-end: sigma 0, sigma~ 24, delta_ij 8, exit 0", kinoshita_end_to_end),
        ("Kinoshita intermediates: e(F_ij), clasp sphere, l_c, e~_c, solved e~ and xi", kinoshita_intermediates),
        ("Trefoil theta: delta_ij, sigma, sigma~, zero residual, xi 2/3", trefoil_theta),
        ("Signature calibration: unknot, mirror 10_124, trefoil, Seifert oracle", signature_calibration),
        ("PY formula properties over 1000 random instances", py_properties),
        ("Congruence signature: 500 unimodular congruences, float oracle", congruence_corpus),
        ("Graph layer: fixtures, connected sums, theta # Kinoshita additivity", graph_layer),
        ("Movie layer: validation, R1/Rv1 compensation, mirror, composite", movie_layer),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match result {
            Ok(()) => println!("criterion {}: PASS  {name} ({ms} ms)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({ms} ms): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
