//! Acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are reported but do not fail the run; the run fails
//! if any of them starts passing, or if any other criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use bayeshg::oracle::all_triples;
use bayeshg::random::{random_chain_graph, random_factors, random_joint};
use bayeshg::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CI_TOLERANCE: f64 = 1e-7;
const JOINT_TOLERANCE: f64 = 1e-9;
const NOISY_OR_TOLERANCE: f64 = 1e-12;

/// The literal clique/edge reading: moral cliques made only of parents have no hyperedge.
const EXPECTED_FAILURES: &[&str] = &["4"];

const FIXTURES: &str = "tests/fixtures";

type Check = Result<String, String>;

fn fixture(name: &str) -> String {
    fs::read_to_string(Path::new(FIXTURES).join(name)).unwrap()
}

fn dah(name: &str) -> Dah {
    parse_dah(&fixture(name)).unwrap()
}

fn cg(name: &str) -> ChainGraph {
    parse_chain_graph(&fixture(name)).unwrap()
}

fn s(labels: &[&str]) -> VertexSet {
    vertex_set(labels)
}

fn e(t: &[&str], h: &[&str]) -> Hyperedge {
    Hyperedge::from_labels(t, h).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn figure_chain_graphs() -> Vec<(&'static str, ChainGraph)> {
    let g7 = cg("fig7a.cg");
    let c = s(&["c"]);
    vec![
        ("fig1 shadow", cg("fig1_shadow.cg")),
        ("fig2", cg("fig2.cg")),
        ("fig6", cg("fig6.cg")),
        ("fig7a", g7.clone()),
        ("fig7a redirected", cg_redirect(&g7, &c).unwrap()),
        ("fig7a deleted", cg_delete(&g7, &c).unwrap()),
    ]
}

fn figure_dahs() -> Vec<(String, Dah)> {
    let mut out: Vec<(String, Dah)> = ["fig1.dah", "fig4_2.dah", "fig8b.dah", "fig8c.dah", "noisy_or.dah"]
        .iter()
        .map(|f| (f.to_string(), dah(f)))
        .collect();
    for (name, g) in figure_chain_graphs() {
        out.push((format!("{name} hypermoralized"), hypermoralize(&g)));
    }
    for i in 1..=12 {
        let f = format!("table1_{i:02}.dah");
        out.push((f.clone(), dah(&f)));
    }
    out
}

fn criterion_1() -> Check {
    let h = hypermoralize(&cg("fig2.cg"));
    let expected: BTreeSet<Hyperedge> = [
        e(&["a"], &["d", "e"]),
        e(&["a", "b"], &["e"]),
        e(&["b"], &["e", "f"]),
        e(&["b", "c"], &["f"]),
    ]
    .into();
    let got: BTreeSet<Hyperedge> = h.edges().iter().cloned().collect();
    ensure(got == expected && h.edges().len() == 4, || format!("got {}", print_dah(&h)))?;
    Ok("four hyperedges, exact".into())
}

fn criterion_2() -> Check {
    let h = dah("fig1.dah");
    let sh = shadow(&h).map_err(|e| e.to_string())?;
    ensure(sh == cg("fig1_shadow.cg"), || format!("shadow was {}", print_chain_graph(&sh)))?;
    let dag = h.canonical_dag();
    let comps = vec![s(&["a"]), s(&["b"]), s(&["c", "d"]), s(&["e", "f"])];
    let arcs = vec![
        (s(&["a"]), s(&["c", "d"])),
        (s(&["b"]), s(&["c", "d"])),
        (s(&["c", "d"]), s(&["e", "f"])),
    ];
    ensure(dag.components == comps, || format!("components {:?}", dag.components))?;
    let mut got = dag.arc_sets();
    got.sort();
    ensure(got == arcs, || format!("arcs {got:?}"))?;
    Ok("shadow and canonical DAG exact".into())
}

fn criterion_3() -> Check {
    let mut checked = 0;
    for (name, g) in figure_chain_graphs() {
        let back = shadow(&hypermoralize(&g)).map_err(|e| e.to_string())?;
        ensure(back == g, || format!("{name} did not round-trip"))?;
        checked += 1;
    }
    let mut r = rng(3);
    for i in 0..500 {
        let n = 1 + i % 7;
        let g = random_chain_graph(&mut r, n, 0.35, 0.5);
        let back = shadow(&hypermoralize(&g)).map_err(|e| e.to_string())?;
        ensure(back == g, || format!("random graph {i} did not round-trip:\n{}", print_chain_graph(&g)))?;
        checked += 1;
    }
    Ok(format!("{checked} graphs"))
}

fn moral_cliques(g: &ChainGraph, tau: &VertexSet) -> Vec<VertexSet> {
    let pa = g.parents_of_set(tau).unwrap();
    let closure: VertexSet = tau.union(&pa).cloned().collect();
    let mut cliques = g.induced(&closure).unwrap().moral_graph().maximal_cliques();
    cliques.sort();
    cliques
}

fn edge_cliques(h: &Dah, tau: &VertexSet) -> Vec<VertexSet> {
    let mut edges = maximal_edges(h_star(h, tau).unwrap().edges());
    edges.sort();
    edges
}

/// `literal`: every moral clique; otherwise only the cliques that meet the component.
fn clique_edge_correspondence(literal: bool) -> Check {
    let mut graphs = figure_chain_graphs();
    let mut r = rng(4);
    for i in 0..200 {
        graphs.push(("random", random_chain_graph(&mut r, 1 + i % 6, 0.4, 0.5)));
    }
    let mut mismatches = Vec::new();
    let mut components = 0;
    for (name, g) in &graphs {
        let h = hypermoralize(g);
        for tau in &g.chain_components().components {
            // initial components have no hyperedge and take the component itself as scope
            if g.parents_of_set(tau).unwrap().is_empty() {
                continue;
            }
            components += 1;
            let mut cliques = moral_cliques(g, tau);
            if !literal {
                cliques.retain(|k| !k.is_disjoint(tau));
            }
            let edges = edge_cliques(&h, tau);
            if cliques != edges {
                mismatches.push(format!(
                    "{name} {}: cliques {:?} edges {:?}",
                    vertex::format_set(tau),
                    cliques.iter().map(vertex::format_set).collect::<Vec<_>>(),
                    edges.iter().map(vertex::format_set).collect::<Vec<_>>()
                ));
            }
        }
    }
    let g6 = cg("fig6.cg");
    let tau = s(&["d", "e", "f"]);
    let fig6 = vec![s(&["a", "b", "c", "e"]), s(&["a", "d", "e"]), s(&["c", "e", "f"])];
    let mut cliques = moral_cliques(&g6, &tau);
    if !literal {
        cliques.retain(|k| !k.is_disjoint(&tau));
    }
    ensure(cliques == fig6 && edge_cliques(&hypermoralize(&g6), &tau) == fig6, || {
        "fig6 component {d,e,f} is not {ade, abce, cef}".into()
    })?;
    ensure(mismatches.is_empty(), || {
        format!("{} of {components} components differ, first: {}", mismatches.len(), mismatches[0])
    })?;
    Ok(format!("{components} components, fig6 = {{ade, abce, cef}}"))
}

fn criterion_4() -> Check {
    clique_edge_correspondence(true)
}

fn criterion_4_meeting_component() -> Check {
    clique_edge_correspondence(false)
}

fn criterion_5() -> Check {
    let mut r = rng(5);
    let mut queries = 0;
    for i in 0..100 {
        let g = random_chain_graph(&mut r, 1 + i % 6, 0.4, 0.5);
        let h = hypermoralize(&g);
        let vs: Vec<VertexId> = g.vertices().iter().cloned().collect();
        for st in all_triples(&vs) {
            let x = cg_global_separates(&g, &st.a, &st.b, &st.c).map_err(|e| e.to_string())?;
            let y = hg_separates(&h, &st.a, &st.b, &st.c).map_err(|e| e.to_string())?;
            ensure(x == y, || format!("graph {i}: {st} chain graph {x}, hypergraph {y}"))?;
            queries += 1;
        }
    }
    Ok(format!("{queries} queries agree"))
}

fn criterion_6() -> Check {
    let mut r = rng(6);
    let mut checked = 0;
    for (name, h) in figure_dahs() {
        let d = Domains::binary(h.vertices());
        for _ in 0..3 {
            let fa: FactorAssignment = random_factors(&mut r, &factor_scopes(&h), &d).map_err(|e| e.to_string())?;
            let j = assemble_joint(&h, &d, &fa).map_err(|e| e.to_string())?;
            let report = verify_global_markov(&h, &j, CI_TOLERANCE).map_err(|e| e.to_string())?;
            ensure(report.is_clean(), || format!("{name}: {report}"))?;
            checked += report.global_checked;
        }
    }
    Ok(format!("{checked} certified statements hold, 0 counterexamples"))
}

fn criterion_7() -> Check {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let g = random_chain_graph(&mut r, 1 + i % 6, 0.4, 0.5);
        let h = hypermoralize(&g);
        let d = Domains::binary(g.vertices());
        let scopes = cg_factor_scopes(&g);
        let fa: FactorAssignment = random_factors(&mut r, &scopes, &d).map_err(|e| e.to_string())?;
        let matched = transfer_factors(&d, &scopes, &fa, &InterventionSpec::new(), &factor_scopes(&h))
            .map_err(|e| e.to_string())?;
        let a = cg_assemble_joint(&g, &d, &fa).map_err(|e| e.to_string())?;
        let b = assemble_joint(&h, &d, &matched).map_err(|e| e.to_string())?;
        let diff = a.max_abs_diff(&b).ok_or("scopes differ")?;
        worst = worst.max(diff);
        ensure(diff <= JOINT_TOLERANCE, || format!("instance {i}: difference {diff:e}"))?;
    }
    Ok(format!("100 instances, max difference {worst:.1e}"))
}

fn criterion_8() -> Check {
    let g = cg("fig7a.cg");
    let h8 = dah("fig8b.dah");
    ensure(hypermoralize(&g) == h8, || "fig8b is not the hypermoralization of fig7a".into())?;
    let c = s(&["c"]);
    let ghat = cg_redirect(&g, &c).map_err(|e| e.to_string())?;
    let hhat = dah_redirect(&h8, &c).map_err(|e| e.to_string())?;
    let g0 = cg_delete(&g, &c).map_err(|e| e.to_string())?;
    let h0 = dah_normalize(&h8, &c).map_err(|e| e.to_string())?;
    let d = Domains::binary(g.vertices());
    let scopes = cg_factor_scopes(&g);
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for trial in 0..5 {
        let fa: FactorAssignment = random_factors(&mut r, &scopes, &d).map_err(|e| e.to_string())?;
        for c0 in ["0", "1"] {
            let spec = InterventionSpec::new().with("c", c0);
            let err = |e: Error| e.to_string();
            let direct = cg_intervened_joint(&g, &d, &fa, &spec).map_err(err)?;
            let moved = |target: &ScopeMap| transfer_factors(&d, &scopes, &fa, &spec, target);
            let via_cg = cg_assemble_joint(&ghat, &d, &moved(&cg_factor_scopes(&ghat)).map_err(err)?).map_err(err)?;
            let via_dah = assemble_joint(&hhat, &d, &moved(&factor_scopes(&hhat)).map_err(err)?).map_err(err)?;
            let point = bayeshg::intervention::point_mass(&d, &spec).map_err(err)?;
            let via_g0 = cg_assemble_joint(&g0, &d, &moved(&cg_factor_scopes(&g0)).map_err(err)?)
                .and_then(|j| j.independent_product(&point))
                .map_err(err)?;
            let via_h0 = assemble_joint(&h0, &d, &moved(&factor_scopes(&h0)).map_err(err)?).map_err(err)?;
            let on_h8 = intervened_joint(&h8, &d, &fa, &spec).map_err(err)?;
            for (route, j) in [
                ("hypergraph, direct", &on_h8),
                ("chain graph redirection", &via_cg),
                ("hypergraph redirection", &via_dah),
                ("deleted chain graph", &via_g0),
                ("normal form", &via_h0),
            ] {
                let diff = direct.max_abs_diff(j).ok_or("scopes differ")?;
                worst = worst.max(diff);
                ensure(diff <= JOINT_TOLERANCE, || format!("trial {trial}, c={c0}, {route}: {diff:e}"))?;
            }
            let pos = direct.scope().iter().position(|v| v.as_str() == "c").unwrap();
            let forced = d.state_index(&"c".into(), c0).unwrap();
            for i in 0..direct.len() {
                if direct.configuration(i)[pos] != forced {
                    ensure(direct.table()[i] == 0.0, || format!("mass {} off the forced value", direct.table()[i]))?;
                }
            }
        }
    }
    Ok(format!("5 routes x 10 systems agree, max difference {worst:.1e}, exact zeros off c0"))
}

fn criterion_9() -> Check {
    let c = s(&["c"]);
    let fig8 = factorization_equivalent_dah(&dah("fig8b.dah"), &c, &dah("fig8c.dah"), &c).map_err(|e| e.to_string())?;
    ensure(fig8, || "fig8(b) and fig8(c) should be equivalent".into())?;
    let none = VertexSet::new();
    let table =
        factorization_equivalent_dah(&dah("table1_01.dah"), &none, &dah("table1_03.dah"), &none).map_err(|e| e.to_string())?;
    ensure(!table, || "table 1 entries 1 and 3 should differ".into())?;
    Ok("fig8(b) = fig8(c) under c; entry 1 != entry 3".into())
}

fn criterion_10() -> Check {
    let expected: [&[&[&str]]; 12] = [
        &[&["a"], &["b"], &["a", "b", "c"]],
        &[&["a", "b"], &["a", "b", "c"]],
        &[&["a"], &["b"], &["a", "c"], &["b", "c"]],
        &[&["a", "b"], &["a", "c"], &["b", "c"]],
        &[&["a"], &["b"], &["a", "c"]],
        &[&["a", "b"], &["a", "c"]],
        &[&["a"], &["b"], &["c"]],
        &[&["a", "b"], &["c"]],
        &[&["a", "c"], &["b", "c"]],
        &[&["c"], &["a", "c"], &["a", "b"]],
        &[&["c"], &["a", "c"], &["b", "c"]],
        &[&["c"], &["a", "b"], &["a", "c"], &["b", "c"]],
    ];
    for (i, want) in expected.iter().enumerate() {
        let h = dah(&format!("table1_{:02}.dah", i + 1));
        let got: BTreeSet<VertexSet> = factor_scopes(&h).into_values().flatten().collect();
        let want: BTreeSet<VertexSet> = want.iter().map(|l| s(l)).collect();
        ensure(got == want, || format!("entry {}: got {got:?}", i + 1))?;
    }
    Ok("12 entries".into())
}

fn criterion_11() -> Check {
    let mut r = rng(11);
    let mut statements = 0;
    for i in 0..50 {
        let n = 1 + i % 5;
        let vs: VertexSet = bayeshg::random::labels(n).into_iter().collect();
        let d = Domains::binary(&vs);
        // half unstructured, half factorized over a random hypergraph
        let j: JointTable = if i % 2 == 0 {
            random_joint(&mut r, &vs, &d).map_err(|e| e.to_string())?
        } else {
            let h = bayeshg::random::random_dah(&mut r, n, 3);
            let fa: FactorAssignment = random_factors(&mut r, &factor_scopes(&h), &d).map_err(|e| e.to_string())?;
            assemble_joint(&h, &d, &fa).map_err(|e| e.to_string())?
        };
        let found = enumerate_ci(&j, CI_TOLERANCE).map_err(|e| e.to_string())?;
        statements += found.len();
        let violations = check_semigraphoid(&found, &vs, false);
        ensure(violations.is_empty(), || format!("joint {i}: {}", violations[0]))?;
    }
    Ok(format!("50 joints, {statements} statements, 0 violations"))
}

fn criterion_12() -> Check {
    let h = dah("noisy_or.dah");
    let mut d = Domains::new();
    d.insert("d".into(), vec!["good".into(), "bad".into()]).unwrap();
    d.insert("m".into(), vec!["yes".into(), "no".into()]).unwrap();
    d.insert("o".into(), vec!["no".into(), "yes".into()]).unwrap();
    let model = NoisyOr {
        child: "o".into(),
        negative: "no".into(),
        parents: vec![
            NoisyOrParent { parent: "d".into(), active: "good".into(), inhibition: 0.9 },
            NoisyOrParent { parent: "m".into(), active: "yes".into(), inhibition: 0.8 },
        ],
    };
    let mut fa = FactorAssignment::new(model.factors(&d).map_err(|e| e.to_string())?);
    fa.push(Factor::new(vec!["d".into()], vec![0.3, 0.7], &d).unwrap());
    fa.push(Factor::new(vec!["m".into()], vec![0.6, 0.4], &d).unwrap());
    let j: JointTable = assemble_joint_with(&h, &d, &fa, &[model.complement_rule()]).map_err(|e| e.to_string())?;
    let p = |o: &str| *j.probability(&[("d", "good"), ("m", "yes"), ("o", o)], &d).unwrap();
    let conditional = p("no") / (p("no") + p("yes"));
    ensure((conditional - 0.72).abs() <= NOISY_OR_TOLERANCE, || format!("got {conditional}"))?;
    Ok(format!("P(o=no | d=good, m=yes) = {conditional}"))
}

fn criterion_13() -> Check {
    let mut count = 0;
    let mut names: Vec<_> = fs::read_dir(FIXTURES).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in names {
        let kind = match path.extension().and_then(|e| e.to_str()) {
            Some("dah") => DocumentKind::Dah,
            Some("cg") => DocumentKind::ChainGraph,
            Some("json") => DocumentKind::Factors,
            Some("do") => DocumentKind::Intervention,
            _ => continue,
        };
        let text = fs::read_to_string(&path).unwrap();
        let Ok(doc) = bayeshg::format::parse_document_as(&text, kind) else { continue };
        let printed = print_canonical(&doc);
        let again = bayeshg::format::parse_document_as(&printed, kind).map_err(|e| e.to_string())?;
        ensure(again == doc && print_canonical(&again) == printed, || format!("{} changed", path.display()))?;
        count += 1;
    }
    let malformed = [
        ("bad_arc.cg", "bad_arc.cg:2:10:"),
        ("bad_edge.dah", "bad_edge.dah:2:6:"),
        ("bad_factors.json", "bad_factors.json:3:"),
    ];
    for (file, location) in malformed {
        let path = format!("{FIXTURES}/{file}");
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = bayeshg_cli::run(["bayeshg", "validate", path.as_str()], &mut out, &mut err);
        let err = String::from_utf8(err).unwrap();
        ensure(code == 2 && err.contains(location), || format!("{file}: exit {code}, {err}"))?;
    }
    Ok(format!("{count} fixtures round-trip, malformed inputs located with exit 2"))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Check)> = vec![
        ("1", "hypermoralization of the simple chain graph", criterion_1),
        ("2", "shadow and canonical DAG of the six-vertex hypergraph", criterion_2),
        ("3", "shadow inverts hypermoralization", criterion_3),
        ("4", "maximal hyperedges equal all moral cliques (literal)", criterion_4),
        ("4a", "maximal hyperedges equal moral cliques meeting the component", criterion_4_meeting_component),
        ("5", "chain graph and hypergraph separation agree", criterion_5),
        ("6", "factorized joints satisfy certified statements", criterion_6),
        ("7", "chain graph and hypergraph joints agree", criterion_7),
        ("8", "intervention routes agree", criterion_8),
        ("9", "factorization-equivalence predicates", criterion_9),
        ("10", "factor scopes of the three-variable table", criterion_10),
        ("11", "semi-graphoid soundness", criterion_11),
        ("12", "noisy-or product rule", criterion_12),
        ("13", "parser round trip and located errors", criterion_13),
    ];
    let mut unexpected = Vec::new();
    let mut outcomes = BTreeMap::new();
    for (id, title, check) in criteria {
        let result = check();
        let expected_failure = EXPECTED_FAILURES.contains(&id);
        match &result {
            Ok(detail) => println!("PASS {id:>3}  {title}: {detail}"),
            Err(detail) => println!("FAIL {id:>3}  {title}: {detail}"),
        }
        if result.is_ok() == expected_failure {
            unexpected.push(id);
        }
        outcomes.insert(id, result.is_ok());
    }
    let passed = outcomes.values().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria pass; expected failures: {EXPECTED_FAILURES:?}", outcomes.len());
    if !unexpected.is_empty() {
        println!("unexpected outcome for: {unexpected:?}");
        std::process::exit(1);
    }
}
