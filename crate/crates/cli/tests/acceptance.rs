//! End-to-end acceptance checks, one PASS/FAIL line each. Exits nonzero if any
//! check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use nswlab::constants::{DEFAULT_C_MAX, DEFAULT_C_MIN};
use nswlab::graph::{all_cubic_graphs, is_vertex_cover, named_graph, Graph, VertexSet};
use nswlab::normalize::normal_form_violation;
use nswlab::rational::{self, frac, int};
use nswlab::reduction::{closed_form_value, lemma2_inequalities};
use nswlab::vertex_cover::min_vertex_cover;
use nswlab::{
    analyze_structure, build_instance, completeness_allocation, completeness_value, exact_max_nsw,
    hardness_constants, lemma2_rule, normalize, nsw_product, soundness_bound, verify_identities, Allocation,
    ReducedInstance, ReductionParams, SearchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_cubic_graphs() -> Vec<Graph> {
    [4, 6, 8].into_iter().flat_map(|n| all_cubic_graphs(n).unwrap()).collect()
}

fn reduce(g: &Graph, alpha: nswlab::Rational, k: usize) -> ReducedInstance {
    build_instance(g, &ReductionParams::new(alpha, k)).unwrap()
}

fn named(name: &str, k: usize) -> ReducedInstance {
    reduce(&named_graph(name).unwrap(), frac(2, 5), k)
}

fn constants() -> String {
    let c = hardness_constants(&frac(1, 3), DEFAULT_C_MIN, DEFAULT_C_MAX).unwrap();
    assert!((c.mu - 1.00008).abs() < 1e-5, "mu = {}", c.mu);
    assert!((c.beta - 0.0309).abs() < 5e-4, "beta = {}", c.beta);
    assert!((c.gamma - 0.001733).abs() < 5e-5, "gamma = {}", c.gamma);
    format!("mu={:.7} beta={:.4} gamma={:.6}", c.mu, c.beta, c.gamma)
}

fn completeness() -> String {
    let mut checked = 0;
    for g in small_cubic_graphs() {
        for alpha in [frac(2, 5), frac(5, 12), frac(11, 24)] {
            for mask in 0u64..1 << g.n() {
                let c = VertexSet::from_mask(mask, g.n());
                if !is_vertex_cover(&g, &c) {
                    continue;
                }
                let r = reduce(&g, alpha.clone(), c.len());
                let v = nsw_product(&r.instance, &completeness_allocation(&r, &c).unwrap()).unwrap();
                let expected = rational::pow(&(int(1) + &alpha), 3 * c.len() as i64 - g.m() as i64);
                assert_eq!(v.product, expected, "cover {:?}", c.to_vec());
                checked += 1;
            }
        }
    }
    format!("{checked} (graph, cover, alpha) triples")
}

fn oracle_values() -> String {
    let cases = [
        ("K4", 3, frac(343, 125)),
        ("K33", 3, int(1)),
        ("Petersen", 6, rational::pow(&frac(7, 5), 3)),
        ("K4", 2, frac(14, 15)),
    ];
    let mut out = Vec::new();
    for (name, k, expected) in cases {
        let (_, v) = exact_max_nsw(&named(name, k).instance, &SearchConfig::default()).unwrap();
        assert_eq!(v.product, expected, "{name} k={k}");
        out.push(format!("{name}/k={k}:{}", v.product));
    }
    out.join(" ")
}

/// Every `(graph, k)` with `N <= 8` and `k in {tau - 1, tau}` at alpha = 2/5.
fn small_cases() -> Vec<(Graph, usize, usize)> {
    let mut cases = Vec::new();
    for g in small_cubic_graphs() {
        let tau = min_vertex_cover(&g).unwrap().len();
        cases.push((g.clone(), tau, tau - 1));
        cases.push((g, tau, tau));
    }
    cases
}

fn soundness_domination() -> String {
    let alpha = frac(2, 5);
    let cases = small_cases();
    for (g, tau, k) in &cases {
        let (_, opt) = exact_max_nsw(&reduce(g, alpha.clone(), *k).instance, &SearchConfig::default()).unwrap();
        let bound = soundness_bound(g, *k, &alpha).unwrap();
        assert!(opt.product <= bound.product, "optimum above bound at k={k}");
        let cover_exists = tau <= k;
        let completeness = if 3 * k >= g.m() {
            completeness_value(g, *k, &alpha).unwrap()
        } else {
            closed_form_value(g, *k, &alpha)
        };
        assert_eq!(opt.product == completeness.product, cover_exists, "k={k} tau={tau}");
        if !cover_exists {
            assert!(opt.product < completeness.product);
        }
    }
    format!("{} (graph, k) pairs", cases.len())
}

fn normalizer() -> String {
    let mut total = 0;
    for (name, k) in [("K4", 3), ("K4", 2), ("K33", 3), ("Prism", 3), ("Petersen", 6), ("Petersen", 5)] {
        let r = named(name, k);
        let inst = &r.instance;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..1000 {
            let holders = (0..inst.n_items()).map(|_| rng.gen_range(0..inst.n_agents())).collect();
            let a = Allocation::new(inst, holders).unwrap();
            let b = normalize(&r, &a).unwrap();
            assert!(
                nsw_product(inst, &b).unwrap() >= nsw_product(inst, &a).unwrap(),
                "{name} trial {trial}: product decreased"
            );
            for &(v, e) in r.tags.incidences() {
                let item = r.tags.shared_item(&r.graph, v, e).unwrap();
                assert_eq!(b.holder(item), lemma2_rule(&r, &b, v, e).unwrap().holder, "{name} trial {trial}");
            }
            for v in 0..r.graph.n() {
                let held = r.tags.vertex_items().filter(|&j| b.holder(r.tags.vertex_item(j)) == v).count();
                assert!(held <= 1, "{name} trial {trial}: v:{v} holds {held} vertex items");
            }
            assert_eq!(normal_form_violation(&r, &b).unwrap(), None);
            total += 1;
        }
    }
    format!("{total} random allocations")
}

fn identities() -> String {
    let alpha = frac(2, 5);
    let mut instances: Vec<ReducedInstance> = small_cases().iter().map(|(g, _, k)| reduce(g, alpha.clone(), *k)).collect();
    instances.extend([named("K4", 3), named("K4", 2), named("K33", 3), named("Petersen", 6), named("Petersen", 5)]);
    let mut failures = 0;
    for r in &instances {
        let (opt, _) = exact_max_nsw(&r.instance, &SearchConfig::default()).unwrap();
        let p = analyze_structure(r, &normalize(r, &opt).unwrap()).unwrap();
        failures += verify_identities(r, &p).failures().count();
    }
    assert_eq!(failures, 0);
    format!("{} optima, 0 failures", instances.len())
}

fn inequality_grid() -> String {
    for j in 1..=100 {
        let alpha = frac(1, 3) + frac(j, 606);
        assert!(lemma2_inequalities(&alpha).all_hold(), "alpha = {alpha}");
    }
    for alpha in [frac(1, 3), frac(1, 2)] {
        assert!(!lemma2_inequalities(&alpha).all_hold(), "alpha = {alpha}");
    }
    "100 interior points hold, both endpoints fail".into()
}

fn determinism() -> String {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("petersen");
    let bin = env!("CARGO_BIN_EXE_nswlab");
    let status = Command::new(bin)
        .args(["reduce", "--named", "Petersen", "--k", "6", "--out"])
        .arg(&prefix)
        .output()
        .unwrap();
    assert!(status.status.success());
    let inst = dir.path().join("petersen.instance.json");
    let outputs: Vec<Vec<u8>> = [1, 4, 8]
        .iter()
        .map(|w| {
            let o = Command::new(bin).arg("solve").arg(&inst).args(["--json", "--workers", &w.to_string()]).output().unwrap();
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            o.stdout
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]), "solve output depends on the worker count");
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.contains("\"product\": \"343/125\""));
    "identical output for 1, 4, 8 workers".into()
}

fn main() {
    type Check = fn() -> String;
    let criteria: [(&str, Check); 8] = [
        ("constants reproduction", constants),
        ("completeness exactness", completeness),
        ("oracle optimality on named graphs", oracle_values),
        ("soundness-bound domination", soundness_domination),
        ("normalizer properties", normalizer),
        ("identity suite", identities),
        ("inequality grid", inequality_grid),
        ("determinism", determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match catch_unwind(AssertUnwindSafe(check)) {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {}. {name}: {msg}", i + 1);
                failed += 1;
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
