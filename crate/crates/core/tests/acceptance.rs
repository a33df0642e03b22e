//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the run
//! fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use likelic::graph::{parse_context, parse_document, ContextGraph};
use likelic::inference::{brute_force_derived, derived_implication, widest_path};
use likelic::scale::{aggregation_capacity, boundaries, combine_and, combine_or, Likeliness};
use likelic::update::{
    apply_scenario, compare_scenarios, propagate, propagate_fixpoint_in_order, Evidence, PropagationMode, Scenario,
};
use likelic::{Valuation, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;

use common::{grade, random_context, random_implications, reachable, reshuffled, rng};

const SNOWBIRD: &str = include_str!("../fixtures/snowbird.ctx");
const MORTALITY: &str = include_str!("../fixtures/mortality.ctx");
const MORTALITY_SCENARIOS: &str = include_str!("../fixtures/mortality.scn");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn snowbird() -> ContextGraph {
    parse_context(SNOWBIRD).expect("fixture parses")
}

fn labelled(g: &ContextGraph, v: &Valuation) -> Vec<(String, u8)> {
    v.by_label(g).into_iter().map(|(k, l)| (k.to_string(), l.grade())).collect()
}

fn c1_snowbird_inference() -> Outcome {
    let g = snowbird();
    let s = g.vertex("Snowbird").unwrap();
    let k = g.vertex("skiing").unwrap();
    let d = g.vertex("death").unwrap();
    let runs = 100u32;
    let start = Instant::now();
    let mut sd = None;
    let mut kd = None;
    for _ in 0..runs {
        sd = Some(derived_implication(&g, s, d).map_err(|e| e.to_string())?.value);
        kd = Some(derived_implication(&g, k, d).map_err(|e| e.to_string())?.value);
    }
    let per_call = start.elapsed() / (2 * runs);
    ensure(sd == Some(Likeliness::NEUTRAL), || format!("Snowbird->death = {sd:?}"))?;
    ensure(kd == Some(Likeliness::NEUTRAL), || format!("skiing->death = {kd:?}"))?;
    ensure(per_call < Duration::from_millis(1), || format!("{per_call:?} per query"))?;
    Ok(format!("Snowbird->death = 3, skiing->death = 3, {per_call:?} per query"))
}

fn c2_figure_two() -> Outcome {
    let g = snowbird();
    let src = Evidence::source(g.vertex("Snowbird").unwrap(), grade(4));
    let v = propagate(&g, &src, PropagationMode::Wavefront).map_err(|e| e.to_string())?;
    let mut want: Vec<(String, u8)> = [
        ("Snowbird", 4),
        ("travelling", 4),
        ("skiing", 4),
        ("accident", 1),
        ("ski-accident", 4),
        ("death", 3),
    ]
    .iter()
    .map(|(k, g)| (k.to_string(), *g))
    .collect();
    want.sort();
    let got = labelled(&g, &v);
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("wavefront from Snowbird=4 matches all five propagated grades".into())
}

fn c3_fixpoint_cross_check() -> Outcome {
    let g = snowbird();
    let s = g.vertex("Snowbird").unwrap();
    let four = grade(4);
    let v = propagate(&g, &Evidence::source(s, four), PropagationMode::Fixpoint).map_err(|e| e.to_string())?;
    let accident = v.get(g.vertex("accident").unwrap());
    ensure(accident == Some(four), || format!("accident = {accident:?}"))?;
    let reach = reachable(&g, s);
    for b in g.vertices().filter(|&b| b != s) {
        let got = v.get(b);
        let want = if reach.contains(&b) {
            Some(four.min(brute_force_derived(&g, s, b).map_err(|e| e.to_string())?))
        } else {
            None
        };
        ensure(got == want, || format!("{}: {got:?} vs oracle {want:?}", g.label(b)))?;
    }
    Ok(format!("accident = 4; {} reachable vertices agree with min(4, oracle)", reach.len()))
}

fn c4_boundaries() -> Outcome {
    let tol = 5e-5;
    let b9 = boundaries(1e-9).map_err(|e| e.to_string())?;
    let c = b9.cuts();
    for (idx, want) in [(1, 0.0014), (2, 0.1118), (3, 0.8882), (4, 0.9986)] {
        ensure((c[idx] - want).abs() <= tol, || format!("base 1e-9 c{} = {} vs {want}", idx + 1, c[idx]))?;
    }
    let b6 = boundaries(1e-6).map_err(|e| e.to_string())?;
    let c = b6.cuts();
    for (idx, want) in [(1, 0.0125), (2, 0.2008), (3, 0.7992), (4, 0.9875)] {
        ensure((c[idx] - want).abs() <= tol, || format!("base 1e-6 c{} = {} vs {want}", idx + 1, c[idx]))?;
    }
    Ok(format!(
        "1e-9: {:.6} {:.6} {:.6} {:.6}; 1e-6: {:.6} {:.6}",
        b9.cuts()[1],
        b9.cuts()[2],
        b9.cuts()[3],
        b9.cuts()[4],
        c[1],
        c[2]
    ))
}

fn c5_capacities() -> Outcome {
    let b = boundaries(1e-9).map_err(|e| e.to_string())?;
    let unlikely = aggregation_capacity(&b, Likeliness::UNLIKELY).map_err(|e| e.to_string())?;
    let neutral = aggregation_capacity(&b, Likeliness::NEUTRAL).map_err(|e| e.to_string())?;
    ensure(unlikely == 79 || unlikely == 80, || format!("unlikely->neutral = {unlikely}"))?;
    ensure(neutral == 8, || format!("neutral->likely = {neutral}"))?;
    Ok(format!("unlikely->neutral = {unlikely}, neutral->likely = {neutral}"))
}

fn mortality() -> Result<(ContextGraph, Vec<Scenario>), String> {
    let g = parse_context(MORTALITY).map_err(|e| e.to_string())?;
    let doc = parse_document(MORTALITY_SCENARIOS).map_err(|e| e.to_string())?;
    let scenarios = doc
        .scenarios
        .iter()
        .map(|d| Scenario::resolve(d, &g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((g, scenarios))
}

fn c6_table_rows() -> Outcome {
    let (g, scenarios) = mortality()?;
    let expected: [(&str, [u8; 4]); 3] = [
        ("at home in bed", [4, 1, 1, 0]),
        ("in war", [1, 0, 0, 1]),
        ("by forces of nature", [1, 4, 1, 2]),
    ];
    let rows: Vec<VertexId> = expected.iter().map(|(l, _)| g.vertex(l).unwrap()).collect();
    let table = compare_scenarios(&g, g.facts(), &scenarios, &rows, PropagationMode::Fixpoint)
        .and_then(|t| t.select(&["default", "Reykjavik", "Istanbul", "trip"]))
        .map_err(|e| e.to_string())?;
    for ((label, want), (_, got)) in expected.iter().zip(&table.rows) {
        let got: Vec<Option<u8>> = got.iter().map(|c| c.map(Likeliness::grade)).collect();
        let want: Vec<Option<u8>> = want.iter().map(|&w| Some(w)).collect();
        ensure(got == want, || format!("{label}: {got:?} vs {want:?}"))?;
    }
    Ok("home 4 1 1 0, war 1 0 0 1, nature 1 4 1 2".into())
}

fn c7_nonmonotonicity() -> Outcome {
    let (g, scenarios) = mortality()?;
    let nature = g.vertex("by forces of nature").unwrap();
    let by_name = |n: &str| scenarios.iter().find(|s| s.name == n).unwrap();
    let run = |s: &Scenario| apply_scenario(&g, g.facts(), s, PropagationMode::Fixpoint).map_err(|e| e.to_string());
    let default = g.facts().get(nature);
    let trip = run(by_name("trip"))?.get(nature);
    let istanbul = run(by_name("Istanbul"))?.get(nature);
    ensure(default == Some(grade(1)), || format!("default {default:?}"))?;
    ensure(trip == Some(grade(2)), || format!("trip {trip:?}"))?;
    ensure(istanbul == Some(grade(1)), || format!("Istanbul {istanbul:?}"))?;
    // Adding the Istanbul evidence to the trip scenario lowers the grade.
    let ist = g.vertex("Istanbul").unwrap();
    let mut both = by_name("trip").clone();
    both.name = "trip+Istanbul".into();
    both = both.observe(ist, grade(6)).exclude(ist, nature, grade(1));
    let combined = run(&both)?.get(nature);
    ensure(combined == Some(grade(1)), || format!("trip+Istanbul {combined:?}"))?;
    Ok("forces of nature: default 1, trip 2, Istanbul 1, trip+Istanbul 1".into())
}

fn c8_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0x0c8);
    let mut pairs = 0usize;
    let mut stored_pairs = 0usize;
    for i in 0..200 {
        let n = r.gen_range(1..=8);
        let g = random_implications(&mut r, n, 0.3);
        for a in g.vertices() {
            for b in g.vertices().filter(|&b| b != a) {
                let oracle = brute_force_derived(&g, a, b).map_err(|e| e.to_string())?;
                let widest = widest_path(&g, a, b).map_err(|e| e.to_string())?.unwrap_or(Likeliness::IMPOSSIBLE);
                let derived = derived_implication(&g, a, b).map_err(|e| e.to_string())?.value;
                let expected = match g.implication(a, b) {
                    Some(stored) => {
                        stored_pairs += 1;
                        stored
                    }
                    None => oracle,
                };
                ensure(widest == oracle, || format!("graph {i}: widest {widest} vs oracle {oracle}"))?;
                ensure(derived == expected, || format!("graph {i}: derived {derived} vs {expected}"))?;
                pairs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{pairs} pairs ({stored_pairs} stored) agree in {elapsed:?}"))
}

fn c9_property_suite() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0x0c9);

    for x in Likeliness::ALL {
        ensure(x.dual().dual() == x, || format!("dual involution fails at {x}"))?;
    }

    let mut seqs: Vec<Vec<Likeliness>> = Vec::new();
    for a in Likeliness::ALL {
        seqs.push(vec![a]);
        for b in Likeliness::ALL {
            seqs.push(vec![a, b]);
            for c in Likeliness::ALL {
                seqs.push(vec![a, b, c]);
            }
        }
    }
    for xs in &seqs {
        let lhs = combine_or(xs.iter().copied()).dual();
        let rhs = combine_and(xs.iter().map(|x| x.dual())).map_err(|e| e.to_string())?;
        ensure(lhs == rhs, || format!("De Morgan fails for {xs:?}"))?;
    }

    for _ in 0..1000 {
        let len = r.gen_range(1..10);
        let xs: Vec<_> = (0..len).map(|_| grade(r.gen_range(0..=6))).collect();
        let m = combine_or(xs.iter().copied());
        let max = *xs.iter().max().unwrap();
        ensure(m == max, || format!("combine_or {xs:?} = {m}"))?;
        let mut more = xs.clone();
        more.push(*xs.choose(&mut r).unwrap());
        ensure(combine_or(more) == m, || format!("repeating a term changed combine_or of {xs:?}"))?;
    }

    let mut max_sweeps_ratio = 0.0f64;
    for i in 0..100 {
        let n = r.gen_range(1..=10);
        let g = random_implications(&mut r, n, 0.3);
        let h = reshuffled(&mut r, &g);
        let src_label = format!("v{}", r.gen_range(0..n));
        let value = grade(r.gen_range(0..=6));
        let (s_g, s_h) = (g.vertex(&src_label).unwrap(), h.vertex(&src_label).unwrap());
        let base = propagate(&g, &Evidence::source(s_g, value), PropagationMode::Fixpoint).map_err(|e| e.to_string())?;
        let shuffled = propagate(&h, &Evidence::source(s_h, value), PropagationMode::Fixpoint).map_err(|e| e.to_string())?;
        ensure(labelled(&g, &base) == labelled(&h, &shuffled), || format!("graph {i}: insertion order changed result"))?;
        for _ in 0..5 {
            let mut order: Vec<_> = g.vertices().collect();
            order.shuffle(&mut r);
            let trace = propagate_fixpoint_in_order(&g, s_g, value, &order).map_err(|e| e.to_string())?;
            let mut merged = g.facts().clone();
            merged.merge_max(&trace.values);
            ensure(merged == base, || format!("graph {i}: sweep order changed result"))?;
            ensure(trace.sweeps <= 6 * n, || format!("graph {i}: {} sweeps for {n} vertices", trace.sweeps))?;
            max_sweeps_ratio = max_sweeps_ratio.max(trace.sweeps as f64 / n as f64);
        }
    }

    for i in 0..500 {
        let g = random_context(&mut r, 20);
        let text = likelic::graph::serialize_context(&g);
        let back = parse_context(&text).map_err(|e| format!("graph {i}: {e}"))?;
        ensure(back == g, || format!("graph {i}: round trip differs"))?;
    }

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} De Morgan cases, 100 fixpoint graphs (max {max_sweeps_ratio:.1}·|V| sweeps), 500 round trips in {elapsed:?}",
        seqs.len()
    ))
}

fn c10_dice() -> Outcome {
    let b = boundaries(1e-9).map_err(|e| e.to_string())?;
    let mut grades = Vec::new();
    for p in [0.5177, 0.4914, 0.6187, 0.5973] {
        let l = b.grade_of(p).map_err(|e| e.to_string())?;
        ensure(l == Likeliness::NEUTRAL, || format!("p={p} -> {l}"))?;
        grades.push(l.grade());
    }
    Ok(format!("all four map to {grades:?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Snowbird inference", c1_snowbird_inference),
        ("2 Figure 2 wavefront", c2_figure_two),
        ("3 fixpoint cross-check", c3_fixpoint_cross_check),
        ("4 boundary numbers", c4_boundaries),
        ("5 aggregation capacities", c5_capacities),
        ("6 mortality table rows", c6_table_rows),
        ("7 nonmonotonicity", c7_nonmonotonicity),
        ("8 oracle equivalence", c8_oracle_equivalence),
        ("9 property suite", c9_property_suite),
        ("10 dice demo", c10_dice),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
