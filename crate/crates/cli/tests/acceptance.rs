//! One pass/fail line per acceptance criterion. Runs without the test
//! harness so the lines always reach the output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use elastigraph::energy::{certify, verify_certificate, CertifyBudget, Verdict};
use elastigraph::fixtures::fixture_endomorphism;
use elastigraph::format::parse_rational;
use elastigraph::graph::extremal_length;
use elastigraph::maps::{pull_lengths, pullback_curve, GraphMap};
use elastigraph::obstruction::{perron_eigenvalue, ObstructionMatrix};
use elastigraph::asymptotics::fekete_upper;
use elastigraph::pl::{compose, emb, epinf_evaluate, epp_evaluate, evaluate, lift, EnergyKind, Exponent, Image, PlMap};
use elastigraph::random::{self, Rand};
use elastigraph::thicken::{thickening_bounds, thickening_factor};
use elastigraph::traintrack::{check_witness, exhaustive_simple_curves, is_simple, stitch_simple, TrainTrack};
use elastigraph::Q;
use num::{One, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value as Json;

type Outcome = Result<String, String>;

fn run(args: &[&str]) -> (String, i32, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_elastigraph")).args(args).output().expect("binary runs");
    let took = start.elapsed();
    (String::from_utf8(out.stdout).expect("utf-8"), out.status.code().unwrap_or(-1), took)
}

fn json(args: &[&str]) -> Json {
    let (text, code, _) = run(args);
    if code != 0 {
        panic!("{args:?} exited {code}");
    }
    serde_json::from_str(&text).expect("json output")
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b * (1.0 + 1e-9) + 1e-12
}

fn criterion_1() -> Outcome {
    let (text, code, took) = run(&["automaton", "--fixture", "theta"]);
    let rules: Vec<&str> = text.lines().filter(|l| l.contains(") = ")).collect();
    let want = ["a(0w) = 1·b(w)", "a(1w) = 0·A(w)", "b(0w) = 1·w", "b(1w) = 0·w"];
    check(code == 0, format!("exit {code}"))?;
    check(rules.iter().map(|l| l.trim()).eq(want), format!("rules {rules:?}"))?;
    check(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("4 rules in {:.3}s", took.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let p = json(&["portrait", "--fixture", "theta", "--json"]);
    let points: Vec<&str> = p["points"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    check(points.len() == 4, format!("points {points:?}"))?;
    let arrow = |from: &str| p["arrows"].as_array().unwrap().iter().find(|a| a["from"] == from).cloned();
    for (from, to) in [("0", "1"), ("inf", "-1")] {
        let a = arrow(from).ok_or(format!("no arrow from {from}"))?;
        check(a["to"] == to && a["degree"] == 2, format!("arrow {a}"))?;
    }
    let cycles = p["cycles"].as_array().unwrap();
    let two = cycles.iter().any(|c| {
        let mut c: Vec<&str> = c.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
        c.sort();
        c == ["-1", "inf"]
    });
    check(two, format!("cycles {cycles:?}"))?;
    check(p["hyperbolic_type"] == true, "not hyperbolic")?;
    Ok("4 points, 0 ->(2) 1, inf ->(2) -1, cycle {inf, -1}, hyperbolic".into())
}

fn same_data(a: &GraphMap, b: &GraphMap) -> bool {
    let shape = |m: &GraphMap| {
        let s = m.source();
        let t = m.target();
        (
            s.edge_names().to_vec(),
            (0..s.edge_count()).map(|e| s.ends(e)).collect::<Vec<_>>(),
            t.edge_names().to_vec(),
            m.vertex_images().to_vec(),
            m.edge_images().to_vec(),
        )
    };
    shape(a) == shape(b)
}

fn criterion_3() -> Outcome {
    let (u, v) = (fixture_endomorphism("rabbit15").unwrap(), fixture_endomorphism("rabbit25").unwrap());
    check(same_data(u.pi.map(), v.pi.map()) && same_data(&u.phi, &v.phi), "maps differ")?;
    check(u.gamma0.graph.rotations() != v.gamma0.graph.rotations(), "same rotation")?;
    let a = json(&["automaton", "--fixture", "rabbit15", "--json"]);
    let b = json(&["automaton", "--fixture", "rabbit25", "--json"]);
    check(a != b, "automata agree")?;
    Ok("same (pi, phi), rotations and automata differ".into())
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for f in ["theta", "rabbit15", "rabbit25"] {
        let (text, code, took) = run(&["certify", "--fixture", f]);
        check(code == 0, format!("{f}: exit {code}"))?;
        let line = text.lines().find(|l| l.starts_with("certificate at n = ")).ok_or(format!("{f}: no certificate"))?;
        let (n, rest) = line["certificate at n = ".len()..].split_once(": Emb = ").ok_or(format!("{f}: {line}"))?;
        let n: usize = n.parse().map_err(|_| format!("{f}: {line}"))?;
        let value = parse_rational(rest.trim_end_matches(" < 1")).ok_or(format!("{f}: {line}"))?;
        check(n <= 3 && value < Q::one(), format!("{f}: {line}"))?;
        check(text.lines().any(|l| l.starts_with("margin: ")), format!("{f}: no margin"))?;
        check(took < Duration::from_secs(300), format!("{f}: took {took:?}"))?;
        notes.push(format!("{f} n={n} Emb={value} {:.1}s", took.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion_5() -> Outcome {
    let o = json(&["obstruct", "--fixture", "obstructed-k2d2", "--curve", "horizontal", "--json"]);
    let o = &o["obstruction"];
    check(o["matrix_p2"] == serde_json::json!([["1"]]), format!("M^2 = {}", o["matrix_p2"]))?;
    let lam = o["lambda"]["value"].as_f64().unwrap();
    check((lam - 1.0).abs() <= 1e-9, format!("lambda {lam}"))?;
    let q: f64 = o["q"].as_str().unwrap().parse().unwrap();
    check((q - 2.0).abs() <= 1e-6, format!("Q {q}"))?;
    check(o["p_obstruction"]["obstruction"] == true, "not a p-obstruction at p = 2")?;
    let (_, code, _) = run(&["certify", "--fixture", "obstructed-k2d2"]);
    check(code == 2, format!("certify exit {code}"))?;
    Ok(format!("M^2 = [1], lambda = {lam}, Q = {q}, certify exit 2"))
}

fn small_pl(r: &mut Rand) -> PlMap {
    let g = random::small_graph(r);
    let h = random::small_graph(r);
    let m = random::graph_map(r, &g, &h, 3);
    let (a, b) = (random::lengths(r, &g), random::lengths(r, &h));
    random::pl_map(r, &m, &a, &b, true)
}

fn sampled(psi: &PlMap, kind: EnergyKind, r: &mut Rand) -> f64 {
    let mut best = 0.0f64;
    for e in 0..psi.target.edge_count() {
        let len = psi.alpha_t.alpha(e).to_f64().unwrap();
        let segs: Vec<(f64, f64, f64)> = psi
            .pieces
            .iter()
            .flatten()
            .filter_map(|p| match &p.image {
                Image::Segment { edge, from, to } if *edge == e => {
                    let (a, b) = (from.to_f64().unwrap(), to.to_f64().unwrap());
                    Some((a.min(b), a.max(b), p.speed().to_f64().unwrap()))
                }
                _ => None,
            })
            .collect();
        let mut probes: Vec<f64> = segs.iter().flat_map(|&(a, b, _)| [a - 1e-9, a + 1e-9, b - 1e-9, b + 1e-9]).collect();
        probes.extend((0..64).map(|_| r.gen::<f64>() * len));
        for x in probes.into_iter().filter(|&x| x > 0.0 && x < len) {
            let s: Vec<f64> = segs.iter().filter(|(a, b, _)| *a < x && x < *b).map(|t| t.2).collect();
            let d = match kind {
                EnergyKind::Emb => s.iter().sum(),
                EnergyKind::Epp(Exponent::Finite(p)) => s.iter().map(|v| v.powf(p - 1.0)).sum::<f64>().powf(1.0 / p),
                _ => s.iter().cloned().fold(0.0, f64::max),
            };
            best = best.max(d);
        }
    }
    best
}

fn criterion_6() -> Outcome {
    let mut r = random::rng(6);
    for i in 0..500 {
        let psi = small_pl(&mut r);
        let d = r.gen_range(2..=3);
        let pi = random::cover(&mut r, &psi.target, d);
        let (up, _) = lift(&psi, &pi).map_err(|e| e.to_string())?;
        check(emb(&up) == emb(&psi), format!("cover case {i}"))?;
    }
    for i in 0..500 {
        let g = random::small_graph(&mut r);
        let alpha = random::lengths(&mut r, &g);
        let c = random::curve(&mut r, &g, 5, 3);
        let d = r.gen_range(2..=4);
        let pi = random::cover(&mut r, &g, d);
        let el = extremal_length(&c, &alpha).unwrap();
        let up = extremal_length(&pullback_curve(&pi, &c), &pull_lengths(&pi, &alpha)).unwrap();
        check(up == el * Q::from_integer(d.into()), format!("length case {i}"))?;
    }
    for i in 0..200 {
        let psi = small_pl(&mut r);
        for kind in [EnergyKind::Emb, EnergyKind::Epp(Exponent::Finite(3.0)), EnergyKind::Epp(Exponent::Infinity)] {
            let (a, b) = (evaluate(&psi, kind).value.to_f64(), sampled(&psi, kind, &mut r));
            check((a - b).abs() <= 1e-6, format!("sampling case {i}: {a} vs {b}"))?;
        }
    }
    Ok("500 cover, 500 length, 200 sampling cases".into())
}

fn criterion_7() -> Outcome {
    let mut r = random::rng(7);
    let exps = |r: &mut Rand| {
        let p = 1.0 + r.gen_range(0.05..5.0);
        (p, p + r.gen_range(0.0..5.0))
    };
    let mut violations = [0usize; 6];
    for _ in 0..1000 {
        let (g, h, k) = (random::small_graph(&mut r), random::small_graph(&mut r), random::small_graph(&mut r));
        let (ag, ah, ak) = (random::lengths(&mut r, &g), random::lengths(&mut r, &h), random::lengths(&mut r, &k));
        let m1 = random::graph_map(&mut r, &g, &h, 2);
        let m2 = random::graph_map(&mut r, &h, &k, 2);
        let f = random::pl_map(&mut r, &m1, &ag, &ah, true);
        let gg = random::pl_map(&mut r, &m2, &ah, &ak, true);
        let c = compose(&gg, &f).map_err(|e| e.to_string())?;
        violations[0] += usize::from(emb(&c) > emb(&gg) * emb(&f));

        let psi = small_pl(&mut r);
        let (p, q) = exps(&mut r);
        let e = |x: f64| epp_evaluate(&psi, Exponent::Finite(x)).value.to_f64().powf(x / (x - 1.0));
        violations[1] += usize::from(!le(e(q), e(p)));

        let (sg, tg) = (random::small_graph(&mut r), random::small_graph(&mut r));
        let mm = random::graph_map(&mut r, &sg, &tg, 3);
        let (sa, ta) = (random::lengths(&mut r, &sg), random::lengths(&mut r, &tg));
        let cs = PlMap::constant_speed(&mm, &sa, &ta);
        let min = sa.min_length().to_f64().unwrap();
        let ep = |f: &PlMap, x: f64| epinf_evaluate(f, Exponent::Finite(x)).to_f64();
        violations[2] += usize::from(!le(ep(&cs, q), min.powf(-1.0 / p + 1.0 / q) * ep(&cs, p)));
        let total = psi.alpha_s.total_length().to_f64().unwrap();
        violations[3] += usize::from(!le(ep(&psi, p), total.powf(1.0 / p - 1.0 / q) * ep(&psi, q)));

        let n = r.gen_range(1..=4);
        let degrees = (0..n)
            .map(|_| (0..n).map(|_| (0..r.gen_range(0..=2)).map(|_| r.gen_range(1..=4)).collect()).collect())
            .collect();
        let om = ObstructionMatrix { components: vec![Vec::new(); n], degrees, escaping: Vec::new() };
        let lp = perron_eigenvalue(&om.at(Exponent::Finite(p))).value();
        let lq = perron_eigenvalue(&om.at(Exponent::Finite(q))).value();
        violations[4] += usize::from(!le(lq, lp));

        let xs: Vec<f64> = (0..r.gen_range(1..12)).map(|_| r.gen_range(1e-3..1e3)).collect();
        let bounds: Vec<f64> = (1..=xs.len()).map(|k| fekete_upper(&xs[..k]).unwrap()).collect();
        violations[5] += usize::from(bounds.windows(2).any(|w| w[1] > w[0]));
    }
    check(violations.iter().all(|&v| v == 0), format!("violations {violations:?}"))?;
    Ok("0 violations in 6 x 1000 instances".into())
}

fn criterion_8() -> Outcome {
    let mut r = random::rng(8);
    let mut graphs = 0;
    while graphs < 50 {
        let k = r.gen_range(1..=3);
        let g = random::trivalent(&mut r, k);
        let alpha = random::lengths(&mut r, &g);
        let t = TrainTrack::singletons(g.clone()).unwrap();
        let w = random::weighted_track(&mut r, &t, &[0, 2, 2, 4]);
        if w.weights.iter().all(Zero::is_zero) {
            continue;
        }
        graphs += 1;
        let c = stitch_simple(&w).map_err(|e| e.to_string())?.curve;
        let m = alpha.min_length();
        let el = extremal_length(&c, &alpha).unwrap();
        let mut last: Option<Q> = None;
        for div in [4, 8, 16] {
            let eps = &m / Q::from_integer(div.into());
            let b = thickening_bounds(&g, &alpha, &c, &eps).map_err(|e| e.to_string())?;
            check(b.lower == el, "lower differs from EL")?;
            let ratio = &b.upper / &b.lower;
            check(ratio == thickening_factor(&eps, &m), "upper/lower is not 1 + 8 eps/m")?;
            check(b.annuli_area <= &eps * &el * thickening_factor(&eps, &m), "annuli area too large")?;
            if let Some(prev) = &last {
                check(&ratio < prev && ratio > Q::one(), "ratio not decreasing to 1")?;
            }
            last = Some(ratio);
        }
    }
    Ok("50 graphs x 3 thicknesses".into())
}

fn criterion_9() -> Outcome {
    let mut r = random::rng(9);
    let mut compared = 0;
    for i in 0..100 {
        let g = random::small_graph(&mut r);
        let t = random::track(&mut r, &g);
        let choices: &[u64] = if r.gen_bool(0.6) { &[0, 0, 2] } else { &[0, 2, 4] };
        let wt = random::weighted_track(&mut r, &t, choices);
        let w: Vec<u64> = wt.weights.iter().map(|x| x.to_u64().unwrap()).collect();
        let s = stitch_simple(&wt).map_err(|e| format!("track {i}: {e}"))?;
        check(s.curve.edge_counts(g.edge_count()) == w, format!("track {i}: counts"))?;
        check(check_witness(&g, &s), format!("track {i}: witness"))?;
        check(s.curve.is_empty() || is_simple(&g, &s.curve).is_ribbon(), format!("track {i}: not simple"))?;
        if w.iter().sum::<u64>() <= 8 {
            check(exhaustive_simple_curves(&t, &w).contains(&s.curve), format!("track {i}: oracle disagrees"))?;
            compared += 1;
        }
    }
    Ok(format!("100 tracks, {compared} checked exhaustively"))
}

fn criterion_10() -> Outcome {
    let budget = CertifyBudget::default();
    let mut notes = Vec::new();
    for f in ["theta", "rabbit15", "rabbit25"] {
        let v = fixture_endomorphism(f).unwrap();
        let Verdict::Certificate(c) = certify(&v, 3, &budget).verdict else {
            return Err(format!("{f}: no certificate"));
        };
        check(verify_certificate(&v, &c), format!("{f}: certificate does not verify"))?;
        let mut forged = c.clone();
        forged.emb_upper = &c.emb_upper / Q::from_integer(2.into());
        check(!verify_certificate(&v, &forged), format!("{f}: forged energy accepted"))?;
        let mut moved = c.clone();
        moved.n += 1;
        check(!verify_certificate(&v, &moved), format!("{f}: wrong level accepted"))?;
        notes.push(format!("{f} n={}", c.n));
    }
    Ok(format!("re-verified and forgeries rejected: {}", notes.join(", ")))
}

fn main() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(c)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match res {
            Ok(note) => println!("criterion {}: pass ({note})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
