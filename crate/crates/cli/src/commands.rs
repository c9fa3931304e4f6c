//! One report per subcommand, as text and as JSON.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value as Json};

use elastigraph::asymptotics::{asf_estimate, submult_audit};
use elastigraph::energy::{certify, sf_lower_bound, verify_certificate, Verdict};
use elastigraph::fixtures::{self, fixture_endomorphism};
use elastigraph::format::{format_rational, Workspace};
use elastigraph::graph::{Elastic, MultiCurve, RibbonGraph, Q};
use elastigraph::minimize::emb_minimize;
use elastigraph::obstruction::{
    analyze, check_p_obstruction, perron_eigenvalue, scan, ObstructionReport, PConformalMultiCurve, QValue,
};
use elastigraph::pl::{epp_evaluate, evaluate, EnergyKind, Exponent, PlMap, Value};
use elastigraph::ribbon::is_simple;
use elastigraph::spine::{critical_portrait, wreath_recursion};
use elastigraph::thicken::{build_thickening, thickening_bounds};
use elastigraph::traintrack::{stitch_simple, validate_weighted_tt, TrainTrack};
use elastigraph::vend::{validate_vend, Tower, VirtualEndomorphism};
use elastigraph::GraphMap;

use crate::budget::Budget;

/// Text and JSON forms of a report, with the process exit code.
pub struct Outcome {
    pub text: String,
    pub json: Json,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String, json: Json) -> Self {
        Outcome { text, json, code: 0 }
    }
}

/// Inputs shared by every subcommand.
pub struct Source {
    pub files: Vec<std::path::PathBuf>,
    pub fixture: Option<String>,
    pub vend: Option<String>,
}

impl Source {
    pub fn workspace(&self) -> Result<Workspace> {
        let mut ws = Workspace::default();
        if let Some(f) = &self.fixture {
            let text = fixtures::fixture_text(f)
                .ok_or_else(|| anyhow!("unknown fixture `{f}` (known: {})", fixtures::NAMES.join(", ")))?;
            ws.load(&text).with_context(|| format!("fixture `{f}`"))?;
        }
        for p in &self.files {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ws.load(&text).with_context(|| p.display().to_string())?;
        }
        Ok(ws)
    }

    fn vend_name(&self, ws: &Workspace) -> Result<String> {
        if let Some(v) = &self.vend {
            return Ok(v.clone());
        }
        if let Some(f) = self.fixture.as_deref().and_then(fixtures::fixture_vend) {
            return Ok(f);
        }
        match ws.vends.as_slice() {
            [one] => Ok(one.name.clone()),
            [] => bail!("no virtual endomorphism given (use --fixture or a file with a [vend] stanza)"),
            _ => bail!("several virtual endomorphisms; pick one with --vend"),
        }
    }

    pub fn endomorphism(&self, budget: &Budget) -> Result<(Workspace, VirtualEndomorphism)> {
        if self.files.is_empty() && self.vend.is_none() {
            if let Some(f) = &self.fixture {
                let v = fixture_endomorphism(f).ok_or_else(|| anyhow!("unknown fixture `{f}`"))?;
                return Ok((self.workspace()?, v));
            }
        }
        let ws = self.workspace()?;
        let name = self.vend_name(&ws)?;
        let v = validate_vend(&ws, &name, budget.ribbon)?;
        Ok((ws, v))
    }
}

fn qs(q: &Q) -> String {
    format_rational(q)
}

fn qf(q: &Q) -> f64 {
    Value::Exact(q.clone()).to_f64()
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Exact(q) => json!({ "exact": qs(q), "approx": qf(q) }),
        Value::Approx(x) => json!({ "approx": x }),
    }
}

fn exponent_text(p: Exponent) -> String {
    match p {
        Exponent::One => "1".into(),
        Exponent::Finite(x) => format!("{x}"),
        Exponent::Infinity => "inf".into(),
    }
}

fn parse_exponent(s: &str) -> Result<Exponent> {
    Exponent::parse(s).ok_or_else(|| anyhow!("bad exponent `{s}`: need 1, a number above 1, or inf"))
}

/// A named curve from the workspace, or a curve written out as words.
fn curve_arg(ws: &Workspace, g: &RibbonGraph, arg: &str) -> Result<MultiCurve> {
    if let Some(c) = ws.curve(arg) {
        return Ok(c.curve.clone());
    }
    MultiCurve::parse(g, arg).with_context(|| format!("`{arg}` is neither a named curve nor a curve on `{}`", g.name()))
}

pub fn fixtures_cmd(name: Option<&str>) -> Result<Outcome> {
    match name {
        None => {
            let text = fixtures::NAMES.iter().map(|n| format!("{n}\n")).collect();
            Ok(Outcome::ok(text, json!({ "fixtures": fixtures::NAMES })))
        }
        Some(n) => {
            let text = fixtures::fixture_text(n).ok_or_else(|| anyhow!("unknown fixture `{n}`"))?;
            Ok(Outcome::ok(text.clone(), json!({ "name": n, "text": text })))
        }
    }
}

pub fn validate(src: &Source, budget: &Budget) -> Result<Outcome> {
    let ws = src.workspace()?;
    let mut t = String::new();
    let mut graphs = Vec::new();
    for (name, g) in &ws.graphs {
        let gr = &g.graph;
        let faces = gr.faces().len();
        let _ = writeln!(
            t,
            "graph {name}: {} vertices, {} edges, {faces} faces, genus {}",
            gr.vertex_count(),
            gr.edge_count(),
            gr.genus()
        );
        graphs.push(json!({ "name": name, "vertices": gr.vertex_count(), "edges": gr.edge_count(), "faces": faces, "genus": gr.genus() }));
    }
    let mut maps = Vec::new();
    for m in &ws.maps {
        let _ = writeln!(t, "map {}: {} -> {}", m.name, m.from, m.to);
        maps.push(json!({ "name": m.name, "from": m.from, "to": m.to }));
    }
    let mut vends = Vec::new();
    for e in &ws.vends {
        let v = validate_vend(&ws, &e.name, budget.ribbon).with_context(|| format!("vend `{}`", e.name))?;
        let _ = writeln!(t, "vend {}: degree {}, {}", v.name, v.degree(), v.ribbon.label());
        if !v.rotation_matched_input {
            let _ = writeln!(t, "  note: rotation of {} replaced by the one pulled back along π", e.gamma1);
        }
        vends.push(json!({ "name": v.name, "degree": v.degree(), "ribbon": v.ribbon.label(), "rotation_matched_input": v.rotation_matched_input }));
    }
    let mut curves = Vec::new();
    for c in &ws.curves {
        let g = &ws.graph(&c.graph).ok_or_else(|| anyhow!("unknown graph `{}`", c.graph))?.graph;
        let verdict = is_simple(g, &c.curve);
        let _ = writeln!(t, "curve {} on {}: {} ({})", c.name, c.graph, c.curve.display(g), if verdict.is_ribbon() { "simple" } else { "not simple" });
        curves.push(json!({ "name": c.name, "graph": c.graph, "curve": c.curve.display(g), "simple": verdict.is_ribbon() }));
    }
    let mut tracks = Vec::new();
    for tr in &ws.tracks {
        let g = ws.graph(&tr.graph).ok_or_else(|| anyhow!("unknown graph `{}`", tr.graph))?.graph.clone();
        let track = TrainTrack::new(g.clone(), tr.gates.clone()).with_context(|| format!("train track on `{}`", tr.graph))?;
        let wt = validate_weighted_tt(&track, tr.weights.clone()).with_context(|| format!("train track on `{}`", tr.graph))?;
        let _ = write!(t, "traintrack on {}: valid, {} equality gates", tr.graph, wt.equalities.len());
        let stitched = stitch_simple(&wt).ok().map(|s| s.curve.display(&g));
        match &stitched {
            Some(c) => {
                let _ = writeln!(t, ", stitches to {c}");
            }
            None => {
                let _ = writeln!(t);
            }
        }
        tracks.push(json!({ "graph": tr.graph, "equalities": wt.equalities.len(), "stitched": stitched }));
    }
    let json = json!({ "graphs": graphs, "maps": maps, "vends": vends, "curves": curves, "traintracks": tracks });
    Ok(Outcome::ok(t, json))
}

fn energy_block(t: &mut String, phi: &GraphMap, a_s: &Elastic, a_t: &Elastic, p: Exponent, budget: &Budget) -> Json {
    let cs = PlMap::constant_speed(phi, a_s, a_t);
    let emb_cs = evaluate(&cs, EnergyKind::Emb).value;
    let epp_cs = epp_evaluate(&cs, p).value;
    let lip_cs = evaluate(&cs, EnergyKind::Lip).value;
    let b = &budget.certify;
    let lower = sf_lower_bound(phi, a_s, a_t, b.max_len, b.max_components, None);
    let best = emb_minimize(phi, a_s, a_t, &b.minimize);
    let epp_best = epp_evaluate(&best.map, p).value;
    let src = phi.source();
    let ps = exponent_text(p);
    let _ = writeln!(t, "constant speed: Emb {emb_cs}, E^{ps}_{ps} {epp_cs}, Lip {lip_cs}");
    let _ = writeln!(t, "SF lower bound: {} from {} ({} curves tried)", Value::Exact(lower.value.clone()), lower.witness.display(src), lower.tried);
    let _ = writeln!(
        t,
        "Emb upper bound: {} on a grid of {} ({} evaluations{})",
        Value::Exact(best.value.clone()),
        best.grid,
        best.evaluations,
        if best.exhausted { ", budget exhausted" } else { "" }
    );
    let _ = writeln!(t, "E^{ps}_{ps} of the minimizer: {epp_best}");
    json!({
        "p": ps,
        "constant_speed": { "emb": value_json(&emb_cs), "epp": value_json(&epp_cs), "lip": value_json(&lip_cs) },
        "sf_lower": { "value": qs(&lower.value), "witness": lower.witness.display(src), "tried": lower.tried },
        "emb_upper": { "value": qs(&best.value), "grid": best.grid, "evaluations": best.evaluations, "exhausted": best.exhausted },
        "epp_minimizer": value_json(&epp_best),
    })
}

pub fn energy(src: &Source, map: Option<&str>, level: usize, p: &str, budget: &Budget) -> Result<Outcome> {
    let p = parse_exponent(p)?;
    let mut t = String::new();
    if let Some(name) = map {
        let ws = src.workspace()?;
        let m = ws.map(name).ok_or_else(|| anyhow!("unknown map `{name}`"))?;
        let a_s = &ws.graph(&m.from).ok_or_else(|| anyhow!("unknown graph `{}`", m.from))?.alpha;
        let a_t = &ws.graph(&m.to).ok_or_else(|| anyhow!("unknown graph `{}`", m.to))?.alpha;
        let _ = writeln!(t, "map {name}: {} -> {}", m.from, m.to);
        let j = energy_block(&mut t, &m.map, a_s, a_t, p, budget);
        return Ok(Outcome::ok(t, json!({ "map": name, "energy": j })));
    }
    let (_, v) = src.endomorphism(budget)?;
    if level == 0 {
        bail!("--level must be at least 1");
    }
    let mut tower = Tower::new(&v, budget.certify.tower_cap);
    tower.extend_to(level)?;
    let l = tower.level(level);
    let _ = writeln!(t, "{} level {level}: {} edges over {}", v.name, l.graph.edge_count(), v.gamma0.graph.name());
    let j = energy_block(&mut t, &l.phi, &l.alpha, &tower.level(0).alpha, p, budget);
    Ok(Outcome::ok(t, json!({ "vend": v.name, "level": level, "energy": j })))
}

fn obstruction_text(t: &mut String, v: &VirtualEndomorphism, r: &ObstructionReport) -> Json {
    let g = &v.gamma0.graph;
    let _ = writeln!(t, "curve: {}", r.curve.display(g));
    let exact = r.matrix.exact(2);
    let _ = writeln!(t, "M^2:");
    for row in &exact {
        let _ = writeln!(t, "  [{}]", row.iter().map(qs).collect::<Vec<_>>().join(" "));
    }
    let _ = writeln!(t, "lambda(M^{}) = {:.12} in [{:.12}, {:.12}]", exponent_text(r.p), r.lambda.value(), r.lambda.lower, r.lambda.upper);
    let _ = writeln!(t, "lambda(M^2) >= 1 exactly: {}", r.exact_at_least_one);
    let q = match &r.q {
        QValue::At(x) => format!("{x:.9}"),
        QValue::AlwaysOne => "lambda = 1 for every p".into(),
        QValue::NeverOne => "lambda(M^1) < 1".into(),
        QValue::AboveRange => format!("lambda > 1 up to p = {}", elastigraph::obstruction::Q_SEARCH_LIMIT),
    };
    let _ = writeln!(t, "Q: {q}");
    let inv = &r.invariance;
    let _ = writeln!(
        t,
        "invariance: forwards {}, backwards {}, totally {}, irreducible {}",
        inv.forwards, inv.back, inv.totally, inv.irreducible
    );
    json!({
        "curve": r.curve.display(g),
        "matrix_p2": exact.iter().map(|row| row.iter().map(qs).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "p": exponent_text(r.p),
        "lambda": { "value": r.lambda.value(), "lower": r.lambda.lower, "upper": r.lambda.upper },
        "exact_at_least_one": r.exact_at_least_one,
        "q": q,
        "invariance": { "forwards": inv.forwards, "back": inv.back, "totally": inv.totally, "irreducible": inv.irreducible },
    })
}

pub fn certify_cmd(src: &Source, max_n: usize, budget: &Budget) -> Result<Outcome> {
    let (_, v) = src.endomorphism(budget)?;
    let r = certify(&v, max_n, &budget.certify);
    let mut t = String::new();
    for w in &r.warnings {
        let _ = writeln!(t, "warning: {w}");
    }
    let mut rows = Vec::new();
    for b in &r.table {
        let _ = writeln!(
            t,
            "n = {}: SF lower {}, Emb upper {}",
            b.n,
            Value::Exact(b.sf_lower.value.clone()),
            Value::Exact(b.emb_upper.value.clone())
        );
        rows.push(json!({ "n": b.n, "sf_lower": qs(&b.sf_lower.value), "emb_upper": qs(&b.emb_upper.value) }));
    }
    let (verdict, detail, code) = match &r.verdict {
        Verdict::Certificate(c) => {
            let verified = verify_certificate(&v, c);
            let _ = writeln!(t, "certificate at n = {}: Emb = {} < 1", c.n, qs(&c.emb_upper));
            let _ = writeln!(t, "margin: {}", Value::Exact(c.margin()));
            let _ = writeln!(t, "verified: {}", if verified { "yes" } else { "NO" });
            let j = json!({
                "n": c.n,
                "emb_upper": qs(&c.emb_upper),
                "margin": qs(&c.margin()),
                "margin_approx": qf(&c.margin()),
                "sf_lower": qs(&c.sf_lower),
                "verified": verified,
            });
            ("certificate", j, if verified { 0 } else { 1 })
        }
        Verdict::Obstruction(o) => {
            let _ = writeln!(t, "obstruction found");
            let j = obstruction_text(&mut t, &v, o);
            ("obstruction", j, 2)
        }
        Verdict::Inconclusive => {
            let _ = writeln!(t, "inconclusive up to n = {max_n}");
            ("inconclusive", Json::Null, 0)
        }
    };
    let json = json!({ "vend": v.name, "verdict": verdict, "levels": rows, "detail": detail, "warnings": r.warnings });
    Ok(Outcome { text: t, json, code })
}

pub fn asf(src: &Source, max_n: usize, p: &str, audit: bool, budget: &Budget) -> Result<Outcome> {
    let p = parse_exponent(p)?;
    let (_, v) = src.endomorphism(budget)?;
    let b = &budget.certify;
    let table = asf_estimate(&v, max_n, &b.minimize, b.max_len, p, b.tower_cap)?;
    let mut t = String::new();
    let ps = exponent_text(p);
    let mut rows = Vec::new();
    for r in &table.rows {
        let _ = writeln!(
            t,
            "n = {}: lower {} upper {}  roots {:.9} .. {:.9}",
            r.n,
            Value::Exact(r.lower.clone()),
            r.upper,
            r.lower_root,
            r.upper_root
        );
        rows.push(json!({ "n": r.n, "lower": qs(&r.lower), "upper": value_json(&r.upper), "lower_root": r.lower_root, "upper_root": r.upper_root }));
    }
    match table.asf_upper {
        Some(x) => {
            let _ = writeln!(t, "asymptotic E^{ps}_{ps} upper bound: {x:.9}");
        }
        None => {
            let _ = writeln!(t, "no levels computed");
        }
    }
    let _ = writeln!(t, "some level below 1: {}", table.below_one);
    let mut audit_json = Json::Null;
    if audit {
        let items = submult_audit(&v, max_n, &b.minimize, b.tower_cap)?;
        let mut list = Vec::new();
        for i in &items {
            let _ = writeln!(
                t,
                "audit n = {} k = {}: {} {} vs {} {}",
                i.n,
                i.k,
                i.relation,
                qs(&i.lhs),
                qs(&i.rhs),
                if i.holds { "holds" } else { "FAILS" }
            );
            list.push(json!({ "n": i.n, "k": i.k, "relation": i.relation, "lhs": qs(&i.lhs), "rhs": qs(&i.rhs), "holds": i.holds }));
        }
        audit_json = Json::Array(list);
    }
    let json = json!({ "vend": v.name, "p": ps, "rows": rows, "asf_upper": table.asf_upper, "below_one": table.below_one, "audit": audit_json });
    Ok(Outcome::ok(t, json))
}

pub fn obstruct(src: &Source, curve: Option<&str>, scan_len: Option<usize>, p: &str, budget: &Budget) -> Result<Outcome> {
    let p = parse_exponent(p)?;
    let (ws, v) = src.endomorphism(budget)?;
    let mut t = String::new();
    let report = match curve {
        Some(c) => Some(analyze(&v, &curve_arg(&ws, &v.gamma0.graph, c)?, p)),
        None => {
            let len = scan_len.unwrap_or(budget.certify.scan_len);
            let r = scan(&v, len, budget.certify.scan_cap);
            if r.is_none() {
                let _ = writeln!(t, "no obstruction among simple curves up to length {len}");
            }
            r
        }
    };
    let Some(r) = report else {
        return Ok(Outcome::ok(t, json!({ "vend": v.name, "obstruction": Json::Null })));
    };
    let mut j = obstruction_text(&mut t, &v, &r);
    if r.matrix.is_forward_invariant() && !r.curve.is_empty() {
        // unit lengths first; otherwise conductances from the Perron vector
        let n = r.curve.len();
        let unit = PConformalMultiCurve { support: r.curve.clone(), p, lengths: vec![Value::Exact(Q::from_integer(1.into())); n] };
        let mut chk = check_p_obstruction(&v, &unit)?;
        if !chk.obstruction {
            let m = r.matrix.at(p);
            let mt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| m[k][i]).collect()).collect();
            if let Some(vec) = perron_eigenvalue(&mt).vector.filter(|x| x.iter().all(|y| *y > 0.0)) {
                let gamma: Vec<Value> = vec.into_iter().map(Value::Approx).collect();
                chk = check_p_obstruction(&v, &PConformalMultiCurve::from_conductances(r.curve.clone(), p, &gamma))?;
            }
        }
        let _ = writeln!(t, "p-obstruction at p = {}: {} (energy {})", exponent_text(p), chk.obstruction, chk.energy);
        j["p_obstruction"] = json!({ "obstruction": chk.obstruction, "energy": value_json(&chk.energy) });
    } else {
        let _ = writeln!(t, "not forwards invariant: no p-obstruction check");
    }
    Ok(Outcome::ok(t, json!({ "vend": v.name, "obstruction": j })))
}

pub fn thicken(
    src: &Source,
    graph: Option<&str>,
    curve: Option<&str>,
    eps: Option<&str>,
    table: bool,
    budget: &Budget,
) -> Result<Outcome> {
    let (ws, g, alpha) = match graph {
        Some(name) => {
            let ws = src.workspace()?;
            let e = ws.graph(name).ok_or_else(|| anyhow!("unknown graph `{name}`"))?;
            let (g, a) = (e.graph.clone(), e.alpha.clone());
            (ws, g, a)
        }
        None => {
            let (ws, v) = src.endomorphism(budget)?;
            (ws, v.gamma0.graph.clone(), v.gamma0.alpha.clone())
        }
    };
    let m = alpha.min_length();
    let eps = match eps {
        Some(s) => elastigraph::format::parse_rational(s).ok_or_else(|| anyhow!("bad thickness `{s}`"))?,
        None => &m / Q::from_integer(4.into()),
    };
    let cx = build_thickening(&g, &alpha, &eps)?;
    let mut t = String::new();
    let _ = writeln!(t, "{}: {} rectangles, area {}, eps {}", g.name(), cx.rectangles.len(), qs(&cx.area()), qs(&eps));
    let _ = writeln!(t, "boundary circles: {}", cx.boundary.len());
    for b in &cx.boundary {
        let _ = writeln!(t, "  {}", g.word_name(b));
    }
    let mut j = json!({
        "graph": g.name(),
        "eps": qs(&eps),
        "area": qs(&cx.area()),
        "boundary": cx.boundary.iter().map(|b| g.word_name(b)).collect::<Vec<_>>(),
    });
    if let Some(c) = curve {
        let c = curve_arg(&ws, &g, c)?;
        let b = thickening_bounds(&g, &alpha, &c, &eps)?;
        let _ = writeln!(t, "curve: {}", c.display(&g));
        let _ = writeln!(t, "EL on the graph: {}", qs(&b.el_graph));
        let _ = writeln!(t, "bounds on eps*EL: lower {} upper {} (factor {})", qs(&b.lower), qs(&b.upper), qs(&b.factor()));
        let _ = writeln!(t, "annuli area: {} <= {}", qs(&b.annuli_area), qs(&(&eps * &b.upper)));
        j["bounds"] = json!({
            "curve": c.display(&g),
            "el_graph": qs(&b.el_graph),
            "lower": qs(&b.lower),
            "upper": qs(&b.upper),
            "factor": qs(&b.factor()),
            "annuli_area": qs(&b.annuli_area),
            "m": qs(&b.m),
        });
    }
    if table {
        t.push_str(&cx.gluing_table());
        j["gluing_table"] = json!(cx.gluing_table());
    }
    Ok(Outcome::ok(t, j))
}

pub fn automaton(src: &Source, budget: &Budget) -> Result<Outcome> {
    let (_, v) = src.endomorphism(budget)?;
    let a = wreath_recursion(&v)?;
    let mut t = String::new();
    for r in a.rules() {
        let _ = writeln!(t, "{r}");
    }
    let _ = writeln!(t, "\n{:>6} {}", "", (0..a.letters()).map(|i| format!("{i:>10}")).collect::<String>());
    for (x, row) in a.transitions.iter().enumerate() {
        let cells: String = row
            .iter()
            .map(|(j, u)| format!("{:>10}", format!("{j}:{}", if u.is_empty() { "1".into() } else { a.word_text(u) })))
            .collect();
        let _ = writeln!(t, "{:>6} {cells}", a.generators[x]);
    }
    let _ = writeln!(t, "peripheral: {}", a.peripheral_words().join(", "));
    let _ = writeln!(t, "permutational: {}", a.is_permutational());
    let json = json!({
        "vend": v.name,
        "generators": a.generators,
        "letters": a.letters(),
        "rules": a.rules(),
        "peripheral": a.peripheral_words(),
        "permutational": a.is_permutational(),
    });
    Ok(Outcome::ok(t, json))
}

pub fn portrait(src: &Source, budget: &Budget) -> Result<Outcome> {
    let (_, v) = src.endomorphism(budget)?;
    let p = critical_portrait(&v)?;
    let mut t = String::new();
    for l in p.lines() {
        let _ = writeln!(t, "{l}");
    }
    let cycles: Vec<Vec<String>> = p.cycles().iter().map(|c| c.iter().map(|&i| p.points[i].clone()).collect()).collect();
    for c in &cycles {
        let _ = writeln!(t, "cycle: {}", c.join(" "));
    }
    let _ = writeln!(t, "points: {}", p.points.len());
    let _ = writeln!(t, "hyperbolic type: {}", p.hyperbolic_type);
    let _ = writeln!(t, "non-compact type: {}", p.non_compact_type);
    let json = json!({
        "vend": v.name,
        "points": p.points,
        "arrows": p.arrows.iter().map(|&(a, b, d)| json!({ "from": p.points[a], "to": p.points[b], "degree": d })).collect::<Vec<_>>(),
        "cycles": cycles,
        "hyperbolic_type": p.hyperbolic_type,
        "non_compact_type": p.non_compact_type,
        "branching": p.branching,
    });
    Ok(Outcome::ok(t, json))
}
