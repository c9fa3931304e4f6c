use elastigraph::graph::extremal_length;
use elastigraph::maps::{pull_lengths, pullback_curve};
use elastigraph::pl::{emb, evaluate, lift, EnergyKind, Exponent, Image, PlMap};
use elastigraph::random::{self, Rand};
use num::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

fn instance(r: &mut Rand, wiggle: bool) -> PlMap {
    let g = random::small_graph(r);
    let h = random::small_graph(r);
    let m = random::graph_map(r, &g, &h, 3);
    let (a, b) = (random::lengths(r, &g), random::lengths(r, &h));
    random::pl_map(r, &m, &a, &b, wiggle)
}

/// Density at target point `x` of edge `e`, by scanning every piece.
fn density_at(psi: &PlMap, e: usize, x: f64, kind: EnergyKind) -> f64 {
    let speeds: Vec<f64> = psi
        .pieces
        .iter()
        .flatten()
        .filter_map(|p| match &p.image {
            Image::Segment { edge, from, to } if *edge == e => {
                let (a, b) = (from.to_f64().unwrap(), to.to_f64().unwrap());
                (a.min(b) < x && x < a.max(b)).then(|| p.speed().to_f64().unwrap())
            }
            _ => None,
        })
        .collect();
    match kind {
        EnergyKind::Emb => speeds.iter().sum(),
        EnergyKind::Epp(Exponent::Finite(p)) => speeds.iter().map(|s| s.powf(p - 1.0)).sum::<f64>().powf(1.0 / p),
        _ => speeds.iter().cloned().fold(0.0, f64::max),
    }
}

/// Sup of the density over points just inside every elementary interval and
/// over random points.
fn sampled(psi: &PlMap, kind: EnergyKind, r: &mut Rand) -> f64 {
    let mut best = 0.0f64;
    for e in 0..psi.target.edge_count() {
        let len = psi.alpha_t.alpha(e).to_f64().unwrap();
        let mut probes: Vec<f64> = psi
            .pieces
            .iter()
            .flatten()
            .filter_map(|p| match &p.image {
                Image::Segment { edge, from, to } if *edge == e => Some([from.to_f64().unwrap(), to.to_f64().unwrap()]),
                _ => None,
            })
            .flatten()
            .flat_map(|c| [c - 1e-9, c + 1e-9])
            .filter(|&x| x > 0.0 && x < len)
            .collect();
        probes.extend((0..64).map(|_| r.gen::<f64>() * len));
        for x in probes {
            best = best.max(density_at(psi, e, x, kind));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn embedding_energy_is_cover_invariant(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let psi = instance(&mut r, true);
        let d = r.gen_range(2..=3);
        let pi = random::cover(&mut r, &psi.target, d);
        let (up, proj) = lift(&psi, &pi).unwrap();
        prop_assert!(up.validate().is_ok());
        prop_assert_eq!(proj.degree(), d);
        prop_assert_eq!(emb(&up), emb(&psi));
    }

    #[test]
    fn extremal_length_scales_by_degree(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let g = random::small_graph(&mut r);
        let alpha = random::lengths(&mut r, &g);
        let c = random::curve(&mut r, &g, 5, 3);
        let d = r.gen_range(2..=4);
        let pi = random::cover(&mut r, &g, d);
        let up = pullback_curve(&pi, &c);
        let el = extremal_length(&c, &alpha).unwrap();
        let el_up = extremal_length(&up, &pull_lengths(&pi, &alpha)).unwrap();
        prop_assert_eq!(el_up, el * elastigraph::Q::from_integer(d.into()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sweep_matches_sampling(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let psi = instance(&mut r, true);
        for kind in [EnergyKind::Emb, EnergyKind::Epp(Exponent::Finite(3.0)), EnergyKind::Epp(Exponent::Infinity)] {
            let exact = evaluate(&psi, kind).value.to_f64();
            let probe = sampled(&psi, kind, &mut r);
            prop_assert!((exact - probe).abs() <= 1e-6, "{:?}: sweep {} sampling {}", kind, exact, probe);
        }
    }
}

#[test]
fn lift_of_identity_is_identity_energy() {
    let mut r = random::rng(11);
    let g = random::graph(&mut r, 2, 1);
    let a = random::lengths(&mut r, &g);
    let id = elastigraph::pl::identity(&g, &a);
    let pi = random::cover(&mut r, &g, 3);
    let (up, _) = lift(&id, &pi).unwrap();
    assert_eq!(emb(&up), elastigraph::Q::from_integer(1.into()));
}
