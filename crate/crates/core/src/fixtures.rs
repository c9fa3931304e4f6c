//! Built-in example virtual endomorphisms.

use std::fmt::Write as _;

use crate::format::Workspace;

pub const NAMES: [&str; 5] = ["theta", "rabbit15", "rabbit25", "loop-doubling", "obstructed-k2d2"];

/// `f(z) = (1+z²)/(1−z²)` on the sphere marked at `0, 1, −1, ∞`. The theta
/// graph has `s` below and `t` above the real axis; `a, c, b` run left to
/// right and `c` crosses the real axis between `−1` and `1`.
pub const THETA: &str = "\
[graph theta0]
vertex s rotation: b c a
vertex t rotation: ~a ~c ~b
edge a s t length 1
edge b s t length 1
edge c s t length 1
face -1: a ~c
face inf: b ~a
face 1: c ~b

[graph theta1]
vertex s0 rotation: b0 c1 a0
vertex s1 rotation: b1 c0 a1
vertex t0 rotation: ~a0 ~c0 ~b0
vertex t1 rotation: ~a1 ~c1 ~b1
edge a0 s0 t0 length 1
edge b0 s0 t0 length 1
edge a1 s1 t1 length 1
edge b1 s1 t1 length 1
edge c0 s1 t0 length 1
edge c1 s0 t1 length 1
face 0: c0 ~b0 c1 ~b1

[map theta-pi from theta1 to theta0]
vertex s0 -> s
vertex s1 -> s
vertex t0 -> t
vertex t1 -> t
edge a0 -> a
edge b0 -> b
edge a1 -> a
edge b1 -> b
edge c0 -> c
edge c1 -> c

[map theta-phi from theta1 to theta0]
vertex s0 -> s
vertex s1 -> t
vertex t0 -> t
vertex t1 -> s
edge a0 -> b
edge b0 -> c
edge a1 -> ~a
edge b1 -> ~c
edge c0 -> .
edge c1 -> .

[vend theta theta0 theta1 theta-pi theta-phi]
tree c
";

/// `z ↦ z²` on the sphere marked at `0, ∞`.
pub const LOOP_DOUBLING: &str = "\
[graph loop0]
vertex o rotation: a ~a
edge a o o length 1
face 0: a
face inf: ~a

[graph loop1]
vertex o0 rotation: a0 ~a1
vertex o1 rotation: a1 ~a0
edge a0 o0 o1 length 1
edge a1 o1 o0 length 1

[map loop-pi from loop1 to loop0]
vertex o0 -> o
vertex o1 -> o
edge a0 -> a
edge a1 -> a

[map loop-phi from loop1 to loop0]
vertex o0 -> o
vertex o1 -> o
edge a0 -> .
edge a1 -> a

[vend loop-doubling loop0 loop1 loop-pi loop-phi]
";

/// Period-five rabbit with rotation number `p/5`: a five-petal rose around
/// the cycle of marked points, petals ordered by angle `2πip/5`. The graph
/// data of `π` and `φ` does not depend on `p`; only the rotation does.
/// Petal lengths grow along the cycle so that every peripheral loop
/// shortens under one step; with equal lengths the loops around the
/// non-critical points keep ratio 1 until the fifth iterate.
const PETAL: [u32; 5] = [9, 5, 6, 7, 8];

pub fn rabbit(p: usize) -> String {
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..5).collect();
        o.sort_by_key(|&i| (i * p) % 5);
        o
    };
    let name = format!("rabbit{p}5");
    let mut s = format!("[graph {name}-0]\nvertex x rotation:");
    for &i in &order {
        let _ = write!(s, " l{i} ~l{i}");
    }
    s.push('\n');
    for i in 0..5 {
        let _ = writeln!(s, "edge l{i} x x length {}", PETAL[i]);
    }
    for i in 0..5 {
        let _ = writeln!(s, "face x{i}: ~l{i}");
    }
    let outer: Vec<String> = order.iter().map(|i| format!("l{i}")).collect();
    let _ = writeln!(s, "face inf: {}", outer.join(" "));
    // Γ1: loops L1..L4 at y, M1..M4 at z, and e: y→z, f: z→y
    let _ = writeln!(s, "\n[graph {name}-1]");
    let _ = writeln!(s, "vertex y rotation: {}", lift_rotation(&order, 'L', "e", "~f"));
    let _ = writeln!(s, "vertex z rotation: {}", lift_rotation(&order, 'M', "f", "~e"));
    for j in 1..5 {
        let _ = writeln!(s, "edge L{j} y y length 1");
    }
    for j in 1..5 {
        let _ = writeln!(s, "edge M{j} z z length 1");
    }
    let _ = writeln!(s, "edge e y z length 1\nedge f z y length 1");
    let _ = writeln!(s, "\n[map {name}-pi from {name}-1 to {name}-0]\nvertex y -> x\nvertex z -> x");
    for j in 1..5 {
        let _ = writeln!(s, "edge L{j} -> l{}\nedge M{j} -> l{}", (j + 1) % 5, (j + 1) % 5);
    }
    let _ = writeln!(s, "edge e -> l1\nedge f -> l1");
    let _ = writeln!(s, "\n[map {name}-phi from {name}-1 to {name}-0]\nvertex y -> x\nvertex z -> x");
    for j in 1..5 {
        let _ = writeln!(s, "edge L{j} -> l{j}\nedge M{j} -> .");
    }
    let _ = writeln!(s, "edge e -> l0\nedge f -> .");
    let _ = writeln!(s, "\n[vend {name} {name}-0 {name}-1 {name}-pi {name}-phi]");
    s
}

/// Rotation of a lift of the rose: petal `l_i` lifts to the loop labelled
/// `i − 1`, except `l1` whose two half-edges lift to `out` and `back`.
fn lift_rotation(order: &[usize], loops: char, out: &str, back: &str) -> String {
    let mut parts = Vec::new();
    for &i in order {
        if i == 1 {
            parts.push(out.to_string());
            parts.push(back.to_string());
        } else {
            let j = (i + 4) % 5;
            parts.push(format!("{loops}{j}"));
            parts.push(format!("~{loops}{j}"));
        }
    }
    parts.join(" ")
}

/// Vertex and edge orbits of the half-integer grid of mesh `(1/nx, 1/ny)`
/// on the torus `R²/(2Z)²` modulo `z ↦ −z`.
struct Pillow {
    nx: i64,
    ny: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    H,
    V,
}

impl Pillow {
    fn wrap(&self, i: i64, j: i64) -> (i64, i64) {
        (i.rem_euclid(2 * self.nx), j.rem_euclid(2 * self.ny))
    }

    fn vertex_rep(&self, i: i64, j: i64) -> (i64, i64) {
        let a = self.wrap(i, j);
        let b = self.wrap(-i - 1, -j - 1);
        a.min(b)
    }

    /// Orbit representative and whether the given edge agrees with it.
    fn edge_rep(&self, d: Dir, i: i64, j: i64) -> ((Dir, i64, i64), bool) {
        let (i, j) = self.wrap(i, j);
        let (pi, pj) = match d {
            Dir::H => self.wrap(-i - 2, -j - 1),
            Dir::V => self.wrap(-i - 1, -j - 2),
        };
        if (d, i, j) <= (d, pi, pj) {
            ((d, i, j), true)
        } else {
            ((d, pi, pj), false)
        }
    }

    fn vname(&self, (i, j): (i64, i64)) -> String {
        format!("p{i}_{j}")
    }

    fn dart(&self, d: Dir, i: i64, j: i64, forward: bool) -> String {
        let ((d, i, j), same) = self.edge_rep(d, i, j);
        let tag = if d == Dir::H { 'h' } else { 'v' };
        let fwd = forward == same;
        format!("{}{tag}{i}_{j}", if fwd { "" } else { "~" })
    }

    fn vertices(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for i in 0..2 * self.nx {
            for j in 0..2 * self.ny {
                if self.vertex_rep(i, j) == (i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn edges(&self) -> Vec<(Dir, i64, i64)> {
        let mut out = Vec::new();
        for d in [Dir::H, Dir::V] {
            for i in 0..2 * self.nx {
                for j in 0..2 * self.ny {
                    if self.edge_rep(d, i, j) == ((d, i, j), true) {
                        out.push((d, i, j));
                    }
                }
            }
        }
        out
    }

    fn stanza(&self, name: &str, with_faces: bool) -> String {
        let mut s = format!("[graph {name}]\n");
        for (i, j) in self.vertices() {
            let rot = [
                self.dart(Dir::H, i, j, true),
                self.dart(Dir::V, i, j, true),
                self.dart(Dir::H, i - 1, j, false),
                self.dart(Dir::V, i, j - 1, false),
            ];
            let _ = writeln!(s, "vertex {} rotation: {}", self.vname((i, j)), rot.join(" "));
        }
        for (d, i, j) in self.edges() {
            let end = match d {
                Dir::H => self.vertex_rep(i + 1, j),
                Dir::V => self.vertex_rep(i, j + 1),
            };
            let _ = writeln!(
                s,
                "edge {} {} {} length 1",
                self.dart(d, i, j, true),
                self.vname(self.vertex_rep(i, j)),
                self.vname(end)
            );
        }
        if with_faces {
            // the cell around a cone point (m, n) is walked clockwise; negation
            // swaps its two halves, so one half is the whole face
            for (label, m, n) in [("c00", 0, 0), ("c10", 1, 0), ("c01", 0, 1), ("c11", 1, 1)] {
                let w = [self.dart(Dir::V, m - 1, n - 1, true), self.dart(Dir::H, m - 1, n, true)];
                let _ = writeln!(s, "face {label}: {}", w.join(" "));
            }
        }
        s
    }
}

/// Lattès-type map `(x, y) ↦ (d x, k y)` on the pillowcase sphere marked at
/// its four cone points. Γ0 is the half-integer grid, Γ1 its preimage, and
/// `φ` sends each Γ1 vertex to the grid vertex of its unit cell and each Γ1
/// edge to the grid edges dual to the integer lines it crosses.
pub fn lattes(d: i64, k: i64) -> String {
    let name = format!("lattes-k{k}d{d}");
    let g0 = Pillow { nx: 1, ny: 1 };
    let g1 = Pillow { nx: d, ny: k };
    let mut s = g0.stanza(&format!("{name}-0"), true);
    s.push('\n');
    s.push_str(&g1.stanza(&format!("{name}-1"), false));
    let verts = g1.vertices();
    let edges = g1.edges();
    let cell = |num: i64, den: i64| (2 * num + 1).div_euclid(2 * den);
    for which in ["pi", "phi"] {
        let _ = writeln!(s, "\n[map {name}-{which} from {name}-1 to {name}-0]");
        for &(i, j) in &verts {
            let img = if which == "pi" { g0.vertex_rep(i, j) } else { g0.vertex_rep(cell(i, d), cell(j, k)) };
            let _ = writeln!(s, "vertex {} -> {}", g1.vname((i, j)), g0.vname(img));
        }
        for &(dir, i, j) in &edges {
            let img = if which == "pi" {
                g0.dart(dir, i, j, true)
            } else {
                match dir {
                    Dir::H => {
                        let (a, b) = (cell(i, d), cell(i + 1, d));
                        if a == b { ".".into() } else { g0.dart(Dir::H, a, cell(j, k), true) }
                    }
                    Dir::V => {
                        let (a, b) = (cell(j, k), cell(j + 1, k));
                        if a == b { ".".into() } else { g0.dart(Dir::V, cell(i, d), a, true) }
                    }
                }
            };
            let _ = writeln!(s, "edge {} -> {img}", g1.dart(dir, i, j, true));
        }
    }
    let _ = writeln!(s, "\n[vend {name} {name}-0 {name}-1 {name}-pi {name}-phi]");
    let _ = writeln!(s, "\n[curves {name}-0]\ncurve horizontal: {} {}", g0.dart(Dir::H, 0, 0, true), g0.dart(Dir::H, 1, 0, true));
    s
}

/// Source text of a named fixture.
pub fn fixture_text(name: &str) -> Option<String> {
    match name {
        "theta" => Some(THETA.to_string()),
        "rabbit15" => Some(rabbit(1)),
        "rabbit25" => Some(rabbit(2)),
        "loop-doubling" => Some(LOOP_DOUBLING.to_string()),
        "obstructed-k2d2" => Some(lattes(2, 2)),
        _ => None,
    }
}

/// Name of the virtual endomorphism a fixture defines.
pub fn fixture_vend(name: &str) -> Option<String> {
    match name {
        "theta" | "loop-doubling" | "rabbit15" | "rabbit25" => Some(name.to_string()),
        "obstructed-k2d2" => Some("lattes-k2d2".to_string()),
        _ => None,
    }
}

pub fn load_fixture(name: &str) -> Option<Workspace> {
    fixture_text(name).map(|t| Workspace::parse(&t).expect("fixtures parse"))
}

/// Loads and validates a fixture's virtual endomorphism.
pub fn fixture_endomorphism(name: &str) -> Option<crate::vend::VirtualEndomorphism> {
    let ws = load_fixture(name)?;
    let v = crate::vend::validate_vend(&ws, &fixture_vend(name)?, crate::ribbon::DEFAULT_BUDGET);
    Some(v.expect("fixtures validate"))
}
