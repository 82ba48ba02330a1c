//! Two-layer Manhattan routing of bit permutations.
//!
//! Coordinates are exact rationals. Input terminals sit on row `y = 0`,
//! output terminals on row `y = N + 1`, and net `i` owns the horizontal
//! track `y = i + 1`. Within unit column `j`, input stubs run at
//! `x = j + 1/4` and output stubs at `x = j + 1/2`. Layer 1 carries
//! vertical segments and layer 2 horizontal ones.

use std::fmt;
use std::fmt::Write as _;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoutingError {
    #[error("not a permutation: {0}")]
    NotBijective(String),
    #[error("malformed plan: {0}")]
    Malformed(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BitPermutation {
    map: Vec<usize>,
}

impl BitPermutation {
    /// Bit `i` moves to position `map[i]`.
    pub fn new(map: Vec<usize>) -> Result<Self, RoutingError> {
        if map.is_empty() {
            return Err(RoutingError::NotBijective("empty".into()));
        }
        let mut seen = vec![false; map.len()];
        for (i, &p) in map.iter().enumerate() {
            if p >= map.len() || std::mem::replace(&mut seen[p], true) {
                return Err(RoutingError::NotBijective(format!("P({i}) = {p}")));
            }
        }
        Ok(BitPermutation { map })
    }

    pub fn identity(n: usize) -> Self {
        BitPermutation { map: (0..n).collect() }
    }

    /// The 64-bit PRESENT layer: `P(i) = 16i mod 63`, `P(63) = 63`.
    pub fn present() -> Self {
        Self::present_like(64)
    }

    /// The 16-bit small-present layer: `P(i) = 4i mod 15`, `P(15) = 15`.
    pub fn present16() -> Self {
        Self::present_like(16)
    }

    fn present_like(n: usize) -> Self {
        let step = n / 4;
        let map = (0..n).map(|i| if i == n - 1 { i } else { i * step % (n - 1) }).collect();
        BitPermutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    /// Pairs `i < j` with `P(i) > P(j)`, by a Fenwick tree over outputs.
    pub fn inversions(&self) -> u64 {
        let n = self.map.len();
        let mut tree = vec![0u64; n + 1];
        let mut inv = 0u64;
        for (seen, &p) in self.map.iter().enumerate() {
            // Earlier entries with value <= p.
            let mut k = p + 1;
            let mut le = 0;
            while k > 0 {
                le += tree[k];
                k &= k - 1;
            }
            inv += seen as u64 - le;
            let mut k = p + 1;
            while k <= n {
                tree[k] += 1;
                k += k & k.wrapping_neg();
            }
        }
        inv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational64,
    pub y: Rational64,
}

impl Point {
    pub fn new(x: Rational64, y: Rational64) -> Self {
        Point { x, y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub layer: u8,
    pub from: Point,
    pub to: Point,
}

impl Segment {
    fn is_vertical(&self) -> bool {
        self.from.x == self.to.x
    }

    fn is_horizontal(&self) -> bool {
        self.from.y == self.to.y
    }

    fn x_range(&self) -> (Rational64, Rational64) {
        minmax(self.from.x, self.to.x)
    }

    fn y_range(&self) -> (Rational64, Rational64) {
        minmax(self.from.y, self.to.y)
    }
}

fn minmax(a: Rational64, b: Rational64) -> (Rational64, Rational64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Net {
    pub input: usize,
    pub output: usize,
    pub segments: Vec<Segment>,
    pub vias: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WirePlan {
    pub n: usize,
    pub nets: Vec<Net>,
}

fn r(num: i64, den: i64) -> Rational64 {
    Rational64::new(num, den)
}

fn ri(v: usize) -> Rational64 {
    Rational64::from_integer(v as i64)
}

const LANE_IN: (i64, i64) = (1, 4);
const LANE_OUT: (i64, i64) = (1, 2);

pub fn input_x(i: usize) -> Rational64 {
    ri(i) + r(LANE_IN.0, LANE_IN.1)
}

pub fn output_x(j: usize) -> Rational64 {
    ri(j) + r(LANE_OUT.0, LANE_OUT.1)
}

/// Drop, run along the net's own track, drop. Fixed points stay a single
/// straight wire in the input lane.
pub fn route_two_layer(p: &BitPermutation) -> WirePlan {
    let n = p.len();
    let bottom = ri(n + 1);
    let nets = (0..n)
        .map(|i| {
            let j = p.apply(i);
            let x0 = input_x(i);
            if i == j {
                return Net {
                    input: i,
                    output: j,
                    segments: vec![Segment {
                        layer: 1,
                        from: Point::new(x0, ri(0)),
                        to: Point::new(x0, bottom),
                    }],
                    vias: Vec::new(),
                };
            }
            let x1 = output_x(j);
            let y = ri(i + 1);
            let (a, b) = (Point::new(x0, y), Point::new(x1, y));
            Net {
                input: i,
                output: j,
                segments: vec![
                    Segment { layer: 1, from: Point::new(x0, ri(0)), to: a },
                    Segment { layer: 2, from: a, to: b },
                    Segment { layer: 1, from: b, to: Point::new(x1, bottom) },
                ],
                vias: vec![a, b],
            }
        })
        .collect();
    WirePlan { n, nets }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub layer: u8,
    pub net_a: usize,
    pub segment_a: usize,
    pub net_b: usize,
    pub segment_b: usize,
    /// A shared point (for overlaps, the first one).
    pub at: Point,
}

/// Checks shape: every segment axis-aligned with layer 1 or 2, each net a
/// connected chain from its input terminal on row 0 to row `N + 1`, and
/// vias exactly where the layer changes.
pub fn validate_plan(plan: &WirePlan) -> Result<(), RoutingError> {
    let bottom = ri(plan.n + 1);
    for (k, net) in plan.nets.iter().enumerate() {
        let bad = |msg: String| RoutingError::Malformed(format!("net {k}: {msg}"));
        let segs = &net.segments;
        let (first, last) = match (segs.first(), segs.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(bad("no segments".into())),
        };
        if let Some(s) = segs.iter().find(|s| !(s.is_vertical() || s.is_horizontal())) {
            return Err(bad(format!("segment {} -> {} is not axis-aligned", s.from, s.to)));
        }
        if let Some(s) = segs.iter().find(|s| s.layer != 1 && s.layer != 2) {
            return Err(bad(format!("layer {}", s.layer)));
        }
        if first.from.y != ri(0) || first.from.x.floor() != ri(net.input) {
            return Err(bad(format!("starts at {}, not input {}", first.from, net.input)));
        }
        if last.to.y != bottom || last.to.x.floor() != ri(net.output) {
            return Err(bad(format!("ends at {}, not output {}", last.to, net.output)));
        }
        let mut vias = Vec::new();
        for w in segs.windows(2) {
            if w[0].to != w[1].from {
                return Err(bad(format!("gap between {} and {}", w[0].to, w[1].from)));
            }
            if w[0].layer != w[1].layer {
                vias.push(w[0].to);
            }
        }
        if vias != net.vias {
            return Err(bad("vias do not match the layer changes".into()));
        }
    }
    let mut outs: Vec<usize> = plan.nets.iter().map(|n| n.output).collect();
    outs.sort_unstable();
    if plan.nets.len() != plan.n || outs != (0..plan.n).collect::<Vec<_>>() {
        return Err(RoutingError::Malformed("nets do not form a permutation".into()));
    }
    Ok(())
}

/// First common point of two axis-aligned segments, if any.
fn touch(a: &Segment, b: &Segment) -> Option<Point> {
    let (ax, bx) = (a.x_range(), b.x_range());
    let (ay, by) = (a.y_range(), b.y_range());
    let lo_x = ax.0.max(bx.0);
    let hi_x = ax.1.min(bx.1);
    let lo_y = ay.0.max(by.0);
    let hi_y = ay.1.min(by.1);
    (lo_x <= hi_x && lo_y <= hi_y).then(|| Point::new(lo_x, lo_y))
}

/// Every pair of same-layer segments from different nets that share a
/// point, crossings and collinear overlaps alike.
pub fn verify_plan(plan: &WirePlan) -> Result<Vec<Conflict>, RoutingError> {
    validate_plan(plan)?;
    let segs: Vec<(usize, usize, &Segment)> = plan
        .nets
        .iter()
        .enumerate()
        .flat_map(|(k, net)| net.segments.iter().enumerate().map(move |(s, seg)| (k, s, seg)))
        .collect();
    let conflicts = (0..segs.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let segs = &segs;
            (i + 1..segs.len()).filter_map(move |j| {
                let (na, sa, a) = segs[i];
                let (nb, sb, b) = segs[j];
                if na == nb || a.layer != b.layer {
                    return None;
                }
                touch(a, b).map(|at| Conflict {
                    layer: a.layer,
                    net_a: na,
                    segment_a: sa,
                    net_b: nb,
                    segment_b: sb,
                    at,
                })
            })
        })
        .collect();
    Ok(conflicts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LayerBound {
    pub layers: u8,
    pub inversions: u64,
}

/// One layer iff there are no inversions; otherwise two, with
/// [`route_two_layer`] as the witness.
pub fn min_layers(p: &BitPermutation) -> LayerBound {
    let inversions = p.inversions();
    LayerBound { layers: if inversions == 0 { 1 } else { 2 }, inversions }
}

pub const LAYER_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];
const SCALE: i64 = 40;
const MARGIN: i64 = 20;

fn px(v: Rational64) -> String {
    let scaled = v * Rational64::from_integer(SCALE) + Rational64::from_integer(MARGIN);
    if scaled.is_integer() {
        scaled.to_integer().to_string()
    } else {
        format!("{:.3}", *scaled.numer() as f64 / *scaled.denom() as f64)
    }
}

/// Deterministic SVG: one `<g class="net">` per net, layer colours from
/// [`LAYER_COLORS`], vias as dots.
pub fn render_svg(plan: &WirePlan) -> String {
    let w = px(ri(plan.n + 1)).parse::<f64>().unwrap_or(0.0) + MARGIN as f64;
    let h = px(ri(plan.n + 1)).parse::<f64>().unwrap_or(0.0) + MARGIN as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    for (k, net) in plan.nets.iter().enumerate() {
        writeln!(s, r#"<g class="net" id="net-{k}">"#).unwrap();
        for seg in &net.segments {
            writeln!(
                s,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>"#,
                px(seg.from.x),
                px(seg.from.y),
                px(seg.to.x),
                px(seg.to.y),
                LAYER_COLORS[(seg.layer - 1) as usize % 2]
            )
            .unwrap();
        }
        for v in &net.vias {
            writeln!(s, r#"<circle cx="{}" cy="{}" r="3" fill="black"/>"#, px(v.x), px(v.y)).unwrap();
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(plan: &WirePlan, path: &std::path::Path) -> Result<(), RoutingError> {
    std::fs::write(path, render_svg(plan)).map_err(|e| RoutingError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seg(layer: u8, x0: Rational64, y0: Rational64, x1: Rational64, y1: Rational64) -> Segment {
        Segment { layer, from: Point::new(x0, y0), to: Point::new(x1, y1) }
    }

    fn random_perm(n: usize, seed: u64) -> BitPermutation {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        BitPermutation::new(map).unwrap()
    }

    #[test]
    fn present_tables() {
        let p = BitPermutation::present();
        assert_eq!(&p.as_slice()[..8], &[0, 16, 32, 48, 1, 17, 33, 49]);
        assert_eq!(&p.as_slice()[48..], &[12, 28, 44, 60, 13, 29, 45, 61, 14, 30, 46, 62, 15, 31, 47, 63]);
        assert_eq!(p.apply(4), 1);
        let q = BitPermutation::present16();
        assert_eq!(q.as_slice(), &[0, 4, 8, 12, 1, 5, 9, 13, 2, 6, 10, 14, 3, 7, 11, 15]);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(BitPermutation::new(vec![0, 0]).is_err());
        assert!(BitPermutation::new(vec![0, 2]).is_err());
        assert!(BitPermutation::new(vec![]).is_err());
    }

    #[test]
    fn inversion_count_matches_pairs() {
        for seed in 0..20 {
            let p = random_perm(50, seed);
            let s = p.as_slice();
            let naive = (0..50)
                .flat_map(|i| (i + 1..50).map(move |j| (i, j)))
                .filter(|&(i, j)| s[i] > s[j])
                .count() as u64;
            assert_eq!(p.inversions(), naive);
        }
    }

    #[test]
    fn layer_counts() {
        for n in [1, 2, 16, 64, 200] {
            assert_eq!(min_layers(&BitPermutation::identity(n)).layers, 1);
        }
        assert_eq!(min_layers(&BitPermutation::present()).layers, 2);
        let rev = BitPermutation::new((0..10).rev().collect()).unwrap();
        assert_eq!(min_layers(&rev), LayerBound { layers: 2, inversions: 45 });
    }

    #[test]
    fn identity_routes_straight() {
        let plan = route_two_layer(&BitPermutation::identity(8));
        assert!(plan.nets.iter().all(|n| n.segments.len() == 1 && n.segments[0].layer == 1));
        assert!(verify_plan(&plan).unwrap().is_empty());
    }

    #[test]
    fn swap_of_two() {
        let plan = route_two_layer(&BitPermutation::new(vec![1, 0]).unwrap());
        assert!(verify_plan(&plan).unwrap().is_empty());
        let horizontals: Vec<&Segment> =
            plan.nets.iter().flat_map(|n| &n.segments).filter(|s| s.layer == 2).collect();
        assert_eq!(horizontals.len(), 2);
        // The second input starts a quarter unit right of its column.
        assert_eq!(plan.nets[1].segments[0].from.x, r(5, 4));

        // Same drawing on one layer: the horizontals cross the verticals.
        let mut flat = plan.clone();
        for net in &mut flat.nets {
            net.segments.iter_mut().for_each(|s| s.layer = 1);
            net.vias.clear();
        }
        assert!(!verify_plan(&flat).unwrap().is_empty());
    }

    #[test]
    fn present_plan_is_clean() {
        let plan = route_two_layer(&BitPermutation::present());
        assert_eq!(plan.nets.len(), 64);
        assert!(verify_plan(&plan).unwrap().is_empty());
    }

    #[test]
    fn random_permutations_route_cleanly() {
        for seed in 0..100 {
            let n = 1 + (seed as usize * 37) % 256;
            let p = random_perm(n, seed);
            let plan = route_two_layer(&p);
            assert!(verify_plan(&plan).unwrap().is_empty(), "seed {seed}");
            for (i, net) in plan.nets.iter().enumerate() {
                assert_eq!((net.input, net.output), (i, p.apply(i)));
                assert_eq!(net.segments[0].from.x.floor(), ri(i));
                assert_eq!(net.segments.last().unwrap().to.x.floor(), ri(p.apply(i)));
            }
        }
    }

    /// Hand-built plans with one known conflict each.
    fn broken_plans() -> Vec<(WirePlan, (usize, usize))> {
        let mut out = Vec::new();
        let z = ri(0);
        // Collinear overlapping verticals: nets 0 and 1 of width 2 both
        // come down the input lane of column 0 for a while.
        for k in 0..10i64 {
            let top = ri(3);
            let xa = input_x(0);
            let ya = r(1 + k, 11);
            let net0 = Net {
                input: 0,
                output: 0,
                segments: vec![seg(1, xa, z, xa, top)],
                vias: vec![],
            };
            let xb = r(5, 4);
            let net1 = Net {
                input: 1,
                output: 1,
                segments: vec![
                    seg(1, xb, z, xb, r(1, 11)),
                    seg(2, xb, r(1, 11), xa, r(1, 11)),
                    seg(1, xa, r(1, 11), xa, ya + r(1, 22)),
                    seg(2, xa, ya + r(1, 22), xb, ya + r(1, 22)),
                    seg(1, xb, ya + r(1, 22), xb, top),
                ],
                vias: vec![
                    Point::new(xb, r(1, 11)),
                    Point::new(xa, r(1, 11)),
                    Point::new(xa, ya + r(1, 22)),
                    Point::new(xb, ya + r(1, 22)),
                ],
            };
            out.push((WirePlan { n: 2, nets: vec![net0, net1] }, (0, 1)));
        }
        // Crossing horizontals on one layer: routed plan of a random
        // permutation with one net's track moved onto layer 1.
        for seed in 0..10u64 {
            let p = BitPermutation::new({
                let mut v = random_perm(12, seed).as_slice().to_vec();
                // Make net 0 travel far right so its track crosses stubs.
                let k = v.iter().position(|&x| x == 11).unwrap();
                v.swap(0, k);
                v
            })
            .unwrap();
            let mut plan = route_two_layer(&p);
            let net = &mut plan.nets[0];
            net.segments[1].layer = 1;
            net.vias.clear();
            // Crosses net 1's input stub, which spans y in [0, 2].
            out.push((plan, (0, 1)));
        }
        out
    }

    #[test]
    fn broken_plans_are_caught() {
        let plans = broken_plans();
        assert_eq!(plans.len(), 20);
        for (k, (plan, (a, b))) in plans.iter().enumerate() {
            let conflicts = verify_plan(plan).unwrap();
            assert!(
                conflicts.iter().any(|c| (c.net_a, c.net_b) == (*a, *b)),
                "plan {k}: {conflicts:?}"
            );
        }
    }

    #[test]
    fn malformed_plans_are_rejected() {
        let mut plan = route_two_layer(&BitPermutation::new(vec![1, 0]).unwrap());
        plan.nets[0].segments[1].to.y += r(1, 2);
        assert!(matches!(verify_plan(&plan), Err(RoutingError::Malformed(_))));
        let mut plan = route_two_layer(&BitPermutation::new(vec![1, 0]).unwrap());
        plan.nets[0].vias.pop();
        assert!(verify_plan(&plan).is_err());
    }

    #[test]
    fn svg_is_deterministic() {
        let plan = route_two_layer(&BitPermutation::present());
        let a = render_svg(&plan);
        assert_eq!(a, render_svg(&route_two_layer(&BitPermutation::present())));
        assert_eq!(a.matches(r#"<g class="net""#).count(), 64);
        let colors: std::collections::BTreeSet<&str> = a
            .match_indices("stroke=\"")
            .map(|(i, m)| &a[i + m.len()..i + m.len() + 7])
            .collect();
        assert_eq!(colors.len(), 2);

        let id = render_svg(&route_two_layer(&BitPermutation::identity(5)));
        assert_eq!(id.matches("<line").count(), 5);
        assert!(!id.contains(LAYER_COLORS[1]));
    }
}
