//! The thin H3 geometry: icosahedron vertices, edges and faces, its projection calculus between
//! opposite points, and what the thick pentagon elation recipe needs from it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{closure, Perm};

pub type H3Point = u32;
pub type H3Line = u32;
pub type H3Plane = u32;

/// a + bφ with φ² = φ + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ZPhi {
    pub a: i64,
    pub b: i64,
}

impl ZPhi {
    pub const ZERO: ZPhi = ZPhi { a: 0, b: 0 };
    pub const ONE: ZPhi = ZPhi { a: 1, b: 0 };
    pub const PHI: ZPhi = ZPhi { a: 0, b: 1 };
}

impl std::ops::Add for ZPhi {
    type Output = ZPhi;
    fn add(self, o: ZPhi) -> ZPhi {
        ZPhi {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl std::ops::Sub for ZPhi {
    type Output = ZPhi;
    fn sub(self, o: ZPhi) -> ZPhi {
        ZPhi {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

/// φ² = φ + 1.
impl std::ops::Mul for ZPhi {
    type Output = ZPhi;
    fn mul(self, o: ZPhi) -> ZPhi {
        ZPhi {
            a: self.a * o.a + self.b * o.b,
            b: self.a * o.b + self.b * o.a + self.b * o.b,
        }
    }
}

impl std::ops::Neg for ZPhi {
    type Output = ZPhi;
    fn neg(self) -> ZPhi {
        ZPhi { a: -self.a, b: -self.b }
    }
}

/// Icosahedron with vertices the cyclic shifts of (0, ±1, ±φ), in generation order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThinH3 {
    pub coords: Vec<[ZPhi; 3]>,
    pub lines: Vec<[H3Point; 2]>,
    pub planes: Vec<[H3Point; 3]>,
    dist: Vec<Vec<u8>>,
}

pub fn build_icosahedron() -> ThinH3 {
    let mut coords = Vec::with_capacity(12);
    for shift in 0..3 {
        for s1 in [ZPhi::ONE, -ZPhi::ONE] {
            for s2 in [ZPhi::PHI, -ZPhi::PHI] {
                let base = [ZPhi::ZERO, s1, s2];
                coords.push([base[shift % 3], base[(shift + 1) % 3], base[(shift + 2) % 3]]);
            }
        }
    }
    let sq = |x: &[ZPhi; 3], y: &[ZPhi; 3]| (0..3).fold(ZPhi::ZERO, |acc, i| acc + (x[i] - y[i]) * (x[i] - y[i]));
    let edge = ZPhi { a: 4, b: 0 };
    let n = coords.len() as H3Point;
    let adj = |x: H3Point, y: H3Point| sq(&coords[x as usize], &coords[y as usize]) == edge;
    let mut lines = Vec::new();
    let mut planes = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if adj(x, y) {
                lines.push([x, y]);
                for z in y + 1..n {
                    if adj(x, z) && adj(y, z) {
                        planes.push([x, y, z]);
                    }
                }
            }
        }
    }
    let mut dist = vec![vec![u8::MAX; n as usize]; n as usize];
    for s in 0..n {
        let row = &mut dist[s as usize];
        row[s as usize] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if row[y as usize] == u8::MAX && adj(x, y) {
                    row[y as usize] = row[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    ThinH3 { coords, lines, planes, dist }
}

impl ThinH3 {
    pub fn num_points(&self) -> usize {
        self.coords.len()
    }

    pub fn distance(&self, x: H3Point, y: H3Point) -> u8 {
        self.dist[x as usize][y as usize]
    }

    pub fn collinear(&self, x: H3Point, y: H3Point) -> bool {
        self.distance(x, y) <= 1
    }

    pub fn opposite(&self, x: H3Point, y: H3Point) -> bool {
        self.distance(x, y) == 3
    }

    /// Points at the given distance from x.
    pub fn at_distance(&self, x: H3Point, d: u8) -> Vec<H3Point> {
        (0..self.num_points() as H3Point).filter(|&y| self.distance(x, y) == d).collect()
    }

    /// Number of points at distance 0, 1, 2, 3.
    pub fn census(&self, x: H3Point) -> [usize; 4] {
        let mut c = [0; 4];
        for y in 0..self.num_points() as H3Point {
            c[self.distance(x, y) as usize] += 1;
        }
        c
    }

    pub fn line_through(&self, x: H3Point, y: H3Point) -> Option<H3Line> {
        let key = [x.min(y), x.max(y)];
        self.lines.iter().position(|l| *l == key).map(|i| i as H3Line)
    }

    pub fn plane_of(&self, x: H3Point, y: H3Point, z: H3Point) -> Option<H3Plane> {
        let mut key = [x, y, z];
        key.sort_unstable();
        self.planes.iter().position(|p| *p == key).map(|i| i as H3Plane)
    }

    pub fn lines_through(&self, x: H3Point) -> Vec<H3Line> {
        (0..self.lines.len() as H3Line).filter(|&l| self.lines[l as usize].contains(&x)).collect()
    }

    pub fn planes_through(&self, x: H3Point) -> Vec<H3Plane> {
        (0..self.planes.len() as H3Plane).filter(|&p| self.planes[p as usize].contains(&x)).collect()
    }

    pub fn line_in_plane(&self, l: H3Line, pi: H3Plane) -> bool {
        self.lines[l as usize].iter().all(|x| self.planes[pi as usize].contains(x))
    }

    /// The cyclic order of a set of points whose induced collinearity graph is a single cycle.
    pub fn induced_cycle(&self, pts: &[H3Point]) -> Option<Vec<H3Point>> {
        let nbrs = |x: H3Point| -> Vec<H3Point> { pts.iter().copied().filter(|&y| self.distance(x, y) == 1).collect() };
        if pts.len() < 3 || pts.iter().any(|&x| nbrs(x).len() != 2) {
            return None;
        }
        let mut cycle = vec![pts[0], nbrs(pts[0])[0]];
        while cycle.len() < pts.len() {
            let (prev, cur) = (cycle[cycle.len() - 2], cycle[cycle.len() - 1]);
            let next = nbrs(cur).into_iter().find(|&y| y != prev)?;
            if cycle.contains(&next) {
                return None;
            }
            cycle.push(next);
        }
        self.distance(cycle[0], *cycle.last().unwrap()).eq(&1).then_some(cycle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H3Class {
    Equal,
    Collinear,
    Distance2,
    Opposite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H3Certificate {
    None,
    Line(H3Line),
    /// p⊥ ∩ b⊥ is this line.
    CommonPerpLine(H3Line),
    /// p⊥ ∩ b at distance 2 and b⊥ ∩ p at distance 2, each in cyclic order.
    Pentagons(Vec<H3Point>, Vec<H3Point>),
    /// The expected structure is missing.
    Missing(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H3Relation {
    pub p: H3Point,
    pub b: H3Point,
    pub class: H3Class,
    pub certificate: H3Certificate,
}

impl H3Relation {
    pub fn is_certified(&self) -> bool {
        !matches!(self.certificate, H3Certificate::Missing(_))
    }
}

pub fn classify_pair(g: &ThinH3, p: H3Point, b: H3Point) -> H3Relation {
    let (class, certificate) = match g.distance(p, b) {
        0 => (H3Class::Equal, H3Certificate::None),
        1 => (H3Class::Collinear, H3Certificate::Line(g.line_through(p, b).unwrap())),
        2 => {
            let common: Vec<H3Point> = g.at_distance(p, 1).into_iter().filter(|&x| g.distance(x, b) == 1).collect();
            let cert = match common[..] {
                [x, y] => g.line_through(x, y).map(H3Certificate::CommonPerpLine),
                _ => None,
            };
            (
                H3Class::Distance2,
                cert.unwrap_or_else(|| H3Certificate::Missing(format!("{} common neighbours do not form a line", common.len()))),
            )
        }
        _ => {
            let side = |x: H3Point, y: H3Point| -> Vec<H3Point> { g.at_distance(x, 1).into_iter().filter(|&z| g.distance(z, y) == 2).collect() };
            let cert = match (g.induced_cycle(&side(p, b)), g.induced_cycle(&side(b, p))) {
                (Some(a), Some(c)) if a.len() == 5 && c.len() == 5 => H3Certificate::Pentagons(a, c),
                _ => H3Certificate::Missing("no pentagon".into()),
            };
            (H3Class::Opposite, cert)
        }
    };
    H3Relation { p, b, class, certificate }
}

/// Unordered pair counts per class, and how many pairs lack their certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationCensus {
    pub per_point: Vec<[usize; 4]>,
    pub pairs: BTreeMap<H3Class, usize>,
    pub uncertified: usize,
}

pub fn relation_census(g: &ThinH3) -> RelationCensus {
    let n = g.num_points() as H3Point;
    let mut pairs = BTreeMap::new();
    let mut uncertified = 0;
    for p in 0..n {
        for b in p + 1..n {
            let r = classify_pair(g, p, b);
            *pairs.entry(r.class).or_insert(0) += 1;
            uncertified += usize::from(!r.is_certified());
        }
    }
    RelationCensus {
        per_point: (0..n).map(|x| g.census(x)).collect(),
        pairs,
        uncertified,
    }
}

/// An element of the residue of a point: a line or a plane through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H3Elem {
    Line(H3Line),
    Plane(H3Plane),
}

fn check_opposite(g: &ThinH3, b: H3Point, p: H3Point) -> Result<()> {
    if g.opposite(b, p) {
        Ok(())
    } else {
        Err(Error::NotOpposite(b, p))
    }
}

fn unique<T: Copy>(v: &[T], what: &str) -> Result<T> {
    match v {
        [x] => Ok(*x),
        _ => Err(Error::RecipeDegenerate(format!("{what}: {} candidates", v.len()))),
    }
}

/// proj_p(π) = pp′: the line of π at distance 2 from p, and the point p′ ∈ p⊥ collinear to it.
pub fn h3_proj_plane(g: &ThinH3, b: H3Point, pi: H3Plane, p: H3Point) -> Result<H3Line> {
    check_opposite(g, b, p)?;
    let pts = g.planes[pi as usize];
    if !pts.contains(&b) {
        return Err(Error::Precondition(format!("plane {pi} does not contain {b}")));
    }
    let far: Vec<H3Line> = (0..g.lines.len() as H3Line)
        .filter(|&l| g.line_in_plane(l, pi) && g.lines[l as usize].iter().all(|&x| g.distance(x, p) == 2))
        .collect();
    let l = unique(&far, "line of π at distance 2 from p")?;
    let ends = g.lines[l as usize];
    let cands: Vec<H3Point> = g.at_distance(p, 1).into_iter().filter(|&x| ends.iter().all(|&y| g.collinear(x, y))).collect();
    let pp = unique(&cands, "point of p⊥ collinear to that line")?;
    Ok(g.line_through(p, pp).unwrap())
}

/// proj_p(L) = ⟨p, L′⟩: the point ℓ of L at distance 2 from p and the line L′ = ℓ⊥ ∩ p⊥.
pub fn h3_proj_line(g: &ThinH3, b: H3Point, l: H3Line, p: H3Point) -> Result<H3Plane> {
    check_opposite(g, b, p)?;
    let pts = g.lines[l as usize];
    if !pts.contains(&b) {
        return Err(Error::Precondition(format!("line {l} does not contain {b}")));
    }
    let ells: Vec<H3Point> = pts.iter().copied().filter(|&x| g.distance(x, p) == 2).collect();
    let ell = unique(&ells, "point of L at distance 2 from p")?;
    let common: Vec<H3Point> = g.at_distance(p, 1).into_iter().filter(|&x| g.distance(x, ell) == 1).collect();
    let lines: Vec<H3Line> = match common[..] {
        [x, y] => g.line_through(x, y).into_iter().collect(),
        _ => Vec::new(),
    };
    let lp = unique(&lines, "line in ℓ⊥ ∩ p⊥")?;
    let [x, y] = g.lines[lp as usize];
    g.plane_of(p, x, y).ok_or_else(|| Error::RecipeDegenerate("⟨p, L′⟩ is not a plane".into()))
}

/// Projects a residue element of `from` to the residue of `to`.
pub fn h3_project(g: &ThinH3, from: H3Point, to: H3Point, e: H3Elem) -> Result<H3Elem> {
    match e {
        H3Elem::Plane(pi) => h3_proj_plane(g, from, pi, to).map(H3Elem::Line),
        H3Elem::Line(l) => h3_proj_line(g, from, l, to).map(H3Elem::Plane),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct H3ChainStep {
    pub from: H3Point,
    pub to: H3Point,
    pub input: H3Elem,
    pub output: H3Elem,
}

/// p₀ ⊼ p₁ ⊼ … applied to an element of Res(p₀).
pub fn h3_chain_eval(g: &ThinH3, bases: &[H3Point], start: H3Elem) -> Result<(H3Elem, Vec<H3ChainStep>)> {
    if let Some(index) = bases.windows(2).position(|w| !g.opposite(w[0], w[1])) {
        return Err(Error::ConsecutiveNotOpposite { index });
    }
    let mut e = start;
    let mut log = Vec::with_capacity(bases.len().saturating_sub(1));
    for w in bases.windows(2) {
        let out = h3_project(g, w[0], w[1], e)?;
        log.push(H3ChainStep {
            from: w[0],
            to: w[1],
            input: e,
            output: out,
        });
        e = out;
    }
    Ok((e, log))
}

/// Lines then planes through x.
pub fn residue_elements(g: &ThinH3, x: H3Point) -> Vec<H3Elem> {
    g.lines_through(x)
        .into_iter()
        .map(H3Elem::Line)
        .chain(g.planes_through(x).into_iter().map(H3Elem::Plane))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionTotality {
    pub plane_cases: usize,
    pub line_cases: usize,
    /// Cases with no result or more than one candidate.
    pub failures: usize,
    /// Results not through p.
    pub not_through_p: usize,
    /// Plane π for which projecting π to p and back to b returns π.
    pub plane_round_trips: usize,
    /// Line L for which projecting L to p and back to b returns L.
    pub line_round_trips: usize,
}

impl ProjectionTotality {
    pub fn pass(&self) -> bool {
        self.failures == 0 && self.not_through_p == 0 && self.plane_cases > 0 && self.line_cases > 0
    }
}

/// Both projections over every ordered opposite pair (b, p) and every plane or line through b.
pub fn projection_totality(g: &ThinH3) -> ProjectionTotality {
    let mut r = ProjectionTotality {
        plane_cases: 0,
        line_cases: 0,
        failures: 0,
        not_through_p: 0,
        plane_round_trips: 0,
        line_round_trips: 0,
    };
    let n = g.num_points() as H3Point;
    for b in 0..n {
        for p in (0..n).filter(|&p| g.opposite(b, p)) {
            for pi in g.planes_through(b) {
                r.plane_cases += 1;
                match h3_proj_plane(g, b, pi, p) {
                    Ok(l) => {
                        r.not_through_p += usize::from(!g.lines[l as usize].contains(&p));
                        r.plane_round_trips += usize::from(h3_proj_line(g, p, l, b).ok() == Some(pi));
                    }
                    Err(_) => r.failures += 1,
                }
            }
            for l in g.lines_through(b) {
                r.line_cases += 1;
                match h3_proj_line(g, b, l, p) {
                    Ok(pi) => {
                        r.not_through_p += usize::from(!g.planes[pi as usize].contains(&p));
                        r.line_round_trips += usize::from(h3_proj_plane(g, p, pi, b).ok() == Some(l));
                    }
                    Err(_) => r.failures += 1,
                }
            }
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instantiability {
    Instantiable,
    NotInstantiableInThinModel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChoiceSet {
    pub name: String,
    pub description: String,
    pub members: Vec<H3Point>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub source: String,
    pub expected: String,
    pub expected_elem: H3Elem,
    pub computed: H3Elem,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecipePreconditions {
    pub labels: BTreeMap<String, H3Point>,
    pub choice_sets: Vec<ChoiceSet>,
    /// b ⊼ p on Res(b) against the labelled images.
    pub table: Vec<TableRow>,
    pub table_matches: bool,
    /// Labels the recipe uses that the thin model cannot assign.
    pub label_log: Vec<String>,
    pub conclusion: Instantiability,
}

/// Labels b₀…b₄ around b (b₁ the lower common neighbour of b and b₀) and p₀…p₄ with p_i ⊥ b_{i−1}, b_i,
/// then evaluates the recipe's choice sets.
pub fn h3_recipe_preconditions(g: &ThinH3, p: H3Point, b: H3Point, b0: H3Point) -> Result<RecipePreconditions> {
    check_opposite(g, b, p)?;
    let pent: Vec<H3Point> = g.at_distance(b, 1).into_iter().filter(|&x| g.distance(x, p) == 2).collect();
    if !pent.contains(&b0) {
        return Err(Error::Precondition(format!("{b0} is not in b⊥ at distance 2 from p")));
    }
    let mut bs = vec![b0, *pent.iter().filter(|&&x| g.distance(x, b0) == 1).min().unwrap()];
    while bs.len() < 5 {
        let (prev, cur) = (bs[bs.len() - 2], bs[bs.len() - 1]);
        bs.push(*pent.iter().find(|&&x| x != prev && g.distance(x, cur) == 1).unwrap());
    }
    let mut ps = Vec::with_capacity(5);
    for i in 0..5 {
        let (u, v) = (bs[(i + 4) % 5], bs[i]);
        let c: Vec<H3Point> = g.at_distance(p, 1).into_iter().filter(|&x| g.collinear(x, u) && g.collinear(x, v)).collect();
        ps.push(unique(&c, "p_i collinear to b_{i-1} and b_i")?);
    }
    let mut labels = BTreeMap::from([("p".to_string(), p), ("b".to_string(), b)]);
    for i in 0..5 {
        labels.insert(format!("b{i}"), bs[i]);
        labels.insert(format!("p{i}"), ps[i]);
    }

    let interior = |x: H3Point, y: H3Point| -> Vec<H3Point> {
        g.line_through(x, y)
            .map(|l| g.lines[l as usize].iter().copied().filter(|&z| z != x && z != y).collect())
            .unwrap_or_default()
    };
    let b4p = interior(bs[0], bs[4]);
    let b3p: Vec<H3Point> = pent
        .iter()
        .copied()
        .filter(|&x| g.collinear(x, bs[2]) && b4p.iter().any(|&y| g.collinear(x, y)) && !bs.contains(&x))
        .collect();
    let d = interior(b, bs[1]);
    let choice_sets = vec![
        ChoiceSet {
            name: "b4'".into(),
            description: "points of b0b4 other than b0 and b4".into(),
            members: b4p,
        },
        ChoiceSet {
            name: "b3'".into(),
            description: "points of the pentagon collinear to b2 and some b4'".into(),
            members: b3p,
        },
        ChoiceSet {
            name: "d".into(),
            description: "points of bb1 other than b and b1".into(),
            members: d,
        },
    ];

    let line = |x: H3Point, y: H3Point| H3Elem::Line(g.line_through(x, y).unwrap());
    let plane = |x: H3Point, y: H3Point, z: H3Point| H3Elem::Plane(g.plane_of(x, y, z).unwrap());
    let mut table = Vec::with_capacity(10);
    for i in 0..5 {
        let j = (i + 1) % 5;
        let src = line(b, bs[i]);
        table.push(TableRow {
            source: format!("bb{i}"),
            expected: format!("<p,p{i},p{j}>"),
            expected_elem: plane(p, ps[i], ps[j]),
            computed: h3_project(g, b, p, src)?,
        });
        let h = (i + 4) % 5;
        let src = plane(b, bs[h], bs[i]);
        table.push(TableRow {
            source: format!("<b,b{h},b{i}>"),
            expected: format!("pp{i}"),
            expected_elem: line(p, ps[i]),
            computed: h3_project(g, b, p, src)?,
        });
    }
    let table_matches = table.iter().all(|r| r.expected_elem == r.computed);

    let mut label_log = vec![
        "d4, d3: defined from d and p4', unavailable without d".to_string(),
        "q, q0..q4, q4': defined from b3', b4' and d, unavailable".to_string(),
        "d3': referenced as a neighbour of q3 but never defined".to_string(),
        "q1, q2: used in the distance list of q before they are introduced".to_string(),
        "<p,p2,p2>: degenerate span in the stabilisation argument; the neighbouring rows use <p,p1,p2>".to_string(),
    ];
    let conclusion = if choice_sets.iter().any(|c| c.members.is_empty()) {
        label_log.push("empty choice set: recipe not instantiable".into());
        Instantiability::NotInstantiableInThinModel
    } else {
        Instantiability::Instantiable
    };
    Ok(RecipePreconditions {
        labels,
        choice_sets,
        table,
        table_matches,
        label_log,
        conclusion,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidityReport {
    pub pass: bool,
    pub chains_evaluated: usize,
    pub group_order: usize,
    /// Members that preserve the pentagon incidence of Res(b).
    pub incidence_preserving: bool,
    /// Members fixing two adjacent vertices and their three incident edges are all trivial.
    pub rigid: bool,
    pub witness: Option<String>,
}

fn closed_chains(g: &ThinH3, b: H3Point, cap: usize) -> Vec<Vec<H3Point>> {
    let n = g.num_points() as H3Point;
    let mut out = Vec::new();
    let mut stack = vec![vec![b]];
    while let Some(c) = stack.pop() {
        let len = c.len() - 1;
        if len >= 2 && len % 2 == 0 && *c.last().unwrap() == b {
            out.push(c.clone());
        }
        if len < cap {
            for y in (0..n).filter(|&y| g.opposite(*c.last().unwrap(), y)) {
                let mut next = c.clone();
                next.push(y);
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

/// Group generated by closed even self-projectivities of Res(b) up to length `cap`, acting on the
/// ten residue elements.
pub fn h3_residual_rigidity(g: &ThinH3, b: H3Point, cap: usize) -> Result<RigidityReport> {
    if cap < 4 {
        return Err(Error::Precondition("length cap must be at least 4".into()));
    }
    let elems = residue_elements(g, b);
    let pos: BTreeMap<H3Elem, u32> = elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
    let chains = closed_chains(g, b, cap);
    let mut gens = BTreeSet::new();
    for c in &chains {
        let img: Vec<u32> = elems.iter().map(|&e| h3_chain_eval(g, c, e).map(|(out, _)| pos[&out])).collect::<Result<_>>()?;
        gens.insert(Perm(img));
    }
    let gens: Vec<Perm> = gens.into_iter().collect();
    let group = closure(elems.len(), &gens, 1_000_000)?;
    let incident = |x: H3Elem, y: H3Elem| match (x, y) {
        (H3Elem::Line(l), H3Elem::Plane(pi)) | (H3Elem::Plane(pi), H3Elem::Line(l)) => g.line_in_plane(l, pi),
        _ => false,
    };
    let mut witness = None;
    let incidence_preserving = group.iter().all(|s| {
        let ok = elems.iter().all(|&x| {
            elems
                .iter()
                .all(|&y| incident(x, y) == incident(elems[s.apply(pos[&x]) as usize], elems[s.apply(pos[&y]) as usize]))
        });
        if !ok {
            witness.get_or_insert_with(|| format!("member {:?} breaks incidence", s.0));
        }
        ok
    });
    // Adjacent vertices: two lines through b in a common plane; their edges: all planes on either.
    let mut rigid = true;
    for (i, &x) in elems.iter().enumerate() {
        for &y in &elems[i + 1..] {
            let (H3Elem::Line(_), H3Elem::Line(_)) = (x, y) else { continue };
            let Some(&shared) = elems.iter().find(|&&z| incident(x, z) && incident(y, z)) else {
                continue;
            };
            let mut frame = vec![x, y, shared];
            frame.extend(elems.iter().copied().filter(|&z| z != shared && (incident(x, z) || incident(y, z))));
            for s in &group {
                if frame.iter().all(|e| s.apply(pos[e]) == pos[e]) && !s.is_identity() {
                    rigid = false;
                    witness.get_or_insert_with(|| format!("member {:?} fixes {x:?}, {y:?} and their edges", s.0));
                }
            }
        }
    }
    Ok(RigidityReport {
        pass: incidence_preserving && rigid,
        chains_evaluated: chains.len(),
        group_order: group.len(),
        incidence_preserving,
        rigid,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zphi_golden_ratio_identity() {
        assert_eq!(ZPhi::PHI * ZPhi::PHI, ZPhi::PHI + ZPhi::ONE);
    }

    #[test]
    fn faces_and_edges() {
        let g = build_icosahedron();
        assert_eq!(g.lines.len(), 30);
        assert_eq!(g.planes.len(), 20);
        assert!(g
            .planes
            .iter()
            .all(|f| g.collinear(f[0], f[1]) && g.collinear(f[1], f[2]) && g.collinear(f[0], f[2])));
    }

    #[test]
    fn adjacent_bases_rejected() {
        let g = build_icosahedron();
        let b = 0;
        let x = g.at_distance(b, 1)[0];
        let e = H3Elem::Line(g.lines_through(b)[0]);
        assert!(matches!(h3_chain_eval(&g, &[b, x], e), Err(Error::ConsecutiveNotOpposite { index: 0 })));
        assert!(matches!(h3_proj_plane(&g, b, g.planes_through(b)[0], x), Err(Error::NotOpposite(..))));
    }
}
