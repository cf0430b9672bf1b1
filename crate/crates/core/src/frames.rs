//! Polar frames, apartments and roots, in rank 3 and in the quadrangle p⊥ ∩ b⊥.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LineId, PointId, PolarSpace};
use crate::subspace::{GqView, SingularSubspace};

/// Frame indices in the order used for slots.
pub const INDICES: [i8; 6] = [1, 2, 3, -1, -2, -3];
const SEARCH_ORDER: [i8; 6] = [1, -1, 2, -2, 3, -3];

fn slot(i: i8) -> usize {
    if i > 0 {
        (i - 1) as usize
    } else {
        (2 - i) as usize
    }
}

fn valid_index(i: i8) -> bool {
    (1..=3).contains(&i.abs())
}

/// Six points with p_i ⊥ p_j iff i + j ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PolarFrame {
    points: [PointId; 6],
}

impl PolarFrame {
    pub fn new(geom: &PolarSpace, map: &BTreeMap<i8, PointId>) -> Result<Self> {
        let mut points = [0; 6];
        for &i in &INDICES {
            points[slot(i)] = *map.get(&i).ok_or(Error::NoFrame)?;
        }
        let f = Self { points };
        if !f.is_valid(geom) {
            return Err(Error::NoFrame);
        }
        Ok(f)
    }

    pub fn get(&self, i: i8) -> PointId {
        self.points[slot(i)]
    }

    pub fn as_map(&self) -> BTreeMap<i8, PointId> {
        INDICES.iter().map(|&i| (i, self.get(i))).collect()
    }

    pub fn is_valid(&self, geom: &PolarSpace) -> bool {
        INDICES.iter().all(|&i| {
            INDICES
                .iter()
                .all(|&j| i == j || geom.collinear(self.get(i), self.get(j)) == (i + j != 0) && self.get(i) != self.get(j))
        })
    }
}

fn candidates(geom: &PolarSpace, assigned: &[(i8, PointId)], i: i8) -> FixedBitSet {
    let mut c = FixedBitSet::with_capacity(geom.num_points());
    c.insert_range(..);
    for &(j, y) in assigned {
        if i + j != 0 {
            c.intersect_with(geom.perp(y));
        } else {
            c.difference_with(geom.perp(y));
        }
        c.set(y as usize, false);
    }
    c
}

fn check_constraints(geom: &PolarSpace, constraints: &BTreeMap<i8, PointId>) -> Result<Vec<(i8, PointId)>> {
    let assigned: Vec<(i8, PointId)> = constraints.iter().map(|(&i, &x)| (i, x)).collect();
    for &(i, x) in &assigned {
        if !valid_index(i) {
            return Err(Error::NoFrame);
        }
        for &(j, y) in &assigned {
            if i != j && (x == y || geom.collinear(x, y) != (i + j != 0)) {
                return Err(Error::NoFrame);
            }
        }
    }
    Ok(assigned)
}

fn search(geom: &PolarSpace, assigned: &mut Vec<(i8, PointId)>, out: &mut Vec<PolarFrame>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    let Some(&i) = SEARCH_ORDER.iter().find(|&&i| assigned.iter().all(|&(j, _)| j != i)) else {
        let map: BTreeMap<i8, PointId> = assigned.iter().copied().collect();
        out.push(PolarFrame::new(geom, &map).expect("search keeps the frame invariant"));
        return;
    };
    for x in candidates(geom, assigned, i).ones() {
        assigned.push((i, x as u32));
        search(geom, assigned, out, limit);
        assigned.pop();
        if out.len() >= limit {
            return;
        }
    }
}

/// Lowest-id-first completion of a partial frame.
pub fn frame_search(geom: &PolarSpace, constraints: &BTreeMap<i8, PointId>) -> Result<PolarFrame> {
    let mut assigned = check_constraints(geom, constraints)?;
    let mut out = Vec::new();
    search(geom, &mut assigned, &mut out, 1);
    out.pop().ok_or(Error::NoFrame)
}

/// All completions of a partial frame, in search order.
pub fn frame_completions(geom: &PolarSpace, constraints: &BTreeMap<i8, PointId>) -> Result<Vec<PolarFrame>> {
    let mut assigned = check_constraints(geom, constraints)?;
    let mut out = Vec::new();
    search(geom, &mut assigned, &mut out, usize::MAX);
    Ok(out)
}

/// A subspace of an apartment labelled by the frame indices spanning it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameElement {
    pub indices: Vec<i8>,
    pub subspace: SingularSubspace,
}

/// Sorted list of point sets; equal keys mean equal apartments.
pub type ApartmentKey = Vec<Vec<PointId>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Apartment {
    pub frame: PolarFrame,
    pub elements: Vec<FrameElement>,
}

fn frame_subsets() -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    for mask in 1u32..64 {
        let s: Vec<i8> = INDICES.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &i)| i).collect();
        if s.len() <= 3 && s.iter().all(|&a| s.iter().all(|&b| a + b != 0)) {
            let mut s = s;
            s.sort_unstable();
            out.push(s);
        }
    }
    out.sort_by_key(|s| (s.len(), s.clone()));
    out
}

/// All singular subspaces spanned by subsets of the frame: 6 points, 12 lines, 8 planes.
pub fn apartment_from_frame(geom: &PolarSpace, frame: &PolarFrame) -> Apartment {
    let elements = frame_subsets()
        .into_iter()
        .map(|indices| {
            let pts: Vec<PointId> = indices.iter().map(|&i| frame.get(i)).collect();
            let subspace = SingularSubspace::span(geom, &pts).expect("frame subsets are singular");
            FrameElement { indices, subspace }
        })
        .collect();
    Apartment {
        frame: frame.clone(),
        elements,
    }
}

impl Apartment {
    pub fn key(&self) -> ApartmentKey {
        let mut k: Vec<Vec<PointId>> = self.elements.iter().map(|e| e.subspace.points().to_vec()).collect();
        k.sort();
        k
    }

    pub fn contains(&self, s: &SingularSubspace) -> bool {
        self.elements.iter().any(|e| &e.subspace == s)
    }

    pub fn count_by_size(&self, size: usize) -> usize {
        self.elements.iter().filter(|e| e.indices.len() == size).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    First(i8, i8),
    Second(i8),
}

/// A root (half-apartment) with its members, its inside per the removal recipe,
/// and its simplicial interior (elements strictly on the root's side of the wall).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Root {
    pub kind: RootKind,
    pub frame: PolarFrame,
    pub members: Vec<FrameElement>,
    pub inside: Vec<FrameElement>,
    pub interior: Vec<FrameElement>,
}

impl Root {
    /// Points lying in interior elements.
    pub fn interior_points(&self) -> Vec<PointId> {
        let set: BTreeSet<PointId> = self.interior.iter().flat_map(|e| e.subspace.points().to_vec()).collect();
        set.into_iter().collect()
    }

    /// Frame indices of point members.
    pub fn member_point_indices(&self) -> Vec<i8> {
        self.members.iter().filter(|e| e.indices.len() == 1).map(|e| e.indices[0]).collect()
    }

    /// Side of the wall: negative inside, zero on the wall, positive removed.
    pub fn side(kind: RootKind, indices: &[i8]) -> i32 {
        let w = |k: i8| -> i32 {
            match kind {
                RootKind::First(i, j) => {
                    if k == i || k == j {
                        1
                    } else if k == -i || k == -j {
                        -1
                    } else {
                        0
                    }
                }
                RootKind::Second(i) => {
                    if k == i {
                        1
                    } else if k == -i {
                        -1
                    } else {
                        0
                    }
                }
            }
        };
        indices.iter().map(|&k| w(k)).sum()
    }
}

/// Members and inside exactly per the removal recipe; interior from the wall functional.
pub fn root_of_apartment(a: &Apartment, kind: RootKind) -> Result<Root> {
    let is_removed: Box<dyn Fn(&[i8]) -> bool>;
    let is_outside_inside: Box<dyn Fn(&[i8]) -> bool>;
    match kind {
        RootKind::First(i, j) => {
            if !valid_index(i) || !valid_index(j) || i == j || i + j == 0 {
                return Err(Error::BadIndices(format!("First({i},{j}) needs two distinct collinear frame points")));
            }
            is_removed = Box::new(move |s: &[i8]| {
                let touches = s.contains(&i) || s.contains(&j);
                // Inside a maximal subspace containing both p_i and p_j.
                let in_common_plane = !s.contains(&-i) && !s.contains(&-j) && {
                    let mut u: BTreeSet<i8> = s.iter().copied().collect();
                    u.insert(i);
                    u.insert(j);
                    u.len() <= 3
                };
                touches && in_common_plane
            });
            is_outside_inside = Box::new(move |s: &[i8]| s.len() == 3 && (s.contains(&i) || s.contains(&j)));
        }
        RootKind::Second(i) => {
            if !valid_index(i) {
                return Err(Error::BadIndices(format!("Second({i}) needs a frame index")));
            }
            is_removed = Box::new(move |s: &[i8]| s.contains(&i));
            // Submaximal subspaces lying in a removed plane.
            is_outside_inside = Box::new(move |s: &[i8]| s.len() == 2 && !s.contains(&-i) && !s.contains(&i));
        }
    }
    let members: Vec<FrameElement> = a.elements.iter().filter(|e| !is_removed(&e.indices)).cloned().collect();
    let inside = members.iter().filter(|e| !is_outside_inside(&e.indices)).cloned().collect();
    let interior = a.elements.iter().filter(|e| Root::side(kind, &e.indices) < 0).cloned().collect();
    Ok(Root {
        kind,
        frame: a.frame.clone(),
        members,
        inside,
        interior,
    })
}

/// All apartments containing every member of the root, sorted by key.
pub fn apartments_containing(geom: &PolarSpace, r: &Root) -> Vec<Apartment> {
    let constraints: BTreeMap<i8, PointId> = r.member_point_indices().into_iter().map(|i| (i, r.frame.get(i))).collect();
    let mut seen = BTreeMap::new();
    for f in frame_completions(geom, &constraints).expect("root frame satisfies its own constraints") {
        let a = apartment_from_frame(geom, &f);
        if r.members.iter().all(|m| a.contains(&m.subspace)) {
            seen.entry(a.key()).or_insert(a);
        }
    }
    seen.into_values().collect()
}

/// Spanning subsets of `s` of size dim+1 in lexicographic order.
fn bases_of(geom: &PolarSpace, s: &SingularSubspace) -> Vec<Vec<PointId>> {
    let pts = s.points();
    match s.dim(geom.q()) {
        0 => vec![vec![pts[0]]],
        1 => {
            let mut out = Vec::new();
            for (a, &x) in pts.iter().enumerate() {
                for &y in &pts[a + 1..] {
                    out.push(vec![x, y]);
                }
            }
            out
        }
        2 => {
            let mut out = Vec::new();
            for (a, &x) in pts.iter().enumerate() {
                for (b, &y) in pts.iter().enumerate().skip(a + 1) {
                    let l = geom.line_through(x, y).unwrap();
                    for &z in &pts[b + 1..] {
                        if !geom.line_contains(l, z) {
                            out.push(vec![x, y, z]);
                        }
                    }
                }
            }
            out
        }
        _ => vec![Vec::new()],
    }
}

fn place(geom: &PolarSpace, required: &[PointId], assigned: &mut Vec<(i8, PointId)>) -> Option<PolarFrame> {
    let Some((&x, rest)) = required.split_first() else {
        let map: BTreeMap<i8, PointId> = assigned.iter().copied().collect();
        return frame_search(geom, &map).ok();
    };
    if assigned.iter().any(|&(_, y)| y == x) {
        return place(geom, rest, assigned);
    }
    for &i in &SEARCH_ORDER {
        if assigned.iter().any(|&(j, _)| j == i) {
            continue;
        }
        if assigned.iter().all(|&(j, y)| geom.collinear(x, y) == (i + j != 0)) {
            assigned.push((i, x));
            if let Some(f) = place(geom, rest, assigned) {
                return Some(f);
            }
            assigned.pop();
        }
    }
    None
}

/// An apartment containing both subspaces, by placing spanning points of U then V on the frame.
pub fn common_apartment(geom: &PolarSpace, u: &SingularSubspace, v: &SingularSubspace) -> Result<Apartment> {
    for bu in bases_of(geom, u) {
        for bv in bases_of(geom, v) {
            let mut required = bu.clone();
            required.extend(bv.iter().copied());
            if let Some(f) = place(geom, &required, &mut Vec::new()) {
                let a = apartment_from_frame(geom, &f);
                if (u.points().is_empty() || a.contains(u)) && (v.points().is_empty() || a.contains(v)) {
                    return Ok(a);
                }
            }
        }
    }
    Err(Error::NoFrame)
}

/// A quadrangle apartment: points in cyclic order and the lines joining consecutive points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GqApartment {
    pub points: [PointId; 4],
    pub lines: [LineId; 4],
}

impl GqApartment {
    pub fn from_cycle(geom: &PolarSpace, c: [PointId; 4]) -> Self {
        let lines = [0, 1, 2, 3].map(|k| geom.line_through(c[k], c[(k + 1) % 4]).expect("cycle edges are lines"));
        Self { points: c, lines }
    }

    /// Point sets of the 8 elements, sorted.
    pub fn key(&self, geom: &PolarSpace) -> ApartmentKey {
        let mut k: Vec<Vec<PointId>> = self.points.iter().map(|&x| vec![x]).collect();
        k.extend(self.lines.iter().map(|&l| geom.line(l).to_vec()));
        k.sort();
        k
    }

    pub fn contains_point(&self, x: PointId) -> bool {
        self.points.contains(&x)
    }

    pub fn contains_line(&self, l: LineId) -> bool {
        self.lines.contains(&l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GqElem {
    Point(PointId),
    Line(LineId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GqRootKind {
    First,
    Second,
}

/// A quadrangle root as a path of five elements, with the roles used by the recipes.
///
/// First kind: path (uq, q, qd, d, dn), centre line qd.
/// Second kind: path (q, qd, d, dn, n), centre point d; `u` is the apartment point opposite d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GqRoot {
    pub kind: GqRootKind,
    pub path: [GqElem; 5],
    pub q: PointId,
    pub d: PointId,
    pub u: PointId,
    pub n: PointId,
    pub base: GqApartment,
}

impl GqRoot {
    /// First-kind root (uq, q, qd, d, dn) on the apartment q, d, n, u.
    pub fn first(geom: &PolarSpace, q: PointId, d: PointId, u: PointId, n: PointId) -> Result<Self> {
        let base = Self::cycle(geom, [q, d, n, u])?;
        let l = |x, y| geom.line_through(x, y).unwrap();
        let path = [
            GqElem::Line(l(u, q)),
            GqElem::Point(q),
            GqElem::Line(l(q, d)),
            GqElem::Point(d),
            GqElem::Line(l(d, n)),
        ];
        Ok(Self {
            kind: GqRootKind::First,
            path,
            q,
            d,
            u,
            n,
            base,
        })
    }

    /// Second-kind root (q, qd, d, dn, n) on the apartment q, d, n, u.
    pub fn second(geom: &PolarSpace, q: PointId, d: PointId, n: PointId, u: PointId) -> Result<Self> {
        let base = Self::cycle(geom, [q, d, n, u])?;
        let l = |x, y| geom.line_through(x, y).unwrap();
        let path = [
            GqElem::Point(q),
            GqElem::Line(l(q, d)),
            GqElem::Point(d),
            GqElem::Line(l(d, n)),
            GqElem::Point(n),
        ];
        Ok(Self {
            kind: GqRootKind::Second,
            path,
            q,
            d,
            u,
            n,
            base,
        })
    }

    fn cycle(geom: &PolarSpace, c: [PointId; 4]) -> Result<GqApartment> {
        for k in 0..4 {
            let (x, y, z) = (c[k], c[(k + 1) % 4], c[(k + 2) % 4]);
            if x == y || !geom.collinear(x, y) || !geom.opposite(x, z) {
                return Err(Error::BadConfiguration(format!("{c:?} is not an ordinary quadrangle")));
            }
        }
        let min = (0..4).min_by_key(|&k| c[k]).unwrap();
        let mut rot = [0; 4];
        for k in 0..4 {
            rot[k] = c[(min + k) % 4];
        }
        if rot[3] < rot[1] {
            rot = [rot[0], rot[3], rot[2], rot[1]];
        }
        Ok(GqApartment::from_cycle(geom, rot))
    }

    /// Orientation-free identity of the root.
    pub fn key(&self) -> [GqElem; 5] {
        let mut rev = self.path;
        rev.reverse();
        self.path.min(rev)
    }

    /// Elements strictly inside the root.
    pub fn interior(&self) -> [GqElem; 3] {
        [self.path[1], self.path[2], self.path[3]]
    }

    /// Roots of both kinds carried by an apartment, oriented canonically.
    pub fn of_apartment(geom: &PolarSpace, a: &GqApartment) -> Vec<GqRoot> {
        let mut out = Vec::new();
        let c = a.points;
        for k in 0..4 {
            let at = |o: usize| c[(k + o) % 4];
            let line = |x: PointId, y: PointId| geom.line_through(x, y).unwrap();
            // First kind centred on the edge (c_k, c_{k+1}).
            for (q, d, u, n) in [(at(0), at(1), at(3), at(2)), (at(1), at(0), at(2), at(3))] {
                let path = [
                    GqElem::Line(line(u, q)),
                    GqElem::Point(q),
                    GqElem::Line(line(q, d)),
                    GqElem::Point(d),
                    GqElem::Line(line(d, n)),
                ];
                let r = GqRoot {
                    kind: GqRootKind::First,
                    path,
                    q,
                    d,
                    u,
                    n,
                    base: a.clone(),
                };
                if r.path == r.key() {
                    out.push(r);
                }
            }
            // Second kind centred on the vertex c_{k+1}.
            for (q, n) in [(at(0), at(2)), (at(2), at(0))] {
                let d = at(1);
                let path = [
                    GqElem::Point(q),
                    GqElem::Line(line(q, d)),
                    GqElem::Point(d),
                    GqElem::Line(line(d, n)),
                    GqElem::Point(n),
                ];
                let r = GqRoot {
                    kind: GqRootKind::Second,
                    path,
                    q,
                    d,
                    u: at(3),
                    n,
                    base: a.clone(),
                };
                if r.path == r.key() {
                    out.push(r);
                }
            }
        }
        out
    }

    pub fn contained_in(&self, a: &GqApartment) -> bool {
        self.path.iter().all(|e| match *e {
            GqElem::Point(x) => a.contains_point(x),
            GqElem::Line(l) => a.contains_line(l),
        })
    }
}

/// All quadrangle apartments of Γ, each listed once with its least point first.
pub fn gq_apartments(geom: &PolarSpace, gq: &GqView) -> Vec<GqApartment> {
    let mut out = Vec::new();
    for &x1 in &gq.points {
        for &x3 in gq.points.iter().filter(|&&y| y > x1 && geom.opposite(x1, y)) {
            let common: Vec<PointId> = gq
                .points
                .iter()
                .copied()
                .filter(|&y| y > x1 && geom.collinear(x1, y) && geom.collinear(x3, y) && y != x1 && y != x3)
                .collect();
            for (a, &x2) in common.iter().enumerate() {
                for &x4 in &common[a + 1..] {
                    if geom.opposite(x2, x4) {
                        out.push(GqApartment::from_cycle(geom, [x1, x2, x3, x4]));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// All roots of Γ, deduplicated, each with the least apartment containing it as base.
pub fn gq_roots(geom: &PolarSpace, apartments: &[GqApartment]) -> Vec<GqRoot> {
    let mut seen: BTreeMap<(u8, [GqElem; 5]), GqRoot> = BTreeMap::new();
    for a in apartments {
        for r in GqRoot::of_apartment(geom, a) {
            let tag = match r.kind {
                GqRootKind::First => 0,
                GqRootKind::Second => 1,
            };
            seen.entry((tag, r.key())).or_insert(r);
        }
    }
    seen.into_values().collect()
}

/// Apartments among `apartments` that contain the root.
pub fn gq_apartments_containing<'a>(root: &GqRoot, apartments: &'a [GqApartment]) -> Vec<&'a GqApartment> {
    apartments.iter().filter(|a| root.contained_in(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;

    fn w52() -> PolarSpace {
        PolarSpace::build(&FormSpec::symplectic(2)).unwrap()
    }

    #[test]
    fn frame_search_and_apartment_shape() {
        let g = w52();
        let f = frame_search(&g, &BTreeMap::new()).unwrap();
        assert!(f.is_valid(&g));
        let a = apartment_from_frame(&g, &f);
        assert_eq!((a.count_by_size(1), a.count_by_size(2), a.count_by_size(3)), (6, 12, 8));
    }

    #[test]
    fn collinear_pair_on_opposite_indices_rejected() {
        let g = w52();
        let c = (1..63).find(|&c| g.collinear(0, c)).unwrap();
        let cons = BTreeMap::from([(1, 0), (-1, c)]);
        assert!(matches!(frame_search(&g, &cons), Err(Error::NoFrame)));
    }

    #[test]
    fn root_member_counts() {
        let g = w52();
        let a = apartment_from_frame(&g, &frame_search(&g, &BTreeMap::new()).unwrap());
        let count = |v: &[FrameElement], k: usize| v.iter().filter(|e| e.indices.len() == k).count();
        let r = root_of_apartment(&a, RootKind::First(1, 2)).unwrap();
        assert_eq!((count(&r.members, 1), count(&r.members, 2), count(&r.members, 3)), (4, 7, 6));
        assert_eq!((count(&r.inside, 1), count(&r.inside, 2), count(&r.inside, 3)), (4, 7, 2));
        assert_eq!((count(&r.interior, 1), count(&r.interior, 2), count(&r.interior, 3)), (2, 5, 2));
        let s = root_of_apartment(&a, RootKind::Second(1)).unwrap();
        assert_eq!((count(&s.members, 1), count(&s.members, 2), count(&s.members, 3)), (5, 8, 4));
        assert_eq!((count(&s.inside, 1), count(&s.inside, 2), count(&s.inside, 3)), (5, 4, 4));
        assert_eq!((count(&s.interior, 1), count(&s.interior, 2), count(&s.interior, 3)), (1, 4, 4));
        assert!(matches!(root_of_apartment(&a, RootKind::First(1, -1)), Err(Error::BadIndices(_))));
    }

    #[test]
    fn removal_recipe_matches_closed_half_space() {
        let g = w52();
        let a = apartment_from_frame(&g, &frame_search(&g, &BTreeMap::new()).unwrap());
        let kinds = [
            RootKind::First(1, 2),
            RootKind::First(-1, 3),
            RootKind::First(2, -3),
            RootKind::Second(1),
            RootKind::Second(-2),
        ];
        for kind in kinds {
            let r = root_of_apartment(&a, kind).unwrap();
            let half: Vec<_> = a.elements.iter().filter(|e| Root::side(kind, &e.indices) <= 0).cloned().collect();
            assert_eq!(r.members, half, "{kind:?}");
        }
    }
}
