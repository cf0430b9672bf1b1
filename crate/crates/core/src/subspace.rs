//! Singular subspaces, projections, residues, the quadrangle of two opposite points,
//! and projectivities between point residues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::projective_span;
use crate::geometry::{LineId, PlaneId, PointId, PolarSpace, NONE};
use crate::perm::Perm;

/// Anything with points `0..n`, lines and (optionally) planes given as sorted point lists.
pub trait IncidenceStructure {
    fn point_count(&self) -> usize;
    fn line_sets(&self) -> &[Vec<u32>];
    fn plane_sets(&self) -> &[Vec<u32>] {
        &[]
    }
}

impl IncidenceStructure for PolarSpace {
    fn point_count(&self) -> usize {
        self.num_points()
    }
    fn line_sets(&self) -> &[Vec<u32>] {
        self.lines()
    }
    fn plane_sets(&self) -> &[Vec<u32>] {
        self.planes()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceKind {
    Empty,
    Point,
    Line,
    Plane,
}

/// A totally singular subspace given by its sorted point ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SingularSubspace {
    points: Vec<PointId>,
}

impl SingularSubspace {
    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    pub fn point(x: PointId) -> Self {
        Self { points: vec![x] }
    }

    pub fn line(geom: &PolarSpace, l: LineId) -> Self {
        Self { points: geom.line(l).to_vec() }
    }

    pub fn plane(geom: &PolarSpace, pi: PlaneId) -> Self {
        Self {
            points: geom.plane(pi).to_vec(),
        }
    }

    /// The subspace spanned by pairwise collinear points, or an error if they are not.
    pub fn span(geom: &PolarSpace, pts: &[PointId]) -> Result<Self> {
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                if !geom.collinear(a, b) {
                    return Err(Error::Precondition(format!("points {a} and {b} are not collinear")));
                }
            }
        }
        let vecs: Vec<_> = pts.iter().map(|&x| *geom.point(x)).collect();
        let mut ids: Vec<PointId> = projective_span(geom.form().field(), &vecs)
            .iter()
            .map(|v| geom.point_id(v).expect("span of collinear points is singular"))
            .collect();
        ids.sort_unstable();
        Ok(Self { points: ids })
    }

    /// Wrap a point set that is already known to be a singular subspace.
    pub fn from_sorted(points: Vec<PointId>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn contains(&self, x: PointId) -> bool {
        self.points.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &SingularSubspace) -> bool {
        self.points.iter().all(|&x| other.contains(x))
    }

    /// Projective dimension from cardinality: 1, q+1, q²+q+1 points.
    pub fn dim(&self, q: u8) -> i32 {
        let q = q as usize;
        match self.points.len() {
            0 => -1,
            1 => 0,
            n if n == q + 1 => 1,
            n if n == q * q + q + 1 => 2,
            _ => i32::MIN,
        }
    }

    pub fn kind(&self, q: u8) -> SubspaceKind {
        match self.dim(q) {
            -1 => SubspaceKind::Empty,
            0 => SubspaceKind::Point,
            1 => SubspaceKind::Line,
            _ => SubspaceKind::Plane,
        }
    }

    /// Check pairwise collinearity and closure under lines.
    pub fn is_valid(&self, geom: &PolarSpace) -> bool {
        if self.dim(geom.q()) == i32::MIN {
            return false;
        }
        for (i, &a) in self.points.iter().enumerate() {
            for &b in &self.points[i + 1..] {
                if !geom.collinear(a, b) {
                    return false;
                }
                let l = geom.line_through(a, b).unwrap();
                if geom.line(l).iter().any(|&c| !self.contains(c)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Points of `u` collinear to every point of `v`.
pub fn proj_subspace(geom: &PolarSpace, u: &SingularSubspace, v: &SingularSubspace) -> SingularSubspace {
    let perp = geom.perp_set(v.points());
    SingularSubspace::from_sorted(u.points().iter().copied().filter(|&x| perp.contains(x as usize)).collect())
}

/// Opposite subspaces: equal dimension and mutually empty projections.
pub fn subspaces_opposite(geom: &PolarSpace, u: &SingularSubspace, v: &SingularSubspace) -> bool {
    u.points().len() == v.points().len() && proj_subspace(geom, u, v).points().is_empty() && proj_subspace(geom, v, u).points().is_empty()
}

/// The residue of a point (or of the empty subspace) as a freshly indexed geometry.
#[derive(Debug, Clone)]
pub struct Residue {
    pub center: Option<PointId>,
    /// Residue points: Δ-lines through the center (Δ-points when the center is empty).
    pub elements: Vec<u32>,
    /// Residue lines: Δ-planes through the center (Δ-lines when the center is empty).
    pub blocks: Vec<u32>,
    block_points: Vec<Vec<u32>>,
    planes: Vec<Vec<u32>>,
}

impl Residue {
    pub fn local_of(&self, element: u32) -> Option<u32> {
        self.elements.binary_search(&element).ok().map(|i| i as u32)
    }

    pub fn is_generalized_quadrangle(&self) -> bool {
        self.center.is_some() && is_generalized_quadrangle(self)
    }
}

impl IncidenceStructure for Residue {
    fn point_count(&self) -> usize {
        self.elements.len()
    }
    fn line_sets(&self) -> &[Vec<u32>] {
        &self.block_points
    }
    fn plane_sets(&self) -> &[Vec<u32>] {
        &self.planes
    }
}

/// Residue of a subspace of dimension at most 0.
pub fn residue(geom: &PolarSpace, u: &SingularSubspace) -> Result<Residue> {
    match u.points() {
        [] => Ok(Residue {
            center: None,
            elements: (0..geom.num_points() as u32).collect(),
            blocks: (0..geom.num_lines() as u32).collect(),
            block_points: geom.lines().to_vec(),
            planes: geom.planes().to_vec(),
        }),
        [p] => {
            let elements = geom.lines_through(*p).to_vec();
            let blocks = geom.planes_through_point(*p).to_vec();
            let block_points = blocks
                .iter()
                .map(|&pi| {
                    let mut v: Vec<u32> = geom
                        .lines_in_plane(pi)
                        .iter()
                        .filter(|&&l| geom.line_contains(l, *p))
                        .map(|&l| elements.binary_search(&l).unwrap() as u32)
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            Ok(Residue {
                center: Some(*p),
                elements,
                blocks,
                block_points,
                planes: Vec::new(),
            })
        }
        _ => Err(Error::BadDimension(format!("residue of a subspace with {} points", u.points().len()))),
    }
}

/// Partial linear and one-point-on-a-line property.
pub fn is_generalized_quadrangle<G: IncidenceStructure>(g: &G) -> bool {
    let n = g.point_count();
    let mut line_of = vec![NONE; n * n];
    for (lid, l) in g.line_sets().iter().enumerate() {
        for &a in l {
            for &b in l {
                if a != b {
                    if line_of[a as usize * n + b as usize] != NONE {
                        return false;
                    }
                    line_of[a as usize * n + b as usize] = lid as u32;
                }
            }
        }
    }
    for l in g.line_sets() {
        for x in 0..n as u32 {
            if l.contains(&x) {
                continue;
            }
            let c = l.iter().filter(|&&y| line_of[x as usize * n + y as usize] != NONE).count();
            if c != 1 {
                return false;
            }
        }
    }
    true
}

/// The generalized quadrangle p⊥ ∩ b⊥ of two opposite points.
#[derive(Debug, Clone)]
pub struct GqView {
    pub p: PointId,
    pub b: PointId,
    /// Δ-ids of the quadrangle's points, sorted; local index = position.
    pub points: Vec<PointId>,
    /// Δ-ids of the quadrangle's lines, sorted.
    pub lines: Vec<LineId>,
    line_points: Vec<Vec<u32>>,
    lines_through: Vec<Vec<u32>>,
    local: Vec<u32>,
}

impl GqView {
    pub fn new(geom: &PolarSpace, p: PointId, b: PointId) -> Result<Self> {
        if !geom.opposite(p, b) {
            return Err(Error::NotOpposite(p, b));
        }
        let points: Vec<PointId> = geom.perp_set(&[p, b]).ones().map(|x| x as u32).collect();
        let mut local = vec![NONE; geom.num_points()];
        for (i, &x) in points.iter().enumerate() {
            local[x as usize] = i as u32;
        }
        let mut lines: Vec<LineId> = Vec::new();
        for &x in &points {
            for &l in geom.lines_through(x) {
                if geom.line(l).iter().all(|&y| local[y as usize] != NONE) {
                    lines.push(l);
                }
            }
        }
        lines.sort_unstable();
        lines.dedup();
        let line_points: Vec<Vec<u32>> = lines.iter().map(|&l| geom.line(l).iter().map(|&y| local[y as usize]).collect()).collect();
        let mut lines_through = vec![Vec::new(); points.len()];
        for (i, l) in line_points.iter().enumerate() {
            for &x in l {
                lines_through[x as usize].push(i as u32);
            }
        }
        Ok(Self {
            p,
            b,
            points,
            lines,
            line_points,
            lines_through,
            local,
        })
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, x: PointId) -> bool {
        self.local.get(x as usize).is_some_and(|&i| i != NONE)
    }

    pub fn local(&self, x: PointId) -> Option<u32> {
        self.local.get(x as usize).copied().filter(|&i| i != NONE)
    }

    pub fn global(&self, i: u32) -> PointId {
        self.points[i as usize]
    }

    pub fn local_line(&self, l: LineId) -> Option<u32> {
        self.lines.binary_search(&l).ok().map(|i| i as u32)
    }

    /// Local line indices through a local point.
    pub fn lines_through_local(&self, i: u32) -> &[u32] {
        &self.lines_through[i as usize]
    }

    /// Canonical bijection to the residue of `center` (which is p or b): x ↦ line center·x.
    pub fn to_residue(&self, geom: &PolarSpace, center: PointId, x: PointId) -> LineId {
        geom.line_through(center, x).expect("quadrangle point collinear to base")
    }

    /// Inverse of [`GqView::to_residue`]: the point of a line through p or b lying in the quadrangle.
    pub fn from_residue(&self, geom: &PolarSpace, line: LineId) -> Option<PointId> {
        geom.line(line).iter().copied().find(|&y| self.contains(y))
    }

    /// The quadrangle permutation induced by a collineation of Res(p) or Res(b).
    pub fn perm_from_residue_map(&self, geom: &PolarSpace, map: &ResidueMap) -> Result<Perm> {
        if map.source != map.target || (map.source != self.p && map.source != self.b) {
            return Err(Error::Precondition("map is not a self-map of a base residue".into()));
        }
        let c = map.source;
        let mut img = Vec::with_capacity(self.num_points());
        for &x in &self.points {
            let l = map
                .image_line(self.to_residue(geom, c, x))
                .ok_or_else(|| Error::Precondition("line outside map domain".into()))?;
            let y = self
                .from_residue(geom, l)
                .ok_or_else(|| Error::Precondition("image line misses the quadrangle".into()))?;
            img.push(self.local[y as usize]);
        }
        Ok(Perm(img))
    }

    /// The collineation of Res(center) induced by a quadrangle permutation.
    pub fn residue_map_from_perm(&self, geom: &PolarSpace, center: PointId, perm: &Perm) -> ResidueMap {
        let mut lines = self
            .points
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                (
                    self.to_residue(geom, center, x),
                    self.to_residue(geom, center, self.global(perm.apply(i as u32))),
                )
            })
            .collect::<Vec<_>>();
        lines.sort_unstable();
        let mut planes: Vec<(PlaneId, PlaneId)> = geom
            .planes_through_point(center)
            .iter()
            .map(|&pi| {
                let ls: Vec<LineId> = geom
                    .lines_in_plane(pi)
                    .iter()
                    .copied()
                    .filter(|&l| geom.line_contains(l, center))
                    .take(2)
                    .collect();
                let img: Vec<LineId> = ls.iter().map(|&l| lines[lines.binary_search_by_key(&l, |e| e.0).unwrap()].1).collect();
                (pi, plane_of_lines(geom, img[0], img[1]))
            })
            .collect();
        planes.sort_unstable();
        ResidueMap {
            source: center,
            target: center,
            lines,
            planes,
        }
    }
}

impl IncidenceStructure for GqView {
    fn point_count(&self) -> usize {
        self.points.len()
    }
    fn line_sets(&self) -> &[Vec<u32>] {
        &self.line_points
    }
}

/// The plane containing two distinct concurrent lines.
pub fn plane_of_lines(geom: &PolarSpace, a: LineId, b: LineId) -> PlaneId {
    geom.planes_through_line(a)
        .iter()
        .copied()
        .find(|&pi| geom.plane_contains(pi, geom.line(b)[0]) && geom.plane_contains(pi, geom.line(b)[1]))
        .expect("concurrent collinear lines span a plane")
}

/// Projection of a line through `p` to the residue of the opposite point `b`.
pub fn residue_projection_line(geom: &PolarSpace, p: PointId, b: PointId, line: LineId) -> Result<LineId> {
    if !geom.opposite(p, b) {
        return Err(Error::NotOpposite(p, b));
    }
    if !geom.line_contains(line, p) {
        return Err(Error::Precondition(format!("line {line} does not contain {p}")));
    }
    let u = geom.proj_point_to_line(b, line).expect("opposite base has a unique projection");
    Ok(geom.line_through(b, u).unwrap())
}

/// Projection of a plane through `p` to the residue of the opposite point `b`.
pub fn residue_projection_plane(geom: &PolarSpace, p: PointId, b: PointId, plane: PlaneId) -> Result<PlaneId> {
    if !geom.opposite(p, b) {
        return Err(Error::NotOpposite(p, b));
    }
    if !geom.plane_contains(plane, p) {
        return Err(Error::Precondition(format!("plane {plane} does not contain {p}")));
    }
    let pts: Vec<PointId> = geom.plane(plane).iter().copied().filter(|&y| geom.collinear(b, y)).take(2).collect();
    let l = geom.line_through(pts[0], pts[1]).unwrap();
    Ok(geom.plane_through(l, b).unwrap())
}

/// A map from the residue of `source` to the residue of `target`, on lines and planes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueMap {
    pub source: PointId,
    pub target: PointId,
    pub lines: Vec<(LineId, LineId)>,
    pub planes: Vec<(PlaneId, PlaneId)>,
}

impl ResidueMap {
    pub fn identity(geom: &PolarSpace, p: PointId) -> Self {
        Self {
            source: p,
            target: p,
            lines: geom.lines_through(p).iter().map(|&l| (l, l)).collect(),
            planes: geom.planes_through_point(p).iter().map(|&pi| (pi, pi)).collect(),
        }
    }

    pub fn image_line(&self, l: LineId) -> Option<LineId> {
        self.lines.binary_search_by_key(&l, |e| e.0).ok().map(|i| self.lines[i].1)
    }

    pub fn image_plane(&self, pi: PlaneId) -> Option<PlaneId> {
        self.planes.binary_search_by_key(&pi, |e| e.0).ok().map(|i| self.planes[i].1)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.lines.iter().all(|(a, b)| a == b) && self.planes.iter().all(|(a, b)| a == b)
    }

    /// Post-compose with the projection from `target` to an opposite point.
    pub fn then_project(&self, geom: &PolarSpace, to: PointId) -> Result<(ResidueMap, ProjectionStep)> {
        let from = self.target;
        let mut step = ProjectionStep {
            from,
            to,
            lines: Vec::new(),
            planes: Vec::new(),
        };
        let mut lines = Vec::with_capacity(self.lines.len());
        for &(src, img) in &self.lines {
            let next = residue_projection_line(geom, from, to, img)?;
            step.lines.push((img, next));
            lines.push((src, next));
        }
        let mut planes = Vec::with_capacity(self.planes.len());
        for &(src, img) in &self.planes {
            let next = residue_projection_plane(geom, from, to, img)?;
            step.planes.push((img, next));
            planes.push((src, next));
        }
        step.lines.sort_unstable();
        step.planes.sort_unstable();
        Ok((
            ResidueMap {
                source: self.source,
                target: to,
                lines,
                planes,
            },
            step,
        ))
    }

    /// Transport a self-map of Res(source) to Res(b): L ↦ proj_b(θ(proj_source(L))).
    pub fn copy_to(&self, geom: &PolarSpace, b: PointId) -> Result<ResidueMap> {
        let p = self.source;
        if self.source != self.target {
            return Err(Error::Precondition("copying requires a self-map".into()));
        }
        let mut lines = Vec::new();
        for &l in geom.lines_through(b) {
            let back = residue_projection_line(geom, b, p, l)?;
            let img = self.image_line(back).unwrap();
            lines.push((l, residue_projection_line(geom, p, b, img)?));
        }
        let mut planes = Vec::new();
        for &pi in geom.planes_through_point(b) {
            let back = residue_projection_plane(geom, b, p, pi)?;
            let img = self.image_plane(back).unwrap();
            planes.push((pi, residue_projection_plane(geom, p, b, img)?));
        }
        Ok(ResidueMap {
            source: b,
            target: b,
            lines,
            planes,
        })
    }

    /// `self` after `other`, both self-maps of the same residue.
    pub fn after(&self, other: &ResidueMap) -> ResidueMap {
        ResidueMap {
            source: other.source,
            target: self.target,
            lines: other.lines.iter().map(|&(a, b)| (a, self.image_line(b).unwrap())).collect(),
            planes: other.planes.iter().map(|&(a, b)| (a, self.image_plane(b).unwrap())).collect(),
        }
    }
}

/// Images of lines and planes under one projection step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionStep {
    pub from: PointId,
    pub to: PointId,
    pub lines: Vec<(LineId, LineId)>,
    pub planes: Vec<(PlaneId, PlaneId)>,
}

/// A chain of residue-to-residue projections with its realized map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Projectivity {
    pub bases: Vec<PointId>,
    pub map: ResidueMap,
    pub steps: Vec<ProjectionStep>,
}

impl PartialEq for Projectivity {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRecord {
    pub from: PointId,
    pub to: PointId,
    pub element: &'static str,
    pub preimage: u32,
    pub image: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditLog {
    pub bases: Vec<PointId>,
    pub steps: Vec<AuditRecord>,
}

impl Projectivity {
    pub fn length(&self) -> usize {
        self.bases.len().saturating_sub(1)
    }

    pub fn is_self(&self) -> bool {
        self.bases.first() == self.bases.last()
    }

    pub fn is_even(&self) -> bool {
        self.length().is_multiple_of(2)
    }

    pub fn audit(&self) -> AuditLog {
        let mut steps = Vec::new();
        for s in &self.steps {
            for &(a, b) in &s.lines {
                steps.push(AuditRecord {
                    from: s.from,
                    to: s.to,
                    element: "line",
                    preimage: a,
                    image: b,
                });
            }
            for &(a, b) in &s.planes {
                steps.push(AuditRecord {
                    from: s.from,
                    to: s.to,
                    element: "plane",
                    preimage: a,
                    image: b,
                });
            }
        }
        AuditLog {
            bases: self.bases.clone(),
            steps,
        }
    }
}

/// Compose residue projections along `bases`.
pub fn compose_projectivity(geom: &PolarSpace, bases: &[PointId]) -> Result<Projectivity> {
    let Some(&p0) = bases.first() else {
        return Err(Error::Precondition("empty base sequence".into()));
    };
    for (i, w) in bases.windows(2).enumerate() {
        if !geom.opposite(w[0], w[1]) {
            return Err(Error::ConsecutiveNotOpposite { index: i });
        }
    }
    let mut map = ResidueMap::identity(geom, p0);
    let mut steps = Vec::new();
    for &next in &bases[1..] {
        let (m, s) = map.then_project(geom, next)?;
        map = m;
        steps.push(s);
    }
    Ok(Projectivity {
        bases: bases.to_vec(),
        map,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;

    fn w52() -> PolarSpace {
        PolarSpace::build(&FormSpec::symplectic(2)).unwrap()
    }

    #[test]
    fn round_trip_projection_is_identity() {
        let g = w52();
        for p in 0..g.num_points() as u32 {
            for b in (0..g.num_points() as u32).filter(|&b| g.opposite(p, b)) {
                let pr = compose_projectivity(&g, &[p, b, p]).unwrap();
                assert!(pr.map.is_identity());
            }
        }
    }

    #[test]
    fn residue_and_gq_sizes() {
        let g = w52();
        let r = residue(&g, &SingularSubspace::point(5)).unwrap();
        assert_eq!(r.point_count(), 15);
        assert_eq!(r.line_sets().len(), 15);
        assert!(r.is_generalized_quadrangle());
        let b = (0..63).find(|&b| g.opposite(5, b)).unwrap();
        let gq = GqView::new(&g, 5, b).unwrap();
        assert_eq!(gq.num_points(), 15);
        assert_eq!(gq.lines.len(), 15);
        assert!(is_generalized_quadrangle(&gq));
        assert!(matches!(GqView::new(&g, 5, 5), Err(Error::NotOpposite(..))));
        let pl = SingularSubspace::plane(&g, 0);
        assert!(matches!(residue(&g, &pl), Err(Error::BadDimension(_))));
    }

    #[test]
    fn consecutive_collinear_rejected() {
        let g = w52();
        let c = (1..63).find(|&c| g.collinear(0, c)).unwrap();
        assert!(matches!(compose_projectivity(&g, &[0, c]), Err(Error::ConsecutiveNotOpposite { index: 0 })));
    }

    #[test]
    fn gq_points_map_across_projection() {
        let g = w52();
        let b = (0..63).find(|&b| g.opposite(0, b)).unwrap();
        let gq = GqView::new(&g, 0, b).unwrap();
        for &u in &gq.points {
            let pu = g.line_through(0, u).unwrap();
            assert_eq!(residue_projection_line(&g, 0, b, pu).unwrap(), g.line_through(b, u).unwrap());
        }
    }
}
