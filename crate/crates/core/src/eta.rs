//! Plane elations, copying actions between opposite lines, and the map η on d⊥ ∪ q⊥.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::coordinates;
use crate::geometry::{LineId, PlaneId, PointId, PolarSpace, NONE};

/// The elation of a singular plane with given centre and axis moving m to m′.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneElation {
    pub plane: PlaneId,
    pub center: PointId,
    pub axis: LineId,
    pub m: PointId,
    pub m_target: PointId,
    /// (point, image) for every point of the plane, sorted by point.
    pub map: Vec<(PointId, PointId)>,
}

impl PlaneElation {
    pub fn image(&self, x: PointId) -> Option<PointId> {
        self.map.binary_search_by_key(&x, |e| e.0).ok().map(|i| self.map[i].1)
    }
}

/// Explicit linear map on the carrier: a ↦ a, c ↦ c, m ↦ m + t·c, with t fixed by m′.
pub fn plane_elation_build(geom: &PolarSpace, plane: PlaneId, center: PointId, axis: LineId, m: PointId, m_target: PointId) -> Result<PlaneElation> {
    let bad = |s: &str| Err(Error::BadConfiguration(s.into()));
    if !geom.line_contains(axis, center) {
        return bad("centre not on axis");
    }
    if !geom.line(axis).iter().all(|&x| geom.plane_contains(plane, x)) {
        return bad("axis not in plane");
    }
    if !geom.plane_contains(plane, m) || geom.line_contains(axis, m) {
        return bad("m must lie in the plane off the axis");
    }
    let cm = geom.line_through(center, m).unwrap();
    if !geom.line_contains(cm, m_target) || m_target == center {
        return bad("m′ must lie on the line centre·m and differ from the centre");
    }
    let f = geom.form().field();
    let c = *geom.point(center);
    let a = *geom.point(geom.line(axis).iter().copied().find(|&x| x != center).unwrap());
    let mv = *geom.point(m);
    let target = *geom.point(m_target);
    let t = f.elements().find(|&t| mv.axpy(f, t, &c).normalized(f) == target).expect("m′ on centre·m");
    let basis = [a, c, mv];
    let mut map = Vec::new();
    for &x in geom.plane(plane) {
        let co = coordinates(f, &basis, geom.point(x)).expect("plane point in carrier");
        let img = a.scale(f, co[0]).axpy(f, co[1], &c).axpy(f, co[2], &mv.axpy(f, t, &c));
        map.push((x, geom.point_id(&img.normalized(f)).expect("image is a point of the plane")));
    }
    Ok(PlaneElation {
        plane,
        center,
        axis,
        m,
        m_target,
        map,
    })
}

/// x ↦ proj_M(η(proj_K(x))) for x on M.
pub fn copy_action(geom: &PolarSpace, k: LineId, m: LineId, eta_k: impl Fn(PointId) -> PointId) -> Result<Vec<(PointId, PointId)>> {
    if !geom.lines_opposite(k, m) {
        return Err(Error::LinesNotOpposite(k, m));
    }
    Ok(geom
        .line(m)
        .iter()
        .map(|&x| {
            let y = geom.proj_point_to_line(x, k).unwrap();
            (x, geom.proj_point_to_line(eta_k(y), m).unwrap())
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaProvenance {
    Outside,
    Fixed,
    SeedPlane,
    Copied { from: LineId, to: LineId },
}

/// The permutation η of d⊥ ∪ q⊥.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaMap {
    pub d: PointId,
    pub q: PointId,
    pub m: PointId,
    pub m_target: PointId,
    pub seed_plane: PlaneId,
    /// Image of each point, `NONE` outside the domain.
    pub images: Vec<PointId>,
    pub provenance: Vec<EtaProvenance>,
    /// Copies performed along opposite-line pairs, and those that disagreed with an earlier copy.
    pub copies: usize,
    pub copy_discrepancies: usize,
}

impl EtaMap {
    pub fn image(&self, x: PointId) -> Option<PointId> {
        let y = self.images[x as usize];
        (y != NONE).then_some(y)
    }

    pub fn in_domain(&self, x: PointId) -> bool {
        self.images[x as usize] != NONE
    }

    pub fn domain(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.images.len() as u32).filter(|&x| self.in_domain(x))
    }
}

pub(crate) fn check_eta_pre(geom: &PolarSpace, d: PointId, q: PointId, m: PointId, m_target: PointId) -> Result<()> {
    let bad = |s: &str| Err(Error::Precondition(s.into()));
    if d == q || !geom.collinear(d, q) {
        return bad("d and q must be distinct collinear points");
    }
    if m == d || !geom.collinear(d, m) || geom.collinear(m, q) {
        return bad("m must be collinear to d and not to q");
    }
    let dm = geom.line_through(d, m).unwrap();
    if !geom.line_contains(dm, m_target) || m_target == d {
        return bad("m′ must lie on dm and differ from d");
    }
    Ok(())
}

/// η from the lowest plane through dq.
pub fn build_eta(geom: &PolarSpace, d: PointId, q: PointId, m: PointId, m_target: PointId) -> Result<EtaMap> {
    check_eta_pre(geom, d, q, m, m_target)?;
    let dq = geom.line_through(d, q).unwrap();
    build_eta_with_plane(geom, d, q, m, m_target, geom.planes_through_line(dq)[0])
}

/// Seed elation of β = ⟨m, π ∩ m⊥⟩, then breadth-first copying between opposite d-lines and q-lines.
pub fn build_eta_with_plane(geom: &PolarSpace, d: PointId, q: PointId, m: PointId, m_target: PointId, pi: PlaneId) -> Result<EtaMap> {
    check_eta_pre(geom, d, q, m, m_target)?;
    let dq = geom.line_through(d, q).unwrap();
    if !geom.planes_through_line(dq).contains(&pi) {
        return Err(Error::Precondition(format!("plane {pi} does not contain dq")));
    }
    let n = geom.num_points();
    let mut images = vec![NONE; n];
    let mut provenance = vec![EtaProvenance::Outside; n];
    let common = geom.perp_set(&[d, q]);
    for x in common.ones() {
        images[x] = x as u32;
        provenance[x] = EtaProvenance::Fixed;
    }
    let axis_pts: Vec<PointId> = geom.plane(pi).iter().copied().filter(|&x| geom.collinear(x, m)).collect();
    let axis = geom.line_id(&axis_pts).ok_or_else(|| Error::RecipeDegenerate("π ∩ m⊥ is not a line".into()))?;
    let beta = geom.plane_through(axis, m).unwrap();
    let seed = plane_elation_build(geom, beta, d, axis, m, m_target)?;
    let is_d_line = |l: LineId| geom.line(l).iter().any(|&x| !geom.collinear(x, q));
    let is_q_line = |l: LineId| geom.line(l).iter().any(|&x| !geom.collinear(x, d));
    let d_lines: Vec<LineId> = geom.lines_through(d).iter().copied().filter(|&l| is_d_line(l)).collect();
    let q_lines: Vec<LineId> = geom.lines_through(q).iter().copied().filter(|&l| is_q_line(l)).collect();
    let mut known = vec![false; geom.num_lines()];
    let mut queue = VecDeque::new();
    for &l in &d_lines {
        if geom.planes_through_line(l).contains(&beta) {
            for &x in geom.line(l) {
                images[x as usize] = seed.image(x).unwrap();
                if x != d {
                    provenance[x as usize] = EtaProvenance::SeedPlane;
                }
            }
            known[l as usize] = true;
            queue.push_back(l);
        }
    }
    let (mut copies, mut copy_discrepancies) = (0, 0);
    while let Some(k) = queue.pop_front() {
        let others = if geom.line_contains(k, d) { &q_lines } else { &d_lines };
        for &ml in others {
            if !geom.lines_opposite(k, ml) {
                continue;
            }
            let copied = copy_action(geom, k, ml, |y| images[y as usize])?;
            copies += 1;
            if known[ml as usize] {
                if copied.iter().any(|&(x, y)| images[x as usize] != y) {
                    copy_discrepancies += 1;
                }
                continue;
            }
            for (x, y) in copied {
                if provenance[x as usize] != EtaProvenance::Fixed {
                    images[x as usize] = y;
                    provenance[x as usize] = EtaProvenance::Copied { from: k, to: ml };
                }
            }
            known[ml as usize] = true;
            queue.push_back(ml);
        }
    }
    let missing = d_lines.iter().chain(&q_lines).filter(|&&l| !known[l as usize]).count();
    if missing > 0 {
        return Err(Error::CoverageIncomplete { missing });
    }
    Ok(EtaMap {
        d,
        q,
        m,
        m_target,
        seed_plane: pi,
        images,
        provenance,
        copies,
        copy_discrepancies,
    })
}

/// Outcome of checking the three defining properties of η.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaProperties {
    pub fixes_common_perp: bool,
    pub plane_translations: bool,
    pub preserves_collinearity: bool,
    pub bijective: bool,
    pub planes_checked: usize,
    pub pairs_checked: usize,
    pub witness: Option<String>,
}

impl EtaProperties {
    pub fn pass(&self) -> bool {
        self.fixes_common_perp && self.plane_translations && self.preserves_collinearity && self.bijective
    }
}

/// (i) d⊥ ∩ q⊥ fixed, (ii) translations in planes through exactly one of d, q, (iii) collinearity preserved both ways.
pub fn check_eta_properties(geom: &PolarSpace, eta: &EtaMap) -> EtaProperties {
    let mut r = EtaProperties {
        fixes_common_perp: true,
        plane_translations: true,
        preserves_collinearity: true,
        bijective: true,
        ..Default::default()
    };
    let (d, q) = (eta.d, eta.q);
    let dom: Vec<PointId> = eta.domain().collect();
    let mut img: Vec<PointId> = dom.iter().map(|&x| eta.images[x as usize]).collect();
    img.sort_unstable();
    if img != dom {
        r.bijective = false;
        r.witness.get_or_insert("η is not a permutation of d⊥ ∪ q⊥".into());
    }
    for x in geom.perp_set(&[d, q]).ones() {
        if eta.images[x] != x as u32 {
            r.fixes_common_perp = false;
            r.witness.get_or_insert(format!("point {x} of d⊥ ∩ q⊥ moved"));
        }
    }
    for (c, other) in [(d, q), (q, d)] {
        for &pi in geom.planes_through_point(c) {
            let pts = geom.plane(pi);
            if pts.contains(&other) {
                continue;
            }
            r.planes_checked += 1;
            let mut image: Vec<PointId> = pts.iter().map(|&x| eta.images[x as usize]).collect();
            image.sort_unstable();
            let axis: Vec<PointId> = pts.iter().copied().filter(|&x| geom.collinear(x, other)).collect();
            let ok = image == pts
                && axis.iter().all(|&x| eta.images[x as usize] == x)
                && geom.lines_in_plane(pi).iter().all(|&l| {
                    let mut li: Vec<PointId> = geom.line(l).iter().map(|&x| eta.images[x as usize]).collect();
                    li.sort_unstable();
                    geom.line_id(&li).is_some() && (!geom.line_contains(l, c) || li == geom.line(l))
                });
            if !ok {
                r.plane_translations = false;
                r.witness.get_or_insert(format!("plane {pi} through {c}"));
            }
        }
    }
    for (a, &x) in dom.iter().enumerate() {
        for &y in &dom[a + 1..] {
            r.pairs_checked += 1;
            if geom.collinear(x, y) != geom.collinear(eta.images[x as usize], eta.images[y as usize]) {
                r.preserves_collinearity = false;
                r.witness.get_or_insert(format!("pair ({x}, {y})"));
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;

    fn config(g: &PolarSpace) -> (PointId, PointId, PointId, PointId) {
        let d = 0;
        let q = (1..).find(|&x| g.collinear(d, x)).unwrap();
        let m = (1..).find(|&x| x != q && g.collinear(d, x) && !g.collinear(q, x)).unwrap();
        let dm = g.line_through(d, m).unwrap();
        let mt = *g.line(dm).iter().find(|&&x| x != d && x != m).unwrap();
        (d, q, m, mt)
    }

    #[test]
    fn plane_elation_order_two_at_q2() {
        let g = PolarSpace::build(&FormSpec::symplectic(2)).unwrap();
        let (d, q, m, mt) = config(&g);
        let eta = build_eta(&g, d, q, m, mt).unwrap();
        let pi = eta.seed_plane;
        let axis_pts: Vec<_> = g.plane(pi).iter().copied().filter(|&x| g.collinear(x, m)).collect();
        let axis = g.line_id(&axis_pts).unwrap();
        let beta = g.plane_through(axis, m).unwrap();
        let e = plane_elation_build(&g, beta, d, axis, m, mt).unwrap();
        for &(x, y) in &e.map {
            assert_eq!(e.image(y), Some(x));
        }
        assert!(plane_elation_build(&g, beta, d, axis, m, m).unwrap().map.iter().all(|(x, y)| x == y));
        let off = *g.plane(beta).iter().find(|&&x| !g.line_contains(axis, x) && x != m && x != mt).unwrap();
        assert!(matches!(plane_elation_build(&g, beta, d, axis, m, off), Err(Error::BadConfiguration(_))));
    }

    #[test]
    fn eta_has_its_properties() {
        for q in [2u8, 3] {
            let g = PolarSpace::build(&FormSpec::symplectic(q)).unwrap();
            let (d, qq, m, mt) = config(&g);
            let eta = build_eta(&g, d, qq, m, mt).unwrap();
            assert_eq!(eta.image(m), Some(mt));
            assert_eq!(eta.copy_discrepancies, 0);
            let props = check_eta_properties(&g, &eta);
            assert!(props.pass(), "{props:?}");
        }
    }

    #[test]
    fn copying_between_concurrent_lines_rejected() {
        let g = PolarSpace::build(&FormSpec::symplectic(2)).unwrap();
        let ls = g.lines_through(0);
        assert!(matches!(copy_action(&g, ls[0], ls[1], |x| x), Err(Error::LinesNotOpposite(..))));
    }
}
