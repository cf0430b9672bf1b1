//! Collineation checks, root-elation certification, Moufang transitivity and the fixed-structure check.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frames::{apartments_containing, ApartmentKey, GqApartment, GqElem, GqRoot, Root, RootKind};
use crate::geometry::{PointId, PolarSpace};
use crate::perm::{closure, Perm};
use crate::subspace::{GqView, IncidenceStructure, Projectivity};

/// Line and plane lookup for repeated collineation checks on one structure.
pub struct IncidenceIndex {
    n: usize,
    lines: Vec<Vec<u32>>,
    planes: Vec<Vec<u32>>,
    line_set: HashSet<Vec<u32>>,
    plane_set: HashSet<Vec<u32>>,
}

impl IncidenceIndex {
    pub fn new<G: IncidenceStructure>(g: &G) -> Self {
        Self {
            n: g.point_count(),
            lines: g.line_sets().to_vec(),
            planes: g.plane_sets().to_vec(),
            line_set: g.line_sets().iter().cloned().collect(),
            plane_set: g.plane_sets().iter().cloned().collect(),
        }
    }

    pub fn point_count(&self) -> usize {
        self.n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collineation {
    pub perm: Perm,
    pub bijective: bool,
    pub line_preserving: bool,
    pub plane_preserving: bool,
    /// First failing element, e.g. `line 17`.
    pub witness: Option<String>,
}

impl Collineation {
    pub fn is_verified(&self) -> bool {
        self.bijective && self.line_preserving && self.plane_preserving
    }
}

/// Exhaustive check that σ is a bijection mapping lines to lines and planes to planes.
pub fn check_collineation(index: &IncidenceIndex, sigma: &Perm) -> Collineation {
    let mut c = Collineation {
        perm: sigma.clone(),
        bijective: false,
        line_preserving: false,
        plane_preserving: false,
        witness: None,
    };
    if sigma.len() != index.n || !sigma.is_bijection() {
        c.witness = Some("not a bijection of the point set".into());
        return c;
    }
    c.bijective = true;
    if let Some(l) = index.lines.iter().position(|l| !index.line_set.contains(&sigma.image_set(l))) {
        c.witness = Some(format!("line {l}"));
        return c;
    }
    c.line_preserving = true;
    if let Some(pi) = index.planes.iter().position(|p| !index.plane_set.contains(&sigma.image_set(p))) {
        c.witness = Some(format!("plane {pi}"));
        return c;
    }
    c.plane_preserving = true;
    c
}

/// What a root elation has to satisfy, in the point ids of the structure it acts on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootRequirements {
    pub fixed_points: Vec<u32>,
    pub stabilized: Vec<Vec<u32>>,
    pub apartments: Vec<ApartmentKey>,
}

impl RootRequirements {
    /// Rank 3: interior points fixed; members and everything incident with an interior element stabilized.
    pub fn for_root(geom: &PolarSpace, root: &Root) -> Self {
        let mut stab: BTreeSet<Vec<u32>> = root.members.iter().map(|e| e.subspace.points().to_vec()).collect();
        for e in &root.interior {
            let pts = e.subspace.points();
            match pts.len() {
                1 => {
                    let x = pts[0];
                    stab.extend(geom.lines_through(x).iter().map(|&l| geom.line(l).to_vec()));
                    stab.extend(geom.planes_through_point(x).iter().map(|&pi| geom.plane(pi).to_vec()));
                }
                n if n == geom.q() as usize + 1 => {
                    let l = geom.line_id(pts).expect("interior line");
                    stab.extend(pts.iter().map(|&x| vec![x]));
                    stab.extend(geom.planes_through_line(l).iter().map(|&pi| geom.plane(pi).to_vec()));
                }
                _ => {
                    let pi = geom.plane_id(pts).expect("interior plane");
                    stab.extend(pts.iter().map(|&x| vec![x]));
                    stab.extend(geom.lines_in_plane(pi).iter().map(|&l| geom.line(l).to_vec()));
                }
            }
        }
        let apartments = apartments_containing(geom, root).iter().map(|a| a.key()).collect();
        Self {
            fixed_points: root.interior_points(),
            stabilized: stab.into_iter().collect(),
            apartments,
        }
    }

    /// Quadrangle level, in local point indices of `gq`.
    pub fn for_gq_root(geom: &PolarSpace, gq: &GqView, root: &GqRoot, apartments: &[GqApartment]) -> Self {
        let loc = |x: PointId| gq.local(x).expect("root inside the quadrangle");
        let line_local = |l: u32| -> Vec<u32> {
            let mut v: Vec<u32> = geom.line(l).iter().map(|&x| loc(x)).collect();
            v.sort_unstable();
            v
        };
        let lines_through = |x: PointId| -> Vec<Vec<u32>> { gq.lines_through_local(loc(x)).iter().map(|&i| line_local(gq.lines[i as usize])).collect() };
        let mut fixed = BTreeSet::new();
        let mut stab: BTreeSet<Vec<u32>> = BTreeSet::new();
        for e in root.path {
            match e {
                GqElem::Point(x) => {
                    stab.insert(vec![loc(x)]);
                }
                GqElem::Line(l) => {
                    stab.insert(line_local(l));
                }
            }
        }
        for e in root.interior() {
            match e {
                GqElem::Point(x) => {
                    fixed.insert(loc(x));
                    stab.extend(lines_through(x));
                }
                GqElem::Line(l) => {
                    for &x in geom.line(l) {
                        fixed.insert(loc(x));
                        stab.insert(vec![loc(x)]);
                    }
                }
            }
        }
        let apartments = apartments
            .iter()
            .filter(|a| root.contained_in(a))
            .map(|a| {
                let mut k: Vec<Vec<u32>> = a.points.iter().map(|&x| vec![loc(x)]).collect();
                k.extend(a.lines.iter().map(|&l| line_local(l)));
                k.sort();
                k
            })
            .collect();
        Self {
            fixed_points: fixed.into_iter().collect(),
            stabilized: stab.into_iter().collect(),
            apartments,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub pass: bool,
    pub collineation: bool,
    pub fixes_inside: bool,
    pub stabilizes_incident: bool,
    pub apartments_preserved: bool,
    pub witness: Option<String>,
}

fn image_key(sigma: &Perm, key: &ApartmentKey) -> ApartmentKey {
    let mut k: Vec<Vec<u32>> = key.iter().map(|s| sigma.image_set(s)).collect();
    k.sort();
    k
}

/// (a) interior points fixed, (b) incident subspaces stabilized, (c) containing apartments permuted.
/// Never passes a σ whose collineation check failed.
pub fn certify_root_elation(col: &Collineation, req: &RootRequirements) -> Certificate {
    let sigma = &col.perm;
    let mut c = Certificate {
        pass: false,
        collineation: col.is_verified(),
        fixes_inside: false,
        stabilizes_incident: false,
        apartments_preserved: false,
        witness: None,
    };
    if !c.collineation {
        c.witness = Some(format!("not a collineation: {}", col.witness.clone().unwrap_or_default()));
        return c;
    }
    match req.fixed_points.iter().find(|&&x| sigma.apply(x) != x) {
        Some(x) => c.witness = Some(format!("point {x} moved")),
        None => c.fixes_inside = true,
    }
    match req.stabilized.iter().find(|s| &sigma.image_set(s) != *s) {
        Some(s) if c.witness.is_none() => c.witness = Some(format!("subspace {s:?} not stabilized")),
        Some(_) => {}
        None => c.stabilizes_incident = true,
    }
    let keys: HashSet<&ApartmentKey> = req.apartments.iter().collect();
    match req.apartments.iter().find(|a| !keys.contains(&image_key(sigma, a))) {
        Some(a) if c.witness.is_none() => c.witness = Some(format!("apartment {a:?} leaves the root's apartments")),
        Some(_) => {}
        None => c.apartments_preserved = true,
    }
    c.pass = c.fixes_inside && c.stabilizes_incident && c.apartments_preserved;
    c
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoufangReport {
    pub pass: bool,
    pub group_order: usize,
    pub apartment_count: usize,
    pub orbit_size: usize,
    pub witness: Option<String>,
}

/// The group generated by `gens` permutes the apartments containing the root transitively.
pub fn moufang_transitivity(n: usize, gens: &[Perm], apartments: &[ApartmentKey], cap: usize) -> Result<MoufangReport> {
    let group = closure(n, gens, cap)?;
    let all: HashSet<&ApartmentKey> = apartments.iter().collect();
    let mut report = MoufangReport {
        pass: false,
        group_order: group.len(),
        apartment_count: apartments.len(),
        orbit_size: 0,
        witness: None,
    };
    let Some(base) = apartments.first() else {
        report.witness = Some("no apartments".into());
        return Ok(report);
    };
    let mut orbit: HashSet<ApartmentKey> = HashSet::new();
    for g in &group {
        let img = image_key(g, base);
        if !all.contains(&img) {
            report.witness = Some("group element moves the base apartment off the root".into());
            return Ok(report);
        }
        orbit.insert(img);
    }
    report.orbit_size = orbit.len();
    report.pass = orbit.len() == apartments.len();
    if !report.pass {
        report.witness = Some(format!("orbit {} of {} apartments", orbit.len(), apartments.len()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixpointReport {
    pub pass: bool,
    pub planes_checked: usize,
    pub lines_checked: usize,
    pub witness: Option<String>,
}

/// First kind: planes through the wall line dq fixed pointwise, lines through d or q stabilized.
/// Second kind: lines through the central point stabilized.
pub fn verify_fixed_structure(geom: &PolarSpace, sigma: &Perm, root: &Root) -> FixpointReport {
    let mut r = FixpointReport {
        pass: true,
        planes_checked: 0,
        lines_checked: 0,
        witness: None,
    };
    let centres: Vec<PointId> = match root.kind {
        RootKind::First(i, j) => vec![root.frame.get(-i), root.frame.get(-j)],
        RootKind::Second(i) => vec![root.frame.get(-i)],
    };
    if let [d, q] = centres[..] {
        let l = geom.line_through(d, q).expect("wall points collinear");
        for &pi in geom.planes_through_line(l) {
            r.planes_checked += 1;
            if let Some(&x) = geom.plane(pi).iter().find(|&&x| sigma.apply(x) != x) {
                r.pass = false;
                r.witness.get_or_insert(format!("plane {pi} moves point {x}"));
            }
        }
    }
    for &c in &centres {
        for &l in geom.lines_through(c) {
            r.lines_checked += 1;
            if sigma.image_set(geom.line(l)) != geom.line(l) {
                r.pass = false;
                r.witness.get_or_insert(format!("line {l} through {c} not stabilized"));
            }
        }
    }
    r
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub pass: bool,
    pub length: usize,
    pub closed: bool,
    pub even: bool,
    pub consecutive_opposite: bool,
}

/// A closed, even chain of length 4 with consecutive opposite bases.
pub fn verify_self_projectivity(geom: &PolarSpace, theta: &Projectivity) -> ChainReport {
    let consecutive_opposite = theta.bases.windows(2).all(|w| geom.opposite(w[0], w[1]));
    let (length, closed, even) = (theta.length(), theta.is_self(), theta.is_even());
    ChainReport {
        pass: length == 4 && closed && even && consecutive_opposite,
        length,
        closed,
        even,
        consecutive_opposite,
    }
}

/// Distinct permutations, sorted.
pub fn dedup_perms(perms: impl IntoIterator<Item = Perm>) -> Vec<Perm> {
    let set: BTreeSet<Perm> = perms.into_iter().collect();
    set.into_iter().collect()
}
