//! Extension of quadrangle root elations to collineations of the rank-3 polar space.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{build_eta, EtaMap};
use crate::frames::GqRoot;
use crate::geometry::{LineId, PlaneId, PointId, PolarSpace};
use crate::gq_elation::{build_first_kind_gq_elation, build_second_kind_gq_elation, j_choices, line, FirstKindRecipe, GqElation, SecondKindRecipe};
use crate::perm::Perm;
use crate::subspace::{GqView, ResidueMap};

/// The first-kind root elation of p⊥ ∩ b⊥ with root (q, qd, d) that agrees with η on its boundary.
#[derive(Debug, Clone)]
pub struct HostElation {
    pub gq: GqView,
    pub elation: GqElation<FirstKindRecipe>,
}

impl HostElation {
    pub fn image(&self, x: PointId) -> Option<PointId> {
        self.gq.local(x).map(|i| self.gq.global(self.elation.perm.apply(i)))
    }
}

/// Built from n (default: lowest point of Γ ∩ d⊥ ∖ q⊥), n′ = η(n), the lowest admissible u and u′ = proj_uq(n′).
pub fn host_elation(geom: &PolarSpace, eta: &EtaMap, p: PointId, b: PointId, n: Option<PointId>, j: Option<PointId>) -> Result<HostElation> {
    let (d, q) = (eta.d, eta.q);
    let gq = GqView::new(geom, p, b)?;
    if !gq.contains(d) || !gq.contains(q) {
        return Err(Error::Precondition(format!("({p}, {b}) is not collinear to both d and q")));
    }
    let n = match n {
        Some(n) => n,
        None => *gq
            .points
            .iter()
            .find(|&&x| x != d && geom.collinear(x, d) && !geom.collinear(x, q))
            .ok_or_else(|| Error::RecipeDegenerate("no point on a d-line".into()))?,
    };
    let u = *gq
        .points
        .iter()
        .find(|&&x| x != q && geom.collinear(x, q) && geom.collinear(x, n) && !geom.collinear(x, d))
        .ok_or_else(|| Error::RecipeDegenerate("no admissible u".into()))?;
    let root = GqRoot::first(geom, q, d, u, n)?;
    let n_target = eta.image(n).ok_or_else(|| Error::Precondition("n outside the domain of η".into()))?;
    let u_target = geom
        .proj_point_to_line(n_target, line(geom, u, q)?)
        .ok_or_else(|| Error::RecipeDegenerate("proj_uq(n′)".into()))?;
    let j = match j {
        Some(j) => j,
        None => j_choices(geom, p, q)[0],
    };
    let elation = build_first_kind_gq_elation(geom, &gq, &root, u_target, n_target, j)?;
    Ok(HostElation { gq, elation })
}

/// Ordered opposite pairs (p, b) in {d, q, x}⊥, lexicographic.
pub fn admissible_pairs(geom: &PolarSpace, d: PointId, q: PointId, x: PointId) -> Vec<(PointId, PointId)> {
    let pts: Vec<PointId> = geom.perp_set(&[d, q, x]).ones().map(|y| y as u32).collect();
    let mut out = Vec::new();
    for &p in &pts {
        for &b in &pts {
            if geom.opposite(p, b) {
                out.push((p, b));
            }
        }
    }
    out
}

/// η_{p,b}(x): points of {d, q}⊥ are fixed; otherwise the host elation of (p, b) applied to x.
pub fn eta_pb(geom: &PolarSpace, eta: &EtaMap, x: PointId, p: PointId, b: PointId) -> Result<PointId> {
    if geom.collinear(x, eta.d) && geom.collinear(x, eta.q) {
        return Ok(x);
    }
    if ![eta.d, eta.q, x].iter().all(|&y| geom.collinear(p, y) && geom.collinear(b, y)) {
        return Err(Error::Precondition(format!("({p}, {b}) is not collinear to d, q and {x}")));
    }
    host_elation(geom, eta, p, b, None, None)?
        .image(x)
        .ok_or_else(|| Error::Precondition(format!("{x} outside p⊥ ∩ b⊥")))
}

/// Images of x under every admissible host pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaPbCertificate {
    pub x: PointId,
    pub image: PointId,
    pub pairs: usize,
    pub distinct_images: usize,
}

pub fn eta_pb_certificate(geom: &PolarSpace, eta: &EtaMap, x: PointId) -> Result<EtaPbCertificate> {
    let pairs = admissible_pairs(geom, eta.d, eta.q, x);
    let Some(&(p0, b0)) = pairs.first() else {
        return Err(Error::NoHostPair(x));
    };
    let image = eta_pb(geom, eta, x, p0, b0)?;
    let mut images = vec![image];
    for &(p, b) in &pairs[1..] {
        images.push(eta_pb(geom, eta, x, p, b)?);
    }
    images.sort_unstable();
    images.dedup();
    Ok(EtaPbCertificate {
        x,
        image,
        pairs: pairs.len(),
        distinct_images: images.len(),
    })
}

/// Agreement of the host elation built with n = m against η on Γ ∩ (d⊥ ∪ q⊥), over every j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryAgreement {
    pub pass: bool,
    pub points_checked: usize,
    pub j_choices: usize,
    pub witness: Option<String>,
}

pub fn boundary_agreement(geom: &PolarSpace, eta: &EtaMap, p: PointId, b: PointId) -> Result<BoundaryAgreement> {
    let mut r = BoundaryAgreement {
        pass: true,
        points_checked: 0,
        j_choices: 0,
        witness: None,
    };
    for j in j_choices(geom, p, eta.q) {
        r.j_choices += 1;
        let host = host_elation(geom, eta, p, b, Some(eta.m), Some(j))?;
        for &x in &host.gq.points {
            if !(geom.collinear(x, eta.d) || geom.collinear(x, eta.q)) {
                continue;
            }
            r.points_checked += 1;
            if host.image(x) != eta.image(x) {
                r.pass = false;
                r.witness.get_or_insert(format!("point {x} with j = {j}"));
            }
        }
    }
    Ok(r)
}

/// The host map on Res(p) copied to Res(b) equals the one built directly at b and agrees with η there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CopyCoherence {
    pub pass: bool,
    pub equals_direct: bool,
    pub agrees_with_eta: bool,
}

pub fn copy_coherence(geom: &PolarSpace, eta: &EtaMap, p: PointId, b: PointId) -> Result<CopyCoherence> {
    let at_p = host_elation(geom, eta, p, b, Some(eta.m), None)?;
    let copied = at_p.elation.theta.map.copy_to(geom, b)?;
    let at_b = host_elation(geom, eta, b, p, Some(eta.m), None)?;
    let equals_direct = copied == at_b.elation.theta.map;
    let agrees_with_eta = at_p
        .gq
        .points
        .iter()
        .filter(|&&x| geom.collinear(x, eta.d) || geom.collinear(x, eta.q))
        .all(|&x| {
            let bx = geom.line_through(b, x).unwrap();
            copied.image_line(bx) == geom.line_through(b, eta.image(x).unwrap())
        });
    Ok(CopyCoherence {
        pass: equals_direct && agrees_with_eta,
        equals_direct,
        agrees_with_eta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstKindCase {
    Fixed,
    Eta,
    EtaPb,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstKindExtension {
    pub d: PointId,
    pub q: PointId,
    pub m: PointId,
    pub m_target: PointId,
    pub perm: Perm,
    pub provenance: Vec<FirstKindCase>,
    /// Host pair used for each third-case point.
    pub host_pairs: BTreeMap<PointId, (PointId, PointId)>,
    pub eta_copies: usize,
    pub eta_copy_discrepancies: usize,
}

impl FirstKindExtension {
    pub fn histogram(&self) -> BTreeMap<FirstKindCase, usize> {
        let mut h = BTreeMap::new();
        for &c in &self.provenance {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    }
}

/// φ = identity on {d, q}⊥, η on the rest of d⊥ ∪ q⊥, and η_{p,b} with the least host pair elsewhere.
pub fn extend_first_kind(geom: &PolarSpace, d: PointId, q: PointId, m: PointId, m_target: PointId) -> Result<FirstKindExtension> {
    let eta = build_eta(geom, d, q, m, m_target)?;
    extend_first_kind_with(geom, &eta)
}

pub fn extend_first_kind_with(geom: &PolarSpace, eta: &EtaMap) -> Result<FirstKindExtension> {
    let (d, q) = (eta.d, eta.q);
    let n = geom.num_points();
    let mut img = vec![0u32; n];
    let mut provenance = Vec::with_capacity(n);
    let mut host_pairs = BTreeMap::new();
    let mut hosts: HashMap<(PointId, PointId), HostElation> = HashMap::new();
    for x in 0..n as u32 {
        let (xd, xq) = (geom.collinear(x, d), geom.collinear(x, q));
        if xd && xq {
            img[x as usize] = x;
            provenance.push(FirstKindCase::Fixed);
        } else if xd || xq {
            img[x as usize] = eta.image(x).expect("η covers d⊥ ∪ q⊥");
            provenance.push(FirstKindCase::Eta);
        } else {
            let &(p, b) = admissible_pairs(geom, d, q, x).first().ok_or(Error::NoHostPair(x))?;
            let host = match hosts.entry((p, b)) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => e.insert(host_elation(geom, eta, p, b, None, None)?),
            };
            img[x as usize] = host.image(x).expect("x in its host quadrangle");
            host_pairs.insert(x, (p, b));
            provenance.push(FirstKindCase::EtaPb);
        }
    }
    Ok(FirstKindExtension {
        d,
        q,
        m: eta.m,
        m_target: eta.m_target,
        perm: Perm(img),
        provenance,
        host_pairs,
        eta_copies: eta.copies,
        eta_copy_discrepancies: eta.copy_discrepancies,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondKindCase {
    InAlphaBeta,
    OppositeO,
    PerpNonCoplanar,
    PerpCoplanar,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecondKindExtension {
    pub alpha: PlaneId,
    pub beta: PlaneId,
    pub o: PointId,
    pub p: PointId,
    pub p_target: PointId,
    pub seed: SecondKindRecipe,
    pub perm: Perm,
    pub provenance: Vec<SecondKindCase>,
    pub copies: usize,
    pub copy_discrepancies: usize,
    /// Points whose image depended on the choice of a ∈ A or b ∈ B.
    pub choice_discrepancies: usize,
}

impl SecondKindExtension {
    pub fn histogram(&self) -> BTreeMap<SecondKindCase, usize> {
        let mut h = BTreeMap::new();
        for &c in &self.provenance {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    }
}

fn single_common(a: &[PointId], b: &[PointId]) -> Option<PointId> {
    let mut it = a.iter().copied().filter(|x| b.binary_search(x).is_ok());
    let x = it.next()?;
    it.next().is_none().then_some(x)
}

/// L = α ∩ p⊥ and M = β ∩ p⊥, checked opposite; p′ must lie in L⊥ ∩ M⊥ and be opposite o.
pub fn second_kind_lines(geom: &PolarSpace, alpha: PlaneId, beta: PlaneId, p: PointId, p_target: PointId) -> Result<(PointId, LineId, LineId)> {
    let o = single_common(geom.plane(alpha), geom.plane(beta)).ok_or_else(|| Error::BadConfiguration("α ∩ β is not a point".into()))?;
    if !geom.opposite(p, o) || !geom.opposite(p_target, o) {
        return Err(Error::BadConfiguration("p and p′ must be opposite o".into()));
    }
    let meet_perp = |pi: PlaneId| -> Result<LineId> {
        let pts: Vec<PointId> = geom.plane(pi).iter().copied().filter(|&x| geom.collinear(x, p)).collect();
        geom.line_id(&pts).ok_or_else(|| Error::BadConfiguration("plane ∩ p⊥ is not a line".into()))
    };
    let (l, m) = (meet_perp(alpha)?, meet_perp(beta)?);
    if !geom.lines_opposite(l, m) {
        return Err(Error::LinesNotOpposite(l, m));
    }
    if !geom.line(l).iter().chain(geom.line(m)).all(|&x| geom.collinear(x, p_target)) {
        return Err(Error::BadConfiguration("p′ is not in L⊥ ∩ M⊥".into()));
    }
    Ok((o, l, m))
}

/// Seed η_x at the least point x of L as a second-kind quadrangle elation, copy it over opposite points
/// of α ∪ β, and define φ point by point from the copied residue maps.
pub fn extend_second_kind(geom: &PolarSpace, alpha: PlaneId, beta: PlaneId, p: PointId, p_target: PointId) -> Result<SecondKindExtension> {
    let (o, l, m) = second_kind_lines(geom, alpha, beta, p, p_target)?;
    let x0 = geom.line(l)[0];
    let xbar = (0..geom.num_points() as u32).find(|&y| geom.opposite(x0, y)).unwrap();
    let gq = GqView::new(geom, x0, xbar)?;
    let rep = |ln: LineId| gq.from_residue(geom, ln).expect("line through x0 meets x̄⊥");
    let y = geom.proj_point_to_line(x0, m).expect("x0 sees a unique point of M");
    let (d, q, n, u, u_target) = (
        rep(line(geom, x0, o)?),
        rep(l),
        rep(line(geom, x0, y)?),
        rep(line(geom, x0, p)?),
        rep(line(geom, x0, p_target)?),
    );
    let root = GqRoot::second(geom, q, d, n, u)?;
    let j1 = j_choices(geom, xbar, u)[0];
    let seed = build_second_kind_gq_elation(geom, &gq, &root, u_target, j1)?;

    let alpha_pts = geom.plane(alpha);
    let beta_pts = geom.plane(beta);
    let mut maps: HashMap<PointId, ResidueMap> = HashMap::new();
    maps.insert(x0, seed.theta.map.clone());
    let mut queue = VecDeque::from([x0]);
    let (mut copies, mut copy_discrepancies) = (0, 0);
    while let Some(a) = queue.pop_front() {
        let other = if alpha_pts.contains(&a) { beta_pts } else { alpha_pts };
        for &v in other.iter().filter(|&&v| v != o && geom.opposite(a, v)) {
            let c = maps[&a].copy_to(geom, v)?;
            copies += 1;
            match maps.get(&v) {
                Some(existing) => {
                    if existing != &c {
                        copy_discrepancies += 1;
                    }
                }
                None => {
                    maps.insert(v, c);
                    queue.push_back(v);
                }
            }
        }
    }
    let missing = alpha_pts.iter().chain(beta_pts).filter(|&&v| v != o && !maps.contains_key(&v)).count();
    if missing > 0 {
        return Err(Error::CoverageIncomplete { missing });
    }

    let n_pts = geom.num_points();
    let mut img = vec![0u32; n_pts];
    let mut provenance = Vec::with_capacity(n_pts);
    let mut choice_discrepancies = 0;
    let perp_line = |pts: &[PointId], w: PointId| -> LineId {
        let s: Vec<PointId> = pts.iter().copied().filter(|&x| geom.collinear(x, w)).collect();
        geom.line_id(&s).expect("plane meets w⊥ in a line")
    };
    for w in 0..n_pts as u32 {
        if alpha_pts.contains(&w) || beta_pts.contains(&w) {
            img[w as usize] = w;
            provenance.push(SecondKindCase::InAlphaBeta);
            continue;
        }
        let (a_line, b_line) = (perp_line(alpha_pts, w), perp_line(beta_pts, w));
        let pi = geom.plane_through(a_line, w).unwrap();
        let sigma = geom.plane_through(b_line, w).unwrap();
        let mut candidates: Vec<PointId> = Vec::new();
        if geom.opposite(w, o) {
            for &a in geom.line(a_line) {
                let pi_img = maps[&a].image_plane(pi).unwrap();
                for &b in geom.line(b_line) {
                    let s_img = maps[&b].image_plane(sigma).unwrap();
                    candidates.push(
                        single_common(geom.plane(pi_img), geom.plane(s_img))
                            .ok_or_else(|| Error::RecipeDegenerate(format!("image planes for {w} do not meet in a point")))?,
                    );
                }
            }
            provenance.push(SecondKindCase::OppositeO);
        } else if geom.line(a_line).iter().all(|&a| geom.line(b_line).iter().all(|&b| geom.collinear(a, b))) {
            candidates.push(w);
            provenance.push(SecondKindCase::PerpCoplanar);
        } else {
            for &a in geom.line(a_line).iter().filter(|&&a| a != o) {
                let aw = maps[&a].image_line(geom.line_through(a, w).unwrap()).unwrap();
                candidates
                    .push(single_common(geom.line(aw), geom.plane(sigma)).ok_or_else(|| Error::RecipeDegenerate(format!("η_a(aw) misses ⟨w, B⟩ for {w}")))?);
            }
            for &b in geom.line(b_line).iter().filter(|&&b| b != o) {
                let bw = maps[&b].image_line(geom.line_through(b, w).unwrap()).unwrap();
                candidates.push(single_common(geom.line(bw), geom.plane(pi)).ok_or_else(|| Error::RecipeDegenerate(format!("η_b(bw) misses ⟨w, A⟩ for {w}")))?);
            }
            provenance.push(SecondKindCase::PerpNonCoplanar);
        }
        img[w as usize] = candidates[0];
        if candidates.iter().any(|&c| c != candidates[0]) {
            choice_discrepancies += 1;
        }
    }
    Ok(SecondKindExtension {
        alpha,
        beta,
        o,
        p,
        p_target,
        seed: seed.recipe,
        perm: Perm(img),
        provenance,
        copies,
        copy_discrepancies,
        choice_discrepancies,
    })
}
