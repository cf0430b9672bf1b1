//! Seeded instance generation for the extension constructions, and the roots they belong to.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IteratorRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extend::second_kind_lines;
use crate::frames::{apartment_from_frame, root_of_apartment, PolarFrame, Root, RootKind};
use crate::geometry::{PlaneId, PointId, PolarSpace};

/// Input of the first-kind extension: d ⊥ q, m ∉ q⊥, m′ ∈ dm∖{d, m}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FirstKindConfig {
    pub d: PointId,
    pub q: PointId,
    pub m: PointId,
    pub m_target: PointId,
}

/// Input of the second-kind extension: planes meeting in one point o, p and p′ opposite o.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SecondKindConfig {
    pub alpha: PlaneId,
    pub beta: PlaneId,
    pub p: PointId,
    pub p_target: PointId,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn perp_points(geom: &PolarSpace, x: PointId) -> Vec<PointId> {
    geom.perp(x).ones().map(|i| i as PointId).filter(|&y| y != x).collect()
}

/// Up to `count` distinct first-kind configurations, sorted.
pub fn sample_first_kind_configs(geom: &PolarSpace, count: usize, seed: u64) -> Vec<FirstKindConfig> {
    let mut rng = rng(seed);
    let mut out = BTreeSet::new();
    let n = geom.num_points() as PointId;
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let d = (0..n).choose(&mut rng).unwrap();
        let dperp = perp_points(geom, d);
        let q = *dperp.choose(&mut rng).unwrap();
        let Some(&m) = dperp.iter().filter(|&&x| !geom.collinear(x, q)).choose(&mut rng) else {
            continue;
        };
        let dm = geom.line_through(d, m).unwrap();
        let m_target = geom.line(dm).iter().copied().filter(|&x| x != d && x != m).choose(&mut rng).unwrap();
        out.insert(FirstKindConfig { d, q, m, m_target });
    }
    out.into_iter().collect()
}

/// Up to `count` distinct second-kind configurations, sorted.
pub fn sample_second_kind_configs(geom: &PolarSpace, count: usize, seed: u64) -> Vec<SecondKindConfig> {
    let mut rng = rng(seed);
    let mut out = BTreeSet::new();
    let np = geom.num_planes() as PlaneId;
    for _ in 0..count * 50 {
        if out.len() == count {
            break;
        }
        let alpha = (0..np).choose(&mut rng).unwrap();
        let o = *geom.plane(alpha).choose(&mut rng).unwrap();
        let Some(&beta) = geom
            .planes_through_point(o)
            .iter()
            .filter(|&&b| geom.plane(b).iter().filter(|x| geom.plane(alpha).contains(x)).count() == 1)
            .choose(&mut rng)
        else {
            continue;
        };
        let opp: Vec<PointId> = (0..geom.num_points() as PointId).filter(|&x| geom.opposite(x, o)).collect();
        let Some(&p) = opp.iter().filter(|&&x| second_kind_lines(geom, alpha, beta, x, x).is_ok()).choose(&mut rng) else {
            continue;
        };
        let Some(&p_target) = opp
            .iter()
            .filter(|&&x| x != p && second_kind_lines(geom, alpha, beta, p, x).is_ok())
            .choose(&mut rng)
        else {
            continue;
        };
        out.insert(SecondKindConfig { alpha, beta, p, p_target });
    }
    out.into_iter().collect()
}

/// The first-kind root with p₋₁ = d, p₋₂ = q, p₂ = m.
pub fn first_kind_root(geom: &PolarSpace, c: &FirstKindConfig) -> Result<Root> {
    let frame = crate::frames::frame_search(geom, &BTreeMap::from([(-1, c.d), (-2, c.q), (2, c.m)]))?;
    root_of_apartment(&apartment_from_frame(geom, &frame), RootKind::First(1, 2))
}

/// The second-kind root with p₋₁ = o, p₁ = p, α = ⟨p₋₁, p₂, p₃⟩, β = ⟨p₋₁, p₋₂, p₋₃⟩.
pub fn second_kind_root(geom: &PolarSpace, c: &SecondKindConfig) -> Result<Root> {
    let (o, l, m) = second_kind_lines(geom, c.alpha, c.beta, c.p, c.p_target)?;
    let p2 = geom.line(l)[0];
    let pm3 = geom.proj_point_to_line(p2, m).ok_or(Error::NoFrame)?;
    let pm2 = *geom.line(m).iter().find(|&&x| x != pm3).unwrap();
    let p3 = geom.proj_point_to_line(pm2, l).ok_or(Error::NoFrame)?;
    let frame = PolarFrame::new(geom, &BTreeMap::from([(1, c.p), (2, p2), (3, p3), (-1, o), (-2, pm2), (-3, pm3)]))?;
    root_of_apartment(&apartment_from_frame(geom, &frame), RootKind::Second(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let g = PolarSpace::build(&FormSpec::symplectic(2)).unwrap();
        let a = sample_first_kind_configs(&g, 20, 7);
        assert_eq!(a, sample_first_kind_configs(&g, 20, 7));
        assert_eq!(a.len(), 20);
        for c in &a {
            let r = first_kind_root(&g, c).unwrap();
            assert!(r.interior_points().contains(&c.d) && r.interior_points().contains(&c.q));
        }
        let b = sample_second_kind_configs(&g, 20, 7);
        assert_eq!(b.len(), 20);
        for c in &b {
            let r = second_kind_root(&g, c).unwrap();
            let inside: BTreeSet<PointId> = r.interior_points().into_iter().collect();
            assert!(g.plane(c.alpha).iter().chain(g.plane(c.beta)).all(|x| inside.contains(x)));
        }
    }
}
