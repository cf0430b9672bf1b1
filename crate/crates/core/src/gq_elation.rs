//! Root elations of the quadrangle p⊥ ∩ b⊥ as length-4 self-projectivities of Res(p).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{GqRoot, GqRootKind};
use crate::geometry::{LineId, PointId, PolarSpace};
use crate::perm::Perm;
use crate::subspace::{compose_projectivity, GqView, Projectivity};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstKindRecipe {
    pub p: PointId,
    pub b: PointId,
    pub q: PointId,
    pub d: PointId,
    pub u: PointId,
    pub n: PointId,
    pub u_target: PointId,
    pub n_target: PointId,
    pub j: PointId,
    pub i: PointId,
    pub ell: PointId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecondKindRecipe {
    pub p: PointId,
    pub b: PointId,
    pub d: PointId,
    pub q: PointId,
    pub u: PointId,
    pub n: PointId,
    pub u_target: PointId,
    pub j1: PointId,
    pub j2: PointId,
    pub ell: PointId,
    pub j: PointId,
}

/// A recipe output: the chain, its realized map on Res(p) and the induced quadrangle permutation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GqElation<R> {
    pub recipe: R,
    pub theta: Projectivity,
    /// Permutation of the quadrangle's local point indices.
    pub perm: Perm,
}

pub(crate) fn line(geom: &PolarSpace, x: PointId, y: PointId) -> Result<LineId> {
    geom.line_through(x, y)
        .ok_or_else(|| Error::Precondition(format!("points {x} and {y} are not collinear")))
}

pub(crate) fn meet(geom: &PolarSpace, a: LineId, b: LineId) -> Option<PointId> {
    let mut common = geom.line(a).iter().copied().filter(|&x| geom.line_contains(b, x));
    let x = common.next()?;
    common.next().is_none().then_some(x)
}

fn proj(geom: &PolarSpace, x: PointId, l: LineId, what: &str) -> Result<PointId> {
    geom.proj_point_to_line(x, l)
        .ok_or_else(|| Error::RecipeDegenerate(format!("{what} is not a unique projection")))
}

fn chain(geom: &PolarSpace, bases: [PointId; 5]) -> Result<Projectivity> {
    compose_projectivity(geom, &bases).map_err(|e| match e {
        Error::ConsecutiveNotOpposite { index } => Error::ChainNotOpposite { index },
        e => e,
    })
}

/// Points of pq other than p and q.
pub fn j_choices(geom: &PolarSpace, p: PointId, q: PointId) -> Vec<PointId> {
    match geom.line_through(p, q) {
        Some(l) => geom.line(l).iter().copied().filter(|&x| x != p && x != q).collect(),
        None => Vec::new(),
    }
}

/// Targets (u′, n′) for a first-kind root: u′ ∈ uq∖{q} and n′ the point of nd collinear to u′.
/// The pair (u, n) itself is included and yields the identity.
pub fn first_kind_targets(geom: &PolarSpace, root: &GqRoot) -> Vec<(PointId, PointId)> {
    let uq = geom.line_through(root.u, root.q).unwrap();
    let nd = geom.line_through(root.n, root.d).unwrap();
    geom.line(uq)
        .iter()
        .copied()
        .filter(|&x| x != root.q)
        .map(|x| (x, geom.proj_point_to_line(x, nd).unwrap()))
        .collect()
}

/// Targets u′ for a second-kind root: points of Γ collinear to n and q other than d. Includes u.
pub fn second_kind_targets(geom: &PolarSpace, gq: &GqView, root: &GqRoot) -> Vec<PointId> {
    gq.points
        .iter()
        .copied()
        .filter(|&x| x != root.d && geom.collinear(x, root.n) && geom.collinear(x, root.q))
        .collect()
}

fn finish<R>(geom: &PolarSpace, gq: &GqView, recipe: R, theta: Projectivity) -> Result<GqElation<R>> {
    let perm = gq.perm_from_residue_map(geom, &theta.map)?;
    Ok(GqElation { recipe, theta, perm })
}

/// θ = proj_p^ℓ ∘ proj_ℓ^j ∘ proj_j^b ∘ proj_b^p with i = ju ∩ pu′ and ℓ = proj_bd(i).
pub fn build_first_kind_gq_elation(
    geom: &PolarSpace,
    gq: &GqView,
    root: &GqRoot,
    u_target: PointId,
    n_target: PointId,
    j: PointId,
) -> Result<GqElation<FirstKindRecipe>> {
    if root.kind != GqRootKind::First {
        return Err(Error::Precondition("root is not of the first kind".into()));
    }
    let (p, b) = (gq.p, gq.b);
    let (q, d, u, n) = (root.q, root.d, root.u, root.n);
    let uq = line(geom, u, q)?;
    let nd = line(geom, n, d)?;
    if !geom.line_contains(uq, u_target) || u_target == q {
        return Err(Error::Precondition(format!("u′ = {u_target} is not on uq∖{{q}}")));
    }
    if !geom.line_contains(nd, n_target) || geom.proj_point_to_line(u_target, nd) != Some(n_target) {
        return Err(Error::BadConfiguration(format!("n′ = {n_target} is not the point of nd collinear to u′")));
    }
    if !j_choices(geom, p, q).contains(&j) {
        return Err(Error::Precondition(format!("j = {j} is not on pq∖{{p,q}}")));
    }
    let i = meet(geom, line(geom, j, u)?, line(geom, p, u_target)?).ok_or_else(|| Error::RecipeDegenerate("ju and pu′ do not meet".into()))?;
    let ell = proj(geom, i, line(geom, b, d)?, "proj_bd(i)")?;
    let theta = chain(geom, [p, b, j, ell, p])?;
    let recipe = FirstKindRecipe {
        p,
        b,
        q,
        d,
        u,
        n,
        u_target,
        n_target,
        j,
        i,
        ell,
    };
    finish(geom, gq, recipe, theta)
}

/// θ with j′ ∈ bu, j″ = proj_pu′(j′), ℓ = proj_{j′j″}(d), j = proj_pd(j′).
pub fn build_second_kind_gq_elation(geom: &PolarSpace, gq: &GqView, root: &GqRoot, u_target: PointId, j1: PointId) -> Result<GqElation<SecondKindRecipe>> {
    if root.kind != GqRootKind::Second {
        return Err(Error::Precondition("root is not of the second kind".into()));
    }
    let (p, b) = (gq.p, gq.b);
    let (q, d, u, n) = (root.q, root.d, root.u, root.n);
    if !second_kind_targets(geom, gq, root).contains(&u_target) {
        return Err(Error::Precondition(format!("u′ = {u_target} is not collinear to n and q")));
    }
    if !j_choices(geom, b, u).contains(&j1) {
        return Err(Error::Precondition(format!("j′ = {j1} is not on bu∖{{b,u}}")));
    }
    let j2 = proj(geom, j1, line(geom, p, u_target)?, "proj_pu′(j′)")?;
    if j1 == j2 {
        return Err(Error::RecipeDegenerate("j′ = j″".into()));
    }
    let ell = proj(geom, d, line(geom, j1, j2)?, "proj_{j′j″}(d)")?;
    let j = proj(geom, j1, line(geom, p, d)?, "proj_pd(j′)")?;
    let theta = chain(geom, [p, b, j, ell, p])?;
    let recipe = SecondKindRecipe {
        p,
        b,
        d,
        q,
        u,
        n,
        u_target,
        j1,
        j2,
        ell,
        j,
    };
    finish(geom, gq, recipe, theta)
}

/// Either recipe, for sweeps over roots of both kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GqRecipe {
    First(FirstKindRecipe),
    Second(SecondKindRecipe),
}

/// Every (target, j) instance of the recipe matching the root's kind, in deterministic order.
pub fn sweep_root(geom: &PolarSpace, gq: &GqView, root: &GqRoot) -> Vec<Result<GqElation<GqRecipe>>> {
    match root.kind {
        GqRootKind::First => {
            let js = j_choices(geom, gq.p, root.q);
            first_kind_targets(geom, root)
                .into_iter()
                .flat_map(|(ut, nt)| js.iter().map(move |&j| (ut, nt, j)))
                .map(|(ut, nt, j)| {
                    build_first_kind_gq_elation(geom, gq, root, ut, nt, j).map(|e| GqElation {
                        recipe: GqRecipe::First(e.recipe),
                        theta: e.theta,
                        perm: e.perm,
                    })
                })
                .collect()
        }
        GqRootKind::Second => {
            let js = j_choices(geom, gq.b, root.u);
            second_kind_targets(geom, gq, root)
                .into_iter()
                .flat_map(|ut| js.iter().map(move |&j| (ut, j)))
                .map(|(ut, j)| {
                    build_second_kind_gq_elation(geom, gq, root, ut, j).map(|e| GqElation {
                        recipe: GqRecipe::Second(e.recipe),
                        theta: e.theta,
                        perm: e.perm,
                    })
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    A,
    B,
}

/// Chain data of the two variants of the first-kind recipe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantRecipe {
    pub variant: Variant,
    pub p: PointId,
    pub b: PointId,
    pub j: PointId,
    pub ell: PointId,
    /// Variant A: the moved point and its target on uq.
    pub v: Option<(PointId, PointId)>,
    /// Variant B: whether the six lines of the grid test form a grid.
    pub grid: Option<bool>,
}

/// Variant A: ℓ = proj_bn(pv′ ∩ jv), moving v to v′ on uq.
pub fn slide_on_uq(geom: &PolarSpace, gq: &GqView, root: &GqRoot, v: PointId, v_target: PointId, j: PointId) -> Result<GqElation<VariantRecipe>> {
    let (p, b) = (gq.p, gq.b);
    let uq = line(geom, root.u, root.q)?;
    for x in [v, v_target] {
        if !geom.line_contains(uq, x) || x == root.u || x == root.q {
            return Err(Error::Precondition(format!("{x} is not on uq∖{{u,q}}")));
        }
    }
    if !j_choices(geom, p, root.q).contains(&j) {
        return Err(Error::Precondition(format!("j = {j} is not on pq∖{{p,q}}")));
    }
    let i = meet(geom, line(geom, p, v_target)?, line(geom, j, v)?).ok_or_else(|| Error::RecipeDegenerate("pv′ and jv do not meet".into()))?;
    let ell = proj(geom, i, line(geom, b, root.n)?, "proj_bn(i)")?;
    let theta = chain(geom, [p, b, j, ell, p])?;
    let recipe = VariantRecipe {
        variant: Variant::A,
        p,
        b,
        j,
        ell,
        v: Some((v, v_target)),
        grid: None,
    };
    finish(geom, gq, recipe, theta)
}

/// The grid test of variant B: with r = proj_bn(j) and s′ = proj_rj(ℓ), the line s′ℓ meets pn.
pub fn is_grid(geom: &PolarSpace, gq: &GqView, root: &GqRoot, j: PointId, ell: PointId) -> Result<bool> {
    let r = proj(geom, j, line(geom, gq.b, root.n)?, "proj_bn(j)")?;
    let s = proj(geom, ell, line(geom, r, j)?, "proj_rj(ℓ)")?;
    if s == ell {
        return Err(Error::RecipeDegenerate("ℓ lies on rj".into()));
    }
    let sl = line(geom, s, ell)?;
    let pn = line(geom, gq.p, root.n)?;
    Ok(sl == pn || meet(geom, sl, pn).is_some())
}

/// Variant B: ℓ on bq∖{q}.
pub fn bq_chain(geom: &PolarSpace, gq: &GqView, root: &GqRoot, ell: PointId, j: PointId) -> Result<GqElation<VariantRecipe>> {
    let (p, b) = (gq.p, gq.b);
    let bq = line(geom, b, root.q)?;
    if !geom.line_contains(bq, ell) || ell == root.q {
        return Err(Error::Precondition(format!("ℓ = {ell} is not on bq∖{{q}}")));
    }
    if !j_choices(geom, p, root.q).contains(&j) {
        return Err(Error::Precondition(format!("j = {j} is not on pq∖{{p,q}}")));
    }
    let grid = if ell == b { None } else { Some(is_grid(geom, gq, root, j, ell)?) };
    let theta = chain(geom, [p, b, j, ell, p])?;
    let recipe = VariantRecipe {
        variant: Variant::B,
        p,
        b,
        j,
        ell,
        v: None,
        grid,
    };
    finish(geom, gq, recipe, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;
    use crate::frames::{gq_apartments, gq_roots};

    #[test]
    fn first_kind_identity_target_gives_identity() {
        let g = PolarSpace::build(&FormSpec::symplectic(2)).unwrap();
        let b = (0..63).find(|&b| g.opposite(0, b)).unwrap();
        let gq = GqView::new(&g, 0, b).unwrap();
        let roots = gq_roots(&g, &gq_apartments(&g, &gq));
        let r = roots.iter().find(|r| r.kind == GqRootKind::First).unwrap();
        let j = j_choices(&g, gq.p, r.q)[0];
        let e = build_first_kind_gq_elation(&g, &gq, r, r.u, r.n, j).unwrap();
        assert!(e.perm.is_identity());
        let (ut, nt) = first_kind_targets(&g, r).into_iter().find(|&(x, _)| x != r.u).unwrap();
        let e = build_first_kind_gq_elation(&g, &gq, r, ut, nt, j).unwrap();
        assert!(!e.perm.is_identity());
        assert!(matches!(build_first_kind_gq_elation(&g, &gq, r, ut, r.n, j), Err(Error::BadConfiguration(_))));
    }
}
