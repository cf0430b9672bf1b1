//! Coverage: every root elation of a point residual comes out of some recipe instance.

use serde::{Deserialize, Serialize};

use crate::frames::{GqApartment, GqRoot};
use crate::geometry::PolarSpace;
use crate::gq_elation::{sweep_root, GqRecipe};
use crate::oracle::gq_pointwise_stabilizer;
use crate::perm::Perm;
use crate::subspace::GqView;
use crate::verify::{certify_root_elation, check_collineation, dedup_perms, IncidenceIndex, RootRequirements};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Realization {
    pub elation: Perm,
    pub recipe: Option<GqRecipe>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationReport {
    pub pass: bool,
    /// Certified members of the linear pointwise stabilizer, identity included.
    pub root_group_order: usize,
    pub nontrivial: Vec<Realization>,
    pub instances: usize,
    pub failed_instances: usize,
    /// Recipe outputs that are not certified root elations.
    pub stray_outputs: usize,
}

/// Enumerates the root elations of `root` independently and matches each nontrivial one to a recipe instance.
pub fn realize_all_residual_elations(geom: &PolarSpace, gq: &GqView, root: &GqRoot, apartments: &[GqApartment]) -> RealizationReport {
    let index = IncidenceIndex::new(gq);
    let req = RootRequirements::for_gq_root(geom, gq, root, apartments);
    let fixed: Vec<_> = req.fixed_points.iter().map(|&i| gq.global(i)).collect();
    let group: Vec<Perm> = gq_pointwise_stabilizer(geom, gq, &fixed)
        .into_iter()
        .filter(|g| certify_root_elation(&check_collineation(&index, g), &req).pass)
        .collect();
    let outputs = sweep_root(geom, gq, root);
    let instances = outputs.len();
    let built: Vec<_> = outputs.into_iter().filter_map(|r| r.ok()).collect();
    let failed_instances = instances - built.len();
    let produced = dedup_perms(built.iter().map(|e| e.perm.clone()));
    let stray_outputs = produced.iter().filter(|p| group.binary_search(p).is_err()).count();
    let nontrivial: Vec<Realization> = group
        .iter()
        .filter(|g| !g.is_identity())
        .map(|g| Realization {
            elation: g.clone(),
            recipe: built.iter().find(|e| &e.perm == g).map(|e| e.recipe.clone()),
        })
        .collect();
    let pass = failed_instances == 0 && stray_outputs == 0 && nontrivial.iter().all(|r| r.recipe.is_some());
    RealizationReport {
        pass,
        root_group_order: group.len(),
        nontrivial,
        instances,
        failed_instances,
        stray_outputs,
    }
}
