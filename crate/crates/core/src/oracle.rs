//! Form-preserving linear maps fixing a set of points, as an independent source of collineations.

use std::collections::BTreeSet;

use crate::field::{all_vectors, coordinates, echelon, rank, Vector};
use crate::frames::Root;
use crate::geometry::{PointId, PolarSpace};
use crate::perm::Perm;
use crate::subspace::GqView;

/// All isometries g of the subspace U = span(`ambient`) with g = λ·id on span(`fixed`),
/// as permutations of `points` (Δ-ids lying in U, indexed by position). Distinct and sorted.
pub fn pointwise_stabilizer(geom: &PolarSpace, ambient: &[Vector], points: &[PointId], fixed: &[PointId]) -> Vec<Perm> {
    let form = geom.form();
    let f = form.field();
    let w_basis = echelon(f, &fixed.iter().map(|&x| *geom.point(x)).collect::<Vec<_>>());
    let u_basis = echelon(f, ambient);
    let mut basis = w_basis.clone();
    let mut complement = Vec::new();
    for v in &u_basis {
        let mut t = basis.clone();
        t.push(*v);
        if rank(f, &t) == t.len() {
            basis.push(*v);
            complement.push(*v);
        }
    }
    let dim_u = basis.len();
    let u_vectors: Vec<Vector> = all_vectors(f.q(), u_basis.len())
        .map(|c| {
            u_basis
                .iter()
                .enumerate()
                .fold(Vector::zero(form.dim()), |acc, (i, b)| acc.axpy(f, c.get(i), b))
        })
        .collect();
    let index: Vec<usize> = {
        let mut v = vec![usize::MAX; geom.num_points()];
        for (i, &x) in points.iter().enumerate() {
            v[x as usize] = i;
        }
        v
    };
    let coords: Vec<Vec<u8>> = points.iter().map(|&x| coordinates(f, &basis, geom.point(x)).expect("point in U")).collect();

    let mut out = BTreeSet::new();
    for lambda in f.elements().filter(|&l| l != 0) {
        let l2 = f.mul(lambda, lambda);
        let w_ok = w_basis
            .iter()
            .all(|a| f.mul(l2, form.quadratic(a)) == form.quadratic(a) && w_basis.iter().all(|b| f.mul(l2, form.bilinear(a, b)) == form.bilinear(a, b)));
        if !w_ok {
            continue;
        }
        let scaled_w: Vec<Vector> = w_basis.iter().map(|w| w.scale(f, lambda)).collect();
        let candidates: Vec<Vec<Vector>> = complement
            .iter()
            .map(|c| {
                u_vectors
                    .iter()
                    .copied()
                    .filter(|v| {
                        form.quadratic(v) == form.quadratic(c) && w_basis.iter().zip(&scaled_w).all(|(w, lw)| form.bilinear(v, lw) == form.bilinear(c, w))
                    })
                    .collect()
            })
            .collect();
        let mut chosen: Vec<Vector> = Vec::new();
        search(geom, &complement, &candidates, &mut chosen, &mut |ys: &[Vector]| {
            let mut images = scaled_w.clone();
            images.extend_from_slice(ys);
            if rank(f, &images) != dim_u {
                return;
            }
            let perm: Vec<u32> = coords
                .iter()
                .map(|co| {
                    let v = images.iter().enumerate().fold(Vector::zero(form.dim()), |acc, (i, b)| acc.axpy(f, co[i], b));
                    let id = geom.point_id(&v.normalized(f)).expect("isometry maps singular points to singular points");
                    index[id as usize] as u32
                })
                .collect();
            out.insert(Perm(perm));
        });
    }
    out.into_iter().collect()
}

fn search(geom: &PolarSpace, complement: &[Vector], candidates: &[Vec<Vector>], chosen: &mut Vec<Vector>, emit: &mut dyn FnMut(&[Vector])) {
    let k = chosen.len();
    if k == complement.len() {
        emit(chosen);
        return;
    }
    let form = geom.form();
    for &y in &candidates[k] {
        if (0..k).all(|i| form.bilinear(&chosen[i], &y) == form.bilinear(&complement[i], &complement[k])) {
            chosen.push(y);
            search(geom, complement, candidates, chosen, emit);
            chosen.pop();
        }
    }
}

/// Rank 3: isometries of the whole space fixing every interior point of the root.
pub fn pointwise_stabilizer_oracle(geom: &PolarSpace, root: &Root) -> Vec<Perm> {
    let dim = geom.form().dim();
    let ambient: Vec<Vector> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
    let points: Vec<PointId> = (0..geom.num_points() as u32).collect();
    pointwise_stabilizer(geom, &ambient, &points, &root.interior_points())
}

/// Quadrangle level: isometries of ⟨p, b⟩⊥ fixing the given (global) points, as permutations of local indices of `gq`.
pub fn gq_pointwise_stabilizer(geom: &PolarSpace, gq: &GqView, fixed: &[PointId]) -> Vec<Perm> {
    let form = geom.form();
    let f = form.field();
    let (pv, bv) = (*geom.point(gq.p), *geom.point(gq.b));
    let ambient: Vec<Vector> = all_vectors(f.q(), form.dim())
        .filter(|v| form.bilinear(v, &pv) == 0 && form.bilinear(v, &bv) == 0)
        .collect();
    pointwise_stabilizer(geom, &echelon(f, &ambient), &gq.points, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::FormSpec;
    use crate::frames::{apartment_from_frame, frame_search, root_of_apartment, RootKind};
    use std::collections::BTreeMap;

    #[test]
    fn identity_present_and_family_sizes() {
        let g = PolarSpace::build(&FormSpec::symplectic(2)).unwrap();
        let a = apartment_from_frame(&g, &frame_search(&g, &BTreeMap::new()).unwrap());
        let first = pointwise_stabilizer_oracle(&g, &root_of_apartment(&a, RootKind::First(1, 2)).unwrap());
        assert!(first.iter().any(|p| p.is_identity()));
        assert_eq!(first.len(), 8);
        let second = pointwise_stabilizer_oracle(&g, &root_of_apartment(&a, RootKind::Second(1)).unwrap());
        assert_eq!(second.len(), 2);
    }
}
