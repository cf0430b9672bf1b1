use mforge_core::form::FormSpec;
use mforge_core::geometry::PolarSpace;
use mforge_core::gq_elation::{bq_chain, j_choices};
use mforge_core::suite::GqContext;

/// Off the grid case the map is a transvection with centre q on the quadrangle, so its fixed
/// points are exactly the points collinear with q, and it has order q.
fn transvection_shape(q: u8) {
    let g = PolarSpace::build(&FormSpec::symplectic(q)).unwrap();
    let ctx = GqContext::new(&g).unwrap();
    let root = ctx.roots.iter().find(|r| r.kind == mforge_core::frames::GqRootKind::First).unwrap();
    let bq = g.line(g.line_through(ctx.gq.b, root.q).unwrap()).to_vec();
    let mut non_identity = 0;
    for &ell in bq.iter().filter(|&&x| x != root.q) {
        for j in j_choices(&g, ctx.gq.p, root.q) {
            let e = bq_chain(&g, &ctx.gq, root, ell, j).unwrap();
            let fixed: Vec<u32> = (0..ctx.gq.points.len() as u32)
                .filter(|&x| e.perm.apply(x) == x)
                .map(|x| ctx.gq.points[x as usize])
                .collect();
            let collinear: Vec<u32> = ctx.gq.points.iter().copied().filter(|&x| g.collinear(x, root.q)).collect();
            if ell == ctx.gq.b || q == 2 {
                assert!(e.perm.is_identity(), "ℓ = {ell}");
                continue;
            }
            non_identity += 1;
            assert_eq!(fixed, collinear, "ℓ = {ell}, j = {j}");
            let mut power = e.perm.clone();
            for _ in 1..q {
                power = power.after(&e.perm);
            }
            assert!(power.is_identity());
        }
    }
    if q > 2 {
        assert!(non_identity > 0);
    }
}

#[test]
fn grid_map_is_identity_in_characteristic_two() {
    transvection_shape(2);
}

#[test]
fn non_grid_map_is_a_transvection_at_q3() {
    transvection_shape(3);
}

#[test]
fn non_grid_map_is_a_transvection_at_q5() {
    transvection_shape(5);
}
