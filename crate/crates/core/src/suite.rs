//! Verification suites producing sorted report lists. Instances run in parallel over shared geometry.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configs::{first_kind_root, rng, sample_first_kind_configs, sample_second_kind_configs, second_kind_root, FirstKindConfig, SecondKindConfig};
use crate::eta::{build_eta, build_eta_with_plane, check_eta_properties};
use crate::extend::{
    admissible_pairs, boundary_agreement, copy_coherence, eta_pb_certificate, extend_first_kind, extend_first_kind_with, extend_second_kind, host_elation,
};
use crate::form::FormKind;
use crate::frames::{gq_apartments, gq_roots, GqApartment, GqRoot, GqRootKind};
use crate::geometry::{axiom_check, PointId, PolarSpace};
use crate::gq_elation::{bq_chain, j_choices, slide_on_uq, sweep_root, GqElation, GqRecipe};
use crate::h3::{
    build_icosahedron, h3_chain_eval, h3_recipe_preconditions, h3_residual_rigidity, projection_totality, relation_census, residue_elements, H3Class,
    Instantiability,
};
use crate::oracle::pointwise_stabilizer_oracle;
use crate::pentagon::{feasibility_sweep, pentagon_feasibility, PentagonParams};
use crate::perm::Perm;
use crate::realize::realize_all_residual_elations;
use crate::report::{sort_reports, VerificationReport as Report};
use crate::subspace::{compose_projectivity, residue, GqView, SingularSubspace};
use crate::verify::{
    certify_root_elation, check_collineation, moufang_transitivity, verify_fixed_structure, verify_self_projectivity, IncidenceIndex, RootRequirements,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Axioms,
    GqElations,
    Extensions,
    Moufang,
    Corollaries,
    H3,
    All,
}

impl Suite {
    pub fn needs_geometry(self) -> bool {
        self != Suite::H3
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Quadrangle roots per sampled suite when q > 2.
    pub samples: usize,
    /// Extension configurations per kind.
    pub configs: usize,
    /// Group closure cap.
    pub cap: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 100,
            configs: 20,
            cap: 1_000_000,
        }
    }
}

pub fn space_label(geom: &PolarSpace) -> String {
    let s = match geom.kind() {
        FormKind::Alternating => "w5",
        FormKind::QuadraticParabolic => "q6",
    };
    format!("{s}-q{}", geom.q())
}

/// Runs a suite. `geom` may be `None` only for the H3 suite.
pub fn run_suite(geom: Option<&PolarSpace>, suite: Suite, opts: &SuiteOptions) -> Vec<Report> {
    let mut out = Vec::new();
    let need = |s: Suite| suite == s || suite == Suite::All;
    if let Some(g) = geom {
        if need(Suite::Axioms) {
            out.extend(axioms_suite(g));
        }
        if need(Suite::GqElations) || need(Suite::Moufang) || need(Suite::Corollaries) {
            match GqContext::new(g) {
                Ok(ctx) => {
                    if need(Suite::GqElations) {
                        out.extend(gq_elations_suite(g, &ctx, opts));
                    }
                    if need(Suite::Moufang) {
                        out.extend(moufang_suite(g, &ctx, opts));
                    }
                    if need(Suite::Corollaries) {
                        out.extend(gq_corollaries_suite(g, &ctx, opts));
                    }
                }
                Err(e) => out.push(Report::error("gq.setup", space_label(g), &e)),
            }
        }
        if need(Suite::Extensions) {
            out.extend(extensions_suite(g, opts));
        }
        if need(Suite::Corollaries) {
            out.extend(rank3_corollaries_suite(g, opts));
        }
    } else if suite != Suite::H3 {
        out.push(Report::skipped("suite", format!("{suite:?}"), "no geometry"));
    }
    if need(Suite::H3) {
        out.extend(h3_suite());
    }
    sort_reports(&mut out);
    out
}

fn checked(witnesses: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        witnesses.push(msg());
    }
}

pub fn axioms_suite(geom: &PolarSpace) -> Vec<Report> {
    let label = space_label(geom);
    let q = geom.q() as u64;
    let mut out = Vec::new();

    let t = Instant::now();
    let points = (q.pow(6) - 1) / (q - 1);
    let lines = points * (q * q + 1);
    let planes = lines * (q + 1) / (q * q + q + 1);
    let mut w = Vec::new();
    checked(&mut w, geom.num_points() as u64 == points, || {
        format!("{} points, closed form {points}", geom.num_points())
    });
    checked(&mut w, geom.num_lines() as u64 == lines, || {
        format!("{} lines, closed form {lines}", geom.num_lines())
    });
    checked(&mut w, geom.num_planes() as u64 == planes, || {
        format!("{} planes, closed form {planes}", geom.num_planes())
    });
    out.push(
        Report::new("geometry.counts", &label, w.is_empty(), w)
            .count("points", geom.num_points())
            .count("lines", geom.num_lines())
            .count("planes", geom.num_planes())
            .timed(t),
    );

    let t = Instant::now();
    out.push(match axiom_check(geom) {
        Ok(s) => {
            let thick = q + 1 >= 3 && s.min_planes_per_line >= 2 && s.min_lines_per_point >= 2;
            Report::new("geometry.axioms", &label, thick, if thick { vec![] } else { vec![format!("not thick: {s:?}")] })
                .count("incidence_tests", s.incidence_tests)
                .count("min_planes_per_line", s.min_planes_per_line)
                .count("min_lines_per_point", s.min_lines_per_point)
                .timed(t)
        }
        Err(e) => Report::error("geometry.axioms", &label, &e).timed(t),
    });

    let t = Instant::now();
    out.push(match geom.check_form_agreement() {
        Ok(n) => Report::new("geometry.form-agreement", &label, true, vec![]).count("pairs", n).timed(t),
        Err(e) => Report::error("geometry.form-agreement", &label, &e).timed(t),
    });

    let t = Instant::now();
    out.push(match residue(geom, &SingularSubspace::point(0)) {
        Ok(r) => {
            let gq = r.is_generalized_quadrangle();
            Report::new(
                "geometry.residue",
                &label,
                gq,
                if gq { vec![] } else { vec!["residue of point 0 is not a quadrangle".into()] },
            )
            .timed(t)
        }
        Err(e) => Report::error("geometry.residue", &label, &e).timed(t),
    });
    out
}

/// The quadrangle p⊥ ∩ b⊥ for p = 0 and the least point opposite it, with its apartments and roots.
pub struct GqContext {
    pub gq: GqView,
    pub apartments: Vec<GqApartment>,
    pub roots: Vec<GqRoot>,
    pub index: IncidenceIndex,
}

impl GqContext {
    pub fn new(geom: &PolarSpace) -> crate::Result<Self> {
        let b = (1..geom.num_points() as PointId)
            .find(|&b| geom.opposite(0, b))
            .ok_or(crate::Error::NotOpposite(0, 0))?;
        let gq = GqView::new(geom, 0, b)?;
        let apartments = gq_apartments(geom, &gq);
        let roots = gq_roots(geom, &apartments);
        let index = IncidenceIndex::new(&gq);
        Ok(Self { gq, apartments, roots, index })
    }

    fn loc(&self, x: PointId) -> u32 {
        self.gq.local(x).expect("point of the quadrangle")
    }

    fn local_set(&self, pts: &[PointId]) -> Vec<u32> {
        let mut v: Vec<u32> = pts.iter().map(|&x| self.loc(x)).collect();
        v.sort_unstable();
        v
    }

    fn lines_through(&self, geom: &PolarSpace, x: PointId) -> Vec<Vec<u32>> {
        self.gq
            .lines_through_local(self.loc(x))
            .iter()
            .map(|&i| self.local_set(geom.line(self.gq.lines[i as usize])))
            .collect()
    }

    fn line(&self, geom: &PolarSpace, x: PointId, y: PointId) -> Vec<u32> {
        self.local_set(geom.line(geom.line_through(x, y).expect("collinear")))
    }

    /// Every root at q = 2, a seeded sample of `samples` otherwise.
    pub fn selected_roots(&self, geom: &PolarSpace, samples: usize, seed: u64) -> Vec<usize> {
        if geom.q() == 2 || samples >= self.roots.len() {
            return (0..self.roots.len()).collect();
        }
        let mut idx = sample(&mut rng(seed), self.roots.len(), samples).into_vec();
        idx.sort_unstable();
        idx
    }

    fn root_label(&self, geom: &PolarSpace, i: usize) -> String {
        let kind = match self.roots[i].kind {
            GqRootKind::First => "first",
            GqRootKind::Second => "second",
        };
        format!("{}/root-{i:05}-{kind}", space_label(geom))
    }
}

fn fixes(sigma: &Perm, pts: &[u32]) -> Option<u32> {
    pts.iter().copied().find(|&x| sigma.apply(x) != x)
}

fn stabilizes(sigma: &Perm, sets: &[Vec<u32>]) -> Option<Vec<u32>> {
    sets.iter().find(|s| &sigma.image_set(s) != *s).cloned()
}

/// The recipe-specific claims for one instance, on top of root-elation certification.
pub fn check_gq_instance(geom: &PolarSpace, ctx: &GqContext, req: &RootRequirements, e: &GqElation<GqRecipe>) -> Vec<String> {
    let s = &e.perm;
    let mut w = Vec::new();
    let cert = certify_root_elation(&check_collineation(&ctx.index, s), req);
    checked(&mut w, cert.pass, || format!("certification: {}", cert.witness.clone().unwrap_or_default()));
    let l = |x, y| ctx.line(geom, x, y);
    match &e.recipe {
        GqRecipe::First(r) => {
            if let Some(x) = fixes(s, &l(r.q, r.d)) {
                w.push(format!("point {x} of qd moved"));
            }
            let mut through = ctx.lines_through(geom, r.q);
            through.extend(ctx.lines_through(geom, r.d));
            if let Some(bad) = stabilizes(s, &through) {
                w.push(format!("line {bad:?} through q or d not stabilized"));
            }
            checked(&mut w, s.image_set(&l(r.n, r.u)) == l(r.n_target, r.u_target), || {
                "nu not mapped to n′u′".into()
            });
            checked(&mut w, s.apply(ctx.loc(r.u)) == ctx.loc(r.u_target), || "u not mapped to u′".into());
        }
        GqRecipe::Second(r) => {
            let mut pts = l(r.d, r.q);
            pts.extend(l(r.d, r.n));
            if let Some(x) = fixes(s, &pts) {
                w.push(format!("point {x} of dq ∪ dn moved"));
            }
            if let Some(bad) = stabilizes(s, &ctx.lines_through(geom, r.d)) {
                w.push(format!("line {bad:?} through d not stabilized"));
            }
            checked(&mut w, s.apply(ctx.loc(r.u)) == ctx.loc(r.u_target), || "u not mapped to u′".into());
        }
    }
    w
}

pub fn gq_elations_suite(geom: &PolarSpace, ctx: &GqContext, opts: &SuiteOptions) -> Vec<Report> {
    let roots = ctx.selected_roots(geom, opts.samples, opts.seed);
    roots
        .par_iter()
        .flat_map_iter(|&i| {
            let t = Instant::now();
            let root = &ctx.roots[i];
            let label = ctx.root_label(geom, i);
            let req = RootRequirements::for_gq_root(geom, &ctx.gq, root, &ctx.apartments);
            let claim = match root.kind {
                GqRootKind::First => "gq.first-kind",
                GqRootKind::Second => "gq.second-kind",
            };
            let mut w = Vec::new();
            let mut instances = 0;
            for r in sweep_root(geom, &ctx.gq, root) {
                instances += 1;
                match r {
                    Ok(e) => w.extend(check_gq_instance(geom, ctx, &req, &e)),
                    Err(e) => w.push(format!("error: {e}")),
                }
            }
            let mut out = vec![Report::new(claim, &label, w.is_empty(), w).count("instances", instances).timed(t)];
            if root.kind == GqRootKind::First {
                out.push(slide_on_uq_report(geom, ctx, root, &label));
                out.push(bq_chain_report(geom, ctx, root, &label));
            }
            out
        })
        .collect()
}

/// Every v, v′ ∈ uq∖{u, q} and j: v ↦ v′, lines through q and through n stabilized.
pub fn slide_on_uq_report(geom: &PolarSpace, ctx: &GqContext, root: &GqRoot, label: &str) -> Report {
    let t = Instant::now();
    let uq: Vec<PointId> = geom
        .line(geom.line_through(root.u, root.q).unwrap())
        .iter()
        .copied()
        .filter(|&x| x != root.u && x != root.q)
        .collect();
    let mut through = ctx.lines_through(geom, root.q);
    through.extend(ctx.lines_through(geom, root.n));
    let (mut w, mut instances, mut moved) = (Vec::new(), 0usize, 0usize);
    for &v in &uq {
        for &vt in &uq {
            for j in j_choices(geom, ctx.gq.p, root.q) {
                instances += 1;
                match slide_on_uq(geom, &ctx.gq, root, v, vt, j) {
                    Ok(e) => {
                        moved += usize::from(v != vt);
                        checked(&mut w, e.perm.apply(ctx.loc(v)) == ctx.loc(vt), || format!("{v} not mapped to {vt} (j = {j})"));
                        if let Some(bad) = stabilizes(&e.perm, &through) {
                            w.push(format!("line {bad:?} through q or n not stabilized (j = {j})"));
                        }
                        checked(&mut w, check_collineation(&ctx.index, &e.perm).is_verified(), || "not a collineation".into());
                    }
                    Err(e) => w.push(format!("error: {e}")),
                }
            }
        }
    }
    Report::new("gq.slide-on-uq", label, w.is_empty(), w)
        .count("instances", instances)
        .count("nontrivial_moves", moved)
        .timed(t)
}

/// Every ℓ ∈ bq∖{q} and j: lines through q stabilized, points of uq and dq fixed; grid implies identity.
pub fn bq_chain_report(geom: &PolarSpace, ctx: &GqContext, root: &GqRoot, label: &str) -> Report {
    let t = Instant::now();
    let bq = geom.line(geom.line_through(ctx.gq.b, root.q).unwrap()).to_vec();
    let through = ctx.lines_through(geom, root.q);
    let mut fixed = ctx.line(geom, root.u, root.q);
    fixed.extend(ctx.line(geom, root.d, root.q));
    let (mut w, mut instances, mut grids, mut non_grid_nontrivial) = (Vec::new(), 0usize, 0usize, 0usize);
    for &ell in bq.iter().filter(|&&x| x != root.q) {
        for j in j_choices(geom, ctx.gq.p, root.q) {
            instances += 1;
            match bq_chain(geom, &ctx.gq, root, ell, j) {
                Ok(e) => {
                    if let Some(bad) = stabilizes(&e.perm, &through) {
                        w.push(format!("line {bad:?} through q not stabilized (ℓ = {ell}, j = {j})"));
                    }
                    if let Some(x) = fixes(&e.perm, &fixed) {
                        w.push(format!("point {x} of uq ∪ dq moved (ℓ = {ell}, j = {j})"));
                    }
                    match e.recipe.grid {
                        Some(true) => {
                            grids += 1;
                            checked(&mut w, e.perm.is_identity(), || format!("grid with ℓ = {ell}, j = {j} is not the identity"));
                        }
                        Some(false) => non_grid_nontrivial += usize::from(!e.perm.is_identity()),
                        None => {}
                    }
                }
                Err(e) => w.push(format!("error: {e}")),
            }
        }
    }
    Report::new("gq.bq-chain", label, w.is_empty(), w)
        .count("instances", instances)
        .count("grids", grids)
        .count("non_grid_nontrivial", non_grid_nontrivial)
        .timed(t)
}

pub fn moufang_suite(geom: &PolarSpace, ctx: &GqContext, opts: &SuiteOptions) -> Vec<Report> {
    let roots: Vec<usize> = if geom.q() <= 3 {
        (0..ctx.roots.len()).collect()
    } else {
        ctx.selected_roots(geom, opts.samples, opts.seed)
    };
    roots
        .par_iter()
        .map(|&i| {
            let t = Instant::now();
            let root = &ctx.roots[i];
            let label = ctx.root_label(geom, i);
            let req = RootRequirements::for_gq_root(geom, &ctx.gq, root, &ctx.apartments);
            let gens: Vec<Perm> = sweep_root(geom, &ctx.gq, root)
                .into_iter()
                .filter_map(|r| r.ok())
                .map(|e| e.perm)
                .filter(|p| certify_root_elation(&check_collineation(&ctx.index, p), &req).pass)
                .collect();
            match moufang_transitivity(ctx.gq.num_points(), &gens, &req.apartments, opts.cap) {
                Ok(m) => {
                    let mut w: Vec<String> = m.witness.clone().into_iter().collect();
                    let expected = geom.q() as usize;
                    checked(&mut w, m.apartment_count == expected, || {
                        format!("{} apartments contain the root, expected {expected}", m.apartment_count)
                    });
                    Report::new("gq.moufang", &label, m.pass && w.is_empty(), w)
                        .count("generators", gens.len())
                        .count("group_order", m.group_order)
                        .count("apartments", m.apartment_count)
                        .count("orbit", m.orbit_size)
                        .timed(t)
                }
                Err(e) => Report::error("gq.moufang", &label, &e).timed(t),
            }
        })
        .collect()
}

pub fn gq_corollaries_suite(geom: &PolarSpace, ctx: &GqContext, opts: &SuiteOptions) -> Vec<Report> {
    let roots = ctx.selected_roots(geom, opts.samples, opts.seed);
    let mut out: Vec<Report> = roots
        .par_iter()
        .flat_map_iter(|&i| {
            let root = &ctx.roots[i];
            let label = ctx.root_label(geom, i);
            let t = Instant::now();
            let mut w = Vec::new();
            let mut chains = 0;
            for r in sweep_root(geom, &ctx.gq, root) {
                match r {
                    Ok(e) => {
                        chains += 1;
                        let c = verify_self_projectivity(geom, &e.theta);
                        checked(&mut w, c.pass, || format!("chain {:?}: {c:?}", e.theta.bases));
                    }
                    Err(e) => w.push(format!("error: {e}")),
                }
            }
            let chain = Report::new("gq.projectivity", &label, w.is_empty(), w).count("chains", chains).timed(t);
            let t = Instant::now();
            let rep = realize_all_residual_elations(geom, &ctx.gq, root, &ctx.apartments);
            let mut w = Vec::new();
            checked(&mut w, rep.failed_instances == 0, || {
                format!("{} recipe instances failed", rep.failed_instances)
            });
            checked(&mut w, rep.stray_outputs == 0, || {
                format!("{} recipe outputs are not root elations", rep.stray_outputs)
            });
            for r in rep.nontrivial.iter().filter(|r| r.recipe.is_none()) {
                w.push(format!("elation {:?} not realized", r.elation.0));
            }
            let realized = rep.nontrivial.iter().filter(|r| r.recipe.is_some()).count();
            let realize = Report::new("gq.realization", &label, rep.pass && w.is_empty(), w)
                .count("root_group_order", rep.root_group_order)
                .count("nontrivial", rep.nontrivial.len())
                .count("realized", realized)
                .count("instances", rep.instances)
                .timed(t);
            [chain, realize]
        })
        .collect();
    out.extend(gq_negative_controls(geom, ctx, opts));
    out
}

/// Controls that must be rejected: a transposition, an elation checked against a foreign root,
/// the identity as sole generator, and odd or open chains.
pub fn gq_negative_controls(geom: &PolarSpace, ctx: &GqContext, opts: &SuiteOptions) -> Vec<Report> {
    let label = space_label(geom);
    let mut out = Vec::new();

    let t = Instant::now();
    let mut r = rng(opts.seed);
    let n = ctx.gq.num_points();
    let (a, b) = loop {
        let (a, b) = (r.gen_range(0..n), r.gen_range(0..n));
        if a != b {
            break (a, b);
        }
    };
    let mut corrupted = Perm::identity(n);
    corrupted.0.swap(a, b);
    let c = check_collineation(&ctx.index, &corrupted);
    out.push(
        Report::new(
            "negative-control.collineation",
            &label,
            !c.is_verified() && c.witness.is_some(),
            vec![format!("transposition ({a} {b}) rejected at {}", c.witness.clone().unwrap_or_default())],
        )
        .timed(t),
    );

    let t = Instant::now();
    let root = &ctx.roots[0];
    let sigma = sweep_root(geom, &ctx.gq, root)
        .into_iter()
        .filter_map(|r| r.ok())
        .map(|e| e.perm)
        .find(|p| !p.is_identity());
    let foreign = sigma.as_ref().and_then(|s| {
        ctx.roots.iter().skip(1).find(|r2| {
            let req = RootRequirements::for_gq_root(geom, &ctx.gq, r2, &ctx.apartments);
            fixes(s, &req.fixed_points).is_some()
        })
    });
    out.push(match (sigma, foreign) {
        (Some(s), Some(r2)) => {
            let req = RootRequirements::for_gq_root(geom, &ctx.gq, r2, &ctx.apartments);
            let c = certify_root_elation(&check_collineation(&ctx.index, &s), &req);
            Report::new(
                "negative-control.wrong-root",
                &label,
                !c.pass,
                vec![format!("rejected: {}", c.witness.unwrap_or_default())],
            )
            .timed(t)
        }
        _ => Report::new(
            "negative-control.wrong-root",
            &label,
            false,
            vec!["no nontrivial elation or foreign root found".into()],
        )
        .timed(t),
    });

    let t = Instant::now();
    let req = RootRequirements::for_gq_root(geom, &ctx.gq, root, &ctx.apartments);
    out.push(match moufang_transitivity(n, &[Perm::identity(n)], &req.apartments, opts.cap) {
        Ok(m) => Report::new(
            "negative-control.identity-generator",
            &label,
            !m.pass && m.apartment_count >= 2,
            vec![format!("rejected: {}", m.witness.unwrap_or_default())],
        )
        .count("apartments", m.apartment_count)
        .timed(t),
        Err(e) => Report::error("negative-control.identity-generator", &label, &e).timed(t),
    });

    let t = Instant::now();
    let (p, b) = (ctx.gq.p, ctx.gq.b);
    let x = (0..geom.num_points() as PointId).find(|&x| geom.opposite(x, p) && geom.opposite(x, b)).unwrap();
    let odd = compose_projectivity(geom, &[p, b, x, p]).map(|th| verify_self_projectivity(geom, &th));
    let y = (0..geom.num_points() as PointId).find(|&y| geom.opposite(y, b) && y != p).unwrap();
    let open = compose_projectivity(geom, &[p, b, p, b, y]).map(|th| verify_self_projectivity(geom, &th));
    out.push(match (odd, open) {
        (Ok(o), Ok(c)) => Report::new(
            "negative-control.chain",
            &label,
            !o.pass && !o.even && !c.pass && c.even && !c.closed,
            vec![format!("odd: {o:?}; open: {c:?}")],
        )
        .timed(t),
        (Err(e), _) | (_, Err(e)) => Report::error("negative-control.chain", &label, &e).timed(t),
    });
    out
}

fn first_label(geom: &PolarSpace, c: &FirstKindConfig) -> String {
    format!("{}/d{:04}-q{:04}-m{:04}-m{:04}", space_label(geom), c.d, c.q, c.m, c.m_target)
}

fn second_label(geom: &PolarSpace, c: &SecondKindConfig) -> String {
    format!("{}/a{:04}-b{:04}-p{:04}-p{:04}", space_label(geom), c.alpha, c.beta, c.p, c.p_target)
}

pub fn extensions_suite(geom: &PolarSpace, opts: &SuiteOptions) -> Vec<Report> {
    let index = IncidenceIndex::new(geom);
    let first = sample_first_kind_configs(geom, opts.configs, opts.seed);
    let second = sample_second_kind_configs(geom, opts.configs, opts.seed);
    let mut out: Vec<Report> = first.par_iter().flat_map_iter(|c| first_kind_reports(geom, &index, c)).collect();
    let more: Vec<Report> = second.par_iter().flat_map_iter(|c| second_kind_reports(geom, &index, c)).collect();
    out.extend(more);
    out
}

pub fn first_kind_reports(geom: &PolarSpace, index: &IncidenceIndex, c: &FirstKindConfig) -> Vec<Report> {
    let label = first_label(geom, c);
    let t = Instant::now();
    let eta = match build_eta(geom, c.d, c.q, c.m, c.m_target) {
        Ok(e) => e,
        Err(e) => return vec![Report::error("eta.properties", &label, &e).timed(t)],
    };
    let mut out = Vec::new();
    let props = check_eta_properties(geom, &eta);
    out.push(
        Report::new("eta.properties", &label, props.pass(), props.witness.clone().into_iter().collect())
            .count("planes_checked", props.planes_checked)
            .count("pairs_checked", props.pairs_checked)
            .timed(t),
    );
    out.push(
        Report::new(
            "eta.copy-independence",
            &label,
            eta.copy_discrepancies == 0,
            vec![format!("{} copies disagreed", eta.copy_discrepancies)],
        )
        .count("copies", eta.copies)
        .count("discrepancies", eta.copy_discrepancies)
        .timed(t),
    );

    let t = Instant::now();
    let dq = geom.line_through(c.d, c.q).unwrap();
    let mut w = Vec::new();
    let planes = geom.planes_through_line(dq);
    for &pi in planes {
        match build_eta_with_plane(geom, c.d, c.q, c.m, c.m_target, pi) {
            Ok(e2) => checked(&mut w, e2.images == eta.images, || format!("seed plane {pi} gives a different map")),
            Err(e) => w.push(format!("seed plane {pi}: {e}")),
        }
    }
    out.push(
        Report::new("eta.plane-independence", &label, w.is_empty(), w)
            .count("planes", planes.len())
            .timed(t),
    );

    let t = Instant::now();
    let pairs = admissible_pairs(geom, c.d, c.q, c.m);
    let (mut wb, mut wc, mut points) = (Vec::new(), Vec::new(), 0usize);
    for &(p, b) in &pairs {
        match boundary_agreement(geom, &eta, p, b) {
            Ok(r) => {
                points += r.points_checked;
                checked(&mut wb, r.pass, || format!("host ({p}, {b}): {}", r.witness.clone().unwrap_or_default()));
            }
            Err(e) => wb.push(format!("host ({p}, {b}): {e}")),
        }
        match copy_coherence(geom, &eta, p, b) {
            Ok(r) => checked(&mut wc, r.pass, || format!("host ({p}, {b}): {r:?}")),
            Err(e) => wc.push(format!("host ({p}, {b}): {e}")),
        }
    }
    checked(&mut wb, !pairs.is_empty(), || "no host pair".into());
    out.push(
        Report::new("eta.boundary-agreement", &label, wb.is_empty(), wb)
            .count("host_pairs", pairs.len())
            .count("points", points)
            .timed(t),
    );
    out.push(
        Report::new("eta.copy-coherence", &label, wc.is_empty(), wc)
            .count("host_pairs", pairs.len())
            .timed(t),
    );

    let t = Instant::now();
    let (mut w, mut xs, mut min_pairs) = (Vec::new(), 0usize, usize::MAX);
    for x in 0..geom.num_points() as PointId {
        if geom.collinear(x, c.d) || geom.collinear(x, c.q) {
            continue;
        }
        xs += 1;
        match eta_pb_certificate(geom, &eta, x) {
            Ok(cert) => {
                min_pairs = min_pairs.min(cert.pairs);
                checked(&mut w, cert.distinct_images == 1, || {
                    format!("x = {x}: {} distinct images over {} pairs", cert.distinct_images, cert.pairs)
                });
                checked(&mut w, cert.pairs >= 2, || format!("x = {x}: only {} host pair", cert.pairs));
            }
            Err(e) => w.push(format!("x = {x}: {e}")),
        }
    }
    out.push(
        Report::new("eta.pb-independence", &label, w.is_empty(), w)
            .count("points", xs)
            .count("min_host_pairs", min_pairs)
            .timed(t),
    );

    let t = Instant::now();
    let ext = match extend_first_kind_with(geom, &eta) {
        Ok(e) => e,
        Err(e) => {
            out.push(Report::error("extension.first-kind", &label, &e).timed(t));
            return out;
        }
    };
    let mut w = Vec::new();
    let col = check_collineation(index, &ext.perm);
    checked(&mut w, col.is_verified(), || {
        format!("not a collineation: {}", col.witness.clone().unwrap_or_default())
    });
    checked(&mut w, ext.perm.apply(c.m) == c.m_target, || "m not mapped to m′".into());
    let mut hosts = 0;
    for &(p, b) in &pairs {
        match host_elation(geom, &eta, p, b, Some(c.m), None) {
            Ok(h) => {
                hosts += 1;
                if let Some(&x) = h.gq.points.iter().find(|&&x| h.image(x) != Some(ext.perm.apply(x))) {
                    w.push(format!("restriction to host ({p}, {b}) differs at {x}"));
                }
            }
            Err(e) => w.push(format!("host ({p}, {b}): {e}")),
        }
    }
    match extend_first_kind(geom, c.d, c.q, c.m_target, c.m) {
        Ok(inv) => checked(&mut w, ext.perm.after(&inv.perm).is_identity(), || {
            "swapped-target map is not the inverse".into()
        }),
        Err(e) => w.push(format!("inverse: {e}")),
    }
    let root = first_kind_root(geom, c);
    match &root {
        Ok(r) => {
            let cert = certify_root_elation(&col, &RootRequirements::for_root(geom, r));
            checked(&mut w, cert.pass, || format!("certification: {}", cert.witness.clone().unwrap_or_default()));
        }
        Err(e) => w.push(format!("root: {e}")),
    }
    let h = ext.histogram();
    let mut rep = Report::new("extension.first-kind", &label, w.is_empty(), w).count("host_restrictions", hosts);
    for (k, v) in h {
        rep = rep.count(&format!("case_{}", serde_json::to_value(k).unwrap().as_str().unwrap()), v);
    }
    out.push(rep.timed(t));

    let t = Instant::now();
    out.push(match root {
        Ok(r) => oracle_report(geom, &r, &ext.perm, &label).timed(t),
        Err(e) => Report::error("oracle.membership", &label, &e).timed(t),
    });
    out
}

fn oracle_report(geom: &PolarSpace, root: &crate::frames::Root, sigma: &Perm, label: &str) -> Report {
    let oracle = pointwise_stabilizer_oracle(geom, root);
    let matches = oracle.iter().filter(|g| *g == sigma).count();
    Report::new(
        "oracle.membership",
        label,
        matches == 1,
        vec![format!("{matches} oracle members equal the map")],
    )
    .count("oracle_members", oracle.len())
    .count("matches", matches)
}

pub fn second_kind_reports(geom: &PolarSpace, index: &IncidenceIndex, c: &SecondKindConfig) -> Vec<Report> {
    let label = second_label(geom, c);
    let t = Instant::now();
    let ext = match extend_second_kind(geom, c.alpha, c.beta, c.p, c.p_target) {
        Ok(e) => e,
        Err(e) => return vec![Report::error("extension.second-kind", &label, &e).timed(t)],
    };
    let mut w = Vec::new();
    let col = check_collineation(index, &ext.perm);
    checked(&mut w, col.is_verified(), || {
        format!("not a collineation: {}", col.witness.clone().unwrap_or_default())
    });
    if let Some(&x) = geom.plane(c.alpha).iter().chain(geom.plane(c.beta)).find(|&&x| ext.perm.apply(x) != x) {
        w.push(format!("point {x} of α ∪ β moved"));
    }
    if let Some(&l) = geom.lines_through(ext.o).iter().find(|&&l| ext.perm.image_set(geom.line(l)) != geom.line(l)) {
        w.push(format!("line {l} through o not stabilized"));
    }
    checked(&mut w, ext.perm.apply(c.p) == c.p_target, || "p not mapped to p′".into());
    checked(&mut w, ext.copy_discrepancies == 0, || format!("{} copies disagreed", ext.copy_discrepancies));
    checked(&mut w, ext.choice_discrepancies == 0, || {
        format!("{} points depend on the choice of a or b", ext.choice_discrepancies)
    });
    match extend_second_kind(geom, c.alpha, c.beta, c.p_target, c.p) {
        Ok(inv) => checked(&mut w, ext.perm.after(&inv.perm).is_identity(), || {
            "swapped-target map is not the inverse".into()
        }),
        Err(e) => w.push(format!("inverse: {e}")),
    }
    let root = second_kind_root(geom, c);
    match &root {
        Ok(r) => {
            let cert = certify_root_elation(&col, &RootRequirements::for_root(geom, r));
            checked(&mut w, cert.pass, || format!("certification: {}", cert.witness.clone().unwrap_or_default()));
        }
        Err(e) => w.push(format!("root: {e}")),
    }
    let mut rep = Report::new("extension.second-kind", &label, w.is_empty(), w).count("copies", ext.copies);
    for (k, v) in ext.histogram() {
        rep = rep.count(&format!("case_{}", serde_json::to_value(k).unwrap().as_str().unwrap()), v);
    }
    let mut out = vec![rep.timed(t)];
    let t = Instant::now();
    out.push(match root {
        Ok(r) => oracle_report(geom, &r, &ext.perm, &label).timed(t),
        Err(e) => Report::error("oracle.membership", &label, &e).timed(t),
    });
    out
}

/// Fixed-structure check on the extensions, checked again on every certified oracle member; and the
/// search for oracle members fixing the root's interior that fail it.
pub fn rank3_corollaries_suite(geom: &PolarSpace, opts: &SuiteOptions) -> Vec<Report> {
    let first = sample_first_kind_configs(geom, opts.configs, opts.seed);
    let second = sample_second_kind_configs(geom, opts.configs, opts.seed);
    let index = IncidenceIndex::new(geom);
    let mut out: Vec<Report> = first
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let label = first_label(geom, c);
            match (extend_first_kind(geom, c.d, c.q, c.m, c.m_target), first_kind_root(geom, c)) {
                (Ok(ext), Ok(root)) => fixpoint_report(geom, &ext.perm, &root, &label).timed(t),
                (Err(e), _) | (_, Err(e)) => Report::error("rank3.fixed-structure", &label, &e).timed(t),
            }
        })
        .collect();
    let more: Vec<Report> = second
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let label = second_label(geom, c);
            match (extend_second_kind(geom, c.alpha, c.beta, c.p, c.p_target), second_kind_root(geom, c)) {
                (Ok(ext), Ok(root)) => fixpoint_report(geom, &ext.perm, &root, &label).timed(t),
                (Err(e), _) | (_, Err(e)) => Report::error("rank3.fixed-structure", &label, &e).timed(t),
            }
        })
        .collect();
    out.extend(more);
    let roots: Vec<(String, crate::Result<crate::frames::Root>)> = first
        .first()
        .map(|c| (first_label(geom, c), first_kind_root(geom, c)))
        .into_iter()
        .chain(second.first().map(|c| (second_label(geom, c), second_kind_root(geom, c))))
        .collect();
    for (label, root) in roots {
        let t = Instant::now();
        let root = match root {
            Ok(r) => r,
            Err(e) => {
                out.push(Report::error("rank3.fixed-structure-oracle", &label, &e).timed(t));
                continue;
            }
        };
        let req = RootRequirements::for_root(geom, &root);
        let oracle = pointwise_stabilizer_oracle(geom, &root);
        let (mut w, mut certified, mut plane_failures, mut line_failures) = (Vec::new(), 0usize, 0usize, 0usize);
        for g in &oracle {
            let cert = certify_root_elation(&check_collineation(&index, g), &req);
            let fp = verify_fixed_structure(geom, g, &root);
            if cert.pass {
                certified += 1;
                checked(&mut w, fp.pass, || {
                    format!(
                        "certified oracle member fails the fixed-structure check: {}",
                        fp.witness.clone().unwrap_or_default()
                    )
                });
            } else if !fp.pass {
                let plane = fp.witness.as_deref().is_some_and(|s| s.starts_with("plane"));
                plane_failures += usize::from(plane);
                line_failures += usize::from(!plane);
            }
        }
        out.push(
            Report::new("rank3.fixed-structure-oracle", &label, w.is_empty(), w)
                .count("oracle_members", oracle.len())
                .count("certified", certified)
                .count("uncertified_failing_plane_fixing", plane_failures)
                .count("uncertified_failing_line_stabilizing", line_failures)
                .timed(t),
        );
    }
    out
}

fn fixpoint_report(geom: &PolarSpace, sigma: &Perm, root: &crate::frames::Root, label: &str) -> Report {
    let r = verify_fixed_structure(geom, sigma, root);
    Report::new("rank3.fixed-structure", label, r.pass, r.witness.clone().into_iter().collect())
        .count("planes_checked", r.planes_checked)
        .count("lines_checked", r.lines_checked)
}

pub fn h3_suite() -> Vec<Report> {
    let g = build_icosahedron();
    let mut out = Vec::new();
    let label = "icosahedron";

    let t = Instant::now();
    let census = relation_census(&g);
    let mut w = Vec::new();
    checked(&mut w, census.per_point.iter().all(|c| *c == [1, 5, 5, 1]), || {
        "distance histogram differs from (1, 5, 5, 1)".into()
    });
    checked(
        &mut w,
        g.lines.len() == 30 && g.lines.iter().all(|l| g.collinear(l[0], l[1]) && l[0] != l[1]),
        || "edges".into(),
    );
    checked(&mut w, g.planes.len() == 20, || format!("{} faces", g.planes.len()));
    out.push(
        Report::new("h3.census", label, w.is_empty(), w)
            .count("points", g.num_points())
            .count("lines", g.lines.len())
            .count("planes", g.planes.len())
            .timed(t),
    );

    let t = Instant::now();
    let pc = |c: H3Class| census.pairs.get(&c).copied().unwrap_or(0);
    let mut w = Vec::new();
    checked(
        &mut w,
        pc(H3Class::Collinear) == 30 && pc(H3Class::Distance2) == 30 && pc(H3Class::Opposite) == 6,
        || format!("pair classes {:?}", census.pairs),
    );
    checked(&mut w, census.uncertified == 0, || format!("{} pairs without certificate", census.uncertified));
    out.push(
        Report::new("h3.relations", label, w.is_empty(), w)
            .count("collinear", pc(H3Class::Collinear))
            .count("distance2", pc(H3Class::Distance2))
            .count("opposite", pc(H3Class::Opposite))
            .timed(t),
    );

    let t = Instant::now();
    let tot = projection_totality(&g);
    out.push(
        Report::new("h3.projection", label, tot.pass(), vec![format!("{tot:?}")])
            .count("plane_cases", tot.plane_cases)
            .count("line_cases", tot.line_cases)
            .count("plane_round_trips", tot.plane_round_trips)
            .count("line_round_trips", tot.line_round_trips)
            .timed(t),
    );

    let t = Instant::now();
    let mut w = Vec::new();
    let mut evaluated = 0;
    for b in 0..g.num_points() as u32 {
        let p = g.at_distance(b, 3)[0];
        for e in residue_elements(&g, b) {
            evaluated += 1;
            match (h3_chain_eval(&g, &[b, p, b], e), h3_chain_eval(&g, &[b, p, b, p, b], e)) {
                (Ok((two, _)), Ok((four, _))) => {
                    checked(&mut w, two == e, || format!("b ⊼ p ⊼ b moves {e:?} at b = {b}"));
                    checked(&mut w, four == e, || format!("closed 4-chain moves {e:?} at b = {b}"));
                }
                (Err(x), _) | (_, Err(x)) => w.push(format!("b = {b}: {x}")),
            }
        }
        let nb = g.at_distance(b, 1)[0];
        checked(&mut w, h3_chain_eval(&g, &[b, nb], residue_elements(&g, b)[0]).is_err(), || {
            "adjacent bases accepted".into()
        });
    }
    out.push(Report::new("h3.chain", label, w.is_empty(), w).count("evaluations", evaluated).timed(t));

    let t = Instant::now();
    let mut w = Vec::new();
    let mut cases = 0;
    for b in 0..g.num_points() as u32 {
        let p = g.at_distance(b, 3)[0];
        for b0 in g.at_distance(b, 1) {
            cases += 1;
            match h3_recipe_preconditions(&g, p, b, b0) {
                Ok(r) => {
                    checked(&mut w, r.conclusion == Instantiability::NotInstantiableInThinModel, || {
                        format!("b = {b}, b0 = {b0}: instantiable")
                    });
                    checked(&mut w, r.choice_sets.iter().all(|c| c.members.is_empty()), || {
                        format!("b = {b}, b0 = {b0}: nonempty choice set")
                    });
                    checked(&mut w, r.table_matches, || format!("b = {b}, b0 = {b0}: first projection table differs"));
                }
                Err(e) => w.push(format!("b = {b}, b0 = {b0}: {e}")),
            }
        }
    }
    out.push(
        Report::new("h3.recipe-preconditions", label, w.is_empty(), w)
            .count("labelings", cases)
            .timed(t),
    );

    let t = Instant::now();
    out.push(match h3_residual_rigidity(&g, 0, 8) {
        Ok(r) => Report::new("h3.rigidity", label, r.pass, r.witness.clone().into_iter().collect())
            .count("chains", r.chains_evaluated)
            .count("group_order", r.group_order)
            .timed(t),
        Err(e) => Report::error("h3.rigidity", label, &e).timed(t),
    });

    let t = Instant::now();
    let one = pentagon_feasibility(PentagonParams::new(1, 1));
    out.push(Report::new("pentagon.feasibility", "s1-t1", one.feasible, one.reason.clone().into_iter().collect()).timed(t));
    let t = Instant::now();
    let sweep = feasibility_sweep(2..=20);
    let feasible: Vec<String> = sweep
        .iter()
        .filter(|f| f.feasible)
        .map(|f| format!("({}, {}) passes both multiplicity checks", f.params.s, f.params.t))
        .collect();
    let dual_only = sweep.iter().filter(|f| f.point_graph.integral && !f.dual_point_graph.integral).count();
    out.push(
        Report::new("pentagon.feasibility", "s2..20-t2..20", feasible.is_empty(), feasible)
            .count("pairs", sweep.len())
            .count("excluded_by_dual_only", dual_only)
            .timed(t),
    );
    out
}

/// Distinct instance ids per claim, for callers that check coverage.
pub fn instances_of(reports: &[Report], claim: &str) -> BTreeSet<String> {
    reports.iter().filter(|r| r.claim == claim).map(|r| r.instance.clone()).collect()
}
