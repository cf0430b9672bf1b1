//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so the lines
//! are printed on a plain `cargo test`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use mforge_core::configs::{first_kind_root, sample_first_kind_configs, sample_second_kind_configs};
use mforge_core::extend::{extend_first_kind, extend_second_kind};
use mforge_core::form::FormSpec;
use mforge_core::frames::GqRootKind;
use mforge_core::geometry::{axiom_check, PolarSpace};
use mforge_core::h3::build_icosahedron;
use mforge_core::oracle::pointwise_stabilizer_oracle;
use mforge_core::pentagon::pentagon_feasibility;
use mforge_core::pentagon::PentagonParams;
use mforge_core::report::{Outcome, VerificationReport as Report};
use mforge_core::suite::*;
use mforge_core::verify::verify_fixed_structure;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Pass count, total, and the first failure for `claim`.
fn tally(reports: &[Report], claim: &str) -> (usize, usize, Option<String>) {
    let of: Vec<&Report> = reports.iter().filter(|r| r.claim == claim).collect();
    let pass = of.iter().filter(|r| r.result == Outcome::Pass).count();
    let first = of
        .iter()
        .find(|r| r.result != Outcome::Pass)
        .map(|r| format!("{} [{}]: {:?}", r.claim, r.instance, r.witnesses.first()));
    (pass, of.len(), first)
}

/// Every listed claim present with at least `min` instances, all passing.
fn claims_pass(reports: &[Report], claims: &[(&str, usize)]) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for &(c, min) in claims {
        let (p, n, first) = tally(reports, c);
        ok &= p == n && n >= min;
        parts.push(format!("{c} {p}/{n}"));
        if let Some(f) = first {
            parts.push(f);
        }
    }
    verdict(ok, parts.join(", "))
}

fn sum_count(reports: &[Report], claim: &str, key: &str) -> u64 {
    reports
        .iter()
        .filter(|r| r.claim == claim)
        .map(|r| r.counts.get(key).copied().unwrap_or(0))
        .sum()
}

/// Projective points of F_q^n with Q(x) = 0 for the given quadratic form, by brute force.
fn isotropic_points(n: usize, q: u64, quad: impl Fn(&[u64]) -> u64) -> u64 {
    let total = q.pow(n as u32);
    let mut count = 0;
    let mut x = vec![0u64; n];
    for mut code in 1..total {
        for c in x.iter_mut() {
            *c = code % q;
            code /= q;
        }
        if quad(&x).is_multiple_of(q) {
            count += 1;
        }
    }
    count / (q - 1)
}

/// Builds and checks each space, each within 10 s.
fn criterion_1(specs: &[FormSpec]) -> (Verdict, Vec<PolarSpace>) {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut built = Vec::new();
    for spec in specs {
        let t = Instant::now();
        let g = PolarSpace::build(spec).unwrap();
        let q = g.q() as u64;
        let points = match g.form().kind() {
            // every vector is isotropic for an alternating form
            mforge_core::form::FormKind::Alternating => isotropic_points(6, q, |_| 0),
            mforge_core::form::FormKind::QuadraticParabolic => isotropic_points(7, q, |x| x[0] * x[0] + x[1] * x[2] + x[3] * x[4] + x[5] * x[6]),
        };
        // each point lies on (q+1)(q²+1) lines of q+1 points; each line on q+1 planes of q²+q+1 lines
        let lines = points * (q + 1) * (q * q + 1) / (q + 1);
        let planes = lines * (q + 1) / (q * q + q + 1);
        let counts = (g.num_points() as u64, g.num_lines() as u64, g.num_planes() as u64);
        let axioms = axiom_check(&g);
        let thick = axioms.as_ref().is_ok_and(|s| s.min_planes_per_line >= 2 && s.min_lines_per_point >= 2) && q >= 2;
        let el = t.elapsed();
        ok &= counts == (points, lines, planes) && thick && el < Duration::from_secs(10);
        parts.push(format!(
            "{} {}/{}/{} (oracle {points}/{lines}/{planes}) axioms {} in {:.2}s",
            space_label(&g),
            counts.0,
            counts.1,
            counts.2,
            if thick { "ok" } else { "FAILED" },
            el.as_secs_f64()
        ));
        built.push(g);
    }
    ok &= (built[0].num_points(), built[0].num_lines(), built[0].num_planes()) == (63, 315, 135);
    (verdict(ok, parts.join("; ")), built)
}

/// Ordinary quadrangles in GQ(s, t): v·s(t+1)·st·t ordered 4-gons, 8 orderings each.
fn apartments_oracle(s: u64, t: u64) -> u64 {
    let v = (s + 1) * (s * t + 1);
    v * s * (t + 1) * s * t * t / 8
}

fn criterion_2_3(ctx2: &GqContext, r2: &[Report], r3: &[Report], kind: GqRootKind) -> Verdict {
    let claim = if kind == GqRootKind::First { "gq.first-kind" } else { "gq.second-kind" };
    let roots2 = ctx2.roots.iter().filter(|r| r.kind == kind).count();
    let (p2, n2, f2) = tally(r2, claim);
    let (p3, n3, f3) = tally(r3, claim);
    let inst3 = sum_count(r3, claim, "instances");
    let apartments_ok = ctx2.apartments.len() as u64 == apartments_oracle(2, 2) && ctx2.roots.len() as u64 == 8 * apartments_oracle(2, 2) / 2;
    let mut ok = p2 == n2 && n2 == roots2 && roots2 > 0 && apartments_ok;
    let mut detail = format!(
        "q=2 {p2}/{n2} roots of {roots2} ({} instances); {} apartments, {} roots (oracle {}, {})",
        sum_count(r2, claim, "instances"),
        ctx2.apartments.len(),
        ctx2.roots.len(),
        apartments_oracle(2, 2),
        8 * apartments_oracle(2, 2) / 2
    );
    ok &= p3 == n3 && n3 > 0 && inst3 >= 100;
    detail.push_str(&format!("; q=3 {p3}/{n3} sampled roots, {inst3} instances"));
    for f in [f2, f3].into_iter().flatten() {
        detail.push_str(&format!("; {f}"));
    }
    verdict(ok, detail)
}

fn criterion_4(ctx2: &GqContext, ctx3: &GqContext, m2: &[Report], m3: &[Report]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, ctx, m) in [(2u64, ctx2, m2), (3, ctx3, m3)] {
        let (p, n, f) = tally(m, "gq.moufang");
        let per_root_ok = m
            .iter()
            .filter(|r| r.claim == "gq.moufang")
            .all(|r| r.counts.get("apartments") == Some(&q) && r.counts.get("orbit") == Some(&q));
        // each apartment holds 8 roots
        let incidence = sum_count(m, "gq.moufang", "apartments") == 8 * ctx.apartments.len() as u64;
        let oracle = ctx.apartments.len() as u64 == apartments_oracle(q, q);
        ok &= p == n && n == ctx.roots.len() && per_root_ok && incidence && oracle;
        parts.push(format!(
            "q={q} {p}/{n} roots, {} apartments (oracle {}), root-apartment incidences consistent: {incidence}",
            ctx.apartments.len(),
            apartments_oracle(q, q)
        ));
        if let Some(f) = f {
            parts.push(f);
        }
    }
    verdict(ok, parts.join("; "))
}

fn line_set(g: &PolarSpace) -> HashSet<Vec<u32>> {
    g.lines()
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort_unstable();
            l
        })
        .collect()
}

fn criterion_6(w52: &PolarSpace, ext: &[Report], cor: &[Report]) -> Verdict {
    let lines = line_set(w52);
    let configs = sample_first_kind_configs(w52, 20, SuiteOptions::default().seed);
    let mut direct = true;
    for c in &configs {
        let Ok(e) = extend_first_kind(w52, c.d, c.q, c.m, c.m_target) else {
            direct = false;
            continue;
        };
        direct &= w52.lines().iter().all(|l| lines.contains(&e.perm.image_set(l)));
        direct &= first_kind_root(w52, c).is_ok_and(|r| verify_fixed_structure(w52, &e.perm, &r).pass);
    }
    let first_fixpoint: Vec<Report> = cor
        .iter()
        .filter(|r| r.claim == "rank3.fixed-structure" && r.instance.contains("/d"))
        .cloned()
        .collect();
    let v = claims_pass(ext, &[("extension.first-kind", 20)]);
    let f = claims_pass(&first_fixpoint, &[("rank3.fixed-structure", 20)]);
    verdict(
        v.pass && f.pass && direct && configs.len() >= 20,
        format!(
            "{}; {}; {} configs, direct line images {}",
            v.detail,
            f.detail,
            configs.len(),
            if direct { "ok" } else { "FAILED" }
        ),
    )
}

fn criterion_7(w52: &PolarSpace, ext: &[Report]) -> Verdict {
    let configs = sample_second_kind_configs(w52, 20, SuiteOptions::default().seed);
    let lines = line_set(w52);
    let direct = configs.iter().all(|c| {
        extend_second_kind(w52, c.alpha, c.beta, c.p, c.p_target).is_ok_and(|e| {
            w52.lines().iter().all(|l| lines.contains(&e.perm.image_set(l)))
                && w52.plane(c.alpha).iter().chain(w52.plane(c.beta)).all(|&x| e.perm.apply(x) == x)
        })
    });
    let v = claims_pass(ext, &[("extension.second-kind", 20)]);
    verdict(
        v.pass && direct && configs.len() >= 20,
        format!("{}; direct line images and α ∪ β fixed {}", v.detail, if direct { "ok" } else { "FAILED" }),
    )
}

fn criterion_10(w52: &PolarSpace, ext: &[Report]) -> Verdict {
    let v = claims_pass(ext, &[("oracle.membership", 40)]);
    // the oracle family of a first-kind root: q³ transvection-like maps (8 at q = 2), certified subgroup of order q
    let c = sample_first_kind_configs(w52, 1, 99)[0];
    let fam = first_kind_root(w52, &c).map(|r| pointwise_stabilizer_oracle(w52, &r).len()).unwrap_or(0);
    verdict(
        v.pass && fam == 8,
        format!("{}; interior stabilizer of a first-kind root has {fam} members (expected 8)", v.detail),
    )
}

/// Icosahedron from floating-point coordinates: distance histogram and pair classes by BFS.
fn icosahedron_oracle() -> (Vec<[usize; 4]>, [usize; 3]) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<[f64; 3]> = Vec::new();
    for s1 in [-1.0, 1.0] {
        for s2 in [-1.0, 1.0] {
            let b = [0.0, s1, s2 * phi];
            for k in 0..3 {
                v.push([b[k % 3], b[(k + 1) % 3], b[(k + 2) % 3]]);
            }
        }
    }
    let d2 = |a: &[f64; 3], b: &[f64; 3]| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>();
    let adj: Vec<Vec<usize>> = (0..12).map(|i| (0..12).filter(|&j| (d2(&v[i], &v[j]) - 4.0).abs() < 1e-9).collect()).collect();
    let mut hist = Vec::new();
    let mut pairs = [0; 3];
    for s in 0..12 {
        let mut dist = [usize::MAX; 12];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let mut h = [0; 4];
        for (t, &d) in dist.iter().enumerate() {
            h[d] += 1;
            if t > s {
                pairs[d - 1] += 1;
            }
        }
        hist.push(h);
    }
    (hist, pairs)
}

/// Floating-point eigenvalue multiplicities of the point graph of a pentagon of order (s, t).
fn multiplicities_are_integral(s: f64, t: f64) -> bool {
    let (v, k, l, m) = (1.0 + s * (t + 1.0) * (1.0 + s * t), s * (t + 1.0), s - 1.0, 1.0);
    let d = ((l - m) * (l - m) + 4.0 * (k - m)).sqrt();
    let f = ((v - 1.0) - (2.0 * k + (v - 1.0) * (l - m)) / d) / 2.0;
    let g = ((v - 1.0) + (2.0 * k + (v - 1.0) * (l - m)) / d) / 2.0;
    let int = |x: f64| (x - x.round()).abs() < 1e-6 && x > -1e-6;
    int(f) && int(g)
}

fn criterion_11(h3: &[Report]) -> Verdict {
    let v = claims_pass(
        h3,
        &[
            ("h3.census", 1),
            ("h3.relations", 1),
            ("h3.projection", 1),
            ("h3.chain", 1),
            ("h3.recipe-preconditions", 1),
            ("h3.rigidity", 1),
            ("pentagon.feasibility", 2),
        ],
    );
    let (hist, pairs) = icosahedron_oracle();
    let g = build_icosahedron();
    let mut lib_hist: Vec<[usize; 4]> = (0..12)
        .map(|p| {
            let mut h = [0; 4];
            for x in 0..12 {
                h[g.distance(p, x) as usize] += 1;
            }
            h
        })
        .collect();
    let mut oracle_hist = hist.clone();
    lib_hist.sort();
    oracle_hist.sort();
    let census = h3.iter().find(|r| r.claim == "h3.relations");
    let lib_pairs = census.map(|r| [r.counts["collinear"] as usize, r.counts["distance2"] as usize, r.counts["opposite"] as usize]);
    let geometry_ok = lib_hist == oracle_hist && lib_pairs == Some(pairs) && hist.iter().all(|h| *h == [1, 5, 5, 1]);
    let float_infeasible =
        (2..=20).all(|s| (2..=20).all(|t| !(multiplicities_are_integral(s as f64, t as f64) && multiplicities_are_integral(t as f64, s as f64))));
    let exact_agrees = (1..=20).all(|s| {
        (1..=20).all(|t| {
            pentagon_feasibility(PentagonParams::new(s, t)).feasible
                == (multiplicities_are_integral(s as f64, t as f64) && multiplicities_are_integral(t as f64, s as f64))
        })
    });
    verdict(
        v.pass && geometry_ok && float_infeasible && exact_agrees,
        format!(
            "{}; icosahedron oracle {pairs:?} pairs, histograms agree {}; floating-point multiplicities agree {}",
            v.detail,
            lib_hist == oracle_hist,
            exact_agrees
        ),
    )
}

fn main() {
    let total = Instant::now();
    let mut results: Vec<(u32, &str, Verdict, Duration, Duration)> = Vec::new();
    let opts = SuiteOptions::default();
    let mut run = |n: u32, name: &'static str, limit: Duration, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let el = t.elapsed();
        let line = format!(
            "{} criterion {n:>2} {name}: {} ({:.2}s, limit {}s)",
            if v.pass && el < limit { "PASS" } else { "FAIL" },
            v.detail,
            el.as_secs_f64(),
            limit.as_secs()
        );
        println!("{line}");
        results.push((n, name, v, el, limit));
    };
    let secs = Duration::from_secs;

    let mut geoms = Vec::new();
    run(1, "geometry soundness", secs(30), &mut || {
        let (v, g) = criterion_1(&[FormSpec::symplectic(2), FormSpec::symplectic(3), FormSpec::parabolic(3)]);
        geoms = g;
        v
    });
    let (w52, w53) = (&geoms[0], &geoms[1]);
    let ctx2 = GqContext::new(w52).unwrap();
    let ctx3 = GqContext::new(w53).unwrap();

    let mut gq2 = Vec::new();
    let mut gq3 = Vec::new();
    run(2, "first-kind quadrangle elations", secs(360), &mut || {
        gq2 = gq_elations_suite(w52, &ctx2, &opts);
        gq3 = gq_elations_suite(w53, &ctx3, &opts);
        criterion_2_3(&ctx2, &gq2, &gq3, GqRootKind::First)
    });
    run(3, "second-kind quadrangle elations", secs(60), &mut || {
        criterion_2_3(&ctx2, &gq2, &gq3, GqRootKind::Second)
    });
    run(4, "Moufang transitivity", secs(300), &mut || {
        criterion_4(&ctx2, &ctx3, &moufang_suite(w52, &ctx2, &opts), &moufang_suite(w53, &ctx3, &opts))
    });

    let mut ext2 = Vec::new();
    run(5, "eta independence and agreement", secs(120), &mut || {
        ext2 = extensions_suite(w52, &SuiteOptions { configs: 100, ..opts.clone() });
        claims_pass(
            &ext2,
            &[
                ("eta.properties", 100),
                ("eta.copy-independence", 100),
                ("eta.boundary-agreement", 100),
                ("eta.copy-coherence", 100),
                ("eta.pb-independence", 100),
                ("eta.plane-independence", 100),
            ],
        )
    });
    let mut cor2 = Vec::new();
    run(6, "first-kind extension", secs(300), &mut || {
        cor2 = rank3_corollaries_suite(w52, &opts);
        criterion_6(w52, &ext2, &cor2)
    });
    run(7, "second-kind extension", secs(300), &mut || criterion_7(w52, &ext2));
    run(8, "projectivities and realization", secs(120), &mut || {
        let r = gq_corollaries_suite(w52, &ctx2, &opts);
        let orders_ok = r.iter().filter(|x| x.claim == "gq.realization").all(|x| x.counts["root_group_order"] == 2);
        let v = claims_pass(&r, &[("gq.projectivity", ctx2.roots.len()), ("gq.realization", ctx2.roots.len())]);
        verdict(v.pass && orders_ok, format!("{}; every root group has order 2: {orders_ok}", v.detail))
    });
    run(9, "uq slide and bq chain", secs(60), &mut || {
        let a = claims_pass(&gq3, &[("gq.slide-on-uq", 1)]);
        let moved = sum_count(&gq3, "gq.slide-on-uq", "nontrivial_moves");
        let b = claims_pass(&gq2, &[("gq.bq-chain", 1)]);
        let grids = sum_count(&gq2, "gq.bq-chain", "grids");
        verdict(
            a.pass && b.pass && moved > 0 && grids > 0,
            format!("q=3 {}, {moved} moves with v ≠ v′; q=2 {}, {grids} grids all identity", a.detail, b.detail),
        )
    });
    run(10, "oracle cross-check", secs(120), &mut || criterion_10(w52, &ext2));
    run(11, "thin H3 and pentagon feasibility", secs(10), &mut || criterion_11(&h3_suite()));
    run(12, "negative controls", secs(60), &mut || {
        let r = gq_negative_controls(w52, &ctx2, &opts);
        claims_pass(
            &r,
            &[
                ("negative-control.collineation", 1),
                ("negative-control.wrong-root", 1),
                ("negative-control.identity-generator", 1),
                ("negative-control.chain", 1),
            ],
        )
    });

    let failed: Vec<u32> = results.iter().filter(|(_, _, v, el, lim)| !(v.pass && el < lim)).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        total.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
