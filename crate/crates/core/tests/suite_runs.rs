use mforge_core::form::FormSpec;
use mforge_core::geometry::PolarSpace;
use mforge_core::report::{all_passed, from_jsonl, to_jsonl, Outcome};
use mforge_core::suite::{instances_of, run_suite, Suite, SuiteOptions};

fn w52() -> PolarSpace {
    PolarSpace::build(&FormSpec::symplectic(2)).unwrap()
}

#[test]
fn same_seed_gives_same_reports() {
    let g = w52();
    let opts = SuiteOptions {
        configs: 5,
        ..SuiteOptions::default()
    };
    let a: Vec<_> = run_suite(Some(&g), Suite::Extensions, &opts).iter().map(|r| r.without_timing()).collect();
    let b: Vec<_> = run_suite(Some(&g), Suite::Extensions, &opts).iter().map(|r| r.without_timing()).collect();
    assert_eq!(a, b);
    assert!(all_passed(&a));
    let other = run_suite(Some(&g), Suite::Extensions, &SuiteOptions { seed: 2, ..opts });
    assert_ne!(instances_of(&a, "extension.first-kind"), instances_of(&other, "extension.first-kind"));
}

#[test]
fn reports_are_sorted_and_round_trip() {
    let g = w52();
    let r = run_suite(Some(&g), Suite::Axioms, &SuiteOptions::default());
    assert!(r.windows(2).all(|w| (&w[0].claim, &w[0].instance) <= (&w[1].claim, &w[1].instance)));
    assert_eq!(from_jsonl(&to_jsonl(&r)).unwrap(), r);
    assert_eq!(r.iter().find(|x| x.claim == "geometry.counts").unwrap().counts["lines"], 315);
}

#[test]
fn h3_suite_needs_no_geometry() {
    let r = run_suite(None, Suite::H3, &SuiteOptions::default());
    assert!(!r.is_empty() && all_passed(&r));
    let skipped = run_suite(None, Suite::Axioms, &SuiteOptions::default());
    assert!(skipped.iter().all(|x| x.result == Outcome::Skipped));
}

#[test]
fn parabolic_quadric_passes_axioms_and_quadrangle_suites() {
    let g = PolarSpace::build(&FormSpec::parabolic(2)).unwrap();
    let r = run_suite(Some(&g), Suite::GqElations, &SuiteOptions::default());
    assert!(all_passed(&r), "{}", mforge_core::report::summary_table(&r));
    assert!(!instances_of(&r, "gq.first-kind").is_empty());
}
