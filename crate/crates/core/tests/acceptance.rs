//! End-to-end acceptance checks.
//!
//! Every assertion here is an exact identity over the rationals or a prime
//! field — there are no tolerances anywhere. Each test prints one pass line
//! with its elapsed time and enforces a wall-clock budget.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pachner::complex::{build_f_complex, build_g_complex};
use pachner::field::FieldTag;
use pachner::grassmann::{Generator, GrassmannElement};
use pachner::pachner::{
    common_boundary_tetrahedra, random_tet_chain, random_xchain, side_integral, verify_33,
    verify_b, verify_d1, MoveSide, WChoice,
};
use pachner::triangulation::Triangulation;
use pachner::weights::{deformed_weight, v_rows, weight, XChain};

const GF: FieldTag = FieldTag::PrimeField(1_000_003);

fn pass(name: &str, start: Instant, budget_ms: u128) {
    let elapsed = start.elapsed().as_millis();
    println!("PASS {name} ({elapsed} ms, budget {budget_ms} ms)");
    assert!(
        elapsed < budget_ms,
        "{name} took {elapsed} ms, budget {budget_ms} ms"
    );
}

/// The three f-compositions are exactly zero on the closed cluster and on
/// both sides of the two-to-four move, over many prime-field draws and a few
/// rational ones.
#[test]
fn f_complex_compositions_vanish_everywhere() {
    let start = Instant::now();
    for name in ["boundary_delta5", "pachner24_lhs", "pachner24_rhs"] {
        let tri = Triangulation::builtin(name).unwrap();
        let lat = tri.lattice().unwrap();
        let draws = (0..50u64)
            .map(|s| (GF, s))
            .chain((0..3u64).map(|s| (FieldTag::Rationals, s)));
        for (field, seed) in draws {
            let zeta = tri.random_coordinates(field, seed).unwrap();
            let f = build_f_complex(&tri, &lat, &zeta);
            assert!(f.f3.matmul(&f.f2).is_zero(), "{name} seed {seed}");
            assert!(f.f4.matmul(&f.f3).is_zero(), "{name} seed {seed}");
            assert!(f.f5.matmul(&f.f4).is_zero(), "{name} seed {seed}");
        }
    }
    pass("f-compositions", start, 30_000);
}

/// The three g-compositions are exactly zero under the same protocol.
#[test]
fn g_complex_compositions_vanish_everywhere() {
    let start = Instant::now();
    for name in ["boundary_delta5", "pachner24_lhs", "pachner24_rhs"] {
        let tri = Triangulation::builtin(name).unwrap();
        let lat = tri.lattice().unwrap();
        let draws = (0..50u64)
            .map(|s| (GF, s))
            .chain((0..3u64).map(|s| (FieldTag::Rationals, s)));
        for (field, seed) in draws {
            let zeta = tri.random_coordinates(field, seed).unwrap();
            let g = build_g_complex(&tri, &lat, &zeta);
            assert!(g.g3.matmul(&g.g2).is_zero(), "{name} seed {seed}");
            assert!(g.g4.matmul(&g.g3).is_zero(), "{name} seed {seed}");
            assert!(g.g5.matmul(&g.g4).is_zero(), "{name} seed {seed}");
        }
    }
    pass("g-compositions", start, 30_000);
}

/// The undeformed three-to-three relation holds exactly with the canonical
/// factors `(zeta_34 / zeta_23) a_1234` and `-b_1456`, over 100 prime-field
/// seeds and 5 rational ones.
#[test]
fn move_relation_holds_with_the_canonical_factors() {
    let start = Instant::now();
    let tri = Triangulation::builtin("pachner33_lhs").unwrap();
    let draws = (0..100u64)
        .map(|s| (GF, s))
        .chain((0..5u64).map(|s| (FieldTag::Rationals, s)));
    for (field, seed) in draws {
        let zeta = tri.random_coordinates(field, seed).unwrap();
        let w_lhs = GrassmannElement::from_generator(
            zeta.diff(3, 4).div(&zeta.diff(2, 3)).unwrap(),
            Generator::a([1, 2, 3, 4]),
        );
        let w_rhs = GrassmannElement::from_generator(field.integer(-1), Generator::b([1, 4, 5, 6]));
        let report = verify_33(
            &zeta,
            &WChoice::Explicit(vec![w_lhs]),
            &WChoice::Explicit(vec![w_rhs]),
        )
        .unwrap();
        assert!(report.equal, "{field} seed {seed}");
        assert_eq!(report.residual_terms(), 0, "{field} seed {seed}");
        assert!(!report.lhs_value.is_zero(), "{field} seed {seed}");
    }
    pass("three-to-three relation", start, 60_000);
}

/// Each side's integral is the same under two independent solutions of
/// `d_s(w) = 1`, for 50 seeds.
#[test]
fn side_integrals_are_independent_of_the_factor_choice() {
    let start = Instant::now();
    let tri = Triangulation::builtin("pachner33_lhs").unwrap();
    for seed in 0..50u64 {
        let zeta = tri.random_coordinates(GF, seed).unwrap();
        for name in ["pachner33_lhs", "pachner33_rhs"] {
            let side = MoveSide::builtin(name, zeta.clone()).unwrap();
            let first = side_integral(&side, None, &WChoice::Auto).unwrap();
            let second = side_integral(&side, None, &WChoice::AutoLast).unwrap();
            assert_eq!(first, second, "{name} seed {seed}");
            assert!(!first.is_zero(), "{name} seed {seed}");
        }
    }
    pass("factor independence", start, 30_000);
}

/// The deformed relation holds exactly for 100 random coefficient chains on
/// the nine common boundary tetrahedra, each with its own random coordinates.
#[test]
fn deformed_relation_holds_for_boundary_chains() {
    let start = Instant::now();
    let tri = Triangulation::builtin("pachner33_lhs").unwrap();
    let common = {
        let zeta = tri.random_coordinates(GF, 0).unwrap();
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let rhs = MoveSide::builtin("pachner33_rhs", zeta).unwrap();
        common_boundary_tetrahedra(&lhs, &rhs)
    };
    assert_eq!(common.len(), 9);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeta = tri.random_coordinates(GF, rng.gen()).unwrap();
        let chain = random_tet_chain(&common, GF, &mut rng);
        let report = verify_d1(&zeta, &chain).unwrap();
        assert!(report.equal, "seed {seed}");
        assert_eq!(report.residual_terms(), 0, "seed {seed}");
    }
    pass("deformed relation", start, 120_000);
}

/// Each side's integral is exactly unchanged when the image of a random
/// inner-tetrahedron chain is added to a random base deformation — 100
/// chain/base pairs per side.
#[test]
fn sides_are_invariant_under_inner_image_shifts() {
    let start = Instant::now();
    let tri = Triangulation::builtin("pachner33_lhs").unwrap();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeta = tri.random_coordinates(GF, rng.gen()).unwrap();
        for name in ["pachner33_lhs", "pachner33_rhs"] {
            let side = MoveSide::builtin(name, zeta.clone()).unwrap();
            let base = random_xchain(side.triangulation().simplices(), GF, &mut rng);
            let chain = random_tet_chain(side.inner_tetrahedra(), GF, &mut rng);
            assert!(
                verify_b(&side, &base, &chain).unwrap(),
                "{name} seed {seed}"
            );
        }
    }
    pass("inner-image invariance", start, 120_000);
}

/// The weight of the 4-simplex 12345 has three equal presentations:
/// `(1/zeta_45) v1 v2 v3 = -(1/zeta_35) v1 v2 v4 = (1/zeta_12) v3 v4 v5`.
#[test]
fn weight_has_three_equal_presentations() {
    let start = Instant::now();
    let u = [1u32, 2, 3, 4, 5];
    let tri = Triangulation::new(5, vec![u], None).unwrap();
    for seed in 0..100u64 {
        let field = if seed % 10 == 0 { FieldTag::Rationals } else { GF };
        let zeta = tri.random_coordinates(field, seed).unwrap();
        let v = v_rows(&u, &zeta);
        let triple = |i: usize, j: usize, k: usize, scalar: pachner::field::FieldScalar| {
            v[i].gr_mul(&v[j])
                .and_then(|x| x.gr_mul(&v[k]))
                .unwrap()
                .scale(&scalar)
        };
        let first = triple(0, 1, 2, zeta.diff(4, 5).inv().unwrap());
        let second = triple(0, 1, 3, zeta.diff(3, 5).inv().unwrap().neg());
        let third = triple(2, 3, 4, zeta.diff(1, 2).inv().unwrap());
        assert_eq!(first, second, "seed {seed}");
        assert_eq!(second, third, "seed {seed}");
        assert_eq!(first, weight(&u, &zeta), "seed {seed}");
    }
    pass("weight presentations", start, 10_000);
}

/// The deformed weight only depends on the deformation tuple modulo the plane
/// spanned by `(1,...,1)` and `(zeta_1,...,zeta_5)` — 100 random cases.
#[test]
fn deformed_weight_ignores_relation_plane_shifts() {
    let start = Instant::now();
    let u = [1u32, 2, 3, 4, 5];
    let tri = Triangulation::new(5, vec![u], None).unwrap();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeta = tri.random_coordinates(GF, rng.gen()).unwrap();
        let eps: i8 = if rng.gen::<bool>() { 1 } else { -1 };
        let mut x = XChain::zero(GF);
        for v in u {
            x.add_entry(u, v, &GF.random_scalar(&mut rng)).unwrap();
        }
        let mut shifted = x.clone();
        shifted.shift_by_relation_plane(
            u,
            &GF.random_scalar(&mut rng),
            &GF.random_scalar(&mut rng),
            &zeta,
        );
        assert_eq!(
            deformed_weight(&u, eps, &x, &zeta),
            deformed_weight(&u, eps, &shifted, &zeta),
            "seed {seed}"
        );
    }
    pass("relation-plane invariance", start, 10_000);
}

/// Deformed side integrals are supported in degrees 4, 2, 0 only, and the
/// relation holds degree by degree, under the same protocol as the deformed
/// relation check.
#[test]
fn deformed_sides_are_graded_and_match_by_degree() {
    let start = Instant::now();
    let tri = Triangulation::builtin("pachner33_lhs").unwrap();
    let common = {
        let zeta = tri.random_coordinates(GF, 0).unwrap();
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let rhs = MoveSide::builtin("pachner33_rhs", zeta).unwrap();
        common_boundary_tetrahedra(&lhs, &rhs)
    };
    let allowed: BTreeSet<usize> = [0usize, 2, 4].into_iter().collect();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeta = tri.random_coordinates(GF, rng.gen()).unwrap();
        let chain = random_tet_chain(&common, GF, &mut rng);
        let report = verify_d1(&zeta, &chain).unwrap();
        for value in [&report.lhs_value, &report.rhs_value] {
            assert!(
                value.degrees().is_subset(&allowed),
                "seed {seed}: degrees {:?}",
                value.degrees()
            );
        }
        for d in [0usize, 2, 4] {
            assert_eq!(
                report.lhs_value.graded_component(d),
                report.rhs_value.graded_component(d),
                "seed {seed} degree {d}"
            );
        }
    }
    pass("graded structure", start, 120_000);
}

fn pg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pg"))
}

/// Identical seeds produce byte-identical reports and exports.
#[test]
fn seeded_runs_are_byte_identical() {
    let start = Instant::now();
    for args in [
        &["verify", "pachner33", "--trials", "3", "--seed", "5"][..],
        &["verify", "theorem-d1", "--trials", "3", "--seed", "11"][..],
        &["verify", "f-complex", "--trials", "2", "--seed", "1"][..],
        &["explore24", "--trials", "2", "--seed", "3"][..],
    ] {
        let first = pg().args(args).output().unwrap();
        let second = pg().args(args).output().unwrap();
        assert!(first.status.success(), "{args:?}: {first:?}");
        assert!(!first.stdout.is_empty(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = pg()
            .args(["export", "--tri", "pachner33_lhs", "--seed", "4", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let names: Vec<String> = {
        let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    assert!(!names.is_empty());
    for name in names {
        let a = std::fs::read(dir_a.path().join(&name)).unwrap();
        let b = std::fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    pass("seeded determinism", start, 60_000);
}

/// The two-to-four exploration runs, reports well-formed JSON and exits 0;
/// its residuals carry no contract.
#[test]
fn exploration_runs_and_reports() {
    let start = Instant::now();
    let output = pg()
        .args(["explore24", "--trials", "2", "--seed", "0"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = 0;
    for line in text.lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(value["theorem"], "24");
        lines += 1;
    }
    assert_eq!(lines, 3);
    pass("exploration", start, 60_000);
}
