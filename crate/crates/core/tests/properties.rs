//! Property tests for the invariants of each module.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weavelab::frame::{
    analyze, check_approximate_frame, equivalence_constants, frame_operator, suppression_constant, unconditional_constant,
    FrameSystem,
};
use weavelab::gallery::{self, GalleryName};
use weavelab::io::FrameSystemFile;
use weavelab::norm::{dual_norm, vector_norm, NormKind, NormedSpace};
use weavelab::operator::{invert, operator_norm, DenseOperator};
use weavelab::pattern::WeavePattern;
use weavelab::perturb::{basis_budget, basis_perturbation_check, operator_perturbation_check, pair_perturbation_check, PerturbationOptions};
use weavelab::random::{operator_at_distance, perturbed_basis, random_basis, random_frame, random_invertible, random_matrix, random_unconditional_basis};
use weavelab::search::SearchOptions;
use weavelab::subspace::{basis_projection, subspace_distance, SpannedSubspace};
use weavelab::unc::{unc_conditions, Condition, UncOptions};
use weavelab::weave::{partial_operator, partial_operator_subset, weave, worst_weaving, IntervalQuery, WeaveOptions};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn norm_kind() -> impl Strategy<Value = NormKind> {
    prop_oneof![Just(NormKind::L1), Just(NormKind::L2), Just(NormKind::LInf), Just(NormKind::Lp(3.0))]
}

fn exact_norm_kind() -> impl Strategy<Value = NormKind> {
    prop_oneof![Just(NormKind::L1), Just(NormKind::L2), Just(NormKind::LInf)]
}

fn heuristic() -> SearchOptions {
    SearchOptions::heuristic(8, 7)
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norm_bounds_every_image(seed: u64, d in 1usize..6, k in norm_kind()) {
        let mut r = rng(seed);
        let m = random_matrix(d, d, &mut r);
        let x = random_matrix(d, 1, &mut r);
        let res = operator_norm(&DenseOperator::new(m.clone(), k).unwrap());
        let mx: Vec<f64> = (&m * &x).iter().copied().collect();
        let xs: Vec<f64> = x.iter().copied().collect();
        prop_assert!(vector_norm(&mx, k).unwrap() <= res.value * vector_norm(&xs, k).unwrap() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn exact_witnesses_reproduce_the_value(seed: u64, d in 1usize..6, k in exact_norm_kind()) {
        let m = random_matrix(d, d, &mut rng(seed));
        let res = operator_norm(&DenseOperator::new(m.clone(), k).unwrap());
        prop_assert!(res.exactness.is_exact());
        let image: Vec<f64> = (&m * nalgebra::DVector::from_vec(res.witness.clone())).iter().copied().collect();
        let ratio = vector_norm(&image, k).unwrap() / vector_norm(&res.witness, k).unwrap();
        prop_assert!((ratio - res.value).abs() <= 1e-12 * res.value.max(1e-300));
    }

    #[test]
    fn exact_norms_are_submultiplicative(seed: u64, d in 1usize..6, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let a = DenseOperator::new(random_matrix(d, d, &mut r), k).unwrap();
        let b = DenseOperator::new(random_matrix(d, d, &mut r), k).unwrap();
        let ab = operator_norm(&a.compose(&b).unwrap()).value;
        prop_assert!(ab <= operator_norm(&a).value * operator_norm(&b).value * (1.0 + 1e-12));
    }

    #[test]
    fn double_inversion_is_identity(seed: u64, d in 1usize..8) {
        let m = random_invertible(d, 50.0, &mut rng(seed));
        let op = DenseOperator::new(m.clone(), NormKind::L2).unwrap();
        let back = invert(&invert(&op, 1e12).unwrap(), 1e12).unwrap();
        prop_assert!(max_abs(&(back.matrix() - m)) <= 1e-9);
    }

    #[test]
    fn dual_norm_pairing(seed: u64, d in 1usize..7, k in norm_kind()) {
        let mut r = rng(seed);
        let f: Vec<f64> = random_matrix(d, 1, &mut r).iter().copied().collect();
        let x: Vec<f64> = random_matrix(d, 1, &mut r).iter().copied().collect();
        let pairing: f64 = f.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!(pairing.abs() <= dual_norm(&f, k).unwrap() * vector_norm(&x, k).unwrap() * (1.0 + 1e-12));
        // supremum over the extreme points of the unit ball
        let sup = match k {
            NormKind::L1 => f.iter().fold(0.0f64, |a, v| a.max(v.abs())),
            NormKind::LInf => f.iter().map(|v| v.abs()).sum(),
            NormKind::L2 => f.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Lp(_) => return Ok(()),
        };
        prop_assert!((sup - dual_norm(&f, k).unwrap()).abs() <= 1e-12 * sup.max(1.0));
    }

    #[test]
    fn bases_with_biorthogonals_are_exact_frames(seed: u64, d in 1usize..10, k in exact_norm_kind()) {
        let b = random_basis(d, k, &mut rng(seed));
        prop_assert!(max_abs(&(frame_operator(&b).matrix() - DMatrix::identity(d, d))) <= 1e-10);
    }

    #[test]
    fn full_and_empty_subsets(seed: u64, d in 2usize..6, n in 0usize..3) {
        let f = random_frame(d, d + n, NormKind::L1, &mut rng(seed));
        let sigma = WeavePattern::zeros(f.n());
        let full = partial_operator_subset(&f, &f, &sigma, &vec![true; f.n()]).unwrap();
        let s = frame_operator(&f);
        prop_assert_eq!(full.matrix(), s.matrix());
        let empty = partial_operator_subset(&f, &f, &sigma, &vec![false; f.n()]).unwrap();
        prop_assert_eq!(max_abs(empty.matrix()), 0.0);
    }

    #[test]
    fn heuristic_never_exceeds_exhaustive(seed: u64, d in 2usize..5, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let f = random_frame(d, d + 2, k, &mut r);
        let ex = SearchOptions::default();
        prop_assert!(suppression_constant(&f, &heuristic()).unwrap().value <= suppression_constant(&f, &ex).unwrap().value);
        prop_assert!(unconditional_constant(&f, &heuristic()).unwrap().value <= unconditional_constant(&f, &ex).unwrap().value);
        let g = random_frame(d, d + 2, k, &mut r);
        let h = WeaveOptions { search: heuristic(), ..WeaveOptions::default() };
        prop_assert!(worst_weaving(&f, &g, &h).unwrap().worst_constant <= worst_weaving(&f, &g, &WeaveOptions::default()).unwrap().worst_constant);
    }

    #[test]
    fn scaling_functionals(seed: u64, d in 2usize..5, lambda in prop_oneof![0.25f64..4.0, -4.0f64..-0.25], k in exact_norm_kind()) {
        let f = random_frame(d, d + 1, k, &mut rng(seed));
        let g = f.with_scaled_functionals(lambda);
        let (a, b) = (analyze(&f, &SearchOptions::default()), analyze(&g, &SearchOptions::default()));
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs());
        prop_assert!(rel(b.s_norm.value, lambda.abs() * a.s_norm.value));
        prop_assert!(rel(b.s_inv_norm.unwrap().value, a.s_inv_norm.unwrap().value / lambda.abs()));
        prop_assert!(rel(b.c_suppression.unwrap().value, a.c_suppression.unwrap().value));
        prop_assert!(rel(b.c_unconditional.unwrap().value, a.c_unconditional.unwrap().value));
    }

    #[test]
    fn self_weaving_is_the_frame_constant(seed: u64, d in 1usize..6, k in exact_norm_kind()) {
        let f = random_frame(d, d + 2, k, &mut rng(seed));
        prop_assert_eq!(worst_weaving(&f, &f, &WeaveOptions::default()).unwrap().worst_constant, check_approximate_frame(&f).c_frame);
    }

    #[test]
    fn intervals_add_up(seed: u64, d in 2usize..5, bits in proptest::collection::vec(any::<bool>(), 6), cut in 1usize..6) {
        let mut r = rng(seed);
        let f0 = random_frame(d, 6, NormKind::L1, &mut r);
        let f1 = random_frame(d, 6, NormKind::L1, &mut r);
        let s = WeavePattern::new(bits);
        let whole = partial_operator(&f0, &f1, &IntervalQuery::new(s.clone(), 1, 6).unwrap()).unwrap();
        let left = partial_operator(&f0, &f1, &IntervalQuery::new(s.clone(), 1, cut).unwrap()).unwrap();
        let right = partial_operator(&f0, &f1, &IntervalQuery::new(s, cut + 1, 6).unwrap()).unwrap();
        prop_assert!(max_abs(&(whole.matrix() - (left.matrix() + right.matrix()))) <= 1e-14);
    }

    #[test]
    fn swapping_the_systems_complements_patterns(seed: u64, d in 2usize..5, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let f0 = random_frame(d, d + 1, k, &mut r);
        let f1 = random_frame(d, d + 1, k, &mut r);
        let a = worst_weaving(&f0, &f1, &WeaveOptions::default()).unwrap();
        let b = worst_weaving(&f1, &f0, &WeaveOptions::default()).unwrap();
        prop_assert!((a.worst_constant - b.worst_constant).abs() <= 1e-12 * a.worst_constant);
        let w0 = weave(&f0, &f1, &a.worst_pattern).unwrap();
        let w1 = weave(&f1, &f0, &a.worst_pattern.complement()).unwrap();
        prop_assert_eq!(w0.vector_rows(), w1.vector_rows());
    }

    #[test]
    fn basis_projections_are_complementary_idempotents(seed: u64, d in 1usize..8, mask in proptest::collection::vec(any::<bool>(), 8), k in exact_norm_kind()) {
        let b = random_basis(d, k, &mut rng(seed));
        let g: Vec<bool> = mask[..d].to_vec();
        let gc: Vec<bool> = g.iter().map(|x| !x).collect();
        let p = basis_projection(&b, &g).unwrap().into_matrix();
        let q = basis_projection(&b, &gc).unwrap().into_matrix();
        let scale = max_abs(&p).max(1.0);
        prop_assert!(max_abs(&(&p * &p - &p)) <= 1e-9 * scale * scale);
        prop_assert!(max_abs(&(&p + &q - DMatrix::identity(d, d))) <= 1e-9 * scale);
    }

    #[test]
    fn file_round_trip(rows in proptest::collection::vec(proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 3), 1..5), k in norm_kind()) {
        let file = FrameSystemFile { dim: 3, norm: k, vectors: rows.clone(), functionals: Some(rows), label: "p".into() };
        let back = FrameSystemFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(back.to_system(None).unwrap(), file.to_system(None).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exhaustive_results_ignore_thread_count(seed: u64, d in 3usize..6) {
        let mut r = rng(seed);
        let f0 = random_frame(d, d + 4, NormKind::L1, &mut r);
        let f1 = random_frame(d, d + 4, NormKind::L1, &mut r);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let w = worst_weaving(&f0, &f1, &WeaveOptions::default()).unwrap();
                let c = unconditional_constant(&f0, &SearchOptions::default()).unwrap();
                (w.worst_constant.to_bits(), w.worst_pattern, c.value.to_bits(), c.witness)
            })
        };
        prop_assert_eq!(run(1), run(4));
    }

    #[test]
    fn unc_verdicts_agree_on_perturbed_pairs(seed: u64, d in 2usize..5, frac in 0.05f64..0.9, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let b0 = random_unconditional_basis(d, k, &mut r);
        let b1 = perturbed_basis(&b0, frac, &mut r).unwrap();
        let v = unc_conditions(&b0, &b1, &[], &UncOptions::default(), true).unwrap();
        prop_assert!(!v.evaluations.is_empty());
        for e in &v.evaluations {
            prop_assert!(e.agrees(), "{:?}", e);
            if e.holds[Condition::Vi as usize] {
                prop_assert!(e.inverse_residual.unwrap() <= 1e-8);
            }
        }
    }

    #[test]
    fn l2_distance_matches_search(seed: u64, d in 3usize..6) {
        let mut r = rng(seed);
        let space = NormedSpace::new(d, NormKind::L2).unwrap();
        let a = SpannedSubspace::new(space, random_matrix(d, 1, &mut r), "a").unwrap();
        let b = SpannedSubspace::new(space, random_matrix(d, d - 2, &mut r), "b").unwrap();
        let rep = subspace_distance(&a, &b, 24).unwrap();
        prop_assert!(rep.exactness.is_exact());
        prop_assert!((rep.search_estimate - rep.value).abs() <= 1e-6, "{:?}", rep);
    }

    #[test]
    fn projection_bounded_below_by_distance(seed: u64, bits in proptest::collection::vec(any::<bool>(), 4), coeffs in proptest::collection::vec(-1.0f64..1.0, 4), k in exact_norm_kind()) {
        let mut r = rng(seed);
        let b0 = random_unconditional_basis(4, k, &mut r);
        let b1 = perturbed_basis(&b0, 0.5, &mut r).unwrap();
        let zeros: Vec<usize> = (0..4).filter(|&i| !bits[i]).collect();
        let ones: Vec<usize> = (0..4).filter(|&i| bits[i]).collect();
        prop_assume!(!zeros.is_empty() && !ones.is_empty());
        let a = SpannedSubspace::span_of(&b1, &zeros, "x1 on zeros").unwrap();
        let b = SpannedSubspace::span_of(&b0, &ones, "x0 on ones").unwrap();
        let dist = subspace_distance(&a, &b, 0).unwrap().from_a.value;
        let mut x = vec![0.0; 4];
        for (c, &i) in coeffs.iter().zip(&zeros) {
            for (xj, vj) in x.iter_mut().zip(b1.vector(i).iter()) {
                *xj += c * vj;
            }
        }
        let nx = vector_norm(&x, k).unwrap();
        prop_assume!(nx > 1e-6);
        let mask: Vec<bool> = bits.iter().map(|b| !b).collect();
        let p = basis_projection(&b0, &mask).unwrap();
        let px = p.apply(&x).unwrap();
        prop_assert!(vector_norm(&px, k).unwrap() / nx >= dist - 1e-9);
    }

    #[test]
    fn satisfied_operator_budgets_certify(seed: u64, d in 2usize..5, frac in 0.05f64..0.95, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let f = random_frame(d, d + 1, k, &mut r);
        let cs = suppression_constant(&f, &SearchOptions::default()).unwrap().value;
        let t = DenseOperator::new(operator_at_distance(d, k, frac / cs, &mut r), k).unwrap();
        let rep = operator_perturbation_check(&f, &t, &PerturbationOptions::default()).unwrap();
        prop_assert!(rep.budget.satisfied);
        let woven = matches!(rep.weaving.unwrap().verdict, weavelab::weave::WeaveVerdict::Woven { .. });
        prop_assert!(woven);
        prop_assert!(rep.certificate.unwrap().holds);
    }

    #[test]
    fn satisfied_pair_budgets_certify(seed: u64, d in 2usize..5, frac in 0.05f64..0.95, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let f0 = random_frame(d, d + 1, k, &mut r);
        let direction = random_frame(d, d + 1, k, &mut r);
        let full = weavelab::perturb::pair_budget_actual(&f0, &direction).unwrap();
        let s_inv = check_approximate_frame(&f0).s_inv_norm.unwrap().value;
        // the budget is not monotone along segments, so shrink until it holds
        let mut t = frac / (s_inv * full);
        let mut f1 = weavelab::perturb::interpolate(&f0, &direction, t).unwrap();
        while weavelab::perturb::pair_budget_actual(&f0, &f1).unwrap() * s_inv >= frac {
            t *= 0.5;
            f1 = weavelab::perturb::interpolate(&f0, &direction, t).unwrap();
        }
        let rep = pair_perturbation_check(&f0, &f1, &PerturbationOptions::default()).unwrap();
        prop_assert!(rep.budget.satisfied);
        let cert = rep.certificate.unwrap();
        prop_assert!(cert.all_invertible && cert.max_residual < 1.0 && cert.holds);
    }

    #[test]
    fn satisfied_basis_budgets_give_equivalent_bases(seed: u64, d in 2usize..6, frac in 0.05f64..0.95, k in exact_norm_kind()) {
        let mut r = rng(seed);
        let b0 = random_basis(d, k, &mut r);
        let b1 = perturbed_basis(&b0, frac, &mut r).unwrap();
        let rep = basis_perturbation_check(&b0, &b1.vector_rows(), seed).unwrap();
        prop_assert!(rep.budget.satisfied && rep.candidate_is_basis);
        let eq = rep.equivalence.unwrap();
        prop_assert!(eq.lower.is_finite() && eq.upper.is_finite() && eq.lower > 0.0);
        prop_assert!(rep.weaving.unwrap().all_bases);
    }

    #[test]
    fn shrinking_perturbations_shrink_budgets(seed: u64, d in 2usize..5, s in 0.0f64..1.0, t in 0.0f64..1.0, k in exact_norm_kind()) {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let mut r = rng(seed);
        let b0 = random_basis(d, k, &mut r);
        let c = random_matrix(d, d, &mut r);
        let at = |w: f64| -> Vec<Vec<f64>> {
            (0..d).map(|j| (0..d).map(|i| b0.vector(j)[i] + w * c[(i, j)]).collect()).collect()
        };
        prop_assert!(basis_budget(&b0, &at(lo)).unwrap().actual <= basis_budget(&b0, &at(hi)).unwrap().actual * (1.0 + 1e-12));
        let f = random_frame(d, d + 1, k, &mut r);
        let e = random_matrix(d, d, &mut r);
        let op = |w: f64| DenseOperator::new(DMatrix::identity(d, d) + &e * w, k).unwrap();
        let opts = PerturbationOptions::default();
        let a = operator_perturbation_check(&f, &op(lo), &opts).unwrap().budget.actual;
        let b = operator_perturbation_check(&f, &op(hi), &opts).unwrap().budget.actual;
        prop_assert!(a <= b * (1.0 + 1e-12));
    }
}

#[test]
fn gallery_bases_are_integer_valued() {
    for name in GalleryName::ALL {
        for d in [2usize, 4, 6, 8, 10] {
            let Ok(v) = gallery::vectors(name, d) else { continue };
            assert!(v.iter().flatten().all(|x| x.fract() == 0.0), "{name}");
            if name == GalleryName::DifferenceL1 {
                let cumulative: Vec<Vec<f64>> = (0..d).map(|j| (0..d).map(|k| f64::from(u8::from(k >= j))).collect()).collect();
                assert_eq!(gallery::system(name, d).unwrap().functional_rows(), cumulative);
            }
        }
    }
}

#[test]
fn c0_families_have_full_rank() {
    for d in 1..=16 {
        assert_eq!(gallery::family_rank(GalleryName::SummingC0, d).unwrap(), d);
        assert_eq!(gallery::family_rank(GalleryName::StandardC0, d).unwrap(), d);
    }
}

#[test]
fn woven_unconditional_pairs_are_equivalent_with_stable_constants() {
    // budget λ = 1/4 gives ‖T‖ ≤ 5/4 and ‖T⁻¹‖ ≤ 4/3 for T: x⁰_j ↦ x¹_j, and
    // |x¹*_j(x⁰_j) − 1| ≤ λ/(1 − λ), uniformly in d
    for d in [2usize, 4, 8, 12] {
        for seed in 0..10 {
            let mut r = rng(seed);
            let b0 = random_unconditional_basis(d, NormKind::L1, &mut r);
            let b1 = perturbed_basis(&b0, 0.25, &mut r).unwrap();
            let eq = equivalence_constants(&b0, &b1).unwrap();
            assert!(eq.upper <= 1.25 + 1e-12 && 1.0 / eq.lower <= 4.0 / 3.0 + 1e-12, "d={d} {eq:?}");
            for j in 0..d {
                let p: f64 = b1.functional(j).iter().zip(b0.vector(j).iter()).map(|(a, b)| a * b).sum();
                assert!(p.abs() >= 2.0 / 3.0 - 1e-12, "d={d} pairing {p}");
            }
        }
    }
}

#[test]
fn frame_system_space_is_kept() {
    let f: FrameSystem = gallery::system(GalleryName::SummingC0, 3).unwrap();
    assert_eq!(f.space(), NormedSpace::new(3, NormKind::LInf).unwrap());
}
