mod common;

use common::*;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semifb::algebra::{Bc, ExpHom, Rational, Real, Semiring};
use semifb::engine::{
    forward, forward_backward, free_forward, parametrized_forward, project0, replay_all,
    CheckpointPolicy,
};
use semifb::gen::{random_graph, GraphShape};
use semifb::semialgebra::{bc_semialgebra, semialgebra_from_semiring, tensor_product};

fn graph(seed: u64) -> semifb::graph::ComputationGraph {
    random_graph(&mut StdRng::seed_from_u64(seed), GraphShape::default())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivation_count_is_coefficient_sum(seed in any::<u64>()) {
        let g = graph(seed);
        let ones = vec![1.0; g.sources().len()];
        let count = *forward(&g, &Real, &ones, CheckpointPolicy::AllElements).unwrap().sink_sum();
        let free = free_forward(&g).unwrap();
        prop_assert_eq!(count, free.sink_sum().coefficient_sum().to_f64().unwrap());
    }

    #[test]
    fn stored_values_agree_across_policies(seed in any::<u64>(), k in 1usize..6) {
        let g = graph(seed);
        let mut rng = StdRng::seed_from_u64(seed ^ 0x5eed);
        let xi: Vec<f64> = (0..g.sources().len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let all = forward(&g, &Real, &xi, CheckpointPolicy::AllElements).unwrap();
        for policy in [CheckpointPolicy::NodesOnly, CheckpointPolicy::Cutsets(k)] {
            let r = forward(&g, &Real, &xi, policy).unwrap();
            prop_assert_eq!(r.sink_sum().to_bits(), all.sink_sum().to_bits());
            for (i, v) in r.stored() {
                prop_assert_eq!(v.to_bits(), all.stored().find(|&(j, _)| j == i).unwrap().1.to_bits());
            }
            prop_assert_eq!(replay_all(&g, &Real, &r).unwrap(), replay_all(&g, &Real, &all).unwrap());
        }
    }

    #[test]
    fn exp_parametrization(seed in any::<u64>()) {
        let g = graph(seed);
        let mut rng = StdRng::seed_from_u64(seed);
        let phi: Vec<f64> = (0..g.sources().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let xi: Vec<f64> = phi.iter().map(|p| p.exp()).collect();
        let a = parametrized_forward(&g, &ExpHom, &phi, CheckpointPolicy::AllElements).unwrap();
        let b = forward(&g, &Real, &xi, CheckpointPolicy::AllElements).unwrap();
        prop_assert_eq!(a.sink_sum(), b.sink_sum());
    }
}

/// The k-th entry of a BCⁿ forward pass seeded with `(x_v, 1, 0, …)` is the
/// k-th derivative of the free polynomial along `v`.
#[test]
fn bc_entries_are_derivatives() {
    let mut rng = StdRng::seed_from_u64(21);
    for case in 0..40 {
        let g = random_graph(
            &mut rng,
            GraphShape {
                max_sources: 4,
                max_elements: 20,
                max_in_degree: 3,
            },
        );
        let n = g.sources().len();
        let x: Vec<BigRational> = (0..n)
            .map(|_| rational(rng.gen_range(-3..=3), rng.gen_range(1..=2)))
            .collect();
        let poly = free_forward(&g).unwrap().sink_sum().clone();
        for order in 1..=3 {
            let s = Bc::new(Rational, order).unwrap();
            for var in 0..n {
                let xi: Vec<Vec<BigRational>> = x
                    .iter()
                    .enumerate()
                    .map(|(i, xv)| {
                        let mut e = vec![rational(0, 1); order + 1];
                        e[0] = xv.clone();
                        if i == var {
                            e[1] = one();
                        }
                        e
                    })
                    .collect();
                let got = forward(&g, &s, &xi, CheckpointPolicy::AllElements)
                    .unwrap()
                    .sink_sum()
                    .clone();
                let mut d = poly.clone();
                for (k, entry) in got.iter().enumerate() {
                    assert_eq!(
                        *entry,
                        d.eval(&Rational, &x).unwrap(),
                        "graph {case}, order {order}, var {var}, entry {k}"
                    );
                    d = d.derivative(var);
                }
            }
        }
    }
}

/// The ê₀ part of the combined result is the plain forward value over A.
#[test]
fn combined_p0_is_forward_value() {
    let mut rng = StdRng::seed_from_u64(22);
    let a = semialgebra_from_semiring(Real).unwrap();
    let full = tensor_product(&a, &bc_semialgebra(Real, 1).unwrap()).unwrap();
    for _ in 0..50 {
        let g = random_graph(&mut rng, GraphShape::default());
        let pairs: Vec<[f64; 2]> = (0..g.sources().len())
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let xi: Vec<_> = pairs.iter().map(|p| full.from_dense(p.to_vec())).collect();
        let x0: Vec<f64> = pairs.iter().map(|p| p[0]).collect();
        let fb = forward_backward(&g, &a, &xi, CheckpointPolicy::NodesOnly).unwrap();
        let plain = *forward(&g, &Real, &x0, CheckpointPolicy::AllElements)
            .unwrap()
            .sink_sum();
        let p0 = a.coefficient(&project0(&full, &fb.combined).unwrap(), 0);
        assert!(rel_close(p0, plain, 1e-12), "{p0} vs {plain}");
        assert_eq!(
            a.coefficient(fb.alpha0.sink_sum(), 0).to_bits(),
            p0.to_bits()
        );
    }
}

/// `P₁` is linear: scaling every `ê₁` input by `c` scales the `ê₁` output by `c`.
#[test]
fn p1_is_linear_in_the_perturbation() {
    let mut rng = StdRng::seed_from_u64(23);
    let a = semialgebra_from_semiring(Rational).unwrap();
    let full = tensor_product(&a, &bc_semialgebra(Rational, 1).unwrap()).unwrap();
    let s = Rational;
    for _ in 0..30 {
        let g = random_graph(&mut rng, GraphShape::default());
        let base: Vec<[BigRational; 2]> = (0..g.sources().len())
            .map(|_| {
                [
                    rational(rng.gen_range(-3..=3), 2),
                    rational(rng.gen_range(-3..=3), 3),
                ]
            })
            .collect();
        let c = rational(rng.gen_range(-5..=5), 7);
        let run = |scale: &BigRational| {
            let xi: Vec<_> = base
                .iter()
                .map(|p| full.from_dense(vec![p[0].clone(), s.mul(&p[1], scale)]))
                .collect();
            let fb = forward_backward(&g, &a, &xi, CheckpointPolicy::AllElements).unwrap();
            full.coefficient(&fb.combined, 1)
        };
        assert_eq!(run(&c), s.mul(&c, &run(&one())));
    }
}
