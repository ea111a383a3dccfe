//! Independent oracles shared by the integration tests: brute-force
//! enumeration and textbook recursions that do not go through the engine.

#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use semifb::adapters::{FactorGraph, FgFactor, FgVariable, Trellis};
use semifb::algebra::NatPoly;

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// `Σ c·Π xᵢ^eᵢ` term by term.
pub fn poly_eval_f64(p: &NatPoly, x: &[f64]) -> f64 {
    p.terms()
        .map(|(e, c)| {
            let mono: f64 = e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product();
            c.to_f64().unwrap() * mono
        })
        .sum()
}

pub fn poly_eval_rational(p: &NatPoly, x: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (e, c) in p.terms() {
        let mut mono = BigRational::from_integer(BigInt::from(c.clone()));
        for (&k, v) in e.iter().zip(x) {
            for _ in 0..k {
                mono *= v;
            }
        }
        acc += mono;
    }
    acc
}

/// All length-`t` sequences over `0..k`.
pub fn sequences(k: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..k).map(move |j| {
                    let mut s = s.clone();
                    s.push(j);
                    s
                })
            })
            .collect();
    }
    out
}

pub fn joint(t: &Trellis, s: &[usize]) -> f64 {
    let o = &t.observations;
    let mut p = t.initial[s[0]] * t.emission[s[0]][o[0]];
    for i in 1..s.len() {
        p *= t.transition[s[i - 1]][s[i]] * t.emission[s[i]][o[i]];
    }
    p
}

/// Classical matrix forward-backward: `(likelihood, alpha[t][j], beta[t][j])`.
pub fn hmm_forward_backward(t: &Trellis) -> (f64, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let k = t.initial.len();
    let n = t.observations.len();
    let o = &t.observations;
    let mut alpha = vec![vec![0.0; k]; n];
    for j in 0..k {
        alpha[0][j] = t.initial[j] * t.emission[j][o[0]];
    }
    for s in 1..n {
        for j in 0..k {
            let mut acc = 0.0;
            for i in 0..k {
                acc += alpha[s - 1][i] * t.transition[i][j];
            }
            alpha[s][j] = acc * t.emission[j][o[s]];
        }
    }
    let mut beta = vec![vec![1.0; k]; n];
    for s in (0..n - 1).rev() {
        for i in 0..k {
            let mut acc = 0.0;
            for j in 0..k {
                acc += t.transition[i][j] * t.emission[j][o[s + 1]] * beta[s + 1][j];
            }
            beta[s][i] = acc;
        }
    }
    let z = alpha[n - 1].iter().sum();
    (z, alpha, beta)
}

fn binary(name: &str) -> FgVariable {
    FgVariable {
        name: name.into(),
        domain: 2,
    }
}

fn factor<R: Rng + ?Sized>(rng: &mut R, name: &str, scope: Vec<usize>) -> FgFactor {
    let n = 1 << scope.len();
    FgFactor {
        name: name.into(),
        scope,
        table: (0..n).map(|_| rng.gen_range(0.1..2.0)).collect(),
    }
}

/// Five binary variables x1..x5 with factors fA(x1), fB(x2), fC(x1,x2,x3),
/// fD(x3,x4), fE(x3,x5) and random positive tables.
pub fn five_variable_tree<R: Rng + ?Sized>(rng: &mut R) -> FactorGraph {
    FactorGraph {
        variables: ["x1", "x2", "x3", "x4", "x5"]
            .into_iter()
            .map(binary)
            .collect(),
        factors: vec![
            factor(rng, "fA", vec![0]),
            factor(rng, "fB", vec![1]),
            factor(rng, "fC", vec![0, 1, 2]),
            factor(rng, "fD", vec![2, 3]),
            factor(rng, "fE", vec![2, 4]),
        ],
        root: None,
    }
}

/// A random tree (or forest) over `n` variables with domains 2 or 3 and
/// factors of arity 1 to 3.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FactorGraph {
    let variables: Vec<FgVariable> = (0..n)
        .map(|i| FgVariable {
            name: format!("v{i}"),
            domain: rng.gen_range(2..=3),
        })
        .collect();
    let mut factors = Vec::new();
    let table = |rng: &mut R, scope: Vec<usize>, name: String| {
        let size: usize = scope.iter().map(|&v| variables[v].domain).product();
        FgFactor {
            name,
            scope,
            table: (0..size).map(|_| rng.gen_range(0.1..2.0)).collect(),
        }
    };
    // Attach each variable after the first to an earlier one, sometimes
    // through a shared ternary factor, sometimes leaving a new component.
    let mut i = 1;
    while i < n {
        let p = rng.gen_range(0..i);
        if rng.gen_bool(0.1) {
            i += 1;
            continue;
        }
        if i + 1 < n && rng.gen_bool(0.3) {
            factors.push(table(rng, vec![i, p, i + 1], format!("f{}", factors.len())));
            i += 2;
        } else {
            factors.push(table(rng, vec![p, i], format!("f{}", factors.len())));
            i += 1;
        }
    }
    for v in 0..n {
        if rng.gen_bool(0.5) {
            factors.push(table(rng, vec![v], format!("f{}", factors.len())));
        }
    }
    FactorGraph {
        variables,
        factors,
        root: None,
    }
}

/// `(Z, marginal numerators[v][x])` by enumerating every configuration.
pub fn brute_force(fg: &FactorGraph) -> (f64, Vec<Vec<f64>>) {
    let doms: Vec<usize> = fg.variables.iter().map(|v| v.domain).collect();
    let mut marg: Vec<Vec<f64>> = doms.iter().map(|&d| vec![0.0; d]).collect();
    let mut z = 0.0;
    let mut config = vec![0usize; doms.len()];
    loop {
        let w: f64 = fg
            .factors
            .iter()
            .map(|f| {
                let idx = f.scope.iter().fold(0, |acc, &v| acc * doms[v] + config[v]);
                f.table[idx]
            })
            .product();
        z += w;
        for (v, &x) in config.iter().enumerate() {
            marg[v][x] += w;
        }
        let mut i = doms.len();
        loop {
            if i == 0 {
                return (z, marg);
            }
            i -= 1;
            config[i] += 1;
            if config[i] < doms[i] {
                break;
            }
            config[i] = 0;
        }
    }
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn one() -> BigRational {
    BigRational::one()
}
