//! Randomized checks of the commutative-semiring axioms and of monoid
//! homomorphism laws.

use std::fmt;

use rand::Rng;

use super::{MonoidHom, RandomElem, Semiring, Tolerance};

#[derive(Clone, Debug)]
pub struct LawOutcome {
    pub law: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub subject: String,
    pub outcomes: Vec<LawOutcome>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(LawOutcome::passed)
    }

    pub fn failures(&self) -> Vec<&LawOutcome> {
        self.outcomes.iter().filter(|o| !o.passed()).collect()
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let verdict = if o.passed() { "pass" } else { "FAIL" };
            write!(
                f,
                "{}\t{}\t{}\t{}/{}",
                self.subject,
                o.law,
                verdict,
                o.cases - o.failures,
                o.cases
            )?;
            if let Some(c) = &o.counterexample {
                write!(f, "\t{c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Tally<'a> {
    law: &'static str,
    cases: usize,
    failures: usize,
    counterexample: Option<String>,
    out: &'a mut Vec<LawOutcome>,
}

impl Drop for Tally<'_> {
    fn drop(&mut self) {
        self.out.push(LawOutcome {
            law: self.law,
            cases: self.cases,
            failures: self.failures,
            counterexample: self.counterexample.take(),
        });
    }
}

impl Tally<'_> {
    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(detail());
            }
        }
    }
}

fn tally<'a>(law: &'static str, out: &'a mut Vec<LawOutcome>) -> Tally<'a> {
    Tally {
        law,
        cases: 0,
        failures: 0,
        counterexample: None,
        out,
    }
}

/// Checks associativity, commutativity and identities of both operations,
/// distributivity and absorption on `cases` random triples each.
pub fn semiring_laws<S: RandomElem, R: Rng + ?Sized>(
    s: &S,
    cases: usize,
    tol: Tolerance,
    rng: &mut R,
) -> LawReport {
    let mut outcomes = Vec::new();
    let triples: Vec<[S::Elem; 3]> = (0..cases)
        .map(|_| [s.random_elem(rng), s.random_elem(rng), s.random_elem(rng)])
        .collect();
    let eq = |x: &S::Elem, y: &S::Elem| s.eq_within(x, y, tol);

    {
        let mut t = tally("add_associative", &mut outcomes);
        for [a, b, c] in &triples {
            let l = s.add(&s.add(a, b), c);
            let r = s.add(a, &s.add(b, c));
            t.record(eq(&l, &r), || format!("{a:?} {b:?} {c:?}"));
        }
    }
    {
        let mut t = tally("add_commutative", &mut outcomes);
        for [a, b, _] in &triples {
            t.record(eq(&s.add(a, b), &s.add(b, a)), || format!("{a:?} {b:?}"));
        }
    }
    {
        let mut t = tally("add_identity", &mut outcomes);
        for [a, _, _] in &triples {
            t.record(eq(&s.add(a, &s.zero()), a), || format!("{a:?}"));
        }
    }
    {
        let mut t = tally("mul_associative", &mut outcomes);
        for [a, b, c] in &triples {
            let l = s.mul(&s.mul(a, b), c);
            let r = s.mul(a, &s.mul(b, c));
            t.record(eq(&l, &r), || format!("{a:?} {b:?} {c:?}"));
        }
    }
    {
        let mut t = tally("mul_commutative", &mut outcomes);
        for [a, b, _] in &triples {
            t.record(eq(&s.mul(a, b), &s.mul(b, a)), || format!("{a:?} {b:?}"));
        }
    }
    {
        let mut t = tally("mul_identity", &mut outcomes);
        for [a, _, _] in &triples {
            t.record(eq(&s.mul(a, &s.one()), a), || format!("{a:?}"));
        }
    }
    {
        let mut t = tally("distributive", &mut outcomes);
        for [a, b, c] in &triples {
            let l = s.mul(a, &s.add(b, c));
            let r = s.add(&s.mul(a, b), &s.mul(a, c));
            t.record(eq(&l, &r), || format!("{a:?} {b:?} {c:?}"));
        }
    }
    {
        let mut t = tally("zero_absorbing", &mut outcomes);
        for [a, _, _] in &triples {
            t.record(s.is_zero(&s.mul(a, &s.zero())), || format!("{a:?}"));
        }
    }
    LawReport {
        subject: s.name(),
        outcomes,
    }
}

/// Checks `f(a ∘ b) = f(a)·f(b)` on random pairs and `f(e) = 1`.
pub fn hom_laws<H, R, G>(
    h: &H,
    name: &str,
    mut sample: G,
    cases: usize,
    tol: Tolerance,
    rng: &mut R,
) -> LawReport
where
    H: MonoidHom,
    R: Rng + ?Sized,
    G: FnMut(&mut R) -> H::Source,
{
    let s = h.target();
    let mut outcomes = Vec::new();
    {
        let mut t = tally("preserves_identity", &mut outcomes);
        let e = h.apply(&h.source_identity());
        t.record(s.eq_within(&e, &s.one(), tol), || format!("{e:?}"));
    }
    {
        let mut t = tally("multiplicative", &mut outcomes);
        for _ in 0..cases {
            let a = sample(rng);
            let b = sample(rng);
            let l = h.apply(&h.source_op(&a, &b));
            let r = s.mul(&h.apply(&a), &h.apply(&b));
            t.record(s.eq_within(&l, &r, tol), || format!("{a:?} {b:?}"));
        }
    }
    LawReport {
        subject: name.to_string(),
        outcomes,
    }
}
