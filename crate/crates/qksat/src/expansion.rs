//! Quantifier elimination by finite expansion.
//!
//! Because the signature is finite, a bounded existential is equivalent to
//! the disjunction of its substitution instances over every instance between
//! the bounds, and a bounded universal to the corresponding conjunction.
//! [`expand`] applies this exhaustively, innermost quantifiers first, turning
//! any closed formula into one without quantifiers or the variable modality.
//! The price is an exponential blowup in formula size; [`expansion_size`]
//! reports it without materializing the result.
//!
//! The expansion is a second, independent decision path: satisfiability and
//! pointed truth are preserved exactly, which the test suite exploits to
//! cross-check the tableau solver.

use thiserror::Error;

use crate::formula::Formula;
use crate::signature::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("cannot expand a formula with a free variable modality")]
    OpenFormula,
}

/// Eliminates every quantifier and variable-modality occurrence from a
/// closed formula. Ranges enumerate in increasing bit order; an empty range
/// yields `true` for a universal and `false` for an existential.
pub fn expand(f: &Formula) -> Result<Formula, ExpansionError> {
    if !f.is_closed() {
        return Err(ExpansionError::OpenFormula);
    }
    Ok(expand_inner(f))
}

fn expand_inner(f: &Formula) -> Formula {
    match f {
        Formula::Bottom | Formula::Top | Formula::Var(_) => f.clone(),
        Formula::Not(p) => Formula::Not(Box::new(expand_inner(p))),
        Formula::And(l, r) => expand_inner(l).and(expand_inner(r)),
        Formula::Or(l, r) => expand_inner(l).or(expand_inner(r)),
        Formula::Implies(l, r) => expand_inner(l).implies(expand_inner(r)),
        Formula::Iff(l, r) => expand_inner(l).iff(expand_inner(r)),
        Formula::Box(m, p) => Formula::Box(*m, Box::new(expand_inner(p))),
        Formula::Diamond(m, p) => Formula::Diamond(*m, Box::new(expand_inner(p))),
        Formula::Forall(b, p) => {
            // Innermost first: the body is quantifier-free before this
            // quantifier's instances are substituted into it.
            let body = expand_inner(p);
            let mut parts = Instance::range(b.lower, b.upper).map(|r| body.substitute(r));
            match parts.next() {
                None => Formula::Top,
                Some(first) => parts.fold(first, Formula::and),
            }
        }
        Formula::Exists(b, p) => {
            let body = expand_inner(p);
            let mut parts = Instance::range(b.lower, b.upper).map(|r| body.substitute(r));
            match parts.next() {
                None => Formula::Bottom,
                Some(first) => parts.fold(first, Formula::or),
            }
        }
    }
}

/// Node count of `expand(f)`, computed without building the expansion.
pub fn expansion_size(f: &Formula) -> Result<u64, ExpansionError> {
    if !f.is_closed() {
        return Err(ExpansionError::OpenFormula);
    }
    Ok(size_inner(f))
}

fn size_inner(f: &Formula) -> u64 {
    match f {
        Formula::Bottom | Formula::Top | Formula::Var(_) => 1,
        Formula::Not(p) => 1 + size_inner(p),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
            1 + size_inner(l) + size_inner(r)
        }
        Formula::Box(_, p) | Formula::Diamond(_, p) => 1 + size_inner(p),
        Formula::Forall(b, p) | Formula::Exists(b, p) => {
            let k = Instance::range_count(b.lower, b.upper);
            if k == 0 {
                1
            } else {
                // k copies of the body joined by k-1 binary connectives.
                // Substitution swaps modalities in place, so each copy has
                // the same node count as the expanded body.
                let m = size_inner(p);
                k.saturating_mul(m).saturating_add(k - 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Modality;
    use crate::parser::{parse_formula, render};
    use crate::signature::Signature;

    fn sig2() -> Signature {
        Signature::new(["a", "b"]).unwrap()
    }

    #[test]
    fn singleton_range_expands_to_the_instance() {
        let sig = sig2();
        let f = parse_formula("exists x <= {a} ( <x> true )", &sig).unwrap();
        let expected = parse_formula("<a> true", &sig).unwrap();
        assert_eq!(expand(&f).unwrap(), expected);
    }

    #[test]
    fn universal_expands_to_the_conjunction_over_the_range() {
        let sig = sig2();
        let f = parse_formula("forall x <= {a,b} ( [x] A )", &sig).unwrap();
        let expanded = expand(&f).unwrap();
        let a = Modality::Const(sig.singleton("a").unwrap());
        let b = Modality::Const(sig.singleton("b").unwrap());
        let ab = Modality::Const(sig.instance(["a", "b"]).unwrap());
        let expected = Formula::boxed(a, Formula::prop("A"))
            .and(Formula::boxed(b, Formula::prop("A")))
            .and(Formula::boxed(ab, Formula::prop("A")));
        assert_eq!(expanded, expected);
    }

    #[test]
    fn empty_range_collapses_to_constants() {
        let sig = sig2();
        let f = parse_formula("exists {a,b} <= x <= {a} ( <x> A )", &sig).unwrap();
        assert_eq!(expand(&f).unwrap(), Formula::Bottom);
        let g = parse_formula("forall {a,b} <= x <= {a} ( <x> A )", &sig).unwrap();
        assert_eq!(expand(&g).unwrap(), Formula::Top);
    }

    #[test]
    fn expansion_is_identity_on_quantifier_free_input() {
        let sig = sig2();
        let f = parse_formula("[a] (A -> B) & <b> ~A", &sig).unwrap();
        let once = expand(&f).unwrap();
        assert_eq!(once, f);
        assert_eq!(expand(&once).unwrap(), once);
    }

    #[test]
    fn open_formulas_are_rejected() {
        let f = Formula::boxed(Modality::Var, Formula::prop("A"));
        assert_eq!(expand(&f).unwrap_err(), ExpansionError::OpenFormula);
        assert_eq!(expansion_size(&f).unwrap_err(), ExpansionError::OpenFormula);
    }

    #[test]
    fn size_matches_materialized_expansion() {
        let sig = sig2();
        let cases = [
            "forall x ( [x] A )",
            "exists x <= {a,b} ( <x> (A & B) )",
            "forall {a} <= x ( [x] A ) -> exists x ( <x> B )",
            "forall x ( exists x <= {a} ( [x] A ) & <x> B )",
            "[a] A & <b> B",
            "exists {a,b} <= x <= {a} ( <x> A )",
        ];
        for text in cases {
            let f = parse_formula(text, &sig).unwrap();
            let expanded = expand(&f).unwrap();
            assert_eq!(
                expansion_size(&f).unwrap(),
                expanded.node_count(),
                "size mismatch for {text}"
            );
        }
    }

    #[test]
    fn eight_atom_unbounded_quantifier_ranges_over_255_instances() {
        let sig = Signature::new(["o1", "o2", "r1", "r2", "r3", "r4", "g1", "g2"]).unwrap();
        let f = parse_formula("forall x ( <x> true )", &sig).unwrap();
        match &f {
            Formula::Forall(b, _) => {
                assert_eq!(Instance::range_count(b.lower, b.upper), 255);
                assert_eq!(Instance::range(b.lower, b.upper).count(), 255);
            }
            _ => unreachable!(),
        }
        // 255 two-node disjuncts plus 254 connectives.
        assert_eq!(expansion_size(&f).unwrap(), 255 * 2 + 254);
        let expanded = expand(&f).unwrap();
        assert_eq!(expanded.node_count(), 255 * 2 + 254);
        // The expansion parses back to itself through the printer.
        let text = render(&expanded, &sig);
        assert_eq!(parse_formula(&text, &sig).unwrap(), expanded);
    }
}
