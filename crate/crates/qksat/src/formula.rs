//! Formula abstract syntax, negation normal form, substitution, and
//! structural measures.
//!
//! The tree keeps derived connectives (`Not`, `And`, `Or`, `Iff`, `Diamond`,
//! `Top`) explicit so the printer can round-trip the user's source;
//! desugaring to the primitive fragment happens only inside [`Formula::to_nnf`].

use std::rc::Rc;

use crate::signature::Instance;

/// A modal operator index: a constant instance, or the single variable
/// modality bound by quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    Const(Instance),
    Var,
}

/// Bounds of a quantifier: `lower ⊆ x ⊆ upper`, with the lower bound
/// optional. An unbounded quantifier is parsed with the full signature as
/// its upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantifierBounds {
    pub lower: Option<Instance>,
    pub upper: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bottom,
    Top,
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Box(Modality, Box<Formula>),
    Diamond(Modality, Box<Formula>),
    Forall(QuantifierBounds, Box<Formula>),
    Exists(QuantifierBounds, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn negate(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    pub fn boxed(modality: Modality, body: Formula) -> Formula {
        Formula::Box(modality, Box::new(body))
    }

    pub fn diamond(modality: Modality, body: Formula) -> Formula {
        Formula::Diamond(modality, Box::new(body))
    }

    pub fn forall(lower: Option<Instance>, upper: Instance, body: Formula) -> Formula {
        Formula::Forall(QuantifierBounds { lower, upper }, Box::new(body))
    }

    pub fn exists(lower: Option<Instance>, upper: Instance, body: Formula) -> Formula {
        Formula::Exists(QuantifierBounds { lower, upper }, Box::new(body))
    }

    /// Conjunction of a list, `Top` when empty, left-associated.
    pub fn conjoin<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
        let mut it = parts.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// True iff the variable modality has no free occurrence. Any occurrence
    /// under a quantifier is bound, since there is only one variable symbol.
    pub fn is_closed(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => true,
            Formula::Not(p) => p.is_closed(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => l.is_closed() && r.is_closed(),
            Formula::Box(m, p) | Formula::Diamond(m, p) => {
                !matches!(m, Modality::Var) && p.is_closed()
            }
            Formula::Forall(_, _) | Formula::Exists(_, _) => true,
        }
    }

    /// True iff the variable modality occurs anywhere, free or bound.
    pub fn mentions_var_modality(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => false,
            Formula::Not(p) => p.mentions_var_modality(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => l.mentions_var_modality() || r.mentions_var_modality(),
            Formula::Box(m, p) | Formula::Diamond(m, p) => {
                matches!(m, Modality::Var) || p.mentions_var_modality()
            }
            Formula::Forall(_, p) | Formula::Exists(_, p) => p.mentions_var_modality(),
        }
    }

    /// Replaces every free occurrence of the variable modality by `instance`.
    /// Bound occurrences are untouched.
    pub fn substitute(&self, instance: Instance) -> Formula {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => self.clone(),
            Formula::Not(p) => Formula::Not(Box::new(p.substitute(instance))),
            Formula::And(l, r) => {
                Formula::And(Box::new(l.substitute(instance)), Box::new(r.substitute(instance)))
            }
            Formula::Or(l, r) => {
                Formula::Or(Box::new(l.substitute(instance)), Box::new(r.substitute(instance)))
            }
            Formula::Implies(l, r) => Formula::Implies(
                Box::new(l.substitute(instance)),
                Box::new(r.substitute(instance)),
            ),
            Formula::Iff(l, r) => {
                Formula::Iff(Box::new(l.substitute(instance)), Box::new(r.substitute(instance)))
            }
            Formula::Box(m, p) => {
                Formula::Box(m.substitute(instance), Box::new(p.substitute(instance)))
            }
            Formula::Diamond(m, p) => {
                Formula::Diamond(m.substitute(instance), Box::new(p.substitute(instance)))
            }
            // Quantifiers bind the only variable symbol: nothing below is free.
            Formula::Forall(_, _) | Formula::Exists(_, _) => self.clone(),
        }
    }

    /// Maximum nesting of modal operators; quantifiers add no depth.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => 0,
            Formula::Not(p) => p.modal_depth(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Box(_, p) | Formula::Diamond(_, p) => 1 + p.modal_depth(),
            Formula::Forall(_, p) | Formula::Exists(_, p) => p.modal_depth(),
        }
    }

    /// Number of constructor nodes in the tree.
    pub fn node_count(&self) -> u64 {
        match self {
            Formula::Bottom | Formula::Top | Formula::Var(_) => 1,
            Formula::Not(p) => 1 + p.node_count(),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => 1 + l.node_count() + r.node_count(),
            Formula::Box(_, p)
            | Formula::Diamond(_, p)
            | Formula::Forall(_, p)
            | Formula::Exists(_, p) => 1 + p.node_count(),
        }
    }

    /// Collects the propositional variable names, sorted and deduplicated.
    pub fn prop_vars(&self) -> Vec<String> {
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Bottom | Formula::Top => {}
                Formula::Var(name) => out.push(name.clone()),
                Formula::Not(p) => walk(p, out),
                Formula::And(l, r)
                | Formula::Or(l, r)
                | Formula::Implies(l, r)
                | Formula::Iff(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Formula::Box(_, p)
                | Formula::Diamond(_, p)
                | Formula::Forall(_, p)
                | Formula::Exists(_, p) => walk(p, out),
            }
        }
        let mut vars = Vec::new();
        walk(self, &mut vars);
        vars.sort();
        vars.dedup();
        vars
    }

    /// Negation normal form: derived connectives eliminated, negation pushed
    /// to propositional variables through the modal and quantifier dualities.
    pub fn to_nnf(&self) -> Rc<NnfFormula> {
        nnf(self, true)
    }
}

impl Modality {
    fn substitute(self, instance: Instance) -> Modality {
        match self {
            Modality::Var => Modality::Const(instance),
            c => c,
        }
    }
}

/// Negation normal form. Negation occurs only on propositional variables;
/// the only connectives are conjunction, disjunction, the modalities, and
/// the quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NnfFormula {
    Lit { name: String, positive: bool },
    Top,
    Bottom,
    And(Rc<NnfFormula>, Rc<NnfFormula>),
    Or(Rc<NnfFormula>, Rc<NnfFormula>),
    Box(Modality, Rc<NnfFormula>),
    Diamond(Modality, Rc<NnfFormula>),
    Forall(QuantifierBounds, Rc<NnfFormula>),
    Exists(QuantifierBounds, Rc<NnfFormula>),
}

fn nnf(f: &Formula, positive: bool) -> Rc<NnfFormula> {
    match (f, positive) {
        (Formula::Bottom, true) | (Formula::Top, false) => Rc::new(NnfFormula::Bottom),
        (Formula::Bottom, false) | (Formula::Top, true) => Rc::new(NnfFormula::Top),
        (Formula::Var(name), _) => {
            Rc::new(NnfFormula::Lit { name: name.clone(), positive })
        }
        (Formula::Not(p), _) => nnf(p, !positive),
        (Formula::And(l, r), true) => Rc::new(NnfFormula::And(nnf(l, true), nnf(r, true))),
        (Formula::And(l, r), false) => Rc::new(NnfFormula::Or(nnf(l, false), nnf(r, false))),
        (Formula::Or(l, r), true) => Rc::new(NnfFormula::Or(nnf(l, true), nnf(r, true))),
        (Formula::Or(l, r), false) => Rc::new(NnfFormula::And(nnf(l, false), nnf(r, false))),
        (Formula::Implies(l, r), true) => Rc::new(NnfFormula::Or(nnf(l, false), nnf(r, true))),
        (Formula::Implies(l, r), false) => Rc::new(NnfFormula::And(nnf(l, true), nnf(r, false))),
        (Formula::Iff(l, r), true) => Rc::new(NnfFormula::And(
            Rc::new(NnfFormula::Or(nnf(l, false), nnf(r, true))),
            Rc::new(NnfFormula::Or(nnf(r, false), nnf(l, true))),
        )),
        (Formula::Iff(l, r), false) => Rc::new(NnfFormula::Or(
            Rc::new(NnfFormula::And(nnf(l, true), nnf(r, false))),
            Rc::new(NnfFormula::And(nnf(r, true), nnf(l, false))),
        )),
        (Formula::Box(m, p), true) => Rc::new(NnfFormula::Box(*m, nnf(p, true))),
        (Formula::Box(m, p), false) => Rc::new(NnfFormula::Diamond(*m, nnf(p, false))),
        (Formula::Diamond(m, p), true) => Rc::new(NnfFormula::Diamond(*m, nnf(p, true))),
        (Formula::Diamond(m, p), false) => Rc::new(NnfFormula::Box(*m, nnf(p, false))),
        (Formula::Forall(b, p), true) => Rc::new(NnfFormula::Forall(*b, nnf(p, true))),
        (Formula::Forall(b, p), false) => Rc::new(NnfFormula::Exists(*b, nnf(p, false))),
        (Formula::Exists(b, p), true) => Rc::new(NnfFormula::Exists(*b, nnf(p, true))),
        (Formula::Exists(b, p), false) => Rc::new(NnfFormula::Forall(*b, nnf(p, false))),
    }
}

impl NnfFormula {
    /// True iff the variable modality occurs free.
    pub fn has_free_var(&self) -> bool {
        match self {
            NnfFormula::Lit { .. } | NnfFormula::Top | NnfFormula::Bottom => false,
            NnfFormula::And(l, r) | NnfFormula::Or(l, r) => {
                l.has_free_var() || r.has_free_var()
            }
            NnfFormula::Box(m, p) | NnfFormula::Diamond(m, p) => {
                matches!(m, Modality::Var) || p.has_free_var()
            }
            NnfFormula::Forall(_, _) | NnfFormula::Exists(_, _) => false,
        }
    }

    /// Replaces free occurrences of the variable modality; shares subtrees
    /// that contain no free occurrence.
    pub fn substitute(self: &Rc<Self>, instance: Instance) -> Rc<NnfFormula> {
        if !self.has_free_var() {
            return Rc::clone(self);
        }
        match &**self {
            NnfFormula::And(l, r) => {
                Rc::new(NnfFormula::And(l.substitute(instance), r.substitute(instance)))
            }
            NnfFormula::Or(l, r) => {
                Rc::new(NnfFormula::Or(l.substitute(instance), r.substitute(instance)))
            }
            NnfFormula::Box(m, p) => {
                Rc::new(NnfFormula::Box(m.substitute(instance), p.substitute(instance)))
            }
            NnfFormula::Diamond(m, p) => {
                Rc::new(NnfFormula::Diamond(m.substitute(instance), p.substitute(instance)))
            }
            // has_free_var returned true, so this is unreachable for the rest.
            _ => unreachable!("substitute on a node without free occurrences"),
        }
    }

    /// Embeds the normal form back into the full syntax (negative literals
    /// become negated variables). Used to evaluate NNF output against the
    /// model semantics.
    pub fn to_formula(&self) -> Formula {
        match self {
            NnfFormula::Lit { name, positive: true } => Formula::Var(name.clone()),
            NnfFormula::Lit { name, positive: false } => Formula::Var(name.clone()).negate(),
            NnfFormula::Top => Formula::Top,
            NnfFormula::Bottom => Formula::Bottom,
            NnfFormula::And(l, r) => l.to_formula().and(r.to_formula()),
            NnfFormula::Or(l, r) => l.to_formula().or(r.to_formula()),
            NnfFormula::Box(m, p) => Formula::boxed(*m, p.to_formula()),
            NnfFormula::Diamond(m, p) => Formula::diamond(*m, p.to_formula()),
            NnfFormula::Forall(b, p) => Formula::forall(b.lower, b.upper, p.to_formula()),
            NnfFormula::Exists(b, p) => Formula::exists(b.lower, b.upper, p.to_formula()),
        }
    }
}
