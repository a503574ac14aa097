//! Explicit Kripke structures, a model checker for the full language, and a
//! tiny-scale brute-force satisfiability oracle.
//!
//! A model is a set of worlds, one binary accessibility relation *per atom*,
//! and a truth assignment per world. The relation of an instance is never
//! stored: it is the intersection of its atoms' relations, which is what
//! makes information distribute across supersets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Modality};
use crate::signature::{Instance, Signature};

/// Assignment of instances to named valuations of the variable modality,
/// as extracted from a solver run.
pub type XValuation = BTreeMap<String, Instance>;

pub type WorldId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("formula has a free variable modality but no valuation was supplied")]
    FreeVariableUnassigned,
    #[error("enumeration limits exceeded: {0}")]
    LimitsExceeded(String),
    #[error("world {0} is not part of the model")]
    UnknownWorld(WorldId),
    #[error("unknown atom `{0}` in model document")]
    UnknownAtom(String),
    #[error("model document is not valid: {0}")]
    BadModelDocument(String),
}

/// A pointed multi-modal Kripke structure, with optional valuations for the
/// variable modality attached by model extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    sig: Signature,
    worlds: Vec<WorldId>,
    edges: Vec<BTreeSet<(WorldId, WorldId)>>,
    assignment: BTreeMap<WorldId, BTreeSet<String>>,
    designated: Option<WorldId>,
    x_valuations: XValuation,
}

impl KripkeModel {
    /// A model with the given worlds, no edges, and everything false.
    pub fn new<I: IntoIterator<Item = WorldId>>(sig: &Signature, worlds: I) -> KripkeModel {
        let mut worlds: Vec<WorldId> = worlds.into_iter().collect();
        worlds.sort_unstable();
        worlds.dedup();
        assert!(!worlds.is_empty(), "a model needs at least one world");
        KripkeModel {
            sig: sig.clone(),
            edges: vec![BTreeSet::new(); sig.len()],
            worlds,
            assignment: BTreeMap::new(),
            designated: None,
            x_valuations: BTreeMap::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn worlds(&self) -> &[WorldId] {
        &self.worlds
    }

    pub fn designated(&self) -> Option<WorldId> {
        self.designated
    }

    pub fn x_valuations(&self) -> &XValuation {
        &self.x_valuations
    }

    pub fn has_world(&self, w: WorldId) -> bool {
        self.worlds.binary_search(&w).is_ok()
    }

    pub fn set_designated(&mut self, w: WorldId) -> Result<(), SemanticsError> {
        if !self.has_world(w) {
            return Err(SemanticsError::UnknownWorld(w));
        }
        self.designated = Some(w);
        Ok(())
    }

    pub fn add_edge(&mut self, atom: &str, from: WorldId, to: WorldId) -> Result<(), SemanticsError> {
        let idx = self
            .sig
            .atom_index(atom)
            .ok_or_else(|| SemanticsError::UnknownAtom(atom.to_string()))?;
        if !self.has_world(from) {
            return Err(SemanticsError::UnknownWorld(from));
        }
        if !self.has_world(to) {
            return Err(SemanticsError::UnknownWorld(to));
        }
        self.edges[idx].insert((from, to));
        Ok(())
    }

    pub fn add_edge_by_index(&mut self, atom: usize, from: WorldId, to: WorldId) {
        debug_assert!(self.has_world(from) && self.has_world(to));
        self.edges[atom].insert((from, to));
    }

    pub fn set_true(&mut self, world: WorldId, prop: &str) -> Result<(), SemanticsError> {
        if !self.has_world(world) {
            return Err(SemanticsError::UnknownWorld(world));
        }
        self.assignment.entry(world).or_default().insert(prop.to_string());
        Ok(())
    }

    pub fn set_x_valuation(&mut self, name: impl Into<String>, instance: Instance) {
        self.x_valuations.insert(name.into(), instance);
    }

    pub fn is_true(&self, world: WorldId, prop: &str) -> bool {
        self.assignment.get(&world).is_some_and(|props| props.contains(prop))
    }

    pub fn true_props(&self, world: WorldId) -> impl Iterator<Item = &str> {
        self.assignment.get(&world).into_iter().flatten().map(String::as_str)
    }

    /// The accessibility relation of an instance: the intersection of its
    /// atoms' relations.
    pub fn accessibility(&self, instance: Instance) -> BTreeSet<(WorldId, WorldId)> {
        debug_assert_eq!(instance.width(), self.sig.len());
        let mut indices = instance.atom_indices();
        let first = indices.next().expect("instances are nonempty");
        let mut acc = self.edges[first].clone();
        for i in indices {
            acc = acc.intersection(&self.edges[i]).copied().collect();
        }
        acc
    }

    /// Worlds reachable from `from` in one step of the instance's relation.
    pub fn successors(&self, from: WorldId, instance: Instance) -> Vec<WorldId> {
        self.worlds
            .iter()
            .copied()
            .filter(|&to| instance.atom_indices().all(|i| self.edges[i].contains(&(from, to))))
            .collect()
    }

    /// Pointed truth at a world. `x` supplies the instance for free
    /// occurrences of the variable modality; quantified occurrences are
    /// evaluated by enumerating the instances between the bounds.
    pub fn holds(
        &self,
        world: WorldId,
        f: &Formula,
        x: Option<Instance>,
    ) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Var(name) => self.is_true(world, name),
            Formula::Not(p) => !self.holds(world, p, x)?,
            Formula::And(l, r) => self.holds(world, l, x)? && self.holds(world, r, x)?,
            Formula::Or(l, r) => self.holds(world, l, x)? || self.holds(world, r, x)?,
            Formula::Implies(l, r) => !self.holds(world, l, x)? || self.holds(world, r, x)?,
            Formula::Iff(l, r) => self.holds(world, l, x)? == self.holds(world, r, x)?,
            Formula::Box(m, p) => {
                let inst = self.resolve(m, x)?;
                let mut all = true;
                for succ in self.successors(world, inst) {
                    if !self.holds(succ, p, x)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Diamond(m, p) => {
                let inst = self.resolve(m, x)?;
                let mut any = false;
                for succ in self.successors(world, inst) {
                    if self.holds(succ, p, x)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Formula::Forall(b, p) => {
                let mut all = true;
                for inst in Instance::range(b.lower, b.upper) {
                    if !self.holds(world, p, Some(inst))? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Exists(b, p) => {
                let mut any = false;
                for inst in Instance::range(b.lower, b.upper) {
                    if self.holds(world, p, Some(inst))? {
                        any = true;
                        break;
                    }
                }
                any
            }
        })
    }

    fn resolve(&self, m: &Modality, x: Option<Instance>) -> Result<Instance, SemanticsError> {
        match m {
            Modality::Const(inst) => Ok(*inst),
            Modality::Var => x.ok_or(SemanticsError::FreeVariableUnassigned),
        }
    }

    /// True iff the formula holds at some world.
    pub fn holds_somewhere(&self, f: &Formula, x: Option<Instance>) -> Result<bool, SemanticsError> {
        for &w in &self.worlds {
            if self.holds(w, f, x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// True iff the formula holds at every world.
    pub fn holds_everywhere(&self, f: &Formula, x: Option<Instance>) -> Result<bool, SemanticsError> {
        for &w in &self.worlds {
            if !self.holds(w, f, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut edges: BTreeMap<String, Vec<(WorldId, WorldId)>> = BTreeMap::new();
        for (i, rel) in self.edges.iter().enumerate() {
            if !rel.is_empty() {
                edges.insert(self.sig.atom_name(i).to_string(), rel.iter().copied().collect());
            }
        }
        let assignment: BTreeMap<String, Vec<String>> = self
            .assignment
            .iter()
            .filter(|(_, props)| !props.is_empty())
            .map(|(w, props)| (w.to_string(), props.iter().cloned().collect()))
            .collect();
        let x: BTreeMap<String, Vec<String>> = self
            .x_valuations
            .iter()
            .map(|(name, inst)| (name.clone(), self.sig.instance_names(*inst)))
            .collect();
        let doc = ModelDoc {
            worlds: self.worlds.clone(),
            edges,
            assignment,
            designated: self.designated,
            x,
        };
        serde_json::to_value(doc).expect("model serialization cannot fail")
    }

    pub fn from_json(
        value: &serde_json::Value,
        sig: &Signature,
    ) -> Result<KripkeModel, SemanticsError> {
        let doc: ModelDoc = serde_json::from_value(value.clone())
            .map_err(|e| SemanticsError::BadModelDocument(e.to_string()))?;
        if doc.worlds.is_empty() {
            return Err(SemanticsError::BadModelDocument("no worlds".into()));
        }
        let mut model = KripkeModel::new(sig, doc.worlds);
        for (atom, pairs) in &doc.edges {
            for &(from, to) in pairs {
                model.add_edge(atom, from, to)?;
            }
        }
        for (world, props) in &doc.assignment {
            let world: WorldId = world
                .parse()
                .map_err(|_| SemanticsError::BadModelDocument(format!("bad world id `{world}`")))?;
            for prop in props {
                model.set_true(world, prop)?;
            }
        }
        if let Some(d) = doc.designated {
            model.set_designated(d)?;
        }
        for (name, atoms) in &doc.x {
            let inst = sig
                .instance(atoms)
                .map_err(|e| SemanticsError::BadModelDocument(e.to_string()))?;
            model.set_x_valuation(name.clone(), inst);
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    worlds: Vec<WorldId>,
    #[serde(default)]
    edges: BTreeMap<String, Vec<(WorldId, WorldId)>>,
    #[serde(default)]
    assignment: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    designated: Option<WorldId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    x: BTreeMap<String, Vec<String>>,
}

// ---------------------------------------------------------------------------
// Brute-force satisfiability oracle

/// Scale caps for [`brute_force_sat`]. The defaults keep full enumeration in
/// the ten-thousands of candidate models.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceLimits {
    pub max_worlds: usize,
    pub max_atoms: usize,
    pub max_vars: usize,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits { max_worlds: 2, max_atoms: 2, max_vars: 2 }
    }
}

const BRUTE_FORCE_BUDGET: u64 = 1 << 24;

/// Exhaustively enumerates pointed models up to the given limits and returns
/// the first one satisfying the formula, or `None` if there is none of that
/// size. Enumeration order is deterministic: world count ascending, then
/// relation bits, then assignment bits, then the designated world.
pub fn brute_force_sat(
    f: &Formula,
    sig: &Signature,
    limits: &BruteForceLimits,
) -> Result<Option<(KripkeModel, WorldId)>, SemanticsError> {
    if !f.is_closed() {
        return Err(SemanticsError::FreeVariableUnassigned);
    }
    let atoms = sig.len();
    let vars = f.prop_vars();
    if atoms > limits.max_atoms {
        return Err(SemanticsError::LimitsExceeded(format!(
            "{atoms} atoms > max_atoms {}",
            limits.max_atoms
        )));
    }
    if vars.len() > limits.max_vars {
        return Err(SemanticsError::LimitsExceeded(format!(
            "{} propositional variables > max_vars {}",
            vars.len(),
            limits.max_vars
        )));
    }
    let mut budget = 0u64;
    for n in 1..=limits.max_worlds {
        let bits = (atoms * n * n + vars.len() * n) as u32;
        if bits >= 63 {
            return Err(SemanticsError::LimitsExceeded("enumeration space too large".into()));
        }
        budget = budget.saturating_add(1u64 << bits);
    }
    if budget > BRUTE_FORCE_BUDGET {
        return Err(SemanticsError::LimitsExceeded(format!(
            "{budget} candidate models exceed the enumeration budget"
        )));
    }

    for n in 1..=limits.max_worlds {
        let rel_bits = atoms * n * n;
        let asg_bits = vars.len() * n;
        for rel in 0u64..(1u64 << rel_bits) {
            for asg in 0u64..(1u64 << asg_bits) {
                let packed = Packed { atoms, vars: &vars, n, rel, asg };
                for w in 0..n as WorldId {
                    if packed.eval(f, w, None) {
                        let mut model = packed.unpack(sig);
                        model.set_designated(w).expect("world exists");
                        return Ok(Some((model, w)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// One candidate model packed into two words: `rel` holds atoms × n × n edge
/// bits (atom-major, then source, then target), `asg` holds vars × n truth
/// bits (variable-major).
struct Packed<'a> {
    atoms: usize,
    vars: &'a [String],
    n: usize,
    rel: u64,
    asg: u64,
}

impl Packed<'_> {
    fn edge(&self, atom: usize, from: usize, to: usize) -> bool {
        let bit = atom * self.n * self.n + from * self.n + to;
        self.rel & (1 << bit) != 0
    }

    fn prop(&self, var_idx: usize, world: usize) -> bool {
        self.asg & (1 << (var_idx * self.n + world)) != 0
    }

    fn instance_edge(&self, inst: Instance, from: usize, to: usize) -> bool {
        inst.atom_indices().all(|a| self.edge(a, from, to))
    }

    fn eval(&self, f: &Formula, world: WorldId, x: Option<Instance>) -> bool {
        match f {
            Formula::Bottom => false,
            Formula::Top => true,
            Formula::Var(name) => {
                let idx = self.vars.binary_search(name).expect("collected variable");
                self.prop(idx, world as usize)
            }
            Formula::Not(p) => !self.eval(p, world, x),
            Formula::And(l, r) => self.eval(l, world, x) && self.eval(r, world, x),
            Formula::Or(l, r) => self.eval(l, world, x) || self.eval(r, world, x),
            Formula::Implies(l, r) => !self.eval(l, world, x) || self.eval(r, world, x),
            Formula::Iff(l, r) => self.eval(l, world, x) == self.eval(r, world, x),
            Formula::Box(m, p) => {
                let inst = self.resolve(m, x);
                (0..self.n).all(|to| {
                    !self.instance_edge(inst, world as usize, to) || self.eval(p, to as WorldId, x)
                })
            }
            Formula::Diamond(m, p) => {
                let inst = self.resolve(m, x);
                (0..self.n).any(|to| {
                    self.instance_edge(inst, world as usize, to) && self.eval(p, to as WorldId, x)
                })
            }
            Formula::Forall(b, p) => {
                Instance::range(b.lower, b.upper).all(|inst| self.eval(p, world, Some(inst)))
            }
            Formula::Exists(b, p) => {
                Instance::range(b.lower, b.upper).any(|inst| self.eval(p, world, Some(inst)))
            }
        }
    }

    fn resolve(&self, m: &Modality, x: Option<Instance>) -> Instance {
        match m {
            Modality::Const(inst) => *inst,
            Modality::Var => x.expect("closed formula binds the variable modality"),
        }
    }

    fn unpack(&self, sig: &Signature) -> KripkeModel {
        let mut model = KripkeModel::new(sig, 0..self.n as WorldId);
        for atom in 0..self.atoms {
            for from in 0..self.n {
                for to in 0..self.n {
                    if self.edge(atom, from, to) {
                        model.add_edge_by_index(atom, from as WorldId, to as WorldId);
                    }
                }
            }
        }
        for (idx, var) in self.vars.iter().enumerate() {
            for world in 0..self.n {
                if self.prop(idx, world) {
                    model.set_true(world as WorldId, var).expect("world exists");
                }
            }
        }
        model
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn sig2() -> Signature {
        Signature::new(["a", "b"]).unwrap()
    }

    #[test]
    fn accessibility_is_the_intersection() {
        let sig = sig2();
        let mut m = KripkeModel::new(&sig, [0, 1, 2]);
        m.add_edge("a", 0, 1).unwrap();
        m.add_edge("a", 0, 2).unwrap();
        m.add_edge("b", 0, 1).unwrap();

        let a = sig.singleton("a").unwrap();
        let ab = sig.instance(["a", "b"]).unwrap();
        assert_eq!(m.accessibility(a), BTreeSet::from([(0, 1), (0, 2)]));
        assert_eq!(m.accessibility(ab), BTreeSet::from([(0, 1)]));

        // Disjoint relations intersect to nothing, so `[a,b] false` holds.
        let mut disjoint = KripkeModel::new(&sig, [0, 1, 2]);
        disjoint.add_edge("a", 0, 1).unwrap();
        disjoint.add_edge("b", 0, 2).unwrap();
        assert!(disjoint.accessibility(ab).is_empty());
        let f = parse_formula("[a,b] false", &sig).unwrap();
        assert!(disjoint.holds(0, &f, None).unwrap());
    }

    #[test]
    fn vacuous_box_holds_without_successors() {
        let sig = sig2();
        let m = KripkeModel::new(&sig, [0]);
        let f = parse_formula("[a] false", &sig).unwrap();
        assert!(m.holds(0, &f, None).unwrap());
        let g = parse_formula("<a> true", &sig).unwrap();
        assert!(!m.holds(0, &g, None).unwrap());
    }

    #[test]
    fn empty_quantifier_ranges() {
        let sig = sig2();
        let m = KripkeModel::new(&sig, [0]);
        // Lower bound not below the upper bound: the range is empty.
        let f = parse_formula("exists {a,b} <= x <= {a} ( <x> true )", &sig).unwrap();
        assert!(!m.holds(0, &f, None).unwrap());
        let g = parse_formula("forall {a,b} <= x <= {a} ( <x> true )", &sig).unwrap();
        assert!(m.holds(0, &g, None).unwrap());
    }

    #[test]
    fn free_variable_requires_valuation() {
        let sig = sig2();
        let m = KripkeModel::new(&sig, [0]);
        let f = Formula::boxed(Modality::Var, Formula::prop("A"));
        assert_eq!(m.holds(0, &f, None).unwrap_err(), SemanticsError::FreeVariableUnassigned);
        let a = sig.singleton("a").unwrap();
        assert!(m.holds(0, &f, Some(a)).unwrap());
    }

    #[test]
    fn lane_change_two_world_model() {
        let sig = Signature::new(["o1", "o2", "r1", "r2", "r3", "r4", "g1", "g2"]).unwrap();
        let mut m = KripkeModel::new(&sig, [0, 1]);
        m.add_edge("o1", 0, 1).unwrap();
        m.set_true(1, "laneBlocked").unwrap();

        let assertions = [
            "[o1] laneBlocked",
            "[o2] (gapAvailable & ~largeGapAvailable)",
            "[r1] (laneBlocked -> brake | changeLane)",
            "[r2] (changeLane -> gapAvailable)",
            "[r3] (beFast -> ~brake)",
            "[r4] (beConsiderate & changeLane -> largeGapAvailable)",
            "[g1] beFast",
            "[g2] beConsiderate",
        ];
        let sigma = Formula::conjoin(assertions.iter().map(|t| parse_formula(t, &sig).unwrap()));
        let query = parse_formula("exists x ( <x> true )", &sig).unwrap();
        assert!(m.holds(0, &sigma.clone().and(query), None).unwrap());
        // The full-signature instance has no successor here, which is fine
        // for the existential but refutes the universal variant.
        let all = parse_formula("forall x ( <x> true )", &sig).unwrap();
        assert!(!m.holds(0, &sigma.and(all), None).unwrap());
    }

    #[test]
    fn brute_force_bottom_has_no_model() {
        let sig = sig2();
        let found = brute_force_sat(&Formula::Bottom, &sig, &BruteForceLimits::default()).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn brute_force_finds_minimal_diamond_witness() {
        let sig = sig2();
        let f = parse_formula("<a> A", &sig).unwrap();
        let (model, world) =
            brute_force_sat(&f, &sig, &BruteForceLimits::default()).unwrap().unwrap();
        assert!(model.holds(world, &f, None).unwrap());
        let a = sig.singleton("a").unwrap();
        let succs = model.successors(world, a);
        assert!(succs.iter().any(|&w| model.is_true(w, "A")));
    }

    #[test]
    fn brute_force_rejects_contradiction() {
        let sig = sig2();
        let f = parse_formula("[a] A & <a> ~A", &sig).unwrap();
        assert!(brute_force_sat(&f, &sig, &BruteForceLimits::default()).unwrap().is_none());
    }

    #[test]
    fn brute_force_enforces_limits() {
        let sig = Signature::new(["a", "b", "c"]).unwrap();
        let f = parse_formula("<a> A", &sig).unwrap();
        let err = brute_force_sat(&f, &sig, &BruteForceLimits::default()).unwrap_err();
        assert!(matches!(err, SemanticsError::LimitsExceeded(_)));
        // With the cap raised the same formula is solvable.
        let limits = BruteForceLimits { max_worlds: 2, max_atoms: 3, max_vars: 2 };
        assert!(brute_force_sat(&f, &sig, &limits).unwrap().is_some());
    }

    #[test]
    fn model_json_round_trip() {
        let sig = sig2();
        let mut m = KripkeModel::new(&sig, [0, 1]);
        m.add_edge("a", 0, 1).unwrap();
        m.set_true(1, "laneBlocked").unwrap();
        m.set_designated(0).unwrap();
        m.set_x_valuation("b0", sig.singleton("a").unwrap());

        let json = m.to_json();
        assert_eq!(json["edges"]["a"], serde_json::json!([[0, 1]]));
        assert_eq!(json["assignment"]["1"], serde_json::json!(["laneBlocked"]));
        assert_eq!(json["designated"], serde_json::json!(0));
        assert_eq!(json["x"]["b0"], serde_json::json!(["a"]));

        let back = KripkeModel::from_json(&json, &sig).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn model_json_validates_contents() {
        let sig = sig2();
        let bad = serde_json::json!({"worlds": [0], "edges": {"zz": [[0, 0]]}});
        assert!(matches!(
            KripkeModel::from_json(&bad, &sig).unwrap_err(),
            SemanticsError::UnknownAtom(_)
        ));
        let bad = serde_json::json!({"worlds": [0], "edges": {"a": [[0, 7]]}});
        assert!(matches!(
            KripkeModel::from_json(&bad, &sig).unwrap_err(),
            SemanticsError::UnknownWorld(7)
        ));
    }
}
