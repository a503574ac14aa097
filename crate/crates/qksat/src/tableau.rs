//! Prefixed tableau decision procedure, realized as lazy clause generation
//! over the Boolean core.
//!
//! Every prefixed formula `(world, valuation) ⊨ body` gets a proxy variable.
//! Each world ω carries a block of access bits `p_i(ω)`, one per atom: the
//! edge into ω grants access to exactly the instances whose atoms are all
//! set, so one general edge relation plus the p-blocks represent every
//! per-instance relation at once, and information distribution across
//! supersets falls out of the encoding instead of being axiomatized.
//! Valuations of the variable modality carry x-bit blocks `x_i(β)` the same
//! way.
//!
//! The loop alternates solving with expanding: after a SAT call, every proxy
//! that is true in the Boolean model and has rule work left fires its rule,
//! appending clauses (and possibly fresh worlds, valuations, and proxies); a
//! ledger guarantees each (rule, trigger) pair fires at most once. When
//! nothing is left to fire, the assignment is read back as a Kripke model
//! and re-checked against the model semantics before it is returned.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{Formula, Modality, NnfFormula, QuantifierBounds};
use crate::satcore::{BoolVar, Lit, Model, SolveResult, SolverStore};
use crate::semantics::{KripkeModel, SemanticsError, WorldId};
use crate::signature::{Instance, Signature};

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("cannot solve a formula with a free variable modality")]
    OpenFormula,
    #[error("extracted model failed verification against the semantics: {reason}")]
    InternalVerificationFailure { reason: String, model: Box<KripkeModel> },
    #[error("rule firing did not converge within {0} rounds")]
    RoundLimitExceeded(usize),
}

/// Diagnostic switches. The `disable_*` flags cripple one rule each so the
/// self-check suite can confirm that the verification layer catches the
/// resulting wrong models; `reverse_scan` permutes rule-firing order, which
/// must never change a verdict.
#[derive(Debug, Clone, Copy)]
pub struct TableauOptions {
    pub reverse_scan: bool,
    pub disable_forall_s: bool,
    pub disable_forall_x: bool,
    pub disable_distribution: bool,
    pub max_rounds: usize,
}

impl Default for TableauOptions {
    fn default() -> Self {
        TableauOptions {
            reverse_scan: false,
            disable_forall_s: false,
            disable_forall_x: false,
            disable_distribution: false,
            max_rounds: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Unsat,
    Sat(Box<KripkeModel>),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn model(&self) -> Option<&KripkeModel> {
        match self {
            Verdict::Sat(m) => Some(m),
            Verdict::Unsat => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableauStats {
    pub solver_calls: u32,
    pub rounds: u32,
    pub worlds: u32,
    pub valuations: u32,
    pub registered: u32,
    pub fires: u32,
}

#[derive(Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub stats: TableauStats,
}

/// Decides satisfiability of a closed formula with default options.
pub fn solve(f: &Formula, sig: &Signature) -> Result<Outcome, TableauError> {
    solve_with(f, sig, &TableauOptions::default())
}

pub fn solve_with(
    f: &Formula,
    sig: &Signature,
    options: &TableauOptions,
) -> Result<Outcome, TableauError> {
    if !f.is_closed() {
        return Err(TableauError::OpenFormula);
    }
    let mut state = State::new(sig.clone(), *options);
    state.assert_root(f.to_nnf());
    state.run(f)
}

type PfIdx = u32;
type ValId = u32;
type EdgeIdx = u32;

/// A prefixed formula: `(world, valuation) ⊨ body`, plus its proxy variable.
struct Pf {
    world: WorldId,
    val: ValId,
    body: Rc<NnfFormula>,
    proxy: BoolVar,
}

struct World {
    /// Access bits, one per atom: `p_i(ω)` true means atom i reaches this
    /// world along the edge that created it.
    p: Vec<BoolVar>,
}

struct Valuation {
    /// Instance bits for the variable modality under this valuation.
    x: Vec<BoolVar>,
    /// The root valuation of a closed input constrains nothing and is
    /// skipped at extraction.
    dummy: bool,
}

struct Edge {
    from: WorldId,
    to: WorldId,
    /// Only consulted by the distribution-disabling diagnostic.
    creator: Modality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FireKey {
    Node(PfIdx),
    BoxEdge(PfIdx, EdgeIdx),
    ForallZero(PfIdx),
    ForallS(PfIdx, PfIdx),
    ForallX(PfIdx, ValId),
}

struct State {
    sig: Signature,
    opts: TableauOptions,
    store: SolverStore,
    worlds: Vec<World>,
    vals: Vec<Valuation>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeIdx>>,
    pfs: Vec<Pf>,
    pf_index: HashMap<(WorldId, ValId, Rc<NnfFormula>), PfIdx>,
    /// Constant-modality formulas registered per world; universal triggers.
    const_modal_at: Vec<Vec<PfIdx>>,
    /// Variable-modality formulas registered per world; universal triggers.
    var_modal_at: Vec<Vec<PfIdx>>,
    /// Shared truth variable per (world, proposition), in creation order so
    /// extraction is deterministic.
    atom_vars: HashMap<(WorldId, String), BoolVar>,
    atom_var_list: Vec<(WorldId, String, BoolVar)>,
    /// Auxiliary `d ↔ x_i(β) ∧ ¬p_i(ω)` variables for variable-modality
    /// boxes, cached per (valuation, world, atom).
    box_aux: HashMap<(ValId, WorldId, usize), BoolVar>,
    fired: HashSet<FireKey>,
    stats: TableauStats,
}

impl State {
    fn new(sig: Signature, opts: TableauOptions) -> State {
        let mut state = State {
            sig,
            opts,
            store: SolverStore::new(),
            worlds: Vec::new(),
            vals: Vec::new(),
            edges: Vec::new(),
            out_edges: Vec::new(),
            pfs: Vec::new(),
            pf_index: HashMap::new(),
            const_modal_at: Vec::new(),
            var_modal_at: Vec::new(),
            atom_vars: HashMap::new(),
            atom_var_list: Vec::new(),
            box_aux: HashMap::new(),
            fired: HashSet::new(),
            stats: TableauStats::default(),
        };
        state.new_world(); // root world
        state.new_valuation(true); // dummy root valuation
        state
    }

    fn new_world(&mut self) -> WorldId {
        let id = self.worlds.len() as WorldId;
        let p = (0..self.sig.len()).map(|_| self.store.new_var()).collect();
        self.worlds.push(World { p });
        self.out_edges.push(Vec::new());
        self.const_modal_at.push(Vec::new());
        self.var_modal_at.push(Vec::new());
        self.stats.worlds += 1;
        id
    }

    fn new_valuation(&mut self, dummy: bool) -> ValId {
        let id = self.vals.len() as ValId;
        let x: Vec<BoolVar> = (0..self.sig.len()).map(|_| self.store.new_var()).collect();
        if !dummy {
            // Valuations denote instances, which are nonempty.
            let clause: Vec<Lit> = x.iter().map(|&v| Lit::positive(v)).collect();
            self.add_clause(&clause);
        }
        self.vals.push(Valuation { x, dummy });
        self.stats.valuations += 1;
        id
    }

    fn add_clause(&mut self, lits: &[Lit]) {
        self.store.add_clause(lits).expect("tableau allocates every variable it uses");
    }

    /// Proxy lookup with registration. New modal formulas are recorded as
    /// universal-rule triggers for their world.
    fn proxy(&mut self, world: WorldId, val: ValId, body: Rc<NnfFormula>) -> BoolVar {
        if let Some(&idx) = self.pf_index.get(&(world, val, Rc::clone(&body))) {
            return self.pfs[idx as usize].proxy;
        }
        let proxy = self.store.new_var();
        let idx = self.pfs.len() as PfIdx;
        match &*body {
            NnfFormula::Box(Modality::Const(_), _) | NnfFormula::Diamond(Modality::Const(_), _) => {
                self.const_modal_at[world as usize].push(idx);
            }
            NnfFormula::Box(Modality::Var, _) | NnfFormula::Diamond(Modality::Var, _) => {
                self.var_modal_at[world as usize].push(idx);
            }
            _ => {}
        }
        self.pf_index.insert((world, val, Rc::clone(&body)), idx);
        self.pfs.push(Pf { world, val, body, proxy });
        self.stats.registered += 1;
        proxy
    }

    fn atom_var(&mut self, world: WorldId, name: &str) -> BoolVar {
        if let Some(&v) = self.atom_vars.get(&(world, name.to_string())) {
            return v;
        }
        let v = self.store.new_var();
        self.atom_vars.insert((world, name.to_string()), v);
        self.atom_var_list.push((world, name.to_string(), v));
        v
    }

    fn assert_root(&mut self, body: Rc<NnfFormula>) {
        let root = self.proxy(0, 0, body);
        self.add_clause(&[Lit::positive(root)]);
    }

    fn run(&mut self, original: &Formula) -> Result<Outcome, TableauError> {
        loop {
            if self.stats.rounds as usize >= self.opts.max_rounds {
                return Err(TableauError::RoundLimitExceeded(self.opts.max_rounds));
            }
            self.stats.rounds += 1;
            self.stats.solver_calls += 1;
            match self.store.solve(&[]) {
                SolveResult::Unsat => {
                    return Ok(Outcome { verdict: Verdict::Unsat, stats: self.stats });
                }
                SolveResult::Sat(model) => {
                    let fired = self.scan_and_fire(&model);
                    if fired == 0 {
                        let extracted = self.extract(&model);
                        return match extracted.holds(0, original, None) {
                            Ok(true) => Ok(Outcome {
                                verdict: Verdict::Sat(Box::new(extracted)),
                                stats: self.stats,
                            }),
                            Ok(false) => Err(TableauError::InternalVerificationFailure {
                                reason: "formula is false at the designated world".into(),
                                model: Box::new(extracted),
                            }),
                            Err(e) => Err(TableauError::InternalVerificationFailure {
                                reason: e.to_string(),
                                model: Box::new(extracted),
                            }),
                        };
                    }
                }
            }
        }
    }

    /// One pass over the registry: fire every rule instance whose proxy is
    /// true in the current Boolean model and whose ledger entry is new.
    /// Returns the number of firings.
    fn scan_and_fire(&mut self, model: &Model) -> u32 {
        let snapshot = self.pfs.len();
        let mut fired = 0u32;
        let indices: Vec<usize> = if self.opts.reverse_scan {
            (0..snapshot).rev().collect()
        } else {
            (0..snapshot).collect()
        };
        for i in indices {
            // Proxies created after the last solve have no assignment yet;
            // they are picked up next round.
            if model.get(self.pfs[i].proxy) != Some(true) {
                continue;
            }
            fired += self.fire(i as PfIdx);
        }
        self.stats.fires += fired;
        fired
    }

    fn fire(&mut self, idx: PfIdx) -> u32 {
        let body = Rc::clone(&self.pfs[idx as usize].body);
        match &*body {
            NnfFormula::Top => 0,
            NnfFormula::Bottom
            | NnfFormula::Lit { .. }
            | NnfFormula::And(_, _)
            | NnfFormula::Or(_, _)
            | NnfFormula::Diamond(_, _)
            | NnfFormula::Exists(_, _) => {
                if !self.fired.insert(FireKey::Node(idx)) {
                    return 0;
                }
                match &*body {
                    NnfFormula::Bottom => self.fire_bottom(idx),
                    NnfFormula::Lit { name, positive } => {
                        self.fire_literal(idx, &name.clone(), *positive)
                    }
                    NnfFormula::And(l, r) => {
                        self.fire_and(idx, Rc::clone(l), Rc::clone(r));
                    }
                    NnfFormula::Or(l, r) => {
                        self.fire_or(idx, Rc::clone(l), Rc::clone(r));
                    }
                    NnfFormula::Diamond(m, p) => self.fire_diamond(idx, *m, Rc::clone(p)),
                    NnfFormula::Exists(b, p) => self.fire_exists(idx, *b, Rc::clone(p)),
                    _ => unreachable!(),
                }
                1
            }
            NnfFormula::Box(m, p) => self.fire_box(idx, *m, Rc::clone(p)),
            NnfFormula::Forall(b, p) => self.fire_forall(idx, *b, Rc::clone(p)),
        }
    }

    fn fire_bottom(&mut self, idx: PfIdx) {
        let v = self.pfs[idx as usize].proxy;
        self.add_clause(&[Lit::negative(v)]);
    }

    /// Literals of the same proposition at the same world share one truth
    /// variable, whatever the valuation prefix; that is where clashing
    /// branches close.
    fn fire_literal(&mut self, idx: PfIdx, name: &str, positive: bool) {
        let (world, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.proxy)
        };
        let a = self.atom_var(world, name);
        self.add_clause(&[Lit::negative(v), Lit::new(a, positive)]);
    }

    fn fire_and(&mut self, idx: PfIdx, l: Rc<NnfFormula>, r: Rc<NnfFormula>) {
        let (world, val, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.val, pf.proxy)
        };
        let vl = self.proxy(world, val, l);
        let vr = self.proxy(world, val, r);
        self.add_clause(&[Lit::negative(v), Lit::positive(vl)]);
        self.add_clause(&[Lit::negative(v), Lit::positive(vr)]);
    }

    fn fire_or(&mut self, idx: PfIdx, l: Rc<NnfFormula>, r: Rc<NnfFormula>) {
        let (world, val, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.val, pf.proxy)
        };
        let vl = self.proxy(world, val, l);
        let vr = self.proxy(world, val, r);
        self.add_clause(&[Lit::negative(v), Lit::positive(vl), Lit::positive(vr)]);
    }

    /// Creates the successor world with its access bits: a constant modality
    /// forces its atoms' bits, the variable modality copies the valuation's
    /// x-bits into the p-block, so any superset instance gains access purely
    /// through the shared bits.
    fn fire_diamond(&mut self, idx: PfIdx, m: Modality, p: Rc<NnfFormula>) {
        let (world, val, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.val, pf.proxy)
        };
        let target = self.new_world();
        let eidx = self.edges.len() as EdgeIdx;
        self.edges.push(Edge { from: world, to: target, creator: m });
        self.out_edges[world as usize].push(eidx);

        match m {
            Modality::Const(inst) => {
                for i in inst.atom_indices() {
                    let p_i = self.worlds[target as usize].p[i];
                    self.add_clause(&[Lit::negative(v), Lit::positive(p_i)]);
                }
            }
            Modality::Var => {
                for i in 0..self.sig.len() {
                    let x_i = self.vals[val as usize].x[i];
                    let p_i = self.worlds[target as usize].p[i];
                    self.add_clause(&[
                        Lit::negative(v),
                        Lit::negative(x_i),
                        Lit::positive(p_i),
                    ]);
                }
            }
        }
        let child = self.proxy(target, val, p);
        self.add_clause(&[Lit::negative(v), Lit::positive(child)]);
    }

    /// Fires once per (box, edge) pair, including edges created later: the
    /// body is forced at the target whenever the target's access bits cover
    /// the box's instance.
    fn fire_box(&mut self, idx: PfIdx, m: Modality, p: Rc<NnfFormula>) -> u32 {
        let (world, val, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.val, pf.proxy)
        };
        let mut fired = 0;
        let edges: Vec<EdgeIdx> = self.out_edges[world as usize].clone();
        for eidx in edges {
            if !self.fired.insert(FireKey::BoxEdge(idx, eidx)) {
                continue;
            }
            fired += 1;
            let target = self.edges[eidx as usize].to;

            if self.opts.disable_distribution {
                // Diagnostic mode: ignore the access bits and propagate only
                // along edges created by a syntactically identical modality.
                if self.edges[eidx as usize].creator == m {
                    let child = self.proxy(target, val, Rc::clone(&p));
                    self.add_clause(&[Lit::negative(v), Lit::positive(child)]);
                }
                continue;
            }

            match m {
                Modality::Const(inst) => {
                    let child = self.proxy(target, val, Rc::clone(&p));
                    let mut clause = vec![Lit::negative(v)];
                    for i in inst.atom_indices() {
                        clause.push(Lit::negative(self.worlds[target as usize].p[i]));
                    }
                    clause.push(Lit::positive(child));
                    self.add_clause(&clause);
                }
                Modality::Var => {
                    // d_i ↔ x_i(β) ∧ ¬p_i(ω'): the body may be dodged only
                    // where some atom of the valuation lacks access.
                    let mut clause = vec![Lit::negative(v)];
                    for i in 0..self.sig.len() {
                        let d = self.box_aux_var(val, target, i);
                        clause.push(Lit::positive(d));
                    }
                    let child = self.proxy(target, val, Rc::clone(&p));
                    clause.push(Lit::positive(child));
                    self.add_clause(&clause);
                }
            }
        }
        fired
    }

    fn box_aux_var(&mut self, val: ValId, world: WorldId, atom: usize) -> BoolVar {
        if let Some(&d) = self.box_aux.get(&(val, world, atom)) {
            return d;
        }
        let d = self.store.new_var();
        let x_i = self.vals[val as usize].x[atom];
        let p_i = self.worlds[world as usize].p[atom];
        self.add_clause(&[Lit::negative(d), Lit::positive(x_i)]);
        self.add_clause(&[Lit::negative(d), Lit::negative(p_i)]);
        self.add_clause(&[Lit::negative(x_i), Lit::positive(p_i), Lit::positive(d)]);
        self.box_aux.insert((val, world, atom), d);
        d
    }

    /// Introduces a fresh valuation constrained to the bounds and hands the
    /// body over to it.
    fn fire_exists(&mut self, idx: PfIdx, b: QuantifierBounds, p: Rc<NnfFormula>) {
        let (world, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.proxy)
        };
        let val = self.new_valuation(false);
        for i in 0..self.sig.len() {
            let x_i = self.vals[val as usize].x[i];
            if !b.upper.contains_atom(i) {
                self.add_clause(&[Lit::negative(v), Lit::negative(x_i)]);
            }
            if b.lower.is_some_and(|low| low.contains_atom(i)) {
                self.add_clause(&[Lit::negative(v), Lit::positive(x_i)]);
            }
        }
        let mut nonempty = vec![Lit::negative(v)];
        for i in b.upper.atom_indices() {
            nonempty.push(Lit::positive(self.vals[val as usize].x[i]));
        }
        self.add_clause(&nonempty);
        let child = self.proxy(world, val, p);
        self.add_clause(&[Lit::negative(v), Lit::positive(child)]);
    }

    /// The three universal sub-rules. Substitution instances come from the
    /// upper bound, from constant modalities registered at the same world,
    /// and from valuations used by variable modalities there; all three
    /// re-fire for triggers that appear later.
    fn fire_forall(&mut self, idx: PfIdx, b: QuantifierBounds, p: Rc<NnfFormula>) -> u32 {
        let (world, val, v) = {
            let pf = &self.pfs[idx as usize];
            (pf.world, pf.val, pf.proxy)
        };
        let mut fired = 0;
        let statically_in_range = |inst: Instance| {
            inst.is_subinstance_of(b.upper)
                && b.lower.map_or(true, |low| low.is_subinstance_of(inst))
        };

        // Upper-bound instance, when the range is nonempty.
        if b.lower.map_or(true, |low| low.is_subinstance_of(b.upper))
            && self.fired.insert(FireKey::ForallZero(idx))
        {
            fired += 1;
            let inst = p.substitute(b.upper);
            let child = self.proxy(world, val, inst);
            self.add_clause(&[Lit::negative(v), Lit::positive(child)]);
        }

        // Instances for constant modalities at this world that sit between
        // the bounds; the check is static, so the clause is unconditional.
        if !self.opts.disable_forall_s {
            let triggers: Vec<PfIdx> = self.const_modal_at[world as usize].clone();
            for t_idx in triggers {
                let t_inst = match &*self.pfs[t_idx as usize].body {
                    NnfFormula::Box(Modality::Const(i), _)
                    | NnfFormula::Diamond(Modality::Const(i), _) => *i,
                    _ => unreachable!("const_modal_at holds constant modalities"),
                };
                if !statically_in_range(t_inst) {
                    continue;
                }
                if !self.fired.insert(FireKey::ForallS(idx, t_idx)) {
                    continue;
                }
                fired += 1;
                let t_val = self.pfs[t_idx as usize].val;
                let inst = p.substitute(t_inst);
                let child = self.proxy(world, t_val, inst);
                self.add_clause(&[Lit::negative(v), Lit::positive(child)]);
            }
        }

        // Valuations used by variable modalities at this world: the body is
        // forced under a valuation whenever its x-bits fall inside the
        // bounds, expressed as one guarded clause.
        if !self.opts.disable_forall_x {
            let triggers: Vec<ValId> = self.var_modal_at[world as usize]
                .clone()
                .into_iter()
                .map(|pf| self.pfs[pf as usize].val)
                .collect();
            for t_val in triggers {
                if !self.fired.insert(FireKey::ForallX(idx, t_val)) {
                    continue;
                }
                fired += 1;
                let child = self.proxy(world, t_val, Rc::clone(&p));
                let mut clause = vec![Lit::negative(v)];
                if let Some(low) = b.lower {
                    for i in low.atom_indices() {
                        clause.push(Lit::negative(self.vals[t_val as usize].x[i]));
                    }
                }
                for i in 0..self.sig.len() {
                    if !b.upper.contains_atom(i) {
                        clause.push(Lit::positive(self.vals[t_val as usize].x[i]));
                    }
                }
                clause.push(Lit::positive(child));
                self.add_clause(&clause);
            }
        }

        fired
    }

    /// Reads the saturated Boolean model back as a Kripke structure: the
    /// per-atom relations come from the edges and access bits, truth from
    /// the shared literal variables, x-valuations from the x-blocks.
    fn extract(&self, model: &Model) -> KripkeModel {
        let mut out = KripkeModel::new(&self.sig, 0..self.worlds.len() as WorldId);
        for edge in &self.edges {
            for i in 0..self.sig.len() {
                if model.get(self.worlds[edge.to as usize].p[i]) == Some(true) {
                    out.add_edge_by_index(i, edge.from, edge.to);
                }
            }
        }
        for (world, name, var) in &self.atom_var_list {
            if model.get(*var) == Some(true) {
                out.set_true(*world, name).expect("world exists");
            }
        }
        for (id, val) in self.vals.iter().enumerate() {
            if val.dummy {
                continue;
            }
            let mut bits = 0u64;
            for (i, &x_i) in val.x.iter().enumerate() {
                if model.get(x_i) == Some(true) {
                    bits |= 1 << i;
                }
            }
            if bits != 0 {
                let inst = self.sig.instance_from_bits(bits);
                out.set_x_valuation(format!("b{}", id - 1), inst);
            }
        }
        out.set_designated(0).expect("root world exists");
        out
    }
}

impl From<SemanticsError> for TableauError {
    fn from(_: SemanticsError) -> Self {
        TableauError::OpenFormula
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::semantics::{brute_force_sat, BruteForceLimits};

    fn sig2() -> Signature {
        Signature::new(["a", "b"]).unwrap()
    }

    fn verdict(text: &str, sig: &Signature) -> Verdict {
        solve(&parse_formula(text, sig).unwrap(), sig).unwrap().verdict
    }

    #[test]
    fn propositional_conflict_closes() {
        let sig = sig2();
        assert_eq!(verdict("A & ~A", &sig), Verdict::Unsat);
    }

    #[test]
    fn forced_disjunct_is_chosen() {
        let sig = sig2();
        match verdict("(A | B) & ~A", &sig) {
            Verdict::Sat(m) => {
                assert!(m.is_true(0, "B"));
                assert!(!m.is_true(0, "A"));
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    #[test]
    fn duplicate_subformulas_share_a_proxy() {
        let sig = sig2();
        let f = parse_formula("(A & B) & (A & B)", &sig).unwrap();
        let outcome = solve(&f, &sig).unwrap();
        assert!(outcome.verdict.is_sat());
        // root, A & B (shared), A, B
        assert_eq!(outcome.stats.registered, 4);
    }

    #[test]
    fn vacuous_box_is_a_one_world_model() {
        let sig = sig2();
        match verdict("[a] false", &sig) {
            Verdict::Sat(m) => {
                assert_eq!(m.worlds().len(), 1);
                let a = sig.singleton("a").unwrap();
                assert!(m.accessibility(a).is_empty());
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    #[test]
    fn diamond_creates_a_witness_world() {
        let sig = sig2();
        match verdict("<a> A", &sig) {
            Verdict::Sat(m) => {
                let a = sig.singleton("a").unwrap();
                let succs = m.successors(0, a);
                assert!(succs.iter().any(|&w| m.is_true(w, "A")));
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    #[test]
    fn pair_diamond_grants_access_to_sub_instances() {
        let sig = sig2();
        match verdict("<a,b> A", &sig) {
            Verdict::Sat(m) => {
                let a = sig.singleton("a").unwrap();
                let b = sig.singleton("b").unwrap();
                let ab = sig.instance(["a", "b"]).unwrap();
                assert!(!m.accessibility(ab).is_empty());
                assert!(!m.accessibility(a).is_empty());
                assert!(!m.accessibility(b).is_empty());
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    #[test]
    fn distinct_diamonds_make_distinct_worlds() {
        let sig = sig2();
        let f = parse_formula("<a> A & <a> ~A", &sig).unwrap();
        let outcome = solve(&f, &sig).unwrap();
        assert!(outcome.verdict.is_sat());
        assert_eq!(outcome.stats.worlds, 3); // root plus two witnesses
    }

    /// The distribution principle is emergent: nothing in the clause set
    /// relates instances, yet a shared successor for {a,b} forces the boxes
    /// of both singletons. Expected verdicts pinned by the brute-force
    /// oracle first.
    #[test]
    fn distribution_is_emergent() {
        let sig = sig2();
        let limits = BruteForceLimits { max_worlds: 2, max_atoms: 2, max_vars: 1 };

        let separate = parse_formula("<a> true & <b> true & [a] A & [b] ~A", &sig).unwrap();
        let joint = parse_formula("<a,b> true & [a] A & [b] ~A", &sig).unwrap();
        assert!(brute_force_sat(&separate, &sig, &limits).unwrap().is_some());
        assert!(brute_force_sat(&joint, &sig, &limits).unwrap().is_none());

        assert!(solve(&separate, &sig).unwrap().verdict.is_sat());
        assert_eq!(solve(&joint, &sig).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn box_antecedent_must_cover_the_instance() {
        let sig = sig2();
        // Only the a-bit is forced at the witness, so the pair box [a,b]
        // cannot constrain it.
        assert!(verdict("<a> true & [a,b] false", &sig).is_sat());
        assert_eq!(verdict("<a> true & [a] false", &sig), Verdict::Unsat);
    }

    #[test]
    fn exists_pins_the_valuation_to_the_bounds() {
        let sig = sig2();
        match verdict("exists x <= {a} ( <x> true )", &sig) {
            Verdict::Sat(m) => {
                let a = sig.singleton("a").unwrap();
                assert_eq!(m.x_valuations().get("b0"), Some(&a));
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
        // Contradictory bounds close immediately.
        assert_eq!(
            verdict("exists {a,b} <= x <= {a} ( true )", &sig),
            Verdict::Unsat
        );
    }

    #[test]
    fn exists_respects_lower_bounds() {
        let sig = sig2();
        match verdict("exists {a,b} <= x ( <x> true )", &sig) {
            Verdict::Sat(m) => {
                let ab = sig.instance(["a", "b"]).unwrap();
                let witness = m.x_valuations().get("b0").copied().unwrap();
                assert!(ab.is_subinstance_of(witness));
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    #[test]
    fn forall_zero_instantiates_the_upper_bound() {
        let sig = sig2();
        match verdict("forall x <= {a,b} ( [x] A ) & <a,b> true", &sig) {
            Verdict::Sat(m) => {
                let f = parse_formula("[a,b] A", &sig).unwrap();
                assert!(m.holds(0, &f, None).unwrap());
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
    }

    /// A universal alongside a singleton diamond: the substitution instance
    /// for the trigger's instance must be produced, or the extracted model
    /// would fail the semantic check.
    #[test]
    fn forall_s_instantiates_triggers() {
        let sig = sig2();
        match verdict("forall x <= {a,b} ( [x] A ) & <a> B", &sig) {
            Verdict::Sat(m) => {
                let f = parse_formula("[a] A", &sig).unwrap();
                assert!(m.holds(0, &f, None).unwrap());
            }
            Verdict::Unsat => panic!("expected SAT"),
        }
        // And it can close a branch that the upper bound alone cannot.
        assert_eq!(
            verdict("forall x <= {a,b} ( [x] A ) & <a> ~A", &sig),
            Verdict::Unsat
        );
    }

    #[test]
    fn forall_x_constrains_existential_valuations() {
        let sig = sig2();
        assert_eq!(
            verdict("exists x ( <x> ~A ) & forall x ( [x] A )", &sig),
            Verdict::Unsat
        );
    }

    #[test]
    fn open_formulas_are_rejected() {
        let sig = sig2();
        let f = Formula::boxed(Modality::Var, Formula::prop("A"));
        assert!(matches!(solve(&f, &sig).unwrap_err(), TableauError::OpenFormula));
    }

    #[test]
    fn disabled_forall_s_is_caught_by_verification() {
        let sig = sig2();
        let f = parse_formula("forall x <= {a,b} ( [x] A ) & <a> ~A", &sig).unwrap();
        assert_eq!(solve(&f, &sig).unwrap().verdict, Verdict::Unsat);
        let opts = TableauOptions { disable_forall_s: true, ..TableauOptions::default() };
        assert!(matches!(
            solve_with(&f, &sig, &opts).unwrap_err(),
            TableauError::InternalVerificationFailure { .. }
        ));
    }

    #[test]
    fn disabled_forall_x_is_caught_by_verification() {
        let sig = sig2();
        let f = parse_formula("exists x ( <x> ~A ) & forall x ( [x] A )", &sig).unwrap();
        assert_eq!(solve(&f, &sig).unwrap().verdict, Verdict::Unsat);
        let opts = TableauOptions { disable_forall_x: true, ..TableauOptions::default() };
        assert!(matches!(
            solve_with(&f, &sig, &opts).unwrap_err(),
            TableauError::InternalVerificationFailure { .. }
        ));
    }

    #[test]
    fn disabled_distribution_is_caught_by_verification() {
        let sig = sig2();
        let f = parse_formula("<a,b> true & [a] A & [b] ~A", &sig).unwrap();
        assert_eq!(solve(&f, &sig).unwrap().verdict, Verdict::Unsat);
        let opts = TableauOptions { disable_distribution: true, ..TableauOptions::default() };
        assert!(matches!(
            solve_with(&f, &sig, &opts).unwrap_err(),
            TableauError::InternalVerificationFailure { .. }
        ));
    }

    #[test]
    fn scan_order_does_not_change_verdicts() {
        let sig = sig2();
        let cases = [
            "forall x ( <x> true ) & [a,b] false",
            "exists x ( <x> A & [x] ~A )",
            "<a> (A | B) & [a] ~A & [a] ~B",
            "forall x <= {a,b} ( [x] A ) & <a> ~A",
            "exists x <= {a} ( <x> true ) & forall x ( [x] B )",
        ];
        let reversed = TableauOptions { reverse_scan: true, ..TableauOptions::default() };
        for text in cases {
            let f = parse_formula(text, &sig).unwrap();
            let forward = solve(&f, &sig).unwrap().verdict.is_sat();
            let backward = solve_with(&f, &sig, &reversed).unwrap().verdict.is_sat();
            assert_eq!(forward, backward, "verdict changed under permuted scan for {text}");
        }
    }

    #[test]
    fn world_count_is_bounded_by_diamond_registrations() {
        let sig = sig2();
        let f = parse_formula("forall x ( <x> true ) & <a> A & <b> B", &sig).unwrap();
        let outcome = solve(&f, &sig).unwrap();
        assert!(outcome.verdict.is_sat());
        let diamonds = outcome
            .stats
            .registered
            .min(outcome.stats.worlds); // at least sanity: worlds <= registered
        assert!(outcome.stats.worlds <= diamonds + 1);
    }
}
