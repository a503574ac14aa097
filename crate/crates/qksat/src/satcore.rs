//! Incremental Boolean satisfiability engine.
//!
//! Conflict-driven clause learning with two-watched literals, first-UIP
//! learning, and activity-based branching with tie-breaking by variable id.
//! There is no randomness and restarts are off by default, so identical call
//! sequences produce identical verdicts and models. Clauses persist across
//! `solve` calls; assumptions hold for a single call only.
//!
//! A plain DPLL engine sits behind a configuration switch as an internal
//! cross-check for the test suite.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatError {
    #[error("variable {0} was never allocated")]
    UnknownVar(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("malformed DIMACS input: {0}")]
    Malformed(String),
}

/// A Boolean variable; ids are dense and allocated from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolVar(pub u32);

impl BoolVar {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A variable with a polarity, encoded as `var << 1 | negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: BoolVar, positive: bool) -> Lit {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn positive(var: BoolVar) -> Lit {
        Lit::new(var, true)
    }

    pub fn negative(var: BoolVar) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> BoolVar {
        BoolVar(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// A total assignment returned on SAT. Variables allocated after the solve
/// are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model(Vec<bool>);

impl Model {
    pub fn var(&self, v: BoolVar) -> bool {
        self.0[v.index()]
    }

    pub fn get(&self, v: BoolVar) -> Option<bool> {
        self.0.get(v.index()).copied()
    }

    pub fn lit(&self, l: Lit) -> bool {
        self.var(l.var()) == l.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Cdcl,
    Dpll,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverConfig {
    pub engine: Engine,
    pub enable_restarts: bool,
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
}

const ACTIVITY_DECAY: f64 = 0.95;
const ACTIVITY_RESCALE: f64 = 1e100;

/// The clause store and search state. One store per context; independent
/// stores do not share anything.
#[derive(Debug, Clone, Default)]
pub struct SolverStore {
    config: SolverConfig,
    clauses: Vec<Clause>,
    watches: Vec<Vec<u32>>, // literal code -> clause ids watching that literal
    units: Vec<Lit>,
    units_seen: usize,
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Option<u32>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    phase: Vec<bool>,
    seen: Vec<bool>,
    root_unsat: bool,
}

impl SolverStore {
    pub fn new() -> SolverStore {
        SolverStore::with_config(SolverConfig::default())
    }

    pub fn with_config(config: SolverConfig) -> SolverStore {
        SolverStore { config, var_inc: 1.0, ..SolverStore::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len() + self.units.len()
    }

    pub fn is_root_unsat(&self) -> bool {
        self.root_unsat
    }

    pub fn new_var(&mut self) -> BoolVar {
        let id = self.assign.len() as u32;
        self.assign.push(None);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        BoolVar(id)
    }

    fn value(&self, l: Lit) -> Option<bool> {
        self.assign[l.var().index()].map(|b| b == l.is_positive())
    }

    /// Records a clause. Tautologies are dropped, duplicate literals
    /// collapse, the empty clause marks the store unsatisfiable for good.
    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<(), SatError> {
        for l in lits {
            if l.var().index() >= self.num_vars() {
                return Err(SatError::UnknownVar(l.var().0));
            }
        }
        let mut lits: Vec<Lit> = lits.to_vec();
        lits.sort_unstable();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].var() == pair[1].var() {
                return Ok(()); // tautology: p and ~p
            }
        }
        match lits.len() {
            0 => {
                self.root_unsat = true;
            }
            1 => {
                self.units.push(lits[0]);
            }
            _ => {
                // Between solves only level-0 assignments remain. Put two
                // non-false literals in the watch positions; with fewer than
                // two the clause is already unit or conflicting at the root.
                let mut nonfalse = 0;
                for k in 0..lits.len() {
                    if self.value(lits[k]) != Some(false) {
                        lits.swap(nonfalse, k);
                        nonfalse += 1;
                        if nonfalse == 2 {
                            break;
                        }
                    }
                }
                match nonfalse {
                    0 => {
                        self.root_unsat = true;
                        return Ok(());
                    }
                    1 => self.units.push(lits[0]),
                    _ => {}
                }
                let cid = self.clauses.len() as u32;
                self.watches[lits[0].code()].push(cid);
                self.watches[lits[1].code()].push(cid);
                self.clauses.push(Clause { lits });
            }
        }
        Ok(())
    }

    /// Decides satisfiability of the stored clauses under temporary
    /// assumptions. Deterministic given an identical call history.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        match self.config.engine {
            Engine::Cdcl => self.solve_cdcl(assumptions),
            Engine::Dpll => self.solve_dpll(assumptions),
        }
    }

    // -- CDCL ---------------------------------------------------------------

    fn solve_cdcl(&mut self, assumptions: &[Lit]) -> SolveResult {
        if self.root_unsat {
            return SolveResult::Unsat;
        }
        self.backtrack_to(0);
        while self.units_seen < self.units.len() {
            let unit = self.units[self.units_seen];
            self.units_seen += 1;
            match self.value(unit) {
                Some(true) => {}
                Some(false) => {
                    self.root_unsat = true;
                    return SolveResult::Unsat;
                }
                None => self.enqueue(unit, None),
            }
        }

        let mut conflicts_since_restart = 0u64;
        let mut restart_threshold = 64u64;

        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    self.root_unsat = true;
                    return SolveResult::Unsat;
                }
                let (learnt, backjump) = self.analyze(confl);
                self.backtrack_to(backjump);
                self.learn(learnt);
                self.var_inc /= ACTIVITY_DECAY;
                if self.var_inc > ACTIVITY_RESCALE {
                    for a in &mut self.activity {
                        *a /= ACTIVITY_RESCALE;
                    }
                    self.var_inc /= ACTIVITY_RESCALE;
                }
                conflicts_since_restart += 1;
                if self.config.enable_restarts && conflicts_since_restart >= restart_threshold {
                    conflicts_since_restart = 0;
                    restart_threshold = restart_threshold.saturating_mul(2);
                    self.backtrack_to(0);
                }
            } else if (self.decision_level() as usize) < assumptions.len() {
                let p = assumptions[self.decision_level() as usize];
                if p.var().index() >= self.num_vars() {
                    // Assumptions over unallocated variables cannot hold.
                    self.backtrack_to(0);
                    return SolveResult::Unsat;
                }
                match self.value(p) {
                    Some(true) => self.trail_lim.push(self.trail.len()),
                    Some(false) => {
                        self.backtrack_to(0);
                        return SolveResult::Unsat;
                    }
                    None => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(p, None);
                    }
                }
            } else if let Some(var) = self.pick_branch_var() {
                self.trail_lim.push(self.trail.len());
                let lit = Lit::new(var, self.phase[var.index()]);
                self.enqueue(lit, None);
            } else {
                let model = Model(self.assign.iter().map(|v| v.unwrap_or(false)).collect());
                self.backtrack_to(0);
                return SolveResult::Sat(model);
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<u32>) {
        debug_assert!(self.value(lit).is_none());
        let v = lit.var().index();
        self.assign[v] = Some(lit.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.phase[v] = lit.is_positive();
        self.trail.push(lit);
    }

    fn backtrack_to(&mut self, level: u32) {
        while self.decision_level() > level {
            let mark = self.trail_lim.pop().expect("level > 0");
            while self.trail.len() > mark {
                let lit = self.trail.pop().expect("trail non-empty");
                let v = lit.var().index();
                self.assign[v] = None;
                self.reason[v] = None;
            }
        }
        self.qhead = self.qhead.min(self.trail.len());
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            while i < ws.len() {
                let cid = ws[i];
                let clause = &mut self.clauses[cid as usize];
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                debug_assert_eq!(clause.lits[1], false_lit);
                let first = clause.lits[0];
                if self.assign[first.var().index()].map(|b| b == first.is_positive())
                    == Some(true)
                {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.lits.len() {
                    let cand = clause.lits[k];
                    if self.assign[cand.var().index()].map(|b| b == cand.is_positive())
                        != Some(false)
                    {
                        clause.lits.swap(1, k);
                        let new_watch = clause.lits[1];
                        self.watches[new_watch.code()].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.value(first) == Some(false) {
                    self.watches[false_lit.code()] = ws;
                    return Some(cid);
                }
                self.enqueue(first, Some(cid));
                i += 1;
            }
            self.watches[false_lit.code()] = ws;
        }
        None
    }

    /// First-UIP conflict analysis. Returns the learnt clause with the
    /// asserting literal first and the level to jump back to.
    fn analyze(&mut self, confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = Vec::new();
        let mut counter = 0u32;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut clause_id = confl;

        loop {
            let skip = usize::from(p.is_some());
            let lits: Vec<Lit> = self.clauses[clause_id as usize].lits[skip..].to_vec();
            for q in lits {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(q.var());
                    if self.level[v] >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // Walk the trail backwards to the next marked literal.
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let pivot = self.trail[index];
            let v = pivot.var().index();
            self.seen[v] = false;
            counter -= 1;
            p = Some(pivot);
            if counter == 0 {
                break;
            }
            clause_id = self.reason[v].expect("non-decision literal has a reason");
        }

        for q in &learnt {
            self.seen[q.var().index()] = false;
        }
        let asserting = !p.expect("conflict has a UIP");
        let mut clause = Vec::with_capacity(learnt.len() + 1);
        clause.push(asserting);
        clause.extend(learnt);

        let backjump = if clause.len() == 1 {
            0
        } else {
            // Watch the highest remaining level right after the asserting lit.
            let mut max_i = 1;
            for i in 2..clause.len() {
                if self.level[clause[i].var().index()] > self.level[clause[max_i].var().index()] {
                    max_i = i;
                }
            }
            clause.swap(1, max_i);
            self.level[clause[1].var().index()]
        };
        (clause, backjump)
    }

    fn learn(&mut self, clause: Vec<Lit>) {
        let asserting = clause[0];
        if clause.len() == 1 {
            self.units.push(asserting);
            self.units_seen += 1;
            self.enqueue(asserting, None);
        } else {
            let cid = self.clauses.len() as u32;
            self.watches[clause[0].code()].push(cid);
            self.watches[clause[1].code()].push(cid);
            self.clauses.push(Clause { lits: clause });
            self.enqueue(asserting, Some(cid));
        }
    }

    fn bump(&mut self, var: BoolVar) {
        self.activity[var.index()] += self.var_inc;
    }

    fn pick_branch_var(&self) -> Option<BoolVar> {
        let mut best: Option<usize> = None;
        for v in 0..self.num_vars() {
            if self.assign[v].is_none() {
                match best {
                    Some(b) if self.activity[v] <= self.activity[b] => {}
                    _ => best = Some(v),
                }
            }
        }
        best.map(|v| BoolVar(v as u32))
    }

    // -- DPLL cross-check ---------------------------------------------------

    fn solve_dpll(&self, assumptions: &[Lit]) -> SolveResult {
        if self.root_unsat {
            return SolveResult::Unsat;
        }
        let mut assign: Vec<Option<bool>> = vec![None; self.num_vars()];
        for &l in self.units.iter().chain(assumptions) {
            if l.var().index() >= assign.len() {
                return SolveResult::Unsat;
            }
            let v = l.var().index();
            match assign[v] {
                Some(b) if b != l.is_positive() => return SolveResult::Unsat,
                _ => assign[v] = Some(l.is_positive()),
            }
        }
        if self.dpll_rec(&mut assign) {
            SolveResult::Sat(Model(assign.into_iter().map(|v| v.unwrap_or(false)).collect()))
        } else {
            SolveResult::Unsat
        }
    }

    fn dpll_rec(&self, assign: &mut Vec<Option<bool>>) -> bool {
        let mut set_here: Vec<usize> = Vec::new();
        // Unit propagation by full scans; plenty for a cross-check engine.
        loop {
            let mut forced: Option<Lit> = None;
            let mut conflict = false;
            'clauses: for clause in &self.clauses {
                let mut nonfalse = 0;
                let mut last = None;
                for &l in &clause.lits {
                    match assign[l.var().index()].map(|b| b == l.is_positive()) {
                        Some(true) => continue 'clauses,
                        None => {
                            nonfalse += 1;
                            last = Some(l);
                        }
                        Some(false) => {}
                    }
                }
                match nonfalse {
                    0 => {
                        conflict = true;
                        break;
                    }
                    1 => {
                        forced = last;
                        break;
                    }
                    _ => {}
                }
            }
            if conflict {
                for v in set_here {
                    assign[v] = None;
                }
                return false;
            }
            match forced {
                Some(l) => {
                    assign[l.var().index()] = Some(l.is_positive());
                    set_here.push(l.var().index());
                }
                None => break,
            }
        }
        let branch = (0..assign.len()).find(|&v| assign[v].is_none());
        match branch {
            None => true,
            Some(v) => {
                for value in [false, true] {
                    assign[v] = Some(value);
                    if self.dpll_rec(assign) {
                        return true;
                    }
                }
                assign[v] = None;
                for v in set_here {
                    assign[v] = None;
                }
                false
            }
        }
    }

    // -- DIMACS -------------------------------------------------------------

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars(), self.num_clauses());
        let fmt = |l: Lit| {
            let n = l.var().0 as i64 + 1;
            if l.is_positive() {
                n
            } else {
                -n
            }
        };
        for &u in &self.units {
            out.push_str(&format!("{} 0\n", fmt(u)));
        }
        for clause in &self.clauses {
            let body: Vec<String> = clause.lits.iter().map(|&l| fmt(l).to_string()).collect();
            out.push_str(&body.join(" "));
            out.push_str(" 0\n");
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<SolverStore, DimacsError> {
        let mut store = SolverStore::new();
        let mut declared_vars = None;
        let mut current: Vec<Lit> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf") {
                let mut parts = rest.split_whitespace();
                let vars: usize = parts
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| DimacsError::Malformed("bad header".into()))?;
                declared_vars = Some(vars);
                for _ in 0..vars {
                    store.new_var();
                }
                continue;
            }
            if declared_vars.is_none() {
                return Err(DimacsError::Malformed("clause before header".into()));
            }
            for tok in line.split_whitespace() {
                let n: i64 =
                    tok.parse().map_err(|_| DimacsError::Malformed(format!("bad token `{tok}`")))?;
                if n == 0 {
                    store
                        .add_clause(&current)
                        .map_err(|e| DimacsError::Malformed(e.to_string()))?;
                    current.clear();
                } else {
                    let var = BoolVar((n.unsigned_abs() - 1) as u32);
                    if var.index() >= store.num_vars() {
                        return Err(DimacsError::Malformed(format!(
                            "literal {n} out of declared range"
                        )));
                    }
                    current.push(Lit::new(var, n > 0));
                }
            }
        }
        if !current.is_empty() {
            return Err(DimacsError::Malformed("unterminated clause".into()));
        }
        Ok(store)
    }
}
