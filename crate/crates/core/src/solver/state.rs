//! Search state: variable domains with an undo trail, the partial board
//! the evaluator sees, and propagation.

use std::cell::RefCell;
use std::collections::{BTreeMap, VecDeque};
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use super::layout::{Binding, Check, FamModel, Label, Layout, VarKind};
use crate::board::{CompletedBoard, Given};
use crate::dsl::ir::{FamId, Node};
use crate::eval::{AObj, AVal, Evaluator, PColl, Region, RegionKey, Tv, World};
use crate::grid::Structure;
use crate::model::Model;
use crate::semantics::CompleteWorld;
use crate::value::Value;

/// Forward checking runs only on checks reading at most this many
/// candidate variables...
const FC_MAX: usize = 12;
/// ...with at most this many values between them.
const FC_WORK: usize = 256;

enum Undo {
    Dom(u32, FixedBitSet),
    Status(u32, Option<Rc<[u32]>>),
    Watch(u32),
}

type Cached = Rc<(PColl, Vec<u32>)>;

pub struct State<'a> {
    pub model: &'a Model,
    pub lay: &'a Layout,
    dom: Vec<FixedBitSet>,
    size: Vec<u32>,
    trail: Vec<Undo>,
    /// `Some(readset)` while a check is undecided, `None` once it holds.
    status: Vec<Option<Rc<[u32]>>>,
    watchers: Vec<Vec<u32>>,
    queue: VecDeque<u32>,
    queued: FixedBitSet,
    reads: RefCell<Vec<u32>>,
    cache: RefCell<Vec<Option<Cached>>>,
    pub nodes: u64,
}

impl<'a> State<'a> {
    pub fn new(model: &'a Model, lay: &'a Layout) -> Self {
        let nv = lay.vars.len();
        let mut dom = Vec::with_capacity(nv);
        let mut size = Vec::with_capacity(nv);
        for v in 0..nv as u32 {
            let len = lay.domain_len(v);
            let mut d = FixedBitSet::with_capacity(len);
            d.insert_range(..);
            dom.push(d);
            size.push(len as u32);
        }
        let nc = lay.checks.len();
        let all: Rc<[u32]> = Rc::from(Vec::new());
        State {
            model,
            lay,
            dom,
            size,
            trail: Vec::new(),
            status: vec![Some(all); nc],
            watchers: vec![Vec::new(); nv],
            queue: VecDeque::new(),
            queued: FixedBitSet::with_capacity(nc),
            reads: RefCell::new(Vec::new()),
            cache: RefCell::new(vec![None; model.prog.families.len()]),
            nodes: 0,
        }
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail entry") {
                Undo::Dom(v, d) => {
                    self.size[v as usize] = d.count_ones(..) as u32;
                    self.dom[v as usize] = d;
                    if self.lay.vars[v as usize].structural() {
                        self.invalidate();
                    }
                }
                Undo::Status(c, s) => self.status[c as usize] = s,
                Undo::Watch(v) => {
                    self.watchers[v as usize].pop();
                }
            }
        }
    }

    fn invalidate(&self) {
        self.cache.borrow_mut().iter_mut().for_each(|c| *c = None);
    }

    pub fn assigned(&self, v: u32) -> Option<usize> {
        (self.size[v as usize] == 1).then(|| self.dom[v as usize].ones().next().expect("nonempty"))
    }

    fn read(&self, v: u32) {
        if self.size[v as usize] > 1 {
            self.reads.borrow_mut().push(v);
        }
    }

    fn set_dom(&mut self, v: u32, new: FixedBitSet) {
        let vi = v as usize;
        if new == self.dom[vi] {
            return;
        }
        self.size[vi] = new.count_ones(..) as u32;
        let old = std::mem::replace(&mut self.dom[vi], new);
        self.trail.push(Undo::Dom(v, old));
        if self.lay.vars[vi].structural() {
            self.invalidate();
        }
        for &c in &self.watchers[vi] {
            if self.status[c as usize].is_some() && !self.queued.contains(c as usize) {
                self.queued.insert(c as usize);
                self.queue.push_back(c);
            }
        }
    }

    /// Restricts a variable to the given value indices; false if empty.
    pub fn restrict(&mut self, v: u32, keep: impl Fn(usize) -> bool) -> bool {
        let mut d = self.dom[v as usize].clone();
        for b in self.dom[v as usize].ones() {
            if !keep(b) {
                d.set(b, false);
            }
        }
        let ok = d.count_ones(..) > 0;
        self.set_dom(v, d);
        ok
    }

    pub fn assign(&mut self, v: u32, b: usize) -> bool {
        let mut d = FixedBitSet::with_capacity(self.dom[v as usize].len());
        d.insert(b);
        self.set_dom(v, d);
        self.propagate()
    }

    /// Queues every check and propagates to a fixpoint.
    pub fn start(&mut self) -> bool {
        for c in 0..self.lay.checks.len() as u32 {
            if self.status[c as usize].is_some() && !self.queued.contains(c as usize) {
                self.queued.insert(c as usize);
                self.queue.push_back(c);
            }
        }
        self.propagate()
    }

    fn label_of(&self, group: usize, pos: usize) -> Option<Label> {
        let v = self.lay.groups[group].vars[pos];
        self.assigned(v)
            .map(|b| self.lay.groups[group].label_at(pos, b))
    }

    fn may_label(&self, group: usize, pos: usize, l: Label) -> bool {
        let g = &self.lay.groups[group];
        g.index_of(pos, l)
            .is_some_and(|i| self.dom[g.vars[pos] as usize].contains(i))
    }

    fn group_of(&self, f: FamId) -> usize {
        match self.lay.fam_model[f] {
            FamModel::Label { group } => group,
            _ => unreachable!("not a labelled family"),
        }
    }

    /// Region of label `(f, anchor)`. A hypothetical region assumes the
    /// anchor takes its own label.
    fn anchor_region(&self, f: FamId, anchor: usize, hypothetical: bool) -> Rc<Region> {
        let group = self.group_of(f);
        let g = &self.lay.groups[group];
        let geo = &self.model.geo;
        let me = Label::Reg { fam: f, anchor };
        let mut def = geo.empty_set();
        for (pos, &c) in g.cells.iter().enumerate() {
            if self.label_of(group, pos) == Some(me) {
                def.insert(c);
            }
        }
        if hypothetical {
            def.insert(anchor);
        }
        let mut possible = def.clone();
        let mut stack: Vec<usize> = def.ones().collect();
        while let Some(x) = stack.pop() {
            for y in geo.neighbors(self.lay.rels[f], x).intersection(&g.cell_set) {
                if possible.contains(y) {
                    continue;
                }
                let pos = g.pos[y].expect("group cell");
                if self.size[g.vars[pos] as usize] > 1 && self.may_label(group, pos, me) {
                    self.read(g.vars[pos]);
                    possible.insert(y);
                    stack.push(y);
                }
            }
        }
        Rc::new(Region {
            fam: f,
            key: RegionKey::Anchor(anchor),
            def,
            possible,
        })
    }

    fn compute_board(&self, f: FamId) -> PColl {
        let geo = &self.model.geo;
        let mut out = PColl::default();
        match self.lay.fam_model[f] {
            FamModel::Base => unreachable!("base boards are fixed"),
            FamModel::Label { group } => {
                let g = &self.lay.groups[group];
                let mut fresh = geo.empty_set();
                for (pos, &c) in g.cells.iter().enumerate() {
                    let v = g.vars[pos];
                    self.read(v);
                    if self.label_of(group, pos) == Some(Label::Reg { fam: f, anchor: c }) {
                        out.items
                            .push(AObj::Region(self.anchor_region(f, c, false)));
                    } else if self.size[v as usize] > 1
                        && self.may_label(group, pos, Label::Reg { fam: f, anchor: c })
                    {
                        fresh.insert(c);
                    }
                }
                if fresh.count_ones(..) > 0 {
                    let mut possible = geo.empty_set();
                    for (pos, &c) in g.cells.iter().enumerate() {
                        if self.size[g.vars[pos] as usize] > 1 {
                            possible.insert(c);
                        }
                    }
                    let key = RegionKey::Phantom;
                    out.phantom = Some(Rc::new(Region {
                        fam: f,
                        key,
                        def: geo.empty_set(),
                        possible,
                    }));
                }
            }
            FamModel::Single => {
                let r = self.single_region(f);
                if r.def.count_ones(..) > 0 {
                    out.items.push(AObj::Region(Rc::new(r)));
                } else if r.possible.count_ones(..) > 0 {
                    out.maybe.push(AObj::Region(Rc::new(r)));
                }
            }
            FamModel::Subset => {
                for (k, &sv) in self.lay.sel_var[f].iter().enumerate() {
                    if !self.dom[sv as usize].contains(1) {
                        continue;
                    }
                    self.read(sv);
                    let set = self.lay.instances[f][k].clone();
                    let r = AObj::Region(Rc::new(Region {
                        fam: f,
                        key: RegionKey::Inst(k),
                        def: set.clone(),
                        possible: set,
                    }));
                    if self.size[sv as usize] == 1 {
                        out.items.push(r);
                    } else {
                        out.maybe.push(r);
                    }
                }
            }
        }
        out
    }

    fn single_region(&self, f: FamId) -> Region {
        let geo = &self.model.geo;
        let mut def = geo.empty_set();
        let mut open = geo.empty_set();
        for (e, slot) in self.lay.in_var[f].iter().enumerate() {
            let Some(v) = slot else { continue };
            self.read(*v);
            match self.assigned(*v) {
                Some(1) => def.insert(e),
                Some(_) => {}
                None => open.insert(e),
            }
        }
        let possible = if def.count_ones(..) == 0 {
            open
        } else {
            let mut within = open;
            within.union_with(&def);
            geo.reach(self.lay.rels[f], &def, &within)
        };
        Region {
            fam: f,
            key: RegionKey::Single,
            def,
            possible,
        }
    }

    fn var_value(&self, v: u32) -> AVal {
        let vals = &self.lay.values[v as usize];
        match self.assigned(v) {
            Some(b) => AVal::Known(vals[b]),
            None => {
                self.read(v);
                AVal::of_values(self.dom[v as usize].ones().map(|b| &vals[b]))
            }
        }
    }

    /// Evaluates check `c` on the current partial board. Unassigned
    /// variables it depended on are left in `self.reads`.
    fn eval_check(&self, c: usize) -> Tv {
        self.reads.borrow_mut().clear();
        let r = match &self.lay.checks[c] {
            Check::Rule { node, binding } => self.eval_rule(node, binding),
            Check::LabelConn(g) => Ok(self.label_conn(*g)),
            Check::SingleConn(f) => Ok(self.single_conn(*f)),
        };
        match r {
            Ok(t) => t,
            Err(_) if self.reads.borrow().is_empty() => Tv::F,
            Err(_) => Tv::U,
        }
    }

    fn eval_rule(&self, node: &Node, binding: &Binding) -> Result<Tv, crate::EvalError> {
        let mut ev = Evaluator::new(self, Vec::new());
        let Binding::None = binding else {
            let Node::Quant { filter, body, .. } = node else {
                unreachable!("grounded checks are quantifiers")
            };
            let filter = filter.as_deref();
            return match *binding {
                Binding::None => unreachable!(),
                Binding::Elem(e) => ev.forall_item(filter, body, AObj::Elem(e)),
                Binding::Anchor { fam, anchor } => {
                    let group = self.group_of(fam);
                    let g = &self.lay.groups[group];
                    let pos = g.pos[anchor].expect("anchor cell");
                    let lv = g.vars[pos];
                    if !self.may_label(group, pos, Label::Reg { fam, anchor }) {
                        return Ok(Tv::T);
                    }
                    if self.size[lv as usize] == 1 {
                        return ev.forall_item(
                            filter,
                            body,
                            AObj::Region(self.anchor_region(fam, anchor, false)),
                        );
                    }
                    self.read(lv);
                    let t = ev.forall_item(
                        filter,
                        body,
                        AObj::Region(self.anchor_region(fam, anchor, true)),
                    )?;
                    Ok(if t == Tv::T { Tv::T } else { Tv::U })
                }
                Binding::Inst { fam, inst } => {
                    let sv = self.lay.sel_var[fam][inst];
                    if !self.dom[sv as usize].contains(1) {
                        return Ok(Tv::T);
                    }
                    let set = self.lay.instances[fam][inst].clone();
                    let r = Region {
                        fam,
                        key: RegionKey::Inst(inst),
                        def: set.clone(),
                        possible: set,
                    };
                    let t = ev.forall_item(filter, body, AObj::Region(Rc::new(r)))?;
                    if self.size[sv as usize] == 1 {
                        Ok(t)
                    } else {
                        self.read(sv);
                        Ok(if t == Tv::T { Tv::T } else { Tv::U })
                    }
                }
            };
        };
        ev.truth(node)
    }

    fn label_conn(&self, group: usize) -> Tv {
        let g = &self.lay.groups[group];
        let geo = &self.model.geo;
        let mut complete = true;
        for (pos, &c) in g.cells.iter().enumerate() {
            let v = g.vars[pos];
            self.read(v);
            match self.label_of(group, pos) {
                None => complete = false,
                Some(Label::None) => {}
                Some(Label::Reg { fam, anchor }) => {
                    let ap = g.pos[anchor].expect("anchor cell");
                    if !self.may_label(group, ap, Label::Reg { fam, anchor }) {
                        return Tv::F;
                    }
                    if anchor == c {
                        let r = self.anchor_region(fam, anchor, false);
                        let mut start = geo.empty_set();
                        start.insert(anchor);
                        if !r
                            .def
                            .is_subset(&geo.reach(self.lay.rels[fam], &start, &r.possible))
                        {
                            return Tv::F;
                        }
                    }
                }
            }
        }
        if complete {
            Tv::T
        } else {
            Tv::U
        }
    }

    fn single_conn(&self, f: FamId) -> Tv {
        let geo = &self.model.geo;
        let r = self.single_region(f);
        let complete = self.lay.in_var[f]
            .iter()
            .flatten()
            .all(|&v| self.size[v as usize] == 1);
        let Some(first) = r.def.ones().next() else {
            return if complete || r.possible.count_ones(..) == 0 {
                Tv::F
            } else {
                Tv::U
            };
        };
        let mut start = geo.empty_set();
        start.insert(first);
        if !r
            .def
            .is_subset(&geo.reach(self.lay.rels[f], &start, &r.possible))
        {
            return Tv::F;
        }
        if complete {
            Tv::T
        } else {
            Tv::U
        }
    }

    /// Runs queued checks until nothing changes. False on a contradiction.
    pub fn propagate(&mut self) -> bool {
        while let Some(c) = self.queue.pop_front() {
            let ci = c as usize;
            self.queued.set(ci, false);
            if self.status[ci].is_none() {
                continue;
            }
            match self.eval_check(ci) {
                Tv::F => return self.fail(),
                Tv::T => {
                    let old = self.status[ci].take();
                    self.trail.push(Undo::Status(c, old));
                }
                Tv::U => {
                    let mut rs = std::mem::take(&mut *self.reads.borrow_mut());
                    rs.sort_unstable();
                    rs.dedup();
                    let old = self.status[ci].clone().expect("open");
                    for &v in &rs {
                        if old.binary_search(&v).is_err() {
                            self.watchers[v as usize].push(c);
                            self.trail.push(Undo::Watch(v));
                        }
                    }
                    if *old != *rs {
                        let new: Rc<[u32]> = Rc::from(rs.clone());
                        self.trail.push(Undo::Status(c, Some(old)));
                        self.status[ci] = Some(new);
                    }
                    if !self.forward_check(ci, &rs) {
                        return self.fail();
                    }
                }
            }
        }
        true
    }

    fn fail(&mut self) -> bool {
        for c in self.queue.drain(..) {
            self.queued.set(c as usize, false);
        }
        false
    }

    /// Removes values of the check's variables that make it false outright.
    fn forward_check(&mut self, c: usize, rs: &[u32]) -> bool {
        let mut cand: Vec<u32> = rs
            .iter()
            .copied()
            .filter(|&v| !self.lay.vars[v as usize].structural())
            .collect();
        if let Check::Rule {
            binding: Binding::Elem(e),
            ..
        } = &self.lay.checks[c]
        {
            for slots in &self.lay.in_var {
                if let Some(Some(v)) = slots.get(*e) {
                    if self.size[*v as usize] > 1 {
                        cand.push(*v);
                    }
                }
            }
        }
        if cand.len() > FC_MAX
            || cand
                .iter()
                .map(|&v| self.size[v as usize] as usize)
                .sum::<usize>()
                > FC_WORK
        {
            return true;
        }
        for v in cand {
            let vi = v as usize;
            if self.size[vi] <= 1 {
                continue;
            }
            let structural = self.lay.vars[vi].structural();
            let orig = self.dom[vi].clone();
            let orig_size = self.size[vi];
            let mut keep = orig.clone();
            for b in orig.ones() {
                let mut one = FixedBitSet::with_capacity(orig.len());
                one.insert(b);
                self.dom[vi] = one;
                self.size[vi] = 1;
                if structural {
                    self.invalidate();
                }
                if self.eval_check(c) == Tv::F {
                    keep.set(b, false);
                }
            }
            self.dom[vi] = orig;
            self.size[vi] = orig_size;
            if structural {
                self.invalidate();
            }
            if keep.count_ones(..) == 0 {
                return false;
            }
            self.set_dom(v, keep);
        }
        true
    }

    /// Whether an unassigned variable still matters: region values of
    /// regions that cannot exist are left alone.
    fn live(&self, v: u32) -> bool {
        match self.lay.vars[v as usize] {
            VarKind::RVal { fam, key } => match self.lay.fam_model[fam] {
                FamModel::Label { group } => {
                    let pos = self.lay.groups[group].pos[key].expect("anchor cell");
                    self.label_of(group, pos) == Some(Label::Reg { fam, anchor: key })
                }
                FamModel::Subset => self.assigned(self.lay.sel_var[fam][key]) == Some(1),
                _ => true,
            },
            _ => true,
        }
    }

    /// Next branching variable: labels in canonical order, then the
    /// smallest remaining domain, lowest index first.
    pub fn pick(&self) -> Option<u32> {
        for g in &self.lay.groups {
            if let Some(&v) = g.vars.iter().find(|&&v| self.size[v as usize] > 1) {
                return Some(v);
            }
        }
        let mut best: Option<(u32, u32)> = None;
        for v in 0..self.lay.vars.len() as u32 {
            let s = self.size[v as usize];
            if s > 1 && best.is_none_or(|(bs, _)| s < bs) && self.live(v) {
                best = Some((s, v));
                if s == 2 {
                    break;
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// Values worth trying for `v`, ascending. Labels skip regions the
    /// cell cannot join.
    pub fn branch_values(&self, v: u32) -> Vec<usize> {
        let VarKind::Label { group, pos } = self.lay.vars[v as usize] else {
            return self.dom[v as usize].ones().collect();
        };
        let g = &self.lay.groups[group];
        let cell = g.cells[pos];
        self.dom[v as usize]
            .ones()
            .filter(|&b| match g.label_at(pos, b) {
                Label::None => true,
                Label::Reg { anchor, .. } if anchor == cell => true,
                Label::Reg { fam, anchor } => {
                    let ap = g.pos[anchor].expect("anchor cell");
                    self.label_of(group, ap) == Some(Label::Reg { fam, anchor })
                        && self
                            .anchor_region(fam, anchor, false)
                            .possible
                            .contains(cell)
                }
            })
            .collect()
    }

    /// Applies a partial assignment as domain restrictions. False when
    /// nothing can match it.
    pub fn apply_given(&mut self, given: &Given) -> bool {
        let u = &self.model.geo.universe;
        let lay = self.lay;
        for (e, val) in &given.elements {
            if *val == Value::Undecided {
                continue;
            }
            let Some(k) = u.index_of(*e) else {
                return false;
            };
            let v = lay.elem_var[k];
            if !self.restrict(v, |b| lay.values[v as usize][b] == *val) {
                return false;
            }
        }
        for (name, els, val) in &given.instances {
            if matches!(val, Value::Null | Value::Undecided) {
                continue;
            }
            let Some(f) = self.model.prog.family(name) else {
                return false;
            };
            let mut set = self.model.geo.empty_set();
            for e in els {
                let Some(k) = u.index_of(*e) else {
                    return false;
                };
                set.insert(k);
            }
            let Some(first) = set.ones().next() else {
                return false;
            };
            let rv = match lay.fam_model[f] {
                FamModel::Base => return false,
                FamModel::Label { group } => {
                    let g = &lay.groups[group];
                    let me = Label::Reg {
                        fam: f,
                        anchor: first,
                    };
                    for (pos, &c) in g.cells.iter().enumerate() {
                        let idx = g.index_of(pos, me);
                        let ok = if set.contains(c) {
                            self.restrict(g.vars[pos], |b| Some(b) == idx)
                        } else {
                            self.restrict(g.vars[pos], |b| Some(b) != idx)
                        };
                        if !ok {
                            return false;
                        }
                    }
                    if !set.is_subset(&g.cell_set) {
                        return false;
                    }
                    lay.rval_var[f][first]
                }
                FamModel::Single => {
                    for (e, slot) in lay.in_var[f].iter().enumerate() {
                        if let Some(v) = slot {
                            let want = usize::from(set.contains(e));
                            if !self.restrict(*v, |b| b == want) {
                                return false;
                            }
                        }
                    }
                    lay.rval_var[f][0]
                }
                FamModel::Subset => {
                    let Some(k) = lay.instances[f].iter().position(|s| *s == set) else {
                        return false;
                    };
                    if !self.restrict(lay.sel_var[f][k], |b| b == 1) {
                        return false;
                    }
                    lay.rval_var[f][k]
                }
            };
            let Some(rv) = rv else { return false };
            if !self.restrict(rv, |b| lay.values[rv as usize][b] == *val) {
                return false;
            }
        }
        true
    }

    /// The completed board at a leaf, if the exact evaluator accepts it.
    pub fn extract(&self) -> Option<CompletedBoard> {
        let model = self.model;
        let lay = self.lay;
        let u = &model.geo.universe;
        let value = |v: u32| lay.values[v as usize][self.assigned(v).expect("assigned at a leaf")];
        let values: Vec<Value> = lay.elem_var.iter().map(|&v| value(v)).collect();
        let mut instances: Vec<Vec<(FixedBitSet, Value)>> =
            vec![Vec::new(); model.prog.families.len()];
        for f in model.prog.combined() {
            match lay.fam_model[f] {
                FamModel::Base => {}
                FamModel::Label { group } => {
                    let g = &lay.groups[group];
                    for (pos, &c) in g.cells.iter().enumerate() {
                        if self.label_of(group, pos) == Some(Label::Reg { fam: f, anchor: c }) {
                            let r = self.anchor_region(f, c, false);
                            instances[f].push((r.def.clone(), value(lay.rval_var[f][c]?)));
                        }
                    }
                }
                FamModel::Single => {
                    let r = self.single_region(f);
                    if r.def.count_ones(..) > 0 {
                        instances[f].push((r.def, value(lay.rval_var[f][0]?)));
                    }
                }
                FamModel::Subset => {
                    for (k, &sv) in lay.sel_var[f].iter().enumerate() {
                        if self.assigned(sv) == Some(1) {
                            instances[f]
                                .push((lay.instances[f][k].clone(), value(lay.rval_var[f][k]?)));
                        }
                    }
                }
            }
        }
        let structure = |s: &FixedBitSet| Structure::leaves(s.ones().map(|k| u.element(k)));
        for list in instances.iter_mut() {
            list.sort_by_cached_key(|(s, _)| structure(s));
        }
        let mut families = BTreeMap::new();
        let mut instance_values = BTreeMap::new();
        for f in model.prog.combined() {
            let name = model.family_name(f).to_string();
            families.insert(
                name.clone(),
                instances[f].iter().map(|(s, _)| structure(s)).collect(),
            );
            instance_values.insert(name, instances[f].iter().map(|(_, v)| *v).collect());
        }
        let world = CompleteWorld::from_parts(model, values.clone(), instances);
        if !world.satisfied() {
            return None;
        }
        let elements = u.elements().iter().copied().zip(values).collect();
        Some(CompletedBoard {
            rule: model.prog.name.clone(),
            dims: model.dims(),
            families,
            elements,
            instance_values,
        })
    }
}

impl World for State<'_> {
    fn model(&self) -> &Model {
        self.model
    }

    fn exact(&self) -> bool {
        false
    }

    fn elem_value(&self, e: usize) -> AVal {
        self.var_value(self.lay.elem_var[e])
    }

    fn region_value(&self, r: &Region) -> AVal {
        let slot = match r.key {
            RegionKey::Anchor(a) => self.lay.rval_var[r.fam].get(a).copied().flatten(),
            RegionKey::Single => self.lay.rval_var[r.fam].first().copied().flatten(),
            RegionKey::Inst(k) => self.lay.rval_var[r.fam].get(k).copied().flatten(),
            RegionKey::Phantom => None,
        };
        match slot {
            Some(v) => self.var_value(v),
            None => AVal::of_values(&self.model.fam_domain[r.fam]),
        }
    }

    fn board(&self, f: FamId) -> PColl {
        if let Some(c) = &self.cache.borrow()[f] {
            self.reads.borrow_mut().extend(&c.1);
            return c.0.clone();
        }
        let start = self.reads.borrow().len();
        let coll = self.compute_board(f);
        let rs = self.reads.borrow()[start..].to_vec();
        self.cache.borrow_mut()[f] = Some(Rc::new((coll.clone(), rs)));
        coll
    }

    fn guaranteed(&self, n: &Node) -> bool {
        self.lay.guaranteed(n)
    }
}
