//! How a model becomes search variables: which families are searched as
//! labellings, which as a single growing region, which as explicit
//! instance selections, and how constraints are split into checks.

use fixedbitset::FixedBitSet;

use crate::dsl::ast::{BinOp, Quantifier};
use crate::dsl::ir::{FamId, FamilySource, Node};
use crate::grid::RelSet;
use crate::model::Model;
use crate::structure::instances_of;
use crate::value::Value;
use crate::Error;

/// Most instances a family searched by explicit selection may have.
pub const SUBSET_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    None,
    Reg { fam: FamId, anchor: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Label { group: usize, pos: usize },
    In { fam: FamId, elem: usize },
    Sel { fam: FamId, inst: usize },
    Elem(usize),
    RVal { fam: FamId, key: usize },
}

impl VarKind {
    /// Variables whose value changes the shape of some region.
    pub fn structural(self) -> bool {
        matches!(
            self,
            VarKind::Label { .. } | VarKind::In { .. } | VarKind::Sel { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamModel {
    Base,
    /// Member of a label group.
    Label {
        group: usize,
    },
    /// Exactly one instance, grown through per-element membership bits.
    Single,
    /// Explicit selection bit per candidate instance.
    Subset,
}

/// Families labelled together over one base: every element of `cells`
/// gets a label naming the region (family and least element) it lies in.
#[derive(Clone, Debug)]
pub struct Group {
    pub fams: Vec<FamId>,
    pub cells: Vec<usize>,
    /// Universe index to position in `cells`.
    pub pos: Vec<Option<usize>>,
    pub cell_set: FixedBitSet,
    /// Cells may stay unlabelled.
    pub packing: bool,
    pub vars: Vec<u32>,
}

impl Group {
    /// Candidate labels of the cell at `pos`: `None` first when packing,
    /// then each family with each anchor up to and including the cell.
    pub fn candidates(&self, pos: usize) -> usize {
        usize::from(self.packing) + self.fams.len() * (pos + 1)
    }

    pub fn label_at(&self, pos: usize, idx: usize) -> Label {
        let idx = if self.packing {
            if idx == 0 {
                return Label::None;
            }
            idx - 1
        } else {
            idx
        };
        let per = pos + 1;
        Label::Reg {
            fam: self.fams[idx / per],
            anchor: self.cells[idx % per],
        }
    }

    pub fn index_of(&self, pos: usize, label: Label) -> Option<usize> {
        let off = usize::from(self.packing);
        match label {
            Label::None => self.packing.then_some(0),
            Label::Reg { fam, anchor } => {
                let fi = self.fams.iter().position(|&f| f == fam)?;
                let ap = self.pos[anchor]?;
                (ap <= pos).then(|| off + fi * (pos + 1) + ap)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Binding {
    None,
    Elem(usize),
    Anchor { fam: FamId, anchor: usize },
    Inst { fam: FamId, inst: usize },
}

#[derive(Clone, Debug)]
pub enum Check {
    /// A constraint conjunct; grounded ones hold the quantifier parts.
    Rule {
        node: Node,
        binding: Binding,
    },
    LabelConn(usize),
    SingleConn(FamId),
}

pub struct Layout {
    pub vars: Vec<VarKind>,
    /// Candidate values of element and region-value variables.
    pub values: Vec<Vec<Value>>,
    pub fam_model: Vec<FamModel>,
    pub rels: Vec<RelSet>,
    pub groups: Vec<Group>,
    pub elem_var: Vec<u32>,
    /// Per Single family, membership variable per universe index.
    pub in_var: Vec<Vec<Option<u32>>>,
    pub sel_var: Vec<Vec<u32>>,
    pub instances: Vec<Vec<FixedBitSet>>,
    /// Region-value variable per family, keyed by anchor (labels),
    /// instance index (selections) or 0 (single).
    pub rval_var: Vec<Vec<Option<u32>>>,
    pub checks: Vec<Check>,
}

/// Splits nested `and` into conjuncts.
fn conjuncts<'a>(n: &'a Node, out: &mut Vec<&'a Node>) {
    match n {
        Node::Bin(BinOp::And, a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(n),
    }
}

fn single_count(n: &Node) -> Option<FamId> {
    let Node::Bin(BinOp::Eq, a, b) = n else {
        return None;
    };
    let one = Node::Lit(Value::Int(1));
    let fam = |x: &Node| match x {
        Node::Count(c) => match c.as_ref() {
            Node::Board(f) => Some(*f),
            _ => None,
        },
        _ => None,
    };
    if **b == one {
        fam(a)
    } else if **a == one {
        fam(b)
    } else {
        None
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

impl Layout {
    pub fn new(model: &Model) -> Result<Layout, Error> {
        let prog = &model.prog;
        let geo = &model.geo;
        let nf = prog.families.len();
        let mut parts = Vec::new();
        for c in &prog.constraints {
            conjuncts(c, &mut parts);
        }

        let mut parent: Vec<usize> = (0..nf).collect();
        let mut filled = vec![false; nf];
        let mut packed = vec![false; nf];
        let mut single = vec![false; nf];
        for p in &parts {
            match p {
                Node::Fill(fs) => {
                    for &f in fs {
                        filled[f] = true;
                        let (a, b) = (find(&mut parent, fs[0]), find(&mut parent, f));
                        parent[b] = a;
                    }
                }
                Node::NoOverlap(f) => packed[*f] = true,
                _ => {
                    if let Some(f) = single_count(p) {
                        single[f] = true;
                    }
                }
            }
        }

        let mut fam_model = vec![FamModel::Base; nf];
        let mut rels = vec![RelSet::default(); nf];
        let mut groups: Vec<Group> = Vec::new();
        let mut root_group: Vec<Option<usize>> = vec![None; nf];
        for f in prog.combined() {
            let (r, base) = model.combine_of(f).expect("combined");
            rels[f] = r;
            let make = |fams: Vec<FamId>, packing: bool| {
                let cells = geo.base_elements(base).to_vec();
                let mut pos = vec![None; geo.len()];
                for (k, &c) in cells.iter().enumerate() {
                    pos[c] = Some(k);
                }
                Group {
                    fams,
                    cells,
                    pos,
                    cell_set: geo.base_set(base).clone(),
                    packing,
                    vars: Vec::new(),
                }
            };
            if filled[f] {
                let root = find(&mut parent, f);
                let g = match root_group[root] {
                    Some(g) => g,
                    None => {
                        groups.push(make(Vec::new(), false));
                        root_group[root] = Some(groups.len() - 1);
                        groups.len() - 1
                    }
                };
                groups[g].fams.push(f);
                fam_model[f] = FamModel::Label { group: g };
            } else if packed[f] {
                groups.push(make(vec![f], true));
                fam_model[f] = FamModel::Label {
                    group: groups.len() - 1,
                };
            } else if single[f] {
                fam_model[f] = FamModel::Single;
            } else {
                fam_model[f] = FamModel::Subset;
            }
        }

        let mut vars = Vec::new();
        let mut values = Vec::new();
        let mut push = |vars: &mut Vec<VarKind>, k: VarKind, vals: Vec<Value>| {
            vars.push(k);
            values.push(vals);
            (vars.len() - 1) as u32
        };
        for (g, group) in groups.iter_mut().enumerate() {
            group.vars = (0..group.cells.len())
                .map(|pos| push(&mut vars, VarKind::Label { group: g, pos }, Vec::new()))
                .collect();
        }
        let mut in_var = vec![Vec::new(); nf];
        for f in 0..nf {
            if fam_model[f] == FamModel::Single {
                let base = prog.base_of(f);
                let mut slots = vec![None; geo.len()];
                for &e in geo.base_elements(base) {
                    slots[e] = Some(push(&mut vars, VarKind::In { fam: f, elem: e }, Vec::new()));
                }
                in_var[f] = slots;
            }
        }
        let mut sel_var = vec![Vec::new(); nf];
        let mut instances = vec![Vec::new(); nf];
        for f in 0..nf {
            if fam_model[f] != FamModel::Subset {
                continue;
            }
            let mut list = Vec::new();
            for s in instances_of(&prog.spec(f), model.dims(), SUBSET_LIMIT)? {
                let mut set = geo.empty_set();
                for e in crate::grid::flatten(&s?) {
                    set.insert(geo.universe.index_of(e).expect("instance inside grid"));
                }
                list.push(set);
            }
            sel_var[f] = (0..list.len())
                .map(|inst| push(&mut vars, VarKind::Sel { fam: f, inst }, Vec::new()))
                .collect();
            instances[f] = list;
        }
        let elem_var: Vec<u32> = (0..geo.len())
            .map(|e| push(&mut vars, VarKind::Elem(e), model.elem_domain[e].clone()))
            .collect();
        let mut rval_var = vec![Vec::new(); nf];
        for f in 0..nf {
            let keys: Vec<usize> = match fam_model[f] {
                FamModel::Base => continue,
                FamModel::Label { group } => groups[group].cells.clone(),
                FamModel::Single => vec![0],
                FamModel::Subset => (0..instances[f].len()).collect(),
            };
            let size = match fam_model[f] {
                FamModel::Label { .. } => geo.len(),
                _ => keys.len(),
            };
            let mut slots = vec![None; size];
            for key in keys {
                slots[key] = Some(push(
                    &mut vars,
                    VarKind::RVal { fam: f, key },
                    model.fam_domain[f].clone(),
                ));
            }
            rval_var[f] = slots;
        }

        let mut checks = Vec::new();
        for g in 0..groups.len() {
            checks.push(Check::LabelConn(g));
        }
        for (f, fm) in fam_model.iter().enumerate() {
            if *fm == FamModel::Single {
                checks.push(Check::SingleConn(f));
            }
        }
        for p in parts {
            if let Node::Quant {
                q: Quantifier::Forall,
                coll,
                ..
            } = p
            {
                if let Node::Board(f) = coll.as_ref() {
                    let f = *f;
                    let node = p.clone();
                    match (fam_model[f], &prog.families[f].source) {
                        (FamModel::Base, FamilySource::Base(b)) => {
                            for &e in geo.base_elements(*b) {
                                checks.push(Check::Rule {
                                    node: node.clone(),
                                    binding: Binding::Elem(e),
                                });
                            }
                            continue;
                        }
                        (FamModel::Label { group }, _) => {
                            for &anchor in &groups[group].cells {
                                checks.push(Check::Rule {
                                    node: node.clone(),
                                    binding: Binding::Anchor { fam: f, anchor },
                                });
                            }
                            continue;
                        }
                        (FamModel::Subset, _) => {
                            for inst in 0..instances[f].len() {
                                checks.push(Check::Rule {
                                    node: node.clone(),
                                    binding: Binding::Inst { fam: f, inst },
                                });
                            }
                            continue;
                        }
                        _ => {}
                    }
                }
            }
            checks.push(Check::Rule {
                node: p.clone(),
                binding: Binding::None,
            });
        }

        Ok(Layout {
            vars,
            values,
            fam_model,
            rels,
            groups,
            elem_var,
            in_var,
            sel_var,
            instances,
            rval_var,
            checks,
        })
    }

    /// Initial domain size of a variable.
    pub fn domain_len(&self, v: u32) -> usize {
        match self.vars[v as usize] {
            VarKind::Label { group, pos } => self.groups[group].candidates(pos),
            VarKind::In { .. } | VarKind::Sel { .. } => 2,
            VarKind::Elem(_) | VarKind::RVal { .. } => self.values[v as usize].len(),
        }
    }

    /// Whether a `fill` or `no_overlap` node holds by construction.
    pub fn guaranteed(&self, n: &Node) -> bool {
        match n {
            Node::NoOverlap(f) => matches!(self.fam_model[*f], FamModel::Label { .. }),
            Node::Fill(fs) => {
                let FamModel::Label { group } = self.fam_model[fs[0]] else {
                    return false;
                };
                let g = &self.groups[group];
                !g.packing
                    && g.fams.iter().all(|f| fs.contains(f))
                    && fs.iter().all(|f| g.fams.contains(f))
            }
            _ => false,
        }
    }
}
