use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::InstanceError;
use crate::vdc::{CellId, Frame, ObjId, Path, PasteResolver, ProarrowId, VArrowId, Vdc, VdcBuilder};

/// A generating cell of a free virtual double category. Vertical boundaries
/// are identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// Domain proarrows; when empty, `anchor` names the object.
    pub domain: Vec<String>,
    pub anchor: Option<String>,
    pub codomain: String,
}

/// Objects, proarrows and generating cells. The vertical category is
/// discrete.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub objects: Vec<String>,
    pub proarrows: Vec<(String, String, String)>,
    pub generators: Vec<Generator>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Tree {
    Wire(ProarrowId),
    Node(usize, Vec<Tree>),
}

impl Tree {
    fn depth(&self) -> usize {
        match self {
            Tree::Wire(_) => 0,
            Tree::Node(_, kids) => 1 + kids.iter().map(Tree::depth).max().unwrap_or(0),
        }
    }

    fn leaves(&self, out: &mut Vec<ProarrowId>) {
        match self {
            Tree::Wire(j) => out.push(*j),
            Tree::Node(_, kids) => kids.iter().for_each(|k| k.leaves(out)),
        }
    }

    fn graft(&self, inners: &mut core::slice::Iter<'_, Tree>) -> Tree {
        match self {
            Tree::Wire(_) => inners.next().expect("one inner per leaf").clone(),
            Tree::Node(g, kids) => Tree::Node(*g, kids.iter().map(|k| k.graft(inners)).collect()),
        }
    }

    fn show(&self, vdc_names: &[String], gen_names: &[String]) -> String {
        match self {
            Tree::Wire(j) => format!("id_{}", vdc_names[j.index()]),
            Tree::Node(g, kids) if kids.is_empty() => gen_names[*g].clone(),
            Tree::Node(g, kids) => {
                let parts: Vec<String> = kids.iter().map(|k| k.show(vdc_names, gen_names)).collect();
                format!("{}({})", gen_names[*g], parts.join(", "))
            }
        }
    }
}

struct GraftResolver {
    trees: Vec<Tree>,
    index: BTreeMap<Tree, CellId>,
}

impl PasteResolver for GraftResolver {
    fn paste(&self, outer: CellId, inners: &[CellId]) -> Option<CellId> {
        let kids: Vec<Tree> = inners.iter().map(|c| self.trees[c.index()].clone()).collect();
        let grafted = self.trees[outer.index()].graft(&mut kids.iter());
        self.index.get(&grafted).copied()
    }

    fn whisker(&self, _cell: CellId, _arrow: VArrowId) -> Option<CellId> {
        None
    }
}

/// The free virtual double category on a presentation: cells are trees of
/// generators, substitution is grafting.
///
/// Fails with `ClosureBudgetExceeded` when trees deeper than `max_depth`
/// exist (the closure would be larger than requested, possibly infinite).
pub fn free_vdc(p: &Presentation, max_depth: usize, max_cells: usize) -> Result<Vdc, InstanceError> {
    let mut b = VdcBuilder::new(p.name.clone());
    for o in &p.objects {
        b.add_object(o)?;
    }
    let mut pro_names = Vec::new();
    for (name, src, tgt) in &p.proarrows {
        let (s, t) = (b.object(src)?, b.object(tgt)?);
        b.add_proarrow(name, s, t)?;
        pro_names.push(name.clone());
    }
    struct Gen {
        domain: Vec<ProarrowId>,
        anchor: ObjId,
        codomain: ProarrowId,
    }
    let mut gens = Vec::new();
    for g in &p.generators {
        let domain = g
            .domain
            .iter()
            .map(|n| b.proarrow(n))
            .collect::<Result<Vec<_>, _>>()?;
        let codomain = b.proarrow(&g.codomain)?;
        let anchor = match (domain.first(), &g.anchor) {
            (Some(j), _) => b.proarrow_ends(*j).0,
            (None, Some(a)) => b.object(a)?,
            (None, None) => {
                return Err(InstanceError::BadPresentation(format!(
                    "nullary generator {} needs an anchor",
                    g.name
                )))
            }
        };
        for w in domain.windows(2) {
            if b.proarrow_ends(w[0]).1 != b.proarrow_ends(w[1]).0 {
                return Err(InstanceError::BadPresentation(format!(
                    "domain of {} is not a path",
                    g.name
                )));
            }
        }
        let end = domain.last().map_or(anchor, |j| b.proarrow_ends(*j).1);
        let (cs, ct) = b.proarrow_ends(codomain);
        if cs != anchor || ct != end {
            return Err(InstanceError::BadPresentation(format!(
                "generator {} has identity vertical boundaries, so its codomain must run from the \
                 start to the end of its domain",
                g.name
            )));
        }
        gens.push(Gen {
            domain,
            anchor,
            codomain,
        });
    }
    let n_pro = p.proarrows.len();
    // trees[d][j] = trees of depth exactly d with codomain j
    let mut trees: Vec<Vec<Vec<Tree>>> = Vec::new();
    trees.push((0..n_pro).map(|j| alloc::vec![Tree::Wire(ProarrowId(j as u32))]).collect());
    let mut count = 0usize;
    for d in 1..=max_depth + 1 {
        let mut level: Vec<Vec<Tree>> = alloc::vec![Vec::new(); n_pro];
        for (gi, g) in gens.iter().enumerate() {
            if g.domain.is_empty() {
                if d == 1 {
                    level[g.codomain.index()].push(Tree::Node(gi, Vec::new()));
                }
                continue;
            }
            // Children of depth < d, at least one of depth exactly d - 1.
            let options: Vec<Vec<(Tree, bool)>> = g
                .domain
                .iter()
                .map(|j| {
                    let mut opts = Vec::new();
                    for (dd, lvl) in trees.iter().enumerate() {
                        for t in &lvl[j.index()] {
                            opts.push((t.clone(), dd == d - 1));
                        }
                    }
                    opts
                })
                .collect();
            let mut pick = alloc::vec![0usize; options.len()];
            let sizes: Vec<usize> = options.iter().map(Vec::len).collect();
            if sizes.contains(&0) {
                continue;
            }
            loop {
                if pick.iter().zip(&options).any(|(i, o)| o[*i].1) {
                    let kids = pick.iter().zip(&options).map(|(i, o)| o[*i].0.clone()).collect();
                    level[g.codomain.index()].push(Tree::Node(gi, kids));
                    count += 1;
                    if count > max_cells {
                        return Err(InstanceError::ClosureBudgetExceeded(format!(
                            "more than {max_cells} cells"
                        )));
                    }
                }
                if !advance(&mut pick, &sizes) {
                    break;
                }
            }
        }
        if d == max_depth + 1 {
            if level.iter().any(|l| !l.is_empty()) {
                return Err(InstanceError::ClosureBudgetExceeded(format!(
                    "cells of depth {d} exist; the closure is deeper than {max_depth}"
                )));
            }
        } else {
            trees.push(level);
        }
    }

    let gen_names: Vec<String> = p.generators.iter().map(|g| g.name.clone()).collect();
    let mut all: Vec<Tree> = (0..n_pro).map(|j| Tree::Wire(ProarrowId(j as u32))).collect();
    let mut index = BTreeMap::new();
    for j in 0..n_pro {
        index.insert(Tree::Wire(ProarrowId(j as u32)), b.identity_cell(ProarrowId(j as u32)));
    }
    for lvl in trees.iter().skip(1) {
        for t in lvl.iter().flatten() {
            let mut leaves = Vec::new();
            t.leaves(&mut leaves);
            let (gi, _) = match t {
                Tree::Node(g, k) => (*g, k),
                Tree::Wire(_) => unreachable!(),
            };
            let start = match leaves.first() {
                Some(j) => b.proarrow_ends(*j).0,
                None => gens[gi].anchor,
            };
            let frame = Frame {
                domain: Path::from_parts(start, leaves),
                left: b.identity(start),
                right: b.identity(b.proarrow_ends(gens[gi].codomain).1),
                codomain: gens[gi].codomain,
            };
            let name = t.show(&pro_names, &gen_names);
            let c = b.add_cell(&name, frame)?;
            debug_assert_eq!(c.index(), all.len());
            all.push(t.clone());
            index.insert(t.clone(), c);
        }
    }
    debug_assert!(all.iter().all(|t| t.depth() <= max_depth));
    b.set_resolver(Arc::new(GraftResolver { trees: all, index }));
    Ok(b.finish()?)
}

/// One object `A`, its identity, one proarrow `J : A -|> A` and no generating
/// cells.
pub fn f1() -> Vdc {
    let p = Presentation {
        name: "F1".to_string(),
        objects: alloc::vec!["A".to_string()],
        proarrows: alloc::vec![("J".to_string(), "A".to_string(), "A".to_string())],
        generators: Vec::new(),
    };
    free_vdc(&p, 2, 16).expect("F1 is finite")
}

/// One object `A`, one proarrow `J : A -|> A`, and exactly one cell on each
/// frame `[J^n] => J` for `n <= max_arity`, with every substitution landing
/// on the unique cell of its frame. The nullary cell `eta` makes `J` the
/// unit of `A` up to the arity bound.
pub fn terminal(max_arity: usize) -> Vdc {
    let mut b = VdcBuilder::new("terminal");
    let a = b.add_object("A").expect("fresh");
    let j = b.add_proarrow("J", a, a).expect("fresh");
    let id = b.identity(a);
    let mut cells: Vec<CellId> = Vec::new();
    for n in 0..=max_arity {
        if n == 1 {
            cells.push(b.identity_cell(j));
            continue;
        }
        let name = if n == 0 { "eta".to_string() } else { format!("m{n}") };
        let frame = Frame {
            domain: Path::from_parts(a, alloc::vec![j; n]),
            left: id,
            right: id,
            codomain: j,
        };
        cells.push(b.add_cell(&name, frame).expect("fresh"));
    }
    // Every list of inner arities whose sum stays within the bound.
    for k in 1..=max_arity {
        let mut arities = alloc::vec![0usize; k];
        let sizes = alloc::vec![max_arity + 1; k];
        loop {
            let total: usize = arities.iter().sum();
            if total <= max_arity {
                let inners = arities.iter().map(|n| cells[*n]).collect();
                b.set_paste(cells[k], inners, cells[total]);
            }
            if !advance(&mut arities, &sizes) {
                break;
            }
        }
    }
    b.finish().expect("terminal fixture")
}

/// Odometer step over `0..sizes[i]` in each slot; false after the last tuple.
fn advance(pick: &mut [usize], sizes: &[usize]) -> bool {
    for pos in (0..pick.len()).rev() {
        pick[pos] += 1;
        if pick[pos] < sizes[pos] {
            return true;
        }
        pick[pos] = 0;
    }
    false
}
