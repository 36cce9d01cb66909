//! Checkers for the category laws of the vertical arrows and the identity and
//! associativity laws of substitution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{paths_over, Cell, DomainQuery, Frame, Path, ProarrowId, VArrowId, Vdc, VdcError};
use crate::bounds::SearchBounds;
use crate::report::{Counterexample, VerificationReport};

/// Restricts which proarrows and vertical arrows the law checker quantifies
/// over. `None` means everything.
#[derive(Debug, Clone, Default)]
pub struct LawScope {
    pub proarrows: Option<BTreeSet<ProarrowId>>,
    pub arrows: Option<BTreeSet<VArrowId>>,
}

impl LawScope {
    pub fn all() -> Self {
        LawScope::default()
    }

    fn has_pro(&self, j: ProarrowId) -> bool {
        self.proarrows.as_ref().is_none_or(|s| s.contains(&j))
    }

    fn has_arrow(&self, f: VArrowId) -> bool {
        self.arrows.as_ref().is_none_or(|s| s.contains(&f))
    }
}

pub fn check_vdc_laws(vdc: &Vdc, bounds: SearchBounds) -> VerificationReport {
    check_vdc_laws_scoped(vdc, bounds, &LawScope::all())
}

/// Check the laws on every arrangement whose cells use only in-scope data.
pub fn check_vdc_laws_scoped(vdc: &Vdc, bounds: SearchBounds, scope: &LawScope) -> VerificationReport {
    let mut report = VerificationReport::new("laws").with_bounds(bounds);
    report.push(check_vertical(vdc));
    report.push(check_identity_cells(vdc));
    let cells = match enumerate_cells(vdc, bounds, scope) {
        Ok(cells) => cells,
        Err(n) => {
            let mut r = VerificationReport::new("substitution");
            r.truncate(format!("more than {n} cells within bounds"));
            report.push(r);
            return report;
        }
    };
    let mut checker = Checker {
        vdc,
        bounds,
        cells: &cells,
        work: 0,
    };
    report.push(checker.single_level());
    if !vdc.is_thin() {
        report.push(checker.identity_laws());
        if bounds.max_depth >= 2 {
            report.push(checker.associativity());
        }
    } else {
        report.note(
            "thin store: identity and associativity hold as frame equalities once every \
             arrangement lands on an existing cell",
        );
    }
    report.push(checker.whiskering());
    report
}

fn check_vertical(vdc: &Vdc) -> VerificationReport {
    let mut r = VerificationReport::new("vertical");
    let v = vdc.vertical();
    for f in v.arrows() {
        r.tick();
        let (a, b) = (v.dom(f), v.cod(f));
        if v.compose(f, v.identity(a)) != Some(f) || v.compose(v.identity(b), f) != Some(f) {
            r.fail_msg(format!("unit law fails for {}", vdc.arrow_name(f)));
        }
    }
    for f in v.arrows() {
        for g in v.arrows().filter(|g| v.dom(*g) == v.cod(f)) {
            let gf = v.compose(g, f);
            for h in v.arrows().filter(|h| v.dom(*h) == v.cod(g)) {
                r.tick();
                let lhs = gf.and_then(|gf| v.compose(h, gf));
                let rhs = v.compose(h, g).and_then(|hg| v.compose(hg, f));
                if lhs.is_none() || lhs != rhs {
                    r.fail_msg(format!(
                        "associativity fails for {} . {} . {}",
                        vdc.arrow_name(h),
                        vdc.arrow_name(g),
                        vdc.arrow_name(f)
                    ));
                }
            }
        }
    }
    r
}

fn check_identity_cells(vdc: &Vdc) -> VerificationReport {
    let mut r = VerificationReport::new("identity-cells");
    for j in vdc.proarrows() {
        r.tick();
        match vdc.identity_cell(j) {
            Ok(c) if vdc.contains(&c) => {}
            Ok(c) => r.fail(Counterexample::with_frames(
                format!("identity cell of {} is not in the store", vdc.proarrow_name(j)),
                alloc::vec![c.frame],
            )),
            Err(e) => r.fail_msg(format!("identity cell of {}: {e}", vdc.proarrow_name(j))),
        }
    }
    r
}

/// All in-scope cells with domain length at most `max_path`, grouped by
/// codomain. Fails with the budget when there are too many.
fn enumerate_cells(vdc: &Vdc, bounds: SearchBounds, scope: &LawScope) -> Result<Vec<Vec<Cell>>, u64> {
    let mut by_cod: Vec<Vec<Cell>> = alloc::vec![Vec::new(); vdc.proarrow_count()];
    let mut count = 0u64;
    let in_scope = |c: &Cell| {
        c.frame.domain.arrows().iter().all(|j| scope.has_pro(*j))
            && scope.has_pro(c.frame.codomain)
            && scope.has_arrow(c.frame.left)
            && scope.has_arrow(c.frame.right)
    };
    match vdc.table() {
        Some(table) => {
            for id in 0..table.len() {
                let c = vdc.cell_by_id(super::CellId(id as u32)).expect("own cell");
                if c.arity() <= bounds.max_path && in_scope(&c) {
                    by_cod[c.frame.codomain.index()].push(c);
                }
            }
        }
        None => {
            for path in paths_over(vdc, bounds.max_path, |j| scope.has_pro(j)) {
                let q = vdc.domain_query(&path);
                let src = path.start();
                let tgt = vdc.path_target(&path);
                for left in vdc.arrows().filter(|f| vdc.dom(*f) == src && scope.has_arrow(*f)) {
                    for right in vdc.arrows().filter(|f| vdc.dom(*f) == tgt && scope.has_arrow(*f)) {
                        for k in vdc.proarrows_between(vdc.cod(left), vdc.cod(right)) {
                            if !scope.has_pro(*k) || !q.exists(left, right, *k) {
                                continue;
                            }
                            count += 1;
                            if count > bounds.max_work {
                                return Err(bounds.max_work);
                            }
                            by_cod[k.index()].push(Cell::thin(q.frame(left, right, *k)));
                        }
                    }
                }
            }
        }
    }
    Ok(by_cod)
}

struct Checker<'a> {
    vdc: &'a Vdc,
    bounds: SearchBounds,
    cells: &'a [Vec<Cell>],
    work: u64,
}

enum Flow {
    Continue,
    Stop,
}

impl Checker<'_> {
    fn spend(&mut self, r: &mut VerificationReport) -> bool {
        self.work += 1;
        if self.work > self.bounds.max_work {
            r.truncate(format!("work budget {} exhausted", self.bounds.max_work));
            false
        } else {
            true
        }
    }

    fn outers(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().flatten().filter(|c| c.arity() >= 1)
    }

    /// Visit every list of inner cells composable into `outer` whose total
    /// domain length is at most `budget`.
    fn for_each_inners(
        &self,
        outer: &Cell,
        budget: usize,
        visit: &mut dyn FnMut(&[Cell]) -> Flow,
    ) -> Flow {
        let mut chosen: Vec<Cell> = Vec::new();
        self.inners_rec(outer, budget, &mut chosen, visit)
    }

    fn inners_rec(
        &self,
        outer: &Cell,
        budget: usize,
        chosen: &mut Vec<Cell>,
        visit: &mut dyn FnMut(&[Cell]) -> Flow,
    ) -> Flow {
        let i = chosen.len();
        if i == outer.arity() {
            return visit(chosen);
        }
        let want = outer.frame.domain.arrows()[i];
        for c in &self.cells[want.index()] {
            if c.arity() > budget {
                continue;
            }
            if let Some(prev) = chosen.last() {
                if prev.frame.right != c.frame.left {
                    continue;
                }
            }
            chosen.push(c.clone());
            let flow = self.inners_rec(outer, budget - c.arity(), chosen, visit);
            chosen.pop();
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    /// Every single-level arrangement must be defined and land on the frame
    /// computed from its parts.
    fn single_level(&mut self) -> VerificationReport {
        let mut r = VerificationReport::new("substitution");
        let outers: Vec<Cell> = self.outers().cloned().collect();
        let vdc = self.vdc;
        let budget = self.bounds.max_work;
        let mut work = self.work;
        // Thin stores: decide the pasted frame with one cached query per path.
        let mut queries: BTreeMap<Path, DomainQuery<'_>> = BTreeMap::new();
        let mut truncated = false;
        for outer in &outers {
            let flow = self.for_each_inners(outer, self.bounds.max_path, &mut |inners| {
                work += 1;
                if work > budget {
                    truncated = true;
                    return Flow::Stop;
                }
                r.tick();
                let res = if vdc.is_thin() {
                    let frames: Vec<&Frame> = inners.iter().map(|c| &c.frame).collect();
                    vdc.paste_frame(&outer.frame, &frames).and_then(|f| {
                        let q = queries
                            .entry(f.domain.clone())
                            .or_insert_with(|| vdc.domain_query(&f.domain));
                        if q.exists(f.left, f.right, f.codomain) {
                            Ok(())
                        } else {
                            Err(VdcError::MissingCell(format!(
                                "no cell on the pasted frame {}",
                                vdc.show_frame(&f)
                            )))
                        }
                    })
                } else {
                    vdc.paste(outer, inners).map(|_| ())
                };
                if let Err(e) = res {
                    let mut frames = alloc::vec![outer.frame.clone()];
                    frames.extend(inners.iter().map(|c| c.frame.clone()));
                    r.fail(Counterexample::with_frames(
                        format!("{}: {e}", vdc.show_arrangement(outer, inners)),
                        frames,
                    ));
                }
                Flow::Continue
            });
            if let Flow::Stop = flow {
                break;
            }
        }
        self.work = work;
        if truncated {
            r.truncate(format!("work budget {budget} exhausted"));
        }
        r
    }

    fn identity_laws(&mut self) -> VerificationReport {
        let mut r = VerificationReport::new("identity");
        let vdc = self.vdc;
        for c in self.cells.iter().flatten() {
            r.tick();
            if c.arity() >= 1 {
                let ids: Result<Vec<Cell>, _> =
                    c.frame.domain.arrows().iter().map(|j| vdc.identity_cell(*j)).collect();
                match ids.and_then(|ids| vdc.paste(c, &ids)) {
                    Ok(d) if d == *c => {}
                    Ok(d) => r.fail(Counterexample::with_frames(
                        format!(
                            "{} pasted with identities gives {}",
                            vdc.show_cell(c),
                            vdc.show_cell(&d)
                        ),
                        alloc::vec![c.frame.clone()],
                    )),
                    Err(e) => r.fail_msg(format!("{} pasted with identities: {e}", vdc.show_cell(c))),
                }
            }
            match vdc
                .identity_cell(c.frame.codomain)
                .and_then(|id| vdc.paste(&id, core::slice::from_ref(c)))
            {
                Ok(d) if d == *c => {}
                Ok(d) => r.fail(Counterexample::with_frames(
                    format!(
                        "identity of {} applied to {} gives {}",
                        vdc.proarrow_name(c.frame.codomain),
                        vdc.show_cell(c),
                        vdc.show_cell(&d)
                    ),
                    alloc::vec![c.frame.clone()],
                )),
                Err(e) => r.fail_msg(format!("identity applied to {}: {e}", vdc.show_cell(c))),
            }
        }
        r
    }

    /// `b(a_1, .., a_k)(g..) = b(a_1(g..), .., a_k(g..))` for every two-level
    /// arrangement within the path bound.
    fn associativity(&mut self) -> VerificationReport {
        let mut r = VerificationReport::new("associativity");
        let vdc = self.vdc;
        let outers: Vec<Cell> = self.outers().cloned().collect();
        let mut level1: Vec<(Cell, Vec<Cell>)> = Vec::new();
        for outer in &outers {
            self.for_each_inners(outer, self.bounds.max_path, &mut |inners| {
                level1.push((outer.clone(), inners.to_vec()));
                Flow::Continue
            });
        }
        'arr: for (outer, middle) in level1 {
            let Ok(composite) = vdc.paste(&outer, &middle) else {
                continue;
            };
            if composite.arity() == 0 {
                continue;
            }
            let mut bottoms: Vec<Vec<Cell>> = Vec::new();
            self.for_each_inners(&composite, self.bounds.max_path, &mut |inners| {
                bottoms.push(inners.to_vec());
                Flow::Continue
            });
            for bottom in bottoms {
                if !self.spend(&mut r) {
                    break 'arr;
                }
                r.tick();
                let lhs = vdc.paste(&composite, &bottom);
                let mut pieces = Vec::with_capacity(middle.len());
                let mut at = 0;
                let mut rhs_err = None;
                for m in &middle {
                    let k = m.arity();
                    let part = if k == 0 {
                        Ok(m.clone())
                    } else {
                        vdc.paste(m, &bottom[at..at + k])
                    };
                    at += k;
                    match part {
                        Ok(p) => pieces.push(p),
                        Err(e) => {
                            rhs_err = Some(e);
                            break;
                        }
                    }
                }
                let rhs = match rhs_err {
                    Some(e) => Err(e),
                    None => vdc.paste(&outer, &pieces),
                };
                let agree = matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b);
                if !agree {
                    let show = |x: &Result<Cell, VdcError>| match x {
                        Ok(c) => vdc.show_cell(c),
                        Err(e) => format!("error ({e})"),
                    };
                    let bottoms: Vec<_> = bottom.iter().map(|c| vdc.show_cell(c)).collect();
                    let mut frames = alloc::vec![outer.frame.clone()];
                    frames.extend(middle.iter().map(|c| c.frame.clone()));
                    frames.extend(bottom.iter().map(|c| c.frame.clone()));
                    r.fail(Counterexample::with_frames(
                        format!(
                            "{}({}) = {} but substituting inside gives {}",
                            vdc.show_arrangement(&outer, &middle),
                            bottoms.join(", "),
                            show(&lhs),
                            show(&rhs)
                        ),
                        frames,
                    ));
                }
            }
        }
        r
    }

    /// Precomposition of nullary cells with vertical arrows: identity law,
    /// composition law, and compatibility with substitution of nullary cells.
    fn whiskering(&mut self) -> VerificationReport {
        let mut r = VerificationReport::new("whiskering");
        let vdc = self.vdc;
        let nullary: Vec<Cell> = self.cells.iter().flatten().filter(|c| c.arity() == 0).cloned().collect();
        for c in &nullary {
            let anchor = c.frame.domain.start();
            let into: Vec<VArrowId> = vdc.vertical().into_object(anchor).collect();
            for f in &into {
                if !self.spend(&mut r) {
                    return r;
                }
                r.tick();
                let cf = match vdc.whisker(c, *f) {
                    Ok(cf) => cf,
                    Err(e) => {
                        r.fail(Counterexample::with_frames(
                            format!("{} along {}: {e}", vdc.show_cell(c), vdc.arrow_name(*f)),
                            alloc::vec![c.frame.clone()],
                        ));
                        continue;
                    }
                };
                for g in vdc.vertical().into_object(vdc.dom(*f)) {
                    r.tick();
                    let fg = vdc.compose(*f, g).expect("composable");
                    let lhs = vdc.whisker(&cf, g);
                    let rhs = vdc.whisker(c, fg);
                    if !matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b) {
                        r.fail(Counterexample::with_frames(
                            format!(
                                "whiskering {} along {} then {} differs from along the composite",
                                vdc.show_cell(c),
                                vdc.arrow_name(*f),
                                vdc.arrow_name(g)
                            ),
                            alloc::vec![c.frame.clone()],
                        ));
                    }
                }
            }
        }
        // Substituting nullary cells commutes with whiskering.
        let outers: Vec<Cell> = self.outers().cloned().collect();
        for outer in &outers {
            let mut arrangements: Vec<Vec<Cell>> = Vec::new();
            self.for_each_inners(outer, 0, &mut |inners| {
                arrangements.push(inners.to_vec());
                Flow::Continue
            });
            for inners in arrangements {
                let Ok(pasted) = vdc.paste(outer, &inners) else {
                    continue;
                };
                let anchor = pasted.frame.domain.start();
                for f in vdc.vertical().into_object(anchor) {
                    if vdc.vertical().is_identity(f) {
                        continue;
                    }
                    if !self.spend(&mut r) {
                        return r;
                    }
                    r.tick();
                    let lhs = vdc.whisker(&pasted, f);
                    let rhs = inners
                        .iter()
                        .map(|c| vdc.whisker(c, f))
                        .collect::<Result<Vec<_>, _>>()
                        .and_then(|ws| vdc.paste(outer, &ws));
                    if !matches!((&lhs, &rhs), (Ok(a), Ok(b)) if a == b) {
                        r.fail(Counterexample::with_frames(
                            format!(
                                "whiskering {} along {} does not commute with substitution",
                                vdc.show_arrangement(outer, &inners),
                                vdc.arrow_name(f)
                            ),
                            alloc::vec![outer.frame.clone()],
                        ));
                    }
                }
            }
        }
        r
    }
}
