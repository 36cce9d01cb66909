//! Universal structure found by exhaustive search: units, composites,
//! cartesian cells and restrictions, companions and conjoints.
//!
//! Every universal property quantifies over all paths of proarrows. The
//! searcher checks it for every path within its [`SearchBounds`], and every
//! witness records the bounds it was certified under. A search that runs out
//! of budget reports [`UniversalError::BoundsTooSmall`], never a refutation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::fmt;

use thiserror::Error;

use crate::bounds::SearchBounds;
use crate::report::{Counterexample, VerificationReport};
use crate::vdc::{
    flanks, paths_up_to, Cell, DomainQuery, Frame, ObjId, Path, ProarrowId, VArrowId, Vdc, VdcError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WitnessKind {
    Unit,
    Composite,
    Restriction,
    Companion,
    Conjoint,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::Unit => "unit",
            WitnessKind::Composite => "composite",
            WitnessKind::Restriction => "restriction",
            WitnessKind::Companion => "companion",
            WitnessKind::Conjoint => "conjoint",
        })
    }
}

/// A proarrow with its universal structure cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalWitness {
    pub kind: WitnessKind,
    pub proarrow: ProarrowId,
    pub structure_cell: Cell,
    /// Bounds under which the universal property was checked.
    pub certificate: SearchBounds,
    /// Further witnesses found for the same datum.
    pub alternatives: Vec<(ProarrowId, Cell)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniversalError {
    #[error("NotFound: {0}")]
    NotFound(String),
    #[error("BoundsTooSmall: {0}")]
    BoundsTooSmall(String),
    #[error("factorization is not unique: {0}")]
    NotUnique(String),
    #[error(transparent)]
    Vdc(#[from] VdcError),
}

/// Companion and conjoint of a vertical arrow `f : A -> B` with their bends.
#[derive(Debug, Clone)]
pub struct BendBundle {
    pub arrow: VArrowId,
    /// `f_! = h_B(f, id)` with cartesian cell `[f_!] / (f, id) => h_B`.
    pub companion: UniversalWitness,
    /// `[@A] / (id, f) => f_!`.
    pub companion_unit: Cell,
    /// `f^* = h_B(id, f)` with cartesian cell `[f^*] / (id, f) => h_B`.
    pub conjoint: UniversalWitness,
    /// `[@A] / (f, id) => f^*`.
    pub conjoint_unit: Cell,
    /// Both kink identities for both bends.
    pub report: VerificationReport,
}

type Cached<T> = RefCell<BTreeMap<T, Result<UniversalWitness, UniversalError>>>;

/// Exhaustive searcher over one virtual double category.
///
/// Domain queries are cached and shared by all searches; found witnesses are
/// cached too. In thin stores whose oracle summarises paths (see
/// [`Vdc::domain_key`]) quantification runs over one representative per
/// summary, which is exact because cell existence depends only on the summary.
pub struct Searcher<'a> {
    vdc: &'a Vdc,
    bounds: SearchBounds,
    paths: Vec<Path>,
    keyed: bool,
    saturated: bool,
    queries: RefCell<BTreeMap<QueryKey, Rc<DomainQuery<'a>>>>,
    work: core::cell::Cell<u64>,
    check_work: core::cell::Cell<u64>,
    units: Cached<ObjId>,
    restrictions: Cached<(ProarrowId, VArrowId, VArrowId)>,
    composites: Cached<Path>,
    /// Composites found in keyed stores, by domain summary.
    summaries: RefCell<BTreeMap<QueryKey, UniversalWitness>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum QueryKey {
    Path(Path),
    Summary(ObjId, ObjId, Vec<u8>),
}

enum Verdict {
    Holds,
    Fails(String),
    OutOfBudget,
}

impl<'a> Searcher<'a> {
    pub fn new(vdc: &'a Vdc, bounds: SearchBounds) -> Self {
        let keyed = vdc.is_thin()
            && vdc
                .objects()
                .next()
                .is_some_and(|a| vdc.domain_key(&Path::empty(a)).is_some());
        let mut s = Searcher {
            vdc,
            bounds,
            paths: Vec::new(),
            keyed,
            saturated: false,
            queries: RefCell::new(BTreeMap::new()),
            work: core::cell::Cell::new(0),
            check_work: core::cell::Cell::new(0),
            units: RefCell::new(BTreeMap::new()),
            restrictions: RefCell::new(BTreeMap::new()),
            composites: RefCell::new(BTreeMap::new()),
            summaries: RefCell::new(BTreeMap::new()),
        };
        if keyed {
            s.collect_representatives();
        } else {
            s.paths = paths_up_to(vdc, bounds.max_path);
        }
        s
    }

    fn key(&self, path: &Path) -> QueryKey {
        if self.keyed {
            if let Some(k) = self.vdc.domain_key(path) {
                return QueryKey::Summary(path.start(), self.vdc.path_target(path), k);
            }
        }
        QueryKey::Path(path.clone())
    }

    /// Shortest representative paths, one per summary, up to the path bound.
    /// Extending a representative gives the summaries of all extensions, so
    /// breadth-first search over representatives reaches every summary.
    fn collect_representatives(&mut self) {
        let vdc = self.vdc;
        let mut seen = BTreeSet::new();
        let mut frontier = Vec::new();
        for a in vdc.objects() {
            let p = Path::empty(a);
            if seen.insert(self.key(&p)) {
                frontier.push(p);
            }
        }
        let extend = |p: &Path| -> Vec<Path> {
            let end = vdc.path_target(p);
            vdc.objects()
                .flat_map(|b| vdc.proarrows_between(end, b).iter().copied())
                .map(|j| p.concat(&Path::from_parts(end, alloc::vec![j])))
                .collect()
        };
        let mut out = frontier.clone();
        for _ in 0..self.bounds.max_path {
            let mut next = Vec::new();
            for p in &frontier {
                for q in extend(p) {
                    if seen.insert(self.key(&q)) {
                        next.push(q);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        self.saturated = frontier
            .iter()
            .all(|p| extend(p).iter().all(|q| seen.contains(&self.key(q))));
        self.paths = out;
    }

    pub fn vdc(&self) -> &'a Vdc {
        self.vdc
    }

    pub fn bounds(&self) -> SearchBounds {
        self.bounds
    }

    /// Whether the quantified domains cover the summaries of paths of every
    /// length, making path-quantified checks exhaustive.
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    /// Domain paths that path-quantified checks range over.
    pub fn domains(&self) -> &[Path] {
        &self.paths
    }

    /// Work units spent so far, summed over all searches.
    pub fn work(&self) -> u64 {
        self.work.get()
    }

    fn query(&self, path: &Path) -> Rc<DomainQuery<'a>> {
        let key = self.key(path);
        if let Some(q) = self.queries.borrow().get(&key) {
            return q.clone();
        }
        let q = Rc::new(self.vdc.domain_query(path));
        self.queries.borrow_mut().insert(key, q.clone());
        q
    }

    pub fn exists(&self, path: &Path, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> bool {
        self.query(path).exists(left, right, codomain)
    }

    pub fn cells(&self, path: &Path, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> Vec<Cell> {
        let q = self.query(path);
        let mut cells = q.cells(left, right, codomain);
        if q.domain() != path {
            for c in &mut cells {
                c.frame.domain = path.clone();
            }
        }
        cells
    }

    pub fn cells_on(&self, frame: &Frame) -> Vec<Cell> {
        self.cells(&frame.domain, frame.left, frame.right, frame.codomain)
    }

    /// Flanking paths on one side of `end`, one per summary where possible.
    fn flank_paths(&self, end: ObjId, on_left: bool) -> Vec<Path> {
        let all = flanks(self.vdc, self.bounds.max_flank, end, on_left);
        if !self.keyed {
            return all;
        }
        let mut seen = BTreeSet::new();
        all.into_iter().filter(|p| seen.insert(self.key(p))).collect()
    }

    fn identities(&self, path: &Path) -> Vec<Cell> {
        path.arrows()
            .iter()
            .map(|j| self.vdc.identity_cell(*j).expect("own proarrow"))
            .collect()
    }

    /// `map` sends cells on `source` to cells on `target`; check it is a
    /// bijection.
    fn bijection(
        &self,
        (target, tq): (&Frame, &DomainQuery<'_>),
        (source, sq): (&Frame, &DomainQuery<'_>),
        map: &dyn Fn(&Cell) -> Result<Cell, VdcError>,
    ) -> Verdict {
        self.work.set(self.work.get() + 1);
        let spent = self.check_work.get() + 1;
        self.check_work.set(spent);
        if spent > self.bounds.max_work {
            return Verdict::OutOfBudget;
        }
        let vdc = self.vdc;
        if vdc.is_thin() {
            let t = tq.exists(target.left, target.right, target.codomain);
            let s = sq.exists(source.left, source.right, source.codomain);
            return match (t, s) {
                (true, true) | (false, false) => Verdict::Holds,
                (true, false) => Verdict::Fails(format!(
                    "{} has no factor on {}",
                    vdc.show_frame(target),
                    vdc.show_frame(source)
                )),
                (false, true) => Verdict::Fails(format!(
                    "the cell on {} does not paste to a cell on {}",
                    vdc.show_frame(source),
                    vdc.show_frame(target)
                )),
            };
        }
        let phis = tq.cells(target.left, target.right, target.codomain);
        let psis = sq.cells(source.left, source.right, source.codomain);
        let mut hits = alloc::vec![0usize; phis.len()];
        for psi in &psis {
            let image = match map(psi) {
                Ok(c) => c,
                Err(e) => return Verdict::Fails(format!("pasting {} fails: {e}", vdc.show_cell(psi))),
            };
            match phis.iter().position(|p| *p == image) {
                Some(i) => hits[i] += 1,
                None => {
                    return Verdict::Fails(format!(
                        "{} pastes to {} outside {}",
                        vdc.show_cell(psi),
                        vdc.show_cell(&image),
                        vdc.show_frame(target)
                    ))
                }
            }
        }
        for (phi, n) in phis.iter().zip(&hits) {
            if *n != 1 {
                return Verdict::Fails(format!(
                    "{} on {} has {n} factors on {}",
                    vdc.show_cell(phi),
                    vdc.show_frame(target),
                    vdc.show_frame(source)
                ));
            }
        }
        Verdict::Holds
    }

    /// Check that a unary cell is cartesian: every cell on
    /// `(P, g a', f b', K)` factors uniquely through it.
    pub fn is_cartesian(&self, cell: &Cell) -> (bool, VerificationReport) {
        let vdc = self.vdc;
        let mut report =
            VerificationReport::new(format!("cartesian {}", vdc.show_cell(cell))).with_bounds(self.bounds);
        self.check_work.set(0);
        let frame = &cell.frame;
        if frame.domain.len() != 1 {
            report.fail_msg("a cartesian cell has exactly one proarrow in its domain");
            return (false, report);
        }
        if !vdc.contains(cell) {
            report.fail_msg("cell is not in the store");
            return (false, report);
        }
        if self.saturated {
            report.note("domain summaries saturate: every path length is covered");
        }
        let r = frame.domain.arrows()[0];
        let (g, f, k) = (frame.left, frame.right, frame.codomain);
        for p in &self.paths {
            let q = self.query(p);
            let (src, tgt) = (p.start(), vdc.path_target(p));
            for a in vdc.vertical().between(src, vdc.src(r)) {
                let ga = vdc.compose(g, *a).expect("composable");
                for b in vdc.vertical().between(tgt, vdc.tgt(r)) {
                    report.tick();
                    let fb = vdc.compose(f, *b).expect("composable");
                    let target = Frame {
                        domain: p.clone(),
                        left: ga,
                        right: fb,
                        codomain: k,
                    };
                    let source = Frame {
                        domain: p.clone(),
                        left: *a,
                        right: *b,
                        codomain: r,
                    };
                    match self.bijection((&target, &q), (&source, &q), &|psi| {
                        vdc.paste(cell, core::slice::from_ref(psi))
                    }) {
                        Verdict::Holds => {}
                        Verdict::Fails(why) => {
                            report.fail(Counterexample::with_frames(why, alloc::vec![target, source]));
                            return (false, report);
                        }
                        Verdict::OutOfBudget => {
                            report.truncate(format!("work budget {} exhausted", self.bounds.max_work));
                            return (false, report);
                        }
                    }
                }
            }
        }
        (true, report)
    }

    /// Check the insertion property of `w : D => J`: every cell on a flanked
    /// domain `Kl D Qr` factors uniquely through `Kl [J] Qr`.
    pub fn check_insertion(&self, w: &Cell) -> VerificationReport {
        let vdc = self.vdc;
        let mut report =
            VerificationReport::new(format!("insertion {}", vdc.show_cell(w))).with_bounds(self.bounds);
        self.check_work.set(0);
        let d = &w.frame.domain;
        let j = w.frame.codomain;
        if !vdc.vertical().is_identity(w.frame.left) || !vdc.vertical().is_identity(w.frame.right) {
            report.fail_msg("structure cell must have identity vertical arrows");
            return report;
        }
        let (s, t) = (vdc.src(j), vdc.tgt(j));
        let core_len = d.len().max(1);
        if core_len > self.bounds.max_path {
            report.truncate(format!(
                "domain of length {} exceeds the path bound {}",
                d.len(),
                self.bounds.max_path
            ));
            return report;
        }
        let lefts = self.flank_paths(s, true);
        let rights = self.flank_paths(t, false);
        let jpath = Path::from_parts(s, alloc::vec![j]);
        for kl in &lefts {
            for qr in &rights {
                if kl.len() + core_len + qr.len() > self.bounds.max_path {
                    continue;
                }
                let target_path = kl.concat(d).concat(qr);
                let source_path = kl.concat(&jpath).concat(qr);
                let mut inners = self.identities(kl);
                let at = inners.len();
                inners.push(w.clone());
                inners.extend(self.identities(qr));
                let (tq, sq) = (self.query(&target_path), self.query(&source_path));
                let (src, tgt) = (target_path.start(), vdc.path_target(&target_path));
                for a in vdc.arrows().filter(|a| vdc.dom(*a) == src) {
                    for b in vdc.arrows().filter(|b| vdc.dom(*b) == tgt) {
                        for l in vdc.proarrows_between(vdc.cod(a), vdc.cod(b)) {
                            report.tick();
                            let target = Frame {
                                domain: target_path.clone(),
                                left: a,
                                right: b,
                                codomain: *l,
                            };
                            let source = Frame {
                                domain: source_path.clone(),
                                left: a,
                                right: b,
                                codomain: *l,
                            };
                            let verdict = self.bijection((&target, &tq), (&source, &sq), &|psi| {
                                let mut xs = inners.clone();
                                xs[at] = w.clone();
                                vdc.paste(psi, &xs)
                            });
                            match verdict {
                                Verdict::Holds => {}
                                Verdict::Fails(why) => {
                                    report.fail(Counterexample::with_frames(
                                        why,
                                        alloc::vec![target, source],
                                    ));
                                    return report;
                                }
                                Verdict::OutOfBudget => {
                                    report.truncate(format!(
                                        "work budget {} exhausted",
                                        self.bounds.max_work
                                    ));
                                    return report;
                                }
                            }
                        }
                    }
                }
            }
        }
        report
    }

    /// Search candidates in declaration order; the first certified one is the
    /// witness, later ones are alternatives.
    fn search(
        &self,
        kind: WitnessKind,
        what: String,
        candidates: Vec<Cell>,
        check: &dyn Fn(&Cell) -> VerificationReport,
    ) -> Result<UniversalWitness, UniversalError> {
        let mut found: Vec<Cell> = Vec::new();
        let mut truncated = None;
        for c in candidates {
            let r = check(&c);
            if r.passed() {
                found.push(c);
            } else if r.status == crate::report::Status::Truncated && truncated.is_none() {
                truncated = Some(r.notes.join("; "));
            }
        }
        let mut it = found.into_iter();
        match (it.next(), truncated) {
            (Some(first), _) => Ok(UniversalWitness {
                kind,
                proarrow: first.frame.codomain_or_domain(kind),
                structure_cell: first,
                certificate: self.bounds,
                alternatives: it
                    .map(|c| (c.frame.codomain_or_domain(kind), c))
                    .collect(),
            }),
            (None, Some(why)) => Err(UniversalError::BoundsTooSmall(format!("{what}: {why}"))),
            (None, None) => Err(UniversalError::NotFound(what)),
        }
    }

    /// The unit `h_A` with its nullary structure cell `[@A] => h_A`.
    pub fn find_unit(&self, a: ObjId) -> Result<UniversalWitness, UniversalError> {
        if let Some(hit) = self.units.borrow().get(&a) {
            return hit.clone();
        }
        let vdc = self.vdc;
        let id = vdc.identity(a);
        let empty = Path::empty(a);
        let mut candidates = Vec::new();
        for j in vdc.proarrows_between(a, a) {
            candidates.extend(self.cells(&empty, id, id, *j));
        }
        let what = format!("unit of {}", vdc.obj_name(a));
        let res = self.search(WitnessKind::Unit, what, candidates, &|c| self.check_insertion(c));
        self.units.borrow_mut().insert(a, res.clone());
        res
    }

    /// A composite of a non-empty path with its structure cell
    /// `path / (id, id) => J`.
    pub fn find_composite(&self, path: &Path) -> Result<UniversalWitness, UniversalError> {
        let vdc = self.vdc;
        if path.is_empty() {
            return self.find_unit(path.start());
        }
        if let Some(hit) = self.composites.borrow().get(path) {
            return hit.clone();
        }
        vdc.check_path(path)?;
        let (s, t) = (path.start(), vdc.path_target(path));
        let key = (self.keyed && path.len() > 1).then(|| self.key(path));
        if let Some(w) = key.as_ref().and_then(|k| self.summaries.borrow().get(k).cloned()) {
            // Same summary, same cells: move the witness onto this path.
            let onto = |c: &Cell| {
                Cell::thin(Frame {
                    domain: path.clone(),
                    ..c.frame.clone()
                })
            };
            let res = Ok(UniversalWitness {
                structure_cell: onto(&w.structure_cell),
                alternatives: w.alternatives.iter().map(|(j, c)| (*j, onto(c))).collect(),
                ..w
            });
            self.composites.borrow_mut().insert(path.clone(), res.clone());
            return res;
        }
        let res = if path.len() == 1 {
            // A single proarrow is its own composite by the identity laws.
            let j = path.arrows()[0];
            Ok(UniversalWitness {
                kind: WitnessKind::Composite,
                proarrow: j,
                structure_cell: vdc.identity_cell(j)?,
                certificate: self.bounds,
                alternatives: Vec::new(),
            })
        } else {
            let (ids, idt) = (vdc.identity(s), vdc.identity(t));
            let mut candidates = Vec::new();
            for j in vdc.proarrows_between(s, t) {
                candidates.extend(self.cells(path, ids, idt, *j));
            }
            let what = format!("composite of {}", vdc.show_path(path));
            self.search(WitnessKind::Composite, what, candidates, &|c| self.check_insertion(c))
        };
        if let (Some(k), Ok(w)) = (key, &res) {
            self.summaries.borrow_mut().insert(k, w.clone());
        }
        self.composites.borrow_mut().insert(path.clone(), res.clone());
        res
    }

    /// The restriction `K(g, f)` with its cartesian cell `[K(g, f)] / (g, f) => K`.
    pub fn find_restriction(
        &self,
        k: ProarrowId,
        g: VArrowId,
        f: VArrowId,
    ) -> Result<UniversalWitness, UniversalError> {
        let key = (k, g, f);
        if let Some(hit) = self.restrictions.borrow().get(&key) {
            return hit.clone();
        }
        let vdc = self.vdc;
        if vdc.cod(g) != vdc.src(k) || vdc.cod(f) != vdc.tgt(k) {
            return Err(UniversalError::Vdc(VdcError::MalformedFrame(format!(
                "{} cannot be restricted along ({}, {})",
                vdc.proarrow_name(k),
                vdc.arrow_name(g),
                vdc.arrow_name(f)
            ))));
        }
        let res = if vdc.vertical().is_identity(g) && vdc.vertical().is_identity(f) {
            // Restriction along identities is the proarrow itself.
            Ok(UniversalWitness {
                kind: WitnessKind::Restriction,
                proarrow: k,
                structure_cell: vdc.identity_cell(k)?,
                certificate: self.bounds,
                alternatives: Vec::new(),
            })
        } else {
            let (a, b) = (vdc.dom(g), vdc.dom(f));
            let mut candidates = Vec::new();
            for r in vdc.proarrows_between(a, b) {
                let domain = Path::from_parts(a, alloc::vec![*r]);
                candidates.extend(self.cells(&domain, g, f, k));
            }
            let what = format!(
                "restriction {}({}, {})",
                vdc.proarrow_name(k),
                vdc.arrow_name(g),
                vdc.arrow_name(f)
            );
            self.search(WitnessKind::Restriction, what, candidates, &|c| self.is_cartesian(c).1)
        };
        self.restrictions.borrow_mut().insert(key, res.clone());
        res
    }

    /// The unique `psi` on `(phi.domain, a', b', R)` with `cart(psi) = phi`,
    /// where `cart : [R] / (g, f) => K`.
    pub fn factor_through_cartesian(
        &self,
        cart: &Cell,
        phi: &Cell,
        a: VArrowId,
        b: VArrowId,
    ) -> Result<Cell, UniversalError> {
        let vdc = self.vdc;
        let r = *cart
            .frame
            .domain
            .arrows()
            .first()
            .ok_or_else(|| VdcError::MalformedFrame("cartesian cell must be unary".into()))?;
        if vdc.compose(cart.frame.left, a) != Some(phi.frame.left)
            || vdc.compose(cart.frame.right, b) != Some(phi.frame.right)
            || cart.frame.codomain != phi.frame.codomain
        {
            return Err(UniversalError::Vdc(VdcError::NonComposable {
                index: 0,
                reason: format!(
                    "{} does not lie over {} along ({}, {})",
                    vdc.show_frame(&phi.frame),
                    vdc.show_frame(&cart.frame),
                    vdc.arrow_name(a),
                    vdc.arrow_name(b)
                ),
            }));
        }
        let source = Frame {
            domain: phi.frame.domain.clone(),
            left: a,
            right: b,
            codomain: r,
        };
        self.unique_factor(&source, phi, &|psi| vdc.paste(cart, core::slice::from_ref(psi)))
    }

    /// The unique `psi` on `Kl [J] Qr` with `psi(ids, w, ids) = phi`, where `w`
    /// is a unit or composite structure cell whose domain sits at position
    /// `at` of `phi`'s domain.
    pub fn factor_through_inserted(&self, w: &Cell, at: usize, phi: &Cell) -> Result<Cell, UniversalError> {
        let vdc = self.vdc;
        let arrows = phi.frame.domain.arrows();
        let n = w.frame.domain.len();
        if at + n > arrows.len() || arrows[at..at + n] != *w.frame.domain.arrows() {
            return Err(UniversalError::Vdc(VdcError::NonComposable {
                index: at,
                reason: format!(
                    "{} does not contain {} at position {at}",
                    vdc.show_path(&phi.frame.domain),
                    vdc.show_path(&w.frame.domain)
                ),
            }));
        }
        let j = w.frame.codomain;
        let mut source_arrows = arrows[..at].to_vec();
        source_arrows.push(j);
        source_arrows.extend_from_slice(&arrows[at + n..]);
        let start = if at == 0 { vdc.src(j) } else { phi.frame.domain.start() };
        let source = Frame {
            domain: Path::from_parts(start, source_arrows),
            left: phi.frame.left,
            right: phi.frame.right,
            codomain: phi.frame.codomain,
        };
        let kl = Path::from_parts(phi.frame.domain.start(), arrows[..at].to_vec());
        let qr = Path::from_parts(vdc.tgt(j), arrows[at + n..].to_vec());
        let mut inners = self.identities(&kl);
        inners.push(w.clone());
        inners.extend(self.identities(&qr));
        self.unique_factor(&source, phi, &|psi| vdc.paste(psi, &inners))
    }

    fn unique_factor(
        &self,
        source: &Frame,
        phi: &Cell,
        map: &dyn Fn(&Cell) -> Result<Cell, VdcError>,
    ) -> Result<Cell, UniversalError> {
        let vdc = self.vdc;
        let mut hits = Vec::new();
        for psi in self.cells_on(source) {
            if map(&psi)? == *phi {
                hits.push(psi);
            }
        }
        match hits.len() {
            1 => Ok(hits.pop().expect("one hit")),
            0 => Err(UniversalError::NotFound(format!(
                "{} has no factor on {}",
                vdc.show_cell(phi),
                vdc.show_frame(source)
            ))),
            n => Err(UniversalError::NotUnique(format!(
                "{} has {n} factors on {}",
                vdc.show_cell(phi),
                vdc.show_frame(source)
            ))),
        }
    }

    /// `[@A] / (f, f) => h_B` for `f : A -> B`: the unit cell precomposed with `f`.
    pub fn vertical_cell(&self, f: VArrowId) -> Result<Cell, UniversalError> {
        let eta = self.find_unit(self.vdc.cod(f))?.structure_cell;
        Ok(self.vdc.whisker(&eta, f)?)
    }

    /// `[h_A] / (f, f) => h_B` for `f : A -> B`.
    pub fn unit_map(&self, f: VArrowId) -> Result<Cell, UniversalError> {
        let eta_a = self.find_unit(self.vdc.dom(f))?.structure_cell;
        let phi = self.vertical_cell(f)?;
        self.factor_through_inserted(&eta_a, 0, &phi)
    }

    /// `[h_A, J] => J` for `J : A -|> B`.
    pub fn left_unitor(&self, j: ProarrowId) -> Result<Cell, UniversalError> {
        let eta = self.find_unit(self.vdc.src(j))?.structure_cell;
        let id = self.vdc.identity_cell(j)?;
        self.factor_through_inserted(&eta, 0, &id)
    }

    /// `[J, h_B] => J` for `J : A -|> B`.
    pub fn right_unitor(&self, j: ProarrowId) -> Result<Cell, UniversalError> {
        let eta = self.find_unit(self.vdc.tgt(j))?.structure_cell;
        let id = self.vdc.identity_cell(j)?;
        self.factor_through_inserted(&eta, 1, &id)
    }

    /// `[h_A, h_A] => h_A`.
    pub fn multiplication(&self, a: ObjId) -> Result<Cell, UniversalError> {
        let h = self.find_unit(a)?.proarrow;
        self.right_unitor(h)
    }

    /// Companion and conjoint of `f` with their bends and kink identities.
    pub fn derive_bends(&self, f: VArrowId) -> Result<BendBundle, UniversalError> {
        let vdc = self.vdc;
        let (a, b) = (vdc.dom(f), vdc.cod(f));
        let (id_a, id_b) = (vdc.identity(a), vdc.identity(b));
        let h_b = self.find_unit(b)?.proarrow;
        let vert = self.vertical_cell(f)?;
        let mut companion = self.find_restriction(h_b, f, id_b)?;
        companion.kind = WitnessKind::Companion;
        let mut conjoint = self.find_restriction(h_b, id_b, f)?;
        conjoint.kind = WitnessKind::Conjoint;
        let companion_unit = self.factor_through_cartesian(&companion.structure_cell, &vert, id_a, f)?;
        let conjoint_unit = self.factor_through_cartesian(&conjoint.structure_cell, &vert, f, id_a)?;

        let mut report = VerificationReport::new(format!("kinks {}", vdc.arrow_name(f)));
        let mut kink = |name: &str, got: Result<Cell, UniversalError>, want: Cell| {
            report.tick();
            match got {
                Ok(c) if c == want => {}
                Ok(c) => report.fail(Counterexample::with_frames(
                    format!("{name}: got {}, expected {}", vdc.show_cell(&c), vdc.show_cell(&want)),
                    alloc::vec![c.frame, want.frame],
                )),
                Err(e) => report.fail_msg(format!("{name}: {e}")),
            }
        };
        let comp_vertical = vdc
            .paste(&companion.structure_cell, core::slice::from_ref(&companion_unit))
            .map_err(UniversalError::from);
        kink("companion vertical kink", comp_vertical, vert.clone());
        let conj_vertical = vdc
            .paste(&conjoint.structure_cell, core::slice::from_ref(&conjoint_unit))
            .map_err(UniversalError::from);
        kink("conjoint vertical kink", conj_vertical, vert);
        let comp_horizontal = self.right_unitor(companion.proarrow).and_then(|rho| {
            Ok(vdc.paste(
                &rho,
                &[companion_unit.clone(), companion.structure_cell.clone()],
            )?)
        });
        kink(
            "companion horizontal kink",
            comp_horizontal,
            vdc.identity_cell(companion.proarrow)?,
        );
        let conj_horizontal = self.left_unitor(conjoint.proarrow).and_then(|lambda| {
            Ok(vdc.paste(
                &lambda,
                &[conjoint.structure_cell.clone(), conjoint_unit.clone()],
            )?)
        });
        kink(
            "conjoint horizontal kink",
            conj_horizontal,
            vdc.identity_cell(conjoint.proarrow)?,
        );
        Ok(BendBundle {
            arrow: f,
            companion,
            companion_unit,
            conjoint,
            conjoint_unit,
            report,
        })
    }

    /// Cells `u : [J1] => J2` and `v : [J2] => J1` with identity verticals that
    /// are mutually inverse, if any.
    pub fn proarrow_iso(&self, j1: ProarrowId, j2: ProarrowId) -> Option<(Cell, Cell)> {
        let vdc = self.vdc;
        let (s, t) = (vdc.src(j1), vdc.tgt(j1));
        if (s, t) != (vdc.src(j2), vdc.tgt(j2)) {
            return None;
        }
        let (ids, idt) = (vdc.identity(s), vdc.identity(t));
        let p1 = Path::from_parts(s, alloc::vec![j1]);
        let p2 = Path::from_parts(s, alloc::vec![j2]);
        let id1 = vdc.identity_cell(j1).ok()?;
        let id2 = vdc.identity_cell(j2).ok()?;
        let us = self.cells(&p1, ids, idt, j2);
        let vs = self.cells(&p2, ids, idt, j1);
        for u in &us {
            for v in &vs {
                let vu = vdc.paste(v, core::slice::from_ref(u));
                let uv = vdc.paste(u, core::slice::from_ref(v));
                if vu.as_ref() == Ok(&id1) && uv.as_ref() == Ok(&id2) {
                    return Some((u.clone(), v.clone()));
                }
            }
        }
        None
    }

    /// Whether a cell `[J1] / (id, id) => J2` is invertible.
    pub fn is_invertible(&self, u: &Cell) -> bool {
        let vdc = self.vdc;
        let f = &u.frame;
        if f.domain.len() != 1
            || !vdc.vertical().is_identity(f.left)
            || !vdc.vertical().is_identity(f.right)
        {
            return false;
        }
        let j1 = f.domain.arrows()[0];
        let j2 = f.codomain;
        let (Ok(id1), Ok(id2)) = (vdc.identity_cell(j1), vdc.identity_cell(j2)) else {
            return false;
        };
        let p2 = Path::from_parts(vdc.src(j2), alloc::vec![j2]);
        self.cells(&p2, f.left, f.right, j1).iter().any(|v| {
            vdc.paste(v, core::slice::from_ref(u)).as_ref() == Ok(&id1)
                && vdc.paste(u, core::slice::from_ref(v)).as_ref() == Ok(&id2)
        })
    }
}

impl Frame {
    fn codomain_or_domain(&self, kind: WitnessKind) -> ProarrowId {
        match kind {
            WitnessKind::Restriction | WitnessKind::Companion | WitnessKind::Conjoint => {
                self.domain.arrows()[0]
            }
            WitnessKind::Unit | WitnessKind::Composite => self.codomain,
        }
    }
}

fn record(report: &mut VerificationReport, name: String, res: &Result<UniversalWitness, UniversalError>) {
    let mut child = VerificationReport::new(name);
    child.tick();
    match res {
        Ok(_) => {}
        Err(UniversalError::BoundsTooSmall(why)) => child.truncate(why.clone()),
        Err(e) => child.fail_msg(e.to_string()),
    }
    report.push(child);
}

/// Every object has a unit and every compatible triple a restriction.
pub fn check_equipment(vdc: &Vdc, bounds: SearchBounds) -> VerificationReport {
    let s = Searcher::new(vdc, bounds);
    check_equipment_with(&s)
}

pub fn check_equipment_with(s: &Searcher<'_>) -> VerificationReport {
    let vdc = s.vdc();
    let mut report = VerificationReport::new("equipment").with_bounds(s.bounds());
    for a in vdc.objects() {
        let res = s.find_unit(a);
        record(&mut report, format!("unit:{}", vdc.obj_name(a)), &res);
    }
    for k in vdc.proarrows() {
        for g in vdc.vertical().into_object(vdc.src(k)) {
            for f in vdc.vertical().into_object(vdc.tgt(k)) {
                let res = s.find_restriction(k, g, f);
                record(
                    &mut report,
                    format!(
                        "restriction:{},{},{}",
                        vdc.proarrow_name(k),
                        vdc.arrow_name(g),
                        vdc.arrow_name(f)
                    ),
                    &res,
                );
            }
        }
    }
    report
}

/// Check that `path` has a composite isomorphic to `expected`.
fn composite_is(
    s: &Searcher<'_>,
    report: &mut VerificationReport,
    name: String,
    path: Vec<ProarrowId>,
    expected: ProarrowId,
) {
    let vdc = s.vdc();
    let mut child = VerificationReport::new(name);
    child.tick();
    let path = match vdc.path(&path) {
        Ok(p) => p,
        Err(e) => {
            child.fail_msg(e.to_string());
            report.push(child);
            return;
        }
    };
    match s.find_composite(&path) {
        Ok(w) => {
            if s.proarrow_iso(w.proarrow, expected).is_none() {
                child.fail(Counterexample::with_frames(
                    format!(
                        "composite {} of {} is not isomorphic to {}",
                        vdc.proarrow_name(w.proarrow),
                        vdc.show_path(&path),
                        vdc.proarrow_name(expected)
                    ),
                    alloc::vec![w.structure_cell.frame],
                ));
            }
        }
        Err(UniversalError::BoundsTooSmall(why)) => child.truncate(why),
        Err(e) => child.fail_msg(e.to_string()),
    }
    report.push(child);
}

/// The lemmas about restrictions, companions and conjoints as composites, and
/// composites of composites, on every instantiable datum.
pub fn check_derived_lemmas(vdc: &Vdc, bounds: SearchBounds) -> VerificationReport {
    let s = Searcher::new(vdc, bounds);
    check_derived_lemmas_with(&s)
}

pub fn check_derived_lemmas_with(s: &Searcher<'_>) -> VerificationReport {
    let vdc = s.vdc();
    let mut report = VerificationReport::new("lemmas").with_bounds(s.bounds());
    let mut bends: BTreeMap<VArrowId, BendBundle> = BTreeMap::new();
    let mut bend_report = VerificationReport::new("bends");
    for f in vdc.arrows() {
        match s.derive_bends(f) {
            Ok(b) => {
                bend_report.push(b.report.clone());
                bends.insert(f, b);
            }
            Err(e) => bend_report.fail_msg(format!("bends of {}: {e}", vdc.arrow_name(f))),
        }
    }
    report.push(bend_report);
    let comp = |f: VArrowId| bends.get(&f).map(|b| b.companion.proarrow);
    let conj = |f: VArrowId| bends.get(&f).map(|b| b.conjoint.proarrow);
    let restrict = |k, g, f| s.find_restriction(k, g, f).ok().map(|w| w.proarrow);

    // K(g, f) is the composite of g_!, K and f^*.
    let mut rc = VerificationReport::new("restriction-as-composite");
    for k in vdc.proarrows() {
        for g in vdc.vertical().into_object(vdc.src(k)) {
            for f in vdc.vertical().into_object(vdc.tgt(k)) {
                let name = format!(
                    "{}({},{})",
                    vdc.proarrow_name(k),
                    vdc.arrow_name(g),
                    vdc.arrow_name(f)
                );
                match (comp(g), conj(f), restrict(k, g, f)) {
                    (Some(gc), Some(fc), Some(r)) => {
                        composite_is(s, &mut rc, name, alloc::vec![gc, k, fc], r)
                    }
                    _ => rc.fail_msg(format!("{name}: missing companion, conjoint or restriction")),
                }
            }
        }
    }
    report.push(rc);

    // x_! y^* is the composite h_A(x, y).
    let mut cc = VerificationReport::new("companion-conjoint-composite");
    for a in vdc.objects() {
        let Ok(h) = s.find_unit(a) else {
            cc.fail_msg(format!("no unit at {}", vdc.obj_name(a)));
            continue;
        };
        for x in vdc.vertical().into_object(a) {
            for y in vdc.vertical().into_object(a) {
                let name = format!("{}_! {}^*", vdc.arrow_name(x), vdc.arrow_name(y));
                match (comp(x), conj(y), restrict(h.proarrow, x, y)) {
                    (Some(xc), Some(yc), Some(r)) => composite_is(s, &mut cc, name, alloc::vec![xc, yc], r),
                    _ => cc.fail_msg(format!("{name}: missing data")),
                }
            }
        }
    }
    report.push(cc);

    // (g f)_! = f_! g_! and (g f)^* = g^* f^*.
    let mut ccc = VerificationReport::new("companions-of-composites");
    for f in vdc.arrows() {
        for g in vdc.arrows().filter(|g| vdc.dom(*g) == vdc.cod(f)) {
            let gf = vdc.compose(g, f).expect("composable");
            let name = format!("{} . {}", vdc.arrow_name(g), vdc.arrow_name(f));
            match (comp(f), comp(g), comp(gf)) {
                (Some(fc), Some(gc), Some(gfc)) => {
                    composite_is(s, &mut ccc, format!("companion {name}"), alloc::vec![fc, gc], gfc)
                }
                _ => ccc.fail_msg(format!("{name}: missing companions")),
            }
            match (conj(f), conj(g), conj(gf)) {
                (Some(fc), Some(gc), Some(gfc)) => {
                    composite_is(s, &mut ccc, format!("conjoint {name}"), alloc::vec![gc, fc], gfc)
                }
                _ => ccc.fail_msg(format!("{name}: missing conjoints")),
            }
        }
    }
    report.push(ccc);

    // Composites of composites: if M N = X and X O = Y then M N O = Y, with
    // structure cell w_Y(w_X, id_O); and symmetrically on the right.
    let mut vc = VerificationReport::new("composite-of-composites");
    let bounds = s.bounds();
    if bounds.max_path >= 3 {
        for p in paths_up_to(vdc, 3).into_iter().filter(|p| p.len() == 3) {
            let a = p.arrows();
            for split in [1usize, 2] {
                vc.tick();
                let (head, tail) = a.split_at(split);
                let inner_path = if split == 1 { tail } else { head };
                let Ok(inner) = vdc.path(inner_path).map_err(UniversalError::from).and_then(|ip| s.find_composite(&ip)) else {
                    vc.fail_msg(format!("no composite of a subpath of {}", vdc.show_path(&p)));
                    continue;
                };
                let outer_arrows: Vec<ProarrowId> = if split == 1 {
                    alloc::vec![head[0], inner.proarrow]
                } else {
                    alloc::vec![inner.proarrow, tail[0]]
                };
                let Ok(outer) = vdc.path(&outer_arrows).map_err(UniversalError::from).and_then(|op| s.find_composite(&op)) else {
                    vc.fail_msg(format!("no composite of the outer path for {}", vdc.show_path(&p)));
                    continue;
                };
                let inners = if split == 1 {
                    alloc::vec![vdc.identity_cell(head[0]).expect("own"), inner.structure_cell.clone()]
                } else {
                    alloc::vec![inner.structure_cell.clone(), vdc.identity_cell(tail[0]).expect("own")]
                };
                match vdc.paste(&outer.structure_cell, &inners) {
                    Ok(w) => {
                        let r = s.check_insertion(&w);
                        if !r.passed() {
                            let mut r = r;
                            r.name = format!("{} split {split}", vdc.show_path(&p));
                            vc.push(r);
                        }
                    }
                    Err(e) => vc.fail_msg(format!("{}: {e}", vdc.show_path(&p))),
                }
            }
        }
    } else {
        vc.truncate("needs paths of length 3");
    }
    report.push(vc);

    // Several companions on top and conjoints at the bottom: the composite is
    // the restriction along the composite arrows.
    let mut mixed = VerificationReport::new("companions-and-conjoints");
    for k in vdc.proarrows() {
        for g1 in vdc.vertical().into_object(vdc.src(k)) {
            for g0 in vdc.vertical().into_object(vdc.dom(g1)) {
                let g = vdc.compose(g1, g0).expect("composable");
                let id_t = vdc.identity(vdc.tgt(k));
                let name = format!(
                    "{}_! {}_! {}",
                    vdc.arrow_name(g0),
                    vdc.arrow_name(g1),
                    vdc.proarrow_name(k)
                );
                match (comp(g0), comp(g1), restrict(k, g, id_t)) {
                    (Some(c0), Some(c1), Some(r)) => {
                        composite_is(s, &mut mixed, name, alloc::vec![c0, c1, k], r)
                    }
                    _ => mixed.fail_msg(format!("{name}: missing data")),
                }
            }
        }
        for f1 in vdc.vertical().into_object(vdc.tgt(k)) {
            for f0 in vdc.vertical().into_object(vdc.dom(f1)) {
                let f = vdc.compose(f1, f0).expect("composable");
                let id_s = vdc.identity(vdc.src(k));
                let name = format!(
                    "{} {}^* {}^*",
                    vdc.proarrow_name(k),
                    vdc.arrow_name(f1),
                    vdc.arrow_name(f0)
                );
                match (conj(f1), conj(f0), restrict(k, id_s, f)) {
                    (Some(c1), Some(c0), Some(r)) => {
                        composite_is(s, &mut mixed, name, alloc::vec![k, c1, c0], r)
                    }
                    _ => mixed.fail_msg(format!("{name}: missing data")),
                }
            }
        }
    }
    report.push(mixed);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{b2, f1};
    use crate::Status;

    #[test]
    fn composites_with_equal_summaries_keep_their_own_domains() {
        let m = b2();
        let v = m.vdc();
        let s = Searcher::new(v, SearchBounds::universal());
        // Both products are the all-ones matrix on V.
        let (vu, uv) = (v.find_proarrow("VU_11").unwrap(), v.find_proarrow("UV_11").unwrap());
        let top = v.find_proarrow("VV_1111").unwrap();
        let p = v.path(&[vu, uv]).unwrap();
        let q = v.path(&[top, top]).unwrap();
        let wp = s.find_composite(&p).unwrap();
        let wq = s.find_composite(&q).unwrap();
        assert_eq!(wp.proarrow, top);
        assert_eq!(wq.proarrow, top);
        assert_eq!(wp.structure_cell.frame.domain, p);
        assert_eq!(wq.structure_cell.frame.domain, q);
        assert!(v.contains(&wq.structure_cell));
        assert!(s.check_insertion(&wq.structure_cell).passed());
    }

    #[test]
    fn f1_has_no_unit() {
        let v = f1();
        let s = Searcher::new(&v, SearchBounds::universal());
        let a = v.find_object("A").unwrap();
        assert!(matches!(s.find_unit(a), Err(UniversalError::NotFound(_))));
    }

    #[test]
    fn cartesian_cells_and_isos_on_b2() {
        let m = b2();
        let v = m.vdc();
        let s = Searcher::new(v, SearchBounds::universal());
        let k = v.find_proarrow("VV_1101").unwrap();
        let swap = v.find_arrow("VtoV_10").unwrap();
        let id = v.identity(v.find_object("V").unwrap());
        let w = s.find_restriction(k, swap, id).unwrap();
        let (cartesian, report) = s.is_cartesian(&w.structure_cell);
        assert!(cartesian, "{report:?}");
        assert!(s.proarrow_iso(k, k).is_some());
        assert!(s.proarrow_iso(k, w.proarrow).is_none());
        assert!(s.is_invertible(&v.identity_cell(k).unwrap()));
    }

    #[test]
    fn tiny_work_budget_truncates_instead_of_failing() {
        let m = b2();
        let s = Searcher::new(m.vdc(), SearchBounds::universal().with_work(10));
        let r = check_equipment_with(&s);
        assert_eq!(r.status, Status::Truncated, "{:?}", r.first_failure());
    }
}
