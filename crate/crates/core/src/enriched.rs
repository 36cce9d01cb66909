//! Categories, functors, profunctors and profunctor morphisms enriched in a
//! virtual equipment, their law checkers, and finite fragments of the virtual
//! equipment they form.
//!
//! All structure cells live in the base equipment `E`, passed explicitly to
//! every operation. Objects of an enriched category are indices `0..size`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use thiserror::Error;

use crate::bounds::SearchBounds;
use crate::report::{Counterexample, VerificationReport};
use crate::universal::{Searcher, UniversalError};
use crate::vdc::{
    Cell, CellId, Frame, ObjId, PasteResolver, Path, ProarrowId, VArrowId, Vdc, VdcBuilder, VdcError,
};

/// Candidate families examined by [`materialize_vcat`] before giving up.
pub const MAX_CANDIDATE_FAMILIES: u64 = 1_000_000;

/// Vertical arrows a fragment may generate under composition.
pub const MAX_FRAGMENT_ARROWS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnrichedError {
    #[error("not composable: {0}")]
    NonComposable(String),
    #[error("malformed: {0}")]
    Malformed(String),
    #[error("laws fail: {0}")]
    LawViolation(String),
    #[error("FragmentTooLarge: {0}")]
    FragmentTooLarge(String),
    #[error(transparent)]
    Universal(#[from] UniversalError),
    #[error(transparent)]
    Vdc(#[from] VdcError),
}

fn same<T: PartialEq>(a: &Arc<T>, b: &Arc<T>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A category enriched in the base: objects with extents, hom proarrows, and
/// identity and composition cells.
#[derive(Debug, Clone)]
pub struct EnrichedCategory {
    pub name: String,
    pub objects: Vec<String>,
    pub extent: Vec<ObjId>,
    /// `hom(x, y)` at `x * size + y`.
    pub hom: Vec<ProarrowId>,
    /// `[@extent(x)] / (id, id) => hom(x, x)`.
    pub id_cell: Vec<Cell>,
    /// `[hom(x, y), hom(y, z)] / (id, id) => hom(x, z)` at `(x * size + y) * size + z`.
    pub comp_cell: Vec<Cell>,
}

impl PartialEq for EnrichedCategory {
    fn eq(&self, other: &Self) -> bool {
        self.extent == other.extent
            && self.hom == other.hom
            && self.id_cell == other.id_cell
            && self.comp_cell == other.comp_cell
    }
}

impl EnrichedCategory {
    pub fn size(&self) -> usize {
        self.objects.len()
    }

    pub fn hom(&self, x: usize, y: usize) -> ProarrowId {
        self.hom[x * self.size() + y]
    }

    pub fn id(&self, x: usize) -> &Cell {
        &self.id_cell[x]
    }

    pub fn comp(&self, x: usize, y: usize, z: usize) -> &Cell {
        let n = self.size();
        &self.comp_cell[(x * n + y) * n + z]
    }

    pub fn object(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }
}

/// A functor between enriched categories. `structure(x)` is the base arrow
/// `extent(x) -> extent(F x)`.
#[derive(Debug, Clone)]
pub struct EnrichedFunctor {
    pub name: String,
    pub source: Arc<EnrichedCategory>,
    pub target: Arc<EnrichedCategory>,
    pub on_objects: Vec<usize>,
    pub structure: Vec<VArrowId>,
    /// `[hom(x, y)] / (s x, s y) => hom(F x, F y)` at `x * size + y`.
    pub on_homs: Vec<Cell>,
}

impl PartialEq for EnrichedFunctor {
    fn eq(&self, other: &Self) -> bool {
        same(&self.source, &other.source)
            && same(&self.target, &other.target)
            && self.on_objects == other.on_objects
            && self.structure == other.structure
            && self.on_homs == other.on_homs
    }
}

impl EnrichedFunctor {
    pub fn on_hom(&self, x: usize, y: usize) -> &Cell {
        &self.on_homs[x * self.source.size() + y]
    }

    pub fn identity(e: &Vdc, c: &Arc<EnrichedCategory>) -> Result<Self, EnrichedError> {
        let n = c.size();
        let mut on_homs = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                on_homs.push(e.identity_cell(c.hom(x, y))?);
            }
        }
        Ok(EnrichedFunctor {
            name: format!("id_{}", c.name),
            source: c.clone(),
            target: c.clone(),
            on_objects: (0..n).collect(),
            structure: c.extent.iter().map(|a| e.identity(*a)).collect(),
            on_homs,
        })
    }

    /// Whether every structure arrow is an identity.
    pub fn preserves_extent(&self, e: &Vdc) -> bool {
        self.structure.iter().all(|s| e.vertical().is_identity(*s))
    }
}

/// `h . f`.
pub fn compose_functors(e: &Vdc, h: &EnrichedFunctor, f: &EnrichedFunctor) -> Result<EnrichedFunctor, EnrichedError> {
    if !same(&f.target, &h.source) {
        return Err(EnrichedError::NonComposable(format!(
            "{} . {}: {} is not {}",
            h.name, f.name, f.target.name, h.source.name
        )));
    }
    let n = f.source.size();
    let structure = (0..n)
        .map(|x| {
            e.compose(h.structure[f.on_objects[x]], f.structure[x])
                .ok_or_else(|| EnrichedError::Malformed(format!("structure arrows of {} . {}", h.name, f.name)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut on_homs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let hf = h.on_hom(f.on_objects[x], f.on_objects[y]);
            on_homs.push(e.paste(hf, core::slice::from_ref(f.on_hom(x, y)))?);
        }
    }
    Ok(EnrichedFunctor {
        name: format!("{}.{}", h.name, f.name),
        source: f.source.clone(),
        target: h.target.clone(),
        on_objects: (0..n).map(|x| h.on_objects[f.on_objects[x]]).collect(),
        structure,
        on_homs,
    })
}

/// A profunctor `C -|> D`: components `J(x, u) : extent(x) -|> extent(u)`
/// with a left action of `C` and a right action of `D`.
#[derive(Debug, Clone)]
pub struct EnrichedProfunctor {
    pub name: String,
    pub source: Arc<EnrichedCategory>,
    pub target: Arc<EnrichedCategory>,
    /// `J(x, u)` at `x * |D| + u`.
    pub component: Vec<ProarrowId>,
    /// `[hom(x, y), J(y, u)] => J(x, u)` at `(x * |C| + y) * |D| + u`.
    pub left_action: Vec<Cell>,
    /// `[J(x, u), hom(u, v)] => J(x, v)` at `(x * |D| + u) * |D| + v`.
    pub right_action: Vec<Cell>,
}

impl PartialEq for EnrichedProfunctor {
    fn eq(&self, other: &Self) -> bool {
        same(&self.source, &other.source)
            && same(&self.target, &other.target)
            && self.component == other.component
            && self.left_action == other.left_action
            && self.right_action == other.right_action
    }
}

impl EnrichedProfunctor {
    pub fn component(&self, x: usize, u: usize) -> ProarrowId {
        self.component[x * self.target.size() + u]
    }

    pub fn left(&self, x: usize, y: usize, u: usize) -> &Cell {
        let (c, d) = (self.source.size(), self.target.size());
        &self.left_action[(x * c + y) * d + u]
    }

    pub fn right(&self, x: usize, u: usize, v: usize) -> &Cell {
        let d = self.target.size();
        &self.right_action[(x * d + u) * d + v]
    }

    /// Over a thin base a profunctor is determined by its components: each
    /// action cell is the unique cell on its frame. Fails when a frame has no
    /// cell, that is when the components admit no actions.
    pub fn thin(
        e: &Vdc,
        name: impl Into<String>,
        source: Arc<EnrichedCategory>,
        target: Arc<EnrichedCategory>,
        component: Vec<ProarrowId>,
    ) -> Result<Self, EnrichedError> {
        if !e.is_thin() {
            return Err(EnrichedError::Malformed(format!("{} is not thin", e.name())));
        }
        let (nc, nd) = (source.size(), target.size());
        if component.len() != nc * nd {
            return Err(EnrichedError::Malformed("component table size does not match the object counts".into()));
        }
        let at = |x: usize, u: usize| component[x * nd + u];
        let cell = |frame: Frame| {
            if e.contains(&Cell::thin(frame.clone())) {
                Ok(Cell::thin(frame))
            } else {
                Err(EnrichedError::LawViolation(format!("no action cell on {}", e.show_frame(&frame))))
            }
        };
        let mut left_action = Vec::with_capacity(nc * nc * nd);
        for x in 0..nc {
            for y in 0..nc {
                for u in 0..nd {
                    left_action.push(cell(unit_frame(e, at(x, u), pair(e, source.hom(x, y), at(y, u))))?);
                }
            }
        }
        let mut right_action = Vec::with_capacity(nc * nd * nd);
        for x in 0..nc {
            for u in 0..nd {
                for v in 0..nd {
                    right_action.push(cell(unit_frame(e, at(x, v), pair(e, at(x, u), target.hom(u, v))))?);
                }
            }
        }
        Ok(EnrichedProfunctor {
            name: name.into(),
            source,
            target,
            component,
            left_action,
            right_action,
        })
    }

    /// The hom profunctor `C -|> C`, acting by composition.
    pub fn hom(c: &Arc<EnrichedCategory>) -> Self {
        let n = c.size();
        let mut left = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for u in 0..n {
                    left.push(c.comp(x, y, u).clone());
                }
            }
        }
        EnrichedProfunctor {
            name: format!("hom_{}", c.name),
            source: c.clone(),
            target: c.clone(),
            component: c.hom.clone(),
            right_action: left.clone(),
            left_action: left,
        }
    }
}

/// A cell of enriched categories: a family of base cells indexed by object
/// tuples `(c0, ..., ck)` along the chain of domain profunctors.
#[derive(Debug, Clone)]
pub struct ProMorphism {
    pub name: String,
    pub domain: Vec<Arc<EnrichedProfunctor>>,
    /// First category of the chain; the only one when the domain is empty.
    pub anchor: Arc<EnrichedCategory>,
    pub codomain: Arc<EnrichedProfunctor>,
    pub left: Arc<EnrichedFunctor>,
    pub right: Arc<EnrichedFunctor>,
    /// Indexed in mixed radix, `c0` most significant.
    pub components: Vec<Cell>,
}

impl PartialEq for ProMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.domain.len() == other.domain.len()
            && self.domain.iter().zip(&other.domain).all(|(a, b)| same(a, b))
            && same(&self.anchor, &other.anchor)
            && same(&self.codomain, &other.codomain)
            && same(&self.left, &other.left)
            && same(&self.right, &other.right)
            && self.components == other.components
    }
}

/// Mixed-radix enumeration of object tuples.
#[derive(Debug, Clone)]
pub struct Tuples {
    radices: Vec<usize>,
}

impl Tuples {
    pub fn new(radices: Vec<usize>) -> Self {
        Tuples { radices }
    }

    pub fn count(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn index(&self, t: &[usize]) -> usize {
        t.iter().zip(&self.radices).fold(0, |acc, (c, r)| acc * r + c)
    }

    pub fn tuple(&self, mut i: usize) -> Vec<usize> {
        let mut t = alloc::vec![0; self.radices.len()];
        for (slot, r) in t.iter_mut().zip(&self.radices).rev() {
            *slot = i % r;
            i /= r;
        }
        t
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.count()).map(|i| self.tuple(i))
    }
}

impl ProMorphism {
    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    /// Categories `C0, ..., Ck` along the domain.
    pub fn chain(&self) -> Vec<Arc<EnrichedCategory>> {
        chain_of(&self.anchor, &self.domain)
    }

    pub fn tuples(&self) -> Tuples {
        Tuples::new(self.chain().iter().map(|c| c.size()).collect())
    }

    pub fn component(&self, t: &[usize]) -> &Cell {
        let mut i = t[0];
        for (j, c) in self.domain.iter().zip(&t[1..]) {
            i = i * j.target.size() + c;
        }
        &self.components[i]
    }

    /// The frame the component at `t` must have.
    pub fn component_frame(&self, e: &Vdc, t: &[usize]) -> Frame {
        component_frame(e, &self.anchor, &self.domain, &self.codomain, &self.left, &self.right, t)
    }

    /// The identity morphism of `j`: every component is an identity cell.
    pub fn identity(e: &Vdc, j: &Arc<EnrichedProfunctor>) -> Result<Self, EnrichedError> {
        let left = Arc::new(EnrichedFunctor::identity(e, &j.source)?);
        let right = Arc::new(EnrichedFunctor::identity(e, &j.target)?);
        let mut components = Vec::new();
        for x in 0..j.source.size() {
            for u in 0..j.target.size() {
                components.push(e.identity_cell(j.component(x, u))?);
            }
        }
        Ok(ProMorphism {
            name: format!("id_{}", j.name),
            domain: alloc::vec![j.clone()],
            anchor: j.source.clone(),
            codomain: j.clone(),
            left,
            right,
            components,
        })
    }
}

fn chain_of(anchor: &Arc<EnrichedCategory>, domain: &[Arc<EnrichedProfunctor>]) -> Vec<Arc<EnrichedCategory>> {
    let mut out = alloc::vec![anchor.clone()];
    out.extend(domain.iter().map(|j| j.target.clone()));
    out
}

fn component_frame(
    e: &Vdc,
    anchor: &EnrichedCategory,
    domain: &[Arc<EnrichedProfunctor>],
    codomain: &EnrichedProfunctor,
    left: &EnrichedFunctor,
    right: &EnrichedFunctor,
    t: &[usize],
) -> Frame {
    let arrows: Vec<ProarrowId> = domain
        .iter()
        .enumerate()
        .map(|(i, j)| j.component(t[i], t[i + 1]))
        .collect();
    let (c0, ck) = (t[0], t[t.len() - 1]);
    let start = match arrows.first() {
        Some(j) => e.src(*j),
        None => anchor.extent[c0],
    };
    Frame {
        domain: Path::from_parts(start, arrows),
        left: left.structure[c0],
        right: right.structure[ck],
        codomain: codomain.component(left.on_objects[c0], right.on_objects[ck]),
    }
}

struct Equations<'a> {
    e: &'a Vdc,
    report: VerificationReport,
}

impl<'a> Equations<'a> {
    fn new(e: &'a Vdc, name: impl Into<String>) -> Self {
        Equations {
            e,
            report: VerificationReport::new(name),
        }
    }

    fn frame(&mut self, what: &dyn Fn() -> String, cell: &Cell, expected: &Frame) {
        self.report.tick();
        if cell.frame != *expected {
            self.report.fail(Counterexample::with_frames(
                format!(
                    "{}: frame {} should be {}",
                    what(),
                    self.e.show_frame(&cell.frame),
                    self.e.show_frame(expected)
                ),
                alloc::vec![cell.frame.clone(), expected.clone()],
            ));
        } else if !self.e.contains(cell) {
            self.report.fail_msg(format!("{}: {} is not a cell of the base", what(), self.e.show_cell(cell)));
        }
    }

    fn equal(&mut self, what: &dyn Fn() -> String, lhs: Result<Cell, VdcError>, rhs: Result<Cell, VdcError>) {
        self.report.tick();
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(a), Ok(b)) => self.report.fail(Counterexample::with_frames(
                format!("{}: {} differs from {}", what(), self.e.show_cell(&a), self.e.show_cell(&b)),
                alloc::vec![a.frame, b.frame],
            )),
            (Err(err), _) | (_, Err(err)) => self.report.fail_msg(format!("{}: {err}", what())),
        }
    }

    fn finish(self) -> VerificationReport {
        self.report
    }
}

fn unit_frame(e: &Vdc, j: ProarrowId, domain: Path) -> Frame {
    Frame {
        left: e.identity(e.src(j)),
        right: e.identity(e.tgt(j)),
        codomain: j,
        domain,
    }
}

fn pair(e: &Vdc, a: ProarrowId, b: ProarrowId) -> Path {
    Path::from_parts(e.src(a), alloc::vec![a, b])
}

/// Unit and associativity laws over all object pairs and triples.
pub fn check_category_laws(e: &Vdc, c: &EnrichedCategory) -> VerificationReport {
    let n = c.size();
    let mut eq = Equations::new(e, format!("category {}", c.name));
    if c.extent.len() != n || c.hom.len() != n * n || c.id_cell.len() != n || c.comp_cell.len() != n * n * n {
        eq.report.fail_msg("table sizes do not match the object count");
        return eq.finish();
    }
    for x in 0..n {
        for y in 0..n {
            let h = c.hom(x, y);
            if e.src(h) != c.extent[x] || e.tgt(h) != c.extent[y] {
                eq.report
                    .fail_msg(format!("hom({x}, {y}) = {} has the wrong ends", e.proarrow_name(h)));
                return eq.finish();
            }
        }
    }
    for x in 0..n {
        let expected = unit_frame(e, c.hom(x, x), Path::empty(c.extent[x]));
        eq.frame(&|| format!("id({})", c.objects[x]), c.id(x), &expected);
        for y in 0..n {
            for z in 0..n {
                let expected = unit_frame(e, c.hom(x, z), pair(e, c.hom(x, y), c.hom(y, z)));
                eq.frame(
                    &|| format!("comp({}, {}, {})", c.objects[x], c.objects[y], c.objects[z]),
                    c.comp(x, y, z),
                    &expected,
                );
            }
        }
    }
    if !eq.report.passed() {
        return eq.finish();
    }
    for x in 0..n {
        for y in 0..n {
            let id_xy = e.identity_cell(c.hom(x, y));
            let Ok(id_xy) = id_xy else { continue };
            eq.equal(
                &|| format!("left unit at ({}, {})", c.objects[x], c.objects[y]),
                e.paste(c.comp(x, x, y), &[c.id(x).clone(), id_xy.clone()]),
                Ok(id_xy.clone()),
            );
            eq.equal(
                &|| format!("right unit at ({}, {})", c.objects[x], c.objects[y]),
                e.paste(c.comp(x, y, y), &[id_xy.clone(), c.id(y).clone()]),
                Ok(id_xy),
            );
        }
    }
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (Ok(id_yz), Ok(id_wx)) = (e.identity_cell(c.hom(y, z)), e.identity_cell(c.hom(w, x))) else {
                        continue;
                    };
                    eq.equal(
                        &|| {
                            format!(
                                "associativity at ({}, {}, {}, {})",
                                c.objects[w], c.objects[x], c.objects[y], c.objects[z]
                            )
                        },
                        e.paste(c.comp(w, y, z), &[c.comp(w, x, y).clone(), id_yz]),
                        e.paste(c.comp(w, x, z), &[id_wx, c.comp(x, y, z).clone()]),
                    );
                }
            }
        }
    }
    eq.finish()
}

/// Identity and composition preservation over all objects and pairs.
pub fn check_functor_laws(e: &Vdc, f: &EnrichedFunctor) -> VerificationReport {
    let (c, d) = (&f.source, &f.target);
    let n = c.size();
    let mut eq = Equations::new(e, format!("functor {}", f.name));
    if f.on_objects.len() != n || f.structure.len() != n || f.on_homs.len() != n * n {
        eq.report.fail_msg("table sizes do not match the object count");
        return eq.finish();
    }
    if f.on_objects.iter().any(|y| *y >= d.size()) {
        eq.report.fail_msg("object image out of range");
        return eq.finish();
    }
    for x in 0..n {
        let s = f.structure[x];
        if e.dom(s) != c.extent[x] || e.cod(s) != d.extent[f.on_objects[x]] {
            eq.report.fail_msg(format!(
                "structure arrow {} at {} has the wrong ends",
                e.arrow_name(s),
                c.objects[x]
            ));
            return eq.finish();
        }
    }
    for x in 0..n {
        for y in 0..n {
            let expected = Frame {
                domain: Path::from_parts(c.extent[x], alloc::vec![c.hom(x, y)]),
                left: f.structure[x],
                right: f.structure[y],
                codomain: d.hom(f.on_objects[x], f.on_objects[y]),
            };
            eq.frame(&|| format!("on_homs({}, {})", c.objects[x], c.objects[y]), f.on_hom(x, y), &expected);
        }
    }
    if !eq.report.passed() {
        return eq.finish();
    }
    for x in 0..n {
        let fx = f.on_objects[x];
        eq.equal(
            &|| format!("identity at {}", c.objects[x]),
            e.paste(f.on_hom(x, x), core::slice::from_ref(c.id(x))),
            e.whisker(d.id(fx), f.structure[x]),
        );
        for y in 0..n {
            for z in 0..n {
                let (fy, fz) = (f.on_objects[y], f.on_objects[z]);
                eq.equal(
                    &|| format!("composition at ({}, {}, {})", c.objects[x], c.objects[y], c.objects[z]),
                    e.paste(f.on_hom(x, z), core::slice::from_ref(c.comp(x, y, z))),
                    e.paste(d.comp(fx, fy, fz), &[f.on_hom(x, y).clone(), f.on_hom(y, z).clone()]),
                );
            }
        }
    }
    eq.finish()
}

/// Unit, associativity and exchange laws of both actions.
pub fn check_profunctor_laws(e: &Vdc, j: &EnrichedProfunctor) -> VerificationReport {
    let (c, d) = (&j.source, &j.target);
    let (nc, nd) = (c.size(), d.size());
    let mut eq = Equations::new(e, format!("profunctor {}", j.name));
    if j.component.len() != nc * nd || j.left_action.len() != nc * nc * nd || j.right_action.len() != nc * nd * nd {
        eq.report.fail_msg("table sizes do not match the object counts");
        return eq.finish();
    }
    for x in 0..nc {
        for u in 0..nd {
            let p = j.component(x, u);
            if e.src(p) != c.extent[x] || e.tgt(p) != d.extent[u] {
                eq.report.fail_msg(format!(
                    "component ({}, {}) = {} has the wrong ends",
                    c.objects[x],
                    d.objects[u],
                    e.proarrow_name(p)
                ));
                return eq.finish();
            }
        }
    }
    for x in 0..nc {
        for u in 0..nd {
            for y in 0..nc {
                let expected = unit_frame(e, j.component(x, u), pair(e, c.hom(x, y), j.component(y, u)));
                eq.frame(
                    &|| format!("left action ({}, {}, {})", c.objects[x], c.objects[y], d.objects[u]),
                    j.left(x, y, u),
                    &expected,
                );
            }
            for v in 0..nd {
                let expected = unit_frame(e, j.component(x, v), pair(e, j.component(x, u), d.hom(u, v)));
                eq.frame(
                    &|| format!("right action ({}, {}, {})", c.objects[x], d.objects[u], d.objects[v]),
                    j.right(x, u, v),
                    &expected,
                );
            }
        }
    }
    if !eq.report.passed() {
        return eq.finish();
    }
    let idc = |p: ProarrowId| e.identity_cell(p).expect("own proarrow");
    for x in 0..nc {
        for u in 0..nd {
            let id_xu = idc(j.component(x, u));
            eq.equal(
                &|| format!("left unit at ({}, {})", c.objects[x], d.objects[u]),
                e.paste(j.left(x, x, u), &[c.id(x).clone(), id_xu.clone()]),
                Ok(id_xu.clone()),
            );
            eq.equal(
                &|| format!("right unit at ({}, {})", c.objects[x], d.objects[u]),
                e.paste(j.right(x, u, u), &[id_xu.clone(), d.id(u).clone()]),
                Ok(id_xu),
            );
        }
    }
    for w in 0..nc {
        for x in 0..nc {
            for y in 0..nc {
                for u in 0..nd {
                    eq.equal(
                        &|| {
                            format!(
                                "left associativity at ({}, {}, {}, {})",
                                c.objects[w], c.objects[x], c.objects[y], d.objects[u]
                            )
                        },
                        e.paste(j.left(w, y, u), &[c.comp(w, x, y).clone(), idc(j.component(y, u))]),
                        e.paste(j.left(w, x, u), &[idc(c.hom(w, x)), j.left(x, y, u).clone()]),
                    );
                }
            }
        }
    }
    for x in 0..nc {
        for u in 0..nd {
            for v in 0..nd {
                for w in 0..nd {
                    eq.equal(
                        &|| {
                            format!(
                                "right associativity at ({}, {}, {}, {})",
                                c.objects[x], d.objects[u], d.objects[v], d.objects[w]
                            )
                        },
                        e.paste(j.right(x, v, w), &[j.right(x, u, v).clone(), idc(d.hom(v, w))]),
                        e.paste(j.right(x, u, w), &[idc(j.component(x, u)), d.comp(u, v, w).clone()]),
                    );
                }
            }
        }
    }
    for x in 0..nc {
        for y in 0..nc {
            for u in 0..nd {
                for v in 0..nd {
                    eq.equal(
                        &|| {
                            format!(
                                "exchange at ({}, {}, {}, {})",
                                c.objects[x], c.objects[y], d.objects[u], d.objects[v]
                            )
                        },
                        e.paste(j.right(x, u, v), &[j.left(x, y, u).clone(), idc(d.hom(u, v))]),
                        e.paste(j.left(x, y, v), &[idc(c.hom(x, y)), j.right(y, u, v).clone()]),
                    );
                }
            }
        }
    }
    eq.finish()
}

/// Compatibility with the actions: inner actions are equalised, outer actions
/// match the actions of the codomain through the functors. A morphism with
/// empty domain is checked for naturality instead.
pub fn check_morphism_laws(e: &Vdc, m: &ProMorphism) -> VerificationReport {
    let mut eq = Equations::new(e, format!("morphism {}", m.name));
    let chain = m.chain();
    let k = m.arity();
    let (f, g, kp) = (&m.left, &m.right, &m.codomain);
    for (i, j) in m.domain.iter().enumerate() {
        if !same(&j.source, &chain[i]) {
            eq.report.fail_msg(format!("domain profunctors {} and {} do not chain", i, i + 1));
            return eq.finish();
        }
    }
    if !same(&f.source, &chain[0]) || !same(&g.source, &chain[k]) {
        eq.report.fail_msg("functors do not start at the ends of the domain");
        return eq.finish();
    }
    if !same(&f.target, &kp.source) || !same(&g.target, &kp.target) {
        eq.report.fail_msg("functors do not end at the ends of the codomain");
        return eq.finish();
    }
    let tuples = m.tuples();
    if m.components.len() != tuples.count() {
        eq.report.fail_msg(format!(
            "{} components for {} object tuples",
            m.components.len(),
            tuples.count()
        ));
        return eq.finish();
    }
    let show = |t: &[usize]| -> String {
        let names: Vec<&str> = t.iter().enumerate().map(|(i, c)| chain[i].objects[*c].as_str()).collect();
        format!("({})", names.join(", "))
    };
    for t in tuples.iter() {
        let expected = m.component_frame(e, &t);
        eq.frame(&|| format!("component at {}", show(&t)), m.component(&t), &expected);
    }
    if !eq.report.passed() {
        return eq.finish();
    }
    let ids = |t: &[usize]| -> Vec<Cell> {
        m.domain
            .iter()
            .enumerate()
            .map(|(i, j)| e.identity_cell(j.component(t[i], t[i + 1])).expect("own proarrow"))
            .collect()
    };
    if k == 0 {
        let c = &chain[0];
        for x in 0..c.size() {
            for y in 0..c.size() {
                let (fx, fy, gx, gy) = (f.on_objects[x], f.on_objects[y], g.on_objects[x], g.on_objects[y]);
                eq.equal(
                    &|| format!("naturality at ({}, {})", c.objects[x], c.objects[y]),
                    e.paste(kp.left(fx, fy, gy), &[f.on_hom(x, y).clone(), m.component(&[y]).clone()]),
                    e.paste(kp.right(fx, gx, gy), &[m.component(&[x]).clone(), g.on_hom(x, y).clone()]),
                );
            }
        }
        return eq.finish();
    }
    for t in tuples.iter() {
        // Inner objects: moving c_i along hom(u, v) through J_i or J_{i+1}.
        for i in 1..k {
            let v = t[i];
            for u in 0..chain[i].size() {
                let mut tu = t.clone();
                tu[i] = u;
                let mut lhs_inners = ids(&t);
                lhs_inners[i - 1] = m.domain[i - 1].right(t[i - 1], u, v).clone();
                let mut rhs_inners = ids(&tu);
                rhs_inners[i] = m.domain[i].left(u, v, t[i + 1]).clone();
                let lhs = e.paste(m.component(&t), &lhs_inners);
                let rhs = e.paste(m.component(&tu), &rhs_inners);
                eq.equal(
                    &|| format!("inner law at {} moving position {i} from {}", show(&t), chain[i].objects[u]),
                    lhs,
                    rhs,
                );
            }
        }
        // Left end: F's action against J_1's left action.
        let c0 = t[0];
        let ck = t[k];
        for x in 0..chain[0].size() {
            let mut tx = t.clone();
            tx[0] = x;
            let mut inners = ids(&t);
            inners.remove(0);
            let mut rhs_inners = alloc::vec![m.domain[0].left(x, c0, t[1]).clone()];
            rhs_inners.extend(inners);
            eq.equal(
                &|| format!("left law at {} from {}", show(&t), chain[0].objects[x]),
                e.paste(
                    kp.left(f.on_objects[x], f.on_objects[c0], g.on_objects[ck]),
                    &[f.on_hom(x, c0).clone(), m.component(&t).clone()],
                ),
                e.paste(m.component(&tx), &rhs_inners),
            );
        }
        // Right end: G's action against J_k's right action.
        for y in 0..chain[k].size() {
            let mut ty = t.clone();
            ty[k] = y;
            let mut rhs_inners = ids(&t);
            rhs_inners.pop();
            rhs_inners.push(m.domain[k - 1].right(t[k - 1], ck, y).clone());
            eq.equal(
                &|| format!("right law at {} to {}", show(&t), chain[k].objects[y]),
                e.paste(
                    kp.right(f.on_objects[c0], g.on_objects[ck], g.on_objects[y]),
                    &[m.component(&t).clone(), g.on_hom(ck, y).clone()],
                ),
                e.paste(m.component(&ty), &rhs_inners),
            );
        }
    }
    eq.finish()
}

/// The component tuple of the outer morphism and the tuples of the inners,
/// for a tuple `t` along the concatenated chain.
fn split_tuple(
    inners: &[&ProMorphism],
    rights: &[&EnrichedFunctor],
    t: &[usize],
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut outer = alloc::vec![0; inners.len() + 1];
    let mut parts = Vec::with_capacity(inners.len());
    let mut at = 0;
    for (i, m) in inners.iter().enumerate() {
        let k = m.arity();
        parts.push(t[at..=at + k].to_vec());
        if i == 0 {
            outer[0] = m.left.on_objects[t[at]];
        }
        outer[i + 1] = rights[i].on_objects[t[at + k]];
        at += k;
    }
    (outer, parts)
}

fn check_chain(outer: &ProMorphism, inners: &[ProMorphism]) -> Result<(), EnrichedError> {
    if inners.len() != outer.arity() {
        return Err(EnrichedError::NonComposable(format!(
            "{} has arity {} but {} inner morphisms were given",
            outer.name,
            outer.arity(),
            inners.len()
        )));
    }
    for (i, m) in inners.iter().enumerate() {
        if !same(&m.codomain, &outer.domain[i]) {
            return Err(EnrichedError::NonComposable(format!(
                "inner {i} ({}) lands in {}, not {}",
                m.name, m.codomain.name, outer.domain[i].name
            )));
        }
        if i + 1 < inners.len() && !same(&m.right, &inners[i + 1].left) {
            return Err(EnrichedError::NonComposable(format!(
                "inner {i} ends with {} but inner {} starts with {}",
                m.right.name,
                i + 1,
                inners[i + 1].left.name
            )));
        }
    }
    if let Some(first) = inners.first() {
        if !same(&first.left.target, &outer.left.source) {
            return Err(EnrichedError::NonComposable("left functors do not compose".into()));
        }
    }
    Ok(())
}

/// Components of the substitution of `inners` into `outer`.
fn compose_components(e: &Vdc, outer: &ProMorphism, inners: &[ProMorphism]) -> Result<Vec<Cell>, EnrichedError> {
    let refs: Vec<&ProMorphism> = inners.iter().collect();
    let rights: Vec<&EnrichedFunctor> = inners.iter().map(|m| &*m.right).collect();
    let mut domain = Vec::new();
    for m in inners {
        domain.extend(m.domain.iter().cloned());
    }
    let tuples = Tuples::new(chain_of(&inners[0].anchor, &domain).iter().map(|c| c.size()).collect());
    let mut out = Vec::with_capacity(tuples.count());
    for t in tuples.iter() {
        let (ot, parts) = split_tuple(&refs, &rights, &t);
        let cells: Vec<&Cell> = inners.iter().zip(&parts).map(|(m, p)| m.component(p)).collect();
        out.push(e.paste_refs(outer.component(&ot), &cells)?);
    }
    Ok(out)
}

/// Componentwise substitution of `inners` into `outer`.
pub fn compose_morphisms(e: &Vdc, outer: &ProMorphism, inners: &[ProMorphism]) -> Result<ProMorphism, EnrichedError> {
    check_chain(outer, inners)?;
    if inners.is_empty() {
        return Ok(outer.clone());
    }
    let components = compose_components(e, outer, inners)?;
    let first = &inners[0];
    let last = &inners[inners.len() - 1];
    let mut domain = Vec::new();
    for m in inners {
        domain.extend(m.domain.iter().cloned());
    }
    let names: Vec<&str> = inners.iter().map(|m| m.name.as_str()).collect();
    Ok(ProMorphism {
        name: format!("{}({})", outer.name, names.join(", ")),
        domain,
        anchor: first.anchor.clone(),
        codomain: outer.codomain.clone(),
        left: Arc::new(compose_functors(e, &outer.left, &first.left)?),
        right: Arc::new(compose_functors(e, &outer.right, &last.right)?),
        components,
    })
}

fn whisker_components(e: &Vdc, m: &ProMorphism, h: &EnrichedFunctor) -> Result<Vec<Cell>, EnrichedError> {
    if m.arity() != 0 {
        return Err(EnrichedError::NonComposable(format!("{} is not nullary", m.name)));
    }
    if !same(&h.target, &m.anchor) {
        return Err(EnrichedError::NonComposable(format!(
            "{} does not land in {}",
            h.name, m.anchor.name
        )));
    }
    (0..h.source.size())
        .map(|x| Ok(e.whisker(&m.components[h.on_objects[x]], h.structure[x])?))
        .collect()
}

/// A morphism with empty domain precomposed with a functor into its category.
pub fn whisker_morphism(e: &Vdc, m: &ProMorphism, h: &Arc<EnrichedFunctor>) -> Result<ProMorphism, EnrichedError> {
    let components = whisker_components(e, m, h)?;
    Ok(ProMorphism {
        name: format!("{}.{}", m.name, h.name),
        domain: Vec::new(),
        anchor: h.source.clone(),
        codomain: m.codomain.clone(),
        left: Arc::new(compose_functors(e, &m.left, h)?),
        right: Arc::new(compose_functors(e, &m.right, h)?),
        components,
    })
}

/// `K(G, F)` by restricting every component, with its cartesian morphism
/// `K(G, F) => K` over `(G, F)`.
pub fn restrict_profunctor(
    s: &Searcher<'_>,
    k: &Arc<EnrichedProfunctor>,
    g: &Arc<EnrichedFunctor>,
    f: &Arc<EnrichedFunctor>,
) -> Result<(EnrichedProfunctor, ProMorphism), EnrichedError> {
    let e = s.vdc();
    if !same(&g.target, &k.source) || !same(&f.target, &k.target) {
        return Err(EnrichedError::NonComposable(format!(
            "{} cannot be restricted along ({}, {})",
            k.name, g.name, f.name
        )));
    }
    let (c, d) = (&g.source, &f.source);
    let (nc, nd) = (c.size(), d.size());
    let mut component = Vec::with_capacity(nc * nd);
    let mut cart = Vec::with_capacity(nc * nd);
    for x in 0..nc {
        for u in 0..nd {
            let w = s.find_restriction(
                k.component(g.on_objects[x], f.on_objects[u]),
                g.structure[x],
                f.structure[u],
            )?;
            component.push(w.proarrow);
            cart.push(w.structure_cell);
        }
    }
    let chi = |x: usize, u: usize| &cart[x * nd + u];
    let idv = |p: ProarrowId| e.identity(e.src(p));
    let idw = |p: ProarrowId| e.identity(e.tgt(p));
    let mut left_action = Vec::with_capacity(nc * nc * nd);
    for x in 0..nc {
        for y in 0..nc {
            for u in 0..nd {
                let phi = e.paste(
                    k.left(g.on_objects[x], g.on_objects[y], f.on_objects[u]),
                    &[g.on_hom(x, y).clone(), chi(y, u).clone()],
                )?;
                let r = component[x * nd + u];
                left_action.push(s.factor_through_cartesian(chi(x, u), &phi, idv(r), idw(r))?);
            }
        }
    }
    let mut right_action = Vec::with_capacity(nc * nd * nd);
    for x in 0..nc {
        for u in 0..nd {
            for v in 0..nd {
                let phi = e.paste(
                    k.right(g.on_objects[x], f.on_objects[u], f.on_objects[v]),
                    &[chi(x, u).clone(), f.on_hom(u, v).clone()],
                )?;
                let r = component[x * nd + v];
                right_action.push(s.factor_through_cartesian(chi(x, v), &phi, idv(r), idw(r))?);
            }
        }
    }
    let restricted = EnrichedProfunctor {
        name: format!("{}({},{})", k.name, g.name, f.name),
        source: c.clone(),
        target: d.clone(),
        component,
        left_action,
        right_action,
    };
    let report = check_profunctor_laws(e, &restricted);
    if !report.passed() {
        return Err(EnrichedError::LawViolation(describe(&report)));
    }
    let restricted = Arc::new(restricted);
    let m = ProMorphism {
        name: format!("cart_{}", restricted.name),
        domain: alloc::vec![restricted.clone()],
        anchor: c.clone(),
        codomain: k.clone(),
        left: g.clone(),
        right: f.clone(),
        components: cart,
    };
    let report = check_morphism_laws(e, &m);
    if !report.passed() {
        return Err(EnrichedError::LawViolation(describe(&report)));
    }
    Ok(((*restricted).clone(), m))
}

pub(crate) fn describe(report: &VerificationReport) -> String {
    match report.first_failure() {
        Some(r) => match r.counterexamples.first() {
            Some(cx) => format!("{}: {}", r.name, cx.description),
            None => r.name.clone(),
        },
        None => format!("{}: {}", report.name, report.status),
    }
}

/// Finite sets of enriched categories, functors and profunctors to be
/// materialised.
#[derive(Debug, Clone, Default)]
pub struct Fragment {
    pub categories: Vec<Arc<EnrichedCategory>>,
    pub functors: Vec<Arc<EnrichedFunctor>>,
    pub profunctors: Vec<Arc<EnrichedProfunctor>>,
}

struct MaterialData {
    base: Vdc,
    categories: Vec<Arc<EnrichedCategory>>,
    functors: Vec<Arc<EnrichedFunctor>>,
    compose: BTreeMap<(VArrowId, VArrowId), VArrowId>,
    profunctors: Vec<Arc<EnrichedProfunctor>>,
    frames: Vec<Frame>,
    morphisms: Vec<ProMorphism>,
    lookup: BTreeMap<(Frame, Vec<Cell>), CellId>,
}

impl PasteResolver for MaterialData {
    fn paste(&self, outer: CellId, inners: &[CellId]) -> Option<CellId> {
        let o = self.morphisms.get(outer.index())?;
        let ins: Vec<ProMorphism> = inners
            .iter()
            .map(|c| self.morphisms.get(c.index()).cloned())
            .collect::<Option<_>>()?;
        check_chain(o, &ins).ok()?;
        if ins.is_empty() {
            return Some(outer);
        }
        let components = compose_components(&self.base, o, &ins).ok()?;
        let of = &self.frames[outer.index()];
        let first = &self.frames[inners[0].index()];
        let last = &self.frames[inners[inners.len() - 1].index()];
        let mut domain = first.domain.clone();
        for c in &inners[1..] {
            domain = domain.concat(&self.frames[c.index()].domain);
        }
        let frame = Frame {
            domain,
            left: *self.compose.get(&(of.left, first.left))?,
            right: *self.compose.get(&(of.right, last.right))?,
            codomain: of.codomain,
        };
        self.lookup.get(&(frame, components)).copied()
    }

    fn whisker(&self, cell: CellId, arrow: VArrowId) -> Option<CellId> {
        let m = self.morphisms.get(cell.index())?;
        let h = self.functors.get(arrow.index())?;
        let components = whisker_components(&self.base, m, h).ok()?;
        let of = &self.frames[cell.index()];
        let anchor = self.categories.iter().position(|c| same(c, &h.source))?;
        let frame = Frame {
            domain: Path::empty(ObjId(anchor as u32)),
            left: *self.compose.get(&(of.left, arrow))?,
            right: *self.compose.get(&(of.right, arrow))?,
            codomain: of.codomain,
        };
        self.lookup.get(&(frame, components)).copied()
    }
}

/// A finite fragment of the virtual equipment of enriched categories, as a
/// tabulated virtual double category. Objects, vertical arrows, proarrows and
/// cells correspond to categories, functors, profunctors and morphisms.
pub struct Materialized {
    vdc: Vdc,
    data: Arc<MaterialData>,
    report: VerificationReport,
}

impl Materialized {
    pub fn vdc(&self) -> &Vdc {
        &self.vdc
    }

    pub fn base(&self) -> &Vdc {
        &self.data.base
    }

    /// Notes and counts from the construction.
    pub fn report(&self) -> &VerificationReport {
        &self.report
    }

    pub fn category(&self, a: ObjId) -> &Arc<EnrichedCategory> {
        &self.data.categories[a.index()]
    }

    pub fn functor(&self, f: VArrowId) -> &Arc<EnrichedFunctor> {
        &self.data.functors[f.index()]
    }

    pub fn profunctor(&self, j: ProarrowId) -> &Arc<EnrichedProfunctor> {
        &self.data.profunctors[j.index()]
    }

    pub fn morphism(&self, c: &Cell) -> Option<&ProMorphism> {
        self.data.morphisms.get(c.id?.index())
    }

    pub fn category_id(&self, c: &Arc<EnrichedCategory>) -> Option<ObjId> {
        self.data.categories.iter().position(|x| same(x, c)).map(|i| ObjId(i as u32))
    }

    pub fn functor_id(&self, f: &Arc<EnrichedFunctor>) -> Option<VArrowId> {
        self.data.functors.iter().position(|x| same(x, f)).map(|i| VArrowId(i as u32))
    }

    pub fn profunctor_id(&self, j: &Arc<EnrichedProfunctor>) -> Option<ProarrowId> {
        self.data.profunctors.iter().position(|x| same(x, j)).map(|i| ProarrowId(i as u32))
    }

    /// The frame of `m` in the fragment, if all its boundary data belong to it.
    pub fn frame_of(&self, m: &ProMorphism) -> Option<Frame> {
        let arrows = m
            .domain
            .iter()
            .map(|j| self.profunctor_id(j))
            .collect::<Option<Vec<_>>>()?;
        Some(Frame {
            domain: Path::from_parts(self.category_id(&m.anchor)?, arrows),
            left: self.functor_id(&m.left)?,
            right: self.functor_id(&m.right)?,
            codomain: self.profunctor_id(&m.codomain)?,
        })
    }

    /// The cell of the fragment carrying `m`.
    pub fn cell_of(&self, m: &ProMorphism) -> Option<Cell> {
        let frame = self.frame_of(m)?;
        let id = *self.data.lookup.get(&(frame.clone(), m.components.clone()))?;
        Some(Cell { frame, id: Some(id) })
    }
}

/// Materialise `fragment`: vertical arrows are the fragment's functors closed
/// under composition, and the cells on each frame with a domain of length at
/// most `bounds.max_path` are all lawful families of base cells.
///
/// Over a thin base every family of existing cells is lawful, since both
/// sides of each law are parallel cells; the law check is then skipped.
pub fn materialize_vcat(e: &Vdc, fragment: &Fragment, bounds: SearchBounds) -> Result<Materialized, EnrichedError> {
    let mut report = VerificationReport::new("materialize").with_bounds(bounds);
    let mut categories: Vec<Arc<EnrichedCategory>> = Vec::new();
    let add_category = |c: &Arc<EnrichedCategory>, cats: &mut Vec<Arc<EnrichedCategory>>| {
        if !cats.iter().any(|x| same(x, c)) {
            cats.push(c.clone());
        }
    };
    for c in &fragment.categories {
        add_category(c, &mut categories);
    }
    for f in &fragment.functors {
        add_category(&f.source, &mut categories);
        add_category(&f.target, &mut categories);
    }
    for j in &fragment.profunctors {
        add_category(&j.source, &mut categories);
        add_category(&j.target, &mut categories);
    }
    for c in &categories {
        let r = check_category_laws(e, c);
        if !r.passed() {
            return Err(EnrichedError::LawViolation(describe(&r)));
        }
    }
    let cat_id = |c: &Arc<EnrichedCategory>| categories.iter().position(|x| same(x, c)).expect("collected");

    // Vertical arrows: identities, the fragment's functors, and composites.
    let mut functors: Vec<Arc<EnrichedFunctor>> = Vec::new();
    for c in &categories {
        functors.push(Arc::new(EnrichedFunctor::identity(e, c)?));
    }
    for f in &fragment.functors {
        let r = check_functor_laws(e, f);
        if !r.passed() {
            return Err(EnrichedError::LawViolation(describe(&r)));
        }
        if !functors.iter().any(|x| same(x, f)) {
            functors.push(f.clone());
        }
    }
    let mut compose = BTreeMap::new();
    let mut done = 0;
    loop {
        let n = functors.len();
        let mut found = Vec::new();
        for gi in 0..n {
            for fi in 0..n {
                if (gi < done && fi < done) || compose.contains_key(&(VArrowId(gi as u32), VArrowId(fi as u32))) {
                    continue;
                }
                let (g, f) = (&functors[gi], &functors[fi]);
                if !same(&f.target, &g.source) {
                    continue;
                }
                let gf = compose_functors(e, g, f)?;
                let hit = functors
                    .iter()
                    .chain(found.iter())
                    .position(|x: &Arc<EnrichedFunctor>| **x == gf);
                let id = match hit {
                    Some(i) => i,
                    None => {
                        found.push(Arc::new(gf));
                        n + found.len() - 1
                    }
                };
                compose.insert((VArrowId(gi as u32), VArrowId(fi as u32)), VArrowId(id as u32));
            }
        }
        done = n;
        if found.is_empty() {
            break;
        }
        functors.extend(found);
        if functors.len() > MAX_FRAGMENT_ARROWS {
            return Err(EnrichedError::FragmentTooLarge(format!(
                "more than {MAX_FRAGMENT_ARROWS} composite functors"
            )));
        }
    }

    let mut profunctors: Vec<Arc<EnrichedProfunctor>> = Vec::new();
    for j in &fragment.profunctors {
        let r = check_profunctor_laws(e, j);
        if !r.passed() {
            return Err(EnrichedError::LawViolation(describe(&r)));
        }
        profunctors.push(j.clone());
    }

    // Builder skeleton: objects first so identity arrows get ids 0..n.
    let mut b = VdcBuilder::new(format!("VCat({})", e.name()));
    let mut taken = BTreeMap::new();
    let mut unique = |name: &str| -> String {
        let n = taken.entry(String::from(name)).or_insert(0usize);
        *n += 1;
        if *n == 1 {
            String::from(name)
        } else {
            format!("{name}#{n}")
        }
    };
    for c in &categories {
        let name = unique(&c.name);
        unique(&format!("id_{name}"));
        b.add_object(&name)?;
    }
    for f in &functors[categories.len()..] {
        let name = unique(&f.name);
        b.add_arrow(&name, ObjId(cat_id(&f.source) as u32), ObjId(cat_id(&f.target) as u32))?;
    }
    for ((g, f), h) in &compose {
        b.set_composite(*g, *f, *h)?;
    }
    let mut morphisms = Vec::new();
    let mut frames = Vec::new();
    let mut lookup = BTreeMap::new();
    for j in &profunctors {
        let name = unique(&j.name);
        unique(&format!("id_{name}"));
        let p = b.add_proarrow(&name, ObjId(cat_id(&j.source) as u32), ObjId(cat_id(&j.target) as u32))?;
        let id = ProMorphism::identity(e, j)?;
        let c = b.identity_cell(p);
        let frame = b.cell_frame(c).expect("identity cell").clone();
        lookup.insert((frame.clone(), id.components.clone()), c);
        frames.push(frame);
        morphisms.push(ProMorphism {
            left: functors[cat_id(&j.source)].clone(),
            right: functors[cat_id(&j.target)].clone(),
            ..id
        });
    }

    // Cells: lawful families on every frame within the path bound.
    let pro_ends: Vec<(usize, usize)> = profunctors
        .iter()
        .map(|j| (cat_id(&j.source), cat_id(&j.target)))
        .collect();
    let mut paths: Vec<Path> = (0..categories.len()).map(|c| Path::empty(ObjId(c as u32))).collect();
    let mut frontier = paths.clone();
    for _ in 0..bounds.max_path {
        let mut next = Vec::new();
        for p in &frontier {
            let end = p.arrows().last().map_or(p.start().index(), |j| pro_ends[j.index()].1);
            for (j, (s, _)) in pro_ends.iter().enumerate() {
                if *s == end {
                    next.push(p.concat(&Path::from_parts(ObjId(end as u32), alloc::vec![ProarrowId(j as u32)])));
                }
            }
        }
        paths.extend(next.iter().cloned());
        frontier = next;
    }
    let mut candidates: u64 = 0;
    let mut checked_laws = false;
    for p in &paths {
        let domain: Vec<Arc<EnrichedProfunctor>> = p.arrows().iter().map(|j| profunctors[j.index()].clone()).collect();
        let first = p.start().index();
        let last = p.arrows().last().map_or(first, |j| pro_ends[j.index()].1);
        let anchor = categories[first].clone();
        let tuples = Tuples::new(chain_of(&anchor, &domain).iter().map(|c| c.size()).collect());
        for (fi, f) in functors.iter().enumerate() {
            if cat_id(&f.source) != first {
                continue;
            }
            for (gi, g) in functors.iter().enumerate() {
                if cat_id(&g.source) != last {
                    continue;
                }
                for (ki, k) in profunctors.iter().enumerate() {
                    if !same(&k.source, &f.target) || !same(&k.target, &g.target) {
                        continue;
                    }
                    let frame = Frame {
                        domain: p.clone(),
                        left: VArrowId(fi as u32),
                        right: VArrowId(gi as u32),
                        codomain: ProarrowId(ki as u32),
                    };
                    let mut options: Vec<Vec<Cell>> = Vec::with_capacity(tuples.count());
                    let mut total: u64 = 1;
                    for t in tuples.iter() {
                        let cf = component_frame(e, &anchor, &domain, k, f, g, &t);
                        let cells = e.frame_cells(&cf)?;
                        total = total.saturating_mul(cells.len() as u64);
                        options.push(cells);
                        if total == 0 {
                            break;
                        }
                    }
                    if total == 0 {
                        continue;
                    }
                    candidates = candidates.saturating_add(total);
                    if candidates > MAX_CANDIDATE_FAMILIES {
                        return Err(EnrichedError::FragmentTooLarge(format!(
                            "more than {MAX_CANDIDATE_FAMILIES} candidate families"
                        )));
                    }
                    let radices: Vec<usize> = options.iter().map(Vec::len).collect();
                    let choice = Tuples::new(radices);
                    for pick in choice.iter() {
                        let components: Vec<Cell> =
                            pick.iter().zip(&options).map(|(i, cs)| cs[*i].clone()).collect();
                        if lookup.contains_key(&(frame.clone(), components.clone())) {
                            continue;
                        }
                        let m = ProMorphism {
                            name: format!("c{}", morphisms.len()),
                            domain: domain.clone(),
                            anchor: anchor.clone(),
                            codomain: k.clone(),
                            left: f.clone(),
                            right: g.clone(),
                            components,
                        };
                        if !e.is_thin() {
                            checked_laws = true;
                            if !check_morphism_laws(e, &m).passed() {
                                continue;
                            }
                        }
                        let id = CellId(morphisms.len() as u32);
                        lookup.insert((frame.clone(), m.components.clone()), id);
                        frames.push(frame.clone());
                        morphisms.push(m);
                    }
                }
            }
        }
    }
    for (i, m) in morphisms.iter().enumerate().skip(profunctors.len()) {
        let c = b.add_cell(&unique(&m.name), frames[i].clone())?;
        debug_assert_eq!(c.index(), i);
    }
    report.checked = morphisms.len() as u64;
    report.note(format!(
        "{} categories, {} functors, {} profunctors, {} cells from {} candidate families",
        categories.len(),
        functors.len(),
        profunctors.len(),
        morphisms.len(),
        candidates
    ));
    if !checked_laws && e.is_thin() {
        report.note("thin base: every family of existing cells is lawful");
    }
    let data = Arc::new(MaterialData {
        base: e.clone(),
        categories,
        functors,
        compose,
        profunctors,
        frames,
        morphisms,
        lookup,
    });
    b.set_resolver(data.clone());
    let vdc = b.finish()?;
    Ok(Materialized { vdc, data, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Embedding;
    use crate::instances::b2;

    #[test]
    fn identities_and_homs_are_lawful() {
        let m = b2();
        let e = m.vdc();
        let s = Searcher::new(e, SearchBounds::universal());
        let emb = Embedding::new(&s);
        for a in e.objects() {
            let c = emb.represent_object(a).unwrap();
            let id = EnrichedFunctor::identity(e, &c).unwrap();
            assert!(check_functor_laws(e, &id).passed());
            let hom = Arc::new(EnrichedProfunctor::hom(&c));
            assert!(check_profunctor_laws(e, &hom).passed());
            let one = ProMorphism::identity(e, &hom).unwrap();
            assert!(check_morphism_laws(e, &one).passed());
            let again = compose_morphisms(e, &one, core::slice::from_ref(&one)).unwrap();
            assert_eq!(again.components, one.components);
        }
    }

    #[test]
    fn restriction_matches_the_closed_form() {
        let m = b2();
        let e = m.vdc();
        let s = Searcher::new(e, SearchBounds::universal());
        let emb = Embedding::new(&s);
        let k = e.find_proarrow("VV_1101").unwrap();
        let rk = emb.represent_proarrow(k).unwrap();
        for g in e.arrows().filter(|g| e.cod(*g) == e.src(k)) {
            for f in e.arrows().filter(|f| e.cod(*f) == e.tgt(k)) {
                let (rg, rf) = (emb.represent_arrow(g).unwrap(), emb.represent_arrow(f).unwrap());
                let (restricted, cart) = restrict_profunctor(&s, &rk, &rg, &rf).unwrap();
                let want = emb.represent_proarrow(m.restriction(k, g, f).unwrap()).unwrap();
                assert_eq!(restricted.component, want.component);
                assert!(check_morphism_laws(e, &cart).passed());
            }
        }
    }

    #[test]
    fn each_checker_catches_its_mutant() {
        let m = b2();
        let e = m.vdc();
        let s = Searcher::new(e, SearchBounds::universal());
        let emb = Embedding::new(&s);
        let v = e.find_object("V").unwrap();
        let c = emb.represent_object(v).unwrap();

        let mut bad = (*c).clone();
        let wrong = e.find_proarrow("VV_0000").unwrap();
        let i = bad.comp_cell.iter().position(|x| x.frame.codomain != wrong).unwrap();
        bad.comp_cell[i] = Cell::thin(Frame {
            codomain: wrong,
            ..bad.comp_cell[i].frame.clone()
        });
        assert!(check_category_laws(e, &bad).failed());

        let swap = emb.represent_arrow(e.find_arrow("VtoV_10").unwrap()).unwrap();
        let mut f = (*swap).clone();
        f.on_homs.swap(0, 1);
        assert!(check_functor_laws(e, &f).failed());

        let j = emb.represent_proarrow(e.find_proarrow("VV_1101").unwrap()).unwrap();
        let mut swapped = (*j).clone();
        core::mem::swap(&mut swapped.left_action, &mut swapped.right_action);
        assert!(check_profunctor_laws(e, &swapped).failed());
    }

    #[test]
    fn materialized_fragment_has_the_listed_data() {
        let m = b2();
        let e = m.vdc();
        let s = Searcher::new(e, SearchBounds::universal());
        let emb = Embedding::new(&s);
        let (u, v) = (e.find_object("U").unwrap(), e.find_object("V").unwrap());
        let j = emb.represent_proarrow(e.find_proarrow("UV_11").unwrap()).unwrap();
        let fragment = Fragment {
            categories: alloc::vec![emb.represent_object(u).unwrap(), emb.represent_object(v).unwrap()],
            functors: Vec::new(),
            profunctors: alloc::vec![j.clone()],
        };
        let mat = materialize_vcat(e, &fragment, SearchBounds::universal()).unwrap();
        assert_eq!(mat.vdc().objects().count(), 2);
        let pj = mat.profunctor_id(&j).unwrap();
        let id = ProMorphism::identity(e, &j).unwrap();
        assert_eq!(mat.cell_of(&id), Some(mat.vdc().identity_cell(pj).unwrap()));
    }
}
