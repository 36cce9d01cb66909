//! The canonical embedding of an equipment into its enriched categories.
//!
//! An object `A` is sent to `|A|`, whose objects are the vertical arrows into
//! `A` and whose homs are the restrictions `h_A(x, y)` of the unit. Arrows,
//! proarrows and cells are sent to functors, profunctors and morphisms by
//! pasting with the cartesian cells of these restrictions and factoring back
//! through them.

mod verify;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use thiserror::Error;

use crate::enriched::{
    check_category_laws, check_functor_laws, check_morphism_laws, check_profunctor_laws, describe,
    EnrichedCategory, EnrichedError, EnrichedFunctor, EnrichedProfunctor, ProMorphism, Tuples,
};
use crate::report::{Counterexample, VerificationReport};
use crate::universal::{Searcher, UniversalError};
use crate::vdc::{Cell, ObjId, Path, ProarrowId, VArrowId, Vdc, VdcError};

pub use verify::{
    check_composite_coreflection, check_composite_preservation, check_coreflection, check_full_on_arrows,
    check_fully_faithful, check_fully_faithful_on, check_functoriality, check_morita, composite_paths,
    verify_embedding, EmbeddingSuite, MoritaPair,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("malformed morphism: {0}")]
    MalformedMorphism(String),
    #[error("malformed functor: {0}")]
    MalformedFunctor(String),
    #[error("laws fail: {0}")]
    LawViolation(String),
    #[error(transparent)]
    Universal(#[from] UniversalError),
    #[error(transparent)]
    Enriched(#[from] EnrichedError),
    #[error(transparent)]
    Vdc(#[from] VdcError),
}

/// `|A|` together with the data used to build it.
#[derive(Debug, Clone)]
pub struct RepresentedObject {
    pub object: ObjId,
    pub category: Arc<EnrichedCategory>,
    /// The base arrow behind each object of `|A|`.
    pub arrows: Vec<VArrowId>,
    /// Cartesian cells `[hom(x, y)] / (x, y) => h_A` at `x * size + y`.
    pub cart: Vec<Cell>,
    /// The hom profunctor of `|A|`.
    pub hom: Arc<EnrichedProfunctor>,
}

impl RepresentedObject {
    pub fn index(&self, x: VArrowId) -> Option<usize> {
        self.arrows.iter().position(|a| *a == x)
    }

    pub fn cart(&self, x: usize, y: usize) -> &Cell {
        &self.cart[x * self.arrows.len() + y]
    }

    /// The object of `|A|` given by the identity of `A`.
    pub fn identity_index(&self, e: &Vdc) -> usize {
        self.index(e.identity(self.object)).expect("identity is an object")
    }
}

/// `|J|` together with its cartesian cells.
#[derive(Debug, Clone)]
pub struct RepresentedProarrow {
    pub proarrow: ProarrowId,
    pub profunctor: Arc<EnrichedProfunctor>,
    /// Cartesian cells `[J(p, g)] / (p, g) => J` at `p * |B| + g`.
    pub cart: Vec<Cell>,
}

impl RepresentedProarrow {
    pub fn cart(&self, p: usize, g: usize) -> &Cell {
        &self.cart[p * self.profunctor.target.size() + g]
    }
}

/// Natural isomorphism data: two nullary morphisms with codomain a hom
/// profunctor, checked to be natural and mutually inverse.
#[derive(Debug, Clone)]
pub struct NaturalIso {
    pub forward: ProMorphism,
    pub backward: ProMorphism,
    pub report: VerificationReport,
}

#[derive(Debug, Clone)]
pub struct Flattened {
    pub functor: EnrichedFunctor,
    pub iso: NaturalIso,
}

#[derive(Debug, Clone)]
pub struct Fullness {
    pub arrow: VArrowId,
    pub iso: NaturalIso,
}

#[derive(Debug, Clone)]
pub struct Coreflection {
    /// `J(id, id)`.
    pub proarrow: ProarrowId,
    /// The counit `|J(id, id)| => J`, built from the actions of `J`.
    pub counit: ProMorphism,
    /// Components of the counit without an inverse.
    pub non_invertible: Vec<(usize, usize)>,
    /// Naturality and triangle identities.
    pub report: VerificationReport,
}

impl Coreflection {
    pub fn counit_is_iso(&self) -> bool {
        self.non_invertible.is_empty()
    }
}

/// Builds and caches representatives over one base equipment.
pub struct Embedding<'s, 'a> {
    s: &'s Searcher<'a>,
    objects: RefCell<BTreeMap<ObjId, Rc<RepresentedObject>>>,
    arrows: RefCell<BTreeMap<VArrowId, Arc<EnrichedFunctor>>>,
    proarrows: RefCell<BTreeMap<ProarrowId, Rc<RepresentedProarrow>>>,
}

fn ensure(report: VerificationReport) -> Result<(), EmbeddingError> {
    if report.passed() {
        Ok(())
    } else {
        Err(EmbeddingError::LawViolation(describe(&report)))
    }
}

impl<'s, 'a> Embedding<'s, 'a> {
    pub fn new(s: &'s Searcher<'a>) -> Self {
        Embedding {
            s,
            objects: RefCell::new(BTreeMap::new()),
            arrows: RefCell::new(BTreeMap::new()),
            proarrows: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn searcher(&self) -> &'s Searcher<'a> {
        self.s
    }

    pub fn base(&self) -> &'a Vdc {
        self.s.vdc()
    }

    /// `|A|` with its construction data.
    pub fn object(&self, a: ObjId) -> Result<Rc<RepresentedObject>, EmbeddingError> {
        if let Some(hit) = self.objects.borrow().get(&a) {
            return Ok(hit.clone());
        }
        let e = self.base();
        let s = self.s;
        let h = s.find_unit(a)?.proarrow;
        let arrows: Vec<VArrowId> = e.vertical().into_object(a).collect();
        let n = arrows.len();
        let mut hom = Vec::with_capacity(n * n);
        let mut cart = Vec::with_capacity(n * n);
        for x in &arrows {
            for y in &arrows {
                let w = s.find_restriction(h, *x, *y)?;
                hom.push(w.proarrow);
                cart.push(w.structure_cell);
            }
        }
        let mut id_cell = Vec::with_capacity(n);
        for (i, x) in arrows.iter().enumerate() {
            let vert = s.vertical_cell(*x)?;
            let d = e.identity(e.dom(*x));
            id_cell.push(s.factor_through_cartesian(&cart[i * n + i], &vert, d, d)?);
        }
        let mu = s.multiplication(a)?;
        let mut comp_cell = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let phi = e.paste(&mu, &[cart[x * n + y].clone(), cart[y * n + z].clone()])?;
                    let (dx, dz) = (e.identity(e.dom(arrows[x])), e.identity(e.dom(arrows[z])));
                    comp_cell.push(s.factor_through_cartesian(&cart[x * n + z], &phi, dx, dz)?);
                }
            }
        }
        let category = Arc::new(EnrichedCategory {
            name: format!("|{}|", e.obj_name(a)),
            objects: arrows.iter().map(|x| String::from(e.arrow_name(*x))).collect(),
            extent: arrows.iter().map(|x| e.dom(*x)).collect(),
            hom,
            id_cell,
            comp_cell,
        });
        ensure(check_category_laws(e, &category))?;
        let rep = Rc::new(RepresentedObject {
            object: a,
            hom: Arc::new(EnrichedProfunctor::hom(&category)),
            category,
            arrows,
            cart,
        });
        self.objects.borrow_mut().insert(a, rep.clone());
        Ok(rep)
    }

    pub fn represent_object(&self, a: ObjId) -> Result<Arc<EnrichedCategory>, EmbeddingError> {
        Ok(self.object(a)?.category.clone())
    }

    /// `|f| : |A| -> |B|`, `x |-> f . x`, with identity structure arrows.
    pub fn represent_arrow(&self, f: VArrowId) -> Result<Arc<EnrichedFunctor>, EmbeddingError> {
        if let Some(hit) = self.arrows.borrow().get(&f) {
            return Ok(hit.clone());
        }
        let e = self.base();
        let s = self.s;
        let (ra, rb) = (self.object(e.dom(f))?, self.object(e.cod(f))?);
        let n = ra.arrows.len();
        let on_objects: Vec<usize> = ra
            .arrows
            .iter()
            .map(|x| rb.index(e.compose(f, *x).expect("composable")).expect("arrow into B"))
            .collect();
        let unit_map = s.unit_map(f)?;
        let mut on_homs = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let phi = e.paste(&unit_map, core::slice::from_ref(ra.cart(x, y)))?;
                let (dx, dy) = (e.identity(e.dom(ra.arrows[x])), e.identity(e.dom(ra.arrows[y])));
                on_homs.push(s.factor_through_cartesian(rb.cart(on_objects[x], on_objects[y]), &phi, dx, dy)?);
            }
        }
        let functor = Arc::new(EnrichedFunctor {
            name: format!("|{}|", e.arrow_name(f)),
            source: ra.category.clone(),
            target: rb.category.clone(),
            structure: ra.category.extent.iter().map(|x| e.identity(*x)).collect(),
            on_objects,
            on_homs,
        });
        ensure(check_functor_laws(e, &functor))?;
        self.arrows.borrow_mut().insert(f, functor.clone());
        Ok(functor)
    }

    /// `|J|`: components are the restrictions `J(p, g)`; the actions factor
    /// the unitors of `J` pasted with cartesian cells.
    pub fn proarrow(&self, j: ProarrowId) -> Result<Rc<RepresentedProarrow>, EmbeddingError> {
        if let Some(hit) = self.proarrows.borrow().get(&j) {
            return Ok(hit.clone());
        }
        let e = self.base();
        let s = self.s;
        let (ra, rb) = (self.object(e.src(j))?, self.object(e.tgt(j))?);
        let (na, nb) = (ra.arrows.len(), rb.arrows.len());
        let mut component = Vec::with_capacity(na * nb);
        let mut cart = Vec::with_capacity(na * nb);
        for p in &ra.arrows {
            for g in &rb.arrows {
                let w = s.find_restriction(j, *p, *g)?;
                component.push(w.proarrow);
                cart.push(w.structure_cell);
            }
        }
        let chi = |p: usize, g: usize| &cart[p * nb + g];
        let ida = |x: usize| e.identity(e.dom(ra.arrows[x]));
        let idb = |u: usize| e.identity(e.dom(rb.arrows[u]));
        let lambda = s.left_unitor(j)?;
        let rho = s.right_unitor(j)?;
        let mut left_action = Vec::with_capacity(na * na * nb);
        for x in 0..na {
            for y in 0..na {
                for u in 0..nb {
                    let phi = e.paste(&lambda, &[ra.cart(x, y).clone(), chi(y, u).clone()])?;
                    left_action.push(s.factor_through_cartesian(chi(x, u), &phi, ida(x), idb(u))?);
                }
            }
        }
        let mut right_action = Vec::with_capacity(na * nb * nb);
        for x in 0..na {
            for u in 0..nb {
                for v in 0..nb {
                    let phi = e.paste(&rho, &[chi(x, u).clone(), rb.cart(u, v).clone()])?;
                    right_action.push(s.factor_through_cartesian(chi(x, v), &phi, ida(x), idb(v))?);
                }
            }
        }
        let profunctor = Arc::new(EnrichedProfunctor {
            name: format!("|{}|", e.proarrow_name(j)),
            source: ra.category.clone(),
            target: rb.category.clone(),
            component,
            left_action,
            right_action,
        });
        ensure(check_profunctor_laws(e, &profunctor))?;
        let rep = Rc::new(RepresentedProarrow {
            proarrow: j,
            profunctor,
            cart,
        });
        self.proarrows.borrow_mut().insert(j, rep.clone());
        Ok(rep)
    }

    pub fn represent_proarrow(&self, j: ProarrowId) -> Result<Arc<EnrichedProfunctor>, EmbeddingError> {
        Ok(self.proarrow(j)?.profunctor.clone())
    }

    /// `|alpha|`: each component pastes the cartesian cells of the domain
    /// into `alpha` and factors through the cartesian cell of the codomain.
    /// A nullary `alpha` is precomposed with the object instead.
    pub fn represent_cell(&self, alpha: &Cell) -> Result<ProMorphism, EmbeddingError> {
        let e = self.base();
        let s = self.s;
        let frame = &alpha.frame;
        let anchor = self.object(frame.domain.start())?;
        let reps: Vec<Rc<RepresentedProarrow>> = frame
            .domain
            .arrows()
            .iter()
            .map(|j| self.proarrow(*j))
            .collect::<Result<_, _>>()?;
        let k = self.proarrow(frame.codomain)?;
        let (f, g) = (self.represent_arrow(frame.left)?, self.represent_arrow(frame.right)?);
        let mut chain = alloc::vec![anchor.clone()];
        for j in frame.domain.arrows() {
            chain.push(self.object(e.tgt(*j))?);
        }
        let tuples = Tuples::new(chain.iter().map(|c| c.arrows.len()).collect());
        let mut components = Vec::with_capacity(tuples.count());
        for t in tuples.iter() {
            let (a0, ak) = (t[0], t[t.len() - 1]);
            let phi = if reps.is_empty() {
                e.whisker(alpha, anchor.arrows[a0])?
            } else {
                let inners: Vec<Cell> = reps.iter().enumerate().map(|(i, r)| r.cart(t[i], t[i + 1]).clone()).collect();
                e.paste(alpha, &inners)?
            };
            let cart = k.cart(f.on_objects[a0], g.on_objects[ak]);
            let (d0, dk) = (
                e.identity(e.dom(chain[0].arrows[a0])),
                e.identity(e.dom(chain[chain.len() - 1].arrows[ak])),
            );
            components.push(s.factor_through_cartesian(cart, &phi, d0, dk)?);
        }
        let m = ProMorphism {
            name: format!("|{}|", e.show_cell(alpha)),
            domain: reps.iter().map(|r| r.profunctor.clone()).collect(),
            anchor: anchor.category.clone(),
            codomain: k.profunctor.clone(),
            left: f,
            right: g,
            components,
        };
        ensure(check_morphism_laws(e, &m))?;
        Ok(m)
    }

    /// A nullary cell into a unit, `[@A] / (f, g) => h_B`, as a natural
    /// transformation `|f| => |g|` with values in the hom profunctor of `|B|`.
    pub fn represent_vertical(&self, eta: &Cell) -> Result<ProMorphism, EmbeddingError> {
        let e = self.base();
        let s = self.s;
        let frame = &eta.frame;
        if !frame.domain.is_empty() {
            return Err(EmbeddingError::MalformedMorphism(format!(
                "{} is not nullary",
                e.show_cell(eta)
            )));
        }
        let b = e.cod(frame.left);
        if s.find_unit(b)?.proarrow != frame.codomain {
            return Err(EmbeddingError::MalformedMorphism(format!(
                "{} does not land in the unit of {}",
                e.show_cell(eta),
                e.obj_name(b)
            )));
        }
        let (ra, rb) = (self.object(frame.domain.start())?, self.object(b)?);
        let (f, g) = (self.represent_arrow(frame.left)?, self.represent_arrow(frame.right)?);
        let mut components = Vec::with_capacity(ra.arrows.len());
        for (i, x) in ra.arrows.iter().enumerate() {
            let phi = e.whisker(eta, *x)?;
            let d = e.identity(e.dom(*x));
            components.push(s.factor_through_cartesian(rb.cart(f.on_objects[i], g.on_objects[i]), &phi, d, d)?);
        }
        let m = ProMorphism {
            name: format!("|{}|", e.show_cell(eta)),
            domain: Vec::new(),
            anchor: ra.category.clone(),
            codomain: rb.hom.clone(),
            left: f,
            right: g,
            components,
        };
        ensure(check_morphism_laws(e, &m))?;
        Ok(m)
    }

    /// The base object whose representative is `c`, among those built so far
    /// or any object of the base.
    pub fn base_object_of(&self, c: &Arc<EnrichedCategory>) -> Option<ObjId> {
        let e = self.base();
        e.objects().find(|a| self.object(*a).is_ok_and(|r| Arc::ptr_eq(&r.category, c) || *r.category == **c))
    }

    pub fn base_arrow_of(&self, f: &Arc<EnrichedFunctor>) -> Option<VArrowId> {
        let e = self.base();
        e.arrows().find(|a| self.represent_arrow(*a).is_ok_and(|r| Arc::ptr_eq(&r, f) || *r == **f))
    }

    pub fn base_proarrow_of(&self, j: &Arc<EnrichedProfunctor>) -> Option<ProarrowId> {
        let e = self.base();
        if let Some(hit) = self
            .proarrows
            .borrow()
            .values()
            .find(|r| Arc::ptr_eq(&r.profunctor, j))
        {
            return Some(hit.proarrow);
        }
        e.proarrows().find(|p| self.represent_proarrow(*p).is_ok_and(|r| *r == **j))
    }

    /// The base cell behind a morphism between representatives: its component
    /// at the identities, pasted into the cartesian cell of the codomain.
    pub fn strip_cell(&self, m: &ProMorphism) -> Result<Cell, EmbeddingError> {
        let e = self.base();
        let malformed = |what: &str| EmbeddingError::MalformedMorphism(format!("{}: {what}", m.name));
        let domain: Vec<ProarrowId> = m
            .domain
            .iter()
            .map(|j| self.base_proarrow_of(j))
            .collect::<Option<_>>()
            .ok_or_else(|| malformed("domain is not made of representatives"))?;
        let k = self
            .base_proarrow_of(&m.codomain)
            .ok_or_else(|| malformed("codomain is not a representative"))?;
        let f = self.base_arrow_of(&m.left).ok_or_else(|| malformed("left functor is not a representative"))?;
        let g = self.base_arrow_of(&m.right).ok_or_else(|| malformed("right functor is not a representative"))?;
        let anchor = self
            .base_object_of(&m.anchor)
            .ok_or_else(|| malformed("anchor is not a representative"))?;
        let mut objs = alloc::vec![anchor];
        objs.extend(domain.iter().map(|j| e.tgt(*j)));
        let mut t = Vec::with_capacity(objs.len());
        for a in &objs {
            t.push(self.object(*a)?.identity_index(e));
        }
        let report = check_morphism_laws(e, m);
        if !report.passed() {
            return Err(malformed(&describe(&report)));
        }
        let c = m.component(&t).clone();
        let rk = self.proarrow(k)?;
        let fi = m.left.on_objects[t[0]];
        let gi = m.right.on_objects[t[t.len() - 1]];
        let cell = e.paste(rk.cart(fi, gi), core::slice::from_ref(&c))?;
        if cell.frame.left != f || cell.frame.right != g || cell.frame.domain != Path::from_parts(anchor, domain.clone()) {
            return Err(malformed("identity component does not strip to the expected frame"));
        }
        Ok(cell)
    }

    /// `f♭`: the extent-preserving functor `x |-> y_x . s_x` into `|B|`, with
    /// the natural isomorphism `f ≅ f♭`.
    pub fn flatten_functor(&self, f: &Arc<EnrichedFunctor>) -> Result<Flattened, EmbeddingError> {
        let e = self.base();
        let s = self.s;
        let b = self
            .base_object_of(&f.target)
            .ok_or_else(|| EmbeddingError::MalformedFunctor(format!("{} does not land in a representative", f.name)))?;
        let rb = self.object(b)?;
        let c = &f.source;
        let n = c.size();
        let y = |x: usize| rb.arrows[f.on_objects[x]];
        let flat_objects: Vec<usize> = (0..n)
            .map(|x| rb.index(e.compose(y(x), f.structure[x]).expect("composable")).expect("arrow into B"))
            .collect();
        let mut on_homs = Vec::with_capacity(n * n);
        for x in 0..n {
            for z in 0..n {
                let phi = e.paste(rb.cart(f.on_objects[x], f.on_objects[z]), core::slice::from_ref(f.on_hom(x, z)))?;
                let (dx, dz) = (e.identity(c.extent[x]), e.identity(c.extent[z]));
                on_homs.push(s.factor_through_cartesian(rb.cart(flat_objects[x], flat_objects[z]), &phi, dx, dz)?);
            }
        }
        let flat = EnrichedFunctor {
            name: format!("{}_flat", f.name),
            source: c.clone(),
            target: f.target.clone(),
            on_objects: flat_objects.clone(),
            structure: c.extent.iter().map(|a| e.identity(*a)).collect(),
            on_homs,
        };
        ensure(check_functor_laws(e, &flat))?;
        let flat_arc = Arc::new(flat.clone());
        let mut fwd = Vec::with_capacity(n);
        let mut bwd = Vec::with_capacity(n);
        for (x, &fx) in flat_objects.iter().enumerate() {
            let vert = s.vertical_cell(rb.arrows[fx])?;
            let id = e.identity(c.extent[x]);
            fwd.push(s.factor_through_cartesian(rb.cart(f.on_objects[x], fx), &vert, f.structure[x], id)?);
            bwd.push(s.factor_through_cartesian(rb.cart(fx, f.on_objects[x]), &vert, id, f.structure[x])?);
        }
        let iso = self.natural_iso(&rb, f.clone(), flat_arc, fwd, bwd)?;
        Ok(Flattened { functor: flat, iso })
    }

    /// Package and check a natural isomorphism `f ≅ g` of functors into `|B|`.
    fn natural_iso(
        &self,
        rb: &RepresentedObject,
        f: Arc<EnrichedFunctor>,
        g: Arc<EnrichedFunctor>,
        fwd: Vec<Cell>,
        bwd: Vec<Cell>,
    ) -> Result<NaturalIso, EmbeddingError> {
        let e = self.base();
        let c = f.source.clone();
        let forward = ProMorphism {
            name: format!("{} => {}", f.name, g.name),
            domain: Vec::new(),
            anchor: c.clone(),
            codomain: rb.hom.clone(),
            left: f.clone(),
            right: g.clone(),
            components: fwd,
        };
        let backward = ProMorphism {
            name: format!("{} => {}", g.name, f.name),
            domain: Vec::new(),
            anchor: c.clone(),
            codomain: rb.hom.clone(),
            left: g.clone(),
            right: f.clone(),
            components: bwd,
        };
        let mut report = VerificationReport::new(format!("iso {} ~= {}", f.name, g.name));
        report.push(check_morphism_laws(e, &forward));
        report.push(check_morphism_laws(e, &backward));
        let cat = &rb.category;
        let mut inv = VerificationReport::new("inverse");
        for x in 0..c.size() {
            let (fx, gx) = (f.on_objects[x], g.on_objects[x]);
            let pairs = [
                (cat.comp(fx, gx, fx), &forward.components[x], &backward.components[x], fx, f.structure[x]),
                (cat.comp(gx, fx, gx), &backward.components[x], &forward.components[x], gx, g.structure[x]),
            ];
            for (comp, a, b, at, s) in pairs {
                inv.tick();
                let got = e.paste(comp, &[a.clone(), b.clone()]);
                let want = e.whisker(cat.id(at), s);
                match (got, want) {
                    (Ok(p), Ok(q)) if p == q => {}
                    (Ok(p), Ok(q)) => inv.fail(Counterexample::with_frames(
                        format!("at {}: {} is not {}", c.objects[x], e.show_cell(&p), e.show_cell(&q)),
                        alloc::vec![p.frame, q.frame],
                    )),
                    (Err(err), _) | (_, Err(err)) => inv.fail_msg(format!("at {}: {err}", c.objects[x])),
                }
            }
        }
        report.push(inv);
        Ok(NaturalIso {
            forward,
            backward,
            report,
        })
    }

    /// For an extent-preserving `F : |A| -> |B|`, the arrow `f = F(id_A)` and
    /// the natural isomorphism `F ≅ |f|` built from `F` on the homs out of and
    /// into the identity.
    pub fn fullness_on_arrows(&self, functor: &Arc<EnrichedFunctor>) -> Result<Fullness, EmbeddingError> {
        let e = self.base();
        let s = self.s;
        let malformed = |what: &str| EmbeddingError::MalformedFunctor(format!("{}: {what}", functor.name));
        if !functor.preserves_extent(e) {
            return Err(malformed("structure arrows are not identities"));
        }
        let report = check_functor_laws(e, functor);
        if !report.passed() {
            return Err(malformed(&describe(&report)));
        }
        let a = self.base_object_of(&functor.source).ok_or_else(|| malformed("source is not a representative"))?;
        let b = self.base_object_of(&functor.target).ok_or_else(|| malformed("target is not a representative"))?;
        let (ra, rb) = (self.object(a)?, self.object(b)?);
        let ia = ra.identity_index(e);
        let f = rb.arrows[functor.on_objects[ia]];
        let rf = self.represent_arrow(f)?;
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        for (i, x) in ra.arrows.iter().enumerate() {
            let d = e.identity(e.dom(*x));
            let vert = s.vertical_cell(*x)?;
            let (fx, ffx) = (functor.on_objects[i], rf.on_objects[i]);
            let out_of = s.factor_through_cartesian(ra.cart(i, ia), &vert, d, *x)?;
            let along = e.paste(functor.on_hom(i, ia), core::slice::from_ref(&out_of))?;
            let into_base = e.paste(rb.cart(fx, functor.on_objects[ia]), core::slice::from_ref(&along))?;
            fwd.push(s.factor_through_cartesian(rb.cart(fx, ffx), &into_base, d, d)?);
            let into = s.factor_through_cartesian(ra.cart(ia, i), &vert, *x, d)?;
            let along = e.paste(functor.on_hom(ia, i), core::slice::from_ref(&into))?;
            let into_base = e.paste(rb.cart(functor.on_objects[ia], fx), core::slice::from_ref(&along))?;
            bwd.push(s.factor_through_cartesian(rb.cart(ffx, fx), &into_base, d, d)?);
        }
        let iso = self.natural_iso(&rb, functor.clone(), rf, fwd, bwd)?;
        Ok(Fullness { arrow: f, iso })
    }

    /// The coreflection of a profunctor between representatives: the base
    /// proarrow `J(id, id)` and the counit `|J(id, id)| => J` whose components
    /// factor the two actions through the composite `x_! J(id, id) u^*`.
    pub fn coreflect(&self, j: &Arc<EnrichedProfunctor>) -> Result<Coreflection, EmbeddingError> {
        let e = self.base();
        let s = self.s;
        let malformed = |what: &str| EmbeddingError::MalformedMorphism(format!("{}: {what}", j.name));
        let report = check_profunctor_laws(e, j);
        if !report.passed() {
            return Err(malformed(&describe(&report)));
        }
        let a = self.base_object_of(&j.source).ok_or_else(|| malformed("source is not a representative"))?;
        let b = self.base_object_of(&j.target).ok_or_else(|| malformed("target is not a representative"))?;
        let (ra, rb) = (self.object(a)?, self.object(b)?);
        let (ia, ib) = (ra.identity_index(e), rb.identity_index(e));
        let bar = j.component(ia, ib);
        let rbar = self.proarrow(bar)?;
        let (na, nb) = (ra.arrows.len(), rb.arrows.len());
        let mut components = Vec::with_capacity(na * nb);
        let mut non_invertible = Vec::new();
        for x in 0..na {
            for u in 0..nb {
                let act = e.paste(
                    j.left(x, ia, u),
                    &[e.identity_cell(ra.category.hom(x, ia))?, j.right(ia, ib, u).clone()],
                )?;
                let path = e.path(&[ra.category.hom(x, ia), bar, rb.category.hom(ib, u)])?;
                let w = s.find_composite(&path)?;
                let eps = s.factor_through_inserted(&w.structure_cell, 0, &act)?;
                let restricted = rbar.profunctor.component(x, u);
                let eps = if w.proarrow == restricted {
                    eps
                } else {
                    let (to, _) = s.proarrow_iso(restricted, w.proarrow).ok_or_else(|| {
                        malformed("composite of the bent proarrow is not its restriction")
                    })?;
                    e.paste(&eps, core::slice::from_ref(&to))?
                };
                if !s.is_invertible(&eps) {
                    non_invertible.push((x, u));
                }
                components.push(eps);
            }
        }
        let counit = ProMorphism {
            name: format!("counit {}", j.name),
            domain: alloc::vec![rbar.profunctor.clone()],
            anchor: ra.category.clone(),
            codomain: j.clone(),
            left: self.identity_functor(a)?,
            right: self.identity_functor(b)?,
            components,
        };
        let mut report = VerificationReport::new(format!("coreflect {}", j.name));
        report.push(check_morphism_laws(e, &counit));
        let mut tri = VerificationReport::new("triangles");
        tri.tick();
        let at_id = &counit.components[ia * nb + ib];
        if *at_id != e.identity_cell(bar)? {
            tri.fail(Counterexample::with_frames(
                format!("counit at (id, id) is {}, not the identity", e.show_cell(at_id)),
                alloc::vec![at_id.frame.clone()],
            ));
        }
        if let Some(k) = self.representative_base(j) {
            tri.tick();
            if k != bar {
                tri.fail_msg(format!(
                    "coreflection of |{}| is {}",
                    e.proarrow_name(k),
                    e.proarrow_name(bar)
                ));
            }
            for (i, c) in counit.components.iter().enumerate() {
                tri.tick();
                if c.frame.domain.arrows() != [c.frame.codomain] || *c != e.identity_cell(c.frame.codomain)? {
                    tri.fail_msg(format!("counit of a representative is not the identity at component {i}"));
                    break;
                }
            }
        }
        report.push(tri);
        Ok(Coreflection {
            proarrow: bar,
            counit,
            non_invertible,
            report,
        })
    }

    fn representative_base(&self, j: &Arc<EnrichedProfunctor>) -> Option<ProarrowId> {
        self.proarrows
            .borrow()
            .values()
            .find(|r| Arc::ptr_eq(&r.profunctor, j) || *r.profunctor == **j)
            .map(|r| r.proarrow)
    }

    /// `|A| -> |A|` sending every `x` to `id_A` with structure arrow `x`; its
    /// action on homs is the cartesian cells. Flattening it gives the identity.
    pub fn tautological_functor(&self, a: ObjId) -> Result<EnrichedFunctor, EmbeddingError> {
        let e = self.base();
        let ra = self.object(a)?;
        let ia = ra.identity_index(e);
        let n = ra.arrows.len();
        let functor = EnrichedFunctor {
            name: format!("!{}", ra.category.name),
            source: ra.category.clone(),
            target: ra.category.clone(),
            on_objects: alloc::vec![ia; n],
            structure: ra.arrows.clone(),
            on_homs: ra.cart.clone(),
        };
        ensure(check_functor_laws(e, &functor))?;
        Ok(functor)
    }

    /// `|id_A|`, the identity functor of `|A|`.
    pub fn identity_functor(&self, a: ObjId) -> Result<Arc<EnrichedFunctor>, EmbeddingError> {
        self.represent_arrow(self.base().identity(a))
    }

    /// `|A|` as a hom profunctor.
    pub fn hom_profunctor(&self, a: ObjId) -> Result<Arc<EnrichedProfunctor>, EmbeddingError> {
        Ok(self.object(a)?.hom.clone())
    }
}
