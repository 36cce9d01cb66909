use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Embedding, EmbeddingError};
use crate::bounds::SearchBounds;
use crate::enriched::{
    compose_functors, compose_morphisms, materialize_vcat, EnrichedFunctor, Fragment, Materialized,
    ProMorphism,
};
use crate::report::{Counterexample, VerificationReport};
use crate::universal::Searcher;
use crate::vdc::{Cell, Frame, ObjId, Path, ProarrowId, VArrowId, Vdc};

/// Base data whose representatives are checked, and the bounds to check under.
#[derive(Debug, Clone)]
pub struct EmbeddingSuite {
    pub objects: Vec<ObjId>,
    pub arrows: Vec<VArrowId>,
    pub proarrows: Vec<ProarrowId>,
    pub bounds: SearchBounds,
    /// Pairs of objects to test for equivalence through their representatives.
    pub morita: Vec<MoritaPair>,
}

/// Objects `A`, `B` and whether a pair of proarrows `A -|> B`, `B -|> A`
/// inverse up to isomorphism is expected to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoritaPair {
    pub a: ObjId,
    pub b: ObjId,
    pub equivalent: bool,
}

impl EmbeddingSuite {
    pub fn new(bounds: SearchBounds) -> Self {
        EmbeddingSuite {
            objects: Vec::new(),
            arrows: Vec::new(),
            proarrows: Vec::new(),
            bounds,
            morita: Vec::new(),
        }
    }

    /// Every object reached by the declared data.
    pub fn all_objects(&self, e: &Vdc) -> Vec<ObjId> {
        let mut out: BTreeSet<ObjId> = self.objects.iter().copied().collect();
        for f in &self.arrows {
            out.insert(e.dom(*f));
            out.insert(e.cod(*f));
        }
        for j in &self.proarrows {
            out.insert(e.src(*j));
            out.insert(e.tgt(*j));
        }
        out.into_iter().collect()
    }
}

/// The seven checks, in order, as children of one report.
pub fn verify_embedding(emb: &Embedding<'_, '_>, suite: &EmbeddingSuite) -> Result<VerificationReport, EmbeddingError> {
    let e = emb.base();
    let mut report = VerificationReport::new(format!("embedding {}", e.name())).with_bounds(suite.bounds);
    report.push(check_functoriality(emb, &suite.proarrows, suite.bounds)?);
    let witnesses = composite_paths(e, &suite.all_objects(e), &suite.proarrows);
    report.push(check_composite_preservation(emb, &witnesses, &suite.arrows, suite.bounds)?);
    report.push(check_fully_faithful(emb, suite)?);
    report.push(check_full_on_arrows(emb, &suite.all_objects(e), &suite.arrows)?);
    report.push(check_coreflection(emb, &suite.all_objects(e), &suite.proarrows)?);
    report.push(check_composite_coreflection(emb, &suite.proarrows)?);
    let mut morita = VerificationReport::new("morita");
    for pair in &suite.morita {
        morita.push(check_morita(emb, *pair)?);
    }
    report.push(morita);
    Ok(report)
}

/// Paths over `proarrows` of length at most `max`, including the empty path
/// at each object involved.
fn scoped_paths(e: &Vdc, objects: &[ObjId], proarrows: &[ProarrowId], max: usize) -> Vec<Path> {
    let mut starts: BTreeSet<ObjId> = objects.iter().copied().collect();
    for j in proarrows {
        starts.insert(e.src(*j));
        starts.insert(e.tgt(*j));
    }
    let mut out: Vec<Path> = starts.into_iter().map(Path::empty).collect();
    let mut frontier = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for p in &frontier {
            let end = e.path_target(p);
            for j in proarrows.iter().filter(|j| e.src(**j) == end) {
                next.push(p.concat(&Path::from_parts(end, alloc::vec![*j])));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Units of the objects and binary composites of the proarrows.
pub fn composite_paths(e: &Vdc, objects: &[ObjId], proarrows: &[ProarrowId]) -> Vec<Path> {
    let mut out: Vec<Path> = objects.iter().map(|a| Path::empty(*a)).collect();
    for j in proarrows {
        for k in proarrows.iter().filter(|k| e.src(**k) == e.tgt(*j)) {
            out.push(Path::from_parts(e.src(*j), alloc::vec![*j, *k]));
        }
    }
    out
}

/// Base cells whose domain lies over `proarrows` and has length at most
/// `max`, with any vertical arrows and a codomain among `codomains`.
fn scoped_cells(
    s: &Searcher<'_>,
    proarrows: &[ProarrowId],
    codomains: &[ProarrowId],
    lefts: Option<&BTreeSet<VArrowId>>,
    max: usize,
) -> Vec<Cell> {
    let e = s.vdc();
    let mut out = Vec::new();
    for p in scoped_paths(e, &[], proarrows, max) {
        let (a, b) = (p.start(), e.path_target(&p));
        let allowed = |f: &VArrowId| lefts.is_none_or(|set| set.contains(f));
        for f in e.arrows().filter(|f| e.dom(*f) == a && allowed(f)) {
            for g in e.arrows().filter(|g| e.dom(*g) == b && allowed(g)) {
                for k in codomains {
                    if e.src(*k) == e.cod(f) && e.tgt(*k) == e.cod(g) {
                        out.extend(s.cells(&p, f, g, *k));
                    }
                }
            }
        }
    }
    out
}

struct Represented<'r, 's, 'a> {
    emb: &'r Embedding<'s, 'a>,
    cache: BTreeMap<Cell, ProMorphism>,
}

impl Represented<'_, '_, '_> {
    fn get(&mut self, c: &Cell) -> Result<ProMorphism, EmbeddingError> {
        if let Some(m) = self.cache.get(c) {
            return Ok(m.clone());
        }
        let m = self.emb.represent_cell(c)?;
        self.cache.insert(c.clone(), m.clone());
        Ok(m)
    }
}

/// What the two sides of the functoriality equation depend on in a thin base:
/// the outer verticals, the outer ends of the inner row, the inner arities and
/// the objects along the pasted domain. Proarrows only enter through frames
/// that are the same on both sides.
type ArrangementClass = (VArrowId, VArrowId, VArrowId, VArrowId, Vec<usize>, Vec<ObjId>);

fn arrangement_class(e: &Vdc, beta: &Cell, inners: &[Cell]) -> ArrangementClass {
    let first = &inners[0];
    let last = &inners[inners.len() - 1];
    let mut chain = alloc::vec![first.frame.domain.start()];
    for c in inners {
        chain.extend(c.frame.domain.arrows().iter().map(|j| e.tgt(*j)));
    }
    (
        beta.frame.left,
        beta.frame.right,
        first.frame.left,
        last.frame.right,
        inners.iter().map(Cell::arity).collect(),
        chain,
    )
}

/// `|paste(beta, alphas)| = paste(|beta|, |alphas|)` for every two-level
/// arrangement whose proarrows lie in `proarrows` and whose pasted domain has
/// length at most `bounds.max_path`.
///
/// Over a thin base, cells are determined by their frames, so both sides are
/// determined by the arrangement's class and one arrangement per class is
/// compared.
pub fn check_functoriality(
    emb: &Embedding<'_, '_>,
    proarrows: &[ProarrowId],
    bounds: SearchBounds,
) -> Result<VerificationReport, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    let mut report = VerificationReport::new("functoriality").with_bounds(bounds);
    let max = bounds.max_path;
    let cells = scoped_cells(s, proarrows, proarrows, None, max);
    let mut by_codomain: BTreeMap<ProarrowId, Vec<Cell>> = BTreeMap::new();
    for c in &cells {
        by_codomain.entry(c.frame.codomain).or_default().push(c.clone());
    }
    let mut reps = Represented {
        emb,
        cache: BTreeMap::new(),
    };
    let thin = e.is_thin();
    let mut classes: BTreeSet<ArrangementClass> = BTreeSet::new();
    let mut arrangements: u64 = 0;
    let mut work: u64 = 0;
    for beta in cells.iter().filter(|c| c.arity() >= 1) {
        let mut stack: Vec<(Vec<Cell>, usize)> = alloc::vec![(Vec::new(), 0)];
        while let Some((chosen, used)) = stack.pop() {
            let i = chosen.len();
            if i == beta.arity() {
                arrangements += 1;
                if thin && !classes.insert(arrangement_class(e, beta, &chosen)) {
                    continue;
                }
                work += 1;
                if work > bounds.max_work {
                    report.truncate(format!("more than {} arrangements", bounds.max_work));
                    return Ok(report);
                }
                report.tick();
                let lhs = e.paste(beta, &chosen).map_err(EmbeddingError::from).and_then(|c| reps.get(&c));
                let rhs = (|| {
                    let outer = reps.get(beta)?;
                    let inners = chosen.iter().map(|c| reps.get(c)).collect::<Result<Vec<_>, _>>()?;
                    Ok::<_, EmbeddingError>(compose_morphisms(e, &outer, &inners)?)
                })();
                let what = || e.show_arrangement(beta, &chosen);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Ok(l), Ok(r)) => {
                        let at = l.components.iter().zip(&r.components).position(|(a, b)| a != b);
                        let detail = match at {
                            Some(t) => format!(
                                "component {:?}: {} vs {}",
                                l.tuples().tuple(t),
                                e.show_cell(&l.components[t]),
                                e.show_cell(&r.components[t])
                            ),
                            None => String::from("boundaries differ"),
                        };
                        report.fail(Counterexample::with_frames(
                            format!("{}: {detail}", what()),
                            chosen.iter().map(|c| c.frame.clone()).chain([beta.frame.clone()]).collect(),
                        ));
                    }
                    (Err(err), _) | (_, Err(err)) => report.fail_msg(format!("{}: {err}", what())),
                }
                continue;
            }
            let j = beta.frame.domain.arrows()[i];
            for alpha in by_codomain.get(&j).into_iter().flatten() {
                if used + alpha.arity() > max {
                    continue;
                }
                if let Some(prev) = chosen.last() {
                    if prev.frame.right != alpha.frame.left {
                        continue;
                    }
                }
                let mut next = chosen.clone();
                next.push(alpha.clone());
                stack.push((next, used + alpha.arity()));
            }
        }
    }
    report.note(format!(
        "{} cells over {} proarrows, {} represented, {arrangements} arrangements",
        cells.len(),
        proarrows.len(),
        reps.cache.len()
    ));
    if thin {
        report.note(format!("thin base: {} classes compared", classes.len()));
    }
    Ok(report)
}

fn base_fragment(
    emb: &Embedding<'_, '_>,
    objects: &[ObjId],
    arrows: &[VArrowId],
    proarrows: &[ProarrowId],
) -> Result<Fragment, EmbeddingError> {
    let mut fragment = Fragment::default();
    for a in objects {
        fragment.categories.push(emb.represent_object(*a)?);
    }
    for f in arrows {
        fragment.functors.push(emb.represent_arrow(*f)?);
    }
    for j in proarrows {
        let p = emb.represent_proarrow(*j)?;
        if !fragment.profunctors.iter().any(|q| Arc::ptr_eq(q, &p)) {
            fragment.profunctors.push(p);
        }
    }
    Ok(fragment)
}

fn materialize(
    emb: &Embedding<'_, '_>,
    objects: &[ObjId],
    arrows: &[VArrowId],
    proarrows: &[ProarrowId],
    bounds: SearchBounds,
) -> Result<Materialized, EmbeddingError> {
    let fragment = base_fragment(emb, objects, arrows, proarrows)?;
    Ok(materialize_vcat(emb.base(), &fragment, bounds)?)
}

/// For each path, the representative of its base composite witness satisfies
/// the composite universal property in the fragment made of the path's
/// representatives, the composite's representative and `arrows`.
pub fn check_composite_preservation(
    emb: &Embedding<'_, '_>,
    paths: &[Path],
    arrows: &[VArrowId],
    bounds: SearchBounds,
) -> Result<VerificationReport, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    let mut report = VerificationReport::new("preserves-composites").with_bounds(bounds);
    for p in paths {
        let mut child = VerificationReport::new(format!("composite {}", e.show_path(p)));
        let w = match s.find_composite(p) {
            Ok(w) => w,
            Err(err) => {
                child.fail_msg(format!("no base witness: {err}"));
                report.push(child);
                continue;
            }
        };
        let m = emb.represent_cell(&w.structure_cell)?;
        let mut pros: Vec<ProarrowId> = p.arrows().to_vec();
        pros.push(w.proarrow);
        let objects = [p.start(), e.path_target(p)];
        let mat = materialize(emb, &objects, arrows, &pros, bounds)?;
        let Some(cell) = mat.cell_of(&m) else {
            child.fail_msg(format!("|{}| is not a cell of the fragment", e.show_cell(&w.structure_cell)));
            report.push(child);
            continue;
        };
        let inner = Searcher::new(mat.vdc(), bounds);
        let r = inner.check_insertion(&cell);
        child.checked = r.checked;
        child.push(r);
        report.push(child);
    }
    report.note(format!("{} composite witnesses", paths.len()));
    Ok(report)
}

/// On the fragment of `suite`, restricted to its first two proarrows,
/// `strip_cell` and `represent_cell` are mutually inverse and the cells on
/// both sides are equinumerous.
pub fn check_fully_faithful(
    emb: &Embedding<'_, '_>,
    suite: &EmbeddingSuite,
) -> Result<VerificationReport, EmbeddingError> {
    let pros: Vec<ProarrowId> = suite.proarrows.iter().copied().take(2).collect();
    let objects = suite.all_objects(emb.base());
    check_fully_faithful_on(emb, &objects, &suite.arrows, &pros, suite.bounds)
}

pub fn check_fully_faithful_on(
    emb: &Embedding<'_, '_>,
    objects: &[ObjId],
    arrows: &[VArrowId],
    proarrows: &[ProarrowId],
    bounds: SearchBounds,
) -> Result<VerificationReport, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    let mut report = VerificationReport::new("ff-2cells").with_bounds(bounds);
    let mat = materialize(emb, objects, arrows, proarrows, bounds)?;
    let v = mat.vdc();

    // Morphism side: every cell of the fragment.
    let mut stripped = BTreeSet::new();
    let mut morphisms = 0u64;
    let mut base_arrows = BTreeSet::new();
    for f in v.arrows() {
        match emb.base_arrow_of(mat.functor(f)) {
            Some(g) => {
                base_arrows.insert(g);
            }
            None => report.fail_msg(format!("{} is not a representative", mat.functor(f).name)),
        }
    }
    let fragment_pros: Vec<ProarrowId> = v.proarrows().collect();
    for p in scoped_paths(v, &v.objects().collect::<Vec<_>>(), &fragment_pros, bounds.max_path) {
        let (a, b) = (p.start(), v.path_target(&p));
        for f in v.arrows().filter(|f| v.dom(*f) == a) {
            for g in v.arrows().filter(|g| v.dom(*g) == b) {
                for k in &fragment_pros {
                    if v.src(*k) != v.cod(f) || v.tgt(*k) != v.cod(g) {
                        continue;
                    }
                    let frame = Frame {
                        domain: p.clone(),
                        left: f,
                        right: g,
                        codomain: *k,
                    };
                    for c in v.frame_cells(&frame)? {
                        morphisms += 1;
                        report.tick();
                        let m = mat.morphism(&c).expect("fragment cell").clone();
                        match emb.strip_cell(&m).and_then(|alpha| Ok((emb.represent_cell(&alpha)?, alpha))) {
                            Ok((back, alpha)) if back == m => {
                                stripped.insert(alpha);
                            }
                            Ok((back, alpha)) => report.fail_msg(format!(
                                "{} strips to {} which represents as {}",
                                m.name,
                                e.show_cell(&alpha),
                                back.name
                            )),
                            Err(err) => report.fail_msg(format!("{}: {err}", m.name)),
                        }
                    }
                }
            }
        }
    }

    // Cell side: every base cell on the corresponding frames.
    let codomains = proarrows.to_vec();
    let cells = scoped_cells(s, proarrows, &codomains, Some(&base_arrows), bounds.max_path);
    for alpha in &cells {
        report.tick();
        let m = emb.represent_cell(alpha)?;
        if mat.cell_of(&m).is_none() {
            report.fail_msg(format!("|{}| is not a cell of the fragment", e.show_cell(alpha)));
            continue;
        }
        match emb.strip_cell(&m) {
            Ok(back) if back == *alpha => {}
            Ok(back) => report.fail_msg(format!(
                "|{}| strips to {}",
                e.show_cell(alpha),
                e.show_cell(&back)
            )),
            Err(err) => report.fail_msg(format!("|{}|: {err}", e.show_cell(alpha))),
        }
    }
    let base: BTreeSet<&Cell> = cells.iter().collect();
    if morphisms != cells.len() as u64 || stripped.len() != base.len() {
        report.fail_msg(format!(
            "{morphisms} morphisms in the fragment ({} distinct base cells stripped) but {} base cells",
            stripped.len(),
            cells.len()
        ));
    }
    report.note(format!(
        "{morphisms} morphisms and {} base cells over {} proarrows",
        cells.len(),
        proarrows.len()
    ));
    Ok(report)
}

/// `fullness_on_arrows` recovers `f` from `|f|`, `g . f` from `|g| . |f|`,
/// and every arrow from functors with non-identity structure after
/// flattening.
pub fn check_full_on_arrows(
    emb: &Embedding<'_, '_>,
    objects: &[ObjId],
    arrows: &[VArrowId],
) -> Result<VerificationReport, EmbeddingError> {
    let e = emb.base();
    let mut report = VerificationReport::new("full-arrows");
    let expect = |name: String, functor: &Arc<EnrichedFunctor>, arrow: VArrowId, flatten: bool| {
        let mut child = VerificationReport::new(name);
        child.tick();
        let target = if flatten {
            match emb.flatten_functor(functor) {
                Ok(flat) => {
                    child.push(flat.iso.report.clone());
                    Arc::new(flat.functor)
                }
                Err(err) => {
                    child.fail_msg(format!("flatten: {err}"));
                    return child;
                }
            }
        } else {
            functor.clone()
        };
        match emb.fullness_on_arrows(&target) {
            Ok(full) => {
                if full.arrow != arrow {
                    child.fail_msg(format!(
                        "recovered {} instead of {}",
                        e.arrow_name(full.arrow),
                        e.arrow_name(arrow)
                    ));
                }
                child.push(full.iso.report);
            }
            Err(err) => child.fail_msg(err.to_string()),
        }
        child
    };
    let mut all: Vec<VArrowId> = objects.iter().map(|a| e.identity(*a)).collect();
    all.extend(arrows.iter().copied());
    for f in &all {
        let rf = emb.represent_arrow(*f)?;
        report.push(expect(format!("|{}|", e.arrow_name(*f)), &rf, *f, false));
        let t = Arc::new(emb.tautological_functor(e.dom(*f))?);
        let shifted = Arc::new(compose_functors(e, &rf, &t).map_err(EmbeddingError::from)?);
        report.push(expect(format!("|{}| after the tautological functor", e.arrow_name(*f)), &shifted, *f, true));
        for g in all.iter().filter(|g| e.dom(**g) == e.cod(*f)) {
            let rg = emb.represent_arrow(*g)?;
            let gf = Arc::new(compose_functors(e, &rg, &rf).map_err(EmbeddingError::from)?);
            let expected = e.compose(*g, *f).expect("composable");
            report.push(expect(
                format!("|{}| . |{}|", e.arrow_name(*g), e.arrow_name(*f)),
                &gf,
                expected,
                false,
            ));
        }
    }
    Ok(report)
}

/// `coreflect(|K|) = K` with identity counit, and the hom profunctor of `|A|`
/// coreflects to the unit of `A`.
pub fn check_coreflection(
    emb: &Embedding<'_, '_>,
    objects: &[ObjId],
    proarrows: &[ProarrowId],
) -> Result<VerificationReport, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    let mut report = VerificationReport::new("coreflective");
    for k in proarrows {
        let rk = emb.represent_proarrow(*k)?;
        let c = emb.coreflect(&rk)?;
        let mut child = VerificationReport::new(format!("|{}|", e.proarrow_name(*k)));
        child.tick();
        if c.proarrow != *k {
            child.fail_msg(format!("coreflects to {}", e.proarrow_name(c.proarrow)));
        }
        child.tick();
        if !c.counit_is_iso() {
            child.fail_msg(format!("counit is not invertible at {:?}", c.non_invertible));
        }
        child.push(c.report);
        report.push(child);
    }
    for a in objects {
        let hom = emb.hom_profunctor(*a)?;
        let c = emb.coreflect(&hom)?;
        let mut child = VerificationReport::new(format!("hom {}", hom.source.name));
        child.tick();
        let unit = s.find_unit(*a).map_err(EmbeddingError::from)?.proarrow;
        if c.proarrow != unit {
            child.fail_msg(format!("coreflects to {}", e.proarrow_name(c.proarrow)));
        }
        child.tick();
        if !c.counit_is_iso() {
            child.fail_msg(format!("counit is not invertible at {:?}", c.non_invertible));
        }
        child.push(c.report);
        report.push(child);
    }
    Ok(report)
}

/// For composable `J`, `K`, the coreflection of the representative of their
/// base composite is isomorphic to the composite of the coreflections.
pub fn check_composite_coreflection(
    emb: &Embedding<'_, '_>,
    proarrows: &[ProarrowId],
) -> Result<VerificationReport, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    let mut report = VerificationReport::new("composite-coreflection");
    for j in proarrows {
        for k in proarrows.iter().filter(|k| e.src(**k) == e.tgt(*j)) {
            let mut child = VerificationReport::new(format!("{} {}", e.proarrow_name(*j), e.proarrow_name(*k)));
            child.tick();
            let jk = s.find_composite(&e.path(&[*j, *k])?)?;
            let whole = emb.coreflect(&emb.represent_proarrow(jk.proarrow)?)?;
            let jbar = emb.coreflect(&emb.represent_proarrow(*j)?)?.proarrow;
            let kbar = emb.coreflect(&emb.represent_proarrow(*k)?)?.proarrow;
            let parts = s.find_composite(&e.path(&[jbar, kbar])?)?;
            if s.proarrow_iso(whole.proarrow, parts.proarrow).is_none() {
                child.fail_msg(format!(
                    "{} is not isomorphic to {}",
                    e.proarrow_name(whole.proarrow),
                    e.proarrow_name(parts.proarrow)
                ));
            }
            report.push(child);
        }
    }
    Ok(report)
}

/// Whether `|P|` and `|Q|` are inverse up to isomorphism: their composites,
/// represented by the composites of `P` and `Q`, are isomorphic to the hom
/// profunctors componentwise.
fn representatives_inverse(
    emb: &Embedding<'_, '_>,
    p: ProarrowId,
    q: ProarrowId,
) -> Result<bool, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    for (x, y) in [(p, q), (q, p)] {
        let xy = s.find_composite(&e.path(&[x, y])?)?.proarrow;
        let rep = emb.represent_proarrow(xy)?;
        let hom = emb.hom_profunctor(e.src(x))?;
        for (c, h) in rep.component.iter().zip(&hom.component) {
            if s.proarrow_iso(*c, *h).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `P` and `Q` are inverse up to isomorphism in the base.
fn base_inverse(emb: &Embedding<'_, '_>, p: ProarrowId, q: ProarrowId) -> Result<bool, EmbeddingError> {
    let s = emb.searcher();
    let e = emb.base();
    for (x, y) in [(p, q), (q, p)] {
        let xy = s.find_composite(&e.path(&[x, y])?)?.proarrow;
        let unit = s.find_unit(e.src(x))?.proarrow;
        if s.proarrow_iso(xy, unit).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Over every candidate pair `P : A -|> B`, `Q : B -|> A`, inverse
/// representatives must give inverse base proarrows. The pair passes when
/// some candidate is inverse exactly if `pair.equivalent`.
pub fn check_morita(emb: &Embedding<'_, '_>, pair: MoritaPair) -> Result<VerificationReport, EmbeddingError> {
    let e = emb.base();
    let (a, b) = (pair.a, pair.b);
    let mut report = VerificationReport::new(format!("morita {} {}", e.obj_name(a), e.obj_name(b)));
    let mut witnesses = Vec::new();
    for p in e.proarrows_between(a, b) {
        for q in e.proarrows_between(b, a) {
            report.tick();
            let upstairs = representatives_inverse(emb, *p, *q)?;
            let downstairs = base_inverse(emb, *p, *q)?;
            if upstairs && !downstairs {
                report.fail_msg(format!(
                    "|{}|, |{}| are inverse but {}, {} are not",
                    e.proarrow_name(*p),
                    e.proarrow_name(*q),
                    e.proarrow_name(*p),
                    e.proarrow_name(*q)
                ));
            }
            if upstairs {
                witnesses.push((*p, *q));
            }
        }
    }
    match (witnesses.first(), pair.equivalent) {
        (Some((p, q)), true) => report.note(format!(
            "witnessed by {}, {}",
            e.proarrow_name(*p),
            e.proarrow_name(*q)
        )),
        (None, false) => report.note("no candidate pair is inverse"),
        (Some((p, q)), false) => report.fail_msg(format!(
            "expected no equivalence, but {}, {} are inverse",
            e.proarrow_name(*p),
            e.proarrow_name(*q)
        )),
        (None, true) => report.fail_msg("no candidate pair is inverse"),
    }
    Ok(report)
}
