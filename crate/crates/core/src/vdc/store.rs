use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{CellId, Frame, FrameTest, Path, VArrowId};

/// Decides cell existence in a thin store.
///
/// The oracle is asked for a test specialised to one domain path, so that any
/// per-path work (for matrices, the product along the path) is done once and
/// reused across all vertical boundaries and codomains.
pub trait ThinOracle: Send + Sync {
    fn domain_test<'a>(&'a self, domain: &Path) -> FrameTest<'a>;

    fn exists(&self, frame: &Frame) -> bool {
        (self.domain_test(&frame.domain))(frame.left, frame.right, frame.codomain)
    }

    /// A summary of a domain path such that two paths with the same ends and
    /// the same key have identical tests. `None` if the oracle has no such
    /// summary.
    fn domain_key(&self, _domain: &Path) -> Option<Vec<u8>> {
        None
    }
}

/// Computes substitution results that are not listed explicitly in a table.
pub trait PasteResolver: Send + Sync {
    fn paste(&self, outer: CellId, inners: &[CellId]) -> Option<CellId>;
    fn whisker(&self, cell: CellId, arrow: VArrowId) -> Option<CellId>;
}

#[derive(Clone)]
pub struct CellTable {
    pub(crate) frames: Vec<Frame>,
    pub(crate) names: Vec<String>,
    pub(crate) by_frame: BTreeMap<Frame, Vec<CellId>>,
    pub(crate) identities: Vec<CellId>,
    pub(crate) paste: BTreeMap<(CellId, Vec<CellId>), CellId>,
    pub(crate) whisker: BTreeMap<(CellId, VArrowId), CellId>,
    pub(crate) resolver: Option<Arc<dyn PasteResolver>>,
}

impl CellTable {
    pub(crate) fn new() -> Self {
        CellTable {
            frames: Vec::new(),
            names: Vec::new(),
            by_frame: BTreeMap::new(),
            identities: Vec::new(),
            paste: BTreeMap::new(),
            whisker: BTreeMap::new(),
            resolver: None,
        }
    }

    pub(crate) fn push(&mut self, name: String, frame: Frame) -> CellId {
        let id = CellId(self.frames.len() as u32);
        self.by_frame.entry(frame.clone()).or_default().push(id);
        self.frames.push(frame);
        self.names.push(name);
        id
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, id: CellId) -> Option<&Frame> {
        self.frames.get(id.index())
    }

    pub fn name(&self, id: CellId) -> Option<&str> {
        self.names.get(id.index()).map(String::as_str)
    }

    pub fn cells_on(&self, frame: &Frame) -> &[CellId] {
        self.by_frame.get(frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn paste_entries(&self) -> impl Iterator<Item = (&(CellId, Vec<CellId>), &CellId)> {
        self.paste.iter()
    }

    pub fn whisker_entries(&self) -> impl Iterator<Item = (&(CellId, VArrowId), &CellId)> {
        self.whisker.iter()
    }

    pub fn lookup_paste(&self, outer: CellId, inners: &[CellId]) -> Option<CellId> {
        let key = (outer, inners.to_vec());
        if let Some(found) = self.paste.get(&key) {
            return Some(*found);
        }
        self.resolver.as_ref().and_then(|r| r.paste(outer, inners))
    }

    pub fn lookup_whisker(&self, cell: CellId, arrow: VArrowId) -> Option<CellId> {
        if let Some(found) = self.whisker.get(&(cell, arrow)) {
            return Some(*found);
        }
        self.resolver.as_ref().and_then(|r| r.whisker(cell, arrow))
    }

    /// Overwrite one substitution entry. Used to build deliberately broken
    /// instances for negative tests.
    pub fn set_paste(&mut self, outer: CellId, inners: Vec<CellId>, result: CellId) {
        self.paste.insert((outer, inners), result);
    }
}

/// Where a virtual double category keeps its 2-cells.
#[derive(Clone)]
pub enum CellStore {
    /// Finitely many named cells and an explicit substitution table.
    Tabulated(CellTable),
    /// At most one cell per frame; existence decided by the oracle.
    Thin(Arc<dyn ThinOracle>),
}
