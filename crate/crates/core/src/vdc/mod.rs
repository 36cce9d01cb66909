//! Finite virtual double categories.
//!
//! A 2-cell has a domain that is a composable path of proarrows (possibly
//! empty, in which case it is anchored at an object), two vertical arrows and
//! a single codomain proarrow. Substitution ([`Vdc::paste`]) plugs a list of
//! cells into the domain of an outer cell.

mod builder;
mod laws;
mod store;

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

pub use builder::VdcBuilder;
pub use laws::{check_vdc_laws, check_vdc_laws_scoped, LawScope};
pub use store::{CellStore, CellTable, PasteResolver, ThinOracle};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// An object of the vertical category.
    ObjId
);
id_type!(
    /// A vertical arrow.
    VArrowId
);
id_type!(
    /// A horizontal arrow (proarrow).
    ProarrowId
);
id_type!(
    /// A cell of a tabulated store.
    CellId
);

/// A composable list of proarrows. An empty path still knows where it sits.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    start: ObjId,
    arrows: Vec<ProarrowId>,
}

impl Path {
    pub fn empty(anchor: ObjId) -> Path {
        Path {
            start: anchor,
            arrows: Vec::new(),
        }
    }

    /// Build a path without checking composability; `start` must be the source
    /// of the first proarrow when there is one. Use [`Vdc::path`] for a checked
    /// constructor.
    pub fn from_parts(start: ObjId, arrows: Vec<ProarrowId>) -> Path {
        Path { start, arrows }
    }

    pub fn start(&self) -> ObjId {
        self.start
    }

    pub fn arrows(&self) -> &[ProarrowId] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Concatenate, keeping this path's start. The caller guarantees that
    /// `other` starts where `self` ends.
    pub fn concat(&self, other: &Path) -> Path {
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Path {
            start: self.start,
            arrows,
        }
    }
}

/// Boundary of a 2-cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Frame {
    pub domain: Path,
    pub left: VArrowId,
    pub right: VArrowId,
    pub codomain: ProarrowId,
}

/// A 2-cell. In tabulated stores cells are compared by id, in thin stores the
/// frame is the whole identity of the cell (`id` is `None`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub frame: Frame,
    pub id: Option<CellId>,
}

impl Cell {
    pub fn thin(frame: Frame) -> Cell {
        Cell { frame, id: None }
    }

    pub fn domain(&self) -> &Path {
        &self.frame.domain
    }

    pub fn arity(&self) -> usize {
        self.frame.domain.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VdcError {
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("not composable at inner position {index}: {reason}")]
    NonComposable { index: usize, reason: String },
    #[error("missing cell: {0}")]
    MissingCell(String),
    #[error("substitution table is corrupt: {0}")]
    CorruptTable(String),
    #[error("cell does not belong to this store: {0}")]
    ForeignCell(String),
    #[error("invalid construction: {0}")]
    Construction(String),
}

#[derive(Debug, Clone)]
pub(crate) struct ArrowData {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

#[derive(Debug, Clone)]
pub(crate) struct ProarrowData {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

/// The category of vertical arrows, with a total composition table on
/// composable pairs.
#[derive(Debug, Clone)]
pub struct VerticalCategory {
    pub(crate) objects: Vec<String>,
    pub(crate) arrows: Vec<ArrowData>,
    pub(crate) identities: Vec<VArrowId>,
    pub(crate) compose: BTreeMap<(VArrowId, VArrowId), VArrowId>,
    pub(crate) between: Vec<Vec<VArrowId>>,
}

impl VerticalCategory {
    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(|i| ObjId(i as u32))
    }

    pub fn arrows(&self) -> impl Iterator<Item = VArrowId> + '_ {
        (0..self.arrows.len()).map(|i| VArrowId(i as u32))
    }

    pub fn dom(&self, f: VArrowId) -> ObjId {
        self.arrows[f.index()].dom
    }

    pub fn cod(&self, f: VArrowId) -> ObjId {
        self.arrows[f.index()].cod
    }

    pub fn identity(&self, a: ObjId) -> VArrowId {
        self.identities[a.index()]
    }

    pub fn is_identity(&self, f: VArrowId) -> bool {
        self.identities[self.dom(f).index()] == f
    }

    /// `g . f`, defined when `cod f = dom g`.
    pub fn compose(&self, g: VArrowId, f: VArrowId) -> Option<VArrowId> {
        self.compose.get(&(g, f)).copied()
    }

    /// Arrows `a -> b`.
    pub fn between(&self, a: ObjId, b: ObjId) -> &[VArrowId] {
        &self.between[a.index() * self.objects.len() + b.index()]
    }

    pub fn into_object(&self, b: ObjId) -> impl Iterator<Item = VArrowId> + '_ {
        self.arrows().filter(move |f| self.cod(*f) == b)
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct NameIndex {
    pub objects: BTreeMap<String, ObjId>,
    pub arrows: BTreeMap<String, VArrowId>,
    pub proarrows: BTreeMap<String, ProarrowId>,
    pub cells: BTreeMap<String, CellId>,
}

/// A finite virtual double category.
#[derive(Clone)]
pub struct Vdc {
    pub(crate) name: String,
    pub(crate) vertical: VerticalCategory,
    pub(crate) proarrows: Vec<ProarrowData>,
    pub(crate) pro_between: Vec<Vec<ProarrowId>>,
    pub(crate) store: CellStore,
    pub(crate) names: NameIndex,
}

impl fmt::Debug for Vdc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Vdc")
            .field("name", &self.name)
            .field("objects", &self.vertical.objects.len())
            .field("arrows", &self.vertical.arrows.len())
            .field("proarrows", &self.proarrows.len())
            .field("thin", &self.is_thin())
            .finish()
    }
}

impl Vdc {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertical(&self) -> &VerticalCategory {
        &self.vertical
    }

    pub fn store(&self) -> &CellStore {
        &self.store
    }

    /// Mutable access to the substitution table, for building mutants.
    pub fn table_mut(&mut self) -> Option<&mut CellTable> {
        match &mut self.store {
            CellStore::Tabulated(t) => Some(t),
            CellStore::Thin(_) => None,
        }
    }

    pub fn table(&self) -> Option<&CellTable> {
        match &self.store {
            CellStore::Tabulated(t) => Some(t),
            CellStore::Thin(_) => None,
        }
    }

    pub fn is_thin(&self) -> bool {
        matches!(self.store, CellStore::Thin(_))
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        self.vertical.objects()
    }

    pub fn arrows(&self) -> impl Iterator<Item = VArrowId> + '_ {
        self.vertical.arrows()
    }

    pub fn proarrows(&self) -> impl Iterator<Item = ProarrowId> + '_ {
        (0..self.proarrows.len()).map(|i| ProarrowId(i as u32))
    }

    pub fn proarrow_count(&self) -> usize {
        self.proarrows.len()
    }

    pub fn src(&self, j: ProarrowId) -> ObjId {
        self.proarrows[j.index()].src
    }

    pub fn tgt(&self, j: ProarrowId) -> ObjId {
        self.proarrows[j.index()].tgt
    }

    pub fn dom(&self, f: VArrowId) -> ObjId {
        self.vertical.dom(f)
    }

    pub fn cod(&self, f: VArrowId) -> ObjId {
        self.vertical.cod(f)
    }

    pub fn identity(&self, a: ObjId) -> VArrowId {
        self.vertical.identity(a)
    }

    pub fn compose(&self, g: VArrowId, f: VArrowId) -> Option<VArrowId> {
        self.vertical.compose(g, f)
    }

    /// Proarrows `a -|> b`.
    pub fn proarrows_between(&self, a: ObjId, b: ObjId) -> &[ProarrowId] {
        &self.pro_between[a.index() * self.vertical.objects.len() + b.index()]
    }

    pub fn obj_name(&self, a: ObjId) -> &str {
        &self.vertical.objects[a.index()]
    }

    pub fn arrow_name(&self, f: VArrowId) -> &str {
        &self.vertical.arrows[f.index()].name
    }

    pub fn proarrow_name(&self, j: ProarrowId) -> &str {
        &self.proarrows[j.index()].name
    }

    pub fn find_object(&self, name: &str) -> Result<ObjId, VdcError> {
        self.names.objects.get(name).copied().ok_or(VdcError::Unknown {
            kind: "object",
            name: name.to_string(),
        })
    }

    pub fn find_arrow(&self, name: &str) -> Result<VArrowId, VdcError> {
        self.names.arrows.get(name).copied().ok_or(VdcError::Unknown {
            kind: "vertical arrow",
            name: name.to_string(),
        })
    }

    pub fn find_proarrow(&self, name: &str) -> Result<ProarrowId, VdcError> {
        self.names.proarrows.get(name).copied().ok_or(VdcError::Unknown {
            kind: "proarrow",
            name: name.to_string(),
        })
    }

    pub fn find_cell(&self, name: &str) -> Result<Cell, VdcError> {
        let id = self.names.cells.get(name).copied().ok_or(VdcError::Unknown {
            kind: "cell",
            name: name.to_string(),
        })?;
        self.cell_by_id(id)
    }

    /// Register an extra name for an existing proarrow.
    pub fn alias_proarrow(&mut self, name: &str, j: ProarrowId) -> Result<(), VdcError> {
        if let Some(existing) = self.names.proarrows.get(name) {
            if *existing != j {
                return Err(VdcError::Construction(format!(
                    "name `{name}` already names another proarrow"
                )));
            }
            return Ok(());
        }
        self.names.proarrows.insert(name.to_string(), j);
        Ok(())
    }

    pub fn cell_by_id(&self, id: CellId) -> Result<Cell, VdcError> {
        let table = self
            .table()
            .ok_or_else(|| VdcError::ForeignCell(format!("cell #{} in a thin store", id.0)))?;
        let frame = table.frame(id).ok_or(VdcError::Unknown {
            kind: "cell",
            name: format!("#{}", id.0),
        })?;
        Ok(Cell {
            frame: frame.clone(),
            id: Some(id),
        })
    }

    /// Checked path constructor for a non-empty list of proarrows.
    pub fn path(&self, arrows: &[ProarrowId]) -> Result<Path, VdcError> {
        let first = arrows
            .first()
            .ok_or_else(|| VdcError::MalformedFrame("empty path needs an anchor".into()))?;
        let path = Path::from_parts(self.src(*first), arrows.to_vec());
        self.check_path(&path)?;
        Ok(path)
    }

    pub fn path_target(&self, path: &Path) -> ObjId {
        match path.arrows.last() {
            Some(j) => self.tgt(*j),
            None => path.start,
        }
    }

    pub fn check_path(&self, path: &Path) -> Result<(), VdcError> {
        if path.start.index() >= self.vertical.objects.len() {
            return Err(VdcError::MalformedFrame(format!(
                "unknown anchor object #{}",
                path.start.0
            )));
        }
        let mut at = path.start;
        for (i, j) in path.arrows.iter().enumerate() {
            if j.index() >= self.proarrows.len() {
                return Err(VdcError::MalformedFrame(format!("unknown proarrow #{}", j.0)));
            }
            if self.src(*j) != at {
                return Err(VdcError::MalformedFrame(format!(
                    "path entry {i} ({}) starts at {} but the previous entry ends at {}",
                    self.proarrow_name(*j),
                    self.obj_name(self.src(*j)),
                    self.obj_name(at)
                )));
            }
            at = self.tgt(*j);
        }
        Ok(())
    }

    pub fn check_frame(&self, frame: &Frame) -> Result<(), VdcError> {
        self.check_path(&frame.domain)?;
        let n_arrows = self.vertical.arrows.len();
        if frame.left.index() >= n_arrows || frame.right.index() >= n_arrows {
            return Err(VdcError::MalformedFrame("unknown vertical arrow".into()));
        }
        if frame.codomain.index() >= self.proarrows.len() {
            return Err(VdcError::MalformedFrame("unknown codomain proarrow".into()));
        }
        let src = frame.domain.start;
        let tgt = self.path_target(&frame.domain);
        let checks = [
            (self.dom(frame.left) == src, "domain of the left arrow is not the source of the domain path"),
            (self.dom(frame.right) == tgt, "domain of the right arrow is not the target of the domain path"),
            (self.cod(frame.left) == self.src(frame.codomain), "codomain of the left arrow is not the source of the codomain"),
            (self.cod(frame.right) == self.tgt(frame.codomain), "codomain of the right arrow is not the target of the codomain"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(VdcError::MalformedFrame(format!("{msg}: {}", self.show_frame(frame))));
            }
        }
        Ok(())
    }

    /// All cells on a frame: at most one in a thin store.
    pub fn frame_cells(&self, frame: &Frame) -> Result<Vec<Cell>, VdcError> {
        self.check_frame(frame)?;
        Ok(match &self.store {
            CellStore::Thin(oracle) => {
                if oracle.exists(frame) {
                    alloc::vec![Cell::thin(frame.clone())]
                } else {
                    Vec::new()
                }
            }
            CellStore::Tabulated(table) => table
                .cells_on(frame)
                .iter()
                .map(|id| Cell {
                    frame: frame.clone(),
                    id: Some(*id),
                })
                .collect(),
        })
    }

    /// Whether the cell is present in this store (with the frame it claims).
    pub fn contains(&self, cell: &Cell) -> bool {
        if self.check_frame(&cell.frame).is_err() {
            return false;
        }
        match (&self.store, cell.id) {
            (CellStore::Thin(oracle), None) => oracle.exists(&cell.frame),
            (CellStore::Tabulated(table), Some(id)) => table.frame(id) == Some(&cell.frame),
            _ => false,
        }
    }

    pub fn identity_cell(&self, j: ProarrowId) -> Result<Cell, VdcError> {
        if j.index() >= self.proarrows.len() {
            return Err(VdcError::Unknown {
                kind: "proarrow",
                name: format!("#{}", j.0),
            });
        }
        let frame = Frame {
            domain: Path::from_parts(self.src(j), alloc::vec![j]),
            left: self.identity(self.src(j)),
            right: self.identity(self.tgt(j)),
            codomain: j,
        };
        match &self.store {
            CellStore::Thin(_) => Ok(Cell::thin(frame)),
            CellStore::Tabulated(table) => Ok(Cell {
                frame,
                id: Some(table.identities[j.index()]),
            }),
        }
    }

    /// Frame of the substitution of `inners` into `outer`, after checking the
    /// arrangement is composable.
    pub fn paste_frame(&self, outer: &Frame, inners: &[&Frame]) -> Result<Frame, VdcError> {
        let k = outer.domain.len();
        if k == 0 {
            if !inners.is_empty() {
                return Err(VdcError::NonComposable {
                    index: 0,
                    reason: "a nullary outer cell takes no inner cells".into(),
                });
            }
            return Ok(outer.clone());
        }
        if inners.len() != k {
            return Err(VdcError::NonComposable {
                index: inners.len().min(k),
                reason: format!("expected {k} inner cells, got {}", inners.len()),
            });
        }
        for (i, inner) in inners.iter().enumerate() {
            if inner.codomain != outer.domain.arrows[i] {
                return Err(VdcError::NonComposable {
                    index: i,
                    reason: format!(
                        "inner codomain {} does not match outer domain entry {}",
                        self.proarrow_name(inner.codomain),
                        self.proarrow_name(outer.domain.arrows[i])
                    ),
                });
            }
            if i + 1 < k && inner.right != inners[i + 1].left {
                return Err(VdcError::NonComposable {
                    index: i + 1,
                    reason: format!(
                        "right arrow {} of inner {i} differs from left arrow {} of inner {}",
                        self.arrow_name(inner.right),
                        self.arrow_name(inners[i + 1].left),
                        i + 1
                    ),
                });
            }
        }
        let mut arrows = Vec::new();
        for inner in inners {
            arrows.extend_from_slice(&inner.domain.arrows);
        }
        let domain = Path::from_parts(inners[0].domain.start, arrows);
        let left = self.compose(outer.left, inners[0].left).ok_or_else(|| {
            VdcError::NonComposable {
                index: 0,
                reason: "left arrows do not compose".into(),
            }
        })?;
        let right = self.compose(outer.right, inners[k - 1].right).ok_or_else(|| {
            VdcError::NonComposable {
                index: k - 1,
                reason: "right arrows do not compose".into(),
            }
        })?;
        Ok(Frame {
            domain,
            left,
            right,
            codomain: outer.codomain,
        })
    }

    /// Substitute `inners` into the domain of `outer`.
    pub fn paste(&self, outer: &Cell, inners: &[Cell]) -> Result<Cell, VdcError> {
        let refs: Vec<&Cell> = inners.iter().collect();
        self.paste_refs(outer, &refs)
    }

    /// [`Vdc::paste`] on borrowed inner cells.
    pub fn paste_refs(&self, outer: &Cell, inners: &[&Cell]) -> Result<Cell, VdcError> {
        let inner_frames: Vec<&Frame> = inners.iter().map(|c| &c.frame).collect();
        let frame = self.paste_frame(&outer.frame, &inner_frames)?;
        if outer.frame.domain.is_empty() {
            return Ok(outer.clone());
        }
        match &self.store {
            CellStore::Thin(oracle) => {
                if outer.id.is_some() || inners.iter().any(|c| c.id.is_some()) {
                    return Err(VdcError::ForeignCell("tabulated cell in a thin store".into()));
                }
                if oracle.exists(&frame) {
                    Ok(Cell::thin(frame))
                } else {
                    Err(VdcError::MissingCell(format!(
                        "no cell on the pasted frame {}",
                        self.show_frame(&frame)
                    )))
                }
            }
            CellStore::Tabulated(table) => {
                let outer_id = outer
                    .id
                    .ok_or_else(|| VdcError::ForeignCell("thin cell in a tabulated store".into()))?;
                let mut ids = Vec::with_capacity(inners.len());
                for c in inners {
                    ids.push(c.id.ok_or_else(|| {
                        VdcError::ForeignCell("thin cell in a tabulated store".into())
                    })?);
                }
                let result = table.lookup_paste(outer_id, &ids).ok_or_else(|| {
                    VdcError::MissingCell(format!(
                        "no table entry for {}",
                        self.show_arrangement(outer, &inners.iter().map(|c| (*c).clone()).collect::<Vec<_>>())
                    ))
                })?;
                let found = table.frame(result).ok_or_else(|| {
                    VdcError::CorruptTable(format!("entry points at unknown cell #{}", result.0))
                })?;
                if *found != frame {
                    return Err(VdcError::CorruptTable(format!(
                        "{} is listed as {} whose frame is {}, expected {}",
                        self.show_arrangement(outer, &inners.iter().map(|c| (*c).clone()).collect::<Vec<_>>()),
                        table.name(result).unwrap_or("?"),
                        self.show_frame(found),
                        self.show_frame(&frame)
                    )));
                }
                Ok(Cell {
                    frame,
                    id: Some(result),
                })
            }
        }
    }

    /// Frame of a nullary cell precomposed with a vertical arrow into its anchor.
    pub fn whisker_frame(&self, frame: &Frame, f: VArrowId) -> Result<Frame, VdcError> {
        if !frame.domain.is_empty() {
            return Err(VdcError::NonComposable {
                index: 0,
                reason: "only nullary cells can be precomposed with a vertical arrow".into(),
            });
        }
        if self.cod(f) != frame.domain.start {
            return Err(VdcError::NonComposable {
                index: 0,
                reason: format!(
                    "arrow {} does not land in the anchor {}",
                    self.arrow_name(f),
                    self.obj_name(frame.domain.start)
                ),
            });
        }
        let left = self.compose(frame.left, f).ok_or_else(|| VdcError::NonComposable {
            index: 0,
            reason: "left arrows do not compose".into(),
        })?;
        let right = self.compose(frame.right, f).ok_or_else(|| VdcError::NonComposable {
            index: 0,
            reason: "right arrows do not compose".into(),
        })?;
        Ok(Frame {
            domain: Path::empty(self.dom(f)),
            left,
            right,
            codomain: frame.codomain,
        })
    }

    /// Precompose a nullary cell with a vertical arrow into its anchor.
    pub fn whisker(&self, cell: &Cell, f: VArrowId) -> Result<Cell, VdcError> {
        let frame = self.whisker_frame(&cell.frame, f)?;
        if self.vertical.is_identity(f) {
            return Ok(cell.clone());
        }
        match &self.store {
            CellStore::Thin(oracle) => {
                if oracle.exists(&frame) {
                    Ok(Cell::thin(frame))
                } else {
                    Err(VdcError::MissingCell(format!(
                        "no cell on the whiskered frame {}",
                        self.show_frame(&frame)
                    )))
                }
            }
            CellStore::Tabulated(table) => {
                let id = cell
                    .id
                    .ok_or_else(|| VdcError::ForeignCell("thin cell in a tabulated store".into()))?;
                let result = table.lookup_whisker(id, f).ok_or_else(|| {
                    VdcError::MissingCell(format!(
                        "no whisker entry for {} along {}",
                        self.show_cell(cell),
                        self.arrow_name(f)
                    ))
                })?;
                let found = table.frame(result).ok_or_else(|| {
                    VdcError::CorruptTable(format!("entry points at unknown cell #{}", result.0))
                })?;
                if *found != frame {
                    return Err(VdcError::CorruptTable(format!(
                        "whisker of {} along {} has frame {}, expected {}",
                        self.show_cell(cell),
                        self.arrow_name(f),
                        self.show_frame(found),
                        self.show_frame(&frame)
                    )));
                }
                Ok(Cell {
                    frame,
                    id: Some(result),
                })
            }
        }
    }

    /// For thin stores whose oracle summarises paths: the summary of `domain`.
    /// Paths with equal ends and equal keys support exactly the same cells.
    pub fn domain_key(&self, domain: &Path) -> Option<Vec<u8>> {
        match &self.store {
            CellStore::Thin(oracle) => oracle.domain_key(domain),
            CellStore::Tabulated(_) => None,
        }
    }

    /// A reusable query for all cells whose domain is `domain`.
    pub fn domain_query(&self, domain: &Path) -> DomainQuery<'_> {
        let test = match &self.store {
            CellStore::Thin(oracle) => Some(oracle.domain_test(domain)),
            CellStore::Tabulated(_) => None,
        };
        DomainQuery {
            vdc: self,
            domain: domain.clone(),
            source: domain.start,
            target: self.path_target(domain),
            test,
        }
    }

    pub fn show_path(&self, path: &Path) -> String {
        if path.is_empty() {
            return format!("[@{}]", self.obj_name(path.start));
        }
        let names: Vec<&str> = path.arrows.iter().map(|j| self.proarrow_name(*j)).collect();
        format!("[{}]", names.join(" "))
    }

    pub fn show_frame(&self, frame: &Frame) -> String {
        format!(
            "{} / ({}, {}) => {}",
            self.show_path(&frame.domain),
            self.arrow_name(frame.left),
            self.arrow_name(frame.right),
            self.proarrow_name(frame.codomain)
        )
    }

    pub fn show_cell(&self, cell: &Cell) -> String {
        match (cell.id, self.table()) {
            (Some(id), Some(table)) => String::from(table.name(id).unwrap_or("?")),
            _ => format!("<{}>", self.show_frame(&cell.frame)),
        }
    }

    pub fn show_arrangement(&self, outer: &Cell, inners: &[Cell]) -> String {
        let names: Vec<String> = inners.iter().map(|c| self.show_cell(c)).collect();
        format!("{}({})", self.show_cell(outer), names.join(", "))
    }
}

/// Decides cell existence on the frames over one domain.
pub type FrameTest<'a> = Box<dyn Fn(VArrowId, VArrowId, ProarrowId) -> bool + 'a>;

/// Cells with a fixed domain, for repeated queries over boundaries.
pub struct DomainQuery<'a> {
    vdc: &'a Vdc,
    domain: Path,
    source: ObjId,
    target: ObjId,
    test: Option<FrameTest<'a>>,
}

impl DomainQuery<'_> {
    pub fn domain(&self) -> &Path {
        &self.domain
    }

    fn boundary_ok(&self, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> bool {
        let v = self.vdc;
        v.dom(left) == self.source
            && v.dom(right) == self.target
            && v.cod(left) == v.src(codomain)
            && v.cod(right) == v.tgt(codomain)
    }

    /// Whether some cell sits on the frame with this boundary.
    pub fn exists(&self, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> bool {
        if !self.boundary_ok(left, right, codomain) {
            return false;
        }
        match (&self.test, &self.vdc.store) {
            (Some(test), _) => test(left, right, codomain),
            (None, CellStore::Tabulated(table)) => !table
                .cells_on(&self.frame(left, right, codomain))
                .is_empty(),
            (None, CellStore::Thin(_)) => false,
        }
    }

    pub fn frame(&self, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> Frame {
        Frame {
            domain: self.domain.clone(),
            left,
            right,
            codomain,
        }
    }

    pub fn cells(&self, left: VArrowId, right: VArrowId, codomain: ProarrowId) -> Vec<Cell> {
        if !self.boundary_ok(left, right, codomain) {
            return Vec::new();
        }
        let frame = self.frame(left, right, codomain);
        match (&self.test, &self.vdc.store) {
            (Some(test), _) => {
                if test(left, right, codomain) {
                    alloc::vec![Cell::thin(frame)]
                } else {
                    Vec::new()
                }
            }
            (None, CellStore::Tabulated(table)) => table
                .cells_on(&frame)
                .iter()
                .map(|id| Cell {
                    frame: frame.clone(),
                    id: Some(*id),
                })
                .collect(),
            (None, CellStore::Thin(_)) => Vec::new(),
        }
    }
}

/// Every composable path of length at most `max_len`, shortest first, in
/// declaration order within a length. Empty paths come first, one per object.
pub fn paths_up_to(vdc: &Vdc, max_len: usize) -> Vec<Path> {
    paths_over(vdc, max_len, |_| true)
}

/// Like [`paths_up_to`], using only the proarrows for which `keep` holds.
pub fn paths_over(vdc: &Vdc, max_len: usize, keep: impl Fn(ProarrowId) -> bool) -> Vec<Path> {
    let mut out: Vec<Path> = vdc.objects().map(Path::empty).collect();
    let mut frontier: Vec<Path> = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            let end = vdc.path_target(p);
            for b in vdc.objects() {
                for j in vdc.proarrows_between(end, b).iter().filter(|j| keep(**j)) {
                    let mut arrows = p.arrows.clone();
                    arrows.push(*j);
                    next.push(Path::from_parts(p.start, arrows));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Paths of length at most `max_len` ending at `end` (for left flanks) or
/// starting at it (for right flanks).
pub fn flanks(vdc: &Vdc, max_len: usize, end: ObjId, on_left: bool) -> Vec<Path> {
    let mut out = alloc::vec![Path::empty(end)];
    let mut frontier = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for other in vdc.objects() {
                if on_left {
                    for j in vdc.proarrows_between(other, p.start) {
                        let mut arrows = alloc::vec![*j];
                        arrows.extend_from_slice(&p.arrows);
                        next.push(Path::from_parts(other, arrows));
                    }
                } else {
                    let at = vdc.path_target(p);
                    for j in vdc.proarrows_between(at, other) {
                        let mut arrows = p.arrows.clone();
                        arrows.push(*j);
                        next.push(Path::from_parts(p.start, arrows));
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{b2, f1, terminal};

    #[test]
    fn path_counts_follow_the_proarrow_graph() {
        // One object and one endo-proarrow: exactly one path of each length.
        let v = f1();
        assert_eq!(paths_up_to(&v, 3).len(), 4);
        let e = b2();
        let v = e.vdc();
        // Two empty paths and the 26 proarrows.
        let short = paths_up_to(v, 1);
        assert_eq!(short.len(), 2 + 26);
        let uv = v.find_proarrow("UV_11").unwrap();
        let vu = v.find_proarrow("VU_11").unwrap();
        // UV_11 and VU_11 alternate, so each start has one path per length.
        let only = paths_over(v, 3, |j| j == uv || j == vu);
        assert_eq!(only.len(), 2 + 2 + 2 + 2);
        assert!(only.iter().all(|p| v.check_path(p).is_ok()));
    }

    #[test]
    fn concatenation_requires_matching_ends() {
        let e = b2();
        let v = e.vdc();
        let (uv, vu) = (v.find_proarrow("UV_11").unwrap(), v.find_proarrow("VU_11").unwrap());
        let p = v.path(&[uv]).unwrap().concat(&v.path(&[vu]).unwrap());
        assert_eq!(p.arrows(), &[uv, vu]);
        assert_eq!(v.path_target(&p), v.src(uv));
        assert!(v.path(&[uv, uv]).is_err());
    }

    #[test]
    fn tabulated_paste_uses_the_table_and_checks_chains() {
        let v = terminal(3);
        let m2 = v.find_cell("m2").unwrap();
        let eta = v.find_cell("eta").unwrap();
        let id = v.find_cell("id_J").unwrap();
        assert_eq!(v.paste(&m2, &[id.clone(), eta.clone()]).unwrap(), id);
        assert_eq!(v.paste(&m2, &[m2.clone(), id.clone()]).unwrap(), v.find_cell("m3").unwrap());
        assert!(matches!(v.paste(&m2, &[id]), Err(VdcError::NonComposable { .. }) | Err(VdcError::MalformedFrame(_))));
        assert_eq!(v.show_arrangement(&m2, &[eta.clone(), eta]), "m2(eta, eta)");
    }

    #[test]
    fn builder_rejects_bad_composites_and_duplicates() {
        let mut b = VdcBuilder::new("t");
        let a = b.add_object("A").unwrap();
        let c = b.add_object("B").unwrap();
        assert!(b.add_object("A").is_err());
        let f = b.add_arrow("f", a, c).unwrap();
        let g = b.add_arrow("g", a, c).unwrap();
        assert!(matches!(b.set_composite(g, f, f), Err(VdcError::Construction(_))));
        let ida = b.identity(a);
        let idc = b.identity(c);
        assert!(b.set_composite(idc, f, f).is_ok());
        assert!(matches!(b.set_composite(idc, f, g), Err(VdcError::Construction(_))));
        assert!(b.set_composite(f, ida, f).is_ok());
        let v = b.finish().unwrap();
        assert_eq!(v.compose(idc, f), Some(f));
    }
}
