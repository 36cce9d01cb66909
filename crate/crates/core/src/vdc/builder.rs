use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::store::{CellStore, CellTable, PasteResolver, ThinOracle};
use super::{
    ArrowData, CellId, Frame, NameIndex, ObjId, Path, ProarrowData, ProarrowId, VArrowId, Vdc,
    VdcError, VerticalCategory,
};

/// Incremental construction of a [`Vdc`].
///
/// Every object gets an identity arrow named `id_<object>`, and (in tabulated
/// stores) every proarrow an identity cell named `id_<proarrow>`. Composites
/// with identities and the identity laws of substitution are filled in by
/// [`VdcBuilder::finish`] unless given explicitly.
pub struct VdcBuilder {
    name: String,
    objects: Vec<String>,
    arrows: Vec<ArrowData>,
    identities: Vec<VArrowId>,
    compose: BTreeMap<(VArrowId, VArrowId), VArrowId>,
    proarrows: Vec<ProarrowData>,
    table: CellTable,
    names: NameIndex,
}

impl VdcBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        VdcBuilder {
            name: name.into(),
            objects: Vec::new(),
            arrows: Vec::new(),
            identities: Vec::new(),
            compose: BTreeMap::new(),
            proarrows: Vec::new(),
            table: CellTable::new(),
            names: NameIndex::default(),
        }
    }

    fn taken(&self, name: &str) -> bool {
        self.names.objects.contains_key(name)
            || self.names.arrows.contains_key(name)
            || self.names.proarrows.contains_key(name)
            || self.names.cells.contains_key(name)
    }

    fn claim(&self, name: &str) -> Result<(), VdcError> {
        if self.taken(name) {
            Err(VdcError::Construction(format!("name `{name}` is declared twice")))
        } else {
            Ok(())
        }
    }

    pub fn add_object(&mut self, name: &str) -> Result<ObjId, VdcError> {
        self.claim(name)?;
        let id_name = format!("id_{name}");
        self.claim(&id_name)?;
        let a = ObjId(self.objects.len() as u32);
        self.objects.push(name.to_string());
        self.names.objects.insert(name.to_string(), a);
        let f = VArrowId(self.arrows.len() as u32);
        self.arrows.push(ArrowData {
            name: id_name.clone(),
            dom: a,
            cod: a,
        });
        self.names.arrows.insert(id_name, f);
        self.identities.push(f);
        self.compose.insert((f, f), f);
        Ok(a)
    }

    pub fn identity(&self, a: ObjId) -> VArrowId {
        self.identities[a.index()]
    }

    pub fn object(&self, name: &str) -> Result<ObjId, VdcError> {
        self.names.objects.get(name).copied().ok_or(VdcError::Unknown {
            kind: "object",
            name: name.to_string(),
        })
    }

    pub fn arrow(&self, name: &str) -> Result<VArrowId, VdcError> {
        self.names.arrows.get(name).copied().ok_or(VdcError::Unknown {
            kind: "vertical arrow",
            name: name.to_string(),
        })
    }

    pub fn proarrow(&self, name: &str) -> Result<ProarrowId, VdcError> {
        self.names.proarrows.get(name).copied().ok_or(VdcError::Unknown {
            kind: "proarrow",
            name: name.to_string(),
        })
    }

    pub fn cell(&self, name: &str) -> Result<CellId, VdcError> {
        self.names.cells.get(name).copied().ok_or(VdcError::Unknown {
            kind: "cell",
            name: name.to_string(),
        })
    }

    pub fn arrow_ends(&self, f: VArrowId) -> (ObjId, ObjId) {
        let a = &self.arrows[f.index()];
        (a.dom, a.cod)
    }

    pub fn proarrow_ends(&self, j: ProarrowId) -> (ObjId, ObjId) {
        let p = &self.proarrows[j.index()];
        (p.src, p.tgt)
    }

    pub fn identity_cell(&self, j: ProarrowId) -> CellId {
        self.table.identities[j.index()]
    }

    fn check_obj(&self, a: ObjId) -> Result<(), VdcError> {
        if a.index() < self.objects.len() {
            Ok(())
        } else {
            Err(VdcError::Unknown {
                kind: "object",
                name: format!("#{}", a.0),
            })
        }
    }

    fn check_arrow(&self, f: VArrowId) -> Result<(), VdcError> {
        if f.index() < self.arrows.len() {
            Ok(())
        } else {
            Err(VdcError::Unknown {
                kind: "vertical arrow",
                name: format!("#{}", f.0),
            })
        }
    }

    pub fn add_arrow(&mut self, name: &str, dom: ObjId, cod: ObjId) -> Result<VArrowId, VdcError> {
        self.claim(name)?;
        self.check_obj(dom)?;
        self.check_obj(cod)?;
        let f = VArrowId(self.arrows.len() as u32);
        self.arrows.push(ArrowData {
            name: name.to_string(),
            dom,
            cod,
        });
        self.names.arrows.insert(name.to_string(), f);
        let (id_dom, id_cod) = (self.identities[dom.index()], self.identities[cod.index()]);
        self.compose.insert((f, id_dom), f);
        self.compose.insert((id_cod, f), f);
        Ok(f)
    }

    /// Declare `g . f = h`.
    pub fn set_composite(&mut self, g: VArrowId, f: VArrowId, h: VArrowId) -> Result<(), VdcError> {
        self.check_arrow(g)?;
        self.check_arrow(f)?;
        self.check_arrow(h)?;
        let (fd, fc) = self.arrow_ends(f);
        let (gd, gc) = self.arrow_ends(g);
        let (hd, hc) = self.arrow_ends(h);
        let name = |x: VArrowId| self.arrows[x.index()].name.clone();
        if fc != gd {
            return Err(VdcError::Construction(format!(
                "{} . {} is not composable",
                name(g),
                name(f)
            )));
        }
        if hd != fd || hc != gc {
            return Err(VdcError::Construction(format!(
                "{} cannot be the composite {} . {}: wrong ends",
                name(h),
                name(g),
                name(f)
            )));
        }
        if let Some(old) = self.compose.get(&(g, f)) {
            if *old != h {
                return Err(VdcError::Construction(format!(
                    "{} . {} is already declared as {}",
                    name(g),
                    name(f),
                    name(*old)
                )));
            }
        }
        self.compose.insert((g, f), h);
        Ok(())
    }

    pub fn add_proarrow(&mut self, name: &str, src: ObjId, tgt: ObjId) -> Result<ProarrowId, VdcError> {
        self.claim(name)?;
        self.check_obj(src)?;
        self.check_obj(tgt)?;
        let j = ProarrowId(self.proarrows.len() as u32);
        self.proarrows.push(ProarrowData {
            name: name.to_string(),
            src,
            tgt,
        });
        self.names.proarrows.insert(name.to_string(), j);
        let frame = Frame {
            domain: Path::from_parts(src, alloc::vec![j]),
            left: self.identities[src.index()],
            right: self.identities[tgt.index()],
            codomain: j,
        };
        let id_name = format!("id_{name}");
        let c = self.table.push(id_name.clone(), frame);
        self.table.identities.push(c);
        if !self.taken(&id_name) {
            self.names.cells.insert(id_name, c);
        }
        Ok(j)
    }

    /// Register a cell of a tabulated store. The frame is validated by
    /// [`VdcBuilder::finish`].
    pub fn add_cell(&mut self, name: &str, frame: Frame) -> Result<CellId, VdcError> {
        self.claim(name)?;
        let c = self.table.push(name.to_string(), frame);
        self.names.cells.insert(name.to_string(), c);
        Ok(c)
    }

    pub fn cell_frame(&self, c: CellId) -> Option<&Frame> {
        self.table.frame(c)
    }

    pub fn set_paste(&mut self, outer: CellId, inners: Vec<CellId>, result: CellId) {
        self.table.paste.insert((outer, inners), result);
    }

    /// Declare the precomposition of a nullary cell with a vertical arrow.
    pub fn set_whisker(&mut self, cell: CellId, arrow: VArrowId, result: CellId) {
        self.table.whisker.insert((cell, arrow), result);
    }

    pub fn set_resolver(&mut self, resolver: Arc<dyn PasteResolver>) {
        self.table.resolver = Some(resolver);
    }

    fn vertical(&self) -> Result<VerticalCategory, VdcError> {
        let n = self.objects.len();
        let mut between = alloc::vec![Vec::new(); n * n];
        for (i, a) in self.arrows.iter().enumerate() {
            between[a.dom.index() * n + a.cod.index()].push(VArrowId(i as u32));
        }
        for (i, f) in self.arrows.iter().enumerate() {
            for (k, g) in self.arrows.iter().enumerate() {
                if f.cod == g.dom && !self.compose.contains_key(&(VArrowId(k as u32), VArrowId(i as u32))) {
                    return Err(VdcError::Construction(format!(
                        "missing vertical composite {} . {}",
                        g.name, f.name
                    )));
                }
            }
        }
        Ok(VerticalCategory {
            objects: self.objects.clone(),
            arrows: self.arrows.clone(),
            identities: self.identities.clone(),
            compose: self.compose.clone(),
            between,
        })
    }

    fn assemble(self, store: CellStore) -> Result<Vdc, VdcError> {
        let vertical = self.vertical()?;
        let n = self.objects.len();
        let mut pro_between = alloc::vec![Vec::new(); n * n];
        for (i, p) in self.proarrows.iter().enumerate() {
            pro_between[p.src.index() * n + p.tgt.index()].push(ProarrowId(i as u32));
        }
        Ok(Vdc {
            name: self.name,
            vertical,
            proarrows: self.proarrows,
            pro_between,
            store,
            names: self.names,
        })
    }

    /// Finish a tabulated virtual double category.
    pub fn finish(mut self) -> Result<Vdc, VdcError> {
        let mut table = core::mem::replace(&mut self.table, CellTable::new());
        for c in 0..table.len() {
            let c = CellId(c as u32);
            let frame = table.frames[c.index()].clone();
            let ids: Vec<CellId> = frame
                .domain
                .arrows()
                .iter()
                .map(|j| table.identities[j.index()])
                .collect();
            if !ids.is_empty() {
                table.paste.entry((c, ids)).or_insert(c);
            }
            let id_cod = table.identities[frame.codomain.index()];
            table.paste.entry((id_cod, alloc::vec![c])).or_insert(c);
        }
        let checks: Vec<(String, Frame)> = table
            .names
            .iter()
            .cloned()
            .zip(table.frames.iter().cloned())
            .collect();
        let vdc = self.assemble(CellStore::Tabulated(table))?;
        for (name, frame) in checks {
            vdc.check_frame(&frame)
                .map_err(|e| VdcError::Construction(format!("cell {name}: {e}")))?;
        }
        Ok(vdc)
    }

    /// Finish a thin virtual double category; cell existence is decided by
    /// `oracle` and any cells registered with the builder are discarded.
    pub fn finish_thin(self, oracle: Arc<dyn ThinOracle>) -> Result<Vdc, VdcError> {
        let mut vdc = self.assemble(CellStore::Thin(oracle))?;
        vdc.names.cells.clear();
        Ok(vdc)
    }
}
