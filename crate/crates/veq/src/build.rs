//! Turning a parsed spec file into a virtual double category, and back.

use std::collections::BTreeMap;

use thiserror::Error;
use veq_core::embedding::MoritaPair;
use veq_core::instances::{Family, FiniteQuantale, InstanceError, MatrixCaps, MatrixEquipment, MatrixSpec};
use veq_core::vdc::{CellId, Vdc, VdcBuilder};
use veq_core::{Frame, ObjId, Path, ProarrowId, VArrowId, VdcError};

use crate::spec::{Decl, FragmentDecl, InstanceDecl, InstanceKind, PathExpr, SpecFile};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("unknown {kind} `{name}`")]
    Resolution { kind: &'static str, name: String },
    #[error("{0}")]
    Semantic(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Vdc(#[from] VdcError),
}

impl BuildError {
    fn unresolved(kind: &'static str, name: impl Into<String>) -> Self {
        BuildError::Resolution {
            kind,
            name: name.into(),
        }
    }
}

/// The instance a spec file describes.
// A process loads one model at a time, so the size gap is harmless.
#[allow(clippy::large_enum_variant)]
pub enum Model {
    Tabulated(Vdc),
    Matrix(MatrixEquipment),
}

/// Base data selected by a fragment declaration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope {
    pub objects: Vec<ObjId>,
    pub arrows: Vec<VArrowId>,
    pub proarrows: Vec<ProarrowId>,
    pub morita: Vec<MoritaPair>,
}

pub struct Loaded {
    pub model: Model,
    /// Resolved fragment, if the file declares one.
    pub scope: Option<Scope>,
}

impl Loaded {
    pub fn vdc(&self) -> &Vdc {
        match &self.model {
            Model::Tabulated(v) => v,
            Model::Matrix(m) => m.vdc(),
        }
    }

    /// The declared fragment, or every object, non-identity arrow and
    /// proarrow with no Morita pairs.
    pub fn scope_or_all(&self) -> Scope {
        self.scope.clone().unwrap_or_else(|| {
            let v = self.vdc();
            Scope {
                objects: v.objects().collect(),
                arrows: v.arrows().filter(|f| !v.vertical().is_identity(*f)).collect(),
                proarrows: v.proarrows().collect(),
                morita: Vec::new(),
            }
        })
    }
}

/// Build the instance described by `spec`, named `name`.
pub fn build(spec: &SpecFile, name: &str) -> Result<Loaded, BuildError> {
    let fragments = spec.decls.iter().filter(|d| matches!(d, Decl::Fragment(_))).count();
    if fragments > 1 {
        return Err(BuildError::Semantic("more than one fragment declaration".into()));
    }
    let instances = spec.decls.iter().filter(|d| matches!(d, Decl::Instance(_))).count();
    let model = match (instances, spec.instance()) {
        (0, _) => Model::Tabulated(build_tabulated(spec, name)?),
        (1, Some(inst)) => Model::Matrix(build_matrix(spec, inst, name)?),
        _ => return Err(BuildError::Semantic("more than one instance declaration".into())),
    };
    let mut loaded = Loaded { model, scope: None };
    if let Some(fr) = spec.fragment() {
        loaded.scope = Some(resolve_fragment(loaded.vdc(), fr)?);
    }
    Ok(loaded)
}

fn resolve_fragment(v: &Vdc, fr: &FragmentDecl) -> Result<Scope, BuildError> {
    let object = |n: &str| v.find_object(n).map_err(|_| BuildError::unresolved("object", n));
    let arrow = |n: &str| v.find_arrow(n).map_err(|_| BuildError::unresolved("vertical arrow", n));
    let proarrow = |n: &str| v.find_proarrow(n).map_err(|_| BuildError::unresolved("proarrow", n));
    Ok(Scope {
        objects: fr.objects.iter().map(|n| object(n)).collect::<Result<_, _>>()?,
        arrows: fr.arrows.iter().map(|n| arrow(n)).collect::<Result<_, _>>()?,
        proarrows: fr.proarrows.iter().map(|n| proarrow(n)).collect::<Result<_, _>>()?,
        morita: fr
            .morita
            .iter()
            .map(|m| {
                Ok(MoritaPair {
                    a: object(&m.a)?,
                    b: object(&m.b)?,
                    equivalent: m.equivalent,
                })
            })
            .collect::<Result<_, BuildError>>()?,
    })
}

fn build_tabulated(spec: &SpecFile, name: &str) -> Result<Vdc, BuildError> {
    let mut b = VdcBuilder::new(name);
    for d in &spec.decls {
        match d {
            Decl::Object(a) => {
                b.add_object(a)?;
            }
            Decl::Instance(_) | Decl::Matrix { .. } => {
                return Err(BuildError::Semantic(format!(
                    "`{}` needs an instance declaration",
                    d.to_string().split(' ').next().unwrap_or_default()
                )))
            }
            _ => {}
        }
    }
    let object = |b: &VdcBuilder, n: &str| b.object(n).map_err(|_| BuildError::unresolved("object", n));
    let arrow = |b: &VdcBuilder, n: &str| b.arrow(n).map_err(|_| BuildError::unresolved("vertical arrow", n));
    let proarrow = |b: &VdcBuilder, n: &str| b.proarrow(n).map_err(|_| BuildError::unresolved("proarrow", n));
    let cell = |b: &VdcBuilder, n: &str| b.cell(n).map_err(|_| BuildError::unresolved("cell", n));
    let mut arrows = Vec::new();
    for d in &spec.decls {
        if let Decl::VArrow { name, dom, cod } = d {
            let (a, c) = (object(&b, dom)?, object(&b, cod)?);
            arrows.push(b.add_arrow(name, a, c)?);
        }
    }
    for d in &spec.decls {
        if let Decl::VComp { g, f, h } = d {
            let (g, f, h) = (arrow(&b, g)?, arrow(&b, f)?, arrow(&b, h)?);
            b.set_composite(g, f, h)?;
        }
    }
    for f in &arrows {
        for g in &arrows {
            let (_, fc) = b.arrow_ends(*f);
            let (gd, _) = b.arrow_ends(*g);
            if fc == gd && !composite_declared(spec, &b, *g, *f) {
                let n = |x: VArrowId| name_of_arrow(spec, &b, x);
                return Err(BuildError::unresolved("vertical composite", format!("{} . {}", n(*g), n(*f))));
            }
        }
    }
    for d in &spec.decls {
        if let Decl::Proarrow { name, src, tgt } = d {
            let (s, t) = (object(&b, src)?, object(&b, tgt)?);
            b.add_proarrow(name, s, t)?;
        }
    }
    for d in &spec.decls {
        if let Decl::Cell {
            name,
            domain,
            left,
            right,
            codomain,
        } = d
        {
            let domain = match domain {
                PathExpr::Empty(a) => Path::empty(object(&b, a)?),
                PathExpr::Arrows(js) => {
                    let Some(first) = js.first() else {
                        return Err(BuildError::Semantic(format!(
                            "cell {name}: write the empty path as [@A]"
                        )));
                    };
                    let start = b.proarrow_ends(proarrow(&b, first)?).0;
                    let ids = js.iter().map(|j| proarrow(&b, j)).collect::<Result<_, _>>()?;
                    Path::from_parts(start, ids)
                }
            };
            let frame = Frame {
                domain,
                left: arrow(&b, left)?,
                right: arrow(&b, right)?,
                codomain: proarrow(&b, codomain)?,
            };
            b.add_cell(name, frame)?;
        }
    }
    for d in &spec.decls {
        match d {
            Decl::Paste { outer, inners, result } => {
                let inners = inners.iter().map(|c| cell(&b, c)).collect::<Result<_, _>>()?;
                let (o, r) = (cell(&b, outer)?, cell(&b, result)?);
                b.set_paste(o, inners, r);
            }
            Decl::Whisker {
                cell: c,
                arrow: f,
                result,
            } => {
                let (c, f, r) = (cell(&b, c)?, arrow(&b, f)?, cell(&b, result)?);
                b.set_whisker(c, f, r);
            }
            _ => {}
        }
    }
    Ok(b.finish()?)
}

fn composite_declared(spec: &SpecFile, b: &VdcBuilder, g: VArrowId, f: VArrowId) -> bool {
    spec.decls.iter().any(|d| match d {
        Decl::VComp { g: gn, f: fn_, .. } => b.arrow(gn).ok() == Some(g) && b.arrow(fn_).ok() == Some(f),
        _ => false,
    })
}

fn name_of_arrow(spec: &SpecFile, b: &VdcBuilder, f: VArrowId) -> String {
    spec.decls
        .iter()
        .find_map(|d| match d {
            Decl::VArrow { name, .. } if b.arrow(name).ok() == Some(f) => Some(name.clone()),
            _ => None,
        })
        .unwrap_or_else(|| format!("#{}", f.0))
}

fn build_matrix(spec: &SpecFile, inst: &InstanceDecl, name: &str) -> Result<MatrixEquipment, BuildError> {
    let quantale = match inst.kind {
        InstanceKind::BoolMatrix => FiniteQuantale::boolean(),
        InstanceKind::TropicalMatrix { cap } => FiniteQuantale::tropical(cap)?,
    };
    let sizes: BTreeMap<&str, usize> = inst.sets.iter().map(|(s, n)| (s.as_str(), *n)).collect();
    if sizes.len() != inst.sets.len() {
        return Err(BuildError::Semantic("a set is declared twice".into()));
    }
    let mut ends: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
    for d in &spec.decls {
        match d {
            Decl::Proarrow { name, src, tgt } => {
                for s in [src, tgt] {
                    if !sizes.contains_key(s.as_str()) {
                        return Err(BuildError::unresolved("set", s.clone()));
                    }
                }
                if ends.insert(name, (src, tgt)).is_some() {
                    return Err(BuildError::Semantic(format!("proarrow {name} is declared twice")));
                }
            }
            Decl::Instance(_) | Decl::Matrix { .. } | Decl::Fragment(_) => {}
            other => {
                return Err(BuildError::Semantic(format!(
                    "`{}` is not allowed in a matrix instance: objects, arrows and cells are generated",
                    other.to_string().split(' ').next().unwrap_or_default()
                )))
            }
        }
    }
    let mut specs = Vec::new();
    for d in &spec.decls {
        if let Decl::Matrix { name: j, rows } = d {
            let (src, tgt) = *ends.get(j.as_str()).ok_or_else(|| BuildError::unresolved("proarrow", j.clone()))?;
            let (r, c) = (sizes[src], sizes[tgt]);
            let cols = rows.first().map_or(0, Vec::len);
            if rows.len() != r || (r > 0 && cols != c) {
                return Err(BuildError::Semantic(format!(
                    "matrix {j} is {}x{cols} but {src} -|> {tgt} needs {r}x{c}",
                    rows.len()
                )));
            }
            let entries = rows
                .iter()
                .flatten()
                .map(|lit| {
                    quantale.parse_literal(lit).ok_or_else(|| {
                        BuildError::Semantic(format!("matrix {j}: `{lit}` is not an element of {}", quantale.name()))
                    })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            specs.push(MatrixSpec {
                name: Some(j.clone()),
                src: src.to_string(),
                tgt: tgt.to_string(),
                entries,
            });
        }
    }
    if let Some(j) = ends.keys().find(|j| !specs.iter().any(|s| s.name.as_deref() == Some(**j))) {
        return Err(BuildError::Semantic(format!("proarrow {j} has no matrix")));
    }
    let sets: Vec<(&str, usize)> = inst.sets.iter().map(|(s, n)| (s.as_str(), *n)).collect();
    if inst.declared {
        return Ok(MatrixEquipment::new(
            name,
            quantale,
            &sets,
            Family::Selected(specs),
            MatrixCaps::default(),
        )?);
    }
    let mut m = MatrixEquipment::new(name, quantale, &sets, Family::Full, MatrixCaps::default())?;
    for s in specs {
        let v = m.vdc();
        let (a, b) = (v.find_object(&s.src)?, v.find_object(&s.tgt)?);
        let j = m
            .find_matrix(a, b, &s.entries)
            .ok_or_else(|| BuildError::Semantic(format!("matrix {} is not in the family", s.name.as_deref().unwrap_or("?"))))?;
        m.alias_proarrow(s.name.as_deref().unwrap_or_default(), j)?;
    }
    Ok(m)
}

/// A spec file describing `v` exactly: every declaration needed to rebuild
/// its tables. Identity arrows and identity cells are implicit.
pub fn spec_of_tabulated(v: &Vdc) -> Result<SpecFile, BuildError> {
    let table = v
        .table()
        .ok_or_else(|| BuildError::Semantic(format!("{} is thin", v.name())))?;
    let vert = v.vertical();
    let mut decls: Vec<Decl> = v.objects().map(|a| Decl::Object(v.obj_name(a).into())).collect();
    let arrows: Vec<VArrowId> = v.arrows().filter(|f| !vert.is_identity(*f)).collect();
    for f in &arrows {
        decls.push(Decl::VArrow {
            name: v.arrow_name(*f).into(),
            dom: v.obj_name(v.dom(*f)).into(),
            cod: v.obj_name(v.cod(*f)).into(),
        });
    }
    for f in &arrows {
        for g in arrows.iter().filter(|g| v.dom(**g) == v.cod(*f)) {
            let h = v.compose(*g, *f).expect("total composition");
            decls.push(Decl::VComp {
                g: v.arrow_name(*g).into(),
                f: v.arrow_name(*f).into(),
                h: v.arrow_name(h).into(),
            });
        }
    }
    for j in v.proarrows() {
        decls.push(Decl::Proarrow {
            name: v.proarrow_name(j).into(),
            src: v.obj_name(v.src(j)).into(),
            tgt: v.obj_name(v.tgt(j)).into(),
        });
    }
    let identities: Vec<CellId> = v
        .proarrows()
        .map(|j| v.identity_cell(j).map(|c| c.id.expect("tabulated")))
        .collect::<Result<_, _>>()?;
    let cname = |c: CellId| table.name(c).unwrap_or_default().to_string();
    for id in 0..table.len() {
        let c = CellId(id as u32);
        if identities.contains(&c) {
            continue;
        }
        let frame = table.frame(c).expect("own cell");
        let domain = if frame.domain.is_empty() {
            PathExpr::Empty(v.obj_name(frame.domain.start()).into())
        } else {
            PathExpr::Arrows(frame.domain.arrows().iter().map(|j| v.proarrow_name(*j).into()).collect())
        };
        decls.push(Decl::Cell {
            name: cname(c),
            domain,
            left: v.arrow_name(frame.left).into(),
            right: v.arrow_name(frame.right).into(),
            codomain: v.proarrow_name(frame.codomain).into(),
        });
    }
    for ((outer, inners), result) in table.paste_entries() {
        let implied = (inners.iter().all(|i| identities.contains(i)) && result == outer)
            || (identities.contains(outer) && inners.len() == 1 && inners[0] == *result);
        if !implied {
            decls.push(Decl::Paste {
                outer: cname(*outer),
                inners: inners.iter().map(|i| cname(*i)).collect(),
                result: cname(*result),
            });
        }
    }
    for ((cell, arrow), result) in table.whisker_entries() {
        decls.push(Decl::Whisker {
            cell: cname(*cell),
            arrow: v.arrow_name(*arrow).into(),
            result: cname(*result),
        });
    }
    Ok(SpecFile { decls })
}

/// A spec file for a matrix equipment: its instance block, its selected
/// matrices if the family is not full, and an optional fragment.
pub fn spec_of_matrix(m: &MatrixEquipment, fragment: Option<FragmentDecl>) -> SpecFile {
    let q = m.quantale();
    let kind = if q.name() == "bool" {
        InstanceKind::BoolMatrix
    } else {
        InstanceKind::TropicalMatrix {
            cap: (q.size() - 1) as u8,
        }
    };
    let declared = matches!(m.family(), Family::Selected(_));
    let mut decls = vec![Decl::Instance(InstanceDecl {
        kind,
        declared,
        sets: m.sets().to_vec(),
    })];
    if let Family::Selected(specs) = m.family() {
        for (i, s) in specs.iter().enumerate() {
            let name = s.name.clone().unwrap_or_else(|| format!("M{i}"));
            let cols = m.sets().iter().find(|(n, _)| *n == s.tgt).map_or(1, |(_, k)| *k).max(1);
            decls.push(Decl::Proarrow {
                name: name.clone(),
                src: s.src.clone(),
                tgt: s.tgt.clone(),
            });
            decls.push(Decl::Matrix {
                name,
                rows: s
                    .entries
                    .chunks(cols)
                    .map(|r| r.iter().map(|e| q.literal(*e).to_string()).collect())
                    .collect(),
            });
        }
    }
    if let Some(fr) = fragment {
        decls.push(Decl::Fragment(fr));
    }
    SpecFile { decls }
}
