use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{FiniteQuantale, InstanceError};
use crate::vdc::{Frame, FrameTest, ObjId, Path, ProarrowId, ThinOracle, VArrowId, Vdc, VdcBuilder};

/// Size limits for matrix equipments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixCaps {
    pub max_elements: usize,
    pub max_carrier: usize,
    pub max_proarrows: usize,
}

impl Default for MatrixCaps {
    fn default() -> Self {
        MatrixCaps {
            max_elements: 3,
            max_carrier: 4,
            max_proarrows: 100_000,
        }
    }
}

/// A matrix requested by name in a selected family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpec {
    pub name: Option<String>,
    pub src: String,
    pub tgt: String,
    /// Row-major entries, `|src| x |tgt|`.
    pub entries: Vec<u8>,
}

/// Which matrices become proarrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Every matrix between every pair of sets.
    Full,
    /// Exactly these matrices; closure under units and restrictions is checked.
    Selected(Vec<MatrixSpec>),
}

/// The thin equipment of quantale-valued matrices between finite sets.
///
/// Objects are named finite sets, vertical arrows are all functions, proarrows
/// are matrices, and a cell on `([J1 .. Jk], f, g) => K` exists when the matrix
/// product of the `Ji` is pointwise below `K(f -, g -)`.
#[derive(Clone)]
pub struct MatrixEquipment {
    quantale: FiniteQuantale,
    sets: Vec<(String, usize)>,
    vdc: Vdc,
    matrices: Vec<Vec<u8>>,
    functions: Vec<Vec<u8>>,
    by_matrix: BTreeMap<(ObjId, ObjId, Vec<u8>), ProarrowId>,
    by_function: BTreeMap<(ObjId, ObjId, Vec<u8>), VArrowId>,
    family: Family,
}

struct MatrixOracle {
    quantale: FiniteQuantale,
    sizes: Vec<usize>,
    pro_ends: Vec<(ObjId, ObjId)>,
    matrices: Vec<Vec<u8>>,
    functions: Vec<Vec<u8>>,
}

impl MatrixOracle {
    fn product(&self, path: &Path) -> (usize, usize, Vec<u8>) {
        let r = self.sizes[path.start().index()];
        let mut acc = self.quantale.identity_matrix(r);
        let mut cols = r;
        for j in path.arrows() {
            let (_, tgt) = self.pro_ends[j.index()];
            let t = self.sizes[tgt.index()];
            acc = self.quantale.mat_mul(&acc, &self.matrices[j.index()], r, cols, t);
            cols = t;
        }
        (r, cols, acc)
    }
}

impl ThinOracle for MatrixOracle {
    fn domain_test<'a>(&'a self, domain: &Path) -> FrameTest<'a> {
        let (r, t, prod) = self.product(domain);
        Box::new(move |f, g, k| {
            let fx = &self.functions[f.index()];
            let gy = &self.functions[g.index()];
            let km = &self.matrices[k.index()];
            let kt = self.sizes[self.pro_ends[k.index()].1.index()];
            let q = &self.quantale;
            for x in 0..r {
                let row = fx[x] as usize * kt;
                for y in 0..t {
                    if !q.leq(prod[x * t + y], km[row + gy[y] as usize]) {
                        return false;
                    }
                }
            }
            true
        })
    }

    fn exists(&self, frame: &Frame) -> bool {
        const SMALL: usize = 8;
        let path = &frame.domain;
        let size = |a: ObjId| self.sizes[a.index()];
        let r = size(path.start());
        if r > SMALL || path.arrows().iter().any(|j| size(self.pro_ends[j.index()].1) > SMALL) {
            return (self.domain_test(path))(frame.left, frame.right, frame.codomain);
        }
        // Same test as `domain_test`, on stack buffers.
        let q = &self.quantale;
        let mut acc = [q.bottom(); SMALL * SMALL];
        for x in 0..r {
            acc[x * r + x] = q.unit();
        }
        let mut cols = r;
        for j in path.arrows() {
            let t = size(self.pro_ends[j.index()].1);
            let m = &self.matrices[j.index()];
            let mut next = [q.bottom(); SMALL * SMALL];
            for x in 0..r {
                for y in 0..cols {
                    let a = acc[x * cols + y];
                    if a == q.bottom() {
                        continue;
                    }
                    for z in 0..t {
                        next[x * t + z] = q.join(next[x * t + z], q.tensor(a, m[y * t + z]));
                    }
                }
            }
            acc = next;
            cols = t;
        }
        let fx = &self.functions[frame.left.index()];
        let gy = &self.functions[frame.right.index()];
        let km = &self.matrices[frame.codomain.index()];
        let kt = size(self.pro_ends[frame.codomain.index()].1);
        (0..r).all(|x| (0..cols).all(|y| q.leq(acc[x * cols + y], km[fx[x] as usize * kt + gy[y] as usize])))
    }

    fn domain_key(&self, domain: &Path) -> Option<Vec<u8>> {
        Some(self.product(domain).2)
    }
}

fn digits(q: &FiniteQuantale, entries: &[u8]) -> String {
    entries.iter().map(|e| q.literal(*e)).collect::<Vec<_>>().join("")
}

fn all_tuples(len: usize, base: usize) -> Vec<Vec<u8>> {
    let total = base.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let mut t = alloc::vec![0u8; len];
            for slot in t.iter_mut().rev() {
                *slot = (code % base) as u8;
                code /= base;
            }
            t
        })
        .collect()
}

impl MatrixEquipment {
    /// Build and, for selected families, check closure under units and
    /// restrictions.
    pub fn new(
        name: &str,
        quantale: FiniteQuantale,
        sets: &[(&str, usize)],
        family: Family,
        caps: MatrixCaps,
    ) -> Result<Self, InstanceError> {
        let eq = Self::new_unchecked(name, quantale, sets, family, caps)?;
        if let Family::Selected(_) = eq.family {
            eq.check_closure()?;
        }
        Ok(eq)
    }

    /// Build without the closure check; used for deliberately incomplete
    /// instances.
    pub fn new_unchecked(
        name: &str,
        quantale: FiniteQuantale,
        sets: &[(&str, usize)],
        family: Family,
        caps: MatrixCaps,
    ) -> Result<Self, InstanceError> {
        if quantale.size() > caps.max_carrier {
            return Err(InstanceError::CapExceeded(format!(
                "carrier of size {} exceeds the cap {}",
                quantale.size(),
                caps.max_carrier
            )));
        }
        for (set, n) in sets {
            if *n == 0 {
                return Err(InstanceError::CapExceeded(format!("set {set} is empty")));
            }
            if *n > caps.max_elements {
                return Err(InstanceError::CapExceeded(format!(
                    "set {set} has {n} elements, the cap is {}",
                    caps.max_elements
                )));
            }
        }
        if let Family::Full = family {
            let mut total = 0usize;
            for (_, a) in sets {
                for (_, b) in sets {
                    total = total.saturating_add(quantale.size().saturating_pow((a * b) as u32));
                }
            }
            if total > caps.max_proarrows {
                return Err(InstanceError::CapExceeded(format!(
                    "the full family has {total} matrices, the cap is {}",
                    caps.max_proarrows
                )));
            }
        }

        let mut b = VdcBuilder::new(name);
        let mut sizes = Vec::new();
        for (set, n) in sets {
            b.add_object(set)?;
            sizes.push(*n);
        }
        let objs: Vec<ObjId> = (0..sets.len()).map(|i| ObjId(i as u32)).collect();
        let mut functions: Vec<Vec<u8>> = Vec::new();
        let mut by_function = BTreeMap::new();
        for a in &objs {
            let id = b.identity(*a);
            let n = sizes[a.index()];
            ensure_len(&mut functions, id.index());
            functions[id.index()] = (0..n as u8).collect();
        }
        for a in &objs {
            for c in &objs {
                let (n, m) = (sizes[a.index()], sizes[c.index()]);
                for images in all_tuples(n, m) {
                    let is_id = a == c && images.iter().enumerate().all(|(i, v)| i == *v as usize);
                    let f = if is_id {
                        b.identity(*a)
                    } else {
                        let fname = format!(
                            "{}to{}_{}",
                            sets[a.index()].0,
                            sets[c.index()].0,
                            images.iter().map(|v| v.to_string()).collect::<String>()
                        );
                        b.add_arrow(&fname, *a, *c)?
                    };
                    ensure_len(&mut functions, f.index());
                    functions[f.index()] = images.clone();
                    by_function.insert((*a, *c, images), f);
                }
            }
        }
        for f in 0..functions.len() {
            let f = VArrowId(f as u32);
            let (a, c) = b.arrow_ends(f);
            for g in 0..functions.len() {
                let g = VArrowId(g as u32);
                let (c2, d) = b.arrow_ends(g);
                if c2 != c {
                    continue;
                }
                let images: Vec<u8> = functions[f.index()]
                    .iter()
                    .map(|x| functions[g.index()][*x as usize])
                    .collect();
                let h = by_function[&(a, d, images)];
                b.set_composite(g, f, h)?;
            }
        }

        let specs: Vec<MatrixSpec> = match &family {
            Family::Full => {
                let mut out = Vec::new();
                for a in &objs {
                    for c in &objs {
                        let len = sizes[a.index()] * sizes[c.index()];
                        for entries in all_tuples(len, quantale.size()) {
                            out.push(MatrixSpec {
                                name: None,
                                src: sets[a.index()].0.to_string(),
                                tgt: sets[c.index()].0.to_string(),
                                entries,
                            });
                        }
                    }
                }
                out
            }
            Family::Selected(specs) => specs.clone(),
        };
        let mut matrices = Vec::new();
        let mut pro_ends = Vec::new();
        let mut by_matrix = BTreeMap::new();
        for spec in &specs {
            let src = b.object(&spec.src)?;
            let tgt = b.object(&spec.tgt)?;
            let len = sizes[src.index()] * sizes[tgt.index()];
            if spec.entries.len() != len {
                return Err(InstanceError::BadMatrix(format!(
                    "{} -|> {} needs {len} entries, got {}",
                    spec.src,
                    spec.tgt,
                    spec.entries.len()
                )));
            }
            if spec.entries.iter().any(|e| *e as usize >= quantale.size()) {
                return Err(InstanceError::BadMatrix("entry outside the carrier".into()));
            }
            let key = (src, tgt, spec.entries.clone());
            if by_matrix.contains_key(&key) {
                return Err(InstanceError::BadMatrix(format!(
                    "matrix {} on {} -|> {} is listed twice",
                    digits(&quantale, &spec.entries),
                    spec.src,
                    spec.tgt
                )));
            }
            let pname = spec.name.clone().unwrap_or_else(|| {
                format!("{}{}_{}", spec.src, spec.tgt, digits(&quantale, &spec.entries))
            });
            let j = b.add_proarrow(&pname, src, tgt)?;
            matrices.push(spec.entries.clone());
            pro_ends.push((src, tgt));
            by_matrix.insert(key, j);
        }
        let oracle = MatrixOracle {
            quantale: quantale.clone(),
            sizes: sizes.clone(),
            pro_ends,
            matrices: matrices.clone(),
            functions: functions.clone(),
        };
        let vdc = b.finish_thin(Arc::new(oracle))?;
        Ok(MatrixEquipment {
            quantale,
            sets: sets.iter().map(|(s, n)| (s.to_string(), *n)).collect(),
            vdc,
            matrices,
            functions,
            by_matrix,
            by_function,
            family: match family {
                Family::Full => Family::Full,
                Family::Selected(_) => Family::Selected(specs),
            },
        })
    }

    pub fn vdc(&self) -> &Vdc {
        &self.vdc
    }

    /// Give a proarrow an extra name, as spec files do for named matrices.
    pub fn alias_proarrow(&mut self, name: &str, j: ProarrowId) -> Result<(), InstanceError> {
        Ok(self.vdc.alias_proarrow(name, j)?)
    }

    pub fn into_vdc(self) -> Vdc {
        self.vdc
    }

    pub fn quantale(&self) -> &FiniteQuantale {
        &self.quantale
    }

    pub fn sets(&self) -> &[(String, usize)] {
        &self.sets
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn size(&self, a: ObjId) -> usize {
        self.sets[a.index()].1
    }

    pub fn matrix(&self, j: ProarrowId) -> &[u8] {
        &self.matrices[j.index()]
    }

    pub fn function(&self, f: VArrowId) -> &[u8] {
        &self.functions[f.index()]
    }

    pub fn find_matrix(&self, src: ObjId, tgt: ObjId, entries: &[u8]) -> Option<ProarrowId> {
        self.by_matrix.get(&(src, tgt, entries.to_vec())).copied()
    }

    pub fn find_function(&self, dom: ObjId, cod: ObjId, images: &[u8]) -> Option<VArrowId> {
        self.by_function.get(&(dom, cod, images.to_vec())).copied()
    }

    /// Display a matrix in the spec-file syntax, e.g. `[1 0 ; 0 1]`.
    pub fn show_matrix(&self, j: ProarrowId) -> String {
        let t = self.size(self.vdc.tgt(j));
        let rows: Vec<String> = self.matrices[j.index()]
            .chunks(t)
            .map(|row| row.iter().map(|e| self.quantale.literal(*e)).collect::<Vec<_>>().join(" "))
            .collect();
        format!("[{}]", rows.join(" ; "))
    }

    /// Closed form of the unit: the identity matrix.
    pub fn unit_matrix(&self, a: ObjId) -> Vec<u8> {
        self.quantale.identity_matrix(self.size(a))
    }

    /// Closed form of the restriction: `K(g, f)(x, y) = K(g x, f y)`.
    pub fn restriction_matrix(&self, k: ProarrowId, g: VArrowId, f: VArrowId) -> Vec<u8> {
        let kt = self.size(self.vdc.tgt(k));
        let km = &self.matrices[k.index()];
        let (gx, fy) = (&self.functions[g.index()], &self.functions[f.index()]);
        let mut out = Vec::with_capacity(gx.len() * fy.len());
        for x in gx {
            for y in fy {
                out.push(km[*x as usize * kt + *y as usize]);
            }
        }
        out
    }

    /// Closed form of the composite of a non-empty path: the matrix product.
    pub fn composite_matrix(&self, path: &[ProarrowId]) -> Vec<u8> {
        let start = self.vdc.src(path[0]);
        let r = self.size(start);
        let mut acc = self.quantale.identity_matrix(r);
        let mut cols = r;
        for j in path {
            let t = self.size(self.vdc.tgt(*j));
            acc = self.quantale.mat_mul(&acc, &self.matrices[j.index()], r, cols, t);
            cols = t;
        }
        acc
    }

    pub fn unit(&self, a: ObjId) -> Option<ProarrowId> {
        self.find_matrix(a, a, &self.unit_matrix(a))
    }

    pub fn restriction(&self, k: ProarrowId, g: VArrowId, f: VArrowId) -> Option<ProarrowId> {
        let m = self.restriction_matrix(k, g, f);
        self.find_matrix(self.vdc.dom(g), self.vdc.dom(f), &m)
    }

    pub fn composite(&self, path: &[ProarrowId]) -> Option<ProarrowId> {
        let m = self.composite_matrix(path);
        let src = self.vdc.src(path[0]);
        let tgt = self.vdc.tgt(*path.last()?);
        self.find_matrix(src, tgt, &m)
    }

    /// Closed form of the companion `f_! = h(f, id)`.
    pub fn companion(&self, f: VArrowId) -> Option<ProarrowId> {
        let b = self.vdc.cod(f);
        self.restriction(self.unit(b)?, f, self.vdc.identity(b))
    }

    /// Closed form of the conjoint `f^* = h(id, f)`.
    pub fn conjoint(&self, f: VArrowId) -> Option<ProarrowId> {
        let b = self.vdc.cod(f);
        self.restriction(self.unit(b)?, self.vdc.identity(b), f)
    }

    fn check_closure(&self) -> Result<(), InstanceError> {
        let v = &self.vdc;
        for a in v.objects() {
            if self.unit(a).is_none() {
                return Err(InstanceError::NotClosed(format!(
                    "the unit of {} ({}) is not in the family",
                    v.obj_name(a),
                    digits(&self.quantale, &self.unit_matrix(a))
                )));
            }
        }
        for k in v.proarrows() {
            let (c, d) = (v.src(k), v.tgt(k));
            for g in v.vertical().into_object(c) {
                for f in v.vertical().into_object(d) {
                    if self.restriction(k, g, f).is_none() {
                        return Err(InstanceError::NotClosed(format!(
                            "the restriction {}({}, {}) is not in the family",
                            v.proarrow_name(k),
                            v.arrow_name(g),
                            v.arrow_name(f)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The same equipment with one proarrow removed and no closure check.
    pub fn without(&self, j: ProarrowId) -> Result<Self, InstanceError> {
        let specs = self
            .vdc
            .proarrows()
            .filter(|k| *k != j)
            .map(|k| MatrixSpec {
                name: Some(self.vdc.proarrow_name(k).to_string()),
                src: self.vdc.obj_name(self.vdc.src(k)).to_string(),
                tgt: self.vdc.obj_name(self.vdc.tgt(k)).to_string(),
                entries: self.matrices[k.index()].clone(),
            })
            .collect();
        let sets: Vec<(&str, usize)> = self.sets.iter().map(|(s, n)| (s.as_str(), *n)).collect();
        let name = format!("{}-without-{}", self.vdc.name(), self.vdc.proarrow_name(j));
        Self::new_unchecked(
            &name,
            self.quantale.clone(),
            &sets,
            Family::Selected(specs),
            MatrixCaps::default(),
        )
    }
}

fn ensure_len(v: &mut Vec<Vec<u8>>, i: usize) {
    if v.len() <= i {
        v.resize(i + 1, Vec::new());
    }
}

/// Matrices over the Boolean quantale between the given sets.
pub fn bool_matrix_equipment(name: &str, sets: &[(&str, usize)]) -> Result<MatrixEquipment, InstanceError> {
    MatrixEquipment::new(name, FiniteQuantale::boolean(), sets, Family::Full, MatrixCaps::default())
}

/// Matrices over the capped tropical quantale between the given sets.
pub fn tropical_matrix_equipment(
    name: &str,
    cap: u8,
    sets: &[(&str, usize)],
) -> Result<MatrixEquipment, InstanceError> {
    MatrixEquipment::new(
        name,
        FiniteQuantale::tropical(cap)?,
        sets,
        Family::Full,
        MatrixCaps::default(),
    )
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::instances::{b2, t3};

    /// Cell existence by summing over every sequence of intermediate
    /// elements, independent of the accumulated products.
    fn brute_force(m: &MatrixEquipment, frame: &Frame) -> bool {
        let v = m.vdc();
        let q = m.quantale();
        let js = frame.domain.arrows();
        let mut chain = alloc::vec![frame.domain.start()];
        chain.extend(js.iter().map(|j| v.tgt(*j)));
        let sizes: Vec<usize> = chain.iter().map(|a| m.size(*a)).collect();
        let (fx, gy, km) = (m.function(frame.left), m.function(frame.right), m.matrix(frame.codomain));
        let kt = m.size(v.tgt(frame.codomain));
        let mut seq = alloc::vec![0usize; chain.len()];
        let mut prod = alloc::vec![q.bottom(); sizes[0] * sizes[sizes.len() - 1]];
        loop {
            let mut w = q.unit();
            for (i, j) in js.iter().enumerate() {
                w = q.tensor(w, m.matrix(*j)[seq[i] * sizes[i + 1] + seq[i + 1]]);
            }
            let (x, y) = (seq[0], seq[seq.len() - 1]);
            let at = x * sizes[sizes.len() - 1] + y;
            prod[at] = q.join(prod[at], w);
            let mut pos = seq.len();
            loop {
                if pos == 0 {
                    return (0..sizes[0]).all(|x| {
                        (0..sizes[sizes.len() - 1]).all(|y| {
                            q.leq(prod[x * sizes[sizes.len() - 1] + y], km[fx[x] as usize * kt + gy[y] as usize])
                        })
                    });
                }
                pos -= 1;
                seq[pos] += 1;
                if seq[pos] < sizes[pos] {
                    break;
                }
                seq[pos] = 0;
            }
        }
    }

    fn frame_from(m: &MatrixEquipment, picks: &[usize]) -> Frame {
        let v = m.vdc();
        let objs: Vec<ObjId> = v.objects().collect();
        let mut at = objs[picks[0] % objs.len()];
        let start = at;
        let mut arrows = Vec::new();
        // Up to three proarrows, chosen by the next picks.
        for p in &picks[2..2 + picks[1] % 4] {
            let out: Vec<ProarrowId> = v.proarrows().filter(|j| v.src(*j) == at).collect();
            let j = out[p % out.len()];
            arrows.push(j);
            at = v.tgt(j);
        }
        let lefts: Vec<VArrowId> = v.arrows().filter(|f| v.dom(*f) == start).collect();
        let rights: Vec<VArrowId> = v.arrows().filter(|g| v.dom(*g) == at).collect();
        let left = lefts[picks[5] % lefts.len()];
        let right = rights[picks[6] % rights.len()];
        let ks = v.proarrows_between(v.cod(left), v.cod(right));
        Frame {
            domain: Path::from_parts(start, arrows),
            left,
            right,
            codomain: ks[picks[7] % ks.len()],
        }
    }

    proptest! {
        #[test]
        fn b2_cells_match_the_brute_force_product(picks in prop::collection::vec(0usize..1000, 8)) {
            let m = b2();
            let frame = frame_from(&m, &picks);
            prop_assert_eq!(m.vdc().frame_cells(&frame).unwrap().len() == 1, brute_force(&m, &frame));
        }

        #[test]
        fn t3_cells_match_the_brute_force_product(picks in prop::collection::vec(0usize..1000, 8)) {
            let m = t3();
            let frame = frame_from(&m, &picks);
            let v = m.vdc();
            let by_frame = v.frame_cells(&frame).unwrap().len() == 1;
            let by_domain = v.domain_query(&frame.domain).exists(frame.left, frame.right, frame.codomain);
            prop_assert_eq!(by_frame, brute_force(&m, &frame));
            prop_assert_eq!(by_domain, by_frame);
        }
    }

    #[test]
    fn closed_forms_on_b2() {
        let m = b2();
        let v = m.vdc();
        let (u, vv) = (v.find_object("U").unwrap(), v.find_object("V").unwrap());
        assert_eq!(m.unit(vv), Some(v.find_proarrow("VV_1001").unwrap()));
        assert_eq!(m.unit(u), Some(v.find_proarrow("UU_1").unwrap()));
        let swap = v.find_arrow("VtoV_10").unwrap();
        assert_eq!(m.companion(swap), Some(v.find_proarrow("VV_0110").unwrap()));
        let j = v.find_proarrow("UV_10").unwrap();
        let k = v.find_proarrow("VU_01").unwrap();
        assert_eq!(m.composite(&[j, k]), Some(v.find_proarrow("UU_0").unwrap()));
        assert_eq!(m.composite(&[k, j]), Some(v.find_proarrow("VV_0010").unwrap()));
    }

    #[test]
    fn selected_families_must_be_closed() {
        let m = b2();
        let unit = m.unit(m.vdc().find_object("V").unwrap()).unwrap();
        let err = MatrixEquipment::new(
            "partial",
            FiniteQuantale::boolean(),
            &[("U", 1), ("V", 2)],
            Family::Selected(alloc::vec![MatrixSpec {
                name: None,
                src: "V".into(),
                tgt: "V".into(),
                entries: m.matrix(unit).to_vec(),
            }]),
            MatrixCaps::default(),
        );
        assert!(matches!(err, Err(InstanceError::NotClosed(_))));
        assert!(m.without(unit).is_ok());
    }
}
