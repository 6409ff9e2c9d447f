//! Finite-index subgroups as coset tables.
//!
//! A subgroup H of G of finite index is stored through the right action of
//! the generators of G on the right cosets Hg, together with a transversal
//! whose first entry is the identity. Tables can be built from a sublattice
//! basis (free abelian), from subgroup generators (finite groups), or given
//! directly as permutations (the only option for free groups).

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{Backend, FiniteGroup, GroupContext, GroupElement};
use crate::hom::Homomorphism;
use crate::lattice;

#[derive(Debug, Clone)]
pub struct CosetTable {
    group: Arc<GroupContext>,
    /// fwd[k][c] is the coset of (Hg_c) a_k for the k-th generator a_k.
    fwd: Vec<Vec<u32>>,
    bwd: Vec<Vec<u32>>,
    transversal: Vec<GroupElement>,
    /// HNF basis when the table comes from a sublattice of Z^d.
    sublattice: Option<Vec<Vec<i64>>>,
    box_index: Option<HashMap<Vec<i64>, u32>>,
}

impl CosetTable {
    /// Table of the sublattice of Z^d spanned by `basis`.
    pub fn sublattice(group: &Arc<GroupContext>, basis: &[Vec<i64>]) -> Result<CosetTable> {
        let rank = match group.backend() {
            Backend::FreeAbelian { rank } => *rank,
            _ => {
                return Err(Error::BackendMismatch(
                    "sublattice tables need a free abelian group".into(),
                ))
            }
        };
        let h = lattice::hnf(basis, rank)?;
        let mut cells = lattice::box_cells(&h);
        cells.sort_by_key(|v| group.elem_key(&GroupElement::Vector(v.clone())));
        let box_index: HashMap<Vec<i64>, u32> =
            cells.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let index = cells.len();
        let mut fwd = Vec::new();
        for k in 0..rank {
            let mut perm = vec![0u32; index];
            for (c, cell) in cells.iter().enumerate() {
                let mut next = cell.clone();
                next[k] += 1;
                perm[c] = box_index[&lattice::box_reduce(&h, &next)];
            }
            fwd.push(perm);
        }
        let bwd = invert_all(&fwd)?;
        let transversal = cells.into_iter().map(GroupElement::Vector).collect();
        let table = CosetTable {
            group: Arc::clone(group),
            fwd,
            bwd,
            transversal,
            sublattice: Some(h),
            box_index: Some(box_index),
        };
        table.validate()?;
        Ok(table)
    }

    /// Table of the subgroup generated by `gens` inside a finite group.
    pub fn finite_subgroup(group: &Arc<GroupContext>, gens: &[GroupElement]) -> Result<CosetTable> {
        let fin = group
            .finite_group()
            .ok_or_else(|| Error::BackendMismatch("subgroup closure needs a finite group".into()))?;
        for g in gens {
            group.validate_elem(g)?;
        }
        let members = subgroup_closure(fin, gens);
        let n = fin.order();
        let mut coset = vec![usize::MAX; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| group.elem_key(&GroupElement::Index(i)));
        let mut reps = Vec::new();
        for &g in &order {
            if coset[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &h in &members {
                coset[fin.mul_idx(h, g)] = c;
            }
        }
        let index = reps.len();
        let gen_elems: Vec<usize> = group
            .generators()
            .iter()
            .map(|(_, g)| match g {
                GroupElement::Index(i) => *i,
                _ => unreachable!(),
            })
            .collect();
        let mut fwd = Vec::new();
        for &a in &gen_elems {
            let mut perm = vec![0u32; index];
            for (c, &rep) in reps.iter().enumerate() {
                perm[c] = coset[fin.mul_idx(rep, a)] as u32;
            }
            fwd.push(perm);
        }
        let bwd = invert_all(&fwd)?;
        let transversal = reps.into_iter().map(GroupElement::Index).collect();
        let table = CosetTable {
            group: Arc::clone(group),
            fwd,
            bwd,
            transversal,
            sublattice: None,
            box_index: None,
        };
        table.validate()?;
        Ok(table)
    }

    /// Table given directly by the right action of the generators. When no
    /// transversal is supplied, one is built breadth first over the
    /// generators in order.
    pub fn from_action(
        group: &Arc<GroupContext>,
        fwd: Vec<Vec<u32>>,
        transversal: Option<Vec<GroupElement>>,
    ) -> Result<CosetTable> {
        let bwd = invert_all(&fwd)?;
        let transversal = match transversal {
            Some(t) => t,
            None => bfs_transversal(group, &fwd, &bwd)?,
        };
        let table = CosetTable {
            group: Arc::clone(group),
            fwd,
            bwd,
            transversal,
            sublattice: None,
            box_index: None,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn group(&self) -> &Arc<GroupContext> {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.transversal.len()
    }

    pub fn transversal(&self) -> &[GroupElement] {
        &self.transversal
    }

    /// The right action of the generators on cosets, one permutation per
    /// generator.
    pub fn action(&self) -> &[Vec<u32>] {
        &self.fwd
    }

    pub fn sublattice_basis(&self) -> Option<&Vec<Vec<i64>>> {
        self.sublattice.as_ref()
    }

    /// Applies the generator word to a coset.
    pub fn walk(&self, mut c: u32, word: &[i32]) -> u32 {
        for &x in word {
            let k = (x.unsigned_abs() - 1) as usize;
            c = if x > 0 { self.fwd[k][c as usize] } else { self.bwd[k][c as usize] };
        }
        c
    }

    pub fn coset_of(&self, g: &GroupElement) -> Result<u32> {
        self.group.validate_elem(g)?;
        if let (Some(h), Some(map)) = (&self.sublattice, &self.box_index) {
            let v = match g {
                GroupElement::Vector(v) => v,
                _ => unreachable!("validated above"),
            };
            return Ok(map[&lattice::box_reduce(h, v)]);
        }
        Ok(self.walk(0, &self.group.word(g)?))
    }

    pub fn contains(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.coset_of(g)? == 0)
    }

    fn validate(&self) -> Result<()> {
        let gens = self.group.generators();
        if self.fwd.len() != gens.len() {
            return Err(Error::InvalidCosetTable(format!(
                "expected {} generator actions, got {}",
                gens.len(),
                self.fwd.len()
            )));
        }
        let n = self.index();
        if n == 0 {
            return Err(Error::InvalidCosetTable("table has no cosets".into()));
        }
        for perm in &self.fwd {
            if perm.len() != n {
                return Err(Error::InvalidCosetTable("action length differs from index".into()));
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(c) = queue.pop_front() {
            for k in 0..self.fwd.len() {
                for next in [self.fwd[k][c as usize], self.bwd[k][c as usize]] {
                    if !seen[next as usize] {
                        seen[next as usize] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidCosetTable("action is not transitive".into()));
        }
        if self.transversal.len() != n {
            return Err(Error::InvalidCosetTable("transversal length differs from index".into()));
        }
        if !self.group.is_identity(&self.transversal[0]) {
            return Err(Error::InvalidCosetTable("transversal must start at the identity".into()));
        }
        for (i, t) in self.transversal.iter().enumerate() {
            self.group.validate_elem(t)?;
            if self.walk(0, &self.group.word(t)?) != i as u32 {
                return Err(Error::InvalidCosetTable(format!(
                    "transversal entry {} lies in coset {}",
                    self.group.render(t),
                    self.walk(0, &self.group.word(t)?)
                )));
            }
        }
        self.validate_relations()
    }

    /// Checks that the action respects the defining relations of the group,
    /// so that it really is an action of G and not just of a free group.
    fn validate_relations(&self) -> Result<()> {
        let n = self.index() as u32;
        match self.group.backend() {
            Backend::FreeAbelian { rank } => {
                for i in 0..*rank {
                    for j in (i + 1)..*rank {
                        let li = i as i32 + 1;
                        let lj = j as i32 + 1;
                        for c in 0..n {
                            if self.walk(c, &[li, lj, -li, -lj]) != c {
                                return Err(Error::InvalidCosetTable(format!(
                                    "generators {} and {} do not commute on coset {c}",
                                    i + 1,
                                    j + 1
                                )));
                            }
                        }
                    }
                }
            }
            Backend::FreeGroup { .. } => {}
            Backend::Heisenberg => {
                for word in [[-1, -2, 1, 2, -3].as_slice(), &[-1, -3, 1, 3], &[-2, -3, 2, 3]] {
                    for c in 0..n {
                        if self.walk(c, word) != c {
                            return Err(Error::InvalidCosetTable(
                                "action violates the Heisenberg relations".into(),
                            ));
                        }
                    }
                }
            }
            Backend::Finite(fin) => {
                let perms: Vec<Vec<u32>> = (0..fin.order())
                    .map(|g| {
                        let w = fin.words()[g].clone();
                        (0..n).map(|c| self.walk(c, &w)).collect()
                    })
                    .collect();
                for g in 0..fin.order() {
                    for h in 0..fin.order() {
                        let gh = fin.mul_idx(g, h);
                        for c in 0..n as usize {
                            if perms[h][perms[g][c] as usize] != perms[gh][c] {
                                return Err(Error::InvalidCosetTable(
                                    "action is not well defined on the finite group".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Schreier generators of the subgroup: t a (rep of ta)^{-1} over all
    /// transversal entries t and generators a taken together with their
    /// inverses, with identities dropped. They generate the subgroup.
    pub fn schreier_generators(&self) -> Result<Vec<GroupElement>> {
        let gens = self.group.generators();
        let mut out = Vec::new();
        for (c, t) in self.transversal.iter().enumerate() {
            for (k, (_, a)) in gens.iter().enumerate() {
                for (step, target) in [
                    (a.clone(), self.fwd[k][c] as usize),
                    (self.group.inv(a)?, self.bwd[k][c] as usize),
                ] {
                    let ta = self.group.mul(t, &step)?;
                    let s = self.group.mul(&ta, &self.group.inv(&self.transversal[target])?)?;
                    if !self.group.is_identity(&s) {
                        out.push(s);
                    }
                }
            }
        }
        self.group.sort_unique(&mut out);
        Ok(out)
    }

    /// True when the subgroup is normal, i.e. conjugating its Schreier
    /// generators by all transversal entries stays in coset 0.
    pub fn is_normal(&self) -> Result<bool> {
        let schreier = self.schreier_generators()?;
        for t in &self.transversal {
            for s in &schreier {
                if !self.contains(&self.group.conj(t, s)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The quotient map G -> G/H as a homomorphism onto a finite group whose
    /// elements are the cosets, named after the transversal. Requires a
    /// normal subgroup. The kernel generators are the Schreier generators.
    pub fn quotient_hom(&self) -> Result<Homomorphism> {
        if !self.is_normal()? {
            return Err(Error::NotNormal(format!(
                "index {} subgroup of {}",
                self.index(),
                self.group.name()
            )));
        }
        let n = self.index();
        let names: Vec<String> = self.transversal.iter().map(|t| self.group.render(t)).collect();
        let mut table = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = self.group.mul(&self.transversal[i], &self.transversal[j])?;
                table[i][j] = self.coset_of(&prod)? as usize;
            }
        }
        let gens = self.group.generators();
        let mut images = Vec::new();
        for (_, a) in &gens {
            images.push(self.coset_of(a)? as usize);
        }
        let mut q_gens: Vec<usize> = Vec::new();
        for &img in &images {
            if img != 0 && !q_gens.contains(&img) {
                q_gens.push(img);
            }
        }
        let fin = FiniteGroup::new(names, table, q_gens)?;
        let target = Arc::new(GroupContext::finite(
            format!("{}/{}", self.group.name(), self.index()),
            fin,
        ));
        Homomorphism::new(
            Arc::clone(&self.group),
            target,
            images.into_iter().map(GroupElement::Index).collect(),
            Some(self.schreier_generators()?),
        )
    }

    /// Coset table of the normal core, the kernel of the action of G on the
    /// cosets of H. It is the largest normal subgroup of G inside H.
    pub fn normal_core(&self) -> Result<CosetTable> {
        const CORE_CAP: usize = 100_000;
        let n = self.index();
        let idperm: Vec<u32> = (0..n as u32).collect();
        let mut elems: Vec<Vec<u32>> = vec![idperm.clone()];
        let mut pos: HashMap<Vec<u32>, u32> = HashMap::from([(idperm, 0u32)]);
        let mut words: Vec<Vec<i32>> = vec![Vec::new()];
        let mut queue = VecDeque::from([0usize]);
        while let Some(cur) = queue.pop_front() {
            for k in 0..self.fwd.len() {
                for (letter, step) in [(k as i32 + 1, &self.fwd[k]), (-(k as i32 + 1), &self.bwd[k])] {
                    let composed: Vec<u32> =
                        elems[cur].iter().map(|&c| step[c as usize]).collect();
                    if !pos.contains_key(&composed) {
                        if elems.len() >= CORE_CAP {
                            return Err(Error::CapExceeded("normal core index is too large".into()));
                        }
                        let mut w = words[cur].clone();
                        w.push(letter);
                        pos.insert(composed.clone(), elems.len() as u32);
                        elems.push(composed);
                        words.push(w);
                        queue.push_back(elems.len() - 1);
                    }
                }
            }
        }
        let mut fwd = Vec::new();
        for k in 0..self.fwd.len() {
            let mut perm = vec![0u32; elems.len()];
            for (i, p) in elems.iter().enumerate() {
                let composed: Vec<u32> = p.iter().map(|&c| self.fwd[k][c as usize]).collect();
                perm[i] = pos[&composed];
            }
            fwd.push(perm);
        }
        let mut transversal = Vec::new();
        for w in &words {
            transversal.push(self.group.eval_word(w)?);
        }
        CosetTable::from_action(&self.group, fwd, Some(transversal))
    }
}

fn invert_all(fwd: &[Vec<u32>]) -> Result<Vec<Vec<u32>>> {
    let mut bwd = Vec::with_capacity(fwd.len());
    for perm in fwd {
        let n = perm.len();
        let mut inv = vec![u32::MAX; n];
        for (i, &img) in perm.iter().enumerate() {
            if img as usize >= n || inv[img as usize] != u32::MAX {
                return Err(Error::InvalidCosetTable("generator action is not a permutation".into()));
            }
            inv[img as usize] = i as u32;
        }
        bwd.push(inv);
    }
    Ok(bwd)
}

fn bfs_transversal(
    group: &Arc<GroupContext>,
    fwd: &[Vec<u32>],
    bwd: &[Vec<u32>],
) -> Result<Vec<GroupElement>> {
    let n = fwd.first().map(|p| p.len()).unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidCosetTable("table has no cosets".into()));
    }
    let mut words: Vec<Option<Vec<i32>>> = vec![None; n];
    words[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        for k in 0..fwd.len() {
            for (letter, step) in [(k as i32 + 1, &fwd[k]), (-(k as i32 + 1), &bwd[k])] {
                let next = step[cur] as usize;
                if words[next].is_none() {
                    let mut w = words[cur].clone().unwrap();
                    w.push(letter);
                    words[next] = Some(w);
                    queue.push_back(next);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for w in words {
        let w = w.ok_or_else(|| Error::InvalidCosetTable("action is not transitive".into()))?;
        out.push(group.eval_word(&w)?);
    }
    Ok(out)
}

fn subgroup_closure(fin: &FiniteGroup, gens: &[GroupElement]) -> Vec<usize> {
    let mut members = vec![false; fin.order()];
    members[fin.identity_index()] = true;
    let mut queue: VecDeque<usize> = VecDeque::from([fin.identity_index()]);
    let gen_idx: Vec<usize> = gens
        .iter()
        .map(|g| match g {
            GroupElement::Index(i) => *i,
            _ => unreachable!("validated by caller"),
        })
        .collect();
    while let Some(cur) = queue.pop_front() {
        for &g in &gen_idx {
            for next in [fin.mul_idx(cur, g), fin.mul_idx(cur, fin.inv_idx(g))] {
                if !members[next] {
                    members[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    (0..fin.order()).filter(|&i| members[i]).collect()
}

/// The overlap set E = H and T T^{-1}: all differences t t'^{-1} of block
/// offsets that land in the subgroup, as ambient elements in canonical order.
pub fn overlap_set(table: &CosetTable, t_set: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let group = table.group();
    let mut out = Vec::new();
    for t in t_set {
        for t2 in t_set {
            let d = group.mul(t, &group.inv(t2)?)?;
            if table.contains(&d)? {
                out.push(d);
            }
        }
    }
    group.sort_unique(&mut out);
    Ok(out)
}

/// An inclusion of an abstract group H into an ambient group, pairing a
/// coset table with a context for H itself. `gen_images` are the ambient
/// images of the generators of H.
#[derive(Debug, Clone)]
pub struct SubgroupEmbedding {
    table: CosetTable,
    sub: Arc<GroupContext>,
    gen_images: Vec<GroupElement>,
    /// For finite ambient groups: ambient element index per sub element.
    finite_map: Option<Vec<usize>>,
}

impl SubgroupEmbedding {
    /// Full-rank sublattice of Z^d. The abstract copy of H is Z^d whose
    /// generators map to the HNF basis rows.
    pub fn sublattice(group: &Arc<GroupContext>, basis: &[Vec<i64>]) -> Result<SubgroupEmbedding> {
        let table = CosetTable::sublattice(group, basis)?;
        let h = table.sublattice_basis().unwrap().clone();
        let rank = h.len();
        let sub = Arc::new(GroupContext::free_abelian(
            format!("{}^sub{}", group.name(), lattice::index(&h)),
            rank,
        )?);
        let gen_images = h.iter().cloned().map(GroupElement::Vector).collect();
        Ok(SubgroupEmbedding { table, sub, gen_images, finite_map: None })
    }

    /// Subgroup of a finite group generated by `gens`.
    pub fn finite_subgroup(group: &Arc<GroupContext>, gens: &[GroupElement]) -> Result<SubgroupEmbedding> {
        let table = CosetTable::finite_subgroup(group, gens)?;
        let fin = group.finite_group().unwrap();
        for g in gens {
            group.validate_elem(g)?;
        }
        let members = subgroup_closure(fin, gens);
        let lookup: HashMap<usize, usize> =
            members.iter().enumerate().map(|(s, &a)| (a, s)).collect();
        let names: Vec<String> = members.iter().map(|&a| fin.names()[a].clone()).collect();
        let mut table_sub = vec![vec![0usize; members.len()]; members.len()];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                table_sub[i][j] = lookup[&fin.mul_idx(a, b)];
            }
        }
        let mut sub_gens = Vec::new();
        let mut gen_images = Vec::new();
        for g in gens {
            let a = match g {
                GroupElement::Index(i) => *i,
                _ => unreachable!("validated above"),
            };
            let s = lookup[&a];
            if s != lookup[&fin.identity_index()] && !sub_gens.contains(&s) {
                sub_gens.push(s);
                gen_images.push(GroupElement::Index(a));
            }
        }
        let sub_fin = FiniteGroup::new(names, table_sub, sub_gens)?;
        let sub = Arc::new(GroupContext::finite(format!("{}^sub", group.name()), sub_fin));
        Ok(SubgroupEmbedding {
            table,
            sub,
            gen_images,
            finite_map: Some(members),
        })
    }

    /// User-supplied embedding for backends without a solvable membership
    /// problem of their own (free groups): a coset table plus an abstract
    /// context and generator images. The images must lie in the subgroup and
    /// must generate it; injectivity of the induced map is the caller's
    /// responsibility.
    pub fn custom(
        table: CosetTable,
        sub: Arc<GroupContext>,
        gen_images: Vec<GroupElement>,
    ) -> Result<SubgroupEmbedding> {
        let expected = sub.generators().len();
        if gen_images.len() != expected {
            return Err(Error::InvalidModel(format!(
                "expected {expected} generator images, got {}",
                gen_images.len()
            )));
        }
        for g in &gen_images {
            table.group().validate_elem(g)?;
            if !table.contains(g)? {
                return Err(Error::InvalidModel(format!(
                    "generator image {} is not in the subgroup",
                    table.group().render(g)
                )));
            }
        }
        Ok(SubgroupEmbedding { table, sub, gen_images, finite_map: None })
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn sub(&self) -> &Arc<GroupContext> {
        &self.sub
    }

    pub fn ambient(&self) -> &Arc<GroupContext> {
        self.table.group()
    }

    pub fn gen_images(&self) -> &[GroupElement] {
        &self.gen_images
    }

    /// Maps an element of the abstract subgroup into the ambient group.
    pub fn embed(&self, h: &GroupElement) -> Result<GroupElement> {
        self.sub.validate_elem(h)?;
        let ambient = self.ambient();
        if let (GroupElement::Vector(v), Backend::FreeAbelian { rank }) = (h, ambient.backend()) {
            let mut out = vec![0i64; *rank];
            for (x, img) in v.iter().zip(&self.gen_images) {
                match img {
                    GroupElement::Vector(w) => {
                        for j in 0..*rank {
                            out[j] += x * w[j];
                        }
                    }
                    _ => unreachable!("images validated at construction"),
                }
            }
            return Ok(GroupElement::Vector(out));
        }
        let mut acc = ambient.identity();
        for &x in &self.sub.word(h)? {
            let img = &self.gen_images[(x.unsigned_abs() - 1) as usize];
            let step = if x > 0 { img.clone() } else { ambient.inv(img)? };
            acc = ambient.mul(&acc, &step)?;
        }
        Ok(acc)
    }

    /// Writes an ambient element of the subgroup in subgroup coordinates.
    /// Supported for sublattices of Z^d and for finite groups.
    pub fn restrict(&self, g: &GroupElement) -> Result<GroupElement> {
        self.ambient().validate_elem(g)?;
        if let Some(h) = self.table.sublattice_basis() {
            let v = match g {
                GroupElement::Vector(v) => v,
                _ => unreachable!("validated above"),
            };
            let coords = lattice::coordinates(h, v).ok_or_else(|| {
                Error::InvalidElement(format!(
                    "{} is not in the sublattice",
                    self.ambient().render(g)
                ))
            })?;
            return Ok(GroupElement::Vector(coords));
        }
        if let Some(map) = &self.finite_map {
            let a = match g {
                GroupElement::Index(i) => *i,
                _ => unreachable!("validated above"),
            };
            let s = map.iter().position(|&m| m == a).ok_or_else(|| {
                Error::InvalidElement(format!("{} is not in the subgroup", self.ambient().render(g)))
            })?;
            return Ok(GroupElement::Index(s));
        }
        Err(Error::Unsupported(format!(
            "restriction to subgroup coordinates is not available for {}",
            self.ambient().name()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z", 1).unwrap())
    }

    fn z2() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z2", 2).unwrap())
    }

    fn f2() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_group("F2", 2).unwrap())
    }

    #[test]
    fn three_z_table() {
        let table = CosetTable::sublattice(&z(), &[vec![3]]).unwrap();
        assert_eq!(table.index(), 3);
        assert_eq!(
            table.transversal(),
            &[
                GroupElement::Vector(vec![0]),
                GroupElement::Vector(vec![1]),
                GroupElement::Vector(vec![2]),
            ]
        );
        assert_eq!(table.coset_of(&GroupElement::Vector(vec![7])).unwrap(), 1);
        assert!(table.contains(&GroupElement::Vector(vec![-6])).unwrap());
        assert!(table.is_normal().unwrap());
    }

    #[test]
    fn even_lattice_quotient_is_klein_four() {
        let table = CosetTable::sublattice(&z2(), &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(table.index(), 4);
        let hom = table.quotient_hom().unwrap();
        let fin = hom.target().finite_group().unwrap();
        assert_eq!(fin.order(), 4);
        for i in 0..4 {
            assert_eq!(fin.mul_idx(i, i), fin.identity_index());
        }
    }

    #[test]
    fn skew_lattice_box() {
        let table = CosetTable::sublattice(&z2(), &[vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(table.index(), 2);
        assert!(table.contains(&GroupElement::Vector(vec![1, 1])).unwrap());
        assert!(table.contains(&GroupElement::Vector(vec![1, -1])).unwrap());
        assert!(!table.contains(&GroupElement::Vector(vec![1, 0])).unwrap());
    }

    #[test]
    fn schreier_generators_of_sublattice() {
        let table = CosetTable::sublattice(&z(), &[vec![2]]).unwrap();
        let schreier = table.schreier_generators().unwrap();
        // From transversal {0,1}: 0+1-1, 1+1-0 and their walks give 2 and -2.
        assert!(schreier.contains(&GroupElement::Vector(vec![2])));
        let h = lattice::hnf(
            &schreier
                .iter()
                .map(|g| match g {
                    GroupElement::Vector(v) => v.clone(),
                    _ => unreachable!(),
                })
                .collect::<Vec<_>>(),
            1,
        )
        .unwrap();
        assert_eq!(h, vec![vec![2]]);
    }

    #[test]
    fn free_group_index_three_cycle_is_not_normal() {
        // a acts as the 3-cycle (0 1 2), b fixes everything.
        let table = CosetTable::from_action(
            &f2(),
            vec![vec![1, 2, 0], vec![0, 1, 2]],
            None,
        )
        .unwrap();
        assert_eq!(table.index(), 3);
        assert!(table.is_normal().unwrap());

        // a acts as the transposition (0 1), b as (1 2): index 3, not normal.
        let table = CosetTable::from_action(
            &f2(),
            vec![vec![1, 0, 2], vec![0, 2, 1]],
            None,
        )
        .unwrap();
        assert!(!table.is_normal().unwrap());
        let core = table.normal_core().unwrap();
        // The action closure is all of S_3, so the core has index 6.
        assert_eq!(core.index(), 6);
        assert!(core.is_normal().unwrap());
    }

    #[test]
    fn from_action_rejects_non_permutations_and_bad_relations() {
        assert!(CosetTable::from_action(&f2(), vec![vec![1, 1, 0], vec![0, 1, 2]], None).is_err());
        // Non-commuting actions cannot define cosets in Z^2.
        assert!(CosetTable::from_action(
            &z2(),
            vec![vec![1, 0, 2], vec![0, 2, 1]],
            None
        )
        .is_err());
    }

    #[test]
    fn heisenberg_mod_two_table() {
        let h = Arc::new(GroupContext::heisenberg("H"));
        // Cosets of the subgroup generated by x^2, y^2, z: the action of x
        // and y on (Z/2)^2, z acting trivially.
        let fwd = vec![
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![0, 1, 2, 3],
        ];
        let table = CosetTable::from_action(&h, fwd, None).unwrap();
        assert_eq!(table.index(), 4);
        assert!(table.is_normal().unwrap());
        let hom = table.quotient_hom().unwrap();
        assert_eq!(hom.target().order(), Some(4));
        // z is in the kernel.
        assert_eq!(
            hom.apply(&GroupElement::Triple([0, 0, 1])).unwrap(),
            hom.target().identity()
        );
    }

    #[test]
    fn overlap_set_of_interval() {
        let table = CosetTable::sublattice(&z(), &[vec![3]]).unwrap();
        let t: Vec<GroupElement> = (0..4).map(|i| GroupElement::Vector(vec![i])).collect();
        let e = overlap_set(&table, &t).unwrap();
        assert_eq!(
            e,
            vec![
                GroupElement::Vector(vec![0]),
                GroupElement::Vector(vec![-3]),
                GroupElement::Vector(vec![3]),
            ]
        );
    }

    #[test]
    fn sublattice_embedding_round_trip() {
        let emb = SubgroupEmbedding::sublattice(&z2(), &[vec![2, 0], vec![0, 2]]).unwrap();
        let h = GroupElement::Vector(vec![3, -1]);
        let g = emb.embed(&h).unwrap();
        assert_eq!(g, GroupElement::Vector(vec![6, -2]));
        assert_eq!(emb.restrict(&g).unwrap(), h);
        assert!(emb.restrict(&GroupElement::Vector(vec![1, 0])).is_err());
    }

    #[test]
    fn finite_subgroup_embedding() {
        let names: Vec<String> = (0..6).map(|i| format!("r{i}")).collect();
        let table: Vec<Vec<usize>> = (0..6).map(|i| (0..6).map(|j| (i + j) % 6).collect()).collect();
        let fin = FiniteGroup::new(names, table, vec![1]).unwrap();
        let z6 = Arc::new(GroupContext::finite("Z6", fin));
        let emb = SubgroupEmbedding::finite_subgroup(&z6, &[GroupElement::Index(2)]).unwrap();
        assert_eq!(emb.table().index(), 2);
        assert_eq!(emb.sub().order(), Some(3));
        let s = emb.restrict(&GroupElement::Index(4)).unwrap();
        assert_eq!(emb.embed(&s).unwrap(), GroupElement::Index(4));
        assert!(emb.restrict(&GroupElement::Index(1)).is_err());
    }
}
