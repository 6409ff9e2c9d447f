//! Alphabets, patterns, SFT descriptions and periodic configurations.
//!
//! The group acts on configurations x: G -> A on the left by
//! (g x)(h) = x(g^{-1} h). A pattern is a map from a finite support to the
//! alphabet; an SFT is the set of configurations in which none of finitely
//! many forbidden patterns appears at any translate. Periodic configurations
//! are stored through a quotient map onto a finite group together with a
//! labeling of the quotient, which makes every test here exact.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{Backend, GroupContext, GroupElement};
use crate::hom::Homomorphism;
use crate::lattice;
use crate::model;

/// Enumeration and search ceilings. `pattern_cap` bounds every pattern or
/// assignment enumeration; `node_budget` bounds backtracking searches.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub pattern_cap: usize,
    pub node_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { pattern_cap: 1_000_000, node_budget: 10_000_000 }
    }
}

pub type LetterId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<String>,
    lookup: HashMap<String, LetterId>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>) -> Result<Alphabet> {
        if letters.is_empty() {
            return Err(Error::InvalidModel("alphabet must not be empty".into()));
        }
        let mut lookup = HashMap::new();
        for (i, l) in letters.iter().enumerate() {
            if lookup.insert(l.clone(), i as LetterId).is_some() {
                return Err(Error::InvalidModel(format!("duplicate letter {l:?}")));
            }
        }
        Ok(Alphabet { letters, lookup })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn name(&self, id: LetterId) -> &str {
        &self.letters[id as usize]
    }

    pub fn id(&self, name: &str) -> Option<LetterId> {
        self.lookup.get(name).copied()
    }

    /// The product alphabet with pair letters "(a,b)"; the pair (i, j) gets
    /// id i * other.len() + j.
    pub fn product(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut letters = Vec::with_capacity(self.len() * other.len());
        for a in &self.letters {
            for b in &other.letters {
                letters.push(format!("({a},{b})"));
            }
        }
        Alphabet::new(letters)
    }
}

/// A finite pattern: a function from a finite support inside the group to
/// the alphabet. Canonical form: support sorted in the canonical element
/// order, letters stored in parallel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    support: Vec<GroupElement>,
    letters: Vec<LetterId>,
}

impl Pattern {
    pub fn new(ctx: &GroupContext, support: Vec<GroupElement>, letters: Vec<LetterId>) -> Result<Pattern> {
        if support.is_empty() {
            return Err(Error::InvalidPattern("support must not be empty".into()));
        }
        if support.len() != letters.len() {
            return Err(Error::InvalidPattern(format!(
                "support has {} cells but {} letters given",
                support.len(),
                letters.len()
            )));
        }
        for g in &support {
            ctx.validate_elem(g)?;
        }
        let mut paired: Vec<(GroupElement, LetterId)> = support.into_iter().zip(letters).collect();
        paired.sort_by_key(|(g, _)| ctx.elem_key(g));
        for w in paired.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidPattern(format!(
                    "duplicate support cell {}",
                    ctx.render(&w[0].0)
                )));
            }
        }
        let (support, letters) = paired.into_iter().unzip();
        Ok(Pattern { support, letters })
    }

    pub fn support(&self) -> &[GroupElement] {
        &self.support
    }

    pub fn letters(&self) -> &[LetterId] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn sort_key(&self, ctx: &GroupContext) -> (Vec<(u64, Vec<i64>)>, Vec<LetterId>) {
        (self.support.iter().map(|g| ctx.elem_key(g)).collect(), self.letters.clone())
    }
}

/// Forbidden patterns sharing one support, with their letter rows in a set.
/// Constructions that normalize onto a common support produce thousands of
/// patterns over a handful of supports, so membership tests work per support
/// and look words up instead of scanning the flat list.
#[derive(Debug, Clone)]
struct SupportGroup {
    support: Vec<GroupElement>,
    words: HashSet<Vec<LetterId>>,
}

/// An SFT given by its alphabet and a canonical list of forbidden patterns.
#[derive(Debug, Clone)]
pub struct SftDescription {
    group: Arc<GroupContext>,
    alphabet: Alphabet,
    forbidden: Vec<Pattern>,
    grouped: OnceLock<Vec<SupportGroup>>,
}

impl SftDescription {
    pub fn new(group: Arc<GroupContext>, alphabet: Alphabet, forbidden: Vec<Pattern>) -> Result<SftDescription> {
        for p in &forbidden {
            for &l in p.letters() {
                if l as usize >= alphabet.len() {
                    return Err(Error::InvalidPattern(format!("letter id {l} out of range")));
                }
            }
            for g in p.support() {
                group.validate_elem(g)?;
            }
        }
        let mut forbidden = forbidden;
        forbidden.sort_by(|a, b| a.sort_key(&group).cmp(&b.sort_key(&group)));
        forbidden.dedup();
        Ok(SftDescription { group, alphabet, forbidden, grouped: OnceLock::new() })
    }

    /// Patterns grouped by support, built once on first use. The forbidden
    /// list is sorted with the support as the major key, so equal supports
    /// are adjacent.
    fn support_groups(&self) -> &[SupportGroup] {
        self.grouped.get_or_init(|| {
            let mut out: Vec<SupportGroup> = Vec::new();
            for p in &self.forbidden {
                match out.last_mut() {
                    Some(g) if g.support == *p.support() => {
                        g.words.insert(p.letters().to_vec());
                    }
                    _ => out.push(SupportGroup {
                        support: p.support().to_vec(),
                        words: HashSet::from([p.letters().to_vec()]),
                    }),
                }
            }
            out
        })
    }

    /// The full shift on the given alphabet.
    pub fn full_shift(group: Arc<GroupContext>, alphabet: Alphabet) -> Result<SftDescription> {
        SftDescription::new(group, alphabet, Vec::new())
    }

    pub fn group(&self) -> &Arc<GroupContext> {
        &self.group
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// SHA-256 over the canonical JSON form; equal digests mean structurally
    /// identical descriptions.
    pub fn digest(&self) -> String {
        let json = model::sft_to_canonical_json(self);
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The same SFT with every forbidden pattern rewritten onto the common
    /// support `omega` by enumerating all completions. `omega` must contain
    /// every original support.
    pub fn normalize_support(&self, omega: &[GroupElement], limits: &Limits) -> Result<SftDescription> {
        let mut omega = omega.to_vec();
        self.group.sort_unique(&mut omega);
        let positions: HashMap<GroupElement, usize> =
            omega.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let a = self.alphabet.len();
        let mut new_forbidden = Vec::new();
        let mut total: usize = 0;
        for p in &self.forbidden {
            let mut fixed: Vec<Option<LetterId>> = vec![None; omega.len()];
            for (g, &l) in p.support().iter().zip(p.letters()) {
                let pos = positions.get(g).ok_or_else(|| {
                    Error::InvalidPattern(format!(
                        "support cell {} is outside the target support",
                        self.group.render(g)
                    ))
                })?;
                fixed[*pos] = Some(l);
            }
            let free: Vec<usize> =
                (0..omega.len()).filter(|&i| fixed[i].is_none()).collect();
            let completions = (a as u64).checked_pow(free.len() as u32).unwrap_or(u64::MAX);
            total = total.saturating_add(completions as usize);
            if total > limits.pattern_cap {
                return Err(Error::CapExceeded(format!(
                    "support normalization needs more than {} patterns",
                    limits.pattern_cap
                )));
            }
            let mut letters: Vec<LetterId> = fixed.iter().map(|o| o.unwrap_or(0)).collect();
            loop {
                new_forbidden.push(Pattern::new(&self.group, omega.clone(), letters.clone())?);
                let mut i = free.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    let idx = free[i];
                    letters[idx] += 1;
                    if (letters[idx] as usize) < a {
                        break;
                    }
                    letters[idx] = 0;
                }
                if free.is_empty() || free.iter().all(|&idx| letters[idx] == 0) {
                    break;
                }
            }
        }
        SftDescription::new(Arc::clone(&self.group), self.alphabet.clone(), new_forbidden)
    }

    /// Union of all forbidden supports, together with the identity.
    pub fn joint_support(&self) -> Vec<GroupElement> {
        let mut omega = vec![self.group.identity()];
        for p in &self.forbidden {
            omega.extend_from_slice(p.support());
        }
        self.group.sort_unique(&mut omega);
        omega
    }

    /// The intersection of two SFTs over the same group and alphabet:
    /// configurations avoiding both forbidden lists.
    pub fn intersect(&self, other: &SftDescription) -> Result<SftDescription> {
        if !self.group.same_group(other.group()) {
            return Err(Error::GroupMismatch("intersection needs one group".into()));
        }
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch("intersection needs one alphabet".into()));
        }
        let mut forbidden = self.forbidden.clone();
        forbidden.extend_from_slice(other.forbidden());
        SftDescription::new(Arc::clone(&self.group), self.alphabet.clone(), forbidden)
    }
}

/// A finite piece of a configuration: letters on an explicit finite domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialConfiguration {
    domain: Vec<GroupElement>,
    letters: Vec<LetterId>,
}

impl PartialConfiguration {
    pub fn new(ctx: &GroupContext, domain: Vec<GroupElement>, letters: Vec<LetterId>) -> Result<PartialConfiguration> {
        let p = Pattern::new(ctx, domain, letters)?;
        Ok(PartialConfiguration { domain: p.support, letters: p.letters })
    }

    pub fn domain(&self) -> &[GroupElement] {
        &self.domain
    }

    pub fn letters(&self) -> &[LetterId] {
        &self.letters
    }

    pub fn get(&self, g: &GroupElement) -> Option<LetterId> {
        self.domain.iter().position(|d| d == g).map(|i| self.letters[i])
    }
}

/// A configuration x = labeling . q for a quotient map q of G onto a finite
/// group; x is constant on cosets of the kernel, hence weakly periodic, and
/// strongly periodic because the kernel has finite index.
#[derive(Debug, Clone)]
pub struct PeriodicConfiguration {
    quotient: Homomorphism,
    labeling: Vec<LetterId>,
    alphabet: Alphabet,
}

/// The stabilizer of a periodic configuration, reported inside the quotient:
/// the subgroup of quotient elements whose translation fixes the labeling.
/// The stabilizer of the configuration in G is the full preimage, and
/// `index` is its index in G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerInfo {
    pub fixing_cosets: Vec<usize>,
    pub index: usize,
}

impl PeriodicConfiguration {
    pub fn new(quotient: Homomorphism, labeling: Vec<LetterId>, alphabet: Alphabet) -> Result<PeriodicConfiguration> {
        let order = quotient
            .target()
            .order()
            .ok_or_else(|| Error::InvalidHomomorphism("quotient target must be finite".into()))?;
        if labeling.len() != order {
            return Err(Error::InvalidModel(format!(
                "labeling has {} entries for a quotient of order {order}",
                labeling.len()
            )));
        }
        for &l in &labeling {
            if l as usize >= alphabet.len() {
                return Err(Error::InvalidModel(format!("letter id {l} out of range")));
            }
        }
        Ok(PeriodicConfiguration { quotient, labeling, alphabet })
    }

    pub fn quotient(&self) -> &Homomorphism {
        &self.quotient
    }

    pub fn labeling(&self) -> &[LetterId] {
        &self.labeling
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn group(&self) -> &Arc<GroupContext> {
        self.quotient.source()
    }

    /// The letter at a group element.
    pub fn at(&self, g: &GroupElement) -> Result<LetterId> {
        Ok(self.labeling[self.quotient.apply_idx(g)?])
    }

    /// Index of the cell holding the value of (c x) at quotient cell `cell`,
    /// i.e. c^{-1} cell. All translation of configurations goes through
    /// here.
    fn act_on_cell(&self, c: usize, cell: usize) -> usize {
        let fin = self.quotient.target().finite_group().expect("finite quotient");
        fin.mul_idx(fin.inv_idx(c), cell)
    }

    /// The translate c x as a labeling over the same quotient.
    pub fn translate(&self, c: usize) -> PeriodicConfiguration {
        let labeling = (0..self.labeling.len())
            .map(|cell| self.labeling[self.act_on_cell(c, cell)])
            .collect();
        PeriodicConfiguration {
            quotient: self.quotient.clone(),
            labeling,
            alphabet: self.alphabet.clone(),
        }
    }

    /// All distinct labelings in the orbit of x under translation.
    pub fn orbit(&self) -> Vec<Vec<LetterId>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in 0..self.labeling.len() {
            let t = self.translate(c);
            if seen.insert(t.labeling.clone()) {
                out.push(t.labeling);
            }
        }
        out
    }

    /// Stabilizer data: which quotient elements fix the labeling, and the
    /// index of the preimage subgroup in G.
    pub fn stabilizer(&self) -> StabilizerInfo {
        let fixing: Vec<usize> = (0..self.labeling.len())
            .filter(|&c| {
                (0..self.labeling.len())
                    .all(|cell| self.labeling[self.act_on_cell(c, cell)] == self.labeling[cell])
            })
            .collect();
        let index = self.labeling.len() / fixing.len();
        StabilizerInfo { fixing_cosets: fixing, index }
    }

    /// For Z^d sources: HNF basis of the full stabilizer lattice in G.
    pub fn stabilizer_lattice(&self) -> Result<Vec<Vec<i64>>> {
        let kernel = self.quotient.kernel_lattice()?;
        let stab = self.stabilizer();
        let mut rows = kernel.clone();
        for &c in &stab.fixing_cosets {
            let lift = self.quotient.lift(&GroupElement::Index(c))?;
            match lift {
                GroupElement::Vector(v) => rows.push(v),
                _ => unreachable!("Z^d source"),
            }
        }
        let dim = kernel.len();
        lattice::hnf(&rows, dim)
    }

    /// Rewrites the configuration over the quotient by its full stabilizer,
    /// which is the canonical form used for equality and serialization.
    /// Supported for Z^d and finite sources.
    pub fn canonical(&self) -> Result<PeriodicConfiguration> {
        match self.group().backend() {
            Backend::FreeAbelian { .. } => {
                let stab = self.stabilizer_lattice()?;
                let table = crate::coset::CosetTable::sublattice(self.group(), &stab)?;
                let hom = table.quotient_hom()?;
                let mut labeling = Vec::with_capacity(table.index());
                for t in table.transversal() {
                    labeling.push(self.at(t)?);
                }
                PeriodicConfiguration::new(hom, labeling, self.alphabet.clone())
            }
            Backend::Finite(fin) => {
                let hom = Homomorphism::identity(self.group())?;
                let mut labeling = Vec::with_capacity(fin.order());
                for i in 0..fin.order() {
                    labeling.push(self.at(&GroupElement::Index(i))?);
                }
                PeriodicConfiguration::new(hom, labeling, self.alphabet.clone())
            }
            _ => Err(Error::Unsupported(format!(
                "canonical forms are not available over {}",
                self.group().name()
            ))),
        }
    }

    /// Structural equality after canonicalization.
    pub fn same_configuration(&self, other: &PeriodicConfiguration) -> Result<bool> {
        if !self.group().same_group(other.group()) || self.alphabet != other.alphabet {
            return Ok(false);
        }
        let a = self.canonical()?;
        let b = other.canonical()?;
        match (a.group().backend(), b.group().backend()) {
            (Backend::FreeAbelian { .. }, _) => Ok(a.quotient.kernel_lattice()? == b.quotient.kernel_lattice()?
                && a.labeling == b.labeling),
            _ => Ok(a.labeling == b.labeling),
        }
    }
}

/// True when the pattern appears somewhere in x, i.e. some translate of x
/// restricts to p on its support.
pub fn appears(p: &Pattern, x: &PeriodicConfiguration) -> Result<bool> {
    for g in p.support() {
        x.group().validate_elem(g)?;
    }
    let cells: Vec<usize> = p
        .support()
        .iter()
        .map(|g| x.quotient().apply_idx(g))
        .collect::<Result<_>>()?;
    let order = x.labeling().len();
    'outer: for c in 0..order {
        for (cell, &l) in cells.iter().zip(p.letters()) {
            if x.labeling()[x.act_on_cell(c, *cell)] != l {
                continue 'outer;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// True when x is in the SFT: no forbidden pattern appears.
pub fn member(x: &PeriodicConfiguration, sft: &SftDescription) -> Result<bool> {
    if !x.group().same_group(sft.group()) {
        return Err(Error::GroupMismatch(format!(
            "configuration over {} tested in an SFT over {}",
            x.group().name(),
            sft.group().name()
        )));
    }
    if *x.alphabet() != *sft.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "configuration alphabet differs from the SFT alphabet of {} letters",
            sft.alphabet().len()
        )));
    }
    let fin = x.quotient().target().finite_group().expect("finite quotient");
    let order = x.labeling().len();
    let mut word: Vec<LetterId> = Vec::new();
    for group in sft.support_groups() {
        let cells: Vec<usize> = group
            .support
            .iter()
            .map(|g| x.quotient().apply_idx(g))
            .collect::<Result<_>>()?;
        for c in 0..order {
            let ci = fin.inv_idx(c);
            word.clear();
            word.extend(cells.iter().map(|&cell| x.labeling()[fin.mul_idx(ci, cell)]));
            if group.words.contains(&word) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when no forbidden pattern is fully contained in the labeled domain.
/// Patterns sticking out of the domain are not checked, so this is a local
/// necessary condition, not membership.
pub fn legal_partial(partial: &PartialConfiguration, sft: &SftDescription) -> Result<bool> {
    let group = sft.group();
    for &l in partial.letters() {
        if l as usize >= sft.alphabet().len() {
            return Err(Error::AlphabetMismatch(format!("letter id {l} out of range")));
        }
    }
    let lookup: HashMap<&GroupElement, LetterId> =
        partial.domain().iter().zip(partial.letters().iter().copied()).collect();
    for p in sft.forbidden() {
        let anchor = &p.support()[0];
        let anchor_inv = group.inv(anchor)?;
        for d in partial.domain() {
            // Candidate translate g with g * anchor = d.
            let g = group.mul(d, &anchor_inv)?;
            let mut all = true;
            let mut matches = true;
            for (w, &l) in p.support().iter().zip(p.letters()) {
                let cell = group.mul(&g, w)?;
                match lookup.get(&cell) {
                    Some(&have) => {
                        if have != l {
                            matches = false;
                            break;
                        }
                    }
                    None => {
                        all = false;
                        break;
                    }
                }
            }
            if all && matches {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All labelings over a fixed quotient, in lexicographic order. Capped by
/// `limits.pattern_cap`.
pub fn all_labelings(order: usize, letters: usize, limits: &Limits) -> Result<Vec<Vec<LetterId>>> {
    let count = (letters as f64).powi(order as i32);
    if count > limits.pattern_cap as f64 {
        return Err(Error::CapExceeded(format!(
            "{letters}^{order} labelings exceed the cap"
        )));
    }
    let mut out = Vec::new();
    let mut cur = vec![0 as LetterId; order];
    loop {
        out.push(cur.clone());
        let mut i = order;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if (cur[i] as usize) < letters {
                break;
            }
            cur[i] = 0;
        }
    }
}
