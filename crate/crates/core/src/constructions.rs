//! Pattern-set transformations: higher block shifts over subgroups, products,
//! fixed-point shifts of normal subgroups, locked shifts, induced shifts and
//! pullbacks along quotient maps.
//!
//! Each construction turns SFT descriptions into SFT descriptions, so the
//! solvers can run on the output of any of them.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coset::{overlap_set, CosetTable, SubgroupEmbedding};
use crate::error::{Error, Result};
use crate::group::{Backend, GroupContext, GroupElement};
use crate::hom::Homomorphism;
use crate::lattice;
use crate::shift::{
    member, Alphabet, LetterId, Limits, Pattern, PeriodicConfiguration, SftDescription,
};

/// How the block offset set T of a higher block shift is chosen.
pub enum BlockMode {
    /// T is given directly; the result describes the overlap shift I alone.
    Raw { t_set: Vec<GroupElement> },
    /// T = T' Omega for a full set T' of right coset representatives
    /// (defaulting to the transversal) and the normalized joint support
    /// Omega of the source; the result describes I together with the
    /// single-block forbidden letters J, and is conjugate to the source.
    Blocked { t_prime: Option<Vec<GroupElement>> },
}

/// A higher block recoding of an SFT over G to an SFT over a finite-index
/// subgroup H: configurations are cut into blocks x(h t), t in T, read as
/// single letters over H.
pub struct HigherBlockSystem {
    source: SftDescription,
    embedding: SubgroupEmbedding,
    t_set: Vec<GroupElement>,
    t_for_coset: Vec<usize>,
    omega: Vec<GroupElement>,
    block_alphabet: Alphabet,
    overlap_support: Vec<GroupElement>,
    overlap_sft: SftDescription,
    result: SftDescription,
}

impl HigherBlockSystem {
    pub fn source(&self) -> &SftDescription {
        &self.source
    }

    pub fn embedding(&self) -> &SubgroupEmbedding {
        &self.embedding
    }

    pub fn t_set(&self) -> &[GroupElement] {
        &self.t_set
    }

    pub fn omega(&self) -> &[GroupElement] {
        &self.omega
    }

    pub fn block_alphabet(&self) -> &Alphabet {
        &self.block_alphabet
    }

    /// The overlap set E in subgroup coordinates.
    pub fn overlap_support(&self) -> &[GroupElement] {
        &self.overlap_support
    }

    /// The overlap shift I: block sequences consistent where blocks overlap.
    pub fn overlap_sft(&self) -> &SftDescription {
        &self.overlap_sft
    }

    /// The full higher block SFT over the subgroup.
    pub fn result(&self) -> &SftDescription {
        &self.result
    }

    fn letters_per_block(&self) -> usize {
        self.t_set.len()
    }

    /// Letters of the source alphabet inside a block letter, in T order.
    pub fn block_letters(&self, id: LetterId) -> Vec<LetterId> {
        let a = self.source.alphabet().len() as u64;
        let mut rem = id as u64;
        let mut out = vec![0 as LetterId; self.letters_per_block()];
        for k in (0..self.letters_per_block()).rev() {
            out[k] = (rem % a) as LetterId;
            rem /= a;
        }
        out
    }

    fn block_id(&self, letters: &[LetterId]) -> LetterId {
        let a = self.source.alphabet().len() as u64;
        let mut id = 0u64;
        for &l in letters {
            id = id * a + l as u64;
        }
        id as LetterId
    }
}

fn block_alphabet(source: &Alphabet, t_len: usize, limits: &Limits) -> Result<Alphabet> {
    let count = (source.len() as f64).powi(t_len as i32);
    if count > limits.pattern_cap as f64 {
        return Err(Error::CapExceeded(format!(
            "{}^{t_len} block letters exceed the cap",
            source.len()
        )));
    }
    let count = (source.len() as u64).pow(t_len as u32);
    let mut names = Vec::with_capacity(count as usize);
    let mut cur = vec![0 as LetterId; t_len];
    loop {
        names.push(
            cur.iter().map(|&l| source.name(l).to_string()).collect::<Vec<_>>().join("|"),
        );
        let mut k = t_len;
        loop {
            if k == 0 {
                return Alphabet::new(names);
            }
            k -= 1;
            cur[k] += 1;
            if (cur[k] as usize) < source.len() {
                break;
            }
            cur[k] = 0;
        }
    }
}

pub fn higher_block_sft(
    source: &SftDescription,
    emb: &SubgroupEmbedding,
    mode: BlockMode,
    limits: &Limits,
) -> Result<HigherBlockSystem> {
    let group = source.group();
    if !group.same_group(emb.ambient()) {
        return Err(Error::GroupMismatch(
            "higher block shifts need the SFT and the subgroup over one group".into(),
        ));
    }
    let table = emb.table();
    let omega = source.joint_support();
    let (t_set, normalized): (Vec<GroupElement>, Option<SftDescription>) = match mode {
        BlockMode::Raw { t_set } => {
            let mut t = t_set;
            group.sort_unique(&mut t);
            (t, None)
        }
        BlockMode::Blocked { t_prime } => {
            let t_prime = match t_prime {
                Some(t) => t,
                None => table.transversal().to_vec(),
            };
            let mut seen = vec![false; table.index()];
            for t in &t_prime {
                let c = table.coset_of(t)? as usize;
                if seen[c] {
                    return Err(Error::InvalidModel(format!(
                        "{} duplicates a coset representative",
                        group.render(t)
                    )));
                }
                seen[c] = true;
            }
            if seen.iter().any(|&s| !s) {
                return Err(Error::InvalidModel(
                    "coset representatives must cover every coset".into(),
                ));
            }
            let mut t = Vec::new();
            for tp in &t_prime {
                for w in &omega {
                    t.push(group.mul(tp, w)?);
                }
            }
            group.sort_unique(&mut t);
            let normalized = source.normalize_support(&omega, limits)?;
            (t, Some(normalized))
        }
    };
    let mut covered = vec![false; table.index()];
    let mut t_for_coset = vec![usize::MAX; table.index()];
    for (pos, t) in t_set.iter().enumerate() {
        let c = table.coset_of(t)? as usize;
        if !covered[c] {
            covered[c] = true;
            t_for_coset[c] = pos;
        }
    }
    if covered.iter().any(|&c| !c) {
        return Err(Error::InvalidModel(
            "the offset set must meet every coset of the subgroup".into(),
        ));
    }
    let alphabet = block_alphabet(source.alphabet(), t_set.len(), limits)?;

    let e_ambient = overlap_set(table, &t_set)?;
    let mut overlap_support: Vec<GroupElement> = e_ambient
        .iter()
        .map(|g| emb.restrict(g))
        .collect::<Result<_>>()?;
    emb.sub().sort_unique(&mut overlap_support);

    let sys = HigherBlockSystem {
        source: source.clone(),
        embedding: emb.clone(),
        t_set,
        t_for_coset,
        omega,
        block_alphabet: alphabet,
        overlap_support,
        overlap_sft: SftDescription::full_shift(Arc::clone(emb.sub()), Alphabet::new(vec!["_".into()])?)?,
        result: SftDescription::full_shift(Arc::clone(emb.sub()), Alphabet::new(vec!["_".into()])?)?,
    };

    // Overlap constraints: for h in E and t in T with h^{-1} t in T, blocks
    // at 1 and at h must agree where they cover the same group element.
    let t_pos: HashMap<GroupElement, usize> =
        sys.t_set.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let id_pos = sys
        .overlap_support
        .iter()
        .position(|h| emb.sub().is_identity(h))
        .expect("identity is always in the overlap set");
    let mut constraints: Vec<(usize, usize, usize)> = Vec::new();
    for (h_pos, h_sub) in sys.overlap_support.iter().enumerate() {
        if h_pos == id_pos {
            continue;
        }
        let h_amb = emb.embed(h_sub)?;
        let h_inv = group.inv(&h_amb)?;
        for (pos_t, t) in sys.t_set.iter().enumerate() {
            let u = group.mul(&h_inv, t)?;
            if let Some(&pos_u) = t_pos.get(&u) {
                constraints.push((h_pos, pos_t, pos_u));
            }
        }
    }
    let blocks = sys.block_alphabet.len();
    let cells = sys.overlap_support.len();
    let count = (blocks as f64).powi(cells as i32);
    if count > limits.pattern_cap as f64 {
        return Err(Error::CapExceeded(format!(
            "{blocks}^{cells} overlap assignments exceed the cap"
        )));
    }
    let block_vecs: Vec<Vec<LetterId>> =
        (0..blocks).map(|b| sys.block_letters(b as LetterId)).collect();
    let mut p_patterns = Vec::new();
    let mut assignment = vec![0 as LetterId; cells];
    loop {
        let violated = constraints.iter().any(|&(h_pos, pos_t, pos_u)| {
            block_vecs[assignment[id_pos] as usize][pos_t]
                != block_vecs[assignment[h_pos] as usize][pos_u]
        });
        if violated {
            p_patterns.push(Pattern::new(
                emb.sub(),
                sys.overlap_support.clone(),
                assignment.clone(),
            )?);
        }
        let mut k = cells;
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            assignment[k] += 1;
            if (assignment[k] as usize) < blocks {
                break false;
            }
            assignment[k] = 0;
        };
        if done {
            break;
        }
    }
    let overlap_sft = SftDescription::new(
        Arc::clone(emb.sub()),
        sys.block_alphabet.clone(),
        p_patterns.clone(),
    )?;

    // Single-block constraints: a block letter is forbidden when some
    // forbidden pattern of the source is visible inside it at offset t'.
    let mut j_patterns = Vec::new();
    if let Some(normalized) = &normalized {
        let omega = &sys.omega;
        // Positions of t Omega inside T, for every t whose block covers a
        // whole translate of Omega. This includes all of T'.
        let mut t_prime: Vec<Vec<usize>> = Vec::new();
        'cand: for t in &sys.t_set {
            let mut cells = Vec::with_capacity(omega.len());
            for w in omega {
                let tw = group.mul(t, w)?;
                match t_pos.get(&tw) {
                    Some(&p) => cells.push(p),
                    None => continue 'cand,
                }
            }
            t_prime.push(cells);
        }
        for b in 0..blocks {
            let letters = &block_vecs[b];
            let bad = t_prime.iter().any(|cells| {
                normalized.forbidden().iter().any(|p| {
                    cells.iter().zip(p.letters()).all(|(&pos, &l)| letters[pos] == l)
                })
            });
            if bad {
                j_patterns.push(Pattern::new(
                    emb.sub(),
                    vec![emb.sub().identity()],
                    vec![b as LetterId],
                )?);
            }
        }
    }
    let mut forbidden = p_patterns;
    forbidden.extend(j_patterns);
    let result = SftDescription::new(Arc::clone(emb.sub()), sys.block_alphabet.clone(), forbidden)?;

    Ok(HigherBlockSystem { overlap_sft, result, ..sys })
}

/// Reads the block configuration of x: the block at a subgroup cell h is
/// t -> x(h t).
pub fn hb_encode(sys: &HigherBlockSystem, x: &PeriodicConfiguration) -> Result<PeriodicConfiguration> {
    if !member(x, sys.source())? {
        return Err(Error::NotInShift("hb_encode needs a member of the source SFT".into()));
    }
    let emb = sys.embedding();
    let q = x.quotient();
    let q_target = q.target();
    let mut images = Vec::new();
    for img in emb.gen_images() {
        images.push(q.apply(img)?);
    }
    let sub_q = SubgroupEmbedding::finite_subgroup(q_target, &images)?;
    let mut sub_images = Vec::new();
    for img in &images {
        sub_images.push(sub_q.restrict(img)?);
    }
    let hom = Homomorphism::new(
        Arc::clone(emb.sub()),
        Arc::clone(sub_q.sub()),
        sub_images,
        None,
    )?;
    let order = sub_q.sub().order().expect("finite quotient");
    let mut labeling = Vec::with_capacity(order);
    for s in 0..order {
        let c = sub_q.embed(&GroupElement::Index(s))?;
        let mut letters = Vec::with_capacity(sys.t_set().len());
        for t in sys.t_set() {
            let cell = q_target.mul(&c, &q.apply(t)?)?;
            let idx = match cell {
                GroupElement::Index(i) => i,
                _ => unreachable!("finite quotient"),
            };
            letters.push(x.labeling()[idx]);
        }
        labeling.push(sys.block_id(&letters));
    }
    PeriodicConfiguration::new(hom, labeling, sys.block_alphabet().clone())
}

/// Rebuilds the G-configuration from a block configuration in the overlap
/// shift I. Supported for free abelian and finite ambient groups.
pub fn hb_decode(sys: &HigherBlockSystem, z: &PeriodicConfiguration) -> Result<PeriodicConfiguration> {
    if *z.alphabet() != *sys.block_alphabet() {
        return Err(Error::AlphabetMismatch("decode needs the block alphabet".into()));
    }
    if !z.group().same_group(sys.embedding().sub()) {
        return Err(Error::GroupMismatch("decode needs a configuration over the subgroup".into()));
    }
    if !member(z, sys.overlap_sft())? {
        return Err(Error::NotInShift(
            "configuration is not in the overlap shift".into(),
        ));
    }
    let emb = sys.embedding();
    let group = sys.source().group();
    let table = emb.table();
    let value_at = |g: &GroupElement| -> Result<LetterId> {
        let c = table.coset_of(g)? as usize;
        let pos = sys.t_for_coset[c];
        let t = &sys.t_set()[pos];
        let h_amb = group.mul(g, &group.inv(t)?)?;
        let h_sub = emb.restrict(&h_amb)?;
        let block = sys.block_letters(z.at(&h_sub)?);
        Ok(block[pos])
    };
    match group.backend() {
        Backend::FreeAbelian { rank } => {
            let k_sub = z.quotient().kernel_lattice()?;
            let mut rows = Vec::new();
            for row in &k_sub {
                match emb.embed(&GroupElement::Vector(row.clone()))? {
                    GroupElement::Vector(v) => rows.push(v),
                    _ => unreachable!("free abelian ambient"),
                }
            }
            let k = lattice::hnf(&rows, *rank)?;
            let k_table = CosetTable::sublattice(group, &k)?;
            let hom = k_table.quotient_hom()?;
            let mut labeling = Vec::with_capacity(k_table.index());
            for r in k_table.transversal() {
                labeling.push(value_at(r)?);
            }
            PeriodicConfiguration::new(hom, labeling, sys.source().alphabet().clone())
        }
        Backend::Finite(fin) => {
            let hom = Homomorphism::identity(group)?;
            let mut labeling = Vec::with_capacity(fin.order());
            for i in 0..fin.order() {
                labeling.push(value_at(&GroupElement::Index(i))?);
            }
            PeriodicConfiguration::new(hom, labeling, sys.source().alphabet().clone())
        }
        _ => Err(Error::Unsupported(format!(
            "decoding is not available over {}",
            group.name()
        ))),
    }
}

/// The product of two SFTs over the same group, over the pair alphabet.
/// Forbidden patterns are P x B^Omega together with A^Omega x Q on the joint
/// support Omega.
pub struct ProductSystem {
    pub sft: SftDescription,
    pub left: Alphabet,
    pub right: Alphabet,
}

impl ProductSystem {
    pub fn pair_id(&self, l: LetterId, r: LetterId) -> LetterId {
        l * self.right.len() as LetterId + r
    }

    pub fn components(&self, id: LetterId) -> (LetterId, LetterId) {
        (id / self.right.len() as LetterId, id % self.right.len() as LetterId)
    }

    /// Component projection of a configuration over the product alphabet.
    pub fn project(&self, y: &PeriodicConfiguration, right: bool) -> Result<PeriodicConfiguration> {
        let labeling = y
            .labeling()
            .iter()
            .map(|&id| {
                let (l, r) = self.components(id);
                if right {
                    r
                } else {
                    l
                }
            })
            .collect();
        let alphabet = if right { self.right.clone() } else { self.left.clone() };
        PeriodicConfiguration::new(y.quotient().clone(), labeling, alphabet)
    }

    /// Pairs two configurations over the same quotient.
    pub fn pair(
        &self,
        x: &PeriodicConfiguration,
        y: &PeriodicConfiguration,
    ) -> Result<PeriodicConfiguration> {
        if x.labeling().len() != y.labeling().len() {
            return Err(Error::GroupMismatch("pairing needs one quotient".into()));
        }
        let labeling = x
            .labeling()
            .iter()
            .zip(y.labeling())
            .map(|(&l, &r)| self.pair_id(l, r))
            .collect();
        PeriodicConfiguration::new(x.quotient().clone(), labeling, self.sft.alphabet().clone())
    }
}

pub fn product_sft(s1: &SftDescription, s2: &SftDescription, limits: &Limits) -> Result<ProductSystem> {
    if !s1.group().same_group(s2.group()) {
        return Err(Error::GroupMismatch("products need one group".into()));
    }
    let group = s1.group();
    let mut omega = s1.joint_support();
    omega.extend_from_slice(&s2.joint_support());
    group.sort_unique(&mut omega);
    let n1 = s1.normalize_support(&omega, limits)?;
    let n2 = s2.normalize_support(&omega, limits)?;
    let alphabet = s1.alphabet().product(s2.alphabet())?;
    let a1 = s1.alphabet().len();
    let a2 = s2.alphabet().len();
    let cost = (n1.forbidden().len() as f64) * (a2 as f64).powi(omega.len() as i32)
        + (n2.forbidden().len() as f64) * (a1 as f64).powi(omega.len() as i32);
    if cost > limits.pattern_cap as f64 {
        return Err(Error::CapExceeded("product pattern list exceeds the cap".into()));
    }
    let sys = ProductSystem {
        sft: SftDescription::full_shift(Arc::clone(group), alphabet.clone())?,
        left: s1.alphabet().clone(),
        right: s2.alphabet().clone(),
    };
    let mut forbidden = Vec::new();
    for p in n1.forbidden() {
        let mut fill = vec![0 as LetterId; omega.len()];
        loop {
            let letters: Vec<LetterId> = p
                .letters()
                .iter()
                .zip(&fill)
                .map(|(&l, &r)| sys.pair_id(l, r))
                .collect();
            forbidden.push(Pattern::new(group, omega.clone(), letters)?);
            if !bump(&mut fill, a2) {
                break;
            }
        }
    }
    for q in n2.forbidden() {
        let mut fill = vec![0 as LetterId; omega.len()];
        loop {
            let letters: Vec<LetterId> = fill
                .iter()
                .zip(q.letters())
                .map(|(&l, &r)| sys.pair_id(l, r))
                .collect();
            forbidden.push(Pattern::new(group, omega.clone(), letters)?);
            if !bump(&mut fill, a1) {
                break;
            }
        }
    }
    let sft = SftDescription::new(Arc::clone(group), alphabet, forbidden)?;
    Ok(ProductSystem { sft, ..sys })
}

fn bump(fill: &mut [LetterId], base: usize) -> bool {
    let mut k = fill.len();
    loop {
        if k == 0 {
            return false;
        }
        k -= 1;
        fill[k] += 1;
        if (fill[k] as usize) < base {
            return true;
        }
        fill[k] = 0;
    }
}

/// The SFT of configurations fixed by every generator of a subgroup N:
/// forbidden patterns say x(1) != x(n). When N is normal this is Fix(N),
/// the configurations invariant under translation by N; normality is the
/// caller's responsibility.
pub fn fix_sft(
    group: &Arc<GroupContext>,
    alphabet: &Alphabet,
    generators: &[GroupElement],
    limits: &Limits,
) -> Result<SftDescription> {
    let mut gens = Vec::new();
    for g in generators {
        group.validate_elem(g)?;
        if group.is_identity(g) {
            log::warn!("dropping identity generator in fix_sft");
            continue;
        }
        gens.push(g.clone());
        gens.push(group.inv(g)?);
    }
    group.sort_unique(&mut gens);
    if gens.is_empty() {
        log::warn!("fix_sft of the trivial subgroup is the full shift");
        return SftDescription::full_shift(Arc::clone(group), alphabet.clone());
    }
    let a = alphabet.len();
    if gens.len() * a * a > limits.pattern_cap {
        return Err(Error::CapExceeded("fix pattern list exceeds the cap".into()));
    }
    let mut forbidden = Vec::new();
    for n in &gens {
        for l1 in 0..a as LetterId {
            for l2 in 0..a as LetterId {
                if l1 != l2 {
                    forbidden.push(Pattern::new(
                        group,
                        vec![group.identity(), n.clone()],
                        vec![l1, l2],
                    )?);
                }
            }
        }
    }
    SftDescription::new(Arc::clone(group), alphabet.clone(), forbidden)
}

/// The locked shift of a normal finite-index subgroup N: points are exactly
/// the translates of the canonical coset coloring, and the stabilizer of
/// every point is N itself. The alphabet is the transversal rendering.
pub fn locked_sft(table: &CosetTable) -> Result<SftDescription> {
    if !table.is_normal()? {
        return Err(Error::NotNormal("locked shifts need a normal subgroup".into()));
    }
    let group = table.group();
    let letters: Vec<String> =
        table.transversal().iter().map(|t| group.render(t)).collect();
    let alphabet = Alphabet::new(letters)?;
    let limits = Limits::default();
    let fix = fix_sft(group, &alphabet, &table.schreier_generators()?, &limits)?;
    let mut forbidden = fix.forbidden().to_vec();
    for t in table.transversal().iter().skip(1) {
        for l in 0..alphabet.len() as LetterId {
            forbidden.push(Pattern::new(
                group,
                vec![group.identity(), t.clone()],
                vec![l, l],
            )?);
        }
    }
    SftDescription::new(Arc::clone(group), alphabet, forbidden)
}

/// The canonical point of the locked shift: cell g is labeled by its coset.
pub fn locked_witness(table: &CosetTable) -> Result<PeriodicConfiguration> {
    let hom = table.quotient_hom()?;
    let group = table.group();
    let letters: Vec<String> =
        table.transversal().iter().map(|t| group.render(t)).collect();
    let alphabet = Alphabet::new(letters)?;
    let labeling = (0..table.index() as LetterId).collect();
    PeriodicConfiguration::new(hom, labeling, alphabet)
}

/// Reads an SFT over the abstract subgroup as an SFT over the ambient group
/// by embedding every forbidden support.
pub fn induce_sft(s_sub: &SftDescription, emb: &SubgroupEmbedding) -> Result<SftDescription> {
    if !s_sub.group().same_group(emb.sub()) {
        return Err(Error::GroupMismatch(
            "induced shifts need the SFT over the abstract subgroup".into(),
        ));
    }
    let mut forbidden = Vec::new();
    for p in s_sub.forbidden() {
        let support: Vec<GroupElement> =
            p.support().iter().map(|h| emb.embed(h)).collect::<Result<_>>()?;
        forbidden.push(Pattern::new(emb.ambient(), support, p.letters().to_vec())?);
    }
    SftDescription::new(
        Arc::clone(emb.ambient()),
        s_sub.alphabet().clone(),
        forbidden,
    )
}

/// Extends a configuration over the subgroup to the ambient group by
/// x'(h t) = x(h) for the designated transversal factorization. Supported
/// for free abelian and finite ambient groups.
pub fn induce_config(
    x: &PeriodicConfiguration,
    emb: &SubgroupEmbedding,
) -> Result<PeriodicConfiguration> {
    if !x.group().same_group(emb.sub()) {
        return Err(Error::GroupMismatch(
            "inducing needs a configuration over the abstract subgroup".into(),
        ));
    }
    let group = emb.ambient();
    let table = emb.table();
    let value_at = |g: &GroupElement| -> Result<LetterId> {
        let c = table.coset_of(g)? as usize;
        let t = &table.transversal()[c];
        let h = group.mul(g, &group.inv(t)?)?;
        x.at(&emb.restrict(&h)?)
    };
    match group.backend() {
        Backend::FreeAbelian { rank } => {
            let k_sub = x.quotient().kernel_lattice()?;
            let mut rows = Vec::new();
            for row in &k_sub {
                match emb.embed(&GroupElement::Vector(row.clone()))? {
                    GroupElement::Vector(v) => rows.push(v),
                    _ => unreachable!("free abelian ambient"),
                }
            }
            let k = lattice::hnf(&rows, *rank)?;
            let k_table = CosetTable::sublattice(group, &k)?;
            let hom = k_table.quotient_hom()?;
            let mut labeling = Vec::with_capacity(k_table.index());
            for r in k_table.transversal() {
                labeling.push(value_at(r)?);
            }
            PeriodicConfiguration::new(hom, labeling, x.alphabet().clone())
        }
        Backend::Finite(fin) => {
            let hom = Homomorphism::identity(group)?;
            let mut labeling = Vec::with_capacity(fin.order());
            for i in 0..fin.order() {
                labeling.push(value_at(&GroupElement::Index(i))?);
            }
            PeriodicConfiguration::new(hom, labeling, x.alphabet().clone())
        }
        _ => Err(Error::Unsupported(format!(
            "inducing configurations is not available over {}",
            group.name()
        ))),
    }
}

/// A pullback of an SFT along a surjection f: G -> Q with finitely generated
/// kernel N: the forbidden patterns of the quotient SFT transported through
/// a section of f, together with the fix patterns of N. The pullback SFT
/// consists exactly of the compositions (x o f) for x in the quotient SFT.
pub struct PullbackSystem {
    pub sft: SftDescription,
    /// Pairs (cell of the quotient support, chosen preimage in G).
    pub section: Vec<(GroupElement, GroupElement)>,
}

pub fn pullback_sft(
    sbar: &SftDescription,
    f: &Homomorphism,
    limits: &Limits,
) -> Result<PullbackSystem> {
    if !sbar.group().same_group(f.target()) {
        return Err(Error::GroupMismatch("pullbacks need the SFT over the map's target".into()));
    }
    let kernel = f.kernel_generators().ok_or_else(|| {
        Error::InvalidHomomorphism("pullbacks need kernel generators on the map".into())
    })?;
    let group = f.source();
    let target = f.target();
    let omega_bar = sbar.joint_support();
    let normalized = sbar.normalize_support(&omega_bar, limits)?;
    const SECTION_RADIUS_CAP: usize = 24;
    let mut section: Vec<Option<GroupElement>> = vec![None; omega_bar.len()];
    'radius: for r in 0..=SECTION_RADIUS_CAP {
        let ball = group.ball(r)?;
        for g in &ball {
            let img = f.apply(g)?;
            for (w, slot) in omega_bar.iter().zip(section.iter_mut()) {
                if slot.is_none() && img == *w {
                    *slot = Some(g.clone());
                }
            }
        }
        if section.iter().all(|s| s.is_some()) {
            break 'radius;
        }
    }
    let section: Vec<(GroupElement, GroupElement)> = omega_bar
        .iter()
        .zip(section)
        .map(|(w, s)| {
            s.map(|g| (w.clone(), g)).ok_or_else(|| {
                Error::CapExceeded(format!(
                    "no preimage of {} found within radius {SECTION_RADIUS_CAP}",
                    target.render(w)
                ))
            })
        })
        .collect::<Result<_>>()?;
    let support: Vec<GroupElement> = section.iter().map(|(_, g)| g.clone()).collect();
    let mut forbidden = Vec::new();
    for p in normalized.forbidden() {
        forbidden.push(Pattern::new(group, support.clone(), p.letters().to_vec())?);
    }
    let fix = fix_sft(group, sbar.alphabet(), kernel, limits)?;
    forbidden.extend_from_slice(fix.forbidden());
    let sft = SftDescription::new(Arc::clone(group), sbar.alphabet().clone(), forbidden)?;
    Ok(PullbackSystem { sft, section })
}

/// The pullback of a configuration: (x o f), i.e. the same labeling read
/// through the composed quotient.
pub fn pullback_config(
    xbar: &PeriodicConfiguration,
    f: &Homomorphism,
) -> Result<PeriodicConfiguration> {
    let composed = f.then(xbar.quotient())?;
    PeriodicConfiguration::new(composed, xbar.labeling().to_vec(), xbar.alphabet().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::CosetTable;
    use crate::shift::{legal_partial, PartialConfiguration};

    fn z() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z", 1).unwrap())
    }

    fn z2() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z2", 2).unwrap())
    }

    fn binary() -> Alphabet {
        Alphabet::new(vec!["0".into(), "1".into()]).unwrap()
    }

    fn golden_mean(group: &Arc<GroupContext>) -> SftDescription {
        let p = Pattern::new(
            group,
            vec![GroupElement::Vector(vec![0]), GroupElement::Vector(vec![1])],
            vec![1, 1],
        )
        .unwrap();
        SftDescription::new(Arc::clone(group), binary(), vec![p]).unwrap()
    }

    fn config_over_zmod(
        group: &Arc<GroupContext>,
        n: i64,
        labeling: Vec<LetterId>,
        alphabet: Alphabet,
    ) -> PeriodicConfiguration {
        let table = CosetTable::sublattice(group, &[vec![n]]).unwrap();
        let hom = table.quotient_hom().unwrap();
        PeriodicConfiguration::new(hom, labeling, alphabet).unwrap()
    }

    #[test]
    fn higher_block_golden_mean_over_three_z() {
        let g = z();
        let sft = golden_mean(&g);
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![3]]).unwrap();
        let sys = higher_block_sft(&sft, &emb, BlockMode::Blocked { t_prime: None }, &Limits::default())
            .unwrap();
        // T' = {0,1,2}, Omega = {0,1}, so T = {0,1,2,3} and blocks have 4 cells.
        assert_eq!(sys.t_set().len(), 4);
        assert_eq!(sys.block_alphabet().len(), 16);
        // E = {0, -3, 3} in ambient terms, i.e. {0,-1,1} in subgroup coordinates.
        assert_eq!(sys.overlap_support().len(), 3);
        // Every forbidden overlap pattern has full support E.
        for p in sys.overlap_sft().forbidden() {
            assert_eq!(p.support().len(), 3);
        }
        // J forbids exactly the blocks containing 11 at offsets 0,1,2.
        let j_count = sys
            .result()
            .forbidden()
            .iter()
            .filter(|p| p.support().len() == 1)
            .count();
        // Blocks of length 4 over {0,1} containing 11: 8 of 16.
        assert_eq!(j_count, 8);
    }

    #[test]
    fn higher_block_encode_decode_round_trip() {
        let g = z();
        let sft = golden_mean(&g);
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![3]]).unwrap();
        let sys = higher_block_sft(&sft, &emb, BlockMode::Blocked { t_prime: None }, &Limits::default())
            .unwrap();
        // Period-2 point 010101... of the golden mean shift.
        let x = config_over_zmod(&g, 2, vec![0, 1], binary());
        let zc = hb_encode(&sys, &x).unwrap();
        assert!(member(&zc, sys.result()).unwrap());
        assert!(member(&zc, sys.overlap_sft()).unwrap());
        let back = hb_decode(&sys, &zc).unwrap();
        assert!(back.same_configuration(&x).unwrap());
        let re = hb_encode(&sys, &back).unwrap();
        assert!(re.same_configuration(&zc).unwrap());
    }

    #[test]
    fn higher_block_rejects_non_members_of_i() {
        let g = z();
        let sft = golden_mean(&g);
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![3]]).unwrap();
        let sys = higher_block_sft(&sft, &emb, BlockMode::Blocked { t_prime: None }, &Limits::default())
            .unwrap();
        // A constant block letter violating overlap: (0,0,0,1) repeated does
        // not agree with its own shift by 3.
        let bad_letter = sys.block_id(&[0, 0, 0, 1]);
        let zc = config_over_zmod(emb.sub(), 1, vec![bad_letter], sys.block_alphabet().clone());
        assert!(!member(&zc, sys.overlap_sft()).unwrap());
        assert!(matches!(hb_decode(&sys, &zc), Err(Error::NotInShift(_))));
    }

    #[test]
    fn product_of_golden_means_dedups_patterns() {
        let g = z();
        let sft = golden_mean(&g);
        let sys = product_sft(&sft, &sft, &Limits::default()).unwrap();
        assert_eq!(sys.sft.alphabet().len(), 4);
        // 4 + 4 completions with one shared pattern (11,11).
        assert_eq!(sys.sft.forbidden().len(), 7);
        let x = config_over_zmod(&g, 2, vec![0, 1], binary());
        let y = config_over_zmod(&g, 2, vec![1, 0], binary());
        let paired = sys.pair(&x, &y).unwrap();
        assert!(member(&paired, &sys.sft).unwrap());
        let bad = sys.pair(&x, &config_over_zmod(&g, 2, vec![1, 1], binary())).unwrap();
        assert!(!member(&bad, &sys.sft).unwrap());
        assert!(sys.project(&paired, false).unwrap().same_configuration(&x).unwrap());
        assert!(sys.project(&paired, true).unwrap().same_configuration(&y).unwrap());
    }

    #[test]
    fn fix_sft_forces_periodicity() {
        let g = z();
        let sft = fix_sft(
            &g,
            &binary(),
            &[GroupElement::Vector(vec![2])],
            &Limits::default(),
        )
        .unwrap();
        let alternating = config_over_zmod(&g, 2, vec![0, 1], binary());
        assert!(member(&alternating, &sft).unwrap());
        let period3 = config_over_zmod(&g, 3, vec![0, 0, 1], binary());
        assert!(!member(&period3, &sft).unwrap());
    }

    #[test]
    fn fix_sft_of_trivial_subgroup_is_full_shift() {
        let g = z();
        let sft = fix_sft(
            &g,
            &binary(),
            &[GroupElement::Vector(vec![0])],
            &Limits::default(),
        )
        .unwrap();
        assert!(sft.forbidden().is_empty());
    }

    #[test]
    fn locked_shift_points_are_coset_colorings() {
        let g = z2();
        let table = CosetTable::sublattice(&g, &[vec![2, 0], vec![0, 2]]).unwrap();
        let sft = locked_sft(&table).unwrap();
        assert_eq!(sft.alphabet().len(), 4);
        let w = locked_witness(&table).unwrap();
        assert!(member(&w, &sft).unwrap());
        let stab = w.stabilizer();
        assert_eq!(stab.index, 4);
        assert_eq!(
            w.stabilizer_lattice().unwrap(),
            vec![vec![2, 0], vec![0, 2]]
        );
        // A translate is still in the shift, a constant labeling is not.
        let translated = w.translate(1);
        assert!(member(&translated, &sft).unwrap());
        let table_q = CosetTable::sublattice(&g, &[vec![2, 0], vec![0, 2]]).unwrap();
        let constant = PeriodicConfiguration::new(
            table_q.quotient_hom().unwrap(),
            vec![0, 0, 0, 0],
            sft.alphabet().clone(),
        )
        .unwrap();
        assert!(!member(&constant, &sft).unwrap());
    }

    #[test]
    fn induced_shift_membership_matches_restriction() {
        let g = z();
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![2]]).unwrap();
        let s_sub = golden_mean(emb.sub());
        let induced = induce_sft(&s_sub, &emb).unwrap();
        // Induced forbidden support is {0,2} in ambient coordinates.
        assert_eq!(
            induced.forbidden()[0].support(),
            &[GroupElement::Vector(vec![0]), GroupElement::Vector(vec![2])]
        );
        let x_sub = config_over_zmod(emb.sub(), 2, vec![0, 1], binary());
        let x_amb = induce_config(&x_sub, &emb).unwrap();
        assert!(member(&x_amb, &induced).unwrap());
        assert_eq!(x_amb.at(&GroupElement::Vector(vec![0])).unwrap(), 0);
        assert_eq!(x_amb.at(&GroupElement::Vector(vec![1])).unwrap(), 0);
        assert_eq!(x_amb.at(&GroupElement::Vector(vec![2])).unwrap(), 1);
        let bad_sub = config_over_zmod(emb.sub(), 1, vec![1], binary());
        let bad_amb = induce_config(&bad_sub, &emb).unwrap();
        assert!(!member(&bad_amb, &induced).unwrap());
    }

    #[test]
    fn pullback_of_checkerboard_to_heisenberg() {
        let h = Arc::new(GroupContext::heisenberg("H"));
        let q = z2();
        let f = Homomorphism::new(
            Arc::clone(&h),
            Arc::clone(&q),
            vec![
                GroupElement::Vector(vec![1, 0]),
                GroupElement::Vector(vec![0, 1]),
                GroupElement::Vector(vec![0, 0]),
            ],
            Some(vec![GroupElement::Triple([0, 0, 1])]),
        )
        .unwrap();
        let mut forbidden = Vec::new();
        for (d, letters) in [(vec![1, 0], [0, 0]), (vec![1, 0], [1, 1]), (vec![0, 1], [0, 0]), (vec![0, 1], [1, 1])] {
            forbidden.push(
                Pattern::new(
                    &q,
                    vec![GroupElement::Vector(vec![0, 0]), GroupElement::Vector(d)],
                    letters.to_vec(),
                )
                .unwrap(),
            );
        }
        let sbar = SftDescription::new(Arc::clone(&q), binary(), forbidden).unwrap();
        let pull = pullback_sft(&sbar, &f, &Limits::default()).unwrap();
        // The joint support {(0,0),(0,1),(1,0)} lifts to Heisenberg elements.
        assert_eq!(pull.section.len(), 3);
        for (w, g) in &pull.section {
            assert_eq!(&f.apply(g).unwrap(), w);
        }
        // Pull back the checkerboard: quotient by the even lattice.
        let table = CosetTable::sublattice(&q, &[vec![2, 0], vec![0, 2]]).unwrap();
        let xbar = PeriodicConfiguration::new(
            table.quotient_hom().unwrap(),
            vec![0, 1, 1, 0],
            binary(),
        )
        .unwrap();
        assert!(member(&xbar, &sbar).unwrap());
        let x = pullback_config(&xbar, &f).unwrap();
        assert!(member(&x, &pull.sft).unwrap());
        // The z generator acts trivially on the pullback.
        assert_eq!(x.at(&GroupElement::Triple([0, 0, 1])).unwrap(), x.at(&GroupElement::Triple([0, 0, 0])).unwrap());
        assert_eq!(x.at(&GroupElement::Triple([1, 0, 0])).unwrap(), 1);
    }

    #[test]
    fn locked_shift_legal_partials_extend_coset_colorings() {
        let g = z();
        let table = CosetTable::sublattice(&g, &[vec![2]]).unwrap();
        let sft = locked_sft(&table).unwrap();
        let domain: Vec<GroupElement> = (0..4).map(|i| GroupElement::Vector(vec![i])).collect();
        let good = PartialConfiguration::new(&g, domain.clone(), vec![0, 1, 0, 1]).unwrap();
        assert!(legal_partial(&good, &sft).unwrap());
        let bad = PartialConfiguration::new(&g, domain, vec![0, 0, 1, 1]).unwrap();
        assert!(!legal_partial(&bad, &sft).unwrap());
    }
}
