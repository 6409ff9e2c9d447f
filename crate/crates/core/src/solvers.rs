//! Certified searches over SFT descriptions: legal balls, strongly periodic
//! points over explicit or streamed quotients, translation-invariant local
//! patterns, one-dimensional emptiness and minimal period, transfers across
//! commensurable groups and pushes along extensions.
//!
//! Every positive answer carries a certificate that `verify_certificate`
//! rechecks from the SFT description alone, without trusting search state.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use crate::constructions::{
    hb_decode, higher_block_sft, induce_sft, locked_sft, product_sft, pullback_sft, BlockMode,
};
use crate::coset::{CosetTable, SubgroupEmbedding};
use crate::error::{Error, Result};
use crate::group::{Backend, GroupContext, GroupElement};
use crate::hom::Homomorphism;
use crate::lattice;
use crate::shift::{
    legal_partial, member, LetterId, Limits, PartialConfiguration, PeriodicConfiguration,
    SftDescription,
};

/// Where a certificate came from: the pipeline name and its parameters.
/// Purely informational; verification never reads it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub pipeline: String,
    pub params: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(pipeline: &str) -> Provenance {
        Provenance { pipeline: pipeline.into(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Provenance {
        self.params.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Debug, Clone)]
pub enum CertificateBody {
    /// A strongly periodic configuration in the SFT, with the index of its
    /// full stabilizer.
    PeriodicPoint { config: PeriodicConfiguration, stabilizer_index: usize },
    /// No legal labeling of the ball of this radius exists, so the SFT is
    /// empty. The node count records the exhausted search tree.
    EmptyAtRadius { radius: usize, nodes_searched: u64 },
    /// A legal labeling of the ball of this radius.
    LegalBall { radius: usize, partial: PartialConfiguration },
    /// A legal labeling of the ball that agrees with its own translate by a
    /// nontrivial element wherever both cells are in the ball.
    GInvariantBall { radius: usize, invariant: GroupElement, partial: PartialConfiguration },
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub sft_digest: String,
    pub body: CertificateBody,
    pub provenance: Provenance,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match &self.body {
            CertificateBody::PeriodicPoint { .. } => "periodic-point",
            CertificateBody::EmptyAtRadius { .. } => "empty-at-radius",
            CertificateBody::LegalBall { .. } => "legal-ball",
            CertificateBody::GInvariantBall { .. } => "g-invariant-ball",
        }
    }
}

/// One forbidden-pattern occurrence, compiled to problem cells. The pair
/// with the largest cell index is held implicitly by the bucket the instance
/// lives in; `cells`/`letters` list the remaining pairs. The instance fires
/// when every listed cell holds the listed letter.
struct Instance {
    cells: Vec<usize>,
    letters: Vec<LetterId>,
}

/// A finite constraint satisfaction problem: label cells so that no instance
/// fires. Cells are assigned in index order with letters tried in ascending
/// order, so the first solution is lexicographically least. Instances are
/// bucketed by their last cell and the letter wanted there, so a node only
/// scans the instances completed by the letter it just placed.
struct SearchProblem {
    num_cells: usize,
    num_letters: usize,
    by_trigger: Vec<Vec<Vec<Instance>>>,
    forced: Vec<Option<usize>>,
    seen: HashSet<(Vec<usize>, Vec<LetterId>)>,
}

impl SearchProblem {
    fn new(num_cells: usize, num_letters: usize) -> SearchProblem {
        SearchProblem {
            num_cells,
            num_letters,
            by_trigger: (0..num_cells)
                .map(|_| (0..num_letters).map(|_| Vec::new()).collect())
                .collect(),
            forced: vec![None; num_cells],
            seen: HashSet::new(),
        }
    }

    /// Registers a forbidden occurrence. Conflicting duplicate cells make the
    /// instance unsatisfiable, so it is dropped.
    fn add_instance(&mut self, pairs: &[(usize, LetterId)]) {
        let mut sorted: Vec<(usize, LetterId)> = pairs.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return;
            }
        }
        let cells: Vec<usize> = sorted.iter().map(|&(c, _)| c).collect();
        let letters: Vec<LetterId> = sorted.iter().map(|&(_, l)| l).collect();
        if !self.seen.insert((cells, letters)) {
            return;
        }
        let (trigger, tl) = sorted.pop().expect("instances are nonempty");
        let cells: Vec<usize> = sorted.iter().map(|&(c, _)| c).collect();
        let letters: Vec<LetterId> = sorted.iter().map(|&(_, l)| l).collect();
        self.by_trigger[trigger][tl as usize].push(Instance { cells, letters });
    }

    /// Forces a cell to copy the letter of an earlier cell.
    fn force(&mut self, cell: usize, from: usize) {
        debug_assert!(from < cell);
        self.forced[cell] = Some(from);
    }

    /// Depth-first search; calls `on_solution` for each solution in
    /// lexicographic order until it returns true. Returns nodes visited.
    fn search(
        &self,
        budget: u64,
        on_solution: &mut dyn FnMut(&[LetterId]) -> bool,
    ) -> Result<u64> {
        let mut assignment: Vec<LetterId> = Vec::with_capacity(self.num_cells);
        let mut nodes = 0u64;
        let mut stop = false;
        self.go(&mut assignment, &mut nodes, budget, &mut stop, on_solution)?;
        Ok(nodes)
    }

    fn go(
        &self,
        assignment: &mut Vec<LetterId>,
        nodes: &mut u64,
        budget: u64,
        stop: &mut bool,
        on_solution: &mut dyn FnMut(&[LetterId]) -> bool,
    ) -> Result<()> {
        let cell = assignment.len();
        if cell == self.num_cells {
            if on_solution(assignment) {
                *stop = true;
            }
            return Ok(());
        }
        let choices: Vec<LetterId> = match self.forced[cell] {
            Some(src) => vec![assignment[src]],
            None => (0..self.num_letters as LetterId).collect(),
        };
        for l in choices {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExhausted { nodes: *nodes });
            }
            assignment.push(l);
            let fired = self.by_trigger[cell][l as usize].iter().any(|inst| {
                inst.cells
                    .iter()
                    .zip(&inst.letters)
                    .all(|(&c, &want)| assignment[c] == want)
            });
            if !fired {
                self.go(assignment, nodes, budget, stop, on_solution)?;
            }
            assignment.pop();
            if *stop {
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Compiles all fully-contained translates of the forbidden patterns into
/// instances over an explicit cell list.
fn add_translate_instances(
    problem: &mut SearchProblem,
    sft: &SftDescription,
    cells: &[GroupElement],
    index: &HashMap<GroupElement, usize>,
) -> Result<()> {
    let group = sft.group();
    for p in sft.forbidden() {
        let anchor_inv = group.inv(&p.support()[0])?;
        for d in cells {
            let g = group.mul(d, &anchor_inv)?;
            let mut pairs = Vec::with_capacity(p.len());
            let mut inside = true;
            for (w, &l) in p.support().iter().zip(p.letters()) {
                let cell = group.mul(&g, w)?;
                match index.get(&cell) {
                    Some(&i) => pairs.push((i, l)),
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if inside {
                problem.add_instance(&pairs);
            }
        }
    }
    Ok(())
}

/// Searches the ball of the given radius for a legal labeling. A hit yields
/// a legal-ball certificate; exhaustion proves the SFT empty and yields an
/// empty-at-radius certificate.
pub fn ball_search(sft: &SftDescription, radius: usize, limits: &Limits) -> Result<Certificate> {
    let group = sft.group();
    let cells = group.ball(radius)?;
    let index: HashMap<GroupElement, usize> =
        cells.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let mut problem = SearchProblem::new(cells.len(), sft.alphabet().len());
    add_translate_instances(&mut problem, sft, &cells, &index)?;
    let mut found: Option<Vec<LetterId>> = None;
    let nodes = problem.search(limits.node_budget, &mut |sol| {
        found = Some(sol.to_vec());
        true
    })?;
    let provenance = Provenance::new("ball-search")
        .with("radius", radius)
        .with("cells", cells.len())
        .with("nodes", nodes);
    match found {
        Some(letters) => {
            let partial = PartialConfiguration::new(group, cells, letters)?;
            if !legal_partial(&partial, sft)? {
                return Err(Error::CertificateRejected(
                    "internal: search produced an illegal ball".into(),
                ));
            }
            Ok(Certificate {
                sft_digest: sft.digest(),
                body: CertificateBody::LegalBall { radius, partial },
                provenance,
            })
        }
        None => Ok(Certificate {
            sft_digest: sft.digest(),
            body: CertificateBody::EmptyAtRadius { radius, nodes_searched: nodes },
            provenance,
        }),
    }
}

/// Compiles the SFT constraints over the cells of a finite quotient.
fn quotient_problem(sft: &SftDescription, quotient: &Homomorphism) -> Result<SearchProblem> {
    if !quotient.source().same_group(sft.group()) {
        return Err(Error::GroupMismatch(
            "the quotient must be defined on the SFT's group".into(),
        ));
    }
    let fin = quotient
        .target()
        .finite_group()
        .ok_or_else(|| Error::Unsupported("periodic search needs a finite quotient".into()))?;
    let order = fin.order();
    let mut problem = SearchProblem::new(order, sft.alphabet().len());
    for p in sft.forbidden() {
        let cells: Vec<usize> = p
            .support()
            .iter()
            .map(|w| quotient.apply_idx(w))
            .collect::<Result<_>>()?;
        for c in 0..order {
            let ci = fin.inv_idx(c);
            let pairs: Vec<(usize, LetterId)> = cells
                .iter()
                .zip(p.letters())
                .map(|(&cell, &l)| (fin.mul_idx(ci, cell), l))
                .collect();
            problem.add_instance(&pairs);
        }
    }
    Ok(problem)
}

fn search_quotient_counting(
    sft: &SftDescription,
    quotient: &Homomorphism,
    budget: u64,
) -> Result<(Option<PeriodicConfiguration>, u64)> {
    let problem = quotient_problem(sft, quotient)?;
    let mut found: Option<Vec<LetterId>> = None;
    let nodes = problem.search(budget, &mut |sol| {
        found = Some(sol.to_vec());
        true
    })?;
    match found {
        Some(labeling) => {
            let config =
                PeriodicConfiguration::new(quotient.clone(), labeling, sft.alphabet().clone())?;
            if !member(&config, sft)? {
                return Err(Error::CertificateRejected(
                    "internal: search produced a non-member".into(),
                ));
            }
            Ok((Some(config), nodes))
        }
        None => Ok((None, nodes)),
    }
}

/// The lexicographically least legal labeling over one finite quotient, if
/// any exists.
pub fn periodic_search_on_quotient(
    sft: &SftDescription,
    quotient: &Homomorphism,
    limits: &Limits,
) -> Result<Option<PeriodicConfiguration>> {
    Ok(search_quotient_counting(sft, quotient, limits.node_budget)?.0)
}

/// All legal labelings over one finite quotient, in lexicographic order.
pub fn periodic_solutions_on_quotient(
    sft: &SftDescription,
    quotient: &Homomorphism,
    limits: &Limits,
) -> Result<Vec<PeriodicConfiguration>> {
    let problem = quotient_problem(sft, quotient)?;
    let mut labelings: Vec<Vec<LetterId>> = Vec::new();
    problem.search(limits.node_budget, &mut |sol| {
        labelings.push(sol.to_vec());
        false
    })?;
    labelings
        .into_iter()
        .map(|l| PeriodicConfiguration::new(quotient.clone(), l, sft.alphabet().clone()))
        .collect()
}

/// Finite quotients to search, in a deterministic order: for Z^d all
/// sublattice quotients of index up to the bound, ascending by index and
/// then lexicographically by basis; for finite groups the identity map.
pub fn quotient_stream(group: &Arc<GroupContext>, max_index: usize) -> Result<Vec<Homomorphism>> {
    match group.backend() {
        Backend::FreeAbelian { rank } => {
            let mut out = Vec::new();
            for idx in 1..=max_index as u64 {
                for basis in lattice::sublattices_of_index(*rank, idx) {
                    let table = CosetTable::sublattice(group, &basis)?;
                    out.push(table.quotient_hom()?);
                }
            }
            Ok(out)
        }
        Backend::Finite(_) => Ok(vec![Homomorphism::identity(group)?]),
        _ => Err(Error::Unsupported(format!(
            "periodic search over {} needs explicit quotients",
            group.name()
        ))),
    }
}

fn describe_quotient(hom: &Homomorphism) -> String {
    match hom.source().backend() {
        Backend::FreeAbelian { .. } => match hom.kernel_lattice() {
            Ok(rows) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect();
                format!("[{}]", rows.join(","))
            }
            Err(_) => "unknown".into(),
        },
        Backend::Finite(_) => "identity".into(),
        _ => format!("onto order {}", hom.target().order().unwrap_or(0)),
    }
}

/// Canonicalizes where the backend supports it; otherwise returns the
/// configuration unchanged.
fn canonical_if_supported(x: PeriodicConfiguration) -> Result<PeriodicConfiguration> {
    match x.group().backend() {
        Backend::FreeAbelian { .. } | Backend::Finite(_) => x.canonical(),
        _ => Ok(x),
    }
}

fn periodic_point_certificate(
    sft: &SftDescription,
    x: PeriodicConfiguration,
    provenance: Provenance,
) -> Result<Certificate> {
    let x = canonical_if_supported(x)?;
    let stabilizer_index = x.stabilizer().index;
    Ok(Certificate {
        sft_digest: sft.digest(),
        body: CertificateBody::PeriodicPoint { config: x, stabilizer_index },
        provenance,
    })
}

/// Searches streamed quotients (or an explicit list) for a strongly periodic
/// point. The node budget is shared across the whole stream.
pub fn periodic_enumerate(
    sft: &SftDescription,
    max_index: usize,
    quotients: Option<&[Homomorphism]>,
    limits: &Limits,
) -> Result<Option<Certificate>> {
    let homs: Vec<Homomorphism> = match quotients {
        Some(list) => {
            let mut filtered: Vec<Homomorphism> = list
                .iter()
                .filter(|h| h.target().order().map_or(false, |o| o <= max_index))
                .cloned()
                .collect();
            filtered.sort_by_key(|h| h.target().order().unwrap_or(usize::MAX));
            filtered
        }
        None => quotient_stream(sft.group(), max_index)?,
    };
    let mut remaining = limits.node_budget;
    let mut total = 0u64;
    for hom in &homs {
        let (found, nodes) = match search_quotient_counting(sft, hom, remaining) {
            Ok(pair) => pair,
            Err(Error::BudgetExhausted { nodes }) => {
                return Err(Error::BudgetExhausted { nodes: total + nodes })
            }
            Err(e) => return Err(e),
        };
        total += nodes;
        remaining = remaining.saturating_sub(nodes);
        if let Some(x) = found {
            let provenance = Provenance::new("periodic-enumerate")
                .with("max_index", max_index)
                .with("found_at_index", x.labeling().len())
                .with("quotient", describe_quotient(hom))
                .with("nodes", total);
            return Ok(Some(periodic_point_certificate(sft, x, provenance)?));
        }
    }
    Ok(None)
}

/// Searches the ball for a legal labeling invariant under translation by a
/// nontrivial element. Cells linked by the translation are collapsed before
/// the search; cells whose partner lies outside the ball stay free, so the
/// certificate only asserts invariance inside the ball.
pub fn g_invariant_search(
    sft: &SftDescription,
    g: &GroupElement,
    radius: usize,
    limits: &Limits,
) -> Result<Option<Certificate>> {
    let group = sft.group();
    group.validate_elem(g)?;
    if group.is_identity(g) {
        return Err(Error::InvalidElement(
            "invariance needs a nontrivial element".into(),
        ));
    }
    let cells = group.ball(radius)?;
    let index: HashMap<GroupElement, usize> =
        cells.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    // Union-find over cells: h is linked with g^{-1} h.
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let g_inv = group.inv(g)?;
    let mut linked = 0usize;
    for (i, h) in cells.iter().enumerate() {
        let partner = group.mul(&g_inv, h)?;
        if let Some(&j) = index.get(&partner) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                parent[hi] = lo;
                linked += 1;
            }
        }
    }
    let mut problem = SearchProblem::new(cells.len(), sft.alphabet().len());
    let mut class_min: Vec<usize> = (0..cells.len()).collect();
    for i in 0..cells.len() {
        let r = find(&mut parent, i);
        if class_min[r] > i {
            class_min[r] = i;
        }
    }
    for i in 0..cells.len() {
        let r = find(&mut parent, i);
        if class_min[r] < i {
            problem.force(i, class_min[r]);
        }
    }
    add_translate_instances(&mut problem, sft, &cells, &index)?;
    let mut found: Option<Vec<LetterId>> = None;
    let nodes = problem.search(limits.node_budget, &mut |sol| {
        found = Some(sol.to_vec());
        true
    })?;
    match found {
        Some(letters) => {
            let partial = PartialConfiguration::new(group, cells.clone(), letters)?;
            if !legal_partial(&partial, sft)? {
                return Err(Error::CertificateRejected(
                    "internal: search produced an illegal ball".into(),
                ));
            }
            let provenance = Provenance::new("invariant-search")
                .with("radius", radius)
                .with("cells", cells.len())
                .with("linked_pairs", linked)
                .with("free_classes", cells.len() - linked)
                .with("nodes", nodes);
            Ok(Some(Certificate {
                sft_digest: sft.digest(),
                body: CertificateBody::GInvariantBall { radius, invariant: g.clone(), partial },
                provenance,
            }))
        }
        None => Ok(None),
    }
}

/// What a one-dimensional analysis found: emptiness is decided, and the
/// exact minimal period over all strongly periodic points is computed from
/// the trimmed word graph.
#[derive(Debug, Clone)]
pub struct ZAnalysis {
    pub window: usize,
    pub vertices_total: usize,
    pub vertices_live: usize,
    pub empty: bool,
    pub minimal_period: Option<usize>,
    pub point: Option<PeriodicConfiguration>,
}

/// Decides emptiness and computes the minimal period of an SFT over Z by
/// building the word graph of order m, trimming vertices without two-sided
/// extensions, and taking its girth.
pub fn z_analyze(sft: &SftDescription, limits: &Limits) -> Result<ZAnalysis> {
    let group = sft.group();
    match group.backend() {
        Backend::FreeAbelian { rank: 1 } => {}
        _ => {
            return Err(Error::Unsupported(
                "one-dimensional analysis needs the group Z".into(),
            ))
        }
    }
    let a = sft.alphabet().len();
    // Translate every forbidden pattern to start at 0 and normalize over the
    // common window {0,...,m}.
    let mut translated = Vec::new();
    let mut m = 0i64;
    for p in sft.forbidden() {
        let coords: Vec<i64> = p
            .support()
            .iter()
            .map(|g| match g {
                GroupElement::Vector(v) => v[0],
                _ => unreachable!("validated Z elements"),
            })
            .collect();
        let lo = *coords.iter().min().expect("patterns are nonempty");
        let support: Vec<GroupElement> =
            coords.iter().map(|&c| GroupElement::Vector(vec![c - lo])).collect();
        let hi = coords.iter().map(|&c| c - lo).max().unwrap();
        m = m.max(hi);
        translated.push(crate::shift::Pattern::new(group, support, p.letters().to_vec())?);
    }
    let m = m as usize;
    let window: Vec<GroupElement> =
        (0..=m as i64).map(|c| GroupElement::Vector(vec![c])).collect();
    let shifted = SftDescription::new(Arc::clone(group), sft.alphabet().clone(), translated)?;
    let words = shifted.normalize_support(&window, limits)?;
    let word_len = m + 1;
    let vcount = (a as f64).powi(m as i32);
    if vcount > limits.pattern_cap as f64 {
        return Err(Error::CapExceeded(format!("{a}^{m} word vertices exceed the cap")));
    }
    let vcount = a.pow(m as u32);
    let mut bad = vec![false; a.pow(word_len as u32)];
    for p in words.forbidden() {
        // Supports are the full window in ascending order, so letters spell
        // the word with position 0 most significant.
        let mut id = 0usize;
        for &l in p.letters() {
            id = id * a + l as usize;
        }
        bad[id] = true;
    }
    // Edges u -> v for allowed words u.c with v = suffix; vertex ids read
    // words with the leftmost letter most significant.
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); vcount];
    let mut in_deg = vec![0usize; vcount];
    let mut out_deg = vec![0usize; vcount];
    for u in 0..vcount {
        for c in 0..a {
            let word = u * a + c;
            if !bad[word] {
                let v = word % vcount;
                out_edges[u].push(v);
                out_deg[u] += 1;
                in_deg[v] += 1;
            }
        }
    }
    // Trim vertices that cannot be extended on both sides.
    let mut live = vec![true; vcount];
    let mut queue: Vec<usize> =
        (0..vcount).filter(|&v| in_deg[v] == 0 || out_deg[v] == 0).collect();
    let mut in_edges: Vec<Vec<usize>> = vec![Vec::new(); vcount];
    for u in 0..vcount {
        for &v in &out_edges[u] {
            in_edges[v].push(u);
        }
    }
    while let Some(v) = queue.pop() {
        if !live[v] {
            continue;
        }
        live[v] = false;
        for &w in &out_edges[v] {
            if live[w] {
                in_deg[w] -= 1;
                if in_deg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        for &u in &in_edges[v] {
            if live[u] {
                out_deg[u] -= 1;
                if out_deg[u] == 0 {
                    queue.push(u);
                }
            }
        }
    }
    let vertices_live = live.iter().filter(|&&l| l).count();
    let empty = vertices_live == 0;
    let mut result = ZAnalysis {
        window: word_len,
        vertices_total: vcount,
        vertices_live,
        empty,
        minimal_period: None,
        point: None,
    };
    if empty {
        return Ok(result);
    }
    // Girth of the live graph: every cycle of length p yields a p-periodic
    // point and conversely, so the girth is the least period.
    let mut girth = usize::MAX;
    let mut dist = vec![usize::MAX; vcount];
    for s in 0..vcount {
        if !live[s] {
            continue;
        }
        for d in dist.iter_mut() {
            *d = usize::MAX;
        }
        dist[s] = 0;
        let mut frontier = vec![s];
        let mut best = usize::MAX;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                if dist[u] + 1 >= best {
                    continue;
                }
                for &v in &out_edges[u] {
                    if !live[v] {
                        continue;
                    }
                    if v == s {
                        best = best.min(dist[u] + 1);
                    } else if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        girth = girth.min(best);
    }
    debug_assert_ne!(girth, usize::MAX, "live trimmed graphs contain cycles");
    result.minimal_period = Some(girth);
    let table = CosetTable::sublattice(group, &[vec![girth as i64]])?;
    let hom = table.quotient_hom()?;
    let point = periodic_search_on_quotient(sft, &hom, limits)?
        .expect("a cycle of girth length is a legal periodic point");
    result.point = Some(point);
    Ok(result)
}

/// Direction of a transfer between a group and a finite-index subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferDirection {
    /// The SFT lives over the ambient group; search through block codings
    /// over the subgroup.
    ToOvergroup,
    /// The SFT lives over the abstract subgroup; search over the ambient
    /// group through the induced shift crossed with the locked shift.
    ToSubgroup,
}

/// The outcome of a pipeline that may exhaust its search space or budget
/// without an answer either way.
#[derive(Debug, Clone)]
pub enum TransferOutcome {
    Found(Box<Certificate>),
    Inconclusive { reason: String },
}

fn budget_inconclusive(e: Error) -> Result<TransferOutcome> {
    match e {
        Error::BudgetExhausted { nodes } => Ok(TransferOutcome::Inconclusive {
            reason: format!("node budget exhausted after {nodes} nodes"),
        }),
        other => Err(other),
    }
}

/// Searches for a strongly periodic point of an SFT by moving the problem
/// across a finite-index subgroup embedding in the stated direction. A found
/// point is certified against the original SFT.
pub fn transfer_commensurable(
    sft: &SftDescription,
    emb: &SubgroupEmbedding,
    direction: TransferDirection,
    max_index: usize,
    limits: &Limits,
) -> Result<TransferOutcome> {
    match direction {
        TransferDirection::ToOvergroup => {
            let sys = higher_block_sft(sft, emb, BlockMode::Blocked { t_prime: None }, limits)?;
            let homs = quotient_stream(emb.sub(), max_index)?;
            let mut remaining = limits.node_budget;
            let mut total = 0u64;
            for hom in &homs {
                let (found, nodes) =
                    match search_quotient_counting(sys.result(), hom, remaining) {
                        Ok(pair) => pair,
                        Err(e) => return budget_inconclusive(e),
                    };
                total += nodes;
                remaining = remaining.saturating_sub(nodes);
                if let Some(z) = found {
                    let x = hb_decode(&sys, &z)?;
                    if !member(&x, sft)? {
                        return Err(Error::CertificateRejected(
                            "internal: decoded block point left the SFT".into(),
                        ));
                    }
                    let provenance = Provenance::new("transfer-to-overgroup")
                        .with("subgroup_index", emb.table().index())
                        .with("block_cells", sys.t_set().len())
                        .with("found_at_subgroup_index", z.labeling().len())
                        .with("quotient", describe_quotient(hom))
                        .with("nodes", total);
                    return Ok(TransferOutcome::Found(Box::new(periodic_point_certificate(
                        sft, x, provenance,
                    )?)));
                }
            }
            Ok(TransferOutcome::Inconclusive {
                reason: format!(
                    "no point found via subgroup quotients of index at most {max_index}"
                ),
            })
        }
        TransferDirection::ToSubgroup => {
            if !emb.table().is_normal()? {
                return Err(Error::NotNormal(
                    "transfer to a subgroup needs a normal subgroup; pass its normal core".into(),
                ));
            }
            let induced = induce_sft(sft, emb)?;
            let locked = locked_sft(emb.table())?;
            let product = product_sft(&induced, &locked, limits)?;
            let homs = quotient_stream(emb.ambient(), max_index)?;
            let mut remaining = limits.node_budget;
            let mut total = 0u64;
            for hom in &homs {
                let (found, nodes) =
                    match search_quotient_counting(&product.sft, hom, remaining) {
                        Ok(pair) => pair,
                        Err(e) => return budget_inconclusive(e),
                    };
                total += nodes;
                remaining = remaining.saturating_sub(nodes);
                if let Some(y) = found {
                    // The locked component pins the stabilizer inside the
                    // subgroup, so the first component restricts to a
                    // strongly periodic point over it.
                    let q = y.quotient();
                    let mut images = Vec::new();
                    for img in emb.gen_images() {
                        images.push(q.apply(img)?);
                    }
                    let image_sub = SubgroupEmbedding::finite_subgroup(q.target(), &images)?;
                    let mut sub_images = Vec::new();
                    for img in &images {
                        sub_images.push(image_sub.restrict(img)?);
                    }
                    let hom_sub = Homomorphism::new(
                        Arc::clone(emb.sub()),
                        Arc::clone(image_sub.sub()),
                        sub_images,
                        None,
                    )?;
                    let order = image_sub.sub().order().expect("finite image");
                    let mut labeling = Vec::with_capacity(order);
                    for s in 0..order {
                        let amb = image_sub.embed(&GroupElement::Index(s))?;
                        let idx = match amb {
                            GroupElement::Index(i) => i,
                            _ => unreachable!("finite quotient"),
                        };
                        labeling.push(product.components(y.labeling()[idx]).0);
                    }
                    let xs = PeriodicConfiguration::new(
                        hom_sub,
                        labeling,
                        product.left.clone(),
                    )?;
                    if !member(&xs, sft)? {
                        return Err(Error::CertificateRejected(
                            "internal: restricted point left the SFT".into(),
                        ));
                    }
                    let provenance = Provenance::new("transfer-to-subgroup")
                        .with("subgroup_index", emb.table().index())
                        .with("found_at_ambient_index", y.labeling().len())
                        .with("ambient_stabilizer_index", y.stabilizer().index)
                        .with("quotient", describe_quotient(hom))
                        .with("nodes", total);
                    return Ok(TransferOutcome::Found(Box::new(periodic_point_certificate(
                        sft, xs, provenance,
                    )?)));
                }
            }
            Ok(TransferOutcome::Inconclusive {
                reason: format!(
                    "no point found via ambient quotients of index at most {max_index}"
                ),
            })
        }
    }
}

/// Searches for a strongly periodic point of an SFT over the target of a
/// quotient map by pulling the SFT back to the source, searching over lifted
/// quotients, and pushing the found labeling down again.
pub fn extension_push(
    sbar: &SftDescription,
    f: &Homomorphism,
    max_index: usize,
    limits: &Limits,
) -> Result<TransferOutcome> {
    let pull = pullback_sft(sbar, f, limits)?;
    let homs = quotient_stream(f.target(), max_index)?;
    let mut remaining = limits.node_budget;
    let mut total = 0u64;
    for qbar in &homs {
        let lifted = f.then(qbar)?;
        let (found, nodes) = match search_quotient_counting(&pull.sft, &lifted, remaining) {
            Ok(pair) => pair,
            Err(e) => return budget_inconclusive(e),
        };
        total += nodes;
        remaining = remaining.saturating_sub(nodes);
        if let Some(w) = found {
            let xbar = PeriodicConfiguration::new(
                qbar.clone(),
                w.labeling().to_vec(),
                sbar.alphabet().clone(),
            )?;
            if !member(&xbar, sbar)? {
                return Err(Error::CertificateRejected(
                    "internal: pushed point left the SFT".into(),
                ));
            }
            let provenance = Provenance::new("extension-push")
                .with("source_group", f.source().name())
                .with("found_at_index", xbar.labeling().len())
                .with("quotient", describe_quotient(qbar))
                .with("nodes", total);
            return Ok(TransferOutcome::Found(Box::new(periodic_point_certificate(
                sbar, xbar, provenance,
            )?)));
        }
    }
    Ok(TransferOutcome::Inconclusive {
        reason: format!("no point found via quotients of index at most {max_index}"),
    })
}

/// The result of checking a certificate against an SFT description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub detail: String,
}

fn reject(detail: impl Into<String>) -> VerifyReport {
    VerifyReport { ok: false, detail: detail.into() }
}

/// Rechecks a certificate from the SFT description alone. Periodic points
/// are re-tested for membership and stabilizer index, ball certificates are
/// re-tested cell by cell, and emptiness certificates are re-searched.
pub fn verify_certificate(
    sft: &SftDescription,
    cert: &Certificate,
    limits: &Limits,
) -> Result<VerifyReport> {
    if cert.sft_digest != sft.digest() {
        return Ok(reject(format!(
            "certificate digest {} does not match the SFT digest {}",
            cert.sft_digest,
            sft.digest()
        )));
    }
    match &cert.body {
        CertificateBody::PeriodicPoint { config, stabilizer_index } => {
            if !config.group().same_group(sft.group()) {
                return Ok(reject("configuration group differs from the SFT group"));
            }
            if config.alphabet() != sft.alphabet() {
                return Ok(reject("configuration alphabet differs from the SFT alphabet"));
            }
            if !member(config, sft)? {
                return Ok(reject("a forbidden pattern appears in the configuration"));
            }
            let recomputed = config.stabilizer().index;
            if recomputed != *stabilizer_index {
                return Ok(reject(format!(
                    "stated stabilizer index {stabilizer_index} but recomputed {recomputed}"
                )));
            }
            Ok(VerifyReport {
                ok: true,
                detail: format!(
                    "strongly periodic point verified; stabilizer index {recomputed}"
                ),
            })
        }
        CertificateBody::EmptyAtRadius { radius, .. } => {
            let rerun = ball_search(sft, *radius, limits)?;
            match rerun.body {
                CertificateBody::EmptyAtRadius { nodes_searched, .. } => Ok(VerifyReport {
                    ok: true,
                    detail: format!(
                        "re-searched the radius-{radius} ball exhaustively ({nodes_searched} nodes); no legal labeling"
                    ),
                }),
                _ => Ok(reject(format!(
                    "the radius-{radius} ball admits a legal labeling after all"
                ))),
            }
        }
        CertificateBody::LegalBall { radius, partial } => {
            let ball = sft.group().ball(*radius)?;
            if partial.domain() != ball.as_slice() {
                return Ok(reject(format!("domain is not the full radius-{radius} ball")));
            }
            if !legal_partial(partial, sft)? {
                return Ok(reject("a forbidden pattern fits inside the labeled ball"));
            }
            Ok(VerifyReport {
                ok: true,
                detail: format!(
                    "legal labeling of the radius-{radius} ball verified over {} cells",
                    ball.len()
                ),
            })
        }
        CertificateBody::GInvariantBall { radius, invariant, partial } => {
            let group = sft.group();
            group.validate_elem(invariant)?;
            if group.is_identity(invariant) {
                return Ok(reject("the invariant element is the identity"));
            }
            let ball = group.ball(*radius)?;
            if partial.domain() != ball.as_slice() {
                return Ok(reject(format!("domain is not the full radius-{radius} ball")));
            }
            if !legal_partial(partial, sft)? {
                return Ok(reject("a forbidden pattern fits inside the labeled ball"));
            }
            let g_inv = group.inv(invariant)?;
            for h in partial.domain() {
                let partner = group.mul(&g_inv, h)?;
                if let Some(other) = partial.get(&partner) {
                    if partial.get(h) != Some(other) {
                        return Ok(reject(format!(
                            "labeling is not invariant at {}",
                            group.render(h)
                        )));
                    }
                }
            }
            Ok(VerifyReport {
                ok: true,
                detail: format!(
                    "legal radius-{radius} ball invariant under {} verified",
                    group.render(invariant)
                ),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{Alphabet, Pattern};

    fn z() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z", 1).unwrap())
    }

    fn z2() -> Arc<GroupContext> {
        Arc::new(GroupContext::free_abelian("Z2", 2).unwrap())
    }

    fn binary() -> Alphabet {
        Alphabet::new(vec!["0".into(), "1".into()]).unwrap()
    }

    fn word_sft(group: &Arc<GroupContext>, words: &[&[LetterId]]) -> SftDescription {
        let mut forbidden = Vec::new();
        for w in words {
            let support: Vec<GroupElement> =
                (0..w.len() as i64).map(|c| GroupElement::Vector(vec![c])).collect();
            forbidden.push(Pattern::new(group, support, w.to_vec()).unwrap());
        }
        SftDescription::new(Arc::clone(group), binary(), forbidden).unwrap()
    }

    fn golden(group: &Arc<GroupContext>) -> SftDescription {
        word_sft(group, &[&[1, 1]])
    }

    #[test]
    fn ball_search_finds_lexicographically_least_labeling() {
        let g = z();
        let sft = golden(&g);
        let cert = ball_search(&sft, 2, &Limits::default()).unwrap();
        match &cert.body {
            CertificateBody::LegalBall { partial, .. } => {
                assert_eq!(partial.letters(), &[0, 0, 0, 0, 0]);
            }
            other => panic!("expected a legal ball, got {other:?}"),
        }
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn ball_search_proves_emptiness() {
        let g = z();
        let sft = word_sft(&g, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let cert = ball_search(&sft, 1, &Limits::default()).unwrap();
        assert!(matches!(cert.body, CertificateBody::EmptyAtRadius { .. }));
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn emptiness_is_monotone_in_the_radius() {
        let g = z();
        let sft = word_sft(&g, &[&[0, 0], &[0, 1], &[1, 1]]);
        for radius in 1..=3 {
            let cert = ball_search(&sft, radius, &Limits::default()).unwrap();
            assert!(
                matches!(cert.body, CertificateBody::EmptyAtRadius { .. }),
                "radius {radius}"
            );
            let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
            assert!(report.ok, "radius {radius}: {}", report.detail);
        }
    }

    #[test]
    fn tight_budgets_surface_as_errors() {
        let g = z();
        let sft = golden(&g);
        let limits = Limits { node_budget: 3, ..Limits::default() };
        assert!(matches!(
            ball_search(&sft, 2, &limits),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn periodic_enumerate_finds_constant_point() {
        let g = z();
        let sft = golden(&g);
        let cert = periodic_enumerate(&sft, 3, None, &Limits::default()).unwrap().unwrap();
        match &cert.body {
            CertificateBody::PeriodicPoint { config, stabilizer_index } => {
                assert_eq!(config.labeling(), &[0]);
                assert_eq!(*stabilizer_index, 1);
            }
            other => panic!("expected a periodic point, got {other:?}"),
        }
        assert_eq!(cert.provenance.params["found_at_index"], "1");
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn periodic_enumerate_respects_quotient_order() {
        let g = z();
        let table = CosetTable::sublattice(&g, &[vec![2]]).unwrap();
        let locked = crate::constructions::locked_sft(&table).unwrap();
        let cert = periodic_enumerate(&locked, 4, None, &Limits::default()).unwrap().unwrap();
        match &cert.body {
            CertificateBody::PeriodicPoint { config, stabilizer_index } => {
                assert_eq!(config.labeling(), &[0, 1]);
                assert_eq!(*stabilizer_index, 2);
            }
            other => panic!("expected a periodic point, got {other:?}"),
        }
        assert_eq!(cert.provenance.params["found_at_index"], "2");
        let witness = crate::constructions::locked_witness(&table).unwrap();
        match &cert.body {
            CertificateBody::PeriodicPoint { config, .. } => {
                assert!(config.same_configuration(&witness).unwrap());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn periodic_solutions_list_all_labelings() {
        let g = z();
        let table = CosetTable::sublattice(&g, &[vec![2]]).unwrap();
        let hom = table.quotient_hom().unwrap();
        let sft = golden(&g);
        let sols = periodic_solutions_on_quotient(&sft, &hom, &Limits::default()).unwrap();
        let labelings: Vec<&[LetterId]> = sols.iter().map(|s| s.labeling()).collect();
        assert_eq!(labelings, vec![&[0, 0][..], &[0, 1][..], &[1, 0][..]]);
    }

    #[test]
    fn invariant_search_collapses_diagonal() {
        let g = z2();
        let p = Pattern::new(
            &g,
            vec![GroupElement::Vector(vec![0, 0]), GroupElement::Vector(vec![1, 0])],
            vec![1, 1],
        )
        .unwrap();
        let sft = SftDescription::new(Arc::clone(&g), binary(), vec![p]).unwrap();
        let diag = GroupElement::Vector(vec![1, 1]);
        let cert = g_invariant_search(&sft, &diag, 1, &Limits::default()).unwrap().unwrap();
        match &cert.body {
            CertificateBody::GInvariantBall { invariant, partial, .. } => {
                assert_eq!(invariant, &diag);
                assert_eq!(partial.letters().len(), 5);
            }
            other => panic!("expected an invariant ball, got {other:?}"),
        }
        assert_eq!(cert.provenance.params["linked_pairs"], "2");
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn invariant_search_rejects_identity() {
        let g = z2();
        let sft = golden_over_z2(&g);
        let id = GroupElement::Vector(vec![0, 0]);
        assert!(matches!(
            g_invariant_search(&sft, &id, 1, &Limits::default()),
            Err(Error::InvalidElement(_))
        ));
    }

    fn golden_over_z2(g: &Arc<GroupContext>) -> SftDescription {
        let p = Pattern::new(
            g,
            vec![GroupElement::Vector(vec![0, 0]), GroupElement::Vector(vec![1, 0])],
            vec![1, 1],
        )
        .unwrap();
        SftDescription::new(Arc::clone(g), binary(), vec![p]).unwrap()
    }

    #[test]
    fn z_analysis_of_golden_mean() {
        let g = z();
        let sft = golden(&g);
        let analysis = z_analyze(&sft, &Limits::default()).unwrap();
        assert!(!analysis.empty);
        assert_eq!(analysis.window, 2);
        assert_eq!(analysis.vertices_total, 2);
        assert_eq!(analysis.vertices_live, 2);
        assert_eq!(analysis.minimal_period, Some(1));
        assert_eq!(analysis.point.unwrap().labeling(), &[0]);
    }

    #[test]
    fn z_analysis_detects_emptiness() {
        let g = z();
        let sft = word_sft(&g, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let analysis = z_analyze(&sft, &Limits::default()).unwrap();
        assert!(analysis.empty);
        assert_eq!(analysis.minimal_period, None);
        assert!(analysis.point.is_none());
    }

    #[test]
    fn z_analysis_finds_period_two() {
        let g = z();
        let sft = word_sft(&g, &[&[0, 0], &[1, 1]]);
        let analysis = z_analyze(&sft, &Limits::default()).unwrap();
        assert!(!analysis.empty);
        assert_eq!(analysis.minimal_period, Some(2));
        assert_eq!(analysis.point.unwrap().labeling(), &[0, 1]);
    }

    #[test]
    fn z_analysis_handles_single_cell_patterns() {
        let g = z();
        let p = Pattern::new(&g, vec![GroupElement::Vector(vec![0])], vec![0]).unwrap();
        let sft = SftDescription::new(Arc::clone(&g), binary(), vec![p]).unwrap();
        let analysis = z_analyze(&sft, &Limits::default()).unwrap();
        assert!(!analysis.empty);
        assert_eq!(analysis.window, 1);
        assert_eq!(analysis.minimal_period, Some(1));
        assert_eq!(analysis.point.unwrap().labeling(), &[1]);
    }

    #[test]
    fn transfer_to_overgroup_certifies_over_the_ambient_group() {
        let g = z();
        let sft = golden(&g);
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![2]]).unwrap();
        let out = transfer_commensurable(
            &sft,
            &emb,
            TransferDirection::ToOvergroup,
            4,
            &Limits::default(),
        )
        .unwrap();
        let cert = match out {
            TransferOutcome::Found(c) => *c,
            TransferOutcome::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        };
        assert_eq!(cert.sft_digest, sft.digest());
        match &cert.body {
            CertificateBody::PeriodicPoint { config, stabilizer_index } => {
                assert_eq!(config.labeling(), &[0]);
                assert_eq!(*stabilizer_index, 1);
            }
            other => panic!("expected a periodic point, got {other:?}"),
        }
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn transfer_to_subgroup_restricts_the_found_point() {
        let g = z();
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![2]]).unwrap();
        let sft = golden(emb.sub());
        let out = transfer_commensurable(
            &sft,
            &emb,
            TransferDirection::ToSubgroup,
            4,
            &Limits::default(),
        )
        .unwrap();
        let cert = match out {
            TransferOutcome::Found(c) => *c,
            TransferOutcome::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        };
        assert_eq!(cert.sft_digest, sft.digest());
        match &cert.body {
            CertificateBody::PeriodicPoint { config, stabilizer_index } => {
                assert_eq!(config.labeling(), &[0]);
                assert_eq!(*stabilizer_index, 1);
            }
            other => panic!("expected a periodic point, got {other:?}"),
        }
        assert_eq!(cert.provenance.params["found_at_ambient_index"], "2");
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn transfer_to_subgroup_requires_normality() {
        let f2 = Arc::new(GroupContext::free_group("F2", 2).unwrap());
        // Index-2 subgroup from the parity action; index-3 non-normal would
        // also do, but parity keeps the table small. Words of even total
        // length: a and b both swap the cosets.
        let fwd = vec![vec![1, 0], vec![1, 0]];
        let table = CosetTable::from_action(&f2, fwd, None).unwrap();
        let sub = Arc::new(GroupContext::free_group("F1", 1).unwrap());
        let _ = (table, sub);
        // Z with a misaligned, non-normal analogue is impossible (abelian),
        // so the normality gate is exercised through the free group in
        // coset table tests; here we just confirm normal subgroups pass.
        let g = z();
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![3]]).unwrap();
        let sft = golden(emb.sub());
        assert!(transfer_commensurable(
            &sft,
            &emb,
            TransferDirection::ToSubgroup,
            3,
            &Limits::default()
        )
        .is_ok());
    }

    #[test]
    fn transfer_reports_budget_exhaustion_as_inconclusive() {
        let g = z();
        // Every 2-word forbidden: all block letters die, so searches burn
        // their nodes without finding anything.
        let sft = word_sft(&g, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let emb = SubgroupEmbedding::sublattice(&g, &[vec![2]]).unwrap();
        let limits = Limits { node_budget: 2, ..Limits::default() };
        let out =
            transfer_commensurable(&sft, &emb, TransferDirection::ToOvergroup, 4, &limits)
                .unwrap();
        match out {
            TransferOutcome::Inconclusive { reason } => {
                assert!(reason.contains("budget"), "{reason}");
            }
            TransferOutcome::Found(_) => panic!("expected inconclusive"),
        }
    }

    #[test]
    fn extension_push_through_heisenberg() {
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
        for d in [vec![1, 0], vec![0, 1]] {
            for l in 0..2 as LetterId {
                forbidden.push(
                    Pattern::new(
                        &q,
                        vec![GroupElement::Vector(vec![0, 0]), GroupElement::Vector(d.clone())],
                        vec![l, l],
                    )
                    .unwrap(),
                );
            }
        }
        let sbar = SftDescription::new(Arc::clone(&q), binary(), forbidden).unwrap();
        let out = extension_push(&sbar, &f, 4, &Limits::default()).unwrap();
        let cert = match out {
            TransferOutcome::Found(c) => *c,
            TransferOutcome::Inconclusive { reason } => panic!("inconclusive: {reason}"),
        };
        assert_eq!(cert.sft_digest, sbar.digest());
        match &cert.body {
            CertificateBody::PeriodicPoint { config, stabilizer_index } => {
                assert_eq!(config.labeling(), &[0, 1]);
                assert_eq!(*stabilizer_index, 2);
                assert_eq!(
                    config.quotient().kernel_lattice().unwrap(),
                    vec![vec![1, 1], vec![0, 2]]
                );
            }
            other => panic!("expected a periodic point, got {other:?}"),
        }
        let report = verify_certificate(&sbar, &cert, &Limits::default()).unwrap();
        assert!(report.ok, "{}", report.detail);
    }

    #[test]
    fn verify_rejects_tampered_certificates() {
        let g = z();
        let sft = golden(&g);
        let mut cert = periodic_enumerate(&sft, 3, None, &Limits::default()).unwrap().unwrap();
        let other = word_sft(&g, &[&[0, 0]]);
        let report = verify_certificate(&other, &cert, &Limits::default()).unwrap();
        assert!(!report.ok);
        assert!(report.detail.contains("digest"));
        if let CertificateBody::PeriodicPoint { stabilizer_index, .. } = &mut cert.body {
            *stabilizer_index = 7;
        }
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(!report.ok);
        assert!(report.detail.contains("stabilizer"));
    }

    #[test]
    fn verify_rejects_non_member_points() {
        let g = z();
        let sft = golden(&g);
        let table = CosetTable::sublattice(&g, &[vec![1]]).unwrap();
        let config = PeriodicConfiguration::new(
            table.quotient_hom().unwrap(),
            vec![1],
            binary(),
        )
        .unwrap();
        let cert = Certificate {
            sft_digest: sft.digest(),
            body: CertificateBody::PeriodicPoint { config, stabilizer_index: 1 },
            provenance: Provenance::new("handmade"),
        };
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(!report.ok);
        assert!(report.detail.contains("forbidden"));
    }

    #[test]
    fn verify_rejects_truncated_ball_domains() {
        let g = z();
        let sft = golden(&g);
        let domain = vec![GroupElement::Vector(vec![0])];
        let partial = PartialConfiguration::new(&g, domain, vec![0]).unwrap();
        let cert = Certificate {
            sft_digest: sft.digest(),
            body: CertificateBody::LegalBall { radius: 1, partial },
            provenance: Provenance::new("handmade"),
        };
        let report = verify_certificate(&sft, &cert, &Limits::default()).unwrap();
        assert!(!report.ok);
        assert!(report.detail.contains("domain"));
    }
}
