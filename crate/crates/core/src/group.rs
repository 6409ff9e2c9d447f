//! Group backends with an exact word problem.
//!
//! Every element is kept in a canonical form, so structural equality of
//! [`GroupElement`] values decides the word problem once both sides are valid
//! in the same context.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};

/// Canonical form of a group element. Which variant is meaningful is fixed
/// by the owning [`GroupContext`]'s backend.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// Free abelian Z^d: integer coordinate vector of length d.
    Vector(Vec<i64>),
    /// Free group: freely reduced word of signed 1-based generator indices
    /// (`+k` is the k-th generator, `-k` its inverse).
    Word(Vec<i32>),
    /// Finite group: index into the multiplication table.
    Index(usize),
    /// Discrete Heisenberg group: exponents (a, b, c) of the normal form
    /// x^a y^b z^c, where z = [x, y] is central.
    Triple([i64; 3]),
}

/// A finite group presented by its full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    /// Shortest generator word per element, found breadth first with
    /// generators tried in order and an inverse right after its generator.
    words: Vec<Vec<i32>>,
    dist: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the table as a group and the generators as a generating
    /// set. `table[i][j]` is the index of the product of elements i and j.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidModel("finite group needs at least one element".into()));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidModel(format!("duplicate element name {name:?}")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidModel(format!("multiplication table must be {n}x{n}")));
        }
        for row in &table {
            for &e in row {
                if e >= n {
                    return Err(Error::InvalidModel(format!("table entry {e} out of range")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
            .ok_or_else(|| Error::InvalidModel("table has no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidModel(format!(
                            "table is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => {
                    return Err(Error::InvalidModel(format!("element {a} has no inverse")));
                }
            }
        }
        for &g in &generators {
            if g >= n {
                return Err(Error::InvalidModel(format!("generator index {g} out of range")));
            }
        }
        let mut words = vec![Vec::new(); n];
        let mut dist = vec![usize::MAX; n];
        dist[identity] = 0;
        let mut queue = VecDeque::from([identity]);
        while let Some(cur) = queue.pop_front() {
            for (k, &g) in generators.iter().enumerate() {
                for (next, letter) in [(table[cur][g], (k + 1) as i32), (table[cur][inverse[g]], -((k + 1) as i32))] {
                    if dist[next] == usize::MAX {
                        dist[next] = dist[cur] + 1;
                        let mut w = words[cur].clone();
                        w.push(letter);
                        words[next] = w;
                        queue.push_back(next);
                    }
                }
            }
        }
        if dist.iter().any(|&d| d == usize::MAX) {
            return Err(Error::InvalidModel("generators do not generate the group".into()));
        }
        Ok(FiniteGroup { names, table, identity, inverse, generators, words, dist })
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn words(&self) -> &[Vec<i32>] {
        &self.words
    }

    pub fn dist(&self) -> &[usize] {
        &self.dist
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv_idx(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    FreeAbelian { rank: usize },
    FreeGroup { rank: usize },
    Finite(FiniteGroup),
    Heisenberg,
}

/// A group together with its fixed generating set. All element operations
/// validate their arguments against the backend before acting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupContext {
    name: String,
    backend: Backend,
}

/// Sort key used whenever elements need a canonical order: first a word
/// length proxy, then a lexicographic tiebreak on the canonical form.
pub type ElemKey = (u64, Vec<i64>);

impl GroupContext {
    pub fn free_abelian(name: impl Into<String>, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidModel("free abelian rank must be at least 1".into()));
        }
        Ok(GroupContext { name: name.into(), backend: Backend::FreeAbelian { rank } })
    }

    pub fn free_group(name: impl Into<String>, rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidModel("free group rank must be between 1 and 26".into()));
        }
        Ok(GroupContext { name: name.into(), backend: Backend::FreeGroup { rank } })
    }

    pub fn finite(name: impl Into<String>, group: FiniteGroup) -> Self {
        GroupContext { name: name.into(), backend: Backend::Finite(group) }
    }

    pub fn heisenberg(name: impl Into<String>) -> Self {
        GroupContext { name: name.into(), backend: Backend::Heisenberg }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// True when the two contexts describe the same group with the same
    /// generating set; names are ignored.
    pub fn same_group(&self, other: &GroupContext) -> bool {
        self.backend == other.backend
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.backend, Backend::Finite(_))
    }

    pub fn finite_group(&self) -> Option<&FiniteGroup> {
        match &self.backend {
            Backend::Finite(g) => Some(g),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        self.finite_group().map(|g| g.order())
    }

    pub fn rank(&self) -> Option<usize> {
        match self.backend {
            Backend::FreeAbelian { rank } | Backend::FreeGroup { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn validate_elem(&self, g: &GroupElement) -> Result<()> {
        match (&self.backend, g) {
            (Backend::FreeAbelian { rank }, GroupElement::Vector(v)) => {
                if v.len() != *rank {
                    return Err(Error::InvalidElement(format!(
                        "vector of length {} in Z^{rank}",
                        v.len()
                    )));
                }
                Ok(())
            }
            (Backend::FreeGroup { rank }, GroupElement::Word(w)) => {
                for &x in w {
                    if x == 0 || x.unsigned_abs() as usize > *rank {
                        return Err(Error::InvalidElement(format!("letter {x} out of range")));
                    }
                }
                for pair in w.windows(2) {
                    if pair[0] == -pair[1] {
                        return Err(Error::InvalidElement(format!("word {w:?} is not freely reduced")));
                    }
                }
                Ok(())
            }
            (Backend::Finite(fin), GroupElement::Index(i)) => {
                if *i >= fin.order() {
                    return Err(Error::InvalidElement(format!("index {i} out of range")));
                }
                Ok(())
            }
            (Backend::Heisenberg, GroupElement::Triple(_)) => Ok(()),
            _ => Err(Error::BackendMismatch(format!(
                "element {g:?} does not belong to group {}",
                self.name
            ))),
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.backend {
            Backend::FreeAbelian { rank } => GroupElement::Vector(vec![0; *rank]),
            Backend::FreeGroup { .. } => GroupElement::Word(Vec::new()),
            Backend::Finite(fin) => GroupElement::Index(fin.identity),
            Backend::Heisenberg => GroupElement::Triple([0, 0, 0]),
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        *g == self.identity()
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate_elem(a)?;
        self.validate_elem(b)?;
        Ok(match (&self.backend, a, b) {
            (Backend::FreeAbelian { .. }, GroupElement::Vector(u), GroupElement::Vector(v)) => {
                GroupElement::Vector(u.iter().zip(v).map(|(x, y)| x + y).collect())
            }
            (Backend::FreeGroup { .. }, GroupElement::Word(u), GroupElement::Word(v)) => {
                let mut out = u.clone();
                for &x in v {
                    if out.last() == Some(&-x) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                GroupElement::Word(out)
            }
            (Backend::Finite(fin), GroupElement::Index(i), GroupElement::Index(j)) => {
                GroupElement::Index(fin.table[*i][*j])
            }
            (Backend::Heisenberg, GroupElement::Triple([a1, b1, c1]), GroupElement::Triple([a2, b2, c2])) => {
                GroupElement::Triple([a1 + a2, b1 + b2, c1 + c2 - a2 * b1])
            }
            _ => unreachable!("validated above"),
        })
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement> {
        self.validate_elem(g)?;
        Ok(match (&self.backend, g) {
            (Backend::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                GroupElement::Vector(v.iter().map(|x| -x).collect())
            }
            (Backend::FreeGroup { .. }, GroupElement::Word(w)) => {
                GroupElement::Word(w.iter().rev().map(|x| -x).collect())
            }
            (Backend::Finite(fin), GroupElement::Index(i)) => GroupElement::Index(fin.inverse[*i]),
            (Backend::Heisenberg, GroupElement::Triple([a, b, c])) => {
                GroupElement::Triple([-a, -b, -c - a * b])
            }
            _ => unreachable!("validated above"),
        })
    }

    pub fn pow(&self, g: &GroupElement, n: i64) -> Result<GroupElement> {
        if n < 0 {
            return self.pow(&self.inv(g)?, -n);
        }
        let mut acc = self.identity();
        let mut base = g.clone();
        let mut n = n as u64;
        self.validate_elem(g)?;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Conjugate t g t^{-1}.
    pub fn conj(&self, t: &GroupElement, g: &GroupElement) -> Result<GroupElement> {
        self.mul(&self.mul(t, g)?, &self.inv(t)?)
    }

    /// The fixed generating set, as (name, element) pairs.
    pub fn generators(&self) -> Vec<(String, GroupElement)> {
        match &self.backend {
            Backend::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    (format!("e{}", i + 1), GroupElement::Vector(v))
                })
                .collect(),
            Backend::FreeGroup { rank } => (0..*rank)
                .map(|i| (((b'a' + i as u8) as char).to_string(), GroupElement::Word(vec![i as i32 + 1])))
                .collect(),
            Backend::Finite(fin) => fin
                .generators
                .iter()
                .map(|&g| (fin.names[g].clone(), GroupElement::Index(g)))
                .collect(),
            Backend::Heisenberg => vec![
                ("x".into(), GroupElement::Triple([1, 0, 0])),
                ("y".into(), GroupElement::Triple([0, 1, 0])),
                ("z".into(), GroupElement::Triple([0, 0, 1])),
            ],
        }
    }

    /// A word in the fixed generators evaluating to g, as signed 1-based
    /// generator indices read left to right.
    pub fn word(&self, g: &GroupElement) -> Result<Vec<i32>> {
        self.validate_elem(g)?;
        Ok(match (&self.backend, g) {
            (Backend::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                let mut w = Vec::new();
                for (i, &x) in v.iter().enumerate() {
                    let letter = if x >= 0 { i as i32 + 1 } else { -(i as i32 + 1) };
                    for _ in 0..x.unsigned_abs() {
                        w.push(letter);
                    }
                }
                w
            }
            (Backend::FreeGroup { .. }, GroupElement::Word(w)) => w.clone(),
            (Backend::Finite(fin), GroupElement::Index(i)) => fin.words[*i].clone(),
            (Backend::Heisenberg, GroupElement::Triple([a, b, c])) => {
                let mut w = Vec::new();
                for (k, &x) in [(1, a), (2, b), (3, c)] {
                    let letter = if x >= 0 { k } else { -k };
                    for _ in 0..x.unsigned_abs() {
                        w.push(letter);
                    }
                }
                w
            }
            _ => unreachable!("validated above"),
        })
    }

    /// Evaluates a signed generator word.
    pub fn eval_word(&self, w: &[i32]) -> Result<GroupElement> {
        let gens = self.generators();
        let mut acc = self.identity();
        for &x in w {
            if x == 0 || x.unsigned_abs() as usize > gens.len() {
                return Err(Error::InvalidElement(format!("letter {x} out of range")));
            }
            let g = &gens[x.unsigned_abs() as usize - 1].1;
            let step = if x > 0 { g.clone() } else { self.inv(g)? };
            acc = self.mul(&acc, &step)?;
        }
        Ok(acc)
    }

    /// Canonical sort key: word length proxy first, then a lexicographic
    /// tiebreak on the canonical form.
    pub fn elem_key(&self, g: &GroupElement) -> ElemKey {
        match (&self.backend, g) {
            (Backend::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                (v.iter().map(|x| x.unsigned_abs()).sum(), v.clone())
            }
            (Backend::FreeGroup { .. }, GroupElement::Word(w)) => (
                w.len() as u64,
                w.iter()
                    .map(|&x| if x > 0 { 2 * (x as i64 - 1) } else { 2 * (-x as i64 - 1) + 1 })
                    .collect(),
            ),
            (Backend::Finite(fin), GroupElement::Index(i)) => (
                fin.dist[*i] as u64,
                fin.words[*i]
                    .iter()
                    .map(|&x| if x > 0 { 2 * (x as i64 - 1) } else { 2 * (-x as i64 - 1) + 1 })
                    .collect(),
            ),
            (Backend::Heisenberg, GroupElement::Triple(t)) => {
                (t.iter().map(|x| x.unsigned_abs()).sum(), t.to_vec())
            }
            _ => (u64::MAX, Vec::new()),
        }
    }

    /// Sorts elements into the canonical order and drops duplicates.
    pub fn sort_unique(&self, elems: &mut Vec<GroupElement>) {
        elems.sort_by_key(|g| self.elem_key(g));
        elems.dedup();
    }

    /// All elements of word length at most n over the fixed generators, in
    /// canonical order.
    pub fn ball(&self, n: usize) -> Result<Vec<GroupElement>> {
        const BALL_CAP: usize = 2_000_000;
        let mut out = match &self.backend {
            Backend::FreeAbelian { rank } => {
                let mut out = Vec::new();
                let mut cur = vec![0i64; *rank];
                ball_zd(&mut out, &mut cur, 0, n as i64, BALL_CAP)?;
                out
            }
            Backend::FreeGroup { rank } => {
                let mut out = vec![GroupElement::Word(Vec::new())];
                let mut frontier = vec![Vec::new()];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for k in 1..=*rank as i32 {
                            for letter in [k, -k] {
                                if w.last() != Some(&-letter) {
                                    let mut nw = w.clone();
                                    nw.push(letter);
                                    next.push(nw);
                                }
                            }
                        }
                    }
                    if out.len() + next.len() > BALL_CAP {
                        return Err(Error::CapExceeded(format!("ball of radius {n} is too large")));
                    }
                    out.extend(next.iter().cloned().map(GroupElement::Word));
                    frontier = next;
                }
                out
            }
            Backend::Finite(fin) => (0..fin.order())
                .filter(|&i| fin.dist[i] <= n)
                .map(GroupElement::Index)
                .collect(),
            Backend::Heisenberg => {
                let gens: Vec<GroupElement> = self.generators().into_iter().map(|(_, g)| g).collect();
                let mut seen: HashSet<GroupElement> = HashSet::new();
                seen.insert(self.identity());
                let mut frontier = vec![self.identity()];
                let mut out = vec![self.identity()];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for g in &frontier {
                        for gen in &gens {
                            for step in [gen.clone(), self.inv(gen)?] {
                                let h = self.mul(g, &step)?;
                                if seen.insert(h.clone()) {
                                    next.push(h);
                                }
                            }
                        }
                    }
                    if out.len() + next.len() > BALL_CAP {
                        return Err(Error::CapExceeded(format!("ball of radius {n} is too large")));
                    }
                    out.extend(next.iter().cloned());
                    frontier = next;
                }
                out
            }
        };
        out.sort_by_key(|g| self.elem_key(g));
        out.dedup();
        Ok(out)
    }

    /// Renders an element for reports: coordinates for Z^d, words like "abA"
    /// for free groups, element names for finite groups, triples for the
    /// Heisenberg group.
    pub fn render(&self, g: &GroupElement) -> String {
        match (&self.backend, g) {
            (Backend::FreeAbelian { rank }, GroupElement::Vector(v)) => {
                if *rank == 1 {
                    v[0].to_string()
                } else {
                    let coords: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                    format!("({})", coords.join(","))
                }
            }
            (Backend::FreeGroup { .. }, GroupElement::Word(w)) => {
                if w.is_empty() {
                    "1".into()
                } else {
                    w.iter()
                        .map(|&x| {
                            let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
                            if x > 0 {
                                c.to_string()
                            } else {
                                c.to_ascii_uppercase().to_string()
                            }
                        })
                        .collect()
                }
            }
            (Backend::Finite(fin), GroupElement::Index(i)) => fin.names[*i].clone(),
            (Backend::Heisenberg, GroupElement::Triple([a, b, c])) => format!("({a},{b},{c})"),
            _ => format!("{g:?}"),
        }
    }

    /// Parses the rendering produced by [`render`](Self::render).
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let bad = |msg: &str| Error::InvalidElement(format!("{msg}: {s:?}"));
        let g = match &self.backend {
            Backend::FreeAbelian { rank } => {
                if *rank == 1 && !s.starts_with('(') {
                    GroupElement::Vector(vec![s.trim().parse().map_err(|_| bad("expected an integer"))?])
                } else {
                    let inner = s
                        .trim()
                        .strip_prefix('(')
                        .and_then(|t| t.strip_suffix(')'))
                        .ok_or_else(|| bad("expected (a,b,...)"))?;
                    let v: Vec<i64> = inner
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad("expected an integer")))
                        .collect::<Result<_>>()?;
                    GroupElement::Vector(v)
                }
            }
            Backend::FreeGroup { .. } => {
                let t = s.trim();
                if t == "1" || t.is_empty() {
                    GroupElement::Word(Vec::new())
                } else {
                    let mut w = Vec::new();
                    for ch in t.chars() {
                        if ch.is_ascii_lowercase() {
                            w.push((ch as u8 - b'a') as i32 + 1);
                        } else if ch.is_ascii_uppercase() {
                            w.push(-((ch as u8 - b'A') as i32 + 1));
                        } else {
                            return Err(bad("expected letters a-z or A-Z"));
                        }
                    }
                    let mut reduced: Vec<i32> = Vec::new();
                    for x in w {
                        if reduced.last() == Some(&-x) {
                            reduced.pop();
                        } else {
                            reduced.push(x);
                        }
                    }
                    GroupElement::Word(reduced)
                }
            }
            Backend::Finite(fin) => GroupElement::Index(
                fin.index_of_name(s.trim()).ok_or_else(|| bad("unknown element name"))?,
            ),
            Backend::Heisenberg => {
                let inner = s
                    .trim()
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| bad("expected (a,b,c)"))?;
                let v: Vec<i64> = inner
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| bad("expected an integer")))
                    .collect::<Result<_>>()?;
                if v.len() != 3 {
                    return Err(bad("expected three coordinates"));
                }
                GroupElement::Triple([v[0], v[1], v[2]])
            }
        };
        self.validate_elem(&g)?;
        Ok(g)
    }
}

fn ball_zd(
    out: &mut Vec<GroupElement>,
    cur: &mut Vec<i64>,
    pos: usize,
    budget: i64,
    cap: usize,
) -> Result<()> {
    if pos == cur.len() {
        if out.len() >= cap {
            return Err(Error::CapExceeded("ball is too large".into()));
        }
        out.push(GroupElement::Vector(cur.clone()));
        return Ok(());
    }
    for x in -budget..=budget {
        cur[pos] = x;
        ball_zd(out, cur, pos + 1, budget - x.abs(), cap)?;
    }
    cur[pos] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Oracle for the Heisenberg backend: the faithful representation
    /// (a,b,c) -> [[1,a,ab+c],[0,1,b],[0,0,1]] for the normal form
    /// x^a y^b z^c.
    fn heis_matrix(t: &[i64; 3]) -> [[i64; 3]; 3] {
        let [a, b, c] = *t;
        [[1, a, a * b + c], [0, 1, b], [0, 0, 1]]
    }

    fn mat_mul(m: &[[i64; 3]; 3], n: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[i][j] += m[i][k] * n[k][j];
                }
            }
        }
        out
    }

    fn mat_to_triple(m: &[[i64; 3]; 3]) -> [i64; 3] {
        let a = m[0][1];
        let b = m[1][2];
        [a, b, m[0][2] - a * b]
    }

    fn klein_four() -> FiniteGroup {
        let names = vec!["1".into(), "a".into(), "b".into(), "ab".into()];
        let table = vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        FiniteGroup::new(names, table, vec![1, 2]).unwrap()
    }

    #[test]
    fn heisenberg_commutator_is_z() {
        let h = GroupContext::heisenberg("H");
        let x = GroupElement::Triple([1, 0, 0]);
        let y = GroupElement::Triple([0, 1, 0]);
        let xy = h.mul(&x, &y).unwrap();
        let yx = h.mul(&y, &x).unwrap();
        assert_eq!(xy, GroupElement::Triple([1, 1, 0]));
        assert_eq!(yx, GroupElement::Triple([1, 1, -1]));
        let comm = h
            .mul(&h.mul(&h.inv(&x).unwrap(), &h.inv(&y).unwrap()).unwrap(), &xy)
            .unwrap();
        assert_eq!(comm, GroupElement::Triple([0, 0, 1]));
    }

    #[test]
    fn ball_sizes_match_known_counts() {
        let z2 = GroupContext::free_abelian("Z2", 2).unwrap();
        assert_eq!(z2.ball(1).unwrap().len(), 5);
        assert_eq!(z2.ball(2).unwrap().len(), 13);
        let z = GroupContext::free_abelian("Z", 1).unwrap();
        assert_eq!(z.ball(3).unwrap().len(), 7);
        let f2 = GroupContext::free_group("F2", 2).unwrap();
        assert_eq!(f2.ball(1).unwrap().len(), 5);
        assert_eq!(f2.ball(2).unwrap().len(), 17);
    }

    #[test]
    fn free_group_ball_matches_brute_reduction() {
        let f2 = GroupContext::free_group("F2", 2).unwrap();
        let mut brute: HashSet<Vec<i32>> = HashSet::new();
        let letters = [1i32, -1, 2, -2];
        let mut words: Vec<Vec<i32>> = vec![Vec::new()];
        brute.insert(Vec::new());
        for _ in 0..3 {
            let mut next = Vec::new();
            for w in &words {
                for &l in &letters {
                    let mut nw = w.clone();
                    nw.push(l);
                    let mut red: Vec<i32> = Vec::new();
                    for x in nw.iter().copied() {
                        if red.last() == Some(&-x) {
                            red.pop();
                        } else {
                            red.push(x);
                        }
                    }
                    brute.insert(red.clone());
                    next.push(nw);
                }
            }
            words = next;
        }
        let ball: HashSet<Vec<i32>> = f2
            .ball(3)
            .unwrap()
            .into_iter()
            .map(|g| match g {
                GroupElement::Word(w) => w,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(ball, brute);
    }

    #[test]
    fn finite_group_words_reach_everything() {
        let k4 = klein_four();
        assert_eq!(k4.order(), 4);
        assert_eq!(k4.identity_index(), 0);
        let ctx = GroupContext::finite("K4", k4);
        let ball1 = ctx.ball(1).unwrap();
        assert_eq!(ball1.len(), 3);
        assert_eq!(ctx.ball(2).unwrap().len(), 4);
        assert_eq!(ctx.render(&GroupElement::Index(3)), "ab");
    }

    #[test]
    fn rejects_bad_finite_tables() {
        let names: Vec<String> = vec!["1".into(), "a".into()];
        let err = FiniteGroup::new(names.clone(), vec![vec![0, 1], vec![1, 1]], vec![1]);
        assert!(err.is_err());
        let err = FiniteGroup::new(names, vec![vec![0, 1], vec![1, 0]], vec![]);
        assert!(err.is_err());
    }

    #[test]
    fn render_parse_round_trip() {
        let z2 = GroupContext::free_abelian("Z2", 2).unwrap();
        let g = GroupElement::Vector(vec![3, -2]);
        assert_eq!(z2.render(&g), "(3,-2)");
        assert_eq!(z2.parse("(3, -2)").unwrap(), g);
        let z = GroupContext::free_abelian("Z", 1).unwrap();
        assert_eq!(z.render(&GroupElement::Vector(vec![-5])), "-5");
        assert_eq!(z.parse("-5").unwrap(), GroupElement::Vector(vec![-5]));
        let f2 = GroupContext::free_group("F2", 2).unwrap();
        let w = GroupElement::Word(vec![1, 2, -1]);
        assert_eq!(f2.render(&w), "abA");
        assert_eq!(f2.parse("abA").unwrap(), w);
        assert_eq!(f2.parse("aA").unwrap(), f2.identity());
        let h = GroupContext::heisenberg("H");
        let t = GroupElement::Triple([1, -2, 3]);
        assert_eq!(h.render(&t), "(1,-2,3)");
        assert_eq!(h.parse("(1,-2,3)").unwrap(), t);
    }

    #[test]
    fn words_evaluate_back() {
        let h = GroupContext::heisenberg("H");
        let g = GroupElement::Triple([2, -1, 3]);
        assert_eq!(h.eval_word(&h.word(&g).unwrap()).unwrap(), g);
        let z2 = GroupContext::free_abelian("Z2", 2).unwrap();
        let v = GroupElement::Vector(vec![-2, 5]);
        assert_eq!(z2.eval_word(&z2.word(&v).unwrap()).unwrap(), v);
        let ctx = GroupContext::finite("K4", klein_four());
        for i in 0..4 {
            let g = GroupElement::Index(i);
            assert_eq!(ctx.eval_word(&ctx.word(&g).unwrap()).unwrap(), g);
        }
    }

    proptest! {
        #[test]
        fn heisenberg_mul_matches_matrix_oracle(
            a in -6i64..6, b in -6i64..6, c in -6i64..6,
            d in -6i64..6, e in -6i64..6, f in -6i64..6,
        ) {
            let h = GroupContext::heisenberg("H");
            let g1 = [a, b, c];
            let g2 = [d, e, f];
            let prod = h.mul(&GroupElement::Triple(g1), &GroupElement::Triple(g2)).unwrap();
            let oracle = mat_to_triple(&mat_mul(&heis_matrix(&g1), &heis_matrix(&g2)));
            prop_assert_eq!(prod, GroupElement::Triple(oracle));
        }

        #[test]
        fn heisenberg_inverse_cancels(a in -6i64..6, b in -6i64..6, c in -6i64..6) {
            let h = GroupContext::heisenberg("H");
            let g = GroupElement::Triple([a, b, c]);
            let gi = h.inv(&g).unwrap();
            prop_assert_eq!(h.mul(&g, &gi).unwrap(), h.identity());
            prop_assert_eq!(h.mul(&gi, &g).unwrap(), h.identity());
        }

        #[test]
        fn heisenberg_associativity(
            a in -4i64..4, b in -4i64..4, c in -4i64..4,
            d in -4i64..4, e in -4i64..4, f in -4i64..4,
            g in -4i64..4, h in -4i64..4, i in -4i64..4,
        ) {
            let ctx = GroupContext::heisenberg("H");
            let x = GroupElement::Triple([a, b, c]);
            let y = GroupElement::Triple([d, e, f]);
            let z = GroupElement::Triple([g, h, i]);
            let left = ctx.mul(&ctx.mul(&x, &y).unwrap(), &z).unwrap();
            let right = ctx.mul(&x, &ctx.mul(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn free_group_mul_reduces(w1 in proptest::collection::vec(-2i32..=2, 0..8),
                                  w2 in proptest::collection::vec(-2i32..=2, 0..8)) {
            let f2 = GroupContext::free_group("F2", 2).unwrap();
            let clean = |w: &[i32]| {
                let mut red: Vec<i32> = Vec::new();
                for &x in w.iter().filter(|&&x| x != 0) {
                    if red.last() == Some(&-x) { red.pop(); } else { red.push(x); }
                }
                red
            };
            let a = GroupElement::Word(clean(&w1));
            let b = GroupElement::Word(clean(&w2));
            let prod = f2.mul(&a, &b).unwrap();
            prop_assert!(f2.validate_elem(&prod).is_ok());
            let joined: Vec<i32> = w1.iter().chain(w2.iter()).copied().filter(|&x| x != 0).collect();
            prop_assert_eq!(prod, GroupElement::Word(clean(&joined)));
        }

        #[test]
        fn pow_matches_repeated_mul(a in -3i64..3, b in -3i64..3, c in -3i64..3, n in 0i64..6) {
            let h = GroupContext::heisenberg("H");
            let g = GroupElement::Triple([a, b, c]);
            let mut acc = h.identity();
            for _ in 0..n {
                acc = h.mul(&acc, &g).unwrap();
            }
            prop_assert_eq!(h.pow(&g, n).unwrap(), acc.clone());
            prop_assert_eq!(h.pow(&g, -n).unwrap(), h.inv(&acc).unwrap());
        }

        #[test]
        fn ball_is_inverse_closed(n in 0usize..4) {
            let h = GroupContext::heisenberg("H");
            let ball = h.ball(n).unwrap();
            for g in &ball {
                prop_assert!(ball.contains(&h.inv(g).unwrap()));
            }
        }
    }
}
