//! Bi-non-crossing partitions.
//!
//! Positions are 0-based internally and 1-based in every serialized form.
//! The face word `χ` induces the total order `≺_χ`: left positions in
//! increasing order, then right positions in decreasing order. A partition
//! is bi-non-crossing when it is non-crossing after listing positions in
//! that order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{CbfError, Result};

/// Default cap on lattice sizes.
pub const DEFAULT_MAX_N: usize = 10;

/// Left or right face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Face {
    /// ℓ
    Left,
    /// r
    Right,
}

impl Face {
    /// The other face.
    pub fn flip(self) -> Face {
        match self {
            Face::Left => Face::Right,
            Face::Right => Face::Left,
        }
    }

    /// `'l'` or `'r'`.
    pub fn letter(self) -> char {
        match self {
            Face::Left => 'l',
            Face::Right => 'r',
        }
    }
}

/// A face word `χ : {1..n} → {ℓ, r}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chi(Vec<Face>);

impl Chi {
    /// Builds from faces; the word must be nonempty.
    pub fn new(faces: Vec<Face>) -> Result<Self> {
        if faces.is_empty() {
            return Err(CbfError::Validation("empty face word".into()));
        }
        Ok(Chi(faces))
    }

    /// Parses a string over `{l, r}`.
    pub fn parse(s: &str) -> Result<Self> {
        let faces = s
            .trim()
            .chars()
            .map(|c| match c {
                'l' | 'L' | 'ℓ' => Ok(Face::Left),
                'r' | 'R' => Ok(Face::Right),
                _ => Err(CbfError::Validation(format!("bad face letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Chi::new(faces)
    }

    /// `m` lefts followed by `n` rights.
    pub fn lefts_then_rights(m: usize, n: usize) -> Result<Self> {
        let mut v = vec![Face::Left; m];
        v.extend(core::iter::repeat_n(Face::Right, n));
        Chi::new(v)
    }

    /// The word whose `i`-th letter is bit `i` of `bits` (1 = right).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Chi((0..n).map(|i| if bits >> i & 1 == 1 { Face::Right } else { Face::Left }).collect())
    }

    /// Inverse of [`Chi::from_bits`].
    pub fn bits(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, f)| ((*f == Face::Right) as u64) << i).sum()
    }

    /// Word length.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; face words are nonempty.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Face at 0-based position `i`.
    pub fn face(&self, i: usize) -> Face {
        self.0[i]
    }

    /// All faces.
    pub fn faces(&self) -> &[Face] {
        &self.0
    }

    /// Positions listed in `≺_χ` order.
    pub fn order(&self) -> Vec<usize> {
        let n = self.len();
        let mut v: Vec<usize> = (0..n).filter(|&i| self.0[i] == Face::Left).collect();
        v.extend((0..n).rev().filter(|&i| self.0[i] == Face::Right));
        v
    }

    /// `rank()[i]` is the index of position `i` in `≺_χ` order.
    pub fn rank(&self) -> Vec<usize> {
        let mut r = vec![0; self.len()];
        for (k, p) in self.order().into_iter().enumerate() {
            r[p] = k;
        }
        r
    }

    /// Restriction to a sorted subset of positions.
    pub fn restrict(&self, subset: &[usize]) -> Chi {
        Chi(subset.iter().map(|&i| self.0[i]).collect())
    }

    /// The word with position `q` removed.
    pub fn remove(&self, q: usize) -> Result<Chi> {
        let v: Vec<Face> = self.0.iter().enumerate().filter(|(i, _)| *i != q).map(|(_, f)| *f).collect();
        Chi::new(v)
    }
}

impl fmt::Display for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.0 {
            write!(f, "{}", x.letter())?;
        }
        Ok(())
    }
}

/// Family labels `ω : {1..n} → K`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Omega(Vec<usize>);

impl Omega {
    /// Builds from labels.
    pub fn new(labels: Vec<usize>) -> Self {
        Omega(labels)
    }

    /// Labels.
    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    /// Length.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True for the empty word.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if every position carries the same label.
    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// The induced partition of positions (not necessarily bi-non-crossing).
    pub fn kernel_blocks(&self) -> Vec<Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &l) in self.0.iter().enumerate() {
            m.entry(l).or_default().push(i);
        }
        let mut b: Vec<Vec<usize>> = m.into_values().collect();
        b.sort();
        b
    }
}

/// A partition of `{0..n-1}` together with its face word.
///
/// Blocks are sorted by minimum and each block is ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BncPartition {
    chi: Chi,
    blocks: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

/// Interior or exterior block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockKind {
    /// Strictly nested inside another block in `≺_χ` order.
    Interior,
    /// Not nested.
    Exterior,
}

/// The decomposition of a partition into `χ`-intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalDecomposition {
    /// Each interval's positions in ascending natural order, intervals in
    /// `≺_χ` order.
    pub intervals: Vec<Vec<usize>>,
    /// Index (into the partition's blocks) of the block holding the `≺_χ`
    /// extremes of each interval.
    pub outer: Vec<usize>,
}

fn canonical(mut blocks: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for b in blocks.iter_mut() {
        b.sort_unstable();
    }
    blocks.retain(|b| !b.is_empty());
    blocks.sort();
    blocks
}

fn labels_of(n: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut l = vec![usize::MAX; n];
    for (k, b) in blocks.iter().enumerate() {
        for &i in b {
            l[i] = k;
        }
    }
    l
}

/// True if the blocks, read through `rank`, contain a crossing pair.
fn has_crossing(blocks: &[Vec<usize>], rank: &[usize]) -> bool {
    find_crossing(blocks, rank).is_some()
}

fn find_crossing(blocks: &[Vec<usize>], rank: &[usize]) -> Option<(usize, usize)> {
    let n = rank.len();
    let mut seq = vec![usize::MAX; n];
    for (k, b) in blocks.iter().enumerate() {
        for &i in b {
            seq[rank[i]] = k;
        }
    }
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            let mut runs = 0;
            let mut last = usize::MAX;
            for &x in &seq {
                if (x == a || x == b) && x != last {
                    runs += 1;
                    last = x;
                }
            }
            if runs >= 4 {
                return Some((a, b));
            }
        }
    }
    None
}

fn validate_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for b in blocks {
        if b.is_empty() {
            return Err(CbfError::Validation("empty block".into()));
        }
        for &i in b {
            if i >= n {
                return Err(CbfError::Validation(format!("position {} out of range 1..{n}", i + 1)));
            }
            if seen[i] {
                return Err(CbfError::Validation(format!("position {} repeated", i + 1)));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(CbfError::Validation(format!("position {} missing", i + 1)));
    }
    Ok(())
}

/// Tests whether 0-based blocks form a bi-non-crossing partition.
pub fn is_bnc(blocks: &[Vec<usize>], chi: &Chi) -> Result<bool> {
    validate_blocks(chi.len(), blocks)?;
    Ok(!has_crossing(blocks, &chi.rank()))
}

impl BncPartition {
    /// Validates and canonicalizes 0-based blocks.
    pub fn new(chi: Chi, blocks: Vec<Vec<usize>>) -> Result<Self> {
        validate_blocks(chi.len(), &blocks)?;
        if has_crossing(&blocks, &chi.rank()) {
            return Err(CbfError::Validation("blocks cross in the face order".into()));
        }
        Ok(Self::new_unchecked(chi, blocks))
    }

    /// Builds from 1-based blocks as in `[[1,6],[2,4]]`.
    pub fn from_one_based(chi: Chi, blocks: &[Vec<usize>]) -> Result<Self> {
        let b = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&x| x.checked_sub(1).ok_or_else(|| CbfError::Validation("positions start at 1".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(chi, b)
    }

    pub(crate) fn new_unchecked(chi: Chi, blocks: Vec<Vec<usize>>) -> Self {
        let blocks = canonical(blocks);
        let labels = labels_of(chi.len(), &blocks);
        BncPartition { chi, blocks, labels }
    }

    /// `1_χ`.
    pub fn one(chi: &Chi) -> Self {
        Self::new_unchecked(chi.clone(), vec![(0..chi.len()).collect()])
    }

    /// `0_χ`.
    pub fn zero(chi: &Chi) -> Self {
        Self::new_unchecked(chi.clone(), (0..chi.len()).map(|i| vec![i]).collect())
    }

    /// The face word.
    pub fn chi(&self) -> &Chi {
        &self.chi
    }

    /// Blocks, 0-based, canonical order.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block index of each position.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of positions.
    pub fn n(&self) -> usize {
        self.chi.len()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// True for `1_χ`.
    pub fn is_one(&self) -> bool {
        self.blocks.len() == 1
    }

    /// 1-based blocks.
    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(|x| x + 1).collect()).collect()
    }

    /// `[[1,6],[2,4]]`-style text.
    pub fn to_json_string(&self) -> String {
        let mut s = String::from("[");
        for (k, b) in self.to_one_based().iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push('[');
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{x}"));
            }
            s.push(']');
        }
        s.push(']');
        s
    }

    /// Refinement order: every block of `self` lies inside a block of `other`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        if self.chi != other.chi {
            return Err(CbfError::Validation("partitions over different face words".into()));
        }
        Ok(self.leq_unchecked(other))
    }

    pub(crate) fn leq_unchecked(&self, other: &Self) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&i| other.labels[i] == other.labels[b[0]]))
    }

    /// Refinement of the partition induced by `ω`.
    pub fn leq_omega(&self, omega: &Omega) -> Result<bool> {
        if omega.len() != self.n() {
            return Err(CbfError::Validation("ω length differs from χ length".into()));
        }
        let o = omega.labels();
        Ok(self.blocks.iter().all(|b| b.iter().all(|&i| o[i] == o[b[0]])))
    }

    /// Least upper bound in `BNC(χ)`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        if self.chi != other.chi {
            return Err(CbfError::Validation("partitions over different face words".into()));
        }
        let n = self.n();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        fn unite(p: &mut [usize], a: usize, b: usize) {
            let (ra, rb) = (find(p, a), find(p, b));
            if ra != rb {
                p[ra.max(rb)] = ra.min(rb);
            }
        }
        for part in [self, other] {
            for b in &part.blocks {
                for &i in &b[1..] {
                    unite(&mut parent, b[0], i);
                }
            }
        }
        let rank = self.chi.rank();
        loop {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for i in 0..n {
                let r = find(&mut parent, i);
                groups.entry(r).or_default().push(i);
            }
            let blocks: Vec<Vec<usize>> = groups.into_values().collect();
            match find_crossing(&blocks, &rank) {
                Some((a, b)) => unite(&mut parent, blocks[a][0], blocks[b][0]),
                None => return Ok(Self::new_unchecked(self.chi.clone(), blocks)),
            }
        }
    }

    /// Interior/exterior classification, indexed like [`Self::blocks`].
    pub fn classify_blocks(&self) -> Vec<BlockKind> {
        let rank = self.chi.rank();
        let span: Vec<(usize, usize)> = self
            .blocks
            .iter()
            .map(|b| {
                let lo = b.iter().map(|&i| rank[i]).min().unwrap();
                let hi = b.iter().map(|&i| rank[i]).max().unwrap();
                (lo, hi)
            })
            .collect();
        span.iter()
            .enumerate()
            .map(|(v, &(vlo, vhi))| {
                let nested = span.iter().enumerate().any(|(w, &(wlo, whi))| w != v && wlo < vlo && vhi < whi);
                if nested {
                    BlockKind::Interior
                } else {
                    BlockKind::Exterior
                }
            })
            .collect()
    }

    /// The decomposition into `χ`-intervals whose `≺_χ` extremes share a
    /// block.
    pub fn chi_intervals(&self) -> IntervalDecomposition {
        let order = self.chi.order();
        let rank = self.chi.rank();
        let n = self.n();
        let mut intervals = Vec::new();
        let mut outer = Vec::new();
        let mut r = 0;
        while r < n {
            let b = self.labels[order[r]];
            let hi = self.blocks[b].iter().map(|&i| rank[i]).max().unwrap();
            let mut v: Vec<usize> = order[r..=hi].to_vec();
            v.sort_unstable();
            intervals.push(v);
            outer.push(b);
            r = hi + 1;
        }
        IntervalDecomposition { intervals, outer }
    }

    /// The induced partition on a sorted subset, relabeled to `0..|S|`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in subset.iter().enumerate() {
            if i >= n || pos[i] != usize::MAX {
                return Err(CbfError::Validation("bad subset".into()));
            }
            if k > 0 && subset[k - 1] > i {
                return Err(CbfError::Validation("subset must be ascending".into()));
            }
            pos[i] = k;
        }
        if subset.is_empty() {
            return Err(CbfError::Validation("empty subset".into()));
        }
        let blocks: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| b.iter().filter(|&&i| pos[i] != usize::MAX).map(|&i| pos[i]).collect())
            .collect();
        Ok(Self::new_unchecked(self.chi.restrict(subset), blocks))
    }

    /// `π|_{q=q+1}` for 0-based `q`: identify `q` and `q+1`, then drop `q`.
    pub fn merge_adjacent(&self, q: usize) -> Result<Self> {
        let n = self.n();
        if q + 1 >= n {
            return Err(CbfError::Validation("q must be below n".into()));
        }
        if self.chi.face(q) != self.chi.face(q + 1) {
            return Err(CbfError::Face(format!("positions {} and {} have different faces", q + 1, q + 2)));
        }
        let (a, b) = (self.labels[q], self.labels[q + 1]);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut merged: Vec<usize> = Vec::new();
        for (k, blk) in self.blocks.iter().enumerate() {
            if k == a || k == b {
                merged.extend(blk.iter().copied());
            } else {
                blocks.push(blk.clone());
            }
        }
        blocks.push(merged);
        let shift = |i: usize| if i > q { i - 1 } else { i };
        let blocks = blocks
            .into_iter()
            .map(|b| b.into_iter().filter(|&i| i != q).map(shift).collect())
            .collect();
        Ok(Self::new_unchecked(self.chi.remove(q)?, blocks))
    }
}

/// The `n`-th Catalan number.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// Non-crossing partitions of `lo..hi` (as lists of blocks).
fn nc_range(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo == hi {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Vec<Vec<Vec<usize>>>)> = vec![(vec![lo], vec![Vec::new()])];
    while let Some((block, inner)) = stack.pop() {
        let last = *block.last().unwrap();
        let tails = nc_range(last + 1, hi);
        for p in &inner {
            for t in &tails {
                let mut part = Vec::with_capacity(1 + p.len() + t.len());
                part.push(block.clone());
                part.extend(p.iter().cloned());
                part.extend(t.iter().cloned());
                out.push(part);
            }
        }
        for y in last + 1..hi {
            let gaps = nc_range(last + 1, y);
            let mut next_inner = Vec::with_capacity(inner.len() * gaps.len());
            for p in &inner {
                for g in &gaps {
                    let mut q = p.clone();
                    q.extend(g.iter().cloned());
                    next_inner.push(q);
                }
            }
            let mut nb = block.clone();
            nb.push(y);
            stack.push((nb, next_inner));
        }
    }
    out
}

/// All of `BNC(χ)` in canonical (lexicographic block) order.
pub fn enumerate_bnc(chi: &Chi, max_n: usize) -> Result<Vec<BncPartition>> {
    let n = chi.len();
    if n > max_n {
        return Err(CbfError::SizeLimit { n, limit: max_n });
    }
    let order = chi.order();
    let mut v: Vec<BncPartition> = nc_range(0, n)
        .into_iter()
        .map(|p| {
            let blocks = p.into_iter().map(|b| b.into_iter().map(|r| order[r]).collect()).collect();
            BncPartition::new_unchecked(chi.clone(), blocks)
        })
        .collect();
    v.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(v)
}

/// `BNC(χ)` with its order relation and Möbius function.
#[derive(Clone, Debug)]
pub struct Lattice {
    chi: Chi,
    elems: Vec<BncPartition>,
    index: BTreeMap<Vec<usize>, usize>,
    top: usize,
    bottom: usize,
}

impl Lattice {
    /// Enumerates `BNC(χ)`.
    pub fn new(chi: &Chi, max_n: usize) -> Result<Self> {
        let elems = enumerate_bnc(chi, max_n)?;
        let index: BTreeMap<Vec<usize>, usize> = elems.iter().enumerate().map(|(k, p)| (p.labels.clone(), k)).collect();
        let top = elems.iter().position(|p| p.is_one()).unwrap();
        let bottom = elems.iter().position(|p| p.len() == chi.len()).unwrap();
        Ok(Lattice { chi: chi.clone(), elems, index, top, bottom })
    }

    /// The face word.
    pub fn chi(&self) -> &Chi {
        &self.chi
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> &[BncPartition] {
        &self.elems
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of `1_χ`.
    pub fn top(&self) -> usize {
        self.top
    }

    /// Index of `0_χ`.
    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Index of a partition.
    pub fn index_of(&self, p: &BncPartition) -> Option<usize> {
        if p.chi != self.chi {
            return None;
        }
        self.index.get(&p.labels).copied()
    }

    /// `μ(σ, π)` for every `σ ≤ π`, as `(index of σ, value)` pairs.
    pub fn mobius_down(&self, pi: usize) -> Vec<(usize, i64)> {
        let p = &self.elems[pi];
        let mut down: Vec<usize> = (0..self.elems.len()).filter(|&s| self.elems[s].leq_unchecked(p)).collect();
        down.sort_by_key(|&s| (self.elems[s].len(), s));
        let mut mu: Vec<(usize, i64)> = Vec::with_capacity(down.len());
        for &s in &down {
            if s == pi {
                mu.push((s, 1));
                continue;
            }
            let sig = &self.elems[s];
            let mut acc = 0i64;
            for &(t, m) in &mu {
                if sig.leq_unchecked(&self.elems[t]) {
                    acc += m;
                }
            }
            mu.push((s, -acc));
        }
        mu
    }

    /// `μ(σ, π)` for every `σ ≥ σ0`, as `(index of π, value)` pairs.
    pub fn mobius_up(&self, sigma: usize) -> Vec<(usize, i64)> {
        let s = &self.elems[sigma];
        let mut up: Vec<usize> = (0..self.elems.len()).filter(|&t| s.leq_unchecked(&self.elems[t])).collect();
        up.sort_by_key(|&t| (core::cmp::Reverse(self.elems[t].len()), t));
        let mut mu: Vec<(usize, i64)> = Vec::with_capacity(up.len());
        for &t in &up {
            if t == sigma {
                mu.push((t, 1));
                continue;
            }
            let tp = &self.elems[t];
            let mut acc = 0i64;
            for &(u, m) in &mu {
                if self.elems[u].leq_unchecked(tp) {
                    acc += m;
                }
            }
            mu.push((t, -acc));
        }
        mu
    }

    /// `μ_BNC(σ, π)`.
    pub fn mobius(&self, sigma: &BncPartition, pi: &BncPartition) -> Result<i64> {
        let (s, p) = match (self.index_of(sigma), self.index_of(pi)) {
            (Some(s), Some(p)) => (s, p),
            _ => return Err(CbfError::Validation("partition not in this lattice".into())),
        };
        if !sigma.leq_unchecked(pi) {
            return Err(CbfError::NotComparable);
        }
        Ok(self.mobius_down(p).into_iter().find(|&(x, _)| x == s).map(|(_, m)| m).unwrap_or(0))
    }
}

/// `μ_BNC(σ, π)` computed on a fresh lattice.
pub fn mobius_bnc(sigma: &BncPartition, pi: &BncPartition, max_n: usize) -> Result<i64> {
    if sigma.chi != pi.chi {
        return Err(CbfError::Validation("partitions over different face words".into()));
    }
    Lattice::new(&sigma.chi, max_n)?.mobius(sigma, pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_example() {
        let chi = Chi::parse("lrlr").unwrap();
        assert_eq!(chi.order(), vec![0, 2, 3, 1]);
    }

    #[test]
    fn catalan_values() {
        assert_eq!((0..8).map(catalan).collect::<Vec<_>>(), vec![1, 1, 2, 5, 14, 42, 132, 429]);
    }

    #[test]
    fn merge_rules() {
        let chi = Chi::parse("llll").unwrap();
        let p = BncPartition::from_one_based(chi.clone(), &[vec![1, 2], vec![3], vec![4]]).unwrap();
        let m = p.merge_adjacent(0).unwrap();
        assert_eq!(m.to_one_based(), vec![vec![1], vec![2], vec![3]]);
        let m = p.merge_adjacent(1).unwrap();
        assert_eq!(m.to_one_based(), vec![vec![1, 2], vec![3]]);
        let chi2 = Chi::parse("lrll").unwrap();
        let p2 = BncPartition::zero(&chi2);
        assert!(matches!(p2.merge_adjacent(0), Err(CbfError::Face(_))));
    }
}
