//! Block sets and t-designs: construction (Golay heptads, PG(3,2) triples,
//! pair sets), certification of design strength and intersection numbers,
//! derived/residual designs, block-graph SRG parameters, and the Calderbank
//! divisibility filters.

use crate::exactarith::Rat;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("invalid block set: {0}")]
    InvalidBlockSet(String),
    #[error("point {0} out of range (point count {1})")]
    PointOutOfRange(usize, usize),
    #[error("not a {t}-design: {witness}")]
    NotADesign { t: usize, witness: String },
    #[error("not quasi-symmetric: intersection numbers {0:?}")]
    NotQuasiSymmetric(Vec<usize>),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A simple family of k-subsets ("blocks") of the point set {0, .., d−1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSet {
    point_count: usize,
    block_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockSet {
    /// Validates uniform block size, range, and simplicity; blocks are stored
    /// sorted (each block ascending, family lexicographic).
    pub fn new(point_count: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, DesignError> {
        if blocks.is_empty() {
            return Err(DesignError::InvalidBlockSet("no blocks".into()));
        }
        for b in blocks.iter_mut() {
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(DesignError::InvalidBlockSet(format!(
                    "repeated point in block {b:?}"
                )));
            }
            if let Some(&p) = b.iter().find(|&&p| p >= point_count) {
                return Err(DesignError::PointOutOfRange(p, point_count));
            }
        }
        let block_size = blocks[0].len();
        if blocks.iter().any(|b| b.len() != block_size) {
            return Err(DesignError::InvalidBlockSet("non-uniform block size".into()));
        }
        blocks.sort();
        if blocks.windows(2).any(|w| w[0] == w[1]) {
            return Err(DesignError::InvalidBlockSet("repeated block".into()));
        }
        Ok(BlockSet { point_count, block_size, blocks })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Sorted list of distinct pairwise intersection sizes, largest first.
    pub fn intersection_numbers(&self) -> Vec<usize> {
        let masks = self.block_masks();
        let mut seen = BTreeSet::new();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                seen.insert(mask_intersection(&masks[i], &masks[j]));
            }
        }
        let mut v: Vec<usize> = seen.into_iter().collect();
        v.reverse();
        v
    }

    /// Complementary block set: each block replaced by its complement in P.
    pub fn complement(&self) -> Result<BlockSet, DesignError> {
        let all: BTreeSet<usize> = (0..self.point_count).collect();
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let bs: BTreeSet<usize> = b.iter().copied().collect();
                all.difference(&bs).copied().collect()
            })
            .collect();
        BlockSet::new(self.point_count, blocks)
    }

    pub(crate) fn block_masks(&self) -> Vec<Vec<u64>> {
        let words = self.point_count.div_ceil(64);
        self.blocks
            .iter()
            .map(|b| {
                let mut m = vec![0u64; words];
                for &p in b {
                    m[p / 64] |= 1 << (p % 64);
                }
                m
            })
            .collect()
    }

    /// Text form: header "d k", then one block per line, ascending indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.point_count, self.block_size);
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(s: &str) -> Result<Self, DesignError> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| DesignError::Parse("empty input".into()))?;
        let mut hp = header.split_whitespace();
        let d: usize = hp
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| DesignError::Parse("bad header".into()))?;
        let k: usize = hp
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| DesignError::Parse("bad header".into()))?;
        let mut blocks = Vec::new();
        for line in lines {
            let b: Result<Vec<usize>, _> =
                line.split_whitespace().map(|t| t.parse::<usize>()).collect();
            let b = b.map_err(|e| DesignError::Parse(e.to_string()))?;
            blocks.push(b);
        }
        let bs = BlockSet::new(d, blocks)?;
        if bs.block_size != k {
            return Err(DesignError::Parse(format!(
                "header block size {k} does not match blocks ({})",
                bs.block_size
            )));
        }
        Ok(bs)
    }
}

fn mask_intersection(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

// ---------------------------------------------------------------------------
// constructions

/// The 253 heptads of the S(4,7,23) Steiner system, realized as the supports
/// of the weight-7 codewords of the binary [23,12,7] quadratic-residue (Golay)
/// code. The generator polynomial is recovered by factoring x²³+1 over GF(2),
/// so the construction is deterministic and self-contained.
pub fn golay_heptads() -> BlockSet {
    let target: u32 = (1 << 23) | 1; // x^23 + 1
    let mut divisors = Vec::new();
    for mid in 0u32..(1 << 10) {
        let g = (1 << 11) | (mid << 1) | 1;
        if gf2_rem(target, g) == 0 {
            divisors.push(g);
        }
    }
    debug_assert_eq!(divisors.len(), 2);
    let gen = *divisors.iter().min().expect("x^23+1 has two degree-11 factors");
    let mut blocks = Vec::new();
    for msg in 0u32..(1 << 12) {
        let word = gf2_mul(msg, gen);
        if word.count_ones() == 7 {
            blocks.push((0..23).filter(|i| word >> i & 1 == 1).collect());
        }
    }
    BlockSet::new(23, blocks).expect("Golay heptads form a valid block set")
}

fn gf2_rem(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

fn gf2_mul(a: u32, b: u32) -> u32 {
    let mut r = 0u32;
    for i in 0..32 {
        if a >> i & 1 == 1 {
            r ^= b << i;
        }
    }
    r
}

/// All 2-subsets of {0, .., d−1}.
pub fn pair_blockset(d: usize) -> Result<BlockSet, DesignError> {
    if d < 2 {
        return Err(DesignError::InvalidBlockSet(format!("need d >= 2, got {d}")));
    }
    let mut blocks = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            blocks.push(vec![i, j]);
        }
    }
    BlockSet::new(d, blocks)
}

/// The 35 lines of PG(3,2): triples {a, b, a⊕b} over the nonzero vectors of
/// GF(2)⁴, relabelled to points 0..14. A Steiner triple system of order 15.
pub fn pg32_sts15() -> BlockSet {
    let mut blocks = BTreeSet::new();
    for a in 1u8..16 {
        for b in a + 1..16 {
            let c = a ^ b;
            if c > b {
                blocks.insert(vec![a as usize - 1, b as usize - 1, c as usize - 1]);
            }
        }
    }
    BlockSet::new(15, blocks.into_iter().collect()).expect("PG(3,2) lines are a valid block set")
}

/// The unique 2-(6,3,2) quasi-symmetric design (intersection numbers 2,1),
/// found as the lexicographically least family of ten triples covering every
/// pair exactly twice.
pub fn qs_6_3_2() -> BlockSet {
    let triples: Vec<Vec<usize>> = {
        let mut v = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    v.push(vec![a, b, c]);
                }
            }
        }
        v
    };
    fn pair_idx(a: usize, b: usize) -> usize {
        // 0 <= a < b < 6
        a * 6 + b
    }
    fn search(
        triples: &[Vec<usize>],
        start: usize,
        chosen: &mut Vec<usize>,
        cover: &mut [u8],
    ) -> bool {
        if chosen.len() == 10 {
            return cover.iter().enumerate().all(|(idx, &c)| {
                let (a, b) = (idx / 6, idx % 6);
                a >= b || c == 2
            });
        }
        for t in start..triples.len() {
            let b = &triples[t];
            let idxs = [
                pair_idx(b[0], b[1]),
                pair_idx(b[0], b[2]),
                pair_idx(b[1], b[2]),
            ];
            if idxs.iter().any(|&i| cover[i] >= 2) {
                continue;
            }
            for &i in &idxs {
                cover[i] += 1;
            }
            chosen.push(t);
            if search(triples, t + 1, chosen, cover) {
                return true;
            }
            chosen.pop();
            for &i in &idxs {
                cover[i] -= 1;
            }
        }
        false
    }
    let mut chosen = Vec::new();
    let mut cover = [0u8; 36];
    let ok = search(&triples, 0, &mut chosen, &mut cover);
    assert!(ok, "2-(6,3,2) design search must succeed");
    let blocks = chosen.into_iter().map(|t| triples[t].clone()).collect();
    BlockSet::new(6, blocks).expect("2-(6,3,2) blocks are valid")
}

// ---------------------------------------------------------------------------
// certification

/// Certificate for a t-(d,k,λ) design: the maximal verified strength, the
/// index λ at that strength, block count b, replication r, the full λ_j
/// ladder, and the distinct pairwise intersection sizes (largest first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignCertificate {
    pub strength: usize,
    pub lambda: u64,
    pub b: u64,
    pub r: u64,
    pub lambda_j: Vec<u64>,
    pub intersection_numbers: Vec<usize>,
}

impl DesignCertificate {
    pub fn is_quasi_symmetric(&self) -> bool {
        self.intersection_numbers.len() == 2
    }

    /// (s₁, s₂) with s₁ > s₂, when quasi-symmetric.
    pub fn s_pair(&self) -> Option<(usize, usize)> {
        if self.is_quasi_symmetric() {
            Some((self.intersection_numbers[0], self.intersection_numbers[1]))
        } else {
            None
        }
    }
}

/// Counts, for each j-subset of points, the number of blocks containing it;
/// returns λ_j when that count is constant.
fn lambda_at(bs: &BlockSet, j: usize) -> Option<u64> {
    if j == 0 {
        return Some(bs.block_count() as u64);
    }
    if j > bs.block_size {
        return None;
    }
    let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    for b in &bs.blocks {
        for sub in subsets(b, j) {
            *counts.entry(sub).or_insert(0) += 1;
        }
    }
    let total = binom(bs.point_count, j);
    if counts.len() as u64 != total {
        return None; // some j-set is uncovered
    }
    let lam = *counts.values().next()?;
    counts.values().all(|&c| c == lam).then_some(lam)
}

fn subsets(items: &[usize], j: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..j).collect();
    if j > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = j;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - j {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for l in i + 1..j {
            idx[l] = idx[l - 1] + 1;
        }
    }
}

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Verifies that `bs` is a t-design for the requested strength, then pushes
/// the strength as far as it goes (bounded by the block size) and reports the
/// certificate at the maximal verified strength.
pub fn certify_design(bs: &BlockSet, t: usize) -> Result<DesignCertificate, DesignError> {
    if t > bs.block_size {
        return Err(DesignError::NotApplicable(format!(
            "strength {t} exceeds block size {}",
            bs.block_size
        )));
    }
    if lambda_at(bs, t).is_none() {
        return Err(DesignError::NotADesign { t, witness: "uneven t-set coverage".into() });
    }
    let mut strength = t;
    while strength < bs.block_size {
        if lambda_at(bs, strength + 1).is_some() {
            strength += 1;
        } else {
            break;
        }
    }
    let mut lambda_j = Vec::with_capacity(strength + 1);
    for j in 0..=strength {
        let lam = lambda_at(bs, j).ok_or(DesignError::NotADesign {
            t: j,
            witness: "lower strength failed".into(),
        })?;
        lambda_j.push(lam);
    }
    Ok(DesignCertificate {
        strength,
        lambda: lambda_j[strength],
        b: lambda_j[0],
        r: if strength >= 1 { lambda_j[1] } else { lambda_j[0] },
        lambda_j,
        intersection_numbers: bs.intersection_numbers(),
    })
}

/// Blocks through p, with p removed; points relabelled to {0, .., d−2}.
pub fn derived_design(bs: &BlockSet, p: usize) -> Result<BlockSet, DesignError> {
    if p >= bs.point_count {
        return Err(DesignError::PointOutOfRange(p, bs.point_count));
    }
    let blocks: Vec<Vec<usize>> = bs
        .blocks
        .iter()
        .filter(|b| b.contains(&p))
        .map(|b| b.iter().filter(|&&q| q != p).map(|&q| relabel(q, p)).collect())
        .collect();
    BlockSet::new(bs.point_count - 1, blocks)
}

/// Blocks avoiding p; points relabelled to {0, .., d−2}.
pub fn residual_design(bs: &BlockSet, p: usize) -> Result<BlockSet, DesignError> {
    if p >= bs.point_count {
        return Err(DesignError::PointOutOfRange(p, bs.point_count));
    }
    let blocks: Vec<Vec<usize>> = bs
        .blocks
        .iter()
        .filter(|b| !b.contains(&p))
        .map(|b| b.iter().map(|&q| relabel(q, p)).collect())
        .collect();
    BlockSet::new(bs.point_count - 1, blocks)
}

fn relabel(q: usize, removed: usize) -> usize {
    if q > removed {
        q - 1
    } else {
        q
    }
}

// ---------------------------------------------------------------------------
// block graph

/// Strongly-regular parameters of the block graph of a quasi-symmetric
/// design (adjacency: intersection of size s₁), both from the eigenvalue
/// formulas and verified against the constructed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGraphSrg {
    pub vertices: u64,
    pub valency: u64,
    pub lambda_common: u64,
    pub mu_common: u64,
    pub eigenvalues: (Rat, Rat, Rat),
    pub connected: bool,
}

pub fn block_graph_srg(bs: &BlockSet) -> Result<BlockGraphSrg, DesignError> {
    let cert = certify_design(bs, 2)?;
    let (s1, s2) = cert
        .s_pair()
        .ok_or_else(|| DesignError::NotQuasiSymmetric(cert.intersection_numbers.clone()))?;
    if s1 >= bs.block_size {
        return Err(DesignError::NotApplicable("s1 must be < k".into()));
    }
    // θ formulas use the 2-design index, whatever the full strength is
    let (k, b, r, lam) =
        (bs.block_size as i64, cert.b as i64, cert.r as i64, cert.lambda_j[2] as i64);
    let (s1i, s2i) = (s1 as i64, s2 as i64);
    let theta0 = ratio_i(k * (r - 1) - (b - 1) * s2i, s1i - s2i);
    let theta1 = ratio_i((r - lam) - (k - s2i), s1i - s2i);
    let theta2 = ratio_i(-(k - s2i), s1i - s2i);
    let t = theta0.clone();
    let p = &theta0 + &theta1 + &theta2 + &theta1 * &theta2;
    let q = &theta0 + &theta1 * &theta2;

    // build the graph and verify
    let masks = bs.block_masks();
    let n = masks.len();
    let words = n.div_ceil(64);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in i + 1..n {
            if mask_intersection(&masks[i], &masks[j]) == s1 {
                adj[i][j / 64] |= 1 << (j % 64);
                adj[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let degree_of = |i: usize| -> u64 { adj[i].iter().map(|w| w.count_ones() as u64).sum() };
    let expect_t = rat_to_u64(&t).ok_or_else(|| DesignError::NotApplicable("non-integral valency".into()))?;
    for i in 0..n {
        if degree_of(i) != expect_t {
            return Err(DesignError::NotADesign {
                t: 2,
                witness: format!("block graph valency mismatch at {i}"),
            });
        }
    }
    let common = |i: usize, j: usize| -> u64 {
        adj[i].iter().zip(&adj[j]).map(|(x, y)| (x & y).count_ones() as u64).sum()
    };
    let (mut pv, mut qv) = (None, None);
    for i in 0..n {
        for j in i + 1..n {
            let c = common(i, j);
            let is_adj = adj[i][j / 64] >> (j % 64) & 1 == 1;
            let slot = if is_adj { &mut pv } else { &mut qv };
            match slot {
                None => *slot = Some(c),
                Some(v) if *v != c => {
                    return Err(DesignError::NotADesign {
                        t: 2,
                        witness: format!("common-neighbour count not constant at ({i},{j})"),
                    })
                }
                _ => {}
            }
        }
    }
    let lambda_common = pv.unwrap_or(0);
    let mu_common = qv.unwrap_or(0);
    if Some(lambda_common) != rat_to_u64(&p) || Some(mu_common) != rat_to_u64(&q) {
        return Err(DesignError::NotADesign {
            t: 2,
            witness: "eigenvalue formulas disagree with the constructed graph".into(),
        });
    }

    // connectivity (guaranteed when s1 < k)
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for u in 0..n {
            if !seen[u] && adj[v][u / 64] >> (u % 64) & 1 == 1 {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    Ok(BlockGraphSrg {
        vertices: n as u64,
        valency: expect_t,
        lambda_common,
        mu_common,
        eigenvalues: (theta0, theta1, theta2),
        connected: seen.iter().all(|&s| s),
    })
}

fn ratio_i(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn rat_to_u64(r: &Rat) -> Option<u64> {
    if crate::exactarith::is_integer(r) {
        u64::try_from(r.numer().clone()).ok()
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Calderbank conditions

/// (n−1)(n−2)xy − k(n−k)(n−2)(x+y) + k(n−k)(k(n−k)−1); non-negative for every
/// quasi-symmetric 2-design with intersection numbers k−x, k−y, and zero
/// exactly for 3-designs.
pub fn calderbank_f(n: i128, k: i128, x: i128, y: i128) -> i128 {
    let knk = k * (n - k);
    (n - 1) * (n - 2) * x * y - knk * (n - 2) * (x + y) + knk * (knk - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParityVerdict {
    /// One of the three congruence cases holds (case index 1..3).
    Pass(u8),
    /// All cases fail: no design with these parameters exists.
    Fail,
    /// Intersection numbers are not all congruent mod 2.
    NotApplicable,
}

/// Calderbank's mod-2 test for a 2-(v,k,λ) design whose intersection numbers
/// are all congruent mod 2: either r ≡ λ (mod 4), or s even, k ≡ 0 (mod 4),
/// v ≡ ±1 (mod 8), or s odd, k ≡ v (mod 4), v ≡ ±1 (mod 8).
pub fn calderbank_theorem_a(
    v: u64,
    k: u64,
    lambda: u64,
    r: u64,
    intersections: &[usize],
) -> ParityVerdict {
    let Some(&first) = intersections.first() else {
        return ParityVerdict::NotApplicable;
    };
    let s = first % 2;
    if intersections.iter().any(|&x| x % 2 != s) {
        return ParityVerdict::NotApplicable;
    }
    let vm8 = v % 8;
    if (r as i128 - lambda as i128).rem_euclid(4) == 0 {
        ParityVerdict::Pass(1)
    } else if s == 0 && k % 4 == 0 && (vm8 == 1 || vm8 == 7) {
        ParityVerdict::Pass(2)
    } else if s == 1 && (k as i128 - v as i128).rem_euclid(4) == 0 && (vm8 == 1 || vm8 == 7) {
        ParityVerdict::Pass(3)
    } else {
        ParityVerdict::Fail
    }
}

/// λ_j · C(k−j, t−j) = λ · C(d−j, t−j) for 0 ≤ j ≤ t.
pub fn lambda_identity_holds(cert: &DesignCertificate, d: usize, k: usize) -> bool {
    let t = cert.strength;
    cert.lambda_j.iter().enumerate().all(|(j, &lj)| {
        let lhs = lj as u128 * binom(k - j, t - j) as u128;
        let rhs = cert.lambda as u128 * binom(d - j, t - j) as u128;
        lhs == rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golay_block_count_and_intersections() {
        let g = golay_heptads();
        assert_eq!(g.block_count(), 253);
        assert_eq!(g.block_size(), 7);
        assert_eq!(g.intersection_numbers(), vec![3, 1]);
    }

    #[test]
    fn golay_is_a_4_design() {
        let g = golay_heptads();
        let cert = certify_design(&g, 4).unwrap();
        assert_eq!(cert.strength, 4); // not a 5-design
        assert_eq!(cert.lambda, 1);
        assert_eq!(cert.b, 253);
        assert_eq!(cert.r, 77);
        assert!(cert.is_quasi_symmetric());
        assert!(lambda_identity_holds(&cert, 23, 7));
        assert_eq!(cert.lambda_j, vec![253, 77, 21, 5, 1]);
    }

    #[test]
    fn pair_blocksets() {
        assert_eq!(pair_blockset(7).unwrap().block_count(), 21);
        assert_eq!(pair_blockset(4).unwrap().block_count(), 6);
        let d2 = pair_blockset(2).unwrap();
        assert_eq!(d2.block_count(), 1);
        let cert = certify_design(&d2, 2).unwrap();
        assert!(!cert.is_quasi_symmetric()); // only one block, no intersections
        assert!(pair_blockset(1).is_err());
    }

    #[test]
    fn pairs7_certificate() {
        let cert = certify_design(&pair_blockset(7).unwrap(), 2).unwrap();
        assert_eq!(cert.strength, 2);
        assert_eq!(cert.lambda, 1);
        assert_eq!(cert.s_pair(), Some((1, 0)));
    }

    #[test]
    fn sts15_is_pg32() {
        let s = pg32_sts15();
        assert_eq!(s.block_count(), 35);
        let cert = certify_design(&s, 2).unwrap();
        assert_eq!(cert.strength, 2);
        assert_eq!(cert.lambda, 1);
        assert_eq!(cert.s_pair(), Some((1, 0)));
    }

    #[test]
    fn qs632_certificate() {
        let d = qs_6_3_2();
        assert_eq!(d.block_count(), 10);
        let cert = certify_design(&d, 2).unwrap();
        assert_eq!(cert.strength, 2);
        assert_eq!(cert.lambda, 2);
        assert_eq!(cert.r, 5);
        assert_eq!(cert.s_pair(), Some((2, 1)));
    }

    #[test]
    fn golay_derived_and_residual() {
        let g = golay_heptads();
        let der = derived_design(&g, 0).unwrap();
        assert_eq!(der.block_count(), 77);
        let dc = certify_design(&der, 3).unwrap();
        assert_eq!((dc.strength, dc.lambda), (3, 1)); // 3-(22,6,1)
        let res = residual_design(&g, 0).unwrap();
        assert_eq!(res.block_count(), 176);
        let rc = certify_design(&res, 3).unwrap();
        assert_eq!((rc.strength, rc.lambda), (3, 4)); // 3-(22,7,4)
        assert_eq!(rc.s_pair(), Some((3, 1)));
        assert_eq!(der.block_count() + res.block_count(), g.block_count());
    }

    #[test]
    fn pairs_derived_and_residual() {
        let p4 = pair_blockset(4).unwrap();
        let der = derived_design(&p4, 2).unwrap();
        assert_eq!(der.block_count(), 3);
        assert_eq!(der.block_size(), 1);
        let p3 = pair_blockset(3).unwrap();
        assert_eq!(residual_design(&p3, 1).unwrap().block_count(), 1);
        assert!(derived_design(&p3, 5).is_err());
    }

    #[test]
    fn golay_block_graph() {
        let srg = block_graph_srg(&golay_heptads()).unwrap();
        assert_eq!(
            (srg.vertices, srg.valency, srg.lambda_common, srg.mu_common),
            (253, 140, 87, 65)
        );
        assert!(srg.connected);
    }

    #[test]
    fn pairs7_block_graph_is_t7() {
        let srg = block_graph_srg(&pair_blockset(7).unwrap()).unwrap();
        assert_eq!(
            (srg.vertices, srg.valency, srg.lambda_common, srg.mu_common),
            (21, 10, 5, 4)
        );
        assert!(srg.connected);
    }

    #[test]
    fn qs632_block_graph_is_petersen() {
        let srg = block_graph_srg(&qs_6_3_2()).unwrap();
        assert_eq!(
            (srg.vertices, srg.valency, srg.lambda_common, srg.mu_common),
            (10, 3, 0, 1)
        );
        assert!(srg.connected);
    }

    #[test]
    fn calderbank_f_values() {
        assert_eq!(calderbank_f(23, 7, 4, 6), 0);
        // (ρ²−1)²(ρ²−d−2)/16 at ρ=29, d=839 is 0; check f at the matching point
        let (d, rho) = (839i128, 29i128);
        let k = 343i128;
        let x = (rho - 1) * (rho - 1) / 4;
        let y = (rho * rho - 1) / 4;
        assert_eq!(calderbank_f(d, k, x, y), (rho * rho - 1).pow(2) * (rho * rho - d - 2) / 16);
    }

    #[test]
    fn calderbank_parity_cases() {
        // S(4,7,23): s odd, r−λ = 56 ≡ 0 (mod 4)
        assert_eq!(calderbank_theorem_a(23, 7, 21, 77, &[3, 1]), ParityVerdict::Pass(1));
        // (20,10,18;6,4) passes case 1 (the mod-2 test alone does not kill it)
        assert_eq!(calderbank_theorem_a(20, 10, 18, 38, &[6, 4]), ParityVerdict::Pass(1));
        // (21,8,14;4,2): r=40, r−λ=26, k≡0 mod 4 but v=21≡5 mod 8 → Fail
        assert_eq!(calderbank_theorem_a(21, 8, 14, 40, &[4, 2]), ParityVerdict::Fail);
        // opposite parity
        assert_eq!(calderbank_theorem_a(43, 18, 51, 119, &[3, 2]), ParityVerdict::NotApplicable);
    }

    #[test]
    fn complement_roundtrip() {
        let g = golay_heptads();
        let c = g.complement().unwrap();
        assert_eq!(c.block_size(), 16);
        assert_eq!(c.intersection_numbers(), vec![12, 10]);
        assert_eq!(c.complement().unwrap(), g);
    }

    #[test]
    fn text_roundtrip() {
        let g = pg32_sts15();
        let text = g.to_text();
        let back = BlockSet::from_text(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
    }
}
