//! Two-graphs: coherent-triple structures from graphs or sign matrices,
//! regularity parameters (n, a, b), complements, switching, and the 2-design
//! structures living on coherent 4-sets and on the sets S_{αβ}.
//!
//! Coherent-triple membership is a bit table indexed by the colex rank of the
//! triple, so membership tests inside the counting loops are O(1). 276 points
//! (about 3.5 million triples) fit comfortably.

use rayon::prelude::*;

/// Simple undirected graph on {0, .., n−1} with bitset adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u64>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![vec![0u64; n.div_ceil(64)]; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.adj[i][j / 64] |= 1 << (j % 64);
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.adj[u][v / 64] |= 1 << (v % 64);
        self.adj[v][u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u][v / 64] >> (v % 64) & 1 == 1
    }

    /// Switching with respect to X: edges and non-edges between X and its
    /// complement are interchanged; everything else is untouched.
    pub fn switch(&self, x: &[usize]) -> Graph {
        let mut in_x = vec![false; self.n];
        for &v in x {
            in_x[v] = true;
        }
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                let crosses = in_x[u] != in_x[v];
                if self.has_edge(u, v) != crosses {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

/// Colex rank of i < j < k among all 3-subsets.
#[inline]
fn triple_rank(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    k * (k - 1) * (k - 2) / 6 + j * (j - 1) / 2 + i
}

/// A two-graph: a set of coherent 3-subsets of {0, .., n−1} such that every
/// 4-subset contains an even number of them.
#[derive(Clone, PartialEq, Eq)]
pub struct TwoGraph {
    n: usize,
    bits: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityParams {
    pub n: usize,
    /// coherent triples through each pair
    pub a: usize,
    /// coherent 4-sets over each coherent triple
    pub b: usize,
}

impl RegularityParams {
    /// Parameters (a*, b*) of the complementary two-graph. b* = n/2 − b − 3 is
    /// integral only for even n; the flag records integrality.
    pub fn complement_params(&self) -> (crate::exactarith::Rat, crate::exactarith::Rat, bool) {
        use crate::exactarith::{rat, ratio};
        let a_star = rat(self.n as i64 - self.a as i64 - 2);
        let b_star = ratio(self.n as i64, 2) - rat(self.b as i64 + 3);
        let integral = self.n % 2 == 0;
        (a_star, b_star, integral)
    }
}

/// Why a two-graph failed the regularity check, with the lexicographically
/// first offending pair or triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular(RegularityParams),
    NotRegular {
        witness_pair: Option<(usize, usize, usize, usize)>, // (i, j, count, expected)
        witness_triple: Option<((usize, usize, usize), usize, usize)>,
    },
}

impl Regularity {
    pub fn params(&self) -> Option<&RegularityParams> {
        match self {
            Regularity::Regular(p) => Some(p),
            Regularity::NotRegular { .. } => None,
        }
    }
}

impl TwoGraph {
    fn with_capacity(n: usize) -> Self {
        let triples = n * (n.saturating_sub(1)) * (n.saturating_sub(2)) / 6;
        TwoGraph { n, bits: vec![0u64; triples.div_ceil(64)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coherent(&self, mut i: usize, mut j: usize, mut k: usize) -> bool {
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        if j > k {
            std::mem::swap(&mut j, &mut k);
        }
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let r = triple_rank(i, j, k);
        self.bits[r / 64] >> (r % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, k: usize) {
        let r = triple_rank(i, j, k);
        self.bits[r / 64] |= 1 << (r % 64);
    }

    /// Coherent triples = vertex triples spanning an odd number of edges.
    pub fn from_graph(g: &Graph) -> TwoGraph {
        let n = g.n();
        let mut t = TwoGraph::with_capacity(n);
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    let e = g.has_edge(i, j) as u8 + g.has_edge(i, k) as u8 + g.has_edge(j, k) as u8;
                    if e % 2 == 1 {
                        t.set(i, j, k);
                    }
                }
            }
        }
        t
    }

    /// Coherent triples = triples whose product of pairwise signs is negative.
    /// `sign(i, j)` must be ±1 for i ≠ j.
    pub fn from_sign_matrix(n: usize, sign: impl Fn(usize, usize) -> i8) -> TwoGraph {
        let mut t = TwoGraph::with_capacity(n);
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    if sign(i, j) * sign(i, k) * sign(j, k) < 0 {
                        t.set(i, j, k);
                    }
                }
            }
        }
        t
    }

    pub fn complement(&self) -> TwoGraph {
        let mut t = self.clone();
        let triples = self.n * (self.n - 1) * (self.n - 2) / 6;
        for w in t.bits.iter_mut() {
            *w = !*w;
        }
        // clear slack bits past the last triple
        if triples % 64 != 0 {
            let last = t.bits.len() - 1;
            t.bits[last] &= (1u64 << (triples % 64)) - 1;
        }
        t
    }

    pub fn coherent_triple_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Checks the defining axiom: every 4-subset contains an even number of
    /// coherent triples. Exhaustive; O(n⁴).
    pub fn axiom_holds(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let count = self.coherent(a, b, c) as u8
                            + self.coherent(a, b, d) as u8
                            + self.coherent(a, c, d) as u8
                            + self.coherent(b, c, d) as u8;
                        if count % 2 == 1 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// S_{αβ}: the coherent completions of the pair, as a sorted index list.
    pub fn s_set(&self, alpha: usize, beta: usize) -> Vec<usize> {
        assert!(alpha != beta);
        (0..self.n)
            .filter(|&g| g != alpha && g != beta && self.coherent(alpha, beta, g))
            .collect()
    }

    fn pair_count(&self, i: usize, j: usize) -> usize {
        (0..self.n).filter(|&k| k != i && k != j && self.coherent(i, j, k)).count()
    }

    /// Verifies a constant over all pairs and b constant over all coherent
    /// triples; otherwise returns the lexicographically first witness.
    pub fn regularity(&self) -> Regularity {
        let n = self.n;
        if n < 3 {
            return Regularity::NotRegular { witness_pair: None, witness_triple: None };
        }
        let a = self.pair_count(0, 1);
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let bad_pair = pairs
            .par_iter()
            .filter(|&&(i, j)| self.pair_count(i, j) != a)
            .min_by_key(|&&(i, j)| (i, j));
        if let Some(&(i, j)) = bad_pair {
            return Regularity::NotRegular {
                witness_pair: Some((i, j, self.pair_count(i, j), a)),
                witness_triple: None,
            };
        }
        // b: coherent 4-set completions over each coherent triple
        let mut coherent_triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if self.coherent(i, j, k) {
                        coherent_triples.push((i, j, k));
                    }
                }
            }
        }
        let count_b = |&(i, j, k): &(usize, usize, usize)| -> usize {
            (0..n)
                .filter(|&d| {
                    d != i
                        && d != j
                        && d != k
                        && self.coherent(i, j, d)
                        && self.coherent(i, k, d)
                        && self.coherent(j, k, d)
                })
                .count()
        };
        let b = match coherent_triples.first() {
            Some(t) => count_b(t),
            None => {
                // null two-graph: regular with a = 0; b is vacuously 0
                return Regularity::Regular(RegularityParams { n, a: 0, b: 0 });
            }
        };
        let bad_triple = coherent_triples
            .par_iter()
            .filter(|t| count_b(t) != b)
            .min_by_key(|&&t| t);
        if let Some(&t) = bad_triple {
            return Regularity::NotRegular {
                witness_pair: None,
                witness_triple: Some((t, count_b(&t), b)),
            };
        }
        debug_assert_eq!(n, 3 * a - 2 * b, "Taylor's relation n = 3a - 2b");
        Regularity::Regular(RegularityParams { n, a, b })
    }

    /// Verifies by exhaustive counting that the coherent, mixed, and
    /// incoherent 4-sets each form a 2-design on the point set, and returns
    /// (λ₀, λ₁, λ₂). Requires regularity.
    pub fn coherent4_designs(&self) -> Result<(usize, usize, usize), Regularity> {
        let reg = self.regularity();
        let Regularity::Regular(_) = reg else {
            return Err(reg);
        };
        let n = self.n;
        let mut expected: Option<(usize, usize, usize)> = None;
        for p in 0..n {
            for q in p + 1..n {
                let (mut c0, mut c1, mut c2) = (0usize, 0usize, 0usize);
                for x in 0..n {
                    if x == p || x == q {
                        continue;
                    }
                    for y in x + 1..n {
                        if y == p || y == q {
                            continue;
                        }
                        let four = [p, q, x, y];
                        let mut coh = 0u8;
                        for a in 0..4 {
                            for b in a + 1..4 {
                                for c in b + 1..4 {
                                    if self.coherent(four[a], four[b], four[c]) {
                                        coh += 1;
                                    }
                                }
                            }
                        }
                        match coh {
                            4 => c0 += 1,
                            2 => c1 += 1,
                            0 => c2 += 1,
                            _ => unreachable!("two-graph axiom"),
                        }
                    }
                }
                match expected {
                    None => expected = Some((c0, c1, c2)),
                    Some(e) if e != (c0, c1, c2) => {
                        return Err(Regularity::NotRegular {
                            witness_pair: Some((p, q, c0, e.0)),
                            witness_triple: None,
                        })
                    }
                    _ => {}
                }
            }
        }
        Ok(expected.unwrap_or((0, 0, 0)))
    }
}

impl std::fmt::Debug for TwoGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TwoGraph(n={}, coherent={})", self.n, self.coherent_triple_count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::{rat, ratio};

    #[test]
    fn null_and_complete() {
        let null = TwoGraph::from_graph(&Graph::empty(4));
        assert_eq!(null.coherent_triple_count(), 0);
        let complete = TwoGraph::from_graph(&Graph::complete(4));
        assert_eq!(complete.coherent_triple_count(), 4); // every triple spans 3 edges
        assert!(null.axiom_holds() && complete.axiom_holds());
        assert_eq!(null.complement(), complete);
        assert_eq!(complete.complement().complement(), complete);
    }

    #[test]
    fn pentagon_is_not_regular() {
        // Adjacent pairs lie in one coherent triple, non-adjacent pairs in two,
        // so the pentagon's two-graph is not regular; the first offending pair
        // in lexicographic order is (0,2).
        let t = TwoGraph::from_graph(&Graph::cycle(5));
        assert_eq!(t.pair_count(0, 1), 1);
        assert_eq!(t.pair_count(0, 2), 2);
        match t.regularity() {
            Regularity::NotRegular { witness_pair: Some((i, j, got, expected)), .. } => {
                assert_eq!((i, j), (0, 2));
                assert_eq!((got, expected), (2, 1));
            }
            other => panic!("expected a pair witness, got {other:?}"),
        }
    }

    #[test]
    fn complete_two_graph_on_three_points() {
        let t = TwoGraph::from_graph(&Graph::complete(3));
        match t.regularity() {
            Regularity::Regular(p) => assert_eq!((p.n, p.a, p.b), (3, 1, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn switching_identity_and_involution() {
        let mut g = Graph::empty(7);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (5, 6), (2, 6)] {
            g.add_edge(u, v);
        }
        assert_eq!(g.switch(&[]), g);
        let x = [1usize, 3, 6];
        assert_eq!(g.switch(&x).switch(&x), g);
        assert_eq!(TwoGraph::from_graph(&g.switch(&x)), TwoGraph::from_graph(&g));
    }

    #[test]
    fn complement_parameter_formulas() {
        let p = RegularityParams { n: 276, a: 112, b: 30 };
        let (a_star, b_star, integral) = p.complement_params();
        assert_eq!(a_star, rat(162));
        // 138 − 30 − 3; Taylor's relation confirms: 276 = 3·162 − 2·105
        assert_eq!(b_star, rat(105));
        assert!(integral);
        let odd = RegularityParams { n: 3, a: 1, b: 0 };
        let (_, b_star, integral) = odd.complement_params();
        assert_eq!(b_star, ratio(-3, 2));
        assert!(!integral);
    }

    #[test]
    fn axiom_fails_for_a_non_two_graph() {
        // a single "coherent" triple on 4 points violates the axiom
        let mut t = TwoGraph::with_capacity(4);
        t.set(0, 1, 2);
        assert!(!t.axiom_holds());
    }
}
