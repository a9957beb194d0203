//! Equiangular line systems with exact certificates.
//!
//! Representative vectors are kept at integer (or at least uniform) scale:
//! every certificate below is scale-free, comparing `(vᵢ,vⱼ)·ρ = ±‖v‖²`
//! exactly instead of normalizing to unit vectors. A system may carry a
//! non-standard inner product (a rational Gram form), which is how the
//! basis-coordinate representation of the 276 lines works.
//!
//! Alongside the constructions this module certifies the classical bounds
//! (absolute, relative, Neumann parity, incoherence), finds maximum
//! incoherent subsets by exact branch and bound, verifies the partition and
//! set-sum identities of Taylor on maximal incoherent subsets, extracts the
//! quasi-symmetric design living on such a subset, and runs the antipodal
//! moment test for spherical t-designs.

use crate::designkit::{self, BlockSet, DesignCertificate, DesignError};
use crate::exactarith::{
    fmt_rat, parse_rat, rat, rational_sqrt, ArithError, QuadScalar, Rat,
};
use crate::twograph::{Regularity, TwoGraph};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LineSysError {
    #[error("not equiangular: {0}")]
    NotEquiangular(String),
    #[error("Δ₁ = k² − d(s₁+s₂)/2 is negative")]
    NegativeDelta1,
    #[error("degenerate angle: 2k = s₁ + s₂")]
    DegenerateAngle,
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("surd mismatch: {0}")]
    MixedRadicands(String),
    #[error("line {0} has no coherent completion inside the incoherent set")]
    NotMaximal(usize),
    #[error("{check} violated: {witness}")]
    Violation { check: String, witness: String },
    #[error("two-graph is not regular")]
    NotRegular,
    #[error("no incoherent witness of full size available")]
    NoWitness,
    #[error("JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// Inner product carried by a line system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Form {
    /// Standard Euclidean inner product.
    Identity,
    /// Symmetric rational bilinear form; must be positive definite on the
    /// span of the representatives (all constructions here guarantee it).
    Dense(Vec<Vec<Rat>>),
}

/// A certified equiangular line system.
///
/// `dim` is the intrinsic dimension (the exact rank of the representative
/// set), which may be smaller than the coordinate length.
#[derive(Clone, Debug)]
pub struct LineSystem {
    dim: usize,
    vectors: Vec<Vec<QuadScalar>>,
    form: Form,
    radicand: Rat,
    norm_sq: QuadScalar,
    rho: QuadScalar,
    signs: Vec<i8>,
}

impl LineSystem {
    /// Certifies a set of representatives as equiangular with κ = 1/ρ:
    /// common squared norm, every pairwise inner product exactly ±‖v‖²/ρ,
    /// and exact rank. This is the only way to build a `LineSystem`.
    pub fn certify(
        vectors: Vec<Vec<QuadScalar>>,
        form: Form,
        rho: QuadScalar,
    ) -> Result<LineSystem, LineSysError> {
        if vectors.is_empty() {
            return Err(LineSysError::NotEquiangular("no vectors".into()));
        }
        let coord_len = vectors[0].len();
        if vectors.iter().any(|v| v.len() != coord_len) {
            return Err(LineSysError::NotEquiangular("ragged coordinate lengths".into()));
        }
        if let Form::Dense(g) = &form {
            if g.len() != coord_len || g.iter().any(|row| row.len() != coord_len) {
                return Err(LineSysError::NotEquiangular("form size mismatch".into()));
            }
        }
        // one shared radicand (pure rationals are compatible with anything)
        let mut radicand = rho.radicand().clone();
        if rho.is_rational() {
            radicand = Rat::zero();
        }
        for v in &vectors {
            for e in v {
                if !e.is_rational() {
                    if radicand.is_zero() {
                        radicand = e.radicand().clone();
                    } else if e.radicand() != &radicand {
                        return Err(LineSysError::MixedRadicands(format!(
                            "{} vs {}",
                            fmt_rat(e.radicand()),
                            fmt_rat(&radicand)
                        )));
                    }
                }
            }
        }
        if (&rho - &QuadScalar::rational(Rat::one())).sign() <= 0 {
            return Err(LineSysError::NotEquiangular("ρ must exceed 1".into()));
        }

        let transformed: Vec<Vec<QuadScalar>> = match &form {
            Form::Identity => vectors.clone(),
            Form::Dense(g) => vectors
                .iter()
                .map(|v| {
                    (0..v.len())
                        .map(|i| {
                            let mut acc = QuadScalar::rational(Rat::zero());
                            for (j, e) in v.iter().enumerate() {
                                acc = &acc + &e.scale(&g[i][j]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect(),
        };
        let ip = |i: usize, j: usize| -> Result<QuadScalar, ArithError> {
            crate::exactarith::inner_product(&vectors[i], &transformed[j])
        };

        let n = vectors.len();
        let norm_sq = ip(0, 0)?;
        if norm_sq.sign() <= 0 {
            return Err(LineSysError::NotEquiangular("zero or negative norm".into()));
        }
        for i in 1..n {
            if ip(i, i)? != norm_sq {
                return Err(LineSysError::NotEquiangular(format!(
                    "vector {i} has a different norm"
                )));
            }
        }
        let mut signs = vec![1i8; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let scaled = ip(i, j)?.try_mul(&rho)?;
                let s = if scaled == norm_sq {
                    1
                } else if scaled == -(&norm_sq) {
                    -1
                } else {
                    return Err(LineSysError::NotEquiangular(format!(
                        "(v{i},v{j})·ρ = {scaled} is not ±‖v‖²"
                    )));
                };
                signs[i * n + j] = s;
                signs[j * n + i] = s;
            }
        }
        let dim = crate::exactarith::ExactMatrix::from_rows(vectors.clone()).rank();
        Ok(LineSystem { dim, vectors, form, radicand, norm_sq, rho, signs })
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self) -> &QuadScalar {
        &self.rho
    }

    pub fn norm_sq(&self) -> &QuadScalar {
        &self.norm_sq
    }

    pub fn radicand(&self) -> &Rat {
        &self.radicand
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn vector(&self, i: usize) -> &[QuadScalar] {
        &self.vectors[i]
    }

    /// Sign of (vᵢ, vⱼ); +1 on the diagonal.
    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.signs[i * self.n() + j]
    }

    /// Exact inner product (recomputed from the certificate: ±‖v‖²/ρ).
    pub fn gram_entry(&self, i: usize, j: usize) -> QuadScalar {
        if i == j {
            return self.norm_sq.clone();
        }
        let v = self.norm_sq.try_div(&self.rho).expect("ρ > 1");
        if self.sign(i, j) < 0 {
            -v
        } else {
            v
        }
    }

    pub fn gram(&self) -> crate::exactarith::ExactMatrix {
        let n = self.n();
        crate::exactarith::ExactMatrix::from_rows(
            (0..n).map(|i| (0..n).map(|j| self.gram_entry(i, j)).collect()).collect(),
        )
    }

    pub fn two_graph(&self) -> TwoGraph {
        TwoGraph::from_sign_matrix(self.n(), |i, j| self.sign(i, j))
    }

    /// Re-certified restriction to a subset of lines.
    pub fn subsystem(&self, indices: &[usize]) -> Result<LineSystem, LineSysError> {
        let vectors = indices.iter().map(|&i| self.vectors[i].clone()).collect();
        LineSystem::certify(vectors, self.form.clone(), self.rho.clone())
    }
}

// ---------------------------------------------------------------------------
// constructions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
}

struct BlockSetShape {
    d: usize,
    k: usize,
    s1: usize,
    s2: usize,
}

fn block_set_shape(bs: &BlockSet) -> Result<BlockSetShape, LineSysError> {
    let ints = bs.intersection_numbers();
    if ints.len() != 2 {
        return Err(LineSysError::ParameterMismatch(format!(
            "block set must have exactly two intersection numbers, got {ints:?}"
        )));
    }
    Ok(BlockSetShape { d: bs.point_count(), k: bs.block_size(), s1: ints[0], s2: ints[1] })
}

fn delta1(shape: &BlockSetShape) -> Rat {
    rat((shape.k * shape.k) as i64) - rat(shape.d as i64) * rat((shape.s1 + shape.s2) as i64) / rat(2)
}

/// One vector per block: entries d−k±√Δ₁ on the block and −k±√Δ₁ off it,
/// spanning equiangular lines with κ = (s₁−s₂)/(2k−s₁−s₂).
pub fn construct_omega(bs: &BlockSet, eps: SignChoice) -> Result<LineSystem, LineSysError> {
    let shape = block_set_shape(bs)?;
    let d1 = delta1(&shape);
    if d1.is_negative() {
        return Err(LineSysError::NegativeDelta1);
    }
    let denom = 2 * shape.k as i64 - (shape.s1 + shape.s2) as i64;
    if denom == 0 {
        return Err(LineSysError::DegenerateAngle);
    }
    let rho = QuadScalar::rational(Rat::new(
        denom.into(),
        ((shape.s1 - shape.s2) as i64).into(),
    ));
    let surd = match eps {
        SignChoice::Plus => QuadScalar::sqrt_of(d1)?,
        SignChoice::Minus => -QuadScalar::sqrt_of(d1)?,
    };
    let on = &QuadScalar::from_int((shape.d - shape.k) as i64) + &surd;
    let off = &QuadScalar::from_int(-(shape.k as i64)) + &surd;
    let vectors = bs
        .blocks()
        .iter()
        .map(|b| {
            let mut v = vec![off.clone(); shape.d];
            for &p in b {
                v[p] = on.clone();
            }
            v
        })
        .collect();
    LineSystem::certify(vectors, Form::Identity, rho)
}

/// An incoherent subset of lines, by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncoherentWitness {
    pub lines: Vec<usize>,
}

impl IncoherentWitness {
    /// Certifies the witness: every triple product of signs is positive and
    /// the representatives are linearly independent (Gram rank = |Γ|), which
    /// is what bounds |Γ| by the dimension.
    pub fn certify(&self, sys: &LineSystem) -> Result<(), LineSysError> {
        let g = &self.lines;
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                for c in b + 1..g.len() {
                    let (x, y, z) = (g[a], g[b], g[c]);
                    if sys.sign(x, y) * sys.sign(x, z) * sys.sign(y, z) < 0 {
                        return Err(LineSysError::Violation {
                            check: "incoherence".into(),
                            witness: format!("coherent triple ({x},{y},{z})"),
                        });
                    }
                }
            }
        }
        let sub = sys.subsystem(g)?;
        if sub.dim() != g.len() {
            return Err(LineSysError::Violation {
                check: "incoherent independence".into(),
                witness: format!("rank {} < {}", sub.dim(), g.len()),
            });
        }
        Ok(())
    }
}

/// Block-set lines plus one point-line per point: |B|+d vectors with common
/// angle 1/(2(s₁−s₂)+1). Requires the block set to have the matched shape
/// d = (m²+m+s₁)²/s₁ − 2m, k = m² + s₁. The d point lines form an incoherent
/// set of size d, returned as a certified witness (indices 0..d−1; block
/// lines follow in block order).
pub fn construct_augmented(
    bs: &BlockSet,
) -> Result<(LineSystem, IncoherentWitness), LineSysError> {
    let shape = block_set_shape(bs)?;
    let m = shape.s1 - shape.s2;
    let md = closed_form_d(shape.s1 as i64, shape.s2 as i64);
    let mk = (m * m + shape.s1) as i64;
    if md != Some(shape.d as i64) || mk != shape.k as i64 {
        return Err(LineSysError::ParameterMismatch(format!(
            "(d,k) = ({},{}) but the intersection numbers ({},{}) require ({:?},{})",
            shape.d, shape.k, shape.s1, shape.s2, md, mk
        )));
    }
    let d1 = delta1(&shape);
    let d2 = rat(m as i64) * rat(2 * m as i64 + shape.d as i64) / rat(2);
    let (surd_delta, sqrt_d2);
    if d1.is_zero() {
        let q2 = rational_sqrt(&d2).ok_or_else(|| {
            LineSysError::MixedRadicands(format!("Δ₂ = {} is not a perfect square", fmt_rat(&d2)))
        })?;
        surd_delta = QuadScalar::rational(Rat::zero());
        sqrt_d2 = QuadScalar::rational(q2);
    } else {
        let prod = &d1 * &d2;
        let q = rational_sqrt(&prod).ok_or_else(|| {
            LineSysError::MixedRadicands(format!(
                "Δ₁Δ₂ = {} is not a perfect square",
                fmt_rat(&prod)
            ))
        })?;
        let sq = QuadScalar::sqrt_of(d1.clone())?;
        // Δ = ±√Δ₁ with the sign of m² − s₂
        let msq = rat((m * m) as i64) - rat(shape.s2 as i64);
        surd_delta = if msq.is_negative() { -sq.clone() } else { sq.clone() };
        sqrt_d2 = sq.scale(&(q / d1));
    }
    let m_i = m as i64;
    let d_i = shape.d as i64;
    let diag = &QuadScalar::from_int(m_i * (d_i - 1)) - &sqrt_d2;
    let offd = &QuadScalar::from_int(-m_i) - &sqrt_d2;
    let mut vectors: Vec<Vec<QuadScalar>> = (0..shape.d)
        .map(|i| {
            let mut v = vec![offd.clone(); shape.d];
            v[i] = diag.clone();
            v
        })
        .collect();
    let on = &QuadScalar::from_int(d_i - shape.k as i64) + &surd_delta;
    let off = &QuadScalar::from_int(-(shape.k as i64)) + &surd_delta;
    for b in bs.blocks() {
        let mut v = vec![off.clone(); shape.d];
        for &p in b {
            v[p] = on.clone();
        }
        vectors.push(v);
    }
    let rho = QuadScalar::from_int(2 * m_i + 1);
    let sys = LineSystem::certify(vectors, Form::Identity, rho)?;
    let witness = IncoherentWitness { lines: (0..shape.d).collect() };
    witness.certify(&sys)?;
    Ok((sys, witness))
}

fn closed_form_d(s1: i64, s2: i64) -> Option<i64> {
    let m = s1 - s2;
    let num = (m * m + m + s1) * (m * m + m + s1);
    (s1 != 0 && num % s1 == 0).then(|| num / s1 - 2 * m)
}

/// Block-set lines plus one line in the all-ones direction, scaled to the
/// common norm. Applies exactly when 2Δ₁(2k−s₁−s₂) = d(s₁−s₂)².
pub fn construct_omega_all_ones(bs: &BlockSet) -> Result<LineSystem, LineSysError> {
    let base = construct_omega(bs, SignChoice::Plus)?;
    let shape = block_set_shape(bs)?;
    let d1 = delta1(&shape);
    let m = (shape.s1 - shape.s2) as i64;
    let lhs = rat(2) * &d1 * rat(2 * shape.k as i64 - (shape.s1 + shape.s2) as i64);
    let rhs = rat(shape.d as i64) * rat(m * m);
    if lhs != rhs || d1.is_zero() {
        return Err(LineSysError::ParameterMismatch(
            "all-ones augmentation needs 2Δ₁(2k−s₁−s₂) = d(s₁−s₂)² with Δ₁ > 0".into(),
        ));
    }
    // c·1 with c = (d·m / 2Δ₁)·√Δ₁ matches both the norm and the angles
    let c = QuadScalar::sqrt_of(d1.clone())?
        .scale(&(rat(shape.d as i64) * rat(m) / (rat(2) * d1)));
    let mut vectors: Vec<Vec<QuadScalar>> = base.vectors.clone();
    vectors.push(vec![c; shape.d]);
    LineSystem::certify(vectors, Form::Identity, base.rho.clone())
}

/// 36 equiangular lines in a 15-dimensional space: the 35 lines of a Steiner
/// triple system of order 15 plus the all-ones direction, at κ = 1/5.
pub fn sts15_plus_one() -> LineSystem {
    construct_omega_all_ones(&designkit::pg32_sts15()).expect("STS(15) all-ones augmentation")
}

/// The 3 diagonals of a regular hexagon: κ = 1/2 in the plane.
pub fn hexagon_lines() -> LineSystem {
    let s3 = QuadScalar::sqrt_of(rat(3)).unwrap();
    let two = QuadScalar::from_int(2);
    let zero = QuadScalar::rational(Rat::zero());
    let one = QuadScalar::from_int(1);
    let vectors = vec![
        vec![two, zero],
        vec![one.clone(), s3.clone()],
        vec![-one, s3],
    ];
    LineSystem::certify(vectors, Form::Identity, QuadScalar::from_int(2)).expect("hexagon lines")
}

/// The 6 diagonals of an icosahedron: κ = 1/√5 in R³ (ρ is the surd √5).
pub fn icosahedron_lines() -> LineSystem {
    let zero = QuadScalar::rational(Rat::zero());
    let one = QuadScalar::from_int(1);
    // φ = (1+√5)/2
    let phi = QuadScalar::with_radicand(crate::exactarith::ratio(1, 2), crate::exactarith::ratio(1, 2), rat(5)).unwrap();
    let v = |a: &QuadScalar, b: &QuadScalar, c: &QuadScalar| vec![a.clone(), b.clone(), c.clone()];
    let vectors = vec![
        v(&zero, &one, &phi),
        v(&zero, &-(&one), &phi),
        v(&one, &phi, &zero),
        v(&-(&one), &phi, &zero),
        v(&phi, &zero, &one),
        v(&phi, &zero, &-(&one)),
    ];
    let rho = QuadScalar::sqrt_of(rat(5)).unwrap();
    LineSystem::certify(vectors, Form::Identity, rho).expect("icosahedron lines")
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Clone, Debug)]
pub struct RelativeBound {
    pub bound: Rat,
    pub saturated: bool,
}

#[derive(Clone, Debug)]
pub enum NeumannParity {
    /// n > 2d, so ρ must be (and is verified to be) an odd integer.
    OddInteger,
    /// n > 2d but ρ is not an odd integer: contradiction witness.
    Violated(String),
    /// n ≤ 2d: no parity constraint.
    NotApplicable,
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub n: usize,
    pub dim: usize,
    pub absolute_bound: u64,
    pub absolute_saturated: bool,
    /// when the absolute bound is saturated: d+2 ∈ {4,5} or an odd square
    pub gerzon_constraint_ok: Option<bool>,
    pub relative: Option<RelativeBound>,
    pub neumann: NeumannParity,
    /// (Inc(Ω) under search or witness, saturated Inc = d)
    pub incoherence: Option<(usize, bool)>,
}

pub fn bounds_report(sys: &LineSystem, inc: Option<usize>) -> BoundsReport {
    let n = sys.n();
    let d = sys.dim();
    let absolute = (d as u64) * (d as u64 + 1) / 2;
    let absolute_saturated = n as u64 == absolute;
    let gerzon = absolute_saturated.then(|| {
        let dp2 = d as u64 + 2;
        if dp2 == 4 || dp2 == 5 {
            true
        } else {
            let r = crate::exactarith::integer_sqrt(&dp2.into());
            let r: u64 = r.try_into().unwrap();
            r * r == dp2 && r % 2 == 1
        }
    });
    let rho_sq = sys.rho().pow(2);
    let relative = rho_sq.as_rational().and_then(|r2| {
        let d_rat = rat(d as i64);
        if r2 > &d_rat {
            let bound = d_rat.clone() * (r2 - Rat::one()) / (r2 - &d_rat);
            let saturated = rat(n as i64) == bound;
            Some(RelativeBound { bound, saturated })
        } else {
            None
        }
    });
    let neumann = if n > 2 * d {
        match sys.rho().as_rational() {
            Some(r) if crate::exactarith::is_integer(r) && r.numer() % 2 == 1.into() => {
                NeumannParity::OddInteger
            }
            _ => NeumannParity::Violated(format!("ρ = {}", sys.rho())),
        }
    } else {
        NeumannParity::NotApplicable
    };
    BoundsReport {
        n,
        dim: d,
        absolute_bound: absolute,
        absolute_saturated,
        gerzon_constraint_ok: gerzon,
        relative,
        neumann,
        incoherence: inc.map(|i| (i, i == d)),
    }
}

// ---------------------------------------------------------------------------
// incoherent-set search

#[derive(Clone, Debug)]
pub struct IncSearchResult {
    pub witness: IncoherentWitness,
    /// true when the branch-and-bound ran to completion (or hit the rank cap)
    pub optimal: bool,
    pub nodes: u64,
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Maximum incoherent subset by exact branch and bound.
///
/// For each root line r (in index order) the remaining lines are re-signed so
/// every pair with r is positive; incoherent sets with minimum r are then
/// exactly the cliques of the resulting positivity graph. A greedy colouring
/// bound prunes the clique search. The rank bound Inc ≤ dim stops the search
/// as soon as it is met.
pub fn find_max_incoherent(
    sys: &LineSystem,
    cap: Option<usize>,
    budget: u64,
) -> IncSearchResult {
    let n = sys.n();
    let cap = cap.unwrap_or(sys.dim()).min(sys.dim()).min(n);
    if n <= 2 {
        // degenerate by definition
        return IncSearchResult {
            witness: IncoherentWitness { lines: (0..n).collect() },
            optimal: true,
            nodes: 0,
        };
    }
    let mut best: Vec<usize> = vec![0, 1];
    let mut nodes = 0u64;
    let mut exhausted = false;
    for root in 0..n {
        if best.len() >= cap || exhausted {
            break;
        }
        // positivity graph after re-signing relative to the root
        let verts: Vec<usize> = (root + 1..n).collect();
        let m = verts.len();
        if m + 1 <= best.len() {
            break;
        }
        let vwords = m.div_ceil(64);
        let mut adj = vec![vec![0u64; vwords]; m];
        for a in 0..m {
            for b in a + 1..m {
                let (i, j) = (verts[a], verts[b]);
                let s = sys.sign(root, i) * sys.sign(root, j) * sys.sign(i, j);
                if s > 0 {
                    adj[a][b / 64] |= 1 << (b % 64);
                    adj[b][a / 64] |= 1 << (a % 64);
                }
            }
        }
        let mut cand = vec![u64::MAX; vwords];
        if m % 64 != 0 {
            cand[vwords - 1] = (1u64 << (m % 64)) - 1;
        }
        if vwords == 0 {
            continue;
        }
        let mut cur = Vec::new();
        clique_extend(
            &adj,
            m,
            &mut cand,
            &mut cur,
            &mut best,
            root,
            &verts,
            cap,
            budget,
            &mut nodes,
            &mut exhausted,
        );
    }
    let witness = IncoherentWitness { lines: best };
    IncSearchResult { witness, optimal: !exhausted, nodes }
}

#[allow(clippy::too_many_arguments)]
fn clique_extend(
    adj: &[Vec<u64>],
    m: usize,
    cand: &mut [u64],
    cur: &mut Vec<usize>,
    best: &mut Vec<usize>,
    root: usize,
    verts: &[usize],
    cap: usize,
    budget: u64,
    nodes: &mut u64,
    exhausted: &mut bool,
) {
    *nodes += 1;
    if *nodes > budget {
        *exhausted = true;
        return;
    }
    if best.len() >= cap {
        return;
    }
    let members: Vec<usize> = bits_iter(cand, m).collect();
    if members.is_empty() {
        if cur.len() + 1 > best.len() {
            let mut w = vec![root];
            w.extend(cur.iter().map(|&a| verts[a]));
            w.sort_unstable();
            *best = w;
        }
        return;
    }
    // greedy colouring; classes give the pruning bound
    let mut color = vec![0usize; members.len()];
    let mut class_masks: Vec<Vec<u64>> = Vec::new();
    for (idx, &v) in members.iter().enumerate() {
        let mut c = 0;
        loop {
            if c == class_masks.len() {
                class_masks.push(vec![0u64; adj[v].len()]);
                break;
            }
            let clash = class_masks[c]
                .iter()
                .zip(&adj[v])
                .any(|(cm, av)| cm & av != 0);
            if !clash {
                break;
            }
            c += 1;
        }
        class_masks[c][v / 64] |= 1 << (v % 64);
        color[idx] = c + 1;
    }
    let mut order: Vec<(usize, usize)> =
        members.iter().copied().zip(color.iter().copied()).collect();
    order.sort_by_key(|&(_, c)| c);
    let mut live = cand.to_vec();
    for &(v, c) in order.iter().rev() {
        // cur ∪ {root} plus at most c candidates (everything left has color ≤ c)
        if cur.len() + 1 + c <= best.len() || best.len() >= cap || *exhausted {
            return;
        }
        cur.push(v);
        let mut next: Vec<u64> = live.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
        if cur.len() + 1 > best.len() {
            let mut w = vec![root];
            w.extend(cur.iter().map(|&a| verts[a]));
            w.sort_unstable();
            *best = w;
        }
        clique_extend(adj, m, &mut next, cur, best, root, verts, cap, budget, nodes, exhausted);
        cur.pop();
        live[v / 64] &= !(1 << (v % 64));
    }
}

fn bits_iter(bits: &[u64], n: usize) -> impl Iterator<Item = usize> + '_ {
    (0..n).filter(move |&i| bits[i / 64] >> (i % 64) & 1 == 1)
}

/// Lexicographically least incoherent subset of the maximum size.
pub fn lex_least_max_incoherent(sys: &LineSystem, budget: u64) -> Result<Vec<usize>, LineSysError> {
    let res = find_max_incoherent(sys, None, budget);
    if !res.optimal {
        return Err(LineSysError::Violation {
            check: "incoherent search".into(),
            witness: format!("budget of {budget} nodes exhausted"),
        });
    }
    let target = res.witness.lines.len();
    let n = sys.n();
    fn extend(sys: &LineSystem, chosen: &mut Vec<usize>, start: usize, target: usize, n: usize) -> bool {
        if chosen.len() == target {
            return true;
        }
        for x in start..n {
            if n - x < target - chosen.len() {
                return false;
            }
            let ok = chosen.iter().enumerate().all(|(ai, &a)| {
                chosen[..ai]
                    .iter()
                    .all(|&b| sys.sign(a, b) * sys.sign(a, x) * sys.sign(b, x) > 0)
            });
            if ok {
                chosen.push(x);
                if extend(sys, chosen, x + 1, target, n) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    if extend(sys, &mut chosen, 0, target, n) {
        Ok(chosen)
    } else {
        Err(LineSysError::NoWitness)
    }
}

// ---------------------------------------------------------------------------
// partitions of a maximal incoherent subset

/// The partition Γ = Γ₁(γ) ⊔ Γ₂(γ) induced by an external line γ: members of
/// different parts complete γ to a coherent triple, members of the same part
/// do not. part1 is the smaller part (ties broken lexicographically).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaPartition {
    pub gamma: usize,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

pub fn gamma_partition(
    sys: &LineSystem,
    gamma_set: &[usize],
    gamma: usize,
) -> Result<GammaPartition, LineSysError> {
    let coherent = |a: usize, b: usize, c: usize| sys.sign(a, b) * sys.sign(a, c) * sys.sign(b, c) < 0;
    let mut first_pair = None;
    'outer: for (i, &a) in gamma_set.iter().enumerate() {
        for &b in &gamma_set[i + 1..] {
            if coherent(gamma, a, b) {
                first_pair = Some((a, b));
                break 'outer;
            }
        }
    }
    let Some((a1, a2)) = first_pair else {
        return Err(LineSysError::NotMaximal(gamma));
    };
    let side =
        |anchor: usize| -> Vec<usize> {
            gamma_set
                .iter()
                .copied()
                .filter(|&d| d != anchor && coherent(gamma, anchor, d))
                .collect()
        };
    let p1 = side(a1);
    let p2 = side(a2);
    if p1.len() + p2.len() != gamma_set.len()
        || p1.iter().any(|x| p2.contains(x))
    {
        return Err(LineSysError::Violation {
            check: "partition".into(),
            witness: format!("γ={gamma} does not split the incoherent set"),
        });
    }
    // the partition must not depend on which coherent pair was used
    for (i, &b1) in gamma_set.iter().enumerate() {
        for &b2 in &gamma_set[i + 1..] {
            if !coherent(gamma, b1, b2) {
                continue;
            }
            let q1 = side(b1);
            let q2 = side(b2);
            let same = (q1 == p1 && q2 == p2) || (q1 == p2 && q2 == p1);
            if !same {
                return Err(LineSysError::Violation {
                    check: "partition independence".into(),
                    witness: format!("γ={gamma}, pairs ({a1},{a2}) vs ({b1},{b2})"),
                });
            }
        }
    }
    let (part1, part2) = if p1.len() < p2.len() || (p1.len() == p2.len() && p1 <= p2) {
        (p1, p2)
    } else {
        (p2, p1)
    };
    Ok(GammaPartition { gamma, part1, part2 })
}

/// All partitions of Γ by the lines outside it.
pub fn all_partitions(
    sys: &LineSystem,
    gamma_set: &[usize],
) -> Result<Vec<GammaPartition>, LineSysError> {
    let inside: BTreeSet<usize> = gamma_set.iter().copied().collect();
    (0..sys.n())
        .filter(|i| !inside.contains(i))
        .map(|g| gamma_partition(sys, gamma_set, g))
        .collect()
}

/// The two roots of 4x² − 4dx + (ρ−1)²(d+ρ), which must be non-negative
/// integers for a full-size incoherent set to exist.
pub fn taylor_roots(d: usize, rho: &QuadScalar) -> Result<(u64, u64), LineSysError> {
    let d_q = QuadScalar::from_int(d as i64);
    let one = QuadScalar::from_int(1);
    let disc = &(&d_q * &d_q)
        - &(&(&(rho - &one) * &(rho - &one)) * &(&d_q + rho));
    let disc_rat = disc.as_rational().ok_or_else(|| LineSysError::Violation {
        check: "taylor roots".into(),
        witness: format!("irrational discriminant {disc}"),
    })?;
    let z = rational_sqrt(disc_rat).ok_or_else(|| LineSysError::Violation {
        check: "taylor roots".into(),
        witness: format!("discriminant {} is not a perfect square", fmt_rat(disc_rat)),
    })?;
    let lo = (rat(d as i64) - &z) / rat(2);
    let hi = (rat(d as i64) + &z) / rat(2);
    let as_u64 = |r: &Rat| -> Result<u64, LineSysError> {
        if crate::exactarith::is_integer(r) && !r.is_negative() {
            u64::try_from(r.numer().clone()).map_err(|_| LineSysError::Violation {
                check: "taylor roots".into(),
                witness: "root out of range".into(),
            })
        } else {
            Err(LineSysError::Violation {
                check: "taylor roots".into(),
                witness: format!("non-integral root {}", fmt_rat(r)),
            })
        }
    };
    Ok((as_u64(&lo)?, as_u64(&hi)?))
}

/// |Γ₁(γ)| and |Γ₂(γ)| are exactly the two roots, for every external γ.
pub fn taylor_size_check(sys: &LineSystem, gamma_set: &[usize]) -> Result<(u64, u64), LineSysError> {
    let (lo, hi) = taylor_roots(gamma_set.len(), sys.rho())?;
    for p in all_partitions(sys, gamma_set)? {
        let sizes = (p.part1.len() as u64, p.part2.len() as u64);
        if sizes != (lo, hi) && sizes != (hi, lo) {
            return Err(LineSysError::Violation {
                check: "taylor sizes".into(),
                witness: format!("γ={} has parts {:?}, expected {{{lo},{hi}}}", p.gamma, sizes),
            });
        }
    }
    Ok((lo, hi))
}

/// After re-signing Γ so all its pairwise inner products are positive, every
/// external representative equals ±[c₁·ΣΓ₁ − c₂·ΣΓ₂] exactly, with
/// c₁ = (2d−2k+ρ−1)/((ρ−1)(d+ρ−1)) and c₂ = (2k+ρ−1)/((ρ−1)(d+ρ−1)).
pub fn taylor_vector_check(
    sys: &LineSystem,
    gamma_set: &[usize],
    gamma: usize,
) -> Result<(), LineSysError> {
    let part = gamma_partition(sys, gamma_set, gamma)?;
    // signs making Γ pairwise positive
    let base = gamma_set[0];
    let eps = |line: usize| -> i64 {
        if line == base {
             1
        } else {
            sys.sign(base, line) as i64
        }
    };
    for (i, &a) in gamma_set.iter().enumerate() {
        for &b in &gamma_set[i + 1..] {
            if eps(a) * eps(b) * sys.sign(a, b) as i64 != 1 {
                return Err(LineSysError::Violation {
                    check: "re-signing".into(),
                    witness: format!("pair ({a},{b}) cannot be made positive"),
                });
            }
        }
    }
    let d = gamma_set.len() as i64;
    let k = part.part1.len() as i64;
    let rho = sys.rho();
    let one = QuadScalar::from_int(1);
    let denom = &(rho - &one) * &(&QuadScalar::from_int(d - 1) + rho);
    let c1 = QuadScalar::from_int(2 * d - 2 * k).try_add(&(rho - &one))?.try_div(&denom)?;
    let c2 = QuadScalar::from_int(2 * k).try_add(&(rho - &one))?.try_div(&denom)?;
    let len = sys.vector(gamma).len();
    let mut u = vec![QuadScalar::rational(Rat::zero()); len];
    for &a in &part.part1 {
        let s = c1.scale(&rat(eps(a)));
        for (ui, vi) in u.iter_mut().zip(sys.vector(a)) {
            *ui = &*ui + &(&s * vi);
        }
    }
    for &a in &part.part2 {
        let s = c2.scale(&rat(-eps(a)));
        for (ui, vi) in u.iter_mut().zip(sys.vector(a)) {
            *ui = &*ui + &(&s * vi);
        }
    }
    let g = sys.vector(gamma);
    let plus = u.iter().zip(g).all(|(a, b)| a == b);
    let minus = u.iter().zip(g).all(|(a, b)| &-a == b);
    if plus || minus {
        Ok(())
    } else {
        Err(LineSysError::Violation {
            check: "taylor vector formula".into(),
            witness: format!("γ={gamma} is not ±(c₁ΣΓ₁ − c₂ΣΓ₂)"),
        })
    }
}

/// |Γ₁(γ) ∩ Γ₁(δ)| = |Γ₁(γ)| − Δ with Δ ∈ {(ρ−1)²/4, (ρ²−1)/4}, for every
/// pair of distinct external lines.
pub fn taylor_intersection_check(
    sys: &LineSystem,
    gamma_set: &[usize],
) -> Result<(), LineSysError> {
    let rho = sys.rho();
    let one = QuadScalar::from_int(1);
    let quarter = crate::exactarith::ratio(1, 4);
    let d_small = (&(rho - &one) * &(rho - &one)).scale(&quarter);
    let d_big = (&(rho * rho) - &one).scale(&quarter);
    let parts = all_partitions(sys, gamma_set)?;
    for (i, p) in parts.iter().enumerate() {
        let set1: BTreeSet<usize> = p.part1.iter().copied().collect();
        for q in &parts[i + 1..] {
            let inter = q.part1.iter().filter(|x| set1.contains(x)).count();
            let k = QuadScalar::from_int(p.part1.len() as i64);
            let got = QuadScalar::from_int(inter as i64);
            let ok = got == (&k - &d_small) || got == (&k - &d_big);
            // with equal part sizes the labelling of q is ambiguous; the
            // complementary count must then match instead
            let ok = ok || {
                let inter2 = q.part2.iter().filter(|x| set1.contains(x)).count();
                let got2 = QuadScalar::from_int(inter2 as i64);
                p.part1.len() == p.part2.len()
                    && (got2 == (&k - &d_small) || got2 == (&k - &d_big))
            };
            if !ok {
                return Err(LineSysError::Violation {
                    check: "taylor intersections".into(),
                    witness: format!("γ={}, δ={}: |Γ₁∩Γ₁| = {inter}", p.gamma, q.gamma),
                });
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// the design on a maximal incoherent subset

#[derive(Clone, Debug)]
pub enum IncoherentDesign {
    /// g₁ < g₂: the small parts form a quasi-symmetric 2-design on Γ.
    Distinct {
        blocks: BlockSet,
        certificate: DesignCertificate,
        /// every 3-subset of Γ lies in a constant number of blocks (zero
        /// counts as constant when the block size is below 3)
        three_design: bool,
        absolute_saturated: bool,
    },
    /// g₁ = g₂ = d/2: both parts together form a 3-design whose derived and
    /// residual designs at a point are quasi-symmetric.
    Balanced {
        blocks: BlockSet,
        certificate: DesignCertificate,
        derived_certificate: DesignCertificate,
        residual_certificate: DesignCertificate,
    },
}

pub fn incoherent_design(
    sys: &LineSystem,
    gamma_set: &[usize],
) -> Result<IncoherentDesign, LineSysError> {
    let reg = sys.two_graph().regularity();
    let Regularity::Regular(params) = reg else {
        return Err(LineSysError::NotRegular);
    };
    if gamma_set.len() != sys.dim() {
        return Err(LineSysError::NoWitness);
    }
    let d = gamma_set.len();
    let pos_of: std::collections::BTreeMap<usize, usize> =
        gamma_set.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let parts = all_partitions(sys, gamma_set)?;
    let balanced = parts.iter().all(|p| p.part1.len() == p.part2.len());
    let to_block = |side: &[usize]| -> Vec<usize> { side.iter().map(|g| pos_of[g]).collect() };
    let rho = sys
        .rho()
        .as_rational()
        .cloned()
        .ok_or_else(|| LineSysError::ParameterMismatch("irrational ρ".into()))?;
    if balanced {
        let mut union: BTreeSet<Vec<usize>> = BTreeSet::new();
        for p in &parts {
            let mut b1 = to_block(&p.part1);
            let mut b2 = to_block(&p.part2);
            b1.sort_unstable();
            b2.sort_unstable();
            union.insert(b1);
            union.insert(b2);
        }
        let blocks = BlockSet::new(d, union.into_iter().collect())?;
        let certificate = designkit::certify_design(&blocks, 3)?;
        let expected_l3 = params.n as i64 - d as i64 - 3 * params.a as i64 / 2;
        if certificate.lambda_j.get(3).copied() != Some(expected_l3 as u64) {
            return Err(LineSysError::Violation {
                check: "balanced 3-design".into(),
                witness: format!(
                    "λ₃ = {:?}, expected n−d−3a/2 = {expected_l3}",
                    certificate.lambda_j.get(3)
                ),
            });
        }
        let derived = designkit::derived_design(&blocks, 0)?;
        let residual = designkit::residual_design(&blocks, 0)?;
        let derived_certificate = designkit::certify_design(&derived, 2)?;
        let residual_certificate = designkit::certify_design(&residual, 2)?;
        // intersection numbers (ρ²−1)/4 and (ρ−1)²/4, shifted by one for the
        // derived design
        let s1 = rat_usize(&((&rho * &rho - Rat::one()) / rat(4)))?;
        let s2 = rat_usize(&((&rho - Rat::one()) * (&rho - Rat::one()) / rat(4)))?;
        if residual_certificate.s_pair() != Some((s1, s2))
            || derived_certificate.s_pair() != Some((s1 - 1, s2 - 1))
        {
            return Err(LineSysError::Violation {
                check: "balanced quasi-symmetric structure".into(),
                witness: format!(
                    "residual {:?}, derived {:?}, expected ({s1},{s2}) and ({},{})",
                    residual_certificate.s_pair(),
                    derived_certificate.s_pair(),
                    s1 - 1,
                    s2 - 1
                ),
            });
        }
        Ok(IncoherentDesign::Balanced {
            blocks,
            certificate,
            derived_certificate,
            residual_certificate,
        })
    } else {
        let blocks: Vec<Vec<usize>> = parts.iter().map(|p| to_block(&p.part1)).collect();
        let blocks = BlockSet::new(d, blocks)?;
        let certificate = designkit::certify_design(&blocks, 2)?;
        let (s1, s2) = certificate.s_pair().ok_or_else(|| {
            LineSysError::Violation {
                check: "quasi-symmetric".into(),
                witness: format!("intersections {:?}", certificate.intersection_numbers),
            }
        })?;
        let k = blocks.block_size() as i64;
        let rho2 = &rho * &rho;
        let expect_lambda = rat(k) * rat(k - 1) / (&rho2 - rat(d as i64));
        let expect_s1 = rat(k) - (&rho - Rat::one()) * (&rho - Rat::one()) / rat(4);
        let expect_s2 = rat(k) - (&rho2 - Rat::one()) / rat(4);
        let lambda2 = certificate.lambda_j[2];
        if rat(lambda2 as i64) != expect_lambda
            || rat(s1 as i64) != expect_s1
            || rat(s2 as i64) != expect_s2
        {
            return Err(LineSysError::Violation {
                check: "incoherent design parameters".into(),
                witness: format!("got 2-({d},{k},{lambda2};{s1},{s2})"),
            });
        }
        let three_design = if blocks.block_size() >= 3 {
            certificate.strength >= 3
        } else {
            // blocks of size < 3 contain no 3-set: vacuously constant
            true
        };
        let absolute_saturated = sys.n() == d * (d + 1) / 2;
        if three_design != absolute_saturated {
            return Err(LineSysError::Violation {
                check: "3-design ⟺ absolute bound".into(),
                witness: format!("three_design={three_design}, saturated={absolute_saturated}"),
            });
        }
        Ok(IncoherentDesign::Distinct {
            blocks,
            certificate,
            three_design,
            absolute_saturated,
        })
    }
}

fn rat_usize(r: &Rat) -> Result<usize, LineSysError> {
    if crate::exactarith::is_integer(r) && !r.is_negative() {
        usize::try_from(r.numer().clone()).map_err(|_| LineSysError::ParameterMismatch("overflow".into()))
    } else {
        Err(LineSysError::ParameterMismatch(format!("{} is not a natural number", fmt_rat(r))))
    }
}

// ---------------------------------------------------------------------------
// set-sum identities

/// Verifies the six set-sum identities for a maximal incoherent subset of a
/// regular two-graph, plus Taylor's product identity Σ|Γ₁||Γ₂| = a·g(g−1)/2.
/// All counts are doubled before comparison so everything stays integral.
pub fn setsum_checks(sys: &LineSystem, gamma_set: &[usize]) -> Result<(), LineSysError> {
    let Regularity::Regular(params) = sys.two_graph().regularity() else {
        return Err(LineSysError::NotRegular);
    };
    let (n, a) = (params.n as i64, params.a as i64);
    let g = gamma_set.len() as i64;
    let parts = all_partitions(sys, gamma_set)?;
    let inside: BTreeSet<usize> = gamma_set.iter().copied().collect();
    let externals: Vec<usize> = (0..sys.n()).filter(|i| !inside.contains(i)).collect();
    let part_sizes =
        |p: &GammaPartition, alpha: usize| -> (i64, i64) {
            let in_size = if p.part1.contains(&alpha) {
                p.part1.len()
            } else {
                p.part2.len()
            } as i64;
            (in_size, g - in_size)
        };
    // Taylor's product identity
    let prod_sum: i64 = parts.iter().map(|p| (p.part1.len() * p.part2.len()) as i64).sum();
    expect_eq("Σ|Γ₁||Γ₂|", 2 * prod_sum, a * g * (g - 1))?;
    for &alpha in gamma_set {
        let (mut s_in, mut s_notin, mut sq_in, mut sq_notin) = (0i64, 0i64, 0i64, 0i64);
        for p in &parts {
            let (i_s, o_s) = part_sizes(p, alpha);
            s_in += i_s;
            s_notin += o_s;
            sq_in += i_s * i_s;
            sq_notin += o_s * o_s;
        }
        expect_eq("Σ|Γ(γ,α,∈)|", s_in, (n - g - a) * g + a)?;
        expect_eq("Σ|Γ(γ,α,∉)|", s_notin, a * (g - 1))?;
        expect_eq("Σ|Γ(γ,α,∈)|²", 2 * sq_in, (2 * (n - g) - 3 * a) * g * g + 3 * a * g)?;
        expect_eq("Σ|Γ(γ,α,∉)|²", 2 * sq_notin, a * g * (g - 1))?;
    }
    let tg = sys.two_graph();
    for (ai, &alpha) in gamma_set.iter().enumerate() {
        for &beta in &gamma_set[ai + 1..] {
            let (mut in_s, mut notin_s, mut out_in, mut out_notin) = (0i64, 0i64, 0i64, 0i64);
            for (p, &gline) in parts.iter().zip(&externals) {
                let (i_s, o_s) = part_sizes(p, alpha);
                if tg.coherent(alpha, beta, gline) {
                    in_s += i_s;
                    notin_s += o_s;
                } else {
                    out_in += i_s;
                    out_notin += o_s;
                }
            }
            expect_eq("Σ_{S} |Γ(γ,α,∈)|", 2 * in_s, a * g)?;
            expect_eq("Σ_{S} |Γ(γ,α,∉)|", 2 * notin_s, a * g)?;
            expect_eq("Σ_{∉S} |Γ(γ,α,∈)|", 2 * out_in, (2 * (n - g) - 3 * a) * g + 2 * a)?;
            expect_eq("Σ_{∉S} |Γ(γ,α,∉)|", 2 * out_notin, a * (g - 2))?;
        }
    }
    Ok(())
}

fn expect_eq(what: &str, got: i64, expected: i64) -> Result<(), LineSysError> {
    if got == expected {
        Ok(())
    } else {
        Err(LineSysError::Violation {
            check: what.into(),
            witness: format!("got {got}, expected {expected}"),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FourSumReport {
    /// Σ over disjoint pairs {η,ν} of |S_{αβ} ∩ S_{ην}| (constant over pairs)
    pub pair_sum: u64,
    /// the common value of |S_{αβ} ∩ S_{ην}| when it is constant
    pub constant: Option<u64>,
}

/// Lemma-level four-set sums: for every pair α,β in Γ the sum over disjoint
/// pairs equals a(d−k−1)(k−1); additionally reports whether the individual
/// intersections are constant, and checks the constant against
/// 2a(d−k−1)(k−1)/((d−2)(d−3)) when they are.
pub fn foursum_check(sys: &LineSystem, gamma_set: &[usize]) -> Result<FourSumReport, LineSysError> {
    let Regularity::Regular(params) = sys.two_graph().regularity() else {
        return Err(LineSysError::NotRegular);
    };
    let a = params.a as u64;
    let d = gamma_set.len();
    let parts = all_partitions(sys, gamma_set)?;
    let k = parts
        .first()
        .map(|p| p.part1.len())
        .ok_or(LineSysError::NoWitness)? as u64;
    if parts.iter().any(|p| p.part1.len() as u64 != k) {
        return Err(LineSysError::Violation {
            check: "constant |Γ₁|".into(),
            witness: "part sizes vary".into(),
        });
    }
    let tg = sys.two_graph();
    let n = sys.n();
    let words = n.div_ceil(64);
    let s_mask = |alpha: usize, beta: usize| -> Vec<u64> {
        let mut m = vec![0u64; words];
        for x in 0..n {
            if x != alpha && x != beta && tg.coherent(alpha, beta, x) {
                m[x / 64] |= 1 << (x % 64);
            }
        }
        m
    };
    let masks: Vec<Vec<Vec<u64>>> = gamma_set
        .iter()
        .map(|&alpha| gamma_set.iter().map(|&beta| if alpha == beta { vec![0; words] } else { s_mask(alpha, beta) }).collect())
        .collect();
    let expected = a * (d as u64 - k - 1) * (k - 1);
    let mut constant: Option<u64> = None;
    let mut is_constant = true;
    for ai in 0..d {
        for bi in ai + 1..d {
            let mut sum = 0u64;
            for hi in 0..d {
                if hi == ai || hi == bi {
                    continue;
                }
                for ni in hi + 1..d {
                    if ni == ai || ni == bi {
                        continue;
                    }
                    let inter: u64 = masks[ai][bi]
                        .iter()
                        .zip(&masks[hi][ni])
                        .map(|(x, y)| (x & y).count_ones() as u64)
                        .sum();
                    sum += inter;
                    match constant {
                        None => constant = Some(inter),
                        Some(c) if c != inter => is_constant = false,
                        _ => {}
                    }
                }
            }
            if sum != expected {
                return Err(LineSysError::Violation {
                    check: "four-set sum".into(),
                    witness: format!("pair ({ai},{bi}) in Γ: sum {sum}, expected {expected}"),
                });
            }
        }
    }
    let constant = if is_constant { constant } else { None };
    if let Some(c) = constant {
        let num = 2 * expected;
        let den = (d as u64 - 2) * (d as u64 - 3);
        if c * den != num {
            return Err(LineSysError::Violation {
                check: "four-set constant".into(),
                witness: format!("c = {c}, expected {num}/{den}"),
            });
        }
    }
    Ok(FourSumReport { pair_sum: expected, constant })
}

// ---------------------------------------------------------------------------
// spherical design moments

#[derive(Clone, Debug)]
pub struct SphericalReport {
    pub x_size: usize,
    pub passes: bool,
    pub failed_degree: Option<u32>,
    /// for odd t = 2e+1: |X| = 2·C(d+e−1, d−1)
    pub tight: Option<bool>,
}

/// Moment test for the antipodal double X = {±u} of the normalized
/// representatives: for each even k ≤ t the k-th moment sum must equal
/// |X|²(k−1)!!/(d(d+2)···(d+k−2)); odd moments vanish by antipodality.
/// Normalization is handled by scaling with powers of the common norm.
pub fn spherical_design_check(sys: &LineSystem, t: u32) -> Result<SphericalReport, LineSysError> {
    let n = sys.n();
    let d = sys.dim() as i64;
    let norm = sys.norm_sq();
    let mut failed = None;
    let mut k = 2;
    while k <= t {
        // S_k = Σ over ordered line pairs of (v_i, v_j)^k; for even k the
        // off-diagonal terms are all (‖v‖²/ρ)^k regardless of sign
        let total_pairs = (n * (n - 1)) as i64;
        let mut s_k = norm.pow(k).scale(&rat(n as i64));
        if n > 1 {
            s_k = s_k.try_add(&sys.gram_entry(0, 1).pow(k).scale(&rat(total_pairs)))?;
        }
        // required: S_k = n² (k−1)!! / (d(d+2)···(d+k−2)) · (norm)^k
        let mut c_num = Rat::one();
        let mut c_den = Rat::one();
        let mut f = 1i64;
        while f < k as i64 {
            c_num *= rat(f);
            f += 2;
        }
        let mut dd = d;
        for _ in 0..(k / 2) {
            c_den *= rat(dd);
            dd += 2;
        }
        let rhs = norm.pow(k).scale(&(rat((n * n) as i64) * c_num / c_den));
        if s_k != rhs {
            failed = Some(k);
            break;
        }
        k += 2;
    }
    let tight = (t % 2 == 1).then(|| {
        let e = (t as usize - 1) / 2;
        2 * n as u64 == 2 * designkit::binom(sys.dim() + e - 1, sys.dim() - 1)
    });
    Ok(SphericalReport {
        x_size: 2 * n,
        passes: failed.is_none(),
        failed_degree: failed,
        tight,
    })
}

// ---------------------------------------------------------------------------
// JSON serialization

fn quad_json(q: &QuadScalar) -> String {
    match q.as_rational() {
        Some(r) => format!("\"{}\"", fmt_rat(r)),
        None => format!("[\"{}\",\"{}\"]", fmt_rat(q.rat_part()), fmt_rat(q.coeff_part())),
    }
}

/// Canonical JSON rendering; reading it back and re-writing reproduces the
/// exact bytes.
pub fn write_json(sys: &LineSystem) -> String {
    let mut out = String::new();
    let _ = write!(out, "{{\"dim\":{},\"radicand\":\"{}\"", sys.dim(), fmt_rat(sys.radicand()));
    if let Form::Dense(g) = sys.form() {
        let rows: Vec<String> = g
            .iter()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(|r| format!("\"{}\"", fmt_rat(r))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        let _ = write!(out, ",\"form\":[{}]", rows.join(","));
    }
    let _ = write!(out, ",\"norm_sq\":{}", quad_json(sys.norm_sq()));
    let _ = write!(out, ",\"rho\":{}", quad_json(sys.rho()));
    let _ = write!(out, ",\"vectors\":[");
    for (i, v) in sys.vectors.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, e) in v.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "[\"{}\",\"{}\"]",
                fmt_rat(e.rat_part()),
                fmt_rat(e.coeff_part())
            );
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

pub fn read_json(text: &str) -> Result<LineSystem, LineSysError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| LineSysError::Json(e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| LineSysError::Json("expected object".into()))?;
    let radicand = obj
        .get("radicand")
        .and_then(|x| x.as_str())
        .and_then(parse_rat)
        .ok_or_else(|| LineSysError::Json("bad radicand".into()))?;
    let parse_quad = |val: &serde_json::Value| -> Result<QuadScalar, LineSysError> {
        match val {
            serde_json::Value::String(s) => {
                let r = parse_rat(s).ok_orelse_json("bad rational")?;
                Ok(QuadScalar::rational(r))
            }
            serde_json::Value::Array(pair) if pair.len() == 2 => {
                let a = pair[0].as_str().and_then(parse_rat).ok_orelse_json("bad pair")?;
                let b = pair[1].as_str().and_then(parse_rat).ok_orelse_json("bad pair")?;
                Ok(QuadScalar::with_radicand(a, b, radicand.clone())
                    .map_err(|e| LineSysError::Json(e.to_string()))?)
            }
            _ => Err(LineSysError::Json("bad scalar".into())),
        }
    };
    let rho = parse_quad(obj.get("rho").ok_orelse_json("missing rho")?)?;
    let declared_norm = parse_quad(obj.get("norm_sq").ok_orelse_json("missing norm_sq")?)?;
    let declared_dim = obj
        .get("dim")
        .and_then(|x| x.as_u64())
        .ok_orelse_json("missing dim")?;
    let form = match obj.get("form") {
        None => Form::Identity,
        Some(serde_json::Value::Array(rows)) => {
            let mut g = Vec::with_capacity(rows.len());
            for row in rows {
                let row = row.as_array().ok_orelse_json("bad form row")?;
                let mut r = Vec::with_capacity(row.len());
                for cell in row {
                    r.push(cell.as_str().and_then(parse_rat).ok_orelse_json("bad form cell")?);
                }
                g.push(r);
            }
            Form::Dense(g)
        }
        _ => return Err(LineSysError::Json("bad form".into())),
    };
    let vecs = obj
        .get("vectors")
        .and_then(|x| x.as_array())
        .ok_orelse_json("missing vectors")?;
    let mut vectors = Vec::with_capacity(vecs.len());
    for v in vecs {
        let v = v.as_array().ok_orelse_json("bad vector")?;
        let mut row = Vec::with_capacity(v.len());
        for e in v {
            let pair = e.as_array().filter(|p| p.len() == 2).ok_orelse_json("bad entry")?;
            let a = pair[0].as_str().and_then(parse_rat).ok_orelse_json("bad entry")?;
            let b = pair[1].as_str().and_then(parse_rat).ok_orelse_json("bad entry")?;
            row.push(
                QuadScalar::with_radicand(a, b, radicand.clone())
                    .map_err(|e| LineSysError::Json(e.to_string()))?,
            );
        }
        vectors.push(row);
    }
    let sys = LineSystem::certify(vectors, form, rho)?;
    if sys.norm_sq() != &declared_norm {
        return Err(LineSysError::Json("declared norm_sq does not match the vectors".into()));
    }
    if sys.dim() as u64 != declared_dim {
        return Err(LineSysError::Json(format!(
            "declared dim {declared_dim} but rank is {}",
            sys.dim()
        )));
    }
    Ok(sys)
}

trait OkOrJson<T> {
    fn ok_orelse_json(self, msg: &str) -> Result<T, LineSysError>;
}

impl<T> OkOrJson<T> for Option<T> {
    fn ok_orelse_json(self, msg: &str) -> Result<T, LineSysError> {
        self.ok_or_else(|| LineSysError::Json(msg.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designkit::{golay_heptads, pair_blockset};

    #[test]
    fn hexagon_basics() {
        let h = hexagon_lines();
        assert_eq!((h.n(), h.dim()), (3, 2));
        // every triple coherent, so the largest incoherent set is a pair
        let tg = h.two_graph();
        assert!(tg.coherent(0, 1, 2));
        let inc = find_max_incoherent(&h, None, 1000);
        assert!(inc.optimal);
        assert_eq!(inc.witness.lines.len(), 2);
    }

    #[test]
    fn icosahedron_basics() {
        let ic = icosahedron_lines();
        assert_eq!((ic.n(), ic.dim()), (6, 3));
        let inc = find_max_incoherent(&ic, None, 100_000);
        assert!(inc.optimal);
        assert_eq!(inc.witness.lines.len(), 3);
        assert!(matches!(ic.two_graph().regularity(), Regularity::Regular(_)));
        let b = bounds_report(&ic, Some(3));
        assert!(b.absolute_saturated);
        assert_eq!(b.relative.as_ref().map(|r| r.saturated), Some(true));
        assert!(matches!(b.neumann, NeumannParity::NotApplicable));
    }

    #[test]
    fn pairs8_spans_seven_dimensions() {
        let sys = construct_omega(&pair_blockset(8).unwrap(), SignChoice::Plus).unwrap();
        assert_eq!(sys.n(), 28);
        assert_eq!(sys.dim(), 7);
        assert_eq!(sys.rho().as_rational(), Some(&rat(3)));
        let b = bounds_report(&sys, None);
        assert!(b.absolute_saturated);
    }

    #[test]
    fn delta1_negative_is_rejected() {
        let bs = pair_blockset(9).unwrap();
        assert!(matches!(
            construct_omega(&bs, SignChoice::Plus),
            Err(LineSysError::NegativeDelta1)
        ));
    }

    #[test]
    fn augmented_golay_inner_products() {
        let (sys, witness) = construct_augmented(&golay_heptads()).unwrap();
        assert_eq!(sys.n(), 276);
        assert_eq!(sys.dim(), 23);
        assert_eq!(witness.lines.len(), 23);
        // block lines start at index 23; blocks 0 and 1 of the Golay family
        let bs = golay_heptads();
        let meet: Vec<usize> = bs.blocks()[0]
            .iter()
            .filter(|p| bs.blocks()[1].contains(p))
            .copied()
            .collect();
        let expected = if meet.len() == 3 { 529 } else { -529 };
        let ip = crate::exactarith::inner_product(sys.vector(23), sys.vector(24)).unwrap();
        assert_eq!(ip, QuadScalar::from_int(expected));
        assert_eq!(sys.norm_sq(), &QuadScalar::from_int(2645));
    }

    #[test]
    fn json_roundtrip_is_byte_exact() {
        let sys = construct_omega(&pair_blockset(5).unwrap(), SignChoice::Plus).unwrap();
        let text = write_json(&sys);
        let back = read_json(&text).unwrap();
        assert_eq!(write_json(&back), text);
        assert_eq!(back.n(), sys.n());
        assert!(read_json("{not json").is_err());
    }
}
