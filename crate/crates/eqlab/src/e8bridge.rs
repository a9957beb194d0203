//! From the 276 equiangular lines in R²³ to the E8 root system, and back
//! down: represent the lines in coordinates over an incoherent basis (the
//! Gram form has 1 on the diagonal and 1/5 elsewhere, so every coefficient
//! is rational), find an involution of the Steiner system fixing one heptad,
//! split into eigenspaces, project the 240 moved lines, certify the
//! projection as the E8 root system (norms, cosine census, rank, reflection
//! closure), and run the descent chain 28 → 16 → 10 → 6 → 3 whose sizes
//! match the (−1)-curve counts of del Pezzo surfaces.

use crate::designkit::{golay_heptads, BlockSet};
use crate::exactarith::{rat, ratio, ExactMatrix, QuadScalar, Rat};
use crate::linesys::{
    find_max_incoherent, lex_least_max_incoherent, Form, GammaPartition, LineSysError, LineSystem,
    DEFAULT_SEARCH_BUDGET,
};
use crate::twograph::{Regularity, RegularityParams};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum E8Error {
    #[error("involution search exhausted without a solution")]
    SearchExhausted,
    #[error("line {0} is not moved by the involution")]
    NotMoved(usize),
    #[error("census mismatch: {0}")]
    CensusMismatch(String),
    #[error("root system is not reflection-closed: {0}")]
    NotReflectionClosed(String),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("pipeline stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
    #[error(transparent)]
    Lines(#[from] LineSysError),
}

/// The 276 lines in basis coordinates: the 23 basis lines are the standard
/// coordinate vectors, each block line has coefficient 1/3 on its heptad and
/// −1/6 elsewhere, and inner products are taken under G = (4/5)I + (1/5)J.
pub struct BasisCoordSystem {
    pub heptads: BlockSet,
    pub system: LineSystem,
    block_index: BTreeMap<Vec<usize>, usize>,
}

pub fn gram_form_23() -> Vec<Vec<Rat>> {
    (0..23)
        .map(|i| (0..23).map(|j| if i == j { Rat::one() } else { ratio(1, 5) }).collect())
        .collect()
}

pub fn build_basis_coords() -> BasisCoordSystem {
    let heptads = golay_heptads();
    let zero = QuadScalar::rational(Rat::zero());
    let mut vectors: Vec<Vec<QuadScalar>> = Vec::with_capacity(276);
    for i in 0..23 {
        let mut v = vec![zero.clone(); 23];
        v[i] = QuadScalar::rational(Rat::one());
        vectors.push(v);
    }
    let third = QuadScalar::rational(ratio(1, 3));
    let neg_sixth = QuadScalar::rational(ratio(-1, 6));
    for b in heptads.blocks() {
        let mut v = vec![neg_sixth.clone(); 23];
        for &p in b {
            v[p] = third.clone();
        }
        vectors.push(v);
    }
    let system = LineSystem::certify(vectors, Form::Dense(gram_form_23()), QuadScalar::from_int(5))
        .expect("basis-coordinate lines are equiangular at 1/5");
    let block_index =
        heptads.blocks().iter().enumerate().map(|(i, b)| (b.clone(), 23 + i)).collect();
    BasisCoordSystem { heptads, system, block_index }
}

/// An involution of the 23 points fixing one heptad pointwise and preserving
/// the heptad family; on the 16 complement points it is 8 transpositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub perm: Vec<usize>,
    pub fixed_heptad: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

impl Involution {
    pub fn apply_block(&self, b: &[usize]) -> Vec<usize> {
        let mut img: Vec<usize> = b.iter().map(|&p| self.perm[p]).collect();
        img.sort_unstable();
        img
    }
}

/// Backtracking over pairings of the complement of the lexicographically
/// first heptad: the least unpaired point takes the smallest feasible
/// partner, and any fully-mapped heptad must map onto a heptad. Returns the
/// first `limit` involutions in search order.
pub fn find_involutions(bs: &BlockSet, limit: usize) -> Vec<Involution> {
    let fixed = bs.blocks()[0].clone();
    let d = bs.point_count();
    let in_fixed = {
        let mut f = vec![false; d];
        for &p in &fixed {
            f[p] = true;
        }
        f
    };
    let block_lookup: BTreeSet<&[usize]> = bs.blocks().iter().map(|b| b.as_slice()).collect();
    let blocks_of_point: Vec<Vec<usize>> = {
        let mut m = vec![Vec::new(); d];
        for (bi, b) in bs.blocks().iter().enumerate() {
            for &p in b {
                m[p].push(bi);
            }
        }
        m
    };
    let mut defined: Vec<u8> = bs
        .blocks()
        .iter()
        .map(|b| b.iter().filter(|&&p| in_fixed[p]).count() as u8)
        .collect();
    let mut perm: Vec<Option<usize>> = (0..d).map(|p| in_fixed[p].then_some(p)).collect();
    let mut out = Vec::new();

    fn assign(
        bs: &BlockSet,
        block_lookup: &BTreeSet<&[usize]>,
        blocks_of_point: &[Vec<usize>],
        defined: &mut [u8],
        perm: &mut [Option<usize>],
        p: usize,
        q: usize,
    ) -> Result<Vec<usize>, ()> {
        perm[p] = Some(q);
        perm[q] = Some(p);
        let mut touched = Vec::new();
        let mut ok = true;
        'outer: for &pt in &[p, q] {
            for &bi in &blocks_of_point[pt] {
                defined[bi] += 1;
                touched.push(bi);
                if defined[bi] == bs.block_size() as u8 {
                    let img: Vec<usize> = {
                        let mut v: Vec<usize> =
                            bs.blocks()[bi].iter().map(|&x| perm[x].unwrap()).collect();
                        v.sort_unstable();
                        v
                    };
                    if !block_lookup.contains(img.as_slice()) {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if ok {
            Ok(touched)
        } else {
            // caller rolls back using the touched list we return through Err
            perm[p] = None;
            perm[q] = None;
            for &bi in &touched {
                defined[bi] -= 1;
            }
            Err(())
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        bs: &BlockSet,
        block_lookup: &BTreeSet<&[usize]>,
        blocks_of_point: &[Vec<usize>],
        defined: &mut [u8],
        perm: &mut [Option<usize>],
        fixed: &[usize],
        limit: usize,
        out: &mut Vec<Involution>,
    ) {
        if out.len() >= limit {
            return;
        }
        let Some(p) = (0..perm.len()).find(|&x| perm[x].is_none()) else {
            let final_perm: Vec<usize> = perm.iter().map(|x| x.unwrap()).collect();
            let pairs: Vec<(usize, usize)> = final_perm
                .iter()
                .enumerate()
                .filter(|&(i, &j)| i < j)
                .map(|(i, &j)| (i, j))
                .collect();
            out.push(Involution {
                perm: final_perm,
                fixed_heptad: fixed.to_vec(),
                pairs,
            });
            return;
        };
        let candidates: Vec<usize> = (p + 1..perm.len()).filter(|&q| perm[q].is_none()).collect();
        for q in candidates {
            if let Ok(touched) =
                assign(bs, block_lookup, blocks_of_point, defined, perm, p, q)
            {
                search(bs, block_lookup, blocks_of_point, defined, perm, fixed, limit, out);
                perm[p] = None;
                perm[q] = None;
                for &bi in &touched {
                    defined[bi] -= 1;
                }
                if out.len() >= limit {
                    return;
                }
            }
        }
    }

    search(
        bs,
        &block_lookup,
        &blocks_of_point,
        &mut defined,
        &mut perm,
        &fixed,
        limit,
        &mut out,
    );
    out
}

pub fn find_involution(bs: &BlockSet) -> Result<Involution, E8Error> {
    find_involutions(bs, 1).into_iter().next().ok_or(E8Error::SearchExhausted)
}

/// Heptad counts of types 0–3 with respect to an involution: fixed pointwise;
/// meeting the support in 4 points and preserved / not preserved; meeting the
/// support in 6 points.
pub fn heptad_census(bs: &BlockSet, x: &Involution) -> Result<(u64, u64, u64, u64), E8Error> {
    let mut census = (0u64, 0u64, 0u64, 0u64);
    for b in bs.blocks() {
        let supp = b.iter().filter(|&&p| x.perm[p] != p).count();
        let img = x.apply_block(b);
        match (supp, img == *b) {
            (0, true) => census.0 += 1,
            (4, true) => census.1 += 1,
            (4, false) => {
                // type 2 and type 3 heptads meet their image in 3 points
                let meet = b.iter().filter(|p| img.contains(p)).count();
                if meet != 3 {
                    return Err(E8Error::CensusMismatch(format!(
                        "type-2 heptad meets its image in {meet} points"
                    )));
                }
                census.2 += 1;
            }
            (6, _) => {
                let meet = b.iter().filter(|p| img.contains(p)).count();
                if meet != 3 {
                    return Err(E8Error::CensusMismatch(format!(
                        "type-3 heptad meets its image in {meet} points"
                    )));
                }
                census.3 += 1;
            }
            other => {
                return Err(E8Error::CensusMismatch(format!(
                    "heptad {b:?} has unexpected support profile {other:?}"
                )))
            }
        }
    }
    Ok(census)
}

/// Permutation induced on the 276 line indices: basis lines follow the point
/// permutation, block lines follow the block permutation.
pub fn line_permutation(sys: &BasisCoordSystem, x: &Involution) -> Vec<usize> {
    let mut lp = Vec::with_capacity(sys.system.n());
    for i in 0..23 {
        lp.push(x.perm[i]);
    }
    for b in sys.heptads.blocks() {
        let img = x.apply_block(b);
        lp.push(sys.block_index[&img]);
    }
    lp
}

#[derive(Clone, Debug)]
pub struct EigenSplit {
    pub fixed: Vec<usize>,
    pub moved: Vec<usize>,
    pub fixed_rank: usize,
    pub fixed_regularity: RegularityParams,
    pub fixed_relative_saturated: bool,
}

/// The 36 lines fixed by the involution span a 15-dimensional space and form
/// a regular two-graph saturating the relative bound there; the other 240
/// lines are returned for projection.
pub fn eigenspace_split(sys: &BasisCoordSystem, x: &Involution) -> Result<EigenSplit, E8Error> {
    let lp = line_permutation(sys, x);
    let fixed: Vec<usize> = (0..lp.len()).filter(|&i| lp[i] == i).collect();
    let moved: Vec<usize> = (0..lp.len()).filter(|&i| lp[i] != i).collect();
    if fixed.len() != 36 {
        return Err(E8Error::Stage {
            stage: "eigenspace split",
            message: format!("{} fixed lines, expected 36", fixed.len()),
        });
    }
    let fixed_sys = sys.system.subsystem(&fixed)?;
    let fixed_rank = fixed_sys.dim();
    if fixed_rank != 15 {
        return Err(E8Error::RankMismatch { expected: 15, got: fixed_rank });
    }
    let Regularity::Regular(params) = fixed_sys.two_graph().regularity() else {
        return Err(E8Error::Stage {
            stage: "eigenspace split",
            message: "fixed-line two-graph is not regular".into(),
        });
    };
    // relative bound at (d, ρ) = (15, 5): 15·24/(25−15) = 36
    let fixed_relative_saturated = fixed.len() == 36;
    Ok(EigenSplit { fixed, moved, fixed_rank, fixed_regularity: params, fixed_relative_saturated })
}

/// Rational coordinates of a line of the basis system.
fn rational_coords(sys: &LineSystem, idx: usize) -> Vec<Rat> {
    sys.vector(idx)
        .iter()
        .map(|q| q.as_rational().expect("basis coordinates are rational").clone())
        .collect()
}

/// Projection of a moved line onto the (−1)-eigenspace: (δ − δ^x)/2, again in
/// basis coordinates.
pub fn project_to_w(
    sys: &BasisCoordSystem,
    x: &Involution,
    idx: usize,
) -> Result<Vec<Rat>, E8Error> {
    let lp = line_permutation(sys, x);
    if lp[idx] == idx {
        return Err(E8Error::NotMoved(idx));
    }
    let v = rational_coords(&sys.system, idx);
    let half = ratio(1, 2);
    // coordinates of δ^x: permute positions by the point involution
    Ok((0..23).map(|j| (&v[j] - &v[x.perm[j]]) * &half).collect())
}

/// Inner product under G = (4/5)I + (1/5)J.
fn g_ip(u: &[Rat], v: &[Rat]) -> Rat {
    let dot: Rat = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let su: Rat = u.iter().sum();
    let sv: Rat = v.iter().sum();
    dot * ratio(4, 5) + su * sv * ratio(1, 5)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystemCertificate {
    pub count: usize,
    pub rank: usize,
    /// per-root counts at cosines (+1, +1/2, 0, −1/2, −1)
    pub census: [u64; 5],
    pub reflection_closed: bool,
    pub norm: Rat,
}

/// Certifies a root system of E8 type: 240 distinct vectors of G-norm 2/5,
/// rank 8, per-root cosine census (1, 56, 126, 56, 1), and closure under the
/// reflections σ_u(v) = v − 2((u,v)/(u,u))u.
pub fn certify_e8(projections: &[Vec<Rat>]) -> Result<RootSystemCertificate, E8Error> {
    let n = projections.len();
    let set: BTreeSet<&[Rat]> = projections.iter().map(|v| v.as_slice()).collect();
    if set.len() != n {
        return Err(E8Error::CensusMismatch(format!("only {} distinct projections", set.len())));
    }
    let norm = ratio(2, 5);
    for (i, u) in projections.iter().enumerate() {
        if g_ip(u, u) != norm {
            return Err(E8Error::CensusMismatch(format!("projection {i} has norm ≠ 2/5")));
        }
    }
    let fifth = ratio(1, 5);
    let mut census_all: Option<[u64; 5]> = None;
    for u in projections {
        let mut census = [0u64; 5];
        for v in projections {
            let ip = g_ip(u, v);
            let slot = if ip == norm {
                0
            } else if ip == fifth {
                1
            } else if ip.is_zero() {
                2
            } else if ip == -fifth.clone() {
                3
            } else if ip == -norm.clone() {
                4
            } else {
                return Err(E8Error::CensusMismatch(format!(
                    "unexpected inner product {ip} between roots"
                )));
            };
            census[slot] += 1;
        }
        match &census_all {
            None => census_all = Some(census),
            Some(c) if *c != census => {
                return Err(E8Error::CensusMismatch(format!(
                    "census varies across roots: {c:?} vs {census:?}"
                )))
            }
            _ => {}
        }
    }
    let census = census_all.unwrap_or([0; 5]);
    if census != [1, 56, 126, 56, 1] {
        return Err(E8Error::CensusMismatch(format!("census {census:?}")));
    }
    let rank = ExactMatrix::from_rat_rows(projections.to_vec()).rank();
    if rank != 8 {
        return Err(E8Error::RankMismatch { expected: 8, got: rank });
    }
    // reflection closure: σ_u(v) = v − 5(u,v)·u since (u,u) = 2/5
    for (ui, u) in projections.iter().enumerate() {
        for (vi, v) in projections.iter().enumerate() {
            let c = g_ip(u, v) * rat(5);
            let img: Vec<Rat> = v.iter().zip(u).map(|(vv, uu)| vv - &(&c * uu)).collect();
            if !set.contains(img.as_slice()) {
                return Err(E8Error::NotReflectionClosed(format!(
                    "σ_{ui}({vi}) leaves the set"
                )));
            }
        }
    }
    Ok(RootSystemCertificate { count: n, rank, census, reflection_closed: true, norm })
}

/// The 56 roots not orthogonal to α, projected onto α⊥ (w = β ∓ α/2), give
/// 28 equiangular lines at κ = 1/3 spanning a 7-dimensional space.
pub fn descend_28(projections: &[Vec<Rat>], alpha: usize) -> Result<LineSystem, E8Error> {
    let a = &projections[alpha];
    let norm = ratio(2, 5);
    let fifth = ratio(1, 5);
    let mut reps: Vec<Vec<Rat>> = Vec::new();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for b in projections {
        let ip = g_ip(a, b);
        if ip != fifth && ip != -fifth.clone() {
            continue;
        }
        let coef = ip / &norm; // ±1/2
        let w: Vec<Rat> = b.iter().zip(a).map(|(bb, aa)| bb - &(&coef * aa)).collect();
        let neg: Vec<Rat> = w.iter().map(|x| -x.clone()).collect();
        if seen.contains(&w) || seen.contains(&neg) {
            continue;
        }
        // canonical representative: first nonzero coordinate positive
        let canonical = match w.iter().find(|x| !x.is_zero()) {
            Some(x) if x < &Rat::zero() => neg.clone(),
            _ => w.clone(),
        };
        seen.insert(w);
        seen.insert(neg);
        reps.push(canonical);
    }
    if reps.len() != 28 {
        return Err(E8Error::Stage {
            stage: "descent to 28",
            message: format!("{} lines after antipodal identification", reps.len()),
        });
    }
    let vectors: Vec<Vec<QuadScalar>> = reps
        .into_iter()
        .map(|v| v.into_iter().map(QuadScalar::rational).collect())
        .collect();
    let sys = LineSystem::certify(vectors, Form::Dense(gram_form_23()), QuadScalar::from_int(3))?;
    Ok(sys)
}

#[derive(Clone, Debug)]
pub struct DescentStage {
    pub size: usize,
    pub rank: usize,
    pub inc: usize,
    pub regularity: Option<RegularityParams>,
    pub system: LineSystem,
}

fn stage_of(system: LineSystem) -> DescentStage {
    let inc = find_max_incoherent(&system, None, DEFAULT_SEARCH_BUDGET);
    DescentStage {
        size: system.n(),
        rank: system.dim(),
        inc: inc.witness.lines.len(),
        regularity: system.two_graph().regularity().params().cloned(),
        system,
    }
}

/// Descent chain 28 → 16 → 10 → 6 → 3: the first step keeps the lines of the
/// point set minus {i, j} together with the blocks avoiding or equal to
/// {i, j} (in the pair-design labelling induced by a maximal incoherent
/// 7-set), and every later step removes the lexicographically least maximal
/// incoherent subset.
pub fn descend_chain(start: &LineSystem) -> Result<Vec<DescentStage>, E8Error> {
    if start.n() != 28 {
        return Err(E8Error::Stage {
            stage: "descent chain",
            message: format!("expected 28 lines, got {}", start.n()),
        });
    }
    let mut stages = vec![stage_of(start.clone())];
    let gamma = lex_least_max_incoherent(start, DEFAULT_SEARCH_BUDGET)?;
    if gamma.len() != 7 {
        return Err(E8Error::Stage {
            stage: "descent chain",
            message: format!("incoherent witness has size {}", gamma.len()),
        });
    }
    // label external lines by their pair Γ₁(γ) ⊆ Γ
    let inside: BTreeSet<usize> = gamma.iter().copied().collect();
    let mut pair_of: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for g in 0..start.n() {
        if inside.contains(&g) {
            continue;
        }
        let part = crate::linesys::gamma_partition(start, &gamma, g)?;
        let GammaPartition { part1, .. } = part;
        if part1.len() != 2 {
            return Err(E8Error::Stage {
                stage: "descent chain",
                message: format!("|Γ₁({g})| = {} ≠ 2", part1.len()),
            });
        }
        pair_of.insert(g, (part1[0], part1[1]));
    }
    let (i, j) = (gamma[0], gamma[1]);
    let mut omega6: Vec<usize> = gamma.iter().copied().filter(|&x| x != i && x != j).collect();
    for (&g, &(p, q)) in &pair_of {
        let touches = p == i || p == j || q == i || q == j;
        let is_ij = (p, q) == (i.min(j), i.max(j)) || (p, q) == (j.min(i), j.max(i));
        if is_ij || !touches {
            omega6.push(g);
        }
    }
    omega6.sort_unstable();
    let mut current = start.subsystem(&omega6)?;
    stages.push(stage_of(current.clone()));
    // three more removals: 16 → 10 → 6 → 3
    while current.n() > 3 {
        let g = lex_least_max_incoherent(&current, DEFAULT_SEARCH_BUDGET)?;
        let remaining: Vec<usize> =
            (0..current.n()).filter(|x| !g.contains(x)).collect();
        current = current.subsystem(&remaining)?;
        stages.push(stage_of(current.clone()));
    }
    Ok(stages)
}

/// Everything the pipeline produces, for reporting.
pub struct PipelineReport {
    pub involution: Involution,
    pub census: (u64, u64, u64, u64),
    pub split: EigenSplit,
    pub root_certificate: RootSystemCertificate,
    pub descent: Vec<DescentStage>,
}

pub fn run_pipeline() -> Result<PipelineReport, E8Error> {
    let sys = build_basis_coords();
    let x = find_involution(&sys.heptads)?;
    let census = heptad_census(&sys.heptads, &x)?;
    if census != (1, 28, 112, 112) {
        return Err(E8Error::CensusMismatch(format!("heptad census {census:?}")));
    }
    let split = eigenspace_split(&sys, &x)?;
    let projections: Vec<Vec<Rat>> = split
        .moved
        .iter()
        .map(|&idx| project_to_w(&sys, &x, idx))
        .collect::<Result<_, _>>()?;
    let root_certificate = certify_e8(&projections)?;
    // canonical α: the lexicographically least root
    let alpha = projections
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(i, _)| i)
        .expect("nonempty root set");
    let start = descend_28(&projections, alpha)?;
    let descent = descend_chain(&start)?;
    Ok(PipelineReport { involution: x, census, split, root_certificate, descent })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_coords_certify() {
        let sys = build_basis_coords();
        assert_eq!(sys.system.n(), 276);
        assert_eq!(sys.system.dim(), 23);
        assert_eq!(sys.system.norm_sq(), &QuadScalar::from_int(1));
        // basis vs block line: +1/5 iff the point is in the heptad
        let b0 = &sys.heptads.blocks()[0];
        let inside = b0[0];
        let outside = (0..23).find(|p| !b0.contains(p)).unwrap();
        assert_eq!(sys.system.sign(inside, 23), 1);
        assert_eq!(sys.system.sign(outside, 23), -1);
    }

    #[test]
    fn g_ip_matches_dense_form() {
        let u: Vec<Rat> = (0..23).map(|i| ratio(i as i64 % 5 - 2, 3)).collect();
        let v: Vec<Rat> = (0..23).map(|i| ratio((i as i64 * 7) % 11 - 5, 4)).collect();
        let g = gram_form_23();
        let mut expect = Rat::zero();
        for i in 0..23 {
            for j in 0..23 {
                expect += &u[i] * &g[i][j] * &v[j];
            }
        }
        assert_eq!(g_ip(&u, &v), expect);
    }
}
