//! Transitive transposition factorizations in the symmetric group and
//! the Hurwitz numbers built from them.
//!
//! Two independent engines count factorizations. The search engine
//! walks tuples depth-first with union-find connectivity and
//! distance-parity pruning. The algebraic engine works in the center of
//! the group algebra: multiplying a fixed permutation by one
//! transposition either cuts a cycle or joins two, with explicit
//! multiplicities, so repeated application of the transposition-sum
//! operator is a small dynamic program over cycle types; transitivity
//! is then recovered by an inclusion-exclusion over the orbit block
//! containing an anchor cycle. The engines share no code beyond the
//! permutation type, which is what makes their agreement a real check.
//!
//! Normalizations: `single_hurwitz` counts factorizations of a fixed
//! representative, scaled by class size and cycle labelings over `d!`;
//! `double_hurwitz_one_part` prepends a full cycle and appends a
//! labeled permutation of type `beta`, which in the class algebra is
//! one coefficient of `C_(d) T^r`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::partition::{partitions_of, Partition};
use crate::perm::{Perm, RollbackDsu};
use crate::rat::{big_binomial, big_factorial, Rat};

/// One counting problem: tuples `(t_1, ..., t_r)` of transpositions
/// with `t_r ... t_1 = target` (rightmost applied first), optionally
/// required to generate a transitive subgroup.
#[derive(Debug, Clone)]
pub struct FactorizationInstance {
    pub target: Perm,
    pub r: u32,
    pub transitive_required: bool,
}

impl FactorizationInstance {
    pub fn new(target_images_one_based: &[usize], r: u32, transitive_required: bool) -> Result<Self> {
        Ok(FactorizationInstance {
            target: Perm::from_one_based_images(target_images_one_based)?,
            r,
            transitive_required,
        })
    }

    /// Instance for the canonical representative of a cycle type; both
    /// engines are conjugation invariant, so the choice is immaterial.
    pub fn for_cycle_type(t: &Partition, r: u32, transitive_required: bool) -> Self {
        FactorizationInstance {
            target: Perm::from_cycle_type(t),
            r,
            transitive_required,
        }
    }

    pub fn degree(&self) -> usize {
        self.target.degree()
    }
}

/// Depth-first search engine.
///
/// Maintains the running product and its inverse for O(1) left
/// multiplication by a transposition, and a rollback union-find for
/// the connectivity requirement. A branch dies when the remaining
/// depth cannot reach the target (minimum transposition distance is
/// `d` minus the cycle count of the quotient, and its parity is
/// forced) or cannot connect the remaining components.
pub fn count_factorizations_dfs(inst: &FactorizationInstance) -> BigUint {
    let d = inst.degree();
    let target = inst.target.images().to_vec();
    let mut partial: Vec<usize> = (0..d).collect();
    let mut inv: Vec<usize> = (0..d).collect();
    let mut dsu = RollbackDsu::new(d);
    let mut count = BigUint::zero();
    let mut seen = vec![0u32; d];
    let mut stamp = 0u32;

    struct Frame<'a> {
        d: usize,
        r: u32,
        transitive: bool,
        target: &'a [usize],
    }

    fn quotient_cycles(
        target: &[usize],
        inv: &[usize],
        seen: &mut [u32],
        stamp: &mut u32,
    ) -> usize {
        // Cycles of target o partial^{-1}.
        *stamp += 1;
        let s = *stamp;
        let mut cycles = 0;
        for start in 0..target.len() {
            if seen[start] == s {
                continue;
            }
            cycles += 1;
            let mut x = start;
            while seen[x] != s {
                seen[x] = s;
                x = target[inv[x]];
            }
        }
        cycles
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        f: &Frame,
        depth: u32,
        partial: &mut Vec<usize>,
        inv: &mut Vec<usize>,
        dsu: &mut RollbackDsu,
        seen: &mut [u32],
        stamp: &mut u32,
        count: &mut BigUint,
    ) {
        let k = f.r - depth;
        let dist = f.d - quotient_cycles(f.target, inv, seen, stamp);
        if k == 0 {
            if dist == 0 && (!f.transitive || dsu.components() == 1) {
                *count += BigUint::one();
            }
            return;
        }
        if dist > k as usize || (k as usize - dist) % 2 == 1 {
            return;
        }
        if f.transitive && (k as usize) < dsu.components() - 1 {
            return;
        }
        // Left multiplication by (i j) swaps the preimages of i and j;
        // it is an involution, so the undo step is the same swap again.
        let lmul = |partial: &mut Vec<usize>, inv: &mut Vec<usize>, i: usize, j: usize| {
            let (a, b) = (inv[i], inv[j]);
            partial[a] = j;
            partial[b] = i;
            inv[i] = b;
            inv[j] = a;
        };
        for i in 0..f.d {
            for j in (i + 1)..f.d {
                lmul(partial, inv, i, j);
                dsu.union(i, j);
                go(f, depth + 1, partial, inv, dsu, seen, stamp, count);
                dsu.undo();
                lmul(partial, inv, i, j);
            }
        }
    }

    let frame = Frame {
        d,
        r: inst.r,
        transitive: inst.transitive_required,
        target: &target,
    };
    go(
        &frame,
        0,
        &mut partial,
        &mut inv,
        &mut dsu,
        &mut seen,
        &mut stamp,
        &mut count,
    );
    count
}

/// Multiplication by the sum of all transpositions, tabulated on cycle
/// types: `moves[mu]` lists `(lambda, m)` where `m` counts the
/// transpositions taking a fixed permutation of type `mu` into class
/// `lambda`.
pub struct ClassAlgebra {
    types: Vec<Partition>,
    index: HashMap<Vec<u32>, usize>,
    moves: Vec<Vec<(usize, u64)>>,
}

impl ClassAlgebra {
    pub fn new(d: u32) -> Result<Self> {
        let types = partitions_of(d)?;
        let index: HashMap<Vec<u32>, usize> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.parts().to_vec(), i))
            .collect();
        let mut moves = Vec::with_capacity(types.len());
        for t in &types {
            let mut out: HashMap<usize, u64> = HashMap::new();
            let parts = t.parts();
            let mut mult: HashMap<u32, u64> = HashMap::new();
            for &p in parts {
                *mult.entry(p).or_insert(0) += 1;
            }
            // Joins: a transposition with one point in a length-a cycle
            // and one in a length-b cycle fuses them; a*b choices per
            // ordered pair of cycles.
            let values: Vec<u32> = {
                let mut v: Vec<u32> = mult.keys().copied().collect();
                v.sort_unstable();
                v
            };
            for (ai, &a) in values.iter().enumerate() {
                for &b in &values[ai..] {
                    let ma = mult[&a];
                    let mb = mult[&b];
                    let pairs = if a == b {
                        if ma < 2 {
                            continue;
                        }
                        ma * (ma - 1) / 2
                    } else {
                        ma * mb
                    };
                    let joined = replace_parts(parts, &[a, b], &[a + b]);
                    let idx = index[&joined];
                    *out.entry(idx).or_insert(0) += pairs * u64::from(a) * u64::from(b);
                }
            }
            // Cuts: both points in one length-c cycle, splitting it
            // into (a, c-a); c transpositions per unequal split, c/2
            // for the symmetric one.
            for (&c, &mc) in &mult {
                for a in 1..=(c / 2) {
                    let b = c - a;
                    let ways = if a < b { u64::from(c) } else { u64::from(c) / 2 };
                    let split = replace_parts(parts, &[c], &[a, b]);
                    let idx = index[&split];
                    *out.entry(idx).or_insert(0) += mc * ways;
                }
            }
            let mut list: Vec<(usize, u64)> = out.into_iter().collect();
            list.sort_unstable();
            moves.push(list);
        }
        Ok(ClassAlgebra { types, index, moves })
    }

    pub fn type_index(&self, t: &Partition) -> Result<usize> {
        self.index.get(t.parts()).copied().ok_or_else(|| {
            Error::InvalidInput(format!("{t} is not a cycle type of this degree"))
        })
    }

    /// One application of the transposition-sum operator to a central
    /// element in the class-sum basis: reading coefficients at a fixed
    /// element of type `mu` pulls from every class one move away.
    pub fn apply_transposition_sum(&self, x: &[BigUint]) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); x.len()];
        for (mu, slot) in out.iter_mut().enumerate() {
            for &(lam, m) in &self.moves[mu] {
                if !x[lam].is_zero() {
                    *slot += &x[lam] * m;
                }
            }
        }
        out
    }

    /// Class-sum coefficients of `C_start * T^r`.
    pub fn power_from(&self, start: &Partition, r: u32) -> Result<Vec<BigUint>> {
        let mut x = vec![BigUint::zero(); self.types.len()];
        x[self.type_index(start)?] = BigUint::one();
        for _ in 0..r {
            x = self.apply_transposition_sum(&x);
        }
        Ok(x)
    }

    pub fn types(&self) -> &[Partition] {
        &self.types
    }
}

fn replace_parts(parts: &[u32], remove: &[u32], add: &[u32]) -> Vec<u32> {
    let mut v = parts.to_vec();
    for &x in remove {
        let pos = v.iter().position(|&p| p == x).expect("part present");
        v.remove(pos);
    }
    v.extend_from_slice(add);
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Algebraic counting engine with memoized power tables and transitive
/// counts, reusable across a sampling grid.
#[derive(Default)]
pub struct HurwitzEngine {
    algebras: HashMap<u32, ClassAlgebra>,
    powers: HashMap<u32, Vec<Vec<BigUint>>>,
    transitive: HashMap<(Vec<u32>, u32), BigUint>,
}

impl HurwitzEngine {
    pub fn new() -> Self {
        Self::default()
    }

    fn algebra(&mut self, d: u32) -> Result<&ClassAlgebra> {
        if !self.algebras.contains_key(&d) {
            self.algebras.insert(d, ClassAlgebra::new(d)?);
        }
        Ok(&self.algebras[&d])
    }

    /// `x`-vector of `T^r` in degree `d` (identity start), cached.
    fn power_row(&mut self, d: u32, r: u32) -> Result<&Vec<BigUint>> {
        self.algebra(d)?;
        let rows = self.powers.entry(d).or_default();
        let alg = &self.algebras[&d];
        if rows.is_empty() {
            let mut x = vec![BigUint::zero(); alg.types().len()];
            let id = alg.index[&vec![1u32; d as usize]];
            x[id] = BigUint::one();
            rows.push(x);
        }
        while rows.len() <= r as usize {
            let next = alg.apply_transposition_sum(rows.last().expect("nonempty"));
            rows.push(next);
        }
        Ok(&rows[r as usize])
    }

    /// Tuples with product in the fixed class representative, no
    /// transitivity: one coefficient of `T^r`.
    pub fn count_unrestricted(&mut self, ty: &Partition, r: u32) -> Result<BigUint> {
        let d = ty.size();
        let idx = self.algebra(d)?.type_index(ty)?;
        Ok(self.power_row(d, r)?[idx].clone())
    }

    /// Transitive count by the orbit-block sieve: tuples whose orbit
    /// block containing the anchor cycle is a proper sub-union of
    /// cycles split as (transitive inside, unrestricted outside) with
    /// an interleaving binomial, and are subtracted from the total.
    pub fn count_transitive(&mut self, ty: &Partition, r: u32) -> Result<BigUint> {
        let key = (ty.parts().to_vec(), r);
        if let Some(v) = self.transitive.get(&key) {
            return Ok(v.clone());
        }
        let mut total = self.count_unrestricted(ty, r)?;
        let parts = ty.parts().to_vec();
        if parts.len() > 1 {
            let anchor = parts[0];
            let mut values: Vec<(u32, u64)> = {
                let mut mult: HashMap<u32, u64> = HashMap::new();
                for &p in &parts {
                    *mult.entry(p).or_insert(0) += 1;
                }
                mult.into_iter().collect()
            };
            values.sort_unstable();
            // Choose how many cycles of each length join the anchor's
            // block; the anchor cycle itself is fixed, hence the -1 on
            // its length's multiplicity.
            let mut choices: Vec<(Vec<u32>, BigUint)> = vec![(Vec::new(), BigUint::one())];
            for &(v, m) in &values {
                let mut next = Vec::new();
                let (lo, avail) = if v == anchor { (1u64, m - 1) } else { (0, m) };
                for (sel, ways) in &choices {
                    for extra in 0..=avail {
                        let take = lo + extra;
                        let w = ways * big_binomial(avail, extra);
                        let mut s = sel.clone();
                        for _ in 0..take {
                            s.push(v);
                        }
                        next.push((s, w));
                    }
                }
                choices = next;
            }
            for (sel, ways) in choices {
                if sel.len() == parts.len() {
                    continue;
                }
                let mut rest = parts.clone();
                for x in &sel {
                    let pos = rest.iter().position(|p| p == x).expect("part present");
                    rest.remove(pos);
                }
                let block_ty = Partition::new(sel)?;
                let rest_ty = Partition::new(rest)?;
                for k in 0..=r {
                    let inner = self.count_transitive(&block_ty, k)?;
                    if inner.is_zero() {
                        continue;
                    }
                    let outer = self.count_unrestricted(&rest_ty, r - k)?;
                    if outer.is_zero() {
                        continue;
                    }
                    total -= &ways * big_binomial(u64::from(r), u64::from(k)) * inner * outer;
                }
            }
        }
        self.transitive.insert(key, total.clone());
        Ok(total)
    }

    /// Engine entry honoring the instance's transitivity flag.
    pub fn count(&mut self, inst: &FactorizationInstance) -> Result<BigUint> {
        let ty = inst.target.cycle_type();
        if inst.transitive_required {
            self.count_transitive(&ty, inst.r)
        } else {
            self.count_unrestricted(&ty, inst.r)
        }
    }

    /// Single Hurwitz number `H^g_alpha`: transitive factorizations of
    /// a type-`alpha` permutation into `r = 2g + d + n - 2`
    /// transpositions, summed over the class with labeled cycles and
    /// divided by `d!`. The class size times the labeling count cancels
    /// down to `T / prod(alpha_i)`, but the normalization is kept
    /// explicit.
    pub fn single_hurwitz(&mut self, g: u32, alpha: &Partition) -> Result<Rat> {
        let d = alpha.size();
        let n = alpha.len() as u32;
        let r = 2 * g + d + n - 2;
        let t = self.count_transitive(alpha, r)?;
        let aut = alpha.automorphism_factor();
        let class_size =
            Rat::from_biguint(big_factorial(u64::from(d))) / (alpha.product() * &aut);
        Ok(class_size * aut * Rat::from_biguint(t) / Rat::from_biguint(big_factorial(u64::from(d))))
    }

    /// One-part double Hurwitz number `H^g_((d), beta)`: a full cycle,
    /// then `r = 2g + n - 1` transpositions, then a labeled permutation
    /// of type `beta`, multiplying to the identity and scaled by
    /// `1/d!`. In class-sum coordinates this is the `beta` coefficient
    /// of `C_(d) T^r` divided by `prod(beta_i)`.
    pub fn double_hurwitz_one_part(&mut self, g: u32, d: u32, beta: &Partition) -> Result<Rat> {
        if beta.size() != d {
            return Err(Error::InvalidInput(format!(
                "beta {beta} is a partition of {}, not of d = {d}",
                beta.size()
            )));
        }
        let n = beta.len() as u32;
        let r = 2 * g + n - 1;
        let alg = self.algebra(d)?;
        let full = Partition::new(vec![d])?;
        let x = alg.power_from(&full, r)?;
        let idx = alg.type_index(beta)?;
        Ok(Rat::from_biguint(x[idx].clone()) / beta.product())
    }
}

/// One-shot transitive (or plain) factorization count via the
/// algebraic engine.
pub fn count_transitive_factorizations(inst: &FactorizationInstance) -> Result<BigUint> {
    HurwitzEngine::new().count(inst)
}
