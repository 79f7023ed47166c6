//! Semisimple two dimensional topological field theory.
//!
//! A semisimple Frobenius algebra splits as `A = (+)_i k e_i` with
//! `e_i e_j = delta_ij e_i` and is classified by the pairing values
//! `D_i = (e_i, e_i)`, all nonzero. In the normalized basis
//! `~e_i = e_i / sqrt(D_i)` every connected cobordism of genus `g`
//! with `p` inputs and `q` outputs acts diagonally, sending
//! `~e_i^(x)p` to `D_i^(chi/2) ~e_i^(x)q` with
//! `chi = 2 - 2g - p - q`. Half powers of `D_i` are kept exact as
//! `(exponent of sqrt(D_i), rational factor)` pairs, so no irrational
//! arithmetic ever happens; whenever a closed surface or a closed loop
//! of compositions forms, the exponent parity is even and the value
//! collapses to a rational.
//!
//! Two independent evaluators are provided. The direct one applies the
//! `chi/2` rule per component. The second knows nothing about `chi`: it
//! decomposes each component into caps, cylinders, and pairs of pants
//! and pushes basis tensors through the generator maps in the
//! unnormalized basis, where multiplication, unit, counit, and
//! comultiplication all have rational matrix entries. Their agreement,
//! together with gluing functoriality, is what the test suite pins
//! down. Note the pair of pants itself evaluates to `D_i^(-1/2)`
//! (`chi = -1`): capping one of its inputs must produce the identity
//! cylinder, and the cap contributes `D_i^(1/2)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::RollbackDsu;
use crate::rat::Rat;

/// Semisimple Frobenius structure: the list of pairing values
/// `D_i = (e_i, e_i)`, each nonzero.
#[derive(Debug, Clone)]
pub struct FrobeniusData {
    deltas: Vec<Rat>,
}

impl FrobeniusData {
    pub fn new(deltas: Vec<Rat>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::InvalidInput("empty Frobenius structure".into()));
        }
        if let Some(pos) = deltas.iter().position(Rat::is_zero) {
            return Err(Error::InvalidInput(format!(
                "pairing value {pos} is zero; the structure is not semisimple"
            )));
        }
        Ok(FrobeniusData { deltas })
    }

    pub fn n(&self) -> usize {
        self.deltas.len()
    }

    pub fn delta(&self, i: usize) -> &Rat {
        &self.deltas[i]
    }
}

/// One connected piece of a cobordism.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Component {
    pub g: u32,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    #[serde(rename = "out")]
    pub outputs: Vec<String>,
}

impl Component {
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * i64::from(self.g) - self.inputs.len() as i64 - self.outputs.len() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.inputs.is_empty() && self.outputs.is_empty()
    }
}

/// An oriented surface with labelled boundary circles, possibly
/// disconnected, with a global ordering on input and output ports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cobordism {
    pub components: Vec<Component>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Cobordism {
    pub fn new(
        components: Vec<Component>,
        inputs: Vec<String>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let cob = Cobordism {
            components,
            inputs,
            outputs,
        };
        cob.validate()?;
        Ok(cob)
    }

    /// Single connected component whose global port order is its own.
    pub fn connected(g: u32, inputs: &[&str], outputs: &[&str]) -> Result<Self> {
        let ins: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
        let outs: Vec<String> = outputs.iter().map(|s| s.to_string()).collect();
        Cobordism::new(
            vec![Component {
                g,
                inputs: ins.clone(),
                outputs: outs.clone(),
            }],
            ins,
            outs,
        )
    }

    fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.components {
            for l in c.inputs.iter().chain(&c.outputs) {
                if !seen.insert(l.clone()) {
                    return Err(Error::InvalidInput(format!("duplicate port label {l:?}")));
                }
            }
        }
        let comp_ins: BTreeSet<&String> =
            self.components.iter().flat_map(|c| &c.inputs).collect();
        let comp_outs: BTreeSet<&String> =
            self.components.iter().flat_map(|c| &c.outputs).collect();
        let glob_ins: BTreeSet<&String> = self.inputs.iter().collect();
        let glob_outs: BTreeSet<&String> = self.outputs.iter().collect();
        if glob_ins.len() != self.inputs.len() || glob_outs.len() != self.outputs.len() {
            return Err(Error::InvalidInput("repeated global port".into()));
        }
        if comp_ins != glob_ins || comp_outs != glob_outs {
            return Err(Error::InvalidInput(
                "global port lists do not match the component ports".into(),
            ));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.components
            .iter()
            .map(Component::euler_characteristic)
            .sum()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cob: Cobordism = serde_json::from_str(s)?;
        cob.validate()?;
        Ok(cob)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// `coeff * sqrt(D_i)^sqrt_exp`, the exact form of every diagonal
/// entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPower {
    pub sqrt_exp: i64,
    pub coeff: Rat,
}

impl HalfPower {
    pub fn one() -> Self {
        HalfPower {
            sqrt_exp: 0,
            coeff: Rat::one(),
        }
    }

    pub fn mul(&self, other: &HalfPower) -> HalfPower {
        let mut coeff = self.coeff.clone();
        coeff *= &other.coeff;
        HalfPower {
            sqrt_exp: self.sqrt_exp + other.sqrt_exp,
            coeff,
        }
    }

    /// Folds even square-root powers into the rational factor; the
    /// residual exponent is 0 or 1.
    pub fn canonical(&self, delta: &Rat) -> Result<(u8, Rat)> {
        let rem = self.sqrt_exp.rem_euclid(2);
        let mut folded = self.coeff.clone();
        folded *= &delta.pow((self.sqrt_exp - rem) / 2)?;
        Ok((rem as u8, folded))
    }

    /// The rational value when the exponent is even.
    pub fn as_rational(&self, delta: &Rat) -> Result<Rat> {
        let (rem, folded) = self.canonical(delta)?;
        if rem != 0 {
            return Err(Error::Integrity(format!(
                "odd square-root exponent {} where an integer power was forced",
                self.sqrt_exp
            )));
        }
        Ok(folded)
    }
}

/// One tensor factor of a block-diagonal map: the listed global slots
/// are forced to share an index `i` and are scaled by `entries[i]`.
#[derive(Debug, Clone)]
pub struct Block {
    pub in_slots: Vec<usize>,
    pub out_slots: Vec<usize>,
    entries: Vec<HalfPower>,
}

impl Block {
    pub fn entry(&self, i: usize) -> &HalfPower {
        &self.entries[i]
    }
}

/// Diagonal map `A^(x)p -> A^(x)q` factored over the components that
/// produced it. `scalar` collects closed loops formed by composition.
#[derive(Debug, Clone)]
pub struct BlockDiagonalMap {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub scalar: Rat,
    blocks: Vec<Block>,
}

/// Applies the `chi/2` rule componentwise.
pub fn evaluate_cobordism(cob: &Cobordism, frob: &FrobeniusData) -> Result<BlockDiagonalMap> {
    let in_pos: BTreeMap<&String, usize> =
        cob.inputs.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let out_pos: BTreeMap<&String, usize> =
        cob.outputs.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let mut blocks = Vec::with_capacity(cob.components.len());
    for c in &cob.components {
        if c.is_closed() {
            return Err(Error::InvalidInput(
                "closed component; use closed_partition_function".into(),
            ));
        }
        let chi = c.euler_characteristic();
        let mut in_slots: Vec<usize> = c.inputs.iter().map(|l| in_pos[l]).collect();
        let mut out_slots: Vec<usize> = c.outputs.iter().map(|l| out_pos[l]).collect();
        in_slots.sort_unstable();
        out_slots.sort_unstable();
        blocks.push(Block {
            in_slots,
            out_slots,
            entries: vec![
                HalfPower {
                    sqrt_exp: chi,
                    coeff: Rat::one(),
                };
                frob.n()
            ],
        });
    }
    Ok(BlockDiagonalMap {
        n: frob.n(),
        p: cob.inputs.len(),
        q: cob.outputs.len(),
        scalar: Rat::one(),
        blocks,
    })
}

impl BlockDiagonalMap {
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Composition `self` then `other`: output slot `j` of `self`
    /// feeds input slot `j` of `other`. Loops that close reduce to
    /// rational factors in `scalar`.
    pub fn then(&self, other: &BlockDiagonalMap, frob: &FrobeniusData) -> Result<BlockDiagonalMap> {
        if self.q != other.p || self.n != other.n || self.n != frob.n() {
            return Err(Error::InvalidInput(format!(
                "cannot wire {} outputs into {} inputs (or mismatched dimension)",
                self.q, other.p
            )));
        }
        let na = self.blocks.len();
        let mut owner_out = vec![usize::MAX; self.q];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &s in &b.out_slots {
                owner_out[s] = bi;
            }
        }
        let mut owner_in = vec![usize::MAX; other.p];
        for (bi, b) in other.blocks.iter().enumerate() {
            for &s in &b.in_slots {
                owner_in[s] = bi;
            }
        }
        let mut dsu = RollbackDsu::new(na + other.blocks.len());
        for j in 0..self.q {
            dsu.union(owner_out[j], na + owner_in[j]);
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>, Vec<HalfPower>)> = BTreeMap::new();
        let one = vec![HalfPower::one(); self.n];
        for (node, block, from_self) in self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b, true))
            .chain(
                other
                    .blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| (na + i, b, false)),
            )
        {
            let root = dsu.find(node);
            let entry = groups
                .entry(root)
                .or_insert_with(|| (Vec::new(), Vec::new(), one.clone()));
            if from_self {
                entry.0.extend_from_slice(&block.in_slots);
            } else {
                entry.1.extend_from_slice(&block.out_slots);
            }
            for i in 0..self.n {
                entry.2[i] = entry.2[i].mul(&block.entries[i]);
            }
        }
        let mut scalar = self.scalar.clone();
        scalar *= &other.scalar;
        let mut blocks = Vec::new();
        for (_, (mut ins, mut outs, entries)) in groups {
            if ins.is_empty() && outs.is_empty() {
                let mut trace = Rat::zero();
                for (i, e) in entries.iter().enumerate() {
                    trace += &e.as_rational(frob.delta(i))?;
                }
                scalar *= &trace;
                continue;
            }
            ins.sort_unstable();
            outs.sort_unstable();
            blocks.push(Block {
                in_slots: ins,
                out_slots: outs,
                entries,
            });
        }
        Ok(BlockDiagonalMap {
            n: self.n,
            p: self.p,
            q: other.q,
            scalar,
            blocks,
        })
    }

    /// Equality as linear maps, comparing canonical entry forms and the
    /// slot partition.
    pub fn equivalent(&self, other: &BlockDiagonalMap, frob: &FrobeniusData) -> Result<bool> {
        if self.n != other.n || self.p != other.p || self.q != other.q {
            return Ok(false);
        }
        if self.scalar != other.scalar {
            return Ok(false);
        }
        let key = |b: &Block| (b.in_slots.clone(), b.out_slots.clone());
        let mut a: Vec<&Block> = self.blocks.iter().collect();
        let mut b: Vec<&Block> = other.blocks.iter().collect();
        a.sort_by_key(|x| key(x));
        b.sort_by_key(|x| key(x));
        if a.len() != b.len() {
            return Ok(false);
        }
        for (x, y) in a.iter().zip(&b) {
            if key(x) != key(y) {
                return Ok(false);
            }
            for i in 0..self.n {
                if x.entries[i].canonical(frob.delta(i))? != y.entries[i].canonical(frob.delta(i))?
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Dense matrix in the unnormalized basis, rows indexed by output
    /// multi-indices (big-endian in slot order), columns by inputs.
    pub fn matrix(&self, frob: &FrobeniusData) -> Result<Vec<Vec<Rat>>> {
        let rows = self.n.pow(self.q as u32);
        let cols = self.n.pow(self.p as u32);
        let mut eps: Vec<Vec<Rat>> = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let shift = (b.in_slots.len() as i64) - (b.out_slots.len() as i64);
            let mut per_i = Vec::with_capacity(self.n);
            for i in 0..self.n {
                let adjusted = HalfPower {
                    sqrt_exp: b.entries[i].sqrt_exp + shift,
                    coeff: b.entries[i].coeff.clone(),
                };
                per_i.push(adjusted.as_rational(frob.delta(i))?);
            }
            eps.push(per_i);
        }
        let mut out = vec![vec![Rat::zero(); cols]; rows];
        for (row, m) in out.iter_mut().enumerate() {
            let out_digits = digits(row, self.n, self.q);
            for (col, cell) in m.iter_mut().enumerate() {
                let in_digits = digits(col, self.n, self.p);
                let mut val = self.scalar.clone();
                let mut ok = true;
                for (b, per_i) in self.blocks.iter().zip(&eps) {
                    let idx = b
                        .in_slots
                        .first()
                        .map(|&s| in_digits[s])
                        .or_else(|| b.out_slots.first().map(|&s| out_digits[s]))
                        .expect("block with no slots");
                    if b.in_slots.iter().any(|&s| in_digits[s] != idx)
                        || b.out_slots.iter().any(|&s| out_digits[s] != idx)
                    {
                        ok = false;
                        break;
                    }
                    val *= &per_i[idx];
                }
                if ok {
                    *cell = val;
                }
            }
        }
        Ok(out)
    }
}

fn digits(mut idx: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut d = vec![0usize; arity];
    for slot in (0..arity).rev() {
        d[slot] = idx % n;
        idx /= n;
    }
    d
}

/// `sum_i D_i^(1 - g)`, the invariant of the closed genus-`g` surface.
pub fn closed_partition_function(g: u32, frob: &FrobeniusData) -> Result<Rat> {
    let e = 1 - i64::from(g);
    let mut z = Rat::zero();
    for i in 0..frob.n() {
        z += &frob.delta(i).pow(e)?;
    }
    Ok(z)
}

/// Surgery on labelled ports: each matched `(output, input)` pair is
/// glued. Merging two distinct components adds their genera; gluing
/// two ports already on one component adds a handle.
pub fn self_glue(cob: &Cobordism, matching: &[(String, String)]) -> Result<Cobordism> {
    let mut comp_of: BTreeMap<&String, usize> = BTreeMap::new();
    for (ci, c) in cob.components.iter().enumerate() {
        for l in c.inputs.iter().chain(&c.outputs) {
            comp_of.insert(l, ci);
        }
    }
    let out_set: BTreeSet<&String> = cob.outputs.iter().collect();
    let in_set: BTreeSet<&String> = cob.inputs.iter().collect();
    let mut used = BTreeSet::new();
    let mut dsu = RollbackDsu::new(cob.components.len());
    let mut genus: Vec<u32> = cob.components.iter().map(|c| c.g).collect();
    for (o, i) in matching {
        if !out_set.contains(o) || !in_set.contains(i) {
            return Err(Error::InvalidInput(format!(
                "matching ({o:?}, {i:?}) is not an (output, input) pair"
            )));
        }
        if !used.insert(o.clone()) || !used.insert(i.clone()) {
            return Err(Error::InvalidInput(format!(
                "port used twice in the matching near ({o:?}, {i:?})"
            )));
        }
        let (ro, ri) = (dsu.find(comp_of[o]), dsu.find(comp_of[i]));
        if ro == ri {
            genus[ro] += 1;
        } else {
            let sum = genus[ro] + genus[ri];
            dsu.union(ro, ri);
            genus[dsu.find(ro)] = sum;
        }
    }
    let mut grouped: BTreeMap<usize, Component> = BTreeMap::new();
    for (ci, c) in cob.components.iter().enumerate() {
        let root = dsu.find(ci);
        let entry = grouped.entry(root).or_insert_with(|| Component {
            g: genus[root],
            inputs: Vec::new(),
            outputs: Vec::new(),
        });
        entry.g = genus[root];
        for l in &c.inputs {
            if !used.contains(l) {
                entry.inputs.push(l.clone());
            }
        }
        for l in &c.outputs {
            if !used.contains(l) {
                entry.outputs.push(l.clone());
            }
        }
    }
    Cobordism::new(
        grouped.into_values().collect(),
        cob.inputs
            .iter()
            .filter(|l| !used.contains(*l))
            .cloned()
            .collect(),
        cob.outputs
            .iter()
            .filter(|l| !used.contains(*l))
            .cloned()
            .collect(),
    )
}

/// Disjoint union followed by gluing `a`'s outputs to `b`'s inputs
/// along the matching.
pub fn glue(a: &Cobordism, b: &Cobordism, matching: &[(String, String)]) -> Result<Cobordism> {
    let labels_a: BTreeSet<&String> = a
        .components
        .iter()
        .flat_map(|c| c.inputs.iter().chain(&c.outputs))
        .collect();
    for c in &b.components {
        for l in c.inputs.iter().chain(&c.outputs) {
            if labels_a.contains(l) {
                return Err(Error::InvalidInput(format!(
                    "label {l:?} appears in both cobordisms"
                )));
            }
        }
    }
    for (o, i) in matching {
        if !a.outputs.contains(o) || !b.inputs.contains(i) {
            return Err(Error::InvalidInput(format!(
                "matching ({o:?}, {i:?}) must pair an output of the first with an input of the second"
            )));
        }
    }
    let mut components = a.components.clone();
    components.extend(b.components.iter().cloned());
    let mut inputs = a.inputs.clone();
    inputs.extend(b.inputs.iter().cloned());
    let mut outputs = a.outputs.clone();
    outputs.extend(b.outputs.iter().cloned());
    let union = Cobordism::new(components, inputs, outputs)?;
    self_glue(&union, matching)
}

/// Tensor in the unnormalized basis, coordinates over multi-indices
/// with slot 0 as the most significant digit.
struct EpsTensor {
    n: usize,
    arity: usize,
    coords: Vec<Rat>,
}

impl EpsTensor {
    fn basis(n: usize, digits_: &[usize]) -> Self {
        let arity = digits_.len();
        let mut coords = vec![Rat::zero(); n.pow(arity as u32)];
        let mut idx = 0usize;
        for &d in digits_ {
            idx = idx * n + d;
        }
        coords[idx] = Rat::one();
        EpsTensor {
            n,
            arity,
            coords,
        }
    }

    /// `1 = sum_i e_i`, the image of the cap.
    fn unit(n: usize) -> Self {
        EpsTensor {
            n,
            arity: 1,
            coords: vec![Rat::one(); n],
        }
    }

    /// Pair of pants on slots 0 and 1: `e_i (x) e_j -> delta_ij e_i`.
    fn multiply_front(&self) -> Self {
        let n = self.n;
        let tail = n.pow((self.arity - 2) as u32);
        let mut coords = vec![Rat::zero(); n.pow((self.arity - 1) as u32)];
        for i in 0..n {
            for t in 0..tail {
                coords[i * tail + t] = self.coords[(i * n + i) * tail + t].clone();
            }
        }
        EpsTensor {
            n,
            arity: self.arity - 1,
            coords,
        }
    }

    /// Copants on slot 0: `e_i -> D_i^(-1) e_i (x) e_i`.
    fn comultiply_front(&self, frob: &FrobeniusData) -> Result<Self> {
        let n = self.n;
        let tail = n.pow((self.arity - 1) as u32);
        let mut coords = vec![Rat::zero(); n.pow((self.arity + 1) as u32)];
        for i in 0..n {
            let inv = frob.delta(i).pow(-1)?;
            for t in 0..tail {
                let mut v = self.coords[i * tail + t].clone();
                v *= &inv;
                coords[(i * n + i) * tail + t] = v;
            }
        }
        Ok(EpsTensor {
            n,
            arity: self.arity + 1,
            coords,
        })
    }

    /// Counit on the only slot: `e_i -> D_i`.
    fn counit(&self, frob: &FrobeniusData) -> Rat {
        let mut s = Rat::zero();
        for i in 0..self.n {
            let mut v = self.coords[i].clone();
            v *= frob.delta(i);
            s += &v;
        }
        s
    }
}

/// Matrix of one connected component computed purely from the pants
/// decomposition: merge the inputs, attach `g` handles, split into the
/// outputs. No Euler characteristic anywhere.
fn component_matrix_by_pants(
    g: u32,
    p: usize,
    q: usize,
    frob: &FrobeniusData,
) -> Result<Vec<Vec<Rat>>> {
    let n = frob.n();
    let cols = n.pow(p as u32);
    let rows = n.pow(q as u32);
    let mut out = vec![vec![Rat::zero(); cols]; rows];
    for col in 0..cols {
        let mut state = if p == 0 {
            EpsTensor::unit(n)
        } else {
            EpsTensor::basis(n, &digits(col, n, p))
        };
        for _ in 1..p {
            state = state.multiply_front();
        }
        for _ in 0..g {
            state = state.comultiply_front(frob)?.multiply_front();
        }
        if q == 0 {
            out[0][col] = state.counit(frob);
            continue;
        }
        for _ in 1..q {
            state = state.comultiply_front(frob)?;
        }
        for (row, r) in state.coords.into_iter().enumerate() {
            out[row][col] = r;
        }
    }
    Ok(out)
}

/// Independent full-cobordism evaluator via pants decompositions,
/// returning the same matrix layout as [`BlockDiagonalMap::matrix`].
pub fn pants_decomposition_matrix(
    cob: &Cobordism,
    frob: &FrobeniusData,
) -> Result<Vec<Vec<Rat>>> {
    let n = frob.n();
    let in_pos: BTreeMap<&String, usize> =
        cob.inputs.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let out_pos: BTreeMap<&String, usize> =
        cob.outputs.iter().enumerate().map(|(i, l)| (l, i)).collect();
    struct Piece {
        in_slots: Vec<usize>,
        out_slots: Vec<usize>,
        matrix: Vec<Vec<Rat>>,
    }
    let mut pieces = Vec::new();
    for c in &cob.components {
        if c.is_closed() {
            return Err(Error::InvalidInput(
                "closed component; use closed_partition_function".into(),
            ));
        }
        pieces.push(Piece {
            in_slots: c.inputs.iter().map(|l| in_pos[l]).collect(),
            out_slots: c.outputs.iter().map(|l| out_pos[l]).collect(),
            matrix: component_matrix_by_pants(c.g, c.inputs.len(), c.outputs.len(), frob)?,
        });
    }
    let p = cob.inputs.len();
    let q = cob.outputs.len();
    let rows = n.pow(q as u32);
    let cols = n.pow(p as u32);
    let mut out = vec![vec![Rat::zero(); cols]; rows];
    for (row, m) in out.iter_mut().enumerate() {
        let od = digits(row, n, q);
        for (col, cell) in m.iter_mut().enumerate() {
            let id = digits(col, n, p);
            let mut val = Rat::one();
            for piece in &pieces {
                let sub_in: Vec<usize> = piece.in_slots.iter().map(|&s| id[s]).collect();
                let sub_out: Vec<usize> = piece.out_slots.iter().map(|&s| od[s]).collect();
                let r = sub_out.iter().fold(0usize, |acc, &d| acc * n + d);
                let c = sub_in.iter().fold(0usize, |acc, &d| acc * n + d);
                val *= &piece.matrix[r][c];
            }
            *cell = val;
        }
    }
    Ok(out)
}

/// Closed genus-`g` invariant via an explicit cap, `g` handles, cocap
/// pipeline, for cross-checking [`closed_partition_function`].
pub fn closed_value_by_pants(g: u32, frob: &FrobeniusData) -> Result<Rat> {
    let mut state = EpsTensor::unit(frob.n());
    for _ in 0..g {
        state = state.comultiply_front(frob)?.multiply_front();
    }
    Ok(state.counit(frob))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frob(deltas: &[(i64, i64)]) -> FrobeniusData {
        FrobeniusData::new(
            deltas
                .iter()
                .map(|&(p, q)| Rat::frac(p, q))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn semisimplicity_enforced() {
        assert!(matches!(
            FrobeniusData::new(vec![Rat::one(), Rat::zero()]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            FrobeniusData::new(vec![]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn cylinder_is_identity() {
        let f = frob(&[(1, 1), (4, 1), (-2, 3)]);
        let cyl = Cobordism::connected(0, &["a"], &["b"]).unwrap();
        let m = evaluate_cobordism(&cyl, &f).unwrap();
        assert_eq!(m.blocks()[0].entry(0), &HalfPower::one());
        let mat = m.matrix(&f).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { Rat::one() } else { Rat::zero() };
                assert_eq!(mat[r][c], want);
            }
        }
    }

    #[test]
    fn pants_entry_is_chi_half() {
        // chi = -1, so the entry is D^(-1/2); capping an input then
        // gives the identity cylinder, which pins the sign.
        let f = frob(&[(4, 1), (9, 1)]);
        let pants = Cobordism::connected(0, &["a", "b"], &["c"]).unwrap();
        let m = evaluate_cobordism(&pants, &f).unwrap();
        assert_eq!(m.blocks()[0].entry(0).sqrt_exp, -1);
        assert_eq!(m.blocks()[0].entry(0).coeff, Rat::one());
        assert_eq!(
            m.blocks()[0].entry(0).canonical(f.delta(0)).unwrap(),
            (1, Rat::frac(1, 4))
        );
        let cap = Cobordism::connected(0, &[], &["z"]).unwrap();
        let cap_then_pants = glue(
            &cap,
            &pants,
            &[("z".to_string(), "a".to_string())],
        )
        .unwrap();
        assert_eq!(cap_then_pants.components.len(), 1);
        assert_eq!(cap_then_pants.euler_characteristic(), 0);
        let composed = evaluate_cobordism(&cap, &f)
            .unwrap()
            .then(&evaluate_cobordism(&pants, &f).unwrap(), &f);
        // Arities differ (cap feeds only one of the two pants inputs),
        // so direct then() is rejected; the glued surface is the check.
        assert!(composed.is_err());
        let mat = evaluate_cobordism(&cap_then_pants, &f)
            .unwrap()
            .matrix(&f)
            .unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c { Rat::one() } else { Rat::zero() };
                assert_eq!(mat[r][c], want);
            }
        }
    }

    #[test]
    fn one_handled_cylinder_is_alpha() {
        let f = frob(&[(2, 1), (5, 3)]);
        let alpha = Cobordism::connected(1, &["a"], &["b"]).unwrap();
        let m = evaluate_cobordism(&alpha, &f).unwrap();
        assert_eq!(m.blocks()[0].entry(0).sqrt_exp, -2);
        let mat = m.matrix(&f).unwrap();
        assert_eq!(mat[0][0], Rat::frac(1, 2));
        assert_eq!(mat[1][1], Rat::frac(3, 5));
        assert_eq!(mat[0][1], Rat::zero());
    }

    #[test]
    fn gluing_examples() {
        // Two pairs of pants along one circle: genus stays 0,
        // arities merge to (3, 1), chi adds.
        let p1 = Cobordism::connected(0, &["a", "b"], &["c"]).unwrap();
        let p2 = Cobordism::connected(0, &["d", "e"], &["f"]).unwrap();
        let glued = glue(&p1, &p2, &[("c".into(), "d".into())]).unwrap();
        assert_eq!(glued.components.len(), 1);
        assert_eq!(glued.components[0].g, 0);
        assert_eq!(glued.inputs, vec!["a", "b", "e"]);
        assert_eq!(glued.outputs, vec!["f"]);
        assert_eq!(glued.euler_characteristic(), -2);
        assert_eq!(
            glued.euler_characteristic(),
            p1.euler_characteristic() + p2.euler_characteristic()
        );
        // Self-gluing a cylinder: closed torus.
        let cyl = Cobordism::connected(0, &["i"], &["o"]).unwrap();
        let torus = self_glue(&cyl, &[("o".into(), "i".into())]).unwrap();
        assert_eq!(torus.components.len(), 1);
        assert_eq!(torus.components[0].g, 1);
        assert!(torus.components[0].is_closed());
        assert_eq!(torus.euler_characteristic(), 0);
        // Two one-handled cylinders: alpha squared.
        let a1 = Cobordism::connected(1, &["x"], &["y"]).unwrap();
        let a2 = Cobordism::connected(1, &["u"], &["v"]).unwrap();
        let a_sq = glue(&a1, &a2, &[("y".into(), "u".into())]).unwrap();
        assert_eq!(a_sq.components[0].g, 2);
        let f = frob(&[(3, 1), (7, 2)]);
        let m = evaluate_cobordism(&a_sq, &f).unwrap();
        assert_eq!(m.blocks()[0].entry(0).sqrt_exp, -4);
        let mat = m.matrix(&f).unwrap();
        assert_eq!(mat[0][0], Rat::frac(1, 9));
        assert_eq!(mat[1][1], Rat::frac(4, 49));
    }

    #[test]
    fn bad_gluings_rejected() {
        let p1 = Cobordism::connected(0, &["a"], &["b"]).unwrap();
        let p2 = Cobordism::connected(0, &["c"], &["d"]).unwrap();
        // Input-to-input is a type mismatch.
        assert!(matches!(
            glue(&p1, &p2, &[("a".into(), "c".into())]),
            Err(Error::InvalidInput(_))
        ));
        // Reusing a port.
        let p3 = Cobordism::connected(0, &["e", "f"], &["g"]).unwrap();
        assert!(matches!(
            glue(&p1, &p3, &[("b".into(), "e".into()), ("b".into(), "f".into())]),
            Err(Error::InvalidInput(_))
        ));
        // Colliding labels.
        let p4 = Cobordism::connected(0, &["a"], &["z"]).unwrap();
        assert!(matches!(
            glue(&p1, &p4, &[("b".into(), "a".into())]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn closed_partition_function_values() {
        let f = frob(&[(1, 1), (4, 1)]);
        assert_eq!(closed_partition_function(1, &f).unwrap(), Rat::from_int(2));
        assert_eq!(closed_partition_function(0, &f).unwrap(), Rat::from_int(5));
        assert_eq!(closed_partition_function(2, &f).unwrap(), Rat::frac(5, 4));
        let g = frob(&[(-2, 1), (3, 1), (1, 5)]);
        for genus in 0..=4 {
            assert_eq!(
                closed_partition_function(genus, &g).unwrap(),
                closed_value_by_pants(genus, &g).unwrap(),
                "trace disagrees at genus {genus}"
            );
        }
    }

    #[test]
    fn closed_components_rejected_by_evaluate() {
        let f = frob(&[(1, 1)]);
        let torus = Cobordism::new(
            vec![Component {
                g: 1,
                inputs: vec![],
                outputs: vec![],
            }],
            vec![],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            evaluate_cobordism(&torus, &f),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            pants_decomposition_matrix(&torus, &f),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn evaluate_agrees_with_pants_decomposition() {
        let f = frob(&[(2, 1), (-1, 3), (5, 4)]);
        for g in 0..=2u32 {
            for p in 0..=2usize {
                for q in 0..=2usize {
                    if p + q == 0 {
                        continue;
                    }
                    let ins: Vec<String> = (0..p).map(|k| format!("i{k}")).collect();
                    let outs: Vec<String> = (0..q).map(|k| format!("o{k}")).collect();
                    let cob = Cobordism::connected(
                        g,
                        &ins.iter().map(String::as_str).collect::<Vec<_>>(),
                        &outs.iter().map(String::as_str).collect::<Vec<_>>(),
                    )
                    .unwrap();
                    let direct = evaluate_cobordism(&cob, &f).unwrap().matrix(&f).unwrap();
                    let pieced = pants_decomposition_matrix(&cob, &f).unwrap();
                    assert_eq!(direct, pieced, "mismatch at (g,p,q)=({g},{p},{q})");
                }
            }
        }
        // A disconnected case: pants next to a one-handled cylinder.
        let cob = Cobordism::new(
            vec![
                Component {
                    g: 0,
                    inputs: vec!["a".into(), "b".into()],
                    outputs: vec!["c".into()],
                },
                Component {
                    g: 1,
                    inputs: vec!["d".into()],
                    outputs: vec!["e".into()],
                },
            ],
            vec!["a".into(), "d".into(), "b".into()],
            vec!["e".into(), "c".into()],
        )
        .unwrap();
        let direct = evaluate_cobordism(&cob, &f).unwrap().matrix(&f).unwrap();
        let pieced = pants_decomposition_matrix(&cob, &f).unwrap();
        assert_eq!(direct, pieced);
    }

    #[test]
    fn frobenius_axioms_from_reconstructed_structure() {
        let f = frob(&[(2, 1), (-3, 5), (7, 1)]);
        let n = f.n();
        let pants = Cobordism::connected(0, &["a", "b"], &["c"]).unwrap();
        let mul = pants_decomposition_matrix(&pants, &f).unwrap();
        let bent = Cobordism::connected(0, &["a", "b"], &[]).unwrap();
        let pair = pants_decomposition_matrix(&bent, &f).unwrap();
        let cap = Cobordism::connected(0, &[], &["c"]).unwrap();
        let unit = pants_decomposition_matrix(&cap, &f).unwrap();
        let product = |x: &[Rat], y: &[Rat]| -> Vec<Rat> {
            let mut out = vec![Rat::zero(); n];
            for i in 0..n {
                for j in 0..n {
                    for (k, o) in out.iter_mut().enumerate() {
                        let mut v = mul[k][i * n + j].clone();
                        v *= &x[i];
                        v *= &y[j];
                        *o += &v;
                    }
                }
            }
            out
        };
        let pairing = |x: &[Rat], y: &[Rat]| -> Rat {
            let mut s = Rat::zero();
            for i in 0..n {
                for j in 0..n {
                    let mut v = pair[0][i * n + j].clone();
                    v *= &x[i];
                    v *= &y[j];
                    s += &v;
                }
            }
            s
        };
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut rand_vec = || -> Vec<Rat> {
            (0..n)
                .map(|_| Rat::frac(rng.gen_range(-6..=6), rng.gen_range(1..=4)))
                .collect()
        };
        let one: Vec<Rat> = (0..n).map(|i| unit[i][0].clone()).collect();
        for _ in 0..25 {
            let (a, b, c) = (rand_vec(), rand_vec(), rand_vec());
            assert_eq!(product(&product(&a, &b), &c), product(&a, &product(&b, &c)));
            assert_eq!(pairing(&product(&a, &b), &c), pairing(&a, &product(&b, &c)));
            assert_eq!(product(&one, &a), a);
        }
    }

    fn random_label(prefix: &str, k: usize) -> String {
        format!("{prefix}{k}")
    }

    fn random_cobordism(
        rng: &mut ChaCha8Rng,
        prefix: &str,
        forced_inputs: Option<Vec<String>>,
        outputs_required: bool,
    ) -> Cobordism {
        let ncomp = rng.gen_range(1..=2);
        let mut comps: Vec<Component> = (0..ncomp)
            .map(|_| Component {
                g: rng.gen_range(0..=3),
                inputs: vec![],
                outputs: vec![],
            })
            .collect();
        let mut fresh = 0usize;
        let inputs: Vec<String> = match forced_inputs {
            Some(ins) => {
                for l in &ins {
                    let c = rng.gen_range(0..ncomp);
                    comps[c].inputs.push(l.clone());
                }
                ins
            }
            None => {
                let p = rng.gen_range(0..=3);
                (0..p)
                    .map(|_| {
                        let l = random_label(prefix, {
                            fresh += 1;
                            fresh
                        });
                        let c = rng.gen_range(0..ncomp);
                        comps[c].inputs.push(l.clone());
                        l
                    })
                    .collect()
            }
        };
        let mut outputs: Vec<String> = Vec::new();
        for (ci, comp) in comps.iter_mut().enumerate() {
            let need = if outputs_required {
                1
            } else {
                usize::from(comp.inputs.is_empty())
            };
            let extra = rng.gen_range(need..=2);
            for _ in 0..extra {
                fresh += 1;
                let l = format!("{prefix}o{ci}x{fresh}");
                comp.outputs.push(l.clone());
                outputs.push(l);
            }
        }
        Cobordism::new(comps, inputs, outputs).unwrap()
    }

    #[test]
    fn functoriality_on_seeded_random_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for case in 0..100 {
            let nidem = rng.gen_range(1..=4);
            let deltas: Vec<Rat> = (0..nidem)
                .map(|_| {
                    let mut p = 0i64;
                    while p == 0 {
                        p = rng.gen_range(-5..=5);
                    }
                    Rat::frac(p, rng.gen_range(1..=3))
                })
                .collect();
            let f = FrobeniusData::new(deltas).unwrap();
            let a = random_cobordism(&mut rng, "a", None, true);
            let b = random_cobordism(
                &mut rng,
                "b",
                Some(a.outputs.clone().iter().map(|l| format!("m{l}")).collect()),
                true,
            );
            let matching: Vec<(String, String)> = a
                .outputs
                .iter()
                .zip(&b.inputs)
                .map(|(o, i)| (o.clone(), i.clone()))
                .collect();
            let glued = glue(&a, &b, &matching).unwrap();
            assert!(
                glued.components.iter().all(|c| !c.is_closed()),
                "case {case} closed a component"
            );
            let eval_glued = evaluate_cobordism(&glued, &f).unwrap();
            let composed = evaluate_cobordism(&a, &f)
                .unwrap()
                .then(&evaluate_cobordism(&b, &f).unwrap(), &f)
                .unwrap();
            assert!(
                eval_glued.equivalent(&composed, &f).unwrap(),
                "case {case}: maps differ"
            );
            assert_eq!(
                eval_glued.matrix(&f).unwrap(),
                composed.matrix(&f).unwrap(),
                "case {case}: matrices differ"
            );
            assert_eq!(
                glued.euler_characteristic(),
                a.euler_characteristic() + b.euler_characteristic(),
                "case {case}: chi not additive"
            );
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let raw = r#"{"components":[{"g":1,"in":["a","b"],"out":["c"]}],"inputs":["a","b"],"outputs":["c"]}"#;
        let cob = Cobordism::from_json(raw).unwrap();
        assert_eq!(cob.to_json().unwrap(), raw);
        let dup = r#"{"components":[{"g":0,"in":["a","a"],"out":[]}],"inputs":["a","a"],"outputs":[]}"#;
        assert!(matches!(
            Cobordism::from_json(dup),
            Err(Error::InvalidInput(_))
        ));
        let unlisted = r#"{"components":[{"g":0,"in":["a"],"out":["b"]}],"inputs":["a"],"outputs":[]}"#;
        assert!(matches!(
            Cobordism::from_json(unlisted),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn mixed_self_glue_adds_handle() {
        let c = Cobordism::connected(0, &["a", "b"], &["c", "d"]).unwrap();
        let glued = self_glue(&c, &[("c".into(), "a".into())]).unwrap();
        assert_eq!(glued.components.len(), 1);
        assert_eq!(glued.components[0].g, 1);
        assert_eq!(glued.inputs, vec!["b"]);
        assert_eq!(glued.outputs, vec!["d"]);
        assert_eq!(glued.euler_characteristic(), c.euler_characteristic());
    }
}
