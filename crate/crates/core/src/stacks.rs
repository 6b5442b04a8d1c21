//! Compatibility stacks: sequences of hypergraphs `(V, E₁), …, (V, E_n)` with
//!
//! - (S1) every `E_k` downward closed,
//! - (S2) all singletons in `E₁` and every non-empty subset in `E_n`,
//! - (S3) `A ∈ E_k`, `B ∈ E_l` ⇒ `A ∪ B ∈ E_{min(k+l, n)}`.
//!
//! Vertex subsets are bitmasks (bit `i` = vertex `i`) and a level is a bitset
//! over masks, so at most [`MAX_VERTICES`] vertices are supported.
//!
//! A valid stack is the same thing as an index function `S ↦ min{k : S ∈ E_k}`
//! that is 1 on singletons, monotone under inclusion and subadditive over
//! disjoint unions. Enumeration walks such functions subset by subset.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observable::default_names;

/// Vertex subset as a bitmask.
pub type Subset = u32;

/// Largest vertex count representable (levels are 64-bit sets of masks).
pub const MAX_VERTICES: usize = 6;
/// Largest vertex count accepted by [`enumerate_stacks`].
pub const MAX_ENUMERATION: usize = 5;

fn full_mask(n: usize) -> Subset {
    (1u32 << n) - 1
}

fn popcount(s: Subset) -> usize {
    s.count_ones() as usize
}

/// A family of subsets of an `n`-vertex set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Level(u64);

impl Level {
    pub fn contains(self, s: Subset) -> bool {
        self.0 >> s & 1 == 1
    }

    pub fn insert(&mut self, s: Subset) {
        self.0 |= 1u64 << s;
    }

    pub fn edges(self) -> impl Iterator<Item = Subset> {
        (1..64u32).filter(move |&s| self.contains(s))
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.edges().map(|s| format!("{s:b}")))
            .finish()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompatibilityStack {
    vertices: Vec<String>,
    levels: Vec<Level>,
}

impl CompatibilityStack {
    /// Levels `E₁..E_n` given as lists of edges. Only shape is checked here;
    /// see [`validate_stack`] for (S1)–(S3).
    pub fn new(vertices: Vec<String>, levels: Vec<Vec<Subset>>) -> Result<Self> {
        let n = vertices.len();
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidStack(format!(
                "{n} vertices (supported: 1..={MAX_VERTICES})"
            )));
        }
        if vertices.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::InvalidStack("duplicate vertex names".into()));
        }
        if levels.len() != n {
            return Err(Error::InvalidStack(format!(
                "{} levels for {n} vertices",
                levels.len()
            )));
        }
        let full = full_mask(n);
        let mut out = Vec::with_capacity(n);
        for edges in levels {
            let mut level = Level::default();
            for e in edges {
                if e == 0 || e & !full != 0 {
                    return Err(Error::InvalidStack(format!(
                        "edge {e:#b} is empty or not within the vertex set"
                    )));
                }
                level.insert(e);
            }
            out.push(level);
        }
        Ok(CompatibilityStack {
            vertices,
            levels: out,
        })
    }

    /// The stack with `E_k = {S : index(S) ≤ k}`.
    pub fn from_index(vertices: Vec<String>, index: impl Fn(Subset) -> usize) -> Result<Self> {
        let n = vertices.len();
        let levels = (1..=n)
            .map(|k| (1..=full_mask(n)).filter(|&s| index(s) <= k).collect())
            .collect();
        Self::new(vertices, levels)
    }

    /// The stack of an index vector over masks `1..2^n` in increasing order.
    pub fn from_index_vector(vertices: Vec<String>, code: &[u8]) -> Result<Self> {
        let n = vertices.len();
        if code.len() != full_mask(n) as usize {
            return Err(Error::InvalidStack(format!(
                "index vector of length {} for {n} vertices",
                code.len()
            )));
        }
        Self::from_index(vertices, |s| code[s as usize - 1] as usize)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn full(&self) -> Subset {
        full_mask(self.n())
    }

    /// `E_k` for `k` in `1..=n`.
    pub fn level(&self, k: usize) -> Level {
        self.levels[k - 1]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn subset_label(&self, s: Subset) -> Vec<String> {
        (0..self.n())
            .filter(|&i| s >> i & 1 == 1)
            .map(|i| self.vertices[i].clone())
            .collect()
    }

    pub fn subset_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Subset> {
        let mut s = 0;
        for name in names {
            let i = self
                .vertices
                .iter()
                .position(|v| v == name.as_ref())
                .ok_or_else(|| {
                    Error::InvalidStack(format!("unknown vertex `{}`", name.as_ref()))
                })?;
            s |= 1 << i;
        }
        Ok(s)
    }

    /// Smallest level containing `s`, if any (no validity assumed).
    fn raw_index(&self, s: Subset) -> Option<usize> {
        self.levels
            .iter()
            .position(|l| l.contains(s))
            .map(|k| k + 1)
    }

    /// Index vector over masks `1..2^n` (valid stacks only).
    pub fn index_vector(&self) -> Vec<u8> {
        (1..=self.full())
            .map(|s| self.raw_index(s).unwrap_or(0) as u8)
            .collect()
    }

    /// Image under the relabeling `perm`: vertex `i` becomes vertex `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n
            || perm.iter().collect::<BTreeSet<_>>().len() != n
            || perm.iter().any(|&p| p >= n)
        {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let mut vertices = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            vertices[p] = self.vertices[i].clone();
        }
        let levels = self
            .levels
            .iter()
            .map(|l| l.edges().map(|s| permute_mask(s, perm)).collect())
            .collect();
        Self::new(vertices, levels)
    }

    /// Same levels with vertices renamed.
    pub fn renamed(&self, vertices: Vec<String>) -> Result<Self> {
        let levels = self.levels.iter().map(|l| l.edges().collect()).collect();
        Self::new(vertices, levels)
    }
}

impl fmt::Debug for CompatibilityStack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("CompatibilityStack");
        d.field("vertices", &self.vertices);
        for (k, level) in self.levels.iter().enumerate() {
            let edges: Vec<String> = level
                .edges()
                .map(|s| self.subset_label(s).concat())
                .collect();
            d.field(&format!("E{}", k + 1), &edges);
        }
        d.finish()
    }
}

fn permute_mask(s: Subset, perm: &[usize]) -> Subset {
    perm.iter()
        .enumerate()
        .filter(|&(i, _)| s >> i & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | 1 << p)
}

#[derive(Serialize, Deserialize)]
struct StackJson {
    vertices: Vec<String>,
    levels: Vec<LevelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    k: usize,
    edges: Vec<Vec<String>>,
}

impl CompatibilityStack {
    /// `{"vertices": [...], "levels": [{"k": 1, "edges": [["A"], ...]}, ...]}`,
    /// with an optional `"provenance"` object attached.
    pub fn to_json(&self, provenance: Option<serde_json::Value>) -> serde_json::Value {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, l)| LevelJson {
                k: k + 1,
                edges: l.edges().map(|s| self.subset_label(s)).collect(),
            })
            .collect();
        serde_json::to_value(StackJson {
            vertices: self.vertices.clone(),
            levels,
            provenance,
        })
        .expect("stack json")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let json: StackJson = serde_json::from_value(value.clone())?;
        let n = json.vertices.len();
        let mut levels = vec![Vec::new(); n];
        let shell = Self::new(json.vertices.clone(), vec![Vec::new(); n])?;
        for level in &json.levels {
            if level.k == 0 || level.k > n {
                return Err(Error::InvalidStack(format!(
                    "level k={} out of range",
                    level.k
                )));
            }
            for e in &level.edges {
                levels[level.k - 1].push(shell.subset_from_names(e)?);
            }
        }
        Self::new(json.vertices, levels)
    }
}

impl Serialize for CompatibilityStack {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_json(None).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CompatibilityStack {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        Self::from_json(&value).map_err(serde::de::Error::custom)
    }
}

/// A violated stack condition with its witnessing subsets (as vertex names).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition")]
pub enum StackViolation {
    /// `edge ∈ E_k` but its non-empty subset `missing ∉ E_k`.
    S1 {
        k: usize,
        edge: Vec<String>,
        missing: Vec<String>,
    },
    /// A singleton missing from `E₁`, or a subset missing from `E_n`.
    S2 { k: usize, missing: Vec<String> },
    /// `a ∈ E_k`, `b ∈ E_l` but `a ∪ b ∉ E_target`, `target = min(k+l, n)`.
    S3 {
        k: usize,
        l: usize,
        target: usize,
        a: Vec<String>,
        b: Vec<String>,
        union: Vec<String>,
    },
}

impl StackViolation {
    pub fn condition(&self) -> &'static str {
        match self {
            StackViolation::S1 { .. } => "S1",
            StackViolation::S2 { .. } => "S2",
            StackViolation::S3 { .. } => "S3",
        }
    }
}

impl fmt::Display for StackViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &Vec<String>| format!("{{{}}}", v.join(","));
        match self {
            StackViolation::S1 { k, edge, missing } => {
                write!(f, "(S1) {} ∈ E{k} but {} ∉ E{k}", set(edge), set(missing))
            }
            StackViolation::S2 { k, missing } => write!(f, "(S2) {} ∉ E{k}", set(missing)),
            StackViolation::S3 {
                k,
                l,
                target,
                a,
                b,
                union,
            } => write!(
                f,
                "(S3) {} ∈ E{k}, {} ∈ E{l} but {} ∉ E{target}",
                set(a),
                set(b),
                set(union)
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackReport {
    pub violations: Vec<StackViolation>,
}

impl StackReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn cites(&self, condition: &str) -> bool {
        self.violations.iter().any(|v| v.condition() == condition)
    }
}

/// Checks (S1)–(S3) literally and lists every violation.
pub fn validate_stack(stack: &CompatibilityStack) -> StackReport {
    let n = stack.n();
    let full = stack.full();
    let mut violations = Vec::new();
    for k in 1..=n {
        let level = stack.level(k);
        for edge in level.edges() {
            for sub in sub_masks(edge) {
                if !level.contains(sub) {
                    violations.push(StackViolation::S1 {
                        k,
                        edge: stack.subset_label(edge),
                        missing: stack.subset_label(sub),
                    });
                }
            }
        }
    }
    for v in 0..n {
        if !stack.level(1).contains(1 << v) {
            violations.push(StackViolation::S2 {
                k: 1,
                missing: stack.subset_label(1 << v),
            });
        }
    }
    for s in 1..=full {
        if !stack.level(n).contains(s) {
            violations.push(StackViolation::S2 {
                k: n,
                missing: stack.subset_label(s),
            });
        }
    }
    for k in 1..=n {
        for l in 1..=n {
            let target = (k + l).min(n);
            for a in stack.level(k).edges() {
                for b in stack.level(l).edges() {
                    if !stack.level(target).contains(a | b) {
                        violations.push(StackViolation::S3 {
                            k,
                            l,
                            target,
                            a: stack.subset_label(a),
                            b: stack.subset_label(b),
                            union: stack.subset_label(a | b),
                        });
                    }
                }
            }
        }
    }
    StackReport { violations }
}

/// Non-empty proper subsets of `s`.
fn sub_masks(s: Subset) -> impl Iterator<Item = Subset> {
    let mut sub = s;
    std::iter::from_fn(move || {
        sub = (sub.wrapping_sub(1)) & s;
        (sub != 0).then_some(sub)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIndex {
    pub subset: Subset,
    pub index: usize,
}

fn require_valid(stack: &CompatibilityStack) -> Result<()> {
    let report = validate_stack(stack);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidStack(v.to_string())),
    }
}

/// Smallest `j` with `subset ∈ E_j`.
pub fn edge_index(stack: &CompatibilityStack, subset: Subset) -> Result<EdgeIndex> {
    require_valid(stack)?;
    if subset == 0 || subset & !stack.full() != 0 {
        return Err(Error::InvalidArgument(format!(
            "{subset:#b} is not a non-empty vertex subset"
        )));
    }
    let index = stack
        .raw_index(subset)
        .expect("valid stacks contain every subset at level n");
    Ok(EdgeIndex { subset, index })
}

/// `E₁ ⊆ E₂ ⊆ ⋯ ⊆ E_n`.
pub fn check_monotone_levels(stack: &CompatibilityStack) -> bool {
    stack.levels.windows(2).all(|w| w[0].0 & !w[1].0 == 0)
}

/// Lexicographically minimal index vector over all vertex relabelings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Index of every mask `1..2^n` in increasing mask order.
    pub code: Vec<u8>,
    /// Relabeling taking the input to the canonical stack.
    pub relabeling: Vec<usize>,
}

pub fn canonicalize(stack: &CompatibilityStack) -> Result<CanonicalForm> {
    require_valid(stack)?;
    Ok(canonical_code(&stack.index_vector(), stack.n()))
}

fn relabeled_code(code: &[u8], perm: &[usize]) -> Vec<u8> {
    let mut out = vec![0; code.len()];
    for (i, &c) in code.iter().enumerate() {
        out[permute_mask(i as Subset + 1, perm) as usize - 1] = c;
    }
    out
}

fn canonical_code(code: &[u8], n: usize) -> CanonicalForm {
    (0..n)
        .permutations(n)
        .map(|perm| CanonicalForm {
            code: relabeled_code(code, &perm),
            relabeling: perm,
        })
        .min()
        .expect("at least one permutation")
}

/// The canonical representative of `stack`'s relabeling class, with default
/// vertex names.
pub fn canonical_stack(stack: &CompatibilityStack) -> Result<CompatibilityStack> {
    let form = canonicalize(stack)?;
    CompatibilityStack::from_index_vector(default_names(stack.n()), &form.code)
}

/// All compatibility stacks on `n` vertices up to vertex relabeling, as
/// canonical stacks sorted by canonical code.
pub fn enumerate_stacks(n: usize) -> Result<Vec<CompatibilityStack>> {
    if !(1..=MAX_ENUMERATION).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "enumeration supports 1..={MAX_ENUMERATION} vertices, got {n}"
        )));
    }
    let order: Vec<Subset> = (1..=full_mask(n))
        .sorted_by_key(|&s| (popcount(s), s))
        .collect();
    let mut index = vec![0u8; 1 << n];
    let mut seen = BTreeSet::new();
    extend_index(&order, 0, &mut index, &mut |idx| {
        let code = &idx[1..];
        let canonical = canonical_code(code, n);
        if canonical.code == code {
            seen.insert(canonical.code);
        }
    });
    let names = default_names(n);
    seen.into_iter()
        .map(|code| CompatibilityStack::from_index_vector(names.clone(), &code))
        .collect()
}

/// Index bounds forced by the already-assigned proper subsets of `s`:
/// monotonicity below, subadditivity over disjoint splits above.
fn index_bounds(s: Subset, index: &[u8]) -> (u8, u8) {
    if popcount(s) == 1 {
        return (1, 1);
    }
    let mut lo = 1;
    let mut hi = popcount(s) as u8;
    for a in sub_masks(s) {
        let b = s & !a;
        if popcount(b) == 1 {
            lo = lo.max(index[a as usize]);
        }
        hi = hi.min(index[a as usize] + index[b as usize]);
    }
    (lo, hi)
}

fn extend_index(order: &[Subset], pos: usize, index: &mut [u8], visit: &mut impl FnMut(&[u8])) {
    let Some(&s) = order.get(pos) else {
        visit(index);
        return;
    };
    let (lo, hi) = index_bounds(s, index);
    for value in lo..=hi {
        index[s as usize] = value;
        extend_index(order, pos + 1, index, visit);
    }
    index[s as usize] = 0;
}

/// For four vertices: two complementary pairs of index 1 force the full set
/// to index at most 2.
pub fn reciprocal_rule_check(stack: &CompatibilityStack) -> Result<bool> {
    if stack.n() != 4 {
        return Err(Error::InvalidArgument(format!(
            "reciprocal pairs need 4 vertices, got {}",
            stack.n()
        )));
    }
    require_valid(stack)?;
    let full = stack.full();
    let bulk = edge_index(stack, full)?.index;
    for pair in (1..full).filter(|&s| popcount(s) == 2) {
        let reciprocal = full & !pair;
        if stack.raw_index(pair) == Some(1) && stack.raw_index(reciprocal) == Some(1) && bulk > 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Index of the full vertex set.
pub fn bulk_index(stack: &CompatibilityStack) -> Result<usize> {
    Ok(edge_index(stack, stack.full())?.index)
}

/// Number of two-vertex edges of index 2.
pub fn index_two_pairs(stack: &CompatibilityStack) -> usize {
    (1..=stack.full())
        .filter(|&s| popcount(s) == 2 && stack.raw_index(s) == Some(2))
        .count()
}

/// Counts of stacks per (bulk index, number of index-2 pairs).
pub fn summary_table(stacks: &[CompatibilityStack]) -> Result<BTreeMap<(usize, usize), usize>> {
    let mut table = BTreeMap::new();
    for s in stacks {
        *table
            .entry((bulk_index(s)?, index_two_pairs(s)))
            .or_insert(0) += 1;
    }
    Ok(table)
}

/// The summary table as CSV: one row per bulk index `1..=n`, one column per
/// count `0..=C(n,2)` of index-2 pairs.
pub fn summary_csv(stacks: &[CompatibilityStack], n: usize) -> Result<String> {
    let table = summary_table(stacks)?;
    let pairs = n * n.saturating_sub(1) / 2;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["bulk_index".to_string()];
    header.extend((0..=pairs).map(|c| c.to_string()));
    w.write_record(&header).map_err(csv_error)?;
    for bulk in 1..=n {
        let mut row = vec![bulk.to_string()];
        row.extend((0..=pairs).map(|c| table.get(&(bulk, c)).copied().unwrap_or(0).to_string()));
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
