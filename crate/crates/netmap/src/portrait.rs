//! Dynamic portraits: the weighted functional digraph on critical and
//! postcritical points, with both directions of the portrait/presentation
//! correspondence, canonical forms, and per-degree enumeration.

use crate::error::{Error, Result};
use crate::lattice::{a_coords_with, a_lift, AElement, ElementaryDivisors, PmPair};
use crate::matrix::IntMatrix2;
use crate::presentation::{Arc, NetMapPresentation};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Weighted functional digraph on labeled postcritical vertices; anonymous
/// critical vertices are stored as a count per target, never individually.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DynamicPortrait {
    ids: Vec<String>,
    weight: Vec<u8>,
    to: Vec<usize>,
    extra: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct PortraitJson {
    postcritical: Vec<VertexJson>,
    extra_critical: Vec<ExtraJson>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    weight: u8,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct ExtraJson {
    to: String,
    count: u64,
}

/// Outcome of portrait validation: the degree when every condition holds,
/// otherwise the list of violated conditions.
#[derive(Clone, Debug)]
pub struct PortraitValidation {
    pub degree: Option<i64>,
    pub diagnostics: Vec<String>,
}

/// Mod-2 elementary divisors of a portrait.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Mod2Divisors {
    pub m: u8,
    pub n: u8,
}

impl DynamicPortrait {
    pub fn new(postcritical: &[(String, u8, String)], extra_critical: &[(String, u64)]) -> Result<Self> {
        let mut ids: Vec<String> = postcritical.iter().map(|(id, _, _)| id.clone()).collect();
        ids.sort();
        let before = ids.len();
        ids.dedup();
        if ids.len() != before {
            return Err(Error::MalformedPortrait("duplicate vertex id (one out-edge per vertex)".into()));
        }
        let index = |id: &str| -> Result<usize> {
            ids.binary_search_by(|probe| probe.as_str().cmp(id))
                .map_err(|_| Error::MalformedPortrait(format!("unknown vertex id `{id}`")))
        };
        let mut weight = vec![0u8; ids.len()];
        let mut to = vec![0usize; ids.len()];
        for (id, w, target) in postcritical {
            if *w != 1 && *w != 2 {
                return Err(Error::MalformedPortrait(format!("weight {w} out of range for `{id}`")));
            }
            let i = index(id)?;
            weight[i] = *w;
            to[i] = index(target)?;
        }
        let mut extra = vec![0u64; ids.len()];
        for (target, count) in extra_critical {
            if *count == 0 {
                return Err(Error::MalformedPortrait("extra_critical count must be positive".into()));
            }
            extra[index(target)?] += count;
        }
        Ok(DynamicPortrait { ids, weight, to, extra })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn weight_of(&self, i: usize) -> u8 {
        self.weight[i]
    }

    pub fn target_of(&self, i: usize) -> usize {
        self.to[i]
    }

    pub fn extra_of(&self, i: usize) -> u64 {
        self.extra[i]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: PortraitJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        let post: Vec<_> = parsed
            .postcritical
            .into_iter()
            .map(|v| (v.id, v.weight, v.to))
            .collect();
        let extra: Vec<_> = parsed.extra_critical.into_iter().map(|e| (e.to, e.count)).collect();
        DynamicPortrait::new(&post, &extra)
    }

    pub fn to_json(&self) -> String {
        let doc = PortraitJson {
            postcritical: (0..self.ids.len())
                .map(|i| VertexJson {
                    id: self.ids[i].clone(),
                    weight: self.weight[i],
                    to: self.ids[self.to[i]].clone(),
                })
                .collect(),
            extra_critical: (0..self.ids.len())
                .filter(|&i| self.extra[i] > 0)
                .map(|i| ExtraJson { to: self.ids[i].clone(), count: self.extra[i] })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("portrait serialization cannot fail")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph portrait {\n");
        for id in &self.ids {
            out.push_str(&format!("  \"{id}\";\n"));
        }
        for i in 0..self.ids.len() {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [w={}];\n",
                self.ids[i], self.ids[self.to[i]], self.weight[i]
            ));
        }
        for i in 0..self.ids.len() {
            if self.extra[i] > 0 {
                out.push_str(&format!("  \"*{}\" [label=\"critical\"];\n", self.ids[i]));
                out.push_str(&format!(
                    "  \"*{}\" -> \"{}\" [w=2, label=\"×{}\"];\n",
                    self.ids[i], self.ids[i], self.extra[i]
                ));
            }
        }
        out.push_str("}\n");
        out
    }

    fn critical_count(&self) -> u64 {
        self.weight.iter().filter(|&&w| w == 2).count() as u64 + self.extra.iter().sum::<u64>()
    }

    /// Sum of in-edge weights at vertex i, anonymous criticals included.
    pub fn incoming_degree(&self, i: usize) -> u64 {
        let labeled: u64 = (0..self.ids.len())
            .filter(|&j| self.to[j] == i)
            .map(|j| self.weight[j] as u64)
            .sum();
        labeled + 2 * self.extra[i]
    }

    /// Critical values: targets of some weight-2 edge.
    fn critical_values(&self) -> BTreeSet<usize> {
        let mut v = BTreeSet::new();
        for j in 0..self.ids.len() {
            if self.weight[j] == 2 {
                v.insert(self.to[j]);
            }
            if self.extra[j] > 0 {
                v.insert(j);
            }
        }
        v
    }

    /// Forward closure of the critical values under the vertex map.
    fn postcritical_closure(&self) -> BTreeSet<usize> {
        let mut seen = self.critical_values();
        loop {
            let next: BTreeSet<usize> = seen.iter().map(|&i| self.to[i]).collect();
            let before = seen.len();
            seen.extend(next);
            if seen.len() == before {
                return seen;
            }
        }
    }

    pub fn validate(&self) -> PortraitValidation {
        let mut diagnostics = Vec::new();
        let crit = self.critical_count();
        let degree = crit / 2 + 1;
        if crit % 2 != 0 {
            diagnostics.push(format!("critical vertex count {crit} is odd, no degree satisfies 2d-2"));
        }
        if degree < 2 {
            diagnostics.push("degree below 2".into());
        }
        if self.ids.len() != 4 {
            diagnostics.push(format!("postcritical set has {} points, need exactly 4", self.ids.len()));
        }
        for i in 0..self.ids.len() {
            let inc = self.incoming_degree(i);
            if inc > degree {
                diagnostics.push(format!(
                    "incoming degree {inc} at `{}` exceeds degree {degree}",
                    self.ids[i]
                ));
            }
        }
        let closure = self.postcritical_closure();
        for i in 0..self.ids.len() {
            if !closure.contains(&i) {
                diagnostics.push(format!("vertex `{}` is not postcritical", self.ids[i]));
            }
        }
        PortraitValidation {
            degree: if diagnostics.is_empty() { Some(degree as i64) } else { None },
            diagnostics,
        }
    }

    pub fn degree(&self) -> Result<i64> {
        let v = self.validate();
        v.degree.ok_or_else(|| Error::MalformedPortrait(v.diagnostics.join("; ")))
    }

    pub fn mod2_divisors(&self) -> Result<Mod2Divisors> {
        let d = self.degree()? as u64;
        let mut k = 0;
        for &x in &self.critical_values() {
            let full = self.incoming_degree(x) == d;
            let weight_one_in = (0..self.ids.len()).any(|j| self.to[j] == x && self.weight[j] == 1);
            if full && !weight_one_in {
                k += 1;
            }
        }
        match k {
            0 => Ok(Mod2Divisors { m: 1, n: 1 }),
            2 => Ok(Mod2Divisors { m: 0, n: 1 }),
            3 => Ok(Mod2Divisors { m: 0, n: 0 }),
            other => Err(Error::MalformedPortrait(format!(
                "{other} fully-critical values; a NET portrait allows 0, 2 or 3"
            ))),
        }
    }

    /// False exactly when both mod-2 divisors vanish and 4 does not divide
    /// the degree.
    pub fn exceptional_ok(&self) -> Result<bool> {
        let d = self.degree()?;
        let m2 = self.mod2_divisors()?;
        Ok(!(m2.m == 0 && m2.n == 0 && d % 4 != 0))
    }

    pub fn realizable_with(&self, m: i64, n: i64) -> Result<bool> {
        let d = self.degree()?;
        let div = ElementaryDivisors::new(m, n)?;
        if div.degree() != d {
            return Err(Error::DivisorDegreeMismatch { degree: d, m, n });
        }
        let m2 = self.mod2_divisors()?;
        Ok((m % 2) as u8 == m2.m && (n % 2) as u8 == m2.n)
    }

    pub fn branch_data(&self) -> Result<BranchData> {
        let d = self.degree()?;
        let mut partitions = Vec::new();
        for &x in &self.critical_values() {
            let twos = (0..self.ids.len()).filter(|&j| self.to[j] == x && self.weight[j] == 2).count() as u64
                + self.extra[x];
            let ones = (0..self.ids.len()).filter(|&j| self.to[j] == x && self.weight[j] == 1).count() as u64
                + (d as u64 - self.incoming_degree(x));
            let mut part = vec![2u8; twos as usize];
            part.extend(std::iter::repeat(1u8).take(ones as usize));
            partitions.push(part);
        }
        BranchData::new(d, partitions)
    }

    /// Lexicographically least relabeling over all bijections of the
    /// labeled vertices. Anonymous criticals enter only through their
    /// per-target counts.
    pub fn canonical(&self) -> CanonicalPortrait {
        let n = self.ids.len();
        let mut best: Option<Vec<(usize, u8, u64)>> = None;
        for perm in permutations(n) {
            // perm[old] = new
            let mut inv = vec![0usize; n];
            for (old, &new) in perm.iter().enumerate() {
                inv[new] = old;
            }
            let code: Vec<(usize, u8, u64)> = (0..n)
                .map(|new| {
                    let old = inv[new];
                    (perm[self.to[old]], self.weight[old], self.extra[old])
                })
                .collect();
            if best.as_ref().map_or(true, |b| code < *b) {
                best = Some(code);
            }
        }
        CanonicalPortrait { code: best.unwrap_or_default() }
    }

    pub fn isomorphic(&self, other: &DynamicPortrait) -> bool {
        self.vertex_count() == other.vertex_count() && self.canonical() == other.canonical()
    }
}

impl fmt::Display for DynamicPortrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.ids.len() {
            writeln!(f, "{} --w{}--> {}", self.ids[i], self.weight[i], self.ids[self.to[i]])?;
        }
        for i in 0..self.ids.len() {
            if self.extra[i] > 0 {
                writeln!(f, "criticals ×{} --> {}", self.extra[i], self.ids[i])?;
            }
        }
        Ok(())
    }
}

/// Canonical encoding: per relabeled vertex, (target, weight, anonymous
/// critical count). Equal encodings characterize isomorphic portraits.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalPortrait {
    code: Vec<(usize, u8, u64)>,
}

impl CanonicalPortrait {
    /// Materialize with vertex ids p0, p1, ...
    pub fn to_portrait(&self) -> DynamicPortrait {
        let post: Vec<(String, u8, String)> = self
            .code
            .iter()
            .enumerate()
            .map(|(i, &(to, w, _))| (format!("p{i}"), w, format!("p{to}")))
            .collect();
        let extra: Vec<(String, u64)> = self
            .code
            .iter()
            .enumerate()
            .filter(|(_, &(_, _, e))| e > 0)
            .map(|(i, &(_, _, e))| (format!("p{i}"), e))
            .collect();
        DynamicPortrait::new(&post, &extra).expect("canonical code is structurally valid")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out.sort();
    out
}

/// Branch data: one partition of the degree per critical value, all parts
/// 1 or 2. The kernel count of all-2 partitions is 0, 2 or 3.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BranchData {
    degree: i64,
    partitions: Vec<Vec<u8>>,
}

impl BranchData {
    pub fn new(degree: i64, mut partitions: Vec<Vec<u8>>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::DegreeTooSmall);
        }
        for p in &mut partitions {
            p.sort_unstable_by(|a, b| b.cmp(a));
            if p.iter().any(|&x| x != 1 && x != 2) {
                return Err(Error::MalformedPortrait("branch data parts must be 1 or 2".into()));
            }
            if p.iter().map(|&x| x as i64).sum::<i64>() != degree {
                return Err(Error::MalformedPortrait("branch data partition does not sum to the degree".into()));
            }
        }
        partitions.sort();
        let bd = BranchData { degree, partitions };
        bd.kernel_type()?;
        Ok(bd)
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn partitions(&self) -> &[Vec<u8>] {
        &self.partitions
    }

    /// Case number 1, 2 or 3, determined by how many partitions have no
    /// part equal to 1.
    pub fn kernel_type(&self) -> Result<u8> {
        let k = self.partitions.iter().filter(|p| p.iter().all(|&x| x == 2)).count();
        match k {
            0 => Ok(1),
            2 => Ok(2),
            3 => Ok(3),
            other => Err(Error::MalformedPortrait(format!(
                "{other} all-2 partitions; branch data of a NET map allows 0, 2 or 3"
            ))),
        }
    }
}

impl fmt::Display for BranchData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .partitions
            .iter()
            .map(|p| {
                let items: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Branch data of the Euclidean map with the given divisors: over the four
/// marked points the noncritical preimages contribute the 1-parts, and a
/// partition with no 2 belongs to a point that is not a critical value, so
/// it is dropped.
pub fn branch_data_from_divisors(degree: i64, m: i64, n: i64) -> Result<BranchData> {
    let div = ElementaryDivisors::new(m, n)?;
    if div.degree() != degree {
        return Err(Error::DivisorDegreeMismatch { degree, m, n });
    }
    if degree < 2 {
        return Err(Error::DegreeTooSmall);
    }
    let full = vec![2u8; (degree / 2) as usize];
    let raw: Vec<Vec<u8>> = match ((m % 2) as u8, (n % 2) as u8) {
        (1, 1) => {
            let mut p = vec![2u8; ((degree - 1) / 2) as usize];
            p.push(1);
            vec![p.clone(), p.clone(), p.clone(), p]
        }
        (0, 1) => {
            let mut p = vec![2u8; ((degree - 2) / 2) as usize];
            p.extend([1, 1]);
            vec![p.clone(), p, full.clone(), full]
        }
        (0, 0) => {
            let mut p = vec![2u8; ((degree - 4) / 2) as usize];
            p.extend([1, 1, 1, 1]);
            vec![p, full.clone(), full.clone(), full]
        }
        _ => return Err(Error::InvalidDivisors { m, n }),
    };
    let partitions: Vec<Vec<u8>> = raw.into_iter().filter(|p| p.contains(&2)).collect();
    BranchData::new(degree, partitions)
}

/// Branch data of kinds 1 and 2 are always realizable; kind 3 needs the
/// degree divisible by 4.
pub fn branch_data_realizable(bd: &BranchData) -> bool {
    match bd.kernel_type() {
        Ok(3) => bd.degree() % 4 == 0,
        Ok(_) => true,
        Err(_) => false,
    }
}

/// Combinatorial skeleton of a presentation: the corner classes, the
/// terminal pairs, the arc bijection between them, and the affine vertex
/// map they induce.
pub(crate) struct Combinatorics {
    pub div: ElementaryDivisors,
    pub p1: Vec<AElement>,
    pub p2: Vec<PmPair>,
    matrix: IntMatrix2,
    translation: (i64, i64),
    snf: crate::matrix::Snf,
}

impl Combinatorics {
    pub fn new(p: &NetMapPresentation) -> Self {
        let snf = *p.snf();
        let div = p.divisors();
        let p1: Vec<AElement> = p.arcs().iter().map(|a| a_coords_with(&snf, a.initial)).collect();
        let p2: Vec<PmPair> = p
            .arcs()
            .iter()
            .map(|a| PmPair::new(&div, a_coords_with(&snf, a.terminal)))
            .collect();
        Combinatorics { div, p1, p2, matrix: p.matrix(), translation: p.translation(), snf }
    }

    /// Class of A*v + b, for an integer representative v of a class. The
    /// result lies in the corner subgroup.
    pub fn gamma_point(&self, v: (i64, i64)) -> AElement {
        let w = self.matrix.mul_vec(v);
        a_coords_with(&self.snf, (w.0 + self.translation.0, w.1 + self.translation.1))
    }

    pub fn gamma_class(&self, e: AElement) -> AElement {
        self.gamma_point(a_lift(&self.snf, e))
    }

    /// Arc bijection from corner classes to terminal pairs.
    pub fn eta(&self, corner: AElement) -> Result<PmPair> {
        self.p1
            .iter()
            .position(|&c| c == corner)
            .map(|i| self.p2[i])
            .ok_or_else(|| Error::Internal(format!("{corner} is not a corner class")))
    }

    pub fn phi_pair(&self, x: PmPair) -> Result<PmPair> {
        self.eta(self.gamma_class(x.rep()))
    }

    /// All corner classes and terminal pairs, deduplicated.
    pub fn domain(&self) -> Vec<PmPair> {
        let mut dom: BTreeSet<PmPair> = self.p2.iter().copied().collect();
        for &c in &self.p1 {
            dom.insert(PmPair::new(&self.div, c));
        }
        dom.into_iter().collect()
    }
}

/// The vertex map x -> eta(gamma(x)) on the corner classes and terminal
/// pairs, as canonical +- pairs.
pub fn phi_table(p: &NetMapPresentation) -> Result<Vec<(PmPair, PmPair)>> {
    let comb = Combinatorics::new(p);
    comb.domain()
        .into_iter()
        .map(|x| Ok((x, comb.phi_pair(x)?)))
        .collect()
}

fn pair_id(pair: &PmPair) -> String {
    format!("({},{})", pair.rep().x, pair.rep().y)
}

/// Build the dynamic portrait of a presentation: the four terminal pairs
/// with their induced map and weights, plus enough anonymous critical
/// vertices to fill every incoming degree up to the covering degree.
pub fn portrait_from_presentation(p: &NetMapPresentation) -> Result<DynamicPortrait> {
    let comb = Combinatorics::new(p);
    let d = p.degree();
    let p1_set: BTreeSet<AElement> = comb.p1.iter().copied().collect();
    let vertices: Vec<PmPair> = {
        let mut v: Vec<PmPair> = comb.p2.clone();
        v.sort();
        v
    };
    let in_p1 = |pair: &PmPair| p1_set.contains(&pair.rep());

    let mut post: Vec<(String, u8, String)> = Vec::new();
    let mut labeled_in: BTreeMap<PmPair, i64> = BTreeMap::new();
    for pair in &vertices {
        let weight = if in_p1(pair) { 1 } else { 2 };
        let target = comb.phi_pair(*pair)?;
        *labeled_in.entry(target).or_insert(0) += weight as i64;
        post.push((pair_id(pair), weight, pair_id(&target)));
    }
    // corner classes that are not marked points feed incoming capacity
    // without appearing in the portrait
    let p2_set: BTreeSet<PmPair> = vertices.iter().copied().collect();
    let mut unmarked_in: BTreeMap<PmPair, i64> = BTreeMap::new();
    for &c in &comb.p1 {
        let pair = PmPair::new(&comb.div, c);
        if !p2_set.contains(&pair) {
            *unmarked_in.entry(comb.phi_pair(pair)?).or_insert(0) += 1;
        }
    }
    let mut extra: Vec<(String, u64)> = Vec::new();
    for pair in &vertices {
        let need = d - labeled_in.get(pair).copied().unwrap_or(0) - unmarked_in.get(pair).copied().unwrap_or(0);
        if need < 0 || need % 2 != 0 {
            return Err(Error::Internal(format!(
                "incoming degree at {pair} cannot be completed to {d}"
            )));
        }
        if need > 0 {
            extra.push((pair_id(pair), (need / 2) as u64));
        }
    }
    DynamicPortrait::new(&post, &extra)
}

/// Forward orbit of the critical values among the marked classes. A
/// presentation describes a NET map exactly when this has four points.
pub fn postcritical_set(p: &NetMapPresentation) -> Result<BTreeSet<PmPair>> {
    let comb = Combinatorics::new(p);
    let d = p.degree();
    let p1_set: BTreeSet<AElement> = comb.p1.iter().copied().collect();
    let p2_set: BTreeSet<PmPair> = comb.p2.iter().copied().collect();

    // critical values: targets of the weight-2 marked points, plus targets
    // whose incoming degree needs anonymous critical vertices
    let mut values: BTreeSet<PmPair> = BTreeSet::new();
    let mut labeled_in: BTreeMap<PmPair, i64> = BTreeMap::new();
    let mut unmarked_in: BTreeMap<PmPair, i64> = BTreeMap::new();
    for pair in &p2_set {
        let target = comb.phi_pair(*pair)?;
        let weight = if p1_set.contains(&pair.rep()) { 1 } else { 2 };
        if weight == 2 {
            values.insert(target);
        }
        *labeled_in.entry(target).or_insert(0) += weight;
    }
    for &c in &comb.p1 {
        let pair = PmPair::new(&comb.div, c);
        if !p2_set.contains(&pair) {
            *unmarked_in.entry(comb.phi_pair(pair)?).or_insert(0) += 1;
        }
    }
    for pair in &p2_set {
        let filled = labeled_in.get(pair).copied().unwrap_or(0) + unmarked_in.get(pair).copied().unwrap_or(0);
        if filled < d {
            values.insert(*pair);
        }
    }
    // forward closure
    let mut seen = values;
    loop {
        let next: BTreeSet<PmPair> = seen.iter().map(|&x| comb.phi_pair(x)).collect::<Result<_>>()?;
        let before = seen.len();
        seen.extend(next);
        if seen.len() == before {
            return Ok(seen);
        }
    }
}

/// Deterministic choice policy for `presentation_from_portrait`. The
/// default choices reproduce the published worked example, and
/// `PaperChoices` names that configuration explicitly.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub enum ChoicePolicy {
    #[default]
    Default,
    PaperChoices,
}

/// Construct a presentation whose portrait is isomorphic to the input.
pub fn presentation_from_portrait(
    g: &DynamicPortrait,
    m: i64,
    n: i64,
    _policy: ChoicePolicy,
) -> Result<NetMapPresentation> {
    if !g.realizable_with(m, n)? {
        return Err(Error::NotRealizable { m, n });
    }
    construct_presentation(g, m, n)
}

/// The construction itself, without the realizability gate; fails with an
/// internal error when no consistent labeling exists.
pub(crate) fn construct_presentation(g: &DynamicPortrait, m: i64, n: i64) -> Result<NetMapPresentation> {
    let d = g.degree()?;
    let div = ElementaryDivisors::new(m, n)?;
    if div.degree() != d {
        return Err(Error::DivisorDegreeMismatch { degree: d, m, n });
    }
    if g.vertex_count() != 4 {
        return Err(Error::MalformedPortrait("need exactly 4 postcritical vertices".into()));
    }

    // labels: 4 marked preimage points = weight-1 vertices plus fresh
    // points, each with a target among the vertices
    let mut p1_targets: Vec<usize> = Vec::new(); // target of each preimage label
    let mut p1_vertex: Vec<Option<usize>> = Vec::new(); // Some(v) when the label is vertex v
    for v in 0..4 {
        if g.weight_of(v) == 1 {
            p1_targets.push(g.target_of(v));
            p1_vertex.push(Some(v));
        }
    }
    // fresh points fill each deficit, in vertex order
    for v in 0..4 {
        let deficit = d as u64 - g.incoming_degree(v);
        for _ in 0..deficit {
            p1_targets.push(v);
            p1_vertex.push(None);
        }
    }
    if p1_targets.len() != 4 {
        return Err(Error::Internal(format!(
            "portrait leaves {} preimage slots, expected 4",
            p1_targets.len()
        )));
    }

    let corners = [(0i64, 0i64), (0, n), (m, 0), (m, n)];
    let same_mod2 = |a: (i64, i64), b: (i64, i64)| (a.0 - b.0) % 2 == 0 && (a.1 - b.1) % 2 == 0;

    for corner_perm in permutations(4) {
        // p1 label i sits at corners[corner_perm[i]]
        let corner_of = |i: usize| corners[corner_perm[i]];
        let mut ok = true;
        for i in 0..4 {
            for j in i + 1..4 {
                let fiber_eq = p1_targets[i] == p1_targets[j];
                if fiber_eq != same_mod2(corner_of(i), corner_of(j)) {
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        // place the weight-2 vertices at the lexicographically smallest
        // admissible lattice points in the fundamental rectangle
        let mut placed: Vec<((i64, i64), usize)> = Vec::new(); // (position, target)
        for i in 0..4 {
            placed.push((corner_of(i), p1_targets[i]));
        }
        let mut vertex_pos: Vec<Option<(i64, i64)>> = vec![None; 4];
        for i in 0..4 {
            if let Some(v) = p1_vertex[i] {
                vertex_pos[v] = Some(corner_of(i));
            }
        }
        let mut classes: BTreeSet<PmPair> =
            placed.iter().map(|&(pos, _)| PmPair::new(&div, div.reduce(pos))).collect();
        let mut failed = false;
        for v in 0..4 {
            if vertex_pos[v].is_some() {
                continue;
            }
            let target = g.target_of(v);
            let mut found = None;
            'scan: for x in 0..2 * m {
                for y in 0..2 * n {
                    let pos = (x, y);
                    let pair = PmPair::new(&div, AElement { x, y });
                    if classes.contains(&pair) {
                        continue;
                    }
                    let compatible = placed
                        .iter()
                        .all(|&(other_pos, other_target)| (target == other_target) == same_mod2(pos, other_pos));
                    if compatible {
                        found = Some(pos);
                        break 'scan;
                    }
                }
            }
            match found {
                Some(pos) => {
                    vertex_pos[v] = Some(pos);
                    placed.push((pos, target));
                    classes.insert(PmPair::new(&div, div.reduce(pos)));
                }
                None => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }

        // partial affine map on mod-2 classes: class of a placed point goes
        // to the corner of the preimage label paired with its target
        let corner_coeff = |pos: (i64, i64)| ((pos.0 / m) as u8, (pos.1 / n) as u8);
        let dom_index = |pos: (i64, i64)| (pos.0.rem_euclid(2) * 2 + pos.1.rem_euclid(2)) as usize;
        let mut theta: [Option<(u8, u8)>; 4] = [None; 4];
        let mut consistent = true;
        let mut all_points: Vec<((i64, i64), usize)> = placed.clone();
        all_points.sort();
        for &(pos, target) in &all_points {
            // eta pairs p1 label k with vertex k
            let val = corner_coeff(corner_of(target));
            match theta[dom_index(pos)] {
                None => theta[dom_index(pos)] = Some(val),
                Some(existing) if existing == val => {}
                Some(_) => {
                    consistent = false;
                }
            }
        }
        if !consistent {
            return Err(Error::Internal("inconsistent affine data in portrait construction".into()));
        }
        // extend to a bijection: unassigned classes get the smallest unused
        // values in lexicographic order
        let mut used: BTreeSet<(u8, u8)> = theta.iter().flatten().copied().collect();
        for idx in 0..4 {
            if theta[idx].is_none() {
                let fresh = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)]
                    .into_iter()
                    .find(|v| !used.contains(v))
                    .expect("four classes, four values");
                theta[idx] = Some(fresh);
                used.insert(fresh);
            }
        }
        let t00 = theta[0].unwrap();
        let t01 = theta[1].unwrap();
        let t10 = theta[2].unwrap();
        let b0 = (t00.0 as i64, t00.1 as i64);
        let col1 = ((t10.0 ^ t00.0) as i64, (t10.1 ^ t00.1) as i64);
        let col2 = ((t01.0 ^ t00.0) as i64, (t01.1 ^ t00.1) as i64);
        let qbar = IntMatrix2::from_columns(col1, col2);
        let q = lift_sl2_f2(&qbar)?;
        let a = q.mul(&IntMatrix2::new(m, 0, 0, n));
        let b = a.mul_vec(b0);
        let arcs: [Arc; 4] = std::array::from_fn(|i| Arc {
            initial: q.mul_vec(corner_of(i)),
            terminal: q.mul_vec(vertex_pos[i].expect("all vertices placed")),
        });
        return NetMapPresentation::new(a, b, arcs);
    }
    Err(Error::Internal("realizability contract violated: no consistent labeling".into()))
}

/// Fixed lift table from SL(2, F2) to SL(2, Z).
fn lift_sl2_f2(qbar: &IntMatrix2) -> Result<IntMatrix2> {
    let key = (qbar.a & 1, qbar.b & 1, qbar.c & 1, qbar.d & 1);
    let lifted = match key {
        (1, 0, 0, 1) => IntMatrix2::new(1, 0, 0, 1),
        (0, 1, 1, 0) => IntMatrix2::new(0, -1, 1, 0),
        (1, 1, 0, 1) => IntMatrix2::new(1, 1, 0, 1),
        (1, 0, 1, 1) => IntMatrix2::new(1, 0, 1, 1),
        (1, 1, 1, 0) => IntMatrix2::new(1, -1, 1, 0),
        (0, 1, 1, 1) => IntMatrix2::new(0, -1, 1, 1),
        _ => return Err(Error::Internal(format!("{qbar} is not invertible mod 2"))),
    };
    debug_assert_eq!(lifted.det(), 1);
    Ok(lifted)
}

/// All isomorphism classes of NET-map dynamic portraits of one degree.
pub fn enumerate_portraits(degree: i64) -> Result<Vec<DynamicPortrait>> {
    enumerate_portraits_with_workers(degree, 1)
}

pub fn enumerate_portraits_with_workers(degree: i64, workers: usize) -> Result<Vec<DynamicPortrait>> {
    if degree < 2 {
        return Err(Error::DegreeTooSmall);
    }
    let workers = workers.max(1);
    let chunks: Vec<(usize, usize)> = split_ranges(256, workers);
    let mut sets: Vec<BTreeSet<CanonicalPortrait>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|&(lo, hi)| scope.spawn(move || enumerate_portrait_range(degree, lo, hi)))
            .collect();
        for h in handles {
            sets.push(h.join().expect("portrait worker panicked"));
        }
    });
    let mut all = BTreeSet::new();
    for s in sets {
        all.extend(s);
    }
    Ok(all.iter().map(|c| c.to_portrait()).collect())
}

fn split_ranges(total: usize, workers: usize) -> Vec<(usize, usize)> {
    let step = total.div_ceil(workers);
    (0..workers)
        .map(|w| (w * step, ((w + 1) * step).min(total)))
        .filter(|(lo, hi)| lo < hi)
        .collect()
}

fn enumerate_portrait_range(degree: i64, lo: usize, hi: usize) -> BTreeSet<CanonicalPortrait> {
    let d = degree as u64;
    let total_crit = 2 * d - 2;
    let mut out = BTreeSet::new();
    for f_code in lo..hi {
        let f = [f_code / 64 % 4, f_code / 16 % 4, f_code / 4 % 4, f_code % 4];
        for w_code in 0..16u32 {
            let weight: [u8; 4] = std::array::from_fn(|i| if w_code >> i & 1 == 1 { 2 } else { 1 });
            let base: u64 = weight.iter().filter(|&&w| w == 2).count() as u64;
            if base > total_crit {
                continue;
            }
            let rem = total_crit - base;
            for c0 in 0..=rem {
                for c1 in 0..=rem - c0 {
                    for c2 in 0..=rem - c0 - c1 {
                        let extra = [c0, c1, c2, rem - c0 - c1 - c2];
                        if let Some(c) = portrait_if_valid(d, &f, &weight, &extra) {
                            out.insert(c);
                        }
                    }
                }
            }
        }
    }
    out
}

fn portrait_if_valid(d: u64, f: &[usize; 4], weight: &[u8; 4], extra: &[u64; 4]) -> Option<CanonicalPortrait> {
    // incoming capacity
    let mut incoming = [0u64; 4];
    for i in 0..4 {
        incoming[f[i]] += weight[i] as u64;
    }
    for i in 0..4 {
        incoming[i] += 2 * extra[i];
        if incoming[i] > d {
            return None;
        }
    }
    // critical values and full postcriticality
    let mut values = 0u8;
    for i in 0..4 {
        if weight[i] == 2 {
            values |= 1 << f[i];
        }
        if extra[i] > 0 {
            values |= 1 << i;
        }
    }
    let mut closure = values;
    loop {
        let mut next = closure;
        for i in 0..4 {
            if closure >> i & 1 == 1 {
                next |= 1 << f[i];
            }
        }
        if next == closure {
            break;
        }
        closure = next;
    }
    if closure != 0b1111 {
        return None;
    }
    // exceptional condition
    let mut k = 0;
    for x in 0..4 {
        if values >> x & 1 == 0 {
            continue;
        }
        let full = incoming[x] == d;
        let weight_one_in = (0..4).any(|j| f[j] == x && weight[j] == 1);
        if full && !weight_one_in {
            k += 1;
        }
    }
    if k == 3 && d % 4 != 0 {
        return None;
    }
    // canonical code, minimized over the 24 relabelings
    let mut best: Option<Vec<(usize, u8, u64)>> = None;
    for perm in PERMS4 {
        let mut inv = [0usize; 4];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let code: Vec<(usize, u8, u64)> = (0..4)
            .map(|new| {
                let old = inv[new];
                (perm[f[old]], weight[old], extra[old])
            })
            .collect();
        if best.as_ref().map_or(true, |b| code < *b) {
            best = Some(code);
        }
    }
    Some(CanonicalPortrait { code: best.unwrap() })
}

const PERMS4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];
