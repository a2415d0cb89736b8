//! The upper-bound side: complete flows on partial automata, the
//! presentation condition (no H-pair shares a block), Little Boxes
//! products, and the passage between complete flows and (parameterized
//! relational morphism, admissible partition) pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::explicit::{least_flow, word_pair_stable, FlowSystem, LAutomaton};
use crate::monoid::{is_token, FiniteMonoid};
use crate::sp::{bit, points_of, SetPartition};

/// A partial deterministic X-automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialAutomaton {
    states: Vec<String>,
    alphabet: Vec<String>,
    /// delta[q][x]
    delta: Vec<Vec<Option<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonFile {
    states: Vec<String>,
    alphabet: Vec<String>,
    delta: Vec<(String, String, String)>,
}

impl PartialAutomaton {
    pub fn new(states: Vec<String>, alphabet: Vec<String>, delta: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if delta.len() != states.len() || delta.iter().any(|row| row.len() != alphabet.len()) {
            return Err(Error::Parse("transition table does not match states × alphabet".into()));
        }
        if delta.iter().flatten().flatten().any(|&q| q >= states.len()) {
            return Err(Error::Parse("transition to an unknown state".into()));
        }
        let distinct: HashSet<&String> = states.iter().collect();
        if distinct.len() != states.len() || states.iter().any(|s| !is_token(s)) {
            return Err(Error::Parse("state names must be distinct tokens".into()));
        }
        Ok(PartialAutomaton { states, alphabet, delta })
    }

    /// States named `q0, q1, …`.
    pub fn from_table(alphabet: &[&str], delta: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let states = (0..delta.len()).map(|i| format!("q{i}")).collect();
        Self::new(states, alphabet.iter().map(|s| s.to_string()).collect(), delta)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: AutomatonFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("automaton: line {}, column {}: {e}", e.line(), e.column())))?;
        let q = |name: &str| {
            f.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Parse(format!("automaton: unknown state `{name}`")))
        };
        let mut delta = vec![vec![None; f.alphabet.len()]; f.states.len()];
        for (src, x, dst) in &f.delta {
            let a = f
                .alphabet
                .iter()
                .position(|y| y == x)
                .ok_or_else(|| Error::Parse(format!("automaton: letter `{x}` not in the alphabet")))?;
            let (s, d) = (q(src)?, q(dst)?);
            if delta[s][a].is_some_and(|old| old != d) {
                return Err(Error::Parse(format!("automaton: two transitions for ({src}, {x})")));
            }
            delta[s][a] = Some(d);
        }
        Self::new(f.states, f.alphabet, delta)
    }

    pub fn to_json(&self) -> String {
        let delta: Vec<(String, String, String)> = self
            .delta
            .iter()
            .enumerate()
            .flat_map(|(q, row)| {
                row.iter().enumerate().filter_map(move |(x, t)| {
                    t.map(|t| (self.states[q].clone(), self.alphabet[x].clone(), self.states[t].clone()))
                })
            })
            .collect();
        serde_json::json!({ "states": self.states, "alphabet": self.alphabet, "delta": delta }).to_string()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn step(&self, q: usize, x: usize) -> Option<usize> {
        self.delta[q][x]
    }

    pub fn letter_index(&self, x: &str) -> Option<usize> {
        self.alphabet.iter().position(|y| y == x)
    }

    /// The letter's partial map on states.
    pub fn letter_map(&self, x: usize) -> Vec<Option<usize>> {
        self.delta.iter().map(|row| row[x]).collect()
    }

    /// The transition monoid: partial maps on Q generated by the letters.
    pub fn transition_monoid(&self) -> Result<FiniteMonoid> {
        type Map = Vec<Option<usize>>;
        let compose = |f: &Map, g: &Map| -> Map { f.iter().map(|&q| q.and_then(|q| g[q])).collect() };
        let id: Map = (0..self.len()).map(Some).collect();
        let letters: Vec<Map> = (0..self.alphabet.len()).map(|x| self.letter_map(x)).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Map, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for l in &letters {
                let c = compose(&elems[i], l);
                if !index.contains_key(&c) {
                    index.insert(c.clone(), elems.len());
                    elems.push(c);
                }
            }
            i += 1;
        }
        let generators: BTreeMap<String, usize> =
            self.alphabet.iter().zip(&letters).map(|(x, l)| (x.clone(), index[l])).collect();
        // Several letters may act alike; FiniteMonoid allows that.
        FiniteMonoid::from_elements(&elems, 0, compose, generators, None)
    }

    /// Direct s^ω = s^(ω+1) scan of the transition monoid.
    pub fn is_aperiodic(&self) -> Result<bool> {
        Ok(self.transition_monoid()?.is_aperiodic())
    }

    /// A canonical relabelling: the least transition table over all state
    /// permutations.  Isomorphic automata share it.
    pub fn canonical_key(&self) -> Vec<u8> {
        let n = self.len();
        let mut best: Option<Vec<u8>> = None;
        for perm in permutations(n) {
            // perm[old] = new
            let mut inv = vec![0; n];
            for (old, &new) in perm.iter().enumerate() {
                inv[new] = old;
            }
            let key: Vec<u8> = (0..n)
                .flat_map(|new| {
                    let old = inv[new];
                    self.delta[old].iter().map(|t| t.map_or(u8::MAX, |t| perm[t] as u8)).collect::<Vec<_>>()
                })
                .collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.unwrap_or_default()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every partial automaton with 1..=max_states states over `alphabet`, one
/// per isomorphism class.
pub fn enumerate_automata(max_states: usize, alphabet: &[&str]) -> Vec<PartialAutomaton> {
    let k = alphabet.len();
    let mut out = Vec::new();
    for n in 1..=max_states {
        let mut seen = HashSet::new();
        let cells = n * k;
        let total = (n + 1).pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let mut delta = vec![vec![None; k]; n];
            for cell in delta.iter_mut().flatten() {
                let v = c % (n + 1);
                c /= n + 1;
                *cell = (v < n).then_some(v);
            }
            let a = PartialAutomaton::from_table(alphabet, delta).expect("well-formed by construction");
            if seen.insert(a.canonical_key()) {
                out.push(a);
            }
        }
    }
    out
}

/// F: one lattice element per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowLabeling(pub Vec<SetPartition>);

impl FlowLabeling {
    /// JSON object: state name → set-partition text.
    pub fn parse(text: &str, a: &PartialAutomaton, point_names: &[String]) -> Result<Self> {
        let map: BTreeMap<String, String> = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("labeling: line {}, column {}: {e}", e.line(), e.column())))?;
        if let Some(k) = map.keys().find(|k| !a.states.contains(k)) {
            return Err(Error::Parse(format!("labeling: unknown state `{k}`")));
        }
        a.states
            .iter()
            .map(|q| {
                let t = map.get(q).ok_or_else(|| Error::Parse(format!("labeling: state `{q}` has no label")))?;
                SetPartition::parse(t, point_names)
            })
            .collect::<Result<_>>()
            .map(FlowLabeling)
    }

    pub fn to_json(&self, a: &PartialAutomaton, point_names: &[String]) -> String {
        let map: BTreeMap<&str, String> =
            a.states.iter().map(String::as_str).zip(self.0.iter().map(|p| p.render(point_names))).collect();
        serde_json::to_string_pretty(&map).expect("labels serialize")
    }
}

/// The letters of M acting on R, indexed by an automaton's alphabet.
#[derive(Clone, Debug)]
pub struct PointAction {
    pub n: usize,
    pub names: Vec<String>,
    pub letters: BTreeMap<String, Vec<Option<usize>>>,
}

impl PointAction {
    pub fn from_system(sys: &FlowSystem) -> Self {
        let letters = sys.letters().map(|(x, _)| (x.to_string(), sys.letter_map(x).unwrap().to_vec())).collect();
        PointAction { n: sys.lattice().points(), names: sys.point_names().to_vec(), letters }
    }

    pub fn from_monoid(m: &FiniteMonoid, points: &[usize]) -> Self {
        let act = crate::monoid::PartialAction::right_on(m, points);
        PointAction {
            n: points.len(),
            names: points.iter().map(|&p| m.name(p)).collect(),
            letters: m.generators().iter().map(|(x, &g)| (x.clone(), act.map_of(g))).collect(),
        }
    }

    fn map(&self, x: &str) -> Result<&[Option<usize>]> {
        self.letters.get(x).map(Vec::as_slice).ok_or_else(|| Error::UnknownLetter(x.to_string()))
    }

    fn image(&self, mask: u64, x: &str) -> Result<u64> {
        let map = self.map(x)?;
        Ok(points_of(mask).filter_map(|r| map[r]).fold(0, |a, t| a | bit(t)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    AlphabetMismatch(String),
    Edge { q: String, x: String },
    Sink { q: String, x: String },
    NotFullyDefined { r: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AlphabetMismatch(x) => write!(f, "ALPHABET_MISMATCH({x})"),
            Violation::Edge { q, x } => write!(f, "EDGE_VIOLATION({q},{x})"),
            Violation::Sink { q, x } => write!(f, "SINK_VIOLATION({q},{x})"),
            Violation::NotFullyDefined { r } => write!(f, "NOT_FULLY_DEFINED({r})"),
        }
    }
}

/// Edges stable for free flow, undefined transitions sending the carrier
/// out of R, and every point of R below some label.
pub fn verify_complete_flow(
    a: &PartialAutomaton,
    f: &FlowLabeling,
    pa: &PointAction,
) -> std::result::Result<(), Violation> {
    for x in &a.alphabet {
        if !pa.letters.contains_key(x) {
            return Err(Violation::AlphabetMismatch(x.clone()));
        }
    }
    if pa.letters.len() != a.alphabet.len() {
        let missing = pa.letters.keys().find(|x| !a.alphabet.contains(x)).unwrap();
        return Err(Violation::AlphabetMismatch(missing.clone()));
    }
    for (q, row) in a.delta.iter().enumerate() {
        for (xi, t) in row.iter().enumerate() {
            let x = &a.alphabet[xi];
            let map = pa.map(x).expect("alphabet checked");
            match t {
                Some(t) => {
                    if !word_pair_stable(map, &f.0[q], &f.0[*t]) {
                        return Err(Violation::Edge { q: a.states[q].clone(), x: x.clone() });
                    }
                }
                None => {
                    if pa.image(f.0[q].carrier(), x).expect("alphabet checked") != 0 {
                        return Err(Violation::Sink { q: a.states[q].clone(), x: x.clone() });
                    }
                }
            }
        }
    }
    let covered = f.0.iter().fold(0u64, |acc, l| acc | l.carrier());
    if let Some(r) = (0..pa.n).find(|&r| covered & bit(r) == 0) {
        return Err(Violation::NotFullyDefined { r: pa.names[r].clone() });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationViolation {
    pub q: String,
    pub block: Vec<String>,
    pub r: String,
    pub s: String,
}

impl fmt::Display for PresentationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PRESENTATION_VIOLATION: state {} has block {{{}}} holding {} H {}",
            self.q,
            self.block.join(" "),
            self.r,
            self.s
        )
    }
}

/// No label may hold two distinct H-equivalent points in one block.
pub fn check_presentation(
    a: &PartialAutomaton,
    f: &FlowLabeling,
    pa: &PointAction,
    h_related: impl Fn(usize, usize) -> bool,
) -> std::result::Result<(), PresentationViolation> {
    for (q, l) in f.0.iter().enumerate() {
        for &b in l.blocks() {
            let pts: Vec<usize> = points_of(b).collect();
            for (i, &r) in pts.iter().enumerate() {
                if let Some(&s) = pts[i + 1..].iter().find(|&&s| h_related(r, s)) {
                    return Err(PresentationViolation {
                        q: a.states[q].clone(),
                        block: pts.iter().map(|&p| pa.names[p].clone()).collect(),
                        r: pa.names[r].clone(),
                        s: pa.names[s].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Little Boxes: the product automaton labelled by meets of the factors'
/// labels.  The result is re-verified.
pub fn product_flows(
    parts: &[(PartialAutomaton, FlowLabeling)],
    pa: &PointAction,
) -> std::result::Result<(PartialAutomaton, FlowLabeling), Violation> {
    assert!(!parts.is_empty(), "product of no flows");
    let alphabet = parts[0].0.alphabet.clone();
    for (a, f) in parts {
        if a.alphabet != alphabet {
            return Err(Violation::AlphabetMismatch(a.alphabet.join(",")));
        }
        verify_complete_flow(a, f, pa)?;
    }
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for (a, _) in parts {
        tuples = tuples.into_iter().flat_map(|t| (0..a.len()).map(move |q| [t.clone(), vec![q]].concat())).collect();
    }
    let index: HashMap<&Vec<usize>, usize> = tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let delta = tuples
        .iter()
        .map(|t| {
            (0..alphabet.len())
                .map(|x| {
                    let next: Option<Vec<usize>> = t.iter().zip(parts).map(|(&q, (a, _))| a.step(q, x)).collect();
                    next.map(|n| index[&n])
                })
                .collect()
        })
        .collect();
    let names = tuples
        .iter()
        .map(|t| t.iter().zip(parts).map(|(&q, (a, _))| a.states[q].as_str()).collect::<Vec<_>>().join("."))
        .collect();
    let labels = tuples
        .iter()
        .map(|t| {
            t.iter()
                .zip(parts)
                .map(|(&q, (_, f))| f.0[q].clone())
                .reduce(|x, y| x.meet(&y))
                .expect("at least one factor")
        })
        .collect();
    let a = PartialAutomaton::new(names, alphabet, delta).expect("product of valid automata");
    let f = FlowLabeling(labels);
    verify_complete_flow(&a, &f, pa)?;
    Ok((a, f))
}

/// Φ = (φ₀, φ₁) with φ₁ canonical: the letter images n_x act on Q, and
/// φ₀ is given by preimages qφ₀⁻¹ ⊆ R.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    /// n_x as partial maps on Q, one per letter.
    pub letter_images: Vec<Vec<Option<usize>>>,
    /// qφ₀⁻¹ as a point mask, per state.
    pub preimages: Vec<u64>,
    /// Blocks of 𝒫 on D_Φ: (point, state) pairs.
    pub partition: Vec<Vec<(usize, usize)>>,
}

impl Presentation {
    /// φ₀ fully defined and n_x covering [x]_M: q φ₀⁻¹ · x ⊆ (q n_x) φ₀⁻¹.
    pub fn check_morphism(&self, pa: &PointAction) -> Result<()> {
        let all = self.preimages.iter().fold(0u64, |a, &m| a | m);
        if let Some(r) = (0..pa.n).find(|&r| all & bit(r) == 0) {
            return Err(Error::NotAdmissible(format!("φ₀ is not defined on {}", pa.names[r])));
        }
        for (xi, x) in self.alphabet.iter().enumerate() {
            for q in 0..self.states.len() {
                let img = pa.image(self.preimages[q], x)?;
                let target = self.letter_images[xi][q].map_or(0, |t| self.preimages[t]);
                if img & !target != 0 {
                    return Err(Error::NotAdmissible(format!(
                        "n_{x} does not cover [{x}]_M at state {}",
                        self.states[q]
                    )));
                }
            }
        }
        Ok(())
    }

    /// 𝒫 must partition #φ₀, keep states apart, and be an injective
    /// automaton congruence; checking generator transitions suffices
    /// because every transition of D_Φ is a composite of them.
    pub fn check_admissible(&self, pa: &PointAction) -> Result<()> {
        let mut block_of: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, blk) in self.partition.iter().enumerate() {
            if let Some(&(_, q0)) = blk.first() {
                if let Some(&(r, q)) = blk.iter().find(|&&(_, q)| q != q0) {
                    return Err(Error::NotAdmissible(format!(
                        "block mixes states {} and {} (at {})",
                        self.states[q0], self.states[q], pa.names[r]
                    )));
                }
            }
            for &(r, q) in blk {
                if self.preimages[q] & bit(r) == 0 {
                    return Err(Error::NotAdmissible(format!(
                        "({}, {}) is not a state of D_Φ",
                        pa.names[r], self.states[q]
                    )));
                }
                if block_of.insert((r, q), i).is_some() {
                    return Err(Error::NotAdmissible(format!(
                        "({}, {}) lies in two blocks",
                        pa.names[r], self.states[q]
                    )));
                }
            }
        }
        let size: usize = self.preimages.iter().map(|m| m.count_ones() as usize).sum();
        if block_of.len() != size {
            return Err(Error::NotAdmissible("𝒫 does not cover every state of D_Φ".into()));
        }
        for (xi, x) in self.alphabet.iter().enumerate() {
            let map = pa.map(x)?;
            for q in 0..self.states.len() {
                let Some(t) = self.letter_images[xi][q] else { continue };
                let pts: Vec<usize> = points_of(self.preimages[q]).filter(|&r| map[r].is_some()).collect();
                for &r in &pts {
                    for &s in &pts {
                        let src = block_of[&(r, q)] == block_of[&(s, q)];
                        let (rx, sx) = (map[r].unwrap(), map[s].unwrap());
                        let dst = block_of[&(rx, t)] == block_of[&(sx, t)];
                        if src != dst {
                            let what = if src { "not a congruence" } else { "not injective" };
                            return Err(Error::NotAdmissible(format!(
                                "{what}: ({r0}, {q0})·{x} and ({s0}, {q0})·{x} = ({rx0}, {t0}), ({sx0}, {t0})",
                                r0 = pa.names[r],
                                s0 = pa.names[s],
                                q0 = self.states[q],
                                rx0 = pa.names[rx],
                                sx0 = pa.names[sx],
                                t0 = self.states[t],
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Part (1) of the correspondence: preimages are the carriers, 𝒫 the blocks.
pub fn flow_to_presentation(a: &PartialAutomaton, f: &FlowLabeling, pa: &PointAction) -> Result<Presentation> {
    verify_complete_flow(a, f, pa).map_err(|v| Error::NotAdmissible(v.to_string()))?;
    let partition =
        f.0.iter()
            .enumerate()
            .flat_map(|(q, l)| l.blocks().iter().map(move |&b| points_of(b).map(|r| (r, q)).collect()))
            .collect();
    let p = Presentation {
        states: a.states.clone(),
        alphabet: a.alphabet.clone(),
        letter_images: (0..a.alphabet.len()).map(|x| a.letter_map(x)).collect(),
        preimages: f.0.iter().map(SetPartition::carrier).collect(),
        partition,
    };
    p.check_morphism(pa)?;
    p.check_admissible(pa)?;
    Ok(p)
}

/// Part (2): transitions q → q n_x, labels (qφ₀⁻¹, 𝒫 restricted to q).
pub fn presentation_to_flow(p: &Presentation, pa: &PointAction) -> Result<(PartialAutomaton, FlowLabeling)> {
    p.check_morphism(pa)?;
    p.check_admissible(pa)?;
    let delta = (0..p.states.len()).map(|q| p.letter_images.iter().map(|img| img[q]).collect()).collect();
    let a = PartialAutomaton::new(p.states.clone(), p.alphabet.clone(), delta)?;
    let mut blocks: Vec<Vec<u64>> = vec![Vec::new(); p.states.len()];
    for blk in &p.partition {
        if let Some(&(_, q)) = blk.first() {
            blocks[q].push(blk.iter().fold(0, |m, &(r, _)| m | bit(r)));
        }
    }
    let labels = blocks.into_iter().map(|bs| SetPartition::from_blocks(pa.n, bs)).collect::<Result<Vec<_>>>()?;
    let f = FlowLabeling(labels);
    verify_complete_flow(&a, &f, pa).map_err(|v| Error::NotAdmissible(v.to_string()))?;
    Ok((a, f))
}

/// The least complete flows on `a`: for every way of assigning each point
/// r to a state, the least flow above those points, kept when it respects
/// the sink.  Every complete flow lies above one of these.
pub fn minimal_complete_flows(a: &PartialAutomaton, sys: &FlowSystem) -> Result<Vec<Vec<u32>>> {
    let lat = sys.lattice();
    let n = lat.points();
    let pa = PointAction::from_system(sys);
    let mut la = LAutomaton::new(lat, a.len());
    for q in 0..a.len() {
        for (xi, x) in a.alphabet.iter().enumerate() {
            if let Some(t) = a.step(q, xi) {
                la = la.edge(q, t, sys.letter(x)?)?;
            }
        }
    }
    let k = a.len();
    let mut out = BTreeSet::new();
    for code in 0..k.pow(n as u32) {
        let mut seed = vec![lat.bottom(); k];
        let mut c = code;
        for r in 0..n {
            let q = c % k;
            c /= k;
            let joined = lat.elem(seed[q]).join(&SetPartition::point(n, r));
            seed[q] = lat.index_of(&joined);
        }
        let flow = least_flow(&la, &seed);
        let sink_ok = (0..k).all(|q| {
            (0..a.alphabet.len()).all(|xi| {
                a.step(q, xi).is_some()
                    || pa.image(lat.elem(flow[q]).carrier(), &a.alphabet[xi]).expect("letters of M") == 0
            })
        });
        if sink_ok {
            out.insert(flow);
        }
    }
    Ok(out.into_iter().collect())
}

/// A generated state that sits below no label of some complete flow.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub automaton: PartialAutomaton,
    pub flow: Vec<SetPartition>,
    pub state: SetPartition,
}

#[derive(Clone, Debug, Default)]
pub struct InevitabilityReport {
    pub automata: usize,
    pub aperiodic: usize,
    pub flows: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Every state in `states` must lie below some label of every complete flow
/// over every aperiodic automaton with at most `max_states` states.  The
/// minimal complete flows suffice: any complete flow lies above one.
pub fn inevitability_check(
    sys: &FlowSystem,
    states: &[SetPartition],
    max_states: usize,
) -> Result<InevitabilityReport> {
    use rayon::prelude::*;
    let names: Vec<&str> = sys.letters().map(|(x, _)| x).collect();
    let automata = enumerate_automata(max_states, &names);
    let lat = sys.lattice();
    // per automaton: None if not aperiodic, else (flows, counterexamples)
    type PerAutomaton = Option<(usize, Vec<Counterexample>)>;
    let per: Vec<Result<PerAutomaton>> = automata
        .par_iter()
        .map(|a| {
            if !a.is_aperiodic()? {
                return Ok(None);
            }
            let flows = minimal_complete_flows(a, sys)?;
            let mut bad = Vec::new();
            for flow in &flows {
                for l in states {
                    if !flow.iter().any(|&q| l.leq(lat.elem(q))) {
                        bad.push(Counterexample {
                            automaton: a.clone(),
                            flow: flow.iter().map(|&q| lat.elem(q).clone()).collect(),
                            state: l.clone(),
                        });
                    }
                }
            }
            Ok(Some((flows.len(), bad)))
        })
        .collect();
    let mut report = InevitabilityReport { automata: automata.len(), ..Default::default() };
    for r in per {
        if let Some((n, bad)) = r? {
            report.aperiodic += 1;
            report.flows += n;
            report.counterexamples.extend(bad);
        }
    }
    Ok(report)
}
