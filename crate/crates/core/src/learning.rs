//! Supervised learning of word representations from labelled percepts.
//!
//! A hidden lexicon stands in for the world. Each presentation samples a
//! label, composes it in the hidden lexicon, perturbs and renormalizes the
//! result, and hands the learner `(label, percept)`. Unseen words are
//! initialized from the percept; words seen before are moved by a convex
//! mixture towards the fresh binding:
//!
//! ```text
//! A ← (1−h)·A + h·(an ⊗ n)        n ← (1−h)·n + h·extract(A, an)
//! V ← (1−h)·V + h·(nv ⊗ n)        n ← (1−h)·n + h·extract(V, nv)
//! ```
//!
//! `extract` recovers the role (noun) side of a binding from a filler cue.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::binding::{bind, unbind, unbind_complement, BindingBackend};
use crate::cleanup::CleanupMemory;
use crate::error::{Error, Result};
use crate::hypervector::{check_dims, cosine, random_unit, HyperVector};
use crate::lexicon::{build_adjective, build_iverb, Category, LexicalEntry, Lexicon, LexiconDocument};
use crate::rng::SeededRng;
use crate::tensor::Payload;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Phrase {
    AdjNoun { adjective: String, noun: String },
    NounVerb { noun: String, iverb: String },
}

impl Phrase {
    pub fn adj_noun(adjective: &str, noun: &str) -> Self {
        Phrase::AdjNoun {
            adjective: adjective.into(),
            noun: noun.into(),
        }
    }

    pub fn noun_verb(noun: &str, iverb: &str) -> Self {
        Phrase::NounVerb {
            noun: noun.into(),
            iverb: iverb.into(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Phrase::AdjNoun { adjective, noun } => format!("{adjective} {noun}"),
            Phrase::NounVerb { noun, iverb } => format!("{noun} {iverb}"),
        }
    }

    pub fn noun(&self) -> &str {
        match self {
            Phrase::AdjNoun { noun, .. } | Phrase::NounVerb { noun, .. } => noun,
        }
    }

    /// The adjective or verb.
    pub fn functor(&self) -> &str {
        match self {
            Phrase::AdjNoun { adjective, .. } => adjective,
            Phrase::NounVerb { iverb, .. } => iverb,
        }
    }

    fn functor_category(&self) -> Category {
        match self {
            Phrase::AdjNoun { .. } => Category::Adjective,
            Phrase::NounVerb { .. } => Category::IVerb,
        }
    }
}

/// Compose a phrase in `lex`.
pub fn compose_phrase(lex: &Lexicon, phrase: &Phrase) -> Result<HyperVector> {
    match phrase {
        Phrase::AdjNoun { adjective, noun } => lex.compose_adjective(adjective, noun),
        Phrase::NounVerb { noun, iverb } => lex.compose_intransitive(noun, iverb),
    }
}

/// Hidden lexicon plus the label distribution and percept noise.
#[derive(Debug, Clone)]
pub struct GroundTruthWorld {
    hidden: Lexicon,
    noise_sigma: f64,
    phrases: Vec<(Phrase, f64)>,
    sampler: WeightedIndex<f64>,
}

impl GroundTruthWorld {
    pub fn new(hidden: Lexicon, noise_sigma: f64, phrases: Vec<(Phrase, f64)>) -> Result<Self> {
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(Error::InvalidArgument(format!("noise_sigma {noise_sigma} must be ≥ 0")));
        }
        if phrases.is_empty() {
            return Err(Error::EmptyPhraseDistribution);
        }
        if hidden.noun_dim() != hidden.sentence_dim() {
            return Err(Error::InvalidArgument(
                "learning needs the sentence space to equal the noun space".into(),
            ));
        }
        let total: f64 = phrases.iter().map(|(_, w)| w).sum();
        if phrases.iter().any(|(_, w)| !(w.is_finite() && *w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "phrase weights must be non-negative and sum to 1 (sum {total})"
            )));
        }
        for (p, _) in &phrases {
            let f = hidden.get(p.functor())?;
            if f.category != p.functor_category() {
                return Err(Error::CategoryMismatch {
                    expected: p.functor_category().name(),
                    found: f.category.name(),
                });
            }
            hidden.noun(p.noun())?;
        }
        let sampler = WeightedIndex::new(phrases.iter().map(|(_, w)| *w))
            .map_err(|e| Error::InvalidArgument(format!("phrase weights: {e}")))?;
        Ok(Self {
            hidden,
            noise_sigma,
            phrases,
            sampler,
        })
    }

    /// Random world: a unit pointer per noun, a unit percept per label, and
    /// each adjective or verb built from the labels it appears in.
    pub fn random(
        backend: BindingBackend,
        dim: usize,
        phrases: Vec<(Phrase, f64)>,
        noise_sigma: f64,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        let mut hidden = Lexicon::with_dim(backend, dim)?;
        for (p, _) in &phrases {
            if !hidden.contains(p.noun()) {
                hidden.insert(LexicalEntry::noun(p.noun(), random_unit(dim, rng)?))?;
            }
        }
        let mut groups: BTreeMap<(String, Category), Vec<(HyperVector, HyperVector)>> =
            BTreeMap::new();
        for (p, _) in &phrases {
            let key = (p.functor().to_string(), p.functor_category());
            let pairs = groups.entry(key).or_default();
            let n = hidden.noun(p.noun())?.clone();
            if !pairs.iter().any(|(_, role)| *role == n) {
                pairs.push((random_unit(dim, rng)?, n));
            }
        }
        for ((word, cat), pairs) in groups {
            let entry = match cat {
                Category::Adjective => build_adjective(word, &pairs, backend)?,
                _ => {
                    let swapped: Vec<_> = pairs.into_iter().map(|(s, n)| (n, s)).collect();
                    build_iverb(word, &swapped, backend)?
                }
            };
            hidden.insert(entry)?;
        }
        Self::new(hidden, noise_sigma, phrases)
    }

    pub fn hidden(&self) -> &Lexicon {
        &self.hidden
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn phrases(&self) -> &[(Phrase, f64)] {
        &self.phrases
    }

    /// Unit-normalized hidden composition of a label.
    pub fn clean_percept(&self, phrase: &Phrase) -> Result<HyperVector> {
        compose_phrase(&self.hidden, phrase)?.normalize()
    }

    /// Noise has per-coordinate std `noise_sigma / √dim`, so its expected
    /// norm is `noise_sigma` whatever the dimension.
    pub fn perturb(&self, clean: &HyperVector, rng: &mut SeededRng) -> Result<HyperVector> {
        if self.noise_sigma == 0.0 {
            return Ok(clean.clone());
        }
        let s = self.noise_sigma / (clean.dim() as f64).sqrt();
        let noisy: Vec<f64> = clean
            .as_slice()
            .iter()
            .map(|x| {
                let z: f64 = StandardNormal.sample(rng);
                x + s * z
            })
            .collect();
        HyperVector::new(noisy)?.normalize()
    }

    pub fn sample_phrase(&self, rng: &mut SeededRng) -> &Phrase {
        &self.phrases[self.sampler.sample(rng)].0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stimulus {
    pub label: Phrase,
    pub percept: HyperVector,
}

pub fn generate_stimulus(world: &GroundTruthWorld, rng: &mut SeededRng) -> Result<Stimulus> {
    let label = world.sample_phrase(rng).clone();
    let clean = world.clean_percept(&label)?;
    Ok(Stimulus {
        percept: world.perturb(&clean, rng)?,
        label,
    })
}

/// Initial representation of a word first met with `percept`: the percept
/// itself for a noun, `percept ⊗ percept` for an adjective or verb.
pub fn init_unseen(
    word: &str,
    percept: &HyperVector,
    kind: Category,
    backend: BindingBackend,
) -> Result<LexicalEntry> {
    if percept.is_zero() {
        return Err(Error::ZeroVector);
    }
    let payload = match kind {
        Category::Noun => Payload::Vector(percept.clone()),
        Category::Adjective | Category::IVerb => bind(percept, percept, backend)?,
        Category::TVerb => {
            return Err(Error::InvalidArgument(
                "transitive verbs are not learned".into(),
            ))
        }
    };
    Ok(LexicalEntry::new(word, kind, payload))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    /// Adjective (or verb) with the current noun, then the noun with the
    /// just-updated adjective.
    AdjectiveFirst,
    NounFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnerConfig {
    pub h: f64,
    pub update_order: UpdateOrder,
    pub renormalize_nouns: bool,
    /// Keep noun vectors fixed once initialized.
    pub freeze_nouns: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            h: 0.1,
            update_order: UpdateOrder::AdjectiveFirst,
            renormalize_nouns: true,
            freeze_nouns: false,
        }
    }
}

impl LearnerConfig {
    pub fn with_h(h: f64) -> Self {
        Self {
            h,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.h) {
            return Err(Error::InvalidLearningRate(self.h));
        }
        Ok(())
    }
}

/// What happened to one word during a presentation.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRecord {
    pub word: String,
    pub initialized: bool,
    /// `‖new − old‖` (zero for initialization).
    pub delta_norm: f64,
    /// `‖old − term‖` where `term` is the fresh binding or extracted factor.
    pub distance_to_term: f64,
}

#[derive(Debug, Clone)]
pub struct LearnerState {
    lexicon: Lexicon,
    config: LearnerConfig,
    presentations: u64,
    seen: BTreeMap<String, u64>,
}

impl LearnerState {
    pub fn new(backend: BindingBackend, dim: usize, config: LearnerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            lexicon: Lexicon::with_dim(backend, dim)?,
            config,
            presentations: 0,
            seen: BTreeMap::new(),
        })
    }

    /// Start from an existing lexicon; its words count as seen once.
    pub fn from_lexicon(lexicon: Lexicon, config: LearnerConfig) -> Result<Self> {
        config.validate()?;
        if lexicon.noun_dim() != lexicon.sentence_dim() {
            return Err(Error::InvalidArgument(
                "learning needs the sentence space to equal the noun space".into(),
            ));
        }
        let seen = lexicon.entries().map(|e| (e.word.clone(), 1)).collect();
        Ok(Self {
            lexicon,
            config,
            presentations: 0,
            seen,
        })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn h(&self) -> f64 {
        self.config.h
    }

    pub fn presentations(&self) -> u64 {
        self.presentations
    }

    pub fn seen_count(&self, word: &str) -> u64 {
        self.seen.get(word).copied().unwrap_or(0)
    }

    fn backend(&self) -> BindingBackend {
        self.lexicon.backend()
    }

    fn check_percept(&self, percept: &HyperVector) -> Result<()> {
        check_dims("percept", self.lexicon.noun_dim(), percept.dim())
    }

    fn mix(&mut self, word: &str, term: Payload, renormalize: bool) -> Result<UpdateRecord> {
        let h = self.config.h;
        let old = self.lexicon.get(word)?.payload.clone();
        let distance_to_term = old.distance(&term)?;
        let mut new = old.scale(1.0 - h).add_scaled(h, &term)?;
        if renormalize {
            if let Payload::Vector(v) = &new {
                new = Payload::Vector(v.normalize()?);
            }
        }
        let delta_norm = new.distance(&old)?;
        self.lexicon.set_payload(word, new)?;
        Ok(UpdateRecord {
            word: word.to_string(),
            initialized: false,
            delta_norm,
            distance_to_term,
        })
    }

    /// `A ← (1−h)·A + h·(percept ⊗ noun)` using the current learned noun.
    /// Also the verb rule, with the sentence percept as filler.
    pub fn update_functor(&mut self, word: &str, percept: &HyperVector, noun: &str) -> Result<UpdateRecord> {
        self.check_percept(percept)?;
        let n = self.lexicon.noun(noun)?.clone();
        let term = bind(percept, &n, self.backend())?;
        self.mix(word, term, false)
    }

    pub fn update_adjective(&mut self, adj: &str, percept: &HyperVector, noun: &str) -> Result<UpdateRecord> {
        self.lexicon.get(adj)?;
        if self.lexicon.get(adj)?.category != Category::Adjective {
            return Err(Error::CategoryMismatch {
                expected: "adjective",
                found: self.lexicon.get(adj)?.category.name(),
            });
        }
        self.update_functor(adj, percept, noun)
    }

    pub fn update_iverb(&mut self, verb: &str, noun: &str, percept: &HyperVector) -> Result<UpdateRecord> {
        if self.lexicon.get(verb)?.category != Category::IVerb {
            return Err(Error::CategoryMismatch {
                expected: "iverb",
                found: self.lexicon.get(verb)?.category.name(),
            });
        }
        self.update_functor(verb, percept, noun)
    }

    /// `n ← (1−h)·n + h·extract(F, percept)`, renormalized per config.
    pub fn update_noun(&mut self, noun: &str, percept: &HyperVector, functor: &str) -> Result<UpdateRecord> {
        self.check_percept(percept)?;
        self.lexicon.noun(noun)?;
        let f = &self.lexicon.get(functor)?.payload;
        let extracted = unbind_complement(f, percept, self.backend())?;
        let renorm = self.config.renormalize_nouns;
        self.mix(noun, Payload::Vector(extracted), renorm)
    }

    fn init(&mut self, word: &str, percept: &HyperVector, kind: Category) -> Result<UpdateRecord> {
        let entry = init_unseen(word, percept, kind, self.backend())?;
        self.lexicon.insert(entry)?;
        Ok(UpdateRecord {
            word: word.to_string(),
            initialized: true,
            delta_norm: 0.0,
            distance_to_term: 0.0,
        })
    }

    /// One presentation. Words unseen before it are initialized from the
    /// percept; the others are updated in the configured order.
    pub fn present(&mut self, stimulus: &Stimulus) -> Result<Vec<UpdateRecord>> {
        let Stimulus { label, percept } = stimulus;
        self.check_percept(percept)?;
        let (functor, noun) = (label.functor(), label.noun());
        let functor_seen = self.lexicon.contains(functor);
        let noun_seen = self.lexicon.contains(noun);
        let mut out = Vec::new();
        if !noun_seen {
            out.push(self.init(noun, percept, Category::Noun)?);
        }
        if !functor_seen {
            out.push(self.init(functor, percept, label.functor_category())?);
        } else if self.lexicon.get(functor)?.category != label.functor_category() {
            return Err(Error::CategoryMismatch {
                expected: label.functor_category().name(),
                found: self.lexicon.get(functor)?.category.name(),
            });
        }
        let update_noun = noun_seen && !self.config.freeze_nouns;
        match self.config.update_order {
            UpdateOrder::AdjectiveFirst => {
                if functor_seen {
                    out.push(self.update_functor(functor, percept, noun)?);
                }
                if update_noun {
                    out.push(self.update_noun(noun, percept, functor)?);
                }
            }
            UpdateOrder::NounFirst => {
                if update_noun {
                    out.push(self.update_noun(noun, percept, functor)?);
                }
                if functor_seen {
                    out.push(self.update_functor(functor, percept, noun)?);
                }
            }
        }
        *self.seen.entry(noun.to_string()).or_default() += 1;
        *self.seen.entry(functor.to_string()).or_default() += 1;
        self.presentations += 1;
        Ok(out)
    }

    /// Lexicon document with a `{h, presentations_done, seed, seen}` block.
    pub fn checkpoint(&self, seed: u64) -> LexiconDocument {
        let mut doc = self.lexicon.to_document();
        doc.metadata = Some(serde_json::json!({
            "h": self.config.h,
            "presentations_done": self.presentations,
            "seed": seed,
            "seen": self.seen,
        }));
        doc
    }

    /// Inverse of [`checkpoint`](Self::checkpoint); returns the stored seed.
    pub fn from_checkpoint(doc: &LexiconDocument, mut config: LearnerConfig) -> Result<(Self, u64)> {
        #[derive(Deserialize)]
        struct Meta {
            h: f64,
            presentations_done: u64,
            seed: u64,
            #[serde(default)]
            seen: BTreeMap<String, u64>,
        }
        let meta: Meta = serde_json::from_value(
            doc.metadata
                .clone()
                .ok_or_else(|| Error::Serialization("checkpoint has no metadata".into()))?,
        )?;
        config.h = meta.h;
        let mut state = Self::from_lexicon(Lexicon::from_document(doc)?, config)?;
        state.presentations = meta.presentations_done;
        state.seen = meta.seen;
        Ok((state, meta.seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub epoch: u64,
    pub word: String,
    pub metric: String,
    pub value: f64,
}

/// Evaluation rows in presentation order. Per-word metrics are
/// `cosine_to_truth` and `update_norm` (mean since the previous evaluation);
/// `retrieval_accuracy` uses the word `*`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub rows: Vec<CurveRow>,
}

pub const CURVE_CSV_HEADER: &str = "epoch,word,metric,value";
pub const ACCURACY: &str = "retrieval_accuracy";
pub const COSINE_TO_TRUTH: &str = "cosine_to_truth";
pub const UPDATE_NORM: &str = "update_norm";

impl LearningCurve {
    pub fn epochs(&self) -> Vec<u64> {
        let mut e: Vec<u64> = self.rows.iter().map(|r| r.epoch).collect();
        e.dedup();
        e
    }

    pub fn metric(&self, word: &str, metric: &str) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.word == word && r.metric == metric)
            .map(|r| (r.epoch, r.value))
            .collect()
    }

    pub fn final_accuracy(&self) -> Option<f64> {
        self.metric("*", ACCURACY).last().map(|(_, v)| *v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CURVE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.epoch, r.word, r.metric, r.value);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub presentations: u64,
    /// Evaluate after every this many presentations (0 = only at the end).
    pub eval_every: u64,
    /// A label counts as retrieved when its nearest hidden composition is
    /// itself with cosine at least this large.
    pub retrieval_threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            presentations: 200,
            eval_every: 20,
            retrieval_threshold: 0.5,
        }
    }
}

fn payload_cosine(a: &Payload, b: &Payload) -> Option<f64> {
    if a.shape() != b.shape() {
        return None;
    }
    cosine(&a.flatten(), &b.flatten()).ok()
}

/// Fraction of labels whose learned composition cleans up to its own hidden
/// composition.
pub fn retrieval_accuracy(world: &GroundTruthWorld, learned: &Lexicon, threshold: f64) -> Result<f64> {
    let targets = world
        .phrases()
        .iter()
        .map(|(p, _)| Ok((p.label(), world.clean_percept(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let memory = CleanupMemory::new(targets, threshold)?;
    let mut hits = 0usize;
    for (p, _) in world.phrases() {
        let Ok(v) = compose_phrase(learned, p) else { continue };
        if v.is_zero() {
            continue;
        }
        if let Some(m) = memory.cleanup(&v)? {
            if m.name == p.label() {
                hits += 1;
            }
        }
    }
    Ok(hits as f64 / world.phrases().len() as f64)
}

fn evaluate(
    world: &GroundTruthWorld,
    state: &LearnerState,
    threshold: f64,
    pending: &mut BTreeMap<String, (f64, u64)>,
    rows: &mut Vec<CurveRow>,
) -> Result<()> {
    let epoch = state.presentations;
    for e in state.lexicon.entries() {
        if let Ok(truth) = world.hidden.get(&e.word) {
            if let Some(c) = payload_cosine(&e.payload, &truth.payload) {
                rows.push(CurveRow {
                    epoch,
                    word: e.word.clone(),
                    metric: COSINE_TO_TRUTH.into(),
                    value: c,
                });
            }
        }
    }
    for (word, (sum, n)) in std::mem::take(pending) {
        rows.push(CurveRow {
            epoch,
            word,
            metric: UPDATE_NORM.into(),
            value: sum / n as f64,
        });
    }
    rows.push(CurveRow {
        epoch,
        word: "*".into(),
        metric: ACCURACY.into(),
        value: retrieval_accuracy(world, &state.lexicon, threshold)?,
    });
    Ok(())
}

/// Present `config.presentations` stimuli drawn from `rng`, evaluating before
/// the first, every `eval_every`, and after the last.
pub fn train(
    world: &GroundTruthWorld,
    state: &mut LearnerState,
    config: &TrainConfig,
    rng: &mut SeededRng,
) -> Result<LearningCurve> {
    if !(-1.0..=1.0).contains(&config.retrieval_threshold) {
        return Err(Error::InvalidArgument(format!(
            "retrieval threshold {} outside [-1, 1]",
            config.retrieval_threshold
        )));
    }
    check_dims("learner", world.hidden.noun_dim(), state.lexicon.noun_dim())?;
    if world.hidden.backend() != state.lexicon.backend() {
        return Err(Error::InvalidArgument("learner and world backends differ".into()));
    }
    let mut rows = Vec::new();
    let mut pending = BTreeMap::new();
    evaluate(world, state, config.retrieval_threshold, &mut pending, &mut rows)?;
    for i in 1..=config.presentations {
        let stimulus = generate_stimulus(world, rng)?;
        for rec in state.present(&stimulus)? {
            if !rec.initialized {
                let slot: &mut (f64, u64) = pending.entry(rec.word).or_default();
                slot.0 += rec.delta_norm;
                slot.1 += 1;
            }
        }
        let due = config.eval_every > 0 && i % config.eval_every == 0;
        if due || i == config.presentations {
            evaluate(world, state, config.retrieval_threshold, &mut pending, &mut rows)?;
        }
    }
    Ok(LearningCurve { rows })
}

/// `unbind(A, n)` for a learned adjective and noun; convenience for probes.
pub fn probe(lex: &Lexicon, functor: &str, noun: &str) -> Result<HyperVector> {
    unbind(&lex.get(functor)?.payload, lex.noun(noun)?, lex.backend())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::outer;
    use proptest::prelude::*;

    const T: BindingBackend = BindingBackend::Tensor;

    fn one_pair_world(dim: usize, noise: f64, seed: u64) -> GroundTruthWorld {
        GroundTruthWorld::random(
            T,
            dim,
            vec![(Phrase::adj_noun("red", "car"), 1.0)],
            noise,
            &mut SeededRng::new(seed),
        )
        .unwrap()
    }

    fn grid_world(backend: BindingBackend, dim: usize, noise: f64, seed: u64) -> GroundTruthWorld {
        let phrases = [("red", "car"), ("red", "apple"), ("blue", "car"), ("blue", "apple")]
            .iter()
            .map(|(a, n)| (Phrase::adj_noun(a, n), 0.25))
            .collect();
        GroundTruthWorld::random(backend, dim, phrases, noise, &mut SeededRng::new(seed)).unwrap()
    }

    #[test]
    fn zero_noise_percept_is_clean() {
        let w = one_pair_world(64, 0.0, 1);
        let s = generate_stimulus(&w, &mut SeededRng::new(2)).unwrap();
        let clean = w.clean_percept(&s.label).unwrap();
        assert_eq!(s.percept, clean);
        assert!((s.percept.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stimulus_stream_is_seeded() {
        let w = grid_world(T, 32, 0.1, 3);
        let draw = |seed| {
            let mut rng = SeededRng::new(seed);
            (0..20).map(|_| generate_stimulus(&w, &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn percept_noise_matches_closed_form() {
        // unit clean vector plus noise of expected squared norm σ²:
        // cos ≈ 1/√(1 + σ²)
        let w = one_pair_world(512, 0.1, 4);
        let clean = w.clean_percept(&w.phrases()[0].0).unwrap();
        let mut rng = SeededRng::new(5);
        let n = 2000;
        let mean: f64 = (0..n)
            .map(|_| cosine(&w.perturb(&clean, &mut rng).unwrap(), &clean).unwrap())
            .sum::<f64>()
            / n as f64;
        let want = 1.0 / (1.0f64 + 0.01).sqrt();
        assert!((mean - want).abs() < 1e-3, "{mean} vs {want}");
    }

    #[test]
    fn world_validation() {
        let hidden = one_pair_world(8, 0.0, 1).hidden().clone();
        let p = Phrase::adj_noun("red", "car");
        assert_eq!(
            GroundTruthWorld::new(hidden.clone(), 0.0, vec![]).unwrap_err(),
            Error::EmptyPhraseDistribution
        );
        assert!(GroundTruthWorld::new(hidden.clone(), 0.0, vec![(p.clone(), 0.5)]).is_err());
        assert!(GroundTruthWorld::new(hidden.clone(), -1.0, vec![(p, 1.0)]).is_err());
        assert_eq!(
            GroundTruthWorld::new(hidden, 0.0, vec![(Phrase::adj_noun("red", "boat"), 1.0)])
                .unwrap_err(),
            Error::UnknownWord("boat".into())
        );
    }

    #[test]
    fn init_rules() {
        let mut rng = SeededRng::new(6);
        let p = random_unit(16, &mut rng).unwrap();
        let n = init_unseen("n", &p, Category::Noun, T).unwrap();
        assert!((cosine(n.payload.as_vector().unwrap(), &p).unwrap() - 1.0).abs() < 1e-12);
        let a = init_unseen("a", &p, Category::Adjective, T).unwrap();
        let back = unbind(&a.payload, &p, T).unwrap();
        assert!(back.max_abs_diff(&p).unwrap() < 1e-12);
        assert_eq!(
            init_unseen("z", &HyperVector::zeros(4).unwrap(), Category::Noun, T).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn holographic_adjective_init_recovers_percept() {
        let dim = 1024;
        let backend = BindingBackend::hrr(dim).unwrap();
        let mut total = 0.0;
        for t in 0..100 {
            let p = random_unit(dim, &mut SeededRng::for_trial(70, t)).unwrap();
            let a = init_unseen("a", &p, Category::Adjective, backend).unwrap();
            total += cosine(&unbind(&a.payload, &p, backend).unwrap(), &p).unwrap();
        }
        assert!(total / 100.0 >= 0.5, "{}", total / 100.0);
    }

    fn seeded_state(h: f64, noun: &HyperVector, adj_init: &HyperVector) -> LearnerState {
        let mut state = LearnerState::new(T, noun.dim(), LearnerConfig::with_h(h)).unwrap();
        state.lexicon.insert(LexicalEntry::noun("car", noun.clone())).unwrap();
        state
            .lexicon
            .insert(init_unseen("red", adj_init, Category::Adjective, T).unwrap())
            .unwrap();
        state
    }

    #[test]
    fn h_zero_and_one() {
        let mut rng = SeededRng::new(8);
        let (n, a0, an) = (
            random_unit(8, &mut rng).unwrap(),
            random_unit(8, &mut rng).unwrap(),
            random_unit(8, &mut rng).unwrap(),
        );
        let mut s = seeded_state(0.0, &n, &a0);
        let before = s.lexicon.clone();
        s.update_adjective("red", &an, "car").unwrap();
        s.update_noun("car", &an, "red").unwrap();
        assert_eq!(s.lexicon, before);

        let mut s = seeded_state(1.0, &n, &a0);
        s.update_adjective("red", &an, "car").unwrap();
        assert_eq!(
            s.lexicon.get("red").unwrap().payload,
            Payload::Matrix(outer(&an, &n))
        );
        assert!(LearnerState::new(T, 8, LearnerConfig::with_h(1.5)).is_err());
    }

    #[test]
    fn geometric_decay_with_frozen_noun() {
        let mut rng = SeededRng::new(9);
        let (n, a0, an) = (
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
        );
        let h = 0.1;
        let mut s = seeded_state(h, &n, &a0);
        s.config.freeze_nouns = true;
        let fresh = Payload::Matrix(outer(&an, &n));
        let stim = Stimulus {
            label: Phrase::adj_noun("red", "car"),
            percept: an,
        };
        let mut d = s.lexicon.get("red").unwrap().payload.distance(&fresh).unwrap();
        for _ in 0..200 {
            s.present(&stim).unwrap();
            let next = s.lexicon.get("red").unwrap().payload.distance(&fresh).unwrap();
            assert!((next - (1.0 - h) * d).abs() < 1e-10);
            d = next;
        }
    }

    #[test]
    fn noun_update_moves_towards_truth() {
        let mut rng = SeededRng::new(10);
        let (n_true, n_old, an) = (
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
        );
        let mut s = LearnerState::new(T, 16, LearnerConfig::with_h(0.3)).unwrap();
        s.lexicon.insert(LexicalEntry::noun("car", n_old.clone())).unwrap();
        s.lexicon
            .insert(LexicalEntry::new("red", Category::Adjective, Payload::Matrix(outer(&an, &n_true))))
            .unwrap();
        let before = cosine(&n_old, &n_true).unwrap();
        s.update_noun("car", &an, "red").unwrap();
        let after = cosine(s.lexicon.noun("car").unwrap(), &n_true).unwrap();
        assert!(after > before);

        s.config.h = 1.0;
        s.update_noun("car", &an, "red").unwrap();
        assert!((cosine(s.lexicon.noun("car").unwrap(), &n_true).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verb_rules() {
        let mut rng = SeededRng::new(11);
        let (n, nv, v0) = (
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
            random_unit(16, &mut rng).unwrap(),
        );
        let mut s = LearnerState::new(T, 16, LearnerConfig::with_h(0.0)).unwrap();
        s.config.freeze_nouns = true;
        s.lexicon.insert(LexicalEntry::noun("dog", n.clone())).unwrap();
        s.lexicon.insert(init_unseen("runs", &v0, Category::IVerb, T).unwrap()).unwrap();
        let before = s.lexicon.clone();
        s.update_iverb("runs", "dog", &nv).unwrap();
        assert_eq!(s.lexicon, before);

        s.config.h = 0.1;
        let target = Payload::Matrix(outer(&nv, &n));
        let stim = Stimulus {
            label: Phrase::noun_verb("dog", "runs"),
            percept: nv.clone(),
        };
        let mut d = s.lexicon.get("runs").unwrap().payload.distance(&target).unwrap();
        for _ in 0..50 {
            s.present(&stim).unwrap();
            let next = s.lexicon.get("runs").unwrap().payload.distance(&target).unwrap();
            assert!((next - 0.9 * d).abs() < 1e-10);
            d = next;
        }

        // rank-1 verb: cue nv extracts n
        let mut s = LearnerState::new(T, 16, LearnerConfig::with_h(1.0)).unwrap();
        s.lexicon.insert(LexicalEntry::noun("dog", v0)).unwrap();
        s.lexicon
            .insert(LexicalEntry::new("runs", Category::IVerb, Payload::Matrix(outer(&nv, &n))))
            .unwrap();
        s.update_noun("dog", &nv, "runs").unwrap();
        assert!((cosine(s.lexicon.noun("dog").unwrap(), &n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_pair_training_converges() {
        let w = one_pair_world(64, 0.0, 12);
        let mut s = LearnerState::new(T, 64, LearnerConfig::with_h(0.2)).unwrap();
        let cfg = TrainConfig {
            presentations: 200,
            eval_every: 50,
            retrieval_threshold: 0.5,
        };
        let curve = train(&w, &mut s, &cfg, &mut SeededRng::new(13)).unwrap();
        assert_eq!(curve.epochs(), vec![0, 50, 100, 150, 200]);
        assert_eq!(curve.final_accuracy(), Some(1.0));
        assert_eq!(curve.metric("*", ACCURACY)[0], (0, 0.0));
    }

    #[test]
    fn zero_presentations_only_initial_row() {
        let w = one_pair_world(16, 0.0, 12);
        let mut s = LearnerState::new(T, 16, LearnerConfig::default()).unwrap();
        let cfg = TrainConfig {
            presentations: 0,
            ..TrainConfig::default()
        };
        let curve = train(&w, &mut s, &cfg, &mut SeededRng::new(1)).unwrap();
        assert_eq!(curve.epochs(), vec![0]);
        assert_eq!(curve.rows.len(), 1);
    }

    #[test]
    fn adjective_cosine_monotone_single_pair() {
        // learner already knows the true noun; adjective starts elsewhere
        let w = one_pair_world(32, 0.0, 14);
        let truth = w.hidden().get("red").unwrap().payload.clone();
        let n = w.hidden().noun("car").unwrap().clone();
        let a0 = random_unit(32, &mut SeededRng::new(15)).unwrap();
        let mut s = seeded_state(0.1, &n, &a0);
        let stim = generate_stimulus(&w, &mut SeededRng::new(16)).unwrap();
        let mut last = payload_cosine(&s.lexicon.get("red").unwrap().payload, &truth).unwrap();
        for _ in 0..100 {
            s.present(&stim).unwrap();
            let c = payload_cosine(&s.lexicon.get("red").unwrap().payload, &truth).unwrap();
            assert!(c >= last - 1e-12, "{c} < {last}");
            last = c;
        }
        assert!(last > 0.5);
    }

    #[test]
    fn expected_update_vanishes_at_fixed_point() {
        let w = grid_world(T, 16, 0.0, 17);
        let hidden = w.hidden();
        let mut s = LearnerState::new(T, 16, LearnerConfig::with_h(0.1)).unwrap();
        s.config.freeze_nouns = true;
        for noun in ["car", "apple"] {
            s.lexicon.insert(LexicalEntry::noun(noun, hidden.noun(noun).unwrap().clone())).unwrap();
        }
        // A_adj = Σ p(label | adj) · percept ⊗ noun over that adjective's labels
        for adj in ["red", "blue"] {
            let labels: Vec<_> = w.phrases().iter().filter(|(p, _)| p.functor() == adj).collect();
            let mass: f64 = labels.iter().map(|(_, wgt)| wgt).sum();
            let mut acc = Payload::Matrix(crate::tensor::DenseMatrix::zeros(16, 16).unwrap());
            for (p, wgt) in labels {
                let term = bind(&w.clean_percept(p).unwrap(), hidden.noun(p.noun()).unwrap(), T).unwrap();
                acc = acc.add_scaled(wgt / mass, &term).unwrap();
            }
            s.lexicon.insert(LexicalEntry::new(adj, Category::Adjective, acc)).unwrap();
        }
        // balanced schedule: every label exactly 250 times; each adjective
        // sees its two nouns equally often
        let base = s.lexicon.clone();
        let mut sums: BTreeMap<String, Payload> = BTreeMap::new();
        let mut counts: BTreeMap<String, f64> = BTreeMap::new();
        for i in 0..1000 {
            let (p, _) = &w.phrases()[i % 4];
            let mut probe_state = s.clone();
            let percept = w.clean_percept(p).unwrap();
            probe_state.update_adjective(p.functor(), &percept, p.noun()).unwrap();
            let old = &base.get(p.functor()).unwrap().payload;
            let delta = probe_state.lexicon.get(p.functor()).unwrap().payload.add_scaled(-1.0, old).unwrap();
            let e = sums.entry(p.functor().to_string()).or_insert_with(|| delta.scale(0.0));
            *e = e.add_scaled(1.0, &delta).unwrap();
            *counts.entry(p.functor().to_string()).or_default() += 1.0;
        }
        for (adj, sum) in sums {
            let mean = sum.scale(1.0 / counts[&adj]);
            assert!(mean.norm() < 1e-10, "{adj}: {}", mean.norm());
        }
    }

    #[test]
    fn seen_unseen_consistency() {
        let mut rng = SeededRng::new(18);
        let an = random_unit(8, &mut rng).unwrap();
        let n = random_unit(8, &mut rng).unwrap();
        let mut s = LearnerState::new(T, 8, LearnerConfig::with_h(1.0)).unwrap();
        s.lexicon.insert(LexicalEntry::noun("car", n.clone())).unwrap();
        s.lexicon.insert(init_unseen("red", &an, Category::Adjective, T).unwrap()).unwrap();
        s.update_adjective("red", &an, "car").unwrap();
        let direct = build_adjective("red", &[(an, n)], T).unwrap();
        assert_eq!(s.lexicon.get("red").unwrap(), &direct);
    }

    #[test]
    fn training_is_deterministic() {
        let run = || {
            let w = grid_world(T, 32, 0.05, 19);
            let mut s = LearnerState::new(T, 32, LearnerConfig::default()).unwrap();
            train(&w, &mut s, &TrainConfig::default(), &mut SeededRng::new(20)).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn grid_world_learns() {
        for seed in 0..3 {
            let w = grid_world(T, 512, 0.05, 100 + seed);
            let mut s = LearnerState::new(T, 512, LearnerConfig::default()).unwrap();
            let curve = train(&w, &mut s, &TrainConfig::default(), &mut SeededRng::new(seed)).unwrap();
            assert!(curve.final_accuracy().unwrap() >= 0.75, "seed {seed}");
        }
    }

    /// The noun rule mixes in every noun the adjective was bound to, weighted
    /// by percept overlap, so nouns sharing adjectives are drawn together.
    #[test]
    fn shared_nouns_drift_together() {
        let w = grid_world(T, 128, 0.0, 101);
        let mut s = LearnerState::new(T, 128, LearnerConfig::default()).unwrap();
        let mut rng = SeededRng::new(1);
        let cfg = TrainConfig { presentations: 20, eval_every: 0, retrieval_threshold: 0.5 };
        train(&w, &mut s, &cfg, &mut rng).unwrap();
        let early = cosine(s.lexicon().noun("car").unwrap(), s.lexicon().noun("apple").unwrap()).unwrap();
        let cfg = TrainConfig { presentations: 400, ..cfg };
        train(&w, &mut s, &cfg, &mut rng).unwrap();
        let late = cosine(s.lexicon().noun("car").unwrap(), s.lexicon().noun("apple").unwrap()).unwrap();
        assert!(late > early + 0.3, "{early} -> {late}");
    }

    #[test]
    fn shuffled_order_gives_similar_accuracy() {
        let mut diffs = 0.0;
        for seed in 0..10 {
            let w = grid_world(T, 256, 0.0, 200 + seed);
            let acc = |stream_seed| {
                let mut s = LearnerState::new(T, 256, LearnerConfig::default()).unwrap();
                train(&w, &mut s, &TrainConfig::default(), &mut SeededRng::new(stream_seed))
                    .unwrap()
                    .final_accuracy()
                    .unwrap()
            };
            diffs += acc(seed) - acc(seed + 1000);
        }
        assert!((diffs / 10.0).abs() <= 0.05, "{}", diffs / 10.0);
    }

    #[test]
    fn checkpoint_round_trip() {
        let w = grid_world(T, 16, 0.05, 21);
        let mut s = LearnerState::new(T, 16, LearnerConfig::default()).unwrap();
        train(&w, &mut s, &TrainConfig { presentations: 30, ..TrainConfig::default() }, &mut SeededRng::new(22))
            .unwrap();
        let doc = s.checkpoint(22);
        let json = serde_json::to_string(&doc).unwrap();
        let back: LexiconDocument = serde_json::from_str(&json).unwrap();
        let (restored, seed) = LearnerState::from_checkpoint(&back, LearnerConfig::default()).unwrap();
        assert_eq!(seed, 22);
        assert_eq!(restored.presentations(), 30);
        assert_eq!(restored.lexicon(), s.lexicon());
        assert_eq!(restored.seen_count("red"), s.seen_count("red"));
    }

    proptest! {
        #[test]
        fn convex_update(h in 0.0f64..=1.0, seed in any::<u64>()) {
            let mut rng = SeededRng::new(seed);
            let (n, a0, an) = (
                random_unit(6, &mut rng).unwrap(),
                random_unit(6, &mut rng).unwrap(),
                random_unit(6, &mut rng).unwrap(),
            );
            let mut s = seeded_state(h, &n, &a0);
            let old = s.lexicon.get("red").unwrap().payload.clone();
            s.update_adjective("red", &an, "car").unwrap();
            let term = Payload::Matrix(outer(&an, &n));
            let want = old.scale(1.0 - h).add_scaled(h, &term).unwrap();
            prop_assert!(s.lexicon.get("red").unwrap().payload.distance(&want).unwrap() < 1e-12);
        }
    }
}
