//! Grammar-typed lexicon and composition.
//!
//! | category   | Tensor payload                        | Hrr payload |
//! |------------|---------------------------------------|-------------|
//! | Noun       | vector in N                           | vector      |
//! | Adjective  | `N × N` matrix                        | vector      |
//! | IVerb      | `S × N` matrix                        | vector      |
//! | TVerb      | `N × S × N` tensor (subject, S, object) | vector    |
//!
//! Function words are built as role-filler structures whose roles are nouns
//! and whose fillers are the composed phrases, so applying a function word to
//! a noun is unbinding that noun. Under Hrr a transitive verb unbinds the
//! subject first and then the object.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binding::{backend_mismatch, encode, unbind, BindingBackend, RoleFillerStructure};
use crate::error::{Error, Result};
use crate::hypervector::{check_dims, circ_conv, circ_corr, cosine, random_unit, HyperVector};
use crate::rng::SeededRng;
use crate::tensor::{contract3, outer, Contraction, Order3Tensor, Payload};

/// Serialization format version for lexicon documents.
pub const LEXICON_FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Noun,
    Adjective,
    #[serde(rename = "iverb")]
    IVerb,
    #[serde(rename = "tverb")]
    TVerb,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Noun => "noun",
            Category::Adjective => "adjective",
            Category::IVerb => "iverb",
            Category::TVerb => "tverb",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalEntry {
    pub word: String,
    pub category: Category,
    pub payload: Payload,
}

impl LexicalEntry {
    pub fn new(word: impl Into<String>, category: Category, payload: Payload) -> Self {
        Self {
            word: word.into(),
            category,
            payload,
        }
    }

    pub fn noun(word: impl Into<String>, v: HyperVector) -> Self {
        Self::new(word, Category::Noun, Payload::Vector(v))
    }

    fn expect(&self, category: Category) -> Result<()> {
        if self.category != category {
            return Err(Error::CategoryMismatch {
                expected: category.name(),
                found: self.category.name(),
            });
        }
        Ok(())
    }

    fn noun_vector(&self) -> Result<&HyperVector> {
        self.expect(Category::Noun)?;
        self.payload.as_vector().ok_or_else(|| Error::ShapeMismatch {
            op: "noun payload",
            detail: format!("expected vector, found {}", self.payload.kind()),
        })
    }
}

/// `adj · noun`: matrix-vector product (Tensor) or `adj ⊘ noun` (Hrr).
pub fn apply_adjective(
    adj: &LexicalEntry,
    noun: &LexicalEntry,
    backend: BindingBackend,
) -> Result<HyperVector> {
    adj.expect(Category::Adjective)?;
    unbind(&adj.payload, noun.noun_vector()?, backend)
}

/// `verb · subject` into the sentence space.
pub fn apply_intransitive(
    verb: &LexicalEntry,
    subject: &LexicalEntry,
    backend: BindingBackend,
) -> Result<HyperVector> {
    verb.expect(Category::IVerb)?;
    unbind(&verb.payload, subject.noun_vector()?, backend)
}

/// Contract both noun slots: `Σ_ik t_ijk s_i o_k` (Tensor) or
/// `(verb ⊘ subject) ⊘ object` (Hrr).
pub fn apply_transitive(
    verb: &LexicalEntry,
    subject: &LexicalEntry,
    object: &LexicalEntry,
    backend: BindingBackend,
) -> Result<HyperVector> {
    verb.expect(Category::TVerb)?;
    let (s, o) = (subject.noun_vector()?, object.noun_vector()?);
    match (backend, &verb.payload) {
        (BindingBackend::Tensor, Payload::Order3(t)) => match contract3(t, Some(s), Some(o))? {
            Contraction::Vector(v) => Ok(v),
            Contraction::Matrix(_) => unreachable!("both sides contracted"),
        },
        (BindingBackend::Hrr { dim }, Payload::Vector(v)) => {
            check_dims("apply_transitive", dim, v.dim())?;
            circ_corr(&circ_corr(v, s)?, o)
        }
        _ => Err(backend_mismatch("apply_transitive", backend, &verb.payload)),
    }
}

/// `adj = Σ an_i ⊗ n_i`, nouns as roles and adjective-noun vectors as fillers.
pub fn build_adjective(
    word: impl Into<String>,
    pairs: &[(HyperVector, HyperVector)],
    backend: BindingBackend,
) -> Result<LexicalEntry> {
    let structure =
        RoleFillerStructure::new(pairs.iter().map(|(an, n)| (n.clone(), an.clone())).collect())?;
    check_dims("build_adjective", structure.role_dim(), structure.filler_dim())?;
    Ok(LexicalEntry::new(word, Category::Adjective, encode(&structure, backend)?))
}

/// `verb = Σ sent_i ⊗ n_i` from `(noun, sentence)` pairs.
pub fn build_iverb(
    word: impl Into<String>,
    pairs: &[(HyperVector, HyperVector)],
    backend: BindingBackend,
) -> Result<LexicalEntry> {
    let structure = RoleFillerStructure::new(pairs.to_vec())?;
    Ok(LexicalEntry::new(word, Category::IVerb, encode(&structure, backend)?))
}

/// `verb = Σ n_subj ⊗ sent ⊗ n_obj` from `(subject, sentence, object)` triples.
pub fn build_tverb(
    word: impl Into<String>,
    triples: &[(HyperVector, HyperVector, HyperVector)],
    backend: BindingBackend,
) -> Result<LexicalEntry> {
    let (s0, m0, o0) = triples.first().ok_or(Error::EmptyStructure)?;
    for (s, m, o) in triples {
        check_dims("build_tverb (subject)", s0.dim(), s.dim())?;
        check_dims("build_tverb (sentence)", m0.dim(), m.dim())?;
        check_dims("build_tverb (object)", o0.dim(), o.dim())?;
    }
    let payload = match backend {
        BindingBackend::Tensor => {
            let mut acc = Order3Tensor::zeros(s0.dim(), m0.dim(), o0.dim())?;
            for (s, m, o) in triples {
                acc = acc.try_add(&Order3Tensor::outer3(s, m, o))?;
            }
            Payload::Order3(acc)
        }
        BindingBackend::Hrr { dim } => {
            check_dims("build_tverb", dim, s0.dim())?;
            check_dims("build_tverb", dim, m0.dim())?;
            check_dims("build_tverb", dim, o0.dim())?;
            let mut acc = HyperVector::zeros(dim)?;
            for (s, m, o) in triples {
                acc = acc.try_add(&circ_conv(&circ_conv(m, s)?, o)?)?;
            }
            Payload::Vector(acc)
        }
    };
    Ok(LexicalEntry::new(word, Category::TVerb, payload))
}

/// Word store for one backend with noun space N and sentence space S.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    backend: BindingBackend,
    noun_dim: usize,
    sentence_dim: usize,
    normalize_outputs: bool,
    entries: BTreeMap<String, LexicalEntry>,
}

impl Lexicon {
    pub fn new(backend: BindingBackend, noun_dim: usize, sentence_dim: usize) -> Result<Self> {
        if noun_dim == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if sentence_dim == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        if let BindingBackend::Hrr { dim } = backend {
            check_dims("hrr lexicon (noun space)", dim, noun_dim)?;
            check_dims("hrr lexicon (sentence space)", dim, sentence_dim)?;
        }
        Ok(Self {
            backend,
            noun_dim,
            sentence_dim,
            normalize_outputs: false,
            entries: BTreeMap::new(),
        })
    }

    /// Lexicon with the sentence space equal to the noun space.
    pub fn with_dim(backend: BindingBackend, dim: usize) -> Result<Self> {
        Self::new(backend, dim, dim)
    }

    pub fn normalizing_outputs(mut self, on: bool) -> Self {
        self.normalize_outputs = on;
        self
    }

    pub fn backend(&self) -> BindingBackend {
        self.backend
    }

    pub fn noun_dim(&self) -> usize {
        self.noun_dim
    }

    pub fn sentence_dim(&self) -> usize {
        self.sentence_dim
    }

    pub fn normalize_outputs(&self) -> bool {
        self.normalize_outputs
    }

    pub fn expected_shape(&self, category: Category) -> Vec<usize> {
        let (n, s) = (self.noun_dim, self.sentence_dim);
        match (self.backend, category) {
            (_, Category::Noun) => vec![n],
            (BindingBackend::Hrr { dim }, _) => vec![dim],
            (BindingBackend::Tensor, Category::Adjective) => vec![n, n],
            (BindingBackend::Tensor, Category::IVerb) => vec![s, n],
            (BindingBackend::Tensor, Category::TVerb) => vec![n, s, n],
        }
    }

    pub fn check_payload(&self, category: Category, payload: &Payload) -> Result<()> {
        let want = self.expected_shape(category);
        let vector_expected = want.len() == 1;
        let kind_ok = match payload {
            Payload::Vector(_) => vector_expected,
            Payload::Matrix(_) => want.len() == 2,
            Payload::Order3(_) => want.len() == 3,
        };
        if !kind_ok || payload.shape() != want {
            return Err(Error::ShapeMismatch {
                op: "lexicon entry",
                detail: format!(
                    "{category} under {} backend needs shape {want:?}, got {:?}",
                    self.backend.name(),
                    payload.shape()
                ),
            });
        }
        Ok(())
    }

    /// Add a word. Noun payloads are normalized to unit length.
    pub fn insert(&mut self, mut entry: LexicalEntry) -> Result<()> {
        if self.entries.contains_key(&entry.word) {
            return Err(Error::DuplicateName(entry.word));
        }
        self.check_payload(entry.category, &entry.payload)?;
        if entry.category == Category::Noun {
            let v = entry.noun_vector()?.normalize()?;
            entry.payload = Payload::Vector(v);
        }
        self.entries.insert(entry.word.clone(), entry);
        Ok(())
    }

    /// Replace a word's payload in place; the shape must not change.
    pub fn set_payload(&mut self, word: &str, payload: Payload) -> Result<()> {
        let entry = self
            .entries
            .get(word)
            .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
        self.check_payload(entry.category, &payload)?;
        self.entries.get_mut(word).expect("checked").payload = payload;
        Ok(())
    }

    pub fn get(&self, word: &str) -> Result<&LexicalEntry> {
        self.entries
            .get(word)
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values()
    }

    pub fn words_of(&self, category: Category) -> Vec<&str> {
        self.entries
            .values()
            .filter(|e| e.category == category)
            .map(|e| e.word.as_str())
            .collect()
    }

    pub fn noun(&self, word: &str) -> Result<&HyperVector> {
        self.get(word)?.noun_vector()
    }

    fn finish(&self, v: HyperVector) -> Result<HyperVector> {
        if self.normalize_outputs {
            v.normalize()
        } else {
            Ok(v)
        }
    }

    pub fn compose_adjective(&self, adj: &str, noun: &str) -> Result<HyperVector> {
        self.finish(apply_adjective(self.get(adj)?, self.get(noun)?, self.backend)?)
    }

    pub fn compose_intransitive(&self, subject: &str, verb: &str) -> Result<HyperVector> {
        self.finish(apply_intransitive(self.get(verb)?, self.get(subject)?, self.backend)?)
    }

    pub fn compose_transitive(&self, subject: &str, verb: &str, object: &str) -> Result<HyperVector> {
        self.finish(apply_transitive(
            self.get(verb)?,
            self.get(subject)?,
            self.get(object)?,
            self.backend,
        )?)
    }

    pub fn to_document(&self) -> LexiconDocument {
        LexiconDocument {
            format_version: LEXICON_FORMAT_VERSION.to_string(),
            backend: self.backend,
            noun_dim: self.noun_dim,
            sentence_dim: self.sentence_dim,
            normalize_outputs: self.normalize_outputs,
            entries: self
                .entries
                .values()
                .map(|e| EntryRecord {
                    word: e.word.clone(),
                    category: e.category,
                    shape: e.payload.shape(),
                    values: e.payload.values().to_vec(),
                })
                .collect(),
            metadata: None,
        }
    }

    /// Rebuild from a document. Entries are checked against the declared
    /// backend and dimensions; values are taken verbatim.
    pub fn from_document(doc: &LexiconDocument) -> Result<Self> {
        if doc.format_version != LEXICON_FORMAT_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported lexicon format version `{}`",
                doc.format_version
            )));
        }
        let mut lex = Self::new(doc.backend, doc.noun_dim, doc.sentence_dim)?
            .normalizing_outputs(doc.normalize_outputs);
        for rec in &doc.entries {
            let payload = Payload::from_shape(&rec.shape, rec.values.clone())?;
            if lex.entries.contains_key(&rec.word) {
                return Err(Error::DuplicateName(rec.word.clone()));
            }
            lex.check_payload(rec.category, &payload)?;
            lex.entries.insert(
                rec.word.clone(),
                LexicalEntry::new(rec.word.clone(), rec.category, payload),
            );
        }
        Ok(lex)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(s)?)
    }
}

/// On-disk lexicon. Values are row-major; `serde_json` writes the shortest
/// decimal that parses back to the identical `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconDocument {
    pub format_version: String,
    pub backend: BindingBackend,
    pub noun_dim: usize,
    pub sentence_dim: usize,
    #[serde(default)]
    pub normalize_outputs: bool,
    pub entries: Vec<EntryRecord>,
    /// Free-form block used by checkpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub word: String,
    pub category: Category,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

/// Named role tags for additive (tagged-sum) composition.
#[derive(Debug, Clone)]
pub struct RoleTagSet {
    tags: BTreeMap<String, HyperVector>,
}

impl RoleTagSet {
    /// Standard basis vectors `e_0, e_1, …` in `dim` dimensions.
    pub fn orthonormal(names: &[&str], dim: usize) -> Result<Self> {
        if names.len() > dim {
            return Err(Error::InvalidArgument(format!(
                "{} orthonormal tags do not fit in {dim} dimensions",
                names.len()
            )));
        }
        Self::from_vectors(
            names
                .iter()
                .enumerate()
                .map(|(i, n)| Ok((n.to_string(), HyperVector::basis(dim, i)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Random unit pointers, for the holographic backend.
    pub fn random(names: &[&str], dim: usize, rng: &mut SeededRng) -> Result<Self> {
        Self::from_vectors(
            names
                .iter()
                .map(|n| Ok((n.to_string(), random_unit(dim, rng)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn from_vectors(tags: Vec<(String, HyperVector)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut dim = None;
        for (name, v) in tags {
            let d = *dim.get_or_insert(v.dim());
            check_dims("role tags", d, v.dim())?;
            if map.insert(name.clone(), v).is_some() {
                return Err(Error::DuplicateName(name));
            }
        }
        Ok(Self { tags: map })
    }

    pub fn get(&self, name: &str) -> Result<&HyperVector> {
        self.tags
            .get(name)
            .ok_or_else(|| Error::UnknownTag(name.to_string()))
    }

    /// Largest `|cos|` between distinct tags.
    pub fn max_cross_cosine(&self) -> Result<f64> {
        let v: Vec<_> = self.tags.values().collect();
        let mut worst: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                worst = worst.max(cosine(v[i], v[j])?.abs());
            }
        }
        Ok(worst)
    }
}

fn bind_flat(a: &HyperVector, b: &HyperVector, backend: BindingBackend) -> Result<HyperVector> {
    match backend {
        BindingBackend::Tensor => Ok(outer(a, b).flatten()),
        BindingBackend::Hrr { dim } => {
            check_dims("bind", dim, a.dim())?;
            check_dims("bind", dim, b.dim())?;
            circ_conv(a, b)
        }
    }
}

/// `(1/√k) Σ_i vec_i ⊗ tag_i` (Tensor, flattened) or `(1/√k) Σ_i vec_i ⊛ tag_i`.
pub fn additive_compose(
    words: &[(&HyperVector, &str)],
    tags: &RoleTagSet,
    backend: BindingBackend,
) -> Result<HyperVector> {
    let (first, _) = words.first().ok_or(Error::EmptyStructure)?;
    let mut seen = BTreeSet::new();
    let mut acc: Option<HyperVector> = None;
    for (vec, tag) in words {
        check_dims("additive_compose", first.dim(), vec.dim())?;
        if !seen.insert(*tag) {
            return Err(Error::RepeatedTag(tag.to_string()));
        }
        let term = bind_flat(vec, tags.get(tag)?, backend)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.try_add(&term)?,
        });
    }
    let k = words.len() as f64;
    Ok(acc.expect("non-empty").scale(1.0 / k.sqrt()))
}

/// `(cos(pred ⊗ a, pred ⊗ b), cos(a, b))`.
pub fn conjunctive_similarity_check(
    pred: &HyperVector,
    a: &HyperVector,
    b: &HyperVector,
    backend: BindingBackend,
) -> Result<(f64, f64)> {
    check_dims("conjunctive_similarity_check", a.dim(), b.dim())?;
    let bound_a = bind_flat(pred, a, backend)?;
    let bound_b = bind_flat(pred, b, backend)?;
    Ok((cosine(&bound_a, &bound_b)?, cosine(a, b)?))
}
