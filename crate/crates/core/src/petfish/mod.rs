//! The pet-fish demonstration: six animal nouns over seven features, a `pet`
//! adjective, and full retrieval rankings under both backends.

mod oracle;
pub mod tables;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use oracle::{
    exact_oracle_rankings, oracle_queries, raw_noun_weights, raw_pet_weights,
    symmetrized_oracle_rankings, symmetrized_queries,
};
pub use tables::{ANIMALS, FEATURES};

use crate::binding::{encode, BindingBackend, RoleFillerStructure};
use crate::cleanup::CleanupMemory;
use crate::error::{Error, Result};
use crate::hypervector::{random_unit, HyperVector};
use crate::lexicon::{Category, LexicalEntry, Lexicon};
use crate::rng::SeededRng;

pub const PET: &str = "pet";
pub(crate) const TENSOR_KEY: &str = "tensor-7";

/// Outcomes the demonstration hopes for: `pet <animal>` retrieves `<noun>`.
pub const WISHES: [(&str, &str); 3] = [("Fish", "Goldfish"), ("Cat", "Cat"), ("Dog", "Dog")];

/// One pointer per feature, in `FEATURES` order.
#[derive(Debug, Clone)]
pub struct FeatureBasis {
    vectors: Vec<HyperVector>,
}

impl FeatureBasis {
    /// Standard basis of R^7.
    pub fn exact() -> Self {
        Self {
            vectors: (0..7).map(|i| HyperVector::basis(7, i).expect("i < 7")).collect(),
        }
    }

    pub fn random(dim: usize, rng: &mut SeededRng) -> Result<Self> {
        Ok(Self {
            vectors: (0..7).map(|_| random_unit(dim, rng)).collect::<Result<_>>()?,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn vectors(&self) -> &[HyperVector] {
        &self.vectors
    }

    /// `Σ_f w_f p_f`.
    pub fn embed(&self, weights: &[f64]) -> Result<HyperVector> {
        if weights.len() != 7 {
            return Err(Error::InvalidArgument(format!(
                "feature weights need 7 entries, got {}",
                weights.len()
            )));
        }
        let mut acc = HyperVector::zeros(self.dim())?;
        for (w, p) in weights.iter().zip(&self.vectors) {
            acc = acc.add_scaled(*w, p)?;
        }
        Ok(acc)
    }

    /// `⟨x, p_f⟩` for each feature.
    pub fn decode(&self, x: &HyperVector) -> Result<[f64; 7]> {
        let mut out = [0.0; 7];
        for (o, p) in out.iter_mut().zip(&self.vectors) {
            *o = x.dot(p)?;
        }
        Ok(out)
    }
}

/// The six animals, each a unit-renormalized weighted sum of feature pointers.
pub fn build_petfish_nouns(basis: &FeatureBasis, backend: BindingBackend) -> Result<Lexicon> {
    let mut lex = Lexicon::with_dim(backend, basis.dim())?;
    for (a, name) in ANIMALS.iter().enumerate() {
        let col = tables::animal_column(a);
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        let unit: Vec<f64> = col.iter().map(|x| x / norm).collect();
        lex.insert(LexicalEntry::noun(*name, basis.embed(&unit)?))?;
    }
    Ok(lex)
}

/// `Σ_{cells = 1} p_row ⊗ p_col` over the pet table.
pub fn build_pet_adjective(basis: &FeatureBasis, backend: BindingBackend) -> Result<LexicalEntry> {
    let m = tables::pet_weights();
    let mut pairs = Vec::new();
    for (r, row) in m.iter().enumerate() {
        for (c, w) in row.iter().enumerate() {
            if *w != 0.0 {
                let filler = basis.vectors[r].scale(*w);
                pairs.push((basis.vectors[c].clone(), filler));
            }
        }
    }
    let payload = encode(&RoleFillerStructure::new(pairs)?, backend)?;
    Ok(LexicalEntry::new(PET, Category::Adjective, payload))
}

/// Nouns plus `pet`, ready to compose.
pub fn build_petfish_lexicon(basis: &FeatureBasis, backend: BindingBackend) -> Result<Lexicon> {
    let mut lex = build_petfish_nouns(basis, backend)?;
    lex.insert(build_pet_adjective(basis, backend)?)?;
    Ok(lex)
}

/// `pet <animal>` for every animal, in `ANIMALS` order.
pub fn compose_queries(lex: &Lexicon) -> Result<Vec<(String, HyperVector)>> {
    ANIMALS
        .iter()
        .map(|a| Ok((a.to_string(), lex.compose_adjective(PET, a)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Tensor,
    Hrr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PetfishConfig {
    pub backends: Vec<BackendKind>,
    pub hrr_dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub normalize_outputs: bool,
}

impl Default for PetfishConfig {
    fn default() -> Self {
        Self {
            backends: vec![BackendKind::Tensor, BackendKind::Hrr],
            hrr_dims: vec![128, 512, 2048, 4096],
            trials: 50,
            seed: 0,
            normalize_outputs: true,
        }
    }
}

impl PetfishConfig {
    pub(crate) fn tensor_only() -> Self {
        Self {
            backends: vec![BackendKind::Tensor],
            hrr_dims: Vec::new(),
            trials: 1,
            seed: 0,
            normalize_outputs: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.backends.is_empty() {
            return Err(Error::InvalidArgument("no backends selected".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.backends.contains(&BackendKind::Hrr) {
            if self.hrr_dims.is_empty() {
                return Err(Error::InvalidArgument("hrr backend needs at least one dim".into()));
            }
            if let Some(d) = self.hrr_dims.iter().find(|d| **d < 2) {
                return Err(Error::InvalidArgument(format!("hrr dim {d} is below 2")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedNoun {
    pub noun: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRecord {
    pub backend: String,
    pub dim: usize,
    pub trial: usize,
    pub animal: String,
    pub ranking: Vec<RankedNoun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub tensor_oracle: f64,
    pub symmetrized_oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WishObservation {
    pub group: String,
    pub animal: String,
    pub wished: String,
    /// Most frequent winner.
    pub observed: String,
    /// Fraction of trials in which the wished noun ranked first.
    pub wished_frequency: f64,
    pub holds: bool,
}

/// Per-group summaries; groups are keyed `<backend>-<dim>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    /// group → animal → winning noun → fraction of trials
    pub winner_frequency: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    /// group → animal → noun → mean cosine
    pub mean_scores: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    /// group → mean Spearman correlation with the two oracles
    pub rank_correlation: BTreeMap<String, RankCorrelation>,
    pub wishes: Vec<WishObservation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub config: PetfishConfig,
    pub results: Vec<RankingRecord>,
    pub aggregates: Aggregates,
}

pub const CSV_HEADER: &str = "backend,dim,trial,animal,rank,noun,score";

impl RankingReport {
    /// Every ranking lists the six animals once each with finite scores in [-1, 1].
    pub fn validate(&self) -> Result<()> {
        let mut want: Vec<&str> = ANIMALS.to_vec();
        want.sort_unstable();
        for r in &self.results {
            let mut got: Vec<&str> = r.ranking.iter().map(|m| m.noun.as_str()).collect();
            got.sort_unstable();
            if got != want {
                return Err(Error::InvalidArgument(format!(
                    "ranking for {} is not a permutation of the animals",
                    r.animal
                )));
            }
            if let Some(m) = r
                .ranking
                .iter()
                .find(|m| !m.score.is_finite() || m.score.abs() > 1.0)
            {
                return Err(Error::InvalidArgument(format!("score {} out of range", m.score)));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.results {
            for (i, m) in r.ranking.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.backend,
                    r.dim,
                    r.trial,
                    r.animal,
                    i + 1,
                    m.noun,
                    m.score
                );
            }
        }
        out
    }

    /// Winner per (group, animal), most frequent first.
    pub fn winners(&self) -> Vec<(String, String, String, f64)> {
        let mut out = Vec::new();
        for (group, animals) in &self.aggregates.winner_frequency {
            for animal in ANIMALS {
                if let Some(freqs) = animals.get(animal) {
                    let (noun, f) = top_entry(freqs);
                    out.push((group.clone(), animal.to_string(), noun, f));
                }
            }
        }
        out
    }

    /// Rankings for one group, in trial then animal order.
    pub fn group(&self, backend: &str, dim: usize) -> impl Iterator<Item = &RankingRecord> {
        let backend = backend.to_string();
        self.results
            .iter()
            .filter(move |r| r.backend == backend && r.dim == dim)
    }
}

fn top_entry(freqs: &BTreeMap<String, f64>) -> (String, f64) {
    freqs
        .iter()
        .fold((String::new(), f64::NEG_INFINITY), |best, (n, f)| {
            if *f > best.1 {
                (n.clone(), *f)
            } else {
                best
            }
        })
}

/// Spearman correlation between two orderings of the same names.
pub fn spearman(a: &[String], b: &[String]) -> Result<f64> {
    let n = a.len();
    if n != b.len() || n < 2 {
        return Err(Error::InvalidArgument("rankings must share ≥ 2 names".into()));
    }
    let mut d2 = 0.0;
    for (i, name) in a.iter().enumerate() {
        let j = b
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::InvalidArgument(format!("`{name}` missing from ranking")))?;
        d2 += ((i as f64) - (j as f64)).powi(2);
    }
    let n = n as f64;
    Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
}

fn rank_one(
    lex: &Lexicon,
    backend: &str,
    dim: usize,
    trial: usize,
) -> Result<Vec<RankingRecord>> {
    let memory = CleanupMemory::new(
        ANIMALS.iter().map(|a| Ok((*a, lex.noun(a)?.clone()))).collect::<Result<Vec<_>>>()?,
        -1.0,
    )?;
    compose_queries(lex)?
        .into_iter()
        .map(|(animal, q)| {
            let ranking = memory
                .full_ranking(&q)?
                .into_iter()
                .map(|m| RankedNoun {
                    noun: m.name,
                    score: m.score,
                })
                .collect();
            Ok(RankingRecord {
                backend: backend.to_string(),
                dim,
                trial,
                animal,
                ranking,
            })
        })
        .collect()
}

/// Compose `pet` with every animal and rank all six nouns. Holographic trials
/// draw fresh feature pointers from `seed ⊕ trial`.
pub fn run_petfish(config: &PetfishConfig) -> Result<RankingReport> {
    config.validate()?;
    let mut results = Vec::new();
    let mut backends = config.backends.clone();
    backends.sort();
    backends.dedup();
    for kind in backends {
        match kind {
            BackendKind::Tensor => {
                let lex = build_petfish_lexicon(&FeatureBasis::exact(), BindingBackend::Tensor)?
                    .normalizing_outputs(config.normalize_outputs);
                results.extend(rank_one(&lex, "tensor", 7, 0)?);
            }
            BackendKind::Hrr => {
                for &dim in &config.hrr_dims {
                    for trial in 0..config.trials {
                        let mut rng = SeededRng::for_trial(config.seed, trial as u64);
                        let basis = FeatureBasis::random(dim, &mut rng)?;
                        let lex = build_petfish_lexicon(&basis, BindingBackend::hrr(dim)?)?
                            .normalizing_outputs(config.normalize_outputs);
                        results.extend(rank_one(&lex, "hrr", dim, trial)?);
                    }
                }
            }
        }
    }
    let aggregates = aggregate(&results)?;
    Ok(RankingReport {
        config: config.clone(),
        results,
        aggregates,
    })
}

fn names(r: &RankingRecord) -> Vec<String> {
    r.ranking.iter().map(|m| m.noun.clone()).collect()
}

fn aggregate(results: &[RankingRecord]) -> Result<Aggregates> {
    let exact = exact_oracle_rankings();
    let symm = symmetrized_oracle_rankings();
    let oracle_for = |rep: &RankingReport, animal: &str| {
        names(rep.results.iter().find(|r| r.animal == animal).expect("six animals"))
    };

    let mut winner_frequency: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>> =
        BTreeMap::new();
    let mut mean_scores: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>> =
        BTreeMap::new();
    let mut counts: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    let mut corr: BTreeMap<String, (f64, f64, f64)> = BTreeMap::new();

    for r in results {
        let group = format!("{}-{}", r.backend, r.dim);
        *winner_frequency
            .entry(group.clone())
            .or_default()
            .entry(r.animal.clone())
            .or_default()
            .entry(r.ranking[0].noun.clone())
            .or_default() += 1.0;
        let scores = mean_scores
            .entry(group.clone())
            .or_default()
            .entry(r.animal.clone())
            .or_default();
        for m in &r.ranking {
            *scores.entry(m.noun.clone()).or_default() += m.score;
        }
        *counts
            .entry(group.clone())
            .or_default()
            .entry(r.animal.clone())
            .or_default() += 1.0;
        let got = names(r);
        let c = corr.entry(group).or_default();
        c.0 += spearman(&got, &oracle_for(&exact, &r.animal))?;
        c.1 += spearman(&got, &oracle_for(&symm, &r.animal))?;
        c.2 += 1.0;
    }

    for (group, animals) in winner_frequency.iter_mut() {
        for (animal, freqs) in animals.iter_mut() {
            let n = counts[group][animal];
            freqs.values_mut().for_each(|f| *f /= n);
            mean_scores
                .get_mut(group)
                .and_then(|m| m.get_mut(animal))
                .expect("same keys")
                .values_mut()
                .for_each(|s| *s /= n);
        }
    }

    let mut wishes = Vec::new();
    for (group, animals) in &winner_frequency {
        for (animal, wished) in WISHES {
            if let Some(freqs) = animals.get(animal) {
                let (observed, _) = top_entry(freqs);
                wishes.push(WishObservation {
                    group: group.clone(),
                    animal: animal.to_string(),
                    wished: wished.to_string(),
                    holds: observed == wished,
                    observed,
                    wished_frequency: freqs.get(wished).copied().unwrap_or(0.0),
                });
            }
        }
    }

    Ok(Aggregates {
        winner_frequency,
        mean_scores,
        rank_correlation: corr
            .into_iter()
            .map(|(g, (a, b, n))| {
                (
                    g,
                    RankCorrelation {
                        tensor_oracle: a / n,
                        symmetrized_oracle: b / n,
                    },
                )
            })
            .collect(),
        wishes,
    })
}
