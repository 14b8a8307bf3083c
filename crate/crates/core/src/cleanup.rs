//! Nearest-neighbour cleanup against a named vocabulary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervector::{check_dims, cosine, HyperVector};

/// A retrieved vocabulary item and its cosine to the query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match {
    pub name: String,
    pub score: f64,
}

/// Named unit vectors; queries below `threshold` report no match.
#[derive(Debug, Clone)]
pub struct CleanupMemory {
    entries: Vec<(String, HyperVector)>,
    threshold: f64,
}

impl CleanupMemory {
    /// Vectors are normalized on insertion. Names must be unique and all
    /// vectors must share one dimension.
    pub fn new<I, S>(entries: I, threshold: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (S, HyperVector)>,
        S: Into<String>,
    {
        if !(-1.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidArgument(format!(
                "cleanup threshold {threshold} outside [-1, 1]"
            )));
        }
        let mut stored: Vec<(String, HyperVector)> = Vec::new();
        for (name, v) in entries {
            let name = name.into();
            if stored.iter().any(|(n, _)| *n == name) {
                return Err(Error::DuplicateName(name));
            }
            if let Some((_, first)) = stored.first() {
                check_dims("cleanup memory", first.dim(), v.dim())?;
            }
            stored.push((name, v.normalize()?));
        }
        Ok(Self {
            entries: stored,
            threshold,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&HyperVector> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Every entry by descending cosine; equal scores ordered by name.
    pub fn full_ranking(&self, query: &HyperVector) -> Result<Vec<Match>> {
        if self.entries.is_empty() {
            return Err(Error::EmptyMemory);
        }
        let mut out = self
            .entries
            .iter()
            .map(|(name, v)| {
                Ok(Match {
                    name: name.clone(),
                    score: cosine(query, v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.name.cmp(&b.name)));
        Ok(out)
    }

    /// Best match, or `None` when its score is below the threshold.
    pub fn cleanup(&self, query: &HyperVector) -> Result<Option<Match>> {
        let best = self.full_ranking(query)?.into_iter().next();
        Ok(best.filter(|m| m.score >= self.threshold))
    }
}

pub fn cleanup(query: &HyperVector, memory: &CleanupMemory) -> Result<Option<Match>> {
    memory.cleanup(query)
}

pub fn full_ranking(query: &HyperVector, memory: &CleanupMemory) -> Result<Vec<Match>> {
    memory.full_ranking(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypervector::random_unit;
    use crate::rng::SeededRng;
    use proptest::prelude::*;

    fn vocab(rng: &mut SeededRng, dim: usize, names: &[&str]) -> Vec<(String, HyperVector)> {
        names
            .iter()
            .map(|n| (n.to_string(), random_unit(dim, rng).unwrap()))
            .collect()
    }

    #[test]
    fn exact_query_hits_with_score_one() {
        let mut rng = SeededRng::new(1);
        let items = vocab(&mut rng, 64, &["a", "b", "c"]);
        let mem = CleanupMemory::new(items.clone(), 0.0).unwrap();
        let m = mem.cleanup(&items[1].1).unwrap().unwrap();
        assert_eq!(m.name, "b");
        assert!((m.score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_query_with_known_cosine() {
        // q = 0.9·x + √(1−0.81)·y with y ⟂ x, so cos(q, x) = 0.9 exactly.
        let mut rng = SeededRng::new(2);
        let items = vocab(&mut rng, 256, &["x", "p", "q", "r"]);
        let x = &items[0].1;
        let raw = random_unit(256, &mut rng).unwrap();
        let y = raw
            .add_scaled(-raw.dot(x).unwrap(), x)
            .unwrap()
            .normalize()
            .unwrap();
        let query = x.scale(0.9).add_scaled((1.0f64 - 0.81).sqrt(), &y).unwrap();
        assert!((cosine(&query, x).unwrap() - 0.9).abs() < 1e-12);
        let mem = CleanupMemory::new(items, 0.5).unwrap();
        assert_eq!(mem.cleanup(&query).unwrap().unwrap().name, "x");
    }

    #[test]
    fn orthogonal_query_below_threshold() {
        let items: Vec<_> = (0..3)
            .map(|i| (format!("e{i}"), HyperVector::basis(5, i).unwrap()))
            .collect();
        let mem = CleanupMemory::new(items, 0.99).unwrap();
        let q = HyperVector::basis(5, 4).unwrap();
        assert_eq!(mem.cleanup(&q).unwrap(), None);
    }

    #[test]
    fn ties_break_by_name() {
        let e = HyperVector::basis(2, 0).unwrap();
        let mem = CleanupMemory::new(vec![("zeta", e.clone()), ("alpha", e.clone())], 0.0).unwrap();
        assert_eq!(mem.cleanup(&e).unwrap().unwrap().name, "alpha");
    }

    #[test]
    fn errors() {
        let mem = CleanupMemory::new(Vec::<(String, HyperVector)>::new(), 0.0).unwrap();
        assert_eq!(
            mem.cleanup(&HyperVector::basis(3, 0).unwrap()).unwrap_err(),
            Error::EmptyMemory
        );
        let e = HyperVector::basis(2, 0).unwrap();
        assert_eq!(
            CleanupMemory::new(vec![("a", e.clone()), ("a", e.clone())], 0.0).unwrap_err(),
            Error::DuplicateName("a".into())
        );
        assert!(CleanupMemory::new(vec![("a", HyperVector::zeros(2).unwrap())], 0.0).is_err());
        assert!(CleanupMemory::new(vec![("a", e)], 1.5).is_err());
    }

    #[test]
    fn singleton_ranking() {
        let e = HyperVector::basis(2, 1).unwrap();
        let mem = CleanupMemory::new(vec![("only", e.clone())], -1.0).unwrap();
        let r = mem.full_ranking(&e).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].name, "only");
    }

    proptest! {
        #[test]
        fn ranking_is_sorted_and_agrees_with_cleanup(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = SeededRng::new(seed);
            let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
            let items: Vec<_> = names.iter().map(|s| (s.clone(), random_unit(16, &mut rng).unwrap())).collect();
            let mem = CleanupMemory::new(items, -1.0).unwrap();
            let q = random_unit(16, &mut rng).unwrap();
            let ranking = mem.full_ranking(&q).unwrap();
            prop_assert_eq!(ranking.len(), n);
            prop_assert!(ranking.windows(2).all(|w| w[0].score >= w[1].score));
            prop_assert_eq!(Some(ranking[0].clone()), mem.cleanup(&q).unwrap());
        }
    }
}
