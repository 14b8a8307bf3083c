//! Plain 7-dimensional arithmetic for the pet-fish rankings. Deliberately
//! shares nothing with the vector, tensor or lexicon code: the weights are
//! typed in again here and everything is fixed-size arrays.

use std::collections::BTreeMap;

use super::{Aggregates, PetfishConfig, RankedNoun, RankingRecord, RankingReport, TENSOR_KEY};

const NAMES: [&str; 6] = ["Fish", "Goldfish", "Cat", "Dog", "Shark", "Lion"];

/// `W[animal][feature]`.
const W: [[f64; 7]; 6] = [
    [0.13, 0.51, 0.00, 0.63, 0.51, 0.19, 0.19],
    [0.44, 0.00, 0.00, 0.62, 0.00, 0.62, 0.19],
    [0.57, 0.13, 0.57, 0.00, 0.00, 0.57, 0.00],
    [0.67, 0.37, 0.37, 0.00, 0.00, 0.52, 0.00],
    [0.00, 0.57, 0.00, 0.57, 0.57, 0.00, 0.11],
    [0.19, 0.62, 0.44, 0.00, 0.00, 0.00, 0.62],
];

/// `P[out][in]`.
const P: [[f64; 7]; 7] = [
    [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
    [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
];

/// Printed noun weights, one row per animal.
pub fn raw_noun_weights() -> [[f64; 7]; 6] {
    W
}

pub fn raw_pet_weights() -> [[f64; 7]; 7] {
    P
}

fn unit_nouns() -> [[f64; 7]; 6] {
    let mut out = W;
    for row in out.iter_mut() {
        let mut ss = 0.0;
        for x in row.iter() {
            ss += x * x;
        }
        let norm = ss.sqrt();
        for x in row.iter_mut() {
            *x /= norm;
        }
    }
    out
}

fn apply(m: &[[f64; 7]; 7], x: &[f64; 7]) -> [f64; 7] {
    let mut y = [0.0; 7];
    for i in 0..7 {
        for j in 0..7 {
            y[i] += m[i][j] * x[j];
        }
    }
    y
}

fn cos7(a: &[f64; 7], b: &[f64; 7]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for i in 0..7 {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    ab / (aa.sqrt() * bb.sqrt())
}

/// `pet · n` for each unit noun, in animal order.
pub fn oracle_queries() -> [[f64; 7]; 6] {
    let n = unit_nouns();
    std::array::from_fn(|a| apply(&P, &n[a]))
}

/// `(P + Pᵀ) · n`: the large-dimension limit of the holographic query, since
/// circular convolution cannot tell the adjective's rows from its columns.
pub fn symmetrized_queries() -> [[f64; 7]; 6] {
    let mut s = P;
    for i in 0..7 {
        for j in 0..7 {
            s[i][j] = P[i][j] + P[j][i];
        }
    }
    let n = unit_nouns();
    std::array::from_fn(|a| apply(&s, &n[a]))
}

fn report(queries: [[f64; 7]; 6]) -> RankingReport {
    let n = unit_nouns();
    let mut results = Vec::new();
    for (a, q) in queries.iter().enumerate() {
        let mut ranking: Vec<RankedNoun> = (0..6)
            .map(|b| RankedNoun {
                noun: NAMES[b].to_string(),
                score: cos7(q, &n[b]),
            })
            .collect();
        ranking.sort_by(|x, y| y.score.total_cmp(&x.score).then_with(|| x.noun.cmp(&y.noun)));
        results.push(RankingRecord {
            backend: "tensor".into(),
            dim: 7,
            trial: 0,
            animal: NAMES[a].to_string(),
            ranking,
        });
    }
    let mut winner_frequency = BTreeMap::new();
    let mut mean_scores = BTreeMap::new();
    let (mut wf, mut ms) = (BTreeMap::new(), BTreeMap::new());
    for r in &results {
        wf.insert(
            r.animal.clone(),
            BTreeMap::from([(r.ranking[0].noun.clone(), 1.0)]),
        );
        ms.insert(
            r.animal.clone(),
            r.ranking.iter().map(|m| (m.noun.clone(), m.score)).collect(),
        );
    }
    winner_frequency.insert(TENSOR_KEY.to_string(), wf);
    mean_scores.insert(TENSOR_KEY.to_string(), ms);
    RankingReport {
        config: PetfishConfig::tensor_only(),
        results,
        aggregates: Aggregates {
            winner_frequency,
            mean_scores,
            rank_correlation: BTreeMap::new(),
            wishes: Vec::new(),
        },
    }
}

/// Ground-truth Tensor rankings.
pub fn exact_oracle_rankings() -> RankingReport {
    report(oracle_queries())
}

/// Rankings the holographic backend tends to as dimension grows.
pub fn symmetrized_oracle_rankings() -> RankingReport {
    report(symmetrized_queries())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fish_query_by_hand() {
        let q = apply(&P, &W[0]);
        let want = [2.16, 0.51, 0.0, 0.63, 0.0, 0.89, 0.0];
        for i in 0..7 {
            assert!((q[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn pet_cat_prefers_cat_over_fish() {
        let r = exact_oracle_rankings();
        let cat = r.results.iter().find(|x| x.animal == "Cat").unwrap();
        let pos = |n: &str| cat.ranking.iter().position(|m| m.noun == n).unwrap();
        assert!(pos("Cat") < pos("Fish"));
    }

    #[test]
    fn rankings_are_permutations() {
        for r in [exact_oracle_rankings(), symmetrized_oracle_rankings()] {
            r.validate().unwrap();
        }
    }

    #[test]
    fn exact_pet_fish_winner_is_dog() {
        // cared-for dominates the query and Dog carries the most of it
        let r = exact_oracle_rankings();
        assert_eq!(r.results[0].animal, "Fish");
        assert_eq!(r.results[0].ranking[0].noun, "Dog");
        assert_eq!(r.results[0].ranking[1].noun, "Goldfish");
    }
}
