//! Fixed hypomorphic test pairs built from relabelled cycles.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph6::Graph6Record;
use crate::hypomorphism::{find_hypomorphism, Hypomorphism};
use crate::matrix::{perm_similarity, Permutation, SymmetricMatrix};

/// Which symmetry of the cycle is applied in label space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relabel {
    /// `k ↦ k + 1 (mod n)`
    Rotation,
    /// `k ↦ -k (mod n)`
    Reflection,
}

impl Relabel {
    pub fn permutation(self, n: usize) -> Permutation {
        match self {
            Relabel::Rotation => Permutation::rotation(n, 1),
            Relabel::Reflection => Permutation::reflection(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relabel::Rotation => "rotation",
            Relabel::Reflection => "reflection",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusPair {
    pub name: String,
    pub a: SymmetricMatrix,
    pub b: SymmetricMatrix,
    pub sigma: Hypomorphism,
    pub tau: Permutation,
}

/// `C_n` drawn with a shuffled vertex labelling, fixed per `n`.
///
/// With the natural labelling every rotation and reflection is an
/// automorphism and `B = A`; scrambling the labels first makes the pair
/// nontrivial.
pub fn scrambled_cycle(n: usize) -> Result<SymmetricMatrix> {
    let base = Graph6Record::cycle(n).adjacency_matrix()?;
    for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC7C1E ^ ((n as u64) << 8) ^ attempt);
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(&mut rng);
        let a = perm_similarity(&base, &Permutation::new(image)?)?;
        let moved = [Relabel::Rotation, Relabel::Reflection]
            .iter()
            .all(|r| perm_similarity(&a, &r.permutation(n)).is_ok_and(|b| b != a));
        if moved {
            return Ok(a);
        }
    }
    Err(Error::InvalidInput(format!("no scrambled labelling found for C_{n}")))
}

pub fn relabeled_cycle(n: usize, relabel: Relabel) -> Result<CorpusPair> {
    let a = scrambled_cycle(n)?;
    let tau = relabel.permutation(n);
    let b = perm_similarity(&a, &tau)?;
    let sigma = find_hypomorphism(&a, &b)?.ok_or_else(|| Error::NotHypomorphic {
        index: None,
        residual: f64::INFINITY,
    })?;
    Ok(CorpusPair {
        name: format!("C{n}/{}", relabel.name()),
        a,
        b,
        sigma,
        tau,
    })
}

/// `C_n` for `n = 5..=8` under rotation and reflection: eight pairs.
pub fn cycle_corpus() -> Result<Vec<CorpusPair>> {
    let mut out = Vec::new();
    for n in 5..=8 {
        for r in [Relabel::Rotation, Relabel::Reflection] {
            out.push(relabeled_cycle(n, r)?);
        }
    }
    Ok(out)
}
