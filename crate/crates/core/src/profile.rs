//! Strategy profiles and the space of all profiles.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};

/// One strategy per player. Strategies are 0-based internally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(Vec<usize>);

impl Profile {
    /// Builds a profile, checking every entry against `m`.
    pub fn new(strategies: Vec<usize>, m: usize) -> Result<Self> {
        if let Some((i, &k)) = strategies.iter().enumerate().find(|(_, &k)| k >= m) {
            return arg(format!(
                "player {i} has strategy {k}, but only {m} strategies exist"
            ));
        }
        Ok(Profile(strategies))
    }

    pub(crate) fn from_vec_unchecked(strategies: Vec<usize>) -> Self {
        Profile(strategies)
    }

    /// Everyone on strategy `k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Profile(vec![k; n])
    }

    /// Parses a comma list of 1-based strategies, e.g. `"1,2,3"`.
    pub fn parse_one_based(text: &str, n: usize, m: usize) -> Result<Self> {
        let parsed: Vec<usize> = text
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| Error::Invalid {
                    field: "profile".into(),
                    message: format!("`{t}` is not a strategy number"),
                })
            })
            .collect::<Result<_>>()?;
        if parsed.len() != n {
            return arg(format!(
                "profile has {} entries, game has {n} players",
                parsed.len()
            ));
        }
        if parsed.iter().any(|&k| k == 0 || k > m) {
            return arg(format!("profile entries must lie in 1..={m}"));
        }
        Ok(Profile(parsed.into_iter().map(|k| k - 1).collect()))
    }

    /// Comma list of 1-based strategies.
    pub fn to_one_based(&self) -> String {
        self.0
            .iter()
            .map(|k| (k + 1).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn strategies(&self) -> &[usize] {
        &self.0
    }

    pub fn set(&mut self, player: usize, strategy: usize) {
        self.0[player] = strategy;
    }

    /// Copy with `player` moved to `strategy`.
    pub fn with(&self, player: usize, strategy: usize) -> Self {
        let mut p = self.clone();
        p.0[player] = strategy;
        p
    }

    /// Players on strategy `k` (the coalition X_k).
    pub fn coalition(&self, k: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == k)
            .map(|(i, _)| i)
            .collect()
    }

    /// Players whose strategy differs from `other`.
    pub fn movers_from(&self, other: &Profile) -> Vec<usize> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Index<usize> for Profile {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_one_based())
    }
}

/// Default cap on exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// All `m^n` profiles in lexicographic order (player 0 most significant).
#[derive(Debug, Clone, Copy)]
pub struct ProfileSpace {
    n: usize,
    m: usize,
    size: u64,
}

impl ProfileSpace {
    /// Fails with [`Error::TooLarge`] if `m^n > limit`.
    pub fn new(n: usize, m: usize, limit: u64) -> Result<Self> {
        let size = (m as u64).checked_pow(n as u32);
        match size {
            Some(size) if size <= limit => Ok(ProfileSpace { n, m, size }),
            _ => Err(Error::TooLarge {
                profiles: format!("{m}^{n}"),
                limit,
            }),
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn strategies(&self) -> usize {
        self.m
    }

    pub fn decode(&self, mut index: u64) -> Profile {
        let mut s = vec![0usize; self.n];
        for slot in s.iter_mut().rev() {
            *slot = (index % self.m as u64) as usize;
            index /= self.m as u64;
        }
        Profile(s)
    }

    pub fn encode(&self, profile: &Profile) -> u64 {
        profile
            .0
            .iter()
            .fold(0u64, |acc, &k| acc * self.m as u64 + k as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.size).map(move |i| self.decode(i))
    }
}
