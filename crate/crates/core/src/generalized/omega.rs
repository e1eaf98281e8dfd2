//! Binary-weight games with partial credit `ω` and forbidden co-locations.
//!
//! Player `i` earns `a_i·b_j` from a co-located `j` labelled `One` and
//! `ω·a_i·b_j` from one labelled `Zero`; `Conflict` pairs may not share a
//! strategy.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{verify_approx_strong, StrongDeviationReport};
use crate::error::{invalid, Error, Result};
use crate::game::Game;
use crate::io::field_rational;
use crate::numeric::{format_rational, Num};
use crate::par::{best_in_space, Exec};
use crate::profile::{Profile, ProfileSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Zero,
    One,
    Conflict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaGame {
    m: usize,
    a: Vec<Num>,
    b: Vec<Num>,
    labels: Vec<Vec<Label>>,
    omega: Num,
    /// `coef[i][j]`: what `i` earns from `j` on the same strategy.
    coef: Vec<Vec<Num>>,
}

impl OmegaGame {
    /// `labels` is a symmetric n×n matrix; its diagonal is ignored.
    pub fn new(
        m: usize,
        a: Vec<Num>,
        b: Vec<Num>,
        labels: Vec<Vec<Label>>,
        omega: Num,
    ) -> Result<Self> {
        let n = a.len();
        if m == 0 {
            return invalid("m", "at least one strategy is required");
        }
        if b.len() != n {
            return invalid("b", format!("expected {n} entries, found {}", b.len()));
        }
        if let Some(i) = a.iter().position(|x| x <= &Num::zero()) {
            return invalid(format!("a[{i}]"), "must be positive");
        }
        if let Some(i) = b.iter().position(|x| x <= &Num::zero()) {
            return invalid(format!("b[{i}]"), "must be positive");
        }
        let half = Num::new(1.into(), 2.into());
        if omega < half || omega > Num::one() {
            return invalid("omega", "must lie in [1/2, 1]");
        }
        if labels.len() != n || labels.iter().any(|row| row.len() != n) {
            return invalid("labels", format!("expected a {n}x{n} matrix"));
        }
        if let Some((i, j)) = (0..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| labels[i][j] != labels[j][i])
        {
            return invalid(format!("labels[{i}][{j}]"), "matrix must be symmetric");
        }
        let coef = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match labels[i][j] {
                        _ if i == j => Num::zero(),
                        Label::One => &a[i] * &b[j],
                        Label::Zero => &omega * &a[i] * &b[j],
                        Label::Conflict => Num::zero(),
                    })
                    .collect()
            })
            .collect();
        Ok(OmegaGame {
            m,
            a,
            b,
            labels,
            omega,
            coef,
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn omega(&self) -> &Num {
        &self.omega
    }

    pub fn labels(&self) -> &[Vec<Label>] {
        &self.labels
    }

    /// `π_k = Σ_{s_i = k} b_i`.
    pub fn pi(&self, profile: &Profile) -> Vec<Num> {
        let mut pi = vec![Num::zero(); self.m];
        for (i, &k) in profile.strategies().iter().enumerate() {
            pi[k] += &self.b[i];
        }
        pi
    }
}

impl Game for OmegaGame {
    fn players(&self) -> usize {
        self.n()
    }

    fn strategies(&self) -> usize {
        self.m
    }

    fn utility_if(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        (0..self.n())
            .filter(|&j| j != player && profile[j] == strategy)
            .fold(Num::zero(), |acc, j| acc + &self.coef[player][j])
    }

    fn is_feasible(&self, profile: &Profile) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (i + 1..n).all(|j| profile[i] != profile[j] || self.labels[i][j] != Label::Conflict)
        })
    }
}

/// Sorts both vectors non-increasingly and compares them entry by entry.
pub fn lex_compare(p1: &[Num], p2: &[Num]) -> Ordering {
    let sorted = |p: &[Num]| {
        let mut v = p.to_vec();
        v.sort_unstable_by(|x, y| y.cmp(x));
        v
    };
    sorted(p1).cmp(&sorted(p2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexResult {
    pub profile: Profile,
    pub pi: Vec<Num>,
}

/// Feasible state with lexicographically largest sorted `π`; among equals
/// the lexicographically smallest profile.
pub fn lex_strong_eq(game: &OmegaGame, limit: u64, exec: Exec) -> Result<LexResult> {
    let space = ProfileSpace::new(game.n(), game.m(), limit)?;
    let best = best_in_space(
        &space,
        exec,
        |p| game.is_feasible(&p).then(|| (game.pi(&p), p)),
        |x, y| match lex_compare(&x.0, &y.0) {
            Ordering::Greater => x,
            Ordering::Less => y,
            Ordering::Equal => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        },
    );
    match best {
        Some((pi, profile)) => Ok(LexResult { profile, pi }),
        None => Err(Error::Model(
            "every state co-locates a conflicting pair".into(),
        )),
    }
}

/// Group deviations restricted to feasible states, at factor `1/ω`.
pub fn verify_omega_strong(
    game: &OmegaGame,
    profile: &Profile,
    limit: u64,
    exec: Exec,
) -> Result<StrongDeviationReport> {
    verify_approx_strong(game, profile, &(Num::one() / &game.omega), limit, exec)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OmegaFile {
    m: usize,
    a: Vec<String>,
    b: Vec<String>,
    labels: Vec<Vec<Label>>,
    omega: String,
}

/// `{"m", "a": [..], "b": [..], "labels": [["zero"|"one"|"conflict"]], "omega"}`.
pub fn parse_omega(text: &str) -> Result<OmegaGame> {
    let file: OmegaFile = serde_json::from_str(text)?;
    let vector = |name: &str, xs: &[String]| {
        xs.iter()
            .enumerate()
            .map(|(i, t)| field_rational(format!("{name}[{i}]"), t))
            .collect::<Result<Vec<_>>>()
    };
    OmegaGame::new(
        file.m,
        vector("a", &file.a)?,
        vector("b", &file.b)?,
        file.labels,
        field_rational("omega", &file.omega)?,
    )
}

pub fn serialize_omega(game: &OmegaGame) -> String {
    let file = OmegaFile {
        m: game.m,
        a: game.a.iter().map(format_rational).collect(),
        b: game.b.iter().map(format_rational).collect(),
        labels: game.labels.clone(),
        omega: format_rational(&game.omega),
    };
    let mut out = serde_json::to_string(&file).expect("omega game serializes");
    out.push('\n');
    out
}
