//! Social coordination games with pairwise relationships.
//!
//! Player `i` on strategy `k` earns its intrinsic preference `w_i^k` plus
//! `share_ij · w(i,j)` for every related player `j` on the same strategy.
//! Welfare counts each co-located relationship once at full weight.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{arg, invalid, Result};
use crate::game::Game;
use crate::numeric::{serde_extended, serde_num, serde_num_vec, Extended, Num};
use crate::profile::Profile;

/// A weighted relationship between players `i` and `j`. Player `i` receives
/// `share_ij · weight`, player `j` receives the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: Num,
    pub share_ij: Num,
}

impl Edge {
    pub fn new(i: usize, j: usize, weight: Num, share_ij: Num) -> Self {
        Edge {
            i,
            j,
            weight,
            share_ij,
        }
    }

    /// Equal split.
    pub fn symmetric(i: usize, j: usize, weight: Num) -> Self {
        Edge::new(i, j, weight, Num::new(1.into(), 2.into()))
    }

    pub fn share_ji(&self) -> Num {
        Num::one() - &self.share_ij
    }

    /// Share of `player`, which must be an endpoint.
    pub fn share_of(&self, player: usize) -> Num {
        if player == self.i {
            self.share_ij.clone()
        } else {
            debug_assert_eq!(player, self.j);
            self.share_ji()
        }
    }

    pub fn other(&self, player: usize) -> usize {
        if player == self.i {
            self.j
        } else {
            self.i
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    m: usize,
    intrinsic: Vec<Vec<Num>>,
    edges: Vec<Edge>,
    /// Per player: (neighbour, own gain `share · w`), positive-weight edges only.
    gains: Vec<Vec<(usize, Num)>>,
}

impl GameInstance {
    /// Validates and builds an instance with `intrinsic.len()` players.
    pub fn new(m: usize, intrinsic: Vec<Vec<Num>>, edges: Vec<Edge>) -> Result<Self> {
        if m == 0 {
            return invalid("m", "at least one strategy is required");
        }
        let n = intrinsic.len();
        for (i, row) in intrinsic.iter().enumerate() {
            if row.len() != m {
                return invalid(
                    format!("intrinsic[{i}]"),
                    format!("expected {m} entries, found {}", row.len()),
                );
            }
            if let Some(k) = row.iter().position(|w| w < &Num::zero()) {
                return invalid(
                    format!("intrinsic[{i}][{k}]"),
                    "negative intrinsic preference",
                );
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (e, edge) in edges.iter().enumerate() {
            let field = |name: &str| format!("edges[{e}].{name}");
            if edge.i >= n || edge.j >= n {
                return invalid(field("i"), format!("player index out of range 0..{n}"));
            }
            if edge.i == edge.j {
                return invalid(field("j"), "self-loop");
            }
            if edge.weight < Num::zero() {
                return invalid(field("w"), "negative weight");
            }
            if edge.share_ij < Num::zero() || edge.share_ij > Num::one() {
                return invalid(field("share_ij"), "share out of range [0,1]");
            }
            if !seen.insert((edge.i.min(edge.j), edge.i.max(edge.j))) {
                return invalid(
                    field("j"),
                    format!("duplicate edge between {} and {}", edge.i, edge.j),
                );
            }
        }
        let mut gains = vec![Vec::new(); n];
        for edge in edges.iter().filter(|e| e.weight > Num::zero()) {
            gains[edge.i].push((edge.j, &edge.share_ij * &edge.weight));
            gains[edge.j].push((edge.i, edge.share_ji() * &edge.weight));
        }
        Ok(GameInstance {
            m,
            intrinsic,
            edges,
            gains,
        })
    }

    pub fn n(&self) -> usize {
        self.intrinsic.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn intrinsic(&self) -> &[Vec<Num>] {
        &self.intrinsic
    }

    pub fn intrinsic_of(&self, player: usize, strategy: usize) -> &Num {
        &self.intrinsic[player][strategy]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbour, gain)` pairs of `player` over positive-weight edges.
    pub fn gains(&self, player: usize) -> &[(usize, Num)] {
        &self.gains[player]
    }

    pub fn positive_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.weight > Num::zero())
    }

    /// All positive-weight relationships split equally.
    pub fn is_symmetric(&self) -> bool {
        let half = Num::new(1.into(), 2.into());
        self.positive_edges().all(|e| e.share_ij == half)
    }

    /// A(s): total intrinsic utility.
    pub fn intrinsic_welfare(&self, profile: &Profile) -> Num {
        (0..self.n()).fold(Num::zero(), |acc, i| acc + &self.intrinsic[i][profile[i]])
    }

    /// P(s): total weight of co-located relationships.
    pub fn coordination_welfare(&self, profile: &Profile) -> Num {
        self.edges
            .iter()
            .filter(|e| profile[e.i] == profile[e.j])
            .fold(Num::zero(), |acc, e| acc + &e.weight)
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.len() != self.n() {
            return arg(format!(
                "profile has {} entries, game has {} players",
                profile.len(),
                self.n()
            ));
        }
        if profile.strategies().iter().any(|&k| k >= self.m) {
            return arg(format!("profile uses a strategy outside 0..{}", self.m));
        }
        Ok(())
    }
}

impl Game for GameInstance {
    fn players(&self) -> usize {
        self.n()
    }

    fn strategies(&self) -> usize {
        self.m
    }

    fn utility_if(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        self.gains[player]
            .iter()
            .filter(|(j, _)| profile[*j] == strategy)
            .fold(self.intrinsic[player][strategy].clone(), |acc, (_, g)| {
                acc + g
            })
    }
}

/// Utility of one player split into its two sources.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerUtility {
    #[serde(with = "serde_num")]
    pub intrinsic: Num,
    #[serde(with = "serde_num")]
    pub coordination: Num,
    #[serde(with = "serde_num")]
    pub total: Num,
}

/// u_i(s) with its intrinsic and coordination parts.
pub fn player_utility(
    game: &GameInstance,
    profile: &Profile,
    player: usize,
) -> Result<PlayerUtility> {
    game.check_profile(profile)?;
    if player >= game.n() {
        return arg(format!("player {player} out of range 0..{}", game.n()));
    }
    let intrinsic = game.intrinsic_of(player, profile[player]).clone();
    let coordination = game
        .gains(player)
        .iter()
        .filter(|(j, _)| profile[*j] == profile[player])
        .fold(Num::zero(), |acc, (_, g)| acc + g);
    let total = &intrinsic + &coordination;
    Ok(PlayerUtility {
        intrinsic,
        coordination,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UtilityBreakdown {
    pub players: Vec<PlayerUtility>,
    /// A(s)
    #[serde(with = "serde_num")]
    pub intrinsic: Num,
    /// P(s)
    #[serde(with = "serde_num")]
    pub coordination: Num,
    /// u(s) = A(s) + P(s)
    #[serde(with = "serde_num")]
    pub total: Num,
}

pub fn welfare(game: &GameInstance, profile: &Profile) -> Result<UtilityBreakdown> {
    game.check_profile(profile)?;
    let players = (0..game.n())
        .map(|i| player_utility(game, profile, i))
        .collect::<Result<Vec<_>>>()?;
    let intrinsic = game.intrinsic_welfare(profile);
    let coordination = game.coordination_welfare(profile);
    let total = &intrinsic + &coordination;
    Ok(UtilityBreakdown {
        players,
        intrinsic,
        coordination,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceStats {
    /// best(i) = max_k w_i^k
    #[serde(with = "serde_num_vec")]
    pub best: Vec<Num>,
    /// A_T = Σ best(i)
    #[serde(with = "serde_num")]
    pub a_total: Num,
    /// P_T = Σ w(i,j)
    #[serde(with = "serde_num")]
    pub p_total: Num,
    /// Strategy with the largest total intrinsic preference (lowest index on ties).
    pub k_star: usize,
    /// Maximum relationship imbalance over positive-weight edges.
    #[serde(with = "serde_extended")]
    pub mri: Extended,
}

pub fn instance_stats(game: &GameInstance) -> InstanceStats {
    let best: Vec<Num> = game
        .intrinsic()
        .iter()
        .map(|row| row.iter().max().cloned().unwrap_or_else(Num::zero))
        .collect();
    let a_total = best.iter().fold(Num::zero(), |acc, b| acc + b);
    let p_total = game
        .edges()
        .iter()
        .fold(Num::zero(), |acc, e| acc + &e.weight);

    let column_sum = |k: usize| {
        game.intrinsic()
            .iter()
            .fold(Num::zero(), |acc, row| acc + &row[k])
    };
    let mut k_star = 0;
    let mut k_star_sum = column_sum(0);
    for k in 1..game.m() {
        let sum = column_sum(k);
        if sum > k_star_sum {
            k_star = k;
            k_star_sum = sum;
        }
    }

    let mut mri = Extended::one();
    for edge in game.positive_edges() {
        let (a, b) = (edge.share_ij.clone(), edge.share_ji());
        let ratio = if a.is_zero() || b.is_zero() {
            Extended::Infinite
        } else {
            Extended::Finite(if a >= b { a / b } else { b / a })
        };
        mri = mri.max(ratio);
    }

    InstanceStats {
        best,
        a_total,
        p_total,
        k_star,
        mri,
    }
}
