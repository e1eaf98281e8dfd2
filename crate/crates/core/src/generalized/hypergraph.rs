//! Hyperedge coordination games.
//!
//! A hyperedge pays its weight out when all its players share one strategy
//! (and that strategy is the edge's anchor, if it has one). Anchors take no
//! share, which is how intrinsic preferences are written: `{i}` anchored at
//! `k` with weight `w_i^k`.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, invalid, Result};
use crate::game::Game;
use crate::io::field_rational;
use crate::model::GameInstance;
use crate::numeric::{format_rational, Num};
use crate::potentials::{normalize, tree_cycle, CcFailure, Potential, PotentialCertificate};
use crate::profile::Profile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    /// Distinct players, at least one.
    pub players: Vec<usize>,
    /// Strategy this edge is pinned to.
    pub anchor: Option<usize>,
    pub weight: Num,
    /// `γ^e_i`, aligned with `players`; sums to 1.
    pub shares: Vec<Num>,
}

impl Hyperedge {
    fn pays(&self, profile: &Profile, player: usize, strategy: usize) -> bool {
        self.anchor.is_none_or(|a| a == strategy)
            && self
                .players
                .iter()
                .all(|&j| j == player || profile[j] == strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphGame {
    n: usize,
    m: usize,
    edges: Vec<Hyperedge>,
    /// Per player: (edge index, own gain).
    incidence: Vec<Vec<(usize, Num)>>,
}

impl HypergraphGame {
    pub fn new(n: usize, m: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        if m == 0 {
            return invalid("m", "at least one strategy is required");
        }
        let mut incidence = vec![Vec::new(); n];
        for (e, edge) in edges.iter().enumerate() {
            let field = |name: &str| format!("edges[{e}].{name}");
            if edge.players.is_empty() {
                return invalid(field("players"), "hyperedge needs a player");
            }
            if edge.players.iter().any(|&j| j >= n) {
                return invalid(
                    field("players"),
                    format!("player index out of range 0..{n}"),
                );
            }
            let mut sorted = edge.players.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != edge.players.len() {
                return invalid(field("players"), "repeated member");
            }
            if edge.anchor.is_some_and(|a| a >= m) {
                return invalid(field("anchor"), format!("strategy out of range 0..{m}"));
            }
            if edge.weight.is_negative() {
                return invalid(field("w"), "negative weight");
            }
            if edge.shares.len() != edge.players.len() {
                return invalid(field("shares"), "one share per player is required");
            }
            if edge.shares.iter().any(|s| s.is_negative()) {
                return invalid(field("shares"), "negative share");
            }
            if edge.shares.iter().fold(Num::zero(), |a, s| a + s) != Num::one() {
                return invalid(field("shares"), "shares must sum to 1");
            }
            for (&i, s) in edge.players.iter().zip(&edge.shares) {
                incidence[i].push((e, s * &edge.weight));
            }
        }
        Ok(HypergraphGame {
            n,
            m,
            edges,
            incidence,
        })
    }

    /// Pairwise edges become two-player hyperedges; intrinsic preferences
    /// become anchored singletons.
    pub fn from_instance(game: &GameInstance) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..game.n() {
            for k in 0..game.m() {
                edges.push(Hyperedge {
                    players: vec![i],
                    anchor: Some(k),
                    weight: game.intrinsic_of(i, k).clone(),
                    shares: vec![Num::one()],
                });
            }
        }
        for e in game.edges() {
            edges.push(Hyperedge {
                players: vec![e.i, e.j],
                anchor: None,
                weight: e.weight.clone(),
                shares: vec![e.share_ij.clone(), e.share_ji()],
            });
        }
        HypergraphGame::new(game.n(), game.m(), edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }
}

impl Game for HypergraphGame {
    fn players(&self) -> usize {
        self.n
    }

    fn strategies(&self) -> usize {
        self.m
    }

    fn utility_if(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        self.incidence[player]
            .iter()
            .filter(|(e, _)| self.edges[*e].pays(profile, player, strategy))
            .fold(Num::zero(), |acc, (_, g)| acc + g)
    }
}

/// Solves `γ^e_i = γ_i / Σ_{j∈e} γ_j` over positive-weight hyperedges.
/// Players on no positive multi-player edge get γ = 1.
pub fn hypergraph_cc_recover(
    game: &HypergraphGame,
) -> std::result::Result<PotentialCertificate, CcFailure> {
    let n = game.n;
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, edge) in game.edges.iter().enumerate() {
        if edge.weight.is_zero() || edge.players.len() < 2 {
            continue;
        }
        if edge.shares.iter().any(|s| s.is_zero()) {
            return Err(CcFailure {
                edge: e,
                cycle: Vec::new(),
                reason: "zero share cannot be realized by positive influences".into(),
            });
        }
        let hub = edge.players[0];
        for &j in &edge.players[1..] {
            adjacency[hub].push((e, j));
            adjacency[j].push((e, hub));
        }
    }

    let share = |e: usize, i: usize| {
        let edge = &game.edges[e];
        let pos = edge.players.iter().position(|&j| j == i).expect("member");
        &edge.shares[pos]
    };
    let mut gamma: Vec<Option<Num>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut component = vec![0; n];
    for root in 0..n {
        if gamma[root].is_some() {
            continue;
        }
        gamma[root] = Some(Num::one());
        component[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(e, v) in &adjacency[u] {
                if gamma[v].is_some() {
                    continue;
                }
                let gu = gamma[u].clone().expect("visited");
                gamma[v] = Some(gu * share(e, v) / share(e, u));
                parent[v] = Some(u);
                component[v] = root;
                queue.push_back(v);
            }
        }
    }
    let mut gamma: Vec<Num> = gamma.into_iter().map(|g| g.expect("all visited")).collect();

    for (e, edge) in game.edges.iter().enumerate() {
        if edge.weight.is_zero() || edge.players.len() < 2 {
            continue;
        }
        let total = edge.players.iter().fold(Num::zero(), |a, &j| a + &gamma[j]);
        for (idx, &i) in edge.players.iter().enumerate() {
            let expected = &gamma[i] / &total;
            if expected != edge.shares[idx] {
                let j = if idx == 0 {
                    edge.players[1]
                } else {
                    edge.players[0]
                };
                return Err(CcFailure {
                    edge: e,
                    cycle: tree_cycle(&parent, i, j),
                    reason: format!(
                        "share of player {i} is {} but the spanning tree implies {}",
                        edge.shares[idx], expected
                    ),
                });
            }
        }
    }
    normalize(&mut gamma, &component);
    Ok(PotentialCertificate { gamma, component })
}

/// `Φ(s) = Σ_{paying e} w_e / Σ_{j∈e} γ_j`, anchors contributing γ = 0.
pub struct HypergraphPotential<'a> {
    game: &'a HypergraphGame,
    /// `w_e / Σ γ_j` per edge.
    terms: Vec<Num>,
}

impl<'a> HypergraphPotential<'a> {
    pub fn new(game: &'a HypergraphGame, cert: &PotentialCertificate) -> Result<Self> {
        if cert.gamma.len() != game.n {
            return arg(format!(
                "certificate has {} entries for {} players",
                cert.gamma.len(),
                game.n
            ));
        }
        if let Some(i) = cert.gamma.iter().position(|g| !g.is_positive()) {
            return arg(format!("certificate entry for player {i} is not positive"));
        }
        let terms = game
            .edges
            .iter()
            .map(|e| {
                let total = e
                    .players
                    .iter()
                    .fold(Num::zero(), |a, &j| a + &cert.gamma[j]);
                &e.weight / total
            })
            .collect();
        Ok(HypergraphPotential { game, terms })
    }
}

impl Potential for HypergraphPotential<'_> {
    fn value(&self, profile: &Profile) -> Num {
        self.game
            .edges
            .iter()
            .zip(&self.terms)
            .filter(|(e, _)| e.pays(profile, e.players[0], profile[e.players[0]]))
            .fold(Num::zero(), |acc, (_, t)| acc + t)
    }

    fn delta(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        if strategy == profile[player] {
            return Num::zero();
        }
        let current = profile[player];
        self.game.incidence[player]
            .iter()
            .fold(Num::zero(), |acc, &(e, _)| {
                let edge = &self.game.edges[e];
                let gained = edge.pays(profile, player, strategy);
                let lost = edge.pays(profile, player, current);
                match (gained, lost) {
                    (true, false) => acc + &self.terms[e],
                    (false, true) => acc - &self.terms[e],
                    _ => acc,
                }
            })
    }
}

pub fn hypergraph_potential(
    game: &HypergraphGame,
    profile: &Profile,
    cert: &PotentialCertificate,
) -> Result<Num> {
    if profile.len() != game.n || profile.strategies().iter().any(|&k| k >= game.m) {
        return arg("profile does not fit the game");
    }
    Ok(HypergraphPotential::new(game, cert)?.value(profile))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypergraphFile {
    n: usize,
    m: usize,
    edges: Vec<HyperedgeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperedgeFile {
    players: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<usize>,
    w: String,
    shares: Vec<String>,
}

/// `{"n", "m", "edges": [{"players", "anchor"?, "w", "shares"}]}`, 0-based.
pub fn parse_hypergraph(text: &str) -> Result<HypergraphGame> {
    let file: HypergraphFile = serde_json::from_str(text)?;
    let edges = file
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            Ok(Hyperedge {
                players: edge.players.clone(),
                anchor: edge.anchor,
                weight: field_rational(format!("edges[{e}].w"), &edge.w)?,
                shares: edge
                    .shares
                    .iter()
                    .enumerate()
                    .map(|(s, t)| field_rational(format!("edges[{e}].shares[{s}]"), t))
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    HypergraphGame::new(file.n, file.m, edges)
}

pub fn serialize_hypergraph(game: &HypergraphGame) -> String {
    let file = HypergraphFile {
        n: game.n,
        m: game.m,
        edges: game
            .edges
            .iter()
            .map(|e| HyperedgeFile {
                players: e.players.clone(),
                anchor: e.anchor,
                w: format_rational(&e.weight),
                shares: e.shares.iter().map(format_rational).collect(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("hypergraph serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;
    use crate::numeric::{int, rat};
    use crate::par::Exec;
    use crate::potentials::{cc_recover, exhaustive_audit};
    use crate::profile::ProfileSpace;

    fn pairwise() -> GameInstance {
        GameInstance::new(
            2,
            vec![
                vec![int(1), int(0)],
                vec![int(0), int(2)],
                vec![int(1), int(1)],
            ],
            vec![
                Edge::new(0, 1, int(3), rat(1, 3)),
                Edge::new(0, 2, int(2), rat(1, 4)),
                Edge::new(1, 2, int(5), rat(2, 5)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn reduces_to_pairwise() {
        let inst = pairwise();
        let h = HypergraphGame::from_instance(&inst).unwrap();
        for p in ProfileSpace::new(3, 2, 100).unwrap().iter() {
            for i in 0..3 {
                assert_eq!(h.utility(&p, i), inst.utility(&p, i));
            }
        }
        assert_eq!(
            hypergraph_cc_recover(&h).unwrap(),
            cc_recover(&inst).unwrap()
        );
    }

    #[test]
    fn three_member_edge() {
        let h = HypergraphGame::new(
            3,
            2,
            vec![Hyperedge {
                players: vec![0, 1, 2],
                anchor: None,
                weight: int(6),
                shares: vec![rat(1, 6), rat(2, 6), rat(3, 6)],
            }],
        )
        .unwrap();
        let cert = hypergraph_cc_recover(&h).unwrap();
        assert_eq!(cert.gamma, vec![int(1), int(2), int(3)]);
        let all = Profile::uniform(3, 1);
        assert_eq!(h.utility(&all, 2), int(3));
        assert_eq!(h.utility(&all.with(0, 0), 2), int(0));
        assert_eq!(hypergraph_potential(&h, &all, &cert).unwrap(), int(1));
        let pot = HypergraphPotential::new(&h, &cert).unwrap();
        assert!(exhaustive_audit(&h, &pot, 100, Exec::Sequential)
            .unwrap()
            .passed());
    }

    #[test]
    fn anchors_pin_edges() {
        let h = HypergraphGame::new(
            2,
            2,
            vec![Hyperedge {
                players: vec![0, 1],
                anchor: Some(1),
                weight: int(4),
                shares: vec![rat(1, 4), rat(3, 4)],
            }],
        )
        .unwrap();
        assert_eq!(h.utility(&Profile::uniform(2, 0), 1), int(0));
        assert_eq!(h.utility(&Profile::uniform(2, 1), 1), int(3));
    }

    #[test]
    fn inconsistent_shares_fail() {
        let edge = |players: Vec<usize>, shares: Vec<Num>| Hyperedge {
            players,
            anchor: None,
            weight: int(1),
            shares,
        };
        let h = HypergraphGame::new(
            3,
            1,
            vec![
                edge(vec![0, 1], vec![rat(1, 2), rat(1, 2)]),
                edge(vec![0, 1, 2], vec![rat(1, 2), rat(1, 4), rat(1, 4)]),
            ],
        )
        .unwrap();
        assert_eq!(hypergraph_cc_recover(&h).unwrap_err().edge, 1);
        let bad = HypergraphGame::new(2, 1, vec![edge(vec![0, 1], vec![rat(1, 2), rat(1, 3)])]);
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip() {
        let h = HypergraphGame::from_instance(&pairwise()).unwrap();
        assert_eq!(parse_hypergraph(&serialize_hypergraph(&h)).unwrap(), h);
    }
}
