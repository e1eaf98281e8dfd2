//! Correlated-coordination certificates and potential functions.
//!
//! A game satisfies the CC condition when positive influences `γ_i` exist
//! with `share_ij = γ_i/(γ_i + γ_j)` on every positive-weight edge. Then
//! `Φ(s) = Σ_i w_i^{s_i}/γ_i + Σ_{s_i = s_j} w(i,j)/(γ_i + γ_j)` changes by
//! `Δu_i/γ_i` under any unilateral move.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::game::Game;
use crate::io::field_rational;
use crate::model::GameInstance;
use crate::numeric::{format_rational, serde_num, Num};
use crate::par::{map_indices, Exec};
use crate::profile::{Profile, ProfileSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialCertificate {
    /// One positive influence per player, minimum 1 within each component.
    pub gamma: Vec<Num>,
    /// Component id per player in the positive-weight graph, numbered by
    /// lowest member. Isolated players form their own component.
    pub component: Vec<usize>,
}

impl PotentialCertificate {
    /// `γ ≡ 1`, valid for symmetric games.
    pub fn uniform(n: usize) -> Self {
        PotentialCertificate {
            gamma: vec![Num::one(); n],
            component: (0..n).collect(),
        }
    }

    pub fn from_gamma(gamma: Vec<Num>) -> Self {
        let component = (0..gamma.len()).collect();
        PotentialCertificate { gamma, component }
    }

    /// JSON array of rational strings.
    pub fn to_json(&self) -> String {
        let items: Vec<String> = self.gamma.iter().map(format_rational).collect();
        serde_json::to_string(&items).expect("strings serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let items: Vec<String> = serde_json::from_str(text)?;
        let gamma = items
            .iter()
            .enumerate()
            .map(|(i, t)| field_rational(format!("gamma[{i}]"), t))
            .collect::<Result<Vec<_>>>()?;
        Ok(PotentialCertificate::from_gamma(gamma))
    }
}

/// Why no certificate exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CcFailure {
    /// Index into the game's edge list (or hyperedge list).
    pub edge: usize,
    /// Players along the inconsistent cycle closed by `edge`; empty when the
    /// edge fails on its own.
    pub cycle: Vec<usize>,
    pub reason: String,
}

impl std::fmt::Display for CcFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "edge {}: {}", self.edge, self.reason)?;
        if !self.cycle.is_empty() {
            write!(f, " (cycle {:?})", self.cycle)?;
        }
        Ok(())
    }
}

/// Connected components in index order; each component's γ is scaled so its
/// minimum is 1.
pub(crate) fn normalize(gamma: &mut [Num], component: &[usize]) {
    let mut min: Vec<Option<Num>> = vec![None; gamma.len()];
    for (i, g) in gamma.iter().enumerate() {
        let slot = &mut min[component[i]];
        if slot.as_ref().is_none_or(|m| g < m) {
            *slot = Some(g.clone());
        }
    }
    for (i, g) in gamma.iter_mut().enumerate() {
        let m = min[component[i]].as_ref().expect("component has a member");
        *g = &*g / m;
    }
}

/// Tree path from `a` and `b` up to their common ancestor, closed into a
/// cycle `a … lca … b`.
pub(crate) fn tree_cycle(parent: &[Option<usize>], a: usize, b: usize) -> Vec<usize> {
    let ancestors = |mut v: usize| {
        let mut path = vec![v];
        while let Some(p) = parent[v] {
            path.push(p);
            v = p;
        }
        path
    };
    let pa = ancestors(a);
    let pb = ancestors(b);
    let lca = *pa.iter().find(|v| pb.contains(v)).expect("same component");
    let mut cycle: Vec<usize> = pa.iter().copied().take_while(|&v| v != lca).collect();
    cycle.push(lca);
    let back: Vec<usize> = pb.iter().copied().take_while(|&v| v != lca).collect();
    cycle.extend(back.into_iter().rev());
    cycle
}

/// Recovers γ by spanning-tree propagation and checks every other edge.
pub fn cc_recover(game: &GameInstance) -> std::result::Result<PotentialCertificate, CcFailure> {
    let n = game.n();
    let edges = game.edges();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, edge) in edges.iter().enumerate() {
        if edge.weight.is_zero() {
            continue;
        }
        if edge.share_ij.is_zero() || edge.share_ij.is_one() {
            return Err(CcFailure {
                edge: e,
                cycle: Vec::new(),
                reason: "share of 0 or 1 cannot be realized by positive influences".into(),
            });
        }
        adjacency[edge.i].push(e);
        adjacency[edge.j].push(e);
    }

    let mut gamma: Vec<Option<Num>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut tree_edge = vec![false; edges.len()];
    let mut component = vec![0; n];
    for root in 0..n {
        if gamma[root].is_some() {
            continue;
        }
        gamma[root] = Some(Num::one());
        component[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &e in &adjacency[u] {
                let edge = &edges[e];
                let v = edge.other(u);
                if gamma[v].is_some() {
                    continue;
                }
                let gu = gamma[u].clone().expect("visited");
                gamma[v] = Some(gu * edge.share_of(v) / edge.share_of(u));
                parent[v] = Some(u);
                component[v] = root;
                tree_edge[e] = true;
                queue.push_back(v);
            }
        }
    }
    let mut gamma: Vec<Num> = gamma.into_iter().map(|g| g.expect("all visited")).collect();

    for (e, edge) in edges.iter().enumerate() {
        if edge.weight.is_zero() || tree_edge[e] {
            continue;
        }
        let expected = &gamma[edge.i] / (&gamma[edge.i] + &gamma[edge.j]);
        if expected != edge.share_ij {
            return Err(CcFailure {
                edge: e,
                cycle: tree_cycle(&parent, edge.i, edge.j),
                reason: format!(
                    "share_ij = {} but the spanning tree implies {}",
                    edge.share_ij, expected
                ),
            });
        }
    }
    normalize(&mut gamma, &component);
    Ok(PotentialCertificate { gamma, component })
}

/// Every positive-weight edge's share is reproduced by `cert`.
pub fn certificate_matches(game: &GameInstance, cert: &PotentialCertificate) -> bool {
    cert.gamma.len() == game.n()
        && game.positive_edges().all(|e| {
            let (gi, gj) = (&cert.gamma[e.i], &cert.gamma[e.j]);
            gi.is_positive() && gj.is_positive() && gi / (gi + gj) == e.share_ij
        })
}

fn check_cert(game: &GameInstance, cert: &PotentialCertificate) -> Result<()> {
    if cert.gamma.len() != game.n() {
        return arg(format!(
            "certificate has {} entries for {} players",
            cert.gamma.len(),
            game.n()
        ));
    }
    if let Some(i) = (0..game.n()).find(|&i| !cert.gamma[i].is_positive()) {
        return arg(format!("certificate entry for player {i} is not positive"));
    }
    Ok(())
}

/// A function whose change along unilateral moves is audited against the
/// mover's utility change.
pub trait Potential: Sync {
    fn value(&self, profile: &Profile) -> Num;

    /// `Φ(s with player on strategy) − Φ(s)`.
    fn delta(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        self.value(&profile.with(player, strategy)) - self.value(profile)
    }
}

/// Φ of a pairwise game under a CC certificate.
pub struct PairwisePotential<'a> {
    game: &'a GameInstance,
    inv_gamma: Vec<Num>,
    /// Per player: (neighbour, w/(γ_i+γ_j)).
    terms: Vec<Vec<(usize, Num)>>,
}

impl<'a> PairwisePotential<'a> {
    pub fn new(game: &'a GameInstance, cert: &PotentialCertificate) -> Result<Self> {
        check_cert(game, cert)?;
        let inv_gamma = cert.gamma.iter().map(|g| Num::one() / g).collect();
        let mut terms = vec![Vec::new(); game.n()];
        for e in game.positive_edges() {
            let t = &e.weight / (&cert.gamma[e.i] + &cert.gamma[e.j]);
            terms[e.i].push((e.j, t.clone()));
            terms[e.j].push((e.i, t));
        }
        Ok(PairwisePotential {
            game,
            inv_gamma,
            terms,
        })
    }

    fn local(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        self.terms[player]
            .iter()
            .filter(|(j, _)| profile[*j] == strategy)
            .fold(
                self.game.intrinsic_of(player, strategy) * &self.inv_gamma[player],
                |acc, (_, t)| acc + t,
            )
    }
}

impl Potential for PairwisePotential<'_> {
    fn value(&self, profile: &Profile) -> Num {
        let intrinsic = (0..self.game.n()).fold(Num::zero(), |acc, i| {
            acc + self.game.intrinsic_of(i, profile[i]) * &self.inv_gamma[i]
        });
        self.game
            .positive_edges()
            .filter(|e| profile[e.i] == profile[e.j])
            .fold(intrinsic, |acc, e| {
                let t = self.terms[e.i]
                    .iter()
                    .find(|(j, _)| *j == e.j)
                    .expect("edge term");
                acc + &t.1
            })
    }

    fn delta(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        if strategy == profile[player] {
            return Num::zero();
        }
        self.local(profile, player, strategy) - self.local(profile, player, profile[player])
    }
}

/// Φ(s) for `cert`.
pub fn potential_value(
    game: &GameInstance,
    profile: &Profile,
    cert: &PotentialCertificate,
) -> Result<Num> {
    game.check_profile(profile)?;
    Ok(PairwisePotential::new(game, cert)?.value(profile))
}

/// Exact potential of a symmetric game: `Σ w_i^{s_i} + ½ Σ_{s_i=s_j} w(i,j)`.
pub fn symmetric_potential(game: &GameInstance, profile: &Profile) -> Num {
    let half = Num::new(1.into(), 2.into());
    game.positive_edges()
        .filter(|e| profile[e.i] == profile[e.j])
        .fold(game.intrinsic_welfare(profile), |acc, e| {
            acc + &e.weight * &half
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditCase {
    pub profile: Profile,
    pub player: usize,
    pub strategy: usize,
    #[serde(with = "serde_num")]
    pub delta_utility: Num,
    #[serde(with = "serde_num")]
    pub delta_potential: Num,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub checked: u64,
    pub violations: u64,
    /// First violating case in trial (or enumeration) order.
    pub counterexample: Option<AuditCase>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(parts: Vec<AuditReport>) -> AuditReport {
        let mut out = AuditReport {
            checked: 0,
            violations: 0,
            counterexample: None,
        };
        for part in parts {
            out.checked += part.checked;
            out.violations += part.violations;
            if out.counterexample.is_none() {
                out.counterexample = part.counterexample;
            }
        }
        out
    }
}

fn audit_one<G: Game + ?Sized, P: Potential + ?Sized>(
    game: &G,
    potential: &P,
    profile: &Profile,
    player: usize,
    strategy: usize,
) -> Option<AuditCase> {
    let du = game.utility_if(profile, player, strategy) - game.utility(profile, player);
    let dphi = potential.delta(profile, player, strategy);
    (du.signum() != dphi.signum()).then(|| AuditCase {
        profile: profile.clone(),
        player,
        strategy,
        delta_utility: du,
        delta_potential: dphi,
    })
}

const AUDIT_CHUNK: u64 = 256;

/// Samples `trials` uniform (profile, player, strategy) triples and checks
/// `sign(Δu_i) = sign(ΔΦ)`. Chunk `c` draws from ChaCha8 stream `c` of
/// `seed`, so the result does not depend on `exec`.
pub fn ordinal_audit<G: Game + ?Sized, P: Potential + ?Sized>(
    game: &G,
    potential: &P,
    trials: u64,
    seed: u64,
    exec: Exec,
) -> AuditReport {
    let (n, m) = (game.players(), game.strategies());
    if n == 0 {
        return AuditReport::merge(Vec::new());
    }
    let chunks = trials.div_ceil(AUDIT_CHUNK) as usize;
    let parts = map_indices(chunks, exec, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = AUDIT_CHUNK.min(trials - c as u64 * AUDIT_CHUNK);
        let mut part = AuditReport::merge(Vec::new());
        for _ in 0..count {
            let profile =
                Profile::from_vec_unchecked((0..n).map(|_| rng.random_range(0..m)).collect());
            let player = rng.random_range(0..n);
            let strategy = rng.random_range(0..m);
            part.checked += 1;
            if let Some(case) = audit_one(game, potential, &profile, player, strategy) {
                part.violations += 1;
                part.counterexample.get_or_insert(case);
            }
        }
        part
    });
    AuditReport::merge(parts)
}

/// Every unilateral deviation from every profile (capped at `limit`
/// profiles).
pub fn exhaustive_audit<G: Game + ?Sized, P: Potential + ?Sized>(
    game: &G,
    potential: &P,
    limit: u64,
    exec: Exec,
) -> Result<AuditReport> {
    let space = ProfileSpace::new(game.players(), game.strategies(), limit)?;
    let parts = map_indices(space.size() as usize, exec, |idx| {
        let profile = space.decode(idx as u64);
        let mut part = AuditReport::merge(Vec::new());
        for player in 0..game.players() {
            for strategy in 0..game.strategies() {
                part.checked += 1;
                if let Some(case) = audit_one(game, potential, &profile, player, strategy) {
                    part.violations += 1;
                    part.counterexample.get_or_insert(case);
                }
            }
        }
        part
    });
    Ok(AuditReport::merge(parts))
}

impl From<CcFailure> for Error {
    fn from(f: CcFailure) -> Self {
        Error::Model(format!("correlated coordination fails at {f}"))
    }
}
