//! Best responses and the constructive algorithms built on them.
//!
//! Scheduling is deterministic everywhere: players are scanned in ascending
//! index order and the scan restarts after every move. Best responses break
//! ties toward staying put, then toward the lowest strategy index.

use std::collections::HashSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{arg, Result};
use crate::game::Game;
use crate::model::{instance_stats, GameInstance};
use crate::numeric::{improvement_factor, phi_approx, serde_num, Extended, Num, Threshold};
use crate::profile::Profile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub strategy: usize,
    pub utility: Num,
    pub current: Num,
    /// `utility / current` under the zero conventions of
    /// [`improvement_factor`].
    pub factor: Extended,
}

pub fn best_response<G: Game + ?Sized>(game: &G, profile: &Profile, player: usize) -> BestResponse {
    let stay = profile[player];
    let current = game.utility_if(profile, player, stay);
    let mut strategy = stay;
    let mut utility = current.clone();
    for k in 0..game.strategies() {
        if k == stay {
            continue;
        }
        let u = game.utility_if(profile, player, k);
        // strict: ties keep the earlier choice (stay first, then lower k)
        if u > utility {
            strategy = k;
            utility = u;
        }
    }
    let factor = improvement_factor(&utility, &current);
    BestResponse {
        strategy,
        utility,
        current,
        factor,
    }
}

/// A move is allowed iff `new ≥ α·old` and `new > old`.
pub fn passes_gate(threshold: &Threshold, new: &Num, old: &Num) -> bool {
    new > old && threshold.cleared_by(new, old)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub player: usize,
    pub from: usize,
    pub to: usize,
    #[serde(with = "serde_num")]
    pub old_utility: Num,
    #[serde(with = "serde_num")]
    pub new_utility: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Converged,
    CycleDetected,
    StepCap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DynamicsTrace {
    pub moves: Vec<Move>,
    pub terminal: Profile,
    pub reason: Termination,
}

impl DynamicsTrace {
    /// One JSON object per move, newline-terminated. Players are 0-based,
    /// strategies 1-based, utilities exact rational strings.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for mv in &self.moves {
            let line = serde_json::json!({
                "player": mv.player,
                "from": mv.from + 1,
                "to": mv.to + 1,
                "old": mv.old_utility.to_string(),
                "new": mv.new_utility.to_string(),
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

/// `m^n · n`, saturating.
pub fn default_step_cap(n: usize, m: usize) -> u64 {
    (m as u64)
        .checked_pow(n as u32)
        .and_then(|p| p.checked_mul(n.max(1) as u64))
        .unwrap_or(u64::MAX)
}

/// Best-response dynamics under the improvement gate `threshold`.
pub fn run_dynamics<G: Game + ?Sized>(
    game: &G,
    start: &Profile,
    threshold: &Threshold,
    step_cap: u64,
) -> Result<DynamicsTrace> {
    if step_cap == 0 {
        return arg("step cap must be at least 1");
    }
    if !threshold.at_least_one() {
        return arg("threshold must be at least 1");
    }
    let mut profile = start.clone();
    let mut visited = HashSet::new();
    visited.insert(profile.clone());
    let mut moves = Vec::new();
    loop {
        let next = (0..game.players()).find_map(|i| {
            let br = best_response(game, &profile, i);
            passes_gate(threshold, &br.utility, &br.current).then_some((i, br))
        });
        let Some((player, br)) = next else {
            return Ok(DynamicsTrace {
                moves,
                terminal: profile,
                reason: Termination::Converged,
            });
        };
        moves.push(Move {
            player,
            from: profile[player],
            to: br.strategy,
            old_utility: br.current,
            new_utility: br.utility,
        });
        profile.set(player, br.strategy);
        if !visited.insert(profile.clone()) {
            return Ok(DynamicsTrace {
                moves,
                terminal: profile,
                reason: Termination::CycleDetected,
            });
        }
        if moves.len() as u64 >= step_cap {
            return Ok(DynamicsTrace {
                moves,
                terminal: profile,
                reason: Termination::StepCap,
            });
        }
    }
}

/// One-shot BR with an arbitrary gate. Everyone starts on `k0`; only players
/// still on `k0` may move, each at most once, to a best response.
pub fn one_shot_with<G: Game + ?Sized>(
    game: &G,
    k0: usize,
    threshold: &Threshold,
) -> Result<DynamicsTrace> {
    if k0 >= game.strategies() {
        return arg(format!("starting strategy {k0} out of range"));
    }
    if !threshold.at_least_one() {
        return arg("alpha must be at least 1");
    }
    let n = game.players();
    let mut profile = Profile::uniform(n, k0);
    let mut moved = vec![false; n];
    let mut moves = Vec::new();
    loop {
        let next = (0..n).filter(|&i| !moved[i]).find_map(|i| {
            let br = best_response(game, &profile, i);
            (br.strategy != k0 && passes_gate(threshold, &br.utility, &br.current))
                .then_some((i, br))
        });
        let Some((player, br)) = next else { break };
        moved[player] = true;
        moves.push(Move {
            player,
            from: k0,
            to: br.strategy,
            old_utility: br.current,
            new_utility: br.utility,
        });
        profile.set(player, br.strategy);
    }
    Ok(DynamicsTrace {
        moves,
        terminal: profile,
        reason: Termination::Converged,
    })
}

/// One-shot α-BR from the all-`k0` profile.
pub fn one_shot_alpha_br<G: Game + ?Sized>(
    game: &G,
    k0: usize,
    alpha: &Num,
) -> Result<(Profile, DynamicsTrace)> {
    if alpha < &Num::one() {
        return arg(format!("alpha = {alpha} is below 1"));
    }
    let trace = one_shot_with(game, k0, &Threshold::Rational(alpha.clone()))?;
    Ok((trace.terminal.clone(), trace))
}

/// Moves players between strategies `a` and `b` only, first `a → b` then
/// `b → a`, each whenever the switch strictly improves. Afterwards no
/// player on `a` or `b` prefers the other of the two.
fn stabilize_pair<G: Game + ?Sized>(
    game: &G,
    profile: &mut Profile,
    a: usize,
    b: usize,
    moves: &mut Vec<Move>,
) {
    for (from, to) in [(a, b), (b, a)] {
        loop {
            let next = (0..game.players())
                .filter(|&i| profile[i] == from)
                .find_map(|i| {
                    let old = game.utility_if(profile, i, from);
                    let new = game.utility_if(profile, i, to);
                    (new > old).then_some((i, old, new))
                });
            let Some((player, old, new)) = next else {
                break;
            };
            moves.push(Move {
                player,
                from,
                to,
                old_utility: old,
                new_utility: new,
            });
            profile.set(player, to);
        }
    }
}

/// Two-strategy Nash equilibrium: players leave strategy 1 for 2 while that
/// improves them, then the reverse.
pub fn algorithm1_two<G: Game + ?Sized>(game: &G, start: &Profile) -> Result<Profile> {
    if game.strategies() != 2 {
        return arg(format!("requires m = 2, got m = {}", game.strategies()));
    }
    if start.len() != game.players() || start.strategies().iter().any(|&k| k >= 2) {
        return arg("start profile does not fit the game");
    }
    let mut profile = start.clone();
    stabilize_pair(game, &mut profile, 0, 1, &mut Vec::new());
    Ok(profile)
}

/// Members of `candidates` (all currently on `from`) forming the largest
/// coalition whose joint move to `to` strictly improves every member.
///
/// Utilities on `to` only grow with the coalition, so shrinking from the
/// full candidate set to a fixed point yields the unique maximal one.
pub fn maximal_improving_coalition<G: Game + ?Sized>(
    game: &G,
    profile: &Profile,
    candidates: &[usize],
    to: usize,
) -> Vec<usize> {
    let mut coalition: Vec<usize> = candidates.to_vec();
    loop {
        let mut moved = profile.clone();
        for &i in &coalition {
            moved.set(i, to);
        }
        let kept: Vec<usize> = coalition
            .iter()
            .copied()
            .filter(|&i| game.utility_if(&moved, i, to) > game.utility(profile, i))
            .collect();
        if kept.len() == coalition.len() {
            return coalition;
        }
        coalition = kept;
    }
}

/// Strong Nash equilibrium for two strategies: start everyone on strategy 1
/// and move maximal strictly-improving coalitions to strategy 2 until none
/// is left.
pub fn strong_two<G: Game + ?Sized>(game: &G) -> Result<Profile> {
    if game.strategies() != 2 {
        return arg(format!("requires m = 2, got m = {}", game.strategies()));
    }
    let mut profile = Profile::uniform(game.players(), 0);
    loop {
        let coalition = maximal_improving_coalition(game, &profile, &profile.coalition(0), 1);
        if coalition.is_empty() {
            return Ok(profile);
        }
        for i in coalition {
            profile.set(i, 1);
        }
    }
}

/// √2-approximate equilibrium for three strategies.
///
/// Strategies 1 and 2 are kept mutually stable; a player on either of them
/// moves to 3 when 3 is a best response improving it by a factor of at
/// least √2 (decided on squares), after which 1 and 2 are re-stabilized.
pub fn sqrt2_three<G: Game + ?Sized>(game: &G) -> Result<Profile> {
    if game.strategies() != 3 {
        return arg(format!("requires m = 3, got m = {}", game.strategies()));
    }
    let mut profile = Profile::uniform(game.players(), 0);
    let mut moves = Vec::new();
    stabilize_pair(game, &mut profile, 0, 1, &mut moves);
    let sqrt2 = Threshold::Sqrt2;
    loop {
        let next = (0..game.players()).filter(|&i| profile[i] != 2).find(|&i| {
            let cur = game.utility(&profile, i);
            let other = game.utility_if(&profile, i, 1 - profile[i]);
            let third = game.utility_if(&profile, i, 2);
            third >= other && passes_gate(&sqrt2, &third, &cur)
        });
        let Some(player) = next else {
            return Ok(profile);
        };
        profile.set(player, 2);
        stabilize_pair(game, &mut profile, 0, 1, &mut moves);
    }
}

/// Output of the two-run hybrid algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HybridReport {
    #[serde(with = "serde_num")]
    pub alpha: Num,
    /// `1/(α−1)`, the gate of the second run.
    #[serde(with = "serde_num")]
    pub beta: Num,
    pub k_star: usize,
    pub s1: Profile,
    pub s2: Profile,
    #[serde(with = "serde_num")]
    pub welfare1: Num,
    #[serde(with = "serde_num")]
    pub welfare2: Num,
    pub chosen: Profile,
    #[serde(with = "serde_num")]
    pub chosen_welfare: Num,
    /// Stability factor guaranteed for `chosen`: the larger of the two runs'
    /// `max(g, 1/g + 1)` bounds.
    #[serde(with = "serde_num")]
    pub stability_bound: Num,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_num")]
    pub opt_welfare: Option<Num>,
    /// ρ_α = chosen welfare / OPT.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_num")]
    pub rho: Option<Num>,
}

mod opt_num {
    use super::Num;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Option<Num>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }
}

/// `max(g, 1/g + 1)`: the stability factor one-shot g-BR guarantees.
pub fn one_shot_stability_bound(gate: &Num) -> Num {
    let other = Num::one() / gate + Num::one();
    if gate >= &other {
        gate.clone()
    } else {
        other
    }
}

/// Runs one-shot α-BR and one-shot 1/(α−1)-BR from k* and keeps the better.
/// `alpha` must lie in `[phi, 2]`; `opt_welfare`, if known, fills in ρ_α.
pub fn hybrid_with_phi(
    game: &GameInstance,
    alpha: &Num,
    phi: &Num,
    opt_welfare: Option<&Num>,
) -> Result<HybridReport> {
    if alpha < phi || alpha > &Num::from_integer(2.into()) {
        return arg(format!("alpha = {alpha} outside [{phi}, 2]"));
    }
    if phi <= &Num::one() {
        return arg("phi approximation must exceed 1");
    }
    let beta = Num::one() / (alpha - Num::one());
    let k_star = instance_stats(game).k_star;
    let (s1, _) = one_shot_alpha_br(game, k_star, alpha)?;
    let (s2, _) = one_shot_alpha_br(game, k_star, &beta)?;
    let welfare1 = game.social_welfare(&s1);
    let welfare2 = game.social_welfare(&s2);
    let (chosen, chosen_welfare) = if welfare2 > welfare1 {
        (s2.clone(), welfare2.clone())
    } else {
        (s1.clone(), welfare1.clone())
    };
    let stability_bound = one_shot_stability_bound(alpha).max(one_shot_stability_bound(&beta));
    let rho = match opt_welfare {
        Some(opt) if opt.is_zero() => Some(Num::one()),
        Some(opt) => Some(&chosen_welfare / opt),
        None => None,
    };
    Ok(HybridReport {
        alpha: alpha.clone(),
        beta,
        k_star,
        s1,
        s2,
        welfare1,
        welfare2,
        chosen,
        chosen_welfare,
        stability_bound,
        opt_welfare: opt_welfare.cloned(),
        rho,
    })
}

/// [`hybrid_with_phi`] with the default φ ≈ 1618/1000.
pub fn hybrid(game: &GameInstance, alpha: &Num, opt_welfare: Option<&Num>) -> Result<HybridReport> {
    hybrid_with_phi(game, alpha, &phi_approx(), opt_welfare)
}
