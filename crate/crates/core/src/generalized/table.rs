//! Set-function utilities given by explicit tables `u_i(k, S)`, `i ∈ S`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{deviation_report, DeviationReport};
use crate::dynamics::{one_shot_with, DynamicsTrace};
use crate::error::{arg, invalid, Error, Result};
use crate::game::Game;
use crate::io::field_rational;
use crate::model::GameInstance;
use crate::numeric::{format_rational, int, serde_num, Extended, Num, Threshold};
use crate::profile::Profile;

/// Largest player count a table game may have (subsets are `u64` masks).
pub const MAX_TABLE_PLAYERS: usize = 20;

/// One table row: `player` on `strategy` together with exactly `subset`
/// (which contains `player`) gets `utility`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub player: usize,
    pub strategy: usize,
    pub subset: Vec<usize>,
    pub utility: Num,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedGame {
    n: usize,
    m: usize,
    /// `tables[i][k]` maps the co-located set (bitmask, includes `i`).
    tables: Vec<Vec<HashMap<u64, Num>>>,
    declared_r: Option<Num>,
}

fn mask_of(players: &[usize]) -> u64 {
    players.iter().fold(0, |acc, &j| acc | (1u64 << j))
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|j| mask >> j & 1 == 1).collect()
}

impl GeneralizedGame {
    pub fn new(
        n: usize,
        m: usize,
        entries: impl IntoIterator<Item = TableEntry>,
        declared_r: Option<Num>,
    ) -> Result<Self> {
        if m == 0 {
            return invalid("m", "at least one strategy is required");
        }
        if n > MAX_TABLE_PLAYERS {
            return invalid(
                "n",
                format!("at most {MAX_TABLE_PLAYERS} players are supported"),
            );
        }
        if let Some(r) = &declared_r {
            if r < &Num::one() {
                return invalid("r", "supermodularity bound must be at least 1");
            }
        }
        let mut tables = vec![vec![HashMap::new(); m]; n];
        for (e, entry) in entries.into_iter().enumerate() {
            let field = format!("entries[{e}]");
            if entry.player >= n || entry.strategy >= m {
                return invalid(field, "player or strategy out of range");
            }
            if entry.subset.iter().any(|&j| j >= n) {
                return invalid(field, "subset member out of range");
            }
            if !entry.subset.contains(&entry.player) {
                return invalid(field, "subset must contain the player");
            }
            if entry.utility < Num::zero() {
                return invalid(field, "negative utility");
            }
            let mask = mask_of(&entry.subset);
            if tables[entry.player][entry.strategy]
                .insert(mask, entry.utility)
                .is_some()
            {
                return invalid(field, "duplicate table entry");
            }
        }
        Ok(GeneralizedGame {
            n,
            m,
            tables,
            declared_r,
        })
    }

    /// The additive table of a pairwise instance.
    pub fn from_instance(game: &GameInstance) -> Result<Self> {
        let n = game.n();
        if n > MAX_TABLE_PLAYERS {
            return arg(format!("at most {MAX_TABLE_PLAYERS} players are supported"));
        }
        let mut entries = Vec::new();
        for i in 0..n {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            for bits in 0u64..(1 << others.len()) {
                let mut subset: Vec<usize> = others
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| bits >> b & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect();
                subset.push(i);
                subset.sort_unstable();
                for k in 0..game.m() {
                    let utility = game
                        .gains(i)
                        .iter()
                        .filter(|(j, _)| subset.contains(j))
                        .fold(game.intrinsic_of(i, k).clone(), |acc, (_, g)| acc + g);
                    entries.push(TableEntry {
                        player: i,
                        strategy: k,
                        subset: subset.clone(),
                        utility,
                    });
                }
            }
        }
        GeneralizedGame::new(n, game.m(), entries, Some(Num::one()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn declared_r(&self) -> Option<&Num> {
        self.declared_r.as_ref()
    }

    pub fn lookup(&self, player: usize, strategy: usize, subset: &[usize]) -> Option<&Num> {
        self.tables[player][strategy].get(&mask_of(subset))
    }

    /// All entries, ordered by player, strategy, then subset mask.
    pub fn entries(&self) -> Vec<TableEntry> {
        let mut out = Vec::new();
        for (i, per_k) in self.tables.iter().enumerate() {
            for (k, table) in per_k.iter().enumerate() {
                let sorted: BTreeMap<_, _> = table.iter().collect();
                for (&mask, u) in sorted {
                    out.push(TableEntry {
                        player: i,
                        strategy: k,
                        subset: members(mask),
                        utility: u.clone(),
                    });
                }
            }
        }
        out
    }

    /// Every `(i, k, S ∋ i)` must be present before dynamics can run.
    pub fn check_complete(&self) -> Result<()> {
        let expected = 1usize << (self.n.saturating_sub(1));
        for (i, per_k) in self.tables.iter().enumerate() {
            for (k, table) in per_k.iter().enumerate() {
                if table.len() != expected {
                    return Err(Error::Model(format!(
                        "table of player {i} on strategy {k} has {} of {expected} subsets",
                        table.len()
                    )));
                }
            }
        }
        Ok(())
    }

    fn colocated_mask(profile: &Profile, player: usize, strategy: usize) -> u64 {
        profile
            .strategies()
            .iter()
            .enumerate()
            .filter(|&(j, &k)| j == player || k == strategy)
            .fold(0, |acc, (j, _)| acc | (1u64 << j))
    }
}

impl Game for GeneralizedGame {
    fn players(&self) -> usize {
        self.n
    }

    fn strategies(&self) -> usize {
        self.m
    }

    /// Panics on an absent entry; callers validate with
    /// [`GeneralizedGame::check_complete`] first.
    fn utility_if(&self, profile: &Profile, player: usize, strategy: usize) -> Num {
        let mask = Self::colocated_mask(profile, player, strategy);
        match self.tables[player][strategy].get(&mask) {
            Some(u) => u.clone(),
            None => panic!(
                "no table entry for player {player}, strategy {strategy}, subset {:?}",
                members(mask)
            ),
        }
    }
}

/// Cap on table entries per `(player, strategy)` for pairwise enumeration.
const MAX_ENTRIES_PER_TABLE: usize = 1 << 12;

/// Max of `u_i(k, S∪T) / (u_i(k, S) + u_i(k, T))` over covered triples,
/// floored at 1; infinite when a zero denominator meets a positive numerator.
pub fn supermodularity_degree(game: &GeneralizedGame) -> Result<Extended> {
    let mut best = Extended::one();
    for per_k in &game.tables {
        for table in per_k {
            if table.len() > MAX_ENTRIES_PER_TABLE {
                return Err(Error::TooLarge {
                    profiles: format!("{} table entries", table.len()),
                    limit: MAX_ENTRIES_PER_TABLE as u64,
                });
            }
            let rows: Vec<(&u64, &Num)> = table.iter().collect();
            for (a, (s, us)) in rows.iter().enumerate() {
                for (t, ut) in &rows[a..] {
                    let Some(uu) = table.get(&(**s | **t)) else {
                        continue;
                    };
                    let den = *us + *ut;
                    let ratio = if den.is_zero() {
                        if uu.is_zero() {
                            continue;
                        }
                        Extended::Infinite
                    } else {
                        Extended::Finite(uu / den)
                    };
                    best = best.max(ratio);
                }
            }
        }
    }
    Ok(best)
}

/// `r` used for dynamics: the declared bound if any, else the computed one.
pub fn effective_r(game: &GeneralizedGame) -> Result<Extended> {
    match game.declared_r() {
        Some(r) => Ok(Extended::Finite(r.clone())),
        None => supermodularity_degree(game),
    }
}

/// Denominator of the rational α used for a given `r`.
pub const ALPHA_DENOMINATOR: i64 = 1_000_000;

/// `p/D ≥ (r + √(r(r+4)))/2`, decided exactly.
fn clears_alpha_star(p: i64, r: &Num) -> bool {
    let lhs = Num::new(p.into(), ALPHA_DENOMINATOR.into()) * int(2) - r;
    lhs >= Num::zero() && &lhs * &lhs >= r * (r + int(4))
}

/// Smallest `p/10⁶` at or above `α* = (r + √(r(r+4)))/2`.
pub fn alpha_for_r(r: &Num) -> Result<Num> {
    if r < &Num::one() {
        return arg(format!("r = {r} is below 1"));
    }
    let approx = crate::numeric::to_f64(r);
    let star = (approx + (approx * (approx + 4.0)).sqrt()) / 2.0;
    let mut p = (star * ALPHA_DENOMINATOR as f64).ceil() as i64;
    while clears_alpha_star(p - 1, r) {
        p -= 1;
    }
    while !clears_alpha_star(p, r) {
        p += 1;
    }
    let alpha = Num::new(p.into(), ALPHA_DENOMINATOR.into());
    if alpha >= r + Num::one() {
        return arg(format!(
            "no rational alpha below r + 1 at denominator {ALPHA_DENOMINATOR} for r = {r}"
        ));
    }
    Ok(alpha)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralizedOneShot {
    pub profile: Profile,
    #[serde(with = "serde_num")]
    pub r: Num,
    #[serde(with = "serde_num")]
    pub alpha_used: Num,
    /// `max(α, r(1 + 1/α))`, the factor the result is checked against.
    #[serde(with = "serde_num")]
    pub bound: Num,
    pub report: DeviationReport,
    #[serde(skip)]
    pub trace: DynamicsTrace,
}

/// One-shot BR on a complete table game with `α` tuned to its `r`.
pub fn one_shot_generalized(game: &GeneralizedGame, k0: usize) -> Result<GeneralizedOneShot> {
    game.check_complete()?;
    let r = match effective_r(game)? {
        Extended::Finite(r) => r,
        Extended::Infinite => {
            return Err(Error::Unsupported(
                "supermodularity degree is unbounded".into(),
            ));
        }
    };
    let alpha_used = alpha_for_r(&r)?;
    let trace = one_shot_with(game, k0, &Threshold::Rational(alpha_used.clone()))?;
    let other = &r * (Num::one() + Num::one() / &alpha_used);
    let bound = if alpha_used >= other {
        alpha_used.clone()
    } else {
        other
    };
    let report = deviation_report(game, &trace.terminal);
    Ok(GeneralizedOneShot {
        profile: trace.terminal.clone(),
        r,
        alpha_used,
        bound,
        report,
        trace,
    })
}

/// Unilateral deviation report on a complete table game.
pub fn verify_generalized(game: &GeneralizedGame, profile: &Profile) -> Result<DeviationReport> {
    game.check_complete()?;
    if profile.len() != game.n() || profile.strategies().iter().any(|&k| k >= game.m()) {
        return arg("profile does not fit the game");
    }
    Ok(deviation_report(game, profile))
}

/// Min over all 27 profiles of the triangle instance of the max deviation
/// factor.
pub fn triangle_nonexistence_check(c: &Num) -> Result<Extended> {
    let game = crate::generators::triangle_c(c)?;
    let space = crate::profile::ProfileSpace::new(3, 3, crate::profile::ENUMERATION_LIMIT)?;
    let worst = space
        .iter()
        .map(|p| deviation_report(&game, &p).max_factor)
        .min()
        .expect("27 profiles");
    Ok(worst)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<String>,
    /// Per player, its table rows.
    players: Vec<Vec<RowFile>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    strategy: usize,
    subset: Vec<usize>,
    utility: String,
}

/// `{"n", "m", "r"?, "players": [[{"strategy", "subset", "utility"}]]}`,
/// 0-based indices.
pub fn parse_generalized(text: &str) -> Result<GeneralizedGame> {
    let file: TableFile = serde_json::from_str(text)?;
    if file.players.len() != file.n {
        return invalid(
            "players",
            format!("expected {} players, found {}", file.n, file.players.len()),
        );
    }
    let r = file
        .r
        .as_deref()
        .map(|t| field_rational("r", t))
        .transpose()?;
    let mut entries = Vec::new();
    for (i, rows) in file.players.iter().enumerate() {
        for (e, row) in rows.iter().enumerate() {
            entries.push(TableEntry {
                player: i,
                strategy: row.strategy,
                subset: row.subset.clone(),
                utility: field_rational(format!("players[{i}][{e}].utility"), &row.utility)?,
            });
        }
    }
    GeneralizedGame::new(file.n, file.m, entries, r)
}

pub fn serialize_generalized(game: &GeneralizedGame) -> String {
    let mut players: Vec<Vec<RowFile>> = (0..game.n()).map(|_| Vec::new()).collect();
    for e in game.entries() {
        players[e.player].push(RowFile {
            strategy: e.strategy,
            subset: e.subset,
            utility: format_rational(&e.utility),
        });
    }
    let file = TableFile {
        n: game.n(),
        m: game.m(),
        r: game.declared_r().map(format_rational),
        players,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("table serializes");
    out.push('\n');
    out
}
