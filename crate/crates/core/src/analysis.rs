//! Verifiers and brute-force oracles.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dynamics::best_response;
use crate::error::{arg, Result};
use crate::game::Game;
use crate::model::{instance_stats, GameInstance};
use crate::numeric::{
    improvement_factor, phi_approx, serde_extended, serde_num, serde_num_vec, Extended, Num,
    Threshold,
};
use crate::par::{best_in_space, filter_map_space, find_first_space, Exec};
use crate::profile::{Profile, ProfileSpace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlayerDeviation {
    pub strategy: usize,
    #[serde(with = "serde_num")]
    pub utility: Num,
    #[serde(with = "serde_num")]
    pub current: Num,
    #[serde(with = "serde_extended")]
    pub factor: Extended,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationReport {
    pub players: Vec<PlayerDeviation>,
    #[serde(with = "serde_extended")]
    pub max_factor: Extended,
    /// Lowest-index player attaining `max_factor`.
    pub witness: Option<usize>,
}

impl DeviationReport {
    /// The profile is a `threshold`-approximate equilibrium.
    pub fn within(&self, threshold: &Threshold) -> bool {
        threshold.admits(&self.max_factor)
    }
}

/// Best unilateral deviation of every player.
pub fn deviation_report<G: Game + ?Sized>(game: &G, profile: &Profile) -> DeviationReport {
    let players: Vec<PlayerDeviation> = (0..game.players())
        .map(|i| {
            let br = best_response(game, profile, i);
            PlayerDeviation {
                strategy: br.strategy,
                utility: br.utility,
                current: br.current,
                factor: br.factor,
            }
        })
        .collect();
    let mut max_factor = Extended::one();
    let mut witness = None;
    for (i, d) in players.iter().enumerate() {
        if witness.is_none() || d.factor > max_factor {
            max_factor = d.factor.clone();
            witness = Some(i);
        }
    }
    DeviationReport {
        players,
        max_factor,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrongWitness {
    pub profile: Profile,
    pub coalition: Vec<usize>,
    #[serde(with = "crate::numeric::serde_extended_vec")]
    pub factors: Vec<Extended>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrongDeviationReport {
    #[serde(with = "serde_num")]
    pub alpha: Num,
    /// Lexicographically first violating alternative, if any.
    pub witness: Option<StrongWitness>,
}

impl StrongDeviationReport {
    pub fn is_stable(&self) -> bool {
        self.witness.is_none()
    }
}

/// `new` improves on `old` by a factor strictly above `alpha`.
fn beats(new: &Num, old: &Num, alpha: &Num) -> bool {
    if old.is_zero() {
        new > old
    } else {
        new > &(alpha * old)
    }
}

/// Every feasible `s' ≠ s` in which all movers improve by more than `alpha`
/// is a violation; reports the lexicographically first one.
pub fn verify_approx_strong<G: Game + ?Sized>(
    game: &G,
    profile: &Profile,
    alpha: &Num,
    limit: u64,
    exec: Exec,
) -> Result<StrongDeviationReport> {
    if alpha < &Num::one() {
        return arg(format!("alpha = {alpha} is below 1"));
    }
    let space = ProfileSpace::new(game.players(), game.strategies(), limit)?;
    if profile.len() != game.players()
        || profile.strategies().iter().any(|&k| k >= game.strategies())
    {
        return arg("profile does not fit the game");
    }
    let current: Vec<Num> = (0..game.players())
        .map(|i| game.utility(profile, i))
        .collect();
    let witness = find_first_space(&space, exec, |alt| {
        if &alt == profile {
            return None;
        }
        let movers = alt.movers_from(profile);
        let mut gains = Vec::with_capacity(movers.len());
        for &i in &movers {
            let u = game.utility(&alt, i);
            if !beats(&u, &current[i], alpha) {
                return None;
            }
            gains.push(u);
        }
        if !game.is_feasible(&alt) {
            return None;
        }
        let factors = movers
            .iter()
            .zip(&gains)
            .map(|(&i, u)| improvement_factor(u, &current[i]))
            .collect();
        Some(StrongWitness {
            profile: alt,
            coalition: movers,
            factors,
        })
    });
    Ok(StrongDeviationReport {
        alpha: alpha.clone(),
        witness,
    })
}

/// Welfare maximizer over feasible profiles; ties go to the
/// lexicographically smallest profile.
pub fn brute_force_optimum<G: Game + ?Sized>(
    game: &G,
    limit: u64,
    exec: Exec,
) -> Result<(Profile, Num)> {
    let space = ProfileSpace::new(game.players(), game.strategies(), limit)?;
    best_in_space(
        &space,
        exec,
        |p| game.is_feasible(&p).then(|| (game.social_welfare(&p), p)),
        prefer_higher,
    )
    .map(|(w, p)| (p, w))
    .ok_or_else(|| crate::error::Error::Model("no feasible profile".into()))
}

fn prefer_higher(x: (Num, Profile), y: (Num, Profile)) -> (Num, Profile) {
    if x.0 > y.0 || (x.0 == y.0 && x.1 <= y.1) {
        x
    } else {
        y
    }
}

fn ratio(opt: &Num, value: &Num) -> Extended {
    if value.is_zero() {
        if opt.is_zero() {
            Extended::one()
        } else {
            Extended::Infinite
        }
    } else {
        Extended::Finite(opt / value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub profile: Profile,
    #[serde(with = "serde_num")]
    pub welfare: Num,
    #[serde(with = "serde_extended")]
    pub max_factor: Extended,
    pub is_nash: bool,
    /// Computed only for equilibrium rows when requested.
    pub is_strong: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquilibriumCensus {
    #[serde(with = "serde_num")]
    pub alpha: Num,
    pub profiles: u64,
    pub opt_profile: Profile,
    #[serde(with = "serde_num")]
    pub opt_welfare: Num,
    /// α-approximate equilibria in lexicographic order.
    pub equilibria: Vec<CensusRow>,
    pub exists: bool,
    pub best: Option<CensusRow>,
    pub worst: Option<CensusRow>,
    /// OPT / worst equilibrium welfare.
    #[serde(with = "crate::numeric::serde_extended_opt")]
    pub poa: Option<Extended>,
    /// OPT / best equilibrium welfare.
    #[serde(with = "crate::numeric::serde_extended_opt")]
    pub pos: Option<Extended>,
    /// Every profile when requested, else the equilibria.
    #[serde(skip)]
    pub rows: Vec<CensusRow>,
}

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    pub limit: u64,
    pub exec: Exec,
    /// Run the exhaustive strong check (at the same α) on each equilibrium.
    pub strong: bool,
    /// Keep a row for every profile.
    pub all_rows: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            limit: crate::profile::ENUMERATION_LIMIT,
            exec: Exec::default(),
            strong: false,
            all_rows: false,
        }
    }
}

/// Exhaustive census of α-approximate equilibria.
pub fn equilibrium_census<G: Game + ?Sized>(
    game: &G,
    alpha: &Num,
    options: CensusOptions,
) -> Result<EquilibriumCensus> {
    if alpha < &Num::one() {
        return arg(format!("alpha = {alpha} is below 1"));
    }
    let space = ProfileSpace::new(game.players(), game.strategies(), options.limit)?;
    let threshold = Threshold::Rational(alpha.clone());
    let rows = filter_map_space(&space, options.exec, |p| {
        if !game.is_feasible(&p) {
            return None;
        }
        let report = deviation_report(game, &p);
        let is_nash = report.within(&threshold);
        if !is_nash && !options.all_rows {
            return None;
        }
        Some(CensusRow {
            welfare: game.social_welfare(&p),
            max_factor: report.max_factor,
            is_nash,
            is_strong: None,
            profile: p,
        })
    });
    let (opt_profile, opt_welfare) = brute_force_optimum(game, options.limit, options.exec)?;
    let mut rows = rows;
    if options.strong {
        for row in rows.iter_mut().filter(|r| r.is_nash) {
            let report =
                verify_approx_strong(game, &row.profile, alpha, options.limit, options.exec)?;
            row.is_strong = Some(report.is_stable());
        }
    }
    let equilibria: Vec<CensusRow> = rows.iter().filter(|r| r.is_nash).cloned().collect();
    let mut best: Option<&CensusRow> = None;
    let mut worst: Option<&CensusRow> = None;
    for row in &equilibria {
        if best.is_none_or(|b| row.welfare > b.welfare) {
            best = Some(row);
        }
        if worst.is_none_or(|w| row.welfare < w.welfare) {
            worst = Some(row);
        }
    }
    let poa = worst.map(|w| ratio(&opt_welfare, &w.welfare));
    let pos = best.map(|b| ratio(&opt_welfare, &b.welfare));
    Ok(EquilibriumCensus {
        alpha: alpha.clone(),
        profiles: space.size(),
        opt_profile,
        opt_welfare,
        exists: !equilibria.is_empty(),
        best: best.cloned(),
        worst: worst.cloned(),
        poa,
        pos,
        rows,
        equilibria,
    })
}

/// Number of strategies, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyCount {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for StrategyCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyCount::Finite(m) => write!(f, "{m}"),
            StrategyCount::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for StrategyCount {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" => Ok(StrategyCount::Infinite),
            t => t
                .parse::<usize>()
                .map(StrategyCount::Finite)
                .map_err(|_| format!("expected a positive integer or `inf`, got `{t}`")),
        }
    }
}

/// Guaranteed fraction of OPT reached by the hybrid algorithm.
///
/// With `γ + 1 ≤ αm` this is `(α−1)/(1 + ((γ+1)/α)(α − 1 − 1/m))`,
/// otherwise `max(α/(γ+1), (α−1)/((m−1)+(α−1)))`. An unbounded `m` means
/// `1/m = 0`; an unbounded `γ` keeps only the second term.
pub fn welfare_lower_bound(alpha: &Num, gamma: &Extended, m: StrategyCount) -> Result<Num> {
    let two = Num::from_integer(2.into());
    if alpha < &phi_approx() || alpha > &two {
        return arg(format!("alpha = {alpha} outside [{}, 2]", phi_approx()));
    }
    if let Extended::Finite(g) = gamma {
        if g < &Num::one() {
            return arg(format!("gamma = {g} is below 1"));
        }
    }
    if m == StrategyCount::Finite(0) {
        return arg("m must be at least 1");
    }
    let one = Num::one();
    let a1 = alpha - &one;
    let inv_m = match m {
        StrategyCount::Finite(m) => Num::new(1.into(), (m as i64).into()),
        StrategyCount::Infinite => Num::zero(),
    };
    let tail = match m {
        StrategyCount::Finite(m) => &a1 / (Num::from_integer((m as i64 - 1).into()) + &a1),
        StrategyCount::Infinite => Num::zero(),
    };
    let Extended::Finite(g) = gamma else {
        return Ok(tail);
    };
    let g1 = g + &one;
    let first_branch = match m {
        StrategyCount::Finite(m) => g1 <= alpha * Num::from_integer((m as i64).into()),
        StrategyCount::Infinite => true,
    };
    if first_branch {
        Ok(&a1 / (&one + (&g1 / alpha) * (alpha - &one - &inv_m)))
    } else {
        let lead = alpha / &g1;
        Ok(if lead >= tail { lead } else { tail })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaymentPlan {
    /// Minimal payment per player, conditional on staying.
    #[serde(with = "serde_num_vec")]
    pub payments: Vec<Num>,
    /// Best-response strategy each payment neutralizes.
    pub best_responses: Vec<usize>,
    #[serde(with = "serde_num")]
    pub total: Num,
    #[serde(with = "serde_num")]
    pub opt_welfare: Num,
    /// total / OPT
    #[serde(with = "serde_num")]
    pub nu: Num,
    #[serde(with = "serde_num")]
    pub a_total: Num,
    /// total ≤ A_T
    pub within_a_total: bool,
    /// Largest deviation factor once payments are added to the stayers'
    /// utilities.
    #[serde(with = "serde_extended")]
    pub post_max_factor: Extended,
}

/// Pays every player exactly its best-response gain.
pub fn payment_stabilize(
    game: &GameInstance,
    profile: &Profile,
    opt_welfare: &Num,
) -> Result<PaymentPlan> {
    game.check_profile(profile)?;
    if opt_welfare <= &Num::zero() {
        return arg("OPT welfare must be positive");
    }
    let report = deviation_report(game, profile);
    let payments: Vec<Num> = report
        .players
        .iter()
        .map(|d| {
            if d.utility > d.current {
                &d.utility - &d.current
            } else {
                Num::zero()
            }
        })
        .collect();
    let total = payments.iter().fold(Num::zero(), |acc, p| acc + p);
    let a_total = instance_stats(game).a_total;
    let post_max_factor = report
        .players
        .iter()
        .zip(&payments)
        .map(|(d, p)| improvement_factor(&d.utility, &(&d.current + p)))
        .max()
        .unwrap_or_else(Extended::one);
    Ok(PaymentPlan {
        best_responses: report.players.iter().map(|d| d.strategy).collect(),
        nu: &total / opt_welfare,
        within_a_total: total <= a_total,
        payments,
        total,
        opt_welfare: opt_welfare.clone(),
        a_total,
        post_max_factor,
    })
}

/// `Σ_i Σ_k u_i(k, s_{−i}) ≥ u(OPT)`, the uniform-deviation inequality
/// scaled by `m`.
pub fn semi_smoothness_holds<G: Game + ?Sized>(
    game: &G,
    profile: &Profile,
    opt_welfare: &Num,
) -> bool {
    let total = (0..game.players()).fold(Num::zero(), |acc, i| {
        (0..game.strategies()).fold(acc, |acc, k| acc + game.utility_if(profile, i, k))
    });
    &total >= opt_welfare
}

/// [`semi_smoothness_holds`] against the brute-force optimum.
pub fn semi_smoothness_check(
    game: &GameInstance,
    profile: &Profile,
    limit: u64,
    exec: Exec,
) -> Result<bool> {
    game.check_profile(profile)?;
    let (_, opt) = brute_force_optimum(game, limit, exec)?;
    Ok(semi_smoothness_holds(game, profile, &opt))
}

/// Minimum intrinsic preference: `m·A(s) ≥ A_T`.
pub fn mip_check(game: &GameInstance, profile: &Profile) -> bool {
    let m = Num::from_integer((game.m() as i64).into());
    m * game.intrinsic_welfare(profile) >= instance_stats(game).a_total
}
