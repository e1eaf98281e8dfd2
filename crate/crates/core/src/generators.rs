//! Instance generators: the named constructions plus seeded random families.
//!
//! Random families draw from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
//! order, so an instance is a pure function of its parameters and seed.
//! A rational weight is drawn as `p/q` with `p` uniform in `0..=max_num`
//! and then `q` uniform in `1..=max_den` (not reduced before use).

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Result};
use crate::generalized::{
    serialize_generalized, serialize_hypergraph, serialize_omega, GeneralizedGame, Hyperedge,
    HypergraphGame, Label, OmegaGame, TableEntry,
};
use crate::io::serialize_instance;
use crate::model::{Edge, GameInstance};
use crate::numeric::{int, sqrt2_approx, Num};

/// Bounds for random rational weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightRange {
    pub max_num: u32,
    pub max_den: u32,
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange {
            max_num: 10,
            max_den: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    CyclicTriangle {
        r: Num,
    },
    HubStar {
        m: usize,
        r: Num,
        eps: Num,
    },
    SymmetricPosTight {
        m: usize,
        r: Num,
        eps: Num,
    },
    TriangleC {
        c: Num,
    },
    /// Each pair gets an edge with probability ½. With `finite_gamma`
    /// shares lie strictly inside (0, 1).
    Random {
        n: usize,
        m: usize,
        weights: WeightRange,
        finite_gamma: bool,
        seed: u64,
    },
    /// Shares from influences `γ_i` uniform in `1..=gamma_max`.
    RandomCc {
        n: usize,
        m: usize,
        gamma_max: u32,
        seed: u64,
    },
    RandomSymmetric {
        n: usize,
        m: usize,
        seed: u64,
    },
    RandomSupermodular {
        n: usize,
        m: usize,
        r: Num,
        seed: u64,
    },
    RandomOmega {
        n: usize,
        m: usize,
        omega: Num,
        seed: u64,
    },
    RandomHypergraphCc {
        n: usize,
        m: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Instance(GameInstance),
    Generalized(GeneralizedGame),
    Hypergraph(HypergraphGame),
    Omega(OmegaGame),
}

impl Generated {
    pub fn to_json(&self) -> String {
        match self {
            Generated::Instance(g) => serialize_instance(g),
            Generated::Generalized(g) => serialize_generalized(g),
            Generated::Hypergraph(g) => serialize_hypergraph(g),
            Generated::Omega(g) => serialize_omega(g),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    use GeneratorSpec::*;
    Ok(match spec {
        CyclicTriangle { r } => Generated::Instance(cyclic_triangle(r)?),
        HubStar { m, r, eps } => Generated::Instance(hub_star(*m, r, eps)?),
        SymmetricPosTight { m, r, eps } => Generated::Instance(symmetric_pos_tight(*m, r, eps)?),
        TriangleC { c } => Generated::Generalized(triangle_c(c)?),
        Random {
            n,
            m,
            weights,
            finite_gamma,
            seed,
        } => Generated::Instance(random(*n, *m, *weights, *finite_gamma, *seed)?),
        RandomCc {
            n,
            m,
            gamma_max,
            seed,
        } => Generated::Instance(random_cc(*n, *m, *gamma_max, *seed)?.0),
        RandomSymmetric { n, m, seed } => Generated::Instance(random_symmetric(*n, *m, *seed)?),
        RandomSupermodular { n, m, r, seed } => {
            Generated::Generalized(random_supermodular(*n, *m, r, *seed)?)
        }
        RandomOmega { n, m, omega, seed } => Generated::Omega(random_omega(*n, *m, omega, *seed)?),
        RandomHypergraphCc { n, m, seed } => {
            Generated::Hypergraph(random_hypergraph_cc(*n, *m, *seed)?.0)
        }
    })
}

fn positive(name: &str, x: &Num) -> Result<()> {
    if x <= &Num::zero() {
        return arg(format!("{name} must be positive"));
    }
    Ok(())
}

fn at_least_one(name: &str, x: &Num) -> Result<()> {
    if x < &Num::one() {
        return arg(format!("{name} must be at least 1"));
    }
    Ok(())
}

/// Three players on a directed triangle over three strategies. Player `j`
/// values strategy `j` at `√2·r` (rational approximation) and strategy
/// `j+1` at `r`; it gains `r` from player `j+1` and gives nothing back.
pub fn cyclic_triangle(r: &Num) -> Result<GameInstance> {
    positive("r", r)?;
    let high = sqrt2_approx() * r;
    let intrinsic = (0..3)
        .map(|j| {
            let mut row = vec![Num::zero(); 3];
            row[j] = high.clone();
            row[(j + 1) % 3] = r.clone();
            row
        })
        .collect();
    let edges = (0..3)
        .map(|j| Edge::new(j, (j + 1) % 3, r.clone(), Num::one()))
        .collect();
    GameInstance::new(3, intrinsic, edges)
}

/// `m` players and strategies. Player 0 values every strategy at `r` and
/// gains `r` per co-located player; player `j ≥ 1` values strategy `j` at
/// `2ε` and gains `ε` next to player 0.
pub fn hub_star(m: usize, r: &Num, eps: &Num) -> Result<GameInstance> {
    if m < 2 {
        return arg("m must be at least 2");
    }
    at_least_one("r", r)?;
    positive("eps", eps)?;
    let mut intrinsic = vec![vec![r.clone(); m]];
    for j in 1..m {
        let mut row = vec![Num::zero(); m];
        row[j] = eps * int(2);
        intrinsic.push(row);
    }
    let weight = r + eps;
    let share = r / &weight;
    let edges = (1..m)
        .map(|j| Edge::new(0, j, weight.clone(), share.clone()))
        .collect();
    GameInstance::new(m, intrinsic, edges)
}

/// `m` players and strategies; player `i` values strategy `i` at `r + ε`.
/// Player 0 is tied to every other player by an edge of weight `2r` split
/// equally.
pub fn symmetric_pos_tight(m: usize, r: &Num, eps: &Num) -> Result<GameInstance> {
    if m < 2 {
        return arg("m must be at least 2");
    }
    at_least_one("r", r)?;
    positive("eps", eps)?;
    let intrinsic = (0..m)
        .map(|i| {
            let mut row = vec![Num::zero(); m];
            row[i] = r + eps;
            row
        })
        .collect();
    let edges = (1..m).map(|i| Edge::symmetric(0, i, r * int(2))).collect();
    GameInstance::new(m, intrinsic, edges)
}

/// Three players, three strategies, utilities in powers of `c`.
///
/// Seen from player `p`, strategy `p` is "1", `p+1` is "2", `p+2` is "3";
/// `j = p+1` and `k = p+2` (mod 3). Entries are keyed by which of `j`, `k`
/// are co-located with `p`:
///
/// | | alone | +j | +k | +j+k |
/// |---|---|---|---|---|
/// | 1 | c² | c³ | c² | c³ |
/// | 2 | c | c³ | c | c³ |
/// | 3 | 0 | 0 | 0 | c |
pub fn triangle_c(c: &Num) -> Result<GeneralizedGame> {
    at_least_one("c", c)?;
    let c2 = c * c;
    let c3 = &c2 * c;
    let zero = Num::zero();
    // rows: relative strategy; columns: alone, +j, +k, +j+k
    let table = [
        [c2.clone(), c3.clone(), c2.clone(), c3.clone()],
        [c.clone(), c3.clone(), c.clone(), c3.clone()],
        [zero.clone(), zero.clone(), zero, c.clone()],
    ];
    let mut entries = Vec::new();
    for p in 0..3 {
        let (j, k) = ((p + 1) % 3, (p + 2) % 3);
        for (rel, row) in table.iter().enumerate() {
            for (col, utility) in row.iter().enumerate() {
                let mut subset = vec![p];
                if col & 1 == 1 {
                    subset.push(j);
                }
                if col & 2 == 2 {
                    subset.push(k);
                }
                subset.sort_unstable();
                entries.push(TableEntry {
                    player: p,
                    strategy: (p + rel) % 3,
                    subset,
                    utility: utility.clone(),
                });
            }
        }
    }
    GeneralizedGame::new(3, 3, entries, None)
}

fn check_size(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return arg("n and m must be positive");
    }
    Ok(())
}

fn draw(rng: &mut ChaCha8Rng, range: WeightRange) -> Num {
    let p = rng.random_range(0..=range.max_num);
    let q = rng.random_range(1..=range.max_den.max(1));
    Num::new(p.into(), q.into())
}

fn draw_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize, range: WeightRange) -> Vec<Vec<Num>> {
    (0..n)
        .map(|_| (0..m).map(|_| draw(rng, range)).collect())
        .collect()
}

/// Intrinsic matrix row by row, then for each pair `i < j` in order: a coin
/// for presence, the weight, then the share.
pub fn random(
    n: usize,
    m: usize,
    weights: WeightRange,
    finite_gamma: bool,
    seed: u64,
) -> Result<GameInstance> {
    check_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intrinsic = draw_matrix(&mut rng, n, m, weights);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !rng.random_bool(0.5) {
                continue;
            }
            let w = draw(&mut rng, weights);
            let share = if finite_gamma {
                let q: i64 = rng.random_range(2..=6);
                Num::new(rng.random_range(1..q).into(), q.into())
            } else {
                let q: i64 = rng.random_range(1..=6);
                Num::new(rng.random_range(0..=q).into(), q.into())
            };
            edges.push(Edge::new(i, j, w, share));
        }
    }
    GameInstance::new(m, intrinsic, edges)
}

/// Draws `γ` first, then proceeds as [`random`] with CC shares. Returns the
/// instance and the generating `γ`.
pub fn random_cc(
    n: usize,
    m: usize,
    gamma_max: u32,
    seed: u64,
) -> Result<(GameInstance, Vec<Num>)> {
    check_size(n, m)?;
    if gamma_max == 0 {
        return arg("gamma_max must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma: Vec<Num> = (0..n)
        .map(|_| int(rng.random_range(1..=gamma_max) as i64))
        .collect();
    let range = WeightRange::default();
    let intrinsic = draw_matrix(&mut rng, n, m, range);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                let share = &gamma[i] / (&gamma[i] + &gamma[j]);
                edges.push(Edge::new(i, j, draw(&mut rng, range), share));
            }
        }
    }
    Ok((GameInstance::new(m, intrinsic, edges)?, gamma))
}

/// As [`random`] with every share ½.
pub fn random_symmetric(n: usize, m: usize, seed: u64) -> Result<GameInstance> {
    check_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = WeightRange::default();
    let intrinsic = draw_matrix(&mut rng, n, m, range);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.5) {
                edges.push(Edge::symmetric(i, j, draw(&mut rng, range)));
            }
        }
    }
    GameInstance::new(m, intrinsic, edges)
}

/// Full tables `u_i(k, S) = w_i^k + φ(|A|)·Σ_{j∈A} a_ij` with `A = S∖{i}`,
/// `φ(1) = 1` and `φ = r` beyond. The pair values `a_ij` do not depend on
/// the strategy, so the `r` bound also holds across strategies; `r` is
/// declared on the game.
pub fn random_supermodular(n: usize, m: usize, r: &Num, seed: u64) -> Result<GeneralizedGame> {
    check_size(n, m)?;
    at_least_one("r", r)?;
    if n > 12 {
        return arg("random table games are limited to 12 players");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = WeightRange::default();
    let intrinsic = draw_matrix(&mut rng, n, m, range);
    let pair = draw_matrix(&mut rng, n, n, range);
    let mut entries = Vec::new();
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for bits in 0u64..(1 << others.len()) {
            let chosen: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|(b, _)| bits >> b & 1 == 1)
                .map(|(_, &j)| j)
                .collect();
            let sum = chosen.iter().fold(Num::zero(), |acc, &j| acc + &pair[i][j]);
            let boost = if chosen.len() >= 2 { r * sum } else { sum };
            let mut subset = chosen;
            subset.push(i);
            subset.sort_unstable();
            for (k, w) in intrinsic[i].iter().enumerate() {
                entries.push(TableEntry {
                    player: i,
                    strategy: k,
                    subset: subset.clone(),
                    utility: w + &boost,
                });
            }
        }
    }
    GeneralizedGame::new(n, m, entries, Some(r.clone()))
}

/// `a_i` in `1..=4`, `b_i` in `1..=3`. A hidden colouring into `m` classes
/// keeps the game feasible: only differently coloured pairs may conflict
/// (probability 1/5); other pairs are `One` or `Zero` with equal odds.
pub fn random_omega(n: usize, m: usize, omega: &Num, seed: u64) -> Result<OmegaGame> {
    check_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<Num> = (0..n).map(|_| int(rng.random_range(1..=4))).collect();
    let b: Vec<Num> = (0..n).map(|_| int(rng.random_range(1..=3))).collect();
    let colour: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let mut labels = vec![vec![Label::Zero; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let label = if colour[i] != colour[j] && rng.random_bool(0.2) {
                Label::Conflict
            } else if rng.random_bool(0.5) {
                Label::One
            } else {
                Label::Zero
            };
            labels[i][j] = label;
            labels[j][i] = label;
        }
    }
    OmegaGame::new(m, a, b, labels, omega.clone())
}

/// `γ_i` in `1..=4`; an anchored singleton per (player, strategy) carrying
/// the intrinsic weight; then `n` hyperedges of 2 or 3 distinct players,
/// anchored with probability 1/3, with CC shares. Returns the generating γ.
pub fn random_hypergraph_cc(n: usize, m: usize, seed: u64) -> Result<(HypergraphGame, Vec<Num>)> {
    check_size(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = WeightRange::default();
    let gamma: Vec<Num> = (0..n).map(|_| int(rng.random_range(1..=4))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for k in 0..m {
            edges.push(Hyperedge {
                players: vec![i],
                anchor: Some(k),
                weight: draw(&mut rng, range),
                shares: vec![Num::one()],
            });
        }
    }
    if n >= 2 {
        for _ in 0..n {
            let size = rng.random_range(2..=n.min(3));
            let mut players: Vec<usize> = Vec::with_capacity(size);
            while players.len() < size {
                let j = rng.random_range(0..n);
                if !players.contains(&j) {
                    players.push(j);
                }
            }
            let anchor = rng.random_bool(1.0 / 3.0).then(|| rng.random_range(0..m));
            let total = players.iter().fold(Num::zero(), |acc, &j| acc + &gamma[j]);
            let shares = players.iter().map(|&j| &gamma[j] / &total).collect();
            edges.push(Hyperedge {
                players,
                anchor,
                weight: draw(&mut rng, range),
                shares,
            });
        }
    }
    Ok((HypergraphGame::new(n, m, edges)?, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Game;
    use crate::numeric::rat;
    use crate::profile::Profile;

    #[test]
    fn cyclic_triangle_shape() {
        let g = cyclic_triangle(&int(1)).unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(g.intrinsic()[1], vec![int(0), sqrt2_approx(), int(1)]);
        assert!(cyclic_triangle(&int(0)).is_err());
    }

    #[test]
    fn prop5_opt_value() {
        let (r, eps) = (int(1), rat(1, 100));
        let g = hub_star(3, &r, &eps).unwrap();
        assert_eq!(
            g.social_welfare(&Profile::uniform(3, 0)),
            int(3) * &r + int(2) * &eps
        );
        assert!(hub_star(3, &r, &int(0)).is_err());
    }

    #[test]
    fn pos_tight_values() {
        let (r, eps) = (int(1), rat(1, 10));
        let g = symmetric_pos_tight(4, &r, &eps).unwrap();
        assert_eq!(
            g.social_welfare(&Profile::uniform(4, 0)),
            int(7) * &r + &eps
        );
        let spread = Profile::new(vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(g.social_welfare(&spread), int(4) * (&r + &eps));
    }

    #[test]
    fn triangle_entries() {
        let g = triangle_c(&int(2)).unwrap();
        g.check_complete().unwrap();
        assert_eq!(g.lookup(0, 0, &[0]), Some(&int(4)));
        assert_eq!(g.lookup(0, 0, &[0, 1]), Some(&int(8)));
        assert_eq!(g.lookup(0, 1, &[0]), Some(&int(2)));
        assert_eq!(g.lookup(1, 1, &[1, 2]), Some(&int(8)));
        assert!(triangle_c(&rat(1, 2)).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let spec = GeneratorSpec::Random {
            n: 5,
            m: 3,
            weights: WeightRange::default(),
            finite_gamma: false,
            seed: 42,
        };
        assert_eq!(
            generate(&spec).unwrap().to_json(),
            generate(&spec).unwrap().to_json()
        );
        let other = GeneratorSpec::Random {
            n: 5,
            m: 3,
            weights: WeightRange::default(),
            finite_gamma: false,
            seed: 43,
        };
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn finite_gamma_shares_are_interior() {
        for seed in 0..20 {
            let g = random(6, 2, WeightRange::default(), true, seed).unwrap();
            assert!(g
                .edges()
                .iter()
                .all(|e| e.share_ij > Num::zero() && e.share_ij < Num::one()));
        }
    }

    #[test]
    fn omega_is_feasible_under_hidden_colouring() {
        for seed in 0..20 {
            let g = random_omega(5, 2, &rat(1, 2), seed).unwrap();
            let n = g.n();
            let feasible = crate::profile::ProfileSpace::new(n, 2, 1000)
                .unwrap()
                .iter()
                .any(|p| g.is_feasible(&p));
            assert!(feasible);
        }
    }
}
