use num_traits::Zero;

use crate::numeric::Num;
use crate::profile::Profile;

/// A finite game in which every player picks one of `strategies()` options
/// and utilities depend only on who shares a strategy.
///
/// Best responses, deviation reports, dynamics and exhaustive checks are
/// written once against this trait.
pub trait Game: Sync {
    fn players(&self) -> usize;

    fn strategies(&self) -> usize;

    /// `u_i(k, s_{-i})`: the utility `player` would get on `strategy` with
    /// everyone else as in `profile`.
    fn utility_if(&self, profile: &Profile, player: usize, strategy: usize) -> Num;

    fn utility(&self, profile: &Profile, player: usize) -> Num {
        self.utility_if(profile, player, profile[player])
    }

    fn social_welfare(&self, profile: &Profile) -> Num {
        (0..self.players()).fold(Num::zero(), |acc, i| acc + self.utility(profile, i))
    }

    /// Whether `profile` is an allowed state. Only games with forbidden
    /// co-locations override this.
    fn is_feasible(&self, _profile: &Profile) -> bool {
        true
    }
}
