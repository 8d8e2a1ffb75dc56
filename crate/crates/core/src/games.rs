//! Hidden-perturbation guessing games.
//!
//! A pluggable algorithm gets oracle access to a valuation that equals a
//! known base everywhere except at one hidden perturbing set, drawn
//! uniformly at random. The harness enforces a query budget, counts
//! successes across independent trials, and compares the empirical rate
//! against the analytic ceiling `s/x + 1/(x-s)`: with `s` queries against
//! `x` equally likely hidden sets, at most `s/x` trials can reveal the
//! hidden set, and blind guessing wins at most `1/(x-s)` of the rest.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instances::{subset_unrank, PerturbableFamily};
use crate::items::ItemSet;
use crate::valuation::demand_from_table;
use crate::{rational, Rational};

/// `s/x + 1/(x-s)`: the success ceiling for any `s`-query algorithm against
/// `x` uniformly hidden candidates.
pub fn theoretical_bound(s: u64, x: u64) -> Result<Rational> {
    if s >= x {
        return Err(Error::invalid(format!(
            "budget {s} must be smaller than the number of hidden candidates {x}"
        )));
    }
    let s = i64::try_from(s).map_err(|_| Error::Overflow("budget"))?;
    let x = i64::try_from(x).map_err(|_| Error::Overflow("candidate count"))?;
    Ok(rational(s, x) + rational(1, x - s))
}

/// Value-oracle access to the hidden valuation, budget-limited.
pub struct ValueOracle<'a> {
    table: &'a [u64],
    ground_size: usize,
    budget: usize,
    used: usize,
}

impl ValueOracle<'_> {
    pub fn query(&mut self, set: &ItemSet) -> Result<u64> {
        set.expect_ground(self.ground_size)?;
        if self.used >= self.budget {
            return Err(Error::BudgetExhausted);
        }
        self.used += 1;
        Ok(self.table[set.mask() as usize])
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

/// Demand-oracle access to the hidden valuation, budget-limited. Responses
/// are utility maximizers of the *hidden* valuation with the usual
/// lexicographic tie-break, so a query can differ from the base answer only
/// when the hidden set itself is demanded.
pub struct DemandOracle<'a> {
    table: &'a [u64],
    ground_size: usize,
    budget: usize,
    used: usize,
}

impl DemandOracle<'_> {
    pub fn query(&mut self, prices: &[Rational]) -> Result<ItemSet> {
        if prices.len() != self.ground_size {
            return Err(Error::LengthMismatch {
                expected: self.ground_size,
                got: prices.len(),
            });
        }
        if prices.iter().any(|p| p < &Rational::zero()) {
            return Err(Error::invalid("prices must be non-negative"));
        }
        if self.used >= self.budget {
            return Err(Error::BudgetExhausted);
        }
        self.used += 1;
        let mask = demand_from_table(self.table, self.ground_size, prices)?;
        ItemSet::from_mask(mask, self.ground_size)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

/// A guessing strategy. Implementations see the public family (the base
/// valuation is common knowledge; only the perturbed set is hidden), oracle
/// access, and a private random stream; they must return a guess for the
/// hidden set. Determinism given the seed keeps transcripts reproducible.
pub trait OracleAlgorithm {
    fn name(&self) -> &'static str;

    fn play_value(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut ValueOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet>;

    fn play_demand(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut DemandOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet>;
}

/// Which oracle a transcript was produced against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameKind {
    Value,
    Demand,
}

impl std::fmt::Display for GameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GameKind::Value => write!(f, "value"),
            GameKind::Demand => write!(f, "demand"),
        }
    }
}

/// Full record of a game run: reproducible from `(seed, parameters)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTranscript {
    pub game: GameKind,
    pub algorithm: String,
    pub m: usize,
    /// Number of perturbing sets the hidden set is drawn from.
    pub x: u64,
    pub budget: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials where the algorithm tried to exceed its budget; counted as
    /// failures.
    pub voided: usize,
    /// Queries actually answered per trial (each at most `budget`).
    pub query_counts: Vec<usize>,
    /// Hidden ranks per trial, for uniformity audits.
    pub hidden_ranks: Vec<u64>,
    pub seed: u64,
    /// `theoretical_bound(budget, x)`.
    pub bound: Rational,
}

impl GameTranscript {
    pub fn empirical_rate(&self) -> Rational {
        rational(self.successes as i64, self.trials as i64)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives independent per-trial seed streams from the run seed.
fn trial_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(stream)))
}

struct TrialSetup {
    hidden: ItemSet,
    rank: u64,
    table: Vec<u64>,
    alg_rng: ChaCha8Rng,
}

fn prepare_trial(
    fam: &PerturbableFamily,
    base_table: &[u64],
    seed: u64,
    trial: usize,
) -> Result<TrialSetup> {
    let mut hidden_rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, 2 * trial as u64));
    let rank = hidden_rng.gen_range(1..=fam.x);
    let hidden = subset_unrank(fam.m, rank)?;
    let mut table = base_table.to_vec();
    let idx = hidden.mask() as usize;
    table[idx] = table[idx]
        .checked_sub(1)
        .ok_or(Error::Overflow("perturbation of a zero base value"))?;
    // The hidden valuation must agree with the base everywhere except the
    // one perturbed set.
    debug_assert_eq!(
        base_table
            .iter()
            .zip(&table)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, _)| i),
        Some(idx)
    );
    assert_eq!(
        base_table.iter().zip(&table).filter(|(a, b)| a != b).count(),
        1,
        "perturbation must change exactly one set"
    );
    let alg_rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, 2 * trial as u64 + 1));
    Ok(TrialSetup {
        hidden,
        rank,
        table,
        alg_rng,
    })
}

fn run_game(
    kind: GameKind,
    alg: &dyn OracleAlgorithm,
    fam: &PerturbableFamily,
    budget: usize,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<GameTranscript> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    // With budget >= x a full scan determines the hidden set, so the ceiling
    // is plain certainty and the analytic formula no longer applies.
    let bound = if (budget as u64) < fam.x {
        theoretical_bound(budget as u64, fam.x)?
    } else {
        Rational::one()
    };
    let base_table = fam.base.value_table(cap)?;
    let mut transcript = GameTranscript {
        game: kind,
        algorithm: alg.name().to_string(),
        m: fam.m,
        x: fam.x,
        budget,
        trials,
        successes: 0,
        voided: 0,
        query_counts: Vec::with_capacity(trials),
        hidden_ranks: Vec::with_capacity(trials),
        seed,
        bound,
    };
    for t in 0..trials {
        let mut setup = prepare_trial(fam, &base_table, seed, t)?;
        let outcome = match kind {
            GameKind::Value => {
                let mut oracle = ValueOracle {
                    table: &setup.table,
                    ground_size: fam.m,
                    budget,
                    used: 0,
                };
                let played = alg.play_value(fam, &mut oracle, &mut setup.alg_rng);
                (played, oracle.used)
            }
            GameKind::Demand => {
                let mut oracle = DemandOracle {
                    table: &setup.table,
                    ground_size: fam.m,
                    budget,
                    used: 0,
                };
                let played = alg.play_demand(fam, &mut oracle, &mut setup.alg_rng);
                (played, oracle.used)
            }
        };
        transcript.hidden_ranks.push(setup.rank);
        match outcome {
            (Ok(guess), used) => {
                transcript.query_counts.push(used);
                if guess == setup.hidden {
                    transcript.successes += 1;
                }
            }
            (Err(Error::BudgetExhausted), used) => {
                transcript.query_counts.push(used);
                transcript.voided += 1;
            }
            (Err(other), _) => return Err(other),
        }
    }
    Ok(transcript)
}

/// Plays `trials` independent value-oracle rounds against hidden
/// perturbations of `fam`.
pub fn run_value_game(
    alg: &dyn OracleAlgorithm,
    fam: &PerturbableFamily,
    budget: usize,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<GameTranscript> {
    run_game(GameKind::Value, alg, fam, budget, trials, seed, cap)
}

/// Plays `trials` independent demand-oracle rounds against hidden
/// perturbations of `fam`.
pub fn run_demand_game(
    alg: &dyn OracleAlgorithm,
    fam: &PerturbableFamily,
    budget: usize,
    trials: usize,
    seed: u64,
    cap: usize,
) -> Result<GameTranscript> {
    run_game(GameKind::Demand, alg, fam, budget, trials, seed, cap)
}

/// Chi-squared statistic of `counts` against the uniform distribution.
pub fn chi_squared_statistic(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return 0.0;
    }
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Tallies hidden-rank draws into per-rank counts (ranks are 1-based).
pub fn rank_counts(transcript: &GameTranscript) -> Vec<u64> {
    let mut counts = vec![0u64; transcript.x as usize];
    for &rank in &transcript.hidden_ranks {
        counts[(rank - 1) as usize] += 1;
    }
    counts
}

/// Queries nothing and always guesses the first perturbing set.
pub struct ZeroQueryGuesser;

impl OracleAlgorithm for ZeroQueryGuesser {
    fn name(&self) -> &'static str {
        "zero-query-guesser"
    }

    fn play_value(
        &self,
        fam: &PerturbableFamily,
        _oracle: &mut ValueOracle<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        subset_unrank(fam.m, 1)
    }

    fn play_demand(
        &self,
        fam: &PerturbableFamily,
        _oracle: &mut DemandOracle<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        subset_unrank(fam.m, 1)
    }
}

/// Burns its budget on uninformative queries — singleton values, or demand
/// at all-zero prices — then guesses uniformly at random.
pub struct RandomSingletonProber;

impl OracleAlgorithm for RandomSingletonProber {
    fn name(&self) -> &'static str {
        "random-singleton-prober"
    }

    fn play_value(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut ValueOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        for _ in 0..oracle.budget().min(fam.m) {
            let item = rng.gen_range(0..fam.m);
            oracle.query(&ItemSet::singleton(item, fam.m)?)?;
        }
        subset_unrank(fam.m, rng.gen_range(1..=fam.x))
    }

    fn play_demand(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut DemandOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        let zeros = vec![Rational::zero(); fam.m];
        for _ in 0..oracle.budget() {
            oracle.query(&zeros)?;
        }
        subset_unrank(fam.m, rng.gen_range(1..=fam.x))
    }
}

/// Scans perturbing sets in rank order until the budget runs out, guessing
/// the detected set on a hit; otherwise guesses uniformly among the
/// unscanned candidates (deterministically, if only one remains).
///
/// Value probes compare the response at a candidate against the known base
/// value. Demand probes price a candidate's items at 0 and everything else
/// at 1/2: under the base valuation the candidate is the unique utility
/// maximizer, so any other response pins the hidden set to that candidate.
pub struct ExhaustiveScanner;

impl ExhaustiveScanner {
    fn fallback_guess(
        fam: &PerturbableFamily,
        scanned: u64,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        let remaining = fam.x - scanned;
        match remaining {
            0 => subset_unrank(fam.m, 1),
            1 => subset_unrank(fam.m, fam.x),
            r => subset_unrank(fam.m, scanned + 1 + rng.gen_range(0..r)),
        }
    }
}

impl OracleAlgorithm for ExhaustiveScanner {
    fn name(&self) -> &'static str {
        "exhaustive-scanner"
    }

    fn play_value(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut ValueOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        let scan = fam.x.min(oracle.budget() as u64);
        for rank in 1..=scan {
            let candidate = subset_unrank(fam.m, rank)?;
            let response = oracle.query(&candidate)?;
            if response != fam.base.value(&candidate)? {
                return Ok(candidate);
            }
        }
        Self::fallback_guess(fam, scan, rng)
    }

    fn play_demand(
        &self,
        fam: &PerturbableFamily,
        oracle: &mut DemandOracle<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<ItemSet> {
        let scan = fam.x.min(oracle.budget() as u64);
        for rank in 1..=scan {
            let candidate = subset_unrank(fam.m, rank)?;
            let prices: Vec<Rational> = (0..fam.m)
                .map(|i| {
                    if candidate.contains(i) {
                        Rational::zero()
                    } else {
                        rational(1, 2)
                    }
                })
                .collect();
            if oracle.query(&prices)? != candidate {
                return Ok(candidate);
            }
        }
        Self::fallback_guess(fam, scan, rng)
    }
}

/// The shipped strategies, spanning the no-information and full-information
/// regimes of the bound.
pub fn builtin_algorithms() -> Vec<Box<dyn OracleAlgorithm>> {
    vec![
        Box::new(ZeroQueryGuesser),
        Box::new(RandomSingletonProber),
        Box::new(ExhaustiveScanner),
    ]
}

/// Looks up a built-in strategy by name (long form or short alias).
pub fn builtin_algorithm(name: &str) -> Result<Box<dyn OracleAlgorithm>> {
    match name {
        "zero" | "zero-query-guesser" => Ok(Box::new(ZeroQueryGuesser)),
        "prober" | "random-singleton-prober" => Ok(Box::new(RandomSingletonProber)),
        "scanner" | "exhaustive-scanner" => Ok(Box::new(ExhaustiveScanner)),
        other => Err(Error::invalid(format!(
            "unknown algorithm {other:?}; expected zero, prober, or scanner"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::boxs_family;
    use num_traits::ToPrimitive;

    fn assert_within_3_sigma(transcript: &GameTranscript, p: f64) {
        let rate = transcript.successes as f64 / transcript.trials as f64;
        let sigma = (p * (1.0 - p) / transcript.trials as f64).sqrt();
        assert!(
            (rate - p).abs() <= 3.0 * sigma,
            "rate {rate} not within 3 sigma of {p} (sigma {sigma})"
        );
    }

    fn assert_below_bound_plus_3_sigma(transcript: &GameTranscript) {
        let bound = transcript.bound.to_f64().unwrap();
        let rate = transcript.successes as f64 / transcript.trials as f64;
        let sigma = (bound * (1.0 - bound) / transcript.trials as f64).sqrt();
        assert!(
            rate <= bound + 3.0 * sigma,
            "rate {rate} exceeds bound {bound} + 3 sigma ({sigma})"
        );
    }

    #[test]
    fn bound_frozen_points() {
        assert_eq!(theoretical_bound(0, 70).unwrap(), rational(1, 70));
        assert_eq!(theoretical_bound(10, 70).unwrap(), rational(67, 420));
        assert!(theoretical_bound(70, 70).is_err());
        assert!(theoretical_bound(80, 70).is_err());
    }

    #[test]
    fn bound_stays_below_target_rate_at_the_prescribed_budget() {
        // At budget s = (qx-1)/2 the ceiling is at most q. Sample exact
        // rational q = a/b and compatible x with qx an odd integer.
        let mut checked = 0;
        for a in 1i64..5 {
            for b in (a + 1)..8 {
                for x in 3i64..70 {
                    if (a * x) % b != 0 || (a * x / b) % 2 != 1 {
                        continue;
                    }
                    let s = (a * x / b - 1) / 2;
                    if s < 0 || s >= x {
                        continue;
                    }
                    let bound = theoretical_bound(s as u64, x as u64).unwrap();
                    assert!(
                        bound <= rational(a, b),
                        "bound {bound} exceeds q={a}/{b} at x={x}, s={s}"
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn zero_query_guesser_wins_one_in_x_trials() {
        let fam = boxs_family(4).unwrap();
        let t = run_value_game(&ZeroQueryGuesser, &fam, 0, 10_000, 42, 16).unwrap();
        assert_within_3_sigma(&t, 1.0 / 6.0);
        assert!(t.query_counts.iter().all(|&c| c == 0));
        let t = run_demand_game(&ZeroQueryGuesser, &fam, 0, 10_000, 43, 16).unwrap();
        assert_within_3_sigma(&t, 1.0 / 6.0);
    }

    #[test]
    fn scanner_with_budget_x_wins_every_trial() {
        let fam = boxs_family(4).unwrap();
        let v = run_value_game(&ExhaustiveScanner, &fam, 6, 300, 5, 16).unwrap();
        assert_eq!(v.successes, 300);
        assert_eq!(v.voided, 0);
        assert!(v.query_counts.iter().all(|&c| c <= 6));
        let d = run_demand_game(&ExhaustiveScanner, &fam, 6, 300, 5, 16).unwrap();
        assert_eq!(d.successes, 300);
    }

    #[test]
    fn scanner_with_budget_x_minus_one_still_wins_by_elimination() {
        let fam = boxs_family(4).unwrap();
        let v = run_value_game(&ExhaustiveScanner, &fam, 5, 200, 11, 16).unwrap();
        assert_eq!(v.successes, 200);
        let d = run_demand_game(&ExhaustiveScanner, &fam, 5, 200, 12, 16).unwrap();
        assert_eq!(d.successes, 200);
    }

    #[test]
    fn scanner_stays_under_the_ceiling_when_budget_limited() {
        let fam = boxs_family(8).unwrap();
        let v = run_value_game(&ExhaustiveScanner, &fam, 10, 4000, 17, 16).unwrap();
        assert_below_bound_plus_3_sigma(&v);
        // The scanner nearly saturates the ceiling: (s+1)/x on average.
        assert!(v.successes as f64 / v.trials as f64 >= 0.5 * 11.0 / 70.0);
        let d = run_demand_game(&ExhaustiveScanner, &fam, 10, 4000, 18, 16).unwrap();
        assert_below_bound_plus_3_sigma(&d);
    }

    #[test]
    fn zero_price_probing_learns_nothing() {
        let fam = boxs_family(4).unwrap();
        let t = run_demand_game(&RandomSingletonProber, &fam, 4, 10_000, 23, 16).unwrap();
        assert_within_3_sigma(&t, 1.0 / 6.0);
        assert!(t.query_counts.iter().all(|&c| c == 4));
    }

    #[test]
    fn singleton_probing_learns_nothing() {
        let fam = boxs_family(4).unwrap();
        let t = run_value_game(&RandomSingletonProber, &fam, 4, 10_000, 29, 16).unwrap();
        assert_within_3_sigma(&t, 1.0 / 6.0);
    }

    struct OverQuerier;

    impl OracleAlgorithm for OverQuerier {
        fn name(&self) -> &'static str {
            "over-querier"
        }

        fn play_value(
            &self,
            fam: &PerturbableFamily,
            oracle: &mut ValueOracle<'_>,
            _rng: &mut ChaCha8Rng,
        ) -> Result<ItemSet> {
            loop {
                oracle.query(&ItemSet::full(fam.m))?;
            }
        }

        fn play_demand(
            &self,
            fam: &PerturbableFamily,
            oracle: &mut DemandOracle<'_>,
            _rng: &mut ChaCha8Rng,
        ) -> Result<ItemSet> {
            let zeros = vec![Rational::zero(); fam.m];
            loop {
                oracle.query(&zeros)?;
            }
        }
    }

    #[test]
    fn budget_overruns_void_the_trial() {
        let fam = boxs_family(4).unwrap();
        let v = run_value_game(&OverQuerier, &fam, 3, 5, 1, 16).unwrap();
        assert_eq!(v.voided, 5);
        assert_eq!(v.successes, 0);
        assert!(v.query_counts.iter().all(|&c| c == 3));
        let d = run_demand_game(&OverQuerier, &fam, 2, 4, 1, 16).unwrap();
        assert_eq!(d.voided, 4);
        assert!(d.query_counts.iter().all(|&c| c == 2));
    }

    #[test]
    fn transcripts_are_reproducible_from_the_seed() {
        let fam = boxs_family(6).unwrap();
        let a = run_value_game(&RandomSingletonProber, &fam, 3, 64, 77, 16).unwrap();
        let b = run_value_game(&RandomSingletonProber, &fam, 3, 64, 77, 16).unwrap();
        assert_eq!(a, b);
        let c = run_value_game(&RandomSingletonProber, &fam, 3, 64, 78, 16).unwrap();
        assert_ne!(a.hidden_ranks, c.hidden_ranks);
    }

    #[test]
    fn hidden_draws_pass_a_chi_squared_uniformity_check() {
        let fam = boxs_family(8).unwrap();
        let t = run_value_game(&ZeroQueryGuesser, &fam, 0, 7000, 7, 16).unwrap();
        let counts = rank_counts(&t);
        assert_eq!(counts.iter().sum::<u64>(), 7000);
        assert!(counts.iter().all(|&c| c > 0));
        let stat = chi_squared_statistic(&counts);
        // 69 degrees of freedom; the 0.1% critical value is about 111.
        assert!(stat < 111.0, "chi-squared statistic {stat} too large");
    }

    #[test]
    fn zero_trials_rejected() {
        let fam = boxs_family(2).unwrap();
        assert!(run_value_game(&ZeroQueryGuesser, &fam, 0, 0, 1, 16).is_err());
    }

    #[test]
    fn tiny_family_scanner_edge_case() {
        // m=2 has x=2 hidden candidates; one query plus elimination wins.
        let fam = boxs_family(2).unwrap();
        let v = run_value_game(&ExhaustiveScanner, &fam, 1, 50, 3, 16).unwrap();
        assert_eq!(v.successes, 50);
        let d = run_demand_game(&ExhaustiveScanner, &fam, 1, 50, 4, 16).unwrap();
        assert_eq!(d.successes, 50);
    }

    #[test]
    fn builtin_lookup_accepts_aliases() {
        assert_eq!(builtin_algorithm("zero").unwrap().name(), "zero-query-guesser");
        assert_eq!(
            builtin_algorithm("exhaustive-scanner").unwrap().name(),
            "exhaustive-scanner"
        );
        assert!(builtin_algorithm("nope").is_err());
        assert_eq!(builtin_algorithms().len(), 3);
    }
}
