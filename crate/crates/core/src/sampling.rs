//! Seeded generation of agent populations.
//!
//! Every agent draws its identity coordinates, then its outreach, then its
//! capacity, in id order. With [`RngSeed::rng`] (ChaCha8) the same spec and
//! seed always yield the same population.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::{Agent, IdentitySpace};

/// Distribution parameters for one population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub n: usize,
    /// Probability of a minority coordinate (1) on each identity dimension.
    pub p: f64,
    /// Probability that an agent can reach one unit of distance.
    pub q: f64,
    pub tc_mu: f64,
    pub tc_sigma2: f64,
    pub space: IdentitySpace,
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        let errors = self.problems("");
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errors))
        }
    }

    /// Human-readable list of invalid fields, each prefixed with `prefix`.
    pub(crate) fn problems(&self, prefix: &str) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(format!("{prefix}n = {} must be at least 2", self.n));
        }
        if !(0.0..=1.0).contains(&self.p) {
            out.push(format!("{prefix}p = {} must lie in [0, 1]", self.p));
        }
        if !(0.0..=1.0).contains(&self.q) {
            out.push(format!("{prefix}q = {} must lie in [0, 1]", self.q));
        }
        if !(self.tc_mu.is_finite() && self.tc_mu > 0.0) {
            out.push(format!("{prefix}tc_mu = {} must be positive", self.tc_mu));
        }
        if !(self.tc_sigma2.is_finite() && self.tc_sigma2 >= 0.0) {
            out.push(format!(
                "{prefix}tc_sigma2 = {} must be non-negative",
                self.tc_sigma2
            ));
        }
        out
    }

    fn samplers(&self) -> Result<Samplers> {
        self.validate()?;
        Ok(Samplers {
            si: Bernoulli::new(self.p).expect("validated"),
            to: Bernoulli::new(self.q).expect("validated"),
            tc: Normal::new(self.tc_mu, self.tc_sigma2.sqrt()).expect("validated"),
        })
    }
}

struct Samplers {
    si: Bernoulli,
    to: Bernoulli,
    tc: Normal<f64>,
}

/// Seed for one population and its formation process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// One identity coordinate: 1 with probability `p`.
pub fn sample_si<R: Rng + ?Sized>(spec: &PopulationSpec, rng: &mut R) -> Result<u32> {
    let s = spec.samplers()?;
    Ok(u32::from(s.si.sample(rng)))
}

/// Outreach: 1 with probability `q`.
pub fn sample_to<R: Rng + ?Sized>(spec: &PopulationSpec, rng: &mut R) -> Result<u32> {
    let s = spec.samplers()?;
    Ok(u32::from(s.to.sample(rng)))
}

/// Capacity: a normal draw rounded half away from zero, floored at 1.
pub fn sample_tc<R: Rng + ?Sized>(spec: &PopulationSpec, rng: &mut R) -> Result<u32> {
    let s = spec.samplers()?;
    Ok(discretize(s.tc.sample(rng)))
}

fn discretize(draw: f64) -> u32 {
    // `as` saturates, so huge draws cannot wrap.
    draw.round().max(1.0) as u32
}

/// Draws `spec.n` agents with ids `0..n`.
pub fn sample_population<R: Rng + ?Sized>(
    spec: &PopulationSpec,
    rng: &mut R,
) -> Result<Vec<Agent>> {
    let s = spec.samplers()?;
    let dims = spec.space.dims();
    let agents = (0..spec.n)
        .map(|id| {
            let si = (0..dims).map(|_| u32::from(s.si.sample(rng))).collect();
            let to = u32::from(s.to.sample(rng));
            let tc = discretize(s.tc.sample(rng));
            Agent::new(id, si, to, tc)
        })
        .collect();
    Ok(agents)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, p: f64, q: f64, tc_mu: f64, tc_sigma2: f64) -> PopulationSpec {
        PopulationSpec {
            n,
            p,
            q,
            tc_mu,
            tc_sigma2,
            space: IdentitySpace::unit(),
        }
    }

    fn draws(n: usize, mut f: impl FnMut(&mut ChaCha8Rng) -> u32) -> Vec<u32> {
        let mut rng = RngSeed(99).rng();
        (0..n).map(|_| f(&mut rng)).collect()
    }

    fn mean(xs: &[u32]) -> f64 {
        xs.iter().map(|&x| f64::from(x)).sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn degenerate_bernoulli() {
        let zero = spec(2, 0.0, 0.0, 3.0, 0.0);
        let one = spec(2, 1.0, 1.0, 3.0, 0.0);
        assert!(draws(1000, |r| sample_si(&zero, r).unwrap())
            .iter()
            .all(|&x| x == 0));
        assert!(draws(1000, |r| sample_si(&one, r).unwrap())
            .iter()
            .all(|&x| x == 1));
        assert!(draws(1000, |r| sample_to(&zero, r).unwrap())
            .iter()
            .all(|&x| x == 0));
    }

    #[test]
    fn outreach_frequency() {
        for q in [0.8, 0.5] {
            let s = spec(2, 0.0, q, 3.0, 0.0);
            let m = mean(&draws(10_000, |r| sample_to(&s, r).unwrap()));
            assert!((m - q).abs() < 0.02, "q={q} mean={m}");
        }
    }

    #[test]
    fn capacity_without_variance_is_constant() {
        let s = spec(2, 0.0, 0.0, 3.0, 0.0);
        assert!(draws(1000, |r| sample_tc(&s, r).unwrap())
            .iter()
            .all(|&x| x == 3));
    }

    #[test]
    fn capacity_offline_moments() {
        let s = spec(2, 0.0, 0.0, 3.0, 0.25);
        let xs = draws(10_000, |r| sample_tc(&s, r).unwrap());
        assert!(xs.iter().all(|x| (1..=5).contains(x)));
        let in_core = xs.iter().filter(|x| (2..=4).contains(*x)).count();
        assert!(in_core as f64 / xs.len() as f64 > 0.99);
        assert!((mean(&xs) - 3.0).abs() < 0.05, "mean {}", mean(&xs));
    }

    #[test]
    fn capacity_online_moments() {
        let s = spec(2, 0.0, 0.0, 30.0, 0.25);
        let m = mean(&draws(10_000, |r| sample_tc(&s, r).unwrap()));
        assert!((m - 30.0).abs() < 0.05, "mean {m}");
    }

    #[test]
    fn capacity_is_floored_at_one() {
        assert_eq!(discretize(-3.2), 1);
        assert_eq!(discretize(0.49), 1);
        assert_eq!(discretize(2.5), 3);
        assert_eq!(discretize(2.49), 2);
    }

    #[test]
    fn offline_population_shape() {
        let s = spec(30, 0.22, 0.2, 3.0, 0.25);
        let agents = sample_population(&s, &mut RngSeed(1).rng()).unwrap();
        assert_eq!(agents.len(), 30);
        for (i, a) in agents.iter().enumerate() {
            assert_eq!(a.id, i);
            assert!((1..=5).contains(&a.tc));
            assert!(a.to <= 1);
            assert!(a.si.len() == 1 && a.si[0] <= 1);
        }
    }

    #[test]
    fn trivial_population() {
        let s = spec(2, 0.0, 1.0, 1.0, 0.0);
        let agents = sample_population(&s, &mut RngSeed(5).rng()).unwrap();
        assert_eq!(
            agents,
            vec![Agent::new(0, vec![0], 1, 1), Agent::new(1, vec![0], 1, 1)]
        );
    }

    #[test]
    fn same_seed_same_population() {
        let s = spec(300, 0.22, 0.5, 30.0, 0.25);
        let a = sample_population(&s, &mut RngSeed(17).rng()).unwrap();
        let b = sample_population(&s, &mut RngSeed(17).rng()).unwrap();
        let c = sample_population(&s, &mut RngSeed(18).rng()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn minority_share_converges() {
        let s = spec(300, 0.22, 0.2, 30.0, 0.25);
        let mut minority = 0usize;
        for seed in 0..100 {
            let agents = sample_population(&s, &mut RngSeed(seed).rng()).unwrap();
            minority += agents.iter().filter(|a| a.is_minority()).count();
        }
        let share = 100.0 * minority as f64 / 30_000.0;
        assert!((share - 21.98).abs() < 1.5, "share {share}");
    }

    #[test]
    fn invalid_specs_list_every_field() {
        let bad = spec(1, 1.5, -0.1, 0.0, -1.0);
        match bad.validate() {
            Err(Error::InvalidConfig(fields)) => assert_eq!(fields.len(), 5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
