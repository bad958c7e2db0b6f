use chrono::{DateTime, Utc};
use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution over non-negative counts with bounded support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CountDist {
    Constant {
        value: u32,
    },
    Uniform {
        min: u32,
        max: u32,
    },
    /// Poisson draws truncated at `max`.
    Poisson {
        mean: f64,
        max: u32,
    },
}

impl CountDist {
    pub fn validate(&self, name: &str) -> Result<()> {
        match *self {
            CountDist::Constant { .. } => Ok(()),
            CountDist::Uniform { min, max } if min <= max => Ok(()),
            CountDist::Poisson { mean, .. } if mean.is_finite() && mean > 0.0 => Ok(()),
            _ => Err(Error::Config(format!(
                "{}: invalid count distribution {:?}",
                name, self
            ))),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        match *self {
            CountDist::Constant { value } => value,
            CountDist::Uniform { min, max } => rng.gen_range(min..=max),
            CountDist::Poisson { mean, max } => {
                let d = Poisson::new(mean).expect("validated mean");
                let x: f64 = d.sample(rng);
                (x as u32).min(max)
            }
        }
    }
}

/// Delay between a message and a reply to it, in minutes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayDist {
    Constant {
        minutes: f64,
    },
    Uniform {
        min_minutes: f64,
        max_minutes: f64,
    },
    /// Exponential draws truncated at `max_minutes`.
    Exponential {
        mean_minutes: f64,
        max_minutes: f64,
    },
}

impl DelayDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DelayDist::Constant { minutes } => minutes.is_finite() && minutes >= 0.0,
            DelayDist::Uniform {
                min_minutes,
                max_minutes,
            } => min_minutes >= 0.0 && max_minutes.is_finite() && min_minutes <= max_minutes,
            DelayDist::Exponential {
                mean_minutes,
                max_minutes,
            } => {
                mean_minutes > 0.0
                    && mean_minutes.is_finite()
                    && max_minutes.is_finite()
                    && max_minutes > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "delay: invalid distribution {:?}",
                self
            )))
        }
    }

    /// Whole seconds, at least one so replies strictly follow their parent.
    pub fn sample_seconds(&self, rng: &mut impl Rng) -> i64 {
        let minutes = match *self {
            DelayDist::Constant { minutes } => minutes,
            DelayDist::Uniform {
                min_minutes,
                max_minutes,
            } => rng.gen_range(min_minutes..=max_minutes),
            DelayDist::Exponential {
                mean_minutes,
                max_minutes,
            } => {
                let d = Exp::new(1.0 / mean_minutes).expect("validated mean");
                let x: f64 = d.sample(rng);
                x.min(max_minutes)
            }
        };
        ((minutes * 60.0).round() as i64).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_groups: u32,
    /// Reply trees started per group (trees without replies stay singletons).
    pub cascades_per_group: CountDist,
    /// Replies each message receives.
    pub offspring: CountDist,
    pub delay: DelayDist,
    pub n_users: u32,
    /// Chance that a reply comes from the author of the message it answers.
    pub self_reply_prob: f64,
    /// Chance that a cascade carries a near-copy of a fact-checked story.
    pub planted_falsehood_rate: f64,
    /// Per-tree cap; larger trees are truncated with a warning.
    pub max_nodes: u32,
    pub max_depth: Option<u32>,
    /// Extra standalone messages per group.
    pub singletons_per_group: CountDist,
    pub words_per_message: CountDist,
    pub n_factchecks: u32,
    pub political_fraction: f64,
    #[serde(with = "crate::timefmt")]
    pub start: DateTime<Utc>,
    /// Roots are spread uniformly over this many days after `start`.
    pub span_days: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_groups: 10,
            cascades_per_group: CountDist::Uniform { min: 5, max: 15 },
            offspring: CountDist::Poisson { mean: 0.9, max: 6 },
            delay: DelayDist::Exponential {
                mean_minutes: 30.0,
                max_minutes: 1440.0,
            },
            n_users: 12,
            self_reply_prob: 0.1,
            planted_falsehood_rate: 0.1,
            max_nodes: 500,
            max_depth: None,
            singletons_per_group: CountDist::Uniform { min: 0, max: 20 },
            words_per_message: CountDist::Uniform { min: 4, max: 14 },
            n_factchecks: 20,
            political_fraction: 0.5,
            start: DateTime::parse_from_rfc3339("2018-08-01T00:00:00Z")
                .expect("static timestamp")
                .with_timezone(&Utc),
            span_days: 60,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        self.cascades_per_group.validate("cascades_per_group")?;
        self.offspring.validate("offspring")?;
        self.singletons_per_group.validate("singletons_per_group")?;
        self.words_per_message.validate("words_per_message")?;
        self.delay.validate()?;
        for (name, p) in [
            ("self_reply_prob", self.self_reply_prob),
            ("planted_falsehood_rate", self.planted_falsehood_rate),
            ("political_fraction", self.political_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "{} must lie in [0, 1], got {}",
                    name, p
                )));
            }
        }
        if self.n_users == 0 {
            return Err(Error::Config("n_users must be positive".into()));
        }
        if self.max_nodes == 0 {
            return Err(Error::Config("max_nodes must be positive".into()));
        }
        if self.planted_falsehood_rate > 0.0 && self.n_factchecks == 0 {
            return Err(Error::Config(
                "planting falsehoods needs n_factchecks > 0".into(),
            ));
        }
        Ok(())
    }
}
