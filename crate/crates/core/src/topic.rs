//! The closed set of eight sentiment topic domains.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A topic domain in which an article or sentence can express sentiment.
///
/// The set is closed and totally ordered; iteration over [`Topic::ALL`] is the
/// canonical order used everywhere results must be deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topic {
    Ideology,
    GovernmentAdministration,
    Democracy,
    EconomicDevelopment,
    Marketization,
    WelfareWellbeing,
    Globalization,
    Culture,
}

impl Topic {
    /// All topics in canonical order.
    pub const ALL: [Topic; 8] = [
        Topic::Ideology,
        Topic::GovernmentAdministration,
        Topic::Democracy,
        Topic::EconomicDevelopment,
        Topic::Marketization,
        Topic::WelfareWellbeing,
        Topic::Globalization,
        Topic::Culture,
    ];

    /// Number of topics.
    pub const COUNT: usize = 8;

    /// Position of this topic in the canonical order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Stable snake_case identifier, matching the serde representation.
    pub fn name(self) -> &'static str {
        match self {
            Topic::Ideology => "ideology",
            Topic::GovernmentAdministration => "government_administration",
            Topic::Democracy => "democracy",
            Topic::EconomicDevelopment => "economic_development",
            Topic::Marketization => "marketization",
            Topic::WelfareWellbeing => "welfare_wellbeing",
            Topic::Globalization => "globalization",
            Topic::Culture => "culture",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error returned when parsing an unknown topic name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown topic: {0}")]
pub struct UnknownTopic(pub String);

impl FromStr for Topic {
    type Err = UnknownTopic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topic::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTopic(s.to_string()))
    }
}
