//! The analogy-based estimation design space: six dimensions plus the
//! cross-tree rules that make a configuration valid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubsetSelection {
    RemoveNothing,
    OutlierPrune,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    Uniform,
    Pearson,
    Spearman,
    VarianceRatio,
    InfoGain,
    GainRatio,
    ChiSquared,
    Relief,
}

impl WeightScheme {
    /// Schemes built on binned counts require a discretizer.
    pub fn needs_discretization(self) -> bool {
        matches!(
            self,
            WeightScheme::InfoGain | WeightScheme::GainRatio | WeightScheme::ChiSquared
        )
    }

    pub const ALL: [WeightScheme; 8] = [
        WeightScheme::Uniform,
        WeightScheme::Pearson,
        WeightScheme::Spearman,
        WeightScheme::VarianceRatio,
        WeightScheme::InfoGain,
        WeightScheme::GainRatio,
        WeightScheme::ChiSquared,
        WeightScheme::Relief,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretization {
    None,
    EqualFrequency,
    EqualWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Similarity {
    WeightedEuclidean,
    UnweightedEuclidean,
    MaxDistance,
    TriangularKernel,
    Minkowski,
    MeanRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adaptation {
    Median,
    Mean,
    SecondLearner,
    WeightedMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalogySelection {
    Fixed(u32),
    Dynamic,
}

/// One point in the analogy design space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AbeConfig {
    pub subset: SubsetSelection,
    pub weighting: WeightScheme,
    pub discretization: Discretization,
    pub similarity: Similarity,
    pub adaptation: Adaptation,
    pub selection: AnalogySelection,
}

impl AbeConfig {
    /// The canonical baseline: keep everything, unit weights, plain
    /// weighted-Euclidean distance, return the nearest neighbor's effort.
    pub fn abe0() -> AbeConfig {
        AbeConfig {
            subset: SubsetSelection::RemoveNothing,
            weighting: WeightScheme::Uniform,
            discretization: Discretization::None,
            similarity: Similarity::WeightedEuclidean,
            adaptation: Adaptation::Median,
            selection: AnalogySelection::Fixed(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let AnalogySelection::Fixed(k) = self.selection {
            if !(1..=5).contains(&k) {
                return Err(Error::InvalidConfig(format!(
                    "fixed analogy count must be in 1..=5, got {k}"
                )));
            }
            // At k = 1 every adaptation returns the same value; median is
            // the canonical spelling.
            if k == 1 && self.adaptation != Adaptation::Median {
                return Err(Error::InvalidConfig(
                    "k = 1 requires the median adaptation (canonical form)".into(),
                ));
            }
        }
        if self.weighting.needs_discretization() && self.discretization == Discretization::None {
            return Err(Error::InvalidConfig(format!(
                "weighting scheme {} requires a discretizer",
                weighting_label(self.weighting)
            )));
        }
        Ok(())
    }

    /// Canonical form: k = 1 collapses the adaptation to median.
    pub fn canonical(mut self) -> AbeConfig {
        if self.selection == AnalogySelection::Fixed(1) {
            self.adaptation = Adaptation::Median;
        }
        self
    }

    /// Read a configuration out of an analogy-space candidate by matching
    /// the dimension labels.
    pub fn from_candidate(
        space: &crate::configspace::Space,
        candidate: &crate::configspace::Candidate,
    ) -> Result<AbeConfig> {
        use crate::configspace::ParamKind;
        let label = |name: &str| -> Result<&str> {
            let dim = space
                .dim_index(name)
                .ok_or_else(|| Error::InvalidConfig(format!("space lacks dimension `{name}`")))?;
            match &space.specs[dim].kind {
                ParamKind::Choice(choices) => Ok(choices[candidate.choice(dim)].as_str()),
                _ => Err(Error::InvalidConfig(format!(
                    "dimension `{name}` is not categorical"
                ))),
            }
        };
        let config = AbeConfig {
            subset: match label("subset")? {
                "all" => SubsetSelection::RemoveNothing,
                "prune" => SubsetSelection::OutlierPrune,
                other => return Err(Error::InvalidConfig(format!("unknown subset `{other}`"))),
            },
            weighting: match label("weighting")? {
                "uniform" => WeightScheme::Uniform,
                "pearson" => WeightScheme::Pearson,
                "spearman" => WeightScheme::Spearman,
                "varratio" => WeightScheme::VarianceRatio,
                "infogain" => WeightScheme::InfoGain,
                "gainratio" => WeightScheme::GainRatio,
                "chisq" => WeightScheme::ChiSquared,
                "relief" => WeightScheme::Relief,
                other => return Err(Error::InvalidConfig(format!("unknown weighting `{other}`"))),
            },
            discretization: match label("discretization")? {
                "nodisc" => Discretization::None,
                "eqfreq" => Discretization::EqualFrequency,
                "eqwidth" => Discretization::EqualWidth,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown discretization `{other}`"
                    )))
                }
            },
            similarity: match label("similarity")? {
                "wEuclid" => Similarity::WeightedEuclidean,
                "uEuclid" => Similarity::UnweightedEuclidean,
                "maxdist" => Similarity::MaxDistance,
                "triangle" => Similarity::TriangularKernel,
                "minkowski" => Similarity::Minkowski,
                "meanrank" => Similarity::MeanRank,
                other => {
                    return Err(Error::InvalidConfig(format!("unknown similarity `{other}`")))
                }
            },
            adaptation: match label("adaptation")? {
                "median" => Adaptation::Median,
                "mean" => Adaptation::Mean,
                "regress" => Adaptation::SecondLearner,
                "wmean" => Adaptation::WeightedMean,
                other => {
                    return Err(Error::InvalidConfig(format!("unknown adaptation `{other}`")))
                }
            },
            selection: match label("k")? {
                "kdyn" => AnalogySelection::Dynamic,
                k => {
                    let count: u32 = k
                        .strip_prefix('k')
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| {
                            Error::InvalidConfig(format!("unknown analogy selector `{k}`"))
                        })?;
                    AnalogySelection::Fixed(count)
                }
            },
        };
        let config = config.canonical();
        config.validate()?;
        Ok(config)
    }

    /// Canonical text token, e.g. `prune|relief|eqfreq|wEuclid|median|k3`.
    pub fn token(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}",
            subset_label(self.subset),
            weighting_label(self.weighting),
            discretization_label(self.discretization),
            similarity_label(self.similarity),
            adaptation_label(self.adaptation),
            selection_label(self.selection),
        )
    }
}

pub fn subset_label(v: SubsetSelection) -> &'static str {
    match v {
        SubsetSelection::RemoveNothing => "all",
        SubsetSelection::OutlierPrune => "prune",
    }
}

pub fn weighting_label(v: WeightScheme) -> &'static str {
    match v {
        WeightScheme::Uniform => "uniform",
        WeightScheme::Pearson => "pearson",
        WeightScheme::Spearman => "spearman",
        WeightScheme::VarianceRatio => "varratio",
        WeightScheme::InfoGain => "infogain",
        WeightScheme::GainRatio => "gainratio",
        WeightScheme::ChiSquared => "chisq",
        WeightScheme::Relief => "relief",
    }
}

pub fn discretization_label(v: Discretization) -> &'static str {
    match v {
        Discretization::None => "nodisc",
        Discretization::EqualFrequency => "eqfreq",
        Discretization::EqualWidth => "eqwidth",
    }
}

pub fn similarity_label(v: Similarity) -> &'static str {
    match v {
        Similarity::WeightedEuclidean => "wEuclid",
        Similarity::UnweightedEuclidean => "uEuclid",
        Similarity::MaxDistance => "maxdist",
        Similarity::TriangularKernel => "triangle",
        Similarity::Minkowski => "minkowski",
        Similarity::MeanRank => "meanrank",
    }
}

pub fn adaptation_label(v: Adaptation) -> &'static str {
    match v {
        Adaptation::Median => "median",
        Adaptation::Mean => "mean",
        Adaptation::SecondLearner => "regress",
        Adaptation::WeightedMean => "wmean",
    }
}

pub fn selection_label(v: AnalogySelection) -> String {
    match v {
        AnalogySelection::Fixed(k) => format!("k{k}"),
        AnalogySelection::Dynamic => "kdyn".into(),
    }
}

const SUBSETS: [SubsetSelection; 2] = [SubsetSelection::RemoveNothing, SubsetSelection::OutlierPrune];
const DISCRETIZATIONS: [Discretization; 3] = [
    Discretization::None,
    Discretization::EqualFrequency,
    Discretization::EqualWidth,
];
const SIMILARITIES: [Similarity; 6] = [
    Similarity::WeightedEuclidean,
    Similarity::UnweightedEuclidean,
    Similarity::MaxDistance,
    Similarity::TriangularKernel,
    Similarity::Minkowski,
    Similarity::MeanRank,
];
const ADAPTATIONS: [Adaptation; 4] = [
    Adaptation::Median,
    Adaptation::Mean,
    Adaptation::SecondLearner,
    Adaptation::WeightedMean,
];
const SELECTIONS: [AnalogySelection; 6] = [
    AnalogySelection::Fixed(1),
    AnalogySelection::Fixed(2),
    AnalogySelection::Fixed(3),
    AnalogySelection::Fixed(4),
    AnalogySelection::Fixed(5),
    AnalogySelection::Dynamic,
];

/// The raw cross-product of all six dimensions (2 x 8 x 3 x 6 x 4 x 6).
pub fn enumerate_raw() -> Vec<AbeConfig> {
    let mut out = Vec::with_capacity(6912);
    for &subset in &SUBSETS {
        for &weighting in &WeightScheme::ALL {
            for &discretization in &DISCRETIZATIONS {
                for &similarity in &SIMILARITIES {
                    for &adaptation in &ADAPTATIONS {
                        for &selection in &SELECTIONS {
                            out.push(AbeConfig {
                                subset,
                                weighting,
                                discretization,
                                similarity,
                                adaptation,
                                selection,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// All configurations that pass the cross-tree rules, in enumeration order.
pub fn enumerate_valid() -> Vec<AbeConfig> {
    enumerate_raw()
        .into_iter()
        .filter(|c| c.validate().is_ok())
        .collect()
}

/// One canonical token per valid configuration, newline separated. Shipped
/// next to experiment outputs so the constrained space is documented.
pub fn valid_config_manifest() -> String {
    let mut out = String::new();
    for c in enumerate_valid() {
        out.push_str(&c.token());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn raw_cross_product_has_6912_points() {
        assert_eq!(enumerate_raw().len(), 6912);
        assert_eq!(2 * 8 * 3 * 6 * 4 * 6, 6912);
    }

    #[test]
    fn constrained_count_is_stable() {
        // 21 weighting x discretization combos, 21 adaptation x selection
        // combos, times subset (2) and similarity (6).
        let valid = enumerate_valid();
        assert_eq!(valid.len(), 2 * 21 * 6 * 21);
        assert_eq!(valid.len(), 5292);
        let tokens: HashSet<String> = valid.iter().map(|c| c.token()).collect();
        assert_eq!(tokens.len(), valid.len());
    }

    #[test]
    fn manifest_lists_every_valid_token() {
        let manifest = valid_config_manifest();
        assert_eq!(manifest.lines().count(), 5292);
        assert!(manifest.contains("prune|relief|eqfreq|wEuclid|median|k3"));
    }

    #[test]
    fn abe0_is_valid_unit_weight_one_nearest_neighbor() {
        let c = AbeConfig::abe0();
        c.validate().unwrap();
        assert_eq!(c.token(), "all|uniform|nodisc|wEuclid|median|k1");
    }

    #[test]
    fn cross_tree_rules_reject_invalid_points() {
        let mut c = AbeConfig::abe0();
        c.weighting = WeightScheme::InfoGain;
        assert!(c.validate().is_err());
        c.discretization = Discretization::EqualFrequency;
        assert!(c.validate().is_ok());

        let mut c = AbeConfig::abe0();
        c.adaptation = Adaptation::Mean; // still k = 1
        assert!(c.validate().is_err());
        assert_eq!(c.canonical().adaptation, Adaptation::Median);
    }
}
