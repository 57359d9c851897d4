use discretegof_cli::{parse_config, DistributionSpec, OutputFormat, StudyConfig};
use discretegof_core::{CatalogName, StatisticKind};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn distribution() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        prop::sample::select(CatalogName::ALL.to_vec()).prop_map(DistributionSpec::Catalog),
        (prop::collection::vec(1u32..100, 10), "[a-z]{1,8}").prop_map(|(w, label)| {
            let total: u32 = w.iter().sum();
            DistributionSpec::Explicit {
                label,
                probs: w.iter().map(|&x| f64::from(x) / f64::from(total)).collect(),
            }
        }),
    ]
}

fn config() -> impl Strategy<Value = StudyConfig> {
    (
        100usize..50_000,
        0.0001f64..0.5,
        prop::collection::btree_set(1u64..1000, 1..6),
        any::<u64>(),
        subsequence(StatisticKind::ALL.to_vec(), 1..=6),
        distribution(),
        prop::collection::vec(distribution(), 1..4),
        any::<bool>(),
    )
        .prop_map(|(replicates, alpha, sizes, seed, statistics, null, alternatives, json)| {
            let mut c = StudyConfig::default();
            c.plan.replicates = replicates;
            c.plan.alpha = alpha;
            c.plan.sample_sizes = sizes.into_iter().collect();
            c.plan.seed = seed;
            c.plan.statistics = statistics;
            c.null = null;
            let mut seen = std::collections::HashSet::new();
            c.alternatives = alternatives
                .into_iter()
                .filter(|a| seen.insert(a.label().to_string()))
                .collect();
            if json {
                c.formats.push(OutputFormat::Json);
            }
            c
        })
}

proptest! {
    #[test]
    fn canonical_form_round_trips(c in config()) {
        let text = c.to_canonical();
        let parsed = parse_config(&text).unwrap();
        prop_assert_eq!(parsed, c);
    }
}
