#pragma once

#include "tsc/selection.hpp"
#include "tsc/sim.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tsc {

/// Aggregated results of one experiment. Cells, scalars and frequencies are
/// deterministic given (config, seed); wall_seconds is informational only and
/// is kept out of the serialized reports so files stay byte-reproducible.
struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, std::string>> config;  ///< echoed settings

    struct Cell {
        std::string model;  ///< "identity", "periodic", "oracle", "adaptive"
        double x = 0.0;     ///< the swept quantity: k, sigma_eps or n
        double mean_mse = 0.0;
        double std_mse = 0.0;
        int replications = 0;
        double wall_seconds = 0.0;
    };
    std::vector<Cell> cells;

    std::map<int, double> rank_frequency;   ///< selected rank -> frequency (sums to 1)
    std::map<std::string, double> scalars;  ///< summary statistics
};

struct BenchOptions {
    int replications = 20;
    int threads = 0;  ///< 0 = hardware count
};

/// Identity-structure fit on the raw observations versus periodic fit via
/// folding, on identical datasets per replication, for each candidate rank.
/// spec.tau defines the period; cells report pi_mse against theta0.
ExperimentReport run_two_model_comparison(const SimulationSpec& spec, const std::vector<int>& ks,
                                          const BenchOptions& opt);

/// Both models across increasing sigma_eps; scalars carry the Spearman rank
/// correlation of mean MSE versus sigma per model.
ExperimentReport run_sigma_sweep(const SimulationSpec& spec, const std::vector<double>& sigmas,
                                 const BenchOptions& opt);

/// Fits the rank path 1..k_star per replication, selects the rank with the
/// slope heuristic, and reports the selection histogram plus the mean MSE of
/// the oracle-rank fit (spec.k) and the adaptive fit.
ExperimentReport run_rank_selection_experiment(const SimulationSpec& spec, int k_star,
                                               const BenchOptions& opt);

/// Scales the observation count by each multiplier (spec fixes the base
/// fraction) and reports the log-log slope of mean MSE versus n in scalars.
ExperimentReport run_rate_check(const SimulationSpec& spec,
                                const std::vector<double>& n_multipliers,
                                const BenchOptions& opt);

struct SplitObservations {
    ObservationSet train;
    ObservationSet validation;
};

/// Seeded shuffle-split of the entries; train gets round(train_fraction * n).
SplitObservations split_observations(const ObservationSet& obs, double train_fraction,
                                     std::uint64_t seed);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tsc
