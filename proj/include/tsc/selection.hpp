#pragma once

#include "tsc/als.hpp"

#include <optional>
#include <vector>

namespace tsc {

/// Diagnostics of one slope-heuristic calibration. k_of_c is non-increasing
/// along the grid; risk_of_c is the fitted risk of the rank selected at each
/// grid point. c_tilde is the right endpoint of the grid interval holding the
/// largest collapse of k(C); the calibrated rank is k_final = k(2 * c_tilde).
struct SlopeHeuristicTrace {
    std::vector<double> c_grid;
    std::vector<int> k_of_c;
    std::vector<double> risk_of_c;
    double c_tilde = 0.0;
    int k_final = 0;
};

struct RankSelectionTrace {
    std::vector<int> ks;        ///< candidate ranks, ascending
    std::vector<double> risks;  ///< fitted risk per candidate
    double penalty_constant = 0.0;  ///< effective per-k multiplier after calibration
    std::vector<double> criterion;  ///< risks[i] + penalty_constant * ks[i]
    int selected_k = 0;
    std::optional<SlopeHeuristicTrace> heuristic;
};

/// Smallest k in {1..risks.size()} minimizing
/// risks[k] + 16 * c_pen * (log(n)/n) * k * (d + tau).
int select_rank_penalized(const std::vector<double>& risks, int d, int tau, int n, double c_pen);

/// k(C): smallest of the given ranks minimizing risks[i] + C * ks[i].
int rank_at_penalty(const std::vector<double>& risks, const std::vector<int>& ks, double C);
/// Overload with ks = 1..risks.size().
int rank_at_penalty(const std::vector<double>& risks, double C);

/// 60 log-spaced points over [1e-6, 1e2] * (risk spread / k*).
std::vector<double> default_c_grid(const std::vector<double>& risks);

/// Calibrates the per-k penalty multiplier from the path of selected ranks:
/// locates the grid interval where k(C) collapses the most and returns
/// k(2 * c_tilde). A grid on which k(C) never moves throws
/// "flat criterion: widen c_grid". risks are indexed by k = 1..k*.
SlopeHeuristicTrace slope_heuristic(const std::vector<double>& risks,
                                    const std::vector<double>& c_grid);
/// Same with explicit candidate ranks.
SlopeHeuristicTrace slope_heuristic(const std::vector<double>& risks, const std::vector<int>& ks,
                                    const std::vector<double>& c_grid);

/// Fits one model per candidate rank (seed xor k gives each fit its own
/// stream), then calibrates the penalty with the slope heuristic on the
/// default grid; with a single candidate it is selected outright. Fitted
/// models are returned through `models` when requested, aligned with `ks`.
/// Distinct ranks may be fitted concurrently; results do not depend on
/// scheduling.
RankSelectionTrace fit_rank_path(const ObservationSet& obs, const StructureMatrix& S,
                                 const std::vector<int>& ks, const AlsConfig& cfg,
                                 std::vector<FactorModel>* models = nullptr, int threads = 1);

}  // namespace tsc
