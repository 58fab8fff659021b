#include "tsc/selection.hpp"

#include "tsc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsc {

namespace {

std::vector<int> iota_ranks(std::size_t count) {
    std::vector<int> ks(count);
    for (std::size_t i = 0; i < count; ++i) ks[i] = static_cast<int>(i) + 1;
    return ks;
}

}  // namespace

int rank_at_penalty(const std::vector<double>& risks, const std::vector<int>& ks, double C) {
    if (risks.empty() || risks.size() != ks.size()) {
        throw std::invalid_argument("empty or mismatched risk vector");
    }
    std::size_t best = 0;
    double best_crit = risks[0] + C * ks[0];
    for (std::size_t i = 1; i < risks.size(); ++i) {
        const double crit = risks[i] + C * ks[i];
        if (crit < best_crit) {  // ties keep the smaller rank
            best = i;
            best_crit = crit;
        }
    }
    return ks[best];
}

int rank_at_penalty(const std::vector<double>& risks, double C) {
    return rank_at_penalty(risks, iota_ranks(risks.size()), C);
}

int select_rank_penalized(const std::vector<double>& risks, int d, int tau, int n, double c_pen) {
    if (risks.empty()) {
        throw std::invalid_argument("empty risk vector");
    }
    if (n < 2) {
        throw std::invalid_argument("selection needs n >= 2");
    }
    if (c_pen < 0.0 || d < 1 || tau < 1) {
        throw std::invalid_argument("selection needs c_pen >= 0, d >= 1, tau >= 1");
    }
    const double weight = 16.0 * c_pen * (std::log(static_cast<double>(n)) / n) * (d + tau);
    return rank_at_penalty(risks, weight);
}

std::vector<double> default_c_grid(const std::vector<double>& risks) {
    if (risks.empty()) {
        throw std::invalid_argument("empty risk vector");
    }
    const auto [lo, hi] = std::minmax_element(risks.begin(), risks.end());
    double scale = (*hi - *lo) / static_cast<double>(risks.size());
    if (scale <= 0.0) scale = std::max(std::abs(*hi), 1.0);  // degenerate; heuristic will flag it
    const int points = 60;
    const double log_lo = std::log(1e-6 * scale);
    const double log_hi = std::log(1e2 * scale);
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
    }
    return grid;
}

SlopeHeuristicTrace slope_heuristic(const std::vector<double>& risks, const std::vector<int>& ks,
                                    const std::vector<double>& c_grid) {
    if (risks.empty() || risks.size() != ks.size()) {
        throw std::invalid_argument("empty or mismatched risk vector");
    }
    if (c_grid.size() < 2) {
        throw std::invalid_argument("c_grid needs at least two points");
    }
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        if (c_grid[i] <= 0.0 || (i > 0 && c_grid[i] <= c_grid[i - 1])) {
            throw std::invalid_argument("c_grid must be strictly increasing and positive");
        }
    }
    SlopeHeuristicTrace trace;
    trace.c_grid = c_grid;
    trace.k_of_c.resize(c_grid.size());
    trace.risk_of_c.resize(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        const int k = rank_at_penalty(risks, ks, c_grid[i]);
        trace.k_of_c[i] = k;
        const auto it = std::find(ks.begin(), ks.end(), k);
        trace.risk_of_c[i] = risks[static_cast<std::size_t>(it - ks.begin())];
    }
    int best_drop = 0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < c_grid.size(); ++i) {
        const int drop = trace.k_of_c[i] - trace.k_of_c[i + 1];
        if (drop > best_drop) {  // ties keep the earliest interval
            best_drop = drop;
            best_i = i;
        }
    }
    if (best_drop <= 0) {
        throw std::runtime_error("flat criterion: widen c_grid");
    }
    trace.c_tilde = c_grid[best_i + 1];
    trace.k_final = rank_at_penalty(risks, ks, 2.0 * trace.c_tilde);
    return trace;
}

SlopeHeuristicTrace slope_heuristic(const std::vector<double>& risks,
                                    const std::vector<double>& c_grid) {
    return slope_heuristic(risks, iota_ranks(risks.size()), c_grid);
}

RankSelectionTrace fit_rank_path(const ObservationSet& obs, const StructureMatrix& S,
                                 const std::vector<int>& ks, const AlsConfig& cfg,
                                 std::vector<FactorModel>* models, int threads) {
    if (ks.empty()) {
        throw std::invalid_argument("empty rank list");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1])) {
            throw std::invalid_argument("ranks must be positive and strictly ascending");
        }
    }
    std::vector<FactorModel> fits(ks.size());
    parallel_for(
        ks.size(),
        [&](std::size_t i) {
            AlsConfig local = cfg;
            local.seed = cfg.seed ^ static_cast<std::uint64_t>(ks[i]);
            fits[i] = als_fit(obs, S, ks[i], local);
        },
        threads);

    RankSelectionTrace trace;
    trace.ks = ks;
    trace.risks.resize(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) trace.risks[i] = fits[i].fitted_risk;

    if (ks.size() == 1) {
        trace.penalty_constant = 0.0;
        trace.criterion = trace.risks;
        trace.selected_k = ks[0];
    } else {
        trace.heuristic = slope_heuristic(trace.risks, ks, default_c_grid(trace.risks));
        trace.penalty_constant = 2.0 * trace.heuristic->c_tilde;
        trace.criterion.resize(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            trace.criterion[i] = trace.risks[i] + trace.penalty_constant * ks[i];
        }
        trace.selected_k = trace.heuristic->k_final;
    }
    if (models != nullptr) *models = std::move(fits);
    return trace;
}

}  // namespace tsc
