#include "tsc/bench.hpp"

#include "tsc/parallel.hpp"
#include "tsc/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsc {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void echo_spec(ExperimentReport& report, const SimulationSpec& spec) {
    report.config.emplace_back("d", std::to_string(spec.d));
    report.config.emplace_back("T", std::to_string(spec.T));
    report.config.emplace_back("tau", std::to_string(spec.tau));
    report.config.emplace_back("rank", std::to_string(spec.k));
    report.config.emplace_back("structure", to_string(spec.structure_kind));
    report.config.emplace_back("sigma_eps", fmt(spec.sigma_eps));
    report.config.emplace_back("ar_coeff", fmt(spec.ar_coeff));
    report.config.emplace_back("ar_error",
                               spec.ar_error.kind == NoiseLaw::Kind::Gaussian ? "gaussian" : "uniform");
    report.config.emplace_back("ar_param", fmt(spec.ar_error.param));
    report.config.emplace_back("xi_law",
                               spec.xi_law.kind == NoiseLaw::Kind::Gaussian ? "gaussian" : "uniform");
    report.config.emplace_back("xi_param", fmt(spec.xi_law.param));
    report.config.emplace_back("observe_fraction", fmt(spec.observe_fraction));
    report.config.emplace_back("sample_mode", spec.sample_mode == SampleMode::WithoutReplacement
                                                  ? "without_replacement"
                                                  : "with_replacement");
    report.config.emplace_back("seed", std::to_string(spec.seed));
}

struct PairedMse {
    double identity = 0.0;
    double periodic = 0.0;
    double seconds = 0.0;
};

// One replication of the two-model comparison: the same dataset feeds both
// pipelines, and both fits share the ALS seed so differences are estimator-only.
PairedMse paired_replication(const SimulationSpec& spec, std::uint64_t sim_seed,
                             std::uint64_t als_seed) {
    const auto t0 = std::chrono::steady_clock::now();
    SimulationSpec local = spec;
    local.seed = sim_seed;
    const SimulationResult sim = simulate(local);

    AlsConfig cfg;
    cfg.seed = als_seed;

    PairedMse out;
    const StructureMatrix identity = build_identity(spec.T);
    const FactorModel raw_fit = als_fit(sim.obs, identity, spec.k, cfg);
    out.identity = pi_mse(reconstruct(raw_fit, identity), sim.truth.theta0);

    const StructureMatrix periodic = build_periodic(spec.tau, spec.T);
    const ObservationSet folded = fold_observations(sim.obs, spec.tau);
    const FactorModel folded_fit = als_fit(folded, build_identity(spec.tau), spec.k, cfg);
    out.periodic = pi_mse(reconstruct(folded_fit, periodic), sim.truth.theta0);

    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void push_model_cells(ExperimentReport& report, double x, const std::vector<double>& id_mse,
                      const std::vector<double>& per_mse, const std::vector<double>& seconds) {
    const double wall = std::accumulate(seconds.begin(), seconds.end(), 0.0);
    report.cells.push_back({"identity", x, mean_of(id_mse), std_of(id_mse),
                            static_cast<int>(id_mse.size()), wall / 2.0});
    report.cells.push_back({"periodic", x, mean_of(per_mse), std_of(per_mse),
                            static_cast<int>(per_mse.size()), wall / 2.0});
}

}  // namespace

ExperimentReport run_two_model_comparison(const SimulationSpec& spec, const std::vector<int>& ks,
                                          const BenchOptions& opt) {
    if (ks.empty()) {
        throw std::invalid_argument("empty rank list");
    }
    if (opt.replications < 1) {
        throw std::invalid_argument("replications must be >= 1");
    }
    ExperimentReport report;
    report.name = "two_model_comparison";
    echo_spec(report, spec);
    report.config.emplace_back("replications", std::to_string(opt.replications));

    const std::size_t R = static_cast<std::size_t>(opt.replications);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        SimulationSpec cell_spec = spec;
        cell_spec.k = ks[ki];
        std::vector<double> id_mse(R), per_mse(R), secs(R);
        parallel_for(
            R,
            [&](std::size_t rep) {
                const std::uint64_t sim_seed = derive_seed(spec.seed, ki, rep, 0);
                const std::uint64_t als_seed = derive_seed(spec.seed, ki, rep, 1);
                const PairedMse mse = paired_replication(cell_spec, sim_seed, als_seed);
                id_mse[rep] = mse.identity;
                per_mse[rep] = mse.periodic;
                secs[rep] = mse.seconds;
            },
            opt.threads);
        push_model_cells(report, static_cast<double>(ks[ki]), id_mse, per_mse, secs);

        std::vector<double> diff(R);
        for (std::size_t r = 0; r < R; ++r) diff[r] = id_mse[r] - per_mse[r];
        const std::string tag = "k" + std::to_string(ks[ki]);
        report.scalars["gap_mean_" + tag] = mean_of(diff);
        report.scalars["gap_se_" + tag] =
            std_of(diff) / std::sqrt(static_cast<double>(R));
    }
    return report;
}

ExperimentReport run_sigma_sweep(const SimulationSpec& spec, const std::vector<double>& sigmas,
                                 const BenchOptions& opt) {
    if (sigmas.empty()) {
        throw std::invalid_argument("empty sigma list");
    }
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (sigmas[i] <= 0.0 || (i > 0 && sigmas[i] <= sigmas[i - 1])) {
            throw std::invalid_argument("sigmas must be positive and ascending");
        }
    }
    ExperimentReport report;
    report.name = "sigma_sweep";
    echo_spec(report, spec);
    report.config.emplace_back("replications", std::to_string(opt.replications));

    const std::size_t R = static_cast<std::size_t>(opt.replications);
    std::vector<double> id_curve, per_curve;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        SimulationSpec cell_spec = spec;
        cell_spec.sigma_eps = sigmas[si];
        std::vector<double> id_mse(R), per_mse(R), secs(R);
        parallel_for(
            R,
            [&](std::size_t rep) {
                const std::uint64_t sim_seed = derive_seed(spec.seed, 1000 + si, rep, 0);
                const std::uint64_t als_seed = derive_seed(spec.seed, 1000 + si, rep, 1);
                const PairedMse mse = paired_replication(cell_spec, sim_seed, als_seed);
                id_mse[rep] = mse.identity;
                per_mse[rep] = mse.periodic;
                secs[rep] = mse.seconds;
            },
            opt.threads);
        push_model_cells(report, sigmas[si], id_mse, per_mse, secs);
        id_curve.push_back(mean_of(id_mse));
        per_curve.push_back(mean_of(per_mse));
    }
    std::vector<double> xs(sigmas.begin(), sigmas.end());
    report.scalars["spearman_identity"] = spearman(xs, id_curve);
    report.scalars["spearman_periodic"] = spearman(xs, per_curve);
    report.scalars["max_mse_identity"] = *std::max_element(id_curve.begin(), id_curve.end());
    report.scalars["max_mse_periodic"] = *std::max_element(per_curve.begin(), per_curve.end());
    report.scalars["min_mse_identity"] = *std::min_element(id_curve.begin(), id_curve.end());
    report.scalars["min_mse_periodic"] = *std::min_element(per_curve.begin(), per_curve.end());
    return report;
}

ExperimentReport run_rank_selection_experiment(const SimulationSpec& spec, int k_star,
                                               const BenchOptions& opt) {
    if (k_star < spec.k) {
        throw std::invalid_argument("k_star must be >= the true rank");
    }
    if (opt.replications < 1) {
        throw std::invalid_argument("replications must be >= 1");
    }
    ExperimentReport report;
    report.name = "rank_selection";
    echo_spec(report, spec);
    report.config.emplace_back("k_star", std::to_string(k_star));
    report.config.emplace_back("replications", std::to_string(opt.replications));

    std::vector<int> ks(static_cast<std::size_t>(k_star));
    for (int k = 1; k <= k_star; ++k) ks[static_cast<std::size_t>(k - 1)] = k;

    const std::size_t R = static_cast<std::size_t>(opt.replications);
    std::vector<double> oracle_mse(R), adaptive_mse(R), secs(R);
    std::vector<int> selected(R);
    const StructureMatrix periodic = build_periodic(spec.tau, spec.T);
    const StructureMatrix folded_identity = build_identity(spec.tau);

    parallel_for(
        R,
        [&](std::size_t rep) {
            const auto t0 = std::chrono::steady_clock::now();
            SimulationSpec local = spec;
            local.seed = derive_seed(spec.seed, 2000, rep, 0);
            const SimulationResult sim = simulate(local);
            const ObservationSet folded = fold_observations(sim.obs, spec.tau);

            AlsConfig cfg;
            cfg.seed = derive_seed(spec.seed, 2000, rep, 1);
            std::vector<FactorModel> models;
            const RankSelectionTrace trace =
                fit_rank_path(folded, folded_identity, ks, cfg, &models, 1);

            selected[rep] = trace.selected_k;
            const FactorModel& oracle = models[static_cast<std::size_t>(spec.k - 1)];
            const FactorModel& adaptive = models[static_cast<std::size_t>(trace.selected_k - 1)];
            oracle_mse[rep] = pi_mse(reconstruct(oracle, periodic), sim.truth.theta0);
            adaptive_mse[rep] = pi_mse(reconstruct(adaptive, periodic), sim.truth.theta0);
            secs[rep] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        },
        opt.threads);

    const double wall = std::accumulate(secs.begin(), secs.end(), 0.0);
    report.cells.push_back({"oracle", static_cast<double>(spec.k), mean_of(oracle_mse),
                            std_of(oracle_mse), static_cast<int>(R), wall / 2.0});
    report.cells.push_back({"adaptive", static_cast<double>(spec.k), mean_of(adaptive_mse),
                            std_of(adaptive_mse), static_cast<int>(R), wall / 2.0});
    for (int k : selected) {
        report.rank_frequency[k] += 1.0 / static_cast<double>(R);
    }
    report.scalars["oracle_mean_mse"] = mean_of(oracle_mse);
    report.scalars["adaptive_mean_mse"] = mean_of(adaptive_mse);
    return report;
}

ExperimentReport run_rate_check(const SimulationSpec& spec,
                                const std::vector<double>& n_multipliers,
                                const BenchOptions& opt) {
    if (n_multipliers.size() < 2) {
        throw std::invalid_argument("rate check needs at least two n multipliers");
    }
    ExperimentReport report;
    report.name = "rate_check";
    echo_spec(report, spec);
    report.config.emplace_back("replications", std::to_string(opt.replications));

    const double cells = static_cast<double>(spec.d) * spec.T;
    const double base_n = std::round(spec.observe_fraction * cells);
    const StructureMatrix S = structure_for(spec);
    const std::size_t R = static_cast<std::size_t>(opt.replications);

    std::vector<double> log_n, log_mse;
    for (std::size_t mi = 0; mi < n_multipliers.size(); ++mi) {
        SimulationSpec cell_spec = spec;
        cell_spec.observe_fraction = n_multipliers[mi] * base_n / cells;
        std::vector<double> mse(R), secs(R);
        parallel_for(
            R,
            [&](std::size_t rep) {
                const auto t0 = std::chrono::steady_clock::now();
                SimulationSpec local = cell_spec;
                local.seed = derive_seed(spec.seed, 3000 + mi, rep, 0);
                const SimulationResult sim = simulate(local);
                AlsConfig cfg;
                cfg.seed = derive_seed(spec.seed, 3000 + mi, rep, 1);
                const FactorModel fit = als_fit(sim.obs, S, spec.k, cfg);
                mse[rep] = pi_mse(reconstruct(fit, S), sim.truth.theta0);
                secs[rep] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            },
            opt.threads);
        const double n_here = std::round(n_multipliers[mi] * base_n);
        report.cells.push_back({to_string(spec.structure_kind), n_here, mean_of(mse), std_of(mse),
                                static_cast<int>(R),
                                std::accumulate(secs.begin(), secs.end(), 0.0)});
        log_n.push_back(std::log(n_here));
        log_mse.push_back(std::log(mean_of(mse)));
    }

    // least-squares slope of log(mse) on log(n)
    const double mx = mean_of(log_n), my = mean_of(log_mse);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxx += (log_n[i] - mx) * (log_n[i] - mx);
        sxy += (log_n[i] - mx) * (log_mse[i] - my);
    }
    report.scalars["loglog_slope"] = sxy / sxx;
    for (std::size_t i = 0; i + 1 < log_n.size(); ++i) {
        report.scalars["mse_ratio_" + std::to_string(i)] =
            std::exp(log_mse[i] - log_mse[i + 1]);
    }
    return report;
}

SplitObservations split_observations(const ObservationSet& obs, double train_fraction,
                                     std::uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    }
    validate(obs);
    std::vector<int> order(obs.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(order.size())));
    SplitObservations out;
    out.train.d = out.validation.d = obs.d;
    out.train.T = out.validation.T = obs.T;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? out.train : out.validation)
            .entries.push_back(obs.entries[static_cast<std::size_t>(order[i])]);
    }
    return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman needs two equally sized samples");
    }
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank on ties
            for (std::size_t p = i; p <= j; ++p) r[order[p]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double mx = mean_of(rx), my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace tsc
