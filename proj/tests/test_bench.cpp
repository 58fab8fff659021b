#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tsc/bench.hpp"

#include <algorithm>
#include <cmath>

namespace {

tsc::SimulationSpec small_spec() {
    tsc::SimulationSpec spec;
    spec.d = 24;
    spec.T = 12;
    spec.tau = 4;
    spec.k = 2;
    spec.sigma_eps = 0.2;
    spec.ar_error = tsc::NoiseLaw::uniform(1.0);
    spec.xi_law = tsc::NoiseLaw::gaussian(0.05);
    spec.observe_fraction = 0.6;
    spec.seed = 321;
    return spec;
}

}  // namespace

TEST_CASE("two-model comparison emits paired cells") {
    const tsc::ExperimentReport report =
        tsc::run_two_model_comparison(small_spec(), {1, 2}, {.replications = 4, .threads = 2});
    REQUIRE(report.cells.size() == 4);
    CHECK(report.cells[0].model == "identity");
    CHECK(report.cells[1].model == "periodic");
    CHECK(report.cells[0].replications == 4);
    CHECK(report.scalars.count("gap_mean_k2") == 1);
    for (const auto& cell : report.cells) CHECK(cell.mean_mse > 0.0);
}

TEST_CASE("degenerate tau == T makes both models identical") {
    tsc::SimulationSpec spec = small_spec();
    spec.tau = spec.T;  // folding is a no-op
    const tsc::ExperimentReport report =
        tsc::run_two_model_comparison(spec, {2}, {.replications = 3, .threads = 1});
    const double gap = report.scalars.at("gap_mean_k2");
    const double se = report.scalars.at("gap_se_k2");
    CHECK(std::abs(gap) <= 2.0 * se + 1e-15);
    CHECK(report.cells[0].mean_mse == doctest::Approx(report.cells[1].mean_mse));
}

TEST_CASE("reports are deterministic and thread-count independent") {
    const tsc::ExperimentReport a =
        tsc::run_two_model_comparison(small_spec(), {2}, {.replications = 5, .threads = 1});
    const tsc::ExperimentReport b =
        tsc::run_two_model_comparison(small_spec(), {2}, {.replications = 5, .threads = 2});
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].mean_mse == b.cells[i].mean_mse);
        CHECK(a.cells[i].std_mse == b.cells[i].std_mse);
    }
}

TEST_CASE("sigma sweep reports curves and spearman scalars") {
    const tsc::ExperimentReport report =
        tsc::run_sigma_sweep(small_spec(), {0.05, 0.8}, {.replications = 4, .threads = 2});
    REQUIRE(report.cells.size() == 4);
    CHECK(report.scalars.count("spearman_identity") == 1);
    CHECK(report.scalars.count("spearman_periodic") == 1);
    CHECK(report.scalars.count("max_mse_identity") == 1);
    CHECK_THROWS_AS(tsc::run_sigma_sweep(small_spec(), {0.5, 0.2}, {.replications = 2}),
                    std::invalid_argument);
}

TEST_CASE("rank selection histogram is a probability distribution") {
    tsc::SimulationSpec spec = small_spec();
    spec.k = 2;
    const tsc::ExperimentReport report =
        tsc::run_rank_selection_experiment(spec, 4, {.replications = 6, .threads = 2});
    double total = 0.0;
    for (const auto& [k, f] : report.rank_frequency) {
        CHECK(k >= 1);
        CHECK(k <= 4);
        total += f;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(report.scalars.count("oracle_mean_mse") == 1);
    CHECK(report.scalars.count("adaptive_mean_mse") == 1);
}

TEST_CASE("single replication with a single candidate degenerates cleanly") {
    tsc::SimulationSpec spec = small_spec();
    spec.k = 1;
    const tsc::ExperimentReport report =
        tsc::run_rank_selection_experiment(spec, 1, {.replications = 1, .threads = 1});
    REQUIRE(report.rank_frequency.size() == 1);
    CHECK(report.rank_frequency.at(1) == doctest::Approx(1.0));
    CHECK(report.scalars.at("oracle_mean_mse") == report.scalars.at("adaptive_mean_mse"));
}

TEST_CASE("k_star below the true rank is rejected") {
    tsc::SimulationSpec spec = small_spec();
    spec.k = 3;
    CHECK_THROWS_AS(tsc::run_rank_selection_experiment(spec, 2, {.replications = 1}),
                    std::invalid_argument);
}

TEST_CASE("rate check fits a finite slope") {
    tsc::SimulationSpec spec = small_spec();
    spec.sigma_eps = 0.0;
    spec.xi_law = tsc::NoiseLaw::gaussian(0.01);
    spec.observe_fraction = 0.5;
    spec.sample_mode = tsc::SampleMode::WithReplacement;
    const tsc::ExperimentReport report =
        tsc::run_rate_check(spec, {1.0, 4.0}, {.replications = 4, .threads = 2});
    REQUIRE(report.cells.size() == 2);
    CHECK(report.cells[0].x == doctest::Approx(0.5 * 24 * 12));
    CHECK(report.cells[1].x == doctest::Approx(2.0 * 24 * 12));
    CHECK(std::isfinite(report.scalars.at("loglog_slope")));
    CHECK(report.scalars.at("loglog_slope") < 0.0);
    CHECK_THROWS_AS(tsc::run_rate_check(spec, {1.0}, {.replications = 2}),
                    std::invalid_argument);
}

TEST_CASE("split observations partitions the entries") {
    tsc::SimulationSpec spec = small_spec();
    const tsc::SimulationResult sim = tsc::simulate(spec);
    const tsc::SplitObservations split = tsc::split_observations(sim.obs, 0.8, 99);
    CHECK(split.train.n() + split.validation.n() == sim.obs.n());
    CHECK(split.train.n() == std::lround(0.8 * sim.obs.n()));
    auto key = [](const tsc::Observation& e) {
        return std::tuple<int, int, double>(e.j, e.t, e.y);
    };
    std::vector<std::tuple<int, int, double>> merged, original;
    for (const auto& e : split.train.entries) merged.push_back(key(e));
    for (const auto& e : split.validation.entries) merged.push_back(key(e));
    for (const auto& e : sim.obs.entries) original.push_back(key(e));
    std::sort(merged.begin(), merged.end());
    std::sort(original.begin(), original.end());
    CHECK(merged == original);
    CHECK_THROWS_AS(tsc::split_observations(sim.obs, 1.0, 1), std::invalid_argument);
}

TEST_CASE("spearman correlation") {
    CHECK(tsc::spearman({1, 2, 3, 4}, {2, 4, 9, 16}) == doctest::Approx(1.0));
    CHECK(tsc::spearman({1, 2, 3, 4}, {5, 4, 3, 2}) == doctest::Approx(-1.0));
    CHECK(std::abs(tsc::spearman({1, 2, 3, 4}, {1, 1, 1, 1})) == doctest::Approx(0.0));
}
