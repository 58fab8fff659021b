// tscomplete: low-rank completion of partially observed time-series matrices.
//
// Subcommands:
//   simulate     draw a synthetic dataset and write it as CSV
//   fit          factor fit of an observation file under a chosen structure
//   select-rank  fit a rank path and calibrate the penalty
//   reproduce    canned experiment suites (tables / figures / rate check)

#include "tsc/bench.hpp"
#include "tsc/io.hpp"
#include "tsc/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Expands `--config <file>` into the arguments it stands for. The file is a
// flat key=value list mirroring the flag names; file values are inserted
// before the command-line flags, so explicit flags win.
std::vector<std::string> merge_config_args(std::vector<std::string> args) {
    if (args.empty()) return args;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) return args;

    static const std::set<std::string> flag_keys = {"paper-scale"};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::vector<std::string> from_file;
    std::string line;
    while (std::getline(in, line)) {
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line is not key=value: " + text);
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || key == "config") continue;
        if (flag_keys.count(key)) {
            if (value == "true" || value == "1") from_file.push_back("--" + key);
            continue;
        }
        from_file.push_back("--" + key);
        from_file.push_back(value);
    }
    std::vector<std::string> merged;
    merged.push_back(args[0]);
    merged.insert(merged.end(), from_file.begin(), from_file.end());
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

tsc::StructureKind parse_structure(const std::string& name) {
    if (name == "identity") return tsc::StructureKind::Identity;
    if (name == "periodic") return tsc::StructureKind::Periodic;
    if (name == "fourier") return tsc::StructureKind::Trigonometric;
    throw CLI::ValidationError("--structure", "expected identity, periodic or fourier");
}

tsc::NoiseLaw parse_law(const std::string& kind, double param) {
    if (kind == "gaussian") return tsc::NoiseLaw::gaussian(param);
    if (kind == "uniform") return tsc::NoiseLaw::uniform(param);
    throw CLI::ValidationError("noise law", "expected gaussian or uniform");
}

ordered_json echo_to_json(const ConfigEcho& echo) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : echo) j[k] = v;
    return j;
}

void write_json(const ordered_json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

tsc::StructureMatrix build_structure(tsc::StructureKind kind, int tau, int T) {
    switch (kind) {
        case tsc::StructureKind::Identity: return tsc::build_identity(T);
        case tsc::StructureKind::Periodic: return tsc::build_periodic(tau, T);
        case tsc::StructureKind::Trigonometric:
            if (tau % 2 == 0) {
                throw std::runtime_error("fourier structure needs an odd --tau (= 2N+1)");
            }
            return tsc::build_trigonometric((tau - 1) / 2, T);
    }
    throw std::runtime_error("unknown structure");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    int d = 100, T = 100, tau = 25, rank = 2;
    std::string structure = "periodic";
    double sigma_eps = 0.0;
    double ar_coeff = 0.5;
    std::string ar_error = "uniform";
    double ar_param = 1.0;
    std::string xi_law = "gaussian";
    double xi_param = 0.01;
    double observe_fraction = 0.3;
    std::string sample_mode = "without";
    std::uint64_t seed = 0;
    std::string config;
    std::string out = ".";
};

ConfigEcho echo_simulate(const SimulateArgs& a) {
    return {{"command", "simulate"},
            {"d", std::to_string(a.d)},
            {"T", std::to_string(a.T)},
            {"tau", std::to_string(a.tau)},
            {"rank", std::to_string(a.rank)},
            {"structure", a.structure},
            {"sigma_eps", tsc::format_double(a.sigma_eps)},
            {"ar_coeff", tsc::format_double(a.ar_coeff)},
            {"ar_error", a.ar_error},
            {"ar_param", tsc::format_double(a.ar_param)},
            {"xi_law", a.xi_law},
            {"xi_param", tsc::format_double(a.xi_param)},
            {"observe_fraction", tsc::format_double(a.observe_fraction)},
            {"sample_mode", a.sample_mode},
            {"seed", std::to_string(a.seed)},
            {"config", a.config},
            {"out", a.out}};
}

int run_simulate(const SimulateArgs& a) {
    tsc::SimulationSpec spec;
    spec.d = a.d;
    spec.T = a.T;
    spec.tau = a.tau;
    spec.k = a.rank;
    spec.structure_kind = parse_structure(a.structure);
    spec.sigma_eps = a.sigma_eps;
    spec.ar_coeff = a.ar_coeff;
    spec.ar_error = parse_law(a.ar_error, a.ar_param);
    spec.xi_law = parse_law(a.xi_law, a.xi_param);
    spec.observe_fraction = a.observe_fraction;
    spec.sample_mode = a.sample_mode == "with" ? tsc::SampleMode::WithReplacement
                                               : tsc::SampleMode::WithoutReplacement;
    spec.seed = a.seed;

    const tsc::SimulationResult sim = tsc::simulate(spec);
    const fs::path dir = ensure_dir(a.out);
    tsc::save_observations(sim.obs, dir / "observations.csv");
    tsc::save_matrix(sim.truth.theta0, dir / "theta0.csv");
    tsc::save_matrix(sim.truth.t0, dir / "t0.csv");

    ordered_json j;
    j["n"] = sim.obs.n();
    j["m0"] = sim.truth.m0;
    j["config"] = echo_to_json(echo_simulate(a));
    write_json(j, dir / "simulate.json");
    std::cout << "wrote " << sim.obs.n() << " observations to "
              << (dir / "observations.csv").string() << "\n";
    return 0;
}

// Loads either an observation triplet file or a dense matrix with missing
// cells; exactly one of the two sources must be given.
tsc::ObservationSet load_input(const std::string& obs_path, const std::string& matrix_path,
                               bool header, const std::vector<int>& drop_cols, int rows,
                               int cols) {
    if (obs_path.empty() == matrix_path.empty()) {
        throw CLI::ValidationError("--obs/--matrix", "give exactly one input file");
    }
    if (!matrix_path.empty()) {
        return tsc::load_matrix_with_missing(matrix_path, header, drop_cols).observed;
    }
    return tsc::load_observations(obs_path,
                                  rows > 0 ? std::optional<int>(rows) : std::nullopt,
                                  cols > 0 ? std::optional<int>(cols) : std::nullopt);
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::string obs;
    std::string matrix;
    bool header = false;
    std::vector<int> drop_cols;
    std::string structure;
    int tau = 0;
    int rank = 0;
    int rows = 0, cols = 0;
    std::uint64_t seed = 0;
    int max_iters = 200;
    double tol = 1e-8;
    double ridge = 1e-9;
    double holdout = 0.0;
    std::string config;
    std::string out = ".";
};

ConfigEcho echo_fit(const FitArgs& a) {
    return {{"command", "fit"},
            {"obs", a.obs},
            {"matrix", a.matrix},
            {"structure", a.structure},
            {"tau", std::to_string(a.tau)},
            {"rank", std::to_string(a.rank)},
            {"rows", std::to_string(a.rows)},
            {"cols", std::to_string(a.cols)},
            {"seed", std::to_string(a.seed)},
            {"max_iters", std::to_string(a.max_iters)},
            {"tol", tsc::format_double(a.tol)},
            {"ridge", tsc::format_double(a.ridge)},
            {"holdout", tsc::format_double(a.holdout)},
            {"config", a.config},
            {"out", a.out}};
}

int run_fit(const FitArgs& a) {
    const tsc::StructureKind kind = parse_structure(a.structure);
    if (kind != tsc::StructureKind::Identity && a.tau <= 0) {
        throw CLI::ValidationError("--tau", "required for periodic and fourier structures");
    }
    const tsc::ObservationSet obs =
        load_input(a.obs, a.matrix, a.header, a.drop_cols, a.rows, a.cols);
    const int tau = kind == tsc::StructureKind::Identity ? obs.T : a.tau;
    const tsc::StructureMatrix S = build_structure(kind, tau, obs.T);

    tsc::AlsConfig cfg;
    cfg.seed = a.seed;
    cfg.max_iters = a.max_iters;
    cfg.tol = a.tol;
    cfg.ridge = a.ridge;

    ordered_json j;
    tsc::FactorModel model;
    if (a.holdout > 0.0) {
        const tsc::SplitObservations split =
            tsc::split_observations(obs, 1.0 - a.holdout, tsc::derive_seed(a.seed, 17));
        model = tsc::als_fit(split.train, S, a.rank, cfg);
        j["validation_risk"] = tsc::empirical_risk(split.validation, tsc::reconstruct(model, S));
        j["train_n"] = split.train.n();
        j["validation_n"] = split.validation.n();
    } else {
        model = tsc::als_fit(obs, S, a.rank, cfg);
    }

    const fs::path dir = ensure_dir(a.out);
    tsc::save_matrix(tsc::reconstruct(model, S), dir / "reconstruction.csv");
    tsc::save_matrix(model.U, dir / "U.csv");
    tsc::save_matrix(model.V, dir / "V.csv");

    j["fitted_risk"] = model.fitted_risk;
    j["iterations"] = model.iterations;
    j["k"] = model.k;
    j["tau"] = tau;
    j["structure"] = a.structure;
    j["seed"] = a.seed;
    j["config"] = echo_to_json(echo_fit(a));
    write_json(j, dir / "fit.json");
    std::cout << "fitted_risk " << tsc::format_double(model.fitted_risk) << " after "
              << model.iterations << " iterations\n";
    return 0;
}

// ------------------------------------------------------------- select-rank

struct SelectArgs {
    std::string obs;
    std::string matrix;
    bool header = false;
    std::vector<int> drop_cols;
    std::string structure;
    int tau = 0;
    int rank_max = 0;
    double c_pen = -1.0;  // < 0: calibrate with the slope heuristic
    int rows = 0, cols = 0;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string config;
    std::string out = ".";
};

ConfigEcho echo_select(const SelectArgs& a) {
    return {{"command", "select-rank"},
            {"obs", a.obs},
            {"matrix", a.matrix},
            {"structure", a.structure},
            {"tau", std::to_string(a.tau)},
            {"rank_max", std::to_string(a.rank_max)},
            {"c_pen", tsc::format_double(a.c_pen)},
            {"rows", std::to_string(a.rows)},
            {"cols", std::to_string(a.cols)},
            {"seed", std::to_string(a.seed)},
            {"threads", std::to_string(a.threads)},
            {"config", a.config},
            {"out", a.out}};
}

int run_select(const SelectArgs& a) {
    const tsc::StructureKind kind = parse_structure(a.structure);
    if (kind != tsc::StructureKind::Identity && a.tau <= 0) {
        throw CLI::ValidationError("--tau", "required for periodic and fourier structures");
    }
    if (a.rank_max < 1) {
        throw CLI::ValidationError("--rank-max", "must be >= 1");
    }
    const tsc::ObservationSet obs =
        load_input(a.obs, a.matrix, a.header, a.drop_cols, a.rows, a.cols);
    const int tau = kind == tsc::StructureKind::Identity ? obs.T : a.tau;
    const tsc::StructureMatrix S = build_structure(kind, tau, obs.T);

    std::vector<int> ks;
    for (int k = 1; k <= a.rank_max; ++k) ks.push_back(k);
    tsc::AlsConfig cfg;
    cfg.seed = a.seed;

    tsc::RankSelectionTrace trace = tsc::fit_rank_path(obs, S, ks, cfg, nullptr, a.threads);
    if (a.c_pen >= 0.0) {
        trace.selected_k = tsc::select_rank_penalized(trace.risks, obs.d, tau, obs.n(), a.c_pen);
        trace.penalty_constant =
            16.0 * a.c_pen * (std::log(static_cast<double>(obs.n())) / obs.n()) * (obs.d + tau);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            trace.criterion[i] = trace.risks[i] + trace.penalty_constant * ks[i];
        }
        trace.heuristic.reset();
    }

    const fs::path dir = ensure_dir(a.out);
    {
        std::ofstream out(dir / "rank_path.csv", std::ios::binary);
        out << "k,risk,criterion\n";
        for (std::size_t i = 0; i < ks.size(); ++i) {
            out << ks[i] << ',' << tsc::format_double(trace.risks[i]) << ','
                << tsc::format_double(trace.criterion[i]) << '\n';
        }
    }
    if (trace.heuristic) {
        std::ofstream out(dir / "heuristic.csv", std::ios::binary);
        out << "c,k_of_c,risk_of_c\n";
        for (std::size_t i = 0; i < trace.heuristic->c_grid.size(); ++i) {
            out << tsc::format_double(trace.heuristic->c_grid[i]) << ','
                << trace.heuristic->k_of_c[i] << ','
                << tsc::format_double(trace.heuristic->risk_of_c[i]) << '\n';
        }
    }

    ordered_json j;
    j["selected_k"] = trace.selected_k;
    j["penalty_constant"] = trace.penalty_constant;
    if (trace.heuristic) {
        j["c_tilde"] = trace.heuristic->c_tilde;
        j["k_final"] = trace.heuristic->k_final;
    }
    j["n"] = obs.n();
    j["config"] = echo_to_json(echo_select(a));
    write_json(j, dir / "selection.json");
    std::cout << "selected rank " << trace.selected_k << "\n";
    return 0;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string target;
    bool paper_scale = false;
    int d = 0, T = 0, tau = 0;  // 0 = target default
    int replications = 0;       // 0 = target default
    std::uint64_t seed = 1;
    int threads = 0;
    std::string config;
    std::string out = ".";
};

ConfigEcho echo_reproduce(const ReproduceArgs& a, const tsc::SimulationSpec& spec, int reps) {
    return {{"command", "reproduce"},
            {"target", a.target},
            {"paper_scale", a.paper_scale ? "true" : "false"},
            {"d", std::to_string(spec.d)},
            {"T", std::to_string(spec.T)},
            {"tau", std::to_string(spec.tau)},
            {"replications", std::to_string(reps)},
            {"seed", std::to_string(a.seed)},
            {"config", a.config},
            {"out", a.out}};
}

tsc::ExperimentReport merge_xi_reports(const tsc::ExperimentReport& gauss,
                                       const tsc::ExperimentReport& unif) {
    tsc::ExperimentReport merged;
    merged.name = gauss.name;
    merged.config = gauss.config;
    for (const auto& cell : gauss.cells) {
        auto c = cell;
        c.model += "/xi=gaussian";
        merged.cells.push_back(c);
    }
    for (const auto& cell : unif.cells) {
        auto c = cell;
        c.model += "/xi=uniform";
        merged.cells.push_back(c);
    }
    for (const auto& [k, v] : gauss.scalars) merged.scalars["xi_gaussian_" + k] = v;
    for (const auto& [k, v] : unif.scalars) merged.scalars["xi_uniform_" + k] = v;
    return merged;
}

int run_reproduce(const ReproduceArgs& a) {
    const int d = a.d > 0 ? a.d : (a.paper_scale ? 1000 : 200);
    const int T = a.T > 0 ? a.T : 100;
    const int tau = a.tau > 0 ? a.tau : 25;
    const int reps = a.replications > 0 ? a.replications : 20;

    tsc::SimulationSpec spec;
    spec.d = d;
    spec.T = T;
    spec.tau = tau;
    spec.structure_kind = tsc::StructureKind::Periodic;
    spec.observe_fraction = 0.3;
    spec.ar_coeff = 0.5;
    spec.seed = a.seed;

    tsc::BenchOptions opt;
    opt.replications = reps;
    opt.threads = a.threads;

    const fs::path dir = ensure_dir(a.out);
    tsc::ExperimentReport report;

    if (a.target == "table1" || a.target == "table2" || a.target == "table3") {
        const int k = a.target == "table1" ? 2 : (a.target == "table2" ? 5 : 8);
        spec.k = k;
        spec.sigma_eps = 0.065;
        spec.ar_error = tsc::NoiseLaw::uniform(1.0);
        spec.xi_law = tsc::NoiseLaw::gaussian(0.01);
        const tsc::ExperimentReport gauss = tsc::run_two_model_comparison(spec, {k}, opt);
        tsc::SimulationSpec unif_spec = spec;
        unif_spec.xi_law = tsc::NoiseLaw::uniform(std::sqrt(3.0) / 100.0);
        const tsc::ExperimentReport unif = tsc::run_two_model_comparison(unif_spec, {k}, opt);
        report = merge_xi_reports(gauss, unif);
    } else if (a.target == "fig1") {
        spec.k = 2;
        spec.sigma_eps = 0.5;
        spec.ar_error = tsc::NoiseLaw::gaussian(1.0 / 3.0);
        spec.xi_law = tsc::NoiseLaw::gaussian(0.01);
        report = tsc::run_two_model_comparison(spec, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, opt);
    } else if (a.target == "fig2" || a.target == "fig3") {
        spec.k = 2;
        spec.ar_error = a.target == "fig2" ? tsc::NoiseLaw::gaussian(1.0 / 3.0)
                                           : tsc::NoiseLaw::uniform(1.0);
        spec.xi_law = tsc::NoiseLaw::gaussian(0.01);
        report = tsc::run_sigma_sweep(spec, {0.02, 0.1, 0.5, 1.0, 2.0}, opt);
    } else if (a.target == "table6") {
        spec.k = 5;
        spec.sigma_eps = 0.2;
        spec.ar_error = tsc::NoiseLaw::gaussian(1.0 / 3.0);
        spec.xi_law = tsc::NoiseLaw::gaussian(std::sqrt(0.5));
        report = tsc::run_rank_selection_experiment(spec, 20, opt);
        tsc::save_rank_frequency_csv(report, dir / "rank_frequency.csv");
    } else if (a.target == "rate") {
        spec.d = a.d > 0 ? a.d : 100;
        spec.k = 2;
        spec.sigma_eps = 0.0;
        spec.xi_law = tsc::NoiseLaw::gaussian(0.01);
        spec.observe_fraction = 0.25;
        spec.sample_mode = tsc::SampleMode::WithReplacement;
        report = tsc::run_rate_check(spec, {1.0, 2.0, 4.0, 8.0}, opt);
    } else {
        throw CLI::ValidationError("target",
                                   "expected table1|table2|table3|fig1|fig2|fig3|table6|rate");
    }

    const ConfigEcho echo = echo_reproduce(a, spec, reps);
    for (const auto& [k, v] : echo) report.config.emplace_back("cli_" + k, v);
    tsc::save_report_csv(report, dir / "report.csv");
    tsc::save_report_json(report, dir / "report.json");
    std::cout << "wrote " << (dir / "report.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank completion of partially observed time-series matrices"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    SimulateArgs sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "draw a synthetic dataset");
    c_sim->add_option("--config", sim.config, "flat key=value file; flags win");
    c_sim->add_option("--d", sim.d, "row count");
    c_sim->add_option("--T", sim.T, "horizon");
    c_sim->add_option("--tau", sim.tau, "structure period / basis size");
    c_sim->add_option("--rank", sim.rank, "true rank");
    c_sim->add_option("--structure", sim.structure, "identity|periodic|fourier");
    c_sim->add_option("--sigma-eps", sim.sigma_eps, "temporal noise multiplier");
    c_sim->add_option("--ar-coeff", sim.ar_coeff, "AR(1) coefficient");
    c_sim->add_option("--ar-error", sim.ar_error, "gaussian|uniform");
    c_sim->add_option("--ar-param", sim.ar_param, "AR innovation std / half-width");
    c_sim->add_option("--xi-law", sim.xi_law, "gaussian|uniform");
    c_sim->add_option("--xi-param", sim.xi_param, "measurement noise std / half-width");
    c_sim->add_option("--observe-fraction", sim.observe_fraction, "observed fraction of entries");
    c_sim->add_option("--sample-mode", sim.sample_mode, "without|with (replacement)");
    c_sim->add_option("--seed", sim.seed, "RNG seed");
    c_sim->add_option("--out", sim.out, "output directory");

    FitArgs fit;
    CLI::App* c_fit = app.add_subcommand("fit", "factor fit of an observation file");
    c_fit->add_option("--config", fit.config, "flat key=value file; flags win");
    c_fit->add_option("--obs", fit.obs, "observations CSV (header j,t,y)");
    c_fit->add_option("--matrix", fit.matrix, "dense CSV, empty/NaN cells missing");
    c_fit->add_flag("--header", fit.header, "dense CSV has a header line");
    c_fit->add_option("--drop-cols", fit.drop_cols, "columns to drop from the dense CSV")
        ->delimiter(',');
    c_fit->add_option("--structure", fit.structure, "identity|periodic|fourier")->required();
    c_fit->add_option("--tau", fit.tau, "period / basis size");
    c_fit->add_option("--rank", fit.rank, "rank budget")->required();
    c_fit->add_option("--rows", fit.rows, "override row count");
    c_fit->add_option("--cols", fit.cols, "override column count");
    c_fit->add_option("--seed", fit.seed, "RNG seed");
    c_fit->add_option("--max-iters", fit.max_iters, "iteration cap");
    c_fit->add_option("--tol", fit.tol, "relative risk-decrease stop");
    c_fit->add_option("--ridge", fit.ridge, "Tikhonov level");
    c_fit->add_option("--holdout", fit.holdout, "validation fraction of entries");
    c_fit->add_option("--out", fit.out, "output directory");

    SelectArgs sel;
    CLI::App* c_sel = app.add_subcommand("select-rank", "rank path + penalty calibration");
    c_sel->add_option("--config", sel.config, "flat key=value file; flags win");
    c_sel->add_option("--obs", sel.obs, "observations CSV (header j,t,y)");
    c_sel->add_option("--matrix", sel.matrix, "dense CSV, empty/NaN cells missing");
    c_sel->add_flag("--header", sel.header, "dense CSV has a header line");
    c_sel->add_option("--drop-cols", sel.drop_cols, "columns to drop from the dense CSV")
        ->delimiter(',');
    c_sel->add_option("--structure", sel.structure, "identity|periodic|fourier")->required();
    c_sel->add_option("--tau", sel.tau, "period / basis size");
    c_sel->add_option("--rank-max", sel.rank_max, "largest candidate rank")->required();
    c_sel->add_option("--c-pen", sel.c_pen, "fixed penalty constant (skips the heuristic)");
    c_sel->add_option("--rows", sel.rows, "override row count");
    c_sel->add_option("--cols", sel.cols, "override column count");
    c_sel->add_option("--seed", sel.seed, "RNG seed");
    c_sel->add_option("--threads", sel.threads, "parallel rank fits (0 = hardware)");
    c_sel->add_option("--out", sel.out, "output directory");

    ReproduceArgs rep;
    CLI::App* c_rep = app.add_subcommand("reproduce", "canned experiment suites");
    c_rep->add_option("--config", rep.config, "flat key=value file; flags win");
    c_rep->add_option("target", rep.target, "table1|table2|table3|fig1|fig2|fig3|table6|rate")
        ->required();
    c_rep->add_flag("--paper-scale", rep.paper_scale, "full-size dimensions (d = 1000)");
    c_rep->add_option("--d", rep.d, "override row count");
    c_rep->add_option("--T", rep.T, "override horizon");
    c_rep->add_option("--tau", rep.tau, "override period");
    c_rep->add_option("--replications", rep.replications, "override replication count");
    c_rep->add_option("--seed", rep.seed, "master seed");
    c_rep->add_option("--threads", rep.threads, "worker threads (0 = hardware)");
    c_rep->add_option("--out", rep.out, "output directory");

    try {
        std::vector<std::string> merged =
            merge_config_args(std::vector<std::string>(argv + 1, argv + argc));
        std::reverse(merged.begin(), merged.end());  // CLI11 consumes reversed args
        app.parse(std::move(merged));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_sim->parsed()) return run_simulate(sim);
        if (c_fit->parsed()) return run_fit(fit);
        if (c_sel->parsed()) return run_select(sel);
        if (c_rep->parsed()) return run_reproduce(rep);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
