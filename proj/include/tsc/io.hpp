#pragma once

#include "tsc/bench.hpp"
#include "tsc/core.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tsc {

/// Formats with 17 significant digits so doubles round-trip exactly.
std::string format_double(double v);

/// CSV with header "j,t,y"; j and t are 0-based. Dimensions default to
/// max index + 1 and can be overridden (entries must stay in range).
/// Malformed rows report their line number.
ObservationSet load_observations(const std::filesystem::path& path,
                                 std::optional<int> rows = std::nullopt,
                                 std::optional<int> cols = std::nullopt);
void save_observations(const ObservationSet& obs, const std::filesystem::path& path);

struct MatrixWithMissing {
    Matrix values;         ///< NaN at missing cells
    ObservationSet observed;
};

/// Dense CSV; empty cells or the token NaN mark missing values. drop_cols
/// removes the listed 0-based columns before anything else. Ragged rows
/// are rejected.
MatrixWithMissing load_matrix_with_missing(const std::filesystem::path& path,
                                           bool has_header = false,
                                           const std::vector<int>& drop_cols = {});

/// Dense CSV, one row per line; optional "c0,c1,..." header.
void save_matrix(const Matrix& A, const std::filesystem::path& path, bool header = false);
Matrix load_matrix(const std::filesystem::path& path, bool has_header = false);

/// One row per cell: experiment,model,x,mean_mse,std_mse,replications.
void save_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
/// selected_k,frequency rows.
void save_rank_frequency_csv(const ExperimentReport& report, const std::filesystem::path& path);
/// Full report (config echo, scalars, cells, frequencies) as JSON.
void save_report_json(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace tsc
