#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tsc {

using Matrix = Eigen::MatrixXd;

/// One noisy entry: value `y` observed at row `j`, column `t` (0-based).
struct Observation {
    int j = 0;
    int t = 0;
    double y = 0.0;
};

/// The observed triplets of a d x T matrix. Duplicate positions are legal:
/// the sampling model draws positions with replacement, and every duplicate
/// contributes its own squared residual.
struct ObservationSet {
    std::vector<Observation> entries;
    int d = 0;  ///< row count of the underlying matrix
    int T = 0;  ///< column count (horizon)

    int n() const { return static_cast<int>(entries.size()); }
};

/// Throws std::invalid_argument if dimensions are non-positive or an entry
/// is out of range. Emptiness is checked by the operations that need data.
void validate(const ObservationSet& obs);

enum class StructureKind { Identity, Periodic, Trigonometric };

const char* to_string(StructureKind kind);

/// The known tau x T structure matrix Lambda together with the analytic
/// sup-norm amplification bound of the corresponding structure kind.
struct StructureMatrix {
    Matrix lambda;  ///< tau x T
    int tau = 0;
    int T = 0;
    StructureKind kind = StructureKind::Identity;
    double m_lambda_tau = 1.0;
};

/// A fitted factor pair. The trend reconstruction is U*V (d x tau); the
/// full-horizon reconstruction is U*V*Lambda (d x T).
struct FactorModel {
    Matrix U;  ///< d x k
    Matrix V;  ///< k x tau
    int k = 0;
    double fitted_risk = 0.0;  ///< empirical risk of U*V*Lambda on the training set
    int iterations = 0;
    std::vector<double> risk_history;  ///< risk after init and after each sweep
};

/// The simulated target: theta0 = t0 * Lambda, with m0 bounding |theta0|.
struct GroundTruth {
    Matrix theta0;  ///< d x T
    Matrix t0;      ///< d x tau
    double m0 = 0.0;
};

/// Mean squared residual over the observed entries:
/// (1/n) sum_i (y_i - A[j_i, t_i])^2.
double empirical_risk(const ObservationSet& obs, const Matrix& A);

/// Squared error under uniform sampling: (dT)^{-1} ||A - B||_F^2.
double pi_mse(const Matrix& A, const Matrix& B);

/// U * V * Lambda.
Matrix reconstruct(const FactorModel& model, const StructureMatrix& S);

}  // namespace tsc
