#pragma once

#include "tsc/core.hpp"

#include <cstdint>

namespace tsc {

struct AlsConfig {
    int max_iters = 200;
    double tol = 1e-8;        ///< stop when the relative risk decrease falls below this
    double ridge = 1e-9;      ///< Tikhonov level, centered at the previous iterate
    double init_scale = 1.0;  ///< std-dev of the Gaussian factor initialization
    std::uint64_t seed = 0;
    int restarts = 3;  ///< extra attempts from derived seeds when the tolerance was not met
    bool project_constraints = false;  ///< post-hoc clipping of U and V entries
    double m0 = 1.0;                   ///< sup-norm bound used by the clipping projection
};

/// Alternating least squares for min_{U,V} empirical_risk(obs, U*V*Lambda).
/// Each sweep solves the U rows first, then V, both exactly up to the ridge
/// term; the recorded risk sequence is non-increasing. Rows (or factor
/// columns) touched by no observation stay at their previous value because
/// the ridge is centered there. With ridge == 0 a singular system throws
/// "degenerate design".
///
/// A run that exhausts max_iters without meeting tol is retried from the
/// next derived initialization (degenerate valleys keep a microscopic risk
/// slope forever, so hitting the cap flags them); the best attempt by fitted
/// risk is returned. Everything is a pure function of (obs, S, k, cfg).
///
/// With project_constraints set, U and V entries are clipped to
/// +/- sqrt(m0 / (k * S.m_lambda_tau)) after the iteration and fitted_risk is
/// re-evaluated; risk_history keeps the unclipped sequence.
FactorModel als_fit(const ObservationSet& obs, const StructureMatrix& S, int k,
                    const AlsConfig& cfg);

/// One exact U half-step: every row of U solves its ridge-regularized
/// regression against W = V*Lambda, observations grouped by row.
void solve_row_regression(const ObservationSet& obs, const StructureMatrix& S, Matrix& U,
                          const Matrix& V, double ridge);

/// One exact V half-step with U fixed. When every Lambda column has a single
/// nonzero (identity, periodic) the system decouples per structure column;
/// otherwise the full k*tau normal equations are solved.
void solve_factor_regression(const ObservationSet& obs, const StructureMatrix& S,
                             const Matrix& U, Matrix& V, double ridge);

}  // namespace tsc
