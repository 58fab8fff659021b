#include "tsc/structure.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tsc {

StructureMatrix build_identity(int T) {
    if (T < 1) {
        throw std::invalid_argument("horizon must be >= 1");
    }
    StructureMatrix S;
    S.lambda = Matrix::Identity(T, T);
    S.tau = T;
    S.T = T;
    S.kind = StructureKind::Identity;
    S.m_lambda_tau = 1.0;
    return S;
}

StructureMatrix build_periodic(int tau, int T) {
    if (tau < 1 || T < tau) {
        throw std::invalid_argument("period must satisfy 1 <= tau <= T");
    }
    if (T % tau != 0) {
        throw std::invalid_argument("period must divide horizon");
    }
    StructureMatrix S;
    S.lambda = Matrix::Zero(tau, T);
    for (int t = 0; t < T; ++t) {
        S.lambda(t % tau, t) = 1.0;
    }
    S.tau = tau;
    S.T = T;
    S.kind = StructureKind::Periodic;
    S.m_lambda_tau = 1.0;
    return S;
}

StructureMatrix build_trigonometric(int N, int T) {
    if (N < 0) {
        throw std::invalid_argument("frequency cutoff must be >= 0");
    }
    const int tau = 2 * N + 1;
    if (tau > T) {
        throw std::invalid_argument("2N+1 rows exceed the horizon");
    }
    StructureMatrix S;
    S.lambda = Matrix::Zero(tau, T);
    for (int t = 0; t < T; ++t) {
        // time convention: the basis is sampled at (t+1)/T for column t
        const double x = 2.0 * std::numbers::pi * static_cast<double>(t + 1) / T;
        S.lambda(0, t) = 1.0;
        for (int m = 1; m <= N; ++m) {
            S.lambda(2 * m - 1, t) = std::cos(m * x);
            S.lambda(2 * m, t) = std::sin(m * x);
        }
    }
    S.tau = tau;
    S.T = T;
    S.kind = StructureKind::Trigonometric;
    S.m_lambda_tau = static_cast<double>(tau);
    return S;
}

ObservationSet fold_observations(const ObservationSet& obs, int tau) {
    if (tau < 1) {
        throw std::invalid_argument("period must be >= 1");
    }
    validate(obs);
    ObservationSet folded;
    folded.d = obs.d;
    folded.T = tau;
    folded.entries.reserve(obs.entries.size());
    for (const Observation& e : obs.entries) {
        folded.entries.push_back({e.j, e.t % tau, e.y});
    }
    return folded;
}

}  // namespace tsc
