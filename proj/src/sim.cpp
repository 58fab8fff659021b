#include "tsc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsc {

namespace {
constexpr int kBurnIn = 1000;
}

double NoiseLaw::sample(std::mt19937_64& rng) const {
    if (param == 0.0) return 0.0;
    if (param < 0.0) {
        throw std::invalid_argument("noise parameter must be >= 0");
    }
    if (kind == Kind::Gaussian) {
        return std::normal_distribution<double>(0.0, param)(rng);
    }
    return std::uniform_real_distribution<double>(-param, param)(rng);
}

LowRankTrend gen_low_rank_trend(int d, int k, int tau, std::mt19937_64& rng) {
    if (k < 1) {
        throw std::invalid_argument("rank must be >= 1");
    }
    if (d < 1 || tau < 1 || k > std::min(d, tau)) {
        throw std::invalid_argument("rank must satisfy k <= min(d, tau)");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    LowRankTrend out;
    out.U0.resize(d, k);
    out.V0.resize(k, tau);
    for (int i = 0; i < d; ++i)
        for (int c = 0; c < k; ++c) out.U0(i, c) = gauss(rng);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < tau; ++c) out.V0(r, c) = gauss(rng);
    out.T0 = out.U0 * out.V0;
    return out;
}

Matrix gen_ar1_rows(int d, int T, double ar_coeff, const NoiseLaw& ar_error,
                    std::mt19937_64& rng) {
    if (std::abs(ar_coeff) >= 1.0) {
        throw std::invalid_argument("non-stationary: AR(1) coefficient must satisfy |a| < 1");
    }
    if (d < 1 || T < 1) {
        throw std::invalid_argument("shape: AR rows need d >= 1 and T >= 1");
    }
    Matrix eps(d, T);
    for (int j = 0; j < d; ++j) {
        double z = 0.0;
        for (int s = 0; s < kBurnIn; ++s) z = ar_coeff * z + ar_error.sample(rng);
        for (int t = 0; t < T; ++t) {
            z = ar_coeff * z + ar_error.sample(rng);
            eps(j, t) = z;
        }
    }
    return eps;
}

ObservationSet mask_and_observe(const Matrix& M, double fraction, SampleMode mode,
                                const NoiseLaw& xi_law, std::mt19937_64& rng) {
    if (fraction <= 0.0) {
        throw std::invalid_argument("observe fraction must be positive");
    }
    const int d = static_cast<int>(M.rows());
    const int T = static_cast<int>(M.cols());
    const long long cells = static_cast<long long>(d) * T;
    const long long count = std::llround(fraction * static_cast<double>(cells));
    ObservationSet obs;
    obs.d = d;
    obs.T = T;
    obs.entries.reserve(static_cast<std::size_t>(std::max(count, 0LL)));

    auto push = [&](long long pos) {
        const int j = static_cast<int>(pos / T);
        const int t = static_cast<int>(pos % T);
        obs.entries.push_back({j, t, M(j, t) + xi_law.sample(rng)});
    };

    if (mode == SampleMode::WithoutReplacement) {
        if (fraction > 1.0) {
            throw std::invalid_argument(
                "observe fraction above 1 requires sampling with replacement");
        }
        // partial Fisher-Yates over the cell indices
        std::vector<long long> idx(static_cast<std::size_t>(cells));
        for (long long i = 0; i < cells; ++i) idx[static_cast<std::size_t>(i)] = i;
        for (long long i = 0; i < count; ++i) {
            std::uniform_int_distribution<long long> pick(i, cells - 1);
            std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
            push(idx[static_cast<std::size_t>(i)]);
        }
    } else {
        std::uniform_int_distribution<long long> pick(0, cells - 1);
        for (long long i = 0; i < count; ++i) push(pick(rng));
    }
    return obs;
}

StructureMatrix structure_for(const SimulationSpec& spec) {
    switch (spec.structure_kind) {
        case StructureKind::Identity:
            if (spec.tau != spec.T) {
                throw std::invalid_argument("identity structure requires tau == T");
            }
            return build_identity(spec.T);
        case StructureKind::Periodic:
            return build_periodic(spec.tau, spec.T);
        case StructureKind::Trigonometric:
            if (spec.tau % 2 == 0) {
                throw std::invalid_argument("trigonometric structure requires odd tau (= 2N+1)");
            }
            return build_trigonometric((spec.tau - 1) / 2, spec.T);
    }
    throw std::invalid_argument("unknown structure kind");
}

SimulationResult simulate(const SimulationSpec& spec) {
    const StructureMatrix S = structure_for(spec);
    std::mt19937_64 rng(spec.seed);

    const LowRankTrend trend = gen_low_rank_trend(spec.d, spec.k, spec.tau, rng);
    SimulationResult out;
    out.truth.t0 = trend.T0;
    out.truth.theta0 = trend.T0 * S.lambda;
    out.truth.m0 = out.truth.theta0.cwiseAbs().maxCoeff();

    Matrix M = out.truth.theta0;
    if (spec.sigma_eps != 0.0 && spec.ar_error.param != 0.0) {
        M += spec.sigma_eps * gen_ar1_rows(spec.d, spec.T, spec.ar_coeff, spec.ar_error, rng);
    }
    out.obs = mask_and_observe(M, spec.observe_fraction, spec.sample_mode, spec.xi_law, rng);
    return out;
}

}  // namespace tsc
