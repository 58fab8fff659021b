#pragma once

#include "tsc/structure.hpp"

#include <cstdint>
#include <random>

namespace tsc {

/// Centered scalar noise law. param is the std-dev for Gaussian and the
/// half-width for UniformSymmetric; param == 0 degenerates to zero noise.
struct NoiseLaw {
    enum class Kind { Gaussian, UniformSymmetric };
    Kind kind = Kind::Gaussian;
    double param = 0.0;

    static NoiseLaw gaussian(double std_dev) { return {Kind::Gaussian, std_dev}; }
    static NoiseLaw uniform(double half_width) { return {Kind::UniformSymmetric, half_width}; }

    double variance() const {
        return kind == Kind::Gaussian ? param * param : param * param / 3.0;
    }
    double sample(std::mt19937_64& rng) const;
};

enum class SampleMode { WithoutReplacement, WithReplacement };

/// Full generative description of one synthetic dataset.
struct SimulationSpec {
    int d = 0;
    int T = 0;
    int tau = 0;
    int k = 0;
    StructureKind structure_kind = StructureKind::Periodic;
    double sigma_eps = 1.0;                       ///< multiplier on the temporal noise
    double ar_coeff = 0.5;                        ///< AR(1) coefficient, |a| < 1
    NoiseLaw ar_error = NoiseLaw::uniform(1.0);   ///< AR innovation law
    NoiseLaw xi_law = NoiseLaw::gaussian(0.01);   ///< per-observation measurement error
    double observe_fraction = 0.3;                ///< > 1 only valid with replacement
    SampleMode sample_mode = SampleMode::WithoutReplacement;
    std::uint64_t seed = 0;
};

struct LowRankTrend {
    Matrix U0;  ///< d x k, i.i.d. standard normal
    Matrix V0;  ///< k x tau, i.i.d. standard normal
    Matrix T0;  ///< U0 * V0
};

LowRankTrend gen_low_rank_trend(int d, int k, int tau, std::mt19937_64& rng);

/// d independent AR(1) rows z_t = a*z_{t-1} + eta_t, eta i.i.d. per ar_error,
/// started from 0 with a 1000-step burn-in. With compactly supported
/// innovations every value is bounded by half_width / (1 - |a|).
Matrix gen_ar1_rows(int d, int T, double ar_coeff, const NoiseLaw& ar_error,
                    std::mt19937_64& rng);

/// Draws round(fraction * d * T) positions and observes M there plus xi
/// noise. Without replacement the positions are distinct uniform draws and
/// fraction must stay <= 1; with replacement they are i.i.d. uniform draws.
ObservationSet mask_and_observe(const Matrix& M, double fraction, SampleMode mode,
                                const NoiseLaw& xi_law, std::mt19937_64& rng);

/// Builds the Lambda the simulation asks for (identity requires tau == T,
/// trigonometric requires odd tau).
StructureMatrix structure_for(const SimulationSpec& spec);

struct SimulationResult {
    GroundTruth truth;
    ObservationSet obs;
};

/// trend -> theta0 = T0*Lambda -> M = theta0 + sigma_eps*eps -> mask + xi.
/// All randomness flows through one generator seeded with spec.seed.
SimulationResult simulate(const SimulationSpec& spec);

}  // namespace tsc
