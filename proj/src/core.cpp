#include "tsc/core.hpp"

#include <stdexcept>
#include <string>

namespace tsc {

void validate(const ObservationSet& obs) {
    if (obs.d < 1 || obs.T < 1) {
        throw std::invalid_argument("shape: observation set needs d >= 1 and T >= 1");
    }
    for (const Observation& e : obs.entries) {
        if (e.j < 0 || e.j >= obs.d || e.t < 0 || e.t >= obs.T) {
            throw std::invalid_argument("shape: entry (" + std::to_string(e.j) + "," +
                                        std::to_string(e.t) + ") outside " +
                                        std::to_string(obs.d) + "x" + std::to_string(obs.T));
        }
    }
}

const char* to_string(StructureKind kind) {
    switch (kind) {
        case StructureKind::Identity: return "identity";
        case StructureKind::Periodic: return "periodic";
        case StructureKind::Trigonometric: return "trigonometric";
    }
    return "unknown";
}

double empirical_risk(const ObservationSet& obs, const Matrix& A) {
    if (obs.entries.empty()) {
        throw std::invalid_argument("empty observation set");
    }
    if (A.rows() != obs.d || A.cols() != obs.T) {
        throw std::invalid_argument("shape: matrix is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()) + ", observations expect " +
                                    std::to_string(obs.d) + "x" + std::to_string(obs.T));
    }
    validate(obs);
    double acc = 0.0;
    for (const Observation& e : obs.entries) {
        const double r = e.y - A(e.j, e.t);
        acc += r * r;
    }
    return acc / static_cast<double>(obs.n());
}

double pi_mse(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("shape: pi_mse needs equal dimensions");
    }
    if (A.size() == 0) {
        throw std::invalid_argument("shape: pi_mse on empty matrices");
    }
    return (A - B).squaredNorm() / static_cast<double>(A.size());
}

Matrix reconstruct(const FactorModel& model, const StructureMatrix& S) {
    if (model.U.cols() != model.V.rows()) {
        throw std::invalid_argument("shape: factor inner dimensions differ");
    }
    if (model.V.cols() != S.tau || S.lambda.rows() != S.tau || S.lambda.cols() != S.T) {
        throw std::invalid_argument("shape: V has " + std::to_string(model.V.cols()) +
                                    " columns, structure expects " + std::to_string(S.tau));
    }
    return model.U * model.V * S.lambda;
}

}  // namespace tsc
