#include "tsc/als.hpp"

#include "tsc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace tsc {

namespace {

// Indices of obs.entries grouped by a key in [0, buckets), CSR-style.
struct Grouping {
    std::vector<int> ptr;    // buckets + 1 offsets
    std::vector<int> items;  // entry indices, original order within a bucket
};

Grouping group_by(const ObservationSet& obs, int buckets, bool by_row, const std::vector<int>& col_of_t) {
    Grouping g;
    g.ptr.assign(buckets + 1, 0);
    for (const Observation& e : obs.entries) {
        const int key = by_row ? e.j : col_of_t[e.t];
        ++g.ptr[key + 1];
    }
    for (int b = 0; b < buckets; ++b) g.ptr[b + 1] += g.ptr[b];
    g.items.resize(obs.entries.size());
    std::vector<int> cursor(g.ptr.begin(), g.ptr.end() - 1);
    for (int i = 0; i < obs.n(); ++i) {
        const Observation& e = obs.entries[i];
        const int key = by_row ? e.j : col_of_t[e.t];
        g.items[cursor[key]++] = i;
    }
    return g;
}

// Column structure of Lambda: when every column has exactly one nonzero the
// V half-step decouples into tau small systems.
struct ColumnMap {
    bool separable = false;
    std::vector<int> row_of_t;     // index of the nonzero per column
    std::vector<double> scale_of_t;
};

ColumnMap analyze_columns(const Matrix& lambda) {
    ColumnMap map;
    const int tau = static_cast<int>(lambda.rows());
    const int T = static_cast<int>(lambda.cols());
    map.row_of_t.assign(T, 0);
    map.scale_of_t.assign(T, 0.0);
    map.separable = true;
    for (int t = 0; t < T; ++t) {
        int nonzeros = 0;
        for (int l = 0; l < tau; ++l) {
            if (lambda(l, t) != 0.0) {
                ++nonzeros;
                map.row_of_t[t] = l;
                map.scale_of_t[t] = lambda(l, t);
            }
        }
        if (nonzeros != 1) {
            map.separable = false;
            break;
        }
    }
    return map;
}

// Solves (G + ridge*I) x = b + ridge*center in place of x. With ridge == 0 a
// rank-deficient G throws "degenerate design".
void solve_normal_equations(const Matrix& G, const Eigen::VectorXd& b, double ridge,
                            const Eigen::VectorXd& center, Eigen::Ref<Eigen::VectorXd> out) {
    if (ridge > 0.0) {
        Matrix A = G;
        A.diagonal().array() += ridge;
        out = Eigen::LDLT<Matrix>(A).solve(b + ridge * center);
        return;
    }
    Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible()) {
        throw std::runtime_error("degenerate design: singular normal equations with ridge = 0");
    }
    out = lu.solve(b);
}

struct Workspace {
    Grouping rows;
    Grouping cols;      // valid only when map.separable
    ColumnMap map;
};

Workspace make_workspace(const ObservationSet& obs, const StructureMatrix& S) {
    Workspace ws;
    ws.map = analyze_columns(S.lambda);
    ws.rows = group_by(obs, obs.d, true, ws.map.row_of_t);
    if (ws.map.separable) {
        ws.cols = group_by(obs, S.tau, false, ws.map.row_of_t);
    }
    return ws;
}

void u_step(const ObservationSet& obs, const Workspace& ws, const Matrix& W, Matrix& U,
            double ridge) {
    const int k = static_cast<int>(U.cols());
    Matrix G(k, k);
    Eigen::VectorXd b(k), sol(k);
    for (int j = 0; j < static_cast<int>(U.rows()); ++j) {
        G.setZero();
        b.setZero();
        for (int p = ws.rows.ptr[j]; p < ws.rows.ptr[j + 1]; ++p) {
            const Observation& e = obs.entries[ws.rows.items[p]];
            const auto w = W.col(e.t);
            G.selfadjointView<Eigen::Lower>().rankUpdate(w);
            b.noalias() += e.y * w;
        }
        G.triangularView<Eigen::Upper>() = G.transpose();
        solve_normal_equations(G, b, ridge, U.row(j).transpose(), sol);
        U.row(j) = sol.transpose();
    }
}

void v_step_separable(const ObservationSet& obs, const Workspace& ws, const Matrix& U, Matrix& V,
                      double ridge) {
    const int k = static_cast<int>(U.cols());
    const int tau = static_cast<int>(V.cols());
    Matrix G(k, k);
    Eigen::VectorXd b(k), sol(k);
    for (int l = 0; l < tau; ++l) {
        G.setZero();
        b.setZero();
        for (int p = ws.cols.ptr[l]; p < ws.cols.ptr[l + 1]; ++p) {
            const Observation& e = obs.entries[ws.cols.items[p]];
            const double c = ws.map.scale_of_t[e.t];
            const auto u = U.row(e.j).transpose();
            G.selfadjointView<Eigen::Lower>().rankUpdate(u, c * c);
            b.noalias() += (c * e.y) * u;
        }
        G.triangularView<Eigen::Upper>() = G.transpose();
        solve_normal_equations(G, b, ridge, V.col(l), sol);
        V.col(l) = sol;
    }
}

void v_step_general(const ObservationSet& obs, const StructureMatrix& S, const Matrix& U,
                    Matrix& V, double ridge) {
    const int k = static_cast<int>(U.cols());
    const int tau = S.tau;
    const int m = k * tau;
    Matrix A = Matrix::Zero(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd a(m);
    for (const Observation& e : obs.entries) {
        // a = lambda_col(t) kron u_row(j), matching the column-major vec of V
        for (int l = 0; l < tau; ++l) {
            const double lam = S.lambda(l, e.t);
            for (int r = 0; r < k; ++r) a[l * k + r] = lam * U(e.j, r);
        }
        A.selfadjointView<Eigen::Lower>().rankUpdate(a);
        rhs.noalias() += e.y * a;
    }
    A.triangularView<Eigen::Upper>() = A.transpose();
    Eigen::VectorXd center = Eigen::Map<const Eigen::VectorXd>(V.data(), m);
    Eigen::VectorXd sol(m);
    solve_normal_equations(A, rhs, ridge, center, sol);
    V = Eigen::Map<const Matrix>(sol.data(), k, tau);
}

double risk_through(const ObservationSet& obs, const Matrix& U, const Matrix& W) {
    double acc = 0.0;
    for (const Observation& e : obs.entries) {
        const double r = e.y - U.row(e.j).dot(W.col(e.t));
        acc += r * r;
    }
    return acc / static_cast<double>(obs.n());
}

void check_inputs(const ObservationSet& obs, const StructureMatrix& S, int k) {
    validate(obs);
    if (obs.entries.empty()) {
        throw std::invalid_argument("empty observation set");
    }
    if (S.T != obs.T || S.lambda.rows() != S.tau || S.lambda.cols() != S.T) {
        throw std::invalid_argument("shape: structure horizon does not match observations");
    }
    if (k < 1 || k > std::min(obs.d, S.tau)) {
        throw std::invalid_argument("rank must satisfy 1 <= k <= min(d, tau)");
    }
}

}  // namespace

void solve_row_regression(const ObservationSet& obs, const StructureMatrix& S, Matrix& U,
                          const Matrix& V, double ridge) {
    check_inputs(obs, S, static_cast<int>(U.cols()));
    Workspace ws = make_workspace(obs, S);
    const Matrix W = V * S.lambda;
    u_step(obs, ws, W, U, ridge);
}

void solve_factor_regression(const ObservationSet& obs, const StructureMatrix& S,
                             const Matrix& U, Matrix& V, double ridge) {
    check_inputs(obs, S, static_cast<int>(U.cols()));
    Workspace ws = make_workspace(obs, S);
    if (ws.map.separable) {
        v_step_separable(obs, ws, U, V, ridge);
    } else {
        v_step_general(obs, S, U, V, ridge);
    }
}

namespace {

FactorModel als_attempt(const ObservationSet& obs, const StructureMatrix& S, int k,
                        const AlsConfig& cfg, std::uint64_t seed, bool& converged) {
    converged = false;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FactorModel model;
    model.k = k;
    model.U.resize(obs.d, k);
    model.V.resize(k, S.tau);
    // row-major fill order so the draw sequence is part of the contract
    for (int i = 0; i < obs.d; ++i)
        for (int c = 0; c < k; ++c) model.U(i, c) = cfg.init_scale * gauss(rng);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < S.tau; ++c) model.V(r, c) = cfg.init_scale * gauss(rng);

    Workspace ws = make_workspace(obs, S);
    Matrix W = model.V * S.lambda;
    double risk = risk_through(obs, model.U, W);
    model.risk_history.push_back(risk);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        u_step(obs, ws, W, model.U, cfg.ridge);
        if (ws.map.separable) {
            v_step_separable(obs, ws, model.U, model.V, cfg.ridge);
        } else {
            v_step_general(obs, S, model.U, model.V, cfg.ridge);
        }
        W.noalias() = model.V * S.lambda;
        const double next = risk_through(obs, model.U, W);
        model.risk_history.push_back(next);
        model.iterations = iter;
        const double decrease = (risk - next) / std::max(risk, 1e-300);
        risk = next;
        if (decrease < cfg.tol) {
            converged = true;
            break;
        }
    }
    model.fitted_risk = risk;

    return model;
}

}  // namespace

FactorModel als_fit(const ObservationSet& obs, const StructureMatrix& S, int k,
                    const AlsConfig& cfg) {
    check_inputs(obs, S, k);
    if (cfg.max_iters < 1 || cfg.tol < 0.0 || cfg.ridge < 0.0 || cfg.restarts < 0) {
        throw std::invalid_argument(
            "als config: max_iters >= 1, tol >= 0, ridge >= 0, restarts >= 0");
    }

    bool converged = false;
    FactorModel model = als_attempt(obs, S, k, cfg, cfg.seed, converged);
    for (int attempt = 1; attempt <= cfg.restarts && !converged; ++attempt) {
        bool retry_converged = false;
        FactorModel retry =
            als_attempt(obs, S, k, cfg, derive_seed(cfg.seed, 0xa15, attempt), retry_converged);
        if (retry.fitted_risk < model.fitted_risk) {
            model = std::move(retry);
            converged = retry_converged;
        }
    }

    if (cfg.project_constraints) {
        const double bound = std::sqrt(cfg.m0 / (static_cast<double>(k) * S.m_lambda_tau));
        model.U = model.U.cwiseMax(-bound).cwiseMin(bound);
        model.V = model.V.cwiseMax(-bound).cwiseMin(bound);
        const Matrix W = model.V * S.lambda;
        model.fitted_risk = risk_through(obs, model.U, W);
    }
    return model;
}

}  // namespace tsc
