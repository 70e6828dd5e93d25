// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "prefkit/errors.hpp"
#include "prefkit/ot.hpp"

namespace prefkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (m == kNegInf) return kNegInf;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

}  // namespace

SinkhornResult ot_sinkhorn(const PointCloud& a, const PointCloud& b, double epsilon, int max_iter,
                           double tol) {
    if (!(epsilon > 0.0)) throw ValidationError("sinkhorn epsilon must be positive");
    const int m = a.size();
    const int n = b.size();
    const Eigen::MatrixXd c = cost_matrix(a, b);

    Eigen::VectorXd log_a(m), log_b(n);
    for (int i = 0; i < m; ++i) log_a[i] = a.masses[i] > 0.0 ? std::log(a.masses[i]) : kNegInf;
    for (int j = 0; j < n; ++j) log_b[j] = b.masses[j] > 0.0 ? std::log(b.masses[j]) : kNegInf;

    // gamma_ij = exp((f_i + g_j - C_ij)/eps + log_a_i + log_b_j); the dual
    // potentials are iterated in the log domain so tiny eps stays stable.
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);

    SinkhornResult result;
    Eigen::MatrixXd gamma(m, n);
    auto rebuild_gamma = [&]() {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const double e = (f[i] + g[j] - c(i, j)) / epsilon + log_a[i] + log_b[j];
                gamma(i, j) = std::exp(e);
            }
        }
    };

    Eigen::VectorXd scratch_n(n), scratch_m(m);
    int it = 0;
    double err = std::numeric_limits<double>::infinity();
    for (; it < max_iter; ++it) {
        for (int i = 0; i < m; ++i) {
            if (log_a[i] == kNegInf) {
                f[i] = 0.0;
                continue;
            }
            for (int j = 0; j < n; ++j) scratch_n[j] = (g[j] - c(i, j)) / epsilon + log_b[j];
            f[i] = -epsilon * lse(scratch_n);
        }
        for (int j = 0; j < n; ++j) {
            if (log_b[j] == kNegInf) {
                g[j] = 0.0;
                continue;
            }
            for (int i = 0; i < m; ++i) scratch_m[i] = (f[i] - c(i, j)) / epsilon + log_a[i];
            g[j] = -epsilon * lse(scratch_m);
        }
        rebuild_gamma();
        const double row_err = (gamma.rowwise().sum() - a.masses).cwiseAbs().sum();
        const double col_err = (gamma.colwise().sum().transpose() - b.masses).cwiseAbs().sum();
        err = std::max(row_err, col_err);
        if (err <= tol) {
            ++it;
            result.converged = true;
            break;
        }
    }

    result.plan.gamma = std::move(gamma);
    result.plan.cost = c;
    result.plan.total_cost = (result.plan.gamma.array() * result.plan.cost.array()).sum();
    result.iterations = it;
    result.marginal_error = err;
    return result;
}

}  // namespace prefkit
