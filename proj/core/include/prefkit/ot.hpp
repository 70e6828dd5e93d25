// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

#include "prefkit/gradfeat.hpp"

namespace prefkit {

/// Discrete measure: m points in R^b with a probability mass per point.
struct PointCloud {
    Eigen::MatrixXd points;  // m x b, row per point
    Eigen::VectorXd masses;  // length m, nonnegative, sums to 1 (1e-9)
    int padding = 0;         // zeros appended to the last block by featurize

    static PointCloud make(Eigen::MatrixXd points, Eigen::VectorXd masses, int padding = 0);
    static PointCloud uniform(Eigen::MatrixXd points, int padding = 0);

    int size() const { return static_cast<int>(points.rows()); }
    int point_dim() const { return static_cast<int>(points.cols()); }
};

/// A coupling between two clouds together with its ground costs.
/// total_cost is the transported cost <gamma, C>; the literal coupling mass
/// sum(gamma) (always ~1 for probability marginals) stays available as a
/// diagnostic via coupling_mass().
struct TransportPlan {
    Eigen::MatrixXd gamma;  // m x n, nonnegative
    Eigen::MatrixXd cost;   // m x n
    double total_cost = 0.0;

    double coupling_mass() const { return gamma.sum(); }
    /// Largest L1 violation of either marginal.
    double marginal_error(const Eigen::VectorXd& source_masses,
                          const Eigen::VectorXd& target_masses) const;
};

/// Splits a gradient feature into ceil(k/b) contiguous blocks of length b
/// (last block zero-padded, recorded in PointCloud::padding) with uniform
/// masses. Throws InvalidBlockSize for b < 1.
PointCloud featurize(const GradientFeature& g, int block_size);

/// C_ij = ||p_i - q_j||_2. Throws DimensionMismatch on unequal point dims.
Eigen::MatrixXd cost_matrix(const PointCloud& a, const PointCloud& b);

/// Exact optimal transport via the transportation simplex (a network-simplex
/// specialization for dense bipartite problems). The returned plan is an
/// optimal vertex: marginals hold to ~1e-12 and total_cost is minimal.
/// Throws SolverFailure if the pivot limit is exhausted (degenerate numerics).
TransportPlan ot_exact(const PointCloud& a, const PointCloud& b);

/// Entropically regularized approximation, iterated in the log domain.
struct SinkhornResult {
    TransportPlan plan;
    bool converged = false;
    int iterations = 0;
    double marginal_error = 0.0;
};

/// Runs Sinkhorn until both marginal L1 violations drop below tol or
/// max_iter is reached; never throws for non-convergence, the best iterate
/// plus diagnostics is returned either way.
SinkhornResult ot_sinkhorn(const PointCloud& a, const PointCloud& b, double epsilon,
                           int max_iter = 5000, double tol = 1e-8);

enum class OtSolver { Auto, Exact, Sinkhorn };

struct OtSolveConfig {
    OtSolver solver = OtSolver::Auto;
    long exact_size_limit = 65536;   // Auto uses the exact solver while m*n <= limit
    double epsilon_scale = 0.01;     // Sinkhorn epsilon = scale * mean(C)
    int sinkhorn_max_iter = 5000;
    double sinkhorn_tol = 1e-8;
};

/// Dispatches between the exact solver and Sinkhorn per config.
TransportPlan solve_transport(const PointCloud& a, const PointCloud& b, const OtSolveConfig& cfg);

/// Optimal transport cost between two gradient features discretized as
/// block point clouds.
double ot_distance(const GradientFeature& a, const GradientFeature& b, int block_size,
                   const OtSolveConfig& cfg);

}  // namespace prefkit
