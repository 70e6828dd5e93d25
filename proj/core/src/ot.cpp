// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prefkit/errors.hpp"

namespace prefkit {

PointCloud PointCloud::make(Eigen::MatrixXd points, Eigen::VectorXd masses, int padding) {
    if (points.rows() < 1) throw ValidationError("point cloud needs at least one point");
    if (masses.size() != points.rows()) {
        throw DimensionMismatch("mass vector length " + std::to_string(masses.size()) +
                                " != point count " + std::to_string(points.rows()));
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < masses.size(); ++i) {
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
            throw ValidationError("masses must be finite and nonnegative");
        }
        total += masses[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("masses must sum to 1 (got " + std::to_string(total) + ")");
    }
    PointCloud c;
    c.points = std::move(points);
    c.masses = std::move(masses);
    c.padding = padding;
    return c;
}

PointCloud PointCloud::uniform(Eigen::MatrixXd points, int padding) {
    const Eigen::Index m = points.rows();
    return make(std::move(points), Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)),
                padding);
}

double TransportPlan::marginal_error(const Eigen::VectorXd& source_masses,
                                     const Eigen::VectorXd& target_masses) const {
    const double row = (gamma.rowwise().sum() - source_masses).cwiseAbs().sum();
    const double col = (gamma.colwise().sum().transpose() - target_masses).cwiseAbs().sum();
    return std::max(row, col);
}

PointCloud featurize(const GradientFeature& g, int block_size) {
    if (block_size < 1) {
        throw InvalidBlockSize("block size must be >= 1, got " + std::to_string(block_size));
    }
    const Eigen::Index k = g.values.size();
    if (k < 1) throw ValidationError("cannot featurize an empty gradient feature");
    const Eigen::Index m = (k + block_size - 1) / block_size;
    const int padding = static_cast<int>(m * block_size - k);
    Eigen::MatrixXd points = Eigen::MatrixXd::Zero(m, block_size);
    for (Eigen::Index i = 0; i < k; ++i) points(i / block_size, i % block_size) = g.values[i];
    return PointCloud::uniform(std::move(points), padding);
}

Eigen::MatrixXd cost_matrix(const PointCloud& a, const PointCloud& b) {
    if (a.point_dim() != b.point_dim()) {
        throw DimensionMismatch("cost_matrix: point dims differ (" +
                                std::to_string(a.point_dim()) + " vs " +
                                std::to_string(b.point_dim()) + ")");
    }
    Eigen::MatrixXd c(a.size(), b.size());
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < b.size(); ++j) {
            c(i, j) = (a.points.row(i) - b.points.row(j)).norm();
        }
    }
    return c;
}

namespace {

// Transportation simplex state. Sources are nodes 0..m-1, sinks m..m+n-1;
// the basis is a spanning tree with exactly m+n-1 arcs (zero flows allowed).
struct BasisArc {
    int i;
    int j;
    double flow;
};

class TransportSimplex {
public:
    TransportSimplex(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::MatrixXd& c)
        : a_(a), b_(b), c_(c), m_(static_cast<int>(a.size())), n_(static_cast<int>(b.size())) {
        in_basis_ = Eigen::MatrixXi::Constant(m_, n_, -1);
        northwest_corner();
    }

    Eigen::MatrixXd solve() {
        const double tol = 1e-11 * (1.0 + c_.cwiseAbs().maxCoeff());
        const long max_pivots = 10000L + 50L * static_cast<long>(m_) * n_;
        bool bland = false;
        int degenerate_streak = 0;
        for (long pivot = 0; pivot < max_pivots; ++pivot) {
            compute_duals();
            int ei = -1, ej = -1;
            if (!find_entering(tol, bland, ei, ej)) {
                return gamma();
            }
            const double theta = pivot_on(ei, ej);
            if (theta <= 0.0) {
                if (++degenerate_streak > 50 + 10 * (m_ + n_)) bland = true;
            } else {
                degenerate_streak = 0;
            }
        }
        throw SolverFailure("transportation simplex exceeded pivot limit (" +
                            std::to_string(max_pivots) + ") on a " + std::to_string(m_) + "x" +
                            std::to_string(n_) + " problem");
    }

private:
    void add_arc(int i, int j, double flow) {
        in_basis_(i, j) = static_cast<int>(basis_.size());
        basis_.push_back({i, j, flow});
    }

    void northwest_corner() {
        Eigen::VectorXd ra = a_, rb = b_;
        int i = 0, j = 0;
        const int total = m_ + n_ - 1;
        basis_.reserve(total);
        for (int step = 0; step < total; ++step) {
            const double t = std::min(ra[i], rb[j]);
            add_arc(i, j, t);
            ra[i] -= t;
            rb[j] -= t;
            if (i == m_ - 1 && j == n_ - 1) break;
            if (i == m_ - 1) {
                ++j;
            } else if (j == n_ - 1) {
                ++i;
            } else if (ra[i] <= rb[j]) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    void build_adjacency(std::vector<std::vector<int>>& adj) const {
        adj.assign(m_ + n_, {});
        for (int t = 0; t < static_cast<int>(basis_.size()); ++t) {
            adj[basis_[t].i].push_back(t);
            adj[m_ + basis_[t].j].push_back(t);
        }
    }

    void compute_duals() {
        u_.assign(m_, 0.0);
        v_.assign(n_, 0.0);
        std::vector<char> known(m_ + n_, 0);
        std::vector<std::vector<int>> adj;
        build_adjacency(adj);
        std::vector<int> stack = {0};
        known[0] = 1;
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            for (int t : adj[node]) {
                const BasisArc& arc = basis_[t];
                const int other = (node < m_) ? m_ + arc.j : arc.i;
                if (known[other]) continue;
                if (node < m_) {
                    v_[arc.j] = c_(arc.i, arc.j) - u_[arc.i];
                } else {
                    u_[arc.i] = c_(arc.i, arc.j) - v_[arc.j];
                }
                known[other] = 1;
                stack.push_back(other);
            }
        }
    }

    bool find_entering(double tol, bool bland, int& ei, int& ej) const {
        double best = -tol;
        ei = ej = -1;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (in_basis_(i, j) >= 0) continue;
                const double rc = c_(i, j) - u_[i] - v_[j];
                if (rc < best) {
                    best = rc;
                    ei = i;
                    ej = j;
                    if (bland) return true;  // first eligible arc in scan order
                }
            }
        }
        return ei >= 0;
    }

    // Adds the entering arc, cancels flow around the unique tree cycle and
    // drops the limiting arc. Returns the amount of flow moved.
    double pivot_on(int ei, int ej) {
        std::vector<std::vector<int>> adj;
        build_adjacency(adj);
        // Path from source ei to sink m_+ej through the tree.
        std::vector<int> parent_node(m_ + n_, -1), parent_arc(m_ + n_, -1);
        std::vector<char> seen(m_ + n_, 0);
        std::vector<int> queue = {ei};
        seen[ei] = 1;
        const int target = m_ + ej;
        for (std::size_t qi = 0; qi < queue.size() && !seen[target]; ++qi) {
            const int node = queue[qi];
            for (int t : adj[node]) {
                const BasisArc& arc = basis_[t];
                const int other = (node < m_) ? m_ + arc.j : arc.i;
                if (seen[other]) continue;
                seen[other] = 1;
                parent_node[other] = node;
                parent_arc[other] = t;
                queue.push_back(other);
            }
        }
        if (!seen[target]) {
            throw SolverFailure("basis lost connectivity (numerical degeneracy)");
        }

        // Arcs along the path from the sink back to the source alternate
        // signs, starting with - for the arc incident to the entering sink.
        std::vector<int> minus_arcs, plus_arcs;
        int node = target;
        int sign = -1;
        while (node != ei) {
            const int t = parent_arc[node];
            (sign < 0 ? minus_arcs : plus_arcs).push_back(t);
            node = parent_node[node];
            sign = -sign;
        }

        double theta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (int t : minus_arcs) {
            const BasisArc& arc = basis_[t];
            if (arc.flow < theta ||
                (arc.flow == theta && leaving >= 0 &&
                 (arc.i < basis_[leaving].i ||
                  (arc.i == basis_[leaving].i && arc.j < basis_[leaving].j)))) {
                theta = arc.flow;
                leaving = t;
            }
        }
        if (leaving < 0) throw SolverFailure("pivot found no leaving arc");

        for (int t : minus_arcs) basis_[t].flow = std::max(0.0, basis_[t].flow - theta);
        for (int t : plus_arcs) basis_[t].flow += theta;

        in_basis_(basis_[leaving].i, basis_[leaving].j) = -1;
        basis_[leaving] = {ei, ej, theta};
        in_basis_(ei, ej) = leaving;
        return theta;
    }

    Eigen::MatrixXd gamma() const {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m_, n_);
        for (const BasisArc& arc : basis_) g(arc.i, arc.j) = arc.flow;
        return g;
    }

    const Eigen::VectorXd& a_;
    const Eigen::VectorXd& b_;
    const Eigen::MatrixXd& c_;
    const int m_, n_;
    std::vector<BasisArc> basis_;
    Eigen::MatrixXi in_basis_;
    std::vector<double> u_, v_;
};

}  // namespace

TransportPlan ot_exact(const PointCloud& a, const PointCloud& b) {
    TransportPlan plan;
    plan.cost = cost_matrix(a, b);
    TransportSimplex simplex(a.masses, b.masses, plan.cost);
    plan.gamma = simplex.solve();
    plan.total_cost = (plan.gamma.array() * plan.cost.array()).sum();
    return plan;
}

TransportPlan solve_transport(const PointCloud& a, const PointCloud& b, const OtSolveConfig& cfg) {
    const long size = static_cast<long>(a.size()) * b.size();
    const bool exact = cfg.solver == OtSolver::Exact ||
                       (cfg.solver == OtSolver::Auto && size <= cfg.exact_size_limit);
    if (exact) return ot_exact(a, b);
    const Eigen::MatrixXd c = cost_matrix(a, b);
    const double epsilon = std::max(cfg.epsilon_scale * c.mean(), 1e-12);
    return ot_sinkhorn(a, b, epsilon, cfg.sinkhorn_max_iter, cfg.sinkhorn_tol).plan;
}

double ot_distance(const GradientFeature& a, const GradientFeature& b, int block_size,
                   const OtSolveConfig& cfg) {
    return solve_transport(featurize(a, block_size), featurize(b, block_size), cfg).total_cost;
}

}  // namespace prefkit
