// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prefkit/model.hpp"
#include "prefkit/types.hpp"

namespace prefkit {

/// Dense Gaussian projection R (d x k), entries N(0,1) scaled by 1/sqrt(k)
/// so squared norms are preserved in expectation. Regenerated on demand from
/// (seed, d, k) and never written to disk; features carry the seed instead.
class RandomProjection {
public:
    /// Requires k <= d. Entries are drawn row-by-row from the seed's stream.
    static RandomProjection gaussian(int source_dim, int target_dim, std::uint64_t seed);

    /// Explicit-matrix construction, for tests (e.g. an identity projection).
    static RandomProjection with_matrix(Eigen::MatrixXd matrix, std::uint64_t seed);

    int source_dim() const { return static_cast<int>(matrix_.rows()); }
    int target_dim() const { return static_cast<int>(matrix_.cols()); }
    std::uint64_t seed() const { return seed_; }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    /// g_init (length d) -> g_init * R (length k). Exact matrix-vector product.
    Eigen::VectorXd project(const Eigen::VectorXd& g_init) const;

private:
    RandomProjection() = default;
    Eigen::MatrixXd matrix_;
    std::uint64_t seed_ = 0;
};

/// The projected per-sample loss gradient: the unit of data selection.
struct GradientFeature {
    std::string sample_id;
    Eigen::VectorXd values;  // length k
    int source_dim = 0;      // trainable parameter count the gradient came from
    std::uint64_t seed = 0;  // projection seed, for provenance
};

/// Backpropagates the configured preference loss for one sample through the
/// warmed-up model (adapter parameters when one is attached) and projects
/// the flattened gradient.
GradientFeature extract_gradient_feature(const RewardModel& warm_model,
                                         const PreferenceSample& sample,
                                         const RandomProjection& proj,
                                         LossKind kind = LossKind::PlackettLuce);

/// Features for every sample, in dataset order regardless of the number of
/// workers used (jobs <= 1 means sequential).
std::vector<GradientFeature> batch_extract(const RewardModel& warm_model, const Dataset& dataset,
                                           const RandomProjection& proj,
                                           LossKind kind = LossKind::PlackettLuce, int jobs = 1);

/// Line-delimited feature records {sample_id, seed, d, k, values}.
void save_features(const std::vector<GradientFeature>& feats, const std::filesystem::path& path);
std::vector<GradientFeature> load_features(const std::filesystem::path& path);

}  // namespace prefkit
