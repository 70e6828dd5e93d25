// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "prefkit/types.hpp"

namespace prefkit {

struct ModelDims {
    int prompt_dim = 0;
    int response_dim = 0;
    int hidden = 0;

    int input_dim() const { return prompt_dim + response_dim; }
    bool operator==(const ModelDims&) const = default;
};

/// Additive low-rank factors for both weight matrices. The effective weight
/// is W + A*B with A (rows x r) drawn from N(0, 0.01^2) and B (r x cols)
/// zero at init, so a freshly attached adapter leaves the model unchanged.
struct LowRankAdapter {
    Eigen::MatrixXd a1, b1;  // adapts the hidden layer: a1 (h x r), b1 (r x in)
    Eigen::MatrixXd a2, b2;  // adapts the output layer: a2 (1 x r), b2 (r x h)

    int rank() const { return static_cast<int>(a1.cols()); }
};

/// Which parameters a flattened vector covers. Trainable is the adapter when
/// one is attached, the full base model otherwise. All always covers base
/// followed by adapter slots; frozen slots read as zero in gradients.
enum class ParamScope { Trainable, All };

/// Value and reward-space gradient of a per-sample loss, as a function of
/// the vector of per-response rewards.
struct LossValue {
    double loss = 0.0;
    Eigen::VectorXd d_rewards;
};
using RewardLossFn = std::function<LossValue(const Eigen::VectorXd& rewards)>;

/// Builds the reward-space closure for a ranked sample: Plackett-Luce over
/// the full ranking, or Bradley-Terry on the best-vs-worst pair.
RewardLossFn ranked_loss(LossKind kind);

/// Two-layer tanh perceptron over concatenated (prompt, response) features,
/// scoring a scalar reward, with an optional low-rank adapter.
///
/// Flattened parameter order: W1 row-major, b1, W2, b2 for the base;
/// A1 row-major, B1 row-major, A2, B2 for the adapter.
class RewardModel {
public:
    RewardModel() = default;

    /// Weights drawn N(0, init_std^2) in flatten order, biases zero.
    /// Identical seeds give bit-identical parameters.
    static RewardModel init(ModelDims dims, std::uint64_t seed, double init_std = 0.1);

    /// Attaches a fresh adapter (A ~ N(0, 0.01^2), B = 0) and freezes the
    /// base. Scores are unchanged until the adapter trains.
    void attach_adapter(int rank, std::uint64_t seed);
    void detach_adapter() { adapter_.reset(); refresh_effective(); }
    bool has_adapter() const { return adapter_.has_value(); }
    int adapter_rank() const { return adapter_ ? adapter_->rank() : 0; }

    const ModelDims& dims() const { return dims_; }
    std::uint64_t seed() const { return seed_; }

    /// Scalar reward for one (prompt, response) pair.
    /// Throws DimensionMismatch when input dims do not match the architecture.
    double score(const FeatureVector& prompt, const FeatureVector& response) const;

    /// Rewards for every response of a sample, in ranking order.
    Eigen::VectorXd score_responses(const PreferenceSample& s) const;

    int base_dim() const;
    int trainable_dim() const;
    int param_dim(ParamScope scope) const;

    Eigen::VectorXd flatten(ParamScope scope = ParamScope::Trainable) const;
    void unflatten(const Eigen::VectorXd& params, ParamScope scope = ParamScope::Trainable);

    /// Loss value and exact analytic gradient of loss_fn(rewards(s)) with
    /// respect to the requested parameter scope. Frozen slots are zero.
    /// Throws NonFiniteGradient if any accumulated entry is non-finite.
    LossValue loss_with_grad(const PreferenceSample& s, const RewardLossFn& loss_fn,
                             Eigen::VectorXd& grad_out,
                             ParamScope scope = ParamScope::Trainable) const;

    /// theta <- theta - lr * grads over the trainable parameters.
    void sgd_step(const Eigen::VectorXd& grads, double lr);

    bool equal_params(const RewardModel& other) const;

    void save(const std::filesystem::path& path) const;
    static RewardModel load(const std::filesystem::path& path);

private:
    void refresh_effective();
    void check_input(const FeatureVector& prompt, const FeatureVector& response) const;

    ModelDims dims_;
    std::uint64_t seed_ = 0;
    Eigen::MatrixXd w1_;       // h x in
    Eigen::VectorXd bias1_;    // h
    Eigen::RowVectorXd w2_;    // 1 x h
    double bias2_ = 0.0;
    std::optional<LowRankAdapter> adapter_;
    Eigen::MatrixXd eff_w1_;   // w1 + a1*b1 when adapted
    Eigen::RowVectorXd eff_w2_;
};

}  // namespace prefkit
