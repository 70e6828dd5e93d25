// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "prefkit/model.hpp"
#include "prefkit/types.hpp"

namespace prefkit {

/// Mean per-sample training losses, one entry per epoch, measured on the
/// pre-update parameters of each batch.
using EpochLosses = std::vector<double>;

/// Shuffled mini-batch SGD over a sample pool. Batch order is drawn from
/// derive_seed(seed, epoch), so runs are bit-reproducible. Batch gradients
/// are the mean of per-sample gradients. Throws NonFiniteLoss if a loss
/// stops being finite.
EpochLosses sgd_train(RewardModel& model, const std::vector<PreferenceSample>& pool, double lr,
                      int epochs, int batch_size, LossKind kind, std::uint64_t seed);

struct WarmupResult {
    RewardModel model;  // base + trained adapter; gradient features come from this
    EpochLosses epoch_losses;
};

/// Attaches a fresh low-rank adapter to a copy of base_model and trains only
/// its factors. The pool may mix modalities (it is drawn from the union of
/// source and target datasets). epochs == 0 returns a model whose scores
/// equal the base exactly.
WarmupResult warmup_train(const RewardModel& base_model, const std::vector<PreferenceSample>& pool,
                          int adapter_rank, double lr, int epochs, int batch_size, LossKind kind,
                          std::uint64_t seed);

struct PhaseTrace {
    PhaseConfig config;
    EpochLosses epoch_losses;
};

struct TrainingRun {
    std::array<PhaseConfig, 3> configs;
    std::vector<PhaseTrace> phases;
    std::vector<RewardModel> phase_checkpoints;  // after phases 1, 2, 3
    RewardModel final_model;
    bool phase_order_warning = false;  // configs were not ordered 1, 2, 3
};

/// Text -> caption -> visual progressive training. Each phase continues from
/// the previous phase's final parameters; datasets must carry the matching
/// modalities. A misordered config array is accepted but flagged.
TrainingRun run_three_phase(RewardModel model, const Dataset& text, const Dataset& caption,
                            const Dataset& visual, const std::array<PhaseConfig, 3>& configs);

/// Sliding window over the most recent reward scores with running mean and
/// population variance, used to standardize rewards during RL.
class RewardQueue {
public:
    explicit RewardQueue(std::size_t capacity = 1000);

    void push(double r);
    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }
    double mean() const;
    double variance() const;  // population variance over the current buffer
    const std::deque<double>& contents() const { return buffer_; }

private:
    std::size_t capacity_;
    std::deque<double> buffer_;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

/// Pushes r and returns (r - mean) / (std + 1e-8) over the updated buffer;
/// 0 while fewer than two rewards have been seen.
double reward_standardize(RewardQueue& q, double r);

struct StepFlags {
    bool policy;
    bool value;
};

/// Value model trains from step 0; the policy stays frozen for the first
/// freeze_steps steps.
std::vector<StepFlags> cold_start_schedule(int total_steps, int freeze_steps = 30);

}  // namespace prefkit
