// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefkit {

/// Pre-embedded input to the reward scorer. Prompts and responses are plain
/// real vectors; the toolkit never touches raw text or images.
using FeatureVector = Eigen::VectorXd;

bool all_finite(const FeatureVector& v);

/// Provenance tag for the three training phases' datasets.
enum class Modality { Text, Caption, Visual };

std::string_view to_string(Modality m);
std::optional<Modality> modality_from_string(std::string_view s);

/// One ranked preference record: a prompt and k >= 2 responses ordered
/// best-to-worst. All vectors share one dimension and every entry is finite;
/// construction rejects anything else.
struct PreferenceSample {
    std::string id;
    FeatureVector prompt;
    std::vector<FeatureVector> responses;  // responses[0] is the preferred one
    Modality modality = Modality::Text;
    double weight = 1.0;  // reserved; fixed at 1 by all current operations

    static PreferenceSample make(std::string id, FeatureVector prompt,
                                 std::vector<FeatureVector> responses, Modality modality,
                                 double weight = 1.0);

    int feature_dim() const { return static_cast<int>(prompt.size()); }
    int num_responses() const { return static_cast<int>(responses.size()); }
};

/// A named collection of samples sharing one modality, unique ids and one
/// feature dimension.
struct Dataset {
    std::vector<PreferenceSample> samples;
    Modality modality = Modality::Text;
    std::string name;

    static Dataset make(std::vector<PreferenceSample> samples, Modality modality,
                        std::string name);

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    /// Feature dimension, or 0 for an empty dataset.
    int feature_dim() const { return samples.empty() ? 0 : samples.front().feature_dim(); }
    const PreferenceSample* find(std::string_view id) const;
};

enum class LossKind { BradleyTerry, PlackettLuce };

std::string_view to_string(LossKind k);
std::optional<LossKind> loss_kind_from_string(std::string_view s);

/// Per-phase training knobs. Learning-rate defaults follow the published
/// schedule: 2e-5 for phase one, 1e-6 for phases two and three.
struct PhaseConfig {
    int phase_index = 1;
    double learning_rate = 2e-5;
    int epochs = 1;
    int batch_size = 8;
    LossKind loss_kind = LossKind::PlackettLuce;
    std::uint64_t seed = 0;

    static PhaseConfig defaults_for_phase(int phase);
    void validate() const;
};

}  // namespace prefkit
