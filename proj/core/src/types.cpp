// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/types.hpp"

#include <cmath>
#include <unordered_set>

#include "prefkit/errors.hpp"

namespace prefkit {

bool all_finite(const FeatureVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) return false;
    }
    return true;
}

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Caption: return "caption";
        case Modality::Visual: return "visual";
    }
    return "?";
}

std::optional<Modality> modality_from_string(std::string_view s) {
    if (s == "text") return Modality::Text;
    if (s == "caption") return Modality::Caption;
    if (s == "visual") return Modality::Visual;
    return std::nullopt;
}

std::string_view to_string(LossKind k) {
    switch (k) {
        case LossKind::BradleyTerry: return "bt";
        case LossKind::PlackettLuce: return "pl";
    }
    return "?";
}

std::optional<LossKind> loss_kind_from_string(std::string_view s) {
    if (s == "bt") return LossKind::BradleyTerry;
    if (s == "pl") return LossKind::PlackettLuce;
    return std::nullopt;
}

PreferenceSample PreferenceSample::make(std::string id, FeatureVector prompt,
                                        std::vector<FeatureVector> responses, Modality modality,
                                        double weight) {
    if (id.empty()) throw ValidationError("sample id must be nonempty");
    if (prompt.size() == 0) throw ValidationError("sample '" + id + "': empty prompt vector");
    if (responses.size() < 2) {
        throw ListTooShort("sample '" + id + "': needs at least 2 ranked responses, got " +
                           std::to_string(responses.size()));
    }
    if (!all_finite(prompt)) {
        throw ValidationError("sample '" + id + "': non-finite prompt entry");
    }
    for (std::size_t r = 0; r < responses.size(); ++r) {
        if (responses[r].size() != prompt.size()) {
            throw DimensionMismatch("sample '" + id + "': response " + std::to_string(r) +
                                    " has dim " + std::to_string(responses[r].size()) +
                                    ", prompt declares " + std::to_string(prompt.size()));
        }
        if (!all_finite(responses[r])) {
            throw ValidationError("sample '" + id + "': non-finite entry in response " +
                                  std::to_string(r));
        }
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw ValidationError("sample '" + id + "': weight must be finite and nonnegative");
    }
    PreferenceSample s;
    s.id = std::move(id);
    s.prompt = std::move(prompt);
    s.responses = std::move(responses);
    s.modality = modality;
    s.weight = weight;
    return s;
}

Dataset Dataset::make(std::vector<PreferenceSample> samples, Modality modality,
                      std::string name) {
    std::unordered_set<std::string> seen;
    seen.reserve(samples.size());
    Eigen::Index dim = samples.empty() ? 0 : samples.front().prompt.size();
    for (const PreferenceSample& s : samples) {
        if (s.modality != modality) {
            throw ModalityMismatch("dataset '" + name + "': sample '" + s.id + "' has modality " +
                                   std::string(to_string(s.modality)) + ", dataset declares " +
                                   std::string(to_string(modality)));
        }
        if (!seen.insert(s.id).second) {
            throw ValidationError("dataset '" + name + "': duplicate sample id '" + s.id + "'");
        }
        if (s.prompt.size() != dim) {
            throw DimensionMismatch("dataset '" + name + "': sample '" + s.id + "' has dim " +
                                    std::to_string(s.prompt.size()) + ", expected " +
                                    std::to_string(dim));
        }
    }
    Dataset d;
    d.samples = std::move(samples);
    d.modality = modality;
    d.name = std::move(name);
    return d;
}

const PreferenceSample* Dataset::find(std::string_view id) const {
    for (const PreferenceSample& s : samples) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

PhaseConfig PhaseConfig::defaults_for_phase(int phase) {
    PhaseConfig c;
    c.phase_index = phase;
    c.learning_rate = (phase == 1) ? 2e-5 : 1e-6;
    return c;
}

void PhaseConfig::validate() const {
    if (phase_index < 1 || phase_index > 3) {
        throw ValidationError("phase_index must be 1, 2 or 3, got " + std::to_string(phase_index));
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ValidationError("learning_rate must be positive");
    }
    if (epochs < 0) throw ValidationError("epochs must be nonnegative");
    if (batch_size < 1) throw ValidationError("batch_size must be positive");
}

}  // namespace prefkit
