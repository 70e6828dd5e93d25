// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/gradfeat.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "prefkit/errors.hpp"
#include "prefkit/rng.hpp"

namespace prefkit {

using nlohmann::json;

RandomProjection RandomProjection::gaussian(int source_dim, int target_dim, std::uint64_t seed) {
    if (source_dim < 1 || target_dim < 1) {
        throw ValidationError("projection dims must be positive");
    }
    if (target_dim > source_dim) {
        throw DimensionMismatch("projection target dim " + std::to_string(target_dim) +
                                " exceeds source dim " + std::to_string(source_dim));
    }
    RandomProjection p;
    p.seed_ = seed;
    p.matrix_.resize(source_dim, target_dim);
    Rng rng(derive_seed(seed, "random-projection"));
    const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
    for (int r = 0; r < source_dim; ++r) {
        for (int c = 0; c < target_dim; ++c) p.matrix_(r, c) = rng.normal() * scale;
    }
    return p;
}

RandomProjection RandomProjection::with_matrix(Eigen::MatrixXd matrix, std::uint64_t seed) {
    RandomProjection p;
    p.matrix_ = std::move(matrix);
    p.seed_ = seed;
    return p;
}

Eigen::VectorXd RandomProjection::project(const Eigen::VectorXd& g_init) const {
    if (g_init.size() != matrix_.rows()) {
        throw DimensionMismatch("project: vector dim " + std::to_string(g_init.size()) +
                                " != projection source dim " + std::to_string(matrix_.rows()));
    }
    return matrix_.transpose() * g_init;
}

GradientFeature extract_gradient_feature(const RewardModel& warm_model,
                                         const PreferenceSample& sample,
                                         const RandomProjection& proj, LossKind kind) {
    if (warm_model.trainable_dim() != proj.source_dim()) {
        throw DimensionMismatch("projection source dim " + std::to_string(proj.source_dim()) +
                                " != trainable parameter count " +
                                std::to_string(warm_model.trainable_dim()));
    }
    Eigen::VectorXd grad;
    warm_model.loss_with_grad(sample, ranked_loss(kind), grad);
    GradientFeature f;
    f.sample_id = sample.id;
    f.values = proj.project(grad);
    f.source_dim = proj.source_dim();
    f.seed = proj.seed();
    return f;
}

std::vector<GradientFeature> batch_extract(const RewardModel& warm_model, const Dataset& dataset,
                                           const RandomProjection& proj, LossKind kind,
                                           int jobs) {
    std::vector<GradientFeature> out(dataset.size());
    if (dataset.empty()) return out;
    const std::size_t n = dataset.size();
    const std::size_t workers =
        std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));

    std::vector<std::string> failures(workers);
    auto run_range = [&](std::size_t begin, std::size_t end, std::size_t slot) {
        try {
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = extract_gradient_feature(warm_model, dataset.samples[i], proj, kind);
            }
        } catch (const Error& e) {
            failures[slot] = e.what();
        }
    };

    if (workers <= 1) {
        run_range(0, n, 0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end, w);
        }
        for (std::thread& t : pool) t.join();
    }
    std::string combined;
    for (const std::string& f : failures) {
        if (!f.empty()) combined += (combined.empty() ? "" : "; ") + f;
    }
    if (!combined.empty()) throw NonFiniteGradient("batch_extract: " + combined);
    return out;
}

void save_features(const std::vector<GradientFeature>& feats, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const GradientFeature& f : feats) {
        json rec;
        rec["sample_id"] = f.sample_id;
        rec["seed"] = f.seed;
        rec["d"] = f.source_dim;
        rec["k"] = f.values.size();
        json vals = json::array();
        for (Eigen::Index i = 0; i < f.values.size(); ++i) vals.push_back(f.values[i]);
        rec["values"] = std::move(vals);
        out << rec.dump() << '\n';
    }
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

std::vector<GradientFeature> load_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<GradientFeature> feats;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        GradientFeature f;
        f.sample_id = rec.at("sample_id").get<std::string>();
        f.seed = rec.at("seed").get<std::uint64_t>();
        f.source_dim = rec.at("d").get<int>();
        const json& vals = rec.at("values");
        f.values.resize(vals.size());
        Eigen::Index i = 0;
        for (const json& x : vals) f.values[i++] = x.get<double>();
        if (f.values.size() != rec.at("k").get<Eigen::Index>()) {
            throw ParseError("line " + std::to_string(line_no) + ": k disagrees with values");
        }
        feats.push_back(std::move(f));
    }
    return feats;
}

}  // namespace prefkit
