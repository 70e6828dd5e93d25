// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#include "prefkit/dataset_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "prefkit/errors.hpp"

namespace prefkit {

using nlohmann::json;

namespace {

json vector_to_json(const FeatureVector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

FeatureVector vector_from_json(const json& arr, std::size_t line) {
    if (!arr.is_array()) {
        throw ParseError("line " + std::to_string(line) + ": expected a numeric array");
    }
    FeatureVector v(arr.size());
    Eigen::Index i = 0;
    for (const json& x : arr) {
        if (!x.is_number()) {
            throw ParseError("line " + std::to_string(line) + ": non-numeric vector entry");
        }
        v[i++] = x.get<double>();
    }
    return v;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, Modality expected_modality) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");

    std::vector<PreferenceSample> samples;
    Eigen::Index dataset_dim = -1;
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
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("modality") ||
            !rec.contains("prompt") || !rec.contains("responses")) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": record needs id, modality, prompt, responses");
        }
        if (!rec["id"].is_string()) {
            throw ParseError("line " + std::to_string(line_no) + ": id must be a string");
        }
        const std::string id = rec["id"].get<std::string>();
        const auto modality = rec["modality"].is_string()
                                  ? modality_from_string(rec["modality"].get<std::string>())
                                  : std::nullopt;
        if (!modality) {
            throw ParseError("line " + std::to_string(line_no) + ": unknown modality");
        }
        if (*modality != expected_modality) {
            throw ModalityMismatch("line " + std::to_string(line_no) + ": sample '" + id +
                                   "' has modality " + rec["modality"].get<std::string>() +
                                   ", expected " + std::string(to_string(expected_modality)));
        }
        FeatureVector prompt = vector_from_json(rec["prompt"], line_no);
        if (!rec["responses"].is_array() || rec["responses"].size() < 2) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": responses must list at least 2 ranked vectors");
        }
        std::vector<FeatureVector> responses;
        responses.reserve(rec["responses"].size());
        for (const json& r : rec["responses"]) {
            FeatureVector y = vector_from_json(r, line_no);
            if (y.size() != prompt.size()) {
                throw DimensionMismatch("line " + std::to_string(line_no) + ": response has dim " +
                                        std::to_string(y.size()) + ", prompt declares " +
                                        std::to_string(prompt.size()));
            }
            responses.push_back(std::move(y));
        }
        if (dataset_dim < 0) {
            dataset_dim = prompt.size();
        } else if (prompt.size() != dataset_dim) {
            throw DimensionMismatch("line " + std::to_string(line_no) + ": sample dim " +
                                    std::to_string(prompt.size()) +
                                    " differs from earlier lines (" +
                                    std::to_string(dataset_dim) + ")");
        }
        const double weight = rec.contains("weight") ? rec["weight"].get<double>() : 1.0;
        try {
            samples.push_back(PreferenceSample::make(id, std::move(prompt), std::move(responses),
                                                     *modality, weight));
        } catch (const DimensionMismatch& e) {
            throw DimensionMismatch("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return Dataset::make(std::move(samples), expected_modality, path.stem().string());
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const PreferenceSample& s : d.samples) {
        json rec;
        rec["id"] = s.id;
        rec["modality"] = std::string(to_string(s.modality));
        rec["prompt"] = vector_to_json(s.prompt);
        json resp = json::array();
        for (const FeatureVector& y : s.responses) resp.push_back(vector_to_json(y));
        rec["responses"] = std::move(resp);
        if (s.weight != 1.0) rec["weight"] = s.weight;
        out << rec.dump() << '\n';
        if (!out) throw IoError("write failed on '" + path.string() + "'");
    }
    out.flush();
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace prefkit
