// Copyright (c) 2026, the prefkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "prefkit/types.hpp"

namespace prefkit {

/// Reads a line-delimited record file. Each line is a JSON object
/// {id, modality, prompt: [..], responses: [[..], ..]} with responses ordered
/// best-to-worst; an optional "weight" field defaults to 1. Numbers are
/// stored in shortest round-trip form, so load(save(d)) == d bit-for-bit.
///
/// Throws ParseError (with the 1-based line number), ModalityMismatch when a
/// record's modality differs from expected_modality, DimensionMismatch when
/// response dims disagree with the prompt or with earlier lines, IoError when
/// the file cannot be opened.
Dataset load_dataset(const std::filesystem::path& path, Modality expected_modality);

/// Writes one record per line in the format load_dataset reads.
void save_dataset(const Dataset& d, const std::filesystem::path& path);

}  // namespace prefkit
