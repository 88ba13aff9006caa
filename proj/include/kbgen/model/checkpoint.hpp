// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kbgen/model/params.hpp"

namespace kbgen::model {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t v);

/// Layout: "KBGENCKP", uint32 version, uint64 header length, JSON header
/// (config, lexicon, hashes, parameter names and shapes, caller metadata),
/// then every parameter as little-endian float64 in column-major order.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const nlohmann::json& metadata = nlohmann::json::object());

struct Checkpoint {
  ModelParams params;
  nlohmann::json metadata;
};

/// Verifies magic, version, parameter names/shapes and both hashes.
/// Throws DataError on any mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Hash of all parameter values in store order.
std::uint64_t parameter_hash(const Store& store);

}  // namespace kbgen::model
