// Copyright 2026 The leaf-frontend Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leaf/frontend.hpp"

namespace leaf {

// Feature file: "LEAF", u32 version = 1, u32 M, u32 N, u32 frame_rate, then
// M*N float32, all little-endian, time-major.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

std::vector<std::uint8_t> encode_features(const FeatureMap& f);
FeatureMap decode_features(std::span<const std::uint8_t> bytes);
void write_features(const std::filesystem::path& path, const FeatureMap& f);
FeatureMap read_features(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

// Flat "key=value" text. Blank lines and lines starting with '#' are ignored.
std::map<std::string, std::string> parse_key_values(std::string_view text);

// Applies keys named after FrontendConfig / MelInitConfig fields; any other
// key is an InvalidConfig error.
void apply_config(const std::map<std::string, std::string>& kv, FrontendConfig& cfg,
                  MelInitConfig& mel);
std::string format_config(const FrontendConfig& cfg, const MelInitConfig& mel);

// Named presets: leaf, leaf-log, leaf-pcen, mel, mel-pcen, convnorm.
void apply_frontend_kind(std::string_view kind, FrontendConfig& cfg);

}  // namespace leaf
