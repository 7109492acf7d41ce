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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "leaf/frontend.hpp"
#include "leaf/matrix.hpp"

namespace leaf {

// Named real vectors, ordered by name. Used both for learnable parameters and
// for their gradients (which share the keyed shape).
class ParamSet {
 public:
  using Map = std::map<std::string, std::vector<double>>;

  void set(const std::string& name, std::vector<double> values);
  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  const std::vector<double>& at(const std::string& name) const;
  std::vector<double>& at(const std::string& name);

  Map::const_iterator begin() const { return values_.begin(); }
  Map::const_iterator end() const { return values_.end(); }
  Map::iterator begin() { return values_.begin(); }
  Map::iterator end() { return values_.end(); }
  std::size_t groups() const noexcept { return values_.size(); }
  std::size_t total_size() const noexcept;

  bool same_shape(const ParamSet& other) const;
  ParamSet zeros_like() const;
  bool all_finite() const;

  bool operator==(const ParamSet&) const = default;

 private:
  Map values_;
};

using Gradients = ParamSet;

namespace keys {
inline constexpr const char* kEta = "eta";
inline constexpr const char* kSigma = "sigma";
inline constexpr const char* kPoolWidths = "pool_widths";
inline constexpr const char* kPcenAlpha = "pcen_alpha";
inline constexpr const char* kPcenDelta = "pcen_delta";
inline constexpr const char* kPcenRoot = "pcen_root";
inline constexpr const char* kPcenSmooth = "pcen_smooth";
inline constexpr const char* kConvKernels = "conv_kernels";
}  // namespace keys

std::string head_weights_key(std::size_t k);
std::string head_bias_key(std::size_t k);

// Linear classifier over time-averaged features.
struct Head {
  Matrix weights;  // N x C
  std::vector<double> bias;

  std::size_t num_classes() const noexcept { return bias.size(); }
};

// Shared frontend plus K task heads.
struct Model {
  FrontendConfig config;
  FrontendState state;
  std::vector<Head> heads;

  static Model init(const FrontendConfig& cfg, const std::vector<std::size_t>& head_classes,
                    const MelInitConfig& mel = {});

  std::size_t channels() const noexcept { return static_cast<std::size_t>(config.n_filters); }

  // Learnable subset for this variant, including heads.
  ParamSet parameters() const;
  // Inverse of parameters(); shapes must match exactly.
  void set_parameters(const ParamSet& params);
};

using MultiHead = Model;

bool is_frontend_key(const std::string& name);

// Clamps every known key into its valid range and renormalizes conv kernels.
// Keys the frontend does not own (heads, arbitrary names) are left alone.
void project_parameters(ParamSet& params, const FrontendConfig& cfg);

void save_model(const std::filesystem::path& dir, const Model& model);
Model load_model(const std::filesystem::path& dir);

// FNV-1a 64 over the serialized vector bytes.
std::uint64_t checksum(const std::vector<double>& values);

}  // namespace leaf
