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

#include "leaf/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "leaf/error.hpp"
#include "leaf/feature_io.hpp"

namespace leaf {

void ParamSet::set(const std::string& name, std::vector<double> values) {
  values_[name] = std::move(values);
}

const std::vector<double>& ParamSet::at(const std::string& name) const {
  const auto it = values_.find(name);
  if (it == values_.end()) fail(ErrorCode::kShapeMismatch, "no parameter named " + name);
  return it->second;
}

std::vector<double>& ParamSet::at(const std::string& name) {
  const auto it = values_.find(name);
  if (it == values_.end()) fail(ErrorCode::kShapeMismatch, "no parameter named " + name);
  return it->second;
}

std::size_t ParamSet::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, v] : values_) n += v.size();
  return n;
}

bool ParamSet::same_shape(const ParamSet& other) const {
  if (values_.size() != other.values_.size()) return false;
  auto a = values_.begin();
  auto b = other.values_.begin();
  for (; a != values_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.size() != b->second.size()) return false;
  }
  return true;
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& [name, v] : values_) out.set(name, std::vector<double>(v.size(), 0.0));
  return out;
}

bool ParamSet::all_finite() const {
  for (const auto& [_, v] : values_) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

std::string head_weights_key(std::size_t k) {
  return k == 0 ? "head_weights" : "head_weights." + std::to_string(k);
}

std::string head_bias_key(std::size_t k) {
  return k == 0 ? "head_bias" : "head_bias." + std::to_string(k);
}

Model Model::init(const FrontendConfig& cfg, const std::vector<std::size_t>& head_classes,
                  const MelInitConfig& mel) {
  Model m;
  m.config = cfg;
  m.state = FrontendState::init(cfg, mel);
  for (std::size_t c : head_classes) {
    if (c < 2) fail(ErrorCode::kInvalidArgument, "a head needs at least 2 classes");
    m.heads.push_back(Head{Matrix(static_cast<std::size_t>(cfg.n_filters), c),
                           std::vector<double>(c, 0.0)});
  }
  return m;
}

ParamSet Model::parameters() const {
  ParamSet p;
  switch (config.filtering) {
    case Filtering::kGabor:
      p.set(keys::kEta, state.bank.center_freqs);
      p.set(keys::kSigma, state.bank.inv_bandwidths);
      p.set(keys::kPoolWidths, state.pooling.widths);
      break;
    case Filtering::kNormalizedConv:
      p.set(keys::kConvKernels, state.conv.kernels.values());
      p.set(keys::kPoolWidths, state.pooling.widths);
      break;
    case Filtering::kMel:
      break;
  }
  if (config.compression != Compression::kLog) {
    p.set(keys::kPcenAlpha, state.pcen.alpha);
    p.set(keys::kPcenDelta, state.pcen.delta);
    p.set(keys::kPcenRoot, state.pcen.root);
    if (config.compression == Compression::kSpcen) p.set(keys::kPcenSmooth, state.pcen.smooth);
  }
  for (std::size_t k = 0; k < heads.size(); ++k) {
    p.set(head_weights_key(k), heads[k].weights.values());
    p.set(head_bias_key(k), heads[k].bias);
  }
  return p;
}

void Model::set_parameters(const ParamSet& params) {
  if (!params.same_shape(parameters())) {
    fail(ErrorCode::kShapeMismatch, "parameter set does not match the model variant");
  }
  const auto get = [&](const char* key, std::vector<double>& dst) {
    if (params.contains(key)) dst = params.at(key);
  };
  get(keys::kEta, state.bank.center_freqs);
  get(keys::kSigma, state.bank.inv_bandwidths);
  get(keys::kPoolWidths, state.pooling.widths);
  get(keys::kPcenAlpha, state.pcen.alpha);
  get(keys::kPcenDelta, state.pcen.delta);
  get(keys::kPcenRoot, state.pcen.root);
  get(keys::kPcenSmooth, state.pcen.smooth);
  get(keys::kConvKernels, state.conv.kernels.values());
  for (std::size_t k = 0; k < heads.size(); ++k) {
    heads[k].weights.values() = params.at(head_weights_key(k));
    heads[k].bias = params.at(head_bias_key(k));
  }
}

bool is_frontend_key(const std::string& name) {
  return name.rfind("head_", 0) != 0;
}

void project_parameters(ParamSet& params, const FrontendConfig& cfg) {
  const auto clamp_all = [&](const char* key, double lo, double hi) {
    if (!params.contains(key)) return;
    for (double& v : params.at(key)) v = std::clamp(v, lo, hi);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  clamp_all(keys::kEta, 0.0, 0.5);
  clamp_all(keys::kSigma, sigma_lower_bound(), sigma_upper_bound(cfg.filter_len));
  clamp_all(keys::kPoolWidths, pool_width_lower_bound(cfg.pool_len), kPoolWidthUpperBound);
  clamp_all(keys::kPcenAlpha, 0.0, 1.0);
  clamp_all(keys::kPcenDelta, 0.0, kInf);
  clamp_all(keys::kPcenRoot, 1.0, kInf);
  clamp_all(keys::kPcenSmooth, 0.0, 1.0);
  if (params.contains(keys::kConvKernels)) {
    auto& flat = params.at(keys::kConvKernels);
    const auto w = static_cast<std::size_t>(cfg.filter_len);
    if (flat.size() % w != 0) fail(ErrorCode::kShapeMismatch, "conv kernels not a multiple of W");
    ConvBank bank;
    bank.kernels = Matrix(flat.size() / w, w);
    bank.kernels.values() = flat;
    flat = renormalize_conv(std::move(bank)).kernels.values();
  }
}

std::uint64_t checksum(const std::vector<double>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

namespace {

// Parameter files reuse the feature-file header with version 2 and a float64
// payload: "LEAF", u32 2, u32 length, u32 1, u32 0, then doubles.
constexpr std::uint32_t kParamFileVersion = 2;

std::vector<std::uint8_t> encode_vector(const std::vector<double>& v) {
  std::vector<std::uint8_t> out{'L', 'E', 'A', 'F'};
  const auto put32 = [&](std::uint32_t x) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  };
  put32(kParamFileVersion);
  put32(static_cast<std::uint32_t>(v.size()));
  put32(1);
  put32(0);
  for (double d : v) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

std::vector<double> decode_vector(const std::vector<std::uint8_t>& b) {
  const auto get32 = [&](std::size_t at) {
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return x;
  };
  if (b.size() < 20 || b[0] != 'L' || b[1] != 'E' || b[2] != 'A' || b[3] != 'F' ||
      get32(4) != kParamFileVersion) {
    fail(ErrorCode::kBadFormat, "not a parameter file");
  }
  const std::size_t n = get32(8);
  if (b.size() != 20 + 8 * n) fail(ErrorCode::kBadFormat, "parameter file size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int j = 0; j < 8; ++j) bits |= static_cast<std::uint64_t>(b[20 + 8 * i + j]) << (8 * j);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void save_model(const std::filesystem::path& dir, const Model& model) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir.string());

  write_text(dir / "config.txt", format_config(model.config, model.state.mel));

  std::ostringstream heads;
  for (std::size_t k = 0; k < model.heads.size(); ++k) {
    heads << (k ? "," : "") << model.heads[k].num_classes();
  }
  write_text(dir / "heads.txt", heads.str() + "\n");

  std::ostringstream manifest;
  for (const auto& [name, values] : model.parameters()) {
    write_file(dir / (name + ".bin"), encode_vector(values));
    manifest << name << ' ' << values.size() << ' ' << hex64(checksum(values)) << '\n';
  }
  write_text(dir / "manifest.txt", manifest.str());
}

Model load_model(const std::filesystem::path& dir) {
  const auto text = [&](const char* name) {
    const auto b = read_file(dir / name);
    return std::string(b.begin(), b.end());
  };
  FrontendConfig cfg;
  MelInitConfig mel;
  apply_config(parse_key_values(text("config.txt")), cfg, mel);

  std::vector<std::size_t> classes;
  std::istringstream heads(text("heads.txt"));
  std::string item;
  while (std::getline(heads, item, ',')) {
    if (!item.empty() && item != "\n") classes.push_back(std::stoul(item));
  }

  Model model = Model::init(cfg, classes, mel);
  ParamSet params = model.parameters();
  std::istringstream manifest(text("manifest.txt"));
  std::string name, sum;
  std::size_t len = 0;
  std::size_t seen = 0;
  while (manifest >> name >> len >> sum) {
    if (!params.contains(name)) fail(ErrorCode::kBadFormat, "unexpected parameter " + name);
    auto values = decode_vector(read_file(dir / (name + ".bin")));
    if (values.size() != len || params.at(name).size() != len) {
      fail(ErrorCode::kShapeMismatch, "length mismatch for " + name);
    }
    if (hex64(checksum(values)) != sum) fail(ErrorCode::kBadFormat, "checksum mismatch for " + name);
    params.at(name) = std::move(values);
    ++seen;
  }
  if (seen != params.groups()) fail(ErrorCode::kBadFormat, "manifest is missing parameters");
  model.set_parameters(params);
  return model;
}

}  // namespace leaf
