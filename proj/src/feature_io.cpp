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

#include "leaf/feature_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "leaf/error.hpp"

namespace leaf {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(ErrorCode::kInvalidConfig, "bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double out = 0.0;
  in >> out;
  if (in.fail() || !in.eof()) fail(ErrorCode::kInvalidConfig, "bad number for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_features(const FeatureMap& f) {
  std::vector<std::uint8_t> out{'L', 'E', 'A', 'F'};
  put_u32(out, kFeatureFileVersion);
  put_u32(out, static_cast<std::uint32_t>(f.frames()));
  put_u32(out, static_cast<std::uint32_t>(f.channels()));
  put_u32(out, static_cast<std::uint32_t>(std::lround(f.frame_rate)));
  out.reserve(out.size() + 4 * f.values.size());
  for (double v : f.values.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

FeatureMap decode_features(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20 || bytes[0] != 'L' || bytes[1] != 'E' || bytes[2] != 'A' || bytes[3] != 'F') {
    fail(ErrorCode::kBadFormat, "not a feature file (missing LEAF magic)");
  }
  if (get_u32(bytes, 4) != kFeatureFileVersion) {
    fail(ErrorCode::kBadFormat, "unsupported feature file version");
  }
  const std::size_t M = get_u32(bytes, 8), N = get_u32(bytes, 12);
  if (bytes.size() != 20 + 4 * M * N) fail(ErrorCode::kBadFormat, "feature file size mismatch");
  FeatureMap f;
  f.frame_rate = get_u32(bytes, 16);
  f.values = Matrix(M, N);
  auto& vals = f.values.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = std::bit_cast<float>(get_u32(bytes, 20 + 4 * i));
  }
  return f;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void write_features(const std::filesystem::path& path, const FeatureMap& f) {
  write_file(path, encode_features(f));
}

FeatureMap read_features(const std::filesystem::path& path) {
  return decode_features(read_file(path));
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kInvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config(const std::map<std::string, std::string>& kv, FrontendConfig& cfg,
                  MelInitConfig& mel) {
  for (const auto& [key, value] : kv) {
    if (key == "n_filters") {
      cfg.n_filters = mel.n_filters = to_int(key, value);
    } else if (key == "filter_len") {
      cfg.filter_len = to_int(key, value);
    } else if (key == "pool_len") {
      cfg.pool_len = to_int(key, value);
    } else if (key == "pool_stride") {
      cfg.pool_stride = to_int(key, value);
    } else if (key == "compression") {
      cfg.compression = parse_compression(value);
    } else if (key == "filtering") {
      cfg.filtering = parse_filtering(value);
    } else if (key == "sample_rate") {
      cfg.sample_rate = mel.sample_rate = to_int(key, value);
    } else if (key == "fmin") {
      mel.fmin = to_double(key, value);
    } else if (key == "fmax") {
      mel.fmax = to_double(key, value);
    } else if (key == "n_fft") {
      mel.n_fft = to_int(key, value);
    } else {
      fail(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
}

std::string format_config(const FrontendConfig& cfg, const MelInitConfig& mel) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "n_filters=" << cfg.n_filters << '\n'
      << "filter_len=" << cfg.filter_len << '\n'
      << "pool_len=" << cfg.pool_len << '\n'
      << "pool_stride=" << cfg.pool_stride << '\n'
      << "compression=" << to_string(cfg.compression) << '\n'
      << "filtering=" << to_string(cfg.filtering) << '\n'
      << "sample_rate=" << cfg.sample_rate << '\n'
      << "fmin=" << mel.fmin << '\n'
      << "fmax=" << mel.fmax << '\n'
      << "n_fft=" << mel.n_fft << '\n';
  return out.str();
}

void apply_frontend_kind(std::string_view kind, FrontendConfig& cfg) {
  if (kind == "leaf") {
    cfg.filtering = Filtering::kGabor;
    cfg.compression = Compression::kSpcen;
  } else if (kind == "leaf-log") {
    cfg.filtering = Filtering::kGabor;
    cfg.compression = Compression::kLog;
  } else if (kind == "leaf-pcen") {
    cfg.filtering = Filtering::kGabor;
    cfg.compression = Compression::kPcen;
  } else if (kind == "mel") {
    cfg.filtering = Filtering::kMel;
    cfg.compression = Compression::kLog;
  } else if (kind == "mel-pcen") {
    cfg.filtering = Filtering::kMel;
    cfg.compression = Compression::kSpcen;
  } else if (kind == "convnorm") {
    cfg.filtering = Filtering::kNormalizedConv;
    cfg.compression = Compression::kSpcen;
  } else {
    fail(ErrorCode::kInvalidConfig, "unknown frontend '" + std::string(kind) + "'");
  }
}

}  // namespace leaf
