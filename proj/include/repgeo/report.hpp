// Copyright 2026 The repgeo Authors
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

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "repgeo/property.hpp"
#include "repgeo/stats.hpp"
#include "repgeo/synth.hpp"
#include "repgeo/theory.hpp"
#include "repgeo/toymodel.hpp"

namespace repgeo::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const BatchSummary& s);
Json to_json(const CovMomentReport& m);
Json to_json(const MomentUncertainty& u);
Json to_json(const LayerSweep& sweep);
Json to_json(const MomentSweep& sweep, bool include_per_dim);
Json to_json(const Spread& s);

/// Spec files: {"d": D, "mu": [...], "sigma": [...]}.
Json spec_to_json(const NormalSpec& spec);
NormalSpec spec_from_json(const Json& j);
NormalSpec read_spec_file(const std::filesystem::path& path);
void write_spec_file(const NormalSpec& spec, const std::filesystem::path& path);

/// Accumulates the JSON report of one command. Wall time is deliberately not
/// part of it so identical runs give identical files.
class RunReport {
 public:
  RunReport(std::string command, std::uint64_t seed, Json config);

  void add_summary(const BatchSummary& s);
  void add_degenerate(std::size_t n) { degenerate_ += n; }
  Json& section(const std::string& name) { return sections_[name]; }

  Json to_json() const;
  std::string dump() const;  // indented, trailing newline

 private:
  std::string command_;
  std::uint64_t seed_;
  Json config_;
  Json summaries_ = Json::array();
  Json sections_ = Json::object();
  std::size_t degenerate_ = 0;
};

/// Four-decimal rounding for table CSVs.
std::string fixed4(double v);
/// Shortest decimal that round-trips to the same double.
std::string exact(double v);

std::string summaries_csv(std::span<const BatchSummary> rows);
std::string layer_sweep_csv(const LayerSweep& sweep);
/// Two rows (diagonal, off-diagonal) of theoretical vs estimated mean/std.
std::string cov_moments_csv(const CovMomentReport& theoretical, const CovMomentReport& estimated);
std::string qq_csv(const QQData& qq);
/// One row per dimension plus an aggregate row.
std::string moment_sweep_csv(const MomentSweep& sweep);

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace repgeo::report
