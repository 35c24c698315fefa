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

#include "repgeo/report.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "repgeo/error.hpp"

namespace repgeo::report {

Json to_json(const BatchSummary& s) {
  return Json{{"scenario", s.scenario}, {"n", s.n_tests}, {"average", s.average}, {"min", s.min},
              {"skipped", s.skipped}};
}

Json to_json(const CovMomentReport& m) {
  return Json{{"source", m.source == MomentSource::theoretical ? "theoretical" : "estimated"},
              {"diag_mean", m.diag_mean},
              {"diag_std", m.diag_std},
              {"offdiag_mean", m.offdiag_mean},
              {"offdiag_std", m.offdiag_std}};
}

Json to_json(const MomentUncertainty& u) {
  return Json{{"diag_samples", u.diag_samples},     {"offdiag_samples", u.offdiag_samples},
              {"diag_mean_se", u.diag_mean_se},     {"offdiag_mean_se", u.offdiag_mean_se},
              {"diag_var_se", u.diag_var_se},       {"offdiag_var_se", u.offdiag_var_se}};
}

Json to_json(const LayerSweep& sweep) {
  Json layers = Json::array();
  for (std::size_t k = 0; k < sweep.per_layer.size(); ++k) {
    Json row = to_json(sweep.per_layer[k]);
    row["layer"] = k;
    layers.push_back(std::move(row));
  }
  return Json{{"convention", std::string(convention_tag(sweep.convention))}, {"layers", std::move(layers)}};
}

Json to_json(const MomentSweep& sweep, bool include_per_dim) {
  Json j{{"dimensions", sweep.per_dim.size()},
         {"skewness_mean", sweep.skew_mean},
         {"skewness_std", sweep.skew_std},
         {"kurtosis_mean", sweep.kurt_mean},
         {"kurtosis_std", sweep.kurt_std}};
  if (include_per_dim) {
    Json rows = Json::array();
    for (const auto& d : sweep.per_dim) {
      rows.push_back(Json{{"dim", d.dim}, {"mean", d.mean}, {"sd", d.sd},
                          {"skewness", d.moments.skewness}, {"kurtosis", d.moments.kurtosis}});
    }
    j["per_dim"] = std::move(rows);
  }
  return j;
}

Json to_json(const Spread& s) { return Json{{"mean", s.mean}, {"std", s.std}}; }

Json spec_to_json(const NormalSpec& spec) {
  return Json{{"d", spec.dim()}, {"mu", spec.mu().values()}, {"sigma", spec.sigma().values()}};
}

NormalSpec spec_from_json(const Json& j) {
  try {
    auto mu = j.at("mu").get<std::vector<double>>();
    auto sigma = j.at("sigma").get<std::vector<double>>();
    if (j.contains("d") && j.at("d").get<std::size_t>() != mu.size()) {
      fail(Errc::length_mismatch, "spec declares d=" + std::to_string(j.at("d").get<std::size_t>()) + " but mu has " +
                                      std::to_string(mu.size()) + " entries");
    }
    return NormalSpec(Vector(std::move(mu)), Vector(std::move(sigma)));
  } catch (const Json::exception& e) {
    fail(Errc::parse_error, std::string("spec: ") + e.what());
  }
}

NormalSpec read_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(Errc::parse_error, path.string() + ": offset " + std::to_string(e.byte) + ": " + e.what());
  }
  return spec_from_json(j);
}

void write_spec_file(const NormalSpec& spec, const std::filesystem::path& path) {
  write_file(path, spec_to_json(spec).dump(2) + "\n");
}

RunReport::RunReport(std::string command, std::uint64_t seed, Json config)
    : command_(std::move(command)), seed_(seed), config_(std::move(config)) {}

void RunReport::add_summary(const BatchSummary& s) {
  summaries_.push_back(report::to_json(s));
  degenerate_ += s.skipped;
}

Json RunReport::to_json() const {
  Json j{{"schema", kSchemaVersion}, {"command", command_}, {"seed", seed_}, {"config", config_},
         {"summaries", summaries_}, {"degenerate", degenerate_}};
  for (const auto& [k, v] : sections_.items()) j[k] = v;
  return j;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

std::string fixed4(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 4);
  std::string s(buf.data(), res.ptr);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string exact(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string summaries_csv(std::span<const BatchSummary> rows) {
  std::string out = "scenario,n,average,min,skipped\n";
  for (const auto& r : rows) {
    out += r.scenario + "," + std::to_string(r.n_tests) + "," + fixed4(r.average) + "," + fixed4(r.min) + "," +
           std::to_string(r.skipped) + "\n";
  }
  return out;
}

std::string layer_sweep_csv(const LayerSweep& sweep) {
  std::string out = "layer,n,average,min,skipped\n";
  for (std::size_t k = 0; k < sweep.per_layer.size(); ++k) {
    const auto& r = sweep.per_layer[k];
    out += std::to_string(k) + "," + std::to_string(r.n_tests) + "," + fixed4(r.average) + "," + fixed4(r.min) +
           "," + std::to_string(r.skipped) + "\n";
  }
  return out;
}

std::string cov_moments_csv(const CovMomentReport& theoretical, const CovMomentReport& estimated) {
  std::string out = "entries,theoretical_mean,theoretical_std,estimated_mean,estimated_std\n";
  out += "diagonal," + fixed4(theoretical.diag_mean) + "," + fixed4(theoretical.diag_std) + "," +
         fixed4(estimated.diag_mean) + "," + fixed4(estimated.diag_std) + "\n";
  out += "off-diagonal," + fixed4(theoretical.offdiag_mean) + "," + fixed4(theoretical.offdiag_std) + "," +
         fixed4(estimated.offdiag_mean) + "," + fixed4(estimated.offdiag_std) + "\n";
  return out;
}

std::string qq_csv(const QQData& qq) {
  std::string out = "theoretical,empirical\n";
  for (const auto& [t, e] : qq.points) out += exact(t) + "," + exact(e) + "\n";
  return out;
}

std::string moment_sweep_csv(const MomentSweep& sweep) {
  std::string out = "dim,mean,sd,skewness,kurtosis\n";
  for (const auto& d : sweep.per_dim) {
    out += std::to_string(d.dim) + "," + exact(d.mean) + "," + exact(d.sd) + "," + exact(d.moments.skewness) + "," +
           exact(d.moments.kurtosis) + "\n";
  }
  out += "aggregate,,," + fixed4(sweep.skew_mean) + " +- " + fixed4(sweep.skew_std) + "," + fixed4(sweep.kurt_mean) +
         " +- " + fixed4(sweep.kurt_std) + "\n";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

}  // namespace repgeo::report
