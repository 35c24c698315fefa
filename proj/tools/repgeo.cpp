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

// repgeo command-line front end.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repgeo/error.hpp"
#include "repgeo/ingest.hpp"
#include "repgeo/linalg.hpp"
#include "repgeo/property.hpp"
#include "repgeo/report.hpp"
#include "repgeo/rng.hpp"
#include "repgeo/stats.hpp"
#include "repgeo/synth.hpp"
#include "repgeo/theory.hpp"
#include "repgeo/toymodel.hpp"

namespace {

using namespace repgeo;
using report::Json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Reads --config files. Top-level scalars and arrays apply to the selected
// subcommand; a nested object keyed by a subcommand name applies to it.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    Json j = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->reduced_results().size() == 1 ? Json(opt->reduced_results().front()) : Json(opt->reduced_results());
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    Json j;
    try {
      j = Json::parse(input);
    } catch (const Json::parse_error& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<std::string> active;
    for (const CLI::App* sub : root_->get_subcommands()) active.push_back(sub->get_name());
    std::vector<CLI::ConfigItem> items;
    collect(j, active, items);
    return items;
  }

 private:
  void collect(const Json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) const {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        collect(value, {key}, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  const CLI::App* root_;
};

struct Common {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out;
  std::string csv;
  std::string convention = "B";
};

void add_common(CLI::App* sub, Common& c, bool with_convention = true) {
  sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker threads")->envname("REPGEO_JOBS")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--out", c.out, "JSON report path (stdout when omitted)");
  sub->add_option("--csv", c.csv, "CSV table path");
  if (with_convention) {
    sub->add_option("--convention", c.convention, "PCA convention A, B or C")
        ->check(CLI::IsMember({"A", "B", "C"}))
        ->capture_default_str();
  }
}

PcaConvention convention_of(const Common& c) { return *parse_convention(c.convention); }

struct ToyOpts {
  ToyModelConfig cfg;
  std::string init = "gaussian";
  std::string positional = "learned";
  std::string activation = "relu";
  bool no_layer_norm = false;
  std::size_t sequences = 500;
  std::size_t len_min = 8;
  std::size_t len_max = 64;
  bool distinct = false;
  std::vector<std::string> bundles;
  std::string export_dir;
};

void add_layer_source(CLI::App* sub, ToyOpts& t) {
  sub->add_option("--bundles", t.bundles, "Per-layer bundles in layer order (replaces the toy model)");
  sub->add_option("--d-model", t.cfg.d_model)->capture_default_str();
  sub->add_option("--layers", t.cfg.n_layers)->capture_default_str();
  sub->add_option("--heads", t.cfg.n_heads)->capture_default_str();
  sub->add_option("--d-ff", t.cfg.d_ff)->capture_default_str();
  sub->add_option("--vocab", t.cfg.vocab_size)->capture_default_str();
  sub->add_option("--max-len", t.cfg.max_len)->capture_default_str();
  sub->add_option("--init", t.init)->check(CLI::IsMember({"gaussian", "uniform"}))->capture_default_str();
  sub->add_option("--init-scale", t.cfg.init.scale)->capture_default_str();
  sub->add_option("--positional", t.positional)->check(CLI::IsMember({"none", "learned"}))->capture_default_str();
  sub->add_option("--activation", t.activation)->check(CLI::IsMember({"relu", "gelu"}))->capture_default_str();
  sub->add_flag("--no-layer-norm", t.no_layer_norm);
  sub->add_option("--sequences", t.sequences, "Random token sequences")->capture_default_str();
  sub->add_option("--len-min", t.len_min)->capture_default_str();
  sub->add_option("--len-max", t.len_max)->capture_default_str();
  sub->add_flag("--distinct", t.distinct, "No repeated ids within a sequence");
  sub->add_option("--export-dir", t.export_dir, "Write each layer as a binary bundle here");
}

Json toy_echo(const ToyOpts& t) {
  if (!t.bundles.empty()) return Json{{"bundles", t.bundles}};
  return Json{{"d_model", t.cfg.d_model},       {"layers", t.cfg.n_layers},  {"heads", t.cfg.n_heads},
              {"d_ff", t.cfg.d_ff},             {"vocab", t.cfg.vocab_size}, {"max_len", t.cfg.max_len},
              {"init", t.init},                 {"init_scale", t.cfg.init.scale},
              {"positional", t.positional},     {"activation", t.activation},
              {"layer_norm", !t.no_layer_norm}, {"sequences", t.sequences},  {"len_min", t.len_min},
              {"len_max", t.len_max},           {"distinct", t.distinct}};
}

std::vector<std::vector<ReprMatrix>> load_layers(ToyOpts& t, std::uint64_t seed, std::size_t jobs) {
  std::vector<std::vector<ReprMatrix>> layers;
  if (!t.bundles.empty()) {
    for (const auto& path : t.bundles) {
      ReprBundle b = read_bundle(path);
      if (!layers.empty()) {
        const auto& first = layers.front();
        if (b.sentences.size() != first.size()) {
          fail(Errc::dimension_mismatch, path + ": " + std::to_string(b.sentences.size()) + " sentences, expected " +
                                             std::to_string(first.size()));
        }
        for (std::size_t s = 0; s < first.size(); ++s) {
          if (b.sentences[s].matrix.tokens() != first[s].tokens()) {
            fail(Errc::dimension_mismatch, path + ": sentence '" + b.sentences[s].id + "' length differs across layers");
          }
        }
      }
      layers.push_back(b.matrices());
    }
    return layers;
  }
  t.cfg.init.kind = t.init == "uniform" ? InitKind::uniform : InitKind::gaussian;
  t.cfg.positional = t.positional == "none" ? Positional::none : Positional::learned_random;
  t.cfg.activation = t.activation == "gelu" ? Activation::gelu : Activation::relu;
  t.cfg.layer_norm = !t.no_layer_norm;
  t.cfg.seed = seed;
  const ToyModel model = init_model(t.cfg);
  const auto corpus = random_sequences(t.sequences, t.cfg.vocab_size, t.len_min, t.len_max, t.distinct, seed);
  layers = encode_corpus(model, corpus, jobs);
  if (!t.export_dir.empty()) {
    fs::create_directories(t.export_dir);
    for (std::size_t k = 0; k < layers.size(); ++k) {
      auto b = bundle_from_matrices(layers[k], {{"model", "toy"}, {"layer", std::to_string(k)}});
      write_bundle(b, fs::path(t.export_dir) / ("layer" + std::to_string(k) + ".bin"));
    }
  }
  return layers;
}

void emit(const report::RunReport& rep, const Common& c, const std::string& csv) {
  if (c.out.empty()) {
    std::cout << rep.dump();
  } else {
    report::write_file(c.out, rep.dump());
  }
  if (!c.csv.empty() && !csv.empty()) report::write_file(c.csv, csv);
}

void print_summaries(std::span<const BatchSummary> rows) { std::cerr << report::summaries_csv(rows); }

std::string per_sentence_csv(const ReprBundle& b, std::span<const std::optional<PropertyResult>> results) {
  std::string out = "id,L,abs_cos\n";
  for (std::size_t s = 0; s < b.sentences.size(); ++s) {
    out += b.sentences[s].id + "," + std::to_string(b.sentences[s].matrix.tokens()) + "," +
           (results[s] ? report::exact(results[s]->abs_cos) : std::string("degenerate")) + "\n";
  }
  return out;
}

std::string scenario_name(const ReprBundle& b, const std::string& path) {
  std::string name = b.metadata.count("model") ? b.metadata.at("model") : fs::path(path).stem().string();
  if (b.metadata.count("layer")) name += "/layer" + b.metadata.at("layer");
  return name;
}

// ---- property --------------------------------------------------------------

struct PropertyOpts {
  Common c;
  std::string bundle;
  bool strict = false;
  std::string per_sentence;
};

int run_property(PropertyOpts& o) {
  const ReprBundle b = read_bundle(o.bundle);
  const auto conv = convention_of(o.c);
  const auto corpus = b.matrices();
  const auto results = property_each(corpus, conv, !o.strict, o.c.jobs);
  const BatchSummary s = summarize(results, scenario_name(b, o.bundle));
  report::RunReport rep("property", o.c.seed,
                        Json{{"bundle", o.bundle}, {"convention", o.c.convention}, {"strict", o.strict}});
  rep.add_summary(s);
  rep.section("metadata") = b.metadata;
  if (!o.per_sentence.empty()) report::write_file(o.per_sentence, per_sentence_csv(b, results));
  print_summaries(std::span(&s, 1));
  emit(rep, o.c, report::summaries_csv(std::span(&s, 1)));
  return kExitOk;
}

// ---- layer-sweep / mix-layers / shuffle --------------------------------------

struct LayerOpts {
  Common c;
  ToyOpts toy;
  std::optional<std::size_t> layer_lo;
  std::optional<std::size_t> layer_hi;
};

int run_layer_sweep(LayerOpts& o) {
  const auto layers = load_layers(o.toy, o.c.seed, o.c.jobs);
  const auto conv = convention_of(o.c);
  const LayerSweep sweep = layer_sweep(layers, conv, o.c.jobs);
  Json cfg = toy_echo(o.toy);
  cfg["convention"] = o.c.convention;
  report::RunReport rep("layer-sweep", o.c.seed, cfg);
  for (const auto& s : sweep.per_layer) rep.add_summary(s);
  rep.section("layer_sweep") = report::to_json(sweep);
  std::cerr << report::layer_sweep_csv(sweep);
  emit(rep, o.c, report::layer_sweep_csv(sweep));
  return kExitOk;
}

int run_mix_layers(LayerOpts& o) {
  const auto layers = load_layers(o.toy, o.c.seed, o.c.jobs);
  const std::size_t last = layers.size() - 1;
  const std::size_t hi = o.layer_hi.value_or(last);
  const std::size_t lo = o.layer_lo.value_or(hi >= 3 ? hi - 3 : 0);
  const auto conv = convention_of(o.c);
  const auto mixed = mix_random_layers(layers, lo, hi, o.c.seed);
  std::vector<BatchSummary> rows{
      batch_property(layers[last], conv, true, "last-layer", o.c.jobs),
      batch_property(mixed, conv, true, "random-layer[" + std::to_string(lo) + ".." + std::to_string(hi) + "]",
                     o.c.jobs)};
  Json cfg = toy_echo(o.toy);
  cfg["convention"] = o.c.convention;
  cfg["layer_lo"] = lo;
  cfg["layer_hi"] = hi;
  report::RunReport rep("mix-layers", o.c.seed, cfg);
  for (const auto& s : rows) rep.add_summary(s);
  rep.section("delta_average") = rows[1].average - rows[0].average;
  print_summaries(rows);
  emit(rep, o.c, report::summaries_csv(rows));
  return kExitOk;
}

struct ShuffleOpts {
  LayerOpts layer;
  std::string bundle;
};

int run_shuffle(ShuffleOpts& so) {
  LayerOpts& o = so.layer;
  std::vector<ReprMatrix> last;
  Json cfg;
  if (!so.bundle.empty()) {
    last = read_bundle(so.bundle).matrices();
    cfg = Json{{"bundle", so.bundle}};
  } else {
    auto layers = load_layers(o.toy, o.c.seed, o.c.jobs);
    last = std::move(layers.back());
    cfg = toy_echo(o.toy);
  }
  cfg["convention"] = o.c.convention;
  const auto conv = convention_of(o.c);
  const auto shuffled = shuffle_cross_sequence(last, o.c.seed);
  std::vector<BatchSummary> rows{batch_property(last, conv, true, "last-layer", o.c.jobs),
                                 batch_property(shuffled, conv, true, "random-sentence", o.c.jobs)};
  report::RunReport rep("shuffle", o.c.seed, cfg);
  for (const auto& s : rows) rep.add_summary(s);
  rep.section("delta_average") = rows[1].average - rows[0].average;
  print_summaries(rows);
  emit(rep, o.c, report::summaries_csv(rows));
  return kExitOk;
}

// ---- synth-table4 --------------------------------------------------------------

struct SynthOpts {
  Common c;
  SynthConfig cfg;
  bool fixed_spec = false;
  bool sensitivity = false;
  std::size_t sensitivity_tests = 1000;
};

void add_synth_shape(CLI::App* sub, SynthConfig& cfg) {
  sub->add_option("--d", cfg.d, "Dimension")->capture_default_str();
  sub->add_option("--len-min", cfg.length.min)->capture_default_str();
  sub->add_option("--len-max", cfg.length.max)->capture_default_str();
  sub->add_option("--n-tests", cfg.n_tests)->capture_default_str();
  sub->add_flag("--zero-sum", cfg.zero_sum, "Shift each column to sum to zero");
}

Json synth_echo(const SynthConfig& cfg) {
  return Json{{"d", cfg.d},
              {"len_min", cfg.length.min},
              {"len_max", cfg.length.max},
              {"n_tests", cfg.n_tests},
              {"zero_sum", cfg.zero_sum},
              {"resample_spec_per_test", cfg.resample_spec_per_test}};
}

Json prior_json(const HyperPrior& p) {
  return Json{{"label", p.label}, {"mu", {p.mu.low, p.mu.high}}, {"sigma", {p.sigma.low, p.sigma.high}}};
}

int run_synth_table4(SynthOpts& o) {
  o.cfg.seed = o.c.seed;
  o.cfg.resample_spec_per_test = !o.fixed_spec;
  const auto conv = convention_of(o.c);
  const auto priors = table4_priors();
  const auto rows = run_table4(o.cfg, priors, conv, o.c.jobs);
  Json cfg = synth_echo(o.cfg);
  cfg["convention"] = o.c.convention;
  Json pj = Json::array();
  for (const auto& p : priors) pj.push_back(prior_json(p));
  cfg["priors"] = pj;
  if (o.sensitivity) cfg["sensitivity_tests"] = o.sensitivity_tests;
  report::RunReport rep("synth-table4", o.c.seed, cfg);
  for (const auto& s : rows) rep.add_summary(s);
  print_summaries(rows);
  if (o.sensitivity) {
    struct Shape {
      std::size_t d, lmin, lmax;
    };
    const std::vector<Shape> grid{{128, 8, 64}, {256, 8, 64}, {512, 8, 64}, {768, 8, 64}, {1024, 8, 64},
                                  {768, 8, 16}, {768, 16, 32}, {768, 32, 64}, {768, 64, 128}, {768, 128, 256}};
    Json sweep = Json::array();
    for (const auto& g : grid) {
      SynthConfig sc = o.cfg;
      sc.d = g.d;
      sc.length = {g.lmin, g.lmax};
      sc.n_tests = o.sensitivity_tests;
      const auto srows = run_table4(sc, priors, conv, o.c.jobs);
      Json entry{{"d", g.d}, {"len_min", g.lmin}, {"len_max", g.lmax}, {"rows", Json::array()}};
      for (const auto& s : srows) entry["rows"].push_back(report::to_json(s));
      std::cerr << "sensitivity d=" << g.d << " L=" << g.lmin << ".." << g.lmax << ":";
      for (const auto& s : srows) std::cerr << " " << report::fixed4(s.average) << "/" << report::fixed4(s.min);
      std::cerr << "\n";
      sweep.push_back(std::move(entry));
    }
    rep.section("sensitivity") = std::move(sweep);
  }
  emit(rep, o.c, report::summaries_csv(rows));
  return kExitOk;
}

// ---- fit-and-synth ---------------------------------------------------------------

struct FitOpts {
  Common c;
  SynthConfig cfg;
  std::string bundle;
  std::string spec;
  std::string spec_out;
};

int run_fit_and_synth(FitOpts& o) {
  if (o.bundle.empty() == o.spec.empty()) throw CLI::ValidationError("fit-and-synth", "give exactly one of --bundle or --spec");
  o.cfg.seed = o.c.seed;
  const auto conv = convention_of(o.c);
  std::vector<BatchSummary> rows;
  std::optional<NormalSpec> spec;
  std::string name;
  if (!o.bundle.empty()) {
    const ReprBundle b = read_bundle(o.bundle);
    const auto corpus = b.matrices();
    spec = fit_spec(corpus);
    name = scenario_name(b, o.bundle);
    rows.push_back(batch_property(corpus, conv, true, name + "/observed", o.c.jobs));
  } else {
    spec = report::read_spec_file(o.spec);
    name = fs::path(o.spec).stem().string();
  }
  o.cfg.d = spec->dim();
  rows.push_back(run_fixed_spec(*spec, o.cfg, conv, name + "/fitted-normal", o.c.jobs));
  if (!o.spec_out.empty()) report::write_spec_file(*spec, o.spec_out);
  Json cfg = synth_echo(o.cfg);
  cfg["convention"] = o.c.convention;
  cfg["bundle"] = o.bundle;
  cfg["spec"] = o.spec;
  report::RunReport rep("fit-and-synth", o.c.seed, cfg);
  for (const auto& s : rows) rep.add_summary(s);
  rep.section("spec") = report::spec_to_json(*spec);
  print_summaries(rows);
  emit(rep, o.c, report::summaries_csv(rows));
  return kExitOk;
}

// ---- diagnostics -----------------------------------------------------------------

struct DiagOpts {
  Common c;
  std::string bundle;
  std::size_t qq_dim = 0;
  std::size_t qq_points = 100;
  double qq_fraction = 0.1;
  std::string qq_csv;
  bool no_covariance = false;
};

int run_diagnostics(DiagOpts& o) {
  const ReprBundle b = read_bundle(o.bundle);
  const auto corpus = b.matrices();
  if (corpus.empty()) fail(Errc::empty_corpus, o.bundle + " holds no sentences");
  const auto dims = dimension_samples(corpus);
  if (o.qq_dim >= dims.size()) {
    throw CLI::ValidationError("--qq-dim", "must be below d = " + std::to_string(dims.size()));
  }
  const MomentSweep sweep = per_dimension_moment_sweep(dims, o.c.jobs);
  const QQData qq = qq_points(dims[o.qq_dim], o.qq_points, o.qq_fraction, o.c.seed);

  report::RunReport rep("diagnostics", o.c.seed,
                        Json{{"bundle", o.bundle},
                             {"qq_dim", o.qq_dim},
                             {"qq_points", o.qq_points},
                             {"qq_fraction", o.qq_fraction},
                             {"covariance", !o.no_covariance}});
  rep.section("moments") = report::to_json(sweep, true);
  rep.section("qq") = Json{{"dim", o.qq_dim}, {"points", qq.points.size()}, {"correlation", qq.correlation}};
  std::cerr << "skewness " << report::fixed4(sweep.skew_mean) << " +- " << report::fixed4(sweep.skew_std)
            << ", kurtosis " << report::fixed4(sweep.kurt_mean) << " +- " << report::fixed4(sweep.kurt_std)
            << ", qq correlation " << report::fixed4(qq.correlation) << "\n";
  if (!o.no_covariance) {
    const SymMatrix cov = feature_covariance(corpus, o.c.jobs);
    const std::size_t d = cov.size();
    SymMatrix corr(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) corr.set(i, j, cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)));
    }
    const Spread sc = offdiag_spread(cov);
    const Spread sr = offdiag_spread(corr);
    rep.section("offdiag") = Json{{"covariance", report::to_json(sc)}, {"correlation", report::to_json(sr)}};
    std::cerr << "off-diagonal covariance " << report::fixed4(sc.mean) << " +- " << report::fixed4(sc.std)
              << ", correlation " << report::fixed4(sr.mean) << " +- " << report::fixed4(sr.std) << "\n";
  }
  if (!o.qq_csv.empty()) report::write_file(o.qq_csv, report::qq_csv(qq));
  emit(rep, o.c, report::moment_sweep_csv(sweep));
  return kExitOk;
}

// ---- theory-check ----------------------------------------------------------------

struct TheoryOpts {
  Common c;
  std::string spec;
  std::size_t prior = 1;
  std::size_t d = 768;
  std::size_t L = 64;
  std::size_t n = 2000;
  bool zero_sum = false;
};

Json delta_json(double est, double theo, double se) {
  return Json{{"estimated", est}, {"theoretical", theo}, {"delta", est - theo}, {"se", se},
              {"z", se > 0.0 ? (est - theo) / se : 0.0}};
}

void print_delta(const std::string& what, double est, double theo, double se) {
  std::cerr << what << ": estimated " << report::exact(est) << " theoretical " << report::exact(theo) << " delta "
            << report::exact(est - theo) << " se " << report::exact(se) << "\n";
}

int run_theory_check(TheoryOpts& o) {
  std::optional<NormalSpec> spec;
  Json cfg{{"L", o.L}, {"n", o.n}, {"zero_sum", o.zero_sum}};
  if (!o.spec.empty()) {
    spec = report::read_spec_file(o.spec);
    cfg["spec"] = o.spec;
  } else {
    const auto priors = table4_priors();
    if (o.prior < 1 || o.prior > priors.size()) throw CLI::ValidationError("--prior", "must be 1..4");
    spec = sample_spec(priors[o.prior - 1], o.d, o.c.seed);
    cfg["prior"] = prior_json(priors[o.prior - 1]);
    cfg["d"] = o.d;
  }
  const CovMomentReport theo = theoretical_moments(*spec);
  const MonteCarloMoments mc = monte_carlo_moments(*spec, o.L, o.n, o.c.seed, o.zero_sum, o.c.jobs);
  const auto& est = mc.estimate;
  const auto& u = mc.uncertainty;

  report::RunReport rep("theory-check", o.c.seed, cfg);
  rep.section("theoretical") = report::to_json(theo);
  rep.section("estimated") = report::to_json(est);
  rep.section("uncertainty") = report::to_json(u);
  rep.section("deltas") =
      Json{{"diag_mean", delta_json(est.diag_mean, theo.diag_mean, u.diag_mean_se)},
           {"offdiag_mean", delta_json(est.offdiag_mean, theo.offdiag_mean, u.offdiag_mean_se)},
           {"diag_var", delta_json(est.diag_std * est.diag_std, theo.diag_std * theo.diag_std, u.diag_var_se)},
           {"offdiag_var",
            delta_json(est.offdiag_std * est.offdiag_std, theo.offdiag_std * theo.offdiag_std, u.offdiag_var_se)}};
  print_delta("diagonal mean", est.diag_mean, theo.diag_mean, u.diag_mean_se);
  print_delta("off-diagonal mean", est.offdiag_mean, theo.offdiag_mean, u.offdiag_mean_se);
  print_delta("diagonal variance", est.diag_std * est.diag_std, theo.diag_std * theo.diag_std, u.diag_var_se);
  print_delta("off-diagonal variance", est.offdiag_std * est.offdiag_std, theo.offdiag_std * theo.offdiag_std,
              u.offdiag_var_se);

  // Spectrum of one sampled C against the constant-structure prediction.
  rng::Stream stream(o.c.seed, rng::stream_id(0, rng::Purpose::generic));
  const ReprMatrix r = sample_matrix(*spec, o.L, stream, o.zero_sum);
  const SymMatrix c = token_covariance(r, Centering::none);
  const EigenPair top = top_eigenpair(c);
  const ConstantSpectrum cs = constant_structure_spectrum({theo.diag_mean, theo.offdiag_mean, o.L});
  Json spectrum{{"a", theo.diag_mean},
                {"b", theo.offdiag_mean},
                {"predicted_lambda_max", cs.lambda_max},
                {"sampled_lambda_max", top.value},
                {"alignment_with_uniform", std::abs(cosine(top.vector, cs.w))}};
  try {
    const RowSumBounds rb = perron_bounds(c);
    spectrum["row_sum_bounds"] = Json{{"low", rb.low}, {"high", rb.high},
                                      {"contains_lambda_max", rb.low <= top.value && top.value <= rb.high}};
  } catch (const Error& e) {
    if (e.code() != Errc::negative_entry) throw;
    spectrum["row_sum_bounds"] = nullptr;
  }
  rep.section("spectrum") = spectrum;
  std::cerr << "lambda_max predicted " << report::exact(cs.lambda_max) << " sampled " << report::exact(top.value)
            << "\n";
  emit(rep, o.c, report::cov_moments_csv(theo, est));
  return kExitOk;
}

// ---- baseline-random ---------------------------------------------------------------

struct BaselineOpts {
  Common c;
  SynthConfig cfg;
  double low = -1.0;
  double high = 1.0;
  std::string conventions = "all";
};

int run_baseline_random(BaselineOpts& o) {
  if (!(o.low < o.high)) throw CLI::ValidationError("--low/--high", "need low < high");
  o.cfg.seed = o.c.seed;
  validate(o.cfg);
  std::vector<PcaConvention> convs;
  if (o.conventions == "all") {
    convs = {PcaConvention::token_centered, PcaConvention::dimension_centered, PcaConvention::uncentered};
  } else {
    convs = {*parse_convention(o.conventions)};
  }
  const auto make = [&](std::size_t t) {
    rng::Stream len_stream(o.c.seed, rng::stream_id(t, rng::Purpose::length));
    rng::Stream mat_stream(o.c.seed, rng::stream_id(t, rng::Purpose::matrix));
    const std::size_t L = sample_length(o.cfg.length, len_stream);
    std::vector<double> values(o.cfg.d * L);
    for (double& v : values) v = mat_stream.uniform(o.low, o.high);
    return ReprMatrix(o.cfg.d, L, std::move(values));
  };
  std::vector<BatchSummary> rows;
  const std::string support = "uniform[" + report::exact(o.low) + "," + report::exact(o.high) + "]";
  for (const auto conv : convs) {
    rows.push_back(batch_property_generated(o.cfg.n_tests, make, conv, true,
                                            support + "/" + std::string(convention_tag(conv)), o.c.jobs));
  }
  Json cfg = synth_echo(o.cfg);
  cfg.erase("zero_sum");
  cfg.erase("resample_spec_per_test");
  cfg["low"] = o.low;
  cfg["high"] = o.high;
  cfg["convention"] = o.conventions;
  report::RunReport rep("baseline-random", o.c.seed, cfg);
  for (const auto& s : rows) rep.add_summary(s);
  print_summaries(rows);
  emit(rep, o.c, report::summaries_csv(rows));
  return kExitOk;
}

// ---- wordvec-property ----------------------------------------------------------------

struct WordvecOpts {
  Common c;
  std::string vectors;
  bool header = false;
  std::string sentences;
  std::string oov = "skip";
  std::string per_sentence;
};

int run_wordvec_property(WordvecOpts& o) {
  const WordVectorTable table = parse_word_vectors(o.vectors, o.header);
  const auto sentences = read_tokenized_sentences(o.sentences);
  const SentenceConversion conv_out =
      sentences_to_repr(table, sentences, o.oov == "error" ? OovPolicy::error : OovPolicy::skip);
  const auto corpus = conv_out.bundle.matrices();
  const auto results = property_each(corpus, convention_of(o.c), true, o.c.jobs);
  const BatchSummary s = summarize(results, fs::path(o.vectors).stem().string());
  report::RunReport rep("wordvec-property", o.c.seed,
                        Json{{"vectors", o.vectors},
                             {"header", o.header},
                             {"sentences", o.sentences},
                             {"oov", o.oov},
                             {"convention", o.c.convention}});
  rep.add_summary(s);
  rep.section("vocabulary") = table.words.size();
  rep.section("oov_skipped") = conv_out.oov_skipped;
  if (!o.per_sentence.empty()) report::write_file(o.per_sentence, per_sentence_csv(conv_out.bundle, results));
  print_summaries(std::span(&s, 1));
  std::cerr << "oov tokens skipped: " << conv_out.oov_skipped << "\n";
  emit(rep, o.c, report::summaries_csv(std::span(&s, 1)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Average-versus-first-principal-component toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "JSON config file (flags override it)");
  app.config_formatter(std::make_shared<JsonConfig>(&app));

  PropertyOpts prop;
  auto* sp = app.add_subcommand("property", "Property summary of a representation bundle");
  add_common(sp, prop.c);
  sp->add_option("--bundle", prop.bundle, "Bundle file (.jsonl or .bin)")->required();
  sp->add_flag("--strict", prop.strict, "Fail on degenerate matrices instead of counting them");
  sp->add_option("--per-sentence", prop.per_sentence, "Per-sentence abs_cos CSV");

  LayerOpts sweep;
  auto* sl = app.add_subcommand("layer-sweep", "Property per layer of the toy model or of per-layer bundles");
  add_common(sl, sweep.c);
  add_layer_source(sl, sweep.toy);

  LayerOpts mix;
  auto* sm = app.add_subcommand("mix-layers", "Last layer versus per-token random layers");
  add_common(sm, mix.c);
  add_layer_source(sm, mix.toy);
  sm->add_option("--layer-lo", mix.layer_lo, "Lowest layer (default: layer-hi - 3)");
  sm->add_option("--layer-hi", mix.layer_hi, "Highest layer (default: last)");

  ShuffleOpts shuf;
  auto* ss = app.add_subcommand("shuffle", "Last layer versus representations regrouped across sentences");
  add_common(ss, shuf.layer.c);
  add_layer_source(ss, shuf.layer.toy);
  ss->add_option("--bundle", shuf.bundle, "Last-layer bundle (replaces the toy model)");

  SynthOpts synth;
  auto* st = app.add_subcommand("synth-table4", "Property under the four uniform hyper-priors");
  add_common(st, synth.c);
  add_synth_shape(st, synth.cfg);
  st->add_flag("--fixed-spec", synth.fixed_spec, "Draw one spec per prior instead of one per test");
  st->add_flag("--sensitivity", synth.sensitivity, "Also sweep d and the length range");
  st->add_option("--sensitivity-tests", synth.sensitivity_tests)->capture_default_str();

  FitOpts fit;
  auto* sf = app.add_subcommand("fit-and-synth", "Property of normal matrices with fitted per-dimension parameters");
  add_common(sf, fit.c);
  add_synth_shape(sf, fit.cfg);
  sf->add_option("--bundle", fit.bundle, "Bundle to fit");
  sf->add_option("--spec", fit.spec, "Spec JSON instead of a bundle");
  sf->add_option("--spec-out", fit.spec_out, "Write the fitted spec");

  DiagOpts diag;
  auto* sd = app.add_subcommand("diagnostics", "Per-dimension moments, Q-Q data and off-diagonal spread");
  add_common(sd, diag.c, false);
  sd->add_option("--bundle", diag.bundle)->required();
  sd->add_option("--qq-dim", diag.qq_dim)->capture_default_str();
  sd->add_option("--qq-points", diag.qq_points)->capture_default_str();
  sd->add_option("--qq-fraction", diag.qq_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sd->add_option("--qq-csv", diag.qq_csv, "Q-Q points CSV");
  sd->add_flag("--no-covariance", diag.no_covariance, "Skip the d x d feature covariance");

  TheoryOpts theory;
  auto* sy = app.add_subcommand("theory-check", "Covariance moment formulas and spectrum against sampling");
  add_common(sy, theory.c, false);
  sy->add_option("--spec", theory.spec, "Spec JSON (default: draw from --prior)");
  sy->add_option("--prior", theory.prior, "Hyper-prior row 1..4")->capture_default_str();
  sy->add_option("--d", theory.d)->capture_default_str();
  sy->add_option("--L", theory.L, "Tokens per matrix")->capture_default_str();
  sy->add_option("--n", theory.n, "Sampled matrices")->capture_default_str();
  sy->add_flag("--zero-sum", theory.zero_sum);

  BaselineOpts base;
  base.cfg.zero_sum = false;
  auto* sb = app.add_subcommand("baseline-random", "Property of i.i.d. uniform matrices");
  add_common(sb, base.c, false);
  sb->add_option("--d", base.cfg.d)->capture_default_str();
  sb->add_option("--len-min", base.cfg.length.min)->capture_default_str();
  sb->add_option("--len-max", base.cfg.length.max)->capture_default_str();
  sb->add_option("--n-tests", base.cfg.n_tests)->capture_default_str();
  sb->add_option("--low", base.low)->capture_default_str();
  sb->add_option("--high", base.high)->capture_default_str();
  sb->add_option("--convention", base.conventions, "A, B, C or all")
      ->check(CLI::IsMember({"A", "B", "C", "all"}))
      ->capture_default_str();

  WordvecOpts wv;
  auto* sw = app.add_subcommand("wordvec-property", "Property of static word-vector sentences");
  add_common(sw, wv.c);
  sw->add_option("--vectors", wv.vectors, "Word-vector text file")->required();
  sw->add_flag("--header", wv.header, "First line is 'count dim'");
  sw->add_option("--sentences", wv.sentences, "Tokenized sentences, one per line")->required();
  sw->add_option("--oov", wv.oov)->check(CLI::IsMember({"skip", "error"}))->capture_default_str();
  sw->add_option("--per-sentence", wv.per_sentence, "Per-sentence abs_cos CSV");

  const auto start = std::chrono::steady_clock::now();
  int code = kExitOk;
  std::string command;
  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    command = sub->get_name();
    if (sub == sp) code = run_property(prop);
    else if (sub == sl) code = run_layer_sweep(sweep);
    else if (sub == sm) code = run_mix_layers(mix);
    else if (sub == ss) code = run_shuffle(shuf);
    else if (sub == st) code = run_synth_table4(synth);
    else if (sub == sf) code = run_fit_and_synth(fit);
    else if (sub == sd) code = run_diagnostics(diag);
    else if (sub == sy) code = run_theory_check(theory);
    else if (sub == sb) code = run_baseline_random(base);
    else if (sub == sw) code = run_wordvec_property(wv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const repgeo::Error& e) {
    std::cerr << "repgeo " << command << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "repgeo " << command << ": " << e.what() << "\n";
    return kExitData;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::cerr << "repgeo " << command << ": done in " << elapsed.count() << " s\n";
  return code;
}
