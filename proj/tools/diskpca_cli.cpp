// Copyright 2026 The diskpca Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: loads or generates data, splits it over a
// simulated cluster and runs one experiment per invocation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "diskpca/config.hpp"
#include "diskpca/errors.hpp"
#include "diskpca/eval.hpp"
#include "diskpca/random.hpp"

namespace {

using diskpca::Config;
using diskpca::Index;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct Options {
  Config config;
  std::string method = "diskpca";
  bool no_timing = false;
  bool with_opt = false;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw diskpca::DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw diskpca::DataError("cannot write '" + path + "'");
  out << text;
}

struct Setup {
  diskpca::LoadedData loaded;
  diskpca::KernelSpec spec;
  diskpca::DisKpcaParams params;
  std::unique_ptr<diskpca::Cluster> cluster;
};

Setup setup(const Config& c) {
  diskpca::validate(c);
  Setup s;
  s.loaded = diskpca::load_data(c);
  s.spec = diskpca::make_kernel(c, s.loaded.data);
  s.params = diskpca::make_params(c);
  s.cluster = std::make_unique<diskpca::Cluster>(s.loaded.data,
                                                 diskpca::make_partition(c, s.loaded.data.cols()));
  s.cluster->set_parallel(c.parallel);
  return s;
}

std::optional<double> optimal_error(const Options& o, const Setup& s) {
  if (!o.with_opt) return std::nullopt;
  return diskpca::batch_kpca(s.spec, s.loaded.data, o.config.k).opt_error;
}

int cmd_single(const Options& o, diskpca::Method method) {
  const Config& c = o.config;
  Setup s = setup(c);
  const auto rec = diskpca::run_method(*s.cluster, s.loaded.data, s.spec, method, c.k, c.eps,
                                       s.params, c.n_adapt, c.seed, optimal_error(o, s));
  Output out(c.output);
  out.stream() << rec.to_json(!o.no_timing) << '\n';
  write_text(c.ledger, s.cluster->ledger().to_jsonl());
  return kExitOk;
}

int cmd_curves(const Options& o, const std::vector<diskpca::Method>& methods) {
  const Config& c = o.config;
  Setup s = setup(c);
  const auto opt = optimal_error(o, s);
  std::vector<diskpca::CurvePoint> all;
  Output out(c.output);
  for (auto method : methods) {
    auto curve = diskpca::error_curve(*s.cluster, s.spec, method, c.k, c.eps, s.params, c.sweep,
                                      c.repeats, c.seed, opt);
    for (const auto& pt : curve) {
      for (const auto& rec : pt.runs) out.stream() << rec.to_json(!o.no_timing) << '\n';
    }
    all.insert(all.end(), curve.begin(), curve.end());
  }
  write_text(c.csv, diskpca::curves_to_csv(all));
  write_text(c.ledger, s.cluster->ledger().to_jsonl());
  return kExitOk;
}

double purity(const std::vector<int>& assignments, const std::vector<int>& labels) {
  std::map<std::pair<int, int>, Index> counts;
  for (std::size_t j = 0; j < labels.size(); ++j) ++counts[{assignments[j], labels[j]}];
  std::map<int, Index> best;
  for (const auto& [key, n] : counts) best[key.first] = std::max(best[key.first], n);
  Index total = 0;
  for (const auto& [cl, n] : best) total += n;
  return static_cast<double>(total) / static_cast<double>(labels.size());
}

int cmd_cluster(const Options& o) {
  const Config& c = o.config;
  Setup s = setup(c);
  const auto features = diskpca::parse_method(o.method);
  const auto res = diskpca::spectral_cluster(*s.cluster, s.spec, c.k, c.eps, s.params,
                                             c.kmeans_iters, c.seed, features);
  nlohmann::ordered_json j;
  j["method"] = diskpca::method_name(features);
  j["k"] = c.k;
  j["seed"] = c.seed;
  j["objective"] = res.objective;
  j["projected_objective"] = res.projected_objective;
  j["history"] = res.history;
  j["total_words"] = res.ledger.total_words();
  if (!s.loaded.labels.empty()) j["purity"] = purity(res.assignments, s.loaded.labels);
  j["assignments"] = res.assignments;
  Output out(c.output);
  out.stream() << j.dump() << '\n';
  write_text(c.ledger, s.cluster->ledger().to_jsonl());
  return kExitOk;
}

int cmd_gen(const Options& o) {
  const Config& c = o.config;
  diskpca::validate(c);
  if (c.output.empty()) throw diskpca::ArgumentError("gen needs --output");
  Config synth = c;
  synth.data.clear();
  const auto loaded = diskpca::load_data(synth);
  const auto format = c.format.empty() ? diskpca::format_from_path(c.output) : diskpca::parse_format(c.format);
  diskpca::write_dataset(c.output, loaded.data, format);
  if (!loaded.labels.empty() && !c.csv.empty()) {
    std::ostringstream labels;
    for (int l : loaded.labels) labels << l << '\n';
    write_text(c.csv, labels.str());
  }
  return kExitOk;
}

int cmd_leverage_debug(const Options& o) {
  const Config& c = o.config;
  Setup s = setup(c);
  const auto res = diskpca::dis_kpca(*s.cluster, s.spec, c.k, c.eps, s.params, c.seed);
  Output out(c.output);
  for (int w = 0; w < s.cluster->size(); ++w) {
    const auto& idx = s.cluster->worker_indices(w);
    const auto& scores = res.scores.per_worker[static_cast<std::size_t>(w)];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      nlohmann::ordered_json line;
      line["index"] = idx[j];
      line["worker"] = w;
      line["score"] = scores(static_cast<Index>(j));
      out.stream() << line.dump() << '\n';
    }
  }
  nlohmann::ordered_json summary;
  summary["global_sum"] = res.scores.global_sum;
  summary["rank"] = res.scores.rank;
  summary["notes"] = res.scores.notes;
  std::cerr << summary.dump() << '\n';
  write_text(c.ledger, s.cluster->ledger().to_jsonl());
  return kExitOk;
}

void add_options(CLI::App& app, Options& o) {
  Config& c = o.config;
  app.set_config("--config", "", "TOML file with option values");
  app.add_option("--kernel", c.kernel, "gaussian | polynomial | arccos")->capture_default_str();
  app.add_option("--degree", c.degree, "polynomial or arc-cos degree")->capture_default_str();
  app.add_option("--bandwidth", c.bandwidth, "Gaussian bandwidth (0: median trick)")->capture_default_str();
  app.add_option("--bandwidth-factor", c.bandwidth_factor, "median-trick factor")->capture_default_str();
  app.add_option("-k,--k", c.k, "target rank")->capture_default_str();
  app.add_option("--eps", c.eps, "accuracy parameter")->capture_default_str();
  app.add_option("-t,--t", c.t, "embedding dimension (0: default)")->capture_default_str();
  app.add_option("-p,--p", c.p, "leverage sketch width")->capture_default_str();
  app.add_option("-w,--w", c.w, "low-rank sketch width: equal | eps | count")->capture_default_str();
  app.add_option("-m,--m", c.m, "random features")->capture_default_str();
  app.add_option("--n-lev", c.n_lev, "leverage samples (0: default)")->capture_default_str();
  app.add_option("--n-adapt", c.n_adapt, "adaptive samples")->capture_default_str();
  app.add_option("-s,--s", c.s, "workers")->capture_default_str();
  app.add_option("--partition-exponent", c.partition_exponent, "power-law exponent of worker sizes")
      ->capture_default_str();
  app.add_option("--seed", c.seed, "root seed")->capture_default_str();
  app.add_option("--data", c.data, "dataset path (empty: synthetic)");
  app.add_option("--format", c.format, "sparse | dense-csv (default: from extension)");
  app.add_option("--synthetic", c.synthetic, "low-rank-plus-noise | clustered")->capture_default_str();
  app.add_option("-n,--n", c.n, "synthetic points")->capture_default_str();
  app.add_option("-d,--d", c.d, "synthetic dimension")->capture_default_str();
  app.add_option("--k-true", c.k_true, "synthetic rank or blob count")->capture_default_str();
  app.add_option("--noise", c.noise, "synthetic noise level")->capture_default_str();
  app.add_option("--separation", c.separation, "blob separation")->capture_default_str();
  app.add_option("--imbalance", c.imbalance, "blob size exponent")->capture_default_str();
  app.add_option("-o,--output", c.output, "output path (default: stdout)");
  app.add_option("--ledger", c.ledger, "communication ledger output (JSON lines)");
  app.add_option("--csv", c.csv, "curve CSV output");
  app.add_option("--repeats", c.repeats, "runs per sweep point")->capture_default_str();
  app.add_option("--sweep", c.sweep, "n_adapt values")->capture_default_str()->delimiter(',');
  app.add_option("--kmeans-iters", c.kmeans_iters, "Lloyd iterations")->capture_default_str();
  app.add_flag("--parallel", c.parallel, "run workers on threads");
  app.add_option("--method", o.method, "diskpca | uniform+dislr | uniform+batch")->capture_default_str();
  app.add_flag("--no-timing", o.no_timing, "omit wall_time from records");
  app.add_flag("--with-opt", o.with_opt, "compute the batch optimum for every record");
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  if (!args.empty() && args.back() == "run") args.pop_back();

  CLI::App app{"Distributed kernel PCA on a simulated master-worker network"};
  app.name("diskpca");
  Options o;
  add_options(app, o);
  app.require_subcommand(1);
  auto* kpca = app.add_subcommand("kpca", "disKPCA, one record");
  auto* base_lr = app.add_subcommand("baseline-dislr", "uniform sample + distributed low-rank fit");
  auto* base_batch = app.add_subcommand("baseline-batch", "uniform sample + batch KPCA at the master");
  auto* sweep = app.add_subcommand("sweep", "error curve of --method over --sweep");
  auto* compare = app.add_subcommand("compare", "error curves of all three methods");
  auto* cluster = app.add_subcommand("cluster", "KPCA features + Lloyd k-means");
  auto* gen = app.add_subcommand("gen", "write a synthetic dataset to --output");
  auto* lev = app.add_subcommand("leverage-debug", "per-column distributed leverage scores");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (kpca->parsed()) return cmd_single(o, diskpca::Method::kDisKpca);
  if (base_lr->parsed()) return cmd_single(o, diskpca::Method::kUniformDisLR);
  if (base_batch->parsed()) return cmd_single(o, diskpca::Method::kUniformBatch);
  if (sweep->parsed()) return cmd_curves(o, {diskpca::parse_method(o.method)});
  if (compare->parsed()) {
    return cmd_curves(o, {diskpca::Method::kDisKpca, diskpca::Method::kUniformDisLR,
                          diskpca::Method::kUniformBatch});
  }
  if (cluster->parsed()) return cmd_cluster(o);
  if (gen->parsed()) return cmd_gen(o);
  if (lev->parsed()) return cmd_leverage_debug(o);
  return kExitUsage;
}

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const diskpca::CommError& e) {
    return e.cause() ? exit_code_for(e.cause()) : kExitNumerical;
  } catch (const diskpca::DataError&) {
    return kExitData;
  } catch (const diskpca::ArgumentError&) {
    return kExitUsage;
  } catch (const diskpca::Error&) {
    return kExitNumerical;
  } catch (...) {
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "diskpca: " << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }
}
