// Copyright 2026 The dramorigin Authors
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

#include "dramorigin/cli.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dramorigin/dumpio.h"
#include "dramorigin/error.h"
#include "dramorigin/features.h"
#include "dramorigin/lda.h"
#include "dramorigin/protocol.h"
#include "dramorigin/simgen.h"
#include "dramorigin/svdd.h"

namespace dramorigin {
namespace {

namespace fs = std::filesystem;

// Effective parameters of one command, echoed to the log before it runs.
class ParamLog {
 public:
  explicit ParamLog(std::string command) : command_(std::move(command)) {}

  template <typename T>
  ParamLog& add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    items_.emplace_back(key, s.str());
    return *this;
  }
  ParamLog& add(const std::string& key, double value) {
    items_.emplace_back(key, format_double(value));
    return *this;
  }
  ParamLog& add(const std::string& key, const std::vector<double>& values) {
    std::string s;
    for (double v : values) s += (s.empty() ? "" : ",") + format_double(v);
    items_.emplace_back(key, s);
    return *this;
  }
  ParamLog& add(const std::string& key, const std::vector<std::string>& values) {
    std::string s;
    for (const auto& v : values) s += (s.empty() ? "" : ",") + v;
    items_.emplace_back(key, s);
    return *this;
  }

  void write(std::ostream& err) const {
    err << "# dramorigin " << kVersion << ' ' << command_ << '\n';
    err << "# features " << feature_fingerprint() << '\n';
    for (const auto& [k, v] : items_) err << "#   " << k << " = " << v << '\n';
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> items_;
};

struct SimulateArgs {
  std::string profile_set;
  std::size_t modules = 3;
  std::size_t rows = 2048;
  std::uint64_t seed = 1;
  std::string out;
};

struct ExtractArgs {
  std::vector<std::string> dumps;
  std::string manifest;
  std::string out;
};

struct TrainArgs {
  std::string features;
  std::vector<std::string> dumps;
  std::string module_id;
  std::optional<std::int32_t> class_tag;
  double C = 0.0;
  double gamma = 0.0;
  std::vector<double> grid_c = default_c_grid();
  std::vector<double> grid_gamma = default_gamma_grid();
  std::size_t folds = 5;
  std::size_t outlier_factor = 10;
  std::uint64_t seed = 1;
  std::string out;
};

struct VerifyArgs {
  std::string dump;
  std::string model;
  double lambda = 0.0;
  std::string pages = "256";
  std::uint64_t seed = 0;
  std::string out;
};

struct ProjectArgs {
  std::string features;
  std::string manifest;
  std::vector<std::string> dumps;
  std::size_t components = 0;
  std::string out;
};

struct ReportArgs {
  std::string report;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// Dumps listed in a manifest, resolved against its directory.
std::vector<std::pair<fs::path, CorpusEntry>> manifest_dumps(const fs::path& manifest) {
  std::vector<std::pair<fs::path, CorpusEntry>> out;
  for (auto& e : read_manifest(manifest)) out.emplace_back(manifest.parent_path() / e.file, e);
  return out;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const std::vector<ClassProfile> profiles =
      a.profile_set.empty() ? default_profiles() : load_profiles(a.profile_set);
  ParamLog(std::string("simulate"))
      .add("profile_set", a.profile_set.empty() ? std::string("builtin") : a.profile_set)
      .add("classes", profiles.size())
      .add("modules", a.modules)
      .add("rows", a.rows)
      .add("seed", a.seed)
      .add("out", a.out)
      .write(err);
  const auto entries = generate_corpus(profiles, a.modules, a.rows, a.seed, a.out);
  save_profiles(profiles, fs::path(a.out) / "profiles.json");
  out << "wrote " << entries.size() << " dumps to " << a.out << '\n';
  return kExitOk;
}

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> paths(a.dumps.begin(), a.dumps.end());
  if (!a.manifest.empty()) {
    for (auto& [p, e] : manifest_dumps(a.manifest)) paths.push_back(p);
  }
  if (paths.empty()) throw DomainError("extract: give --dump or --manifest");
  ParamLog("extract")
      .add("dumps", std::vector<std::string>(a.dumps.begin(), a.dumps.end()))
      .add("manifest", a.manifest)
      .add("out", a.out)
      .write(err);
  std::vector<FeatureRow> rows;
  for (const auto& p : paths) {
    const Dump d = read_dump(p);
    auto r = extract_feature_rows(d.pages);
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  export_features(rows, a.out);
  out << "wrote " << rows.size() << " feature rows to " << a.out << '\n';
  return kExitOk;
}

// Training features plus the class tag they belong to.
std::pair<std::vector<FeatureVector>, std::int32_t> training_set(const TrainArgs& a) {
  std::vector<FeatureVector> features;
  std::optional<std::int32_t> tag = a.class_tag;
  if (!a.features.empty()) {
    for (const auto& r : import_features(a.features)) {
      if (a.module_id.empty() || r.module_id == a.module_id) features.push_back(r.features);
    }
  }
  for (const auto& p : a.dumps) {
    const Dump d = read_dump(p);
    if (!a.module_id.empty() && d.record.module_id != a.module_id) continue;
    if (tag && *tag != d.record.class_tag && !a.class_tag) {
      throw DomainError("training dumps carry different class tags");
    }
    if (!tag) tag = d.record.class_tag;
    for (const auto& r : extract_feature_rows(d.pages)) features.push_back(r.features);
  }
  if (a.features.empty() && a.dumps.empty()) throw DomainError("give --features or --dump");
  if (features.empty()) throw DomainError("no training pages selected");
  if (!tag) throw DomainError("--class-tag is required with --features");
  return {std::move(features), *tag};
}

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  ParamLog("train")
      .add("features", a.features)
      .add("dumps", a.dumps)
      .add("module_id", a.module_id)
      .add("C", a.C)
      .add("gamma", a.gamma)
      .add("out", a.out)
      .write(err);
  auto [features, tag] = training_set(a);
  const SvddModel model = train_feature_model(features, a.C, a.gamma, tag);
  save_model(model, a.out);
  out << "class " << tag << ": " << model.support_vectors.size() << " support vectors from "
      << features.size() << " pages, R2 = " << format_double(model.r2) << '\n';
  return kExitOk;
}

int cmd_tune(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  ParamLog("tune")
      .add("features", a.features)
      .add("dumps", a.dumps)
      .add("module_id", a.module_id)
      .add("grid_c", a.grid_c)
      .add("grid_gamma", a.grid_gamma)
      .add("folds", a.folds)
      .add("outlier_factor", a.outlier_factor)
      .add("seed", a.seed)
      .add("out", a.out)
      .write(err);
  auto [features, tag] = training_set(a);
  std::vector<Point> raw;
  raw.reserve(features.size());
  for (const auto& f : features) raw.push_back(f.to_point());
  const Scaler scaler = Scaler::fit(raw);
  std::vector<Point> scaled;
  scaled.reserve(raw.size());
  for (const auto& p : raw) scaled.push_back(scaler.apply(p));
  TuneOptions opts;
  opts.outlier_factor = a.outlier_factor;
  const TuneResult t = tune(scaled, a.grid_c, a.grid_gamma, a.folds, a.seed, opts);
  for (const auto& s : t.skipped()) {
    err << "# skipped C = " << format_double(s.C) << " (below 1/l for a fold)\n";
  }
  const SvddModel model = train_feature_model(features, t.C, t.gamma, tag);
  save_model(model, a.out, t);
  out << "class " << tag << ": C = " << format_double(t.C)
      << ", gamma = " << format_double(t.gamma) << ", cv score = " << format_double(t.score)
      << ", " << model.support_vectors.size() << " support vectors\n";
  return kExitOk;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const Dump dump = read_dump(a.dump);
  const SvddModel model = load_model(a.model);
  VerificationPolicy policy;
  policy.lambda_ppr = a.lambda;
  policy.seed = a.seed;
  if (a.pages == "all") {
    policy.n_test_pages = collect_page_groups(dump.pages).size();
  } else {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(a.pages.data(), a.pages.data() + a.pages.size(), n);
    if (ec != std::errc() || ptr != a.pages.data() + a.pages.size()) {
      throw DomainError("--pages takes a count or 'all'");
    }
    policy.n_test_pages = n;
  }
  ParamLog("verify")
      .add("dump", a.dump)
      .add("model", a.model)
      .add("lambda", a.lambda)
      .add("pages", policy.n_test_pages)
      .add("seed", a.seed)
      .add("out", a.out)
      .write(err);
  const VerificationReport report = verify_module(dump, model, policy);
  if (!a.out.empty()) write_text(a.out, report_to_json(report));
  out << summarize(report);
  return report.verdict == Verdict::kAuthentic ? kExitOk : kExitCounterfeit;
}

int cmd_project(const ProjectArgs& a, std::ostream& out, std::ostream& err) {
  ParamLog("project")
      .add("features", a.features)
      .add("manifest", a.manifest)
      .add("dumps", a.dumps)
      .add("components", a.components)
      .add("out", a.out)
      .write(err);
  std::vector<Point> points;
  std::vector<std::int32_t> labels;
  if (!a.features.empty()) {
    if (a.manifest.empty()) throw DomainError("--features needs --manifest for class tags");
    std::map<std::string, std::int32_t> tag_of;
    for (const auto& e : read_manifest(a.manifest)) tag_of[e.module_id] = e.class_tag;
    for (const auto& r : import_features(a.features)) {
      const auto it = tag_of.find(r.module_id);
      if (it == tag_of.end()) throw DomainError("module " + r.module_id + " not in manifest");
      points.push_back(r.features.to_point());
      labels.push_back(it->second);
    }
  }
  std::vector<fs::path> dumps(a.dumps.begin(), a.dumps.end());
  if (a.features.empty() && !a.manifest.empty()) {
    for (auto& [p, e] : manifest_dumps(a.manifest)) dumps.push_back(p);
  }
  for (const auto& p : dumps) {
    const Dump d = read_dump(p);
    for (const auto& r : extract_feature_rows(d.pages)) {
      points.push_back(r.features.to_point());
      labels.push_back(d.record.class_tag);
    }
  }
  if (points.empty()) throw DomainError("project: no feature rows");

  // z-score first so the ridge term treats every feature alike
  const Scaler scaler = Scaler::fit(points);
  for (auto& p : points) p = scaler.apply(p);
  const std::size_t classes = std::set<std::int32_t>(labels.begin(), labels.end()).size();
  const std::size_t m =
      a.components ? a.components : std::min<std::size_t>({5, kFeatureCount, classes - 1});
  const LdaProjection proj = fit_lda(points, labels, m);
  const std::vector<Point> projected = project(proj, points);

  std::ofstream csv(a.out, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError("cannot open " + a.out + " for writing");
  csv << "class_tag";
  for (std::size_t k = 1; k <= m; ++k) csv << ",component" << k;
  csv << '\n';
  for (std::size_t i = 0; i < projected.size(); ++i) {
    csv << labels[i];
    for (double v : projected[i]) csv << ',' << format_double(v);
    csv << '\n';
  }
  if (!csv) throw IoError("write failed for " + a.out);
  out << "projected " << points.size() << " pages onto " << m << " components (separability";
  for (double s : proj.separability) out << ' ' << format_double(s);
  out << ")\n";
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  ParamLog("report").add("report", a.report).write(err);
  out << summarize(report_from_json(read_text(a.report)));
  return kExitOk;
}

void add_training_inputs(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--features", a.features, "feature CSV of training pages");
  cmd->add_option("--dump", a.dumps, "dump file(s) of training modules");
  cmd->add_option("--module-id", a.module_id, "train only on rows of this module");
  cmd->add_option("--class-tag", a.class_tag, "class tag (defaults to the dump header)");
  cmd->add_option("--out", a.out, "model file")->required();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"DRAM module origin verification from reduced-latency read errors", "dramorigin"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with option values");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dump corpus");
  simulate->add_option("--profile-set", sim.profile_set, "class profile file (default: builtin)");
  simulate->add_option("--modules", sim.modules, "modules per class")->capture_default_str();
  simulate->add_option("--rows", sim.rows, "sampled rows per module")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "master seed")->capture_default_str();
  simulate->add_option("--out", sim.out, "corpus directory")->required();

  ExtractArgs ext;
  auto* extract = app.add_subcommand("extract", "extract page-group features to CSV");
  extract->add_option("--dump", ext.dumps, "dump file(s)");
  extract->add_option("--manifest", ext.manifest, "corpus manifest listing dumps");
  extract->add_option("--out", ext.out, "feature CSV")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train a class model with fixed C and gamma");
  add_training_inputs(train, tr);
  train->add_option("--c", tr.C, "box constraint C")->required();
  train->add_option("--gamma", tr.gamma, "RBF kernel parameter")->required();

  TrainArgs tu;
  auto* tunecmd = app.add_subcommand("tune", "grid-search C and gamma, then train");
  add_training_inputs(tunecmd, tu);
  tunecmd->add_option("--grid-c", tu.grid_c, "C values")->delimiter(',')->capture_default_str();
  tunecmd->add_option("--grid-gamma", tu.grid_gamma, "gamma values")
      ->delimiter(',')
      ->capture_default_str();
  tunecmd->add_option("--folds", tu.folds, "cross-validation folds")->capture_default_str();
  tunecmd->add_option("--outlier-factor", tu.outlier_factor, "artificial outliers per page")
      ->capture_default_str();
  tunecmd->add_option("--seed", tu.seed, "fold and outlier seed")->capture_default_str();

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "verify a module against a class model");
  verify->add_option("--dump", ver.dump, "module dump")->required();
  verify->add_option("--model", ver.model, "class model file")->required();
  verify->add_option("--lambda", ver.lambda, "PPR threshold in percent")->required();
  verify->add_option("--pages", ver.pages, "page groups to test, or 'all'")
      ->capture_default_str();
  verify->add_option("--seed", ver.seed, "page sampling seed")->capture_default_str();
  verify->add_option("--out", ver.out, "write the JSON report here");

  ProjectArgs pr;
  auto* projectcmd = app.add_subcommand("project", "LDA projection of labelled features");
  projectcmd->add_option("--features", pr.features, "feature CSV");
  projectcmd->add_option("--manifest", pr.manifest, "manifest with class tags");
  projectcmd->add_option("--dump", pr.dumps, "dump file(s), tagged by their headers");
  projectcmd->add_option("--components", pr.components, "components (default min(5, classes-1))");
  projectcmd->add_option("--out", pr.out, "projection CSV")->required();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "summarize a verification report");
  report->add_option("--report", rep.report, "JSON report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*extract) return cmd_extract(ext, out, err);
    if (*train) return cmd_train(tr, out, err);
    if (*tunecmd) return cmd_tune(tu, out, err);
    if (*verify) return cmd_verify(ver, out, err);
    if (*projectcmd) return cmd_project(pr, out, err);
    if (*report) return cmd_report(rep, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace dramorigin
