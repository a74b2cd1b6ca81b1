/*
 * Copyright 2026 The fisim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fisim/bench.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fisim/error.hpp"
#include "fisim/featgen.hpp"
#include "fisim/forest.hpp"
#include "fisim/seeding.hpp"
#include "fisim/synth.hpp"
#include "fisim/textutil.hpp"

namespace fisim {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct SweepContext {
  const ExperimentConfig& cfg;
  const Table& real;
  const Table& engineered_real;
  const AssociationMatrix& assoc;
};

struct WorkItem {
  const SynthesizerSpec* spec = nullptr;
  std::optional<double> epsilon;
  int outer = 0;
  int inner = 0;
  std::string run_id;
  std::uint64_t run_seed = 0;
  std::uint64_t fit_seed = 0;  // shared across inner repetitions of one fit
};

Table makeSynthetic(const SweepContext& ctx, const WorkItem& item,
                    std::optional<double>* spent_epsilon) {
  const SynthesizerSpec& spec = *item.spec;
  switch (spec.method) {
    case SynthMethod::PrivBayes: {
      PrivBayesConfig pb = spec.privbayes;
      pb.epsilon = *item.epsilon;
      BayesNet net = fitPrivBayes(ctx.real, pb, item.fit_seed);
      *spent_epsilon = net.spent_epsilon;
      return samplePrivBayes(net, ctx.real.rowCount(),
                             deriveSeed(item.run_seed, hashString("sample")));
    }
    case SynthMethod::ResampleColumns:
      return resampleColumns(ctx.real, item.run_seed);
    case SynthMethod::Subsample:
      return subsample(ctx.real, spec.subsample_fraction, item.run_seed);
  }
  throw InternalError("unhandled synthesizer method");
}

ImportanceVector computeImportance(const Forest& forest, const SplitPair& split,
                                   const ExperimentConfig& cfg, std::uint64_t seed) {
  switch (cfg.importance_measure) {
    case ImportanceMeasure::MDI:
      return mdiImportance(forest);
    case ImportanceMeasure::PFI:
      return pfiImportance(forest, split.validation, cfg.pfi_repeats, seed);
    case ImportanceMeasure::SHAP:
      return shapImportance(forest, split.train, split.validation, cfg.shap_permutations, seed);
  }
  throw InternalError("unhandled importance measure");
}

double holdoutAuc(const Forest& forest, const Table& holdout) {
  Eigen::MatrixXd probs = predictProba(forest, holdout);
  return aucScore(probs, holdout.col(holdout.targetIndex()));
}

RunResult executeRun(const SweepContext& ctx, const WorkItem& item) {
  RunResult result;
  result.run_id = item.run_id;
  result.dataset = ctx.cfg.dataset.tag;
  result.method = methodTag(item.spec->method);
  result.epsilon = item.epsilon;
  result.seed = item.run_seed;
  try {
    Table synthetic = makeSynthetic(ctx, item, &result.spent_epsilon);
    Table engineered_synth =
        ctx.cfg.recipe ? applyRecipe(synthetic, *ctx.cfg.recipe) : std::move(synthetic);

    SplitPair real_split = splitTable(ctx.engineered_real, ctx.cfg.train_frac,
                                      deriveSeed(item.run_seed, hashString("split-real")));
    SplitPair synth_split = splitTable(engineered_synth, ctx.cfg.train_frac,
                                       deriveSeed(item.run_seed, hashString("split-synth")));

    Forest forest_real = trainForest(real_split.train, ctx.cfg.forest,
                                     deriveSeed(item.run_seed, hashString("forest-real")));
    Forest forest_synth = trainForest(synth_split.train, ctx.cfg.forest,
                                      deriveSeed(item.run_seed, hashString("forest-synth")));

    result.importance_original = computeImportance(
        forest_real, real_split, ctx.cfg, deriveSeed(item.run_seed, hashString("importance-real")));
    result.importance_synthetic = computeImportance(
        forest_synth, synth_split, ctx.cfg, deriveSeed(item.run_seed, hashString("importance-synth")));

    // Both models are judged on the real holdout, so the synthetic AUC reads
    // as transferred (train-on-synthetic, test-on-real) performance.
    result.auc_original = holdoutAuc(forest_real, real_split.validation);
    result.auc_synthetic = holdoutAuc(forest_synth, real_split.validation);

    result.similarity = similarityReport(result.importance_original, result.importance_synthetic,
                                         ctx.assoc, ctx.cfg.rbo_params);
    ImportanceVector permuted =
        permuteScores(result.importance_synthetic, deriveSeed(item.run_seed, hashString("permute")));
    result.similarity_permuted =
        similarityReport(result.importance_original, permuted, ctx.assoc, ctx.cfg.rbo_params);
  } catch (const std::exception& e) {
    RunResult failed;
    failed.run_id = result.run_id;
    failed.dataset = result.dataset;
    failed.method = result.method;
    failed.epsilon = result.epsilon;
    failed.spent_epsilon = result.spent_epsilon;  // budget already consumed by the fit
    failed.seed = result.seed;
    failed.failed = true;
    failed.error = e.what();
    return failed;
  }
  return result;
}

struct MetricDef {
  const char* name;
  double (*get)(const RunResult&);
};

constexpr MetricDef kMetrics[] = {
    {"rbo", [](const RunResult& r) { return r.similarity.rbo; }},
    {"rbo_raw", [](const RunResult& r) { return r.similarity.rbo_raw; }},
    {"rbo_per", [](const RunResult& r) { return r.similarity.rbo_per; }},
    {"rbo_cor", [](const RunResult& r) { return r.similarity.rbo_cor; }},
    {"cosine", [](const RunResult& r) { return r.similarity.cosine; }},
    {"rbo_permuted", [](const RunResult& r) { return r.similarity_permuted.rbo; }},
    {"rbo_raw_permuted", [](const RunResult& r) { return r.similarity_permuted.rbo_raw; }},
    {"rbo_per_permuted", [](const RunResult& r) { return r.similarity_permuted.rbo_per; }},
    {"rbo_cor_permuted", [](const RunResult& r) { return r.similarity_permuted.rbo_cor; }},
    {"cosine_permuted", [](const RunResult& r) { return r.similarity_permuted.cosine; }},
    {"auc_original", [](const RunResult& r) { return r.auc_original; }},
    {"auc_synthetic", [](const RunResult& r) { return r.auc_synthetic; }},
};

std::string groupKey(const RunResult& r) {
  std::string key = r.dataset;
  key += '\0';
  key += r.method;
  key += '\0';
  key += r.epsilon ? formatReal(*r.epsilon, 17) : "-";
  return key;
}

// (dataset, method, epsilon) groups in first-appearance order.
std::vector<std::vector<const RunResult*>> groupResults(const std::vector<RunResult>& results) {
  std::vector<std::vector<const RunResult*>> groups;
  std::map<std::string, std::size_t> index;
  for (const RunResult& r : results) {
    std::string key = groupKey(r);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  return groups;
}

// Normalizes text for a single-line CSV cell and quotes it when needed.
std::string csvField(const std::string& s) {
  std::string cell = s;
  std::replace(cell.begin(), cell.end(), '\n', ' ');
  std::replace(cell.begin(), cell.end(), '\r', ' ');
  if (cell.find_first_of(",\"") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

constexpr const char* kRunsHeader =
    "run_id,dataset,method,epsilon,spent_epsilon,seed,failed,error,"
    "rbo,rbo_raw,rbo_per,rbo_cor,cosine,"
    "rbo_permuted,rbo_raw_permuted,rbo_per_permuted,rbo_cor_permuted,cosine_permuted,"
    "auc_original,auc_synthetic";
constexpr int kRunsColumns = 20;

std::string runsCsvText(const std::vector<RunResult>& results) {
  std::string out = std::string(kRunsHeader) + "\n";
  for (const RunResult& r : results) {
    out += csvField(r.run_id);
    out += ',' + csvField(r.dataset);
    out += ',' + r.method;
    out += ',' + (r.epsilon ? formatReal(*r.epsilon, 12) : std::string());
    out += ',' + (r.spent_epsilon ? formatReal(*r.spent_epsilon, 12) : std::string());
    out += ',' + std::to_string(r.seed);
    out += r.failed ? ",1," : ",0,";
    out += csvField(r.error);
    for (const MetricDef& metric : kMetrics) {
      out += ',';
      if (!r.failed) out += formatReal(metric.get(r), 12);
    }
    out += '\n';
  }
  return out;
}

std::string summaryCsvText(const std::vector<SummaryRow>& summaries) {
  std::string out = "dataset,method,epsilon,metric,mean,sd,n\n";
  for (const SummaryRow& row : summaries) {
    out += csvField(row.dataset);
    out += ',' + row.method;
    out += ',' + (row.epsilon ? formatReal(*row.epsilon, 12) : std::string());
    out += ',' + row.metric;
    out += ',' + formatReal(row.mean, 12);
    out += ',' + formatReal(row.sd, 12);
    out += ',' + std::to_string(row.n) + '\n';
  }
  return out;
}

void meanSd(const std::vector<double>& values, double* mean, double* sd) {
  const double n = static_cast<double>(values.size());
  *mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    *sd = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - *mean) * (v - *mean);
  *sd = std::sqrt(ss / (n - 1.0));
}

// Per-feature mean/SD of the original and synthetic importance scores over
// each group's successful runs.
std::string profilesCsvText(const std::vector<RunResult>& results, bool* any_profiles) {
  *any_profiles = false;
  std::string out =
      "dataset,method,epsilon,feature,"
      "importance_original_mean,importance_original_sd,"
      "importance_synthetic_mean,importance_synthetic_sd,n\n";
  for (const auto& group : groupResults(results)) {
    std::vector<const RunResult*> runs;
    for (const RunResult* r : group) {
      if (!r->failed && !r->importance_original.feature_names.empty()) runs.push_back(r);
    }
    if (runs.empty()) continue;
    *any_profiles = true;
    const RunResult& head = *runs.front();
    for (std::size_t f = 0; f < head.importance_original.feature_names.size(); ++f) {
      const std::string& feature = head.importance_original.feature_names[f];
      std::vector<double> original, synthetic;
      for (const RunResult* r : runs) {
        auto scoreOf = [&](const ImportanceVector& iv) {
          for (std::size_t i = 0; i < iv.feature_names.size(); ++i) {
            if (iv.feature_names[i] == feature) return iv.scores(static_cast<Eigen::Index>(i));
          }
          throw InternalError("importance vectors within one group name different features");
        };
        original.push_back(scoreOf(r->importance_original));
        synthetic.push_back(scoreOf(r->importance_synthetic));
      }
      double mean_o = 0.0, sd_o = 0.0, mean_s = 0.0, sd_s = 0.0;
      meanSd(original, &mean_o, &sd_o);
      meanSd(synthetic, &mean_s, &sd_s);
      out += csvField(head.dataset);
      out += ',' + head.method;
      out += ',' + (head.epsilon ? formatReal(*head.epsilon, 12) : std::string());
      out += ',' + csvField(feature);
      out += ',' + formatReal(mean_o, 12);
      out += ',' + formatReal(sd_o, 12);
      out += ',' + formatReal(mean_s, 12);
      out += ',' + formatReal(sd_s, 12);
      out += ',' + std::to_string(runs.size()) + '\n';
    }
  }
  return out;
}

ordered_json similarityJson(const SimilarityReport& s) {
  return ordered_json{{"rbo", s.rbo},
                      {"rbo_raw", s.rbo_raw},
                      {"rbo_per", s.rbo_per},
                      {"rbo_cor", s.rbo_cor},
                      {"cosine", s.cosine}};
}

ordered_json importanceJson(const ImportanceVector& iv) {
  ordered_json scores = ordered_json::object();
  for (std::size_t i = 0; i < iv.feature_names.size(); ++i) {
    scores[iv.feature_names[i]] = iv.scores(static_cast<Eigen::Index>(i));
  }
  return scores;
}

std::string runsJsonText(const std::vector<RunResult>& results) {
  ordered_json runs = ordered_json::array();
  for (const RunResult& r : results) {
    ordered_json entry;
    entry["run_id"] = r.run_id;
    entry["dataset"] = r.dataset;
    entry["method"] = r.method;
    entry["epsilon"] = r.epsilon ? ordered_json(*r.epsilon) : ordered_json(nullptr);
    entry["spent_epsilon"] = r.spent_epsilon ? ordered_json(*r.spent_epsilon) : ordered_json(nullptr);
    entry["seed"] = r.seed;
    entry["failed"] = r.failed;
    entry["error"] = r.error;
    if (!r.failed) {
      entry["similarity"] = similarityJson(r.similarity);
      entry["similarity_permuted"] = similarityJson(r.similarity_permuted);
      entry["auc_original"] = r.auc_original;
      entry["auc_synthetic"] = r.auc_synthetic;
      entry["importance_original"] = importanceJson(r.importance_original);
      entry["importance_synthetic"] = importanceJson(r.importance_synthetic);
    }
    runs.push_back(std::move(entry));
  }
  return runs.dump(2) + "\n";
}

std::string summaryJsonText(const std::vector<SummaryRow>& summaries) {
  ordered_json rows = ordered_json::array();
  for (const SummaryRow& row : summaries) {
    ordered_json entry;
    entry["dataset"] = row.dataset;
    entry["method"] = row.method;
    entry["epsilon"] = row.epsilon ? ordered_json(*row.epsilon) : ordered_json(nullptr);
    entry["metric"] = row.metric;
    entry["mean"] = row.mean;
    entry["sd"] = row.sd;
    entry["n"] = row.n;
    rows.push_back(std::move(entry));
  }
  return rows.dump(2) + "\n";
}

std::string sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw InternalError("SHA-256 digest computation failed");
  }
  static const char* hexdigits = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += hexdigits[digest[i] >> 4];
    hex += hexdigits[digest[i] & 0xf];
  }
  return hex;
}

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out.good()) throw IoError("failed while writing '" + path.string() + "'");
}

// Splits one CSV record, honoring double-quoted cells with doubled quotes.
std::vector<std::string> splitCsvRecord(const std::string& line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted) throw IngestError(where + ": unterminated quoted cell");
  cells.push_back(std::move(cell));
  return cells;
}

double parseCell(const std::string& cell, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(cell, &used);
    if (used != cell.size()) throw IngestError(where + ": malformed number '" + cell + "'");
    return v;
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception&) {
    throw IngestError(where + ": malformed number '" + cell + "'");
  }
}

}  // namespace

SimilarityReport similarityReport(const ImportanceVector& original,
                                  const ImportanceVector& synthetic,
                                  const AssociationMatrix& assoc, RboParams params) {
  SimilarityReport report;
  report.params = params;
  RankedList ranked_original = rankFeatures(original);
  RankedList ranked_synthetic = rankFeatures(synthetic);
  RboParams normalized = params;
  normalized.normalize = true;
  RboParams raw = params;
  raw.normalize = false;
  report.rbo = rbo(ranked_original, ranked_synthetic, normalized);
  report.rbo_raw = rbo(ranked_original, ranked_synthetic, raw);
  report.rbo_per = rboPer(ranked_original, ranked_synthetic, normalized, assoc);
  report.rbo_cor = rboCor(ranked_original, ranked_synthetic, normalized, assoc);
  report.cosine = cosine(original.scores, alignScores(original, synthetic));
  return report;
}

AssociationMatrix identityAssociation(const std::vector<std::string>& features) {
  std::set<std::string> unique(features.begin(), features.end());
  if (unique.size() != features.size()) {
    throw SchemaError("identity association needs unique feature names");
  }
  AssociationMatrix m;
  m.feature_names = features;
  m.values = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(features.size()),
                                       static_cast<Eigen::Index>(features.size()));
  return m;
}

ImportanceVector permuteScores(const ImportanceVector& iv, std::uint64_t seed) {
  if (iv.feature_names.size() != static_cast<std::size_t>(iv.scores.size())) {
    throw SizeError("importance vector names and scores differ in length");
  }
  ImportanceVector out = iv;
  const Eigen::Index n = iv.scores.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(deriveSeed(seed, hashString("permute-scores")));
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index i = 0; i < n; ++i) out.scores(i) = iv.scores(order[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<RunResult> runExperiment(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  if (jobs < 1) throw ConfigError("jobs must be >= 1");

  Table real = loadDataset(cfg.dataset, cfg.master_seed);
  Table engineered_real = cfg.recipe ? applyRecipe(real, *cfg.recipe) : real;
  AssociationMatrix assoc = associationMatrix(engineered_real);
  SweepContext ctx{cfg, real, engineered_real, assoc};

  std::vector<WorkItem> items;
  for (const SynthesizerSpec& spec : cfg.synthesizers) {
    std::vector<std::optional<double>> epsilons;
    if (spec.method == SynthMethod::PrivBayes) {
      for (double eps : cfg.epsilon_grid) epsilons.emplace_back(eps);
    } else {
      epsilons.emplace_back(std::nullopt);
    }
    const std::string method = methodTag(spec.method);
    for (const std::optional<double>& eps : epsilons) {
      const std::uint64_t eps_bits = eps ? doubleBits(*eps) : 0;
      for (int j = 0; j < cfg.repeats_outer; ++j) {
        for (int inner = 0; inner < cfg.repeats_inner; ++inner) {
          WorkItem item;
          item.spec = &spec;
          item.epsilon = eps;
          item.outer = j;
          item.inner = inner;
          item.run_seed = deriveSeed(cfg.master_seed,
                                     {hashString(method), eps_bits,
                                      static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(inner)});
          item.fit_seed = deriveSeed(cfg.master_seed,
                                     {hashString(method), eps_bits,
                                      static_cast<std::uint64_t>(j), hashString("fit")});
          item.run_id = cfg.dataset.tag + "/" + method +
                        (eps ? "/eps=" + formatReal(*eps, 12) : "") + "/j=" + std::to_string(j) +
                        "/l=" + std::to_string(inner);
          items.push_back(std::move(item));
        }
      }
    }
  }

  std::vector<RunResult> results(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= items.size()) break;
      results[i] = executeRun(ctx, items[i]);
    }
  };
  const auto n_threads = std::min(static_cast<std::size_t>(jobs), items.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<RunResult>& results) {
  if (results.empty()) throw SizeError("cannot summarize an empty result set");
  std::vector<SummaryRow> rows;
  for (const auto& group : groupResults(results)) {
    std::vector<const RunResult*> successes;
    for (const RunResult* r : group) {
      if (!r->failed) successes.push_back(r);
    }
    if (successes.empty()) continue;
    for (const MetricDef& metric : kMetrics) {
      std::vector<double> values;
      values.reserve(successes.size());
      for (const RunResult* r : successes) values.push_back(metric.get(*r));
      SummaryRow row;
      row.dataset = group.front()->dataset;
      row.method = group.front()->method;
      row.epsilon = group.front()->epsilon;
      row.metric = metric.name;
      meanSd(values, &row.mean, &row.sd);
      row.n = static_cast<int>(values.size());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<std::string> emitReport(const std::vector<SummaryRow>& summaries,
                                    const std::vector<RunResult>& results,
                                    const std::string& out_dir,
                                    const std::vector<std::string>& formats) {
  if (summaries.empty()) throw SizeError("cannot emit a report without summary rows");
  bool want_csv = false, want_json = false;
  for (const std::string& format : formats) {
    if (format == "csv") {
      want_csv = true;
    } else if (format == "json") {
      want_json = true;
    } else {
      throw ConfigError("unknown report format '" + format + "' (expected csv or json)");
    }
  }
  if (!want_csv && !want_json) {
    throw ConfigError("no report format requested (expected csv and/or json)");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  if (want_csv) {
    files.emplace_back("runs.csv", runsCsvText(results));
    files.emplace_back("summary.csv", summaryCsvText(summaries));
    bool any_profiles = false;
    std::string profiles = profilesCsvText(results, &any_profiles);
    if (any_profiles) files.emplace_back("importance_profiles.csv", std::move(profiles));
  }
  if (want_json) {
    files.emplace_back("runs.json", runsJsonText(results));
    files.emplace_back("summary.json", summaryJsonText(summaries));
  }

  std::vector<std::string> written;
  for (const auto& [name, content] : files) {
    writeFile(fs::path(out_dir) / name, content);
    written.push_back(name);
  }

  std::vector<std::pair<std::string, const std::string*>> listed;
  for (const auto& [name, content] : files) listed.emplace_back(name, &content);
  std::sort(listed.begin(), listed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ordered_json manifest;
  manifest["files"] = ordered_json::array();
  for (const auto& [name, content] : listed) {
    manifest["files"].push_back(ordered_json{
        {"name", name}, {"bytes", content->size()}, {"sha256", sha256Hex(*content)}});
  }
  writeFile(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  written.push_back("manifest.json");
  return written;
}

std::vector<RunResult> loadRunsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) {
    throw IngestError("'" + path + "' does not start with the runs.csv header");
  }
  std::vector<RunResult> results;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> cells = splitCsvRecord(line, where);
    if (cells.size() != kRunsColumns) {
      throw IngestError(where + ": expected " + std::to_string(kRunsColumns) + " cells, got " +
                        std::to_string(cells.size()));
    }
    RunResult r;
    r.run_id = cells[0];
    r.dataset = cells[1];
    r.method = cells[2];
    if (!cells[3].empty()) r.epsilon = parseCell(cells[3], where);
    if (!cells[4].empty()) r.spent_epsilon = parseCell(cells[4], where);
    try {
      r.seed = std::stoull(cells[5]);
    } catch (const std::exception&) {
      throw IngestError(where + ": malformed seed '" + cells[5] + "'");
    }
    if (cells[6] == "1") {
      r.failed = true;
    } else if (cells[6] != "0") {
      throw IngestError(where + ": failed flag must be 0 or 1, got '" + cells[6] + "'");
    }
    r.error = cells[7];
    if (!r.failed) {
      double* slots[] = {&r.similarity.rbo,           &r.similarity.rbo_raw,
                         &r.similarity.rbo_per,       &r.similarity.rbo_cor,
                         &r.similarity.cosine,        &r.similarity_permuted.rbo,
                         &r.similarity_permuted.rbo_raw, &r.similarity_permuted.rbo_per,
                         &r.similarity_permuted.rbo_cor, &r.similarity_permuted.cosine,
                         &r.auc_original,             &r.auc_synthetic};
      for (std::size_t m = 0; m < 12; ++m) *slots[m] = parseCell(cells[8 + m], where);
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256Hex(buffer.str());
}

}  // namespace fisim
