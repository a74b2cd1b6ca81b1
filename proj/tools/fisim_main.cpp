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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fisim/association.hpp"
#include "fisim/bench.hpp"
#include "fisim/config.hpp"
#include "fisim/error.hpp"
#include "fisim/importance.hpp"
#include "fisim/ranksim.hpp"
#include "fisim/table.hpp"
#include "fisim/textutil.hpp"

namespace {

using namespace fisim;

// FISIM_SEED overrides the config's master_seed; an explicit --seed flag
// overrides both. Only plain base-10 digits are accepted.
std::optional<std::uint64_t> seedFromEnvironment() {
  const char* text = std::getenv("FISIM_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  std::string value(text);
  if (value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("FISIM_SEED must be a base-10 unsigned integer, got '" + value + "'");
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigError("FISIM_SEED does not fit in 64 bits: '" + value + "'");
  }
}

std::vector<std::string> splitFormats(const std::string& text) {
  std::vector<std::string> formats;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (!token.empty()) formats.push_back(token);
  }
  return formats;
}

int runCommand(const std::string& config_path, const std::string& out_dir, int jobs,
               const std::optional<std::uint64_t>& cli_seed, const std::string& format_text) {
  ExperimentConfig cfg = loadExperimentConfig(config_path);
  if (cli_seed) {
    cfg.master_seed = *cli_seed;
  } else if (std::optional<std::uint64_t> env_seed = seedFromEnvironment()) {
    cfg.master_seed = *env_seed;
  }

  std::vector<RunResult> results = runExperiment(cfg, jobs);
  std::size_t failed = 0;
  for (const RunResult& result : results) {
    if (result.failed) ++failed;
  }
  std::cout << "completed " << results.size() << " runs (" << failed << " failed)\n";
  if (failed == results.size()) {
    std::cerr << "fisim: every run failed; first error: " << results.front().error << '\n';
    return 1;
  }
  for (const RunResult& result : results) {
    if (result.failed) std::cerr << "  failed " << result.run_id << ": " << result.error << '\n';
  }

  std::vector<SummaryRow> summaries = summarize(results);
  for (const std::string& name : emitReport(summaries, results, out_dir, splitFormats(format_text))) {
    std::cout << "wrote " << (std::filesystem::path(out_dir) / name).string() << '\n';
  }
  return 0;
}

int summarizeCommand(const std::string& runs_path, const std::string& out_dir,
                     const std::string& format_text) {
  std::vector<RunResult> results = loadRunsCsv(runs_path);
  std::size_t failed = 0;
  for (const RunResult& result : results) {
    if (result.failed) ++failed;
  }
  std::cout << "loaded " << results.size() << " runs (" << failed << " failed, excluded from means)\n";

  std::vector<SummaryRow> summaries = summarize(results);
  for (const std::string& name : emitReport(summaries, results, out_dir, splitFormats(format_text))) {
    std::cout << "wrote " << (std::filesystem::path(out_dir) / name).string() << '\n';
  }
  return 0;
}

int generateCommand(const std::string& spec_text, const std::string& out_path,
                    const std::optional<int>& rows, const std::optional<std::uint64_t>& cli_seed) {
  DatasetSpec spec;
  std::uint64_t seed = 0;
  if (std::filesystem::is_regular_file(spec_text)) {
    ExperimentConfig cfg = loadExperimentConfig(spec_text);
    spec = cfg.dataset;
    seed = cfg.master_seed;
  } else {
    spec.kind = DatasetSpec::Kind::Artificial;
    spec.artificial = presetArtificial(spec_text);
    spec.tag = spec_text;
  }
  if (rows) {
    if (spec.kind != DatasetSpec::Kind::Artificial) {
      throw ConfigError("--rows only applies to artificial datasets");
    }
    if (*rows <= 0) throw ConfigError("--rows must be positive");
    spec.artificial.n_rows = *rows;
  }
  if (cli_seed) {
    seed = *cli_seed;
  } else if (std::optional<std::uint64_t> env_seed = seedFromEnvironment()) {
    seed = *env_seed;
  }

  Table table = loadDataset(spec, seed);
  writeCsv(table, out_path);
  writeSchemaSidecar(table, out_path + ".schema");
  std::cout << "wrote " << out_path << " (" << table.rowCount() << " rows, " << table.colCount()
            << " columns)\n";
  std::cout << "wrote " << out_path << ".schema\n";
  return 0;
}

int similarityCommand(const std::string& a_path, const std::string& b_path,
                      const std::string& assoc_path, double p, int k) {
  std::vector<ImportanceRecord> a_records = loadImportanceCsv(a_path);
  std::vector<ImportanceRecord> b_records = loadImportanceCsv(b_path);
  if (a_records.empty()) throw IngestError("no importance records in '" + a_path + "'");
  if (b_records.empty()) throw IngestError("no importance records in '" + b_path + "'");
  const ImportanceVector& a = a_records.front().vector;
  const ImportanceVector& b = b_records.front().vector;

  AssociationMatrix assoc =
      assoc_path.empty() ? identityAssociation(a.feature_names) : loadAssociationCsv(assoc_path);
  RboParams params;
  params.p = p;
  params.k = k;
  SimilarityReport report = similarityReport(a, b, assoc, params);
  std::cout << "rbo = " << formatReal(report.rbo, 12) << '\n';
  std::cout << "rbo_raw = " << formatReal(report.rbo_raw, 12) << '\n';
  std::cout << "rbo_per = " << formatReal(report.rbo_per, 12) << '\n';
  std::cout << "rbo_cor = " << formatReal(report.rbo_cor, 12) << '\n';
  std::cout << "cosine = " << formatReal(report.cosine, 12) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fisim: feature-importance structure preservation in synthetic tabular data"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  std::string runs_path;
  std::string out_arg;
  std::string spec_text;
  std::string a_path;
  std::string b_path;
  std::string assoc_path;
  std::string format_text = "csv,json";
  int jobs = 1;
  double rbo_p = 0.8;
  int rbo_k = 0;
  std::optional<int> rows;
  std::optional<std::uint64_t> cli_seed;

  CLI::App* run_cmd = app.add_subcommand("run", "Execute an experiment sweep from a config file");
  run_cmd->add_option("--config", config_path, "Experiment config (INI)")->required();
  run_cmd->add_option("--out", out_arg, "Report output directory")->required();
  run_cmd->add_option("--jobs", jobs, "Worker threads (results are identical for any value)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", cli_seed, "Master seed override (beats FISIM_SEED and the config)");
  run_cmd->add_option("--format", format_text, "Comma-separated report formats: csv, json");

  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Recompute summary reports from an existing runs.csv");
  summarize_cmd->add_option("--runs", runs_path, "Per-run results CSV")->required();
  summarize_cmd->add_option("--out", out_arg, "Report output directory")->required();
  summarize_cmd->add_option("--format", format_text, "Comma-separated report formats: csv, json");

  CLI::App* generate_cmd =
      app.add_subcommand("generate", "Write a dataset as CSV plus a .schema sidecar");
  generate_cmd
      ->add_option("--spec", spec_text,
                   "Artificial preset name (artificial-1 .. artificial-5) or an experiment config "
                   "whose [dataset] section to use")
      ->required();
  generate_cmd->add_option("--out", out_arg, "Output CSV path")->required();
  generate_cmd->add_option("--rows", rows, "Row-count override (artificial datasets only)");
  generate_cmd->add_option("--seed", cli_seed, "Generator seed (beats FISIM_SEED and the config)");

  CLI::App* similarity_cmd = app.add_subcommand(
      "similarity", "Compare two importance CSVs (first record of each) and print the metrics");
  similarity_cmd->add_option("--a", a_path, "Reference importance CSV")->required();
  similarity_cmd->add_option("--b", b_path, "Comparison importance CSV")->required();
  similarity_cmd->add_option("--assoc", assoc_path,
                             "Feature association matrix CSV (defaults to the identity)");
  similarity_cmd->add_option("--p", rbo_p, "Geometric weight decay in (0,1)");
  similarity_cmd->add_option("--k", rbo_k, "Evaluation depth (0 = full list)");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return runCommand(config_path, out_arg, jobs, cli_seed, format_text);
    if (summarize_cmd->parsed()) return summarizeCommand(runs_path, out_arg, format_text);
    if (generate_cmd->parsed()) return generateCommand(spec_text, out_arg, rows, cli_seed);
    if (similarity_cmd->parsed()) return similarityCommand(a_path, b_path, assoc_path, rbo_p, rbo_k);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "fisim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
