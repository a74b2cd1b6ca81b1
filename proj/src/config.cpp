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

#include "fisim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"

namespace fisim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;  // e.g. "dataset" or "synthesizer"
  std::string arg;   // e.g. "privbayes" for "[synthesizer privbayes]"
  int line = 0;
  std::vector<IniEntry> entries;
};

std::vector<IniSection> parseIni(std::istream& in, const std::string& origin) {
  std::vector<IniSection> sections;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      }
      std::string header = trim(line.substr(1, line.size() - 2));
      IniSection section;
      section.line = line_no;
      std::size_t space = header.find(' ');
      section.name = header.substr(0, space);
      if (space != std::string::npos) section.arg = trim(header.substr(space + 1));
      if (section.name.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section header");
      }
      sections.push_back(std::move(section));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value' or a [section] header, got '" + line + "'");
    }
    if (sections.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": entry before any [section] header");
    }
    IniEntry entry;
    entry.key = trim(line.substr(0, eq));
    entry.value = trim(line.substr(eq + 1));
    entry.line = line_no;
    if (entry.key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": entry without a key");
    }
    for (const IniEntry& prev : sections.back().entries) {
      if (prev.key == entry.key) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": key '" + entry.key +
                          "' repeated in the same section");
      }
    }
    sections.back().entries.push_back(std::move(entry));
  }
  return sections;
}

[[noreturn]] void unknownKey(const std::string& origin, const IniEntry& entry,
                             const std::string& section, const std::vector<std::string>& valid) {
  std::string names;
  for (const std::string& v : valid) names += (names.empty() ? "" : ", ") + v;
  throw ConfigError(origin + ":" + std::to_string(entry.line) + ": unknown key '" + entry.key +
                    "' in [" + section + "] (valid keys: " + names + ")");
}

class EntryReader {
 public:
  EntryReader(const std::string& origin, const IniEntry& entry) : origin_(origin), entry_(entry) {}

  [[noreturn]] void fail(const std::string& expected) const {
    throw ConfigError(origin_ + ":" + std::to_string(entry_.line) + ": key '" + entry_.key +
                      "' expects " + expected + ", got '" + entry_.value + "'");
  }

  double real() const {
    try {
      std::size_t used = 0;
      double v = std::stod(entry_.value, &used);
      if (used != entry_.value.size()) fail("a real number");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("a real number");
    }
  }

  long long integer() const {
    try {
      std::size_t used = 0;
      long long v = std::stoll(entry_.value, &used);
      if (used != entry_.value.size()) fail("an integer");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("an integer");
    }
  }

  std::uint64_t unsignedInteger() const {
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(entry_.value, &used);
      if (used != entry_.value.size() || entry_.value.front() == '-') fail("a non-negative integer");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("a non-negative integer");
    }
  }

  bool boolean() const {
    std::string v = lower(entry_.value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail("true or false");
  }

  // Whitespace- or comma-separated tokens.
  std::vector<std::string> tokens() const {
    std::string joined = entry_.value;
    std::replace(joined.begin(), joined.end(), ',', ' ');
    std::istringstream stream(joined);
    std::vector<std::string> out;
    std::string token;
    while (stream >> token) out.push_back(token);
    return out;
  }

  const std::string& text() const { return entry_.value; }

 private:
  const std::string& origin_;
  const IniEntry& entry_;
};

void readDataset(const std::string& origin, const IniSection& section, DatasetSpec* dataset) {
  static const std::vector<std::string> valid = {
      "kind",        "tag",       "name",      "path",     "n_rows",  "n_informative",
      "n_redundant", "n_noise",   "categorical", "n_levels", "class_sep", "n_classes",
      "profile"};
  bool preset_applied = false;
  // A preset name must be applied before its overrides, so resolve it first.
  for (const IniEntry& entry : section.entries) {
    if (entry.key == "name") {
      dataset->artificial = presetArtificial(entry.value);
      if (dataset->tag.empty()) dataset->tag = entry.value;
      preset_applied = true;
    }
  }
  for (const IniEntry& entry : section.entries) {
    EntryReader reader(origin, entry);
    if (entry.key == "kind") {
      std::string v = lower(entry.value);
      if (v == "artificial") {
        dataset->kind = DatasetSpec::Kind::Artificial;
      } else if (v == "csv") {
        dataset->kind = DatasetSpec::Kind::Csv;
      } else {
        reader.fail("artificial or csv");
      }
    } else if (entry.key == "tag") {
      dataset->tag = entry.value;
    } else if (entry.key == "name") {
      // handled above
    } else if (entry.key == "path") {
      dataset->csv_path = entry.value;
    } else if (entry.key == "n_rows") {
      dataset->artificial.n_rows = static_cast<int>(reader.integer());
    } else if (entry.key == "n_informative") {
      dataset->artificial.n_informative = static_cast<int>(reader.integer());
    } else if (entry.key == "n_redundant") {
      dataset->artificial.n_redundant = static_cast<int>(reader.integer());
    } else if (entry.key == "n_noise") {
      dataset->artificial.n_noise = static_cast<int>(reader.integer());
    } else if (entry.key == "categorical") {
      dataset->artificial.categorical = reader.boolean();
    } else if (entry.key == "n_levels") {
      dataset->artificial.n_levels = static_cast<int>(reader.integer());
    } else if (entry.key == "class_sep") {
      dataset->artificial.class_sep = reader.real();
    } else if (entry.key == "n_classes") {
      dataset->artificial.n_classes = static_cast<int>(reader.integer());
    } else if (entry.key == "profile") {
      std::string v = lower(entry.value);
      if (v == "uniform") {
        dataset->artificial.profile = ImportanceProfile::Uniform;
      } else if (v == "distinct") {
        dataset->artificial.profile = ImportanceProfile::Distinct;
      } else {
        reader.fail("uniform or distinct");
      }
    } else {
      unknownKey(origin, entry, "dataset", valid);
    }
  }
  if (dataset->kind == DatasetSpec::Kind::Csv) {
    if (dataset->csv_path.empty()) {
      throw ConfigError(origin + ": [dataset] kind = csv requires a path key");
    }
    if (preset_applied) {
      throw ConfigError(origin + ": [dataset] name presets apply to artificial datasets only");
    }
    if (dataset->tag.empty()) {
      std::string stem = dataset->csv_path;
      std::size_t slash = stem.find_last_of('/');
      if (slash != std::string::npos) stem = stem.substr(slash + 1);
      std::size_t dot = stem.find_last_of('.');
      if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
      dataset->tag = stem;
    }
  } else {
    if (!dataset->csv_path.empty()) {
      throw ConfigError(origin + ": [dataset] path applies to csv datasets only");
    }
    if (dataset->tag.empty()) dataset->tag = "artificial";
  }
}

void readExperiment(const std::string& origin, const IniSection& section, ExperimentConfig* cfg) {
  static const std::vector<std::string> valid = {
      "epsilon_grid", "repeats_outer", "repeats_inner",     "train_frac", "importance_measure",
      "master_seed",  "shap_permutations", "pfi_repeats"};
  for (const IniEntry& entry : section.entries) {
    EntryReader reader(origin, entry);
    if (entry.key == "epsilon_grid") {
      cfg->epsilon_grid.clear();
      for (const std::string& token : reader.tokens()) {
        try {
          std::size_t used = 0;
          double v = std::stod(token, &used);
          if (used != token.size()) reader.fail("a list of real numbers");
          cfg->epsilon_grid.push_back(v);
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception&) {
          reader.fail("a list of real numbers");
        }
      }
    } else if (entry.key == "repeats_outer") {
      cfg->repeats_outer = static_cast<int>(reader.integer());
    } else if (entry.key == "repeats_inner") {
      cfg->repeats_inner = static_cast<int>(reader.integer());
    } else if (entry.key == "train_frac") {
      cfg->train_frac = reader.real();
    } else if (entry.key == "importance_measure") {
      cfg->importance_measure = parseMeasure(entry.value);
    } else if (entry.key == "master_seed") {
      cfg->master_seed = reader.unsignedInteger();
    } else if (entry.key == "shap_permutations") {
      cfg->shap_permutations = static_cast<int>(reader.integer());
    } else if (entry.key == "pfi_repeats") {
      cfg->pfi_repeats = static_cast<int>(reader.integer());
    } else {
      unknownKey(origin, entry, "experiment", valid);
    }
  }
}

void readForest(const std::string& origin, const IniSection& section, ForestConfig* forest) {
  static const std::vector<std::string> valid = {"n_trees", "max_depth", "min_leaf", "feature_rule"};
  for (const IniEntry& entry : section.entries) {
    EntryReader reader(origin, entry);
    if (entry.key == "n_trees") {
      forest->n_trees = static_cast<int>(reader.integer());
    } else if (entry.key == "max_depth") {
      forest->max_depth = static_cast<int>(reader.integer());
    } else if (entry.key == "min_leaf") {
      forest->min_leaf = static_cast<int>(reader.integer());
    } else if (entry.key == "feature_rule") {
      std::string v = lower(entry.value);
      if (v == "sqrt") {
        forest->features_per_split = ForestConfig::FeatureRule::Sqrt;
      } else if (v == "all") {
        forest->features_per_split = ForestConfig::FeatureRule::All;
      } else {
        reader.fail("sqrt or all");
      }
    } else {
      unknownKey(origin, entry, "forest", valid);
    }
  }
}

void readRbo(const std::string& origin, const IniSection& section, RboParams* rbo) {
  static const std::vector<std::string> valid = {"p", "k"};
  for (const IniEntry& entry : section.entries) {
    EntryReader reader(origin, entry);
    if (entry.key == "p") {
      rbo->p = reader.real();
    } else if (entry.key == "k") {
      rbo->k = static_cast<int>(reader.integer());
    } else {
      unknownKey(origin, entry, "rbo", valid);
    }
  }
}

void readSynthesizer(const std::string& origin, const IniSection& section, ExperimentConfig* cfg) {
  if (section.arg.empty()) {
    throw ConfigError(origin + ":" + std::to_string(section.line) +
                      ": [synthesizer] needs a method, e.g. [synthesizer privbayes]");
  }
  SynthesizerSpec spec;
  spec.method = parseMethodTag(section.arg);
  if (spec.method == SynthMethod::PrivBayes) {
    static const std::vector<std::string> valid = {"k_parents", "beta", "n_bins", "theta"};
    for (const IniEntry& entry : section.entries) {
      EntryReader reader(origin, entry);
      if (entry.key == "k_parents") {
        spec.privbayes.k_parents = static_cast<int>(reader.integer());
      } else if (entry.key == "beta") {
        spec.privbayes.beta = reader.real();
      } else if (entry.key == "n_bins") {
        spec.privbayes.n_bins = static_cast<int>(reader.integer());
      } else if (entry.key == "theta") {
        spec.privbayes.theta = reader.real();
      } else {
        unknownKey(origin, entry, "synthesizer privbayes", valid);
      }
    }
  } else if (spec.method == SynthMethod::Subsample) {
    static const std::vector<std::string> valid = {"fraction"};
    for (const IniEntry& entry : section.entries) {
      EntryReader reader(origin, entry);
      if (entry.key == "fraction") {
        spec.subsample_fraction = reader.real();
      } else {
        unknownKey(origin, entry, "synthesizer subsample", valid);
      }
    }
  } else if (!section.entries.empty()) {
    throw ConfigError(origin + ":" + std::to_string(section.entries.front().line) +
                      ": [synthesizer " + section.arg + "] takes no keys");
  }
  for (const SynthesizerSpec& existing : cfg->synthesizers) {
    if (existing.method == spec.method) {
      throw ConfigError(origin + ":" + std::to_string(section.line) + ": synthesizer '" +
                        section.arg + "' listed twice");
    }
  }
  cfg->synthesizers.push_back(spec);
}

void readRecipe(const std::string& origin, const IniSection& section, ExperimentConfig* cfg) {
  static const std::vector<std::string> valid = {"transforms", "aggregation_key", "aggregations"};
  FeatureRecipe recipe;
  std::string key;
  std::vector<AggregatePrimitive> primitives;
  for (const IniEntry& entry : section.entries) {
    EntryReader reader(origin, entry);
    if (entry.key == "transforms") {
      for (const std::string& token : reader.tokens()) {
        recipe.transform_primitives.push_back(parseTransform(token));
      }
    } else if (entry.key == "aggregation_key") {
      key = entry.value;
    } else if (entry.key == "aggregations") {
      for (const std::string& token : reader.tokens()) {
        primitives.push_back(parseAggregate(token));
      }
    } else {
      unknownKey(origin, entry, "recipe", valid);
    }
  }
  if (!key.empty() || !primitives.empty()) {
    recipe.aggregation = Aggregation{key, primitives};
  }
  recipe.validate();
  cfg->recipe = std::move(recipe);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.tag.empty()) throw ConfigError("dataset tag must not be empty");
  if (dataset.kind == DatasetSpec::Kind::Artificial) {
    dataset.artificial.validate();
  } else if (dataset.csv_path.empty()) {
    throw ConfigError("csv dataset requires a path");
  }
  if (synthesizers.empty()) throw ConfigError("experiment needs at least one [synthesizer] section");
  bool any_privbayes = std::any_of(synthesizers.begin(), synthesizers.end(), [](const SynthesizerSpec& s) {
    return s.method == SynthMethod::PrivBayes;
  });
  if (any_privbayes && epsilon_grid.empty()) {
    throw ConfigError("epsilon_grid must be nonempty when privbayes is enabled");
  }
  for (double eps : epsilon_grid) {
    if (!(eps > 0.0)) throw ConfigError("epsilon_grid entries must be > 0");
  }
  for (const SynthesizerSpec& spec : synthesizers) {
    if (spec.method == SynthMethod::PrivBayes) {
      PrivBayesConfig probe = spec.privbayes;
      probe.epsilon = 1.0;  // per-run epsilon comes from the grid
      probe.validate();
    }
    if (spec.method == SynthMethod::Subsample &&
        !(spec.subsample_fraction > 0.0 && spec.subsample_fraction <= 1.0)) {
      throw ConfigError("subsample fraction must lie in (0,1]");
    }
  }
  if (repeats_outer < 1) throw ConfigError("repeats_outer must be >= 1");
  if (repeats_inner < 1) throw ConfigError("repeats_inner must be >= 1");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie in (0,1)");
  if (forest.n_trees < 1) throw ConfigError("forest n_trees must be >= 1");
  if (forest.max_depth < 0) throw ConfigError("forest max_depth must be >= 0");
  if (forest.min_leaf < 1) throw ConfigError("forest min_leaf must be >= 1");
  if (!(rbo_params.p > 0.0 && rbo_params.p < 1.0)) throw ConfigError("rbo p must lie in (0,1)");
  if (rbo_params.k < 0) throw ConfigError("rbo k must be >= 0");
  if (shap_permutations < 1) throw ConfigError("shap_permutations must be >= 1");
  if (pfi_repeats < 1) throw ConfigError("pfi_repeats must be >= 1");
  if (recipe) recipe->validate();
}

ExperimentConfig parseExperimentConfig(std::istream& in, const std::string& origin) {
  static const std::vector<std::string> valid_sections = {"dataset", "experiment", "forest",
                                                          "rbo", "synthesizer <method>", "recipe"};
  std::vector<IniSection> sections = parseIni(in, origin);
  ExperimentConfig cfg;
  std::set<std::string> seen;
  bool dataset_seen = false;
  for (const IniSection& section : sections) {
    std::string dedupe_key = section.name + (section.arg.empty() ? "" : " " + section.arg);
    if (!seen.insert(dedupe_key).second) {
      throw ConfigError(origin + ":" + std::to_string(section.line) + ": section [" + dedupe_key +
                        "] appears twice");
    }
    if (section.name == "dataset") {
      readDataset(origin, section, &cfg.dataset);
      dataset_seen = true;
    } else if (section.name == "experiment") {
      readExperiment(origin, section, &cfg);
    } else if (section.name == "forest") {
      readForest(origin, section, &cfg.forest);
    } else if (section.name == "rbo") {
      readRbo(origin, section, &cfg.rbo_params);
    } else if (section.name == "synthesizer") {
      readSynthesizer(origin, section, &cfg);
    } else if (section.name == "recipe") {
      readRecipe(origin, section, &cfg);
    } else {
      std::string names;
      for (const std::string& v : valid_sections) names += (names.empty() ? "" : ", ") + v;
      throw ConfigError(origin + ":" + std::to_string(section.line) + ": unknown section [" +
                        section.name + "] (valid sections: " + names + ")");
    }
  }
  if (!dataset_seen) throw ConfigError(origin + ": missing [dataset] section");
  cfg.validate();
  return cfg;
}

ExperimentConfig loadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return parseExperimentConfig(in, path);
}

Table loadDataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.kind == DatasetSpec::Kind::Artificial) {
    return generateArtificial(spec.artificial, deriveSeed(seed, hashString("dataset")));
  }
  std::vector<ColumnSchema> schema = loadSchemaSidecar(spec.csv_path + ".schema");
  return loadCsv(spec.csv_path, schema);
}

}  // namespace fisim
