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

#include "fisim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fisim/error.hpp"
#include "fisim/seeding.hpp"
#include "fisim/textutil.hpp"

namespace fisim {

namespace {

struct DiscreteView {
  Eigen::MatrixXi codes;                   // row x column level indices
  std::vector<int> levels;                 // per column
  std::vector<std::vector<double>> edges;  // continuous columns only
  std::vector<double> mins;
};

DiscreteView discretizeAll(const Table& table, int n_bins) {
  const auto d = static_cast<std::size_t>(table.colCount());
  DiscreteView view;
  view.codes.resize(table.rowCount(), table.colCount());
  view.levels.resize(d);
  view.edges.resize(d);
  view.mins.resize(d, 0.0);
  for (Eigen::Index j = 0; j < table.colCount(); ++j) {
    const ColumnSchema& column = table.column(j);
    if (column.kind == ColumnKind::Categorical) {
      view.levels[static_cast<std::size_t>(j)] = column.levels;
      for (Eigen::Index i = 0; i < table.rowCount(); ++i) {
        view.codes(i, j) = static_cast<int>(table.values()(i, j));
      }
    } else {
      Eigen::VectorXd col = table.col(j);
      std::vector<double> values(col.data(), col.data() + col.size());
      std::vector<double> edges = quantileEdges(values, n_bins);
      view.levels[static_cast<std::size_t>(j)] = static_cast<int>(edges.size());
      view.mins[static_cast<std::size_t>(j)] = col.minCoeff();
      for (Eigen::Index i = 0; i < table.rowCount(); ++i) {
        view.codes(i, j) = binValue(edges, col(i));
      }
      view.edges[static_cast<std::size_t>(j)] = std::move(edges);
    }
  }
  return view;
}

// Contingency counts of column x against the flattened parent configuration
// (mixed radix over parent_cols, first parent most significant). The single
// counting pathway behind both MI scoring and CPT estimation.
Eigen::MatrixXd jointCounts(const DiscreteView& view, Eigen::Index x,
                            const std::vector<Eigen::Index>& parent_cols) {
  Eigen::Index rows = 1;
  for (Eigen::Index p : parent_cols) rows *= view.levels[static_cast<std::size_t>(p)];
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(rows, view.levels[static_cast<std::size_t>(x)]);
  for (Eigen::Index i = 0; i < view.codes.rows(); ++i) {
    Eigen::Index config = 0;
    for (Eigen::Index p : parent_cols) {
      config = config * view.levels[static_cast<std::size_t>(p)] + view.codes(i, p);
    }
    counts(config, view.codes(i, x)) += 1.0;
  }
  return counts;
}

// Plug-in mutual information (nats) between the row and column margins of a
// contingency table.
double mutualInformation(const Eigen::MatrixXd& counts) {
  const double n = counts.sum();
  if (n <= 0.0) return 0.0;
  Eigen::VectorXd row = counts.rowwise().sum();
  Eigen::VectorXd col = counts.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    for (Eigen::Index c = 0; c < counts.cols(); ++c) {
      double v = counts(r, c);
      if (v > 0.0) mi += (v / n) * std::log(v * n / (row(r) * col(c)));
    }
  }
  return std::max(mi, 0.0);
}

// Sensitivity of plug-in MI under add/remove-one-row adjacency.
double miSensitivity(double n) {
  return std::log(n) / n + ((n - 1.0) / n) * std::log(n / (n - 1.0));
}

// Difference of two exponentials; avoids the log(0) edge of the inverse-CDF
// form.
double laplaceDraw(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double a = -std::log(1.0 - unif(rng));
  double b = -std::log(1.0 - unif(rng));
  return scale * (a - b);
}

struct Candidate {
  Eigen::Index column;
  std::vector<int> parents;  // positions in the current ordering
  double mi;
};

// All ascending index combinations of {0..pool-1} with size <= max_size.
template <typename Fn>
void forEachCombination(int pool, int max_size, Fn&& fn) {
  std::vector<int> comb;
  fn(comb);
  for (int size = 1; size <= std::min(max_size, pool); ++size) {
    comb.resize(static_cast<std::size_t>(size));
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      fn(comb);
      int i = size - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == pool - size + i) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < size; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

int sampleDiscrete(const Eigen::VectorXd& weights, double u) {
  double total = weights.sum();
  double cut = u * total;
  double cum = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    cum += weights(i);
    if (cut < cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace

void PrivBayesConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("privbayes epsilon must be > 0");
  if (k_parents < 0) throw ConfigError("privbayes k_parents must be >= 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("privbayes beta must lie in (0,1)");
  if (n_bins < 2) throw ConfigError("privbayes n_bins must be >= 2");
  if (theta < 0.0) throw ConfigError("privbayes theta must be >= 0");
}

double structureBudget(const PrivBayesConfig& cfg) { return cfg.beta * cfg.epsilon; }

double parameterBudget(const PrivBayesConfig& cfg) { return (1.0 - cfg.beta) * cfg.epsilon; }

void BayesNet::check() const {
  if (schema.empty()) throw InternalError("bayes net without columns");
  if (nodes.size() != schema.size()) throw InternalError("bayes net node count differs from schema");
  std::vector<char> covered(schema.size(), 0);
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    const BayesNode& node = nodes[p];
    if (node.column < 0 || node.column >= static_cast<Eigen::Index>(schema.size())) {
      throw InternalError("bayes net column index out of range");
    }
    if (covered[static_cast<std::size_t>(node.column)]++) throw InternalError("bayes net covers a column twice");
    if (node.levels < 1) throw InternalError("bayes net node without levels");
    const ColumnSchema& column = schema[static_cast<std::size_t>(node.column)];
    if (column.kind == ColumnKind::Categorical && node.levels != column.levels) {
      throw InternalError("bayes net levels differ from the schema");
    }
    if (column.kind == ColumnKind::Continuous) {
      if (static_cast<int>(node.bin_edges.size()) != node.levels) {
        throw InternalError("bayes net edge count differs from levels");
      }
      if (!std::is_sorted(node.bin_edges.begin(), node.bin_edges.end())) {
        throw InternalError("bayes net edges out of order");
      }
      if (!node.bin_edges.empty() && node.min_value > node.bin_edges.front()) {
        throw InternalError("bayes net minimum above the first edge");
      }
    }
    Eigen::Index expected_rows = 1;
    for (int parent : node.parents) {
      if (parent < 0 || static_cast<std::size_t>(parent) >= p) {
        throw InternalError("bayes net parent does not precede its child");
      }
      expected_rows *= nodes[static_cast<std::size_t>(parent)].levels;
    }
    if (node.cpt.rows() != expected_rows || node.cpt.cols() != node.levels) {
      throw InternalError("bayes net CPT shape mismatch");
    }
    for (Eigen::Index r = 0; r < node.cpt.rows(); ++r) {
      if (node.cpt.row(r).minCoeff() < 0.0 || !node.cpt.row(r).allFinite()) {
        throw InternalError("bayes net CPT entries must be non-negative and finite");
      }
      if (std::abs(node.cpt.row(r).sum() - 1.0) > 1e-9) {
        throw InternalError("bayes net CPT row does not sum to 1");
      }
    }
  }
}

BayesNet fitPrivBayes(const Table& table, const PrivBayesConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (table.rowCount() < 10) throw SizeError("privbayes needs at least 10 rows");
  const auto d = table.colCount();
  const double n = static_cast<double>(table.rowCount());
  DiscreteView view = discretizeAll(table, cfg.n_bins);

  std::mt19937_64 rng(deriveSeed(seed, hashString("privbayes")));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  BayesNet net;
  net.schema = table.schema();
  net.spent_epsilon = cfg.epsilon;

  // Usefulness cap on candidate contingency sizes: cells whose expected
  // count-to-noise ratio would fall below theta are not worth a parent slot.
  const double cell_cap = cfg.theta > 0.0
                              ? n * parameterBudget(cfg) / (2.0 * static_cast<double>(d) * cfg.theta)
                              : std::numeric_limits<double>::infinity();

  std::vector<Eigen::Index> order;
  std::vector<std::vector<int>> parent_positions;
  std::vector<char> used(static_cast<std::size_t>(d), 0);
  Eigen::Index root = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d));
  order.push_back(root);
  parent_positions.emplace_back();
  used[static_cast<std::size_t>(root)] = 1;

  const double eps_sel = d > 1 ? structureBudget(cfg) / static_cast<double>(d - 1) : 0.0;
  const double delta = miSensitivity(n);
  for (Eigen::Index step = 1; step < d; ++step) {
    std::vector<Candidate> candidates;
    for (Eigen::Index col = 0; col < d; ++col) {
      if (used[static_cast<std::size_t>(col)]) continue;
      forEachCombination(static_cast<int>(order.size()), cfg.k_parents, [&](const std::vector<int>& comb) {
        std::vector<Eigen::Index> parent_cols;
        double cells = static_cast<double>(view.levels[static_cast<std::size_t>(col)]);
        for (int position : comb) {
          Eigen::Index parent_col = order[static_cast<std::size_t>(position)];
          parent_cols.push_back(parent_col);
          cells *= static_cast<double>(view.levels[static_cast<std::size_t>(parent_col)]);
        }
        if (!comb.empty() && cells > cell_cap) return;  // the empty set always stays eligible
        candidates.push_back({col, comb, mutualInformation(jointCounts(view, col, parent_cols))});
      });
    }
    double best = 0.0;
    for (const Candidate& candidate : candidates) best = std::max(best, candidate.mi);
    Eigen::VectorXd weights(static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      weights(static_cast<Eigen::Index>(i)) = std::exp(eps_sel * (candidates[i].mi - best) / (2.0 * delta));
    }
    const Candidate& picked = candidates[static_cast<std::size_t>(sampleDiscrete(weights, unif(rng)))];
    order.push_back(picked.column);
    parent_positions.push_back(picked.parents);
    used[static_cast<std::size_t>(picked.column)] = 1;
  }

  const double noise_scale = 2.0 * static_cast<double>(d) / parameterBudget(cfg);
  for (std::size_t p = 0; p < order.size(); ++p) {
    BayesNode node;
    node.column = order[p];
    node.levels = view.levels[static_cast<std::size_t>(node.column)];
    node.parents = parent_positions[p];
    node.bin_edges = view.edges[static_cast<std::size_t>(node.column)];
    node.min_value = view.mins[static_cast<std::size_t>(node.column)];

    std::vector<Eigen::Index> parent_cols;
    for (int position : node.parents) parent_cols.push_back(order[static_cast<std::size_t>(position)]);
    Eigen::MatrixXd counts = jointCounts(view, node.column, parent_cols);
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
      for (Eigen::Index c = 0; c < counts.cols(); ++c) {
        counts(r, c) = std::max(0.0, counts(r, c) + laplaceDraw(rng, noise_scale));
      }
      double mass = counts.row(r).sum();
      if (mass > 0.0) {
        counts.row(r) /= mass;
      } else {
        counts.row(r).setConstant(1.0 / static_cast<double>(counts.cols()));
      }
    }
    node.cpt = std::move(counts);
    net.nodes.push_back(std::move(node));
  }
  net.check();
  return net;
}

Table samplePrivBayes(const BayesNet& net, Eigen::Index n_rows, std::uint64_t seed) {
  net.check();
  if (n_rows < 0) throw SizeError("cannot sample a negative number of rows");
  std::mt19937_64 rng(deriveSeed(seed, hashString("privbayes-sample")));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd values(n_rows, static_cast<Eigen::Index>(net.schema.size()));
  std::vector<int> sampled(net.nodes.size(), 0);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    for (std::size_t p = 0; p < net.nodes.size(); ++p) {
      const BayesNode& node = net.nodes[p];
      Eigen::Index config = 0;
      for (int parent : node.parents) {
        config = config * net.nodes[static_cast<std::size_t>(parent)].levels + sampled[static_cast<std::size_t>(parent)];
      }
      int level = sampleDiscrete(node.cpt.row(config).transpose(), unif(rng));
      sampled[p] = level;
      const ColumnSchema& column = net.schema[static_cast<std::size_t>(node.column)];
      if (column.kind == ColumnKind::Continuous) {
        double lo = level == 0 ? node.min_value : node.bin_edges[static_cast<std::size_t>(level - 1)];
        double hi = node.bin_edges[static_cast<std::size_t>(level)];
        values(i, node.column) = lo + unif(rng) * (hi - lo);
      } else {
        values(i, node.column) = static_cast<double>(level);
      }
    }
  }
  return Table(net.schema, std::move(values));
}

void writeBayesNet(const BayesNet& net, const std::string& path) {
  net.check();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "fisim-bayesnet 1\n";
  out << "spent_epsilon " << formatReal(net.spent_epsilon, 17) << '\n';
  out << "columns " << net.schema.size() << '\n';
  for (const ColumnSchema& column : net.schema) {
    out << "column " << (column.kind == ColumnKind::Categorical ? "categorical" : "continuous") << ' '
        << column.levels << ' ' << (column.is_target ? 1 : 0) << ' ' << column.name << '\n';
    if (!column.labels.empty()) {
      out << "labels";
      for (std::size_t i = 0; i < column.labels.size(); ++i) {
        out << (i == 0 ? " " : ",") << column.labels[i];
      }
      out << '\n';
    }
  }
  out << "nodes " << net.nodes.size() << '\n';
  for (const BayesNode& node : net.nodes) {
    out << "node " << node.column << ' ' << node.levels << '\n';
    if (!node.bin_edges.empty()) {
      out << "min " << formatReal(node.min_value, 17) << '\n';
      out << "edges";
      for (double edge : node.bin_edges) out << ' ' << formatReal(edge, 17);
      out << '\n';
    }
    out << "parents";
    for (int parent : node.parents) out << ' ' << parent;
    out << '\n';
    out << "cpt " << node.cpt.rows() << ' ' << node.cpt.cols() << '\n';
    for (Eigen::Index r = 0; r < node.cpt.rows(); ++r) {
      for (Eigen::Index c = 0; c < node.cpt.cols(); ++c) {
        out << (c == 0 ? "" : " ") << formatReal(node.cpt(r, c), 17);
      }
      out << '\n';
    }
  }
  if (!out.good()) throw IoError("failed while writing '" + path + "'");
}

namespace {

std::string nextLine(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError("unexpected end of '" + path + "'");
  return line;
}

std::vector<std::string> splitWs(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> tokens;
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

}  // namespace

BayesNet loadBayesNet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  if (nextLine(in, path) != "fisim-bayesnet 1") throw IngestError("'" + path + "' is not a bayes net file");

  BayesNet net;
  std::istringstream header(nextLine(in, path));
  std::string key;
  if (!(header >> key >> net.spent_epsilon) || key != "spent_epsilon") {
    throw IngestError("'" + path + "': expected spent_epsilon");
  }
  std::size_t n_columns = 0;
  {
    std::istringstream line(nextLine(in, path));
    if (!(line >> key >> n_columns) || key != "columns") throw IngestError("'" + path + "': expected columns");
  }
  std::string pending;
  for (std::size_t j = 0; j < n_columns; ++j) {
    std::istringstream line(nextLine(in, path));
    std::string kind;
    int levels = 0, target = 0;
    if (!(line >> key >> kind >> levels >> target) || key != "column") {
      throw IngestError("'" + path + "': malformed column line");
    }
    ColumnSchema column;
    column.kind = kind == "categorical" ? ColumnKind::Categorical : ColumnKind::Continuous;
    column.levels = levels;
    column.is_target = target == 1;
    std::getline(line, column.name);
    if (!column.name.empty() && column.name.front() == ' ') column.name.erase(0, 1);
    net.schema.push_back(std::move(column));

    auto mark = in.tellg();
    std::string maybe = nextLine(in, path);
    if (maybe.rfind("labels ", 0) == 0) {
      std::string joined = maybe.substr(7);
      std::vector<std::string> labels;
      std::size_t start = 0;
      while (true) {
        std::size_t comma = joined.find(',', start);
        labels.push_back(joined.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      net.schema.back().labels = std::move(labels);
    } else {
      in.seekg(mark);
    }
  }
  std::size_t n_nodes = 0;
  {
    std::istringstream line(nextLine(in, path));
    if (!(line >> key >> n_nodes) || key != "nodes") throw IngestError("'" + path + "': expected nodes");
  }
  for (std::size_t p = 0; p < n_nodes; ++p) {
    BayesNode node;
    {
      std::istringstream line(nextLine(in, path));
      if (!(line >> key >> node.column >> node.levels) || key != "node") {
        throw IngestError("'" + path + "': malformed node line");
      }
    }
    auto mark = in.tellg();
    std::string maybe = nextLine(in, path);
    if (maybe.rfind("min ", 0) == 0) {
      node.min_value = std::stod(maybe.substr(4));
      std::vector<std::string> tokens = splitWs(nextLine(in, path));
      if (tokens.empty() || tokens[0] != "edges") throw IngestError("'" + path + "': expected edges");
      for (std::size_t t = 1; t < tokens.size(); ++t) node.bin_edges.push_back(std::stod(tokens[t]));
    } else {
      in.seekg(mark);
    }
    std::vector<std::string> parents = splitWs(nextLine(in, path));
    if (parents.empty() || parents[0] != "parents") throw IngestError("'" + path + "': expected parents");
    for (std::size_t t = 1; t < parents.size(); ++t) node.parents.push_back(std::stoi(parents[t]));
    Eigen::Index rows = 0, cols = 0;
    {
      std::istringstream line(nextLine(in, path));
      if (!(line >> key >> rows >> cols) || key != "cpt") throw IngestError("'" + path + "': expected cpt");
    }
    node.cpt.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::istringstream line(nextLine(in, path));
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(line >> node.cpt(r, c))) throw IngestError("'" + path + "': short CPT row");
      }
    }
    net.nodes.push_back(std::move(node));
  }
  net.check();
  return net;
}

Table resampleColumns(const Table& table, std::uint64_t seed) {
  const Eigen::Index n = table.rowCount();
  if (n < 1) throw SizeError("cannot resample an empty table");
  std::mt19937_64 rng(deriveSeed(seed, hashString("resample")));
  Eigen::MatrixXd values(n, table.colCount());
  for (Eigen::Index j = 0; j < table.colCount(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      values(i, j) = table.values()(static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n)), j);
    }
  }
  return Table(table.schema(), std::move(values), table.metadata());
}

Table subsample(const Table& table, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("subsample fraction must lie in (0,1]");
  const Eigen::Index n = table.rowCount();
  const auto count = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  if (count < 1) throw SizeError("subsample would keep no rows");
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(n));
  std::iota(indices.begin(), indices.end(), 0);
  std::mt19937_64 rng(deriveSeed(seed, hashString("subsample-rows")));
  for (Eigen::Index j = 0; j < count; ++j) {
    auto swap_with = j + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n - j));
    std::swap(indices[static_cast<std::size_t>(j)], indices[static_cast<std::size_t>(swap_with)]);
  }
  indices.resize(static_cast<std::size_t>(count));
  std::sort(indices.begin(), indices.end());
  return selectRows(table, indices);
}

std::string methodTag(SynthMethod method) {
  switch (method) {
    case SynthMethod::PrivBayes:
      return "privbayes";
    case SynthMethod::ResampleColumns:
      return "resample_columns";
    case SynthMethod::Subsample:
      return "subsample";
  }
  throw InternalError("unhandled synthesizer method");
}

SynthMethod parseMethodTag(std::string_view tag) {
  if (tag == "privbayes") return SynthMethod::PrivBayes;
  if (tag == "resample_columns") return SynthMethod::ResampleColumns;
  if (tag == "subsample") return SynthMethod::Subsample;
  throw ConfigError("unknown synthesizer '" + std::string(tag) +
                    "' (expected privbayes, resample_columns or subsample)");
}

Table synthesize(const Table& real, const SynthesizerSpec& spec, double epsilon,
                 std::uint64_t seed) {
  switch (spec.method) {
    case SynthMethod::PrivBayes: {
      PrivBayesConfig cfg = spec.privbayes;
      cfg.epsilon = epsilon;
      BayesNet net = fitPrivBayes(real, cfg, deriveSeed(seed, hashString("fit")));
      return samplePrivBayes(net, real.rowCount(), deriveSeed(seed, hashString("sample")));
    }
    case SynthMethod::ResampleColumns:
      return resampleColumns(real, seed);
    case SynthMethod::Subsample:
      return subsample(real, spec.subsample_fraction, seed);
  }
  throw InternalError("unhandled synthesizer method");
}

}  // namespace fisim
