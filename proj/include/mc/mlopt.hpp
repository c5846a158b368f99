#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "mc/common.hpp"
#include "mc/fsutil.hpp"
#include "mc/profiler.hpp"
#include "mc/strutil.hpp"

namespace mc {

// ---- features -----------------------------------------------------------------

struct FeatureVector {
  std::string loop_id;
  std::vector<double> values;
  uint64_t schema_hash = 0;
};

inline uint64_t schema_fingerprint(const std::vector<std::string>& schema) {
  return fnv1a64(join(schema, ","));
}

// Counter values per kilo-instructions. The instruction count normalizes and
// is never itself a feature.
inline FeatureVector normalize_pki(const CounterSet& raw,
                                   const std::vector<std::string>& schema) {
  if (!(raw.instructions > 0))
    throw ZeroInstructions("loop '" + raw.loop_id +
                           "': retired-instruction count must be positive");
  FeatureVector fv;
  fv.loop_id = raw.loop_id;
  fv.schema_hash = schema_fingerprint(schema);
  fv.values.reserve(schema.size());
  for (const auto& event : schema) {
    auto it = raw.counters.find(event);
    if (it == raw.counters.end()) {
      Diag::global().warn("loop '" + raw.loop_id + "': event '" + event +
                 "' missing from counters, using 0");
      fv.values.push_back(0.0);
    } else {
      fv.values.push_back(it->second * 1000.0 / raw.instructions);
    }
  }
  return fv;
}

// ---- training instances ---------------------------------------------------------

struct TrainingInstance {
  FeatureVector features;
  std::map<std::string, uint64_t> per_backend_ns;
  std::string label;
};

inline std::set<std::string> serial_targets() {
  return {"clang", "gcc", "icc", "polly"};
}
inline std::set<std::string> parallel_targets() { return {"icc", "polly"}; }

// Lowest time wins; ties go to the lexicographically first name (map order).
inline std::string argmin_backend(const std::map<std::string, uint64_t>& times,
                                  const std::set<std::string>* allowed = nullptr) {
  std::string best;
  uint64_t best_ns = 0;
  bool have = false;
  for (const auto& [backend, ns] : times) {
    if (allowed && !allowed->count(backend)) continue;
    if (!have || ns < best_ns) {
      best = backend;
      best_ns = ns;
      have = true;
    }
  }
  if (!have) throw NoAllowedTarget("no allowed backend has a timing");
  return best;
}

// Procedure: label_and_relabel. Label = fastest backend overall; when the
// winner is outside the allowed target set, relabel to the fastest allowed one.
inline std::vector<TrainingInstance> label_and_relabel(
    std::vector<TrainingInstance> instances, const std::set<std::string>& allowed) {
  for (auto& inst : instances) {
    if (inst.per_backend_ns.empty())
      throw NoAllowedTarget("instance '" + inst.features.loop_id +
                            "' carries no per-backend timings");
    std::string overall = argmin_backend(inst.per_backend_ns);
    inst.label = allowed.count(overall)
                     ? overall
                     : argmin_backend(inst.per_backend_ns, &allowed);
  }
  return instances;
}

// ---- random decision forest ---------------------------------------------------

struct ForestParams {
  int n_trees = 100;
  int max_depth = 25;
  int min_samples_leaf = 5;
  int feature_subset_size = 20;
  int max_categories = 15;  // recorded for config fidelity; inert for numeric features
  uint64_t seed = 42;
};

struct TreeNode {
  int feat = -1;
  double threshold = 0.0;
  int left = -1, right = -1;
  int cls = -1;  // >= 0 marks a leaf
  // training metadata, not serialized
  int n_samples = 0;
  bool pure = false;
};

using Tree = std::vector<TreeNode>;

struct ForestModel {
  ForestParams params;
  std::string mode = "serial";
  std::vector<std::string> schema;
  std::vector<std::string> class_labels;
  std::vector<Tree> trees;
  double oob_accuracy = 0.0;
};

// Own bounded draw: engine output modulo n. std::uniform_int_distribution is
// implementation-defined, which would break cross-platform determinism.
inline uint64_t rng_below(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

inline std::mt19937_64 tree_rng(uint64_t seed, int tree_idx) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(tree_idx), 0x6d636670u};
  return std::mt19937_64(seq);
}

namespace detail {

struct TreeBuilder {
  const std::vector<std::vector<double>>& X;
  const std::vector<int>& y;
  int n_classes;
  int n_features;
  int subset;
  const ForestParams& p;
  std::mt19937_64& rng;
  Tree nodes;

  static double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
      double pr = static_cast<double>(c) / total;
      g -= pr * pr;
    }
    return g;
  }

  int majority(const std::vector<int>& counts) const {
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
      if (counts[c] > counts[best]) best = c;
    return best;  // ties keep the lowest class index
  }

  int build(const std::vector<int>& idx, int depth) {
    std::vector<int> counts(n_classes, 0);
    for (int i : idx) counts[y[i]]++;
    int maj = majority(counts);
    bool pure = counts[maj] == static_cast<int>(idx.size());
    int me = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});
    nodes[me].n_samples = static_cast<int>(idx.size());
    nodes[me].pure = pure;
    if (pure || depth >= p.max_depth ||
        static_cast<int>(idx.size()) < 2 * p.min_samples_leaf) {
      nodes[me].cls = maj;
      return me;
    }

    // fresh random feature subset at every node
    std::vector<int> feats(n_features);
    for (int f = 0; f < n_features; ++f) feats[f] = f;
    for (int t = 0; t < subset; ++t) {
      int j = t + static_cast<int>(rng_below(rng, n_features - t));
      std::swap(feats[t], feats[j]);
    }

    int best_feat = -1;
    double best_thr = 0.0, best_score = gini(counts, static_cast<int>(idx.size()));
    bool found = false;
    std::vector<std::pair<double, int>> vals;
    for (int s = 0; s < subset; ++s) {
      int f = feats[s];
      vals.clear();
      vals.reserve(idx.size());
      for (int i : idx) vals.push_back({X[i][f], y[i]});
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<int> leftc(n_classes, 0);
      int n = static_cast<int>(vals.size());
      for (int j = 0; j + 1 < n; ++j) {
        leftc[vals[j].second]++;
        if (vals[j].first == vals[j + 1].first) continue;
        int nl = j + 1, nr = n - nl;
        if (nl < p.min_samples_leaf || nr < p.min_samples_leaf) continue;
        // midpoint between distinct neighbors; if rounding lands on the upper
        // value, fall back to the lower one so the partition stays exact
        double t = vals[j].first + (vals[j + 1].first - vals[j].first) / 2;
        if (!(t < vals[j + 1].first)) t = vals[j].first;
        std::vector<int> rightc(n_classes, 0);
        for (int c = 0; c < n_classes; ++c) rightc[c] = counts[c] - leftc[c];
        double score =
            (nl * gini(leftc, nl) + nr * gini(rightc, nr)) / n;
        if (!found || score < best_score) {
          found = true;
          best_score = score;
          best_feat = f;
          best_thr = t;
        }
      }
    }
    if (!found) {
      nodes[me].cls = maj;
      return me;
    }
    std::vector<int> l, r;
    for (int i : idx)
      (X[i][best_feat] <= best_thr ? l : r).push_back(i);
    nodes[me].feat = best_feat;
    nodes[me].threshold = best_thr;
    int li = build(l, depth + 1);
    nodes[me].left = li;
    int ri = build(r, depth + 1);
    nodes[me].right = ri;
    return me;
  }
};

}  // namespace detail

inline int predict_tree(const Tree& tree, const std::vector<double>& values) {
  int at = 0;
  while (tree[at].cls < 0)
    at = values[tree[at].feat] <= tree[at].threshold ? tree[at].left : tree[at].right;
  return tree[at].cls;
}

// Procedure: train. Bagging + per-node random feature subsets; deterministic
// for a given seed because every tree draws from its own (seed, index) stream.
inline ForestModel train(const std::vector<TrainingInstance>& dataset,
                         ForestParams params, const std::vector<std::string>& schema,
                         const std::string& mode) {
  if (dataset.empty()) throw DegenerateDataset("empty training set");
  ForestModel model;
  model.mode = mode;
  model.schema = schema;

  std::set<std::string> label_set;
  for (const auto& inst : dataset) {
    if (inst.features.values.size() != schema.size())
      throw SchemaMismatch("instance '" + inst.features.loop_id +
                           "' feature count differs from schema");
    label_set.insert(inst.label);
  }
  model.class_labels.assign(label_set.begin(), label_set.end());

  int n = static_cast<int>(dataset.size());
  int n_features = static_cast<int>(schema.size());
  if (params.feature_subset_size > n_features) {
    Diag::global().warn("feature_subset_size " + std::to_string(params.feature_subset_size) +
               " exceeds schema length " + std::to_string(n_features) +
               ", clamping");
    params.feature_subset_size = n_features;
  }
  if (params.feature_subset_size < 1) params.feature_subset_size = 1;
  model.params = params;

  if (model.class_labels.size() < 2) {
    Diag::global().warn("training set holds a single class; model is a constant predictor");
    for (int t = 0; t < params.n_trees; ++t) {
      Tree tree(1);
      tree[0].cls = 0;
      tree[0].n_samples = n;
      tree[0].pure = true;
      model.trees.push_back(std::move(tree));
    }
    model.oob_accuracy = 1.0;
    return model;
  }

  std::map<std::string, int> class_index;
  for (size_t c = 0; c < model.class_labels.size(); ++c)
    class_index[model.class_labels[c]] = static_cast<int>(c);
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  X.reserve(n);
  for (const auto& inst : dataset) {
    X.push_back(inst.features.values);
    y.push_back(class_index.at(inst.label));
  }

  int n_classes = static_cast<int>(model.class_labels.size());
  model.trees.resize(params.n_trees);
  std::vector<std::vector<char>> inbag(params.n_trees, std::vector<char>(n, 0));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int t = next.fetch_add(1);
      if (t >= params.n_trees) break;
      std::mt19937_64 rng = tree_rng(params.seed, t);
      std::vector<int> idx(n);
      for (int i = 0; i < n; ++i) {
        idx[i] = static_cast<int>(rng_below(rng, n));
        inbag[t][idx[i]] = 1;
      }
      detail::TreeBuilder builder{X, y,       n_classes, n_features,
                                  params.feature_subset_size, params, rng, {}};
      builder.build(idx, 0);
      model.trees[t] = std::move(builder.nodes);
    }
  };
  unsigned hw = std::thread::hardware_concurrency();
  unsigned pool = std::min<unsigned>(hw ? hw : 2, 8);
  pool = std::min<unsigned>(pool, params.n_trees ? params.n_trees : 1);
  std::vector<std::thread> threads;
  for (unsigned i = 0; i + 1 < pool; ++i) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();

  // out-of-bag vote per sample over the trees that never saw it
  int voted = 0, correct = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> votes(n_classes, 0);
    bool any = false;
    for (int t = 0; t < params.n_trees; ++t) {
      if (inbag[t][i]) continue;
      votes[predict_tree(model.trees[t], X[i])]++;
      any = true;
    }
    if (!any) continue;
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
      if (votes[c] > votes[best]) best = c;
    ++voted;
    if (best == y[i]) ++correct;
  }
  if (voted == 0) {
    Diag::global().warn("no out-of-bag samples; reporting oob_accuracy 0");
    model.oob_accuracy = 0.0;
  } else {
    model.oob_accuracy = static_cast<double>(correct) / voted;
  }
  return model;
}

inline std::string predict(const ForestModel& model, const FeatureVector& fv) {
  if (fv.schema_hash != schema_fingerprint(model.schema))
    throw SchemaMismatch("feature vector for '" + fv.loop_id +
                         "' was built against a different event schema");
  std::vector<int> votes(model.class_labels.size(), 0);
  for (const auto& tree : model.trees) votes[predict_tree(tree, fv.values)]++;
  int best = 0;
  for (size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best]) best = static_cast<int>(c);
  return model.class_labels[best];
}

inline int tree_depth(const Tree& tree, int at = 0) {
  if (tree[at].cls >= 0) return 0;
  return 1 + std::max(tree_depth(tree, tree[at].left),
                      tree_depth(tree, tree[at].right));
}

// ---- model file ----------------------------------------------------------------

namespace detail {

inline void emit_node(const Tree& tree, int at, std::string& out) {
  const TreeNode& nd = tree[at];
  if (nd.cls >= 0) {
    out += "L " + std::to_string(nd.cls) + "\n";
    return;
  }
  out += "N " + std::to_string(nd.feat) + " " + format_double(nd.threshold) + "\n";
  emit_node(tree, nd.left, out);
  emit_node(tree, nd.right, out);
}

}  // namespace detail

inline std::string serialize_model(const ForestModel& model) {
  std::string out = "MCMODEL 1\n";
  out += "mode " + model.mode + "\n";
  out += "schema " + join(model.schema, ",") + "\n";
  out += "classes " + join(model.class_labels, ",") + "\n";
  const ForestParams& p = model.params;
  out += "params n_trees=" + std::to_string(p.n_trees) +
         " max_depth=" + std::to_string(p.max_depth) +
         " min_samples_leaf=" + std::to_string(p.min_samples_leaf) +
         " feature_subset_size=" + std::to_string(p.feature_subset_size) +
         " max_categories=" + std::to_string(p.max_categories) +
         " seed=" + std::to_string(p.seed) + " oob=" +
         format_double(model.oob_accuracy) + "\n";
  for (const auto& tree : model.trees) detail::emit_node(tree, 0, out);
  out += "checksum " + to_hex(fnv1a64(out)) + "\n";
  return out;
}

inline void save_model(const ForestModel& model, const fs::path& path) {
  write_file(path, serialize_model(model));
}

namespace detail {

struct NodeReader {
  const std::vector<std::string>& lines;
  size_t at;
  int n_features, n_classes;

  int read(Tree& tree, int depth) {
    if (depth > 64) throw CorruptModel("tree nesting too deep");
    if (at >= lines.size()) throw CorruptModel("model file ends inside a tree");
    std::string line = lines[at++];
    auto w = split_ws(line);
    int me = static_cast<int>(tree.size());
    tree.push_back(TreeNode{});
    if (w.size() == 2 && w[0] == "L") {
      uint64_t cls = 0;
      if (!parse_u64(w[1], cls) || cls >= static_cast<uint64_t>(n_classes))
        throw CorruptModel("bad leaf line: " + line);
      tree[me].cls = static_cast<int>(cls);
      return me;
    }
    if (w.size() == 3 && w[0] == "N") {
      uint64_t feat = 0;
      double thr = 0;
      if (!parse_u64(w[1], feat) || feat >= static_cast<uint64_t>(n_features) ||
          !parse_double(w[2], thr))
        throw CorruptModel("bad node line: " + line);
      tree[me].feat = static_cast<int>(feat);
      tree[me].threshold = thr;
      int li = read(tree, depth + 1);
      tree[me].left = li;
      int ri = read(tree, depth + 1);
      tree[me].right = ri;
      return me;
    }
    throw CorruptModel("unrecognized tree line: " + line);
  }
};

}  // namespace detail

inline ForestModel parse_model(const std::string& text) {
  if (text.empty() || text.back() != '\n')
    throw CorruptModel("model file is empty or truncated");
  size_t ck = text.rfind("\nchecksum ");
  size_t body_end;
  if (ck == std::string::npos) {
    if (!starts_with(text, "checksum "))
      throw CorruptModel("model file is missing its checksum line");
    body_end = 0;
  } else {
    body_end = ck + 1;
  }
  std::string body = text.substr(0, body_end);
  std::string ck_line = text.substr(body_end);
  auto ck_words = split_ws(ck_line);
  if (ck_words.size() != 2 || ck_words[0] != "checksum" || ck_words[1].size() != 16)
    throw CorruptModel("malformed checksum line");
  if (ck_words[1] != to_hex(fnv1a64(body)))
    throw CorruptModel("checksum mismatch: file is corrupt or truncated");

  auto lines = split_lines(body);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 5) throw CorruptModel("model header incomplete");
  auto magic = split_ws(lines[0]);
  uint64_t version = 0;
  if (magic.size() != 2 || magic[0] != "MCMODEL" || !parse_u64(magic[1], version))
    throw CorruptModel("bad magic line");
  if (version != 1)
    throw VersionMismatch("model format version " + std::to_string(version) +
                          " is not supported (expected 1)");

  ForestModel model;
  auto expect_kv = [&](size_t i, const std::string& key) {
    if (!starts_with(lines[i], key + " "))
      throw CorruptModel("expected '" + key + "' line");
    return lines[i].substr(key.size() + 1);
  };
  model.mode = expect_kv(1, "mode");
  for (const auto& s : split(expect_kv(2, "schema"), ','))
    if (!s.empty()) model.schema.push_back(s);
  for (const auto& s : split(expect_kv(3, "classes"), ','))
    if (!s.empty()) model.class_labels.push_back(s);
  if (model.schema.empty() || model.class_labels.empty())
    throw CorruptModel("empty schema or class list");

  std::map<std::string, std::string> kv;
  for (const auto& pair : split_ws(expect_kv(4, "params"))) {
    size_t eq = pair.find('=');
    if (eq == std::string::npos) throw CorruptModel("bad params entry: " + pair);
    kv[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  auto need_int = [&](const char* key) {
    auto it = kv.find(key);
    uint64_t v = 0;
    if (it == kv.end() || !parse_u64(it->second, v))
      throw CorruptModel(std::string("params line lacks ") + key);
    return v;
  };
  model.params.n_trees = static_cast<int>(need_int("n_trees"));
  model.params.max_depth = static_cast<int>(need_int("max_depth"));
  model.params.min_samples_leaf = static_cast<int>(need_int("min_samples_leaf"));
  model.params.feature_subset_size =
      static_cast<int>(need_int("feature_subset_size"));
  model.params.max_categories = static_cast<int>(need_int("max_categories"));
  model.params.seed = need_int("seed");
  {
    auto it = kv.find("oob");
    if (it == kv.end() || !parse_double(it->second, model.oob_accuracy))
      throw CorruptModel("params line lacks oob");
  }
  if (model.params.n_trees < 1) throw CorruptModel("n_trees must be positive");

  detail::NodeReader reader{lines, 5, static_cast<int>(model.schema.size()),
                            static_cast<int>(model.class_labels.size())};
  for (int t = 0; t < model.params.n_trees; ++t) {
    Tree tree;
    reader.read(tree, 0);
    model.trees.push_back(std::move(tree));
  }
  if (reader.at != lines.size())
    throw CorruptModel("trailing content after the last tree");
  return model;
}

inline ForestModel load_model(const fs::path& path) {
  return parse_model(read_file(path));
}

inline bool models_equal(const ForestModel& a, const ForestModel& b) {
  if (a.mode != b.mode || a.schema != b.schema || a.class_labels != b.class_labels)
    return false;
  const ForestParams &p = a.params, &q = b.params;
  if (p.n_trees != q.n_trees || p.max_depth != q.max_depth ||
      p.min_samples_leaf != q.min_samples_leaf ||
      p.feature_subset_size != q.feature_subset_size ||
      p.max_categories != q.max_categories || p.seed != q.seed)
    return false;
  if (a.oob_accuracy != b.oob_accuracy) return false;
  if (a.trees.size() != b.trees.size()) return false;
  for (size_t t = 0; t < a.trees.size(); ++t) {
    if (a.trees[t].size() != b.trees[t].size()) return false;
    for (size_t i = 0; i < a.trees[t].size(); ++i) {
      const TreeNode &x = a.trees[t][i], &y = b.trees[t][i];
      if (x.feat != y.feat || x.threshold != y.threshold || x.left != y.left ||
          x.right != y.right || x.cls != y.cls)
        return false;
    }
  }
  return true;
}

// ---- training dataset CSV -------------------------------------------------------

struct DatasetRow {
  std::string loop_id;
  std::vector<double> values;
  std::map<std::string, uint64_t> per_backend_ns;
};

struct Dataset {
  std::vector<std::string> schema;
  std::vector<std::string> backends;
  std::vector<DatasetRow> rows;
};

inline Dataset parse_dataset_csv(const std::string& text) {
  auto lines = split_lines(text);
  size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i >= lines.size()) throw IoError("dataset csv is empty");
  auto header = split(std::string(trim(lines[i])), ',');
  if (header.empty() || header[0] != "loop_id")
    throw IoError("dataset csv must start with a loop_id column");
  Dataset ds;
  size_t col = 1;
  while (col < header.size() && !starts_with(header[col], "time_"))
    ds.schema.push_back(header[col++]);
  for (; col < header.size(); ++col) {
    if (!starts_with(header[col], "time_"))
      throw IoError("dataset csv: event columns must precede time_ columns");
    ds.backends.push_back(header[col].substr(5));
  }
  if (ds.backends.empty()) throw IoError("dataset csv has no time_ columns");
  for (++i; i < lines.size(); ++i) {
    std::string line(trim(lines[i]));
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 1 + ds.schema.size() + ds.backends.size())
      throw IoError("dataset row has wrong column count: " + line);
    DatasetRow row;
    row.loop_id = cols[0];
    for (size_t f = 0; f < ds.schema.size(); ++f) {
      double v = 0;
      if (!parse_double(cols[1 + f], v))
        throw IoError("bad feature value in row: " + line);
      row.values.push_back(v);
    }
    for (size_t b = 0; b < ds.backends.size(); ++b) {
      const std::string& cell = cols[1 + ds.schema.size() + b];
      if (cell.empty()) continue;  // missing timing for this backend
      uint64_t ns = 0;
      if (!parse_u64(cell, ns)) throw IoError("bad time value in row: " + line);
      row.per_backend_ns[ds.backends[b]] = ns;
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

inline std::string format_dataset_csv(const Dataset& ds) {
  std::string out = "loop_id";
  for (const auto& e : ds.schema) out += "," + e;
  for (const auto& b : ds.backends) out += ",time_" + b;
  out += "\n";
  for (const auto& row : ds.rows) {
    out += row.loop_id;
    for (double v : row.values) out += "," + format_double(v);
    for (const auto& b : ds.backends) {
      auto it = row.per_backend_ns.find(b);
      out += ",";
      if (it != row.per_backend_ns.end()) out += std::to_string(it->second);
    }
    out += "\n";
  }
  return out;
}

inline std::vector<TrainingInstance> dataset_to_instances(const Dataset& ds) {
  uint64_t hash = schema_fingerprint(ds.schema);
  std::vector<TrainingInstance> out;
  out.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    TrainingInstance inst;
    inst.features = FeatureVector{row.loop_id, row.values, hash};
    inst.per_backend_ns = row.per_backend_ns;
    out.push_back(std::move(inst));
  }
  return out;
}

// Two well-separated clusters with deterministic noise; class 0 loops are
// fastest under gcc, class 1 under polly.
inline Dataset make_synthetic_dataset(int n_instances, int n_features,
                                      uint64_t seed) {
  Dataset ds;
  for (int f = 0; f < n_features; ++f) ds.schema.push_back("ev" + std::to_string(f));
  ds.backends = {"clang", "gcc", "icc", "polly"};
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return (rng() >> 11) * (1.0 / 9007199254740992.0); };
  for (int i = 0; i < n_instances; ++i) {
    int cls = i % 2;
    DatasetRow row;
    row.loop_id = "syn" + std::to_string(i);
    for (int f = 0; f < n_features; ++f) {
      double center = (cls == 0 ? 8.0 : 24.0) + f;
      double noise = (unit() + unit() + unit() + unit() - 2.0) * 10.0;
      double v = center + noise;
      row.values.push_back(v < 0 ? 0.0 : v);
    }
    uint64_t jitter = rng_below(rng, 1000);
    std::string winner = cls == 0 ? "gcc" : "polly";
    for (const auto& b : ds.backends)
      row.per_backend_ns[b] = (b == winner ? 80000 : 120000) + jitter;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace mc
