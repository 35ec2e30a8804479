#include "age/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace age {

namespace {

struct LineReader {
  std::ifstream in;
  std::string path;
  int line_no = 0;

  explicit LineReader(const std::string& p) : in(p), path(p) {
    if (!in) throw ParseError(p + ": cannot open file");
  }

  /// Next non-empty, non-comment line split on tabs; false at EOF.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      fields.clear();
      std::size_t start = 0;
      for (;;) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
  }

  long parse_int(const std::string& s) const {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0') {
      fail("expected an integer, got \"" + s + "\"");
    }
    return v;
  }

  double parse_double(const std::string& s) const {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0' || !std::isfinite(v)) {
      fail("expected a finite number, got \"" + s + "\"");
    }
    return v;
  }
};

int check_node_id(long id, int n, const LineReader& r) {
  if (id < 0 || id >= n) {
    r.fail("node id " + std::to_string(id) + " outside [0," + std::to_string(n) + ")");
  }
  return static_cast<int>(id);
}

}  // namespace

const char* to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::train_pool: return "train_pool";
    case SplitTag::validation: return "validation";
    case SplitTag::test: return "test";
  }
  return "?";
}

SplitTag parse_split_tag(const std::string& s, const std::string& context) {
  if (s == "train_pool") return SplitTag::train_pool;
  if (s == "validation") return SplitTag::validation;
  if (s == "test") return SplitTag::test;
  throw ParseError(context + ": unknown split tag \"" + s + "\"");
}

std::vector<int> Dataset::nodes_with_tag(SplitTag tag) const {
  std::vector<int> out;
  for (int i = 0; i < n_nodes(); ++i) {
    if (split[i] == tag) out.push_back(i);
  }
  return out;
}

void Dataset::check() const {
  graph.check();
  const int n = n_nodes();
  if (features.rows() != n) throw ValidationError("feature row count != node count");
  if (static_cast<int>(labels.size()) != n) {
    throw ValidationError("label count != node count");
  }
  if (static_cast<int>(split.size()) != n) {
    throw ValidationError("split count != node count");
  }
  if (!features.all_finite()) throw ValidationError("non-finite feature value");
  std::vector<char> seen(n_classes, 0);
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw ValidationError("node " + std::to_string(i) + " has class " +
                            std::to_string(labels[i]) + " outside [0," +
                            std::to_string(n_classes) + ")");
    }
    seen[labels[i]] = 1;
  }
  for (int c = 0; c < n_classes; ++c) {
    if (!seen[c]) {
      throw ValidationError("class ids are not contiguous: class " +
                            std::to_string(c) + " has no nodes");
    }
  }
}

Dataset load_dataset(const DatasetPaths& paths, const LoadOptions& options,
                     LoadWarnings* warnings) {
  std::vector<std::string> f;

  // Features first: the header fixes N.
  LineReader fr(paths.features);
  if (!fr.next(f) || f.size() != 2) {
    fr.fail("expected header \"N<TAB>F\"");
  }
  const long n_long = fr.parse_int(f[0]);
  const long f_long = fr.parse_int(f[1]);
  if (n_long < 1 || f_long < 1) fr.fail("N and F must be positive");
  const int n = static_cast<int>(n_long);
  const int f_dim = static_cast<int>(f_long);
  DenseMatrix features(n, f_dim);
  {
    std::vector<std::tuple<int, int>> seen_coords;
    while (fr.next(f)) {
      if (f.size() != 3) fr.fail("expected \"node<TAB>feature_index<TAB>value\"");
      const int node = check_node_id(fr.parse_int(f[0]), n, fr);
      const long fi = fr.parse_int(f[1]);
      if (fi < 0 || fi >= f_dim) {
        fr.fail("feature index " + std::to_string(fi) + " outside [0," +
                std::to_string(f_dim) + ")");
      }
      features(node, static_cast<int>(fi)) = fr.parse_double(f[2]);
      seen_coords.emplace_back(node, static_cast<int>(fi));
    }
    std::sort(seen_coords.begin(), seen_coords.end());
    if (std::adjacent_find(seen_coords.begin(), seen_coords.end()) !=
        seen_coords.end()) {
      throw ValidationError(paths.features + ": duplicate (node, feature) entry");
    }
  }
  if (options.row_normalize_features) {
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      double* row = features.row(i);
      for (int j = 0; j < f_dim; ++j) sum += row[j];
      if (sum != 0.0) {
        for (int j = 0; j < f_dim; ++j) row[j] /= sum;
      }
    }
  }

  // Edges.
  std::vector<std::pair<int, int>> edges;
  {
    LineReader er(paths.edges);
    while (er.next(f)) {
      if (f.size() != 2) er.fail("expected \"u<TAB>v\"");
      edges.emplace_back(check_node_id(er.parse_int(f[0]), n, er),
                         check_node_id(er.parse_int(f[1]), n, er));
    }
  }
  EdgeStats stats;
  Graph graph = Graph::from_edges(n, edges, &stats);
  if (warnings) {
    warnings->self_loops_dropped = stats.self_loops_dropped;
    warnings->duplicate_edges_collapsed = stats.duplicates_collapsed;
  }

  // Labels: every node must carry exactly one.
  std::vector<int> labels(n, -1);
  int n_classes = 0;
  {
    LineReader lr(paths.labels);
    while (lr.next(f)) {
      if (f.size() != 2) lr.fail("expected \"node<TAB>class_id\"");
      const int node = check_node_id(lr.parse_int(f[0]), n, lr);
      const long cls = lr.parse_int(f[1]);
      if (cls < 0) lr.fail("negative class id");
      if (labels[node] != -1) lr.fail("duplicate label for node " + std::to_string(node));
      labels[node] = static_cast<int>(cls);
      n_classes = std::max(n_classes, static_cast<int>(cls) + 1);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (labels[i] == -1) {
      throw ValidationError(paths.labels + ": node " + std::to_string(i) +
                            " has no label");
    }
  }

  // Splits: unlisted nodes default to train_pool.
  std::vector<SplitTag> split(n, SplitTag::train_pool);
  {
    LineReader sr(paths.splits);
    std::vector<char> listed(n, 0);
    while (sr.next(f)) {
      if (f.size() != 2) sr.fail("expected \"node<TAB>tag\"");
      const int node = check_node_id(sr.parse_int(f[0]), n, sr);
      if (listed[node]) sr.fail("duplicate split entry for node " + std::to_string(node));
      listed[node] = 1;
      split[node] = parse_split_tag(f[1], sr.path + ":" + std::to_string(sr.line_no));
    }
  }

  Dataset ds{std::move(graph), std::move(features), std::move(labels),
             std::move(split), n_classes};
  ds.check();
  return ds;
}

void save_dataset(const Dataset& ds, const DatasetPaths& paths) {
  auto open = [](const std::string& p) {
    std::ofstream out(p);
    if (!out) throw Error(p + ": cannot open for writing");
    return out;
  };
  char buf[64];

  auto edges = open(paths.edges);
  const auto& a = ds.graph.adjacency;
  for (int i = 0; i < ds.n_nodes(); ++i) {
    for (int p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
      const int j = a.col_indices[p];
      if (i < j) edges << i << '\t' << j << '\n';
    }
  }

  auto features = open(paths.features);
  features << ds.n_nodes() << '\t' << ds.feature_dim() << '\n';
  for (int i = 0; i < ds.n_nodes(); ++i) {
    const double* row = ds.features.row(i);
    for (int j = 0; j < ds.feature_dim(); ++j) {
      if (row[j] == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      features << i << '\t' << j << '\t' << buf << '\n';
    }
  }

  auto labels = open(paths.labels);
  for (int i = 0; i < ds.n_nodes(); ++i) {
    labels << i << '\t' << ds.labels[i] << '\n';
  }

  auto splits = open(paths.splits);
  for (int i = 0; i < ds.n_nodes(); ++i) {
    splits << i << '\t' << to_string(ds.split[i]) << '\n';
  }
}

}  // namespace age
