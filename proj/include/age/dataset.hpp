#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "age/graph.hpp"

namespace age {

enum class SplitTag : std::uint8_t { train_pool, validation, test };

const char* to_string(SplitTag tag);
SplitTag parse_split_tag(const std::string& s, const std::string& context);

/// Immutable node-classification dataset: graph, features, labels, and a
/// per-node split assignment.
struct Dataset {
  Graph graph;
  DenseMatrix features;        // N x F
  std::vector<int> labels;     // class id per node, contiguous [0, C)
  std::vector<SplitTag> split; // per node
  int n_classes = 0;

  int n_nodes() const { return graph.n_nodes; }
  int feature_dim() const { return features.cols(); }
  std::vector<int> nodes_with_tag(SplitTag tag) const;

  void check() const;
};

struct DatasetPaths {
  std::string edges;
  std::string features;
  std::string labels;
  std::string splits;
};

struct LoadOptions {
  /// Divide each feature row by its sum when the sum is nonzero.
  bool row_normalize_features = true;
};

struct LoadWarnings {
  int self_loops_dropped = 0;
  int duplicate_edges_collapsed = 0;
};

/// File formats (UTF-8 text, tab-separated, '#' starts a comment line):
///   edges:    "u<TAB>v" per line, 0-based node ids
///   features: header "N<TAB>F", then "node<TAB>feature_index<TAB>value"
///             triplets; unlisted entries are zero
///   labels:   "node<TAB>class_id" for every node
///   splits:   "node<TAB>tag", tag in {train_pool, validation, test};
///             unlisted nodes default to train_pool
Dataset load_dataset(const DatasetPaths& paths, const LoadOptions& options = {},
                     LoadWarnings* warnings = nullptr);

/// Writes the four files back out in the canonical form load_dataset reads;
/// feature values are printed with full round-trip precision.
void save_dataset(const Dataset& ds, const DatasetPaths& paths);

}  // namespace age
