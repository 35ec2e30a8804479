#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "age/active.hpp"
#include "age/centrality.hpp"
#include "age/harness.hpp"
#include "age/kmeans.hpp"

namespace py = pybind11;
using namespace age;

namespace {

DenseMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  DenseMatrix m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) {
      throw ShapeError("ragged row in matrix argument");
    }
    for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> from_matrix(const DenseMatrix& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

Graph make_graph(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
  return Graph::from_edges(n_nodes, edges);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph active-learning core: GCN training, centrality metrics, "
            "and the query-strategy experiment harness";

  py::register_exception<Error>(m, "AgeError");

  py::class_<SeededRng>(m, "SeededRng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def("next_u32", &SeededRng::next_u32)
      .def("next_double", &SeededRng::next_double)
      .def("substream", &SeededRng::substream)
      .def_property_readonly("seed", &SeededRng::seed)
      .def_property_readonly("stream_id", &SeededRng::stream_id);

  m.def("sample_beta_1_n", &sample_beta_1_n, py::arg("rng"), py::arg("n"));

  m.def(
      "kmeans",
      [](const std::vector<std::vector<double>>& points, int k, SeededRng& rng,
         int max_iter, double tol) {
        const KMeansResult r = kmeans(to_matrix(points), k, rng, max_iter, tol);
        return py::make_tuple(r.assignments, from_matrix(r.centroids));
      },
      py::arg("points"), py::arg("k"), py::arg("rng"), py::arg("max_iter") = 50,
      py::arg("tol") = 1e-4,
      "Lloyd k-means with k-means++ seeding; returns (assignments, centroids)");

  py::class_<Graph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("n_nodes"), py::arg("edges"))
      .def_readonly("n_nodes", &Graph::n_nodes)
      .def("n_edges", &Graph::n_edges)
      .def("degree", &Graph::degree);

  m.def(
      "pagerank",
      [](const Graph& g, double rho, double tol, int max_iter) {
        return pagerank(g, rho, tol, max_iter).scores;
      },
      py::arg("graph"), py::arg("rho") = 0.85, py::arg("tol") = 1e-8,
      py::arg("max_iter") = 200);
  m.def("degree_centrality",
        [](const Graph& g) { return degree_centrality(g).scores; });
  m.def("closeness_centrality",
        [](const Graph& g) { return closeness_centrality(g).scores; });
  m.def("betweenness_centrality",
        [](const Graph& g) { return betweenness_centrality(g).scores; });
  m.def("harmonic_centrality",
        [](const Graph& g) { return harmonic_centrality(g).scores; });

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("n_nodes", &Dataset::n_nodes)
      .def_property_readonly("n_edges",
                             [](const Dataset& d) { return d.graph.n_edges(); })
      .def_readonly("n_classes", &Dataset::n_classes)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def_readonly("labels", &Dataset::labels)
      .def_property_readonly("splits", [](const Dataset& d) {
        std::vector<std::string> tags;
        tags.reserve(d.split.size());
        for (SplitTag t : d.split) tags.emplace_back(to_string(t));
        return tags;
      });

  m.def(
      "load_dataset",
      [](const std::string& edges, const std::string& features,
         const std::string& labels, const std::string& splits,
         bool row_normalize_features) {
        return load_dataset({edges, features, labels, splits},
                            {row_normalize_features});
      },
      py::arg("edges"), py::arg("features"), py::arg("labels"),
      py::arg("splits"), py::arg("row_normalize_features") = true);

  m.def("percentile", [](const std::vector<double>& scores) {
    return percentile(scores);
  });
  m.def(
      "sample_time_weights",
      [](int t, int budget, SeededRng& rng) {
        const TimeWeights w = sample_time_weights(t, budget, rng);
        return py::make_tuple(w.alpha, w.beta, w.gamma);
      },
      py::arg("t"), py::arg("budget"), py::arg("rng"));

  m.def(
      "macro_f1",
      [](const std::vector<int>& p, const std::vector<int>& t, int c) {
        return macro_f1(p, t, c);
      },
      py::arg("predictions"), py::arg("truths"), py::arg("n_classes"));
  m.def(
      "micro_f1",
      [](const std::vector<int>& p, const std::vector<int>& t, int c) {
        return micro_f1(p, t, c);
      },
      py::arg("predictions"), py::arg("truths"), py::arg("n_classes"));

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_property(
          "strategy",
          [](const ExperimentConfig& c) { return c.strategy.name(); },
          [](ExperimentConfig& c, const std::string& name) {
            c.strategy = StrategyKind::parse(name, c.strategy.gamma);
          })
      .def_property(
          "gamma", [](const ExperimentConfig& c) { return c.strategy.gamma; },
          [](ExperimentConfig& c, double g) { c.strategy.gamma = g; })
      .def_readwrite("initial_per_class", &ExperimentConfig::initial_per_class)
      .def_readwrite("budget", &ExperimentConfig::budget)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("batch_size", &ExperimentConfig::batch_size)
      .def_readwrite("validation_size", &ExperimentConfig::validation_size)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("out_csv", &ExperimentConfig::out_csv)
      .def_readwrite("out_plot", &ExperimentConfig::out_plot)
      .def_property(
          "hidden_dim",
          [](const ExperimentConfig& c) { return c.gcn.hidden_dim; },
          [](ExperimentConfig& c, int v) { c.gcn.hidden_dim = v; })
      .def_property(
          "dropout_rate",
          [](const ExperimentConfig& c) { return c.gcn.dropout_rate; },
          [](ExperimentConfig& c, double v) { c.gcn.dropout_rate = v; })
      .def_property(
          "learning_rate",
          [](const ExperimentConfig& c) { return c.gcn.learning_rate; },
          [](ExperimentConfig& c, double v) { c.gcn.learning_rate = v; })
      .def_property(
          "weight_decay",
          [](const ExperimentConfig& c) { return c.gcn.weight_decay; },
          [](ExperimentConfig& c, double v) { c.gcn.weight_decay = v; })
      .def_property(
          "max_epochs",
          [](const ExperimentConfig& c) { return c.gcn.max_epochs; },
          [](ExperimentConfig& c, int v) { c.gcn.max_epochs = v; });

  py::class_<TrialResult>(m, "TrialResult")
      .def_readonly("macro_f1", &TrialResult::macro_f1)
      .def_readonly("micro_f1", &TrialResult::micro_f1)
      .def_readonly("selected_nodes", &TrialResult::selected_nodes)
      .def_readonly("epochs_run", &TrialResult::epochs_run)
      .def_readonly("failed", &TrialResult::failed)
      .def_readonly("query_log", &TrialResult::query_log);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("trials", &ExperimentReport::trials)
      .def_readonly("mean_macro", &ExperimentReport::mean_macro)
      .def_readonly("std_macro", &ExperimentReport::std_macro)
      .def_readonly("mean_micro", &ExperimentReport::mean_micro)
      .def_readonly("std_micro", &ExperimentReport::std_micro)
      .def_readonly("failed_trials", &ExperimentReport::failed_trials);

  m.def(
      "run_experiment",
      [](const ExperimentConfig& cfg, const std::string& edges,
         const std::string& features, const std::string& labels,
         const std::string& splits) {
        ExperimentConfig c = cfg;
        c.paths = {edges, features, labels, splits};
        py::gil_scoped_release release;
        return run_experiment(c);
      },
      py::arg("config"), py::arg("edges"), py::arg("features"),
      py::arg("labels"), py::arg("splits"));
}
