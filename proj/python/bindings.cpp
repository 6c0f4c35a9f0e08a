#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fsupart/cli.hpp"
#include "fsupart/dmpc.hpp"
#include "fsupart/error.hpp"
#include "fsupart/exact.hpp"
#include "fsupart/fsu.hpp"
#include "fsupart/greedy.hpp"
#include "fsupart/io.hpp"
#include "fsupart/netgen.hpp"
#include "fsupart/qp.hpp"

namespace py = pybind11;
using namespace fsupart;

namespace {

using GraphPtr = std::shared_ptr<const EquivalentGraph>;
using CollPtr = std::shared_ptr<const FsuCollection>;

// Systems cross the boundary as JSON text; linear ones also as (A, B).
SystemModel parse_system(const std::string& text) { return system_from_json(Json::parse(text)); }

LinearModel linear_of(const SystemModel& m) {
  const auto* lin = std::get_if<LinearModel>(&m);
  if (!lin) throw Error("invalid_argument", "expected a linear system");
  return *lin;
}

IndexConfig config(double alpha, const std::string& size_measure) {
  IndexConfig cfg = IndexConfig::from_alpha(alpha);
  if (size_measure == "nodes") {
    cfg.size_measure = SizeMeasure::Nodes;
  } else if (size_measure != "fsus") {
    throw Error("invalid_argument", "size_measure must be 'fsus' or 'nodes'");
  }
  return cfg;
}

Objective objective_of(const std::string& s) {
  if (s == "quadratic") return Objective::Quadratic;
  if (s == "ratio") return Objective::Ratio;
  throw Error("invalid_argument", "objective must be 'quadratic' or 'ratio'");
}

Engine engine_of(const std::string& s) {
  if (s == "greedy") return Engine::Greedy;
  if (s == "refined") return Engine::Refined;
  if (s == "exact") return Engine::Exact;
  if (s == "brute") return Engine::Brute;
  throw Error("invalid_argument", "unknown engine " + s);
}

py::dict result_dict(const ExactResult& r) {
  py::dict d;
  d["partition"] = r.partition;
  d["value"] = r.value;
  d["bound"] = r.bound;
  d["gap"] = r.gap;
  d["optimal"] = r.optimal;
  d["nodes"] = r.nodes;
  d["leaves"] = r.leaves;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fsupart, m) {
  m.doc() = "Equivalent graphs, FSU selection, control partitioning and DMPC-ADMM";

  static py::exception<Error> exc(m, "FsupartError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(exc.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  // systems
  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init([](Matrix A, Matrix B) {
             LinearModel lm{std::move(A), std::move(B)};
             validate(lm);
             return lm;
           }),
           py::arg("A"), py::arg("B"))
      .def_readwrite("A", &LinearModel::A)
      .def_readwrite("B", &LinearModel::B)
      .def_property_readonly("n", &LinearModel::n)
      .def_property_readonly("p", &LinearModel::p)
      .def("to_json", [](const LinearModel& lm) { return system_to_json(lm).dump(); });

  m.def("linear_from_json", [](const std::string& text) { return linear_of(parse_system(text)); },
        py::arg("text"));
  m.def("gen_modular",
        [](int levels, int base_size, double strong_w, double weak_w, double level_scale) {
          ModularSpec s;
          s.levels = levels;
          s.base_size = base_size;
          s.strong_w = strong_w;
          s.weak_w = weak_w;
          s.level_scale = level_scale;
          return gen_modular(s);
        },
        py::arg("levels") = 3, py::arg("base_size") = 4, py::arg("strong_w") = 0.1,
        py::arg("weak_w") = 0.01, py::arg("level_scale") = 1.0);
  m.def("gen_random_fsu",
        [](int n_fsus, double edge_density, double w_lo, double w_hi, std::uint64_t seed) {
          RandomFsuSpec s;
          s.n_fsus = n_fsus;
          s.edge_density = edge_density;
          s.w_lo = w_lo;
          s.w_hi = w_hi;
          s.seed = seed;
          return std::get<LinearModel>(gen_random_fsu(s));
        },
        py::arg("n_fsus") = 10, py::arg("edge_density") = 0.2, py::arg("w_lo") = 0.01,
        py::arg("w_hi") = 0.1, py::arg("seed") = 0);
  m.def("gen_generic",
        [](int n, int p, double density, std::uint64_t seed, bool planted) {
          GenericSpec s;
          s.n = n;
          s.p = p;
          s.density = density;
          s.seed = seed;
          s.planted = planted;
          return gen_generic(s);
        },
        py::arg("n") = 100, py::arg("p") = 20, py::arg("density") = 0.03, py::arg("seed") = 0,
        py::arg("planted") = false);

  // graphs
  py::class_<EquivalentGraph, std::shared_ptr<EquivalentGraph>>(m, "EquivalentGraph")
      .def_property_readonly("n", &EquivalentGraph::num_states)
      .def_property_readonly("p", &EquivalentGraph::num_inputs)
      .def("edges",
           [](const EquivalentGraph& g) {
             std::vector<std::tuple<std::string, std::string, double>> out;
             for (const auto& e : g.edges()) out.emplace_back(g.vertex_name(e.source), g.vertex_name(e.target), e.weight);
             return out;
           })
      .def("total_mass", &EquivalentGraph::total_mass)
      .def("signature", [](const EquivalentGraph& g) { return topology_signature(g).hex(); })
      .def("to_json", [](const EquivalentGraph& g) { return graph_to_json(g).dump(); })
      .def("to_dot", [](const EquivalentGraph& g) { return to_dot(g); });

  m.def("build_linear_graph",
        [](const LinearModel& lm) { return std::make_shared<EquivalentGraph>(build_linear_graph(lm)); },
        py::arg("model"));
  m.def("graph_from_json",
        [](const std::string& text, int mode) {
          auto model = parse_system(text);
          if (auto* pwa = std::get_if<PwaModel>(&model)) {
            return std::make_shared<EquivalentGraph>(build_pwa_graph(*pwa, static_cast<std::size_t>(mode)));
          }
          return std::make_shared<EquivalentGraph>(build_linear_graph(linear_of(model)));
        },
        py::arg("text"), py::arg("mode") = 0);

  // FSUs
  py::class_<FsuCollection, std::shared_ptr<FsuCollection>>(m, "FsuCollection")
      .def("__len__", &FsuCollection::size)
      .def("fsus",
           [](const FsuCollection& c) {
             py::list out;
             for (const auto& f : c.fsus()) {
               py::dict d;
               d["id"] = f.id;
               d["inputs"] = f.input_nodes;
               std::vector<int> states;
               for (auto v : f.state_nodes) states.push_back(c.graph().state_index(v));
               d["states"] = states;
               out.append(d);
             }
             return out;
           })
      .def_property_readonly("condensed", &FsuCollection::condensed)
      .def("to_json", [](const FsuCollection& c) { return fsus_to_json(c).dump(); });

  m.def("select_fsus",
        [](const std::shared_ptr<EquivalentGraph>& g) {
          return std::make_shared<FsuCollection>(select_fsus(GraphPtr(g)));
        },
        py::arg("graph"));

  // partitions
  py::class_<Partition>(m, "Partition")
      .def(py::init([](const std::shared_ptr<FsuCollection>& c, Blocks blocks) {
             return Partition(CollPtr(c), std::move(blocks));
           }),
           py::arg("fsus"), py::arg("blocks"))
      .def_property_readonly("blocks", &Partition::blocks)
      .def("__len__", &Partition::size)
      .def("__eq__", [](const Partition& a, const Partition& b) { return a == b; })
      .def("block_sizes", &Partition::block_sizes)
      .def_property_readonly("w_intra", [](const Partition& p) { return p.components().intra; })
      .def_property_readonly("w_inter", [](const Partition& p) { return p.components().inter; })
      .def_property_readonly("w_size", [](const Partition& p) { return p.components().size; })
      .def("to_json", [](const Partition& p) { return partition_to_json(p).dump(); })
      .def("__repr__", [](const Partition& p) { return "<Partition " + partition_to_json(p)["blocks"].dump() + ">"; });

  m.def("singleton_partition", [](const std::shared_ptr<FsuCollection>& c) { return singleton_partition(*c); });
  m.def("single_block_partition", [](const std::shared_ptr<FsuCollection>& c) { return single_block_partition(*c); });
  m.def("index_ratio",
        [](const Partition& p, double alpha, const std::string& sm) { return index_ratio(p, config(alpha, sm)); },
        py::arg("partition"), py::arg("alpha"), py::arg("size_measure") = "fsus");
  m.def("index_quadratic",
        [](const Partition& p, double alpha, const std::string& sm) { return index_quadratic(p, config(alpha, sm)); },
        py::arg("partition"), py::arg("alpha"), py::arg("size_measure") = "fsus");
  m.def("alpha_from_kappa",
        [](double kappa, const std::shared_ptr<FsuCollection>& c) { return IndexConfig::from_kappa(kappa, *c).alpha; },
        py::arg("kappa"), py::arg("fsus"));
  m.def("alpha_big", [](const std::shared_ptr<FsuCollection>& c) { return alpha_big(*c); }, py::arg("fsus"));

  m.def("greedy_partition",
        [](const std::shared_ptr<FsuCollection>& c, double alpha, const std::string& sm) {
          return greedy_partition(*c, config(alpha, sm));
        },
        py::arg("fsus"), py::arg("alpha"), py::arg("size_measure") = "fsus");
  m.def("refine_partition",
        [](const Partition& p, double alpha, const std::string& sm) { return refine_partition(p, config(alpha, sm)); },
        py::arg("partition"), py::arg("alpha"), py::arg("size_measure") = "fsus");
  m.def("greedy_refined",
        [](const std::shared_ptr<FsuCollection>& c, double alpha, const std::string& sm) {
          return greedy_refined(*c, config(alpha, sm));
        },
        py::arg("fsus"), py::arg("alpha"), py::arg("size_measure") = "fsus");
  m.def("brute_force_partition",
        [](const std::shared_ptr<FsuCollection>& c, double alpha, const std::string& objective) {
          return result_dict(brute_force_partition(*c, config(alpha, "fsus"), objective_of(objective)));
        },
        py::arg("fsus"), py::arg("alpha"), py::arg("objective") = "quadratic");
  m.def("branch_and_bound",
        [](const std::shared_ptr<FsuCollection>& c, double alpha, const std::string& objective,
           double time_limit, double gap_tol) {
          BnbOptions o;
          o.objective = objective_of(objective);
          o.time_limit = time_limit;
          o.gap_tol = gap_tol;
          py::gil_scoped_release release;
          auto r = branch_and_bound(*c, config(alpha, "fsus"), o);
          py::gil_scoped_acquire acquire;
          return result_dict(r);
        },
        py::arg("fsus"), py::arg("alpha"), py::arg("objective") = "quadratic", py::arg("time_limit") = 60.0,
        py::arg("gap_tol") = 0.0);
  m.def("alpha_sweep",
        [](const std::shared_ptr<FsuCollection>& c, const std::vector<double>& kappas, const std::string& engine) {
          auto r = alpha_sweep(*c, kappas, engine_of(engine));
          py::list runs;
          for (const auto& e : r.runs) {
            py::dict d;
            d["kappa"] = e.kappa;
            d["alpha"] = e.alpha;
            d["partition"] = e.partition;
            d["value"] = e.value;
            d["optimal"] = e.optimal;
            d["distinct_id"] = e.distinct_id;
            runs.append(d);
          }
          return py::make_tuple(runs, r.distinct);
        },
        py::arg("fsus"), py::arg("kappas"), py::arg("engine") = "exact");

  // control
  m.def("qp_solve",
        [](const Matrix& H, const Vector& f, const Vector& lo, const Vector& hi, double tol, int max_iter) {
          auto r = qp_solve(H, f, lo, hi, tol, max_iter);
          return py::make_tuple(r.x, r.primal_residual, r.dual_residual, r.iterations);
        },
        py::arg("H"), py::arg("f"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-8,
        py::arg("max_iter") = 20000);

  m.def("simulate",
        [](const LinearModel& model, const Partition& p, const std::string& scenario_json) {
          Scenario s = scenario_json.empty() ? Scenario{} : scenario_from_json(Json::parse(scenario_json));
          RunMetrics r;
          {
            py::gil_scoped_release release;
            r = simulate(model, p, s);
          }
          py::dict d;
          d["n_csu"] = r.n_csu;
          d["cumulative_cost"] = r.cumulative_cost();
          d["core_seconds"] = r.core_seconds();
          d["mean_max_core_time"] = r.mean_max_core_time();
          d["states"] = r.states;
          d["inputs"] = r.inputs;
          d["csv"] = metrics_csv(r);
          std::vector<int> iters;
          for (const auto& st : r.steps) iters.push_back(st.admm_iters);
          d["admm_iters"] = iters;
          return d;
        },
        py::arg("model"), py::arg("partition"), py::arg("scenario_json") = "");
  m.def("default_scenario_json", [] { return scenario_to_json(Scenario{}).dump(); });

  m.def("run_cli",
        [](const std::vector<std::string>& args, const std::string& stdin_text) {
          std::istringstream in(stdin_text);
          std::ostringstream out, err;
          const int status = cli::run(args, in, out, err);
          return py::make_tuple(status, out.str(), err.str());
        },
        py::arg("args"), py::arg("stdin") = "");
}
