#include "fsupart/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsupart/error.hpp"

namespace fsupart {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("invalid_json", what); }

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) bad(ctx + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& ctx) {
  if (!j.is_number()) bad(ctx + ": expected a number");
  return j.get<double>();
}

long integer(const Json& j, const std::string& ctx) {
  if (!j.is_number_integer()) bad(ctx + ": expected an integer");
  return j.get<long>();
}

}  // namespace

Matrix matrix_from_json(const Json& j, const std::string& name) {
  if (j.is_object()) {
    const long rows = integer(field(j, "rows", name), name + ".rows");
    const long cols = integer(field(j, "cols", name), name + ".cols");
    if (rows < 0 || cols < 0) bad(name + ": negative dimensions");
    Matrix m = Matrix::Zero(rows, cols);
    const auto& trips = field(j, "triplets", name);
    if (!trips.is_array()) bad(name + ".triplets: expected an array");
    for (const auto& t : trips) {
      if (!t.is_array() || t.size() != 3) bad(name + ": triplets are [row, col, value]");
      const long r = integer(t[0], name);
      const long c = integer(t[1], name);
      if (r < 0 || r >= rows || c < 0 || c >= cols) {
        throw Error("dimension_mismatch", "matrix " + name + ": triplet index out of range",
                    {r, c});
      }
      m(r, c) += number(t[2], name);
    }
    return m;
  }
  if (!j.is_array()) bad(name + ": expected a dense array or a triplet object");
  const long rows = static_cast<long>(j.size());
  const long cols = rows == 0 ? 0 : static_cast<long>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols) {
      throw Error("dimension_mismatch", "matrix " + name + ": rows have different lengths");
    }
    for (long c = 0; c < cols; ++c) m(r, c) = number(j[r][c], name);
  }
  return m;
}

Vector vector_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) bad(name + ": expected an array");
  Vector v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v(i) = number(j[i], name);
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

SystemModel system_from_json(const Json& j) {
  // Files produced by `fsu` embed the system.
  if (j.is_object() && j.contains("system") && !j.contains("kind")) return system_from_json(j["system"]);
  const auto& kind = field(j, "kind", "system");
  if (kind == "linear") {
    LinearModel m{matrix_from_json(field(j, "A", "system"), "A"),
                  matrix_from_json(field(j, "B", "system"), "B")};
    validate(m);
    return m;
  }
  if (kind == "pwa") {
    PwaModel m;
    const auto& modes = field(j, "modes", "system");
    if (!modes.is_array()) bad("system.modes: expected an array");
    for (std::size_t q = 0; q < modes.size(); ++q) {
      const std::string tag = "[mode " + std::to_string(q) + "]";
      const auto& mj = modes[q];
      PwaMode mode;
      mode.A = matrix_from_json(field(mj, "A", "mode"), "A" + tag);
      mode.B = matrix_from_json(field(mj, "B", "mode"), "B" + tag);
      if (mj.contains("g")) mode.g = vector_from_json(mj["g"], "g" + tag);
      if (mj.contains("guard")) {
        const auto& gj = mj["guard"];
        mode.guard.Hx = matrix_from_json(field(gj, "Hx", "guard"), "Hx" + tag);
        mode.guard.Hu = matrix_from_json(field(gj, "Hu", "guard"), "Hu" + tag);
        mode.guard.h = vector_from_json(field(gj, "h", "guard"), "h" + tag);
      }
      m.modes.push_back(std::move(mode));
    }
    validate(m);
    return m;
  }
  bad("system.kind must be \"linear\" or \"pwa\"");
}

Json system_to_json(const SystemModel& model) {
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    Json j = Json::object();
    j["kind"] = "linear";
    j["A"] = matrix_to_json(lin->A);
    j["B"] = matrix_to_json(lin->B);
    return j;
  }
  if (const auto* pwa = std::get_if<PwaModel>(&model)) {
    Json modes = Json::array();
    for (const auto& m : pwa->modes) {
      Json mj = Json::object();
      mj["A"] = matrix_to_json(m.A);
      mj["B"] = matrix_to_json(m.B);
      mj["g"] = vector_to_json(m.g.size() ? m.g : Vector::Zero(m.A.rows()));
      if (m.guard.h.size() > 0) {
        mj["guard"] = Json{{"Hx", matrix_to_json(m.guard.Hx)},
                           {"Hu", matrix_to_json(m.guard.Hu)},
                           {"h", vector_to_json(m.guard.h)}};
      }
      modes.push_back(std::move(mj));
    }
    return Json{{"kind", "pwa"}, {"modes", std::move(modes)}};
  }
  throw Error("invalid_argument", "differentiable models have no JSON form");
}

Json graph_to_json(const EquivalentGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back(Json{{"source", g.vertex_name(e.source)},
                         {"target", g.vertex_name(e.target)},
                         {"weight", e.weight}});
  }
  Json labels = Json::array();
  for (int j = 0; j < g.num_states(); ++j) labels.push_back(g.label(g.state_vertex(j)));
  return Json{{"n", g.num_states()},
              {"p", g.num_inputs()},
              {"edges", std::move(edges)},
              {"labels", std::move(labels)},
              {"signature", topology_signature(g).hex()}};
}

Json fsus_to_json(const FsuCollection& coll) {
  const auto& g = coll.graph();
  Json list = Json::array();
  for (const auto& f : coll.fsus()) {
    Json inputs = Json::array(), states = Json::array(), roots = Json::array(),
         names = Json::array();
    for (auto v : f.input_nodes) inputs.push_back(v);
    for (auto v : f.state_nodes) states.push_back(g.state_index(v));
    for (auto v : f.root_states) roots.push_back(g.state_index(v));
    for (auto v : f.nodes()) names.push_back(g.vertex_name(v));
    list.push_back(Json{{"id", f.id},
                        {"inputs", std::move(inputs)},
                        {"states", std::move(states)},
                        {"roots", std::move(roots)},
                        {"nodes", std::move(names)}});
  }
  return Json{{"n_fsu", coll.size()}, {"fsus", std::move(list)},
              {"condensed", matrix_to_json(coll.condensed())}};
}

FsuCollection fsus_from_json(const Json& j, std::shared_ptr<const EquivalentGraph> g) {
  const auto& list = field(j, "fsus", "fsus file");
  std::vector<std::vector<VertexId>> sets;
  for (const auto& f : list) {
    std::vector<VertexId> nodes;
    for (const auto& i : field(f, "inputs", "fsu")) nodes.push_back(static_cast<int>(integer(i, "inputs")));
    for (const auto& s : field(f, "states", "fsu")) {
      nodes.push_back(g->state_vertex(static_cast<int>(integer(s, "states"))));
    }
    sets.push_back(std::move(nodes));
  }
  auto coll = FsuCollection::from_node_sets(std::move(g), sets);
  if (!coll.complete()) bad("fsus file does not cover every state");
  return coll;
}

Json partition_to_json(const Partition& p) {
  Json blocks = Json::array();
  for (const auto& b : p.blocks()) blocks.push_back(b);
  const auto& c = p.components();
  return Json{{"blocks", std::move(blocks)},
              {"n_blocks", p.size()},
              {"n_fsu", p.source().size()},
              {"w_intra", c.intra},
              {"w_inter", c.inter},
              {"w_size", c.size}};
}

Blocks blocks_from_json(const Json& j) {
  const auto& arr = j.is_array() ? j : field(j, "blocks", "partition");
  if (!arr.is_array()) bad("partition.blocks: expected an array");
  Blocks out;
  for (const auto& b : arr) {
    if (!b.is_array()) bad("partition.blocks: each block is an array of FSU ids");
    std::vector<int> ids;
    for (const auto& f : b) ids.push_back(static_cast<int>(integer(f, "block")));
    out.push_back(std::move(ids));
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("invalid_json", path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  out << text;
  if (!out) throw Error("io", "write failed for " + path);
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", w);
  return buf;
}

std::string to_dot(const EquivalentGraph& g, const DotOptions& opts) {
  std::ostringstream os;
  os << "digraph G {\n";
  os << "  node [style=filled];\n";
  auto node = [&](VertexId v, const std::string& indent) {
    const bool input = g.is_input(v);
    os << indent << g.vertex_name(v) << " [fillcolor=" << (input ? "red" : "cyan")
       << (input ? ", shape=box" : ", shape=circle") << "];\n";
  };
  auto fsu_cluster = [&](int id, const std::string& indent) {
    os << indent << "subgraph cluster_fsu" << id + 1 << " {\n";
    os << indent << "  label=\"A" << id + 1 << "\";\n";
    for (auto v : (*opts.fsus)[id].nodes()) node(v, indent + "  ");
    os << indent << "}\n";
  };
  if (opts.partition) {
    const auto& p = *opts.partition;
    for (std::size_t b = 0; b < p.size(); ++b) {
      os << "  subgraph cluster_csu" << b + 1 << " {\n";
      os << "    label=\"S" << b + 1 << "\";\n    style=dashed;\n";
      for (int f : p.blocks()[b]) {
        if (opts.fsus) {
          fsu_cluster(f, "    ");
        } else {
          for (auto v : p.source()[f].nodes()) node(v, "    ");
        }
      }
      os << "  }\n";
    }
  } else if (opts.fsus) {
    for (std::size_t f = 0; f < opts.fsus->size(); ++f) fsu_cluster(static_cast<int>(f), "  ");
    for (auto v : opts.fsus->unassigned()) node(v, "  ");
  } else {
    for (VertexId v = 0; v < g.num_vertices(); ++v) node(v, "  ");
  }
  for (const auto& e : g.edges()) {
    os << "  " << g.vertex_name(e.source) << " -> " << g.vertex_name(e.target) << " [label=\""
       << format_weight(e.weight) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace fsupart
