#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "fsupart/fsu.hpp"
#include "fsupart/metrics.hpp"
#include "fsupart/system.hpp"

namespace fsupart {

using Json = nlohmann::json;

// Dense [[...], ...] or {"triplets": [[row, col, val], ...], "rows": r,
// "cols": c}. `name` appears in error messages.
Matrix matrix_from_json(const Json& j, const std::string& name);
Vector vector_from_json(const Json& j, const std::string& name);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

// {"kind": "linear", "A": ..., "B": ...} or {"kind": "pwa", "modes": [...]}.
SystemModel system_from_json(const Json& j);
// Fixed key order; differentiable models cannot be serialized.
Json system_to_json(const SystemModel& model);

Json graph_to_json(const EquivalentGraph& g);

// Vertex ids per FSU plus the condensed matrix.
Json fsus_to_json(const FsuCollection& coll);
FsuCollection fsus_from_json(const Json& j, std::shared_ptr<const EquivalentGraph> g);

Json partition_to_json(const Partition& p);
Blocks blocks_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

struct DotOptions {
  const FsuCollection* fsus = nullptr;  // groups vertices per FSU
  const Partition* partition = nullptr; // groups FSUs per CSU
};

// Inputs u1..up in red, states x1..xn in cyan, edges labelled with the
// weight to 6 significant digits.
std::string to_dot(const EquivalentGraph& g, const DotOptions& opts = {});

// %.6g
std::string format_weight(double w);

}  // namespace fsupart
