#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "graphell/graph.hpp"
#include "graphell/solvers.hpp"
#include "graphell/spectral.hpp"

namespace graphell {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers; everything else as "inf", "-inf" or "nan".
Json json_number(double v);
/// Object keyed by vertex id in domain order.
Json json_vertex_fn(const DomainDecomp& dom, const VertexFn& u);

Json to_json(const DomainDecomp& dom, const Solution& s);
Json to_json(const DomainDecomp& dom, const SolveReport& r);
Json to_json(const Hypotheses& h);
Json to_json(const SolverTrace& t);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace graphell
