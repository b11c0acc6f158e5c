#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "graphell/graph.hpp"
#include "graphell/nonlinearity.hpp"

namespace graphell {

// Problem documents:
// {"alpha": num | {"id": num}, "lambda": num,
//  "f": {"terms": [{"c": num | {"id": num}, "kind": "pow", "k": int}
//                  | {"c": ..., "kind": "spow", "q": num}],
//        "ar": {"beta": num, "r0": num}},
//  "order": {"m": int, "p": num}, "rho": num}
// Per-vertex maps may omit vertices; omitted entries are 0. Ids outside the
// domain are ignored, ids unknown to the graph are rejected.
struct ProblemDocument {
  std::vector<double> alpha;  // on D, local order
  Nonlinearity f;
  double lambda = 1.0;
  std::optional<std::size_t> order_m;
  std::optional<double> order_p;
  std::optional<double> rho;
};

ProblemDocument parse_problem_document(const nlohmann::json& doc, const DomainDecomp& dom);
ProblemDocument load_problem(std::string_view text, const DomainDecomp& dom);
ProblemDocument load_problem_file(const std::string& path, const DomainDecomp& dom);

/// Reads a file, or standard input for "-". Failures are ParseError.
std::string read_text(const std::string& path);

}  // namespace graphell
