#include "graphell/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphell/error.hpp"

namespace graphell {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::AsymmetricWeight: return "AsymmetricWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::UnknownVertex: return "UnknownVertex";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::BoundaryDesignation: return "BoundaryDesignation";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::VertexOutsideDomain: return "VertexOutsideDomain";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::TrivialConstraintClass: return "TrivialConstraintClass";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidAlphaRegime: return "InvalidAlphaRegime";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoInteriorMinimizer: return "NoInteriorMinimizer";
    case ErrorCode::OnlyTrivialFound: return "OnlyTrivialFound";
    case ErrorCode::NegativePartNonzero: return "NegativePartNonzero";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::ZeroSlopeSingularity: return "ZeroSlopeSingularity";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

WeightedGraph::WeightedGraph(std::vector<std::string> ids, std::vector<double> mu,
                             const std::vector<EdgeInput>& edges)
    : ids_(std::move(ids)), mu_(std::move(mu)) {
  if (ids_.size() != mu_.size()) {
    throw Error(ErrorCode::ParseError, "vertex ids and measures differ in length");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::ParseError, "duplicate vertex id '" + ids_[i] + "'");
    }
    if (!std::isfinite(mu_[i]) || !(mu_[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveMeasure, "mu(" + ids_[i] + ") must be positive");
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, double> stored;
  for (const auto& e : edges) {
    if (!std::isfinite(e.w)) throw Error(ErrorCode::ParseError, "non-finite edge weight");
    if (e.w < 0.0) {
      throw Error(ErrorCode::NegativeWeight, "w(" + e.a + "," + e.b + ") < 0");
    }
    const std::size_t a = index_of(e.a);
    const std::size_t b = index_of(e.b);
    if (a == b) throw Error(ErrorCode::SelfLoop, "edge (" + e.a + "," + e.a + ")");
    const auto key = std::minmax(a, b);
    auto [it, inserted] = stored.emplace(key, e.w);
    if (!inserted && it->second != e.w) {
      throw Error(ErrorCode::AsymmetricWeight,
                  "w(" + e.a + "," + e.b + ") given twice with different values");
    }
  }

  adjacency_.resize(ids_.size());
  for (const auto& [key, w] : stored) {
    if (w == 0.0) continue;
    adjacency_[key.first].push_back({key.second, w});
    adjacency_[key.second].push_back({key.first, w});
    ++edge_count_;
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Neighbor& l, const Neighbor& r) { return l.index < r.index; });
  }
}

std::size_t WeightedGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownVertex, "'" + std::string(id) + "'");
  }
  return it->second;
}

bool WeightedGraph::contains(std::string_view id) const {
  return index_.count(std::string(id)) != 0;
}

double WeightedGraph::weight(std::size_t i, std::size_t j) const {
  for (const auto& n : neighbors(i)) {
    if (n.index == j) return n.weight;
  }
  return 0.0;
}

double WeightedGraph::degree(std::size_t i) const {
  if (i >= size()) throw Error(ErrorCode::UnknownVertex, "index " + std::to_string(i));
  double sum = 0.0;
  for (const auto& n : adjacency_[i]) sum += n.weight;
  return sum;
}

std::optional<std::size_t> path_distance(const WeightedGraph& g, std::size_t x, std::size_t y) {
  if (x >= g.size() || y >= g.size()) {
    throw Error(ErrorCode::UnknownVertex, "index out of range");
  }
  if (x == y) return 0;
  std::vector<std::size_t> dist(g.size(), DomainDecomp::npos);
  std::queue<std::size_t> frontier;
  dist[x] = 0;
  frontier.push(x);
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (const auto& n : g.neighbors(v)) {
      if (dist[n.index] != DomainDecomp::npos) continue;
      dist[n.index] = dist[v] + 1;
      if (n.index == y) return dist[n.index];
      frontier.push(n.index);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> path_distance(const WeightedGraph& g, std::string_view x,
                                         std::string_view y) {
  return path_distance(g, g.index_of(x), g.index_of(y));
}

std::size_t DomainDecomp::local_index(std::string_view id) const {
  if (!graph_->contains(id)) throw Error(ErrorCode::UnknownVertex, "'" + std::string(id) + "'");
  auto local = local_of_global(graph_->index_of(id));
  if (!local) throw Error(ErrorCode::VertexOutsideDomain, "'" + std::string(id) + "'");
  return *local;
}

std::optional<std::size_t> DomainDecomp::local_of_global(std::size_t global) const {
  auto it = local_.find(global);
  if (it == local_.end()) return std::nullopt;
  return it->second;
}

double DomainDecomp::degree_in_domain(std::size_t local) const {
  double sum = 0.0;
  for (const auto& n : neighbors(local)) sum += n.weight;
  return sum;
}

DomainDecomp decompose_domain(GraphPtr g, const std::vector<std::string>& members,
                              const std::optional<std::vector<std::string>>& designated_boundary) {
  if (!g) throw Error(ErrorCode::InvalidArgument, "null graph");
  if (members.empty()) throw Error(ErrorCode::EmptyInterior, "empty domain");

  DomainDecomp dom;
  dom.graph_ = g;
  std::vector<std::size_t> globals;
  globals.reserve(members.size());
  for (const auto& id : members) globals.push_back(g->index_of(id));
  std::sort(globals.begin(), globals.end());
  if (std::adjacent_find(globals.begin(), globals.end()) != globals.end()) {
    throw Error(ErrorCode::ParseError, "domain lists a vertex twice");
  }
  dom.members_ = globals;
  for (std::size_t l = 0; l < globals.size(); ++l) dom.local_.emplace(globals[l], l);

  const std::size_t n = globals.size();
  dom.adjacency_.resize(n);
  dom.mu_.resize(n);
  std::vector<char> computed(n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    dom.mu_[l] = g->mu(globals[l]);
    for (const auto& nb : g->neighbors(globals[l])) {
      auto other = dom.local_of_global(nb.index);
      if (other) {
        dom.adjacency_[l].push_back({*other, nb.weight});
      } else {
        computed[l] = 1;
      }
    }
  }

  dom.boundary_flag_ = computed;
  if (designated_boundary) {
    std::vector<char> designated(n, 0);
    for (const auto& id : *designated_boundary) designated[dom.local_index(id)] = 1;
    for (std::size_t l = 0; l < n; ++l) {
      if (computed[l] && !designated[l]) {
        throw Error(ErrorCode::BoundaryDesignation,
                    "vertex '" + dom.id(l) + "' has outside neighbors but is not designated boundary");
      }
    }
    dom.boundary_flag_ = designated;
    dom.explicit_boundary_ = true;
  }

  dom.interior_pos_.assign(n, DomainDecomp::npos);
  for (std::size_t l = 0; l < n; ++l) {
    if (dom.boundary_flag_[l]) {
      dom.boundary_.push_back(l);
    } else {
      dom.interior_pos_[l] = dom.interior_.size();
      dom.interior_.push_back(l);
    }
  }
  if (dom.interior_.empty()) throw Error(ErrorCode::EmptyInterior, "domain has no interior vertex");
  if (dom.boundary_.empty()) throw Error(ErrorCode::EmptyBoundary, "domain has no boundary vertex");

  // Interior vertices see only D.
  for (std::size_t l : dom.interior_) {
    if (g->neighbors(globals[l]).size() != dom.adjacency_[l].size()) {
      throw Error(ErrorCode::BoundaryDesignation, "interior vertex with outside neighbor");
    }
  }

  // Connectivity of the induced subgraph.
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  seen[0] = 1;
  frontier.push(0);
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (const auto& nb : dom.adjacency_[v]) {
      if (!seen[nb.index]) {
        seen[nb.index] = 1;
        ++reached;
        frontier.push(nb.index);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorCode::DisconnectedDomain,
                std::to_string(n - reached) + " vertices unreachable inside the domain");
  }

  dom.csr_.mu = dom.mu_;
  dom.csr_.offsets.assign(n + 1, 0);
  for (std::size_t l = 0; l < n; ++l) {
    dom.csr_.offsets[l + 1] = dom.csr_.offsets[l] + dom.adjacency_[l].size();
    for (const auto& nb : dom.adjacency_[l]) {
      dom.csr_.cols.push_back(nb.index);
      dom.csr_.weights.push_back(nb.weight);
    }
  }

  dom.volume_ = 0.0;
  dom.mu0_ = dom.mu_.front();
  for (double m : dom.mu_) {
    dom.volume_ += m;
    dom.mu0_ = std::min(dom.mu0_, m);
  }
  return dom;
}

VertexFn::VertexFn(std::initializer_list<double> values) : values_(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index i = 0;
  for (double v : values) values_[i++] = v;
}

bool is_dirichlet_class(const DomainDecomp& dom, const VertexFn& u) {
  if (u.size() != dom.size()) return false;
  return std::all_of(dom.boundary().begin(), dom.boundary().end(),
                     [&](std::size_t l) { return u[l] == 0.0; });
}

VertexFn from_interior(const DomainDecomp& dom, const Eigen::VectorXd& interior_values) {
  if (static_cast<std::size_t>(interior_values.size()) != dom.interior().size()) {
    throw Error(ErrorCode::DomainMismatch, "interior vector has wrong length");
  }
  VertexFn u(dom.size());
  for (std::size_t k = 0; k < dom.interior().size(); ++k) {
    u[dom.interior()[k]] = interior_values[static_cast<Eigen::Index>(k)];
  }
  return u;
}

Eigen::VectorXd to_interior(const DomainDecomp& dom, const VertexFn& u) {
  if (u.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "function size mismatch");
  Eigen::VectorXd v(static_cast<Eigen::Index>(dom.interior().size()));
  for (std::size_t k = 0; k < dom.interior().size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = u[dom.interior()[k]];
  }
  return v;
}

double integrate(const DomainDecomp& dom, const VertexFn& u) {
  if (u.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "function size mismatch");
  double sum = 0.0;
  for (std::size_t l = 0; l < dom.size(); ++l) sum += dom.mu(l) * u[l];
  return sum;
}

namespace {

double number_field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number()) {
    throw Error(ErrorCode::ParseError, std::string("missing numeric field '") + key + "'");
  }
  return obj.at(key).get<double>();
}

std::string string_field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_string()) {
    throw Error(ErrorCode::ParseError, std::string("missing string field '") + key + "'");
  }
  return obj.at(key).get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw Error(ErrorCode::ParseError, std::string(what) + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

GraphDocument parse_graph_document(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc.at("vertices").is_array()) {
    throw Error(ErrorCode::ParseError, "graph document needs a 'vertices' array");
  }
  std::vector<std::string> ids;
  std::vector<double> mu;
  for (const auto& v : doc.at("vertices")) {
    ids.push_back(string_field(v, "id"));
    mu.push_back(number_field(v, "mu"));
  }
  std::vector<WeightedGraph::EdgeInput> edges;
  if (doc.contains("edges")) {
    if (!doc.at("edges").is_array()) throw Error(ErrorCode::ParseError, "'edges' must be an array");
    for (const auto& e : doc.at("edges")) {
      edges.push_back({string_field(e, "a"), string_field(e, "b"), number_field(e, "w")});
    }
  }

  GraphDocument out;
  out.graph = std::make_shared<const WeightedGraph>(ids, mu, edges);
  if (doc.contains("domain")) {
    const auto& d = doc.at("domain");
    if (!d.is_object()) throw Error(ErrorCode::ParseError, "'domain' must be an object");
    out.domain = d.contains("vertices") ? string_list(d.at("vertices"), "domain.vertices") : ids;
    if (d.contains("boundary")) out.boundary = string_list(d.at("boundary"), "domain.boundary");
  } else {
    out.domain = ids;
  }
  return out;
}

GraphDocument load_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_graph_document(doc);
}

GraphDocument load_graph_file(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return load_graph(text);
}

}  // namespace graphell
