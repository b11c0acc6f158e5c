#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "graphell/kernels.hpp"

namespace graphell {

struct Neighbor {
  std::size_t index;
  double weight;
};

/// Finite weighted graph with a positive vertex measure. Vertices keep the
/// order in which they were declared; edges with zero weight are not stored,
/// so adjacency is exactly {y : w(x,y) > 0}.
class WeightedGraph {
 public:
  struct EdgeInput {
    std::string a;
    std::string b;
    double w;
  };

  /// Validates and symmetrizes. Both orientations of one edge may be given
  /// as long as they carry the same weight.
  WeightedGraph(std::vector<std::string> ids, std::vector<double> mu,
                const std::vector<EdgeInput>& edges);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::string& id(std::size_t i) const { return ids_.at(i); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  double mu(std::size_t i) const { return mu_.at(i); }
  std::span<const Neighbor> neighbors(std::size_t i) const { return adjacency_.at(i); }
  double weight(std::size_t i, std::size_t j) const;

  double degree(std::size_t i) const;
  double degree(std::string_view id) const { return degree(index_of(id)); }

 private:
  std::vector<std::string> ids_;
  std::vector<double> mu_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t edge_count_ = 0;
};

using GraphPtr = std::shared_ptr<const WeightedGraph>;

/// Hop distance along paths with positive weights; nullopt when x and y lie
/// in different components.
std::optional<std::size_t> path_distance(const WeightedGraph& g, std::size_t x, std::size_t y);
std::optional<std::size_t> path_distance(const WeightedGraph& g, std::string_view x,
                                         std::string_view y);

/// A bounded connected vertex set D together with its vertex boundary and
/// interior. All per-vertex data on D uses the local index 0..|D|-1, which
/// follows the graph's vertex order.
class DomainDecomp {
 public:
  std::size_t size() const noexcept { return members_.size(); }
  const WeightedGraph& graph() const noexcept { return *graph_; }
  const GraphPtr& graph_ptr() const noexcept { return graph_; }

  std::size_t global_index(std::size_t local) const { return members_.at(local); }
  std::size_t local_index(std::string_view id) const;
  std::optional<std::size_t> local_of_global(std::size_t global) const;
  const std::string& id(std::size_t local) const { return graph_->id(members_.at(local)); }

  bool is_boundary(std::size_t local) const { return boundary_flag_.at(local) != 0; }
  const std::vector<std::size_t>& boundary() const noexcept { return boundary_; }
  const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  /// Position of a local vertex in interior(), or npos for boundary vertices.
  std::size_t interior_position(std::size_t local) const { return interior_pos_.at(local); }

  double mu(std::size_t local) const { return mu_.at(local); }
  const std::vector<double>& measure() const noexcept { return mu_; }
  double volume() const noexcept { return volume_; }
  double mu0() const noexcept { return mu0_; }

  /// Neighbors inside D, in local indices.
  std::span<const Neighbor> neighbors(std::size_t local) const { return adjacency_.at(local); }
  /// Sum of weights to neighbors inside D.
  double degree_in_domain(std::size_t local) const;
  /// The same adjacency in compressed form, for the vertex kernels.
  const kernels::DomainCsr& csr() const noexcept { return csr_; }

  /// True when the document designated the boundary instead of it being the
  /// set of D-vertices with outside neighbors.
  bool explicit_boundary() const noexcept { return explicit_boundary_; }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  friend DomainDecomp decompose_domain(GraphPtr, const std::vector<std::string>&,
                                       const std::optional<std::vector<std::string>>&);

  GraphPtr graph_;
  std::vector<std::size_t> members_;
  std::unordered_map<std::size_t, std::size_t> local_;
  std::vector<char> boundary_flag_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> interior_pos_;
  std::vector<double> mu_;
  std::vector<std::vector<Neighbor>> adjacency_;
  kernels::DomainCsr csr_;
  double volume_ = 0.0;
  double mu0_ = 0.0;
  bool explicit_boundary_ = false;
};

/// Builds the decomposition of D. When `designated_boundary` is present it
/// replaces the computed boundary, which must be contained in it.
DomainDecomp decompose_domain(GraphPtr g, const std::vector<std::string>& members,
                              const std::optional<std::vector<std::string>>& designated_boundary =
                                  std::nullopt);

/// Real-valued function on D, indexed by local vertex index.
class VertexFn {
 public:
  VertexFn() = default;
  explicit VertexFn(std::size_t n, double value = 0.0) : values_(Eigen::VectorXd::Constant(n, value)) {}
  explicit VertexFn(Eigen::VectorXd values) : values_(std::move(values)) {}
  VertexFn(std::initializer_list<double> values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double sup_norm() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

 private:
  Eigen::VectorXd values_;
};

/// True when u vanishes exactly on the boundary of dom.
bool is_dirichlet_class(const DomainDecomp& dom, const VertexFn& u);

/// Embeds interior values (ordered as dom.interior()) into a VertexFn that is
/// zero on the boundary.
VertexFn from_interior(const DomainDecomp& dom, const Eigen::VectorXd& interior_values);
Eigen::VectorXd to_interior(const DomainDecomp& dom, const VertexFn& u);

/// Sum over D of mu(x) u(x).
double integrate(const DomainDecomp& dom, const VertexFn& u);

// Graph documents: {"vertices":[{"id","mu"}], "edges":[{"a","b","w"}],
// "domain":{"vertices":[...], "boundary":[...]}}.
struct GraphDocument {
  GraphPtr graph;
  std::vector<std::string> domain;
  std::optional<std::vector<std::string>> boundary;
};

GraphDocument parse_graph_document(const nlohmann::json& doc);
GraphDocument load_graph(std::string_view text);
GraphDocument load_graph_file(const std::string& path);

}  // namespace graphell
