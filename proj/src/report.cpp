#include "graphell/report.hpp"

#include <cmath>

namespace graphell {

Json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json json_vertex_fn(const DomainDecomp& dom, const VertexFn& u) {
  Json out = Json::object();
  for (std::size_t x = 0; x < dom.size(); ++x) out[dom.id(x)] = json_number(u[x]);
  return out;
}

Json to_json(const DomainDecomp& dom, const Solution& s) {
  Json j;
  j["u"] = json_vertex_fn(dom, s.u);
  j["energy"] = json_number(s.energy);
  j["residual"] = json_number(s.classical_residual_max);
  j["norm_sq"] = json_number(s.alpha_norm_sq);
  if (s.in_ball) j["in_ball"] = *s.in_ball;
  j["sign"] = std::string(to_string(s.sign));
  j["positive"] = s.sign == SignProfile::Positive;
  j["trivial"] = s.trivial;
  return j;
}

namespace {

template <class T>
void put(Json& j, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, double>) {
    j[key] = json_number(*v);
  } else {
    j[key] = *v;
  }
}

}  // namespace

Json to_json(const Hypotheses& h) {
  Json j;
  j["alpha_regime"] = h.alpha_regime;
  j["explicit_boundary"] = h.explicit_boundary;
  j["f_vanishes_at_origin"] = h.f_vanishes_at_origin;
  put(j, "ar_sampled", h.ar_sampled);
  put(j, "ar_asymptotic", h.ar_asymptotic);
  put(j, "ar_one_sided", h.ar_one_sided);
  put(j, "ar_beta", h.ar_beta);
  put(j, "ar_r0", h.ar_r0);
  put(j, "f1l", h.f1l);
  put(j, "f1l_limit", h.f1l_limit);
  j["lambda_below_star"] = h.lambda_below_star;
  j["lambda_below_half_star"] = h.lambda_below_half_star;
  put(j, "rho", h.rho);
  put(j, "lambda_admissible_bound", h.lambda_admissible_bound);
  put(j, "lambda_in_admissible_interval", h.lambda_in_admissible_interval);
  put(j, "ps_radius", h.ps_radius);
  put(j, "gamma", h.gamma);
  put(j, "negative_part_norm_sq", h.negative_part_norm_sq);
  j["warnings"] = h.warnings;
  return j;
}

Json to_json(const SolverTrace& t) {
  Json j;
  j["mode"] = t.mode;
  j["restarts"] = t.restarts;
  j["iterations"] = t.iterations;
  j["converged"] = t.converged;
  j["failed"] = t.failed;
  j["duplicates"] = t.duplicates;
  j["deflations"] = t.deflations;
  j["start_radius"] = json_number(t.start_radius);
  return j;
}

Json to_json(const DomainDecomp& dom, const SolveReport& r) {
  Json j;
  j["schema"] = 1;
  j["seed"] = r.seed;
  j["lambda"] = json_number(r.lambda_used);
  j["lambda_star"] = json_number(r.lambda_star);
  if (r.order_m) {
    Json o;
    o["m"] = *r.order_m;
    put(o, "p", r.order_p);
    put(o, "lambda_mp", r.lambda_mp);
    j["order"] = o;
  }
  j["n_solutions"] = r.solutions.size();
  Json sols = Json::array();
  for (const auto& s : r.solutions) sols.push_back(to_json(dom, s));
  j["solutions"] = sols;
  j["hypotheses"] = to_json(r.hypotheses);
  j["trace"] = to_json(r.trace);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace graphell
