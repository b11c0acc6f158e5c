#include "graphell/documents.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphell/error.hpp"

namespace graphell {

namespace {

using nlohmann::json;

double finite_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::ParseError, what + " must be finite");
  return d;
}

// Scalar or per-vertex map; returns an empty vector for scalars.
std::vector<double> vertex_values(const json& v, const DomainDecomp& dom, const std::string& what,
                                  double& scalar) {
  if (v.is_number()) {
    scalar = finite_number(v, what);
    return {};
  }
  if (!v.is_object()) throw Error(ErrorCode::ParseError, what + " must be a number or an id map");
  std::vector<double> out(dom.size(), 0.0);
  const WeightedGraph& g = dom.graph();
  for (const auto& [id, val] : v.items()) {
    if (!g.contains(id)) throw Error(ErrorCode::UnknownVertex, what + " names unknown vertex '" + id + "'");
    const double d = finite_number(val, what + "['" + id + "']");
    if (auto local = dom.local_of_global(g.index_of(id))) out[*local] = d;
  }
  scalar = 0.0;
  return out;
}

Term parse_term(const json& t, const DomainDecomp& dom) {
  if (!t.is_object()) throw Error(ErrorCode::ParseError, "f.terms entries must be objects");
  if (!t.contains("kind") || !t.at("kind").is_string()) throw Error(ErrorCode::ParseError, "term needs a 'kind'");
  if (!t.contains("c")) throw Error(ErrorCode::ParseError, "term needs a coefficient 'c'");
  Term term;
  term.c.per_vertex = vertex_values(t.at("c"), dom, "c", term.c.scalar);
  const std::string kind = t.at("kind").get<std::string>();
  if (kind == "pow") {
    if (!t.contains("k") || !t.at("k").is_number_integer()) throw Error(ErrorCode::ParseError, "pow term needs integer 'k'");
    term.kind = Term::Kind::IntegerPower;
    term.k = t.at("k").get<int>();
    if (term.k < 0) throw Error(ErrorCode::ParseError, "pow exponent k must be nonnegative");
  } else if (kind == "spow") {
    if (!t.contains("q")) throw Error(ErrorCode::ParseError, "spow term needs 'q'");
    term.kind = Term::Kind::SignedPower;
    term.q = finite_number(t.at("q"), "q");
    if (!(term.q > 1.0)) throw Error(ErrorCode::ParseError, "spow exponent q must exceed 1");
  } else {
    throw Error(ErrorCode::ParseError, "unknown term kind '" + kind + "'");
  }
  return term;
}

}  // namespace

ProblemDocument parse_problem_document(const json& doc, const DomainDecomp& dom) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "problem document must be an object");
  ProblemDocument p;
  p.alpha.assign(dom.size(), 0.0);
  if (doc.contains("alpha")) {
    double scalar = 0.0;
    auto values = vertex_values(doc.at("alpha"), dom, "alpha", scalar);
    p.alpha = values.empty() ? std::vector<double>(dom.size(), scalar) : std::move(values);
  }
  if (doc.contains("lambda")) {
    p.lambda = finite_number(doc.at("lambda"), "lambda");
    if (!(p.lambda > 0.0)) throw Error(ErrorCode::ParseError, "lambda must be positive");
  }
  if (!doc.contains("f") || !doc.at("f").is_object()) throw Error(ErrorCode::ParseError, "problem needs an 'f' object");
  const json& f = doc.at("f");
  if (!f.contains("terms") || !f.at("terms").is_array()) throw Error(ErrorCode::ParseError, "f needs a 'terms' array");
  std::vector<Term> terms;
  for (const auto& t : f.at("terms")) terms.push_back(parse_term(t, dom));
  p.f = Nonlinearity(std::move(terms));
  if (f.contains("ar")) {
    const json& ar = f.at("ar");
    if (!ar.is_object() || !ar.contains("beta") || !ar.contains("r0")) {
      throw Error(ErrorCode::ParseError, "f.ar needs 'beta' and 'r0'");
    }
    const double beta = finite_number(ar.at("beta"), "ar.beta");
    const double r0 = finite_number(ar.at("r0"), "ar.r0");
    if (!(r0 > 0.0)) throw Error(ErrorCode::ParseError, "ar.r0 must be positive");
    p.f.set_ar(beta, r0);
  }
  if (doc.contains("order")) {
    const json& o = doc.at("order");
    if (!o.is_object() || !o.contains("m") || !o.at("m").is_number_integer() || !o.contains("p")) {
      throw Error(ErrorCode::ParseError, "order needs integer 'm' and numeric 'p'");
    }
    const auto m = o.at("m").get<long long>();
    if (m < 1) throw Error(ErrorCode::ParseError, "order.m must be positive");
    p.order_m = static_cast<std::size_t>(m);
    p.order_p = finite_number(o.at("p"), "order.p");
    if (!(*p.order_p > 1.0)) throw Error(ErrorCode::ParseError, "order.p must exceed 1");
  }
  if (doc.contains("rho")) {
    p.rho = finite_number(doc.at("rho"), "rho");
    if (!(*p.rho > 0.0)) throw Error(ErrorCode::ParseError, "rho must be positive");
  }
  return p;
}

ProblemDocument load_problem(std::string_view text, const DomainDecomp& dom) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_problem_document(doc, dom);
}

ProblemDocument load_problem_file(const std::string& path, const DomainDecomp& dom) {
  return load_problem(read_text(path), dom);
}

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace graphell
