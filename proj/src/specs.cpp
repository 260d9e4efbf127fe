#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include "phsopt/costs.hpp"
#include "phsopt/graph.hpp"
#include "phsopt/integrators.hpp"

namespace phsopt {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

template <typename T>
T parse_number(const std::string& text, const std::string& context) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument(context + ": cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace

Graph parse_graph_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidArgument("empty graph spec");
  const std::string& kind = parts[0];
  if (kind == "er") {
    if (parts.size() != 4) throw InvalidArgument("graph spec 'er' expects er:N:p:seed");
    return erdos_renyi(parse_number<int>(parts[1], "graph size"),
                       parse_number<double>(parts[2], "edge probability"),
                       parse_number<std::uint64_t>(parts[3], "graph seed"));
  }
  if (parts.size() != 2) throw InvalidArgument("graph spec '" + spec + "' expects kind:N");
  const int n = parse_number<int>(parts[1], "graph size");
  if (kind == "cycle") return cycle(n);
  if (kind == "complete") return complete(n);
  if (kind == "star") return star(n);
  if (kind == "path") return path(n);
  throw InvalidArgument("unknown graph kind '" + kind + "'");
}

CostEnsemble<double> parse_cost_spec(const std::string& spec, int agents) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidArgument("empty cost spec");
  if (parts[0] == "quadratic") {
    if (parts.size() != 3) throw InvalidArgument("cost spec expects quadratic:m:seed");
    return random_quadratic_ensemble<double>(agents, parse_number<int>(parts[1], "dimension"),
                                             parse_number<std::uint64_t>(parts[2], "cost seed"));
  }
  if (parts[0] == "logistic") {
    if (parts.size() != 5) throw InvalidArgument("cost spec expects logistic:m:d:C:seed");
    return random_logistic_ensemble<double>(agents, parse_number<int>(parts[1], "dimension"),
                                            parse_number<int>(parts[2], "points per agent"),
                                            parse_number<double>(parts[3], "regularizer"),
                                            parse_number<std::uint64_t>(parts[4], "cost seed"));
  }
  throw InvalidArgument("unknown cost kind '" + parts[0] + "'");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Euler: return "euler";
    case SchemeKind::DiscreteGradientCentral: return "dg";
    case SchemeKind::Mid: return "mid";
    case SchemeKind::GradientTracking: return "gt";
  }
  throw InvalidArgument("unknown scheme kind");
}

Scheme parse_scheme_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  Scheme scheme;
  if (name == "euler") {
    scheme.kind = SchemeKind::Euler;
  } else if (name == "dg") {
    scheme.kind = SchemeKind::DiscreteGradientCentral;
  } else if (name == "mid") {
    scheme.kind = SchemeKind::Mid;
  } else if (name == "gt") {
    scheme.kind = SchemeKind::GradientTracking;
  } else {
    throw InvalidArgument("unknown scheme '" + name + "'");
  }
  if (colon == std::string::npos) return scheme;
  for (const auto& option : split(spec.substr(colon + 1), ',')) {
    const auto eq = option.find('=');
    if (eq == std::string::npos) throw InvalidArgument("scheme option '" + option + "' needs key=value");
    const std::string key = option.substr(0, eq);
    const std::string value = option.substr(eq + 1);
    if (key == "tau") {
      scheme.tau = parse_number<double>(value, "tau");
    } else if (key == "tol") {
      scheme.solver.residual_tolerance = parse_number<double>(value, "tol");
    } else if (key == "maxit") {
      scheme.solver.max_iterations = parse_number<int>(value, "maxit");
    } else {
      throw InvalidArgument("unknown scheme option '" + key + "'");
    }
  }
  scheme.validate();
  return scheme;
}

}  // namespace phsopt
