#include "pathprice/theory.hpp"

#include <array>
#include <limits>
#include <ostream>
#include <utility>

#include "pathprice/errors.hpp"

namespace pathprice {

namespace {

constexpr std::array<std::pair<BoundFamily, const char*>, 6> kNames{{
    {BoundFamily::LineUniform, "line_uniform"},
    {BoundFamily::LineHetero, "line_hetero"},
    {BoundFamily::TreeSRUniform, "tree_sr_uniform"},
    {BoundFamily::TreeSRExpDecay, "tree_sr_expdecay"},
    {BoundFamily::TreeELUniform, "tree_el_uniform"},
    {BoundFamily::TreeELExpDecay, "tree_el_expdecay"},
}};

}  // namespace

std::string to_string(BoundFamily f) {
  for (const auto& [fam, name] : kNames)
    if (fam == f) return name;
  return "unknown";
}

BoundFamily bound_family_from_string(const std::string& name) {
  for (const auto& [fam, n] : kNames)
    if (name == n) return fam;
  throw ValidationError("unknown bound family '" + name + "'");
}

void check_bound_params(const BoundParams& p) {
  if (p.m < 1 || p.M < p.m) throw ValidationError("need M >= m >= 1");
  if (!(p.p_bar >= 1.0)) throw ValidationError("need p_bar >= 1");
  if (!(p.beta >= 1.0)) throw ValidationError("need beta >= 1");
  if (!(p.gamma > 0.0)) throw ValidationError("need gamma > 0");
}

double evaluate_bound(BoundFamily family, const BoundParams& p) {
  check_bound_params(p);
  switch (family) {
    case BoundFamily::LineUniform: return cr_line_uniform(p.gamma, p.M, p.m, p.p_bar);
    case BoundFamily::LineHetero: return cr_line_hetero(p.gamma, p.M, p.m, p.p_bar, p.beta);
    case BoundFamily::TreeSRUniform: return cr_tree_sr(p.gamma, p.M, p.m, p.p_bar, TreeProfile::Uniform);
    case BoundFamily::TreeSRExpDecay:
      return cr_tree_sr(p.gamma, p.M, p.m, p.p_bar, TreeProfile::ExpDecay, p.level_range);
    case BoundFamily::TreeELUniform: return cr_tree_el(p.gamma, p.M, p.m, p.p_bar, TreeProfile::Uniform);
    case BoundFamily::TreeELExpDecay: return cr_tree_el(p.gamma, p.M, p.m, p.p_bar, TreeProfile::ExpDecay);
  }
  throw ValidationError("unknown bound family");
}

void write_bound_curve_csv(std::ostream& out, BoundFamily family, const BoundParams& base,
                           const std::vector<double>& gammas) {
  out << "family,M,m,p_bar,beta,gamma,bound\n";
  out.precision(12);
  for (double g : gammas) {
    BoundParams p = base;
    p.gamma = g;
    out << to_string(family) << ',' << p.M << ',' << p.m << ',' << p.p_bar << ',' << p.beta << ',' << g << ','
        << evaluate_bound(family, p) << '\n';
  }
}

GammaMinimum minimize_over_gamma(BoundFamily family, const BoundParams& base, const std::vector<double>& gammas) {
  GammaMinimum best{0.0, std::numeric_limits<double>::infinity()};
  for (double g : gammas) {
    BoundParams p = base;
    p.gamma = g;
    const double v = evaluate_bound(family, p);
    if (v < best.bound) best = {g, v};
  }
  return best;
}

}  // namespace pathprice
