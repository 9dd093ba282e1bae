#ifndef PATHPRICE_TESTS_STATS_SUPPORT_HPP
#define PATHPRICE_TESTS_STATS_SUPPORT_HPP

#include <map>
#include <stdexcept>
#include <vector>

namespace pathprice::stats {

// Upper 1% points of the chi-square distribution for the degrees of freedom
// the generator checks use.
inline double chi2_critical_01(int df) {
  static const std::map<int, double> table{
      {1, 6.635}, {2, 9.210}, {3, 11.345}, {4, 13.277}, {5, 15.086}, {6, 16.812}, {7, 18.475},
      {9, 21.666}, {19, 36.191}, {49, 74.919},
  };
  auto it = table.find(df);
  if (it == table.end()) throw std::out_of_range("no chi-square table entry");
  return it->second;
}

inline double chi2_uniform(const std::vector<long>& counts) {
  long total = 0;
  for (long c : counts) total += c;
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (long c : counts) stat += (c - expected) * (c - expected) / expected;
  return stat;
}

}  // namespace pathprice::stats

#endif
