#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "storecast/copulas.hpp"

namespace storecast {

/// One fitted pair-copula edge. Variable indices refer to the original
/// pseudo-observation columns; conditioned_on lists the roots of earlier
/// trees (so an edge renders as "a,b|c,d").
struct PairCopula {
  CopulaFamily family = CopulaFamily::Independence;
  double rho = 0.0;
  double nu = 0.0;  // Student only
  double tau = 0.0;  // empirical Kendall's tau seen at fit time
  double loglik = 0.0;
  std::size_t var_a = 0;
  std::size_t var_b = 0;
  std::vector<std::size_t> conditioned_on;
};

/// Canonical vine: tree t pairs its root with every variable that remains,
/// so tree t holds d-1-t edges and the whole spec d(d-1)/2.
struct CVineSpec {
  std::vector<std::size_t> order;              // roots in tree order, last variable appended
  std::vector<std::vector<PairCopula>> trees;  // trees[t] edges, remaining vars ascending
  std::vector<double> tree1_taus;              // taus of the first tree's edges
};

/// Families the per-edge selection may pick. Independence is always in play
/// through the pre-test; if no parametric family is allowed an edge falls
/// back to Independence.
struct FamilySet {
  bool gaussian = true;
  bool student = true;
};

/// argmax over variables of the summed absolute Kendall's tau against all
/// others; ties go to the lowest column index.
std::size_t select_cvine_root(const PseudoObservations& u);

/// Sequential tree-by-tree fit: pick a root, fit each root edge by
/// pseudo-MLE with AIC family choice (Independence when the tau test
/// |tau|*sqrt(9n(n-1)/(2(2n+5))) stays under 1.96), h-transform the
/// remaining columns, recurse.
CVineSpec fit_cvine(const PseudoObservations& u, const FamilySet& allowed = {});

/// Conditional CDF h(u|v) = dC(u,v)/dv of the edge family.
double h_function(const PairCopula& pc, double u, double v);

/// u with h(u|v) = w; closed forms for all supported families.
double h_inverse(const PairCopula& pc, double w, double v);

/// Draw n observations by inverting h-functions along the vine;
/// deterministic per seed. Columns come back in original variable order.
PseudoObservations sample_cvine(const CVineSpec& spec, std::size_t n, std::uint64_t seed);

/// Tie-breaking jitter for discrete columns (binary Promo): adds seeded
/// uniform noise smaller than half the least gap between distinct values,
/// so cross-value order is preserved while ties break at random.
std::vector<double> jittered_ranks(const std::vector<double>& x, std::uint64_t seed);

}  // namespace storecast
