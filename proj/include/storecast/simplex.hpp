#pragma once

#include <functional>
#include <vector>

namespace storecast {

struct SimplexOptions {
  int max_iter = 500;
  double rel_tol = 1e-8;
  double initial_step = 0.1;
};

struct SimplexResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead downhill simplex. Non-finite objective values are treated as
/// +infinity so the simplex backs away from bad regions; if the best vertex
/// itself is non-finite the result carries fx = +inf and converged = false.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          const std::vector<double>& start,
                          const SimplexOptions& opts = {});

/// Run nelder_mead, then restart once from the found optimum with a smaller
/// step. Keeps whichever result is better.
SimplexResult nelder_mead_restarted(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& start, const SimplexOptions& opts = {});

}  // namespace storecast
