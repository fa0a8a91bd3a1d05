#include "geomatch/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "geomatch/errors.hpp"

namespace geomatch {

std::vector<double> solve_tridiagonal(std::vector<double> lower,
                                      std::vector<double> diag,
                                      std::vector<double> upper,
                                      std::vector<double> rhs) {
  const std::size_t N = diag.size();
  if (N == 0) return {};
  if (lower.size() != N || upper.size() != N || rhs.size() != N)
    throw DomainError("solve_tridiagonal: band and rhs sizes disagree");

  double scale = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    scale = std::max(scale, std::abs(diag[i]));
    if (i > 0) scale = std::max(scale, std::abs(lower[i]));
    if (i + 1 < N) scale = std::max(scale, std::abs(upper[i]));
  }
  if (scale == 0.0) throw SingularSystemError("solve_tridiagonal: zero matrix", 0.0);
  const double tiny = 1e-14 * scale;

  // fill[i] is the column i+2 entry of row i created by a row interchange.
  std::vector<double> fill(N, 0.0);
  upper[N - 1] = 0.0;

  for (std::size_t i = 0; i + 1 < N; ++i) {
    // Rows i and i+1 span columns i..i+2 as
    //   (diag[i], upper[i], fill[i]) and (lower[i+1], diag[i+1], upper[i+1]).
    if (std::abs(diag[i]) < std::abs(lower[i + 1])) {
      std::swap(diag[i], lower[i + 1]);
      std::swap(upper[i], diag[i + 1]);
      std::swap(fill[i], upper[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (std::abs(diag[i]) < tiny)
      throw SingularSystemError("solve_tridiagonal: pivot vanished at row " + std::to_string(i),
                                std::abs(diag[i]) / scale);
    const double mult = lower[i + 1] / diag[i];
    diag[i + 1] -= mult * upper[i];
    upper[i + 1] -= mult * fill[i];
    rhs[i + 1] -= mult * rhs[i];
  }
  if (std::abs(diag[N - 1]) < tiny)
    throw SingularSystemError("solve_tridiagonal: pivot vanished at last row",
                              std::abs(diag[N - 1]) / scale);

  std::vector<double> x(N);
  for (std::size_t r = N; r-- > 0;) {
    double acc = rhs[r];
    if (r + 1 < N) acc -= upper[r] * x[r + 1];
    if (r + 2 < N) acc -= fill[r] * x[r + 2];
    x[r] = acc / diag[r];
  }
  return x;
}

}  // namespace geomatch
