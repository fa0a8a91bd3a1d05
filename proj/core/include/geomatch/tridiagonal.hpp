#pragma once

#include <vector>

namespace geomatch {

// Solves a tridiagonal system by Gaussian elimination with partial pivoting
// (one fill-in superdiagonal, gtsv style). Row i reads
//   lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1} = rhs[i],
// with lower[0] and upper[N-1] ignored. Throws SingularSystemError when a
// pivot falls below 1e-14 times the largest input magnitude.
std::vector<double> solve_tridiagonal(std::vector<double> lower,
                                      std::vector<double> diag,
                                      std::vector<double> upper,
                                      std::vector<double> rhs);

}  // namespace geomatch
