#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace geomatch {

// Base class for every error the library throws on its own behalf.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched base points, incompatible curves, invalid arguments.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// A tangent vector leaves the injectivity domain of the exponential map.
class InjectivityError : public Error {
 public:
  explicit InjectivityError(const std::string& what) : Error(what) {}
};

// log/transport requested between points with no unique connecting geodesic.
class NonUniqueGeodesicError : public Error {
 public:
  explicit NonUniqueGeodesicError(const std::string& what) : Error(what) {}
};

// Two consecutive curve points coincide while strict edge mode is active.
class DegenerateEdgeError : public Error {
 public:
  explicit DegenerateEdgeError(const std::string& what) : Error(what) {}
};

// A linear system required by a solver is numerically singular.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double rcond)
      : Error(what + " (rcond estimate " + format_rcond(rcond) + ")"),
        rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  static std::string format_rcond(double rcond) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", rcond);
    return buf;
  }

  double rcond_ = 0.0;
};

// Iterative solver moved away from the target repeatedly.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> gap_history)
      : Error(what), gap_history_(std::move(gap_history)) {}
  const std::vector<double>& gap_history() const { return gap_history_; }

 private:
  std::vector<double> gap_history_;
};

// Reparameterization lost monotonicity beyond the repairable tolerance.
class MonotonicityError : public Error {
 public:
  explicit MonotonicityError(const std::string& what) : Error(what) {}
};

// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string file, long line)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(-1) {}
  const std::string& file() const { return file_; }
  long line() const { return line_; }

 private:
  std::string file_;
  long line_ = -1;
};

}  // namespace geomatch
