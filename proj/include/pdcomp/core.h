// Copyright 2026 The pdcomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDCOMP_CORE_H_
#define PDCOMP_CORE_H_

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "Eigen/Core"

namespace pdcomp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Extended-real values are plain doubles; +infinity marks points outside a
// domain (indicator functions).
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Product on [0, +inf] with the convention 0 * inf = 0.
inline double SaturatingProduct(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

// Sum on (-inf, +inf]; any +inf operand yields +inf.
inline double ExtendedSum(double a, double b) {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  return a + b;
}

inline bool AllFinite(const Vector& v) { return v.allFinite(); }

class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A theorem precondition on the problem constants or schedule parameters
// does not hold.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

class CheckFailedError : public std::runtime_error {
 public:
  explicit CheckFailedError(const std::string& what)
      : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline void RequireSize(const Vector& v, Eigen::Index n, const char* name) {
  if (v.size() != n) {
    throw InvalidInputError(std::string(name) + ": expected length " +
                            std::to_string(n) + ", got " +
                            std::to_string(v.size()));
  }
}

}  // namespace pdcomp

#endif  // PDCOMP_CORE_H_
