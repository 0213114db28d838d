// Copyright 2026 The nvghz Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nvghz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A probe coincides with a nucleus; the dipole coefficients diverge.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// An evaluation point where the signal vanishes and f(tau) diverges.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Inputs for which the noise model is degenerate (zero variance).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// The dense simulator would exceed its configured dimension cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra failure (eigensolver, unitarity check).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its subdivision limit. Carries the best estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double est_error)
      : Error(what), best_estimate_(best_estimate), est_error_(est_error) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double est_error() const noexcept { return est_error_; }

 private:
  double best_estimate_;
  double est_error_;
};

/// The minimum of a bracketed scalar search sits on the bracket boundary.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, double boundary_point)
      : Error(what), boundary_point_(boundary_point) {}

  double boundary_point() const noexcept { return boundary_point_; }

 private:
  double boundary_point_;
};

/// Every start of a multi-start search failed.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Configuration could not be parsed or violates its invariants. `issues`
/// lists every violation found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += "; ";
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace nvghz
