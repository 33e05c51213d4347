// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: sensing performance analysis under random communication signaling
// Copyright (C) 2026 The isac-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isac {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// A matrix that must be inverted is rank deficient.
class SingularMatrix : public Error {
  public:
    using Error::Error;
};

/// The constraint set of an optimization problem is empty.
/// `achieved` carries the best attainable value when one is known
/// (for example the maximum rate of a link at the given power).
class Infeasible : public Error {
  public:
    explicit Infeasible(const std::string& what, std::optional<double> achieved = std::nullopt)
        : Error(what), achieved_(achieved) {}
    std::optional<double> achieved() const { return achieved_; }

  private:
    std::optional<double> achieved_;
};

/// An iterative solver stopped before meeting its tolerance.
class NotConverged : public Error {
  public:
    using Error::Error;
};

}  // namespace isac
