// Copyright 2026 The StsReach Authors
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

#ifndef STSREACH_ERRORS_HPP_
#define STSREACH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace stsreach {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// robot_model
class LinearSolveFailure : public Error {
 public:
  using Error::Error;
};

// motion_planning
class DomainError : public Error {
 public:
  using Error::Error;
};
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Raised by build_reference; carries the grid time at which planning failed.
class PlanningError : public Error {
 public:
  PlanningError(double time, const std::string& what)
      : Error("at t=" + std::to_string(time) + " s: " + what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// control_allocation
class Infeasible : public Error {
 public:
  using Error::Error;
};

// lqr_design
class BlowUp : public Error {
 public:
  using Error::Error;
};

// reachability
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// pipeline
class ParseError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised inside a pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace stsreach

#endif  // STSREACH_ERRORS_HPP_
