// Copyright 2026 The oscmix Authors
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

namespace oscmix {

/// Base class for every failure the library reports. All validation happens
/// at construction of the domain types; computational hot paths assume valid
/// inputs and do not re-check.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

/// Carries the most negative eigenvalue as a diagnostic.
struct NotPositive : Error {
    NotPositive(const std::string &what, double min_eigenvalue)
        : Error(what), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

struct TraceNotOne : Error {
    using Error::Error;
};

struct NotNormalized : Error {
    using Error::Error;
};

struct DegenerateFrequencies : Error {
    using Error::Error;
};

struct NonFiniteSample : Error {
    using Error::Error;
};

struct OrthogonalPostselection : Error {
    using Error::Error;
};

/// A quadrature node landed on (or too close to) a vanishing post-selection
/// overlap. Callers may perturb the window, raise the node count, or switch
/// to a principal-value route.
struct PoleOnPath : Error {
    using Error::Error;
};

struct PoleAtPhase : Error {
    using Error::Error;
};

struct InsufficientSamples : Error {
    using Error::Error;
};

struct VanishingAmplitude : Error {
    using Error::Error;
};

struct GridOverflow : Error {
    using Error::Error;
};

struct NoSurvivors : Error {
    using Error::Error;
};

struct BinTooCoarse : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Aggregates every validation problem found in a config, not just the first.
class ValidationError : public Error {
  public:
    using Issue = std::pair<std::string, std::string>; // (key path, message)

    explicit ValidationError(std::vector<Issue> issues)
        : Error(join(issues)), issues_(std::move(issues)) {}

    ValidationError(std::string path, std::string message)
        : ValidationError(std::vector<Issue>{{std::move(path), std::move(message)}}) {}

    const std::vector<Issue> &issues() const { return issues_; }

  private:
    static std::string join(const std::vector<Issue> &issues) {
        std::string out = "config validation failed:";
        for (const auto &[path, msg] : issues) {
            out += "\n  " + path + ": " + msg;
        }
        return out;
    }

    std::vector<Issue> issues_;
};

} // namespace oscmix
