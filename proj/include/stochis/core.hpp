// Copyright 2026 The stochis Authors.
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

#ifndef STOCHIS_CORE_HPP
#define STOCHIS_CORE_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <stochis/rng.hpp>

/**
 * \file
 * \brief Configurations, densities, stochastic simulators and outcome functions.
 */

namespace stochis {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual);
};

/// An input configuration x in R^d.
class ConfigPoint {
 public:
  ConfigPoint() = default;
  explicit ConfigPoint(std::vector<double> coords) : coords_{std::move(coords)} {}
  ConfigPoint(std::initializer_list<double> coords) : coords_{coords} {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& values() const { return coords_; }

  /// True when every coordinate is finite.
  bool finite() const;

  friend bool operator==(const ConfigPoint&, const ConfigPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Closed interval, possibly with infinite ends.
struct Interval {
  double lo;
  double hi;
};

/// Axis-aligned box (or product of half-lines) containing the support of a density.
struct Support {
  std::vector<Interval> axes;

  std::size_t dim() const { return axes.size(); }
  bool contains(const ConfigPoint& x) const;
  bool bounded() const;
};

namespace density {

struct StandardNormal {
  std::size_t dim;
};

/// Independent exponentials with a common rate.
struct ProductExponential {
  std::size_t dim;
  double rate;
};

struct ProductUniform {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Rayleigh with scale `sigma` restricted to [lo, hi]; one-dimensional.
struct TruncatedRayleigh {
  double sigma;
  double lo;
  double hi;
};

}  // namespace density

/// Evaluable and sampleable probability density. Immutable after construction.
class Density {
 public:
  using Params = std::variant<density::StandardNormal, density::ProductExponential, density::ProductUniform,
                              density::TruncatedRayleigh>;

  explicit Density(Params params);

  static Density standard_normal(std::size_t dim);
  static Density exponential(std::size_t dim, double rate);
  static Density uniform(std::vector<double> lo, std::vector<double> hi);
  static Density uniform_cube(std::size_t dim, double lo, double hi);
  static Density truncated_rayleigh(double sigma, double lo, double hi);

  std::size_t dim() const { return dim_; }
  const Support& support() const { return support_; }
  const Params& params() const { return params_; }
  std::string_view kind() const;

  /// log p(x); -inf outside the support. No dimension check.
  double log_pdf(std::span<const double> x) const;
  double log_pdf(const ConfigPoint& x) const { return log_pdf(x.coords()); }

  ConfigPoint sample(Rng& rng) const;

 private:
  Params params_;
  std::size_t dim_;
  Support support_;
};

/// p(x), checking dimensions. Zero outside the support.
double eval_pdf(const Density& density, const ConfigPoint& x);

/// `count` i.i.d. draws.
std::vector<ConfigPoint> sample_density(const Density& density, Rng& rng, std::size_t count);

/// Black-box stochastic simulator: x -> one random draw of V(x).
class StochasticModel {
 public:
  using DrawFn = std::function<double(const ConfigPoint&, Rng&)>;

  StochasticModel(std::string name, std::size_t dim, DrawFn draw);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  double draw(const ConfigPoint& x, Rng& rng) const { return draw_(x, rng); }

 private:
  std::string name_;
  std::size_t dim_;
  DrawFn draw_;
};

/// Mean of V|x in the normal-normal model (a modified Ackley function).
double ackley_mean(std::span<const double> x);

/// V | x ~ N(ackley_mean(x), 1).
StochasticModel normal_normal_model(std::size_t dim);
/// V | x ~ Exp(rate = x_1 + ... + x_d).
StochasticModel exp_exp_model(std::size_t dim);
/// V = f(x) with no noise.
StochasticModel deterministic_model(std::size_t dim, std::function<double(const ConfigPoint&)> f);

/// One draw of V(x), checking dimensions.
double simulate(const StochasticModel& model, const ConfigPoint& x, Rng& rng);

enum class OutcomeKind { indicator_above, identity };

/// The known function g applied to simulator output.
struct OutcomeSpec {
  OutcomeKind kind = OutcomeKind::identity;
  double threshold = 0.0;

  static OutcomeSpec indicator_above(double threshold) { return {OutcomeKind::indicator_above, threshold}; }
  static OutcomeSpec identity() { return {OutcomeKind::identity, 0.0}; }

  /// With an indicator g the target is a probability and r(x) lies in [0, 1].
  bool is_probability() const { return kind == OutcomeKind::indicator_above; }

  double operator()(double v) const;
};

/// g(v). The indicator is strict: 1 when v > threshold.
double outcome_g(const OutcomeSpec& spec, double v);

std::string_view to_string(OutcomeKind kind);

struct PilotRecord {
  ConfigPoint x;
  double v;
  double y;  ///< g(v)^2
  double log_q_at_x;
};

/// Pilot sample (x_i, y_i) used to fit the regression of g^2(V) on X.
class Dataset {
 public:
  explicit Dataset(std::size_t dim) : dim_{dim} {}
  Dataset(std::size_t dim, std::vector<PilotRecord> records);

  /// Builds records with y = g(v)^2 and log q evaluated by `q`.
  static Dataset from_draws(std::span<const ConfigPoint> xs, std::span<const double> vs, const OutcomeSpec& outcome,
                            const Density& q);

  void add(PilotRecord record);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<PilotRecord>& records() const { return records_; }
  const PilotRecord& operator[](std::size_t i) const { return records_[i]; }

 private:
  std::size_t dim_;
  std::vector<PilotRecord> records_;
};

}  // namespace stochis

#endif
