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

#include <stochis/core.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace stochis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool cond, const std::string& what) {
  if (!cond) {
    throw Error{what};
  }
}

std::size_t validate(const Density::Params& params) {
  return std::visit(
      Overloaded{
          [](const density::StandardNormal& p) {
            require(p.dim >= 1, "standard normal: dim must be >= 1");
            return p.dim;
          },
          [](const density::ProductExponential& p) {
            require(p.dim >= 1, "exponential: dim must be >= 1");
            require(std::isfinite(p.rate) && p.rate > 0.0, "exponential: rate must be positive");
            return p.dim;
          },
          [](const density::ProductUniform& p) {
            require(!p.lo.empty() && p.lo.size() == p.hi.size(), "uniform: bounds must be nonempty and equal length");
            for (std::size_t j = 0; j < p.lo.size(); ++j) {
              require(std::isfinite(p.lo[j]) && std::isfinite(p.hi[j]) && p.lo[j] < p.hi[j],
                      "uniform: need finite lo < hi on every axis");
            }
            return p.lo.size();
          },
          [](const density::TruncatedRayleigh& p) {
            require(std::isfinite(p.sigma) && p.sigma > 0.0, "truncated rayleigh: sigma must be positive");
            require(p.lo >= 0.0 && p.lo < p.hi && std::isfinite(p.hi), "truncated rayleigh: need 0 <= lo < hi < inf");
            return std::size_t{1};
          },
      },
      params);
}

Support support_of(const Density::Params& params) {
  return std::visit(Overloaded{
                        [](const density::StandardNormal& p) {
                          return Support{std::vector<Interval>(p.dim, Interval{-kInf, kInf})};
                        },
                        [](const density::ProductExponential& p) {
                          return Support{std::vector<Interval>(p.dim, Interval{0.0, kInf})};
                        },
                        [](const density::ProductUniform& p) {
                          Support s;
                          for (std::size_t j = 0; j < p.lo.size(); ++j) {
                            s.axes.push_back({p.lo[j], p.hi[j]});
                          }
                          return s;
                        },
                        [](const density::TruncatedRayleigh& p) { return Support{{Interval{p.lo, p.hi}}}; },
                    },
                    params);
}

// Rayleigh survival function exp(-x^2 / 2 sigma^2).
double rayleigh_survival(double x, double sigma) { return std::exp(-0.5 * (x / sigma) * (x / sigma)); }

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual)
    : Error{"dimension mismatch: expected " + std::to_string(expected) + ", got " + std::to_string(actual)} {}

bool ConfigPoint::finite() const {
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      return false;
    }
  }
  return true;
}

bool Support::contains(const ConfigPoint& x) const {
  if (x.dim() != axes.size()) {
    return false;
  }
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (x[j] < axes[j].lo || x[j] > axes[j].hi) {
      return false;
    }
  }
  return true;
}

bool Support::bounded() const {
  for (const auto& a : axes) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      return false;
    }
  }
  return true;
}

Density::Density(Params params) : params_{std::move(params)}, dim_{validate(params_)}, support_{support_of(params_)} {}

Density Density::standard_normal(std::size_t dim) { return Density{density::StandardNormal{dim}}; }

Density Density::exponential(std::size_t dim, double rate) { return Density{density::ProductExponential{dim, rate}}; }

Density Density::uniform(std::vector<double> lo, std::vector<double> hi) {
  return Density{density::ProductUniform{std::move(lo), std::move(hi)}};
}

Density Density::uniform_cube(std::size_t dim, double lo, double hi) {
  return uniform(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

Density Density::truncated_rayleigh(double sigma, double lo, double hi) {
  return Density{density::TruncatedRayleigh{sigma, lo, hi}};
}

std::string_view Density::kind() const {
  return std::visit(Overloaded{
                        [](const density::StandardNormal&) { return std::string_view{"normal"}; },
                        [](const density::ProductExponential&) { return std::string_view{"exponential"}; },
                        [](const density::ProductUniform&) { return std::string_view{"uniform"}; },
                        [](const density::TruncatedRayleigh&) { return std::string_view{"truncated_rayleigh"}; },
                    },
                    params_);
}

double Density::log_pdf(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [&](const density::StandardNormal& p) {
            double sq = 0.0;
            for (double c : x) {
              sq += c * c;
            }
            return -0.5 * static_cast<double>(p.dim) * std::log(2.0 * std::numbers::pi) - 0.5 * sq;
          },
          [&](const density::ProductExponential& p) {
            double sum = 0.0;
            for (double c : x) {
              if (c < 0.0) {
                return -kInf;
              }
              sum += c;
            }
            return static_cast<double>(p.dim) * std::log(p.rate) - p.rate * sum;
          },
          [&](const density::ProductUniform& p) {
            double lp = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
              if (x[j] < p.lo[j] || x[j] > p.hi[j]) {
                return -kInf;
              }
              lp -= std::log(p.hi[j] - p.lo[j]);
            }
            return lp;
          },
          [&](const density::TruncatedRayleigh& p) {
            const double v = x[0];
            if (v < p.lo || v > p.hi || v <= 0.0) {
              return -kInf;
            }
            const double mass = rayleigh_survival(p.lo, p.sigma) - rayleigh_survival(p.hi, p.sigma);
            return std::log(v) - 2.0 * std::log(p.sigma) - 0.5 * (v / p.sigma) * (v / p.sigma) - std::log(mass);
          },
      },
      params_);
}

ConfigPoint Density::sample(Rng& rng) const {
  return std::visit(Overloaded{
                        [&](const density::StandardNormal& p) {
                          std::vector<double> c(p.dim);
                          for (auto& v : c) {
                            v = rng.normal();
                          }
                          return ConfigPoint{std::move(c)};
                        },
                        [&](const density::ProductExponential& p) {
                          std::vector<double> c(p.dim);
                          for (auto& v : c) {
                            v = rng.exponential(p.rate);
                          }
                          return ConfigPoint{std::move(c)};
                        },
                        [&](const density::ProductUniform& p) {
                          std::vector<double> c(p.lo.size());
                          for (std::size_t j = 0; j < c.size(); ++j) {
                            c[j] = rng.uniform(p.lo[j], p.hi[j]);
                          }
                          return ConfigPoint{std::move(c)};
                        },
                        [&](const density::TruncatedRayleigh& p) {
                          const double s_lo = rayleigh_survival(p.lo, p.sigma);
                          const double s_hi = rayleigh_survival(p.hi, p.sigma);
                          const double s = s_lo - rng.uniform() * (s_lo - s_hi);
                          return ConfigPoint{{p.sigma * std::sqrt(-2.0 * std::log(s))}};
                        },
                    },
                    params_);
}

double eval_pdf(const Density& density, const ConfigPoint& x) {
  if (x.dim() != density.dim()) {
    throw DimensionMismatch{density.dim(), x.dim()};
  }
  return std::exp(density.log_pdf(x));
}

std::vector<ConfigPoint> sample_density(const Density& density, Rng& rng, std::size_t count) {
  std::vector<ConfigPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(density.sample(rng));
  }
  return out;
}

StochasticModel::StochasticModel(std::string name, std::size_t dim, DrawFn draw)
    : name_{std::move(name)}, dim_{dim}, draw_{std::move(draw)} {
  if (dim_ == 0) {
    throw Error{"stochastic model: dim must be >= 1"};
  }
  if (!draw_) {
    throw Error{"stochastic model: empty draw function"};
  }
}

double ackley_mean(std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  double sq = 0.0;
  double cos_sum = 0.0;
  for (double c : x) {
    sq += c * c;
    cos_sum += std::cos(2.0 * std::numbers::pi * c);
  }
  return 20.0 * (1.0 - std::exp(-0.2 * std::sqrt(sq / d))) + (std::numbers::e - std::exp(cos_sum / d));
}

StochasticModel normal_normal_model(std::size_t dim) {
  return StochasticModel{"normal_normal", dim,
                         [](const ConfigPoint& x, Rng& rng) { return ackley_mean(x.coords()) + rng.normal(); }};
}

StochasticModel exp_exp_model(std::size_t dim) {
  return StochasticModel{"exp_exp", dim, [](const ConfigPoint& x, Rng& rng) {
                           double rate = 0.0;
                           for (double c : x.coords()) {
                             rate += c;
                           }
                           if (!(rate > 0.0)) {
                             // Mean 1/rate is unbounded at the origin.
                             return kInf;
                           }
                           return rng.exponential(rate);
                         }};
}

StochasticModel deterministic_model(std::size_t dim, std::function<double(const ConfigPoint&)> f) {
  return StochasticModel{"deterministic", dim, [f = std::move(f)](const ConfigPoint& x, Rng&) { return f(x); }};
}

double simulate(const StochasticModel& model, const ConfigPoint& x, Rng& rng) {
  if (x.dim() != model.dim()) {
    throw DimensionMismatch{model.dim(), x.dim()};
  }
  return model.draw(x, rng);
}

double OutcomeSpec::operator()(double v) const {
  switch (kind) {
    case OutcomeKind::indicator_above:
      return v > threshold ? 1.0 : 0.0;
    case OutcomeKind::identity:
      return v;
  }
  return v;
}

double outcome_g(const OutcomeSpec& spec, double v) { return spec(v); }

std::string_view to_string(OutcomeKind kind) {
  return kind == OutcomeKind::indicator_above ? "indicator_above" : "identity";
}

Dataset::Dataset(std::size_t dim, std::vector<PilotRecord> records) : dim_{dim} {
  records_.reserve(records.size());
  for (auto& r : records) {
    add(std::move(r));
  }
}

Dataset Dataset::from_draws(std::span<const ConfigPoint> xs, std::span<const double> vs, const OutcomeSpec& outcome,
                            const Density& q) {
  if (xs.size() != vs.size()) {
    throw Error{"dataset: configuration and output counts differ"};
  }
  Dataset data{q.dim()};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double g = outcome(vs[i]);
    data.add(PilotRecord{xs[i], vs[i], g * g, q.log_pdf(xs[i])});
  }
  return data;
}

void Dataset::add(PilotRecord record) {
  if (record.x.dim() != dim_) {
    throw DimensionMismatch{dim_, record.x.dim()};
  }
  if (!(record.y >= 0.0)) {
    throw Error{"dataset: y = g(v)^2 must be nonnegative"};
  }
  records_.push_back(std::move(record));
}

}  // namespace stochis
