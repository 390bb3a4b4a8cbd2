// Copyright 2026 The OTAFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "otafl/rngchan.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

namespace otafl::rngchan {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

namespace detail {
// Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
  return philox4x32_10(ctr, key);
}
}  // namespace detail

RandomStream::RandomStream(const StreamKey& key) {
  std::uint64_t h = splitmix64(key.master_seed);
  h = splitmix64(h ^ key.round);
  h = splitmix64(h ^ key.client);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.purpose));
  h = splitmix64(h ^ key.substream);
  const std::uint64_t k = splitmix64(h ^ 0x5DEECE66Dull);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  counter_ = {0u, 0u, static_cast<std::uint32_t>(h),
              static_cast<std::uint32_t>(h >> 32)};
}

void RandomStream::refill() {
  block_ = philox4x32_10(counter_, key_);
  if (++counter_[0] == 0) ++counter_[1];
  consumed_ = 0;
}

RandomStream::result_type RandomStream::operator()() {
  if (consumed_ > 2) refill();
  const std::uint64_t lo = block_[consumed_];
  const std::uint64_t hi = block_[consumed_ + 1];
  consumed_ += 2;
  return (hi << 32) | lo;
}

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(n) requires n > 0");
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomStream::gamma(double shape, double scale) {
  std::gamma_distribution<double> dist(shape, scale);
  return dist(*this);
}

RandomStream derive_stream(const StreamKey& key) { return RandomStream(key); }

ChannelModel ChannelModel::degenerate(double value) {
  require_positive(value, "degenerate fading value");
  return ChannelModel(FadingFamily::kDegenerate, value, 0.0);
}

ChannelModel ChannelModel::rayleigh(double scale) {
  require_positive(scale, "Rayleigh scale");
  return ChannelModel(FadingFamily::kRayleigh, scale, 0.0);
}

ChannelModel ChannelModel::rayleigh_unit_mean() {
  return rayleigh(std::sqrt(2.0 / std::numbers::pi));
}

ChannelModel ChannelModel::nakagami(double shape, double spread) {
  require_positive(shape, "Nakagami shape");
  require_positive(spread, "Nakagami spread");
  if (shape < 0.5) throw std::invalid_argument("Nakagami shape must be >= 0.5");
  return ChannelModel(FadingFamily::kNakagami, shape, spread);
}

ChannelModel ChannelModel::nakagami_unit_mean(double shape) {
  require_positive(shape, "Nakagami shape");
  const double ratio = std::exp(std::lgamma(shape) - std::lgamma(shape + 0.5));
  return nakagami(shape, shape * ratio * ratio);
}

double ChannelModel::sample(RandomStream& stream) const {
  switch (family_) {
    case FadingFamily::kDegenerate:
      return a_;
    case FadingFamily::kRayleigh:
      return a_ * std::sqrt(-2.0 * std::log(stream.uniform_open()));
    case FadingFamily::kNakagami: {
      double power = stream.gamma(a_, b_ / a_);
      while (!(power > 0.0)) power = stream.gamma(a_, b_ / a_);
      return std::sqrt(power);
    }
  }
  return a_;
}

double ChannelModel::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  switch (family_) {
    case FadingFamily::kDegenerate:
      return x >= a_ ? 1.0 : 0.0;
    case FadingFamily::kRayleigh:
      return -std::expm1(-x * x / (2.0 * a_ * a_));
    case FadingFamily::kNakagami:
      return boost::math::gamma_p(a_, a_ * x * x / b_);
  }
  return 0.0;
}

std::vector<double> sample_fading(const ChannelModel& model,
                                  RandomStream& stream, int count) {
  if (count < 1) throw std::invalid_argument("sample_fading: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (double& c : out) c = model.sample(stream);
  return out;
}

FadingMoments fading_moments(const ChannelModel& model) {
  switch (model.family()) {
    case FadingFamily::kDegenerate:
      return {model.first_param(), 0.0};
    case FadingFamily::kRayleigh: {
      const double s = model.first_param();
      return {s * std::sqrt(std::numbers::pi / 2.0),
              (2.0 - std::numbers::pi / 2.0) * s * s};
    }
    case FadingFamily::kNakagami: {
      const double m = model.first_param();
      const double omega = model.second_param();
      const double mean = std::exp(std::lgamma(m + 0.5) - std::lgamma(m)) *
                          std::sqrt(omega / m);
      return {mean, omega - mean * mean};
    }
  }
  return {};
}

double tail_prob_beta(const ChannelModel& model, double nu) {
  require_positive(nu, "nu");
  const double mu = fading_moments(model).mean;
  double upper = 0.0;  // P(c > mu + nu)
  double lower = 0.0;  // P(c < mu - nu)
  switch (model.family()) {
    case FadingFamily::kDegenerate:
      return 0.0;
    case FadingFamily::kRayleigh: {
      const double s2 = 2.0 * model.first_param() * model.first_param();
      upper = std::exp(-(mu + nu) * (mu + nu) / s2);
      if (mu - nu > 0.0) lower = -std::expm1(-(mu - nu) * (mu - nu) / s2);
      break;
    }
    case FadingFamily::kNakagami: {
      const double m = model.first_param();
      const double omega = model.second_param();
      upper = boost::math::gamma_q(m, m * (mu + nu) * (mu + nu) / omega);
      if (mu - nu > 0.0) {
        lower = boost::math::gamma_p(m, m * (mu - nu) * (mu - nu) / omega);
      }
      break;
    }
  }
  const double beta = upper + lower;
  return beta < 0.0 ? 0.0 : (beta > 1.0 ? 1.0 : beta);
}

double activity_threshold(const ChannelModel& model, double p_active) {
  if (!(p_active > 0.0 && p_active < 1.0)) {
    throw std::invalid_argument("activity_threshold: p_active must lie in (0, 1)");
  }
  switch (model.family()) {
    case FadingFamily::kDegenerate:
      return model.first_param();
    case FadingFamily::kRayleigh: {
      const double s = model.first_param();
      return s * std::sqrt(-2.0 * std::log(p_active));
    }
    case FadingFamily::kNakagami: {
      const double m = model.first_param();
      const double omega = model.second_param();
      return std::sqrt(boost::math::gamma_q_inv(m, p_active) * omega / m);
    }
  }
  return 0.0;
}

GradientVector sample_awgn(const NoiseSpec& spec, RandomStream& stream) {
  if (spec.dim < 1) throw std::invalid_argument("sample_awgn: dim must be >= 1");
  if (spec.sigma_z_sq < 0.0) {
    throw std::invalid_argument("sample_awgn: sigma_z_sq must be >= 0");
  }
  GradientVector xi = GradientVector::Zero(spec.dim);
  if (spec.sigma_z_sq == 0.0) return xi;
  const double sd = std::sqrt(spec.sigma_z_sq);
  for (int i = 0; i < spec.dim; ++i) xi[i] = sd * stream.normal();
  return xi;
}

}  // namespace otafl::rngchan
