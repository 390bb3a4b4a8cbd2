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

#ifndef OTAFL_RNGCHAN_H_
#define OTAFL_RNGCHAN_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "otafl/types.h"

// Keyed random streams, fading channel models and thermal noise. Every random
// draw in the simulator comes from a RandomStream derived here.
namespace otafl::rngchan {

enum class Purpose : std::uint32_t {
  kFading = 1,
  kNoise = 2,
  kShuffle = 3,
  kCsiError = 4,
  kSignflip = 5,
  kData = 6,
};

// Client index used for server-side and global draws.
inline constexpr std::uint64_t kServer = std::numeric_limits<std::uint64_t>::max();

struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t round = 0;
  std::uint64_t client = kServer;
  Purpose purpose = Purpose::kData;
  // Extra split for draws that need many streams per (round, client, purpose),
  // e.g. Monte-Carlo redraw indices.
  std::uint64_t substream = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

// Philox4x32-10 keyed by a hash of the StreamKey. The output sequence is a
// pure function of the key, so streams can be consumed on any thread in any
// order. Models UniformRandomBitGenerator with 64-bit results.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(const StreamKey& key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Standard normal (Box-Muller, no cached state).
  double normal();
  // Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  // Gamma(shape, scale).
  double gamma(double shape, double scale);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int consumed_ = 4;
};

RandomStream derive_stream(const StreamKey& key);

namespace detail {
// One Philox4x32-10 block.
std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key);
}  // namespace detail

enum class FadingFamily { kDegenerate, kRayleigh, kNakagami };

// Distribution family of the real, positive per-client fading gain c_{n,t}.
class ChannelModel {
 public:
  // Point mass at `value` > 0.
  static ChannelModel degenerate(double value);
  // Rayleigh with scale sigma > 0; mean sigma * sqrt(pi / 2).
  static ChannelModel rayleigh(double scale);
  // Rayleigh with sigma = sqrt(2 / pi), i.e. unit mean.
  static ChannelModel rayleigh_unit_mean();
  // Nakagami-m with shape m >= 0.5 and spread omega = E[c^2] > 0.
  static ChannelModel nakagami(double shape, double spread);
  // Nakagami-m with spread chosen so the mean gain is one.
  static ChannelModel nakagami_unit_mean(double shape = 2.0);

  FadingFamily family() const { return family_; }
  // Degenerate: value; Rayleigh: sigma; Nakagami: m.
  double first_param() const { return a_; }
  // Nakagami: omega; otherwise 0.
  double second_param() const { return b_; }

  double sample(RandomStream& stream) const;

  // P(c <= x).
  double cdf(double x) const;

 private:
  ChannelModel(FadingFamily family, double a, double b)
      : family_(family), a_(a), b_(b) {}

  FadingFamily family_;
  double a_;
  double b_;
};

struct FadingMoments {
  double mean = 0.0;      // mu_c
  double variance = 0.0;  // sigma_c^2
};

std::vector<double> sample_fading(const ChannelModel& model,
                                  RandomStream& stream, int count);

FadingMoments fading_moments(const ChannelModel& model);

// beta_nu = P(|c - mu_c| > nu).
double tail_prob_beta(const ChannelModel& model, double nu);

// Cutoff c_th with P(c > c_th) = p_active, for p_active in (0, 1).
// A degenerate channel returns its value (every client passes c >= c_th).
double activity_threshold(const ChannelModel& model, double p_active);

struct NoiseSpec {
  double sigma_z_sq = 0.0;  // per-entry variance
  int dim = 1;
};

// xi ~ N(0, sigma_z^2 I_d). Zero variance returns the exact zero vector.
GradientVector sample_awgn(const NoiseSpec& spec, RandomStream& stream);

}  // namespace otafl::rngchan

#endif  // OTAFL_RNGCHAN_H_
