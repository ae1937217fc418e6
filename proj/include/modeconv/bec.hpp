// Copyright 2026 The modeconv Authors
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

// Closed forms for the condensate protocol: the binomial weights
// f_{N,j} = 2^-N N! / (j! (N-j)!), the ge/eg coherence series built from them,
// its large-N form, and the shift-mixture bookkeeping for a reused condensate.

#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "modeconv/error.hpp"

namespace modeconv {

namespace detail {

// log(n!) - [(n + 1/2) log n - n + log sqrt(2 pi)], exact table for small
// half-integers and the asymptotic series above 15.
inline double stirlerr(double n) {
  static constexpr double kHalves[31] = {
      0.0,
      0.1534264097200273452913848,   0.0810614667953272582196702,
      0.0548141210519176538961390,   0.0413406959554092940938221,
      0.03316287351993628748511048,  0.02767792568499833914878929,
      0.02374616365629749597132920,  0.02079067210376509311152277,
      0.01848845053267318523077934,  0.01664469118982119216319487,
      0.01513497322191737887351255,  0.01387612882307074799874573,
      0.01281046524292022692424986,  0.01189670994589177009505572,
      0.01110455975820691732662991,  0.010411265261972096497478567,
      0.009799416126158803298389475, 0.009255462182712732917728637,
      0.008768700134139385462952823, 0.008330563433362871256469318,
      0.007934114564314020547248100, 0.007573675487951840794972024,
      0.007244554301320383179543912, 0.006942840107209529865664152,
      0.006665247032707682442354394, 0.006408994188004207068439631,
      0.006171712263039457647532867, 0.005951370112758847735624416,
      0.005746216513010115682023589, 0.005554733551962801371038690};
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    const double nn = n + n;
    if (nn == std::floor(nn)) return kHalves[static_cast<int>(nn)];
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
           0.5 * std::log(2 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, by series when x is close to np.
inline double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// Compensated running sum.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// log f_{N,j}. Uses the saddle-point decomposition of the log-gamma
/// difference (Stirling remainders plus deviance), which keeps ~1e-15
/// relative accuracy where a plain lgamma difference would cancel.
inline double log_binomial_weight(std::uint64_t n, std::int64_t j) {
  if (j < 0 || static_cast<std::uint64_t>(j) > n) {
    throw Error(ErrorCode::OutOfRange, "j outside [0, N]");
  }
  const double nd = static_cast<double>(n);
  if (j == 0 || static_cast<std::uint64_t>(j) == n) return -nd * std::numbers::ln2;
  const double x = static_cast<double>(j);
  const double lc = detail::stirlerr(nd) - detail::stirlerr(x) -
                    detail::stirlerr(nd - x) - detail::bd0(x, 0.5 * nd) -
                    detail::bd0(nd - x, 0.5 * nd);
  const double lf = std::log(2 * std::numbers::pi) + std::log(x) + std::log1p(-x / nd);
  return lc - 0.5 * lf;
}

inline double binomial_weight(std::uint64_t n, std::int64_t j) {
  return std::exp(log_binomial_weight(n, j));
}

/// f_{N,j} for j = 0..N, stored on a log scale.
class BinomialProfile {
 public:
  explicit BinomialProfile(std::uint64_t n) : n_(n), log_weights_(n + 1) {
    if (n == 0) throw Error(ErrorCode::InvalidN, "N must be at least 1");
    for (std::uint64_t j = 0; j <= n; ++j) {
      log_weights_[j] = log_binomial_weight(n, static_cast<std::int64_t>(j));
    }
  }

  std::uint64_t n() const { return n_; }
  const std::vector<double>& log_weights() const { return log_weights_; }
  double weight(std::uint64_t j) const { return std::exp(log_weights_.at(j)); }

  /// sqrt(f_{N,j-1} f_{N,j}).
  double neighbour_overlap(std::uint64_t j) const {
    return std::exp(0.5 * (log_weights_.at(j - 1) + log_weights_.at(j)));
  }

  double mean() const { return 0.5 * static_cast<double>(n_); }

  double variance() const {
    detail::NeumaierSum s;
    const double mu = mean();
    for (std::uint64_t j = 0; j <= n_; ++j) {
      const double d = static_cast<double>(j) - mu;
      s.add(weight(j) * d * d);
    }
    return s.value();
  }

 private:
  std::uint64_t n_;
  std::vector<double> log_weights_;
};

inline double coherence_series(const BinomialProfile& profile) {
  detail::NeumaierSum s;
  for (std::uint64_t j = 1; j <= profile.n(); ++j) s.add(profile.neighbour_overlap(j));
  return 0.5 * s.value();
}

/// rho_{ge,eg} = (1/2) sum_{j=1}^{N} sqrt(f_{N,j-1} f_{N,j}); valid for every N.
inline double coherence_series(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "N must be at least 1");
  return coherence_series(BinomialProfile(static_cast<std::uint64_t>(n)));
}

/// Same series regrouped around the centre, j = N/2 + dj; even N only.
inline double coherence_series_resummed(std::int64_t n) {
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorCode::InvalidN, "resummed series needs even N >= 2");
  }
  const auto un = static_cast<std::uint64_t>(n);
  const std::int64_t half = n / 2;
  detail::NeumaierSum s;
  for (std::int64_t dj = -(half - 1); dj <= half; ++dj) {
    const double ratio = static_cast<double>(half + dj) /
                         static_cast<double>(half - dj + 1);
    s.add(binomial_weight(un, half + dj) * std::sqrt(ratio));
  }
  return 0.5 * s.value();
}

inline double coherence_asymptotic(std::int64_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidN, "N must be at least 1");
  return 0.5 * (1.0 - 1.0 / (2.0 * static_cast<double>(n)));
}

inline double concurrence_asymptotic(std::int64_t n) {
  return 2.0 * coherence_asymptotic(n);
}

/// Condensate state after some rounds: an equal-weight-per-path mixture of
/// copies of the original binomial profile whose left-side centre is shifted
/// by s extra atoms, s in [0, rounds].
class ShiftMixture {
 public:
  static ShiftMixture fresh(std::shared_ptr<const BinomialProfile> profile) {
    if (!profile) throw Error(ErrorCode::InvalidArgument, "null profile");
    return ShiftMixture(std::move(profile), {1.0}, 0);
  }

  static ShiftMixture fresh(std::uint64_t n) {
    return fresh(std::make_shared<const BinomialProfile>(n));
  }

  const BinomialProfile& profile() const { return *profile_; }
  const std::shared_ptr<const BinomialProfile>& profile_ptr() const { return profile_; }
  const std::vector<double>& shift_probs() const { return shift_probs_; }
  std::uint64_t rounds_elapsed() const { return rounds_; }
  std::uint64_t total_atoms() const { return profile_->n() + rounds_; }

  double shift_mean() const {
    detail::NeumaierSum s;
    for (std::size_t k = 0; k < shift_probs_.size(); ++k) {
      s.add(shift_probs_[k] * static_cast<double>(k));
    }
    return s.value();
  }

  double shift_variance() const {
    const double mu = shift_mean();
    detail::NeumaierSum s;
    for (std::size_t k = 0; k < shift_probs_.size(); ++k) {
      const double d = static_cast<double>(k) - mu;
      s.add(shift_probs_[k] * d * d);
    }
    return s.value();
  }

 private:
  friend ShiftMixture advance_mixture(const ShiftMixture& m);

  ShiftMixture(std::shared_ptr<const BinomialProfile> profile,
               std::vector<double> probs, std::uint64_t rounds)
      : profile_(std::move(profile)), shift_probs_(std::move(probs)), rounds_(rounds) {}

  std::shared_ptr<const BinomialProfile> profile_;
  std::vector<double> shift_probs_;
  std::uint64_t rounds_ = 0;
};

/// One more flying atom absorbed: it lands left or right with probability 1/2
/// once the target pair is traced out.
inline ShiftMixture advance_mixture(const ShiftMixture& m) {
  const auto& p = m.shift_probs_;
  std::vector<double> next(p.size() + 1, 0.0);
  for (std::size_t s = 0; s < p.size(); ++s) {
    next[s] += 0.5 * p[s];
    next[s + 1] += 0.5 * p[s];
  }
  return ShiftMixture(m.profile_, std::move(next), m.rounds_ + 1);
}

/// ge/eg coherence produced by the next flying atom when the condensate is
/// in the shifted branch `shift`: the eg amplitude at merged left count l
/// comes from condensate count l-1, the ge amplitude from count l.
inline double shifted_branch_coherence(const BinomialProfile& profile,
                                       std::uint64_t shift) {
  const auto n = profile.n();
  auto amp = [&](std::uint64_t left) -> double {
    if (left < shift || left > shift + n) return 0.0;
    return std::exp(0.5 * profile.log_weights()[left - shift]);
  };
  detail::NeumaierSum s;
  for (std::uint64_t l = shift; l <= shift + n + 1; ++l) {
    const double eg = l == 0 ? 0.0 : amp(l - 1);
    s.add(eg * amp(l));
  }
  return 0.5 * s.value();
}

/// Coherence produced by the next round. Equals coherence_series(N) for any
/// shift distribution; the most probable shifted branch is recomputed
/// explicitly and checked against it.
inline double mixture_coherence(const ShiftMixture& m) {
  const double base = coherence_series(m.profile());
  const auto& p = m.shift_probs();
  std::size_t argmax = 0;
  for (std::size_t s = 1; s < p.size(); ++s) {
    if (p[s] > p[argmax]) argmax = s;
  }
  const double check = shifted_branch_coherence(m.profile(), argmax);
  if (std::abs(check - base) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "shift invariance violated");
  }
  return base;
}

struct Fluctuations {
  double classical_std;
  double quantum_std;
};

/// quantum_std: spread of the left count in the original profile (sqrt(N)/2).
/// classical_std: spread of the left count over the whole mixture, i.e. the
/// profile convolved with the shift distribution (variances add).
inline Fluctuations fluctuation_report(const ShiftMixture& m) {
  const double vq = m.profile().variance();
  return {std::sqrt(vq + m.shift_variance()), std::sqrt(vq)};
}

/// Left-count distribution of the mixture by direct convolution, index =
/// number of condensate atoms on the left.
inline std::vector<double> left_count_distribution(const ShiftMixture& m) {
  const auto n = m.profile().n();
  const auto& p = m.shift_probs();
  std::vector<double> dist(n + p.size(), 0.0);
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] == 0.0) continue;
    for (std::uint64_t j = 0; j <= n; ++j) dist[s + j] += p[s] * m.profile().weight(j);
  }
  return dist;
}

}  // namespace modeconv
