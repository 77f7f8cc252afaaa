// Copyright 2026 The qsdc-ghz Authors
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

#include "qsdc/analysis.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

double entropy_bits(const std::vector<double>& dist) {
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

// Marginal of a member as integer counts over its support, when every
// supported amplitude has the same magnitude (true for all GHZ family
// members). Keeps the enumeration in exact rationals.
bool uniform_support_counts(const StateVector& state, std::span<const std::size_t> particles, std::vector<std::size_t>& counts,
                            std::size_t& support) {
  double level = -1.0;
  for (const auto& a : state.amplitudes()) {
    const double p = std::norm(a);
    if (p < kAlgebraTol) continue;
    if (level < 0.0) level = p;
    if (std::abs(p - level) > kAlgebraTol) return false;
  }
  std::size_t sub_size = 1;
  for (std::size_t q : particles) sub_size *= static_cast<std::size_t>(state.levels(q));
  counts.assign(sub_size, 0);
  support = 0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (std::norm(state.amplitude(i)) < kAlgebraTol) continue;
    const auto digits = state.digits_of(i);
    std::size_t y = 0;
    for (std::size_t q : particles) y = y * static_cast<std::size_t>(state.levels(q)) + static_cast<std::size_t>(digits[q]);
    ++counts[y];
    ++support;
  }
  return true;
}

}  // namespace

Estimate proportion(std::size_t hits, std::size_t samples) {
  if (samples == 0) return {};
  const double n = static_cast<double>(samples);
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n), samples};
}

DetectionEstimate detection_probability(const ChannelModel& model, CheckMethod method, std::size_t trials, Rng& rng,
                                        const Scheme& scheme) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  const ProtocolContext context(scheme);
  const std::size_t position[] = {0};
  std::size_t z = 0, zm = 0, x = 0, xm = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    BatchSession session(context, 1);
    session.transmit(scheme.check_particle(), model, rng);
    const CheckBasis basis[] = {rng.coin() ? CheckBasis::kX : CheckBasis::kZ};
    const CheckResult r = method == CheckMethod::kMethod1 ? session.security_check_method1(position, basis, rng)
                                                          : session.security_check_method2(position, basis, rng);
    z += r.z_samples;
    zm += r.z_mismatches;
    x += r.x_samples;
    xm += r.x_mismatches;
  }
  return {proportion(zm + xm, z + x), proportion(zm, z), proportion(xm, x)};
}

double grouped_leakage(const Scheme& scheme, std::span<const std::size_t> intercepted) {
  std::vector<bool> seen(scheme.particles(), false);
  for (std::size_t q : intercepted) {
    if (q >= scheme.check_particle()) throw DomainError("intercepted particle " + std::to_string(q) + " does not carry the message");
    if (seen[q]) throw DomainError("duplicate intercepted particle");
    seen[q] = true;
  }
  if (intercepted.empty()) return 0.0;

  const GhzFamily family = build_family(scheme);
  const std::size_t members = family.size();

  std::vector<std::vector<std::size_t>> counts(members);
  std::vector<std::size_t> supports(members);
  bool exact = true;
  for (std::size_t m = 0; m < members && exact; ++m)
    exact = uniform_support_counts(family.member(m), intercepted, counts[m], supports[m]);

  if (exact) {
    // I = sum_m,y p(m) p(y|m) log2(p(y|m) / p(y)), with each ratio formed from
    // integer products so that independent outcomes contribute exactly zero.
    std::vector<std::size_t> total(counts.front().size(), 0);
    std::size_t total_support = 0;
    for (std::size_t m = 0; m < members; ++m) {
      for (std::size_t y = 0; y < total.size(); ++y) total[y] += counts[m][y];
      total_support += supports[m];
    }
    double info = 0.0;
    for (std::size_t m = 0; m < members; ++m)
      for (std::size_t y = 0; y < total.size(); ++y) {
        if (counts[m][y] == 0) continue;
        const double p_y_given_m = static_cast<double>(counts[m][y]) / static_cast<double>(supports[m]);
        const double ratio = static_cast<double>(counts[m][y] * total_support) / static_cast<double>(supports[m] * total[y]);
        info += p_y_given_m * std::log2(ratio) / static_cast<double>(members);
      }
    return info;
  }

  std::vector<std::vector<double>> conditional(members);
  for (std::size_t m = 0; m < members; ++m) conditional[m] = computational_marginal(family.member(m), intercepted);
  std::vector<double> marginal(conditional.front().size(), 0.0);
  for (const auto& c : conditional)
    for (std::size_t y = 0; y < c.size(); ++y) marginal[y] += c[y] / static_cast<double>(members);

  double conditional_entropy = 0.0;
  for (const auto& c : conditional) conditional_entropy += entropy_bits(c);
  conditional_entropy /= static_cast<double>(members);
  return entropy_bits(marginal) - conditional_entropy;
}

Estimate eve_information(const ChannelModel& model, const Scheme& scheme, std::size_t trials, Rng& rng) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  const ProtocolContext context(scheme);
  const std::size_t members = context.family.size();

  std::map<std::vector<int>, std::size_t> record_ids;
  std::vector<std::pair<std::size_t, std::size_t>> samples;  // (message, record id)
  samples.reserve(trials);

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t message = rng.uniform_index(members);
    StateVector multiplet[] = {context.family.base()};
    EveRecord record = transmit(multiplet, scheme.check_particle(), model, rng);
    multiplet[0] = context.ops[message].apply(multiplet[0]);
    for (std::size_t seq = scheme.check_particle(); seq-- > 0;) record.append(transmit(multiplet, seq, model, rng));

    std::vector<int> key;
    for (const EveEntry& e : record.entries) {
      if (e.ancilla) {
        auto m = measure_computational(multiplet[0], *e.ancilla, rng);
        multiplet[0] = std::move(m.post_state);
        key.push_back(m.label);
      } else {
        key.push_back(e.outcome);
      }
    }
    const auto [it, inserted] = record_ids.emplace(std::move(key), record_ids.size());
    samples.emplace_back(message, it->second);
  }

  const std::size_t records = record_ids.size();
  std::vector<std::size_t> joint(members * records, 0);
  std::vector<std::size_t> by_message(members, 0);
  std::vector<std::size_t> by_record(records, 0);
  for (const auto& [m, r] : samples) {
    ++joint[m * records + r];
    ++by_message[m];
    ++by_record[r];
  }
  // Pointwise information log2(n * n_mr / (n_m * n_r)), ratio of exact counts.
  const double n = static_cast<double>(trials);
  double mean = 0.0;
  double mean_sq = 0.0;
  for (const auto& [m, r] : samples) {
    const double i = std::log2(n * static_cast<double>(joint[m * records + r]) /
                               (static_cast<double>(by_message[m]) * static_cast<double>(by_record[r])));
    mean += i / n;
    mean_sq += i * i / n;
  }
  const double var = std::max(0.0, mean_sq - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(trials)), trials};
}

}  // namespace qsdc
