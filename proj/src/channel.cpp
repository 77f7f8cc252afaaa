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

#include "qsdc/channel.hpp"

#include <algorithm>
#include <cmath>

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr int kNoFlip = 0;
constexpr int kFlipFromZero = 1;
constexpr int kFlipFromOne = 2;
constexpr int kNoFlipTagged = 3;

}  // namespace

ProbeParams ProbeParams::from_beta(double beta, bool tag_branches) {
  if (beta < 0.0 || beta > 1.0) throw DomainError("probe beta must lie in [0, 1]");
  const double alpha = std::sqrt(1.0 - beta * beta);
  return ProbeParams{alpha, beta, alpha, beta, tag_branches};
}

void ProbeParams::validate() const {
  if (std::abs(std::norm(alpha1) + std::norm(beta1) - 1.0) > kAlgebraTol ||
      std::abs(std::norm(alpha2) + std::norm(beta2) - 1.0) > kAlgebraTol)
    throw DomainError("probe amplitudes must satisfy |alpha|^2 + |beta|^2 = 1 on both branches");
}

ChannelModel ChannelModel::intercept_resend(BasisPolicy policy, std::vector<std::size_t> targets) {
  return ChannelModel{InterceptResend{policy}, std::move(targets)};
}

ChannelModel ChannelModel::probe(ProbeParams params, std::vector<std::size_t> targets) {
  params.validate();
  return ChannelModel{ProbeAttack{params}, std::move(targets)};
}

ChannelModel ChannelModel::grouped(std::vector<std::size_t> group) {
  return ChannelModel{GroupedInterception{std::move(group)}, {}};
}

bool ChannelModel::active_on(std::size_t particle) const {
  if (const auto* g = std::get_if<GroupedInterception>(&attack))
    return std::find(g->group.begin(), g->group.end(), particle) != g->group.end();
  if (is_ideal()) return false;
  return targets.empty() || std::find(targets.begin(), targets.end(), particle) != targets.end();
}

std::string ChannelModel::name() const {
  return std::visit(Overloaded{
                        [](const IdealChannel&) -> std::string { return "none"; },
                        [](const InterceptResend& a) -> std::string {
                          switch (a.policy) {
                            case BasisPolicy::kAlwaysZ: return "intercept-z";
                            case BasisPolicy::kAlwaysX: return "intercept-x";
                            case BasisPolicy::kRandomZX: return "intercept-random";
                          }
                          return "intercept";
                        },
                        [](const ProbeAttack&) -> std::string { return "probe"; },
                        [](const GroupedInterception&) -> std::string { return "grouped"; },
                    },
                    attack);
}

StateVector probe_attach(const StateVector& state, std::size_t particle, const ProbeParams& params) {
  params.validate();
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  if (state.levels(particle) != 2) throw DomainError("the probe acts on qubits");

  const int anc = params.ancilla_levels();
  std::vector<int> levels = state.shape();
  levels.push_back(anc);

  std::size_t stride = 1;
  for (std::size_t q = particle + 1; q < state.particles(); ++q) stride *= static_cast<std::size_t>(state.levels(q));
  const int e11 = params.tag_branches ? kNoFlipTagged : kNoFlip;

  const auto in = state.amplitudes();
  std::vector<Amplitude> out(in.size() * static_cast<std::size_t>(anc));
  auto put = [&](std::size_t index, int ancilla, Amplitude value) {
    out[index * static_cast<std::size_t>(anc) + static_cast<std::size_t>(ancilla)] += value;
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] == Amplitude{}) continue;
    const bool one = (i / stride) % 2 == 1;
    const std::size_t zero_index = one ? i - stride : i;
    const std::size_t one_index = zero_index + stride;
    if (!one) {
      put(zero_index, kNoFlip, params.alpha1 * in[i]);
      put(one_index, kFlipFromZero, params.beta1 * in[i]);
    } else {
      put(one_index, e11, params.alpha2 * in[i]);
      put(zero_index, kFlipFromOne, params.beta2 * in[i]);
    }
  }
  return StateVector(std::move(levels), std::move(out));
}

EveRecord transmit(std::span<StateVector> multiplets, std::size_t particle, const ChannelModel& model, Rng& rng) {
  EveRecord record;
  if (!model.active_on(particle)) return record;

  for (std::size_t pos = 0; pos < multiplets.size(); ++pos) {
    StateVector& state = multiplets[pos];
    EveEntry entry;
    entry.position = pos;
    entry.particle = particle;

    std::visit(Overloaded{
                   [](const IdealChannel&) {},
                   [&](const InterceptResend& a) {
                     bool use_x = a.policy == BasisPolicy::kAlwaysX;
                     if (a.policy == BasisPolicy::kRandomZX) use_x = rng.coin();
                     // Resending the eigenstate of the outcome leaves exactly
                     // the collapsed state in the register.
                     auto m = use_x ? measure_fourier(state, particle, rng) : measure_computational(state, particle, rng);
                     entry.action = use_x ? EveEntry::Action::kMeasureX : EveEntry::Action::kMeasureZ;
                     entry.outcome = m.label;
                     state = std::move(m.post_state);
                   },
                   [&](const ProbeAttack& a) {
                     state = probe_attach(state, particle, a.params);
                     entry.action = EveEntry::Action::kProbe;
                     entry.ancilla = state.particles() - 1;
                   },
                   [&](const GroupedInterception&) {
                     auto m = measure_computational(state, particle, rng);
                     entry.action = EveEntry::Action::kMeasureZ;
                     entry.outcome = m.label;
                     state = std::move(m.post_state);
                   },
               },
               model.attack);
    record.entries.push_back(entry);
  }
  return record;
}

}  // namespace qsdc
