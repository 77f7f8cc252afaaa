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

// Quantum channel behaviours applied to a particle sequence in transit.
//
// Attacks are silent: they change only the multiplet states, never the
// honest parties' classical bookkeeping. Everything Eve learns goes into an
// EveRecord that the protocol engine never reads.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qsdc/rng.hpp"
#include "qsdc/state.hpp"

namespace qsdc {

/// Amplitudes of Eve's probe on one transiting qubit:
///
///   |0>|e> -> alpha1 |0>|e00> + beta1 |1>|e01>
///   |1>|e> -> alpha2 |1>|e11> + beta2 |0>|e10>
///
/// beta is the flip amplitude on each branch, so the induced error rate is
/// |beta1|^2 on the |0> branch and |beta2|^2 on the |1> branch.
///
/// Ancilla layout: e01 and e10 are distinct basis states. With
/// `tag_branches` false, e00 = e11 and the no-flip component leaves the
/// ancilla untouched (beta = 0 is the identity channel). With it true, all
/// four are orthonormal and the ancilla also records which branch passed.
struct ProbeParams {
  Amplitude alpha1{1.0};
  Amplitude beta1{0.0};
  Amplitude alpha2{1.0};
  Amplitude beta2{0.0};
  bool tag_branches = false;

  /// Real amplitudes with |beta1| = |beta2| = beta.
  static ProbeParams from_beta(double beta, bool tag_branches = false);

  /// DomainError unless |alpha_i|^2 + |beta_i|^2 = 1 within kAlgebraTol.
  void validate() const;

  int ancilla_levels() const { return tag_branches ? 4 : 3; }
  double error_rate_zero_branch() const { return std::norm(beta1); }
  double error_rate_one_branch() const { return std::norm(beta2); }
};

/// Eve's basis choice for intercept-resend. X is the Fourier basis for d > 2.
enum class BasisPolicy { kAlwaysZ, kAlwaysX, kRandomZX };

struct IdealChannel {};
struct InterceptResend {
  BasisPolicy policy = BasisPolicy::kAlwaysZ;
};
struct ProbeAttack {
  ProbeParams params;
};
/// Computational-basis interception of a group of particles.
struct GroupedInterception {
  std::vector<std::size_t> group;
};

struct ChannelModel {
  std::variant<IdealChannel, InterceptResend, ProbeAttack, GroupedInterception> attack;
  /// Particle sequences the attack is applied to; empty means every sequence.
  /// Ignored for GroupedInterception, which targets its own group.
  std::vector<std::size_t> targets;

  static ChannelModel ideal() { return {}; }
  static ChannelModel intercept_resend(BasisPolicy policy, std::vector<std::size_t> targets = {});
  static ChannelModel probe(ProbeParams params, std::vector<std::size_t> targets = {});
  static ChannelModel grouped(std::vector<std::size_t> group);

  bool active_on(std::size_t particle) const;
  bool is_ideal() const { return std::holds_alternative<IdealChannel>(attack); }
  std::string name() const;
};

struct EveEntry {
  enum class Action { kMeasureZ, kMeasureX, kProbe };

  std::size_t position = 0;
  std::size_t particle = 0;
  Action action = Action::kMeasureZ;
  int outcome = -1;                          // measurement digit; -1 for probes
  std::optional<std::size_t> ancilla;        // register index of the probe ancilla
};

/// Append-only log of what Eve did and saw.
struct EveRecord {
  std::vector<EveEntry> entries;

  void append(const EveRecord& other) { entries.insert(entries.end(), other.entries.begin(), other.entries.end()); }
  bool empty() const { return entries.empty(); }
};

/// Appends a probe ancilla to the register and couples it to `particle`.
StateVector probe_attach(const StateVector& state, std::size_t particle, const ProbeParams& params);

/// Sends particle `particle` of every multiplet through the channel, in
/// position order. `rng` must be Eve's stream, not the honest parties'.
EveRecord transmit(std::span<StateVector> multiplets, std::size_t particle, const ChannelModel& model, Rng& rng);

}  // namespace qsdc
