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

// Multi-step direct communication session over GHZ multiplets.
//
// One batch runs as a strict state machine:
//
//   prepare N multiplets
//   send sequence p-1  ->  first security check (Method 1 or Method 2)
//   Alice encodes payload and random decoy operators on sampling positions
//   for j = p-2 .. 0:  send sequence j  ->  post-transmission check
//   Bob measures every payload multiplet in the GHZ family and decodes
//
// Batches repeat until the payload is delivered or a check's mismatch rate
// exceeds the abort threshold.
//
// Check sizes: the first check uses ceil(f N) positions; Alice reserves
// ceil(f N) sampling positions; each post-transmission check consumes half of
// the unconsumed sampling positions (at least one).
//
// Randomness: honest parties draw from a stream seeded with the config seed,
// the channel from an independent stream derived from it. An attack therefore
// never shifts the honest parties' position or basis choices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsdc/channel.hpp"
#include "qsdc/codec.hpp"
#include "qsdc/rng.hpp"
#include "qsdc/state.hpp"

namespace qsdc {

enum class CheckMethod { kMethod1 = 1, kMethod2 = 2 };

/// Shared measurement basis of a check position. kX is the Fourier basis when d > 2.
enum class CheckBasis { kZ = 0, kX = 1 };

struct ProtocolConfig {
  std::size_t batch_size = 256;
  Scheme scheme = Scheme::qubit3();
  double check_fraction = 0.1;
  CheckMethod check_method = CheckMethod::kMethod1;
  double abort_threshold = 0.0;
  std::vector<Message> payload;
  std::uint64_t seed = 0;

  /// DomainError naming the offending field.
  void validate() const;

  std::size_t first_check_size() const;
  std::size_t sampling_size() const;
  /// Multiplets per batch left for payload after both reservations.
  std::size_t payload_slots() const;
};

/// "C", "B", "A" for triplets, "P<j>" otherwise.
std::string sequence_name(const Scheme& scheme, std::size_t particle);

struct CheckResult {
  enum class Kind { kFirst, kPostTransmission };

  Kind kind = Kind::kFirst;
  std::size_t batch = 0;
  std::size_t sequence = 0;
  std::size_t samples = 0;
  std::size_t mismatches = 0;
  std::size_t z_samples = 0;
  std::size_t z_mismatches = 0;
  std::size_t x_samples = 0;
  std::size_t x_mismatches = 0;
  bool skipped = false;

  double mismatch_rate() const { return samples == 0 ? 0.0 : static_cast<double>(mismatches) / static_cast<double>(samples); }
};

struct TranscriptEvent {
  enum class Actor { kAlice, kBob };
  enum class Kind { kPositionsAnnounce, kBasisAnnounce, kOutcomeAnnounce, kOpAnnounce, kAbortAnnounce };

  Actor actor = Actor::kAlice;
  Kind kind = Kind::kPositionsAnnounce;
  std::size_t batch = 0;
  std::size_t sequence = 0;
  std::vector<std::int64_t> values;

  friend bool operator==(const TranscriptEvent&, const TranscriptEvent&) = default;
};

/// The authenticated classical channel: events in delivery order.
using Transcript = std::vector<TranscriptEvent>;

/// Per-scheme data shared read-only by every session.
struct ProtocolContext {
  explicit ProtocolContext(const Scheme& scheme);

  GhzFamily family;
  std::vector<EncodingOp> ops;                 // by family index
  std::vector<std::size_t> alice_particles;    // 0 .. p-2
  std::vector<StateVector> alice_joint_basis;  // Method 2 basis on Alice's particles
  std::vector<int> method2_expected;           // Alice's label for each Bob X outcome
};

/// Walks the payload; past its end yields the all-zero message as padding.
class PayloadCursor {
 public:
  explicit PayloadCursor(std::span<const Message> payload) : payload_(payload) {}

  bool exhausted() const { return next_ >= payload_.size(); }
  std::size_t consumed() const { return next_; }

  /// Returns the next message, or padding when exhausted.
  Message take(const Scheme& scheme, bool& padding);

 private:
  std::span<const Message> payload_;
  std::size_t next_ = 0;
};

struct DecodedPosition {
  std::size_t position = 0;
  std::optional<Message> message;  // empty when the state was outside the family span
  bool padding = false;
};

class BatchSession {
 public:
  enum class Role { kFresh, kFirstCheck, kSampling, kSamplingChecked, kPayload, kPadding };

  BatchSession(const ProtocolContext& context, std::size_t batch_size, std::size_t batch_index = 0,
               Transcript* transcript = nullptr);

  std::size_t size() const { return multiplets_.size(); }
  const StateVector& multiplet(std::size_t position) const { return multiplets_.at(position); }
  Role role(std::size_t position) const { return roles_.at(position); }
  /// Family index of the operator applied at a sampling or payload position.
  std::optional<std::size_t> recorded_op(std::size_t position) const { return ops_.at(position); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Sends sequence `particle` to Bob through the channel. Sequences go
  /// strictly from p-1 down to 0, each only after the previous check.
  EveRecord transmit(std::size_t particle, const ChannelModel& channel, Rng& eve_rng);

  /// Overwrites a multiplet while its particles are in transit; for custom
  /// channel behaviour not covered by ChannelModel.
  void tamper(std::size_t position, StateVector state);

  /// Bob measures his check particle in the announced bases, Alice measures
  /// her particles in the same basis. Z: all of Alice's digits must equal
  /// Bob's. X: Bob's digit plus Alice's digits must vanish mod d (for qubits:
  /// Alice's parity is even iff Bob got +x).
  CheckResult security_check_method1(std::span<const std::size_t> positions, std::span<const CheckBasis> bases, Rng& rng);

  /// As Method 1 on Z. On X, Alice measures her particles jointly in the GHZ
  /// basis of her register (the Bell basis for triplets); Bob +x must pair
  /// with Phi+, Bob -x with Phi-.
  CheckResult security_check_method2(std::span<const std::size_t> positions, std::span<const CheckBasis> bases, Rng& rng);

  /// Bob picks `count` fresh positions and random bases, then runs `method`.
  CheckResult first_check(CheckMethod method, std::size_t count, Rng& rng);

  /// Picks `sampling_count` fresh positions for random decoy operators and
  /// encodes the payload on every other fresh position.
  void alice_encode(PayloadCursor& payload, std::size_t sampling_count, Rng& rng);

  /// Alice reveals half of the unconsumed sampling positions and their
  /// operators; every particle is measured in a shared random basis and the
  /// joint outcome must lie in the support of the known transformed state.
  CheckResult post_transmission_check(std::size_t sequence, Rng& rng);

  /// Family measurement of every payload position, in position order.
  std::vector<DecodedPosition> bob_decode(Rng& rng);

  std::size_t count(Role role) const;

 private:
  enum class Phase { kPrepared, kCheckSent, kFirstChecked, kEncoded, kInTransit, kChecked, kDecoded };

  CheckResult run_first_check(CheckMethod method, std::span<const std::size_t> positions,
                              std::span<const CheckBasis> bases, Rng& rng);
  void announce(TranscriptEvent::Actor actor, TranscriptEvent::Kind kind, std::size_t sequence,
                std::vector<std::int64_t> values);

  const ProtocolContext& context_;
  std::size_t batch_index_;
  Transcript* transcript_;
  std::vector<StateVector> multiplets_;
  std::vector<Role> roles_;
  std::vector<std::optional<std::size_t>> ops_;
  std::vector<std::string> warnings_;
  Phase phase_ = Phase::kPrepared;
  std::optional<std::size_t> last_sent_;
};

struct BatchAccounting {
  std::size_t first_check = 0;
  std::size_t sampling = 0;
  std::size_t payload = 0;
  std::size_t padding = 0;
  bool completed = false;
};

struct SessionReport {
  std::vector<Message> delivered;
  bool aborted = false;
  std::string abort_stage;  // e.g. "batch 0 check C"
  std::size_t abort_batch = 0;
  std::vector<CheckResult> checks;
  std::vector<BatchAccounting> batches;
  std::vector<std::pair<std::size_t, std::size_t>> corrupted;  // (batch, position)
  double throughput_bits = 0.0;
  std::vector<std::string> warnings;
  Transcript transcript;
  EveRecord eve;
};

SessionReport run_session(const ProtocolConfig& config, const ChannelModel& channel);
SessionReport run_session(const ProtocolConfig& config, const ChannelModel& channel, const ProtocolContext& context);

/// Seed of the channel's random stream for a session seed.
constexpr std::uint64_t channel_seed(std::uint64_t session_seed) {
  return splitmix64_mix(session_seed ^ 0x5DEECE66DULL);
}

/// |<b_{k_0} (x) ... (x) b_{k_{n-1}} | state>|^2 for a product of single-particle
/// basis vectors on the first digits.size() particles (marginal over the rest).
double product_outcome_probability(const StateVector& state, CheckBasis basis, std::span<const int> digits);

}  // namespace qsdc
