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

// Superdense-coding families of GHZ states and the message <-> operator maps.
//
// Message ordering
// ----------------
// A message is a digit string; family index = value of the digits in base d,
// first digit most significant. So family member k always decodes to the
// message whose value is k.
//
// kQubit3    Particles A=0, B=1, check particle C=2. Message k-1 <-> Psi_k,
//            produced by the fixed table of operator pairs on (A, B):
//              000 Z.Z   001 I.Z   010 iY.Z  011 X.Z
//              100 I.X   101 Z.X   110 X.X   111 iY.X
// kQubitP(p) Particle p-2 carries one of (I, Z, iY, X) selected by the two
//            leading message bits; particle j in [0, p-3] carries (I, X)
//            selected by bit j + 2. For p = 3 the tuples are reordered so
//            that every message yields the same state as kQubit3 (up to a
//            global phase).
// kQutrit3   Message (t0, t1, t2) <-> U(0,t0) on A and U(t2,t1) on B.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsdc/state.hpp"

namespace qsdc {

inline constexpr std::size_t kMaxQubitMultiplet = 10;

class Scheme {
 public:
  enum class Kind { kQubit3, kQubitP, kQutrit3 };

  static Scheme qubit3() { return Scheme(Kind::kQubit3, 3); }
  /// Qubit multiplet, 2 <= p <= kMaxQubitMultiplet.
  static Scheme qubit_p(std::size_t particles);
  static Scheme qutrit3() { return Scheme(Kind::kQutrit3, 3); }

  /// Parses "qubit3", "qutrit3" or "qubitp:<p>".
  static Scheme parse(const std::string& text);

  Kind kind() const { return kind_; }
  std::size_t particles() const { return particles_; }
  int dim() const { return kind_ == Kind::kQutrit3 ? 3 : 2; }
  /// Index of the particle sent first (never encoded).
  std::size_t check_particle() const { return particles_ - 1; }
  std::size_t message_length() const { return particles_; }
  std::size_t family_size() const;

  std::string name() const;

  friend bool operator==(const Scheme&, const Scheme&) = default;

 private:
  Scheme(Kind kind, std::size_t particles) : kind_(kind), particles_(particles) {}

  Kind kind_;
  std::size_t particles_;
};

struct Message {
  std::vector<int> digits;

  std::string str() const;
  friend bool operator==(const Message&, const Message&) = default;
};

/// Gates applied to the message-carrying particles, particle indices strictly
/// increasing and never the check particle.
struct EncodingOp {
  std::vector<std::pair<std::size_t, SingleParticleGate>> gates;

  StateVector apply(const StateVector& state) const;
  /// e.g. "0:Z 1:X".
  std::string str() const;
};

class GhzFamily {
 public:
  const Scheme& scheme() const { return scheme_; }
  const StateVector& base() const { return base_; }
  const std::vector<StateVector>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const StateVector& member(std::size_t index) const { return members_.at(index); }

  std::size_t index_of_message(const Message& msg) const;
  Message message_of_index(std::size_t index) const;

  /// Largest |<m_i|m_j> - delta_ij| over all pairs.
  double max_gram_deviation() const;

 private:
  friend GhzFamily build_family(const Scheme& scheme);
  GhzFamily(Scheme scheme, StateVector base, std::vector<StateVector> members)
      : scheme_(scheme), base_(std::move(base)), members_(std::move(members)) {}

  Scheme scheme_;
  StateVector base_;
  std::vector<StateVector> members_;
};

/// Applies every encoding operator of the scheme to the base GHZ state and
/// verifies orthonormality (ConsistencyError otherwise).
GhzFamily build_family(const Scheme& scheme);

/// DomainError for a message of the wrong length or with digits >= d.
EncodingOp encode_ops_for_message(const Scheme& scheme, const Message& msg);

/// DomainError for index >= family size.
Message decode_index(const Scheme& scheme, std::size_t family_index);

std::size_t index_of_message(const Scheme& scheme, const Message& msg);

double capacity_bits(const Scheme& scheme);

/// Every message of the scheme in index order.
std::vector<Message> all_messages(const Scheme& scheme);

}  // namespace qsdc
