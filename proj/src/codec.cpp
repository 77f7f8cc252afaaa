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

#include "qsdc/codec.hpp"

#include <array>
#include <cmath>

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

using Gate = SingleParticleGate;

// Qubit3 table, message value k-1 -> gates on (A, B).
const std::array<std::pair<Gate, Gate>, 8>& qubit3_table() {
  static const std::array<std::pair<Gate, Gate>, 8> table = {{
      {Gate::pauli_z(), Gate::pauli_z()},
      {Gate::identity(), Gate::pauli_z()},
      {Gate::pauli_iy(), Gate::pauli_z()},
      {Gate::pauli_x(), Gate::pauli_z()},
      {Gate::identity(), Gate::pauli_x()},
      {Gate::pauli_z(), Gate::pauli_x()},
      {Gate::pauli_x(), Gate::pauli_x()},
      {Gate::pauli_iy(), Gate::pauli_x()},
  }};
  return table;
}

// Gate on particle p-2 in canonical order.
Gate pair_gate(int index) {
  switch (index) {
    case 0: return Gate::identity();
    case 1: return Gate::pauli_z();
    case 2: return Gate::pauli_iy();
    default: return Gate::pauli_x();
  }
}

// QubitP(3): Qubit3 message value -> canonical (lexicographic) tuple value.
// Canonical value 2g + a, g = gate on B in (I, Z, iY, X), a = X on A.
constexpr std::array<std::size_t, 8> kQubitP3Reorder = {0, 2, 1, 3, 6, 4, 7, 5};

void validate(const Scheme& scheme, const Message& msg) {
  if (msg.digits.size() != scheme.message_length())
    throw DomainError("message for " + scheme.name() + " needs " + std::to_string(scheme.message_length()) + " digits");
  for (int digit : msg.digits)
    if (digit < 0 || digit >= scheme.dim()) throw DomainError("message digit out of range for " + scheme.name());
}

EncodingOp qubit_p_tuple(std::size_t p, std::size_t value) {
  // value bits, most significant first: [g1 g0 | a_0 a_1 ... a_{p-3}]
  EncodingOp op;
  for (std::size_t j = 0; j + 2 < p; ++j) {
    const std::size_t bit = (value >> (p - 3 - j)) & 1U;
    op.gates.emplace_back(j, bit ? Gate::pauli_x() : Gate::identity());
  }
  op.gates.emplace_back(p - 2, pair_gate(static_cast<int>(value >> (p - 2))));
  return op;
}

}  // namespace

Scheme Scheme::qubit_p(std::size_t particles) {
  if (particles < 2) throw DomainError("qubit multiplet needs at least 2 particles");
  // The family is held densely: 2^p members of 2^p amplitudes each.
  if (particles > kMaxQubitMultiplet) throw ResourceError("qubit multiplet larger than " + std::to_string(kMaxQubitMultiplet) + " particles");
  return Scheme(Kind::kQubitP, particles);
}

Scheme Scheme::parse(const std::string& text) {
  if (text == "qubit3") return qubit3();
  if (text == "qutrit3") return qutrit3();
  const std::string prefix = "qubitp:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string tail = text.substr(prefix.size());
    std::size_t pos = 0;
    unsigned long p = 0;
    try {
      p = std::stoul(tail, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != tail.size()) throw DomainError("bad particle count in scheme '" + text + "'");
    return qubit_p(p);
  }
  throw DomainError("unknown scheme '" + text + "'");
}

std::size_t Scheme::family_size() const {
  if (kind_ == Kind::kQutrit3) return 27;
  return std::size_t{1} << particles_;
}

std::string Scheme::name() const {
  switch (kind_) {
    case Kind::kQubit3: return "qubit3";
    case Kind::kQutrit3: return "qutrit3";
    case Kind::kQubitP: return "qubitp:" + std::to_string(particles_);
  }
  return "?";
}

std::string Message::str() const {
  std::string s;
  for (int d : digits) s += static_cast<char>('0' + d);
  return s;
}

StateVector EncodingOp::apply(const StateVector& state) const {
  StateVector out = state;
  for (const auto& [particle, gate] : gates) out = apply_single(out, particle, gate);
  return out;
}

std::string EncodingOp::str() const {
  std::string s;
  for (const auto& [particle, gate] : gates) {
    if (!s.empty()) s += ' ';
    s += std::to_string(particle) + ":" + gate.label();
  }
  return s;
}

std::size_t index_of_message(const Scheme& scheme, const Message& msg) {
  validate(scheme, msg);
  std::size_t index = 0;
  for (int digit : msg.digits) index = index * static_cast<std::size_t>(scheme.dim()) + static_cast<std::size_t>(digit);
  return index;
}

Message decode_index(const Scheme& scheme, std::size_t family_index) {
  if (family_index >= scheme.family_size()) throw DomainError("family index out of range for " + scheme.name());
  Message msg{std::vector<int>(scheme.message_length())};
  const auto d = static_cast<std::size_t>(scheme.dim());
  for (std::size_t i = msg.digits.size(); i-- > 0;) {
    msg.digits[i] = static_cast<int>(family_index % d);
    family_index /= d;
  }
  return msg;
}

EncodingOp encode_ops_for_message(const Scheme& scheme, const Message& msg) {
  const std::size_t value = index_of_message(scheme, msg);
  switch (scheme.kind()) {
    case Scheme::Kind::kQubit3: {
      const auto& [a, b] = qubit3_table()[value];
      return EncodingOp{{{0, a}, {1, b}}};
    }
    case Scheme::Kind::kQubitP: {
      const std::size_t p = scheme.particles();
      return qubit_p_tuple(p, p == 3 ? kQubitP3Reorder[value] : value);
    }
    case Scheme::Kind::kQutrit3: {
      const int t0 = msg.digits[0];
      const int t1 = msg.digits[1];
      const int t2 = msg.digits[2];
      return EncodingOp{{{0, Gate::generalized(0, t0)}, {1, Gate::generalized(t2, t1)}}};
    }
  }
  throw DomainError("unknown scheme");
}

double capacity_bits(const Scheme& scheme) { return std::log2(static_cast<double>(scheme.family_size())); }

std::vector<Message> all_messages(const Scheme& scheme) {
  std::vector<Message> out;
  out.reserve(scheme.family_size());
  for (std::size_t k = 0; k < scheme.family_size(); ++k) out.push_back(decode_index(scheme, k));
  return out;
}

std::size_t GhzFamily::index_of_message(const Message& msg) const { return qsdc::index_of_message(scheme_, msg); }

Message GhzFamily::message_of_index(std::size_t index) const { return decode_index(scheme_, index); }

double GhzFamily::max_gram_deviation() const {
  // Members are sparse (d nonzero amplitudes each); overlap via sorted merges.
  using Entry = std::pair<std::size_t, Amplitude>;
  std::vector<std::vector<Entry>> sparse(members_.size());
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const auto amps = members_[m].amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i)
      if (amps[i] != Amplitude{}) sparse[m].emplace_back(i, amps[i]);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    for (std::size_t j = i; j < sparse.size(); ++j) {
      Amplitude g{};
      auto a = sparse[i].begin();
      auto b = sparse[j].begin();
      while (a != sparse[i].end() && b != sparse[j].end()) {
        if (a->first < b->first) {
          ++a;
        } else if (b->first < a->first) {
          ++b;
        } else {
          g += std::conj(a->second) * b->second;
          ++a;
          ++b;
        }
      }
      worst = std::max(worst, std::abs(g - Amplitude(i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

GhzFamily build_family(const Scheme& scheme) {
  StateVector base = make_ghz(scheme.particles(), scheme.dim());
  std::vector<StateVector> members;
  members.reserve(scheme.family_size());
  for (const Message& msg : all_messages(scheme)) members.push_back(encode_ops_for_message(scheme, msg).apply(base));
  GhzFamily family(scheme, std::move(base), std::move(members));
  if (family.max_gram_deviation() > kAlgebraTol)
    throw ConsistencyError("family for " + scheme.name() + " is not orthonormal");
  return family;
}

}  // namespace qsdc
