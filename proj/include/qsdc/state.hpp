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

// Dense state-vector simulation of small qudit registers.
//
// A register is a list of particles, each with its own number of levels.
// Protocol multiplets use a uniform level count d; an eavesdropper's probe
// ancilla may be appended with a different level count.
//
// Basis ordering: particle 0 is the most significant digit, so for three
// qubits |abc> lives at index 4a + 2b + c. Every module and every report
// uses this convention.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qsdc/rng.hpp"

namespace qsdc {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kDefaultMaxAmplitudes = std::size_t{1} << 20;

// Tolerances shared across modules.
inline constexpr double kAlgebraTol = 1e-12;  // exact constructions
inline constexpr double kNormTol = 1e-10;     // norms after arithmetic
inline constexpr double kSpanTol = 1e-8;      // span membership

class StateVector {
 public:
  /// Throws DomainError on a size mismatch or a norm off by more than kNormTol.
  StateVector(std::vector<int> levels, std::vector<Amplitude> amplitudes);

  /// Computational basis state |digits>.
  static StateVector basis(std::vector<int> levels, std::span<const int> digits);

  /// Uniform register of `particles` particles with `dim` levels each, in |0...0>.
  static StateVector zero(int dim, std::size_t particles);

  std::size_t particles() const { return levels_.size(); }
  int levels(std::size_t particle) const { return levels_.at(particle); }
  const std::vector<int>& shape() const { return levels_; }

  /// Level count shared by every particle; DomainError if the register is mixed.
  int uniform_dim() const;

  std::size_t size() const { return amplitudes_.size(); }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  Amplitude amplitude(std::size_t index) const { return amplitudes_.at(index); }

  double norm() const;

  std::size_t index_of(std::span<const int> digits) const;
  std::vector<int> digits_of(std::size_t index) const;

  /// |this> (x) |other>, other's particles appended after this register's.
  StateVector tensor(const StateVector& other) const;

  /// Multiplies every amplitude by a unit scalar.
  StateVector with_phase(Amplitude phase) const;

 private:
  StateVector(std::vector<int> levels, std::vector<Amplitude> amplitudes, bool);

  std::vector<int> levels_;
  std::vector<Amplitude> amplitudes_;
};

/// Row-major d x d matrix acting on one particle.
struct LocalMatrix {
  int dim = 0;
  std::vector<Amplitude> entries;

  Amplitude at(int row, int col) const { return entries[static_cast<std::size_t>(row * dim + col)]; }
};

class SingleParticleGate {
 public:
  enum class Kind { kIdentity, kPauliX, kPauliIY, kPauliZ, kGeneralized };

  static SingleParticleGate identity() { return SingleParticleGate(Kind::kIdentity, 0, 0); }
  static SingleParticleGate pauli_x() { return SingleParticleGate(Kind::kPauliX, 0, 0); }
  /// i*sigma_y, fixed as rows (0, 1) and (-1, 0).
  static SingleParticleGate pauli_iy() { return SingleParticleGate(Kind::kPauliIY, 0, 0); }
  static SingleParticleGate pauli_z() { return SingleParticleGate(Kind::kPauliZ, 0, 0); }
  /// U_mn = sum_j exp(2 pi i j m / d) |j + n mod d><j|.
  static SingleParticleGate generalized(int m, int n) { return SingleParticleGate(Kind::kGeneralized, m, n); }

  Kind kind() const { return kind_; }
  int m() const { return m_; }
  int n() const { return n_; }

  /// Matrix for a particle with `dim` levels. DomainError if incompatible.
  LocalMatrix matrix(int dim) const;

  /// "I", "X", "iY", "Z" or "U(m,n)".
  std::string label() const;

  friend bool operator==(const SingleParticleGate&, const SingleParticleGate&) = default;

 private:
  SingleParticleGate(Kind kind, int m, int n) : kind_(kind), m_(m), n_(n) {}

  Kind kind_;
  int m_;
  int n_;
};

struct MeasurementOutcome {
  int label = 0;
  StateVector post_state;
  double probability = 0.0;
};

/// Bell outcome labels used by measure_bell.
enum BellLabel : int { kPhiPlus = 0, kPhiMinus = 1, kPsiPlus = 2, kPsiMinus = 3 };

/// (1/sqrt(d)) sum_n |n n ... n> on p particles.
StateVector make_ghz(std::size_t particles, int dim,
                     std::size_t max_amplitudes = kDefaultMaxAmplitudes);

StateVector apply_local(const StateVector& state, std::size_t particle, const LocalMatrix& matrix);
StateVector apply_single(const StateVector& state, std::size_t particle, const SingleParticleGate& gate);

/// <a|b>, conjugate-linear in a.
Amplitude inner_product(const StateVector& a, const StateVector& b);

/// Born-rule probabilities of a projective measurement of `particles` in the
/// orthonormal `basis` (vectors over the listed particles, first listed most
/// significant). Entries sum to 1 minus the weight outside the basis span.
std::vector<double> outcome_distribution(const StateVector& state,
                                         std::span<const std::size_t> particles,
                                         std::span<const StateVector> basis);

/// Samples a projective measurement of `particles` in `basis`; label is the
/// basis index. Throws SpanError if the state has a component outside the
/// span of the basis larger than kSpanTol.
MeasurementOutcome measure_in_basis(const StateVector& state,
                                    std::span<const std::size_t> particles,
                                    std::span<const StateVector> basis, Rng& rng);

/// Single-particle bases: computational |k>, and the Fourier basis
/// (1/sqrt(d)) sum_j exp(2 pi i j k / d) |j>, which is |+x>, |-x> for d = 2.
std::vector<StateVector> computational_basis(int dim);
std::vector<StateVector> fourier_basis(int dim);

/// Bell basis ordered Phi+, Phi-, Psi+, Psi-.
std::vector<StateVector> bell_basis();

MeasurementOutcome measure_computational(const StateVector& state, std::size_t particle, Rng& rng);
/// Label is the Fourier index k.
MeasurementOutcome measure_fourier(const StateVector& state, std::size_t particle, Rng& rng);
/// Qubits only; label +1 for |+x>, -1 for |-x>.
MeasurementOutcome measure_x_basis(const StateVector& state, std::size_t particle, Rng& rng);
/// Qubits only; label is a BellLabel.
MeasurementOutcome measure_bell(const StateVector& state, std::size_t first, std::size_t second, Rng& rng);

/// Measures the leading members.front().particles() particles against an
/// orthonormal family. Outcome k has probability |<member_k|state>|^2 and
/// post-state member_k (times the residual state of any trailing particles).
MeasurementOutcome measure_family(const StateVector& state, std::span<const StateVector> members, Rng& rng);

/// Marginal distribution of computational outcomes on `particles`, indexed
/// with the first listed particle most significant.
std::vector<double> computational_marginal(const StateVector& state, std::span<const std::size_t> particles);

}  // namespace qsdc
