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

#include "qsdc/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

std::size_t register_size(const std::vector<int>& levels) {
  std::size_t size = 1;
  for (int l : levels) {
    if (l < 2) throw DomainError("every particle needs at least 2 levels");
    if (size > SIZE_MAX / static_cast<std::size_t>(l)) throw ResourceError("register size overflows");
    size *= static_cast<std::size_t>(l);
  }
  return size;
}

std::vector<std::size_t> strides(const std::vector<int>& levels) {
  std::vector<std::size_t> out(levels.size());
  std::size_t s = 1;
  for (std::size_t i = levels.size(); i-- > 0;) {
    out[i] = s;
    s *= static_cast<std::size_t>(levels[i]);
  }
  return out;
}

Amplitude root_of_unity(long long k, int d) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % d) / d;
  return {std::cos(angle), std::sin(angle)};
}

// For every full-register index, its index within the measured particles
// and within the remaining particles.
struct Split {
  std::vector<std::size_t> sub;
  std::vector<std::size_t> rest;
  std::vector<int> sub_levels;
  std::vector<int> rest_levels;
  std::size_t sub_size = 1;
  std::size_t rest_size = 1;
};

Split split_register(const StateVector& state, std::span<const std::size_t> particles) {
  const std::size_t p = state.particles();
  std::vector<bool> chosen(p, false);
  Split s;
  for (std::size_t q : particles) {
    if (q >= p) throw DomainError("particle index out of range");
    if (chosen[q]) throw DomainError("duplicate particle index");
    chosen[q] = true;
    s.sub_levels.push_back(state.levels(q));
  }
  std::vector<std::size_t> rest_particles;
  for (std::size_t q = 0; q < p; ++q) {
    if (!chosen[q]) {
      rest_particles.push_back(q);
      s.rest_levels.push_back(state.levels(q));
    }
  }
  const auto full_strides = strides(state.shape());
  const auto sub_strides = strides(s.sub_levels);
  const auto rest_strides = strides(s.rest_levels);
  for (int l : s.sub_levels) s.sub_size *= static_cast<std::size_t>(l);
  for (int l : s.rest_levels) s.rest_size *= static_cast<std::size_t>(l);

  s.sub.resize(state.size());
  s.rest.resize(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    std::size_t sub = 0;
    std::size_t rest = 0;
    for (std::size_t j = 0; j < particles.size(); ++j) {
      const std::size_t q = particles[j];
      sub += (i / full_strides[q]) % static_cast<std::size_t>(state.levels(q)) * sub_strides[j];
    }
    for (std::size_t j = 0; j < rest_particles.size(); ++j) {
      const std::size_t q = rest_particles[j];
      rest += (i / full_strides[q]) % static_cast<std::size_t>(state.levels(q)) * rest_strides[j];
    }
    s.sub[i] = sub;
    s.rest[i] = rest;
  }
  return s;
}

// Partial overlaps c_k[rest] = sum_sub conj(b_k[sub]) psi[sub, rest].
std::vector<std::vector<Amplitude>> partial_overlaps(const StateVector& state, const Split& split,
                                                     std::span<const StateVector> basis) {
  std::vector<std::vector<Amplitude>> c(basis.size(), std::vector<Amplitude>(split.rest_size));
  const auto psi = state.amplitudes();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].shape() != split.sub_levels) throw DomainError("basis vector shape does not match measured particles");
    const auto b = basis[k].amplitudes();
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (psi[i] == Amplitude{}) continue;
      c[k][split.rest[i]] += std::conj(b[split.sub[i]]) * psi[i];
    }
  }
  return c;
}

double squared_norm(const std::vector<Amplitude>& v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return s;
}

std::size_t sample(const std::vector<double>& probs, Rng& rng) {
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    acc += probs[k];
    last_nonzero = k;
    if (u < acc) return k;
  }
  return last_nonzero;
}

}  // namespace

StateVector::StateVector(std::vector<int> levels, std::vector<Amplitude> amplitudes, bool)
    : levels_(std::move(levels)), amplitudes_(std::move(amplitudes)) {}

StateVector::StateVector(std::vector<int> levels, std::vector<Amplitude> amplitudes)
    : levels_(std::move(levels)), amplitudes_(std::move(amplitudes)) {
  if (levels_.empty()) throw DomainError("register needs at least one particle");
  if (register_size(levels_) != amplitudes_.size()) throw DomainError("amplitude count does not match register shape");
  if (std::abs(norm() - 1.0) > kNormTol) throw DomainError("state is not normalized");
}

StateVector StateVector::basis(std::vector<int> levels, std::span<const int> digits) {
  const std::size_t size = register_size(levels);
  if (digits.size() != levels.size()) throw DomainError("digit count does not match register");
  std::vector<Amplitude> amps(size);
  const auto st = strides(levels);
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= levels[i]) throw DomainError("digit out of range");
    index += static_cast<std::size_t>(digits[i]) * st[i];
  }
  amps[index] = 1.0;
  return StateVector(std::move(levels), std::move(amps), true);
}

StateVector StateVector::zero(int dim, std::size_t particles) {
  std::vector<int> digits(particles, 0);
  return basis(std::vector<int>(particles, dim), digits);
}

int StateVector::uniform_dim() const {
  if (std::adjacent_find(levels_.begin(), levels_.end(), std::not_equal_to<>()) != levels_.end())
    throw DomainError("register has mixed level counts");
  return levels_.front();
}

double StateVector::norm() const { return std::sqrt(squared_norm(amplitudes_)); }

std::size_t StateVector::index_of(std::span<const int> digits) const {
  if (digits.size() != levels_.size()) throw DomainError("digit count does not match register");
  const auto st = strides(levels_);
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= levels_[i]) throw DomainError("digit out of range");
    index += static_cast<std::size_t>(digits[i]) * st[i];
  }
  return index;
}

std::vector<int> StateVector::digits_of(std::size_t index) const {
  if (index >= size()) throw DomainError("basis index out of range");
  std::vector<int> digits(levels_.size());
  for (std::size_t i = levels_.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % static_cast<std::size_t>(levels_[i]));
    index /= static_cast<std::size_t>(levels_[i]);
  }
  return digits;
}

StateVector StateVector::tensor(const StateVector& other) const {
  std::vector<int> levels = levels_;
  levels.insert(levels.end(), other.levels_.begin(), other.levels_.end());
  if (register_size(levels) > kDefaultMaxAmplitudes) throw ResourceError("register exceeds amplitude limit");
  std::vector<Amplitude> amps;
  amps.reserve(size() * other.size());
  for (const auto& a : amplitudes_)
    for (const auto& b : other.amplitudes_) amps.push_back(a * b);
  return StateVector(std::move(levels), std::move(amps), true);
}

StateVector StateVector::with_phase(Amplitude phase) const {
  if (std::abs(std::abs(phase) - 1.0) > kAlgebraTol) throw DomainError("phase must have unit modulus");
  std::vector<Amplitude> amps = amplitudes_;
  for (auto& a : amps) a *= phase;
  return StateVector(levels_, std::move(amps), true);
}

LocalMatrix SingleParticleGate::matrix(int dim) const {
  LocalMatrix u{dim, std::vector<Amplitude>(static_cast<std::size_t>(dim * dim))};
  auto set = [&](int r, int c, Amplitude v) { u.entries[static_cast<std::size_t>(r * dim + c)] = v; };
  if (kind_ != Kind::kGeneralized && kind_ != Kind::kIdentity && dim != 2)
    throw DomainError("Pauli gates act on qubits only; use U(m,n) for d != 2");
  switch (kind_) {
    case Kind::kIdentity:
      for (int i = 0; i < dim; ++i) set(i, i, 1.0);
      break;
    case Kind::kPauliX:
      set(0, 1, 1.0);
      set(1, 0, 1.0);
      break;
    case Kind::kPauliIY:
      set(0, 1, 1.0);
      set(1, 0, -1.0);
      break;
    case Kind::kPauliZ:
      set(0, 0, 1.0);
      set(1, 1, -1.0);
      break;
    case Kind::kGeneralized:
      if (m_ < 0 || m_ >= dim || n_ < 0 || n_ >= dim) throw DomainError("U(m,n) indices must lie in [0, d)");
      for (int j = 0; j < dim; ++j) set((j + n_) % dim, j, root_of_unity(static_cast<long long>(j) * m_, dim));
      break;
  }
  return u;
}

std::string SingleParticleGate::label() const {
  switch (kind_) {
    case Kind::kIdentity: return "I";
    case Kind::kPauliX: return "X";
    case Kind::kPauliIY: return "iY";
    case Kind::kPauliZ: return "Z";
    case Kind::kGeneralized: return "U(" + std::to_string(m_) + "," + std::to_string(n_) + ")";
  }
  return "?";
}

StateVector make_ghz(std::size_t particles, int dim, std::size_t max_amplitudes) {
  if (particles < 2) throw DomainError("GHZ state needs at least 2 particles");
  if (dim < 2) throw DomainError("GHZ state needs at least 2 levels");
  std::vector<int> levels(particles, dim);
  std::size_t size = 1;
  for (std::size_t i = 0; i < particles; ++i) {
    if (size > max_amplitudes / static_cast<std::size_t>(dim)) throw ResourceError("GHZ register exceeds amplitude limit");
    size *= static_cast<std::size_t>(dim);
  }
  std::vector<Amplitude> amps(size);
  // |n...n> sits at n * (1 + d + d^2 + ...).
  std::size_t repunit = 0;
  for (std::size_t i = 0; i < particles; ++i) repunit = repunit * static_cast<std::size_t>(dim) + 1;
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int n = 0; n < dim; ++n) amps[static_cast<std::size_t>(n) * repunit] = a;
  return StateVector(std::move(levels), std::move(amps));
}

StateVector apply_local(const StateVector& state, std::size_t particle, const LocalMatrix& matrix) {
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  const int d = state.levels(particle);
  if (matrix.dim != d) throw DomainError("gate dimension does not match particle");
  std::size_t stride = 1;
  for (std::size_t q = particle + 1; q < state.particles(); ++q) stride *= static_cast<std::size_t>(state.levels(q));
  const auto in = state.amplitudes();
  std::vector<Amplitude> out(in.size());
  const std::size_t block = stride * static_cast<std::size_t>(d);
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t low = 0; low < stride; ++low) {
      for (int r = 0; r < d; ++r) {
        Amplitude acc{};
        for (int c = 0; c < d; ++c) acc += matrix.at(r, c) * in[base + static_cast<std::size_t>(c) * stride + low];
        out[base + static_cast<std::size_t>(r) * stride + low] = acc;
      }
    }
  }
  return StateVector(state.shape(), std::move(out));
}

StateVector apply_single(const StateVector& state, std::size_t particle, const SingleParticleGate& gate) {
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  return apply_local(state, particle, gate.matrix(state.levels(particle)));
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.shape() != b.shape()) throw DomainError("inner product of states with different shapes");
  Amplitude acc{};
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

std::vector<double> outcome_distribution(const StateVector& state, std::span<const std::size_t> particles,
                                         std::span<const StateVector> basis) {
  const Split split = split_register(state, particles);
  const auto c = partial_overlaps(state, split, basis);
  std::vector<double> probs(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) probs[k] = squared_norm(c[k]);
  return probs;
}

MeasurementOutcome measure_in_basis(const StateVector& state, std::span<const std::size_t> particles,
                                    std::span<const StateVector> basis, Rng& rng) {
  if (basis.empty()) throw DomainError("empty measurement basis");
  const Split split = split_register(state, particles);
  const auto c = partial_overlaps(state, split, basis);
  std::vector<double> probs(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) probs[k] = squared_norm(c[k]);

  if (basis.size() < split.sub_size) {
    // Incomplete basis: measure the weight it misses explicitly.
    std::vector<Amplitude> residual(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const auto b = basis[k].amplitudes();
      for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= b[split.sub[i]] * c[k][split.rest[i]];
    }
    const double r = std::sqrt(squared_norm(residual));
    if (r > kSpanTol) throw SpanError("state has a component of norm " + std::to_string(r) + " outside the measured family");
  }

  const std::size_t k = sample(probs, rng);
  const double pk = probs[k];
  std::vector<Amplitude> rest = c[k];
  const double scale = 1.0 / std::sqrt(pk);
  for (auto& a : rest) a *= scale;
  if (split.rest_size == 1) rest[0] = 1.0;  // whole register measured: drop the global phase

  std::vector<Amplitude> post(state.size());
  const auto b = basis[k].amplitudes();
  for (std::size_t i = 0; i < post.size(); ++i) post[i] = b[split.sub[i]] * rest[split.rest[i]];
  return {static_cast<int>(k), StateVector(state.shape(), std::move(post)), pk};
}

std::vector<StateVector> computational_basis(int dim) {
  std::vector<StateVector> out;
  for (int k = 0; k < dim; ++k) {
    const int digit[] = {k};
    out.push_back(StateVector::basis({dim}, digit));
  }
  return out;
}

std::vector<StateVector> fourier_basis(int dim) {
  std::vector<StateVector> out;
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int k = 0; k < dim; ++k) {
    std::vector<Amplitude> amps(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) amps[static_cast<std::size_t>(j)] = a * root_of_unity(static_cast<long long>(j) * k, dim);
    out.emplace_back(std::vector<int>{dim}, std::move(amps));
  }
  return out;
}

std::vector<StateVector> bell_basis() {
  const double a = 1.0 / std::sqrt(2.0);
  const std::vector<int> qubits{2, 2};
  return {
      StateVector(qubits, {a, 0.0, 0.0, a}),
      StateVector(qubits, {a, 0.0, 0.0, -a}),
      StateVector(qubits, {0.0, a, a, 0.0}),
      StateVector(qubits, {0.0, a, -a, 0.0}),
  };
}

MeasurementOutcome measure_computational(const StateVector& state, std::size_t particle, Rng& rng) {
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  const std::size_t which[] = {particle};
  return measure_in_basis(state, which, computational_basis(state.levels(particle)), rng);
}

MeasurementOutcome measure_fourier(const StateVector& state, std::size_t particle, Rng& rng) {
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  const std::size_t which[] = {particle};
  return measure_in_basis(state, which, fourier_basis(state.levels(particle)), rng);
}

MeasurementOutcome measure_x_basis(const StateVector& state, std::size_t particle, Rng& rng) {
  if (particle >= state.particles()) throw DomainError("particle index out of range");
  if (state.levels(particle) != 2) throw DomainError("x-basis measurement needs a qubit");
  auto out = measure_fourier(state, particle, rng);
  out.label = out.label == 0 ? +1 : -1;
  return out;
}

MeasurementOutcome measure_bell(const StateVector& state, std::size_t first, std::size_t second, Rng& rng) {
  if (first == second) throw DomainError("Bell measurement needs two distinct particles");
  if (first >= state.particles() || second >= state.particles()) throw DomainError("particle index out of range");
  if (state.levels(first) != 2 || state.levels(second) != 2) throw DomainError("Bell measurement needs qubits");
  const std::size_t which[] = {first, second};
  return measure_in_basis(state, which, bell_basis(), rng);
}

MeasurementOutcome measure_family(const StateVector& state, std::span<const StateVector> members, Rng& rng) {
  if (members.empty()) throw DomainError("empty family");
  const std::size_t p = members.front().particles();
  if (p > state.particles()) throw DomainError("family has more particles than the state");
  std::vector<std::size_t> which(p);
  for (std::size_t i = 0; i < p; ++i) which[i] = i;
  return measure_in_basis(state, which, members, rng);
}

std::vector<double> computational_marginal(const StateVector& state, std::span<const std::size_t> particles) {
  const Split split = split_register(state, particles);
  std::vector<double> out(split.sub_size, 0.0);
  const auto psi = state.amplitudes();
  for (std::size_t i = 0; i < psi.size(); ++i) out[split.sub[i]] += std::norm(psi[i]);
  return out;
}

}  // namespace qsdc
