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

#include "qsdc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

// Outcomes with ideal probability below this are outside the support.
constexpr double kSupportTol = 1e-9;

using Actor = TranscriptEvent::Actor;
using EventKind = TranscriptEvent::Kind;

std::vector<StateVector> single_basis(CheckBasis basis, int dim) {
  return basis == CheckBasis::kZ ? computational_basis(dim) : fourier_basis(dim);
}

MeasurementOutcome measure_one(const StateVector& state, std::size_t particle, CheckBasis basis, Rng& rng) {
  return basis == CheckBasis::kZ ? measure_computational(state, particle, rng) : measure_fourier(state, particle, rng);
}

// Alice's joint basis for the Method 2 X branch: the Bell basis for two
// qubits, the GHZ family of her register for more qubits, or the two-qutrit
// maximally entangled basis (U(m,n) (x) I)|Phi> for the qutrit triplet.
std::vector<StateVector> make_alice_joint_basis(const Scheme& scheme) {
  const std::size_t q = scheme.particles() - 1;
  if (scheme.dim() == 2) {
    if (q == 1) return fourier_basis(2);
    if (q == 2) return bell_basis();
    return build_family(Scheme::qubit_p(q)).members();
  }
  const StateVector phi = make_ghz(2, scheme.dim());
  std::vector<StateVector> out;
  for (int m = 0; m < scheme.dim(); ++m)
    for (int n = 0; n < scheme.dim(); ++n) out.push_back(apply_single(phi, 0, SingleParticleGate::generalized(m, n)));
  return out;
}

// Alice's state after Bob obtains Fourier outcome k on the check particle of
// the base GHZ state: (1/sqrt(d)) sum_n exp(-2 pi i n k / d) |n...n>.
StateVector conditional_after_bob_x(const Scheme& scheme, int k) {
  const StateVector base = make_ghz(scheme.particles(), scheme.dim());
  const StateVector bob = fourier_basis(scheme.dim())[static_cast<std::size_t>(k)];
  const std::size_t q = scheme.particles() - 1;
  std::vector<int> levels(q, scheme.dim());
  std::size_t size = 1;
  for (std::size_t i = 0; i < q; ++i) size *= static_cast<std::size_t>(scheme.dim());
  std::vector<Amplitude> amps(size);
  const auto psi = base.amplitudes();
  const auto b = bob.amplitudes();
  const auto d = static_cast<std::size_t>(scheme.dim());
  for (std::size_t i = 0; i < psi.size(); ++i) amps[i / d] += std::conj(b[i % d]) * psi[i];
  double n2 = 0.0;
  for (const auto& a : amps) n2 += std::norm(a);
  for (auto& a : amps) a /= std::sqrt(n2);
  return StateVector(std::move(levels), std::move(amps));
}

std::vector<std::int64_t> as_values(std::span<const std::size_t> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

void ProtocolConfig::validate() const {
  if (batch_size < 1) throw DomainError("batch-size must be at least 1");
  if (!(check_fraction > 0.0 && check_fraction < 1.0)) throw DomainError("check-fraction must lie in (0, 1)");
  if (!(abort_threshold >= 0.0 && abort_threshold <= 1.0)) throw DomainError("abort-threshold must lie in [0, 1]");
  if (first_check_size() + sampling_size() >= batch_size)
    throw DomainError("check-fraction leaves no payload positions in a batch of " + std::to_string(batch_size));
  for (const Message& m : payload) (void)index_of_message(scheme, m);
}

std::size_t ProtocolConfig::first_check_size() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(check_fraction * static_cast<double>(batch_size))));
}

std::size_t ProtocolConfig::sampling_size() const { return first_check_size(); }

std::size_t ProtocolConfig::payload_slots() const {
  const std::size_t reserved = first_check_size() + sampling_size();
  return reserved >= batch_size ? 0 : batch_size - reserved;
}

std::string sequence_name(const Scheme& scheme, std::size_t particle) {
  if (scheme.particles() == 3 && particle < 3) return std::string(1, static_cast<char>('A' + particle));
  return "P" + std::to_string(particle);
}

ProtocolContext::ProtocolContext(const Scheme& scheme) : family(build_family(scheme)) {
  for (const Message& m : all_messages(scheme)) ops.push_back(encode_ops_for_message(scheme, m));
  alice_particles.resize(scheme.particles() - 1);
  std::iota(alice_particles.begin(), alice_particles.end(), std::size_t{0});
  alice_joint_basis = make_alice_joint_basis(scheme);
  for (int k = 0; k < scheme.dim(); ++k) {
    const StateVector expected = conditional_after_bob_x(scheme, k);
    int label = -1;
    for (std::size_t j = 0; j < alice_joint_basis.size(); ++j) {
      if (std::abs(std::abs(inner_product(alice_joint_basis[j], expected)) - 1.0) < kNormTol) label = static_cast<int>(j);
    }
    if (label < 0) throw ConsistencyError("Method 2 basis does not contain Alice's conditional state");
    method2_expected.push_back(label);
  }
}

Message PayloadCursor::take(const Scheme& scheme, bool& padding) {
  if (next_ < payload_.size()) {
    padding = false;
    return payload_[next_++];
  }
  padding = true;
  return Message{std::vector<int>(scheme.message_length(), 0)};
}

BatchSession::BatchSession(const ProtocolContext& context, std::size_t batch_size, std::size_t batch_index,
                           Transcript* transcript)
    : context_(context),
      batch_index_(batch_index),
      transcript_(transcript),
      multiplets_(batch_size, context.family.base()),
      roles_(batch_size, Role::kFresh),
      ops_(batch_size) {
  if (batch_size == 0) throw DomainError("batch size must be positive");
}

void BatchSession::announce(Actor actor, EventKind kind, std::size_t sequence, std::vector<std::int64_t> values) {
  if (transcript_ == nullptr) return;
  transcript_->push_back(TranscriptEvent{actor, kind, batch_index_, sequence, std::move(values)});
}

std::size_t BatchSession::count(Role role) const {
  return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), role));
}

EveRecord BatchSession::transmit(std::size_t particle, const ChannelModel& channel, Rng& eve_rng) {
  const std::size_t check = context_.family.scheme().check_particle();
  if (particle == check) {
    if (phase_ != Phase::kPrepared) throw ProtocolStateError("check sequence already sent");
  } else {
    const bool after_first = phase_ == Phase::kEncoded && particle + 1 == check;
    const bool after_post = phase_ == Phase::kChecked && last_sent_ && *last_sent_ == particle + 1;
    if (!after_first && !after_post) throw ProtocolStateError("sequence " + std::to_string(particle) + " sent out of order");
  }
  EveRecord record = qsdc::transmit(multiplets_, particle, channel, eve_rng);
  last_sent_ = particle;
  phase_ = particle == check ? Phase::kCheckSent : Phase::kInTransit;
  return record;
}

void BatchSession::tamper(std::size_t position, StateVector state) {
  if (phase_ != Phase::kCheckSent && phase_ != Phase::kInTransit) throw ProtocolStateError("no sequence in transit");
  if (state.particles() < context_.family.scheme().particles()) throw DomainError("tampered state lost protocol particles");
  multiplets_.at(position) = std::move(state);
}

CheckResult BatchSession::security_check_method1(std::span<const std::size_t> positions, std::span<const CheckBasis> bases,
                                                 Rng& rng) {
  return run_first_check(CheckMethod::kMethod1, positions, bases, rng);
}

CheckResult BatchSession::security_check_method2(std::span<const std::size_t> positions, std::span<const CheckBasis> bases,
                                                 Rng& rng) {
  return run_first_check(CheckMethod::kMethod2, positions, bases, rng);
}

CheckResult BatchSession::first_check(CheckMethod method, std::size_t count, Rng& rng) {
  std::vector<std::size_t> fresh;
  for (std::size_t i = 0; i < size(); ++i)
    if (roles_[i] == Role::kFresh) fresh.push_back(i);
  auto positions = rng.sample_without_replacement(std::move(fresh), count);
  std::sort(positions.begin(), positions.end());
  std::vector<CheckBasis> bases;
  for (std::size_t i = 0; i < positions.size(); ++i) bases.push_back(rng.coin() ? CheckBasis::kX : CheckBasis::kZ);
  return run_first_check(method, positions, bases, rng);
}

CheckResult BatchSession::run_first_check(CheckMethod method, std::span<const std::size_t> positions,
                                          std::span<const CheckBasis> bases, Rng& rng) {
  if (phase_ != Phase::kCheckSent) throw ProtocolStateError("first check needs the check sequence at Bob and nothing encoded");
  if (positions.size() != bases.size()) throw DomainError("one basis per checked position");
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] >= size()) throw DomainError("check position out of range");
    if (roles_[positions[i]] != Role::kFresh) throw ProtocolStateError("position " + std::to_string(positions[i]) + " already consumed");
    for (std::size_t j = 0; j < i; ++j)
      if (positions[j] == positions[i]) throw ProtocolStateError("position " + std::to_string(positions[i]) + " listed twice");
  }

  const Scheme& scheme = context_.family.scheme();
  const std::size_t check = scheme.check_particle();
  const int d = scheme.dim();

  CheckResult result;
  result.kind = CheckResult::Kind::kFirst;
  result.batch = batch_index_;
  result.sequence = check;

  std::vector<std::int64_t> bob_outcomes;
  std::vector<std::int64_t> alice_outcomes;
  std::vector<std::int64_t> basis_values;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::size_t pos = positions[i];
    const CheckBasis basis = bases[i];
    basis_values.push_back(static_cast<std::int64_t>(basis));

    auto bob = measure_one(multiplets_[pos], check, basis, rng);
    StateVector state = std::move(bob.post_state);
    const int bob_digit = bob.label;
    bob_outcomes.push_back(bob_digit);

    bool match = true;
    if (basis == CheckBasis::kX && method == CheckMethod::kMethod2) {
      auto alice = measure_in_basis(state, context_.alice_particles, context_.alice_joint_basis, rng);
      alice_outcomes.push_back(alice.label);
      match = alice.label == context_.method2_expected[static_cast<std::size_t>(bob_digit)];
      state = std::move(alice.post_state);
    } else {
      int digit_sum = bob_digit;
      for (std::size_t q : context_.alice_particles) {
        auto alice = measure_one(state, q, basis, rng);
        alice_outcomes.push_back(alice.label);
        digit_sum += alice.label;
        if (basis == CheckBasis::kZ && alice.label != bob_digit) match = false;
        state = std::move(alice.post_state);
      }
      if (basis == CheckBasis::kX && digit_sum % d != 0) match = false;
    }
    multiplets_[pos] = std::move(state);
    roles_[pos] = Role::kFirstCheck;

    ++result.samples;
    if (basis == CheckBasis::kZ) {
      ++result.z_samples;
      if (!match) ++result.z_mismatches;
    } else {
      ++result.x_samples;
      if (!match) ++result.x_mismatches;
    }
    if (!match) ++result.mismatches;
  }

  announce(Actor::kBob, EventKind::kPositionsAnnounce, check, as_values(positions));
  announce(Actor::kBob, EventKind::kBasisAnnounce, check, std::move(basis_values));
  announce(Actor::kBob, EventKind::kOutcomeAnnounce, check, std::move(bob_outcomes));
  announce(Actor::kAlice, EventKind::kOutcomeAnnounce, check, std::move(alice_outcomes));
  phase_ = Phase::kFirstChecked;
  return result;
}

void BatchSession::alice_encode(PayloadCursor& payload, std::size_t sampling_count, Rng& rng) {
  if (phase_ != Phase::kFirstChecked) throw ProtocolStateError("encoding requires a passed first check");
  const Scheme& scheme = context_.family.scheme();

  std::vector<std::size_t> fresh;
  for (std::size_t i = 0; i < size(); ++i)
    if (roles_[i] == Role::kFresh) fresh.push_back(i);
  for (std::size_t pos : rng.sample_without_replacement(fresh, sampling_count)) {
    const std::size_t op = rng.uniform_index(context_.ops.size());
    multiplets_[pos] = context_.ops[op].apply(multiplets_[pos]);
    roles_[pos] = Role::kSampling;
    ops_[pos] = op;
  }
  for (std::size_t pos : fresh) {
    if (roles_[pos] != Role::kFresh) continue;
    bool padding = false;
    const Message msg = payload.take(scheme, padding);
    const std::size_t op = index_of_message(scheme, msg);
    multiplets_[pos] = context_.ops[op].apply(multiplets_[pos]);
    roles_[pos] = padding ? Role::kPadding : Role::kPayload;
    ops_[pos] = op;
  }
  phase_ = Phase::kEncoded;
}

CheckResult BatchSession::post_transmission_check(std::size_t sequence, Rng& rng) {
  const Scheme& scheme = context_.family.scheme();
  if (phase_ != Phase::kInTransit || !last_sent_ || *last_sent_ != sequence || sequence == scheme.check_particle())
    throw ProtocolStateError("post-transmission check must follow the transmission of an encoded sequence");

  CheckResult result;
  result.kind = CheckResult::Kind::kPostTransmission;
  result.batch = batch_index_;
  result.sequence = sequence;

  std::vector<std::size_t> unused;
  for (std::size_t i = 0; i < size(); ++i)
    if (roles_[i] == Role::kSampling) unused.push_back(i);
  phase_ = Phase::kChecked;
  if (unused.empty()) {
    result.skipped = true;
    warnings_.push_back("batch " + std::to_string(batch_index_) + ": no sampling positions left for the check after sequence " +
                        sequence_name(scheme, sequence));
    return result;
  }

  auto positions = rng.sample_without_replacement(unused, std::max<std::size_t>(1, unused.size() / 2));
  std::sort(positions.begin(), positions.end());
  std::vector<std::int64_t> op_values;
  std::vector<std::int64_t> basis_values;
  std::vector<CheckBasis> bases;
  for (std::size_t pos : positions) {
    op_values.push_back(static_cast<std::int64_t>(*ops_[pos]));
    bases.push_back(rng.coin() ? CheckBasis::kX : CheckBasis::kZ);
    basis_values.push_back(static_cast<std::int64_t>(bases.back()));
  }
  announce(Actor::kAlice, EventKind::kPositionsAnnounce, sequence, as_values(positions));
  announce(Actor::kAlice, EventKind::kOpAnnounce, sequence, std::move(op_values));
  announce(Actor::kAlice, EventKind::kBasisAnnounce, sequence, std::move(basis_values));

  // Bob holds particles p-1 .. sequence, Alice the rest.
  std::vector<std::int64_t> bob_outcomes;
  std::vector<std::int64_t> alice_outcomes;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::size_t pos = positions[i];
    StateVector state = multiplets_[pos];
    std::vector<int> digits(scheme.particles());
    for (std::size_t q = scheme.particles(); q-- > 0;) {
      auto m = measure_one(state, q, bases[i], rng);
      digits[q] = m.label;
      (q >= sequence ? bob_outcomes : alice_outcomes).push_back(m.label);
      state = std::move(m.post_state);
    }
    multiplets_[pos] = std::move(state);
    roles_[pos] = Role::kSamplingChecked;

    const StateVector& ideal = context_.family.member(*ops_[pos]);
    const bool match = product_outcome_probability(ideal, bases[i], digits) > kSupportTol;
    ++result.samples;
    if (bases[i] == CheckBasis::kZ) {
      ++result.z_samples;
      if (!match) ++result.z_mismatches;
    } else {
      ++result.x_samples;
      if (!match) ++result.x_mismatches;
    }
    if (!match) ++result.mismatches;
  }
  announce(Actor::kBob, EventKind::kOutcomeAnnounce, sequence, std::move(bob_outcomes));
  announce(Actor::kAlice, EventKind::kOutcomeAnnounce, sequence, std::move(alice_outcomes));
  return result;
}

std::vector<DecodedPosition> BatchSession::bob_decode(Rng& rng) {
  if (phase_ != Phase::kChecked || !last_sent_ || *last_sent_ != 0)
    throw ProtocolStateError("decoding requires every sequence received and checked");
  const Scheme& scheme = context_.family.scheme();
  std::vector<DecodedPosition> out;
  for (std::size_t pos = 0; pos < size(); ++pos) {
    if (roles_[pos] != Role::kPayload && roles_[pos] != Role::kPadding) continue;
    DecodedPosition decoded;
    decoded.position = pos;
    decoded.padding = roles_[pos] == Role::kPadding;
    try {
      auto m = measure_family(multiplets_[pos], context_.family.members(), rng);
      decoded.message = decode_index(scheme, static_cast<std::size_t>(m.label));
      multiplets_[pos] = std::move(m.post_state);
    } catch (const SpanError&) {
      decoded.message.reset();
    }
    out.push_back(std::move(decoded));
  }
  phase_ = Phase::kDecoded;
  return out;
}

double product_outcome_probability(const StateVector& state, CheckBasis basis, std::span<const int> digits) {
  if (digits.empty() || digits.size() > state.particles()) throw DomainError("digit count does not fit the register");
  StateVector product = single_basis(basis, state.levels(0)).at(static_cast<std::size_t>(digits[0]));
  std::vector<std::size_t> particles{0};
  for (std::size_t q = 1; q < digits.size(); ++q) {
    product = product.tensor(single_basis(basis, state.levels(q)).at(static_cast<std::size_t>(digits[q])));
    particles.push_back(q);
  }
  const StateVector one[] = {product};
  return outcome_distribution(state, particles, one).front();
}

SessionReport run_session(const ProtocolConfig& config, const ChannelModel& channel) {
  config.validate();
  const ProtocolContext context(config.scheme);
  return run_session(config, channel, context);
}

SessionReport run_session(const ProtocolConfig& config, const ChannelModel& channel, const ProtocolContext& context) {
  config.validate();
  if (!(context.family.scheme() == config.scheme)) throw DomainError("protocol context built for a different scheme");
  const Scheme& scheme = config.scheme;

  Rng honest(config.seed);
  Rng eve(channel_seed(config.seed));
  SessionReport report;
  PayloadCursor cursor(config.payload);

  for (std::size_t batch = 0; batch == 0 || !cursor.exhausted(); ++batch) {
    BatchSession session(context, config.batch_size, batch, &report.transcript);
    BatchAccounting accounting;

    auto abort_on = [&](const CheckResult& check) {
      report.checks.push_back(check);
      if (check.mismatch_rate() <= config.abort_threshold) return false;
      report.aborted = true;
      report.abort_batch = batch;
      report.abort_stage = "batch " + std::to_string(batch) + " check " + sequence_name(scheme, check.sequence);
      report.transcript.push_back(TranscriptEvent{TranscriptEvent::Actor::kAlice, TranscriptEvent::Kind::kAbortAnnounce, batch,
                                                  check.sequence, {static_cast<std::int64_t>(check.mismatches)}});
      return true;
    };
    auto finish_accounting = [&]() {
      accounting.first_check = session.count(BatchSession::Role::kFirstCheck);
      accounting.sampling = session.count(BatchSession::Role::kSampling) + session.count(BatchSession::Role::kSamplingChecked);
      accounting.payload = session.count(BatchSession::Role::kPayload);
      accounting.padding = session.count(BatchSession::Role::kPadding);
      report.batches.push_back(accounting);
      report.warnings.insert(report.warnings.end(), session.warnings().begin(), session.warnings().end());
    };

    report.eve.append(session.transmit(scheme.check_particle(), channel, eve));
    if (abort_on(session.first_check(config.check_method, config.first_check_size(), honest))) {
      finish_accounting();
      break;
    }
    session.alice_encode(cursor, config.sampling_size(), honest);

    bool aborted = false;
    for (std::size_t seq = scheme.check_particle(); seq-- > 0;) {
      report.eve.append(session.transmit(seq, channel, eve));
      if (abort_on(session.post_transmission_check(seq, honest))) {
        aborted = true;
        break;
      }
    }
    if (aborted) {
      finish_accounting();
      break;
    }

    for (const DecodedPosition& d : session.bob_decode(honest)) {
      if (!d.message) {
        report.corrupted.emplace_back(batch, d.position);
        continue;
      }
      if (!d.padding) report.delivered.push_back(*d.message);
    }
    accounting.completed = true;
    finish_accounting();
  }

  report.throughput_bits = static_cast<double>(report.delivered.size()) * capacity_bits(scheme);
  return report;
}

}  // namespace qsdc
