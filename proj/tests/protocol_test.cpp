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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

Message msg(const std::string& s) {
  Message m;
  for (char c : s) m.digits.push_back(c - '0');
  return m;
}

std::vector<Message> random_payload(const Scheme& scheme, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Message> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(decode_index(scheme, rng.uniform_index(scheme.family_size())));
  return out;
}

ProtocolConfig config_for(const Scheme& scheme, std::size_t n, std::vector<Message> payload, std::uint64_t seed,
                          CheckMethod method = CheckMethod::kMethod1) {
  ProtocolConfig c;
  c.batch_size = n;
  c.scheme = scheme;
  c.check_method = method;
  c.payload = std::move(payload);
  c.seed = seed;
  return c;
}

TEST(RunSession, IdealDeliversPayload) {
  const auto payload = random_payload(Scheme::qubit3(), 100, 1);
  const auto report = run_session(config_for(Scheme::qubit3(), 128, payload, 7), ChannelModel::ideal());
  EXPECT_FALSE(report.aborted);
  EXPECT_EQ(report.delivered, payload);
  EXPECT_TRUE(report.corrupted.empty());
  for (const auto& c : report.checks) EXPECT_EQ(c.mismatches, 0u);
  EXPECT_EQ(report.checks.size(), 3u);
}

TEST(RunSession, AllEightMessagesOnce) {
  const auto payload = all_messages(Scheme::qubit3());
  const auto report = run_session(config_for(Scheme::qubit3(), 32, payload, 3), ChannelModel::ideal());
  EXPECT_EQ(report.delivered, payload);
}

TEST(RunSession, PayloadSpansBatches) {
  // 64 slots per batch at N=80, f=0.1 (8 + 8 reserved): 150 messages need 3 batches.
  const auto payload = random_payload(Scheme::qutrit3(), 150, 2);
  const auto report = run_session(config_for(Scheme::qutrit3(), 80, payload, 9, CheckMethod::kMethod2), ChannelModel::ideal());
  EXPECT_FALSE(report.aborted);
  EXPECT_EQ(report.delivered, payload);
  ASSERT_EQ(report.batches.size(), 3u);
  EXPECT_EQ(report.batches[2].payload, 150u - 2 * 64);
  EXPECT_EQ(report.batches[2].padding, 64u - (150u - 2 * 64));
}

TEST(RunSession, Deterministic) {
  const auto payload = random_payload(Scheme::qubit3(), 40, 4);
  const auto model = ChannelModel::probe(ProbeParams::from_beta(0.4));
  auto config = config_for(Scheme::qubit3(), 64, payload, 11);
  config.abort_threshold = 1.0;
  const auto a = run_session(config, model);
  const auto b = run_session(config, model);
  EXPECT_EQ(a.transcript, b.transcript);
  EXPECT_EQ(a.delivered, b.delivered);
  EXPECT_EQ(a.corrupted, b.corrupted);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) EXPECT_EQ(a.checks[i].mismatches, b.checks[i].mismatches);
}

TEST(RunSession, NoFalseAlarms) {
  std::vector<Scheme> schemes{Scheme::qubit3(), Scheme::qutrit3(), Scheme::qubit_p(2), Scheme::qubit_p(4), Scheme::qubit_p(5)};
  for (const auto& s : schemes) {
    const ProtocolContext context(s);
    for (auto method : {CheckMethod::kMethod1, CheckMethod::kMethod2}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto report = run_session(config_for(s, 40, random_payload(s, 30, seed), seed, method), ChannelModel::ideal(), context);
        EXPECT_FALSE(report.aborted) << s.name() << " method " << static_cast<int>(method) << " seed " << seed;
        for (const auto& c : report.checks) EXPECT_EQ(c.mismatches, 0u);
      }
    }
  }
}

TEST(RunSession, ZeroProbeMatchesIdeal) {
  const auto payload = random_payload(Scheme::qubit3(), 50, 5);
  const auto config = config_for(Scheme::qubit3(), 64, payload, 13);
  const auto ideal = run_session(config, ChannelModel::ideal());
  const auto probe = run_session(config, ChannelModel::probe(ProbeParams::from_beta(0.0)));
  EXPECT_EQ(ideal.transcript, probe.transcript);
  EXPECT_EQ(ideal.delivered, probe.delivered);
  EXPECT_FALSE(probe.aborted);
}

TEST(RunSession, InterceptOnCheckSequenceAborts) {
  // Per-position detection 1/4 over 100 checked positions: survival ~ 3e-13.
  const ChannelModel eve = ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ, {2});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto report = run_session(config_for(Scheme::qubit3(), 1000, {}, seed), eve);
    EXPECT_TRUE(report.aborted);
    EXPECT_EQ(report.abort_stage, "batch 0 check C");
    EXPECT_TRUE(report.delivered.empty());
    EXPECT_EQ(report.transcript.back().kind, TranscriptEvent::Kind::kAbortAnnounce);
  }
}

TEST(RunSession, AttacksDoNotChangePublicChoices) {
  const auto payload = random_payload(Scheme::qubit3(), 60, 6);
  auto config = config_for(Scheme::qubit3(), 64, payload, 17);
  config.abort_threshold = 1.0;
  const auto strip = [](const Transcript& t) {
    Transcript out;
    for (const auto& e : t)
      if (e.kind != TranscriptEvent::Kind::kOutcomeAnnounce) out.push_back(e);
    return out;
  };
  const auto ideal = strip(run_session(config, ChannelModel::ideal()).transcript);
  const std::vector<ChannelModel> attacks{
      ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ),
      ChannelModel::intercept_resend(BasisPolicy::kRandomZX, {1}),
      ChannelModel::probe(ProbeParams::from_beta(0.7, true)),
      ChannelModel::grouped({0, 1}),
  };
  for (const auto& a : attacks) EXPECT_EQ(strip(run_session(config, a).transcript), ideal) << a.name();
}

TEST(RunSession, Throughput) {
  const auto payload = random_payload(Scheme::qubit_p(5), 70, 7);
  const auto report = run_session(config_for(Scheme::qubit_p(5), 50, payload, 19), ChannelModel::ideal());
  EXPECT_EQ(report.delivered.size(), 70u);
  EXPECT_EQ(report.throughput_bits, 70.0 * 5.0);
}

TEST(ProtocolConfig, CeilingRule) {
  ProtocolConfig c;
  c.batch_size = 10;
  c.check_fraction = 0.01;
  EXPECT_EQ(c.first_check_size(), 1u);
  EXPECT_EQ(c.sampling_size(), 1u);
  EXPECT_EQ(c.payload_slots(), 8u);
  c.check_fraction = 0.11;
  EXPECT_EQ(c.sampling_size(), 2u);
}

TEST(ProtocolConfig, Validation) {
  ProtocolConfig c;
  c.check_fraction = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c.check_fraction = 0.5;
  c.batch_size = 10;
  EXPECT_THROW(c.validate(), DomainError);
  c.check_fraction = 0.1;
  c.abort_threshold = -0.1;
  EXPECT_THROW(c.validate(), DomainError);
  c.abort_threshold = 0.0;
  c.payload = {msg("0120")};
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(SequenceName, Labels) {
  EXPECT_EQ(sequence_name(Scheme::qubit3(), 0), "A");
  EXPECT_EQ(sequence_name(Scheme::qubit3(), 2), "C");
  EXPECT_EQ(sequence_name(Scheme::qubit_p(5), 4), "P4");
}

class SessionFixture : public ::testing::Test {
 protected:
  const ProtocolContext context{Scheme::qubit3()};
  Rng honest{21};
  Rng eve{22};
};

TEST_F(SessionFixture, OrderingEnforced) {
  BatchSession s(context, 20);
  EXPECT_THROW(s.transmit(1, ChannelModel::ideal(), eve), ProtocolStateError);
  PayloadCursor cursor({});
  EXPECT_THROW(s.alice_encode(cursor, 2, honest), ProtocolStateError);
  s.transmit(2, ChannelModel::ideal(), eve);
  EXPECT_THROW(s.transmit(2, ChannelModel::ideal(), eve), ProtocolStateError);
  EXPECT_THROW(s.bob_decode(honest), ProtocolStateError);
  s.first_check(CheckMethod::kMethod1, 2, honest);
  EXPECT_THROW(s.transmit(1, ChannelModel::ideal(), eve), ProtocolStateError);
  s.alice_encode(cursor, 2, honest);
  EXPECT_THROW(s.post_transmission_check(1, honest), ProtocolStateError);
  EXPECT_THROW(s.transmit(0, ChannelModel::ideal(), eve), ProtocolStateError);
  s.transmit(1, ChannelModel::ideal(), eve);
  EXPECT_THROW(s.transmit(0, ChannelModel::ideal(), eve), ProtocolStateError);
  s.post_transmission_check(1, honest);
  s.transmit(0, ChannelModel::ideal(), eve);
  s.post_transmission_check(0, honest);
  EXPECT_EQ(s.bob_decode(honest).size(), 16u);
}

TEST_F(SessionFixture, PositionReuseRejected) {
  BatchSession s(context, 8);
  s.transmit(2, ChannelModel::ideal(), eve);
  const std::size_t twice[] = {3, 3};
  const CheckBasis bases[] = {CheckBasis::kZ, CheckBasis::kZ};
  EXPECT_THROW(s.security_check_method1(twice, bases, honest), ProtocolStateError);
  const std::size_t once[] = {3};
  s.security_check_method1(once, std::span(bases, 1), honest);
  EXPECT_EQ(s.role(3), BatchSession::Role::kFirstCheck);
}

TEST_F(SessionFixture, RolesConserved) {
  const auto payload = random_payload(Scheme::qubit3(), 30, 8);
  PayloadCursor cursor(payload);
  BatchSession s(context, 50);
  s.transmit(2, ChannelModel::ideal(), eve);
  s.first_check(CheckMethod::kMethod2, 5, honest);
  s.alice_encode(cursor, 5, honest);
  using R = BatchSession::Role;
  EXPECT_EQ(s.count(R::kFresh), 0u);
  EXPECT_EQ(s.count(R::kFirstCheck), 5u);
  EXPECT_EQ(s.count(R::kSampling), 5u);
  EXPECT_EQ(s.count(R::kPayload), 30u);
  EXPECT_EQ(s.count(R::kPadding), 10u);
  s.transmit(1, ChannelModel::ideal(), eve);
  const auto first = s.post_transmission_check(1, honest);
  EXPECT_EQ(first.samples, 2u);
  s.transmit(0, ChannelModel::ideal(), eve);
  const auto second = s.post_transmission_check(0, honest);
  EXPECT_EQ(second.samples, 1u);
  EXPECT_EQ(s.count(R::kSampling) + s.count(R::kSamplingChecked), 5u);
  EXPECT_EQ(s.count(R::kSamplingChecked), 3u);
}

TEST_F(SessionFixture, SamplingExhaustionSkipsCheck) {
  BatchSession s(context, 6);
  PayloadCursor cursor({});
  s.transmit(2, ChannelModel::ideal(), eve);
  s.first_check(CheckMethod::kMethod1, 1, honest);
  s.alice_encode(cursor, 1, honest);
  s.transmit(1, ChannelModel::ideal(), eve);
  EXPECT_EQ(s.post_transmission_check(1, honest).samples, 1u);
  s.transmit(0, ChannelModel::ideal(), eve);
  EXPECT_TRUE(s.post_transmission_check(0, honest).skipped);
  EXPECT_EQ(s.warnings().size(), 1u);
}

TEST_F(SessionFixture, EncodesPayloadOperators) {
  const std::vector<Message> payload(10, msg("101"));
  PayloadCursor cursor(payload);
  BatchSession s(context, 12);
  s.transmit(2, ChannelModel::ideal(), eve);
  s.first_check(CheckMethod::kMethod1, 1, honest);
  s.alice_encode(cursor, 1, honest);
  const auto psi6 = oracle::ket_sum(2, {"010", "101"}, {1, -1});
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    if (s.role(pos) != BatchSession::Role::kPayload) continue;
    EXPECT_EQ(*s.recorded_op(pos), 5u);
    const auto& m = s.multiplet(pos);
    const oracle::Vec v(m.amplitudes().begin(), m.amplitudes().end());
    EXPECT_NEAR(std::abs(oracle::dot(psi6, v)), 1.0, 1e-12);
  }
}

TEST(PostCheckSupport, TransformedStates) {
  const auto family = build_family(Scheme::qubit3());
  const auto support = [&](std::size_t member) {
    std::set<std::string> out;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const int d[] = {a, b, c};
          if (product_outcome_probability(family.member(member), CheckBasis::kZ, d) > 1e-9)
            out.insert(std::string{static_cast<char>('0' + a), static_cast<char>('0' + b), static_cast<char>('0' + c)});
        }
    return out;
  };
  EXPECT_EQ(support(4), (std::set<std::string>{"010", "101"}));
  EXPECT_EQ(support(0), (std::set<std::string>{"000", "111"}));
  EXPECT_EQ(support(3), (std::set<std::string>{"100", "011"}));
}

TEST(PostCheck, ReplacedParticleDetected) {
  // Eve keeps B and forwards a fresh |0>: the post-transmission check after
  // the B sequence must see mismatches.
  const ProtocolContext context(Scheme::qubit3());
  Rng honest(31), eve(32);
  std::size_t mismatches = 0, samples = 0;
  for (int batch = 0; batch < 100; ++batch) {
    BatchSession s(context, 20);
    PayloadCursor cursor({});
    s.transmit(2, ChannelModel::ideal(), eve);
    s.first_check(CheckMethod::kMethod1, 2, honest);
    s.alice_encode(cursor, 8, honest);
    s.transmit(1, ChannelModel::ideal(), eve);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      auto m = measure_computational(s.multiplet(pos), 1, eve);
      s.tamper(pos, m.label == 1 ? apply_single(m.post_state, 1, SingleParticleGate::pauli_x()) : m.post_state);
    }
    const auto r = s.post_transmission_check(1, honest);
    mismatches += r.mismatches;
    samples += r.samples;
  }
  EXPECT_EQ(samples, 400u);
  EXPECT_GT(mismatches, 0u);
}

TEST(BobDecode, Psi8AndPsi1) {
  const ProtocolContext context(Scheme::qubit3());
  Rng honest(41), eve(42);
  const std::vector<Message> payload{msg("111"), msg("000")};
  PayloadCursor cursor(payload);
  BatchSession s(context, 4);
  s.transmit(2, ChannelModel::ideal(), eve);
  s.first_check(CheckMethod::kMethod1, 1, honest);
  s.alice_encode(cursor, 1, honest);
  for (std::size_t seq : {1u, 0u}) {
    s.transmit(seq, ChannelModel::ideal(), eve);
    s.post_transmission_check(seq, honest);
  }
  const auto decoded = s.bob_decode(honest);
  ASSERT_EQ(decoded.size(), 2u);
  EXPECT_EQ(decoded[0].message->str(), "111");
  EXPECT_EQ(decoded[1].message->str(), "000");
}

TEST(BobDecode, ProductStateDecodesByBornRule) {
  const ProtocolContext context(Scheme::qubit3());
  Rng honest(51), eve(52);
  PayloadCursor cursor({});
  BatchSession s(context, 4);
  s.transmit(2, ChannelModel::ideal(), eve);
  s.first_check(CheckMethod::kMethod1, 1, honest);
  s.alice_encode(cursor, 1, honest);
  s.transmit(1, ChannelModel::ideal(), eve);
  s.post_transmission_check(1, honest);
  s.transmit(0, ChannelModel::ideal(), eve);
  std::size_t target = 0;
  while (s.role(target) != BatchSession::Role::kPadding) ++target;
  const int zeros[] = {0, 0, 0};
  s.tamper(target, StateVector::basis({2, 2, 2}, zeros));
  s.post_transmission_check(0, honest);
  // |000> is an equal mix of the 000 and 001 family members.
  for (const auto& d : s.bob_decode(honest)) {
    ASSERT_TRUE(d.message.has_value());
    if (d.position == target) {
      EXPECT_TRUE(d.message->str() == "000" || d.message->str() == "001");
    }
  }
}

}  // namespace
}  // namespace qsdc
