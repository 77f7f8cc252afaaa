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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

using oracle::cd;

StateVector random_state(std::vector<int> levels, Rng& rng) {
  std::size_t size = 1;
  for (int l : levels) size *= static_cast<std::size_t>(l);
  std::vector<Amplitude> v(size);
  double n = 0.0;
  for (auto& x : v) {
    x = cd(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
    n += std::norm(x);
  }
  for (auto& x : v) x /= std::sqrt(n);
  return StateVector(std::move(levels), std::move(v));
}

TEST(ProbeAttach, SingleQubitMapping) {
  const cd a(0.6, 0.0), b(0.0, 0.8);
  ProbeParams params{cd(0.8, 0.0), cd(0.0, 0.6), std::polar(1.0, 0.4) * std::sqrt(0.3), std::sqrt(0.7), false};
  const auto out = probe_attach(StateVector({2}, {a, b}), 0, params);
  ASSERT_EQ(out.shape(), (std::vector<int>{2, 3}));
  // index = qubit * 3 + ancilla; ancilla 0 = no flip, 1 = flipped from 0, 2 = flipped from 1.
  std::vector<cd> want(6);
  want[0 * 3 + 0] = params.alpha1 * a;
  want[1 * 3 + 1] = params.beta1 * a;
  want[1 * 3 + 0] = params.alpha2 * b;
  want[0 * 3 + 2] = params.beta2 * b;
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(std::abs(out.amplitude(i) - want[i]), 1e-12) << i;
}

TEST(ProbeAttach, TaggedBranchesUseFourStates) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto out = probe_attach(StateVector({2}, {h, h}), 0, ProbeParams::from_beta(0.0, true));
  ASSERT_EQ(out.shape(), (std::vector<int>{2, 4}));
  EXPECT_NEAR(std::abs(out.amplitude(0 * 4 + 0)), h, 1e-12);
  EXPECT_NEAR(std::abs(out.amplitude(1 * 4 + 3)), h, 1e-12);
}

TEST(ProbeAttach, IdentityParamsLeaveStateUnentangled) {
  Rng rng(1);
  const auto s = random_state({2, 2, 2}, rng);
  const auto out = probe_attach(s, 2, ProbeParams{});
  const int zero[] = {0};
  const auto want = s.tensor(StateVector::basis({3}, zero));
  EXPECT_NEAR(std::abs(inner_product(want, out)), 1.0, 1e-12);
}

TEST(ProbeAttach, NormPreservedOnRandomStates) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const double th1 = rng.uniform01() * 3.0, th2 = rng.uniform01() * 3.0;
    ProbeParams params{std::polar(std::cos(th1), rng.uniform01() * 6.0), std::polar(std::sin(th1), rng.uniform01() * 6.0),
                       std::polar(std::cos(th2), rng.uniform01() * 6.0), std::polar(std::sin(th2), rng.uniform01() * 6.0),
                       rng.coin()};
    const auto s = random_state({2, 2, 2}, rng);
    const auto out = probe_attach(s, rng.uniform_index(3), params);
    EXPECT_LT(std::abs(out.norm() - 1.0), 1e-10);
  }
}

TEST(ProbeAttach, RejectsNonUnitary) {
  EXPECT_THROW(probe_attach(make_ghz(3, 2), 2, ProbeParams{1.0, 0.5, 1.0, 0.0, false}), DomainError);
  EXPECT_THROW(ChannelModel::probe(ProbeParams{0.5, 0.5, 1.0, 0.0, false}), DomainError);
}

// Probability that the probed particle disagrees with particle 0 in z.
double z_disagreement(const StateVector& s, std::size_t particle) {
  double p = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto d = s.digits_of(i);
    if (d[0] != d[particle]) p += std::norm(s.amplitude(i));
  }
  return p;
}

TEST(ProbeAttach, ErrorRateIsBetaSquared) {
  for (double beta : {0.0, 0.3, 0.5, 0.6, 1.0}) {
    const auto out = probe_attach(make_ghz(3, 2), 2, ProbeParams::from_beta(beta));
    EXPECT_NEAR(z_disagreement(out, 2), beta * beta, 1e-12);
  }
}

TEST(ProbeAttach, FullSwapFlipsDigit) {
  const auto out = probe_attach(make_ghz(3, 2), 2, ProbeParams::from_beta(1.0));
  EXPECT_NEAR(z_disagreement(out, 2), 1.0, 1e-12);
}

TEST(Transmit, IdealIsIdentity) {
  Rng rng(3);
  std::vector<StateVector> batch{make_ghz(3, 2), make_ghz(3, 3)};
  for (std::size_t q = 0; q < 3; ++q) EXPECT_TRUE(transmit(batch, q, ChannelModel::ideal(), rng).empty());
  EXPECT_NEAR(std::abs(inner_product(batch[0], make_ghz(3, 2))), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(inner_product(batch[1], make_ghz(3, 3))), 1.0, 1e-15);
}

TEST(Transmit, InterceptZCollapses) {
  Rng rng(4);
  std::vector<StateVector> batch(20, make_ghz(3, 2));
  const auto record = transmit(batch, 2, ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ), rng);
  ASSERT_EQ(record.entries.size(), 20u);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& e = record.entries[i];
    EXPECT_EQ(e.position, i);
    EXPECT_EQ(e.action, EveEntry::Action::kMeasureZ);
    const int digits[] = {e.outcome, e.outcome, e.outcome};
    EXPECT_NEAR(std::abs(batch[i].amplitude(batch[i].index_of(digits))), 1.0, 1e-12);
  }
}

TEST(Transmit, TargetsRestrictAttack) {
  Rng rng(5);
  std::vector<StateVector> batch(4, make_ghz(3, 2));
  const auto model = ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ, {2});
  EXPECT_TRUE(transmit(batch, 1, model, rng).empty());
  EXPECT_NEAR(std::abs(inner_product(batch[0], make_ghz(3, 2))), 1.0, 1e-15);
  EXPECT_EQ(transmit(batch, 2, model, rng).entries.size(), 4u);
}

TEST(Transmit, ZeroProbeMatchesIdeal) {
  Rng rng(6);
  std::vector<StateVector> batch(3, make_ghz(3, 2));
  const auto record = transmit(batch, 2, ChannelModel::probe(ProbeParams::from_beta(0.0)), rng);
  const int zero[] = {0};
  const auto want = make_ghz(3, 2).tensor(StateVector::basis({3}, zero));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    ASSERT_TRUE(record.entries[i].ancilla.has_value());
    EXPECT_EQ(*record.entries[i].ancilla, 3u);
    EXPECT_NEAR(std::abs(inner_product(want, batch[i])), 1.0, 1e-12);
  }
}

TEST(Transmit, GroupedTargetsItsGroup) {
  const auto model = ChannelModel::grouped({0, 1});
  EXPECT_TRUE(model.active_on(0));
  EXPECT_TRUE(model.active_on(1));
  EXPECT_FALSE(model.active_on(2));
  EXPECT_EQ(model.name(), "grouped");
}

}  // namespace
}  // namespace qsdc
