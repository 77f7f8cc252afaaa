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

#include "qsdc/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

TEST(DetectionOracle, Enumeration) {
  EXPECT_NEAR(oracle::intercept_mismatch(false), 0.25, 1e-12);
  EXPECT_NEAR(oracle::intercept_mismatch(true), 0.25, 1e-12);
}

TEST(DetectionProbability, InterceptZ) {
  Rng rng(1);
  const double want = oracle::intercept_mismatch(false);
  const auto est = detection_probability(ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ), CheckMethod::kMethod1, 40000, rng);
  EXPECT_LT(std::abs(est.overall.value - want), 4.0 * est.overall.std_error);
  EXPECT_EQ(est.z_branch.value, 0.0);
  EXPECT_NEAR(est.x_branch.value, 0.5, 4.0 * est.x_branch.std_error);
  EXPECT_EQ(est.overall.samples, 40000u);
}

TEST(DetectionProbability, InterceptRandom) {
  Rng rng(2);
  const double want = oracle::intercept_mismatch(true);
  const auto est = detection_probability(ChannelModel::intercept_resend(BasisPolicy::kRandomZX), CheckMethod::kMethod1, 40000, rng);
  EXPECT_LT(std::abs(est.overall.value - want), 4.0 * est.overall.std_error);
}

TEST(DetectionProbability, Method2InterceptZ) {
  // Alice's pair collapses to |00> or |11>; the Bell outcome is then Phi+/Phi- evenly.
  Rng rng(3);
  const auto est = detection_probability(ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ), CheckMethod::kMethod2, 40000, rng);
  EXPECT_NEAR(est.x_branch.value, 0.5, 4.0 * est.x_branch.std_error);
  EXPECT_EQ(est.z_branch.value, 0.0);
}

TEST(DetectionProbability, IdealIsZero) {
  Rng rng(4);
  for (auto method : {CheckMethod::kMethod1, CheckMethod::kMethod2})
    for (const auto& s : {Scheme::qubit3(), Scheme::qutrit3(), Scheme::qubit_p(5)})
      EXPECT_EQ(detection_probability(ChannelModel::ideal(), method, 2000, rng, s).overall.value, 0.0);
}

TEST(DetectionProbability, ProbeBranches) {
  Rng rng(5);
  for (double beta : {0.3, 0.6}) {
    const auto est = detection_probability(ChannelModel::probe(ProbeParams::from_beta(beta)), CheckMethod::kMethod1, 20000, rng);
    EXPECT_LT(std::abs(est.z_branch.value - beta * beta), 4.0 * est.z_branch.std_error) << beta;
  }
}

TEST(DetectionProbability, RejectsZeroTrials) {
  Rng rng(6);
  EXPECT_THROW(detection_probability(ChannelModel::ideal(), CheckMethod::kMethod1, 0, rng), DomainError);
}

TEST(GroupedLeakage, Qubit3) {
  const std::size_t a[] = {0}, b[] = {1}, ab[] = {0, 1};
  EXPECT_EQ(grouped_leakage(Scheme::qubit3(), a), 0.0);
  EXPECT_EQ(grouped_leakage(Scheme::qubit3(), b), 0.0);
  EXPECT_EQ(grouped_leakage(Scheme::qubit3(), ab), 1.0);
  EXPECT_EQ(grouped_leakage(Scheme::qubit3(), {}), 0.0);
  EXPECT_NEAR(oracle::triplet_leakage({0, 1}), 1.0, 1e-15);
  EXPECT_NEAR(oracle::triplet_leakage({0}), 0.0, 1e-15);
}

TEST(GroupedLeakage, SingletonsLeakNothing) {
  std::vector<Scheme> schemes{Scheme::qubit3(), Scheme::qutrit3()};
  for (std::size_t p = 2; p <= 8; ++p) schemes.push_back(Scheme::qubit_p(p));
  for (const auto& s : schemes)
    for (std::size_t q = 0; q < s.check_particle(); ++q) {
      const std::size_t one[] = {q};
      EXPECT_EQ(grouped_leakage(s, one), 0.0) << s.name() << " particle " << q;
    }
}

TEST(GroupedLeakage, Monotone) {
  for (const auto& s : {Scheme::qubit3(), Scheme::qubit_p(4)}) {
    const std::size_t n = s.check_particle();
    std::vector<double> by_mask(std::size_t{1} << n);
    for (std::size_t mask = 0; mask < by_mask.size(); ++mask) {
      std::vector<std::size_t> set;
      for (std::size_t q = 0; q < n; ++q)
        if (mask >> q & 1) set.push_back(q);
      by_mask[mask] = grouped_leakage(s, set);
    }
    for (std::size_t sub = 0; sub < by_mask.size(); ++sub)
      for (std::size_t sup = 0; sup < by_mask.size(); ++sup)
        if ((sub & sup) == sub) {
          EXPECT_LE(by_mask[sub], by_mask[sup] + 1e-12) << s.name() << " " << sub << " " << sup;
        }
  }
}

TEST(GroupedLeakage, Errors) {
  const std::size_t check[] = {2}, dup[] = {0, 0};
  EXPECT_THROW(grouped_leakage(Scheme::qubit3(), check), DomainError);
  EXPECT_THROW(grouped_leakage(Scheme::qubit3(), dup), DomainError);
}

TEST(EveInformation, IdealIsZero) {
  Rng rng(7);
  const auto est = eve_information(ChannelModel::ideal(), Scheme::qubit3(), 1000, rng);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(est.samples, 1000u);
}

TEST(EveInformation, InterceptBeforeEncodingLearnsNothing) {
  Rng rng(8);
  const auto est = eve_information(ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ, {2}), Scheme::qubit3(), 20000, rng);
  // Only plug-in bias remains: about 7 / (2 n ln 2) bits.
  EXPECT_LT(est.value, 0.005);
}

TEST(EveInformation, GroupedPairMatchesLeakage) {
  Rng rng(9);
  const auto est = eve_information(ChannelModel::grouped({0, 1}), Scheme::qubit3(), 20000, rng);
  const std::size_t ab[] = {0, 1};
  EXPECT_NEAR(est.value, grouped_leakage(Scheme::qubit3(), ab), 0.01);
}

TEST(Proportion, StandardError) {
  const auto e = proportion(25, 100);
  EXPECT_DOUBLE_EQ(e.value, 0.25);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(0.25 * 0.75 / 100.0));
  EXPECT_EQ(proportion(0, 0).samples, 0u);
}

}  // namespace
}  // namespace qsdc
