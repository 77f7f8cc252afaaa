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

// Eavesdropping analyses: detection rates, exact grouped-interception
// leakage and Monte Carlo estimates of what Eve learns.

#pragma once

#include <cstddef>
#include <span>

#include "qsdc/channel.hpp"
#include "qsdc/codec.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/rng.hpp"

namespace qsdc {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Mismatch rates per checked position, overall and split by Bob's basis.
struct DetectionEstimate {
  Estimate overall;
  Estimate z_branch;
  Estimate x_branch;
};

/// Binomial proportion with its standard error.
Estimate proportion(std::size_t hits, std::size_t samples);

/// Monte Carlo over `trials` single checked positions: a fresh base multiplet,
/// the check particle through `model`, then one first-stage check in a random
/// basis.
DetectionEstimate detection_probability(const ChannelModel& model, CheckMethod method, std::size_t trials, Rng& rng,
                                        const Scheme& scheme = Scheme::qubit3());

/// Exact I(outcome; message) in bits when Eve measures `intercepted` in the
/// computational basis, uniform message prior, by enumeration of the family.
/// Indices must be distinct message-carrying particles (below the check
/// particle); the empty set gives 0.
double grouped_leakage(const Scheme& scheme, std::span<const std::size_t> intercepted);

/// Plug-in mutual information (bits) between Eve's classical record and the
/// transmitted message, over `trials` multiplets carrying uniform random
/// messages sent through the full multi-step sequence. Probe ancillas are
/// read out in their computational basis. The standard error is the
/// delta-method estimate sd(pointwise information) / sqrt(trials).
Estimate eve_information(const ChannelModel& model, const Scheme& scheme, std::size_t trials, Rng& rng);

}  // namespace qsdc
