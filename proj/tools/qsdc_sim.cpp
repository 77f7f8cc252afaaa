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

// qsdc_sim: run sessions, attack sweeps, family checks and leakage tables.
//
// Exit status: 0 completed (aborted sessions are results), 1 runtime
// failure, 2 usage error.

#include <iostream>
#include <string>
#include <vector>

#include "qsdc/harness.hpp"

namespace {

constexpr const char* kUsage = R"(usage: qsdc_sim <run|attack-sweep|family-verify|leakage-table> [flags]

  --scheme S            qubit3 | qutrit3 | qubitp:<p>        (qubit3)
  --batch-size N        multiplets per batch                  (256)
  --check-fraction F    fraction of a batch per check, (0,1)  (0.1)
  --check-method M      1 or 2                                (1)
  --abort-threshold T   tolerated mismatch rate, [0,1]        (0)
  --attack A            none | intercept-z | intercept-x | intercept-random | probe | grouped
  --attack-param X      probe beta                            (0)
  --attack-targets L    particle sequences attacked, e.g. 2   (all)
  --attack-group L      particles intercepted by 'grouped', e.g. 0,1
  --tag-branches B      probe ancilla also tags the unflipped branch
  --payload-messages K  random messages per session           (one batch)
  --sweep-values L      probe betas for attack-sweep          (0,0.2,...,1)
  --trials N            sessions or checked positions         (1000)
  --eve-trials N        samples for Eve's information         (10000)
  --seed S              master seed                           (random, echoed)
  --jobs J              worker threads                        (1)
  --output PATH         report file                           (stdout)
  --format F            json | csv                            (json)
  --verbose-trials      per-trial details in JSON reports
  --config PATH         flat JSON object with the same keys; flags override
)";

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (const auto& a : args) {
    if (a == "-h" || a == "--help") {
      std::cout << kUsage;
      return 0;
    }
  }

  qsdc::ExperimentSpec spec;
  try {
    spec = qsdc::parse_spec(args);
  } catch (const qsdc::UsageError& e) {
    std::cerr << "qsdc_sim: " << e.what() << " [" << e.key() << "]\n" << kUsage;
    return 2;
  }

  try {
    const qsdc::AggregateReport report = qsdc::run_experiment(spec);
    const std::string text = qsdc::render_report(report, spec.format);
    if (spec.output_path.empty()) {
      std::cout << text;
    } else {
      qsdc::write_report_atomically(spec.output_path, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "qsdc_sim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
