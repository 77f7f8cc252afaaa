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

#include "qsdc/harness.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qsdc/analysis.hpp"
#include "qsdc/errors.hpp"

namespace qsdc {
namespace {

using json = nlohmann::json;

// Every key accepted from the command line or a config file.
const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "batch-size", "scheme",  "check-method", "check-fraction", "abort-threshold", "attack",
      "attack-param", "attack-targets", "attack-group", "tag-branches", "payload-messages", "sweep-values",
      "trials",     "eve-trials", "seed",     "output",         "format",          "jobs",
      "verbose-trials",
  };
  return keys;
}

constexpr std::uint64_t kPayloadSalt = 0x7061796C6F6164ULL;
constexpr std::uint64_t kEveSalt = 0x6576652D696E666FULL;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) throw UsageError(key, "--" + key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty() || !std::isfinite(out))
    throw UsageError(key, "--" + key + ": expected a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError(key, "--" + key + ": expected true or false, got '" + value + "'");
}

std::vector<std::size_t> parse_indices(const std::string& key, const std::string& value, std::size_t particles) {
  std::vector<std::size_t> out;
  for (const std::string& item : split_list(value)) {
    const auto q = parse_u64(key, item);
    if (q >= particles) throw UsageError(key, "--" + key + ": particle " + item + " out of range");
    out.push_back(static_cast<std::size_t>(q));
  }
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError("config", std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config", "config file must hold a flat JSON object");
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw UsageError(key, "unknown config key '" + key + "'");
    if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      out[key] = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_unsigned() || value.is_number_integer()) {
      out[key] = value.dump();
    } else if (value.is_number_float()) {
      out[key] = format_double(value.get<double>());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : (v.is_number_float() ? format_double(v.get<double>()) : v.dump());
      }
      out[key] = joined;
    } else {
      throw UsageError(key, "config key '" + key + "' must be a scalar or a list");
    }
  }
  return out;
}

Mode parse_mode(const std::string& name) {
  if (name == "run") return Mode::kRun;
  if (name == "attack-sweep") return Mode::kAttackSweep;
  if (name == "family-verify") return Mode::kFamilyVerify;
  if (name == "leakage-table") return Mode::kLeakageTable;
  throw UsageError("mode", "unknown subcommand '" + name + "'");
}

ChannelModel make_channel(const std::string& attack, const std::optional<double>& param, bool tag_branches,
                          std::vector<std::size_t> targets, std::vector<std::size_t> group) {
  if (attack == "none") return ChannelModel::ideal();
  if (attack == "intercept-z") return ChannelModel::intercept_resend(BasisPolicy::kAlwaysZ, std::move(targets));
  if (attack == "intercept-x") return ChannelModel::intercept_resend(BasisPolicy::kAlwaysX, std::move(targets));
  if (attack == "intercept-random") return ChannelModel::intercept_resend(BasisPolicy::kRandomZX, std::move(targets));
  if (attack == "probe") {
    const double beta = param.value_or(0.0);
    if (beta < 0.0 || beta > 1.0) throw UsageError("attack-param", "--attack-param: probe beta must lie in [0, 1]");
    return ChannelModel::probe(ProbeParams::from_beta(beta, tag_branches), std::move(targets));
  }
  if (attack == "grouped") {
    if (group.empty()) throw UsageError("attack-group", "--attack-group is required for the grouped attack");
    return ChannelModel::grouped(std::move(group));
  }
  throw UsageError("attack", "--attack: unknown attack '" + attack + "'");
}

// Runs body(i) for i in [0, n) on up to `jobs` threads. Results must be
// written to per-index slots; callers reduce in index order afterwards.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string check_kind_name(CheckResult::Kind kind) {
  return kind == CheckResult::Kind::kFirst ? "first" : "post-transmission";
}

std::string messages_str(const std::vector<Message>& ms) {
  std::string s;
  for (const auto& m : ms) {
    if (!s.empty()) s += ' ';
    s += m.str();
  }
  return s;
}

json estimate_json(const Estimate& e) { return json{{"value", e.value}, {"stderr", e.std_error}, {"samples", e.samples}}; }

Estimate mean_with_stderr(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  if (xs.size() > 1) {
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size() - 1);
  }
  return {mean, std::sqrt(var / static_cast<double>(xs.size())), xs.size()};
}

json config_json(const ExperimentSpec& spec) {
  const ProtocolConfig& p = spec.protocol;
  json c = {
      {"batch_size", p.batch_size},
      {"scheme", p.scheme.name()},
      {"check_fraction", p.check_fraction},
      {"check_method", static_cast<int>(p.check_method)},
      {"abort_threshold", p.abort_threshold},
      {"attack", spec.attack},
      {"attack_targets", spec.channel.targets},
      {"trials", spec.trials},
      {"payload_messages", spec.payload_messages},
      {"eve_trials", spec.eve_trials},
      {"jobs", spec.jobs},
  };
  c["attack_param"] = spec.attack_param ? json(*spec.attack_param) : json(nullptr);
  if (const auto* g = std::get_if<GroupedInterception>(&spec.channel.attack)) c["attack_group"] = g->group;
  if (const auto* pr = std::get_if<ProbeAttack>(&spec.channel.attack)) c["tag_branches"] = pr->params.tag_branches;
  if (spec.mode == Mode::kAttackSweep) c["sweep_values"] = spec.sweep_values;
  return c;
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  SessionReport report;
  std::vector<Message> payload;
};

void run_mode(const ExperimentSpec& spec, AggregateReport& out) {
  const ProtocolContext context(spec.protocol.scheme);
  const Scheme& scheme = spec.protocol.scheme;
  std::vector<TrialOutcome> trials(spec.trials);

  parallel_for(spec.trials, spec.jobs, [&](std::size_t t) {
    TrialOutcome& o = trials[t];
    o.seed = derive_trial_seed(spec.seed, t);
    Rng payload_rng(splitmix64_mix(o.seed ^ kPayloadSalt));
    for (std::size_t i = 0; i < spec.payload_messages; ++i)
      o.payload.push_back(decode_index(scheme, payload_rng.uniform_index(scheme.family_size())));
    ProtocolConfig config = spec.protocol;
    config.seed = o.seed;
    config.payload = o.payload;
    o.report = run_session(config, spec.channel, context);
  });

  std::size_t aborted = 0;
  std::size_t delivered_exact = 0;
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::size_t z = 0, zm = 0, x = 0, xm = 0;
  std::size_t skipped_checks = 0;
  std::size_t corrupted = 0;
  std::vector<double> check_rates;
  std::vector<double> throughput;
  double total_bits = 0.0;
  json per_trial = json::array();
  std::ostringstream csv;
  csv << "trial,seed,aborted,abort_stage,delivered,throughput_bits,checked_positions,mismatches\n";

  for (std::size_t t = 0; t < trials.size(); ++t) {
    const TrialOutcome& o = trials[t];
    const SessionReport& r = o.report;
    if (r.aborted) ++aborted;
    if (!r.aborted && r.delivered == o.payload) ++delivered_exact;
    std::size_t trial_checked = 0, trial_mismatches = 0;
    for (const CheckResult& c : r.checks) {
      if (c.skipped) {
        ++skipped_checks;
        continue;
      }
      trial_checked += c.samples;
      trial_mismatches += c.mismatches;
      z += c.z_samples;
      zm += c.z_mismatches;
      x += c.x_samples;
      xm += c.x_mismatches;
      check_rates.push_back(c.mismatch_rate());
    }
    checked += trial_checked;
    mismatches += trial_mismatches;
    corrupted += r.corrupted.size();
    throughput.push_back(r.throughput_bits);
    total_bits += r.throughput_bits;

    csv << t << ',' << o.seed << ',' << (r.aborted ? "true" : "false") << ',' << r.abort_stage << ',' << r.delivered.size()
        << ',' << format_double(r.throughput_bits) << ',' << trial_checked << ',' << trial_mismatches << '\n';

    if (spec.verbose_trials) {
      json checks = json::array();
      for (const CheckResult& c : r.checks) {
        checks.push_back({{"kind", check_kind_name(c.kind)},
                          {"batch", c.batch},
                          {"sequence", sequence_name(scheme, c.sequence)},
                          {"samples", c.samples},
                          {"mismatches", c.mismatches},
                          {"mismatch_rate", c.mismatch_rate()},
                          {"z_samples", c.z_samples},
                          {"z_mismatches", c.z_mismatches},
                          {"x_samples", c.x_samples},
                          {"x_mismatches", c.x_mismatches},
                          {"skipped", c.skipped}});
      }
      json batches = json::array();
      for (const BatchAccounting& b : r.batches) {
        batches.push_back({{"first_check", b.first_check},
                           {"sampling", b.sampling},
                           {"payload", b.payload},
                           {"padding", b.padding},
                           {"completed", b.completed}});
      }
      per_trial.push_back({{"trial", t},
                           {"seed", o.seed},
                           {"aborted", r.aborted},
                           {"abort_stage", r.abort_stage},
                           {"payload", messages_str(o.payload)},
                           {"delivered", messages_str(r.delivered)},
                           {"throughput_bits", r.throughput_bits},
                           {"checks", checks},
                           {"batches", batches},
                           {"corrupted_positions", r.corrupted.size()},
                           {"warnings", r.warnings},
                           {"transcript_events", r.transcript.size()},
                           {"eve_actions", r.eve.entries.size()}});
    }
  }

  Rng eve_rng(splitmix64_mix(spec.seed ^ kEveSalt));
  const Estimate eve = eve_information(spec.channel, scheme, spec.eve_trials, eve_rng);

  json results = {
      {"trials", spec.trials},
      {"abort_rate", estimate_json(proportion(aborted, spec.trials))},
      {"delivered_exactly", delivered_exact},
      {"mismatch_rate_pooled", estimate_json(proportion(mismatches, checked))},
      {"mismatch_rate_z_branch", estimate_json(proportion(zm, z))},
      {"mismatch_rate_x_branch", estimate_json(proportion(xm, x))},
      {"mean_check_mismatch_rate", estimate_json(mean_with_stderr(check_rates))},
      {"skipped_checks", skipped_checks},
      {"corrupted_positions", corrupted},
      {"throughput_bits_per_session", estimate_json(mean_with_stderr(throughput))},
      {"throughput_bits_total", total_bits},
      {"capacity_bits_per_multiplet", capacity_bits(scheme)},
      {"eve_information_bits", estimate_json(eve)},
  };
  if (spec.verbose_trials) results["per_trial"] = per_trial;
  out.document["results"] = results;
  out.csv = csv.str();
}

void attack_sweep_mode(const ExperimentSpec& spec, AggregateReport& out) {
  const bool probe = spec.attack == "probe";
  std::vector<std::optional<double>> params;
  if (probe) {
    for (double v : spec.sweep_values) params.emplace_back(v);
  } else {
    params.emplace_back(spec.attack_param);
  }

  std::vector<DetectionEstimate> estimates(params.size());
  parallel_for(params.size(), spec.jobs, [&](std::size_t i) {
    ChannelModel channel = spec.channel;
    if (probe) {
      const auto* current = std::get_if<ProbeAttack>(&spec.channel.attack);
      channel = ChannelModel::probe(ProbeParams::from_beta(*params[i], current && current->params.tag_branches), spec.channel.targets);
    }
    Rng rng(derive_trial_seed(spec.seed, i));
    estimates[i] = detection_probability(channel, spec.protocol.check_method, spec.trials, rng, spec.protocol.scheme);
  });

  json rows = json::array();
  std::ostringstream csv;
  csv << "attack,parameter,detection_rate,stderr,trials,seed\n";
  for (std::size_t i = 0; i < params.size(); ++i) {
    // Probe rows report the Z-branch rate, the probe's induced error rate.
    const Estimate& e = probe ? estimates[i].z_branch : estimates[i].overall;
    rows.push_back({{"attack", spec.attack},
                    {"parameter", params[i] ? json(*params[i]) : json(nullptr)},
                    {"detection_rate", e.value},
                    {"stderr", e.std_error},
                    {"trials", e.samples},
                    {"seed", spec.seed},
                    {"overall", estimate_json(estimates[i].overall)},
                    {"z_branch", estimate_json(estimates[i].z_branch)},
                    {"x_branch", estimate_json(estimates[i].x_branch)}});
    csv << spec.attack << ',' << (params[i] ? format_double(*params[i]) : "") << ',' << format_double(e.value) << ','
        << format_double(e.std_error) << ',' << e.samples << ',' << spec.seed << '\n';
  }
  out.document["results"] = {{"rows", rows}, {"rate_reported", probe ? "z_branch" : "overall"}};
  out.csv = csv.str();
}

void family_verify_mode(const ExperimentSpec& spec, AggregateReport& out) {
  const Scheme& scheme = spec.protocol.scheme;
  const GhzFamily family = build_family(scheme);
  double max_offdiag = 0.0;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      const double g = std::abs(inner_product(family.member(i), family.member(j)));
      if (i == j)
        max_diag = std::max(max_diag, std::abs(g - 1.0));
      else
        max_offdiag = std::max(max_offdiag, g);
    }
  }
  Rng rng(spec.seed);
  std::size_t failures = 0;
  for (const Message& m : all_messages(scheme)) {
    const StateVector encoded = encode_ops_for_message(scheme, m).apply(family.base());
    const auto outcome = measure_family(encoded, family.members(), rng);
    if (!(decode_index(scheme, static_cast<std::size_t>(outcome.label)) == m)) ++failures;
  }
  const bool passed = family.size() == scheme.family_size() && max_offdiag < kAlgebraTol && max_diag < kAlgebraTol && failures == 0;
  out.document["results"] = {{"scheme", scheme.name()},
                             {"members", family.size()},
                             {"expected_members", scheme.family_size()},
                             {"max_offdiag_gram", max_offdiag},
                             {"max_diag_deviation", max_diag},
                             {"round_trip_failures", failures},
                             {"capacity_bits", capacity_bits(scheme)},
                             {"passed", passed}};
  std::ostringstream csv;
  csv << "scheme,members,max_offdiag_gram,max_diag_deviation,round_trip_failures,capacity_bits,passed\n"
      << scheme.name() << ',' << family.size() << ',' << format_double(max_offdiag) << ',' << format_double(max_diag) << ','
      << failures << ',' << format_double(capacity_bits(scheme)) << ',' << (passed ? "true" : "false") << '\n';
  out.csv = csv.str();
}

void leakage_table_mode(const ExperimentSpec& spec, AggregateReport& out) {
  const Scheme& scheme = spec.protocol.scheme;
  const std::size_t carriers = scheme.check_particle();
  json rows = json::array();
  std::ostringstream csv;
  csv << "scheme,subset,size,leakage_bits\n";
  for (std::size_t mask = 0; mask < (std::size_t{1} << carriers); ++mask) {
    std::vector<std::size_t> subset;
    std::string label;
    for (std::size_t q = 0; q < carriers; ++q) {
      if ((mask >> q) & 1U) {
        subset.push_back(q);
        if (!label.empty()) label += '+';
        label += sequence_name(scheme, q);
      }
    }
    const double bits = grouped_leakage(scheme, subset);
    rows.push_back({{"subset", label}, {"particles", subset}, {"size", subset.size()}, {"leakage_bits", bits}});
    csv << scheme.name() << ',' << label << ',' << subset.size() << ',' << format_double(bits) << '\n';
  }
  out.document["results"] = {{"scheme", scheme.name()}, {"rows", rows}};
  out.csv = csv.str();
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kRun: return "run";
    case Mode::kAttackSweep: return "attack-sweep";
    case Mode::kFamilyVerify: return "family-verify";
    case Mode::kLeakageTable: return "leakage-table";
  }
  return "?";
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

ExperimentSpec parse_spec(std::span<const std::string> args, std::optional<std::string> config_text) {
  CLI::App app{"Multi-step GHZ direct communication simulator", "qsdc_sim"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> flags;
  std::string config_path;
  bool verbose = false;

  auto add_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat JSON file of flag values");
    for (const std::string& key : known_keys()) {
      if (key == "verbose-trials") continue;
      sub->add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; });
    }
    sub->add_flag("--verbose-trials", verbose, "include per-trial details in the report");
  };
  for (const char* name : {"run", "attack-sweep", "family-verify", "leakage-table"}) add_options(app.add_subcommand(name));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::string key = "arguments";
    const std::string msg = e.what();
    const auto dash = msg.find("--");
    if (dash != std::string::npos) {
      const auto end = msg.find_first_of(" :'\"", dash);
      key = msg.substr(dash + 2, end == std::string::npos ? std::string::npos : end - dash - 2);
    }
    throw UsageError(key, msg);
  }
  if (verbose) flags["verbose-trials"] = "true";

  std::map<std::string, std::string> values;
  if (!config_text && !config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("config", "cannot read config file '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    config_text = ss.str();
  }
  if (config_text) values = parse_config_text(*config_text);
  for (const auto& [k, v] : flags) values[k] = v;

  ExperimentSpec spec;
  spec.mode = parse_mode(app.get_subcommands().front()->get_name());
  auto has = [&](const std::string& k) { return values.count(k) > 0; };
  auto get = [&](const std::string& k) { return values.at(k); };

  ProtocolConfig& p = spec.protocol;
  p.batch_size = 256;
  p.check_fraction = 0.1;
  if (has("scheme")) {
    try {
      p.scheme = Scheme::parse(get("scheme"));
    } catch (const std::exception& e) {
      throw UsageError("scheme", std::string("--scheme: ") + e.what());
    }
  }
  if (has("batch-size")) {
    p.batch_size = static_cast<std::size_t>(parse_u64("batch-size", get("batch-size")));
    if (p.batch_size < 1) throw UsageError("batch-size", "--batch-size must be at least 1");
  }
  if (has("check-method")) {
    const std::string v = get("check-method");
    if (v == "1") p.check_method = CheckMethod::kMethod1;
    else if (v == "2") p.check_method = CheckMethod::kMethod2;
    else throw UsageError("check-method", "--check-method must be 1 or 2, got '" + v + "'");
  }
  if (has("check-fraction")) {
    p.check_fraction = parse_double("check-fraction", get("check-fraction"));
    if (!(p.check_fraction > 0.0 && p.check_fraction < 1.0))
      throw UsageError("check-fraction", "--check-fraction must lie in (0, 1), got '" + get("check-fraction") + "'");
  }
  if (has("abort-threshold")) {
    p.abort_threshold = parse_double("abort-threshold", get("abort-threshold"));
    if (p.abort_threshold < 0.0 || p.abort_threshold > 1.0)
      throw UsageError("abort-threshold", "--abort-threshold must lie in [0, 1]");
  }
  if (p.first_check_size() + p.sampling_size() >= p.batch_size)
    throw UsageError("check-fraction", "--check-fraction leaves no payload positions in a batch of " + std::to_string(p.batch_size));

  spec.payload_messages = has("payload-messages") ? static_cast<std::size_t>(parse_u64("payload-messages", get("payload-messages")))
                                                  : p.payload_slots();
  if (has("trials")) {
    spec.trials = static_cast<std::size_t>(parse_u64("trials", get("trials")));
    if (spec.trials < 1) throw UsageError("trials", "--trials must be at least 1");
  }
  if (has("eve-trials")) {
    spec.eve_trials = static_cast<std::size_t>(parse_u64("eve-trials", get("eve-trials")));
    if (spec.eve_trials < 1) throw UsageError("eve-trials", "--eve-trials must be at least 1");
  }
  if (has("jobs")) {
    spec.jobs = static_cast<std::size_t>(parse_u64("jobs", get("jobs")));
    if (spec.jobs < 1) throw UsageError("jobs", "--jobs must be at least 1");
  }
  if (has("verbose-trials")) spec.verbose_trials = parse_bool("verbose-trials", get("verbose-trials"));
  if (has("sweep-values")) {
    spec.sweep_values.clear();
    for (const std::string& v : split_list(get("sweep-values"))) spec.sweep_values.push_back(parse_double("sweep-values", v));
    if (spec.sweep_values.empty()) throw UsageError("sweep-values", "--sweep-values needs at least one value");
    for (double v : spec.sweep_values)
      if (v < 0.0 || v > 1.0) throw UsageError("sweep-values", "--sweep-values: probe beta must lie in [0, 1]");
  }

  if (has("seed")) {
    spec.seed = parse_u64("seed", get("seed"));
  } else {
    std::random_device rd;
    spec.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    spec.seed_generated = true;
  }
  if (has("output")) spec.output_path = get("output");
  if (has("format")) {
    const std::string f = get("format");
    if (f == "json") spec.format = OutputFormat::kJson;
    else if (f == "csv") spec.format = OutputFormat::kCsv;
    else throw UsageError("format", "--format must be json or csv, got '" + f + "'");
  }

  const std::size_t particles = p.scheme.particles();
  spec.attack = has("attack") ? get("attack") : "none";
  if (has("attack-param")) spec.attack_param = parse_double("attack-param", get("attack-param"));
  const bool tag = has("tag-branches") && parse_bool("tag-branches", get("tag-branches"));
  auto targets = has("attack-targets") ? parse_indices("attack-targets", get("attack-targets"), particles) : std::vector<std::size_t>{};
  auto group = has("attack-group") ? parse_indices("attack-group", get("attack-group"), particles) : std::vector<std::size_t>{};
  if (spec.mode == Mode::kAttackSweep && spec.attack == "none")
    throw UsageError("attack", "attack-sweep needs --attack");
  try {
    spec.channel = make_channel(spec.attack, spec.attack_param, tag, std::move(targets), std::move(group));
  } catch (const DomainError& e) {
    throw UsageError("attack-param", std::string("--attack-param: ") + e.what());
  }
  return spec;
}

AggregateReport run_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  AggregateReport out;
  out.document = {
      {"schema_version", kSchemaVersion},
      {"tool_version", kToolVersion},
      {"mode", mode_name(spec.mode)},
      {"seed", spec.seed},
      {"seed_generated", spec.seed_generated},
      {"basis_index_convention", "particle 0 is the most significant digit"},
      {"config", config_json(spec)},
  };
  switch (spec.mode) {
    case Mode::kRun: run_mode(spec, out); break;
    case Mode::kAttackSweep: attack_sweep_mode(spec, out); break;
    case Mode::kFamilyVerify: family_verify_mode(spec, out); break;
    case Mode::kLeakageTable: leakage_table_mode(spec, out); break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  out.document["wall_clock_seconds"] = elapsed.count();
  return out;
}

std::string render_report(const AggregateReport& report, OutputFormat format) {
  if (format == OutputFormat::kCsv) return report.csv;
  return report.document.dump(2) + "\n";
}

void write_report_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move report into place at '" + path + "': " + ec.message());
  }
}

}  // namespace qsdc
