// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line surface. Exit codes: 0 success, 1 a check failed,
// 2 usage, input or validation error.

#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hres/io.hpp"
#include "hres/oracles.hpp"

namespace hres {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

namespace cli {

/// HRES_SEED when set and numeric, otherwise `fallback`.
inline std::uint64_t default_seed(std::uint64_t fallback = 1) {
  const char* env = std::getenv("HRES_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used == std::string_view{env}.size()) return v;
  } catch (const std::exception&) {
  }
  return fallback;
}

inline std::optional<ProposalPolicy> parse_order(const std::string& text) {
  if (text == "id") return ProposalPolicy::lowest_id();
  if (text == "random") return ProposalPolicy::seeded(default_seed());
  if (text.rfind("random:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string digits = text.substr(7);
      const auto seed = std::stoull(digits, &used);
      if (used == digits.size()) return ProposalPolicy::seeded(seed);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

inline void print_issues(std::ostream& err, std::span<const Issue> issues, std::string_view level) {
  for (const auto& i : issues) err << level << ": " << format_issue(i) << "\n";
}

/// Loads and validates, printing every problem. nullopt means exit 2.
inline std::optional<Instance> load_or_report(const std::string& path, bool tiebreak,
                                              std::ostream& err) {
  ValidationOptions options;
  if (tiebreak) options.tiebreak_by_id = true;
  auto result = load_instance(path, options);
  print_issues(err, result.warnings, "warning");
  print_issues(err, result.notes, "note");
  if (!result.ok()) {
    print_issues(err, result.errors, "error");
    return std::nullopt;
  }
  return std::move(*result.instance);
}

inline void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << to_text(j);
  } else {
    write_file(out_path, to_text(j));
  }
}

inline void summarize(std::ostream& err, std::span<const AuditReport> audits) {
  for (const auto& a : audits) {
    err << (a.passed() ? "PASS " : "FAIL ") << a.property << " (" << a.checked << " checks";
    if (!a.passed()) err << ", " << a.counterexamples.size() << " counterexamples";
    err << ")\n";
    for (std::size_t k = 0; k < a.counterexamples.size() && k < 5; ++k) {
      err << "  " << a.counterexamples[k].kind << ": " << a.counterexamples[k].detail << "\n";
    }
  }
}

inline bool all_passed(std::span<const AuditReport> audits) {
  return std::all_of(audits.begin(), audits.end(), [](const auto& a) { return a.passed(); });
}

/// Outcome-level audits shared by `match --audit` and `verify`.
inline std::vector<AuditReport> audit_outcome(const Instance& instance, const Matching& matching,
                                              std::span<const SeatAssignment> seats,
                                              Variant variant, DereservedPool pool,
                                              const OfferProcessLog* log, bool exhaustive) {
  std::vector<AuditReport> audits;
  AuditReport ranked{"ranked_contracts", 0, {}};
  for (const auto& c : matching.contracts()) {
    ++ranked.checked;
    if (!preference_position(instance.individual(c.person).preferences, c.slot())) {
      ranked.counterexamples.push_back(
          {"unranked", describe(instance, c) + " is not on its holder's list", {c}, {c.person}});
    }
  }
  audits.push_back(std::move(ranked));
  AuditReport feasible{"weak_feasibility", 1, {}};
  if (!matching.weakly_feasible(instance)) {
    feasible.counterexamples.push_back({"infeasible",
                                        "an individual holds two contracts or an institution "
                                        "exceeds its total capacity",
                                        {matching.contracts().begin(), matching.contracts().end()},
                                        {}});
  }
  audits.push_back(std::move(feasible));
  audits.push_back(check_seat_caps(instance, seats, variant));

  const Profile profile = instance.profile();
  const auto rules = make_rules(instance, profile, variant, pool);
  StabilityOptions so;
  if (exhaustive) so.search = BlockingSearch::kExhaustive;
  audits.push_back(check_stability(instance, matching, rules, so));
  audits.push_back(check_justified_envy(instance, matching));

  if (log != nullptr) {
    AuditReport monitor{"offer_process_monitors", log->steps.size(), {}};
    for (const auto& v : monitor_offer_process(*log)) {
      monitor.counterexamples.push_back(
          {"condition_" + std::to_string(v.condition),
           "step " + std::to_string(v.step) + " at " + instance.institution(v.institution).id +
               " category " + std::string{to_string(v.category)} + ": " + v.detail,
           {}, {}});
    }
    audits.push_back(std::move(monitor));
    AuditReport structure{"offer_process_structure", log->steps.size(), {}};
    for (auto& problem : check_log_invariants(*log, profile)) {
      structure.counterexamples.push_back({"log", std::move(problem), {}, {}});
    }
    audits.push_back(std::move(structure));
  }
  return audits;
}

}  // namespace cli

/// Runs one command line. `argv[0]` is the program name.
inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vertical and hierarchical horizontal reservations: choice rules, cumulative "
               "offer mechanism and brute-force audits",
               "hres"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string instance_path, outcome_path, out_path, institution_id, order = "id";
  std::string pool_text = "any";
  std::string tiebreak_text = "none";
  bool transfer = false, with_log = false, exhaustive = false, tiebreak = false, audit = false;
  std::size_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t cap = 200000;
  GenParams gen;
  std::vector<int> shares;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("instance", instance_path, "Instance file")->required();
    sub->add_option("--tiebreak", tiebreak_text, "none (ties are errors) | id (equal scores by id)")
        ->check(CLI::IsMember({"none", "id"}));
  };
  auto add_variant = [&](CLI::App* sub) {
    sub->add_flag("--transfer", transfer, "Transfer vacant OBC seats to a final open pool");
    sub->add_option("--dereserved-pool", pool_text,
                    "Contracts the transferred pool may bind: any | open-only")
        ->check(CLI::IsMember({"any", "open-only"}));
  };

  auto* validate = app.add_subcommand("validate", "Validate an instance file");
  add_common(validate);

  auto* choose = app.add_subcommand("choose", "Aggregate choice at one institution, with trace");
  add_common(choose);
  add_variant(choose);
  choose->add_option("--institution", institution_id, "Institution id")->required();
  choose->add_option("--out", out_path, "Write JSON here instead of stdout");

  auto* match = app.add_subcommand("match", "Run the cumulative offer mechanism");
  add_common(match);
  add_variant(match);
  match->add_option("--order", order, "Proposal order: id | random | random:<seed>");
  match->add_flag("--log", with_log, "Include the offer-process log");
  match->add_flag("--audit", audit, "Attach outcome audits");
  match->add_option("--out", out_path, "Write JSON here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Audit an outcome file against its instance");
  add_common(verify);
  verify->add_option("outcome", outcome_path, "Outcome file")->required();
  verify->add_flag("--exhaustive", exhaustive, "Enumerate blocking sets up to size 3");
  verify->add_option("--out", out_path, "Write the audit JSON here instead of stdout");

  auto* probe = app.add_subcommand("probe", "Fuzz choice properties and probe misreports");
  add_common(probe);
  probe->add_option("--trials", trials, "Fuzz trials");
  probe->add_option("--seed", seed, "Seed (default HRES_SEED or 1)");
  probe->add_option("--cap", cap, "Largest misreport enumeration attempted");
  probe->add_option("--out", out_path, "Write the audit JSON here instead of stdout");

  auto* gen_cmd = app.add_subcommand("gen", "Generate a random valid instance");
  gen_cmd->add_option("--seed", seed, "Seed (default HRES_SEED or 1)");
  gen_cmd->add_option("--out", out_path, "Output path")->required();
  gen_cmd->add_option("--individuals", gen.individuals);
  gen_cmd->add_option("--institutions", gen.institutions);
  gen_cmd->add_option("--types", gen.horizontal_types);
  gen_cmd->add_option("--depth", gen.max_depth);
  gen_cmd->add_option("--typed-percent", gen.typed_percent);
  gen_cmd->add_option("--min-capacity", gen.min_capacity);
  gen_cmd->add_option("--max-capacity", gen.max_capacity);
  gen_cmd->add_option("--max-quota", gen.max_quota);
  gen_cmd->add_option("--quota-percent", gen.quota_percent);
  gen_cmd->add_option("--min-list-length", gen.min_list_length);
  gen_cmd->add_option("--shares", shares, "Percent SC,ST,OBC,EWS")->delimiter(',')->expected(4);
  gen_cmd->add_flag("--common-ranking", gen.common_ranking);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  tiebreak = tiebreak_text == "id";
  const Variant variant = transfer ? Variant::kTransfer : Variant::kPlain;
  const DereservedPool pool = pool_text == "open-only" ? DereservedPool::kOpenContractsOnly
                                                       : DereservedPool::kAnyRemainingContract;
  try {
    if (*validate) {
      auto instance = cli::load_or_report(instance_path, tiebreak, err);
      if (!instance) return kExitUsage;
      out << "valid: " << instance->individual_count() << " individuals, "
          << instance->institution_count() << " institutions, " << instance->forest().size()
          << " horizontal types\n";
      return kExitOk;
    }

    if (*choose) {
      auto instance = cli::load_or_report(instance_path, tiebreak, err);
      if (!instance) return kExitUsage;
      const auto s = instance->find_institution(institution_id);
      if (!s) {
        err << "error: UNKNOWN_INSTITUTION: " << institution_id << "\n";
        return kExitUsage;
      }
      auto config = make_aggregate_config(*instance, *s, variant);
      config.dereserved_pool = pool;
      const InstitutionRule rule(*instance, *s, config);
      const auto offers = acceptable_offers(*instance, *s);
      const auto outcome = rule.choose(offers);
      Json j = aggregate_to_json(*instance, outcome, true);
      j["offers"] = contracts_to_json(*instance, offers);
      j["variant"] = std::string{to_string(variant)};
      cli::emit(j, out_path, out);
      return kExitOk;
    }

    if (*match) {
      auto instance = cli::load_or_report(instance_path, tiebreak, err);
      if (!instance) return kExitUsage;
      const auto policy = cli::parse_order(order);
      if (!policy) {
        err << "error: --order must be id, random or random:<seed>\n";
        return kExitUsage;
      }
      CopOptions options{variant, *policy, with_log || audit, pool};
      const auto outcome = run_cop(*instance, options);
      Invocation inv{"match", instance_path, variant, *policy, pool, tiebreak};
      std::vector<AuditReport> audits;
      if (audit) {
        audits = cli::audit_outcome(*instance, outcome.matching, outcome.seats, variant, pool,
                                    &outcome.log, false);
        cli::summarize(err, audits);
      }
      cli::emit(outcome_to_json(*instance, outcome, inv, with_log, audits), out_path, out);
      return cli::all_passed(audits) ? kExitOk : kExitCheckFailed;
    }

    if (*verify) {
      auto instance = cli::load_or_report(instance_path, tiebreak, err);
      if (!instance) return kExitUsage;
      std::vector<Issue> errors;
      const auto loaded = load_outcome(outcome_path, *instance, errors);
      if (!loaded) {
        cli::print_issues(err, errors, "error");
        return kExitUsage;
      }
      const auto audits = cli::audit_outcome(
          *instance, loaded->matching, loaded->seats, loaded->variant, loaded->dereserved_pool,
          loaded->log ? &*loaded->log : nullptr, exhaustive);
      cli::summarize(err, audits);
      Json j = Json::array();
      for (const auto& a : audits) j.push_back(audit_to_json(*instance, a));
      cli::emit(j, out_path, out);
      return cli::all_passed(audits) ? kExitOk : kExitCheckFailed;
    }

    if (*probe) {
      auto instance = cli::load_or_report(instance_path, tiebreak, err);
      if (!instance) return kExitUsage;
      const std::uint64_t base = seed.value_or(cli::default_seed());
      std::vector<AuditReport> audits;
      FuzzOptions fo;
      fo.trials = trials;
      fo.seed = base;
      audits.push_back(fuzz_choice_properties(hierarchical_rule(), fo));

      AuditReport fairness{"aggregate_fairness", 0, {}};
      Rng rng(base);
      for (std::size_t t = 0; t < trials && instance->institution_count() > 0; ++t) {
        const InstitutionIndex s = institution(rng.below(instance->institution_count()));
        std::vector<Contract> offers;
        for (const auto& c : acceptable_offers(*instance, s)) {
          if (rng.chance(2, 3)) offers.push_back(c);
        }
        for (Variant v : {Variant::kPlain, Variant::kTransfer}) {
          const auto chosen = InstitutionRule(*instance, s, v).choose(offers).contracts();
          fairness.absorb(check_fairness(*instance, s, offers, chosen));
        }
      }
      audits.push_back(std::move(fairness));

      AuditReport order_audit{"order_invariance", 0, {}};
      for (Variant v : {Variant::kPlain, Variant::kTransfer}) {
        const auto reference = run_cop(*instance, {v, {}, false, pool}).matching;
        for (std::uint64_t k = 0; k < 20; ++k) {
          ++order_audit.checked;
          const auto other =
              run_cop(*instance, {v, ProposalPolicy::seeded(base + k), false, pool}).matching;
          if (other != reference) {
            order_audit.counterexamples.push_back(
                {"order", std::string{to_string(v)} + " outcome changes under random:" +
                              std::to_string(base + k),
                 {other.contracts().begin(), other.contracts().end()}, {}});
          }
        }
      }
      audits.push_back(std::move(order_audit));

      for (Variant v : {Variant::kPlain, Variant::kTransfer}) {
        try {
          auto report = probe_strategyproofness(
              *instance,
              [v, pool](const Instance& i, const Profile& p) {
                return run_cop(i, p, {v, {}, false, pool}).matching;
              },
              cap);
          report.property += std::string{"_"} + std::string{to_string(v)};
          audits.push_back(std::move(report));
        } catch (const Error& e) {
          if (e.code() != IssueCode::kEnumerationCapExceeded) throw;
          err << "note: strategy-proofness probe skipped (" << e.what() << ")\n";
        }
      }
      cli::summarize(err, audits);
      Json j = Json::array();
      for (const auto& a : audits) j.push_back(audit_to_json(*instance, a));
      cli::emit(j, out_path, out);
      return cli::all_passed(audits) ? kExitOk : kExitCheckFailed;
    }

    if (*gen_cmd) {
      if (!shares.empty()) std::copy(shares.begin(), shares.end(), gen.category_percent.begin());
      const std::uint64_t s = seed.value_or(cli::default_seed());
      const auto instance = generate_instance(s, gen);
      save_instance(out_path, instance);
      out << "wrote " << out_path << " (seed " << s << ")\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

/// Convenience form without a program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"hres"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hres
