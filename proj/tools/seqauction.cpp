#include <exception>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "seqauction/io.hpp"
#include "seqauction/random_instances.hpp"
#include "seqauction/verify.hpp"

using namespace seqauction;

namespace {

// exit codes: 0 success, 1 failed check or io error, 2 usage error
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rat parse_positive(const std::string& text, const std::string& what) {
  Rat r;
  try {
    r = parse_rat(text);
  } catch (const std::exception& e) {
    throw UsageError(what + ": " + e.what());
  }
  if (!(r > 0)) throw UsageError(what + " must be positive");
  return r;
}

Rat parse_budget(const std::string& text) {
  Rat r;
  try {
    r = parse_rat(text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("budget: ") + e.what());
  }
  if (!(r > 0)) throw UsageError("budgets must be positive");
  return r;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw RunError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw RunError("write failed for " + path);
}

int run_solve(const std::string& b1_text, const std::string& b2_text, int items,
              const std::string& format, const std::string& out_path) {
  const Rat b1 = parse_budget(b1_text);
  const Rat b2 = parse_budget(b2_text);
  Engine eng;
  const OutcomeTrace tr = canonical_trace(eng, b1, b2, items);
  const TraceDoc doc = make_trace_doc(tr, b1, b2, items);
  write_output(out_path,
               format == "json" ? trace_to_json(doc).dump(2) + "\n" : trace_pretty(doc));
  return 0;
}

int run_table(int items, const std::string& engine_name, const std::string& out_path) {
  if (engine_name == "clinching") {
    write_output(out_path, clinching_table_text(items));
    return 0;
  }
  Engine eng;
  write_output(out_path, sequential_table_text(eng, items));
  return 0;
}

int run_sweep(int items, int samples, const std::string& out_path) {
  write_output(out_path, sweep_csv(items, samples));
  return 0;
}

int run_verify_deviations(int items, int instances, unsigned long long seed, bool include_ties) {
  Engine eng;
  std::mt19937_64 rng(seed);
  int audited = 0;
  int skipped = 0;
  for (int i = 0; i < instances; ++i) {
    RandomInstance inst;
    if (include_ties) {
      inst = random_instance(rng);
      if (canonical_trace(eng, inst.b1, inst.b2, items).kind == TraceKind::Tie) {
        ++skipped;
        continue;
      }
    } else {
      inst = random_deterministic_instance(eng, rng, items);
    }
    const DeviationReport rep = one_shot_deviation_check(eng, inst.b1, inst.b2, items);
    ++audited;
    if (rep.worst_gain_sign == GainSign::Positive) {
      for (const DeviationCheck& chk : rep.checks) {
        if (chk.gain_sign != GainSign::Positive) continue;
        std::cout << "FAIL: profitable deviation at b1=" << render_rat(inst.b1)
                  << " b2=" << render_rat(inst.b2) << " items=" << items << ": round "
                  << chk.round << " agent " << chk.agent << " bids " << render_bid(chk.bid)
                  << " for (" << render_rat(chk.deviation_utility.items) << ", "
                  << render_rat(chk.deviation_utility.money) << ") over ("
                  << render_rat(chk.equilibrium_utility.items) << ", "
                  << render_rat(chk.equilibrium_utility.money) << ")\n";
        return 1;
      }
    }
  }
  std::cout << "deviations: items=" << items << " seed=" << seed << ": audited " << audited
            << " instances, no profitable one-shot deviation";
  if (skipped > 0) std::cout << " (" << skipped << " coin-flip instances skipped)";
  std::cout << "\npass\n";
  return 0;
}

int run_verify_grid(const std::string& b1_text, const std::string& b2_text, int items,
                    const std::string& delta_text) {
  const Rat b1 = parse_budget(b1_text);
  const Rat b2 = parse_budget(b2_text);
  const Rat delta = parse_positive(delta_text, "delta");
  Engine eng;
  const Rat price_bound = 2 * delta;
  const Rat utility_bound = Rat(2 * items) * delta;
  const GridComparison cmp = compare_canonical_vs_grid(eng, b1, b2, items, delta);
  if (cmp.tie_encountered) {
    const GridSolution gs = grid_backward_induction(b1, b2, items, delta);
    const OutcomeTrace tr = canonical_trace(eng, b1, b2, items);
    if (!gs.tie_encountered || tr.kind != TraceKind::Tie) {
      std::cout << "FAIL: only one side of the comparison reaches a coin flip\n";
      return 1;
    }
    const auto gap = [](const LexUtility& a, const LexUtility& b) {
      const Rat di = a.items > b.items ? a.items - b.items : b.items - a.items;
      const Rat dm = a.money > b.money ? a.money - b.money : b.money - a.money;
      return di > dm ? di : dm;
    };
    const Rat g1 = gap(gs.u1, tr.u1);
    const Rat g2 = gap(gs.u2, tr.u2);
    std::cout << "grid: delta=" << render_rat(delta)
              << ": both engines reach the coin flip; expected-utility gaps "
              << render_rat(g1) << ", " << render_rat(g2) << " (bound "
              << render_rat(utility_bound) << ")\n";
    if (g1 > utility_bound || g2 > utility_bound) {
      std::cout << "FAIL: expected utilities drift apart\n";
      return 1;
    }
    std::cout << "pass\n";
    return 0;
  }
  std::cout << "grid: delta=" << render_rat(delta) << ": winner_match="
            << (cmp.winner_match ? "yes" : "no") << " max_price_gap="
            << render_rat(cmp.max_price_gap) << " (bound " << render_rat(price_bound)
            << ") utility gaps " << render_rat(cmp.utility_gap.first) << ", "
            << render_rat(cmp.utility_gap.second) << " (bound " << render_rat(utility_bound)
            << ")\n";
  if (!cmp.winner_match || cmp.max_price_gap > price_bound ||
      cmp.utility_gap.first > utility_bound || cmp.utility_gap.second > utility_bound) {
    std::cout << "FAIL: discretized solution disagrees with the exact one\n";
    return 1;
  }
  std::cout << "pass\n";
  return 0;
}

int run_verify_phi(int max_sum) {
  long closed_vs_enum = 0;
  for (int m = 0; m + 0 <= max_sum; ++m) {
    for (int n = 0; m + n <= max_sum; ++n) {
      if (phi(m, n) != phi_enumerated(m, n)) {
        std::cout << "FAIL: phi(" << m << ", " << n << ") disagrees with enumeration\n";
        return 1;
      }
      ++closed_vs_enum;
    }
  }
  long identities = 0;
  for (int m = 0; m <= max_sum; ++m) {
    for (int n = 0; n <= max_sum; ++n) {
      if (phi(m, n) + phi(n, m) != 1) {
        std::cout << "FAIL: phi(" << m << ", " << n << ") complement identity\n";
        return 1;
      }
      if (m >= 1) {
        const Rat step = Rat(binomial(n + m + 1, n + 1), Int(1) << (m + n + 1));
        if (phi(m, n) - phi(m - 1, n + 1) != step) {
          std::cout << "FAIL: phi(" << m << ", " << n << ") difference identity\n";
          return 1;
        }
        if (phi(m, n) < phi(m - 1, n)) {
          std::cout << "FAIL: phi not nondecreasing at m=" << m << ", n=" << n << "\n";
          return 1;
        }
      }
      if (n >= 1 && phi(m, n) > phi(m, n - 1)) {
        std::cout << "FAIL: phi not nonincreasing at m=" << m << ", n=" << n << "\n";
        return 1;
      }
      ++identities;
    }
  }
  std::cout << "phi: " << closed_vs_enum << " closed-vs-enumerated values, " << identities
            << " identity probes\npass\n";
  return 0;
}

int run_verify_ties(int max_items) {
  Engine eng;
  int ladder = 0;
  int matched = 0;
  for (int k = 2; k <= max_items; ++k) {
    for (int k1 = 1; k1 < k; ++k1) {
      const int k2 = k - k1;
      {
        // coin-ladder boundary: budgets are exact multiples of the shared price
        const Rat b1(k1, k2 + 1);
        const Rat b2(1);
        const AllocationCase ac = classify(eng, b1, b2, k);
        if (ac.kind != CaseKind::TieTypeI) {
          std::cout << "FAIL: ladder instance not classified as TieTypeI\n";
          return 1;
        }
        const auto closed = tie_ladder_closed_form(b1, b2, k1, k2);
        const auto enumerated = tie_ladder_enumeration(ac.pstar, k1, k2 + 1, k);
        const auto engine_value = tie_expected_utility(eng, b1, b2, k);
        if (closed != enumerated || closed != engine_value) {
          std::cout << "FAIL: ladder values split at k=" << k << " k1=" << k1 << "\n";
          return 1;
        }
        ++ladder;
      }
      {
        // matched boundary: both budgets sit one price above their multiples
        const Rat b1(k1 + 1, k2 + 1);
        const Rat b2(1);
        const AllocationCase ac = classify(eng, b1, b2, k);
        if (ac.kind != CaseKind::TieTypeIIA) {
          std::cout << "FAIL: matched instance not classified as TieTypeIIA\n";
          return 1;
        }
        const auto first = tie_matched_enumeration(ac.pstar, k1 + 1, k2 + 1, k, false);
        const auto second = tie_matched_enumeration(ac.pstar, k1 + 1, k2 + 1, k, true);
        const auto engine_value = tie_expected_utility(eng, b1, b2, k);
        const LexUtility want1{Rat(ac.k1), b1 - Rat(ac.k1) * ac.pstar};
        const LexUtility want2{Rat(ac.k2), b2 - Rat(ac.k2) * ac.pstar};
        if (first != second || engine_value.first != want1 || engine_value.second != want2 ||
            first.first != want1 || first.second != want2) {
          std::cout << "FAIL: matched values split at k=" << k << " k1=" << k1 << "\n";
          return 1;
        }
        ++matched;
      }
    }
  }
  std::cout << "ties: " << ladder << " ladder instances, " << matched
            << " matched instances, closed forms equal enumeration\npass\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact subgame-perfect outcomes for sequential budget-constrained auctions"};
  app.require_subcommand(1);

  std::string b1_text, b2_text, delta_text, engine_name = "sequential", format, out_path;
  int items = 2;
  int samples = 99;
  int instances = 50;
  int phi_max = 12;
  unsigned long long seed = 7;
  bool include_ties = false;

  CLI::App* solve = app.add_subcommand("solve", "print the canonical outcome of one instance");
  solve->add_option("--b1", b1_text, "agent 1 budget, p/q")->required();
  solve->add_option("--b2", b2_text, "agent 2 budget, p/q")->required();
  solve->add_option("--items", items, "identical items, at most 12 (cost doubles per item)")
      ->required()
      ->check(CLI::Range(1, 12));
  solve->add_option("--format", format, "pretty|json")
      ->check(CLI::IsMember({"pretty", "json"}));
  solve->add_option("--out", out_path, "write to this file instead of stdout");

  CLI::App* trace = app.add_subcommand("trace", "like solve, defaulting to json output");
  trace->add_option("--b1", b1_text, "agent 1 budget, p/q")->required();
  trace->add_option("--b2", b2_text, "agent 2 budget, p/q")->required();
  trace->add_option("--items", items, "identical items, at most 12 (cost doubles per item)")
      ->required()
      ->check(CLI::Range(1, 12));
  trace->add_option("--format", format, "pretty|json")
      ->check(CLI::IsMember({"pretty", "json"}));
  trace->add_option("--out", out_path, "write to this file instead of stdout");

  CLI::App* table = app.add_subcommand("table", "regenerate a phase table from the engine");
  table->add_option("--items", items, "2 or 3")->required()->check(CLI::IsMember({2, 3}));
  table->add_option("--engine", engine_name, "sequential|clinching")
      ->check(CLI::IsMember({"sequential", "clinching"}));
  table->add_option("--out", out_path, "write to this file instead of stdout");

  CLI::App* sweep = app.add_subcommand("sweep", "item-fraction curve across wealth splits");
  sweep->add_option("--items", items, "identical items for sale")->required()
      ->check(CLI::Range(1, 10000));
  sweep->add_option("--samples", samples, "interior wealth samples, at least 2")->required()
      ->check(CLI::Range(2, 100000));
  sweep->add_option("--out", out_path, "write the csv to this file instead of stdout");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->require_subcommand(1);

  CLI::App* dev = verify->add_subcommand("deviations", "one-shot deviation audit");
  dev->add_option("--items", items, "identical items, at most 6")->required()
      ->check(CLI::Range(1, 6));
  dev->add_option("--instances", instances, "random instances to audit")
      ->check(CLI::PositiveNumber);
  dev->add_option("--seed", seed, "generator seed");
  dev->add_flag("--include-ties", include_ties,
                "draw unfiltered instances and skip the coin flips");

  CLI::App* grid = verify->add_subcommand("grid", "discretized backward-induction comparison");
  grid->add_option("--b1", b1_text, "agent 1 budget, p/q")->required();
  grid->add_option("--b2", b2_text, "agent 2 budget, p/q")->required();
  grid->add_option("--items", items, "identical items, at most 3")->required()
      ->check(CLI::Range(1, 3));
  grid->add_option("--delta", delta_text, "grid step, p/q dividing both budgets")->required();

  CLI::App* phi_cmd = verify->add_subcommand("phi", "coin-ladder closed form vs enumeration");
  phi_cmd->add_option("--max", phi_max, "largest m+n to enumerate")->check(CLI::Range(0, 40));

  CLI::App* ties = verify->add_subcommand("ties", "tie-value closed forms vs enumeration");
  ties->add_option("--items", items, "largest item count")->check(CLI::Range(2, 8));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      return run_solve(b1_text, b2_text, items, format.empty() ? "pretty" : format, out_path);
    }
    if (trace->parsed()) {
      return run_solve(b1_text, b2_text, items, format.empty() ? "json" : format, out_path);
    }
    if (table->parsed()) return run_table(items, engine_name, out_path);
    if (sweep->parsed()) return run_sweep(items, samples, out_path);
    if (verify->parsed()) {
      if (dev->parsed()) return run_verify_deviations(items, instances, seed, include_ties);
      if (grid->parsed()) return run_verify_grid(b1_text, b2_text, items, delta_text);
      if (phi_cmd->parsed()) return run_verify_phi(phi_max);
      if (ties->parsed()) {
        return run_verify_ties(ties->count("--items") > 0 ? items : 6);
      }
    }
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
