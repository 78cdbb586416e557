#pragma once

#include <cstddef>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "seqauction/canonical.hpp"
#include "seqauction/clinching.hpp"

namespace seqauction {

using ordered_json = nlohmann::ordered_json;

inline const char* case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::TwoPhase:
      return "TwoPhase";
    case CaseKind::TieTypeI:
      return "TieTypeI";
    case CaseKind::TieTypeIIA:
      return "TieTypeIIA";
    case CaseKind::TieTypeIIB:
      return "TieTypeIIB";
  }
  throw std::invalid_argument("case_name: unknown case kind");
}

inline CaseKind case_from_name(const std::string& name) {
  if (name == "TwoPhase") return CaseKind::TwoPhase;
  if (name == "TieTypeI") return CaseKind::TieTypeI;
  if (name == "TieTypeIIA") return CaseKind::TieTypeIIA;
  if (name == "TieTypeIIB") return CaseKind::TieTypeIIB;
  throw std::invalid_argument("case_from_name: unknown case tag " + name);
}

inline std::string render_bid(const Bid& b) { return render_rat(b.amount) + (b.plus ? "+" : ""); }

// a*B1 + b*B2 with zero terms dropped and unit coefficients left bare
inline std::string render_lin(const LinForm& f, const char* n1 = "B1", const char* n2 = "B2") {
  const auto term = [](const Rat& mag, const char* name) {
    return mag == 1 ? std::string(name) : render_rat(mag) + "*" + name;
  };
  std::string out;
  if (f.a != 0) {
    if (f.a < 0) out += "-";
    out += term(f.a < 0 ? -f.a : f.a, n1);
  }
  if (f.b != 0) {
    if (out.empty()) {
      if (f.b < 0) out += "-";
    } else {
      out += f.b < 0 ? " - " : " + ";
    }
    out += term(f.b < 0 ? -f.b : f.b, n2);
  }
  return out.empty() ? "0" : out;
}

// === trace documents ===

// Flat serialization image of an outcome trace; the JSON layer reads and
// writes exactly this, so a round trip is an equality check on the struct.
struct TraceDoc {
  struct Row {
    int round = 0;
    int winner = 0;
    Rat price;
    Bid bid1, bid2;

    friend bool operator==(const Row&, const Row&) = default;
  };

  int items = 0;
  Rat b1, b2;
  CaseKind case_kind = CaseKind::TwoPhase;
  std::vector<Row> rounds;
  bool has_tie = false;
  int tie_items_left = 0;
  Rat tie_b1, tie_b2;
  CaseKind tie_kind = CaseKind::TwoPhase;
  Rat tie_pstar;
  LexUtility u1, u2;
  Rat final_b1, final_b2;

  friend bool operator==(const TraceDoc&, const TraceDoc&) = default;
};

inline TraceDoc make_trace_doc(const OutcomeTrace& tr, const Rat& b1, const Rat& b2, int k) {
  TraceDoc d;
  d.items = k;
  d.b1 = b1;
  d.b2 = b2;
  d.case_kind = tr.kind == TraceKind::Tie ? tr.tie_case.kind : tr.allocation.kind;
  for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
    const TraceRound& rd = tr.rounds[i];
    d.rounds.push_back({static_cast<int>(i) + 1, rd.winner, rd.price, rd.bid1, rd.bid2});
  }
  if (tr.kind == TraceKind::Tie) {
    d.has_tie = true;
    d.tie_items_left = tr.tie_items;
    d.tie_b1 = tr.tie_b1;
    d.tie_b2 = tr.tie_b2;
    d.tie_kind = tr.tie_case.kind;
    d.tie_pstar = tr.tie_case.pstar;
  }
  d.u1 = tr.u1;
  d.u2 = tr.u2;
  d.final_b1 = tr.final_b1;
  d.final_b2 = tr.final_b2;
  return d;
}

inline ordered_json lex_to_json(const LexUtility& u) {
  return ordered_json{{"items", render_rat(u.items)}, {"money", render_rat(u.money)}};
}

inline ordered_json bid_to_json(const Bid& b) {
  return ordered_json{{"amount", render_rat(b.amount)}, {"plus", b.plus}};
}

inline ordered_json trace_to_json(const TraceDoc& d) {
  ordered_json doc;
  doc["items"] = d.items;
  doc["b1"] = render_rat(d.b1);
  doc["b2"] = render_rat(d.b2);
  doc["case"] = case_name(d.case_kind);
  ordered_json rounds = ordered_json::array();
  for (const TraceDoc::Row& rd : d.rounds) {
    rounds.push_back(ordered_json{{"round", rd.round},
                                  {"winner", rd.winner},
                                  {"price", render_rat(rd.price)},
                                  {"bids", ordered_json::array({bid_to_json(rd.bid1), bid_to_json(rd.bid2)})}});
  }
  doc["rounds"] = std::move(rounds);
  if (d.has_tie) {
    doc["tie"] = ordered_json{{"items_left", d.tie_items_left},
                              {"b1", render_rat(d.tie_b1)},
                              {"b2", render_rat(d.tie_b2)},
                              {"case", case_name(d.tie_kind)},
                              {"p_star", render_rat(d.tie_pstar)}};
  }
  doc["utilities"] = ordered_json{{"1", lex_to_json(d.u1)}, {"2", lex_to_json(d.u2)}};
  doc["final_budgets"] = ordered_json::array({render_rat(d.final_b1), render_rat(d.final_b2)});
  return doc;
}

inline ordered_json trace_to_json(const OutcomeTrace& tr, const Rat& b1, const Rat& b2, int k) {
  return trace_to_json(make_trace_doc(tr, b1, b2, k));
}

inline LexUtility lex_from_json(const ordered_json& j) {
  return {parse_rat(j.at("items").get<std::string>()), parse_rat(j.at("money").get<std::string>())};
}

inline Bid bid_from_json(const ordered_json& j) {
  return {parse_rat(j.at("amount").get<std::string>()), j.at("plus").get<bool>()};
}

inline TraceDoc trace_from_json(const ordered_json& doc) {
  TraceDoc d;
  d.items = doc.at("items").get<int>();
  d.b1 = parse_rat(doc.at("b1").get<std::string>());
  d.b2 = parse_rat(doc.at("b2").get<std::string>());
  d.case_kind = case_from_name(doc.at("case").get<std::string>());
  for (const ordered_json& rj : doc.at("rounds")) {
    const ordered_json& bids = rj.at("bids");
    if (bids.size() != 2) throw std::invalid_argument("trace_from_json: expected two bids per round");
    d.rounds.push_back({rj.at("round").get<int>(), rj.at("winner").get<int>(),
                        parse_rat(rj.at("price").get<std::string>()), bid_from_json(bids[0]),
                        bid_from_json(bids[1])});
  }
  if (doc.contains("tie")) {
    const ordered_json& tj = doc.at("tie");
    d.has_tie = true;
    d.tie_items_left = tj.at("items_left").get<int>();
    d.tie_b1 = parse_rat(tj.at("b1").get<std::string>());
    d.tie_b2 = parse_rat(tj.at("b2").get<std::string>());
    d.tie_kind = case_from_name(tj.at("case").get<std::string>());
    d.tie_pstar = parse_rat(tj.at("p_star").get<std::string>());
  }
  d.u1 = lex_from_json(doc.at("utilities").at("1"));
  d.u2 = lex_from_json(doc.at("utilities").at("2"));
  const ordered_json& fb = doc.at("final_budgets");
  if (fb.size() != 2) throw std::invalid_argument("trace_from_json: expected two final budgets");
  d.final_b1 = parse_rat(fb[0].get<std::string>());
  d.final_b2 = parse_rat(fb[1].get<std::string>());
  return d;
}

inline std::string trace_pretty(const TraceDoc& d) {
  std::ostringstream os;
  os << d.items << " items, budgets " << render_rat(d.b1) << " and " << render_rat(d.b2) << "\n";
  os << "case " << case_name(d.case_kind) << "\n";
  for (const TraceDoc::Row& rd : d.rounds)
    os << "  round " << rd.round << ": " << rd.winner << " @ " << render_rat(rd.price)
       << "  (bids " << render_bid(rd.bid1) << ", " << render_bid(rd.bid2) << ")\n";
  if (d.has_tie) {
    os << "  coin flip with " << d.tie_items_left << " items left at budgets "
       << render_rat(d.tie_b1) << ", " << render_rat(d.tie_b2) << "; shared price "
       << render_rat(d.tie_pstar) << " (" << case_name(d.tie_kind) << ")\n";
  }
  const char* tag = d.has_tie ? " (expected)" : "";
  os << "utilities: agent 1 (" << render_rat(d.u1.items) << ", " << render_rat(d.u1.money)
     << "), agent 2 (" << render_rat(d.u2.items) << ", " << render_rat(d.u2.money) << ")" << tag
     << "\n";
  os << "final budgets: " << render_rat(d.final_b1) << ", " << render_rat(d.final_b2) << tag
     << "\n";
  return os.str();
}

// === phase tables ===

// Each printed row is re-derived numerically at its sample ratio before it is
// trusted; the symbolic forms and the boundaries come from the phase walker.
inline std::string sequential_table_text(Engine& eng, int k) {
  const std::vector<TracePhase> phases = trace_phase_table(eng, k);
  std::ostringstream os;
  os << "sequential auction, " << k << " items, budgets B1 < B2\n";
  for (const TracePhase& ph : phases) {
    const Rat sample = mediant(ph.lo, ph.hi);
    const OutcomeTrace tr = canonical_trace(eng, sample, Rat(1), k);
    if (ph.tie) {
      internal_check(tr.kind == TraceKind::Tie, "table: tie row is deterministic at its sample");
      internal_check(static_cast<int>(tr.rounds.size()) + 1 == ph.tie_round,
                     "table: tie row flips at the wrong round");
      internal_check(tr.tie_case.pstar ==
                         eval_lin(ph.rounds[ph.tie_round - 1].price, sample, Rat(1)),
                     "table: tie row price drifts from the classification");
    } else {
      internal_check(tr.kind == TraceKind::Deterministic && tr.rounds.size() == ph.rounds.size(),
                     "table: row shape disagrees with its sample");
    }
    for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
      internal_check(tr.rounds[i].winner == ph.rounds[i].winner &&
                         tr.rounds[i].price == eval_lin(ph.rounds[i].price, sample, Rat(1)),
                     "table: row content disagrees with its sample");
    }
    os << "phase (" << render_rat(ph.lo) << ", " << render_rat(ph.hi) << ")  sample r = "
       << render_rat(sample);
    if (ph.tie) os << "  [coin flip at round " << ph.tie_round << "; one realization shown]";
    os << "\n";
    for (std::size_t i = 0; i < ph.rounds.size(); ++i) {
      const PhaseRound& rd = ph.rounds[i];
      os << "  round " << (i + 1) << ": " << rd.winner << " @ " << render_lin(rd.price) << "  [= "
         << render_rat(eval_lin(rd.price, sample, Rat(1))) << "]\n";
    }
  }
  return os.str();
}

inline std::string clinching_table_text(int k) {
  const std::vector<ClinchPhase> phases = clinching_phase_table(k);
  std::ostringstream os;
  os << "clinching auction, " << k << " items, budgets B1 < B2\n";
  for (const ClinchPhase& ph : phases) {
    const Rat sample = mediant(ph.lo, ph.hi);
    const ClinchingTrace tr = clinching_trace(sample, Rat(1), k);
    internal_check(tr.rounds.size() == ph.rounds.size(),
                   "table: clinching row shape disagrees with its sample");
    os << "phase (" << render_rat(ph.lo) << ", " << render_rat(ph.hi) << ")  sample r = "
       << render_rat(sample) << "\n";
    for (std::size_t i = 0; i < ph.rounds.size(); ++i) {
      const SymbolicClinchRound& rd = ph.rounds[i];
      const Rat at_sample = eval_lin(rd.price, sample, Rat(1));
      internal_check(tr.rounds[i].winner == rd.winner && tr.rounds[i].price == at_sample,
                     "table: clinching row content disagrees with its sample");
      os << "  round " << (i + 1) << ": " << rd.winner << " @ " << render_lin(rd.price) << "  [= "
         << render_rat(at_sample) << "]\n";
    }
  }
  return os.str();
}

// === ratio sweep ===

// p runs over j/(samples+1); budgets are (p, 1-p). The approx column is the
// library's only decimal output and is informational.
inline std::string sweep_csv(int k, int samples) {
  const std::vector<CurvePoint> curve = fraction_curve(k, samples);
  std::ostringstream os;
  os << "p,item_fraction_clinching,item_fraction_sequential,approx_formula\n";
  os << std::fixed << std::setprecision(6);
  for (const CurvePoint& pt : curve) {
    const ItemSplit sp = item_split(pt.p, 1 - pt.p, k);
    os << render_rat(pt.p) << "," << render_rat(pt.item_fraction) << ","
       << render_rat(Rat(sp.k1, k)) << "," << pt.approx << "\n";
  }
  return os.str();
}

}  // namespace seqauction
