#include "transkit/cli.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <iterator>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <sstream>

#include "transkit/calculus.hpp"
#include "transkit/expr.hpp"
#include "transkit/limits.hpp"
#include "transkit/powerseries.hpp"
#include "transkit/taylor.hpp"

namespace transkit::cli {

namespace {

using nlohmann::json;

struct Options {
  std::size_t terms = 8;
  std::size_t order = 6;
  std::string backend = "exact";
  std::optional<int> depth_bound;
  std::optional<int> height_bound;
  bool json_out = false;
  std::string op = "identity";
  std::string delta;
  std::string law = "log";
  std::string cut = "all";
  std::optional<std::size_t> finite;
  std::vector<std::string> exprs;
};

struct Context {
  const Options& opt;
  std::istream& in;
  std::optional<std::string> stdin_text;

  std::string source(const std::string& s) {
    if (s != "-") return s;
    if (!stdin_text) {
      std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      while (!all.empty() && std::isspace(static_cast<unsigned char>(all.back()))) all.pop_back();
      stdin_text = all;
    }
    return *stdin_text;
  }

  Series series(const std::string& s) {
    auto e = parse(source(s));
    return elaborate(*e, opt.backend == "float" ? Backend::Float : Backend::Exact);
  }

  OperatorHandle op() {
    if (opt.op == "identity") return OperatorHandle::identity();
    if (opt.op.rfind("compose:", 0) == 0) return OperatorHandle::right_compose(series(opt.op.substr(8)));
    throw InvalidInput("--op must be identity or compose:EXPR");
  }
};

json terms_json(const Series& s, std::size_t n) {
  json arr = json::array();
  for (const auto& t : s.prefix(n)) arr.push_back({{"coeff", t.coeff.str()}, {"monomial", t.mono.str()}});
  return arr;
}

json witnesses_json(const std::vector<Monomial>& w) {
  json arr = json::array();
  for (const auto& m : w) arr.push_back(m.str());
  return arr;
}

void emit_json(std::ostream& out, const std::string& command, const std::string& verdict,
               json terms, json witnesses) {
  json j = {{"command", command}, {"verdict", verdict}, {"terms", std::move(terms)},
            {"witnesses", std::move(witnesses)}};
  out << j.dump(2) << "\n";
}

std::string join(const std::vector<Monomial>& v) {
  std::string s;
  for (const auto& m : v) s += (s.empty() ? "" : ", ") + m.str();
  return s.empty() ? "none" : s;
}

std::string bi_str(const BiMonomial& b) {
  return "(" + b.mono.str() + ", " + std::to_string(b.degree) + ")";
}

int cmd_series(const std::string& name, Context& cx, std::ostream& out) {
  const auto& o = cx.opt;
  std::size_t need = name == "compose" ? 2 : 1;
  if (o.exprs.size() != need)
    throw InvalidInput(name + " expects " + std::to_string(need) + " expression(s)");
  Series s = cx.series(o.exprs[0]);
  if (name == "derive") s = derive(s);
  if (name == "compose") s = compose(s, cx.series(o.exprs[1]));
  if (o.json_out) {
    emit_json(out, name, "ok", terms_json(s, o.terms), json::array());
  } else {
    out << render(s, o.terms) << "\n";
  }
  return kOk;
}

int report_identity(const std::string& name, const IdentityReport& r, const Options& o,
                    std::ostream& out) {
  std::string verdict = to_string(r.status);
  if (o.json_out) {
    json terms = r.status == CheckStatus::Skipped ? json::array() : terms_json(r.rhs, o.terms);
    emit_json(out, name, verdict, terms, witnesses_json(r.locus.witnesses));
  } else {
    out << "locus: " << to_string(r.locus.verdict) << "\n";
    if (r.status == CheckStatus::Skipped) {
      if (!r.locus.witnesses.empty()) out << "witness: " << r.locus.witnesses.front().str() << "\n";
      out << "SKIPPED: " << r.reason << "\n";
    } else {
      out << "lhs: " << render(r.lhs, o.terms) << "\n";
      out << "rhs: " << render(r.rhs, o.terms) << "\n";
      out << verdict;
      if (r.status == CheckStatus::Unequal) out << ": " << r.reason;
      out << "\n";
    }
  }
  switch (r.status) {
    case CheckStatus::Equal:
      return kOk;
    case CheckStatus::Unequal:
      return kUnequal;
    case CheckStatus::Skipped:
      return kSkipped;
  }
  return kOk;
}

int cmd_taylor(Context& cx, std::ostream& out) {
  const auto& o = cx.opt;
  if (o.exprs.size() != 3) throw InvalidInput("taylor expects F G D");
  Series f = cx.series(o.exprs[0]);
  Series g = cx.series(o.exprs[1]);
  Series d = cx.series(o.exprs[2]);
  return report_identity("taylor", taylor_identity_check(f, g, d, o.terms), o, out);
}

int cmd_identity(Context& cx, std::ostream& out) {
  const auto& o = cx.opt;
  if (o.exprs.size() != 1) throw InvalidInput("identity-check expects one expression");
  if (o.delta.empty()) throw InvalidInput("identity-check needs --delta");
  Series f = cx.series(o.exprs[0]);
  LocusSpec spec{cx.op(), cx.series(o.delta)};
  IdentityReport r;
  if (o.law == "log") {
    r = analytic_commutation_check(f, spec, o.terms);
  } else if (o.law == "chain") {
    r = chain_rule_transport_check(f, spec, o.terms);
  } else {
    throw InvalidInput("--law must be log or chain");
  }
  return report_identity("identity-check", r, o, out);
}

int cmd_locus(Context& cx, std::ostream& out) {
  const auto& o = cx.opt;
  if (o.exprs.size() != 1) throw InvalidInput("locus expects one expression");
  if (o.delta.empty()) throw InvalidInput("locus needs --delta");
  Series f = cx.series(o.exprs[0]);
  LocusSpec spec{cx.op(), cx.series(o.delta)};
  ConvReport r = locus_contains(spec, f);
  if (o.json_out) {
    emit_json(out, "locus", to_string(r.verdict), json::array(), witnesses_json(r.witnesses));
  } else {
    out << "verdict: " << to_string(r.verdict) << "\n";
    out << "witnesses: " << join(r.witnesses) << "\n";
    out << "reason: " << r.reason << "\n";
  }
  return kOk;
}

CutSpec parse_cut(Context& cx, const std::string& s) {
  if (s == "all") return CutSpec::all();
  if (s == "empty") return CutSpec::empty();
  auto boundary = [&](std::size_t n) {
    Series b = cx.series(s.substr(n));
    auto t = b.term(0);
    if (!t || !b.known_finite() || b.prefix(2).size() != 1)
      throw InvalidInput("cut boundary must be a single monomial");
    return t->mono;
  };
  if (s.rfind("above:", 0) == 0) return CutSpec::above(boundary(6));
  if (s.rfind("aboveeq:", 0) == 0) return CutSpec::above_eq(boundary(8));
  throw InvalidInput("--cut must be all, empty, above:M or aboveeq:M");
}

int cmd_cutcheck(Context& cx, std::ostream& out) {
  const auto& o = cx.opt;
  if (o.exprs.size() != 1) throw InvalidInput("cutcheck expects one expression");
  Series r = cx.series(o.exprs[0]);
  CutSpec cut = parse_cut(cx, o.cut);
  PowerSeries p;
  if (o.finite) {
    std::vector<Series> cs;
    Series pw(Constant(1));
    for (std::size_t k = 0; k <= *o.finite; ++k) {
      cs.push_back(pw);
      pw = pw * r;
    }
    p = PowerSeries::polynomial(std::move(cs));
  } else if (r.is_zero()) {
    p = PowerSeries::polynomial({Series(Constant(1))});
  } else {
    auto dd = dominant_decompose(r);
    BiCertificate cert;
    cert.bases.push_back({Monomial(), 0});
    cert.ratios.push_back({dd.d, 1});
    for (const auto& e : infinitesimal_generators(dd.eps.certificate())) cert.ratios.push_back({e, 0});
    auto powers = std::make_shared<std::vector<Series>>(1, Series(Constant(1)));
    auto mu = std::make_shared<std::mutex>();
    p = PowerSeries::from_law(
        [r, powers, mu](std::size_t k) {
          std::lock_guard<std::mutex> lk(*mu);
          while (powers->size() <= k) powers->push_back(powers->back() * r);
          return (*powers)[k];
        },
        std::move(cert));
  }
  CutMembership m = cut_member(p, cut);
  std::string verdict = m.verdict == CutMembership::Verdict::Member      ? "member"
                        : m.verdict == CutMembership::Verdict::NonMember ? "non-member"
                                                                         : "inconclusive";
  if (o.json_out) {
    json w = json::array();
    for (const auto& [a, b] : m.witness_pairs) w.push_back(bi_str(a) + " vs " + bi_str(b));
    emit_json(out, "cutcheck", verdict, json::array(), w);
  } else {
    out << "cut: " << cut.str() << "\n";
    out << "series: " << p.str(o.order, o.terms) << "\n";
    out << "verdict: " << verdict << "\n";
    if (!m.failing_ratios.empty()) {
      out << "failing ratios:";
      for (const auto& z : m.failing_ratios) out << " " << bi_str(z);
      out << "\n";
    }
    for (const auto& [a, b] : m.witness_pairs) out << "witness pair: " << bi_str(a) << " vs " << bi_str(b) << "\n";
    out << "reason: " << m.reason << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"Grid-based transseries calculator", "transkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--terms", o.terms, "Number of terms to print")->check(CLI::PositiveNumber);
  app.add_option("--order", o.order, "Power-series order to print")->check(CLI::PositiveNumber);
  app.add_option("--backend", o.backend, "Constant backend")->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--depth-bound", o.depth_bound, "Maximal logarithmic depth of monomials")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--height-bound", o.height_bound, "Maximal exponential height of monomials")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--json", o.json_out, "Emit JSON");

  struct Cmd {
    const char* name;
    const char* help;
    const char* positional;
  };
  const std::vector<Cmd> cmds = {
      {"eval", "Expand an expression", "EXPR"},
      {"derive", "Differentiate an expression", "EXPR"},
      {"compose", "Compose F with G", "F G"},
      {"taylor", "Compare F(G + D) with the Taylor deformation", "F G D"},
      {"locus", "Decide the convergence locus", "F"},
      {"cutcheck", "Cut membership of sum R^k X^k", "R"},
      {"identity-check", "Check log commutation or chain-rule transport", "F"},
  };
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("exprs", o.exprs, c.positional)->required();
    std::string n = c.name;
    if (n == "locus" || n == "identity-check") {
      sub->add_option("--op", o.op, "identity or compose:EXPR");
      sub->add_option("--delta", o.delta, "Deformation step")->required();
    }
    if (n == "identity-check") sub->add_option("--law", o.law, "log or chain");
    if (n == "cutcheck") {
      sub->add_option("--cut", o.cut, "all, empty, above:M or aboveeq:M");
      sub->add_option("--finite", o.finite, "Truncate to degree K");
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  Limits lim = limits();
  if (o.depth_bound) lim.log_depth_bound = *o.depth_bound;
  if (o.height_bound) lim.height_bound = *o.height_bound;
  LimitsScope scope(lim);
  Context cx{o, in, std::nullopt};
  std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "taylor") return cmd_taylor(cx, out);
    if (name == "locus") return cmd_locus(cx, out);
    if (name == "cutcheck") return cmd_cutcheck(cx, out);
    if (name == "identity-check") return cmd_identity(cx, out);
    return cmd_series(name, cx, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace transkit::cli
