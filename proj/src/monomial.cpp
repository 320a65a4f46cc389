#include "transkit/monomial.hpp"

#include <algorithm>

#include "transkit/errors.hpp"
#include "transkit/limits.hpp"

namespace transkit {

struct Monomial::Rep {
  LogPowers logs;          // sorted by atom, nonzero exponents
  std::vector<Term> ex;    // decreasing, nonzero coefficients, all large
  std::size_t hash = 0;
  int height = 0;
  int depth = 0;
};

namespace {

const Monomial::LogPowers kNoLogs;
const std::vector<Term> kNoExp;

std::size_t hash_q(const mpq_class& q) { return Constant(q).hash(); }

}  // namespace

Monomial Monomial::make(LogPowers logs, std::vector<Term> ex, bool check_bounds) {
  std::sort(logs.begin(), logs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  LogPowers merged;
  for (auto& [k, r] : logs) {
    if (!merged.empty() && merged.back().first == k)
      merged.back().second += r;
    else
      merged.emplace_back(k, r);
  }
  std::erase_if(merged, [](const auto& p) { return p.second == 0; });

  std::sort(ex.begin(), ex.end(),
            [](const Term& a, const Term& b) { return mono_cmp(a.mono, b.mono) > 0; });
  std::vector<Term> exm;
  for (auto& t : ex) {
    if (!exm.empty() && exm.back().mono == t.mono)
      exm.back().coeff += t.coeff;
    else
      exm.push_back(t);
  }
  std::erase_if(exm, [](const Term& t) { return t.coeff.is_zero(); });

  if (merged.empty() && exm.empty()) return Monomial();
  auto rep = std::make_shared<Rep>();
  std::size_t h = 0x9e3779b97f4a7c15ull;
  int depth = 0, height = 0;
  for (auto& [k, r] : merged) {
    h = (h ^ (static_cast<std::size_t>(k) * 0x100000001b3ull)) * 1099511628211ull ^ hash_q(r);
    depth = std::max(depth, k);
  }
  for (auto& t : exm) {
    h = (h * 1099511628211ull) ^ (t.coeff.hash() * 31u + t.mono.hash());
    height = std::max(height, t.mono.height() + 1);
    depth = std::max(depth, t.mono.log_depth());
  }
  if (!exm.empty()) height = std::max(height, 1);
  if (check_bounds) {
    if (height > limits().height_bound)
      throw ResourceError("monomial height " + std::to_string(height) + " exceeds bound " +
                          std::to_string(limits().height_bound));
    if (depth > limits().log_depth_bound)
      throw ResourceError("logarithmic depth " + std::to_string(depth) + " exceeds bound " +
                          std::to_string(limits().log_depth_bound));
  }
  rep->logs = std::move(merged);
  rep->ex = std::move(exm);
  rep->hash = h;
  rep->height = height;
  rep->depth = depth;
  return Monomial(std::move(rep));
}

Monomial Monomial::x() { return atom(0); }

Monomial Monomial::atom(int k, const mpq_class& r) {
  if (k < 0) throw InvalidInput("negative logarithm index");
  return make({{k, r}}, {}, true);
}

Monomial Monomial::exp_of(const std::vector<Term>& arg) {
  LogPowers logs;
  std::vector<Term> ex;
  for (const auto& t : arg) {
    if (t.coeff.is_zero()) continue;
    if (mono_cmp(t.mono, Monomial()) <= 0)
      throw PreconditionError("exponent term " + format_term(t) + " is not purely large");
    const auto& lp = t.mono.log_powers();
    if (t.mono.exp_arg().empty() && lp.size() == 1 && lp[0].first >= 1 && lp[0].second == 1) {
      logs.emplace_back(lp[0].first - 1, t.coeff.rational());
    } else {
      ex.push_back(t);
    }
  }
  return make(std::move(logs), std::move(ex), true);
}

bool Monomial::pure_log() const { return !rep_ || rep_->ex.empty(); }
const Monomial::LogPowers& Monomial::log_powers() const { return rep_ ? rep_->logs : kNoLogs; }
const std::vector<Term>& Monomial::exp_arg() const { return rep_ ? rep_->ex : kNoExp; }
int Monomial::height() const { return rep_ ? rep_->height : 0; }
int Monomial::log_depth() const { return rep_ ? rep_->depth : 0; }
std::size_t Monomial::hash() const { return rep_ ? rep_->hash : 0x51ed27u; }

Monomial Monomial::operator*(const Monomial& o) const {
  if (!rep_) return o;
  if (!o.rep_) return *this;
  LogPowers logs = rep_->logs;
  logs.insert(logs.end(), o.rep_->logs.begin(), o.rep_->logs.end());
  std::vector<Term> ex = rep_->ex;
  ex.insert(ex.end(), o.rep_->ex.begin(), o.rep_->ex.end());
  return make(std::move(logs), std::move(ex), true);
}

Monomial Monomial::pow(const mpq_class& q) const {
  if (!rep_ || q == 1) return *this;
  if (q == 0) return Monomial();
  LogPowers logs = rep_->logs;
  for (auto& p : logs) p.second *= q;
  std::vector<Term> ex = rep_->ex;
  for (auto& t : ex) t.coeff = t.coeff * Constant(q);
  return make(std::move(logs), std::move(ex), false);
}

bool operator==(const Monomial& a, const Monomial& b) {
  if (a.rep_ == b.rep_) return true;
  if (!a.rep_ || !b.rep_) return false;
  if (a.rep_->hash != b.rep_->hash) return false;
  return a.rep_->logs == b.rep_->logs && a.rep_->ex == b.rep_->ex;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
  if (a == b) return 0;
  const auto& la = a.log_powers();
  const auto& lb = b.log_powers();
  // Smallest atom where the exponents differ.
  bool have_log = false;
  int log_atom = 0;
  mpq_class delta;
  {
    std::size_t i = 0, j = 0;
    while (i < la.size() || j < lb.size()) {
      int ka = i < la.size() ? la[i].first : 1 << 30;
      int kb = j < lb.size() ? lb[j].first : 1 << 30;
      if (ka == kb) {
        if (la[i].second != lb[j].second) {
          have_log = true, log_atom = ka, delta = la[i].second - lb[j].second;
          break;
        }
        ++i, ++j;
      } else if (ka < kb) {
        have_log = true, log_atom = ka, delta = la[i].second;
        break;
      } else {
        have_log = true, log_atom = kb, delta = -lb[j].second;
        break;
      }
    }
  }
  const auto& ea = a.exp_arg();
  const auto& eb = b.exp_arg();
  bool have_exp = false;
  Constant ecoef;
  Monomial emono;
  {
    std::size_t i = 0, j = 0;
    while (!have_exp && (i < ea.size() || j < eb.size())) {
      if (i < ea.size() && j < eb.size()) {
        int c = mono_cmp(ea[i].mono, eb[j].mono);
        if (c == 0) {
          Constant d = ea[i].coeff - eb[j].coeff;
          if (!d.is_zero()) have_exp = true, ecoef = d, emono = ea[i].mono;
          ++i, ++j;
        } else if (c > 0) {
          have_exp = true, ecoef = ea[i].coeff, emono = ea[i].mono;
        } else {
          have_exp = true, ecoef = -eb[j].coeff, emono = eb[j].mono;
        }
      } else if (i < ea.size()) {
        have_exp = true, ecoef = ea[i].coeff, emono = ea[i].mono;
      } else {
        have_exp = true, ecoef = -eb[j].coeff, emono = eb[j].mono;
      }
    }
  }
  if (!have_log && !have_exp) return 0;
  if (!have_exp) return sgn(delta);
  if (!have_log) return ecoef.sign();
  // The logarithm of a/b has leading part either delta*log_{k+1} or ecoef*emono.
  Monomial lk = Monomial::make({{log_atom + 1, mpq_class(1)}}, {}, false);
  int c = mono_cmp(lk, emono);
  if (c > 0) return sgn(delta);
  if (c < 0) return ecoef.sign();
  return (Constant(delta) + ecoef).sign();
}

HeightDepth height_depth(const Monomial& m) { return {m.height(), m.log_depth()}; }

std::vector<Term> pre_log_terms(const Monomial& m) {
  std::vector<Term> out;
  for (const auto& [k, r] : m.log_powers()) out.push_back({Constant(r), Monomial::atom(k + 1)});
  for (const auto& t : m.exp_arg()) out.push_back(t);
  std::sort(out.begin(), out.end(),
            [](const Term& a, const Term& b) { return mono_cmp(a.mono, b.mono) > 0; });
  return out;
}

std::string atom_name(int k) {
  std::string s = "x";
  for (int i = 0; i < k; ++i) s = "log(" + s + ")";
  return s;
}

std::string exponent_suffix(const mpq_class& r) {
  if (r == 1) return "";
  if (r.get_den() == 1) return "^" + r.get_num().get_str();
  return "^(" + rational_str(r) + ")";
}

std::string Monomial::str() const {
  if (!rep_) return "1";
  std::string s;
  for (const auto& [k, r] : rep_->logs) {
    if (!s.empty()) s += "*";
    s += atom_name(k) + exponent_suffix(r);
  }
  if (!rep_->ex.empty()) {
    if (!s.empty()) s += "*";
    s += "exp(" + format_terms(rep_->ex) + ")";
  }
  return s;
}

std::string format_term(const Term& t) {
  if (t.mono.is_one()) return t.coeff.str();
  if (t.coeff.exact() && t.coeff.is_one()) return t.mono.str();
  if (t.coeff.exact() && (-t.coeff).is_one()) return "-" + t.mono.str();
  return t.coeff.str() + "*" + t.mono.str();
}

std::string format_terms(const std::vector<Term>& ts) {
  if (ts.empty()) return "0";
  std::string s = format_term(ts[0]);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i].coeff.sign() < 0)
      s += " - " + format_term({-ts[i].coeff, ts[i].mono});
    else
      s += " + " + format_term(ts[i]);
  }
  return s;
}

}  // namespace transkit
