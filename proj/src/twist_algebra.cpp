#include "mtdup/twist_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace mtdup {

using gf2::BitMatrix;
using gf2::BitVector;

double DyadicProb::value() const { return std::ldexp(1.0, -static_cast<int>(exponent)); }

std::string DyadicProb::decimal_string() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value());
  return buf;
}

// ------------------------------------------------------------- OperatorPoly

OperatorPoly OperatorPoly::monomial(int exponent, const BitMatrix& coeff) {
  if (!coeff.square()) throw std::invalid_argument("operator coefficient must be square");
  OperatorPoly p(static_cast<unsigned>(coeff.rows()));
  p.add_term(exponent, coeff);
  return p;
}

BitMatrix OperatorPoly::coefficient(int exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? BitMatrix(width_, width_) : it->second;
}

void OperatorPoly::add_term(int exponent, const BitMatrix& coeff) {
  if (coeff.rows() != width_ || coeff.cols() != width_) {
    throw std::invalid_argument("operator coefficient has wrong width");
  }
  auto [it, inserted] = terms_.try_emplace(exponent, coeff);
  if (!inserted) it->second += coeff;
  if (it->second.is_zero()) terms_.erase(it);
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& other) {
  if (other.width_ != width_) throw std::invalid_argument("operator width mismatch");
  for (const auto& [e, m] : other.terms_) add_term(e, m);
  return *this;
}

OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs) {
  if (lhs.width_ != rhs.width_) throw std::invalid_argument("operator width mismatch");
  // D commutes with matrices: (D^a M)(D^b N) = D^{a+b} M N.
  std::map<int, BitMatrix> acc;
  for (const auto& [ea, ma] : lhs.terms_) {
    for (const auto& [eb, mb] : rhs.terms_) {
      BitMatrix prod = ma * mb;
      auto [it, inserted] = acc.try_emplace(ea + eb, std::move(prod));
      if (!inserted) it->second += ma * mb;
    }
  }
  OperatorPoly out(lhs.width_);
  for (auto& [e, m] : acc) {
    if (!m.is_zero()) out.terms_.emplace(e, std::move(m));
  }
  return out;
}

OperatorPoly op_power(const OperatorPoly& base, std::uint64_t e) {
  OperatorPoly result = OperatorPoly::delay(base.width(), 0);
  OperatorPoly sq = base;
  while (e != 0) {
    if (e & 1u) result = result * sq;
    e >>= 1;
    if (e != 0) sq = sq * sq;
  }
  return result;
}

// --------------------------------------------------------- ConstraintSystem

BitVector ConstraintSystem::window_vector(
    std::span<const std::uint64_t> newest_first) const {
  if (newest_first.size() != window) {
    throw std::invalid_argument("window_vector: wrong number of words");
  }
  BitVector v(window * width);
  for (std::size_t j = 0; j < window; ++j) {
    for (unsigned bit = 0; bit < width; ++bit) {
      if ((newest_first[j] >> (width - 1 - bit)) & 1u) v.set(j * width + bit, true);
    }
  }
  return v;
}

std::vector<std::uint64_t> ConstraintSystem::window_words(const BitVector& v) const {
  if (v.size() != window * width) {
    throw std::invalid_argument("window_words: wrong vector length");
  }
  std::vector<std::uint64_t> words(window, 0);
  for (std::size_t j = 0; j < window; ++j) {
    words[j] = v.slice(j * width, width).to_word();
  }
  return words;
}

bool ConstraintSystem::satisfied_by(std::span<const std::uint64_t> newest_first) const {
  if (window == 0) return true;
  return (window_vector(newest_first) * matrix).is_zero();
}

// ------------------------------------------------------------- TwistAlgebra

TwistAlgebra::TwistAlgebra(GeneratorParams params) : params_(std::move(params)) {
  params_.validate();
  const unsigned w = params_.w;
  a_ = BitMatrix(w, w);
  for (unsigned row = 0; row + 1 < w; ++row) a_.set(row, row + 1, true);
  a_.set_row(w - 1, BitVector::from_word(params_.a, w));

  const unsigned top = w - params_.r;  // rows taken from x_k
  b_ = a_;
  c_ = a_;
  for (unsigned row = 0; row < w; ++row) {
    if (row < top) {
      b_.set_row(row, BitVector(w));
    } else {
      c_.set_row(row, BitVector(w));
    }
  }
  f_ = b_.block(1, 1, w - 1, w - 1);
}

BitMatrix TwistAlgebra::q_matrix(unsigned k) const {
  if (k == 0) throw std::invalid_argument("q_matrix: k must be positive");
  // Powers of B are shared between the left and right factors.
  std::vector<BitMatrix> pow{BitMatrix::identity(width())};
  for (unsigned i = 1; i < k; ++i) pow.push_back(pow.back() * b_);
  BitMatrix q(width(), width());
  for (unsigned i = 0; i < k; ++i) q += pow[i] * c_ * pow[k - 1 - i];
  return q;
}

OperatorPoly TwistAlgebra::twist_operator() const {
  return OperatorPoly::monomial(0, b_) + OperatorPoly::monomial(-1, c_);
}

OperatorPoly TwistAlgebra::recursion_operator() const {
  const unsigned w = width();
  return OperatorPoly::delay(w, static_cast<int>(params_.n) - 1) +
         OperatorPoly::delay(w, static_cast<int>(params_.m) - 1) + twist_operator();
}

void TwistAlgebra::check_window(std::size_t window) const {
  if (window > params_.n - 1) {
    throw std::out_of_range("constraint window of " + std::to_string(window) +
                            " words exceeds n-1 = " + std::to_string(params_.n - 1));
  }
}

ConstraintSystem TwistAlgebra::from_operator(unsigned k, const OperatorPoly& op) const {
  const unsigned w = width();
  ConstraintSystem cs;
  cs.width = w;
  cs.events = {k};
  cs.forms = {"generic"};
  if (op.is_zero()) {
    // Never happens for invertible A; kept total.
    cs.window = 1;
    cs.matrix = BitMatrix(w, w);
    return cs;
  }
  if (op.max_exponent() > 0) {
    throw std::logic_error("event operator has positive delays");
  }
  cs.window = static_cast<std::size_t>(1 - op.min_exponent());
  check_window(cs.window);
  BitMatrix stacked;
  for (std::size_t j = 0; j < cs.window; ++j) {
    stacked = stacked.vstack(op.coefficient(-static_cast<int>(j)));
  }
  cs.matrix = std::move(stacked);
  return cs;
}

ConstraintSystem TwistAlgebra::event_constraint_generic(unsigned k) const {
  if (k > kMaxEventIndex) {
    throw std::out_of_range("event index " + std::to_string(k) + " beyond supported range");
  }
  return from_operator(k, op_power(twist_operator(), std::uint64_t{1} << k));
}

ConstraintSystem TwistAlgebra::event_constraint(unsigned k) const {
  if (k > kMaxEventIndex) {
    throw std::out_of_range("event index " + std::to_string(k) + " beyond supported range");
  }
  const std::uint64_t e = std::uint64_t{1} << k;
  if (!q_in_lemma_range(e)) return event_constraint_generic(k);
  // x_i B^{2^k} + x_{i-1} Q_{2^k} = 0
  ConstraintSystem cs;
  cs.width = width();
  cs.window = 2;
  check_window(cs.window);
  cs.matrix = gf2::mat_pow(b_, e).vstack(q_matrix(static_cast<unsigned>(e)));
  cs.events = {k};
  cs.forms = {"closed"};
  return cs;
}

ConstraintSystem TwistAlgebra::joint_constraint(const EventSet& events) const {
  ConstraintSystem joint;
  joint.width = width();
  if (events.empty()) return joint;
  std::vector<ConstraintSystem> parts;
  for (unsigned k : events) {
    parts.push_back(event_constraint(k));
    joint.window = std::max(joint.window, parts.back().window);
  }
  const std::size_t rows = joint.window * width();
  for (auto& part : parts) {
    BitMatrix block = part.matrix;
    if (block.rows() < rows) {
      block = block.vstack(BitMatrix(rows - block.rows(), block.cols()));
    }
    joint.matrix = joint.matrix.hstack(block);
    joint.events.push_back(part.events.front());
    joint.forms.push_back(part.forms.front());
  }
  return joint;
}

DyadicProb TwistAlgebra::event_probability(const EventSet& events) const {
  if (events.empty()) return {};
  return {static_cast<unsigned>(joint_constraint(events).rank())};
}

DyadicProb TwistAlgebra::conditional_probability(const EventSet& given,
                                                 const EventSet& check) const {
  EventSet all = given;
  all.insert(check.begin(), check.end());
  return {event_probability(all).exponent - event_probability(given).exponent};
}

TheoremReport TwistAlgebra::verify_theorem(unsigned s, unsigned t) const {
  if (s > t) throw std::invalid_argument("verify_theorem: need s <= t");
  TheoremReport rep;
  rep.s = s;
  rep.t = t;
  EventSet events;
  for (unsigned k = s; k <= t; ++k) events.insert(k);
  const ConstraintSystem cs = joint_constraint(events);
  rep.rank = cs.rank();
  rep.window = cs.window;
  rep.formula_rank = width() + (std::size_t{1} << t) - (std::size_t{1} << s);
  rep.within_hypothesis = q_in_lemma_range(std::uint64_t{1} << t);
  rep.matches_formula = rep.rank == rep.formula_rank;
  return rep;
}

IndependenceContrast TwistAlgebra::contrast(const EventSet& events) const {
  IndependenceContrast out;
  out.events = events;
  out.joint_rank = joint_constraint(events).rank();
  for (unsigned k : events) out.singles_rank_sum += event_constraint(k).rank();
  return out;
}

bool LemmaReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) {
    return !c.applicable || c.passed;
  });
}

LemmaReport TwistAlgebra::verify_lemmas() const {
  const unsigned w = width();
  LemmaReport rep;
  rep.generator = params_.name;
  auto add = [&](std::string name, bool needs_single, bool ok, std::string detail) {
    IdentityCheck c;
    c.name = std::move(name);
    c.needs_single_entry_c = needs_single;
    c.applicable = !needs_single || single_entry_c();
    c.passed = ok;
    c.detail = std::move(detail);
    rep.checks.push_back(std::move(c));
  };

  std::vector<BitMatrix> bpow{BitMatrix::identity(w)};
  for (unsigned i = 1; i <= 2 * w + 2; ++i) bpow.push_back(bpow.back() * b_);

  add("C^2 = 0", true, (c_ * c_).is_zero(), "");

  {
    bool ok = true;
    std::string detail;
    for (unsigned s = 0; s + 2 <= w; ++s) {
      if (!(c_ * bpow[s] * c_).is_zero()) {
        ok = false;
        if (detail.empty()) detail = "first failure at s=" + std::to_string(s);
      }
    }
    add("C B^s C = 0 for 0 <= s <= w-2", true, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (unsigned s = 1; s < w; ++s) {
      const BitMatrix& m = bpow[s];
      bool good = m.row(0).is_zero() && m.get(w - s, 0);
      for (unsigned row = 0; row < w - s; ++row) good = good && !m.get(row, 0);
      if (!good && ok) detail = "first failure at s=" + std::to_string(s);
      ok = ok && good;
    }
    add("B^s first column: 1 at row w-s+1, zeros above, 1 <= s < w", true, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (unsigned t = 0; t + 2 <= w; ++t) {
      const BitMatrix m = c_ * bpow[t];
      const bool good = m.popcount() == 1 && m.get(0, t + 1);
      if (!good && ok) detail = "first failure at t=" + std::to_string(t);
      ok = ok && good;
    }
    add("C B^t has its single 1 at (1, t+2), 0 <= t <= w-2", true, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (unsigned s = 1; s + 2 <= w && ok; ++s) {
      const BitMatrix left = bpow[s] * c_;
      for (unsigned t = 0; t + 2 <= w; ++t) {
        const BitMatrix m = left * bpow[t];
        bool good = m.get(w - s, t + 1);
        for (unsigned row = 0; row < w && good; ++row) {
          for (unsigned col = 0; col < w && good; ++col) {
            if (col != t + 1 && m.get(row, col)) good = false;
          }
          if (row < w - s && m.get(row, t + 1)) good = false;
        }
        if (!good) {
          ok = false;
          detail = "first failure at s=" + std::to_string(s) + ", t=" + std::to_string(t);
          break;
        }
      }
    }
    add("B^s C B^t: only column t+2, w-s zeros then 1", true, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (unsigned s = 1; s <= 64; ++s) {
      const std::size_t rk = gf2::mat_rank(gf2::mat_pow(b_, s).vstack(q_matrix(s)));
      if (rk != w && ok) {
        ok = false;
        detail = "s=" + std::to_string(s) + " gives rank " + std::to_string(rk);
      }
    }
    add("rank [B^s over Q_s] = w for s = 1..64", true, ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    for (unsigned s = 1; (1u << s) + 2 <= w; ++s) {
      const unsigned half = 1u << (s - 1);
      const BitMatrix qh = q_matrix(half);
      const bool good = q_matrix(2 * half) == qh * bpow[half] + bpow[half] * qh;
      if (!good && ok) detail = "first failure at s=" + std::to_string(s);
      ok = ok && good;
    }
    add("Q_{2^s} = Q_{2^{s-1}} B^{2^{s-1}} + B^{2^{s-1}} Q_{2^{s-1}}, 2^s <= w-2", true,
        ok, detail);
  }

  {
    bool ok = true;
    std::string detail;
    const OperatorPoly base = twist_operator();
    OperatorPoly power = base;
    for (unsigned k = 1; k + 2 <= w; ++k) {
      if (k > 1) power = power * base;
      const OperatorPoly closed =
          OperatorPoly::monomial(0, bpow[k]) + OperatorPoly::monomial(-1, q_matrix(k));
      if (!(power == closed) && ok) {
        ok = false;
        detail = "first failure at k=" + std::to_string(k);
      }
    }
    add("(B + D^-1 C)^k = B^k + D^-1 Q_k for 1 <= k <= w-2", true, ok, detail);
  }

  add("B + C = A and A is invertible", false,
      b_ + c_ == a_ && gf2::mat_rank(a_) == w, "");

  {
    bool ok = true;
    std::string detail;
    const OperatorPoly base = recursion_operator();
    const OperatorPoly twist = twist_operator();
    for (unsigned s = 0; s <= 4; ++s) {
      const std::uint64_t e = std::uint64_t{1} << s;
      const OperatorPoly expect =
          OperatorPoly::delay(w, static_cast<int>(e * (params_.n - 1))) +
          OperatorPoly::delay(w, static_cast<int>(e * (params_.m - 1))) +
          op_power(twist, e);
      if (!(op_power(base, e) == expect) && ok) {
        ok = false;
        detail = "first failure at s=" + std::to_string(s);
      }
    }
    add("squaring: (D^{n-1}+D^{m-1}+B+D^-1 C)^{2^s} splits, s <= 4", false, ok, detail);
  }

  {
    // Stream check of the kernel characterization.
    constexpr unsigned kSpan = 10000;
    MersenneTwister mt = MersenneTwister::seeded(params_, 5489);
    std::vector<std::uint64_t> x(mt.state().words);
    while (x.size() < kSpan + params_.n) x.push_back(mt.next_untempered());
    bool ok = true;
    std::string detail;
    for (unsigned k = 0; k < kSpan; ++k) {
      const BitVector lhs = BitVector::from_word(x[k + params_.n], w);
      const BitVector rhs = BitVector::from_word(x[k + params_.m], w) ^
                            (BitVector::from_word(x[k + 1], w) * b_) ^
                            (BitVector::from_word(x[k], w) * c_);
      if (!(lhs == rhs)) {
        ok = false;
        detail = "first failure at k=" + std::to_string(k);
        break;
      }
    }
    add("kernel: x_{k+n} = x_{k+m} + x_{k+1} B + x_k C over 10000 k", false, ok, detail);
  }
  return rep;
}

}  // namespace mtdup
