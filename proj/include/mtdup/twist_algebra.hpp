#pragma once

// Operator algebra of the twisted recursion.
//
// A word sequence X = (x_i) is acted on from the right by the delay D
// ((X D)_i = x_{i+1}) and diagonally by w x w bit matrices.  D commutes with
// every matrix, so operators are Laurent polynomials in D with matrix
// coefficients.  MT sequences are exactly the kernel of
//
//     D^{n-1} + D^{m-1} + B + D^{-1} C
//
// and the lagged-equality event
//
//     E_k :  x_{i + 2^k (m-1)} == x_{i + 2^k (n-1)}
//
// is equivalent to  ev_i(X (B + D^{-1} C)^{2^k}) == 0, a linear condition
// on a short window (x_i, x_{i-1}, ...).  Under a uniform window the
// probability of a conjunction of events is 2^-rank of the stacked
// condition matrix.

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mtdup/gf2.hpp"
#include "mtdup/mt_engine.hpp"

namespace mtdup {

using EventSet = std::set<unsigned>;

/// Probability 2^-exponent, kept exact.
struct DyadicProb {
  unsigned exponent = 0;

  std::string power_string() const {
    return exponent == 0 ? "1" : "2^-" + std::to_string(exponent);
  }
  double value() const;
  std::string decimal_string() const;

  friend bool operator==(const DyadicProb&, const DyadicProb&) = default;
};

class OperatorPoly {
 public:
  explicit OperatorPoly(unsigned width) : width_(width) {}

  static OperatorPoly monomial(int exponent, const gf2::BitMatrix& coeff);
  static OperatorPoly delay(unsigned width, int exponent) {
    return monomial(exponent, gf2::BitMatrix::identity(width));
  }

  unsigned width() const { return width_; }
  const std::map<int, gf2::BitMatrix>& terms() const { return terms_; }
  /// Coefficient of D^exponent (zero matrix if absent).
  gf2::BitMatrix coefficient(int exponent) const;
  bool is_zero() const { return terms_.empty(); }
  int min_exponent() const { return terms_.begin()->first; }
  int max_exponent() const { return terms_.rbegin()->first; }

  OperatorPoly& operator+=(const OperatorPoly& other);
  friend OperatorPoly operator+(OperatorPoly lhs, const OperatorPoly& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs);
  friend bool operator==(const OperatorPoly&, const OperatorPoly&) = default;

 private:
  void add_term(int exponent, const gf2::BitMatrix& coeff);

  unsigned width_;
  std::map<int, gf2::BitMatrix> terms_;
};

OperatorPoly op_power(const OperatorPoly& base, std::uint64_t e);

/// Linear condition on the window (x_i, x_{i-1}, ..., x_{i-window+1}): the
/// events hold iff the concatenated row vector times `matrix` is zero.
struct ConstraintSystem {
  unsigned width = 0;
  std::size_t window = 0;
  gf2::BitMatrix matrix;  ///< window*width rows, events.size()*width cols
  std::vector<unsigned> events;
  std::vector<std::string> forms;  ///< "closed" or "generic", per event

  std::size_t rank() const { return gf2::mat_rank(matrix); }
  /// `newest_first` = (x_i, x_{i-1}, ...), exactly `window` words.
  bool satisfied_by(std::span<const std::uint64_t> newest_first) const;
  gf2::BitVector window_vector(std::span<const std::uint64_t> newest_first) const;
  /// Inverse of window_vector.
  std::vector<std::uint64_t> window_words(const gf2::BitVector& v) const;
};

struct TheoremReport {
  unsigned s = 0;
  unsigned t = 0;
  std::size_t rank = 0;
  std::size_t formula_rank = 0;  ///< w + 2^t - 2^s
  std::size_t window = 0;
  bool within_hypothesis = false;  ///< 2^t <= w - 2 and w - r == 1
  bool matches_formula = false;
  /// Discrepancies outside the hypothesis are flagged, not failures.
  bool passed() const { return !within_hypothesis || matches_formula; }
};

struct IdentityCheck {
  std::string name;
  bool passed = false;
  /// The identity relies on C having a single non-zero entry (w - r == 1).
  bool needs_single_entry_c = false;
  bool applicable = true;
  std::string detail;
};

struct LemmaReport {
  std::string generator;
  std::vector<IdentityCheck> checks;
  /// True when every applicable identity holds.
  bool passed() const;
};

/// Joint probability of an event set against the product of its singles.
struct IndependenceContrast {
  EventSet events;
  std::size_t joint_rank = 0;
  std::size_t singles_rank_sum = 0;
  bool independent() const { return joint_rank == singles_rank_sum; }
};

class TwistAlgebra {
 public:
  explicit TwistAlgebra(GeneratorParams params);

  const GeneratorParams& params() const { return params_; }
  unsigned width() const { return params_.w; }
  bool single_entry_c() const { return params_.w - params_.r == 1; }

  /// Full companion matrix of the feedback word.
  const gf2::BitMatrix& A() const { return a_; }
  /// A with the top w - r rows zeroed.
  const gf2::BitMatrix& B() const { return b_; }
  /// A with the bottom r rows zeroed.
  const gf2::BitMatrix& C() const { return c_; }
  /// Lower-right (w-1)x(w-1) block of B.
  const gf2::BitMatrix& F() const { return f_; }

  /// Q_k = sum_{i=0}^{k-1} B^i C B^{k-i-1}, by definition (any k >= 1).
  gf2::BitMatrix q_matrix(unsigned k) const;
  /// The closed form (B + D^-1 C)^k = B^k + D^-1 Q_k is guaranteed here.
  bool q_in_lemma_range(std::uint64_t k) const {
    return single_entry_c() && k >= 1 && k + 2 <= params_.w;
  }

  OperatorPoly twist_operator() const;      ///< B + D^-1 C
  OperatorPoly recursion_operator() const;  ///< D^{n-1} + D^{m-1} + B + D^-1 C

  /// Largest event index accepted by event_constraint.
  static constexpr unsigned kMaxEventIndex = 12;

  /// Throws std::out_of_range when k > kMaxEventIndex or the window
  /// exceeds n - 1 words.
  ConstraintSystem event_constraint(unsigned k) const;
  /// Same, always via the generic operator power.
  ConstraintSystem event_constraint_generic(unsigned k) const;
  ConstraintSystem joint_constraint(const EventSet& events) const;

  DyadicProb event_probability(const EventSet& events) const;
  DyadicProb conditional_probability(const EventSet& given,
                                     const EventSet& check) const;

  TheoremReport verify_theorem(unsigned s, unsigned t) const;
  LemmaReport verify_lemmas() const;
  IndependenceContrast contrast(const EventSet& events) const;

 private:
  ConstraintSystem from_operator(unsigned k, const OperatorPoly& op) const;
  void check_window(std::size_t window) const;

  GeneratorParams params_;
  gf2::BitMatrix a_, b_, c_, f_;
};

}  // namespace mtdup
