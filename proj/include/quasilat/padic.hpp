#pragma once

#include "quasilat/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace quasilat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// a / p^k in canonical form: k = 0 or p does not divide a, and a = 0 forces
/// k = 0.
class PAdicRational {
 public:
  PAdicRational(BigInt a, unsigned k, unsigned p);

  const BigInt& a() const { return a_; }
  unsigned k() const { return k_; }
  unsigned p() const { return p_; }
  Rational value() const;
  std::string str() const;

  friend bool operator==(const PAdicRational&, const PAdicRational&) = default;

 private:
  BigInt a_;
  unsigned k_;
  unsigned p_;
};

/// |q|_p = p^{k - v_p(a)}, and |0|_p = 0. Exact.
Rational padic_norm(const PAdicRational& q);

bool is_prime(unsigned p);

/// Parses a window half width given as an integer, a decimal ("0.7",
/// "1.25e-1") or a fraction ("7/10"), exactly. Throws ParseError on malformed
/// input and Error for w <= 0.
Rational parse_window(const std::string& text);

std::string rational_string(const Rational& r);

/// Lambda = Z[1/p] cap (Q_p x [-w, w]) enumerated inside the ball p^{-n_max} Z_p.
struct PAdicModelSet {
  unsigned p;
  Rational w;
  unsigned n_max;

  PAdicModelSet(unsigned p, Rational w, unsigned n_max);
  /// floor(w p^n): the largest numerator a with a / p^n in Lambda.
  BigInt numerator_bound(unsigned n) const;
};

/// Default cap on the number of enumerated elements.
inline constexpr std::size_t kMaxPAdicElements = 50'000'000;

/// All q = a / p^k, 0 <= k <= n, canonical, |q| <= w, ordered by (k, a).
/// Throws Error("enumeration bound exceeded") past max_count elements.
std::vector<PAdicRational> enumerate_model_set(unsigned p, const Rational& w, unsigned n,
                                               std::size_t max_count = kMaxPAdicElements);

struct PAdicDensityReport {
  unsigned p = 0;
  Rational w;
  std::vector<BigInt> counts;    // |Lambda cap p^{-n} Z_p|, n = 0 .. n_max
  std::vector<Rational> ratios;  // counts[n] / p^n  (mu(Z_p) = 1)
  /// Limit of the ratios under ratio_n = D + c p^{-n}, fitted through the
  /// last two n. Exact.
  Rational density;
  Rational expected;  // mu_R([-w, w]) = 2w
};

PAdicDensityReport padic_density(const PAdicModelSet& ms);

struct PAdicCoverOptions {
  std::size_t max_iterations = 256;
};

struct PAdicCoverResult {
  std::vector<PAdicRational> defect_set;
  std::size_t k = 0;
  std::size_t targets = 0;  // |Lambda + Lambda| at the truncation
  bool verified = false;
};

/// Greedy cover of Lambda + Lambda (truncated at p^{-n_max} Z_p) by translates
/// f + Lambda with f drawn from Lambda + Lambda; ties go to the smallest |f|,
/// then the smallest f. Throws Error("not approximately closed at this
/// truncation") if max_iterations picks do not suffice.
PAdicCoverResult padic_cover_set(const PAdicModelSet& ms, const PAdicCoverOptions& opts = {});

nlohmann::json to_json(const PAdicDensityReport& r);
nlohmann::json to_json(const PAdicCoverResult& r);

}  // namespace quasilat
