#include "quasilat/padic.hpp"

#include <algorithm>
#include <regex>

namespace quasilat {
namespace {

BigInt ipow(unsigned p, unsigned n) { return boost::multiprecision::pow(BigInt(p), n); }

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;  // truncates toward zero
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

BigInt floor_of(const Rational& r) {
  return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

}  // namespace

PAdicRational::PAdicRational(BigInt a, unsigned k, unsigned p) : a_(std::move(a)), k_(k), p_(p) {
  if (!is_prime(p_)) throw Error("p-adic: p = " + std::to_string(p_) + " is not prime");
  if (a_ == 0) {
    k_ = 0;
    return;
  }
  while (k_ > 0 && a_ % p_ == 0) {
    a_ /= p_;
    --k_;
  }
}

Rational PAdicRational::value() const { return Rational(a_, ipow(p_, k_)); }

std::string PAdicRational::str() const {
  if (k_ == 0) return a_.str();
  return a_.str() + "/" + std::to_string(p_) + "^" + std::to_string(k_);
}

Rational padic_norm(const PAdicRational& q) {
  if (q.a() == 0) return Rational(0);
  BigInt a = q.a();
  unsigned v = 0;
  while (a % q.p() == 0) {
    a /= q.p();
    ++v;
  }
  // |a / p^k|_p = p^{k - v}
  if (q.k() >= v) return Rational(ipow(q.p(), q.k() - v));
  return Rational(BigInt(1), ipow(q.p(), v - q.k()));
}

bool is_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

Rational parse_window(const std::string& text) {
  static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
  static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*)");
  std::smatch m;
  Rational w;
  if (std::regex_match(text, m, fraction)) {
    const BigInt den(m[2].str());
    if (den == 0) throw ParseError("window: zero denominator in '" + text + "'");
    w = Rational(BigInt(m[1].str()), den);
  } else if (std::regex_match(text, m, decimal) && (m[2].length() + m[3].length()) > 0) {
    const std::string digits = m[2].str() + m[3].str();
    const auto frac_len = static_cast<long>(m[3].length());
    const long exponent = (m[4].matched ? std::stol(m[4].str()) : 0L) - frac_len;
    if (std::abs(exponent) > 4000) throw ParseError("window: exponent out of range in '" + text + "'");
    w = Rational(BigInt(digits));
    const BigInt ten = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(exponent)));
    if (exponent >= 0) w *= ten;
    else w /= ten;
    if (m[1].str() == "-") w = -w;
  } else {
    throw ParseError("window: cannot parse '" + text + "' as a decimal or fraction");
  }
  if (w <= 0) throw Error("window half width must be positive, got " + rational_string(w));
  return w;
}

std::string rational_string(const Rational& r) {
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

PAdicModelSet::PAdicModelSet(unsigned p_, Rational w_, unsigned n_max_) : p(p_), w(std::move(w_)), n_max(n_max_) {
  if (!is_prime(p)) throw Error("p-adic: p = " + std::to_string(p) + " is not prime");
  if (w <= 0) throw Error("window half width must be positive");
}

BigInt PAdicModelSet::numerator_bound(unsigned n) const { return floor_of(w * Rational(ipow(p, n))); }

std::vector<PAdicRational> enumerate_model_set(unsigned p, const Rational& w, unsigned n, std::size_t max_count) {
  const PAdicModelSet ms(p, w, n);
  // 2 floor(w p^n) + 1 elements in total.
  if (2 * ms.numerator_bound(n) + 1 > BigInt(max_count)) {
    throw Error("enumeration bound exceeded: more than " + std::to_string(max_count) + " elements");
  }
  std::vector<PAdicRational> out;
  for (unsigned k = 0; k <= n; ++k) {
    const auto bound = ms.numerator_bound(k).convert_to<long long>();
    for (long long a = -bound; a <= bound; ++a) {
      // Elements of exact denominator p^k; the origin belongs to k = 0.
      if (k > 0 && a % static_cast<long long>(p) == 0) continue;
      out.emplace_back(BigInt(a), k, p);
    }
  }
  return out;
}

PAdicDensityReport padic_density(const PAdicModelSet& ms) {
  const auto elements = enumerate_model_set(ms.p, ms.w, ms.n_max);
  PAdicDensityReport r;
  r.p = ms.p;
  r.w = ms.w;
  r.expected = 2 * ms.w;
  std::vector<BigInt> exact(ms.n_max + 1, 0);
  for (const auto& q : elements) ++exact[q.k()];
  BigInt running = 0;
  for (unsigned n = 0; n <= ms.n_max; ++n) {
    running += exact[n];
    r.counts.push_back(running);
    r.ratios.emplace_back(running, ipow(ms.p, n));
  }
  if (ms.n_max == 0) {
    r.density = r.ratios.back();
  } else {
    const Rational s1(ipow(ms.p, ms.n_max)), s0(ipow(ms.p, ms.n_max - 1));
    r.density = (s1 * r.ratios[ms.n_max] - s0 * r.ratios[ms.n_max - 1]) / (s1 - s0);
  }
  return r;
}

PAdicCoverResult padic_cover_set(const PAdicModelSet& ms, const PAdicCoverOptions& opts) {
  // Everything lives in p^{-n} Z: Lambda has numerators |a| <= W and
  // Lambda + Lambda has numerators |s| <= 2W; s is covered by f when
  // |s - f| <= W.
  const BigInt Wbig = ms.numerator_bound(ms.n_max);
  if (Wbig > BigInt(kMaxPAdicElements)) {
    throw Error("enumeration bound exceeded: window too large for the cover at this depth");
  }
  const auto W = Wbig.convert_to<long long>();
  const long long span = 4 * W + 1;
  std::vector<char> covered(static_cast<std::size_t>(span), 0);
  std::vector<long long> prefix(static_cast<std::size_t>(span) + 1);
  auto idx = [&](long long s) { return static_cast<std::size_t>(s + 2 * W); };

  PAdicCoverResult result;
  result.targets = static_cast<std::size_t>(span);
  std::size_t remaining = result.targets;
  std::vector<long long> chosen;
  while (remaining > 0) {
    if (chosen.size() >= opts.max_iterations) throw Error("not approximately closed at this truncation");
    prefix[0] = 0;
    for (std::size_t i = 0; i < covered.size(); ++i) prefix[i + 1] = prefix[i] + (covered[i] ? 0 : 1);
    long long best_f = 0, best_gain = 0;
    // Candidates in tie-break order 0, -1, 1, -2, 2, ...
    for (long long m = 0; m <= 2 * W; ++m) {
      for (long long f : {-m, m}) {
        const long long lo = std::max(f - W, -2 * W), hi = std::min(f + W, 2 * W);
        const long long gain = prefix[idx(hi) + 1] - prefix[idx(lo)];
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
        }
        if (m == 0) break;
      }
    }
    if (best_gain == 0) throw Error("not approximately closed at this truncation");
    for (long long s = std::max(best_f - W, -2 * W); s <= std::min(best_f + W, 2 * W); ++s) {
      if (!covered[idx(s)]) {
        covered[idx(s)] = 1;
        --remaining;
      }
    }
    chosen.push_back(best_f);
  }
  std::sort(chosen.begin(), chosen.end());

  result.verified = true;
  for (long long s = -2 * W; s <= 2 * W && result.verified; ++s) {
    result.verified = std::any_of(chosen.begin(), chosen.end(), [&](long long f) { return std::llabs(s - f) <= W; });
  }
  for (long long f : chosen) result.defect_set.emplace_back(BigInt(f), ms.n_max, ms.p);
  result.k = result.defect_set.size();
  return result;
}

nlohmann::json to_json(const PAdicDensityReport& r) {
  nlohmann::json counts = nlohmann::json::array(), ratios = nlohmann::json::array(),
                 ratio_values = nlohmann::json::array();
  for (const auto& c : r.counts) counts.push_back(c.str());
  for (const auto& q : r.ratios) {
    ratios.push_back(rational_string(q));
    ratio_values.push_back(q.convert_to<double>());
  }
  return {{"p", r.p},
          {"w", rational_string(r.w)},
          {"counts", counts},
          {"ratios", ratios},
          {"ratio_values", ratio_values},
          {"density", rational_string(r.density)},
          {"density_value", r.density.convert_to<double>()},
          {"expected", rational_string(r.expected)}};
}

nlohmann::json to_json(const PAdicCoverResult& r) {
  nlohmann::json defects = nlohmann::json::array();
  for (const auto& f : r.defect_set) defects.push_back(f.str());
  return {{"k", r.k}, {"defect_set", defects}, {"targets", r.targets}, {"verified", r.verified}};
}

}  // namespace quasilat
