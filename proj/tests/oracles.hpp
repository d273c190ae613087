#pragma once

// Test-side reference computations, written against the textbook formulas
// and sharing no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t n, std::int64_t d) {
    if (d == 0) return {0, 1};
    const std::int64_t g = std::gcd(n, d);
    return {n / g, d / g};
  }
  bool operator==(const Fraction&) const = default;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline std::map<std::string, std::int64_t> multiset(const Tokens& t) {
  std::map<std::string, std::int64_t> m;
  for (const auto& s : t) ++m[s];
  return m;
}

// Clipped unigram overlap F1 as an exact fraction: with P = o/|a| and
// R = o/|b|, 2PR/(P+R) reduces to 2o/(|a|+|b|).
inline Fraction rouge1_f1(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return {0, 1};
  const auto ma = multiset(a);
  const auto mb = multiset(b);
  std::int64_t o = 0;
  for (const auto& [tok, ca] : ma) {
    const auto it = mb.find(tok);
    if (it != mb.end()) o += std::min(ca, it->second);
  }
  if (o == 0) return {0, 1};
  const Fraction p = Fraction::make(o, static_cast<std::int64_t>(a.size()));
  const Fraction r = Fraction::make(o, static_cast<std::int64_t>(b.size()));
  // 2PR / (P + R) over a common denominator
  const std::int64_t num = 2 * p.num * r.num;
  const std::int64_t den = p.num * r.den + r.num * p.den;
  return Fraction::make(num, den);
}

// Okapi BM25 evaluated term by term straight from the definition.
inline std::vector<double> bm25(const Tokens& query, const std::vector<Tokens>& corpus, double k1,
                                double b, double epsilon) {
  const double n = static_cast<double>(corpus.size());
  double total = 0.0;
  for (const auto& d : corpus) total += static_cast<double>(d.size());
  const double avgdl = total / n;

  auto df = [&](const std::string& t) {
    double c = 0.0;
    for (const auto& d : corpus) c += std::find(d.begin(), d.end(), t) != d.end() ? 1.0 : 0.0;
    return c;
  };
  auto raw_idf = [&](const std::string& t) {
    const double f = df(t);
    return std::log((n - f + 0.5) / (f + 0.5));
  };
  std::vector<std::string> vocab;
  for (const auto& d : corpus) {
    for (const auto& t : d) {
      if (std::find(vocab.begin(), vocab.end(), t) == vocab.end()) vocab.push_back(t);
    }
  }
  double pos_sum = 0.0;
  int pos_count = 0;
  for (const auto& t : vocab) {
    const double v = raw_idf(t);
    if (v > 0.0) {
      pos_sum += v;
      ++pos_count;
    }
  }
  const double floor = pos_count == 0 ? 0.0 : epsilon * pos_sum / pos_count;
  auto idf = [&](const std::string& t) {
    if (df(t) == 0.0) return 0.0;
    const double v = raw_idf(t);
    return v < 0.0 ? floor : v;
  };

  std::vector<double> out;
  for (const auto& d : corpus) {
    double s = 0.0;
    for (const auto& q : query) {
      const double tf = static_cast<double>(std::count(d.begin(), d.end(), q));
      if (tf == 0.0) continue;
      const double dl = static_cast<double>(d.size());
      s += idf(q) * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
    }
    out.push_back(s);
  }
  return out;
}

inline double gaussian_kernel(double score, double mean, double width) {
  const double d = score - mean;
  return std::exp(-d * d / (2.0 * width * width));
}

}  // namespace oracle
