#pragma once

// Random walks on the Mother group M(X): the measures mu = mu_A mu_B and
// mu~ = (d-1)/d mu_A + 1/d mu_B, the matrix M^mu of a random walk with
// internal degrees of freedom, exact entropy profiles, Monte Carlo return
// probabilities, the switch-count distribution of mu~^n, the exponent alpha,
// Cayley ball profiles and randomized checks of the appendix entropy
// inequalities.

#include <gmpxx.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selfsim/measure.hpp"
#include "selfsim/mother.hpp"
#include "selfsim/rng.hpp"

namespace selfsim {

// ---------------------------------------------------------------------------
// Mother-group measures

// Largest alphabet for which A and B are enumerated in full. mu_B needs every
// element of B, and |B| = 82944 already at d = 4.
inline constexpr std::size_t kMaxWalkDegree = 4;

namespace detail {

inline MotherGenerators const& full_mother(std::size_t d) {
  if (d < 2 || d > kMaxWalkDegree) {
    throw Error("walks: Mother measures are available for 2 <= d <= " +
                std::to_string(kMaxWalkDegree));
  }
  static std::mutex                                                   mu;
  static std::map<std::size_t, std::unique_ptr<MotherGenerators>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto&                       slot = cache[d];
  if (!slot) {
    slot = std::make_unique<MotherGenerators>(mother_generators(d, kMaxWalkDegree));
  }
  return *slot;
}

}  // namespace detail

inline Measure mu_A(std::size_t d) { return uniform_on(detail::full_mother(d).a_elements); }
inline Measure mu_B(std::size_t d) { return uniform_on(detail::full_mother(d).b_elements); }

// mu = mu_A mu_B
inline Measure mu_step(std::size_t d) { return convolve(mu_A(d), mu_B(d)); }

// mu~ = (d-1)/d mu_A + 1/d mu_B
inline Measure mu_tilde(std::size_t d) {
  return add(scale(mu_A(d), ratio(d - 1, d)), scale(mu_B(d), ratio(1, d)));
}

inline bool is_symmetric(Measure const& m) { return reflect(m) == m; }

// ---------------------------------------------------------------------------
// Matrices of subprobability measures

struct MeasureMatrix {
  std::vector<std::vector<Measure>> entries;  // entries[x][y] = M_xy

  std::size_t    order() const noexcept { return entries.size(); }
  Measure const& at(Letter x, Letter y) const { return entries[x][y]; }

  Rational row_mass(Letter x) const {
    Rational s = 0;
    for (auto const& m : entries[x]) {
      s += m.mass();
    }
    return s;
  }

  bool is_row_stochastic() const {
    for (Letter x = 0; x < order(); ++x) {
      if (row_mass(x) != 1) {
        return false;
      }
    }
    return true;
  }

  bool operator==(MeasureMatrix const&) const = default;
};

// M^m = sum_g m(g) M^g, where M^g has g_x at (x, sigma_g(x)).
inline MeasureMatrix measure_matrix(Measure const& m) {
  std::size_t const d = m.degree();
  std::vector<std::vector<std::vector<Measure::Atom>>> cells(
      d, std::vector<std::vector<Measure::Atom>>(d));
  for (auto const& [g, w] : m.atoms()) {
    Perm const& s = g.root_perm();
    for (Letter x = 0; x < d; ++x) {
      cells[x][s(x)].emplace_back(g.section(x), w);
    }
  }
  MeasureMatrix M;
  M.entries.resize(d);
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      M.entries[x].emplace_back(d, std::move(cells[x][y]));
    }
  }
  return M;
}

// Matrix product with convolution in place of multiplication.
inline MeasureMatrix multiply(MeasureMatrix const& P, MeasureMatrix const& Q) {
  std::size_t const d = P.order();
  if (Q.order() != d) {
    throw AlphabetMismatch(d, Q.order());
  }
  MeasureMatrix R;
  R.entries.assign(d, std::vector<Measure>(d));
  for (std::size_t x = 0; x < d; ++x) {
    for (std::size_t y = 0; y < d; ++y) {
      Measure acc;
      for (std::size_t z = 0; z < d; ++z) {
        acc = add(acc, convolve(P.entries[x][z], Q.entries[z][y]));
      }
      R.entries[x][y] = acc.empty() ? Measure(d, {}) : acc;
    }
  }
  return R;
}

using RowVector = std::vector<Measure>;

// R M: the time-one distribution of the chain started from row vector R.
inline RowVector row_step(RowVector const& R, MeasureMatrix const& M) {
  std::size_t const d = M.order();
  RowVector         out(d, Measure(d, {}));
  for (std::size_t x = 0; x < d; ++x) {
    if (R[x].empty()) {
      continue;
    }
    for (std::size_t y = 0; y < d; ++y) {
      out[y] = add(out[y], convolve(R[x], M.entries[x][y]));
    }
  }
  return out;
}

// Exact law of the chain on G x X after n steps from (g, x), as the row
// vector R M^n.
inline RowVector rwidf_distribution(MeasureMatrix const& M, Element g, Letter x, std::size_t n) {
  std::size_t const d = M.order();
  RowVector         R(d, Measure(d, {}));
  R[x] = dirac(g);
  for (std::size_t i = 0; i < n; ++i) {
    R = row_step(R, M);
  }
  return R;
}

// Projection of a row vector to G.
inline Measure group_marginal(RowVector const& R) {
  Measure acc;
  for (auto const& m : R) {
    acc = add(acc, m);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Sampling

using WalkState = std::pair<Element, Letter>;

namespace detail {

// Products g * h memoized per sampler; the store is shared between threads,
// the memo is not.
class ProductMemo {
 public:
  Element operator()(Element g, Element h) {
    std::uint64_t key = (static_cast<std::uint64_t>(g.id()) << 32) | h.id();
    auto          it  = memo_.find(key);
    if (it != memo_.end()) {
      return Element(it->second);
    }
    Element p = g * h;
    memo_.emplace(key, p.id());
    return p;
  }

 private:
  std::unordered_map<std::uint64_t, ElementId> memo_;
};

}  // namespace detail

// Samples increments of a fixed measure. Copy one per thread.
class WalkSampler {
 public:
  explicit WalkSampler(Measure const& m) : degree_(m.degree()), step_(sampler(m)) {
    if (!m.is_probability()) {
      throw Error("walk: measure must have mass 1");
    }
  }

  Element step(Element g, RandomStream& rng) { return memo_(g, step_.draw(rng)); }

  Element walk(std::size_t n, RandomStream& rng) {
    Element g = identity(degree_);
    for (std::size_t i = 0; i < n; ++i) {
      g = step(g, rng);
    }
    return g;
  }

 private:
  std::size_t           degree_;
  Categorical<Element>  step_;
  detail::ProductMemo   memo_;
};

// Product of n independent increments drawn from m.
inline Element sample_walk(Measure const& m, std::size_t n, std::uint64_t seed,
                           std::uint64_t stream = 0) {
  WalkSampler  s(m);
  RandomStream rng(seed, stream);
  return s.walk(n, rng);
}

// n steps of p((g,x),(gh,y)) = M_xy(h); returns the n+1 visited states.
inline std::vector<WalkState> rwidf_sample(MeasureMatrix const& M, WalkState start, std::size_t n,
                                           std::uint64_t seed, std::uint64_t stream = 0) {
  if (!M.is_row_stochastic()) {
    throw Error("rwidf: matrix rows must have total mass 1");
  }
  std::size_t const                          d = M.order();
  std::vector<Categorical<WalkState>> rows;
  for (Letter x = 0; x < d; ++x) {
    std::vector<std::tuple<std::string, Rational, WalkState>> items;
    for (Letter y = 0; y < d; ++y) {
      for (auto const& [h, w] : M.entries[x][y].atoms()) {
        std::string key(2, '\0');
        key[0] = static_cast<char>(y >> 8);
        key[1] = static_cast<char>(y & 0xFF);
        items.emplace_back(key + element_key(h), w, WalkState{h, y});
      }
    }
    rows.emplace_back(std::move(items));
  }
  RandomStream           rng(seed, stream);
  detail::ProductMemo    memo;
  std::vector<WalkState> path{start};
  for (std::size_t i = 0; i < n; ++i) {
    auto const& [g, x] = path.back();
    auto const& [h, y] = rows[x].draw(rng);
    path.emplace_back(memo(g, h), y);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Return probabilities

struct ReturnEstimate {
  std::size_t   n       = 0;
  double        estimate = 0;
  double        stderr_  = 0;
  std::uint64_t samples = 0;
  std::uint64_t hits    = 0;
  std::uint64_t seed    = 0;
};

// Collision estimates of m^{2n}(e) = sum_g m^n(g)^2 for every n in ns. Pair i
// walks with streams 2i and 2i+1 up to max(ns), recording a hit at each n
// where the two positions agree. Per-thread hit counts are integers, so the
// result does not depend on the thread count.
inline std::vector<ReturnEstimate> return_profile(Measure const& m, std::vector<std::size_t> ns,
                                                  std::uint64_t samples, std::uint64_t seed,
                                                  unsigned threads = 1) {
  if (samples == 0) {
    throw Error("return profile: need at least one sample");
  }
  if (!is_symmetric(m)) {
    throw Error("return profile: measure is not symmetric");
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty()) {
    return {};
  }
  std::size_t const nmax = ns.back();
  threads                = std::max(1U, threads);
  if (threads > samples) {
    threads = static_cast<unsigned>(samples);
  }
  WalkSampler const                       proto(m);
  std::vector<std::vector<std::uint64_t>> hits(threads, std::vector<std::uint64_t>(ns.size(), 0));

  auto work = [&](unsigned t) {
    WalkSampler   s     = proto;
    std::uint64_t begin = samples * t / threads;
    std::uint64_t end   = samples * (t + 1) / threads;
    Element const one   = identity(m.degree());
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream r1(seed, 2 * i), r2(seed, 2 * i + 1);
      Element      g1 = one, g2 = one;
      std::size_t  k  = 0;
      if (ns[0] == 0) {
        ++hits[t][k++];
      }
      for (std::size_t step = 1; step <= nmax; ++step) {
        g1 = s.step(g1, r1);
        g2 = s.step(g2, r2);
        if (step == ns[k]) {
          hits[t][k] += g1 == g2 ? 1 : 0;
          ++k;
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(work, t);
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  std::vector<ReturnEstimate> out;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    ReturnEstimate e;
    e.n       = ns[k];
    e.samples = samples;
    e.seed    = seed;
    for (auto const& h : hits) {
      e.hits += h[k];
    }
    double p   = static_cast<double>(e.hits) / static_cast<double>(samples);
    e.estimate = p;
    e.stderr_  = std::sqrt(p * (1 - p) / static_cast<double>(samples));
    out.push_back(e);
  }
  return out;
}

inline ReturnEstimate return_probability_mc(Measure const& m, std::size_t n, std::uint64_t samples,
                                            std::uint64_t seed, unsigned threads = 1) {
  return return_profile(m, {n}, samples, seed, threads).front();
}

// sum_g m(g)^2, the exact collision probability of two independent draws.
inline Rational collision_probability(Measure const& m) {
  Rational s = 0;
  for (auto const& [g, w] : m.atoms()) {
    s += w * w;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Exact entropy profiles

struct ProfileBudget {
  std::size_t max_atoms   = 1'000'000;
  double      max_seconds = std::numeric_limits<double>::infinity();
};

struct EntropyPoint {
  std::size_t n       = 0;
  double      H       = 0;
  std::size_t support = 0;
  double      seconds = 0;
};

struct EntropyProfile {
  std::vector<EntropyPoint> points;  // n = 1..horizon
  bool                      exact   = true;
  bool                      partial = false;  // stopped by the budget before nmax
  std::string               reason;

  std::size_t horizon() const noexcept { return points.size(); }
  // F(n), with F(0) = 0.
  double at(std::size_t n) const { return n == 0 ? 0.0 : points.at(n - 1).H; }
};

// H(m^n) for n = 1..nmax, stopping early when the next convolution would form
// more than budget.max_atoms products or the elapsed time passes
// budget.max_seconds. Optionally keeps the powers themselves.
inline EntropyProfile entropy_profile(Measure const& m, std::size_t nmax,
                                      ProfileBudget const& budget = {},
                                      std::vector<Measure>* powers = nullptr) {
  if (!m.is_probability()) {
    throw Error("entropy profile: measure must have mass 1");
  }
  using Clock = std::chrono::steady_clock;
  auto const     t0 = Clock::now();
  EntropyProfile prof;
  Measure        cur = m;
  for (std::size_t n = 1; n <= nmax; ++n) {
    if (n > 1) {
      double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
      if (elapsed > budget.max_seconds) {
        prof.partial = true;
        prof.reason  = "time budget exhausted";
        break;
      }
      try {
        cur = convolve(cur, m, budget.max_atoms);
      } catch (BudgetExceeded const&) {
        prof.partial = true;
        prof.reason  = "atom budget exhausted";
        break;
      }
    }
    if (powers) {
      powers->push_back(cur);
    }
    EntropyPoint pt;
    pt.n       = n;
    pt.H       = entropy(cur);
    pt.support = cur.support_size();
    pt.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    prof.points.push_back(pt);
  }
  return prof;
}

// Observed slopes F(n)/n. These are finite-horizon estimates of the asymptotic
// entropy, not certified values.
inline std::vector<double> entropy_slopes(EntropyProfile const& p) {
  std::vector<double> out;
  for (auto const& pt : p.points) {
    out.push_back(pt.H / static_cast<double>(pt.n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Switch distribution

// Law of the number i of runs in xi_1..xi_n, i.i.d. with P(A) = (d-1)/d and
// P(B) = 1/d, split by the first symbol: pA[i] = P(xi_1 = A, i runs).
struct SwitchDistribution {
  std::size_t           n = 0;
  std::size_t           d = 0;
  std::vector<Rational> pA;  // index 1..n; index 0 unused
  std::vector<Rational> pB;

  Rational p(std::size_t i) const { return pA[i] + pB[i]; }

  Rational total() const {
    Rational s = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      s += p(i);
    }
    return s;
  }

  Rational mean() const {
    Rational s = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      s += p(i) * static_cast<unsigned long>(i);
    }
    return s;
  }

  Rational variance() const {
    Rational m = mean(), s = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      Rational di = Rational(static_cast<unsigned long>(i)) - m;
      s += p(i) * di * di;
    }
    return s;
  }
};

// (n-1) * 2(d-1)/d^2 + 1
inline Rational switch_mean_formula(std::size_t n, std::size_t d) {
  return Rational(static_cast<unsigned long>(n - 1)) * ratio(2 * (d - 1), d * d) + 1;
}

inline SwitchDistribution switch_distribution(std::size_t n, std::size_t d) {
  if (n < 1) {
    throw Error("switch distribution: n must be positive");
  }
  if (d < 2) {
    throw Error("switch distribution: d must be at least 2");
  }
  Rational const qA = ratio(d - 1, d), qB = ratio(1, d);
  // dp[first][last][runs]
  std::vector<Rational> cur(4 * (n + 1), Rational(0));
  auto idx = [n](int first, int last, std::size_t runs) {
    return (static_cast<std::size_t>(first) * 2 + static_cast<std::size_t>(last)) * (n + 1) + runs;
  };
  cur[idx(0, 0, 1)] = qA;
  cur[idx(1, 1, 1)] = qB;
  for (std::size_t k = 2; k <= n; ++k) {
    std::vector<Rational> next(4 * (n + 1), Rational(0));
    for (int f = 0; f < 2; ++f) {
      for (int l = 0; l < 2; ++l) {
        for (std::size_t r = 1; r < k; ++r) {
          Rational const& v = cur[idx(f, l, r)];
          if (v == 0) {
            continue;
          }
          next[idx(f, 0, l == 0 ? r : r + 1)] += v * qA;
          next[idx(f, 1, l == 1 ? r : r + 1)] += v * qB;
        }
      }
    }
    cur.swap(next);
  }
  SwitchDistribution s;
  s.n = n;
  s.d = d;
  s.pA.assign(n + 1, Rational(0));
  s.pB.assign(n + 1, Rational(0));
  for (std::size_t r = 1; r <= n; ++r) {
    s.pA[r] = cur[idx(0, 0, r)] + cur[idx(0, 1, r)];
    s.pB[r] = cur[idx(1, 0, r)] + cur[idx(1, 1, r)];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Convex decomposition of mu~^n

struct DecompositionReport {
  std::size_t n            = 0;
  std::size_t d            = 0;
  Rational    tv           = 0;  // total variation between the two sides
  std::size_t support      = 0;  // of mu~^n
  bool        passed       = false;
};

// Checks mu~^n = sum_i pA_i mu_{A,i} + sum_i pB_i mu_{B,i} exactly, where
// mu_{A,i} = mu_A mu_B mu_A ... and mu_{B,i} = mu_B mu_A ... have i factors.
inline DecompositionReport verify_convex_decomposition(std::size_t n, std::size_t d,
                                                       std::size_t max_atoms = 1'000'000) {
  Measure const A = mu_A(d), B = mu_B(d);
  Measure const mt = mu_tilde(d);
  Measure       lhs = mt;
  for (std::size_t i = 1; i < n; ++i) {
    lhs = convolve(lhs, mt, max_atoms);
  }
  auto const sw = switch_distribution(n, d);
  Measure    rhs;
  Measure    altA = A, altB = B;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i > 1) {
      bool even = i % 2 == 0;
      altA      = convolve(altA, even ? B : A, max_atoms);
      altB      = convolve(altB, even ? A : B, max_atoms);
    }
    rhs = add(rhs, scale(altA, sw.pA[i]));
    rhs = add(rhs, scale(altB, sw.pB[i]));
  }
  DecompositionReport r;
  r.n       = n;
  r.d       = d;
  r.tv      = total_variation(lhs, rhs);
  r.support = lhs.support_size();
  r.passed  = r.tv == 0;
  return r;
}

// ---------------------------------------------------------------------------
// Entropy inequalities along the profiles

struct FirstInequalityRow {
  std::size_t n      = 0;
  double      F      = 0;
  double      Ftilde = 0;
  double      bound  = 0;  // d F~(n) + d log d
  double      slack  = 0;  // bound - F
  bool        holds  = false;
};

// F(n) <= d F~(n) + d log d at every n computed in both profiles, plus n = 0.
inline std::vector<FirstInequalityRow> check_first_inequality(EntropyProfile const& F,
                                                              EntropyProfile const& Ft,
                                                              std::size_t           d) {
  std::vector<FirstInequalityRow> out;
  double const dd = static_cast<double>(d);
  std::size_t const top = std::min(F.horizon(), Ft.horizon());
  for (std::size_t n = 0; n <= top; ++n) {
    FirstInequalityRow r;
    r.n      = n;
    r.F      = F.at(n);
    r.Ftilde = Ft.at(n);
    r.bound  = dd * r.Ftilde + dd * std::log(dd);
    r.slack  = r.bound - r.F;
    r.holds  = r.F <= r.bound + 1e-12;
    out.push_back(r);
  }
  return out;
}

inline std::vector<FirstInequalityRow> check_first_inequality(std::size_t nmax, std::size_t d,
                                                              ProfileBudget const& budget = {}) {
  return check_first_inequality(entropy_profile(mu_step(d), nmax, budget),
                                entropy_profile(mu_tilde(d), nmax, budget), d);
}

struct SandwichRow {
  std::size_t n        = 0;
  std::size_t k        = 0;  // floor(((d-1)/d^2 + eps) n)
  double      Ftilde   = 0;
  double      bound    = 0;  // F(k) + log(2n)
  double      slack    = 0;
  bool        holds    = false;
  bool        in_range = false;  // F(k) was computed
};

// Reports F~(n) <= F(floor(((d-1)/d^2 + eps) n)) + log(2n). The inequality is
// only claimed for large n, so a failing row is information, not an error.
inline std::vector<SandwichRow> check_sandwich_inequality(EntropyProfile const& F,
                                                          EntropyProfile const& Ft, std::size_t d,
                                                          double eps) {
  std::vector<SandwichRow> out;
  double const c = static_cast<double>(d - 1) / static_cast<double>(d * d) + eps;
  for (std::size_t n = 1; n <= Ft.horizon(); ++n) {
    SandwichRow r;
    r.n        = n;
    r.k        = static_cast<std::size_t>(std::floor(c * static_cast<double>(n)));
    r.Ftilde   = Ft.at(n);
    r.in_range = r.k <= F.horizon();
    if (r.in_range) {
      r.bound = F.at(r.k) + std::log(2.0 * static_cast<double>(n));
      r.slack = r.bound - r.Ftilde;
      r.holds = r.Ftilde <= r.bound + 1e-12;
    }
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponents and reference curves

// log d / log(d^2/(d-1)), computed as L / (L - log(1 - 1/d)) to stay accurate
// for large d.
inline double alpha_exponent(double d) {
  if (!(d >= 2)) {
    throw Error("alpha: d must be at least 2");
  }
  double L = std::log(d);
  return L / (L - std::log1p(-1.0 / d));
}

inline double alpha_exponent(std::size_t d) { return alpha_exponent(static_cast<double>(d)); }

// The exponent for a subgroup of BA(X) embedded into M(X^N) wr Sym(X^N):
// alpha_exponent evaluated at d^N.
inline double subgroup_alpha(std::size_t d, std::size_t N) {
  return alpha_exponent(std::pow(static_cast<double>(d), static_cast<double>(N)));
}

struct BoundPoint {
  double n         = 0;
  double rho_bound = 0;  // exp(-n^(alpha + eps))
  double iso_bound = 0;  // exp(n^(2 alpha / (1 - alpha) + eps))
};

// Reference curves with the implicit constants of the ordering set to 1.
inline std::vector<BoundPoint> profile_bound_curves(double alpha, double eps,
                                                    std::vector<double> const& ns) {
  if (!(eps >= 0)) {
    throw Error("bound curves: epsilon must be non-negative");
  }
  std::vector<BoundPoint> out;
  double const            iso_exp = 2 * alpha / (1 - alpha) + eps;
  for (double n : ns) {
    BoundPoint b;
    b.n         = n;
    b.rho_bound = std::exp(-std::pow(n, alpha + eps));
    b.iso_bound = std::exp(std::pow(n, iso_exp));
    out.push_back(b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balls in Cayley graphs

struct BallPoint {
  std::size_t r        = 0;
  std::size_t volume   = 0;  // |B(r)|
  std::size_t boundary = 0;  // vertices at distance exactly r + 1
  double      ratio    = 0;  // boundary / volume
};

// Balls around e in the Cayley graph for S u S^-1, up to radius. Throws
// BudgetExceeded when a ball would hold more than max_vertices elements.
inline std::vector<BallPoint> ball_isoperimetric(std::vector<Element> const& gens,
                                                 std::size_t                 radius,
                                                 std::size_t max_vertices = 2'000'000) {
  if (gens.empty()) {
    throw Error("ball profile: no generators");
  }
  std::size_t const    d = gens.front().degree();
  std::vector<Element> S;
  for (Element g : gens) {
    if (g.degree() != d) {
      throw AlphabetMismatch(d, g.degree());
    }
    S.push_back(g);
    S.push_back(inverse(g));
  }
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());

  std::unordered_set<Element> seen{identity(d)};
  std::vector<Element>        sphere{identity(d)};
  std::size_t                 volume = 1;
  std::vector<BallPoint>      out;
  for (std::size_t r = 0; r <= radius; ++r) {
    std::vector<Element> next;
    for (Element g : sphere) {
      for (Element s : S) {
        Element h = g * s;
        if (seen.insert(h).second) {
          next.push_back(h);
          if (seen.size() > max_vertices) {
            throw BudgetExceeded("ball profile exceeds the vertex budget");
          }
        }
      }
    }
    BallPoint p;
    p.r        = r;
    p.volume   = volume;
    p.boundary = next.size();
    p.ratio    = static_cast<double>(p.boundary) / static_cast<double>(p.volume);
    out.push_back(p);
    volume += next.size();
    sphere.swap(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Randomized checks of the appendix entropy inequalities

struct OracleCheck {
  std::string name;
  std::size_t trials     = 0;
  std::size_t violations = 0;
  double      min_slack  = std::numeric_limits<double>::infinity();
  std::string witness;  // first violating instance
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  double                   tolerance = 1e-9;
  std::uint64_t            seed      = 0;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](OracleCheck const& c) { return c.violations == 0; });
  }
};

namespace detail {

// Random probability vector of length k with small integer numerators.
inline std::vector<Rational> random_distribution(std::size_t k, RandomStream& rng,
                                                 bool allow_zero = true) {
  std::vector<Rational> w(k);
  Rational              total = 0;
  for (auto& x : w) {
    x = Rational(static_cast<long>(rng.below(allow_zero ? 10 : 9) + (allow_zero ? 0 : 1)));
    total += x;
  }
  if (total == 0) {
    w[rng.below(k)] = 1;
    total           = 1;
  }
  for (auto& x : w) {
    x /= total;
  }
  return w;
}

inline double H(std::vector<Rational> const& p) {
  std::vector<double> v;
  for (auto const& x : p) {
    v.push_back(x.get_d());
  }
  return entropy_of(std::move(v));
}

inline std::string show(std::vector<Rational> const& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << (i ? " " : "") << p[i].get_str();
  }
  os << ')';
  return os.str();
}

inline void record(OracleCheck& c, double slack, double tol, std::string const& what) {
  c.min_slack = std::min(c.min_slack, slack);
  if (slack < -tol) {
    if (c.violations++ == 0) {
      c.witness = what;
    }
  }
}

// Random measure supported on up to `atoms` elements drawn from a pool.
inline Measure random_measure(std::vector<Element> const& pool, std::size_t atoms,
                              RandomStream& rng) {
  std::size_t const          k = 1 + rng.below(atoms);
  auto const                 w = random_distribution(k, rng, false);
  std::vector<Measure::Atom> a;
  for (std::size_t i = 0; i < k; ++i) {
    a.emplace_back(pool[rng.below(pool.size())], w[i]);
  }
  return Measure(pool.front().degree(), std::move(a));
}

// Elements of Mother(3) reachable by words of length <= 2 in A u B.
inline std::vector<Element> oracle_pool() {
  auto const&          mg = full_mother(3);
  std::vector<Element> gens(mg.a_elements);
  gens.insert(gens.end(), mg.b_elements.begin(), mg.b_elements.end());
  std::vector<Element> pool(gens);
  for (std::size_t i = 0; i < 200; ++i) {
    pool.push_back(gens[(i * 7) % gens.size()] * gens[(i * 13 + 5) % gens.size()]);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

}  // namespace detail

// Each of the four checks runs `trials` randomized exact instances; instance
// t of check c draws from stream 4t + c.
inline OracleReport entropy_oracle_suite(std::size_t trials, std::uint64_t seed,
                                         double tolerance = 1e-9) {
  using detail::H;
  using detail::random_distribution;
  using detail::record;
  using detail::show;
  OracleReport rep;
  rep.tolerance = tolerance;
  rep.seed      = seed;
  auto named = [](char const* name) {
    OracleCheck c;
    c.name = name;
    return c;
  };
  OracleCheck subadd = named("subadditivity"), convex = named("convex_combination"),
              conv = named("convolution"), cond = named("conditional_identity");
  auto const pool = detail::oracle_pool();

  for (std::size_t t = 0; t < trials; ++t) {
    // Joint law on a product of 2 or 3 finite coordinates; the coordinate
    // projections separate points.
    {
      RandomStream             rng(seed, 4 * t + 0);
      std::size_t const        axes = 2 + rng.below(2);
      std::vector<std::size_t> dims(axes);
      std::size_t              cells = 1;
      for (auto& k : dims) {
        k = 1 + rng.below(4);
        cells *= k;
      }
      auto const joint = random_distribution(cells, rng);
      double     sum   = 0;
      std::size_t stride = 1;
      for (std::size_t a = 0; a < axes; ++a) {
        std::vector<Rational> marg(dims[a], Rational(0));
        for (std::size_t c = 0; c < cells; ++c) {
          marg[(c / stride) % dims[a]] += joint[c];
        }
        sum += H(marg);
        stride *= dims[a];
      }
      ++subadd.trials;
      record(subadd, sum - H(joint), tolerance, "joint=" + show(joint));
    }
    // sum p_i H(m_i) <= H(sum p_i m_i) <= sum p_i H(m_i) + H(p)
    {
      RandomStream          rng(seed, 4 * t + 1);
      std::size_t const     k = 1 + rng.below(4);
      std::size_t const     X = 1 + rng.below(6);
      auto const            p = random_distribution(k, rng);
      std::vector<Rational> mix(X, Rational(0));
      double                avg = 0;
      std::string           what = "p=" + show(p);
      for (std::size_t i = 0; i < k; ++i) {
        auto const mi = random_distribution(X, rng);
        for (std::size_t x = 0; x < X; ++x) {
          mix[x] += p[i] * mi[x];
        }
        avg += p[i].get_d() * H(mi);
        what += " m" + std::to_string(i) + "=" + show(mi);
      }
      double const hm = H(mix);
      ++convex.trials;
      record(convex, std::min(hm - avg, avg + H(p) - hm), tolerance, what);
    }
    // max(H(m1), H(m2)) <= H(m1 m2) <= H(m1) + H(m2)
    {
      RandomStream rng(seed, 4 * t + 2);
      Measure      m1 = detail::random_measure(pool, 5, rng);
      Measure      m2 = detail::random_measure(pool, 5, rng);
      double       h1 = entropy(m1), h2 = entropy(m2), h12 = entropy(convolve(m1, m2));
      ++conv.trials;
      record(conv, std::min(h12 - std::max(h1, h2), h1 + h2 - h12), tolerance,
             "supports " + std::to_string(m1.support_size()) + "," +
                 std::to_string(m2.support_size()));
    }
    // H(xi|zeta) + H(zeta) = H(xi v zeta) and H(xi|zeta) <= H(xi) on a finite
    // space with two random labelings.
    {
      RandomStream             rng(seed, 4 * t + 3);
      std::size_t const        n  = 1 + rng.below(8);
      std::size_t const        kx = 1 + rng.below(4), kz = 1 + rng.below(4);
      auto const               m  = random_distribution(n, rng);
      std::vector<std::size_t> xi(n), zeta(n);
      for (std::size_t i = 0; i < n; ++i) {
        xi[i]   = rng.below(kx);
        zeta[i] = rng.below(kz);
      }
      std::vector<Rational> px(kx, Rational(0)), pz(kz, Rational(0)),
          pj(kx * kz, Rational(0));
      for (std::size_t i = 0; i < n; ++i) {
        px[xi[i]] += m[i];
        pz[zeta[i]] += m[i];
        pj[zeta[i] * kx + xi[i]] += m[i];
      }
      // H(xi|zeta) as the zeta-average of the entropies of the traces.
      double hcond = 0;
      for (std::size_t z = 0; z < kz; ++z) {
        if (pz[z] == 0) {
          continue;
        }
        std::vector<Rational> trace(kx);
        for (std::size_t x = 0; x < kx; ++x) {
          trace[x] = pj[z * kx + x] / pz[z];
        }
        hcond += pz[z].get_d() * H(trace);
      }
      double const gap = std::abs(hcond + H(pz) - H(pj));
      ++cond.trials;
      record(cond, std::min(-gap, H(px) - hcond), tolerance, "m=" + show(m));
      // The identity is an equality; report its slack as -|gap|.
    }
  }
  rep.checks = {subadd, convex, conv, cond};
  return rep;
}

}  // namespace selfsim
