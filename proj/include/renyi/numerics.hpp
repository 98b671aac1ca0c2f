#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace renyi {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown when an operation's numeric preconditions fail (size caps, domain
// bounds, malformed operator payloads). The CLI maps it to exit code 2.
class precondition_error : public std::runtime_error {
  public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// log(sum_i exp(t_i)); -inf for an empty list, +inf if any term is +inf.
inline double log_sum_exp(const std::vector<double>& t) {
    double m = -kInf;
    for (double v : t) m = std::max(m, v);
    if (m == kInf) return kInf;
    if (!(m > -kInf)) return -kInf;
    double s = 0.0;
    for (double v : t) s += std::exp(v - m);
    return m + std::log(s);
}

struct OptResult {
    double x;
    double value;
};

// Maximize f on [lo, hi]: a coarse scan brackets the best sample, then
// golden-section refines the bracket down to tol * (1 + span).
inline OptResult golden_max(const std::function<double(double)>& f, double lo, double hi,
                            int coarse = 64, double tol = 1e-10) {
    if (!(hi > lo)) return {lo, f(lo)};
    const int N = std::max(coarse, 8);
    double best_x = lo, best_v = -kInf;
    std::vector<double> xs(static_cast<size_t>(N) + 1);
    int bi = 0;
    for (int i = 0; i <= N; ++i) {
        xs[i] = lo + (hi - lo) * i / N;
        double v = f(xs[i]);
        if (v > best_v) {
            best_v = v;
            best_x = xs[i];
            bi = i;
        }
    }
    double a = xs[static_cast<size_t>(std::max(bi - 1, 0))];
    double b = xs[static_cast<size_t>(std::min(bi + 1, N))];
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    const double width_tol = tol * (1.0 + std::abs(hi - lo));
    for (int it = 0; it < 300 && b - a > width_tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    double xm = 0.5 * (a + b), vm = f(xm);
    if (vm > best_v) {
        best_v = vm;
        best_x = xm;
    }
    if (fc > best_v) {
        best_v = fc;
        best_x = c;
    }
    if (fd > best_v) {
        best_v = fd;
        best_x = d;
    }
    return {best_x, best_v};
}

// Central difference with one Richardson step. Default step 1e-5 * max(1,|x|).
inline double derivative(const std::function<double(double)>& f, double x, double h_override = 0.0) {
    double h = h_override > 0.0 ? h_override : 1e-5 * std::max(1.0, std::abs(x));
    double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    double d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Derives an independent sub-seed from (seed, index) so trial order and
// concurrency cannot change any draw.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t a = seed;
    std::uint64_t b = index ^ 0xD1B54A32D192ED03ull;
    std::uint64_t h1 = splitmix64_next(a);
    std::uint64_t h2 = splitmix64_next(b);
    std::uint64_t s = h1 ^ (h2 + 0x9E3779B97F4A7C15ull + (h1 << 6) + (h1 >> 2));
    return splitmix64_next(s);
}

// Self-contained deterministic RNG (splitmix64 + Box-Muller), so streams are
// reproducible independent of standard-library distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) { splitmix64_next(state_); }
    Rng(std::uint64_t seed, std::uint64_t stream) : state_(mix_seed(seed, stream)) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform on (0, 1]
    double uniform() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    std::uint64_t state_;
};

struct Bracket {
    double lo, hi;
    double glo, ghi;
    int evals;
};

// Shrinks [lo, hi] around the transition of a nondecreasing g with
// g(lo) <= 0 <= g(hi), alternating a clamped false-position step with plain
// bisection so step discontinuities cannot stall progress. Stops at width
// xtol or max_iter evaluations.
template <class F>
Bracket bracket_transition(F&& g, double lo, double hi, double glo, double ghi, double xtol,
                           int max_iter = 200) {
    int evals = 0;
    bool use_fp = true;
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid;
        double w = hi - lo;
        if (use_fp && ghi > glo && glo < 0.0) {
            mid = lo - glo * w / (ghi - glo);
            mid = std::min(std::max(mid, lo + 0.01 * w), hi - 0.01 * w);
        } else {
            mid = 0.5 * (lo + hi);
        }
        use_fp = !use_fp;
        double gm = g(mid);
        ++evals;
        if (gm <= 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    return {lo, hi, glo, ghi, evals};
}

}  // namespace renyi
