#pragma once

#include <cmath>
#include <vector>

#include "divergences.hpp"

namespace renyi {

// Frozen per-pair context for the exponent calculus: both operators must be
// states (unit trace), distinct, with supp rho contained in supp sigma.
struct ExponentContext {
    StatePair pair;
    double d_umegaki = 0.0;  // psi'(0)
    double d_max_val = 0.0;  // psi'(inf)
    double a_max = 0.0;      // = d_max_val, upper edge of the finite phi domain
    double phi_amax = 0.0;   // phi at a_max
    double r_max = 0.0;      // phi(a_max) + a_max
};

// psi(s) = F_{s+1}(rho || sigma); defined for s > -1, convex, psi(0) = 0.
inline double psi(const ExponentContext& C, double s) {
    if (!(s > -1.0)) throw precondition_error("psi: s must be > -1");
    return f_alpha(C.pair, s + 1.0);
}

namespace detail {

// lim_{s->inf} (s a_max - psi(s)) by a geometric sweep with one Richardson
// step; the summand is arranged so the large cancellation never happens in
// floating point.
inline double phi_at_amax(const StatePair& P, double a_max) {
    auto g = [&](double s) {
        auto lm = sandwich_log_eigs(P, s + 1.0);
        std::vector<double> t;
        t.reserve(lm.size());
        for (double l : lm) t.push_back((s + 1.0) * (l - a_max));
        return -a_max - log_sum_exp(t);
    };
    double g1 = g(524288.0);
    double g2 = g(1048576.0);
    return g2 + (g2 - g1);
}

}  // namespace detail

inline ExponentContext make_context(const StatePair& P) {
    if (std::abs(P.tr_rho - 1.0) > 1e-8 || std::abs(P.tr_sigma - 1.0) > 1e-8)
        throw precondition_error("make_context: operators must be unit-trace states");
    if (!P.supp_ok)
        throw precondition_error("make_context: supp rho must be contained in supp sigma");
    ExponentContext C;
    C.pair = P;
    C.d_umegaki = umegaki(P);
    C.d_max_val = d_max(P);
    C.a_max = C.d_max_val;
    if (!(C.d_umegaki < C.d_max_val))
        throw precondition_error("make_context: states coincide (relative entropy equals max-relative entropy)");
    C.phi_amax = detail::phi_at_amax(P, C.a_max);
    C.r_max = C.phi_amax + C.a_max;
    return C;
}

// tilde_psi(u) = (1 - u) psi(u / (1 - u)) on [0, 1); convex, tilde_psi(0) = 0.
inline double tilde_psi(const ExponentContext& C, double u) {
    if (!(u >= 0.0) || u >= 1.0) throw precondition_error("tilde_psi: u must lie in [0, 1)");
    if (u == 0.0) return 0.0;
    return (1.0 - u) * psi(C, u / (1.0 - u));
}

// Legendre transform phi(a) = sup_{s >= 0} (a s - psi(s)): zero at or below
// the relative entropy, finite up to a_max, +inf beyond.
inline double phi(const ExponentContext& C, double a) {
    if (a <= C.d_umegaki) return 0.0;
    if (a > C.a_max) return kInf;
    auto g = [&](double s) { return a * s - psi(C, s); };
    double shi = 1.0;
    while (shi < 2097152.0 && g(2.0 * shi) > g(shi)) shi *= 2.0;
    auto res = golden_max(g, 0.0, 2.0 * shi);
    return std::max(res.value, 0.0);
}

// Direct error exponent sup_{0<alpha<1} ((alpha-1)/alpha)(r - D_alpha); zero
// once r reaches the relative entropy.
inline double hoeffding(const ExponentContext& C, double r) {
    if (!(r >= 0.0)) throw precondition_error("hoeffding: r must be >= 0");
    auto h = [&](double al) { return (al - 1.0) / al * (r - renyi_old(C.pair, al)); };
    auto res = golden_max(h, 1e-6, 1.0 - 1e-6, 64, 1e-8);
    return std::max(res.value, 0.0);
}

// Strong-converse exponent sup_{0<=u<1} (u r - tilde_psi(u)). The u -> 1
// limit value r - a_max is taken analytically, which makes the linear tail
// above r_max exact.
inline double converse_hoeffding(const ExponentContext& C, double r) {
    if (!(r >= 0.0)) throw precondition_error("converse_hoeffding: r must be >= 0");
    auto M = [&](double u) { return u * r - tilde_psi(C, u); };
    auto res = golden_max(M, 0.0, 1.0 - 1e-9);
    return std::max(std::max(res.value, r - C.a_max), 0.0);
}

// Solves phi(a) + a = r for a in (0, r_max); below the relative entropy the
// solution is a = r itself.
inline double solve_ar(const ExponentContext& C, double r) {
    if (!(r > 0.0) || !(r < C.r_max))
        throw precondition_error("solve_ar: r must lie in (0, r_max)");
    if (r <= C.d_umegaki) return r;
    double lo = C.d_umegaki, hi = C.a_max;
    for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
        double mid = 0.5 * (lo + hi);
        if (phi(C, mid) + mid - r <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct CutoffRate {
    double c_kappa;  // cutoff rate: sandwiched divergence at alpha = 1/(1-kappa)
    double r_kappa;  // rate where the kappa-sloped line touches the converse exponent
};

inline CutoffRate cutoff_rate(const ExponentContext& C, double kappa) {
    if (!(kappa > 0.0) || !(kappa < 1.0))
        throw precondition_error("cutoff_rate: kappa must lie in (0, 1)");
    double c = renyi_new(C.pair, 1.0 / (1.0 - kappa));
    double h = std::min({1e-5, kappa / 2.0, (1.0 - kappa) / 2.0});
    double r = derivative([&](double u) { return tilde_psi(C, u); }, kappa, h);
    return {c, r};
}

// sup over the given rate grid of (u r - converse_hoeffding(r)); recovers
// tilde_psi(u) when the grid is dense enough and spans past r_max.
inline double bipolar_check(const ExponentContext& C, double u, const std::vector<double>& r_grid) {
    if (!(u > 0.0) || !(u < 1.0)) throw precondition_error("bipolar_check: u must lie in (0, 1)");
    if (r_grid.empty()) throw precondition_error("bipolar_check: empty rate grid");
    double best = -kInf;
    for (double r : r_grid) best = std::max(best, u * r - converse_hoeffding(C, r));
    return best;
}

}  // namespace renyi
