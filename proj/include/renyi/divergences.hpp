#pragma once

#include <cmath>
#include <vector>

#include "operator_core.hpp"

namespace renyi {

// Extended-real convention used throughout: plain doubles where +inf marks a
// divergence that is infinite by support mismatch and -inf marks log 0.

// A pair (rho, sigma) with the sigma eigenbasis cached eagerly; every
// divergence below works in that basis.
struct StatePair {
    PositiveOperator rho, sigma;
    bool supp_ok = false;  // supp rho contained in supp sigma
    EigenDecomposition sigma_eig;
    Mat rho_sb;  // rho rotated into the sigma eigenbasis
    double tr_rho = 0.0, tr_sigma = 0.0;
    ToleranceConfig tol;

    int dim() const { return rho.dim(); }
};

inline StatePair make_state_pair(const PositiveOperator& rho, const PositiveOperator& sigma,
                                 ToleranceConfig tol = {}) {
    validate(tol);
    if (rho.dim() != sigma.dim()) throw precondition_error("make_state_pair: dimension mismatch");
    if (rho.dim() == 0) throw precondition_error("make_state_pair: empty operators");
    StatePair P;
    P.rho = rho;
    P.sigma = sigma;
    P.tol = tol;
    P.sigma_eig = eig_of(sigma);
    P.rho_sb = P.sigma_eig.eigenvectors.adjoint() * rho.entries * P.sigma_eig.eigenvectors;
    P.tr_rho = rho.entries.trace().real();
    P.tr_sigma = sigma.entries.trace().real();
    if (!(P.tr_rho > 0.0)) throw precondition_error("make_state_pair: rho has nonpositive trace");
    if (!(P.tr_sigma > 0.0)) throw precondition_error("make_state_pair: sigma has nonpositive trace");
    P.supp_ok = support_contained(rho, sigma, tol.tau_supp);
    return P;
}

namespace detail {

// log eigenvalues (above the support cut) of
// sigma^{(1-a)/2a} rho sigma^{(1-a)/2a}, negative powers restricted to the
// support of sigma.
inline std::vector<double> sandwich_log_eigs(const StatePair& P, double alpha) {
    const auto& s = P.sigma_eig.eigenvalues;
    const auto n = s.size();
    double smax = s.maxCoeff();
    double scut = P.tol.tau_supp * std::max(smax, 0.0);
    double e = (1.0 - alpha) / (2.0 * alpha);
    Eigen::VectorXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = s[i] > scut ? std::pow(s[i], e) : 0.0;
    Mat G = d.asDiagonal() * P.rho_sb * d.asDiagonal();
    auto ed = eig_hermitian(G);
    double mumax = ed.eigenvalues.size() > 0 ? ed.eigenvalues.maxCoeff() : 0.0;
    double cut = P.tol.tau_supp * std::max(mumax, 0.0);
    std::vector<double> out;
    out.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        if (ed.eigenvalues[i] > cut && ed.eigenvalues[i] > 0.0)
            out.push_back(std::log(ed.eigenvalues[i]));
    return out;
}

}  // namespace detail

// F_alpha = log Tr (sigma^{(1-a)/2a} rho sigma^{(1-a)/2a})^alpha, the
// log-trace functional behind the sandwiched divergence. -inf when the trace
// vanishes.
inline double f_alpha(const StatePair& P, double alpha) {
    if (!(alpha > 0.0)) throw precondition_error("f_alpha: alpha must be > 0");
    auto lm = detail::sandwich_log_eigs(P, alpha);
    std::vector<double> t;
    t.reserve(lm.size());
    for (double l : lm) t.push_back(alpha * l);
    return log_sum_exp(t);
}

// Sandwiched Renyi divergence. +inf above alpha = 1 without support
// containment; alpha = 1 itself is rejected (use umegaki).
inline double renyi_new(const StatePair& P, double alpha) {
    if (!(alpha > 0.0)) throw precondition_error("renyi_new: alpha must be > 0");
    if (alpha == 1.0) throw precondition_error("alpha=1: use umegaki");
    if (alpha > 1.0 && !P.supp_ok) return kInf;
    double F = f_alpha(P, alpha);
    if (F == -kInf) return alpha < 1.0 ? kInf : -kInf;
    return (F - std::log(P.tr_rho)) / (alpha - 1.0);
}

// Petz-type Renyi divergence via log Tr rho^alpha sigma^{1-alpha}, evaluated
// through the cross-Gram overlaps of the two eigenbases. +inf above alpha = 1
// without support containment, and +inf below alpha = 1 when the supports are
// disjoint.
inline double renyi_old(const StatePair& P, double alpha) {
    if (!(alpha > 0.0)) throw precondition_error("renyi_old: alpha must be > 0");
    if (alpha == 1.0) throw precondition_error("alpha=1: use umegaki");
    if (alpha > 1.0 && !P.supp_ok) return kInf;
    auto red = eig_of(P.rho);
    const auto& sed = P.sigma_eig;
    double rmax = red.eigenvalues.maxCoeff();
    double smax = sed.eigenvalues.maxCoeff();
    double rcut = P.tol.tau_supp * std::max(rmax, 0.0);
    double scut = P.tol.tau_supp * std::max(smax, 0.0);
    Mat W = red.eigenvectors.adjoint() * sed.eigenvectors;
    std::vector<double> t;
    for (Eigen::Index i = 0; i < red.eigenvalues.size(); ++i) {
        double r = red.eigenvalues[i];
        if (!(r > rcut)) continue;
        for (Eigen::Index j = 0; j < sed.eigenvalues.size(); ++j) {
            double s = sed.eigenvalues[j];
            if (!(s > scut)) continue;
            double w = std::norm(W(i, j));
            if (w < 1e-300) continue;
            t.push_back(alpha * std::log(r) + (1.0 - alpha) * std::log(s) + std::log(w));
        }
    }
    double L = log_sum_exp(t);
    if (L == -kInf) return alpha < 1.0 ? kInf : -kInf;
    return (L - std::log(P.tr_rho)) / (alpha - 1.0);
}

// Umegaki relative entropy Tr rho (log rho - log sigma) / Tr rho.
inline double umegaki(const StatePair& P) {
    if (!P.supp_ok) return kInf;
    auto red = eig_of(P.rho);
    double rmax = red.eigenvalues.maxCoeff();
    double rcut = P.tol.tau_supp * std::max(rmax, 0.0);
    double tr_rho_log_rho = 0.0;
    for (Eigen::Index i = 0; i < red.eigenvalues.size(); ++i) {
        double r = red.eigenvalues[i];
        if (r > rcut) tr_rho_log_rho += r * std::log(r);
    }
    const auto& s = P.sigma_eig.eigenvalues;
    double smax = s.maxCoeff();
    double scut = P.tol.tau_supp * std::max(smax, 0.0);
    double tr_rho_log_sigma = 0.0;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s[j] > scut) tr_rho_log_sigma += P.rho_sb(j, j).real() * std::log(s[j]);
    return (tr_rho_log_rho - tr_rho_log_sigma) / P.tr_rho;
}

// Max-relative entropy log lambda_max(sigma^{-1/2} rho sigma^{-1/2}).
inline double d_max(const StatePair& P) {
    if (!P.supp_ok) return kInf;
    const auto& s = P.sigma_eig.eigenvalues;
    double smax = s.maxCoeff();
    double scut = P.tol.tau_supp * std::max(smax, 0.0);
    std::vector<Eigen::Index> supp;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s[j] > scut) supp.push_back(j);
    const auto k = static_cast<Eigen::Index>(supp.size());
    if (k == 0) return -kInf;
    Mat X(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            X(a, b) = P.rho_sb(supp[a], supp[b]) / std::sqrt(s[supp[a]] * s[supp[b]]);
    auto ed = eig_hermitian(X);
    double lmax = ed.eigenvalues.maxCoeff();
    return lmax > 0.0 ? std::log(lmax) : -kInf;
}

// Petz form below alpha = 1, sandwiched form above.
inline double renyi_recommended(const StatePair& P, double alpha) {
    if (alpha == 1.0) throw precondition_error("alpha=1: use umegaki");
    return alpha < 1.0 ? renyi_old(P, alpha) : renyi_new(P, alpha);
}

struct Povm {
    std::vector<Mat> elements;
};

inline Povm make_povm(std::vector<Mat> elements) {
    if (elements.empty()) throw precondition_error("make_povm: no elements");
    const auto d = elements[0].rows();
    Mat acc = Mat::Zero(d, d);
    for (const auto& M : elements) {
        if (M.rows() != d || M.cols() != d) throw precondition_error("make_povm: dimension mismatch");
        auto ed = eig_hermitian(M);
        double nrm = ed.eigenvalues.cwiseAbs().maxCoeff();
        if (ed.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, nrm))
            throw precondition_error("make_povm: element not positive semidefinite");
        acc += M;
    }
    double dev = (acc - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw precondition_error("make_povm: completeness violated by " + std::to_string(dev));
    return Povm{std::move(elements)};
}

// Classical F_alpha of the outcome distributions (p_x, q_x) of a measurement.
// Conventions: p_x = 0 terms vanish; p_x > 0 with q_x = 0 gives +inf above
// alpha = 1.
inline double f_alpha_measured(const StatePair& P, const Povm& M, double alpha) {
    if (!(alpha > 0.0)) throw precondition_error("f_alpha_measured: alpha must be > 0");
    std::vector<double> t;
    for (const auto& E : M.elements) {
        double p = std::max((P.rho.entries * E).trace().real(), 0.0);
        double q = std::max((P.sigma.entries * E).trace().real(), 0.0);
        if (p < 1e-300) continue;
        if (q < 1e-300) {
            if (alpha > 1.0) return kInf;
            if (alpha < 1.0) continue;
            t.push_back(std::log(p));
            continue;
        }
        t.push_back(alpha * std::log(p) + (1.0 - alpha) * std::log(q));
    }
    return log_sum_exp(t);
}

// exp F_alpha, with exp(-inf) = 0.
inline double q_new(const StatePair& P, double alpha) {
    if (!(alpha > 0.0)) throw precondition_error("q_new: alpha must be > 0");
    return std::exp(f_alpha(P, alpha));
}

// Uhlmann fidelity Tr |sqrt(rho) sqrt(sigma)|.
inline double fidelity(const StatePair& P) {
    const auto& s = P.sigma_eig.eigenvalues;
    const auto n = s.size();
    Eigen::VectorXd rt(n);
    for (Eigen::Index i = 0; i < n; ++i) rt[i] = std::sqrt(std::max(s[i], 0.0));
    Mat W = rt.asDiagonal() * P.rho_sb * rt.asDiagonal();
    auto ed = eig_hermitian(W);
    double f = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) f += std::sqrt(std::max(ed.eigenvalues[i], 0.0));
    return f;
}

// Best measured max-divergence max_x log(p_x / q_x) over two-outcome
// measurements; attained by the rank-one projector onto the top eigenvector
// of sigma^{-1/2} rho sigma^{-1/2}, so it equals d_max whenever the supports
// are compatible.
inline double measured_dmax(const StatePair& P) {
    if (!P.supp_ok) return kInf;
    const auto& s = P.sigma_eig.eigenvalues;
    double smax = s.maxCoeff();
    double scut = P.tol.tau_supp * std::max(smax, 0.0);
    std::vector<Eigen::Index> supp;
    for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s[j] > scut) supp.push_back(j);
    const auto k = static_cast<Eigen::Index>(supp.size());
    if (k == 0) return -kInf;
    Mat X(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b)
            X(a, b) = P.rho_sb(supp[a], supp[b]) / std::sqrt(s[supp[a]] * s[supp[b]]);
    auto ed = eig_hermitian(X);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(s.size());
    for (Eigen::Index a = 0; a < k; ++a)
        u[supp[a]] = ed.eigenvectors(a, k - 1) / std::sqrt(s[supp[a]]);
    u.normalize();
    double p1 = (u.adjoint() * P.rho_sb * u)(0).real();
    double q1 = (u.adjoint() * s.cast<std::complex<double>>().asDiagonal() * u)(0).real();
    double best = -kInf;
    if (p1 > 0.0 && q1 > 0.0) best = std::log(p1 / q1);
    double p2 = P.tr_rho - p1, q2 = P.tr_sigma - q1;
    if (p2 > 1e-15 && q2 > 1e-15) best = std::max(best, std::log(p2 / q2));
    return best;
}

}  // namespace renyi
