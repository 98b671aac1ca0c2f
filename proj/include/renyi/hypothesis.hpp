#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "exponents.hpp"

namespace renyi {

// Two-outcome test operator with its error probabilities against the n-fold
// pair. T is reported in the original basis and may be empty when the caller
// asked for rates only.
struct BinaryTest {
    Mat T;
    int n = 1;
    double alpha_err = 0.0;  // Tr rho_n (I - T)
    double beta_err = 0.0;   // Tr sigma_n T
};

namespace detail {

// n-fold tensor data held in the sigma eigenbasis, where sigma_n is diagonal.
struct TensorWork {
    Mat rho_n;
    Eigen::VectorXd sigma_n;  // diagonal entries
    int n = 1;
    Eigen::Index D = 1;
    double tr_rho_n = 1.0, tr_sigma_n = 1.0;
    bool basis_trivial = true;  // sigma eigenvectors form the identity
    const StatePair* pair = nullptr;
};

inline TensorWork build_tensor(const StatePair& P, int n, long long cap = default_tensor_cap()) {
    if (n < 1) throw precondition_error("build_tensor: n must be >= 1");
    long long D = 1;
    for (int k = 0; k < n; ++k) {
        D *= P.dim();
        if (D > cap) {
            double bytes = static_cast<double>(D) * static_cast<double>(D) * 16.0;
            std::ostringstream os;
            os << "tensor power: dimension " << P.dim() << "^" << n << " = " << D
               << " exceeds cap " << cap << " (about " << bytes / 1048576.0
               << " MiB dense); raise RENYI_MAX_DIM to override";
            throw precondition_error(os.str());
        }
    }
    TensorWork W;
    W.pair = &P;
    W.n = n;
    W.D = static_cast<Eigen::Index>(D);
    W.rho_n = P.rho_sb;
    for (int k = 1; k < n; ++k) W.rho_n = kron(W.rho_n, P.rho_sb);
    const auto& s = P.sigma_eig.eigenvalues;
    W.sigma_n = s;
    for (int k = 1; k < n; ++k) {
        Eigen::VectorXd next(W.sigma_n.size() * s.size());
        for (Eigen::Index i = 0; i < W.sigma_n.size(); ++i)
            for (Eigen::Index j = 0; j < s.size(); ++j) next[i * s.size() + j] = W.sigma_n[i] * s[j];
        W.sigma_n = std::move(next);
    }
    W.tr_rho_n = std::pow(P.tr_rho, n);
    W.tr_sigma_n = std::pow(P.tr_sigma, n);
    W.basis_trivial =
        (P.sigma_eig.eigenvectors - Mat::Identity(P.dim(), P.dim())).cwiseAbs().maxCoeff() < 1e-15;
    return W;
}

// Rotates a test from the sigma eigenbasis back to the caller's basis.
inline Mat to_original_basis(const TensorWork& W, const Mat& T) {
    if (W.basis_trivial) return T;
    Mat Vn = W.pair->sigma_eig.eigenvectors;
    for (int k = 1; k < W.n; ++k) Vn = kron(Vn, W.pair->sigma_eig.eigenvectors);
    return Vn * T * Vn.adjoint();
}

struct PencilEval {
    double succ = 0.0;  // Tr rho_n P over the positive part
    double beta = 0.0;  // Tr sigma_n P
    int rank = 0;
};

// Spectral test {rho_n - lambda sigma_n > 0} at log lambda = ll. Success and
// type-II weights come from the pencil eigenpairs directly; the projector is
// materialized only on request.
inline PencilEval pencil_eval(const TensorWork& W, double ll, double tau_eq,
                              Mat* proj_out = nullptr) {
    double lam = std::exp(ll);
    Mat pencil = W.rho_n;
    pencil.diagonal() -= (lam * W.sigma_n).cast<std::complex<double>>();
    auto ed = eig_hermitian(pencil);
    double nrm = ed.eigenvalues.cwiseAbs().maxCoeff();
    double thr = tau_eq * nrm;
    PencilEval out;
    std::vector<Eigen::Index> sel;
    for (Eigen::Index i = 0; i < W.D; ++i) {
        if (ed.eigenvalues[i] <= thr) continue;
        double b = 0.0;
        for (Eigen::Index j = 0; j < W.D; ++j) b += W.sigma_n[j] * std::norm(ed.eigenvectors(j, i));
        out.succ += ed.eigenvalues[i] + lam * b;
        out.beta += b;
        ++out.rank;
        sel.push_back(i);
    }
    if (proj_out) {
        if (sel.empty()) {
            *proj_out = Mat::Zero(W.D, W.D);
        } else {
            Mat Vs(W.D, static_cast<Eigen::Index>(sel.size()));
            for (size_t k = 0; k < sel.size(); ++k)
                Vs.col(static_cast<Eigen::Index>(k)) = ed.eigenvectors.col(sel[k]);
            *proj_out = Vs * Vs.adjoint();
        }
    }
    return out;
}

// Support projector of the n-fold rho in the sigma eigenbasis, built from the
// single-copy support.
inline Mat rho_support_projector(const TensorWork& W) {
    auto red = eig_hermitian(W.pair->rho_sb);
    double rmax = red.eigenvalues.maxCoeff();
    double cut = W.pair->tol.tau_supp * std::max(rmax, 0.0);
    Mat Q = Mat::Zero(W.pair->dim(), W.pair->dim());
    for (Eigen::Index i = 0; i < red.eigenvalues.size(); ++i)
        if (red.eigenvalues[i] > cut) Q += red.eigenvectors.col(i) * red.eigenvectors.col(i).adjoint();
    Mat Qn = Q;
    for (int k = 1; k < W.n; ++k) Qn = kron(Qn, Q);
    return Qn;
}

inline double diag_weight(const Eigen::VectorXd& w, const Mat& P) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) s += w[j] * P(j, j).real();
    return s;
}

}  // namespace detail

// Spectral Neyman-Pearson test {rho_n - e^{n a} sigma_n > 0}: the test
// vanishes identically once a reaches the max-relative entropy.
inline BinaryTest np_test(const ExponentContext& C, int n, double a, bool materialize = true) {
    auto W = detail::build_tensor(C.pair, n);
    Mat proj;
    auto pe = detail::pencil_eval(W, n * a, C.pair.tol.tau_eq, materialize ? &proj : nullptr);
    BinaryTest out;
    out.n = n;
    out.alpha_err = W.tr_rho_n - pe.succ;
    out.beta_err = pe.beta;
    if (materialize) out.T = detail::to_original_basis(W, proj);
    return out;
}

struct OptimalTest {
    double value = 0.0;  // beta_star or success, depending on the optimizer
    BinaryTest test;
};

namespace detail {

// Cached pencil sweep over log lambda for one TensorWork.
class PencilSweep {
  public:
    PencilSweep(const TensorWork& W, double tau_eq) : W_(W), tau_eq_(tau_eq) {}

    const PencilEval& at(double ll) {
        auto it = cache_.find(ll);
        if (it == cache_.end()) it = cache_.emplace(ll, pencil_eval(W_, ll, tau_eq_)).first;
        return it->second;
    }

  private:
    const TensorWork& W_;
    double tau_eq_;
    std::map<double, PencilEval> cache_;
};

}  // namespace detail

// Least type-II error among tests with type-I error at most eps, met exactly
// by convex interpolation between the two bracketing spectral tests.
inline OptimalTest type2_optimal(const ExponentContext& C, int n, double eps,
                                 bool materialize = true) {
    if (!(eps >= 0.0) || !(eps <= 1.0))
        throw precondition_error("type2_optimal: eps must lie in [0, 1]");
    auto W = detail::build_tensor(C.pair, n);
    BinaryTest t;
    t.n = n;
    if (eps >= 1.0) {
        t.alpha_err = W.tr_rho_n;
        t.beta_err = 0.0;
        if (materialize) t.T = Mat::Zero(W.D, W.D);
        return {0.0, std::move(t)};
    }
    if (eps == 0.0) {
        Mat Qn = detail::rho_support_projector(W);
        double succ = (W.rho_n * Qn).trace().real();
        double beta = detail::diag_weight(W.sigma_n, Qn);
        t.alpha_err = W.tr_rho_n - succ;
        t.beta_err = beta;
        if (materialize) t.T = detail::to_original_basis(W, Qn);
        return {beta, std::move(t)};
    }
    detail::PencilSweep sweep(W, C.pair.tol.tau_eq);
    auto alpha_at = [&](double ll) { return W.tr_rho_n - sweep.at(ll).succ; };
    double lo = -40.0 * n - 40.0, hi = 40.0 * n + 40.0;
    double glo = alpha_at(lo) - eps, ghi = alpha_at(hi) - eps;
    if (glo > 0.0) throw std::runtime_error("type2_optimal: left bracket failed");
    auto br = bracket_transition([&](double ll) { return alpha_at(ll) - eps; }, lo, hi, glo, ghi,
                                 1e-12, 200);
    Mat p_lo, p_hi;
    auto pe_lo = detail::pencil_eval(W, br.lo, C.pair.tol.tau_eq, materialize ? &p_lo : nullptr);
    auto pe_hi = detail::pencil_eval(W, br.hi, C.pair.tol.tau_eq, materialize ? &p_hi : nullptr);
    double a_lo = W.tr_rho_n - pe_lo.succ, a_hi = W.tr_rho_n - pe_hi.succ;
    double x = a_hi > a_lo ? (a_hi - eps) / (a_hi - a_lo) : 1.0;
    x = std::min(std::max(x, 0.0), 1.0);
    t.alpha_err = x * a_lo + (1.0 - x) * a_hi;
    t.beta_err = x * pe_lo.beta + (1.0 - x) * pe_hi.beta;
    if (materialize) t.T = detail::to_original_basis(W, Mat(x * p_lo + (1.0 - x) * p_hi));
    return {t.beta_err, std::move(t)};
}

// Largest success probability among tests whose type-II error meets the
// constraint beta <= e^{-n r}, met with equality via interpolation.
inline OptimalTest success_under_constraint(const ExponentContext& C, int n, double r,
                                            bool materialize = true) {
    if (!(r >= 0.0)) throw precondition_error("success_under_constraint: r must be >= 0");
    auto W = detail::build_tensor(C.pair, n);
    double target = std::exp(-static_cast<double>(n) * r);
    BinaryTest t;
    t.n = n;
    if (target >= W.tr_sigma_n) {
        t.alpha_err = 0.0;
        t.beta_err = W.tr_sigma_n;
        if (materialize) t.T = Mat::Identity(W.D, W.D);
        return {W.tr_rho_n, std::move(t)};
    }
    Mat Qn = detail::rho_support_projector(W);
    double succ0 = (W.rho_n * Qn).trace().real();
    double beta0 = detail::diag_weight(W.sigma_n, Qn);
    if (target >= beta0) {
        // the constraint is not binding on the support; pad with the kernel
        double y = (target - beta0) / (W.tr_sigma_n - beta0);
        t.alpha_err = (1.0 - y) * (W.tr_rho_n - succ0);
        t.beta_err = beta0 + y * (W.tr_sigma_n - beta0);
        if (materialize) {
            Mat T = Qn + y * (Mat::Identity(W.D, W.D) - Qn);
            t.T = detail::to_original_basis(W, T);
        }
        return {W.tr_rho_n - t.alpha_err, std::move(t)};
    }
    detail::PencilSweep sweep(W, C.pair.tol.tau_eq);
    auto beta_at = [&](double ll) { return sweep.at(ll).beta; };
    double lo = -40.0 * n - 40.0, hi = 40.0 * n + 40.0;
    double glo = target - beta_at(lo), ghi = target - beta_at(hi);
    if (glo > 0.0) throw std::runtime_error("success_under_constraint: left bracket failed");
    auto br = bracket_transition([&](double ll) { return target - beta_at(ll); }, lo, hi, glo, ghi,
                                 1e-12, 200);
    Mat p_lo, p_hi;
    auto pe_lo = detail::pencil_eval(W, br.lo, C.pair.tol.tau_eq, materialize ? &p_lo : nullptr);
    auto pe_hi = detail::pencil_eval(W, br.hi, C.pair.tol.tau_eq, materialize ? &p_hi : nullptr);
    double x = pe_lo.beta > pe_hi.beta ? (target - pe_hi.beta) / (pe_lo.beta - pe_hi.beta) : 1.0;
    x = std::min(std::max(x, 0.0), 1.0);
    double succ = x * pe_lo.succ + (1.0 - x) * pe_hi.succ;
    t.alpha_err = W.tr_rho_n - succ;
    t.beta_err = x * pe_lo.beta + (1.0 - x) * pe_hi.beta;
    if (materialize) t.T = detail::to_original_basis(W, Mat(x * p_lo + (1.0 - x) * p_hi));
    return {succ, std::move(t)};
}

// Spectral test scaled by e^{-n(r - a - phi(a))}; requires r >= a + phi(a) so
// the scale stays at most one.
inline BinaryTest scaled_test(const ExponentContext& C, int n, double r, double a,
                              bool materialize = true) {
    double pv = phi(C, a);
    if (!std::isfinite(pv))
        throw precondition_error("scaled_test: a exceeds the max-relative entropy");
    double c = r - a - pv;
    if (c < -1e-12)
        throw precondition_error("scaled_test: need r >= a + phi(a), otherwise the scale exceeds 1");
    double scale = std::exp(-static_cast<double>(n) * std::max(c, 0.0));
    BinaryTest base = np_test(C, n, a, materialize);
    double tr_rho_n = std::pow(C.pair.tr_rho, n);
    BinaryTest out;
    out.n = n;
    out.alpha_err = tr_rho_n - scale * (tr_rho_n - base.alpha_err);
    out.beta_err = scale * base.beta_err;
    if (materialize) out.T = scale * base.T;
    return out;
}

// Joint spectrum of (pinched rho_n, sigma_n): block-diagonalizes rho_n over
// the eigenvalue clusters of sigma_n and returns the aligned classical pair.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> pinched_classical_pair(const ExponentContext& C,
                                                                          int n) {
    auto W = detail::build_tensor(C.pair, n);
    std::vector<Eigen::Index> order(static_cast<size_t>(W.D));
    for (Eigen::Index i = 0; i < W.D; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return W.sigma_n[a] < W.sigma_n[b]; });
    Eigen::VectorXd sorted(W.D);
    for (Eigen::Index i = 0; i < W.D; ++i) sorted[i] = W.sigma_n[order[static_cast<size_t>(i)]];
    double nrm = sorted.cwiseAbs().maxCoeff();
    auto starts = detail::cluster_starts(sorted, C.pair.tol.tau_cluster, nrm);
    Eigen::VectorXd p(W.D), q(W.D);
    Eigen::Index pos = 0;
    for (size_t c = 0; c + 1 < starts.size(); ++c) {
        Eigen::Index a = starts[c], b = starts[c + 1];
        const auto m = b - a;
        Mat block(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                block(i, j) = W.rho_n(order[static_cast<size_t>(a + i)], order[static_cast<size_t>(a + j)]);
        auto ed = eig_hermitian(block);
        for (Eigen::Index k = 0; k < m; ++k) {
            p[pos] = ed.eigenvalues[k];
            double qv = 0.0;
            for (Eigen::Index j = 0; j < m; ++j)
                qv += sorted[a + j] * std::norm(ed.eigenvectors(j, k));
            q[pos] = qv;
            ++pos;
        }
    }
    return {std::move(p), std::move(q)};
}

struct RateRow {
    int n = 1;
    double rate_success = 0.0;  // (1/n) log Tr rho_n T
    double rate_type2 = 0.0;    // (1/n) log Tr sigma_n T
    double dev_success = 0.0;   // distance below the -phi(a) limit
    double dev_type2 = 0.0;     // distance below the -(phi(a)+a) limit
    bool ok_quotient = true;    // success >= e^{n a} * beta
    bool ok_success = true;     // rate_success <= -phi(a)
    bool ok_type2 = true;       // rate_type2 <= -(phi(a)+a)
};

struct RateTable {
    double a = 0.0;
    double phi_a = 0.0;
    double limit_success = 0.0;  // -phi(a)
    double limit_type2 = 0.0;    // -(phi(a)+a)
    std::vector<RateRow> rows;
};

// Finite-n rates of the spectral test at threshold a against their common
// limits; a must lie strictly between the relative entropy and the
// max-relative entropy so both rates are finite and nontrivial.
inline RateTable exponent_convergence(const ExponentContext& C, double a,
                                      const std::vector<int>& n_list) {
    if (!(a > C.d_umegaki) || !(a < C.d_max_val))
        throw precondition_error(
            "exponent_convergence: a must lie strictly between the relative entropy and the "
            "max-relative entropy");
    if (n_list.empty()) throw precondition_error("exponent_convergence: empty n list");
    RateTable tab;
    tab.a = a;
    tab.phi_a = phi(C, a);
    tab.limit_success = -tab.phi_a;
    tab.limit_type2 = -(tab.phi_a + a);
    for (int n : n_list) {
        auto W = detail::build_tensor(C.pair, n);
        auto pe = detail::pencil_eval(W, n * a, C.pair.tol.tau_eq);
        RateRow row;
        row.n = n;
        double succ = std::max(pe.succ, 1e-300), beta = std::max(pe.beta, 1e-300);
        row.rate_success = std::log(succ) / n;
        row.rate_type2 = std::log(beta) / n;
        row.dev_success = tab.limit_success - row.rate_success;
        row.dev_type2 = tab.limit_type2 - row.rate_type2;
        double lam = std::exp(static_cast<double>(n) * a);
        row.ok_quotient = pe.succ >= lam * pe.beta - 1e-9 * std::max(1.0, lam * pe.beta);
        row.ok_success = row.rate_success <= tab.limit_success + 1e-9;
        row.ok_type2 = row.rate_type2 <= tab.limit_type2 + 1e-9;
        tab.rows.push_back(row);
    }
    return tab;
}

}  // namespace renyi
