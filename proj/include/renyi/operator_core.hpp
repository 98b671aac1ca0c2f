#pragma once

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace renyi {

using Mat = Eigen::MatrixXcd;

struct ToleranceConfig {
    double tau_supp = 1e-12;     // support cut, relative to the largest eigenvalue
    double tau_cluster = 1e-10;  // eigenvalue clustering gap, relative to the norm
    double tau_eq = 1e-10;       // spectral zero threshold, relative to the norm
};

inline void validate(const ToleranceConfig& t) {
    for (double v : {t.tau_supp, t.tau_cluster, t.tau_eq}) {
        if (!(v > 0.0) || !(v < 1e-3))
            throw precondition_error("ToleranceConfig: thresholds must lie in (0, 1e-3)");
    }
}

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    Mat eigenvectors;             // orthonormal columns, matching order
};

// Hermitian eigensolver. Rejects inputs whose asymmetry exceeds
// 1e-12 * max(1, max|entry|), reporting the worst offender, then solves the
// symmetrized matrix. Real-valued inputs take the faster real-symmetric path.
inline EigenDecomposition eig_hermitian(const Mat& A) {
    const auto n = A.rows();
    if (A.cols() != n) throw precondition_error("eig_hermitian: matrix not square");
    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    if (n == 0) return out;
    double scale = A.cwiseAbs().maxCoeff();
    double asym = (A - A.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "eig_hermitian: input not Hermitian, max asymmetry " << asym;
        throw precondition_error(os.str());
    }
    Mat H = 0.5 * (A + A.adjoint());
    lapack_int info;
    if (H.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::MatrixXd R = H.real();
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), R.data(),
                              static_cast<lapack_int>(n), out.eigenvalues.data());
        out.eigenvectors = R.cast<std::complex<double>>();
    } else {
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), H.data(),
                              static_cast<lapack_int>(n), out.eigenvalues.data());
        out.eigenvectors = std::move(H);
    }
    if (info != 0)
        throw std::runtime_error("eig_hermitian: LAPACK solver failed, info = " + std::to_string(info));
    return out;
}

// Hermitian matrix with an optional cached eigendecomposition. Instances are
// value types; treat them as immutable once built.
struct PositiveOperator {
    Mat entries;
    std::optional<EigenDecomposition> eig_cache;

    int dim() const { return static_cast<int>(entries.rows()); }
};

inline EigenDecomposition eig_of(const PositiveOperator& A) {
    if (A.eig_cache) return *A.eig_cache;
    return eig_hermitian(A.entries);
}

// Validates Hermiticity, stores the symmetrized matrix, and optionally checks
// positivity (min eigenvalue >= -1e-10 * max eigenvalue magnitude).
inline PositiveOperator make_positive_operator(const Mat& A, bool with_eig = false,
                                               bool check_psd = false) {
    PositiveOperator op;
    auto ed = eig_hermitian(A);  // also performs the asymmetry check
    op.entries = 0.5 * (A + A.adjoint());
    if (check_psd && ed.eigenvalues.size() > 0) {
        double top = ed.eigenvalues.cwiseAbs().maxCoeff();
        if (ed.eigenvalues.minCoeff() < -1e-10 * std::max(1.0, top))
            throw precondition_error("make_positive_operator: matrix is not positive semidefinite");
    }
    if (with_eig) op.eig_cache = std::move(ed);
    return op;
}

// A^p with eigenvalues at or below tau_supp * lambda_max zeroed for every p,
// so negative and zero powers act on the support only. A^0 is the support
// projector.
inline Mat frac_power_m(const Mat& A, double p, double tau_supp = 1e-12) {
    auto ed = eig_hermitian(A);
    const auto n = ed.eigenvalues.size();
    double lmax = n > 0 ? ed.eigenvalues.maxCoeff() : 0.0;
    double cut = tau_supp * std::max(lmax, 0.0);
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double l = ed.eigenvalues[i];
        f[i] = l > cut && l > 0.0 ? std::pow(l, p) : 0.0;
    }
    return ed.eigenvectors * f.asDiagonal() * ed.eigenvectors.adjoint();
}

inline PositiveOperator frac_power(const PositiveOperator& A, double p, double tau_supp = 1e-12) {
    return PositiveOperator{frac_power_m(A.entries, p, tau_supp), std::nullopt};
}

// Tr A_+  (sum of the strictly positive eigenvalues).
inline double positive_part_trace(const Mat& A) {
    auto ed = eig_hermitian(A);
    double s = 0.0;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        if (ed.eigenvalues[i] > 0.0) s += ed.eigenvalues[i];
    return s;
}

struct SpectralSplit {
    Mat p_pos;   // projector onto eigenvalues above tau_eq * ||A||
    Mat p_zero;  // projector onto |eigenvalue| <= tau_eq * ||A||
};

inline SpectralSplit spectral_projector_pos(const Mat& A, double tau_eq = 1e-10) {
    auto ed = eig_hermitian(A);
    const auto n = ed.eigenvalues.size();
    double nrm = n > 0 ? ed.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    double thr = tau_eq * nrm;
    Mat p_pos = Mat::Zero(n, n), p_zero = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto v = ed.eigenvectors.col(i);
        if (ed.eigenvalues[i] > thr)
            p_pos += v * v.adjoint();
        else if (std::abs(ed.eigenvalues[i]) <= thr)
            p_zero += v * v.adjoint();
    }
    return {std::move(p_pos), std::move(p_zero)};
}

namespace detail {

// Greedy clustering of ascending values: a new cluster starts where the gap
// to the previous value reaches tau * scale. Returns the start index of each
// cluster plus a terminating size entry.
inline std::vector<Eigen::Index> cluster_starts(const Eigen::VectorXd& ascending, double tau,
                                                double scale) {
    std::vector<Eigen::Index> starts;
    const auto n = ascending.size();
    double gap = tau * std::max(scale, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == 0 || ascending[i] - ascending[i - 1] >= gap) starts.push_back(i);
    }
    starts.push_back(n);
    return starts;
}

}  // namespace detail

// Number of distinct eigenvalues of A after merging gaps below
// tau_cluster * ||A||.
inline int distinct_eigenvalue_count(const Mat& A, double tau_cluster = 1e-10) {
    auto ed = eig_hermitian(A);
    if (ed.eigenvalues.size() == 0) return 0;
    double nrm = ed.eigenvalues.cwiseAbs().maxCoeff();
    return static_cast<int>(detail::cluster_starts(ed.eigenvalues, tau_cluster, nrm).size()) - 1;
}

// Pinching of B by the eigenprojectors of A: blocks of B between distinct
// eigenspaces of A are zeroed in A's eigenbasis.
inline Mat pinch(const Mat& B, const Mat& A, double tau_cluster = 1e-10) {
    if (B.rows() != A.rows() || B.cols() != A.cols())
        throw precondition_error("pinch: dimension mismatch");
    auto ed = eig_hermitian(A);
    const auto n = ed.eigenvalues.size();
    if (n == 0) return B;
    double nrm = ed.eigenvalues.cwiseAbs().maxCoeff();
    auto starts = detail::cluster_starts(ed.eigenvalues, tau_cluster, nrm);
    Mat Bt = ed.eigenvectors.adjoint() * B * ed.eigenvectors;
    Mat out = Mat::Zero(n, n);
    for (size_t c = 0; c + 1 < starts.size(); ++c) {
        Eigen::Index a = starts[c], b = starts[c + 1];
        out.block(a, a, b - a, b - a) = Bt.block(a, a, b - a, b - a);
    }
    return ed.eigenvectors * out * ed.eigenvectors.adjoint();
}

// Tensor-power dimension cap; RENYI_MAX_DIM overrides the 4096 default.
inline long long default_tensor_cap() {
    if (const char* e = std::getenv("RENYI_MAX_DIM")) {
        char* end = nullptr;
        long long v = std::strtoll(e, &end, 10);
        if (end != e && v > 0) return v;
    }
    return 4096;
}

inline Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

inline Mat tensor_power_m(const Mat& A, int n, long long cap = default_tensor_cap()) {
    if (n < 1) throw precondition_error("tensor_power: n must be >= 1");
    long long d = A.rows(), D = 1;
    for (int k = 0; k < n; ++k) {
        D *= d;
        if (D > cap) {
            double bytes = static_cast<double>(cap + 1) * static_cast<double>(cap + 1) * 16.0;
            std::ostringstream os;
            os << "tensor_power: dimension " << d << "^" << n << " exceeds cap " << cap
               << " (would need at least " << bytes / 1048576.0
               << " MiB dense); raise RENYI_MAX_DIM to override";
            throw precondition_error(os.str());
        }
    }
    Mat out = A;
    for (int k = 1; k < n; ++k) out = kron(out, A);
    return out;
}

inline PositiveOperator tensor_power(const PositiveOperator& A, int n,
                                     long long cap = default_tensor_cap()) {
    return PositiveOperator{tensor_power_m(A.entries, n, cap), std::nullopt};
}

// Checks supp rho <= supp sigma: the compression of rho onto sigma's kernel
// must have norm at most tau_supp * Tr rho.
inline bool support_contained(const PositiveOperator& rho, const PositiveOperator& sigma,
                              double tau_supp = 1e-12) {
    if (rho.dim() != sigma.dim()) throw precondition_error("support_contained: dimension mismatch");
    auto ed = eig_of(sigma);
    const auto n = ed.eigenvalues.size();
    double smax = n > 0 ? ed.eigenvalues.maxCoeff() : 0.0;
    double cut = tau_supp * std::max(smax, 0.0);
    Mat ker = Mat::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (ed.eigenvalues[i] > cut) ker -= ed.eigenvectors.col(i) * ed.eigenvectors.col(i).adjoint();
    Mat comp = ker * rho.entries * ker;
    auto ce = eig_hermitian(comp);
    double nrm = ce.eigenvalues.size() > 0 ? ce.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    double tr = rho.entries.trace().real();
    return nrm <= tau_supp * std::max(tr, 1e-300);
}

// Ginibre-induced random density matrix of the given rank.
inline PositiveOperator random_density(int dim, int rank, std::uint64_t seed) {
    if (dim < 1 || rank < 1 || rank > dim)
        throw precondition_error("random_density: need 1 <= rank <= dim");
    Rng rng(seed);
    Mat G(dim, rank);
    for (Eigen::Index j = 0; j < rank; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) {
            double re = rng.gaussian(), im = rng.gaussian();
            G(i, j) = std::complex<double>(re, im) / std::sqrt(2.0);
        }
    Mat A = G * G.adjoint();
    A /= A.trace().real();
    return make_positive_operator(A);
}

// Completely positive trace-preserving map in Kraus form.
struct Channel {
    std::vector<Mat> kraus;
};

inline Channel make_channel(std::vector<Mat> kraus) {
    if (kraus.empty()) throw precondition_error("make_channel: no Kraus operators");
    const auto din = kraus[0].cols();
    Mat acc = Mat::Zero(din, din);
    for (const auto& K : kraus) {
        if (K.cols() != din) throw precondition_error("make_channel: input dimension mismatch");
        acc += K.adjoint() * K;
    }
    double dev = (acc - Mat::Identity(din, din)).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw precondition_error("make_channel: Kraus completeness violated by " + std::to_string(dev));
    return Channel{std::move(kraus)};
}

// Random channel from a Haar-ish isometry: QR of a Ginibre block of shape
// (dim_out * kraus_count) x dim_in, split into kraus_count row blocks.
inline Channel random_channel(int dim_in, int dim_out, int kraus_count, std::uint64_t seed) {
    if (dim_in < 1 || dim_out < 1 || kraus_count < 1)
        throw precondition_error("random_channel: dimensions must be positive");
    long long m = static_cast<long long>(dim_out) * kraus_count;
    if (m < dim_in)
        throw precondition_error("random_channel: dim_out * kraus_count must be >= dim_in");
    Rng rng(seed);
    Mat G(m, dim_in);
    for (Eigen::Index j = 0; j < dim_in; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            G(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat W = qr.householderQ() * Mat::Identity(m, dim_in);
    std::vector<Mat> kraus;
    kraus.reserve(kraus_count);
    for (int j = 0; j < kraus_count; ++j)
        kraus.push_back(W.middleRows(static_cast<Eigen::Index>(j) * dim_out, dim_out));
    return make_channel(std::move(kraus));
}

inline PositiveOperator apply_channel(const Channel& F, const PositiveOperator& A) {
    const auto dout = F.kraus[0].rows();
    Mat out = Mat::Zero(dout, dout);
    for (const auto& K : F.kraus) out += K * A.entries * K.adjoint();
    return PositiveOperator{std::move(out), std::nullopt};
}

}  // namespace renyi
