#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hypothesis.hpp"
#include "io.hpp"

namespace renyi {

// Machine-readable campaign result. worst_violation aggregates each
// sub-inequality as (raw violation - its declared slack), so passed is always
// worst_violation <= 0 for multi-part checks; single-inequality checks keep
// their natural slack. Every slack appears in parameters.
struct CheckReport {
    std::string check_name;
    bool passed = false;
    long trials = 0;
    double worst_violation = 0.0;
    double slack = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> parameters;  // values are JSON literals
};

inline std::string to_json(const CheckReport& r) {
    std::ostringstream os;
    os << "{\"check_name\": \"" << r.check_name << "\", \"passed\": " << (r.passed ? "true" : "false")
       << ", \"trials\": " << r.trials << ", \"worst_violation\": " << json_token(r.worst_violation)
       << ", \"seed\": " << r.seed << ", \"parameters\": {\"slack\": " << json_token(r.slack);
    for (const auto& kv : r.parameters) os << ", \"" << kv.first << "\": " << kv.second;
    os << "}}";
    return os.str();
}

// Fixed non-commuting qubit pair used by fixtures, CLI defaults, and trend
// targets: rho is diag(0.42, 0.58) rotated by 0.35 rad, sigma = diag(1/3, 2/3).
inline StatePair canonical_pair() {
    double c = std::cos(0.35), s = std::sin(0.35);
    double p0 = 0.42, p1 = 0.58;
    Mat rho(2, 2);
    rho << std::complex<double>(c * c * p0 + s * s * p1, 0.0),
        std::complex<double>(c * s * (p1 - p0), 0.0), std::complex<double>(c * s * (p1 - p0), 0.0),
        std::complex<double>(s * s * p0 + c * c * p1, 0.0);
    Mat sig(2, 2);
    sig << std::complex<double>(1.0 / 3.0, 0.0), std::complex<double>(0.0, 0.0),
        std::complex<double>(0.0, 0.0), std::complex<double>(2.0 / 3.0, 0.0);
    return make_state_pair(make_positive_operator(rho), make_positive_operator(sig));
}

inline StatePair commuting_pair() {
    Mat rho(2, 2);
    rho << std::complex<double>(0.5, 0.0), std::complex<double>(0.0, 0.0),
        std::complex<double>(0.0, 0.0), std::complex<double>(0.5, 0.0);
    Mat sig(2, 2);
    sig << std::complex<double>(1.0 / 3.0, 0.0), std::complex<double>(0.0, 0.0),
        std::complex<double>(0.0, 0.0), std::complex<double>(2.0 / 3.0, 0.0);
    return make_state_pair(make_positive_operator(rho), make_positive_operator(sig));
}

inline std::vector<double> default_alpha_grid() { return {0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 6.0}; }

inline std::vector<int> default_dims() { return {2, 3, 4}; }

// Rates strictly inside (0, r_max) where the converse exponent is finite and
// finite-n deviations can still shrink: half the relative entropy plus three
// interior points of (D, D_max).
inline std::vector<double> interior_r_grid(const ExponentContext& C) {
    double D = C.d_umegaki, W = C.d_max_val - C.d_umegaki;
    return {0.5 * D, D + 0.25 * W, D + 0.5 * W, D + 0.75 * W};
}

namespace detail {

inline PositiveOperator random_diagonal_density(int dim, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd w(dim);
    double tot = 0.0;
    for (int i = 0; i < dim; ++i) {
        w[i] = rng.uniform();
        tot += w[i];
    }
    Mat A = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) A(i, i) = w[i] / tot;
    return make_positive_operator(A);
}

inline Mat random_psd(int dim, std::uint64_t seed) {
    Rng rng(seed);
    Mat G(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i)
            G(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
    return G * G.adjoint();
}

inline Povm random_povm(int dim, int outcomes, std::uint64_t seed) {
    std::vector<Mat> E;
    E.reserve(static_cast<size_t>(outcomes));
    Mat S = Mat::Zero(dim, dim);
    for (int x = 0; x < outcomes; ++x) {
        E.push_back(random_psd(dim, mix_seed(seed, static_cast<std::uint64_t>(x) + 1)));
        S += E.back();
    }
    Mat Sih = frac_power_m(S, -0.5);
    std::vector<Mat> M;
    M.reserve(E.size());
    for (const auto& Ex : E) M.push_back(Sih * Ex * Sih);
    return make_povm(std::move(M));
}

// Measurement channel X -> sum_x Tr(M_x X) |x><x| in Kraus form.
inline Channel measurement_channel(const Povm& M) {
    const auto d = M.elements[0].rows();
    const auto k = static_cast<Eigen::Index>(M.elements.size());
    std::vector<Mat> kraus;
    for (Eigen::Index x = 0; x < k; ++x) {
        auto ed = eig_hermitian(M.elements[static_cast<size_t>(x)]);
        for (Eigen::Index i = 0; i < d; ++i) {
            double l = ed.eigenvalues[i];
            if (l <= 0.0) continue;
            Mat K = Mat::Zero(k, d);
            K.row(x) = std::sqrt(l) * ed.eigenvectors.col(i).adjoint();
            kraus.push_back(std::move(K));
        }
    }
    return make_channel(std::move(kraus));
}

// Pinching by the eigenprojectors of sigma as a Kraus channel.
inline Channel pinching_channel(const PositiveOperator& sigma, double tau_cluster) {
    auto ed = eig_of(sigma);
    double nrm = ed.eigenvalues.cwiseAbs().maxCoeff();
    auto starts = cluster_starts(ed.eigenvalues, tau_cluster, nrm);
    std::vector<Mat> kraus;
    for (size_t c = 0; c + 1 < starts.size(); ++c) {
        Mat P = Mat::Zero(sigma.dim(), sigma.dim());
        for (Eigen::Index i = starts[c]; i < starts[c + 1]; ++i)
            P += ed.eigenvectors.col(i) * ed.eigenvectors.col(i).adjoint();
        kraus.push_back(std::move(P));
    }
    return make_channel(std::move(kraus));
}

// Partial-trace channel over the second factor of dim_a x dim_b.
inline Channel partial_trace_channel(int dim_a, int dim_b) {
    std::vector<Mat> kraus;
    for (int j = 0; j < dim_b; ++j) {
        Mat K = Mat::Zero(dim_a, static_cast<Eigen::Index>(dim_a) * dim_b);
        for (int i = 0; i < dim_a; ++i) K(i, static_cast<Eigen::Index>(i) * dim_b + j) = 1.0;
        kraus.push_back(std::move(K));
    }
    return make_channel(std::move(kraus));
}

inline std::vector<double> filter_grid(const std::vector<double>& grid, double lo, double hi,
                                       bool drop_one) {
    std::vector<double> out;
    for (double a : grid)
        if (a >= lo && a <= hi && (!drop_one || a != 1.0)) out.push_back(a);
    return out;
}

// Classical F_alpha of an aligned pair of weight vectors, with the same
// support conventions as the measured functional.
inline double classical_f_alpha(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double alpha) {
    std::vector<double> t;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        double pv = std::max(p[i], 0.0), qv = std::max(q[i], 0.0);
        if (pv < 1e-300) continue;
        if (qv < 1e-300) {
            if (alpha > 1.0) return kInf;
            continue;
        }
        t.push_back(alpha * std::log(pv) + (1.0 - alpha) * std::log(qv));
    }
    return log_sum_exp(t);
}

}  // namespace detail

// Sandwiched at most Petz-type on every trial, equality on commuting
// instances, and a strictly positive gap on the fixed non-commuting witness.
inline CheckReport check_alt(long trials, const std::vector<int>& dims,
                             const std::vector<double>& alpha_grid, std::uint64_t seed) {
    if (trials < 1) throw precondition_error("check_alt: trials must be >= 1");
    auto grid = detail::filter_grid(alpha_grid, 1e-12, kInf, true);
    if (grid.empty() || dims.empty()) throw precondition_error("check_alt: empty grid or dims");
    double worst_rand = -kInf, worst_comm = 0.0, min_gap_nc = kInf;
    for (long t = 0; t < trials; ++t) {
        int dim = dims[static_cast<size_t>(t) % dims.size()];
        bool commuting = (t % 4 == 3);
        StatePair P =
            commuting
                ? make_state_pair(detail::random_diagonal_density(dim, mix_seed(seed, 2 * t)),
                                  detail::random_diagonal_density(dim, mix_seed(seed, 2 * t + 1)))
                : make_state_pair(random_density(dim, dim, mix_seed(seed, 2 * t)),
                                  random_density(dim, dim, mix_seed(seed, 2 * t + 1)));
        for (double a : grid) {
            double dn = renyi_new(P, a);
            double dp = renyi_old(P, a);
            if (commuting) {
                worst_comm = std::max(worst_comm, std::abs(dn - dp));
            } else {
                worst_rand = std::max(worst_rand, dn - dp);
                min_gap_nc = std::min(min_gap_nc, dp - dn);
            }
        }
    }
    auto W = canonical_pair();
    double witness_gap = renyi_old(W, 2.0) - renyi_new(W, 2.0);
    CheckReport R;
    R.check_name = "alt";
    R.trials = trials;
    R.seed = seed;
    R.slack = 0.0;
    R.worst_violation =
        std::max({worst_rand - 1e-9, worst_comm - 1e-10, 1e-6 - witness_gap});
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"dims", json_array(dims)},
                    {"alpha_grid", json_array(grid)},
                    {"slack_random", json_token(1e-9)},
                    {"slack_commuting", json_token(1e-10)},
                    {"witness_gap_floor", json_token(1e-6)},
                    {"witness_gap", json_token(witness_gap)},
                    {"min_gap_noncommuting", json_token(min_gap_nc)}};
    return R;
}

// Tr A^a B^a A^a >= Tr (ABA)^a for PSD pairs, violations measured relative to
// max(1, |left side|).
inline CheckReport check_lieb_thirring(long trials, const std::vector<int>& dims,
                                       const std::vector<double>& alpha_grid, std::uint64_t seed) {
    if (trials < 1) throw precondition_error("check_lieb_thirring: trials must be >= 1");
    auto grid = detail::filter_grid(alpha_grid, 1.0 + 1e-12, kInf, false);
    if (grid.empty() || dims.empty())
        throw precondition_error("check_lieb_thirring: empty grid or dims");
    double worst = -kInf;
    for (long t = 0; t < trials; ++t) {
        int dim = dims[static_cast<size_t>(t) % dims.size()];
        Mat A = detail::random_psd(dim, mix_seed(seed, 2 * t));
        Mat B = detail::random_psd(dim, mix_seed(seed, 2 * t + 1));
        Mat ABA = A * B * A;
        auto ed = eig_hermitian(ABA);
        for (double a : grid) {
            double lhs = (frac_power_m(A, 2.0 * a) * frac_power_m(B, a)).trace().real();
            double rhs = 0.0;
            for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
                if (ed.eigenvalues[i] > 0.0) rhs += std::pow(ed.eigenvalues[i], a);
            worst = std::max(worst, (rhs - lhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    CheckReport R;
    R.check_name = "lieb-thirring";
    R.trials = trials;
    R.seed = seed;
    R.slack = 1e-9;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"dims", json_array(dims)},
                    {"alpha_grid", json_array(grid)},
                    {"scale", "\"max(1, |Tr A^a B^a A^a|)\""}};
    return R;
}

// Data processing: neither divergence may grow under a channel. Cycles
// through random isometry-based channels, partial traces, pinching by sigma,
// and measurement channels.
inline CheckReport check_monotonicity(long trials, const std::vector<int>& dims,
                                      const std::vector<double>& alpha_grid, std::uint64_t seed) {
    if (trials < 1) throw precondition_error("check_monotonicity: trials must be >= 1");
    auto grid_new = detail::filter_grid(alpha_grid, 1.0, kInf, true);
    auto grid_old = detail::filter_grid(alpha_grid, 0.0, 2.0, true);
    if ((grid_new.empty() && grid_old.empty()) || dims.empty())
        throw precondition_error("check_monotonicity: empty grid or dims");
    double worst = -kInf;
    for (long t = 0; t < trials; ++t) {
        int dim = dims[static_cast<size_t>(t) % dims.size()];
        int kind = static_cast<int>(t % 4);
        int din = kind == 1 ? dim * 2 : dim;
        StatePair in = make_state_pair(random_density(din, din, mix_seed(seed, 3 * t)),
                                       random_density(din, din, mix_seed(seed, 3 * t + 1)));
        Channel F = [&] {
            switch (kind) {
                case 0:
                    return random_channel(din, din, 2, mix_seed(seed, 3 * t + 2));
                case 1:
                    return detail::partial_trace_channel(dim, 2);
                case 2:
                    return detail::pinching_channel(in.sigma, in.tol.tau_cluster);
                default:
                    return detail::measurement_channel(
                        detail::random_povm(din, din, mix_seed(seed, 3 * t + 2)));
            }
        }();
        StatePair out = make_state_pair(apply_channel(F, in.rho), apply_channel(F, in.sigma));
        for (double a : grid_new) {
            double vin = renyi_new(in, a);
            double vout = renyi_new(out, a);
            worst = std::max(worst, (vout - vin) / std::max(1.0, std::abs(vin)));
        }
        for (double a : grid_old) {
            double vin = renyi_old(in, a);
            double vout = renyi_old(out, a);
            worst = std::max(worst, (vout - vin) / std::max(1.0, std::abs(vin)));
        }
    }
    CheckReport R;
    R.check_name = "monotonicity";
    R.trials = trials;
    R.seed = seed;
    R.slack = 1e-9;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"dims", json_array(dims)},
                    {"alpha_grid_new", json_array(grid_new)},
                    {"alpha_grid_old", json_array(grid_old)},
                    {"channels", "[\"isometry\", \"partial-trace\", \"pinching\", \"measurement\"]"},
                    {"scale", "\"max(1, |input divergence|)\""}};
    return R;
}

// q_new of a mixture never exceeds the mixture of q_new values.
inline CheckReport check_joint_convexity(long trials, int mixture_size,
                                         const std::vector<int>& dims,
                                         const std::vector<double>& alpha_grid,
                                         std::uint64_t seed) {
    if (trials < 1 || mixture_size < 1)
        throw precondition_error("check_joint_convexity: trials and mixture_size must be >= 1");
    auto grid = detail::filter_grid(alpha_grid, 1.0 + 1e-12, kInf, false);
    if (grid.empty() || dims.empty())
        throw precondition_error("check_joint_convexity: empty grid or dims");
    double worst = -kInf;
    for (long t = 0; t < trials; ++t) {
        int dim = dims[static_cast<size_t>(t) % dims.size()];
        Rng wr(mix_seed(seed, 100000 + t));
        std::vector<double> w(static_cast<size_t>(mixture_size));
        double tot = 0.0;
        for (auto& x : w) {
            x = wr.uniform();
            tot += x;
        }
        for (auto& x : w) x /= tot;
        Mat mix_rho = Mat::Zero(dim, dim), mix_sig = Mat::Zero(dim, dim);
        std::vector<StatePair> parts;
        for (int i = 0; i < mixture_size; ++i) {
            auto r = random_density(dim, dim, mix_seed(seed, 2 * (t * mixture_size + i)));
            auto s = random_density(dim, dim, mix_seed(seed, 2 * (t * mixture_size + i) + 1));
            mix_rho += w[static_cast<size_t>(i)] * r.entries;
            mix_sig += w[static_cast<size_t>(i)] * s.entries;
            parts.push_back(make_state_pair(r, s));
        }
        StatePair mixed =
            make_state_pair(make_positive_operator(mix_rho), make_positive_operator(mix_sig));
        for (double a : grid) {
            double lhs = q_new(mixed, a);
            double rhs = 0.0;
            for (int i = 0; i < mixture_size; ++i)
                rhs += w[static_cast<size_t>(i)] * q_new(parts[static_cast<size_t>(i)], a);
            worst = std::max(worst, (lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
    }
    CheckReport R;
    R.check_name = "joint-convexity";
    R.trials = trials;
    R.seed = seed;
    R.slack = 1e-9;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"dims", json_array(dims)},
                    {"alpha_grid", json_array(grid)},
                    {"mixture_size", std::to_string(mixture_size)},
                    {"scale", "\"max(1, mixture of q values)\""}};
    return R;
}

// Pinched classical pair squeezes f_alpha from below within (alpha/n) log v_n
// and never exceeds it; the gap must shrink from the first to the last n.
inline CheckReport check_attainability(const ExponentContext& C,
                                       const std::vector<double>& alpha_grid,
                                       const std::vector<int>& n_list) {
    auto grid = detail::filter_grid(alpha_grid, 1.0 + 1e-12, kInf, false);
    if (grid.empty() || n_list.empty())
        throw precondition_error("check_attainability: empty grid or n list");
    std::vector<double> f_vals(grid.size());
    for (size_t ai = 0; ai < grid.size(); ++ai) f_vals[ai] = f_alpha(C.pair, grid[ai]);
    double worst = -kInf;
    std::vector<double> gap_first(grid.size(), 0.0), gap_last(grid.size(), 0.0);
    for (size_t ni = 0; ni < n_list.size(); ++ni) {
        int n = n_list[ni];
        auto pq = pinched_classical_pair(C, n);
        Eigen::VectorXd s1 = C.pair.sigma_eig.eigenvalues;
        Eigen::VectorXd sn = s1;
        for (int k = 1; k < n; ++k) {
            Eigen::VectorXd t(sn.size() * s1.size());
            for (Eigen::Index i = 0; i < sn.size(); ++i)
                for (Eigen::Index j = 0; j < s1.size(); ++j) t[i * s1.size() + j] = sn[i] * s1[j];
            sn = std::move(t);
        }
        std::sort(sn.data(), sn.data() + sn.size());
        double vn = static_cast<double>(
            detail::cluster_starts(sn, C.pair.tol.tau_cluster, sn[sn.size() - 1]).size() - 1);
        for (size_t ai = 0; ai < grid.size(); ++ai) {
            double alpha = grid[ai];
            double f = f_vals[ai];
            double fcl = detail::classical_f_alpha(pq.first, pq.second, alpha) / n;
            double lower = f - alpha / n * std::log(vn);
            worst = std::max(worst, lower - fcl);         // lower bound must sit below
            worst = std::max(worst, fcl - (f + 1e-9));    // upper bound with its slack folded in
            double gap = f - fcl;
            if (ni == 0) gap_first[ai] = gap;
            if (ni + 1 == n_list.size()) gap_last[ai] = gap;
        }
    }
    if (n_list.size() > 1)
        for (size_t ai = 0; ai < grid.size(); ++ai)
            worst = std::max(worst, gap_last[ai] - gap_first[ai]);
    CheckReport R;
    R.check_name = "attainability";
    R.trials = static_cast<long>(grid.size() * n_list.size());
    R.seed = 0;
    R.slack = 0.0;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"alpha_grid", json_array(grid)},
                    {"n_list", json_array(n_list)},
                    {"slack_upper", json_token(1e-9)},
                    {"gap_first", json_array(gap_first)},
                    {"gap_last", json_array(gap_last)}};
    return R;
}

// Success rates of optimal constrained tests against the strong-converse
// exponent: finite-n upper bound, shrinking deviation, a positive success
// floor below the relative entropy, the per-alpha finite-n bound, and a
// scaled-test probe above r_max.
inline CheckReport check_strong_converse(const ExponentContext& C,
                                         const std::vector<double>& r_grid,
                                         const std::vector<int>& n_list,
                                         const std::vector<double>& alpha_grid) {
    if (r_grid.empty() || n_list.empty())
        throw precondition_error("check_strong_converse: empty r grid or n list");
    auto grid_a = detail::filter_grid(alpha_grid, 1.0 + 1e-12, 6.0, false);
    const double floor = 0.5;
    const double probe_margin = 0.25;
    double worst = -kInf;
    for (double r : r_grid) {
        double hstar = converse_hoeffding(C, r);
        double dev_first = 0.0, dev_last = 0.0, min_succ = kInf;
        for (size_t ni = 0; ni < n_list.size(); ++ni) {
            int n = n_list[ni];
            auto opt = success_under_constraint(C, n, r, false);
            double rate = std::log(std::max(opt.value, 1e-300)) / n;
            worst = std::max(worst, rate - (-hstar) - 1e-9);
            for (double al : grid_a) {
                double bound = (al - 1.0) / al * (renyi_new(C.pair, al) - r);
                worst = std::max(worst, rate - bound - 1e-9);
            }
            double dev = std::abs(rate + hstar);
            if (ni == 0) dev_first = dev;
            if (ni + 1 == n_list.size()) dev_last = dev;
            min_succ = std::min(min_succ, opt.value);
        }
        if (hstar > 1e-12 && n_list.size() > 1) worst = std::max(worst, dev_last - dev_first);
        if (r <= C.d_umegaki) worst = std::max(worst, floor - min_succ);
    }
    double probe_r = C.r_max + 0.5;
    double probe_a = C.d_umegaki + (C.d_max_val - C.d_umegaki) / 6.0;
    int probe_n = n_list.back();
    auto probe = scaled_test(C, probe_n, probe_r, probe_a, false);
    double tr_rho_n = std::pow(C.pair.tr_rho, probe_n);
    double probe_rate_t2 = std::log(std::max(probe.beta_err, 1e-300)) / probe_n;
    double probe_rate_succ = std::log(std::max(tr_rho_n - probe.alpha_err, 1e-300)) / probe_n;
    worst = std::max(worst, probe_rate_t2 - (-probe_r) - 1e-9);
    worst = std::max(worst, -(probe_r - probe_a) - probe_margin - probe_rate_succ);
    CheckReport R;
    R.check_name = "strong-converse";
    R.trials = static_cast<long>(r_grid.size() * n_list.size());
    R.seed = 0;
    R.slack = 0.0;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"r_grid", json_array(r_grid)},
                    {"n_list", json_array(n_list)},
                    {"alpha_grid", json_array(grid_a)},
                    {"slack_bound", json_token(1e-9)},
                    {"success_floor_below_relative_entropy", json_token(floor)},
                    {"probe_r", json_token(probe_r)},
                    {"probe_a", json_token(probe_a)},
                    {"probe_n", std::to_string(probe_n)},
                    {"probe_success_margin", json_token(probe_margin)}};
    return R;
}

// Defining inequality of the cutoff rate at finite n over an interior rate
// grid, plus a minimality probe: lowering the cutoff by 1e-3 must break the
// asymptotic inequality somewhere.
inline CheckReport check_cutoff(const ExponentContext& C, const std::vector<double>& kappa_grid,
                                const std::vector<int>& n_list) {
    if (kappa_grid.empty() || n_list.empty())
        throw precondition_error("check_cutoff: empty kappa grid or n list");
    auto r_grid = interior_r_grid(C);
    std::vector<std::vector<double>> rates(r_grid.size());
    for (size_t ri = 0; ri < r_grid.size(); ++ri)
        for (int n : n_list) {
            auto opt = success_under_constraint(C, n, r_grid[ri], false);
            rates[ri].push_back(std::log(std::max(opt.value, 1e-300)) / n);
        }
    double worst = -kInf;
    std::vector<double> cutoffs;
    for (double kappa : kappa_grid) {
        auto cr = cutoff_rate(C, kappa);
        cutoffs.push_back(cr.c_kappa);
        for (size_t ri = 0; ri < r_grid.size(); ++ri)
            for (double rate : rates[ri])
                worst = std::max(worst, rate - (-kappa * (r_grid[ri] - cr.c_kappa)) - 1e-9);
        double probe_best = -kInf;
        std::vector<double> probe_rs = r_grid;
        probe_rs.push_back(cr.r_kappa);
        probe_rs.push_back(C.r_max + 1.0);
        for (double r : probe_rs) {
            if (!(r > 0.0)) continue;
            probe_best =
                std::max(probe_best, kappa * (r - (cr.c_kappa - 1e-3)) - converse_hoeffding(C, r));
        }
        if (!(probe_best > 0.0)) worst = std::max(worst, 1e-3);
    }
    CheckReport R;
    R.check_name = "cutoff";
    R.trials = static_cast<long>(kappa_grid.size() * r_grid.size() * n_list.size());
    R.seed = 0;
    R.slack = 0.0;
    R.worst_violation = worst;
    R.passed = R.worst_violation <= R.slack;
    R.parameters = {{"kappa_grid", json_array(kappa_grid)},
                    {"r_grid", json_array(r_grid)},
                    {"n_list", json_array(n_list)},
                    {"slack_bound", json_token(1e-9)},
                    {"cutoff_values", json_array(cutoffs)},
                    {"minimality_probe_delta", json_token(1e-3)}};
    return R;
}

// Exploratory scan for measured-versus-quantum gaps of F_alpha below
// alpha = 1/2, where no monotonicity direction is established. Never fails.
inline CheckReport check_measured_search(long trials, const std::vector<int>& dims,
                                         const std::vector<double>& alpha_low_grid,
                                         std::uint64_t seed) {
    if (trials < 1) throw precondition_error("check_measured_search: trials must be >= 1");
    auto grid = detail::filter_grid(alpha_low_grid, 1e-12, 0.5 - 1e-12, false);
    if (grid.empty() || dims.empty())
        throw precondition_error("check_measured_search: empty grid or dims");
    double max_gap = -kInf, min_gap = kInf;
    for (long t = 0; t < trials; ++t) {
        int dim = dims[static_cast<size_t>(t) % dims.size()];
        StatePair P = make_state_pair(random_density(dim, dim, mix_seed(seed, 3 * t)),
                                      random_density(dim, dim, mix_seed(seed, 3 * t + 1)));
        int outcomes = 2 + static_cast<int>(t % dim);
        Povm M = detail::random_povm(dim, outcomes, mix_seed(seed, 3 * t + 2));
        for (double a : grid) {
            double gap = f_alpha_measured(P, M, a) - f_alpha(P, a);
            max_gap = std::max(max_gap, gap);
            min_gap = std::min(min_gap, gap);
        }
    }
    CheckReport R;
    R.check_name = "measured-search";
    R.trials = trials;
    R.seed = seed;
    R.slack = 0.0;
    R.worst_violation = 0.0;
    R.passed = true;
    R.parameters = {{"dims", json_array(dims)},
                    {"alpha_grid", json_array(grid)},
                    {"mode", "\"exploratory\""},
                    {"max_observed_gap", json_token(max_gap)},
                    {"min_observed_gap", json_token(min_gap)}};
    return R;
}

}  // namespace renyi
