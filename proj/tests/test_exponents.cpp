#include <catch2/catch_amalgamated.hpp>

#include <renyi/verify.hpp>

#include "oracles.hpp"

using namespace renyi;
using Catch::Approx;

namespace {

const ExponentContext& ctx() {
    static ExponentContext C = make_context(canonical_pair());
    return C;
}

ExponentContext random_ctx(std::uint64_t seed, int dim = 3) {
    return make_context(make_state_pair(random_density(dim, dim, mix_seed(seed, 0)),
                                        random_density(dim, dim, mix_seed(seed, 1))));
}

}  // namespace

TEST_CASE("psi vanishes at zero with slope equal to the relative entropy") {
    const auto& C = ctx();
    REQUIRE(psi(C, 0.0) == Approx(0.0).margin(1e-12));
    REQUIRE(derivative([&](double s) { return psi(C, s); }, 0.0) ==
            Approx(C.d_umegaki).margin(1e-7));
    REQUIRE_THROWS_AS(psi(C, -1.0), precondition_error);
}

TEST_CASE("psi is convex and grows like the max-relative entropy") {
    const auto& C = ctx();
    for (double s : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        double mid = psi(C, s);
        REQUIRE(0.5 * (psi(C, s - 0.05) + psi(C, s + 0.05)) >= mid - 1e-12);
    }
    double s_big = 1e6;
    REQUIRE(psi(C, s_big) / s_big == Approx(C.a_max).margin(1e-4));
    REQUIRE(C.a_max == Approx(d_max(C.pair)).margin(1e-12));
}

TEST_CASE("tilde psi is the compressed transform with matching endpoints") {
    const auto& C = ctx();
    REQUIRE(tilde_psi(C, 0.0) == 0.0);
    for (double u : {0.1, 0.4, 0.7, 0.9}) {
        double s = u / (1.0 - u);
        REQUIRE(tilde_psi(C, u) == Approx((1.0 - u) * psi(C, s)).margin(1e-12));
    }
    REQUIRE_THROWS_AS(tilde_psi(C, 1.0), precondition_error);
    for (double u : {0.3, 0.5, 0.8})
        REQUIRE(0.5 * (tilde_psi(C, u - 0.02) + tilde_psi(C, u + 0.02)) >=
                tilde_psi(C, u) - 1e-12);
}

TEST_CASE("phi matches a brute grid Legendre transform") {
    const auto& C = ctx();
    REQUIRE(phi(C, 0.5 * C.d_umegaki) == 0.0);
    REQUIRE(phi(C, C.d_umegaki) == 0.0);
    REQUIRE(phi(C, C.a_max + 1e-6) == kInf);
    for (double frac : {0.2, 0.5, 0.8}) {
        double a = C.d_umegaki + frac * (C.a_max - C.d_umegaki);
        REQUIRE(phi(C, a) == Approx(oracle::phi_grid(C, a)).margin(1e-6));
    }
    double prev = -1.0;
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        double a = C.d_umegaki + frac * (C.a_max - C.d_umegaki);
        double v = phi(C, a);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("the boundary value of phi closes the finite domain") {
    const auto& C = ctx();
    REQUIRE(C.r_max == Approx(C.phi_amax + C.a_max).margin(1e-12));
    double below = phi(C, C.a_max - 1e-7);
    REQUIRE(below <= C.phi_amax + 1e-4);
    REQUIRE(C.phi_amax - below < 0.05);
    REQUIRE(C.phi_amax > 0.0);
}

TEST_CASE("solve_ar inverts the rate map") {
    const auto& C = ctx();
    for (double frac : {0.2, 0.5, 0.9}) {
        double r = C.d_umegaki + frac * (C.r_max - C.d_umegaki);
        double ar = solve_ar(C, r);
        REQUIRE(phi(C, ar) + ar == Approx(r).margin(1e-7));
    }
    REQUIRE(solve_ar(C, 0.5 * C.d_umegaki) == Approx(0.5 * C.d_umegaki).margin(1e-12));
    REQUIRE_THROWS_AS(solve_ar(C, C.r_max + 0.1), precondition_error);
    REQUIRE_THROWS_AS(solve_ar(C, 0.0), precondition_error);
}

TEST_CASE("hoeffding exponent matches a brute alpha grid and vanishes beyond D") {
    const auto& C = ctx();
    REQUIRE(hoeffding(C, C.d_umegaki) == Approx(0.0).margin(1e-8));
    REQUIRE(hoeffding(C, C.d_umegaki * 2.0) == 0.0);
    double prev = kInf;
    for (double r : {0.2, 0.5, 0.8}) {
        double v = hoeffding(C, r * C.d_umegaki);
        REQUIRE(v == Approx(oracle::hoeffding_grid(C, r * C.d_umegaki)).margin(1e-6));
        REQUIRE(v > 0.0);
        REQUIRE(v <= prev);
        prev = v;
    }
}

TEST_CASE("converse hoeffding agrees with grid, branch, and minimax routes") {
    const auto& C = ctx();
    for (double r = 0.0; r <= C.r_max + 1.0; r += (C.r_max + 1.0) / 16.0) {
        double v = converse_hoeffding(C, r);
        REQUIRE(v == Approx(oracle::converse_hoeffding_grid(C, r)).margin(1e-6));
        REQUIRE(v == Approx(oracle::converse_hoeffding_branch(C, r)).margin(1e-6));
        REQUIRE(v == Approx(oracle::converse_hoeffding_minimax(C, r)).margin(1e-6));
    }
    REQUIRE(converse_hoeffding(C, 0.9 * C.d_umegaki) <= 1e-9);
    REQUIRE(converse_hoeffding(C, C.r_max + 0.5) ==
            Approx(C.r_max + 0.5 - C.a_max).margin(1e-8));
}

TEST_CASE("the three converse routes agree on random pairs too") {
    for (std::uint64_t seed : {5u, 9u}) {
        auto C = random_ctx(seed);
        for (double frac : {0.3, 0.9, 1.4}) {
            double r = frac * C.r_max / 1.5;
            double v = converse_hoeffding(C, r);
            REQUIRE(v == Approx(oracle::converse_hoeffding_branch(C, r)).margin(1e-6));
            REQUIRE(v == Approx(oracle::converse_hoeffding_minimax(C, r)).margin(1e-6));
        }
    }
}

TEST_CASE("cutoff rates touch the converse exponent at the predicted rate") {
    const auto& C = ctx();
    for (double kappa : {0.25, 0.5, 0.75}) {
        auto cr = cutoff_rate(C, kappa);
        REQUIRE(cr.c_kappa == Approx(renyi_new(C.pair, 1.0 / (1.0 - kappa))).margin(1e-12));
        double touch = converse_hoeffding(C, cr.r_kappa);
        REQUIRE(touch == Approx(kappa * (cr.r_kappa - cr.c_kappa)).margin(1e-6));
        for (double r : {0.1, 0.4, 0.9, 1.3})
            REQUIRE(converse_hoeffding(C, r) >= kappa * (r - cr.c_kappa) - 1e-9);
        REQUIRE(touch < kappa * (cr.r_kappa - (cr.c_kappa - 1e-3)));
    }
    REQUIRE_THROWS_AS(cutoff_rate(C, 0.0), precondition_error);
    REQUIRE_THROWS_AS(cutoff_rate(C, 1.0), precondition_error);
}

TEST_CASE("bipolar transform recovers tilde psi on a fine rate grid") {
    const auto& C = ctx();
    std::vector<double> r_grid;
    for (double r = 0.0; r <= C.r_max + 1.0; r += 0.001) r_grid.push_back(r);
    for (double u : {0.2, 0.5, 0.8})
        REQUIRE(bipolar_check(C, u, r_grid) == Approx(tilde_psi(C, u)).margin(1e-4));
    REQUIRE_THROWS_AS(bipolar_check(C, 0.5, {}), precondition_error);
}

TEST_CASE("context construction validates its inputs") {
    auto P = canonical_pair();
    REQUIRE_THROWS_AS(make_context(make_state_pair(P.rho, P.rho)), precondition_error);
    Mat unnorm = 2.0 * P.rho.entries;
    REQUIRE_THROWS_AS(make_context(make_state_pair(make_positive_operator(unnorm), P.sigma)),
                      precondition_error);
    Mat r = Mat::Zero(2, 2), s = Mat::Zero(2, 2);
    r(0, 0) = 1.0;
    s(0, 0) = 0.5;
    s(1, 1) = 0.5;
    auto pure = make_state_pair(make_positive_operator(s), make_positive_operator(r));
    REQUIRE_FALSE(pure.supp_ok);
    REQUIRE_THROWS_AS(make_context(pure), precondition_error);
}

TEST_CASE("frozen canonical pair invariants") {
    const auto& C = ctx();
    REQUIRE(C.d_umegaki == Approx(0.029335).margin(1e-5));
    REQUIRE(C.d_max_val == Approx(0.292975).margin(1e-5));
    REQUIRE(C.phi_amax == Approx(0.773844).margin(1e-4));
    REQUIRE(C.r_max == Approx(1.066819).margin(1e-4));
    REQUIRE(C.d_umegaki < C.d_max_val);
}
