#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include <renyi/operator_core.hpp>

using namespace renyi;
using Catch::Approx;

namespace {

Mat random_hermitian(int dim, std::uint64_t seed) {
    Rng rng(seed);
    Mat G(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) G(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian());
    return 0.5 * (G + G.adjoint());
}

}  // namespace

TEST_CASE("eig_hermitian reconstructs the input with ascending eigenvalues") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Mat A = random_hermitian(5, seed);
        auto ed = eig_hermitian(A);
        Mat rebuilt = ed.eigenvectors * ed.eigenvalues.asDiagonal() *
                      ed.eigenvectors.adjoint();
        REQUIRE((rebuilt - A).cwiseAbs().maxCoeff() < 1e-12);
        for (int i = 0; i + 1 < ed.eigenvalues.size(); ++i)
            REQUIRE(ed.eigenvalues[i] <= ed.eigenvalues[i + 1]);
        Mat gram = ed.eigenvectors.adjoint() * ed.eigenvectors;
        REQUIRE((gram - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("eig_hermitian real input agrees with the complex path") {
    Rng rng(77);
    Mat A(4, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) A(i, j) = std::complex<double>(rng.gaussian(), 0.0);
    A = (0.5 * (A + A.adjoint())).eval();
    auto ed = eig_hermitian(A);
    Eigen::SelfAdjointEigenSolver<Mat> ref(A);
    REQUIRE((ed.eigenvalues - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(ed.eigenvectors.imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eig_hermitian rejects non-Hermitian input naming the asymmetry") {
    Mat A(2, 2);
    A << 1.0, std::complex<double>(0.0, 0.5), std::complex<double>(0.0, 0.5), 2.0;
    REQUIRE_THROWS_WITH(eig_hermitian(A), Catch::Matchers::ContainsSubstring("asymmetry"));
}

TEST_CASE("fractional powers compose and zero power gives the support projector") {
    auto rho = random_density(4, 3, 11);
    Mat half = frac_power_m(rho.entries, 0.5);
    REQUIRE((half * half - rho.entries).cwiseAbs().maxCoeff() < 1e-12);
    Mat proj = frac_power_m(rho.entries, 0.0);
    REQUIRE((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(proj.trace().real() == Approx(3.0).margin(1e-10));
    REQUIRE((proj * rho.entries - rho.entries).cwiseAbs().maxCoeff() < 1e-12);
    Mat inv = frac_power_m(rho.entries, -1.0);
    REQUIRE((inv * rho.entries - proj).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("positive_part_trace sums only strictly positive eigenvalues") {
    Mat A = Mat::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = -1.0;
    REQUIRE(positive_part_trace(A) == Approx(2.0));
    auto ed = eig_hermitian(random_hermitian(5, 9));
    double expect = 0.0;
    for (int i = 0; i < 5; ++i) expect += std::max(ed.eigenvalues[i], 0.0);
    Mat B = ed.eigenvectors * ed.eigenvalues.asDiagonal() * ed.eigenvectors.adjoint();
    REQUIRE(positive_part_trace(B) == Approx(expect).margin(1e-12));
}

TEST_CASE("spectral_projector_pos is idempotent and selects the positive part") {
    Mat A = random_hermitian(5, 21);
    auto split = spectral_projector_pos(A);
    REQUIRE((split.p_pos * split.p_pos - split.p_pos).cwiseAbs().maxCoeff() < 1e-12);
    Mat inside = split.p_pos * A * split.p_pos;
    auto ed = eig_hermitian(inside);
    REQUIRE(ed.eigenvalues.minCoeff() > -1e-12);
    REQUIRE(inside.trace().real() == Approx(positive_part_trace(A)).margin(1e-10));
}

TEST_CASE("pinch keeps blocks, preserves trace, and commutes with the pinching operator") {
    auto rho = random_density(4, 4, 31);
    Mat A = Mat::Zero(4, 4);
    A(0, 0) = 1.0;
    A(1, 1) = 1.0;  // degenerate pair
    A(2, 2) = 2.0;
    A(3, 3) = 3.0;
    Mat pb = pinch(rho.entries, A);
    REQUIRE(pb.trace().real() == Approx(1.0).margin(1e-12));
    REQUIRE((pb * A - A * pb).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(std::abs(pb(0, 1)) > 1e-8);      // inside the degenerate block
    REQUIRE(std::abs(pb(0, 2)) < 1e-14);     // across blocks
    REQUIRE((pinch(pb, A) - pb).cwiseAbs().maxCoeff() < 1e-13);
    REQUIRE(distinct_eigenvalue_count(A) == 3);
}

TEST_CASE("tensor powers multiply dimensions and eigenvalues") {
    auto rho = random_density(2, 2, 41);
    Mat r3 = tensor_power_m(rho.entries, 3);
    REQUIRE(r3.rows() == 8);
    REQUIRE(r3.trace().real() == Approx(std::pow(rho.entries.trace().real(), 3)).margin(1e-12));
    auto e1 = eig_hermitian(rho.entries);
    auto e3 = eig_hermitian(r3);
    REQUIRE(e3.eigenvalues.maxCoeff() ==
            Approx(std::pow(e1.eigenvalues.maxCoeff(), 3)).margin(1e-12));
}

TEST_CASE("tensor power dimension cap names the override variable") {
    auto rho = random_density(2, 2, 43);
    REQUIRE_THROWS_WITH(tensor_power_m(rho.entries, 30),
                        Catch::Matchers::ContainsSubstring("RENYI_MAX_DIM"));
    REQUIRE_THROWS_AS(tensor_power_m(rho.entries, 5, 16), precondition_error);
}

TEST_CASE("support containment detects kernel overlap") {
    Mat pure = Mat::Zero(3, 3);
    pure(0, 0) = 1.0;
    Mat mixed = Mat::Zero(3, 3);
    mixed(0, 0) = 0.5;
    mixed(1, 1) = 0.5;
    auto p = make_positive_operator(pure);
    auto m = make_positive_operator(mixed);
    REQUIRE(support_contained(p, m));
    REQUIRE_FALSE(support_contained(m, p));
    auto full = random_density(3, 3, 51);
    REQUIRE(support_contained(m, full));
    REQUIRE(support_contained(full, full));
}

TEST_CASE("random_density is a reproducible density matrix of the requested rank") {
    auto a = random_density(4, 2, 99);
    auto b = random_density(4, 2, 99);
    REQUIRE((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.entries.trace().real() == Approx(1.0).margin(1e-12));
    auto ed = eig_of(a);
    REQUIRE(ed.eigenvalues.minCoeff() > -1e-14);
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (ed.eigenvalues[i] > 1e-12) ++rank;
    REQUIRE(rank == 2);
    auto c = random_density(4, 2, 100);
    REQUIRE((a.entries - c.entries).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("random channels are trace preserving and completely positive in action") {
    auto F = random_channel(3, 3, 2, 7);
    Mat acc = Mat::Zero(3, 3);
    for (const auto& K : F.kraus) acc += K.adjoint() * K;
    REQUIRE((acc - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    auto rho = random_density(3, 3, 8);
    auto out = apply_channel(F, rho);
    REQUIRE(out.entries.trace().real() == Approx(1.0).margin(1e-10));
    REQUIRE(eig_of(out).eigenvalues.minCoeff() > -1e-12);
}

TEST_CASE("channel constructor rejects incomplete Kraus families") {
    std::vector<Mat> ks = {0.5 * Mat::Identity(2, 2)};
    REQUIRE_THROWS_AS(make_channel(std::move(ks)), precondition_error);
}

TEST_CASE("tolerance overrides are validated") {
    ToleranceConfig t;
    t.tau_supp = 0.0;
    REQUIRE_THROWS_AS(validate(t), precondition_error);
    t.tau_supp = 1e-2;
    REQUIRE_THROWS_AS(validate(t), precondition_error);
    t.tau_supp = 1e-12;
    REQUIRE_NOTHROW(validate(t));
}

TEST_CASE("kron matches the Kronecker identity on products") {
    auto a = random_density(2, 2, 61);
    auto b = random_density(3, 3, 62);
    Mat k = kron(a.entries, b.entries);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.trace().real() == Approx(a.entries.trace().real() * b.entries.trace().real())
                                    .margin(1e-12));
    REQUIRE(std::abs(k(5, 0) - a.entries(1, 0) * b.entries(2, 0)) < 1e-15);
}
