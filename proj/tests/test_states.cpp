#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qmetro/entanglement.hpp"
#include "qmetro/rng.hpp"
#include "qmetro/states.hpp"

using namespace qmetro;

TEST_CASE("gen_hs_random: determinism and validity") {
    const DensityMatrix a = gen_hs_random(42);
    const DensityMatrix b = gen_hs_random(42);
    CHECK(max_abs<4>(a.mat - b.mat) == 0.0);
    CHECK(max_abs<4>(a.mat - gen_hs_random(43).mat) > 1e-3);

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CHECK(validate(gen_hs_random(seed)).empty());
    }
}

TEST_CASE("validate reports named violations with residuals") {
    CHECK(validate(DensityMatrix{0.25 * Mat4::Identity()}).empty());

    Mat4 bad = Mat4::Zero();
    bad.diagonal() << 0.6, 0.6, -0.1, -0.1;
    const auto v = validate(DensityMatrix{bad});
    REQUIRE(v.size() == 1);  // positivity violated; trace is exactly 1 here
    CHECK(v[0].property == "positivity");
    CHECK(v[0].residual == doctest::Approx(0.1));

    bad.diagonal() << 0.6, 0.6, 0.1, 0.1;
    const auto v2 = validate(DensityMatrix{bad});
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].property == "trace");
    CHECK(v2[0].residual == doctest::Approx(0.4));
}

TEST_CASE("purity anchors") {
    CHECK(purity(DensityMatrix{0.25 * Mat4::Identity()}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(purity(bell_state()) == doctest::Approx(1.0).epsilon(1e-12));
    // Tr((p Phi + (1-p) I/4)^2) = 0.25 + 0.75 p^2
    CHECK(purity(werner(0.5)) == doctest::Approx(0.4375).epsilon(1e-12));
}

TEST_CASE("hs ensemble purity statistics") {
    // mean Tr(rho^2) of the Hilbert-Schmidt ensemble is 2N/(N^2+1) = 8/17;
    // measured at n = 4000 the sample mean sits within +-0.004 of it
    const int n = 4000;
    double sum = 0.0, frac_pure = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = purity(gen_hs_random(CounterRng::derive_stream_key(42, static_cast<std::uint64_t>(i))));
        sum += p;
        if (p > 0.99) frac_pure += 1.0;
    }
    const double mean = sum / n;
    CHECK(mean > 8.0 / 17.0 - 0.004);
    CHECK(mean < 8.0 / 17.0 + 0.004);
    CHECK(frac_pure / n < 0.001);  // near-pure states are vanishingly rare under HS
}

TEST_CASE("bell_state anchors") {
    const DensityMatrix bell = bell_state();
    CHECK(validate(bell).empty());
    CHECK(purity(bell) == doctest::Approx(1.0));
    CHECK(bell.mat(0, 0).real() == doctest::Approx(0.5));
    CHECK(bell.mat(0, 3).real() == doctest::Approx(0.5));
    CHECK(bell.mat(1, 1).real() == doctest::Approx(0.0));
}

TEST_CASE("product_state anchors and errors") {
    const DensityMatrix mixed = product_state({0, 0, 0}, {0, 0, 0});
    CHECK(max_abs<4>(mixed.mat - 0.25 * Mat4::Identity()) < 1e-15);

    const DensityMatrix zz = product_state({0, 0, 1}, {0, 0, 1});
    CHECK(zz.mat(0, 0).real() == doctest::Approx(1.0));
    CHECK(purity(zz) == doctest::Approx(1.0));

    CounterRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix p = product_state(rng.unit_ball(), rng.unit_ball());
        CHECK(validate(p).empty());
        CHECK(negativity(p) <= 1e-10);
    }
    CHECK_THROWS_AS(product_state({1.1, 0, 0}, {0, 0, 0}), BlochNormViolation);
}

TEST_CASE("separable_mixture: PPT by construction, n_components = 1 is a product state") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CHECK(negativity(separable_mixture(seed)) <= 1e-10);
        CHECK(validate(separable_mixture(seed)).empty());
    }
    const DensityMatrix one = separable_mixture(9, 1);
    CHECK(purity(one) <= 1.0 + 1e-12);
    CHECK(negativity(one) <= 1e-12);
    CHECK_THROWS_AS(separable_mixture(1, 0), RangeViolation);
}

TEST_CASE("werner anchors") {
    CHECK(max_abs<4>(werner(0.0).mat - 0.25 * Mat4::Identity()) < 1e-15);
    CHECK(max_abs<4>(werner(1.0).mat - bell_state().mat) < 1e-15);
    CHECK_THROWS_AS(werner(-0.1), RangeViolation);
    CHECK_THROWS_AS(werner(1.1), RangeViolation);
}

TEST_CASE("PPT equivalence on generated states") {
    // two-qubit Peres-Horodecki: concurrence > 0 iff the partial transpose
    // has a negative eigenvalue
    for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
        const DensityMatrix rho = gen_hs_random(seed);
        const double c = concurrence(rho);
        const double min_pt = hermitian_eig(partial_transpose_a(rho.mat)).eigenvalues.minCoeff();
        if (c > 1e-9) {
            CHECK(min_pt < 1e-9);
        } else {
            CHECK(min_pt > -1e-9);
        }
        CHECK((c > 1e-9) == (negativity(rho) > 1e-9));
    }
}
