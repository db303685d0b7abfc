#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qmetro/channels.hpp"
#include "qmetro/entanglement.hpp"
#include "qmetro/rng.hpp"

using namespace qmetro;

namespace {

DensityMatrix apply_single_side(const DensityMatrix& rho, ChannelKind kind, double gamma, bool side_a) {
    std::vector<Mat2> ks;
    if (kind == ChannelKind::AmplitudeDamping) {
        Mat2 k0 = Mat2::Zero(), k1 = Mat2::Zero();
        k0(0, 0) = 1;
        k0(1, 1) = std::sqrt(1 - gamma);
        k1(0, 1) = std::sqrt(gamma);
        ks = {k0, k1};
    } else {
        Mat2 k1 = Mat2::Zero(), k2 = Mat2::Zero();
        k1(0, 0) = std::sqrt(gamma);
        k2(1, 1) = std::sqrt(gamma);
        ks = {Mat2(std::sqrt(1 - gamma) * Mat2::Identity()), k1, k2};
    }
    Mat4 out = Mat4::Zero();
    for (const auto& k : ks) {
        const Mat4 kk = side_a ? kron(k, Mat2::Identity()) : kron(Mat2::Identity(), k);
        out += kk * rho.mat * kk.adjoint();
    }
    return DensityMatrix{out};
}

}  // namespace

TEST_CASE("amplitude damping anchors") {
    const DensityMatrix bell = bell_state();
    CHECK(max_abs<4>(amplitude_damping(bell, 0.0).mat - bell.mat) < 1e-15);

    // |11><11| at gamma = 0.5: each qubit decays independently with prob 0.5
    const DensityMatrix ones = product_state({0, 0, -1}, {0, 0, -1});
    const DensityMatrix damped = amplitude_damping(ones, 0.5);
    for (int i = 0; i < 4; ++i) CHECK(damped.mat(i, i).real() == doctest::Approx(0.25).epsilon(1e-12));

    // single-qubit action |1><1| -> (1-g)|1><1| + g|0><0| with the other qubit in |0>
    const DensityMatrix ten = product_state({0, 0, -1}, {0, 0, 1});  // |10>
    const double g = 0.3;
    const DensityMatrix d2 = amplitude_damping(ten, g);
    CHECK(d2.mat(2, 2).real() == doctest::Approx(1 - g).epsilon(1e-12));  // |10><10|
    CHECK(d2.mat(0, 0).real() == doctest::Approx(g).epsilon(1e-12));      // |00><00|

    CHECK_THROWS_AS(amplitude_damping(bell, -0.01), RangeViolation);
    CHECK_THROWS_AS(amplitude_damping(bell, 0.51), RangeViolation);
}

TEST_CASE("phase damping anchors") {
    const DensityMatrix bell = bell_state();
    CHECK(max_abs<4>(phase_damping(bell, 0.0).mat - bell.mat) < 1e-15);

    const double g = 0.3;
    const DensityMatrix pd = phase_damping(bell, g);
    CHECK(pd.mat(0, 3).real() == doctest::Approx((1 - g) * (1 - g) / 2).epsilon(1e-12));
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(pd.mat(i, i) - bell.mat(i, i)) < 1e-14);

    // populations preserved on arbitrary states
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DensityMatrix rho = gen_hs_random(s);
        const DensityMatrix out = phase_damping(rho, 0.37);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(out.mat(i, i) - rho.mat(i, i)) < 1e-14);
        // single-qubit coherences scale by (1-g), cross coherences by (1-g)^2
        CHECK(std::abs(out.mat(0, 1) - (1 - 0.37) * rho.mat(0, 1)) < 1e-13);
        CHECK(std::abs(out.mat(0, 3) - (1 - 0.37) * (1 - 0.37) * rho.mat(0, 3)) < 1e-13);
    }
    CHECK_THROWS_AS(phase_damping(bell, 0.6), RangeViolation);
}

TEST_CASE("depolarizing anchors") {
    const DensityMatrix bell = bell_state();
    CHECK(max_abs<4>(depolarizing(bell, 0.0).mat - bell.mat) < 1e-15);
    CHECK_THROWS_AS(depolarizing(bell, 1.0), RangeViolation);

    // purity of 0.25 rho_bell + 0.1875 I
    CHECK(purity(depolarizing(bell, 0.75)) == doctest::Approx(0.296875).epsilon(1e-12));

    // the output is werner(1-gamma); concurrence follows the closed form
    for (double g : {0.1, 0.2, 0.4, 0.6}) {
        const DensityMatrix out = depolarizing(bell, g);
        CHECK(max_abs<4>(out.mat - werner(1 - g).mat) < 1e-15);
        CHECK(concurrence(out) == doctest::Approx(std::max(0.0, (3 * (1 - g) - 1) / 2)).epsilon(1e-9));
    }
    CHECK(concurrence(depolarizing(bell, 0.2)) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("CPTP suite: validity and Kraus completeness") {
    for (double g : {0.0, 0.1, 0.3, 0.5}) {
        for (ChannelKind k : {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping}) {
            const auto kraus = channel_kraus_operators(k, g);
            Mat4 acc = Mat4::Zero();
            for (const auto& kk : kraus) acc += kk.adjoint() * kk;
            CHECK(max_abs<4>(acc - Mat4::Identity()) <= 1e-12);
        }
    }
    for (std::uint64_t s = 0; s < 50; ++s) {
        const DensityMatrix rho = gen_hs_random(100 + s);
        CHECK(validate(amplitude_damping(rho, 0.35), 1e-10).empty());
        CHECK(validate(phase_damping(rho, 0.35), 1e-10).empty());
        CHECK(validate(depolarizing(rho, 0.6), 1e-10).empty());
    }
}

TEST_CASE("local channel sides commute") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DensityMatrix rho = gen_hs_random(200 + s);
        for (ChannelKind k : {ChannelKind::AmplitudeDamping, ChannelKind::PhaseDamping}) {
            const DensityMatrix ab = apply_single_side(apply_single_side(rho, k, 0.3, true), k, 0.3, false);
            const DensityMatrix ba = apply_single_side(apply_single_side(rho, k, 0.3, false), k, 0.3, true);
            const DensityMatrix joint = k == ChannelKind::AmplitudeDamping ? amplitude_damping(rho, 0.3)
                                                                           : phase_damping(rho, 0.3);
            CHECK(max_abs<4>(ab.mat - ba.mat) < 1e-14);
            CHECK(max_abs<4>(ab.mat - joint.mat) < 1e-14);
        }
    }
}

TEST_CASE("entanglement monotone under local damping channels") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const DensityMatrix rho = gen_hs_random(300 + s);
        const double c0 = concurrence(rho), n0 = negativity(rho);
        for (double g : {0.2, 0.5}) {
            CHECK(concurrence(amplitude_damping(rho, g)) <= c0 + 1e-8);
            CHECK(negativity(amplitude_damping(rho, g)) <= n0 + 1e-8);
            CHECK(concurrence(phase_damping(rho, g)) <= c0 + 1e-8);
            CHECK(negativity(phase_damping(rho, g)) <= n0 + 1e-8);
        }
    }
}

TEST_CASE("depolarizing is exactly linear in any linear functional") {
    CounterRng rng(401);
    Mat4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = cplx(rng.normal(), rng.normal());
    m = 0.5 * (m + m.adjoint()).eval();
    const DensityMatrix mixed{0.25 * Mat4::Identity()};
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DensityMatrix rho = gen_hs_random(400 + s);
        const double f0 = (rho.mat * m).trace().real();
        const double finf = (mixed.mat * m).trace().real();
        for (double g : {0.1, 0.35, 0.75}) {
            const double fg = (depolarizing(rho, g).mat * m).trace().real();
            CHECK(fg == doctest::Approx((1 - g) * f0 + g * finf).epsilon(1e-12));
        }
    }
}

TEST_CASE("depolarizing_correction inverts the convex mixing") {
    CHECK(depolarizing_correction(0.5, 0.3, 0.5) == doctest::Approx(0.5));
    CHECK(depolarizing_correction(0.123, 0.0, 9.9) == doctest::Approx(0.123));
    const double p0 = 0.756, pinf = 0.0, g = 0.5;
    const double measured = (1 - g) * p0 + g * pinf;
    CHECK(depolarizing_correction(measured, g, pinf) == doctest::Approx(p0).epsilon(1e-12));
    CHECK_THROWS_AS(depolarizing_correction(0.1, 1.0, 0.0), RangeViolation);
}

TEST_CASE("channel_sweep: structure and validation") {
    SweepConfig sc;
    sc.mqfi.n_restarts = 4;
    sc.n_bins = 10;
    sc.min_occupancy = 10;
    sc.bootstrap_n = 100;

    const SweepResult res = channel_sweep(99, 250, ChannelKind::Depolarizing, {0.0, 0.3}, FitMeasure::Concurrence, sc);
    CHECK(res.gammas.size() == 2);
    CHECK(res.params.size() == 2);
    CHECK(res.params[0].gamma == 0.0);
    CHECK(res.n_sample == 250);
    if (res.params[0].fit_ok) {
        CHECK(res.params[0].r2 <= 1.0);
        CHECK(res.params[0].n_bins_used >= 4);
    }

    CHECK_THROWS_AS(channel_sweep(1, 100, ChannelKind::Depolarizing, {0.0}, FitMeasure::Concurrence, sc),
                    RangeViolation);  // n_sample too small
    CHECK_THROWS_AS(channel_sweep(1, 250, ChannelKind::Depolarizing, {0.1, 0.3}, FitMeasure::Concurrence, sc),
                    RangeViolation);  // grid must start at 0
    CHECK_THROWS_AS(channel_sweep(1, 250, ChannelKind::AmplitudeDamping, {0.0, 0.6}, FitMeasure::Concurrence, sc),
                    RangeViolation);  // gamma above the channel range
    CHECK_THROWS_AS(channel_sweep(1, 250, ChannelKind::Depolarizing, {0.0, 0.1}, FitMeasure::Ree, sc),
                    RangeViolation);  // ree sweeps need n >= 500
}
