#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dampwave/verification.hpp"
#include "oracles.hpp"

namespace dampwave {
namespace {

const SchemeParams kParams = SchemeParams::with_step_size(1.0, 0.5, 0.25, 1.0, 0.1, 1.0);

// Checks each case's declared derivatives against finite differences of u, v
// and then the sources against the PDE residual built from those.
TEST(ManufacturedCase, DerivativesMatchFiniteDifferences) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.05, 0.95), time(0.0, 1.0);
    const double h = 1e-2;
    for (const std::string& name : case_names()) {
        const ManufacturedCase mc = build_case(name, kParams);
        const int dim = mc.dim == 0 ? 2 : mc.dim;
        for (int trial = 0; trial < 100; ++trial) {
            const Point x{unit(rng), dim == 2 ? unit(rng) : 0.0};
            const double t = time(rng);
            for (const auto& [w, w_t, w_tt, lap] :
                 {std::tuple{mc.u, mc.u_t, mc.u_tt, mc.lap_u}, std::tuple{mc.v, mc.v_t, mc.v_tt, mc.lap_v}}) {
                const auto in_time = [&](double s) { return w(x, s); };
                EXPECT_NEAR(w_t(x, t), oracle::d1(in_time, t, h), 1e-10) << name;
                EXPECT_NEAR(w_tt(x, t), oracle::d2(in_time, t, h), 1e-10) << name;
                double lap_fd = 0.0;
                for (int d = 0; d < dim; ++d) {
                    lap_fd += oracle::d2([&](double s) { Point y = x; y[d] = s; return w(y, t); }, x[d], h);
                }
                EXPECT_NEAR(lap(x, t), lap_fd, 1e-9) << name;
            }
            const double fd_u = oracle::d2([&](double s) { return mc.u(x, s); }, t, h);
            const double fd_v = oracle::d2([&](double s) { return mc.v(x, s); }, t, h);
            const double ut = oracle::d1([&](double s) { return mc.u(x, s); }, t, h);
            const double vt = oracle::d1([&](double s) { return mc.v(x, s); }, t, h);
            const double diff = mc.u(x, t) - mc.v(x, t);
            EXPECT_NEAR(mc.source_u(x, t), fd_u - mc.lap_u(x, t) + 0.5 * ut + diff, 1e-9) << name;
            EXPECT_NEAR(mc.source_v(x, t), fd_v - mc.lap_v(x, t) + 0.25 * vt - diff, 1e-9) << name;
        }
    }
}

TEST(ManufacturedCase, KnownValues) {
    const ManufacturedCase a = build_case("separable-decay", kParams);
    EXPECT_NEAR(a.u({0.5, 0.5}, 0.0), 1.0, 1e-15);
    EXPECT_NEAR(a.v({0.5, 0.5}, 0.0), 2.0, 1e-15);
    EXPECT_EQ(a.u({0.0, 0.3}, 0.4), 0.0);

    const auto equal_damping = SchemeParams::with_step_size(1.0, 0.3, 0.3, 2.0, 0.1, 1.0);
    const ManufacturedCase c = build_case("symmetric", equal_damping);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const Point x{unit(rng), unit(rng)};
        EXPECT_DOUBLE_EQ(c.source_u(x, 0.3), c.source_v(x, 0.3));
    }
    EXPECT_THROW(build_case("nope", kParams), InvalidArgument);
}

TEST(MeasureError, ZeroCaseHasZeroError) {
    const ManufacturedCase z = build_case("zero", kParams);
    for (const Mesh& m : {generate_unit_square(4), generate_unit_interval(8)}) {
        const LevelError e = measure_error(z, m, kParams, {});
        EXPECT_EQ(e.error, 0.0);
        EXPECT_EQ(e.final_error, 0.0);
    }
}

TEST(MeasureError, DimensionMismatchRejected) {
    EXPECT_THROW(measure_error(build_case("separable-decay", kParams), generate_unit_interval(4), kParams, {}),
                 InvalidArgument);
}

TEST(ConvergenceStudy, LockstepFirstOrder2D) {
    const ManufacturedCase mc = build_case("separable-decay", kParams);
    const ErrorReport r = convergence_study(mc, generate_unit_square(4), 0.1, 3, kParams, {});
    ASSERT_EQ(r.levels.size(), 3u);
    EXPECT_GE(r.fitted_order, 0.9);
    EXPECT_TRUE(std::isnan(r.levels[0].order));
    for (std::size_t j = 1; j < r.levels.size(); ++j) {
        EXPECT_LT(r.levels[j].error, r.levels[j - 1].error);
        EXPECT_DOUBLE_EQ(r.levels[j].h, r.levels[j - 1].h / 2);
        EXPECT_DOUBLE_EQ(r.levels[j].k, r.levels[j - 1].k / 2);
        for (std::size_t c = 0; c < kErrorComponents; ++c)
            EXPECT_LT(r.levels[j].components[c], r.levels[j - 1].components[c]) << "component " << c;
    }
}

TEST(ConvergenceStudy, LockstepFirstOrder1D) {
    const ManufacturedCase mc = build_case("separable-decay-1d", kParams);
    const ErrorReport r = convergence_study(mc, generate_unit_interval(8), 0.1, 4, kParams, {});
    EXPECT_GE(r.fitted_order, 0.9);
    for (std::size_t j = 1; j < r.levels.size(); ++j) EXPECT_GE(r.levels[j - 1].error / r.levels[j].error, 1.7);
}

// With a fine mesh the time error dominates and halving k alone roughly halves it.
TEST(ConvergenceStudy, TimeOnlyRefinement) {
    const ManufacturedCase mc = build_case("separable-decay-1d", kParams);
    const ErrorReport r =
        convergence_study(mc, generate_unit_interval(256), 0.1, 3, kParams, {}, Refinement::TimeOnly);
    EXPECT_EQ(r.levels[2].h, r.levels[0].h);
    const double ratio = r.levels[1].error / r.levels[2].error;
    EXPECT_GT(ratio, 1.6);
    EXPECT_LT(ratio, 2.4);
}

TEST(ConvergenceStudy, RejectsTooFewLevels) {
    const ManufacturedCase mc = build_case("separable-decay", kParams);
    EXPECT_THROW(convergence_study(mc, generate_unit_square(2), 0.1, 2, kParams, {}), InvalidArgument);
}

}  // namespace
}  // namespace dampwave
