#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dampwave/scheme.hpp"

namespace dampwave {
namespace {

using std::numbers::pi;

ScalarField sine_mode(int p, int q) {
    return [=](const Point& x) { return std::sin(p * pi * x[0]) * std::sin(q * pi * x[1]); };
}

const ScalarField kZero = [](const Point&) { return 0.0; };

TEST(SchemeParams, Validation) {
    EXPECT_NO_THROW(SchemeParams::with_step_size(1, 0, 0, 1, 0.01, 2));
    EXPECT_EQ(SchemeParams::with_step_size(1, 0, 0, 1, 0.01, 2).steps, 200u);
    EXPECT_THROW(SchemeParams::with_step_size(0, 0, 0, 1, 0.1, 1), InvalidArgument);
    EXPECT_THROW(SchemeParams::with_step_size(1, -0.1, 0, 1, 0.1, 1), InvalidArgument);
    EXPECT_THROW(SchemeParams::with_step_size(1, 0, -0.1, 1, 0.1, 1), InvalidArgument);
    EXPECT_THROW(SchemeParams::with_step_size(1, 0, 0, 0, 0.1, 1), InvalidArgument);
    EXPECT_THROW(SchemeParams::with_step_size(1, 0, 0, 1, 0.0, 1), InvalidArgument);
    EXPECT_THROW(SchemeParams::with_step_size(1, 0, 0, 1, 0.3, 1), InvalidArgument);
    const auto p = SchemeParams::with_steps(1, 0, 0, 1, 1.0, 3);
    EXPECT_NEAR(static_cast<double>(p.steps) * p.k, p.T, 1e-12);
}

TEST(Initialize, ZeroData) {
    const Mesh m = generate_unit_square(4);
    const State s = initialize(m, SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1), InitialData::zero());
    EXPECT_EQ(s.n, 1u);
    for (const Vector* v : {&s.u_prev, &s.u_curr, &s.v_prev, &s.v_curr})
        for (double x : *v) EXPECT_EQ(x, 0.0);
}

TEST(Initialize, ZeroVelocityRepeatsLevel) {
    const Mesh m = generate_unit_square(4);
    const State s =
        initialize(m, SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1), {sine_mode(1, 1), kZero, sine_mode(2, 1), kZero});
    EXPECT_EQ(s.u_curr, s.u_prev);
    EXPECT_EQ(s.v_curr, s.v_prev);
}

TEST(Initialize, StartUpFormula) {
    const Mesh m = generate_unit_square(2);
    const State s = initialize(m, SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1),
                               {sine_mode(1, 1), [](const Point&) { return 1.0; }, kZero, kZero});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s.u_prev[0], 1.0);
    EXPECT_DOUBLE_EQ(s.u_curr[0], 1.1);
}

struct Fixture {
    Mesh mesh;
    SparseMatrix mass, stiffness;
    explicit Fixture(Mesh m) : mesh(std::move(m)), mass(assemble_mass(mesh)), stiffness(assemble_stiffness(mesh)) {}
};

TEST(Step, ZeroStateStaysZero) {
    const Fixture f(generate_unit_square(4));
    const auto p = SchemeParams::with_step_size(1, 0.5, 0.25, 1, 0.1, 1);
    const BlockOperator op(f.mass, f.stiffness, p);
    State s;
    s.n = 1;
    s.u_prev = s.u_curr = s.v_prev = s.v_curr = Vector(f.mass.rows(), 0.0);
    const State next = step(s, op, f.mass, {});
    EXPECT_EQ(next.n, 2u);
    for (double x : next.u_curr) EXPECT_EQ(x, 0.0);
    for (double x : next.v_curr) EXPECT_EQ(x, 0.0);
}

// Single interior DOF with M = 1/8, K = 4 (unit_square(2)), c = 1, eps = 0,
// alpha = 1, k = 0.1, u^{n-1} = u^n = 1, v = 0:
//   a u - m v = M (2 - 1) / k^2,  -m u + a v = 0,  a = M (1/k^2 + 1) + K, m = M.
TEST(Step, ScalarSystemClosedForm) {
    const Fixture f(generate_unit_square(2));
    const auto p = SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1);
    const BlockOperator op(f.mass, f.stiffness, p);
    State s;
    s.n = 1;
    s.u_prev = s.u_curr = Vector{1.0};
    s.v_prev = s.v_curr = Vector{0.0};
    const State next = step(s, op, f.mass, {});

    const double M = 1.0 / 8.0, K = 4.0, k = 0.1;
    const double a = M * (1.0 / (k * k) + 1.0) + K;
    const double r = M / (k * k);
    const double det = a * a - M * M;
    EXPECT_NEAR(next.u_curr[0], a * r / det, 1e-12);
    EXPECT_NEAR(next.v_curr[0], M * r / det, 1e-12);
    EXPECT_EQ(next.u_prev, s.u_curr);
    EXPECT_EQ(next.v_prev, s.v_curr);
}

TEST(Step, IdenticalFieldsStayIdenticalWithEqualDamping) {
    const Fixture f(generate_unit_square(6));
    const auto p = SchemeParams::with_step_size(1.3, 0.4, 0.4, 1e-8, 0.05, 1);
    const BlockOperator op(f.mass, f.stiffness, p);
    const State s = initialize(f.mesh, p, {sine_mode(1, 1), sine_mode(2, 1), sine_mode(1, 1), sine_mode(2, 1)});
    State next = step(s, op, f.mass, {});
    next = step(next, op, f.mass, {});
    for (std::size_t i = 0; i < next.size(); ++i) EXPECT_NEAR(next.u_curr[i], next.v_curr[i], 1e-12);
}

TEST(Step, ExchangeSymmetry) {
    const Fixture f(generate_unit_square(5));
    const auto p = SchemeParams::with_step_size(1, 0.7, 0.2, 0.9, 0.05, 1);
    const auto swapped = SchemeParams::with_step_size(1, 0.2, 0.7, 0.9, 0.05, 1);
    const InitialData data{sine_mode(1, 1), sine_mode(1, 2), sine_mode(2, 1), kZero};
    const InitialData data_swapped{data.v0, data.v1, data.u0, data.u1};

    const BlockOperator op(f.mass, f.stiffness, p);
    const BlockOperator op_swapped(f.mass, f.stiffness, swapped);
    State a = initialize(f.mesh, p, data);
    State b = initialize(f.mesh, swapped, data_swapped);
    for (int i = 0; i < 5; ++i) {
        a = step(a, op, f.mass, {});
        b = step(b, op_swapped, f.mass, {});
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a.u_curr[i], b.v_curr[i], 1e-12);
        EXPECT_NEAR(a.v_curr[i], b.u_curr[i], 1e-12);
    }
}

TEST(Step, DeterministicReplay) {
    const Fixture f(generate_unit_square(7));
    const auto p = SchemeParams::with_step_size(1, 0.5, 0.25, 1, 0.02, 1);
    const BlockOperator op(f.mass, f.stiffness, p);
    const State s = initialize(f.mesh, p, {sine_mode(1, 1), sine_mode(2, 3), sine_mode(3, 1), kZero});
    EXPECT_EQ(step(s, op, f.mass, {}), step(s, op, f.mass, {}));
}

TEST(Step, InvalidInputs) {
    const Fixture f(generate_unit_square(3));
    const auto p = SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1);
    const BlockOperator op(f.mass, f.stiffness, p);
    State s = initialize(f.mesh, p, InitialData::zero());
    const Vector wrong(2, 0.0);
    EXPECT_THROW(step(s, op, f.mass, {}, StepSources{wrong, wrong}), InvalidArgument);
    s.n = 0;
    EXPECT_THROW(step(s, op, f.mass, {}), InvalidArgument);
}

TEST(BlockOperator, ExactlySymmetricAndPositiveDefinite) {
    const Fixture f(generate_unit_square(8));
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (const auto& [eu, ev] : {std::pair{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.25}}) {
        const BlockOperator op(f.mass, f.stiffness, SchemeParams::with_step_size(1, eu, ev, 1, 0.01, 2));
        const SparseMatrix& A = op.matrix();
        EXPECT_EQ(A.rows(), 2 * f.mass.rows());
        EXPECT_EQ(A.transpose(), A);
        for (int trial = 0; trial < 100; ++trial) {
            Vector x(A.rows());
            for (double& v : x) v = gauss(rng);
            EXPECT_GT(A.inner(x, x), 0.0);
        }
    }
}

TEST(Run, SingleStepRunObservesOnlyInitialState) {
    const Mesh m = generate_unit_square(3);
    const auto p = SchemeParams::with_steps(1, 0, 0, 1, 0.1, 1);
    int calls = 0;
    const State last = run(m, p, {sine_mode(1, 1), kZero, kZero, kZero}, {}, [&](const State& s) {
        ++calls;
        EXPECT_EQ(s.n, 1u);
    });
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(last.n, 1u);
}

TEST(Run, FinalIndexEqualsStepCount) {
    const Mesh m = generate_unit_interval(10);
    const auto p = SchemeParams::with_step_size(2, 0.1, 0.3, 0.5, 0.05, 1);
    std::size_t expected = 1;
    const State last = run(m, p, {[](const Point& x) { return std::sin(pi * x[0]); }, kZero, kZero, kZero}, {},
                           [&](const State& s) { EXPECT_EQ(s.n, expected++); });
    EXPECT_EQ(last.n, p.steps);
    EXPECT_EQ(expected, p.steps + 1);
}

TEST(Run, FailingStepReportsIndex) {
    const Mesh m = generate_unit_square(6);
    const auto p = SchemeParams::with_step_size(1, 0, 0, 1, 0.1, 1);
    SolverConfig cfg;
    cfg.max_iter = 1;
    try {
        run(m, p, {sine_mode(1, 1), kZero, kZero, kZero}, cfg, nullptr);
        FAIL() << "expected StepFailure";
    } catch (const StepFailure& e) {
        EXPECT_EQ(e.step_index(), 2u);
    }
}

}  // namespace
}  // namespace dampwave
