#include <gtest/gtest.h>

#include <string>

#include "dampwave/config.hpp"

namespace dampwave {
namespace {

const std::string kMinimal =
    "# smallest valid run\n"
    "mode = simulate\n"
    "domain = square\n"
    "n = 8\n"
    "k = 0.01\n"
    "T = 2\n";

std::string error_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::size_t line_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return 0;
}

TEST(ParseConfig, MinimalDefaults) {
    const RunConfig cfg = parse_config(kMinimal);
    EXPECT_EQ(cfg.mode, RunMode::Simulate);
    EXPECT_EQ(cfg.domain, "square");
    EXPECT_EQ(cfg.n_per_side, 8u);
    EXPECT_EQ(cfg.c, 1.0);
    EXPECT_EQ(cfg.eps_u, 0.0);
    EXPECT_EQ(cfg.alpha, 1.0);
    EXPECT_EQ(cfg.k, 0.01);
    EXPECT_EQ(cfg.scheme_params().steps, 200u);
    EXPECT_FALSE(cfg.lyapunov);
    EXPECT_EQ(cfg.solver.method, SolverMethod::ConjugateGradient);
}

TEST(ParseConfig, FullConvergenceConfig) {
    const RunConfig cfg = parse_config(
        "mode = convergence\ndomain = interval\nn = 4\nc = 2\neps_u = 0.5\neps_v=0.25\n alpha = 3 \nk = 0.1\nT = 1\n"
        "solver = cholesky\nrel_tol = 1e-10\nmax_iter = 40\nlyapunov_N = 10\nlyapunov_beta = 0.5\nwindow = 0.25\n"
        "case = separable-decay-1d\nlevels = 5\nenergy_csv = e.csv\nsummary_json = s.json\nconvergence_csv = c.csv\n");
    EXPECT_EQ(cfg.mode, RunMode::Convergence);
    EXPECT_EQ(cfg.eps_v, 0.25);
    EXPECT_EQ(cfg.alpha, 3.0);
    EXPECT_EQ(cfg.solver.method, SolverMethod::DenseCholesky);
    EXPECT_EQ(cfg.solver.max_iter, 40u);
    ASSERT_TRUE(cfg.lyapunov);
    EXPECT_EQ(cfg.lyapunov->beta, 0.5);
    EXPECT_EQ(cfg.levels, 5u);
    EXPECT_EQ(cfg.convergence_csv, "c.csv");
}

TEST(ParseConfig, NegativeDampingNamesKeyAndLine) {
    const std::string text = kMinimal + "eps_u = -1\n";
    EXPECT_NE(error_of(text).find("eps_u"), std::string::npos);
    EXPECT_EQ(line_of(text), 7u);
}

TEST(ParseConfig, ZeroStepRejected) {
    EXPECT_NE(error_of("mode = simulate\ndomain = square\nn = 4\nk = 0.0\nT = 1\n").find("'k'"), std::string::npos);
}

TEST(ParseConfig, Errors) {
    EXPECT_NE(error_of(kMinimal + "speed = 3\n").find("unknown key 'speed'"), std::string::npos);
    EXPECT_EQ(line_of(kMinimal + "speed = 3\n"), 7u);
    EXPECT_NE(error_of("mode = simulate\ndomain = square\nn = 4\nk = 0.1\n").find("missing required key 'T'"),
              std::string::npos);
    EXPECT_NE(error_of(kMinimal + "c = fast\n").find("not a finite number"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "c = nan\n").find("not a finite number"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "k = 0.02\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "alpha =\n").find("empty value"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "just words\n").find("expected 'key = value'"), std::string::npos);
    EXPECT_NE(error_of("mode = simulate\ndomain = square\nn = 4\nk = 0.3\nT = 1\n").find("'T'"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "lyapunov_N = 10\n").find("together"), std::string::npos);
    EXPECT_NE(error_of(kMinimal + "initial = weird\n").find("'initial'"), std::string::npos);
    EXPECT_NE(error_of("mode = simulate\ndomain = disc\nn = 4\nk = 0.1\nT = 1\n").find("'domain'"), std::string::npos);
    EXPECT_NE(error_of("mode = convergence\ndomain = square\nn = 4\nk = 0.1\nT = 1\n").find("'case'"),
              std::string::npos);
    EXPECT_NE(error_of("mode = convergence\ndomain = interval\nn = 4\nk = 0.1\nT = 1\ncase = separable-decay\n")
                  .find("does not match"),
              std::string::npos);
    EXPECT_NE(error_of("mode = convergence\ndomain = square\nn = 4\nk = 0.1\nT = 1\ncase = zero\nlevels = 2\n")
                  .find("'levels'"),
              std::string::npos);
    EXPECT_NE(error_of("mode = run\ndomain = square\nn = 4\nk = 0.1\nT = 1\n").find("'mode'"), std::string::npos);
}

TEST(ParseConfig, CommentsAndWhitespace) {
    const RunConfig cfg = parse_config("\n  # header\nmode = decay-study   # trailing\n\tdomain = square\nn = 3\n"
                                       "k = 0.5\nT = 1\r\n");
    EXPECT_EQ(cfg.mode, RunMode::DecayStudy);
    EXPECT_EQ(cfg.T, 1.0);
}

TEST(ParseConfig, FileDomainDoesNotNeedN) {
    const RunConfig cfg = parse_config("mode = simulate\ndomain = file:meshes/a.mesh\nk = 0.1\nT = 1\n");
    EXPECT_TRUE(cfg.domain_is_file());
    EXPECT_EQ(cfg.mesh_path(), "meshes/a.mesh");
}

TEST(RenderConfig, RoundTrip) {
    RunConfig cfg = parse_config(kMinimal);
    EXPECT_EQ(parse_config(render_config(cfg)), cfg);
    cfg.c = 0.1 + 0.2;
    cfg.eps_u = 1.0 / 3.0;
    cfg.lyapunov = LyapunovParams{12.5, 0.125};
    cfg.solver.max_iter = 17;
    cfg.mode = RunMode::Convergence;
    cfg.case_name = "symmetric";
    cfg.levels = 4;
    EXPECT_EQ(parse_config(render_config(cfg)), cfg);
}

}  // namespace
}  // namespace dampwave
