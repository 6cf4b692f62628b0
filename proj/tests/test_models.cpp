#include "warpsim/models.hpp"

#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "warpsim/error.hpp"

using namespace warpsim;

namespace {

// Feeds a scripted uniform sequence, cycling when exhausted.
struct ScriptedU {
    std::vector<double> us;
    std::size_t i = 0;
    double operator()() {
        double u = us[i % us.size()];
        ++i;
        return u;
    }
};

// Uniform that reproduces a target exponential variate: -log(1-u)/rate == x
// up to rounding when u = 1 - exp(-rate*x).
double u_for_exponential(double x, double rate) { return 1.0 - std::exp(-rate * x); }

}  // namespace

// ---------------------------------------------------------------------------
// pi
// ---------------------------------------------------------------------------

TEST_CASE("pi replication on scripted draws") {
    CHECK(pi_replication_u(10, ScriptedU{{0.5, 0.5}}) == 4.0);   // always inside
    CHECK(pi_replication_u(10, ScriptedU{{0.9, 0.9}}) == 0.0);   // 1.62 > 1
    CHECK(pi_replication_u(2, ScriptedU{{0.5, 0.5, 0.9, 0.9}}) == 2.0);
    // boundary point (0.6, 0.8) has x^2+y^2 == 1 exactly and counts as inside
    CHECK(pi_replication_u(1, ScriptedU{{0.6, 0.8}}) == 4.0);
    CHECK_THROWS_AS(pi_replication_u(0, ScriptedU{{0.5}}), DomainError);
}

TEST_CASE("pi estimates live in [0, 4]") {
    for (std::uint64_t seed : {1ull, 17ull, 923ull}) {
        double est = pi_replication(500, rng_state_from_seed(seed));
        CHECK(est >= 0.0);
        CHECK(est <= 4.0);
        CHECK(est == doctest::Approx(3.14).epsilon(0.1));
    }
}

// ---------------------------------------------------------------------------
// mm1
// ---------------------------------------------------------------------------

TEST_CASE("mm1 hand trace: arrivals (1,1,1), services (2,2,2)") {
    ScriptedU u{{u_for_exponential(1.0, 1.0), u_for_exponential(2.0, 1.0)}};
    MM1Result r = mm1_replication_u(3, 1.0, 1.0, u);
    // waits 0,1,2; system times 2,3,4; server idles only before client 0
    CHECK(r.avgWaitQueue == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.avgSystem == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.avgIdle == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mm1 single client: wait 0, system = service, idle = inter-arrival") {
    const double lambda = 0.7, mu = 1.3;
    RngState probe = rng_state_from_seed(5150);
    const double u1 = uniform01(probe);
    const double u2 = uniform01(probe);
    MM1Result r = mm1_replication(1, lambda, mu, rng_state_from_seed(5150));
    CHECK(r.avgWaitQueue == 0.0);
    CHECK(r.avgIdle == -std::log(1.0 - u1) / lambda);
    CHECK(r.avgSystem == -std::log(1.0 - u2) / mu);
}

TEST_CASE("mm1 agrees with an arrival/departure-time oracle") {
    const std::int64_t n = 500;
    const double lambda = 0.5, mu = 1.0;

    RngState trace_state = rng_state_from_seed(777);
    std::vector<double> a(n), s(n);
    for (std::int64_t i = 0; i < n; ++i) {
        a[i] = exponential(trace_state, lambda);
        s[i] = exponential(trace_state, mu);
    }
    double arrival = 0.0, departure = 0.0, sum_wait = 0.0, sum_sys = 0.0, sum_service = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        arrival += a[i];
        const double begin = std::max(arrival, departure);
        departure = begin + s[i];
        sum_wait += begin - arrival;
        sum_sys += departure - arrival;
        sum_service += s[i];
    }

    MM1Result r = mm1_replication(n, lambda, mu, rng_state_from_seed(777));
    CHECK(r.avgWaitQueue == doctest::Approx(sum_wait / n).epsilon(1e-9));
    CHECK(r.avgSystem == doctest::Approx(sum_sys / n).epsilon(1e-9));
    // conservation: the server is busy sum(s) and idle the rest of the horizon
    CHECK(r.avgIdle * n + sum_service == doctest::Approx(departure).epsilon(1e-9));
    for (std::int64_t i = 0; i < n; ++i) REQUIRE(s[i] > 0.0);
}

TEST_CASE("mm1 near its steady state at lambda=0.5, mu=1") {
    // rho = 0.5: Wq -> rho/(mu-lambda) = 1, system time -> 1/(mu-lambda) = 2
    double wait = 0.0, sys = 0.0;
    const int reps = 10;
    for (int r = 0; r < reps; ++r) {
        MM1Result m = mm1_replication(20000, 0.5, 1.0, rng_state_from_seed(4000 + r));
        wait += m.avgWaitQueue;
        sys += m.avgSystem;
    }
    CHECK(wait / reps == doctest::Approx(1.0).epsilon(0.25));
    CHECK(sys / reps == doctest::Approx(2.0).epsilon(0.15));
}

// ---------------------------------------------------------------------------
// walk
// ---------------------------------------------------------------------------

TEST_CASE("walk on scripted draws") {
    // first draw steers, second is burned: 0.1 -> +x every step
    CHECK(walk_replication_u(30, 30, ScriptedU{{0.1, 0.9}}) == 0.0);
    CHECK(walk_replication_u(31, 30, ScriptedU{{0.1, 0.9}}) == 1.0);
    // 0.6 -> +y: x never moves
    CHECK(walk_replication_u(17, 30, ScriptedU{{0.6, 0.6}}) == 0.0);
    // 0.3 -> -x: one step west wraps to the top chunk
    CHECK(walk_replication_u(1, 30, ScriptedU{{0.3, 0.3}}) == 29.0);
    CHECK(walk_replication_u(2, 30, ScriptedU{{0.3, 0.3}}) == 28.0);
    // direction cut points: 4u = 1 lands in the second quarter
    CHECK(walk_replication_u(1, 5, ScriptedU{{0.25, 0.0}}) == 4.0);
    CHECK(walk_replication_u(1, 5, ScriptedU{{0.999, 0.0}}) == 0.0);  // -y, x unchanged
    CHECK_THROWS_AS(walk_replication_u(0, 30, ScriptedU{{0.1}}), DomainError);
    CHECK_THROWS_AS(walk_replication_u(5, 1, ScriptedU{{0.1}}), DomainError);
}

TEST_CASE("walk chunk ids are integers in [0, chunks)") {
    for (std::uint64_t seed = 100; seed < 164; ++seed) {
        double c = walk_replication(57, 7, rng_state_from_seed(seed));
        CHECK(c >= 0.0);
        CHECK(c < 7.0);
        CHECK(c == std::floor(c));
    }
}

// ---------------------------------------------------------------------------
// Confidence intervals
// ---------------------------------------------------------------------------

TEST_CASE("normal quantile") {
    CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.9599639845400538).epsilon(1e-14));
    CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-inverse_normal_cdf(0.975)).epsilon(1e-13));
    for (double p : {0.005, 0.1, 0.4, 0.6, 0.9, 0.975, 0.9995}) {
        // Phi(Phi^-1(p)) == p to near double precision
        const double z = inverse_normal_cdf(p);
        CHECK(0.5 * std::erfc(-z / std::sqrt(2.0)) == doctest::Approx(p).epsilon(1e-13));
    }
    CHECK(inverse_normal_cdf(0.975) > inverse_normal_cdf(0.95));
    CHECK_THROWS_AS(inverse_normal_cdf(0.0), DomainError);
    CHECK_THROWS_AS(inverse_normal_cdf(1.0), DomainError);
}

TEST_CASE("confidence interval on 1..5") {
    ConfidenceInterval ci = confidence_interval({1.0, 2.0, 3.0, 4.0, 5.0});
    CHECK(ci.mean == 3.0);
    // s = sqrt(2.5), hw = z(0.975) * s / sqrt(5)
    CHECK(ci.halfWidth == doctest::Approx(1.3859038243496777).epsilon(1e-14));
    CHECK(ci.halfWidth == doctest::Approx(1.386).epsilon(2e-3));
    CHECK(ci.low() == doctest::Approx(3.0 - ci.halfWidth));
    CHECK(ci.high() == doctest::Approx(3.0 + ci.halfWidth));
    CHECK(ci.n == 5);
    CHECK(ci.warnSmallSample);
}

TEST_CASE("confidence interval edge cases") {
    CHECK(confidence_interval({2.5, 2.5, 2.5, 2.5}).halfWidth == 0.0);
    CHECK_THROWS_AS(confidence_interval({}), DomainError);
    CHECK_THROWS_AS(confidence_interval({1.0}), DomainError);
    CHECK_THROWS_AS(confidence_interval({1.0, 2.0}, 0.0), DomainError);
    CHECK_THROWS_AS(confidence_interval({1.0, 2.0}, 1.0), DomainError);

    std::vector<double> ten(10, 0.0), twentynine(29, 0.0), thirty(30, 0.0);
    for (std::size_t i = 0; i < ten.size(); ++i) ten[i] = double(i % 2);
    for (std::size_t i = 0; i < twentynine.size(); ++i) twentynine[i] = double(i % 2);
    for (std::size_t i = 0; i < thirty.size(); ++i) thirty[i] = double(i % 2);
    CHECK(confidence_interval(ten).warnSmallSample);
    CHECK(confidence_interval(twentynine).warnSmallSample);
    CHECK_FALSE(confidence_interval(thirty).warnSmallSample);

    // fixed spread, growing n: intervals tighten
    CHECK(confidence_interval(thirty).halfWidth < confidence_interval(ten).halfWidth);

    // a wider level never narrows the interval
    CHECK(confidence_interval(ten, 0.99).halfWidth > confidence_interval(ten, 0.95).halfWidth);
}

// ---------------------------------------------------------------------------
// Parameter validation and naming
// ---------------------------------------------------------------------------

TEST_CASE("validate_params") {
    ModelParams p;
    CHECK_FALSE(validate_params(ModelKind::Pi, p).has_value());
    CHECK_FALSE(validate_params(ModelKind::Walk, p).has_value());

    ModelParams bad = p;
    bad.replications = 0;
    CHECK_THROWS_AS(validate_params(ModelKind::Pi, bad), DomainError);
    bad = p;
    bad.draws = 0;
    CHECK_THROWS_AS(validate_params(ModelKind::Pi, bad), DomainError);
    CHECK_FALSE(validate_params(ModelKind::Walk, bad).has_value());  // draws is pi-only
    bad = p;
    bad.clients = 0;
    CHECK_THROWS_AS(validate_params(ModelKind::Mm1, bad), DomainError);
    bad = p;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(validate_params(ModelKind::Mm1, bad), DomainError);
    bad = p;
    bad.mu = -1.0;
    CHECK_THROWS_AS(validate_params(ModelKind::Mm1, bad), DomainError);
    bad = p;
    bad.steps = 0;
    CHECK_THROWS_AS(validate_params(ModelKind::Walk, bad), DomainError);
    bad = p;
    bad.chunks = 1;
    CHECK_THROWS_AS(validate_params(ModelKind::Walk, bad), DomainError);

    ModelParams unstable = p;
    unstable.lambda = 1.0;
    unstable.mu = 1.0;
    auto warn = validate_params(ModelKind::Mm1, unstable);
    REQUIRE(warn.has_value());
    CHECK(warn->find("unstable") != std::string::npos);
}

TEST_CASE("model names round-trip") {
    for (auto m : {ModelKind::Pi, ModelKind::Mm1, ModelKind::Walk})
        CHECK(model_from_name(model_name(m)) == m);
    CHECK_THROWS_AS(model_from_name("mm2"), DomainError);
}

// ---------------------------------------------------------------------------
// Kernel bundles and device/host agreement
// ---------------------------------------------------------------------------

TEST_CASE("build_kernel bundle layout") {
    DeviceProfile prof;
    ModelParams p;
    p.replications = 300;
    p.draws = 10;

    KernelBundle pi = build_kernel(ModelKind::Pi, p, ExecutionMode::Tlp, prof);
    CHECK(pi.cfg.blockDim.x == 256);
    CHECK(pi.cfg.gridDim.x == 2);
    CHECK(pi.primary == "out");
    REQUIRE(pi.arrays.size() == 2);
    for (const auto& [name, count] : pi.arrays) CHECK(count == 300);
    CHECK(pi.scalars.at("replications").i == 300);
    CHECK(pi.scalars.at("draws").i == 10);

    KernelBundle mm1 = build_kernel(ModelKind::Mm1, p, ExecutionMode::Wlp, prof);
    CHECK(mm1.primary == "outWait");
    CHECK(mm1.outputs == std::vector<std::string>{"outIdle", "outWait", "outSys"});
    CHECK(mm1.cfg.blockDim.x == 32);
    CHECK(mm1.cfg.gridDim.x == 300);

    KernelBundle walk = build_kernel(ModelKind::Walk, p, ExecutionMode::Sequential, prof);
    CHECK(walk.primary == "out");
    CHECK(walk.cfg.warpSize == 1);
}

TEST_CASE("device execution is bit-identical to the host references") {
    DeviceProfile prof;
    const std::uint64_t seed = 20260201;

    SUBCASE("pi, wlp") {
        ModelParams p;
        p.replications = 8;
        p.draws = 100;
        ModelRun run = run_model(ModelKind::Pi, p, ExecutionMode::Wlp, prof, seed);
        RngState master = rng_state_from_seed(seed);
        std::vector<RngState> streams = random_spacing(master, 8);
        REQUIRE(run.primary.size() == 8);
        for (int r = 0; r < 8; ++r) {
            CAPTURE(r);
            REQUIRE(run.primary[r] == pi_replication(100, streams[r]));
        }
    }

    SUBCASE("mm1, tlp: all three outputs") {
        ModelParams p;
        p.replications = 7;
        p.clients = 90;
        ModelRun run = run_model(ModelKind::Mm1, p, ExecutionMode::Tlp, prof, seed);
        RngState master = rng_state_from_seed(seed);
        std::vector<RngState> streams = random_spacing(master, 7);
        for (int r = 0; r < 7; ++r) {
            CAPTURE(r);
            MM1Result host = mm1_replication(90, p.lambda, p.mu, streams[r]);
            REQUIRE(run.outputs.at("outIdle")[r] == host.avgIdle);
            REQUIRE(run.outputs.at("outWait")[r] == host.avgWaitQueue);
            REQUIRE(run.outputs.at("outSys")[r] == host.avgSystem);
        }
    }

    SUBCASE("walk, both device modes") {
        ModelParams p;
        p.replications = 7;
        p.steps = 64;
        p.chunks = 5;
        for (auto mode : {ExecutionMode::Wlp, ExecutionMode::Tlp}) {
            ModelRun run = run_model(ModelKind::Walk, p, mode, prof, seed);
            RngState master = rng_state_from_seed(seed);
            std::vector<RngState> streams = random_spacing(master, 7);
            for (int r = 0; r < 7; ++r) {
                CAPTURE(mode_name(mode));
                CAPTURE(r);
                REQUIRE(run.primary[r] == walk_replication(64, 5, streams[r]));
            }
        }
    }
}

TEST_CASE("sequential mode: host outputs, replication-linear unit cost") {
    DeviceProfile prof;
    ModelParams p;
    p.draws = 50;

    p.replications = 1;
    ModelRun one = run_model(ModelKind::Pi, p, ExecutionMode::Sequential, prof, 99);
    p.replications = 9;
    ModelRun nine = run_model(ModelKind::Pi, p, ExecutionMode::Sequential, prof, 99);

    CHECK(nine.report.totalCycles == 9 * one.report.totalCycles);
    CHECK(nine.report.memReads == 9 * one.report.memReads);
    CHECK(nine.report.wavesExecuted == 0);
    CHECK(nine.report.divergenceEvents == 0);
    CHECK(nine.report.peakResidentWarps == 1);

    RngState master = rng_state_from_seed(99);
    std::vector<RngState> streams = random_spacing(master, 9);
    for (int r = 0; r < 9; ++r) REQUIRE(nine.primary[r] == pi_replication(50, streams[r]));
    CHECK(nine.primary[0] == one.primary[0]);
}

TEST_CASE("run_model surfaces warnings") {
    DeviceProfile prof;
    ModelParams p;
    p.replications = 50;
    p.clients = 20;
    p.lambda = 1.0;
    p.mu = 0.5;
    ModelRun run = run_model(ModelKind::Mm1, p, ExecutionMode::Tlp, prof, 1);
    REQUIRE(run.warning.has_value());
    CHECK(run.warning->find("unstable") != std::string::npos);
    CHECK(run.warning->find("warp") != std::string::npos);  // 50 % 32 != 0 geometry note too

    p.lambda = 0.5;
    p.mu = 1.0;
    p.replications = 64;
    CHECK_FALSE(run_model(ModelKind::Mm1, p, ExecutionMode::Tlp, prof, 1).warning.has_value());
}
