#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/device.hpp"
#include "warpsim/error.hpp"
#include "warpsim/kernel_ir.hpp"
#include "warpsim/rng.hpp"
#include "warpsim/wlp.hpp"

namespace warpsim {

enum class ModelKind { Pi, Mm1, Walk };

const char* model_name(ModelKind model);  // "pi" | "mm1" | "walk"
ModelKind model_from_name(const std::string& name);

struct ModelParams {
    std::int64_t replications = 1;
    std::int64_t draws = 1000;    // pi: points per replication
    std::int64_t clients = 1000;  // mm1
    double lambda = 0.5;          // mm1 arrival rate
    double mu = 1.0;              // mm1 service rate
    std::int64_t steps = 1000;    // walk
    std::int64_t chunks = 30;     // walk
};

// Throws DomainError on invalid values; lambda >= mu is legal but returns a
// steady-state warning.
std::optional<std::string> validate_params(ModelKind model, const ModelParams& p);

struct MM1Result {
    double avgIdle = 0.0;
    double avgWaitQueue = 0.0;
    double avgSystem = 0.0;
};

// ---------------------------------------------------------------------------
// Host reference replications. Each mirrors its kernel body operation for
// operation so device and host results are bit-identical given the same
// uniform sequence. U is any callable double() yielding values in [0,1).
// ---------------------------------------------------------------------------

template <class U>
double pi_replication_u(std::int64_t draws, U&& next) {
    if (draws < 1) throw DomainError("pi: draws must be >= 1");
    double c = 0.0;
    for (std::int64_t i = 0; i < draws; ++i) {
        const double x = next();
        const double y = next();
        c = c + ((x * x + y * y <= 1.0) ? 1.0 : 0.0);
    }
    return (4.0 * c) / static_cast<double>(draws);
}

template <class U>
MM1Result mm1_replication_u(std::int64_t clients, double lambda, double mu, U&& next) {
    if (clients < 1) throw DomainError("mm1: clients must be >= 1");
    if (!(lambda > 0.0) || !(mu > 0.0)) throw DomainError("mm1: rates must be > 0");
    double w = 0.0, s = 0.0, idle = 0.0, sumw = 0.0, sums = 0.0;
    for (std::int64_t i = 0; i < clients; ++i) {
        const double a = -std::log(1.0 - next()) / lambda;  // inter-arrival
        const double t = (w + s) - a;
        if (t < 0.0) {  // server ran dry before this client arrived
            idle = idle - t;
            w = 0.0;
        } else {
            w = t;
        }
        s = -std::log(1.0 - next()) / mu;
        sumw = sumw + w;
        sums = sums + (w + s);
    }
    MM1Result r;
    r.avgIdle = idle / static_cast<double>(clients);
    r.avgWaitQueue = sumw / static_cast<double>(clients);
    r.avgSystem = sums / static_cast<double>(clients);
    return r;
}

// Returns the walker's final-x chunk id in [0, chunks) as an integral double.
template <class U>
double walk_replication_u(std::int64_t steps, std::int64_t chunks, U&& next) {
    if (steps < 1) throw DomainError("walk: steps must be >= 1");
    if (chunks < 2) throw DomainError("walk: chunks must be >= 2");
    double px = 0.0, py = 0.0;
    for (std::int64_t i = 0; i < steps; ++i) {
        const double u = next();
        next();  // second draw discarded: keeps two draws per step, like pi
        const std::int64_t d = static_cast<std::int64_t>(std::floor(4.0 * u));
        if (d == 0) {
            px = px + 1.0;
        } else if (d == 1) {
            px = px - 1.0;
        } else if (d == 2) {
            py = py + 1.0;
        } else {
            py = py - 1.0;
        }
    }
    const double c = static_cast<double>(chunks);
    return std::fmod(std::fmod(px, c) + c, c);
}

double pi_replication(std::int64_t draws, RngState stream);
MM1Result mm1_replication(std::int64_t clients, double lambda, double mu, RngState stream);
double walk_replication(std::int64_t steps, std::int64_t chunks, RngState stream);

// ---------------------------------------------------------------------------
// Replication statistics
// ---------------------------------------------------------------------------

struct ConfidenceInterval {
    double mean = 0.0;
    double halfWidth = 0.0;
    double level = 0.95;
    std::int64_t n = 0;
    bool warnSmallSample = false;  // n < 30: the Gaussian approximation is shaky

    double low() const { return mean - halfWidth; }
    double high() const { return mean + halfWidth; }
};

// Gaussian CI from sample mean and sample standard deviation (n-1 divisor):
// halfWidth = z(level) * s / sqrt(n). Throws DomainError for n < 2 or a
// level outside (0,1).
ConfidenceInterval confidence_interval(const std::vector<double>& samples, double level = 0.95);

// Standard normal quantile, exact to double precision (rational initial
// guess plus Halley refinement); exposed for direct testing.
double inverse_normal_cdf(double p);

// ---------------------------------------------------------------------------
// Kernel construction and orchestration
// ---------------------------------------------------------------------------

// Unwrapped model body: declares local `rid` and param `replications` so it
// can be wrapped for either device mode, reads its scalar params by name,
// and writes per-replication results to rid-indexed arrays.
KernelProgram build_model_body(ModelKind model);

struct KernelBundle {
    KernelProgram program;  // wrapped for TLP/WLP; the bare body for SEQUENTIAL
    LaunchConfig cfg;
    std::map<std::string, Value> scalars;
    std::vector<std::pair<std::string, std::int64_t>> arrays;  // name -> element count
    std::vector<std::string> outputs;  // arrays carrying per-replication results
    std::string primary;               // output used for sweep statistics
    std::optional<std::string> warning;
};

KernelBundle build_kernel(ModelKind model, const ModelParams& p, ExecutionMode mode,
                          const DeviceProfile& prof, int tlp_block_size = 256);

struct ModelRun {
    std::map<std::string, std::vector<double>> outputs;  // by array name, size = replications
    std::vector<double> primary;                         // outputs[bundle.primary]
    SimReport report;
    LaunchConfig cfg;
    ExecutionMode mode = ExecutionMode::Sequential;
    std::optional<std::string> warning;
};

// Seeds one stream per replication by random spacing from master_seed, runs
// the model in the given mode, and collects per-replication outputs.
// SEQUENTIAL computes outputs with the host references and charges
// replications * (unit-cost issue count of one body execution) cycles.
ModelRun run_model(ModelKind model, const ModelParams& p, ExecutionMode mode,
                   const DeviceProfile& prof, std::uint64_t master_seed,
                   int tlp_block_size = 256, const SimOptions& opts = {});

}  // namespace warpsim
