#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/kernel_ir.hpp"
#include "warpsim/rng.hpp"

namespace warpsim {

// Cost/capacity description of one device. Defaults model a Fermi-class
// part. deviceResidentBlockCap is the device-wide residency budget the
// dispatcher leaves for one kernel, counted in warp slots: a wave may hold
// at most that many warps across all SMs (for single-warp blocks this is
// simply a cap on co-resident blocks).
struct DeviceProfile {
    int numSMs = 14;
    int warpSchedulersPerSM = 2;
    int maxResidentBlocksPerSM = 8;
    int maxResidentWarpsPerSM = 48;
    int deviceResidentBlockCap = 64;
    std::int64_t aluIssueCycles = 1;
    std::int64_t memLatencyCycles = 400;
    int maxThreadsPerBlock = 1024;
};

void validate_profile(const DeviceProfile& prof);

// key = value lines, '#' comments; keys are exactly the field names above.
// Unknown keys are errors, missing keys keep their defaults.
DeviceProfile load_profile(const std::string& path);

// Blocks held by one SM during one wave.
using SmWave = std::vector<std::int64_t>;

struct DispatchPlan {
    // waves[w][sm] lists the block ids resident on that SM during wave w.
    std::vector<std::vector<SmWave>> waves;
    std::int64_t totalBlocks = 0;
    int warpsPerBlock = 1;

    std::int64_t wave_count() const { return static_cast<std::int64_t>(waves.size()); }
};

// Greedy round-robin placement of uniform blocks. A wave closes when the
// device residency budget or every SM's per-SM limits are exhausted.
DispatchPlan plan_dispatch(std::int64_t total_blocks, const DeviceProfile& prof,
                           int warps_per_block = 1);

struct SimOptions {
    // When set, blocks are dealt to waves/SMs in a seeded shuffled order
    // instead of ascending ids. Schedule-only knob: for kernels whose
    // memory effects are disjoint across blocks (all bundled models),
    // results and counters do not depend on it.
    std::optional<std::uint64_t> smPermutationSeed;
    int maskStackDepth = 32;
};

struct SimReport {
    std::int64_t totalCycles = 0;
    std::int64_t wavesExecuted = 0;
    std::int64_t peakResidentWarps = 0;
    std::uint64_t issues = 0;        // every issued statement
    std::uint64_t aluIssues = 0;     // non-memory issues
    std::uint64_t memReads = 0;      // warp-level load transactions
    std::uint64_t memWrites = 0;     // warp-level store transactions
    std::uint64_t divergenceEvents = 0;
};

// Runs every warp of the launch to completion, wave by wave. Per wave, an
// SM finishes after
//     max(longest warp critical path, ceil(issue slots / warpSchedulersPerSM))
// where a warp's critical path charges aluIssueCycles per issued statement
// plus memLatencyCycles per memory access; the wave ends when its slowest
// SM does. Warps execute in ascending block order deterministically; lane
// RNG streams are taken from `streams` by global linear thread id (default
// state when the vector is shorter).
SimReport simulate(const KernelProgram& prog, const LaunchConfig& cfg, const DeviceProfile& prof,
                   GlobalMemory& memory, const std::map<std::string, Value>& scalars,
                   const std::vector<RngState>& streams, const SimOptions& opts = {});

// Aggregate memory stall time versus useful compute issue time:
//     (memReads + memWrites) * memLatencyCycles / (aluIssues * aluIssueCycles)
// Throws DomainError when the report holds no ALU issues.
double report_mem_ratio(const SimReport& rep, const DeviceProfile& prof);

}  // namespace warpsim
