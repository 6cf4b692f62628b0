#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/device.hpp"
#include "warpsim/kernel_ir.hpp"
#include "warpsim/rng.hpp"

namespace warpsim {

// How replications map onto the launch: one per warp (leader lane only),
// one per thread, or a host-side reference loop.
enum class ExecutionMode { Sequential, Tlp, Wlp };

const char* mode_name(ExecutionMode mode);  // "sequential" | "tlp" | "wlp"
ExecutionMode mode_from_name(const std::string& name);

// Warp a thread belongs to: global linear thread id over warpSize, truncating.
std::int64_t warp_index(const ThreadCoord& t, const BlockCoord& b, const LaunchConfig& cfg);

// True for the first lane of each hardware warp, i.e. the intra-block linear
// id is a multiple of warpSize.
bool is_warp_leader(const ThreadCoord& t, const LaunchConfig& cfg);

struct LaunchPlan {
    LaunchConfig cfg;
    std::int64_t replications = 0;
    ExecutionMode mode = ExecutionMode::Sequential;
    std::optional<std::string> warning;  // partial-warp geometry note
};

// Geometry per mode: WLP runs one warp-wide block per replication; TLP packs
// threads into flat 1D blocks of tlp_block_size; SEQUENTIAL is a single
// thread. A grid dimension that would exceed grid_limit is a PlanError —
// grids are never wrapped into 2D silently.
LaunchPlan plan_launch(std::int64_t replications, ExecutionMode mode, const DeviceProfile& prof,
                       int tlp_block_size = 256, std::int64_t grid_limit = 65535);

// Both wrappers require the body to declare local `rid` (Int) — read as its
// replication index — and param `replications` (Int), and to leave `rid`
// unassigned (a body whose first statement writes `rid` is treated as
// already wrapped).
//
// wrap_wlp prepends: rid := warpIdx; non-leader lanes halt; leaders run the
// body under a `rid < replications` bound.  wrap_tlp prepends: rid := global
// linear thread id; body under the same bound (tail threads of the last
// block stay inert).
KernelProgram wrap_wlp(const KernelProgram& body);
KernelProgram wrap_tlp(const KernelProgram& body);

// Scatters per-replication RNG streams to the lanes that consume them:
// replication r draws from global thread r*warpSize under WLP and thread r
// under TLP. Sequential returns the streams unchanged (replication r is
// loop iteration r).
std::vector<RngState> assign_lane_streams(ExecutionMode mode, const LaunchConfig& cfg,
                                          const std::vector<RngState>& replication_streams);

}  // namespace warpsim
