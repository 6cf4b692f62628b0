#include "warpsim/device.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>

#include "warpsim/error.hpp"
#include "warpsim/warp_exec.hpp"

namespace warpsim {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::int64_t parse_int_field(const std::string& key, const std::string& value, int line) {
    std::int64_t out = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto res = std::from_chars(b, e, out);
    if (res.ec != std::errc{} || res.ptr != e)
        throw DomainError("profile line " + std::to_string(line) + ": bad integer for '" + key +
                          "': " + value);
    return out;
}

}  // namespace

void validate_profile(const DeviceProfile& prof) {
    auto positive = [](std::int64_t v, const char* what) {
        if (v < 1) throw DomainError(std::string("profile: ") + what + " must be >= 1");
    };
    positive(prof.numSMs, "numSMs");
    positive(prof.warpSchedulersPerSM, "warpSchedulersPerSM");
    positive(prof.maxResidentBlocksPerSM, "maxResidentBlocksPerSM");
    positive(prof.maxResidentWarpsPerSM, "maxResidentWarpsPerSM");
    positive(prof.deviceResidentBlockCap, "deviceResidentBlockCap");
    positive(prof.aluIssueCycles, "aluIssueCycles");
    positive(prof.memLatencyCycles, "memLatencyCycles");
    positive(prof.maxThreadsPerBlock, "maxThreadsPerBlock");
    if (static_cast<std::int64_t>(prof.deviceResidentBlockCap) >
        static_cast<std::int64_t>(prof.numSMs) * prof.maxResidentBlocksPerSM)
        throw DomainError("profile: deviceResidentBlockCap exceeds numSMs * maxResidentBlocksPerSM");
}

DeviceProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open profile: " + path);
    DeviceProfile prof;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw DomainError("profile line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key == "numSMs") {
            prof.numSMs = static_cast<int>(parse_int_field(key, value, lineno));
        } else if (key == "warpSchedulersPerSM") {
            prof.warpSchedulersPerSM = static_cast<int>(parse_int_field(key, value, lineno));
        } else if (key == "maxResidentBlocksPerSM") {
            prof.maxResidentBlocksPerSM = static_cast<int>(parse_int_field(key, value, lineno));
        } else if (key == "maxResidentWarpsPerSM") {
            prof.maxResidentWarpsPerSM = static_cast<int>(parse_int_field(key, value, lineno));
        } else if (key == "deviceResidentBlockCap") {
            prof.deviceResidentBlockCap = static_cast<int>(parse_int_field(key, value, lineno));
        } else if (key == "aluIssueCycles") {
            prof.aluIssueCycles = parse_int_field(key, value, lineno);
        } else if (key == "memLatencyCycles") {
            prof.memLatencyCycles = parse_int_field(key, value, lineno);
        } else if (key == "maxThreadsPerBlock") {
            prof.maxThreadsPerBlock = static_cast<int>(parse_int_field(key, value, lineno));
        } else {
            throw DomainError("profile line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
    validate_profile(prof);
    return prof;
}

DispatchPlan plan_dispatch(std::int64_t total_blocks, const DeviceProfile& prof,
                           int warps_per_block) {
    validate_profile(prof);
    if (total_blocks < 0) throw PlanError("plan: negative block count");
    if (warps_per_block < 1) throw PlanError("plan: warps_per_block must be >= 1");
    if (warps_per_block > prof.maxResidentWarpsPerSM ||
        warps_per_block > prof.deviceResidentBlockCap)
        throw PlanError("plan: a " + std::to_string(warps_per_block) +
                        "-warp block can never become resident on this device");

    DispatchPlan plan;
    plan.totalBlocks = total_blocks;
    plan.warpsPerBlock = warps_per_block;

    std::int64_t placed = 0;
    while (placed < total_blocks) {
        std::vector<SmWave> wave(prof.numSMs);
        std::vector<int> blocks_on(prof.numSMs, 0);
        std::vector<int> warps_on(prof.numSMs, 0);
        int budget_warps = 0;  // device-wide residency budget, in warp slots
        int cursor = 0;
        while (placed < total_blocks &&
               budget_warps + warps_per_block <= prof.deviceResidentBlockCap) {
            int chosen = -1;
            for (int k = 0; k < prof.numSMs; ++k) {
                const int sm = (cursor + k) % prof.numSMs;
                if (blocks_on[sm] < prof.maxResidentBlocksPerSM &&
                    warps_on[sm] + warps_per_block <= prof.maxResidentWarpsPerSM) {
                    chosen = sm;
                    break;
                }
            }
            if (chosen < 0) break;
            wave[chosen].push_back(placed);
            blocks_on[chosen] += 1;
            warps_on[chosen] += warps_per_block;
            budget_warps += warps_per_block;
            placed += 1;
            cursor = (chosen + 1) % prof.numSMs;
        }
        plan.waves.push_back(std::move(wave));
    }
    return plan;
}

SimReport simulate(const KernelProgram& prog, const LaunchConfig& cfg, const DeviceProfile& prof,
                   GlobalMemory& memory, const std::map<std::string, Value>& scalars,
                   const std::vector<RngState>& streams, const SimOptions& opts) {
    validate_launch(cfg);
    validate_profile(prof);
    prog.finalize();
    if (cfg.threads_per_block() > prof.maxThreadsPerBlock)
        throw PlanError("block of " + std::to_string(cfg.threads_per_block()) +
                        " threads exceeds maxThreadsPerBlock " +
                        std::to_string(prof.maxThreadsPerBlock));

    const std::int64_t total_blocks = cfg.total_blocks();
    const int wpb = static_cast<int>(cfg.warps_per_block());
    const std::int64_t tpb = cfg.threads_per_block();
    DispatchPlan plan = plan_dispatch(total_blocks, prof, wpb);

    // Plan slots map to block ids; a seeded shuffle reorders that mapping.
    std::vector<std::int64_t> slot_to_block(total_blocks);
    std::iota(slot_to_block.begin(), slot_to_block.end(), 0);
    if (opts.smPermutationSeed) {
        std::mt19937_64 gen(*opts.smPermutationSeed);
        std::shuffle(slot_to_block.begin(), slot_to_block.end(), gen);
    }

    ParamEnv env = bind_params(prog, scalars, memory);
    SimReport rep;
    rep.wavesExecuted = plan.wave_count();

    for (const auto& wave : plan.waves) {
        // Run in ascending block order for a deterministic memory schedule,
        // independent of which SM a block landed on.
        std::vector<std::pair<std::int64_t, int>> order;  // (block id, sm)
        std::int64_t wave_warps = 0;
        for (int sm = 0; sm < prof.numSMs; ++sm) {
            for (std::int64_t slot : wave[sm]) {
                order.emplace_back(slot_to_block[slot], sm);
                wave_warps += wpb;
            }
        }
        std::sort(order.begin(), order.end());
        rep.peakResidentWarps = std::max(rep.peakResidentWarps, wave_warps);

        std::vector<std::int64_t> sm_cp(prof.numSMs, 0);
        std::vector<std::int64_t> sm_issue_cycles(prof.numSMs, 0);
        for (const auto& [block_id, sm] : order) {
            const BlockCoord bc{block_id % cfg.gridDim.x, block_id / cfg.gridDim.x};
            for (int w = 0; w < wpb; ++w) {
                std::vector<RngState> lane_streams(cfg.warpSize);
                for (int l = 0; l < cfg.warpSize; ++l) {
                    const std::int64_t tid_in_block =
                        static_cast<std::int64_t>(w) * cfg.warpSize + l;
                    if (tid_in_block >= tpb) break;
                    const std::int64_t tid =
                        tid_in_block + tpb * (bc.x + cfg.gridDim.x * bc.y);
                    if (tid < static_cast<std::int64_t>(streams.size()))
                        lane_streams[l] = streams[tid];
                }
                WarpState warp(prog, cfg, bc, w, std::move(lane_streams), {},
                               opts.maskStackDepth);
                const WarpRunStats st = run_warp(warp, env);

                const std::int64_t cp =
                    static_cast<std::int64_t>(st.issues) * prof.aluIssueCycles +
                    static_cast<std::int64_t>(st.mem_reads + st.mem_writes) *
                        prof.memLatencyCycles;
                sm_cp[sm] = std::max(sm_cp[sm], cp);
                sm_issue_cycles[sm] +=
                    static_cast<std::int64_t>(st.issues) * prof.aluIssueCycles;

                rep.issues += st.issues;
                rep.aluIssues += st.alu_issues;
                rep.memReads += st.mem_reads;
                rep.memWrites += st.mem_writes;
                rep.divergenceEvents += st.divergence_events;
            }
        }

        std::int64_t wave_time = 0;
        for (int sm = 0; sm < prof.numSMs; ++sm) {
            const std::int64_t t =
                std::max(sm_cp[sm], ceil_div(sm_issue_cycles[sm], prof.warpSchedulersPerSM));
            wave_time = std::max(wave_time, t);
        }
        rep.totalCycles += wave_time;
    }
    return rep;
}

double report_mem_ratio(const SimReport& rep, const DeviceProfile& prof) {
    if (rep.aluIssues == 0) throw DomainError("mem ratio undefined: no ALU issues in report");
    const double stall = static_cast<double>(prof.memLatencyCycles) *
                         static_cast<double>(rep.memReads + rep.memWrites);
    const double compute = static_cast<double>(prof.aluIssueCycles) *
                           static_cast<double>(rep.aluIssues);
    return stall / compute;
}

}  // namespace warpsim
