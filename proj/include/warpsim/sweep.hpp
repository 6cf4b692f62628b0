#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "warpsim/device.hpp"
#include "warpsim/models.hpp"
#include "warpsim/wlp.hpp"

namespace warpsim {

struct SweepSpec {
    ModelKind model = ModelKind::Pi;
    std::vector<ExecutionMode> modes;  // run order is canonical: sequential, tlp, wlp
    std::int64_t rMin = 1;
    std::int64_t rMax = 1;
    std::int64_t rStep = 1;
    ModelParams params;  // replications field is overridden per sweep point
    std::uint64_t masterSeed = 1;
    int tlpBlockSize = 256;
};

struct SweepRow {
    std::int64_t replications = 0;
    ExecutionMode mode = ExecutionMode::Sequential;
    ModelKind model = ModelKind::Pi;
    std::int64_t totalCycles = 0;
    std::uint64_t memReads = 0;
    std::uint64_t memWrites = 0;
    std::uint64_t divergenceEvents = 0;
    std::int64_t waves = 0;
    double mean = 0.0;
    double ciLow = 0.0;   // equal to mean when R = 1 (no interval from one sample)
    double ciHigh = 0.0;
};

// One row per (mode, R), modes in canonical order, R ascending; deterministic
// for a fixed masterSeed. The mean/CI summarize the model's primary output
// across replications. Throws DomainError on an invalid spec.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DeviceProfile& prof);

// All R with cycles(R) > cycles(previous swept R). The curve must be sorted
// by R with non-decreasing cycles; anything else is an AnalysisError.
std::vector<std::int64_t> detect_steps(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& curve);

// (R, totalCycles) points of one mode, in row order.
std::vector<std::pair<std::int64_t, std::int64_t>> curve_of(const std::vector<SweepRow>& rows,
                                                            ExecutionMode mode);

// Header `replications,mode,model,total_cycles,mem_reads,mem_writes,
// divergence_events,waves,mean,ci_low,ci_high`, one line per row, doubles in
// shortest round-trip decimal form.
std::string csv_string(const std::vector<SweepRow>& rows);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

std::vector<SweepRow> parse_csv_string(const std::string& text);
std::vector<SweepRow> parse_csv(const std::string& path);

}  // namespace warpsim
