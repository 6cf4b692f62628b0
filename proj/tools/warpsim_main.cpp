// warpsim: sweep replication counts across execution modes, inspect cost
// curves, or summarize one configuration with a confidence interval.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "warpsim/device.hpp"
#include "warpsim/error.hpp"
#include "warpsim/kernel_text.hpp"
#include "warpsim/models.hpp"
#include "warpsim/sweep.hpp"
#include "warpsim/wlp.hpp"

namespace {

using namespace warpsim;

struct CommonArgs {
    std::string model = "pi";
    std::string profilePath;
    std::uint64_t seed = 1;
    int tlpBlockSize = 256;
    ModelParams params;
};

void add_model_options(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--model", a.model, "pi | mm1 | walk")->capture_default_str();
    cmd->add_option("--profile", a.profilePath, "device profile file (key = value lines)");
    cmd->add_option("--seed", a.seed, "master seed for replication streams")
        ->capture_default_str();
    cmd->add_option("--tlp-block-size", a.tlpBlockSize, "threads per block under tlp")
        ->capture_default_str();
    cmd->add_option("--draws", a.params.draws, "pi: points per replication")
        ->capture_default_str();
    cmd->add_option("--clients", a.params.clients, "mm1: clients per replication")
        ->capture_default_str();
    cmd->add_option("--lambda", a.params.lambda, "mm1: arrival rate")->capture_default_str();
    cmd->add_option("--mu", a.params.mu, "mm1: service rate")->capture_default_str();
    cmd->add_option("--steps", a.params.steps, "walk: steps per replication")
        ->capture_default_str();
    cmd->add_option("--chunks", a.params.chunks, "walk: chunk count for the final position")
        ->capture_default_str();
}

DeviceProfile resolve_profile(const CommonArgs& a) {
    if (a.profilePath.empty()) return DeviceProfile{};
    return load_profile(a.profilePath);
}

std::vector<ExecutionMode> parse_modes(const std::string& csv) {
    std::vector<ExecutionMode> modes;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        std::string item = csv.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) modes.push_back(mode_from_name(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (modes.empty()) throw DomainError("no execution modes given");
    return modes;
}

void print_steps_for(const std::vector<SweepRow>& rows) {
    for (ExecutionMode mode :
         {ExecutionMode::Sequential, ExecutionMode::Tlp, ExecutionMode::Wlp}) {
        auto curve = curve_of(rows, mode);
        if (curve.empty()) continue;
        auto steps = detect_steps(curve);
        std::printf("%-10s points=%zu plateau=%lld cycles", mode_name(mode), curve.size(),
                    static_cast<long long>(curve.front().second));
        if (steps.empty()) {
            std::printf(" steps=none\n");
        } else {
            std::printf(" steps=");
            for (std::size_t i = 0; i < steps.size(); ++i)
                std::printf("%s%lld", i ? "," : "", static_cast<long long>(steps[i]));
            std::printf("\n");
        }
    }
}

int run_sweep_cmd(const CommonArgs& a, const std::string& modesCsv, std::int64_t rMin,
                  std::int64_t rMax, std::int64_t rStep, const std::string& outPath,
                  bool dumpKernel, bool wallclock) {
    SweepSpec spec;
    spec.model = model_from_name(a.model);
    spec.modes = parse_modes(modesCsv);
    spec.rMin = rMin;
    spec.rMax = rMax;
    spec.rStep = rStep;
    spec.params = a.params;
    spec.masterSeed = a.seed;
    spec.tlpBlockSize = a.tlpBlockSize;
    DeviceProfile prof = resolve_profile(a);

    if (dumpKernel) {
        ModelParams p = a.params;
        p.replications = rMax;
        for (ExecutionMode mode : spec.modes) {
            KernelBundle b = build_kernel(spec.model, p, mode, prof, a.tlpBlockSize);
            std::printf("; %s, %s, R=%lld\n%s\n", model_name(spec.model), mode_name(mode),
                        static_cast<long long>(rMax), dump_kernel(b.program).c_str());
        }
        return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepRow> rows = run_sweep(spec, prof);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (outPath.empty()) {
        std::fputs(csv_string(rows).c_str(), stdout);
    } else {
        emit_csv(rows, outPath);
        std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), outPath.c_str());
    }
    if (wallclock)
        std::fprintf(stderr, "host wall clock: %.3fs (illustrative; cost lives in total_cycles)\n",
                     secs);
    return 0;
}

int run_steps_cmd(const std::string& csvPath) {
    print_steps_for(parse_csv(csvPath));
    return 0;
}

int run_ci_cmd(const CommonArgs& a, const std::string& modeName, std::int64_t replications,
               double level) {
    ModelKind model = model_from_name(a.model);
    ExecutionMode mode = mode_from_name(modeName);
    ModelParams p = a.params;
    p.replications = replications;
    DeviceProfile prof = resolve_profile(a);

    ModelRun run = run_model(model, p, mode, prof, a.seed, a.tlpBlockSize);
    if (run.warning) std::fprintf(stderr, "warning: %s\n", run.warning->c_str());

    auto print_one = [&](const std::string& name, const std::vector<double>& samples) {
        if (samples.size() < 2) {
            std::printf("%-8s n=%zu mean=%.10g (need >= 2 replications for an interval)\n",
                        name.c_str(), samples.size(), samples.empty() ? 0.0 : samples[0]);
            return;
        }
        ConfidenceInterval ci = confidence_interval(samples, level);
        std::printf("%-8s n=%lld mean=%.10g ci%.0f=[%.10g, %.10g] half=%.4g%s\n", name.c_str(),
                    static_cast<long long>(ci.n), ci.mean, level * 100.0, ci.low(), ci.high(),
                    ci.halfWidth, ci.warnSmallSample ? "  (small sample: n < 30)" : "");
    };

    if (model == ModelKind::Mm1) {
        print_one("idle", run.outputs.at("outIdle"));
        print_one("wait", run.outputs.at("outWait"));
        print_one("system", run.outputs.at("outSys"));
    } else {
        print_one("estimate", run.primary);
    }
    std::printf("cycles=%lld waves=%lld divergence=%llu mem_reads=%llu mem_writes=%llu\n",
                static_cast<long long>(run.report.totalCycles),
                static_cast<long long>(run.report.wavesExecuted),
                static_cast<unsigned long long>(run.report.divergenceEvents),
                static_cast<unsigned long long>(run.report.memReads),
                static_cast<unsigned long long>(run.report.memWrites));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIMT device simulator for replicated stochastic models"};
    app.require_subcommand(1);

    CommonArgs sweepArgs, ciArgs;
    std::string modesCsv = "sequential,tlp,wlp";
    std::int64_t rMin = 1, rMax = 1, rStep = 1;
    std::string outPath, stepsCsvPath, ciMode = "sequential";
    std::int64_t ciReps = 30;
    double ciLevel = 0.95;
    bool dumpKernel = false, wallclock = false;

    CLI::App* sweep = app.add_subcommand("sweep", "run a replication sweep, emit CSV");
    add_model_options(sweep, sweepArgs);
    sweep->add_option("--modes", modesCsv, "comma list of sequential,tlp,wlp")
        ->capture_default_str();
    sweep->add_option("--r-min", rMin, "first replication count")->capture_default_str();
    sweep->add_option("--r-max", rMax, "last replication count")->capture_default_str();
    sweep->add_option("--r-step", rStep, "replication stride")->capture_default_str();
    sweep->add_option("--out", outPath, "CSV path (default: stdout)");
    sweep->add_flag("--dump-kernel", dumpKernel, "print the kernel text instead of running");
    sweep->add_flag("--wallclock", wallclock, "report host wall time on stderr");

    CLI::App* steps = app.add_subcommand("steps", "locate cost-curve steps in a sweep CSV");
    steps->add_option("csv", stepsCsvPath, "CSV produced by `warpsim sweep`")->required();

    CLI::App* ci = app.add_subcommand("ci", "confidence interval for one configuration");
    add_model_options(ci, ciArgs);
    ci->add_option("--mode", ciMode, "sequential | tlp | wlp")->capture_default_str();
    ci->add_option("--replications", ciReps, "replication count")->capture_default_str();
    ci->add_option("--level", ciLevel, "confidence level in (0,1)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return run_sweep_cmd(sweepArgs, modesCsv, rMin, rMax, rStep, outPath, dumpKernel,
                                 wallclock);
        if (steps->parsed()) return run_steps_cmd(stepsCsvPath);
        return run_ci_cmd(ciArgs, ciMode, ciReps, ciLevel);
    } catch (const warpsim::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const warpsim::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
