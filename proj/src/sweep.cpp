#include "warpsim/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "warpsim/error.hpp"

namespace warpsim {

namespace {

constexpr const char* kHeader =
    "replications,mode,model,total_cycles,mem_reads,mem_writes,divergence_events,waves,mean,"
    "ci_low,ci_high";

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, std::size_t lineno) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError("csv line " + std::to_string(lineno) + ": bad real '" + field + "'");
    return v;
}

template <class T>
T parse_integer(const std::string& field, std::size_t lineno) {
    T v = 0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError("csv line " + std::to_string(lineno) + ": bad integer '" + field + "'");
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DeviceProfile& prof) {
    if (spec.rMin < 1 || spec.rMin > spec.rMax)
        throw DomainError("sweep: need 1 <= rMin <= rMax");
    if (spec.rStep < 1) throw DomainError("sweep: rStep must be >= 1");
    if (spec.modes.empty()) throw DomainError("sweep: no execution modes selected");

    std::vector<SweepRow> rows;
    for (ExecutionMode mode : {ExecutionMode::Sequential, ExecutionMode::Tlp, ExecutionMode::Wlp}) {
        if (std::find(spec.modes.begin(), spec.modes.end(), mode) == spec.modes.end()) continue;
        for (std::int64_t R = spec.rMin; R <= spec.rMax; R += spec.rStep) {
            ModelParams params = spec.params;
            params.replications = R;
            ModelRun run = run_model(spec.model, params, mode, prof, spec.masterSeed,
                                     spec.tlpBlockSize);
            SweepRow row;
            row.replications = R;
            row.mode = mode;
            row.model = spec.model;
            row.totalCycles = run.report.totalCycles;
            row.memReads = run.report.memReads;
            row.memWrites = run.report.memWrites;
            row.divergenceEvents = run.report.divergenceEvents;
            row.waves = run.report.wavesExecuted;
            if (run.primary.size() >= 2) {
                ConfidenceInterval ci = confidence_interval(run.primary);
                row.mean = ci.mean;
                row.ciLow = ci.low();
                row.ciHigh = ci.high();
            } else {
                row.mean = run.primary.at(0);
                row.ciLow = row.mean;
                row.ciHigh = row.mean;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<std::int64_t> detect_steps(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& curve) {
    std::vector<std::int64_t> steps;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].first <= curve[i - 1].first)
            throw AnalysisError("step detection: curve not sorted by ascending R");
        if (curve[i].second < curve[i - 1].second)
            throw AnalysisError("step detection: cycles decreased at R=" +
                                std::to_string(curve[i].first) +
                                " — cost curves must be non-decreasing");
        if (curve[i].second > curve[i - 1].second) steps.push_back(curve[i].first);
    }
    return steps;
}

std::vector<std::pair<std::int64_t, std::int64_t>> curve_of(const std::vector<SweepRow>& rows,
                                                            ExecutionMode mode) {
    std::vector<std::pair<std::int64_t, std::int64_t>> curve;
    for (const SweepRow& row : rows)
        if (row.mode == mode) curve.emplace_back(row.replications, row.totalCycles);
    return curve;
}

std::string csv_string(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const SweepRow& r : rows) {
        out << r.replications << ',' << mode_name(r.mode) << ',' << model_name(r.model) << ','
            << r.totalCycles << ',' << r.memReads << ',' << r.memWrites << ','
            << r.divergenceEvents << ',' << r.waves << ',' << fmt_double(r.mean) << ','
            << fmt_double(r.ciLow) << ',' << fmt_double(r.ciHigh) << '\n';
    }
    return out.str();
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty()) throw DomainError("emit_csv: no rows");
    std::ofstream out(path);
    if (!out) throw Error("cannot write csv: " + path);
    out << csv_string(rows);
    if (!out.flush()) throw Error("write failed: " + path);
}

std::vector<SweepRow> parse_csv_string(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1) {
            if (line != kHeader) throw ParseError("csv line 1: unexpected header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> f = split_fields(line);
        if (f.size() != 11)
            throw ParseError("csv line " + std::to_string(lineno) + ": expected 11 fields, got " +
                             std::to_string(f.size()));
        SweepRow row;
        row.replications = parse_integer<std::int64_t>(f[0], lineno);
        try {
            row.mode = mode_from_name(f[1]);
            row.model = model_from_name(f[2]);
        } catch (const DomainError& e) {
            throw ParseError("csv line " + std::to_string(lineno) + ": " + e.what());
        }
        row.totalCycles = parse_integer<std::int64_t>(f[3], lineno);
        row.memReads = parse_integer<std::uint64_t>(f[4], lineno);
        row.memWrites = parse_integer<std::uint64_t>(f[5], lineno);
        row.divergenceEvents = parse_integer<std::uint64_t>(f[6], lineno);
        row.waves = parse_integer<std::int64_t>(f[7], lineno);
        row.mean = parse_double(f[8], lineno);
        row.ciLow = parse_double(f[9], lineno);
        row.ciHigh = parse_double(f[10], lineno);
        rows.push_back(row);
    }
    if (rows.empty()) throw ParseError("csv: no data rows");
    return rows;
}

std::vector<SweepRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open csv: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_string(buf.str());
}

}  // namespace warpsim
