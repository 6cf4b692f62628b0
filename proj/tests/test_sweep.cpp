#include "warpsim/sweep.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "warpsim/error.hpp"

using namespace warpsim;

namespace {

std::string root_path(const char* rel) { return std::string(WARPSIM_ROOT) + "/" + rel; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepSpec small_pi_spec() {
    SweepSpec spec;
    spec.model = ModelKind::Pi;
    spec.modes = {ExecutionMode::Sequential, ExecutionMode::Tlp, ExecutionMode::Wlp};
    spec.rMin = 1;
    spec.rMax = 2;
    spec.params.draws = 100;
    spec.masterSeed = 42;
    return spec;
}

}  // namespace

TEST_CASE("sweeps are deterministic and byte-stable against the golden file") {
    DeviceProfile prof;
    SweepSpec spec = small_pi_spec();
    std::string a = csv_string(run_sweep(spec, prof));
    std::string b = csv_string(run_sweep(spec, prof));
    CHECK(a == b);
    CHECK(a == slurp(root_path("tests/golden/sweep_pi.golden")));
}

TEST_CASE("row layout: canonical mode order, ascending R, degenerate R=1 interval") {
    DeviceProfile prof;
    SweepSpec spec = small_pi_spec();
    std::vector<SweepRow> rows = run_sweep(spec, prof);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].mode == ExecutionMode::Sequential);
    CHECK(rows[2].mode == ExecutionMode::Tlp);
    CHECK(rows[4].mode == ExecutionMode::Wlp);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        CHECK(rows[i].replications == 1);
        CHECK(rows[i + 1].replications == 2);
        CHECK(rows[i].ciLow == rows[i].mean);
        CHECK(rows[i].ciHigh == rows[i].mean);
        CHECK(rows[i + 1].ciLow < rows[i + 1].mean);
        CHECK(rows[i + 1].ciHigh > rows[i + 1].mean);
        CHECK(rows[i].model == ModelKind::Pi);
    }
    // same replication streams -> same estimates in every mode
    CHECK(rows[0].mean == rows[2].mean);
    CHECK(rows[0].mean == rows[4].mean);
    CHECK(rows[3].mean == rows[5].mean);
}

TEST_CASE("sequential rows scale linearly in R") {
    DeviceProfile prof;
    SweepSpec spec = small_pi_spec();
    spec.modes = {ExecutionMode::Sequential};
    spec.rMax = 5;
    std::vector<SweepRow> rows = run_sweep(spec, prof);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].totalCycles == static_cast<std::int64_t>(i + 1) * rows[0].totalCycles);
        CHECK(rows[i].waves == 0);
    }
}

TEST_CASE("run_sweep validates its spec") {
    DeviceProfile prof;
    SweepSpec spec = small_pi_spec();
    spec.rMin = 0;
    CHECK_THROWS_AS(run_sweep(spec, prof), DomainError);
    spec = small_pi_spec();
    spec.rMin = 3;
    spec.rMax = 2;
    CHECK_THROWS_AS(run_sweep(spec, prof), DomainError);
    spec = small_pi_spec();
    spec.rStep = 0;
    CHECK_THROWS_AS(run_sweep(spec, prof), DomainError);
    spec = small_pi_spec();
    spec.modes.clear();
    CHECK_THROWS_AS(run_sweep(spec, prof), DomainError);
}

TEST_CASE("rStep strides the replication axis") {
    DeviceProfile prof;
    SweepSpec spec = small_pi_spec();
    spec.modes = {ExecutionMode::Wlp};
    spec.rMin = 1;
    spec.rMax = 10;
    spec.rStep = 4;
    std::vector<SweepRow> rows = run_sweep(spec, prof);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].replications == 1);
    CHECK(rows[1].replications == 5);
    CHECK(rows[2].replications == 9);
}

TEST_CASE("detect_steps") {
    using Curve = std::vector<std::pair<std::int64_t, std::int64_t>>;
    CHECK(detect_steps(Curve{{1, 5}, {2, 5}, {3, 5}}).empty());
    CHECK(detect_steps(Curve{}).empty());
    CHECK(detect_steps(Curve{{1, 5}}).empty());
    CHECK(detect_steps(Curve{{1, 5}, {2, 5}, {3, 7}, {4, 7}, {5, 9}}) ==
          std::vector<std::int64_t>{3, 5});
    CHECK_THROWS_AS(detect_steps(Curve{{1, 5}, {2, 4}}), AnalysisError);
    CHECK_THROWS_AS(detect_steps(Curve{{2, 5}, {1, 6}}), AnalysisError);
}

TEST_CASE("wlp cost curve steps exactly at the residency cap") {
    DeviceProfile prof;
    SweepSpec spec;
    spec.model = ModelKind::Pi;
    spec.modes = {ExecutionMode::Wlp};
    spec.rMin = 1;
    spec.rMax = 70;
    spec.params.draws = 20;
    spec.masterSeed = 42;
    std::vector<SweepRow> rows = run_sweep(spec, prof);
    auto curve = curve_of(rows, ExecutionMode::Wlp);
    REQUIRE(curve.size() == 70);
    CHECK(detect_steps(curve) == std::vector<std::int64_t>{65});
    for (int i = 1; i < 64; ++i) CHECK(curve[i].second == curve[0].second);
    CHECK(rows[64].waves == 2);
    CHECK(rows[63].waves == 1);
}

TEST_CASE("curve_of slices one mode in row order") {
    DeviceProfile prof;
    std::vector<SweepRow> rows = run_sweep(small_pi_spec(), prof);
    auto seq = curve_of(rows, ExecutionMode::Sequential);
    auto wlp = curve_of(rows, ExecutionMode::Wlp);
    REQUIRE(seq.size() == 2);
    REQUIRE(wlp.size() == 2);
    CHECK(seq[0].first == 1);
    CHECK(seq[1].first == 2);
    CHECK(seq[1].second == rows[1].totalCycles);
    CHECK(wlp[0].second == rows[4].totalCycles);
    CHECK(curve_of(rows, ExecutionMode::Tlp).size() == 2);
    SweepSpec only_seq = small_pi_spec();
    only_seq.modes = {ExecutionMode::Sequential};
    CHECK(curve_of(run_sweep(only_seq, prof), ExecutionMode::Wlp).empty());
}

TEST_CASE("csv round-trips through text") {
    DeviceProfile prof;
    std::vector<SweepRow> rows = run_sweep(small_pi_spec(), prof);
    std::vector<SweepRow> back = parse_csv_string(csv_string(rows));
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(back[i].replications == rows[i].replications);
        CHECK(back[i].mode == rows[i].mode);
        CHECK(back[i].model == rows[i].model);
        CHECK(back[i].totalCycles == rows[i].totalCycles);
        CHECK(back[i].memReads == rows[i].memReads);
        CHECK(back[i].memWrites == rows[i].memWrites);
        CHECK(back[i].divergenceEvents == rows[i].divergenceEvents);
        CHECK(back[i].waves == rows[i].waves);
        // shortest-form doubles parse back bit-identical
        CHECK(back[i].mean == rows[i].mean);
        CHECK(back[i].ciLow == rows[i].ciLow);
        CHECK(back[i].ciHigh == rows[i].ciHigh);
    }
}

TEST_CASE("csv round-trips through a file") {
    DeviceProfile prof;
    std::vector<SweepRow> rows = run_sweep(small_pi_spec(), prof);
    const std::string path = "/tmp/warpsim_sweep_roundtrip.csv";
    emit_csv(rows, path);
    std::vector<SweepRow> back = parse_csv(path);
    REQUIRE(back.size() == rows.size());
    CHECK(csv_string(back) == csv_string(rows));
    std::remove(path.c_str());

    CHECK_THROWS_AS(emit_csv({}, "/tmp/warpsim_empty.csv"), DomainError);
    CHECK_THROWS_AS(emit_csv(rows, "/nonexistent-dir/x.csv"), Error);
    CHECK_THROWS_AS(parse_csv("/nonexistent-dir/x.csv"), Error);
}

TEST_CASE("csv parser rejects malformed input") {
    const char* good =
        "replications,mode,model,total_cycles,mem_reads,mem_writes,divergence_events,waves,mean,"
        "ci_low,ci_high\n"
        "1,wlp,pi,10,1,1,0,1,3.0,3.0,3.0\n";
    REQUIRE(parse_csv_string(good).size() == 1);

    CHECK_THROWS_AS(parse_csv_string(""), ParseError);
    CHECK_THROWS_AS(parse_csv_string("r,mode\n1,wlp\n"), ParseError);
    // wrong field count
    CHECK_THROWS_AS(parse_csv_string(std::string(good) + "1,wlp,pi,10\n"), ParseError);
    // non-numeric cycles
    CHECK_THROWS_AS(parse_csv_string(std::string(good) + "1,wlp,pi,ten,1,1,0,1,3,3,3\n"),
                    ParseError);
    // unknown mode / model names
    CHECK_THROWS_AS(parse_csv_string(std::string(good) + "1,slp,pi,10,1,1,0,1,3,3,3\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_csv_string(std::string(good) + "1,wlp,pie,10,1,1,0,1,3,3,3\n"),
                    ParseError);
}
