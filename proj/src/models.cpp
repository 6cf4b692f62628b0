#include "warpsim/models.hpp"

#include <cmath>
#include <numbers>

#include "warpsim/warp_exec.hpp"

namespace warpsim {

const char* model_name(ModelKind model) {
    switch (model) {
        case ModelKind::Pi: return "pi";
        case ModelKind::Mm1: return "mm1";
        case ModelKind::Walk: return "walk";
    }
    return "?";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "pi") return ModelKind::Pi;
    if (name == "mm1") return ModelKind::Mm1;
    if (name == "walk") return ModelKind::Walk;
    throw DomainError("unknown model '" + name + "' (pi|mm1|walk)");
}

std::optional<std::string> validate_params(ModelKind model, const ModelParams& p) {
    if (p.replications < 1) throw DomainError("params: replications must be >= 1");
    switch (model) {
        case ModelKind::Pi:
            if (p.draws < 1) throw DomainError("pi: draws must be >= 1");
            break;
        case ModelKind::Mm1:
            if (p.clients < 1) throw DomainError("mm1: clients must be >= 1");
            if (!(p.lambda > 0.0) || !(p.mu > 0.0)) throw DomainError("mm1: rates must be > 0");
            if (p.lambda >= p.mu)
                return "mm1: lambda >= mu, queue is unstable; steady-state comparisons are off";
            break;
        case ModelKind::Walk:
            if (p.steps < 1) throw DomainError("walk: steps must be >= 1");
            if (p.chunks < 2) throw DomainError("walk: chunks must be >= 2");
            break;
    }
    return std::nullopt;
}

double pi_replication(std::int64_t draws, RngState stream) {
    TausStream u{stream};
    return pi_replication_u(draws, u);
}

MM1Result mm1_replication(std::int64_t clients, double lambda, double mu, RngState stream) {
    TausStream u{stream};
    return mm1_replication_u(clients, lambda, mu, u);
}

double walk_replication(std::int64_t steps, std::int64_t chunks, RngState stream) {
    TausStream u{stream};
    return walk_replication_u(steps, chunks, u);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_normal_cdf: p outside (0,1)");
    // Rational approximation (Acklam), then Halley steps to full precision.
    static constexpr double A[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double B[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double C[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double D[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q /
            (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5]) /
            ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0);
    }
    for (int k = 0; k < 2; ++k) {
        const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
        x = x - u / (1.0 + x * u / 2.0);
    }
    return x;
}

ConfidenceInterval confidence_interval(const std::vector<double>& samples, double level) {
    const std::int64_t n = static_cast<std::int64_t>(samples.size());
    if (n < 2) throw DomainError("confidence_interval: need at least 2 samples");
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("confidence_interval: level outside (0,1)");
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double s = std::sqrt(ss / static_cast<double>(n - 1));
    const double z = inverse_normal_cdf(0.5 + level / 2.0);

    ConfidenceInterval ci;
    ci.mean = mean;
    ci.halfWidth = z * s / std::sqrt(static_cast<double>(n));
    ci.level = level;
    ci.n = n;
    ci.warnSmallSample = n < 30;
    return ci;
}

namespace {

// -log(1 - draw) / rate
ExprId exp_draw(KernelProgram& p, const std::string& rate_param) {
    ExprId one_minus = p.bin(BinOp::Sub, p.cr(1.0), p.draw());
    return p.bin(BinOp::Div, p.un(UnOp::Neg, p.un(UnOp::Log, one_minus)),
                 p.param(rate_param));
}

KernelProgram build_pi_body() {
    KernelProgram p;
    p.add_param("replications", ParamKind::Int);
    p.add_param("draws", ParamKind::Int);
    p.add_param("cnt", ParamKind::Array);
    p.add_param("out", ParamKind::Array);
    p.add_local("rid", ValueType::Int);
    p.add_local("i", ValueType::Int);
    p.add_local("x", ValueType::Real);
    p.add_local("y", ValueType::Real);
    p.add_local("c", ValueType::Real);

    ExprId rid = p.local("rid");
    std::vector<Statement> loop;
    loop.push_back(p.assign("x", p.draw()));
    loop.push_back(p.assign("y", p.draw()));
    loop.push_back(p.load("c", "cnt", rid));
    ExprId dist = p.bin(BinOp::Add, p.bin(BinOp::Mul, p.local("x"), p.local("x")),
                        p.bin(BinOp::Mul, p.local("y"), p.local("y")));
    ExprId inside = p.bin(BinOp::Le, dist, p.cr(1.0));
    loop.push_back(p.store("cnt", rid, p.bin(BinOp::Add, p.local("c"), inside)));
    loop.push_back(p.assign("i", p.bin(BinOp::Add, p.local("i"), p.ci(1))));

    p.body.push_back(p.assign("i", p.ci(0)));
    p.body.push_back(
        KernelProgram::while_(p.bin(BinOp::Lt, p.local("i"), p.param("draws")), std::move(loop)));
    p.body.push_back(p.load("c", "cnt", rid));
    p.body.push_back(p.store(
        "out", rid,
        p.bin(BinOp::Div, p.bin(BinOp::Mul, p.cr(4.0), p.local("c")), p.param("draws"))));
    p.finalize();
    return p;
}

KernelProgram build_mm1_body() {
    KernelProgram p;
    p.add_param("replications", ParamKind::Int);
    p.add_param("clients", ParamKind::Int);
    p.add_param("lambda", ParamKind::Real);
    p.add_param("mu", ParamKind::Real);
    p.add_param("outIdle", ParamKind::Array);
    p.add_param("outWait", ParamKind::Array);
    p.add_param("outSys", ParamKind::Array);
    p.add_local("rid", ValueType::Int);
    p.add_local("i", ValueType::Int);
    p.add_local("a", ValueType::Real);
    p.add_local("s", ValueType::Real);
    p.add_local("t", ValueType::Real);
    p.add_local("w", ValueType::Real);
    p.add_local("idle", ValueType::Real);
    p.add_local("sumw", ValueType::Real);
    p.add_local("sums", ValueType::Real);

    ExprId rid = p.local("rid");
    std::vector<Statement> loop;
    loop.push_back(p.assign("a", exp_draw(p, "lambda")));
    loop.push_back(p.assign(
        "t", p.bin(BinOp::Sub, p.bin(BinOp::Add, p.local("w"), p.local("s")), p.local("a"))));
    // Server idle until this arrival when the gap exceeds remaining work.
    std::vector<Statement> idle_branch;
    idle_branch.push_back(p.assign("idle", p.bin(BinOp::Sub, p.local("idle"), p.local("t"))));
    idle_branch.push_back(p.assign("w", p.cr(0.0)));
    std::vector<Statement> busy_branch;
    busy_branch.push_back(p.assign("w", p.local("t")));
    loop.push_back(KernelProgram::if_(p.bin(BinOp::Lt, p.local("t"), p.cr(0.0)),
                                      std::move(idle_branch), std::move(busy_branch)));
    loop.push_back(p.assign("s", exp_draw(p, "mu")));
    loop.push_back(p.assign("sumw", p.bin(BinOp::Add, p.local("sumw"), p.local("w"))));
    loop.push_back(p.assign(
        "sums",
        p.bin(BinOp::Add, p.local("sums"), p.bin(BinOp::Add, p.local("w"), p.local("s")))));
    loop.push_back(p.assign("i", p.bin(BinOp::Add, p.local("i"), p.ci(1))));

    p.body.push_back(p.assign("i", p.ci(0)));
    p.body.push_back(KernelProgram::while_(
        p.bin(BinOp::Lt, p.local("i"), p.param("clients")), std::move(loop)));
    p.body.push_back(
        p.store("outIdle", rid, p.bin(BinOp::Div, p.local("idle"), p.param("clients"))));
    p.body.push_back(
        p.store("outWait", rid, p.bin(BinOp::Div, p.local("sumw"), p.param("clients"))));
    p.body.push_back(
        p.store("outSys", rid, p.bin(BinOp::Div, p.local("sums"), p.param("clients"))));
    p.finalize();
    return p;
}

KernelProgram build_walk_body() {
    KernelProgram p;
    p.add_param("replications", ParamKind::Int);
    p.add_param("steps", ParamKind::Int);
    p.add_param("chunks", ParamKind::Int);
    p.add_param("posX", ParamKind::Array);
    p.add_param("posY", ParamKind::Array);
    p.add_param("out", ParamKind::Array);
    p.add_local("rid", ValueType::Int);
    p.add_local("i", ValueType::Int);
    p.add_local("u", ValueType::Real);
    p.add_local("v", ValueType::Real);
    p.add_local("d", ValueType::Int);
    p.add_local("px", ValueType::Real);
    p.add_local("py", ValueType::Real);

    ExprId rid = p.local("rid");
    auto move_arm = [&](const char* array, const char* reg, BinOp op) {
        std::vector<Statement> arm;
        arm.push_back(p.load(reg, array, rid));
        arm.push_back(p.store(array, rid, p.bin(op, p.local(reg), p.cr(1.0))));
        return arm;
    };

    std::vector<Statement> loop;
    loop.push_back(p.assign("u", p.draw()));
    loop.push_back(p.assign("v", p.draw()));  // discarded: keeps two draws per step
    loop.push_back(p.assign("d", p.un(UnOp::Floor, p.bin(BinOp::Mul, p.cr(4.0), p.local("u")))));
    std::vector<Statement> south = move_arm("posY", "py", BinOp::Sub);
    std::vector<Statement> north_else{KernelProgram::if_(
        p.bin(BinOp::Eq, p.local("d"), p.ci(2)), move_arm("posY", "py", BinOp::Add),
        std::move(south))};
    std::vector<Statement> west_else{KernelProgram::if_(
        p.bin(BinOp::Eq, p.local("d"), p.ci(1)), move_arm("posX", "px", BinOp::Sub),
        std::move(north_else))};
    loop.push_back(KernelProgram::if_(p.bin(BinOp::Eq, p.local("d"), p.ci(0)),
                                      move_arm("posX", "px", BinOp::Add),
                                      std::move(west_else)));
    loop.push_back(p.assign("i", p.bin(BinOp::Add, p.local("i"), p.ci(1))));

    p.body.push_back(p.assign("i", p.ci(0)));
    p.body.push_back(
        KernelProgram::while_(p.bin(BinOp::Lt, p.local("i"), p.param("steps")), std::move(loop)));
    p.body.push_back(p.load("px", "posX", rid));
    ExprId folded =
        p.bin(BinOp::Mod,
              p.bin(BinOp::Add, p.bin(BinOp::Mod, p.local("px"), p.param("chunks")),
                    p.param("chunks")),
              p.param("chunks"));
    p.body.push_back(p.store("out", rid, folded));
    p.finalize();
    return p;
}

}  // namespace

KernelProgram build_model_body(ModelKind model) {
    switch (model) {
        case ModelKind::Pi: return build_pi_body();
        case ModelKind::Mm1: return build_mm1_body();
        case ModelKind::Walk: return build_walk_body();
    }
    throw DomainError("unknown model");
}

KernelBundle build_kernel(ModelKind model, const ModelParams& p, ExecutionMode mode,
                          const DeviceProfile& prof, int tlp_block_size) {
    std::optional<std::string> param_warning = validate_params(model, p);
    KernelProgram body = build_model_body(model);
    LaunchPlan plan = plan_launch(p.replications, mode, prof, tlp_block_size);

    KernelBundle b;
    switch (mode) {
        case ExecutionMode::Sequential: b.program = std::move(body); break;
        case ExecutionMode::Tlp: b.program = wrap_tlp(body); break;
        case ExecutionMode::Wlp: b.program = wrap_wlp(body); break;
    }
    b.cfg = plan.cfg;
    if (param_warning && plan.warning)
        b.warning = *param_warning + "; " + *plan.warning;
    else if (param_warning)
        b.warning = param_warning;
    else
        b.warning = plan.warning;

    const std::int64_t R = p.replications;
    b.scalars["replications"] = Value::integer(R);
    switch (model) {
        case ModelKind::Pi:
            b.scalars["draws"] = Value::integer(p.draws);
            b.arrays = {{"cnt", R}, {"out", R}};
            b.outputs = {"out"};
            b.primary = "out";
            break;
        case ModelKind::Mm1:
            b.scalars["clients"] = Value::integer(p.clients);
            b.scalars["lambda"] = Value::real(p.lambda);
            b.scalars["mu"] = Value::real(p.mu);
            b.arrays = {{"outIdle", R}, {"outWait", R}, {"outSys", R}};
            b.outputs = {"outIdle", "outWait", "outSys"};
            b.primary = "outWait";
            break;
        case ModelKind::Walk:
            b.scalars["steps"] = Value::integer(p.steps);
            b.scalars["chunks"] = Value::integer(p.chunks);
            b.arrays = {{"posX", R}, {"posY", R}, {"out", R}};
            b.outputs = {"out"};
            b.primary = "out";
            break;
    }
    return b;
}

ModelRun run_model(ModelKind model, const ModelParams& p, ExecutionMode mode,
                   const DeviceProfile& prof, std::uint64_t master_seed, int tlp_block_size,
                   const SimOptions& opts) {
    KernelBundle b = build_kernel(model, p, mode, prof, tlp_block_size);
    RngState master = rng_state_from_seed(master_seed);
    std::vector<RngState> streams = random_spacing(master, static_cast<std::size_t>(p.replications));

    ModelRun run;
    run.cfg = b.cfg;
    run.mode = mode;
    run.warning = b.warning;

    GlobalMemory mem;
    for (const auto& [name, size] : b.arrays)
        mem.arrays[name] = std::vector<double>(static_cast<std::size_t>(size), 0.0);

    if (mode == ExecutionMode::Sequential) {
        const std::int64_t R = p.replications;
        switch (model) {
            case ModelKind::Pi: {
                auto& out = run.outputs["out"];
                out.resize(R);
                for (std::int64_t r = 0; r < R; ++r) out[r] = pi_replication(p.draws, streams[r]);
                break;
            }
            case ModelKind::Mm1: {
                auto& oi = run.outputs["outIdle"];
                auto& ow = run.outputs["outWait"];
                auto& os = run.outputs["outSys"];
                oi.resize(R);
                ow.resize(R);
                os.resize(R);
                for (std::int64_t r = 0; r < R; ++r) {
                    MM1Result m = mm1_replication(p.clients, p.lambda, p.mu, streams[r]);
                    oi[r] = m.avgIdle;
                    ow[r] = m.avgWaitQueue;
                    os[r] = m.avgSystem;
                }
                break;
            }
            case ModelKind::Walk: {
                auto& out = run.outputs["out"];
                out.resize(R);
                for (std::int64_t r = 0; r < R; ++r)
                    out[r] = walk_replication(p.steps, p.chunks, streams[r]);
                break;
            }
        }
        // Unit-cost accounting: one instrumented body execution, one cycle
        // per issued statement, scaled by the replication count.
        ParamEnv env = bind_params(b.program, b.scalars, mem);
        WarpRunStats st =
            run_single_thread(b.program, env, streams[0], {{"rid", Value::integer(0)}});
        run.report.totalCycles = static_cast<std::int64_t>(st.issues) * R;
        run.report.wavesExecuted = 0;
        run.report.peakResidentWarps = 1;
        run.report.issues = st.issues * static_cast<std::uint64_t>(R);
        run.report.aluIssues = st.alu_issues * static_cast<std::uint64_t>(R);
        run.report.memReads = st.mem_reads * static_cast<std::uint64_t>(R);
        run.report.memWrites = st.mem_writes * static_cast<std::uint64_t>(R);
        run.report.divergenceEvents = 0;
    } else {
        std::vector<RngState> lanes = assign_lane_streams(mode, b.cfg, streams);
        run.report = simulate(b.program, b.cfg, prof, mem, b.scalars, lanes, opts);
        for (const std::string& name : b.outputs) run.outputs[name] = mem.arrays[name];
    }
    run.primary = run.outputs[b.primary];
    return run;
}

}  // namespace warpsim
