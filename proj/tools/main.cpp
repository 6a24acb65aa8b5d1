#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blowup/config.hpp"
#include "blowup/eigenfunction.hpp"
#include "blowup/functional.hpp"
#include "blowup/iteration.hpp"
#include "blowup/metric.hpp"
#include "blowup/runio.hpp"
#include "blowup/testfn.hpp"
#include "blowup/wavesolver.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace blowup;

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitMissingRun = 3;

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

config::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return config::ExperimentConfig{};
    return config::ExperimentConfig::from_file(path);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::shared_ptr<const eigen::EigenfunctionTable> build_table_for(
    const config::ExperimentConfig& cfg) {
    return std::make_shared<eigen::EigenfunctionTable>(
        eigen::build_table(cfg.make_metric(), cfg.make_table_options()));
}

std::string table_csv(const eigen::EigenfunctionTable& tab) {
    std::ostringstream os;
    os << "lambda,r,phi_lambda,psi\n";
    for (std::size_t k = 0; k < tab.lambda_grid.size(); ++k)
        for (std::size_t i = 0; i < tab.r_grid.size; ++i)
            os << fmt17(tab.lambda_grid[k]) << ',' << fmt17(tab.r_grid.r(i)) << ','
               << fmt17(tab.phi_lambda[k][i]) << ',' << fmt17(tab.psi[k][i]) << '\n';
    return os.str();
}

ordered_json eigen_report(const eigen::EigenfunctionTable& tab) {
    ordered_json j;
    j["schema"] = 1;
    j["metric"] = tab.metric.kind_name();
    j["n"] = tab.metric.n;
    j["lambda0"] = tab.lambda0;
    j["ladder_points"] = tab.lambda_grid.size();
    j["theta_fit"] = tab.theta_fit;
    j["d0"] = tab.d0;
    j["d1"] = tab.d1;
    j["continuity_modulus"] = tab.continuity_modulus;
    return j;
}

ordered_json testfn_report(const config::ExperimentConfig& cfg) {
    auto table = build_table_for(cfg);
    testfn::TestFunctionEvaluator ev(table, cfg.make_evaluator_options());
    const auto bounds = testfn::fit_bound_constants(ev);
    ordered_json j;
    j["schema"] = 1;
    j["q"] = ev.q();
    j["support_radius"] = ev.support_radius();
    j["lambda0"] = ev.lambda0();
    j["A_0"] = bounds.a0;
    j["B_0"] = bounds.b0;
    j["B_1"] = bounds.b1;
    j["B_2"] = bounds.b2;
    j["stability"] = bounds.stability;
    j["grids"] = {{"t", bounds.spec.t_grid},
                  {"x_points", bounds.spec.x_points},
                  {"s_points", bounds.spec.s_points}};
    j["pass"] = bounds.pass;
    return j;
}

wave::RunRecord simulate(const config::ExperimentConfig& cfg, bool with_functional) {
    wave::RunRecord rec =
        wave::run_until_blowup(cfg.make_data(), cfg.make_metric(), cfg.resolved_p(), cfg.solver);
    if (with_functional) {
        auto table = build_table_for(cfg);
        testfn::TestFunctionEvaluator ev(table, cfg.make_evaluator_options());
        functional::attach_functional_series(rec, ev);
    }
    return rec;
}

ordered_json functional_report(const config::ExperimentConfig& cfg, const wave::RunRecord& rec) {
    auto table = build_table_for(cfg);
    testfn::TestFunctionEvaluator ev(table, cfg.make_evaluator_options());
    wave::RunRecord work = rec;
    functional::attach_functional_series(work, ev);
    const auto identity = functional::check_identity(work, ev);
    const auto frame = functional::check_frame_inequality(work, ev.q());
    const auto lp = functional::check_lp_lower_bound(work);
    ordered_json j;
    j["schema"] = 1;
    j["identity"] = {{"times", identity.times},
                     {"residuals", identity.residuals},
                     {"max_residual", identity.max_residual},
                     {"tol", identity.tol},
                     {"pass", identity.pass}};
    j["frame"] = {{"C_frame", frame.c_frame},
                  {"exponent_gap", frame.exponent_gap},
                  {"pass", frame.pass}};
    j["lp_lower_bound"] = {{"C_0", lp.c0}, {"degenerate", lp.degenerate}, {"pass", lp.pass}};
    j["pass"] = identity.pass && frame.pass && lp.pass;
    return j;
}

int cmd_eigen(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    auto table = build_table_for(cfg);
    const fs::path dir = runio::output_root(cfg) / cfg.hash();
    fs::create_directories(dir);
    write_text(dir / "table.csv", table_csv(*table));
    write_text(dir / "eigen_report.json", eigen_report(*table).dump(2) + "\n");
    std::cout << "D_0 = " << table->d0 << "  D_1 = " << table->d1
              << "  theta_fit = " << table->theta_fit << "\n"
              << "table: " << (dir / "table.csv").string() << "\n";
    return 0;
}

int cmd_testfn(const std::string& config_path) {
    const auto cfg = load_config(config_path);
    const ordered_json j = testfn_report(cfg);
    const fs::path dir = runio::output_root(cfg) / cfg.hash();
    fs::create_directories(dir);
    write_text(dir / "testfn_report.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_simulate(const std::string& config_path, bool skip_functional) {
    const auto cfg = load_config(config_path);
    const wave::RunRecord rec = simulate(cfg, !skip_functional);
    const fs::path dir = runio::write_run(cfg, rec);
    std::cout << "run: " << dir.string() << "\n"
              << "termination: " << rec.termination << "\n";
    if (rec.blowup.detected)
        std::cout << "blowup bracket: [" << rec.blowup.t_lo << ", " << rec.blowup.t_hi << "]\n";
    return 0;
}

int cmd_verify(const std::string& target, const std::string& config_path,
               const std::string& run) {
    const auto cfg = load_config(config_path);
    ordered_json j;
    j["schema"] = 1;
    bool pass = true;
    if (target == "testfn" || target == "all") {
        j["testfn"] = testfn_report(cfg);
        pass = pass && j["testfn"]["pass"].get<bool>();
    }
    if (target == "functional" || target == "all") {
        wave::RunRecord rec;
        if (!run.empty()) {
            fs::path dir(run);
            if (!runio::run_exists(dir)) dir = runio::output_root(cfg) / run;
            if (!runio::run_exists(dir)) {
                std::cerr << "error: missing run record under " << run << "\n";
                return kExitMissingRun;
            }
            rec = runio::load_run(dir);
        } else {
            rec = simulate(cfg, false);
        }
        j["functional"] = functional_report(cfg, rec);
        pass = pass && j["functional"]["pass"].get<bool>();
    }
    if (target == "iteration" || target == "all") {
        const auto ex = iteration::strauss_exponent(cfg.n);
        auto sched = iteration::IterationSchedule::build(ex.p0, {}, cfg.eps);
        double max_gap = 0.0;
        for (int jj = 1; jj <= sched.j_max; ++jj)
            max_gap = std::max(max_gap,
                               std::abs(sched.z_recursion[jj] - sched.z_closed[jj]));
        j["iteration"] = {{"p0", ex.p0},
                          {"gamma_at_p0", ex.gamma_at_p0},
                          {"recursion_vs_closed", max_gap},
                          {"pass", max_gap <= 1e-9}};
        pass = pass && max_gap <= 1e-9;
    }
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
}

struct EpsSweep {
    std::vector<double> values;
};

EpsSweep parse_sweep(const std::string& text) {
    // "a:b:k" -> k points from a to b inclusive; plain comma list otherwise.
    EpsSweep sweep;
    if (text.find(':') != std::string::npos) {
        double a, b;
        int k;
        if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &k) != 3 || k < 2)
            throw config::ConfigError("eps sweep must be start:stop:count with count >= 2");
        for (int i = 0; i < k; ++i) sweep.values.push_back(a + (b - a) * i / (k - 1));
        return sweep;
    }
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) sweep.values.push_back(std::stod(tok));
    if (sweep.values.empty()) throw config::ConfigError("empty eps sweep");
    return sweep;
}

int cmd_lifespan(int n, const std::string& sweep_text, const std::string& constants_path,
                 const std::string& out_path) {
    const auto ex = iteration::strauss_exponent(n);
    iteration::ScheduleConstants consts;  // nominal 1.0 unless measured values given
    std::string provenance = "nominal(1.0)";
    if (!constants_path.empty()) {
        std::ifstream in(constants_path);
        if (!in) throw config::ConfigError("cannot open constants file: " + constants_path);
        const auto j = ordered_json::parse(in);
        consts.c_frame = j.value("C_frame", j.value("frame", ordered_json{}).value("C_frame", 1.0));
        consts.c0 = j.value("C_0", j.value("lp_lower_bound", ordered_json{}).value("C_0", 1.0));
        consts.b1 = j.value("B_1", j.value("testfn", ordered_json{}).value("B_1", 1.0));
        provenance = "measured:" + constants_path;
    }
    const auto sweep = parse_sweep(sweep_text);
    std::ostringstream os;
    os << "# constants: " << provenance << "\n";
    os << "eps,eps_pow,log_t_bound,t_bound,k_eff,eps0,within_guarantee,t_measured\n";
    for (double eps : sweep.values) {
        auto sched = iteration::IterationSchedule::build(ex.p0, consts, eps);
        const auto lb = iteration::lifespan_bound(sched, eps);
        os << fmt17(eps) << ',' << fmt17(std::pow(eps, -ex.p0 * (ex.p0 - 1.0))) << ','
           << fmt17(lb.log_t_bound) << ',' << fmt17(lb.t_bound) << ',' << fmt17(lb.k_eff)
           << ',' << fmt17(lb.eps0) << ',' << (lb.within_guarantee ? 1 : 0) << ",\n";
    }
    if (out_path.empty()) {
        std::cout << os.str();
    } else {
        write_text(out_path, os.str());
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& eps_list, int jobs) {
    const auto base = load_config(config_path);
    const auto sweep = parse_sweep(eps_list);
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    std::vector<config::ExperimentConfig> cfgs;
    for (double eps : sweep.values) {
        auto c = base;
        c.eps = eps;
        cfgs.push_back(c);
    }
    std::vector<std::future<wave::RunRecord>> futures;
    std::vector<wave::RunRecord> recs(cfgs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cfgs.size();)
            recs[i] = simulate(cfgs[i], false);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<int>(jobs, static_cast<int>(cfgs.size())); ++w)
        pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ostringstream os;
    os << "eps,termination,t_cross,t_lo,t_hi\n";
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        runio::write_run(cfgs[i], recs[i]);
        os << fmt17(cfgs[i].eps) << ',' << recs[i].termination << ','
           << fmt17(recs[i].blowup.t_cross) << ',' << fmt17(recs[i].blowup.t_lo) << ','
           << fmt17(recs[i].blowup.t_hi) << '\n';
    }
    const fs::path summary = runio::output_root(base) / "sweep_summary.csv";
    fs::create_directories(summary.parent_path());
    write_text(summary, os.str());
    std::cout << os.str() << "wrote " << summary.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blowuplab: numerical laboratory for critical semilinear wave blow-up"};
    app.require_subcommand(1);

    std::string config_path, run_id, target = "all", sweep_text, constants_path, out_path;
    std::string eps_list;
    bool skip_functional = false;
    int n_dim = 3, jobs = 0;

    auto* eigen_cmd = app.add_subcommand("eigen", "build and persist the eigenfunction table");
    eigen_cmd->add_option("--config", config_path, "config JSON path");

    auto* testfn_cmd = app.add_subcommand("testfn", "fit the test-function bound constants");
    testfn_cmd->add_option("--config", config_path, "config JSON path");

    auto* sim_cmd = app.add_subcommand("simulate", "integrate the wave equation");
    sim_cmd->add_option("--config", config_path, "config JSON path");
    sim_cmd->add_flag("--no-functional", skip_functional, "skip the F(t) pass");

    auto* verify_cmd = app.add_subcommand("verify", "run verification reports");
    verify_cmd->add_option("target", target, "testfn|functional|iteration|all");
    verify_cmd->add_option("--config", config_path, "config JSON path");
    verify_cmd->add_option("--run", run_id, "run hash or directory (functional)");

    auto* life_cmd = app.add_subcommand("lifespan", "lifespan bound sweep CSV");
    life_cmd->add_option("--n", n_dim, "space dimension");
    life_cmd->add_option("--eps-sweep", sweep_text, "start:stop:count or comma list")
        ->required();
    life_cmd->add_option("--constants", constants_path, "verify report with measured constants");
    life_cmd->add_option("--out", out_path, "output CSV path");

    auto* sweep_cmd = app.add_subcommand("sweep", "run several amplitudes concurrently");
    sweep_cmd->add_option("--config", config_path, "config JSON path");
    sweep_cmd->add_option("--eps", eps_list, "comma list or start:stop:count")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker count (default: hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigen_cmd->parsed()) return cmd_eigen(config_path);
        if (testfn_cmd->parsed()) return cmd_testfn(config_path);
        if (sim_cmd->parsed()) return cmd_simulate(config_path, skip_functional);
        if (verify_cmd->parsed()) return cmd_verify(target, config_path, run_id);
        if (life_cmd->parsed()) return cmd_lifespan(n_dim, sweep_text, constants_path, out_path);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, eps_list, jobs);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
