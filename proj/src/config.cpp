#include "blowup/config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "blowup/iteration.hpp"
#include "json.hpp"

namespace blowup::config {

using ordered_json = nlohmann::ordered_json;

double ExperimentConfig::resolved_p() const {
    return p_critical ? iteration::strauss_exponent(n).p0 : p;
}

double ExperimentConfig::resolved_q() const {
    return q_critical ? 0.5 * (n - 1) - 1.0 / resolved_p() : q;
}

double ExperimentConfig::resolved_lambda0() const {
    return lambda0_auto ? metric_beta / 4.0 : lambda0;
}

metric::MetricField ExperimentConfig::make_metric() const {
    if (metric_kind == metric::MetricKind::Flat) return metric::make_metric_flat(n);
    return metric::make_metric_exp(n, metric_eps_g, metric_beta);
}

wave::InitialData ExperimentConfig::make_data() const {
    wave::InitialData d;
    d.eps = eps;
    d.r0 = r0;
    d.with_velocity = with_velocity;
    return d;
}

eigen::TableOptions ExperimentConfig::make_table_options() const {
    eigen::TableOptions opt;
    opt.lambda0 = resolved_lambda0();
    opt.ladder_points = ladder_points;
    opt.lambda_min_factor = lambda_min_factor;
    opt.r_table = r_table;
    opt.dr_table = dr_table;
    return opt;
}

testfn::EvaluatorOptions ExperimentConfig::make_evaluator_options() const {
    testfn::EvaluatorOptions opt;
    opt.q = resolved_q();
    opt.support_radius = solver.support_radius;
    opt.log_panels = log_panels;
    return opt;
}

void ExperimentConfig::validate() const {
    if (n < 2) throw ConfigError("n must be >= 2");
    if (!p_critical && !(p > 1.0)) throw ConfigError("p must be > 1 or \"critical\"");
    if (metric_kind == metric::MetricKind::ExpPerturbed) {
        if (!(metric_eps_g > 0.0 && metric_eps_g < 1.0))
            throw ConfigError("metric.eps_g must lie in (0,1)");
        if (!(metric_beta > 0.0)) throw ConfigError("metric.beta must be > 0");
    }
    if (!(eps >= 0.0)) throw ConfigError("data.eps must be >= 0");
    if (!(r0 > 1.0)) throw ConfigError("data.r0 must be > 1");
    if (!(solver.support_radius >= r0)) throw ConfigError("solver.support_radius must be >= r0");
    if (!(solver.dr > 0.0 && solver.cfl > 0.0 && solver.cfl <= 0.9))
        throw ConfigError("solver.dr must be > 0 and cfl in (0, 0.9]");
    if (!(solver.t_max > 0.0 && solver.snapshot_dt > 0.0))
        throw ConfigError("solver.t_max and snapshot_dt must be > 0");
    if (!q_critical && !(q > -1.0)) throw ConfigError("testfn.q must be > -1 or \"critical\"");
    if (!lambda0_auto && !(lambda0 > 0.0 && lambda0 <= metric_beta / 2.0))
        throw ConfigError("testfn.lambda0 must lie in (0, beta/2] or be \"auto\"");
    if (ladder_points < 8) throw ConfigError("eigen.ladder_points must be >= 8");
    if (!deterministic) throw ConfigError("deterministic must stay true (no RNG paths exist)");
}

std::string ExperimentConfig::to_json_string() const {
    ordered_json j;
    j["schema"] = 1;
    j["n"] = n;
    if (p_critical) j["p"] = "critical"; else j["p"] = p;
    ordered_json jm;
    jm["kind"] = (metric_kind == metric::MetricKind::Flat) ? "flat" : "exp";
    if (metric_kind == metric::MetricKind::ExpPerturbed) {
        jm["eps_g"] = metric_eps_g;
        jm["beta"] = metric_beta;
    }
    j["metric"] = jm;
    j["data"] = {{"eps", eps}, {"r0", r0}, {"with_velocity", with_velocity}};
    j["solver"] = {{"dr", solver.dr},
                   {"cfl", solver.cfl},
                   {"t_max", solver.t_max},
                   {"blowup_threshold", solver.blowup_threshold},
                   {"snapshot_dt", solver.snapshot_dt},
                   {"support_radius", solver.support_radius},
                   {"domain_margin", solver.domain_margin},
                   {"nonlinear", solver.nonlinear}};
    ordered_json jt;
    if (q_critical) jt["q"] = "critical"; else jt["q"] = q;
    if (lambda0_auto) jt["lambda0"] = "auto"; else jt["lambda0"] = lambda0;
    jt["log_panels"] = log_panels;
    j["testfn"] = jt;
    j["eigen"] = {{"ladder_points", ladder_points},
                  {"lambda_min_factor", lambda_min_factor},
                  {"r_table", r_table},
                  {"dr_table", dr_table}};
    j["deterministic"] = deterministic;
    j["output_dir"] = output_dir;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("n")) c.n = j["n"].get<int>();
        if (j.contains("p")) {
            if (j["p"].is_string()) {
                if (j["p"] != "critical") throw ConfigError("p: expected number or \"critical\"");
                c.p_critical = true;
            } else {
                c.p_critical = false;
                c.p = j["p"].get<double>();
            }
        }
        if (j.contains("metric")) {
            const auto& jm = j["metric"];
            const std::string kind = jm.value("kind", "exp");
            if (kind == "flat") {
                c.metric_kind = metric::MetricKind::Flat;
            } else if (kind == "exp") {
                c.metric_kind = metric::MetricKind::ExpPerturbed;
                if (jm.contains("eps_g")) c.metric_eps_g = jm["eps_g"].get<double>();
                if (jm.contains("beta")) c.metric_beta = jm["beta"].get<double>();
            } else {
                throw ConfigError("metric.kind must be \"flat\" or \"exp\"");
            }
        }
        if (j.contains("data")) {
            const auto& jd = j["data"];
            if (jd.contains("eps")) c.eps = jd["eps"].get<double>();
            if (jd.contains("r0")) c.r0 = jd["r0"].get<double>();
            if (jd.contains("with_velocity")) c.with_velocity = jd["with_velocity"].get<bool>();
        }
        if (j.contains("solver")) {
            const auto& js = j["solver"];
            if (js.contains("dr")) c.solver.dr = js["dr"].get<double>();
            if (js.contains("cfl")) c.solver.cfl = js["cfl"].get<double>();
            if (js.contains("t_max")) c.solver.t_max = js["t_max"].get<double>();
            if (js.contains("blowup_threshold"))
                c.solver.blowup_threshold = js["blowup_threshold"].get<double>();
            if (js.contains("snapshot_dt")) c.solver.snapshot_dt = js["snapshot_dt"].get<double>();
            if (js.contains("support_radius"))
                c.solver.support_radius = js["support_radius"].get<double>();
            if (js.contains("domain_margin"))
                c.solver.domain_margin = js["domain_margin"].get<double>();
            if (js.contains("nonlinear")) c.solver.nonlinear = js["nonlinear"].get<bool>();
        }
        if (j.contains("testfn")) {
            const auto& jt = j["testfn"];
            if (jt.contains("q")) {
                if (jt["q"].is_string()) {
                    if (jt["q"] != "critical")
                        throw ConfigError("testfn.q: expected number or \"critical\"");
                    c.q_critical = true;
                } else {
                    c.q_critical = false;
                    c.q = jt["q"].get<double>();
                }
            }
            if (jt.contains("lambda0")) {
                if (jt["lambda0"].is_string()) {
                    if (jt["lambda0"] != "auto")
                        throw ConfigError("testfn.lambda0: expected number or \"auto\"");
                    c.lambda0_auto = true;
                } else {
                    c.lambda0_auto = false;
                    c.lambda0 = jt["lambda0"].get<double>();
                }
            }
            if (jt.contains("log_panels")) c.log_panels = jt["log_panels"].get<std::size_t>();
        }
        if (j.contains("eigen")) {
            const auto& je = j["eigen"];
            if (je.contains("ladder_points"))
                c.ladder_points = je["ladder_points"].get<std::size_t>();
            if (je.contains("lambda_min_factor"))
                c.lambda_min_factor = je["lambda_min_factor"].get<double>();
            if (je.contains("r_table")) c.r_table = je["r_table"].get<double>();
            if (je.contains("dr_table")) c.dr_table = je["dr_table"].get<double>();
        }
        if (j.contains("deterministic")) c.deterministic = j["deterministic"].get<bool>();
        if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

std::string ExperimentConfig::hash() const {
    const std::string text = to_json_string();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace blowup::config
