#include "blowup/runio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace blowup::runio {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

ordered_json metric_json(const metric::MetricField& m) {
    ordered_json j;
    j["kind"] = m.kind_name();
    j["n"] = m.n;
    if (!m.is_flat()) {
        j["eps_g"] = m.eps_g;
        j["beta"] = m.beta;
    }
    j["gamma"] = m.gamma;
    return j;
}

} // namespace

fs::path output_root(const config::ExperimentConfig& cfg) {
    if (const char* env = std::getenv("BLOWUPLAB_OUT"); env && *env) return fs::path(env);
    return fs::path(cfg.output_dir);
}

std::string series_csv(const wave::RunRecord& rec) {
    std::ostringstream os;
    os << "t,max_u,l2,lp_integral,f_value,support_excess\n";
    for (const auto& pt : rec.series) {
        os << fmt17(pt.t) << ',' << fmt17(pt.max_u) << ',' << fmt17(pt.l2) << ','
           << fmt17(pt.lp_integral) << ',' << fmt17(pt.f_value) << ','
           << fmt17(pt.support_excess) << '\n';
    }
    return os.str();
}

std::string record_json(const wave::RunRecord& rec) {
    ordered_json j;
    j["schema"] = 1;
    j["n"] = rec.n;
    j["p"] = rec.p;
    j["eps"] = rec.eps;
    j["metric"] = metric_json(rec.metric);
    j["data"] = {{"eps", rec.data.eps}, {"r0", rec.data.r0},
                 {"with_velocity", rec.data.with_velocity}};
    j["solver"] = {{"dr", rec.config.dr},
                   {"cfl", rec.config.cfl},
                   {"t_max", rec.config.t_max},
                   {"blowup_threshold", rec.config.blowup_threshold},
                   {"snapshot_dt", rec.config.snapshot_dt},
                   {"support_radius", rec.config.support_radius},
                   {"domain_margin", rec.config.domain_margin},
                   {"nonlinear", rec.config.nonlinear}};
    j["dt"] = rec.dt;
    j["termination"] = rec.termination;
    j["blowup"] = {{"detected", rec.blowup.detected},
                   {"t_cross", rec.blowup.t_cross},
                   {"t_lo", rec.blowup.t_lo},
                   {"t_hi", rec.blowup.t_hi}};
    ordered_json series = ordered_json::array();
    for (const auto& pt : rec.series)
        series.push_back({{"t", pt.t},
                          {"max_u", pt.max_u},
                          {"l2", pt.l2},
                          {"lp_integral", pt.lp_integral},
                          {"f_value", pt.f_value},
                          {"support_excess", pt.support_excess}});
    j["series"] = std::move(series);
    j["snapshot_r"] = rec.snapshot_r;
    ordered_json snaps = ordered_json::array();
    for (const auto& s : rec.snapshots) snaps.push_back({{"t", s.t}, {"u", s.u}});
    j["snapshots"] = std::move(snaps);
    return j.dump();
}

wave::RunRecord record_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    wave::RunRecord rec;
    rec.n = j["n"].get<int>();
    rec.p = j["p"].get<double>();
    rec.eps = j["eps"].get<double>();
    const auto& jm = j["metric"];
    rec.metric = jm["kind"] == "flat"
                     ? metric::make_metric_flat(jm["n"].get<int>())
                     : metric::make_metric_exp(jm["n"].get<int>(), jm["eps_g"].get<double>(),
                                               jm["beta"].get<double>());
    rec.data.eps = j["data"]["eps"].get<double>();
    rec.data.r0 = j["data"]["r0"].get<double>();
    rec.data.with_velocity = j["data"]["with_velocity"].get<bool>();
    const auto& js = j["solver"];
    rec.config.dr = js["dr"].get<double>();
    rec.config.cfl = js["cfl"].get<double>();
    rec.config.t_max = js["t_max"].get<double>();
    rec.config.blowup_threshold = js["blowup_threshold"].get<double>();
    rec.config.snapshot_dt = js["snapshot_dt"].get<double>();
    rec.config.support_radius = js["support_radius"].get<double>();
    rec.config.domain_margin = js["domain_margin"].get<double>();
    rec.config.nonlinear = js["nonlinear"].get<bool>();
    rec.dt = j["dt"].get<double>();
    rec.termination = j["termination"].get<std::string>();
    rec.blowup.detected = j["blowup"]["detected"].get<bool>();
    rec.blowup.t_cross = j["blowup"]["t_cross"].get<double>();
    rec.blowup.t_lo = j["blowup"]["t_lo"].get<double>();
    rec.blowup.t_hi = j["blowup"]["t_hi"].get<double>();
    for (const auto& pt : j["series"]) {
        wave::SeriesPoint sp;
        sp.t = pt["t"].get<double>();
        sp.max_u = pt["max_u"].get<double>();
        sp.l2 = pt["l2"].get<double>();
        sp.lp_integral = pt["lp_integral"].get<double>();
        sp.f_value = pt["f_value"].get<double>();
        sp.support_excess = pt["support_excess"].get<double>();
        rec.series.push_back(sp);
    }
    rec.snapshot_r = j["snapshot_r"].get<std::vector<double>>();
    for (const auto& s : j["snapshots"]) {
        wave::Snapshot snap;
        snap.t = s["t"].get<double>();
        snap.u = s["u"].get<std::vector<double>>();
        rec.snapshots.push_back(std::move(snap));
    }
    return rec;
}

fs::path write_run(const config::ExperimentConfig& cfg, const wave::RunRecord& rec) {
    const fs::path dir = output_root(cfg) / cfg.hash();
    fs::create_directories(dir);
    write_file(dir / "config.json", cfg.to_json_string() + "\n");
    write_file(dir / "series.csv", series_csv(rec));
    write_file(dir / "record.json", record_json(rec));
    return dir;
}

bool run_exists(const fs::path& dir) { return fs::exists(dir / "record.json"); }

wave::RunRecord load_run(const fs::path& dir) {
    std::ifstream in(dir / "record.json", std::ios::binary);
    if (!in) throw std::runtime_error("missing run record: " + (dir / "record.json").string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return record_from_json(ss.str());
}

} // namespace blowup::runio
