#pragma once

#include <stdexcept>
#include <string>

#include "blowup/eigenfunction.hpp"
#include "blowup/metric.hpp"
#include "blowup/testfn.hpp"
#include "blowup/wavesolver.hpp"

namespace blowup::config {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One experiment = metric + data + solver + test-function settings.  "p" and
// "q" may be the literal string "critical", which resolves to the critical
// exponent p0(n) and to q = (n-1)/2 - 1/p; lambda0 "auto" resolves to beta/4.
struct ExperimentConfig {
    int n = 3;
    bool p_critical = true;
    double p = 0.0;

    metric::MetricKind metric_kind = metric::MetricKind::ExpPerturbed;
    double metric_eps_g = 0.5;
    double metric_beta = 1.0;

    double eps = 1.0;
    double r0 = 1.5;
    bool with_velocity = true;

    wave::SolverConfig solver;

    bool q_critical = true;
    double q = 0.0;
    bool lambda0_auto = true;
    double lambda0 = 0.0;
    std::size_t log_panels = 2048;

    std::size_t ladder_points = 48;
    double lambda_min_factor = 1.0 / 200.0;
    double r_table = 80.0;
    double dr_table = 0.02;

    bool deterministic = true;
    std::string output_dir = "runs";

    double resolved_p() const;
    double resolved_q() const;
    double resolved_lambda0() const;

    metric::MetricField make_metric() const;
    wave::InitialData make_data() const;
    eigen::TableOptions make_table_options() const;
    testfn::EvaluatorOptions make_evaluator_options() const;

    void validate() const;

    std::string to_json_string() const;  // canonical key order, round-trips bit-exactly
    static ExperimentConfig from_json_string(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);

    /// FNV-1a hash of the canonical serialization; names the run directory.
    std::string hash() const;
};

} // namespace blowup::config
