#include "blowup/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace blowup::metric {

double MetricField::alpha(double r) const {
    if (kind == MetricKind::Flat) return 1.0;
    return 1.0 - eps_g * std::exp(-beta * r);
}

double MetricField::alpha_prime(double r) const {
    if (kind == MetricKind::Flat) return 0.0;
    return eps_g * beta * std::exp(-beta * r);
}

std::string MetricField::kind_name() const {
    return kind == MetricKind::Flat ? "flat" : "exp";
}

MetricField make_metric_flat(int n) {
    if (n < 2) throw std::invalid_argument("make_metric: dimension must be >= 2");
    MetricField m;
    m.n = n;
    m.kind = MetricKind::Flat;
    m.gamma = 1.0;
    return m;
}

MetricField make_metric_exp(int n, double eps_g, double beta) {
    if (n < 2) throw std::invalid_argument("make_metric: dimension must be >= 2");
    if (!(eps_g > 0.0 && eps_g < 1.0))
        throw std::invalid_argument("make_metric: eps_g must lie in (0,1)");
    if (!(beta > 0.0)) throw std::invalid_argument("make_metric: beta must be > 0");
    MetricField m;
    m.n = n;
    m.kind = MetricKind::ExpPerturbed;
    m.eps_g = eps_g;
    m.beta = beta;
    m.gamma = 1.0 - eps_g;
    return m;
}

HypothesisReport verify_hypotheses(const MetricField& m, std::span<const double> r_samples) {
    if (r_samples.empty())
        throw std::invalid_argument("verify_hypotheses: need at least one sample");
    std::vector<double> rs(r_samples.begin(), r_samples.end());
    std::sort(rs.begin(), rs.end());
    if (rs.front() < 0.0)
        throw std::invalid_argument("verify_hypotheses: samples must be nonnegative");

    HypothesisReport rep;
    rep.gamma_observed = 1.0;
    double prev_env = std::numeric_limits<double>::max();
    bool envelope_ok = true;
    for (double r : rs) {
        const double a = m.alpha(r);
        rep.gamma_observed = std::min(rep.gamma_observed, a);
        const double env = (std::abs(a - 1.0) + std::abs(m.alpha_prime(r))) * std::exp(m.beta * r);
        rep.k_g_observed = std::max(rep.k_g_observed, env);
        // rounding in alpha(r)-1 is amplified by e^{beta r}; allow that much
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::exp(m.beta * r);
        if (env > prev_env * (1.0 + 1e-9) + slack) envelope_ok = false;
        prev_env = env;
    }
    rep.pass = envelope_ok && std::isfinite(rep.k_g_observed) &&
               rep.gamma_observed >= m.gamma - 1e-12;
    return rep;
}

} // namespace blowup::metric
