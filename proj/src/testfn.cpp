#include "blowup/testfn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "blowup/special_functions.hpp"

namespace blowup::testfn {

namespace {

// (1 - e^{-y}) / y, the scaled sinh kernel after folding the exponential
// prefactor; expm1 keeps it exact through y -> 0.
double one_minus_exp_over(double y) {
    if (y == 0.0) return 1.0;
    return -std::expm1(-y) / y;
}

// int_0^f e^{-l T} l^q dl as a short series in (f T); valid for |f T| << 1.
double tail_moment(double q, double f, double T) {
    const double fT = f * T;
    return std::pow(f, q + 1.0) *
           (1.0 / (q + 1.0) - fT / (q + 2.0) + fT * fT / (2.0 * (q + 3.0)) -
            fT * fT * fT / (6.0 * (q + 4.0)));
}

struct SimpsonRule {
    double u0 = 0.0, h = 0.0;
    std::size_t nodes = 0;
    double node_lambda(std::size_t j) const { return std::exp(u0 + h * static_cast<double>(j)); }
    double coeff(std::size_t j) const {
        if (j == 0 || j + 1 == nodes) return 1.0;
        return (j % 2 == 1) ? 4.0 : 2.0;
    }
};

SimpsonRule make_rule(double floor_lambda, double lambda0, std::size_t panels) {
    SimpsonRule rule;
    if (panels % 2 == 1) ++panels;
    rule.u0 = std::log(floor_lambda);
    rule.h = (std::log(lambda0) - rule.u0) / static_cast<double>(panels);
    rule.nodes = panels + 1;
    return rule;
}

} // namespace

TestFunctionEvaluator::TestFunctionEvaluator(
    std::shared_ptr<const eigen::EigenfunctionTable> table, const EvaluatorOptions& opt)
    : table_(std::move(table)),
      q_(opt.q),
      support_radius_(opt.support_radius),
      lambda0_(table_->lambda0),
      panels_(opt.log_panels),
      floor_factor_(opt.floor_factor) {
    if (!(q_ > -1.0)) throw std::invalid_argument("TestFunctionEvaluator: q must be > -1");
    if (!(support_radius_ > 0.0))
        throw std::invalid_argument("TestFunctionEvaluator: support radius must be > 0");
    if (!(floor_factor_ > 0.0 && floor_factor_ < 1e-3))
        throw std::invalid_argument("TestFunctionEvaluator: floor factor out of range");
}

double TestFunctionEvaluator::integrate_xi(double x, double t, std::size_t panels) const {
    const double R = support_radius_;
    const double fl = lambda0_ * floor_factor_;
    const SimpsonRule rule = make_rule(fl, lambda0_, panels);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes; ++j) {
        const double lam = rule.node_lambda(j);
        const double w = table_->phi_scaled(lam, x);
        const double f = 0.5 * (std::exp(lam * (x - R)) + std::exp(lam * (x - R - 2.0 * t))) *
                         w * std::exp(q_ * std::log(lam));
        acc += rule.coeff(j) * f * lam;  // d lambda = lambda du
    }
    acc *= rule.h / 3.0;
    const double w0 = special::sphere_area(table_->metric.n);
    acc += 0.5 * w0 * (tail_moment(q_, fl, R - x) + tail_moment(q_, fl, 2.0 * t + R - x));
    return acc;
}

double TestFunctionEvaluator::integrate_eta(double x, double t, double s,
                                            std::size_t panels) const {
    const double R = support_radius_;
    const double delta = t - s;
    const double fl = lambda0_ * floor_factor_;
    const SimpsonRule rule = make_rule(fl, lambda0_, panels);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes; ++j) {
        const double lam = rule.node_lambda(j);
        const double w = table_->phi_scaled(lam, x);
        const double f = std::exp(lam * (x - s - R) + q_ * std::log(lam)) *
                         one_minus_exp_over(2.0 * lam * delta) * w;
        acc += rule.coeff(j) * f * lam;
    }
    acc *= rule.h / 3.0;
    // [0, floor] tail: product series of e^{-l T1} and the sinh kernel.
    const double w0 = special::sphere_area(table_->metric.n);
    const double T1 = s + R - x;
    const double c2 = 0.5 * T1 * T1 + T1 * delta + (2.0 / 3.0) * delta * delta;
    acc += w0 * std::pow(fl, q_ + 1.0) *
           (1.0 / (q_ + 1.0) - (T1 + delta) * fl / (q_ + 2.0) + c2 * fl * fl / (q_ + 3.0));
    return acc;
}

double TestFunctionEvaluator::xi(double x, double t) const {
    if (!(t >= 0.0)) throw std::domain_error("xi: t must be >= 0");
    if (!(x >= 0.0)) throw std::domain_error("xi: x must be >= 0");
    return integrate_xi(x, t, panels_);
}

double TestFunctionEvaluator::eta(double x, double t, double s) const {
    if (!(x >= 0.0)) throw std::domain_error("eta: x must be >= 0");
    if (!(s >= 0.0 && s <= t)) throw std::domain_error("eta: need 0 <= s <= t");
    return integrate_eta(x, t, s, panels_);
}

double TestFunctionEvaluator::xi_with_panels(double x, double t, std::size_t panels) const {
    return integrate_xi(x, t, panels);
}

double TestFunctionEvaluator::eta_with_panels(double x, double t, double s,
                                              std::size_t panels) const {
    return integrate_eta(x, t, s, panels);
}

TestFunctionEvaluator::BulkWorkspace TestFunctionEvaluator::make_bulk(
    std::span<const double> x_grid, std::size_t panels) const {
    BulkWorkspace ws;
    ws.x.assign(x_grid.begin(), x_grid.end());
    ws.panels = panels;
    ws.floor_lambda = lambda0_ * floor_factor_;
    const SimpsonRule rule = make_rule(ws.floor_lambda, lambda0_, panels);
    ws.nodes.resize(rule.nodes);
    ws.weights.resize(rule.nodes);
    ws.w.resize(rule.nodes * ws.x.size());
    for (std::size_t j = 0; j < rule.nodes; ++j) {
        const double lam = rule.node_lambda(j);
        ws.nodes[j] = lam;
        ws.weights[j] = rule.coeff(j) * (rule.h / 3.0) * lam * std::exp(q_ * std::log(lam));
        for (std::size_t i = 0; i < ws.x.size(); ++i)
            ws.w[j * ws.x.size() + i] = table_->phi_scaled(lam, ws.x[i]);
    }
    return ws;
}

void TestFunctionEvaluator::eta_profile(const BulkWorkspace& ws, double t, double s,
                                        std::span<double> out, bool all) const {
    if (out.size() != ws.x.size()) throw std::invalid_argument("eta_profile: size mismatch");
    if (!(s >= 0.0 && s <= t)) throw std::domain_error("eta_profile: need 0 <= s <= t");
    const double R = support_radius_;
    const double delta = t - s;
    const std::size_t nx = ws.x.size();
    const double w0 = special::sphere_area(table_->metric.n);
    for (std::size_t i = 0; i < nx; ++i) {
        out[i] = 0.0;
        if (!all && ws.x[i] > s + R) continue;
        double acc = 0.0;
        for (std::size_t j = 0; j < ws.nodes.size(); ++j) {
            const double lam = ws.nodes[j];
            acc += ws.weights[j] * std::exp(lam * (ws.x[i] - s - R)) *
                   one_minus_exp_over(2.0 * lam * delta) * ws.w[j * nx + i];
        }
        const double T1 = s + R - ws.x[i];
        const double fl = ws.floor_lambda;
        const double c2 = 0.5 * T1 * T1 + T1 * delta + (2.0 / 3.0) * delta * delta;
        acc += w0 * std::pow(fl, q_ + 1.0) *
               (1.0 / (q_ + 1.0) - (T1 + delta) * fl / (q_ + 2.0) + c2 * fl * fl / (q_ + 3.0));
        out[i] = acc;
    }
}

void TestFunctionEvaluator::xi_profile(const BulkWorkspace& ws, double t,
                                       std::span<double> out) const {
    if (out.size() != ws.x.size()) throw std::invalid_argument("xi_profile: size mismatch");
    const double R = support_radius_;
    const std::size_t nx = ws.x.size();
    const double w0 = special::sphere_area(table_->metric.n);
    for (std::size_t i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < ws.nodes.size(); ++j) {
            const double lam = ws.nodes[j];
            acc += ws.weights[j] * 0.5 *
                   (std::exp(lam * (ws.x[i] - R)) + std::exp(lam * (ws.x[i] - R - 2.0 * t))) *
                   ws.w[j * nx + i];
        }
        acc += 0.5 * w0 *
               (tail_moment(q_, ws.floor_lambda, R - ws.x[i]) +
                tail_moment(q_, ws.floor_lambda, 2.0 * t + R - ws.x[i]));
        out[i] = acc;
    }
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t k) {
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
    return v;
}

struct FitPass {
    double a0 = std::numeric_limits<double>::max();
    double b0 = std::numeric_limits<double>::max();
    double b1 = std::numeric_limits<double>::max();
    double b2 = 0.0;
};

FitPass fit_once(const TestFunctionEvaluator& ev, const BoundSampleSpec& spec,
                 std::size_t panels) {
    const double R = ev.support_radius();
    const int n = ev.table().metric.n;
    const double q = ev.q();
    FitPass f;
    for (double t : spec.t_grid) {
        for (double x : linspace(0.0, R, spec.x_points)) {
            f.a0 = std::min(f.a0, ev.xi_with_panels(x, t, panels));
            f.b0 = std::min(f.b0, ev.eta_with_panels(x, t, 0.0, panels) * bracket(t));
        }
        if (t <= 0.0) continue;
        // lower bound (ii) over 0 <= s < t, |x| <= s + R
        for (std::size_t is = 0; is < spec.s_points; ++is) {
            const double frac = static_cast<double>(is) / static_cast<double>(spec.s_points);
            const double s = frac * t;
            for (double x : linspace(0.0, s + R, spec.x_points)) {
                const double v = ev.eta_with_panels(x, t, s, panels);
                f.b1 = std::min(f.b1, v * bracket(t) * std::pow(bracket(s), q));
            }
        }
        // decay bound (iii) along s = t, |x| <= t + R
        for (double x : linspace(0.0, t + R, spec.x_points)) {
            const double v = ev.eta_with_panels(x, t, t, panels);
            f.b2 = std::max(f.b2, v * std::pow(bracket(t), 0.5 * (n - 1)) *
                                      std::pow(bracket(t - x), q - 0.5 * (n - 3)));
        }
    }
    return f;
}

double rel_change(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

} // namespace

BoundConstants fit_bound_constants(const TestFunctionEvaluator& ev, const BoundSampleSpec& spec) {
    const int n = ev.table().metric.n;
    if (!(ev.q() > 0.0))
        throw std::invalid_argument("fit_bound_constants: lower bounds need q > 0");
    if (!(ev.q() > 0.5 * (n - 3)))
        throw std::invalid_argument("fit_bound_constants: decay bound needs q > (n-3)/2");
    if (spec.t_grid.empty() || spec.x_points < 2 || spec.s_points < 1)
        throw std::invalid_argument("fit_bound_constants: degenerate sample spec");

    // The reported constants come from the base grid; a doubled grid bounds
    // the quadrature sensitivity.
    const std::size_t base = 4096;
    const FitPass c = fit_once(ev, spec, base);
    const FitPass d = fit_once(ev, spec, 2 * base);

    BoundConstants out;
    out.spec = spec;
    out.a0 = c.a0;
    out.b0 = c.b0;
    out.b1 = c.b1;
    out.b2 = c.b2;
    out.stability = std::max({rel_change(c.a0, d.a0), rel_change(c.b0, d.b0),
                              rel_change(c.b1, d.b1), rel_change(c.b2, d.b2)});
    out.pass = c.a0 > 0.0 && c.b0 > 0.0 && c.b1 > 0.0 && c.b2 > 0.0 &&
               std::isfinite(c.b2) && std::isfinite(c.a0);
    return out;
}

} // namespace blowup::testfn
