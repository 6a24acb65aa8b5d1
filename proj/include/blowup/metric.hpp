#pragma once

#include <span>
#include <string>

namespace blowup::metric {

enum class MetricKind { Flat, ExpPerturbed };

// Isotropic radial coefficient field g = alpha(r) I, so the variable
// Laplacian reduces to  r^{1-n} (r^{n-1} alpha u_r)_r.  Admissible fields
// satisfy alpha >= gamma > 0 and |alpha - 1| + |alpha'| <= K e^{-beta r}.
struct MetricField {
    int n = 3;
    MetricKind kind = MetricKind::Flat;
    double eps_g = 0.0;   // ExpPerturbed: alpha(r) = 1 - eps_g e^{-beta r}
    double beta = 1.0;    // decay rate, 1/length
    double gamma = 1.0;   // ellipticity floor

    double alpha(double r) const;
    double alpha_prime(double r) const;
    bool is_flat() const { return kind == MetricKind::Flat; }
    std::string kind_name() const;
};

MetricField make_metric_flat(int n);
MetricField make_metric_exp(int n, double eps_g, double beta);

struct HypothesisReport {
    double gamma_observed = 0.0;  // min alpha over samples
    double k_g_observed = 0.0;    // sup (|alpha-1| + |alpha'|) e^{beta r}
    bool pass = false;
};

/// Report-only check of the ellipticity and exponential-decay hypotheses
/// on a finite sample set.  Decay is checked through the non-increasing
/// envelope of (|alpha-1| + |alpha'|) e^{beta r} along sorted samples.
HypothesisReport verify_hypotheses(const MetricField& m, std::span<const double> r_samples);

} // namespace blowup::metric
