#include "blowup/eigenfunction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "blowup/special_functions.hpp"

namespace blowup::eigen {

namespace {

// Thomas algorithm; overwrites the scratch copies, returns the solution.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    if (diag[0] == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double m = diag[i] - lower[i] * c[i - 1];
        if (m == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot (grid too coarse?)");
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

double japanese_bracket(double s) { return 3.0 + std::abs(s); }

struct TridiagSystem {
    std::vector<double> lower, diag, upper, rhs;
};

TridiagSystem assemble(const metric::MetricField& m, double lambda, const UniformGrid& g) {
    const int n = m.n;
    const double dr = g.dr;
    const std::size_t N = g.size;
    TridiagSystem s;
    s.lower.assign(N, 0.0);
    s.diag.assign(N, 0.0);
    s.upper.assign(N, 0.0);
    s.rhs.assign(N, 0.0);

    auto flux = [&](double r) { return std::pow(r, n - 1) * m.alpha(r); };

    // r = 0: operator limit n*alpha(0)*u_rr with u'(0) = 0.  The one-sided
    // stencil (-7u0 + 8u1 - u2)/(2 dr^2) stays second order even though the
    // radial coefficient leaves u'''(0) nonzero; its u2 entry is eliminated
    // against row 1 after assembly to keep the system tridiagonal.
    const double c0 = n * m.alpha(0.0) / (2.0 * dr * dr);
    s.diag[0] = -7.0 * c0 - lambda * lambda;
    s.upper[0] = 8.0 * c0;
    const double row0_u2 = -c0;
    s.rhs[0] = -perturbation_source(m, lambda, 0.0);

    // The flux form is inconsistent pointwise in the first cell off the
    // axis; the expanded form alpha u'' + (alpha' + (n-1) alpha/r) u' is
    // used there instead.
    {
        const double r = g.r(1);
        const double a = m.alpha(r);
        const double drift = (m.alpha_prime(r) + (n - 1) * a / r) / (2.0 * dr);
        s.lower[1] = a / (dr * dr) - drift;
        s.upper[1] = a / (dr * dr) + drift;
        s.diag[1] = -2.0 * a / (dr * dr) - lambda * lambda;
        s.rhs[1] = -perturbation_source(m, lambda, r);
    }
    for (std::size_t i = 2; i + 1 < N; ++i) {
        const double r = g.r(i);
        const double w = std::pow(r, n - 1) * dr * dr;
        const double gp = flux(r + 0.5 * dr);
        const double gm = flux(r - 0.5 * dr);
        s.lower[i] = gm / w;
        s.upper[i] = gp / w;
        s.diag[i] = -(gp + gm) / w - lambda * lambda;
        s.rhs[i] = -perturbation_source(m, lambda, r);
    }

    // r = r_max: Robin psi' + lambda psi = 0 via the ghost node
    // psi_{N} = psi_{N-2} - 2 lambda dr psi_{N-1}.
    {
        const std::size_t i = N - 1;
        const double r = g.r(i);
        const double w = std::pow(r, n - 1) * dr * dr;
        const double gp = flux(r + 0.5 * dr);
        const double gm = flux(r - 0.5 * dr);
        s.lower[i] = (gp + gm) / w;
        s.diag[i] = -(gp * (1.0 + 2.0 * lambda * dr) + gm) / w - lambda * lambda;
        s.rhs[i] = -perturbation_source(m, lambda, r);
    }

    const double factor = row0_u2 / s.upper[1];
    s.diag[0] -= factor * s.lower[1];
    s.upper[0] -= factor * s.diag[1];
    s.rhs[0] -= factor * s.rhs[1];
    return s;
}

std::size_t lower_row(const std::vector<double>& ascending, double x) {
    auto it = std::upper_bound(ascending.begin(), ascending.end(), x);
    if (it == ascending.begin()) return 0;
    return static_cast<std::size_t>(it - ascending.begin()) - 1;
}

} // namespace

double perturbation_source(const metric::MetricField& m, double lambda, double r) {
    if (m.is_flat()) return 0.0;
    const int n = m.n;
    const double z = lambda * r;
    const double a1 = m.alpha(r) - 1.0;
    const double ap = m.alpha_prime(r);
    // f = (alpha-1) lambda^2 phi''(z) + [alpha' + (n-1)(alpha-1)/r] lambda phi'(z),
    // assembled from e^{-z}-scaled factors; phi'(z)/r stays finite at r = 0.
    const double scaled = a1 * lambda * lambda * special::phi_flat_dderiv_scaled(n, z) +
                          ap * lambda * special::phi_flat_deriv_scaled(n, z) +
                          (n - 1) * a1 * lambda * lambda *
                              special::phi_flat_deriv_over_r_scaled(n, z);
    return std::exp(z) * scaled;
}

CorrectionSolve solve_correction(const metric::MetricField& m, double lambda,
                                 const SolveOptions& opt) {
    if (!(lambda > 0.0 && lambda <= m.beta / 2.0))
        throw std::invalid_argument("solve_correction: lambda must lie in (0, beta/2]");
    CorrectionSolve out;
    out.grid.dr = opt.dr;
    const double r_max =
        opt.r_max > 0.0 ? opt.r_max
                        : std::max(opt.r_min_domain, opt.domain_lambda_factor / lambda);
    out.grid.size = static_cast<std::size_t>(std::ceil(r_max / opt.dr)) + 1;

    if (m.is_flat()) {
        out.psi.assign(out.grid.size, 0.0);
        return out;
    }

    TridiagSystem s = assemble(m, lambda, out.grid);
    out.psi = solve_tridiagonal(s.lower, s.diag, s.upper, s.rhs);

    double rnorm = 0.0, bnorm = 0.0;
    for (std::size_t i = 0; i < out.grid.size; ++i) {
        double ax = s.diag[i] * out.psi[i];
        if (i > 0) ax += s.lower[i] * out.psi[i - 1];
        if (i + 1 < out.grid.size) ax += s.upper[i] * out.psi[i + 1];
        rnorm = std::max(rnorm, std::abs(ax - s.rhs[i]));
        bnorm = std::max(bnorm, std::abs(s.rhs[i]));
        out.sup_norm = std::max(out.sup_norm, std::abs(out.psi[i]));
    }
    out.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    if (!(out.residual <= 1e-10))
        throw std::runtime_error("solve_correction: discrete residual too large (grid too coarse)");
    return out;
}

std::vector<double> apply_discrete_operator(const metric::MetricField& m, double lambda,
                                            const UniformGrid& g,
                                            const std::vector<double>& v) {
    if (v.size() != g.size) throw std::invalid_argument("apply_discrete_operator: size mismatch");
    const int n = m.n;
    const double dr = g.dr;
    std::vector<double> out(g.size, 0.0);
    if (g.size < 3) return out;
    out[0] = n * m.alpha(0.0) * (-7.0 * v[0] + 8.0 * v[1] - v[2]) / (2.0 * dr * dr) -
             lambda * lambda * v[0];
    {
        const double r = g.r(1);
        const double a = m.alpha(r);
        out[1] = a * (v[2] - 2.0 * v[1] + v[0]) / (dr * dr) +
                 (m.alpha_prime(r) + (n - 1) * a / r) * (v[2] - v[0]) / (2.0 * dr) -
                 lambda * lambda * v[1];
    }
    for (std::size_t i = 2; i + 1 < g.size; ++i) {
        const double r = g.r(i);
        const double w = std::pow(r, n - 1) * dr * dr;
        const double gp = std::pow(r + 0.5 * dr, n - 1) * m.alpha(r + 0.5 * dr);
        const double gm = std::pow(r - 0.5 * dr, n - 1) * m.alpha(r - 0.5 * dr);
        out[i] = (gp * (v[i + 1] - v[i]) - gm * (v[i] - v[i - 1])) / w - lambda * lambda * v[i];
    }
    return out;
}

ThetaFit fit_power_law(const std::vector<double>& lambdas, const std::vector<double>& sups) {
    if (lambdas.size() != sups.size() || lambdas.size() < 2)
        throw std::invalid_argument("fit_power_law: need >= 2 samples");
    const std::size_t k = lambdas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x = std::log(lambdas[i]);
        const double y = std::log(sups[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    ThetaFit fit;
    const double det = k * sxx - sx * sx;
    fit.slope = (k * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    for (std::size_t i = 0; i < k; ++i) {
        const double pred = fit.intercept + fit.slope * std::log(lambdas[i]);
        fit.max_dev = std::max(fit.max_dev, std::abs(std::log(sups[i]) - pred));
    }
    return fit;
}

double EigenfunctionTable::psi_row_at(std::size_t row, double r) const {
    const auto& row_v = psi[row];
    const double r_top = r_grid.r_max();
    if (r > r_top) {
        // Far-field continuation: decaying radial profile of the homogeneous
        // operator, e^{-lambda (r - R)} (R / r)^{(n-1)/2}.
        const double lam = lambda_grid[row];
        const double base = row_v.back();
        return base * std::exp(-lam * (r - r_top)) *
               std::pow(r_top / r, 0.5 * (metric.n - 1));
    }
    const double x = r / r_grid.dr;
    const std::size_t nn = r_grid.size;
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= nn - 1) return row_v.back();
    const double t = x - static_cast<double>(i);
    if (i == 0 || i + 2 >= nn) {
        return row_v[i] * (1.0 - t) + row_v[i + 1] * t;
    }
    // Catmull-Rom through the four surrounding samples.
    const double pm = row_v[i - 1], p0 = row_v[i], p1 = row_v[i + 1], p2 = row_v[i + 2];
    const double a = 2.0 * p0;
    const double b = p1 - pm;
    const double c = 2.0 * pm - 5.0 * p0 + 4.0 * p1 - p2;
    const double d = -pm + 3.0 * p0 - 3.0 * p1 + p2;
    return 0.5 * (a + b * t + c * t * t + d * t * t * t);
}

double EigenfunctionTable::psi_value(double lambda, double r) const {
    if (metric.is_flat()) return 0.0;
    if (!(lambda > 0.0)) throw std::invalid_argument("psi_value: lambda must be > 0");
    const double lo = lambda_grid.front();
    const double hi = lambda_grid.back();
    if (lambda <= lo) {
        // Below the solved ladder the correction follows the measured
        // lambda^theta law down to zero.
        return psi_row_at(0, r) * std::pow(lambda / lo, theta_fit);
    }
    if (lambda >= hi) return psi_row_at(lambda_grid.size() - 1, r);

    // The ladder is geometric, i.e. uniform in u = log(lambda); interpolate
    // with the four nearest rows in u.
    const double du = std::log(lambda_grid[1] / lambda_grid[0]);
    const double pos = std::log(lambda / lo) / du;
    std::size_t k = std::min(static_cast<std::size_t>(pos), lambda_grid.size() - 2);
    const double t = pos - static_cast<double>(k);
    if (k == 0 || k + 2 >= lambda_grid.size()) {
        return psi_row_at(k, r) * (1.0 - t) + psi_row_at(k + 1, r) * t;
    }
    const double pm = psi_row_at(k - 1, r), p0 = psi_row_at(k, r);
    const double p1 = psi_row_at(k + 1, r), p2 = psi_row_at(k + 2, r);
    const double a = 2.0 * p0;
    const double b = p1 - pm;
    const double c = 2.0 * pm - 5.0 * p0 + 4.0 * p1 - p2;
    const double d = -pm + 3.0 * p0 - 3.0 * p1 + p2;
    return 0.5 * (a + b * t + c * t * t + d * t * t * t);
}

double EigenfunctionTable::phi_scaled(double lambda, double r) const {
    const double flat = special::phi_flat_scaled(metric.n, lambda * r);
    if (metric.is_flat()) return flat;
    return flat + std::exp(-lambda * r) * psi_value(lambda, r);
}

EigenfunctionTable build_table(const metric::MetricField& m, const TableOptions& opt) {
    EigenfunctionTable tab;
    tab.metric = m;
    double lambda0 = opt.lambda0 > 0.0 ? opt.lambda0 : m.beta / 4.0;
    if (!(lambda0 <= m.beta / 2.0))
        throw std::invalid_argument("build_table: lambda0 must lie in (0, beta/2]");
    if (opt.ladder_points < 8) throw std::invalid_argument("build_table: ladder too short");

    for (int attempt = 0; attempt < 6; ++attempt) {
        if (lambda0 * opt.r_table > 600.0)
            throw std::invalid_argument("build_table: lambda0 * r_table too large for raw storage");
        tab.lambda0 = lambda0;
        const std::size_t K = opt.ladder_points;
        tab.lambda_grid.resize(K);
        const double lmin = lambda0 * opt.lambda_min_factor;
        for (std::size_t k = 0; k < K; ++k)
            tab.lambda_grid[k] =
                lmin * std::exp(std::log(1.0 / opt.lambda_min_factor) *
                                static_cast<double>(k) / static_cast<double>(K - 1));
        tab.lambda_grid.back() = lambda0;

        SolveOptions sopt = opt.solve;
        sopt.dr = opt.dr_table;  // the table grid is the prefix of the solve grid
        tab.r_grid.dr = opt.dr_table;
        tab.r_grid.size = static_cast<std::size_t>(std::ceil(opt.r_table / opt.dr_table)) + 1;

        tab.psi.assign(K, {});
        tab.psi_sup.assign(K, 0.0);

        auto solve_one = [&](std::size_t k) {
            CorrectionSolve s = solve_correction(m, tab.lambda_grid[k], sopt);
            const std::size_t keep = std::min(tab.r_grid.size, s.grid.size);
            std::vector<double> row(s.psi.begin(), s.psi.begin() + keep);
            row.resize(tab.r_grid.size, keep ? row.back() : 0.0);
            tab.psi[k] = std::move(row);
            tab.psi_sup[k] = s.sup_norm;
        };
        if (opt.parallel && !m.is_flat()) {
            const unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
            std::vector<std::future<void>> fs;
            std::atomic<std::size_t> next{0};
            for (unsigned j = 0; j < jobs; ++j)
                fs.push_back(std::async(std::launch::async, [&] {
                    for (std::size_t k; (k = next.fetch_add(1)) < K;) solve_one(k);
                }));
            for (auto& f : fs) f.get();
        } else {
            for (std::size_t k = 0; k < K; ++k) solve_one(k);
        }

        // theta fit over the lower part of the ladder where the power law
        // is cleanest.
        if (!m.is_flat()) {
            std::vector<double> ls, ss;
            for (std::size_t k = 0; k < K; ++k)
                if (tab.lambda_grid[k] <= lambda0 / 8.0 && tab.psi_sup[k] > 0.0) {
                    ls.push_back(tab.lambda_grid[k]);
                    ss.push_back(tab.psi_sup[k]);
                }
            if (ls.size() >= 2) tab.theta_fit = fit_power_law(ls, ss).slope;
        }
        if (!(tab.theta_fit > 0.0)) tab.theta_fit = m.is_flat() ? 1.0 : 0.0;

        tab.phi_lambda.assign(K, std::vector<double>(tab.r_grid.size));
        bool positive = true;
        double d0 = std::numeric_limits<double>::max(), d1 = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double lam = tab.lambda_grid[k];
            for (std::size_t i = 0; i < tab.r_grid.size; ++i) {
                const double z = lam * tab.r_grid.r(i);
                const double scaled = special::phi_flat_scaled(m.n, z) +
                                      std::exp(-z) * tab.psi[k][i];
                tab.phi_lambda[k][i] = std::exp(z) * scaled;
                if (!(scaled > 0.0)) positive = false;
                const double ratio = scaled * std::pow(japanese_bracket(z), 0.5 * (m.n - 1));
                d0 = std::min(d0, ratio);
                d1 = std::max(d1, ratio);
            }
        }
        tab.d0 = d0;
        tab.d1 = d1;

        tab.continuity_modulus = 0.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            double diff = 0.0;
            for (std::size_t i = 0; i < tab.r_grid.size; ++i)
                diff = std::max(diff, std::abs(tab.psi[k][i] - tab.psi[k + 1][i]));
            tab.continuity_modulus = std::max(
                tab.continuity_modulus, diff / (tab.lambda_grid[k + 1] - tab.lambda_grid[k]));
        }

        if (positive && (m.is_flat() || tab.theta_fit > 0.0)) return tab;
        lambda0 *= 0.7;  // positivity only holds for small enough lambda0
    }
    throw std::runtime_error("build_table: positivity failed even after shrinking lambda0");
}

} // namespace blowup::eigen
