#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "blowup/config.hpp"
#include "blowup/eigenfunction.hpp"
#include "blowup/functional.hpp"
#include "blowup/iteration.hpp"
#include "blowup/metric.hpp"
#include "blowup/special_functions.hpp"
#include "blowup/testfn.hpp"
#include "blowup/wavesolver.hpp"

namespace py = pybind11;
using namespace blowup;

namespace {

metric::MetricField metric_from_args(const std::string& kind, int n, double eps_g, double beta) {
    if (kind == "flat") return metric::make_metric_flat(n);
    if (kind == "exp") return metric::make_metric_exp(n, eps_g, beta);
    throw std::invalid_argument("metric kind must be 'flat' or 'exp'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical laboratory for blow-up of critical semilinear wave equations "
              "with variable coefficients";

    m.def("sphere_area", &special::sphere_area, py::arg("n"));
    m.def("bessel_i", &special::bessel_i, py::arg("nu"), py::arg("x"));
    m.def("bessel_i_scaled", &special::bessel_i_scaled, py::arg("nu"), py::arg("x"));
    m.def("phi_flat", &special::phi_flat, py::arg("n"), py::arg("r"));
    m.def("phi_flat_scaled", &special::phi_flat_scaled, py::arg("n"), py::arg("r"));
    m.def("phi_flat_asymptotic", &special::phi_flat_asymptotic, py::arg("n"), py::arg("r"));

    py::class_<metric::MetricField>(m, "Metric")
        .def_readonly("n", &metric::MetricField::n)
        .def_readonly("gamma", &metric::MetricField::gamma)
        .def_readonly("eps_g", &metric::MetricField::eps_g)
        .def_readonly("beta", &metric::MetricField::beta)
        .def_property_readonly("kind", &metric::MetricField::kind_name)
        .def("alpha", &metric::MetricField::alpha, py::arg("r"))
        .def("alpha_prime", &metric::MetricField::alpha_prime, py::arg("r"));
    m.def("make_metric", &metric_from_args, py::arg("kind"), py::arg("n") = 3,
          py::arg("eps_g") = 0.5, py::arg("beta") = 1.0);

    py::class_<metric::HypothesisReport>(m, "HypothesisReport")
        .def_readonly("gamma_observed", &metric::HypothesisReport::gamma_observed)
        .def_readonly("k_g_observed", &metric::HypothesisReport::k_g_observed)
        .def_readonly("passed", &metric::HypothesisReport::pass);
    m.def("verify_hypotheses",
          [](const metric::MetricField& mf, const std::vector<double>& rs) {
              return metric::verify_hypotheses(mf, rs);
          },
          py::arg("metric"), py::arg("r_samples"));

    py::class_<iteration::StraussExponent>(m, "StraussExponent")
        .def_readonly("n", &iteration::StraussExponent::n)
        .def_readonly("p0", &iteration::StraussExponent::p0)
        .def_readonly("gamma_at_p0", &iteration::StraussExponent::gamma_at_p0);
    m.def("strauss_exponent", &iteration::strauss_exponent, py::arg("n"));
    m.def("strauss_gamma", &iteration::strauss_gamma, py::arg("p"), py::arg("n"));
    m.def("critical_exponent_combination", &iteration::critical_exponent_combination,
          py::arg("n"), py::arg("p"));

    py::class_<eigen::EigenfunctionTable, std::shared_ptr<eigen::EigenfunctionTable>>(
        m, "EigenfunctionTable")
        .def_readonly("lambda_grid", &eigen::EigenfunctionTable::lambda_grid)
        .def_readonly("lambda0", &eigen::EigenfunctionTable::lambda0)
        .def_readonly("theta_fit", &eigen::EigenfunctionTable::theta_fit)
        .def_readonly("d0", &eigen::EigenfunctionTable::d0)
        .def_readonly("d1", &eigen::EigenfunctionTable::d1)
        .def_readonly("psi_sup", &eigen::EigenfunctionTable::psi_sup)
        .def("phi_scaled", &eigen::EigenfunctionTable::phi_scaled, py::arg("lam"),
             py::arg("r"))
        .def("psi_value", &eigen::EigenfunctionTable::psi_value, py::arg("lam"), py::arg("r"));
    m.def(
        "build_table",
        [](const metric::MetricField& mf, double lambda0, std::size_t ladder_points,
           double r_table) {
            eigen::TableOptions opt;
            opt.lambda0 = lambda0;
            opt.ladder_points = ladder_points;
            opt.r_table = r_table;
            return std::make_shared<eigen::EigenfunctionTable>(eigen::build_table(mf, opt));
        },
        py::arg("metric"), py::arg("lambda0") = 0.0, py::arg("ladder_points") = 48,
        py::arg("r_table") = 80.0);
    m.def(
        "solve_correction",
        [](const metric::MetricField& mf, double lam, double dr) {
            eigen::SolveOptions opt;
            opt.dr = dr;
            const auto s = eigen::solve_correction(mf, lam, opt);
            return py::make_tuple(s.psi, s.grid.dr, s.sup_norm);
        },
        py::arg("metric"), py::arg("lam"), py::arg("dr") = 0.02);

    py::class_<testfn::BoundConstants>(m, "BoundConstants")
        .def_readonly("a0", &testfn::BoundConstants::a0)
        .def_readonly("b0", &testfn::BoundConstants::b0)
        .def_readonly("b1", &testfn::BoundConstants::b1)
        .def_readonly("b2", &testfn::BoundConstants::b2)
        .def_readonly("stability", &testfn::BoundConstants::stability)
        .def_readonly("passed", &testfn::BoundConstants::pass);
    py::class_<testfn::TestFunctionEvaluator>(m, "TestFunctionEvaluator")
        .def(py::init([](std::shared_ptr<eigen::EigenfunctionTable> tab, double q, double R) {
                 testfn::EvaluatorOptions opt;
                 opt.q = q;
                 opt.support_radius = R;
                 return testfn::TestFunctionEvaluator(std::move(tab), opt);
             }),
             py::arg("table"), py::arg("q"), py::arg("support_radius") = 2.0)
        .def("xi", &testfn::TestFunctionEvaluator::xi, py::arg("x"), py::arg("t"))
        .def("eta", &testfn::TestFunctionEvaluator::eta, py::arg("x"), py::arg("t"),
             py::arg("s"))
        .def("fit_bounds", [](const testfn::TestFunctionEvaluator& ev) {
            return testfn::fit_bound_constants(ev);
        });

    py::class_<wave::BlowupInfo>(m, "BlowupInfo")
        .def_readonly("detected", &wave::BlowupInfo::detected)
        .def_readonly("t_cross", &wave::BlowupInfo::t_cross)
        .def_readonly("t_lo", &wave::BlowupInfo::t_lo)
        .def_readonly("t_hi", &wave::BlowupInfo::t_hi);
    py::class_<wave::SeriesPoint>(m, "SeriesPoint")
        .def_readonly("t", &wave::SeriesPoint::t)
        .def_readonly("max_u", &wave::SeriesPoint::max_u)
        .def_readonly("l2", &wave::SeriesPoint::l2)
        .def_readonly("lp_integral", &wave::SeriesPoint::lp_integral)
        .def_readonly("f_value", &wave::SeriesPoint::f_value);
    py::class_<wave::RunRecord>(m, "RunRecord")
        .def_readonly("n", &wave::RunRecord::n)
        .def_readonly("p", &wave::RunRecord::p)
        .def_readonly("eps", &wave::RunRecord::eps)
        .def_readonly("termination", &wave::RunRecord::termination)
        .def_readonly("blowup", &wave::RunRecord::blowup)
        .def_readonly("series", &wave::RunRecord::series);
    m.def(
        "run_blowup",
        [](const metric::MetricField& mf, double p, double eps, double t_max, double dr,
           double threshold, bool nonlinear) {
            wave::InitialData data;
            data.eps = eps;
            wave::SolverConfig cfg;
            cfg.t_max = t_max;
            cfg.dr = dr;
            cfg.blowup_threshold = threshold;
            cfg.nonlinear = nonlinear;
            return wave::run_until_blowup(data, mf, p, cfg);
        },
        py::arg("metric"), py::arg("p"), py::arg("eps") = 1.0, py::arg("t_max") = 30.0,
        py::arg("dr") = 0.02, py::arg("threshold") = 1e6, py::arg("nonlinear") = true);

    py::class_<iteration::IterationSchedule>(m, "IterationSchedule")
        .def_readonly("p", &iteration::IterationSchedule::p)
        .def_readonly("l", &iteration::IterationSchedule::l)
        .def_readonly("a", &iteration::IterationSchedule::a)
        .def_readonly("b", &iteration::IterationSchedule::b)
        .def_readonly("s_limit", &iteration::IterationSchedule::s_limit)
        .def("log_c", &iteration::IterationSchedule::log_c, py::arg("j"))
        .def("log_c_closed", &iteration::IterationSchedule::log_c_closed, py::arg("j"))
        .def("envelope", &iteration::IterationSchedule::envelope, py::arg("t"), py::arg("j"))
        .def("envelope_log", &iteration::IterationSchedule::envelope_log, py::arg("t"),
             py::arg("j"))
        .def("first_step", &iteration::IterationSchedule::first_step, py::arg("t"));
    m.def(
        "build_schedule",
        [](double p, double c_frame, double c0, double b1, double eps, int j_max) {
            return iteration::IterationSchedule::build(p, {c_frame, c0, b1}, eps, j_max);
        },
        py::arg("p"), py::arg("c_frame") = 1.0, py::arg("c0") = 1.0, py::arg("b1") = 1.0,
        py::arg("eps") = 1.0, py::arg("j_max") = 30);
    py::class_<iteration::LifespanBound>(m, "LifespanBound")
        .def_readonly("log_b", &iteration::LifespanBound::log_b)
        .def_readonly("k_eff", &iteration::LifespanBound::k_eff)
        .def_readonly("log_t_bound", &iteration::LifespanBound::log_t_bound)
        .def_readonly("t_bound", &iteration::LifespanBound::t_bound)
        .def_readonly("eps0", &iteration::LifespanBound::eps0)
        .def_readonly("within_guarantee", &iteration::LifespanBound::within_guarantee);
    m.def("lifespan_bound", &iteration::lifespan_bound, py::arg("schedule"), py::arg("eps"));
    m.def("blowup_trigger_logt", &iteration::blowup_trigger_logt, py::arg("schedule"),
          py::arg("eps"), py::arg("log_t"));
}
