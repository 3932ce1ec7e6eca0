#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lattice_smooth/cli.hpp"
#include "lattice_smooth/dependence.hpp"
#include "lattice_smooth/experiment.hpp"

namespace py = pybind11;
using namespace latsm;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
    const py::object loads = py::module_::import("json").attr("loads");
    return loads(j.dump());
}

py::array_t<double> field_values(const FieldSample& field) {
    std::vector<py::ssize_t> shape(static_cast<std::size_t>(field.shape.d),
                                   static_cast<py::ssize_t>(field.shape.n));
    py::array_t<double> out(shape);
    std::copy(field.values.begin(), field.values.end(), out.mutable_data());
    return out;
}

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    return std::vector<double>(arr.data(), arr.data() + arr.size());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fixed-design kernel regression on lattices with dependent errors";

    // ---- field generation ----------------------------------------------
    py::enum_<InnovationLawKind>(m, "InnovationLawKind")
        .value("GAUSSIAN", InnovationLawKind::Gaussian)
        .value("UNIFORM", InnovationLawKind::Uniform)
        .value("RADEMACHER", InnovationLawKind::Rademacher);

    py::class_<InnovationLaw>(m, "InnovationLaw")
        .def_readonly("kind", &InnovationLaw::kind)
        .def_readonly("param", &InnovationLaw::param)
        .def("variance", &InnovationLaw::variance);
    m.def("gaussian_innovation",
          [](double sigma) { return InnovationLaw{InnovationLawKind::Gaussian, sigma}; },
          py::arg("sigma") = 1.0);
    m.def("uniform_innovation",
          [](double a) { return InnovationLaw{InnovationLawKind::Uniform, a}; }, py::arg("a"));
    m.def("rademacher_innovation",
          []() { return InnovationLaw{InnovationLawKind::Rademacher, 0.0}; });

    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def("dependence_radius", &GeneratorSpec::dependence_radius, py::arg("d"))
        .def("describe", &GeneratorSpec::describe);
    m.def("iid_generator", [](const InnovationLaw& law) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::IID;
        spec.innovation = law;
        return spec;
    });
    m.def("linear_generator",
          [](const std::vector<std::pair<Index, double>>& table, const InnovationLaw& law) {
              GeneratorSpec spec;
              spec.kind = GeneratorKind::Linear;
              spec.innovation = law;
              for (const auto& [offset, value] : table)
                  spec.coefficients.push_back({offset, value});
              return spec;
          },
          py::arg("coefficients"), py::arg("innovation"));
    m.def("md_generator",
          [](const InnovationLaw& law, const std::string& link) {
              GeneratorSpec spec;
              spec.kind = GeneratorKind::MdNeighbor;
              spec.innovation = law;
              if (link == "sign")
                  spec.link = LinkFn::Sign;
              else if (link == "tanh")
                  spec.link = LinkFn::Tanh;
              else
                  throw validation_error("unknown link: " + link);
              return spec;
          },
          py::arg("innovation"), py::arg("link") = "sign");

    py::class_<FieldSample>(m, "FieldSample")
        .def_property_readonly("values", &field_values)
        .def_readonly("seed", &FieldSample::seed)
        .def_property_readonly("d", [](const FieldSample& f) { return f.shape.d; })
        .def_property_readonly("n", [](const FieldSample& f) { return f.shape.n; });

    m.def("generate",
          [](const GeneratorSpec& spec, int d, std::int64_t n, std::uint64_t seed) {
              return generate(spec, LatticeShape{d, n}, seed);
          },
          py::arg("spec"), py::arg("d"), py::arg("n"), py::arg("seed"));
    m.def("theoretical_covariance", &theoretical_covariance, py::arg("spec"), py::arg("lag"));
    m.def("field_variance", &field_variance);
    m.def("covariance_absolute_sum", &covariance_absolute_sum, py::arg("spec"), py::arg("d"));

    // ---- kernels ---------------------------------------------------------
    py::class_<KernelSpec>(m, "KernelSpec")
        .def_readonly("d", &KernelSpec::d)
        .def_readonly("lower", &KernelSpec::lower)
        .def_readonly("upper", &KernelSpec::upper)
        .def_readonly("lipschitz", &KernelSpec::lipschitz);
    m.def("uniform_kernel", &KernelSpec::uniform, py::arg("d"));
    m.def("pedestal_kernel", &KernelSpec::pedestal_kernel, py::arg("d"), py::arg("a"),
          py::arg("b"));
    m.def("kernel_eval",
          [](const KernelSpec& k, const std::vector<double>& u) { return kernel_eval(k, u); });
    m.def("verify_a1", [](const KernelSpec& k, int resolution) {
        const A1Report r = verify_a1(k, resolution);
        py::dict out;
        out["min_value"] = r.min_value;
        out["max_value"] = r.max_value;
        out["lipschitz_quotient"] = r.lipschitz_quotient;
        out["integral"] = r.integral;
        out["integral_error_bound"] = r.integral_error_bound;
        out["pass"] = r.pass;
        return out;
    });

    // ---- estimator -------------------------------------------------------
    py::class_<EstimationProblem>(m, "EstimationProblem")
        .def(py::init([](int d, std::int64_t n, const KernelSpec& kernel, double bandwidth,
                         const std::string& regression, double lipschitz) {
                 EstimationProblem p;
                 p.shape = LatticeShape{d, n};
                 p.kernel = kernel;
                 p.bandwidth = bandwidth;
                 if (!regression.empty())
                     p.regression = make_regression(regression, lipschitz, d);
                 p.validate();
                 return p;
             }),
             py::arg("d"), py::arg("n"), py::arg("kernel"), py::arg("bandwidth"),
             py::arg("regression") = "", py::arg("lipschitz") = 1.0)
        .def_readonly("bandwidth", &EstimationProblem::bandwidth);

    m.def("weight", [](const EstimationProblem& p, const std::vector<double>& x, const Index& i) {
        return weight(p, x, i);
    });
    m.def("weight_sum",
          [](const EstimationProblem& p, const std::vector<double>& x) { return weight_sum(p, x); });
    m.def("estimate",
          [](const EstimationProblem& p,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& y,
             const std::vector<double>& x) { return estimate(p, as_vector(y), x); });
    m.def("expected_estimate", [](const EstimationProblem& p, const std::vector<double>& x) {
        return expected_estimate(p, x);
    });
    m.def("bias_at",
          [](const EstimationProblem& p, const std::vector<double>& x) { return bias_at(p, x); });
    m.def("bandwidth_value",
          [](const std::string& form, int d, std::int64_t n, double theta1, double theta2) {
              BandwidthSchedule schedule;
              if (form == "OPTIMAL_AS")
                  schedule.form = BandwidthForm::OptimalAs;
              else if (form == "OPTIMAL_LP")
                  schedule.form = BandwidthForm::OptimalLp;
              else if (form == "POWERLOG")
                  schedule.form = BandwidthForm::PowerLog;
              else
                  throw validation_error("unknown bandwidth form: " + form);
              schedule.theta1 = theta1;
              schedule.theta2 = theta2;
              return schedule.value(d, n);
          },
          py::arg("form"), py::arg("d"), py::arg("n"), py::arg("theta1") = 0.0,
          py::arg("theta2") = 0.0);

    m.def("sup_deviation",
          [](const EstimationProblem& p,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& y,
             std::int64_t points_per_axis, bool covering, double target_rate) {
              EvalGrid grid =
                  covering ? make_covering_grid(p.shape.d, p.bandwidth,
                                                target_rate > 0 ? target_rate : p.bandwidth,
                                                1 << 21, 1 << 15)
                           : make_uniform_grid(p.shape.d, points_per_axis);
              const SupReport r = sup_deviation(p, as_vector(y), grid);
              py::dict out;
              out["sup_deviation"] = r.sup_deviation;
              out["argmax"] = r.argmax;
              out["grid_points"] = r.grid_points;
              if (r.has_covering) {
                  out["a1"] = r.a1;
                  out["a2"] = r.a2;
                  out["a3"] = r.a3;
                  out["cube_count"] = r.cube_count;
                  out["cube_side"] = r.cube_side;
                  out["capped"] = r.capped;
              }
              return out;
          },
          py::arg("problem"), py::arg("y"), py::arg("points_per_axis") = 401,
          py::arg("covering") = false, py::arg("target_rate") = -1.0);
    m.def("exact_squared_sum_moment",
          [](const EstimationProblem& p, const GeneratorSpec& gen, const std::vector<double>& x) {
              return exact_squared_sum_moment(p, gen, x);
          });

    // ---- Orlicz calculus ---------------------------------------------------
    py::class_<MarginalSpec>(m, "MarginalSpec");
    m.def("point_mass", &MarginalSpec::point_mass, py::arg("m"));
    m.def("uniform_marginal", &MarginalSpec::uniform, py::arg("a"));
    m.def("gaussian_marginal", &MarginalSpec::gaussian, py::arg("sigma"));
    m.def("empirical_marginal", &MarginalSpec::empirical, py::arg("values"));

    m.def("psi_eval",
          [](double beta, double x) { return psi_eval(YoungFunctionBeta(beta), x); },
          py::arg("beta"), py::arg("x"));
    m.def("beta_of_q", &beta_of_q, py::arg("q"));
    m.def("quantile_q", &quantile_q, py::arg("marginal"), py::arg("u"));
    m.def("lp_norm", &lp_norm, py::arg("marginal"), py::arg("p"));
    m.def("luxemburg_norm",
          [](const MarginalSpec& z, double beta, double tol) {
              const LuxemburgResult r = luxemburg_norm(z, beta, tol);
              return py::make_tuple(r.value, r.ok() ? "OK" : "DIVERGENT");
          },
          py::arg("marginal"), py::arg("beta"), py::arg("tol") = 1e-10);
    m.def("c_k_coefficient",
          [](const MarginalSpec& z, double alpha, double beta, double tol) {
              const LuxemburgResult r = c_k_coefficient(z, alpha, beta, tol);
              return py::make_tuple(r.value, r.ok() ? "OK" : "DIVERGENT");
          },
          py::arg("marginal"), py::arg("alpha"), py::arg("beta"), py::arg("tol") = 1e-10);
    m.def("d_k_coefficient", &d_k_coefficient, py::arg("marginal"), py::arg("alpha"),
          py::arg("p"));
    m.def("norm_equivalence_diag",
          [](const MarginalSpec& z, double beta) {
              const NormEquivalenceDiag diag = norm_equivalence_diag(z, beta);
              py::dict out;
              out["luxemburg"] = diag.luxemburg.value;
              out["luxemburg_status"] = diag.luxemburg.ok() ? "OK" : "DIVERGENT";
              out["sup_scaled_lp"] = diag.sup_scaled_lp;
              out["p_grid"] = diag.p_grid;
              return out;
          },
          py::arg("marginal"), py::arg("beta"));

    // ---- dependence --------------------------------------------------------
    m.def("lex_compare", [](const Index& i, const Index& j) {
        const auto c = lex_compare(i, j);
        return c == std::strong_ordering::less ? -1 : (c == std::strong_ordering::greater ? 1 : 0);
    });
    m.def("v_set_contains", &v_set_contains, py::arg("i"), py::arg("k"), py::arg("j"));
    py::class_<MixingProfile>(m, "MixingProfile")
        .def_readonly("radius", &MixingProfile::radius)
        .def_readonly("model", &MixingProfile::model)
        .def("alpha_1_inf", &MixingProfile::alpha_1_inf)
        .def("phi_inf_1", &MixingProfile::phi_inf_1)
        .def("exact_at", &MixingProfile::exact_at);
    m.def("mixing_profile", &mixing_profile, py::arg("spec"), py::arg("d"));
    m.def("serfling_bound", &serfling_bound, py::arg("sup_norm"), py::arg("phi"));
    m.def("rio_bound", &rio_bound, py::arg("marginal"), py::arg("alpha"), py::arg("p"));
    m.def("check_condition",
          [](const std::string& id, const GeneratorSpec& spec, int d, double q, double p,
             double tol) {
              return json_to_py(condition_report_json(
                  check_condition(condition_from_string(id), spec, d, ConditionParams{q, p, tol})));
          },
          py::arg("condition"), py::arg("spec"), py::arg("d"), py::arg("q") = 1.0,
          py::arg("p") = 4.0, py::arg("tol") = 1e-10);

    // ---- experiment harness -------------------------------------------------
    m.def("fit_slope", [](const std::vector<std::pair<double, double>>& pts) {
        const SlopeFit f = fit_slope(pts);
        return py::make_tuple(f.slope, f.intercept, f.stderr_slope);
    });
    m.def("rate_parameters_admissible", &rate_parameters_admissible, py::arg("d"), py::arg("p"),
          py::arg("a"), py::arg("b"), py::arg("theta1"), py::arg("theta2"));
    m.def("run_bias_study", [](const std::string& config_json) {
        const ExperimentConfig config = parse_config(config_json);
        CsvWriter csv;
        const BiasReport report = run_bias_study(config, &csv);
        return py::make_tuple(json_to_py(bias_report_json(report)), csv.str());
    });
    m.def("run_variance_study", [](const std::string& config_json) {
        const ExperimentConfig config = parse_config(config_json);
        CsvWriter csv;
        const VarianceReport report = run_variance_study(config, &csv);
        return py::make_tuple(json_to_py(variance_report_json(report)), csv.str());
    });
    m.def("run_rate_study", [](const std::string& config_json) {
        const ExperimentConfig config = parse_config(config_json);
        CsvWriter csv;
        const RateReport report = run_rate_study(config, &csv);
        return py::make_tuple(json_to_py(rate_report_json(report)), csv.str());
    });
    m.def("cli_main", &cli_main, py::arg("args"));

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
    py::register_exception<numerical_error>(m, "NumericalError", PyExc_ArithmeticError);
}
