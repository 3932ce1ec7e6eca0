#include <fstream>
#include <set>
#include <sstream>

#include "lattice_smooth/experiment.hpp"

#include <nlohmann/json.hpp>

namespace latsm {

namespace {

using nlohmann::json;

void require_keys(const json& object, const std::set<std::string>& allowed,
                  const std::string& context) {
    for (const auto& [key, value] : object.items())
        if (!allowed.count(key))
            throw validation_error("config: unknown key '" + key + "' in " + context);
}

InnovationLaw parse_innovation(const json& spec) {
    require_keys(spec, {"law", "sigma", "a"}, "generator.innovation");
    InnovationLaw law;
    const std::string name = spec.at("law").get<std::string>();
    if (name == "gaussian") {
        law.kind = InnovationLawKind::Gaussian;
        law.param = spec.value("sigma", 1.0);
    } else if (name == "uniform") {
        law.kind = InnovationLawKind::Uniform;
        law.param = spec.value("a", 1.0);
    } else if (name == "rademacher") {
        law.kind = InnovationLawKind::Rademacher;
        law.param = 0.0;
    } else {
        throw validation_error("config: unknown innovation law '" + name + "'");
    }
    return law;
}

GeneratorSpec parse_generator(const json& spec, int d) {
    require_keys(spec, {"variant", "innovation", "coefficients", "link"}, "generator");
    GeneratorSpec gen;
    const std::string variant = spec.at("variant").get<std::string>();
    gen.innovation = parse_innovation(spec.at("innovation"));
    if (variant == "IID") {
        gen.kind = GeneratorKind::IID;
    } else if (variant == "LINEAR") {
        gen.kind = GeneratorKind::Linear;
        if (!spec.contains("coefficients"))
            throw validation_error("config: LINEAR generator needs coefficients");
        for (const auto& entry : spec.at("coefficients")) {
            require_keys(entry, {"offset", "value"}, "generator.coefficients[]");
            LinearCoefficient c;
            c.offset = entry.at("offset").get<Index>();
            c.value = entry.at("value").get<double>();
            gen.coefficients.push_back(std::move(c));
        }
    } else if (variant == "MD_NEIGHBOR") {
        gen.kind = GeneratorKind::MdNeighbor;
        const std::string link = spec.value("link", "sign");
        if (link == "sign")
            gen.link = LinkFn::Sign;
        else if (link == "tanh")
            gen.link = LinkFn::Tanh;
        else
            throw validation_error("config: unknown link '" + link + "'");
    } else {
        throw validation_error("config: unknown generator variant '" + variant + "'");
    }
    gen.validate(d);
    return gen;
}

MarginalSpec parse_marginal(const json& spec) {
    require_keys(spec, {"law", "m", "a", "sigma", "values"}, "marginal");
    const std::string law = spec.at("law").get<std::string>();
    if (law == "point_mass") return MarginalSpec::point_mass(spec.at("m").get<double>());
    if (law == "uniform") return MarginalSpec::uniform(spec.at("a").get<double>());
    if (law == "gaussian") return MarginalSpec::gaussian(spec.at("sigma").get<double>());
    if (law == "empirical")
        return MarginalSpec::empirical(spec.at("values").get<std::vector<double>>());
    throw validation_error("config: unknown marginal law '" + law + "'");
}

OrliczRequest parse_orlicz_request(const json& spec) {
    require_keys(spec,
                 {"op", "marginal", "beta", "q", "p", "alpha", "x", "u", "m_inf", "phi", "tol"},
                 "orlicz[]");
    OrliczRequest req;
    req.op = spec.at("op").get<std::string>();
    if (spec.contains("marginal")) req.marginal = parse_marginal(spec.at("marginal"));
    req.beta = spec.value("beta", 2.0);
    req.q = spec.value("q", 1.0);
    req.p = spec.value("p", 4.0);
    req.alpha = spec.value("alpha", 1.0);
    req.x = spec.value("x", 0.0);
    req.u = spec.value("u", 0.0);
    req.m_inf = spec.value("m_inf", 0.0);
    req.phi = spec.value("phi", 0.0);
    req.tol = spec.value("tol", 1e-10);
    return req;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        throw validation_error(std::string("config: invalid JSON: ") + err.what());
    }
    require_keys(doc,
                 {"d", "n", "generator", "kernel", "bandwidth", "regression", "grid",
                  "replications", "seed", "slope_tolerance", "variance_slope_tolerance",
                  "variance_point", "rates_target", "output", "conditions", "orlicz",
                  "rate_params_check"},
                 "top level");

    ExperimentConfig config;
    config.d = doc.value("d", 1);
    if (doc.contains("n")) config.n_values = doc.at("n").get<std::vector<std::int64_t>>();

    if (doc.contains("generator")) config.generator = parse_generator(doc.at("generator"), config.d);

    if (doc.contains("kernel")) {
        const json& kernel = doc.at("kernel");
        require_keys(kernel, {"variant", "a", "b"}, "kernel");
        const std::string variant = kernel.at("variant").get<std::string>();
        if (variant == "UNIFORM") {
            config.kernel_kind = KernelKind::Uniform;
        } else if (variant == "PEDESTAL") {
            config.kernel_kind = KernelKind::Pedestal;
            config.kernel_a = kernel.value("a", 1.0);
            config.kernel_b = kernel.value("b", 1.0);
        } else {
            throw validation_error("config: unknown kernel variant '" + variant + "'");
        }
    }

    if (doc.contains("bandwidth")) {
        const json& bw = doc.at("bandwidth");
        require_keys(bw, {"form", "theta1", "theta2"}, "bandwidth");
        const std::string form = bw.at("form").get<std::string>();
        if (form == "OPTIMAL_AS") {
            config.schedule.form = BandwidthForm::OptimalAs;
        } else if (form == "OPTIMAL_LP") {
            config.schedule.form = BandwidthForm::OptimalLp;
        } else if (form == "POWERLOG") {
            config.schedule.form = BandwidthForm::PowerLog;
            config.schedule.theta1 = bw.value("theta1", 0.0);
            config.schedule.theta2 = bw.value("theta2", 0.0);
        } else {
            throw validation_error("config: unknown bandwidth form '" + form + "'");
        }
    }

    if (doc.contains("regression")) {
        const json& reg = doc.at("regression");
        require_keys(reg, {"name", "lipschitz"}, "regression");
        config.regression_name = reg.value("name", "affine");
        config.lipschitz = reg.value("lipschitz", 1.0);
    }

    if (doc.contains("grid")) {
        const json& grid = doc.at("grid");
        require_keys(grid,
                     {"policy", "points_per_axis", "kappa", "covering", "max_points_per_axis",
                      "max_total_cubes"},
                     "grid");
        const std::string policy = grid.value("policy", "BY_BANDWIDTH");
        if (policy == "FIXED")
            config.grid.kind = GridPolicy::Kind::Fixed;
        else if (policy == "BY_BANDWIDTH")
            config.grid.kind = GridPolicy::Kind::ByBandwidth;
        else
            throw validation_error("config: unknown grid policy '" + policy + "'");
        config.grid.points_per_axis = grid.value("points_per_axis", std::int64_t{401});
        config.grid.kappa = grid.value("kappa", 8.0);
        config.grid.covering = grid.value("covering", false);
        config.grid.max_points_per_axis =
            grid.value("max_points_per_axis", std::int64_t{4096});
        config.grid.max_total_cubes = grid.value("max_total_cubes", std::int64_t{1} << 21);
    }

    if (doc.contains("output")) {
        const json& output = doc.at("output");
        require_keys(output, {"base"}, "output");
        config.output_base = output.value("base", "");
    }

    config.replications = doc.value("replications", 100);
    config.seed = doc.value("seed", std::uint64_t{1});
    config.slope_tolerance = doc.value("slope_tolerance", 0.12);
    config.variance_slope_tolerance = doc.value("variance_slope_tolerance", 0.1);
    if (doc.contains("variance_point"))
        config.variance_point = doc.at("variance_point").get<std::vector<double>>();

    if (doc.contains("rates_target")) {
        const std::string target = doc.at("rates_target").get<std::string>();
        if (target == "deviation")
            config.rates_target = DeviationTarget::Mean;
        else if (target == "total_error")
            config.rates_target = DeviationTarget::Truth;
        else
            throw validation_error("config: unknown rates_target '" + target + "'");
    }

    if (doc.contains("conditions")) {
        const json& cond = doc.at("conditions");
        require_keys(cond, {"ids", "q", "p", "tol"}, "conditions");
        config.condition_ids = cond.at("ids").get<std::vector<std::string>>();
        config.condition_params.q = cond.value("q", 1.0);
        config.condition_params.p = cond.value("p", 4.0);
        config.condition_params.tol = cond.value("tol", 1e-10);
    }

    if (doc.contains("orlicz"))
        for (const auto& entry : doc.at("orlicz"))
            config.orlicz_requests.push_back(parse_orlicz_request(entry));

    if (doc.contains("rate_params_check")) {
        const json& check = doc.at("rate_params_check");
        require_keys(check, {"a", "b", "p"}, "rate_params_check");
        const double a = check.at("a").get<double>();
        const double b = check.at("b").get<double>();
        const double p = check.at("p").get<double>();
        double theta1 = config.schedule.theta1, theta2 = config.schedule.theta2;
        if (config.schedule.form == BandwidthForm::OptimalAs) {
            theta1 = 1.0 / (2.0 + config.d);
            theta2 = static_cast<double>(config.d) / (2.0 + config.d);
        } else if (config.schedule.form == BandwidthForm::OptimalLp) {
            theta1 = 0.0;
            theta2 = static_cast<double>(config.d) / (2.0 + config.d);
        }
        if (!rate_parameters_admissible(config.d, p, a, b, theta1, theta2)) {
            std::ostringstream msg;
            msg << "config: rate parameters (a=" << a << ", b=" << b << ", p=" << p
                << ") violate the admissibility inequalities for theta1=" << theta1
                << ", theta2=" << theta2;
            throw validation_error(msg.str());
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw validation_error("config: cannot open file " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config(buffer.str());
}

} // namespace latsm
