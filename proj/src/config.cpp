#include "kvmix/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kvmix/toml.hpp"

namespace kvmix {

namespace {

using toml::Value;

[[noreturn]] void reject(const std::string& message) {
    throw Error(ErrorCode::ValidationError, message);
}

void check_keys(const Value& table, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : table.table)
        if (!allowed.count(key))
            reject("unknown key '" + key + "' in [" + where + "] (line " + std::to_string(value.line) + ")");
}

Eigen::MatrixXd parse_matrix(const Value& v, int n, const std::string& name) {
    if (!v.is_array() || int(v.array.size()) != n)
        reject(name + " must be an array of " + std::to_string(n) + " rows (line " + std::to_string(v.line) + ")");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        const Value& row = v.array[i];
        if (!row.is_array() || int(row.array.size()) != n)
            reject(name + " row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " entries");
        for (int j = 0; j < n; ++j) m(i, j) = row.array[j].as_double();
    }
    return m;
}

bool parse_parity(const Value& v) {
    const std::string s = v.as_string();
    if (s == "cos") return false;
    if (s == "sin") return true;
    reject("parity must be \"cos\" or \"sin\" (line " + std::to_string(v.line) + ")");
}

// Maps a module-level admissibility failure to the hypothesis it violates.
[[noreturn]] void reject_params(const Error& e) {
    std::string citation;
    const std::string what = e.what();
    const bool mu = what.find("mu") != std::string::npos;
    const bool kappa = what.find("kappa") != std::string::npos;
    switch (e.code()) {
        case ErrorCode::AsymmetricMatrix:
            citation = kappa ? "violates Eq. (1.25)" : (mu ? "violates Eq. (1.24)" : "violates Eq. (1.15)");
            break;
        case ErrorCode::NotPositiveDefinite:
            citation = kappa ? "violates Eq. (1.25)" : "violates Eq. (1.24)";
            break;
        case ErrorCode::NegativeFriction:
        case ErrorCode::NonzeroFrictionDiagonal:
            citation = "violates Eq. (1.14)";
            break;
        default:
            citation = "violates the admissibility hypotheses";
            break;
    }
    reject(std::string(e.what()) + " - " + citation);
}

int stride_of(double interval, double dt, const char* what) {
    if (interval <= 0.0) reject(std::string(what) + " must be positive");
    const double raw = interval / dt;
    const int stride = int(std::llround(raw));
    if (stride < 1 || std::abs(raw - stride) > 1e-9 * std::max(1.0, raw))
        reject(std::string(what) + " must be a positive integer multiple of dt");
    return stride;
}

} // namespace

int RunConfig::output_stride() const { return stride_of(output_interval, dt, "output_interval"); }

int RunConfig::field_stride() const { return stride_of(field_interval, dt, "field_interval"); }

RunConfig load_config_text(const std::string& text) {
    const Value root = toml::parse(text);
    check_keys(root, {"domain", "time", "mixture", "constituents", "forcing", "experiment", "output", "diagnostics"},
               "<root>");

    RunConfig config;

    const Value& domain = root.get("domain");
    check_keys(domain, {"grid_size", "mode_cutoff"}, "domain");
    config.grid_size = int(domain.get("grid_size").as_int());
    config.mode_cutoff = int(domain.get("mode_cutoff").as_int());
    if (config.grid_size < 4 || config.grid_size % 2 != 0)
        reject("grid_size must be even and >= 4");
    if (config.mode_cutoff < 1) reject("mode_cutoff must be >= 1");
    if (3 * (2 * config.mode_cutoff + 1) > 2 * config.grid_size)
        reject("mode_cutoff too large for grid_size - violates the dealiasing rule 2K+1 <= 2N/3");

    const Value& time = root.get("time");
    check_keys(time, {"dt", "t_end", "output_interval"}, "time");
    config.dt = time.get("dt").as_double();
    config.t_end = time.get("t_end").as_double();
    if (config.dt <= 0.0) reject("dt must be positive");
    if (config.t_end < 0.0) reject("t_end must be nonnegative");
    const double raw_steps = config.t_end / config.dt;
    if (std::abs(raw_steps - std::llround(raw_steps)) > 1e-9 * std::max(1.0, raw_steps))
        reject("t_end must be an integer multiple of dt");
    config.output_interval = time.has("output_interval") ? time.get("output_interval").as_double() : config.dt;
    config.output_stride(); // validates divisibility

    const Value& mixture = root.get("mixture");
    check_keys(mixture, {"n", "mu", "kappa", "gamma"}, "mixture");
    const int n = int(mixture.get("n").as_int());
    if (n < 1) reject("n must be >= 1");
    const Eigen::MatrixXd mu = parse_matrix(mixture.get("mu"), n, "mu");
    const Eigen::MatrixXd kappa = parse_matrix(mixture.get("kappa"), n, "kappa");
    const Eigen::MatrixXd gamma = parse_matrix(mixture.get("gamma"), n, "gamma");
    try {
        config.params = validate_params(mu, kappa, gamma);
    } catch (const Error& e) {
        reject_params(e);
    }

    const Value& constituents = root.get("constituents");
    if (!constituents.is_array() || int(constituents.array.size()) != n)
        reject("need exactly n = " + std::to_string(n) + " [[constituents]] blocks");
    for (int i = 0; i < n; ++i) {
        const Value& c = constituents.array[i];
        check_keys(c, {"rho0_preset", "rho0_value", "rho0_base", "rho0_amplitude", "rho0_kx", "rho0_ky", "v0"},
                   "constituents");
        DensityPreset preset;
        const std::string kind = c.get("rho0_preset").as_string();
        if (kind == "constant") {
            preset.base = c.get("rho0_value").as_double();
            preset.amplitude = 0.0;
        } else if (kind == "cosine_bump") {
            preset.base = c.get("rho0_base").as_double();
            preset.amplitude = c.get("rho0_amplitude").as_double();
            preset.kx = int(c.get("rho0_kx").as_int());
            preset.ky = int(c.get("rho0_ky").as_int());
        } else {
            reject("rho0_preset must be \"constant\" or \"cosine_bump\"");
        }
        config.rho0.push_back(preset);

        std::vector<ModeAmplitude> modes;
        if (c.has("v0")) {
            const Value& v0 = c.get("v0");
            if (!v0.is_array()) reject("v0 must be an array of [kx, ky, parity, amplitude] entries");
            for (const Value& entry : v0.array) {
                if (!entry.is_array() || entry.array.size() != 4)
                    reject("v0 entries must be [kx, ky, parity, amplitude] (line " + std::to_string(entry.line) + ")");
                ModeAmplitude mode;
                mode.kx = int(entry.array[0].as_int());
                mode.ky = int(entry.array[1].as_int());
                mode.sin_parity = parse_parity(entry.array[2]);
                mode.amplitude = entry.array[3].as_double();
                modes.push_back(mode);
            }
        }
        config.v0.push_back(std::move(modes));
    }

    if (root.has("forcing")) {
        const Value& forcing = root.get("forcing");
        check_keys(forcing, {"preset", "terms"}, "forcing");
        const std::string preset = forcing.get("preset").as_string();
        if (preset == "modes") {
            if (!forcing.has("terms")) reject("forcing preset \"modes\" needs [[forcing.terms]]");
            for (const Value& tv : forcing.get("terms").array) {
                check_keys(tv, {"constituent", "kx", "ky", "parity", "amplitude", "omega", "phase"}, "forcing.terms");
                ForcingTerm term;
                term.constituent = int(tv.get("constituent").as_int()) - 1;
                term.kx = int(tv.get("kx").as_int());
                term.ky = int(tv.get("ky").as_int());
                term.sin_parity = parse_parity(tv.get("parity"));
                term.amplitude = tv.get("amplitude").as_double();
                term.omega = tv.has("omega") ? tv.get("omega").as_double() : 0.0;
                term.phase = tv.has("phase") ? tv.get("phase").as_double() : 0.0;
                if (term.constituent < 0 || term.constituent >= n)
                    reject("forcing term constituent must be in 1.." + std::to_string(n));
                if (term.kx == 0 && term.ky == 0) reject("forcing term needs a nonzero wavevector");
                config.forcing_terms.push_back(term);
            }
        } else if (preset != "none") {
            reject("forcing preset must be \"none\" or \"modes\"");
        }
    }

    if (root.has("experiment")) {
        const Value& exp = root.get("experiment");
        check_keys(exp,
                   {"kind", "epsilon", "perturbed_constituent", "perturbed_kx", "perturbed_ky", "perturbed_parity",
                    "cutoffs"},
                   "experiment");
        const std::string kind = exp.get("kind").as_string();
        if (kind == "none") {
            config.experiment = ExperimentKind::None;
        } else if (kind == "stability") {
            config.experiment = ExperimentKind::Stability;
            config.stability_epsilon = exp.get("epsilon").as_double();
            if (config.stability_epsilon < 0.0) reject("epsilon must be >= 0");
            config.perturbation.constituent =
                exp.has("perturbed_constituent") ? int(exp.get("perturbed_constituent").as_int()) - 1 : 0;
            config.perturbation.kx = int(exp.get("perturbed_kx").as_int());
            config.perturbation.ky = int(exp.get("perturbed_ky").as_int());
            config.perturbation.sin_parity = exp.has("perturbed_parity") ? parse_parity(exp.get("perturbed_parity")) : false;
            if (config.perturbation.constituent < 0 || config.perturbation.constituent >= n)
                reject("perturbed_constituent must be in 1.." + std::to_string(n));
        } else if (kind == "convergence") {
            config.experiment = ExperimentKind::Convergence;
            const Value& cutoffs = exp.get("cutoffs");
            if (!cutoffs.is_array()) reject("cutoffs must be an array of integers");
            for (const Value& c : cutoffs.array) config.convergence_cutoffs.push_back(int(c.as_int()));
            if (config.convergence_cutoffs.size() < 3) reject("convergence study needs at least 3 cutoff levels");
            for (std::size_t i = 1; i < config.convergence_cutoffs.size(); ++i)
                if (config.convergence_cutoffs[i] <= config.convergence_cutoffs[i - 1])
                    reject("cutoff levels must be strictly increasing");
        } else if (kind == "decoupling") {
            config.experiment = ExperimentKind::Decoupling;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j && (mu(i, j) != 0.0 || kappa(i, j) != 0.0 || gamma(i, j) != 0.0))
                        reject("decoupling experiment needs diagonal mu and kappa and zero gamma");
        } else if (kind == "linear_oracle") {
            config.experiment = ExperimentKind::LinearOracle;
        } else {
            reject("experiment kind must be one of none|stability|convergence|decoupling|linear_oracle");
        }
    }

    if (root.has("output")) {
        const Value& output = root.get("output");
        check_keys(output, {"directory", "emit_fields", "field_interval"}, "output");
        if (output.has("directory")) config.output_directory = output.get("directory").as_string();
        if (output.has("emit_fields")) config.emit_fields = output.get("emit_fields").as_bool();
        config.field_interval =
            output.has("field_interval") ? output.get("field_interval").as_double() : config.output_interval;
    } else {
        config.field_interval = config.output_interval;
    }
    if (config.emit_fields) {
        const int fs = config.field_stride();
        if (fs % config.output_stride() != 0)
            reject("field_interval must be a positive integer multiple of output_interval");
    }

    if (root.has("diagnostics")) {
        const Value& diag = root.get("diagnostics");
        check_keys(diag, {"r_exponent"}, "diagnostics");
        if (diag.has("r_exponent")) config.r_exponent = diag.get("r_exponent").as_double();
        if (config.r_exponent < 1.0) reject("r_exponent must be >= 1");
    }

    // cross-field realizability: basis, initial density positivity, modes
    SpectralBasis basis;
    try {
        basis = build_basis(config.grid_size, config.mode_cutoff);
    } catch (const Error& e) {
        reject(std::string(e.what()) + " - violates the dealiasing rule 2K+1 <= 2N/3");
    }
    std::vector<DensityField> rho0;
    std::vector<std::vector<double>> v0;
    for (int i = 0; i < n; ++i) {
        rho0.push_back(evaluate_density_preset(config.rho0[i], config.grid_size));
        try {
            v0.push_back(coefficients_from_modes(config.v0[i], basis));
        } catch (const Error& e) {
            reject(std::string(e.what()) + " - initial modes must lie within the cutoff");
        }
    }
    try {
        validate_initial_data(std::move(rho0), std::move(v0), basis);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonpositiveDensity)
            reject(std::string(e.what()) + " - violates Eq. (2.02)");
        reject(e.what());
    }
    if (config.experiment == ExperimentKind::Stability) {
        if (basis.find_mode(config.perturbation.kx, config.perturbation.ky, config.perturbation.sin_parity) < 0)
            reject("perturbed mode is not within the basis cutoff");
    }

    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_config_text(buffer.str());
}

ExperimentSetup to_setup(const RunConfig& config) {
    ExperimentSetup setup;
    setup.grid_size = config.grid_size;
    setup.mode_cutoff = config.mode_cutoff;
    setup.params = config.params;
    setup.forcing_terms = config.forcing_terms;
    setup.rho0 = config.rho0;
    setup.v0 = config.v0;
    setup.dt = config.dt;
    setup.t_end = config.t_end;
    setup.output_stride = config.output_stride();
    setup.r_exponent = config.r_exponent;
    return setup;
}

} // namespace kvmix
