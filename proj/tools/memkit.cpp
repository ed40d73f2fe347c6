// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: amplitude traces, memory-witness demos, the
// non-Markovianity measure, parameter scans and Choi matrix exports as
// CSV/JSON artifacts.

#include "memkit/nonmarkov.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace memkit;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ModelConfig {
    std::string model = "lorentzian";
    double ratio_r = 0.0;
    double gamma0 = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double omega_c = 1.0;
    double omega0 = 0.0;
    std::string table_path;

    double horizon = 0.0;
    double step = 0.0;
    int grid = 96;
    bool refine = true;
    std::string format = "csv";
    std::string out;
    bool keep_going = false;
    std::string config_path;
};

void add_model_options(CLI::App* cmd, ModelConfig& cfg) {
    cmd->add_option("--model", cfg.model, "Spectral model")
        ->check(CLI::IsMember({"lorentzian", "trunc-lorentzian", "ohmic",
                               "table"}))
        ->capture_default_str();
    cmd->add_option("--R", cfg.ratio_r, "Ratio R = gamma0/lambda");
    cmd->add_option("--gamma0", cfg.gamma0, "Lorentzian rate gamma0");
    cmd->add_option("--lambda", cfg.lambda, "Lorentzian width lambda");
    cmd->add_option("--alpha", cfg.alpha, "Ohmic coupling");
    cmd->add_option("--omega-c", cfg.omega_c, "Ohmic cutoff frequency")
        ->capture_default_str();
    cmd->add_option("--omega0", cfg.omega0, "System transition frequency");
    cmd->add_option("--table", cfg.table_path,
                    "Two-column CSV spectrum (for --model table)");
    cmd->add_option("--horizon", cfg.horizon, "Optimization horizon override");
    cmd->add_option("--step", cfg.step, "Trace/solver step override");
    cmd->add_option("--grid", cfg.grid, "Coarse grid points per tau axis")
        ->capture_default_str();
    cmd->add_flag("--refine,!--no-refine", cfg.refine,
                  "Nelder-Mead polish after the grid scan");
    cmd->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", cfg.out, "Output path (stdout when omitted)");
    cmd->add_flag("--keep-going", cfg.keep_going,
                  "Keep scanning past per-point failures");
    cmd->add_option("--config", cfg.config_path,
                    "Config file (plain key=value lines)");
}

// Plain key=value config; explicit command-line flags win over file
// values, file values win over defaults.
void apply_config_file(const CLI::App* cmd, ModelConfig& cfg) {
    if (cfg.config_path.empty()) {
        return;
    }
    std::ifstream in(cfg.config_path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + cfg.config_path);
    }
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: missing '=' on line " +
                                     std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto flag_given = [&](const std::string& name) {
            return cmd->count("--" + name) > 0;
        };
        if (flag_given(key)) {
            continue; // explicit flag wins
        }
        try {
            if (key == "model") {
                cfg.model = value;
            } else if (key == "R") {
                cfg.ratio_r = std::stod(value);
            } else if (key == "gamma0") {
                cfg.gamma0 = std::stod(value);
            } else if (key == "lambda") {
                cfg.lambda = std::stod(value);
            } else if (key == "alpha") {
                cfg.alpha = std::stod(value);
            } else if (key == "omega-c") {
                cfg.omega_c = std::stod(value);
            } else if (key == "omega0") {
                cfg.omega0 = std::stod(value);
            } else if (key == "table") {
                cfg.table_path = value;
            } else if (key == "horizon") {
                cfg.horizon = std::stod(value);
            } else if (key == "step") {
                cfg.step = std::stod(value);
            } else if (key == "grid") {
                cfg.grid = std::stoi(value);
            } else if (key == "refine") {
                cfg.refine = value == "1" || value == "true";
            } else if (key == "format") {
                cfg.format = value;
            } else if (key == "out") {
                cfg.out = value;
            } else if (key == "keep-going") {
                cfg.keep_going = value == "1" || value == "true";
            } else {
                throw std::runtime_error("config: unknown key '" + key +
                                         "' on line " + std::to_string(lineno));
            }
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config: bad value for '" + key +
                                     "' on line " + std::to_string(lineno));
        }
    }
    if (cfg.model != "lorentzian" && cfg.model != "trunc-lorentzian" &&
        cfg.model != "ohmic" && cfg.model != "table") {
        throw std::runtime_error("config: unknown model '" + cfg.model + "'");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        throw std::runtime_error("config: unknown format '" + cfg.format +
                                 "'");
    }
}

// Resolve the Lorentzian pair (gamma0, lambda) from whichever of R,
// gamma0, lambda were given; defaults to gamma0 = 1 so times are in
// units of 1/gamma0.
void resolve_lorentzian(ModelConfig& cfg) {
    const bool has_r = cfg.ratio_r > 0.0;
    const bool has_g = cfg.gamma0 > 0.0;
    const bool has_l = cfg.lambda > 0.0;
    if (has_g && has_l) {
        return;
    }
    if (has_r && has_l) {
        cfg.gamma0 = cfg.ratio_r * cfg.lambda;
        return;
    }
    if (has_r && has_g) {
        cfg.lambda = cfg.gamma0 / cfg.ratio_r;
        return;
    }
    if (has_r) {
        cfg.gamma0 = 1.0;
        cfg.lambda = cfg.gamma0 / cfg.ratio_r;
        return;
    }
    throw CLI::ValidationError(
        "model", "need --R (optionally with --gamma0/--lambda), or both "
                 "--gamma0 and --lambda");
}

SpectralDensity build_spectrum(ModelConfig& cfg) {
    if (cfg.model == "lorentzian" || cfg.model == "trunc-lorentzian") {
        resolve_lorentzian(cfg);
        if (cfg.omega0 <= 0.0) {
            cfg.omega0 = 1.0;
        }
        return cfg.model == "lorentzian"
                   ? SpectralDensity::lorentzian(cfg.gamma0, cfg.lambda,
                                                 cfg.omega0)
                   : SpectralDensity::truncated_lorentzian(cfg.gamma0,
                                                           cfg.lambda,
                                                           cfg.omega0);
    }
    if (cfg.model == "ohmic") {
        if (cfg.alpha <= 0.0) {
            throw CLI::ValidationError("model", "--alpha is required");
        }
        if (cfg.omega0 <= 0.0) {
            cfg.omega0 = cfg.omega_c;
        }
        return SpectralDensity::ohmic(cfg.alpha, cfg.omega_c, cfg.omega0);
    }
    if (cfg.table_path.empty()) {
        throw CLI::ValidationError("model", "--table is required");
    }
    if (cfg.omega0 <= 0.0) {
        cfg.omega0 = 1.0;
    }
    return load_tabulated_csv_file(cfg.table_path, cfg.omega0);
}

double scan_like_parameter(const ModelConfig& cfg) {
    if (cfg.model == "ohmic") {
        return cfg.alpha;
    }
    return cfg.gamma0 / cfg.lambda;
}

std::string model_comment(const ModelConfig& cfg) {
    std::ostringstream s;
    s << "model=" << cfg.model;
    if (cfg.model == "ohmic") {
        s << " alpha=" << g17(cfg.alpha) << " omega_c=" << g17(cfg.omega_c)
          << " omega0=" << g17(cfg.omega0);
    } else if (cfg.model == "table") {
        s << " table=" << cfg.table_path << " omega0=" << g17(cfg.omega0);
    } else {
        s << " gamma0=" << g17(cfg.gamma0) << " lambda=" << g17(cfg.lambda)
          << " omega0=" << g17(cfg.omega0);
    }
    return s.str();
}

void write_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(out_path);
    fs::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot open output file " + tmp.string());
        }
        file << content;
        file.flush();
        if (!file) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target); // single atomic publish
}

AmplitudeModel build_model(ModelConfig& cfg, const SpectralDensity& sd) {
    ModelOptions options;
    options.horizon_override = cfg.horizon;
    options.step_override = cfg.step;
    return make_amplitude_model(sd, options);
}

const char* method_tag(AmplitudeMethod method) {
    switch (method) {
    case AmplitudeMethod::ClosedForm:
        return "closed-form";
    case AmplitudeMethod::SpectralIntegral:
        return "spectral-integral";
    case AmplitudeMethod::Volterra:
        return "volterra";
    }
    return "unknown";
}

int run_amplitude(ModelConfig& cfg) {
    const SpectralDensity sd = build_spectrum(cfg);
    const AmplitudeModel model = build_model(cfg, sd);
    const AmplitudeMethod method =
        model.trace ? model.trace->method : AmplitudeMethod::ClosedForm;
    const double step =
        cfg.step > 0.0 ? cfg.step : model.horizon / 2000.0;
    AmplitudeTrace view =
        sample_amplitude(model.cfun, model.horizon, step, method);
    const DecayRates rates = decay_rates(view);

    std::ostringstream out;
    if (cfg.format == "json") {
        nlohmann::json j;
        j["model"] = model_comment(cfg);
        j["method"] = method_tag(method);
        j["step"] = view.step;
        j["horizon"] = model.horizon;
        auto& rows = j["rows"];
        rows = nlohmann::json::array();
        for (std::size_t i = 0; i < view.grid.size(); ++i) {
            rows.push_back({view.grid[i], view.values[i].real(),
                            view.values[i].imag(),
                            rates.valid[i] ? rates.gamma[i]
                                           : std::nan(""),
                            rates.valid[i] ? rates.s_shift[i]
                                           : std::nan("")});
        }
        out << j.dump(2) << "\n";
    } else {
        out << "# memkit amplitude\n";
        out << "# " << model_comment(cfg) << "\n";
        out << "# method=" << method_tag(method) << " step=" << g17(view.step)
            << " horizon=" << g17(model.horizon) << "\n";
        out << "t,re_c,im_c,gamma,s_shift\n";
        for (std::size_t i = 0; i < view.grid.size(); ++i) {
            out << g17(view.grid[i]) << ',' << g17(view.values[i].real())
                << ',' << g17(view.values[i].imag()) << ','
                << (rates.valid[i] ? g17(rates.gamma[i]) : "nan") << ','
                << (rates.valid[i] ? g17(rates.s_shift[i]) : "nan") << '\n';
        }
    }
    write_output(out.str(), cfg.out);
    return 0;
}

int run_demo(ModelConfig& cfg, double t1, double t2) {
    const SpectralDensity sd = build_spectrum(cfg);
    const AmplitudeModel model = build_model(cfg, sd);
    if (!(t1 < t2)) {
        throw CLI::ValidationError("demo", "need --t1 < --t2");
    }
    if (t2 > model.horizon * (1.0 + 1e-12)) {
        throw CLI::ValidationError("demo", "--t2 exceeds the horizon " +
                                               g17(model.horizon));
    }
    const double step = cfg.step > 0.0 ? cfg.step : t2 / 1000.0;
    const DensityMatrix rho0 = DensityMatrix::excited();
    const auto n = static_cast<std::size_t>(std::ceil(t2 / step - 1e-9));

    std::ostringstream rows;
    nlohmann::json jrows = nlohmann::json::array();
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = t2 * static_cast<double>(i) / static_cast<double>(n);
        const DensityMatrix direct =
            apply(QubitChannel(model.cfun(t)), rho0);
        double restarted = direct.rho11.real();
        if (t >= t1) {
            const auto pair = witness_evolutions(model.cfun, t1, t, rho0);
            restarted = pair.second.rho11.real();
        }
        if (cfg.format == "json") {
            jrows.push_back({t, direct.rho11.real(), restarted});
        } else {
            rows << g17(t) << ',' << g17(direct.rho11.real()) << ','
                 << g17(restarted) << '\n';
        }
    }

    std::ostringstream out;
    if (cfg.format == "json") {
        nlohmann::json j;
        j["model"] = model_comment(cfg);
        j["t1"] = t1;
        j["t2"] = t2;
        j["rows"] = jrows;
        out << j.dump(2) << "\n";
    } else {
        out << "# memkit demo\n";
        out << "# " << model_comment(cfg) << "\n";
        out << "# t1=" << g17(t1) << " t2=" << g17(t2) << "\n";
        out << "t,rho_ee,rho_ee_restarted\n" << rows.str();
    }
    write_output(out.str(), cfg.out);
    return 0;
}

nlohmann::json nm_record_json(double parameter, const NmResult& result) {
    nlohmann::json j;
    j["parameter"] = parameter;
    j["n_m"] = result.n_m;
    j["tau10_star"] = result.tau10_star;
    j["tau21_star"] = result.tau21_star;
    j["grid_size"] = result.grid_size;
    j["refined"] = result.refined;
    j["horizon"] = result.horizon;
    j["evaluations"] = result.evaluations;
    j["horizon_warning"] = result.horizon_warning;
    return j;
}

int run_nm(ModelConfig& cfg) {
    const SpectralDensity sd = build_spectrum(cfg);
    const AmplitudeModel model = build_model(cfg, sd);
    NmOptions options;
    options.coarse_n = cfg.grid;
    options.refine = cfg.refine;
    const NmResult result = measure_nm(model.cfun, model.horizon, options);
    if (result.horizon_warning) {
        std::cerr << "warning: horizon " << g17(result.horizon)
                  << " shows no decay; N_M may be underestimated\n";
    }

    std::ostringstream out;
    const double parameter = scan_like_parameter(cfg);
    if (cfg.format == "json") {
        out << nm_record_json(parameter, result).dump(2) << "\n";
    } else {
        out << "# memkit nm\n# " << model_comment(cfg) << "\n";
        out << "parameter,n_m,tau10_star,tau21_star,evaluations\n";
        out << g17(parameter) << ',' << g17(result.n_m) << ','
            << g17(result.tau10_star) << ',' << g17(result.tau21_star) << ','
            << result.evaluations << "\n";
    }
    write_output(out.str(), cfg.out);
    return 0;
}

int run_scan(ModelConfig& cfg, const std::string& param,
             std::vector<double> log_range, int points) {
    if (log_range.size() != 2 || !(log_range[0] > 0.0) ||
        !(log_range[1] > log_range[0]) || points < 2) {
        throw CLI::ValidationError(
            "scan", "need --log-range LO HI (0 < LO < HI) and --points >= 2");
    }
    if (param != "R" && param != "alpha") {
        throw CLI::ValidationError("scan", "--param must be R or alpha");
    }

    std::vector<ScanPoint> family;
    const double lo = std::log10(log_range[0]);
    const double hi = std::log10(log_range[1]);
    for (int i = 0; i < points; ++i) {
        const double value =
            std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) /
                               (points - 1));
        ModelConfig point = cfg;
        if (param == "R") {
            point.ratio_r = value;
            point.gamma0 = cfg.gamma0 > 0.0 ? cfg.gamma0 : 1.0;
            point.lambda = point.gamma0 / value;
            if (point.omega0 <= 0.0) {
                point.omega0 = 1.0;
            }
            family.push_back(
                {value, cfg.model == "trunc-lorentzian"
                            ? SpectralDensity::truncated_lorentzian(
                                  point.gamma0, point.lambda, point.omega0)
                            : SpectralDensity::lorentzian(
                                  point.gamma0, point.lambda, point.omega0)});
        } else {
            point.alpha = value;
            if (point.omega0 <= 0.0) {
                point.omega0 = point.omega_c;
            }
            family.push_back({value, SpectralDensity::ohmic(
                                         value, point.omega_c, point.omega0)});
        }
    }

    ScanOptions options;
    options.nm.coarse_n = cfg.grid;
    options.nm.refine = cfg.refine;
    options.horizon_override = cfg.horizon;
    options.step_override = cfg.step;
    const auto records = nm_scan(family, options);

    std::ostringstream out;
    if (cfg.format == "json") {
        out << scan_to_json(records);
    } else {
        std::ostringstream body;
        write_scan_csv(records, body);
        out << "# memkit scan param=" << param << "\n# " << model_comment(cfg)
            << "\n"
            << body.str();
    }
    write_output(out.str(), cfg.out);

    int failures = 0;
    for (const auto& rec : records) {
        if (rec.failed) {
            ++failures;
            std::cerr << "point " << g17(rec.parameter)
                      << " failed: " << rec.error << "\n";
        }
    }
    if (failures > 0 && !cfg.keep_going) {
        return 1;
    }
    return 0;
}

int run_choi(ModelConfig& cfg, double c_re, double c_im, bool have_c,
             double t, bool have_t) {
    cplx amplitude;
    if (have_c) {
        amplitude = cplx(c_re, c_im);
    } else if (have_t) {
        const SpectralDensity sd = build_spectrum(cfg);
        const AmplitudeModel model = build_model(cfg, sd);
        amplitude = model.cfun(t);
    } else {
        throw CLI::ValidationError("choi", "need --c or --t");
    }
    const ChoiMatrix rho = choi(QubitChannel(amplitude));
    nlohmann::json j = nlohmann::json::parse(choi_to_json(rho));
    j["c"] = {amplitude.real(), amplitude.imag()};
    write_output(j.dump(2) + "\n", cfg.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("MEMKIT_THREADS")) {
        const int n = std::atoi(cap);
        if (n > 0) {
            omp_set_num_threads(std::min(n, omp_get_max_threads()));
        }
    }

    CLI::App app{"memkit: decoherence amplitudes, memoryless qubit channels "
                 "and the divisibility-gap non-Markovianity measure"};
    app.require_subcommand(1);

    ModelConfig amplitude_cfg;
    CLI::App* amplitude_cmd = app.add_subcommand(
        "amplitude", "Write c(t) with time-local decay rates");
    add_model_options(amplitude_cmd, amplitude_cfg);

    ModelConfig demo_cfg;
    double t1 = 0.0;
    double t2 = 0.0;
    CLI::App* demo_cmd = app.add_subcommand(
        "demo", "Compare an evolution against one restarted at t1");
    add_model_options(demo_cmd, demo_cfg);
    demo_cmd->add_option("--t1", t1, "Restart time")->required();
    demo_cmd->add_option("--t2", t2, "Final time")->required();

    ModelConfig nm_cfg;
    CLI::App* nm_cmd =
        app.add_subcommand("nm", "Compute the non-Markovianity measure N_M");
    add_model_options(nm_cmd, nm_cfg);

    ModelConfig scan_cfg;
    std::string scan_param = "R";
    std::vector<double> log_range;
    int scan_points = 17;
    CLI::App* scan_cmd =
        app.add_subcommand("scan", "N_M over a log-spaced parameter range");
    add_model_options(scan_cmd, scan_cfg);
    scan_cmd->add_option("--param", scan_param, "Swept parameter (R or alpha)")
        ->capture_default_str();
    scan_cmd->add_option("--log-range", log_range, "Range LO HI (log spaced)")
        ->expected(2);
    scan_cmd->add_option("--points", scan_points, "Number of scan points")
        ->capture_default_str();

    ModelConfig choi_cfg;
    double c_re = 0.0;
    double c_im = 0.0;
    double choi_t = 0.0;
    CLI::App* choi_cmd = app.add_subcommand(
        "choi", "Choi-Jamiolkowski matrix of the channel as JSON");
    add_model_options(choi_cmd, choi_cfg);
    CLI::Option* c_opt =
        choi_cmd->add_option("--c", c_re, "Real amplitude parameter");
    choi_cmd->add_option("--c-im", c_im, "Imaginary part of the amplitude");
    CLI::Option* t_opt =
        choi_cmd->add_option("--t", choi_t, "Evaluate c(t) from the model");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(amplitude_cmd)) {
            apply_config_file(amplitude_cmd, amplitude_cfg);
            return run_amplitude(amplitude_cfg);
        }
        if (app.got_subcommand(demo_cmd)) {
            apply_config_file(demo_cmd, demo_cfg);
            return run_demo(demo_cfg, t1, t2);
        }
        if (app.got_subcommand(nm_cmd)) {
            apply_config_file(nm_cmd, nm_cfg);
            return run_nm(nm_cfg);
        }
        if (app.got_subcommand(scan_cmd)) {
            apply_config_file(scan_cmd, scan_cfg);
            return run_scan(scan_cfg, scan_param, log_range, scan_points);
        }
        if (app.got_subcommand(choi_cmd)) {
            apply_config_file(choi_cmd, choi_cfg);
            return run_choi(choi_cfg, c_re, c_im, c_opt->count() > 0, choi_t,
                            t_opt->count() > 0);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
