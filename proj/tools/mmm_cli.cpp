#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmm/asymptotics.hpp"
#include "mmm/implied_vol.hpp"
#include "mmm/oracle.hpp"
#include "mmm/selfcheck.hpp"
#include "mmm/surface.hpp"

namespace {

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    char extra;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.n, &extra) != 3 || g.n < 1 ||
        g.hi < g.lo)
        mmm::raise(mmm::ErrorCode::config, "bad grid spec '" + text + "' (want a:b:n)");
    return g;
}

std::vector<double> expand_grid(const GridSpec& g, bool log_spaced) {
    std::vector<double> out;
    if (g.n == 1) {
        out.push_back(g.lo);
        return out;
    }
    for (int i = 0; i < g.n; ++i) {
        if (log_spaced)
            out.push_back(g.lo * std::pow(g.hi / g.lo, static_cast<double>(i) / (g.n - 1)));
        else
            out.push_back(g.lo + (g.hi - g.lo) * i / (g.n - 1));
    }
    return out;
}

mmm::ModelParams load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        mmm::raise(mmm::ErrorCode::config, "cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        mmm::raise(mmm::ErrorCode::config, std::string("config parse: ") + e.what());
    }
    if (!j.is_object())
        mmm::raise(mmm::ErrorCode::config, "config must be a JSON object");
    mmm::ModelParams p;
    bool have_s = false, have_r = false, have_alpha = false, have_eta = false;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
            mmm::raise(mmm::ErrorCode::config, "config key '" + key + "' must be a number");
        if (key == "S") { p.S = value.get<double>(); have_s = true; }
        else if (key == "r") { p.r = value.get<double>(); have_r = true; }
        else if (key == "alpha") { p.alpha = value.get<double>(); have_alpha = true; }
        else if (key == "eta") { p.eta = value.get<double>(); have_eta = true; }
        else
            mmm::raise(mmm::ErrorCode::config, "unknown config key '" + key + "'");
    }
    if (!(have_s && have_r && have_alpha && have_eta))
        mmm::raise(mmm::ErrorCode::config, "config requires keys S, r, alpha, eta");
    return p;
}

std::string num(double v, const char* spec = "%.12g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

void dump_config(const mmm::ModelParams& p) {
    std::printf("{ \"S\": %.17g, \"r\": %.17g, \"alpha\": %.17g, \"eta\": %.17g }\n", p.S, p.r,
                p.alpha, p.eta);
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"Minimal Market Model option pricing, implied volatility and asymptotics"};
    app.require_subcommand(0, 1);

    // SP500 calibration of 27/01/2009 (see data/sp500_2009-01-27.json)
    mmm::ModelParams params{1362.18, 0.0011154, 43.307, 0.089896};
    std::string config_path;
    std::optional<double> opt_spot, opt_rate, opt_alpha, opt_eta;
    int threads = 1;
    bool want_dump = false;

    app.add_option("--config", config_path, "JSON config with keys S, r, alpha, eta");
    app.add_option("--spot", opt_spot, "override index level S");
    app.add_option("--rate", opt_rate, "override risk-free rate r");
    app.add_option("--alpha", opt_alpha, "override scale alpha");
    app.add_option("--eta", opt_eta, "override net growth rate eta");
    app.add_option("--threads", threads, "worker thread bound")->check(CLI::PositiveNumber);
    app.add_flag("--dump-config", want_dump, "print the active config as JSON and exit");

    double strike = 0.0, expiry = 0.0;
    std::string kind = "call", format = "csv", out_path = "-";
    std::string strikes_spec, expiries_spec;
    bool log_expiries = false;
    std::int64_t paths = 1'000'000;
    std::uint64_t seed = 1;

    CLI::App* cmd_price = app.add_subcommand("price", "MMM call/put/zcb price");
    cmd_price->add_option("--strike", strike, "strike")->required();
    cmd_price->add_option("--expiry", expiry, "expiry in years")->required();
    cmd_price->add_option("--kind", kind, "call|put|zcb")
        ->check(CLI::IsMember({"call", "put", "zcb"}));

    CLI::App* cmd_iv = app.add_subcommand("iv", "implied volatility of the MMM price");
    cmd_iv->add_option("--strike", strike, "strike")->required();
    cmd_iv->add_option("--expiry", expiry, "expiry in years")->required();

    CLI::App* cmd_limits = app.add_subcommand("limits", "closed-form small/large time limits");
    cmd_limits->add_option("--strike", strike, "strike")->required();

    CLI::App* cmd_rr = app.add_subcommand("rr", "finite-T Roper-Rutkowski estimate");
    cmd_rr->add_option("--strike", strike, "strike")->required();
    cmd_rr->add_option("--expiry", expiry, "expiry in years")->required();

    CLI::App* cmd_surface = app.add_subcommand("surface", "implied-vol surface export");
    cmd_surface->add_option("--strikes", strikes_spec, "strike grid a:b:n")->required();
    cmd_surface->add_option("--expiries", expiries_spec, "expiry grid a:b:n")->required();
    cmd_surface->add_option("--out", out_path, "output path ('-' for stdout)");
    cmd_surface->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd_surface->add_flag("--log-expiries", log_expiries, "log-space the expiry grid");

    CLI::App* cmd_converge = app.add_subcommand("converge", "small/large time convergence table");
    cmd_converge->add_option("--strike", strike, "strike")->required();

    CLI::App* cmd_mc = app.add_subcommand("mc-check", "analytic vs Monte Carlo price");
    cmd_mc->add_option("--strike", strike, "strike")->required();
    cmd_mc->add_option("--expiry", expiry, "expiry in years")->required();
    cmd_mc->add_option("--paths", paths, "number of paths");
    cmd_mc->add_option("--seed", seed, "rng seed");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << "ERROR usage: " << e.what() << std::endl;
        return 2;
    }

    try {
        if (!config_path.empty())
            params = load_config(config_path);
        if (opt_spot) params.S = *opt_spot;
        if (opt_rate) params.r = *opt_rate;
        if (opt_alpha) params.alpha = *opt_alpha;
        if (opt_eta) params.eta = *opt_eta;
        params.validate();

        if (want_dump) {
            dump_config(params);
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cout << app.help() << std::endl;
            return 2;
        }

        if (cmd_price->parsed()) {
            double value;
            if (kind == "call")
                value = mmm::call_price(params, strike, expiry);
            else if (kind == "put")
                value = mmm::put_price(params, strike, expiry);
            else
                value = mmm::zcb_price(params, expiry);
            std::cout << kind << " " << num(value) << "\n";
        } else if (cmd_iv->parsed()) {
            const mmm::IvResult r = mmm::implied_vol_mmm(params, strike, expiry);
            std::cout << "vol " << num(r.vol) << "\n"
                      << "iterations " << r.iterations << "\n"
                      << "residual " << num(r.residual, "%.6g") << "\n"
                      << "bracket [" << num(r.bracket_lo) << ", " << num(r.bracket_hi) << "]\n";
        } else if (cmd_limits->parsed()) {
            std::cout << "small_time_limit " << num(mmm::small_time_limit(params, strike), "%.5g")
                      << "\n"
                      << "large_time_limit " << num(mmm::large_time_limit(params), "%.5g")
                      << "\n";
        } else if (cmd_rr->parsed()) {
            std::cout << "rr_estimate " << num(mmm::rr_estimate_mmm(params, strike, expiry))
                      << "\n";
        } else if (cmd_surface->parsed()) {
            const mmm::SurfaceGrid grid =
                mmm::generate(params, expand_grid(parse_grid(strikes_spec), false),
                              expand_grid(parse_grid(expiries_spec), log_expiries), threads);
            const mmm::ExportFormat f =
                format == "csv" ? mmm::ExportFormat::csv : mmm::ExportFormat::json;
            if (out_path == "-")
                mmm::export_grid(grid, f, std::cout);
            else
                mmm::export_grid(grid, f, out_path);
        } else if (cmd_converge->parsed()) {
            const mmm::LimitReport rep = mmm::convergence_report(
                params, strike, {1e-2, 1e-3, 1e-4}, {50.0, 100.0, 200.0, 400.0});
            std::cout << "strike " << num(rep.strike) << "\n"
                      << "small_time_limit " << num(rep.limit_small) << "\n"
                      << "large_time_limit " << num(rep.limit_large) << "\n"
                      << "expiry,numeric_iv,rr_estimate,status\n";
            const auto print_rows = [&](const std::vector<mmm::ConvergenceRow>& rows) {
                for (const auto& row : rows) {
                    std::cout << num(row.expiry) << ','
                              << (row.numeric_iv ? num(*row.numeric_iv) : "-") << ','
                              << (row.rr_estimate ? num(*row.rr_estimate) : "-") << ','
                              << row.status << "\n";
                }
            };
            print_rows(rep.small_rows);
            print_rows(rep.large_rows);
            std::cout << "small_error_monotone " << (rep.small_error_monotone ? "yes" : "no")
                      << "\n"
                      << "large_error_monotone " << (rep.large_error_monotone ? "yes" : "no")
                      << "\n";
        } else if (cmd_mc->parsed()) {
            const double analytic = mmm::call_price(params, strike, expiry);
            const mmm::McEstimate mc =
                mmm::mc_call_price(params, strike, expiry, paths, seed, threads);
            const double z = (mc.mean - analytic) / mc.stderr_;
            std::cout << "analytic " << num(analytic) << "\n"
                      << "mc_mean " << num(mc.mean) << "\n"
                      << "mc_stderr " << num(mc.stderr_) << "\n"
                      << "z_score " << num(z, "%.4f") << "\n";
        } else if (cmd_verify->parsed()) {
            const mmm::SelfCheckReport rep = mmm::run_selfcheck(params, threads);
            mmm::print_report(rep, std::cout);
            return rep.all_passed() ? 0 : 1;
        }
        return 0;
    } catch (const mmm::Error& e) {
        std::cout << "ERROR " << mmm::to_string(e.code()) << ": " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cout << "ERROR internal: " << e.what() << std::endl;
        return 1;
    }
}

int main(int argc, char** argv) { return run(argc, argv); }
