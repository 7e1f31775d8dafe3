#include "cuspflow/cli.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

cuspflow::RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cuspflow::config_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return cuspflow::parse_config(ss.str());
}

std::string resolve_out(const cuspflow::RunConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (cfg.outputs.directory) return *cfg.outputs.directory;
    return "out";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cuspflow: Lagrangian solver and bound verifier for nonlocal "
                 "transport blowup"};
    app.require_subcommand(1);

    std::string config_path, out_flag, axis, values_csv;
    int jobs = 1;
    bool seedless = true;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "path to the run config (JSON)")->required();
        sub->add_option("--out", out_flag, "output directory (overrides outputs.directory)");
        sub->add_flag("--seedless", seedless,
                      "deterministic execution (default; no randomness is used)");
    };

    auto* c_run = app.add_subcommand("run", "integrate to the stopping threshold and report");
    add_common(c_run);
    auto* c_cert = app.add_subcommand("certify", "select and check certified-mode constants");
    add_common(c_cert);
    auto* c_ana = app.add_subcommand("analyze", "re-analyze snapshots.csv in the output dir");
    add_common(c_ana);
    auto* c_sweep = app.add_subcommand("sweep", "independent runs along one parameter axis");
    add_common(c_sweep);
    c_sweep->add_option("--axis", axis, "N | eps0 | beta-margin | profile-param")->required();
    c_sweep->add_option("--values", values_csv, "comma-separated values")->required();
    c_sweep->add_option("--jobs", jobs, "parallel row jobs (default 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load_config(config_path);
        const auto out = resolve_out(cfg, out_flag);
        if (app.got_subcommand(c_run)) return cuspflow::cmd_run(cfg, out);
        if (app.got_subcommand(c_cert)) return cuspflow::cmd_certify(cfg, out);
        if (app.got_subcommand(c_ana)) return cuspflow::cmd_analyze(cfg, out);
        if (app.got_subcommand(c_sweep)) {
            std::vector<double> values;
            std::stringstream ss(values_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (!tok.empty()) values.push_back(std::stod(tok));
            }
            return cuspflow::cmd_sweep(cfg, axis, values, out, jobs);
        }
    } catch (const cuspflow::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cuspflow::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cuspflow::exit_invariant_violation;
    }
    return cuspflow::exit_config_error;
}
