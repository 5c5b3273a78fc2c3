#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "viewgame/cli/commands.hpp"

namespace fs = std::filesystem;
using namespace viewgame;
using namespace viewgame::cli;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<long long> seed;
    std::string scenario;
    std::optional<double> alpha;
    std::optional<double> pi_g;
    std::optional<int> draws;
    bool corrupt = false;
};

/// out = "dir/name.csv", suffix "good" -> "dir/name.good.csv"
fs::path output_path(const std::string& out, const Document& d)
{
    fs::path p(out);
    if (d.suffix.empty()) {
        return p.has_extension() ? p : fs::path(out + "." + d.extension);
    }
    fs::path stem = p.has_extension() ? p.parent_path() / p.stem() : p;
    return fs::path(stem.string() + "." + d.suffix + "." + d.extension);
}

void emit(const CommandResult& r, const std::string& out)
{
    if (out.empty()) {
        for (const auto& d : r.documents) {
            if (r.documents.size() > 1) {
                std::cout << "# " << (d.suffix.empty() ? "main" : d.suffix) << "\n";
            }
            std::cout << d.body;
        }
        std::cout.flush();
        return;
    }
    for (const auto& d : r.documents) {
        const auto path = output_path(out, d);
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path());
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw ConfigError("cannot write '" + path.string() + "'");
        }
        f << d.body;
        std::cerr << "wrote " << path.string() << "\n";
    }
}

RunConfig resolve(const Flags& f)
{
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (!f.scenario.empty()) c.scenario = cli::detail::parse_scenario(f.scenario);
    if (!f.out.empty()) c.out = f.out;
    if (f.seed) {
        if (*f.seed < 0) {
            throw ConfigError("--seed must be non-negative");
        }
        c.seed = static_cast<std::uint64_t>(*f.seed);
    }
    if (f.alpha) c.alpha = *f.alpha;
    if (f.pi_g) c.belief = Belief::from_good(*f.pi_g);
    if (f.draws) c.draws = *f.draws;
    if (f.corrupt) c.corrupt = true;
    validate_config(c);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"viewgame: content-diffusion threshold game toolkit"};
    app.footer("Units: time in days, rates in views/day, viewcounts in views.\n"
               "Exit codes: 0 success, 1 numeric or verification failure, 2 usage or config error.");
    app.require_subcommand(1);

    Flags flags;
    struct Entry {
        const char* name;
        const char* help;
        CommandResult (*run)(const RunConfig&);
    };
    const Entry entries[] = {
        {"trajectory", "viewcount trajectories of both qualities (CSV t,x,xdot)", cmd_trajectory},
        {"surface", "utility against beta at fixed alpha (CSV beta,utility,branch)", cmd_surface},
        {"best-response", "best-response set with oracle cross-check (JSON)", cmd_best_response},
        {"classify", "symmetric equilibrium report (JSON)", cmd_classify},
        {"verify", "check classifications against the grid oracle on random draws", cmd_verify},
        {"simulate", "stochastic viewer simulation or best-response dynamics (CSV + JSON)",
         cmd_simulate},
    };
    CommandResult (*chosen)(const RunConfig&) = nullptr;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", flags.config, "JSON run configuration");
        sub->add_option("--out", flags.out, "output path (stdout when omitted)");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--scenario", flags.scenario, "scenario name");
        sub->add_option("--alpha", flags.alpha, "population threshold");
        sub->add_option("--pi-g", flags.pi_g, "belief that the content is good");
        if (std::string(e.name) == "verify") {
            sub->add_option("--draws", flags.draws, "number of random draws");
            sub->add_flag("--corrupt", flags.corrupt, "negative control: report a wrong set");
        }
        sub->callback([&chosen, run = e.run] { chosen = run; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const RunConfig cfg = resolve(flags);
        const CommandResult r = chosen(cfg);
        emit(r, cfg.out);
        return r.code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
