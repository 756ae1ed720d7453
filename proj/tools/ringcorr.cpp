#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ringcorr/cli.hpp"

using ringcorr::cli::Command;
using ringcorr::cli::Format;
using ringcorr::Representation;

int main(int argc, char** argv) {
    ringcorr::cli::RunConfig cfg;
    CLI::App app{"Exact quantum and classical position correlators of a particle on a ring.\n"
                 "All quantities are in one consistent unit system chosen by the caller."};
    app.set_version_flag("--version", std::string(ringcorr::cli::kVersion));

    const std::map<std::string, Command> commands{{"info", Command::Info}, {"scan", Command::Scan},
                                                  {"kms", Command::Kms},   {"limit", Command::Limit},
                                                  {"mc", Command::Mc},     {"selftest", Command::Selftest}};
    const std::map<std::string, Representation> reps{{"auto", Representation::Auto},
                                                     {"direct", Representation::Direct},
                                                     {"poisson", Representation::Poisson},
                                                     {"half", Representation::HalfInteger}};
    const std::map<std::string, Format> formats{{"csv", Format::Csv}, {"json", Format::Json}};

    std::string command, rep = "auto", format = "csv";
    app.add_option("command", command, "info | scan | kms | limit | mc | selftest")
        ->required()
        ->check(CLI::IsMember(commands));
    app.add_option("--mass", cfg.mass, "particle mass")->capture_default_str();
    app.add_option("--radius", cfg.radius, "ring radius")->capture_default_str();
    app.add_option("--hbar", cfg.hbar, "Planck constant (limit: starting value)")->capture_default_str();
    auto* beta = app.add_option("--beta", cfg.beta, "inverse temperature");
    auto* energy = app.add_option("--mean-energy", cfg.mean_energy, "mean energy; beta is solved for");
    beta->excludes(energy);
    app.add_option("--tmin", cfg.t_min, "first time (default 0)");
    app.add_option("--tmax", cfg.t_max, "last time (default depends on command)");
    app.add_option("--points", cfg.points, "number of grid points");
    app.add_option("--eps", cfg.policy.eps, "relative truncation tolerance")->capture_default_str();
    app.add_option("--max-terms", cfg.policy.max_terms, "term cap per series")->capture_default_str();
    app.add_option("--rep", rep, "auto | direct | poisson | half")->check(CLI::IsMember(reps))->capture_default_str();
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember(formats))->capture_default_str();
    app.add_option("--out", cfg.out_path, "output file (default standard output)");
    app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Monte Carlo samples per point")->capture_default_str();
    app.add_option("--levels", cfg.levels, "limit: number of hbar halvings")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ringcorr::cli::kExitUsage;
    }
    cfg.command = commands.at(command);
    cfg.policy.representation = reps.at(rep);
    cfg.format = formats.at(format);
    return ringcorr::cli::run(cfg, std::cout, std::cerr);
}
