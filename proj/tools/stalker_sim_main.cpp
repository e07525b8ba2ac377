// Command-line front end: bind a key=value config file to one of the
// experiment families and write its CSV artifacts.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stalker/experiment.hpp"

extern char** environ;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

stalker::ExperimentConfig load(const std::string& config_path,
                               const stalker::KeyValues& cli_overrides) {
    std::vector<std::string> env_entries;
    for (char** e = environ; *e != nullptr; ++e) env_entries.emplace_back(*e);
    return stalker::parse_config(read_file(config_path),
                                 stalker::env_overrides(env_entries), cli_overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stalker-sim: pursuit-process and opinion-game experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seed_text, threads_text, out_dir;

    CLI::App* run = app.add_subcommand("run", "execute an experiment");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("--seed", seed_text, "override the seed");
    run->add_option("--threads", threads_text, "worker threads for replica sets");
    run->add_option("--out", out_dir, "output directory");

    CLI::App* validate = app.add_subcommand("validate", "check a config and show "
                                                        "the resolved values");
    validate->add_option("config", config_path, "key=value config file")->required();

    CLI11_PARSE(app, argc, argv);

    stalker::KeyValues overrides;
    if (!seed_text.empty()) overrides.emplace_back("seed", seed_text);
    if (!threads_text.empty()) overrides.emplace_back("threads", threads_text);
    if (!out_dir.empty()) overrides.emplace_back("output_dir", out_dir);

    try {
        stalker::ExperimentConfig cfg = load(config_path, overrides);
        if (validate->parsed()) {
            std::cout << stalker::manifest_text(cfg);
            return 0;
        }
        for (const auto& f : stalker::run_experiment(cfg)) std::cout << f << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "stalker-sim: " << e.what() << '\n';
        return 1;
    }
}
