#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "maxstab/runner.hpp"

int main(int argc, char** argv) {
    using namespace maxstab;
    CLI::App app{"maxstab: max-stability experiments on censored Brownian paths"};
    std::string command, config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    bool schema = false;
    app.add_option("command", command, "subcommand")->check(CLI::IsMember(subcommands()));
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    app.add_flag("--schema", schema, "print the config schema (of the subcommand, or all) and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        if (schema) {
            std::cout << (command.empty() ? all_schemas() : schema_for(command)).dump(2) << "\n";
            return kExitOk;
        }
        if (command.empty()) throw std::invalid_argument("missing subcommand; one of classify-set, match-prob, "
                                                         "verify-formula, oracle, time-change, generate-set, prune, report");
        if (config_path.empty()) throw std::invalid_argument("--config is required");
        std::ifstream in(config_path);
        RunRequest req;
        req.command = command;
        try {
            req.config = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ConfigError("$", std::string("not valid JSON: ") + e.what());
        }
        if (threads && req.config.is_object()) req.config["threads"] = *threads;
        req.seed = seed;
        req.base = std::filesystem::absolute(config_path).parent_path();
        if (out) req.out = std::filesystem::absolute(*out);
        return run(req, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
