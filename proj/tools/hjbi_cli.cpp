// Command-line front end: hjbi [solve|sweep|mc-check] --config FILE [--override k=v]... [--out DIR]

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hjbi/cli.hpp"
#include "hjbi/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Robust ergodic control solver for the logistic-jump HJBI equation"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool quiet = false;

    app.add_option("command", command, "solve, sweep or mc-check (overrides run.command)")
        ->check(CLI::IsMember({"solve", "sweep", "mc-check"}));
    app.add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("-s,--override", overrides, "key=value, applied after the file; repeatable");
    app.add_flag("-q,--quiet", quiet, "no summary on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? hjbi::kExitOk : hjbi::kExitUsage;
    }

    hjbi::RunConfig cfg;
    try {
        hjbi::ConfigMap map = config_path.empty() ? hjbi::ConfigMap{} : hjbi::parse_config_file(config_path);
        for (const auto& o : overrides) hjbi::apply_override(map, o);
        if (!command.empty()) map["run.command"] = command;
        if (!out_dir.empty()) map["output.dir"] = out_dir;
        cfg = hjbi::resolve_config(map);
    } catch (const hjbi::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return hjbi::kExitUsage;
    }
    return hjbi::execute(cfg, quiet ? std::cerr : std::cout, quiet);
}
