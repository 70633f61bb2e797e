#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "advtrust/cli.hpp"
#include "advtrust/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"advtrust: sample-level adversarial vulnerability scoring and trust pipelines"};
    app.require_subcommand(1);

    std::string config_path;
    std::size_t threads = advtrust::default_threads();
    std::string out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config JSON")->required();
        sub->add_option("--threads", threads, "cap on per-sample fan-out");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
    };

    for (const char* name : {"train", "adv-train", "ddb-vs-steps", "band-sweep", "score", "distill"})
        add_common(app.add_subcommand(name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad invocation is a config error
    }

    advtrust::cli::RunOptions opt;
    opt.threads = threads;
    if (!out_dir.empty()) opt.out_override = out_dir;
    if (const char* env = std::getenv("ADVTRUST_SEED")) {
        try {
            opt.seed_override = std::stoull(env);
        } catch (...) {
            std::fprintf(stderr, "error: ADVTRUST_SEED must be an integer\n");
            return 2;
        }
    }

    std::string command = app.get_subcommands().front()->get_name();
    return advtrust::cli::run_command(command, config_path, opt);
}
