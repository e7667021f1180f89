#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "pmo/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

}  // namespace

int main(int argc, char** argv) {
    using namespace pmo::cli;
    CLI::App app{"Electrothermal PMO RRAM neuron simulator"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions options;
    std::string out = "out";
    double sample_interval = 0.0;

    struct Command {
        const char* name;
        const char* help;
        ScenarioKind default_kind;
        void (*run)(const RunSpec&, const CommandOptions&, std::ostream&);
    };
    const Command commands[] = {
        {"simulate", "Run one scenario and write trace, spikes and summary", ScenarioKind::constant,
         run_simulate},
        {"sweep", "Sweep the input or refractory voltage", ScenarioKind::constant, run_sweep},
        {"calibrate", "Fit device/circuit parameters", ScenarioKind::calibrate, run_calibrate},
        {"scaling", "Timescale and area report", ScenarioKind::scaling_report, run_scaling},
        {"patterns", "Run the chattering and bursting programs", ScenarioKind::constant, run_patterns},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "JSON run description")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_flag("--plot", options.plot, "Also write SVG plots");
        sub->add_option("--sample-interval", sample_interval, "Trace sampling period [s]")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    options.out = out;
    if (sample_interval > 0.0) options.sample_interval = sample_interval;
    for (const auto& c : commands) {
        if (!app.got_subcommand(c.name)) continue;
        try {
            const RunSpec spec = config_path.empty() ? default_run_spec(c.default_kind)
                                                     : load_run_spec(config_path);
            c.run(spec, options, std::cout);
            return kOk;
        } catch (const pmo::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kConfigError;
        } catch (const pmo::DomainError& e) {
            std::cerr << "invalid input: " << e.what() << '\n';
            return kConfigError;
        } catch (const pmo::NumericalError& e) {
            std::cerr << "numerical failure in " << c.name << ": " << e.what() << '\n';
            return kNumericalError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kFailure;
        }
    }
    return kFailure;
}
