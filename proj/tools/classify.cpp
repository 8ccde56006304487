// classify: find and classify the stationary points of a formula.
//
//   classify <problem-file> [--json PATH] [--epsilon E] [--retries K]
//            [--no-baseline] [--counters]
//
// Exit status: 0 all candidates decided, 2 some candidate undecided,
// 1 on error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "extremum/report.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Locate and classify the stationary points of f inside a box"};
    std::string problem_path;
    std::string json_path;
    std::optional<double> epsilon;
    std::optional<std::size_t> retries;
    bool no_baseline = false;
    bool counters = false;

    app.add_option("problem", problem_path, "Problem file (key = value format)")->required();
    app.add_option("--json", json_path, "Write the structured report to PATH");
    app.add_option("--epsilon", epsilon, "Probe half-size for every candidate");
    app.add_option("--retries", retries, "Retry limit for undecided candidates");
    app.add_flag("--no-baseline", no_baseline, "Skip the Hessian comparison");
    app.add_flag("--counters", counters, "Print evaluation counters and timing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const extremum::ProblemFile problem = extremum::load_problem(problem_path);
        extremum::RunOptions run;
        run.epsilon = epsilon;
        run.retries = retries;
        run.baseline = !no_baseline;
        const extremum::Report report = extremum::analyze(problem, run);

        std::cout << extremum::format_table(report, counters);
        if (!json_path.empty()) {
            std::ofstream out(json_path);
            if (!out) {
                std::cerr << "classify: cannot write '" << json_path << "'\n";
                return 1;
            }
            out << extremum::to_json(report, counters).dump(2) << '\n';
        }
        return extremum::exit_status(report);
    } catch (const std::exception& e) {
        std::cerr << "classify: " << e.what() << '\n';
        return 1;
    }
}
