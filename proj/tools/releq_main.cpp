// releq: stability analysis of relative equilibria of planar n-body-type
// problems (alpha-homogeneous and logarithmic potentials).
//
// Subcommands: analyze, scan-alpha, ngon-threshold, spectral-flow.
// Exit codes: 0 ok, 1 input error, 2 stability check failed, 3 numeric failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "releq/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitNumeric = 3;

struct GridSpec {
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw releq::InputError("grid must have the form A:B:STEPS");
    try {
        g.from = std::stod(text.substr(0, c1));
        g.to = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.steps = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw releq::InputError("cannot parse grid '" + text + "'");
    }
    return g;
}

std::pair<double, double> parse_interval(const std::string& text) {
    const auto c = text.find(':');
    if (c == std::string::npos)
        throw releq::InputError("interval must have the form A:B");
    try {
        return {std::stod(text.substr(0, c)), std::stod(text.substr(c + 1))};
    } catch (const std::exception&) {
        throw releq::InputError("cannot parse interval '" + text + "'");
    }
}

void write_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path);
    if (!out)
        throw releq::InputError("cannot open output file: " + output_path);
    out << text;
}

int run_analyze(const std::string& input_path, const std::string& output_path,
                bool check_stable, unsigned seed) {
    const releq::ProblemInput input = releq::load_problem_file(input_path);
    const releq::AnalysisReport report = releq::analyze_problem(input, seed);
    write_output(releq::to_json(report).dump(2) + "\n", output_path);
    if (check_stable && !report.verdict.spectrally_stable)
        return kExitCheckFailed;
    return kExitOk;
}

int run_scan_alpha(const std::string& input_path, const std::string& grid_text,
                   const std::string& format, const std::string& output_path, unsigned seed) {
    const releq::ProblemInput input = releq::load_problem_file(input_path);
    const GridSpec grid = parse_grid(grid_text);
    if (format == "csv") {
        write_output(releq::scan_alpha_csv(input, grid.from, grid.to, grid.steps, seed),
                     output_path);
    } else {
        write_output(
            releq::scan_alpha_json(input, grid.from, grid.to, grid.steps, seed).dump(2) + "\n",
            output_path);
    }
    return kExitOk;
}

int run_ngon_threshold(const std::string& range_text, const std::string& output_path) {
    const auto c = range_text.find(':');
    if (c == std::string::npos)
        throw releq::InputError("n-range must have the form N1:N2");
    int n1 = 0, n2 = 0;
    try {
        n1 = std::stoi(range_text.substr(0, c));
        n2 = std::stoi(range_text.substr(c + 1));
    } catch (const std::exception&) {
        throw releq::InputError("cannot parse n-range '" + range_text + "'");
    }
    if (n1 < 3 || n2 < n1)
        throw releq::InputError("n-range must satisfy 3 <= N1 <= N2");

    std::string out = "# schema: releq-ngon-threshold-v1\nn,alpha_bar,meaningful\n";
    double previous = std::numeric_limits<double>::infinity();
    for (int n = n1; n <= n2; ++n) {
        const releq::AlphaThreshold t = releq::ngon_alpha_threshold(n);
        if (t.value >= previous)
            throw releq::Error("threshold is not decreasing at n = " + std::to_string(n));
        previous = t.value;
        out += std::to_string(n) + "," + std::to_string(t.value) + "," +
               (t.meaningful ? "1" : "0") + "\n";
    }
    write_output(out, output_path);
    return kExitOk;
}

int run_spectral_flow(const std::string& input_path, const std::string& interval_text,
                      const std::string& output_path, unsigned seed) {
    const releq::ProblemInput input = releq::load_problem_file(input_path);
    const auto [a, b] = parse_interval(interval_text);
    if (!(a < b))
        throw releq::InputError("interval needs A < B");
    const releq::BodySystem initial = input.build_system();
    const releq::CentralConfiguration cc =
        releq::solve_central_config(initial, input.potential(), input.solve_options);
    const releq::LinearizedSystem lin = releq::build_linearization(cc);
    try {
        const releq::FlowSection flow = releq::spectral_flow_section(lin, a, b);
        write_output(releq::to_json(flow).dump(2) + "\n", output_path);
    } catch (const releq::SingularEndpoint& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: B + tG is singular there; shift the endpoint away from a\n"
                  << "crossing instant (crossings sit at the imaginary parts of the\n"
                  << "pure-imaginary eigenvalues of L, and t = 0 is always one).\n";
        return kExitNumeric;
    }
    (void)seed;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability of relative equilibria of planar n-body-type problems"};
    app.require_subcommand(1);

    std::string input_path, output_path;
    std::string analyze_format = "json", scan_format = "csv";
    std::string grid_text, interval_text, range_text;
    bool check_stable = false;
    unsigned seed = 0;

    CLI::App* analyze = app.add_subcommand("analyze", "run the full analysis pipeline");
    analyze->add_option("--input", input_path, "problem file (JSON)")->required();
    analyze->add_option("--output", output_path, "write the report here instead of stdout");
    analyze->add_option("--format", analyze_format)->check(CLI::IsMember({"json"}));
    analyze->add_flag("--check-stable", check_stable,
                      "exit 2 when the equilibrium is spectrally unstable");
    analyze->add_option("--seed", seed, "seed for the basis completion (recorded in output)");

    CLI::App* scan = app.add_subcommand("scan-alpha", "classify along an alpha grid");
    scan->add_option("--input", input_path, "problem file (JSON)")->required();
    scan->add_option("--alpha-grid", grid_text, "grid A:B:STEPS inside (0,2)")->required();
    scan->add_option("--format", scan_format, "csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
    scan->add_option("--output", output_path);
    scan->add_option("--seed", seed);

    CLI::App* ngon = app.add_subcommand("ngon-threshold", "closed-form n-gon alpha threshold");
    ngon->add_option("--n-range", range_text, "inclusive range N1:N2")->required();
    ngon->add_option("--output", output_path);

    CLI::App* flow = app.add_subcommand("spectral-flow", "flow of B + tG over an interval");
    flow->add_option("--input", input_path, "problem file (JSON)")->required();
    flow->add_option("--interval", interval_text, "interval A:B")->required();
    flow->add_option("--output", output_path);
    flow->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (app.got_subcommand(analyze))
            return run_analyze(input_path, output_path, check_stable, seed);
        if (app.got_subcommand(scan))
            return run_scan_alpha(input_path, grid_text, scan_format, output_path, seed);
        if (app.got_subcommand(ngon))
            return run_ngon_threshold(range_text, output_path);
        if (app.got_subcommand(flow))
            return run_spectral_flow(input_path, interval_text, output_path, seed);
    } catch (const releq::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const releq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitInput;
}
