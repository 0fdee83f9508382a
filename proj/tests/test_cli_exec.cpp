// End-to-end checks of the releq binary: exit codes, output schemas and the
// documented CLI contract.  argv[1] is the path to the built executable.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::cout << "[ok] " << what << "\n";
    } else {
        std::cout << "[FAIL] " << what << "\n";
        ++failures;
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: test_cli_exec <releq-binary>\n";
        return 2;
    }
    const std::string bin = argv[1];

    write_file("cli_tri_alpha.json",
               R"({"family": {"ngon": 3}, "potential": {"type": "alpha", "alpha": 1.0}})");
    write_file("cli_tri_log.json",
               R"({"family": {"ngon": 3}, "potential": {"type": "log"}})");
    write_file("cli_malformed.json", "{not json");
    write_file("cli_bad_schema.json", R"({"potential": {"type": "log"}})");

    // analyze: report written, exit 0.
    check(run(bin + " analyze --input cli_tri_log.json --output cli_out.json") == 0,
          "analyze exits 0 on the log triangle");
    {
        const auto report = nlohmann::json::parse(slurp("cli_out.json"));
        check(report.at("schema") == "releq-analysis-v1", "analyze report carries its schema");
        check(report.at("verdict").at("spectrally_stable").get<bool>(),
              "log triangle reported spectrally stable");
        check(!report.at("verdict").at("linearly_stable").get<bool>(),
              "log triangle reported linearly unstable");
        check(report.at("seed").get<unsigned>() == 0, "default seed recorded in the report");
    }

    // --check-stable: exit 2 exactly when spectrally unstable.
    check(run(bin + " analyze --input cli_tri_alpha.json --check-stable "
                    "--output cli_out2.json") == 2,
          "check-stable exits 2 on the unstable alpha triangle");
    check(run(bin + " analyze --input cli_tri_log.json --check-stable "
                    "--output cli_out3.json") == 0,
          "check-stable exits 0 on the spectrally stable log triangle");

    // Input errors: exit 1.
    check(run(bin + " analyze --input cli_malformed.json --output /dev/null 2>/dev/null") == 1,
          "malformed JSON exits 1");
    check(run(bin + " analyze --input cli_bad_schema.json --output /dev/null 2>/dev/null") == 1,
          "schema violation exits 1");
    check(run(bin + " analyze --input cli_missing.json --output /dev/null 2>/dev/null") == 1,
          "missing file exits 1");

    // Numeric failures: exit 3 (two bodies inside the collision tolerance).
    write_file("cli_collision.json",
               R"({"masses": [1.0, 1.0, 1.0],
                   "positions": [[0.0, 0.0], [1e-12, 0.0], [1.0, 0.0]],
                   "potential": {"type": "alpha", "alpha": 1.0}})");
    check(run(bin + " analyze --input cli_collision.json --output /dev/null 2>/dev/null") == 3,
          "collision during solve exits 3");

    // Deterministic output for a fixed seed.
    run(bin + " analyze --input cli_tri_alpha.json --seed 5 --output cli_rep_a.json");
    run(bin + " analyze --input cli_tri_alpha.json --seed 5 --output cli_rep_b.json");
    check(slurp("cli_rep_a.json") == slurp("cli_rep_b.json"),
          "identical runs produce byte-identical reports");

    // scan-alpha: csv schema header, one row per grid point.
    check(run(bin + " scan-alpha --input cli_tri_alpha.json --alpha-grid 0.5:1.5:3 "
                    "--format csv --output cli_scan.csv") == 0,
          "scan-alpha exits 0");
    {
        const std::string csv = slurp("cli_scan.csv");
        check(csv.rfind("# schema: releq-scan-alpha-v1", 0) == 0, "scan csv schema header");
        int lines = 0;
        for (char c : csv)
            if (c == '\n') ++lines;
        check(lines == 5, "scan csv has header + column row + 3 data rows");
    }
    check(run(bin + " scan-alpha --input cli_tri_alpha.json --alpha-grid 0.5:2.5:3 "
                    "2>/dev/null") == 1,
          "grid outside (0,2) exits 1");

    // ngon-threshold: monotone table, usage errors.
    check(run(bin + " ngon-threshold --n-range 8:12 --output cli_ngon.csv") == 0,
          "ngon-threshold exits 0");
    {
        std::istringstream in(slurp("cli_ngon.csv"));
        std::string line;
        std::getline(in, line);  // schema
        std::getline(in, line);  // header
        double previous = 1e300;
        bool monotone = true, all_meaningful = true;
        while (std::getline(in, line)) {
            const auto c1 = line.find(','), c2 = line.rfind(',');
            const double value = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            if (value >= previous) monotone = false;
            previous = value;
            if (line.substr(c2 + 1) != "1") all_meaningful = false;
        }
        check(monotone, "threshold values decrease over 8..12");
        check(all_meaningful, "thresholds for n >= 8 are meaningful");
    }
    check(run(bin + " ngon-threshold --n-range 12:8 2>/dev/null") == 1,
          "reversed n-range exits 1");
    check(run(bin + " ngon-threshold --n-range 3:7 --output cli_ngon2.csv") == 0,
          "small-n range succeeds");
    {
        const std::string table = slurp("cli_ngon2.csv");
        check(table.find(",1\n") == std::string::npos, "n <= 7 rows are all not meaningful");
    }

    // spectral-flow: valid interval, even flow for the log triangle.
    check(run(bin + " spectral-flow --input cli_tri_log.json --interval 0.8:3.0 "
                    "--output cli_flow.json") == 0,
          "spectral-flow exits 0");
    {
        const auto flow = nlohmann::json::parse(slurp("cli_flow.json"));
        check(flow.at("endpoint_flow").get<int>() == -1,
              "flow over [0.8, 3.0] equals the tracking-oracle value -1");
        check(flow.at("endpoint_flow") == flow.at("crossing_sum"),
              "endpoint formula equals the crossing sum");
        check(flow.at("crossings").size() == 2, "two crossings inside [0.8, 3.0]");
    }
    check(run(bin + " spectral-flow --input cli_tri_log.json --interval 0:3 2>/dev/null") == 3,
          "singular endpoint exits 3 with a shifted-endpoint hint");

    // Unknown subcommand / missing required option.
    check(run(bin + " bogus 2>/dev/null") == 1, "unknown subcommand exits 1");
    check(run(bin + " analyze 2>/dev/null") == 1, "missing required --input exits 1");

    std::cout << (failures == 0 ? "all cli checks passed\n" : "cli checks FAILED\n");
    return failures == 0 ? 0 : 1;
}
