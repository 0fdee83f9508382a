#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "releq/spectral_flow.hpp"
#include "releq/stability_analysis.hpp"

namespace releq {

using Json = nlohmann::ordered_json;

/// Parsed problem file.  Exactly one of positions/ngon is present; masses
/// are required with explicit positions and default to 1 for families.
struct ProblemInput {
    std::vector<double> masses;
    std::optional<Eigen::VectorXd> positions;
    std::optional<int> ngon;
    std::optional<PotentialSpec> spec;  // engaged after validation
    SolveOptions solve_options;

    BodySystem build_system() const;
    const PotentialSpec& potential() const { return *spec; }
};

/// Schema-validates and parses a problem file; throws InputError with a
/// diagnostic naming the offending key.
ProblemInput parse_problem_file(const Json& j);
ProblemInput load_problem_file(const std::string& path);

/// Spectral-flow section of the analysis: the affine path B + tG.
struct FlowSection {
    double interval_a = 0.0;
    double interval_b = 0.0;
    int endpoint_flow = 0;
    int crossing_sum = 0;  // sum of local flows over interior crossings
    std::vector<CrossingReport> crossings;
    std::vector<KreinReport> krein;
};

/// Everything the analyze pipeline produces, in serializable form.
struct AnalysisReport {
    AnalysisReport(unsigned seed, CentralConfiguration cc) : seed(seed), cc(std::move(cc)) {}

    unsigned seed = 0;
    CentralConfiguration cc;
    int morse_index_full = 0;
    int nullity_full = 0;
    int morse_index_essential = 0;
    int nullity_essential = 0;
    std::vector<Complex> spectrum_L, spectrum_L1, spectrum_L2, spectrum_L3;
    StabilityVerdict verdict;
    ParityReport parity;
    SumSquaresReport sum_squares;
    EigenpolyReport eigenpoly;
    std::optional<InequalityReport> inequality;  // absent for the log potential
    FlowSection flow;
};

/// Full pipeline: solve CC, linearize, reduce, classify, identities,
/// spectral flow.
AnalysisReport analyze_problem(const ProblemInput& input, unsigned seed = 0);

Json to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const Json& j);

/// CSV rows for the alpha scan (deterministic ordering, schema header row).
std::string scan_alpha_csv(const ProblemInput& input, double alpha_from, double alpha_to,
                           int steps, unsigned seed = 0);
Json scan_alpha_json(const ProblemInput& input, double alpha_from, double alpha_to, int steps,
                     unsigned seed = 0);

/// Spectral-flow report over an explicit interval of the B + tG path.
FlowSection spectral_flow_section(const LinearizedSystem& lin, double a, double b);
Json to_json(const FlowSection& flow);

}  // namespace releq
