#include "releq/report.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace releq {

namespace {

Json complex_list(const std::vector<Complex>& values) {
    // Sorted for byte-stable output regardless of eigensolver ordering.
    std::vector<Complex> sorted = values;
    std::sort(sorted.begin(), sorted.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    Json list = Json::array();
    for (const Complex& z : sorted) list.push_back({{"re", z.real()}, {"im", z.imag()}});
    return list;
}

std::vector<Complex> complex_list_from(const Json& j) {
    std::vector<Complex> values;
    for (const auto& item : j) values.emplace_back(item.at("re").get<double>(),
                                                   item.at("im").get<double>());
    return values;
}

[[noreturn]] void fail(const std::string& message) {
    throw InputError("problem file: " + message);
}

}  // namespace

BodySystem ProblemInput::build_system() const {
    if (ngon) return ngon_configuration(*ngon);
    Eigen::VectorXd q = *positions;
    return BodySystem(masses, std::move(q));
}

ProblemInput parse_problem_file(const Json& j) {
    if (!j.is_object()) fail("top level must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "masses" && key != "positions" && key != "potential" && key != "family" &&
            key != "tolerances")
            fail("unknown key '" + key + "'");
    }

    ProblemInput input;

    if (!j.contains("potential")) fail("missing 'potential'");
    const Json& pot = j.at("potential");
    if (!pot.is_object() || !pot.contains("type")) fail("'potential' needs a 'type'");
    const std::string type = pot.at("type").get<std::string>();
    if (type == "alpha") {
        if (!pot.contains("alpha") || !pot.at("alpha").is_number())
            fail("potential type 'alpha' needs a numeric 'alpha'");
        const double alpha = pot.at("alpha").get<double>();
        if (!(alpha > 0.0 && alpha < 2.0)) fail("'alpha' must lie in (0, 2)");
        input.spec = PotentialSpec::alpha_homogeneous(alpha);
    } else if (type == "log") {
        input.spec = PotentialSpec::logarithmic();
    } else {
        fail("unknown potential type '" + type + "'");
    }

    const bool has_positions = j.contains("positions");
    const bool has_family = j.contains("family");
    if (has_positions == has_family)
        fail("exactly one of 'positions' and 'family' must be present");

    if (has_family) {
        const Json& family = j.at("family");
        if (!family.is_object() || !family.contains("ngon"))
            fail("'family' must be an object naming 'ngon'");
        if (!family.at("ngon").is_number_integer()) fail("'ngon' must be an integer");
        const int n = family.at("ngon").get<int>();
        if (n < 3) fail("'ngon' needs n >= 3");
        input.ngon = n;
        input.masses.assign(n, 1.0);
        if (j.contains("masses")) fail("'masses' cannot be combined with a builtin family");
    } else {
        if (!j.contains("masses")) fail("'masses' is required with explicit positions");
        if (!j.at("masses").is_array() || j.at("masses").size() < 3)
            fail("'masses' must list at least 3 values");
        for (const auto& m : j.at("masses")) {
            if (!m.is_number() || !(m.get<double>() > 0.0))
                fail("'masses' entries must be positive numbers");
            input.masses.push_back(m.get<double>());
        }
        const Json& pos = j.at("positions");
        if (!pos.is_array() || pos.size() != input.masses.size())
            fail("'positions' must list one (x, y) pair per mass");
        Eigen::VectorXd q(2 * pos.size());
        Eigen::Index at = 0;
        for (const auto& pair : pos) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number())
                fail("'positions' entries must be [x, y] number pairs");
            q[at++] = pair[0].get<double>();
            q[at++] = pair[1].get<double>();
        }
        input.positions = std::move(q);
    }

    if (j.contains("tolerances")) {
        const Json& tol = j.at("tolerances");
        if (!tol.is_object()) fail("'tolerances' must be an object");
        for (const auto& [key, value] : tol.items()) {
            if (key == "cc_tol_factor") {
                if (!value.is_number() || !(value.get<double>() > 0.0))
                    fail("'cc_tol_factor' must be a positive number");
                input.solve_options.tol_factor = value.get<double>();
            } else if (key == "max_iter") {
                if (!value.is_number_integer() || value.get<int>() < 1)
                    fail("'max_iter' must be a positive integer");
                input.solve_options.max_iter = value.get<int>();
            } else {
                fail("unknown tolerance override '" + key + "'");
            }
        }
    }
    return input;
}

ProblemInput load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem_file(j);
}

FlowSection spectral_flow_section(const LinearizedSystem& lin, double a, double b) {
    const auto dim = lin.B.rows();
    const Eigen::MatrixXcd G =
        Complex(0.0, 1.0) * standard_J(static_cast<int>(dim)).cast<Complex>();
    const HermitianPath path = HermitianPath::affine(lin.B.cast<Complex>(), G, a, b);

    FlowSection flow;
    flow.interval_a = a;
    flow.interval_b = b;
    flow.endpoint_flow = spectral_flow_endpoints(path);
    for (double t : find_crossings_affine(path)) {
        CrossingReport report = partial_signatures_affine(path, t);
        flow.crossing_sum += report.local_flow;
        flow.crossings.push_back(std::move(report));
    }

    // Krein signatures of the pure-imaginary eigenvalue clusters of L.
    const auto spectrum = eigenvalues_of(lin.L);
    const double rho = std::max(1.0, spectral_radius(spectrum));
    for (const auto& cluster : cluster_eigenvalues(spectrum, 1e-7 * rho)) {
        if (std::abs(cluster.mean.real()) > 1e-7 * rho) continue;
        if (cluster.mean.imag() < -1e-7 * rho) continue;  // report Im >= 0 half
        flow.krein.push_back(krein_signature(lin.L, Complex(0.0, cluster.mean.imag())));
    }
    return flow;
}

namespace {

/// Interval for the automatic flow section: B is always singular at t = 0
/// (zero eigenvalues of L2), so start halfway to the first positive crossing
/// and stop past the last one.
std::pair<double, double> choose_flow_interval(const LinearizedSystem& lin) {
    double t_max = 0.0;
    for (const Complex& z : eigenvalues_of(lin.L)) t_max = std::max(t_max, std::abs(z.imag()));
    const double probe_end = 1.2 * t_max + 1.0;
    const Eigen::MatrixXcd G =
        Complex(0.0, 1.0) * standard_J(static_cast<int>(lin.B.rows())).cast<Complex>();
    const auto crossings = find_crossings_affine(
        HermitianPath::affine(lin.B.cast<Complex>(), G, 0.0, probe_end));
    // A defective zero crossing can be located only to ~sqrt(eps), so the
    // positivity cutoff must sit well above that.
    const double zero_cut = 1e-6 * std::max(1.0, t_max);
    double first_positive = probe_end;
    double last = 0.0;
    for (double t : crossings) {
        if (t > zero_cut) first_positive = std::min(first_positive, t);
        last = std::max(last, t);
    }
    return {0.5 * first_positive, 1.1 * last + 0.5};
}

}  // namespace

AnalysisReport analyze_problem(const ProblemInput& input, unsigned seed) {
    const BodySystem initial = input.build_system();
    AnalysisReport report{seed,
                          solve_central_config(initial, input.potential(), input.solve_options)};
    const LinearizedSystem lin = build_linearization(report.cc);
    const ReductionBasis basis = build_reduction(report.cc, lin, seed);
    const ReducedBlocks blocks = restrict_blocks(basis, lin);

    const AugmentedHessian full = augmented_hessian(report.cc);
    report.morse_index_full = full.morse_index;
    report.nullity_full = full.nullity;
    const AugmentedHessian essential = essential_hessian(blocks);
    report.morse_index_essential = essential.morse_index;
    report.nullity_essential = essential.nullity;

    report.spectrum_L = refined_eigenvalues_of(lin.L);
    report.spectrum_L1 = refined_eigenvalues_of(blocks.L1);
    report.spectrum_L2 = refined_eigenvalues_of(blocks.L2);
    report.spectrum_L3 = refined_eigenvalues_of(blocks.L3);

    report.verdict = classify(blocks);
    report.parity = parity_from_indices(essential.morse_index, essential.nullity);
    report.sum_squares = sum_of_squares_check(report.cc, lin, blocks);
    report.eigenpoly = reduced_eigenpoly_check(report.cc, lin);
    if (!report.cc.spec.is_log())
        report.inequality = instability_inequality(report.cc, report.verdict.degenerate);

    const auto [a, b] = choose_flow_interval(lin);
    report.flow = spectral_flow_section(lin, a, b);
    return report;
}

namespace {

const char* parity_name(ParityVerdict v) {
    switch (v) {
        case ParityVerdict::UnstableSpectrally: return "unstable_by_parity_spectral";
        case ParityVerdict::UnstableLinearly: return "unstable_by_parity_linear";
        default: return "inconclusive";
    }
}

ParityVerdict parity_from_name(const std::string& s) {
    if (s == "unstable_by_parity_spectral") return ParityVerdict::UnstableSpectrally;
    if (s == "unstable_by_parity_linear") return ParityVerdict::UnstableLinearly;
    return ParityVerdict::Inconclusive;
}

Json to_json(const CrossingReport& c) {
    return Json{{"t_star", c.t_star},
                {"kernel_dim", c.kernel_dim},
                {"crossing_form_signature", c.crossing_form_signature},
                {"regular", c.regular},
                {"partial_signatures", c.partial_signatures},
                {"generalized_space_dim", c.generalized_space_dim},
                {"local_flow", c.local_flow}};
}

CrossingReport crossing_from_json(const Json& j) {
    CrossingReport c;
    c.t_star = j.at("t_star").get<double>();
    c.kernel_dim = j.at("kernel_dim").get<int>();
    c.crossing_form_signature = j.at("crossing_form_signature").get<int>();
    c.regular = j.at("regular").get<bool>();
    c.partial_signatures = j.at("partial_signatures").get<std::vector<int>>();
    c.generalized_space_dim = j.at("generalized_space_dim").get<int>();
    c.local_flow = j.at("local_flow").get<int>();
    return c;
}

}  // namespace

Json to_json(const FlowSection& flow) {
    Json crossings = Json::array();
    for (const auto& c : flow.crossings) crossings.push_back(to_json(c));
    Json krein = Json::array();
    for (const auto& k : flow.krein)
        krein.push_back({{"re", k.eigenvalue.real()},
                         {"im", k.eigenvalue.imag()},
                         {"space_dim", k.space_dim},
                         {"signature", k.signature}});
    return Json{{"interval", {flow.interval_a, flow.interval_b}},
                {"endpoint_flow", flow.endpoint_flow},
                {"crossing_sum", flow.crossing_sum},
                {"crossings", crossings},
                {"krein", krein}};
}

Json to_json(const AnalysisReport& r) {
    Json positions = Json::array();
    for (int i = 0; i < r.cc.sys.count(); ++i)
        positions.push_back({r.cc.sys.body(i).x(), r.cc.sys.body(i).y()});

    Json inequality;
    if (r.inequality) {
        inequality = Json{
            {"verdict", r.inequality->verdict == InequalityReport::Verdict::UnstableByTrace
                            ? "unstable_by_trace"
                            : "inconclusive"},
            {"lhs", r.inequality->lhs},
            {"rhs", r.inequality->rhs},
            {"margin", r.inequality->margin},
            {"degeneracy_caveat", r.inequality->degeneracy_caveat}};
    }

    return Json{
        {"schema", "releq-analysis-v1"},
        {"seed", r.seed},
        {"central_configuration",
         {{"masses", r.cc.sys.masses()},
          {"positions", positions},
          {"potential",
           r.cc.spec.is_log() ? Json{{"type", "log"}}
                              : Json{{"type", "alpha"}, {"alpha", r.cc.spec.alpha()}}},
          {"lambda", r.cc.lambda},
          {"omega", r.cc.omega},
          {"residual_norm", r.cc.residual_norm}}},
        {"indices",
         {{"morse_index_full", r.morse_index_full},
          {"nullity_full", r.nullity_full},
          {"morse_index_essential", r.morse_index_essential},
          {"nullity_essential", r.nullity_essential}}},
        {"spectra",
         {{"L", complex_list(r.spectrum_L)},
          {"L1", complex_list(r.spectrum_L1)},
          {"L2", complex_list(r.spectrum_L2)},
          {"L3", complex_list(r.spectrum_L3)}}},
        {"verdict",
         {{"degenerate", r.verdict.degenerate},
          {"spectrally_stable", r.verdict.spectrally_stable},
          {"diagonalizable_L3", r.verdict.diagonalizable_L3},
          {"linearly_stable", r.verdict.linearly_stable},
          {"max_real_part", r.verdict.max_real_part},
          {"evidence", r.verdict.evidence},
          {"parity",
           {{"verdict", parity_name(r.parity.verdict)},
            {"morse_index", r.parity.morse_index},
            {"nullity", r.parity.nullity}}}}},
        {"identity_checks",
         {{"sum_of_squares",
           {{"spectral_sum", r.sum_squares.spectral_sum},
            {"trace_formula", r.sum_squares.trace_formula},
            {"rel_error", r.sum_squares.rel_error},
            {"first8_spectral", r.sum_squares.first8_spectral},
            {"first8_formula", r.sum_squares.first8_formula},
            {"first8_rel_error", r.sum_squares.first8_rel_error}}},
          {"det_P",
           {{"leading_coeff", r.eigenpoly.leading_coeff},
            {"second_coeff", r.eigenpoly.second_coeff},
            {"expected_second", r.eigenpoly.expected_second},
            {"rel_error", r.eigenpoly.rel_error},
            {"max_scaled_det", r.eigenpoly.max_scaled_det}}},
          {"inequality", inequality}}},
        {"spectral_flow", to_json(r.flow)}};
}

AnalysisReport report_from_json(const Json& j) {
    if (j.value("schema", "") != std::string("releq-analysis-v1"))
        throw InputError("unknown report schema");

    const Json& cc = j.at("central_configuration");
    std::vector<double> masses = cc.at("masses").get<std::vector<double>>();
    const Json& positions = cc.at("positions");
    Eigen::VectorXd q(2 * positions.size());
    Eigen::Index at = 0;
    for (const auto& p : positions) {
        q[at++] = p[0].get<double>();
        q[at++] = p[1].get<double>();
    }
    const Json& pot = cc.at("potential");
    PotentialSpec spec = pot.at("type").get<std::string>() == "log"
                             ? PotentialSpec::logarithmic()
                             : PotentialSpec::alpha_homogeneous(pot.at("alpha").get<double>());
    AnalysisReport r{j.at("seed").get<unsigned>(),
                     CentralConfiguration{BodySystem(std::move(masses), std::move(q)), spec,
                                          cc.at("lambda").get<double>(),
                                          cc.at("omega").get<double>(),
                                          cc.at("residual_norm").get<double>()}};

    const Json& idx = j.at("indices");
    r.morse_index_full = idx.at("morse_index_full").get<int>();
    r.nullity_full = idx.at("nullity_full").get<int>();
    r.morse_index_essential = idx.at("morse_index_essential").get<int>();
    r.nullity_essential = idx.at("nullity_essential").get<int>();

    const Json& spectra = j.at("spectra");
    r.spectrum_L = complex_list_from(spectra.at("L"));
    r.spectrum_L1 = complex_list_from(spectra.at("L1"));
    r.spectrum_L2 = complex_list_from(spectra.at("L2"));
    r.spectrum_L3 = complex_list_from(spectra.at("L3"));

    const Json& verdict = j.at("verdict");
    r.verdict.essential_spectrum = r.spectrum_L3;
    r.verdict.degenerate = verdict.at("degenerate").get<bool>();
    r.verdict.spectrally_stable = verdict.at("spectrally_stable").get<bool>();
    r.verdict.diagonalizable_L3 = verdict.at("diagonalizable_L3").get<bool>();
    r.verdict.linearly_stable = verdict.at("linearly_stable").get<bool>();
    r.verdict.max_real_part = verdict.at("max_real_part").get<double>();
    r.verdict.evidence = verdict.at("evidence").get<std::string>();
    r.parity.verdict = parity_from_name(verdict.at("parity").at("verdict").get<std::string>());
    r.parity.morse_index = verdict.at("parity").at("morse_index").get<int>();
    r.parity.nullity = verdict.at("parity").at("nullity").get<int>();

    const Json& ids = j.at("identity_checks");
    const Json& ss = ids.at("sum_of_squares");
    r.sum_squares = {ss.at("spectral_sum").get<double>(), ss.at("trace_formula").get<double>(),
                     ss.at("rel_error").get<double>(), ss.at("first8_spectral").get<double>(),
                     ss.at("first8_formula").get<double>(),
                     ss.at("first8_rel_error").get<double>()};
    const Json& dp = ids.at("det_P");
    r.eigenpoly = {dp.at("leading_coeff").get<double>(), dp.at("second_coeff").get<double>(),
                   dp.at("expected_second").get<double>(), dp.at("rel_error").get<double>(),
                   dp.at("max_scaled_det").get<double>()};
    if (!ids.at("inequality").is_null()) {
        const Json& ineq = ids.at("inequality");
        InequalityReport rep;
        rep.verdict = ineq.at("verdict").get<std::string>() == "unstable_by_trace"
                          ? InequalityReport::Verdict::UnstableByTrace
                          : InequalityReport::Verdict::Inconclusive;
        rep.lhs = ineq.at("lhs").get<double>();
        rep.rhs = ineq.at("rhs").get<double>();
        rep.margin = ineq.at("margin").get<double>();
        rep.degeneracy_caveat = ineq.at("degeneracy_caveat").get<bool>();
        r.inequality = rep;
    }

    const Json& flow = j.at("spectral_flow");
    r.flow.interval_a = flow.at("interval")[0].get<double>();
    r.flow.interval_b = flow.at("interval")[1].get<double>();
    r.flow.endpoint_flow = flow.at("endpoint_flow").get<int>();
    r.flow.crossing_sum = flow.at("crossing_sum").get<int>();
    for (const auto& c : flow.at("crossings")) r.flow.crossings.push_back(crossing_from_json(c));
    for (const auto& k : flow.at("krein"))
        r.flow.krein.push_back(KreinReport{Complex(k.at("re").get<double>(),
                                                   k.at("im").get<double>()),
                                           k.at("space_dim").get<int>(),
                                           k.at("signature").get<int>()});
    return r;
}

std::string scan_alpha_csv(const ProblemInput& input, double alpha_from, double alpha_to,
                           int steps, unsigned seed) {
    const Json rows = scan_alpha_json(input, alpha_from, alpha_to, steps, seed);
    std::ostringstream out;
    out << "# schema: releq-scan-alpha-v1\n";
    out << "alpha,spectrally_stable,linearly_stable,degenerate,max_re_L3,"
           "inequality_fires,inequality_margin\n";
    for (const auto& row : rows) {
        out << row.at("alpha").get<double>() << ','
            << (row.at("spectrally_stable").get<bool>() ? 1 : 0) << ','
            << (row.at("linearly_stable").get<bool>() ? 1 : 0) << ','
            << (row.at("degenerate").get<bool>() ? 1 : 0) << ','
            << row.at("max_re_L3").get<double>() << ','
            << (row.at("inequality_fires").get<bool>() ? 1 : 0) << ','
            << row.at("inequality_margin").get<double>() << '\n';
    }
    return out.str();
}

Json scan_alpha_json(const ProblemInput& input, double alpha_from, double alpha_to, int steps,
                     unsigned seed) {
    if (steps < 1) throw InputError("alpha grid needs at least one step");
    if (!(alpha_from > 0.0 && alpha_to < 2.0 && alpha_from <= alpha_to))
        throw InputError("alpha grid bounds must satisfy 0 < A <= B < 2");
    if (input.spec && input.spec->is_log())
        throw InputError("alpha scan applies to the alpha-homogeneous family only");

    // Grid points are independent; run them on a small worker pool and
    // assemble rows by index, so the output order never depends on
    // completion order.
    std::vector<Json> rows(steps);
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= steps) return;
            try {
                const double alpha =
                    steps == 1 ? alpha_from
                               : alpha_from + (alpha_to - alpha_from) * k / double(steps - 1);
                ProblemInput point = input;
                point.spec = PotentialSpec::alpha_homogeneous(alpha);
                const AnalysisReport report = analyze_problem(point, seed);
                rows[k] =
                    {{"alpha", alpha},
                     {"spectrally_stable", report.verdict.spectrally_stable},
                     {"linearly_stable", report.verdict.linearly_stable},
                     {"degenerate", report.verdict.degenerate},
                     {"max_re_L3", report.verdict.max_real_part},
                     {"inequality_fires",
                      report.inequality && report.inequality->verdict ==
                                               InequalityReport::Verdict::UnstableByTrace},
                     {"inequality_margin", report.inequality ? report.inequality->margin : 0.0}};
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const unsigned pool = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(steps));
    std::vector<std::thread> threads;
    for (unsigned i = 0; i + 1 < pool; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    Json out = Json::array();
    for (auto& row : rows) out.push_back(std::move(row));
    return out;
}

}  // namespace releq
