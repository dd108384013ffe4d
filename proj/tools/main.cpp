#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aplab/errors.hpp"
#include "aplab/experiments.hpp"
#include "aplab/oracle1d.hpp"
#include "aplab/operators.hpp"
#include "aplab/scenario.hpp"

namespace {

int cmd_solve(const std::string& scenario_path, const std::string& out_dir) {
    const nlohmann::json report = aplab::run_scenario_file(scenario_path, out_dir);
    const std::string name = report["name"].get<std::string>();
    const std::string report_path = out_dir + "/" + name + "/report.json";
    if (report["solve"].contains("error_code")) {
        std::cerr << "solve failed (" << report["solve"]["error_code"].get<std::string>()
                  << "): " << report["solve"]["message"].get<std::string>() << "\n";
        std::cout << "report: " << report_path << "\n";
        return 1;
    }
    std::cout << name << ": " << report["solve"]["sweeps"] << " sweeps, residual "
              << report["solve"]["final_residual"] << ", complementarity gap "
              << report["solve"]["complementarity_gap"] << "\n";
    std::cout << "report: " << report_path << "\n";
    return 0;
}

int cmd_suite(const std::string& manifest, const std::string& out_dir) {
    const aplab::SuiteResult suite = aplab::run_suite(manifest, out_dir);
    for (const auto& row : suite.summary["scenarios"])
        std::cout << "scenario " << row["name"].get<std::string>() << ": "
                  << row["status"].get<std::string>() << "\n";
    for (const auto& row : suite.summary["assertions"])
        std::cout << "[" << row["status"].get<std::string>() << "] "
                  << row["expr"].get<std::string>() << " (measured "
                  << row["measured"].get<std::string>() << ")\n";
    std::cout << (suite.all_passed ? "suite passed" : "suite FAILED") << "\n";
    std::cout << "summary: " << out_dir << "/summary.json\n";
    return suite.all_passed ? 0 : 1;
}

int cmd_oracle_profile(double gamma, int n, double length, double terminal) {
    const aplab::ApParams params(gamma);
    if (terminal < 0.0) terminal = aplab::profile_eval(params, length);
    const aplab::ScalarField u = aplab::shoot(params, length, terminal, 1e-12, n);
    std::printf("x,u\n");
    for (long id = 0; id < u.grid->num_nodes(); ++id)
        std::printf("%.17g,%.17g\n", u.grid->coord(id)[0], u[id]);
    return 0;
}

int cmd_plot(const std::string& report_path, const std::string& out_dir) {
    std::ifstream in(report_path);
    if (!in) throw aplab::IoError("cannot open report: " + report_path);
    const nlohmann::json report = nlohmann::json::parse(in);
    const auto paths = aplab::render_plots(report, out_dir);
    for (const auto& p : paths) std::cout << p << "\n";
    if (paths.empty()) std::cout << "no plottable tables in this report\n";
    return 0;
}

int cmd_check_operator(const std::string& name, double theta, std::vector<double> diag,
                       double rescale_r, double gamma, int dim, int samples, unsigned seed) {
    aplab::OperatorSpec spec = aplab::OperatorSpec::laplacian();
    if (name == "laplacian") {
        // default
    } else if (name == "perturbed_trace") {
        spec = aplab::OperatorSpec::perturbed_trace(theta);
    } else if (name == "linear_trace") {
        if (diag.empty()) diag.assign(static_cast<std::size_t>(dim), 1.0);
        if (diag.size() != static_cast<std::size_t>(dim))
            throw aplab::ParameterError("--diag needs one entry per dimension");
        spec = aplab::OperatorSpec::linear_trace(aplab::SymMat::diag(dim, diag.data()));
    } else {
        throw aplab::ParameterError("unknown operator '" + name +
                                    "' (use laplacian, linear_trace, or perturbed_trace)");
    }
    if (rescale_r > 0.0)
        spec = aplab::rescaled_operator(spec, rescale_r, aplab::ApParams(gamma));

    const aplab::EllipticityReport rep = aplab::ellipticity_report(spec, samples, seed, dim);
    std::printf("operator:             %s\n", spec.name().c_str());
    std::printf("samples:              %d (seed %u, dim %d)\n", rep.n_samples, rep.seed, rep.dim);
    std::printf("declared lambda:      %.12g\n", spec.declared_lambda());
    std::printf("measured lambda:      %.12g\n", rep.measured_lambda);
    std::printf("convexity violations: %ld\n", rep.convexity_violations);
    std::printf("trace-gradient error: %.3e\n", rep.trace_gradient_error);
    const bool ok = rep.convexity_violations == 0 && rep.trace_gradient_error <= 1e-6 &&
                    rep.measured_lambda <= spec.declared_lambda() * (1.0 + 1e-9);
    std::printf("%s\n", ok ? "OK" : "FAILED");
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free-boundary laboratory for the nonlinear Alt-Phillips problem"};
    app.require_subcommand(1);

    std::string scenario_path, manifest_path, report_path;
    std::string out_dir = "out";
    double gamma = 1.5, length = 1.0, terminal = -1.0, theta = 0.0, rescale_r = 0.0;
    int n_cells = 1024, dim = 2, samples = 1000;
    unsigned seed = 7;
    std::vector<double> diag;
    std::string op_name;

    CLI::App* solve = app.add_subcommand("solve", "Run one scenario and write its artifacts");
    solve->add_option("scenario", scenario_path, "scenario config file")->required();
    solve->add_option("-o,--out", out_dir, "output directory");

    CLI::App* suite = app.add_subcommand("suite", "Run a manifest of scenarios and assertions");
    suite->add_option("manifest", manifest_path, "suite manifest file")->required();
    suite->add_option("-o,--out", out_dir, "output directory");

    CLI::App* oracle = app.add_subcommand("oracle", "Reference 1D solutions");
    CLI::App* oracle_profile =
        oracle->add_subcommand("profile", "Print the two-point 1D solution as CSV");
    oracle_profile->add_option("--gamma", gamma, "exponent in (1,2)");
    oracle_profile->add_option("--n", n_cells, "number of cells");
    oracle_profile->add_option("--length", length, "interval length");
    oracle_profile->add_option("--terminal", terminal,
                               "right-end value (default: exact profile value)");
    oracle->require_subcommand(1);

    CLI::App* plot = app.add_subcommand("plot", "Re-render the SVG plots of a report");
    plot->add_option("report", report_path, "report.json path")->required();
    plot->add_option("-o,--out", out_dir, "output directory");

    CLI::App* check = app.add_subcommand("check-operator", "Audit an operator's ellipticity");
    check->add_option("name", op_name, "laplacian | linear_trace | perturbed_trace")->required();
    check->add_option("--theta", theta, "perturbed_trace strength");
    check->add_option("--diag", diag, "linear_trace diagonal entries")->delimiter(',');
    check->add_option("--rescale-r", rescale_r, "wrap in the rescaled family at radius r");
    check->add_option("--gamma", gamma, "exponent used by the rescaling");
    check->add_option("--dim", dim, "matrix dimension");
    check->add_option("--samples", samples, "sample count");
    check->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return cmd_solve(scenario_path, out_dir);
        if (suite->parsed()) return cmd_suite(manifest_path, out_dir);
        if (oracle->parsed()) return cmd_oracle_profile(gamma, n_cells, length, terminal);
        if (plot->parsed()) return cmd_plot(report_path, out_dir);
        if (check->parsed())
            return cmd_check_operator(op_name, theta, diag, rescale_r, gamma, dim, samples, seed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const aplab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
