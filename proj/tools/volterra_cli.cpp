// volterra: spectral theory and bi-Hamiltonian structure of the periodic
// Volterra lattice from the command line.
//
// Subcommands: gen | spectrum | invariants | verify | evolve | expand.
// Exit codes: 0 success / all checks pass, 1 check failure, 2 invalid input,
// 3 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "volterra/flows.hpp"
#include "volterra/invariants.hpp"
#include "volterra/json_io.hpp"
#include "volterra/lattice.hpp"
#include "volterra/poisson.hpp"
#include "volterra/spectral.hpp"
#include "volterra/verification.hpp"

namespace {

using nlohmann::json;
using namespace volterra;

json complex_pairs(const std::vector<Complex>& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back({z.real(), z.imag()});
    return out;
}

int cmd_spectrum(const std::string& in_path, const std::string& out_path) {
    PeriodicOperator op = load_operator(in_path);
    ToleranceConfig tol;
    DeltaPolynomial delta = delta_from_monodromy(op, tol);
    SpectralCurve curve = spectral_curve(delta, tol);
    DivisorData div = dirichlet_spectrum(op, tol);
    json doc;
    doc["I"] = delta.I;
    doc["branch_points_plus"] = complex_pairs(curve.branch_plus);
    doc["branch_points_minus"] = complex_pairs(curve.branch_minus);
    doc["nonsingular"] = curve.nonsingular;
    doc["dirichlet"] = div.lambda;
    if (curve.nonsingular) {
        DivisorData resolved = resolve_divisor_sheets(op, delta, div, tol);
        json rho = json::array();
        for (double r : resolved.rho) rho.push_back({r, 0.0});
        doc["rho"] = rho;
        doc["sheet"] = resolved.sheet;
    } else {
        doc["rho"] = json::array();
        doc["sheet"] = json::array();
    }
    std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        if (!f) raise(Errc::bad_file, "cannot write " + out_path);
        f << text;
    }
    return 0;
}

int cmd_invariants(const std::string& in_path, int order) {
    PeriodicOperator op = load_operator(in_path);
    ToleranceConfig tol;
    int n = op.gaps();
    if (order < 0) order = n;
    DeltaPolynomial delta = delta_combinatorial(op);
    InvariantSet inv = invariant_set(op);
    json doc;
    doc["J"] = inv.J;
    std::vector<double> j_from(static_cast<std::size_t>(n) + 1);
    j_from[0] = -std::log(delta.I[0]);  // the annulator fixes J_0
    for (int k = 1; k <= n; ++k) j_from[static_cast<std::size_t>(k)] = j_from_i(delta, k);
    doc["J_from_I"] = j_from;
    doc["lnDelta_coeffs"] = expand_log_delta(delta, order).coeffs;
    doc["lnRho_coeffs"] = expand_log_rho(op, delta, order, tol).coeffs;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::string& in_path, const std::string& suite_name, double tol_scale,
               std::uint64_t seed) {
    PeriodicOperator op = load_operator(in_path);
    std::vector<CheckReport> reports = run_suite(op, suite_from_name(suite_name), seed, tol_scale);
    bool ok = true;
    for (const auto& r : reports) {
        json line;
        line["name"] = r.name;
        line["max_residual"] = r.max_residual;
        line["tolerance"] = r.tolerance;
        line["pass"] = r.pass;
        std::cout << line.dump() << "\n";
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

int cmd_evolve(const std::string& in_path, int flow, double t_end, const std::string& out_path) {
    PeriodicOperator op = load_operator(in_path);
    Trajectory traj = integrate(op, flow, t_end);
    std::ofstream f(out_path);
    if (!f) raise(Errc::bad_file, "cannot write " + out_path);
    f << "t";
    for (int i = 1; i <= op.period(); ++i) f << ",c_" << i;
    f << "\n";
    for (std::size_t s = 0; s < traj.t.size(); ++s) {
        f << format_double(traj.t[s]);
        for (double v : traj.states[s]) f << "," << format_double(v);
        f << "\n";
    }
    ConservationReport rep = conservation_report(traj);
    json doc;
    doc["flow"] = traj.flow;
    doc["steps"] = traj.steps;
    doc["endpoint_error_estimate"] = traj.endpoint_error_estimate;
    doc["i_drift"] = rep.i_drift;
    doc["j_drift"] = rep.j_drift;
    doc["delta_at_probe_drift"] = rep.delta_at_probe_drift;
    doc["dirichlet_drift"] = rep.dirichlet_drift;  // informational, not conserved
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_expand(const std::string& in_path, int order) {
    PeriodicOperator op = load_operator(in_path);
    ToleranceConfig tol;
    int n = op.gaps();
    if (order < 0) order = n;
    DeltaPolynomial delta = delta_combinatorial(op);
    SeriesExpansion logd = expand_log_delta(delta, order);
    SeriesExpansion logr = expand_log_rho(op, delta, order, tol);
    json doc;
    doc["order"] = order;
    doc["lnDelta_log_coeff"] = logd.log_coefficient;
    doc["lnDelta_coeffs"] = logd.coeffs;
    doc["lnRho_log_coeff"] = logr.log_coefficient;
    doc["lnRho_coeffs"] = logr.coeffs;
    doc["lnRho_fit_error_estimate"] = logr.fit_error_estimate;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic Volterra lattice: spectra, invariants, brackets, flows"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "write a seeded random operator file");
    int gen_n = 2;
    std::uint64_t gen_seed = 1;
    double gen_lo = 0.5, gen_hi = 2.0;
    std::string gen_out;
    gen->add_option("--N", gen_n, "number of gaps (period T = 2N+1)")->required();
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--lo", gen_lo, "lower weight bound");
    gen->add_option("--hi", gen_hi, "upper weight bound");
    gen->add_option("--out", gen_out, "output operator file")->required();

    auto* spectrum = app.add_subcommand("spectrum", "discriminant, curve, divisor report");
    std::string sp_in, sp_out;
    spectrum->add_option("--in", sp_in, "operator file")->required();
    spectrum->add_option("--out", sp_out, "output file (stdout if omitted)");

    auto* invariants = app.add_subcommand("invariants", "trace invariants and expansions");
    std::string inv_in;
    int inv_order = -1;
    invariants->add_option("--in", inv_in, "operator file")->required();
    invariants->add_option("--order", inv_order, "expansion order (default N)");

    auto* verify = app.add_subcommand("verify", "run property suites, one JSON line per check");
    std::string ver_in, ver_suite = "all";
    double ver_tol = 1.0;
    std::uint64_t ver_seed = 12345;
    verify->add_option("--in", ver_in, "operator file")->required();
    verify->add_option("--suite", ver_suite, "all|spectral|poisson|flows|theorem");
    verify->add_option("--tol", ver_tol, "multiplier on every check tolerance");
    verify->add_option("--seed", ver_seed, "seed for randomized test gradients");

    auto* evolve = app.add_subcommand("evolve", "integrate a flow, write a CSV trajectory");
    std::string ev_in, ev_out;
    int ev_flow = 1;
    double ev_tend = 1.0;
    evolve->add_option("--in", ev_in, "operator file")->required();
    evolve->add_option("--flow", ev_flow, "flow index k");
    evolve->add_option("--t-end", ev_tend, "integration time")->required();
    evolve->add_option("--out", ev_out, "CSV output path")->required();

    auto* expand = app.add_subcommand("expand", "log-discriminant / log-multiplier coefficient tables");
    std::string ex_in;
    int ex_order = -1;
    expand->add_option("--in", ex_in, "operator file")->required();
    expand->add_option("--order", ex_order, "expansion order (default N)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            volterra::PeriodicOperator op = volterra::random_operator(gen_n, gen_seed, gen_lo, gen_hi);
            volterra::save_operator(op, gen_out);
            return 0;
        }
        if (spectrum->parsed()) return cmd_spectrum(sp_in, sp_out);
        if (invariants->parsed()) return cmd_invariants(inv_in, inv_order);
        if (verify->parsed()) return cmd_verify(ver_in, ver_suite, ver_tol, ver_seed);
        if (evolve->parsed()) return cmd_evolve(ev_in, ev_flow, ev_tend, ev_out);
        if (expand->parsed()) return cmd_expand(ex_in, ex_order);
    } catch (const volterra::Error& e) {
        nlohmann::json diag;
        diag["error"] = volterra::errc_name(e.code());
        diag["detail"] = e.what();
        std::cerr << diag.dump() << "\n";
        return volterra::is_input_error(e.code()) ? 2 : 3;
    } catch (const std::exception& e) {
        nlohmann::json diag;
        diag["error"] = "Unexpected";
        diag["detail"] = e.what();
        std::cerr << diag.dump() << "\n";
        return 3;
    }
    return 0;
}
