// Command-line driver: one subcommand per pipeline stage, one JSON config
// format for all of them. Outputs are CSV/JSON stamped with the tool version
// and a hash of the config file, so identical config + version means
// byte-identical files.
//
// Exit codes: 0 success, 2 config validation, 3 numerical failure,
// 4 verification failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "adiawkb/actions.hpp"
#include "adiawkb/band.hpp"
#include "adiawkb/bloch.hpp"
#include "adiawkb/cocycle.hpp"
#include "adiawkb/errors.hpp"
#include "adiawkb/io.hpp"
#include "adiawkb/momentum.hpp"
#include "adiawkb/monodromy.hpp"
#include "adiawkb/potential.hpp"
#include "adiawkb/quasimomentum.hpp"
#include "adiawkb/spectrum.hpp"
#include "adiawkb/transfer.hpp"
#include "adiawkb/version.hpp"

namespace {

using namespace adiawkb;
using nlohmann::json;

struct RunConfig {
    PeriodicPotential potential;
    double e_max = 60.0;
    double energy = 0.0;
    bool has_energy = false;
    double window_delta = 0.05;
    double epsilon = 0.0;
    bool has_epsilon = false;
    Approximant approximant;
    bool has_approximant = false;

    int band_scan_intervals = 2000;
    double oracle_energy_step = 2e-4;
    int certificate_grid = 4096;
    int phase_count = 8;
    int gap_scan_points = 16;
    int cocycle_steps = 100000;
    double cocycle_phi0 = 0.0;
    int monodromy_phi_samples = 16;
    double stokes_max_arc = 6.0;
    double verify_tolerance_scale = 1.0;
    std::vector<std::string> verify_checks; // empty = all
    unsigned long long seed = 7;
    std::string output_dir = "out";

    std::string config_hash;

    double effective_epsilon() const {
        if (has_epsilon) return epsilon;
        if (has_approximant) return approximant.epsilon();
        throw ValidationError("config: epsilon (or approximant) required");
    }
};

void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError("config: unknown key '" +
                                  (path.empty() ? key : path + "." + key) + "'");
    }
}

RunConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("config: cannot open " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }

    check_keys(j, "", {"potential", "e_max", "energy", "window_delta", "epsilon",
                       "approximant", "tolerances", "grids", "cocycle",
                       "monodromy", "stokes", "verify", "seed", "output_dir"});

    RunConfig c;
    c.config_hash = hash_hex(text);

    if (j.contains("potential")) {
        check_keys(j["potential"], "potential", {"cosine_coeffs", "sine_coeffs"});
        std::vector<double> cc, sc;
        if (j["potential"].contains("cosine_coeffs"))
            cc = j["potential"]["cosine_coeffs"].get<std::vector<double>>();
        if (j["potential"].contains("sine_coeffs"))
            sc = j["potential"]["sine_coeffs"].get<std::vector<double>>();
        c.potential = PeriodicPotential(cc, sc);
    }
    if (j.contains("e_max")) c.e_max = j["e_max"].get<double>();
    if (j.contains("energy")) {
        c.energy = j["energy"].get<double>();
        c.has_energy = true;
    }
    if (j.contains("window_delta")) c.window_delta = j["window_delta"].get<double>();
    if (j.contains("epsilon")) {
        c.epsilon = j["epsilon"].get<double>();
        c.has_epsilon = true;
        if (c.epsilon <= 0.0) throw ValidationError("config: epsilon must be > 0");
    }
    if (j.contains("approximant")) {
        check_keys(j["approximant"], "approximant", {"N", "p", "q"});
        c.approximant.N = j["approximant"].value("N", 0);
        c.approximant.p = j["approximant"].value("p", 0);
        c.approximant.q = j["approximant"].value("q", 1);
        c.has_approximant = true;
    }
    if (j.contains("tolerances")) {
        check_keys(j["tolerances"], "tolerances", {"band_scan_intervals"});
        c.band_scan_intervals = j["tolerances"].value("band_scan_intervals", 2000);
        if (c.band_scan_intervals < 64)
            throw ValidationError("config: tolerances.band_scan_intervals < 64");
    }
    if (j.contains("grids")) {
        check_keys(j["grids"], "grids",
                   {"oracle_energy_step", "certificate", "phases", "gap_scan"});
        c.oracle_energy_step = j["grids"].value("oracle_energy_step", 2e-4);
        c.certificate_grid = j["grids"].value("certificate", 4096);
        c.phase_count = j["grids"].value("phases", 8);
        c.gap_scan_points = j["grids"].value("gap_scan", 16);
        if (c.oracle_energy_step <= 0.0)
            throw ValidationError("config: grids.oracle_energy_step must be > 0");
    }
    if (j.contains("cocycle")) {
        check_keys(j["cocycle"], "cocycle", {"steps", "phi0"});
        c.cocycle_steps = j["cocycle"].value("steps", 100000);
        c.cocycle_phi0 = j["cocycle"].value("phi0", 0.0);
    }
    if (j.contains("monodromy")) {
        check_keys(j["monodromy"], "monodromy", {"phi_samples"});
        c.monodromy_phi_samples = j["monodromy"].value("phi_samples", 16);
    }
    if (j.contains("stokes")) {
        check_keys(j["stokes"], "stokes", {"max_arc"});
        c.stokes_max_arc = j["stokes"].value("max_arc", 6.0);
    }
    if (j.contains("verify")) {
        check_keys(j["verify"], "verify", {"tolerance_scale", "checks"});
        c.verify_tolerance_scale = j["verify"].value("tolerance_scale", 1.0);
        if (j["verify"].contains("checks"))
            c.verify_checks = j["verify"]["checks"].get<std::vector<std::string>>();
        if (c.verify_tolerance_scale <= 0.0)
            throw ValidationError("config: verify.tolerance_scale must be > 0");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<unsigned long long>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    return c;
}

std::string out_path(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.output_dir);
    return (std::filesystem::path(c.output_dir) / name).string();
}

void write_json(const RunConfig& c, const std::string& name, json j) {
    j["tool_version"] = version_string;
    j["config_hash"] = c.config_hash;
    write_text_file(out_path(c, name), j.dump(2) + "\n");
}

// --- stages -------------------------------------------------------------

BandStructure stage_bands(const RunConfig& c, bool emit) {
    const BandStructure bs =
        band_edges(c.potential, c.e_max, c.band_scan_intervals);
    if (emit) {
        CsvBuilder csv({"index", "E_lower", "E_upper", "degenerate_flag"});
        csv.set_stamp(c.config_hash);
        for (int n = 1; n <= bs.band_count(); ++n) {
            const bool degenerate =
                2 * n < static_cast<int>(bs.edge_count()) &&
                bs.edges()[2 * n - 1].degenerate;
            csv.add_row(std::vector<std::string>{
                std::to_string(n), double_str(bs.band_lower(n)),
                double_str(bs.band_upper(n)), degenerate ? "1" : "0"});
        }
        csv.write(out_path(c, "bands.csv"));
        write_text_file(out_path(c, "potential.json"), c.potential.to_json() + "\n");
    }
    return bs;
}

double require_energy(const RunConfig& c) {
    if (!c.has_energy) throw ValidationError("config: this stage needs 'energy'");
    return c.energy;
}

int stage_momentum(const RunConfig& c) {
    const BandStructure bs = stage_bands(c, false);
    MomentumContext ctx(c.potential, bs, require_energy(c));
    const BranchPoints bp = ctx.branch_points(12);

    CsvBuilder bpc({"re", "im", "edge_index"});
    bpc.set_stamp(c.config_hash);
    bpc.add_row(std::vector<std::string>{double_str(bp.phi1), "0", "1"});
    for (std::size_t i = 0; i < bp.phi_upper.size(); ++i)
        bpc.add_row(std::vector<std::string>{double_str(bp.phi_upper[i].real()),
                                             double_str(bp.phi_upper[i].imag()),
                                             std::to_string(i + 2)});
    bpc.write(out_path(c, "branch_points.csv"));

    const auto lines =
        ctx.stokes_lines(Complex(bp.phi1, 0.0), c.stokes_max_arc);
    CsvBuilder sc({"re", "im", "line_id"});
    sc.set_stamp(c.config_hash);
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (const Complex& p : lines[i].points)
            sc.add_row(std::vector<std::string>{double_str(p.real()),
                                                double_str(p.imag()),
                                                std::to_string(i)});
    sc.write(out_path(c, "stokes.csv"));

    json j;
    j["phi1"] = bp.phi1;
    j["stokes_lines"] = lines.size();
    for (const auto& l : lines) j["finite_flags"].push_back(l.finite);
    write_json(c, "momentum.json", j);
    return 0;
}

ActionSet stage_actions(const RunConfig& c, bool emit) {
    const BandStructure bs = stage_bands(c, false);
    MomentumContext ctx(c.potential, bs, require_energy(c));
    const ActionSet a = compute_actions(ctx, c.effective_epsilon(),
                                        c.window_delta, /*with_prefactors=*/true);
    if (emit) {
        json j = json::parse(a.to_json());
        write_json(c, "actions.json", j);
    }
    return a;
}

int stage_monodromy(const RunConfig& c) {
    const ActionSet a = stage_actions(c, false);
    const MonodromyModel m = assemble_model(a);
    write_json(c, "monodromy_model.json", json::parse(m.to_json()));

    CsvBuilder csv({"phi", "m11", "m12", "m21", "m22"});
    csv.set_stamp(c.config_hash);
    for (int i = 0; i < c.monodromy_phi_samples; ++i) {
        const double phi = static_cast<double>(i) / c.monodromy_phi_samples;
        const Mat2 M =
            exact_monodromy(c.potential, c.energy, c.effective_epsilon(), phi);
        csv.add_row(std::vector<double>{phi, M.a11.real(), M.a12.real(),
                                        M.a21.real(), M.a22.real()});
    }
    csv.write(out_path(c, "exact_monodromy.csv"));
    return 0;
}

int stage_cocycle(const RunConfig& c) {
    const ActionSet a = stage_actions(c, false);
    const MonodromyModel m = assemble_model(a);
    const double h = std::fmod(2.0 * pi / c.effective_epsilon(), 1.0);
    MatrixCocycle mc{[&m](double phi) { return m.eval(phi); }, h};

    const IterationResult it = iterate(mc, c.cocycle_phi0, c.cocycle_steps);
    CsvBuilder csv({"step", "log_norm_increment"});
    csv.set_stamp(c.config_hash);
    const int stride = std::max(1, c.cocycle_steps / 10000);
    for (std::size_t i = 0; i < it.log_norm_increments.size(); i += stride)
        csv.add_row(std::vector<std::string>{
            std::to_string(i), double_str(it.log_norm_increments[i])});
    csv.write(out_path(c, "trajectory.csv"));

    const LyapunovEstimate le = lyapunov(mc, c.cocycle_phi0, c.cocycle_steps, c.seed);
    const GapCertificate gc = gap_certificate(mc.M, h, c.certificate_grid);
    json j;
    j["lyapunov"] = le.value;
    j["lyapunov_stderr"] = le.stderr_est;
    j["n_steps"] = le.n_steps;
    j["certificate"] = json::parse(gc.to_json());
    j["h"] = h;
    write_json(c, "cocycle.json", j);
    return 0;
}

struct PredictArtifacts {
    SpectralPrediction pred;
    OracleSpectrum oracle;
    ComparisonReport report;
    std::vector<GapScanEntry> midpoint_scan;
};

PredictArtifacts run_predict(const RunConfig& c) {
    const BandStructure bs = stage_bands(c, false);
    const double eps = c.effective_epsilon();
    const EnergyWindow w = energy_window(bs, c.window_delta);
    const auto roots = find_quantization_energies(c.potential, bs, eps,
                                                  c.window_delta);
    std::vector<ActionSet> acts;
    for (const auto& [l, E] : roots) {
        MomentumContext ctx(c.potential, bs, E);
        acts.push_back(
            compute_actions(ctx, eps, c.window_delta, /*with_prefactors=*/false));
    }
    PredictArtifacts out;
    out.pred = predicted_intervals(roots, acts, w);

    Approximant ap = c.approximant;
    if (!c.has_approximant) {
        ap.N = static_cast<int>(std::lround(2.0 * pi / eps));
        ap.p = 0;
        ap.q = 1;
    }
    const int n = static_cast<int>((w.hi - w.lo) / c.oracle_energy_step) + 2;
    out.oracle = oracle_spectrum(c.potential, ap, default_phases(c.phase_count, ap.q),
                                 uniform_grid(w.lo, w.hi, n));
    out.report = compare(out.pred, out.oracle, 0.2 * eps);

    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < out.pred.entries.size(); ++i)
        mids.push_back(0.5 * (out.pred.entries[i].center +
                              out.pred.entries[i + 1].center));
    out.midpoint_scan =
        gap_scan(c.potential, bs, eps, c.window_delta, mids, c.certificate_grid);
    return out;
}

int stage_predict(const RunConfig& c) {
    const PredictArtifacts art = run_predict(c);

    CsvBuilder csv({"l", "center", "lo", "hi", "width", "lambda_l", "F_l", "t",
                    "t1", "phi1_prime"});
    csv.set_stamp(c.config_hash);
    for (const auto& e : art.pred.entries)
        csv.add_row(std::vector<double>{static_cast<double>(e.l), e.center, e.lo,
                                        e.hi, e.width, e.lambda_l, e.F_l, e.t,
                                        e.t1, e.phi1_prime});
    csv.write(out_path(c, "prediction.csv"));

    CsvBuilder ocsv({"band_lo", "band_hi"});
    ocsv.set_stamp(c.config_hash);
    for (const auto& b : art.oracle.bands)
        ocsv.add_row(std::vector<double>{b.first, b.second});
    ocsv.write(out_path(c, "oracle_bands.csv"));

    json j;
    j["prediction"] = json::parse(art.pred.to_json());
    j["oracle"] = json::parse(art.oracle.to_json());
    j["comparison"] = json::parse(art.report.to_json());
    json mids = json::array();
    for (const auto& s : art.midpoint_scan) {
        json e;
        e["E"] = s.E;
        e["certificate"] = json::parse(s.cert.to_json());
        mids.push_back(e);
    }
    j["midpoint_certificates"] = mids;
    write_json(c, "prediction.json", j);
    return 0;
}

// --- verify --------------------------------------------------------------

struct VerifyOutcome {
    json report = json::array();
    int failures = 0;

    void add(const std::string& name, bool pass, double value, double bound) {
        json e;
        e["check"] = name;
        e["pass"] = pass;
        e["value"] = value;
        e["bound"] = bound;
        report.push_back(e);
        if (!pass) ++failures;
        std::printf("[%s] %-38s value=%.3e bound=%.3e\n", pass ? "PASS" : "FAIL",
                    name.c_str(), value, bound);
    }
};

int stage_verify(const RunConfig& c) {
    const double scale = c.verify_tolerance_scale;
    auto enabled = [&](const std::string& name) {
        return c.verify_checks.empty() ||
               std::find(c.verify_checks.begin(), c.verify_checks.end(), name) !=
                   c.verify_checks.end();
    };
    VerifyOutcome out;
    const BandStructure bs = stage_bands(c, false);
    const double eps = c.effective_epsilon();
    const EnergyWindow w = energy_window(bs, c.window_delta);
    const double e_probe =
        c.has_energy ? c.energy : 0.5 * (w.lo + w.hi);

    if (enabled("hill")) {
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double E = w.lo + (w.hi - w.lo) * (i + 0.5) / 5.0 + 1.0;
            worst = std::max(worst,
                             transfer_over_period(c.potential, Complex(E)).det_defect());
        }
        out.add("transfer_det_unit", worst <= 1e-9 * scale, worst, 1e-9 * scale);

        double worst21 = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double E = bs.edge(1) + (bs.edge(2) - bs.edge(1)) * (i + 0.5) / 4.0;
            for (double x : {0.3, 1.0})
                worst21 = std::max(worst21, period_integral_residual(c.potential, bs,
                                                             Complex(E), x));
        }
        out.add("period_integral_residual", worst21 <= 1e-6 * scale, worst21, 1e-6 * scale);
    }
    if (enabled("momentum")) {
        MomentumContext ctx(c.potential, bs, e_probe);
        double worst = 0.0;
        for (int i = 0; i < 12; ++i) {
            const Complex phi(0.15 + 0.4 * (i % 4), 0.25 + 0.3 * (i / 4));
            const Complex kp = ctx.kappa(MomentumBranchTag::kappa0, phi);
            const Complex km = ctx.kappa(MomentumBranchTag::kappa0, -phi);
            const Complex kc = ctx.kappa(MomentumBranchTag::kappa0, std::conj(phi));
            worst = std::max(worst, std::abs(kp - km));
            worst = std::max(worst, std::abs(kc + std::conj(kp)));
        }
        out.add("kappa_symmetries", worst <= 1e-8 * scale, worst, 1e-8 * scale);
    }
    if (enabled("actions")) {
        MomentumContext ctx(c.potential, bs, e_probe);
        const Phi2Result p2 = phi2_correction(ctx, eps);
        out.add("phi2_realness", p2.imag_residual <= 1e-6 * scale,
                p2.imag_residual, 1e-6 * scale);
        const double lt_a = tunneling_t_exponent(ctx, eps, QuadRoute::adaptive);
        const double lt_g = tunneling_t_exponent(ctx, eps, QuadRoute::fixed_gl);
        out.add("t_dual_quadrature", std::abs(lt_a - lt_g) <= 1e-9 * scale,
                std::abs(lt_a - lt_g), 1e-9 * scale);
        const double mid = 0.5 * (ctx.branch_points(1).phi1 + pi);
        const double gr = gauge_identity_residual(ctx, Complex(mid));
        out.add("gauge_identity", gr <= 1e-5 * scale, gr, 1e-5 * scale);
    }
    if (enabled("monodromy")) {
        MomentumContext ctx(c.potential, bs, e_probe);
        const ActionSet a = compute_actions(ctx, eps, c.window_delta, false);
        const MonodromyModel m = assemble_model(a);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double z = 2.0 * pi * i / 100.0 + 0.05;
            worst = std::max(worst,
                             std::abs(m.inner_det(z) - (1.0 - a.t1 * a.t1)));
        }
        out.add("model_det_identity", worst <= 1e-12 * scale, worst, 1e-12 * scale);
        const Mat2 M = exact_monodromy(c.potential, e_probe, eps, 0.25);
        const Mat2 M2 = exact_monodromy(c.potential, e_probe, eps, 1.25);
        const double dd = std::abs(M.det() - 1.0);
        const double pp = frobenius_distance(M, M2);
        out.add("exact_monodromy_det", dd <= 1e-8 * scale, dd, 1e-8 * scale);
        out.add("exact_monodromy_periodic", pp <= 1e-8 * scale, pp, 1e-8 * scale);
    }
    if (enabled("cocycle")) {
        MatrixCocycle cc{[](double) { return Mat2{2.0, 1.0, 1.0, 1.0}; }, 0.5};
        const LyapunovEstimate le = lyapunov(cc, 0.0, 100000, c.seed);
        const GapCertificate gc = gap_certificate(cc.M, cc.h, 512);
        const double expect = std::log(0.5 * (3.0 + std::sqrt(5.0)));
        const double lydev = std::abs(le.value - expect);
        out.add("const_cocycle_lyapunov", lydev <= 3.0 * le.stderr_est, lydev,
                3.0 * le.stderr_est);
        const bool in_bounds =
            gc.holds && le.value >= gc.theta_lower - 0.05 * scale &&
            le.value <= gc.theta_upper + 0.05 * scale;
        out.add("certificate_lyapunov_consistency", in_bounds,
                le.value - gc.theta_lower, 0.05 * scale);
    }
    if (enabled("predict")) {
        const PredictArtifacts art = run_predict(c);
        const bool ok = !art.report.inconclusive &&
                        art.report.containment_fraction >= 0.95;
        out.add("prediction_containment", ok, art.report.containment_fraction,
                0.95);
        int held = 0;
        for (const auto& s : art.midpoint_scan) held += s.cert.holds;
        out.add("midpoint_certificates",
                held == static_cast<int>(art.midpoint_scan.size()),
                static_cast<double>(held),
                static_cast<double>(art.midpoint_scan.size()));
        out.add("spacing_ratio", art.report.spacing_ratio <= 3.0,
                art.report.spacing_ratio, 3.0);
    }

    json j;
    j["checks"] = out.report;
    j["failures"] = out.failures;
    write_json(c, "verify.json", j);
    return out.failures == 0 ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adiabatic quasi-periodic Schrodinger pipeline"};
    app.set_version_flag("--version", adiawkb::version_string);
    app.require_subcommand(1);

    std::string config_file;
    std::string output_override;
    for (const char* name : {"bands", "momentum", "actions", "monodromy",
                             "cocycle", "predict", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_file, "JSON config file")->required();
        sub->add_option("--out", output_override, "override output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(config_file);
        if (!output_override.empty()) cfg.output_dir = output_override;
        if (cmd == "bands") {
            stage_bands(cfg, true);
            return 0;
        }
        if (cmd == "momentum") return stage_momentum(cfg);
        if (cmd == "actions") {
            stage_actions(cfg, true);
            return 0;
        }
        if (cmd == "monodromy") return stage_monodromy(cfg);
        if (cmd == "cocycle") return stage_cocycle(cfg);
        if (cmd == "predict") return stage_predict(cfg);
        if (cmd == "verify") return stage_verify(cfg);
        std::cerr << "unknown subcommand\n";
        return 2;
    } catch (const adiawkb::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const adiawkb::WindowViolationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const adiawkb::Error& e) {
        std::cerr << "numerical error (" << cmd << "): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
