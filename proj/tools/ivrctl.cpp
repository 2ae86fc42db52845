// ivrctl: command-line driver for the OCS IVR control model.

#include "ivr/classical.hpp"
#include "ivr/config.hpp"
#include "ivr/control.hpp"
#include "ivr/dynamics.hpp"
#include "ivr/errors.hpp"
#include "ivr/feshbach.hpp"
#include "ivr/io.hpp"
#include "ivr/pipeline.hpp"
#include "ivr/reference.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using ivr::Vec;
using nlohmann::json;

namespace {

struct Globals
{
    std::string config;
    std::string out = "out";
    long seed = -1;
    int threads = 0;
    std::vector<std::string> sets;
    bool no_cache = false;
};

class Timer
{
public:
    double lap()
    {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string out_path(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

std::string cache_dir(const Globals& g) { return g.no_cache ? std::string{} : out_path(g, "cache"); }

// "100", "100fs", "1.5ps"
std::string parse_time(const std::string& s)
{
    if (s.size() > 2 && s.substr(s.size() - 2) == "ps")
        return ivr::format_number(std::stod(s.substr(0, s.size() - 2)) * 1000.0);
    if (s.size() > 2 && s.substr(s.size() - 2) == "fs")
        return s.substr(0, s.size() - 2);
    return s;
}

ivr::RunConfig resolve(const Globals& g, std::vector<std::string> extra)
{
    std::vector<std::string> all = g.sets;
    all.insert(all.end(), extra.begin(), extra.end());
    if (g.seed >= 0)
        all.push_back("run.seed=" + std::to_string(g.seed));
    if (g.threads > 0)
        all.push_back("run.threads=" + std::to_string(g.threads));
    ivr::RunConfig cfg = ivr::load_config(g.config, all);
    ivr::ensure_directory(g.out);
    return cfg;
}

ivr::Provenance provenance(const std::string& cmd, const ivr::RunConfig& cfg)
{
    ivr::Provenance p;
    p.command = cmd;
    p.config_hash = cfg.hash_hex();
    p.extra["seed"] = std::to_string(cfg.seed);
    return p;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json superposition_json(const ivr::Superposition& s)
{
    json j;
    j["s_indices"] = s.s_indices;
    std::vector<double> re, im, w;
    for (Eigen::Index k = 0; k < s.c.size(); ++k) {
        re.push_back(s.c(k).real());
        im.push_back(s.c(k).imag());
        w.push_back(std::norm(s.c(k)));
    }
    j["c_re"] = re;
    j["c_im"] = im;
    j["weights"] = w;
    return j;
}

ivr::Superposition superposition_from_json(const json& j)
{
    ivr::Superposition s;
    s.s_indices = j.at("s_indices").get<std::vector<int>>();
    const auto re = j.at("c_re").get<std::vector<double>>();
    const auto im = j.at("c_im").get<std::vector<double>>();
    if (re.size() != im.size() || re.size() != s.s_indices.size())
        throw ivr::InvalidArgument("coefficient file: inconsistent lengths");
    s.c.resize(re.size());
    for (std::size_t k = 0; k < re.size(); ++k)
        s.c(k) = {re[k], im[k]};
    s.c.normalize();
    return s;
}

// ---------------------------------------------------------------- eigenstates

int cmd_eigenstates(const Globals& g, const std::vector<std::string>& extra)
{
    const auto cfg = resolve(g, extra);
    auto prov = provenance("eigenstates", cfg);
    Timer tm;
    const ivr::BondBases b = ivr::build_bases(cfg);
    prov.timings_s["bases"] = tm.lap();

    std::ofstream(out_path(g, "cs_basis.json")) << json(b.cs).dump() << "\n";
    std::ofstream(out_path(g, "co_basis.json")) << json(b.co).dump() << "\n";

    const int ns = b.cs.n_bound;
    json rows = json::array();
    double max_err = 0.0;
    for (int k = 0; k < 9 && ns - 1 - k >= 0; ++k) {
        const double e = b.cs.energies(ns - 1 - k);
        const double ref = ivr::reference::cs_top_levels[k];
        max_err = std::max(max_err, std::abs(e - ref));
        rows.push_back({{"kappa", k + 1}, {"m", ns - 1 - k}, {"E", e}, {"reference", ref}, {"error", e - ref}});
    }
    json report{{"cs_bound", b.cs.n_bound},
                {"co_bound", b.co.n_bound},
                {"cs_top_nine", rows},
                {"cs_top_nine_max_error", max_err},
                {"co_ground", b.co.energies(0)},
                {"co_ground_reference", ivr::reference::co_ground},
                {"co_ground_error", b.co.energies(0) - ivr::reference::co_ground},
                {"warnings", json::array()}};
    for (const auto& w : b.cs.warnings)
        report["warnings"].push_back("CS: " + w);
    for (const auto& w : b.co.warnings)
        report["warnings"].push_back("CO: " + w);
    ivr::write_json(out_path(g, "eigenstates.json"), prov, report);

    std::vector<std::vector<double>> erows;
    for (int n = 0; n < std::max(b.cs.size(), b.co.size()); ++n)
        erows.push_back({double(n), n < b.cs.size() ? b.cs.energies(n) : NAN, n < b.co.size() ? b.co.energies(n) : NAN});
    ivr::write_csv(out_path(g, "bond_energies.csv"), prov, {"n", "E_cs", "E_co"}, erows);

    std::cout << "CS bound states: " << b.cs.n_bound << "\nCO bound states: " << b.co.n_bound << "\n";
    std::cout << "CS top nine max |error|: " << max_err << " hartree\n";
    std::cout << "CO ground: " << ivr::format_number(b.co.energies(0)) << " hartree\n";
    for (const auto& w : report["warnings"])
        std::cerr << "warning: " << w.get<std::string>() << "\n";
    return 0;
}

// ----------------------------------------------------------------- resonances

int cmd_resonances(const Globals& g, const std::vector<std::string>& extra)
{
    const auto cfg = resolve(g, extra);
    auto prov = provenance("resonances", cfg);
    Timer tm;
    const auto b = ivr::build_bases(cfg);
    const auto sys = ivr::build_system(cfg, b);
    prov.timings_s["system"] = tm.lap();

    json report{{"N_kappa", sys.pb.n_kappa()}, {"N_beta", sys.pb.n_beta()}, {"N_T", sys.pb.n_total()}};
    auto emit = [&](const ivr::ResonanceSet& rs, const std::string& name) {
        std::vector<std::vector<double>> rows;
        for (int gmm = 0; gmm < rs.n_total(); ++gmm)
            rows.push_back({double(gmm), rs.E(gmm), rs.C_abs(gmm), rs.a.col(gmm).squaredNorm(),
                            double(rs.iterations[gmm]), rs.residual(gmm)});
        ivr::write_csv(out_path(g, "resonances_" + name + ".csv"), prov,
                       {"gamma", "E", "C_abs", "q_weight", "iterations", "residual"}, rows);
        std::vector<int> its = rs.iterations;
        std::nth_element(its.begin(), its.begin() + its.size() / 2, its.end());
        report[name] = {{"roots", rs.n_total()},
                        {"max_residual", rs.residual.maxCoeff()},
                        {"median_iterations", its[its.size() / 2]},
                        {"completeness_error",
                         (rs.a * rs.a.transpose() - ivr::Mat::Identity(rs.n_kappa(), rs.n_kappa())).cwiseAbs().maxCoeff()}};
    };

    std::optional<ivr::ResonanceSet> fes, dir;
    if (cfg.solver != ivr::Solver::Direct) {
        fes = ivr::compute_resonances(cfg, sys, ivr::Solver::Feshbach, cache_dir(g));
        prov.timings_s["feshbach"] = tm.lap();
        emit(*fes, "feshbach");
    }
    if (cfg.solver != ivr::Solver::Feshbach) {
        dir = ivr::compute_resonances(cfg, sys, ivr::Solver::Direct, cache_dir(g));
        prov.timings_s["direct"] = tm.lap();
        emit(*dir, "direct");
    }
    if (fes && dir) {
        const double dE = (fes->E - dir->E).cwiseAbs().maxCoeff();
        const double da = (fes->a.cwiseAbs() - dir->a.cwiseAbs()).cwiseAbs().maxCoeff();
        report["max_abs_dE"] = dE;
        report["max_abs_d_abs_a"] = da;
        std::cout << "max |dE| across solvers: " << dE << " hartree\n";
        std::cout << "max d|a| across solvers: " << da << "\n";
    }
    ivr::write_json(out_path(g, "resonances.json"), prov, report);
    std::cout << "roots: " << sys.pb.n_total() << " (N_kappa " << sys.pb.n_kappa() << ", N_beta " << sys.pb.n_beta()
              << ")\n";
    return 0;
}

// ------------------------------------------------------------------- optimize

struct Loaded
{
    ivr::RunConfig cfg;
    ivr::BondBases b;
    ivr::QuantumSystem sys;
    ivr::ResonanceSet res;
    std::vector<int> S;
    std::vector<int> rows;
};

Loaded load_quantum(const Globals& g, const std::vector<std::string>& extra, ivr::Provenance& prov)
{
    Loaded L;
    L.cfg = resolve(g, extra);
    Timer tm;
    L.b = ivr::build_bases(L.cfg);
    L.sys = ivr::build_system(L.cfg, L.b);
    prov.timings_s["system"] = tm.lap();
    L.res = ivr::compute_resonances(L.cfg, L.sys,
                                    L.cfg.solver == ivr::Solver::Direct ? ivr::Solver::Direct : ivr::Solver::Feshbach,
                                    cache_dir(g));
    prov.timings_s["resonances"] = tm.lap();
    L.S = ivr::resolve_subset(L.cfg, L.sys.pb);
    L.rows = ivr::measure_rows(L.cfg, L.sys.pb, L.S);
    return L;
}

json control_json(const ivr::ControlResult& r)
{
    json j = superposition_json(r.c_opt);
    j["mode"] = ivr::to_string(r.mode);
    j["T_fs"] = r.T_fs;
    j["lambda"] = r.lambda;
    j["spectrum"] = vec_json(r.spectrum);
    j["degenerate"] = r.degenerate;
    j["residual"] = r.residual;
    return j;
}

int cmd_optimize(const Globals& g, const std::vector<std::string>& extra)
{
    ivr::Provenance prov;
    Loaded L = load_quantum(g, extra, prov);
    const auto base = provenance("optimize", L.cfg);
    prov.command = base.command;
    prov.config_hash = base.config_hash;
    prov.extra = base.extra;

    const auto r = ivr::optimize(L.res, L.S, L.cfg.T_fs, L.cfg.mode, L.rows);
    json j = control_json(r);
    if (L.S.size() == 9 && L.cfg.subset == "top9") {
        const auto& ref = L.cfg.mode == ivr::ControlMode::Maximize ? ivr::reference::weights_max
                                                                   : ivr::reference::weights_min;
        j["reference_weights"] = ref;
    }
    ivr::write_json(out_path(g, "control_" + ivr::to_string(r.mode) + ".json"), prov, j);
    std::ofstream(out_path(g, "coefficients.json")) << superposition_json(r.c_opt).dump(2) << "\n";

    std::cout << "mode " << ivr::to_string(r.mode) << ", T = " << r.T_fs << " fs, lambda = " << r.lambda
              << (r.degenerate ? " (degenerate extremum)" : "") << "\n";
    std::cout << "kappa  |c|^2\n";
    for (Eigen::Index k = 0; k < r.c_opt.c.size(); ++k)
        std::cout << "  " << k + 1 << "    " << std::norm(r.c_opt.c(k)) << "\n";
    return 0;
}

// --------------------------------------------------------------------- evolve

int cmd_evolve(const Globals& g, const std::vector<std::string>& extra, const std::string& coeff_file)
{
    ivr::Provenance prov;
    Loaded L = load_quantum(g, extra, prov);
    const auto base = provenance("evolve", L.cfg);
    prov.command = base.command;
    prov.config_hash = base.config_hash;
    prov.extra = base.extra;
    Timer tm;

    ivr::Superposition c;
    if (!coeff_file.empty()) {
        std::ifstream f(coeff_file);
        if (!f)
            throw ivr::InvalidArgument("cannot read " + coeff_file);
        c = superposition_from_json(json::parse(f));
    } else {
        c = ivr::optimize(L.res, L.S, L.cfg.T_fs, L.cfg.mode, L.rows).c_opt;
    }
    c.validate(L.res.n_kappa());

    const Vec t = ivr::time_grid(L.cfg.t_end_fs, L.cfg.dt_fs);
    const auto tr = ivr::population_trace(c, L.res, t, L.rows, L.cfg.threads);
    prov.timings_s["trace"] = tm.lap();

    std::vector<std::string> header{"t_fs", "P", "W", "P_tilde", "direct", "interference"};
    for (std::size_t k = 0; k < c.s_indices.size(); ++k)
        header.push_back("P_" + std::to_string(k + 1));
    std::vector<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const auto d = ivr::decompose(c, L.res, t(i), L.rows);
        std::vector<double> r{t(i), tr.P(i), tr.W(i), tr.P_tilde(i), d.direct, d.interference};
        for (Eigen::Index k = 0; k < tr.per_state.cols(); ++k)
            r.push_back(tr.per_state(i, k));
        rows.push_back(r);
    }
    ivr::write_csv(out_path(g, "trace.csv"), prov, header, rows);

    json report{{"superposition", superposition_json(c)}, {"mean_energy", ivr::mean_energy(c, L.res)}};
    try {
        const auto fit = ivr::fit_decay(tr, L.cfg.fit_window_fs, L.cfg.average_window_fs);
        report["decay"] = {{"t_delta_fs", fit.t_delta},
                           {"P_inf", fit.P_inf},
                           {"fit_window_fs", fit.fit_window},
                           {"average_window_fs", fit.average_window},
                           {"rms", fit.residual}};
        std::cout << "t_delta = " << fit.t_delta << " fs, P_inf = " << fit.P_inf << "\n";
    } catch (const ivr::DegenerateFit& e) {
        report["decay"] = {{"error", e.kind()}, {"message", e.what()}};
        std::cout << "decay fit: " << e.what() << "\n";
    }
    auto at = [&](double when) {
        const Eigen::Index i = std::min<Eigen::Index>(t.size() - 1, std::lround(when / L.cfg.dt_fs));
        return tr.P(i);
    };
    report["P_50fs"] = at(50.0);
    report["P_T"] = at(L.cfg.T_fs);
    report["P_end"] = tr.P(t.size() - 1);

    // wavepacket snapshots through the full eigenvectors
    if (!L.cfg.snapshots_fs.empty()) {
        // the cache holds no vectors, so the direct path re-diagonalizes H
        const bool use_direct = L.cfg.density_vectors == ivr::DensityVectors::Direct;
        const ivr::ResonanceSet dres =
            use_direct && !L.res.vectors.size() ? ivr::direct_resonances(L.sys.pb, L.sys.H, L.cfg.cluster_gap) : L.res;
        const ivr::Mat X = use_direct ? dres.vectors : ivr::eigenvectors_by_resolvent(L.res, L.sys.pb, L.sys.V);
        json snaps = json::array();
        for (double ts : L.cfg.snapshots_fs) {
            const auto d = ivr::wavepacket_density(c, use_direct ? dres : L.res, X, L.b.cs, L.b.co, ts, L.cfg.window);
            const std::string name = "density_t" + ivr::format_number(ts) + "fs.txt";
            auto p = prov;
            p.extra["t_fs"] = ivr::format_number(ts);
            p.extra["norm"] = ivr::format_number(d.norm);
            ivr::write_grid(out_path(g, name), p, d.R1, d.R2, d.rho);
            snaps.push_back({{"t_fs", ts}, {"file", name}, {"norm", d.norm}, {"boundary_max", d.boundary_max}});
            if (d.boundary_max > 1e-6)
                std::cerr << "warning: density at the grid boundary " << d.boundary_max << " at t = " << ts << " fs\n";
        }
        report["snapshots"] = snaps;
        prov.timings_s["densities"] = tm.lap();
    }
    ivr::write_json(out_path(g, "evolve.json"), prov, report);
    std::cout << "P(50 fs) = " << at(50.0) << ", <H> = " << ivr::mean_energy(c, L.res) << " hartree\n";
    return 0;
}

// ------------------------------------------------------------------ classical

int cmd_classical(const Globals& g, const std::vector<std::string>& extra, const std::vector<std::string>& what)
{
    const auto cfg = resolve(g, extra);
    auto prov = provenance("classical", cfg);
    prov.extra["E"] = ivr::format_number(cfg.E_classical);
    prov.extra["dt_fs"] = ivr::format_number(cfg.cl_dt_fs);
    const auto m = ivr::classical_model(cfg);
    const double R2s = m.surface.morse[1].R0;
    auto want = [&](const std::string& s) {
        return what.empty() || std::find(what.begin(), what.end(), s) != what.end();
    };
    Timer tm;
    json report{{"E", cfg.E_classical}, {"period_cs_fs", m.period_cs()}, {"period_co_fs", m.period_co()}};

    ivr::LyapunovOptions lo;
    lo.t_end_fs = cfg.lyap_t_end_fs;
    lo.dt_fs = cfg.cl_dt_fs;
    lo.d0 = cfg.d0;
    lo.smooth_fs = cfg.smooth_fs;

    if (want("lyapunov")) {
        for (const auto& [name, R1, P1] : {std::tuple{"stable", cfg.stable_R1, cfg.stable_P1},
                                           std::tuple{"chaotic", cfg.chaotic_R1, cfg.chaotic_P1}}) {
            const auto seed = ivr::section_seed(cfg, m, R1, P1);
            const auto lt = ivr::lyapunov(seed, cfg.E_classical, m, lo);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < lt.t_fs.size(); ++i)
                rows.push_back({lt.t_fs[i], lt.Lambda[i], lt.Lambda_smoothed[i]});
            ivr::write_csv(out_path(g, std::string("lyapunov_") + name + ".csv"), prov,
                           {"t_fs", "Lambda", "Lambda_smoothed"}, rows);
            report[std::string("lambda_") + name + "_per_ps"] = lt.lambda_t;
            std::cout << "lambda_t(" << name << ") = " << lt.lambda_t << " /ps\n";

            ivr::IntegrateOptions io;
            io.dt_fs = cfg.cl_dt_fs;
            io.record_every = 20;
            const auto traj = ivr::integrate(seed, cfg.E_classical, std::max(2000.0, cfg.lyap_t_end_fs), m, io);
            std::vector<std::vector<double>> erows;
            for (const auto& s : ivr::bond_energy_trace(traj, m))
                erows.push_back({s.t_fs, s.E_cs, s.E_co, s.remainder});
            ivr::write_csv(out_path(g, std::string("bond_energy_") + name + ".csv"), prov,
                           {"t_fs", "E_cs", "E_co", "remainder"}, erows);
            report[std::string("drift_") + name] = traj.max_rel_drift;
        }
        prov.timings_s["lyapunov"] = tm.lap();
    }
    if (want("sos")) {
        ivr::SosOptions so;
        so.n_traj = cfg.sos_n_traj;
        so.t_end_fs = cfg.sos_t_end_fs;
        so.dt_fs = cfg.cl_dt_fs;
        so.seed = cfg.seed;
        const auto sos = ivr::surface_of_section(cfg.E_classical, m, R2s, so);
        std::vector<std::vector<double>> rows;
        for (const auto& p : sos.points)
            rows.push_back({p[0], p[1]});
        ivr::write_csv(out_path(g, "sos.csv"), prov, {"R1", "P1"}, rows);
        report["sos_points"] = sos.points.size();
        prov.timings_s["sos"] = tm.lap();
    }
    if (want("island")) {
        ivr::IslandOptions iopt;
        iopt.n_R1 = iopt.n_P1 = cfg.island_n;
        iopt.threshold_per_ps = cfg.island_threshold;
        iopt.lyap = lo;
        const auto est = ivr::island_fraction(cfg.E_classical, m, R2s, iopt, cfg.threads);
        std::vector<std::vector<double>> rows;
        for (const auto& c : est.cells)
            rows.push_back({c[0], c[1], c[2]});
        ivr::write_csv(out_path(g, "island_cells.csv"), prov, {"R1", "P1", "lambda_t"}, rows);
        report["island_fraction"] = est.fraction;
        std::cout << "island fraction: " << est.fraction << " (" << est.n_regular << "/" << est.n_cells << ")\n";
        prov.timings_s["island"] = tm.lap();
    }
    if (want("ensemble")) {
        ivr::EnsembleOptions eo;
        eo.n_traj = cfg.ensemble_n_traj;
        eo.t_end_fs = cfg.ensemble_t_end_fs;
        eo.dt_fs = cfg.cl_dt_fs;
        eo.seed = cfg.seed;
        eo.E_co_ground = ivr::morse_levels(m.surface.morse[1], cfg.convention().mu_zero_CO).front();
        const auto ens = ivr::ensemble_decay(cfg.E_classical, m, eo, cfg.threads);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < ens.t_fs.size(); ++i)
            rows.push_back({ens.t_fs[i], ens.mean_E_cs[i]});
        ivr::write_csv(out_path(g, "ensemble.csv"), prov, {"t_fs", "mean_E_cs"}, rows);
        report["ensemble"] = {{"tau_fs", ens.tau_fs}, {"E_inf", ens.E_inf}, {"rms", ens.rms}, {"amplitude", ens.amplitude},
                              {"mean_E_total", ens.mean_E_total}, {"resolved", ens.resolved}};
        std::cout << "ensemble CS energy decay time: " << ens.tau_fs << " fs"
                  << (ens.resolved ? "" : " (longer than the window; raise classical.ensemble_t_end_fs)") << "\n";
        prov.timings_s["ensemble"] = tm.lap();
    }
    ivr::write_json(out_path(g, "classical.json"), prov, report);
    std::cout << "periods: CS " << m.period_cs() << " fs, CO " << m.period_co() << " fs\n";
    return 0;
}

void emit_error(const Globals& g, const std::string& kind, const std::string& msg)
{
    const json rec{{"error", kind}, {"message", msg}};
    std::cerr << rec.dump() << "\n";
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (!ec)
        std::ofstream(out_path(g, "error.json")) << rec.dump(2) << "\n";
}

// Resolved configuration as an INI file on stdout, one comment per key.
int cmd_config(const Globals& g)
{
    std::vector<std::string> all = g.sets;
    if (g.seed >= 0)
        all.push_back("run.seed=" + std::to_string(g.seed));
    if (g.threads > 0)
        all.push_back("run.threads=" + std::to_string(g.threads));
    const auto canon = ivr::load_config(g.config, all).canonical();
    std::map<std::string, std::vector<std::array<std::string, 3>>> sections;
    for (const auto& row : ivr::config_schema()) {
        const auto dot = row[0].find('.');
        sections[row[0].substr(0, dot)].push_back({row[0].substr(dot + 1), canon.at(row[0]), row[2]});
    }
    bool first = true;
    for (const std::string name : {"model", "dvr", "basis", "resonances", "control", "evolve", "classical", "run"}) {
        const auto it = sections.find(name);
        if (it == sections.end())
            continue;
        std::cout << (first ? "" : "\n") << "[" << name << "]\n";
        first = false;
        for (const auto& [key, value, help] : it->second)
            std::cout << "# " << help << "\n" << key << " = " << value << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coherent control of IVR in collinear OCS"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "INI config file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--threads", g.threads, "worker threads");
    app.add_option("--set", g.sets, "override, section.key=value (repeatable)");
    app.add_flag("--no-cache", g.no_cache, "do not read or write cached resonances");

    std::vector<std::string> extra;
    auto opt_set = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help,
                       bool time = false) {
        sub->add_option_function<std::string>(
            flag, [&extra, key, time](const std::string& v) { extra.push_back(key + "=" + (time ? parse_time(v) : v)); },
            help);
    };

    auto* eig = app.add_subcommand("eigenstates", "bond bases and bound-state regression report");
    opt_set(eig, "--cs-N", "dvr.cs_N", "CS grid points");
    opt_set(eig, "--co-N", "dvr.co_N", "CO grid points");

    auto* res = app.add_subcommand("resonances", "exact eigenvalues and overlaps");
    opt_set(res, "--solver", "resonances.solver", "feshbach | direct | both");
    opt_set(res, "--couplings", "basis.couplings", "exact | bare");
    opt_set(res, "--q-basis", "basis.q_basis", "product | diagonalized");

    auto* opt = app.add_subcommand("optimize", "optimal preparation coefficients");
    opt_set(opt, "--mode", "control.mode", "max | min");
    opt_set(opt, "--T", "control.T_fs", "target time (fs, or with fs/ps suffix)", true);
    opt_set(opt, "--subset", "control.subset", "topN or comma list of Q indices");
    opt_set(opt, "--measure", "control.measure", "Q | S");
    opt_set(opt, "--solver", "resonances.solver", "feshbach | direct");

    std::string coeff_file;
    auto* evo = app.add_subcommand("evolve", "population traces, decay fit, wavepacket snapshots");
    evo->add_option("--coefficients", coeff_file, "coefficients.json written by optimize");
    opt_set(evo, "--mode", "control.mode", "max | min (when optimizing inline)");
    opt_set(evo, "--T", "control.T_fs", "target time for inline optimization", true);
    opt_set(evo, "--t-end", "evolve.t_end_fs", "trace length", true);
    opt_set(evo, "--dt", "evolve.dt_fs", "trace step", true);
    opt_set(evo, "--measure", "control.measure", "Q | S");
    opt_set(evo, "--solver", "resonances.solver", "feshbach | direct");

    std::vector<std::string> what;
    auto* cla = app.add_subcommand("classical", "section, Lyapunov exponents, bond energies, ensemble");
    cla->add_option("--what", what, "any of: lyapunov sos island ensemble (default all)")
        ->check(CLI::IsMember({"lyapunov", "sos", "island", "ensemble"}));
    opt_set(cla, "--E", "classical.E", "total energy, hartree");
    opt_set(cla, "--dt", "classical.dt_fs", "step, fs", true);
    opt_set(cla, "--n-traj", "classical.sos_n_traj", "trajectories on the section");

    auto* cfg_cmd = app.add_subcommand("config", "print the resolved configuration as INI");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*cfg_cmd)
            return cmd_config(g);
        if (*eig)
            return cmd_eigenstates(g, extra);
        if (*res)
            return cmd_resonances(g, extra);
        if (*opt)
            return cmd_optimize(g, extra);
        if (*evo)
            return cmd_evolve(g, extra, coeff_file);
        if (*cla)
            return cmd_classical(g, extra, what);
    } catch (const ivr::Error& e) {
        emit_error(g, e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error(g, "InternalError", e.what());
        return 3;
    }
    return 1;
}
