#include "ivr/config.hpp"

#include "ivr/errors.hpp"
#include "ivr/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

namespace ivr {

namespace {

std::string fmt(double v)
{
    return format_number(v);
}

double to_double(const std::string& key, const std::string& s)
{
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + s + "'");
    }
}

long to_long(const std::string& key, const std::string& s)
{
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + s + "'");
    }
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n\"");
    const auto e = s.find_last_not_of(" \t\r\n\"");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!trim(item).empty())
            out.push_back(trim(item));
    return out;
}

struct Entry
{
    std::string key;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Entry positive(std::string key, std::string help, double RunConfig::*field)
{
    return {key, std::move(help),
            [key, field](RunConfig& c, const std::string& v) {
                const double x = to_double(key, v);
                if (!(x > 0.0))
                    throw ConfigError(key + " must be positive");
                c.*field = x;
            },
            [field](const RunConfig& c) { return fmt(c.*field); }};
}

Entry real(std::string key, std::string help, double RunConfig::*field)
{
    return {key, std::move(help), [key, field](RunConfig& c, const std::string& v) { c.*field = to_double(key, v); },
            [field](const RunConfig& c) { return fmt(c.*field); }};
}

Entry count(std::string key, std::string help, int RunConfig::*field, int min)
{
    return {key, std::move(help),
            [key, field, min](RunConfig& c, const std::string& v) {
                const long x = to_long(key, v);
                if (x < min)
                    throw ConfigError(key + " must be >= " + std::to_string(min));
                c.*field = static_cast<int>(x);
            },
            [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

template <class Get, class Set>
Entry custom(std::string key, std::string help, Set set, Get get)
{
    return {std::move(key), std::move(help), set, get};
}

Entry morse_field(int i, const char* name, double MorseParams::*f)
{
    const std::string key = std::string("model.") + name + std::to_string(i + 1);
    return {key, std::string("Morse ") + name + " of term " + std::to_string(i + 1),
            [key, i, f](RunConfig& c, const std::string& v) {
                const double x = to_double(key, v);
                if (!(x > 0.0))
                    throw ConfigError(key + " must be positive");
                c.morse[i].*f = x;
            },
            [i, f](const RunConfig& c) { return fmt(c.morse[i].*f); }};
}

Entry grid_field(const std::string& key, const std::string& help, DvrGrid RunConfig::*g, double DvrGrid::*f)
{
    return {key, help,
            [key, g, f](RunConfig& c, const std::string& v) {
                const double x = to_double(key, v);
                if (!(x > 0.0))
                    throw ConfigError(key + " must be positive");
                (c.*g).*f = x;
            },
            [g, f](const RunConfig& c) { return fmt((c.*g).*f); }};
}

Entry grid_n(const std::string& key, DvrGrid RunConfig::*g)
{
    return {key, "DVR point count (>= 16)",
            [key, g](RunConfig& c, const std::string& v) {
                const long x = to_long(key, v);
                if (x < 16)
                    throw ConfigError(key + " must be >= 16");
                (c.*g).N = static_cast<int>(x);
            },
            [g](const RunConfig& c) { return std::to_string((c.*g).N); }};
}

template <class E>
Entry choice(const std::string& key, const std::string& help, E RunConfig::*field,
             std::vector<std::pair<std::string, E>> options)
{
    return {key, help,
            [key, field, options](RunConfig& c, const std::string& v) {
                for (const auto& [name, val] : options)
                    if (name == v) {
                        c.*field = val;
                        return;
                    }
                std::string all;
                for (const auto& o : options)
                    all += (all.empty() ? "" : " | ") + o.first;
                throw ConfigError(key + ": expected " + all + ", got '" + v + "'");
            },
            [field, options](const RunConfig& c) {
                for (const auto& [name, val] : options)
                    if (c.*field == val)
                        return name;
                return std::string("?");
            }};
}

const std::vector<Entry>& schema()
{
    static const std::vector<Entry> s = [] {
        std::vector<Entry> e;
        e.push_back(positive("model.amu", "electron masses per dalton", &RunConfig::amu));
        e.push_back(positive("model.m_O", "oxygen mass, dalton", &RunConfig::m_O_amu));
        e.push_back(positive("model.m_C", "carbon mass, dalton", &RunConfig::m_C_amu));
        e.push_back(positive("model.m_S", "sulfur mass, dalton", &RunConfig::m_S_amu));
        e.push_back(choice<KineticPairing>("model.pairing",
                                           "reduced masses in the full kinetic energy: swapped | standard",
                                           &RunConfig::pairing,
                                           {{"swapped", KineticPairing::Swapped}, {"standard", KineticPairing::Standard}}));
        for (int i = 0; i < 3; ++i) {
            e.push_back(morse_field(i, "D", &MorseParams::D));
            e.push_back(morse_field(i, "beta", &MorseParams::beta));
            e.push_back(morse_field(i, "R0", &MorseParams::R0));
        }
        e.push_back(real("model.E_d", "CS dissociation onset V(inf, R2^0), hartree", &RunConfig::E_d));

        e.push_back(grid_field("dvr.cs_R_min", "CS grid start, bohr", &RunConfig::cs_grid, &DvrGrid::R_min));
        e.push_back(grid_field("dvr.cs_R_max", "CS grid end, bohr", &RunConfig::cs_grid, &DvrGrid::R_max));
        e.push_back(grid_n("dvr.cs_N", &RunConfig::cs_grid));
        e.push_back(grid_field("dvr.co_R_min", "CO grid start, bohr", &RunConfig::co_grid, &DvrGrid::R_min));
        e.push_back(grid_field("dvr.co_R_max", "CO grid end, bohr", &RunConfig::co_grid, &DvrGrid::R_max));
        e.push_back(grid_n("dvr.co_N", &RunConfig::co_grid));
        e.push_back(count("dvr.cs_max_states", "keep only the lowest n CS states (-1: all bound)",
                          &RunConfig::cs_max_states, -1));
        e.push_back(count("dvr.co_max_states", "keep only the lowest n CO states (-1: all bound)",
                          &RunConfig::co_max_states, -1));

        e.push_back(custom(
            "basis.couplings", "exact | bare",
            [](RunConfig& c, const std::string& v) {
                if (v == "exact")
                    c.hamiltonian.couplings = Couplings::Exact;
                else if (v == "bare")
                    c.hamiltonian.couplings = Couplings::Bare;
                else
                    throw ConfigError("basis.couplings: expected exact | bare, got '" + v + "'");
            },
            [](const RunConfig& c) {
                return std::string(c.hamiltonian.couplings == Couplings::Exact ? "exact" : "bare");
            }));
        e.push_back(custom(
            "basis.v3", "include the V3(R1+R2) coupling: on | off",
            [](RunConfig& c, const std::string& v) {
                if (v != "on" && v != "off")
                    throw ConfigError("basis.v3: expected on | off");
                c.hamiltonian.include_v3 = v == "on";
            },
            [](const RunConfig& c) { return std::string(c.hamiltonian.include_v3 ? "on" : "off"); }));
        e.push_back(custom(
            "basis.cross_term", "include the P1 P2 kinetic coupling: on | off",
            [](RunConfig& c, const std::string& v) {
                if (v != "on" && v != "off")
                    throw ConfigError("basis.cross_term: expected on | off");
                c.hamiltonian.include_cross = v == "on";
            },
            [](const RunConfig& c) { return std::string(c.hamiltonian.include_cross ? "on" : "off"); }));
        e.push_back(choice<QBasis>("basis.q_basis", "product | diagonalized", &RunConfig::q_basis,
                                   {{"product", QBasis::Product}, {"diagonalized", QBasis::Diagonalized}}));
        e.push_back(choice<PartitionKind>("basis.partition", "co-ground | cs-ground", &RunConfig::partition,
                                          {{"co-ground", PartitionKind::CoGround},
                                           {"cs-ground", PartitionKind::CsGround}}));

        e.push_back(choice<Solver>("resonances.solver", "feshbach | direct | both", &RunConfig::solver,
                                   {{"feshbach", Solver::Feshbach}, {"direct", Solver::Direct}, {"both", Solver::Both}}));
        e.push_back(positive("resonances.cluster_gap", "re-resolve eigenvalue clusters closer than this in extended precision",
                             &RunConfig::cluster_gap));

        e.push_back(custom(
            "control.subset", "topN (N highest Q states, first = highest) or comma list of Q indices",
            [](RunConfig& c, const std::string& v) {
                if (v.rfind("top", 0) == 0) {
                    if (to_long("control.subset", v.substr(3)) < 1)
                        throw ConfigError("control.subset: topN needs N >= 1");
                } else {
                    for (const auto& s : split(v, ','))
                        if (to_long("control.subset", s) < 0)
                            throw ConfigError("control.subset: negative index");
                    if (split(v, ',').empty())
                        throw ConfigError("control.subset: empty");
                }
                c.subset = v;
            },
            [](const RunConfig& c) { return c.subset; }));
        e.push_back(custom(
            "control.T_fs", "target time, fs (>= 0)",
            [](RunConfig& c, const std::string& v) {
                const double x = to_double("control.T_fs", v);
                if (x < 0.0)
                    throw ConfigError("control.T_fs must be >= 0");
                c.T_fs = x;
            },
            [](const RunConfig& c) { return fmt(c.T_fs); }));
        e.push_back(choice<ControlMode>("control.mode", "max | min", &RunConfig::mode,
                                        {{"max", ControlMode::Maximize}, {"min", ControlMode::Minimize}}));
        e.push_back(choice<MeasureSet>("control.measure", "population measured over Q | S", &RunConfig::measure,
                                       {{"Q", MeasureSet::Q}, {"S", MeasureSet::S}}));

        e.push_back(positive("evolve.t_end_fs", "trace length, fs", &RunConfig::t_end_fs));
        e.push_back(positive("evolve.dt_fs", "trace step, fs", &RunConfig::dt_fs));
        e.push_back(positive("evolve.fit_window_fs", "decay-time fit window, fs", &RunConfig::fit_window_fs));
        e.push_back(positive("evolve.average_window_fs", "P_inf averaging window, fs", &RunConfig::average_window_fs));
        e.push_back(custom(
            "evolve.snapshots_fs", "comma list of density snapshot times, fs",
            [](RunConfig& c, const std::string& v) {
                c.snapshots_fs.clear();
                for (const auto& s : split(v, ',')) {
                    const double x = to_double("evolve.snapshots_fs", s);
                    if (x < 0.0)
                        throw ConfigError("evolve.snapshots_fs: negative time");
                    c.snapshots_fs.push_back(x);
                }
            },
            [](const RunConfig& c) {
                std::string s;
                for (double x : c.snapshots_fs)
                    s += (s.empty() ? "" : ",") + fmt(x);
                return s;
            }));
        e.push_back(choice<DensityVectors>("evolve.density_vectors",
                                           "eigenvectors for densities: direct (dense diagonalization) | resolvent",
                                           &RunConfig::density_vectors,
                                           {{"direct", DensityVectors::Direct}, {"resolvent", DensityVectors::Resolvent}}));
        e.push_back({"evolve.density_R1_min", "density output window, bohr",
                     [](RunConfig& c, const std::string& v) { c.window.R1_min = to_double("evolve.density_R1_min", v); },
                     [](const RunConfig& c) { return fmt(c.window.R1_min); }});
        e.push_back({"evolve.density_R1_max", "density output window, bohr",
                     [](RunConfig& c, const std::string& v) { c.window.R1_max = to_double("evolve.density_R1_max", v); },
                     [](const RunConfig& c) { return fmt(c.window.R1_max); }});
        e.push_back({"evolve.density_R2_min", "density output window, bohr",
                     [](RunConfig& c, const std::string& v) { c.window.R2_min = to_double("evolve.density_R2_min", v); },
                     [](const RunConfig& c) { return fmt(c.window.R2_min); }});
        e.push_back({"evolve.density_R2_max", "density output window, bohr",
                     [](RunConfig& c, const std::string& v) { c.window.R2_max = to_double("evolve.density_R2_max", v); },
                     [](const RunConfig& c) { return fmt(c.window.R2_max); }});
        e.push_back({"evolve.density_stride", "write every n-th grid point",
                     [](RunConfig& c, const std::string& v) {
                         const long x = to_long("evolve.density_stride", v);
                         if (x < 1)
                             throw ConfigError("evolve.density_stride must be >= 1");
                         c.window.stride = static_cast<int>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.window.stride); }});

        e.push_back(positive("classical.E", "total energy, hartree", &RunConfig::E_classical));
        e.push_back(positive("classical.dt_fs", "integrator step, fs", &RunConfig::cl_dt_fs));
        e.push_back(positive("classical.lyapunov_t_end_fs", "Lyapunov horizon, fs", &RunConfig::lyap_t_end_fs));
        e.push_back(positive("classical.d0", "initial twin separation, bohr", &RunConfig::d0));
        e.push_back(positive("classical.smooth_fs", "Lambda(t) smoothing window, fs", &RunConfig::smooth_fs));
        e.push_back(count("classical.sos_n_traj", "trajectories on the section", &RunConfig::sos_n_traj, 1));
        e.push_back(positive("classical.sos_t_end_fs", "length of each section trajectory, fs",
                             &RunConfig::sos_t_end_fs));
        e.push_back(count("classical.island_grid", "cells per axis for the island estimate", &RunConfig::island_n, 2));
        e.push_back(positive("classical.island_threshold", "regular if lambda_t below this, 1/ps",
                             &RunConfig::island_threshold));
        e.push_back(positive("classical.stable_R1", "stable seed R1 on the section, bohr", &RunConfig::stable_R1));
        e.push_back(real("classical.stable_P1", "stable seed P1 on the section", &RunConfig::stable_P1));
        e.push_back(positive("classical.chaotic_R1", "chaotic seed R1 on the section, bohr", &RunConfig::chaotic_R1));
        e.push_back(real("classical.chaotic_P1", "chaotic seed P1 on the section", &RunConfig::chaotic_P1));
        e.push_back(count("classical.ensemble_n_traj", "CS-excited ensemble size", &RunConfig::ensemble_n_traj, 1));
        e.push_back(positive("classical.ensemble_t_end_fs", "ensemble length, fs", &RunConfig::ensemble_t_end_fs));

        e.push_back({"run.seed", "RNG seed",
                     [](RunConfig& c, const std::string& v) {
                         const long x = to_long("run.seed", v);
                         if (x < 0)
                             throw ConfigError("run.seed must be >= 0");
                         c.seed = static_cast<std::uint64_t>(x);
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        e.push_back(count("run.threads", "worker threads", &RunConfig::threads, 1));
        return e;
    }();
    return s;
}

const Entry* find_entry(const std::string& key)
{
    for (const auto& e : schema())
        if (e.key == key)
            return &e;
    return nullptr;
}

} // namespace

SurfaceModel RunConfig::surface() const { return SurfaceModel::with_onset(morse, E_d); }

AtomMasses RunConfig::masses() const { return AtomMasses{m_O_amu * amu, m_C_amu * amu, m_S_amu * amu}; }

MassConvention RunConfig::convention() const { return make_mass_convention(masses(), pairing); }

std::map<std::string, std::string> RunConfig::canonical() const
{
    std::map<std::string, std::string> out;
    for (const auto& e : schema())
        out[e.key] = e.get(*this);
    return out;
}

std::uint64_t RunConfig::hash(const std::vector<std::string>& sections) const
{
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : canonical()) {
        const std::string sec = k.substr(0, k.find('.'));
        if (!sections.empty() && std::find(sections.begin(), sections.end(), sec) == sections.end())
            continue;
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
    }
    return h;
}

std::string RunConfig::hash_hex(const std::vector<std::string>& sections) const
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash(sections)));
    return buf;
}

void apply_setting(RunConfig& cfg, const std::string& dotted_key, const std::string& value)
{
    const Entry* e = find_entry(trim(dotted_key));
    if (!e)
        throw ConfigError("unknown config key '" + dotted_key + "'");
    e->set(cfg, trim(value));
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    RunConfig cfg;
    if (!path.empty()) {
        boost::property_tree::ptree pt;
        try {
            boost::property_tree::ini_parser::read_ini(path, pt);
        } catch (const boost::property_tree::ini_parser_error& err) {
            throw ConfigError(std::string("cannot read config: ") + err.what());
        }
        for (const auto& [section, body] : pt) {
            if (body.empty())
                throw ConfigError("config key '" + section + "' outside a section");
            for (const auto& [key, val] : body)
                apply_setting(cfg, section + "." + key, val.get_value<std::string>());
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + o + "' is not section.key=value");
        apply_setting(cfg, o.substr(0, eq), o.substr(eq + 1));
    }
    cfg.cs_grid.validate();
    cfg.co_grid.validate();
    if (cfg.cs_grid.R_max <= cfg.cs_grid.R_min || cfg.co_grid.R_max <= cfg.co_grid.R_min)
        throw ConfigError("grid end must exceed grid start");
    if (cfg.average_window_fs > cfg.t_end_fs)
        throw ConfigError("evolve.average_window_fs exceeds evolve.t_end_fs");
    return cfg;
}

std::vector<std::array<std::string, 3>> config_schema()
{
    RunConfig def;
    std::vector<std::array<std::string, 3>> out;
    for (const auto& e : schema())
        out.push_back({e.key, e.get(def), e.help});
    return out;
}

std::vector<int> resolve_subset(const RunConfig& cfg, const PartitionedBasis& pb)
{
    const int nk = pb.n_kappa();
    std::vector<int> S;
    if (cfg.subset.rfind("top", 0) == 0) {
        const int n = static_cast<int>(to_long("control.subset", cfg.subset.substr(3)));
        if (n > nk)
            throw ConfigError("control.subset asks for more states than Q holds");
        // Q is ordered by increasing energy; first member is the highest
        for (int k = 0; k < n; ++k)
            S.push_back(nk - 1 - k);
    } else {
        for (const auto& s : split(cfg.subset, ',')) {
            const int k = static_cast<int>(to_long("control.subset", s));
            if (k >= nk)
                throw ConfigError("control.subset index " + s + " outside Q");
            S.push_back(k);
        }
    }
    return S;
}

} // namespace ivr
