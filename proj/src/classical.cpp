#include "ivr/classical.hpp"

#include "ivr/errors.hpp"
#include "ivr/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace ivr {

namespace {

using State = std::array<double, 4>; // R1, R2, P1, P2

State flow(const State& x, const ClassicalModel& m)
{
    const auto g = m.gradient(x[0], x[1]);
    return {m.a11 * x[2] + m.a12 * x[3], m.a22 * x[3] + m.a12 * x[2], -g[0], -g[1]};
}

double config_distance(const PhasePoint& a, const PhasePoint& b)
{
    return std::hypot(a.R1 - b.R1, a.R2 - b.R2);
}

// accessible R1 interval on the section
std::array<double, 2> section_r1_range(double E, const ClassicalModel& m, double R2s)
{
    const int n = 4000;
    const double lo = 0.5, hi = 30.0;
    double a = 0.0, b = 0.0;
    bool found = false;
    for (int i = 0; i <= n; ++i) {
        const double r = lo + (hi - lo) * i / n;
        if (m.potential(r, R2s) < E) {
            if (!found)
                a = r;
            found = true;
            b = r;
        }
    }
    if (!found)
        throw InvalidArgument("energy below the section minimum");
    const double h = (hi - lo) / n;
    return {a - h, b + h};
}

// Suzuki fourth-order weights
const std::array<double, 5>& suzuki()
{
    static const std::array<double, 5> w = [] {
        const double s = 1.0 / (4.0 - std::cbrt(4.0));
        return std::array<double, 5>{s, s, 1.0 - 4.0 * s, s, s};
    }();
    return w;
}

// P2 root of H = E closest to the given P2
PhasePoint place_on_shell(const PhasePoint& p, double E, const ClassicalModel& m)
{
    PhasePoint x = p;
    const double c = 0.5 * m.a11 * x.P1 * x.P1 + m.potential(x.R1, x.R2) - E;
    const double b = m.a12 * x.P1;
    const double disc = b * b - 2.0 * m.a22 * c;
    if (disc < 0.0)
        throw InvalidArgument("no P2 puts the point on the energy shell");
    const double r1 = (-b + std::sqrt(disc)) / m.a22, r2 = (-b - std::sqrt(disc)) / m.a22;
    x.P2 = std::abs(r1 - p.P2) <= std::abs(r2 - p.P2) ? r1 : r2;
    return x;
}

} // namespace

ClassicalModel ClassicalModel::from(const SurfaceModel& s, const MassConvention& m, bool cross, bool v3)
{
    ClassicalModel c;
    c.surface = s;
    c.a11 = 1.0 / m.mu_full_1;
    c.a22 = 1.0 / m.mu_full_2;
    c.a12 = cross ? -1.0 / m.cross_mass : 0.0;
    c.include_v3 = v3;
    return c;
}

double ClassicalModel::potential(double R1, double R2) const
{
    double v = surface.morse[0].value(R1) + surface.morse[1].value(R2) + surface.c0;
    if (include_v3)
        v += surface.morse[2].value(R1 + R2);
    return v;
}

std::array<double, 2> ClassicalModel::gradient(double R1, double R2) const
{
    const double g3 = include_v3 ? surface.morse[2].derivative(R1 + R2) : 0.0;
    return {surface.morse[0].derivative(R1) + g3, surface.morse[1].derivative(R2) + g3};
}

double ClassicalModel::energy(const PhasePoint& x) const
{
    return 0.5 * a11 * x.P1 * x.P1 + 0.5 * a22 * x.P2 * x.P2 + a12 * x.P1 * x.P2 + potential(x.R1, x.R2);
}

double ClassicalModel::bond_energy_cs(const PhasePoint& x) const
{
    return 0.5 * a11 * x.P1 * x.P1 + surface.morse[0].value(x.R1);
}

double ClassicalModel::bond_energy_co(const PhasePoint& x) const
{
    return 0.5 * a22 * x.P2 * x.P2 + surface.morse[1].value(x.R2);
}

double ClassicalModel::period_cs() const
{
    const auto& p = surface.morse[0];
    return 2.0 * std::numbers::pi / (p.beta * std::sqrt(2.0 * p.D * a11)) * units::fs_per_au;
}

double ClassicalModel::period_co() const
{
    const auto& p = surface.morse[1];
    return 2.0 * std::numbers::pi / (p.beta * std::sqrt(2.0 * p.D * a22)) * units::fs_per_au;
}

void symplectic_step(PhasePoint& x, double dt_fs, const ClassicalModel& m)
{
    const double dt = dt_fs * units::au_per_fs;
    for (double w : suzuki()) {
        const double h = w * dt;
        auto g = m.gradient(x.R1, x.R2);
        x.P1 -= 0.5 * h * g[0];
        x.P2 -= 0.5 * h * g[1];
        x.R1 += h * (m.a11 * x.P1 + m.a12 * x.P2);
        x.R2 += h * (m.a22 * x.P2 + m.a12 * x.P1);
        g = m.gradient(x.R1, x.R2);
        x.P1 -= 0.5 * h * g[0];
        x.P2 -= 0.5 * h * g[1];
    }
    x.t += dt_fs;
}

double section_p1_limit(double R1, double E, const ClassicalModel& m, double R2s)
{
    const double det = m.a11 * m.a22 - m.a12 * m.a12;
    if (!(det > 0.0))
        throw InvalidArgument("kinetic energy form is not positive definite");
    const double room = E - m.potential(R1, R2s);
    return room > 0.0 ? std::sqrt(2.0 * m.a22 * room / det) : 0.0;
}

std::optional<PhasePoint> on_shell(double R1, double P1, double E, const ClassicalModel& m, double R2s)
{
    // a22/2 P2^2 + a12 P1 P2 + c = 0
    const double c = 0.5 * m.a11 * P1 * P1 + m.potential(R1, R2s) - E;
    const double b = m.a12 * P1;
    const double disc = b * b - 2.0 * m.a22 * c;
    if (disc < 0.0)
        return std::nullopt;
    return PhasePoint{R1, R2s, P1, (-b + std::sqrt(disc)) / m.a22, 0.0};
}

Trajectory integrate(const PhasePoint& initial, double E, double t_end_fs, const ClassicalModel& m,
                     const IntegrateOptions& opt)
{
    PhasePoint x = place_on_shell(initial, E, m);
    Trajectory tr;
    const long n = std::lround(t_end_fs / opt.dt_fs);
    const int every = std::max(1, opt.record_every);
    tr.points.reserve(n / every + 2);
    tr.points.push_back(x);
    for (long i = 1; i <= n; ++i) {
        symplectic_step(x, opt.dt_fs, m);
        if (i % every == 0 || i == n) {
            tr.points.push_back(x);
            tr.max_rel_drift = std::max(tr.max_rel_drift, std::abs((m.energy(x) - E) / E));
        }
        if (x.R1 > opt.R_exit || x.R2 > opt.R_exit) {
            tr.dissociated = true;
            tr.points.push_back(x);
            break;
        }
    }
    return tr;
}

SosRecord surface_of_section(double E, const ClassicalModel& m, double R2s, const SosOptions& opt)
{
    SosRecord rec;
    rec.E = E;
    rec.R2_section = R2s;
    const auto rr = section_r1_range(E, m, R2s);
    double pmax = 0.0;
    for (int i = 0; i <= 400; ++i)
        pmax = std::max(pmax, section_p1_limit(rr[0] + (rr[1] - rr[0]) * i / 400.0, E, m, R2s));

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ur(rr[0], rr[1]), up(-pmax, pmax);
    const long n = std::lround(opt.t_end_fs / opt.dt_fs);

    for (int k = 0; k < opt.n_traj; ++k) {
        std::optional<PhasePoint> x0;
        while (!x0)
            x0 = on_shell(ur(rng), up(rng), E, m, R2s);
        PhasePoint x = *x0;
        for (long i = 0; i < n; ++i) {
            const PhasePoint prev = x;
            symplectic_step(x, opt.dt_fs, m);
            if (!(prev.R2 < R2s && x.R2 >= R2s))
                continue;
            // Henon: one RK4 step in R2 from the previous point onto the section
            State s{prev.R1, prev.R2, prev.P1, prev.P2};
            double t = prev.t;
            const double h = R2s - prev.R2;
            auto rhs = [&](const State& y, double& dtdr) {
                const State f = flow(y, m);
                dtdr = 1.0 / f[1];
                return State{f[0] * dtdr, 1.0, f[2] * dtdr, f[3] * dtdr};
            };
            double q1, q2, q3, q4;
            const State k1 = rhs(s, q1);
            State y2, y3, y4;
            for (int c = 0; c < 4; ++c)
                y2[c] = s[c] + 0.5 * h * k1[c];
            const State k2 = rhs(y2, q2);
            for (int c = 0; c < 4; ++c)
                y3[c] = s[c] + 0.5 * h * k2[c];
            const State k3 = rhs(y3, q3);
            for (int c = 0; c < 4; ++c)
                y4[c] = s[c] + h * k3[c];
            const State k4 = rhs(y4, q4);
            for (int c = 0; c < 4; ++c)
                s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            t += h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4) / units::au_per_fs;
            PhasePoint p{s[0], R2s, s[2], s[3], t};
            rec.points.push_back({p.R1, p.P1});
            rec.states.push_back(p);
        }
    }
    return rec;
}

LyapunovTrace lyapunov(const PhasePoint& seed, double E, const ClassicalModel& m, const LyapunovOptions& opt)
{
    LyapunovTrace tr;
    tr.d0 = opt.d0;
    PhasePoint x = place_on_shell(seed, E, m), y = x;
    x.t = y.t = 0.0;
    y.R1 += opt.d0;
    const long n = std::lround(opt.t_end_fs / opt.dt_fs);
    const int every = std::max(1, opt.record_every);
    double L = 0.0;
    tr.t_fs.push_back(0.0);
    tr.Lambda.push_back(0.0);
    for (long i = 1; i <= n; ++i) {
        symplectic_step(x, opt.dt_fs, m);
        symplectic_step(y, opt.dt_fs, m);
        const double d = config_distance(x, y);
        if (d > opt.renorm_factor * opt.d0) {
            L += std::log(d / opt.d0);
            const double f = opt.d0 / d;
            y.R1 = x.R1 + (y.R1 - x.R1) * f;
            y.R2 = x.R2 + (y.R2 - x.R2) * f;
            y.P1 = x.P1 + (y.P1 - x.P1) * f;
            y.P2 = x.P2 + (y.P2 - x.P2) * f;
        }
        if (i % every == 0 || i == n) {
            tr.t_fs.push_back(x.t);
            tr.Lambda.push_back(L + std::log(config_distance(x, y) / opt.d0));
        }
    }
    // centred moving average
    const std::size_t N = tr.Lambda.size();
    const int half = std::max(0, static_cast<int>(std::lround(0.5 * opt.smooth_fs / (opt.dt_fs * every))));
    tr.Lambda_smoothed.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const std::size_t a = i >= std::size_t(half) ? i - half : 0;
        const std::size_t b = std::min(N - 1, i + half);
        double s = 0.0;
        for (std::size_t j = a; j <= b; ++j)
            s += tr.Lambda[j];
        tr.Lambda_smoothed[i] = s / double(b - a + 1);
    }
    tr.lambda_t = tr.Lambda.back() / (tr.t_fs.back() * 1e-3);
    return tr;
}

double finite_time_lyapunov(const PhasePoint& seed, const ClassicalModel& m, const LyapunovOptions& opt)
{
    PhasePoint x = seed, y = seed;
    y.R1 += opt.d0;
    const long n = std::lround(opt.t_end_fs / opt.dt_fs);
    double L = 0.0;
    for (long i = 1; i <= n; ++i) {
        symplectic_step(x, opt.dt_fs, m);
        symplectic_step(y, opt.dt_fs, m);
        const double d = config_distance(x, y);
        if (d > opt.renorm_factor * opt.d0) {
            L += std::log(d / opt.d0);
            const double f = opt.d0 / d;
            y.R1 = x.R1 + (y.R1 - x.R1) * f;
            y.R2 = x.R2 + (y.R2 - x.R2) * f;
            y.P1 = x.P1 + (y.P1 - x.P1) * f;
            y.P2 = x.P2 + (y.P2 - x.P2) * f;
        }
    }
    L += std::log(config_distance(x, y) / opt.d0);
    return L / (n * opt.dt_fs * 1e-3);
}

IslandEstimate island_fraction(double E, const ClassicalModel& m, double R2s, const IslandOptions& opt, int threads)
{
    const auto rr = section_r1_range(E, m, R2s);
    double pmax = 0.0;
    for (int i = 0; i <= 400; ++i)
        pmax = std::max(pmax, section_p1_limit(rr[0] + (rr[1] - rr[0]) * i / 400.0, E, m, R2s));

    std::vector<PhasePoint> seeds;
    for (int i = 0; i < opt.n_R1; ++i)
        for (int j = 0; j < opt.n_P1; ++j) {
            const double R1 = rr[0] + (rr[1] - rr[0]) * (i + 0.5) / opt.n_R1;
            const double P1 = -pmax + 2.0 * pmax * (j + 0.5) / opt.n_P1;
            if (auto x = on_shell(R1, P1, E, m, R2s))
                seeds.push_back(*x);
        }
    IslandEstimate est;
    est.n_cells = static_cast<int>(seeds.size());
    est.cells.resize(seeds.size());
    parallel_for(est.n_cells, threads, [&](int k) {
        est.cells[k] = {seeds[k].R1, seeds[k].P1, finite_time_lyapunov(seeds[k], m, opt.lyap)};
    });
    for (const auto& c : est.cells)
        if (c[2] < opt.threshold_per_ps)
            ++est.n_regular;
    est.fraction = est.n_cells ? double(est.n_regular) / est.n_cells : 0.0;
    return est;
}

std::vector<BondEnergySample> bond_energy_trace(const Trajectory& traj, const ClassicalModel& m)
{
    std::vector<BondEnergySample> out;
    out.reserve(traj.points.size());
    for (const auto& x : traj.points) {
        const double cs = m.bond_energy_cs(x), co = m.bond_energy_co(x);
        out.push_back({x.t, cs, co, m.energy(x) - cs - co});
    }
    return out;
}

EnsembleDecay ensemble_decay(double E, const ClassicalModel& m, const EnsembleOptions& opt, int threads)
{
    const double R2s = m.surface.morse[1].R0;
    const double e_cs = E - opt.E_co_ground;

    // CS orbit on the cut R2 = R2^0 at E - E0(CO), sampled uniformly in time. The
    // bare V1 well is shallower than this energy; the cut includes V3 and c0.
    std::vector<std::array<double, 2>> orbit;
    {
        double lo = 0.5, hi = m.surface.morse[0].R0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (m.potential(mid, R2s) > e_cs ? lo : hi) = mid;
        }
        double r = hi, p = 0.0;
        const double h = 0.01 * units::au_per_fs;
        bool left = false;
        for (int i = 0; i < 2000000; ++i) {
            orbit.push_back({r, p});
            p -= 0.5 * h * m.gradient(r, R2s)[0];
            r += h * m.a11 * p;
            p -= 0.5 * h * m.gradient(r, R2s)[0];
            if (p < 0.0)
                left = true;
            if (left && p >= 0.0)
                break;
        }
    }
    // CO at a turning point of its ground-level orbit
    const auto& co = m.surface.morse[1];
    const double y = std::sqrt(opt.E_co_ground / co.D);
    const std::array<double, 2> r2_turn{co.R0 - std::log(1.0 / (1.0 - y)) / co.beta,
                                        co.R0 - std::log(1.0 / (1.0 + y)) / co.beta};

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, orbit.size() - 1);
    std::bernoulli_distribution side(0.5);
    std::vector<PhasePoint> starts;
    while (static_cast<int>(starts.size()) < opt.n_traj) {
        const auto o = orbit[pick(rng)];
        const double R2 = r2_turn[side(rng) ? 1 : 0];
        const double room = E - m.potential(o[0], R2);
        if (room <= 0.0)
            continue;
        // CO at rest, P1 rescaled so that H = E
        const double P1 = std::copysign(std::sqrt(2.0 * room / m.a11), o[1] == 0.0 ? 1.0 : o[1]);
        starts.push_back(PhasePoint{o[0], R2, P1, 0.0, 0.0});
    }

    const int every = std::max(1, opt.record_every);
    const long n = std::lround(opt.t_end_fs / opt.dt_fs);
    const long nrec = n / every + 1;
    std::vector<std::vector<double>> ecs(opt.n_traj, std::vector<double>(nrec, 0.0));
    double e_total = 0.0;
    for (const auto& x : starts)
        e_total += m.energy(x) / opt.n_traj;
    parallel_for(opt.n_traj, threads, [&](int k) {
        PhasePoint x = starts[k];
        ecs[k][0] = m.bond_energy_cs(x);
        for (long i = 1; i <= n; ++i) {
            symplectic_step(x, opt.dt_fs, m);
            if (i % every == 0 && i / every < nrec)
                ecs[k][i / every] = m.bond_energy_cs(x);
        }
    });

    EnsembleDecay out;
    out.t_fs.resize(nrec);
    out.mean_E_cs.assign(nrec, 0.0);
    for (long i = 0; i < nrec; ++i) {
        out.t_fs[i] = i * every * opt.dt_fs;
        for (int k = 0; k < opt.n_traj; ++k)
            out.mean_E_cs[i] += ecs[k][i];
        out.mean_E_cs[i] /= opt.n_traj;
    }

    // E(t) = E_inf + (E0 - E_inf) exp(-t/tau); E_inf is linear given tau
    const double E0 = out.mean_E_cs[0];
    auto best_inf = [&](double tau) {
        double num = 0.0, den = 0.0;
        for (long i = 0; i < nrec; ++i) {
            const double u = 1.0 - std::exp(-out.t_fs[i] / tau);
            num += (out.mean_E_cs[i] - E0) * u;
            den += u * u;
        }
        return E0 + num / den;
    };
    auto sse = [&](double log_tau) {
        const double tau = std::exp(log_tau);
        const double Einf = best_inf(tau);
        double s = 0.0;
        for (long i = 0; i < nrec; ++i) {
            const double r = Einf + (E0 - Einf) * std::exp(-out.t_fs[i] / tau) - out.mean_E_cs[i];
            s += r * r;
        }
        return s;
    };
    const double lo = std::log(0.1), hi = std::log(1e5);
    const int scan = 200;
    int best = 0;
    double bv = sse(lo);
    for (int k = 1; k <= scan; ++k)
        if (const double v = sse(lo + (hi - lo) * k / scan); v < bv) {
            bv = v;
            best = k;
        }
    const auto r = boost::math::tools::brent_find_minima(sse, lo + (hi - lo) * std::max(0, best - 1) / scan,
                                                         lo + (hi - lo) * std::min(scan, best + 1) / scan, 52);
    out.tau_fs = std::exp(r.first);
    out.E_inf = best_inf(out.tau_fs);
    out.rms = std::sqrt(r.second / nrec);
    out.amplitude = E0 - out.E_inf;
    out.mean_E_total = e_total;
    out.resolved = out.tau_fs < opt.t_end_fs;
    return out;
}

} // namespace ivr
