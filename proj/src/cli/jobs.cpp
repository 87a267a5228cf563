#include "spinlab/cli/jobs.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include <json.hpp>

#include "spinlab/cli/csv.hpp"
#include "spinlab/cli/svg.hpp"
#include "spinlab/hpa.hpp"
#include "spinlab/liouville.hpp"
#include "spinlab/meanfield.hpp"
#include "spinlab/models.hpp"
#include "spinlab/quench_map.hpp"
#include "spinlab/twa.hpp"

namespace spinlab::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Bounded worker pool over grid points; results land in index order so the
// emitted files do not depend on the worker count.
void parallel_for(int n, int workers, const std::function<void(int)>& body,
                  std::map<int, std::string>& errors) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, n));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    auto run = [&] {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n) break;
            try {
                body(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors[i] = e.what();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
}

ChainSpec chain_from_model(const std::map<std::string, std::string>& model) {
    ChainSpec spec;
    spec.n_cells = static_cast<int>(get_long(model, "n_cells", 1));
    spec.s = get_double(model, "s", 0.5);
    spec.g = get_double(model, "g", 1.0);
    spec.h = get_double(model, "h", 0.0);
    double gbar = get_double(model, "gamma_bar", std::nan(""));
    if (std::isnan(gbar)) {
        spec.gamma_g = get_double(model, "gamma_g", 0.0);
        spec.gamma_l = get_double(model, "gamma_l", 0.0);
    } else {
        spec.gamma_g = spec.gamma_l = gbar;
    }
    std::string b = get_string(model, "boundary", spec.n_cells == 1 ? "open" : "periodic");
    if (b != "open" && b != "periodic")
        throw std::invalid_argument("config: boundary must be open or periodic");
    spec.boundary = b == "open" ? Boundary::Open : Boundary::Periodic;
    return spec;
}

KerrSpec kerr_from_model(const std::map<std::string, std::string>& model) {
    KerrSpec spec;
    spec.delta = get_double(model, "delta", 0.0);
    spec.u = get_double(model, "u", 0.0);
    spec.f = get_double(model, "f", 0.0);
    spec.gamma = get_double(model, "gamma", 1.0);
    spec.d = get_double(model, "d", 1.0);
    spec.cutoff = static_cast<int>(get_long(model, "cutoff", 0));
    return spec;
}

void apply_axis(ChainSpec& spec, const std::string& axis, double value) {
    if (axis == "gamma_bar") {
        spec.gamma_g = spec.gamma_l = value;
    } else if (axis == "gamma_g") {
        spec.gamma_g = value;
    } else if (axis == "gamma_l") {
        spec.gamma_l = value;
    } else if (axis == "delta_gamma") {
        double gbar = 0.5 * (spec.gamma_g + spec.gamma_l);
        spec.gamma_g = gbar + 0.5 * value;
        spec.gamma_l = gbar - 0.5 * value;
    } else if (axis == "h") {
        spec.h = value;
    } else {
        throw std::invalid_argument("config: unknown sweep axis '" + axis + "' for this job");
    }
}

struct JobContext {
    const JobConfig& cfg;
    fs::path out;
    std::vector<std::string> files;
    std::map<int, std::string> errors;
    int n_points = 0;
    json extra; // job-specific manifest payload
};

void job_phase_diagram(JobContext& ctx) {
    if (ctx.cfg.sweeps.size() != 2)
        throw std::invalid_argument("phase-diagram needs [sweep] (gamma_g) and [sweep2] (gamma_l)");
    double g = get_double(ctx.cfg.model, "g", 1.0);
    double h = get_double(ctx.cfg.model, "h", 0.0);
    auto gg = ctx.cfg.sweeps[0].values();
    auto gl = ctx.cfg.sweeps[1].values();
    ctx.n_points = static_cast<int>(gg.size() * gl.size());

    struct Row {
        double gg, gl;
        PhaseLabel phase;
        double xi, purity, neg;
    };
    std::vector<Row> rows(ctx.n_points);
    parallel_for(ctx.n_points, ctx.cfg.workers, [&](int idx) {
        int i = idx / static_cast<int>(gl.size());
        int j = idx % static_cast<int>(gl.size());
        Row r{gg[i], gl[j], classify_phase(gg[i], gl[j], g, h), std::nan(""), std::nan(""),
              std::nan("")};
        if (r.phase == PhaseLabel::AM && h > 0.0)
            r.xi = correlation_length(r.gg, r.gl, g, h).xi;
        if (h == 0.0 &&
            (r.phase == PhaseLabel::AM || r.phase == PhaseLabel::FM_UP ||
             r.phase == PhaseLabel::FM_DOWN)) {
            r.purity = purity_closed_form(r.gg, r.gl, g, r.phase);
            if (r.phase != PhaseLabel::AM || r.gg == r.gl)
                r.neg = negativity_closed_form(r.gg, r.gl, g, r.phase);
        }
        rows[idx] = r;
    }, ctx.errors);

    CsvFile csv((ctx.out / "phase_diagram.csv").string(),
                {"gamma_g", "gamma_l", "g", "h", "phase", "xi", "purity", "negativity"});
    for (const auto& r : rows)
        csv.row({csv_num(r.gg), csv_num(r.gl), csv_num(g), csv_num(h), phase_name(r.phase),
                 csv_num(r.xi), csv_num(r.purity), csv_num(r.neg)});
    ctx.files.push_back(csv.path());
}

void job_hpa_scan(JobContext& ctx) {
    if (ctx.cfg.sweeps.size() != 1) throw std::invalid_argument("hpa-scan needs one [sweep]");
    ChainSpec base = chain_from_model(ctx.cfg.model);
    auto values = ctx.cfg.sweeps[0].values();
    ctx.n_points = static_cast<int>(values.size());

    struct Row {
        double v, gg, gl;
        PhaseLabel phase;
        double n_a, n_b, xi, purity, neg;
    };
    std::vector<Row> rows(ctx.n_points);
    parallel_for(ctx.n_points, ctx.cfg.workers, [&](int idx) {
        ChainSpec spec = base;
        apply_axis(spec, ctx.cfg.sweeps[0].axis, values[idx]);
        Row r{values[idx], spec.gamma_g, spec.gamma_l,
              classify_phase(spec.gamma_g, spec.gamma_l, spec.g, spec.h),
              std::nan(""), std::nan(""), std::nan(""), std::nan(""), std::nan("")};
        if (r.phase == PhaseLabel::AM || r.phase == PhaseLabel::FM_UP ||
            r.phase == PhaseLabel::FM_DOWN) {
            auto mags = magnetizations(spec.gamma_g, spec.gamma_l, spec.g, spec.h, r.phase);
            r.n_a = mags.n_a;
            r.n_b = mags.n_b;
            if (r.phase == PhaseLabel::AM && spec.h > 0.0)
                r.xi = correlation_length(spec.gamma_g, spec.gamma_l, spec.g, spec.h).xi;
            if (spec.h == 0.0) {
                r.purity = purity_closed_form(spec.gamma_g, spec.gamma_l, spec.g, r.phase);
                if (r.phase != PhaseLabel::AM || spec.gamma_g == spec.gamma_l)
                    r.neg = negativity_closed_form(spec.gamma_g, spec.gamma_l, spec.g, r.phase);
            }
        }
        rows[idx] = r;
    }, ctx.errors);

    CsvFile csv((ctx.out / "hpa_scan.csv").string(),
                {"axis_value", "gamma_g", "gamma_l", "phase", "n_a", "n_b", "xi", "purity",
                 "negativity"});
    for (const auto& r : rows)
        csv.row({csv_num(r.v), csv_num(r.gg), csv_num(r.gl), phase_name(r.phase), csv_num(r.n_a),
                 csv_num(r.n_b), csv_num(r.xi), csv_num(r.purity), csv_num(r.neg)});
    ctx.files.push_back(csv.path());

    if (ctx.cfg.svg) {
        SvgPlot plot("hpa scan", ctx.cfg.sweeps[0].axis, "xi");
        std::vector<double> xs, ys;
        for (const auto& r : rows)
            if (std::isfinite(r.xi)) {
                xs.push_back(r.v);
                ys.push_back(r.xi);
            }
        plot.add_line(xs, ys, "steelblue");
        std::string p = (ctx.out / "hpa_scan.svg").string();
        plot.write(p);
        ctx.files.push_back(p);
    }
}

void job_dimer_exact(JobContext& ctx) {
    if (ctx.cfg.sweeps.size() != 1) throw std::invalid_argument("dimer-exact needs one [sweep]");
    ChainSpec base = chain_from_model(ctx.cfg.model);
    auto values = ctx.cfg.sweeps[0].values();
    ctx.n_points = static_cast<int>(values.size());
    int k = static_cast<int>(get_long(ctx.cfg.run, "k_eigenvalues", 8));
    std::string strategy = get_string(ctx.cfg.run, "strategy", "shift_invert");

    struct Row {
        double v, gap;
        double mz, sza, szb, purity, impurity;
        int near_zero;
    };
    std::vector<Row> rows(ctx.n_points);
    parallel_for(ctx.n_points, ctx.cfg.workers, [&](int idx) {
        ChainSpec spec = base;
        apply_axis(spec, ctx.cfg.sweeps[0].axis, values[idx]);
        ModelOperators model = build_chain(spec);
        Superoperator liou = vectorize(model);
        VecR mz_diag = chain_mz_diagonal(spec);
        SteadyState ss = steady_state(liou, mz_diag);
        ChainObservables obs = chain_observables(ss, spec);
        SpectrumStrategy strat = strategy == "dense"
                                     ? SpectrumStrategy::Dense
                                     : (strategy == "sector_dense" ? SpectrumStrategy::SectorDense
                                                                   : SpectrumStrategy::ShiftInvert);
        SpectrumResult spec_res = spectrum(liou, k, strat, mz_diag);
        double tol = get_double(ctx.cfg.run, "near_zero_tol", 1e-8) * liou.inf_norm();
        rows[idx] = Row{values[idx], spec_res.gap, obs.mz_order, obs.sz[0], obs.sz[1],
                        obs.purity, obs.impurity, spec_res.count_near_zero(tol)};
    }, ctx.errors);

    CsvFile csv((ctx.out / "dimer_exact.csv").string(),
                {"axis_value", "gap", "mz_order", "sz_a", "sz_b", "purity", "impurity",
                 "count_near_zero"});
    for (const auto& r : rows)
        csv.row({csv_num(r.v), csv_num(r.gap), csv_num(r.mz), csv_num(r.sza), csv_num(r.szb),
                 csv_num(r.purity), csv_num(r.impurity), std::to_string(r.near_zero)});
    ctx.files.push_back(csv.path());

    if (ctx.cfg.svg) {
        SvgPlot plot("dimer gap", ctx.cfg.sweeps[0].axis, "gap");
        std::vector<double> xs, ys;
        for (const auto& r : rows) {
            xs.push_back(r.v);
            ys.push_back(r.gap);
        }
        plot.add_line(xs, ys, "firebrick");
        std::string p = (ctx.out / "dimer_gap.svg").string();
        plot.write(p);
        ctx.files.push_back(p);
    }
}

void job_kerr(JobContext& ctx) {
    if (ctx.cfg.sweeps.size() != 1) throw std::invalid_argument("kerr needs one [sweep] over f");
    if (ctx.cfg.sweeps[0].axis != "f")
        throw std::invalid_argument("kerr sweep axis must be 'f'");
    KerrSpec base = kerr_from_model(ctx.cfg.model);
    auto values = ctx.cfg.sweeps[0].values();
    ctx.n_points = static_cast<int>(values.size());
    int k = static_cast<int>(get_long(ctx.cfg.run, "k_eigenvalues", 6));
    bool dump_pn = get_bool(ctx.cfg.run, "dump_pn", false);
    double nz_tol = get_double(ctx.cfg.run, "near_zero_tol", 1e-3);

    struct Row {
        double f, gap, n_mean, purity;
        int near_zero;
        VecR pn;
    };
    std::vector<Row> rows(ctx.n_points);
    parallel_for(ctx.n_points, ctx.cfg.workers, [&](int idx) {
        KerrSpec spec = base;
        spec.f = values[idx];
        ModelOperators model = build_kerr(spec);
        Superoperator liou = vectorize(model);
        SteadyState ss = steady_state(liou);
        KerrObservables obs = kerr_observables(ss, spec);
        SpectrumResult sres = spectrum(liou, k, SpectrumStrategy::ShiftInvert);
        Row r{spec.f, sres.gap, obs.n_mean, obs.purity,
              sres.count_near_zero(nz_tol * spec.gamma), VecR()};
        if (dump_pn) r.pn = obs.pn;
        rows[idx] = r;
    }, ctx.errors);

    CsvFile csv((ctx.out / "kerr.csv").string(),
                {"f", "gap", "n_mean", "purity", "count_near_zero"});
    for (const auto& r : rows)
        csv.row({csv_num(r.f), csv_num(r.gap), csv_num(r.n_mean), csv_num(r.purity),
                 std::to_string(r.near_zero)});
    ctx.files.push_back(csv.path());
    if (dump_pn) {
        CsvFile pn((ctx.out / "kerr_pn.csv").string(), {"f", "n", "p"});
        for (const auto& r : rows)
            for (int n = 0; n < r.pn.size(); ++n)
                pn.row({csv_num(r.f), std::to_string(n), csv_num(r.pn(n))});
        ctx.files.push_back(pn.path());
    }
}

void job_spectrum(JobContext& ctx) {
    std::string which = get_string(ctx.cfg.run, "model", "chain");
    int k = static_cast<int>(get_long(ctx.cfg.run, "k_eigenvalues", 12));
    std::string strategy = get_string(ctx.cfg.run, "strategy", "shift_invert");
    ctx.n_points = 1;

    Superoperator liou;
    std::optional<VecR> mz;
    if (which == "chain") {
        ChainSpec spec = chain_from_model(ctx.cfg.model);
        liou = vectorize(build_chain(spec));
        mz = chain_mz_diagonal(spec);
    } else if (which == "kerr") {
        liou = vectorize(build_kerr(kerr_from_model(ctx.cfg.model)));
    } else {
        throw std::invalid_argument("spectrum: run.model must be chain or kerr");
    }
    SpectrumStrategy strat = strategy == "dense"
                                 ? SpectrumStrategy::Dense
                                 : (strategy == "sector_dense" ? SpectrumStrategy::SectorDense
                                                               : SpectrumStrategy::ShiftInvert);
    SpectrumResult res = spectrum(liou, k, strat, mz);
    CsvFile csv((ctx.out / "spectrum.csv").string(), {"re", "im"});
    for (const auto& ev : res.eigenvalues) csv.row({csv_num(ev.real()), csv_num(ev.imag())});
    ctx.files.push_back(csv.path());
    ctx.extra["gap"] = res.gap;
}

void job_meanfield(JobContext& ctx) {
    MfParams params;
    params.s = get_double(ctx.cfg.model, "s", 1.0);
    params.g = get_double(ctx.cfg.model, "g", 1.0);
    params.h = get_double(ctx.cfg.model, "h", 0.0);
    params.gamma_g = get_double(ctx.cfg.model, "gamma_g", 0.0);
    params.gamma_l = get_double(ctx.cfg.model, "gamma_l", 0.0);
    double gbar = get_double(ctx.cfg.model, "gamma_bar", std::nan(""));
    if (!std::isnan(gbar)) params.gamma_g = params.gamma_l = gbar;
    double t_max = get_double(ctx.cfg.run, "t_max", 200.0);
    double theta = get_double(ctx.cfg.run, "theta", M_PI / 2.0);
    double phi = get_double(ctx.cfg.run, "phi", 0.0);
    ctx.n_points = 1;

    MfState init{params.s * std::sin(theta) * std::cos(phi),
                 params.s * std::sin(theta) * std::sin(phi), params.s * std::cos(theta),
                 params.s * std::sin(theta) * std::cos(phi),
                 params.s * std::sin(theta) * std::sin(phi), params.s * std::cos(theta)};
    MfTrajectory traj = integrate_mf(init, params, t_max);

    CsvFile csv((ctx.out / "meanfield.csv").string(),
                {"t", "sx_a", "sy_a", "sz_a", "sx_b", "sy_b", "sz_b"});
    for (size_t i = 0; i < traj.t.size(); ++i)
        csv.row({csv_num(traj.t[i]), csv_num(traj.y[i][0]), csv_num(traj.y[i][1]),
                 csv_num(traj.y[i][2]), csv_num(traj.y[i][3]), csv_num(traj.y[i][4]),
                 csv_num(traj.y[i][5])});
    ctx.files.push_back(csv.path());
    auto cls = [](MfClass c) {
        return c == MfClass::FixedPoint ? "fixed-point"
                                        : (c == MfClass::LimitCycle ? "limit-cycle" : "undecided");
    };
    ctx.extra["classification"] = cls(traj.overall);
    ctx.extra["sublattice_a"] = cls(traj.sublattice_a);
    ctx.extra["sublattice_b"] = cls(traj.sublattice_b);
    ctx.extra["time_avg_sz_a"] = traj.time_avg_sz_a;
    ctx.extra["time_avg_sz_b"] = traj.time_avg_sz_b;
}

void job_cmf(JobContext& ctx) {
    CmfSpec spec;
    spec.s = get_double(ctx.cfg.model, "s", 0.5);
    spec.g = get_double(ctx.cfg.model, "g", 1.0);
    spec.h = get_double(ctx.cfg.model, "h", spec.g);
    double gbar = get_double(ctx.cfg.model, "gamma_bar", std::nan(""));
    spec.gamma_g = std::isnan(gbar) ? get_double(ctx.cfg.model, "gamma_g", 1.0) : gbar;
    spec.gamma_l = std::isnan(gbar) ? get_double(ctx.cfg.model, "gamma_l", 1.0) : gbar;
    spec.n_c = static_cast<int>(get_long(ctx.cfg.run, "n_c", 1));
    spec.transformed = get_bool(ctx.cfg.run, "transformed", false);
    spec.tolerance = get_double(ctx.cfg.run, "tolerance", 1e-5);
    spec.window = get_double(ctx.cfg.run, "window", 4.0);
    spec.dt = get_double(ctx.cfg.run, "dt_cluster", 0.02);
    spec.max_windows = static_cast<int>(get_long(ctx.cfg.run, "max_windows", 400));
    double bias = get_double(ctx.cfg.run, "bias", M_PI / 2.0);
    ctx.n_points = 1;

    CmfResult res = cmf_solve(spec, bias);
    json report;
    report["n_c"] = spec.n_c;
    report["s"] = spec.s;
    report["transformed"] = spec.transformed;
    report["bias"] = bias;
    report["s_perp"] = res.s_perp;
    report["sx"] = res.sx;
    report["sy"] = res.sy;
    report["sz"] = res.sz;
    report["converged"] = res.converged;
    report["windows_used"] = res.windows_used;
    report["residual"] = res.residual;
    std::string path = (ctx.out / "cmf_report.json").string();
    std::ofstream f(path);
    f << report.dump(2) << "\n";
    ctx.files.push_back(path);
    ctx.extra["s_perp"] = res.s_perp;
}

void job_twa(JobContext& ctx) {
    TwaConfig config;
    config.chain.n_cells = static_cast<int>(get_long(ctx.cfg.model, "n_cells", 1));
    config.chain.s = get_double(ctx.cfg.model, "s", 1.0);
    config.chain.g = get_double(ctx.cfg.model, "g", 1.0);
    config.chain.h = get_double(ctx.cfg.model, "h", 0.0);
    double gbar = get_double(ctx.cfg.model, "gamma_bar", std::nan(""));
    config.chain.gamma_g = std::isnan(gbar) ? get_double(ctx.cfg.model, "gamma_g", 0.0) : gbar;
    config.chain.gamma_l = std::isnan(gbar) ? get_double(ctx.cfg.model, "gamma_l", 0.0) : gbar;
    std::string b = get_string(ctx.cfg.model, "boundary", "periodic");
    config.chain.boundary = b == "open" ? Boundary::Open : Boundary::Periodic;
    config.n_traj = static_cast<int>(get_long(ctx.cfg.run, "n_traj", 500));
    config.dt = get_double(ctx.cfg.run, "dt", 0.01);
    config.t_max = get_double(ctx.cfg.run, "t_max", 20.0);
    config.save_interval = get_double(ctx.cfg.run, "save_interval", 0.2);
    config.seed = ctx.cfg.seed;
    config.noise_enabled = get_bool(ctx.cfg.run, "noise", true);
    config.collect_correlators = get_bool(ctx.cfg.run, "correlators", false);
    config.max_separation = static_cast<int>(get_long(ctx.cfg.run, "max_separation", 0));
    std::string scheme = get_string(ctx.cfg.run, "scheme", "heun");
    config.scheme = scheme == "euler-maruyama" ? kernels::Scheme::EulerMaruyama
                                               : kernels::Scheme::StochasticHeun;
    config.n_threads = ctx.cfg.workers > 0 ? ctx.cfg.workers
                                           : static_cast<int>(std::thread::hardware_concurrency());
    double theta = get_double(ctx.cfg.run, "theta", M_PI / 2.0);
    double phi = get_double(ctx.cfg.run, "phi", 0.0);
    ctx.n_points = 1;

    InitialSpec initial{{{theta, phi}}};
    ObservableSeries series = run_ensemble(config, initial);

    CsvFile csv((ctx.out / "twa_series.csv").string(), {"t", "observable", "mean", "stderr"});
    for (size_t i = 0; i < series.t.size(); ++i) {
        csv.row({csv_num(series.t[i]), "sz_a", csv_num(series.sz_a[i]), csv_num(series.sz_a_err[i])});
        csv.row({csv_num(series.t[i]), "sz_b", csv_num(series.sz_b[i]), csv_num(series.sz_b_err[i])});
        csv.row({csv_num(series.t[i]), "var_sz_a", csv_num(series.var_sz_a[i]), csv_num(0.0)});
        csv.row({csv_num(series.t[i]), "var_sz_b", csv_num(series.var_sz_b[i]), csv_num(0.0)});
        csv.row({csv_num(series.t[i]), "s_perp", csv_num(series.s_perp[i]), csv_num(series.s_perp_err[i])});
    }
    ctx.files.push_back(csv.path());

    if (config.collect_correlators && !series.corr_aa.empty()) {
        CsvFile corr((ctx.out / "twa_correlators.csv").string(),
                     {"t", "separation", "re", "im", "abs"});
        for (size_t i = 0; i < series.t.size(); ++i)
            for (size_t s = 0; s < series.corr_aa[i].size(); ++s)
                corr.row({csv_num(series.t[i]), std::to_string(s + 1),
                          csv_num(series.corr_aa[i][s].real()), csv_num(series.corr_aa[i][s].imag()),
                          csv_num(std::abs(series.corr_aa[i][s]))});
        ctx.files.push_back(corr.path());
    }

    json summary;
    summary["n_trajectories"] = series.n_trajectories;
    summary["n_excluded"] = series.n_excluded;
    summary["kernel"] = kernels::active_kernel_name();
    summary["final_sz_a"] = series.sz_a.back();
    summary["final_sz_b"] = series.sz_b.back();
    summary["final_s_perp"] = series.s_perp.back();
    std::string spath = (ctx.out / "twa_summary.json").string();
    std::ofstream f(spath);
    f << summary.dump(2) << "\n";
    ctx.files.push_back(spath);

    if (ctx.cfg.svg) {
        SvgPlot plot("twa magnetization", "t", "sz");
        plot.add_line(series.t, series.sz_a, "steelblue");
        plot.add_line(series.t, series.sz_b, "firebrick");
        std::string p = (ctx.out / "twa_sz.svg").string();
        plot.write(p);
        ctx.files.push_back(p);
    }
}

void job_quench_map(JobContext& ctx) {
    ChainSpec spec = chain_from_model(ctx.cfg.model);
    bool keep = get_bool(ctx.cfg.run, "keep_spectra", false);
    StabilityMapSummary map = stability_map(spec, keep);
    ctx.n_points = static_cast<int>(map.records.size());

    CsvFile csv((ctx.out / "quench_map.csv").string(),
                {"bitstring", "re_mu_max", "im_mu_max", "class"});
    for (const auto& rec : map.records) {
        const char* cls = rec.cls == StabilityClass::Stable
                              ? "stable"
                              : (rec.cls == StabilityClass::Neutral ? "neutral" : "unstable");
        csv.row({rec.config.to_string(), csv_num(rec.mu_max.real()), csv_num(rec.mu_max.imag()),
                 cls});
    }
    ctx.files.push_back(csv.path());
    if (keep) {
        CsvFile full((ctx.out / "quench_spectra.csv").string(), {"bitstring", "re", "im"});
        for (const auto& rec : map.records)
            for (const auto& mu : rec.spectrum)
                full.row({rec.config.to_string(), csv_num(mu.real()), csv_num(mu.imag())});
        ctx.files.push_back(full.path());
    }
    ctx.extra["n_stable"] = map.n_stable;
    ctx.extra["n_neutral"] = map.n_neutral;
    ctx.extra["n_unstable"] = map.n_unstable;
    ctx.extra["tol"] = map.tol;

    if (ctx.cfg.svg) {
        SvgPlot plot("quench fingerprint", "Re mu", "Im mu");
        std::vector<double> xs, ys;
        for (const auto& rec : map.records) {
            xs.push_back(rec.mu_max.real());
            ys.push_back(rec.mu_max.imag());
        }
        plot.add_scatter(xs, ys, "steelblue");
        std::string p = (ctx.out / "quench_map.svg").string();
        plot.write(p);
        ctx.files.push_back(p);
    }
}

} // namespace

JobOutcome run_job(const JobConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    JobOutcome outcome;
    JobContext ctx{cfg, fs::path(cfg.out_dir), {}, {}, 0, json::object()};
    fs::create_directories(ctx.out);

    try {
        if (cfg.job == "phase-diagram") job_phase_diagram(ctx);
        else if (cfg.job == "hpa-scan") job_hpa_scan(ctx);
        else if (cfg.job == "dimer-exact") job_dimer_exact(ctx);
        else if (cfg.job == "kerr") job_kerr(ctx);
        else if (cfg.job == "spectrum") job_spectrum(ctx);
        else if (cfg.job == "meanfield") job_meanfield(ctx);
        else if (cfg.job == "cmf") job_cmf(ctx);
        else if (cfg.job == "twa") job_twa(ctx);
        else if (cfg.job == "quench-map") job_quench_map(ctx);
        else throw std::invalid_argument("unknown job kind: " + cfg.job);
    } catch (const std::exception& e) {
        ctx.errors[-1] = e.what();
        outcome.exit_code = 2;
    }

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string config_text = serialize_config(cfg);
    json manifest;
    manifest["job"] = cfg.job;
    manifest["config"] = config_text;
    manifest["config_hash"] = hex64(fnv1a(config_text));
    manifest["seed"] = cfg.seed;
    manifest["workers"] = cfg.workers;
    manifest["versions"] = {{"spinlab", "0.1.0"},
                            {"compiler", __VERSION__},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
    manifest["wall_time_s"] = wall;
    manifest["n_points"] = ctx.n_points;
    manifest["n_errors"] = static_cast<int>(ctx.errors.size());
    json errs = json::array();
    for (const auto& [idx, msg] : ctx.errors) errs.push_back({{"index", idx}, {"message", msg}});
    manifest["errors"] = errs;
    manifest["outputs"] = ctx.files;
    manifest["extra"] = ctx.extra;

    std::string mpath = (ctx.out / "manifest.json").string();
    std::ofstream mf(mpath);
    mf << manifest.dump(2) << "\n";

    outcome.files = ctx.files;
    outcome.manifest_path = mpath;
    outcome.n_points = ctx.n_points;
    outcome.n_errors = static_cast<int>(ctx.errors.size());
    if (outcome.exit_code == 0 && ctx.n_points > 0 &&
        outcome.n_errors > 0.1 * ctx.n_points)
        outcome.exit_code = 3;
    return outcome;
}

} // namespace spinlab::cli
