// qmemsim command-line front end.
//
// Drives the simulation exclusively through the public C API of the shared
// library.  Subcommands:
//
//   optimal-pulse   matched input pulse for one or more optical depths
//   simulate        full pass: input, output, depth profile, metrics
//   sweep           metrics versus optical depth (optionally threaded)
//   figure fig2     input/output pulse shapes
//   figure fig3     excitation profiles on a common z/L axis
//
// Exit codes: 0 success, 1 some sweep points failed, 2 invalid arguments or
// input data, 3 filesystem errors.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmemsim/qmemsim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CliError{code, message}; }

// Any C-API failure during normal operation traces back to the request
// (grid, parameters, input data), so it maps to the validation exit code.
void check(qms_status st, const char* what) {
    if (st != QMS_OK) {
        fail(kExitConfig, std::string(what) + ": " + qms_last_error());
    }
}

struct MediumDeleter {
    void operator()(qms_medium* p) const { qms_medium_free(p); }
};
struct SignalDeleter {
    void operator()(qms_signal* p) const { qms_signal_free(p); }
};
struct ProfileDeleter {
    void operator()(qms_profile* p) const { qms_profile_free(p); }
};
using MediumPtr = std::unique_ptr<qms_medium, MediumDeleter>;
using SignalPtr = std::unique_ptr<qms_signal, SignalDeleter>;
using ProfilePtr = std::unique_ptr<qms_profile, ProfileDeleter>;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Compact value tag for file names: 10 -> "10", 0.5 -> "0.5".
std::string tag(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Options {
    std::vector<double> alpha_l;
    double t2 = 1.0;
    double dt = 0.0;  // 0: derive from the medium's default grid
    double t_min = std::numeric_limits<double>::quiet_NaN();
    double t_max = std::numeric_limits<double>::quiet_NaN();
    std::size_t z_points = 512;
    std::string input_path;
    std::string out_dir = ".";
    std::string format = "both";
    unsigned jobs = 1;
    std::string config_path;
    std::string figure;
};

bool wants_csv(const Options& o) { return o.format != "json"; }
bool wants_json(const Options& o) { return o.format != "csv"; }
bool custom_grid(const Options& o) {
    return o.dt > 0.0 || !std::isnan(o.t_min) || !std::isnan(o.t_max);
}

struct RunContext {
    Options opt;
    fs::path out_dir;
    std::vector<std::string> files_written;
    std::chrono::steady_clock::time_point start;
};

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void note_file(RunContext& ctx, const fs::path& p) {
    ctx.files_written.push_back(p.filename().string());
    std::cout << "wrote: " << p.string() << "\n";
}

void write_csv(RunContext& ctx, const fs::path& path, const std::string& header,
               const std::vector<const std::vector<double>*>& columns) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(kExitIo, "cannot write " + path.string());
    f << header << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns[0]->size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) f << ',';
            f << fmt((*columns[c])[r]);
        }
        f << '\n';
    }
    f.flush();
    if (!f) fail(kExitIo, "write failed: " + path.string());
    note_file(ctx, path);
}

void write_json_file(RunContext& ctx, const fs::path& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(kExitIo, "cannot write " + path.string());
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) fail(kExitIo, "write failed: " + path.string());
    note_file(ctx, path);
}

// ---------------------------------------------------------------------------
// C-API data marshalling
// ---------------------------------------------------------------------------

struct SignalData {
    qms_grid_spec grid{};
    std::vector<double> t, re, im;
};

SignalData signal_data(const qms_signal* s) {
    SignalData d;
    check(qms_signal_grid(s, &d.grid), "signal grid");
    d.t.resize(d.grid.n);
    d.re.resize(d.grid.n);
    d.im.resize(d.grid.n);
    check(qms_signal_copy_data(s, d.re.data(), d.im.data()), "signal data");
    for (std::size_t k = 0; k < d.grid.n; ++k) {
        d.t[k] = d.grid.t_start + static_cast<double>(k) * d.grid.dt;
    }
    return d;
}

struct ProfileData {
    std::vector<double> z, re, im;
};

ProfileData profile_data(const qms_profile* p) {
    ProfileData d;
    std::size_t n = 0;
    check(qms_profile_size(p, &n), "profile size");
    d.z.resize(n);
    d.re.resize(n);
    d.im.resize(n);
    check(qms_profile_copy_data(p, d.z.data(), d.re.data(), d.im.data()), "profile data");
    return d;
}

MediumPtr make_medium_checked(double alpha_l, double t2) {
    if (!(alpha_l > 0.0)) fail(kExitConfig, "optical depth must be positive");
    qms_medium* m = nullptr;
    check(qms_medium_create(alpha_l, 1.0, t2, &m), "medium");
    return MediumPtr(m);
}

// Custom time grid from --dt / --t-min / --t-max, keeping t = 0 on an
// integration-cell boundary; unspecified pieces fall back to the medium's
// default spacing and a +-20 T2 window.
qms_grid_spec build_grid(const Options& o, const qms_medium* m) {
    qms_grid_spec def{};
    check(qms_medium_default_grid(m, &def), "default grid");
    const double dt = o.dt > 0.0 ? o.dt : def.dt;
    const double lo = !std::isnan(o.t_min) ? o.t_min : -20.0 * o.t2;
    const double hi = !std::isnan(o.t_max) ? o.t_max : 20.0 * o.t2;
    const double t_start = (std::floor(lo / dt) + 0.5) * dt;
    const double n_real = std::ceil((hi - t_start) / dt);
    if (!(n_real >= 2.0) || n_real > 1e8) {
        fail(kExitConfig, "grid size out of range (check --dt/--t-min/--t-max)");
    }
    return qms_grid_spec{t_start, dt, static_cast<std::size_t>(n_real)};
}

// ---------------------------------------------------------------------------
// Input CSV reader
// ---------------------------------------------------------------------------

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    std::size_t a = cell.find_first_not_of(" \t");
    std::size_t b = cell.find_last_not_of(" \t");
    if (a == std::string::npos) {
        fail(kExitConfig, "input CSV row " + std::to_string(row) + ", column " +
                              std::to_string(col) + ": empty field");
    }
    const std::string trimmed = cell.substr(a, b - a + 1);
    char* end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &end);
    if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v)) {
        fail(kExitConfig, "input CSV row " + std::to_string(row) + ", column " +
                              std::to_string(col) + ": '" + trimmed + "' is not a finite number");
    }
    return v;
}

SignalPtr read_input_csv(const std::string& path, bool* renormalized) {
    std::ifstream f(path);
    if (!f) fail(kExitIo, "cannot open input file: " + path);

    std::string line;
    if (!std::getline(f, line)) fail(kExitConfig, "input CSV is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,re,im") {
        fail(kExitConfig, "input CSV row 1: header must be exactly 't,re,im'");
    }

    std::vector<double> t, re, im;
    std::size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 3> vals{};
        std::size_t col = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos
                                                          ? std::string::npos
                                                          : comma - pos);
            if (col >= 3) {
                fail(kExitConfig,
                     "input CSV row " + std::to_string(row) + ": expected 3 columns");
            }
            vals[col] = parse_cell(cell, row, col + 1);
            ++col;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (col != 3) {
            fail(kExitConfig, "input CSV row " + std::to_string(row) +
                                  ": expected 3 columns, got " + std::to_string(col));
        }
        t.push_back(vals[0]);
        re.push_back(vals[1]);
        im.push_back(vals[2]);
    }
    if (t.size() < 2) fail(kExitConfig, "input CSV: need at least 2 data rows");

    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) fail(kExitConfig, "input CSV row 3: time must be strictly increasing");
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (std::abs(t[k] - t[k - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
            fail(kExitConfig, "input CSV row " + std::to_string(k + 2) +
                                  ": non-uniform time step");
        }
    }

    const qms_grid_spec grid{t[0], dt, t.size()};
    qms_signal* raw = nullptr;
    check(qms_signal_create(&grid, re.data(), im.data(), &raw), "input signal");
    SignalPtr s(raw);

    double p = 0.0;
    check(qms_signal_probability(s.get(), -HUGE_VAL, HUGE_VAL, &p), "input probability");
    if (!(p > 0.0)) fail(kExitConfig, "input CSV: field carries no probability");
    *renormalized = std::abs(p - 1.0) > 1e-4;
    if (*renormalized) {
        std::cerr << "warning: input probability " << fmt(p)
                  << " differs from 1; renormalizing\n";
        const double scale = 1.0 / std::sqrt(p);
        for (std::size_t k = 0; k < t.size(); ++k) {
            re[k] *= scale;
            im[k] *= scale;
        }
        raw = nullptr;
        check(qms_signal_create(&grid, re.data(), im.data(), &raw), "input signal");
        s.reset(raw);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Shared JSON fragments
// ---------------------------------------------------------------------------

json tool_stamp() {
    return json{{"tool", "qmemsim"}, {"tool_version", qms_version()}};
}

json metrics_json(const qms_metrics& mt) {
    json j;
    j["depth"] = mt.depth;
    j["input_probability"] = mt.input_probability;
    j["efficiency"] = mt.efficiency;
    j["efficiency_asymptotic"] = mt.efficiency_asymptotic;
    j["leak_before_zero"] = mt.leak_before_zero;
    j["retrieved_after_zero"] = mt.retrieved_after_zero;
    j["p_abs"] = mt.p_abs;
    j["p_abs_closed"] = mt.p_abs_closed;
    j["first_burst_fraction"] = mt.first_burst_fraction;
    j["first_burst_t_end"] = mt.first_burst_t_end;
    j["peak_density"] = mt.peak_density;
    j["peak_time"] = mt.peak_time;
    j["flatness_cv"] = mt.flatness_cv;
    j["boundary_layer_width"] = mt.boundary_layer_width;
    j["boundary_layer_expected"] = mt.boundary_layer_expected;
    j["plateau_median"] = mt.plateau_median;
    j["dip_depth"] = mt.dip_depth;
    return j;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_optimal_pulse(RunContext& ctx) {
    const Options& o = ctx.opt;
    for (double v : o.alpha_l) {
        MediumPtr m = make_medium_checked(v, o.t2);
        qms_grid_spec g{};
        const qms_grid_spec* gp = nullptr;
        if (custom_grid(o)) {
            g = build_grid(o, m.get());
            gp = &g;
        }
        qms_signal* raw = nullptr;
        check(qms_optimal_pulse(m.get(), gp, &raw), "optimal pulse");
        SignalPtr pulse(raw);
        const SignalData d = signal_data(pulse.get());

        double p = 0.0, a = 0.0;
        check(qms_signal_probability(pulse.get(), -HUGE_VAL, HUGE_VAL, &p), "probability");
        check(qms_medium_norm_const(m.get(), &a), "norm const");

        if (wants_csv(o)) {
            std::vector<double> t_over(d.t);
            for (double& x : t_over) x /= o.t2;
            write_csv(ctx, ctx.out_dir / ("optimal_pulse_alphaL" + tag(v) + ".csv"),
                      "t_over_T2,F_in", {&t_over, &d.re});
        }
        if (wants_json(o)) {
            json j = tool_stamp();
            j["alpha_L"] = v;
            j["T2"] = o.t2;
            j["A_L"] = a;
            j["input_probability"] = p;
            j["normalization_residual"] = std::abs(p - 1.0);
            j["grid"] = {{"t_start", d.grid.t_start}, {"dt", d.grid.dt}, {"n", d.grid.n}};
            write_json_file(ctx, ctx.out_dir / ("optimal_pulse_alphaL" + tag(v) + ".json"), j);
        }
    }
    return kExitOk;
}

int cmd_simulate(RunContext& ctx) {
    const Options& o = ctx.opt;
    SignalPtr provided;
    bool renormalized = false;
    if (!o.input_path.empty()) provided = read_input_csv(o.input_path, &renormalized);

    for (double v : o.alpha_l) {
        MediumPtr m = make_medium_checked(v, o.t2);
        SignalPtr built;
        if (!provided) {
            qms_grid_spec g{};
            const qms_grid_spec* gp = nullptr;
            if (custom_grid(o)) {
                g = build_grid(o, m.get());
                gp = &g;
            }
            qms_signal* raw = nullptr;
            check(qms_optimal_pulse(m.get(), gp, &raw), "optimal pulse");
            built.reset(raw);
        }
        const qms_signal* input = provided ? provided.get() : built.get();

        qms_signal* out_raw = nullptr;
        check(qms_propagate(m.get(), input, 1.0, &out_raw), "propagate");
        SignalPtr output(out_raw);

        qms_metrics mt{};
        check(qms_compute_metrics_for(m.get(), input, o.z_points, &mt), "metrics");

        qms_profile* prof_raw = nullptr;
        check(qms_excitation_profile(m.get(), input, o.z_points, 0.0, &prof_raw), "profile");
        ProfilePtr prof(prof_raw);

        const std::string t = tag(v);
        if (wants_csv(o)) {
            const SignalData din = signal_data(input);
            const SignalData dout = signal_data(output.get());
            const ProfileData dp = profile_data(prof.get());
            write_csv(ctx, ctx.out_dir / ("input_alphaL" + t + ".csv"), "t,re,im",
                      {&din.t, &din.re, &din.im});
            write_csv(ctx, ctx.out_dir / ("output_alphaL" + t + ".csv"), "t,re,im",
                      {&dout.t, &dout.re, &dout.im});
            write_csv(ctx, ctx.out_dir / ("profile_alphaL" + t + ".csv"), "z,re,im",
                      {&dp.z, &dp.re, &dp.im});
        }
        if (wants_json(o)) {
            json j = tool_stamp();
            j.update(metrics_json(mt));
            j["alpha_L"] = v;
            j["T2"] = o.t2;
            j["renormalized_input"] = renormalized;
            write_json_file(ctx, ctx.out_dir / ("metrics_alphaL" + t + ".json"), j);
        }
    }
    return kExitOk;
}

int cmd_sweep(RunContext& ctx) {
    const Options& o = ctx.opt;
    struct Row {
        double v = 0.0;
        qms_metrics mt{};
        bool ok = false;
        std::string err;
    };
    std::vector<Row> rows(o.alpha_l.size());
    std::vector<MediumPtr> media(rows.size());
    std::vector<qms_grid_spec> grids(rows.size());
    std::vector<char> has_grid(rows.size(), 0);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].v = o.alpha_l[i];
        qms_medium* m = nullptr;
        if (qms_medium_create(rows[i].v, 1.0, o.t2, &m) != QMS_OK) {
            rows[i].err = qms_last_error();
            continue;
        }
        media[i].reset(m);
        if (custom_grid(o)) {
            try {
                grids[i] = build_grid(o, m);
                has_grid[i] = 1;
            } catch (const CliError& e) {
                rows[i].err = e.message;
                media[i].reset();
            }
        }
    }

    const unsigned jobs = std::max<unsigned>(
        1, std::min<unsigned>(o.jobs, static_cast<unsigned>(std::max<std::size_t>(rows.size(), 1))));
    auto worker = [&](unsigned w) {
        for (std::size_t i = w; i < rows.size(); i += jobs) {
            if (!media[i]) continue;
            const qms_grid_spec* gp = has_grid[i] ? &grids[i] : nullptr;
            qms_metrics mt{};
            if (qms_compute_metrics(media[i].get(), gp, o.z_points, &mt) == QMS_OK) {
                rows[i].mt = mt;
                rows[i].ok = true;
            } else {
                rows[i].err = qms_last_error();
            }
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (std::thread& th : pool) th.join();
    }

    const fs::path path = ctx.out_dir / "sweep.csv";
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(kExitIo, "cannot write " + path.string());
    f << "alphaL,efficiency,efficiency_asymptotic,abs_delta,p_abs,p_abs_closed,"
         "first_burst_fraction,flatness_cv,status\n";
    bool any_failed = false;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const Row& r : rows) {
        const qms_metrics& mt = r.mt;
        const double eff = r.ok ? mt.efficiency : nan;
        const double asym = r.ok ? mt.efficiency_asymptotic : nan;
        f << fmt(r.v) << ',' << fmt(eff) << ',' << fmt(asym) << ','
          << fmt(r.ok ? std::abs(eff - asym) : nan) << ',' << fmt(r.ok ? mt.p_abs : nan) << ','
          << fmt(r.ok ? mt.p_abs_closed : nan) << ',' << fmt(r.ok ? mt.first_burst_fraction : nan)
          << ',' << fmt(r.ok ? mt.flatness_cv : nan) << ',' << (r.ok ? "ok" : "failed") << '\n';
        if (!r.ok) {
            any_failed = true;
            std::cerr << "sweep: alphaL=" << fmt(r.v) << " failed: " << r.err << "\n";
        }
    }
    f.flush();
    if (!f) fail(kExitIo, "write failed: " + path.string());
    note_file(ctx, path);
    return any_failed ? kExitPartial : kExitOk;
}

int cmd_figure(RunContext& ctx) {
    const Options& o = ctx.opt;
    if (o.figure == "fig2") {
        for (double v : o.alpha_l) {
            MediumPtr m = make_medium_checked(v, o.t2);
            qms_grid_spec g{};
            const qms_grid_spec* gp = nullptr;
            if (custom_grid(o)) {
                g = build_grid(o, m.get());
                gp = &g;
            }
            qms_signal* raw = nullptr;
            check(qms_optimal_pulse(m.get(), gp, &raw), "optimal pulse");
            SignalPtr pulse(raw);
            qms_signal* out_raw = nullptr;
            check(qms_propagate(m.get(), pulse.get(), 1.0, &out_raw), "propagate");
            SignalPtr output(out_raw);

            const SignalData din = signal_data(pulse.get());
            const SignalData dout = signal_data(output.get());
            std::vector<double> t_over(din.t);
            for (double& x : t_over) x /= o.t2;

            // Lossless retrieval would deliver -F_in(-t); on the staggered
            // grid the mirror sample exists exactly.
            std::vector<double> ideal(din.t.size(), 0.0);
            const long n = static_cast<long>(din.grid.n);
            for (long k = 0; k < n; ++k) {
                const double pos = (-din.t[static_cast<std::size_t>(k)] - din.grid.t_start) /
                                   din.grid.dt;
                const long j = std::lround(pos);
                if (j >= 0 && j < n && std::abs(pos - static_cast<double>(j)) < 1e-6) {
                    ideal[static_cast<std::size_t>(k)] = -din.re[static_cast<std::size_t>(j)];
                }
            }
            write_csv(ctx, ctx.out_dir / ("fig2_alphaL" + tag(v) + ".csv"),
                      "t_over_T2,F_in,F_out,retrieved_ideal",
                      {&t_over, &din.re, &dout.re, &ideal});
        }
        return kExitOk;
    }

    // fig3: profiles on one uniform z/L axis for every requested depth.
    const std::size_t nz = 1024;
    std::vector<double> z(nz);
    for (std::size_t j = 0; j < nz; ++j) {
        z[j] = static_cast<double>(j) / static_cast<double>(nz - 1);
    }
    std::vector<std::vector<double>> cols;
    std::string header = "z_over_L";
    for (double v : o.alpha_l) {
        MediumPtr m = make_medium_checked(v, o.t2);
        qms_grid_spec g{};
        const qms_grid_spec* gp = nullptr;
        if (custom_grid(o)) {
            g = build_grid(o, m.get());
            gp = &g;
        }
        qms_signal* raw = nullptr;
        check(qms_optimal_pulse(m.get(), gp, &raw), "optimal pulse");
        SignalPtr pulse(raw);
        qms_profile* prof_raw = nullptr;
        check(qms_excitation_profile_z(m.get(), pulse.get(), z.data(), nz, 0.0, &prof_raw),
              "profile");
        ProfilePtr prof(prof_raw);
        ProfileData d = profile_data(prof.get());
        cols.push_back(std::move(d.re));
        header += ",c_alphaL" + tag(v);
    }
    std::vector<const std::vector<double>*> col_ptrs{&z};
    for (const auto& c : cols) col_ptrs.push_back(&c);
    write_csv(ctx, ctx.out_dir / "fig3.csv", header, col_ptrs);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Configuration plumbing
// ---------------------------------------------------------------------------

struct OptionRefs {
    CLI::Option* alpha_l = nullptr;
    CLI::Option* t2 = nullptr;
    CLI::Option* dt = nullptr;
    CLI::Option* t_min = nullptr;
    CLI::Option* t_max = nullptr;
    CLI::Option* z_points = nullptr;
    CLI::Option* input = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* format = nullptr;
    CLI::Option* jobs = nullptr;
};

void merge_config(Options& opt, const OptionRefs& refs) {
    std::ifstream f(opt.config_path);
    if (!f) fail(kExitIo, "cannot open config file: " + opt.config_path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        fail(kExitConfig, "config: " + std::string(e.what()));
    }
    if (!j.is_object()) fail(kExitConfig, "config: top level must be a JSON object");

    static const char* known[] = {"alphaL", "T2",  "dt",     "t_min", "t_max",
                                  "z_points", "input", "out", "format", "jobs"};
    for (const auto& item : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                return item.key() == k;
            }) == std::end(known)) {
            fail(kExitConfig, "config: unknown key '" + item.key() + "'");
        }
    }

    auto from_config = [&](const char* key, CLI::Option* o) {
        return j.contains(key) && (o == nullptr || o->count() == 0);
    };
    try {
        if (from_config("alphaL", refs.alpha_l)) {
            opt.alpha_l.clear();
            if (j["alphaL"].is_array()) {
                for (const auto& v : j["alphaL"]) opt.alpha_l.push_back(v.get<double>());
            } else {
                opt.alpha_l.push_back(j["alphaL"].get<double>());
            }
        }
        if (from_config("T2", refs.t2)) opt.t2 = j["T2"].get<double>();
        if (from_config("dt", refs.dt)) opt.dt = j["dt"].get<double>();
        if (from_config("t_min", refs.t_min)) opt.t_min = j["t_min"].get<double>();
        if (from_config("t_max", refs.t_max)) opt.t_max = j["t_max"].get<double>();
        if (from_config("z_points", refs.z_points)) opt.z_points = j["z_points"].get<std::size_t>();
        if (from_config("input", refs.input)) opt.input_path = j["input"].get<std::string>();
        if (from_config("out", refs.out)) opt.out_dir = j["out"].get<std::string>();
        if (from_config("format", refs.format)) opt.format = j["format"].get<std::string>();
        if (from_config("jobs", refs.jobs)) opt.jobs = j["jobs"].get<unsigned>();
    } catch (const json::exception& e) {
        fail(kExitConfig, "config: " + std::string(e.what()));
    }
}

void validate(Options& opt, const std::string& command) {
    if (opt.alpha_l.empty()) {
        if (command == "sweep") {
            opt.alpha_l = {1.0, 10.0, 100.0, 1000.0};
        } else if (command == "figure" && opt.figure == "fig2") {
            opt.alpha_l = {10.0, 100.0};
        } else if (command == "figure") {
            opt.alpha_l = {10.0, 100.0, 1000.0};
        } else {
            opt.alpha_l = {10.0};
        }
    }
    for (double v : opt.alpha_l) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            fail(kExitConfig, "optical depth must be positive (got " + fmt(v) + ")");
        }
    }
    if (!std::isfinite(opt.t2) || !(opt.t2 > 0.0)) fail(kExitConfig, "T2 must be positive");
    if (opt.z_points < 16) fail(kExitConfig, "z-points must be at least 16");
    if (opt.jobs < 1) fail(kExitConfig, "jobs must be at least 1");
    if (opt.dt < 0.0) fail(kExitConfig, "dt must be positive");
    if (!std::isnan(opt.t_min) && !(opt.t_min < 0.0)) {
        fail(kExitConfig, "t-min must be negative (the pulse lives at t < 0)");
    }
    if (!std::isnan(opt.t_max) && !(opt.t_max > 0.0)) {
        fail(kExitConfig, "t-max must be positive");
    }
    if (opt.format != "csv" && opt.format != "json" && opt.format != "both") {
        fail(kExitConfig, "format must be csv, json or both");
    }
}

void write_provenance(RunContext& ctx, const std::string& command) {
    json j = tool_stamp();
    j["command"] = command;
    if (command == "figure") j["figure"] = ctx.opt.figure;
    j["alpha_L"] = ctx.opt.alpha_l;
    j["T2"] = ctx.opt.t2;
    j["z_points"] = ctx.opt.z_points;
    j["format"] = ctx.opt.format;
    if (!ctx.opt.input_path.empty()) j["input"] = ctx.opt.input_path;
    j["files"] = ctx.files_written;
    const auto elapsed = std::chrono::steady_clock::now() - ctx.start;
    j["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
    std::ofstream f(ctx.out_dir / "provenance.json", std::ios::binary);
    if (!f) fail(kExitIo, "cannot write provenance.json");
    f << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    OptionRefs refs;

    CLI::App app{
        "qmemsim: single-photon pulse storage in a resonant absorber.\n"
        "Lengths are in units of the medium length L; alphaL is the optical depth."};
    app.require_subcommand(1);

    refs.alpha_l = app.add_option("--alphaL", opt.alpha_l,
                                  "optical depth alpha*L (repeatable for several media)");
    refs.t2 = app.add_option("--T2", opt.t2, "coherence time T2 (default 1)");
    refs.dt = app.add_option("--dt", opt.dt, "time grid spacing (default: medium-sized)")
                  ->check(CLI::PositiveNumber);
    refs.t_min = app.add_option("--t-min", opt.t_min, "window start (default -20 T2)");
    refs.t_max = app.add_option("--t-max", opt.t_max, "window end (default +20 T2)");
    refs.z_points = app.add_option("--z-points", opt.z_points,
                                   "base number of depth samples (default 512)");
    refs.input = app.add_option("--input", opt.input_path, "input field CSV (header t,re,im)");
    refs.out = app.add_option("--out", opt.out_dir, "output directory (default .)");
    refs.format = app.add_option("--format", opt.format, "csv, json or both (default both)")
                      ->check(CLI::IsMember({"csv", "json", "both"}));
    refs.jobs = app.add_option("--jobs", opt.jobs, "worker threads for sweep (default 1)");
    app.add_option("--config", opt.config_path, "JSON config file (flags take precedence)");

    CLI::App* c_pulse =
        app.add_subcommand("optimal-pulse", "matched input pulse and its normalization");
    CLI::App* c_sim =
        app.add_subcommand("simulate", "full pass: fields, excitation profile, metrics");
    CLI::App* c_sweep = app.add_subcommand("sweep", "metrics versus optical depth");
    CLI::App* c_fig = app.add_subcommand("figure", "bundled result figures");
    c_fig->add_option("name", opt.figure, "fig2 (pulse shapes) or fig3 (profiles)")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3"}));
    for (CLI::App* sub : {c_pulse, c_sim, c_sweep, c_fig}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    std::string command;
    if (c_pulse->parsed()) command = "optimal-pulse";
    if (c_sim->parsed()) command = "simulate";
    if (c_sweep->parsed()) command = "sweep";
    if (c_fig->parsed()) command = "figure";

    try {
        if (!opt.config_path.empty()) merge_config(opt, refs);
        validate(opt, command);

        RunContext ctx;
        ctx.opt = opt;
        ctx.out_dir = fs::path(opt.out_dir);
        ctx.start = std::chrono::steady_clock::now();
        std::error_code ec;
        if (fs::exists(ctx.out_dir)) {
            if (!fs::is_directory(ctx.out_dir)) {
                fail(kExitIo,
                     "output path exists and is not a directory: " + ctx.out_dir.string());
            }
        } else if (!fs::create_directories(ctx.out_dir, ec) || ec) {
            fail(kExitIo, "cannot create output directory: " + ctx.out_dir.string());
        }

        int rc = kExitOk;
        if (command == "optimal-pulse") rc = cmd_optimal_pulse(ctx);
        if (command == "simulate") rc = cmd_simulate(ctx);
        if (command == "sweep") rc = cmd_sweep(ctx);
        if (command == "figure") rc = cmd_figure(ctx);
        write_provenance(ctx, command);
        return rc;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
