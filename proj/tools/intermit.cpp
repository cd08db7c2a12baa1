// Command-line front end: assembles/caches transfer matrices, runs the
// experiments, and writes CSV (plottable series) and JSON (scalar summaries).
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "intermit/analysis.hpp"
#include "intermit/spectral.hpp"
#include "intermit/tower.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace intermit;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) { // filenames and config echo
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<double> parse_alphas(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw config_error("invalid alpha value: " + tok);
        }
        if (pos != tok.size()) throw config_error("invalid alpha value: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw config_error("empty alpha list");
    return out;
}

long parse_long(const std::string& tok) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw config_error("invalid integer: " + tok);
    }
    if (pos != tok.size()) throw config_error("invalid integer: " + tok);
    return v;
}

// "500" -> {500}; "100,200,500" -> list; "128:8192:2" -> geometric ladder
std::vector<int> parse_grid(const std::string& s) {
    std::vector<int> out;
    if (s.find(':') != std::string::npos) {
        std::stringstream ss(s);
        std::string a, b, f;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, f))
            throw config_error("grid must be lo:hi:factor");
        const long lo = parse_long(a), hi = parse_long(b), fac = parse_long(f);
        if (lo < 1 || hi < lo || fac < 2) throw config_error("grid must satisfy 1 <= lo <= hi, factor >= 2");
        for (long v = lo; v <= hi; v *= fac) out.push_back(static_cast<int>(v));
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(static_cast<int>(parse_long(tok)));
    }
    if (out.empty()) throw config_error("empty n grid");
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 1) throw config_error("grid entries must be positive");
        if (i > 0 && out[i] <= out[i - 1])
            throw config_error("grid entries must be strictly increasing");
    }
    return out;
}

struct RunConfig {
    std::string command;
    std::string alpha_spec = "0.5";
    std::string n_spec;
    int hole_bins = 1;
    int M = 0;
    double tol = -1.0; // <0 means per-command default
    long max_iter = 2000000;
    std::string out = ".";
    std::string cache;
    int nstar = 20000;
    double eps0 = -1.0; // <0 means unset

    std::string echo() const {
        std::ostringstream os;
        os << "alpha=" << alpha_spec << " n=" << (n_spec.empty() ? "-" : n_spec)
           << " hole_bins=" << hole_bins << " m=" << M << " tol=" << fmt_short(tol)
           << " max_iter=" << max_iter << " nstar=" << nstar
           << " eps0=" << (eps0 < 0 ? std::string("-") : fmt_short(eps0))
           << " cache=" << (cache.empty() ? "-" : cache);
        return os.str();
    }

    ordered_json json_echo() const {
        ordered_json j;
        j["alpha"] = alpha_spec;
        j["n"] = n_spec;
        j["hole_bins"] = hole_bins;
        j["m"] = M;
        j["tol"] = tol;
        j["max_iter"] = max_iter;
        j["nstar"] = nstar;
        if (eps0 >= 0) j["eps0"] = eps0; else j["eps0"] = nullptr;
        j["cache"] = cache;
        return j;
    }
};

class CsvFile {
  public:
    CsvFile(const fs::path& path, const RunConfig& cfg, const std::string& columns)
        : path_(path.string()), f_(path_) {
        if (!f_) throw io_error("cannot open for writing: " + path_);
        f_ << "# artifact: intermit " << kVersion << "\n";
        f_ << "# command: " << cfg.command << "\n";
        f_ << "# config: " << cfg.echo() << "\n";
        f_ << "# columns: " << columns << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i)
            f_ << (i ? "," : "") << cells[i];
        f_ << "\n";
    }
    void close() {
        f_.close();
        if (f_.fail()) throw io_error("write failed: " + path_);
    }

  private:
    std::string path_;
    std::ofstream f_;
};

void write_json(const fs::path& path, const RunConfig& cfg, ordered_json payload) {
    ordered_json j;
    j["artifact_version"] = kVersion;
    j["command"] = cfg.command;
    j["config"] = cfg.json_echo();
    for (auto& [k, v] : payload.items()) j[k] = v;
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << j.dump(2) << "\n";
    f.close();
    if (f.fail()) throw io_error("write failed: " + path.string());
}

// Closed-matrix cache keyed by (map family, alpha, N, kind); corrupt or
// mismatched entries are rebuilt and overwritten.
UlamMatrix cached_assemble(const PMMap& map, int N, const std::string& cache_dir) {
    if (cache_dir.empty()) return assemble(map, N);
    const fs::path dir(cache_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create cache directory: " + cache_dir);
    const fs::path p = dir / ("lsv_a" + fmt_short(map.alpha) + "_N" + std::to_string(N) +
                              "_closed.mtx");
    if (fs::exists(p)) {
        try {
            UlamMatrix M = load(p.string());
            if (M.kind == MatrixKind::closed && M.dim() == N &&
                std::abs(M.map_alpha - map.alpha) < 1e-15) {
                std::fprintf(stderr, "cache hit: %s\n", p.string().c_str());
                return M;
            }
            std::fprintf(stderr, "cache key mismatch, rebuilding: %s\n", p.string().c_str());
        } catch (const io_error& e) {
            std::fprintf(stderr, "cache entry unreadable, rebuilding: %s\n", e.what());
        }
    }
    UlamMatrix M = assemble(map, N);
    save(M, p.string());
    return M;
}

SpectralResult converged_leading(const UlamMatrix& M, double tol, long max_iter) {
    SpectralResult r = leading(M, tol, max_iter);
    if (!r.converged)
        throw numerical_error("stationary iteration did not converge in " +
                              std::to_string(r.iterations) + " iterations");
    return r;
}

SpectralResult converged_second(const UlamMatrix& M, const SpectralResult& st, double tol,
                                long max_iter) {
    SpectralResult r = second(M, st, tol, max_iter);
    if (!r.converged) {
        if (r.non_real_dominant)
            throw numerical_error("second eigenvalue is a complex pair, no real value to report");
        throw numerical_error("deflated iteration did not converge in " +
                              std::to_string(r.iterations) + " iterations");
    }
    return r;
}

// ---------------------------------------------------------------------------

void cmd_acim(const RunConfig& cfg) {
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    const std::vector<int> grid = parse_grid(cfg.n_spec);
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        for (int N : grid) {
            const UlamMatrix M = cached_assemble(map, N, cfg.cache);
            const SpectralResult st = converged_leading(M, cfg.tol, cfg.max_iter);
            const std::string stem =
                "acim_a" + fmt_short(alpha) + "_N" + std::to_string(N);

            CsvFile csv(fs::path(cfg.out) / (stem + ".csv"), cfg, "bin_midpoint,density");
            const double w = M.partition.width();
            for (int i = 0; i < N; ++i)
                csv.row({fmt(M.partition.midpoint(i)), fmt(st.eigenvector[i] / w)});
            csv.close();

            ordered_json j;
            j["alpha"] = alpha;
            j["N"] = N;
            j["lambda1"] = st.eigenvalue;
            j["residual"] = st.residual;
            j["iterations"] = st.iterations;
            // the invariant density blows up like x^{-alpha} near 0; report the
            // measured log-log slope when the grid is fine enough for a decade.
            // the window hugs the neutral point, where the power law is cleanest
            if (N >= 400)
                j["tail_slope"] = density_tail_slope(st.eigenvector, M.partition, 2,
                                                     std::max(25, N / 150));
            else
                j["tail_slope"] = nullptr;
            write_json(fs::path(cfg.out) / (stem + ".json"), cfg, std::move(j));
        }
    }
}

void scan_common(const RunConfig& cfg, bool escape) {
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    const std::vector<int> grid = parse_grid(cfg.n_spec);
    if (grid.size() < 4)
        throw config_error("scan needs a grid of at least 4 N values");
    const char* name = escape ? "escape_scan" : "gap_scan";

    CsvFile csv(fs::path(cfg.out) / (std::string(name) + ".csv"), cfg,
                escape ? "alpha,N,lambda1_open,one_minus_lambda1_open"
                       : "alpha,N,lambda2,one_minus_lambda2");
    ordered_json fits = ordered_json::array();
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        std::vector<std::pair<double, double>> pts;
        for (int N : grid) {
            const UlamMatrix M = cached_assemble(map, N, cfg.cache);
            double lam = 0.0;
            if (escape) {
                std::vector<int> hole(static_cast<size_t>(cfg.hole_bins));
                for (int k = 0; k < cfg.hole_bins; ++k) hole[static_cast<size_t>(k)] = k;
                const UlamMatrix O = open_submatrix(M, hole);
                SpectralResult r = substochastic_leading(O, cfg.tol, cfg.max_iter);
                if (!r.converged)
                    throw numerical_error("open-system iteration did not converge at N=" +
                                          std::to_string(N));
                lam = r.eigenvalue;
            } else {
                const SpectralResult st = converged_leading(M, cfg.tol, cfg.max_iter);
                lam = converged_second(M, st, cfg.tol, cfg.max_iter).eigenvalue;
            }
            csv.row({fmt_short(alpha), std::to_string(N), fmt(lam), fmt(1.0 - lam)});
            pts.emplace_back(static_cast<double>(N), 1.0 - lam);
        }
        const ScalingFit fit = scaling_fit(pts);
        ordered_json jf;
        jf["alpha"] = alpha;
        jf["slope"] = fit.slope;
        jf["intercept"] = fit.intercept;
        jf["r_squared"] = fit.r_squared;
        jf["n_points"] = pts.size();
        fits.push_back(std::move(jf));
    }
    csv.close();
    ordered_json j;
    j["fits"] = std::move(fits);
    write_json(fs::path(cfg.out) / (std::string(name) + "_fits.json"), cfg, std::move(j));
}

void cmd_accim_converge(const RunConfig& cfg) {
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    const std::vector<int> grid = parse_grid(cfg.n_spec);
    if (grid.size() < 2)
        throw config_error("accim_converge needs at least 2 grid points");
    if (cfg.nstar < 2) throw config_error("nstar must be >= 2");
    for (int N : grid)
        if (cfg.nstar % N != 0)
            throw config_error("every grid N must divide nstar for refinement alignment (got N=" +
                               std::to_string(N) + ", nstar=" + std::to_string(cfg.nstar) + ")");

    CsvFile csv(fs::path(cfg.out) / "accim_converge.csv", cfg, "alpha,N,nstar,tv_error");
    ordered_json summary = ordered_json::array();
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        const UlamMatrix Mref = cached_assemble(map, cfg.nstar, cfg.cache);
        const SpectralResult ref = converged_leading(Mref, cfg.tol, cfg.max_iter);

        std::vector<double> tvs;
        for (int N : grid) {
            const UlamMatrix M = cached_assemble(map, N, cfg.cache);
            std::vector<int> hole(static_cast<size_t>(cfg.hole_bins));
            for (int k = 0; k < cfg.hole_bins; ++k) hole[static_cast<size_t>(k)] = k;
            const UlamMatrix O = open_submatrix(M, hole);
            SpectralResult r = substochastic_leading(O, cfg.tol, cfg.max_iter);
            if (!r.converged)
                throw numerical_error("open-system iteration did not converge at N=" +
                                      std::to_string(N));
            // embed the conditional density into the full partition: holes
            // carry no surviving mass
            Eigen::VectorXd full = Eigen::VectorXd::Zero(N);
            for (int i = 0; i < O.dim(); ++i)
                full[O.surviving[static_cast<size_t>(i)]] = r.eigenvector[i];
            const double tv = tv_distance(full, ref.eigenvector);
            tvs.push_back(tv);
            csv.row({fmt_short(alpha), std::to_string(N), std::to_string(cfg.nstar), fmt(tv)});
        }
        ordered_json js;
        js["alpha"] = alpha;
        js["tv_first"] = tvs.front();
        js["tv_last"] = tvs.back();
        js["decreasing_endpoints"] = tvs.back() < tvs.front();
        summary.push_back(std::move(js));
    }
    csv.close();
    ordered_json j;
    j["summary"] = std::move(summary);
    write_json(fs::path(cfg.out) / "accim_converge.json", cfg, std::move(j));
}

void cmd_table1(const RunConfig& cfg) {
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    const std::vector<int> grid = parse_grid(cfg.n_spec);
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        const std::vector<Table1Row> rows = table1(map, grid, cfg.M, cfg.tol, cfg.max_iter);
        const std::string stem = "table1_a" + fmt_short(alpha);

        CsvFile csv(fs::path(cfg.out) / (stem + ".csv"), cfg,
                    "N,ok,one_minus_lambda2,one_minus_lambda2_avg,n_eps,eps1,eps2,"
                    "bound_lo,bound_hi,one_minus_lambda_tower,ref_one_minus_lambda2,"
                    "ref_bound_lo,error");
        ordered_json jrows = ordered_json::array();
        for (const Table1Row& r : rows) {
            csv.row({std::to_string(r.N), r.ok ? "1" : "0", fmt(r.one_minus_lambda2),
                     fmt(r.one_minus_lambda2_avg), std::to_string(r.n_eps), fmt(r.eps1),
                     fmt(r.eps2), fmt(r.bound_lo), fmt(r.bound_hi),
                     fmt(r.one_minus_lambda_tower), fmt(r.ref_one_minus_lambda2),
                     fmt(r.ref_bound_lo), r.error});
            ordered_json jr;
            jr["N"] = r.N;
            jr["ok"] = r.ok;
            jr["one_minus_lambda2"] = r.one_minus_lambda2;
            jr["one_minus_lambda2_avg"] = r.one_minus_lambda2_avg;
            jr["n_eps"] = r.n_eps;
            jr["eps1"] = r.eps1;
            jr["eps2"] = r.eps2;
            jr["bound_lo"] = r.bound_lo;
            jr["bound_hi"] = r.bound_hi;
            jr["avg_inside_bracket"] =
                r.ok && r.one_minus_lambda2_avg > r.bound_lo &&
                r.one_minus_lambda2_avg < r.bound_hi;
            jr["one_minus_lambda_tower"] = r.one_minus_lambda_tower;
            jr["ref_one_minus_lambda2"] = r.ref_one_minus_lambda2;
            jr["ref_bound_lo"] = r.ref_bound_lo;
            jr["error"] = r.error;
            jrows.push_back(std::move(jr));
        }
        csv.close();
        ordered_json j;
        j["alpha"] = alpha;
        j["rows"] = std::move(jrows);
        write_json(fs::path(cfg.out) / (stem + ".json"), cfg, std::move(j));
    }
}

void cmd_tower(const RunConfig& cfg) {
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    const std::vector<int> grid = parse_grid(cfg.n_spec); // truncation depths
    const int M = cfg.M > 0 ? cfg.M : 2048;
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        const std::string stem = "tower_a" + fmt_short(alpha);

        CsvFile csv(fs::path(cfg.out) / (stem + ".csv"), cfg,
                    "n,M,lambda,one_minus_lambda,hole_mass,identity_gap,mass_defect,"
                    "iterations");
        std::vector<AccimResult> results;
        for (int n : grid) {
            AccimResult r = accim_fixed_point(map, n, M, cfg.tol, cfg.max_iter);
            if (!r.converged)
                throw numerical_error("tower fixed point did not converge at n=" +
                                      std::to_string(n));
            csv.row({std::to_string(r.n), std::to_string(r.M), fmt(r.lambda),
                     fmt(1.0 - r.lambda), fmt(r.hole_mass), fmt(r.identity_gap),
                     fmt(r.mass_defect), std::to_string(r.iterations)});
            results.push_back(std::move(r));
        }
        csv.close();

        const BoundsReport rep = accim_bounds_check(results);
        ordered_json j;
        j["alpha"] = alpha;
        j["M"] = M;
        ordered_json jb = ordered_json::array();
        for (size_t i = 0; i < rep.ns.size(); ++i) {
            ordered_json je;
            je["n"] = rep.ns[i];
            je["eig_min"] = rep.eig_min[i];
            je["eig_max"] = rep.eig_max[i];
            je["eig_ratio"] = rep.eig_max[i] / rep.eig_min[i];
            je["escape_ratio"] = rep.escape_ratio[i];
            jb.push_back(std::move(je));
        }
        j["bounds"] = std::move(jb);
        if (cfg.eps0 >= 0) {
            const TowerEpsilons te = epsilons(map, cfg.eps0);
            ordered_json je;
            je["eps"] = te.eps;
            je["n"] = te.n;
            je["eps1"] = te.eps1;
            je["eps2"] = te.eps2;
            je["bound_lo"] = te.bound_lo;
            je["bound_hi"] = te.bound_hi;
            j["epsilons"] = std::move(je);
        }
        write_json(fs::path(cfg.out) / (stem + ".json"), cfg, std::move(j));
    }
}

void cmd_twostate(const RunConfig& cfg) {
    if (cfg.eps0 < 0) throw config_error("twostate requires --eps0");
    const std::vector<double> alphas = parse_alphas(cfg.alpha_spec);
    CsvFile csv(fs::path(cfg.out) / "twostate.csv", cfg,
                "alpha,eps0,a,b,lambda2,one_minus_lambda2,pi0,pi1");
    ordered_json models = ordered_json::array();
    for (double alpha : alphas) {
        const PMMap map = PMMap::lsv(alpha);
        const TwoStateModel m = two_state(map, cfg.eps0);
        csv.row({fmt_short(alpha), fmt(m.eps0), fmt(m.a), fmt(m.b), fmt(m.lambda2),
                 fmt(1.0 - m.lambda2), fmt(m.invariant[0]), fmt(m.invariant[1])});
        ordered_json jm;
        jm["alpha"] = alpha;
        jm["eps0"] = m.eps0;
        jm["a"] = m.a;
        jm["b"] = m.b;
        jm["lambda2"] = m.lambda2;
        jm["invariant"] = {m.invariant[0], m.invariant[1]};
        models.push_back(std::move(jm));
    }
    csv.close();
    ordered_json j;
    j["models"] = std::move(models);
    write_json(fs::path(cfg.out) / "twostate.json", cfg, std::move(j));
}

// ---------------------------------------------------------------------------

double default_tol(const std::string& command) {
    if (command == "gap_scan" || command == "accim_converge" || command == "table1")
        return 1e-10;
    return 1e-12;
}

int run(int argc, char** argv) {
    CLI::App app{"transfer-operator toolkit for intermittent interval maps"};
    app.set_version_flag("--version", std::string("intermit ") + kVersion);

    RunConfig cfg;
    std::string config_path;

    app.add_option("command", cfg.command,
                   "one of: acim, gap_scan, escape_scan, accim_converge, table1, tower, "
                   "twostate")
        ->required();
    auto* o_alpha = app.add_option("--alpha", cfg.alpha_spec, "alpha or comma list");
    auto* o_n = app.add_option("--n", cfg.n_spec,
                               "N (or tower depth) grid: int, comma list, or lo:hi:factor");
    auto* o_hole = app.add_option("--hole-bins", cfg.hole_bins,
                                  "number of leftmost bins forming the hole (open scans)");
    auto* o_m = app.add_option("--m", cfg.M, "tower base resolution / cross-check column");
    auto* o_tol = app.add_option("--tol", cfg.tol, "iteration tolerance");
    auto* o_maxit = app.add_option("--max-iter", cfg.max_iter, "iteration budget");
    auto* o_out = app.add_option("--out", cfg.out, "output directory");
    auto* o_cache = app.add_option("--cache", cfg.cache, "matrix cache directory");
    auto* o_nstar = app.add_option("--nstar", cfg.nstar, "reference resolution (accim_converge)");
    auto* o_eps0 = app.add_option("--eps0", cfg.eps0, "hole right edge / tail threshold");
    app.add_option("--config", config_path, "JSON file mirroring the flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        ordered_json err;
        err["error"] = "config";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }

    // config file supplies defaults; explicit flags win
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw io_error("cannot read config file: " + config_path);
        ordered_json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw config_error(std::string("config file is not valid JSON: ") + e.what());
        }
        auto as_string = [](const ordered_json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_integer()) return std::to_string(v.get<long>());
            if (v.is_number_float()) return fmt_short(v.get<double>());
            throw config_error("config values must be strings or numbers");
        };
        for (auto& [key, value] : j.items()) {
            if (key == "alpha") { if (!o_alpha->count()) cfg.alpha_spec = as_string(value); }
            else if (key == "n") { if (!o_n->count()) cfg.n_spec = as_string(value); }
            else if (key == "hole_bins") { if (!o_hole->count()) cfg.hole_bins = value.get<int>(); }
            else if (key == "m") { if (!o_m->count()) cfg.M = value.get<int>(); }
            else if (key == "tol") { if (!o_tol->count()) cfg.tol = value.get<double>(); }
            else if (key == "max_iter") { if (!o_maxit->count()) cfg.max_iter = value.get<long>(); }
            else if (key == "out") { if (!o_out->count()) cfg.out = as_string(value); }
            else if (key == "cache") { if (!o_cache->count()) cfg.cache = as_string(value); }
            else if (key == "nstar") { if (!o_nstar->count()) cfg.nstar = value.get<int>(); }
            else if (key == "eps0") { if (!o_eps0->count()) cfg.eps0 = value.get<double>(); }
            else throw config_error("unknown config key: " + key);
        }
    }

    if (cfg.tol < 0) cfg.tol = default_tol(cfg.command);
    if (!(cfg.tol > 0 && cfg.tol < 1)) throw config_error("tol must lie in (0,1)");
    if (cfg.max_iter < 1) throw config_error("max_iter must be >= 1");
    if (cfg.hole_bins < 1) throw config_error("hole_bins must be >= 1");
    if (cfg.M < 0) throw config_error("m must be >= 0");

    const bool needs_grid = cfg.command != "twostate";
    if (needs_grid && cfg.n_spec.empty())
        throw config_error("command " + cfg.command + " requires --n");

    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec || !fs::is_directory(cfg.out))
        throw io_error("cannot create output directory: " + cfg.out);

    if (cfg.command == "acim") cmd_acim(cfg);
    else if (cfg.command == "gap_scan") scan_common(cfg, false);
    else if (cfg.command == "escape_scan") scan_common(cfg, true);
    else if (cfg.command == "accim_converge") cmd_accim_converge(cfg);
    else if (cfg.command == "table1") cmd_table1(cfg);
    else if (cfg.command == "tower") cmd_tower(cfg);
    else if (cfg.command == "twostate") cmd_twostate(cfg);
    else throw config_error("unknown command: " + cfg.command);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const config_error& e) {
        ordered_json err;
        err["error"] = "config";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        ordered_json err;
        err["error"] = "numerical";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const io_error& e) {
        ordered_json err;
        err["error"] = "io";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 4;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = "numerical";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 3;
    }
}
