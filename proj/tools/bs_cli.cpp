// Command-line front end: fitting, goodness of fit, sampling, Monte Carlo
// experiments and censored-data fits, with JSON reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bsdist/bsdist.hpp"

using nlohmann::json;
using namespace bsdist;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEstimator = 1;  // nonexistence / non-convergence
constexpr int kExitInput = 2;      // unreadable or invalid input

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One column (or p columns) of values; optional header line.
std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw InputError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (lineno == 1) continue;  // header
            throw InputError("non-numeric value at line " + std::to_string(lineno) + " of " + path);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError("ragged row at line " + std::to_string(lineno) + " of " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("no data rows in " + path);
    return rows;
}

std::vector<double> load_univariate(const std::string& dataset, const std::string& file,
                                    double scale) {
    std::vector<double> data;
    if (!dataset.empty()) {
        try {
            data = datasets::by_name(dataset);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    } else if (!file.empty()) {
        const auto rows = read_csv(file);
        if (rows.front().size() != 1) throw InputError("expected a single-column file");
        for (const auto& r : rows) data.push_back(r[0]);
    } else {
        throw InputError("either --data or --file is required");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] *= scale;
        if (!(data[i] > 0.0))
            throw InputError("non-positive lifetime at row " + std::to_string(i + 1));
    }
    return data;
}

json interval_json(const Interval& iv) {
    return json{{"lo", iv.lo}, {"hi", iv.hi}, {"level", iv.level}};
}

json base_report(const std::string& command, const std::vector<double>& data,
                 std::uint64_t seed) {
    json rep;
    rep["command"] = command;
    rep["dataset_hash"] = datasets::hash(data);
    rep["n"] = data.size();
    rep["seed"] = seed;
    return rep;
}

void finish_report(json& rep, const std::chrono::steady_clock::time_point& t0,
                   const std::string& out) {
    rep["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f.good()) throw InputError("cannot write " + out);
        f << rep.dump(2) << "\n";
    } else {
        std::cout << rep.dump(2) << std::endl;
    }
}

std::string fmt6(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

FitResult run_method(const std::vector<double>& data, const std::string& method) {
    if (method == "ml") return mle(data);
    if (method == "mm") return mm_est(data);
    if (method == "moment") return moment_est(data);
    if (method == "uml") return bias_correct(mle(data), data.size(), BiasKind::UML);
    if (method == "umm") return bias_correct(mm_est(data), data.size(), BiasKind::UMM);
    if (method == "fl1") return from_li(data, 1);
    if (method == "fl2") return from_li(data, 2);
    if (method == "fl3") return from_li(data, 3);
    if (method == "fl4") return from_li(data, 4);
    if (method == "new") return new_est(data);
    if (method == "bz") {
        const auto e = bz_est(data);
        FitResult f;
        f.method = "bz";
        f.alpha = e.alpha;
        f.beta = e.beta1;
        f.converged = true;
        return f;
    }
    if (method == "obre") {
        ObreConfig cfg;
        cfg.eta = std::getenv("BSDIST_OBRE_ETA") ? std::atof(std::getenv("BSDIST_OBRE_ETA"))
                                                 : cfg.eta;
        return obre(data, cfg);
    }
    throw InputError("unknown method: " + method);
}

int cmd_fit(const std::string& dataset, const std::string& file, double scale,
            const std::string& method, double level, const std::string& ci_style,
            std::uint64_t seed, const std::string& out, bool table) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = load_univariate(dataset, file, scale);
    json rep = base_report("fit", data, seed);
    rep["method"] = method;
    rep["scale"] = scale;
    const auto fit = run_method(data, method);
    json jf{{"alpha", fit.alpha}, {"beta", fit.beta}, {"method", fit.method},
            {"converged", fit.converged}};
    if (method == "ml" || method == "mm" || method == "uml" || method == "umm") {
        const CiStyle style = ci_style == "wald" ? CiStyle::Wald : CiStyle::Ratio;
        const auto ci = asymp_ci(fit, data.size(), level, style);
        jf["ci_alpha"] = interval_json(ci.alpha);
        jf["ci_beta"] = interval_json(ci.beta);
        jf["ci_style"] = ci_style;
    }
    rep["fit"] = jf;
    if (table) {
        std::cout << "method  alpha      beta\n"
                  << fit.method << "  " << fmt6(fit.alpha) << "  " << fmt6(fit.beta) << "\n";
    }
    finish_report(rep, t0, out);
    return kExitOk;
}

int cmd_gof(const std::string& dataset, const std::string& file, double scale,
            const std::string& method, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto data = load_univariate(dataset, file, scale);
    json rep = base_report("gof", data, 0);
    const auto fit = run_method(data, method);
    const BsParams p = fit.params();
    const auto ks = ks_test(data, [&](double t) { return bs::cdf(p, t); });
    rep["method"] = method;
    rep["fit"] = {{"alpha", fit.alpha}, {"beta", fit.beta}};
    rep["ks_distance"] = ks.distance;
    rep["p_value"] = ks.p_value;
    finish_report(rep, t0, out);
    return kExitOk;
}

int cmd_sample(const std::string& spec, std::size_t n, std::uint64_t seed,
               const std::string& out) {
    // spec: "bs:alpha,beta" or "bvbs:a1,b1,a2,b2,rho"
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw InputError("bad distribution spec: " + spec);
    const std::string kind = spec.substr(0, colon);
    std::vector<double> par;
    {
        std::stringstream ss(spec.substr(colon + 1));
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                par.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("bad parameter in spec: " + cell);
            }
        }
    }
    std::ostringstream body;
    body.precision(17);
    try {
        if (kind == "bs") {
            if (par.size() != 2) throw InputError("bs spec needs alpha,beta");
            const auto draws = bs::sample(BsParams(par[0], par[1]), n, seed);
            for (double v : draws) body << v << "\n";
        } else if (kind == "bvbs") {
            if (par.size() != 5) throw InputError("bvbs spec needs a1,b1,a2,b2,rho");
            const auto draws =
                mvbs::sample(make_bivariate(par[0], par[1], par[2], par[3], par[4]), n, seed);
            for (const auto& r : draws) body << r[0] << "," << r[1] << "\n";
        } else {
            throw InputError("unknown distribution kind: " + kind);
        }
    } catch (const std::domain_error& e) {
        throw InputError(e.what());
    }
    if (out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(out);
        if (!f.good()) throw InputError("cannot write " + out);
        f << body.str();
    }
    return kExitOk;
}

int cmd_mc(const std::string& experiment, std::size_t n, double alpha, double beta, int reps,
           double level, double contamination, std::uint64_t seed, const std::string& out) {
    if (reps < 100) throw InputError("--reps must be at least 100");
    const auto t0 = std::chrono::steady_clock::now();
    json rep;
    rep["command"] = "mc";
    rep["experiment"] = experiment;
    rep["n"] = n;
    rep["alpha"] = alpha;
    rep["beta"] = beta;
    rep["reps"] = reps;
    rep["seed"] = seed;
    Rng seeds(seed);
    const BsParams truth(alpha, beta);
    if (experiment == "bias") {
        double sa = 0, sb = 0, sa2 = 0, sb2 = 0;
        for (int r = 0; r < reps; ++r) {
            const auto d = bs::sample(truth, n, seeds.derive_seed());
            const auto f = mle(d);
            sa += f.alpha - alpha;
            sb += f.beta - beta;
            sa2 += (f.alpha - alpha) * (f.alpha - alpha);
            sb2 += (f.beta - beta) * (f.beta - beta);
        }
        const double ba = sa / reps, bb = sb / reps;
        rep["bias_alpha"] = ba;
        rep["bias_beta"] = bb;
        rep["mc_se_alpha"] = std::sqrt((sa2 / reps - ba * ba) / reps);
        rep["mc_se_beta"] = std::sqrt((sb2 / reps - bb * bb) / reps);
        rep["firstorder_alpha"] = -alpha / double(n);
        rep["firstorder_beta"] = -beta * alpha * alpha / (4.0 * double(n));
    } else if (experiment == "coverage") {
        int ca = 0, cb = 0;
        for (int r = 0; r < reps; ++r) {
            const auto d = bs::sample(truth, n, seeds.derive_seed());
            const auto f = bias_correct(mle(d), n, BiasKind::UML);
            const auto ci = asymp_ci(f, n, level, CiStyle::Ratio);
            ca += ci.alpha.lo <= alpha && alpha <= ci.alpha.hi;
            cb += ci.beta.lo <= beta && beta <= ci.beta.hi;
        }
        rep["level"] = level;
        rep["coverage_alpha"] = double(ca) / reps;
        rep["coverage_beta"] = double(cb) / reps;
        rep["mc_se"] = std::sqrt(level * (1 - level) / reps);
    } else if (experiment == "robust") {
        double mse_ml_a = 0, mse_fl4_a = 0, mse_ml_b = 0, mse_fl4_b = 0;
        for (int r = 0; r < reps; ++r) {
            auto d = bs::sample(truth, n, seeds.derive_seed());
            const std::size_t k = std::max<std::size_t>(1, std::size_t(contamination * n));
            for (std::size_t i = 0; i < k; ++i) d[i] *= 50.0;
            const auto f1 = mle(d);
            const auto f4 = from_li(d, 4);
            mse_ml_a += (f1.alpha - alpha) * (f1.alpha - alpha);
            mse_ml_b += (f1.beta - beta) * (f1.beta - beta);
            mse_fl4_a += (f4.alpha - alpha) * (f4.alpha - alpha);
            mse_fl4_b += (f4.beta - beta) * (f4.beta - beta);
        }
        rep["contamination"] = contamination;
        rep["mse_ml"] = {{"alpha", mse_ml_a / reps}, {"beta", mse_ml_b / reps}};
        rep["mse_fl4"] = {{"alpha", mse_fl4_a / reps}, {"beta", mse_fl4_b / reps}};
    } else {
        throw InputError("unknown experiment: " + experiment);
    }
    finish_report(rep, t0, out);
    return kExitOk;
}

ProgressiveSample read_progressive_file(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.front().size() != 2)
        throw InputError("progressive file needs two columns: time, removed");
    std::vector<double> t;
    std::vector<int> r;
    long total = 0;
    for (const auto& row : rows) {
        t.push_back(row[0]);
        const int rem = int(row[1]);
        if (rem < 0 || row[1] != rem) throw InputError("removal counts must be whole and >= 0");
        r.push_back(rem);
        total += rem;
    }
    try {
        return ProgressiveSample::from(t, r, t.size() + total);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

int cmd_censor_fit(const std::string& dataset, const std::string& file, double scale, int r_rank,
                   const std::string& progressive, const std::string& progressive_file,
                   const std::string& strategy, double level, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const int modes = (r_rank > 0) + !progressive.empty() + !progressive_file.empty();
    if (modes != 1)
        throw InputError("specify exactly one of --type2, --progressive, --progressive-file");
    if (!progressive_file.empty()) {
        // a realized sample: observed failure times with their removal counts
        const auto s = read_progressive_file(progressive_file);
        json rep = base_report("censor-fit", s.times, 0);
        rep["scheme"] = {{"type", "progressive"}, {"n", s.n}, {"removals", s.removals}};
        const double em_tol =
            std::getenv("BSDIST_EM_TOL") ? std::atof(std::getenv("BSDIST_EM_TOL")) : 1e-9;
        const auto fit = progressive_fit(
            s, strategy == "em" ? ProgressiveStrategy::Em : ProgressiveStrategy::Direct, em_tol);
        rep["fit"] = {{"alpha", fit.alpha},
                      {"beta", fit.beta},
                      {"se_alpha", *fit.se_alpha},
                      {"se_beta", *fit.se_beta}};
        rep["ci"] = {{"alpha", interval_json(*fit.ci_alpha)},
                     {"beta", interval_json(*fit.ci_beta)}};
        finish_report(rep, t0, out);
        return kExitOk;
    }
    if (r_rank > 0) {
        const auto data = load_univariate(dataset, file, scale);
        if (std::size_t(r_rank) > data.size()) throw InputError("--type2 rank exceeds n");
        auto sorted = data;
        std::sort(sorted.begin(), sorted.end());
        sorted.resize(r_rank);
        const auto s = Type2Sample::from(sorted, data.size());
        json rep = base_report("censor-fit", data, 0);
        rep["scheme"] = {{"type", "type2"}, {"n", data.size()}, {"r", r_rank}};
        const auto fit =
            type2_mle(s, strategy == "root" ? Type2Strategy::Root : Type2Strategy::Direct);
        const double corrected = type2_bias_corrected_alpha(fit, s);
        const auto ci = type2_ci(fit, s, level, false);
        const auto ci_c = type2_ci(fit, s, level, true);
        rep["fit"] = {{"alpha", fit.alpha},
                      {"beta", fit.beta},
                      {"alpha_bias_corrected", corrected},
                      {"se_alpha", ci.se_alpha},
                      {"se_beta", ci.se_beta}};
        rep["ci"] = {{"alpha", interval_json(ci.alpha)}, {"beta", interval_json(ci.beta)}};
        rep["ci_corrected"] = {{"alpha", interval_json(ci_c.alpha)},
                               {"beta", interval_json(ci_c.beta)}};
        finish_report(rep, t0, out);
        return kExitOk;
    }
    std::vector<int> removals;
    {
        std::stringstream ss(progressive);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                removals.push_back(std::stoi(cell));
            } catch (const std::exception&) {
                throw InputError("bad removal count: " + cell);
            }
        }
    }
    const auto data = load_univariate(dataset, file, scale);
    long total = 0;
    for (int x : removals) {
        if (x < 0) throw InputError("negative removal count");
        total += x;
    }
    if (removals.size() + std::size_t(total) != data.size())
        throw InputError("removals must sum to n - m");
    auto sorted = data;
    std::sort(sorted.begin(), sorted.end());
    // realized observed failures under largest-rank removal of survivors
    std::vector<double> alive(sorted);
    std::vector<double> times;
    for (std::size_t i = 0; i < removals.size(); ++i) {
        times.push_back(alive.front());
        alive.erase(alive.begin());
        for (int k = 0; k < removals[i] && !alive.empty(); ++k) alive.pop_back();
    }
    const auto s = ProgressiveSample::from(times, removals, data.size());
    json rep = base_report("censor-fit", data, 0);
    rep["scheme"] = {{"type", "progressive"}, {"n", data.size()}, {"removals", removals}};
    const double em_tol =
        std::getenv("BSDIST_EM_TOL") ? std::atof(std::getenv("BSDIST_EM_TOL")) : 1e-9;
    const auto fit = progressive_fit(
        s, strategy == "em" ? ProgressiveStrategy::Em : ProgressiveStrategy::Direct, em_tol);
    rep["fit"] = {{"alpha", fit.alpha},
                  {"beta", fit.beta},
                  {"se_alpha", *fit.se_alpha},
                  {"se_beta", *fit.se_beta}};
    rep["ci"] = {{"alpha", interval_json(*fit.ci_alpha)}, {"beta", interval_json(*fit.ci_beta)}};
    finish_report(rep, t0, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birnbaum-Saunders distribution toolkit"};
    app.require_subcommand(1);

    std::string dataset, file, method = "ml", out, ci_style = "ratio", spec, experiment = "bias";
    std::string progressive, progressive_file, strategy = "direct";
    double scale = 1.0, level = 0.95, alpha = 0.5, beta = 1.0, contamination = 0.05;
    std::size_t n = 100;
    int reps = 1000, r_rank = 0;
    std::uint64_t seed = 20240901ull;
    bool table = false;

    auto* fit = app.add_subcommand("fit", "fit a distribution to data");
    fit->add_option("--data", dataset, "embedded dataset name");
    fit->add_option("--file", file, "CSV file of positive lifetimes");
    fit->add_option("--method", method, "ml|mm|moment|uml|umm|fl1..fl4|bz|new|obre");
    fit->add_option("--scale", scale, "multiply the data by this factor first");
    fit->add_option("--level", level, "confidence level");
    fit->add_option("--ci-style", ci_style, "ratio|wald");
    fit->add_option("--seed", seed, "rng seed");
    fit->add_option("--out", out, "write the JSON report here");
    fit->add_flag("--table", table, "also print an aligned table");

    auto* gof = app.add_subcommand("gof", "Kolmogorov-Smirnov goodness of fit");
    gof->add_option("--data", dataset);
    gof->add_option("--file", file);
    gof->add_option("--method", method);
    gof->add_option("--scale", scale);
    gof->add_option("--out", out);

    auto* smp = app.add_subcommand("sample", "draw random variates");
    smp->add_option("--dist", spec, "bs:alpha,beta or bvbs:a1,b1,a2,b2,rho")->required();
    smp->add_option("-n,--n", n, "number of draws");
    smp->add_option("--seed", seed);
    smp->add_option("--out", out, "CSV output path (stdout otherwise)");

    auto* mc = app.add_subcommand("mc", "Monte Carlo experiments");
    mc->add_option("--experiment", experiment, "bias|coverage|robust");
    mc->add_option("-n,--n", n);
    mc->add_option("--alpha", alpha);
    mc->add_option("--beta", beta);
    mc->add_option("--reps", reps);
    mc->add_option("--level", level);
    mc->add_option("--contamination", contamination);
    mc->add_option("--seed", seed);
    mc->add_option("--out", out);

    auto* cf = app.add_subcommand("censor-fit", "censored-sample fits");
    cf->add_option("--data", dataset);
    cf->add_option("--file", file);
    cf->add_option("--scale", scale);
    cf->add_option("--type2", r_rank, "observed rank r of a Type-II sample");
    cf->add_option("--progressive", progressive, "comma-separated removal counts R1..Rm");
    cf->add_option("--progressive-file", progressive_file,
                   "CSV of a realized progressive sample (time, removed)");
    cf->add_option("--strategy", strategy, "direct|root|em");
    cf->add_option("--level", level);
    cf->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) return cmd_fit(dataset, file, scale, method, level, ci_style, seed, out, table);
        if (*gof) return cmd_gof(dataset, file, scale, method, out);
        if (*smp) return cmd_sample(spec, n, seed, out);
        if (*mc) return cmd_mc(experiment, n, alpha, beta, reps, level, contamination, seed, out);
        if (*cf)
            return cmd_censor_fit(dataset, file, scale, r_rank, progressive, progressive_file,
                                  strategy, level, out);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kExitEstimator;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kExitEstimator;
    }
    return kExitOk;
}
