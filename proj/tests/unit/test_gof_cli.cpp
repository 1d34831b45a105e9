#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "bsdist/datasets.hpp"
#include "bsdist/estimators.hpp"
#include "bsdist/gof.hpp"
#include "bsdist/rng.hpp"

using namespace bsdist;

namespace {
std::vector<double> scaled_insurance() {
    auto d = datasets::insurance();
    for (auto& v : d) v /= 1e4;
    return d;
}

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(BSDIST_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}
}  // namespace

TEST_CASE("ks distances on the insurance fits", "[gofcli]") {
    const auto ins = scaled_insurance();
    const auto ml = mle(ins);
    const auto ks_ml = ks_test(ins, [&](double t) { return bs::cdf(ml.params(), t); });
    CHECK(ks_ml.distance == Catch::Approx(0.1387).margin(5e-4));
    CHECK(ks_ml.p_value == Catch::Approx(0.6106).margin(5e-3));
    const auto mm = mm_est(ins);
    const auto ks_mm = ks_test(ins, [&](double t) { return bs::cdf(mm.params(), t); });
    CHECK(ks_mm.distance == Catch::Approx(0.1385).margin(5e-4));
    CHECK(ks_mm.p_value == Catch::Approx(0.6130).margin(5e-3));
}

TEST_CASE("ks p-values are uniform under the fitted model", "[gofcli][slow]") {
    Rng seeds(2718);
    std::vector<double> pvals;
    const BsParams truth(0.5, 1.0);
    for (int r = 0; r < 300; ++r) {
        const auto d = bs::sample(truth, 200, seeds.raw());
        pvals.push_back(ks_test(d, [&](double t) { return bs::cdf(truth, t); }).p_value);
    }
    CHECK(ks_test(pvals, [](double u) { return std::min(1.0, std::max(0.0, u)); }).p_value > 0.01);
}

TEST_CASE("two-sample ks detects equal and different laws", "[gofcli]") {
    const auto a = bs::sample(BsParams(0.5, 1.0), 4000, 1);
    const auto b = bs::sample(BsParams(0.5, 1.0), 4000, 2);
    CHECK(ks_two_sample(a, b).p_value > 0.01);
    const auto c = bs::sample(BsParams(0.5, 1.4), 4000, 3);
    CHECK(ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("cli fit matches the library bit for bit", "[gofcli]") {
    auto r = run_cli("fit --data fatigue --method ml");
    REQUIRE(r.exit_code == 0);
    const auto fit = mle(datasets::fatigue());
    // JSON round trip preserves the double exactly
    char expect[64];
    std::snprintf(expect, sizeof expect, "%.17g", fit.alpha);
    std::string norm(expect);
    // nlohmann prints shortest-roundtrip representation; re-parse instead
    const auto pos = r.output.find("\"alpha\":");
    REQUIRE(pos != std::string::npos);
    const double parsed = std::stod(r.output.substr(pos + 8));
    CHECK(parsed == fit.alpha);
    (void)norm;
    CHECK(r.output.find("\"dataset_hash\"") != std::string::npos);
}

TEST_CASE("cli fit reference values", "[gofcli]") {
    auto r = run_cli("fit --data fatigue --method ml --table");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("0.170385") != std::string::npos);
    CHECK(r.output.find("131.819") != std::string::npos);

    auto r2 = run_cli("fit --data insurance --scale 1e-4 --method mm --table");
    REQUIRE(r2.exit_code == 0);
    CHECK(r2.output.find("0.559551") != std::string::npos);
    CHECK(r2.output.find("1.25596") != std::string::npos);
}

TEST_CASE("cli rejects bad input with exit 2", "[gofcli]") {
    const std::string tmp = std::string(BSDIST_TMP_DIR) + "/bad.csv";
    {
        std::ofstream f(tmp);
        f << "value\n3.5\n-1.0\n2.0\n";
    }
    auto r = run_cli("fit --file " + tmp);
    CHECK(r.exit_code == 2);
    auto r2 = run_cli("fit --data nosuch");
    CHECK(r2.exit_code == 2);
    auto r3 = run_cli("censor-fit --data ballbearings --progressive 1,1");
    CHECK(r3.exit_code == 2);
    // estimator nonexistence: n = 1 sample
    const std::string one = std::string(BSDIST_TMP_DIR) + "/one.csv";
    {
        std::ofstream f(one);
        f << "2.5\n";
    }
    auto r4 = run_cli("fit --file " + one + " --method ml");
    CHECK(r4.exit_code == 1);
}

TEST_CASE("cli gof reproduces the published ks table rows", "[gofcli]") {
    auto r = run_cli("gof --data insurance --scale 1e-4 --method mm");
    REQUIRE(r.exit_code == 0);
    const auto pos = r.output.find("\"ks_distance\":");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.output.substr(pos + 14)) == Catch::Approx(0.1385).margin(5e-4));
}

TEST_CASE("cli sampling is reproducible and correct", "[gofcli]") {
    const std::string f1 = std::string(BSDIST_TMP_DIR) + "/s1.csv";
    const std::string f2 = std::string(BSDIST_TMP_DIR) + "/s2.csv";
    REQUIRE(run_cli("sample --dist bs:0.5,1.0 -n 200 --seed 7 --out " + f1).exit_code == 0);
    REQUIRE(run_cli("sample --dist bs:0.5,1.0 -n 200 --seed 7 --out " + f2).exit_code == 0);
    std::ifstream a(f1), b(f2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());

    // bivariate kendall tau near the copula value
    const std::string f3 = std::string(BSDIST_TMP_DIR) + "/pairs.csv";
    REQUIRE(run_cli("sample --dist bvbs:0.5,1,0.5,2,0.6 -n 4000 --seed 3 --out " + f3).exit_code ==
            0);
    std::ifstream in(f3);
    std::vector<std::array<double, 2>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        rows.push_back({std::stod(line.substr(0, c)), std::stod(line.substr(c + 1))});
    }
    REQUIRE(rows.size() == 4000);
    long long conc = 0, disc = 0;
    for (std::size_t i = 0; i < rows.size(); i += 8)
        for (std::size_t j = i + 1; j < rows.size(); j += 8) {
            const double s = (rows[i][0] - rows[j][0]) * (rows[i][1] - rows[j][1]);
            if (s > 0) ++conc;
            else if (s < 0) ++disc;
        }
    const double tau = double(conc - disc) / double(conc + disc);
    CHECK(tau == Catch::Approx(2.0 / kPi * std::asin(0.6)).margin(0.05));

    auto bad = run_cli("sample --dist banana:1");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("cli censor-fit reproduces the bearings fit", "[gofcli]") {
    auto r = run_cli("censor-fit --data ballbearings --type2 8");
    REQUIRE(r.exit_code == 0);
    const auto fitpos = r.output.find("\"fit\":");
    REQUIRE(fitpos != std::string::npos);
    auto at = [&](const std::string& key) {
        const auto pos = r.output.find("\"" + key + "\":", fitpos);
        REQUIRE(pos != std::string::npos);
        return std::stod(r.output.substr(pos + key.size() + 3));
    };
    CHECK(at("alpha") == Catch::Approx(0.1792).margin(5e-4));
    CHECK(at("beta") == Catch::Approx(200.7262).margin(5e-3));
    CHECK(at("alpha_bias_corrected") == Catch::Approx(0.2108).margin(5e-4));

    auto rp = run_cli("censor-fit --data ballbearings --progressive 0,0,0,0,0,4 --strategy em");
    REQUIRE(rp.exit_code == 0);

    // a realized progressive sample reproduces the recorded scheme-1 row
    auto rf = run_cli("censor-fit --progressive-file " + std::string(BSDIST_DATA_DIR) +
                      "/mcs1.csv");
    REQUIRE(rf.exit_code == 0);
    const auto fp = rf.output.find("\"fit\":");
    REQUIRE(fp != std::string::npos);
    const auto ap = rf.output.find("\"alpha\":", fp);
    CHECK(std::stod(rf.output.substr(ap + 8)) == Catch::Approx(0.1639).epsilon(0.02));
}

TEST_CASE("cli reports are reproducible except wall time", "[gofcli]") {
    auto strip = [](std::string s) {
        const auto p = s.find("\"wall_time_ms\"");
        if (p == std::string::npos) return s;
        const auto q = s.find('\n', p);
        s.erase(p, q - p);
        return s;
    };
    const auto r1 = run_cli("mc --experiment bias -n 10 --alpha 0.5 --reps 200 --seed 5");
    const auto r2 = run_cli("mc --experiment bias -n 10 --alpha 0.5 --reps 200 --seed 5");
    REQUIRE(r1.exit_code == 0);
    CHECK(strip(r1.output) == strip(r2.output));
}

TEST_CASE("cli mc experiments", "[gofcli][slow]") {
    const auto r = run_cli("mc --experiment robust -n 50 --alpha 0.5 --reps 200 --seed 6");
    REQUIRE(r.exit_code == 0);
    // fl4 mse below ml mse under contamination
    const auto jm = r.output.find("\"mse_ml\"");
    const auto jf = r.output.find("\"mse_fl4\"");
    REQUIRE(jm != std::string::npos);
    REQUIRE(jf != std::string::npos);
    auto grab_alpha = [&](std::size_t from) {
        const auto p = r.output.find("\"alpha\":", from);
        return std::stod(r.output.substr(p + 8));
    };
    CHECK(grab_alpha(jf) < grab_alpha(jm));

    const auto rc = run_cli("mc --experiment coverage -n 20 --alpha 0.5 --reps 400 --seed 8 --level 0.95");
    REQUIRE(rc.exit_code == 0);
    const auto p = rc.output.find("\"coverage_alpha\":");
    const double cov = std::stod(rc.output.substr(p + 17));
    CHECK(cov > 0.90);
    CHECK(cov < 0.99);
}
