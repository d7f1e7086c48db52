#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zqr/io.hpp"

using namespace zqr;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("zqr_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FitRequest small_request(const fs::path& csv) {
    FitRequest req;
    req.data_path = csv.string();
    req.response = "y";
    req.x_columns = {"a", "b"};
    req.z_columns = {"a", "b"};
    req.taus = {0.5};
    req.iters = 300;
    req.burnin = 100;
    req.seed = 7;
    return req;
}

// hurdle-style fixture with a few exact zeros
std::string fixture_csv() {
    return "y,a,b\n"
           "0,0.2,0.9\n"
           "1.5,0.8,0.1\n"
           "0,0.4,0.7\n"
           "2.25,0.9,0.2\n"
           "0.5,0.6,0.3\n"
           "0,0.1,0.8\n"
           "1.0,0.7,0.4\n"
           "0.25,0.5,0.5\n";
}

}  // namespace

TEST_CASE("csv parsing builds the design with an intercept") {
    const fs::path dir = temp_dir("parse");
    const fs::path csv = dir / "data.csv";
    write_text(csv, "y,a,b\n1.0,2.0,3.0\n0.0,4.0,5.0\n2.5,6.0,7.0\n");
    const LoadedData loaded = parse_csv(csv.string(), small_request(csv));
    CHECK(loaded.data.n() == 3);
    CHECK(loaded.data.k() == 3);
    CHECK(loaded.data.X.col(0).isOnes());
    CHECK(loaded.data.X(0, 1) == 2.0);
    CHECK(loaded.data.X(2, 2) == 7.0);
    CHECK(loaded.data.Z == loaded.data.X);
    CHECK(loaded.data.y[2] == 2.5);
    CHECK(loaded.x_scaling.empty());
}

TEST_CASE("csv diagnostics carry locations") {
    const fs::path dir = temp_dir("diag");
    const fs::path csv = dir / "data.csv";

    SUBCASE("missing column") {
        write_text(csv, "y,a\n1.0,2.0\n");
        CHECK_THROWS_WITH_AS(parse_csv(csv.string(), small_request(csv)),
                             doctest::Contains("column 'b' not found"), ConfigError);
    }
    SUBCASE("non-numeric cell names row and column") {
        write_text(csv, "y,a,b\n1.0,2.0,3.0\n1.0,oops,3.0\n");
        CHECK_THROWS_WITH_AS(parse_csv(csv.string(), small_request(csv)),
                             doctest::Contains("row 2, column 'a'"), ConfigError);
    }
    SUBCASE("negative response names the row") {
        write_text(csv, "y,a,b\n1.0,2.0,3.0\n-0.5,1.0,1.0\n");
        CHECK_THROWS_WITH_AS(parse_csv(csv.string(), small_request(csv)),
                             doctest::Contains("row 2"), ConfigError);
    }
    SUBCASE("empty file") {
        write_text(csv, "");
        CHECK_THROWS_WITH_AS(parse_csv(csv.string(), small_request(csv)),
                             doctest::Contains("empty CSV"), ConfigError);
    }
    SUBCASE("ragged row") {
        write_text(csv, "y,a,b\n1.0,2.0\n");
        CHECK_THROWS_AS(parse_csv(csv.string(), small_request(csv)), ConfigError);
    }
}

TEST_CASE("standardization records constants and rejects constant columns") {
    const fs::path dir = temp_dir("std");
    const fs::path csv = dir / "data.csv";
    write_text(csv, "y,a,b\n1.0,2.0,1.0\n2.0,4.0,1.0\n3.0,6.0,1.0\n");
    FitRequest req = small_request(csv);
    req.standardize = true;

    SUBCASE("constant column is rejected") {
        CHECK_THROWS_WITH_AS(parse_csv(csv.string(), req),
                             doctest::Contains("standard deviation is zero"), ConfigError);
    }

    SUBCASE("variable columns come out standardized") {
        req.x_columns = {"a"};
        req.z_columns = {"a"};
        const LoadedData loaded = parse_csv(csv.string(), req);
        CHECK(loaded.data.X.col(1).mean() == doctest::Approx(0.0));
        const double sd = std::sqrt(loaded.data.X.col(1).squaredNorm() / 2.0);
        CHECK(sd == doctest::Approx(1.0));
        REQUIRE(loaded.x_scaling.size() == 1);
        CHECK(loaded.x_scaling[0].column == "a");
        CHECK(loaded.x_scaling[0].mean == doctest::Approx(4.0));
        CHECK(loaded.x_scaling[0].sd == doctest::Approx(2.0));
    }
}

TEST_CASE("fit command writes the bundle and replays byte-identically") {
    const fs::path dir = temp_dir("fit");
    const fs::path csv = dir / "data.csv";
    write_text(csv, fixture_csv());
    FitRequest req = small_request(csv);
    req.taus = {0.25, 0.5};

    const OutputBundle bundle = cmd_fit(req, (dir / "out").string());
    REQUIRE(bundle.draws_files.size() == 2);
    REQUIRE(bundle.summary_files.size() == 2);
    REQUIRE(bundle.profile_files.size() == 2);
    for (const auto& f : bundle.draws_files) CHECK(fs::exists(f));
    for (const auto& f : bundle.summary_files) CHECK(fs::exists(f));
    for (const auto& f : bundle.profile_files) CHECK(fs::exists(f));
    CHECK(fs::exists(bundle.manifest_file));

    SUBCASE("identical request reproduces identical bytes") {
        const OutputBundle again = cmd_fit(req, (dir / "out2").string());
        for (std::size_t i = 0; i < bundle.draws_files.size(); ++i) {
            CHECK(slurp(bundle.draws_files[i]) == slurp(again.draws_files[i]));
            CHECK(slurp(bundle.summary_files[i]) == slurp(again.summary_files[i]));
            CHECK(slurp(bundle.profile_files[i]) == slurp(again.profile_files[i]));
        }
    }

    SUBCASE("manifest replay reproduces identical bytes including the manifest") {
        const FitRequest from_manifest = fit_request_from_manifest(bundle.manifest_file);
        const OutputBundle replay = cmd_fit(from_manifest, (dir / "replay").string());
        CHECK(slurp(bundle.manifest_file) == slurp(replay.manifest_file));
        for (std::size_t i = 0; i < bundle.draws_files.size(); ++i) {
            CHECK(slurp(bundle.draws_files[i]) == slurp(replay.draws_files[i]));
            CHECK(slurp(bundle.summary_files[i]) == slurp(replay.summary_files[i]));
            CHECK(slurp(bundle.profile_files[i]) == slurp(replay.profile_files[i]));
        }
    }

    SUBCASE("draws csv round-trips the chain exactly") {
        ModelConfig cfg;
        cfg.tau = QuantileLevel(0.25);
        cfg.variant = req.variant;
        cfg.iters = req.iters;
        cfg.burnin = req.burnin;
        cfg.seed = req.seed;
        cfg.stream_id = 0;
        cfg.mh_step = req.mh_step;
        const LoadedData loaded = parse_csv(csv.string(), req);
        const Chain chain = run_chain(loaded.data, cfg, req.priors(3, 3));

        std::ifstream in(bundle.draws_files[0]);
        std::string line;
        std::getline(in, line);
        CHECK(line == "iter,beta_0,beta_1,beta_2,gamma_0,gamma_1,gamma_2,sigma");
        for (Eigen::Index r = 0; r < chain.draws(); ++r) {
            REQUIRE(std::getline(in, line));
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ',');
            CHECK(std::stol(cell) == cfg.burnin + 1 + r);
            for (Eigen::Index j = 0; j < 3; ++j) {
                std::getline(ss, cell, ',');
                CHECK(std::stod(cell) == chain.beta_draws(r, j));
            }
            for (Eigen::Index j = 0; j < 3; ++j) {
                std::getline(ss, cell, ',');
                CHECK(std::stod(cell) == chain.gamma_draws(r, j));
            }
            std::getline(ss, cell, ',');
            CHECK(std::stod(cell) == chain.sigma_draws[r]);
        }
    }

    SUBCASE("summarize command agrees with the library summary") {
        const fs::path out = dir / "resummary.json";
        cmd_summarize(bundle.draws_files[1], 0.9, out.string());
        const std::string text = slurp(out);
        CHECK(text.find("\"beta_2\"") != std::string::npos);
        CHECK(text.find("\"sigma\"") != std::string::npos);
        CHECK(text.find("hazen") != std::string::npos);
    }
}

TEST_CASE("profile files carry back-transformed predictions under sqrt") {
    const fs::path dir = temp_dir("sqrt");
    const fs::path csv = dir / "data.csv";
    write_text(csv, fixture_csv());
    FitRequest req = small_request(csv);
    req.transform = Transform::sqrt;
    const OutputBundle bundle = cmd_fit(req, (dir / "out").string());
    std::ifstream in(bundle.profile_files[0]);
    std::string header;
    std::getline(in, header);
    CHECK(header == "obs_id,tau,censor_prob,pred_q_transformed,pred_q_original");
    std::string row;
    int rows = 0;
    while (std::getline(in, row)) {
        ++rows;
        std::stringstream ss(row);
        std::string cell;
        std::getline(ss, cell, ',');  // obs_id
        std::getline(ss, cell, ',');  // tau
        CHECK(std::stod(cell) == 0.5);
        std::getline(ss, cell, ',');
        const double prob = std::stod(cell);
        CHECK(prob >= 0.0);
        CHECK(prob <= 1.0);
        std::getline(ss, cell, ',');
        const double qt = std::stod(cell);
        std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == doctest::Approx(qt * std::abs(qt)));
    }
    CHECK(rows == 3);  // three zero observations in the fixture
}

TEST_CASE("sqrt fit equals identity fit on pre-transformed data") {
    // Responses chosen so sqrt(y*y) is exact in floating point.
    const fs::path dir = temp_dir("equiv");
    std::string plain = "y,a,b\n", squared = "y,a,b\n";
    const double ys[8] = {0, 1.5, 0, 2.25, 0.5, 0, 1.0, 0.25};
    const double as[8] = {0.2, 0.8, 0.4, 0.9, 0.6, 0.1, 0.7, 0.5};
    for (int i = 0; i < 8; ++i) {
        plain += format_double(ys[i]) + "," + format_double(as[i]) + ",0.5\n";
        squared += format_double(ys[i] * ys[i]) + "," + format_double(as[i]) + ",0.5\n";
    }
    write_text(dir / "plain.csv", plain);
    write_text(dir / "squared.csv", squared);

    FitRequest req_plain = small_request(dir / "plain.csv");
    req_plain.x_columns = {"a"};
    req_plain.z_columns = {"a"};
    FitRequest req_sqrt = req_plain;
    req_sqrt.data_path = (dir / "squared.csv").string();
    req_sqrt.transform = Transform::sqrt;

    const OutputBundle a = cmd_fit(req_plain, (dir / "out_plain").string());
    const OutputBundle b = cmd_fit(req_sqrt, (dir / "out_sqrt").string());
    CHECK(slurp(a.draws_files[0]) == slurp(b.draws_files[0]));
}

TEST_CASE("censor curve tabulates the closed form") {
    const fs::path dir = temp_dir("curve");
    const fs::path out = dir / "curve.csv";
    cmd_censor_curve(1.0, 1.0, {0.5}, {0.0, 0.5, 1.0}, out.string());
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "tau,p,censor_prob");
    std::getline(in, line);
    CHECK(line.substr(line.rfind(',') + 1) == "1");  // p = 0 row
    std::getline(in, line);
    const double mid = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(mid == doctest::Approx(0.23269).epsilon(1e-4));
    std::getline(in, line);
    CHECK(line.substr(line.rfind(',') + 1) == "0");  // p = 1 row

    CHECK_THROWS_AS(cmd_censor_curve(0.0, -1.0, {0.5}, {0.5}, out.string()), ConfigError);
    CHECK_THROWS_AS(cmd_censor_curve(0.0, 1.0, {0.5}, {1.5}, out.string()), ConfigError);
}

TEST_CASE("simulation spec files parse with defaults and fail loudly") {
    const fs::path dir = temp_dir("spec");
    const fs::path good = dir / "spec.json";
    write_text(good, R"({"replications": 2, "n": 60, "taus": [0.5], "iters": 300,
                         "burnin": 100, "seed": 9, "threads": 1})");
    const SimSpec spec = sim_spec_from_json_file(good.string());
    CHECK(spec.replications == 2);
    CHECK(spec.n == 60);
    CHECK(spec.fit.iters == 300);
    CHECK(spec.gamma_true == Eigen::Vector3d(0.0, 10.0, -10.0));  // default
    CHECK(spec.noise_sd == 0.5);

    const fs::path bad = dir / "bad.json";
    write_text(bad, "{ not json");
    CHECK_THROWS_AS(sim_spec_from_json_file(bad.string()), ConfigError);
    const fs::path short_gamma = dir / "short.json";
    write_text(short_gamma, R"({"gamma_true": [1.0]})");
    CHECK_THROWS_AS(sim_spec_from_json_file(short_gamma.string()), ConfigError);
    CHECK_THROWS_AS(sim_spec_from_json_file((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("simulate command writes rows and replays from its manifest") {
    const fs::path dir = temp_dir("simcmd");
    const fs::path spec_path = dir / "spec.json";
    write_text(spec_path, R"({"replications": 2, "n": 60, "taus": [0.3, 0.6],
                              "iters": 300, "burnin": 100, "seed": 21, "threads": 1})");
    const std::string out = (dir / "rep.csv").string();
    cmd_simulate(spec_path.string(), out);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "replication,tau,zeta_c,zeta_d,beta2_mean,gamma1_mean,gamma2_mean,"
          "zero_fraction,censored_fraction,mh_acceptance_rate");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);  // 2 replications x 2 taus

    const std::string out2 = (dir / "rep2.csv").string();
    cmd_simulate(out + ".manifest.json", out2);
    CHECK(slurp(out) == slurp(out2));
    CHECK(slurp(out + ".manifest.json") == slurp(out2 + ".manifest.json"));
}

#ifdef ZQR_CLI_PATH
namespace {

int run_cli(const std::string& args) {
    const int status = std::system((std::string(ZQR_CLI_PATH) + " " + args +
                                    " >/dev/null 2>&1")
                                       .c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli exit codes distinguish config and numerical failures") {
    const fs::path dir = temp_dir("cli");
    const fs::path csv = dir / "data.csv";
    write_text(csv, fixture_csv());

    SUBCASE("success is zero") {
        CHECK(run_cli("fit --data " + csv.string() +
                      " --response y --x a,b --z a,b --tau 0.5 --iters 200 --burnin 50"
                      " --out " +
                      (dir / "out").string()) == 0);
        CHECK(run_cli("censor-curve --out " + (dir / "curve.csv").string()) == 0);
    }

    SUBCASE("config and parse errors exit 2") {
        CHECK(run_cli("fit --data " + (dir / "missing.csv").string() +
                      " --response y --x a --z a --out " + (dir / "o").string()) == 2);
        CHECK(run_cli("fit --data " + csv.string() +
                      " --response nope --x a --z a --out " + (dir / "o").string()) == 2);
        CHECK(run_cli("fit --data " + csv.string() +
                      " --response y --x a --z a --tau 1.5 --out " +
                      (dir / "o").string()) == 2);
        CHECK(run_cli("simulate --spec " + (dir / "missing.json").string() + " --out " +
                      (dir / "r.csv").string()) == 2);
    }

    SUBCASE("mid-chain numerical failure exits 3") {
        const fs::path big = dir / "big.csv";
        write_text(big, "y,a\n1e200,0.5\n2.0,0.7\n");
        CHECK(run_cli("fit --data " + big.string() +
                      " --response y --x a --z a --variant tobit --iters 100"
                      " --burnin 20 --out " +
                      (dir / "o3").string()) == 3);
    }
}
#endif

TEST_CASE("labour-survey-shaped csv runs end to end under tobit") {
    // 753 rows, six covariates, response in hundreds of hours with a large
    // spike at zero; synthetic values, production column names.
    const fs::path dir = temp_dir("mroz");
    const fs::path csv = dir / "labour.csv";
    RngStream rng(4242, 0);
    std::string text = "hours,nwifeinc,educ,exper,age,kidslt6,kidsge6\n";
    for (int i = 0; i < 753; ++i) {
        const double nwifeinc = 20.0 + 11.0 * draw_std_normal(rng);
        const double educ = 5.0 + 12.0 * rng.uniform01();
        const double exper = 25.0 * rng.uniform01();
        const double age = 30.0 + 30.0 * rng.uniform01();
        const double kidslt6 = rng.uniform01() < 0.25 ? 1.0 : 0.0;
        const double kidsge6 = std::floor(3.0 * rng.uniform01());
        double hours = -4.0 + 0.9 * exper + 0.6 * educ - 0.05 * age - 3.0 * kidslt6 +
                       6.0 * draw_std_normal(rng);
        if (hours < 0.0) hours = 0.0;
        text += format_double(hours) + "," + format_double(nwifeinc) + "," +
                format_double(educ) + "," + format_double(exper) + "," +
                format_double(age) + "," + format_double(kidslt6) + "," +
                format_double(kidsge6) + "\n";
    }
    write_text(csv, text);

    FitRequest req;
    req.data_path = csv.string();
    req.response = "hours";
    req.x_columns = {"nwifeinc", "educ", "exper", "age", "kidslt6", "kidsge6"};
    req.z_columns = req.x_columns;
    req.variant = Variant::tobit;
    req.standardize = true;
    req.taus = {0.5};
    req.iters = 600;
    req.burnin = 200;
    req.seed = 31;
    const OutputBundle bundle = cmd_fit(req, (dir / "out").string());
    CHECK(fs::exists(bundle.draws_files[0]));
    const std::string summary = slurp(bundle.summary_files[0]);
    CHECK(summary.find("beta_6") != std::string::npos);
    CHECK(summary.find("gamma_0") == std::string::npos);  // tobit has no zero part
    CHECK(summary.find("\"mh_acceptance_rate\": null") != std::string::npos);
}
