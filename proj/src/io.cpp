#include "zqr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "zqr/version.hpp"

namespace zqr {

namespace {

using nlohmann::json;

std::string transform_name(Transform t) {
    return t == Transform::identity ? "identity" : "sqrt";
}

Transform transform_from_name(const std::string& s) {
    if (s == "identity") return Transform::identity;
    if (s == "sqrt") return Transform::sqrt;
    throw ConfigError("unknown transform '" + s + "' (expected identity or sqrt)");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::twopart: return "twopart";
        case Variant::censored_mix: return "censored_mix";
        case Variant::tobit: return "tobit";
    }
    return "";
}

Variant variant_from_name(const std::string& s) {
    if (s == "twopart") return Variant::twopart;
    if (s == "censored_mix") return Variant::censored_mix;
    if (s == "tobit") return Variant::tobit;
    throw ConfigError("unknown variant '" + s + "' (expected twopart, censored_mix or tobit)");
}

std::string link_name(LinkKind l) { return l == LinkKind::logit ? "logit" : "probit"; }

LinkKind link_from_name(const std::string& s) {
    if (s == "logit") return LinkKind::logit;
    if (s == "probit") return LinkKind::probit;
    throw ConfigError("unknown link '" + s + "' (expected logit or probit)");
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    Eigen::Index column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return static_cast<Eigen::Index>(j);
        throw ConfigError("column '" + name + "' not found in CSV header");
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back("");
    return fields;
}

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (lineno == 1) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw ConfigError(path + ": row " + std::to_string(lineno - 1) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(table.header.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw ConfigError("empty CSV file: " + path);
    return table;
}

double parse_cell(const CsvTable& table, std::size_t row, Eigen::Index col,
                  const std::string& path) {
    const std::string& cell = table.rows[row][static_cast<std::size_t>(col)];
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size() || !std::isfinite(value))
        throw ConfigError(path + ": non-numeric cell '" + cell + "' at row " +
                          std::to_string(row + 1) + ", column '" +
                          table.header[static_cast<std::size_t>(col)] + "'");
    return value;
}

// Builds a design matrix with a leading intercept column; optionally
// standardizes each covariate to mean 0, sample SD 1.
Eigen::MatrixXd build_design(const CsvTable& table, const std::vector<std::string>& cols,
                             bool standardize, const std::string& path,
                             std::vector<Standardization>& scaling) {
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Eigen::MatrixXd M(n, static_cast<Eigen::Index>(cols.size()) + 1);
    M.col(0).setOnes();
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const Eigen::Index src = table.column(cols[j]);
        for (Eigen::Index i = 0; i < n; ++i)
            M(i, static_cast<Eigen::Index>(j) + 1) =
                parse_cell(table, static_cast<std::size_t>(i), src, path);
        if (standardize) {
            auto col = M.col(static_cast<Eigen::Index>(j) + 1);
            const double mean = col.mean();
            const double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / (n - 1)) : 0.0;
            if (!(sd > 0.0))
                throw ConfigError("cannot standardize column '" + cols[j] +
                                  "': standard deviation is zero");
            col = (col.array() - mean) / sd;
            scaling.push_back(Standardization{cols[j], mean, sd});
        }
    }
    return M;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + path);
}

json summary_to_json(const Summary& s, double tau, bool has_tau) {
    json doc;
    doc["schema_version"] = 1;
    doc["tau"] = has_tau ? json(tau) : json(nullptr);
    doc["level"] = s.level;
    doc["quantile_rule"] = kQuantileRule;
    doc["mh_acceptance_rate"] =
        std::isfinite(s.mh_acceptance_rate) ? json(s.mh_acceptance_rate) : json(nullptr);
    json params = json::array();
    for (const ParameterSummary& p : s.parameters) {
        params.push_back({{"name", p.name},
                          {"mean", p.mean},
                          {"lower", p.lower},
                          {"upper", p.upper},
                          {"ess", p.ess}});
    }
    doc["parameters"] = params;
    return doc;
}

json fit_request_to_json(const FitRequest& req) {
    json r;
    r["data_path"] = req.data_path;
    r["response"] = req.response;
    r["x_columns"] = req.x_columns;
    r["z_columns"] = req.z_columns;
    r["transform"] = transform_name(req.transform);
    r["standardize"] = req.standardize;
    r["taus"] = req.taus;
    r["variant"] = variant_name(req.variant);
    r["link"] = link_name(req.link);
    r["iters"] = req.iters;
    r["burnin"] = req.burnin;
    r["thin"] = req.thin;
    r["seed"] = req.seed;
    r["mh_step"] = req.mh_step;
    r["warm_start_iters"] = req.warm_start_iters;
    r["prior_coef_var"] = req.prior_coef_var;
    r["prior_sigma_shape"] = req.prior_sigma_shape;
    r["prior_sigma_scale"] = req.prior_sigma_scale;
    r["interval_level"] = req.interval_level;
    return r;
}

FitRequest fit_request_from_json(const json& r) {
    FitRequest req;
    req.data_path = r.at("data_path").get<std::string>();
    req.response = r.at("response").get<std::string>();
    req.x_columns = r.at("x_columns").get<std::vector<std::string>>();
    req.z_columns = r.at("z_columns").get<std::vector<std::string>>();
    req.transform = transform_from_name(r.at("transform").get<std::string>());
    req.standardize = r.at("standardize").get<bool>();
    req.taus = r.at("taus").get<std::vector<double>>();
    req.variant = variant_from_name(r.at("variant").get<std::string>());
    req.link = link_from_name(r.at("link").get<std::string>());
    req.iters = r.at("iters").get<int>();
    req.burnin = r.at("burnin").get<int>();
    req.thin = r.at("thin").get<int>();
    req.seed = r.at("seed").get<std::uint64_t>();
    req.mh_step = r.at("mh_step").get<double>();
    req.warm_start_iters = r.at("warm_start_iters").get<int>();
    req.prior_coef_var = r.at("prior_coef_var").get<double>();
    req.prior_sigma_shape = r.at("prior_sigma_shape").get<double>();
    req.prior_sigma_scale = r.at("prior_sigma_scale").get<double>();
    req.interval_level = r.at("interval_level").get<double>();
    return req;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void FitRequest::validate() const {
    if (data_path.empty()) throw ConfigError("fit: data path is required");
    if (response.empty()) throw ConfigError("fit: response column is required");
    if (taus.empty()) throw ConfigError("fit: tau list must be nonempty");
    for (double t : taus)
        if (!(t > 0.0 && t < 1.0))
            throw ConfigError("fit: tau " + format_double(t) + " outside (0,1)");
    if (!(interval_level > 0.0 && interval_level < 1.0))
        throw ConfigError("fit: interval level must lie in (0,1)");
    if (!(prior_coef_var > 0.0) || !(prior_sigma_shape > 0.0) || !(prior_sigma_scale > 0.0))
        throw ConfigError("fit: prior hyperparameters must be positive");
    if (iters <= 0 || burnin < 0 || burnin >= iters || thin <= 0)
        throw ConfigError("fit: need 0 <= burnin < iters and thin >= 1");
    if (!(mh_step > 0.0)) throw ConfigError("fit: mh_step must be positive");
}

Priors FitRequest::priors(Eigen::Index k, Eigen::Index m) const {
    Priors p = Priors::defaults(k, m);
    p.B0 = prior_coef_var * Eigen::MatrixXd::Identity(k, k);
    p.G0 = prior_coef_var * Eigen::MatrixXd::Identity(m, m);
    p.n0 = prior_sigma_shape;
    p.s0 = prior_sigma_scale;
    return p;
}

LoadedData parse_csv(const std::string& path, const FitRequest& req) {
    const CsvTable table = read_csv_table(path);
    if (table.rows.empty()) throw ConfigError(path + ": no data rows");

    LoadedData out;
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const Eigen::Index ycol = table.column(req.response);
    out.data.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = parse_cell(table, static_cast<std::size_t>(i), ycol, path);
        if (y < 0.0)
            throw ConfigError(path + ": negative response " + format_double(y) + " at row " +
                              std::to_string(i + 1));
        out.data.y[i] = y;
    }
    out.data.X = build_design(table, req.x_columns, req.standardize, path, out.x_scaling);
    out.data.Z = build_design(table, req.z_columns, req.standardize, path, out.z_scaling);
    out.data.transform = req.transform;
    out.data.validate();
    return out;
}

void write_draws_csv(const Chain& chain, const std::string& path) {
    std::string buf;
    buf += "iter";
    for (Eigen::Index j = 0; j < chain.beta_draws.cols(); ++j)
        buf += ",beta_" + std::to_string(j);
    for (Eigen::Index j = 0; j < chain.gamma_draws.cols(); ++j)
        buf += ",gamma_" + std::to_string(j);
    buf += ",sigma\n";
    for (Eigen::Index r = 0; r < chain.draws(); ++r) {
        buf += std::to_string(chain.config.burnin + 1 + r * chain.config.thin);
        for (Eigen::Index j = 0; j < chain.beta_draws.cols(); ++j)
            buf += "," + format_double(chain.beta_draws(r, j));
        for (Eigen::Index j = 0; j < chain.gamma_draws.cols(); ++j)
            buf += "," + format_double(chain.gamma_draws(r, j));
        buf += "," + format_double(chain.sigma_draws[r]);
        buf += "\n";
    }
    write_file(path, buf);
}

void write_summary_json(const Summary& summary, double tau, const std::string& path) {
    write_file(path, summary_to_json(summary, tau, true).dump(2) + "\n");
}

void write_profiles_csv(const Chain& chain, const Dataset& data, const std::string& path) {
    const bool with_pred = data.transform == Transform::sqrt;
    const std::vector<CensorProfile> profiles = censor_profiles(chain);
    Eigen::VectorXd beta_mean(chain.beta_draws.cols());
    for (Eigen::Index j = 0; j < chain.beta_draws.cols(); ++j)
        beta_mean[j] = chain.beta_draws.col(j).mean();

    std::string buf = "obs_id,tau,censor_prob";
    if (with_pred) buf += ",pred_q_transformed,pred_q_original";
    buf += "\n";
    for (const CensorProfile& pr : profiles) {
        buf += std::to_string(pr.obs_id) + "," + format_double(pr.tau) + "," +
               format_double(pr.prob);
        if (with_pred) {
            const double q = data.X.row(pr.obs_id).dot(beta_mean);
            buf += "," + format_double(q) + "," + format_double(invert_transform(q, data.transform));
        }
        buf += "\n";
    }
    write_file(path, buf);
}

void write_rep_summaries_csv(const std::vector<RepSummary>& reps, const std::string& path) {
    std::string buf =
        "replication,tau,zeta_c,zeta_d,beta2_mean,gamma1_mean,gamma2_mean,"
        "zero_fraction,censored_fraction,mh_acceptance_rate\n";
    for (const RepSummary& r : reps) {
        buf += std::to_string(r.replication) + "," + format_double(r.tau) + "," +
               format_double(r.zeta_c) + "," + format_double(r.zeta_d) + "," +
               format_double(r.beta2_mean) + "," + format_double(r.gamma1_mean) + "," +
               format_double(r.gamma2_mean) + "," + format_double(r.zero_fraction) + "," +
               format_double(r.censored_fraction) + "," +
               format_double(r.mh_acceptance_rate) + "\n";
    }
    write_file(path, buf);
}

OutputBundle cmd_fit(const FitRequest& req, const std::string& out_dir) {
    req.validate();
    const LoadedData loaded = parse_csv(req.data_path, req);
    std::filesystem::create_directories(out_dir);

    OutputBundle bundle;
    for (std::size_t ti = 0; ti < req.taus.size(); ++ti) {
        const double tau = req.taus[ti];
        ModelConfig cfg;
        cfg.tau = QuantileLevel(tau);
        cfg.variant = req.variant;
        cfg.link = req.link;
        cfg.iters = req.iters;
        cfg.burnin = req.burnin;
        cfg.thin = req.thin;
        cfg.mh_step = req.mh_step;
        cfg.warm_start_iters = req.warm_start_iters;
        cfg.seed = req.seed;
        cfg.stream_id = ti;
        const Priors priors = req.priors(loaded.data.k(), loaded.data.m());
        const Chain chain = run_chain(loaded.data, cfg, priors);

        const std::string tag = "_tau" + format_double(tau);
        const std::string draws = out_dir + "/draws" + tag + ".csv";
        const std::string summary = out_dir + "/summary" + tag + ".json";
        const std::string profile = out_dir + "/censor_profile" + tag + ".csv";
        write_draws_csv(chain, draws);
        write_summary_json(summarize_chain(chain, req.interval_level), tau, summary);
        Dataset fitted = loaded.data;
        fitted.y = apply_transform(loaded.data.y, loaded.data.transform);
        write_profiles_csv(chain, fitted, profile);
        bundle.draws_files.push_back(draws);
        bundle.summary_files.push_back(summary);
        bundle.profile_files.push_back(profile);
    }

    json manifest;
    manifest["schema_version"] = 1;
    manifest["tool"] = "zqr";
    manifest["version"] = kVersion;
    manifest["command"] = "fit";
    manifest["request"] = fit_request_to_json(req);
    if (req.standardize) {
        json sx = json::array(), sz = json::array();
        for (const auto& s : loaded.x_scaling)
            sx.push_back({{"column", s.column}, {"mean", s.mean}, {"sd", s.sd}});
        for (const auto& s : loaded.z_scaling)
            sz.push_back({{"column", s.column}, {"mean", s.mean}, {"sd", s.sd}});
        manifest["standardization"] = {{"x", sx}, {"z", sz}};
    }
    bundle.manifest_file = out_dir + "/manifest.json";
    write_file(bundle.manifest_file, manifest.dump(2) + "\n");
    return bundle;
}

FitRequest fit_request_from_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest: " + manifest_path);
    json doc;
    try {
        in >> doc;
        if (doc.at("command").get<std::string>() != "fit")
            throw ConfigError(manifest_path + ": not a fit manifest");
        return fit_request_from_json(doc.at("request"));
    } catch (const json::exception& e) {
        throw ConfigError(manifest_path + ": malformed manifest: " + e.what());
    }
}

SimSpec sim_spec_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open simulation spec: " + path);
    json doc;
    try {
        in >> doc;
        SimSpec spec;
        auto opt = [&](const char* key, auto& field) {
            if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
        };
        if (doc.contains("n")) spec.n = doc.at("n").get<Eigen::Index>();
        if (doc.contains("gamma_true")) {
            const auto g = doc.at("gamma_true").get<std::vector<double>>();
            if (g.size() != 3) throw ConfigError(path + ": gamma_true must have 3 entries");
            spec.gamma_true = Eigen::Vector3d(g[0], g[1], g[2]);
        }
        if (doc.contains("beta_true")) {
            const auto b = doc.at("beta_true").get<std::vector<double>>();
            if (b.size() != 3) throw ConfigError(path + ": beta_true must have 3 entries");
            spec.beta_true = Eigen::Vector3d(b[0], b[1], b[2]);
        }
        opt("noise_sd", spec.noise_sd);
        opt("covariate_low", spec.covariate_low);
        opt("covariate_high", spec.covariate_high);
        opt("replications", spec.replications);
        opt("taus", spec.taus);
        opt("iters", spec.fit.iters);
        opt("burnin", spec.fit.burnin);
        opt("thin", spec.fit.thin);
        opt("mh_step", spec.fit.mh_step);
        opt("warm_start_iters", spec.fit.warm_start_iters);
        opt("prior_coef_var", spec.prior_coef_var);
        opt("prior_sigma_shape", spec.prior_sigma_shape);
        opt("prior_sigma_scale", spec.prior_sigma_scale);
        opt("seed", spec.seed);
        opt("threads", spec.threads);
        return spec;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": malformed simulation spec: " + e.what());
    }
}

namespace {

json sim_spec_to_json(const SimSpec& spec) {
    json doc;
    doc["schema_version"] = 1;
    doc["tool"] = "zqr";
    doc["version"] = kVersion;
    doc["command"] = "simulate";
    doc["n"] = spec.n;
    doc["gamma_true"] = {spec.gamma_true[0], spec.gamma_true[1], spec.gamma_true[2]};
    doc["beta_true"] = {spec.beta_true[0], spec.beta_true[1], spec.beta_true[2]};
    doc["noise_sd"] = spec.noise_sd;
    doc["covariate_low"] = spec.covariate_low;
    doc["covariate_high"] = spec.covariate_high;
    doc["replications"] = spec.replications;
    doc["taus"] = spec.taus;
    doc["iters"] = spec.fit.iters;
    doc["burnin"] = spec.fit.burnin;
    doc["thin"] = spec.fit.thin;
    doc["mh_step"] = spec.fit.mh_step;
    doc["warm_start_iters"] = spec.fit.warm_start_iters;
    doc["prior_coef_var"] = spec.prior_coef_var;
    doc["prior_sigma_shape"] = spec.prior_sigma_shape;
    doc["prior_sigma_scale"] = spec.prior_sigma_scale;
    doc["seed"] = spec.seed;
    doc["threads"] = spec.threads;
    return doc;
}

}  // namespace

std::string cmd_simulate(const SimSpec& spec, const std::string& out_path) {
    const std::vector<RepSummary> reps = run_study(spec);
    if (const auto dir = std::filesystem::path(out_path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    write_rep_summaries_csv(reps, out_path);
    write_file(out_path + ".manifest.json", sim_spec_to_json(spec).dump(2) + "\n");
    return out_path;
}

std::string cmd_simulate(const std::string& spec_path, const std::string& out_path) {
    return cmd_simulate(sim_spec_from_json_file(spec_path), out_path);
}

void cmd_censor_curve(double mu, double sigma, const std::vector<double>& taus,
                      const std::vector<double>& p_grid, const std::string& out_path) {
    if (!(sigma > 0.0)) throw ConfigError("censor-curve: sigma must be positive");
    if (taus.empty() || p_grid.empty())
        throw ConfigError("censor-curve: tau list and p grid must be nonempty");
    std::string buf = "tau,p,censor_prob\n";
    for (double t : taus) {
        const double f0 = ald_cdf_at_zero(mu, sigma, QuantileLevel(t));
        for (double p : p_grid) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ConfigError("censor-curve: p outside [0,1]");
            buf += format_double(t) + "," + format_double(p) + "," +
                   format_double(censor_prob(p, f0)) + "\n";
        }
    }
    write_file(out_path, buf);
}

void cmd_summarize(const std::string& draws_path, double level, const std::string& out_path) {
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("summarize: interval level must lie in (0,1)");
    const CsvTable table = read_csv_table(draws_path);
    if (table.rows.empty()) throw ConfigError(draws_path + ": no draws");
    Summary s;
    s.level = level;
    s.mh_acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == "iter") continue;
        Eigen::VectorXd col(n);
        for (Eigen::Index i = 0; i < n; ++i)
            col[i] = parse_cell(table, static_cast<std::size_t>(i),
                                static_cast<Eigen::Index>(j), draws_path);
        const auto [lo, hi] = credible_interval(col, level);
        s.parameters.push_back(ParameterSummary{table.header[j], posterior_mean(col), lo, hi,
                                                effective_sample_size(col)});
    }
    write_file(out_path, summary_to_json(s, 0.0, false).dump(2) + "\n");
}

}  // namespace zqr
