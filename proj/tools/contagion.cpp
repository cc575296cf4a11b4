// contagion: command-line front end for the contagion-model toolkit.
// Subcommands cover the whole pipeline: ingest CDS quotes, estimate the
// cluster parameters, run the line diagnostic, roll the fit through time,
// simulate synthetic data, and evaluate nested-pair taus.
//
// Conventions: machine-readable JSON goes to stdout, human summaries to
// stderr, files are written atomically, and every output directory gets a
// manifest recording the command, its flags, input digests, and timestamps.
// Exit codes: 0 success, 1 I/O or usage, 2 domain or data, 3 diagnostic
// threshold failed, 4 internal consistency failed.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccm/data_io.hpp"
#include "ccm/diagnostics.hpp"
#include "ccm/errors.hpp"
#include "ccm/estimator.hpp"
#include "ccm/hac.hpp"
#include "ccm/sampler.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Proleptic-Gregorian date for a day offset from 2000-01-01, used to lay
// simulated replications onto a calendar grid.
std::string date_from_serial(long serial) {
    long z = serial + 10957 + 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp < 10 ? mp + 3 : mp - 9;
    const long year = static_cast<long>(yoe) + era * 400 + (month <= 2);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", year, month, day);
    return buf;
}

struct Manifest {
    std::string command;
    json flags = json::object();
    json inputs = json::object();
    std::string started = now_utc();

    void add_input(const std::string& path) { inputs[path] = ccm::digest_file(path); }

    void write(const std::string& out_dir) const {
        json doc;
        doc["command"] = command;
        doc["version"] = kVersion;
        doc["flags"] = flags;
        doc["inputs"] = inputs;
        doc["started"] = started;
        doc["finished"] = now_utc();
        ccm::atomic_write_file(out_dir + "/manifest.json", doc.dump(2) + "\n");
    }
};

std::string prepare_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ccm::io_error("cannot create output directory " + out + ": " + ec.message());
    return out;
}

json fit_to_json(const ccm::FitResult& res, const json& config_echo) {
    json doc;
    doc["labels"] = res.labels;
    doc["alphas"] = res.alphas;
    doc["theta"] = res.theta;
    doc["objective"] = res.objective;
    auto& residuals = doc["residuals"] = json::array();
    for (const auto& r : res.residuals)
        residuals.push_back({{"pair", {res.labels[r.j], res.labels[r.k]}},
                             {"sample_tau", r.sample_tau},
                             {"model_tau", r.model_tau},
                             {"residual", r.sample_tau - r.model_tau}});
    doc["restarts"] = res.restarts;
    doc["seed"] = res.seed;
    doc["warnings"] = res.warnings;
    doc["config"] = config_echo;
    return doc;
}

json report_to_json(const ccm::SpecCheckReport& report) {
    json doc;
    doc["theta"] = report.theta;
    doc["intercept"] = (report.theta - 1.0) / report.theta;
    doc["slope"] = 1.0 / report.theta;
    doc["threshold"] = report.threshold;
    doc["rmse"] = report.rmse;
    doc["passed"] = report.passed;
    auto& points = doc["points"] = json::array();
    for (const auto& p : report.points) {
        json row;
        row["label"] = p.label;
        row["alpha"] = p.alpha;
        row["tau_hat"] = p.sample_tau;  // NaN serializes as null
        row["tau_line"] = p.line_tau;
        row["residual"] = p.sample_tau - p.line_tau;
        points.push_back(std::move(row));
    }
    doc["warnings"] = report.warnings;
    return doc;
}

std::string tau_matrix_csv(const ccm::TauMatrix& taus) {
    std::ostringstream out;
    out << "entity";
    for (const auto& l : taus.labels()) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < taus.dim(); ++i) {
        out << taus.labels()[i];
        for (std::size_t j = 0; j < taus.dim(); ++j) out << ',' << g17(taus.at(i, j));
        out << '\n';
    }
    return out.str();
}

std::string panel_csv(const ccm::IntensityPanel& panel) {
    std::ostringstream out;
    ccm::write_intensity_csv(out, panel);
    return out.str();
}

void emit(const json& doc) { std::cout << doc.dump(2) << '\n'; }

ccm::IntensityPanel load_panel(const std::string& path) {
    return ccm::read_intensity_csv_file(path);
}

// Reorder a {label: alpha} JSON object into the panel's column order; the
// label sets must match exactly.
std::vector<double> alphas_for_labels(const json& by_label,
                                      const std::vector<std::string>& labels) {
    if (!by_label.is_object()) throw ccm::data_error("expected a JSON object of label: alpha");
    if (by_label.size() != labels.size())
        throw ccm::data_error("share file covers " + std::to_string(by_label.size()) +
                              " entities, panel has " + std::to_string(labels.size()));
    std::vector<double> alphas;
    for (const auto& label : labels) {
        const auto it = by_label.find(label);
        if (it == by_label.end())
            throw ccm::data_error("share file is missing entity " + label);
        if (!it->is_number()) throw ccm::data_error("share of " + label + " is not a number");
        alphas.push_back(it->get<double>());
    }
    return alphas;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ccm::io_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ccm::data_error(path + ": " + e.what());
    }
    return doc;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string input, out;
    ccm::IngestConfig cfg;
    std::string policy = "intersection";
};

int run_ingest(const IngestArgs& a) {
    Manifest manifest;
    manifest.command = "ingest";
    manifest.add_input(a.input);
    manifest.flags = {{"input", a.input},        {"out", a.out},
                      {"recovery", a.cfg.recovery}, {"policy", a.policy},
                      {"max-gap", a.cfg.max_fill_gap}, {"affine-a", a.cfg.affine_a},
                      {"affine-b", a.cfg.affine_b}};

    ccm::IngestConfig cfg = a.cfg;
    cfg.policy = a.policy == "forward-fill" ? ccm::AlignPolicy::forward_fill
                                            : ccm::AlignPolicy::intersection;
    const ccm::IngestOutput result = ccm::ingest(ccm::read_spread_csv_file(a.input), cfg);

    prepare_out_dir(a.out);
    ccm::atomic_write_file(a.out + "/intensities.csv", panel_csv(result.panel));
    const std::string report = ccm::to_json(result.report);
    ccm::atomic_write_file(a.out + "/ingest_report.json", report);
    manifest.write(a.out);

    std::cout << report;
    std::size_t filled = 0;
    for (const auto& [label, stats] : result.report.entities) filled += stats.cells_filled;
    std::cerr << "ingested " << result.report.rows_read << " rows into "
              << result.panel.rows() << " dates x " << result.panel.cols()
              << " entities (dropped " << result.report.dropped_dates.size()
              << " dates, filled " << filled << " cells)\n";
    return 0;
}

// -------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string input, out, fix_alphas;
    ccm::FitConfig cfg;
    std::string distance = "quadratic";
    bool differences = false;
};

json config_echo(const ccm::FitConfig& cfg, const std::string& distance, bool differences) {
    return {{"seed", cfg.seed},
            {"restarts", cfg.restarts},
            {"t0", cfg.t0},
            {"cooling", cfg.cooling},
            {"steps_per_level", cfg.steps_per_level},
            {"t_min", cfg.t_min},
            {"theta_min", cfg.theta_min},
            {"theta_max", cfg.theta_max},
            {"polish", cfg.polish},
            {"distance", distance},
            {"differences", differences}};
}

int run_estimate(const EstimateArgs& a) {
    Manifest manifest;
    manifest.command = "estimate";
    manifest.add_input(a.input);
    if (!a.fix_alphas.empty()) manifest.add_input(a.fix_alphas);
    manifest.flags = {{"input", a.input},
                      {"out", a.out},
                      {"seed", a.cfg.seed},
                      {"restarts", a.cfg.restarts},
                      {"distance", a.distance},
                      {"theta-max", a.cfg.theta_max},
                      {"fix-alphas", a.fix_alphas},
                      {"differences", a.differences}};

    ccm::FitConfig cfg = a.cfg;
    cfg.distance = a.distance == "absolute" ? ccm::Distance::absolute
                                            : ccm::Distance::quadratic;
    const ccm::IntensityPanel panel = load_panel(a.input);
    const ccm::TauMatrix taus = ccm::pairwise_tau_matrix(panel, a.differences);
    const ccm::FitResult res =
        a.fix_alphas.empty()
            ? ccm::fit(taus, cfg)
            : ccm::fit_theta_fixed_alphas(
                  taus, alphas_for_labels(read_json_file(a.fix_alphas), panel.labels), cfg);

    const json doc = fit_to_json(res, config_echo(cfg, a.distance, a.differences));
    prepare_out_dir(a.out);
    ccm::atomic_write_file(a.out + "/fit.json", doc.dump(2) + "\n");
    ccm::atomic_write_file(a.out + "/tau_matrix.csv", tau_matrix_csv(taus));
    manifest.write(a.out);

    emit(doc);
    std::cerr << "fitted " << panel.cols() << " entities over " << panel.rows()
              << " dates: theta=" << res.theta << " objective=" << res.objective << '\n';
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

// -------------------------------------------------------------- diagnose

struct DiagnoseArgs {
    std::string input, params, out;
    std::string format = "svg";
    double threshold = 0.05;
};

int run_diagnose(const DiagnoseArgs& a) {
    Manifest manifest;
    manifest.command = "diagnose";
    manifest.add_input(a.input);
    manifest.add_input(a.params);
    manifest.flags = {{"input", a.input},
                      {"params", a.params},
                      {"out", a.out},
                      {"format", a.format},
                      {"threshold", a.threshold}};

    const ccm::IntensityPanel panel = load_panel(a.input);
    const json params = read_json_file(a.params);
    if (!params.contains("labels") || !params.contains("alphas") || !params.contains("theta"))
        throw ccm::data_error(a.params + ": need labels, alphas and theta");
    json by_label = json::object();
    const auto& labels = params["labels"];
    const auto& alphas = params["alphas"];
    if (!labels.is_array() || !alphas.is_array() || labels.size() != alphas.size())
        throw ccm::data_error(a.params + ": labels and alphas must be equal-length arrays");
    for (std::size_t k = 0; k < labels.size(); ++k)
        by_label[labels[k].get<std::string>()] = alphas[k];
    const std::vector<double> panel_alphas = alphas_for_labels(by_label, panel.labels);
    const double theta = params["theta"].get<double>();

    const ccm::SpecCheckReport report =
        ccm::systemic_tau_profile(panel, panel_alphas, theta, a.threshold);
    const ccm::SystemicSeries systemic =
        ccm::extract_systemic_intensity(panel, panel_alphas, theta);

    prepare_out_dir(a.out);
    {
        std::ostringstream csv;
        csv << "date,lambda0_hat\n";
        for (std::size_t t = 0; t < systemic.dates.size(); ++t)
            csv << systemic.dates[t] << ',' << g17(systemic.values[t]) << '\n';
        ccm::atomic_write_file(a.out + "/systemic.csv", csv.str());
    }
    if (a.format == "svg") {
        ccm::atomic_write_file(a.out + "/scatter.svg", ccm::render_scatter_svg(report));
    } else {
        std::ostringstream csv;
        ccm::emit_scatter_csv(report, csv);
        ccm::atomic_write_file(a.out + "/scatter.csv", csv.str());
    }
    const json doc = report_to_json(report);
    ccm::atomic_write_file(a.out + "/report.json", doc.dump(2) + "\n");
    manifest.write(a.out);

    emit(doc);
    std::cerr << "rmse=" << report.rmse << " against threshold " << report.threshold << ": "
              << (report.passed ? "aligned" : "off the line") << '\n';
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return report.passed ? 0 : 3;
}

// --------------------------------------------------------------- rolling

struct RollingArgs {
    std::string input, out;
    std::size_t window = 250;
    std::size_t step = 20;
    std::string mode = "free";
    ccm::FitConfig cfg;
    std::string distance = "quadratic";
};

int run_rolling(const RollingArgs& a) {
    Manifest manifest;
    manifest.command = "rolling";
    manifest.add_input(a.input);
    manifest.flags = {{"input", a.input}, {"out", a.out},
                      {"window", a.window}, {"step", a.step},
                      {"mode", a.mode},     {"seed", a.cfg.seed},
                      {"restarts", a.cfg.restarts}, {"distance", a.distance},
                      {"theta-max", a.cfg.theta_max}};

    ccm::FitConfig cfg = a.cfg;
    cfg.distance = a.distance == "absolute" ? ccm::Distance::absolute
                                            : ccm::Distance::quadratic;
    const ccm::IntensityPanel panel = load_panel(a.input);
    const auto rolls = ccm::rolling_fit(panel, a.window, a.step, cfg,
                                        a.mode == "fixed-alpha"
                                            ? ccm::RollingMode::fixed_alpha
                                            : ccm::RollingMode::free);

    std::ostringstream csv;
    csv << "window_end,theta";
    for (const auto& l : panel.labels) csv << ",alpha_" << l;
    csv << ",objective\n";
    json windows = json::array();
    for (const auto& roll : rolls) {
        csv << roll.window_end << ',' << g17(roll.result.theta);
        for (double alpha : roll.result.alphas) csv << ',' << g17(alpha);
        csv << ',' << g17(roll.result.objective) << '\n';
        windows.push_back({{"window_end", roll.window_end},
                           {"theta", roll.result.theta},
                           {"alphas", roll.result.alphas},
                           {"objective", roll.result.objective}});
    }
    prepare_out_dir(a.out);
    ccm::atomic_write_file(a.out + "/rolling.csv", csv.str());
    manifest.write(a.out);

    json doc;
    doc["mode"] = a.mode;
    doc["window"] = a.window;
    doc["step"] = a.step;
    doc["windows"] = windows;
    emit(doc);
    std::cerr << rolls.size() << " windows of " << a.window << " rows\n";
    return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string out;
    std::size_t d = 0;
    double theta = 1.0;
    double lambda0 = 1.0;
    std::string lambdas;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    bool panel = false;
};

std::vector<double> parse_rate_list(const std::string& text) {
    std::vector<double> rates;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            rates.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ccm::data_error("bad rate '" + token + "' in --lambdas");
        }
    }
    return rates;
}

int run_simulate(const SimulateArgs& a) {
    Manifest manifest;
    manifest.command = "simulate";
    manifest.flags = {{"out", a.out},     {"d", a.d},       {"theta", a.theta},
                      {"lambda0", a.lambda0}, {"lambdas", a.lambdas}, {"n", a.n},
                      {"seed", a.seed},   {"panel", a.panel}};

    const std::vector<double> lambdas = parse_rate_list(a.lambdas);
    if (a.d != 0 && a.d != lambdas.size())
        throw std::invalid_argument("--d disagrees with the --lambdas list length");
    const ccm::SimConfig sim(a.n, a.seed, ccm::ShockIntensities(a.lambda0, lambdas), a.theta);
    const ccm::DefaultTimeSample sample = ccm::simulate_default_times(sim);

    prepare_out_dir(a.out);
    {
        std::ostringstream csv;
        csv << "replication,entity,tau_time,systemic_time\n";
        for (std::size_t r = 0; r < sample.n; ++r)
            for (std::size_t k = 0; k < sample.d; ++k)
                csv << r << ",e" << k + 1 << ',' << g17(sample.at(r, k)) << ','
                    << g17(sample.systemic_times[r]) << '\n';
        ccm::atomic_write_file(a.out + "/sample.csv", csv.str());
    }
    if (a.panel) {
        // Rank-preserving map of the default times onto a calendar grid:
        // bounded, decreasing in the time, so panel taus equal sample taus.
        std::vector<std::string> dates;
        std::vector<std::string> labels;
        std::vector<double> values;
        dates.reserve(sample.n);
        for (std::size_t r = 0; r < sample.n; ++r)
            dates.push_back(date_from_serial(static_cast<long>(r)));
        for (std::size_t k = 0; k < sample.d; ++k) labels.push_back("e" + std::to_string(k + 1));
        values.reserve(sample.n * sample.d);
        for (std::size_t r = 0; r < sample.n; ++r)
            for (std::size_t k = 0; k < sample.d; ++k)
                values.push_back(std::pow(1.0 + sample.at(r, k), -1.0 / a.theta));
        const ccm::IntensityPanel panel(dates, labels, values);
        ccm::atomic_write_file(a.out + "/intensities.csv", panel_csv(panel));
    }
    manifest.write(a.out);

    json doc;
    doc["n"] = sample.n;
    doc["d"] = sample.d;
    doc["seed"] = a.seed;
    doc["theta"] = a.theta;
    doc["files"] = a.panel ? json::array({"sample.csv", "intensities.csv"})
                           : json::array({"sample.csv"});
    emit(doc);
    std::cerr << "simulated " << sample.n << " replications of " << sample.d << " entities\n";
    return 0;
}

// --------------------------------------------------------------- hac-tau

struct HacTauArgs {
    double theta = 1.0;
    double phi = 1.0;
    std::string lambdas;
    std::string position = "inner";
};

int run_hac_tau(const HacTauArgs& a) {
    const std::vector<double> rates = parse_rate_list(a.lambdas);
    if (rates.size() != 3)
        throw std::invalid_argument("--lambdas needs exactly three rates i,j,k");
    const ccm::HacSpec spec(a.theta, a.phi, rates[0], rates[1], rates[2],
                            a.position == "inner" ? ccm::SystemicPosition::inner
                                                  : ccm::SystemicPosition::outer);
    const ccm::HacTauRoutes routes = ccm::hac_kendall_tau_routes(spec);

    json doc;
    doc["theta"] = a.theta;
    doc["phi"] = a.phi;
    doc["lambda_i"] = rates[0];
    doc["lambda_j"] = rates[1];
    doc["lambda_k"] = rates[2];
    doc["case"] = a.position;
    doc["tau"] = routes.direct;
    doc["tau_quadrature"] = routes.quadrature;
    doc["difference"] = routes.direct - routes.quadrature;
    emit(doc);
    std::cerr << "tau = " << routes.direct << " (cross-check gap "
              << routes.direct - routes.quadrature << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contagion-model toolkit: CDS ingestion, cluster calibration, "
                 "line diagnostics, rolling fits, simulation, nested-pair taus"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Convert a CDS spread CSV to intensities");
    ingest->add_option("--input", ingest_args.input, "CSV with date,entity,spread_bps")
        ->required()
        ->check(CLI::ExistingFile);
    ingest->add_option("--out", ingest_args.out, "output directory")->required();
    ingest->add_option("--recovery", ingest_args.cfg.recovery, "recovery rate in [0,1)")
        ->capture_default_str();
    ingest->add_option("--policy", ingest_args.policy, "date alignment policy")
        ->check(CLI::IsMember({"intersection", "forward-fill"}))
        ->capture_default_str();
    ingest->add_option("--max-gap", ingest_args.cfg.max_fill_gap,
                       "longest missing run forward-fill bridges")
        ->capture_default_str();
    ingest->add_option("--affine-a", ingest_args.cfg.affine_a, "intensity scale")
        ->capture_default_str();
    ingest->add_option("--affine-b", ingest_args.cfg.affine_b, "intensity shift")
        ->capture_default_str();

    EstimateArgs estimate_args;
    auto* estimate = app.add_subcommand("estimate", "Calibrate shares and theta to a panel");
    estimate->add_option("--input", estimate_args.input, "CSV with date,entity,intensity")
        ->required()
        ->check(CLI::ExistingFile);
    estimate->add_option("--out", estimate_args.out, "output directory")->required();
    estimate->add_option("--seed", estimate_args.cfg.seed, "annealing seed")
        ->envname("CONTAGION_SEED")
        ->capture_default_str();
    estimate->add_option("--restarts", estimate_args.cfg.restarts, "annealing restarts")
        ->capture_default_str();
    estimate->add_option("--distance", estimate_args.distance, "objective distance")
        ->check(CLI::IsMember({"quadratic", "absolute"}))
        ->capture_default_str();
    estimate->add_option("--theta-max", estimate_args.cfg.theta_max, "upper theta bound")
        ->capture_default_str();
    estimate->add_option("--fix-alphas", estimate_args.fix_alphas,
                         "JSON file of {label: share}; only theta is fitted")
        ->check(CLI::ExistingFile);
    estimate->add_flag("--differences", estimate_args.differences,
                       "compute taus on day-over-day changes");

    DiagnoseArgs diagnose_args;
    auto* diagnose = app.add_subcommand("diagnose", "Check the systemic-tau line alignment");
    diagnose->add_option("--input", diagnose_args.input, "CSV with date,entity,intensity")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--params", diagnose_args.params,
                         "fit JSON with labels, alphas, theta")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--out", diagnose_args.out, "output directory")->required();
    diagnose->add_option("--format", diagnose_args.format, "scatter format")
        ->check(CLI::IsMember({"svg", "csv"}))
        ->capture_default_str();
    diagnose->add_option("--threshold", diagnose_args.threshold, "RMSE pass bound")
        ->capture_default_str();

    RollingArgs rolling_args;
    auto* rolling = app.add_subcommand("rolling", "Refit over sliding windows");
    rolling->add_option("--input", rolling_args.input, "CSV with date,entity,intensity")
        ->required()
        ->check(CLI::ExistingFile);
    rolling->add_option("--out", rolling_args.out, "output directory")->required();
    rolling->add_option("--window", rolling_args.window, "rows per window")
        ->capture_default_str();
    rolling->add_option("--step", rolling_args.step, "rows between window starts")
        ->capture_default_str();
    rolling->add_option("--mode", rolling_args.mode, "free or fixed-alpha")
        ->check(CLI::IsMember({"free", "fixed-alpha"}))
        ->capture_default_str();
    rolling->add_option("--seed", rolling_args.cfg.seed, "annealing seed")
        ->envname("CONTAGION_SEED")
        ->capture_default_str();
    rolling->add_option("--restarts", rolling_args.cfg.restarts, "annealing restarts")
        ->capture_default_str();
    rolling->add_option("--distance", rolling_args.distance, "objective distance")
        ->check(CLI::IsMember({"quadratic", "absolute"}))
        ->capture_default_str();
    rolling->add_option("--theta-max", rolling_args.cfg.theta_max, "upper theta bound")
        ->capture_default_str();

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "Draw joint default times");
    simulate->add_option("--d", simulate_args.d, "entity count (checked against --lambdas)");
    simulate->add_option("--theta", simulate_args.theta, "contagion parameter >= 1")
        ->required();
    simulate->add_option("--lambda0", simulate_args.lambda0, "systemic shock rate")
        ->capture_default_str();
    simulate->add_option("--lambdas", simulate_args.lambdas,
                         "comma-separated idiosyncratic rates")
        ->required();
    simulate->add_option("--n", simulate_args.n, "replications")->required();
    simulate->add_option("--seed", simulate_args.seed, "stream seed")
        ->envname("CONTAGION_SEED")
        ->capture_default_str();
    simulate->add_option("--out", simulate_args.out, "output directory")->required();
    simulate->add_flag("--panel", simulate_args.panel,
                       "also write a synthetic intensity panel on a date grid");

    HacTauArgs hac_args;
    auto* hac_tau = app.add_subcommand("hac-tau", "Kendall tau of a nested observed pair");
    hac_tau->add_option("--theta", hac_args.theta, "inner parameter")->required();
    hac_tau->add_option("--phi", hac_args.phi, "outer parameter")->required();
    hac_tau->add_option("--lambdas", hac_args.lambdas, "rates i,j,k")->required();
    hac_tau->add_option("--case", hac_args.position, "systemic shock position")
        ->check(CLI::IsMember({"inner", "outer"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (ingest->parsed()) return run_ingest(ingest_args);
        if (estimate->parsed()) return run_estimate(estimate_args);
        if (diagnose->parsed()) return run_diagnose(diagnose_args);
        if (rolling->parsed()) return run_rolling(rolling_args);
        if (simulate->parsed()) return run_simulate(simulate_args);
        if (hac_tau->parsed()) return run_hac_tau(hac_args);
    } catch (const ccm::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ccm::consistency_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        // data_error, numeric_error and anything else data-shaped.
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
