#include "longidesign/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "longidesign/allocation.hpp"
#include "longidesign/covariance.hpp"
#include "longidesign/oracle.hpp"
#include "longidesign/scenario.hpp"
#include "longidesign/solvers.hpp"
#include "longidesign/variance.hpp"

namespace longidesign {

namespace {

using ojson = nlohmann::ordered_json;

constexpr int kDefaultRMax = 100;

struct Options {
    std::string scenario_path;
    std::string format = "text";
    unsigned long long seed = 20260826ULL;
    long long replicates = 10000;
    int r_max = 0;  // 0 = use scenario r_max, else default
    std::string out_path;
};

std::string fmt6(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

// ---------------------------------------------------------------------------
// Output assembly
// ---------------------------------------------------------------------------

void print_text(const ojson& doc, std::ostream& os, int indent = 0) {
    const std::string pad(indent, ' ');
    for (const auto& [key, value] : doc.items()) {
        if (value.is_object()) {
            os << pad << key << ":\n";
            print_text(value, os, indent + 2);
        } else if (value.is_array()) {
            bool scalars = true;
            for (const auto& el : value)
                if (el.is_structured()) { scalars = false; break; }
            if (scalars) {
                os << pad << key << " = [";
                for (size_t i = 0; i < value.size(); ++i) {
                    if (i) os << ", ";
                    if (value[i].is_number_float())
                        os << fmt6(value[i].get<double>());
                    else
                        os << value[i].dump();
                }
                os << "]\n";
            } else {
                int i = 0;
                for (const auto& row : value) {
                    os << pad << key << "[" << i++ << "]:\n";
                    print_text(row, os, indent + 2);
                }
            }
        } else if (value.is_number_float()) {
            os << pad << key << " = " << fmt6(value.get<double>()) << "\n";
        } else {
            os << pad << key << " = " << value.dump() << "\n";
        }
    }
}

void flatten_into(const ojson& doc, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& cells) {
    for (const auto& [key, value] : doc.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten_into(value, name, cells);
        } else if (value.is_number_float()) {
            cells.emplace_back(name, fmt6(value.get<double>()));
        } else if (value.is_string()) {
            cells.emplace_back(name, value.get<std::string>());
        } else {
            cells.emplace_back(name, value.dump());
        }
    }
}

void print_csv(const ojson& doc, std::ostream& os) {
    // An array of row objects becomes a table; a single object becomes one row.
    const bool is_table = doc.is_array();
    std::vector<ojson> rows;
    if (is_table)
        rows.assign(doc.begin(), doc.end());
    else
        rows.push_back(doc);
    bool header_done = false;
    for (const ojson& row : rows) {
        std::vector<std::pair<std::string, std::string>> cells;
        flatten_into(row, "", cells);
        if (!header_done) {
            for (size_t i = 0; i < cells.size(); ++i)
                os << cells[i].first << (i + 1 < cells.size() ? "," : "\n");
            header_done = true;
        }
        for (size_t i = 0; i < cells.size(); ++i)
            os << cells[i].second << (i + 1 < cells.size() ? "," : "\n");
    }
}

void emit(const ojson& doc, const Options& opt) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!opt.out_path.empty()) {
        file.open(opt.out_path);
        if (!file) throw DomainError("cannot open output file: " + opt.out_path);
        os = &file;
    }
    if (opt.format == "json") {
        *os << doc.dump(2) << "\n";
    } else if (opt.format == "csv") {
        print_csv(doc, *os);
    } else {
        if (doc.is_array()) {
            int i = 0;
            for (const auto& row : doc) {
                *os << "--- row " << i++ << " ---\n";
                print_text(row, *os);
            }
        } else {
            print_text(doc, *os);
        }
    }
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

Scenario load_scenario(const Options& opt) {
    if (opt.scenario_path.empty())
        throw DomainError("this subcommand needs --scenario <file.json>");
    return parse_scenario_file(opt.scenario_path);
}

int effective_r_max(const Scenario& sc, const Options& opt, int fallback) {
    if (opt.r_max > 0) return opt.r_max;
    if (sc.r_max) return *sc.r_max;
    return fallback;
}

double require_target_power(const Scenario& sc) {
    if (!sc.target_power)
        throw DomainError("scenario is missing \"target_power\"");
    return *sc.target_power;
}

double require_n(const Scenario& sc) {
    if (!sc.n) throw DomainError("scenario is missing \"n\"");
    return *sc.n;
}

ojson describe_variance(const DesignQuery& q) {
    const UnitVariance uv = unit_variance(q);
    ojson out;
    out["unit_variance"] = uv.value;
    out["method"] = uv.method == VarMethod::ClosedForm
                        ? "closed_form"
                        : (uv.method == VarMethod::Quadrature ? "quadrature"
                                                              : "generic_matrix");
    return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies (each returns the result document; throws on error)
// ---------------------------------------------------------------------------

ojson run_power(const Scenario& sc) {
    const double n = require_n(sc);
    ojson out;
    out["power"] = power(n, sc.query);
    out["n"] = n;
    out["effect"] = sc.query.effect.coefficient(sc.query.hyp, sc.query.grid.tau());
    out.update(describe_variance(sc.query));
    return out;
}

ojson run_n(const Scenario& sc) {
    const RequiredN res = required_n(require_target_power(sc), sc.query);
    ojson out;
    out["n"] = res.n;
    out["n_fractional"] = res.fractional;
    out["target_power"] = *sc.target_power;
    out["achieved_power"] = power(static_cast<double>(res.n), sc.query);
    out.update(describe_variance(sc.query));
    return out;
}

ojson run_r(const Scenario& sc, const Options& opt) {
    const int r_hi = effective_r_max(sc, opt, 1000);
    const RequiredR res =
        required_r(require_target_power(sc), require_n(sc), sc.query, r_hi);
    ojson out;
    if (res.r) {
        out["r"] = *res.r;
        out["achieved_power"] =
            power(require_n(sc), sc.query.with_r(*res.r));
    } else {
        out["r"] = nullptr;
        out["unattainable"] = true;
        out["max_power"] = res.max_power;
        out["max_power_is_limit"] = res.limit_known;
        throw ComputationError("target power unattainable for any r <= " +
                               std::to_string(r_hi) + "; maximum achievable " +
                               fmt6(res.max_power) +
                               (res.limit_known ? " (r -> infinity limit)"
                                                : " (scan maximum)"));
    }
    out["target_power"] = *sc.target_power;
    out["n"] = *sc.n;
    return out;
}

ojson run_mde(const Scenario& sc) {
    const DetectableEffect res =
        min_detectable_effect(require_target_power(sc), require_n(sc), sc.query);
    ojson out;
    out["mde_coefficient"] = res.coefficient;
    out["mde_percent"] = res.percent;
    out["target_power"] = *sc.target_power;
    out["n"] = *sc.n;
    out.update(describe_variance(sc.query));
    return out;
}

ojson run_optimal(const Scenario& sc, const Options& opt) {
    if (!sc.cost) throw DomainError("scenario is missing the \"cost\" block");
    const int r_hi = effective_r_max(sc, opt, kDefaultRMax);
    const AllocationSolution sol = solve_allocation(sc.query, *sc.cost, r_hi);
    ojson out;
    out["r"] = sol.r_opt;
    out["n"] = sol.n_opt;
    out["power"] = sol.power;
    out["cost"] = sol.cost;
    out["r_at_bound"] = sol.r_at_bound;
    if (sol.slope_rel_at_ropt)
        out["slope_reliability_at_r"] = *sol.slope_rel_at_ropt;
    return out;
}

// Set a numeric value at a dotted path inside a JSON document.
void set_path(nlohmann::json& doc, const std::string& path, double value) {
    nlohmann::json* node = &doc;
    size_t start = 0;
    while (true) {
        const size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw DomainError("sweep axis path is malformed: " + path);
        if (dot == std::string::npos) {
            const bool integral = value == std::floor(value) &&
                                  (*node)[key].is_number_integer();
            if (integral)
                (*node)[key] = static_cast<long long>(value);
            else
                (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

ojson run_sweep(const Scenario& sc, const Options& opt) {
    if (sc.sweep.empty())
        throw DomainError("scenario is missing the \"sweep\" block");
    // Cross-product of all axes, row-major in axis order.
    std::vector<size_t> sizes, index(sc.sweep.size(), 0);
    size_t total = 1;
    for (const SweepAxis& a : sc.sweep) {
        sizes.push_back(a.values.size());
        total *= a.values.size();
    }

    std::vector<std::vector<double>> cells(total);
    for (size_t cell = 0; cell < total; ++cell) {
        size_t rem = cell;
        std::vector<double> coords(sc.sweep.size());
        for (size_t a = sc.sweep.size(); a-- > 0;) {
            coords[a] = sc.sweep[a].values[rem % sizes[a]];
            rem /= sizes[a];
        }
        cells[cell] = std::move(coords);
    }

    std::vector<ojson> rows(total);
    std::vector<std::string> errors(total);
    const int threads = std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&](size_t tid) {
        for (size_t cell = tid; cell < total; cell += threads) {
            nlohmann::json doc = sc.raw;
            doc.erase("sweep");
            ojson row;
            try {
                for (size_t a = 0; a < sc.sweep.size(); ++a) {
                    set_path(doc, sc.sweep[a].path, cells[cell][a]);
                    row[sc.sweep[a].path] = cells[cell][a];
                }
                const Scenario cs = parse_scenario(doc);
                if (sc.sweep_solve == "power")
                    row.update(run_power(cs));
                else if (sc.sweep_solve == "n")
                    row.update(run_n(cs));
                else if (sc.sweep_solve == "r")
                    row.update(run_r(cs, opt));
                else if (sc.sweep_solve == "mde")
                    row.update(run_mde(cs));
                else
                    row.update(run_optimal(cs, opt));
            } catch (const std::exception& e) {
                errors[cell] = e.what();
            }
            rows[cell] = std::move(row);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();

    ojson out = ojson::array();
    for (size_t cell = 0; cell < total; ++cell) {
        if (!errors[cell].empty()) rows[cell]["error"] = errors[cell];
        out.push_back(rows[cell]);
    }
    return out;
}

ojson run_verify(const Options& opt, bool& any_failed) {
    SimConfig cfg;
    cfg.replicates = opt.replicates;
    cfg.seed = opt.seed;
    const std::vector<CheckReport> reports = run_check_battery(cfg);
    ojson out = ojson::array();
    any_failed = false;
    for (const CheckReport& rep : reports) {
        ojson row;
        row["check"] = rep.name;
        row["passed"] = rep.passed;
        row["observed"] = rep.observed;
        row["expected"] = rep.expected;
        row["tolerance"] = rep.tolerance;
        row["detail"] = rep.detail;
        out.push_back(row);
        if (!rep.passed) any_failed = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in reference tables (the study configurations from the worked example)
// ---------------------------------------------------------------------------

struct RefCovariance {
    std::string name;
    CovarianceSpec spec;
};

std::vector<RefCovariance> reference_covariances() {
    RsParams rs;
    rs.intuitive = RsIntuitiveParams{0.34, 0.877, -0.32, 0.36, 6,
                                     RelMode::FixedS, 3.0};
    rs.raw = rs_intuitive_to_raw(*rs.intuitive);
    return {{"cs", CovarianceSpec{CsParams{0.3214, 0.857}}},
            {"dex", CovarianceSpec{DexParams{0.3179, 0.896, 0.18}}},
            {"rs", CovarianceSpec{rs}}};
}

DesignQuery reference_query(const CovarianceSpec& cov, Hypothesis hyp,
                            double v_t0) {
    DesignQuery q;
    q.grid = TimeGrid{6, RelMode::FixedTau, 18.0};
    q.pop = PopulationSpec{0.79, v_t0, 0.0};
    q.cov = cov;
    q.hyp = hyp;
    q.effect.v = PercentEffect{3.5086, 0.1, -0.182, 0.1};
    return q;
}

ojson run_table3() {
    ojson out = ojson::array();
    for (const RefCovariance& rc : reference_covariances()) {
        for (double pw : {0.8, 0.9}) {
            ojson row;
            row["covariance"] = rc.name;
            row["power"] = pw;
            const DesignQuery qc = reference_query(rc.spec, Hypothesis::CMD, 100.0);
            const DesignQuery ql = reference_query(rc.spec, Hypothesis::LDD, 100.0);
            row["mde_p1_pct"] = 100.0 * min_detectable_effect(pw, 133, qc).percent;
            row["mde_p3_pct"] = 100.0 * min_detectable_effect(pw, 133, ql).percent;
            out.push_back(row);
        }
    }
    return out;
}

ojson run_table4() {
    ojson out = ojson::array();
    for (const RefCovariance& rc : reference_covariances()) {
        for (double v_t0 : {0.0, 100.0}) {
            ojson row;
            row["covariance"] = rc.name;
            row["v_t0"] = v_t0;
            row["n_ldd"] =
                required_n(0.9, reference_query(rc.spec, Hypothesis::LDD, v_t0)).n;
            row["n_cmd"] =
                required_n(0.9, reference_query(rc.spec, Hypothesis::CMD, v_t0)).n;
            out.push_back(row);
        }
    }
    return out;
}

ojson run_table5() {
    // Budget-constrained LDD allocations; RS uses the raw variance components
    // reported alongside the worked example.
    RsParams rs_raw;
    rs_raw.raw = RsRawParams{0.0418, 0.2982, 0.000095, -0.0017};
    struct Cell {
        std::string name;
        CovarianceSpec cov;
        double kappa;
        double v_t0;
    };
    const std::vector<Cell> cells = {
        {"cs", CovarianceSpec{CsParams{0.3214, 0.857}}, 5.0, 0.0},
        {"cs", CovarianceSpec{CsParams{0.3214, 0.857}}, 20.0, 0.0},
        {"cs", CovarianceSpec{CsParams{0.3214, 0.857}}, 20.0, 100.0},
        {"dex", CovarianceSpec{DexParams{0.3179, 0.896, 0.18}}, 20.0, 0.0},
        {"dex", CovarianceSpec{DexParams{0.3179, 0.896, 0.18}}, 20.0, 100.0},
        {"rs", CovarianceSpec{rs_raw}, 20.0, 0.0},
        {"rs", CovarianceSpec{rs_raw}, 20.0, 100.0},
    };
    ojson out = ojson::array();
    for (const Cell& cell : cells) {
        DesignQuery q = reference_query(cell.cov, Hypothesis::LDD, cell.v_t0);
        CostSpec cost{80.0, cell.kappa, Budget{100000.0}};
        const AllocationSolution sol = solve_allocation(q, cost, 18);
        ojson row;
        row["covariance"] = cell.name;
        row["kappa"] = cell.kappa;
        row["v_t0"] = cell.v_t0;
        row["r"] = sol.r_opt;
        row["n"] = sol.n_opt;
        row["power"] = sol.power;
        row["cost"] = sol.cost;
        out.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wizard
// ---------------------------------------------------------------------------

std::string prompt(const std::string& text, const std::string& fallback) {
    std::cout << text;
    if (!fallback.empty()) std::cout << " [" << fallback << "]";
    std::cout << ": " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line) || line.empty()) return fallback;
    return line;
}

double prompt_num(const std::string& text, const std::string& fallback) {
    const std::string raw = prompt(text, fallback);
    try {
        size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw DomainError("expected a number, got \"" + raw + "\"");
    }
}

ojson run_wizard(const Options& opt, std::string& solve_out) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    const std::string hyp =
        prompt("Hypothesis: constant difference (cmd), diverging slopes (ldd)",
               "ldd");
    doc["hypothesis"] = hyp;
    doc["alpha"] = prompt_num("Two-sided significance level alpha", "0.05");

    const std::string mode =
        prompt("Fix the spacing between measures (fixed_s) or the total "
               "follow-up (fixed_tau)",
               "fixed_tau");
    nlohmann::json grid;
    grid["mode"] = mode;
    grid["value"] = prompt_num(
        mode == "fixed_s" ? "Spacing between measures" : "Total follow-up time",
        "18");
    grid["r"] = static_cast<long long>(prompt_num("Post-baseline measures r", "6"));
    doc["grid"] = grid;

    nlohmann::json pop;
    pop["pe"] = prompt_num("Exposure prevalence pe", "0.5");
    pop["v_t0"] = prompt_num("Variance of entry time V(t0) (0 if everyone "
                             "starts at the same time)",
                             "0");
    pop["rho_e_t0"] =
        prompt_num("Correlation of exposure with entry time", "0");
    doc["population"] = pop;

    const std::string cov_type =
        prompt("Residual covariance: cs, dex or rs", "cs");
    nlohmann::json cov;
    cov["type"] = cov_type;
    if (cov_type == "cs" || cov_type == "dex") {
        cov["sigma2"] = prompt_num("Residual variance sigma^2", "1");
        cov["rho"] = prompt_num("Correlation rho", "0.8");
        if (cov_type == "dex")
            cov["theta"] = prompt_num("Damping exponent theta (0=cs, 1=ar1)", "1");
    } else {
        const std::string notation =
            prompt("Random-slopes parameters in standard notation (raw) or "
                   "reliability notation (intuitive)",
                   "intuitive");
        if (notation == "raw") {
            nlohmann::json raw;
            raw["sigma_w2"] = prompt_num("Within-subject variance sigma_w^2", "1");
            raw["sigma_b0_2"] = prompt_num("Random-intercept variance", "0");
            raw["sigma_b1_2"] = prompt_num("Random-slope variance", "0");
            raw["sigma_b0b1"] = prompt_num("Intercept-slope covariance", "0");
            cov["raw"] = raw;
        } else {
            nlohmann::json in;
            in["sigma_t0_2"] = prompt_num("Residual variance at baseline", "1");
            in["rho_t0"] = prompt_num("Baseline reliability rho_t0", "0.8");
            in["rho_b0b1"] = prompt_num("Intercept-slope correlation", "0");
            in["slope_rel"] = prompt_num("Slope reliability", "0.4");
            in["r_tilde"] = static_cast<long long>(
                prompt_num("Number of measures the slope reliability refers to",
                           "6"));
            in["mode"] = prompt("Reliability anchored to spacing (fixed_s) or "
                                "follow-up (fixed_tau)",
                                mode);
            in["horizon"] = prompt_num("Spacing or follow-up the reliability "
                                       "refers to",
                                       grid["value"].dump());
            cov["intuitive"] = in;
        }
    }
    doc["covariance"] = cov;

    nlohmann::json effect;
    effect["mu00"] = prompt_num("Baseline mean among unexposed mu00", "1");
    effect["p1"] = prompt_num("Percent group difference at baseline p1", "0");
    if (hyp != "cmd") {
        effect["p2"] = prompt_num("Percent change over follow-up p2", "0");
        effect["p3"] = prompt_num("Percent divergence between groups p3", "0.1");
    }
    doc["effect"] = effect;

    const std::string solve = prompt(
        "Solve for: power, n, r, mde or optimal (cost-optimal design)", "n");
    solve_out = solve;
    if (solve == "power" || solve == "r" || solve == "mde")
        doc["n"] = prompt_num("Sample size N", "100");
    if (solve == "n" || solve == "r" || solve == "mde")
        doc["target_power"] = prompt_num("Desired power", "0.8");
    if (solve == "optimal") {
        nlohmann::json cost;
        cost["c1"] = prompt_num("Cost of recruiting one participant c1", "80");
        cost["kappa"] =
            prompt_num("Cost ratio kappa (follow-up measures are kappa times "
                       "cheaper)",
                       "20");
        const std::string kind =
            prompt("Constrain the total budget (budget) or a power floor "
                   "(power)",
                   "power");
        if (kind == "budget")
            cost["budget"] = prompt_num("Total budget", "100000");
        else
            cost["power_floor"] = prompt_num("Desired power", "0.8");
        doc["cost"] = cost;
        doc["r_max"] = static_cast<long long>(
            prompt_num("Largest r worth considering", "100"));
    }

    const std::string save =
        prompt("Write the collected scenario to (empty to skip)",
               opt.out_path.empty() ? "wizard_scenario.json" : opt.out_path);
    if (!save.empty()) {
        std::ofstream f(save);
        if (!f) throw DomainError("cannot write scenario file: " + save);
        f << doc.dump(2) << "\n";
        std::cout << "Scenario written to " << save << "\n";
    }
    return doc;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{
        "Design engine for two-group longitudinal studies: power, sample "
        "size, number of repeated measures, detectable effects and "
        "cost-optimal allocation under compound-symmetry, damped-exponential "
        "or random-slopes residual covariance."};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    Options opt;
    app.add_option("--scenario", opt.scenario_path, "Scenario JSON file");
    app.add_option("--format", opt.format, "Output format: text, csv or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--seed", opt.seed, "Simulation seed");
    app.add_option("--replicates", opt.replicates, "Simulation replicates");
    app.add_option("--r-max", opt.r_max,
                   "Upper bound for searches over the number of measures");
    app.add_option("--out", opt.out_path, "Write results to this file");

    auto* cmd_power = app.add_subcommand("power", "Power at a fixed design");
    auto* cmd_n = app.add_subcommand("n", "Required sample size");
    auto* cmd_r = app.add_subcommand("r", "Required repeated measures");
    auto* cmd_mde = app.add_subcommand("mde", "Minimum detectable effect");
    auto* cmd_optimal =
        app.add_subcommand("optimal", "Cost-optimal (N, r) allocation");
    auto* cmd_sweep = app.add_subcommand("sweep", "Sensitivity sweep");
    auto* cmd_verify =
        app.add_subcommand("verify", "Run the internal consistency battery");
    auto* cmd_tables = app.add_subcommand(
        "tables", "Regenerate the built-in reference tables");
    int which_table = 4;
    cmd_tables->add_option("--which", which_table, "Table number: 3, 4 or 5")
        ->check(CLI::IsMember({3, 4, 5}));
    auto* cmd_wizard = app.add_subcommand(
        "wizard", "Interactive prompt-driven design session");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_power->parsed()) {
            emit(run_power(load_scenario(opt)), opt);
        } else if (cmd_n->parsed()) {
            emit(run_n(load_scenario(opt)), opt);
        } else if (cmd_r->parsed()) {
            const Scenario sc = load_scenario(opt);
            try {
                emit(run_r(sc, opt), opt);
            } catch (const ComputationError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        } else if (cmd_mde->parsed()) {
            emit(run_mde(load_scenario(opt)), opt);
        } else if (cmd_optimal->parsed()) {
            emit(run_optimal(load_scenario(opt), opt), opt);
        } else if (cmd_sweep->parsed()) {
            emit(run_sweep(load_scenario(opt), opt), opt);
        } else if (cmd_verify->parsed()) {
            bool any_failed = false;
            emit(run_verify(opt, any_failed), opt);
            if (any_failed) {
                std::cerr << "error: one or more consistency checks failed\n";
                return 1;
            }
        } else if (cmd_tables->parsed()) {
            if (which_table == 3)
                emit(run_table3(), opt);
            else if (which_table == 4)
                emit(run_table4(), opt);
            else
                emit(run_table5(), opt);
        } else if (cmd_wizard->parsed()) {
            std::string solve;
            const ojson doc = run_wizard(opt, solve);
            Options res_opt = opt;
            res_opt.out_path.clear();  // results go to stdout; --out holds the
                                       // scenario in wizard mode
            const Scenario sc = parse_scenario(doc);
            if (solve == "power")
                emit(run_power(sc), res_opt);
            else if (solve == "n")
                emit(run_n(sc), res_opt);
            else if (solve == "r")
                emit(run_r(sc, res_opt), res_opt);
            else if (solve == "mde")
                emit(run_mde(sc), res_opt);
            else if (solve == "optimal")
                emit(run_optimal(sc, res_opt), res_opt);
            else
                throw DomainError("unknown solve choice: " + solve);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ComputationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace longidesign
