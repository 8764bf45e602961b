#include "longidesign/scenario.hpp"

#include <fstream>

#include "longidesign/covariance.hpp"

namespace longidesign {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw DomainError(path + ": " + msg);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path, const char* key) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!j.contains(key)) fail(full, "missing required number");
    if (!j.at(key).is_number()) fail(full, "expected a number");
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key,
                     double fallback) {
    if (!j.contains(key)) return fallback;
    const std::string full = path.empty() ? key : path + "." + key;
    if (!j.at(key).is_number()) fail(full, "expected a number");
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& path, const char* key) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!j.contains(key)) fail(full, "missing required integer");
    if (!j.at(key).is_number_integer()) fail(full, "expected an integer");
    return j.at(key).get<int>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!j.contains(key)) fail(full, "missing required string");
    if (!j.at(key).is_string()) fail(full, "expected a string");
    return j.at(key).get<std::string>();
}

RelMode parse_mode(const std::string& text, const std::string& path) {
    if (text == "fixed_s") return RelMode::FixedS;
    if (text == "fixed_tau") return RelMode::FixedTau;
    fail(path, "expected \"fixed_s\" or \"fixed_tau\"");
}

std::string mode_name(RelMode m) {
    return m == RelMode::FixedS ? "fixed_s" : "fixed_tau";
}

TimeGrid parse_grid(const json& j) {
    require_object(j, "grid");
    reject_unknown(j, "grid", {"r", "mode", "value"});
    TimeGrid g;
    g.r = get_int(j, "grid", "r");
    if (g.r < 0) fail("grid.r", "must be non-negative");
    g.mode = parse_mode(get_string(j, "grid", "mode"), "grid.mode");
    g.value = get_number(j, "grid", "value");
    if (g.value <= 0.0) fail("grid.value", "must be positive");
    if (g.mode == RelMode::FixedTau && g.r < 1)
        fail("grid.r", "fixed_tau grids need at least one follow-up measure");
    return g;
}

PopulationSpec parse_population(const json& j) {
    require_object(j, "population");
    reject_unknown(j, "population", {"pe", "v_t0", "rho_e_t0"});
    PopulationSpec p;
    p.pe = get_number(j, "population", "pe");
    p.v_t0 = get_number_or(j, "population", "v_t0", 0.0);
    p.rho_e_t0 = get_number_or(j, "population", "rho_e_t0", 0.0);
    try {
        p.validate();
    } catch (const DomainError& e) {
        fail("population", e.what());
    }
    return p;
}

RsIntuitiveParams parse_rs_intuitive(const json& j, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, path,
                   {"sigma_t0_2", "rho_t0", "rho_b0b1", "slope_rel", "r_tilde",
                    "mode", "horizon"});
    RsIntuitiveParams p;
    p.sigma_t0_2 = get_number(j, path, "sigma_t0_2");
    p.rho_t0 = get_number(j, path, "rho_t0");
    p.rho_b0b1 = get_number(j, path, "rho_b0b1");
    p.slope_rel = get_number(j, path, "slope_rel");
    p.r_tilde = get_int(j, path, "r_tilde");
    p.rel_mode = parse_mode(get_string(j, path, "mode"), path + ".mode");
    p.horizon = get_number(j, path, "horizon");
    return p;
}

CovarianceSpec parse_covariance(const json& j) {
    require_object(j, "covariance");
    const std::string type = get_string(j, "covariance", "type");
    CovarianceSpec spec;
    if (type == "cs") {
        reject_unknown(j, "covariance", {"type", "sigma2", "rho"});
        spec.v = CsParams{get_number(j, "covariance", "sigma2"),
                          get_number(j, "covariance", "rho")};
    } else if (type == "dex") {
        reject_unknown(j, "covariance", {"type", "sigma2", "rho", "theta"});
        spec.v = DexParams{get_number(j, "covariance", "sigma2"),
                           get_number(j, "covariance", "rho"),
                           get_number(j, "covariance", "theta")};
    } else if (type == "rs") {
        reject_unknown(j, "covariance", {"type", "raw", "intuitive"});
        RsParams rs;
        const bool has_raw = j.contains("raw");
        const bool has_int = j.contains("intuitive");
        if (has_raw == has_int)
            fail("covariance", "rs needs exactly one of \"raw\" or \"intuitive\"");
        if (has_raw) {
            const json& rj = j.at("raw");
            require_object(rj, "covariance.raw");
            reject_unknown(rj, "covariance.raw",
                           {"sigma_w2", "sigma_b0_2", "sigma_b1_2", "sigma_b0b1"});
            rs.raw.sigma_w2 = get_number(rj, "covariance.raw", "sigma_w2");
            rs.raw.sigma_b0_2 = get_number(rj, "covariance.raw", "sigma_b0_2");
            rs.raw.sigma_b1_2 = get_number(rj, "covariance.raw", "sigma_b1_2");
            rs.raw.sigma_b0b1 = get_number(rj, "covariance.raw", "sigma_b0b1");
        } else {
            rs.intuitive =
                parse_rs_intuitive(j.at("intuitive"), "covariance.intuitive");
            try {
                rs.raw = rs_intuitive_to_raw(*rs.intuitive);
            } catch (const DomainError& e) {
                fail("covariance.intuitive", e.what());
            }
        }
        spec.v = rs;
    } else {
        fail("covariance.type", "expected \"cs\", \"dex\" or \"rs\"");
    }
    return spec;
}

EffectSpec parse_effect(const json& j, Hypothesis hyp) {
    require_object(j, "effect");
    EffectSpec e;
    if (j.contains("beta")) {
        reject_unknown(j, "effect", {"beta"});
        e.v = AbsoluteEffect{get_number(j, "effect", "beta")};
        return e;
    }
    reject_unknown(j, "effect", {"mu00", "p1", "p2", "p3"});
    PercentEffect p;
    p.mu00 = get_number(j, "effect", "mu00");
    p.p1 = get_number_or(j, "effect", "p1", 0.0);
    p.p2 = get_number_or(j, "effect", "p2", 0.0);
    p.p3 = get_number_or(j, "effect", "p3", 0.0);
    if (hyp == Hypothesis::CMD && !j.contains("p1"))
        fail("effect.p1", "constant-difference effects need p1");
    if (hyp != Hypothesis::CMD && !j.contains("p3"))
        fail("effect.p3", "divergence effects need p3");
    e.v = p;
    return e;
}

Hypothesis parse_hypothesis(const std::string& text) {
    if (text == "cmd") return Hypothesis::CMD;
    if (text == "ldd") return Hypothesis::LDD;
    if (text == "bw") return Hypothesis::BW;
    fail("hypothesis", "expected \"cmd\", \"ldd\" or \"bw\"");
}

CostSpec parse_cost(const json& j) {
    require_object(j, "cost");
    reject_unknown(j, "cost", {"c1", "kappa", "budget", "power_floor"});
    CostSpec c;
    c.c1 = get_number(j, "cost", "c1");
    if (c.c1 <= 0.0) fail("cost.c1", "must be positive");
    c.kappa = get_number(j, "cost", "kappa");
    if (c.kappa < 1.0) fail("cost.kappa", "must be >= 1");
    const bool has_budget = j.contains("budget");
    const bool has_floor = j.contains("power_floor");
    if (has_budget == has_floor)
        fail("cost", "need exactly one of \"budget\" or \"power_floor\"");
    if (has_budget)
        c.constraint = Budget{get_number(j, "cost", "budget")};
    else
        c.constraint = PowerFloor{get_number(j, "cost", "power_floor")};
    return c;
}

std::vector<SweepAxis> parse_sweep_axes(const json& j) {
    if (!j.is_array()) fail("sweep.axes", "expected an array");
    std::vector<SweepAxis> axes;
    int idx = 0;
    for (const json& a : j) {
        const std::string path = "sweep.axes[" + std::to_string(idx++) + "]";
        require_object(a, path);
        reject_unknown(a, path, {"path", "values"});
        SweepAxis axis;
        axis.path = get_string(a, path, "path");
        if (!a.contains("values") || !a.at("values").is_array())
            fail(path + ".values", "expected an array of numbers");
        for (const json& v : a.at("values")) {
            if (!v.is_number()) fail(path + ".values", "expected numbers");
            axis.values.push_back(v.get<double>());
        }
        if (axis.values.empty()) fail(path + ".values", "must be non-empty");
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) fail("sweep.axes", "must be non-empty");
    return axes;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    require_object(doc, "");
    reject_unknown(doc, "",
                   {"schema_version", "hypothesis", "alpha", "grid", "population",
                    "covariance", "effect", "target_power", "n", "cost", "r_max",
                    "sweep"});
    const int version = get_int(doc, "", "schema_version");
    if (version != 1) fail("schema_version", "this build understands version 1");

    Scenario sc;
    sc.query.hyp = parse_hypothesis(get_string(doc, "", "hypothesis"));
    sc.query.alpha = get_number_or(doc, "", "alpha", 0.05);
    if (sc.query.alpha <= 0.0 || sc.query.alpha >= 1.0)
        fail("alpha", "must lie in (0, 1)");
    if (!doc.contains("grid")) fail("grid", "missing required object");
    sc.query.grid = parse_grid(doc.at("grid"));
    if (!doc.contains("population")) fail("population", "missing required object");
    sc.query.pop = parse_population(doc.at("population"));
    if (!doc.contains("covariance")) fail("covariance", "missing required object");
    sc.query.cov = parse_covariance(doc.at("covariance"));
    if (!doc.contains("effect")) fail("effect", "missing required object");
    sc.query.effect = parse_effect(doc.at("effect"), sc.query.hyp);

    if (doc.contains("target_power")) {
        sc.target_power = get_number(doc, "", "target_power");
        if (*sc.target_power <= 0.0 || *sc.target_power >= 1.0)
            fail("target_power", "must lie in (0, 1)");
    }
    if (doc.contains("n")) {
        sc.n = get_number(doc, "", "n");
        if (*sc.n <= 0.0) fail("n", "must be positive");
    }
    if (doc.contains("cost")) sc.cost = parse_cost(doc.at("cost"));
    if (doc.contains("r_max")) {
        sc.r_max = get_int(doc, "", "r_max");
        if (*sc.r_max < 1) fail("r_max", "must be at least 1");
    }
    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        require_object(sw, "sweep");
        reject_unknown(sw, "sweep", {"solve", "axes"});
        sc.sweep_solve = get_string(sw, "sweep", "solve");
        if (sc.sweep_solve != "power" && sc.sweep_solve != "n" &&
            sc.sweep_solve != "r" && sc.sweep_solve != "mde" &&
            sc.sweep_solve != "optimal")
            fail("sweep.solve", "expected power, n, r, mde or optimal");
        if (!sw.contains("axes")) fail("sweep.axes", "missing required array");
        sc.sweep = parse_sweep_axes(sw.at("axes"));
    }

    sc.raw = doc;
    sc.raw["alpha"] = sc.query.alpha;  // echo the default explicitly
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw DomainError(path + ": invalid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

nlohmann::json scenario_to_json(const Scenario& sc) {
    json doc;
    doc["schema_version"] = 1;
    doc["hypothesis"] = sc.query.hyp == Hypothesis::CMD
                            ? "cmd"
                            : (sc.query.hyp == Hypothesis::LDD ? "ldd" : "bw");
    doc["alpha"] = sc.query.alpha;
    doc["grid"] = {{"r", sc.query.grid.r},
                   {"mode", mode_name(sc.query.grid.mode)},
                   {"value", sc.query.grid.value}};
    doc["population"] = {{"pe", sc.query.pop.pe},
                         {"v_t0", sc.query.pop.v_t0},
                         {"rho_e_t0", sc.query.pop.rho_e_t0}};
    json cov;
    if (const auto* cs = std::get_if<CsParams>(&sc.query.cov.v)) {
        cov = {{"type", "cs"}, {"sigma2", cs->sigma2}, {"rho", cs->rho}};
    } else if (const auto* dex = std::get_if<DexParams>(&sc.query.cov.v)) {
        cov = {{"type", "dex"},
               {"sigma2", dex->sigma2},
               {"rho", dex->rho},
               {"theta", dex->theta}};
    } else {
        const auto& rs = std::get<RsParams>(sc.query.cov.v);
        cov["type"] = "rs";
        if (rs.intuitive) {
            cov["intuitive"] = {{"sigma_t0_2", rs.intuitive->sigma_t0_2},
                                {"rho_t0", rs.intuitive->rho_t0},
                                {"rho_b0b1", rs.intuitive->rho_b0b1},
                                {"slope_rel", rs.intuitive->slope_rel},
                                {"r_tilde", rs.intuitive->r_tilde},
                                {"mode", mode_name(rs.intuitive->rel_mode)},
                                {"horizon", rs.intuitive->horizon}};
        } else {
            cov["raw"] = {{"sigma_w2", rs.raw.sigma_w2},
                          {"sigma_b0_2", rs.raw.sigma_b0_2},
                          {"sigma_b1_2", rs.raw.sigma_b1_2},
                          {"sigma_b0b1", rs.raw.sigma_b0b1}};
        }
    }
    doc["covariance"] = cov;
    if (const auto* pct = std::get_if<PercentEffect>(&sc.query.effect.v)) {
        doc["effect"] = {{"mu00", pct->mu00},
                         {"p1", pct->p1},
                         {"p2", pct->p2},
                         {"p3", pct->p3}};
    } else {
        doc["effect"] = {
            {"beta", std::get<AbsoluteEffect>(sc.query.effect.v).beta}};
    }
    if (sc.target_power) doc["target_power"] = *sc.target_power;
    if (sc.n) doc["n"] = *sc.n;
    if (sc.cost) {
        json c = {{"c1", sc.cost->c1}, {"kappa", sc.cost->kappa}};
        if (const auto* b = std::get_if<Budget>(&sc.cost->constraint))
            c["budget"] = b->total;
        else
            c["power_floor"] = std::get<PowerFloor>(sc.cost->constraint).pi;
        doc["cost"] = c;
    }
    if (sc.r_max) doc["r_max"] = *sc.r_max;
    if (!sc.sweep.empty()) {
        json axes = json::array();
        for (const SweepAxis& a : sc.sweep)
            axes.push_back({{"path", a.path}, {"values", a.values}});
        doc["sweep"] = {{"solve", sc.sweep_solve}, {"axes", axes}};
    }
    return doc;
}

}  // namespace longidesign
