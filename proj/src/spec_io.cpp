#include "scenopt/spec_io.hpp"

#include "scenopt/errors.hpp"

#include <fstream>
#include <set>

namespace scenopt::io {

namespace {

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    SCENOPT_REQUIRE(obj.is_object(), ConfigError, where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        SCENOPT_REQUIRE(allowed.count(key) > 0, ConfigError, where + ": unknown key '" + key + "'");
    }
}

const Json& need(const Json& obj, const std::string& key, const std::string& where) {
    SCENOPT_REQUIRE(obj.contains(key), ConfigError, where + ": missing key '" + key + "'");
    return obj.at(key);
}

double number(const Json& v, const std::string& where) {
    SCENOPT_REQUIRE(v.is_number(), ConfigError, where + ": expected a number");
    return v.get<double>();
}

std::uint64_t count(const Json& v, const std::string& where) {
    SCENOPT_REQUIRE(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), ConfigError,
                    where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

Vector vec(const Json& v, const std::string& where) {
    SCENOPT_REQUIRE(v.is_array(), ConfigError, where + ": expected an array of numbers");
    Vector out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

ComponentDist parse_component(const Json& j, const std::string& where) {
    const std::string type = need(j, "type", where).get<std::string>();
    ComponentDist d;
    if (type == "uniform") {
        check_keys(j, {"type", "low", "high", "params"}, where);
        if (j.contains("params")) {
            const Vector p = vec(j["params"], where + ".params");
            SCENOPT_REQUIRE(p.size() == 2, ConfigError, where + ".params: expected [low, high]");
            d = {DistKind::uniform, p[0], p[1], {}};
        } else {
            d = {DistKind::uniform, number(need(j, "low", where), where + ".low"),
                 number(need(j, "high", where), where + ".high"), {}};
        }
        SCENOPT_REQUIRE(d.p1 < d.p2, ConfigError, where + ": uniform needs low < high");
    } else if (type == "normal") {
        check_keys(j, {"type", "mean", "std", "params"}, where);
        d = {DistKind::normal, j.contains("mean") ? number(j["mean"], where + ".mean") : 0.0,
             j.contains("std") ? number(j["std"], where + ".std") : 1.0, {}};
        if (j.contains("params")) {
            const Vector p = vec(j["params"], where + ".params");
            SCENOPT_REQUIRE(p.size() == 2, ConfigError, where + ".params: expected [mean, std]");
            d.p1 = p[0];
            d.p2 = p[1];
        }
        SCENOPT_REQUIRE(d.p2 > 0.0, ConfigError, where + ": normal needs std > 0");
    } else if (type == "discrete") {
        check_keys(j, {"type", "values"}, where);
        d.kind = DistKind::discrete;
        d.values = vec(need(j, "values", where), where + ".values");
        SCENOPT_REQUIRE(!d.values.empty(), ConfigError, where + ": discrete needs values");
    } else {
        throw ConfigError(where + ": unknown distribution type '" + type + "'");
    }
    return d;
}

Sampler parse_sampler(const Json& j, const std::string& where) {
    SCENOPT_REQUIRE(j.is_object(), ConfigError, where + ": expected an object");
    if (need(j, "type", where).get<std::string>() != "product") return Sampler{{parse_component(j, where)}};
    check_keys(j, {"type", "components"}, where);
    const Json& comps = need(j, "components", where);
    SCENOPT_REQUIRE(comps.is_array() && !comps.empty(), ConfigError, where + ".components: expected a non-empty array");
    Sampler s;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        s.components.push_back(parse_component(comps[i], where + ".components[" + std::to_string(i) + "]"));
    }
    return s;
}

Generator parse_generator(const Json& j, std::size_t dimension, const std::string& where) {
    const std::string type = need(j, "type", where).get<std::string>();
    if (type == "linear") {
        check_keys(j, {"type", "rows"}, where);
        const Json& rows = need(j, "rows", where);
        SCENOPT_REQUIRE(rows.is_array() && !rows.empty(), ConfigError, where + ".rows: expected a non-empty array");
        LinearGenerator gen;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string w = where + ".rows[" + std::to_string(i) + "]";
            const Json& r = rows[i];
            check_keys(r, {"a0", "a_delta", "b0", "b_delta"}, w);
            AffineRow ar;
            ar.a0 = vec(need(r, "a0", w), w + ".a0");
            if (r.contains("a_delta")) {
                SCENOPT_REQUIRE(r["a_delta"].is_array(), ConfigError, w + ".a_delta: expected an array of arrays");
                for (std::size_t k = 0; k < r["a_delta"].size(); ++k) {
                    ar.a_delta.push_back(vec(r["a_delta"][k], w + ".a_delta[" + std::to_string(k) + "]"));
                }
            }
            ar.b0 = r.contains("b0") ? number(r["b0"], w + ".b0") : 0.0;
            if (r.contains("b_delta")) ar.b_delta = vec(r["b_delta"], w + ".b_delta");
            gen.rows.push_back(std::move(ar));
        }
        return gen;
    }
    if (type == "cuboid") {
        check_keys(j, {"type", "axes", "coordinate", "coordinates"}, where);
        // Shorthand: coordinate i of an n-cuboid with x = (z, w), reading outcome component k.
        if (!j.contains("axes")) {
            std::vector<std::uint64_t> coords;
            if (j.contains("coordinate")) coords.push_back(count(j["coordinate"], where + ".coordinate"));
            if (j.contains("coordinates")) {
                SCENOPT_REQUIRE(j["coordinates"].is_array(), ConfigError, where + ".coordinates: expected an array");
                for (const auto& c : j["coordinates"]) coords.push_back(count(c, where + ".coordinates"));
            }
            SCENOPT_REQUIRE(!coords.empty(), ConfigError, where + ": cuboid needs axes, coordinate or coordinates");
            SCENOPT_REQUIRE(dimension % 2 == 0, ConfigError, where + ": cuboid shorthand needs an even dimension");
            CuboidGenerator gen;
            for (std::size_t k = 0; k < coords.size(); ++k) gen.axes.push_back({k, coords[k], dimension / 2 + coords[k]});
            return gen;
        }
        const Json& axes = j["axes"];
        SCENOPT_REQUIRE(axes.is_array() && !axes.empty(), ConfigError, where + ".axes: expected a non-empty array");
        CuboidGenerator gen;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const std::string w = where + ".axes[" + std::to_string(i) + "]";
            check_keys(axes[i], {"component", "z_index", "w_index"}, w);
            gen.axes.push_back({axes[i].contains("component") ? count(axes[i]["component"], w + ".component") : 0,
                                count(need(axes[i], "z_index", w), w + ".z_index"),
                                count(need(axes[i], "w_index", w), w + ".w_index")});
        }
        return gen;
    }
    throw ConfigError(where + ": unknown generator type '" + type + "'");
}

}  // namespace

SpecFile parse_spec(const Json& doc) {
    try {
        check_keys(doc, {"name", "dimension", "cost", "box", "deterministic_rows", "stages", "theta_total", "policy"},
                   "spec");
        SpecFile out;
        if (doc.contains("name")) out.name = doc["name"].get<std::string>();
        ScenarioProgram& p = out.program;
        p.dimension = count(need(doc, "dimension", "spec"), "spec.dimension");
        p.cost = vec(need(doc, "cost", "spec"), "spec.cost");
        const Json& box = need(doc, "box", "spec");
        check_keys(box, {"lower", "upper"}, "spec.box");
        p.box = {vec(need(box, "lower", "spec.box"), "spec.box.lower"),
                 vec(need(box, "upper", "spec.box"), "spec.box.upper")};
        if (doc.contains("deterministic_rows")) {
            const Json& rows = doc["deterministic_rows"];
            SCENOPT_REQUIRE(rows.is_array(), ConfigError, "spec.deterministic_rows: expected an array");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const std::string w = "spec.deterministic_rows[" + std::to_string(i) + "]";
                check_keys(rows[i], {"a", "b"}, w);
                p.deterministic_rows.push_back({vec(need(rows[i], "a", w), w + ".a"), number(need(rows[i], "b", w), w + ".b")});
            }
        }
        if (doc.contains("theta_total")) out.theta_total = number(doc["theta_total"], "spec.theta_total");
        if (doc.contains("policy")) out.policy = bounds::parse_policy(doc["policy"].get<std::string>());

        const Json& stages = need(doc, "stages", "spec");
        SCENOPT_REQUIRE(stages.is_array(), ConfigError, "spec.stages: expected an array");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const std::string w = "spec.stages[" + std::to_string(i) + "]";
            const Json& s = stages[i];
            check_keys(s, {"name", "eps", "zeta_bar", "monotone", "sample_size", "discard", "generator", "sampler"}, w);
            StageSpec st;
            st.eps = number(need(s, "eps", w), w + ".eps");
            if (s.contains("zeta_bar")) st.zeta_bar = static_cast<int>(count(s["zeta_bar"], w + ".zeta_bar"));
            if (s.contains("monotone")) {
                SCENOPT_REQUIRE(s["monotone"].is_boolean(), ConfigError, w + ".monotone: expected a boolean");
                st.monotone = s["monotone"].get<bool>();
            }
            if (s.contains("sample_size")) st.sample_size = count(s["sample_size"], w + ".sample_size");
            st.generator = parse_generator(need(s, "generator", w), p.dimension, w + ".generator");
            if (s.contains("sampler")) st.sampler = parse_sampler(s["sampler"], w + ".sampler");
            out.discard.push_back(s.contains("discard") ? count(s["discard"], w + ".discard") : 0);
            p.stages.push_back(std::move(st));
        }
        p.validate();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
}

SpecFile load_spec(const std::string& path) {
    std::ifstream in(path);
    SCENOPT_REQUIRE(in.good(), ConfigError, "cannot open spec file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("spec '" + path + "': " + e.what());
    }
    return parse_spec(doc);
}

Json to_json(const bounds::SampleSizePlan& plan) {
    Json stages = Json::array();
    for (const auto& s : plan.stages) {
        stages.push_back({{"stage", s.stage},
                          {"sample_size", s.sample_size},
                          {"discard", s.discard},
                          {"eps", s.eps},
                          {"theta", s.theta},
                          {"zeta_bar", s.zeta_bar},
                          {"method", bounds::to_string(s.method)},
                          {"achieved_bound", s.achieved_bound}});
    }
    return {{"theta_total", plan.theta_total}, {"stages", stages}};
}

Json to_json(const StageSets& sets) {
    Json out = Json::array();
    for (const auto& s : sets) out.push_back(s);
    return out;
}

Json to_json(const Solution& s) {
    Json out{{"status", to_string(s.status)}};
    if (!s.ok()) return out;
    out["objective"] = s.objective;
    out["x"] = s.x;
    out["active"] = to_json(s.active);
    out["duals"] = s.duals;
    return out;
}

Json to_json(const validate::ViolationEstimate& e) {
    return {{"stage", e.stage},       {"n_val", e.n_val},     {"violations", e.violations},
            {"point", e.point},       {"ci_low", e.ci_low},   {"ci_high", e.ci_high}};
}

}  // namespace scenopt::io
