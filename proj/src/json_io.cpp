#include "discop/json_io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace discop {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

json parse_or_fail(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        // Re-parse with exceptions for a position diagnostic.
        try {
            (void)json::parse(text);
        } catch (const json::parse_error& e) {
            fail(std::string(what) + ": " + e.what());
        }
        fail(std::string(what) + ": malformed JSON");
    }
    return j;
}

std::vector<double> number_array(const json& j, const char* what) {
    if (!j.is_array()) fail(std::string(what) + " must be a JSON array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) fail(std::string(what) + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

void append_number_array(std::string& out, std::span<const double> values) {
    out.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        out += format_double(values[i]);
    }
    out.push_back(']');
}

void append_int_array(std::string& out, std::span<const int> values) {
    out.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(values[i]);
    }
    out.push_back(']');
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- Profile ----------------------------------------------------------------

Profile parse_profile(const std::string& text) {
    const json j = parse_or_fail(text, "profile");
    if (!j.is_array() || j.empty()) fail("profile must be a non-empty JSON array of arrays");
    std::vector<Marginal> ms;
    ms.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        ms.emplace_back(number_array(j[i], ("profile marginal " + std::to_string(i + 1)).c_str()));
    }
    return Profile(std::move(ms));
}

std::string profile_to_json(const Profile& profile) {
    std::string out = "[";
    for (int i = 1; i <= profile.dims(); ++i) {
        if (i > 1) out.push_back(',');
        append_number_array(out, profile.at(i).probs());
    }
    out.push_back(']');
    return out;
}

Marginal parse_marginal(const std::string& text) {
    const json j = parse_or_fail(text, "marginal");
    return Marginal(number_array(j, "marginal"));
}

std::string marginal_to_json(const Marginal& marginal) {
    std::string out;
    append_number_array(out, marginal.probs());
    return out;
}

// ---- CopulaSpec ---------------------------------------------------------------

Copula parse_copula_spec(const std::string& json_or_name, int fallback_dim) {
    std::string text = json_or_name;
    // Accept bare names for the parameter-free families.
    if (!text.empty() && text[0] != '{') {
        if (text == "independence" || text == "frechet-upper" || text == "frechet_upper") {
            text = std::string("{\"family\":\"") + (text == "independence" ? "independence" : "frechet-upper") + "\"}";
        } else {
            fail("copula spec '" + text + "' is neither JSON nor a parameter-free family name");
        }
    }
    const json j = parse_or_fail(text, "copula spec");
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        fail("copula spec must be an object with a \"family\" string");
    const std::string family = j["family"].get<std::string>();

    int dim = 0;
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) fail("copula spec field \"n\" must be an integer");
        dim = j["n"].get<int>();
    }

    if (family == "gaussian") {
        if (!j.contains("sigma") || !j["sigma"].is_array()) fail("gaussian spec requires a \"sigma\" matrix");
        const json& rows = j["sigma"];
        const int n = static_cast<int>(rows.size());
        if (dim != 0 && dim != n) fail("gaussian spec \"n\" contradicts the sigma size");
        std::vector<double> sigma;
        sigma.reserve(static_cast<std::size_t>(n) * n);
        for (const auto& row : rows) {
            const std::vector<double> r = number_array(row, "sigma row");
            if (static_cast<int>(r.size()) != n) fail("sigma must be square");
            sigma.insert(sigma.end(), r.begin(), r.end());
        }
        std::uint64_t seed = 0;
        if (j.contains("qmc_seed")) seed = j["qmc_seed"].get<std::uint64_t>();
        return Copula::gaussian(std::move(sigma), n, seed);
    }

    if (dim == 0) dim = fallback_dim;
    if (dim < 1) fail("copula spec for family '" + family + "' needs a dimension (\"n\")");
    if (family == "independence") return Copula::independence(dim);
    if (family == "frechet-upper" || family == "frechet_upper") return Copula::frechet_upper(dim);
    if (family == "clayton" || family == "gumbel") {
        if (!j.contains("theta") || !j["theta"].is_number()) fail(family + " spec requires a numeric \"theta\"");
        const double theta = j["theta"].get<double>();
        return family == "clayton" ? Copula::clayton(dim, theta) : Copula::gumbel(dim, theta);
    }
    fail("unknown copula family '" + family + "'");
}

std::string copula_to_json(const Copula& copula) {
    std::string out = "{\"family\":\"" + copula.name() + "\"";
    if (copula.family() == CopulaFamily::gaussian) {
        out += ",\"sigma\":[";
        const int n = copula.dim();
        for (int i = 0; i < n; ++i) {
            if (i) out.push_back(',');
            append_number_array(out, copula.sigma().subspan(static_cast<std::size_t>(i) * n, static_cast<std::size_t>(n)));
        }
        out.push_back(']');
    } else if (copula.family() == CopulaFamily::clayton || copula.family() == CopulaFamily::gumbel) {
        out += ",\"theta\":" + format_double(copula.theta());
    }
    out += ",\"n\":" + std::to_string(copula.dim()) + "}";
    return out;
}

// ---- JointPmf -----------------------------------------------------------------

JointPmf parse_joint(const std::string& text) {
    const json j = parse_or_fail(text, "joint");
    if (!j.is_object() || !j.contains("shape") || !j.contains("mass"))
        fail("joint must be an object with \"shape\" and \"mass\"");
    std::vector<int> shape;
    for (const auto& v : j["shape"]) {
        if (!v.is_number_integer()) fail("joint \"shape\" must contain integers");
        shape.push_back(v.get<int>());
    }
    return JointPmf(std::move(shape), number_array(j["mass"], "joint \"mass\""));
}

std::string joint_to_json(const JointPmf& joint) {
    std::string out = "{\"shape\":";
    append_int_array(out, joint.shape());
    out += ",\"mass\":";
    append_number_array(out, joint.mass());
    out.push_back('}');
    return out;
}

// ---- CopulaGrid -----------------------------------------------------------------

CopulaGrid parse_copula_grid(const std::string& text) {
    const json j = parse_or_fail(text, "copula grid");
    if (!j.is_object() || !j.contains("n") || !j.contains("depth") || !j.contains("values"))
        fail("copula grid must be an object with \"n\", \"depth\" and \"values\"");
    return CopulaGrid(j["n"].get<int>(), j["depth"].get<int>(), number_array(j["values"], "grid \"values\""));
}

std::string copula_grid_to_json(const CopulaGrid& grid) {
    std::string out = "{\"n\":" + std::to_string(grid.dim()) + ",\"depth\":" + std::to_string(grid.depth()) + ",\"values\":";
    append_number_array(out, grid.values());
    out.push_back('}');
    return out;
}

// ---- reports ---------------------------------------------------------------------

std::string report_to_json(const ConformanceReport& report) {
    std::string out = "{\"verdict\":\"" + verdict_name(report.verdict) + "\"";
    out += ",\"trials\":" + std::to_string(report.trials);
    out += ",\"worst_violation\":" + format_double(report.worst_violation);
    if (report.witness) {
        const Witness& w = *report.witness;
        out += ",\"witness\":{";
        bool first = true;
        auto field = [&](const std::string& name) {
            if (!first) out.push_back(',');
            first = false;
            out += "\"" + name + "\":";
        };
        if (w.profile) {
            field("profile");
            out += profile_to_json(*w.profile);
        }
        if (w.dim > 0) {
            field("i");
            out += std::to_string(w.dim);
        }
        if (w.merge_bin > 0) {
            field("j");
            out += std::to_string(w.merge_bin);
        }
        if (!w.sigma.empty()) {
            field("sigma");
            append_int_array(out, w.sigma);
        }
        if (!w.cell.empty()) {
            field("cell");
            append_int_array(out, w.cell);
        }
        if (!w.x.empty()) {
            field("x");
            append_number_array(out, w.x);
        }
        field("lhs");
        out += format_double(w.lhs);
        field("rhs");
        out += format_double(w.rhs);
        out.push_back('}');
    }
    out.push_back('}');
    return out;
}

std::string axioms_to_json(const AxiomsReport& report) {
    std::string out = "{\"grid_depth\":" + std::to_string(report.grid_depth);
    auto flag = [](bool b) { return b ? "true" : "false"; };
    out += std::string(",\"grounded\":") + flag(report.grounded);
    out += std::string(",\"uniform_marginals\":") + flag(report.uniform_marginals);
    out += std::string(",\"n_increasing\":") + flag(report.n_increasing);
    out += ",\"worst_grounded\":" + format_double(report.worst_grounded);
    out += ",\"worst_marginal\":" + format_double(report.worst_marginal);
    out += ",\"min_box_mass\":" + format_double(report.min_box_mass);
    out += ",\"partition_sum\":" + format_double(report.partition_sum);
    out += std::string(",\"pass\":") + flag(report.pass()) + "}";
    return out;
}

// ---- oracle protocol ------------------------------------------------------------

std::string oracle_request_to_json(const Profile& profile) {
    return "{\"profile\":" + profile_to_json(profile) + "}";
}

Profile parse_oracle_request(const std::string& text) {
    const json j = parse_or_fail(text, "oracle request");
    if (!j.is_object() || !j.contains("profile")) fail("oracle request must contain \"profile\"");
    std::vector<Marginal> ms;
    for (const auto& row : j["profile"]) ms.emplace_back(number_array(row, "oracle request marginal"));
    return Profile(std::move(ms));
}

} // namespace discop
