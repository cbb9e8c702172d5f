// Command-line front end for the discop shared library. Links the C API only;
// argument handling and file plumbing live here, all computation behind
// discop.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "discop.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct CliError {
    std::string message;
};

[[noreturn]] void die(const std::string& msg) { throw CliError{msg}; }

[[noreturn]] void die_api(const std::string& context) {
    die(context + ": " + discop_last_error());
}

std::string take_string(char* s) {
    std::string out = s ? s : "";
    discop_string_free(s);
    return out;
}

// Inline JSON is passed through; anything else is treated as a path.
std::string resolve_input(const std::string& arg, const char* what) {
    if (arg.empty()) die(std::string(what) + " is empty");
    if (arg[0] == '[' || arg[0] == '{') return arg;
    std::ifstream in(arg);
    if (!in.good()) die(std::string(what) + ": cannot read file '" + arg + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Copula flags accept a family name, inline JSON, or a path to spec JSON.
std::string resolve_copula_arg(const std::string& arg) {
    if (arg.empty()) die("--copula is empty");
    if (arg[0] == '[' || arg[0] == '{') return arg;
    if (std::ifstream in(arg); in.good()) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return arg; // family name
}

void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        if (payload.empty() || payload.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out.good()) die("cannot write to '" + out_path + "'");
    out << payload;
    if (payload.empty() || payload.back() != '\n') out << '\n';
}

using ProfilePtr = std::unique_ptr<discop_profile, decltype(&discop_profile_free)>;
using CopulaPtr = std::unique_ptr<discop_copula, decltype(&discop_copula_free)>;
using JointPtr = std::unique_ptr<discop_joint, decltype(&discop_joint_free)>;
using ModelPtr = std::unique_ptr<discop_model, decltype(&discop_model_free)>;
using ReportPtr = std::unique_ptr<discop_report, decltype(&discop_report_free)>;
using GridPtr = std::unique_ptr<discop_grid, decltype(&discop_grid_free)>;

ProfilePtr parse_profile_arg(const std::string& arg) {
    discop_profile* p = nullptr;
    if (discop_profile_parse(resolve_input(arg, "--profile").c_str(), &p) != DISCOP_OK)
        die_api("profile");
    return {p, &discop_profile_free};
}

CopulaPtr parse_copula_arg(const std::string& arg, int fallback_dim) {
    discop_copula* c = nullptr;
    if (discop_copula_parse(resolve_copula_arg(arg).c_str(), fallback_dim, &c) != DISCOP_OK)
        die_api("copula");
    return {c, &discop_copula_free};
}

ModelPtr parse_model_arg(const std::string& arg) {
    discop_model* m = nullptr;
    std::string spec = arg;
    // Allow copula:<path>; file contents are resolved by the library.
    if (discop_model_create(spec.c_str(), &m) != DISCOP_OK) die_api("model");
    return {m, &discop_model_free};
}

std::vector<int> parse_dims_list(const std::string& arg) {
    std::vector<int> out;
    nlohmann::json j = nlohmann::json::parse(arg, nullptr, false);
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<int>());
        return out;
    }
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_point(const std::string& arg) {
    nlohmann::json j = nlohmann::json::parse(arg, nullptr, false);
    if (!j.is_array() || j.empty()) die("--x must be a JSON array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) die("--x must be a JSON array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

int finish_report(discop_report* rep, const std::string& out_path) {
    char* json = nullptr;
    if (discop_report_to_json(rep, &json) != DISCOP_OK) die_api("report");
    emit(take_string(json), out_path);
    const std::string verdict = discop_report_verdict(rep);
    return verdict == "pass" ? kExitPass : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint distributions from ordered categorical marginals via copulas, "
                 "with aggregation-invariance and neutrality conformance checks"};
    app.require_subcommand(1);

    std::string copula_arg, profile_arg, model_arg, out_path, format = "json";
    std::string x_arg, perm_arg, mset_arg;
    long trials = 0;
    std::uint64_t seed = 0;
    int dims = 2, zmax = 6, grid_depth = 0, dim = 0, bin = 0;
    double tol = 0;

    auto* cmd_build = app.add_subcommand("build", "build the joint of a copula and a profile");
    cmd_build->add_option("--copula", copula_arg, "copula name, JSON, or spec file")->required();
    cmd_build->add_option("--profile", profile_arg, "profile JSON or file")->required();
    cmd_build->add_option("--format", format, "json|table (default json)");
    cmd_build->add_option("--out", out_path, "write output here instead of stdout");

    auto* cmd_collapse = app.add_subcommand("collapse", "merge two adjacent bins of one marginal");
    cmd_collapse->add_option("--profile", profile_arg)->required();
    cmd_collapse->add_option("--dim", dim, "dimension to merge (1-based)")->required();
    cmd_collapse->add_option("--bin", bin, "first of the two merged bins (1-based)")->required();
    cmd_collapse->add_option("--out", out_path);

    auto* cmd_ia = app.add_subcommand("check-ia", "aggregation-invariance conformance");
    cmd_ia->add_option("--model", model_arg, "independence|frechet-upper|maximal-coupling|copula:<spec>|exec:<cmd>")->required();
    cmd_ia->add_option("--profile", profile_arg, "check one profile (with --dim/--bin)");
    cmd_ia->add_option("--dim", dim);
    cmd_ia->add_option("--bin", bin);
    cmd_ia->add_option("--trials", trials, "randomized trials (default 1000)");
    cmd_ia->add_option("--seed", seed);
    cmd_ia->add_option("--dims", dims, "profile dimensions for randomized runs (default 2)");
    cmd_ia->add_option("--zmax", zmax, "max bins per dimension (default 6)");
    cmd_ia->add_option("--tol", tol, "tolerance (default: model family default)");
    cmd_ia->add_option("--out", out_path);

    auto* cmd_extract = app.add_subcommand("extract", "extract the model's copula");
    cmd_extract->add_option("--model", model_arg)->required();
    cmd_extract->add_option("--x", x_arg, "evaluate at one point, e.g. [0.5,0.25]");
    cmd_extract->add_option("--grid-depth", grid_depth, "tabulate on the dyadic grid");
    cmd_extract->add_option("--dims", dims, "dimension for --grid-depth (default 2)");
    cmd_extract->add_option("--out", out_path);

    auto* cmd_neutral = app.add_subcommand("check-neutrality", "label-neutrality conformance");
    cmd_neutral->add_option("--model", model_arg)->required();
    cmd_neutral->add_option("--profile", profile_arg, "check one profile (with --dim/--perm)");
    cmd_neutral->add_option("--dim", dim);
    cmd_neutral->add_option("--perm", perm_arg, "permutation JSON, e.g. [2,1,3]");
    cmd_neutral->add_option("--trials", trials, "randomized trials (default 500)");
    cmd_neutral->add_option("--seed", seed);
    cmd_neutral->add_option("--dims", dims);
    cmd_neutral->add_option("--zmax", zmax);
    cmd_neutral->add_option("--tol", tol);
    cmd_neutral->add_option("--out", out_path);

    auto* cmd_factor = app.add_subcommand("verify-factorization",
                                          "check C(x) = prod_M x_i * C(x with M set to 1)");
    cmd_factor->add_option("--copula", copula_arg)->required();
    cmd_factor->add_option("--m-set", mset_arg, "dimensions in M, e.g. [1] or 1,2")->required();
    cmd_factor->add_option("--dims", dims, "dimension for named copulas (default 2)");
    cmd_factor->add_option("--grid-depth", grid_depth, "dyadic grid depth (default 5)");
    cmd_factor->add_option("--tol", tol);
    cmd_factor->add_option("--out", out_path);

    auto* cmd_axioms = app.add_subcommand("axioms", "check the copula axioms on a dyadic grid");
    cmd_axioms->add_option("--copula", copula_arg)->required();
    cmd_axioms->add_option("--dims", dims, "dimension for named copulas (default 2)");
    cmd_axioms->add_option("--grid-depth", grid_depth, "dyadic grid depth (default 4)");
    cmd_axioms->add_option("--out", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_build->parsed()) {
            ProfilePtr profile = parse_profile_arg(profile_arg);
            CopulaPtr copula = parse_copula_arg(copula_arg, discop_profile_dims(profile.get()));
            discop_joint* joint = nullptr;
            if (discop_joint_build(copula.get(), profile.get(), &joint) != DISCOP_OK)
                die_api("build");
            JointPtr guard(joint, &discop_joint_free);
            char* payload = nullptr;
            if (format == "table") {
                if (discop_joint_render_table(joint, &payload) != DISCOP_OK) die_api("render");
            } else if (format == "json") {
                if (discop_joint_to_json(joint, &payload) != DISCOP_OK) die_api("serialize");
            } else {
                die("--format must be json or table");
            }
            emit(take_string(payload), out_path);
            return kExitPass;
        }

        if (cmd_collapse->parsed()) {
            ProfilePtr profile = parse_profile_arg(profile_arg);
            discop_profile* merged = nullptr;
            if (discop_profile_collapse(profile.get(), dim, bin, &merged) != DISCOP_OK)
                die_api("collapse");
            ProfilePtr guard(merged, &discop_profile_free);
            char* payload = nullptr;
            if (discop_profile_to_json(merged, &payload) != DISCOP_OK) die_api("serialize");
            emit(take_string(payload), out_path);
            return kExitPass;
        }

        if (cmd_ia->parsed()) {
            ModelPtr model = parse_model_arg(model_arg);
            discop_report* rep = nullptr;
            if (!profile_arg.empty()) {
                if (dim == 0 || bin == 0) die("targeted check-ia needs --dim and --bin");
                ProfilePtr profile = parse_profile_arg(profile_arg);
                if (discop_check_ia_at(model.get(), profile.get(), dim, bin, tol, &rep) != DISCOP_OK)
                    die_api("check-ia");
            } else {
                if (trials <= 0) trials = 1000;
                if (discop_check_ia_randomized(model.get(), trials, seed, dims, zmax, tol, &rep) !=
                    DISCOP_OK)
                    die_api("check-ia");
            }
            ReportPtr guard(rep, &discop_report_free);
            return finish_report(rep, out_path);
        }

        if (cmd_extract->parsed()) {
            ModelPtr model = parse_model_arg(model_arg);
            if (!x_arg.empty()) {
                const std::vector<double> x = parse_point(x_arg);
                double value = 0;
                if (discop_extract_copula(model.get(), x.data(), static_cast<int>(x.size()),
                                          &value) != DISCOP_OK)
                    die_api("extract");
                std::ostringstream payload;
                payload << "{\"x\":" << x_arg << ",\"value\":";
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", value);
                payload << buf << "}";
                emit(payload.str(), out_path);
                return kExitPass;
            }
            if (grid_depth <= 0) die("extract needs --x or --grid-depth");
            discop_grid* grid = nullptr;
            if (discop_extract_grid(model.get(), dims, grid_depth, &grid) != DISCOP_OK)
                die_api("extract");
            GridPtr guard(grid, &discop_grid_free);
            char* payload = nullptr;
            if (discop_grid_to_json(grid, &payload) != DISCOP_OK) die_api("serialize");
            emit(take_string(payload), out_path);
            return kExitPass;
        }

        if (cmd_neutral->parsed()) {
            ModelPtr model = parse_model_arg(model_arg);
            discop_report* rep = nullptr;
            if (!profile_arg.empty()) {
                if (dim == 0 || perm_arg.empty()) die("targeted check-neutrality needs --dim and --perm");
                ProfilePtr profile = parse_profile_arg(profile_arg);
                const std::vector<int> sigma = parse_dims_list(perm_arg);
                if (discop_check_m_neutrality_at(model.get(), profile.get(), dim, sigma.data(),
                                                 static_cast<int>(sigma.size()), tol, &rep) != DISCOP_OK)
                    die_api("check-neutrality");
            } else {
                if (trials <= 0) trials = 500;
                if (discop_check_m_neutrality_randomized(model.get(), trials, seed, dims, zmax, tol,
                                                         &rep) != DISCOP_OK)
                    die_api("check-neutrality");
            }
            ReportPtr guard(rep, &discop_report_free);
            return finish_report(rep, out_path);
        }

        if (cmd_factor->parsed()) {
            CopulaPtr copula = parse_copula_arg(copula_arg, dims);
            const std::vector<int> m_set = parse_dims_list(mset_arg);
            if (grid_depth <= 0) grid_depth = 5;
            discop_report* rep = nullptr;
            if (discop_verify_factorization(copula.get(), m_set.data(),
                                            static_cast<int>(m_set.size()), grid_depth, tol,
                                            &rep) != DISCOP_OK)
                die_api("verify-factorization");
            ReportPtr guard(rep, &discop_report_free);
            return finish_report(rep, out_path);
        }

        if (cmd_axioms->parsed()) {
            CopulaPtr copula = parse_copula_arg(copula_arg, dims);
            if (grid_depth <= 0) grid_depth = 4;
            int pass = 0;
            char* payload = nullptr;
            if (discop_copula_check_axioms(copula.get(), grid_depth, &pass, &payload) != DISCOP_OK)
                die_api("axioms");
            emit(take_string(payload), out_path);
            return pass ? kExitPass : kExitFail;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
